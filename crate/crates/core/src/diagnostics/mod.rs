//! Energy and entropy functionals, dissipation ledgers, inequality checks,
//! integration-by-parts identities, and the diagnostics CSV.

mod csv_io;
mod identities;
mod inequality;
mod norms;

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::continuity::flux_divergence;
use crate::error::{Error, Result};
use crate::galerkin::{GalerkinState, RegularizationParams};
use crate::pressure::PressureLaw;
use crate::torus::{pointwise_apply, SpectralField, VectorField};

pub use csv_io::{read_diagnostics_csv, write_diagnostics_csv, CSV_COLUMNS};
pub use identities::{check_identity, identity_sides, random_smooth_pair, IdentityKind};
pub use inequality::{
    check_comparison_records, check_energy_inequality, check_energy_records, check_entropy_inequality,
    check_entropy_records, energy_slack_per_step, max_mass_drift_per_step, ComparisonReport, EnergyInequalityReport,
    EntropyInequalityReport, LedgerViolation, RecordViolation, ENERGY_SLACK_C,
};
pub use norms::{definition_norms, definition_norms_of, DefinitionNorms};

/// Terms of the total energy at one instant.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    /// `1/2 int rho |u|^2`
    pub kinetic: f64,
    /// `int Pi(rho)`
    pub internal: f64,
    /// `(eta/7) int rho^-6`
    pub cold: f64,
    /// `(delta/2) int |grad Delta rho|^2`
    pub hyper: f64,
    /// `(lambda / 8 pi G) int |grad Phi|^2`: negative for attraction, positive for repulsion.
    pub poisson_signed: f64,
    pub total: f64,
}

/// Time-accumulated energy dissipations (or, inside [`StepRates`], their rates).
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DissipationLedger {
    /// `int int rho |D u|^2`
    pub visc: f64,
    /// `r0 int int |u|^2`
    pub drag0: f64,
    /// `r1 int int rho |u|^3`
    pub drag1: f64,
    /// `mu int int |Delta u|^2`
    pub hypervisc: f64,
    /// `(4 eps / a gamma^2) int int |grad rho^{gamma/2}|^2`
    pub press_diff: f64,
    /// `(2/3) eta eps int int |grad rho^-3|^2`
    pub cold_diff: f64,
    /// `delta eps int int |Delta^2 rho|^2`
    pub biharm: f64,
}

impl DissipationLedger {
    pub const FIELDS: [&'static str; 7] =
        ["visc", "drag0", "drag1", "hypervisc", "press_diff", "cold_diff", "biharm"];

    pub fn values(&self) -> [f64; 7] {
        [
            self.visc,
            self.drag0,
            self.drag1,
            self.hypervisc,
            self.press_diff,
            self.cold_diff,
            self.biharm,
        ]
    }

    pub fn total(&self) -> f64 {
        self.values().iter().sum()
    }

    fn add_scaled(&mut self, r: &Self, dt: f64) {
        self.visc += dt * r.visc;
        self.drag0 += dt * r.drag0;
        self.drag1 += dt * r.drag1;
        self.hypervisc += dt * r.hypervisc;
        self.press_diff += dt * r.press_diff;
        self.cold_diff += dt * r.cold_diff;
        self.biharm += dt * r.biharm;
    }
}

/// Right-hand-side terms of the energy inequality.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EnergySources {
    /// `-(4 pi G eps / lambda) int int (rho - mean)^2`
    pub energy_source: f64,
    /// `b eps int int |grad rho|^2 / rho`: the slack between the true pressure
    /// dissipation and `press_diff` allowed by the lower envelope of `P'`.
    pub press_defect: f64,
}

/// Dissipation terms of the B-D entropy balance.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyDissipation {
    /// `eps int |Delta rho|^2 / rho`
    pub ent_lap: f64,
    /// `r0 eps int |grad rho|^2 / rho^2`
    pub ent_log: f64,
    /// `(2/3) eta int |grad rho^-3|^2`
    pub ent_cold: f64,
    /// `int rho |grad u|^2`
    pub ent_visc: f64,
    /// `(4 / a gamma^2) int |grad rho^{gamma/2}|^2`
    pub ent_press: f64,
    /// `delta int |Delta^2 rho|^2`
    pub ent_hyper: f64,
}

impl EntropyDissipation {
    pub fn total(&self) -> f64 {
        self.ent_lap + self.ent_log + self.ent_cold + self.ent_visc + self.ent_press + self.ent_hyper
    }

    fn add_scaled(&mut self, r: &Self, dt: f64) {
        self.ent_lap += dt * r.ent_lap;
        self.ent_log += dt * r.ent_log;
        self.ent_cold += dt * r.ent_cold;
        self.ent_visc += dt * r.ent_visc;
        self.ent_press += dt * r.ent_press;
        self.ent_hyper += dt * r.ent_hyper;
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct EntropyBreakdown {
    /// `1/2 int rho |u + grad rho / rho|^2`
    pub bd_core: f64,
    /// `-r0 int log rho`
    pub log_term: f64,
    /// Instantaneous dissipation rates.
    pub dissipation_rates: EntropyDissipation,
    /// Instantaneous bound on the right-hand side of the entropy balance,
    /// excluding the kinetic-energy difference.
    pub source_rate: f64,
}

/// Instantaneous norms from the weak-solution regularity classes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StaticNorms {
    pub rho_l1: f64,
    pub rho_lgamma: f64,
    pub sqrt_rho_u_l2: f64,
    pub grad_sqrt_rho_l2: f64,
}

/// Every instantaneous integrand whose time integral is tracked.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct StepRates {
    pub ledger: DissipationLedger,
    pub sources: EnergySources,
    pub entropy: EntropyDissipation,
    pub entropy_source: f64,
    /// `int rho^-6`
    pub cold_integrand: f64,
    /// `||grad rho^{gamma/2}||^2`
    pub grad_rho_gamma_half_sq: f64,
    /// `||sqrt(rho) grad u||^2`
    pub sqrt_rho_grad_u_sq: f64,
    /// `int rho |u|^3`
    pub rho_u_cubed: f64,
}

/// All functionals of one state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Evaluation {
    pub energy: EnergyBreakdown,
    pub entropy: EntropyBreakdown,
    pub rates: StepRates,
    pub norms: StaticNorms,
}

/// Left-endpoint time integrals of [`StepRates`].
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Accumulators {
    pub ledger: DissipationLedger,
    pub sources: EnergySources,
    pub entropy: EntropyDissipation,
    pub entropy_source: f64,
    pub cold_time_integral: f64,
    pub divu_linf_integral: f64,
    pub grad_rho_gamma_half_sq: f64,
    pub sqrt_rho_grad_u_sq: f64,
    pub rho_u_cubed: f64,
}

impl Accumulators {
    pub fn add(&mut self, r: &StepRates, dt: f64) {
        self.ledger.add_scaled(&r.ledger, dt);
        self.sources.energy_source += dt * r.sources.energy_source;
        self.sources.press_defect += dt * r.sources.press_defect;
        self.entropy.add_scaled(&r.entropy, dt);
        self.entropy_source += dt * r.entropy_source;
        self.cold_time_integral += dt * r.cold_integrand;
        self.grad_rho_gamma_half_sq += dt * r.grad_rho_gamma_half_sq;
        self.sqrt_rho_grad_u_sq += dt * r.sqrt_rho_grad_u_sq;
        self.rho_u_cubed += dt * r.rho_u_cubed;
    }
}

/// One row of the diagnostics CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub time: f64,
    pub kinetic: f64,
    pub internal: f64,
    pub cold: f64,
    pub hyper: f64,
    pub poisson_signed: f64,
    pub total: f64,
    pub visc: f64,
    pub drag0: f64,
    pub drag1: f64,
    pub hypervisc: f64,
    pub press_diff: f64,
    pub cold_diff: f64,
    pub biharm: f64,
    pub press_defect: f64,
    pub energy_source: f64,
    pub bd_core: f64,
    pub log_term: f64,
    pub ent_lap: f64,
    pub ent_log: f64,
    pub ent_cold: f64,
    pub ent_visc: f64,
    pub ent_press: f64,
    pub ent_hyper: f64,
    /// Kinetic-energy change plus accumulated entropy source rates.
    pub ent_source: f64,
    pub picard_iterations: usize,
    pub min_rho: f64,
    pub max_rho: f64,
    pub step: usize,
    pub mass: f64,
    pub divu_linf_integral: f64,
    /// `int int rho^-6`
    pub cold_time_integral: f64,
    pub grad_rho_gamma_half_sq_integral: f64,
    pub sqrt_rho_grad_u_sq_integral: f64,
    pub rho_u_cubed_integral: f64,
    pub rho_l1: f64,
    pub rho_lgamma: f64,
    pub sqrt_rho_u_l2: f64,
    pub grad_sqrt_rho_l2: f64,
}

impl DiagnosticsRecord {
    #[allow(clippy::too_many_arguments)]
    pub fn assemble(
        step: usize,
        state: &GalerkinState,
        eval: &Evaluation,
        acc: &Accumulators,
        kinetic0: f64,
        picard_iterations: usize,
    ) -> Self {
        let e = &eval.energy;
        let l = &acc.ledger;
        let s = &acc.entropy;
        Self {
            time: state.time,
            kinetic: e.kinetic,
            internal: e.internal,
            cold: e.cold,
            hyper: e.hyper,
            poisson_signed: e.poisson_signed,
            total: e.total,
            visc: l.visc,
            drag0: l.drag0,
            drag1: l.drag1,
            hypervisc: l.hypervisc,
            press_diff: l.press_diff,
            cold_diff: l.cold_diff,
            biharm: l.biharm,
            press_defect: acc.sources.press_defect,
            energy_source: acc.sources.energy_source,
            bd_core: eval.entropy.bd_core,
            log_term: eval.entropy.log_term,
            ent_lap: s.ent_lap,
            ent_log: s.ent_log,
            ent_cold: s.ent_cold,
            ent_visc: s.ent_visc,
            ent_press: s.ent_press,
            ent_hyper: s.ent_hyper,
            ent_source: acc.entropy_source + (e.kinetic - kinetic0),
            picard_iterations,
            min_rho: state.rho.min_physical().0,
            max_rho: state.rho.max_physical().0,
            step,
            mass: state.rho.integrate(),
            divu_linf_integral: acc.divu_linf_integral,
            cold_time_integral: acc.cold_time_integral,
            grad_rho_gamma_half_sq_integral: acc.grad_rho_gamma_half_sq,
            sqrt_rho_grad_u_sq_integral: acc.sqrt_rho_grad_u_sq,
            rho_u_cubed_integral: acc.rho_u_cubed,
            rho_l1: eval.norms.rho_l1,
            rho_lgamma: eval.norms.rho_lgamma,
            sqrt_rho_u_l2: eval.norms.sqrt_rho_u_l2,
            grad_sqrt_rho_l2: eval.norms.grad_sqrt_rho_l2,
        }
    }

    /// The dissipation ledger stored in this row.
    pub fn ledger(&self) -> DissipationLedger {
        DissipationLedger {
            visc: self.visc,
            drag0: self.drag0,
            drag1: self.drag1,
            hypervisc: self.hypervisc,
            press_diff: self.press_diff,
            cold_diff: self.cold_diff,
            biharm: self.biharm,
        }
    }

    pub fn entropy_dissipation(&self) -> EntropyDissipation {
        EntropyDissipation {
            ent_lap: self.ent_lap,
            ent_log: self.ent_log,
            ent_cold: self.ent_cold,
            ent_visc: self.ent_visc,
            ent_press: self.ent_press,
            ent_hyper: self.ent_hyper,
        }
    }
}

/// Physical-grid samples of a state and its first derivatives.
pub(crate) struct Samples {
    pub cell: f64,
    pub rho: Vec<f64>,
    pub u: Vec<Vec<f64>>,
    pub grad_rho: Vec<Vec<f64>>,
    /// `grad_u[i][j] = d_j u_i`
    pub grad_u: Vec<Vec<Vec<f64>>>,
    pub lap_rho: Vec<f64>,
    pub div_rho_u: Vec<f64>,
}

impl Samples {
    pub fn new(rho: &SpectralField, u: &VectorField) -> Result<Self> {
        let (min, _) = rho.min_physical();
        if !(min > 0.0) {
            return Err(Error::NonPositiveDensity { min_rho: min });
        }
        let dim = rho.grid().dim();
        Ok(Self {
            cell: rho.grid().cell_volume(),
            rho: rho.to_physical(),
            u: u.to_physical(),
            grad_rho: rho.gradient().to_physical(),
            grad_u: u
                .components()
                .iter()
                .map(|c| (0..dim).map(|j| c.derivative(j, 1).expect("axis").to_physical()).collect())
                .collect(),
            lap_rho: rho.laplacian().to_physical(),
            div_rho_u: flux_divergence(rho, u).to_physical(),
        })
    }

    pub fn len(&self) -> usize {
        self.rho.len()
    }

    pub fn dim(&self) -> usize {
        self.grad_rho.len()
    }

    /// Grid quadrature `sum_i f(i) dV`, exact for trigonometric polynomials
    /// whose band fits on the grid.
    pub fn quad(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut s = 0.0;
        for i in 0..self.len() {
            s += f(i);
        }
        s * self.cell
    }

    pub fn speed_sq(&self, i: usize) -> f64 {
        self.u.iter().map(|c| c[i] * c[i]).sum()
    }

    pub fn grad_rho_sq(&self, i: usize) -> f64 {
        self.grad_rho.iter().map(|c| c[i] * c[i]).sum()
    }

    pub fn grad_u_sq(&self, i: usize) -> f64 {
        self.grad_u.iter().flatten().map(|c| c[i] * c[i]).sum()
    }

    pub fn strain_sq(&self, i: usize) -> f64 {
        let d = self.dim();
        let mut s = 0.0;
        for a in 0..d {
            for b in 0..d {
                let e = 0.5 * (self.grad_u[a][b][i] + self.grad_u[b][a][i]);
                s += e * e;
            }
        }
        s
    }
}

fn finite_or(name: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::InvalidParams(format!("diagnostic `{name}` is not finite")))
    }
}

/// `||rho - mean||^2` by Parseval.
pub(crate) fn fluctuation_sq(rho: &SpectralField) -> f64 {
    let mean = SpectralField::constant(rho.grid(), rho.mean());
    let f = rho - &mean;
    f.inner(&f)
}

/// Evaluates every functional of `state` in one pass over the grid.
pub fn evaluate(state: &GalerkinState, params: &RegularizationParams, law: &PressureLaw) -> Result<Evaluation> {
    let rho = &state.rho;
    let u = &state.u;
    let s = Samples::new(rho, u)?;
    let dim = s.dim();
    let g = law.gamma;
    let (eps, eta, delta) = (params.epsilon, params.eta, params.delta);
    let four_pi_g = 4.0 * PI * params.g;

    let kinetic = 0.5 * s.quad(|i| s.rho[i] * s.speed_sq(i));
    let internal = s.quad(|i| law.pi_unchecked(s.rho[i]));
    let cold_integrand = s.quad(|i| s.rho[i].powi(-6));
    let cold = eta / 7.0 * cold_integrand;
    let lap = rho.laplacian();
    let grad_lap = lap.gradient();
    let hyper = 0.5 * delta * grad_lap.inner(&grad_lap);
    let grad_phi = state.phi.gradient();
    let poisson_signed = params.lambda() / (2.0 * four_pi_g) * grad_phi.inner(&grad_phi);
    let energy = EnergyBreakdown {
        kinetic,
        internal,
        cold,
        hyper,
        poisson_signed,
        total: kinetic + internal + cold + hyper + poisson_signed,
    };

    let strain = s.quad(|i| s.rho[i] * s.strain_sq(i));
    let rho_u_cubed = s.quad(|i| s.rho[i] * s.speed_sq(i).powf(1.5));
    let lap_u_sq: f64 = u.components().iter().map(|c| {
        let l = c.laplacian();
        l.inner(&l)
    }).sum();
    let press_chain = s.quad(|i| s.rho[i].powf(g - 2.0) * s.grad_rho_sq(i));
    let inv8 = s.quad(|i| s.rho[i].powi(-8) * s.grad_rho_sq(i));
    let bilap = rho.laplacian_pow_unchecked(2);
    let bilap_sq = bilap.inner(&bilap);
    let fisher = s.quad(|i| s.grad_rho_sq(i) / s.rho[i]);
    let fluct = fluctuation_sq(rho);

    let ledger = DissipationLedger {
        visc: strain,
        drag0: params.r0 * u.inner(u),
        drag1: params.r1 * rho_u_cubed,
        hypervisc: params.mu * lap_u_sq,
        press_diff: eps / law.a * press_chain,
        cold_diff: 6.0 * eta * eps * inv8,
        biharm: delta * eps * bilap_sq,
    };
    let sources = EnergySources {
        energy_source: -four_pi_g * eps / params.lambda() * fluct,
        press_defect: law.b * eps * fisher,
    };

    let bd_core = 0.5
        * s.quad(|i| {
            (0..dim)
                .map(|a| {
                    let w = s.u[a][i] + s.grad_rho[a][i] / s.rho[i];
                    w * w
                })
                .sum::<f64>()
                * s.rho[i]
        });
    let log_term = -params.r0 * s.quad(|i| s.rho[i].ln());
    let grad_u_sq = s.quad(|i| s.rho[i] * s.grad_u_sq(i));
    let dissipation_rates = EntropyDissipation {
        ent_lap: eps * s.quad(|i| s.lap_rho[i] * s.lap_rho[i] / s.rho[i]),
        ent_log: params.r0 * eps * s.quad(|i| s.grad_rho_sq(i) / (s.rho[i] * s.rho[i])),
        ent_cold: 6.0 * eta * inv8,
        ent_visc: grad_u_sq,
        ent_press: press_chain / law.a,
        ent_hyper: delta * bilap_sq,
    };

    let i1 = four_pi_g * fluct;
    let i4 = params.r1
        * s.quad(|i| {
            let speed = s.speed_sq(i).sqrt();
            speed * (0..dim).map(|a| s.u[a][i] * s.grad_rho[a][i]).sum::<f64>()
        });
    let i5 = if params.mu == 0.0 {
        0.0
    } else {
        let mut acc = 0.0;
        for a in 0..dim {
            let w = pointwise_apply(&[rho, &rho.derivative(a, 1)?], |v| v[1] / v[0])?;
            acc += u.component(a).laplacian().inner(&w.laplacian());
        }
        params.mu * acc
    };
    let i6 = eps * s.quad(|i| s.div_rho_u[i] * s.lap_rho[i] / s.rho[i]);
    let i7 = eps
        * s.quad(|i| {
            let mut t = 0.0;
            for a in 0..dim {
                for b in 0..dim {
                    t += s.grad_rho[a][i] * s.grad_u[b][a][i] * s.grad_rho[b][i];
                }
            }
            t / s.rho[i]
        });
    let i8 = 0.5 * eps * s.quad(|i| s.lap_rho[i] * s.grad_rho_sq(i) / (s.rho[i] * s.rho[i]));
    let source_rate = 2.0 * strain + law.b * fisher + i1 + i4.abs() + i5.abs() + i6.abs() + i7.abs() + i8.abs();

    let entropy = EntropyBreakdown {
        bd_core,
        log_term,
        dissipation_rates,
        source_rate,
    };

    let rates = StepRates {
        ledger,
        sources,
        entropy: dissipation_rates,
        entropy_source: source_rate,
        cold_integrand,
        grad_rho_gamma_half_sq: 0.25 * g * g * press_chain,
        sqrt_rho_grad_u_sq: grad_u_sq,
        rho_u_cubed,
    };

    let norms = StaticNorms {
        rho_l1: s.quad(|i| s.rho[i].abs()),
        rho_lgamma: s.quad(|i| s.rho[i].powf(g)).powf(1.0 / g),
        sqrt_rho_u_l2: (2.0 * kinetic).max(0.0).sqrt(),
        grad_sqrt_rho_l2: (0.25 * fisher).max(0.0).sqrt(),
    };

    finite_or("energy", energy.total)?;
    finite_or("entropy", bd_core + log_term + source_rate)?;
    Ok(Evaluation { energy, entropy, rates, norms })
}

/// Energy terms of `state`.
pub fn compute_energy(state: &GalerkinState, params: &RegularizationParams, law: &PressureLaw) -> Result<EnergyBreakdown> {
    Ok(evaluate(state, params, law)?.energy)
}

/// B-D entropy terms of `state`.
pub fn compute_entropy(state: &GalerkinState, params: &RegularizationParams, law: &PressureLaw) -> Result<EntropyBreakdown> {
    Ok(evaluate(state, params, law)?.entropy)
}
