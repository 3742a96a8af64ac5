use serde::{Deserialize, Serialize};

use super::DiagnosticsRecord;
use crate::galerkin::Trajectory;

/// The regularity-class norms of a weak solution, measured along a trajectory.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct DefinitionNorms {
    /// `sup_t ||rho||_{L^1}`
    pub sup_rho_l1: f64,
    /// `sup_t ||rho||_{L^gamma}`
    pub sup_rho_lgamma: f64,
    /// `sup_t ||sqrt(rho) u||_{L^2}`
    pub sup_sqrt_rho_u_l2: f64,
    /// `sup_t ||grad sqrt(rho)||_{L^2}`
    pub sup_grad_sqrt_rho_l2: f64,
    /// `int ||grad rho^{gamma/2}||^2 dt`
    pub int_grad_rho_gamma_half_sq: f64,
    /// `int ||sqrt(rho) grad u||^2 dt`
    pub int_sqrt_rho_grad_u_sq: f64,
    /// `int ||rho^{1/3} u||_{L^3}^3 dt`
    pub int_rho_u_cubed: f64,
}

impl DefinitionNorms {
    pub const NAMES: [&'static str; 7] = [
        "sup_rho_l1",
        "sup_rho_lgamma",
        "sup_sqrt_rho_u_l2",
        "sup_grad_sqrt_rho_l2",
        "int_grad_rho_gamma_half_sq",
        "int_sqrt_rho_grad_u_sq",
        "int_rho_u_cubed",
    ];

    pub fn values(&self) -> [f64; 7] {
        [
            self.sup_rho_l1,
            self.sup_rho_lgamma,
            self.sup_sqrt_rho_u_l2,
            self.sup_grad_sqrt_rho_l2,
            self.int_grad_rho_gamma_half_sq,
            self.int_sqrt_rho_grad_u_sq,
            self.int_rho_u_cubed,
        ]
    }

    /// Finiteness of every entry is the pass criterion.
    pub fn all_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

pub fn definition_norms_of(records: &[DiagnosticsRecord]) -> DefinitionNorms {
    let mut n = DefinitionNorms::default();
    for r in records {
        n.sup_rho_l1 = n.sup_rho_l1.max(r.rho_l1);
        n.sup_rho_lgamma = n.sup_rho_lgamma.max(r.rho_lgamma);
        n.sup_sqrt_rho_u_l2 = n.sup_sqrt_rho_u_l2.max(r.sqrt_rho_u_l2);
        n.sup_grad_sqrt_rho_l2 = n.sup_grad_sqrt_rho_l2.max(r.grad_sqrt_rho_l2);
    }
    if let Some(last) = records.last() {
        n.int_grad_rho_gamma_half_sq = last.grad_rho_gamma_half_sq_integral;
        n.int_sqrt_rho_grad_u_sq = last.sqrt_rho_grad_u_sq_integral;
        n.int_rho_u_cubed = last.rho_u_cubed_integral;
    }
    n
}

pub fn definition_norms(trajectory: &Trajectory) -> DefinitionNorms {
    definition_norms_of(&trajectory.records)
}
