//! Multi-dimensional complex FFTs over row-major grids.
//!
//! Plans are cached per thread through a thread-local `FftPlanner`, so
//! concurrent trajectories never contend on a shared cache.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftDirection, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

fn plan(len: usize, direction: FftDirection) -> Arc<dyn Fft<f64>> {
    PLANNER.with(|p| p.borrow_mut().plan_fft(len, direction))
}

/// In-place transform along every axis. No normalization is applied.
pub(crate) fn transform(data: &mut [Complex64], shape: &[usize], direction: FftDirection) {
    let total: usize = shape.iter().product();
    debug_assert_eq!(data.len(), total);
    for (axis, &len) in shape.iter().enumerate() {
        let fft = plan(len, direction);
        let mut scratch = vec![Complex64::default(); fft.get_inplace_scratch_len()];
        let stride: usize = shape[axis + 1..].iter().product();
        if stride == 1 {
            // contiguous lines: rustfft processes every chunk of `len` in one call
            fft.process_with_scratch(data, &mut scratch);
            continue;
        }
        let outer = total / (len * stride);
        let mut line = vec![Complex64::default(); len];
        for o in 0..outer {
            let block = o * len * stride;
            for inner in 0..stride {
                let base = block + inner;
                for (i, slot) in line.iter_mut().enumerate() {
                    *slot = data[base + i * stride];
                }
                fft.process_with_scratch(&mut line, &mut scratch);
                for (i, value) in line.iter().enumerate() {
                    data[base + i * stride] = *value;
                }
            }
        }
    }
}

/// Physical values to coefficients `c_k` with `f(x) = sum_k c_k exp(i k.x)`.
pub(crate) fn forward(values: &[f64], shape: &[usize]) -> Vec<Complex64> {
    let mut data: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    transform(&mut data, shape, FftDirection::Forward);
    let scale = 1.0 / data.len() as f64;
    for c in data.iter_mut() {
        *c *= scale;
    }
    data
}

/// Coefficients to physical values (real part of the synthesis).
pub(crate) fn inverse(coeffs: &[Complex64], shape: &[usize]) -> Vec<f64> {
    let mut data = coeffs.to_vec();
    transform(&mut data, shape, FftDirection::Inverse);
    data.into_iter().map(|c| c.re).collect()
}
