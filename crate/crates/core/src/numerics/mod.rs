//! Shared numeric kernel: special functions, adaptive quadrature, root
//! finding, grids and a seedable RNG. Everything here is a pure function of
//! its inputs and safe to call concurrently.

pub mod exec;
pub mod grid;
pub mod quad;
pub mod rng;
pub mod root;
pub mod special;

pub use quad::{integrate, QuadratureResult};
pub use root::find_root_increasing;

/// Compensated summation (Neumaier's variant of Kahan's algorithm).
pub fn kahan_sum(values: impl IntoIterator<Item = f64>) -> f64 {
    let mut sum = 0.0_f64;
    let mut c = 0.0_f64;
    for v in values {
        let t = sum + v;
        if sum.abs() >= v.abs() {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    sum + c
}

/// Numerically stable log(exp(a) + exp(b)).
pub fn log_add_exp(a: f64, b: f64) -> f64 {
    if a == f64::NEG_INFINITY {
        return b;
    }
    if b == f64::NEG_INFINITY {
        return a;
    }
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp()).ln()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kahan_handles_cancellation() {
        let terms = vec![1e16, 1.0, -1e16];
        assert_eq!(kahan_sum(terms), 1.0);
    }

    #[test]
    fn log_add_exp_matches_direct() {
        let v = log_add_exp(0.0, 0.0);
        assert!((v - 2.0_f64.ln()).abs() < 1e-15);
        assert_eq!(log_add_exp(f64::NEG_INFINITY, 3.0), 3.0);
    }
}
