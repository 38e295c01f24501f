//! Generalized fiducial density r(θ) ∝ f_θ(x)·J(x, θ) for i.i.d. continuous
//! models, with the subset-sum Jacobian, and its comparison against the
//! sufficient-statistic fiducial.

use crate::dist::{Distribution1D, NumericDist};
use crate::error::{Error, Result};
use crate::fiducial1d::{fiducial_right, Fiducial1D};
use crate::models::{Family, ModelSpec};
use crate::numerics::exec::map_indexed;
use crate::numerics::quad::DEFAULT_QUAD_TOL;
use crate::numerics::special::normal_pdf;
use std::sync::Arc;

/// Largest sample size for the exact C(n, d) subset enumeration.
pub const MAX_SUBSET_N: usize = 20;

/// An i.i.d. continuous model with a d-dimensional parameter, exposing the
/// per-observation density and CDF θ-gradient needed by the Jacobian.
pub trait GfdModel: Send + Sync {
    fn dim(&self) -> usize;
    fn log_pdf(&self, x: f64, theta: &[f64]) -> f64;
    /// ∂F_θ(x)/∂θ_k.
    fn dcdf_dtheta(&self, x: f64, theta: &[f64], k: usize) -> f64;
    /// Support of the (scalar) parameter when d = 1; used for normalization.
    fn param_support(&self) -> (f64, f64);
}

/// Catalog adapter for the one-parameter continuous families.
pub struct CatalogGfd {
    pub model: ModelSpec,
}

impl CatalogGfd {
    pub fn new(model: ModelSpec) -> Result<Self> {
        if model.discrete() {
            return Err(Error::Unsupported(
                "generalized fiducial densities cover continuous models only".into(),
            ));
        }
        match model.family {
            Family::NormalKnownVar
            | Family::Gamma
            | Family::Pareto
            | Family::Weibull
            | Family::TruncatedExponential
            | Family::UniformScale => Ok(CatalogGfd { model }),
            _ => Err(Error::Unsupported(format!(
                "no observation-level CDF derivative for {}",
                model.key()
            ))),
        }
    }
}

impl GfdModel for CatalogGfd {
    fn dim(&self) -> usize {
        1
    }

    fn log_pdf(&self, x: f64, theta: &[f64]) -> f64 {
        let th = theta[0];
        match self.model.family {
            Family::NormalKnownVar => {
                let sd = self.model.fixed("sigma2").sqrt();
                normal_pdf((x - th) / sd).ln() - sd.ln()
            }
            Family::Gamma => {
                let a = self.model.fixed("alpha");
                if x <= 0.0 || th <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                a * th.ln() + (a - 1.0) * x.ln()
                    - th * x
                    - crate::numerics::special::ln_gamma(a).expect("alpha > 0")
            }
            Family::Pareto => {
                let x0 = self.model.fixed("x0");
                if x <= x0 || th <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                th.ln() + th * x0.ln() - (th + 1.0) * x.ln()
            }
            Family::Weibull => {
                let c = self.model.fixed("c");
                if x <= 0.0 || th <= 0.0 {
                    return f64::NEG_INFINITY;
                }
                c.ln() + th.ln() + (c - 1.0) * x.ln() - th * x.powf(c)
            }
            Family::TruncatedExponential => {
                if !(0.0..1.0).contains(&x) {
                    return f64::NEG_INFINITY;
                }
                trunc_exp_log_pdf(x, th)
            }
            Family::UniformScale if x > 0.0 && x < th => -th.ln(),
            Family::UniformScale => f64::NEG_INFINITY,
            _ => f64::NEG_INFINITY,
        }
    }

    fn dcdf_dtheta(&self, x: f64, theta: &[f64], _k: usize) -> f64 {
        let th = theta[0];
        match self.model.family {
            Family::NormalKnownVar => {
                let sd = self.model.fixed("sigma2").sqrt();
                -normal_pdf((x - th) / sd) / sd
            }
            Family::Gamma => {
                // d/dλ P(α, λx) = x · Ga(α,1)-density at λx
                let a = self.model.fixed("alpha");
                if x <= 0.0 {
                    return 0.0;
                }
                let u = th * x;
                x * ((a - 1.0) * u.ln() - u - crate::numerics::special::ln_gamma(a).unwrap()).exp()
            }
            Family::Pareto => {
                let x0 = self.model.fixed("x0");
                if x <= x0 {
                    return 0.0;
                }
                // F = 1 − (x0/x)^λ
                (x0 / x).powf(th) * (x / x0).ln()
            }
            Family::Weibull => {
                let c = self.model.fixed("c");
                if x <= 0.0 {
                    return 0.0;
                }
                let u = x.powf(c);
                u * (-th * u).exp()
            }
            Family::TruncatedExponential => trunc_exp_dcdf_dtheta(x, th),
            Family::UniformScale if x > 0.0 && x < th => -x / (th * th),
            Family::UniformScale => 0.0,
            _ => 0.0,
        }
    }

    fn param_support(&self) -> (f64, f64) {
        self.model.param_space()
    }
}

/// ln f_θ(x) of one truncated-exponential observation, continuous at θ = 0.
fn trunc_exp_log_pdf(x: f64, theta: f64) -> f64 {
    // f = θ e^{−θx}/(1−e^{−θ}) = ratio(θ)·e^{−θx}
    let ratio = if theta.abs() < 1e-5 {
        1.0 + 0.5 * theta + theta * theta / 12.0
    } else {
        theta / (-(-theta).exp_m1())
    };
    ratio.ln() - theta * x
}

/// ∂F_θ(x)/∂θ for one truncated-exponential observation.
fn trunc_exp_dcdf_dtheta(x: f64, theta: f64) -> f64 {
    if !(0.0..=1.0).contains(&x) {
        return 0.0;
    }
    if theta.abs() < 1e-6 {
        // F = x(1 + θ(1−x)/2 + θ²(1/12 − x/4 + x²/6) + O(θ³))
        return x * (1.0 - x) / 2.0 + 2.0 * theta * x * (1.0 / 12.0 - x / 4.0 + x * x / 6.0);
    }
    // Cancellation-safe arrangement: with a = 1−e^{−θx}, b = 1−e^{−θ}
    // (both via expm1), the numerator x e^{−θx} b − (1−e^{−θx}) e^{−θ}
    // equals (x b − a) + a b (1 − x).
    let a = -(-theta * x).exp_m1();
    let b = -(-theta).exp_m1();
    ((x * b - a) + a * b * (1.0 - x)) / (b * b)
}

// ---------------------------------------------------------------------------
// The Jacobian J(x, θ)
// ---------------------------------------------------------------------------

/// Lexicographic combinations of d indices out of n.
fn combinations(n: usize, d: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..d).collect();
    loop {
        out.push(idx.clone());
        // advance
        let mut i = d;
        loop {
            if i == 0 {
                return out;
            }
            i -= 1;
            if idx[i] != i + n - d {
                break;
            }
            if i == 0 {
                return out;
            }
        }
        idx[i] += 1;
        for j in (i + 1)..d {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

fn det_small(m: &[Vec<f64>]) -> f64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
                - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("dimension checked earlier"),
    }
}

/// ln J(x, θ): the log of the sum over all C(n, d) index subsets of
/// |det(∂F_θ(x_{i_j})/∂θ_k)| / Π_j f_θ(x_{i_j}).
///
/// Chunks are reduced in index order, so parallel and sequential runs agree
/// bitwise.
pub fn log_jacobian(model: &dyn GfdModel, xs: &[f64], theta: &[f64]) -> Result<f64> {
    let n = xs.len();
    let d = model.dim();
    if theta.len() != d {
        return Err(Error::domain(
            "theta length must equal the parameter dimension",
        ));
    }
    if d == 0 || d > 3 {
        return Err(Error::Unsupported(
            "determinant path implemented for d <= 3".into(),
        ));
    }
    if n < d {
        return Err(Error::domain("need at least d observations"));
    }
    if n > MAX_SUBSET_N {
        return Err(Error::Unsupported(format!(
            "exact subset enumeration is limited to n <= {MAX_SUBSET_N} (C(n,d) growth)"
        )));
    }
    let subsets = combinations(n, d);
    let log_terms: Vec<f64> = map_indexed(subsets.len(), |i| {
        let subset = &subsets[i];
        let mut mat = vec![vec![0.0; d]; d];
        for (row, &ix) in subset.iter().enumerate() {
            for col in 0..d {
                mat[row][col] = model.dcdf_dtheta(xs[ix], theta, col);
            }
        }
        let det = det_small(&mat).abs();
        if det == 0.0 {
            return f64::NEG_INFINITY;
        }
        let mut log_term = det.ln();
        for &ix in subset {
            log_term -= model.log_pdf(xs[ix], theta);
        }
        log_term
    });
    // ordered log-sum-exp
    let peak = log_terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if peak == f64::NEG_INFINITY {
        return Ok(f64::NEG_INFINITY);
    }
    let sum: f64 = log_terms.iter().map(|lt| (lt - peak).exp()).sum();
    Ok(peak + sum.ln())
}

/// J(x, θ) on the linear scale.
pub fn jacobian_j(model: &dyn GfdModel, xs: &[f64], theta: &[f64]) -> Result<f64> {
    Ok(log_jacobian(model, xs, theta)?.exp())
}

// ---------------------------------------------------------------------------
// The normalized generalized fiducial density (scalar parameter)
// ---------------------------------------------------------------------------

/// Normalized r(θ) with its ingredients.
pub struct GfdResult {
    /// Unnormalized log r̃(θ) = ln f_θ(x) + ln J(x, θ).
    pub log_unnormalized: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// ∫ r̃(θ) dθ.
    pub norm_constant: f64,
    dist: NumericDist,
    /// The raw data (kept, not reduced to a statistic).
    pub sample: Vec<f64>,
}

impl Distribution1D for GfdResult {
    fn support(&self) -> (f64, f64) {
        self.dist.support()
    }
    fn pdf(&self, x: f64) -> f64 {
        self.dist.pdf(x)
    }
    fn cdf(&self, x: f64) -> f64 {
        self.dist.cdf(x)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        self.dist.quantile(p)
    }
    fn median_hint(&self) -> f64 {
        self.dist.median_hint()
    }
    fn cdf_grid(&self, points: &[f64]) -> Vec<f64> {
        self.dist.cdf_grid(points)
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

/// Build the normalized generalized fiducial density for a scalar parameter.
pub fn gfd_density<M: GfdModel + 'static>(model: M, xs: &[f64]) -> Result<GfdResult> {
    if model.dim() != 1 {
        return Err(Error::Unsupported(
            "normalized output implemented for scalar parameters".into(),
        ));
    }
    if xs.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let support = model.param_support();
    let model = Arc::new(model);
    let xs_arc = Arc::new(xs.to_vec());
    let log_unnorm: Arc<dyn Fn(f64) -> f64 + Send + Sync> = {
        let model = Arc::clone(&model);
        let xs = Arc::clone(&xs_arc);
        Arc::new(move |theta: f64| {
            let th = [theta];
            let ll: f64 = xs.iter().map(|&x| model.log_pdf(x, &th)).sum();
            if ll == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
            match log_jacobian(model.as_ref(), &xs, &th) {
                Ok(lj) => ll + lj,
                Err(_) => f64::NEG_INFINITY,
            }
        })
    };
    let ld = Arc::clone(&log_unnorm);
    let dist = NumericDist::new(support, Box::new(move |t| (ld)(t)), DEFAULT_QUAD_TOL).map_err(
        |e| match e {
            Error::Improper(m) => Error::Improper(format!("generalized fiducial density: {m}")),
            other => other,
        },
    )?;
    Ok(GfdResult {
        norm_constant: dist.log_norm_constant().exp(),
        log_unnormalized: log_unnorm,
        dist,
        sample: xs.to_vec(),
    })
}

// ---------------------------------------------------------------------------
// Comparison with the sufficient-statistic fiducial
// ---------------------------------------------------------------------------

/// Side-by-side table of r(θ) and h_s(θ) with their confidence curves.
pub struct GfdComparison {
    pub grid: Vec<f64>,
    pub r_pdf: Vec<f64>,
    pub r_cdf: Vec<f64>,
    pub h_pdf: Vec<f64>,
    pub h_cdf: Vec<f64>,
    pub sup_cdf_gap: f64,
    /// Equal-tail intervals (q_{α/2}, q_{1−α/2}) at `level` = 1−α.
    pub level: f64,
    pub r_interval: (f64, f64),
    pub h_interval: (f64, f64),
}

/// Build r(θ) from the full sample and h_s(θ) from the sufficient statistic,
/// and tabulate both on a grid.
pub fn compare_gfd_vs_stepwise(
    model: &ModelSpec,
    xs: &[f64],
    grid: &[f64],
    level: f64,
) -> Result<(GfdComparison, GfdResult, Fiducial1D)> {
    let r = gfd_density(CatalogGfd::new(model.clone())?, xs)?;
    let s = model.sufficient_stat().apply(model, xs);
    let h = fiducial_right(model, xs.len() as u64, s)?;
    let alpha = 1.0 - level;
    let r_interval = (r.quantile(alpha / 2.0)?, r.quantile(1.0 - alpha / 2.0)?);
    let h_interval = (h.quantile(alpha / 2.0)?, h.quantile(1.0 - alpha / 2.0)?);
    let r_cdf = r.cdf_grid(grid);
    let h_cdf = h.cdf_grid(grid);
    let sup_cdf_gap = r_cdf
        .iter()
        .zip(h_cdf.iter())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let cmp = GfdComparison {
        grid: grid.to_vec(),
        r_pdf: grid.iter().map(|&t| r.pdf(t)).collect(),
        r_cdf,
        h_pdf: grid.iter().map(|&t| h.pdf(t)).collect(),
        h_cdf,
        sup_cdf_gap,
        level,
        r_interval,
        h_interval,
    };
    Ok((cmp, r, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::quad::integrate;

    #[test]
    fn jacobian_reduces_to_fisher_for_n1() {
        // n = d = 1: J = |∂F/∂θ| / f, so r ∝ |∂F/∂θ| = fiducial density.
        let m = ModelSpec::gamma_rate(2.0).unwrap();
        let g = CatalogGfd::new(m.clone()).unwrap();
        let x = 1.3;
        let th = [0.9];
        let j = jacobian_j(&g, &[x], &th).unwrap();
        let expect = g.dcdf_dtheta(x, &th, 0).abs() / g.log_pdf(x, &th).exp();
        assert!((j - expect).abs() < 1e-12 * expect);
    }

    #[test]
    fn n1_equivalence_with_right_fiducial() {
        // gamma-rate and normal-location, n = d = 1: r = h pointwise (1e-10).
        for model in [
            ModelSpec::gamma_rate(2.0).unwrap(),
            ModelSpec::normal_known_var(1.5).unwrap(),
        ] {
            let xs = [1.1];
            let r = gfd_density(CatalogGfd::new(model.clone()).unwrap(), &xs).unwrap();
            let s = model.sufficient_stat().apply(&model, &xs);
            let h = fiducial_right(&model, 1, s).unwrap();
            let pts: Vec<f64> = match model.family {
                Family::NormalKnownVar => (0..60).map(|i| -3.0 + 0.12 * i as f64).collect(),
                _ => (1..60).map(|i| 0.08 * i as f64).collect(),
            };
            for &t in &pts {
                assert!(
                    (r.pdf(t) - h.pdf(t)).abs() < 1e-10,
                    "{} at θ={t}: {} vs {}",
                    model.key(),
                    r.pdf(t),
                    h.pdf(t)
                );
            }
        }
    }

    #[test]
    fn truncated_exponential_jacobian_closed_form() {
        // J(x, θ) = s/θ + e^{−θ}/(θ(1−e^{−θ})) Σ(1−e^{θxᵢ}), derived from
        // ∂F_θ(x)/∂θ; positive on all of ℝ∖{0}.
        let m = ModelSpec::truncated_exponential();
        let g = CatalogGfd::new(m).unwrap();
        let xs = [0.3, 0.8, 0.5];
        let s: f64 = xs.iter().sum();
        for &theta in &[-2.5_f64, -0.7, 0.4, 1.9] {
            let j = jacobian_j(&g, &xs, &[theta]).unwrap();
            let em = (-theta).exp();
            let expect = s / theta
                + em / (theta * (1.0 - em))
                    * xs.iter().map(|&x| 1.0 - (theta * x).exp()).sum::<f64>();
            assert!(j > 0.0);
            assert!(
                (j - expect).abs() < 1e-10 * expect.abs(),
                "theta={theta}: {j} vs {expect}"
            );
        }
    }

    #[test]
    fn location_jacobian_is_constant_n() {
        // F_θ(x) = F₀(x−θ): each subset term is f₀/f₀ = 1, so J = n and the
        // generalized fiducial density equals the sufficient-statistic one.
        let m = ModelSpec::normal_known_var(1.2).unwrap();
        let g = CatalogGfd::new(m.clone()).unwrap();
        let xs = [0.4, -0.3, 1.9];
        for &theta in &[-1.0, 0.2, 2.0] {
            let j = jacobian_j(&g, &xs, &[theta]).unwrap();
            assert!((j - 3.0).abs() < 1e-12);
        }
        let r = gfd_density(g, &xs).unwrap();
        let s: f64 = xs.iter().sum();
        let h = fiducial_right(&m, 3, s).unwrap();
        for &t in &[-0.5, 0.3, 1.2] {
            assert!((r.pdf(t) - h.pdf(t)).abs() < 1e-9);
        }
    }

    #[test]
    fn jacobian_continuous_through_theta_zero() {
        // J(θ→0) = (s − Σxᵢ²)/2 for the truncated exponential; the series
        // branch must join the direct formula smoothly.
        let m = ModelSpec::truncated_exponential();
        let g = CatalogGfd::new(m).unwrap();
        let xs = [0.5, 0.5];
        let limit = (1.0 - 0.5) / 2.0;
        for &theta in &[1e-7, -1e-7, 1e-5, -1e-5, 1e-3] {
            let j = jacobian_j(&g, &xs, &[theta]).unwrap();
            assert!((j - limit).abs() < 2e-3, "theta={theta}: {j}");
        }
        let below = jacobian_j(&g, &xs, &[0.99e-6]).unwrap();
        let above = jacobian_j(&g, &xs, &[1.01e-6]).unwrap();
        assert!(
            (below - above).abs() < 1e-9,
            "series/direct join: {below} vs {above}"
        );
    }

    #[test]
    fn gfd_normalizes_and_is_symmetric_for_balanced_data() {
        // x₁ + x₂ = 1 ⟹ r(θ) = r(−θ) within 1e-9.
        let m = ModelSpec::truncated_exponential();
        let r = gfd_density(CatalogGfd::new(m).unwrap(), &[0.5, 0.5]).unwrap();
        let total = integrate(|t| r.pdf(t), f64::NEG_INFINITY, f64::INFINITY, 1e-10)
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-8);
        for &t in &[0.5, 1.7, 3.3, 4.4] {
            assert!((r.pdf(t) - r.pdf(-t)).abs() < 1e-9, "theta={t}");
        }
    }

    #[test]
    fn normalization_constant_matches_riemann_oracle() {
        // c = ∫ r̃(θ) dθ for n=2, x=(0.5, 0.5): midpoint Riemann sum on
        // θ ∈ [−60, 60] with 10⁶ cells as the independent oracle.
        let m = ModelSpec::truncated_exponential();
        let r = gfd_density(CatalogGfd::new(m).unwrap(), &[0.5, 0.5]).unwrap();
        let cells = 1_000_000usize;
        let (lo, hi) = (-60.0, 60.0);
        let h = (hi - lo) / cells as f64;
        let mut oracle = 0.0;
        for i in 0..cells {
            let t = lo + (i as f64 + 0.5) * h;
            oracle += (r.log_unnormalized)(t).exp();
        }
        oracle *= h;
        assert!(oracle.is_finite() && oracle > 0.0);
        assert!(
            (r.norm_constant - oracle).abs() < 1e-6 * oracle,
            "integrate {} vs Riemann {}",
            r.norm_constant,
            oracle
        );
    }

    #[test]
    fn gfd_depends_on_data_beyond_the_sufficient_statistic() {
        // Equal s = 1, different samples: r differs, h is fixed.
        let m = ModelSpec::truncated_exponential();
        let grid: Vec<f64> = (0..240).map(|i| -6.0 + 0.05 * i as f64).collect();
        let (cmp_a, _ra, ha) = compare_gfd_vs_stepwise(&m, &[0.05, 0.95], &grid, 0.90).unwrap();
        let (cmp_b, _rb, hb) = compare_gfd_vs_stepwise(&m, &[0.5, 0.5], &grid, 0.90).unwrap();
        let r_gap = cmp_a
            .r_pdf
            .iter()
            .zip(cmp_b.r_pdf.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(r_gap > 0.01, "r curves should differ, gap {r_gap}");
        let h_gap = cmp_a
            .h_pdf
            .iter()
            .zip(cmp_b.h_pdf.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(h_gap < 1e-12, "h depends only on s, gap {h_gap}");
        let _ = (ha, hb);
    }

    #[test]
    fn sample_size_cap_is_enforced() {
        let m = ModelSpec::truncated_exponential();
        let g = CatalogGfd::new(m).unwrap();
        let xs: Vec<f64> = (0..21).map(|i| 0.04 * (i as f64 + 0.5)).collect();
        assert!(matches!(
            log_jacobian(&g, &xs, &[0.5]),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn two_dimensional_determinant_path() {
        // Synthetic location-scale normal with d=2 checked against the
        // analytic subset sum for n=2 (single subset).
        struct LocScale;
        impl GfdModel for LocScale {
            fn dim(&self) -> usize {
                2
            }
            fn log_pdf(&self, x: f64, th: &[f64]) -> f64 {
                let (mu, sg) = (th[0], th[1]);
                normal_pdf((x - mu) / sg).ln() - sg.ln()
            }
            fn dcdf_dtheta(&self, x: f64, th: &[f64], k: usize) -> f64 {
                let (mu, sg) = (th[0], th[1]);
                let z = (x - mu) / sg;
                match k {
                    0 => -normal_pdf(z) / sg,
                    _ => -z * normal_pdf(z) / sg,
                }
            }
            fn param_support(&self) -> (f64, f64) {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
        }
        let m = LocScale;
        let xs = [0.2, 1.4];
        let th = [0.5, 0.8];
        let j = jacobian_j(&m, &xs, &th).unwrap();
        let z1 = (xs[0] - th[0]) / th[1];
        let z2 = (xs[1] - th[0]) / th[1];
        let f1 = normal_pdf(z1) / th[1];
        let f2 = normal_pdf(z2) / th[1];
        let det = f1 * f2 * (z2 - z1);
        let expect = det.abs() / (f1 * f2);
        assert!((j - expect).abs() < 1e-12 * expect);
    }
}
