//! Decision-facing diagnostics: confidence curves and equal-tail intervals,
//! PIT/coverage simulation, confidence risk under quadratic penalty, and
//! fiducial-versus-objective-Bayes comparisons.

use crate::dist::{sup_cdf_gap, Distribution1D, NumericDist};
use crate::error::{Error, Result};
use crate::fiducial1d::{fiducial, fiducial_left, fiducial_right, Fiducial1D, FiducialVariant};
use crate::models::{self, Family, ModelSpec, StatSupport};
use crate::numerics::exec::{map_indexed, map_indexed_seq};
use crate::numerics::grid::Grid;
use crate::numerics::quad::DEFAULT_QUAD_TOL;
use crate::numerics::rng::SplitMix64;

#[cfg(feature = "parallel")]
use crate::numerics::exec::map_indexed_par;

/// cc(φ) = |1 − 2C(x, φ)| on a grid; level-(1−α) crossings are the
/// equal-tail interval endpoints.
#[derive(Debug, Clone)]
pub struct ConfidenceCurve {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    pub source: String,
}

/// Pointwise confidence curve of a distribution on a grid.
pub fn confidence_curve(
    dist: &dyn Distribution1D,
    grid: &Grid,
    source: impl Into<String>,
) -> ConfidenceCurve {
    let cdf = dist.cdf_grid(grid.points());
    ConfidenceCurve {
        grid: grid.points().to_vec(),
        values: cdf.iter().map(|c| (1.0 - 2.0 * c).abs()).collect(),
        source: source.into(),
    }
}

/// Equal-tail interval (q_{α/2}, q_{1−α/2}) at level 1−α.
pub fn equal_tail_interval(dist: &dyn Distribution1D, level: f64) -> Result<(f64, f64)> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "interval level must be in (0,1), got {level}"
        )));
    }
    let alpha = 1.0 - level;
    Ok((
        dist.quantile(0.5 * alpha)?,
        dist.quantile(1.0 - 0.5 * alpha)?,
    ))
}

// ---------------------------------------------------------------------------
// PIT and coverage simulation
// ---------------------------------------------------------------------------

/// Outcome of a PIT/coverage study.
#[derive(Debug, Clone)]
pub struct CoverageReport {
    pub model_id: String,
    pub true_param: f64,
    pub levels: Vec<f64>,
    pub coverage: Vec<f64>,
    pub mean_length: Vec<f64>,
    pub replicates: usize,
    pub seed: u64,
    /// Kolmogorov–Smirnov statistic of the PIT sample against U(0,1).
    pub ks_stat: f64,
}

/// KS distance of a sample from U(0,1).
pub fn ks_uniform(us: &mut [f64]) -> f64 {
    us.sort_by(|a, b| a.partial_cmp(b).expect("finite PIT values"));
    let m = us.len() as f64;
    let mut d = 0.0_f64;
    for (i, &u) in us.iter().enumerate() {
        d = d.max(u - i as f64 / m).max((i + 1) as f64 / m - u);
    }
    d
}

/// Asymptotic Kolmogorov p-value with Stephens' small-sample adjustment.
pub fn ks_pvalue(d: f64, m: usize) -> f64 {
    let m = m as f64;
    let lam = (m.sqrt() + 0.12 + 0.11 / m.sqrt()) * d;
    let mut p = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64) * (k as f64) * lam * lam).exp();
        p += if k % 2 == 1 { 2.0 * term } else { -2.0 * term };
    }
    p.clamp(0.0, 1.0)
}

/// Run a PIT study: each replicate regenerates data, rebuilds the
/// distribution and evaluates it at the true parameter value. Replicate i
/// draws from the stream (seed, i), so results are byte-stable and identical
/// across execution modes.
pub fn pit_study<F>(
    model_id: impl Into<String>,
    true_param: f64,
    levels: &[f64],
    replicates: usize,
    seed: u64,
    gen: F,
) -> Result<CoverageReport>
where
    F: Fn(&mut SplitMix64) -> Result<Box<dyn Distribution1D>> + Sync + Send,
{
    pit_study_exec(
        model_id,
        true_param,
        levels,
        replicates,
        seed,
        gen,
        ExecMode::Default,
    )
}

/// Execution-mode selector for the simulation lanes (benchmarks compare the
/// two explicit modes; `Default` follows the crate feature).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExecMode {
    Default,
    Sequential,
    #[cfg(feature = "parallel")]
    Parallel,
}

/// As [`pit_study`], with explicit execution mode.
pub fn pit_study_exec<F>(
    model_id: impl Into<String>,
    true_param: f64,
    levels: &[f64],
    replicates: usize,
    seed: u64,
    gen: F,
    mode: ExecMode,
) -> Result<CoverageReport>
where
    F: Fn(&mut SplitMix64) -> Result<Box<dyn Distribution1D>> + Sync + Send,
{
    if replicates == 0 {
        return Err(Error::domain("need at least one replicate"));
    }
    let run_one = |i: usize| -> Result<(f64, Vec<f64>)> {
        let mut rng = SplitMix64::stream(seed, i as u64);
        let dist = gen(&mut rng)?;
        let u = dist.cdf(true_param);
        let mut lengths = Vec::with_capacity(levels.len());
        for &level in levels {
            let (lo, hi) = equal_tail_interval(dist.as_ref(), level)?;
            lengths.push(hi - lo);
        }
        Ok((u, lengths))
    };
    let rows: Vec<Result<(f64, Vec<f64>)>> = match mode {
        ExecMode::Default => map_indexed(replicates, run_one),
        ExecMode::Sequential => map_indexed_seq(replicates, run_one),
        #[cfg(feature = "parallel")]
        ExecMode::Parallel => map_indexed_par(replicates, run_one),
    };
    let mut us = Vec::with_capacity(replicates);
    let mut mean_length = vec![0.0; levels.len()];
    let mut coverage = vec![0.0; levels.len()];
    for row in rows {
        let (u, lengths) = row?;
        for (j, &level) in levels.iter().enumerate() {
            let alpha = 1.0 - level;
            if u > 0.5 * alpha && u < 1.0 - 0.5 * alpha {
                coverage[j] += 1.0;
            }
            mean_length[j] += lengths[j];
        }
        us.push(u);
    }
    for j in 0..levels.len() {
        coverage[j] /= replicates as f64;
        mean_length[j] /= replicates as f64;
    }
    let ks_stat = ks_uniform(&mut us);
    Ok(CoverageReport {
        model_id: model_id.into(),
        true_param,
        levels: levels.to_vec(),
        coverage,
        mean_length,
        replicates,
        seed,
        ks_stat,
    })
}

/// PIT/coverage study for a catalog model and fiducial variant: simulate S
/// under θ₀, rebuild H and evaluate H(θ₀). At boundary statistics where the
/// requested discrete variant is improper, the proper member of the pair is
/// used instead (right at the lattice minimum, left at the maximum).
pub fn pit_uniformity(
    model: &ModelSpec,
    n: u64,
    theta0: f64,
    variant: FiducialVariant,
    levels: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<CoverageReport> {
    let id = format!("{}[{}]", model.key(), variant.key());
    let model = model.clone();
    let gen = move |rng: &mut SplitMix64| -> Result<Box<dyn Distribution1D>> {
        let s = models::stat_sample_with(&model, n, theta0, rng)?;
        Ok(Box::new(build_variant_with_boundary_fallback(
            &model, n, s, variant,
        )?))
    };
    pit_study(id, theta0, levels, replicates, seed, gen)
}

/// Variant constructor that degrades to the proper member at the lattice
/// boundary (coverage studies must accept every reachable statistic).
pub fn build_variant_with_boundary_fallback(
    model: &ModelSpec,
    n: u64,
    s: f64,
    variant: FiducialVariant,
) -> Result<Fiducial1D> {
    match fiducial(model, n, s, variant) {
        Ok(f) => Ok(f),
        Err(Error::Boundary(_)) if model.discrete() => {
            let (min, max) = match model.stat_support(n) {
                StatSupport::Lattice { min, max } => (min, max),
                _ => unreachable!(),
            };
            if s <= min as f64 {
                fiducial_right(model, n, s)
            } else if let Some(max) = max {
                if s >= max as f64 {
                    fiducial_left(model, n, s)
                } else {
                    fiducial(model, n, s, variant)
                }
            } else {
                fiducial(model, n, s, variant)
            }
        }
        Err(e) => Err(e),
    }
}

// ---------------------------------------------------------------------------
// Confidence risk under quadratic penalty
// ---------------------------------------------------------------------------

/// Risk difference R(μ, H^A) − R(μ, H^G) over a parameter grid.
#[derive(Debug, Clone)]
pub struct RiskReport {
    pub model_id: String,
    pub n: u64,
    pub mu_grid: Vec<f64>,
    /// Exact-summation risk gap at each grid value.
    pub gap: Vec<f64>,
    /// The closed-form value the gap must equal, uniformly in μ.
    pub analytic: f64,
    /// max_s |μ̂^A(s) − μ̂^G(s)| over the summation range (should be ~0).
    pub muhat_max_diff: f64,
}

/// Mean/variance of the mean parameter μ under a variant fiducial at
/// statistic s, in closed form (binomial m=1, negative-binomial m=1, Poisson).
fn mu_moments(model: &ModelSpec, n: u64, s: f64, delta: f64) -> (f64, f64) {
    let nf = n as f64;
    match model.family {
        Family::Binomial => {
            // p ~ Be(s+δ, n−s+1−δ): formal moments extend to the boundary.
            let a = s + delta;
            let b = nf - s + 1.0 - delta;
            let mean = a / (a + b);
            let var = a * b / ((a + b) * (a + b) * (a + b + 1.0));
            (mean, var)
        }
        Family::Poisson => {
            // μ ~ Ga(s+δ, n)
            let a = s + delta;
            (a / nf, a / (nf * nf))
        }
        Family::NegativeBinomial => {
            // p ~ Be(n, s+δ); μ = (1−p)/p = 1/p − 1 (needs n > 2)
            let b = s + delta;
            let e1 = (nf + b - 1.0) / (nf - 1.0);
            let e2 = (nf + b - 1.0) * (nf + b - 2.0) / ((nf - 1.0) * (nf - 2.0));
            (e1 - 1.0, e2 - e1 * e1)
        }
        _ => unreachable!("risk gap is defined for the three discrete models"),
    }
}

/// Exact-summation confidence-risk gap for the three catalog models,
/// compared against its closed form. Tail sums truncate once the cumulative
/// pmf exceeds 1 − 1e-12; the truncation error joins the tolerance.
pub fn confidence_risk_gap(model: &ModelSpec, n: u64, mu_grid: &[f64]) -> Result<RiskReport> {
    let analytic = match model.family {
        Family::Binomial => {
            if model.fixed("m") as u64 != 1 {
                return Err(Error::Unsupported(
                    "risk gap needs binomial with m = 1".into(),
                ));
            }
            let nf = n as f64;
            1.0 / (4.0 * (nf + 1.0) * (nf + 2.0))
        }
        Family::Poisson => {
            let nf = n as f64;
            1.0 / (4.0 * nf * nf)
        }
        Family::NegativeBinomial => {
            if model.fixed("m") as u64 != 1 {
                return Err(Error::Unsupported(
                    "risk gap needs negative-binomial with m = 1".into(),
                ));
            }
            if n < 3 {
                return Err(Error::domain("negative-binomial risk gap needs n >= 3"));
            }
            let nf = n as f64;
            1.0 / (4.0 * (nf - 1.0) * (nf - 2.0))
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "risk gap is defined for binomial, negative-binomial and Poisson, got {}",
                model.key()
            )))
        }
    };
    if mu_grid.is_empty() {
        return Err(Error::domain("mu grid must be nonempty"));
    }
    let mut gaps = Vec::with_capacity(mu_grid.len());
    let mut muhat_max_diff = 0.0_f64;
    for &mu in mu_grid {
        // translate the mean parameter to the model's own θ
        let theta = match model.family {
            Family::Binomial => mu,
            Family::Poisson => mu,
            Family::NegativeBinomial => 1.0 / (1.0 + mu),
            _ => unreachable!(),
        };
        model.check_theta(theta)?;
        let max_s = match model.stat_support(n) {
            StatSupport::Lattice { max: Some(max), .. } => Some(max),
            _ => None,
        };
        let mut gap = 0.0;
        let mut cum = 0.0;
        let mut s = 0u64;
        loop {
            let pmf = models::stat_pdf(model, n, theta, s as f64)?;
            cum += pmf;
            let (m_r, v_r) = mu_moments(model, n, s as f64, 1.0);
            let (m_l, v_l) = mu_moments(model, n, s as f64, 0.0);
            let (m_g, v_g) = mu_moments(model, n, s as f64, 0.5);
            let v_a = 0.5 * (v_r + v_l) + 0.25 * (m_r - m_l) * (m_r - m_l);
            let m_a = 0.5 * (m_r + m_l);
            muhat_max_diff = muhat_max_diff.max((m_a - m_g).abs());
            gap += pmf * (v_a - v_g);
            if let Some(max) = max_s {
                if s >= max {
                    break;
                }
            } else if cum >= 1.0 - 1e-12 {
                break;
            }
            s += 1;
            if s > 10_000_000 {
                return Err(Error::NonConvergence("risk-gap summation".into()));
            }
        }
        gaps.push(gap);
    }
    Ok(RiskReport {
        model_id: model.key().to_string(),
        n,
        mu_grid: mu_grid.to_vec(),
        gap: gaps,
        analytic,
        muhat_max_diff,
    })
}

// ---------------------------------------------------------------------------
// Objective-Bayes posteriors
// ---------------------------------------------------------------------------

/// Objective priors implemented for the catalog.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Prior {
    Jeffreys,
    Reference,
    Flat,
    /// π(θ) ∝ 1/θ for scale parameters.
    OneOverTheta,
}

impl Prior {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "jeffreys" => Ok(Prior::Jeffreys),
            "reference" => Ok(Prior::Reference),
            "flat" => Ok(Prior::Flat),
            "one-over-theta" | "scale" => Ok(Prior::OneOverTheta),
            other => Err(Error::domain(format!("unknown prior '{other}'"))),
        }
    }
}

fn log_prior(model: &ModelSpec, prior: Prior, theta: f64) -> Result<f64> {
    let unsupported = || {
        Err(Error::Unsupported(format!(
            "{prior:?} prior is not in the catalog for {}",
            model.key()
        )))
    };
    match (model.family, prior) {
        (Family::Binomial, Prior::Jeffreys | Prior::Reference) => {
            Ok(-0.5 * theta.ln() - 0.5 * (-theta).ln_1p())
        }
        (Family::Poisson, Prior::Jeffreys | Prior::Reference) => Ok(-0.5 * theta.ln()),
        (Family::NegativeBinomial, Prior::Jeffreys | Prior::Reference) => {
            Ok(-theta.ln() - 0.5 * (-theta).ln_1p())
        }
        (
            Family::Gamma | Family::Pareto | Family::Weibull,
            Prior::Jeffreys | Prior::Reference | Prior::OneOverTheta,
        ) => Ok(-theta.ln()),
        (Family::NormalKnownVar, Prior::Jeffreys | Prior::Reference | Prior::Flat) => Ok(0.0),
        (Family::NormalKnownMean, Prior::Jeffreys | Prior::Reference | Prior::OneOverTheta) => {
            Ok(-theta.ln())
        }
        (Family::UniformScale, Prior::Jeffreys | Prior::Reference | Prior::OneOverTheta) => {
            Ok(-theta.ln())
        }
        (Family::UniformShift, Prior::Jeffreys | Prior::Reference | Prior::Flat) => Ok(0.0),
        (Family::TruncatedExponential, Prior::Flat) => Ok(0.0),
        _ => unsupported(),
    }
}

/// Posterior from the sufficient-statistic likelihood p_θ(s)·π(θ),
/// quadrature-normalized with the same evaluation interface as fiducials.
pub fn bayes_posterior_stat(
    model: &ModelSpec,
    n: u64,
    prior: Prior,
    s: f64,
) -> Result<Box<dyn Distribution1D>> {
    let support = match model.family {
        Family::UniformScale => (s, f64::INFINITY),
        Family::UniformShift => (s - 1.0, s),
        _ => model.param_space(),
    };
    let m = model.clone();
    let log_density = Box::new(move |theta: f64| {
        let lik = match models::stat_pdf(&m, n, theta, s) {
            Ok(v) if v > 0.0 => v.ln(),
            _ => return f64::NEG_INFINITY,
        };
        match log_prior(&m, prior, theta) {
            Ok(lp) => lik + lp,
            Err(_) => f64::NEG_INFINITY,
        }
    });
    let d = NumericDist::new(support, log_density, DEFAULT_QUAD_TOL).map_err(|e| match e {
        Error::Improper(msg) => Error::Improper(format!("posterior: {msg}")),
        other => other,
    })?;
    Ok(Box::new(d))
}

/// Posterior from the full-sample likelihood Π f_θ(xᵢ)·π(θ).
pub fn bayes_posterior_sample(
    model: &ModelSpec,
    prior: Prior,
    xs: &[f64],
) -> Result<Box<dyn Distribution1D>> {
    if xs.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let support = match model.family {
        Family::UniformScale => (
            xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            f64::INFINITY,
        ),
        Family::UniformShift => {
            let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
            let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
            (max - 1.0, min)
        }
        _ => model.param_space(),
    };
    let m = model.clone();
    let xs: Vec<f64> = xs.to_vec();
    let log_density = Box::new(move |theta: f64| {
        let mut ll = 0.0;
        for &x in &xs {
            match data_log_pdf(&m, theta, x) {
                Ok(v) => ll += v,
                Err(_) => return f64::NEG_INFINITY,
            }
            if ll == f64::NEG_INFINITY {
                return f64::NEG_INFINITY;
            }
        }
        match log_prior(&m, prior, theta) {
            Ok(lp) => ll + lp,
            Err(_) => f64::NEG_INFINITY,
        }
    });
    let d = NumericDist::new(support, log_density, DEFAULT_QUAD_TOL)?;
    Ok(Box::new(d))
}

/// Per-observation log density of the catalog data models.
pub fn data_log_pdf(model: &ModelSpec, theta: f64, x: f64) -> Result<f64> {
    Ok(match model.family {
        Family::NormalKnownVar => {
            let s2 = model.fixed("sigma2");
            -0.5 * (x - theta) * (x - theta) / s2 - 0.5 * (2.0 * std::f64::consts::PI * s2).ln()
        }
        Family::UniformScale => {
            if x > 0.0 && x < theta {
                -theta.ln()
            } else {
                f64::NEG_INFINITY
            }
        }
        Family::UniformShift => {
            if x > theta && x < theta + 1.0 {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        }
        Family::Gamma => {
            let a = model.fixed("alpha");
            if x <= 0.0 {
                f64::NEG_INFINITY
            } else {
                a * theta.ln() + (a - 1.0) * x.ln()
                    - theta * x
                    - crate::numerics::special::ln_gamma(a)?
            }
        }
        _ => {
            return Err(Error::Unsupported(format!(
                "full-sample likelihood not in the catalog for {}",
                model.key()
            )))
        }
    })
}

/// Reference posterior of σ² in the Neyman–Scott problem, computed the long
/// way: π(σ²|x) ∝ (1/σ²)·Π_i ∫ N(x_{i1}; μ, σ²) N(x_{i2}; μ, σ²) dμ with the
/// inner integrals evaluated numerically.
pub fn neyman_scott_sigma2_posterior(pairs: &[(f64, f64)]) -> Result<Box<dyn Distribution1D>> {
    if pairs.is_empty() {
        return Err(Error::domain("need at least one pair"));
    }
    let pairs: Vec<(f64, f64)> = pairs.to_vec();
    let log_density = Box::new(move |sigma2: f64| {
        if !(sigma2 > 0.0) {
            return f64::NEG_INFINITY;
        }
        let mut ll = -(sigma2.ln());
        for &(a, b) in &pairs {
            let f = |mu: f64| {
                let za = (a - mu) * (a - mu);
                let zb = (b - mu) * (b - mu);
                (-(za + zb) / (2.0 * sigma2)).exp() / (2.0 * std::f64::consts::PI * sigma2)
            };
            let inner = crate::numerics::quad::integrate_lenient(
                f,
                f64::NEG_INFINITY,
                f64::INFINITY,
                1e-11,
            );
            if !(inner.value > 0.0) {
                return f64::NEG_INFINITY;
            }
            ll += inner.value.ln();
        }
        ll
    });
    let d = NumericDist::new((0.0, f64::INFINITY), log_density, 1e-9)?;
    Ok(Box::new(d))
}

/// Marginal reference posterior of the trinomial ratio φ₁ = p₁/p₂:
/// π(φ₁ | x₁, x₂) ∝ φ₁^{x₁−1/2}(1+φ₁)^{−x₁−x₂−1}.
pub fn trinomial_ratio_reference_posterior(x1: f64, x2: f64) -> Result<Box<dyn Distribution1D>> {
    if x1 < 0.0 || x2 < 0.0 {
        return Err(Error::domain("cell counts must be nonnegative"));
    }
    let log_density = Box::new(move |phi: f64| {
        if phi <= 0.0 {
            return f64::NEG_INFINITY;
        }
        (x1 - 0.5) * phi.ln() - (x1 + x2 + 1.0) * phi.ln_1p()
    });
    let d = NumericDist::new((0.0, f64::INFINITY), log_density, DEFAULT_QUAD_TOL)?;
    Ok(Box::new(d))
}

/// Sup-norm CDF distance between a fiducial object and a posterior on a grid.
pub fn fiducial_bayes_gap(
    fid: &dyn Distribution1D,
    post: &dyn Distribution1D,
    points: &[f64],
) -> f64 {
    sup_cdf_gap(fid, post, points)
}

/// Central-mass grid of a distribution (quantile range at mass 1−2ε).
pub fn central_grid(dist: &dyn Distribution1D, eps: f64, points: usize) -> Result<Grid> {
    let lo = dist.quantile(eps)?;
    let hi = dist.quantile(1.0 - eps)?;
    Grid::linspace(lo, hi, points)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{Beta, Normal};
    use crate::numerics::special::reg_inc_beta;

    #[test]
    fn confidence_curve_normal_values() {
        let n = Normal::new(0.0, 1.0).unwrap();
        let g =
            Grid::from_points(vec![-1.959_963_984_540_054, 0.0, 1.959_963_984_540_054]).unwrap();
        let cc = confidence_curve(&n, &g, "n01");
        assert!(cc.values[1].abs() < 1e-12);
        assert!((cc.values[0] - 0.95).abs() < 1e-10);
        assert!((cc.values[2] - 0.95).abs() < 1e-10);
    }

    #[test]
    fn equal_tail_interval_beta_against_grid_scan_oracle() {
        // Be(3.5, 7.5) at level 0.5: scan the incomplete-beta CDF on a dense
        // grid for the 0.25 and 0.75 crossings.
        let be = Beta::new(3.5, 7.5).unwrap();
        let (lo, hi) = equal_tail_interval(&be, 0.5).unwrap();
        let mut oracle_lo = f64::NAN;
        let mut oracle_hi = f64::NAN;
        let m = 1_000_000;
        for i in 0..m {
            let x = (i as f64 + 0.5) / m as f64;
            let c = reg_inc_beta(3.5, 7.5, x).unwrap();
            if oracle_lo.is_nan() && c >= 0.25 {
                oracle_lo = x;
            }
            if oracle_hi.is_nan() && c >= 0.75 {
                oracle_hi = x;
                break;
            }
        }
        assert!((lo - oracle_lo).abs() < 1e-5, "{lo} vs {oracle_lo}");
        assert!((hi - oracle_hi).abs() < 1e-5, "{hi} vs {oracle_hi}");
        // frozen from the oracle
        assert!((lo - 0.217_579).abs() < 5e-6);
        assert!((hi - 0.407_183).abs() < 5e-6);
    }

    #[test]
    fn symmetric_distribution_gives_symmetric_interval() {
        let n = Normal::new(1.0, 2.0).unwrap();
        let (lo, hi) = equal_tail_interval(&n, 0.9).unwrap();
        assert!((0.5 * (lo + hi) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pit_gamma_rate_is_uniform() {
        // Continuous model: exact uniformity; KS below the 1% band.
        let m = ModelSpec::gamma_rate(2.0).unwrap();
        let report =
            pit_uniformity(&m, 3, 1.5, FiducialVariant::Right, &[0.5, 0.95], 10_000, 42).unwrap();
        let band = 1.63 / (report.replicates as f64).sqrt();
        assert!(
            report.ks_stat < band,
            "KS {} vs band {band}",
            report.ks_stat
        );
        assert!((report.coverage[1] - 0.95).abs() < 0.02);
        assert!(report.mean_length[1] > report.mean_length[0]);
    }

    #[test]
    fn pit_study_deterministic_across_modes() {
        let m = ModelSpec::poisson();
        let gen = |rng: &mut SplitMix64| -> Result<Box<dyn Distribution1D>> {
            let s = models::stat_sample_with(&m, 5, 2.0, rng)?;
            Ok(Box::new(build_variant_with_boundary_fallback(
                &m,
                5,
                s,
                FiducialVariant::Geometric,
            )?))
        };
        let a = pit_study_exec("po", 2.0, &[0.95], 400, 7, gen, ExecMode::Sequential).unwrap();
        #[cfg(feature = "parallel")]
        {
            let gen2 = |rng: &mut SplitMix64| -> Result<Box<dyn Distribution1D>> {
                let s = models::stat_sample_with(&m, 5, 2.0, rng)?;
                Ok(Box::new(build_variant_with_boundary_fallback(
                    &m,
                    5,
                    s,
                    FiducialVariant::Geometric,
                )?))
            };
            let b = pit_study_exec("po", 2.0, &[0.95], 400, 7, gen2, ExecMode::Parallel).unwrap();
            assert_eq!(a.ks_stat, b.ks_stat);
            assert_eq!(a.coverage, b.coverage);
            assert_eq!(a.mean_length, b.mean_length);
        }
        let _ = a;
    }

    #[test]
    fn risk_gap_closed_forms() {
        // Binomial n=2 → 1/48; Poisson n=5 → 1/100; Ne-Bi n=4 → 1/24.
        let grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
        let bi = confidence_risk_gap(&ModelSpec::binomial(1).unwrap(), 2, &grid).unwrap();
        assert!((bi.analytic - 1.0 / 48.0).abs() < 1e-15);
        for g in &bi.gap {
            assert!((g - bi.analytic).abs() < 1e-12);
        }
        assert!(bi.muhat_max_diff < 1e-12);
        let mu_grid: Vec<f64> = (1..=10).map(|i| 0.5 * i as f64).collect();
        let po = confidence_risk_gap(&ModelSpec::poisson(), 5, &mu_grid).unwrap();
        assert!((po.analytic - 0.01).abs() < 1e-15);
        for g in &po.gap {
            assert!((g - po.analytic).abs() < 1e-10);
        }
        let nb =
            confidence_risk_gap(&ModelSpec::negative_binomial(1).unwrap(), 4, &mu_grid).unwrap();
        assert!((nb.analytic - 1.0 / 24.0).abs() < 1e-15);
        for g in &nb.gap {
            assert!((g - nb.analytic).abs() < 1e-9, "{g}");
        }
        // n >= 3 required for the negative-binomial formula
        assert!(
            confidence_risk_gap(&ModelSpec::negative_binomial(1).unwrap(), 2, &mu_grid).is_err()
        );
    }

    #[test]
    fn binomial_geometric_equals_jeffreys_posterior() {
        let m = ModelSpec::binomial(1).unwrap();
        let (n, s) = (12u64, 5.0);
        let fid = crate::fiducial1d::fiducial_geometric(&m, n, s).unwrap();
        let post = bayes_posterior_stat(&m, n, Prior::Jeffreys, s).unwrap();
        let pts: Vec<f64> = (1..200).map(|i| i as f64 / 200.0).collect();
        let gap = fiducial_bayes_gap(&fid, post.as_ref(), &pts);
        assert!(gap < 1e-6, "gap {gap}");
    }

    #[test]
    fn uniform_scale_fiducial_equals_one_over_theta_posterior() {
        let m = ModelSpec::uniform_scale();
        let (n, s) = (4u64, 1.7);
        let fid = fiducial_right(&m, n, s).unwrap();
        let post = bayes_posterior_stat(&m, n, Prior::OneOverTheta, s).unwrap();
        let pts: Vec<f64> = (1..200).map(|i| 1.7 + 0.05 * i as f64).collect();
        let gap = fiducial_bayes_gap(&fid, post.as_ref(), &pts);
        assert!(gap < 1e-6, "gap {gap}");
    }

    #[test]
    fn trinomial_reference_posterior_normalizes() {
        let d = trinomial_ratio_reference_posterior(3.0, 4.0).unwrap();
        let total = crate::numerics::quad::integrate(|x| d.pdf(x), 0.0, f64::INFINITY, 1e-10)
            .unwrap()
            .value;
        assert!((total - 1.0).abs() < 1e-8);
    }

    #[test]
    fn ks_pvalue_sane() {
        assert!(ks_pvalue(0.001, 1000) > 0.999);
        assert!(ks_pvalue(0.2, 1000) < 1e-6);
    }

    #[test]
    fn pit_meta_study_uniformity() {
        // 100 repeated studies at fixed seeds: KS p-value must exceed 0.01 in
        // at least 99 of them (exact uniformity for the continuous model).
        let m = ModelSpec::gamma_rate(1.0).unwrap();
        let mut failures = 0;
        for study in 0..100u64 {
            let report = pit_uniformity(
                &m,
                2,
                1.0,
                FiducialVariant::Right,
                &[],
                2_000,
                1_000 + study,
            )
            .unwrap();
            if ks_pvalue(report.ks_stat, report.replicates) <= 0.01 {
                failures += 1;
            }
        }
        assert!(failures <= 1, "{failures} studies failed the KS screen");
    }

    #[test]
    fn confidence_curve_zero_at_median_and_monotone_flanks() {
        let m = ModelSpec::binomial(1).unwrap();
        let f = crate::fiducial1d::fiducial_geometric(&m, 9, 4.0).unwrap();
        let med = f.quantile(0.5).unwrap();
        let grid = Grid::linspace(1e-3, 1.0 - 1e-3, 301).unwrap();
        let cc = confidence_curve(&f, &grid, "bi");
        // zero at the median
        assert!((f.cdf(med) - 0.5).abs() < 1e-9);
        // nonincreasing left of the median, nondecreasing right of it
        for w in cc.grid.windows(2).zip(cc.values.windows(2)) {
            let ((x, _), (v0, v1)) = ((w.0[0], w.0[1]), (w.1[0], w.1[1]));
            if w.0[1] < med {
                assert!(v1 <= v0 + 1e-12, "left flank at {x}");
            } else if x > med {
                assert!(v1 + 1e-12 >= v0, "right flank at {x}");
            }
        }
    }

    #[test]
    fn poisson_ratio_marginal_coverage() {
        // h^G(φ₁) is a confidence distribution: coverage at 0.95 within
        // ±0.02 for n = 10, μ = (2, 3).
        let n = 10u64;
        let (mu1, mu2) = (2.0, 3.0);
        let phi1_true = mu2 / mu1;
        let po = ModelSpec::poisson();
        let gen = move |rng: &mut SplitMix64| -> Result<Box<dyn Distribution1D>> {
            let s1 = models::stat_sample_with(&po, n, mu1, rng)?;
            let s2 = models::stat_sample_with(&po, n, mu2, rng)?;
            let chain = crate::stepwise::chains::poisson_ratio(n, FiducialVariant::Geometric)?;
            let joint = crate::stepwise::build_joint(&chain, &[s1, s2])?;
            joint.marginal_of_interest()
        };
        let report = pit_study(
            "poisson-ratio[geometric]",
            phi1_true,
            &[0.95],
            10_000,
            515,
            gen,
        )
        .unwrap();
        assert!(
            (report.coverage[0] - 0.95).abs() < 0.02,
            "coverage {}",
            report.coverage[0]
        );
    }

    #[test]
    fn geometric_interval_shorter_poisson_and_negbinomial() {
        let po = ModelSpec::poisson();
        let nb = ModelSpec::negative_binomial(1).unwrap();
        for s in [1u64, 4, 9, 12] {
            let g = crate::fiducial1d::fiducial_geometric(&po, 2, s as f64).unwrap();
            let a = crate::fiducial1d::fiducial_arithmetic(&po, 2, s as f64).unwrap();
            let (gl, gh) = equal_tail_interval(&g, 0.95).unwrap();
            let (al, ah) = equal_tail_interval(&a, 0.95).unwrap();
            assert!(gh - gl <= ah - al + 1e-9, "poisson s={s}");
            let g = crate::fiducial1d::fiducial_geometric(&nb, 4, s as f64).unwrap();
            let a = crate::fiducial1d::fiducial_arithmetic(&nb, 4, s as f64).unwrap();
            let (gl, gh) = equal_tail_interval(&g, 0.95).unwrap();
            let (al, ah) = equal_tail_interval(&a, 0.95).unwrap();
            assert!(gh - gl <= ah - al + 1e-9, "neg-binomial s={s}");
        }
    }

    #[test]
    fn boundary_fallback_uses_proper_member() {
        let m = ModelSpec::binomial(1).unwrap();
        // s = 0: geometric refused, right offered
        let f =
            build_variant_with_boundary_fallback(&m, 6, 0.0, FiducialVariant::Geometric).unwrap();
        assert_eq!(f.variant, FiducialVariant::Right);
        let f =
            build_variant_with_boundary_fallback(&m, 6, 6.0, FiducialVariant::Geometric).unwrap();
        assert_eq!(f.variant, FiducialVariant::Left);
    }

    #[test]
    fn geometric_interval_no_longer_than_arithmetic() {
        // Consequence of the single-crossing result, at level 0.95.
        let m = ModelSpec::binomial(1).unwrap();
        for nm in [4u64, 7, 12] {
            for s in 1..nm {
                let g = crate::fiducial1d::fiducial_geometric(&m, nm, s as f64).unwrap();
                let a = crate::fiducial1d::fiducial_arithmetic(&m, nm, s as f64).unwrap();
                let (gl, gh) = equal_tail_interval(&g, 0.95).unwrap();
                let (al, ah) = equal_tail_interval(&a, 0.95).unwrap();
                assert!(
                    gh - gl <= ah - al + 1e-9,
                    "nm={nm} s={s}: geometric interval longer"
                );
            }
        }
    }
}
