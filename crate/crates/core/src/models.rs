//! Catalog of sampling models: for each family the distribution of the
//! sufficient statistic (density, CDF and its θ-derivative), a data sampler
//! and the sufficient-statistic map.

use crate::error::{Error, Result};
use crate::numerics::kahan_sum;
use crate::numerics::quad::{integrate, DEFAULT_QUAD_TOL};
use crate::numerics::rng::SplitMix64;
use crate::numerics::special::{
    ln_choose, ln_factorial, ln_gamma, normal_cdf, normal_pdf, normal_quantile, reg_inc_beta,
    reg_lower_gamma, reg_upper_gamma,
};
use num_bigint::BigUint;
use std::collections::BTreeMap;

/// Whether F_θ(s) falls or rises as the free parameter grows; decides which
/// tail becomes the fiducial CDF (H = 1 − F versus H = F).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CdfDirection {
    DecreasingInTheta,
    IncreasingInTheta,
}

/// Families of the model catalog. The free parameter θ is the one named in
/// the constructor docs; everything else is fixed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Family {
    /// N(μ, σ²) with σ² known; θ = μ, S = Σxᵢ.
    NormalKnownVar,
    /// N(μ, σ²) with μ known; θ = σ², S = Σ(xᵢ−μ)².
    NormalKnownMean,
    /// Ga(α, λ) with shape α known; θ = λ (rate), S = Σxᵢ.
    Gamma,
    /// Pa(λ, x₀) with x₀ known; θ = λ, S = Σ log(xᵢ/x₀).
    Pareto,
    /// We(λ, c) with c known; θ = λ, S = Σxᵢᶜ.
    Weibull,
    /// Bi(m, p) with m known; θ = p, S = Σxᵢ.
    Binomial,
    /// Po(μ); θ = μ, S = Σxᵢ.
    Poisson,
    /// Ne-Bi(m, p) with m known (failures before the m-th success); θ = p.
    NegativeBinomial,
    /// Logarithmic on {1, 2, ...} with θ ∈ (0, 1); S = Σxᵢ.
    Logarithmic,
    /// Density θ e^{−θx}/(1−e^{−θ}) on (0,1), θ ∈ ℝ (θ=0 by continuity).
    TruncatedExponential,
    /// Uniform(0, θ), θ > 0; S = X₍ₙ₎.
    UniformScale,
    /// Uniform(θ, θ+1); reduced statistic X₍ₙ₎ (the pair needs `stepwise`).
    UniformShift,
    /// Uniform(θ, θ+σ) with both unknown; handled by `stepwise`.
    UniformLocScale,
}

/// A parametric sampling model from the catalog.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    pub family: Family,
    fixed: BTreeMap<String, f64>,
}

impl ModelSpec {
    pub fn normal_known_var(sigma2: f64) -> Result<Self> {
        if !(sigma2 > 0.0) {
            return Err(Error::domain("sigma2 must be > 0"));
        }
        Ok(Self::with_fixed(
            Family::NormalKnownVar,
            &[("sigma2", sigma2)],
        ))
    }

    pub fn normal_known_mean(mu: f64) -> Result<Self> {
        if !mu.is_finite() {
            return Err(Error::domain("mu must be finite"));
        }
        Ok(Self::with_fixed(Family::NormalKnownMean, &[("mu", mu)]))
    }

    pub fn gamma_rate(alpha: f64) -> Result<Self> {
        if !(alpha > 0.0) {
            return Err(Error::domain("alpha must be > 0"));
        }
        Ok(Self::with_fixed(Family::Gamma, &[("alpha", alpha)]))
    }

    pub fn pareto(x0: f64) -> Result<Self> {
        if !(x0 > 0.0) {
            return Err(Error::domain("x0 must be > 0"));
        }
        Ok(Self::with_fixed(Family::Pareto, &[("x0", x0)]))
    }

    pub fn weibull(c: f64) -> Result<Self> {
        if !(c > 0.0) {
            return Err(Error::domain("c must be > 0"));
        }
        Ok(Self::with_fixed(Family::Weibull, &[("c", c)]))
    }

    pub fn binomial(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m must be >= 1"));
        }
        Ok(Self::with_fixed(Family::Binomial, &[("m", m as f64)]))
    }

    pub fn poisson() -> Self {
        Self::with_fixed(Family::Poisson, &[])
    }

    pub fn negative_binomial(m: u64) -> Result<Self> {
        if m == 0 {
            return Err(Error::domain("m must be >= 1"));
        }
        Ok(Self::with_fixed(
            Family::NegativeBinomial,
            &[("m", m as f64)],
        ))
    }

    pub fn logarithmic() -> Self {
        Self::with_fixed(Family::Logarithmic, &[])
    }

    pub fn truncated_exponential() -> Self {
        Self::with_fixed(Family::TruncatedExponential, &[])
    }

    pub fn uniform_scale() -> Self {
        Self::with_fixed(Family::UniformScale, &[])
    }

    pub fn uniform_shift() -> Self {
        Self::with_fixed(Family::UniformShift, &[])
    }

    pub fn uniform_loc_scale() -> Self {
        Self::with_fixed(Family::UniformLocScale, &[])
    }

    fn with_fixed(family: Family, fixed: &[(&str, f64)]) -> Self {
        ModelSpec {
            family,
            fixed: fixed.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
        }
    }

    /// Catalog lookup by the string keys used in scenario files.
    pub fn from_key(key: &str, params: &BTreeMap<String, f64>) -> Result<Self> {
        let get = |name: &str| -> Result<f64> {
            params
                .get(name)
                .copied()
                .ok_or_else(|| Error::domain(format!("model '{key}' needs parameter '{name}'")))
        };
        match key {
            "normal" | "normal-known-var" => Self::normal_known_var(get("sigma2")?),
            "normal-known-mean" => Self::normal_known_mean(get("mu")?),
            "gamma-rate" => Self::gamma_rate(get("alpha")?),
            "pareto" => Self::pareto(get("x0")?),
            "weibull" => Self::weibull(get("c")?),
            "binomial" => Self::binomial(get("m")? as u64),
            "poisson" => Ok(Self::poisson()),
            "neg-binomial" | "negative-binomial" => Self::negative_binomial(get("m")? as u64),
            "logarithmic" => Ok(Self::logarithmic()),
            "truncated-exponential" => Ok(Self::truncated_exponential()),
            "uniform-scale" => Ok(Self::uniform_scale()),
            "uniform-shift" => Ok(Self::uniform_shift()),
            "uniform-loc-scale" => Ok(Self::uniform_loc_scale()),
            other => Err(Error::Unsupported(format!("unknown model key '{other}'"))),
        }
    }

    pub fn key(&self) -> &'static str {
        match self.family {
            Family::NormalKnownVar => "normal",
            Family::NormalKnownMean => "normal-known-mean",
            Family::Gamma => "gamma-rate",
            Family::Pareto => "pareto",
            Family::Weibull => "weibull",
            Family::Binomial => "binomial",
            Family::Poisson => "poisson",
            Family::NegativeBinomial => "neg-binomial",
            Family::Logarithmic => "logarithmic",
            Family::TruncatedExponential => "truncated-exponential",
            Family::UniformScale => "uniform-scale",
            Family::UniformShift => "uniform-shift",
            Family::UniformLocScale => "uniform-loc-scale",
        }
    }

    pub fn fixed(&self, name: &str) -> f64 {
        self.fixed[name]
    }

    pub fn discrete(&self) -> bool {
        matches!(
            self.family,
            Family::Binomial | Family::Poisson | Family::NegativeBinomial | Family::Logarithmic
        )
    }

    /// Open interval of the free parameter θ.
    pub fn param_space(&self) -> (f64, f64) {
        match self.family {
            Family::NormalKnownVar | Family::TruncatedExponential | Family::UniformShift => {
                (f64::NEG_INFINITY, f64::INFINITY)
            }
            Family::NormalKnownMean
            | Family::Gamma
            | Family::Pareto
            | Family::Weibull
            | Family::Poisson
            | Family::UniformScale
            | Family::UniformLocScale => (0.0, f64::INFINITY),
            Family::Binomial | Family::NegativeBinomial | Family::Logarithmic => (0.0, 1.0),
        }
    }

    pub fn cdf_direction(&self) -> CdfDirection {
        match self.family {
            Family::NormalKnownVar
            | Family::NormalKnownMean
            | Family::Binomial
            | Family::Poisson
            | Family::Logarithmic
            | Family::UniformScale
            | Family::UniformShift
            | Family::UniformLocScale => CdfDirection::DecreasingInTheta,
            Family::Gamma
            | Family::Pareto
            | Family::Weibull
            | Family::NegativeBinomial
            | Family::TruncatedExponential => CdfDirection::IncreasingInTheta,
        }
    }

    /// Support of the sufficient statistic for sample size n.
    pub fn stat_support(&self, n: u64) -> StatSupport {
        let nf = n as f64;
        match self.family {
            Family::NormalKnownVar => StatSupport::Continuous(f64::NEG_INFINITY, f64::INFINITY),
            Family::NormalKnownMean => StatSupport::Continuous(0.0, f64::INFINITY),
            Family::Gamma | Family::Pareto | Family::Weibull => {
                StatSupport::Continuous(0.0, f64::INFINITY)
            }
            Family::Binomial => StatSupport::Lattice {
                min: 0,
                max: Some(n * self.fixed("m") as u64),
            },
            Family::Poisson => StatSupport::Lattice { min: 0, max: None },
            Family::NegativeBinomial => StatSupport::Lattice { min: 0, max: None },
            Family::Logarithmic => StatSupport::Lattice { min: n, max: None },
            Family::TruncatedExponential => StatSupport::Continuous(0.0, nf),
            Family::UniformScale => StatSupport::Continuous(0.0, f64::INFINITY),
            Family::UniformShift | Family::UniformLocScale => {
                StatSupport::Continuous(f64::NEG_INFINITY, f64::INFINITY)
            }
        }
    }

    pub fn check_theta(&self, theta: f64) -> Result<()> {
        if self.family == Family::TruncatedExponential {
            // θ = 0 is interior after the continuity completion.
            return if theta.is_finite() {
                Ok(())
            } else {
                Err(Error::domain("theta must be finite"))
            };
        }
        let (lo, hi) = self.param_space();
        if theta > lo && theta < hi && theta.is_finite() {
            Ok(())
        } else {
            Err(Error::domain(format!(
                "theta={theta} outside parameter space ({lo}, {hi}) of {}",
                self.key()
            )))
        }
    }

    /// The sufficient statistic descriptor (name plus single-pass reduction
    /// with compensated summation).
    pub fn sufficient_stat(&self) -> SufficientStat {
        let (name, map): (&str, fn(&ModelSpec, &[f64]) -> f64) = match self.family {
            Family::NormalKnownMean => ("sum of squared deviations", |m, xs| {
                let mu = m.fixed("mu");
                kahan_sum(xs.iter().map(|x| (x - mu) * (x - mu)))
            }),
            Family::Pareto => ("sum of log(x/x0)", |m, xs| {
                let x0 = m.fixed("x0");
                kahan_sum(xs.iter().map(|x| (x / x0).ln()))
            }),
            Family::Weibull => ("sum of x^c", |m, xs| {
                let c = m.fixed("c");
                kahan_sum(xs.iter().map(|x| x.powf(c)))
            }),
            Family::UniformScale | Family::UniformShift | Family::UniformLocScale => {
                ("maximum", |_m, xs| {
                    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max)
                })
            }
            _ => ("sum", |_m, xs| kahan_sum(xs.iter().copied())),
        };
        SufficientStat {
            name: name.to_string(),
            map,
        }
    }
}

/// Support of the sufficient statistic.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StatSupport {
    Continuous(f64, f64),
    /// Integer lattice with unit step.
    Lattice {
        min: u64,
        max: Option<u64>,
    },
}

/// Named reduction of a sample to its sufficient statistic.
pub struct SufficientStat {
    pub name: String,
    map: fn(&ModelSpec, &[f64]) -> f64,
}

impl SufficientStat {
    pub fn apply(&self, model: &ModelSpec, xs: &[f64]) -> f64 {
        (self.map)(model, xs)
    }
}

// ---------------------------------------------------------------------------
// Distribution of the sufficient statistic
// ---------------------------------------------------------------------------

/// F_θ(s) = Pr_θ{S ≤ s}.
pub fn stat_cdf(model: &ModelSpec, n: u64, theta: f64, s: f64) -> Result<f64> {
    model.check_theta(theta)?;
    check_n(n)?;
    let nf = n as f64;
    match model.family {
        Family::NormalKnownVar => {
            let sd = (nf * model.fixed("sigma2")).sqrt();
            Ok(normal_cdf((s - nf * theta) / sd))
        }
        Family::NormalKnownMean => {
            if s <= 0.0 {
                return Ok(0.0);
            }
            reg_lower_gamma(0.5 * nf, 0.5 * s / theta)
        }
        Family::Gamma => {
            if s <= 0.0 {
                return Ok(0.0);
            }
            reg_lower_gamma(nf * model.fixed("alpha"), theta * s)
        }
        Family::Pareto | Family::Weibull => {
            if s <= 0.0 {
                return Ok(0.0);
            }
            reg_lower_gamma(nf, theta * s)
        }
        Family::Binomial => {
            let total = n * model.fixed("m") as u64;
            match floor_lattice(s, 0) {
                None => Ok(0.0),
                Some(k) if k >= total => Ok(1.0),
                // Pr{Bi(N,p) <= k} = I_{1-p}(N-k, k+1)
                Some(k) => reg_inc_beta((total - k) as f64, k as f64 + 1.0, 1.0 - theta),
            }
        }
        Family::Poisson => match floor_lattice(s, 0) {
            None => Ok(0.0),
            Some(k) => reg_upper_gamma(k as f64 + 1.0, nf * theta),
        },
        Family::NegativeBinomial => {
            let total = n * model.fixed("m") as u64;
            match floor_lattice(s, 0) {
                None => Ok(0.0),
                Some(k) => reg_inc_beta(total as f64, k as f64 + 1.0, theta),
            }
        }
        Family::Logarithmic => {
            let t = match floor_lattice(s, n) {
                None => return Ok(0.0),
                Some(t) => t,
            };
            let table = log_stirling_row(n, t);
            let mut acc = 0.0;
            for j in n..=t {
                acc += logarithmic_stat_pmf_with_table(n, theta, j, &table);
            }
            Ok(acc.min(1.0))
        }
        Family::TruncatedExponential => {
            if s <= 0.0 {
                return Ok(0.0);
            }
            if s >= nf {
                return Ok(1.0);
            }
            let f = |u: f64| trunc_exp_stat_pdf(n, theta, u);
            Ok(integrate(f, 0.0, s, DEFAULT_QUAD_TOL)?
                .value
                .clamp(0.0, 1.0))
        }
        Family::UniformScale => {
            if s <= 0.0 {
                Ok(0.0)
            } else if s >= theta {
                Ok(1.0)
            } else {
                Ok((s / theta).powi(n as i32))
            }
        }
        Family::UniformShift => {
            // Reduced statistic X₍ₙ₎ on (θ, θ+1).
            if s <= theta {
                Ok(0.0)
            } else if s >= theta + 1.0 {
                Ok(1.0)
            } else {
                Ok((s - theta).powi(n as i32))
            }
        }
        Family::UniformLocScale => Err(Error::Unsupported(
            "uniform-loc-scale has a two-dimensional statistic; use stepwise".into(),
        )),
    }
}

/// Density (or pmf) of the sufficient statistic at s.
pub fn stat_pdf(model: &ModelSpec, n: u64, theta: f64, s: f64) -> Result<f64> {
    model.check_theta(theta)?;
    check_n(n)?;
    let nf = n as f64;
    match model.family {
        Family::NormalKnownVar => {
            let sd = (nf * model.fixed("sigma2")).sqrt();
            Ok(normal_pdf((s - nf * theta) / sd) / sd)
        }
        Family::NormalKnownMean => {
            if s <= 0.0 {
                return Ok(0.0);
            }
            // S ~ Ga(n/2, 1/(2θ))
            let a = 0.5 * nf;
            let rate = 0.5 / theta;
            Ok((a * rate.ln() + (a - 1.0) * s.ln() - rate * s - ln_gamma(a)?).exp())
        }
        Family::Gamma => gamma_pdf(nf * model.fixed("alpha"), theta, s),
        Family::Pareto | Family::Weibull => gamma_pdf(nf, theta, s),
        Family::Binomial => {
            let total = n * model.fixed("m") as u64;
            match exact_lattice(s) {
                None => Ok(0.0),
                Some(k) if k > total => Ok(0.0),
                Some(k) => Ok((ln_choose(total, k)
                    + k as f64 * theta.ln()
                    + (total - k) as f64 * (-theta).ln_1p())
                .exp()),
            }
        }
        Family::Poisson => match exact_lattice(s) {
            None => Ok(0.0),
            Some(k) => {
                let lam = nf * theta;
                Ok((k as f64 * lam.ln() - lam - ln_factorial(k)).exp())
            }
        },
        Family::NegativeBinomial => {
            let total = n * model.fixed("m") as u64;
            match exact_lattice(s) {
                None => Ok(0.0),
                Some(k) => Ok((ln_choose(k + total - 1, k)
                    + total as f64 * theta.ln()
                    + k as f64 * (-theta).ln_1p())
                .exp()),
            }
        }
        Family::Logarithmic => match exact_lattice(s) {
            None => Ok(0.0),
            Some(t) if t < n => Ok(0.0),
            Some(t) => {
                let table = log_stirling_row(n, t);
                Ok(logarithmic_stat_pmf_with_table(n, theta, t, &table))
            }
        },
        Family::TruncatedExponential => Ok(trunc_exp_stat_pdf(n, theta, s)),
        Family::UniformScale => {
            if s <= 0.0 || s >= theta {
                Ok(0.0)
            } else {
                Ok(nf * s.powi(n as i32 - 1) / theta.powi(n as i32))
            }
        }
        Family::UniformShift => {
            if s <= theta || s >= theta + 1.0 {
                Ok(0.0)
            } else {
                Ok(nf * (s - theta).powi(n as i32 - 1))
            }
        }
        Family::UniformLocScale => Err(Error::Unsupported(
            "uniform-loc-scale has a two-dimensional statistic; use stepwise".into(),
        )),
    }
}

/// ∂F_θ(s)/∂θ, analytic for every catalog family.
pub fn stat_dcdf_dtheta(model: &ModelSpec, n: u64, theta: f64, s: f64) -> Result<f64> {
    model.check_theta(theta)?;
    check_n(n)?;
    let nf = n as f64;
    match model.family {
        Family::NormalKnownVar => {
            let sd = (nf * model.fixed("sigma2")).sqrt();
            Ok(-nf / sd * normal_pdf((s - nf * theta) / sd))
        }
        Family::NormalKnownMean => {
            if s <= 0.0 {
                return Ok(0.0);
            }
            // d/dθ P(n/2, s/(2θ)) = −s/(2θ²)·g(s/(2θ)) with g the Ga(n/2, 1) density
            let a = 0.5 * nf;
            let x = 0.5 * s / theta;
            let g = ((a - 1.0) * x.ln() - x - ln_gamma(a)?).exp();
            Ok(-0.5 * s / (theta * theta) * g)
        }
        Family::Gamma => d_gamma_cdf_drate(nf * model.fixed("alpha"), theta, s),
        Family::Pareto | Family::Weibull => d_gamma_cdf_drate(nf, theta, s),
        Family::Binomial => {
            let total = n * model.fixed("m") as u64;
            match floor_lattice(s, 0) {
                None => Ok(0.0),
                Some(k) if k >= total => Ok(0.0),
                Some(k) => {
                    // −N·C(N−1, k)·p^k (1−p)^{N−1−k}
                    let ln = ln_choose(total - 1, k)
                        + k as f64 * theta.ln()
                        + (total - 1 - k) as f64 * (-theta).ln_1p();
                    Ok(-(total as f64) * ln.exp())
                }
            }
        }
        Family::Poisson => match floor_lattice(s, 0) {
            None => Ok(0.0),
            Some(k) => {
                let lam = nf * theta;
                Ok(-nf * (k as f64 * lam.ln() - lam - ln_factorial(k)).exp())
            }
        },
        Family::NegativeBinomial => {
            let total = n * model.fixed("m") as u64;
            match floor_lattice(s, 0) {
                None => Ok(0.0),
                Some(k) => {
                    // d/dp I_p(nm, k+1) = p^{nm−1}(1−p)^k / B(nm, k+1)
                    let a = total as f64;
                    let b = k as f64 + 1.0;
                    let ln = (a - 1.0) * theta.ln() + (b - 1.0) * (-theta).ln_1p()
                        - crate::numerics::special::ln_beta(a, b)?;
                    Ok(ln.exp())
                }
            }
        }
        Family::Logarithmic => {
            let t = match floor_lattice(s, n) {
                None => return Ok(0.0),
                Some(t) => t,
            };
            let table = log_stirling_row(n, t);
            let ell = -(-theta).ln_1p(); // L = −log(1−θ)
            let mut acc = 0.0;
            for j in n..=t {
                let pj = logarithmic_stat_pmf_with_table(n, theta, j, &table);
                acc += pj * (j as f64 / theta - nf / ((1.0 - theta) * ell));
            }
            Ok(acc)
        }
        Family::TruncatedExponential => {
            if s <= 0.0 || s >= nf {
                return Ok(0.0);
            }
            let a = nf * trunc_exp_rate_centering(theta);
            let f = |u: f64| trunc_exp_stat_pdf(n, theta, u) * (a - u);
            Ok(integrate(f, 0.0, s, DEFAULT_QUAD_TOL)?.value)
        }
        Family::UniformScale => {
            if s <= 0.0 || s >= theta {
                Ok(0.0)
            } else {
                Ok(-nf * s.powi(n as i32) / theta.powi(n as i32 + 1))
            }
        }
        Family::UniformShift => {
            if s <= theta || s >= theta + 1.0 {
                Ok(0.0)
            } else {
                Ok(-nf * (s - theta).powi(n as i32 - 1))
            }
        }
        Family::UniformLocScale => Err(Error::Unsupported(
            "uniform-loc-scale has a two-dimensional statistic; use stepwise".into(),
        )),
    }
}

fn gamma_pdf(shape: f64, rate: f64, s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    Ok((shape * rate.ln() + (shape - 1.0) * s.ln() - rate * s - ln_gamma(shape)?).exp())
}

fn d_gamma_cdf_drate(shape: f64, rate: f64, s: f64) -> Result<f64> {
    if s <= 0.0 {
        return Ok(0.0);
    }
    // d/dλ P(a, λs) = s · density of Ga(a, 1) at λs
    let x = rate * s;
    Ok(s * ((shape - 1.0) * x.ln() - x - ln_gamma(shape)?).exp())
}

fn check_n(n: u64) -> Result<()> {
    if n == 0 {
        Err(Error::domain("sample size n must be >= 1"))
    } else {
        Ok(())
    }
}

/// Largest lattice point ≤ s, or None when s is below `min`.
fn floor_lattice(s: f64, min: u64) -> Option<u64> {
    if s < min as f64 {
        None
    } else {
        Some(s.floor() as u64)
    }
}

/// s as an exact lattice point (integer within rounding slack), else None.
fn exact_lattice(s: f64) -> Option<u64> {
    if s < -0.5 {
        return None;
    }
    let k = s.round();
    if (s - k).abs() < 1e-9 {
        Some(k as u64)
    } else {
        None
    }
}

// ---------------------------------------------------------------------------
// Truncated exponential helpers
// ---------------------------------------------------------------------------

/// n-fold Irwin–Hall density: volume of the section {x ∈ (0,1)ⁿ : Σx = s}.
pub fn irwin_hall_pdf(n: u64, s: f64) -> f64 {
    let nf = n as f64;
    if s <= 0.0 || s >= nf {
        return 0.0;
    }
    let mut acc = 0.0_f64;
    let ln_fact = ln_factorial(n - 1);
    for j in 0..=(s.floor() as u64) {
        let term = (ln_choose(n, j) + (nf - 1.0) * (s - j as f64).ln() - ln_fact).exp();
        acc += if j % 2 == 0 { term } else { -term };
    }
    acc.max(0.0)
}

/// θ/(1−e^{−θ}) with the removable singularity at θ = 0 filled in.
fn trunc_exp_norm_ratio(theta: f64) -> f64 {
    if theta.abs() < 1e-5 {
        1.0 + 0.5 * theta + theta * theta / 12.0 - theta.powi(4) / 720.0
    } else {
        theta / (-(-theta).exp_m1())
    }
}

/// 1/θ − 1/(e^θ − 1): the per-observation mean of the truncated exponential.
pub fn trunc_exp_rate_centering(theta: f64) -> f64 {
    if theta.abs() < 1e-4 {
        0.5 - theta / 12.0 + theta.powi(3) / 720.0
    } else {
        1.0 / theta - 1.0 / theta.exp_m1()
    }
}

/// Density of S = Σᵢ Xᵢ for n truncated-exponential observations.
pub fn trunc_exp_stat_pdf(n: u64, theta: f64, s: f64) -> f64 {
    let w = irwin_hall_pdf(n, s);
    if w == 0.0 {
        return 0.0;
    }
    let ratio = trunc_exp_norm_ratio(theta);
    // θⁿ e^{−θs}/(1−e^{−θ})ⁿ = ratioⁿ · e^{−θs}
    (n as f64 * ratio.ln() - theta * s).exp() * w
}

// ---------------------------------------------------------------------------
// Stirling numbers of the first kind (unsigned)
// ---------------------------------------------------------------------------

/// |s(t, n)| by the exact big-integer recurrence
/// |s(t+1, n)| = t·|s(t, n)| + |s(t, n−1)|.
pub fn stirling_first_kind_abs(t: u64, n: u64) -> Result<BigUint> {
    if n == 0 || n > t {
        return Err(Error::domain(format!(
            "stirling numbers need 1 <= n <= t, got n={n} t={t}"
        )));
    }
    let n = n as usize;
    let t = t as usize;
    let mut prev: Vec<BigUint> = vec![BigUint::from(0u32); n + 1];
    prev[0] = BigUint::from(1u32); // |s(0,0)| = 1
    for row in 1..=t {
        let mut cur = vec![BigUint::from(0u32); n + 1];
        for col in 1..=n.min(row) {
            cur[col] = BigUint::from(row as u64 - 1) * &prev[col] + &prev[col - 1];
        }
        prev = cur;
    }
    Ok(prev[n].clone())
}

/// ln |s(j, n)| for j = n..=t_max, one row of the triangle per pass.
/// Log-sum-exp on the recurrence keeps large t cheap; the exact values come
/// from [`stirling_first_kind_abs`].
pub fn log_stirling_row(n: u64, t_max: u64) -> Vec<f64> {
    let n = n as usize;
    let t_max = t_max as usize;
    let mut prev: Vec<f64> = vec![f64::NEG_INFINITY; n + 1];
    prev[0] = 0.0;
    let mut out = Vec::with_capacity(t_max.saturating_sub(n) + 1);
    for row in 1..=t_max {
        let mut cur = vec![f64::NEG_INFINITY; n + 1];
        for col in 1..=n.min(row) {
            let a = ((row - 1) as f64).ln() + prev[col];
            let b = prev[col - 1];
            cur[col] = crate::numerics::log_add_exp(a, b);
        }
        if row >= n {
            out.push(cur[n]);
        }
        prev = cur;
    }
    out
}

/// Logarithmic-model pmf of T = Σxᵢ at t, given the ln|s(j,n)| table (j from n).
fn logarithmic_stat_pmf_with_table(n: u64, theta: f64, t: u64, table: &[f64]) -> f64 {
    let ell = -(-theta).ln_1p();
    let idx = (t - n) as usize;
    let ln_p = ln_factorial(n) + table[idx] + t as f64 * theta.ln()
        - ln_factorial(t)
        - n as f64 * ell.ln();
    ln_p.exp()
}

/// Logarithmic-model pmf of T at a single lattice point.
pub fn logarithmic_stat_pmf(n: u64, theta: f64, t: u64) -> Result<f64> {
    if !(theta > 0.0 && theta < 1.0) {
        return Err(Error::domain(format!(
            "logarithmic theta in (0,1), got {theta}"
        )));
    }
    if t < n {
        return Ok(0.0);
    }
    let table = log_stirling_row(n, t);
    Ok(logarithmic_stat_pmf_with_table(n, theta, t, &table))
}

// ---------------------------------------------------------------------------
// Samplers
// ---------------------------------------------------------------------------

/// Draw one observation from the data model.
pub fn sample_one(model: &ModelSpec, theta: f64, rng: &mut SplitMix64) -> Result<f64> {
    match model.family {
        Family::NormalKnownVar => {
            let sd = model.fixed("sigma2").sqrt();
            Ok(theta + sd * normal_quantile(rng.next_f64())?)
        }
        Family::NormalKnownMean => {
            let mu = model.fixed("mu");
            Ok(mu + theta.sqrt() * normal_quantile(rng.next_f64())?)
        }
        Family::Gamma => sample_gamma(model.fixed("alpha"), theta, rng),
        Family::Pareto => {
            let x0 = model.fixed("x0");
            Ok(x0 * (1.0 - rng.next_f64()).powf(-1.0 / theta))
        }
        Family::Weibull => {
            let c = model.fixed("c");
            let e = -(1.0 - rng.next_f64()).ln() / theta;
            Ok(e.powf(1.0 / c))
        }
        Family::Binomial => {
            let m = model.fixed("m") as u64;
            let mut k = 0u64;
            for _ in 0..m {
                if rng.next_f64() < theta {
                    k += 1;
                }
            }
            Ok(k as f64)
        }
        Family::Poisson => sample_poisson(theta, rng),
        Family::NegativeBinomial => {
            let m = model.fixed("m") as u64;
            let mut failures = 0u64;
            let mut successes = 0u64;
            while successes < m {
                if rng.next_f64() < theta {
                    successes += 1;
                } else {
                    failures += 1;
                }
                if failures > 100_000_000 {
                    return Err(Error::NonConvergence("negative-binomial sampler".into()));
                }
            }
            Ok(failures as f64)
        }
        Family::Logarithmic => {
            // pmf-recurrence inversion: p(x+1) = p(x)·θ·x/(x+1)
            let u = rng.next_f64();
            let ell = -(-theta).ln_1p();
            let mut x = 1u64;
            let mut p = theta / ell;
            let mut acc = p;
            while acc < u && x < 1_000_000 {
                p *= theta * x as f64 / (x + 1) as f64;
                x += 1;
                acc += p;
            }
            Ok(x as f64)
        }
        Family::TruncatedExponential => {
            let u = rng.next_f64();
            if theta.abs() < 1e-9 {
                Ok(u)
            } else {
                // F(x) = (1−e^{−θx})/(1−e^{−θ})
                let denom = -(-theta).exp_m1();
                Ok(-(-u * denom).ln_1p() / theta)
            }
        }
        Family::UniformScale => Ok(theta * rng.next_f64()),
        Family::UniformShift => Ok(theta + rng.next_f64()),
        Family::UniformLocScale => Err(Error::Unsupported(
            "uniform-loc-scale sampling needs (theta, sigma) jointly".into(),
        )),
    }
}

/// Draw a full sample of size n.
pub fn sample_data(
    model: &ModelSpec,
    n: u64,
    theta: f64,
    rng: &mut SplitMix64,
) -> Result<Vec<f64>> {
    (0..n).map(|_| sample_one(model, theta, rng)).collect()
}

/// Draw the sufficient statistic S for sample size n; reproducible by seed.
pub fn stat_sample(model: &ModelSpec, n: u64, theta: f64, seed: u64) -> Result<f64> {
    let mut rng = SplitMix64::new(seed);
    stat_sample_with(model, n, theta, &mut rng)
}

/// As [`stat_sample`] but drawing from a caller-owned stream.
pub fn stat_sample_with(
    model: &ModelSpec,
    n: u64,
    theta: f64,
    rng: &mut SplitMix64,
) -> Result<f64> {
    check_n(n)?;
    // Closed parameter space: degenerate boundary draws are allowed here.
    let (lo, hi) = model.param_space();
    if !(theta >= lo && theta <= hi) {
        return Err(Error::domain(format!(
            "theta={theta} outside closed parameter space of {}",
            model.key()
        )));
    }
    let xs = sample_data(model, n, theta, rng)?;
    Ok(model.sufficient_stat().apply(model, &xs))
}

/// Marsaglia–Tsang gamma sampler (any shape > 0) with inverse-CDF normals.
fn sample_gamma(shape: f64, rate: f64, rng: &mut SplitMix64) -> Result<f64> {
    if shape < 1.0 {
        let u = rng.next_f64();
        let g = sample_gamma(shape + 1.0, rate, rng)?;
        return Ok(g * u.powf(1.0 / shape));
    }
    let d = shape - 1.0 / 3.0;
    let c = 1.0 / (9.0 * d).sqrt();
    loop {
        let z = normal_quantile(rng.next_f64())?;
        let v = 1.0 + c * z;
        if v <= 0.0 {
            continue;
        }
        let v3 = v * v * v;
        let u = rng.next_f64();
        if u.ln() < 0.5 * z * z + d - d * v3 + d * v3.ln() {
            return Ok(d * v3 / rate);
        }
    }
}

fn sample_poisson(mean: f64, rng: &mut SplitMix64) -> Result<f64> {
    if mean == 0.0 {
        return Ok(0.0);
    }
    let u = rng.next_f64();
    let mut k = 0u64;
    let mut p = (-mean).exp();
    let mut acc = p;
    while acc < u {
        k += 1;
        p *= mean / k as f64;
        acc += p;
        if k > 10_000_000 {
            return Err(Error::NonConvergence(format!(
                "poisson sampler at mean {mean}"
            )));
        }
    }
    Ok(k as f64)
}
