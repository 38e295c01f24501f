//! Univariate fiducial distributions H_s, H_s^ℓ, H_s^A, H_s^G for catalog
//! models: closed forms where they exist, quadrature-backed otherwise.

use crate::dist::{
    Beta, Distribution1D, Gamma, InverseGamma, Mixture, Normal, NumericDist, Pareto,
};
use crate::error::{Error, Result};
use crate::models::{
    stat_cdf, stat_dcdf_dtheta, stat_pdf, CdfDirection, Family, ModelSpec, StatSupport,
};
use crate::numerics::quad::DEFAULT_QUAD_TOL;
use crate::numerics::special::{ln_beta, ln_gamma};

/// Which member of the fiducial family to construct.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FiducialVariant {
    /// H_s(θ) from Pr{S ≤ s}.
    Right,
    /// H_s^ℓ(θ) from Pr{S < s} (discrete models).
    Left,
    /// Half-correction mixture (H_s + H_s^ℓ)/2.
    Arithmetic,
    /// Normalized geometric mean of the right and left densities.
    Geometric,
}

impl FiducialVariant {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(FiducialVariant::Right),
            "left" => Ok(FiducialVariant::Left),
            "arithmetic" => Ok(FiducialVariant::Arithmetic),
            "geometric" => Ok(FiducialVariant::Geometric),
            other => Err(Error::domain(format!("unknown fiducial variant '{other}'"))),
        }
    }

    pub fn key(&self) -> &'static str {
        match self {
            FiducialVariant::Right => "right",
            FiducialVariant::Left => "left",
            FiducialVariant::Arithmetic => "arithmetic",
            FiducialVariant::Geometric => "geometric",
        }
    }
}

/// Closed-form family tag carried for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ClosedForm {
    Normal { mean: f64, sd: f64 },
    Gamma { shape: f64, rate: f64 },
    InverseGamma { shape: f64, scale: f64 },
    Beta { a: f64, b: f64 },
    Pareto { shape: f64, scale: f64 },
}

impl std::fmt::Display for ClosedForm {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClosedForm::Normal { mean, sd } => write!(f, "N({mean}, {sd}^2)"),
            ClosedForm::Gamma { shape, rate } => write!(f, "Ga({shape}, {rate})"),
            ClosedForm::InverseGamma { shape, scale } => write!(f, "In-Ga({shape}, {scale})"),
            ClosedForm::Beta { a, b } => write!(f, "Be({a}, {b})"),
            ClosedForm::Pareto { shape, scale } => write!(f, "Pa({shape}, {scale})"),
        }
    }
}

/// A univariate fiducial distribution with its provenance.
pub struct Fiducial1D {
    pub variant: FiducialVariant,
    pub model: ModelSpec,
    pub n: u64,
    pub s: f64,
    pub closed_form: Option<ClosedForm>,
    /// Normalizing constant of √(h_s·h_s^ℓ); geometric variant only.
    pub norm_constant: Option<f64>,
    dist: Box<dyn Distribution1D>,
}

impl Distribution1D for Fiducial1D {
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

impl Fiducial1D {
    /// The underlying distribution, for callers that need to move it.
    pub fn into_dist(self) -> Box<dyn Distribution1D> {
        self.dist
    }
}

// ---------------------------------------------------------------------------
// Support checks
// ---------------------------------------------------------------------------

fn require_lattice(model: &ModelSpec, s: f64) -> Result<u64> {
    let k = s.round();
    if (s - k).abs() > 1e-9 || k < 0.0 {
        return Err(Error::domain(format!(
            "discrete model {} needs an integer statistic, got {s}",
            model.key()
        )));
    }
    Ok(k as u64)
}

/// s ∈ S* for the right fiducial.
fn check_right_support(model: &ModelSpec, n: u64, s: f64) -> Result<()> {
    match model.stat_support(n) {
        StatSupport::Lattice { min, max } => {
            let k = require_lattice(model, s)?;
            if k < min {
                return Err(Error::boundary(format!(
                    "s={s} below the lattice minimum {min}"
                )));
            }
            if let Some(max) = max {
                if k >= max {
                    return Err(Error::boundary(format!(
                        "right fiducial is improper at the upper support point s={s}"
                    )));
                }
            }
            Ok(())
        }
        StatSupport::Continuous(lo, hi) => {
            if s > lo && s < hi {
                Ok(())
            } else {
                Err(Error::boundary(format!(
                    "s={s} outside the statistic support ({lo}, {hi})"
                )))
            }
        }
    }
}

/// s ∈ S₀ (both right and left proper): at least one lattice step above
/// the minimum.
fn check_left_support(model: &ModelSpec, n: u64, s: f64) -> Result<u64> {
    if !model.discrete() {
        return Err(Error::domain(format!(
            "left fiducial requires a discrete model, got {}",
            model.key()
        )));
    }
    let k = require_lattice(model, s)?;
    let (min, max) = match model.stat_support(n) {
        StatSupport::Lattice { min, max } => (min, max),
        _ => unreachable!("discrete models have lattice support"),
    };
    if k < min + 1 {
        return Err(Error::boundary(format!(
            "left fiducial is improper at the lower support point s={s}"
        )));
    }
    if let Some(max) = max {
        if k > max {
            return Err(Error::boundary(format!("s={s} above the lattice maximum")));
        }
    }
    Ok(k)
}

/// Parameter interval on which the fiducial distribution lives.
fn fiducial_support(model: &ModelSpec, s: f64) -> (f64, f64) {
    match model.family {
        Family::UniformScale => (s, f64::INFINITY),
        Family::UniformShift => (s - 1.0, s),
        _ => model.param_space(),
    }
}

// ---------------------------------------------------------------------------
// Numeric backend
// ---------------------------------------------------------------------------

/// Right/left fiducial evaluated directly from the statistic CDF:
/// cdf(θ) = 1 − F_θ(s) when F is decreasing in θ, F_θ(s) when increasing;
/// density |∂F_θ(s)/∂θ|.
struct TailDist {
    model: ModelSpec,
    n: u64,
    s: f64,
    support: (f64, f64),
    hint: f64,
}

impl TailDist {
    fn new(model: ModelSpec, n: u64, s: f64) -> Self {
        let support = fiducial_support(&model, s);
        let mut d = TailDist {
            model,
            n,
            s,
            support,
            hint: 0.0,
        };
        d.hint = probe_median(&d);
        d
    }
}

/// Coarse scan for the median of any cdf-capable backend.
fn probe_median(d: &dyn Distribution1D) -> f64 {
    let (lo, hi) = d.support();
    let t = |x: f64| {
        if x == f64::NEG_INFINITY {
            -1.0
        } else if x == f64::INFINITY {
            1.0
        } else {
            x / (1.0 + x.abs())
        }
    };
    let (tlo, thi) = (t(lo), t(hi));
    let mut best = 0.5 * (lo.max(-1e6) + hi.min(1e6));
    let mut best_gap = f64::INFINITY;
    for i in 1..128 {
        let u = tlo + (thi - tlo) * i as f64 / 128.0;
        let x = u / (1.0 - u.abs());
        if !x.is_finite() || x <= lo || x >= hi {
            continue;
        }
        let gap = (d.cdf(x) - 0.5).abs();
        if gap.is_finite() && gap < best_gap {
            best_gap = gap;
            best = x;
        }
    }
    best
}

impl Distribution1D for TailDist {
    fn support(&self) -> (f64, f64) {
        self.support
    }
    fn pdf(&self, theta: f64) -> f64 {
        if theta <= self.support.0 || theta >= self.support.1 {
            return 0.0;
        }
        stat_dcdf_dtheta(&self.model, self.n, theta, self.s)
            .map(f64::abs)
            .unwrap_or(0.0)
    }
    fn cdf(&self, theta: f64) -> f64 {
        if theta <= self.support.0 {
            return 0.0;
        }
        if theta >= self.support.1 {
            return 1.0;
        }
        let f = match stat_cdf(&self.model, self.n, theta, self.s) {
            Ok(v) => v,
            Err(_) => return f64::NAN,
        };
        match self.model.cdf_direction() {
            CdfDirection::DecreasingInTheta => (1.0 - f).clamp(0.0, 1.0),
            CdfDirection::IncreasingInTheta => f.clamp(0.0, 1.0),
        }
    }
    fn median_hint(&self) -> f64 {
        self.hint
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

// ---------------------------------------------------------------------------
// Constructors
// ---------------------------------------------------------------------------

fn closed<D: Distribution1D + 'static>(
    d: D,
    tag: ClosedForm,
) -> (Box<dyn Distribution1D>, Option<ClosedForm>) {
    (Box::new(d), Some(tag))
}

/// Right fiducial distribution H_s.
pub fn fiducial_right(model: &ModelSpec, n: u64, s: f64) -> Result<Fiducial1D> {
    check_right_support(model, n, s)?;
    let nf = n as f64;
    let (dist, closed_form): (Box<dyn Distribution1D>, Option<ClosedForm>) = match model.family {
        Family::NormalKnownVar => {
            let sd = (model.fixed("sigma2") / nf).sqrt();
            closed(
                Normal::new(s / nf, sd)?,
                ClosedForm::Normal { mean: s / nf, sd },
            )
        }
        Family::NormalKnownMean => closed(
            InverseGamma::new(0.5 * nf, 0.5 * s)?,
            ClosedForm::InverseGamma {
                shape: 0.5 * nf,
                scale: 0.5 * s,
            },
        ),
        Family::Gamma => {
            let shape = nf * model.fixed("alpha");
            closed(Gamma::new(shape, s)?, ClosedForm::Gamma { shape, rate: s })
        }
        Family::Pareto | Family::Weibull => {
            closed(Gamma::new(nf, s)?, ClosedForm::Gamma { shape: nf, rate: s })
        }
        Family::Binomial => {
            let total = (n * model.fixed("m") as u64) as f64;
            closed(
                Beta::new(s + 1.0, total - s)?,
                ClosedForm::Beta {
                    a: s + 1.0,
                    b: total - s,
                },
            )
        }
        Family::Poisson => closed(
            Gamma::new(s + 1.0, nf)?,
            ClosedForm::Gamma {
                shape: s + 1.0,
                rate: nf,
            },
        ),
        Family::NegativeBinomial => {
            let total = (n * model.fixed("m") as u64) as f64;
            closed(
                Beta::new(total, s + 1.0)?,
                ClosedForm::Beta {
                    a: total,
                    b: s + 1.0,
                },
            )
        }
        Family::UniformScale => closed(
            Pareto::new(nf, s)?,
            ClosedForm::Pareto {
                shape: nf,
                scale: s,
            },
        ),
        Family::Logarithmic | Family::TruncatedExponential | Family::UniformShift => {
            (Box::new(TailDist::new(model.clone(), n, s)), None)
        }
        Family::UniformLocScale => {
            return Err(Error::Unsupported(
                "uniform-loc-scale needs the stepwise construction".into(),
            ))
        }
    };
    Ok(Fiducial1D {
        variant: FiducialVariant::Right,
        model: model.clone(),
        n,
        s,
        closed_form,
        norm_constant: None,
        dist,
    })
}

/// Left fiducial distribution H_s^ℓ (discrete models, s ∈ S₀).
pub fn fiducial_left(model: &ModelSpec, n: u64, s: f64) -> Result<Fiducial1D> {
    let k = check_left_support(model, n, s)?;
    let nf = n as f64;
    let (dist, closed_form): (Box<dyn Distribution1D>, Option<ClosedForm>) = match model.family {
        Family::Binomial => {
            let total = (n * model.fixed("m") as u64) as f64;
            closed(
                Beta::new(s, total - s + 1.0)?,
                ClosedForm::Beta {
                    a: s,
                    b: total - s + 1.0,
                },
            )
        }
        Family::Poisson => closed(Gamma::new(s, nf)?, ClosedForm::Gamma { shape: s, rate: nf }),
        Family::NegativeBinomial => {
            let total = (n * model.fixed("m") as u64) as f64;
            closed(Beta::new(total, s)?, ClosedForm::Beta { a: total, b: s })
        }
        Family::Logarithmic => (
            Box::new(TailDist::new(model.clone(), n, (k - 1) as f64)),
            None,
        ),
        _ => unreachable!("check_left_support guarantees a discrete family"),
    };
    Ok(Fiducial1D {
        variant: FiducialVariant::Left,
        model: model.clone(),
        n,
        s,
        closed_form,
        norm_constant: None,
        dist,
    })
}

/// Arithmetic-mean fiducial H_s^A = (H_s + H_s^ℓ)/2 (half correction).
pub fn fiducial_arithmetic(model: &ModelSpec, n: u64, s: f64) -> Result<Fiducial1D> {
    check_left_support(model, n, s)?;
    check_right_support(model, n, s)?;
    let right = fiducial_right(model, n, s)?;
    let left = fiducial_left(model, n, s)?;
    let mix = Mixture::new(vec![(0.5, right.dist), (0.5, left.dist)])?;
    Ok(Fiducial1D {
        variant: FiducialVariant::Arithmetic,
        model: model.clone(),
        n,
        s,
        closed_form: None,
        norm_constant: None,
        dist: Box::new(mix),
    })
}

/// Geometric-mean fiducial H_s^G with density c⁻¹√(h_s·h_s^ℓ).
/// Closed forms for binomial, Poisson and negative-binomial; quadrature
/// otherwise.
pub fn fiducial_geometric(model: &ModelSpec, n: u64, s: f64) -> Result<Fiducial1D> {
    check_left_support(model, n, s)?;
    check_right_support(model, n, s)?;
    let nf = n as f64;
    match model.family {
        Family::Binomial => {
            let total = (n * model.fixed("m") as u64) as f64;
            let (a, b) = (s + 0.5, total - s + 0.5);
            let c = (ln_beta(a, b)?
                - 0.5 * (ln_beta(s + 1.0, total - s)? + ln_beta(s, total - s + 1.0)?))
            .exp();
            Ok(Fiducial1D {
                variant: FiducialVariant::Geometric,
                model: model.clone(),
                n,
                s,
                closed_form: Some(ClosedForm::Beta { a, b }),
                norm_constant: Some(c),
                dist: Box::new(Beta::new(a, b)?),
            })
        }
        Family::Poisson => {
            let c = (ln_gamma(s + 0.5)? - 0.5 * (ln_gamma(s + 1.0)? + ln_gamma(s)?)).exp();
            Ok(Fiducial1D {
                variant: FiducialVariant::Geometric,
                model: model.clone(),
                n,
                s,
                closed_form: Some(ClosedForm::Gamma {
                    shape: s + 0.5,
                    rate: nf,
                }),
                norm_constant: Some(c),
                dist: Box::new(Gamma::new(s + 0.5, nf)?),
            })
        }
        Family::NegativeBinomial => {
            let total = (n * model.fixed("m") as u64) as f64;
            let c = (ln_beta(total, s + 0.5)?
                - 0.5 * (ln_beta(total, s + 1.0)? + ln_beta(total, s)?))
            .exp();
            Ok(Fiducial1D {
                variant: FiducialVariant::Geometric,
                model: model.clone(),
                n,
                s,
                closed_form: Some(ClosedForm::Beta {
                    a: total,
                    b: s + 0.5,
                }),
                norm_constant: Some(c),
                dist: Box::new(Beta::new(total, s + 0.5)?),
            })
        }
        _ => fiducial_geometric_numeric(model, n, s),
    }
}

/// Quadrature-normalized geometric fiducial, available for every discrete
/// model regardless of closed forms (used to cross-check them).
pub fn fiducial_geometric_numeric(model: &ModelSpec, n: u64, s: f64) -> Result<Fiducial1D> {
    check_left_support(model, n, s)?;
    check_right_support(model, n, s)?;
    let m = model.clone();
    let support = model.param_space();
    let log_density = Box::new(move |theta: f64| {
        let hr = stat_dcdf_dtheta(&m, n, theta, s)
            .map(f64::abs)
            .unwrap_or(0.0);
        let hl = stat_dcdf_dtheta(&m, n, theta, s - 1.0)
            .map(f64::abs)
            .unwrap_or(0.0);
        if hr <= 0.0 || hl <= 0.0 {
            f64::NEG_INFINITY
        } else {
            0.5 * (hr.ln() + hl.ln())
        }
    });
    let dist = NumericDist::new(support, log_density, DEFAULT_QUAD_TOL)?;
    let c = dist.log_norm_constant().exp();
    Ok(Fiducial1D {
        variant: FiducialVariant::Geometric,
        model: model.clone(),
        n,
        s,
        closed_form: None,
        norm_constant: Some(c),
        dist: Box::new(dist),
    })
}

/// Construct the requested variant.
pub fn fiducial(model: &ModelSpec, n: u64, s: f64, variant: FiducialVariant) -> Result<Fiducial1D> {
    match variant {
        FiducialVariant::Right => fiducial_right(model, n, s),
        FiducialVariant::Left => fiducial_left(model, n, s),
        FiducialVariant::Arithmetic => fiducial_arithmetic(model, n, s),
        FiducialVariant::Geometric => fiducial_geometric(model, n, s),
    }
}

// ---------------------------------------------------------------------------
// γ_s ratio
// ---------------------------------------------------------------------------

/// γ_s(θ) = (∂p_θ(s)/∂θ) / h_s(θ) in the natural-parameter scale.
///
/// The value is invariant under smooth increasing reparameterization, so
/// `theta` is the model's own parameter. Computed from all-positive partial
/// sums: h_s equals Σ_{t≤s}(E_θS − t)p_θ(t) below the mean and
/// Σ_{t>s}(t − E_θS)p_θ(t) above it (the full sum vanishes).
pub fn gamma_ratio(model: &ModelSpec, n: u64, s: f64, theta: f64) -> Result<f64> {
    if !model.discrete() {
        return Err(Error::domain(format!(
            "gamma_ratio requires a discrete model, got {}",
            model.key()
        )));
    }
    check_left_support(model, n, s)?;
    model.check_theta(theta)?;
    let k = s.round() as u64;
    let mean = stat_mean(model, n, theta)?;
    let (min, max) = match model.stat_support(n) {
        StatSupport::Lattice { min, max } => (min, max),
        _ => unreachable!(),
    };
    let ps = stat_pdf(model, n, theta, s)?;
    let numer = (s - mean) * ps;
    let denom = if mean >= s {
        // lower sum: every (mean − t) factor is nonnegative
        let mut acc = 0.0;
        for t in min..=k {
            acc += (mean - t as f64) * stat_pdf(model, n, theta, t as f64)?;
        }
        acc
    } else {
        // upper tail, truncated at relative 1e-12
        let mut acc = 0.0;
        let mut t = k + 1;
        let mut below_tol = 0u32;
        loop {
            if let Some(max) = max {
                if t > max {
                    break;
                }
            }
            let term = (t as f64 - mean) * stat_pdf(model, n, theta, t as f64)?;
            acc += term;
            if t as f64 > mean && term.abs() < 1e-12 * acc.abs() {
                below_tol += 1;
                if below_tol >= 3 {
                    break;
                }
            }
            t += 1;
            if t > k + 50_000_000 {
                return Err(Error::NonConvergence("gamma_ratio tail sum".into()));
            }
        }
        acc
    };
    Ok(numer / denom)
}

/// E_θ S for the discrete catalog families.
fn stat_mean(model: &ModelSpec, n: u64, theta: f64) -> Result<f64> {
    let nf = n as f64;
    match model.family {
        Family::Binomial => Ok(nf * model.fixed("m") * theta),
        Family::Poisson => Ok(nf * theta),
        Family::NegativeBinomial => Ok(nf * model.fixed("m") * (1.0 - theta) / theta),
        Family::Logarithmic => {
            let ell = -(-theta).ln_1p();
            Ok(nf * theta / ((1.0 - theta) * ell))
        }
        _ => Err(Error::domain("stat_mean is for discrete catalog models")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::sup_cdf_gap;
    use crate::models::{logarithmic_stat_pmf, stirling_first_kind_abs};
    use crate::numerics::quad::integrate;

    #[test]
    fn right_normal_matches_table_form() {
        // H_s(μ) = N(s/n, σ²/n)
        let m = ModelSpec::normal_known_var(2.0).unwrap();
        let f = fiducial_right(&m, 4, 1.2).unwrap();
        let n = Normal::new(0.3, (2.0_f64 / 4.0).sqrt()).unwrap();
        for &mu in &[-1.0, 0.0, 0.3, 2.0] {
            assert!((f.cdf(mu) - n.cdf(mu)).abs() < 1e-13);
            // right CDF is 1 − F_θ(s) pointwise
            let fr = stat_cdf(&m, 4, mu, 1.2).unwrap();
            assert!((f.cdf(mu) - (1.0 - fr)).abs() < 1e-12);
        }
    }

    #[test]
    fn right_gamma_matches_table_form() {
        // H_s(λ) = Ga(nα, s)
        let m = ModelSpec::gamma_rate(1.5).unwrap();
        let f = fiducial_right(&m, 3, 2.0).unwrap();
        let g = Gamma::new(4.5, 2.0).unwrap();
        for &lam in &[0.2, 1.0, 3.0] {
            assert!((f.cdf(lam) - g.cdf(lam)).abs() < 1e-12);
        }
    }

    #[test]
    fn right_uniform_scale_density() {
        // h_s(θ) = n sⁿ/θⁿ⁺¹ for θ > s
        let m = ModelSpec::uniform_scale();
        let f = fiducial_right(&m, 5, 1.0).unwrap();
        for &th in &[1.1_f64, 2.0, 4.0] {
            let expect = 5.0 / th.powi(6);
            assert!((f.pdf(th) - expect).abs() < 1e-12);
        }
        assert_eq!(f.pdf(0.9), 0.0);
    }

    #[test]
    fn left_closed_forms_and_boundaries() {
        let bi = ModelSpec::binomial(1).unwrap();
        let f = fiducial_left(&bi, 10, 3.0).unwrap();
        let be = Beta::new(3.0, 8.0).unwrap();
        for &p in &[0.1, 0.4, 0.8] {
            assert!((f.cdf(p) - be.cdf(p)).abs() < 1e-13);
            // 1 − Pr{S < s} with decreasing F: cdf(p) = 1 − F_p(s−1)
            let fr = stat_cdf(&bi, 10, p, 2.0).unwrap();
            assert!((f.cdf(p) - (1.0 - fr)).abs() < 1e-12);
        }
        // s = 0 refused for the left variant; s = nm refused for the right.
        assert!(matches!(
            fiducial_left(&bi, 10, 0.0),
            Err(Error::Boundary(_))
        ));
        assert!(matches!(
            fiducial_right(&bi, 10, 10.0),
            Err(Error::Boundary(_))
        ));
        let po = ModelSpec::poisson();
        let f = fiducial_left(&po, 3, 4.0).unwrap();
        let ga = Gamma::new(4.0, 3.0).unwrap();
        assert!((f.cdf(1.5) - ga.cdf(1.5)).abs() < 1e-13);
        let nb = ModelSpec::negative_binomial(1).unwrap();
        let f = fiducial_left(&nb, 4, 2.0).unwrap();
        let be = Beta::new(4.0, 2.0).unwrap();
        assert!((f.cdf(0.6) - be.cdf(0.6)).abs() < 1e-13);
    }

    #[test]
    fn geometric_closed_forms_match_table() {
        // Bi nm=10, s=3 → Be(3.5, 7.5); Po n=3, s=4 → Ga(4.5, 3);
        // Ne-Bi nm=4, s=3 → Be(4, 3.5)
        let bi = ModelSpec::binomial(1).unwrap();
        let g = fiducial_geometric(&bi, 10, 3.0).unwrap();
        assert_eq!(g.closed_form, Some(ClosedForm::Beta { a: 3.5, b: 7.5 }));
        let po = ModelSpec::poisson();
        let g = fiducial_geometric(&po, 3, 4.0).unwrap();
        assert_eq!(
            g.closed_form,
            Some(ClosedForm::Gamma {
                shape: 4.5,
                rate: 3.0
            })
        );
        let nb = ModelSpec::negative_binomial(1).unwrap();
        let g = fiducial_geometric(&nb, 4, 3.0).unwrap();
        assert_eq!(g.closed_form, Some(ClosedForm::Beta { a: 4.0, b: 3.5 }));
    }

    #[test]
    fn geometric_numeric_agrees_with_closed_form() {
        let bi = ModelSpec::binomial(1).unwrap();
        let closed = fiducial_geometric(&bi, 8, 3.0).unwrap();
        let numeric = fiducial_geometric_numeric(&bi, 8, 3.0).unwrap();
        let pts: Vec<f64> = (1..100).map(|i| i as f64 / 100.0).collect();
        assert!(sup_cdf_gap(&closed, &numeric, &pts) < 1e-8);
        let (ca, cb) = (
            closed.norm_constant.unwrap(),
            numeric.norm_constant.unwrap(),
        );
        assert!((ca - cb).abs() < 1e-8 * ca);
        // c < 1 by the AM-GM inequality
        assert!(ca < 1.0);
    }

    #[test]
    fn logarithmic_geometric_matches_trapezoid_oracle() {
        // n=10, t=12: normalize √(h_t·h_t^ℓ) by dense trapezoid on (0,1).
        let m = ModelSpec::logarithmic();
        let n = 10u64;
        let t = 12.0;
        let g = fiducial_geometric(&m, n, t).unwrap();
        let f = |theta: f64| {
            let hr = stat_dcdf_dtheta(&m, n, theta, t).unwrap().abs();
            let hl = stat_dcdf_dtheta(&m, n, theta, t - 1.0).unwrap().abs();
            (hr * hl).sqrt()
        };
        let cells = 1_000_000usize;
        let h = 1.0 / cells as f64;
        let mut acc = 0.0;
        let mut partial = vec![0.0_f64; 0];
        let checks = [0.25_f64, 0.5, 0.75];
        let mut check_iter = checks.iter().peekable();
        for i in 0..cells {
            let a = i as f64 * h;
            let b = a + h;
            let fa = if i == 0 { 0.0 } else { f(a) };
            let fb = if i + 1 == cells { 0.0 } else { f(b) };
            acc += 0.5 * (fa + fb) * h;
            if let Some(&&x) = check_iter.peek() {
                if b >= x {
                    partial.push(acc);
                    check_iter.next();
                }
            }
        }
        let c = g.norm_constant.unwrap();
        assert!(
            (c - acc).abs() < 1e-6 * acc,
            "quadrature c={c} vs trapezoid oracle {acc}"
        );
        for (x, cum) in checks.iter().zip(partial.iter()) {
            assert!((g.cdf(*x) - cum / acc).abs() < 1e-5, "cdf at {x}");
        }
    }

    #[test]
    fn arithmetic_is_pointwise_average_and_matches_tail_sums() {
        // Binomial nm=2, s=1: exact tail sums oracle.
        let m = ModelSpec::binomial(1).unwrap();
        let f = fiducial_arithmetic(&m, 2, 1.0).unwrap();
        let r = fiducial_right(&m, 2, 1.0).unwrap();
        let l = fiducial_left(&m, 2, 1.0).unwrap();
        for &p in &[0.2, 0.5, 0.7] {
            let q: f64 = 1.0 - p;
            let pr_gt = p * p; // Pr{S > 1}
            let pr_eq = 2.0 * p * q;
            let expect = pr_gt + 0.5 * pr_eq;
            assert!((f.cdf(p) - expect).abs() < 1e-12, "p={p}");
            assert!((f.cdf(p) - 0.5 * (r.cdf(p) + l.cdf(p))).abs() < 1e-13);
        }
        // Poisson n=1, s=2 at μ=2: H^A = Pr{S>2} + Pr{S=2}/2 = 1 − 4e⁻²
        let po = ModelSpec::poisson();
        let f = fiducial_arithmetic(&po, 1, 2.0).unwrap();
        assert!((f.cdf(2.0) - (1.0 - 4.0 * (-2.0_f64).exp())).abs() < 1e-12);
    }

    #[test]
    fn gamma_ratio_zero_at_mle_and_matches_finite_differences() {
        // Binomial nm=4, s=2: MLE at p=1/2 (natural θ=0) gives γ=0.
        let m = ModelSpec::binomial(1).unwrap();
        let at_mle = gamma_ratio(&m, 4, 2.0, 0.5).unwrap();
        assert!(at_mle.abs() < 1e-12);
        // Finite-difference oracle in p; the ratio is parameterization-free.
        for &p in &[0.3, 0.62] {
            let got = gamma_ratio(&m, 4, 2.0, p).unwrap();
            let h = 1e-7;
            let dp = (stat_pdf(&m, 4, p + h, 2.0).unwrap() - stat_pdf(&m, 4, p - h, 2.0).unwrap())
                / (2.0 * h);
            let df = (stat_cdf(&m, 4, p + h, 2.0).unwrap() - stat_cdf(&m, 4, p - h, 2.0).unwrap())
                / (2.0 * h);
            let oracle = dp / (-df);
            assert!(
                (got - oracle).abs() < 1e-6 * oracle.abs().max(1.0),
                "p={p}: {got} vs {oracle}"
            );
        }
        // Positive below the MLE, negative above.
        assert!(gamma_ratio(&m, 4, 2.0, 0.3).unwrap() > 0.0);
        assert!(gamma_ratio(&m, 4, 2.0, 0.7).unwrap() < 0.0);
    }

    #[test]
    fn gamma_ratio_logarithmic_limit_near_one() {
        // lim_{θ→1⁻} γ_t(θ) = −(Σ_{j=n}^t (|s(j,n)|/|s(t,n)|)(t!/j!))⁻¹
        let (n, t) = (10u64, 12u64);
        let m = ModelSpec::logarithmic();
        let st: f64 = stirling_first_kind_abs(t, n)
            .unwrap()
            .to_string()
            .parse()
            .unwrap();
        let mut sum = 0.0;
        for j in n..=t {
            let sj: f64 = stirling_first_kind_abs(j, n)
                .unwrap()
                .to_string()
                .parse()
                .unwrap();
            let mut fact_ratio = 1.0; // t!/j!
            for v in (j + 1)..=t {
                fact_ratio *= v as f64;
            }
            sum += sj / st * fact_ratio;
        }
        let limit = -1.0 / sum;
        assert!(limit > -1.0 && limit < 0.0);
        let got = gamma_ratio(&m, n, t as f64, 1.0 - 1e-9).unwrap();
        assert!(
            (got - limit).abs() < 1e-4 * limit.abs(),
            "got {got}, limit {limit}"
        );
    }

    #[test]
    fn gamma_ratio_monotone_along_natural_parameter() {
        // Decreasing in the natural parameter; the negative-binomial flips
        // in its own p scale because p falls as the natural parameter grows.
        let cases: Vec<(ModelSpec, u64, f64, bool)> = vec![
            (ModelSpec::binomial(2).unwrap(), 3, 3.0, true),
            (ModelSpec::poisson(), 2, 3.0, true),
            (ModelSpec::negative_binomial(1).unwrap(), 3, 4.0, false),
            (ModelSpec::logarithmic(), 3, 6.0, true),
        ];
        for (m, n, s, natural_up) in cases {
            let vals: Vec<f64> = (0..25)
                .map(|i| {
                    let th = 0.05 + 0.9 * i as f64 / 24.0;
                    gamma_ratio(&m, n, s, th).unwrap()
                })
                .collect();
            for w in vals.windows(2) {
                if natural_up {
                    assert!(w[1] <= w[0] + 1e-9, "{}: {:?}", m.key(), w);
                } else {
                    assert!(w[1] >= w[0] - 1e-9, "{}: {:?}", m.key(), w);
                }
            }
        }
    }

    #[test]
    fn stochastic_ordering_and_single_crossing_binomial() {
        let m = ModelSpec::binomial(1).unwrap();
        let nm = 8u64;
        for s in 1..nm {
            let r = fiducial_right(&m, nm, s as f64).unwrap();
            let l = fiducial_left(&m, nm, s as f64).unwrap();
            let g = fiducial_geometric(&m, nm, s as f64).unwrap();
            let a = fiducial_arithmetic(&m, nm, s as f64).unwrap();
            let mut sign_changes = 0;
            let mut last_sign = 0i8;
            for i in 1..400 {
                let p = i as f64 / 400.0;
                let (hr, hg, hl, ha) = (r.cdf(p), g.cdf(p), l.cdf(p), a.cdf(p));
                assert!(
                    hr < hg + 1e-12 && hg < hl + 1e-12,
                    "ordering at p={p} s={s}"
                );
                let d = hg - ha;
                if d.abs() > 1e-13 {
                    let sgn = if d > 0.0 { 1 } else { -1 };
                    if last_sign != 0 && sgn != last_sign {
                        sign_changes += 1;
                        assert!(sgn > 0, "crossing must go from − to + (s={s})");
                    }
                    last_sign = sgn;
                }
            }
            assert_eq!(sign_changes, 1, "exactly one crossing for s={s}");
        }
    }

    #[test]
    fn geometric_kl_optimality_against_perturbations() {
        // KL(q|h) + KL(q|hℓ) is minimized by the normalized geometric mean.
        let m = ModelSpec::binomial(1).unwrap();
        let (n, s) = (6u64, 2.0);
        let right = fiducial_right(&m, n, s).unwrap();
        let left = fiducial_left(&m, n, s).unwrap();
        let geo = fiducial_geometric(&m, n, s).unwrap();
        let kl = |q: &dyn Fn(f64) -> f64, p: &dyn Distribution1D| -> f64 {
            integrate(
                |x| {
                    let qx = q(x);
                    if qx <= 0.0 {
                        0.0
                    } else {
                        qx * (qx / p.pdf(x)).ln()
                    }
                },
                1e-12,
                1.0 - 1e-12,
                1e-11,
            )
            .unwrap()
            .value
        };
        let base = kl(&|x| geo.pdf(x), &right) + kl(&|x| geo.pdf(x), &left);
        let mut rng = crate::numerics::rng::SplitMix64::new(4242);
        for _ in 0..50 {
            let eps = 0.05 + 0.4 * rng.next_f64();
            let a = 1.0 + 7.0 * rng.next_f64();
            let b = 6.28 * rng.next_f64();
            let tilt = move |x: f64| (eps * (a * x + b).cos()).exp();
            let z = integrate(|x| geo.pdf(x) * tilt(x), 1e-12, 1.0 - 1e-12, 1e-11)
                .unwrap()
                .value;
            let q = |x: f64| geo.pdf(x) * tilt(x) / z;
            let val = kl(&q, &right) + kl(&q, &left);
            assert!(val >= base - 1e-9, "perturbation beat the geometric mean");
        }
    }

    #[test]
    fn logarithmic_right_is_proper_and_left_needs_t_above_n() {
        let m = ModelSpec::logarithmic();
        let f = fiducial_right(&m, 10, 12.0).unwrap();
        assert!(f.cdf(0.001) < 1e-5);
        assert!(f.cdf(0.9999) > 0.99);
        // H_t(θ) = 1 − Σ_{j=n}^t pmf
        let mut mass = 0.0;
        for j in 10..=12u64 {
            mass += logarithmic_stat_pmf(10, 0.4, j).unwrap();
        }
        assert!((f.cdf(0.4) - (1.0 - mass)).abs() < 1e-12);
        assert!(fiducial_left(&m, 10, 10.0).is_err());
        assert!(fiducial_left(&m, 10, 11.0).is_ok());
    }

    #[test]
    fn logarithmic_ordering_and_crossing_up_to_t20() {
        // H < H^G < H^ℓ and a single −→+ crossing of H^G − H^A, n = 10,
        // t up to 20 (all numeric quadrature here).
        let m = ModelSpec::logarithmic();
        for t in [11u64, 14, 17, 20] {
            let r = fiducial_right(&m, 10, t as f64).unwrap();
            let l = fiducial_left(&m, 10, t as f64).unwrap();
            let g = fiducial_geometric(&m, 10, t as f64).unwrap();
            let a = fiducial_arithmetic(&m, 10, t as f64).unwrap();
            let pts: Vec<f64> = (1..400).map(|i| i as f64 / 400.0).collect();
            let (rc, lc, gc, ac) = (
                r.cdf_grid(&pts),
                l.cdf_grid(&pts),
                g.cdf_grid(&pts),
                a.cdf_grid(&pts),
            );
            let mut sign_changes = 0;
            let mut last = 0i8;
            for i in 0..pts.len() {
                if gc[i] > 1e-10 && gc[i] < 1.0 - 1e-10 {
                    assert!(
                        rc[i] < gc[i] + 1e-9 && gc[i] < lc[i] + 1e-9,
                        "ordering at t={t}, theta={}",
                        pts[i]
                    );
                }
                let d = gc[i] - ac[i];
                if d.abs() > 1e-11 {
                    let sgn = if d > 0.0 { 1 } else { -1 };
                    if last != 0 && sgn != last {
                        sign_changes += 1;
                        assert!(sgn > 0, "crossing direction at t={t}");
                    }
                    last = sgn;
                }
            }
            assert_eq!(sign_changes, 1, "single crossing at t={t}");
            // and hence the 0.95 equal-tail interval of H^G sits inside H^A's
            let (gl, gh) = (g.quantile(0.025).unwrap(), g.quantile(0.975).unwrap());
            let (al, ah) = (a.quantile(0.025).unwrap(), a.quantile(0.975).unwrap());
            assert!(al <= gl + 1e-9 && gh <= ah + 1e-9, "containment at t={t}");
        }
    }

    #[test]
    fn quantiles_invert_cdf_for_numeric_variants() {
        let m = ModelSpec::logarithmic();
        let g = fiducial_geometric(&m, 10, 12.0).unwrap();
        for &p in &[0.05, 0.5, 0.95] {
            let q = g.quantile(p).unwrap();
            assert!((g.cdf(q) - p).abs() < 1e-9, "p={p}");
        }
    }
}
