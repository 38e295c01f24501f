//! Univariate distributions over parameters: closed forms (normal, gamma,
//! inverse-gamma, beta, Pareto, uniform), monotone pushforwards and
//! quadrature-backed numeric densities. All immutable and thread-safe.

use crate::error::{Error, Result};
use crate::numerics::quad::{integrate, integrate_lenient, DEFAULT_QUAD_TOL};
use crate::numerics::rng::SplitMix64;
use crate::numerics::root::find_root_increasing;
use crate::numerics::special::{
    ln_beta, ln_gamma, normal_cdf, normal_pdf, normal_quantile, reg_inc_beta, reg_lower_gamma,
    reg_upper_gamma,
};

/// Tolerance (in CDF units) used when inverting distribution functions.
pub const QUANTILE_TOL: f64 = 1e-12;

/// An immutable univariate distribution over a real parameter.
pub trait Distribution1D: Send + Sync {
    /// Open support interval (endpoints may be infinite).
    fn support(&self) -> (f64, f64);

    fn pdf(&self, x: f64) -> f64;

    fn cdf(&self, x: f64) -> f64;

    /// Inverse CDF. The default inverts `cdf` with a bisection/secant hybrid,
    /// expanding the bracket geometrically from `median_hint`.
    fn quantile(&self, p: f64) -> Result<f64> {
        generic_quantile(self.as_dist(), p)
    }

    /// A finite point near the center of mass, used to seed bracket expansion.
    fn median_hint(&self) -> f64 {
        let (lo, hi) = self.support();
        match (lo.is_finite(), hi.is_finite()) {
            (true, true) => 0.5 * (lo + hi),
            (true, false) => lo + 1.0,
            (false, true) => hi - 1.0,
            (false, false) => 0.0,
        }
    }

    /// Inverse-CDF sampling with the crate RNG.
    fn sample(&self, rng: &mut SplitMix64) -> Result<f64> {
        self.quantile(rng.next_f64())
    }

    /// CDF on many points; numeric backends override with incremental sweeps.
    fn cdf_grid(&self, points: &[f64]) -> Vec<f64> {
        points.iter().map(|&x| self.cdf(x)).collect()
    }

    fn as_dist(&self) -> &dyn Distribution1D;
}

/// Bracket expansion + root solve shared by every `quantile` implementation.
pub fn generic_quantile(dist: &dyn Distribution1D, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "quantile requires p in (0,1), got {p}"
        )));
    }
    let (lo, hi) = dist.support();
    let hint = {
        let h = dist.median_hint();
        if h.is_finite() && h > lo && h < hi {
            h
        } else {
            match (lo.is_finite(), hi.is_finite()) {
                (true, true) => 0.5 * (lo + hi),
                (true, false) => lo + 1.0,
                (false, true) => hi - 1.0,
                (false, false) => 0.0,
            }
        }
    };
    let scale = hint.abs().max(1.0);
    let mut upper = if hi.is_finite() { hi } else { hint + scale };
    if !hi.is_finite() {
        let mut step = scale;
        while dist.cdf(upper) < p {
            step *= 4.0;
            upper = hint + step;
            if step > 1e300 {
                return Err(Error::NonConvergence(format!(
                    "quantile bracket expansion diverged upward for p={p}"
                )));
            }
        }
    }
    let mut lower = if lo.is_finite() { lo } else { hint - scale };
    if !lo.is_finite() {
        let mut step = scale;
        while dist.cdf(lower) > p {
            step *= 4.0;
            lower = hint - step;
            if step > 1e300 {
                return Err(Error::NonConvergence(format!(
                    "quantile bracket expansion diverged downward for p={p}"
                )));
            }
        }
    }
    find_root_increasing(|x| dist.cdf(x), p, (lower, upper), QUANTILE_TOL)
}

/// Sup-norm distance between two CDFs on a grid.
pub fn sup_cdf_gap(a: &dyn Distribution1D, b: &dyn Distribution1D, points: &[f64]) -> f64 {
    let ca = a.cdf_grid(points);
    let cb = b.cdf_grid(points);
    ca.iter()
        .zip(cb.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

// ---------------------------------------------------------------------------
// Closed forms
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Normal {
    pub mean: f64,
    pub sd: f64,
}

impl Normal {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !(sd > 0.0) || !mean.is_finite() {
            return Err(Error::domain(format!("Normal requires sd > 0, got {sd}")));
        }
        Ok(Normal { mean, sd })
    }
}

impl Distribution1D for Normal {
    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
    fn pdf(&self, x: f64) -> f64 {
        normal_pdf((x - self.mean) / self.sd) / self.sd
    }
    fn cdf(&self, x: f64) -> f64 {
        normal_cdf((x - self.mean) / self.sd)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        Ok(self.mean + self.sd * normal_quantile(p)?)
    }
    fn median_hint(&self) -> f64 {
        self.mean
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

/// Gamma with shape `alpha` and rate `lambda` (mean alpha/lambda).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gamma {
    pub shape: f64,
    pub rate: f64,
}

impl Gamma {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        if !(shape > 0.0) || !(rate > 0.0) {
            return Err(Error::domain(format!(
                "Gamma requires shape, rate > 0, got ({shape}, {rate})"
            )));
        }
        Ok(Gamma { shape, rate })
    }
}

impl Distribution1D for Gamma {
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln = self.shape * self.rate.ln() + (self.shape - 1.0) * x.ln()
            - self.rate * x
            - ln_gamma(self.shape).expect("shape > 0");
        ln.exp()
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        reg_lower_gamma(self.shape, self.rate * x).unwrap_or(1.0)
    }
    fn median_hint(&self) -> f64 {
        self.shape / self.rate
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

/// Inverse gamma: X ~ In-Ga(shape, scale) iff 1/X ~ Ga(shape, scale).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InverseGamma {
    pub shape: f64,
    pub scale: f64,
}

impl InverseGamma {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0) || !(scale > 0.0) {
            return Err(Error::domain(format!(
                "InverseGamma requires shape, scale > 0, got ({shape}, {scale})"
            )));
        }
        Ok(InverseGamma { shape, scale })
    }
}

impl Distribution1D for InverseGamma {
    fn support(&self) -> (f64, f64) {
        (0.0, f64::INFINITY)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let ln = self.shape * self.scale.ln()
            - (self.shape + 1.0) * x.ln()
            - self.scale / x
            - ln_gamma(self.shape).expect("shape > 0");
        ln.exp()
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        reg_upper_gamma(self.shape, self.scale / x).unwrap_or(1.0)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        // X = scale / G with G ~ Ga(shape, 1)
        let g = Gamma::new(self.shape, 1.0)?;
        Ok(self.scale / g.quantile(1.0 - p)?)
    }
    fn median_hint(&self) -> f64 {
        if self.shape > 1.0 {
            self.scale / (self.shape - 1.0)
        } else {
            self.scale
        }
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Beta {
    pub a: f64,
    pub b: f64,
}

impl Beta {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a > 0.0) || !(b > 0.0) {
            return Err(Error::domain(format!(
                "Beta requires a, b > 0, got ({a}, {b})"
            )));
        }
        Ok(Beta { a, b })
    }
}

impl Distribution1D for Beta {
    fn support(&self) -> (f64, f64) {
        (0.0, 1.0)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x <= 0.0 || x >= 1.0 {
            return 0.0;
        }
        let ln = (self.a - 1.0) * x.ln() + (self.b - 1.0) * (-x).ln_1p()
            - ln_beta(self.a, self.b).expect("a, b > 0");
        ln.exp()
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            0.0
        } else if x >= 1.0 {
            1.0
        } else {
            reg_inc_beta(self.a, self.b, x).unwrap_or(f64::NAN)
        }
    }
    fn median_hint(&self) -> f64 {
        self.a / (self.a + self.b)
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

/// Pareto with shape `n` and scale `s`: density n sⁿ / xⁿ⁺¹ on x > s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pareto {
    pub shape: f64,
    pub scale: f64,
}

impl Pareto {
    pub fn new(shape: f64, scale: f64) -> Result<Self> {
        if !(shape > 0.0) || !(scale > 0.0) {
            return Err(Error::domain(format!(
                "Pareto requires shape, scale > 0, got ({shape}, {scale})"
            )));
        }
        Ok(Pareto { shape, scale })
    }
}

impl Distribution1D for Pareto {
    fn support(&self) -> (f64, f64) {
        (self.scale, f64::INFINITY)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x <= self.scale {
            return 0.0;
        }
        self.shape * (self.scale / x).powf(self.shape) / x
    }
    fn cdf(&self, x: f64) -> f64 {
        if x <= self.scale {
            0.0
        } else {
            1.0 - (self.scale / x).powf(self.shape)
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "quantile requires p in (0,1), got {p}"
            )));
        }
        Ok(self.scale * (1.0 - p).powf(-1.0 / self.shape))
    }
    fn median_hint(&self) -> f64 {
        self.scale * 2.0_f64.powf(1.0 / self.shape)
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Uniform {
    pub lo: f64,
    pub hi: f64,
}

impl Uniform {
    pub fn new(lo: f64, hi: f64) -> Result<Self> {
        if !(lo < hi) {
            return Err(Error::domain(format!(
                "Uniform requires lo < hi, got ({lo}, {hi})"
            )));
        }
        Ok(Uniform { lo, hi })
    }
}

impl Distribution1D for Uniform {
    fn support(&self) -> (f64, f64) {
        (self.lo, self.hi)
    }
    fn pdf(&self, x: f64) -> f64 {
        if x <= self.lo || x >= self.hi {
            0.0
        } else {
            1.0 / (self.hi - self.lo)
        }
    }
    fn cdf(&self, x: f64) -> f64 {
        ((x - self.lo) / (self.hi - self.lo)).clamp(0.0, 1.0)
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "quantile requires p in (0,1), got {p}"
            )));
        }
        Ok(self.lo + p * (self.hi - self.lo))
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

// ---------------------------------------------------------------------------
// Monotone pushforward
// ---------------------------------------------------------------------------

type MapFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// Pushforward of a base distribution through a strictly monotone map.
pub struct MonotoneTransform {
    base: Box<dyn Distribution1D>,
    forward: MapFn,
    inverse: MapFn,
    /// |d base-var / d new-var| evaluated at the new variable.
    dinverse_abs: MapFn,
    increasing: bool,
    support: (f64, f64),
}

impl MonotoneTransform {
    pub fn new(
        base: Box<dyn Distribution1D>,
        forward: MapFn,
        inverse: MapFn,
        dinverse_abs: MapFn,
        increasing: bool,
    ) -> Self {
        let (blo, bhi) = base.support();
        let (a, b) = if increasing {
            (forward(blo), forward(bhi))
        } else {
            (forward(bhi), forward(blo))
        };
        MonotoneTransform {
            base,
            forward,
            inverse,
            dinverse_abs,
            increasing,
            support: (a, b),
        }
    }
}

impl Distribution1D for MonotoneTransform {
    fn support(&self) -> (f64, f64) {
        self.support
    }
    fn pdf(&self, y: f64) -> f64 {
        if y <= self.support.0 || y >= self.support.1 {
            return 0.0;
        }
        let x = (self.inverse)(y);
        self.base.pdf(x) * (self.dinverse_abs)(y)
    }
    fn cdf(&self, y: f64) -> f64 {
        if y <= self.support.0 {
            return 0.0;
        }
        if y >= self.support.1 {
            return 1.0;
        }
        let x = (self.inverse)(y);
        if self.increasing {
            self.base.cdf(x)
        } else {
            1.0 - self.base.cdf(x)
        }
    }
    fn quantile(&self, p: f64) -> Result<f64> {
        let q = if self.increasing { p } else { 1.0 - p };
        Ok((self.forward)(self.base.quantile(q)?))
    }
    fn median_hint(&self) -> f64 {
        let h = (self.forward)(self.base.median_hint());
        if h.is_finite() {
            h
        } else {
            0.5 * (self.support.0.max(-1e12) + self.support.1.min(1e12))
        }
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

/// φ = logit(ψ) with ψ ~ base on (0,1).
pub fn logit_of(base: Box<dyn Distribution1D>) -> MonotoneTransform {
    MonotoneTransform::new(
        base,
        Box::new(|x: f64| (x / (1.0 - x)).ln()),
        Box::new(|y: f64| 1.0 / (1.0 + (-y).exp())),
        Box::new(|y: f64| {
            let s = 1.0 / (1.0 + (-y).exp());
            s * (1.0 - s)
        }),
        true,
    )
}

/// φ = ln(X) with X ~ base on (0, ∞).
pub fn log_of(base: Box<dyn Distribution1D>) -> MonotoneTransform {
    MonotoneTransform::new(
        base,
        Box::new(|x: f64| x.ln()),
        Box::new(|y: f64| y.exp()),
        Box::new(|y: f64| y.exp()),
        true,
    )
}

/// φ = −X.
pub fn negate_of(base: Box<dyn Distribution1D>) -> MonotoneTransform {
    MonotoneTransform::new(
        base,
        Box::new(|x: f64| -x),
        Box::new(|y: f64| -y),
        Box::new(|_| 1.0),
        false,
    )
}

/// Y = a + bX with b ≠ 0.
pub fn affine_of(base: Box<dyn Distribution1D>, a: f64, b: f64) -> MonotoneTransform {
    MonotoneTransform::new(
        base,
        Box::new(move |x: f64| a + b * x),
        Box::new(move |y: f64| (y - a) / b),
        Box::new(move |_| 1.0 / b.abs()),
        b > 0.0,
    )
}

/// Y = X/(1−X), the β′ pushforward of a Beta base on (0,1).
pub fn odds_of(base: Box<dyn Distribution1D>) -> MonotoneTransform {
    MonotoneTransform::new(
        base,
        Box::new(|x: f64| x / (1.0 - x)),
        Box::new(|y: f64| y / (1.0 + y)),
        Box::new(|y: f64| 1.0 / ((1.0 + y) * (1.0 + y))),
        true,
    )
}

// ---------------------------------------------------------------------------
// Mixtures
// ---------------------------------------------------------------------------

/// Finite mixture with fixed weights.
pub struct Mixture {
    components: Vec<(f64, Box<dyn Distribution1D>)>,
    support: (f64, f64),
}

impl Mixture {
    pub fn new(components: Vec<(f64, Box<dyn Distribution1D>)>) -> Result<Self> {
        if components.is_empty() {
            return Err(Error::domain("mixture needs at least one component"));
        }
        let total: f64 = components.iter().map(|(w, _)| w).sum();
        if (total - 1.0).abs() > 1e-12 || components.iter().any(|(w, _)| *w < 0.0) {
            return Err(Error::domain("mixture weights must be >= 0 and sum to 1"));
        }
        let lo = components
            .iter()
            .map(|(_, d)| d.support().0)
            .fold(f64::INFINITY, f64::min);
        let hi = components
            .iter()
            .map(|(_, d)| d.support().1)
            .fold(f64::NEG_INFINITY, f64::max);
        Ok(Mixture {
            components,
            support: (lo, hi),
        })
    }
}

impl Distribution1D for Mixture {
    fn support(&self) -> (f64, f64) {
        self.support
    }
    fn pdf(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, d)| w * d.pdf(x)).sum()
    }
    fn cdf(&self, x: f64) -> f64 {
        self.components.iter().map(|(w, d)| w * d.cdf(x)).sum()
    }
    fn median_hint(&self) -> f64 {
        self.components
            .iter()
            .map(|(w, d)| w * d.median_hint())
            .sum()
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}

// ---------------------------------------------------------------------------
// Quadrature-backed densities
// ---------------------------------------------------------------------------

type LogDensityFn = Box<dyn Fn(f64) -> f64 + Send + Sync>;

/// A distribution defined by an unnormalized log-density on a support
/// interval; the normalizing constant is computed once at construction.
pub struct NumericDist {
    support: (f64, f64),
    log_density: LogDensityFn,
    log_norm: f64,
    tol: f64,
    hint: f64,
}

impl NumericDist {
    /// Normalize `log_density` over `support`. Fails with
    /// [`Error::Improper`] when the density does not integrate.
    pub fn new(support: (f64, f64), log_density: LogDensityFn, tol: f64) -> Result<Self> {
        let (lo, hi) = support;
        if !(lo < hi) {
            return Err(Error::domain(format!(
                "support requires lo < hi, got ({lo}, {hi})"
            )));
        }
        // Scale out the peak so the exponential stays in range.
        let probe = probe_points(lo, hi);
        let peak = probe
            .iter()
            .map(|&x| log_density(x))
            .fold(f64::NEG_INFINITY, f64::max);
        if !peak.is_finite() {
            return Err(Error::Improper(
                "log-density not finite anywhere on probe grid".into(),
            ));
        }
        let f = |x: f64| (log_density(x) - peak).exp();
        let z = integrate(f, lo, hi, tol).map_err(|e| match e {
            Error::NonConvergence(m) => {
                Error::Improper(format!("normalizing constant did not converge: {m}"))
            }
            other => other,
        })?;
        if !(z.value > 0.0) || !z.value.is_finite() {
            return Err(Error::Improper(format!(
                "normalizing constant {} is not positive and finite",
                z.value
            )));
        }
        let log_norm = peak + z.value.ln();
        // Rough center of mass for quantile bracketing.
        let mean = integrate_lenient(
            |x| x * (log_density(x) - log_norm).exp(),
            lo,
            hi,
            tol.max(1e-8),
        )
        .value;
        let hint = if mean.is_finite() && mean > lo && mean < hi {
            mean
        } else {
            probe
                .iter()
                .copied()
                .max_by(|&a, &b| {
                    log_density(a)
                        .partial_cmp(&log_density(b))
                        .unwrap_or(std::cmp::Ordering::Equal)
                })
                .unwrap_or(0.5 * (lo.max(-1e10) + hi.min(1e10)))
        };
        Ok(NumericDist {
            support,
            log_density,
            log_norm,
            tol,
            hint,
        })
    }

    pub fn with_default_tol(support: (f64, f64), log_density: LogDensityFn) -> Result<Self> {
        Self::new(support, log_density, DEFAULT_QUAD_TOL)
    }

    /// ln of the normalizing constant of the supplied unnormalized density.
    pub fn log_norm_constant(&self) -> f64 {
        self.log_norm
    }
}

fn probe_points(lo: f64, hi: f64) -> Vec<f64> {
    // Compressed-coordinate sweep covering the support.
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
    (1..200)
        .map(|i| {
            let u = tlo + (thi - tlo) * i as f64 / 200.0;
            u / (1.0 - u.abs())
        })
        .filter(|x| x.is_finite() && *x > lo && *x < hi)
        .collect()
}

impl Distribution1D for NumericDist {
    fn support(&self) -> (f64, f64) {
        self.support
    }
    fn pdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support;
        if x <= lo || x >= hi {
            return 0.0;
        }
        ((self.log_density)(x) - self.log_norm).exp()
    }
    fn cdf(&self, x: f64) -> f64 {
        let (lo, hi) = self.support;
        if x <= lo {
            return 0.0;
        }
        if x >= hi {
            return 1.0;
        }
        let r = integrate_lenient(|u| self.pdf(u), lo, x, self.tol);
        r.value.clamp(0.0, 1.0)
    }
    fn cdf_grid(&self, points: &[f64]) -> Vec<f64> {
        // Incremental sweep when the grid is sorted; falls back otherwise.
        let sorted = points.windows(2).all(|w| w[0] <= w[1]);
        if !sorted || points.is_empty() {
            return points.iter().map(|&x| self.cdf(x)).collect();
        }
        let (lo, hi) = self.support;
        let mut out = Vec::with_capacity(points.len());
        let mut acc = 0.0_f64;
        let mut prev = lo;
        for &x in points {
            if x <= prev {
                out.push(acc.clamp(0.0, 1.0));
                continue;
            }
            if x >= hi {
                acc = 1.0;
                out.push(1.0);
                prev = x;
                continue;
            }
            let seg = integrate_lenient(|u| self.pdf(u), prev, x, self.tol);
            acc += seg.value;
            out.push(acc.clamp(0.0, 1.0));
            prev = x;
        }
        out
    }
    fn median_hint(&self) -> f64 {
        self.hint
    }
    fn as_dist(&self) -> &dyn Distribution1D {
        self
    }
}
