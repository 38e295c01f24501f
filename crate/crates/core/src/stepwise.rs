//! Step-by-step construction of joint fiducial distributions: conditional
//! factorization with an inferential importance ordering, ancillary
//! conditioning, location/scale specializations and lower-triangular
//! pushforwards.

use crate::dist::{
    affine_of, odds_of, Beta, Distribution1D, Gamma, InverseGamma, Mixture, MonotoneTransform,
    Normal, NumericDist, Pareto, Uniform,
};
use crate::error::{Error, Result};
use crate::fiducial1d::FiducialVariant;
use crate::models::{Family, ModelSpec};
use crate::numerics::exec::map_indexed;
use crate::numerics::quad::{integrate_lenient, DEFAULT_QUAD_TOL};
use crate::numerics::rng::SplitMix64;
use std::sync::Arc;

/// Conditional-law factory: given the more-important components φ_[k−1],
/// produce the distribution of φ_k.
pub type CondFactory = Arc<dyn Fn(&[f64]) -> Result<Box<dyn Distribution1D>> + Send + Sync>;

/// Product-form multivariate fiducial distribution: component k is the law
/// of φ_{k+1} given φ_1..φ_k (inferential ordering).
pub struct JointFiducial {
    names: Vec<String>,
    /// Set by constructors for factorizations known to be order-invariant.
    pub order_invariant: bool,
    comps: Vec<CondFactory>,
}

impl JointFiducial {
    pub fn new(names: Vec<String>, order_invariant: bool, comps: Vec<CondFactory>) -> Result<Self> {
        if names.len() != comps.len() || comps.is_empty() {
            return Err(Error::domain(
                "joint fiducial needs one named factory per component",
            ));
        }
        Ok(JointFiducial {
            names,
            order_invariant,
            comps,
        })
    }

    pub fn dim(&self) -> usize {
        self.comps.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    /// Law of φ_{j+1} given the leading components.
    pub fn conditional(&self, j: usize, given: &[f64]) -> Result<Box<dyn Distribution1D>> {
        if j >= self.comps.len() || given.len() != j {
            return Err(Error::domain(format!(
                "conditional {j} needs exactly {j} leading values"
            )));
        }
        (self.comps[j])(given)
    }

    /// Exact marginal of the parameter of interest φ₁.
    pub fn marginal_of_interest(&self) -> Result<Box<dyn Distribution1D>> {
        (self.comps[0])(&[])
    }

    /// Joint density as the product of conditional densities.
    pub fn pdf(&self, phi: &[f64]) -> Result<f64> {
        if phi.len() != self.comps.len() {
            return Err(Error::domain(format!(
                "joint pdf needs {} coordinates",
                self.comps.len()
            )));
        }
        let mut acc = 1.0;
        for (j, factory) in self.comps.iter().enumerate() {
            let d = factory(&phi[..j])?;
            acc *= d.pdf(phi[j]);
            if acc == 0.0 {
                return Ok(0.0);
            }
        }
        Ok(acc)
    }

    /// Sequential inverse-CDF draw: φ₁ first, then φ₂|φ₁ and so on.
    pub fn sample(&self, rng: &mut SplitMix64) -> Result<Vec<f64>> {
        let mut phi = Vec::with_capacity(self.comps.len());
        for j in 0..self.comps.len() {
            let d = (self.comps[j])(&phi)?;
            phi.push(d.sample(rng)?);
        }
        Ok(phi)
    }

    /// Draw many vectors; replicate i uses the stream (seed, i), so the
    /// result is identical in sequential and parallel builds.
    pub fn sample_many(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        let draws = map_indexed(count, |i| {
            let mut rng = SplitMix64::stream(seed, i as u64);
            self.sample(&mut rng)
        });
        draws.into_iter().collect()
    }
}

// ---------------------------------------------------------------------------
// Lower-triangular pushforward
// ---------------------------------------------------------------------------

/// One coordinate of a lower-triangular reparameterization λ = g(φ):
/// λ_k depends on φ_1..φ_k only and is strictly monotone in φ_k.
pub struct ComponentMap {
    pub name: String,
    /// λ_k = forward(φ_[k]); the slice has length k.
    pub forward: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
    /// φ_k = inverse(φ_[k−1], λ_k).
    pub inverse: Arc<dyn Fn(&[f64], f64) -> f64 + Send + Sync>,
    /// ∂λ_k/∂φ_k evaluated at φ_[k]; must not vanish.
    pub dforward_dphik: Arc<dyn Fn(&[f64]) -> f64 + Send + Sync>,
}

/// Change of variables along a lower-triangular map; set probabilities are
/// preserved component by component.
pub fn pushforward_lower_triangular(
    joint: &JointFiducial,
    maps: Vec<ComponentMap>,
) -> Result<JointFiducial> {
    if maps.len() != joint.dim() {
        return Err(Error::domain(format!(
            "pushforward needs {} component maps, got {}",
            joint.dim(),
            maps.len()
        )));
    }
    let maps = Arc::new(maps);
    let mut comps: Vec<CondFactory> = Vec::with_capacity(joint.dim());
    let names: Vec<String> = maps.iter().map(|m| m.name.clone()).collect();
    for j in 0..joint.dim() {
        let maps = Arc::clone(&maps);
        let base_factory = Arc::clone(&joint.comps[j]);
        comps.push(Arc::new(move |lambda_prefix: &[f64]| {
            // Recover φ_[j] from λ_[j] through the triangular inverse.
            let mut phi_prefix: Vec<f64> = Vec::with_capacity(lambda_prefix.len());
            for (i, &lam) in lambda_prefix.iter().enumerate() {
                let phi_i = (maps[i].inverse)(&phi_prefix, lam);
                phi_prefix.push(phi_i);
            }
            let base = base_factory(&phi_prefix)?;
            let map = &maps[j];
            let forward = Arc::clone(&map.forward);
            let inverse = Arc::clone(&map.inverse);
            let dforward = Arc::clone(&map.dforward_dphik);
            let prefix_f = phi_prefix.clone();
            let prefix_i = phi_prefix.clone();
            let prefix_d = phi_prefix;
            // Monotonicity direction from the derivative at the base hint.
            let at_hint = {
                let mut args = prefix_d.clone();
                args.push(base.median_hint());
                (dforward)(&args)
            };
            let increasing = at_hint > 0.0;
            let fwd = Box::new(move |u: f64| {
                let mut args = prefix_f.clone();
                args.push(u);
                (forward)(&args)
            });
            let inv = Box::new(move |lam: f64| (inverse)(&prefix_i, lam));
            let inv2 = {
                let map_inv = Arc::clone(&map.inverse);
                let prefix = prefix_d.clone();
                move |lam: f64| (map_inv)(&prefix, lam)
            };
            let dinv = Box::new(move |lam: f64| {
                let u = inv2(lam);
                let mut args = prefix_d.clone();
                args.push(u);
                1.0 / (dforward)(&args).abs()
            });
            Ok(
                Box::new(MonotoneTransform::new(base, fwd, inv, dinv, increasing))
                    as Box<dyn Distribution1D>,
            )
        }));
    }
    JointFiducial::new(names, joint.order_invariant, comps)
}

/// Identity component map for coordinate k (1-based position k = len prefix + 1).
pub fn identity_map(name: &str) -> ComponentMap {
    ComponentMap {
        name: name.to_string(),
        forward: Arc::new(|args: &[f64]| args[args.len() - 1]),
        inverse: Arc::new(|_prefix: &[f64], lam: f64| lam),
        dforward_dphik: Arc::new(|_args: &[f64]| 1.0),
    }
}

// ---------------------------------------------------------------------------
// Step chains (model-side descriptions, bound to data by build_joint)
// ---------------------------------------------------------------------------

type ChainMake = Arc<dyn Fn(&[f64]) -> Result<Vec<CondFactory>> + Send + Sync>;

/// A conditional factorization with its importance ordering, before data.
pub struct StepChain {
    pub names: Vec<String>,
    pub order_invariant: bool,
    make: ChainMake,
}

/// Bind observed data to a chain.
pub fn build_joint(chain: &StepChain, data: &[f64]) -> Result<JointFiducial> {
    let comps = (chain.make)(data)?;
    JointFiducial::new(chain.names.clone(), chain.order_invariant, comps)
}

/// Variant-indexed one-sample binomial fiducial on the success probability:
/// Bi(trials, ψ) observed at `successes`.
fn binomial_psi_dist(
    trials: f64,
    successes: f64,
    variant: FiducialVariant,
) -> Result<Box<dyn Distribution1D>> {
    let (s, t) = (successes, trials);
    if s < 0.0 || s > t {
        return Err(Error::domain(format!("need 0 <= s <= trials, got {s}/{t}")));
    }
    let right = || -> Result<Box<dyn Distribution1D>> {
        if s >= t {
            return Err(Error::boundary("right fiducial improper at s = trials"));
        }
        Ok(Box::new(Beta::new(s + 1.0, t - s)?))
    };
    let left = || -> Result<Box<dyn Distribution1D>> {
        if s <= 0.0 {
            return Err(Error::boundary("left fiducial improper at s = 0"));
        }
        Ok(Box::new(Beta::new(s, t - s + 1.0)?))
    };
    match variant {
        FiducialVariant::Right => right(),
        FiducialVariant::Left => left(),
        FiducialVariant::Geometric => {
            if s <= 0.0 || s >= t {
                return Err(Error::boundary("geometric fiducial needs 0 < s < trials"));
            }
            Ok(Box::new(Beta::new(s + 0.5, t - s + 0.5)?))
        }
        FiducialVariant::Arithmetic => Ok(Box::new(Mixture::new(vec![
            (0.5, right()?),
            (0.5, left()?),
        ])?)),
    }
}

/// Variant-indexed Poisson fiducial for the mean from a Po(n·μ) count.
fn poisson_mu_dist(
    count: f64,
    n: f64,
    variant: FiducialVariant,
) -> Result<Box<dyn Distribution1D>> {
    let right = || -> Result<Box<dyn Distribution1D>> { Ok(Box::new(Gamma::new(count + 1.0, n)?)) };
    let left = || -> Result<Box<dyn Distribution1D>> {
        if count <= 0.0 {
            return Err(Error::boundary("left fiducial improper at count 0"));
        }
        Ok(Box::new(Gamma::new(count, n)?))
    };
    match variant {
        FiducialVariant::Right => right(),
        FiducialVariant::Left => left(),
        FiducialVariant::Geometric => {
            if count <= 0.0 {
                return Err(Error::boundary("geometric fiducial needs count > 0"));
            }
            Ok(Box::new(Gamma::new(count + 0.5, n)?))
        }
        FiducialVariant::Arithmetic => Ok(Box::new(Mixture::new(vec![
            (0.5, right()?),
            (0.5, left()?),
        ])?)),
    }
}

/// Catalog of named chains.
pub mod chains {
    use super::*;

    /// Difference of two normal means with known common variance.
    /// Data: (s₁, s₂) sample sums of two size-n samples.
    /// φ₁ = μ₂ − μ₁, φ₂ = μ₁.
    pub fn diff_means(n: u64, sigma2: f64) -> Result<StepChain> {
        if !(sigma2 > 0.0) || n == 0 {
            return Err(Error::domain("diff-means needs n >= 1, sigma2 > 0"));
        }
        let nf = n as f64;
        Ok(StepChain {
            names: vec!["phi1".into(), "phi2".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                let [s1, s2] = two(data, "diff-means")?;
                let (xb1, xb2) = (s1 / nf, s2 / nf);
                let c0: CondFactory = Arc::new(move |_: &[f64]| {
                    Ok(
                        Box::new(Normal::new(xb2 - xb1, (2.0 * sigma2 / nf).sqrt())?)
                            as Box<dyn Distribution1D>,
                    )
                });
                let c1: CondFactory = Arc::new(move |given: &[f64]| {
                    let phi1 = given[0];
                    Ok(Box::new(Normal::new(
                        0.5 * (xb1 + xb2 - phi1),
                        (0.5 * sigma2 / nf).sqrt(),
                    )?) as Box<dyn Distribution1D>)
                });
                Ok(vec![c0, c1])
            }),
        })
    }

    /// Neyman–Scott: n pairs with common variance.
    /// Data: (w, x̄₁, ..., x̄ₙ) with w = Σ(xᵢ₁ − xᵢ₂)².
    /// Ordering: σ² first, then each pair mean.
    pub fn neyman_scott(n: u64) -> Result<StepChain> {
        if n == 0 {
            return Err(Error::domain("neyman-scott needs n >= 1"));
        }
        let mut names = vec!["sigma2".to_string()];
        for i in 1..=n {
            names.push(format!("mu{i}"));
        }
        Ok(StepChain {
            names,
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                if data.len() != (n + 1) as usize {
                    return Err(Error::domain(format!(
                        "neyman-scott needs w plus {n} pair means"
                    )));
                }
                let w = data[0];
                if !(w > 0.0) {
                    return Err(Error::domain("w must be > 0"));
                }
                let xbars: Vec<f64> = data[1..].to_vec();
                let mut comps: Vec<CondFactory> = Vec::with_capacity(xbars.len() + 1);
                let nf = n as f64;
                comps.push(Arc::new(move |_: &[f64]| {
                    Ok(Box::new(InverseGamma::new(0.5 * nf, 0.25 * w)?) as Box<dyn Distribution1D>)
                }));
                for xb in xbars {
                    comps.push(Arc::new(move |given: &[f64]| {
                        let sigma2 = given[0];
                        if !(sigma2 > 0.0) {
                            return Err(Error::domain("sigma2 must be > 0"));
                        }
                        Ok(Box::new(Normal::new(xb, (0.5 * sigma2).sqrt())?)
                            as Box<dyn Distribution1D>)
                    }));
                }
                Ok(comps)
            }),
        })
    }

    /// Ratio of two Poisson rates. Data: (s₁, s₂) sums of two size-n samples.
    /// φ₁ = μ₂/μ₁, φ₂ = μ₁ + μ₂.
    pub fn poisson_ratio(n: u64, variant: FiducialVariant) -> Result<StepChain> {
        if n == 0 {
            return Err(Error::domain("poisson-ratio needs n >= 1"));
        }
        let nf = n as f64;
        Ok(StepChain {
            names: vec!["phi1".into(), "phi2".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                let [s1, s2] = two(data, "poisson-ratio")?;
                let t = s1 + s2;
                let c0: CondFactory = Arc::new(move |_: &[f64]| {
                    // S₂ | S₁+S₂ = t ~ Bi(t, φ₁/(1+φ₁))
                    let base = binomial_psi_dist(t, s2, variant)?;
                    Ok(Box::new(odds_of(base)) as Box<dyn Distribution1D>)
                });
                let c1: CondFactory = Arc::new(move |_given: &[f64]| {
                    // S₁+S₂ ~ Po(nφ₂), independent of φ₁
                    poisson_mu_dist(t, nf, variant)
                });
                Ok(vec![c0, c1])
            }),
        })
    }

    /// Bivariate binomial: R ~ Bi(m, p) germinating spores, S | R=r ~ Bi(r, q).
    /// Data: (r, s). Ordering: q first, then p (independent under the joint).
    pub fn bivariate_binomial(m: u64, variant: FiducialVariant) -> Result<StepChain> {
        if m == 0 {
            return Err(Error::domain("bivariate-binomial needs m >= 1"));
        }
        let mf = m as f64;
        Ok(StepChain {
            names: vec!["q".into(), "p".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                let [r, s] = two(data, "bivariate-binomial")?;
                let c0: CondFactory = Arc::new(move |_: &[f64]| binomial_psi_dist(r, s, variant));
                let c1: CondFactory = Arc::new(move |_: &[f64]| binomial_psi_dist(mf, r, variant));
                Ok(vec![c0, c1])
            }),
        })
    }

    /// Trinomial with cell counts (x₁, x₂) out of n.
    /// φ₁ = p₁/p₂ (interest), φ₂ = p₂.
    pub fn trinomial_ratio(n: u64, variant: FiducialVariant) -> Result<StepChain> {
        if n == 0 {
            return Err(Error::domain("trinomial-ratio needs n >= 1"));
        }
        let nf = n as f64;
        Ok(StepChain {
            names: vec!["phi1".into(), "phi2".into()],
            order_invariant: false,
            make: Arc::new(move |data: &[f64]| {
                let [x1, x2] = two(data, "trinomial-ratio")?;
                let t = x1 + x2;
                if t > nf {
                    return Err(Error::domain("x1 + x2 cannot exceed n"));
                }
                let c0: CondFactory = Arc::new(move |_: &[f64]| {
                    // X₁ | X₁+X₂ = t ~ Bi(t, φ₁/(1+φ₁))
                    let base = binomial_psi_dist(t, x1, variant)?;
                    Ok(Box::new(odds_of(base)) as Box<dyn Distribution1D>)
                });
                let c1: CondFactory = Arc::new(move |given: &[f64]| {
                    // T ~ Bi(n, (1+φ₁)φ₂): ψ = (1+φ₁)φ₂
                    let phi1 = given[0];
                    let base = binomial_psi_dist(nf, t, variant)?;
                    Ok(Box::new(affine_of(base, 0.0, 1.0 / (1.0 + phi1)))
                        as Box<dyn Distribution1D>)
                });
                Ok(vec![c0, c1])
            }),
        })
    }

    /// Normal location-scale where the factorization uses (x̄, S², Z).
    /// Data: the raw sample. Components: σ², then θ | σ².
    pub fn normal_loc_scale() -> StepChain {
        StepChain {
            names: vec!["sigma2".into(), "theta".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                let n = data.len() as f64;
                if data.len() < 2 {
                    return Err(Error::domain("normal loc-scale needs n >= 2"));
                }
                let xbar = data.iter().sum::<f64>() / n;
                let ss: f64 = data.iter().map(|x| (x - xbar) * (x - xbar)).sum();
                if !(ss > 0.0) {
                    return Err(Error::domain("sample is degenerate (zero spread)"));
                }
                let c0: CondFactory = Arc::new(move |_: &[f64]| {
                    Ok(Box::new(InverseGamma::new(0.5 * (n - 1.0), 0.5 * ss)?)
                        as Box<dyn Distribution1D>)
                });
                let c1: CondFactory = Arc::new(move |given: &[f64]| {
                    let sigma2 = given[0];
                    if !(sigma2 > 0.0) {
                        return Err(Error::domain("sigma2 must be > 0"));
                    }
                    Ok(Box::new(Normal::new(xbar, (sigma2 / n).sqrt())?)
                        as Box<dyn Distribution1D>)
                });
                Ok(vec![c0, c1])
            }),
        }
    }

    /// Uniform(θ, θ+1) through the sufficient pair (X₍₁₎, X₍ₙ₎) and the
    /// ancillary Z = X₍ₙ₎ − X₍₁₎: flat on (x₍ₙ₎ − 1, x₍₁₎).
    pub fn uniform_shift() -> StepChain {
        StepChain {
            names: vec!["theta".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                let (min, max) = min_max(data)?;
                if max - min >= 1.0 {
                    return Err(Error::domain("sample range exceeds 1"));
                }
                let c: CondFactory = Arc::new(move |_: &[f64]| {
                    Ok(Box::new(Uniform::new(max - 1.0, min)?) as Box<dyn Distribution1D>)
                });
                Ok(vec![c])
            }),
        }
    }

    /// Uniform(θ, θ+1) built from the whole sample: condition X_n on the
    /// ancillary vector Zᵢ = Xᵢ − X_n. An independent route to the same law.
    pub fn uniform_shift_fullsample() -> StepChain {
        StepChain {
            names: vec!["theta".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                if data.is_empty() {
                    return Err(Error::domain("empty sample"));
                }
                let xn = *data.last().expect("non-empty");
                // zᵢ = x_n − xᵢ for i < n, extended with z = 0 for x_n itself
                let mut zmin = 0.0_f64;
                let mut zmax = 0.0_f64;
                for &x in &data[..data.len() - 1] {
                    let z = xn - x;
                    zmin = zmin.min(z);
                    zmax = zmax.max(z);
                }
                let width = 1.0 + zmin - zmax;
                if width <= 0.0 {
                    return Err(Error::domain("sample range exceeds 1"));
                }
                let lo = xn - 1.0 - zmin;
                let hi = xn - zmax;
                let c: CondFactory = Arc::new(move |_: &[f64]| {
                    Ok(Box::new(Uniform::new(lo, hi)?) as Box<dyn Distribution1D>)
                });
                Ok(vec![c])
            }),
        }
    }

    /// Uniform(0, θ) through the sufficient statistic X₍ₙ₎ (Fisher's d = m = 1
    /// reduction): Pareto(n, x₍ₙ₎).
    pub fn uniform_scale() -> StepChain {
        StepChain {
            names: vec!["theta".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                let n = data.len() as f64;
                let (_, max) = min_max(data)?;
                if !(max > 0.0) {
                    return Err(Error::domain("observations must be positive"));
                }
                let c: CondFactory = Arc::new(move |_: &[f64]| {
                    Ok(Box::new(Pareto::new(n, max)?) as Box<dyn Distribution1D>)
                });
                Ok(vec![c])
            }),
        }
    }

    /// Uniform(0, θ) from X₁ conditioned on the ancillary ratios
    /// Z = (X₂/X₁, ..., Xₙ/X₁): F_θ(x₁|z) = (x₁/θ)ⁿ if x₁ is the maximum,
    /// (x₁ w/θ)ⁿ otherwise, with w = max(z). Same fiducial law, other route.
    pub fn uniform_scale_via_ancillary() -> StepChain {
        StepChain {
            names: vec!["theta".into()],
            order_invariant: true,
            make: Arc::new(move |data: &[f64]| {
                if data.is_empty() {
                    return Err(Error::domain("empty sample"));
                }
                let x1 = data[0];
                if !(x1 > 0.0) {
                    return Err(Error::domain("observations must be positive"));
                }
                let n = data.len() as f64;
                let w = data
                    .iter()
                    .map(|x| x / x1)
                    .fold(f64::NEG_INFINITY, f64::max);
                let scale = if w <= 1.0 { x1 } else { x1 * w };
                let c: CondFactory = Arc::new(move |_: &[f64]| {
                    Ok(Box::new(Pareto::new(n, scale)?) as Box<dyn Distribution1D>)
                });
                Ok(vec![c])
            }),
        }
    }

    fn two(data: &[f64], what: &str) -> Result<[f64; 2]> {
        if data.len() != 2 {
            return Err(Error::domain(format!(
                "{what} needs exactly two data values"
            )));
        }
        Ok([data[0], data[1]])
    }

    fn min_max(data: &[f64]) -> Result<(f64, f64)> {
        if data.is_empty() {
            return Err(Error::domain("empty sample"));
        }
        let min = data.iter().copied().fold(f64::INFINITY, f64::min);
        let max = data.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        Ok((min, max))
    }
}

// ---------------------------------------------------------------------------
// Location / scale specializations
// ---------------------------------------------------------------------------

/// A location (or location-scale) model given by its standardized density.
pub struct LocationModel {
    /// ln f₀(u); the observation density is f₀(x − θ) (location) or
    /// f₀((x − θ)/σ)/σ (location-scale).
    pub log_f0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// θ-interval with nonzero likelihood for a given sample and scale,
    /// tighter than ℝ only for bounded-support densities.
    pub theta_support: Arc<dyn Fn(&[f64], f64) -> (f64, f64) + Send + Sync>,
}

impl LocationModel {
    pub fn gaussian() -> Self {
        LocationModel {
            log_f0: Arc::new(|u: f64| -0.5 * u * u - 0.5 * (2.0 * std::f64::consts::PI).ln()),
            theta_support: Arc::new(|_xs, _sigma| (f64::NEG_INFINITY, f64::INFINITY)),
        }
    }

    pub fn cauchy() -> Self {
        LocationModel {
            log_f0: Arc::new(|u: f64| -(std::f64::consts::PI * (1.0 + u * u)).ln()),
            theta_support: Arc::new(|_xs, _sigma| (f64::NEG_INFINITY, f64::INFINITY)),
        }
    }

    /// Standard uniform on (0, 1): the uniform(θ, θ+σ) family.
    pub fn uniform01() -> Self {
        LocationModel {
            log_f0: Arc::new(|u: f64| {
                if u > 0.0 && u < 1.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }),
            theta_support: Arc::new(|xs: &[f64], sigma: f64| {
                let min = xs.iter().copied().fold(f64::INFINITY, f64::min);
                let max = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
                (max - sigma, min)
            }),
        }
    }

    /// From a catalog model with location parameter.
    pub fn from_catalog(model: &ModelSpec) -> Result<Self> {
        match model.family {
            Family::NormalKnownVar => {
                let sd = model.fixed("sigma2").sqrt();
                Ok(LocationModel {
                    log_f0: Arc::new(move |u: f64| {
                        let z = u / sd;
                        -0.5 * z * z - (sd * (2.0 * std::f64::consts::PI).sqrt()).ln()
                    }),
                    theta_support: Arc::new(|_xs, _s| (f64::NEG_INFINITY, f64::INFINITY)),
                })
            }
            Family::UniformShift => Ok(LocationModel::uniform01()),
            _ => Err(Error::Unsupported(format!(
                "{} is not a location family",
                model.key()
            ))),
        }
    }
}

/// Fiducial distribution of a location parameter: conditioning X₁ on the
/// ancillary differences yields the flat-prior posterior ∝ Π f₀(xᵢ − θ).
pub fn location_fiducial(model: &LocationModel, xs: &[f64]) -> Result<Box<dyn Distribution1D>> {
    if xs.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    let (lo, hi) = (model.theta_support)(xs, 1.0);
    let log_f0 = Arc::clone(&model.log_f0);
    let xs: Vec<f64> = xs.to_vec();
    let log_density =
        Box::new(move |theta: f64| xs.iter().map(|&x| (log_f0)(x - theta)).sum::<f64>());
    let d = NumericDist::new((lo, hi), log_density, DEFAULT_QUAD_TOL).map_err(|e| match e {
        Error::Improper(m) => Error::Improper(format!("location fiducial: {m}")),
        other => other,
    })?;
    Ok(Box::new(d))
}

/// A scale model with standardized density f₀ on (0, ∞).
pub struct ScaleModel {
    pub log_f0: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// θ-interval with nonzero likelihood (e.g. θ > max x for uniform scale).
    pub theta_support: Arc<dyn Fn(&[f64]) -> (f64, f64) + Send + Sync>,
}

impl ScaleModel {
    pub fn exponential() -> Self {
        ScaleModel {
            log_f0: Arc::new(|u: f64| if u > 0.0 { -u } else { f64::NEG_INFINITY }),
            theta_support: Arc::new(|_xs| (0.0, f64::INFINITY)),
        }
    }

    pub fn uniform01() -> Self {
        ScaleModel {
            log_f0: Arc::new(|u: f64| {
                if u > 0.0 && u < 1.0 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }),
            theta_support: Arc::new(|xs: &[f64]| {
                (
                    xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
                    f64::INFINITY,
                )
            }),
        }
    }
}

/// Fiducial distribution of a scale parameter θ > 0: equals the posterior
/// under the prior 1/θ (via the log-transform reduction to a location model).
pub fn scale_fiducial(model: &ScaleModel, xs: &[f64]) -> Result<Box<dyn Distribution1D>> {
    if xs.is_empty() {
        return Err(Error::domain("empty sample"));
    }
    if xs.iter().any(|&x| !(x > 0.0)) {
        return Err(Error::domain("scale families need positive observations"));
    }
    let (lo, hi) = (model.theta_support)(xs);
    let log_f0 = Arc::clone(&model.log_f0);
    let xs: Vec<f64> = xs.to_vec();
    let n = xs.len() as f64;
    let log_density = Box::new(move |theta: f64| {
        if theta <= 0.0 {
            return f64::NEG_INFINITY;
        }
        let ll: f64 = xs.iter().map(|&x| (log_f0)(x / theta)).sum();
        ll - (n + 1.0) * theta.ln()
    });
    let d = NumericDist::new((lo.max(0.0), hi), log_density, DEFAULT_QUAD_TOL)?;
    Ok(Box::new(d))
}

/// Joint fiducial for (σ, θ) in a location-scale family, ordered σ first:
/// equals the posterior under the reference prior 1/σ. Numeric construction
/// from the factorization p_σ(z₂|z)·p_θ(x₁|z₂, z; σ).
pub fn location_scale_fiducial(model: &LocationModel, xs: &[f64]) -> Result<JointFiducial> {
    if xs.len() < 2 {
        return Err(Error::domain("location-scale needs n >= 2"));
    }
    let n = xs.len() as f64;
    let xs: Vec<f64> = xs.to_vec();
    let log_f0 = Arc::clone(&model.log_f0);
    let theta_support = Arc::clone(&model.theta_support);

    // σ-marginal: m(σ) ∝ σ^{−n−1} ∫ Π f₀((xᵢ−θ)/σ) dθ
    let sig_xs = xs.clone();
    let sig_f0 = Arc::clone(&log_f0);
    let sig_sup = Arc::clone(&theta_support);
    let sigma_log_density = Box::new(move |sigma: f64| {
        if !(sigma > 0.0) {
            return f64::NEG_INFINITY;
        }
        let (lo, hi) = (sig_sup)(&sig_xs, sigma);
        if !(lo < hi) {
            return f64::NEG_INFINITY;
        }
        let xs = &sig_xs;
        let f0 = &sig_f0;
        let ll_at = |theta: f64| -> f64 { xs.iter().map(|&x| (f0)((x - theta) / sigma)).sum() };
        // peak-scale the inner integral over θ from a coarse scan
        let (plo, phi_) = (lo.max(-1e6), hi.min(1e6));
        let probe_peak = (0..33)
            .map(|i| ll_at(plo + (phi_ - plo) * (i as f64 + 0.5) / 33.0))
            .fold(f64::NEG_INFINITY, f64::max);
        if probe_peak == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let inner = integrate_lenient(|theta| (ll_at(theta) - probe_peak).exp(), lo, hi, 1e-9);
        if !(inner.value > 0.0) || !inner.value.is_finite() {
            return f64::NEG_INFINITY;
        }
        probe_peak + inner.value.ln() - (n + 1.0) * sigma.ln()
    });

    let c0: CondFactory = Arc::new({
        let sigma_log_density: Arc<dyn Fn(f64) -> f64 + Send + Sync> =
            Arc::from(sigma_log_density as Box<dyn Fn(f64) -> f64 + Send + Sync>);
        move |_: &[f64]| {
            let ld = Arc::clone(&sigma_log_density);
            let d = NumericDist::new((0.0, f64::INFINITY), Box::new(move |s| (ld)(s)), 1e-8)?;
            Ok(Box::new(d) as Box<dyn Distribution1D>)
        }
    });

    let c1: CondFactory = Arc::new(move |given: &[f64]| {
        let sigma = given[0];
        if !(sigma > 0.0) {
            return Err(Error::domain("sigma must be > 0"));
        }
        let (lo, hi) = (theta_support)(&xs, sigma);
        if !(lo < hi) {
            return Err(Error::domain("empty theta support at this sigma"));
        }
        let xs = xs.clone();
        let f0 = Arc::clone(&log_f0);
        let log_density =
            Box::new(move |theta: f64| xs.iter().map(|&x| (f0)((x - theta) / sigma)).sum::<f64>());
        let d = NumericDist::new((lo, hi), log_density, 1e-9)?;
        Ok(Box::new(d) as Box<dyn Distribution1D>)
    });

    JointFiducial::new(vec!["sigma".into(), "theta".into()], true, vec![c0, c1])
}

// ---------------------------------------------------------------------------
// Sufficiency check
// ---------------------------------------------------------------------------

/// Result of comparing the same fiducial law built through two statistics.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SufficiencyReport {
    pub sup_cdf_gap: f64,
    pub sup_pdf_gap: f64,
}

/// Sup-norm distance between the φ₁-marginals of two constructions on a grid.
pub fn sufficiency_check(
    full: &JointFiducial,
    reduced: &JointFiducial,
    points: &[f64],
) -> Result<SufficiencyReport> {
    let a = full.marginal_of_interest()?;
    let b = reduced.marginal_of_interest()?;
    let ca = a.cdf_grid(points);
    let cb = b.cdf_grid(points);
    let sup_cdf_gap = ca
        .iter()
        .zip(cb.iter())
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    let sup_pdf_gap = points
        .iter()
        .map(|&x| (a.pdf(x) - b.pdf(x)).abs())
        .fold(0.0, f64::max);
    Ok(SufficiencyReport {
        sup_cdf_gap,
        sup_pdf_gap,
    })
}
