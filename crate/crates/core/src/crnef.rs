//! Conditionally reducible exponential families: φ/θ/μ parameterizations,
//! closed-form joint fiducial densities for the basic quadratic-variance
//! families, and the generalized Dirichlet on the simplex.

use crate::dist::{
    affine_of, log_of, logit_of, negate_of, odds_of, Beta, Distribution1D, Gamma, InverseGamma,
    Mixture, Normal,
};
use crate::error::{Error, Result};
use crate::fiducial1d::FiducialVariant;
use crate::stepwise::{CondFactory, JointFiducial};
use std::sync::Arc;

/// The four implemented basic families.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CrNefFamily {
    /// m Poisson components followed by d−m normals with known variance.
    PoissonNormal { m: usize, sigma2: f64 },
    /// d free cells of a multinomial with N trials per observation.
    Multinomial { trials: u64 },
    /// d cells with R occurrences in cell d+1.
    NegMultinomial { r: u64 },
    /// m negative-multinomial components, one gamma, then d−m−1 normals.
    NegMultGammaNormal { m: usize, r: u64 },
}

/// A cr-NEF instance of dimension d.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CrNefSpec {
    pub family: CrNefFamily,
    pub d: usize,
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum CompKind {
    Poisson,
    NormalKnownVar(f64),
    Multinomial(u64),
    NegMult(u64),
    NmgnGamma(u64),
    NmgnNormal,
}

impl CrNefSpec {
    pub fn new(family: CrNefFamily, d: usize) -> Result<Self> {
        if d == 0 {
            return Err(Error::domain("cr-NEF needs dimension d >= 1"));
        }
        match family {
            CrNefFamily::PoissonNormal { m, sigma2 } => {
                if m > d || !(sigma2 > 0.0) {
                    return Err(Error::domain("need m <= d and sigma2 > 0"));
                }
            }
            CrNefFamily::Multinomial { trials } => {
                if trials == 0 {
                    return Err(Error::domain("multinomial needs N >= 1"));
                }
            }
            CrNefFamily::NegMultinomial { r } => {
                if r == 0 {
                    return Err(Error::domain("negative-multinomial needs R >= 1"));
                }
            }
            CrNefFamily::NegMultGammaNormal { m, r } => {
                if m == 0 || m + 1 > d || r == 0 {
                    return Err(Error::domain("need 1 <= m, m+1 <= d and R >= 1"));
                }
            }
        }
        Ok(CrNefSpec { family, d })
    }

    /// The constant q of the simple quadratic variance function.
    pub fn q(&self) -> f64 {
        match self.family {
            CrNefFamily::PoissonNormal { .. } => 0.0,
            CrNefFamily::Multinomial { trials } => -1.0 / trials as f64,
            CrNefFamily::NegMultinomial { r } | CrNefFamily::NegMultGammaNormal { r, .. } => {
                1.0 / r as f64
            }
        }
    }

    /// Per-component constant z_k (1 on discrete components, 0 otherwise).
    pub fn z(&self, k: usize) -> f64 {
        match self.comp_kind(k) {
            CompKind::Poisson | CompKind::Multinomial(_) | CompKind::NegMult(_) => 1.0,
            _ => 0.0,
        }
    }

    fn comp_kind(&self, k: usize) -> CompKind {
        match self.family {
            CrNefFamily::PoissonNormal { m, sigma2 } => {
                if k < m {
                    CompKind::Poisson
                } else {
                    CompKind::NormalKnownVar(sigma2)
                }
            }
            CrNefFamily::Multinomial { trials } => CompKind::Multinomial(trials),
            CrNefFamily::NegMultinomial { r } => CompKind::NegMult(r),
            CrNefFamily::NegMultGammaNormal { m, r } => {
                if k < m {
                    CompKind::NegMult(r)
                } else if k == m {
                    CompKind::NmgnGamma(r)
                } else {
                    CompKind::NmgnNormal
                }
            }
        }
    }

    /// B_k, the component cumulant function.
    pub fn b_k(&self, k: usize, phi: f64) -> f64 {
        match self.comp_kind(k) {
            CompKind::Poisson => phi.exp(),
            CompKind::NormalKnownVar(s2) => 0.5 * s2 * phi * phi,
            CompKind::Multinomial(nn) => nn as f64 * phi.exp().ln_1p(),
            CompKind::NegMult(r) => -(r as f64) * (-phi.exp()).ln_1p(),
            CompKind::NmgnGamma(r) => -(r as f64) * (-phi).ln(),
            CompKind::NmgnNormal => 0.0,
        }
    }

    fn check_s(&self, s: &[f64]) -> Result<()> {
        if s.len() != self.d {
            return Err(Error::domain(format!(
                "statistic length {} does not match d={}",
                s.len(),
                self.d
            )));
        }
        Ok(())
    }

    fn check_prefix(&self, s: &[f64]) -> Result<()> {
        if s.len() > self.d {
            return Err(Error::domain(format!(
                "prefix length {} exceeds d={}",
                s.len(),
                self.d
            )));
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parameterizations
// ---------------------------------------------------------------------------

/// φ_k = log(p_k / (1 − Σ_{j≤k} p_j)) componentwise.
pub fn multinomial_phi_of_p(p: &[f64]) -> Result<Vec<f64>> {
    let mut tail = 1.0;
    let mut phi = Vec::with_capacity(p.len());
    for &pk in p {
        if !(pk > 1e-12) {
            return Err(Error::boundary(format!(
                "cell probability {pk} at the boundary"
            )));
        }
        let after = tail - pk;
        if !(after > 1e-12) {
            return Err(Error::boundary("cumulative probability reaches 1"));
        }
        phi.push((pk / after).ln());
        tail = after;
    }
    Ok(phi)
}

/// Inverse of [`multinomial_phi_of_p`].
pub fn multinomial_p_of_phi(phi: &[f64]) -> Vec<f64> {
    let mut rem = 1.0;
    let mut p = Vec::with_capacity(phi.len());
    for &f in phi {
        let sig = 1.0 / (1.0 + (-f).exp());
        let pk = rem * sig;
        p.push(pk);
        rem -= pk;
    }
    p
}

/// μ as a (lower-triangular) function of φ; accepts any leading prefix.
pub fn mu_of_phi(spec: &CrNefSpec, phi: &[f64]) -> Result<Vec<f64>> {
    spec.check_prefix(phi)?;
    let mut mu = Vec::with_capacity(phi.len());
    for k in 0..phi.len() {
        let f = phi[k];
        let v = match spec.comp_kind(k) {
            CompKind::Poisson => f.exp(),
            CompKind::NormalKnownVar(s2) => s2 * f,
            CompKind::Multinomial(nn) => {
                let sum: f64 = mu.iter().sum();
                let sig = 1.0 / (1.0 + (-f).exp());
                (nn as f64 - sum) * sig
            }
            CompKind::NegMult(r) => {
                let sum: f64 = mu.iter().sum();
                let psi = f.exp();
                (r as f64 + sum) * psi / (1.0 - psi)
            }
            CompKind::NmgnGamma(r) => {
                let sum: f64 = mu.iter().sum();
                -(r as f64 + sum) / f
            }
            CompKind::NmgnNormal => {
                let mu_gamma = mu[nmgn_gamma_index(spec)?];
                f * mu_gamma
            }
        };
        mu.push(v);
    }
    Ok(mu)
}

/// φ as a function of μ (inverse of [`mu_of_phi`]); accepts prefixes.
pub fn phi_of_mu(spec: &CrNefSpec, mu: &[f64]) -> Result<Vec<f64>> {
    spec.check_prefix(mu)?;
    let mut phi = Vec::with_capacity(mu.len());
    let mut prefix = 0.0;
    for k in 0..mu.len() {
        let m = mu[k];
        let f = match spec.comp_kind(k) {
            CompKind::Poisson => m.ln(),
            CompKind::NormalKnownVar(s2) => m / s2,
            CompKind::Multinomial(nn) => {
                let after = nn as f64 - prefix - m;
                if !(after > 0.0) || !(m > 0.0) {
                    return Err(Error::boundary("mu outside the simplex"));
                }
                (m / after).ln()
            }
            CompKind::NegMult(r) => {
                let denom = r as f64 + prefix + m;
                (m / denom).ln()
            }
            CompKind::NmgnGamma(r) => -(r as f64 + prefix) / m,
            CompKind::NmgnNormal => {
                let mu_gamma = mu[nmgn_gamma_index(spec)?];
                m / mu_gamma
            }
        };
        phi.push(f);
        prefix += m;
    }
    Ok(phi)
}

/// θ_k = φ_k − Σ_{u>k} A_uk(φ_u).
pub fn theta_of_phi(spec: &CrNefSpec, phi: &[f64]) -> Result<Vec<f64>> {
    spec.check_s(phi)?;
    let mut theta = Vec::with_capacity(spec.d);
    for k in 0..spec.d {
        let mut t = phi[k];
        for u in (k + 1)..spec.d {
            t -= a_uk(spec, u, k, phi[u])?;
        }
        theta.push(t);
    }
    Ok(theta)
}

/// φ from θ by backward recursion (φ_d = θ_d first).
pub fn phi_of_theta(spec: &CrNefSpec, theta: &[f64]) -> Result<Vec<f64>> {
    spec.check_s(theta)?;
    let mut phi = vec![0.0; spec.d];
    for k in (0..spec.d).rev() {
        let mut f = theta[k];
        for u in (k + 1)..spec.d {
            f += a_uk(spec, u, k, phi[u])?;
        }
        phi[k] = f;
    }
    Ok(phi)
}

/// A_uk(φ_u): the coefficient of x_k in the u-th conditional cumulant.
fn a_uk(spec: &CrNefSpec, u: usize, k: usize, phi_u: f64) -> Result<f64> {
    Ok(match spec.comp_kind(u) {
        CompKind::Poisson | CompKind::NormalKnownVar(_) => 0.0,
        CompKind::Multinomial(_) => -phi_u.exp().ln_1p(),
        CompKind::NegMult(_) => (-phi_u.exp()).ln_1p(),
        CompKind::NmgnGamma(_) => -(-phi_u).ln(),
        CompKind::NmgnNormal => {
            if k == nmgn_gamma_index(spec)? {
                0.5 * phi_u * phi_u
            } else {
                0.0
            }
        }
    })
}

fn nmgn_gamma_index(spec: &CrNefSpec) -> Result<usize> {
    match spec.family {
        CrNefFamily::NegMultGammaNormal { m, .. } => Ok(m),
        _ => Err(Error::domain(
            "gamma component exists only in the NM/gamma/normal family",
        )),
    }
}

// ---------------------------------------------------------------------------
// φ-space joint fiducial (independent components)
// ---------------------------------------------------------------------------

fn shift(variant: FiducialVariant, z: f64) -> f64 {
    match variant {
        FiducialVariant::Right => z,
        FiducialVariant::Left => 0.0,
        FiducialVariant::Geometric => 0.5 * z,
        FiducialVariant::Arithmetic => f64::NAN, // handled as a mixture
    }
}

/// φ_k component distribution for a given variant.
fn phi_component(
    spec: &CrNefSpec,
    n: u64,
    s: &[f64],
    k: usize,
    variant: FiducialVariant,
) -> Result<Box<dyn Distribution1D>> {
    let nf = n as f64;
    let prefix: f64 = s[..k].iter().sum();
    let sk = s[k];
    let kind = spec.comp_kind(k);
    if let FiducialVariant::Arithmetic = variant {
        // Continuous components have a single member; discrete ones mix.
        return match kind {
            CompKind::NormalKnownVar(_) | CompKind::NmgnGamma(_) | CompKind::NmgnNormal => {
                phi_component(spec, n, s, k, FiducialVariant::Right)
            }
            _ => Ok(Box::new(Mixture::new(vec![
                (0.5, phi_component(spec, n, s, k, FiducialVariant::Right)?),
                (0.5, phi_component(spec, n, s, k, FiducialVariant::Left)?),
            ])?)),
        };
    }
    let delta = shift(variant, spec.z(k));
    match kind {
        CompKind::Poisson => {
            let a = sk + delta;
            if !(a > 0.0) {
                return Err(Error::boundary(format!(
                    "component {k}: improper at count {sk}"
                )));
            }
            Ok(Box::new(log_of(Box::new(Gamma::new(a, nf)?))))
        }
        CompKind::NormalKnownVar(s2) => Ok(Box::new(Normal::new(
            sk / (nf * s2),
            1.0 / (nf * s2).sqrt(),
        )?)),
        CompKind::Multinomial(nn) => {
            let trials = nf * nn as f64 - prefix;
            let a = sk + delta;
            let b = trials - sk + 1.0 - delta;
            if !(a > 0.0) || !(b > 0.0) {
                return Err(Error::boundary(format!(
                    "component {k}: s_k={sk} at the support boundary (conditional trials {trials})"
                )));
            }
            Ok(Box::new(logit_of(Box::new(Beta::new(a, b)?))))
        }
        CompKind::NegMult(r) => {
            let a = sk + delta;
            let b = (r as f64) * nf + prefix;
            if !(a > 0.0) {
                return Err(Error::boundary(format!(
                    "component {k}: improper at count {sk}"
                )));
            }
            Ok(Box::new(log_of(Box::new(Beta::new(a, b)?))))
        }
        CompKind::NmgnGamma(r) => {
            let shape = (r as f64) * nf + prefix;
            if !(sk > 0.0) {
                return Err(Error::domain("gamma statistic must be positive"));
            }
            Ok(Box::new(negate_of(Box::new(Gamma::new(shape, sk)?))))
        }
        CompKind::NmgnNormal => {
            let s_gamma = s[nmgn_gamma_index(spec)?];
            if !(s_gamma > 0.0) {
                return Err(Error::domain("gamma statistic must be positive"));
            }
            Ok(Box::new(Normal::new(sk / s_gamma, 1.0 / s_gamma.sqrt())?))
        }
    }
}

/// Joint fiducial on φ: the components are mutually independent.
pub fn joint_fiducial_phi(
    spec: &CrNefSpec,
    n: u64,
    s: &[f64],
    variant: FiducialVariant,
) -> Result<JointFiducial> {
    spec.check_s(s)?;
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    // Validate all components now so errors surface at construction.
    for k in 0..spec.d {
        phi_component(spec, n, s, k, variant)?;
    }
    let spec = *spec;
    let s: Arc<Vec<f64>> = Arc::new(s.to_vec());
    let mut comps: Vec<CondFactory> = Vec::with_capacity(spec.d);
    let mut names = Vec::with_capacity(spec.d);
    for k in 0..spec.d {
        names.push(format!("phi{}", k + 1));
        let s = Arc::clone(&s);
        comps.push(Arc::new(move |_given: &[f64]| {
            phi_component(&spec, n, &s, k, variant)
        }));
    }
    JointFiducial::new(names, true, comps)
}

// ---------------------------------------------------------------------------
// μ-space joint fiducial (closed-form conditionals)
// ---------------------------------------------------------------------------

/// μ_k | μ_[k−1] component distribution.
fn mu_component(
    spec: &CrNefSpec,
    n: u64,
    s: &[f64],
    k: usize,
    variant: FiducialVariant,
    mu_prefix: &[f64],
) -> Result<Box<dyn Distribution1D>> {
    let nf = n as f64;
    let prefix_s: f64 = s[..k].iter().sum();
    let sk = s[k];
    let kind = spec.comp_kind(k);
    if let FiducialVariant::Arithmetic = variant {
        return match kind {
            CompKind::NormalKnownVar(_) | CompKind::NmgnGamma(_) | CompKind::NmgnNormal => {
                mu_component(spec, n, s, k, FiducialVariant::Right, mu_prefix)
            }
            _ => Ok(Box::new(Mixture::new(vec![
                (
                    0.5,
                    mu_component(spec, n, s, k, FiducialVariant::Right, mu_prefix)?,
                ),
                (
                    0.5,
                    mu_component(spec, n, s, k, FiducialVariant::Left, mu_prefix)?,
                ),
            ])?)),
        };
    }
    let delta = shift(variant, spec.z(k));
    match kind {
        CompKind::Poisson => {
            let a = sk + delta;
            if !(a > 0.0) {
                return Err(Error::boundary(format!("component {k}: improper at {sk}")));
            }
            Ok(Box::new(Gamma::new(a, nf)?))
        }
        CompKind::NormalKnownVar(s2) => Ok(Box::new(Normal::new(sk / nf, (s2 / nf).sqrt())?)),
        CompKind::Multinomial(nn) => {
            let trials = nf * nn as f64 - prefix_s;
            let a = sk + delta;
            let b = trials - sk + 1.0 - delta;
            if !(a > 0.0) || !(b > 0.0) {
                return Err(Error::boundary(format!(
                    "component {k}: s_k={sk} at the support boundary"
                )));
            }
            let rem = nn as f64 - mu_prefix.iter().sum::<f64>();
            if !(rem > 0.0) {
                return Err(Error::domain("mean prefix exhausts the total"));
            }
            Ok(Box::new(affine_of(Box::new(Beta::new(a, b)?), 0.0, rem)))
        }
        CompKind::NegMult(r) => {
            let a = sk + delta;
            let b = (r as f64) * nf + prefix_s;
            if !(a > 0.0) {
                return Err(Error::boundary(format!("component {k}: improper at {sk}")));
            }
            let c = r as f64 + mu_prefix.iter().sum::<f64>();
            Ok(Box::new(affine_of(
                Box::new(odds_of(Box::new(Beta::new(a, b)?))),
                0.0,
                c,
            )))
        }
        CompKind::NmgnGamma(r) => {
            let shape = (r as f64) * nf + prefix_s;
            let c = r as f64 + mu_prefix.iter().sum::<f64>();
            Ok(Box::new(InverseGamma::new(shape, sk * c)?))
        }
        CompKind::NmgnNormal => {
            let gi = nmgn_gamma_index(spec)?;
            let s_gamma = s[gi];
            let mu_gamma = mu_prefix[gi];
            if !(mu_gamma > 0.0) {
                return Err(Error::domain("gamma mean must be positive"));
            }
            Ok(Box::new(Normal::new(
                mu_gamma * sk / s_gamma,
                mu_gamma / s_gamma.sqrt(),
            )?))
        }
    }
}

/// Joint fiducial for the mean parameter μ, ordered μ₁, ..., μ_d.
pub fn joint_fiducial_mu(
    spec: &CrNefSpec,
    n: u64,
    s: &[f64],
    variant: FiducialVariant,
) -> Result<JointFiducial> {
    spec.check_s(s)?;
    if n == 0 {
        return Err(Error::domain("n must be >= 1"));
    }
    for k in 0..spec.d {
        // Validate the statistic side now; prefix-dependent checks are
        // revalidated per call.
        phi_component(spec, n, s, k, variant)?;
    }
    let spec = *spec;
    let s: Arc<Vec<f64>> = Arc::new(s.to_vec());
    let mut comps: Vec<CondFactory> = Vec::with_capacity(spec.d);
    let mut names = Vec::with_capacity(spec.d);
    for k in 0..spec.d {
        names.push(format!("mu{}", k + 1));
        let s = Arc::clone(&s);
        comps.push(Arc::new(move |given: &[f64]| {
            mu_component(&spec, n, &s, k, variant, given)
        }));
    }
    JointFiducial::new(names, true, comps)
}

/// Geometric-mean fiducial for the multinomial cell probabilities: the
/// generalized Dirichlet with sequential-beta sampler.
pub fn multinomial_p_geometric(trials: u64, n: u64, s: &[f64]) -> Result<JointFiducial> {
    let spec = CrNefSpec::new(CrNefFamily::Multinomial { trials }, s.len())?;
    let mu = joint_fiducial_mu(&spec, n, s, FiducialVariant::Geometric)?;
    // p = μ/N componentwise: rescale each conditional.
    let nn = trials as f64;
    let d = spec.d;
    let mut comps: Vec<CondFactory> = Vec::with_capacity(d);
    let mut names = Vec::with_capacity(d);
    let mu = Arc::new(mu);
    for k in 0..d {
        names.push(format!("p{}", k + 1));
        let mu = Arc::clone(&mu);
        comps.push(Arc::new(move |given: &[f64]| {
            let mu_prefix: Vec<f64> = given.iter().map(|p| p * nn).collect();
            let base = mu.conditional(k, &mu_prefix)?;
            Ok(Box::new(affine_of(base, 0.0, 1.0 / nn)) as Box<dyn Distribution1D>)
        }));
    }
    JointFiducial::new(names, true, comps)
}

// ---------------------------------------------------------------------------
// Fiducial prior
// ---------------------------------------------------------------------------

/// The fiducial prior on φ: the s = n = 0 limit of the geometric-mean joint,
/// π(φ) ∝ Π_k exp(z_k φ_k / 2 + q B_k(φ_k)). Possibly improper.
pub struct FiducialPrior {
    spec: CrNefSpec,
}

impl FiducialPrior {
    /// Log prior density of one component (unnormalized).
    pub fn log_component(&self, k: usize, phi: f64) -> f64 {
        0.5 * self.spec.z(k) * phi + self.spec.q() * self.spec.b_k(k, phi)
    }

    /// Joint log prior density (unnormalized).
    pub fn log_density(&self, phi: &[f64]) -> f64 {
        phi.iter()
            .enumerate()
            .map(|(k, &f)| self.log_component(k, f))
            .sum()
    }
}

/// Fiducial prior for φ; exists for all four implemented families.
pub fn fiducial_prior(spec: &CrNefSpec) -> Result<FiducialPrior> {
    Ok(FiducialPrior { spec: *spec })
}

/// Log-likelihood of φ_k from the conditional law of S_k given S_[k−1].
/// Exposed for the posterior-equality checks.
pub fn conditional_loglik(spec: &CrNefSpec, n: u64, s: &[f64], k: usize, phi: f64) -> Result<f64> {
    spec.check_s(s)?;
    let nf = n as f64;
    let prefix: f64 = s[..k].iter().sum();
    let sk = s[k];
    Ok(match spec.comp_kind(k) {
        CompKind::Poisson => phi * sk - nf * phi.exp(),
        CompKind::NormalKnownVar(s2) => phi * sk - 0.5 * nf * s2 * phi * phi,
        CompKind::Multinomial(nn) => phi * sk - (nf * nn as f64 - prefix) * phi.exp().ln_1p(),
        CompKind::NegMult(r) => phi * sk + ((r as f64) * nf + prefix) * (-phi.exp()).ln_1p(),
        CompKind::NmgnGamma(r) => phi * sk + ((r as f64) * nf + prefix) * (-phi).ln(),
        CompKind::NmgnNormal => {
            let s_gamma = s[nmgn_gamma_index(spec)?];
            phi * sk - 0.5 * s_gamma * phi * phi
        }
    })
}
