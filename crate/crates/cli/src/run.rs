//! Scenario execution: resolve the target distribution(s), evaluate, write
//! CSV files and a short stdout summary. Outputs are deterministic given the
//! scenario and seed.

use crate::csvout::Csv;
use crate::scenario::{Command, Scenario, Space};
use fid_core::crnef::{
    fiducial_prior, joint_fiducial_mu, joint_fiducial_phi, multinomial_p_geometric, CrNefFamily,
    CrNefSpec,
};
use fid_core::dist::Distribution1D;
use fid_core::error::Error as CoreError;
use fid_core::fiducial1d::{fiducial, FiducialVariant};
use fid_core::gfd::{compare_gfd_vs_stepwise, gfd_density, CatalogGfd};
use fid_core::inference::{
    bayes_posterior_sample, bayes_posterior_stat, confidence_risk_gap, equal_tail_interval,
    fiducial_bayes_gap, neyman_scott_sigma2_posterior, pit_uniformity,
    trinomial_ratio_reference_posterior, Prior,
};
use fid_core::models::ModelSpec;
use fid_core::stepwise::{build_joint, chains, JointFiducial};
use std::fmt;
use std::path::{Path, PathBuf};

#[derive(Debug)]
pub struct RunError {
    pub kind: &'static str,
    pub message: String,
}

impl fmt::Display for RunError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.kind, self.message)
    }
}

impl std::error::Error for RunError {}

impl From<CoreError> for RunError {
    fn from(e: CoreError) -> Self {
        let kind = match e {
            CoreError::Domain(_) => "domain",
            CoreError::Boundary(_) => "boundary",
            CoreError::Bracket(_) => "bracket",
            CoreError::NonConvergence(_) => "non-convergence",
            CoreError::Improper(_) => "improper",
            CoreError::Unsupported(_) => "unsupported",
        };
        RunError {
            kind,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for RunError {
    fn from(e: std::io::Error) -> Self {
        RunError {
            kind: "io",
            message: e.to_string(),
        }
    }
}

fn bad(kind: &'static str, message: impl Into<String>) -> RunError {
    RunError {
        kind,
        message: message.into(),
    }
}

const CHAIN_KEYS: &[&str] = &[
    "diff-means",
    "neyman-scott",
    "poisson-ratio",
    "bivariate-binomial",
    "trinomial-ratio",
    "loc-scale-normal",
    "uniform-shift",
    "uniform-scale",
];

/// Run a validated scenario; returns the stdout summary lines.
pub fn run_scenario(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    match sc.command {
        Command::Density | Command::Cdf | Command::Curve => run_curves(sc, out_dir),
        Command::Quantile => run_quantile(sc, out_dir),
        Command::Interval => run_interval(sc, out_dir),
        Command::Coverage => run_coverage(sc, out_dir),
        Command::Risk => run_risk(sc, out_dir),
        Command::Gfd => run_gfd(sc, out_dir),
        Command::CompareBayes => run_compare_bayes(sc, out_dir),
        Command::Sample => run_sample(sc, out_dir),
        Command::Crnef => run_crnef(sc, out_dir),
    }
}

fn out_path(sc: &Scenario, out_dir: &Path, default_name: &str) -> PathBuf {
    let name = sc.out.clone().unwrap_or_else(|| default_name.to_string());
    out_dir.join(name)
}

fn model_key(sc: &Scenario) -> Result<&str, RunError> {
    sc.model
        .as_deref()
        .ok_or_else(|| bad("scenario", "this command needs a 'model' key"))
}

fn require_n(sc: &Scenario) -> Result<u64, RunError> {
    sc.n.ok_or_else(|| bad("scenario", "this command needs the sample size 'n'"))
}

fn catalog_model(sc: &Scenario) -> Result<ModelSpec, RunError> {
    Ok(ModelSpec::from_key(model_key(sc)?, &sc.params)?)
}

fn default_variant(model: &ModelSpec) -> FiducialVariant {
    if model.discrete() {
        FiducialVariant::Geometric
    } else {
        FiducialVariant::Right
    }
}

/// The statistic: explicit `s`, or reduced from `data`.
fn statistic(sc: &Scenario, model: &ModelSpec) -> Result<f64, RunError> {
    if let Some(&s) = sc.stat.first() {
        if sc.stat.len() > 1 {
            return Err(bad(
                "scenario",
                "catalog models take a scalar statistic 's'",
            ));
        }
        return Ok(s);
    }
    if sc.data.is_empty() {
        return Err(bad("scenario", "need either 's' or 'data'"));
    }
    Ok(model.sufficient_stat().apply(model, &sc.data))
}

/// A named univariate target distribution.
type Target = (String, Box<dyn Distribution1D>);

fn chain_joint(sc: &Scenario, key: &str) -> Result<JointFiducial, RunError> {
    let need_data = |len: usize, what: &str| -> Result<(), RunError> {
        if sc.data.len() != len {
            return Err(bad("scenario", format!("'{key}' needs data = {what}")));
        }
        Ok(())
    };
    let variant = sc.variant.unwrap_or(FiducialVariant::Geometric);
    let joint = match key {
        "diff-means" => {
            need_data(2, "s1, s2")?;
            let sigma2 = *sc
                .params
                .get("sigma2")
                .ok_or_else(|| bad("scenario", "'diff-means' needs sigma2"))?;
            build_joint(&chains::diff_means(require_n(sc)?, sigma2)?, &sc.data)?
        }
        "neyman-scott" => {
            if sc.data.len() < 2 || !sc.data.len().is_multiple_of(2) {
                return Err(bad(
                    "scenario",
                    "'neyman-scott' needs data = x11, x12, x21, x22, ... (pairs)",
                ));
            }
            let pairs: Vec<(f64, f64)> = sc.data.chunks(2).map(|c| (c[0], c[1])).collect();
            let n = pairs.len() as u64;
            let w: f64 = pairs.iter().map(|(a, b)| (a - b) * (a - b)).sum();
            let mut chain_data = vec![w];
            chain_data.extend(pairs.iter().map(|(a, b)| 0.5 * (a + b)));
            build_joint(&chains::neyman_scott(n)?, &chain_data)?
        }
        "poisson-ratio" => {
            need_data(2, "s1, s2")?;
            build_joint(&chains::poisson_ratio(require_n(sc)?, variant)?, &sc.data)?
        }
        "bivariate-binomial" => {
            need_data(2, "r, s")?;
            let m = *sc
                .params
                .get("m")
                .ok_or_else(|| bad("scenario", "'bivariate-binomial' needs m"))?;
            build_joint(&chains::bivariate_binomial(m as u64, variant)?, &sc.data)?
        }
        "trinomial-ratio" => {
            need_data(2, "x1, x2")?;
            build_joint(&chains::trinomial_ratio(require_n(sc)?, variant)?, &sc.data)?
        }
        "loc-scale-normal" => {
            if sc.data.len() < 2 {
                return Err(bad(
                    "scenario",
                    "'loc-scale-normal' needs a raw sample in 'data'",
                ));
            }
            build_joint(&chains::normal_loc_scale(), &sc.data)?
        }
        "uniform-shift" => {
            if sc.data.is_empty() {
                return Err(bad(
                    "scenario",
                    "'uniform-shift' needs a raw sample in 'data'",
                ));
            }
            build_joint(&chains::uniform_shift(), &sc.data)?
        }
        "uniform-scale" => {
            if sc.data.is_empty() {
                return Err(bad(
                    "scenario",
                    "'uniform-scale' needs a raw sample in 'data'",
                ));
            }
            build_joint(&chains::uniform_scale(), &sc.data)?
        }
        _ => unreachable!("caller checked the chain key"),
    };
    Ok(joint)
}

/// Resolve the scenario's target distribution(s): all four variants for
/// `variant = all` on discrete catalog models, one otherwise.
fn resolve_targets(sc: &Scenario) -> Result<Vec<Target>, RunError> {
    let key = model_key(sc)?;
    // Chain keys resolve to the marginal of the parameter of interest,
    // except uniform-scale/uniform-shift raw samples which are 1-d anyway.
    if CHAIN_KEYS.contains(&key) {
        let joint = chain_joint(sc, key)?;
        let marg = joint.marginal_of_interest()?;
        let tag = if joint.order_invariant {
            "order-invariant"
        } else {
            "order-dependent"
        };
        return Ok(vec![(format!("{key}:{} ({tag})", joint.names()[0]), marg)]);
    }
    let model = catalog_model(sc)?;
    let n = require_n(sc)?;
    let s = statistic(sc, &model)?;
    if sc.variant_all {
        if !model.discrete() {
            return Err(bad(
                "scenario",
                "variant = all applies to discrete models only",
            ));
        }
        let mut out: Vec<Target> = Vec::new();
        for v in [
            FiducialVariant::Right,
            FiducialVariant::Left,
            FiducialVariant::Arithmetic,
            FiducialVariant::Geometric,
        ] {
            out.push((v.key().to_string(), Box::new(fiducial(&model, n, s, v)?)));
        }
        Ok(out)
    } else {
        let v = sc.variant.unwrap_or_else(|| default_variant(&model));
        Ok(vec![(
            v.key().to_string(),
            Box::new(fiducial(&model, n, s, v)?),
        )])
    }
}

/// The evaluation grid: explicit, or the central 0.9999 mass of the targets.
fn make_grid(sc: &Scenario, targets: &[Target]) -> Result<Vec<f64>, RunError> {
    if let Some((lo, hi, points)) = sc.grid {
        return Ok((0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect());
    }
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for (_, d) in targets {
        lo = lo.min(d.quantile(5e-5)?);
        hi = hi.max(d.quantile(1.0 - 5e-5)?);
    }
    Ok((0..401)
        .map(|i| lo + (hi - lo) * i as f64 / 400.0)
        .collect())
}

fn run_curves(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let targets = resolve_targets(sc)?;
    let grid = make_grid(sc, &targets)?;
    let mut header: Vec<String> = vec!["theta".into()];
    for (label, _) in &targets {
        match sc.command {
            Command::Density => header.push(format!("pdf_{label}")),
            Command::Cdf => header.push(format!("cdf_{label}")),
            _ => {
                header.push(format!("pdf_{label}"));
                header.push(format!("cdf_{label}"));
                header.push(format!("cc_{label}"));
            }
        }
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header_refs);
    let cdfs: Vec<Vec<f64>> = targets.iter().map(|(_, d)| d.cdf_grid(&grid)).collect();
    for (i, &x) in grid.iter().enumerate() {
        let mut row = vec![x];
        for (t, (_, d)) in targets.iter().enumerate() {
            match sc.command {
                Command::Density => row.push(d.pdf(x)),
                Command::Cdf => row.push(cdfs[t][i]),
                _ => {
                    row.push(d.pdf(x));
                    row.push(cdfs[t][i]);
                    row.push((1.0 - 2.0 * cdfs[t][i]).abs());
                }
            }
        }
        csv.row(&row);
    }
    let path = out_path(sc, out_dir, &format!("{}.csv", sc.command.key()));
    csv.write_to(&path)?;
    Ok(vec![format!(
        "{} curve(s) on {} grid points -> {}",
        targets.len(),
        grid.len(),
        path.display()
    )])
}

fn run_quantile(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let targets = resolve_targets(sc)?;
    let mut header: Vec<String> = vec!["p".into()];
    for (label, _) in &targets {
        header.push(format!("q_{label}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header_refs);
    let mut lines = Vec::new();
    for &p in &sc.levels {
        let mut row = vec![p];
        for (label, d) in &targets {
            let q = d.quantile(p)?;
            row.push(q);
            lines.push(format!("q_{label}({p}) = {q}"));
        }
        csv.row(&row);
    }
    let path = out_path(sc, out_dir, "quantile.csv");
    csv.write_to(&path)?;
    lines.push(format!("-> {}", path.display()));
    Ok(lines)
}

fn run_interval(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let targets = resolve_targets(sc)?;
    let mut header: Vec<String> = vec!["level".into()];
    for (label, _) in &targets {
        header.push(format!("lo_{label}"));
        header.push(format!("hi_{label}"));
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    let mut csv = Csv::new(&header_refs);
    let mut lines = Vec::new();
    for &level in &sc.levels {
        let mut row = vec![level];
        for (label, d) in &targets {
            let (lo, hi) = equal_tail_interval(d.as_ref(), level)?;
            row.push(lo);
            row.push(hi);
            lines.push(format!("{label} {level}: ({lo}, {hi})"));
        }
        csv.row(&row);
    }
    let path = out_path(sc, out_dir, "interval.csv");
    csv.write_to(&path)?;
    lines.push(format!("-> {}", path.display()));
    Ok(lines)
}

fn run_coverage(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let model = catalog_model(sc)?;
    let n = require_n(sc)?;
    let theta0 = sc
        .theta0
        .ok_or_else(|| bad("scenario", "coverage needs 'theta0'"))?;
    let variant = sc.variant.unwrap_or_else(|| default_variant(&model));
    let seed = sc.seed.expect("validated");
    let report = pit_uniformity(&model, n, theta0, variant, &sc.levels, sc.replicates, seed)?;
    let mut csv = Csv::new(&["level", "coverage", "mean_length"]);
    for i in 0..report.levels.len() {
        csv.row(&[report.levels[i], report.coverage[i], report.mean_length[i]]);
    }
    let path = out_path(sc, out_dir, "coverage.csv");
    csv.write_to(&path)?;
    let band = 1.63 / (report.replicates as f64).sqrt();
    Ok(vec![
        format!(
            "model {} variant {} theta0 {theta0} replicates {} seed {seed}",
            report.model_id,
            variant.key(),
            report.replicates
        ),
        format!("KS statistic = {} (1% band {band})", report.ks_stat),
        format!("-> {}", path.display()),
    ])
}

fn run_risk(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let model = catalog_model(sc)?;
    let n = require_n(sc)?;
    let mu_grid: Vec<f64> = match sc.grid {
        Some((lo, hi, points)) => (0..points)
            .map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64)
            .collect(),
        None => match model.key() {
            "binomial" => (1..=10).map(|i| i as f64 / 11.0).collect(),
            _ => (1..=10).map(|i| 0.5 * i as f64).collect(),
        },
    };
    let report = confidence_risk_gap(&model, n, &mu_grid)?;
    let mut csv = Csv::new(&["mu", "gap", "analytic"]);
    let mut worst = 0.0_f64;
    for (mu, gap) in report.mu_grid.iter().zip(report.gap.iter()) {
        csv.row(&[*mu, *gap, report.analytic]);
        worst = worst.max((gap - report.analytic).abs());
    }
    let path = out_path(sc, out_dir, "risk.csv");
    csv.write_to(&path)?;
    Ok(vec![
        format!(
            "model {} n {}: analytic gap = {}, max |deviation| = {:e}",
            report.model_id, report.n, report.analytic, worst
        ),
        format!("-> {}", path.display()),
    ])
}

fn run_gfd(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let model = catalog_model(sc)?;
    if sc.data.is_empty() {
        return Err(bad("scenario", "gfd needs the raw sample in 'data'"));
    }
    let targets_for_grid: Vec<Target> = {
        let r = gfd_density(CatalogGfd::new(model.clone())?, &sc.data)?;
        vec![("r".to_string(), Box::new(r) as Box<dyn Distribution1D>)]
    };
    let grid = make_grid(sc, &targets_for_grid)?;
    let level = sc.levels.first().copied().unwrap_or(0.95);
    let (cmp, _r, _h) = compare_gfd_vs_stepwise(&model, &sc.data, &grid, level)?;
    let mut csv = Csv::new(&["theta", "r", "h", "cc_r", "cc_h"]);
    for i in 0..cmp.grid.len() {
        csv.row(&[
            cmp.grid[i],
            cmp.r_pdf[i],
            cmp.h_pdf[i],
            (1.0 - 2.0 * cmp.r_cdf[i]).abs(),
            (1.0 - 2.0 * cmp.h_cdf[i]).abs(),
        ]);
    }
    let path = out_path(sc, out_dir, "gfd.csv");
    csv.write_to(&path)?;
    Ok(vec![
        format!("sup |R − H| on the grid = {}", cmp.sup_cdf_gap),
        format!(
            "equal-tail at level {level}: r ({}, {}), h ({}, {})",
            cmp.r_interval.0, cmp.r_interval.1, cmp.h_interval.0, cmp.h_interval.1
        ),
        format!("-> {}", path.display()),
    ])
}

fn run_compare_bayes(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let key = model_key(sc)?;
    let (label, fid, post): (String, Box<dyn Distribution1D>, Box<dyn Distribution1D>) = match key {
        "neyman-scott" => {
            let joint = chain_joint(sc, key)?;
            let pairs: Vec<(f64, f64)> = sc.data.chunks(2).map(|c| (c[0], c[1])).collect();
            (
                "sigma2".into(),
                joint.marginal_of_interest()?,
                neyman_scott_sigma2_posterior(&pairs)?,
            )
        }
        "trinomial-ratio" => {
            let joint = chain_joint(sc, key)?;
            (
                "phi1".into(),
                joint.marginal_of_interest()?,
                trinomial_ratio_reference_posterior(sc.data[0], sc.data[1])?,
            )
        }
        _ => {
            let model = catalog_model(sc)?;
            let prior = sc.prior.unwrap_or(Prior::Jeffreys);
            let variant = sc.variant.unwrap_or_else(|| default_variant(&model));
            let n = require_n(sc)?;
            if sc.stat.is_empty() && !sc.data.is_empty() {
                let post = bayes_posterior_sample(&model, prior, &sc.data)?;
                let s = model.sufficient_stat().apply(&model, &sc.data);
                let f = fiducial(&model, n, s, variant)?;
                (variant.key().into(), Box::new(f), post)
            } else {
                let s = statistic(sc, &model)?;
                let f = fiducial(&model, n, s, variant)?;
                let post = bayes_posterior_stat(&model, n, prior, s)?;
                (variant.key().into(), Box::new(f), post)
            }
        }
    };
    let targets = vec![(label, fid)];
    let grid = make_grid(sc, &targets)?;
    let (label, fid) = &targets[0];
    let gap = fiducial_bayes_gap(fid.as_ref(), post.as_ref(), &grid);
    let mut csv = Csv::new(&["theta", "fiducial_cdf", "posterior_cdf"]);
    let fc = fid.cdf_grid(&grid);
    let pc = post.cdf_grid(&grid);
    for i in 0..grid.len() {
        csv.row(&[grid[i], fc[i], pc[i]]);
    }
    let path = out_path(sc, out_dir, "compare-bayes.csv");
    csv.write_to(&path)?;
    Ok(vec![
        format!("{label}: sup |fiducial − posterior| = {gap:e}"),
        format!("-> {}", path.display()),
    ])
}

fn run_sample(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let seed = sc.seed.expect("validated");
    let key = model_key(sc)?;
    let path = out_path(sc, out_dir, "sample.csv");
    if CHAIN_KEYS.contains(&key) {
        let joint = chain_joint(sc, key)?;
        let draws = joint.sample_many(sc.replicates, seed)?;
        let names: Vec<&str> = joint.names().iter().map(String::as_str).collect();
        let mut csv = Csv::new(&names);
        for row in &draws {
            csv.row(row);
        }
        csv.write_to(&path)?;
        return Ok(vec![format!(
            "{} joint draws of ({}) -> {}",
            draws.len(),
            joint.names().join(", "),
            path.display()
        )]);
    }
    let targets = resolve_targets(sc)?;
    let (label, dist) = &targets[0];
    let mut csv = Csv::new(&[label.as_str()]);
    for i in 0..sc.replicates {
        let mut rng = fid_core::numerics::rng::SplitMix64::stream(seed, i as u64);
        csv.row(&[dist.sample(&mut rng)?]);
    }
    csv.write_to(&path)?;
    Ok(vec![format!(
        "{} draws of {label} -> {}",
        sc.replicates,
        path.display()
    )])
}

fn crnef_spec(sc: &Scenario) -> Result<CrNefSpec, RunError> {
    let key = model_key(sc)?;
    let d = *sc
        .params
        .get("d")
        .ok_or_else(|| bad("scenario", "crnef needs the dimension 'd'"))? as usize;
    let family = match key {
        "multinomial" => CrNefFamily::Multinomial {
            trials: *sc
                .params
                .get("trials")
                .ok_or_else(|| bad("scenario", "multinomial needs 'trials'"))?
                as u64,
        },
        "neg-multinomial" => CrNefFamily::NegMultinomial {
            r: *sc
                .params
                .get("r")
                .ok_or_else(|| bad("scenario", "neg-multinomial needs 'r'"))? as u64,
        },
        "poisson-normal" => CrNefFamily::PoissonNormal {
            m: *sc
                .params
                .get("mcomp")
                .ok_or_else(|| bad("scenario", "poisson-normal needs 'mcomp'"))?
                as usize,
            sigma2: *sc
                .params
                .get("sigma2")
                .ok_or_else(|| bad("scenario", "poisson-normal needs 'sigma2'"))?,
        },
        "nm-gamma-normal" => CrNefFamily::NegMultGammaNormal {
            m: *sc
                .params
                .get("mcomp")
                .ok_or_else(|| bad("scenario", "nm-gamma-normal needs 'mcomp'"))?
                as usize,
            r: *sc
                .params
                .get("r")
                .ok_or_else(|| bad("scenario", "nm-gamma-normal needs 'r'"))? as u64,
        },
        other => return Err(bad("scenario", format!("unknown cr-NEF family '{other}'"))),
    };
    Ok(CrNefSpec::new(family, d)?)
}

fn run_crnef(sc: &Scenario, out_dir: &Path) -> Result<Vec<String>, RunError> {
    let spec = crnef_spec(sc)?;
    let n = require_n(sc)?;
    if sc.stat.len() != spec.d {
        return Err(bad(
            "scenario",
            format!("crnef needs 's' with {} components", spec.d),
        ));
    }
    let variant = sc.variant.unwrap_or(FiducialVariant::Geometric);
    let joint = match sc.space {
        Space::Phi => joint_fiducial_phi(&spec, n, &sc.stat, variant)?,
        Space::Mu => joint_fiducial_mu(&spec, n, &sc.stat, variant)?,
        Space::P => match spec.family {
            CrNefFamily::Multinomial { trials } => {
                if variant != FiducialVariant::Geometric {
                    return Err(bad(
                        "scenario",
                        "the simplex (p) fiducial is the geometric variant",
                    ));
                }
                multinomial_p_geometric(trials, n, &sc.stat)?
            }
            _ => {
                return Err(bad(
                    "scenario",
                    "space = p is defined for the multinomial family",
                ))
            }
        },
    };
    let seed = sc.seed.expect("validated");
    let draws = joint.sample_many(sc.replicates, seed)?;
    let names: Vec<&str> = joint.names().iter().map(String::as_str).collect();
    let path = out_path(sc, out_dir, "crnef.csv");
    let mut csv = Csv::new(&names);
    for row in &draws {
        csv.row(row);
    }
    csv.write_to(&path)?;
    let mut lines = vec![format!(
        "{} draws of ({}) -> {}",
        draws.len(),
        joint.names().join(", "),
        path.display()
    )];
    // φ-space components are independent: also tabulate their marginals.
    if sc.space == Space::Phi {
        let mut mcsv = Csv::new(&["component", "x", "pdf", "cdf"]);
        for k in 0..spec.d {
            let marg = joint.conditional(k, &draws[0][..k])?;
            let lo = marg.quantile(5e-5)?;
            let hi = marg.quantile(1.0 - 5e-5)?;
            let pts: Vec<f64> = (0..201)
                .map(|i| lo + (hi - lo) * i as f64 / 200.0)
                .collect();
            let cdfs = marg.cdf_grid(&pts);
            for (i, &x) in pts.iter().enumerate() {
                mcsv.row_labeled(&format!("phi{}", k + 1), &[x, marg.pdf(x), cdfs[i]]);
            }
        }
        let mpath = out_path(sc, out_dir, "crnef.csv").with_extension("marginals.csv");
        mcsv.write_to(&mpath)?;
        lines.push(format!("phi marginals -> {}", mpath.display()));
        let prior = fiducial_prior(&spec)?;
        lines.push(format!(
            "fiducial prior at phi = 0: log density {}",
            prior.log_density(&vec![0.0; spec.d])
        ));
    }
    Ok(lines)
}
