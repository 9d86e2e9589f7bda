//! Command-line interface: `simulate`, `fit`, `regress`, `vine`, `mse`,
//! `sweep` and `contour` subcommands wiring the library together.
//!
//! Flag precedence is flags over `--config` file entries over built-in
//! defaults. Every run writes a `<out>.manifest` with the fully resolved
//! configuration, and all randomness flows from the resolved seed.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::copula::{CopulaSpec, FamilyId, Rotation};
use crate::csvio;
use crate::error::{Error, Result};
use crate::experiments::{
    contour_density, default_sweep_families, default_sweep_taus, monotonicity_sweep, run_mse_study,
    simulate_dgp, DgpModel, DgpSpec, EstimatorConfig, EstimatorKind,
};
use crate::fitting::{
    default_candidates_d1, default_candidates_vine, fit_l2, fit_pml, select_by_aic, FitMethod,
};
use crate::margins::{ecdf_transform, Dataset};
use crate::regression::{estimate_regression_1d, estimate_regression_2d};
use crate::vine::{fit_tied_vine, fit_vine};

#[derive(Parser)]
#[command(name = "copreg", version, about = "Copula-based regression toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a dataset from one of the built-in regression models.
    Simulate(CommonArgs),
    /// Fit a copula family to a dataset by pseudo-likelihood or L2.
    Fit(CommonArgs),
    /// Fit and evaluate the regression estimate on a grid.
    Regress(CommonArgs),
    /// Fit a three-variable pair-copula construction.
    Vine(CommonArgs),
    /// Monte Carlo pointwise MSE study of an estimator.
    Mse(CommonArgs),
    /// Monotonicity audit of population regression curves over families.
    Sweep(CommonArgs),
    /// Kernel density contour grid of a simulated copula.
    Contour(CommonArgs),
}

#[derive(Args, Default)]
struct CommonArgs {
    /// Flat key=value config file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Model id: m1, m2, m3, m5, xsin, expcos.
    #[arg(long)]
    model: Option<String>,
    /// Sample size (or contour sample size).
    #[arg(long)]
    n: Option<String>,
    /// Noise standard deviation.
    #[arg(long)]
    sigma: Option<String>,
    /// Seed (base seed for replicated studies).
    #[arg(long)]
    seed: Option<String>,
    /// Input dataset path (alternative to --model simulation).
    #[arg(long)]
    data: Option<String>,
    /// Copula family label like `clayton@180`, or `vine` / `auto-aic` /
    /// `oracle` where an estimator is expected.
    #[arg(long)]
    family: Option<String>,
    /// Rotation in degrees (0, 90, 180, 270) if not given via `@`.
    #[arg(long)]
    rotation: Option<String>,
    /// Fit criterion: pml or l2.
    #[arg(long)]
    fit: Option<String>,
    /// Number of Monte Carlo replications.
    #[arg(long)]
    reps: Option<String>,
    /// Grid points per predictor dimension (or contour cells per axis).
    #[arg(long)]
    grid: Option<String>,
    /// Output file path.
    #[arg(long)]
    out: Option<String>,
    /// Candidate list: `default` or comma-separated family labels.
    #[arg(long)]
    candidates: Option<String>,
    /// Worker threads for replicated studies.
    #[arg(long)]
    workers: Option<String>,
    /// Kernel bandwidth: `auto` or a positive number.
    #[arg(long)]
    bandwidth: Option<String>,
    /// Comma-separated Kendall tau targets for the sweep.
    #[arg(long)]
    taus: Option<String>,
    /// Quadrature nodes for population curves.
    #[arg(long)]
    nodes: Option<String>,
}

/// Run the CLI; `argv` includes the program name.
pub fn run<I, T>(argv: I) -> Result<()>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    print!("{e}");
                    Ok(())
                }
                _ => Err(Error::Config(e.to_string())),
            };
        }
    };
    match cli.command {
        Command::Simulate(a) => cmd_simulate(a),
        Command::Fit(a) => cmd_fit(a),
        Command::Regress(a) => cmd_regress(a),
        Command::Vine(a) => cmd_vine(a),
        Command::Mse(a) => cmd_mse(a),
        Command::Sweep(a) => cmd_sweep(a),
        Command::Contour(a) => cmd_contour(a),
    }
}

/// Flag / config-file / default precedence with a manifest of everything
/// that was resolved.
struct Resolver {
    file: BTreeMap<String, String>,
    manifest: BTreeMap<String, String>,
}

impl Resolver {
    fn new(command: &str, config: &Option<PathBuf>) -> Result<Resolver> {
        let mut file = BTreeMap::new();
        if let Some(path) = config {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
            for (idx, line) in text.lines().enumerate() {
                let line = line.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (k, v) = line.split_once('=').ok_or_else(|| {
                    Error::Config(format!(
                        "{}: line {}: expected key=value",
                        path.display(),
                        idx + 1
                    ))
                })?;
                file.insert(k.trim().to_string(), v.trim().to_string());
            }
        }
        let mut manifest = BTreeMap::new();
        manifest.insert("command".to_string(), command.to_string());
        manifest.insert("version".to_string(), env!("CARGO_PKG_VERSION").to_string());
        Ok(Resolver { file, manifest })
    }

    fn raw(&mut self, key: &str, flag: &Option<String>) -> Option<String> {
        let v = flag.clone().or_else(|| self.file.get(key).cloned());
        if let Some(ref v) = v {
            self.manifest.insert(key.to_string(), v.clone());
        }
        v
    }

    fn str_or(&mut self, key: &str, flag: &Option<String>, default: &str) -> String {
        match self.raw(key, flag) {
            Some(v) => v,
            None => {
                self.manifest.insert(key.to_string(), default.to_string());
                default.to_string()
            }
        }
    }

    fn str_req(&mut self, key: &str, flag: &Option<String>) -> Result<String> {
        self.raw(key, flag)
            .ok_or_else(|| Error::Config(format!("missing required option --{key}")))
    }

    fn parse_or<T: std::str::FromStr + ToString>(
        &mut self,
        key: &str,
        flag: &Option<String>,
        default: T,
    ) -> Result<T> {
        match self.raw(key, flag) {
            Some(v) => v
                .parse()
                .map_err(|_| Error::Config(format!("cannot parse --{key} value '{v}'"))),
            None => {
                self.manifest.insert(key.to_string(), default.to_string());
                Ok(default)
            }
        }
    }

    fn note(&mut self, key: &str, value: impl ToString) {
        self.manifest.insert(key.to_string(), value.to_string());
    }

    fn finish(&self, out: &Path) -> Result<()> {
        csvio::write_manifest(out, &self.manifest)
    }
}

/// Estimator named by `--family`.
enum EstimatorFlag {
    Oracle,
    Vine,
    AutoAic,
    Spec(FamilyId, Rotation),
}

fn parse_estimator(family: &str, rotation: &Option<String>) -> Result<EstimatorFlag> {
    match family {
        "oracle" => Ok(EstimatorFlag::Oracle),
        "vine" => Ok(EstimatorFlag::Vine),
        "auto-aic" => Ok(EstimatorFlag::AutoAic),
        label => {
            let (fam, rot) = CopulaSpec::parse_label(label)?;
            match (label.contains('@'), rotation) {
                (true, Some(_)) => Err(Error::Config(
                    "give the rotation either via '@' or --rotation, not both".into(),
                )),
                (false, Some(r)) => Ok(EstimatorFlag::Spec(fam, Rotation::parse(r)?)),
                _ => Ok(EstimatorFlag::Spec(fam, rot)),
            }
        }
    }
}

fn parse_candidates(
    spec: &str,
    default: fn() -> Vec<(FamilyId, Rotation)>,
) -> Result<Vec<(FamilyId, Rotation)>> {
    if spec == "default" {
        return Ok(default());
    }
    spec.split(',')
        .map(|s| CopulaSpec::parse_label(s.trim()))
        .collect()
}

/// Dataset from `--data` or simulated from `--model`; returns the data
/// and records the source in the manifest.
fn resolve_input(r: &mut Resolver, a: &CommonArgs) -> Result<Dataset> {
    if let Some(path) = r.raw("data", &a.data) {
        if a.model.is_some() {
            return Err(Error::Config(
                "give either --data or --model, not both".into(),
            ));
        }
        return load_dataset_checked(Path::new(&path));
    }
    let model = DgpModel::parse(&r.str_req("model", &a.model)?)?;
    let n: usize = r.parse_or("n", &a.n, 100)?;
    let sigma: f64 = r.parse_or("sigma", &a.sigma, 0.1)?;
    let seed: u64 = r.parse_or("seed", &a.seed, 1)?;
    Ok(simulate_dgp(&DgpSpec::new(model, n, sigma, seed)?))
}

fn load_dataset_checked(path: &Path) -> Result<Dataset> {
    if !path.exists() {
        return Err(Error::Config(format!(
            "dataset {} does not exist",
            path.display()
        )));
    }
    csvio::load_dataset(path)
}

fn out_path(r: &mut Resolver, a: &CommonArgs) -> Result<PathBuf> {
    Ok(PathBuf::from(r.str_req("out", &a.out)?))
}

/// Closed per-dimension query grids spanning the observed data range.
fn data_grids(data: &Dataset, count: usize) -> Result<Vec<Vec<f64>>> {
    if count < 2 {
        return Err(Error::Config(format!(
            "grid needs at least 2 points, got {count}"
        )));
    }
    let mut grids = Vec::with_capacity(data.d());
    for col in &data.x {
        let lo = col.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = col.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        if lo >= hi || lo.is_nan() || hi.is_nan() {
            return Err(Error::Numeric("degenerate predictor column".into()));
        }
        grids.push(
            (0..count)
                .map(|k| lo + (hi - lo) * k as f64 / (count as f64 - 1.0))
                .collect(),
        );
    }
    Ok(grids)
}

fn cmd_simulate(a: CommonArgs) -> Result<()> {
    let mut r = Resolver::new("simulate", &a.config)?;
    let model = DgpModel::parse(&r.str_req("model", &a.model)?)?;
    let n: usize = r.parse_or("n", &a.n, 100)?;
    let sigma: f64 = r.parse_or("sigma", &a.sigma, 0.1)?;
    let seed: u64 = r.parse_or("seed", &a.seed, 1)?;
    let out = out_path(&mut r, &a)?;
    let data = simulate_dgp(&DgpSpec::new(model, n, sigma, seed)?);
    csvio::write_dataset(&out, &data)?;
    r.finish(&out)
}

fn cmd_fit(a: CommonArgs) -> Result<()> {
    let mut r = Resolver::new("fit", &a.config)?;
    let family = r.str_req("family", &a.family)?;
    let rotation_flag = r.raw("rotation", &a.rotation);
    let method = FitMethod::parse(&r.str_or("fit", &a.fit, "pml"))?;
    let estimator = parse_estimator(&family, &rotation_flag)?;
    let data = resolve_input(&mut r, &a)?;
    let out = out_path(&mut r, &a)?;
    let pseudo = ecdf_transform(&data)?;

    let fit = match (estimator, data.d()) {
        (EstimatorFlag::Spec(fam, rot), 1) => match method {
            FitMethod::Pml => fit_pml(fam, rot, &pseudo.pairs_with_predictor(0))?,
            FitMethod::L2 => fit_l2(fam, rot, &pseudo)?,
        },
        (EstimatorFlag::AutoAic, 1) => {
            if method == FitMethod::L2 {
                return Err(Error::Config(
                    "AIC selection is defined for the pseudo-likelihood fit only".into(),
                ));
            }
            let cands = parse_candidates(
                &r.str_or("candidates", &a.candidates, "default"),
                default_candidates_d1,
            )?;
            select_by_aic(&cands, &pseudo.pairs_with_predictor(0))?
        }
        (EstimatorFlag::Spec(fam, rot), 2) => {
            if method == FitMethod::L2 {
                return Err(Error::Config(
                    "the L2 criterion is defined for one predictor only".into(),
                ));
            }
            fit_tied_vine(&pseudo, fam, rot)?.1
        }
        (EstimatorFlag::AutoAic, _) => {
            return Err(Error::Config("auto-aic fitting needs one predictor".into()));
        }
        (EstimatorFlag::Vine, _) => {
            return Err(Error::Config(
                "use the `vine` subcommand to fit a vine".into(),
            ));
        }
        (EstimatorFlag::Oracle, _) => {
            return Err(Error::Config("the oracle is not a fittable family".into()));
        }
        (EstimatorFlag::Spec(..), d) => {
            return Err(Error::Config(format!(
                "unsupported predictor dimension {d}"
            )));
        }
    };
    r.note("fitted_params", {
        let p: Vec<String> = fit.spec.params().iter().map(|v| v.to_string()).collect();
        p.join(";")
    });
    r.note("fitted_family", fit.spec.label());
    std::fs::write(&out, csvio::fit_results_csv(&[fit]))?;
    r.finish(&out)
}

fn cmd_regress(a: CommonArgs) -> Result<()> {
    let mut r = Resolver::new("regress", &a.config)?;
    let family = r.str_req("family", &a.family)?;
    let rotation_flag = r.raw("rotation", &a.rotation);
    let method = FitMethod::parse(&r.str_or("fit", &a.fit, "pml"))?;
    let grid_count: usize = r.parse_or("grid", &a.grid, 101)?;
    let estimator = parse_estimator(&family, &rotation_flag)?;
    let data = resolve_input(&mut r, &a)?;
    let out = out_path(&mut r, &a)?;
    let pseudo = ecdf_transform(&data)?;
    let grids = data_grids(&data, grid_count)?;

    let est = match (estimator, data.d()) {
        (EstimatorFlag::Spec(fam, rot), 1) => {
            let fit = match method {
                FitMethod::Pml => fit_pml(fam, rot, &pseudo.pairs_with_predictor(0))?,
                FitMethod::L2 => fit_l2(fam, rot, &pseudo)?,
            };
            r.note("fitted_family", fit.spec.label());
            estimate_regression_1d(&fit.spec, &pseudo, &grids[0])?
        }
        (EstimatorFlag::AutoAic, 1) => {
            let cands = parse_candidates(
                &r.str_or("candidates", &a.candidates, "default"),
                default_candidates_d1,
            )?;
            if method == FitMethod::L2 {
                return Err(Error::Config(
                    "AIC selection is defined for the pseudo-likelihood fit only".into(),
                ));
            }
            let fit = select_by_aic(&cands, &pseudo.pairs_with_predictor(0))?;
            r.note("fitted_family", fit.spec.label());
            estimate_regression_1d(&fit.spec, &pseudo, &grids[0])?
        }
        (EstimatorFlag::Spec(fam, rot), 2) => {
            if method == FitMethod::L2 {
                return Err(Error::Config(
                    "the L2 criterion is defined for one predictor only".into(),
                ));
            }
            let (model, fit) = fit_tied_vine(&pseudo, fam, rot)?;
            r.note("fitted_family", fit.spec.label());
            estimate_regression_2d(
                |w0, w1, w2| model.log_density(w0, w1, w2).exp(),
                &pseudo,
                &grids[0],
                &grids[1],
            )?
        }
        (EstimatorFlag::Vine, 2) => {
            let cands = parse_candidates(
                &r.str_or("candidates", &a.candidates, "default"),
                default_candidates_vine,
            )?;
            let model = fit_vine(&pseudo, &cands)?;
            r.note("vine_center", model.center_label());
            estimate_regression_2d(
                |w0, w1, w2| model.log_density(w0, w1, w2).exp(),
                &pseudo,
                &grids[0],
                &grids[1],
            )?
        }
        (EstimatorFlag::Vine, _) => {
            return Err(Error::Config(
                "the vine estimator needs two predictors".into(),
            ));
        }
        (EstimatorFlag::Oracle, _) => {
            return Err(Error::Config(
                "the oracle estimator is only meaningful inside `mse`".into(),
            ));
        }
        (_, d) => {
            return Err(Error::Config(format!(
                "unsupported predictor dimension {d}"
            )));
        }
    };
    std::fs::write(&out, csvio::regression_csv(&est))?;
    r.finish(&out)
}

fn cmd_vine(a: CommonArgs) -> Result<()> {
    let mut r = Resolver::new("vine", &a.config)?;
    let data = resolve_input(&mut r, &a)?;
    let out = out_path(&mut r, &a)?;
    if data.d() != 2 {
        return Err(Error::Config(format!(
            "vine fitting needs two predictors, dataset has d={}",
            data.d()
        )));
    }
    let cands = parse_candidates(
        &r.str_or("candidates", &a.candidates, "default"),
        default_candidates_vine,
    )?;
    let pseudo = ecdf_transform(&data)?;
    let model = fit_vine(&pseudo, &cands)?;
    std::fs::write(&out, csvio::vine_text(&model))?;
    r.finish(&out)
}

fn cmd_mse(a: CommonArgs) -> Result<()> {
    let mut r = Resolver::new("mse", &a.config)?;
    let model = DgpModel::parse(&r.str_req("model", &a.model)?)?;
    let n: usize = r.parse_or("n", &a.n, 100)?;
    let sigma: f64 = r.parse_or("sigma", &a.sigma, 0.1)?;
    let seed: u64 = r.parse_or("seed", &a.seed, 1)?;
    let reps: usize = r.parse_or("reps", &a.reps, 1000)?;
    let grid_count: usize = r.parse_or("grid", &a.grid, 101)?;
    let workers: usize = r.parse_or("workers", &a.workers, 1)?;
    let family = r.str_req("family", &a.family)?;
    let rotation_flag = r.raw("rotation", &a.rotation);
    let method = FitMethod::parse(&r.str_or("fit", &a.fit, "pml"))?;
    let out = out_path(&mut r, &a)?;

    let kind = match parse_estimator(&family, &rotation_flag)? {
        EstimatorFlag::Oracle => EstimatorKind::Oracle,
        EstimatorFlag::Spec(fam, rot) => EstimatorKind::Single {
            family: fam,
            rotation: rot,
        },
        EstimatorFlag::AutoAic => EstimatorKind::AutoAic {
            candidates: parse_candidates(
                &r.str_or("candidates", &a.candidates, "default"),
                default_candidates_d1,
            )?,
        },
        EstimatorFlag::Vine => EstimatorKind::Vine {
            candidates: parse_candidates(
                &r.str_or("candidates", &a.candidates, "default"),
                default_candidates_vine,
            )?,
        },
    };
    let estimator = EstimatorConfig { kind, fit: method };
    r.note("estimator", estimator.label());

    let dgp = DgpSpec::new(model, n, sigma, seed)?;
    let grids: Vec<Vec<f64>> = (0..model.d())
        .map(|_| crate::regression::closed_grid(grid_count))
        .collect();
    let res = run_mse_study(&dgp, &estimator, reps, &grids, seed, workers)?;
    for w in &res.warnings {
        eprintln!("warning: {w}");
    }
    r.note("reps_used", res.reps_used);
    std::fs::write(&out, csvio::mse_csv(&res))?;
    r.finish(&out)
}

fn cmd_sweep(a: CommonArgs) -> Result<()> {
    let mut r = Resolver::new("sweep", &a.config)?;
    let grid_points: usize = r.parse_or("grid", &a.grid, 101)?;
    let nodes: usize = r.parse_or("nodes", &a.nodes, 64)?;
    let workers: usize = r.parse_or("workers", &a.workers, 1)?;
    let out = out_path(&mut r, &a)?;

    let families = match r.str_or("candidates", &a.candidates, "default").as_str() {
        "default" => default_sweep_families(),
        list => list
            .split(',')
            .map(|s| FamilyId::parse(s.trim()))
            .collect::<Result<Vec<_>>>()?,
    };
    let taus = match r.raw("taus", &a.taus) {
        None => {
            let d = default_sweep_taus();
            r.note(
                "taus",
                d.iter()
                    .map(|t| t.to_string())
                    .collect::<Vec<_>>()
                    .join(","),
            );
            d
        }
        Some(list) => list
            .split(',')
            .map(|s| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Config(format!("cannot parse tau '{s}'")))
            })
            .collect::<Result<Vec<_>>>()?,
    };
    let rows = monotonicity_sweep(
        &families,
        &Rotation::ALL,
        &taus,
        grid_points,
        nodes,
        workers,
    )?;
    std::fs::write(&out, csvio::sweep_csv(&rows))?;
    r.finish(&out)
}

fn cmd_contour(a: CommonArgs) -> Result<()> {
    let mut r = Resolver::new("contour", &a.config)?;
    let model = DgpModel::parse(&r.str_req("model", &a.model)?)?;
    let n: usize = r.parse_or("n", &a.n, 100_000)?;
    let sigma: f64 = r.parse_or("sigma", &a.sigma, 0.1)?;
    let seed: u64 = r.parse_or("seed", &a.seed, 1)?;
    let grid: usize = r.parse_or("grid", &a.grid, 50)?;
    let bandwidth = match r.str_or("bandwidth", &a.bandwidth, "auto").as_str() {
        "auto" => None,
        v => Some(
            v.parse::<f64>()
                .map_err(|_| Error::Config(format!("cannot parse bandwidth '{v}'")))?,
        ),
    };
    let out = out_path(&mut r, &a)?;
    let dgp = DgpSpec::new(model, n, sigma, seed)?;
    let cg = contour_density(&dgp, grid, bandwidth)?;
    r.note(
        "bandwidth_used",
        format!("{};{}", cg.bandwidth.0, cg.bandwidth.1),
    );
    std::fs::write(&out, csvio::contour_csv(&cg))?;
    r.finish(&out)
}
