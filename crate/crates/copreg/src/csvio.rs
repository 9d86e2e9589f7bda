//! File formats: CSV datasets and result tables, the vine text block, and
//! run manifests. All floats serialize through the shortest round-trip
//! decimal representation, so identical runs produce byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::error::{Error, Result};
use crate::experiments::{ContourGrid, MseResult, SweepRow};
use crate::fitting::FitResult;
use crate::margins::Dataset;
use crate::regression::{PopulationCurve, RegressionEstimate};
use crate::vine::{VineModel, VARIABLE_LABELS};

/// Write a dataset as `y,x1[,x2]` rows.
pub fn write_dataset(path: &Path, data: &Dataset) -> Result<()> {
    let mut s = String::new();
    s.push('y');
    for j in 0..data.d() {
        let _ = write!(s, ",x{}", j + 1);
    }
    s.push('\n');
    for i in 0..data.n() {
        let _ = write!(s, "{}", data.y[i]);
        for col in &data.x {
            let _ = write!(s, ",{}", col[i]);
        }
        s.push('\n');
    }
    std::fs::write(path, s)?;
    Ok(())
}

/// Load a dataset written by [`write_dataset`]: UTF-8, header `y,x1[,x2]`,
/// one decimal-point real per field. Malformed rows are rejected with
/// their 1-based line number.
pub fn load_dataset(path: &Path) -> Result<Dataset> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Config(format!("cannot read {}: {e}", path.display())))?;
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| Error::Config(format!("{}: empty file", path.display())))?;
    let d = match header.trim_end() {
        "y,x1" => 1,
        "y,x1,x2" => 2,
        other => {
            return Err(Error::Config(format!(
                "{}: line 1: expected header 'y,x1' or 'y,x1,x2', got '{other}'",
                path.display()
            )));
        }
    };
    let mut y = Vec::new();
    let mut x: Vec<Vec<f64>> = vec![Vec::new(); d];
    for (idx, line) in lines {
        let lineno = idx + 1;
        if line.trim().is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 1 {
            return Err(Error::Config(format!(
                "{}: line {lineno}: expected {} fields, got {}",
                path.display(),
                d + 1,
                fields.len()
            )));
        }
        let mut parsed = Vec::with_capacity(d + 1);
        for f in &fields {
            let v: f64 = f.trim().parse().map_err(|_| {
                Error::Config(format!(
                    "{}: line {lineno}: cannot parse '{f}' as a number",
                    path.display()
                ))
            })?;
            if !v.is_finite() {
                return Err(Error::Config(format!(
                    "{}: line {lineno}: non-finite value '{f}'",
                    path.display()
                )));
            }
            parsed.push(v);
        }
        y.push(parsed[0]);
        for j in 0..d {
            x[j].push(parsed[j + 1]);
        }
    }
    if y.is_empty() {
        return Err(Error::Config(format!("{}: no data rows", path.display())));
    }
    Ok(Dataset { y, x })
}

/// One fit per row: `family,rotation,params,loglik,aic,converged` with
/// parameters semicolon-joined.
pub fn fit_results_csv(fits: &[FitResult]) -> String {
    let mut s = String::from("family,rotation,params,loglik,aic,converged\n");
    for fit in fits {
        let params: Vec<String> = fit.spec.params().iter().map(|p| p.to_string()).collect();
        let _ = writeln!(
            s,
            "{},{},{},{},{},{}",
            fit.spec.family(),
            fit.spec.rotation(),
            params.join(";"),
            fit.loglik,
            fit.aic,
            fit.converged
        );
    }
    s
}

/// Regression estimate: one row per grid point with the raw query
/// coordinates, the value and the extrapolation flag.
pub fn regression_csv(est: &RegressionEstimate) -> String {
    let mut s = String::new();
    match est.grid.len() {
        1 => {
            s.push_str("x,value,extrapolation\n");
            for (k, &x) in est.grid[0].iter().enumerate() {
                let _ = writeln!(s, "{x},{},{}", est.values[k], est.extrapolation[k]);
            }
        }
        _ => {
            s.push_str("x1,x2,value,extrapolation\n");
            let g2 = est.grid[1].len();
            for (i, &x1) in est.grid[0].iter().enumerate() {
                for (j, &x2) in est.grid[1].iter().enumerate() {
                    let k = i * g2 + j;
                    let _ = writeln!(s, "{x1},{x2},{},{}", est.values[k], est.extrapolation[k]);
                }
            }
        }
    }
    s
}

/// Population regression curve rows `u,value,extrapolation` (the flag is
/// always false; population curves never extrapolate).
pub fn population_curve_csv(curve: &PopulationCurve) -> String {
    let mut s = String::from("u,value,extrapolation\n");
    for (k, &u) in curve.u_grid.iter().enumerate() {
        let _ = writeln!(s, "{u},{},false", curve.m_values[k]);
    }
    s
}

/// Pointwise MSE rows: `x,mse` or `x1,x2,mse`.
pub fn mse_csv(res: &MseResult) -> String {
    let mut s = String::new();
    match res.grid.len() {
        1 => {
            s.push_str("x,mse\n");
            for (k, &x) in res.grid[0].iter().enumerate() {
                let _ = writeln!(s, "{x},{}", res.mse[k]);
            }
        }
        _ => {
            s.push_str("x1,x2,mse\n");
            let g2 = res.grid[1].len();
            for (i, &x1) in res.grid[0].iter().enumerate() {
                for (j, &x2) in res.grid[1].iter().enumerate() {
                    let _ = writeln!(s, "{x1},{x2},{}", res.mse[i * g2 + j]);
                }
            }
        }
    }
    s
}

/// Monotonicity sweep audit table.
pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut s =
        String::from("family,rotation,tau,params,monotone,direction,max_violation,status\n");
    for row in rows {
        let params: Vec<String> = row.params.iter().map(|p| p.to_string()).collect();
        let monotone = row
            .monotone
            .map(|b| b.to_string())
            .unwrap_or_else(|| "-".to_string());
        let direction = row
            .direction
            .map(|d| d.to_string())
            .unwrap_or_else(|| "-".to_string());
        let _ = writeln!(
            s,
            "{},{},{},{},{monotone},{direction},{},{}",
            row.family,
            row.rotation,
            row.tau,
            params.join(";"),
            row.max_violation,
            row.status
        );
    }
    s
}

/// Contour grid in long format `u_y,u_x,density` over cell centers.
pub fn contour_csv(grid: &ContourGrid) -> String {
    let g = grid.grid;
    let mut s = String::from("u_y,u_x,density\n");
    for i in 0..g {
        let uy = (i as f64 + 0.5) / g as f64;
        for j in 0..g {
            let ux = (j as f64 + 0.5) / g as f64;
            let _ = writeln!(s, "{uy},{ux},{}", grid.values[i * g + j]);
        }
    }
    s
}

/// Structured text block for a vine: the center variable, then one line
/// per pair with edge label, family, rotation and parameters.
pub fn vine_text(model: &VineModel) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "center {}", model.center_label());
    let la = VARIABLE_LABELS[model.leaf_a];
    let lb = VARIABLE_LABELS[model.leaf_b];
    let c = model.center_label();
    for (edge, spec) in [
        (format!("{la}:{c}"), &model.pair_a),
        (format!("{lb}:{c}"), &model.pair_b),
        (format!("{la}:{lb}|{c}"), &model.pair_cond),
    ] {
        let params: Vec<String> = spec.params().iter().map(|p| p.to_string()).collect();
        let params = if params.is_empty() {
            "-".to_string()
        } else {
            params.join(";")
        };
        let _ = writeln!(s, "{edge} {} {} {params}", spec.family(), spec.rotation());
    }
    s
}

/// Write the resolved run configuration next to an output file as
/// `<out>.manifest`: sorted `key=value` lines. Contains no timestamps, so
/// reruns are byte-identical.
pub fn write_manifest(out: &Path, entries: &BTreeMap<String, String>) -> Result<()> {
    let mut s = String::new();
    for (k, v) in entries {
        let _ = writeln!(s, "{k}={v}");
    }
    let mut path = out.as_os_str().to_owned();
    path.push(".manifest");
    std::fs::write(Path::new(&path), s)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dataset_round_trip() {
        let dir = std::env::temp_dir().join("copreg-csvio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("rt.csv");
        let data = Dataset {
            y: vec![0.1, -2.5, 3.0e-7],
            x: vec![vec![0.5, 0.25, 1.0 / 3.0]],
        };
        write_dataset(&path, &data).unwrap();
        let back = load_dataset(&path).unwrap();
        assert_eq!(back, data);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn two_predictor_header_infers_d() {
        let dir = std::env::temp_dir().join("copreg-csvio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("d2.csv");
        std::fs::write(&path, "y,x1,x2\n1.0,0.5,0.25\n2.0,0.1,0.9\n").unwrap();
        let data = load_dataset(&path).unwrap();
        assert_eq!(data.d(), 2);
        assert_eq!(data.n(), 2);
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn malformed_rows_report_line_numbers() {
        let dir = std::env::temp_dir().join("copreg-csvio-test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("bad.csv");
        std::fs::write(&path, "y,x1\n1.0,0.5\n2.0\n").unwrap();
        let err = load_dataset(&path).unwrap_err().to_string();
        assert!(err.contains("line 3"), "{err}");
        std::fs::write(&path, "y,x1\n1.0,zebra\n").unwrap();
        let err = load_dataset(&path).unwrap_err().to_string();
        assert!(err.contains("line 2"), "{err}");
        std::fs::write(&path, "").unwrap();
        assert!(load_dataset(&path).is_err());
        std::fs::remove_file(&path).unwrap();
    }

    #[test]
    fn vine_block_shape() {
        let model = VineModel::independence();
        let text = vine_text(&model);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 4);
        assert_eq!(lines[0], "center x1");
        assert_eq!(lines[1], "y:x1 indep 0 -");
        assert_eq!(lines[3], "y:x2|x1 indep 0 -");
    }
}
