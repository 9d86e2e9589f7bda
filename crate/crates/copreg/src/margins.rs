//! Rank-based nonparametric marginal estimation. Every marginal CDF is
//! estimated by the rescaled empirical CDF with an `n + 1` denominator,
//! so pseudo-observations stay strictly inside the unit interval.

use crate::error::{Error, Result};

/// A raw regression dataset: response column `y` plus `d` predictor
/// columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub y: Vec<f64>,
    pub x: Vec<Vec<f64>>,
}

impl Dataset {
    pub fn n(&self) -> usize {
        self.y.len()
    }

    pub fn d(&self) -> usize {
        self.x.len()
    }
}

/// Rank-transformed observations on the unit hypercube together with the
/// raw columns they came from (the raw predictors are needed to evaluate
/// the marginal CDFs at new query points).
#[derive(Debug, Clone)]
pub struct PseudoSample {
    pub y_raw: Vec<f64>,
    pub u_y: Vec<f64>,
    pub x_raw: Vec<Vec<f64>>,
    pub u_x: Vec<Vec<f64>>,
}

impl PseudoSample {
    pub fn n(&self) -> usize {
        self.y_raw.len()
    }

    pub fn d(&self) -> usize {
        self.x_raw.len()
    }

    /// Pairs `(u_y_i, u_xj_i)` for the predictor column `j`.
    pub fn pairs_with_predictor(&self, j: usize) -> Vec<(f64, f64)> {
        self.u_y
            .iter()
            .zip(&self.u_x[j])
            .map(|(&a, &b)| (a, b))
            .collect()
    }
}

/// Transform every column of a dataset to pseudo-observations
/// `count(values <= x) / (n + 1)`. Ties share the maximal count, which is
/// the indicator definition applied literally.
pub fn ecdf_transform(data: &Dataset) -> Result<PseudoSample> {
    let n = data.n();
    if n < 2 {
        return Err(Error::Size(format!(
            "pseudo-observations need at least 2 rows, got {n}"
        )));
    }
    for (j, col) in data.x.iter().enumerate() {
        if col.len() != n {
            return Err(Error::Size(format!(
                "predictor column {} has {} rows, response has {n}",
                j + 1,
                col.len()
            )));
        }
    }
    Ok(PseudoSample {
        y_raw: data.y.clone(),
        u_y: rank_column(&data.y),
        x_raw: data.x.clone(),
        u_x: data.x.iter().map(|c| rank_column(c)).collect(),
    })
}

fn rank_column(col: &[f64]) -> Vec<f64> {
    let n = col.len();
    let mut sorted = col.to_vec();
    sorted.sort_by(f64::total_cmp);
    col.iter()
        .map(|&x| count_le(&sorted, x) as f64 / (n as f64 + 1.0))
        .collect()
}

/// Number of elements `<= q` in a sorted slice.
fn count_le(sorted: &[f64], q: f64) -> usize {
    sorted.partition_point(|&v| v <= q)
}

/// Rescaled empirical CDF of a raw sample column at a query point:
/// `count(values <= query) / (n + 1)`.
pub fn ecdf_eval(column: &[f64], query: f64) -> f64 {
    let n = column.len();
    let c = column.iter().filter(|&&v| v <= query).count();
    c as f64 / (n as f64 + 1.0)
}

/// Smallest sample value whose rescaled ECDF reaches `p`. Saturates at the
/// sample maximum when `p >= n/(n+1)`.
pub fn empirical_quantile(column: &[f64], p: f64) -> Result<f64> {
    if column.is_empty() {
        return Err(Error::Size("empirical quantile of an empty column".into()));
    }
    if !(0.0..1.0).contains(&p) {
        return Err(Error::Domain(format!("quantile level {p} outside (0,1)")));
    }
    let n = column.len();
    let mut sorted = column.to_vec();
    sorted.sort_by(f64::total_cmp);
    // smallest index i with count_le(sorted[i])/(n+1) >= p
    let denom = n as f64 + 1.0;
    for (i, &v) in sorted.iter().enumerate() {
        // with ties, count_le can exceed i + 1; comparing through count_le
        // keeps the indicator definition exact
        if count_le(&sorted, sorted[i]) as f64 / denom >= p {
            return Ok(v);
        }
    }
    Ok(sorted[n - 1])
}
