//! Shared helpers for the integration suites.
#![allow(dead_code)]

use copreg::margins::{ecdf_transform, Dataset, PseudoSample};
use copreg::special::{norm_cdf, norm_quantile};
use copreg::CopulaSpec;

/// Closed-form population regression curve of the Gaussian copula with
/// uniform margins: `Phi(rho Phi^-1(u) / sqrt(2 - rho^2))`.
pub fn gaussian_population_curve(rho: f64, u: f64) -> f64 {
    norm_cdf(rho * norm_quantile(u) / (2.0 - rho * rho).sqrt())
}

/// Halton low-discrepancy sequence value (1-based index).
pub fn halton(index: usize, base: usize) -> f64 {
    let mut f = 1.0;
    let mut r = 0.0;
    let mut i = index;
    while i > 0 {
        f /= base as f64;
        r += f * (i % base) as f64;
        i /= base;
    }
    r
}

/// Quasi-uniform points in (0,1)^3 (Halton bases 2, 3, 5), shifted half a
/// step away from zero.
pub fn halton3(n: usize) -> Vec<(f64, f64, f64)> {
    (1..=n)
        .map(|i| (halton(i, 2), halton(i, 3), halton(i, 5)))
        .map(|(a, b, c)| (a.max(1e-9), b.max(1e-9), c.max(1e-9)))
        .collect()
}

/// Rank-transform a copula sample into a d=1 pseudo sample (response is
/// the first coordinate).
pub fn pseudo_from_copula(spec: &CopulaSpec, n: usize, seed: u64) -> PseudoSample {
    let raw = spec.sample(n, seed);
    ecdf_transform(&Dataset {
        y: raw.iter().map(|p| p.0).collect(),
        x: vec![raw.iter().map(|p| p.1).collect()],
    })
    .unwrap()
}

/// Pseudo-observation pairs of a copula sample.
pub fn pseudo_pairs(spec: &CopulaSpec, n: usize, seed: u64) -> Vec<(f64, f64)> {
    pseudo_from_copula(spec, n, seed).pairs_with_predictor(0)
}

/// Median of a sample (by value).
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
