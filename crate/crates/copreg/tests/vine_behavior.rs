//! Statistical behavior of the pair-copula construction: normalization of
//! fitted densities, recovery under correct specification, and the null
//! case.

mod common;

use common::halton3;
use copreg::fitting::default_candidates_vine;
use copreg::margins::{ecdf_transform, Dataset};
use copreg::rng::SeedStream;
use copreg::vine::{fit_vine, VineModel};
use copreg::{CopulaSpec, FamilyId, Rotation};

/// Quasi-Monte-Carlo mass of a vine density over the unit cube.
fn qmc_mass(model: &VineModel, points: usize) -> f64 {
    let mut acc = 0.0;
    for (a, b, c) in halton3(points) {
        acc += model.log_density(a, b, c).exp();
    }
    acc / points as f64
}

/// Sample a trivariate dataset from a hand-built vine (center x1) by
/// conditional inversion.
fn sample_vine(model: &VineModel, n: usize, seed: u64) -> Dataset {
    assert_eq!(model.center, 1);
    let mut s = SeedStream::new(seed);
    let mut y = Vec::with_capacity(n);
    let mut x1 = Vec::with_capacity(n);
    let mut x2 = Vec::with_capacity(n);
    for _ in 0..n {
        let wc = s.uniform();
        let pa = s.uniform();
        let pb = s.uniform();
        // leaf a (= y) given the center, then leaf b given (center, z_a)
        let wa = model.pair_a.h_inverse_given_second(pa, wc).unwrap();
        let za = model.pair_a.h_given_second(wa, wc).unwrap();
        let zb = model
            .pair_cond
            .h_inverse(pb, za.clamp(1e-12, 1.0 - 1e-12))
            .unwrap();
        let wb = model.pair_b.h_inverse_given_second(zb, wc).unwrap();
        y.push(wa);
        x1.push(wc);
        x2.push(wb);
    }
    Dataset { y, x: vec![x1, x2] }
}

#[test]
fn hand_built_vine_mass_is_one() {
    let g6 = CopulaSpec::new(FamilyId::Gaussian, Rotation::R0, vec![0.6]).unwrap();
    let cl = CopulaSpec::new(FamilyId::Clayton, Rotation::R0, vec![1.5]).unwrap();
    let fr = CopulaSpec::new(FamilyId::Frank, Rotation::R0, vec![3.0]).unwrap();
    let model = VineModel::new(1, g6, cl, fr).unwrap();
    let mass = qmc_mass(&model, 100_000);
    assert!((mass - 1.0).abs() < 0.01, "mass = {mass}");
}

#[test]
fn fitted_vine_recovers_known_structure() {
    let g6 = CopulaSpec::new(FamilyId::Gaussian, Rotation::R0, vec![0.6]).unwrap();
    let truth = VineModel::new(1, g6.clone(), g6, CopulaSpec::independence()).unwrap();
    let data = sample_vine(&truth, 5000, 31);
    let pseudo = ecdf_transform(&data).unwrap();
    let fitted = fit_vine(
        &pseudo,
        &[
            (FamilyId::Independence, Rotation::R0),
            (FamilyId::Gaussian, Rotation::R0),
        ],
    )
    .unwrap();
    assert_eq!(fitted.center, 1, "expected x1 as the tree-1 center");
    for (label, pair) in [("a", &fitted.pair_a), ("b", &fitted.pair_b)] {
        assert_eq!(pair.family(), FamilyId::Gaussian, "pair {label}");
        let rho = pair.params()[0];
        assert!((rho - 0.6).abs() < 0.05, "pair {label}: rho = {rho}");
    }
    let mass = qmc_mass(&fitted, 100_000);
    assert!((mass - 1.0).abs() < 0.01, "fitted mass = {mass}");
}

#[test]
fn null_case_selects_near_independence() {
    // independent trivariate data: every selected pair should carry an
    // AIC within 2 of independence's zero, and the fitted density should
    // stay close to 1 on the interior grid
    for seed in [3u64, 17, 40] {
        let mut s = SeedStream::new(seed);
        let n = 2000;
        let y: Vec<f64> = (0..n).map(|_| s.uniform()).collect();
        let x1: Vec<f64> = (0..n).map(|_| s.uniform()).collect();
        let x2: Vec<f64> = (0..n).map(|_| s.uniform()).collect();
        let pseudo = ecdf_transform(&Dataset { y, x: vec![x1, x2] }).unwrap();
        let model = fit_vine(&pseudo, &default_candidates_vine()).unwrap();
        for fit in &model.fit_meta {
            assert!(
                fit.aic < 2.0,
                "seed {seed}: pair {} has aic {}",
                fit.spec.label(),
                fit.aic
            );
        }
        for i in 1..=5 {
            for j in 1..=5 {
                for k in 1..=5 {
                    let (a, b, c) = (i as f64 / 6.0, j as f64 / 6.0, k as f64 / 6.0);
                    let d = model.density(a, b, c).unwrap();
                    assert!(
                        (0.8..=1.25).contains(&d),
                        "seed {seed}: density {d} at ({a}, {b}, {c})"
                    );
                }
            }
        }
        let mass = qmc_mass(&model, 100_000);
        assert!((mass - 1.0).abs() < 0.01, "seed {seed}: mass = {mass}");
    }
}

#[test]
fn fit_vine_is_deterministic() {
    let g = CopulaSpec::new(FamilyId::Gaussian, Rotation::R0, vec![0.5]).unwrap();
    let truth = VineModel::new(1, g.clone(), g, CopulaSpec::independence()).unwrap();
    let data = sample_vine(&truth, 300, 8);
    let pseudo = ecdf_transform(&data).unwrap();
    let cands = default_candidates_vine();
    let a = fit_vine(&pseudo, &cands).unwrap();
    let b = fit_vine(&pseudo, &cands).unwrap();
    assert_eq!(a.center, b.center);
    for (x, y) in [
        (&a.pair_a, &b.pair_a),
        (&a.pair_b, &b.pair_b),
        (&a.pair_cond, &b.pair_cond),
    ] {
        assert_eq!(x.label(), y.label());
        assert_eq!(x.params(), y.params());
    }
}

#[test]
fn independence_vine_estimate_equals_constant_density_bitwise() {
    use copreg::regression::{closed_grid, estimate_regression_2d};
    let mut s = SeedStream::new(14);
    let n = 60;
    let y: Vec<f64> = (0..n).map(|_| s.uniform() * 2.0 - 0.3).collect();
    let x1: Vec<f64> = (0..n).map(|_| s.uniform()).collect();
    let x2: Vec<f64> = (0..n).map(|_| s.uniform()).collect();
    let pseudo = ecdf_transform(&Dataset { y, x: vec![x1, x2] }).unwrap();
    let g = closed_grid(6);
    let vine = VineModel::independence();
    let via_vine = estimate_regression_2d(
        |w0, w1, w2| vine.log_density(w0, w1, w2).exp(),
        &pseudo,
        &g,
        &g,
    )
    .unwrap();
    let via_one = estimate_regression_2d(|_, _, _| 1.0, &pseudo, &g, &g).unwrap();
    for (a, b) in via_vine.values.iter().zip(&via_one.values) {
        assert_eq!(a.to_bits(), b.to_bits());
    }
}

#[test]
fn rotated_pair_vine_mass_is_one() {
    let a = CopulaSpec::new(FamilyId::Clayton, Rotation::R90, vec![1.8]).unwrap();
    let b = CopulaSpec::new(FamilyId::Gumbel, Rotation::R180, vec![1.6]).unwrap();
    let c = CopulaSpec::new(FamilyId::Joe, Rotation::R270, vec![1.4]).unwrap();
    let model = VineModel::new(2, a, b, c).unwrap();
    let mass = qmc_mass(&model, 100_000);
    assert!((mass - 1.0).abs() < 0.01, "mass = {mass}");
}
