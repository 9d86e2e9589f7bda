//! Three-variable pair-copula construction over (Y, X1, X2): structure
//! selection by Kendall-tau spanning tree, AIC family selection per pair,
//! sequential estimation through conditional pseudo-observations, and
//! joint-density evaluation under the simplifying assumption (the
//! conditional pair-copula does not vary with the conditioning value).

use crate::copula::{empirical_tau, CopulaSpec, FamilyId, Rotation};
use crate::error::{Error, Result};
use crate::fitting::{select_by_aic, FitResult};
use crate::margins::PseudoSample;
use crate::optim::{brent_min, nelder_mead_box};

/// Variable labels in column order: response first, then the predictors.
pub const VARIABLE_LABELS: [&str; 3] = ["y", "x1", "x2"];

/// A fitted (or hand-built) trivariate regular vine.
///
/// Tree 1 has the two edges `(leaf_a, center)` and `(leaf_b, center)`;
/// tree 2 couples the conditional CDFs of the leaves given the center.
/// Pair copulas store the leaf as their first argument.
#[derive(Debug, Clone)]
pub struct VineModel {
    pub center: usize,
    pub leaf_a: usize,
    pub leaf_b: usize,
    pub pair_a: CopulaSpec,
    pub pair_b: CopulaSpec,
    pub pair_cond: CopulaSpec,
    /// Per-pair fit diagnostics in order (pair_a, pair_b, pair_cond);
    /// empty for hand-built models.
    pub fit_meta: Vec<FitResult>,
}

const COND_EPS: f64 = 1e-12;

impl VineModel {
    /// Build a vine from explicit pair copulas. `center` is the column
    /// index of the tree-1 center (0 = y, 1 = x1, 2 = x2).
    pub fn new(
        center: usize,
        pair_a: CopulaSpec,
        pair_b: CopulaSpec,
        pair_cond: CopulaSpec,
    ) -> Result<VineModel> {
        if center > 2 {
            return Err(Error::Config(format!(
                "vine center index {center} out of range"
            )));
        }
        let (leaf_a, leaf_b) = leaves_of(center);
        Ok(VineModel {
            center,
            leaf_a,
            leaf_b,
            pair_a,
            pair_b,
            pair_cond,
            fit_meta: Vec::new(),
        })
    }

    /// A vine whose three pair copulas share one spec: the trivariate
    /// model with all pairwise dependencies governed by a single family,
    /// centered on x1 as in the displayed decomposition.
    pub fn tied(spec: CopulaSpec) -> VineModel {
        VineModel::new(1, spec.clone(), spec.clone(), spec).expect("center 1 is valid")
    }

    /// All three pairs independent.
    pub fn independence() -> VineModel {
        VineModel::tied(CopulaSpec::independence())
    }

    pub fn center_label(&self) -> &'static str {
        VARIABLE_LABELS[self.center]
    }

    /// Joint copula density at `(w0, w1, w2)` = pseudo-coordinates of
    /// (y, x1, x2), all strictly inside (0, 1).
    pub fn density(&self, w0: f64, w1: f64, w2: f64) -> Result<f64> {
        for w in [w0, w1, w2] {
            if !(w > 0.0 && w < 1.0) {
                return Err(Error::Domain(format!(
                    "vine density argument {w} not strictly inside (0,1)"
                )));
            }
        }
        let d = self.log_density(w0, w1, w2).exp();
        if d.is_nan() {
            return Err(Error::Numeric(format!(
                "vine density NaN at ({w0}, {w1}, {w2})"
            )));
        }
        Ok(d)
    }

    /// Log density without domain checks; arguments must be interior.
    pub fn log_density(&self, w0: f64, w1: f64, w2: f64) -> f64 {
        let w = [w0, w1, w2];
        let wa = w[self.leaf_a];
        let wb = w[self.leaf_b];
        let wc = w[self.center];
        let la = self.pair_a.log_density(wa, wc);
        let lb = self.pair_b.log_density(wb, wc);
        let za = cond_clamp(self.pair_a.h_given_second(wa, wc).unwrap_or(f64::NAN));
        let zb = cond_clamp(self.pair_b.h_given_second(wb, wc).unwrap_or(f64::NAN));
        let lc = self.pair_cond.log_density(za, zb);
        la + lb + lc
    }
}

fn leaves_of(center: usize) -> (usize, usize) {
    match center {
        0 => (1, 2),
        1 => (0, 2),
        _ => (0, 1),
    }
}

#[inline]
fn cond_clamp(z: f64) -> f64 {
    z.clamp(COND_EPS, 1.0 - COND_EPS)
}

/// Pick the tree-1 center: the node shared by the two largest edges of
/// the |tau|-weighted maximum spanning tree on (y, x1, x2). For three
/// nodes this drops the smallest-|tau| edge. Ties break toward the
/// earlier variable in (y, x1, x2) order.
pub fn select_structure(pseudo: &PseudoSample) -> Result<usize> {
    if pseudo.d() != 2 {
        return Err(Error::Size(format!(
            "vine structure selection needs two predictors, got d={}",
            pseudo.d()
        )));
    }
    if pseudo.n() < 10 {
        return Err(Error::Size(format!(
            "vine structure selection needs at least 10 rows, got {}",
            pseudo.n()
        )));
    }
    let cols = [&pseudo.u_y, &pseudo.u_x[0], &pseudo.u_x[1]];
    let mut tau_abs = [[0.0f64; 3]; 3];
    for i in 0..3 {
        for j in (i + 1)..3 {
            let t = empirical_tau(cols[i], cols[j])?.abs();
            tau_abs[i][j] = t;
            tau_abs[j][i] = t;
        }
    }
    Ok(center_of_max_tree(&tau_abs))
}

/// Center of the maximum spanning tree given pairwise |tau| weights.
#[allow(clippy::needless_range_loop)]
pub fn center_of_max_tree(tau_abs: &[[f64; 3]; 3]) -> usize {
    let mut best = 0usize;
    let mut best_weight = f64::NEG_INFINITY;
    for c in 0..3 {
        let (a, b) = leaves_of(c);
        let w = tau_abs[c][a] + tau_abs[c][b];
        if w > best_weight {
            best_weight = w;
            best = c;
        }
    }
    best
}

/// Conditional pseudo-observations of the leaves given the center under
/// fitted tree-1 pair copulas: per observation
/// `(h(w_leaf_a | w_center), h(w_leaf_b | w_center))`.
#[allow(clippy::needless_range_loop)]
pub fn conditional_pseudo_obs(
    center: usize,
    pair_a: &CopulaSpec,
    pair_b: &CopulaSpec,
    pseudo: &PseudoSample,
) -> Result<Vec<(f64, f64)>> {
    if pseudo.d() != 2 {
        return Err(Error::Size(
            "conditional pseudo-observations need d=2".into(),
        ));
    }
    let cols = [&pseudo.u_y, &pseudo.u_x[0], &pseudo.u_x[1]];
    let (leaf_a, leaf_b) = leaves_of(center);
    let mut out = Vec::with_capacity(pseudo.n());
    for i in 0..pseudo.n() {
        let wc = cols[center][i];
        let za = cond_clamp(pair_a.h_given_second(cols[leaf_a][i], wc)?);
        let zb = cond_clamp(pair_b.h_given_second(cols[leaf_b][i], wc)?);
        out.push((za, zb));
    }
    Ok(out)
}

/// Sequential vine estimation: select the structure, fit both tree-1
/// edges by AIC over the candidate list, then fit the conditional pair on
/// the tree-1 conditional pseudo-observations.
pub fn fit_vine(pseudo: &PseudoSample, candidates: &[(FamilyId, Rotation)]) -> Result<VineModel> {
    if candidates.is_empty() {
        return Err(Error::Config("empty candidate list".into()));
    }
    let center = select_structure(pseudo)?;
    let (leaf_a, leaf_b) = leaves_of(center);
    let cols = [&pseudo.u_y, &pseudo.u_x[0], &pseudo.u_x[1]];

    let pairs_a: Vec<(f64, f64)> = (0..pseudo.n())
        .map(|i| (cols[leaf_a][i], cols[center][i]))
        .collect();
    let fit_a = select_by_aic(candidates, &pairs_a)?;

    let pairs_b: Vec<(f64, f64)> = (0..pseudo.n())
        .map(|i| (cols[leaf_b][i], cols[center][i]))
        .collect();
    let fit_b = select_by_aic(candidates, &pairs_b)?;

    let cond = conditional_pseudo_obs(center, &fit_a.spec, &fit_b.spec, pseudo)?;
    let fit_cond = select_by_aic(candidates, &cond)?;

    Ok(VineModel {
        center,
        leaf_a,
        leaf_b,
        pair_a: fit_a.spec.clone(),
        pair_b: fit_b.spec.clone(),
        pair_cond: fit_cond.spec.clone(),
        fit_meta: vec![fit_a, fit_b, fit_cond],
    })
}

/// Fit the tied trivariate model: one family whose shared parameter
/// vector drives all three pair copulas, estimated by maximizing the
/// pseudo log-likelihood of the vine density. This is the d=2 analogue of
/// choosing a single parametric copula.
pub fn fit_tied_vine(
    pseudo: &PseudoSample,
    family: FamilyId,
    rotation: Rotation,
) -> Result<(VineModel, FitResult)> {
    if pseudo.d() != 2 {
        return Err(Error::Size("the tied trivariate fit needs d=2".into()));
    }
    if pseudo.n() < 10 {
        return Err(Error::Size(format!(
            "need at least 10 observations to fit, got {}",
            pseudo.n()
        )));
    }

    if family.n_params() == 0 {
        let model = VineModel::tied(CopulaSpec::new(family, rotation, vec![])?);
        let fit = FitResult {
            spec: model.pair_a.clone(),
            loglik: 0.0,
            aic: 0.0,
            n_params: 0,
            converged: true,
            iterations: 0,
        };
        return Ok((model, fit));
    }

    let rows: Vec<(f64, f64, f64)> = (0..pseudo.n())
        .map(|i| (pseudo.u_y[i], pseudo.u_x[0][i], pseudo.u_x[1][i]))
        .collect();
    let objective = |params: &[f64]| -> f64 {
        let spec = match CopulaSpec::new(family, rotation, params.to_vec()) {
            Ok(s) => s,
            Err(_) => return f64::INFINITY,
        };
        let model = VineModel::tied(spec);
        let mut acc = 0.0;
        for &(w0, w1, w2) in &rows {
            let l = model.log_density(w0, w1, w2);
            if l.is_nan() {
                return f64::INFINITY;
            }
            acc += l;
        }
        if acc.is_finite() {
            -acc
        } else {
            f64::INFINITY
        }
    };

    let space = family.param_space();
    let opt = if family.n_params() == 1 {
        let mid = space.midpoint()[0];
        brent_min(
            |x| objective(&[x]),
            space.lower[0],
            space.upper[0],
            mid,
            1e-6,
            500,
        )
    } else {
        nelder_mead_box(
            objective,
            &space.lower,
            &space.upper,
            &space.midpoint(),
            1e-6,
            500,
        )
    };

    let mut params = opt.x.clone();
    space.clamp(&mut params);
    let spec = CopulaSpec::new(family, rotation, params)?;
    let n_params = family.n_params();
    let fit = FitResult {
        spec: spec.clone(),
        loglik: -opt.fx,
        aic: 2.0 * n_params as f64 + 2.0 * opt.fx,
        n_params,
        converged: opt.converged && opt.fx.is_finite(),
        iterations: opt.iterations,
    };
    Ok((VineModel::tied(spec), fit))
}
