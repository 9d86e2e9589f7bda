//! Population Kendall's tau: closed forms where known, deterministic
//! quadrature otherwise, and the inverse map from a target tau to a
//! parameter vector used by the monotonicity sweep.

use crate::error::{Error, Result};
use crate::quadrature::GaussLegendre;

use super::families::BaseCopula;
use super::{base_from, CopulaSpec, FamilyId, Rotation};

/// Population Kendall's tau of an unrotated family.
///
/// Gaussian/t, Clayton, Gumbel and BB1 use closed forms, Frank the Debye
/// integral, AMH its closed form, Joe the exact series
/// `1 - 4 sum_k 1/(k(tk+2)(t(k-1)+2))`. The remaining families are handled
/// by deterministic quadrature: the Archimedean ones via
/// `1 + 4 int phi/phi'` and the Gaussian mixture via
/// `1 - 4 int int dC/du dC/dv du dv`.
pub(crate) fn base_tau(base: &BaseCopula) -> f64 {
    match *base {
        BaseCopula::Independence => 0.0,
        BaseCopula::Gaussian { rho } | BaseCopula::StudentT { rho, .. } => {
            2.0 * rho.asin() / std::f64::consts::PI
        }
        BaseCopula::Clayton { theta } => theta / (theta + 2.0),
        BaseCopula::Gumbel { theta } => 1.0 - 1.0 / theta,
        BaseCopula::Frank { theta } => frank_tau(theta),
        BaseCopula::Joe { theta } => joe_tau(theta),
        BaseCopula::Amh { theta } => amh_tau(theta),
        BaseCopula::Bb(ref g) => match g.kind {
            super::bb::BbKind::Bb1 => 1.0 - 2.0 / (g.delta * (g.theta + 2.0)),
            _ => archimedean_tau_quadrature(g),
        },
        BaseCopula::GaussMix2 { .. } => tau_partials_quadrature(base),
    }
}

fn frank_tau(theta: f64) -> f64 {
    if theta.abs() < 1e-10 {
        return 0.0;
    }
    let t = theta.abs();
    // first Debye function D1(t) = (1/t) int_0^t s/(e^s - 1) ds
    let rule = GaussLegendre::shared(96);
    let d1 = rule.integrate(0.0, t, |s| if s < 1e-12 { 1.0 } else { s / s.exp_m1() }) / t;
    let tau = 1.0 - 4.0 / t * (1.0 - d1);
    tau * theta.signum()
}

fn joe_tau(theta: f64) -> f64 {
    let mut sum = 0.0;
    for k in 1..200_000u64 {
        let k = k as f64;
        let term = 1.0 / (k * (theta * k + 2.0) * (theta * (k - 1.0) + 2.0));
        sum += term;
        if term < 1e-15 {
            break;
        }
    }
    1.0 - 4.0 * sum
}

fn amh_tau(theta: f64) -> f64 {
    if theta.abs() < 1e-3 {
        // series around 0 avoids the cancellation in the closed form
        return 2.0 * theta / 9.0 + theta * theta / 18.0 + theta * theta * theta / 45.0;
    }
    let omt = (-theta).ln_1p(); // ln(1 - theta)
    1.0 - 2.0 * (theta + (1.0 - theta) * (1.0 - theta) * omt) / (3.0 * theta * theta)
}

/// `tau = 1 + 4 int_0^1 phi(t)/phi'(t) dt` for Archimedean generators.
fn archimedean_tau_quadrature(g: &super::bb::BbGenerator) -> f64 {
    let rule = GaussLegendre::shared(256);
    let integral = rule.integrate(0.0, 1.0, |t| (g.ln_phi(t) - g.ln_neg_phi_d(t)).exp());
    1.0 - 4.0 * integral
}

/// `tau = 1 - 4 int int dC/du dC/dv du dv`, valid for any copula; the base
/// families are exchangeable so both partials come from the same
/// h-function.
fn tau_partials_quadrature(base: &BaseCopula) -> f64 {
    let rule = GaussLegendre::shared(128);
    let pts: Vec<(f64, f64)> = rule.mapped(0.0, 1.0).collect();
    let mut acc = 0.0;
    for &(u, wu) in &pts {
        for &(v, wv) in &pts {
            acc += wu * wv * base.h(v, u) * base.h(u, v);
        }
    }
    1.0 - 4.0 * acc
}

/// Build a spec achieving the requested population Kendall's tau, for the
/// monotonicity sweep. Returns a human-readable reason when the family
/// cannot reach the target (e.g. Clayton with negative tau at rotation 0).
///
/// Two-parameter families follow a declared one-dimensional path through
/// their parameter box (Student-t fixes nu = 4; BB1 sets delta = 1 + tau;
/// BB6/BB7/BB8 move along the box diagonal; the Gaussian mixture uses two
/// equal components), with the free coordinate solved by bisection on the
/// monotone tau map.
pub fn spec_from_tau(
    family: FamilyId,
    rotation: Rotation,
    tau: f64,
) -> std::result::Result<CopulaSpec, String> {
    if tau.abs() >= 1.0 {
        return Err(format!("tau {tau} outside (-1, 1)"));
    }
    // 90/270 rotations flip the sign of tau, so the base family must
    // realize the mirrored target.
    let base_tau_target = rotation.tau_sign() * tau;
    let params = base_params_for_tau(family, base_tau_target)?;
    CopulaSpec::new(family, rotation, params).map_err(|e| e.to_string())
}

fn base_params_for_tau(family: FamilyId, t: f64) -> std::result::Result<Vec<f64>, String> {
    let reach = |lo: f64, hi: f64| -> std::result::Result<(), String> {
        if t < lo || t > hi {
            Err(format!(
                "{} only attains tau in [{lo:.4}, {hi:.4}], requested {t}",
                family.name()
            ))
        } else {
            Ok(())
        }
    };
    match family {
        FamilyId::Independence => {
            if t.abs() < 1e-12 {
                Ok(vec![])
            } else {
                Err("independence copula has tau = 0".to_string())
            }
        }
        FamilyId::Gaussian => Ok(vec![(std::f64::consts::PI * t / 2.0).sin()]),
        FamilyId::StudentT => Ok(vec![(std::f64::consts::PI * t / 2.0).sin(), 4.0]),
        FamilyId::Clayton => {
            if t <= 0.0 {
                return Err("clayton attains positive tau only (use a 90/270 rotation)".into());
            }
            reach(0.0, 28.0 / 30.0)?;
            Ok(vec![2.0 * t / (1.0 - t)])
        }
        FamilyId::Gumbel => {
            if t <= 0.0 {
                return Err("gumbel attains positive tau only (use a 90/270 rotation)".into());
            }
            reach(0.0, 1.0 - 1.0 / 17.0)?;
            Ok(vec![1.0 / (1.0 - t)])
        }
        FamilyId::Frank => {
            if t.abs() < 1e-12 {
                return Err("frank tau -> 0 only in the independence limit".into());
            }
            let max_tau = frank_tau(35.0);
            reach(-max_tau, max_tau)?;
            let theta = bisect_monotone(1e-6, 35.0, t.abs(), frank_tau)?;
            Ok(vec![theta * t.signum()])
        }
        FamilyId::Joe => {
            if t <= 0.0 {
                return Err("joe attains positive tau only (use a 90/270 rotation)".into());
            }
            reach(0.0, joe_tau(30.0))?;
            Ok(vec![bisect_monotone(1.0 + 1e-6, 30.0, t, joe_tau)?])
        }
        FamilyId::Amh => {
            let lo = amh_tau(-1.0 + 1e-6);
            let hi = amh_tau(1.0 - 1e-6);
            reach(lo, hi)?;
            Ok(vec![bisect_monotone(-1.0 + 1e-6, 1.0 - 1e-6, t, amh_tau)?])
        }
        FamilyId::Bb1 => {
            if t <= 0.0 {
                return Err("bb1 attains positive tau only (use a 90/270 rotation)".into());
            }
            let delta = 1.0 + t;
            let theta = 2.0 / (delta * (1.0 - t)) - 2.0;
            if !(1e-4..=7.0).contains(&theta) {
                return Err(format!(
                    "bb1 path parameter theta={theta:.4} outside the box"
                ));
            }
            Ok(vec![theta, delta])
        }
        FamilyId::Bb6 | FamilyId::Bb7 | FamilyId::Bb8 => {
            if t <= 0.0 {
                return Err(format!(
                    "{} attains positive tau only (use a 90/270 rotation)",
                    family.name()
                ));
            }
            let space = family.param_space();
            let tau_at = |s: f64| {
                let p: Vec<f64> = space
                    .lower
                    .iter()
                    .zip(&space.upper)
                    .map(|(lo, hi)| lo + s * (hi - lo))
                    .collect();
                base_tau(&base_from(family, &p))
            };
            let hi = tau_at(1.0);
            if t > hi {
                return Err(format!(
                    "{} attains tau up to {hi:.4} along its parameter path, requested {t}",
                    family.name()
                ));
            }
            let s = bisect_monotone(0.0, 1.0, t, tau_at)?;
            Ok(space
                .lower
                .iter()
                .zip(&space.upper)
                .map(|(lo, hi)| lo + s * (hi - lo))
                .collect())
        }
        FamilyId::GaussMix2 => {
            let rho = (std::f64::consts::PI * t / 2.0).sin();
            Ok(vec![rho, rho, 0.5])
        }
    }
}

fn bisect_monotone<F: Fn(f64) -> f64>(
    mut lo: f64,
    mut hi: f64,
    target: f64,
    f: F,
) -> std::result::Result<f64, String> {
    let (flo, fhi) = (f(lo), f(hi));
    if (target - flo) * (target - fhi) > 0.0 {
        return Err(format!(
            "target {target} outside attainable range [{flo:.4}, {fhi:.4}]"
        ));
    }
    let increasing = fhi > flo;
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        let fm = f(mid);
        if (fm - target).abs() < 1e-8 || hi - lo < 1e-10 {
            return Ok(mid);
        }
        if (fm < target) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Empirical Kendall tau-b via Knight's O(n log n) algorithm.
pub fn empirical_tau(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::Size(format!(
            "kendall tau needs equal-length inputs, got {} and {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 2 {
        return Err(Error::Size(
            "kendall tau needs at least 2 observations".into(),
        ));
    }

    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| x[a].total_cmp(&x[b]).then(y[a].total_cmp(&y[b])));

    // tie counts in x (and joint ties) from the sorted order
    let mut t_x = 0u64; // pairs tied in x
    let mut t_xy = 0u64; // pairs tied in both
    {
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && x[idx[j + 1]] == x[idx[i]] {
                j += 1;
            }
            let run = (j - i + 1) as u64;
            t_x += run * (run - 1) / 2;
            let mut k = i;
            while k <= j {
                let mut m = k;
                while m < j && y[idx[m + 1]] == y[idx[k]] {
                    m += 1;
                }
                let jr = (m - k + 1) as u64;
                t_xy += jr * (jr - 1) / 2;
                k = m + 1;
            }
            i = j + 1;
        }
    }

    // discordant pairs = inversions of y in x-sorted order (merge count)
    let mut ys: Vec<f64> = idx.iter().map(|&i| y[i]).collect();
    let mut buf = ys.clone();
    let discordant = merge_count(&mut ys, &mut buf);

    // tie counts in y
    let mut sorted_y: Vec<f64> = y.to_vec();
    sorted_y.sort_by(f64::total_cmp);
    let mut t_y = 0u64;
    {
        let mut i = 0;
        while i < n {
            let mut j = i;
            while j + 1 < n && sorted_y[j + 1] == sorted_y[i] {
                j += 1;
            }
            let run = (j - i + 1) as u64;
            t_y += run * (run - 1) / 2;
            i = j + 1;
        }
    }

    let total = (n as u64) * (n as u64 - 1) / 2;
    let concordant_plus_disc = total - t_x - t_y + t_xy;
    let num = concordant_plus_disc as f64 - 2.0 * discordant as f64;
    let den = (((total - t_x) as f64) * ((total - t_y) as f64)).sqrt();
    if den == 0.0 {
        return Err(Error::Numeric(
            "kendall tau undefined: all values tied".into(),
        ));
    }
    Ok(num / den)
}

/// Count inversions while merge-sorting. Ties are not counted as
/// inversions (strict ordering).
fn merge_count(v: &mut [f64], buf: &mut [f64]) -> u64 {
    let n = v.len();
    if n <= 1 {
        return 0;
    }
    let mid = n / 2;
    let (left, right) = v.split_at_mut(mid);
    let (bl, br) = buf.split_at_mut(mid);
    let mut inv = merge_count(left, bl) + merge_count(right, br);
    let (mut i, mut j, mut k) = (0, 0, 0);
    while i < left.len() && j < right.len() {
        if right[j] < left[i] {
            inv += (left.len() - i) as u64;
            buf[k] = right[j];
            j += 1;
        } else {
            buf[k] = left[i];
            i += 1;
        }
        k += 1;
    }
    while i < left.len() {
        buf[k] = left[i];
        i += 1;
        k += 1;
    }
    while j < right.len() {
        buf[k] = right[j];
        j += 1;
        k += 1;
    }
    v.copy_from_slice(&buf[..n]);
    inv
}
