//! Unrotated bivariate copula families: log-density, conditional CDF
//! (h-function), closed-form inverses where they exist, and the joint CDF.
//!
//! All families here are exchangeable in their two arguments; rotations are
//! layered on top in the parent module. Densities are evaluated in log
//! space throughout, which keeps the two-parameter Archimedean families
//! finite near the corners of the unit square.

use crate::quadrature::GaussLegendre;
use crate::special::{log_sum_exp, norm_cdf, norm_quantile, t_cdf, t_quantile};

use super::bb::BbGenerator;

/// Threshold below which Gaussian rho / Frank theta collapse to the
/// independence limit (removable singularity).
pub(crate) const INDEP_EPS: f64 = 1e-10;

/// Numeric clamp for h-inverse results.
pub(crate) const UNIT_EPS: f64 = 1e-13;

/// Largest f64 strictly below 1.
pub(crate) const ONE_MINUS_ULP: f64 = 1.0 - f64::EPSILON / 2.0;

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum BaseCopula {
    Independence,
    Gaussian { rho: f64 },
    StudentT { rho: f64, nu: f64 },
    Clayton { theta: f64 },
    Gumbel { theta: f64 },
    Frank { theta: f64 },
    Joe { theta: f64 },
    Amh { theta: f64 },
    Bb(BbGenerator),
    GaussMix2 { rho1: f64, rho2: f64, pi: f64 },
}

/// `ln(1 - exp(x))` for `x < 0`.
#[inline]
pub(crate) fn ln_one_minus_exp(x: f64) -> f64 {
    debug_assert!(x <= 0.0);
    if x < -std::f64::consts::LN_2 {
        (-x.exp()).ln_1p()
    } else {
        (-x.exp_m1()).ln()
    }
}

/// `ln(1 + exp(x))` without overflow.
#[inline]
pub(crate) fn log1p_exp(x: f64) -> f64 {
    if x > 36.0 {
        x
    } else {
        x.exp().ln_1p()
    }
}

impl BaseCopula {
    pub(crate) fn log_density(&self, u: f64, v: f64) -> f64 {
        match *self {
            BaseCopula::Independence => 0.0,
            BaseCopula::Gaussian { rho } => {
                if rho.abs() < INDEP_EPS {
                    return 0.0;
                }
                let x = norm_quantile(u);
                let y = norm_quantile(v);
                let r2 = 1.0 - rho * rho;
                -0.5 * r2.ln() - (rho * rho * (x * x + y * y) - 2.0 * rho * x * y) / (2.0 * r2)
            }
            BaseCopula::StudentT { rho, nu } => {
                let x = t_quantile(u, nu);
                let y = t_quantile(v, nu);
                let r2 = 1.0 - rho * rho;
                crate::special::ln_gamma((nu + 2.0) / 2.0) + crate::special::ln_gamma(nu / 2.0)
                    - 2.0 * crate::special::ln_gamma((nu + 1.0) / 2.0)
                    - 0.5 * r2.ln()
                    - (nu + 2.0) / 2.0 * ((x * x - 2.0 * rho * x * y + y * y) / (nu * r2)).ln_1p()
                    + (nu + 1.0) / 2.0 * ((x * x / nu).ln_1p() + (y * y / nu).ln_1p())
            }
            BaseCopula::Clayton { theta } => {
                let ln_s = clayton_ln_s(theta, u, v);
                (1.0 + theta).ln() - (theta + 1.0) * (u.ln() + v.ln()) - (2.0 + 1.0 / theta) * ln_s
            }
            BaseCopula::Gumbel { theta } => {
                let xt = -u.ln();
                let yt = -v.ln();
                let ln_s = log_sum_exp(theta * xt.ln(), theta * yt.ln());
                let t_big = (ln_s / theta).exp();
                -t_big
                    + (theta - 1.0) * (xt.ln() + yt.ln())
                    + (1.0 / theta - 2.0) * ln_s
                    + (t_big + theta - 1.0).ln()
                    + xt
                    + yt
            }
            BaseCopula::Frank { theta } => {
                if theta.abs() < INDEP_EPS {
                    return 0.0;
                }
                let g1 = (-theta).exp_m1();
                let gu = (-theta * u).exp_m1();
                let gv = (-theta * v).exp_m1();
                let denom = g1 + gu * gv;
                ((-theta * g1) / (denom * denom) * (-theta * (u + v)).exp()).ln()
            }
            BaseCopula::Joe { theta } => {
                let la = theta * (-u).ln_1p();
                let lb = theta * (-v).ln_1p();
                let ln_a = joe_ln_a(la, lb);
                let a = ln_a.exp();
                (1.0 / theta - 2.0) * ln_a
                    + (theta - 1.0 + a).ln()
                    + (theta - 1.0) * ((-u).ln_1p() + (-v).ln_1p())
            }
            BaseCopula::Amh { theta } => {
                let d = 1.0 - theta * (1.0 - u) * (1.0 - v);
                ((1.0 - theta + 2.0 * theta * u * v / d) / (d * d)).ln()
            }
            BaseCopula::Bb(ref g) => {
                let su = g.phi(u);
                let sv = g.phi(v);
                // phi_inv can round to exactly 0 or 1 in the far corners,
                // where the log formulas would produce inf - inf
                let c = g.phi_inv(su + sv).clamp(1e-300, ONE_MINUS_ULP);
                g.ln_phi_dd(c) + g.ln_neg_phi_d(u) + g.ln_neg_phi_d(v) - 3.0 * g.ln_neg_phi_d(c)
            }
            BaseCopula::GaussMix2 { rho1, rho2, pi } => {
                let l1 = BaseCopula::Gaussian { rho: rho1 }.log_density(u, v);
                let l2 = BaseCopula::Gaussian { rho: rho2 }.log_density(u, v);
                log_sum_exp(pi.ln() + l1, (1.0 - pi).ln() + l2)
            }
        }
    }

    /// Conditional CDF of the second argument given the first:
    /// `h(v | u) = dC(u, v) / du`.
    pub(crate) fn h(&self, v: f64, u: f64) -> f64 {
        match *self {
            BaseCopula::Independence => v,
            BaseCopula::Gaussian { rho } => {
                if rho.abs() < INDEP_EPS {
                    return v;
                }
                let x = norm_quantile(u);
                let y = norm_quantile(v);
                norm_cdf((y - rho * x) / (1.0 - rho * rho).sqrt())
            }
            BaseCopula::StudentT { rho, nu } => {
                let x = t_quantile(u, nu);
                let y = t_quantile(v, nu);
                let scale = ((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
                t_cdf((y - rho * x) / scale, nu + 1.0)
            }
            BaseCopula::Clayton { theta } => {
                let ln_s = clayton_ln_s(theta, u, v);
                (-(theta + 1.0) * u.ln() - (1.0 / theta + 1.0) * ln_s).exp()
            }
            BaseCopula::Gumbel { theta } => {
                let xt = -u.ln();
                let yt = -v.ln();
                let ln_s = log_sum_exp(theta * xt.ln(), theta * yt.ln());
                let t_big = (ln_s / theta).exp();
                (-t_big + (1.0 / theta - 1.0) * ln_s + (theta - 1.0) * xt.ln() + xt).exp()
            }
            BaseCopula::Frank { theta } => {
                if theta.abs() < INDEP_EPS {
                    return v;
                }
                let g1 = (-theta).exp_m1();
                let gu = (-theta * u).exp_m1();
                let gv = (-theta * v).exp_m1();
                (-theta * u).exp() * gv / (g1 + gu * gv)
            }
            BaseCopula::Joe { theta } => {
                let la = theta * (-u).ln_1p();
                let lb = theta * (-v).ln_1p();
                let ln_a = joe_ln_a(la, lb);
                let one_minus_ybar = -lb.exp_m1(); // 1 - (1-v)^theta
                ((1.0 / theta - 1.0) * ln_a + (theta - 1.0) * (-u).ln_1p()).exp() * one_minus_ybar
            }
            BaseCopula::Amh { theta } => {
                let d = 1.0 - theta * (1.0 - u) * (1.0 - v);
                v * (1.0 - theta * (1.0 - v)) / (d * d)
            }
            BaseCopula::Bb(ref g) => {
                let su = g.phi(u);
                let sv = g.phi(v);
                let c = g.phi_inv(su + sv).clamp(1e-300, ONE_MINUS_ULP);
                (g.ln_neg_phi_d(u) - g.ln_neg_phi_d(c)).exp()
            }
            BaseCopula::GaussMix2 { rho1, rho2, pi } => {
                pi * BaseCopula::Gaussian { rho: rho1 }.h(v, u)
                    + (1.0 - pi) * BaseCopula::Gaussian { rho: rho2 }.h(v, u)
            }
        }
    }

    /// Closed-form inverse of the h-function where available.
    pub(crate) fn h_inv_closed(&self, p: f64, u: f64) -> Option<f64> {
        match *self {
            BaseCopula::Independence => Some(p),
            BaseCopula::Gaussian { rho } => {
                if rho.abs() < INDEP_EPS {
                    return Some(p);
                }
                let x = norm_quantile(u);
                let y = (1.0 - rho * rho).sqrt() * norm_quantile(p) + rho * x;
                Some(norm_cdf(y))
            }
            BaseCopula::StudentT { rho, nu } => {
                let x = t_quantile(u, nu);
                let scale = ((nu + x * x) * (1.0 - rho * rho) / (nu + 1.0)).sqrt();
                let y = t_quantile(p, nu + 1.0) * scale + rho * x;
                Some(t_cdf(y, nu))
            }
            BaseCopula::Clayton { theta } => {
                let t1 = (-theta / (1.0 + theta) * p.ln()).exp_m1().max(1e-300);
                let l = t1.ln() - theta * u.ln();
                Some((-log1p_exp(l) / theta).exp())
            }
            BaseCopula::Frank { theta } => {
                if theta.abs() < INDEP_EPS {
                    return Some(p);
                }
                let g1 = (-theta).exp_m1();
                let gu = (-theta * u).exp_m1();
                let gv = p * g1 / ((-theta * u).exp() - p * gu);
                Some(-(gv.ln_1p()) / theta)
            }
            _ => None,
        }
    }

    /// Joint CDF. Closed form for the Archimedean families, h-function
    /// quadrature for the elliptical ones and the mixture.
    pub(crate) fn cdf(&self, u: f64, v: f64) -> f64 {
        match *self {
            BaseCopula::Independence => u * v,
            BaseCopula::Gaussian { rho } => {
                if rho.abs() < INDEP_EPS {
                    u * v
                } else {
                    self.cdf_via_h(u, v)
                }
            }
            BaseCopula::StudentT { .. } => self.cdf_via_h(u, v),
            BaseCopula::Clayton { theta } => (-clayton_ln_s(theta, u, v) / theta).exp(),
            BaseCopula::Gumbel { theta } => {
                let ln_s = log_sum_exp(theta * (-u.ln()).ln(), theta * (-v.ln()).ln());
                (-(ln_s / theta).exp()).exp()
            }
            BaseCopula::Frank { theta } => {
                if theta.abs() < INDEP_EPS {
                    return u * v;
                }
                let g1 = (-theta).exp_m1();
                let gu = (-theta * u).exp_m1();
                let gv = (-theta * v).exp_m1();
                -((gu * gv / g1).ln_1p()) / theta
            }
            BaseCopula::Joe { theta } => {
                let ln_a = joe_ln_a(theta * (-u).ln_1p(), theta * (-v).ln_1p());
                -(ln_a / theta).exp_m1()
            }
            BaseCopula::Amh { theta } => u * v / (1.0 - theta * (1.0 - u) * (1.0 - v)),
            BaseCopula::Bb(ref g) => g.phi_inv(g.phi(u) + g.phi(v)),
            BaseCopula::GaussMix2 { rho1, rho2, pi } => {
                pi * BaseCopula::Gaussian { rho: rho1 }.cdf(u, v)
                    + (1.0 - pi) * BaseCopula::Gaussian { rho: rho2 }.cdf(u, v)
            }
        }
    }

    /// CDF by integrating the h-function over the conditioning argument:
    /// `C(u, v) = int_0^u h(v | s) ds`.
    fn cdf_via_h(&self, u: f64, v: f64) -> f64 {
        let rule = GaussLegendre::shared(96);
        rule.integrate(0.0, u, |s| self.h(v, s))
    }
}

/// `ln(u^{-theta} + v^{-theta} - 1)` computed in log space.
#[inline]
fn clayton_ln_s(theta: f64, u: f64, v: f64) -> f64 {
    let a = -theta * u.ln();
    let b = -theta * v.ln();
    let m = a.max(b);
    m + ((a - m).exp() + (b - m).exp() - (-m).exp()).ln()
}

/// `ln A` for the Joe copula with `A = xbar^t + ybar^t - xbar^t ybar^t`,
/// parameterized by `la = t ln(xbar)`, `lb = t ln(ybar)` (both <= 0).
#[inline]
fn joe_ln_a(la: f64, lb: f64) -> f64 {
    // A = 1 - (1 - e^la)(1 - e^lb) = e^la + e^lb - e^(la+lb)
    let p1 = -la.exp_m1();
    let p2 = -lb.exp_m1();
    if p1 * p2 < 0.9 {
        (-p1 * p2).ln_1p()
    } else {
        // near u = v = 1 the product form cancels; expand instead
        let m = la.max(lb);
        m + ((la - m).exp() + (lb - m).exp() - (la + lb - m).exp()).ln()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn joe_ln_a_consistent_between_branches() {
        // A = xbar^t + ybar^t - xbar^t*ybar^t evaluated directly.
        for &(xb, yb, t) in &[
            (0.3_f64, 0.7_f64, 2.0_f64),
            (0.95, 0.99, 1.3),
            (0.01, 0.02, 4.0),
            (0.9999, 0.9999, 1.01),
        ] {
            let la = t * xb.ln();
            let lb = t * yb.ln();
            let direct = (xb.powf(t) + yb.powf(t) - xb.powf(t) * yb.powf(t)).ln();
            let got = joe_ln_a(la, lb);
            assert!(
                (got - direct).abs() < 1e-12,
                "xb={xb} yb={yb} t={t}: {got} vs {direct}"
            );
        }
    }

    #[test]
    fn clayton_ln_s_matches_direct() {
        for &(u, v, th) in &[
            (0.5_f64, 0.5_f64, 2.0_f64),
            (0.1, 0.9, 5.0),
            (0.3, 0.2, 0.5),
        ] {
            let direct = (u.powf(-th) + v.powf(-th) - 1.0).ln();
            assert!((clayton_ln_s(th, u, v) - direct).abs() < 1e-12);
        }
    }
}
