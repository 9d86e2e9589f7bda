//! Two-parameter Archimedean families BB1, BB6, BB7 and BB8, expressed
//! through their generators.
//!
//! For a strict generator `phi` (decreasing, convex, phi(1)=0) the copula
//! and its derivatives are
//!
//! ```text
//! C(u,v)  = phi^{-1}(phi(u) + phi(v))
//! h(v|u)  = phi'(u) / phi'(C)
//! c(u,v)  = -phi''(C) phi'(u) phi'(v) / phi'(C)^3
//! ```
//!
//! so each family only has to supply `phi`, `phi^{-1}`, `ln|phi'|` and
//! `ln phi''`. Those are evaluated in log space; the polynomial brackets in
//! the second derivatives are combined with log-sum-exp so the densities
//! stay finite close to the corners.

use crate::special::{log_expm1, log_sum_exp};

use super::families::{ln_one_minus_exp, log1p_exp};

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) enum BbKind {
    /// Clayton-Gumbel: `phi(t) = (t^-theta - 1)^delta`, theta > 0, delta >= 1.
    Bb1,
    /// Joe-Gumbel: `phi(t) = (-ln(1 - (1-t)^theta))^delta`, theta, delta >= 1.
    Bb6,
    /// Joe-Clayton: `phi(t) = (1 - (1-t)^theta)^-delta - 1`, theta >= 1, delta > 0.
    Bb7,
    /// Joe-Frank: `phi(t) = -ln((1 - (1 - delta t)^theta) / (1 - (1-delta)^theta))`,
    /// theta >= 1, delta in (0, 1).
    Bb8,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct BbGenerator {
    pub kind: BbKind,
    pub theta: f64,
    pub delta: f64,
}

impl BbGenerator {
    pub(crate) fn phi(&self, t: f64) -> f64 {
        let (theta, delta) = (self.theta, self.delta);
        match self.kind {
            BbKind::Bb1 => (delta * log_expm1(-theta * t.ln())).exp(),
            BbKind::Bb6 => {
                let ln_w = ln_one_minus_exp(theta * (-t).ln_1p());
                (delta * (-ln_w).ln()).exp()
            }
            BbKind::Bb7 => {
                let ln_w = ln_one_minus_exp(theta * (-t).ln_1p());
                (-delta * ln_w).exp_m1()
            }
            BbKind::Bb8 => {
                let ln_w = ln_one_minus_exp(theta * (-delta * t).ln_1p());
                let ln_eta = ln_one_minus_exp(theta * (1.0 - delta).ln());
                ln_eta - ln_w
            }
        }
    }

    /// `ln phi(t)`, used by the one-dimensional Kendall tau integral.
    pub(crate) fn ln_phi(&self, t: f64) -> f64 {
        let (theta, delta) = (self.theta, self.delta);
        match self.kind {
            BbKind::Bb1 => delta * log_expm1(-theta * t.ln()),
            BbKind::Bb6 => {
                let ln_w = ln_one_minus_exp(theta * (-t).ln_1p());
                delta * (-ln_w).ln()
            }
            BbKind::Bb7 => {
                let ln_w = ln_one_minus_exp(theta * (-t).ln_1p());
                log_expm1(-delta * ln_w)
            }
            BbKind::Bb8 => self.phi(t).ln(),
        }
    }

    pub(crate) fn phi_inv(&self, s: f64) -> f64 {
        let (theta, delta) = (self.theta, self.delta);
        match self.kind {
            BbKind::Bb1 => (-log1p_exp(s.ln() / delta) / theta).exp(),
            BbKind::Bb6 => {
                let l = (s.ln() / delta).exp();
                1.0 - (ln_one_minus_exp(-l) / theta).exp()
            }
            BbKind::Bb7 => {
                let ln_w = -s.ln_1p() / delta;
                1.0 - (ln_one_minus_exp(ln_w) / theta).exp()
            }
            BbKind::Bb8 => {
                let ln_eta = ln_one_minus_exp(theta * (1.0 - delta).ln());
                let w = (ln_eta - s).exp();
                (1.0 - ((-w).ln_1p() / theta).exp()) / delta
            }
        }
    }

    /// `ln |phi'(t)|` (phi' is negative on (0,1)).
    pub(crate) fn ln_neg_phi_d(&self, t: f64) -> f64 {
        let (theta, delta) = (self.theta, self.delta);
        match self.kind {
            BbKind::Bb1 => {
                let ln_g = log_expm1(-theta * t.ln());
                (theta * delta).ln() - (theta + 1.0) * t.ln() + (delta - 1.0) * ln_g
            }
            BbKind::Bb6 => {
                let lq = (-t).ln_1p();
                let ln_w = ln_one_minus_exp(theta * lq);
                let ln_l = (-ln_w).ln();
                (theta * delta).ln() + (theta - 1.0) * lq + (delta - 1.0) * ln_l - ln_w
            }
            BbKind::Bb7 => {
                let lq = (-t).ln_1p();
                let ln_w = ln_one_minus_exp(theta * lq);
                (theta * delta).ln() + (theta - 1.0) * lq - (delta + 1.0) * ln_w
            }
            BbKind::Bb8 => {
                let lq = (-delta * t).ln_1p();
                let ln_w = ln_one_minus_exp(theta * lq);
                (theta * delta).ln() + (theta - 1.0) * lq - ln_w
            }
        }
    }

    /// `ln phi''(t)` (phi'' is positive on (0,1)).
    pub(crate) fn ln_phi_dd(&self, t: f64) -> f64 {
        let (theta, delta) = (self.theta, self.delta);
        match self.kind {
            BbKind::Bb1 => {
                let lt = t.ln();
                let ln_g = log_expm1(-theta * lt);
                let term1 = (theta + 1.0).ln() + ln_g;
                let term2 = if delta > 1.0 {
                    (theta * (delta - 1.0)).ln() - theta * lt
                } else {
                    f64::NEG_INFINITY
                };
                (theta * delta).ln() - (theta + 2.0) * lt
                    + (delta - 2.0) * ln_g
                    + log_sum_exp(term1, term2)
            }
            BbKind::Bb6 => {
                let lq = (-t).ln_1p();
                let ln_w = ln_one_minus_exp(theta * lq);
                let ln_l = (-ln_w).ln();
                let t1 = if theta > 1.0 {
                    (theta - 1.0).ln() + ln_l + ln_w
                } else {
                    f64::NEG_INFINITY
                };
                let t2 = if delta > 1.0 {
                    (theta * (delta - 1.0)).ln() + theta * lq
                } else {
                    f64::NEG_INFINITY
                };
                let t3 = theta.ln() + theta * lq + ln_l;
                (theta * delta).ln() + (theta - 2.0) * lq + (delta - 2.0) * ln_l - 2.0 * ln_w
                    + log_sum_exp(log_sum_exp(t1, t2), t3)
            }
            BbKind::Bb7 => {
                let lq = (-t).ln_1p();
                let ln_w = ln_one_minus_exp(theta * lq);
                let t1 = if theta > 1.0 {
                    (theta - 1.0).ln() + ln_w
                } else {
                    f64::NEG_INFINITY
                };
                let t2 = ((delta + 1.0) * theta).ln() + theta * lq;
                (theta * delta).ln() + (theta - 2.0) * lq - (delta + 2.0) * ln_w
                    + log_sum_exp(t1, t2)
            }
            BbKind::Bb8 => {
                let lq = (-delta * t).ln_1p();
                let ln_w = ln_one_minus_exp(theta * lq);
                let t1 = theta.ln() + theta * lq;
                let t2 = if theta > 1.0 {
                    (theta - 1.0).ln() + ln_w
                } else {
                    f64::NEG_INFINITY
                };
                theta.ln() + 2.0 * delta.ln() + (theta - 2.0) * lq - 2.0 * ln_w
                    + log_sum_exp(t1, t2)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gens() -> Vec<BbGenerator> {
        vec![
            BbGenerator {
                kind: BbKind::Bb1,
                theta: 0.8,
                delta: 1.6,
            },
            BbGenerator {
                kind: BbKind::Bb1,
                theta: 2.5,
                delta: 1.0 + 1e-6,
            },
            BbGenerator {
                kind: BbKind::Bb6,
                theta: 1.7,
                delta: 1.4,
            },
            BbGenerator {
                kind: BbKind::Bb7,
                theta: 1.6,
                delta: 0.9,
            },
            BbGenerator {
                kind: BbKind::Bb8,
                theta: 3.0,
                delta: 0.7,
            },
        ]
    }

    #[test]
    fn phi_inv_round_trip() {
        for g in gens() {
            for i in 1..40 {
                let t = i as f64 / 40.0;
                let s = g.phi(t);
                assert!(s >= 0.0, "{g:?} t={t}");
                let back = g.phi_inv(s);
                assert!((back - t).abs() < 1e-9, "{g:?} t={t} back={back}");
            }
        }
    }

    #[test]
    fn phi_decreasing_and_zero_at_one() {
        for g in gens() {
            let mut prev = f64::INFINITY;
            for i in 1..=40 {
                let t = i as f64 / 41.0;
                let s = g.phi(t);
                assert!(s < prev, "{g:?} t={t}");
                prev = s;
            }
            assert!(g.phi(1.0 - 1e-12).abs() < 1e-9, "{g:?}");
        }
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let h = 1e-6;
        for g in gens() {
            for &t in &[0.08, 0.35, 0.6, 0.92] {
                let fd1 = (g.phi(t + h) - g.phi(t - h)) / (2.0 * h);
                let an1 = -g.ln_neg_phi_d(t).exp();
                assert!(
                    ((fd1 - an1) / an1).abs() < 1e-5,
                    "{g:?} first deriv at {t}: fd={fd1} an={an1}"
                );
                let fd2 = (g.phi(t + h) - 2.0 * g.phi(t) + g.phi(t - h)) / (h * h);
                let an2 = g.ln_phi_dd(t).exp();
                assert!(
                    ((fd2 - an2) / an2).abs() < 1e-3,
                    "{g:?} second deriv at {t}: fd={fd2} an={an2}"
                );
            }
        }
    }
}
