//! One-dimensional Gauss-Legendre rules, mapped to finite intervals.
//! Nodes and weights are computed by Newton iteration on the Legendre
//! polynomial, so any order is available without tables.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

/// A Gauss-Legendre rule on the canonical interval [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

static RULE_CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();

impl GaussLegendre {
    /// Build an `n`-point rule. Panics if `n == 0`.
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "quadrature order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            // Tricomi-style initial guess, then Newton.
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre_and_deriv(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-15 {
                    break;
                }
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Shared rule of order `n`; node construction is O(n^2), so hot
    /// paths reuse cached instances.
    pub fn shared(n: usize) -> Arc<GaussLegendre> {
        let cache = RULE_CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        let mut map = cache.lock().expect("rule cache lock");
        map.entry(n)
            .or_insert_with(|| Arc::new(GaussLegendre::new(n)))
            .clone()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Integrate `f` over [a, b].
    pub fn integrate<F: FnMut(f64) -> f64>(&self, a: f64, b: f64, mut f: F) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = 0.0;
        for (&x, &w) in self.nodes.iter().zip(&self.weights) {
            acc += w * f(mid + half * x);
        }
        acc * half
    }

    /// Nodes and weights mapped to [a, b]; all nodes are interior.
    pub fn mapped(&self, a: f64, b: f64) -> impl Iterator<Item = (f64, f64)> + '_ {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(move |(&x, &w)| (mid + half * x, w * half))
    }
}

/// Legendre polynomial P_n and its derivative at `x` by the three-term
/// recurrence.
fn legendre_and_deriv(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    if n == 1 {
        return (x, 1.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn integrates_polynomials_exactly() {
        let rule = GaussLegendre::new(5);
        // degree up to 2n-1 = 9 is exact
        let got = rule.integrate(0.0, 1.0, |x| x.powi(9));
        assert!((got - 0.1).abs() < 1e-14);
        let got = rule.integrate(-1.0, 2.0, |x| 3.0 * x * x);
        assert!((got - 9.0).abs() < 1e-12);
    }

    #[test]
    fn node_doubling_converges_on_smooth_integrand() {
        let f = |x: f64| (5.0 * x).sin().exp();
        let a = GaussLegendre::new(32).integrate(0.0, 1.0, f);
        let b = GaussLegendre::new(64).integrate(0.0, 1.0, f);
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn known_low_order_nodes() {
        let rule = GaussLegendre::new(3);
        let expect = [-0.774_596_669_241_483_4, 0.0, 0.774_596_669_241_483_4];
        for (got, want) in rule.nodes.iter().zip(expect) {
            assert!((got - want).abs() < 1e-14);
        }
        let wexpect = [5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0];
        for (got, want) in rule.weights.iter().zip(wexpect) {
            assert!((got - want).abs() < 1e-14);
        }
    }

    #[test]
    fn mapped_nodes_stay_interior() {
        let rule = GaussLegendre::new(64);
        for (x, w) in rule.mapped(0.0, 1.0) {
            assert!(x > 0.0 && x < 1.0);
            assert!(w > 0.0);
        }
    }
}
