//! Derivative-free bounded minimization: Brent's method for one-parameter
//! problems, Nelder-Mead with box projection for two and three parameters.
//! Both report the best point seen, never an error, and flag whether the
//! iteration cap was hit.

#[derive(Debug, Clone)]
pub struct OptimResult {
    pub x: Vec<f64>,
    pub fx: f64,
    pub iterations: usize,
    pub converged: bool,
}

const GOLD: f64 = 0.381_966_011_250_105; // 2 - golden ratio

/// Brent minimization on `[lo, hi]` starting from `x0`, parameter
/// tolerance `tol`.
pub fn brent_min<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    x0: f64,
    tol: f64,
    max_iter: usize,
) -> OptimResult {
    let (mut a, mut b) = (lo.min(hi), lo.max(hi));
    let mut x = x0.clamp(a, b);
    let mut w = x;
    let mut v = x;
    let mut fx = f(x);
    let mut fw = fx;
    let mut fv = fx;
    let mut d: f64 = 0.0;
    let mut e: f64 = 0.0;
    let mut iterations = 0;
    let mut converged = false;

    for it in 0..max_iter {
        iterations = it + 1;
        let m = 0.5 * (a + b);
        let tol1 = tol * x.abs() + 1e-12;
        let tol2 = 2.0 * tol1;
        if (x - m).abs() <= tol2 - 0.5 * (b - a) {
            converged = true;
            break;
        }

        let mut use_golden = true;
        if e.abs() > tol1 {
            // parabolic interpolation through (v, w, x)
            let r = (x - w) * (fx - fv);
            let q0 = (x - v) * (fx - fw);
            let mut p = (x - v) * q0 - (x - w) * r;
            let mut q = 2.0 * (q0 - r);
            if q > 0.0 {
                p = -p;
            } else {
                q = -q;
            }
            let e_prev = e;
            e = d;
            if p.abs() < (0.5 * q * e_prev).abs() && p > q * (a - x) && p < q * (b - x) {
                d = p / q;
                let u = x + d;
                if u - a < tol2 || b - u < tol2 {
                    d = if x < m { tol1 } else { -tol1 };
                }
                use_golden = false;
            }
        }
        if use_golden {
            e = if x < m { b - x } else { a - x };
            d = GOLD * e;
        }

        let u = if d.abs() >= tol1 {
            x + d
        } else if d >= 0.0 {
            x + tol1
        } else {
            x - tol1
        };
        let fu = f(u);

        if fu <= fx {
            if u >= x {
                a = x;
            } else {
                b = x;
            }
            v = w;
            fv = fw;
            w = x;
            fw = fx;
            x = u;
            fx = fu;
        } else {
            if u < x {
                a = u;
            } else {
                b = u;
            }
            if fu <= fw || w == x {
                v = w;
                fv = fw;
                w = u;
                fw = fu;
            } else if fu <= fv || v == x || v == w {
                v = u;
                fv = fu;
            }
        }
    }

    OptimResult {
        x: vec![x],
        fx,
        iterations,
        converged,
    }
}

/// Nelder-Mead with every trial point clamped into the box. Convergence
/// when the simplex diameter in parameter space drops below `tol`.
pub fn nelder_mead_box<F: FnMut(&[f64]) -> f64>(
    mut f: F,
    lower: &[f64],
    upper: &[f64],
    x0: &[f64],
    tol: f64,
    max_iter: usize,
) -> OptimResult {
    let dim = x0.len();
    assert!(dim >= 1 && lower.len() == dim && upper.len() == dim);

    let clamp = |x: &mut Vec<f64>| {
        for i in 0..dim {
            x[i] = x[i].clamp(lower[i], upper[i]);
        }
    };

    // initial simplex: x0 plus axis steps of 10% of the box edge
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(dim + 1);
    let mut start = x0.to_vec();
    clamp(&mut start);
    simplex.push(start.clone());
    for i in 0..dim {
        let mut v = start.clone();
        let step = 0.1 * (upper[i] - lower[i]);
        v[i] = if v[i] + step <= upper[i] {
            v[i] + step
        } else {
            v[i] - step
        };
        simplex.push(v);
    }
    let mut fvals: Vec<f64> = simplex.iter().map(|v| f(v)).collect();

    let (alpha, gamma, rho, sigma) = (1.0, 2.0, 0.5, 0.5);
    let mut iterations = 0;
    let mut converged = false;
    let mut evals_order: Vec<usize> = (0..=dim).collect();

    for it in 0..max_iter {
        iterations = it + 1;
        evals_order.sort_by(|&i, &j| {
            fvals[i]
                .partial_cmp(&fvals[j])
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let best = evals_order[0];
        let worst = evals_order[dim];
        let second_worst = evals_order[dim - 1];

        // simplex diameter
        let mut diam: f64 = 0.0;
        for i in 0..=dim {
            for j in (i + 1)..=dim {
                let d: f64 = simplex[i]
                    .iter()
                    .zip(&simplex[j])
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum::<f64>()
                    .sqrt();
                diam = diam.max(d);
            }
        }
        if diam < tol {
            converged = true;
            break;
        }

        // centroid of all but the worst
        let mut centroid = vec![0.0; dim];
        for &i in evals_order.iter().take(dim) {
            for k in 0..dim {
                centroid[k] += simplex[i][k] / dim as f64;
            }
        }

        let mut reflected: Vec<f64> = centroid
            .iter()
            .zip(&simplex[worst])
            .map(|(c, w)| c + alpha * (c - w))
            .collect();
        clamp(&mut reflected);
        let fr = f(&reflected);

        if fr < fvals[best] {
            let mut expanded: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + gamma * (c - w))
                .collect();
            clamp(&mut expanded);
            let fe = f(&expanded);
            if fe < fr {
                simplex[worst] = expanded;
                fvals[worst] = fe;
            } else {
                simplex[worst] = reflected;
                fvals[worst] = fr;
            }
        } else if fr < fvals[second_worst] {
            simplex[worst] = reflected;
            fvals[worst] = fr;
        } else {
            let mut contracted: Vec<f64> = centroid
                .iter()
                .zip(&simplex[worst])
                .map(|(c, w)| c + rho * (w - c))
                .collect();
            clamp(&mut contracted);
            let fc = f(&contracted);
            if fc < fvals[worst] {
                simplex[worst] = contracted;
                fvals[worst] = fc;
            } else {
                // shrink toward the best vertex
                let best_point = simplex[best].clone();
                for i in 0..=dim {
                    if i == best {
                        continue;
                    }
                    for k in 0..dim {
                        simplex[i][k] = best_point[k] + sigma * (simplex[i][k] - best_point[k]);
                    }
                    clamp(&mut simplex[i]);
                    fvals[i] = f(&simplex[i]);
                }
            }
        }
    }

    let mut best = 0;
    for i in 1..=dim {
        if fvals[i] < fvals[best] {
            best = i;
        }
    }
    OptimResult {
        x: simplex[best].clone(),
        fx: fvals[best],
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn brent_finds_quadratic_minimum() {
        let r = brent_min(|x| (x - 1.3) * (x - 1.3) + 0.5, -5.0, 5.0, 0.0, 1e-8, 200);
        assert!(r.converged);
        assert!((r.x[0] - 1.3).abs() < 1e-6);
        assert!((r.fx - 0.5).abs() < 1e-10);
    }

    #[test]
    fn brent_respects_bounds() {
        // minimum outside the box lands on the boundary
        let r = brent_min(|x| (x - 10.0) * (x - 10.0), 0.0, 2.0, 1.0, 1e-8, 200);
        assert!((r.x[0] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn brent_never_worse_than_start() {
        let f = |x: f64| x.sin() * (3.0 * x).cos() + 0.1 * x * x;
        let x0 = 0.7;
        let r = brent_min(f, -4.0, 4.0, x0, 1e-8, 300);
        assert!(r.fx <= f(x0) + 1e-12);
    }

    #[test]
    fn nelder_mead_rosenbrock_2d() {
        let f = |x: &[f64]| {
            let (a, b) = (x[0], x[1]);
            (1.0 - a) * (1.0 - a) + 100.0 * (b - a * a) * (b - a * a)
        };
        let r = nelder_mead_box(f, &[-2.0, -2.0], &[2.0, 2.0], &[-1.0, 1.0], 1e-9, 2000);
        assert!((r.x[0] - 1.0).abs() < 1e-4, "{:?}", r);
        assert!((r.x[1] - 1.0).abs() < 1e-4);
    }

    #[test]
    fn nelder_mead_projects_into_box() {
        let f = |x: &[f64]| (x[0] + 3.0) * (x[0] + 3.0) + (x[1] - 0.5) * (x[1] - 0.5);
        let r = nelder_mead_box(f, &[0.0, 0.0], &[1.0, 1.0], &[0.5, 0.5], 1e-9, 1000);
        assert!(r.x[0].abs() < 1e-5);
        assert!((r.x[1] - 0.5).abs() < 1e-5);
        assert!(r.x.iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn iteration_cap_flags_non_convergence() {
        let r = brent_min(|x| x.powi(2), -1e6, 1e6, 9e5, 1e-14, 3);
        assert!(!r.converged);
        assert_eq!(r.iterations, 3);
    }
}
