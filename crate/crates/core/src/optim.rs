//! Derivative-free minimization (Nelder-Mead simplex).
//!
//! The alignment objective is a Hausdorff distance over a rigid-motion
//! group: piecewise smooth, cheap-ish to evaluate, and full of shallow
//! local minima. Nelder-Mead with multi-start restarts is the standard
//! tool for that regime; this implementation is deterministic (no
//! internal randomness, stable tie-breaking) so results are reproducible
//! across runs given the same starting simplex.

#[derive(Clone, Debug)]
pub struct NelderMeadCfg {
    /// Hard cap on main-loop iterations.
    pub max_iters: usize,
    /// Converged when the simplex diameter (max vertex distance in
    /// parameter space) falls below this.
    pub tol_diameter: f64,
    /// Initial simplex edge length along each coordinate.
    pub initial_step: f64,
}

impl Default for NelderMeadCfg {
    fn default() -> Self {
        NelderMeadCfg {
            max_iters: 500,
            tol_diameter: 1e-6,
            initial_step: 0.25,
        }
    }
}

#[derive(Clone, Debug)]
pub struct NmResult {
    pub best: Vec<f64>,
    pub value: f64,
    pub iterations: usize,
    pub evals: usize,
    pub converged: bool,
}

/// Standard Nelder-Mead coefficients: reflection 1, expansion 2,
/// contraction 1/2, shrink 1/2.
const ALPHA: f64 = 1.0;
const GAMMA: f64 = 2.0;
const RHO: f64 = 0.5;
const SIGMA: f64 = 0.5;

/// Minimize `f` starting from `x0`, with an axis-aligned initial simplex.
///
/// `bounds`, when given per coordinate, clamp every trial vertex (simple
/// box projection); pass `None` for a free coordinate.
pub fn nelder_mead<F>(
    mut f: F,
    x0: &[f64],
    cfg: &NelderMeadCfg,
    bounds: Option<&[Option<(f64, f64)>]>,
) -> NmResult
where
    F: FnMut(&[f64]) -> f64,
{
    let n = x0.len();
    let mut evals = 0usize;
    let clamp = |x: &mut Vec<f64>| {
        if let Some(bs) = bounds {
            for (xi, b) in x.iter_mut().zip(bs) {
                if let Some((lo, hi)) = b {
                    *xi = xi.clamp(*lo, *hi);
                }
            }
        }
    };

    if n == 0 {
        let v = f(x0);
        return NmResult {
            best: Vec::new(),
            value: v,
            iterations: 0,
            evals: 1,
            converged: true,
        };
    }

    // initial simplex: x0 and x0 + step e_i
    let mut simplex: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    let mut values: Vec<f64> = Vec::with_capacity(n + 1);
    {
        let mut v0 = x0.to_vec();
        clamp(&mut v0);
        values.push(f(&v0));
        evals += 1;
        simplex.push(v0);
        for i in 0..n {
            let mut v = x0.to_vec();
            v[i] += cfg.initial_step;
            clamp(&mut v);
            // if clamping collapsed the step, go the other way
            if (v[i] - x0[i]).abs() < 1e-15 {
                v[i] = x0[i] - cfg.initial_step;
                clamp(&mut v);
            }
            values.push(f(&v));
            evals += 1;
            simplex.push(v);
        }
    }

    let mut iterations = 0usize;
    let mut converged = false;

    // index order by value, ties broken by index for determinism
    let mut order: Vec<usize> = (0..=n).collect();

    while iterations < cfg.max_iters {
        order.sort_by(|&a, &b| {
            values[a]
                .partial_cmp(&values[b])
                .unwrap_or(std::cmp::Ordering::Equal)
                .then(a.cmp(&b))
        });
        let best = order[0];
        let worst = order[n];
        let second_worst = order[n - 1];

        // convergence: simplex diameter
        let mut diameter: f64 = 0.0;
        for i in 0..=n {
            for j in (i + 1)..=n {
                let mut d2 = 0.0;
                for k in 0..n {
                    let d = simplex[i][k] - simplex[j][k];
                    d2 += d * d;
                }
                diameter = diameter.max(d2.sqrt());
            }
        }
        if diameter < cfg.tol_diameter {
            converged = true;
            break;
        }

        // centroid of all but worst
        let mut centroid = vec![0.0; n];
        for &i in order.iter().take(n) {
            for k in 0..n {
                centroid[k] += simplex[i][k];
            }
        }
        for c in &mut centroid {
            *c /= n as f64;
        }

        let blend = |coef: f64| -> Vec<f64> {
            let mut v = vec![0.0; n];
            for k in 0..n {
                v[k] = centroid[k] + coef * (centroid[k] - simplex[worst][k]);
            }
            v
        };

        let mut reflected = blend(ALPHA);
        clamp(&mut reflected);
        let fr = f(&reflected);
        evals += 1;

        if fr < values[best] {
            let mut expanded = blend(GAMMA);
            clamp(&mut expanded);
            let fe = f(&expanded);
            evals += 1;
            if fe < fr {
                simplex[worst] = expanded;
                values[worst] = fe;
            } else {
                simplex[worst] = reflected;
                values[worst] = fr;
            }
        } else if fr < values[second_worst] {
            simplex[worst] = reflected;
            values[worst] = fr;
        } else {
            // contraction (outside if reflected beats worst, else inside)
            let (mut contracted, against) = if fr < values[worst] {
                (blend(RHO), fr)
            } else {
                (blend(-RHO), values[worst])
            };
            clamp(&mut contracted);
            let fc = f(&contracted);
            evals += 1;
            if fc < against {
                simplex[worst] = contracted;
                values[worst] = fc;
            } else {
                // shrink toward best
                let best_vertex = simplex[best].clone();
                for i in 0..=n {
                    if i == best {
                        continue;
                    }
                    for k in 0..n {
                        simplex[i][k] =
                            best_vertex[k] + SIGMA * (simplex[i][k] - best_vertex[k]);
                    }
                    clamp(&mut simplex[i]);
                    values[i] = f(&simplex[i]);
                    evals += 1;
                }
            }
        }
        iterations += 1;
    }

    order.sort_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.cmp(&b))
    });
    let best = order[0];
    NmResult {
        best: simplex[best].clone(),
        value: values[best],
        iterations,
        evals,
        converged,
    }
}
