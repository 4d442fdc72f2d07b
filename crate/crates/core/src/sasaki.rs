//! Iterated Sasaki metrics and capped unit-bundle sampling.
//!
//! The Sasaki metric on a tangent bundle splits each tangent vector of the
//! bundle into a horizontal and a vertical part with the Levi-Civita
//! connection and measures both with the base metric. Iterating the
//! construction equips every `T^l M` with a metric. In the block
//! coordinates of [`JetPoint`] the metric of `T^l M` at `v = (p, t)` is
//!
//! ```text
//! G_l(v) = [ A + M^T A M    M^T A ]        A = G_{l-1}(p)
//!          [ A M            A     ]        M_{ki} = Gamma^k_{ij}(p) t_j
//! ```
//!
//! where the Christoffel symbols are those of `G_{l-1}`: analytic (or
//! finite-difference) chart symbols at level 0, central finite differences
//! of the level-`l-1` gram above that. Over a flat base every level is
//! exactly the identity — the finite differences of a constant gram vanish
//! — which is what makes lifted clouds in Euclidean targets live in a flat
//! space of dimension `2^l * m`.
//!
//! The unit bundle `S^l M` (top-level vector of unit `G_{l-1}`-norm) is
//! non-compact for `l >= 2` because intermediate fibers are unbounded;
//! sampling therefore caps every intermediate fiber at metric norm `R`.
//! Estimates downstream are documented as R-truncated.

use crate::chart::MetricChart;
use crate::error::{GeomError, Result};
use crate::jet::JetPoint;
use crate::linalg::{solve_lower_transposed, Mat};
use crate::real::Real;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Iterated Sasaki metric evaluator over a base chart.
#[derive(Clone)]
pub struct SasakiMetric<T: Real> {
    chart: MetricChart<T>,
    fd_step: f64,
}

impl<T: Real> SasakiMetric<T> {
    pub fn new(chart: MetricChart<T>) -> Self {
        SasakiMetric {
            chart,
            fd_step: crate::chart::DEFAULT_FD_STEP,
        }
    }

    pub fn with_step(chart: MetricChart<T>, fd_step: f64) -> Self {
        SasakiMetric { chart, fd_step }
    }

    pub fn chart(&self) -> &MetricChart<T> {
        &self.chart
    }

    /// Gram matrix of the level-`v.order()` Sasaki metric at `v`:
    /// the metric of `T^l M` on tangent coordinates of dimension `v.dim()`.
    pub fn gram(&self, v: &JetPoint<T>) -> Result<Mat<T>> {
        if v.base_dim() != self.chart.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: self.chart.dim(),
                got: v.base_dim(),
                context: "sasaki gram base dimension",
            });
        }
        self.gram_rec(v.order(), v.coords())
    }

    /// Bilinear evaluation `g_S^l(x, y)` at `v`, with `x`, `y` tangent
    /// coordinates at `v` (same dimension as `v`).
    pub fn eval(&self, v: &JetPoint<T>, x: &[T], y: &[T]) -> Result<T> {
        if x.len() != v.dim() || y.len() != v.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: v.dim(),
                got: if x.len() != v.dim() { x.len() } else { y.len() },
                context: "sasaki eval tangent dimension",
            });
        }
        let g = self.gram(v)?;
        Ok(g.bilinear(x, y))
    }

    fn gram_rec(&self, order: usize, coords: &[T]) -> Result<Mat<T>> {
        if order == 0 {
            return self.chart.metric_eval(coords);
        }
        let h = coords.len() / 2;
        let (p, t) = coords.split_at(h);
        let a = self.gram_rec(order - 1, p)?;
        let m = self.connection_contract(order - 1, p, t)?;
        let am = a.matmul(&m);
        let mta = am.transpose(); // (A M)^T = M^T A by symmetry of A
        let mtam = m.transpose().matmul(&am);
        let mut g = Mat::zeros(2 * h);
        for i in 0..h {
            for j in 0..h {
                g[(i, j)] = a[(i, j)] + mtam[(i, j)];
                g[(i, h + j)] = mta[(i, j)];
                g[(h + i, j)] = am[(i, j)];
                g[(h + i, h + j)] = a[(i, j)];
            }
        }
        Ok(g)
    }

    /// `M_{ki} = Gamma^k_{ij} t_j` for the Christoffel symbols of the
    /// level-`level` metric at `p`.
    fn connection_contract(&self, level: usize, p: &[T], t: &[T]) -> Result<Mat<T>> {
        if level == 0 {
            let gamma = self.chart.christoffel(p, self.fd_step)?;
            return Ok(gamma.contract_right(t));
        }
        // Finite-difference Levi-Civita symbols of the level gram, folded
        // with t on the fly.
        let dim = p.len();
        let g = self.gram_rec(level, p)?;
        let ginv = g.inverse().map_err(|_| GeomError::SingularMatrix {
            context: "sasaki level gram not invertible",
        })?;
        let h = T::of(self.fd_step);
        let two_h = T::of(2.0 * self.fd_step);
        let mut probe = p.to_vec();
        let mut dg: Vec<Mat<T>> = Vec::with_capacity(dim);
        for a in 0..dim {
            let keep = probe[a];
            probe[a] = keep + h;
            let plus = self.gram_rec(level, &probe)?;
            probe[a] = keep - h;
            let minus = self.gram_rec(level, &probe)?;
            probe[a] = keep;
            dg.push(Mat::from_fn(dim, |i, j| {
                (plus[(i, j)] - minus[(i, j)]) / two_h
            }));
        }
        let half = T::of(0.5);
        let mut m = Mat::zeros(dim);
        for k in 0..dim {
            for i in 0..dim {
                let mut acc = T::zero();
                for j in 0..dim {
                    let mut sum = T::zero();
                    for l in 0..dim {
                        sum += ginv[(k, l)] * (dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)]);
                    }
                    acc += half * sum * t[j];
                }
                m[(k, i)] = acc;
            }
        }
        Ok(m)
    }
}

/// Per-level sample counts for [`unit_bundle_sample`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleCounts {
    /// Grid points per chart axis (length = chart dimension).
    pub base: Vec<usize>,
    /// Points per intermediate fiber, one entry per level `1..order-1`
    /// (empty for orders 0 and 1).
    pub intermediate: Vec<usize>,
    /// Directions in the top-level fiber (unused at order 0).
    pub top: usize,
}

impl SampleCounts {
    pub fn total(&self, order: usize) -> usize {
        let base: usize = self.base.iter().product();
        if order == 0 {
            return base;
        }
        base * self.intermediate.iter().product::<usize>() * self.top
    }
}

/// A finite sample of the capped unit bundle `S^order M`.
#[derive(Clone, Debug)]
pub struct UnitBundleSample<T> {
    pub order: usize,
    pub fiber_cap: f64,
    pub chart_label: String,
    pub counts: SampleCounts,
    pub points: Vec<JetPoint<T>>,
}

/// Deterministic grid over the chart domain: equally spaced (no duplicate
/// endpoint) on periodic axes, midpoint-spaced on bounded axes so that
/// boundary singularities and finite-difference margins are avoided.
pub fn base_grid<T: Real>(chart: &MetricChart<T>, counts: &[usize]) -> Result<Vec<Vec<T>>> {
    if counts.len() != chart.dim() {
        return Err(GeomError::DimensionMismatch {
            expected: chart.dim(),
            got: counts.len(),
            context: "base grid axis counts",
        });
    }
    if counts.iter().any(|&c| c == 0) {
        return Err(GeomError::InvalidConfig(
            "base grid counts must be positive".into(),
        ));
    }
    let mut axes_values: Vec<Vec<T>> = Vec::with_capacity(counts.len());
    for (axis, &c) in chart.domain().axes.iter().zip(counts) {
        let span = axis.span();
        let vals: Vec<T> = (0..c)
            .map(|j| {
                let frac = if axis.periodic {
                    j as f64 / c as f64
                } else {
                    (j as f64 + 0.5) / c as f64
                };
                T::of(axis.lo + span * frac)
            })
            .collect();
        axes_values.push(vals);
    }
    let total: usize = counts.iter().product();
    let mut grid = Vec::with_capacity(total);
    let mut idx = vec![0usize; counts.len()];
    for _ in 0..total {
        grid.push(
            idx.iter()
                .enumerate()
                .map(|(a, &j)| axes_values[a][j])
                .collect(),
        );
        for a in (0..counts.len()).rev() {
            idx[a] += 1;
            if idx[a] < counts[a] {
                break;
            }
            idx[a] = 0;
        }
    }
    Ok(grid)
}

/// Deterministic quasi-uniform directions on the Euclidean unit sphere of
/// the given dimension: alternating signs in dimension 1, equally spaced
/// angles in dimension 2, seeded Gaussian directions above that.
fn unit_directions(dim: usize, count: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    match dim {
        0 => vec![],
        1 => (0..count)
            .map(|i| vec![if i % 2 == 0 { 1.0 } else { -1.0 }])
            .collect(),
        2 => (0..count)
            .map(|i| {
                let ang = 2.0 * std::f64::consts::PI * i as f64 / count as f64;
                vec![ang.cos(), ang.sin()]
            })
            .collect(),
        _ => (0..count)
            .map(|_| loop {
                let v: Vec<f64> = (0..dim).map(|_| gaussian(rng)).collect();
                let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
                if norm > 1e-8 {
                    break v.into_iter().map(|x| x / norm).collect();
                }
            })
            .collect(),
    }
}

fn gaussian(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.gen_range(1e-16..1.0);
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

/// Vectors filling the metric ball of radius `cap` in a fiber of the given
/// dimension, quasi-uniformly. `l` is the lower-triangular Cholesky factor
/// of the gram, so `l^{-T} d` has metric norm `|d|`. Dimension-1 fibers use
/// a symmetric ladder of radii (including 0 for odd counts); higher
/// dimensions combine a zero vector with direction-times-radius shells.
fn ball_vectors<T: Real>(
    l: &Mat<T>,
    count: usize,
    cap: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<Vec<T>> {
    let dim = l.dim();
    if dim == 1 {
        // ladder -cap ..= cap
        return (0..count)
            .map(|i| {
                let t = if count == 1 {
                    0.0
                } else {
                    -cap + 2.0 * cap * i as f64 / (count - 1) as f64
                };
                vec![T::of(t) / l[(0, 0)]]
            })
            .collect();
    }
    let mut out = Vec::with_capacity(count);
    out.push(vec![T::zero(); dim]);
    if count == 1 {
        return out;
    }
    let dirs = unit_directions(dim, count - 1, rng);
    let shells = 3.min(count - 1);
    for (i, d) in dirs.iter().enumerate() {
        let radius = cap * ((i % shells) + 1) as f64 / shells as f64;
        let dt: Vec<T> = d.iter().map(|&x| T::of(x * radius)).collect();
        out.push(solve_lower_transposed(l, &dt));
    }
    out
}

/// Sample the capped unit bundle `S^order M` over a chart.
///
/// Structure: a deterministic base grid, per-level intermediate fiber
/// vectors of metric norm at most `fiber_cap`, and top-level vectors of
/// metric norm exactly 1 (Cholesky-normalized directions). Order 0 returns
/// the bare base grid. The seed only affects direction sets in fiber
/// dimension at least 3.
pub fn unit_bundle_sample<T: Real>(
    chart: &MetricChart<T>,
    order: usize,
    counts: &SampleCounts,
    fiber_cap: f64,
    seed: u64,
) -> Result<UnitBundleSample<T>> {
    if order > crate::jet::MAX_JET_ORDER {
        return Err(GeomError::JetOrderUnsupported {
            requested: order,
            max: crate::jet::MAX_JET_ORDER,
        });
    }
    if order >= 2 && fiber_cap <= 0.0 {
        return Err(GeomError::NonPositive {
            name: "fiber_cap",
            value: fiber_cap,
        });
    }
    if counts.intermediate.len() + 1 < order || (order >= 1 && counts.top == 0) {
        return Err(GeomError::InvalidConfig(format!(
            "sample counts do not cover order {order}: need {} intermediate levels and a positive top count",
            order.saturating_sub(1)
        )));
    }
    let n = chart.dim();
    let sasaki = SasakiMetric::new(chart.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let base = base_grid(chart, &counts.base)?;
    if order == 0 {
        let points = base
            .into_iter()
            .map(|q| JetPoint::new(0, n, q))
            .collect::<Result<Vec<_>>>()?;
        return Ok(UnitBundleSample {
            order,
            fiber_cap,
            chart_label: chart.label().to_string(),
            counts: counts.clone(),
            points,
        });
    }

    // Build level-j points iteratively: level 0 is the base grid; each
    // intermediate level extends every point by a capped fiber vector.
    let mut level_points: Vec<JetPoint<T>> = base
        .into_iter()
        .map(|q| JetPoint::new(0, n, q))
        .collect::<Result<Vec<_>>>()?;
    for (j, &c) in counts.intermediate.iter().enumerate().take(order - 1) {
        if c == 0 {
            return Err(GeomError::InvalidConfig(format!(
                "intermediate count at level {} must be positive",
                j + 1
            )));
        }
        let mut next = Vec::with_capacity(level_points.len() * c);
        for p in &level_points {
            let gram = sasaki.gram(p)?;
            let l = gram.cholesky().map_err(|_| GeomError::SingularMatrix {
                context: "sasaki gram not positive definite in sampling",
            })?;
            for v in ball_vectors(&l, c, fiber_cap, &mut rng) {
                let mut coords = p.coords().to_vec();
                coords.extend_from_slice(&v);
                next.push(JetPoint::new(p.order() + 1, n, coords)?);
            }
        }
        level_points = next;
    }

    // Top level: metric-unit vectors.
    let top_dim = (1usize << (order - 1)) * n;
    let mut points = Vec::with_capacity(level_points.len() * counts.top);
    for p in &level_points {
        let gram = sasaki.gram(p)?;
        let l = gram.cholesky().map_err(|_| GeomError::SingularMatrix {
            context: "sasaki gram not positive definite at top level",
        })?;
        for d in unit_directions(top_dim, counts.top, &mut rng) {
            let dt: Vec<T> = d.iter().map(|&x| T::of(x)).collect();
            let w = solve_lower_transposed(&l, &dt);
            let mut coords = p.coords().to_vec();
            coords.extend_from_slice(&w);
            points.push(JetPoint::new(order, n, coords)?);
        }
    }

    Ok(UnitBundleSample {
        order,
        fiber_cap,
        chart_label: chart.label().to_string(),
        counts: counts.clone(),
        points,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::{circle_chart, flat_chart, sphere_polar_chart};
    use std::sync::Arc;

    fn jp(order: usize, n: usize, coords: &[f64]) -> JetPoint<f64> {
        JetPoint::new(order, n, coords.to_vec()).unwrap()
    }

    #[test]
    fn flat_base_gram_is_identity_at_all_levels() {
        let m = 2;
        let sasaki = SasakiMetric::new(flat_chart::<f64>(m));
        for order in 0..=3usize {
            let dim = (1 << order) * m;
            let coords: Vec<f64> = (0..dim).map(|i| 0.31 * i as f64 - 1.0).collect();
            let g = sasaki.gram(&jp(order, m, &coords)).unwrap();
            let err = g.sub(&Mat::identity(dim)).max_abs();
            assert!(err < 1e-10, "order {order}: {err}");
        }
    }

    #[test]
    fn circle_gram_is_diagonal_r_squared_every_level() {
        // G_0 = [[r^2]] is constant, so every Christoffel vanishes exactly
        // and each level doubles the diagonal identity block.
        let r = 1.7;
        let sasaki = SasakiMetric::new(circle_chart::<f64>(r));
        for order in 0..=3usize {
            let dim = 1 << order;
            let coords: Vec<f64> = (0..dim).map(|i| 0.2 + 0.4 * i as f64).collect();
            let g = sasaki.gram(&jp(order, 1, &coords)).unwrap();
            let expect = Mat::from_fn(dim, |i, j| if i == j { r * r } else { 0.0 });
            assert!(g.sub(&expect).max_abs() < 1e-12, "order {order}");
        }
    }

    #[test]
    fn sphere_level_one_gram_blocks() {
        // At v = (p, u) the gram must be [[A + M^T A M, M^T A], [A M, A]]
        // with A the sphere metric and M the Christoffel contraction.
        let r = 1.3;
        let chart = sphere_polar_chart::<f64>(r);
        let sasaki = SasakiMetric::new(chart.clone());
        let p = [1.1, 0.6];
        let u = [0.4, -0.8];
        let v = jp(1, 2, &[p[0], p[1], u[0], u[1]]);
        let g = sasaki.gram(&v).unwrap();

        let a = chart.metric_eval(&p).unwrap();
        let m = chart
            .christoffel(&p, crate::chart::DEFAULT_FD_STEP)
            .unwrap()
            .contract_right(&u);
        let am = a.matmul(&m);
        for i in 0..2 {
            for j in 0..2 {
                assert!((g[(2 + i, 2 + j)] - a[(i, j)]).abs() < 1e-14);
                assert!((g[(2 + i, j)] - am[(i, j)]).abs() < 1e-14);
                assert!((g[(i, 2 + j)] - am[(j, i)]).abs() < 1e-14);
            }
        }
        // positive definite
        assert!(g.cholesky().is_ok());
        // symmetric
        assert!(g.sub(&g.transpose()).max_abs() < 1e-14);
    }

    #[test]
    fn connection_split_orthogonality() {
        // A horizontal vector (xi, -M xi) is g_S-orthogonal to a purely
        // vertical one (0, eta), exactly, at any base point.
        let r = 1.0;
        let chart = sphere_polar_chart::<f64>(r);
        let sasaki = SasakiMetric::new(chart.clone());
        let p = [0.9, 2.0];
        let u = [0.5, 0.7];
        let v = jp(1, 2, &[p[0], p[1], u[0], u[1]]);
        let m = chart
            .christoffel(&p, crate::chart::DEFAULT_FD_STEP)
            .unwrap()
            .contract_right(&u);
        let xi = [1.0, -0.3];
        let mxi = m.matvec(&xi);
        let horiz = [xi[0], xi[1], -mxi[0], -mxi[1]];
        let vert = [0.0, 0.0, 0.8, 0.25];
        let ip = sasaki.eval(&v, &horiz, &vert).unwrap();
        assert!(ip.abs() < 1e-13, "got {ip}");
        // and the horizontal/vertical norms reproduce the base metric
        let a = chart.metric_eval(&p).unwrap();
        let hh = sasaki.eval(&v, &horiz, &horiz).unwrap();
        assert!((hh - a.bilinear(&xi, &xi)).abs() < 1e-13);
        let vv = sasaki.eval(&v, &vert, &vert).unwrap();
        assert!((vv - a.bilinear(&vert[2..], &vert[2..])).abs() < 1e-13);
    }

    #[test]
    fn level_two_gram_on_sphere_is_symmetric_positive_definite() {
        let chart = sphere_polar_chart::<f64>(1.0);
        let sasaki = SasakiMetric::new(chart);
        let v = jp(
            2,
            2,
            &[1.2, 0.4, 0.3, -0.2, 0.15, 0.4, -0.1, 0.2],
        );
        let g = sasaki.gram(&v).unwrap();
        assert_eq!(g.dim(), 8);
        assert!(g.sub(&g.transpose()).max_abs() < 1e-9);
        assert!(g.cholesky().is_ok());
    }

    #[test]
    fn circle_unit_bundle_tops_are_plus_minus_inverse_radius() {
        let r = 2.0;
        let chart = circle_chart::<f64>(r);
        let counts = SampleCounts {
            base: vec![8],
            intermediate: vec![],
            top: 2,
        };
        let sample = unit_bundle_sample(&chart, 1, &counts, 1.0, 7).unwrap();
        assert_eq!(sample.points.len(), 16);
        for p in &sample.points {
            let u = p.block(1)[0];
            assert!(
                (u.abs() - 1.0 / r).abs() < 1e-14,
                "top fiber {u} not +-1/r"
            );
        }
        // flat line: unit vectors are +-1
        let flat = flat_chart::<f64>(1);
        let sample = unit_bundle_sample(&flat, 1, &counts, 1.0, 7).unwrap();
        for p in &sample.points {
            assert!((p.block(1)[0].abs() - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn unit_norm_invariant_analytic_and_fd() {
        // analytic-christoffel chart: tol 1e-9
        let chart = sphere_polar_chart::<f64>(1.4);
        let counts = SampleCounts {
            base: vec![4, 5],
            intermediate: vec![],
            top: 6,
        };
        let sasaki = SasakiMetric::new(chart.clone());
        let sample = unit_bundle_sample(&chart, 1, &counts, 1.0, 3).unwrap();
        assert_eq!(sample.points.len(), 4 * 5 * 6);
        for p in &sample.points {
            let base = jp(0, 2, p.base());
            let norm = sasaki.eval(&base, p.block(1), p.block(1)).unwrap();
            assert!((norm - 1.0).abs() < 1e-9, "norm {norm}");
        }

        // finite-difference-christoffel chart at order 2: tol 1e-5
        let fd_chart = MetricChart::new(
            "sphere_fd",
            chart.domain().clone(),
            Arc::new(move |p: &[f64]| {
                let s = p[0].sin();
                Mat::diag(&[1.4 * 1.4, 1.4 * 1.4 * s * s])
            }),
            None,
        );
        let counts2 = SampleCounts {
            base: vec![3, 3],
            intermediate: vec![3],
            top: 4,
        };
        let fd_sasaki = SasakiMetric::new(fd_chart.clone());
        let sample2 = unit_bundle_sample(&fd_chart, 2, &counts2, 0.5, 3).unwrap();
        assert_eq!(sample2.points.len(), 3 * 3 * 3 * 4);
        for p in &sample2.points {
            let half = jp(1, 2, &p.coords()[..4]);
            let norm = fd_sasaki.eval(&half, &p.coords()[4..], &p.coords()[4..]).unwrap();
            assert!((norm - 1.0).abs() < 1e-5, "norm {norm}");
            // intermediate cap: |u|_g <= R
            let base = jp(0, 2, p.base());
            let unorm = fd_sasaki.eval(&base, p.block(1), p.block(1)).unwrap();
            assert!(unorm.sqrt() <= 0.5 + 1e-9);
        }
    }

    #[test]
    fn order_two_circle_sample_structure() {
        let chart = circle_chart::<f64>(1.0);
        let counts = SampleCounts {
            base: vec![6],
            intermediate: vec![5],
            top: 8,
        };
        let r_cap = 0.25;
        let sample = unit_bundle_sample(&chart, 2, &counts, r_cap, 11).unwrap();
        assert_eq!(sample.points.len(), 6 * 5 * 8);
        let sasaki = SasakiMetric::new(chart);
        let mut saw_cap = false;
        for p in &sample.points {
            // intermediate ladder: metric norm of u at most R, endpoints hit
            let base = jp(0, 1, p.base());
            let unorm = sasaki.eval(&base, p.block(1), p.block(1)).unwrap().sqrt();
            assert!(unorm <= r_cap + 1e-12);
            if (unorm - r_cap).abs() < 1e-12 {
                saw_cap = true;
            }
            // top vector unit in g_S^1
            let half = jp(1, 1, &p.coords()[..2]);
            let norm = sasaki.eval(&half, &p.coords()[2..], &p.coords()[2..]).unwrap();
            assert!((norm - 1.0).abs() < 1e-12);
        }
        assert!(saw_cap, "ladder endpoints should reach the cap");
    }

    #[test]
    fn base_grid_spacing_conventions() {
        // periodic axis: no duplicated endpoint; bounded axis: midpoints
        let chart = sphere_polar_chart::<f64>(1.0);
        let grid = base_grid(&chart, &[2, 4]).unwrap();
        assert_eq!(grid.len(), 8);
        let phis: Vec<f64> = grid.iter().map(|p| p[0]).collect();
        assert!((phis[0] - std::f64::consts::PI * 0.25).abs() < 1e-15);
        let thetas: Vec<f64> = grid.iter().map(|p| p[1]).collect();
        assert!(thetas.contains(&0.0));
        assert!(!thetas.iter().any(|&t| (t - 2.0 * std::f64::consts::PI).abs() < 1e-12));
    }

    #[test]
    fn sampling_is_deterministic_per_seed() {
        // a 3-dimensional fiber exercises the seeded gaussian directions
        let chart = flat_chart::<f64>(3);
        let counts = SampleCounts {
            base: vec![2, 2, 2],
            intermediate: vec![],
            top: 10,
        };
        let s1 = unit_bundle_sample(&chart, 1, &counts, 1.0, 99).unwrap();
        let s2 = unit_bundle_sample(&chart, 1, &counts, 1.0, 99).unwrap();
        assert_eq!(s1.points.len(), s2.points.len());
        for (a, b) in s1.points.iter().zip(&s2.points) {
            assert_eq!(a.coords(), b.coords());
        }
        let s3 = unit_bundle_sample(&chart, 1, &counts, 1.0, 100).unwrap();
        assert!(
            s1.points
                .iter()
                .zip(&s3.points)
                .any(|(a, b)| a.coords() != b.coords()),
            "different seeds should give different gaussian directions"
        );
        // unit norm holds for gaussian directions too
        for p in &s1.points {
            let norm2: f64 = p.block(1).iter().map(|x| x * x).sum();
            assert!((norm2 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn invalid_configurations_error() {
        let chart = circle_chart::<f64>(1.0);
        let counts = SampleCounts {
            base: vec![4],
            intermediate: vec![],
            top: 2,
        };
        assert!(matches!(
            unit_bundle_sample(&chart, 4, &counts, 1.0, 0),
            Err(GeomError::JetOrderUnsupported { .. })
        ));
        assert!(unit_bundle_sample(&chart, 2, &counts, 1.0, 0).is_err());
        assert!(matches!(
            unit_bundle_sample(&chart, 2, &SampleCounts { base: vec![4], intermediate: vec![3], top: 2 }, -1.0, 0),
            Err(GeomError::NonPositive { .. })
        ));
        assert!(base_grid(&chart, &[0]).is_err());
        assert!(base_grid(&chart, &[2, 2]).is_err());
    }
}
