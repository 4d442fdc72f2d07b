//! Rigid alignment of lifted clouds: the minimization defining the
//! estimated distance.
//!
//! The estimator minimizes the Hausdorff distance between two lifted
//! clouds over rigid motions of the common ambient space (acting through
//! [`lifted_rigid_apply`]'s blockwise rule) and over any shape parameters
//! the second family declares. Because a lifted rigid motion is an
//! isometry of the flat lifted space, nearest-neighbor queries against a
//! moving cloud can be answered by moving the *query* with the inverse
//! motion against a static k-d tree — both trees are built once.
//!
//! Both clouds are pose-normalized with [`canonical_frame`] before
//! optimization. That makes restart 0 (the identity motion) a strong
//! start, and it makes the final estimate invariant, to round-off, under
//! rigid pre-transformations of either input: the frames compensate the
//! pre-transformation exactly.

use std::sync::Arc;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::cloud::{LiftedCloud, MetricKind, PointCloud};
use crate::error::{GeomError, Result};
use crate::hausdorff::KdTree;
use crate::jet::{EmbeddingMap, JetPoint};
use crate::linalg::dist_sq;
use crate::optim::{nelder_mead, NelderMeadCfg};
use crate::real::Real;
use crate::rigid::{canonical_frame, lifted_rigid_apply, rigid_param_count, RigidMotion};
use crate::sasaki::base_grid;

/// A source of lifted clouds with optional optimizable shape parameters.
///
/// Families with fixed geometry return empty bounds and ignore `shape`;
/// parametrized families rebuild their cloud for each shape vector the
/// optimizer proposes.
pub trait CloudFactory<T: Real>: Send + Sync {
    /// Inclusive bounds for each declared shape parameter (possibly empty).
    fn shape_bounds(&self) -> Vec<(f64, f64)>;
    /// Starting values for the shape parameters; must lie within bounds.
    fn shape_init(&self) -> Vec<f64>;
    /// Construct the lifted cloud at the given shape values.
    fn build(&self, shape: &[f64]) -> Result<LiftedCloud<T>>;
    /// Fiber cap used when sampling, if any (reporting only).
    fn fiber_cap(&self) -> Option<f64> {
        None
    }
}

/// A fixed cloud exposed as a zero-parameter factory.
pub struct FixedCloud<T>(pub LiftedCloud<T>);

impl<T: Real> CloudFactory<T> for FixedCloud<T> {
    fn shape_bounds(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
    fn shape_init(&self) -> Vec<f64> {
        Vec::new()
    }
    fn build(&self, _shape: &[f64]) -> Result<LiftedCloud<T>> {
        Ok(self.0.clone())
    }
}

#[derive(Clone, Debug)]
pub struct AlignConfig {
    /// Number of optimizer restarts (restart 0 always starts at the
    /// identity motion and the initial shape).
    pub restarts: usize,
    /// Iteration cap per restart.
    pub max_iters: usize,
    /// Simplex-diameter convergence tolerance.
    pub tol_diameter: f64,
    /// Seed for the randomized restart starting points.
    pub seed: u64,
    /// Also search orientation-reversing motions.
    pub allow_reflection: bool,
}

impl Default for AlignConfig {
    fn default() -> Self {
        AlignConfig {
            restarts: 8,
            max_iters: 500,
            tol_diameter: 1e-6,
            seed: 0,
            allow_reflection: false,
        }
    }
}

/// Per-restart optimizer outcome.
#[derive(Clone, Debug)]
pub struct RestartTrace {
    pub restart: usize,
    pub reflected: bool,
    pub start_value: f64,
    pub value: f64,
    pub iterations: usize,
    pub evals: usize,
    pub converged: bool,
}

/// Result of the alignment search.
#[derive(Clone, Debug)]
pub struct DghEstimate {
    /// Best Hausdorff distance found.
    pub value: f64,
    /// Hausdorff distance of the pose-normalized clouds before
    /// optimization (restart 0's starting value).
    pub initial_value: f64,
    /// Jet order of the lifted clouds (k+1).
    pub order: usize,
    /// Fiber cap used when sampling, when the factories report one.
    pub fiber_cap: Option<f64>,
    /// Point counts of the two clouds.
    pub sample_sizes: [usize; 2],
    /// Winning restart index.
    pub best_restart: usize,
    /// Whether the winning motion reverses orientation.
    pub best_reflected: bool,
    /// Winning motion parameters: rotation parameters, then translation
    /// (ambient units), then the shape parameters (family units).
    pub best_params: Vec<f64>,
    pub trace: Vec<RestartTrace>,
}

/// Embed a lifted cloud of ambient dimension m1 into a larger ambient
/// dimension by zero-padding every block.
pub fn pad_lifted<T: Real>(cloud: &LiftedCloud<T>, m: usize) -> Result<LiftedCloud<T>> {
    let m1 = cloud.target_dim;
    if m < m1 {
        return Err(GeomError::InvalidConfig(format!(
            "cannot pad ambient dimension {m1} down to {m}"
        )));
    }
    if m == m1 {
        return Ok(cloud.clone());
    }
    let blocks = 1usize << cloud.order;
    let mut data = Vec::with_capacity(cloud.cloud.len() * blocks * m);
    for p in cloud.cloud.iter() {
        for b in 0..blocks {
            data.extend_from_slice(&p[b * m1..(b + 1) * m1]);
            data.extend(std::iter::repeat(T::zero()).take(m - m1));
        }
    }
    Ok(LiftedCloud {
        order: cloud.order,
        target_dim: m,
        cloud: PointCloud::from_flat(blocks * m, cloud.cloud.metric(), data)?,
    })
}

/// One cloud side of the objective: pose-normalized points plus a static
/// k-d tree.
struct Side<T> {
    cloud: Arc<LiftedCloud<T>>,
    tree: Arc<KdTree<T>>,
}

impl<T: Real> Side<T> {
    fn prepare(raw: &LiftedCloud<T>, m: usize) -> Result<Side<T>> {
        let padded = pad_lifted(raw, m)?;
        let frame = canonical_frame(&padded)?;
        let canonical = lifted_rigid_apply(&padded, &frame)?;
        let tree = KdTree::build(&canonical.cloud);
        Ok(Side {
            cloud: Arc::new(canonical),
            tree: Arc::new(tree),
        })
    }
}

/// Mutable per-restart evaluation state: warm-start hints and the
/// current B side (rebuilt when shape parameters move).
struct Objective<'a, T: Real> {
    a: &'a Side<T>,
    b: Side<T>,
    fam_b: &'a dyn CloudFactory<T>,
    m: usize,
    reflected: bool,
    t_scale: f64,
    shape_bounds: Vec<(f64, f64)>,
    last_shape: Vec<f64>,
    hint_ab: Vec<Option<usize>>,
    hint_ba: Vec<Option<usize>>,
    scratch: Vec<T>,
    build_failures: usize,
}

impl<'a, T: Real> Objective<'a, T> {
    fn rot_dof(&self) -> usize {
        rigid_param_count(self.m).expect("validated ambient dimension") - self.m
    }

    fn denorm_shape(&self, xs: &[f64]) -> Vec<f64> {
        xs.iter()
            .zip(&self.shape_bounds)
            .map(|(&x, &(lo, hi))| lo + x.clamp(0.0, 1.0) * (hi - lo))
            .collect()
    }

    /// Evaluate the Hausdorff distance at normalized optimizer
    /// parameters `[rot | t/t_scale | shape in [0,1]]`.
    fn eval(&mut self, params: &[f64]) -> f64 {
        let rot_dof = self.rot_dof();
        let (rigid_part, shape_part) = params.split_at(rot_dof + self.m);

        if !shape_part.is_empty() {
            let shape = self.denorm_shape(shape_part);
            if shape != self.last_shape {
                match self
                    .fam_b
                    .build(&shape)
                    .and_then(|c| Side::prepare(&c, self.m))
                {
                    Ok(side) => {
                        self.b = side;
                        self.last_shape = shape;
                        self.hint_ab.iter_mut().for_each(|h| *h = None);
                        self.hint_ba.clear();
                        self.hint_ba.resize(self.b.cloud.cloud.len(), None);
                    }
                    Err(_) => {
                        self.build_failures += 1;
                        return f64::INFINITY;
                    }
                }
            }
        }

        let mut motion_params: Vec<T> = Vec::with_capacity(rigid_part.len());
        for (i, &v) in rigid_part.iter().enumerate() {
            let scaled = if i < rot_dof { v } else { v * self.t_scale };
            motion_params.push(T::of(scaled));
        }
        let g = match RigidMotion::from_params(self.m, &motion_params, self.reflected) {
            Ok(g) => g,
            Err(_) => return f64::INFINITY,
        };
        let g_inv = g.inverse();

        let a_cloud = &self.a.cloud.cloud;
        let b_cloud = &self.b.cloud.cloud;
        let dim = a_cloud.dim();
        self.scratch.resize(dim, T::zero());

        // sup over A of dist(q, B) with q = g^{-1} a, then sup over B of
        // dist(g b, A); a shared running max lets later queries abort as
        // soon as they prove they cannot raise it.
        let mut h2 = T::zero();
        for (i, p) in a_cloud.iter().enumerate() {
            g_inv.apply_lifted_into(p, &mut self.scratch);
            let init = self.hint_ab[i]
                .map(|idx| (idx, dist_sq(&self.scratch, b_cloud.point(idx))));
            let res = self.b.tree.nearest_from(&self.scratch, init, h2);
            if res.idx != usize::MAX {
                self.hint_ab[i] = Some(res.idx);
            }
            if res.exact && res.dist2 > h2 {
                h2 = res.dist2;
            }
        }
        for (j, p) in b_cloud.iter().enumerate() {
            g.apply_lifted_into(p, &mut self.scratch);
            let init = self.hint_ba[j]
                .map(|idx| (idx, dist_sq(&self.scratch, a_cloud.point(idx))));
            let res = self.a.tree.nearest_from(&self.scratch, init, h2);
            if res.idx != usize::MAX {
                self.hint_ba[j] = Some(res.idx);
            }
            if res.exact && res.dist2 > h2 {
                h2 = res.dist2;
            }
        }
        h2.sqrt().approx_f64()
    }
}

fn require_euclidean<T: Real>(cloud: &LiftedCloud<T>, who: &str) -> Result<()> {
    match cloud.cloud.metric() {
        MetricKind::Euclidean => Ok(()),
        _ => Err(GeomError::InvalidConfig(format!(
            "{who}: rigid alignment requires Euclidean lifted clouds"
        ))),
    }
}

/// Estimate the distance between two families: minimize the lifted
/// Hausdorff distance over rigid motions applied to `fam_b`'s cloud plus
/// `fam_b`'s declared shape parameters. `fam_a`'s cloud is built once at
/// its initial shape and held fixed.
pub fn estimate_dgh<T: Real>(
    fam_a: &dyn CloudFactory<T>,
    fam_b: &dyn CloudFactory<T>,
    cfg: &AlignConfig,
) -> Result<DghEstimate> {
    if cfg.restarts == 0 {
        return Err(GeomError::InvalidConfig("restarts must be >= 1".into()));
    }
    let bounds_b = fam_b.shape_bounds();
    let init_b = fam_b.shape_init();
    if bounds_b.len() != init_b.len() {
        return Err(GeomError::InvalidConfig(format!(
            "shape bounds/init length mismatch: {} vs {}",
            bounds_b.len(),
            init_b.len()
        )));
    }
    for (i, (&(lo, hi), &v)) in bounds_b.iter().zip(&init_b).enumerate() {
        if !(lo < hi) || !v.is_finite() || v < lo || v > hi {
            return Err(GeomError::InvalidConfig(format!(
                "shape parameter {i}: init {v} outside bounds [{lo}, {hi}]"
            )));
        }
    }

    let a_raw = fam_a.build(&fam_a.shape_init())?;
    let b_raw = fam_b.build(&init_b)?;
    require_euclidean(&a_raw, "first family")?;
    require_euclidean(&b_raw, "second family")?;
    if a_raw.order != b_raw.order {
        return Err(GeomError::CloudMismatch {
            context: "alignment requires equal jet orders",
        });
    }
    let m = a_raw.target_dim.max(b_raw.target_dim);
    rigid_param_count(m)?;

    let side_a = Side::prepare(&a_raw, m)?;
    let side_b0 = Side::prepare(&b_raw, m)?;

    // translation scale from the base-block radii of the centered clouds
    let base_radius = |s: &Side<T>| -> f64 {
        s.cloud
            .cloud
            .iter()
            .map(|p| {
                p[..m]
                    .iter()
                    .fold(0.0f64, |acc, &x| acc + x.approx_f64() * x.approx_f64())
                    .sqrt()
            })
            .fold(0.0f64, f64::max)
    };
    let t_scale = base_radius(&side_a).max(base_radius(&side_b0)).max(1.0);

    let rot_dof = rigid_param_count(m)? - m;
    let shape_dim = bounds_b.len();
    let n_params = rot_dof + m + shape_dim;

    let shape_init_norm: Vec<f64> = init_b
        .iter()
        .zip(&bounds_b)
        .map(|(&v, &(lo, hi))| ((v - lo) / (hi - lo)).clamp(0.0, 1.0))
        .collect();

    let mut nm_bounds: Vec<Option<(f64, f64)>> = vec![None; rot_dof + m];
    nm_bounds.extend(std::iter::repeat(Some((0.0, 1.0))).take(shape_dim));

    // starting points: restart 0 at the identity / initial shape, the
    // rest drawn from a seeded generator; optional reflected twins
    let mut starts: Vec<(Vec<f64>, bool)> = Vec::new();
    for r in 0..cfg.restarts {
        let x0 = if r == 0 {
            let mut x = vec![0.0; rot_dof + m];
            x.extend_from_slice(&shape_init_norm);
            x
        } else {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed.wrapping_add(r as u64));
            let mut x = Vec::with_capacity(n_params);
            for _ in 0..rot_dof {
                x.push(rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI));
            }
            for _ in 0..m {
                x.push(rng.gen_range(-0.3..0.3));
            }
            for _ in 0..shape_dim {
                x.push(rng.gen_range(0.0..1.0));
            }
            x
        };
        starts.push((x0.clone(), false));
        if cfg.allow_reflection {
            starts.push((x0, true));
        }
    }

    let nm_cfg = NelderMeadCfg {
        max_iters: cfg.max_iters,
        tol_diameter: cfg.tol_diameter,
        initial_step: 0.25,
    };

    let runs: Vec<(RestartTrace, Vec<f64>)> = starts
        .par_iter()
        .enumerate()
        .map(|(idx, (x0, reflected))| {
            let mut obj = Objective {
                a: &side_a,
                b: Side {
                    cloud: Arc::clone(&side_b0.cloud),
                    tree: Arc::clone(&side_b0.tree),
                },
                fam_b,
                m,
                reflected: *reflected,
                t_scale,
                shape_bounds: bounds_b.clone(),
                last_shape: init_b.clone(),
                hint_ab: vec![None; side_a.cloud.cloud.len()],
                hint_ba: vec![None; side_b0.cloud.cloud.len()],
                scratch: Vec::new(),
                build_failures: 0,
            };
            let start_value = obj.eval(x0);
            let result = nelder_mead(|x| obj.eval(x), x0, &nm_cfg, Some(&nm_bounds));
            let trace = RestartTrace {
                restart: idx,
                reflected: *reflected,
                start_value,
                value: result.value,
                iterations: result.iterations,
                evals: result.evals + 1,
                converged: result.converged,
            };
            (trace, result.best)
        })
        .collect();

    let initial_value = runs[0].0.start_value;
    let mut best_idx = 0usize;
    for (i, (t, _)) in runs.iter().enumerate() {
        if t.value < runs[best_idx].0.value {
            best_idx = i;
        }
    }
    let (best_trace, best_norm) = &runs[best_idx];

    // de-normalize the winning parameters for reporting
    let mut best_params = Vec::with_capacity(n_params);
    for (i, &v) in best_norm.iter().enumerate() {
        if i < rot_dof {
            best_params.push(v);
        } else if i < rot_dof + m {
            best_params.push(v * t_scale);
        }
    }
    {
        let shape_part = &best_norm[rot_dof + m..];
        let denorm: Vec<f64> = shape_part
            .iter()
            .zip(&bounds_b)
            .map(|(&x, &(lo, hi))| lo + x.clamp(0.0, 1.0) * (hi - lo))
            .collect();
        best_params.extend_from_slice(&denorm);
    }

    let value = best_trace.value.min(initial_value);
    Ok(DghEstimate {
        value,
        initial_value,
        order: a_raw.order,
        fiber_cap: fam_a.fiber_cap().or_else(|| fam_b.fiber_cap()),
        sample_sizes: [side_a.cloud.cloud.len(), side_b0.cloud.cloud.len()],
        best_restart: best_trace.restart,
        best_reflected: best_trace.reflected,
        best_params,
        trace: runs.into_iter().map(|(t, _)| t).collect(),
    })
}

/// Estimate the distance between two fixed lifted clouds (rigid motions
/// only, no shape parameters).
pub fn estimate_dgh_clouds<T: Real>(
    a: &LiftedCloud<T>,
    b: &LiftedCloud<T>,
    cfg: &AlignConfig,
) -> Result<DghEstimate> {
    let fa = FixedCloud(a.clone());
    let fb = FixedCloud(b.clone());
    estimate_dgh(&fa, &fb, cfg)
}

/// Sum over derivative orders 0..=order of the sup over a base grid of
/// the Frobenius norm of the full order-j derivative tensor of `f`.
///
/// The pure mixed partials are read off nested-jet evaluations whose
/// single-index blocks carry coordinate basis vectors and whose
/// multi-index blocks are zero.
pub fn embedding_ck_norm<T: Real>(
    f: &EmbeddingMap<T>,
    order: usize,
    base_counts: &[usize],
) -> Result<f64> {
    let chart = f.source();
    let n = chart.dim();
    if order > crate::jet::MAX_JET_ORDER {
        return Err(GeomError::JetOrderUnsupported {
            requested: order,
            max: crate::jet::MAX_JET_ORDER,
        });
    }
    let grid = base_grid(chart, base_counts)?;

    let mut total = 0.0f64;
    for j in 0..=order {
        let mut sup = 0.0f64;
        for p in &grid {
            // sum of squares over all index tuples (i_1..i_j) and output
            // components
            let mut sq = 0.0f64;
            let mut tuple = vec![0usize; j];
            loop {
                if j == 0 {
                    let out = f.value_at(p)?;
                    sq += out
                        .iter()
                        .fold(0.0, |acc, &v| acc + v.approx_f64() * v.approx_f64());
                } else {
                    let mut jet = JetPoint::zero(j, n);
                    jet.block_mut(0).copy_from_slice(p);
                    for (level, &axis) in tuple.iter().enumerate() {
                        jet.block_mut(1 << level)[axis] = T::one();
                    }
                    let out = f.nested_differential(&jet)?;
                    let top = out.block((1 << j) - 1);
                    sq += top
                        .iter()
                        .fold(0.0, |acc, &v| acc + v.approx_f64() * v.approx_f64());
                }
                // advance the index tuple
                let mut carry = true;
                for d in tuple.iter_mut() {
                    *d += 1;
                    if *d < n {
                        carry = false;
                        break;
                    }
                    *d = 0;
                }
                if j == 0 || carry {
                    break;
                }
            }
            sup = sup.max(sq.sqrt());
        }
        total += sup;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::circle_chart;
    use crate::cloud::lift_cloud;
    use crate::jet::{Ambient, EmbeddingMap, RealMap};
    use crate::sasaki::{unit_bundle_sample, SampleCounts};

    struct CircleEmbed {
        r: f64,
    }

    impl RealMap for CircleEmbed {
        fn source_dim(&self) -> usize {
            1
        }
        fn target_dim(&self) -> usize {
            2
        }
        fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
            let r = S::of(self.r);
            out[0] = r * x[0].cos();
            out[1] = r * x[0].sin();
        }
    }

    fn circle_lift(r: f64, order: usize, counts: SampleCounts, cap: f64) -> LiftedCloud<f64> {
        let chart = circle_chart(r);
        let f = EmbeddingMap::new(
            "circle",
            chart.clone(),
            Ambient::Euclidean,
            Arc::new(CircleEmbed { r }),
        )
        .unwrap();
        let sample = unit_bundle_sample(&chart, order, &counts, cap, 7).unwrap();
        lift_cloud(&f, &sample).unwrap()
    }

    fn quick_cfg() -> AlignConfig {
        AlignConfig {
            restarts: 2,
            max_iters: 200,
            tol_diameter: 1e-7,
            seed: 11,
            allow_reflection: false,
        }
    }

    #[test]
    fn padding_zero_extends_blocks() {
        let rows = vec![vec![1.0, 2.0, 3.0, 4.0]];
        let cloud = LiftedCloud {
            order: 1,
            target_dim: 2,
            cloud: PointCloud::new(4, MetricKind::Euclidean, rows).unwrap(),
        };
        let padded = pad_lifted(&cloud, 3).unwrap();
        assert_eq!(padded.cloud.dim(), 6);
        assert_eq!(padded.cloud.point(0), &[1.0, 2.0, 0.0, 3.0, 4.0, 0.0]);
        assert!(pad_lifted(&cloud, 1).is_err());
    }

    #[test]
    fn identical_clouds_estimate_zero() {
        let counts = SampleCounts {
            base: vec![24],
            intermediate: vec![],
            top: 6,
        };
        let a = circle_lift(1.0, 1, counts.clone(), 0.25);
        let b = circle_lift(1.0, 1, counts, 0.25);
        let est = estimate_dgh_clouds(&a, &b, &quick_cfg()).unwrap();
        assert!(est.value <= 1e-9, "value {}", est.value);
        assert!(est.value <= est.initial_value + 1e-15);
        assert_eq!(est.sample_sizes, [a.cloud.len(), b.cloud.len()]);
        assert_eq!(est.order, 1);
    }

    #[test]
    fn rigid_pretransform_is_compensated() {
        let counts = SampleCounts {
            base: vec![20],
            intermediate: vec![],
            top: 4,
        };
        let a = circle_lift(1.0, 1, counts.clone(), 0.25);
        let b = circle_lift(1.3, 1, counts, 0.25);
        let base = estimate_dgh_clouds(&a, &b, &quick_cfg()).unwrap();

        let g = RigidMotion::from_params(2, &[0.83, 2.5, -1.25], false).unwrap();
        let a_moved = lifted_rigid_apply(&a, &g).unwrap();
        let moved = estimate_dgh_clouds(&a_moved, &b, &quick_cfg()).unwrap();
        assert!(
            (base.value - moved.value).abs() < 1e-9,
            "{} vs {}",
            base.value,
            moved.value
        );

        let b_moved = lifted_rigid_apply(&b, &g).unwrap();
        let moved_b = estimate_dgh_clouds(&a, &b_moved, &quick_cfg()).unwrap();
        assert!(
            (base.value - moved_b.value).abs() < 1e-9,
            "{} vs {}",
            base.value,
            moved_b.value
        );
    }

    #[test]
    fn concentric_circles_order_zero() {
        let counts = SampleCounts {
            base: vec![64],
            intermediate: vec![],
            top: 1,
        };
        let a = circle_lift(1.0, 0, counts.clone(), 0.25);
        let b = circle_lift(1.2, 0, counts, 0.25);
        let est = estimate_dgh_clouds(&a, &b, &quick_cfg()).unwrap();
        assert!(
            (est.value - 0.2).abs() < 0.02,
            "expected about 0.2, got {}",
            est.value
        );
        assert!(est.value <= est.initial_value + 1e-15);
    }

    #[test]
    fn shape_parameter_is_optimized() {
        struct CircleFamily {
            counts: SampleCounts,
        }
        impl CloudFactory<f64> for CircleFamily {
            fn shape_bounds(&self) -> Vec<(f64, f64)> {
                vec![(0.7, 1.4)]
            }
            fn shape_init(&self) -> Vec<f64> {
                vec![1.25]
            }
            fn build(&self, shape: &[f64]) -> Result<LiftedCloud<f64>> {
                Ok(circle_lift(shape[0], 0, self.counts.clone(), 0.25))
            }
        }
        let counts = SampleCounts {
            base: vec![48],
            intermediate: vec![],
            top: 1,
        };
        let a = FixedCloud(circle_lift(1.0, 0, counts.clone(), 0.25));
        let b = CircleFamily { counts };
        let cfg = AlignConfig {
            restarts: 3,
            max_iters: 400,
            tol_diameter: 1e-8,
            seed: 5,
            allow_reflection: false,
        };
        let est = estimate_dgh(&a, &b, &cfg).unwrap();
        assert!(est.value < 0.02, "value {}", est.value);
        let shape = est.best_params[est.best_params.len() - 1];
        assert!((shape - 1.0).abs() < 0.05, "shape {shape}");
    }

    #[test]
    fn mismatched_orders_are_rejected() {
        let counts0 = SampleCounts {
            base: vec![8],
            intermediate: vec![],
            top: 1,
        };
        let counts1 = SampleCounts {
            base: vec![8],
            intermediate: vec![],
            top: 2,
        };
        let a = circle_lift(1.0, 0, counts0, 0.25);
        let b = circle_lift(1.0, 1, counts1, 0.25);
        assert!(estimate_dgh_clouds(&a, &b, &quick_cfg()).is_err());
    }

    #[test]
    fn reflection_flag_searches_mirrored_poses() {
        // an asymmetric planar triangle vs. its mirror image: without
        // reflections the estimate stays positive, with them it drops to
        // round-off
        let rows: Vec<Vec<f64>> = vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![0.3, 0.9],
            vec![0.9, 0.4],
        ];
        let mirrored: Vec<Vec<f64>> = rows.iter().map(|p| vec![-p[0], p[1]]).collect();
        let mk = |rows: Vec<Vec<f64>>| LiftedCloud {
            order: 0,
            target_dim: 2,
            cloud: PointCloud::new(2, MetricKind::Euclidean, rows).unwrap(),
        };
        let a = mk(rows);
        let b = mk(mirrored);
        let mut cfg = quick_cfg();
        cfg.restarts = 4;
        let plain = estimate_dgh_clouds(&a, &b, &cfg).unwrap();
        cfg.allow_reflection = true;
        let with_flip = estimate_dgh_clouds(&a, &b, &cfg).unwrap();
        assert!(plain.value > 0.05, "plain {}", plain.value);
        assert!(with_flip.value < 1e-6, "reflected {}", with_flip.value);
        assert!(with_flip.best_reflected);
    }

    #[test]
    fn estimator_is_deterministic() {
        let counts = SampleCounts {
            base: vec![16],
            intermediate: vec![],
            top: 4,
        };
        let a = circle_lift(1.0, 1, counts.clone(), 0.25);
        let b = circle_lift(1.15, 1, counts, 0.25);
        let e1 = estimate_dgh_clouds(&a, &b, &quick_cfg()).unwrap();
        let e2 = estimate_dgh_clouds(&a, &b, &quick_cfg()).unwrap();
        assert_eq!(e1.value, e2.value);
        assert_eq!(e1.best_params, e2.best_params);
        assert_eq!(e1.best_restart, e2.best_restart);
    }

    #[test]
    fn ck_norm_of_unit_circle_is_three() {
        let chart: crate::chart::MetricChart<f64> =
            crate::chart::arc_circle_chart(2.0 * std::f64::consts::PI);
        struct ArcCircle;
        impl RealMap for ArcCircle {
            fn source_dim(&self) -> usize {
                1
            }
            fn target_dim(&self) -> usize {
                2
            }
            fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
                out[0] = x[0].cos();
                out[1] = x[0].sin();
            }
        }
        let f = EmbeddingMap::new("arc", chart, Ambient::Euclidean, Arc::new(ArcCircle)).unwrap();
        let norm = embedding_ck_norm(&f, 2, &[64]).unwrap();
        assert!((norm - 3.0).abs() < 1e-10, "norm {norm}");
    }

    #[test]
    fn ck_norm_of_constant_map_is_its_length() {
        let chart: crate::chart::MetricChart<f64> = circle_chart(1.0);
        struct Fixed;
        impl RealMap for Fixed {
            fn source_dim(&self) -> usize {
                1
            }
            fn target_dim(&self) -> usize {
                2
            }
            fn eval<S: Real>(&self, _x: &[S], out: &mut [S]) {
                out[0] = S::of(3.0);
                out[1] = S::of(4.0);
            }
        }
        let f = EmbeddingMap::new("const", chart, Ambient::Euclidean, Arc::new(Fixed)).unwrap();
        let norm = embedding_ck_norm(&f, 3, &[16]).unwrap();
        assert!((norm - 5.0).abs() < 1e-12, "norm {norm}");
    }
}
