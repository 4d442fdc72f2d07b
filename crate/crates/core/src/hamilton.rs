//! C^k norms of symmetric 2-tensor fields, pullback metrics, and the
//! joint convergence experiment.
//!
//! The norm is ‖σ‖_{C^k} = Σ_{i=0..k} sup_p ‖(∇̂^i σ)_p‖_ĝ, where ∇̂ is
//! the Levi-Civita connection of the background metric ĝ, iterated
//! covariant derivatives are taken by central finite differences of the
//! lower-order covariant derivative, the fibre norm is the ĝ-induced
//! Frobenius norm on (0, 2+i)-tensors, and the sup runs over a
//! configurable grid. This is the convergence gauge paired with the
//! lifted-cloud distance estimate in [`equivalence_experiment`].

use std::sync::Arc;
use std::time::Instant;

use crate::align::{estimate_dgh, AlignConfig};
use crate::chart::{circle_chart, MetricChart};
use crate::error::{GeomError, Result};
use crate::linalg::Mat;
use crate::real::Real;
use crate::sasaki::{base_grid, SampleCounts};
use crate::scenarios::{Family, FamilyFactory};

/// A symmetric (0,2)-tensor field in the coordinates of a background
/// chart (which also provides the metric ĝ and its connection).
#[derive(Clone)]
pub struct TensorField02<T: Real> {
    chart: MetricChart<T>,
    eval: Arc<dyn Fn(&[T]) -> Mat<T> + Send + Sync>,
}

impl<T: Real> TensorField02<T> {
    pub fn new(
        chart: MetricChart<T>,
        eval: Arc<dyn Fn(&[T]) -> Mat<T> + Send + Sync>,
    ) -> Self {
        TensorField02 { chart, eval }
    }

    pub fn zero(chart: MetricChart<T>) -> Self {
        let n = chart.dim();
        TensorField02 {
            chart,
            eval: Arc::new(move |_| Mat::zeros(n)),
        }
    }

    /// The background metric itself as a field (σ = ĝ).
    pub fn from_metric(chart: MetricChart<T>) -> Self {
        let c = chart.clone();
        TensorField02 {
            chart,
            eval: Arc::new(move |p| c.metric_eval(p).expect("metric on own chart")),
        }
    }

    pub fn chart(&self) -> &MetricChart<T> {
        &self.chart
    }

    pub fn value_at(&self, p: &[T]) -> Result<Mat<T>> {
        let q = self.chart.domain().normalize(p)?;
        Ok((self.eval)(&q))
    }

    /// Pointwise linear combination a·self + b·other (same chart).
    pub fn linear_combination(&self, a: f64, other: &TensorField02<T>, b: f64) -> Self {
        let ea = Arc::clone(&self.eval);
        let eb = Arc::clone(&other.eval);
        TensorField02 {
            chart: self.chart.clone(),
            eval: Arc::new(move |p| {
                let ma = ea(p).scale(T::of(a));
                let mb = eb(p).scale(T::of(b));
                ma.add(&mb)
            }),
        }
    }
}

/// Dense rank-q tensor over an n-dimensional index set, row-major.
#[derive(Clone, Debug)]
struct Tensor<T> {
    rank: usize,
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Tensor<T> {
    fn zeros(rank: usize, n: usize) -> Self {
        Tensor {
            rank,
            n,
            data: vec![T::zero(); n.pow(rank as u32)],
        }
    }

    fn from_mat(m: &Mat<T>) -> Self {
        let n = m.dim();
        let mut t = Tensor::zeros(2, n);
        for i in 0..n {
            for j in 0..n {
                t.data[i * n + j] = m[(i, j)];
            }
        }
        t
    }

    #[inline]
    fn len(&self) -> usize {
        self.data.len()
    }

    /// Decompose a flat index into per-axis digits (most significant
    /// axis first).
    fn digits(&self, mut flat: usize, out: &mut [usize]) {
        for a in (0..self.rank).rev() {
            out[a] = flat % self.n;
            flat /= self.n;
        }
    }

    /// ĝ-Frobenius norm: contract every index pair with the inverse
    /// metric, then trace against the original tensor.
    fn g_norm(&self, g_inv: &Mat<T>) -> T {
        let n = self.n;
        // raise indices one axis at a time
        let mut raised = self.data.clone();
        let mut scratch = vec![T::zero(); raised.len()];
        let mut stride = 1usize;
        for _axis in 0..self.rank {
            // the axis with this stride is contracted with g_inv
            for (flat, slot) in scratch.iter_mut().enumerate() {
                let digit = (flat / stride) % n;
                let base = flat - digit * stride;
                let mut acc = T::zero();
                for l in 0..n {
                    acc += g_inv[(digit, l)] * raised[base + l * stride];
                }
                *slot = acc;
            }
            std::mem::swap(&mut raised, &mut scratch);
            stride *= n;
        }
        let mut sum = T::zero();
        for (a, b) in self.data.iter().zip(&raised) {
            sum += *a * *b;
        }
        sum.sqrt()
    }
}

/// (∇̂^j σ)(p): rank-(2+j) tensor of iterated covariant derivatives,
/// computed recursively with central finite differences in each
/// direction plus the connection correction on every lower index.
fn cov_tensor_at<T: Real>(
    field: &TensorField02<T>,
    j: usize,
    p: &[T],
    fd_step: f64,
) -> Result<Tensor<T>> {
    if j == 0 {
        let m = field.value_at(p)?;
        return Ok(Tensor::from_mat(&m));
    }
    let n = field.chart.dim();
    let tau = cov_tensor_at(field, j - 1, p, fd_step)?;
    let gamma = field.chart.christoffel(p, fd_step)?;
    let h = T::of(fd_step);
    let two_h = T::of(2.0 * fd_step);

    let mut out = Tensor::zeros(tau.rank + 1, n);
    let block = tau.len();
    let mut idx = vec![0usize; tau.rank];
    for k in 0..n {
        let mut pp = p.to_vec();
        pp[k] += h;
        let mut pm = p.to_vec();
        pm[k] -= h;
        let tp = cov_tensor_at(field, j - 1, &pp, fd_step)?;
        let tm = cov_tensor_at(field, j - 1, &pm, fd_step)?;
        for flat in 0..block {
            let mut val = (tp.data[flat] - tm.data[flat]) / two_h;
            tau.digits(flat, &mut idx);
            // subtract Γ^l_{k i_a} τ_{... l ...} for every slot a
            let mut stride = block / n;
            for &ia in idx.iter() {
                let base = flat - ia * stride;
                for l in 0..n {
                    val -= gamma.get(l, k, ia) * tau.data[base + l * stride];
                }
                stride /= n;
            }
            out.data[k * block + flat] = val;
        }
    }
    Ok(out)
}

/// ‖σ‖_{C^k}: sum over derivative orders 0..=k of the grid-sup of the
/// pointwise ĝ-norm of ∇̂^i σ.
///
/// `counts` is the per-axis grid resolution. The finite-difference step
/// must resolve finer than the grid: `2·fd_step` may not exceed the grid
/// spacing on any axis.
pub fn ck_norm<T: Real>(
    field: &TensorField02<T>,
    k: usize,
    counts: &[usize],
    fd_step: f64,
) -> Result<f64> {
    let chart = &field.chart;
    if !(fd_step > 0.0) {
        return Err(GeomError::NonPositive {
            name: "fd_step",
            value: fd_step,
        });
    }
    for (axis, (&c, ax)) in counts.iter().zip(&chart.domain().axes).enumerate() {
        if c == 0 {
            return Err(GeomError::InvalidConfig(format!(
                "grid count on axis {axis} must be positive"
            )));
        }
        let spacing = ax.span() / c as f64;
        if 2.0 * fd_step > spacing {
            return Err(GeomError::InvalidConfig(format!(
                "grid too coarse on axis {axis}: spacing {spacing:.3e} \
                 cannot straddle finite-difference step {fd_step:.3e}"
            )));
        }
    }
    let grid = base_grid(chart, counts)?;
    let mut total = 0.0f64;
    for i in 0..=k {
        let mut sup = 0.0f64;
        for p in &grid {
            let tensor = cov_tensor_at(field, i, p, fd_step)?;
            let g = chart.metric_eval(p)?;
            let g_inv = g.inverse()?;
            sup = sup.max(tensor.g_norm(&g_inv).approx_f64());
        }
        total += sup;
    }
    Ok(total)
}

/// A coordinate map between charts together with its Jacobian oracle.
#[derive(Clone)]
pub struct ChartMap<T> {
    pub eval: Arc<dyn Fn(&[T]) -> Vec<T> + Send + Sync>,
    pub jacobian: Arc<dyn Fn(&[T]) -> Mat<T> + Send + Sync>,
}

impl<T: Real> ChartMap<T> {
    pub fn identity(n: usize) -> Self {
        ChartMap {
            eval: Arc::new(|p: &[T]| p.to_vec()),
            jacobian: Arc::new(move |_| Mat::identity(n)),
        }
    }
}

/// Pullback φ*g: p ↦ J(p)ᵀ · g(φ(p)) · J(p), as a tensor field on the
/// source chart.
pub fn pullback_metric<T: Real>(
    phi: &ChartMap<T>,
    g_target: &MetricChart<T>,
    source: &MetricChart<T>,
) -> TensorField02<T> {
    let eval = Arc::clone(&phi.eval);
    let jac = Arc::clone(&phi.jacobian);
    let target = g_target.clone();
    TensorField02::new(
        source.clone(),
        Arc::new(move |p| {
            let q = eval(p);
            let g = target.metric_eval(&q).expect("pullback target metric");
            let j = jac(p);
            j.transpose().matmul(&g).matmul(&j)
        }),
    )
}

/// φ*g_i − ĝ on ĝ's chart: the deviation field whose C^k norm gauges
/// Hamilton convergence.
pub fn metric_difference_field<T: Real>(
    phi: &ChartMap<T>,
    g_i: &MetricChart<T>,
    g_ref: &MetricChart<T>,
) -> TensorField02<T> {
    let pulled = pullback_metric(phi, g_i, g_ref);
    let reference = TensorField02::from_metric(g_ref.clone());
    pulled.linear_combination(1.0, &reference, -1.0)
}

/// One row of a convergence experiment.
#[derive(Clone, Debug)]
pub struct ConvergenceRecord {
    pub index: usize,
    /// Sequence parameter (e.g. the radius r_i); 0 when not applicable.
    pub parameter: f64,
    /// Estimated lifted distance to the reference (absent for pure
    /// Hamilton checks).
    pub dgh_estimate: Option<f64>,
    pub ck_norm: f64,
    pub runtime_ms: u128,
}

/// Records of a sequence experiment, sorted by index.
#[derive(Clone, Debug)]
pub struct ConvergenceReport {
    pub label: String,
    /// The k of the C^k gauge (jet order minus one in joint runs).
    pub ck_order: usize,
    pub records: Vec<ConvergenceRecord>,
}

impl ConvergenceReport {
    pub fn final_ck(&self) -> Option<f64> {
        self.records.last().map(|r| r.ck_norm)
    }

    pub fn final_dgh(&self) -> Option<f64> {
        self.records.last().and_then(|r| r.dgh_estimate)
    }

    pub fn ck_strictly_decreasing(&self) -> bool {
        self.records
            .windows(2)
            .all(|w| w[1].ck_norm < w[0].ck_norm)
    }

    /// None when any record lacks an estimate.
    pub fn dgh_strictly_decreasing(&self) -> Option<bool> {
        if self.records.iter().any(|r| r.dgh_estimate.is_none()) {
            return None;
        }
        Some(
            self.records
                .windows(2)
                .all(|w| w[1].dgh_estimate.unwrap() < w[0].dgh_estimate.unwrap()),
        )
    }

    /// Whether the C^k tail has dropped below `tol`.
    pub fn ck_tail_below(&self, tol: f64) -> bool {
        self.final_ck().map(|v| v < tol).unwrap_or(false)
    }

    /// Joint verdict: both gauges below their tolerances at the tail.
    pub fn both_converge(&self, tol_dgh: f64, tol_ck: f64) -> Option<bool> {
        let d = self.final_dgh()?;
        let c = self.final_ck()?;
        Some(d < tol_dgh && c < tol_ck)
    }
}

/// Check Hamilton convergence of a chart sequence toward ĝ: reports
/// ‖φ_i*g_i − ĝ‖_{C^k} per index and whether the tail is below `tol`.
pub fn hamilton_converges<T: Real>(
    sequence: &[(MetricChart<T>, ChartMap<T>)],
    g_ref: &MetricChart<T>,
    k: usize,
    tol: f64,
    counts: &[usize],
    fd_step: f64,
) -> Result<(ConvergenceReport, bool)> {
    let mut records = Vec::with_capacity(sequence.len());
    for (i, (chart_i, phi_i)) in sequence.iter().enumerate() {
        let started = Instant::now();
        let field = metric_difference_field(phi_i, chart_i, g_ref);
        let norm = ck_norm(&field, k, counts, fd_step)?;
        records.push(ConvergenceRecord {
            index: i + 1,
            parameter: 0.0,
            dgh_estimate: None,
            ck_norm: norm,
            runtime_ms: started.elapsed().as_millis(),
        });
    }
    let report = ConvergenceReport {
        label: "hamilton".into(),
        ck_order: k,
        records,
    };
    let verdict = report.ck_tail_below(tol);
    Ok((report, verdict))
}

/// Configuration of the joint experiment.
#[derive(Clone, Debug)]
pub struct EquivalenceCfg {
    /// Radius of the fixed reference circle.
    pub reference_r: f64,
    /// Jet order of the lifted clouds (k+1; the C^k gauge uses k).
    pub order: usize,
    pub counts: SampleCounts,
    pub fiber_cap: f64,
    pub align: AlignConfig,
    /// Grid resolution for the C^k sup.
    pub grid: usize,
    pub fd_step: f64,
}

impl Default for EquivalenceCfg {
    fn default() -> Self {
        EquivalenceCfg {
            reference_r: 1.0,
            order: 2,
            counts: SampleCounts {
                base: vec![96],
                intermediate: vec![9],
                top: 64,
            },
            fiber_cap: crate::scenarios::DEFAULT_FIBER_CAP,
            align: AlignConfig {
                restarts: 2,
                ..AlignConfig::default()
            },
            grid: 512,
            fd_step: 1e-4,
        }
    }
}

/// For each radius r_i, estimate the lifted distance between the round
/// circles of radii r_i and the reference, and the C^k norm of the
/// corresponding metric deviation under the identity chart map. The two
/// columns let the joint-convergence claim be checked numerically.
pub fn equivalence_experiment(radii: &[f64], cfg: &EquivalenceCfg) -> Result<ConvergenceReport> {
    if cfg.order == 0 {
        return Err(GeomError::InvalidConfig(
            "equivalence experiment needs jet order >= 1".into(),
        ));
    }
    let k = cfg.order - 1;
    let reference = Family::Circle { r: cfg.reference_r };
    let ref_chart: MetricChart<f64> = circle_chart(cfg.reference_r);
    let fam_ref = FamilyFactory::new(
        reference,
        cfg.order,
        cfg.counts.clone(),
        cfg.fiber_cap,
        cfg.align.seed,
    )?;

    let mut records = Vec::with_capacity(radii.len());
    for (i, &r) in radii.iter().enumerate() {
        if !(r > 0.0) {
            return Err(GeomError::NonPositive {
                name: "radius",
                value: r,
            });
        }
        let started = Instant::now();
        let fam_i = FamilyFactory::new(
            Family::Circle { r },
            cfg.order,
            cfg.counts.clone(),
            cfg.fiber_cap,
            cfg.align.seed,
        )?;
        let est = estimate_dgh(&fam_ref, &fam_i, &cfg.align)?;
        let field = metric_difference_field(
            &ChartMap::identity(1),
            &circle_chart::<f64>(r),
            &ref_chart,
        );
        let norm = ck_norm(&field, k, &[cfg.grid], cfg.fd_step)?;
        records.push(ConvergenceRecord {
            index: i + 1,
            parameter: r,
            dgh_estimate: Some(est.value),
            ck_norm: norm,
            runtime_ms: started.elapsed().as_millis(),
        });
    }
    Ok(ConvergenceReport {
        label: "equivalence".into(),
        ck_order: k,
        records,
    })
}
