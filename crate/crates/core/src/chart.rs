//! Coordinate charts with Riemannian metrics.
//!
//! A [`MetricChart`] is a single-chart description of a manifold patch: a
//! box-with-periodic-axes domain, a metric evaluator, and optionally an
//! analytic Christoffel evaluator. When no analytic evaluator is supplied,
//! Christoffel symbols come from central finite differences of the metric
//! through the Levi-Civita formula
//!
//! ```text
//! Gamma^k_{ij} = 1/2 g^{kl} (d_i g_{lj} + d_j g_{li} - d_l g_{ij})
//! ```
//!
//! The charts used by the built-in scenarios (flat space, circles, the polar
//! sphere chart) carry analytic symbols; finite differencing is the fallback
//! for user-supplied metrics and for the iterated Sasaki metrics, which have
//! no closed form beyond the first level.

use crate::error::{GeomError, Result};
use crate::linalg::Mat;
use crate::real::Real;
use std::sync::Arc;

/// One domain axis: a closed interval, optionally periodic.
///
/// Periodic axes identify `lo` with `hi`; points are wrapped into
/// `[lo, hi)` before evaluation. Non-periodic axes reject points outside
/// `[lo, hi]`.
#[derive(Clone, Debug)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub periodic: bool,
}

impl Axis {
    pub fn periodic(lo: f64, hi: f64) -> Self {
        Axis {
            lo,
            hi,
            periodic: true,
        }
    }
    pub fn interval(lo: f64, hi: f64) -> Self {
        Axis {
            lo,
            hi,
            periodic: false,
        }
    }
    pub fn span(&self) -> f64 {
        self.hi - self.lo
    }
}

/// Product-of-intervals chart domain.
#[derive(Clone, Debug)]
pub struct Domain {
    pub axes: Vec<Axis>,
}

impl Domain {
    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Wrap periodic coordinates into range and validate the rest.
    pub fn normalize<T: Real>(&self, p: &[T]) -> Result<Vec<T>> {
        if p.len() != self.axes.len() {
            return Err(GeomError::DimensionMismatch {
                expected: self.axes.len(),
                got: p.len(),
                context: "domain point",
            });
        }
        let mut out = Vec::with_capacity(p.len());
        for (a, (&x, axis)) in p.iter().zip(&self.axes).enumerate() {
            if axis.periodic {
                let lo = T::of(axis.lo);
                let period = T::of(axis.span());
                let rel = x - lo;
                let wrapped = rel - period * (rel / period).floor();
                out.push(lo + wrapped);
            } else {
                let xv = x.approx_f64();
                if !(xv >= axis.lo && xv <= axis.hi) {
                    return Err(GeomError::DomainViolation {
                        axis: a,
                        value: xv,
                        lo: axis.lo,
                        hi: axis.hi,
                    });
                }
                out.push(x);
            }
        }
        Ok(out)
    }

    /// Like [`Domain::normalize`] but additionally demands `margin` of
    /// room on non-periodic axes, for finite-difference stencils.
    pub fn normalize_interior<T: Real>(&self, p: &[T], margin: f64) -> Result<Vec<T>> {
        let out = self.normalize(p)?;
        for (a, (&x, axis)) in out.iter().zip(&self.axes).enumerate() {
            if !axis.periodic {
                let xv = x.approx_f64();
                if xv - axis.lo < margin || axis.hi - xv < margin {
                    return Err(GeomError::BoundaryMargin {
                        axis: a,
                        value: xv,
                        margin,
                    });
                }
            }
        }
        Ok(out)
    }
}

/// Christoffel symbols at a point: `Gamma^k_{ij}`, symmetric in `(i, j)`.
#[derive(Clone, Debug)]
pub struct Christoffel<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Real> Christoffel<T> {
    pub fn zeros(n: usize) -> Self {
        Christoffel {
            n,
            data: vec![T::zero(); n * n * n],
        }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn get(&self, k: usize, i: usize, j: usize) -> T {
        self.data[(k * self.n + i) * self.n + j]
    }

    #[inline]
    pub fn set(&mut self, k: usize, i: usize, j: usize, v: T) {
        self.data[(k * self.n + i) * self.n + j] = v;
    }

    /// Contraction `M^k_i = Gamma^k_{ij} u^j`, the connection correction
    /// used by the Sasaki metric's vertical projection.
    pub fn contract_right(&self, u: &[T]) -> Mat<T> {
        assert_eq!(u.len(), self.n);
        Mat::from_fn(self.n, |k, i| {
            let mut acc = T::zero();
            for j in 0..self.n {
                acc = acc + self.get(k, i, j) * u[j];
            }
            acc
        })
    }

    pub fn max_abs(&self) -> T {
        self.data
            .iter()
            .fold(T::zero(), |acc, &v| acc.max(v.abs()))
    }
}

type MetricFn<T> = Arc<dyn Fn(&[T]) -> Mat<T> + Send + Sync>;
type ChristoffelFn<T> = Arc<dyn Fn(&[T]) -> Christoffel<T> + Send + Sync>;

/// A coordinate chart equipped with a Riemannian metric.
#[derive(Clone)]
pub struct MetricChart<T: Real> {
    label: String,
    domain: Domain,
    metric: MetricFn<T>,
    analytic_christoffel: Option<ChristoffelFn<T>>,
}

/// Default central-difference step for metric derivatives.
pub const DEFAULT_FD_STEP: f64 = 1e-4;

impl<T: Real> MetricChart<T> {
    /// Chart from raw parts. `analytic_christoffel` may be `None`, in which
    /// case [`MetricChart::christoffel`] falls back to finite differences.
    pub fn new(
        label: impl Into<String>,
        domain: Domain,
        metric: MetricFn<T>,
        analytic_christoffel: Option<ChristoffelFn<T>>,
    ) -> Self {
        MetricChart {
            label: label.into(),
            domain,
            metric,
            analytic_christoffel,
        }
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn has_analytic_christoffel(&self) -> bool {
        self.analytic_christoffel.is_some()
    }

    /// Metric matrix at `p` (wrapped into the domain first).
    pub fn metric_eval(&self, p: &[T]) -> Result<Mat<T>> {
        let q = self.domain.normalize(p)?;
        Ok((self.metric)(&q))
    }

    /// Christoffel symbols at `p`; analytic when available, otherwise
    /// central finite differences with the given step.
    pub fn christoffel(&self, p: &[T], step: f64) -> Result<Christoffel<T>> {
        if let Some(ref f) = self.analytic_christoffel {
            let q = self.domain.normalize(p)?;
            return Ok(f(&q));
        }
        if step <= 0.0 || !step.is_finite() {
            return Err(GeomError::InvalidConfig(format!(
                "finite-difference step must be positive, got {step}"
            )));
        }
        let q = self.domain.normalize_interior(p, 2.0 * step)?;
        self.christoffel_fd(&q, step)
    }

    fn christoffel_fd(&self, q: &[T], step: f64) -> Result<Christoffel<T>> {
        let n = self.dim();
        let g = (self.metric)(q);
        let ginv = g.inverse().map_err(|_| GeomError::SingularMatrix {
            context: "metric not invertible in christoffel",
        })?;
        let h = T::of(step);
        let two_h = T::of(2.0 * step);

        // dg[a] = d g / d x^a by central differences
        let mut dg: Vec<Mat<T>> = Vec::with_capacity(n);
        let mut probe = q.to_vec();
        for a in 0..n {
            let keep = probe[a];
            probe[a] = keep + h;
            let plus = (self.metric)(&self.domain.normalize(&probe)?);
            probe[a] = keep - h;
            let minus = (self.metric)(&self.domain.normalize(&probe)?);
            probe[a] = keep;
            dg.push(Mat::from_fn(n, |i, j| {
                (plus[(i, j)] - minus[(i, j)]) / two_h
            }));
        }

        let half = T::of(0.5);
        let mut out = Christoffel::zeros(n);
        for k in 0..n {
            for i in 0..n {
                for j in 0..=i {
                    let mut acc = T::zero();
                    for l in 0..n {
                        let term = dg[i][(l, j)] + dg[j][(l, i)] - dg[l][(i, j)];
                        acc = acc + ginv[(k, l)] * term;
                    }
                    let v = half * acc;
                    out.set(k, i, j, v);
                    out.set(k, j, i, v);
                }
            }
        }
        Ok(out)
    }
}

/// Flat Euclidean chart on a large box: identity metric, zero symbols.
pub fn flat_chart<T: Real>(n: usize) -> MetricChart<T> {
    let domain = Domain {
        axes: (0..n).map(|_| Axis::interval(-1e9, 1e9)).collect(),
    };
    MetricChart::new(
        format!("flat_{n}"),
        domain,
        Arc::new(move |_: &[T]| Mat::identity(n)),
        Some(Arc::new(move |_: &[T]| Christoffel::zeros(n))),
    )
}

/// Circle of radius `r` in the angle chart: metric `[[r^2]]` on
/// `theta in [0, 2pi)`.
pub fn circle_chart<T: Real>(r: f64) -> MetricChart<T> {
    let domain = Domain {
        axes: vec![Axis::periodic(0.0, 2.0 * std::f64::consts::PI)],
    };
    MetricChart::new(
        format!("circle_r{r}"),
        domain,
        Arc::new(move |_: &[T]| Mat::diag(&[T::of(r * r)])),
        Some(Arc::new(|_: &[T]| Christoffel::zeros(1))),
    )
}

/// Circle of circumference `length` in its arc-length chart: metric `[[1]]`
/// on `s in [0, length)`. This is the natural source chart for arc-length
/// parametrized closed curves.
pub fn arc_circle_chart<T: Real>(length: f64) -> MetricChart<T> {
    let domain = Domain {
        axes: vec![Axis::periodic(0.0, length)],
    };
    MetricChart::new(
        format!("arc_circle_L{length}"),
        domain,
        Arc::new(|_: &[T]| Mat::identity(1)),
        Some(Arc::new(|_: &[T]| Christoffel::zeros(1))),
    )
}

/// Round 2-sphere of radius `r` in polar coordinates `(phi, theta)`:
/// metric `diag(r^2, r^2 sin^2 phi)`, `phi in [0, pi]` (poles are chart
/// singularities), `theta` periodic.
pub fn sphere_polar_chart<T: Real>(r: f64) -> MetricChart<T> {
    let domain = Domain {
        axes: vec![
            Axis::interval(0.0, std::f64::consts::PI),
            Axis::periodic(0.0, 2.0 * std::f64::consts::PI),
        ],
    };
    let r2 = r * r;
    MetricChart::new(
        format!("sphere_r{r}"),
        domain,
        Arc::new(move |p: &[T]| {
            let s = p[0].sin();
            Mat::diag(&[T::of(r2), T::of(r2) * s * s])
        }),
        Some(Arc::new(|p: &[T]| {
            // Gamma^phi_{theta theta} = -sin phi cos phi
            // Gamma^theta_{phi theta} = Gamma^theta_{theta phi} = cot phi
            let (s, c) = (p[0].sin(), p[0].cos());
            let mut g = Christoffel::zeros(2);
            g.set(0, 1, 1, -s * c);
            g.set(1, 0, 1, c / s);
            g.set(1, 1, 0, c / s);
            g
        })),
    )
}
