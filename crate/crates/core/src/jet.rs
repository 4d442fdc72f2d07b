//! Iterated tangent vectors (jet points) and nested differentials.
//!
//! A point of the l-fold iterated tangent bundle over an n-manifold is
//! stored as `2^l` blocks of `n` coordinates, indexed by binary strings of
//! length `l`. The empty string (block 0) is the base chart point. Reading
//! a string left to right follows the splits from the innermost tangent
//! step to the outermost: appending `0` selects the base copy under the
//! bundle projection, appending `1` the fiber copy. Concretely the
//! coordinate vector splits in half at the *outermost* level — the first
//! half is the projected point of the (l-1)-fold bundle, the second half
//! the attached vector — and each half splits recursively the same way.
//!
//! The l-th nested differential of a map `f` acts on such a point by
//! l-fold forward-mode dual-number propagation: lifting the scalar type
//! from `T` to `Dual<T>` once per level reproduces exactly the
//! mixed-partial contractions of the iterated tangent map. The recursion
//! is hand-instantiated up to order 3 (nested generics forbid polymorphic
//! recursion), which covers every supported pipeline order.

use crate::chart::MetricChart;
use crate::dual::Dual;
use crate::error::{GeomError, Result};
use crate::linalg::Mat;
use crate::real::Real;
use std::sync::Arc;

/// Highest supported nested-differential order.
pub const MAX_JET_ORDER: usize = 3;

/// A point of the l-fold iterated tangent bundle in block coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct JetPoint<T> {
    order: usize,
    base_dim: usize,
    coords: Vec<T>,
}

impl<T: Real> JetPoint<T> {
    pub fn new(order: usize, base_dim: usize, coords: Vec<T>) -> Result<Self> {
        let expect = (1usize << order) * base_dim;
        if coords.len() != expect {
            return Err(GeomError::DimensionMismatch {
                expected: expect,
                got: coords.len(),
                context: "jet point coordinates",
            });
        }
        Ok(JetPoint {
            order,
            base_dim,
            coords,
        })
    }

    pub fn zero(order: usize, base_dim: usize) -> Self {
        JetPoint {
            order,
            base_dim,
            coords: vec![T::zero(); (1usize << order) * base_dim],
        }
    }

    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn base_dim(&self) -> usize {
        self.base_dim
    }

    #[inline]
    pub fn num_blocks(&self) -> usize {
        1usize << self.order
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    #[inline]
    pub fn coords(&self) -> &[T] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<T> {
        self.coords
    }

    /// Block `b` interpreted as a binary string `s_1 .. s_l` with
    /// `b = sum s_j 2^{j-1}` (last character = outermost split = most
    /// significant bit).
    #[inline]
    pub fn block(&self, b: usize) -> &[T] {
        let n = self.base_dim;
        &self.coords[b * n..(b + 1) * n]
    }

    #[inline]
    pub fn block_mut(&mut self, b: usize) -> &mut [T] {
        let n = self.base_dim;
        &mut self.coords[b * n..(b + 1) * n]
    }

    /// The underlying chart point (block of the all-zeros string).
    #[inline]
    pub fn base(&self) -> &[T] {
        self.block(0)
    }
}

/// Binary-string label of block `b` at the given order ("" at order 0).
pub fn block_bits(b: usize, order: usize) -> String {
    (0..order)
        .map(|j| if (b >> j) & 1 == 1 { '1' } else { '0' })
        .collect()
}

/// A map evaluated at the base scalar and at nested dual towers above it.
///
/// Object safe; the four entry points are what the hand-instantiated jet
/// recursion needs for orders up to [`MAX_JET_ORDER`]. Implement
/// [`RealMap`] instead when the map has one generic formula — a blanket
/// impl lifts it to every tower level.
pub trait SmoothMap<T: Real>: Send + Sync {
    fn source_dim(&self) -> usize;
    fn target_dim(&self) -> usize;
    fn eval0(&self, x: &[T], out: &mut [T]);
    fn eval1(&self, x: &[Dual<T>], out: &mut [Dual<T>]);
    fn eval2(&self, x: &[Dual<Dual<T>>], out: &mut [Dual<Dual<T>>]);
    fn eval3(&self, x: &[Dual<Dual<Dual<T>>>], out: &mut [Dual<Dual<Dual<T>>>]);
}

/// A map with a single scalar-generic formula.
pub trait RealMap: Send + Sync {
    fn source_dim(&self) -> usize;
    fn target_dim(&self) -> usize;
    fn eval<S: Real>(&self, x: &[S], out: &mut [S]);
}

impl<T: Real, M: RealMap> SmoothMap<T> for M {
    fn source_dim(&self) -> usize {
        RealMap::source_dim(self)
    }
    fn target_dim(&self) -> usize {
        RealMap::target_dim(self)
    }
    fn eval0(&self, x: &[T], out: &mut [T]) {
        self.eval(x, out)
    }
    fn eval1(&self, x: &[Dual<T>], out: &mut [Dual<T>]) {
        self.eval(x, out)
    }
    fn eval2(&self, x: &[Dual<Dual<T>>], out: &mut [Dual<Dual<T>>]) {
        self.eval(x, out)
    }
    fn eval3(&self, x: &[Dual<Dual<Dual<T>>>], out: &mut [Dual<Dual<Dual<T>>>]) {
        self.eval(x, out)
    }
}

#[inline]
fn pack<S: Real>(base: &[S], fib: &[S]) -> Vec<Dual<S>> {
    base.iter()
        .zip(fib)
        .map(|(&re, &du)| Dual { re, du })
        .collect()
}

#[inline]
fn unpack<S: Real>(y: &[Dual<S>]) -> Vec<S> {
    y.iter()
        .map(|d| d.re)
        .chain(y.iter().map(|d| d.du))
        .collect()
}

fn jet1_l0<T: Real>(m: &dyn SmoothMap<T>, x: &[T]) -> Vec<T> {
    let n = x.len() / 2;
    let z = pack(&x[..n], &x[n..]);
    let mut y = vec![Dual::constant(T::zero()); m.target_dim()];
    m.eval1(&z, &mut y);
    unpack(&y)
}

fn jet1_l1<T: Real>(m: &dyn SmoothMap<T>, x: &[Dual<T>]) -> Vec<Dual<T>> {
    let n = x.len() / 2;
    let z = pack(&x[..n], &x[n..]);
    let mut y = vec![Dual::constant(Dual::constant(T::zero())); m.target_dim()];
    m.eval2(&z, &mut y);
    unpack(&y)
}

fn jet1_l2<T: Real>(m: &dyn SmoothMap<T>, x: &[Dual<Dual<T>>]) -> Vec<Dual<Dual<T>>> {
    let n = x.len() / 2;
    let z = pack(&x[..n], &x[n..]);
    let mut y =
        vec![Dual::constant(Dual::constant(Dual::constant(T::zero()))); m.target_dim()];
    m.eval3(&z, &mut y);
    unpack(&y)
}

fn jet2_l0<T: Real>(m: &dyn SmoothMap<T>, x: &[T]) -> Vec<T> {
    let h = x.len() / 2;
    let z = pack(&x[..h], &x[h..]);
    unpack(&jet1_l1(m, &z))
}

fn jet2_l1<T: Real>(m: &dyn SmoothMap<T>, x: &[Dual<T>]) -> Vec<Dual<T>> {
    let h = x.len() / 2;
    let z = pack(&x[..h], &x[h..]);
    unpack(&jet1_l2(m, &z))
}

fn jet3_l0<T: Real>(m: &dyn SmoothMap<T>, x: &[T]) -> Vec<T> {
    let h = x.len() / 2;
    let z = pack(&x[..h], &x[h..]);
    unpack(&jet2_l1(m, &z))
}

/// The order-l nested differential of `m` applied to a jet point of the
/// same order. Orders beyond [`MAX_JET_ORDER`] are rejected.
pub fn nested_jet<T: Real>(m: &dyn SmoothMap<T>, p: &JetPoint<T>) -> Result<JetPoint<T>> {
    if p.base_dim() != m.source_dim() {
        return Err(GeomError::DimensionMismatch {
            expected: m.source_dim(),
            got: p.base_dim(),
            context: "nested_jet source dimension",
        });
    }
    let out = match p.order() {
        0 => {
            let mut y = vec![T::zero(); m.target_dim()];
            m.eval0(p.coords(), &mut y);
            y
        }
        1 => jet1_l0(m, p.coords()),
        2 => jet2_l0(m, p.coords()),
        3 => jet3_l0(m, p.coords()),
        more => {
            return Err(GeomError::JetOrderUnsupported {
                requested: more,
                max: MAX_JET_ORDER,
            })
        }
    };
    JetPoint::new(p.order(), m.target_dim(), out)
}

/// Ambient space an embedding maps into.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Ambient {
    /// Euclidean space of the embedding's target dimension.
    Euclidean,
    /// Minkowski ambient hosting the hyperboloid of the given parameter.
    Lorentz { r_tilde: f64 },
}

impl Ambient {
    /// Ambient inner product of two target vectors.
    pub fn inner<T: Real>(&self, a: &[T], b: &[T]) -> T {
        match self {
            Ambient::Euclidean => {
                let mut acc = T::zero();
                for (&x, &y) in a.iter().zip(b) {
                    acc += x * y;
                }
                acc
            }
            Ambient::Lorentz { .. } => {
                let mut acc = -(a[0] * b[0]);
                for i in 1..a.len() {
                    acc += a[i] * b[i];
                }
                acc
            }
        }
    }
}

/// An isometric embedding of a chart into an ambient space, with
/// derivative access through nested forward-mode evaluation.
#[derive(Clone)]
pub struct EmbeddingMap<T: Real> {
    label: String,
    source: MetricChart<T>,
    target_dim: usize,
    ambient: Ambient,
    map: Arc<dyn SmoothMap<T>>,
}

impl<T: Real> EmbeddingMap<T> {
    pub fn new(
        label: impl Into<String>,
        source: MetricChart<T>,
        ambient: Ambient,
        map: Arc<dyn SmoothMap<T>>,
    ) -> Result<Self> {
        if map.source_dim() != source.dim() {
            return Err(GeomError::DimensionMismatch {
                expected: source.dim(),
                got: map.source_dim(),
                context: "embedding source dimension",
            });
        }
        Ok(EmbeddingMap {
            label: label.into(),
            source,
            target_dim: map.target_dim(),
            ambient,
            map,
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn source(&self) -> &MetricChart<T> {
        &self.source
    }

    pub fn target_dim(&self) -> usize {
        self.target_dim
    }

    pub fn ambient(&self) -> Ambient {
        self.ambient
    }

    pub fn map(&self) -> &dyn SmoothMap<T> {
        self.map.as_ref()
    }

    /// Ambient position of a chart point.
    pub fn value_at(&self, p: &[T]) -> Result<Vec<T>> {
        let q = self.source.domain().normalize(p)?;
        let mut y = vec![T::zero(); self.target_dim];
        self.map.eval0(&q, &mut y);
        Ok(y)
    }

    /// Order-l nested differential at a jet point (base block is wrapped
    /// into the chart domain; tangent blocks pass through unchanged).
    pub fn nested_differential(&self, p: &JetPoint<T>) -> Result<JetPoint<T>> {
        let base = self.source.domain().normalize(p.base())?;
        let mut q = p.clone();
        q.block_mut(0).copy_from_slice(&base);
        nested_jet(self.map.as_ref(), &q)
    }

    /// Columns of the first differential at `p`: `df(e_j)` for each chart
    /// direction `j`.
    pub fn jacobian_columns(&self, p: &[T]) -> Result<Vec<Vec<T>>> {
        let q = self.source.domain().normalize(p)?;
        let n = self.source.dim();
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let z: Vec<Dual<T>> = q
                .iter()
                .enumerate()
                .map(|(i, &x)| Dual {
                    re: x,
                    du: if i == j { T::one() } else { T::zero() },
                })
                .collect();
            let mut y = vec![Dual::constant(T::zero()); self.target_dim];
            self.map.eval1(&z, &mut y);
            cols.push(y.iter().map(|d| d.du).collect());
        }
        Ok(cols)
    }

    /// `|| (df)^T G_amb (df) - g ||_F` at `p`: how far the pullback of the
    /// ambient metric is from the chart metric. Zero for exact isometric
    /// embeddings.
    pub fn isometry_residual(&self, p: &[T]) -> Result<T> {
        let cols = self.jacobian_columns(p)?;
        let g = self.source.metric_eval(p)?;
        let n = self.source.dim();
        let diff = Mat::from_fn(n, |i, j| self.ambient.inner(&cols[i], &cols[j]) - g[(i, j)]);
        Ok(diff.frobenius_norm())
    }
}
