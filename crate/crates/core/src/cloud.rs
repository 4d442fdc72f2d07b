//! Finite point clouds, their serialization, and lifted clouds.
//!
//! A [`PointCloud`] is the finite stand-in for a compact subset of a
//! metric space: a list of same-dimension vectors tagged with the metric
//! that distances between them should use (Euclidean, or the hyperboloid
//! distance for clouds living on a hyperboloid sheet). Hyperbolic clouds
//! are validated against their sheet at construction so that distance
//! kernels can skip per-pair checks.
//!
//! A [`LiftedCloud`] is the image of a capped unit-bundle sample under the
//! nested differential of an embedding: a cloud in dimension
//! `2^order * m`, Euclidean because the iterated Sasaki metric over a flat
//! target is flat. Curved (Lorentz) ambients only support order 0, where
//! the "lift" is the embedding itself and the cloud lives on the
//! hyperboloid.

use crate::error::{GeomError, Result};
use crate::jet::{block_bits, Ambient, EmbeddingMap, JetPoint};
use crate::lorentz::{hyperbolic_distance_unchecked, hyperboloid_check, TOL_HYP};
use crate::real::Real;
use crate::sasaki::UnitBundleSample;
use std::io::{BufRead, Write};

/// Which distance the points of a cloud are compared with.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum MetricKind {
    Euclidean,
    /// Geodesic distance of the hyperboloid sheet with this parameter.
    Hyperbolic { r_tilde: f64 },
}

impl MetricKind {
    /// Distance between two raw point vectors under this metric.
    #[inline]
    pub fn dist<T: Real>(&self, p: &[T], q: &[T]) -> T {
        match self {
            MetricKind::Euclidean => {
                let mut acc = T::zero();
                for (&a, &b) in p.iter().zip(q) {
                    let d = a - b;
                    acc += d * d;
                }
                acc.sqrt()
            }
            MetricKind::Hyperbolic { r_tilde } => hyperbolic_distance_unchecked(p, q, *r_tilde),
        }
    }
}

/// A non-empty list of same-dimension points with a metric tag.
#[derive(Clone, Debug)]
pub struct PointCloud<T> {
    dim: usize,
    metric: MetricKind,
    data: Vec<T>,
}

impl<T: Real> PointCloud<T> {
    pub fn new(dim: usize, metric: MetricKind, points: Vec<Vec<T>>) -> Result<Self> {
        let mut data = Vec::with_capacity(points.len() * dim);
        for p in &points {
            if p.len() != dim {
                return Err(GeomError::DimensionMismatch {
                    expected: dim,
                    got: p.len(),
                    context: "point cloud row",
                });
            }
            data.extend_from_slice(p);
        }
        Self::from_flat(dim, metric, data)
    }

    /// Construct from row-major flat coordinates.
    pub fn from_flat(dim: usize, metric: MetricKind, data: Vec<T>) -> Result<Self> {
        if dim == 0 {
            return Err(GeomError::InvalidConfig("cloud dimension must be positive".into()));
        }
        if data.is_empty() {
            return Err(GeomError::EmptyCloud {
                context: "cloud construction",
            });
        }
        if data.len() % dim != 0 {
            return Err(GeomError::DimensionMismatch {
                expected: dim,
                got: data.len() % dim,
                context: "flat cloud data not a multiple of dim",
            });
        }
        if let MetricKind::Hyperbolic { r_tilde } = metric {
            for i in 0..data.len() / dim {
                hyperboloid_check(&data[i * dim..(i + 1) * dim], r_tilde, TOL_HYP)?;
            }
        }
        Ok(PointCloud { dim, metric, data })
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.data.len() / self.dim
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn point(&self, i: usize) -> &[T] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    #[inline]
    pub fn flat(&self) -> &[T] {
        &self.data
    }

    pub fn iter(&self) -> impl Iterator<Item = &[T]> {
        self.data.chunks_exact(self.dim)
    }

    /// Distance between two member points under the cloud metric.
    #[inline]
    pub fn dist_between(&self, i: usize, j: usize) -> T {
        self.metric.dist(self.point(i), self.point(j))
    }

    /// Write as CSV: `# comment` lines, a header row, then one row per
    /// point. Values use the shortest round-trip decimal form, so a cloud
    /// serializes to identical bytes on every run.
    pub fn write_csv<W: Write>(
        &self,
        mut w: W,
        headers: &[String],
        comments: &[String],
    ) -> Result<()> {
        if headers.len() != self.dim {
            return Err(GeomError::DimensionMismatch {
                expected: self.dim,
                got: headers.len(),
                context: "csv header count",
            });
        }
        for c in comments {
            writeln!(w, "# {c}")?;
        }
        writeln!(w, "{}", headers.join(","))?;
        let mut line = String::new();
        for p in self.iter() {
            line.clear();
            for (i, x) in p.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&format!("{x}"));
            }
            writeln!(w, "{line}")?;
        }
        Ok(())
    }

    /// Read a CSV written by [`PointCloud::write_csv`] (or any compatible
    /// numeric CSV, with or without a header row). Hyperbolic clouds are
    /// revalidated against their sheet.
    pub fn read_csv<R: BufRead>(r: R, metric: MetricKind) -> Result<Self> {
        let mut dim: Option<usize> = None;
        let mut data: Vec<T> = Vec::new();
        let mut saw_header = false;
        for (lineno, line) in r.lines().enumerate() {
            let line = line?;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let fields: Vec<&str> = trimmed.split(',').map(str::trim).collect();
            let parsed: Option<Vec<f64>> = fields.iter().map(|f| f.parse::<f64>().ok()).collect();
            match parsed {
                None => {
                    if saw_header || dim.is_some() {
                        return Err(GeomError::InvalidConfig(format!(
                            "csv line {}: non-numeric field in data row",
                            lineno + 1
                        )));
                    }
                    saw_header = true;
                    dim = Some(fields.len());
                }
                Some(vals) => {
                    match dim {
                        None => dim = Some(vals.len()),
                        Some(d) if d != vals.len() => {
                            return Err(GeomError::InvalidConfig(format!(
                                "csv line {}: expected {} columns, got {}",
                                lineno + 1,
                                d,
                                vals.len()
                            )))
                        }
                        _ => {}
                    }
                    data.extend(vals.into_iter().map(T::of));
                }
            }
        }
        let dim = dim.ok_or(GeomError::EmptyCloud {
            context: "csv had no rows",
        })?;
        Self::from_flat(dim, metric, data)
    }
}

/// Column names for a lifted cloud: `x{i}` at order 0, block-labelled
/// `b{bits}_x{i}` above (bits read innermost split first).
pub fn lifted_headers(order: usize, target_dim: usize) -> Vec<String> {
    if order == 0 {
        return (0..target_dim).map(|i| format!("x{i}")).collect();
    }
    let mut out = Vec::with_capacity((1usize << order) * target_dim);
    for b in 0..(1usize << order) {
        let bits = block_bits(b, order);
        for i in 0..target_dim {
            out.push(format!("b{bits}_x{i}"));
        }
    }
    out
}

/// The image of a unit-bundle sample under an embedding's nested
/// differential.
#[derive(Clone, Debug)]
pub struct LiftedCloud<T> {
    pub order: usize,
    /// Ambient dimension m of the embedding target.
    pub target_dim: usize,
    pub cloud: PointCloud<T>,
}

impl<T: Real> LiftedCloud<T> {
    pub fn headers(&self) -> Vec<String> {
        lifted_headers(self.order, self.target_dim)
    }
}

/// Apply the order-`sample.order` nested differential of `f` to every
/// sample point. Euclidean targets accept any supported order and produce
/// a Euclidean cloud in dimension `2^order * m`; Lorentz targets only
/// support order 0, where the image lives on the hyperboloid.
pub fn lift_cloud<T: Real>(
    f: &EmbeddingMap<T>,
    sample: &UnitBundleSample<T>,
) -> Result<LiftedCloud<T>> {
    if sample.points.is_empty() {
        return Err(GeomError::EmptyCloud {
            context: "unit bundle sample",
        });
    }
    let m = f.target_dim();
    let metric = match f.ambient() {
        Ambient::Euclidean => MetricKind::Euclidean,
        Ambient::Lorentz { r_tilde } => {
            if sample.order > 0 {
                return Err(GeomError::InvalidConfig(format!(
                    "lift order {} requested in a Lorentz ambient; only order 0 is supported off flat targets",
                    sample.order
                )));
            }
            MetricKind::Hyperbolic { r_tilde }
        }
    };
    let out_dim = (1usize << sample.order) * m;
    let mut data: Vec<T> = Vec::with_capacity(sample.points.len() * out_dim);
    for p in &sample.points {
        let image: JetPoint<T> = f.nested_differential(p)?;
        data.extend_from_slice(image.coords());
    }
    Ok(LiftedCloud {
        order: sample.order,
        target_dim: m,
        cloud: PointCloud::from_flat(out_dim, metric, data)?,
    })
}
