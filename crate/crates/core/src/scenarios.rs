//! Concrete manifold families: round circles and spheres, their
//! hyperbolic-sphere embeddings, the wavy isometric circle, and the
//! double-wind curve, plus the closed-form reference function for
//! concentric spheres in hyperbolic space.
//!
//! Families are named in configuration strings as `name{key=value,...}`,
//! e.g. `circle{r=1}`, `sphere{r=2}`, `wavy{r1=1,r2=1.1,eps=0.05}`,
//! `double_wind{r1=1,delta=0.01}`, `hyp_sphere{n=1,r=1,rt=0.5}`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use crate::align::CloudFactory;
use crate::chart::{arc_circle_chart, circle_chart, sphere_polar_chart};
use crate::cloud::{lift_cloud, LiftedCloud, PointCloud};
use crate::curve::{curve_length_gl, ArcLengthCurve};
use crate::error::{GeomError, Result};
use crate::jet::{Ambient, EmbeddingMap, RealMap};
use crate::real::Real;
use crate::sasaki::{unit_bundle_sample, SampleCounts};

/// Closed-form distance between the concentric-sphere embeddings of
/// radii r1 and r2 in the hyperbolic space of curvature -1/r̃²:
/// r̃·(arcsinh(r2/r̃) − arcsinh(r1/r̃)).
pub fn f_function(r1: f64, r2: f64, r_tilde: f64) -> Result<f64> {
    for (name, v) in [("r1", r1), ("r2", r2), ("r_tilde", r_tilde)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(GeomError::NonPositive { name, value: v });
        }
    }
    Ok(r_tilde * ((r2 / r_tilde).asinh() - (r1 / r_tilde).asinh()))
}

// ---------------------------------------------------------------------
// concrete smooth maps
// ---------------------------------------------------------------------

/// Round circle of radius r in the plane, angle parametrization.
#[derive(Clone, Copy, Debug)]
pub struct CircleEmbedding {
    pub r: f64,
}

impl RealMap for CircleEmbedding {
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

/// Round sphere of radius r in E³, polar-angle parametrization
/// (φ from the north pole, θ around the axis).
#[derive(Clone, Copy, Debug)]
pub struct SphereEmbedding {
    pub r: f64,
}

impl RealMap for SphereEmbedding {
    fn source_dim(&self) -> usize {
        2
    }
    fn target_dim(&self) -> usize {
        3
    }
    fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
        let r = S::of(self.r);
        let (phi, theta) = (x[0], x[1]);
        out[0] = r * phi.sin() * theta.cos();
        out[1] = r * phi.sin() * theta.sin();
        out[2] = r * phi.cos();
    }
}

/// Round sphere of radius r placed on the hyperboloid of radius r̃:
/// a constant time-like first coordinate √(r̃²+r²) in front of the
/// Euclidean embedding.
#[derive(Clone, Copy, Debug)]
pub struct HyperbolicSphereEmbedding {
    pub n: usize,
    pub r: f64,
    pub r_tilde: f64,
}

impl RealMap for HyperbolicSphereEmbedding {
    fn source_dim(&self) -> usize {
        self.n
    }
    fn target_dim(&self) -> usize {
        self.n + 2
    }
    fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
        let height = S::of((self.r_tilde * self.r_tilde + self.r * self.r).sqrt());
        out[0] = height;
        match self.n {
            1 => {
                let c = CircleEmbedding { r: self.r };
                c.eval(x, &mut out[1..]);
            }
            _ => {
                let s = SphereEmbedding { r: self.r };
                s.eval(x, &mut out[1..]);
            }
        }
    }
}

/// Polar-graph wave around a circle of radius r1:
/// ρ(θ) = r1 + a·sin(Nθ).
#[derive(Clone, Copy, Debug)]
pub struct PolarWave {
    pub r1: f64,
    pub amplitude: f64,
    pub waves: usize,
}

impl RealMap for PolarWave {
    fn source_dim(&self) -> usize {
        1
    }
    fn target_dim(&self) -> usize {
        2
    }
    fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
        let rho = S::of(self.r1) + S::of(self.amplitude) * (S::of(self.waves as f64) * x[0]).sin();
        out[0] = rho * x[0].cos();
        out[1] = rho * x[0].sin();
    }
}

/// Closed curve winding twice around the circle of radius r1 inside a
/// tube of radius δ (two longitudinal turns, one meridian turn).
#[derive(Clone, Copy, Debug)]
pub struct DoubleWindCurve {
    pub r1: f64,
    pub delta: f64,
}

impl RealMap for DoubleWindCurve {
    fn source_dim(&self) -> usize {
        1
    }
    fn target_dim(&self) -> usize {
        3
    }
    fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
        let t = x[0];
        let two_t = t + t;
        let rho = S::of(self.r1) + S::of(self.delta) * t.cos();
        out[0] = rho * two_t.cos();
        out[1] = rho * two_t.sin();
        out[2] = S::of(self.delta) * t.sin();
    }
}

// ---------------------------------------------------------------------
// wavy-circle construction
// ---------------------------------------------------------------------

/// Diagnostics of a constructed wavy circle.
#[derive(Clone, Copy, Debug)]
pub struct WavyInfo {
    /// Selected wave count (smallest feasible N).
    pub waves: usize,
    /// Solved amplitude a ∈ (0, 0.9·ε].
    pub amplitude: f64,
    /// Measured total length (equals 2π·r2 to the bisection tolerance).
    pub length: f64,
}

const WAVY_N_MAX: usize = 1_000_000;

fn wavy_length(r1: f64, amplitude: f64, waves: usize) -> f64 {
    let curve = PolarWave {
        r1,
        amplitude,
        waves,
    };
    let panels = 32 * waves + 32;
    curve_length_gl(&curve, 0.0, 2.0 * std::f64::consts::PI, panels)
}

/// Construct the wavy isometric circle: the shortest-wave polar graph
/// ρ(θ) = r1 + a·sin(Nθ) of total length 2π·r2 with amplitude bounded
/// by 0.9·ε, arc-length reparametrized so the returned map is an
/// isometric embedding of the circle of radius r2 confined to the
/// ε-annulus of the circle of radius r1.
pub fn build_wavy_circle(r1: f64, r2: f64, eps: f64) -> Result<(EmbeddingMap<f64>, WavyInfo)> {
    if !(r2 > r1) || !(r1 > eps) || !(eps > 0.0) {
        return Err(GeomError::WavyConstruction {
            reason: format!("need r2 > r1 > eps > 0, got r1={r1}, r2={r2}, eps={eps}"),
        });
    }
    let target = 2.0 * std::f64::consts::PI * r2;
    let a_max = 0.9 * eps;

    // smallest N whose maximal-amplitude wave reaches the target length;
    // length grows with N, so bracket by doubling then bisect
    let feasible = |n: usize| wavy_length(r1, a_max, n) >= target;
    if wavy_length(r1, a_max, 1) < target {
        let mut lo = 1usize; // infeasible
        let mut hi = 2usize;
        while !feasible(hi) {
            lo = hi;
            hi *= 2;
            if hi > WAVY_N_MAX {
                return Err(GeomError::WavyConstruction {
                    reason: format!(
                        "no wave count up to {WAVY_N_MAX} reaches length {target:.6} \
                         within the amplitude bound {a_max:.6}"
                    ),
                });
            }
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if feasible(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        build_wavy_at(r1, r2, eps, hi)
    } else {
        build_wavy_at(r1, r2, eps, 1)
    }
}

fn build_wavy_at(r1: f64, r2: f64, eps: f64, waves: usize) -> Result<(EmbeddingMap<f64>, WavyInfo)> {
    let target = 2.0 * std::f64::consts::PI * r2;
    let a_max = 0.9 * eps;
    // length is increasing in the amplitude; bisect to 1e-12
    let mut lo = 0.0f64;
    let mut hi = a_max;
    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if wavy_length(r1, mid, waves) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let amplitude = 0.5 * (lo + hi);
    let curve = PolarWave {
        r1,
        amplitude,
        waves,
    };
    let nodes = 4096.max(256 * waves);
    let arc = ArcLengthCurve::new(curve, 2.0 * std::f64::consts::PI, nodes)?;
    let length = arc.length();
    let chart = arc_circle_chart(length);
    let map = EmbeddingMap::new(
        format!("wavy{{r1={r1},r2={r2},eps={eps}}}"),
        chart,
        Ambient::Euclidean,
        Arc::new(arc),
    )?;
    Ok((
        map,
        WavyInfo {
            waves,
            amplitude,
            length,
        },
    ))
}

/// Construct the arc-length double-wind curve and report its length.
pub fn build_double_wind(r1: f64, delta: f64) -> Result<(EmbeddingMap<f64>, f64)> {
    if !(r1 > 0.0) || !(delta > 0.0) || delta >= 0.5 * r1 {
        return Err(GeomError::CurveConstruction {
            reason: format!("need 0 < delta << r1, got r1={r1}, delta={delta}"),
        });
    }
    let curve = DoubleWindCurve { r1, delta };
    let arc = ArcLengthCurve::new(curve, 2.0 * std::f64::consts::PI, 4096)?;
    let length = arc.length();
    let chart = arc_circle_chart(length);
    let map = EmbeddingMap::new(
        format!("double_wind{{r1={r1},delta={delta}}}"),
        chart,
        Ambient::Euclidean,
        Arc::new(arc),
    )?;
    Ok((map, length))
}

// ---------------------------------------------------------------------
// family registry
// ---------------------------------------------------------------------

/// A named manifold-plus-embedding family.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    Circle { r: f64 },
    Sphere { r: f64 },
    Wavy { r1: f64, r2: f64, eps: f64 },
    DoubleWind { r1: f64, delta: f64 },
    HypSphere { n: usize, r: f64, rt: f64 },
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Family::Circle { r } => write!(f, "circle{{r={r}}}"),
            Family::Sphere { r } => write!(f, "sphere{{r={r}}}"),
            Family::Wavy { r1, r2, eps } => write!(f, "wavy{{r1={r1},r2={r2},eps={eps}}}"),
            Family::DoubleWind { r1, delta } => {
                write!(f, "double_wind{{r1={r1},delta={delta}}}")
            }
            Family::HypSphere { n, r, rt } => write!(f, "hyp_sphere{{n={n},r={r},rt={rt}}}"),
        }
    }
}

/// Parse a family spec of the form `name{key=value,...}`.
pub fn parse_family(spec: &str) -> Result<Family> {
    let spec = spec.trim();
    let open = spec.find('{').ok_or_else(|| {
        GeomError::FamilySpec(format!("'{spec}': expected name{{key=value,...}}"))
    })?;
    if !spec.ends_with('}') {
        return Err(GeomError::FamilySpec(format!("'{spec}': missing closing brace")));
    }
    let name = &spec[..open];
    let inner = &spec[open + 1..spec.len() - 1];
    let mut params: BTreeMap<String, f64> = BTreeMap::new();
    for part in inner.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let (k, v) = part.split_once('=').ok_or_else(|| {
            GeomError::FamilySpec(format!("'{spec}': parameter '{part}' is not key=value"))
        })?;
        let key = k.trim().to_string();
        let value: f64 = v.trim().parse().map_err(|_| {
            GeomError::FamilySpec(format!("'{spec}': parameter '{key}' has non-numeric value '{}'", v.trim()))
        })?;
        if params.insert(key.clone(), value).is_some() {
            return Err(GeomError::FamilySpec(format!(
                "'{spec}': duplicate parameter '{key}'"
            )));
        }
    }

    let take = |params: &mut BTreeMap<String, f64>, key: &str| -> Result<f64> {
        params.remove(key).ok_or_else(|| {
            GeomError::FamilySpec(format!("'{spec}': missing parameter '{key}'"))
        })
    };
    let family = match name {
        "circle" => Family::Circle {
            r: take(&mut params, "r")?,
        },
        "sphere" => Family::Sphere {
            r: take(&mut params, "r")?,
        },
        "wavy" => Family::Wavy {
            r1: take(&mut params, "r1")?,
            r2: take(&mut params, "r2")?,
            eps: take(&mut params, "eps")?,
        },
        "double_wind" => Family::DoubleWind {
            r1: take(&mut params, "r1")?,
            delta: take(&mut params, "delta")?,
        },
        "hyp_sphere" => {
            let n = take(&mut params, "n")?;
            if n != 1.0 && n != 2.0 {
                return Err(GeomError::FamilySpec(format!(
                    "'{spec}': n must be 1 or 2, got {n}"
                )));
            }
            Family::HypSphere {
                n: n as usize,
                r: take(&mut params, "r")?,
                rt: take(&mut params, "rt")?,
            }
        }
        other => {
            return Err(GeomError::FamilySpec(format!(
                "unknown family '{other}' (expected circle, sphere, wavy, double_wind, hyp_sphere)"
            )))
        }
    };
    if let Some(extra) = params.keys().next() {
        return Err(GeomError::FamilySpec(format!(
            "'{spec}': unexpected parameter '{extra}'"
        )));
    }
    family.validate()?;
    Ok(family)
}

impl Family {
    fn validate(&self) -> Result<()> {
        let positive = |name: &'static str, v: f64| -> Result<()> {
            if !(v > 0.0) || !v.is_finite() {
                Err(GeomError::NonPositive { name, value: v })
            } else {
                Ok(())
            }
        };
        match *self {
            Family::Circle { r } | Family::Sphere { r } => positive("r", r),
            Family::Wavy { r1, r2, eps } => {
                positive("r1", r1)?;
                positive("r2", r2)?;
                positive("eps", eps)?;
                if !(r2 > r1) || !(r1 > eps) {
                    return Err(GeomError::FamilySpec(format!(
                        "wavy requires r2 > r1 > eps, got r1={r1}, r2={r2}, eps={eps}"
                    )));
                }
                Ok(())
            }
            Family::DoubleWind { r1, delta } => {
                positive("r1", r1)?;
                positive("delta", delta)?;
                if delta >= 0.5 * r1 {
                    return Err(GeomError::FamilySpec(format!(
                        "double_wind requires delta << r1, got r1={r1}, delta={delta}"
                    )));
                }
                Ok(())
            }
            Family::HypSphere { n, r, rt } => {
                if n != 1 && n != 2 {
                    return Err(GeomError::FamilySpec(format!(
                        "hyp_sphere dimension n must be 1 or 2, got {n}"
                    )));
                }
                positive("r", r)?;
                positive("rt", rt)
            }
        }
    }

    /// Source-manifold dimension.
    pub fn source_dim(&self) -> usize {
        match self {
            Family::Sphere { .. } => 2,
            Family::HypSphere { n, .. } => *n,
            _ => 1,
        }
    }

    /// Ambient target dimension of the built embedding.
    pub fn target_dim(&self) -> usize {
        match self {
            Family::Circle { .. } | Family::Wavy { .. } => 2,
            Family::Sphere { .. } | Family::DoubleWind { .. } => 3,
            Family::HypSphere { n, .. } => n + 2,
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        matches!(self, Family::HypSphere { .. })
    }

    /// Construct the embedding map (arc-length reparametrized for the
    /// curve families).
    pub fn build_embedding(&self) -> Result<EmbeddingMap<f64>> {
        match *self {
            Family::Circle { r } => EmbeddingMap::new(
                format!("circle{{r={r}}}"),
                circle_chart(r),
                Ambient::Euclidean,
                Arc::new(CircleEmbedding { r }),
            ),
            Family::Sphere { r } => EmbeddingMap::new(
                format!("sphere{{r={r}}}"),
                sphere_polar_chart(r),
                Ambient::Euclidean,
                Arc::new(SphereEmbedding { r }),
            ),
            Family::Wavy { r1, r2, eps } => Ok(build_wavy_circle(r1, r2, eps)?.0),
            Family::DoubleWind { r1, delta } => Ok(build_double_wind(r1, delta)?.0),
            Family::HypSphere { n, r, rt } => {
                let chart = if n == 1 {
                    circle_chart(r)
                } else {
                    sphere_polar_chart(r)
                };
                EmbeddingMap::new(
                    format!("hyp_sphere{{n={n},r={r},rt={rt}}}"),
                    chart,
                    Ambient::Lorentz { r_tilde: rt },
                    Arc::new(HyperbolicSphereEmbedding { n, r, r_tilde: rt }),
                )
            }
        }
    }

    /// Reasonable default sample counts per jet order; heavier scenarios
    /// override these from the command line.
    pub fn recommended_counts(&self, order: usize) -> Result<SampleCounts> {
        let one_dim = |base0: usize, base_hi: usize| -> SampleCounts {
            match order {
                0 => SampleCounts {
                    base: vec![base0],
                    intermediate: vec![],
                    top: 1,
                },
                1 => SampleCounts {
                    base: vec![base_hi],
                    intermediate: vec![],
                    top: 16,
                },
                2 => SampleCounts {
                    base: vec![base_hi],
                    intermediate: vec![9],
                    top: 64,
                },
                _ => SampleCounts {
                    base: vec![base_hi.min(64)],
                    intermediate: vec![5, 5],
                    top: 16,
                },
            }
        };
        match *self {
            Family::Circle { .. } => Ok(one_dim(2048, 96)),
            Family::Wavy { r1, r2, eps } => {
                // resolve each wave of the built curve
                let (_, info) = build_wavy_circle(r1, r2, eps)?;
                let dense = 4096.max(64 * info.waves);
                let lifted = 256.max(16 * info.waves);
                Ok(one_dim(dense, lifted))
            }
            Family::DoubleWind { .. } => Ok(one_dim(4096, 256)),
            Family::Sphere { .. } => Ok(match order {
                0 => SampleCounts {
                    base: vec![64, 128],
                    intermediate: vec![],
                    top: 1,
                },
                1 => SampleCounts {
                    base: vec![32, 48],
                    intermediate: vec![],
                    top: 32,
                },
                _ => SampleCounts {
                    base: vec![24, 32],
                    intermediate: vec![5],
                    top: 16,
                },
            }),
            Family::HypSphere { n, .. } => Ok(if n == 1 {
                SampleCounts {
                    base: vec![2048],
                    intermediate: vec![],
                    top: 1,
                }
            } else {
                SampleCounts {
                    base: vec![48, 96],
                    intermediate: vec![],
                    top: 1,
                }
            }),
        }
    }

    /// Build the lifted cloud of this family at the given jet order.
    pub fn lifted_cloud(
        &self,
        order: usize,
        counts: &SampleCounts,
        fiber_cap: f64,
        seed: u64,
    ) -> Result<LiftedCloud<f64>> {
        let map = self.build_embedding()?;
        let sample = unit_bundle_sample(map.source(), order, counts, fiber_cap, seed)?;
        lift_cloud(&map, &sample)
    }
}

/// Default cap on intermediate fiber norms used by the distance
/// estimator when none is specified.
pub const DEFAULT_FIBER_CAP: f64 = 0.25;

/// A [`CloudFactory`] over a fixed family (no optimizable shape
/// parameters; rigid motions carry the whole search).
pub struct FamilyFactory {
    pub family: Family,
    pub order: usize,
    pub counts: SampleCounts,
    pub fiber_cap: f64,
    pub seed: u64,
}

impl FamilyFactory {
    pub fn new(
        family: Family,
        order: usize,
        counts: SampleCounts,
        fiber_cap: f64,
        seed: u64,
    ) -> Result<Self> {
        if family.is_hyperbolic() && order > 0 {
            return Err(GeomError::InvalidConfig(
                "hyperbolic families support order-0 clouds only".into(),
            ));
        }
        Ok(FamilyFactory {
            family,
            order,
            counts,
            fiber_cap,
            seed,
        })
    }
}

impl CloudFactory<f64> for FamilyFactory {
    fn shape_bounds(&self) -> Vec<(f64, f64)> {
        Vec::new()
    }
    fn shape_init(&self) -> Vec<f64> {
        Vec::new()
    }
    fn build(&self, _shape: &[f64]) -> Result<LiftedCloud<f64>> {
        self.family
            .lifted_cloud(self.order, &self.counts, self.fiber_cap, self.seed)
    }
    fn fiber_cap(&self) -> Option<f64> {
        Some(self.fiber_cap)
    }
}

/// Project every point of a planar or spatial cloud onto the circle of
/// radius r in the xy-plane (the nearest-point "feet"). Used to compare
/// a curve's image against the exact circle without grid-misalignment
/// error.
pub fn circle_feet(cloud: &PointCloud<f64>, r: f64) -> Result<PointCloud<f64>> {
    if !(r > 0.0) {
        return Err(GeomError::NonPositive {
            name: "r",
            value: r,
        });
    }
    let dim = cloud.dim();
    if dim < 2 {
        return Err(GeomError::DimensionMismatch {
            expected: 2,
            got: dim,
            context: "circle feet projection",
        });
    }
    let mut rows = Vec::with_capacity(cloud.len());
    for p in cloud.iter() {
        let norm_xy = (p[0] * p[0] + p[1] * p[1]).sqrt();
        if norm_xy < 1e-12 {
            return Err(GeomError::NumericFailure(
                "circle feet: point on the axis has no unique projection".into(),
            ));
        }
        let scale = r / norm_xy;
        let mut q = vec![0.0; dim];
        q[0] = p[0] * scale;
        q[1] = p[1] * scale;
        rows.push(q);
    }
    PointCloud::new(dim, cloud.metric(), rows)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::align::embedding_ck_norm;
    use crate::hausdorff::hausdorff;
    use crate::lorentz::{hyperbolic_distance, lorentz_inner};
    use std::f64::consts::PI;

    #[test]
    fn f_function_matches_frozen_oracle() {
        // ln(2+sqrt 5) - ln(1+sqrt 2)
        let frozen = 0.562_261_888_159_267_3_f64;
        let v = f_function(1.0, 2.0, 1.0).unwrap();
        assert!((v - frozen).abs() < 1e-12, "{v}");
        // antisymmetry and vanishing diagonal
        let a = f_function(1.0, 2.0, 0.7).unwrap();
        let b = f_function(2.0, 1.0, 0.7).unwrap();
        assert!((a + b).abs() < 1e-15);
        assert_eq!(f_function(1.3, 1.3, 2.0).unwrap(), 0.0);
        // small-r̃ asymptotics: F(1, 2, t) -> t·ln 2
        let t = 1e-3;
        let v = f_function(1.0, 2.0, t).unwrap();
        assert!((v - t * 2.0f64.ln()).abs() < 1e-5, "{v}");
        // rejects non-positive arguments
        assert!(f_function(0.0, 1.0, 1.0).is_err());
        assert!(f_function(1.0, -1.0, 1.0).is_err());
        assert!(f_function(1.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn hyperbolic_embedding_lies_on_hyperboloid_and_is_isometric() {
        for (n, r, rt) in [(1usize, 1.0, 0.5), (1, 2.0, 1.0), (2, 1.5, 0.8)] {
            let fam = Family::HypSphere { n, r, rt };
            let map = fam.build_embedding().unwrap();
            let grid = crate::sasaki::base_grid(
                map.source(),
                if n == 1 { &[17][..] } else { &[7, 9][..] },
            )
            .unwrap();
            for p in &grid {
                let v = map.value_at(p).unwrap();
                let inner = lorentz_inner(&v, &v).unwrap();
                assert!((inner + rt * rt).abs() < 1e-12, "inner {inner}");
                let res = map.isometry_residual(p).unwrap();
                assert!(res < 1e-8, "residual {res}");
            }
        }
    }

    #[test]
    fn hyperbolic_circles_realize_the_closed_form() {
        for rt in [0.5f64, 1.0, 3.0] {
            let f1 = Family::HypSphere { n: 1, r: 1.0, rt }
                .build_embedding()
                .unwrap();
            let f2 = Family::HypSphere { n: 1, r: 2.0, rt }
                .build_embedding()
                .unwrap();
            let p = f1.value_at(&[0.0]).unwrap();
            let q = f2.value_at(&[0.0]).unwrap();
            let d = hyperbolic_distance(&p, &q, rt).unwrap();
            let expect = f_function(1.0, 2.0, rt).unwrap();
            assert!((d - expect).abs() < 1e-12, "rt={rt}: {d} vs {expect}");
        }
    }

    #[test]
    fn wavy_circle_meets_its_contract() {
        let (map, info) = build_wavy_circle(1.0, 1.1, 0.05).unwrap();
        // measured total length is the target circumference
        assert!(
            (info.length - 2.0 * PI * 1.1).abs() < 1e-9,
            "length {}",
            info.length
        );
        assert!(info.amplitude > 0.0 && info.amplitude <= 0.045 + 1e-12);
        assert!(info.waves >= 2, "waves {}", info.waves);
        // independent oracle re-measurement of the built polar curve
        let oracle = crate::curve::curve_length_adaptive(
            &PolarWave {
                r1: 1.0,
                amplitude: info.amplitude,
                waves: info.waves,
            },
            0.0,
            2.0 * PI,
            1e-12,
        );
        assert!((oracle - 2.0 * PI * 1.1).abs() < 1e-8, "oracle {oracle}");
        // the reparametrized embedding is isometric to about 1e-6
        let len = info.length;
        for i in 0..40 {
            let s = len * i as f64 / 40.0;
            let res = map.isometry_residual(&[s]).unwrap();
            assert!(res < 1e-6, "residual {res} at s={s}");
        }
    }

    #[test]
    fn wavy_image_stays_in_the_annulus() {
        let fam = Family::Wavy {
            r1: 1.0,
            r2: 1.1,
            eps: 0.05,
        };
        let counts = SampleCounts {
            base: vec![2048],
            intermediate: vec![],
            top: 1,
        };
        let wavy = fam.lifted_cloud(0, &counts, 0.25, 3).unwrap();
        let circle = Family::Circle { r: 1.0 }
            .lifted_cloud(0, &counts, 0.25, 3)
            .unwrap();
        let h = hausdorff(&wavy.cloud, &circle.cloud).unwrap();
        assert!(h <= 0.05, "hausdorff {h}");
        assert!(h > 0.01, "wave amplitude should be visible, got {h}");
    }

    #[test]
    fn halving_eps_never_decreases_the_wave_count() {
        let n_coarse = build_wavy_circle(1.0, 1.05, 0.04).unwrap().1.waves;
        let n_fine = build_wavy_circle(1.0, 1.05, 0.02).unwrap().1.waves;
        assert!(
            n_fine >= n_coarse,
            "waves went {n_coarse} -> {n_fine} when eps halved"
        );
    }

    #[test]
    fn degenerate_wavy_limit_has_tiny_amplitude() {
        let (_, info) = build_wavy_circle(1.0, 1.000001, 0.05).unwrap();
        assert_eq!(info.waves, 1);
        assert!(info.amplitude < 5e-3, "amplitude {}", info.amplitude);
    }

    #[test]
    fn wavy_rejects_bad_parameters() {
        assert!(build_wavy_circle(1.0, 0.9, 0.05).is_err()); // r2 < r1
        assert!(build_wavy_circle(0.04, 1.1, 0.05).is_err()); // r1 < eps
        assert!(build_wavy_circle(1.0, 1.1, 0.0).is_err());
    }

    #[test]
    fn double_wind_has_the_expected_length_and_confinement() {
        let (map, length) = build_double_wind(1.0, 0.01).unwrap();
        let r2 = length / (2.0 * PI);
        assert!(r2 > 2.0, "r2 {r2}");
        assert!(r2 - 2.0 < 1e-3, "r2 {r2}");
        // tube confinement via the feet projection: both directed
        // distances equal delta up to round-off
        let counts = SampleCounts {
            base: vec![4096],
            intermediate: vec![],
            top: 1,
        };
        let fam = Family::DoubleWind {
            r1: 1.0,
            delta: 0.01,
        };
        let cloud = fam.lifted_cloud(0, &counts, 0.25, 5).unwrap();
        let feet = circle_feet(&cloud.cloud, 1.0).unwrap();
        let h = hausdorff(&cloud.cloud, &feet).unwrap();
        assert!(h <= 0.01 + 1e-12, "hausdorff {h}");
        assert!(h > 0.009, "hausdorff {h}");
        // the reparametrized embedding stays isometric
        for i in 0..30 {
            let s = length * i as f64 / 30.0;
            let res = map.isometry_residual(&[s]).unwrap();
            assert!(res < 1e-6, "residual {res}");
        }
    }

    #[test]
    fn round_families_are_exactly_isometric_and_centered() {
        for fam in [Family::Circle { r: 1.5 }, Family::Sphere { r: 2.0 }] {
            let map = fam.build_embedding().unwrap();
            let counts = fam.recommended_counts(0).unwrap();
            let grid = crate::sasaki::base_grid(map.source(), &counts.base).unwrap();
            for p in grid.iter().step_by(7) {
                assert!(map.isometry_residual(p).unwrap() < 1e-12);
            }
            let cloud = fam.lifted_cloud(0, &counts, 0.25, 1).unwrap();
            let dim = cloud.cloud.dim();
            let mut bary = vec![0.0; dim];
            for p in cloud.cloud.iter() {
                for (b, &x) in bary.iter_mut().zip(p) {
                    *b += x;
                }
            }
            for b in &mut bary {
                *b /= cloud.cloud.len() as f64;
                assert!(b.abs() < 1e-10, "barycenter component {b}");
            }
        }
    }

    #[test]
    fn family_specs_parse_and_roundtrip() {
        let cases = [
            ("circle{r=1}", Family::Circle { r: 1.0 }),
            ("sphere{r=2.5}", Family::Sphere { r: 2.5 }),
            (
                "wavy{r1=1,r2=1.1,eps=0.05}",
                Family::Wavy {
                    r1: 1.0,
                    r2: 1.1,
                    eps: 0.05,
                },
            ),
            (
                " double_wind{ r1 = 1 , delta = 0.01 } ",
                Family::DoubleWind {
                    r1: 1.0,
                    delta: 0.01,
                },
            ),
            (
                "hyp_sphere{n=1,r=1,rt=0.5}",
                Family::HypSphere {
                    n: 1,
                    r: 1.0,
                    rt: 0.5,
                },
            ),
        ];
        for (spec, expect) in cases {
            let got = parse_family(spec).unwrap();
            assert_eq!(got, expect, "{spec}");
            // display form re-parses to the same family
            let again = parse_family(&got.to_string()).unwrap();
            assert_eq!(again, expect);
        }
    }

    #[test]
    fn malformed_family_specs_are_rejected_with_context() {
        let bad = [
            "circle",                       // no parameter block
            "circle{r=1",                   // unbalanced brace
            "circle{}",                     // missing r
            "circle{r=abc}",                // non-numeric
            "circle{r=1,r=2}",              // duplicate
            "circle{r=1,extra=3}",          // unknown key
            "torus{r=1}",                   // unknown family
            "hyp_sphere{n=3,r=1,rt=1}",     // bad dimension
            "wavy{r1=1,r2=0.9,eps=0.05}",   // r2 < r1
            "circle{r=-2}",                 // non-positive radius
        ];
        for spec in bad {
            let err = parse_family(spec).unwrap_err();
            let msg = err.to_string();
            assert!(
                parse_family(spec).is_err(),
                "'{spec}' should fail, message: {msg}"
            );
        }
    }

    #[test]
    fn amplitude_scaling_increases_the_second_order_norm() {
        // same wave count, two amplitudes: the order-2 term of the
        // embedding norm strictly grows with the amplitude
        let term2 = |amplitude: f64| -> f64 {
            let curve = PolarWave {
                r1: 1.0,
                amplitude,
                waves: 5,
            };
            let arc = ArcLengthCurve::new(curve, 2.0 * PI, 2048).unwrap();
            let len = arc.length();
            let map: EmbeddingMap<f64> = EmbeddingMap::new(
                "wave",
                arc_circle_chart(len),
                Ambient::Euclidean,
                Arc::new(arc),
            )
            .unwrap();
            let c2 = embedding_ck_norm(&map, 2, &[512]).unwrap();
            let c1 = embedding_ck_norm(&map, 1, &[512]).unwrap();
            c2 - c1
        };
        let low = term2(0.01);
        let high = term2(0.03);
        assert!(
            high > low + 0.1,
            "order-2 term should grow: {low} -> {high}"
        );
    }

    #[test]
    fn feet_projection_validates_input() {
        let cloud = PointCloud::new(
            2,
            crate::cloud::MetricKind::Euclidean,
            vec![vec![0.0, 0.0]],
        )
        .unwrap();
        assert!(circle_feet(&cloud, 1.0).is_err()); // axis point
        let ok = PointCloud::new(
            3,
            crate::cloud::MetricKind::Euclidean,
            vec![vec![3.0, 4.0, 2.0]],
        )
        .unwrap();
        let feet = circle_feet(&ok, 5.0).unwrap();
        assert_eq!(feet.point(0), &[3.0, 4.0, 0.0]);
    }
}
