//! Arc-length machinery for closed curves.
//!
//! Curve families are given as smooth parametrizations c(t) on a periodic
//! interval. Lifting them as isometric embeddings of a circle requires
//! the arc-length (unit-speed) reparametrization c(θ(s)). This module
//! measures cumulative length with composite Gauss-Legendre quadrature,
//! cross-checks totals with an independent adaptive-Simpson oracle, and
//! inverts s(θ) with a cubic Hermite interpolant whose node slopes
//! θ'(s_j) = 1/|c'(θ_j)| are analytic, not fitted. The interpolant is a
//! piecewise polynomial, so the reparametrized curve stays evaluable on
//! nested dual numbers and supports jet lifts to order 3; accuracy is
//! asserted by isometry-residual tests rather than assumed.

use crate::dual::Dual;
use crate::error::{GeomError, Result};
use crate::jet::RealMap;
use crate::real::Real;

/// 5-point Gauss-Legendre nodes and weights on [-1, 1].
const GL_NODES: [f64; 5] = [
    -0.906_179_845_938_664,
    -0.538_469_310_105_683_1,
    0.0,
    0.538_469_310_105_683_1,
    0.906_179_845_938_664,
];
const GL_WEIGHTS: [f64; 5] = [
    0.236_926_885_056_189_08,
    0.478_628_670_499_366_47,
    0.568_888_888_888_888_9,
    0.478_628_670_499_366_47,
    0.236_926_885_056_189_08,
];

/// Speed |c'(t)| of a curve given by a 1-parameter [`RealMap`].
pub fn curve_speed<M: RealMap>(map: &M, t: f64) -> f64 {
    debug_assert_eq!(map.source_dim(), 1);
    let x = [Dual::<f64>::variable(t)];
    let mut out = vec![Dual::<f64>::constant(0.0); map.target_dim()];
    map.eval(&x, &mut out);
    out.iter().fold(0.0, |acc, d| acc + d.du * d.du).sqrt()
}

/// Composite 5-point Gauss-Legendre arc length over [t0, t1] with the
/// given number of equal panels.
pub fn curve_length_gl<M: RealMap>(map: &M, t0: f64, t1: f64, panels: usize) -> f64 {
    assert!(panels > 0, "at least one quadrature panel");
    let h = (t1 - t0) / panels as f64;
    let mut total = 0.0;
    for p in 0..panels {
        let a = t0 + p as f64 * h;
        let mid = a + 0.5 * h;
        let mut panel = 0.0;
        for (node, w) in GL_NODES.iter().zip(&GL_WEIGHTS) {
            panel += w * curve_speed(map, mid + 0.5 * h * node);
        }
        total += 0.5 * h * panel;
    }
    total
}

/// Independent arc-length oracle: adaptive Simpson on the speed, refined
/// until the local error estimate is below `tol`.
pub fn curve_length_adaptive<M: RealMap>(map: &M, t0: f64, t1: f64, tol: f64) -> f64 {
    fn simpson(fa: f64, fm: f64, fb: f64, h: f64) -> f64 {
        h / 6.0 * (fa + 4.0 * fm + fb)
    }
    fn recurse<M: RealMap>(
        map: &M,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: usize,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = curve_speed(map, lm);
        let frm = curve_speed(map, rm);
        let left = simpson(fa, flm, fm, m - a);
        let right = simpson(fm, frm, fb, b - m);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        recurse(map, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
            + recurse(map, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
    }
    // seed with a few panels so periodic integrands cannot alias the
    // first Simpson estimate
    let seed_panels = 16;
    let h = (t1 - t0) / seed_panels as f64;
    let mut total = 0.0;
    for p in 0..seed_panels {
        let a = t0 + p as f64 * h;
        let b = a + h;
        let m = 0.5 * (a + b);
        let fa = curve_speed(map, a);
        let fm = curve_speed(map, m);
        let fb = curve_speed(map, b);
        let whole = simpson(fa, fm, fb, h);
        total += recurse(map, a, b, fa, fm, fb, whole, tol / seed_panels as f64, 40);
    }
    total
}

/// Unit-speed reparametrization of a closed parametric curve.
///
/// Wraps an inner curve c(t), t ∈ [0, period), and exposes s ↦ c(θ(s))
/// for arc length s ∈ [0, length). θ is a monotone piecewise-cubic
/// Hermite interpolant through dense samples of the true inverse, with
/// analytic slopes.
pub struct ArcLengthCurve<M> {
    inner: M,
    period: f64,
    /// Parameter values at the interpolation nodes (uniform in t).
    theta: Vec<f64>,
    /// Cumulative arc length at each node; s[0] = 0, s[K] = length.
    s: Vec<f64>,
    /// dθ/ds = 1/|c'(θ_j)| at each node.
    slope: Vec<f64>,
    length: f64,
}

impl<M: RealMap> ArcLengthCurve<M> {
    /// Build with `nodes` uniform parameter intervals (so `nodes + 1`
    /// node points in t; the cumulative length over each interval is
    /// measured by one 5-point Gauss-Legendre panel).
    pub fn new(inner: M, period: f64, nodes: usize) -> Result<Self> {
        if inner.source_dim() != 1 {
            return Err(GeomError::CurveConstruction {
                reason: "arc-length reparametrization needs a 1-parameter curve".into(),
            });
        }
        if !(period > 0.0) || nodes < 4 {
            return Err(GeomError::CurveConstruction {
                reason: format!("invalid period {period} or node count {nodes}"),
            });
        }
        let h = period / nodes as f64;
        let mut theta = Vec::with_capacity(nodes + 1);
        let mut s = Vec::with_capacity(nodes + 1);
        let mut slope = Vec::with_capacity(nodes + 1);
        let mut acc = 0.0;
        for j in 0..=nodes {
            let t = j as f64 * h;
            if j > 0 {
                acc += curve_length_gl(&inner, t - h, t, 1);
            }
            theta.push(t);
            s.push(acc);
            let v = curve_speed(&inner, t);
            if !(v > 1e-12) {
                return Err(GeomError::CurveConstruction {
                    reason: format!("curve speed vanishes near t = {t}"),
                });
            }
            slope.push(1.0 / v);
        }
        Ok(ArcLengthCurve {
            inner,
            period,
            theta,
            s,
            slope,
            length: acc,
        })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Period of the inner parametrization.
    pub fn period(&self) -> f64 {
        self.period
    }

    pub fn inner(&self) -> &M {
        &self.inner
    }

    /// The interpolated parameter θ(s), evaluated in any scalar type;
    /// the interval is selected from the value part of `s`.
    fn theta_at<S: Real>(&self, s_in: S) -> S {
        // wrap the value part into [0, length); the scalar itself is
        // shifted by the same constant so derivative parts pass through
        let raw = s_in.approx_f64();
        let wrapped = raw.rem_euclid(self.length);
        let shift = wrapped - raw; // an exact multiple of length, or 0
        let s_val = s_in + S::of(shift);

        // locate the bracketing node interval
        let k = match self
            .s
            .binary_search_by(|probe| probe.partial_cmp(&wrapped).expect("finite arc length"))
        {
            Ok(j) => j.min(self.s.len() - 2),
            Err(j) => j.saturating_sub(1).min(self.s.len() - 2),
        };
        let s0 = self.s[k];
        let s1 = self.s[k + 1];
        let hs = s1 - s0;
        let t = (s_val - S::of(s0)) / S::of(hs);
        let t2 = t * t;
        let t3 = t2 * t;
        let h00 = S::of(2.0) * t3 - S::of(3.0) * t2 + S::one();
        let h10 = t3 - S::of(2.0) * t2 + t;
        let h01 = S::of(-2.0) * t3 + S::of(3.0) * t2;
        let h11 = t3 - t2;
        h00 * S::of(self.theta[k])
            + h10 * S::of(hs * self.slope[k])
            + h01 * S::of(self.theta[k + 1])
            + h11 * S::of(hs * self.slope[k + 1])
    }
}

impl<M: RealMap> RealMap for ArcLengthCurve<M> {
    fn source_dim(&self) -> usize {
        1
    }
    fn target_dim(&self) -> usize {
        self.inner.target_dim()
    }
    fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
        let theta = self.theta_at(x[0]);
        self.inner.eval(&[theta], out);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::arc_circle_chart;
    use crate::jet::{Ambient, EmbeddingMap};
    use std::f64::consts::PI;
    use std::sync::Arc;

    struct PolarCurve {
        r0: f64,
        amp: f64,
        waves: f64,
    }

    impl RealMap for PolarCurve {
        fn source_dim(&self) -> usize {
            1
        }
        fn target_dim(&self) -> usize {
            2
        }
        fn eval<S: Real>(&self, x: &[S], out: &mut [S]) {
            let rho = S::of(self.r0) + S::of(self.amp) * (S::of(self.waves) * x[0]).sin();
            out[0] = rho * x[0].cos();
            out[1] = rho * x[0].sin();
        }
    }

    fn circle(r: f64) -> PolarCurve {
        PolarCurve {
            r0: r,
            amp: 0.0,
            waves: 1.0,
        }
    }

    #[test]
    fn gauss_legendre_measures_circles_exactly() {
        let c = circle(2.0);
        let len = curve_length_gl(&c, 0.0, 2.0 * PI, 16);
        assert!((len - 4.0 * PI).abs() < 1e-12, "len {len}");
    }

    #[test]
    fn quadrature_oracles_agree_on_wavy_curves() {
        let c = PolarCurve {
            r0: 1.0,
            amp: 0.04,
            waves: 7.0,
        };
        let gl = curve_length_gl(&c, 0.0, 2.0 * PI, 7 * 64);
        let simpson = curve_length_adaptive(&c, 0.0, 2.0 * PI, 1e-13);
        assert!(
            (gl - simpson).abs() < 1e-10,
            "gl {gl} vs adaptive {simpson}"
        );
        assert!(gl > 2.0 * PI); // waves strictly lengthen the curve
    }

    #[test]
    fn arc_length_curve_has_unit_speed() {
        let c = PolarCurve {
            r0: 1.0,
            amp: 0.04,
            waves: 5.0,
        };
        let arc = ArcLengthCurve::new(c, 2.0 * PI, 2048).unwrap();
        let total = arc.length();
        for i in 0..97 {
            let s = total * i as f64 / 97.0;
            let v = curve_speed(&arc, s);
            assert!(
                (v - 1.0).abs() < 1e-7,
                "speed at s={s}: {v} (err {:.2e})",
                (v - 1.0).abs()
            );
        }
    }

    #[test]
    fn reparametrized_circle_is_isometric() {
        let arc = ArcLengthCurve::new(circle(2.0), 2.0 * PI, 1024).unwrap();
        let len = arc.length();
        assert!((len - 4.0 * PI).abs() < 1e-11);
        let chart = arc_circle_chart(len);
        let f = EmbeddingMap::new("circle-arc", chart, Ambient::Euclidean, Arc::new(arc))
            .unwrap();
        for i in 0..50 {
            let s = len * i as f64 / 50.0;
            let res = f.isometry_residual(&[s]).unwrap();
            assert!(res < 1e-9, "residual {res} at s={s}");
        }
    }

    #[test]
    fn interpolant_matches_nodes_and_wraps() {
        let c = PolarCurve {
            r0: 1.2,
            amp: 0.02,
            waves: 3.0,
        };
        let arc = ArcLengthCurve::new(c, 2.0 * PI, 512).unwrap();
        // at stored arc-length nodes the interpolant is exact
        for j in [0usize, 100, 256, 511] {
            let theta = arc.theta_at(arc.s[j]);
            assert!(
                (theta - arc.theta[j]).abs() < 1e-13,
                "node {j}: {theta} vs {}",
                arc.theta[j]
            );
        }
        // wrap-around: s = length maps to theta = 0 (mod period)
        let mut a = [0.0; 2];
        let mut b = [0.0; 2];
        arc.eval(&[0.0], &mut a);
        arc.eval(&[arc.length()], &mut b);
        assert!((a[0] - b[0]).abs() < 1e-12 && (a[1] - b[1]).abs() < 1e-12);
        // and derivatives pass through the wrap shift
        let just_below = arc.length() * (1.0 - 1e-9);
        let v = curve_speed(&arc, just_below + 2.0 * arc.length());
        assert!((v - 1.0).abs() < 1e-6, "wrapped speed {v}");
    }

    #[test]
    fn second_derivatives_of_reparametrization_are_accurate() {
        // |f''(s)| of a unit-speed circle of radius r is 1/r everywhere
        let arc = ArcLengthCurve::new(circle(1.5), 2.0 * PI, 1024).unwrap();
        let len = arc.length();
        let d2 = |s: f64| -> [f64; 2] {
            let x = [Dual::<Dual<f64>>::new(
                Dual::variable(s),
                Dual::constant(1.0),
            )];
            let mut out = [Dual::constant(Dual::constant(0.0)); 2];
            arc.eval(&x, &mut out);
            [out[0].du.du, out[1].du.du]
        };
        for i in 1..20 {
            let s = len * i as f64 / 20.0;
            let dd = d2(s);
            let mag = (dd[0] * dd[0] + dd[1] * dd[1]).sqrt();
            assert!(
                (mag - 1.0 / 1.5).abs() < 1e-5,
                "curvature at {s}: {mag} vs {}",
                1.0 / 1.5
            );
        }
    }

    #[test]
    fn degenerate_curves_are_rejected() {
        struct Stuck;
        impl RealMap for Stuck {
            fn source_dim(&self) -> usize {
                1
            }
            fn target_dim(&self) -> usize {
                2
            }
            fn eval<S: Real>(&self, _x: &[S], out: &mut [S]) {
                out[0] = S::zero();
                out[1] = S::zero();
            }
        }
        assert!(ArcLengthCurve::new(Stuck, 2.0 * PI, 64).is_err());
        assert!(ArcLengthCurve::new(circle(1.0), -1.0, 64).is_err());
        assert!(ArcLengthCurve::new(circle(1.0), 2.0 * PI, 2).is_err());
    }
}
