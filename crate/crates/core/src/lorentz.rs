//! Lorentz ambient space and the hyperboloid model of hyperbolic space.
//!
//! Hyperbolic space of curvature `-1/r_tilde^2` is realized as the upper
//! hyperboloid sheet
//!
//! ```text
//! { x : -x_1^2 + x_2^2 + ... + x_{n+2}^2 = -r_tilde^2, x_1 > 0 }
//! ```
//!
//! inside Minkowski space with inner product
//! `<p, q> = -p_1 q_1 + sum_{i>=2} p_i q_i`. Geodesic distance between two
//! points of the sheet has the closed form
//! `r_tilde * acosh(-<p, q> / r_tilde^2)`.

use crate::error::{GeomError, Result};
use crate::real::Real;

/// Default relative tolerance for on-hyperboloid validation.
pub const TOL_HYP: f64 = 1e-8;

/// Minkowski inner product with signature `(-, +, ..., +)`.
pub fn lorentz_inner<T: Real>(p: &[T], q: &[T]) -> Result<T> {
    if p.len() != q.len() || p.is_empty() {
        return Err(GeomError::DimensionMismatch {
            expected: p.len(),
            got: q.len(),
            context: "lorentz_inner",
        });
    }
    let mut acc = -(p[0] * q[0]);
    for i in 1..p.len() {
        acc += p[i] * q[i];
    }
    Ok(acc)
}

/// Validate that `p` lies on the upper hyperboloid sheet of parameter
/// `r_tilde`, within relative tolerance `tol_rel`.
pub fn hyperboloid_check<T: Real>(p: &[T], r_tilde: f64, tol_rel: f64) -> Result<()> {
    if r_tilde <= 0.0 {
        return Err(GeomError::NonPositive {
            name: "r_tilde",
            value: r_tilde,
        });
    }
    let r2 = r_tilde * r_tilde;
    let inner = lorentz_inner(p, p)?.approx_f64();
    let residual = (inner + r2).abs() / r2;
    if residual > tol_rel {
        return Err(GeomError::NotOnHyperboloid {
            residual,
            tol: tol_rel,
        });
    }
    if p[0].approx_f64() <= 0.0 {
        return Err(GeomError::NotOnHyperboloid {
            residual: f64::INFINITY,
            tol: tol_rel,
        });
    }
    Ok(())
}

/// Complete a spatial vector to a point of the upper sheet:
/// prepend `x_1 = sqrt(r_tilde^2 + |spatial|^2)`.
pub fn hyperboloid_lift<T: Real>(spatial: &[T], r_tilde: f64) -> Vec<T> {
    let mut norm2 = T::of(r_tilde * r_tilde);
    for &x in spatial {
        norm2 += x * x;
    }
    let mut out = Vec::with_capacity(spatial.len() + 1);
    out.push(norm2.sqrt());
    out.extend_from_slice(spatial);
    out
}

/// Geodesic distance on the hyperboloid of parameter `r_tilde`.
///
/// Both points are validated against the sheet (tolerance [`TOL_HYP`]);
/// the `acosh` argument is clamped at 1 from below so that round-off on
/// near-coincident points cannot produce NaN.
pub fn hyperbolic_distance<T: Real>(p: &[T], q: &[T], r_tilde: f64) -> Result<T> {
    hyperboloid_check(p, r_tilde, TOL_HYP)?;
    hyperboloid_check(q, r_tilde, TOL_HYP)?;
    Ok(hyperbolic_distance_unchecked(p, q, r_tilde))
}

/// Distance kernel without validation, for hot loops over clouds whose
/// points were validated at construction time.
pub fn hyperbolic_distance_unchecked<T: Real>(p: &[T], q: &[T], r_tilde: f64) -> T {
    let r2 = T::of(r_tilde * r_tilde);
    let mut inner = -(p[0] * q[0]);
    for i in 1..p.len() {
        inner += p[i] * q[i];
    }
    let arg = (-inner / r2).max(T::one());
    T::of(r_tilde) * arg.acosh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn inner_product_signature() {
        let e0 = [1.0, 0.0, 0.0];
        let e1 = [0.0, 1.0, 0.0];
        let e2 = [0.0, 0.0, 1.0];
        assert_eq!(lorentz_inner(&e0, &e0).unwrap(), -1.0);
        assert_eq!(lorentz_inner(&e1, &e1).unwrap(), 1.0);
        assert_eq!(lorentz_inner(&e1, &e2).unwrap(), 0.0);
        assert!(lorentz_inner(&e0, &[1.0, 0.0]).is_err());
    }

    #[test]
    fn lift_lands_on_sheet() {
        for r_tilde in [0.1, 1.0, 10.0] {
            let p = hyperboloid_lift(&[0.3, -1.2, 0.5], r_tilde);
            let inner = lorentz_inner(&p, &p).unwrap();
            assert!(
                (inner + r_tilde * r_tilde).abs() <= 1e-12 * r_tilde.max(1.0).powi(2),
                "r_tilde={r_tilde}: {inner}"
            );
            assert!(hyperboloid_check(&p, r_tilde, TOL_HYP).is_ok());
        }
    }

    #[test]
    fn nested_circle_points_distance_oracle() {
        // p = (sqrt(2), 1, 0), q = (sqrt(5), 2, 0) on the unit hyperboloid:
        // distance is asinh(2) - asinh(1). Frozen from a closed form
        // evaluated independently: ln(2 + sqrt(5)) - ln(1 + sqrt(2)).
        let p = hyperboloid_lift(&[1.0, 0.0], 1.0);
        let q = hyperboloid_lift(&[2.0, 0.0], 1.0);
        assert!((p[0] - 2f64.sqrt()).abs() < 1e-15);
        assert!((q[0] - 5f64.sqrt()).abs() < 1e-15);
        let d = hyperbolic_distance(&p, &q, 1.0).unwrap();
        let frozen = 0.5622618881592673;
        assert!((d - frozen).abs() < 1e-12, "d = {d}");
        assert!((d - (2f64.asinh() - 1f64.asinh())).abs() < 1e-14);
    }

    #[test]
    fn distance_is_symmetric_and_zero_on_diagonal() {
        let r_tilde = 2.5;
        let p = hyperboloid_lift(&[0.7, -0.3], r_tilde);
        let q = hyperboloid_lift(&[-1.1, 2.0], r_tilde);
        let d_pq = hyperbolic_distance(&p, &q, r_tilde).unwrap();
        let d_qp = hyperbolic_distance(&q, &p, r_tilde).unwrap();
        assert_eq!(d_pq, d_qp);
        assert!(d_pq > 0.0);
        assert_eq!(hyperbolic_distance(&p, &p, r_tilde).unwrap(), 0.0);
    }

    #[test]
    fn clamp_protects_near_coincident_points() {
        let r_tilde = 1.0;
        let p = hyperboloid_lift(&[0.5f64, 0.5], r_tilde);
        let q = hyperboloid_lift(&[0.5 + 1e-13, 0.5], r_tilde);
        let d = hyperbolic_distance(&p, &q, r_tilde).unwrap();
        assert!(d.is_finite());
        assert!(d >= 0.0 && d < 1e-11);
    }

    #[test]
    fn triangle_inequality_on_random_triples() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for &r_tilde in &[0.1, 1.0, 10.0] {
            for _ in 0..200 {
                let mut pt = || {
                    let s: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0) * r_tilde).collect();
                    hyperboloid_lift(&s, r_tilde)
                };
                let (a, b, c) = (pt(), pt(), pt());
                let ab = hyperbolic_distance(&a, &b, r_tilde).unwrap();
                let bc = hyperbolic_distance(&b, &c, r_tilde).unwrap();
                let ac = hyperbolic_distance(&a, &c, r_tilde).unwrap();
                assert!(ac <= ab + bc + 1e-9 * r_tilde.max(1.0));
            }
        }
    }

    #[test]
    fn off_sheet_points_are_rejected() {
        let p = [1.0, 1.0, 0.0]; // null vector, not on any hyperboloid
        let q = hyperboloid_lift(&[0.0, 0.0], 1.0);
        assert!(matches!(
            hyperbolic_distance(&p, &q, 1.0),
            Err(GeomError::NotOnHyperboloid { .. })
        ));
        // lower sheet
        let mut lower = q.clone();
        lower[0] = -lower[0];
        assert!(hyperboloid_check(&lower, 1.0, TOL_HYP).is_err());
        // bad parameter
        assert!(matches!(
            hyperbolic_distance(&q, &q, -1.0),
            Err(GeomError::NonPositive { .. })
        ));
    }
}
