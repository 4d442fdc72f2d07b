//! Rigid motions of the ambient space and their lifted action.
//!
//! A totally geodesic isometric inclusion of Euclidean spaces is an affine
//! isometry; its nested differential acts on a lifted cloud by moving the
//! base block affinely and every derivative block by the rotation alone
//! (higher derivatives of an affine map vanish). That action is itself an
//! isometry of the flat lifted space, which is why optimizing over it
//! searches the same infimum blockwise.
//!
//! [`canonical_frame`] computes a deterministic pose normalization from a
//! cloud's base blocks (barycenter to the origin, first well-separated
//! point to the positive x-axis, and in dimension 3 a second anchor into
//! the upper half-plane). Canonicalizing both clouds before optimization
//! makes the estimated distance invariant, to round-off, under rigid
//! pre-transformations of either input.

use crate::cloud::LiftedCloud;
use crate::error::{GeomError, Result};
use crate::linalg::{norm, Mat};
use crate::real::Real;

/// An orientation-preserving (unless explicitly flipped) affine isometry
/// of Euclidean m-space.
#[derive(Clone, Debug)]
pub struct RigidMotion<T> {
    rotation: Mat<T>,
    translation: Vec<T>,
}

/// Number of free parameters of a rigid motion in dimension `m`
/// (rotation parameters followed by `m` translation components).
pub fn rigid_param_count(dim: usize) -> Result<usize> {
    let rot = match dim {
        1 => 0,
        2 => 1,
        3 => 3,
        other => {
            return Err(GeomError::InvalidConfig(format!(
                "rigid motion parametrization supports ambient dimension 1..=3, got {other}"
            )))
        }
    };
    Ok(rot + dim)
}

impl<T: Real> RigidMotion<T> {
    pub fn identity(dim: usize) -> Self {
        RigidMotion {
            rotation: Mat::identity(dim),
            translation: vec![T::zero(); dim],
        }
    }

    /// Build from an explicit rotation matrix and translation; validates
    /// orthogonality.
    pub fn new(rotation: Mat<T>, translation: Vec<T>) -> Result<Self> {
        if rotation.dim() != translation.len() {
            return Err(GeomError::DimensionMismatch {
                expected: rotation.dim(),
                got: translation.len(),
                context: "rigid motion translation",
            });
        }
        let residual = rotation
            .transpose()
            .matmul(&rotation)
            .sub(&Mat::identity(rotation.dim()))
            .max_abs()
            .approx_f64();
        if residual > 1e-9 {
            return Err(GeomError::InvalidConfig(format!(
                "rotation is not orthogonal (residual {residual:.3e})"
            )));
        }
        Ok(RigidMotion {
            rotation,
            translation,
        })
    }

    /// Build from the flat parameter vector used by the optimizer:
    /// rotation parameters first (none for m=1, one angle for m=2, an
    /// axis-angle vector for m=3), then the translation. `flip` composes
    /// with the reflection negating the first coordinate.
    pub fn from_params(dim: usize, params: &[T], flip: bool) -> Result<Self> {
        let expect = rigid_param_count(dim)?;
        if params.len() != expect {
            return Err(GeomError::DimensionMismatch {
                expected: expect,
                got: params.len(),
                context: "rigid motion parameters",
            });
        }
        let mut rotation = match dim {
            1 => Mat::identity(1),
            2 => {
                let (s, c) = params[0].sin_cos();
                let mut r = Mat::zeros(2);
                r[(0, 0)] = c;
                r[(0, 1)] = -s;
                r[(1, 0)] = s;
                r[(1, 1)] = c;
                r
            }
            3 => rodrigues(&params[..3]),
            _ => unreachable!(),
        };
        if flip {
            // compose with diag(-1, 1, ..., 1) on the right
            for i in 0..dim {
                let v = rotation[(i, 0)];
                rotation[(i, 0)] = -v;
            }
        }
        let translation = params[params.len() - dim..].to_vec();
        Ok(RigidMotion {
            rotation,
            translation,
        })
    }

    pub fn dim(&self) -> usize {
        self.rotation.dim()
    }

    pub fn rotation(&self) -> &Mat<T> {
        &self.rotation
    }

    pub fn translation(&self) -> &[T] {
        &self.translation
    }

    pub fn det_sign(&self) -> f64 {
        // the rotation is orthogonal, so the determinant is +-1; LU gives
        // its sign robustly at these sizes
        match self.rotation.det_sign() {
            s if s > 0 => 1.0,
            _ => -1.0,
        }
    }

    pub fn inverse(&self) -> Self {
        let rt = self.rotation.transpose();
        let mut t = rt.matvec(&self.translation);
        for v in &mut t {
            *v = -*v;
        }
        RigidMotion {
            rotation: rt,
            translation: t,
        }
    }

    /// `R x + t` into a caller-provided buffer.
    #[inline]
    pub fn apply_point_into(&self, x: &[T], out: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = self.translation[i];
            for j in 0..n {
                acc += self.rotation[(i, j)] * x[j];
            }
            out[i] = acc;
        }
    }

    /// `R x` (no translation) into a caller-provided buffer.
    #[inline]
    pub fn apply_vector_into(&self, x: &[T], out: &mut [T]) {
        let n = self.dim();
        for i in 0..n {
            let mut acc = T::zero();
            for j in 0..n {
                acc += self.rotation[(i, j)] * x[j];
            }
            out[i] = acc;
        }
    }

    pub fn apply_point(&self, x: &[T]) -> Vec<T> {
        let mut out = vec![T::zero(); self.dim()];
        self.apply_point_into(x, &mut out);
        out
    }

    /// Lifted action on one flat lifted point: base block affine, every
    /// other block rotation-only.
    pub fn apply_lifted_into(&self, point: &[T], out: &mut [T]) {
        let m = self.dim();
        debug_assert_eq!(point.len() % m, 0);
        self.apply_point_into(&point[..m], &mut out[..m]);
        let blocks = point.len() / m;
        for b in 1..blocks {
            self.apply_vector_into(&point[b * m..(b + 1) * m], &mut out[b * m..(b + 1) * m]);
        }
    }
}

fn rodrigues<T: Real>(axis_angle: &[T]) -> Mat<T> {
    let theta2 = axis_angle.iter().fold(T::zero(), |a, &v| a + v * v);
    let theta = theta2.sqrt();
    // sin(t)/t and (1-cos(t))/t^2 with series fallbacks near zero
    let (a, b) = if theta.approx_f64() < 1e-6 {
        let half = T::of(0.5);
        (
            T::one() - theta2 / T::of(6.0),
            half - theta2 / T::of(24.0),
        )
    } else {
        (theta.sin() / theta, (T::one() - theta.cos()) / theta2)
    };
    let (x, y, z) = (axis_angle[0], axis_angle[1], axis_angle[2]);
    let mut k = Mat::zeros(3); // skew(v)
    k[(0, 1)] = -z;
    k[(0, 2)] = y;
    k[(1, 0)] = z;
    k[(1, 2)] = -x;
    k[(2, 0)] = -y;
    k[(2, 1)] = x;
    let k2 = k.matmul(&k);
    let mut r = Mat::identity(3);
    for i in 0..3 {
        for j in 0..3 {
            r[(i, j)] = r[(i, j)] + a * k[(i, j)] + b * k2[(i, j)];
        }
    }
    r
}

/// Apply a rigid motion to a whole lifted cloud.
pub fn lifted_rigid_apply<T: Real>(
    cloud: &LiftedCloud<T>,
    motion: &RigidMotion<T>,
) -> Result<LiftedCloud<T>> {
    if motion.dim() != cloud.target_dim {
        return Err(GeomError::DimensionMismatch {
            expected: cloud.target_dim,
            got: motion.dim(),
            context: "lifted rigid apply ambient dimension",
        });
    }
    let dim = cloud.cloud.dim();
    let mut data = vec![T::zero(); cloud.cloud.len() * dim];
    for (i, p) in cloud.cloud.iter().enumerate() {
        motion.apply_lifted_into(p, &mut data[i * dim..(i + 1) * dim]);
    }
    Ok(LiftedCloud {
        order: cloud.order,
        target_dim: cloud.target_dim,
        cloud: crate::cloud::PointCloud::from_flat(dim, cloud.cloud.metric(), data)?,
    })
}

/// Deterministic pose normalization of a lifted cloud, computed from base
/// blocks: barycenter to the origin, then (in dimension 2 or 3) the first
/// point further than `tol` from the barycenter rotated onto the positive
/// x-axis, and in dimension 3 a second independent anchor rotated into
/// the y > 0 half-plane. Degenerate clouds fall back to pure translation.
pub fn canonical_frame<T: Real>(cloud: &LiftedCloud<T>) -> Result<RigidMotion<T>> {
    let m = cloud.target_dim;
    let n = cloud.cloud.len();
    let tol = 1e-9;

    let mut center = vec![T::zero(); m];
    for p in cloud.cloud.iter() {
        for (c, &x) in center.iter_mut().zip(&p[..m]) {
            *c += x;
        }
    }
    let inv_n = T::of(1.0 / n as f64);
    for c in &mut center {
        *c *= inv_n;
    }

    let rel = |p: &[T]| -> Vec<T> {
        p[..m].iter().zip(&center).map(|(&x, &c)| x - c).collect()
    };

    let rotation: Mat<T> = match m {
        2 => {
            let mut rot = Mat::identity(2);
            for p in cloud.cloud.iter() {
                let v = rel(p);
                if norm(&v).approx_f64() > tol {
                    let theta = v[1].approx_f64().atan2(v[0].approx_f64());
                    let (s, c) = (T::of(-theta)).sin_cos();
                    rot[(0, 0)] = c;
                    rot[(0, 1)] = -s;
                    rot[(1, 0)] = s;
                    rot[(1, 1)] = c;
                    break;
                }
            }
            rot
        }
        3 => {
            let mut first = None;
            for p in cloud.cloud.iter() {
                let v = rel(p);
                if norm(&v).approx_f64() > tol {
                    first = Some(v);
                    break;
                }
            }
            match first {
                None => Mat::identity(3),
                Some(v1) => {
                    let r1 = rotation_to_x_axis(&v1);
                    // second anchor: first point with significant
                    // component off the x-axis after r1
                    let mut rot = r1.clone();
                    for p in cloud.cloud.iter() {
                        let w = r1.matvec(&rel(p));
                        let off = (w[1] * w[1] + w[2] * w[2]).sqrt();
                        if off.approx_f64() > tol {
                            let alpha = w[2].approx_f64().atan2(w[1].approx_f64());
                            let (s, c) = (T::of(-alpha)).sin_cos();
                            let mut rx = Mat::identity(3);
                            rx[(1, 1)] = c;
                            rx[(1, 2)] = -s;
                            rx[(2, 1)] = s;
                            rx[(2, 2)] = c;
                            rot = rx.matmul(&r1);
                            break;
                        }
                    }
                    rot
                }
            }
        }
        _ => Mat::identity(m),
    };

    // x -> R (x - c) = R x + (-R c)
    let mut t = rotation.matvec(&center);
    for v in &mut t {
        *v = -*v;
    }
    RigidMotion::new(rotation, t)
}

/// Rotation (dimension 3) taking `v` to `|v| e_x`: rotate about the axis
/// perpendicular to both.
fn rotation_to_x_axis<T: Real>(v: &[T]) -> Mat<T> {
    let n = norm(v);
    let vx = v[0] / n;
    let vy = v[1] / n;
    let vz = v[2] / n;
    // axis = v_hat x e_x = (0*1 - ..) -> (vy*0 - vz*0, vz*1 - vx*0, ...)
    // computed directly: cross(v_hat, e_x) = (vy*0 - vz*0, vz, -vy)
    let axis = [T::zero(), vz, -vy];
    let axis_norm = (axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    if axis_norm.approx_f64() < 1e-12 {
        // already along +-x
        if vx.approx_f64() > 0.0 {
            return Mat::identity(3);
        }
        // rotate pi about y
        let mut r = Mat::identity(3);
        r[(0, 0)] = -T::one();
        r[(2, 2)] = -T::one();
        return r;
    }
    let angle = vx.approx_f64().clamp(-1.0, 1.0).acos();
    let scale = T::of(angle) / axis_norm;
    rodrigues(&[axis[0] * scale, axis[1] * scale, axis[2] * scale])
}
