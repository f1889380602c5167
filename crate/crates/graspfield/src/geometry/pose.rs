//! Rigid transforms in SE(3) and rotation construction/projection.

use nalgebra::{Matrix3, Vector3};

use crate::{Error, Result};

/// Tolerance for the orthonormality / determinant checks on rotations.
pub const ROTATION_TOL: f64 = 1e-6;

/// A rigid transform: `x ↦ R·x + t` with `R` orthonormal, `det R = +1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose {
    pub rotation: Matrix3<f64>,
    pub translation: Vector3<f64>,
}

/// How far `r` is from being a proper rotation: max of `‖RᵀR − I‖` (entrywise)
/// and `|det R − 1|`.
pub fn rotation_deviation(r: &Matrix3<f64>) -> f64 {
    let gram = r.transpose() * r;
    let mut dev: f64 = 0.0;
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            dev = dev.max((gram[(i, j)] - target).abs());
        }
    }
    dev.max((r.determinant() - 1.0).abs())
}

/// Build a pose from a translation and a rotation, checking the rotation.
pub fn make_transform(translation: Vector3<f64>, rotation: Matrix3<f64>) -> Result<Pose> {
    let deviation = rotation_deviation(&rotation);
    if deviation > ROTATION_TOL {
        return Err(Error::InvalidRotation { deviation });
    }
    Ok(Pose { rotation, translation })
}

impl Pose {
    pub fn identity() -> Self {
        Pose { rotation: Matrix3::identity(), translation: Vector3::zeros() }
    }

    /// Unchecked constructor for rotations already known to be valid
    /// (compositions of valid poses, outputs of the projection ops).
    pub fn from_parts(translation: Vector3<f64>, rotation: Matrix3<f64>) -> Self {
        Pose { rotation, translation }
    }

    pub fn apply(&self, x: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * x + self.translation
    }

    /// Rotate a direction (no translation).
    pub fn apply_dir(&self, d: &Vector3<f64>) -> Vector3<f64> {
        self.rotation * d
    }

    pub fn inverse(&self) -> Pose {
        let rt = self.rotation.transpose();
        Pose { rotation: rt, translation: -(rt * self.translation) }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Pose) -> Pose {
        Pose {
            rotation: self.rotation * other.rotation,
            translation: self.rotation * other.translation + self.translation,
        }
    }

    /// Row-major 3×4 `[R|t]` flattening, the on-disk and in-map pose layout.
    pub fn to_flat12(&self) -> [f64; 12] {
        let r = &self.rotation;
        let t = &self.translation;
        [
            r[(0, 0)], r[(0, 1)], r[(0, 2)], t[0],
            r[(1, 0)], r[(1, 1)], r[(1, 2)], t[1],
            r[(2, 0)], r[(2, 1)], r[(2, 2)], t[2],
        ]
    }

    /// Inverse of [`Pose::to_flat12`]. Checks the rotation block.
    pub fn from_flat12(v: &[f64; 12]) -> Result<Pose> {
        let rotation = Matrix3::new(v[0], v[1], v[2], v[4], v[5], v[6], v[8], v[9], v[10]);
        let translation = Vector3::new(v[3], v[7], v[11]);
        make_transform(translation, rotation)
    }

    /// Angle of the relative rotation between two poses, in radians.
    pub fn rotation_angle_to(&self, other: &Pose) -> f64 {
        let rel = self.rotation.transpose() * other.rotation;
        let c = ((rel.trace() - 1.0) / 2.0).clamp(-1.0, 1.0);
        c.acos()
    }
}

/// Rotation about an axis unit vector by `angle` (Rodrigues).
pub fn axis_angle(axis: &Vector3<f64>, angle: f64) -> Matrix3<f64> {
    let a = axis.normalize();
    let (s, c) = angle.sin_cos();
    let k = Matrix3::new(0.0, -a.z, a.y, a.z, 0.0, -a.x, -a.y, a.x, 0.0);
    Matrix3::identity() + k * s + k * k * (1.0 - c)
}

/// Gram-Schmidt construction of a rotation from two raw 3-vectors.
///
/// Columns are `normalize(r1)`, `normalize(r2 − proj_r1 r2)`, and their
/// cross product, so the result is orthonormal with determinant +1.
pub fn gram_schmidt_rotation(r1: &Vector3<f64>, r2: &Vector3<f64>) -> Result<Matrix3<f64>> {
    let n1 = r1.norm();
    if n1 < 1e-12 {
        return Err(Error::DegenerateRotation("first vector is near zero"));
    }
    let c1 = r1 / n1;
    let ortho = r2 - c1 * c1.dot(r2);
    let n2 = ortho.norm();
    // sin(angle between r1 and r2) = n2 / |r2|; reject below ~1e-4 rad.
    if n2 < 1e-12 || n2 < 1e-4 * r2.norm() {
        return Err(Error::DegenerateRotation("second vector is near parallel to the first"));
    }
    let c2 = ortho / n2;
    let c3 = c1.cross(&c2);
    Ok(Matrix3::from_columns(&[c1, c2, c3]))
}

/// Nearest rotation (Frobenius sense) to an arbitrary 3×3 matrix.
///
/// From the SVD `M = UΣVᵀ`, returns `U·diag(1,1,det(UVᵀ))·Vᵀ`.
pub fn procrustes_project(m: &Matrix3<f64>) -> Result<Matrix3<f64>> {
    let svd = m.svd(true, true);
    let min_sv = svd.singular_values.min();
    if !min_sv.is_finite() || min_sv < 1e-9 {
        return Err(Error::DegenerateRotation("matrix is rank deficient"));
    }
    let u = svd.u.expect("svd requested u");
    let v_t = svd.v_t.expect("svd requested v_t");
    let det = (u * v_t).determinant();
    let correction = Matrix3::from_diagonal(&Vector3::new(1.0, 1.0, det.signum()));
    Ok(u * correction * v_t)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use rand::Rng;

    fn random_rotation(rng: &mut impl Rng) -> Matrix3<f64> {
        loop {
            let r1 = Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let r2 = Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            if let Ok(r) = gram_schmidt_rotation(&r1, &r2) {
                return r;
            }
        }
    }

    #[test]
    fn make_transform_identity() {
        let p = make_transform(Vector3::zeros(), Matrix3::identity()).unwrap();
        assert_eq!(p.apply(&Vector3::new(1.0, 2.0, 3.0)), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn make_transform_pure_translation() {
        let p = make_transform(Vector3::new(1.0, 2.0, 3.0), Matrix3::identity()).unwrap();
        assert_eq!(p.apply(&Vector3::zeros()), Vector3::new(1.0, 2.0, 3.0));
    }

    #[test]
    fn make_transform_axis_rotation() {
        let r = axis_angle(&Vector3::z(), std::f64::consts::FRAC_PI_2);
        let p = make_transform(Vector3::zeros(), r).unwrap();
        let y = p.apply(&Vector3::x());
        assert_abs_diff_eq!(y.x, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y.y, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(y.z, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn make_transform_rejects_non_rotation() {
        let m = Matrix3::new(1.0, 0.5, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0);
        assert!(matches!(make_transform(Vector3::zeros(), m), Err(Error::InvalidRotation { .. })));
    }

    #[test]
    fn compose_inverse_is_identity() {
        let mut rng = crate::seed::rng(3, "pose/compose");
        for _ in 0..50 {
            let r = random_rotation(&mut rng);
            let t = Vector3::new(rng.gen(), rng.gen(), rng.gen());
            let p = make_transform(t, r).unwrap();
            let x = Vector3::new(rng.gen(), rng.gen(), rng.gen());
            let back = p.inverse().apply(&p.apply(&x));
            assert!((back - x).norm() < 1e-9);
            let ident = p.compose(&p.inverse());
            assert!(rotation_deviation(&ident.rotation) < 1e-9);
            assert!(ident.translation.norm() < 1e-9);
        }
    }

    #[test]
    fn gram_schmidt_trivial_cases() {
        let r = gram_schmidt_rotation(&Vector3::x(), &Vector3::y()).unwrap();
        assert_abs_diff_eq!((r - Matrix3::identity()).norm(), 0.0, epsilon = 1e-12);
        // Scale and shear are removed by construction.
        let r = gram_schmidt_rotation(&Vector3::new(2.0, 0.0, 0.0), &Vector3::new(1.0, 1.0, 0.0)).unwrap();
        assert_abs_diff_eq!((r - Matrix3::identity()).norm(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn gram_schmidt_random_is_orthonormal() {
        let mut rng = crate::seed::rng(11, "pose/gs");
        for _ in 0..200 {
            let r1 = Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let r2 = Vector3::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            match gram_schmidt_rotation(&r1, &r2) {
                Ok(r) => assert!(rotation_deviation(&r) < 1e-6),
                Err(_) => {} // degenerate draw
            }
        }
    }

    #[test]
    fn gram_schmidt_rejects_degenerate() {
        assert!(gram_schmidt_rotation(&Vector3::zeros(), &Vector3::y()).is_err());
        assert!(gram_schmidt_rotation(&Vector3::x(), &Vector3::new(2.0, 1e-9, 0.0)).is_err());
    }

    #[test]
    fn procrustes_fixed_point_and_scale() {
        let mut rng = crate::seed::rng(5, "pose/procrustes");
        for _ in 0..50 {
            let r = random_rotation(&mut rng);
            let p = procrustes_project(&r).unwrap();
            assert!((p - r).norm() < 1e-9);
            let scale: f64 = rng.gen_range(0.1..10.0);
            let p = procrustes_project(&(r * scale)).unwrap();
            assert!((p - r).norm() < 1e-9);
        }
        let p = procrustes_project(&(Matrix3::identity() * 2.0)).unwrap();
        assert!((p - Matrix3::identity()).norm() < 1e-12);
    }

    #[test]
    fn procrustes_noise_recovery() {
        // Perturbation test against a known ground-truth rotation: per-entry
        // noise of 1e-3 must project back within 2e-3 Frobenius.
        let mut rng = crate::seed::rng(17, "pose/procrustes-noise");
        for _ in 0..100 {
            let r = random_rotation(&mut rng);
            let mut noisy = r;
            for i in 0..3 {
                for j in 0..3 {
                    noisy[(i, j)] += (rng.gen::<f64>() - 0.5) * 2e-3;
                }
            }
            let p = procrustes_project(&noisy).unwrap();
            assert!(
                (p - r).norm() < 2e-3,
                "projection drifted {:.3e} from the clean rotation",
                (p - r).norm()
            );
        }
    }

    #[test]
    fn procrustes_rejects_rank_deficient() {
        let m = Matrix3::new(1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 1.0, 1.0, 0.0);
        assert!(procrustes_project(&m).is_err());
    }

    #[test]
    fn flat12_round_trip() {
        let mut rng = crate::seed::rng(23, "pose/flat12");
        let p = make_transform(Vector3::new(0.1, -0.2, 0.3), random_rotation(&mut rng)).unwrap();
        let q = Pose::from_flat12(&p.to_flat12()).unwrap();
        assert!((q.rotation - p.rotation).norm() < 1e-12);
        assert!((q.translation - p.translation).norm() < 1e-12);
    }
}
