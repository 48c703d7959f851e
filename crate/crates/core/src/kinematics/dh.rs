use nalgebra::Matrix4;

use crate::error::{Error, Result};

/// Homogeneous transform between consecutive link frames (modified D-H convention).
///
/// `alpha_prev` and `a_prev` describe the previous link (twist, length), `theta`
/// and `d` the joint (angle, offset).
pub fn dh_transform(alpha_prev: f64, a_prev: f64, theta: f64, d: f64) -> Result<Matrix4<f64>> {
    if ![alpha_prev, a_prev, theta, d].iter().all(|v| v.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "non-finite D-H parameters ({alpha_prev}, {a_prev}, {theta}, {d})"
        )));
    }
    let (st, ct) = theta.sin_cos();
    let (sa, ca) = alpha_prev.sin_cos();
    #[rustfmt::skip]
    let m = Matrix4::new(
        ct,      -st,      0.0,  a_prev,
        st * ca,  ct * ca, -sa,  -sa * d,
        st * sa,  ct * sa,  ca,   ca * d,
        0.0,      0.0,      0.0,  1.0,
    );
    Ok(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn zero_parameters_give_identity() {
        assert_eq!(dh_transform(0.0, 0.0, 0.0, 0.0).unwrap(), Matrix4::identity());
    }

    #[test]
    fn pure_link_offset() {
        let m = dh_transform(0.0, 0.04, 0.0, 0.0).unwrap();
        let mut expected = Matrix4::identity();
        expected[(0, 3)] = 0.04;
        assert_eq!(m, expected);
    }

    #[test]
    fn substituted_entries() {
        // alpha = pi/2, a = 0.03, theta = pi/4, d = 0 substituted by hand:
        // row0 = [c45, -s45, 0, 0.03], row1 = [s45*c90, c45*c90, -1, 0],
        // row2 = [s45*s90, c45*s90, c90, 0].
        let m = dh_transform(FRAC_PI_2, 0.03, FRAC_PI_4, 0.0).unwrap();
        let h = std::f64::consts::FRAC_1_SQRT_2;
        #[rustfmt::skip]
        let expected = Matrix4::new(
            h,   -h,   0.0, 0.03,
            0.0,  0.0, -1.0, 0.0,
            h,    h,   0.0, 0.0,
            0.0,  0.0, 0.0, 1.0,
        );
        assert!((m - expected).amax() < 1e-15, "{m}");
    }

    #[test]
    fn rejects_non_finite() {
        assert!(dh_transform(f64::NAN, 0.0, 0.0, 0.0).is_err());
        assert!(dh_transform(0.0, 0.0, f64::INFINITY, 0.0).is_err());
    }

    #[test]
    fn rotation_block_is_orthonormal() {
        for i in 0..50 {
            let x = i as f64 * 0.37;
            let m = dh_transform(x.sin() * 3.0, 0.01 * x, x * 1.3 - 2.0, 0.02 * x.cos()).unwrap();
            let r = m.fixed_view::<3, 3>(0, 0).into_owned();
            assert!((r.transpose() * r - nalgebra::Matrix3::identity()).amax() < 1e-9);
            assert!((r.determinant() - 1.0).abs() < 1e-9);
            assert_eq!(m.row(3).into_owned(), nalgebra::RowVector4::new(0.0, 0.0, 0.0, 1.0));
        }
    }
}
