//! Closed-form sectional curvatures of `K\G`.

/// Sectional curvature of the n = 2 quotient at `(x, y)`:
///
/// ```text
/// 4 y^2 (x^4 + 2x^2(y^2+1) + y^4 + 3y^2 + 1) / (x^4 + 2x^2(y^2+1) + y^4 + 1)^2
/// ```
pub fn kappa2_closed(x: f64, y: f64) -> f64 {
    let x2 = x * x;
    let y2 = y * y;
    let base = x2 * x2 + 2.0 * x2 * (y2 + 1.0) + y2 * y2;
    4.0 * y2 * (base + 3.0 * y2 + 1.0) / (base + 1.0).powi(2)
}

/// Curvature `f(y)` of any plane containing the radial (y-axis) direction
/// at `(0, y)`.
pub fn axis_radial_curvature(y: f64) -> f64 {
    let y2 = y * y;
    let y4 = y2 * y2;
    4.0 * y2 * (1.0 + 3.0 * y2 + y4) / (1.0 + y4).powi(2)
}

/// Curvature `g(y)` of a plane tangent to the r(K)-orbit sphere at `(0, y)`.
pub fn axis_tangent_curvature(y: f64) -> f64 {
    axis_tangent_curvature_variant(y, 2)
}

/// `g(y)` with the denominator `(1 + y^4)^e`. Only `e = 2` is the true
/// curvature; other exponents exist so the misprinted variant can be tested
/// against the numeric oracle.
pub fn axis_tangent_curvature_variant(y: f64, exponent: i32) -> f64 {
    let y2 = y * y;
    let y4 = y2 * y2;
    2.0 * (1.0 + 2.0 * y2 + 4.0 * y4 + 2.0 * y4 * y2 + y4 * y4) / (1.0 + y4).powi(exponent)
}

/// Sectional curvature at `(0, y)`, `y >= 1`, of a plane making angle
/// `theta` with the y-axis: `cos^2 theta f(y) + sin^2 theta g(y)`.
pub fn kappa_n_closed(y: f64, theta: f64) -> f64 {
    kappa_n_closed_variant(y, theta, 2)
}

pub fn kappa_n_closed_variant(y: f64, theta: f64, exponent: i32) -> f64 {
    let (s, c) = theta.sin_cos();
    c * c * axis_radial_curvature(y) + s * s * axis_tangent_curvature_variant(y, exponent)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn maximum_at_the_fixed_point() {
        assert_eq!(kappa2_closed(0.0, 1.0), 5.0);
        for k in 0..=10 {
            let theta = FRAC_PI_2 * k as f64 / 10.0;
            assert!((kappa_n_closed(1.0, theta) - 5.0).abs() < 1e-15);
        }
    }

    #[test]
    fn rational_values() {
        assert!((kappa2_closed(1.0, 1.0) - 40.0 / 49.0).abs() < 1e-15);
        assert!((axis_radial_curvature(2.0) - 464.0 / 289.0).abs() < 1e-15);
        assert!((axis_tangent_curvature(2.0) - 914.0 / 289.0).abs() < 1e-15);
        assert!((kappa_n_closed(2.0, FRAC_PI_2) - 914.0 / 289.0).abs() < 1e-15);
        assert!((kappa_n_closed(2.0, FRAC_PI_2 / 2.0) - 689.0 / 289.0).abs() < 1e-14);
    }

    #[test]
    fn axis_restriction_matches_planar_formula() {
        for y in [0.3, 0.9, 1.0, 1.7, 4.0, 11.0] {
            assert!((kappa2_closed(0.0, y) - axis_radial_curvature(y)).abs() < 1e-14);
            assert!((kappa_n_closed(y, 0.0) - kappa2_closed(0.0, y)).abs() < 1e-14);
        }
    }

    #[test]
    fn misprinted_exponent_breaks_the_maximum() {
        // g(1) must equal 5 for the formula to be continuous at i.
        assert!((axis_tangent_curvature_variant(1.0, 2) - 5.0).abs() < 1e-15);
        assert!((axis_tangent_curvature_variant(1.0, 4) - 1.25).abs() < 1e-15);
    }
}
