//! The space minus `i` as the warped product `(1, inf) x_{e^{2 phi}} S^{n-1}`,
//! and hyperbolic space minus `i` as `(0, 1) x_{e^{2 psi}} S^{n-1}`.
//!
//! With `s = ln t` the warp exponent is
//! `phi = ln sinh(s) - 1/2 ln cosh(2s)`, and the base metric `dt^2 / t^2`
//! is `ds^2`, so `t d/dt` derivatives are plain `s` derivatives.

use nalgebra::{DMatrix, DVector};

use crate::chart::{l_action, r_action, tau, ChartPoint};
use crate::error::{GeomError, Result};
use crate::geodesic::distance_from_i;
use crate::lie::GroupElement;
use crate::metric::{HyperbolicMetric, Metric, QuotientMetric};
use crate::tolerance;

/// Point `(t, u)` of the model: `t > 1` and `u` on the unit sphere, whose
/// base point is `n = (0, ..., 0, 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct WarpedPoint {
    t: f64,
    u: DVector<f64>,
}

fn check_direction(u: &DVector<f64>) -> Result<()> {
    if u.len() < 2 {
        return Err(GeomError::Argument("sphere direction needs at least two components".into()));
    }
    if !u.iter().all(|v| v.is_finite()) || (u.norm() - 1.0).abs() > tolerance::EXACT {
        return Err(GeomError::Domain(format!("direction has norm {}", u.norm())));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !t.is_finite() || t < 1.0 + tolerance::WARPED_MARGIN {
        return Err(GeomError::Domain(format!("warped coordinate t = {t} must be at least 1 + 1e-6")));
    }
    Ok(())
}

impl WarpedPoint {
    pub fn new(t: f64, u: DVector<f64>) -> Result<Self> {
        check_t(t)?;
        check_direction(&u)?;
        Ok(Self { t, u })
    }

    /// Planar point `(t, z)` with `u = (sin z, cos z)`.
    pub fn from_angle(t: f64, z: f64) -> Result<Self> {
        Self::new(t, DVector::from_vec(vec![z.sin(), z.cos()]))
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }

    pub fn rank(&self) -> usize {
        self.u.len()
    }
}

/// Point `(s, u)` of the hyperbolic model, `0 < s < 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicWarpedPoint {
    s: f64,
    u: DVector<f64>,
}

impl HyperbolicWarpedPoint {
    pub fn new(s: f64, u: DVector<f64>) -> Result<Self> {
        if !(s > 0.0 && s <= 1.0 - tolerance::WARPED_MARGIN) {
            return Err(GeomError::Domain(format!("hyperbolic warped coordinate s = {s} must lie in (0, 1)")));
        }
        check_direction(&u)?;
        Ok(Self { s, u })
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    pub fn u(&self) -> &DVector<f64> {
        &self.u
    }
}

/// `e^{2 phi(t)} = sinh^2(ln t) / cosh(2 ln t)`.
pub fn warp_factor(t: f64) -> Result<f64> {
    check_t(t)?;
    let s = t.ln();
    Ok(s.sinh().powi(2) / (2.0 * s).cosh())
}

/// `phi(t) = ln sinh(ln t) - 1/2 ln cosh(2 ln t)`.
pub fn warp_exponent(t: f64) -> Result<f64> {
    check_t(t)?;
    let s = t.ln();
    Ok(s.sinh().ln() - 0.5 * (2.0 * s).cosh().ln())
}

/// Hyperbolic warp `e^{2 psi(s)} = sinh^2(ln s)`.
pub fn hyperbolic_warp_factor(s: f64) -> f64 {
    s.ln().sinh().powi(2)
}

/// `<grad phi, t d/dt> = coth(ln t) - tanh(2 ln t)` and
/// `h_phi(t d/dt, t d/dt) = -csch^2(ln t) - 2 sech^2(2 ln t)`.
pub fn warp_gradient_hessian(t: f64) -> Result<(f64, f64)> {
    check_t(t)?;
    let s = t.ln();
    let grad = 1.0 / s.tanh() - (2.0 * s).tanh();
    let hess = -1.0 / s.sinh().powi(2) - 2.0 / (2.0 * s).cosh().powi(2);
    Ok((grad, hess))
}

/// Curvature of the planes containing the radial direction,
/// `1 + 2 coth(s) tanh(2s) - 3 tanh^2(2s)` with `s = ln t`.
pub fn kappa_radial_warped(t: f64) -> Result<f64> {
    check_t(t)?;
    let s = t.ln();
    let th = (2.0 * s).tanh();
    Ok(1.0 + 2.0 * th / s.tanh() - 3.0 * th * th)
}

/// `-(<grad phi, t d/dt>^2 + h_phi(t d/dt, t d/dt))`, evaluated literally.
/// Loses digits to cancellation as `t -> 1`.
pub fn kappa_radial_warped_literal(t: f64) -> Result<f64> {
    let (g, h) = warp_gradient_hessian(t)?;
    Ok(-(g * g + h))
}

/// Curvature of the planes tangent to the sphere through `(0, y)`,
/// `1 + 2 coth(s) tanh(2s) - tanh^2(2s)` with `s = ln y`.
pub fn kappa_tangent_warped(y: f64) -> Result<f64> {
    check_t(y)?;
    let s = y.ln();
    let th = (2.0 * s).tanh();
    Ok(1.0 + 2.0 * th / s.tanh() - th * th)
}

/// `e^{-2 phi(y)} - <grad phi, y d/dy>^2`, evaluated literally.
pub fn kappa_tangent_warped_literal(y: f64) -> Result<f64> {
    let (g, _) = warp_gradient_hessian(y)?;
    Ok(1.0 / warp_factor(y)? - g * g)
}

/// Curvature of the plane spanned by `a w_n + b w` and `c w_n + d w~`, where
/// `w_n` is the unit radial vector and `w`, `w~` are orthonormal sphere
/// directions: `(a^2 d^2 + b^2 c^2) kn + b^2 d^2 kt`. The two vectors must be
/// orthonormal, i.e. `a^2 + b^2 = c^2 + d^2 = 1` and `a c = 0`.
pub fn kappa_mixed(a: f64, b: f64, c: f64, d: f64, kn: f64, kt: f64) -> Result<f64> {
    let tol = tolerance::EXACT;
    if (a * a + b * b - 1.0).abs() > tol || (c * c + d * d - 1.0).abs() > tol || (a * c).abs() > tol {
        return Err(GeomError::Argument(format!(
            "({a}, {b}) and ({c}, {d}) do not give orthonormal spanning vectors"
        )));
    }
    Ok((a * a * d * d + b * b * c * c) * kn + b * b * d * d * kt)
}

fn reflect(v: &DVector<f64>, x: &DMatrix<f64>) -> DMatrix<f64> {
    let scale = 2.0 / v.norm_squared();
    x - v * (v.transpose() * x) * scale
}

/// A rotation `a` in SO(n) with `a n = u`: the product of the reflections in
/// `n` and in `u + n`, which rotates the plane spanned by `n` and `u` and
/// fixes its complement. For `u_n < 0` the same construction is applied to
/// `P u`, where `P` is the half-turn in the `(e_1, n)` plane, and composed
/// with `P`; in particular `u = -n` gives `P`.
pub fn rotation_to(u: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_direction(u)?;
    let n = u.len();
    let mut half_turn = DMatrix::identity(n, n);
    half_turn[(0, 0)] = -1.0;
    half_turn[(n - 1, n - 1)] = -1.0;
    let flip = u[n - 1] < 0.0;
    let target = if flip { &half_turn * u } else { u.clone() };
    let mut axis = DVector::zeros(n);
    axis[n - 1] = 1.0;
    let first = reflect(&axis, &DMatrix::identity(n, n));
    let a = reflect(&(&target + &axis), &first);
    Ok(if flip { half_turn * a } else { a })
}

fn compact_element(a: &DMatrix<f64>) -> Result<GroupElement> {
    GroupElement::from_compact_block(a)
}

/// `f(t, a n) = r(a^{-1}) (0, t)` for a given rotation `a`.
pub fn f_map_with(a: &DMatrix<f64>, t: f64) -> Result<ChartPoint> {
    check_t(t)?;
    let k = compact_element(a)?;
    r_action(&k.inverse(), &ChartPoint::on_axis(a.nrows(), t)?)
}

/// The isometry `f` from the warped model onto the space minus `i`.
pub fn f_map(w: &WarpedPoint) -> Result<ChartPoint> {
    f_map_with(&rotation_to(&w.u)?, w.t)
}

/// Inverse of [`f_map`]: `t = e^d` with `d` the distance from `i`, and `u`
/// the unit initial direction of the geodesic from `i` through `p`.
pub fn f_inverse(p: &ChartPoint) -> Result<WarpedPoint> {
    let d = distance_from_i(p);
    let t = d.exp();
    check_t(t)?;
    let n = p.rank();
    let sh = d.sinh();
    let mut u = DVector::zeros(n);
    for (i, xi) in p.x().iter().enumerate() {
        u[i] = xi / sh;
    }
    u[n - 1] = (p.y() - d.cosh()) / sh;
    let norm = u.norm();
    WarpedPoint::new(t, u / norm)
}

/// `f~(s, a n) = l(a) (0, s)`: the hyperbolic model onto hyperbolic space
/// minus `i`.
pub fn f_tilde(w: &HyperbolicWarpedPoint) -> Result<ChartPoint> {
    let a = rotation_to(&w.u)?;
    l_action(&compact_element(&a)?, &ChartPoint::on_axis(w.u.len(), w.s)?)
}

/// `tau'(t, u) = (1/t, u)`.
pub fn tau_prime(w: &WarpedPoint) -> Result<HyperbolicWarpedPoint> {
    HyperbolicWarpedPoint::new(1.0 / w.t, w.u.clone())
}

/// `(s, u) -> (1/s, u)`, the inverse of [`tau_prime`].
pub fn tau_prime_inverse(w: &HyperbolicWarpedPoint) -> Result<WarpedPoint> {
    WarpedPoint::new(1.0 / w.s, w.u.clone())
}

/// Max-norm of `f~(tau'(w)) - tau(f(w))`.
pub fn tau_square_residual(w: &WarpedPoint) -> Result<f64> {
    let around = f_tilde(&tau_prime(w)?)?;
    let direct = tau(&f_map(w)?);
    Ok(around.distance_max(&direct))
}

/// Jacobian of `(t, z) -> F(t, z)` by fourth-order central differences,
/// steps `1e-3 t` in `t` and `1e-3` in `z`.
fn planar_jacobian<F>(map: F, t: f64, z: f64, t_floor: f64, t_ceiling: f64) -> Result<DMatrix<f64>>
where
    F: Fn(f64, f64) -> Result<ChartPoint>,
{
    let ht = 1e-3 * t;
    if t - 2.0 * ht < t_floor || t + 2.0 * ht > t_ceiling {
        return Err(GeomError::Step { step: ht, y: t });
    }
    let diff = |g: &dyn Fn(f64) -> Result<DVector<f64>>, h: f64| -> Result<DVector<f64>> {
        Ok((g(-2.0 * h)? - g(2.0 * h)? + (g(h)? - g(-h)?) * 8.0) / (12.0 * h))
    };
    let dt = diff(&|e| Ok(map(t + e, z)?.coords()), ht)?;
    let dz = diff(&|e| Ok(map(t, z + e)?.coords()), 1e-3)?;
    Ok(DMatrix::from_columns(&[dt, dz]))
}

/// `J^T G J` for the planar isometry `f` at `(t, z)`, `G` the quotient metric.
pub fn pullback_metric(t: f64, z: f64) -> Result<DMatrix<f64>> {
    let map = |t: f64, z: f64| f_map(&WarpedPoint::from_angle(t, z)?);
    let j = planar_jacobian(map, t, z, 1.0 + tolerance::WARPED_MARGIN, f64::INFINITY)?;
    let g = QuotientMetric::new(2)?.tensor(&map(t, z)?)?;
    Ok(j.transpose() * g * j)
}

/// Max-norm of the pulled-back quotient metric minus the warped metric
/// `diag(1/t^2, e^{2 phi(t)})` in `(t, z)` coordinates.
pub fn pullback_isometry_residual(t: f64, z: f64) -> Result<f64> {
    let pulled = pullback_metric(t, z)?;
    let warped = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / (t * t), warp_factor(t)?]));
    Ok((pulled - warped).amax())
}

/// Max-norm of the hyperbolic metric pulled back through `f~` minus
/// `diag(1/s^2, sinh^2(ln s))` in `(s, z)` coordinates.
pub fn hyperbolic_pullback_residual(s: f64, z: f64) -> Result<f64> {
    let map = |s: f64, z: f64| {
        f_tilde(&HyperbolicWarpedPoint::new(s, DVector::from_vec(vec![z.sin(), z.cos()]))?)
    };
    let j = planar_jacobian(map, s, z, f64::MIN_POSITIVE, 1.0 - tolerance::WARPED_MARGIN)?;
    let g = HyperbolicMetric::new(2)?.tensor(&map(s, z)?)?;
    let warped = DMatrix::from_diagonal(&DVector::from_vec(vec![1.0 / (s * s), hyperbolic_warp_factor(s)]));
    Ok((j.transpose() * g * j - warped).amax())
}
