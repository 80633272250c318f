//! Geodesics of chart metrics: the geodesic equation from the numeric
//! connection, the explicit polynomial system for the plane, adaptive
//! integration and the closed-form families through `i = (0, 1)`.

use nalgebra::DVector;

use crate::chart::{l_action, r_action, tau, ChartPoint};
use crate::error::{GeomError, Result};
use crate::lie::GroupElement;
use crate::metric::{christoffel, Metric, TangentVector};
use crate::ode::{dopri5, DenseSolution, OdeOptions};

/// Step for the Christoffel symbols along trajectories. Connection errors
/// accumulate over a trajectory, so this is finer than the curvature step.
pub fn connection_step(p: &ChartPoint) -> f64 {
    1e-3 * p.y()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicState {
    pub position: ChartPoint,
    pub velocity: TangentVector,
}

impl GeodesicState {
    pub fn new(position: ChartPoint, velocity: DVector<f64>) -> Result<Self> {
        let velocity = TangentVector::new(position.clone(), velocity)?;
        Ok(Self { position, velocity })
    }

    pub fn rank(&self) -> usize {
        self.position.rank()
    }

    /// `(x, y, x', y')` stacked.
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.rank();
        let mut v = DVector::zeros(2 * n);
        v.rows_mut(0, n).copy_from(&self.position.coords());
        v.rows_mut(n, n).copy_from(&self.velocity.components);
        v
    }

    pub fn from_vector(v: &DVector<f64>) -> Result<Self> {
        if !v.len().is_multiple_of(2) || v.len() < 4 {
            return Err(GeomError::Argument(format!("state vector of length {}", v.len())));
        }
        let n = v.len() / 2;
        let position = ChartPoint::from_coords(v.rows(0, n).as_slice())?;
        Self::new(position, v.rows(n, n).into_owned())
    }

    pub fn speed<M: Metric + ?Sized>(&self, metric: &M) -> Result<f64> {
        metric.norm(&self.position, &self.velocity.components)
    }
}

/// Time derivative of a [`GeodesicState`].
#[derive(Debug, Clone, PartialEq)]
pub struct StateDerivative {
    pub velocity: DVector<f64>,
    pub acceleration: DVector<f64>,
}

impl StateDerivative {
    pub fn to_vector(&self) -> DVector<f64> {
        let n = self.velocity.len();
        let mut v = DVector::zeros(2 * n);
        v.rows_mut(0, n).copy_from(&self.velocity);
        v.rows_mut(n, n).copy_from(&self.acceleration);
        v
    }
}

/// `x'' = -Gamma(x', x')` with the connection of `metric`.
pub fn geodesic_rhs<M: Metric + ?Sized>(metric: &M, s: &GeodesicState) -> Result<StateDerivative> {
    if metric.rank() != s.rank() {
        return Err(GeomError::Argument(format!(
            "rank-{} state for a rank-{} metric",
            s.rank(),
            metric.rank()
        )));
    }
    let gamma = christoffel(metric, &s.position, connection_step(&s.position))?;
    Ok(StateDerivative {
        velocity: s.velocity.components.clone(),
        acceleration: gamma.acceleration(&s.velocity.components),
    })
}

/// The explicit geodesic system of the plane, solved for `x''` and `y''`.
pub fn geodesic_rhs_2d_closed(s: &GeodesicState) -> Result<StateDerivative> {
    if s.rank() != 2 {
        return Err(GeomError::Argument("the explicit geodesic system is two-dimensional".into()));
    }
    let (x, y) = (s.position.x()[0], s.position.y());
    let (dx, dy) = (s.velocity.components[0], s.velocity.components[1]);
    if y <= 0.0 {
        return Err(GeomError::Domain(format!("leading coefficient vanishes at y = {y}")));
    }
    let (x2, y2) = (x * x, y * y);
    let (x4, y4) = (x2 * x2, y2 * y2);
    let (x6, y6) = (x4 * x2, y4 * y2);
    let (x8, y8) = (x4 * x4, y4 * y4);
    let d = x4 + 2.0 * x2 * y2 + 2.0 * x2 + y4 + 1.0;

    let p1 = x6 * (4.0 * y2 + 2.0) + x4 * (6.0 * y4 + 8.0 * y2) + 2.0 * x2 * (2.0 * y6 + y4 + 2.0 * y2 - 1.0) + x8 + y8
        - 1.0;
    let q1 = 4.0 * (x2 + 1.0) * y6
        + 2.0 * (3.0 * x4 + 4.0 * x2 + 1.0) * y4
        + 4.0 * (x2 + 1.0).powi(3) * y2
        + (x2 + 1.0).powi(4)
        + y8;
    let lead1 = (y * d).powi(2);
    let ddx = (2.0 * y * dx * dy * p1 + 4.0 * x * y2 * dx * dx * (x2 + 1.0).powi(2) - x * dy * dy * q1) / lead1;

    let p2 = x4 * (3.0 * y2 + 1.0) + x2 * (3.0 * y4 + 4.0 * y2 - 1.0) + x6 + y6 + y4 + y2 - 1.0;
    let q2 = 3.0 * x4 * (y2 - 1.0) + x2 * (y2 + 1.0) * (3.0 * y2 - 5.0) + x6 + y6 - y4 - y2 - 1.0;
    let r2 = 2.0 * x6 * (y2 + 1.0) + 4.0 * x4 * y2 - 2.0 * x2 * (y6 + y4 - y2 + 1.0) + x8 - (y4 + 1.0).powi(2);
    let lead2 = y * d * d;
    let ddy = (4.0 * x * y * dx * dy * p2 - 2.0 * y2 * dx * dx * q2 - dy * dy * r2) / lead2;

    Ok(StateDerivative {
        velocity: DVector::from_vec(vec![dx, dy]),
        acceleration: DVector::from_vec(vec![ddx, ddy]),
    })
}

/// Integrated geodesic with dense output.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    rank: usize,
    solution: DenseSolution,
}

impl Trajectory {
    pub fn rank(&self) -> usize {
        self.rank
    }

    /// Times of the accepted integration steps.
    pub fn step_times(&self) -> &[f64] {
        &self.solution.t
    }

    pub fn t_end(&self) -> f64 {
        self.solution.t_end()
    }

    pub fn sample(&self, t: f64) -> Result<GeodesicState> {
        GeodesicState::from_vector(&self.solution.eval(t))
    }

    pub fn resample(&self, times: &[f64]) -> Result<Vec<GeodesicState>> {
        times.iter().map(|&t| self.sample(t)).collect()
    }

    /// `samples + 1` equally spaced states from start to end.
    pub fn uniform(&self, samples: usize) -> Result<Vec<(f64, GeodesicState)>> {
        let (t0, t1) = (self.solution.t_start(), self.t_end());
        let m = samples.max(1);
        (0..=m)
            .map(|i| {
                let t = if i == m { t1 } else { t0 + (t1 - t0) * i as f64 / m as f64 };
                Ok((t, self.sample(t)?))
            })
            .collect()
    }

    pub fn endpoint(&self) -> Result<GeodesicState> {
        GeodesicState::from_vector(self.solution.y.last().expect("trajectory has a start"))
    }

    /// Largest deviation of the speed from its initial value over the
    /// accepted steps.
    pub fn speed_drift<M: Metric + ?Sized>(&self, metric: &M) -> Result<f64> {
        let mut speeds = self
            .solution
            .y
            .iter()
            .map(|v| GeodesicState::from_vector(v)?.speed(metric));
        let v0 = speeds.next().expect("trajectory has a start")?;
        speeds.try_fold(0.0f64, |acc, s| Ok(acc.max((s? - v0).abs())))
    }

    /// Arc length by composite Simpson over `2 * panels` intervals.
    pub fn length<M: Metric + ?Sized>(&self, metric: &M, panels: usize) -> Result<f64> {
        let (t0, t1) = (self.solution.t_start(), self.t_end());
        let m = 2 * panels.max(1);
        let h = (t1 - t0) / m as f64;
        let mut acc = 0.0;
        for i in 0..=m {
            let w = if i == 0 || i == m { 1.0 } else if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.sample(t0 + h * i as f64)?.speed(metric)?;
        }
        Ok((acc * h / 3.0).abs())
    }
}

#[derive(Debug, Clone, thiserror::Error)]
pub enum IntegrateError {
    #[error(transparent)]
    Invalid(#[from] GeomError),
    #[error("geodesic integration failed at t = {t_reached:e}: {reason}")]
    Failed { reason: String, t_reached: f64, partial: Trajectory },
}

/// Integrates the geodesic of `metric` starting at `s0` over `[0, t_total]`
/// with relative and absolute tolerance `tol`.
pub fn integrate<M: Metric + ?Sized>(
    metric: &M,
    s0: &GeodesicState,
    t_total: f64,
    tol: f64,
) -> std::result::Result<Trajectory, IntegrateError> {
    if !(1e-12..=1e-6).contains(&tol) {
        return Err(GeomError::Argument(format!("tolerance {tol:e} outside [1e-12, 1e-6]")).into());
    }
    if !t_total.is_finite() {
        return Err(GeomError::Argument("non-finite integration time".into()).into());
    }
    if metric.rank() != s0.rank() {
        return Err(GeomError::Argument(format!(
            "rank-{} state for a rank-{} metric",
            s0.rank(),
            metric.rank()
        ))
        .into());
    }
    let rank = s0.rank();
    let rhs = |_: f64, v: &DVector<f64>| Ok(geodesic_rhs(metric, &GeodesicState::from_vector(v)?)?.to_vector());
    match dopri5(rhs, 0.0, s0.to_vector(), t_total, &OdeOptions::with_tolerance(tol)) {
        Ok(solution) => Ok(Trajectory { rank, solution }),
        Err(f) => Err(IntegrateError::Failed {
            reason: f.reason,
            t_reached: f.t_reached,
            partial: Trajectory { rank, solution: f.partial },
        }),
    }
}

/// Geodesic distance from `i = (0, 1)`:
/// `arccosh((1 + |x|^2 + y^2) / (2y))`.
pub fn distance_from_i(p: &ChartPoint) -> f64 {
    let arg = (1.0 + p.x_norm_sq() + p.y() * p.y()) / (2.0 * p.y());
    debug_assert!(arg >= 1.0 - 1e-12, "arccosh argument {arg}");
    arg.max(1.0).acosh()
}

/// Unit-speed geodesic through `i` with initial velocity `u` (`|u| = 1`; the
/// metric at `i` is the identity): `(sinh(s) u', sinh(s) u_n + cosh(s))`.
pub fn radial_geodesic(u: &DVector<f64>, s: f64) -> Result<ChartPoint> {
    let n = u.len();
    if n < 2 {
        return Err(GeomError::Argument("direction needs at least two components".into()));
    }
    if (u.norm() - 1.0).abs() > 1e-12 {
        return Err(GeomError::Domain(format!("direction has norm {}", u.norm())));
    }
    let (sh, ch) = (s.sinh(), s.cosh());
    ChartPoint::new(u.rows(0, n - 1).iter().map(|v| sh * v).collect(), sh * u[n - 1] + ch)
}

/// Parameter `alpha` of the hyperbola `x^2 + 2 alpha x y - y^2 + 1 = 0`
/// traced by the plane geodesic through `i` with initial velocity `u`.
/// Infinite for the vertical axis.
pub fn hyperbola_alpha(u: (f64, f64)) -> f64 {
    u.1 / u.0
}

/// `x^2 + 2 alpha x y - y^2 + 1`.
pub fn hyperbola_residual(alpha: f64, x: f64, y: f64) -> f64 {
    x * x + 2.0 * alpha * x * y - y * y + 1.0
}

/// `(x - alpha)^2 + y^2 - alpha^2 - 1`.
pub fn half_circle_residual(alpha: f64, x: f64, y: f64) -> f64 {
    (x - alpha).powi(2) + y * y - alpha * alpha - 1.0
}

/// Least-squares `alpha` for points on one hyperbola of the family, and the
/// largest absolute residual at that `alpha`.
pub fn fit_hyperbola(points: &[(f64, f64)]) -> Result<(f64, f64)> {
    let (num, den) = points.iter().fold((0.0, 0.0), |(num, den), &(x, y)| {
        let a = 2.0 * x * y;
        (num - a * (x * x - y * y + 1.0), den + a * a)
    });
    if den <= 1e-300 {
        return Err(GeomError::Argument("points do not determine alpha (all on the axes)".into()));
    }
    let alpha = num / den;
    let worst = points
        .iter()
        .fold(0.0f64, |acc, &(x, y)| acc.max(hyperbola_residual(alpha, x, y).abs()));
    Ok((alpha, worst))
}

/// Max-norm distance between `tau(r(k) gamma(t))` and
/// `l(k^{-1}) gamma(-t)` for the axis geodesic `gamma(t) = (0, e^t)`.
pub fn tau_geodesic_check(k: &GroupElement, t: f64) -> Result<f64> {
    let n = k.rank();
    let lhs = tau(&r_action(k, &ChartPoint::on_axis(n, t.exp())?)?);
    let rhs = l_action(&k.inverse(), &ChartPoint::on_axis(n, (-t).exp())?)?;
    Ok(lhs.distance_max(&rhs))
}

/// `max |c'' + Gamma(c', c')|` for a curve given by position, velocity and
/// acceleration at one instant.
pub fn geodesic_defect<M: Metric + ?Sized>(
    metric: &M,
    p: &ChartPoint,
    velocity: &DVector<f64>,
    acceleration: &DVector<f64>,
) -> Result<f64> {
    let s = GeodesicState::new(p.clone(), velocity.clone())?;
    let expected = geodesic_rhs(metric, &s)?.acceleration;
    Ok((acceleration - expected).amax())
}

/// [`geodesic_defect`] of the curve `c` at `t`, with velocity and
/// acceleration from fourth-order central differences of step `h`.
pub fn curve_geodesic_defect<M, F>(metric: &M, c: F, t: f64, h: f64) -> Result<f64>
where
    M: Metric + ?Sized,
    F: Fn(f64) -> Result<ChartPoint>,
{
    let at = |s: f64| -> Result<DVector<f64>> { Ok(c(s)?.coords()) };
    let (m2, m1, p0, p1, p2) = (at(t - 2.0 * h)?, at(t - h)?, at(t)?, at(t + h)?, at(t + 2.0 * h)?);
    let v = (&m2 - &p2 + (&p1 - &m1) * 8.0) / (12.0 * h);
    let a = ((&p1 + &m1) * 16.0 - &m2 - &p2 - &p0 * 30.0) / (12.0 * h * h);
    geodesic_defect(metric, &ChartPoint::from_coords(p0.as_slice())?, &v, &a)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chart::compact_rotation;
    use crate::metric::{HyperbolicMetric, QuotientMetric};
    use std::f64::consts::{FRAC_PI_2, LN_2};

    fn state(x: f64, y: f64, dx: f64, dy: f64) -> GeodesicState {
        GeodesicState::new(ChartPoint::new(vec![x], y).unwrap(), DVector::from_vec(vec![dx, dy])).unwrap()
    }

    #[test]
    fn axis_acceleration_in_the_quotient() {
        let m = QuotientMetric::new(2).unwrap();
        for y in [0.5, 1.0, 3.0] {
            let a = geodesic_rhs(&m, &state(0.0, y, 0.0, y)).unwrap().acceleration;
            assert!(a[0].abs() < 1e-10);
            assert!((a[1] - y).abs() < 1e-9 * y, "y = {y}: {}", a[1]);
        }
    }

    #[test]
    fn vertical_ray_in_the_half_plane() {
        let m = HyperbolicMetric::new(2).unwrap();
        let a = geodesic_rhs(&m, &state(0.3, 2.0, 0.0, 2.0)).unwrap().acceleration;
        assert!(a[0].abs() < 1e-10 && (a[1] - 2.0).abs() < 1e-9);
    }

    #[test]
    fn zero_velocity_has_zero_acceleration() {
        let m = QuotientMetric::new(2).unwrap();
        let s = state(0.7, 1.3, 0.0, 0.0);
        assert_eq!(geodesic_rhs(&m, &s).unwrap().acceleration.amax(), 0.0);
        assert_eq!(geodesic_rhs_2d_closed(&s).unwrap().acceleration.amax(), 0.0);
    }

    #[test]
    fn explicit_system_on_the_axis() {
        for t in [-1.0f64, 0.0, 0.8] {
            let a = geodesic_rhs_2d_closed(&state(0.0, t.exp(), 0.0, t.exp())).unwrap().acceleration;
            assert!(a[0].abs() < 1e-15 && (a[1] - t.exp()).abs() < 1e-13 * t.exp());
        }
    }

    #[test]
    fn explicit_system_matches_numeric_connection() {
        let m = QuotientMetric::new(2).unwrap();
        for s in [state(0.0, 1.0, 1.0, 0.0), state(-1.2, 0.6, 0.4, -0.9), state(2.0, 3.0, -0.3, 0.2)] {
            let a = geodesic_rhs_2d_closed(&s).unwrap().acceleration;
            let b = geodesic_rhs(&m, &s).unwrap().acceleration;
            assert!((a - b).amax() < 1e-6);
        }
    }

    #[test]
    fn explicit_system_is_planar_only() {
        let s = GeodesicState::new(ChartPoint::origin(3), DVector::zeros(3)).unwrap();
        assert!(matches!(geodesic_rhs_2d_closed(&s), Err(GeomError::Argument(_))));
    }

    #[test]
    fn axis_ray_reaches_two() {
        let m = QuotientMetric::new(2).unwrap();
        let traj = integrate(&m, &state(0.0, 1.0, 0.0, 1.0), LN_2, 1e-10).unwrap();
        let end = traj.endpoint().unwrap().position;
        assert!(end.x()[0].abs() < 1e-8 && (end.y() - 2.0).abs() < 1e-8, "{end:?}");
    }

    #[test]
    fn zero_time_keeps_initial_state() {
        let m = QuotientMetric::new(2).unwrap();
        let s0 = state(0.2, 1.1, 0.3, 0.1);
        let traj = integrate(&m, &s0, 0.0, 1e-8).unwrap();
        assert_eq!(traj.step_times().len(), 1);
        assert_eq!(traj.endpoint().unwrap(), s0);
    }

    #[test]
    fn tolerance_range_is_enforced() {
        let m = QuotientMetric::new(2).unwrap();
        let s0 = state(0.0, 1.0, 0.0, 1.0);
        assert!(matches!(integrate(&m, &s0, 1.0, 1e-3), Err(IntegrateError::Invalid(_))));
        assert!(matches!(integrate(&m, &s0, 1.0, 1e-13), Err(IntegrateError::Invalid(_))));
    }

    #[test]
    fn horizontal_start_follows_hyperbola() {
        let m = QuotientMetric::new(2).unwrap();
        let traj = integrate(&m, &state(0.0, 1.0, 1.0, 0.0), 1.5, 1e-10).unwrap();
        let pts: Vec<(f64, f64)> = traj
            .uniform(60)
            .unwrap()
            .iter()
            .map(|(_, s)| (s.position.x()[0], s.position.y()))
            .collect();
        let (alpha, worst) = fit_hyperbola(&pts).unwrap();
        assert!(alpha.abs() < 1e-6 && worst < 1e-6, "alpha {alpha}, residual {worst}");
    }

    #[test]
    fn distances() {
        assert_eq!(distance_from_i(&ChartPoint::origin(3)), 0.0);
        let m = 3.7f64;
        assert!((distance_from_i(&ChartPoint::new(vec![0.0], m).unwrap()) - m.ln()).abs() < 1e-14);
        assert!((distance_from_i(&ChartPoint::new(vec![1.0], 1.0).unwrap()) - 0.962_423_650_119_207).abs() < 1e-14);
    }

    #[test]
    fn radial_geodesics_lie_on_hyperbolas_and_circles() {
        for z in [0.3f64, 1.0, 2.5, -0.7] {
            let u = DVector::from_vec(vec![z.sin(), z.cos()]);
            let alpha = hyperbola_alpha((z.sin(), z.cos()));
            for s in [-1.0, 0.4, 2.0] {
                let p = radial_geodesic(&u, s).unwrap();
                assert!(hyperbola_residual(alpha, p.x()[0], p.y()).abs() < 1e-12 * p.y().powi(2).max(1.0));
                let q = tau(&p);
                assert!(half_circle_residual(alpha, q.x()[0], q.y()).abs() < 1e-10);
                assert!((distance_from_i(&p) - s.abs()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn tau_swaps_geodesic_orientation() {
        let id = GroupElement::identity(2);
        assert!(tau_geodesic_check(&id, 0.7).unwrap() < 1e-15);
        let k = compact_rotation(2, 1, 2, 0.9).unwrap();
        assert!(tau_geodesic_check(&k, -1.3).unwrap() < 1e-12);
        let k3 = compact_rotation(3, 2, 3, FRAC_PI_2).unwrap();
        assert!(tau_geodesic_check(&k3, 0.5).unwrap() < 1e-12);
    }

    #[test]
    fn axis_curve_has_no_geodesic_defect() {
        let m = QuotientMetric::new(3).unwrap();
        let defect = curve_geodesic_defect(&m, |t| ChartPoint::on_axis(3, t.exp()), 0.4, 1e-3).unwrap();
        assert!(defect < 1e-8, "{defect}");
    }
}
