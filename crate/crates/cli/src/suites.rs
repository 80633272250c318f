//! Invariant suites run by `hquot verify`.
//!
//! Each case `i` of a suite draws from `case_rng(seed, stream)` with a stream
//! that encodes both the suite and `i`, so results do not depend on how rayon
//! schedules the cases.

use std::f64::consts::{FRAC_PI_2, LN_2, PI, TAU};
use std::time::Instant;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use hquot::chart::{circle_residual, compact_rotation, l_action, orbit_circle, r_action, tau, ChartPoint};
use hquot::geodesic::{
    curve_geodesic_defect, distance_from_i, hyperbola_alpha, hyperbola_residual, integrate, radial_geodesic,
    tau_geodesic_check, GeodesicState,
};
use hquot::lie::{exp, exp_closed, kna_decompose, kna_residual, minkowski_form, nak_decompose, nak_residual};
use hquot::metric::{
    closed_frame_2d, horizontal_frame, kappa2_closed, kappa_n_closed, kappa_n_closed_variant, r_isometry_defect,
    sectional_numeric, HyperbolicMetric, Metric, QuotientMetric, RightQuotientMetric,
};
use hquot::sample::{
    case_rng, gaussian_vector, random_algebra, random_block_rotation, random_compact, random_group_word,
    random_point, random_unit_vector,
};
use hquot::tolerance;
use hquot::warped::{
    f_inverse, f_map, hyperbolic_pullback_residual, kappa_mixed, kappa_radial_warped, kappa_radial_warped_literal,
    kappa_tangent_warped, pullback_isometry_residual, rotation_to, tau_square_residual, WarpedPoint,
};
use hquot::{GeomError, GroupElement, Result};

use crate::report::SuiteReport;

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Quick,
    Full,
}

impl Level {
    fn pick(self, quick: usize, full: usize) -> usize {
        match self {
            Level::Quick => quick,
            Level::Full => full,
        }
    }
}

/// Suite names in execution order.
pub const SUITES: [&str; 8] =
    ["lie", "chart", "metric", "curvature", "exponent-resolution", "geodesic", "warped", "warped-rank"];

/// Runs every suite that applies to `n` at `level`.
pub fn run_all(n: usize, seed: u64, level: Level) -> Result<Vec<SuiteReport>> {
    hquot::lie::check_rank(n)?;
    let mut out = vec![
        lie_suite(n, seed, level),
        chart_suite(n, seed, level),
        metric_suite(n, seed, level),
        curvature_suite(n, seed, level),
    ];
    if n >= 3 && level == Level::Full {
        out.push(exponent_suite(n));
    }
    out.push(geodesic_suite(n, seed, level));
    out.push(warped_suite(seed, level));
    out.push(warped_rank_suite(n, seed, level));
    Ok(out)
}

/// Runs `count` cases in parallel and returns their results in case order.
fn cases<T, F>(seed: u64, suite: u64, count: usize, f: F) -> Vec<Result<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
{
    (0..count)
        .into_par_iter()
        .map(|i| f(&mut case_rng(seed, (suite << 32) | i as u64), i))
        .collect()
}

/// Projects field `j` of every case result.
fn field<const K: usize>(results: &[Result<[f64; K]>], j: usize) -> impl Iterator<Item = Result<f64>> + '_ {
    results.iter().map(move |r| r.clone().map(|a| a[j]))
}

fn timed(name: &str, body: impl FnOnce(&mut SuiteReport)) -> SuiteReport {
    let start = Instant::now();
    let mut r = SuiteReport::new(name);
    body(&mut r);
    r.wall = start.elapsed();
    r
}

fn membership_residual(g: &GroupElement) -> f64 {
    let j = minkowski_form(g.rank());
    (g.matrix() * &j * g.matrix().transpose() - j).amax()
}

fn relative(diff: f64, scale: f64) -> f64 {
    diff / scale.max(1.0)
}

pub fn lie_suite(n: usize, seed: u64, level: Level) -> SuiteReport {
    timed("lie", |r| {
        let res = cases(seed, 1, level.pick(60, 500), |rng, _| {
            let x = random_algebra(rng, n, 1.5);
            let g = exp(&x);
            let (s, t) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            let sum = exp(&x.scale(s + t));
            let prod = &exp(&x.scale(s)) * &exp(&x.scale(t));
            let subgroup = relative(sum.distance_max(&prod), sum.max_norm());
            let closed = match exp_closed(&x) {
                Some(c) => relative(c.distance_max(&g), g.max_norm()),
                None => 0.0,
            };
            let w = random_group_word(rng, n, 12)?;
            let (p, k) = nak_decompose(&w)?;
            let (k2, q) = kna_decompose(&w)?;
            Ok([membership_residual(&g) / g.max_norm().powi(2), subgroup, closed, nak_residual(&w, &p, &k), kna_residual(&w, &k2, &q)])
        });
        r.at_most("exp lies in the group", tolerance::MEMBERSHIP, field(&res, 0));
        r.at_most("one-parameter subgroup", tolerance::EXACT * 100.0, field(&res, 1));
        r.at_most("closed exp agrees", tolerance::EXACT * 100.0, field(&res, 2));
        r.at_most("NAK reconstruction", tolerance::RECONSTRUCTION, field(&res, 3));
        r.at_most("KNA reconstruction", tolerance::RECONSTRUCTION, field(&res, 4));
    })
}

pub fn chart_suite(n: usize, seed: u64, level: Level) -> SuiteReport {
    timed("chart", |r| {
        let res = cases(seed, 2, level.pick(100, 1000), |rng, _| {
            let p = random_point(rng, n, 2.0, 0.25, 4.0);
            let k1 = random_compact(rng, n);
            let k2 = random_compact(rng, n);
            let scale = p.coords().amax();
            let involution = relative(tau(&tau(&p)).distance_max(&p), scale);
            let equivariance = tau(&r_action(&k1, &p)?).distance_max(&l_action(&k1.inverse(), &tau(&p))?);
            let right_law = r_action(&(&k1 * &k2), &p)?.distance_max(&r_action(&k2, &r_action(&k1, &p)?)?);
            let left_law = l_action(&(&k1 * &k2), &p)?.distance_max(&l_action(&k1, &l_action(&k2, &p)?)?);
            let (c, rad) = orbit_circle(&p);
            let circle = circle_residual(&r_action(&k1, &p)?, c, rad).max(circle_residual(&l_action(&k1, &p)?, c, rad));
            let fixed = r_action(&k1, &ChartPoint::origin(n))?.distance_max(&ChartPoint::origin(n));
            Ok([involution, equivariance, right_law, left_law, relative(circle, c * c), fixed])
        });
        r.at_most("tau is an involution", tolerance::EXACT, field(&res, 0));
        r.at_most("tau(r(k)p) = l(k^-1)tau(p)", tolerance::RECONSTRUCTION, field(&res, 1));
        r.at_most("r is a right action", tolerance::RECONSTRUCTION, field(&res, 2));
        r.at_most("l is a left action", tolerance::RECONSTRUCTION, field(&res, 3));
        r.at_most("orbits lie on circles", tolerance::RECONSTRUCTION, field(&res, 4));
        r.at_most("i is fixed by K", tolerance::RECONSTRUCTION, field(&res, 5));

        // Axis points are fixed exactly by the SO(n-1) block; a rotation
        // that moves the last axis moves them.
        let stab = cases(seed, 3, level.pick(40, 200), |rng, _| {
            let y = if rng.random_bool(0.5) { rng.random_range(0.2..0.9) } else { rng.random_range(1.1..5.0) };
            let p = ChartPoint::on_axis(n, y)?;
            let k = random_block_rotation(rng, n, n - 1);
            let inside = r_action(&k, &p)?.distance_max(&p);
            let turn = compact_rotation(n, n - 1, n, rng.random_range(0.3..PI - 0.3))?;
            let outside = r_action(&turn, &p)?.distance_max(&p);
            Ok([inside, outside])
        });
        r.at_most("SO(n-1) stabilizes axis points", 1e-9, field(&stab, 0));
        r.at_least("rotations off the axis move axis points", 1e-3, field(&stab, 1));
    })
}

pub fn metric_suite(n: usize, seed: u64, level: Level) -> SuiteReport {
    timed("metric", |r| {
        let metric = QuotientMetric::new(n).expect("rank checked");
        let right = RightQuotientMetric::new(n).expect("rank checked");
        let hyper = HyperbolicMetric::new(n).expect("rank checked");
        let res = cases(seed, 4, level.pick(30, 200), |rng, _| {
            let p = random_point(rng, n, 2.0, 0.25, 4.0);
            let sample = horizontal_frame(&p)?;
            let k = random_compact(rng, n);
            let g = &sample.g;
            let closed = if n == 2 { relative((closed_frame_2d(&p)?.g - g).amax(), g.amax()) } else { 0.0 };
            let h = hyper.tensor(&p)?;
            let rq = relative((right.tensor(&p)? - &h).amax(), h.amax());
            Ok([sample.orthonormality_defect(), sample.min_eigenvalue(), r_isometry_defect(&metric, &k, &p)?, closed, rq])
        });
        r.at_most("horizontal frame is orthonormal", tolerance::FRAME, field(&res, 0));
        r.at_least("metric is positive definite", f64::MIN_POSITIVE, field(&res, 1));
        r.at_most("r(k) is an isometry", tolerance::PULLBACK, field(&res, 2));
        if n == 2 {
            r.at_most("closed planar frame agrees", tolerance::FRAME, field(&res, 3));
        }
        r.at_most("right quotient is hyperbolic", tolerance::FRAME, field(&res, 4));
        let at_i = metric.tensor(&ChartPoint::origin(n)).map(|g| (g - DMatrix::identity(n, n)).amax());
        r.at_most("metric at i is the identity", tolerance::FRAME, [at_i]);
    })
}

fn unit(n: usize, i: usize) -> DVector<f64> {
    let mut v = DVector::zeros(n);
    v[i] = 1.0;
    v
}

/// Numeric curvature at `(0, y)` of the plane spanned by the direction at
/// angle `theta` from the y-axis towards `x_1` and the orthogonal `x_2`
/// direction, all measured in the metric (`n >= 3`).
pub fn axis_plane_curvature(metric: &QuotientMetric, y: f64, theta: f64) -> Result<f64> {
    let n = metric.rank();
    if n < 3 {
        return Err(GeomError::Argument("axis planes at an angle need n >= 3".into()));
    }
    let p = ChartPoint::on_axis(n, y)?;
    let g = metric.tensor(&p)?;
    let e = |i: usize| unit(n, i) / g[(i, i)].sqrt();
    let (s, c) = theta.sin_cos();
    let u = e(n - 1) * c + e(0) * s;
    sectional_numeric(metric, &p, &u, &e(1))
}

fn random_plane(rng: &mut ChaCha8Rng, n: usize) -> (DVector<f64>, DVector<f64>) {
    loop {
        let u = random_unit_vector(rng, n);
        let v = random_unit_vector(rng, n);
        if (u.dot(&v)).abs() < 0.99 {
            return (u, v);
        }
    }
}

pub fn curvature_suite(n: usize, seed: u64, level: Level) -> SuiteReport {
    timed("curvature", |r| {
        let metric = QuotientMetric::new(n).expect("rank checked");
        let hyper = HyperbolicMetric::new(n).expect("rank checked");
        let origin = ChartPoint::origin(n);
        let mut at_i = vec![Ok((kappa2_closed(0.0, 1.0) - 5.0).abs())];
        at_i.push(sectional_numeric(&metric, &origin, &unit(n, 0), &unit(n, n - 1)).map(|k| (k - 5.0).abs()));
        if n >= 3 {
            at_i.push(sectional_numeric(&metric, &origin, &unit(n, 0), &unit(n, 1)).map(|k| (k - 5.0).abs()));
        }
        r.at_most("kappa(0,1)=5", tolerance::CURVATURE_AT_I, at_i);

        let count = level.pick(12, 400) / match n {
            2 | 3 => 1,
            4 => 2,
            _ => 10,
        };
        if n == 2 {
            let res = cases(seed, 5, count, |rng, _| {
                let p = random_point(rng, 2, 2.0, 0.25, 4.0);
                let k = sectional_numeric(&metric, &p, &unit(2, 0), &unit(2, 1))?;
                Ok([(k - kappa2_closed(p.x()[0], p.y())).abs()])
            });
            r.at_most("closed form matches oracle", tolerance::CURVATURE_ORACLE, field(&res, 0));
        } else {
            let res = cases(seed, 5, count, |rng, _| {
                let y = 1.0 + 4.0 * (1.0 - rng.random::<f64>());
                let theta = rng.random_range(0.0..FRAC_PI_2);
                Ok([(axis_plane_curvature(&metric, y, theta)? - kappa_n_closed(y, theta)).abs()])
            });
            r.at_most("closed form matches oracle on the axis", tolerance::CURVATURE_ORACLE, field(&res, 0));
        }

        let bounds = cases(seed, 6, count, |rng, _| {
            let p = random_point(rng, n, 2.0, 0.25, 4.0);
            let (u, v) = random_plane(rng, n);
            let k = sectional_numeric(&metric, &p, &u, &v)?;
            let q = random_point(rng, n, 2.0, 0.25, 4.0);
            let (a, b) = random_plane(rng, n);
            let kh = sectional_numeric(&hyper, &q, &a, &b)?;
            Ok([k, k, (kh + 1.0).abs()])
        });
        r.at_least("kappa > 0", f64::MIN_POSITIVE, field(&bounds, 0));
        r.at_most("kappa <= 5", 5.0, field(&bounds, 1));
        r.at_most("hyperbolic control has kappa = -1", tolerance::HYPERBOLIC_CURVATURE, field(&bounds, 2));
    })
}

/// Resolves the denominator exponent of the tangent-plane curvature `g(y)`
/// against the numeric oracle: exponent 2 must match, exponent 4 must miss
/// by at least `0.1` beyond the oracle tolerance.
pub fn exponent_suite(n: usize) -> SuiteReport {
    timed("exponent-resolution", |r| {
        let metric = QuotientMetric::new(n).expect("rank checked");
        let ys = [1.5, 2.0, 3.0, 4.0];
        let numeric: Vec<Result<f64>> = ys.par_iter().map(|&y| axis_plane_curvature(&metric, y, FRAC_PI_2)).collect();
        let miss = |e: i32| -> Vec<Result<f64>> {
            ys.iter()
                .zip(&numeric)
                .map(|(&y, k)| k.clone().map(|k| (k - kappa_n_closed_variant(y, FRAC_PI_2, e)).abs()))
                .collect()
        };
        r.at_most("exponent 2 matches oracle", tolerance::CURVATURE_ORACLE, miss(2));
        r.at_least("exponent 4 rejected", tolerance::CURVATURE_ORACLE + 0.1, miss(4));
    })
}

pub fn geodesic_suite(n: usize, seed: u64, level: Level) -> SuiteReport {
    timed("geodesic", |r| {
        let metric = QuotientMetric::new(n).expect("rank checked");
        let tol = 1e-10;
        let axis = (|| -> Result<f64> {
            let s0 = GeodesicState::new(ChartPoint::origin(n), unit(n, n - 1))?;
            let traj = integrate(&metric, &s0, LN_2, tol).map_err(|e| GeomError::Numeric(e.to_string()))?;
            Ok(traj.endpoint()?.position.distance_max(&ChartPoint::on_axis(n, 2.0)?))
        })();
        r.at_most("axis ray reaches (0,2) at ln 2", tolerance::GEODESIC_ENDPOINT, [axis]);

        let count = level.pick(3, 20) / if n > 4 { 2 } else { 1 };
        let res = cases(seed, 7, count.max(1), |rng, _| {
            // Plane geodesic through i in the (x_1, y) plane.
            let z = rng.random_range(0.2..PI - 0.2) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
            let u = unit(n, 0) * z.sin() + unit(n, n - 1) * z.cos();
            let t_total = rng.random_range(0.3..1.5);
            let traj = integrate(&metric, &GeodesicState::new(ChartPoint::origin(n), u)?, t_total, tol)
                .map_err(|e| GeomError::Numeric(e.to_string()))?;
            let alpha = hyperbola_alpha((z.sin(), z.cos()));
            let mut shape = 0.0f64;
            for (_, s) in traj.uniform(40)? {
                let scale = 1.0 + alpha.abs() * s.position.y();
                shape = shape.max(hyperbola_residual(alpha, s.position.x()[0], s.position.y()).abs() / scale);
            }
            let drift = traj.speed_drift(&metric)? / (10.0 * tol * (1.0 + t_total));

            // Geodesic from i to a random point: endpoint and length.
            let p = random_point(rng, n, 1.5, 0.4, 2.5);
            let w = f_inverse(&p)?;
            let s0 = GeodesicState::new(ChartPoint::origin(n), w.u().clone())?;
            let traj = integrate(&metric, &s0, w.t().ln(), tol).map_err(|e| GeomError::Numeric(e.to_string()))?;
            let endpoint = traj.endpoint()?.position.distance_max(&p);
            let length = (traj.length(&metric, 64)? - distance_from_i(&p)).abs();
            Ok([shape, drift, endpoint, length])
        });
        r.at_most("hyperbola family", tolerance::GEODESIC_SHAPE, field(&res, 0));
        r.at_most("speed drift / 10 tol (1+T)", 1.0, field(&res, 1));
        r.at_most("geodesic from i reaches its target", tolerance::GEODESIC_SHAPE, field(&res, 2));
        r.at_most("length equals distance from i", tolerance::GEODESIC_SHAPE, field(&res, 3));

        let res = cases(seed, 8, level.pick(10, 50), |rng, _| {
            let k = random_compact(rng, n);
            let t = rng.random_range(-3.0..3.0);
            let u = random_unit_vector(rng, n);
            let s = rng.random_range(0.2..1.5);
            let moved = curve_geodesic_defect(&metric, |t| r_action(&k, &radial_geodesic(&u, t)?), s, 1e-3)?;
            Ok([tau_geodesic_check(&k, t)?, moved])
        });
        r.at_most("tau reverses the axis geodesic", tolerance::RECONSTRUCTION, field(&res, 0));
        r.at_most("r(k) maps geodesics to geodesics", tolerance::GEODESIC_SHAPE, field(&res, 1));
    })
}

/// Planar warped-product identities (independent of the rank).
pub fn warped_suite(seed: u64, level: Level) -> SuiteReport {
    timed("warped", |r| {
        let ts: Vec<f64> = (1..=200).map(|i| 1.0 + 99.0 * i as f64 / 200.0).collect();
        r.at_most(
            "radial warped curvature is kappa(0,t)",
            tolerance::EXACT,
            ts.iter().map(|&t| kappa_radial_warped(t).map(|k| (k - kappa2_closed(0.0, t)).abs())),
        );
        r.at_most(
            "stable and literal radial forms agree",
            1e-9,
            ts.iter()
                .filter(|&&t| t >= 1.1)
                .map(|&t| Ok((kappa_radial_warped(t)? - kappa_radial_warped_literal(t)?).abs())),
        );
        let m = level.pick(6, 20);
        let grid: Vec<(f64, f64)> = (0..m)
            .flat_map(|i| (0..m).map(move |j| (1.1 + 3.9 * i as f64 / (m - 1) as f64, TAU * j as f64 / m as f64)))
            .collect();
        let res: Vec<Result<f64>> = grid.par_iter().map(|&(t, z)| pullback_isometry_residual(t, z)).collect();
        r.at_most("pullback is the warped metric", tolerance::PULLBACK, res);
        let res = cases(seed, 9, level.pick(20, 100), |rng, _| {
            let s = rng.random_range(0.1..0.9);
            let z = rng.random_range(0.0..TAU);
            Ok([hyperbolic_pullback_residual(s, z)?])
        });
        r.at_most("hyperbolic pullback is the warped metric", tolerance::PULLBACK, field(&res, 0));
    })
}

/// Warped-model identities in rank `n`.
pub fn warped_rank_suite(n: usize, seed: u64, level: Level) -> SuiteReport {
    timed("warped-rank", |r| {
        let res = cases(seed, 10, level.pick(100, 1000), |rng, _| {
            let t = rng.random_range(1.1..6.0);
            let u = random_unit_vector(rng, n);
            let b = rotation_to(&random_unit_vector(rng, n))?;
            let lhs = f_map(&WarpedPoint::new(t, &b * &u)?)?;
            let k = GroupElement::from_compact_block(&b)?.inverse();
            let rhs = r_action(&k, &f_map(&WarpedPoint::new(t, u.clone())?)?)?;
            let back = f_inverse(&f_map(&WarpedPoint::new(t, u.clone())?)?)?;
            let round = ((back.t() - t).abs() / t).max((back.u() - &u).amax());
            let square = tau_square_residual(&WarpedPoint::new(rng.random_range(1.01..10.0), u)?)?;
            let y = 1.0 + 19.0 * (1.0 - rng.random::<f64>());
            let theta = rng.random_range(0.0..FRAC_PI_2);
            let mixed = kappa_mixed(
                theta.cos(),
                theta.sin(),
                0.0,
                1.0,
                kappa_radial_warped(y)?,
                kappa_tangent_warped(y)?,
            )?;
            Ok([relative(lhs.distance_max(&rhs), t), round, square, (mixed - kappa_n_closed(y, theta)).abs()])
        });
        r.at_most("f is weakly equivariant", tolerance::RECONSTRUCTION, field(&res, 0));
        r.at_most("f inverse round trip", 1e-8, field(&res, 1));
        r.at_most("tau' square commutes", tolerance::RECONSTRUCTION, field(&res, 2));
        r.at_most("mixed planes give kappa(y,theta)", tolerance::EXACT, field(&res, 3));
        let v = gaussian_vector(&mut case_rng(seed, 11 << 32), n);
        let base = WarpedPoint::new(2.0, v.normalize()).and_then(|w| f_map(&w)).map(|p| (distance_from_i(&p) - LN_2).abs());
        r.at_most("distance of f(2,u) from i is ln 2", tolerance::EXACT, [base]);
    })
}
