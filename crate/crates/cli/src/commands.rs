//! Data behind the `hquot` subcommands, as in-memory tables.

use std::f64::consts::{PI, TAU};

use nalgebra::DVector;
use rayon::prelude::*;

use hquot::chart::{circle_residual, compact_rotation, l_action, orbit_circle, r_action, tau, ChartPoint};
use hquot::geodesic::{hyperbola_alpha, hyperbola_residual, integrate, GeodesicState, IntegrateError, Trajectory};
use hquot::metric::{kappa2_closed, kappa_n_closed, sectional_numeric, Metric, QuotientMetric};
use hquot::GeomError;

use crate::output::Cell;
use crate::range::Range;
use crate::report::SuiteReport;
use crate::suites::axis_plane_curvature;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CommandError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Geometry(#[from] GeomError),
}

impl CommandError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Usage(_) => 2,
            CommandError::Geometry(_) => 3,
        }
    }
}

fn usage(msg: impl Into<String>) -> CommandError {
    CommandError::Usage(msg.into())
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    fn new<S: AsRef<str>>(columns: &[S]) -> Self {
        Self { columns: columns.iter().map(|c| c.as_ref().to_string()).collect(), rows: Vec::new() }
    }

    /// Float column `name` as a vector; panics on a missing column.
    pub fn column(&self, name: &str) -> Vec<f64> {
        let j = self.columns.iter().position(|c| c == name).unwrap_or_else(|| panic!("no column {name}"));
        self.rows
            .iter()
            .map(|r| match &r[j] {
                Cell::Float(v) => *v,
                Cell::Int(v) => *v as f64,
                Cell::Text(_) => f64::NAN,
            })
            .collect()
    }
}

fn coordinate_names(prefix: &str, n: usize) -> Vec<String> {
    if n == 2 {
        vec![format!("{prefix}x"), format!("{prefix}y")]
    } else {
        (1..n).map(|i| format!("{prefix}x{i}")).chain([format!("{prefix}y")]).collect()
    }
}

fn coordinate_cells(p: &ChartPoint) -> Vec<Cell> {
    p.x().iter().copied().chain([p.y()]).map(Cell::Float).collect()
}

/// Parses `x1,...,x_{n-1},y`.
pub fn parse_point(s: &str) -> Result<ChartPoint, CommandError> {
    let coords: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("'{t}' is not a number"))))
        .collect::<Result<_, _>>()?;
    if coords.len() < 2 {
        return Err(usage(format!("point '{s}' needs at least two coordinates")));
    }
    ChartPoint::from_coords(&coords).map_err(|e| usage(e.to_string()))
}

/// Parses a comma-separated vector.
pub fn parse_vector(s: &str) -> Result<DVector<f64>, CommandError> {
    let v: Vec<f64> = s
        .split(',')
        .map(|t| t.trim().parse::<f64>().map_err(|_| usage(format!("'{t}' is not a number"))))
        .collect::<Result<_, _>>()?;
    Ok(DVector::from_vec(v))
}

/// One row per check of every report.
pub fn verify_table(reports: &[SuiteReport]) -> Table {
    let mut t = Table::new(&SuiteReport::COLUMNS);
    t.rows = reports.iter().flat_map(SuiteReport::rows).collect();
    t
}

/// Closed-form and numeric curvature on a grid.
///
/// For `n = 2` the grid is `x` by `y` with the plane of the chart. For
/// `n >= 3` it is `y` by `theta` on the axis `x = 0`, for the plane at angle
/// `theta` from the y-axis; the `x` range is not used.
pub fn curvature_table(n: usize, xs: &Range, ys: &Range, thetas: &Range) -> Result<Table, CommandError> {
    let metric = QuotientMetric::new(n).map_err(|e| usage(e.to_string()))?;
    if ys.min() <= 0.0 {
        return Err(usage("y range must be positive"));
    }
    let (columns, grid): (Vec<&str>, Vec<(f64, f64)>) = if n == 2 {
        let ys = ys.values();
        (
            vec!["x", "y", "kappa_closed", "kappa_numeric", "abs_delta"],
            xs.values().into_iter().flat_map(|x| ys.iter().map(move |&y| (x, y))).collect(),
        )
    } else {
        let th = thetas.values();
        (
            vec!["y", "theta", "kappa_closed", "kappa_numeric", "abs_delta"],
            ys.values().into_iter().flat_map(|y| th.iter().map(move |&t| (y, t))).collect(),
        )
    };
    let rows: Vec<Result<Vec<Cell>, GeomError>> = grid
        .par_iter()
        .map(|&(a, b)| {
            let (closed, numeric) = if n == 2 {
                let p = ChartPoint::new(vec![a], b)?;
                let e1 = DVector::from_vec(vec![1.0, 0.0]);
                let e2 = DVector::from_vec(vec![0.0, 1.0]);
                (kappa2_closed(a, b), sectional_numeric(&metric, &p, &e1, &e2)?)
            } else {
                (kappa_n_closed(a, b), axis_plane_curvature(&metric, a, b)?)
            };
            Ok(vec![a.into(), b.into(), closed.into(), numeric.into(), (closed - numeric).abs().into()])
        })
        .collect();
    let mut t = Table::new(&columns);
    t.rows = rows.into_iter().collect::<Result<_, _>>()?;
    Ok(t)
}

#[derive(Debug, Clone)]
pub struct GeodesicRequest {
    pub n: usize,
    pub start: Option<ChartPoint>,
    pub direction: Option<DVector<f64>>,
    pub t_total: f64,
    pub tol: f64,
    pub samples: usize,
}

#[derive(Debug, Clone)]
pub struct GeodesicTrace {
    pub table: Table,
    pub speed_drift: f64,
    /// Set when the integration stopped early; the table then holds the
    /// part computed before the failure.
    pub failure: Option<String>,
}

/// Unit-speed geodesic of the quotient metric sampled at `samples + 1`
/// uniform times. Starting at `i`, a `hyperbola_residual` column measures
/// the distance from the hyperbola predicted by the initial direction.
pub fn geodesic_trace(req: &GeodesicRequest) -> Result<GeodesicTrace, CommandError> {
    let n = req.n;
    let metric = QuotientMetric::new(n).map_err(|e| usage(e.to_string()))?;
    let start = req.start.clone().unwrap_or_else(|| ChartPoint::origin(n));
    if start.rank() != n {
        return Err(usage(format!("start has rank {}, expected {n}", start.rank())));
    }
    let mut dir = req.direction.clone().unwrap_or_else(|| {
        let mut v = DVector::zeros(n);
        v[n - 1] = 1.0;
        v
    });
    if dir.len() != n {
        return Err(usage(format!("direction has {} components, expected {n}", dir.len())));
    }
    let speed = metric.norm(&start, &dir)?;
    if !(speed > 0.0 && speed.is_finite()) {
        return Err(usage("direction must be a non-zero finite vector"));
    }
    if !(req.t_total >= 0.0 && req.t_total.is_finite()) {
        return Err(usage("integration time must be finite and non-negative"));
    }
    if !(1e-12..=1e-6).contains(&req.tol) {
        return Err(usage(format!("tolerance {:e} outside [1e-12, 1e-6]", req.tol)));
    }
    dir /= speed;
    let s0 = GeodesicState::new(start.clone(), dir.clone())?;

    let at_i = start.distance_max(&ChartPoint::origin(n)) == 0.0;
    let plane = at_i.then(|| {
        let lateral = dir.rows(0, n - 1).into_owned();
        let w = lateral.norm();
        (if w > 0.0 { lateral / w } else { DVector::zeros(n - 1) }, hyperbola_alpha((w, dir[n - 1])), w)
    });

    let mut columns = vec!["t".to_string()];
    columns.extend(coordinate_names("", n));
    columns.push("speed".into());
    if plane.is_some() {
        columns.push("hyperbola_residual".into());
    }

    let (traj, failure): (Trajectory, Option<String>) = match integrate(&metric, &s0, req.t_total, req.tol) {
        Ok(t) => (t, None),
        Err(IntegrateError::Failed { reason, t_reached, partial }) => {
            (partial, Some(format!("integration failed at t = {t_reached:e}: {reason}")))
        }
        Err(IntegrateError::Invalid(e)) => return Err(e.into()),
    };
    let states = if traj.step_times().len() == 1 {
        vec![(0.0, traj.sample(0.0)?)]
    } else {
        traj.uniform(req.samples.max(1))?
    };
    let mut table = Table::new(&columns);
    for (t, s) in &states {
        let mut row: Vec<Cell> = vec![(*t).into()];
        row.extend(coordinate_cells(&s.position));
        row.push(s.speed(&metric)?.into());
        if let Some((axis, alpha, w)) = &plane {
            let x = DVector::from_column_slice(s.position.x());
            let res = if *w == 0.0 {
                x.norm()
            } else {
                let xi = x.dot(axis);
                hyperbola_residual(*alpha, xi, s.position.y()).abs().max((x - axis * xi).norm())
            };
            row.push(res.into());
        }
        table.rows.push(row);
    }
    let speed_drift = traj.speed_drift(&metric)?;
    Ok(GeodesicTrace { table, speed_drift, failure })
}

/// Samples of the r(K)-orbit of `p` along the rotation in the `(x_1, y)`
/// plane, with the orbit-circle residual, the tau image and the images
/// `R = r(pi/7) P` and `L = l(pi/7) P` of each sample `P`.
pub fn orbit_trace(p: &ChartPoint, samples: usize) -> Result<Table, CommandError> {
    if samples == 0 {
        return Err(usage("samples must be at least 1"));
    }
    let n = p.rank();
    let (center, radius) = orbit_circle(p);
    let seventh = compact_rotation(n, 1, n, PI / 7.0)?;
    let mut columns = vec!["angle".to_string()];
    columns.extend(coordinate_names("", n));
    columns.push("circle_residual".into());
    for prefix in ["tau_", "r_", "l_"] {
        columns.extend(coordinate_names(prefix, n));
    }
    let rows: Vec<Result<Vec<Cell>, GeomError>> = (0..samples)
        .into_par_iter()
        .map(|j| {
            let angle = TAU * j as f64 / samples as f64;
            let q = r_action(&compact_rotation(n, 1, n, angle)?, p)?;
            let mut row: Vec<Cell> = vec![angle.into()];
            row.extend(coordinate_cells(&q));
            row.push(circle_residual(&q, center, radius).into());
            row.extend(coordinate_cells(&tau(&q)));
            row.extend(coordinate_cells(&r_action(&seventh, &q)?));
            row.extend(coordinate_cells(&l_action(&seventh, &q)?));
            Ok(row)
        })
        .collect();
    let mut t = Table::new(&columns);
    t.rows = rows.into_iter().collect::<Result<_, _>>()?;
    Ok(t)
}
