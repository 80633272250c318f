//! Dormand-Prince 5(4) integrator with cubic Hermite dense output.

use nalgebra::DVector;

use crate::error::Result;

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Smallest admissible step relative to `max(1, |t|)`.
    pub min_step: f64,
    pub max_steps: usize,
}

impl OdeOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self { rtol: tol, atol: tol, min_step: 1e-13, max_steps: 200_000 }
    }
}

/// Accepted steps of a solution, with derivatives for Hermite interpolation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DenseSolution {
    pub t: Vec<f64>,
    pub y: Vec<DVector<f64>>,
    pub dy: Vec<DVector<f64>>,
}

impl DenseSolution {
    pub fn len(&self) -> usize {
        self.t.len()
    }

    pub fn is_empty(&self) -> bool {
        self.t.is_empty()
    }

    pub fn t_start(&self) -> f64 {
        self.t[0]
    }

    pub fn t_end(&self) -> f64 {
        self.t[self.t.len() - 1]
    }

    /// Hermite interpolant at `t`, clamped to the covered interval.
    pub fn eval(&self, t: f64) -> DVector<f64> {
        let last = self.t.len() - 1;
        if last == 0 {
            return self.y[0].clone();
        }
        let forward = self.t[last] >= self.t[0];
        let key = |s: f64| if forward { s } else { -s };
        let tk = key(t);
        if tk <= key(self.t[0]) {
            return self.y[0].clone();
        }
        if tk >= key(self.t[last]) {
            return self.y[last].clone();
        }
        let i = self.t.partition_point(|&s| key(s) <= tk).saturating_sub(1).min(last - 1);
        let (t0, t1) = (self.t[i], self.t[i + 1]);
        let h = t1 - t0;
        let s = (t - t0) / h;
        let s2 = s * s;
        let s3 = s2 * s;
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        &self.y[i] * h00 + &self.dy[i] * (h10 * h) + &self.y[i + 1] * h01 + &self.dy[i + 1] * (h11 * h)
    }
}

/// Integration stopped before reaching the end time.
#[derive(Debug, Clone, thiserror::Error)]
#[error("integration failed at t = {t_reached:e}: {reason}")]
pub struct IntegrationFailure {
    pub reason: String,
    pub t_reached: f64,
    pub partial: DenseSolution,
}

fn error_norm(err: &DVector<f64>, y0: &DVector<f64>, y1: &DVector<f64>, opts: &OdeOptions) -> f64 {
    let dim = err.len().max(1) as f64;
    let sum: f64 = (0..err.len())
        .map(|i| {
            let scale = opts.atol + opts.rtol * y0[i].abs().max(y1[i].abs());
            (err[i] / scale).powi(2)
        })
        .sum();
    (sum / dim).sqrt()
}

/// Integrates `y' = f(t, y)` from `t0` to `t_end` (either direction).
///
/// A right-hand side error inside a step is handled like a rejected step, so
/// an integration approaching a boundary of the domain shrinks its step until
/// it underflows and then reports the trajectory computed so far.
pub fn dopri5<F>(
    mut f: F,
    t0: f64,
    y0: DVector<f64>,
    t_end: f64,
    opts: &OdeOptions,
) -> std::result::Result<DenseSolution, IntegrationFailure>
where
    F: FnMut(f64, &DVector<f64>) -> Result<DVector<f64>>,
{
    let fail = |reason: String, sol: DenseSolution| IntegrationFailure {
        t_reached: sol.t.last().copied().unwrap_or(t0),
        reason,
        partial: sol,
    };
    let mut sol = DenseSolution::default();
    let f0 = match f(t0, &y0) {
        Ok(d) => d,
        Err(e) => return Err(fail(format!("right-hand side at start: {e}"), sol)),
    };
    sol.t.push(t0);
    sol.y.push(y0.clone());
    sol.dy.push(f0.clone());
    if t_end == t0 {
        return Ok(sol);
    }
    let dir = (t_end - t0).signum();
    let span = (t_end - t0).abs();

    // Starting step from the size of the first derivative.
    let scale0 = |v: &DVector<f64>| {
        let dim = v.len().max(1) as f64;
        ((0..v.len()).map(|i| (v[i] / (opts.atol + opts.rtol * y0[i].abs())).powi(2)).sum::<f64>() / dim).sqrt()
    };
    let d0 = scale0(&y0);
    let d1 = scale0(&f0);
    let mut h = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    h = h.min(span);

    let (mut t, mut y, mut k1) = (t0, y0, f0);
    let mut steps = 0usize;
    while (t_end - t) * dir > 0.0 {
        steps += 1;
        if steps > opts.max_steps {
            return Err(fail(format!("more than {} steps", opts.max_steps), sol));
        }
        let h_floor = opts.min_step * t.abs().max(1.0);
        if h < h_floor {
            return Err(fail(format!("step size underflow ({h:e})"), sol));
        }
        let last = h >= (t_end - t).abs();
        let hs = if last { t_end - t } else { dir * h };

        let mut k: Vec<DVector<f64>> = Vec::with_capacity(7);
        k.push(k1.clone());
        let mut stage_error = None;
        for s in 1..7 {
            let mut ys = y.clone();
            for (j, kj) in k.iter().enumerate() {
                if A[s][j] != 0.0 {
                    ys.axpy(hs * A[s][j], kj, 1.0);
                }
            }
            match f(t + C[s] * hs, &ys) {
                Ok(d) if d.iter().all(|v| v.is_finite()) => k.push(d),
                Ok(_) => {
                    stage_error = Some("non-finite derivative".to_string());
                    break;
                }
                Err(e) => {
                    stage_error = Some(e.to_string());
                    break;
                }
            }
        }
        if stage_error.is_some() {
            h *= 0.25;
            continue;
        }
        let mut y_new = y.clone();
        for j in 0..6 {
            if A[6][j] != 0.0 {
                y_new.axpy(hs * A[6][j], &k[j], 1.0);
            }
        }
        let mut err = DVector::zeros(y.len());
        for j in 0..7 {
            if E[j] != 0.0 {
                err.axpy(hs * E[j], &k[j], 1.0);
            }
        }
        let en = error_norm(&err, &y, &y_new, opts);
        if !en.is_finite() {
            h *= 0.25;
            continue;
        }
        let factor = if en == 0.0 { 5.0 } else { (0.9 * en.powf(-0.2)).clamp(0.2, 5.0) };
        if en <= 1.0 {
            t = if last { t_end } else { t + hs };
            y = y_new;
            k1 = k.swap_remove(6);
            sol.t.push(t);
            sol.y.push(y.clone());
            sol.dy.push(k1.clone());
            h = (h * factor).min(span);
        } else {
            h *= factor.min(1.0);
        }
    }
    Ok(sol)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn scalar(v: f64) -> DVector<f64> {
        DVector::from_element(1, v)
    }

    #[test]
    fn exponential_growth() {
        let opts = OdeOptions::with_tolerance(1e-10);
        let sol = dopri5(|_, y| Ok(y.clone()), 0.0, scalar(1.0), 2.0, &opts).unwrap();
        assert_eq!(sol.t_end(), 2.0);
        assert!((sol.y.last().unwrap()[0] - 2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn backward_in_time() {
        let opts = OdeOptions::with_tolerance(1e-10);
        let sol = dopri5(|_, y| Ok(-y), 0.0, scalar(1.0), -1.0, &opts).unwrap();
        assert!((sol.y.last().unwrap()[0] - 1f64.exp()).abs() < 1e-8);
        assert!((sol.eval(-0.5)[0] - 0.5f64.exp()).abs() < 1e-6);
    }

    #[test]
    fn harmonic_oscillator_dense_output() {
        let opts = OdeOptions::with_tolerance(1e-11);
        let rhs = |_: f64, y: &DVector<f64>| Ok(DVector::from_vec(vec![y[1], -y[0]]));
        let y0 = DVector::from_vec(vec![0.0, 1.0]);
        let sol = dopri5(rhs, 0.0, y0, 10.0, &opts).unwrap();
        for i in 0..=100 {
            let t = 0.1 * i as f64;
            assert!((sol.eval(t)[0] - t.sin()).abs() < 1e-6, "t = {t}");
        }
    }

    #[test]
    fn zero_span_returns_initial_state() {
        let opts = OdeOptions::with_tolerance(1e-8);
        let sol = dopri5(|_, y| Ok(y.clone()), 1.0, scalar(3.0), 1.0, &opts).unwrap();
        assert_eq!(sol.len(), 1);
        assert_eq!(sol.eval(1.0)[0], 3.0);
    }

    #[test]
    fn blow_up_reports_partial_solution() {
        // y' = y^2 with y(0) = 1 blows up at t = 1.
        let opts = OdeOptions::with_tolerance(1e-8);
        let rhs = |_: f64, y: &DVector<f64>| {
            if y[0] > 1e12 {
                Err(crate::GeomError::Domain("overflow".into()))
            } else {
                Ok(scalar(y[0] * y[0]))
            }
        };
        let failure = dopri5(rhs, 0.0, scalar(1.0), 2.0, &opts).unwrap_err();
        assert!((failure.t_reached - 1.0).abs() < 1e-3, "{failure}");
        assert!(failure.partial.len() > 10);
    }
}
