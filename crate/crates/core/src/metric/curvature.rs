//! Levi-Civita connection and curvature of a chart metric by finite
//! differences.
//!
//! First derivatives use central differences with one Richardson level,
//! `(4 D(h/2) - D(h)) / 3`, which is fourth order in `h`. The curvature
//! tensor differentiates the Christoffel symbols with the same stencil, so a
//! curvature evaluation samples the metric at distance up to `2h` from `p`.

use nalgebra::{DMatrix, DVector};

use super::Metric;
use crate::chart::ChartPoint;
use crate::error::{GeomError, Result};

/// Base step `1e-2 * y`. Roundoff in the group-built metric dominates
/// below roughly `1e-3 * y`, truncation above roughly `5e-2 * y`.
pub fn default_step(p: &ChartPoint) -> f64 {
    1e-2 * p.y()
}

fn check_step(p: &ChartPoint, h: f64, reach: f64) -> Result<()> {
    if h > 0.0 && p.y() - reach * h <= 0.0 {
        return Err(GeomError::Step { step: h, y: p.y() });
    }
    // Bounded relative to the lowest point of the stencil, so that nested
    // stencils (the curvature tensor differentiates Christoffel symbols)
    // stay admissible.
    if !(h > 0.0 && h <= 0.05 * (p.y() - reach * h)) {
        return Err(GeomError::Argument(format!(
            "finite-difference step {h:e} too large at y = {:e}",
            p.y()
        )));
    }
    Ok(())
}

/// Richardson-extrapolated central difference of `f` along coordinate `axis`.
fn richardson<T, F>(p: &ChartPoint, axis: usize, h: f64, f: F) -> Result<T>
where
    T: Combine,
    F: Fn(&ChartPoint) -> Result<T>,
{
    let central = |step: f64| -> Result<T> {
        let plus = f(&p.shifted(axis, step)?)?;
        let minus = f(&p.shifted(axis, -step)?)?;
        Ok(plus.lin(1.0 / (2.0 * step), &minus, -1.0 / (2.0 * step)))
    };
    let coarse = central(h)?;
    let fine = central(h / 2.0)?;
    Ok(fine.lin(4.0 / 3.0, &coarse, -1.0 / 3.0))
}

trait Combine: Sized {
    /// `a * self + b * other`
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self;
}

impl Combine for DMatrix<f64> {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        self * a + other * b
    }
}

/// Christoffel symbols of the second kind, `gamma[k][i][j]`.
#[derive(Debug, Clone)]
pub struct Christoffel {
    n: usize,
    data: Vec<f64>,
}

impl Combine for Christoffel {
    fn lin(&self, a: f64, other: &Self, b: f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().zip(&other.data).map(|(x, y)| a * x + b * y).collect(),
        }
    }
}

impl Christoffel {
    pub fn rank(&self) -> usize {
        self.n
    }

    /// `Gamma^k_{ij}`.
    pub fn get(&self, k: usize, i: usize, j: usize) -> f64 {
        self.data[(k * self.n + i) * self.n + j]
    }

    /// `max |Gamma^k_ij - Gamma^k_ji|`.
    pub fn symmetry_defect(&self) -> f64 {
        let n = self.n;
        let mut worst = 0.0_f64;
        for k in 0..n {
            for i in 0..n {
                for j in 0..i {
                    worst = worst.max((self.get(k, i, j) - self.get(k, j, i)).abs());
                }
            }
        }
        worst
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.is_finite())
    }

    /// `-Gamma^k_{ij} v^i v^j`: the geodesic acceleration.
    pub fn acceleration(&self, v: &DVector<f64>) -> DVector<f64> {
        let n = self.n;
        DVector::from_fn(n, |k, _| {
            let mut acc = 0.0;
            for i in 0..n {
                for j in 0..n {
                    acc -= self.get(k, i, j) * v[i] * v[j];
                }
            }
            acc
        })
    }
}

/// `Gamma^k_ij = 1/2 G^{kl} (d_i G_jl + d_j G_il - d_l G_ij)`.
pub fn christoffel<M: Metric + ?Sized>(metric: &M, p: &ChartPoint, h: f64) -> Result<Christoffel> {
    check_step(p, h, 1.0)?;
    let n = p.rank();
    let g = metric.tensor(p)?;
    let g_inv = g
        .cholesky()
        .ok_or_else(|| GeomError::Numeric(format!("metric not positive definite at {p:?}")))?
        .inverse();
    let dg: Vec<DMatrix<f64>> = (0..n)
        .map(|axis| richardson(p, axis, h, |q| metric.tensor(q)))
        .collect::<Result<_>>()?;
    let mut data = vec![0.0; n * n * n];
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let mut s = 0.0;
                for l in 0..n {
                    s += g_inv[(k, l)] * (dg[i][(j, l)] + dg[j][(i, l)] - dg[l][(i, j)]);
                }
                data[(k * n + i) * n + j] = 0.5 * s;
            }
        }
    }
    Ok(Christoffel { n, data })
}

/// Fully covariant curvature tensor `R_{ijkm} = <R(d_i, d_j) d_k, d_m>` with
/// `R(X,Y)Z = nabla_X nabla_Y Z - nabla_Y nabla_X Z - nabla_[X,Y] Z`.
#[derive(Debug, Clone)]
pub struct RiemannTensor {
    n: usize,
    g: DMatrix<f64>,
    data: Vec<f64>,
}

impl RiemannTensor {
    pub fn rank(&self) -> usize {
        self.n
    }

    /// Metric at the base point.
    pub fn metric(&self) -> &DMatrix<f64> {
        &self.g
    }

    pub fn get(&self, i: usize, j: usize, k: usize, m: usize) -> f64 {
        let n = self.n;
        self.data[((i * n + j) * n + k) * n + m]
    }

    /// `<R(u,v)v, u>`.
    pub fn curvature_form(&self, u: &DVector<f64>, v: &DVector<f64>) -> f64 {
        let n = self.n;
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                let uv = u[i] * v[j];
                if uv == 0.0 {
                    continue;
                }
                for k in 0..n {
                    for m in 0..n {
                        s += uv * v[k] * u[m] * self.get(i, j, k, m);
                    }
                }
            }
        }
        s
    }

    /// Sectional curvature of `span{u, v}`.
    pub fn sectional(&self, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        let uu = u.dot(&(&self.g * u));
        let vv = v.dot(&(&self.g * v));
        let uv = u.dot(&(&self.g * v));
        let area_sq = uu * vv - uv * uv;
        if area_sq.is_nan() || area_sq <= 1e-16 * uu * vv {
            return Err(GeomError::DegeneratePlane { area: area_sq.max(0.0).sqrt() });
        }
        Ok(self.curvature_form(u, v) / area_sq)
    }
}

/// Curvature tensor at `p`. Christoffel symbols are evaluated with step `h`
/// and differentiated with the same step, so `y > 2h` is required.
pub fn riemann<M: Metric + ?Sized>(metric: &M, p: &ChartPoint, h: f64) -> Result<RiemannTensor> {
    check_step(p, h, 2.0)?;
    let n = p.rank();
    let g = metric.tensor(p)?;
    let gamma = christoffel(metric, p, h)?;
    let d_gamma: Vec<Christoffel> = (0..n)
        .map(|axis| richardson(p, axis, h, |q| christoffel(metric, q, h)))
        .collect::<Result<_>>()?;

    // R^l_{ijk} = d_i G^l_jk - d_j G^l_ik + G^l_im G^m_jk - G^l_jm G^m_ik
    let mut upper = vec![0.0; n * n * n * n];
    for l in 0..n {
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    let mut r = d_gamma[i].get(l, j, k) - d_gamma[j].get(l, i, k);
                    for m in 0..n {
                        r += gamma.get(l, i, m) * gamma.get(m, j, k) - gamma.get(l, j, m) * gamma.get(m, i, k);
                    }
                    upper[((l * n + i) * n + j) * n + k] = r;
                }
            }
        }
    }
    let mut data = vec![0.0; n * n * n * n];
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for m in 0..n {
                    data[((i * n + j) * n + k) * n + m] =
                        (0..n).map(|l| g[(m, l)] * upper[((l * n + i) * n + j) * n + k]).sum();
                }
            }
        }
    }
    Ok(RiemannTensor { n, g, data })
}

/// Sectional curvature of `span{u, v}` at `p` from the finite-difference
/// curvature tensor with [`default_step`].
pub fn sectional_numeric<M: Metric + ?Sized>(
    metric: &M,
    p: &ChartPoint,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> Result<f64> {
    riemann(metric, p, default_step(p))?.sectional(u, v)
}
