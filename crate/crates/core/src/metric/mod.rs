//! Riemannian metrics on the chart `R^{n-1} x R^+`.
//!
//! The quotient metric of `K\G` is built at group level: at `phi(p)` the
//! left-invariant orthonormal frame `{phi(p) E_ij}` is split into the
//! vertical part spanned by the l(K)-orbit directions `E phi(p)`, `E in k`,
//! and its orthogonal complement. A basis of the complement is
//! orthonormalized and pushed down to the chart through
//! `T(G) = T(NA) + k phi(p)`, which gives an orthonormal frame `W` and the
//! metric `G = (W W^T)^{-1}`.

mod closed;
mod curvature;

pub use closed::{
    axis_radial_curvature, axis_tangent_curvature, axis_tangent_curvature_variant, kappa2_closed,
    kappa_n_closed, kappa_n_closed_variant,
};
pub use curvature::{
    christoffel, default_step, riemann, sectional_numeric, Christoffel, RiemannTensor,
};

use nalgebra::{DMatrix, DVector};

use crate::chart::{phi, r_action, r_action_differential, ChartPoint};
use crate::error::{GeomError, Result};
use crate::lie::{algebra_coordinates, check_rank, iwasawa_basis, GroupElement, IwasawaBasis};

/// Tangent vector in chart coordinates `(dx_1, ..., dx_{n-1}, dy)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentVector {
    pub base: ChartPoint,
    pub components: DVector<f64>,
}

impl TangentVector {
    pub fn new(base: ChartPoint, components: DVector<f64>) -> Result<Self> {
        if components.len() != base.rank() {
            return Err(GeomError::Argument(format!(
                "tangent vector has {} components at a rank-{} point",
                components.len(),
                base.rank()
            )));
        }
        if components.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::Domain("non-finite tangent vector".into()));
        }
        Ok(Self { base, components })
    }
}

/// Metric tensor at a point together with an orthonormal frame for it.
#[derive(Debug, Clone)]
pub struct MetricSample {
    pub base: ChartPoint,
    /// Symmetric positive definite `n x n` matrix.
    pub g: DMatrix<f64>,
    /// Columns are the frame vectors; `frame^T g frame = I`.
    pub frame: DMatrix<f64>,
}

impl MetricSample {
    /// Assembles `G = (W W^T)^{-1}` from an orthonormal frame `W`.
    pub fn from_frame(base: ChartPoint, frame: DMatrix<f64>) -> Result<Self> {
        let inv = frame
            .clone()
            .try_inverse()
            .ok_or_else(|| GeomError::Numeric(format!("singular frame at {base:?}")))?;
        let g = inv.transpose() * inv;
        let g = (&g + g.transpose()) * 0.5;
        Ok(Self { base, g, frame })
    }

    pub fn frame_vectors(&self) -> Vec<TangentVector> {
        self.frame
            .column_iter()
            .map(|c| TangentVector { base: self.base.clone(), components: c.into_owned() })
            .collect()
    }

    /// `max |W^T G W - I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let n = self.g.nrows();
        let gram = self.frame.transpose() * &self.g * &self.frame;
        (gram - DMatrix::identity(n, n)).iter().fold(0.0, |a: f64, v| a.max(v.abs()))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.g.clone().symmetric_eigenvalues().min()
    }
}

/// A Riemannian metric expressed in the upper half-space chart.
pub trait Metric: Sync {
    fn rank(&self) -> usize;

    fn tensor(&self, p: &ChartPoint) -> Result<DMatrix<f64>>;

    fn inner(&self, p: &ChartPoint, u: &DVector<f64>, v: &DVector<f64>) -> Result<f64> {
        Ok((u.transpose() * self.tensor(p)? * v)[(0, 0)])
    }

    fn norm(&self, p: &ChartPoint, v: &DVector<f64>) -> Result<f64> {
        Ok(self.inner(p, v, v)?.sqrt())
    }
}

/// Left-invariant coordinates `phi^{-1} d(phi)` of the chart derivatives:
/// `d/dx_i phi = N_i phi` and `d/dy phi = phi A_1 / y`.
fn chart_derivatives(basis: &IwasawaBasis, p: &ChartPoint, phi_p: &DMatrix<f64>, phi_inv: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.n;
    let mut d = DMatrix::zeros(n * (n + 1) / 2, n);
    for (i, ni) in basis.nilpotent.iter().enumerate() {
        let ad = phi_inv * ni.matrix() * phi_p;
        d.set_column(i, &algebra_coordinates(&ad, n));
    }
    d.set_column(n - 1, &(basis.abelian.coefficients() / p.y()));
    d
}

/// Left-invariant coordinates `phi^{-1} E phi` of the vertical directions.
fn vertical_coordinates(basis: &IwasawaBasis, phi_p: &DMatrix<f64>, phi_inv: &DMatrix<f64>) -> DMatrix<f64> {
    let n = basis.n;
    let cols: Vec<DVector<f64>> = basis
        .compact
        .iter()
        .map(|e| algebra_coordinates(&(phi_inv * e.matrix() * phi_p), n))
        .collect();
    DMatrix::from_columns(&cols)
}

/// Tangent matrices `E phi(p)`, `E` ranging over the `so(n)` basis: the
/// vertical space of the left K-action at `phi(p)`.
pub fn vertical_basis(p: &ChartPoint) -> Result<Vec<DMatrix<f64>>> {
    let basis = iwasawa_basis(p.rank())?;
    let phi_p = phi(p);
    Ok(basis.compact.iter().map(|e| e.matrix() * phi_p.matrix()).collect())
}

fn horizontal_frame_with(basis: &IwasawaBasis, p: &ChartPoint) -> Result<MetricSample> {
    let n = basis.n;
    if p.rank() != n {
        return Err(GeomError::Argument(format!("rank-{} point for a rank-{n} metric", p.rank())));
    }
    let phi_p = phi(p);
    let phi_inv = phi(&p.chart_inverse());
    let d = chart_derivatives(basis, p, phi_p.matrix(), phi_inv.matrix());
    let v = vertical_coordinates(basis, phi_p.matrix(), phi_inv.matrix());

    // Orthonormal basis of the horizontal space: project the chart
    // derivatives off the vertical span, then Gram-Schmidt them.
    let qv = v.clone().qr().q();
    let projected = &d - &qv * (qv.transpose() * &d);
    let horizontal = projected.qr().q();

    // Push each horizontal vector down: h = D w + V c, keep w.
    let m = v.ncols();
    let mut system = DMatrix::zeros(n + m, n + m);
    system.view_mut((0, 0), (n + m, n)).copy_from(&d);
    system.view_mut((0, n), (n + m, m)).copy_from(&v);
    let solution = system
        .lu()
        .solve(&horizontal)
        .ok_or_else(|| GeomError::Numeric(format!("degenerate horizontal projection at {p:?}")))?;
    let frame = solution.rows(0, n).into_owned();
    MetricSample::from_frame(p.clone(), frame)
}

/// Orthonormal frame and metric of the quotient `K\G` at `p`.
pub fn horizontal_frame(p: &ChartPoint) -> Result<MetricSample> {
    horizontal_frame_with(&iwasawa_basis(p.rank())?, p)
}

/// Canonical entry point for the quotient metric; see [`horizontal_frame`].
pub fn metric_matrix(p: &ChartPoint) -> Result<MetricSample> {
    horizontal_frame(p)
}

/// The explicit n = 2 orthonormal frame
///
/// ```text
/// w1 = -sqrt((x^2+1)^2 + y^4)/(sqrt(2) y) d/dx - sqrt(2) x (x^2+1)/sqrt((x^2+1)^2 + y^4) d/dy
/// w2 = y sqrt(2 x^2 y^2 / ((x^2+1)^2 + y^4) + 1) d/dy
/// ```
pub fn closed_frame_2d(p: &ChartPoint) -> Result<MetricSample> {
    if p.rank() != 2 {
        return Err(GeomError::Argument("closed frame exists for n = 2 only".into()));
    }
    let (x, y) = (p.x()[0], p.y());
    let s = (x * x + 1.0).powi(2) + y.powi(4);
    let rs = s.sqrt();
    let sqrt2 = std::f64::consts::SQRT_2;
    let frame = DMatrix::from_row_slice(
        2,
        2,
        &[
            -rs / (sqrt2 * y),
            0.0,
            -sqrt2 * x * (x * x + 1.0) / rs,
            y * (2.0 * x * x * y * y / s + 1.0).sqrt(),
        ],
    );
    MetricSample::from_frame(p.clone(), frame)
}

/// Hyperbolic metric `y^{-2} I` of `G/K` in the same chart, frame `y I`.
pub fn hyperbolic_metric(p: &ChartPoint) -> MetricSample {
    let n = p.rank();
    MetricSample {
        base: p.clone(),
        g: DMatrix::identity(n, n) / (p.y() * p.y()),
        frame: DMatrix::identity(n, n) * p.y(),
    }
}

/// Quotient metric of `K\G` (group construction).
#[derive(Debug, Clone)]
pub struct QuotientMetric {
    basis: IwasawaBasis,
}

impl QuotientMetric {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { basis: iwasawa_basis(n)? })
    }

    pub fn sample(&self, p: &ChartPoint) -> Result<MetricSample> {
        horizontal_frame_with(&self.basis, p)
    }
}

impl Metric for QuotientMetric {
    fn rank(&self) -> usize {
        self.basis.n
    }

    fn tensor(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        Ok(self.sample(p)?.g)
    }
}

/// `max |(dr W)^T G(r(k) p) (dr W) - I|` for the orthonormal frame `W` at
/// `p`: zero when r(k) is an isometry.
pub fn r_isometry_defect(metric: &QuotientMetric, k: &GroupElement, p: &ChartPoint) -> Result<f64> {
    let sample = metric.sample(p)?;
    let pushed = r_action_differential(k, p)? * &sample.frame;
    let g = metric.tensor(&r_action(k, p)?)?;
    let n = p.rank();
    Ok((pushed.transpose() * g * pushed - DMatrix::identity(n, n)).amax())
}

/// Metric assembled from the explicit n = 2 frame.
#[derive(Debug, Clone, Copy, Default)]
pub struct ClosedFrameMetric;

impl Metric for ClosedFrameMetric {
    fn rank(&self) -> usize {
        2
    }

    fn tensor(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        Ok(closed_frame_2d(p)?.g)
    }
}

/// `y^{-2} I`.
#[derive(Debug, Clone, Copy)]
pub struct HyperbolicMetric {
    n: usize,
}

impl HyperbolicMetric {
    pub fn new(n: usize) -> Result<Self> {
        check_rank(n)?;
        Ok(Self { n })
    }
}

impl Metric for HyperbolicMetric {
    fn rank(&self) -> usize {
        self.n
    }

    fn tensor(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        Ok(hyperbolic_metric(p).g)
    }
}

/// Quotient metric of the right quotient `G/K`, built at group level: the
/// right K-orbit directions are `phi(p) E`, whose left-invariant coordinates
/// are the constant `k` coordinates, so the horizontal projection zeroes the
/// `E_ij`, `j <= n`, components.
#[derive(Debug, Clone)]
pub struct RightQuotientMetric {
    basis: IwasawaBasis,
}

impl RightQuotientMetric {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { basis: iwasawa_basis(n)? })
    }
}

impl Metric for RightQuotientMetric {
    fn rank(&self) -> usize {
        self.basis.n
    }

    fn tensor(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        let phi_p = phi(p);
        let phi_inv = phi(&p.chart_inverse());
        let mut d = chart_derivatives(&self.basis, p, phi_p.matrix(), phi_inv.matrix());
        for e in &self.basis.compact {
            let coords = e.coefficients();
            let idx = coords.iamax();
            d.row_mut(idx).fill(0.0);
        }
        Ok(d.transpose() * d)
    }
}

/// Left-invariant metric of the subgroup NA with the ambient inner product
/// restricted to it (orthonormal basis `{N_i / sqrt 2, A_1}` at the identity).
#[derive(Debug, Clone)]
pub struct NaSubgroupMetric {
    basis: IwasawaBasis,
}

impl NaSubgroupMetric {
    pub fn new(n: usize) -> Result<Self> {
        Ok(Self { basis: iwasawa_basis(n)? })
    }
}

impl Metric for NaSubgroupMetric {
    fn rank(&self) -> usize {
        self.basis.n
    }

    fn tensor(&self, p: &ChartPoint) -> Result<DMatrix<f64>> {
        let phi_p = phi(p);
        let phi_inv = phi(&p.chart_inverse());
        let d = chart_derivatives(&self.basis, p, phi_p.matrix(), phi_inv.matrix());
        Ok(d.transpose() * d)
    }
}
