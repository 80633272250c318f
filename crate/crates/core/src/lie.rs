//! Matrix Lie group kernel for SO0(n,1).
//!
//! Matrices are `(n+1) x (n+1)`, indices in the public API are 1-based to
//! match the usual `E_ij` labelling. The quadratic form is
//! `J = diag(-1, ..., -1, 1)` with `n` minus signs; the Lie algebra consists
//! of `X` with `X^T J + J X = 0` and the group of `M` with `M J M^T = J`,
//! `det M = 1` and `M[n+1, n+1] >= 1`.
//!
//! The algebra carries the inner product in which
//! `E_ij = eps_ij e_ij + e_ji` (`1 <= i < j <= n+1`, `eps_ij = -1` for
//! `j <= n`, `+1` for `j = n+1`) is orthonormal. The Iwasawa pieces are
//! `N_i = E_{i,n} + E_{i,n+1}`, `A_1 = E_{n,n+1}` and `k = so(n) + (0)`.

use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::{DMatrix, DVector};

use crate::chart::{phi, ChartPoint};
use crate::error::{GeomError, Result};
use crate::tolerance;

/// Rejects ranks outside `2..=MAX_RANK`.
pub fn check_rank(n: usize) -> Result<()> {
    if (2..=tolerance::MAX_RANK).contains(&n) {
        Ok(())
    } else {
        Err(GeomError::Argument(format!(
            "rank n = {n} outside supported range 2..={}",
            tolerance::MAX_RANK
        )))
    }
}

/// `J = diag(-1, ..., -1, 1)` of size `n+1`.
pub fn minkowski_form(n: usize) -> DMatrix<f64> {
    DMatrix::from_fn(n + 1, n + 1, |i, j| match (i == j, i == n) {
        (true, true) => 1.0,
        (true, false) => -1.0,
        _ => 0.0,
    })
}

fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

/// Element of so(n,1).
#[derive(Debug, Clone, PartialEq)]
pub struct AlgebraElement {
    n: usize,
    m: DMatrix<f64>,
}

impl AlgebraElement {
    pub fn new(n: usize, m: DMatrix<f64>) -> Result<Self> {
        check_rank(n)?;
        if m.shape() != (n + 1, n + 1) {
            return Err(GeomError::Argument(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                n + 1,
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::Domain("non-finite algebra element".into()));
        }
        let j = minkowski_form(n);
        let defect = max_abs(&(m.transpose() * &j + &j * &m));
        if defect > tolerance::EXACT * max_abs(&m).max(1.0) {
            return Err(GeomError::Domain(format!(
                "matrix is not in so({n},1): |X^T J + J X| = {defect:e}"
            )));
        }
        Ok(Self { n, m })
    }

    pub(crate) fn from_matrix_unchecked(n: usize, m: DMatrix<f64>) -> Self {
        Self { n, m }
    }

    pub fn zero(n: usize) -> Self {
        Self { n, m: DMatrix::zeros(n + 1, n + 1) }
    }

    /// Builds `sum c_ij E_ij` from coefficients ordered as
    /// `(1,2), (1,3), ..., (1,n+1), (2,3), ...`.
    pub fn from_coefficients(n: usize, coeffs: &[f64]) -> Result<Self> {
        check_rank(n)?;
        let dim = algebra_dim(n);
        if coeffs.len() != dim {
            return Err(GeomError::Argument(format!(
                "expected {dim} coefficients, got {}",
                coeffs.len()
            )));
        }
        let mut m = DMatrix::zeros(n + 1, n + 1);
        for (c, (i, j)) in coeffs.iter().zip(basis_pairs(n)) {
            m[(j, i)] += c;
            m[(i, j)] += epsilon(j, n) * c;
        }
        Ok(Self { n, m })
    }

    /// Coordinates in the orthonormal `E_ij` basis (same order as
    /// [`AlgebraElement::from_coefficients`]).
    pub fn coefficients(&self) -> DVector<f64> {
        algebra_coordinates(&self.m, self.n)
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { n: self.n, m: &self.m * s }
    }

    /// Lie bracket `[X, Y] = XY - YX`.
    pub fn bracket(&self, other: &Self) -> Self {
        assert_eq!(self.n, other.n, "bracket of elements of different rank");
        Self { n: self.n, m: &self.m * &other.m - &other.m * &self.m }
    }

    /// Maximum absolute entry.
    pub fn max_norm(&self) -> f64 {
        max_abs(&self.m)
    }
}

impl Add for &AlgebraElement {
    type Output = AlgebraElement;
    fn add(self, rhs: Self) -> AlgebraElement {
        assert_eq!(self.n, rhs.n);
        AlgebraElement { n: self.n, m: &self.m + &rhs.m }
    }
}

impl Sub for &AlgebraElement {
    type Output = AlgebraElement;
    fn sub(self, rhs: Self) -> AlgebraElement {
        assert_eq!(self.n, rhs.n);
        AlgebraElement { n: self.n, m: &self.m - &rhs.m }
    }
}

impl Neg for &AlgebraElement {
    type Output = AlgebraElement;
    fn neg(self) -> AlgebraElement {
        self.scale(-1.0)
    }
}

/// Dimension `n(n+1)/2` of so(n,1).
pub fn algebra_dim(n: usize) -> usize {
    n * (n + 1) / 2
}

/// Zero-based `(i, j)` pairs, `i < j`, in coefficient order.
fn basis_pairs(n: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..=n).flat_map(move |i| (i + 1..=n).map(move |j| (i, j)))
}

fn epsilon(j0: usize, n: usize) -> f64 {
    if j0 == n {
        1.0
    } else {
        -1.0
    }
}

/// Coordinates of an algebra matrix in the `E_ij` basis: the coefficient of
/// `E_ij` is the `(j, i)` entry.
pub(crate) fn algebra_coordinates(m: &DMatrix<f64>, n: usize) -> DVector<f64> {
    DVector::from_iterator(algebra_dim(n), basis_pairs(n).map(|(i, j)| m[(j, i)]))
}

/// The basis element `E_ij` (1-based, `1 <= i < j <= n+1`).
pub fn basis_e(i: usize, j: usize, n: usize) -> Result<AlgebraElement> {
    check_rank(n)?;
    if !(1 <= i && i < j && j <= n + 1) {
        return Err(GeomError::Argument(format!(
            "E_{{{i},{j}}} requires 1 <= i < j <= {}",
            n + 1
        )));
    }
    let mut m = DMatrix::zeros(n + 1, n + 1);
    m[(i - 1, j - 1)] = epsilon(j - 1, n);
    m[(j - 1, i - 1)] = 1.0;
    Ok(AlgebraElement { n, m })
}

/// Iwasawa basis: nilpotent `N_i`, abelian `A_1` and the compact `so(n)`
/// generators `E_ij` with `j <= n`.
#[derive(Debug, Clone)]
pub struct IwasawaBasis {
    pub n: usize,
    pub nilpotent: Vec<AlgebraElement>,
    pub abelian: AlgebraElement,
    pub compact: Vec<AlgebraElement>,
}

pub fn iwasawa_basis(n: usize) -> Result<IwasawaBasis> {
    check_rank(n)?;
    let nilpotent = (1..n)
        .map(|i| Ok(&basis_e(i, n, n)? + &basis_e(i, n + 1, n)?))
        .collect::<Result<Vec<_>>>()?;
    let abelian = basis_e(n, n + 1, n)?;
    let compact = (1..=n)
        .flat_map(|i| (i + 1..=n).map(move |j| (i, j)))
        .map(|(i, j)| basis_e(i, j, n))
        .collect::<Result<Vec<_>>>()?;
    Ok(IwasawaBasis { n, nilpotent, abelian, compact })
}

/// Inner product in which the `E_ij` are orthonormal.
pub fn inner(x: &AlgebraElement, y: &AlgebraElement) -> Result<f64> {
    if x.n != y.n {
        return Err(GeomError::Argument(format!(
            "inner product of so({},1) and so({},1) elements",
            x.n, y.n
        )));
    }
    Ok(x.coefficients().dot(&y.coefficients()))
}

/// Element of SO0(n,1).
#[derive(Debug, Clone, PartialEq)]
pub struct GroupElement {
    n: usize,
    m: DMatrix<f64>,
}

impl GroupElement {
    /// Validates membership. Tolerances are scaled by `max(1, |M|)^2` so that
    /// large boosts are not rejected for ordinary rounding.
    pub fn new(n: usize, m: DMatrix<f64>) -> Result<Self> {
        check_rank(n)?;
        if m.shape() != (n + 1, n + 1) {
            return Err(GeomError::Argument(format!(
                "expected a {0}x{0} matrix, got {1}x{2}",
                n + 1,
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::Domain("non-finite group element".into()));
        }
        let scale = max_abs(&m).max(1.0).powi(2);
        let j = minkowski_form(n);
        let defect = max_abs(&(&m * &j * m.transpose() - &j));
        if defect > tolerance::MEMBERSHIP * scale {
            return Err(GeomError::Domain(format!(
                "matrix does not preserve J: |M J M^T - J| = {defect:e}"
            )));
        }
        let det = m.clone().determinant();
        if (det - 1.0).abs() > tolerance::MEMBERSHIP * scale {
            return Err(GeomError::Domain(format!("det = {det}, expected 1")));
        }
        if m[(n, n)] < 1.0 - tolerance::MEMBERSHIP * scale {
            return Err(GeomError::Domain(format!(
                "M[n+1,n+1] = {} < 1: not in the identity component",
                m[(n, n)]
            )));
        }
        Ok(Self { n, m })
    }

    pub(crate) fn from_matrix_unchecked(n: usize, m: DMatrix<f64>) -> Self {
        Self { n, m }
    }

    pub fn identity(n: usize) -> Self {
        Self { n, m: DMatrix::identity(n + 1, n + 1) }
    }

    /// Embeds `a` in SO(n) as `diag(a, 1)`.
    pub fn from_compact_block(a: &DMatrix<f64>) -> Result<Self> {
        let n = a.nrows();
        check_rank(n)?;
        if a.ncols() != n {
            return Err(GeomError::Argument("compact block must be square".into()));
        }
        let orth = max_abs(&(a.transpose() * a - DMatrix::identity(n, n)));
        let det = a.clone().determinant();
        if orth > tolerance::MEMBERSHIP || (det - 1.0).abs() > tolerance::MEMBERSHIP {
            return Err(GeomError::Domain(format!(
                "block is not in SO({n}): |a^T a - I| = {orth:e}, det = {det}"
            )));
        }
        let mut m = DMatrix::identity(n + 1, n + 1);
        m.view_mut((0, 0), (n, n)).copy_from(a);
        Ok(Self { n, m })
    }

    pub fn rank(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    /// `g^{-1} = J g^T J`.
    pub fn inverse(&self) -> Self {
        let j = minkowski_form(self.n);
        Self { n: self.n, m: &j * self.m.transpose() * &j }
    }

    /// Whether the element lies in `SO(n) x {1}` within `tol`.
    pub fn is_compact(&self, tol: f64) -> bool {
        let n = self.n;
        let corner = (self.m[(n, n)] - 1.0).abs();
        let edge = (0..n).fold(0.0_f64, |acc, i| {
            acc.max(self.m[(i, n)].abs()).max(self.m[(n, i)].abs())
        });
        let block = self.compact_block();
        let orth = max_abs(&(block.transpose() * &block - DMatrix::identity(n, n)));
        corner.max(edge).max(orth) <= tol
    }

    /// Upper-left `n x n` block.
    pub fn compact_block(&self) -> DMatrix<f64> {
        self.m.view((0, 0), (self.n, self.n)).into_owned()
    }

    /// Max-norm distance between two elements.
    pub fn distance_max(&self, other: &Self) -> f64 {
        max_abs(&(&self.m - &other.m))
    }

    pub fn max_norm(&self) -> f64 {
        max_abs(&self.m)
    }
}

impl Mul for &GroupElement {
    type Output = GroupElement;
    fn mul(self, rhs: Self) -> GroupElement {
        assert_eq!(self.n, rhs.n, "product of elements of different rank");
        GroupElement { n: self.n, m: &self.m * &rhs.m }
    }
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn exp(x: &AlgebraElement) -> GroupElement {
    GroupElement { n: x.n, m: expm(&x.m) }
}

pub(crate) fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let dim = a.nrows();
    let norm1 = (0..dim)
        .map(|j| a.column(j).iter().map(|v| v.abs()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    // Scale so that |A / 2^s|_1 <= 1/2; the degree-18 remainder is then
    // below 0.5^19 / 19! ~ 1e-23.
    let squarings = if norm1 > 0.5 { (norm1 / 0.5).log2().ceil() as i32 } else { 0 };
    let scaled = a / 2f64.powi(squarings);
    let mut result = DMatrix::identity(dim, dim);
    let mut term = DMatrix::identity(dim, dim);
    for k in 1..=18 {
        term = &term * &scaled / k as f64;
        result += &term;
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// `sin(t)/t` with `lambda = -t^2`, and `sinh(t)/t` with `lambda = t^2`.
fn cubic_coeff1(lambda: f64) -> f64 {
    if lambda.abs() < 1e-8 {
        1.0 + lambda / 6.0
    } else if lambda < 0.0 {
        let t = (-lambda).sqrt();
        t.sin() / t
    } else {
        let t = lambda.sqrt();
        t.sinh() / t
    }
}

/// `(1 - cos t)/t^2` with `lambda = -t^2`, `(cosh t - 1)/t^2` with `lambda = t^2`.
fn cubic_coeff2(lambda: f64) -> f64 {
    if lambda.abs() < 1e-8 {
        0.5 + lambda / 24.0
    } else if lambda < 0.0 {
        let t = (-lambda).sqrt();
        2.0 * (t / 2.0).sin().powi(2) / (t * t)
    } else {
        let t = lambda.sqrt();
        2.0 * (t / 2.0).sinh().powi(2) / (t * t)
    }
}

/// Exact exponential for elements with `X^3 = lambda X`: nilpotent
/// directions in n (`lambda = 0`), boosts such as `A_1` (`lambda > 0`) and
/// single-plane rotations in k (`lambda < 0`). Returns `None` for elements
/// outside this class.
pub fn exp_closed(x: &AlgebraElement) -> Option<GroupElement> {
    let n = x.n;
    let dim = n + 1;
    let scale = x.max_norm();
    if scale == 0.0 {
        return Some(GroupElement::identity(n));
    }
    let x2 = &x.m * &x.m;
    let x3 = &x2 * &x.m;
    let lambda = x3.dot(&x.m) / x.m.dot(&x.m);
    if max_abs(&(&x3 - &x.m * lambda)) > tolerance::EXACT * scale.powi(3).max(1.0) {
        return None;
    }
    let m = DMatrix::identity(dim, dim) + &x.m * cubic_coeff1(lambda) + x2 * cubic_coeff2(lambda);
    Some(GroupElement { n, m })
}

/// Factor `g = phi(x, y) k` with `k` in `SO(n) x {1}`.
///
/// Since `k` fixes `e_{n+1}`, the last column `v = g e_{n+1}` equals
/// `phi(x,y) e_{n+1}`, which is `(x/y, sinh(ln y) + |x|^2/(2y),
/// cosh(ln y) + |x|^2/(2y))`. Hence `y = 1/(v_{n+1} - v_n)`, `x = y v_{1..n-1}`
/// and `k = phi(x,y)^{-1} g`.
pub fn nak_decompose(g: &GroupElement) -> Result<(ChartPoint, GroupElement)> {
    let n = g.n;
    let v = g.m.column(n);
    // On the hyperboloid v_{n+1}^2 - |v_{1..n}|^2 = 1 the gap also equals
    // (1 + |v_{1..n-1}|^2) / (v_{n+1} + v_n), which does not cancel when
    // v_n > 0.
    let gap = if v[n - 1] > 0.0 {
        (1.0 + v.rows(0, n - 1).norm_squared()) / (v[n] + v[n - 1])
    } else {
        v[n] - v[n - 1]
    };
    if !(gap > 0.0 && gap.is_finite()) {
        return Err(GeomError::Decomposition { residual: f64::INFINITY, tolerance: tolerance::RECONSTRUCTION });
    }
    let y = 1.0 / gap;
    let x: Vec<f64> = (0..n - 1).map(|i| y * v[i]).collect();
    let p = ChartPoint::new(x, y)?;
    let na = phi(&p);
    let mut k = na.inverse().m * &g.m;

    let scale = g.max_norm().max(1.0);
    for i in 0..n {
        k[(i, n)] = 0.0;
        k[(n, i)] = 0.0;
    }
    k[(n, n)] = 1.0;
    let (p, k) = refine_nak(g, p, GroupElement { n, m: k })?;
    let residual = (&phi(&p) * &k).distance_max(g) / scale;
    if residual > tolerance::RECONSTRUCTION {
        return Err(GeomError::Decomposition { residual, tolerance: tolerance::RECONSTRUCTION });
    }
    Ok((p, k))
}

/// One Newton step on `g = phi(p) k`.
///
/// `k` from `phi^{-1} g` carries an error of order `eps |g|^2`. Writing the
/// corrected factors as `phi(p) (1 + zeta)` and `(1 + eta) k` with `zeta` in
/// `n + a` and `eta` in `k`, the residual gives `zeta + eta =
/// phi^{-1} (g - phi k) k^{-1}`, split along `g = k + a + n` using
/// `E_{i,n+1} = N_i - E_{i,n}`. Since `phi^{-1} d phi = (dx N + dy A_1) / y`,
/// the chart update is `(y b, y a)`.
fn refine_nak(g: &GroupElement, p: ChartPoint, k: GroupElement) -> Result<(ChartPoint, GroupElement)> {
    let n = g.n;
    let na = phi(&p);
    let z = na.inverse().m * (&g.m - &na.m * &k.m) * k.m.transpose();
    // Coefficient of E_ij (0-based i < j) sits at z[(j, i)].
    let y = p.y();
    let a = z[(n, n - 1)];
    let mut eta = DMatrix::zeros(n + 1, n + 1);
    for j in 0..n {
        for i in 0..j {
            let mut c = z[(j, i)];
            if j == n - 1 {
                c -= z[(n, i)];
            }
            eta[(i, j)] = -c;
            eta[(j, i)] = c;
        }
    }
    let x: Vec<f64> = p.x().iter().enumerate().map(|(i, &xi)| xi + y * z[(n, i)]).collect();
    let refined = ChartPoint::new(x, y * a.exp())?;
    let k2 = GroupElement { n, m: expm(&eta) * &k.m };
    let before = (&na * &k).distance_max(g);
    let after = (&phi(&refined) * &k2).distance_max(g);
    Ok(if after < before { (refined, k2) } else { (p, k) })
}

/// Factor `g = k phi(x, y)`, obtained from the NAK factorization of `g^{-1}`:
/// `g^{-1} = phi(q) k'` gives `g = k'^{-1} phi(q)^{-1} = k'^T phi(tau(q))`.
pub fn kna_decompose(g: &GroupElement) -> Result<(GroupElement, ChartPoint)> {
    let (q, k) = nak_decompose(&g.inverse())?;
    let k = GroupElement { n: g.n, m: k.m.transpose() };
    let p = q.chart_inverse();
    let scale = g.max_norm().max(1.0);
    let residual = (&k * &phi(&p)).distance_max(g) / scale;
    if residual > tolerance::RECONSTRUCTION {
        return Err(GeomError::Decomposition { residual, tolerance: tolerance::RECONSTRUCTION });
    }
    Ok((k, p))
}

/// Relative max-norm reconstruction residual `|phi(p) k - g| / max(1, |g|)`.
pub fn nak_residual(g: &GroupElement, p: &ChartPoint, k: &GroupElement) -> f64 {
    (&phi(p) * k).distance_max(g) / g.max_norm().max(1.0)
}

/// Relative max-norm reconstruction residual `|k phi(p) - g| / max(1, |g|)`.
pub fn kna_residual(g: &GroupElement, k: &GroupElement, p: &ChartPoint) -> f64 {
    (k * &phi(p)).distance_max(g) / g.max_norm().max(1.0)
}
