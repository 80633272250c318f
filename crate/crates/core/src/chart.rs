//! The global chart `phi(x, y) = exp(sum x_i N_i) exp(ln(y) A_1)` of the
//! solvable factor NA, and the two compact actions it carries: the right
//! action r(K) on the left quotient `K\G` and the left action l(K) on the
//! right quotient `G/K` (hyperbolic space).
//!
//! Both actions are computed through the Iwasawa factorizations, so they work
//! for every rank. The n = 2 Moebius formulas in [`moebius`] are independent
//! closed forms used to check them.
//!
//! Convention: r is a right action, `r(k1 k2) p = r(k2) (r(k1) p)`, while l
//! is a left action, `l(k1 k2) p = l(k1) (l(k2) p)`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::lie::{check_rank, kna_decompose, nak_decompose, GroupElement};
use crate::tolerance;

/// A point `(x, y)` of the upper half-space `R^{n-1} x R^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChartPoint {
    x: Vec<f64>,
    y: f64,
}

impl ChartPoint {
    pub fn new(x: Vec<f64>, y: f64) -> Result<Self> {
        if x.is_empty() {
            return Err(GeomError::Argument("chart point needs n - 1 >= 1 coordinates".into()));
        }
        if !(y > 0.0 && y.is_finite()) || x.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::Domain(format!("invalid chart point ({x:?}, {y})")));
        }
        Ok(Self { x, y })
    }

    /// The fixed point `i = (0, 1)` of rank `n`.
    pub fn origin(n: usize) -> Self {
        Self { x: vec![0.0; n - 1], y: 1.0 }
    }

    /// The axis point `(0, y)`.
    pub fn on_axis(n: usize, y: f64) -> Result<Self> {
        Self::new(vec![0.0; n - 1], y)
    }

    /// Builds a point from `n` coordinates `(x_1, ..., x_{n-1}, y)`.
    pub fn from_coords(coords: &[f64]) -> Result<Self> {
        match coords.split_last() {
            Some((&y, x)) => Self::new(x.to_vec(), y),
            None => Err(GeomError::Argument("empty coordinate list".into())),
        }
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> f64 {
        self.y
    }

    /// The rank `n` (dimension of the space).
    pub fn rank(&self) -> usize {
        self.x.len() + 1
    }

    /// `(x_1, ..., x_{n-1}, y)`.
    pub fn coords(&self) -> DVector<f64> {
        DVector::from_iterator(self.rank(), self.x.iter().copied().chain(std::iter::once(self.y)))
    }

    pub fn x_norm_sq(&self) -> f64 {
        self.x.iter().map(|v| v * v).sum()
    }

    /// `(-x / y, 1 / y)`: the chart image of the group inverse.
    pub fn chart_inverse(&self) -> Self {
        Self { x: self.x.iter().map(|v| -v / self.y).collect(), y: 1.0 / self.y }
    }

    /// Max-norm distance in chart coordinates.
    pub fn distance_max(&self, other: &Self) -> f64 {
        self.x
            .iter()
            .zip(&other.x)
            .map(|(a, b)| (a - b).abs())
            .fold((self.y - other.y).abs(), f64::max)
    }

    /// Displaces coordinate `axis` (`n - 1` is `y`) by `delta`.
    pub fn shifted(&self, axis: usize, delta: f64) -> Result<Self> {
        let mut c = self.coords();
        c[axis] += delta;
        Self::from_coords(c.as_slice())
    }

    /// Adds a coordinate displacement.
    pub fn offset(&self, delta: &DVector<f64>) -> Result<Self> {
        Self::from_coords((self.coords() + delta).as_slice())
    }
}

/// The chart map into NA, `exp(sum x_i N_i) exp(ln(y) A_1)`, entry by entry.
///
/// With `r = |x|^2 / 2`, `c = cosh ln y` and `s = sinh ln y` the trailing
/// columns are `(-x/y, c - r/y, s - r/y)` and `(x/y, s + r/y, c + r/y)`.
/// Multiplying out the two factors instead cancels terms of size `r y`.
pub fn phi(p: &ChartPoint) -> GroupElement {
    let n = p.rank();
    let (y, r) = (p.y, p.x_norm_sq() / 2.0);
    let (c, s) = ((y + 1.0 / y) / 2.0, (y - 1.0 / y) / 2.0);
    let mut m = DMatrix::identity(n + 1, n + 1);
    for (i, &xi) in p.x.iter().enumerate() {
        m[(n - 1, i)] = xi;
        m[(n, i)] = xi;
        m[(i, n - 1)] = -xi / y;
        m[(i, n)] = xi / y;
    }
    m[(n - 1, n - 1)] = c - r / y;
    m[(n, n - 1)] = s - r / y;
    m[(n - 1, n)] = s + r / y;
    m[(n, n)] = c + r / y;
    GroupElement::from_matrix_unchecked(n, m)
}

/// Chart part of the NAK factorization (left inverse of [`phi`]).
pub fn phi_inverse(g: &GroupElement) -> Result<ChartPoint> {
    Ok(nak_decompose(g)?.0)
}

/// `(x, y) -> (-x/y, 1/y)`.
pub fn chart_inverse(p: &ChartPoint) -> ChartPoint {
    p.chart_inverse()
}

/// The involution identifying the chart of `K\G` with that of `G/K`.
/// Same map as [`chart_inverse`].
pub fn tau(p: &ChartPoint) -> ChartPoint {
    p.chart_inverse()
}

fn require_compact(k: &GroupElement) -> Result<()> {
    if k.is_compact(tolerance::MEMBERSHIP) {
        Ok(())
    } else {
        Err(GeomError::Argument("group element is not in SO(n) x {1}".into()))
    }
}

fn require_same_rank(k: &GroupElement, p: &ChartPoint) -> Result<()> {
    if k.rank() == p.rank() {
        Ok(())
    } else {
        Err(GeomError::Argument(format!(
            "rank mismatch: element of SO0({},1) acting on a rank-{} point",
            k.rank(),
            p.rank()
        )))
    }
}

/// Isometric right action on `K\G`: `phi(p) k = k2 phi(p2)`, returns `p2`.
pub fn r_action(k: &GroupElement, p: &ChartPoint) -> Result<ChartPoint> {
    require_same_rank(k, p)?;
    require_compact(k)?;
    Ok(kna_decompose(&(&phi(p) * k))?.1)
}

/// Left action on `G/K`: `k phi(p) = phi(p1) k1`, returns `p1`.
pub fn l_action(k: &GroupElement, p: &ChartPoint) -> Result<ChartPoint> {
    require_same_rank(k, p)?;
    require_compact(k)?;
    Ok(nak_decompose(&(k * &phi(p)))?.0)
}

/// Euclidean sphere carrying the r(K)- and l(K)-orbits through `p`:
/// centre `(0, c)` with `c = (1 + |x|^2 + y^2) / (2y)` and its radius.
pub fn orbit_circle(p: &ChartPoint) -> (f64, f64) {
    let c = (1.0 + p.x_norm_sq() + p.y * p.y) / (2.0 * p.y);
    let r = (p.x_norm_sq() + (p.y - c).powi(2)).sqrt();
    (c, r)
}

/// Residual `| |x|^2 + (y - c)^2 - r^2 |` of `q` against a circle.
pub fn circle_residual(q: &ChartPoint, center: f64, radius: f64) -> f64 {
    (q.x_norm_sq() + (q.y - center).powi(2) - radius * radius).abs()
}

/// Whether `k` fixes the axis point `p` under r(K), to `1e-9`.
///
/// The stabilizer of `(0, y)`, `y != 1`, is the block `SO(n-1) x SO(1)`.
pub fn stabilizer_check(p: &ChartPoint, k: &GroupElement) -> Result<bool> {
    if p.x.iter().any(|&v| v != 0.0) {
        return Err(GeomError::Argument("stabilizer check requires a point on the y-axis".into()));
    }
    if p.y == 1.0 {
        return Err(GeomError::Argument("(0, 1) is fixed by all of SO(n)".into()));
    }
    Ok(r_action(k, p)?.distance_max(p) <= 1e-9)
}

/// The compact element `exp(angle * (-E_ij))` (1-based, `i < j <= n`).
/// For `(i, j) = (1, 2)` this is the `z-hat` rotation of the n = 2 formulas.
pub fn compact_rotation(n: usize, i: usize, j: usize, angle: f64) -> Result<GroupElement> {
    check_rank(n)?;
    if !(1 <= i && i < j && j <= n) {
        return Err(GeomError::Argument(format!("compact plane ({i},{j}) invalid for n = {n}")));
    }
    let (s, c) = angle.sin_cos();
    let mut m = DMatrix::identity(n + 1, n + 1);
    let (a, b) = (i - 1, j - 1);
    m[(a, a)] = c;
    m[(b, b)] = c;
    m[(a, b)] = s;
    m[(b, a)] = -s;
    Ok(GroupElement::from_matrix_unchecked(n, m))
}

/// Differential of `p -> r(k) p` at `p` in chart coordinates, by
/// fourth-order central differences with step `1e-3 y`.
pub fn r_action_differential(k: &GroupElement, p: &ChartPoint) -> Result<DMatrix<f64>> {
    let n = p.rank();
    let h = 1e-3 * p.y;
    let image = |axis: usize, e: f64| -> Result<DVector<f64>> { Ok(r_action(k, &p.shifted(axis, e)?)?.coords()) };
    let cols = (0..n)
        .map(|axis| {
            let (m2, m1, p1, p2) = (image(axis, -2.0 * h)?, image(axis, -h)?, image(axis, h)?, image(axis, 2.0 * h)?);
            Ok((m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DMatrix::from_columns(&cols))
}

/// The n = 2 closed forms for both actions with `z-hat = exp(z(-E_12))`.
pub mod moebius {
    /// Rotation about `(0, (1 + x^2 + y^2)/(2y))` by angle `z`.
    pub fn r_action_2d(z: f64, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = z.sin_cos();
        let q = -x * x + y * y - 1.0;
        let scale = 1.0 / (2.0 * y);
        (
            scale * (-q * s + 2.0 * x * y * c),
            scale * (q * c + 2.0 * x * y * s + x * x + y * y + 1.0),
        )
    }

    /// Ordinary Moebius rotation about `i`.
    pub fn l_action_2d(z: f64, x: f64, y: f64) -> (f64, f64) {
        let (s, c) = z.sin_cos();
        let r2 = x * x + y * y;
        let l = -(r2 - 1.0) * c + 2.0 * x * s + r2 + 1.0;
        (((r2 - 1.0) * s + 2.0 * x * c) / l, 2.0 * y / l)
    }
}
