//! Seeded samplers for the verification suites.
//!
//! Every case draws from its own ChaCha stream (`stream = case index`), so a
//! suite produces the same values whatever order its cases run in.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::chart::ChartPoint;
use crate::error::Result;
use crate::lie::{algebra_dim, exp, iwasawa_basis, AlgebraElement, GroupElement};

/// Generator for case `stream` of a run seeded with `seed`.
pub fn case_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Random compact element `exp(sum c_ij E_ij)`, `j <= n`, `c_ij ~ U(-pi, pi)`.
pub fn random_compact<R: Rng>(rng: &mut R, n: usize) -> GroupElement {
    random_block_rotation(rng, n, n)
}

/// Random element of `SO(m) x I` embedded in the upper-left `m x m` block.
pub fn random_block_rotation<R: Rng>(rng: &mut R, n: usize, m: usize) -> GroupElement {
    let mut x = DMatrix::zeros(n + 1, n + 1);
    for i in 0..m {
        for j in i + 1..m {
            let c = rng.random_range(-std::f64::consts::PI..std::f64::consts::PI);
            x[(i, j)] -= c;
            x[(j, i)] += c;
        }
    }
    exp(&AlgebraElement::from_matrix_unchecked(n, x))
}

/// Product of `len` one-parameter factors cycling through `exp(c N_i)`,
/// `exp(c A_1)` and `exp(c E_ij)` with `E_ij` compact, random `i, j` and
/// `c ~ U(-1.5, 1.5)`.
///
/// Long products of boosts drift off the group by roughly `eps |g|^2`, so
/// words are built from the factors of an Iwasawa-type product instead.
pub fn random_group_word<R: Rng>(rng: &mut R, n: usize, len: usize) -> Result<GroupElement> {
    let basis = iwasawa_basis(n)?;
    let mut g = GroupElement::identity(n);
    for step in 0..len {
        let x = match step % 3 {
            0 => &basis.nilpotent[rng.random_range(0..basis.nilpotent.len())],
            1 => &basis.abelian,
            _ => &basis.compact[rng.random_range(0..basis.compact.len())],
        };
        let c = rng.random_range(-1.5..1.5);
        g = &g * &exp(&x.scale(c));
    }
    Ok(g)
}

/// Random algebra element with coefficients `~ U(-s, s)`.
pub fn random_algebra<R: Rng>(rng: &mut R, n: usize, s: f64) -> AlgebraElement {
    let coeffs: Vec<f64> = (0..algebra_dim(n)).map(|_| rng.random_range(-s..s)).collect();
    AlgebraElement::from_coefficients(n, &coeffs).expect("rank checked by caller")
}

/// Chart point with `x_i ~ U(-x_max, x_max)` and `ln y ~ U(ln y_min, ln y_max)`.
pub fn random_point<R: Rng>(rng: &mut R, n: usize, x_max: f64, y_min: f64, y_max: f64) -> ChartPoint {
    let x = (0..n - 1).map(|_| rng.random_range(-x_max..x_max)).collect();
    let y = rng.random_range(y_min.ln()..y_max.ln()).exp();
    ChartPoint::new(x, y).expect("sampled point is valid")
}

/// Standard Gaussian vector.
pub fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.sample(StandardNormal))
}

/// Uniform point on the unit sphere `S^{dim-1}`.
pub fn random_unit_vector<R: Rng>(rng: &mut R, dim: usize) -> DVector<f64> {
    loop {
        let v = gaussian_vector(rng, dim);
        let norm = v.norm();
        if norm > 1e-6 {
            return v / norm;
        }
    }
}
