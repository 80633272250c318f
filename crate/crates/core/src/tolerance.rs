//! Pinned tolerances shared by the kernel, the verification suites and the
//! tests. Every threshold that gates a pass/fail decision lives here.

/// Exact algebraic identities in double precision (basis relations,
/// one-parameter subgroups, exp path agreement, chart involution).
pub const EXACT: f64 = 1e-12;

/// Membership of a matrix in SO0(n,1): `M J M^T = J` and `det M = 1`.
pub const MEMBERSHIP: f64 = 1e-10;

/// Iwasawa reconstruction `|phi(x,y) k - g|`, and the equivalence of the
/// decomposition-based actions with their closed-form Moebius oracles.
pub const RECONSTRUCTION: f64 = 1e-10;

/// Frame orthonormality `w_i^T G w_j = delta_ij` and agreement of the
/// group-constructed metric with the closed two-dimensional frame.
pub const FRAME: f64 = 1e-9;

/// Christoffel symmetry in the lower indices.
pub const CHRISTOFFEL_SYMMETRY: f64 = 1e-8;

/// Closed-form sectional curvature vs the finite-difference oracle.
pub const CURVATURE_ORACLE: f64 = 1e-5;

/// Sectional curvature of the quotient metric at the fixed point `i`.
pub const CURVATURE_AT_I: f64 = 1e-4;

/// Constant curvature -1 of the hyperbolic control metric.
pub const HYPERBOLIC_CURVATURE: f64 = 1e-6;

/// Pullback / differential checks that go through finite differences of a
/// map (warped-product isometry, r(K) isometry).
pub const PULLBACK: f64 = 1e-7;

/// Geodesic shape residuals (hyperbola / half-circle family, distance).
pub const GEODESIC_SHAPE: f64 = 1e-6;

/// Axis-ray endpoint after integrating for time ln m.
pub const GEODESIC_ENDPOINT: f64 = 1e-8;

/// Minimum margin of the warped-model base coordinate above 1.
pub const WARPED_MARGIN: f64 = 1e-6;

/// Largest supported rank.
pub const MAX_RANK: usize = 8;
