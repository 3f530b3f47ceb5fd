//! # weakgeo
//!
//! Exact numerical simulation of von Neumann pre-measurement and weak
//! measurement for a finite-dimensional system coupled to a measuring
//! pointer, together with the ray-space geometry that organizes it:
//! Fubini–Study metric, the abelian connection 1-form, Pancharatnam
//! triangle phases, Bloch-sphere solid angles, and complex weak values.
//!
//! The crate is built around closed-form contracts that are checked
//! against brute-force simulation:
//!
//! - the strong pointer shift `[Q] - <Q> = λ<O>`,
//! - the intrinsic phase-shift rate `arg<A(y)|A(y+dy)>/dy → -λ<O>`,
//! - the ray speed `ds/dy = λ·ΔO` (energy-uncertainty analogue),
//! - the qubit triangle-phase/solid-angle relation `Θ = -Ω/2`,
//! - the first-order weak pointer shift
//!   `ΔQ = ε[Im(O_w)·C(Q,P) + Re(O_w)]`.
//!
//! Everything is dimensionless with `ħ = 1`.
//!
//! Modules:
//!
//! - [`linalg`]: states, observables, density matrices, composite systems.
//! - [`rayspace`]: geometry of the space of rays CP(n).
//! - [`pointer`]: the 1-D measuring particle on a uniform grid.
//! - [`vonneumann`]: the strong pre-measurement interaction.
//! - [`weakmeas`]: weak values and weak measurement.
//! - [`scenario`], [`battery`], [`report`], [`cli`]: the scenario runner.

pub mod battery;
pub mod cli;
pub mod linalg;
pub mod pointer;
pub mod rayspace;
pub mod report;
pub mod sample;
pub mod scenario;
pub mod vonneumann;
pub mod weakmeas;

use thiserror::Error;

/// Errors raised by the physics layer.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix is not square: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix is not Hermitian (max asymmetry {0:.3e})")]
    NotHermitian(f64),

    #[error("vector is not normalized (|norm^2 - 1| = {0:.3e})")]
    NotNormalized(f64),

    #[error("zero vector cannot be normalized")]
    ZeroNorm,

    #[error("eigenvector matrix failed the unitarity check (residual {0:.3e})")]
    NotUnitary(f64),

    #[error("spectral reconstruction failed (residual {0:.3e})")]
    BadReconstruction(f64),

    #[error("trace is not 1 (got {0})")]
    InvalidTrace(f64),

    #[error("matrix is not positive semi-definite (min eigenvalue {0:.3e})")]
    NotPositiveSemidefinite(f64),

    #[error("expected dimension {expected}, got {got}")]
    WrongDimension { expected: usize, got: usize },

    #[error("projective chart is singular here (|psi0| = {0:.3e}); rotate the basis")]
    ChartSingularity(f64),

    #[error("geometric phase undefined: overlap magnitude {0:.3e} at or below {1:.3e}")]
    UndefinedPhase(f64, f64),

    #[error("antipodal points: connecting geodesic is not unique")]
    AntipodalPoints,

    #[error("invalid Bloch point: {0}")]
    InvalidBlochPoint(String),

    #[error("grid [{x_min}, {x_max}] too small: need at least [{needed_min}, {needed_max}]")]
    GridTooSmall {
        x_min: f64,
        x_max: f64,
        needed_min: f64,
        needed_max: f64,
    },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("boundary amplitude is {0:.3e} of peak; wave would wrap around the grid")]
    BoundaryOverflow(f64),

    #[error("pre/post-selection nearly orthogonal: |<beta|alpha>| = {overlap:.3e} <= guard {guard:.3e}")]
    AmplificationDivergence { overlap: f64, guard: f64 },

    #[error("post-selection probability {0:.3e} vanishes")]
    PostSelectionVanished(f64),

    #[error("epsilon = {0} is outside the weak regime |eps| <= {1}; use WeakCoupling::unrestricted")]
    WeakRegimeViolation(f64, f64),

    #[error("meter must be a qubit for this readout, got dimension {0}")]
    MeterNotQubit(usize),

    #[error("imaginary residue {0:.3e} exceeds tolerance {1:.3e}")]
    ImaginaryResidue(f64, f64),

    #[error("unknown battery suite '{0}'; see `weakgeo list-suites`")]
    UnknownSuite(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Neville polynomial extrapolation of `(nodes[i], values[i])` samples to
/// node 0. Used for ladder extrapolations: rates sampled at a few step sizes
/// are extrapolated to vanishing step, killing the leading truncation terms.
///
/// For quantities with an even error series, pass the squared step sizes as
/// nodes.
pub fn extrapolate_to_zero(nodes: &[f64], values: &[f64]) -> f64 {
    assert_eq!(nodes.len(), values.len());
    assert!(!nodes.is_empty());
    let mut tab = values.to_vec();
    let n = tab.len();
    for level in 1..n {
        for i in 0..n - level {
            let (ti, tj) = (nodes[i], nodes[i + level]);
            tab[i] = (tj * tab[i] - ti * tab[i + 1]) / (tj - ti);
        }
    }
    tab[0]
}

/// Wrap an angle into the principal branch `(-pi, pi]`.
pub fn wrap_angle(theta: f64) -> f64 {
    let two_pi = std::f64::consts::TAU;
    let mut t = theta.rem_euclid(two_pi);
    if t > std::f64::consts::PI {
        t -= two_pi;
    }
    // rem_euclid maps -pi to +pi already; keep exact -pi out of the range
    if t <= -std::f64::consts::PI {
        t += two_pi;
    }
    t
}
