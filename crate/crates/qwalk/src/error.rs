use thiserror::Error;

/// Errors surfaced by state construction, channel application, and the
/// spectral routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("probability must lie in [0, 1], got {0}")]
    ProbabilityOutOfRange(f64),

    #[error("Bloch vector must have r0 = 1/2, got r0 = {0}")]
    BlochNormalization(f64),

    #[error("Bloch vector lies outside the unit ball: r1^2 + r2^2 + r3^2 = {0} > 1/4")]
    BlochOutsideBall(f64),

    #[error("state support would cross the position window edge (half-width {half_width})")]
    WindowOverflow { half_width: i64 },

    #[error("requested {requested} steps but the window was sized for {capacity}")]
    StepsExceedWindow { requested: usize, capacity: usize },

    #[error("matrix is not Hermitian: max |M - M^H| element is {0:.3e}")]
    NotHermitian(f64),

    #[error("density-matrix diagonal has imaginary part {0:.3e}; state is corrupted")]
    ImaginaryDiagonal(f64),

    #[error("negativity cross-check failed: |sum-of-negatives - trace-norm form| = {0:.3e}")]
    NegativityMismatch(f64),

    #[error("no phase solves cos(phi) = -cot(2*theta) for theta = {0}: |cot| > 1")]
    PhaseOutOfDomain(f64),

    #[error("Hermitian eigensolver did not converge")]
    EigensolveFailed,
}

pub type Result<T> = std::result::Result<T, Error>;
