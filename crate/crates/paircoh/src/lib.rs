//! Entanglement quantities of pair coherent states and generic two-mode
//! Schmidt-form pure states.
//!
//! A pair coherent state `|ζ, q⟩` is the joint eigenstate of the two-mode
//! annihilation product `ab` (eigenvalue ζ) and of the photon-number
//! difference `a†a − b†b` (eigenvalue q). Expanded over the kets `|n+q, n⟩`
//! it is natively in Schmidt form, which makes its entanglement quantities
//! available in closed form:
//!
//! * the partial-transpose spectrum and the negativity (in both the
//!   unordered-pair "spectral" convention and the ordered-pair convention
//!   that doubles it),
//! * the entropy of entanglement in bits,
//! * determinant-based upper and lower bounds on the squared D-concurrence,
//!   whose gap is exactly the truncation tail.
//!
//! Every closed form is cross-checked by the [`oracle`] module, which builds
//! the density matrix explicitly and redoes the computation with dense linear
//! algebra (cyclic Jacobi eigensolver, LU determinants) that shares no code
//! with the closed-form path.
//!
//! Modules:
//! * [`specfun`] — log-factorial, modified Bessel `I_q`, oscillator eigenfunctions.
//! * [`states`] — truncated Schmidt states and the pair-coherent constructor.
//! * [`entanglement`] — closed-form measures and the combined [`entanglement::MeasureReport`].
//! * [`oracle`] — dense brute-force verification.
//! * [`wavefunction`] — coordinate-space ψ(x_a, x_b), grids, quadrature, non-Gaussianity.
//! * [`cli`] — the `paircoh` command-line front end.

#![forbid(unsafe_code)]

pub mod cli;
pub mod entanglement;
mod jsonfmt;
pub mod oracle;
pub mod specfun;
pub mod states;
mod util;
pub mod wavefunction;

pub use entanglement::{measure_report, MeasureReport, PTSpectrum};
pub use oracle::{verify_report, DenseMatrix, VerificationReport};
pub use states::{build_pcs, truncation_for_tolerance, PairCoherentParams, SchmidtState};
pub use wavefunction::Grid2D;

/// Errors shared by the library modules.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// `truncation_for_tolerance` hit its hard cap before the tail bound
    /// dropped below epsilon.
    #[error("truncation cap {cap} reached before tail < {epsilon:e}")]
    TruncationCap { cap: usize, epsilon: f64 },
    /// A dense-oracle matrix would exceed the configured dimension cap.
    #[error("dense dimension {dim} exceeds oracle cap {cap}")]
    OracleCap { dim: usize, cap: usize },
    /// Matrix dimensions do not match the declared subsystem split.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    /// The eigensolver was handed a matrix that is not Hermitian.
    #[error("matrix is not Hermitian (max |A - A†| entry {0:e})")]
    NotHermitian(f64),
    /// The Jacobi iteration did not reach the off-diagonal tolerance.
    #[error("Jacobi iteration did not converge within {sweeps} sweeps (off-norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },
    /// An invalid argument that is not a domain error (bad sizes, flags, …).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// I/O failure while writing CSV/JSON output.
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
