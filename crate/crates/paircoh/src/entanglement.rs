//! Closed-form entanglement quantities of a truncated Schmidt-form state:
//! the partial-transpose spectrum, negativity in two conventions, entropy of
//! entanglement, and determinant-based upper/lower bounds on the squared
//! D-concurrence.
//!
//! For a state `Σ c_n |n+q, n⟩` the partially transposed density matrix is
//! known in closed form: diagonal eigenvalues `p_n = |c_n|²` plus one
//! `±|c_n||c_m|` pair per unordered index pair. Everything in this module is
//! elementary arithmetic on the `|c_n|`; the `oracle` module re-derives the
//! same numbers by dense linear algebra so the two can be cross-checked.

use crate::jsonfmt;
use crate::states::{schmidt_probabilities, SchmidtState};
use crate::util::neumaier_sum;

/// Tolerance on the internal consistency identities enforced by
/// [`measure_report`] (bound gap vs tail, negativity convention bridge).
const REPORT_IDENTITY_TOL: f64 = 1e-12;

/// Eigenvalues of the partial transpose, in closed form.
///
/// `diagonal` holds `(n, λ_nn)` with `λ_nn = p_n`; `offdiag` holds one
/// `(n, m, λ⁺, λ⁻)` entry per unordered pair `n < m`, the eigenvalue pair
/// `±|c_n||c_m|` of the 2×2 block spanned by `{|n+q, m⟩, |m+q, n⟩}`.
#[derive(Debug, Clone, PartialEq)]
pub struct PTSpectrum {
    pub diagonal: Vec<(usize, f64)>,
    pub offdiag: Vec<(usize, usize, f64, f64)>,
}

impl PTSpectrum {
    /// All eigenvalues (including the implicit zeros from `q > 0` rectangular
    /// blocks are *not* included here — only the nonzero closed-form ones).
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut eigs: Vec<f64> = self.diagonal.iter().map(|&(_, l)| l).collect();
        for &(_, _, plus, minus) in &self.offdiag {
            eigs.push(plus);
            eigs.push(minus);
        }
        eigs
    }
}

/// Closed-form partial-transpose spectrum of a Schmidt-form state.
pub fn pt_spectrum(state: &SchmidtState) -> PTSpectrum {
    let amps: Vec<f64> = state.coeffs().iter().map(|c| c.norm()).collect();
    let diagonal = amps.iter().enumerate().map(|(n, a)| (n, a * a)).collect();
    let mut offdiag = Vec::with_capacity(amps.len() * (amps.len() - 1) / 2);
    for n in 0..amps.len() {
        for m in n + 1..amps.len() {
            let lambda = amps[n] * amps[m];
            offdiag.push((n, m, lambda, -lambda));
        }
    }
    PTSpectrum { diagonal, offdiag }
}

/// Negativity as the absolute sum of the negative PT eigenvalues, each
/// unordered pair counted once: `Σ_{n<m} |c_n||c_m|`.
///
/// Computed stably as `((Σ|c_n|)² − Σ|c_n|²) / 2` instead of the double sum.
pub fn negativity_spectral(state: &SchmidtState) -> f64 {
    let s1 = neumaier_sum(state.coeffs().iter().map(|c| c.norm()));
    let s2 = neumaier_sum(state.coeffs().iter().map(|c| c.norm_sqr()));
    ((s1 * s1 - s2) / 2.0).max(0.0)
}

/// Negativity in the ordered-pair (`n ≠ m`) convention: exactly twice
/// [`negativity_spectral`].
///
/// For `q = 0` and `N → ∞` this converges to `e^{2|ζ|}/I_0(2|ζ|) − 1`.
pub fn negativity_paper(state: &SchmidtState) -> f64 {
    2.0 * negativity_spectral(state)
}

/// Entropy of entanglement in bits: `−Σ_{p_n > 0} p_n log₂ p_n` over the
/// Schmidt probabilities (the reduced density matrix is diagonal with
/// exactly these eigenvalues).
pub fn entropy_of_entanglement(state: &SchmidtState) -> f64 {
    let probs = schmidt_probabilities(state);
    -neumaier_sum(
        probs
            .probs
            .iter()
            .filter(|&&p| p > 0.0)
            .map(|&p| p * p.log2()),
    )
}

/// Upper bound on the squared D-concurrence: `det(I − ρ_A) = ∏_{n<N} (1 − p_n)`.
///
/// Accumulated as `exp(Σ ln1p(−p_n))`; any `p_n ≥ 1` short-circuits the
/// product to an exact `0.0` instead of evaluating `ln 0`.
pub fn d_upper(state: &SchmidtState) -> f64 {
    let probs = schmidt_probabilities(state);
    if probs.probs.iter().any(|&p| p >= 1.0) {
        return 0.0;
    }
    neumaier_sum(probs.probs.iter().map(|&p| (-p).ln_1p())).exp()
}

/// `det(I − ρ)` of the truncated two-mode density matrix.
///
/// `ρ = vv†` has rank one, so `det(I − ρ) = 1 − ‖v‖²`: exactly the stored
/// truncation tail. Returning the stored value keeps the bound-gap identity
/// (`d_upper − d_lower = tail`) exact by construction.
pub fn det_i_minus_rho(state: &SchmidtState) -> f64 {
    state.tail()
}

/// Lower bound on the squared D-concurrence:
/// `∏(1 − p_n) − (1 − Σ p_n) = d_upper − det(I − ρ)`.
///
/// Nonnegative for every sub-normalized state (Weierstrass product
/// inequality), though the report still carries a clamped copy to absorb
/// rounding at the boundary.
pub fn d_lower(state: &SchmidtState) -> f64 {
    d_upper(state) - det_i_minus_rho(state)
}

/// Every measure of one state, plus the bookkeeping fields.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureReport {
    pub negativity_paper: f64,
    pub negativity_spectral: f64,
    pub entropy_bits: f64,
    pub d_lower: f64,
    pub d_upper: f64,
    pub d_lower_clamped: f64,
    pub tail: f64,
    pub truncation: usize,
}

impl MeasureReport {
    /// Serializes to a flat JSON object, keys in declaration order.
    pub fn to_json(&self) -> String {
        jsonfmt::JsonObject::new()
            .f64("negativity_paper", self.negativity_paper)
            .f64("negativity_spectral", self.negativity_spectral)
            .f64("entropy_bits", self.entropy_bits)
            .f64("d_lower", self.d_lower)
            .f64("d_upper", self.d_upper)
            .f64("d_lower_clamped", self.d_lower_clamped)
            .f64("tail", self.tail)
            .usize("truncation", self.truncation)
            .finish()
    }
}

/// Assembles all measures of a state and enforces the report's internal
/// identities: `d_lower ≤ d_upper`, gap = tail, and the exact factor-two
/// bridge between the negativity conventions.
pub fn measure_report(state: &SchmidtState) -> MeasureReport {
    let negativity_spectral = negativity_spectral(state);
    let negativity_paper = negativity_paper(state);
    let entropy_bits = entropy_of_entanglement(state);
    let upper = d_upper(state);
    let lower = d_lower(state);
    let tail = state.tail();
    assert!(lower <= upper, "bound ordering violated: {lower} > {upper}");
    assert!(
        ((upper - lower) - tail).abs() <= REPORT_IDENTITY_TOL,
        "bound gap {} deviates from tail {tail}",
        upper - lower
    );
    assert!(
        (negativity_paper - 2.0 * negativity_spectral).abs() <= REPORT_IDENTITY_TOL,
        "negativity conventions out of sync"
    );
    MeasureReport {
        negativity_paper,
        negativity_spectral,
        entropy_bits,
        d_lower: lower,
        d_upper: upper,
        d_lower_clamped: lower.max(0.0),
        tail,
        truncation: state.truncation(),
    }
}
