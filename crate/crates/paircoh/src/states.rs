//! Truncated Schmidt-form two-mode pure states, in particular the pair
//! coherent state.
//!
//! A pair coherent state with parameter `ζ` and degeneracy `q` expands over
//! the kets `|n+q, n⟩` with coefficients
//!
//! ```text
//! c_n = N_q ζ^n / √(n! (n+q)!),    N_q = [|ζ|^{-q} I_q(2|ζ|)]^{-1/2},
//! ```
//!
//! the unique reading under which `N_q` normalizes the state and the defining
//! eigenvalue relation `ab|ζ,q⟩ = ζ|ζ,q⟩` holds (for `q = 0` both reduce to
//! the familiar `N_0 ζ^n / n!`). Truncating at `N` keeps `c_0..c_{N-1}` of the
//! *full* normalized state: the truncated object is deliberately
//! sub-normalized, never re-normalized, and the discarded probability mass is
//! tracked explicitly as the `tail`. Several downstream quantities (the
//! determinant identity `det(I−ρ) = 1 − Σ|c_n|²` and the bound gap it equals)
//! are only nontrivial for exactly this sub-normalized object.

use num_complex::Complex64;

use crate::specfun::{bessel_i_ln, log_factorial, LogDomainValue};
use crate::util::neumaier_sum;
use crate::{jsonfmt, Error, Result};

/// Default hard cap on the truncation index search.
pub const DEFAULT_TRUNCATION_CAP: usize = 512;

/// Slack allowed on Σ|c_n|² above exact normalization (rounding noise).
const NORM_SLACK: f64 = 1e-12;

/// Parameters of a pair coherent state: complex `ζ` and degeneracy `q ≥ 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PairCoherentParams {
    zeta: Complex64,
    q: u32,
}

impl PairCoherentParams {
    /// Validates that `ζ` is finite. (`q` is a `u32`, so `q ≥ 0` holds by type.)
    pub fn new(zeta: Complex64, q: u32) -> Result<Self> {
        if !zeta.re.is_finite() || !zeta.im.is_finite() {
            return Err(Error::Domain(format!(
                "pair coherent state parameter zeta must be finite, got {zeta}"
            )));
        }
        Ok(PairCoherentParams { zeta, q })
    }

    pub fn zeta(&self) -> Complex64 {
        self.zeta
    }

    pub fn q(&self) -> u32 {
        self.q
    }
}

/// A truncated two-mode pure state in Schmidt form: `Σ_{n<N} c_n |n+q, n⟩`.
///
/// Constructed either from explicit coefficients ([`SchmidtState::new`]) or
/// as a pair coherent state ([`build_pcs`]). Immutable after construction;
/// the stored `tail` is `1 − Σ|c_n|²` (clamped at zero against rounding).
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtState {
    q: u32,
    coeffs: Vec<Complex64>,
    tail: f64,
    /// `ζ` when the state came from [`build_pcs`]; `None` for generic states.
    zeta: Option<Complex64>,
}

impl SchmidtState {
    /// Builds a generic Schmidt-form state from explicit coefficients.
    ///
    /// The coefficient vector must be non-empty, finite, and sub-normalized:
    /// `Σ|c_n|² ≤ 1 + 1e-12`.
    pub fn new(q: u32, coeffs: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Domain(
                "a Schmidt state needs at least one coefficient".into(),
            ));
        }
        if let Some(bad) = coeffs
            .iter()
            .find(|c| !c.re.is_finite() || !c.im.is_finite())
        {
            return Err(Error::Domain(format!(
                "Schmidt coefficients must be finite, got {bad}"
            )));
        }
        let norm_sq = neumaier_sum(coeffs.iter().map(|c| c.norm_sqr()));
        if norm_sq > 1.0 + NORM_SLACK {
            return Err(Error::Domain(format!(
                "Schmidt coefficients must be sub-normalized: sum of |c_n|^2 is {norm_sq}"
            )));
        }
        Ok(SchmidtState {
            q,
            coeffs,
            tail: (1.0 - norm_sq).max(0.0),
            zeta: None,
        })
    }

    /// Degeneracy parameter `q` (mode-A offset: `c_n` multiplies `|n+q, n⟩`).
    pub fn q(&self) -> u32 {
        self.q
    }

    /// Coefficients `c_0..c_{N-1}` of the full state, truncated.
    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    /// Truncation length `N`.
    pub fn truncation(&self) -> usize {
        self.coeffs.len()
    }

    /// Discarded probability mass `1 − Σ_{n<N} |c_n|²`.
    pub fn tail(&self) -> f64 {
        self.tail
    }

    /// The `ζ` this state was built from, if it is a pair coherent state.
    pub fn zeta(&self) -> Option<Complex64> {
        self.zeta
    }

    /// Serializes to `{q, zeta, coeffs, tail}` with `zeta: null` for generic
    /// states and every complex number as a `[re, im]` pair.
    pub fn to_json(&self) -> String {
        let zeta = match self.zeta {
            Some(z) => jsonfmt::fmt_complex(z.re, z.im),
            None => "null".to_string(),
        };
        let coeffs =
            jsonfmt::fmt_array(self.coeffs.iter().map(|c| jsonfmt::fmt_complex(c.re, c.im)));
        jsonfmt::JsonObject::new()
            .usize("q", self.q as usize)
            .raw("zeta", &zeta)
            .raw("coeffs", &coeffs)
            .f64("tail", self.tail)
            .finish()
    }
}

/// Schmidt probabilities `p_n = |c_n|²` plus the truncation tail.
#[derive(Debug, Clone, PartialEq)]
pub struct SchmidtProbabilities {
    pub probs: Vec<f64>,
    pub tail: f64,
}

/// Extracts `p_n = |c_n|²` and copies the tail through.
pub fn schmidt_probabilities(state: &SchmidtState) -> SchmidtProbabilities {
    SchmidtProbabilities {
        probs: state.coeffs.iter().map(|c| c.norm_sqr()).collect(),
        tail: state.tail,
    }
}

/// Log-magnitude of the pair-coherent coefficient `c_n` for `|ζ| = r > 0`.
fn ln_coeff_magnitude(ln_norm: f64, ln_r: f64, q: u32, n: usize) -> f64 {
    let n_u32 = u32::try_from(n).expect("truncation index fits u32");
    ln_norm + n as f64 * ln_r - 0.5 * (log_factorial(n_u32) + log_factorial(n_u32 + q))
}

/// `ln N_q = -½ (ln I_q(2r) − q ln r)` for `r > 0`.
fn ln_normalization(q: u32, r: f64) -> Result<f64> {
    Ok(-0.5 * (bessel_i_ln(q, 2.0 * r)? - f64::from(q) * r.ln()))
}

/// Builds the truncated pair coherent state with coefficients
/// `c_n = N_q ζ^n / √(n!(n+q)!)` for `n < truncation`.
///
/// Coefficients are assembled in the log domain (`ln|c_n|` plus a phase
/// `n·arg ζ`) and exponentiated once each, so no intermediate factorial or
/// power overflows. `ζ = 0` yields exactly `[1, 0, ..., 0]`.
pub fn build_pcs(params: &PairCoherentParams, truncation: usize) -> Result<SchmidtState> {
    if truncation == 0 {
        return Err(Error::InvalidArgument(
            "truncation must be at least 1".into(),
        ));
    }
    let zeta = params.zeta();
    let q = params.q();
    let r = zeta.norm();
    let coeffs = if r == 0.0 {
        let mut c = vec![Complex64::new(0.0, 0.0); truncation];
        c[0] = Complex64::new(1.0, 0.0);
        c
    } else {
        let ln_norm = ln_normalization(q, r)?;
        let ln_r = r.ln();
        let theta = zeta.arg();
        (0..truncation)
            .map(|n| {
                LogDomainValue::from_polar(
                    ln_coeff_magnitude(ln_norm, ln_r, q, n),
                    n as f64 * theta,
                )
                .value()
            })
            .collect()
    };
    let mut state = SchmidtState::new(q, coeffs)?;
    state.zeta = Some(zeta);
    Ok(state)
}

/// Smallest truncation `N` whose analytically bounded tail `Σ_{n≥N} p_n`
/// falls below `epsilon`, using [`DEFAULT_TRUNCATION_CAP`].
///
/// The tail is majorized geometrically: once the amplitude ratio
/// `|c_{n+1}/c_n| = r/√((n+1)(n+1+q))` drops below `1/2` at `n = N`, the tail
/// from `N` is at most `p_N / (1 − ratio²)`.
pub fn truncation_for_tolerance(params: &PairCoherentParams, epsilon: f64) -> Result<usize> {
    truncation_for_tolerance_with_cap(params, epsilon, DEFAULT_TRUNCATION_CAP)
}

/// [`truncation_for_tolerance`] with an explicit hard cap on `N`.
pub fn truncation_for_tolerance_with_cap(
    params: &PairCoherentParams,
    epsilon: f64,
    cap: usize,
) -> Result<usize> {
    if !(epsilon > 0.0 && epsilon < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "truncation tolerance must lie in (0, 1), got {epsilon}"
        )));
    }
    let q = params.q();
    let r = params.zeta().norm();
    if r == 0.0 {
        return Ok(1);
    }
    let ln_norm = ln_normalization(q, r)?;
    let ln_r = r.ln();
    for n in 1..=cap {
        let ratio = r / (((n + 1) as f64) * ((n + 1 + q as usize) as f64)).sqrt();
        if ratio >= 0.5 {
            continue;
        }
        let p_n = (2.0 * ln_coeff_magnitude(ln_norm, ln_r, q, n)).exp();
        if p_n / (1.0 - ratio * ratio) < epsilon {
            return Ok(n);
        }
    }
    Err(Error::TruncationCap { cap, epsilon })
}
