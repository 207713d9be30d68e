//! Numerically stable special functions: log-factorial, modified Bessel
//! function of the first kind `I_q`, and harmonic-oscillator eigenfunctions.
//!
//! Everything factorial-shaped is routed through [`log_factorial`] so that no
//! raw factorial is ever formed beyond `20!`; coefficients that would
//! overflow are carried as [`LogDomainValue`]s and exponentiated only at the
//! end.

use num_complex::Complex64;

use crate::{Error, Result};

/// Relative size at which a Bessel series term is considered converged.
const BESSEL_TERM_TOL: f64 = 1e-17;
/// Hard cap on the number of Bessel series terms.
const BESSEL_MAX_TERMS: usize = 500;

/// A complex value stored as `exp(log_magnitude) * sign_phase`.
///
/// `log_magnitude` is the natural log of the absolute value; `sign_phase` has
/// unit modulus (`±1` for real quantities). A true zero is the
/// `log_magnitude = -inf` sentinel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogDomainValue {
    /// Natural logarithm of the magnitude; `-inf` encodes zero.
    pub log_magnitude: f64,
    /// Unit-modulus phase factor.
    pub sign_phase: Complex64,
}

impl LogDomainValue {
    /// The exact zero sentinel.
    pub const ZERO: LogDomainValue = LogDomainValue {
        log_magnitude: f64::NEG_INFINITY,
        sign_phase: Complex64::new(1.0, 0.0),
    };

    /// Builds a value from its log-magnitude and a phase angle in radians.
    pub fn from_polar(log_magnitude: f64, angle: f64) -> Self {
        LogDomainValue {
            log_magnitude,
            sign_phase: Complex64::from_polar(1.0, angle),
        }
    }

    /// Reconstructs the ordinary complex value `exp(log_magnitude) * sign_phase`.
    pub fn value(&self) -> Complex64 {
        if self.log_magnitude == f64::NEG_INFINITY {
            Complex64::new(0.0, 0.0)
        } else {
            self.log_magnitude.exp() * self.sign_phase
        }
    }

    /// True when this is the zero sentinel.
    pub fn is_zero(&self) -> bool {
        self.log_magnitude == f64::NEG_INFINITY
    }
}

/// `n!` as an exact `f64` for `n <= 20` (every such factorial is exactly
/// representable; `2^18` divides `20!` and the odd part fits in 53 bits).
fn exact_factorial(n: u32) -> f64 {
    debug_assert!(n <= 20);
    let mut f = 1.0_f64;
    for k in 2..=n.max(1) {
        f *= f64::from(k);
    }
    f
}

/// Natural log of `n!`.
///
/// For `n <= 20` the factorial is accumulated exactly in `f64` and logged
/// once; for larger `n` the value continues as a running sum of `ln k` seeded
/// with the exact `ln 20!`. No asymptotic (Stirling/Lanczos) approximation is
/// used anywhere, so this routine and the series it feeds agree in strategy.
pub fn log_factorial(n: u32) -> f64 {
    if n <= 20 {
        return exact_factorial(n).ln();
    }
    let mut sum = exact_factorial(20).ln();
    for k in 21..=n {
        sum += f64::from(k).ln();
    }
    sum
}

/// Modified Bessel function of the first kind `I_q(x)` by its power series
///
/// ```text
/// I_q(x) = Σ_{n≥0} (x/2)^{2n+q} / (n! (n+q)!)
/// ```
///
/// summed until the term falls below `1e-17` of the running sum or 500 terms.
/// The order is a `u32`, so negative orders are unrepresentable; negative or
/// non-finite `x` is a domain error. For arguments large enough that `I_q(x)`
/// itself overflows, use [`bessel_i_ln`].
pub fn bessel_i(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "bessel_i requires finite x >= 0, got {x}"
        )));
    }
    let half = x / 2.0;
    let q = order;
    // First term (x/2)^q / q!; in log form once the direct form could overflow.
    let mut term = if q <= 20 {
        half.powi(q as i32) / exact_factorial(q)
    } else if half > 0.0 {
        (f64::from(q) * half.ln() - log_factorial(q)).exp()
    } else {
        0.0
    };
    let mut sum = term;
    let mut n = 0_usize;
    while term > BESSEL_TERM_TOL * sum && n < BESSEL_MAX_TERMS {
        n += 1;
        term *= half * half / (n as f64 * (n as f64 + f64::from(q)));
        sum += term;
    }
    Ok(sum)
}

/// `ln I_q(x)`: the log-domain variant of [`bessel_i`] for large arguments.
///
/// The series is evaluated with all terms in log space and combined by
/// log-sum-exp around the peak term, so the result stays finite for any `x`
/// whose peak term exponent fits an `f64` — far beyond the overflow point of
/// the direct series.
pub fn bessel_i_ln(order: u32, x: f64) -> Result<f64> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!(
            "bessel_i_ln requires finite x >= 0, got {x}"
        )));
    }
    if x == 0.0 {
        // I_0(0) = 1, I_q(0) = 0 for q >= 1.
        return Ok(if order == 0 { 0.0 } else { f64::NEG_INFINITY });
    }
    let q = f64::from(order);
    let ln_half = (x / 2.0).ln();
    let ln_term = |n: usize| -> f64 {
        let nf = n as f64;
        (2.0 * nf + q) * ln_half - log_factorial(n as u32) - log_factorial(n as u32 + order)
    };
    // The term ratio (x/2)^2 / ((n+1)(n+1+q)) crosses 1 near n* ~ x/2; find
    // the peak, then sum relative to it.
    let mut peak = 0_usize;
    while peak + 1 < BESSEL_MAX_TERMS && ln_term(peak + 1) > ln_term(peak) {
        peak += 1;
    }
    let ln_peak = ln_term(peak);
    let mut sum = 0.0_f64;
    for n in 0..BESSEL_MAX_TERMS {
        let rel = (ln_term(n) - ln_peak).exp();
        sum += rel;
        if n > peak && rel < BESSEL_TERM_TOL * sum {
            break;
        }
    }
    Ok(ln_peak + sum.ln())
}

/// Harmonic-oscillator eigenfunction `φ_n(x) = H_n(x) e^{-x²/2} / (2^n n! √π)^{1/2}`
/// in dimensionless coordinates (ℏ = m = ω = 1).
///
/// Computed by the three-term recurrence on the *normalized* functions,
///
/// ```text
/// φ_{n+1} = x √(2/(n+1)) φ_n − √(n/(n+1)) φ_{n−1},
/// ```
///
/// so no intermediate Hermite polynomial is formed and nothing overflows
/// (φ_n stays O(1) while H_n overflows near n ≈ 150).
pub fn oscillator_eigenfunction(n: u32, x: f64) -> f64 {
    *oscillator_eigenfunctions_upto(n, x)
        .last()
        .expect("nonempty")
}

/// All of `φ_0(x) ..= φ_{n_max}(x)` from a single recurrence pass.
///
/// Wavefunction evaluation needs a whole ladder of eigenfunctions per grid
/// point; this shares the recurrence instead of restarting it per order.
pub fn oscillator_eigenfunctions_upto(n_max: u32, x: f64) -> Vec<f64> {
    let pi_quarter_root = std::f64::consts::PI.sqrt().sqrt();
    let phi0 = (-x * x / 2.0).exp() / pi_quarter_root;
    let mut phis = Vec::with_capacity(n_max as usize + 1);
    phis.push(phi0);
    if n_max == 0 {
        return phis;
    }
    phis.push(std::f64::consts::SQRT_2 * x * phi0);
    for n in 1..n_max as usize {
        let nf = n as f64;
        let next = x * (2.0 / (nf + 1.0)).sqrt() * phis[n] - (nf / (nf + 1.0)).sqrt() * phis[n - 1];
        phis.push(next);
    }
    phis
}
