//! Brute-force dense linear algebra on the truncated two-mode Hilbert space.
//!
//! Everything here deliberately ignores the closed forms of the
//! `entanglement` module: the density matrix is materialized entry by entry,
//! partially transposed by index shuffling, and diagonalized/decomposed with
//! textbook algorithms (cyclic Jacobi, LU with partial pivoting). The payoff
//! is [`verify_report`], which confronts every closed form with its dense
//! counterpart and reports the deviations as data.
//!
//! The composite basis is a-major: the ket `|i_a, j_b⟩` sits at index
//! `i_a · N_b + j_b` with local dimensions `N_a = N + q` and `N_b = N`. This
//! layout is fixed so the partial-transpose index arithmetic is reproducible.

use num_complex::Complex64;

use crate::entanglement::{d_upper, entropy_of_entanglement, negativity_paper, pt_spectrum};
use crate::jsonfmt;
use crate::specfun::LogDomainValue;
use crate::states::{schmidt_probabilities, SchmidtState};
use crate::{Error, Result};

/// Default cap on the dense matrix dimension `N_a · N_b`.
pub const DEFAULT_DIM_CAP: usize = 400;
/// Default stopping tolerance on the off-diagonal Frobenius norm in Jacobi.
pub const DEFAULT_JACOBI_TOL: f64 = 1e-12;
/// Hard cap on Jacobi sweeps before reporting non-convergence.
const JACOBI_SWEEP_CAP: usize = 100;
/// Max allowed entrywise deviation from Hermitian symmetry.
const HERMITICITY_TOL: f64 = 1e-14;
/// Reduced-matrix eigenvalues at or below this are treated as exact zeros
/// when reconstructing the entropy (Jacobi noise sits well below it).
const ENTROPY_EIG_CUTOFF: f64 = 1e-15;

/// A square complex matrix in row-major storage.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    entries: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn zeros(dim: usize) -> Self {
        DenseMatrix {
            dim,
            entries: vec![Complex64::new(0.0, 0.0); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = DenseMatrix::zeros(dim);
        for i in 0..dim {
            m.set(i, i, Complex64::new(1.0, 0.0));
        }
        m
    }

    /// Builds a matrix from explicit rows; every row must have the same
    /// length as the number of rows.
    pub fn from_rows(rows: Vec<Vec<Complex64>>) -> Result<Self> {
        let dim = rows.len();
        if let Some(bad) = rows.iter().find(|r| r.len() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "row of length {} in a {dim}x{dim} matrix",
                bad.len()
            )));
        }
        Ok(DenseMatrix {
            dim,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    pub fn set(&mut self, i: usize, j: usize, value: Complex64) {
        self.entries[i * self.dim + j] = value;
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Entrywise difference `self − other`.
    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!(
                "{} vs {}",
                self.dim, other.dim
            )));
        }
        Ok(DenseMatrix {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(a, b)| a - b)
                .collect(),
        })
    }

    /// Max entrywise deviation from Hermitian symmetry.
    fn hermiticity_defect(&self) -> f64 {
        let mut worst = 0.0_f64;
        for i in 0..self.dim {
            for j in i..self.dim {
                let dev = (self.get(i, j) - self.get(j, i).conj()).norm();
                worst = worst.max(dev);
            }
        }
        worst
    }

    fn has_complex_entries(&self) -> bool {
        self.entries.iter().any(|c| c.im != 0.0)
    }
}

/// Dense `ρ = |ψ⟩⟨ψ|` of the truncated state with [`DEFAULT_DIM_CAP`].
pub fn dense_rho(state: &SchmidtState) -> Result<DenseMatrix> {
    dense_rho_with_cap(state, DEFAULT_DIM_CAP)
}

/// Dense `ρ` with an explicit cap on the composite dimension `N_a · N_b`.
pub fn dense_rho_with_cap(state: &SchmidtState, cap: usize) -> Result<DenseMatrix> {
    let (n_a, n_b) = local_dims(state);
    let dim = n_a * n_b;
    if dim > cap {
        return Err(Error::OracleCap { dim, cap });
    }
    let q = state.q() as usize;
    let mut vector = vec![Complex64::new(0.0, 0.0); dim];
    for (n, &c) in state.coeffs().iter().enumerate() {
        vector[(n + q) * n_b + n] = c;
    }
    let mut rho = DenseMatrix::zeros(dim);
    for i in 0..dim {
        for j in 0..dim {
            rho.set(i, j, vector[i] * vector[j].conj());
        }
    }
    Ok(rho)
}

/// Local dimensions `(N_a, N_b) = (N + q, N)` of a state's composite space.
pub fn local_dims(state: &SchmidtState) -> (usize, usize) {
    let n = state.truncation();
    (n + state.q() as usize, n)
}

/// Transpose on subsystem B: `⟨i_a j_b| ρ^{T_B} |k_a l_b⟩ = ⟨i_a l_b| ρ |k_a j_b⟩`.
pub fn partial_transpose(m: &DenseMatrix, dims: (usize, usize)) -> Result<DenseMatrix> {
    let (n_a, n_b) = dims;
    if n_a * n_b != m.dim() {
        return Err(Error::DimensionMismatch(format!(
            "local dims {n_a}x{n_b} do not factor matrix dim {}",
            m.dim()
        )));
    }
    let mut out = DenseMatrix::zeros(m.dim());
    for i_a in 0..n_a {
        for j_b in 0..n_b {
            for k_a in 0..n_a {
                for l_b in 0..n_b {
                    out.set(
                        i_a * n_b + j_b,
                        k_a * n_b + l_b,
                        m.get(i_a * n_b + l_b, k_a * n_b + j_b),
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Off-diagonal Frobenius norm of a real symmetric matrix in row-major form.
fn off_diagonal_norm(a: &[f64], d: usize) -> f64 {
    let mut sum = 0.0;
    for p in 0..d {
        for q in p + 1..d {
            sum += a[p * d + q] * a[p * d + q];
        }
    }
    (2.0 * sum).sqrt()
}

/// One cyclic Jacobi sweep: rotate away every off-diagonal pair once.
fn jacobi_sweep(a: &mut [f64], d: usize) {
    for p in 0..d {
        for q in p + 1..d {
            let apq = a[p * d + q];
            if apq == 0.0 {
                continue;
            }
            let tau = (a[q * d + q] - a[p * d + p]) / (2.0 * apq);
            let t = if tau >= 0.0 {
                1.0 / (tau + (1.0 + tau * tau).sqrt())
            } else {
                -1.0 / (-tau + (1.0 + tau * tau).sqrt())
            };
            let c = 1.0 / (1.0 + t * t).sqrt();
            let s = t * c;
            for k in 0..d {
                let akp = a[k * d + p];
                let akq = a[k * d + q];
                a[k * d + p] = c * akp - s * akq;
                a[k * d + q] = s * akp + c * akq;
            }
            for k in 0..d {
                let apk = a[p * d + k];
                let aqk = a[q * d + k];
                a[p * d + k] = c * apk - s * aqk;
                a[q * d + k] = s * apk + c * aqk;
            }
        }
    }
}

/// Eigenvalues of a real symmetric matrix by cyclic Jacobi iteration.
fn jacobi_eigenvalues(mut a: Vec<f64>, d: usize, tol: f64) -> Result<Vec<f64>> {
    let mut sweeps = 0;
    let mut off = off_diagonal_norm(&a, d);
    while off >= tol {
        if sweeps == JACOBI_SWEEP_CAP {
            return Err(Error::NoConvergence {
                sweeps,
                off_norm: off,
            });
        }
        jacobi_sweep(&mut a, d);
        sweeps += 1;
        off = off_diagonal_norm(&a, d);
    }
    let mut eigs: Vec<f64> = (0..d).map(|i| a[i * d + i]).collect();
    eigs.sort_by(f64::total_cmp);
    Ok(eigs)
}

/// All eigenvalues of a Hermitian matrix, sorted ascending.
///
/// Real symmetric input is diagonalized directly. Complex Hermitian input
/// `X + iY` is realified to the symmetric `[[X, −Y], [Y, X]]` of doubled
/// dimension, whose spectrum is the original one with every eigenvalue
/// doubled; the duplicates are merged pairwise after sorting.
pub fn sym_eigenvalues(m: &DenseMatrix, tol: f64) -> Result<Vec<f64>> {
    let defect = m.hermiticity_defect();
    if defect > HERMITICITY_TOL {
        return Err(Error::NotHermitian(defect));
    }
    let d = m.dim();
    if !m.has_complex_entries() {
        let a: Vec<f64> = m.entries.iter().map(|c| c.re).collect();
        return jacobi_eigenvalues(a, d, tol);
    }
    // Realification: real part is symmetric, imaginary part antisymmetric.
    let dd = 2 * d;
    let mut a = vec![0.0_f64; dd * dd];
    for i in 0..d {
        for j in 0..d {
            let z = m.get(i, j);
            a[i * dd + j] = z.re;
            a[(i + d) * dd + (j + d)] = z.re;
            a[i * dd + (j + d)] = -z.im;
            a[(i + d) * dd + j] = z.im;
        }
    }
    let doubled = jacobi_eigenvalues(a, dd, tol)?;
    Ok(doubled
        .chunks_exact(2)
        .map(|pair| 0.5 * (pair[0] + pair[1]))
        .collect())
}

/// LU elimination with partial pivoting; returns the pivot diagonal and the
/// permutation sign, or `None` when a pivot column vanishes (singular).
fn lu_pivots(m: &DenseMatrix) -> Option<(Vec<Complex64>, f64)> {
    let d = m.dim();
    let mut a = m.entries.clone();
    let mut sign = 1.0_f64;
    let mut pivots = Vec::with_capacity(d);
    for k in 0..d {
        let (best_row, best_mag) = (k..d)
            .map(|r| (r, a[r * d + k].norm()))
            .max_by(|x, y| x.1.total_cmp(&y.1))
            .expect("nonempty pivot search");
        if best_mag == 0.0 {
            return None;
        }
        if best_row != k {
            for j in 0..d {
                a.swap(k * d + j, best_row * d + j);
            }
            sign = -sign;
        }
        let pivot = a[k * d + k];
        pivots.push(pivot);
        for i in k + 1..d {
            let factor = a[i * d + k] / pivot;
            a[i * d + k] = Complex64::new(0.0, 0.0);
            for j in k + 1..d {
                let sub = factor * a[k * d + j];
                a[i * d + j] -= sub;
            }
        }
    }
    Some((pivots, sign))
}

/// Determinant via LU with partial pivoting; singular matrices yield `0`.
pub fn determinant(m: &DenseMatrix) -> Complex64 {
    match lu_pivots(m) {
        None => Complex64::new(0.0, 0.0),
        Some((pivots, sign)) => sign * pivots.into_iter().product::<Complex64>(),
    }
}

/// Log-domain determinant for dimensions where the pivot product would
/// over- or underflow: magnitudes accumulate as a sum of logs, phases as a
/// unit-modulus product.
pub fn determinant_log(m: &DenseMatrix) -> LogDomainValue {
    match lu_pivots(m) {
        None => LogDomainValue::ZERO,
        Some((pivots, sign)) => {
            let mut log_magnitude = 0.0_f64;
            let mut phase = Complex64::new(sign, 0.0);
            for p in pivots {
                log_magnitude += p.norm().ln();
                phase *= p / p.norm();
            }
            LogDomainValue {
                log_magnitude,
                sign_phase: phase,
            }
        }
    }
}

/// Reduced matrix `ρ_A` by explicit partial trace over subsystem B,
/// with [`DEFAULT_DIM_CAP`] applied to the intermediate dense `ρ`.
pub fn dense_rho_a(state: &SchmidtState) -> Result<DenseMatrix> {
    dense_rho_a_with_cap(state, DEFAULT_DIM_CAP)
}

/// [`dense_rho_a`] with an explicit cap.
///
/// Deliberately routed through the full `ρ` and the sum
/// `ρ_A[i_a, k_a] = Σ_{j_b} ρ[i_a j_b, k_a j_b]` rather than copying the
/// closed-form diagonal, so it remains an independent witness.
pub fn dense_rho_a_with_cap(state: &SchmidtState, cap: usize) -> Result<DenseMatrix> {
    let rho = dense_rho_with_cap(state, cap)?;
    let (n_a, n_b) = local_dims(state);
    let mut rho_a = DenseMatrix::zeros(n_a);
    for i_a in 0..n_a {
        for k_a in 0..n_a {
            let sum: Complex64 = (0..n_b)
                .map(|j_b| rho.get(i_a * n_b + j_b, k_a * n_b + j_b))
                .sum();
            rho_a.set(i_a, k_a, sum);
        }
    }
    Ok(rho_a)
}

/// One closed-form-vs-oracle comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationCheck {
    pub check_name: String,
    pub max_abs_dev: f64,
    pub tol: f64,
    pub pass: bool,
}

/// The full set of comparisons for one state. Failures are data, not errors.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub checks: Vec<VerificationCheck>,
}

impl VerificationReport {
    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    /// Serializes as a JSON list of `{check_name, max_abs_dev, tol, pass}`.
    pub fn to_json(&self) -> String {
        jsonfmt::fmt_array(self.checks.iter().map(|c| {
            jsonfmt::JsonObject::new()
                .str("check_name", &c.check_name)
                .f64("max_abs_dev", c.max_abs_dev)
                .f64("tol", c.tol)
                .bool("pass", c.pass)
                .finish()
        }))
    }
}

fn check(name: &str, dev: f64, tol: f64) -> VerificationCheck {
    VerificationCheck {
        check_name: name.to_string(),
        max_abs_dev: dev,
        tol,
        pass: dev < tol,
    }
}

/// Max pairwise deviation between two sorted eigenvalue multisets.
fn multiset_deviation(mut a: Vec<f64>, mut b: Vec<f64>) -> f64 {
    assert_eq!(a.len(), b.len(), "multisets must have equal cardinality");
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    a.iter()
        .zip(&b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Runs every closed-form-vs-dense comparison at tolerance `tol` with
/// [`DEFAULT_DIM_CAP`].
pub fn verify_report(state: &SchmidtState, tol: f64) -> Result<VerificationReport> {
    verify_report_with_cap(state, tol, DEFAULT_DIM_CAP)
}

/// [`verify_report`] with an explicit dense-dimension cap.
pub fn verify_report_with_cap(
    state: &SchmidtState,
    tol: f64,
    cap: usize,
) -> Result<VerificationReport> {
    let rho = dense_rho_with_cap(state, cap)?;
    let dims = local_dims(state);
    let dim = rho.dim();
    let probs = schmidt_probabilities(state);
    let mut checks = Vec::new();

    // 1. PT spectrum multiset: closed-form eigenvalues (padded with the
    //    structural zeros of the q-offset sector) vs dense eigenvalues.
    let pt_dense = partial_transpose(&rho, dims)?;
    let pt_eigs = sym_eigenvalues(&pt_dense, DEFAULT_JACOBI_TOL)?;
    let mut closed = pt_spectrum(state).eigenvalues();
    closed.resize(dim, 0.0);
    checks.push(check(
        "pt_spectrum_multiset",
        multiset_deviation(closed, pt_eigs.clone()),
        tol,
    ));

    // 2. Negativity vs the dense negative-eigenvalue sum (ordered-pair
    //    convention: twice the unordered spectral sum).
    let neg_sum: f64 = pt_eigs.iter().filter(|&&l| l < 0.0).sum();
    checks.push(check(
        "negativity_vs_pt",
        (negativity_paper(state) - 2.0 * neg_sum.abs()).abs(),
        tol,
    ));

    // 3. det(I − ρ) vs the truncation tail (rank-one determinant identity).
    let det_full = determinant(&DenseMatrix::identity(dim).sub(&rho)?);
    checks.push(check(
        "det_i_minus_rho",
        (det_full - Complex64::new(state.tail(), 0.0)).norm(),
        tol,
    ));

    // 4. det(I − ρ_A) vs the closed-form product ∏(1 − p_n).
    let rho_a = dense_rho_a_with_cap(state, cap)?;
    let det_reduced = determinant(&DenseMatrix::identity(rho_a.dim()).sub(&rho_a)?);
    checks.push(check(
        "det_i_minus_rho_a",
        (det_reduced - Complex64::new(d_upper(state), 0.0)).norm(),
        tol,
    ));

    // 5. Entropy recomputed from the dense ρ_A spectrum.
    let rho_a_eigs = sym_eigenvalues(&rho_a, DEFAULT_JACOBI_TOL)?;
    let dense_entropy: f64 = -rho_a_eigs
        .iter()
        .filter(|&&p| p > ENTROPY_EIG_CUTOFF)
        .map(|&p| p * p.log2())
        .sum::<f64>();
    checks.push(check(
        "entropy_vs_rho_a",
        (dense_entropy - entropy_of_entanglement(state)).abs(),
        tol,
    ));

    // 6. ρ_A spectrum vs Schmidt probabilities (padded with q zeros).
    let mut expected = probs.probs.clone();
    expected.resize(rho_a.dim(), 0.0);
    checks.push(check(
        "rho_a_eigs_vs_probs",
        multiset_deviation(expected, rho_a_eigs),
        tol,
    ));

    Ok(VerificationReport { checks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    use crate::states::{build_pcs, PairCoherentParams};

    fn pcs(zeta: Complex64, q: u32, n: usize) -> SchmidtState {
        build_pcs(&PairCoherentParams::new(zeta, q).unwrap(), n).unwrap()
    }

    fn re(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    fn im(x: f64) -> Complex64 {
        Complex64::new(0.0, x)
    }

    #[test]
    fn identity_eigenvalues() {
        let eigs = sym_eigenvalues(&DenseMatrix::identity(3), 1e-12).unwrap();
        assert_eq!(eigs, vec![1.0, 1.0, 1.0]);
    }

    #[test]
    fn pauli_x_spectrum() {
        let m =
            DenseMatrix::from_rows(vec![vec![re(0.0), re(1.0)], vec![re(1.0), re(0.0)]]).unwrap();
        let eigs = sym_eigenvalues(&m, 1e-12).unwrap();
        assert_abs_diff_eq!(eigs[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn complex_hermitian_goes_through_realification() {
        // σ_y = [[0, −i], [i, 0]] has spectrum ±1.
        let m =
            DenseMatrix::from_rows(vec![vec![re(0.0), im(-1.0)], vec![im(1.0), re(0.0)]]).unwrap();
        let eigs = sym_eigenvalues(&m, 1e-12).unwrap();
        assert_eq!(eigs.len(), 2);
        assert_abs_diff_eq!(eigs[0], -1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(eigs[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn non_hermitian_input_is_rejected() {
        let m =
            DenseMatrix::from_rows(vec![vec![re(0.0), re(1.0)], vec![re(0.0), re(0.0)]]).unwrap();
        assert!(matches!(
            sym_eigenvalues(&m, 1e-12),
            Err(Error::NotHermitian(_))
        ));
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let state = pcs(re(1.7), 1, 8);
        let rho = dense_rho(&state).unwrap();
        let eigs = sym_eigenvalues(&rho, DEFAULT_JACOBI_TOL).unwrap();
        let total: f64 = eigs.iter().sum();
        assert_abs_diff_eq!(total, rho.trace().re, epsilon = 1e-11);
    }

    #[test]
    fn determinant_reference_cases() {
        assert_eq!(determinant(&DenseMatrix::identity(5)), re(1.0));

        let state = pcs(re(1.0), 0, 6);
        let probs = schmidt_probabilities(&state);
        let mut diag = DenseMatrix::zeros(6);
        for (n, &p) in probs.probs.iter().enumerate() {
            diag.set(n, n, re(1.0 - p));
        }
        let product: f64 = probs.probs.iter().map(|&p| 1.0 - p).product();
        assert_abs_diff_eq!(determinant(&diag).re, product, epsilon = 1e-13);

        // Singular matrix (second row is twice the first).
        let singular =
            DenseMatrix::from_rows(vec![vec![re(1.0), re(2.0)], vec![re(2.0), re(4.0)]]).unwrap();
        assert_eq!(determinant(&singular), re(0.0));
    }

    #[test]
    fn determinant_tracks_permutation_sign() {
        let swap =
            DenseMatrix::from_rows(vec![vec![re(0.0), re(1.0)], vec![re(1.0), re(0.0)]]).unwrap();
        assert_abs_diff_eq!(determinant(&swap).re, -1.0, epsilon = 1e-15);

        // Cyclic permutation of three rows: even, determinant +1.
        let cycle = DenseMatrix::from_rows(vec![
            vec![re(0.0), re(1.0), re(0.0)],
            vec![re(0.0), re(0.0), re(1.0)],
            vec![re(1.0), re(0.0), re(0.0)],
        ])
        .unwrap();
        assert_abs_diff_eq!(determinant(&cycle).re, 1.0, epsilon = 1e-15);
    }

    #[test]
    fn log_determinant_agrees_with_direct() {
        let m = DenseMatrix::from_rows(vec![
            vec![re(2.0), re(0.5), im(0.25)],
            vec![re(-1.0), re(3.0), re(0.0)],
            vec![im(0.5), re(1.0), re(1.5)],
        ])
        .unwrap();
        let direct = determinant(&m);
        let logged = determinant_log(&m).value();
        assert_relative_eq!(direct.re, logged.re, max_relative = 1e-13);
        assert_relative_eq!(direct.im, logged.im, max_relative = 1e-13);

        let singular =
            DenseMatrix::from_rows(vec![vec![re(1.0), re(2.0)], vec![re(2.0), re(4.0)]]).unwrap();
        assert!(determinant_log(&singular).is_zero());
    }

    #[test]
    fn dense_rho_basics() {
        let trivial = SchmidtState::new(0, vec![re(1.0)]).unwrap();
        let rho = dense_rho(&trivial).unwrap();
        assert_eq!(rho.dim(), 1);
        assert_eq!(rho.get(0, 0), re(1.0));

        let state = pcs(re(1.3), 2, 5);
        let rho = dense_rho(&state).unwrap();
        assert_eq!(rho.dim(), 7 * 5);
        let prob_sum: f64 = schmidt_probabilities(&state).probs.iter().sum();
        assert_abs_diff_eq!(rho.trace().re, prob_sum, epsilon = 1e-14);
        assert_abs_diff_eq!(rho.trace().im, 0.0, epsilon = 1e-16);
    }

    #[test]
    fn dense_rho_is_rank_one() {
        let state = pcs(re(1.0), 0, 3);
        let rho = dense_rho(&state).unwrap();
        let eigs = sym_eigenvalues(&rho, DEFAULT_JACOBI_TOL).unwrap();
        let prob_sum: f64 = schmidt_probabilities(&state).probs.iter().sum();
        assert_abs_diff_eq!(*eigs.last().unwrap(), prob_sum, epsilon = 1e-11);
        for &e in &eigs[..eigs.len() - 1] {
            assert!(e.abs() < 1e-10, "second eigenvalue too large: {e}");
        }
    }

    #[test]
    fn dense_rho_respects_cap() {
        let state = pcs(re(1.0), 0, 25);
        assert!(matches!(
            dense_rho(&state),
            Err(Error::OracleCap { dim: 625, cap: 400 })
        ));
        assert!(dense_rho_with_cap(&state, 700).is_ok());
    }

    #[test]
    fn partial_transpose_is_an_involution() {
        let state = pcs(Complex64::new(0.9, 0.4), 1, 4);
        let rho = dense_rho(&state).unwrap();
        let dims = local_dims(&state);
        let pt = partial_transpose(&rho, dims).unwrap();
        let back = partial_transpose(&pt, dims).unwrap();
        assert_eq!(back, rho);
        assert_abs_diff_eq!(pt.trace().re, rho.trace().re, epsilon = 1e-14);
        assert!(matches!(
            partial_transpose(&rho, (3, 4)),
            Err(Error::DimensionMismatch(_))
        ));
    }

    #[test]
    fn pt_spectrum_matches_closed_form_blocks() {
        let state = pcs(re(1.0), 0, 4);
        let rho = dense_rho(&state).unwrap();
        let pt = partial_transpose(&rho, local_dims(&state)).unwrap();
        let dense = sym_eigenvalues(&pt, DEFAULT_JACOBI_TOL).unwrap();
        let mut closed = pt_spectrum(&state).eigenvalues();
        closed.resize(dense.len(), 0.0);
        assert!(multiset_deviation(closed, dense) < 1e-10);
    }

    #[test]
    fn reduced_matrix_is_diagonal_with_schmidt_probabilities() {
        let trivial = SchmidtState::new(0, vec![re(1.0)]).unwrap();
        assert_eq!(dense_rho_a(&trivial).unwrap().get(0, 0), re(1.0));

        let state = pcs(Complex64::from_polar(1.2, 0.9), 2, 6);
        let rho_a = dense_rho_a(&state).unwrap();
        assert_eq!(rho_a.dim(), 8);
        for i in 0..rho_a.dim() {
            for j in 0..rho_a.dim() {
                if i != j {
                    assert!(rho_a.get(i, j).norm() < 1e-14);
                }
            }
        }
        let eigs = sym_eigenvalues(&rho_a, DEFAULT_JACOBI_TOL).unwrap();
        let mut expected = schmidt_probabilities(&state).probs;
        expected.resize(rho_a.dim(), 0.0);
        assert!(multiset_deviation(expected, eigs) < 1e-12);
    }

    #[test]
    fn verification_passes_on_reference_states() {
        let vacuum = pcs(re(0.0), 0, 4);
        let report = verify_report(&vacuum, 1e-12).unwrap();
        assert!(report.all_pass());
        assert!(report.checks.iter().all(|c| c.max_abs_dev == 0.0));

        let report = verify_report(&pcs(re(1.0), 0, 10), 1e-10).unwrap();
        assert!(report.all_pass(), "deviations: {:?}", report.checks);

        let report = verify_report(&pcs(re(2.5), 2, 12), 1e-9).unwrap();
        assert!(report.all_pass(), "deviations: {:?}", report.checks);
    }

    #[test]
    fn verification_report_serializes_as_check_list() {
        let report = verify_report(&pcs(re(0.3), 1, 4), 1e-9).unwrap();
        let v: serde_json::Value = serde_json::from_str(&report.to_json()).unwrap();
        let list = v.as_array().unwrap();
        assert_eq!(list.len(), report.checks.len());
        assert_eq!(list[0]["check_name"], "pt_spectrum_multiset");
        assert!(list[0]["pass"].as_bool().unwrap());
        assert!(list[0]["max_abs_dev"].as_f64().unwrap() < 1e-9);
        assert_eq!(list[0]["tol"].as_f64().unwrap(), 1e-9);
    }

    #[test]
    fn verification_fails_honestly_below_noise_floor() {
        let report = verify_report(&pcs(re(1.0), 0, 10), 1e-18).unwrap();
        assert!(!report.all_pass());
    }
}
