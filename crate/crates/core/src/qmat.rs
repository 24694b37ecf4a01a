//! Dense complex-matrix backbone: Hermitian eigendecomposition, singular
//! values, trace norm, and fractional powers of positive-semidefinite
//! matrices. Everything here is small and dense (a few hundred rows at most).

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type Complex64 = num_complex::Complex<f64>;
/// Dense complex matrix.
pub type CMatrix = DMatrix<Complex64>;
/// Dense complex column vector.
pub type CVector = DVector<Complex64>;

/// Frobenius tolerance for Hermiticity checks.
pub const HERMITICITY_TOL: f64 = 1e-9;
/// Eigenvalues below this (negative) threshold fail positivity checks;
/// anything in (-NEG_EIG_TOL, 0) is treated as roundoff and clipped to zero.
pub const NEG_EIG_TOL: f64 = 1e-10;

/// Default numerical-rank cutoff, relative to the largest eigenvalue.
pub fn default_rank_tol(max_eigenvalue: f64) -> f64 {
    1e-9 * max_eigenvalue.max(0.0)
}

/// Eigendecomposition of a Hermitian matrix, eigenvalues in nonincreasing
/// order with matching orthonormal eigenvector columns.
#[derive(Debug, Clone)]
pub struct HermitianSpectrum {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: CMatrix,
}

impl HermitianSpectrum {
    /// Rebuild `V diag(lambda) V^H`.
    pub fn reconstruct(&self) -> CMatrix {
        let d = CMatrix::from_diagonal(
            &DVector::from_iterator(
                self.eigenvalues.len(),
                self.eigenvalues.iter().map(|&x| Complex64::new(x, 0.0)),
            ),
        );
        &self.eigenvectors * d * self.eigenvectors.adjoint()
    }
}

fn hermiticity_deviation(m: &CMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

/// Eigendecomposition of a Hermitian matrix.
///
/// With `symmetrize` set the input is replaced by `(M + M^H)/2` first;
/// otherwise the Frobenius distance to the adjoint must stay below
/// [`HERMITICITY_TOL`]. Eigenvalues are sorted by descending value, ties
/// broken by original position, so the output is deterministic given the
/// input bits.
pub fn hermitian_eig(m: &CMatrix, symmetrize: bool) -> Result<HermitianSpectrum> {
    if m.nrows() != m.ncols() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    let work = if symmetrize {
        (m + m.adjoint()).scale(0.5)
    } else {
        let dev = hermiticity_deviation(m);
        if dev > HERMITICITY_TOL {
            return Err(Error::NotHermitian { deviation: dev });
        }
        m.clone()
    };
    let n = work.nrows();
    let eig = nalgebra::SymmetricEigen::new(work);
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("Hermitian eigenvalues are finite")
            .then(a.cmp(&b))
    });
    let eigenvalues: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut eigenvectors = CMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        eigenvectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok(HermitianSpectrum {
        eigenvalues,
        eigenvectors,
    })
}

/// Singular values of an arbitrary complex matrix, nonnegative and
/// nonincreasing; the count equals `min(rows, cols)`.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    let mut sv: Vec<f64> = m
        .clone()
        .singular_values()
        .iter()
        .map(|&s| s.max(0.0))
        .collect();
    sv.sort_by(|a, b| b.partial_cmp(a).expect("singular values are finite"));
    sv
}

/// Trace norm `|M|_1 = Tr sqrt(M M^H)`, the sum of singular values.
pub fn trace_norm(m: &CMatrix) -> f64 {
    singular_values(m).iter().sum()
}

/// `Tr M^alpha` for a positive-semidefinite `M` and `alpha` in `[0, 1/2]`.
///
/// Eigenvalues at or below `rank_tol` (default [`default_rank_tol`] of the
/// largest eigenvalue) contribute nothing; in particular `0^0 = 0` here, so
/// `alpha = 0` returns the numerical rank. Eigenvalues below
/// `-`[`NEG_EIG_TOL`] are rejected as [`Error::NotPsd`].
pub fn trace_power(m: &CMatrix, alpha: f64, rank_tol: Option<f64>) -> Result<f64> {
    assert!(
        (0.0..=0.5).contains(&alpha),
        "trace_power requires alpha in [0, 1/2], got {alpha}"
    );
    let spectrum = hermitian_eig(m, true)?;
    let min = spectrum
        .eigenvalues
        .last()
        .copied()
        .unwrap_or(0.0);
    if min < -NEG_EIG_TOL {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let max = spectrum.eigenvalues.first().copied().unwrap_or(0.0);
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(max));
    Ok(spectrum
        .eigenvalues
        .iter()
        .filter(|&&x| x > tol)
        .map(|&x| x.powf(alpha))
        .sum())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::RngExt;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> CMatrix {
        CMatrix::from_fn(rows, cols, |_, _| {
            c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        })
    }

    /// Haar-ish unitary from the QR of a square random matrix.
    fn random_unitary(rng: &mut ChaCha12Rng, n: usize) -> CMatrix {
        let qr = random_matrix(rng, n, n).qr();
        qr.q()
    }

    #[test]
    fn eig_identity() {
        let m = CMatrix::identity(2, 2);
        let s = hermitian_eig(&m, false).unwrap();
        assert_relative_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.eigenvalues[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_diagonal_sorted() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.3, 0.0), c(0.7, 0.0)]));
        let s = hermitian_eig(&m, false).unwrap();
        assert_relative_eq!(s.eigenvalues[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(s.eigenvalues[1], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn eig_rank_one_projector() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0), c(0.5, 0.0)]);
        let s = hermitian_eig(&m, false).unwrap();
        assert_relative_eq!(s.eigenvalues[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(s.eigenvalues[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn eig_rejects_non_square() {
        let m = CMatrix::zeros(2, 3);
        assert!(matches!(
            hermitian_eig(&m, false),
            Err(Error::NonSquare { .. })
        ));
    }

    #[test]
    fn eig_rejects_non_hermitian_unless_symmetrized() {
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        assert!(matches!(
            hermitian_eig(&m, false),
            Err(Error::NotHermitian { .. })
        ));
        // Symmetrized it becomes [[1, .5], [.5, 1]].
        let s = hermitian_eig(&m, true).unwrap();
        assert_relative_eq!(s.eigenvalues[0], 1.5, epsilon = 1e-12);
        assert_relative_eq!(s.eigenvalues[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn eig_reconstruction_and_orthonormality() {
        let mut rng = ChaCha12Rng::seed_from_u64(11);
        for n in [2usize, 3, 5, 9] {
            let g = random_matrix(&mut rng, n, n);
            // Unit-trace PSD input, as in the documented tolerance contract.
            let h = &g * g.adjoint();
            let h = h.scale(1.0 / h.trace().re);
            let s = hermitian_eig(&h, false).unwrap();
            assert!((&s.reconstruct() - &h).norm() < 1e-9);
            let gram = s.eigenvectors.adjoint() * &s.eigenvectors;
            assert!((gram - CMatrix::identity(n, n)).norm() < 1e-10);
            // Nonincreasing order.
            for w in s.eigenvalues.windows(2) {
                assert!(w[0] >= w[1]);
            }
        }
    }

    #[test]
    fn singular_values_zero_matrix() {
        assert_eq!(singular_values(&CMatrix::zeros(3, 2)), vec![0.0, 0.0]);
    }

    #[test]
    fn singular_values_diagonal() {
        let m = CMatrix::from_row_slice(2, 2, &[c(2.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(1.0, 0.0)]);
        let sv = singular_values(&m);
        assert_relative_eq!(sv[0], 2.0, epsilon = 1e-12);
        assert_relative_eq!(sv[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_values_nilpotent_shift() {
        let m = CMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)]);
        let sv = singular_values(&m);
        assert_relative_eq!(sv[0], 1.0, epsilon = 1e-12);
        assert_relative_eq!(sv[1], 0.0, epsilon = 1e-12);
    }

    #[test]
    fn singular_values_unitary_invariance() {
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..20 {
            let m = random_matrix(&mut rng, 4, 4);
            let u = random_unitary(&mut rng, 4);
            let v = random_unitary(&mut rng, 4);
            let a = singular_values(&m);
            let b = singular_values(&(u * &m * v));
            for (x, y) in a.iter().zip(&b) {
                assert_relative_eq!(x, y, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn trace_norm_identity_and_sign() {
        assert_relative_eq!(trace_norm(&CMatrix::identity(3, 3)), 3.0, epsilon = 1e-12);
        let m = CMatrix::from_row_slice(2, 2, &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)]);
        assert_relative_eq!(trace_norm(&m), 2.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_norm_equals_abs_eigenvalue_sum_for_hermitian() {
        let mut rng = ChaCha12Rng::seed_from_u64(17);
        for n in [2usize, 4, 6] {
            let g = random_matrix(&mut rng, n, n);
            let h = (&g + g.adjoint()).scale(0.5);
            let abs_sum: f64 = hermitian_eig(&h, false)
                .unwrap()
                .eigenvalues
                .iter()
                .map(|x| x.abs())
                .sum();
            assert_relative_eq!(trace_norm(&h), abs_sum, epsilon = 1e-9);
        }
    }

    #[test]
    fn trace_power_half_on_uniform_qubit() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(0.5, 0.0), c(0.5, 0.0)]));
        assert_relative_eq!(
            trace_power(&m, 0.5, None).unwrap(),
            2.0_f64.sqrt(),
            epsilon = 1e-12
        );
    }

    #[test]
    fn trace_power_zero_counts_rank() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.0, 0.0), c(0.0, 0.0)]));
        assert_relative_eq!(trace_power(&m, 0.0, None).unwrap(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn trace_power_matches_scalar_oracle() {
        // Independent oracle: direct scalar evaluation of the eigenvalue sum.
        let expected = 0.5_f64.sqrt() + 0.3_f64.sqrt() + 0.2_f64.sqrt();
        assert_relative_eq!(expected, 1.702_042_934_191_671_6, epsilon = 1e-15);
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.5, 0.0),
            c(0.3, 0.0),
            c(0.2, 0.0),
        ]));
        assert_relative_eq!(trace_power(&m, 0.5, None).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn trace_power_rejects_indefinite() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![c(1.1, 0.0), c(-0.1, 0.0)]));
        assert!(matches!(
            trace_power(&m, 0.5, None),
            Err(Error::NotPsd { .. })
        ));
    }

    #[test]
    fn trace_power_monotone_in_rank_tol() {
        let m = CMatrix::from_diagonal(&CVector::from_vec(vec![
            c(0.9, 0.0),
            c(0.09, 0.0),
            c(0.01, 0.0),
        ]));
        let mut prev = f64::INFINITY;
        for tol in [0.0, 1e-3, 0.05, 0.5] {
            let v = trace_power(&m, 0.4, Some(tol)).unwrap();
            assert!(v <= prev + 1e-15);
            prev = v;
        }
    }

    #[test]
    fn trace_power_at_least_one_on_states() {
        let mut rng = ChaCha12Rng::seed_from_u64(23);
        for _ in 0..50 {
            let g = random_matrix(&mut rng, 4, 4);
            let h = &g * g.adjoint();
            let rho = h.scale(1.0 / h.trace().re);
            for alpha in [0.0, 0.1, 0.25, 0.5] {
                assert!(trace_power(&rho, alpha, None).unwrap() >= 1.0 - 1e-12);
            }
            let half = trace_power(&rho, 0.5, None).unwrap();
            assert!(half * half >= 1.0 - 1e-12);
        }
    }
}
