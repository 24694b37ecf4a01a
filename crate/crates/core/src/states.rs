//! Bipartite states and the maps on them: Schmidt analysis, partial trace
//! and partial transpose, realignment, named state families, seeded random
//! sampling, and JSON persistence.
//!
//! Index convention, fixed globally: the product basis ket `|ij>` lives at
//! composite index `i*dim_b + j`, row-major. The partial transpose and the
//! realignment below are written against this one convention.

use std::fmt::Write as _;
use std::path::Path;

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::qmat::{
    self, default_rank_tol, hermitian_eig, CMatrix, CVector, Complex64, NEG_EIG_TOL,
};

/// Norm/trace tolerance on state construction.
pub const STATE_NORM_TOL: f64 = 1e-10;
/// Maximum Schmidt mass the rank filter may silently discard.
pub const RANK_FILTER_MASS_TOL: f64 = 1e-8;

/// A normalized pure state on a bipartite space with declared local
/// dimensions; amplitude `<ij|psi>` sits at index `i*dim_b + j`.
#[derive(Debug, Clone)]
pub struct PureState {
    dim_a: usize,
    dim_b: usize,
    amplitudes: CVector,
}

impl PureState {
    /// Validates the norm (within [`STATE_NORM_TOL`]) and the length.
    pub fn new(dim_a: usize, dim_b: usize, amplitudes: Vec<Complex64>) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::domain("local dimensions must be positive"));
        }
        if amplitudes.len() != dim_a * dim_b {
            return Err(Error::InvariantViolation(format!(
                "amplitude count {} does not match dims {}x{}",
                amplitudes.len(),
                dim_a,
                dim_b
            )));
        }
        let amplitudes = CVector::from_vec(amplitudes);
        let norm_sq: f64 = amplitudes.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sq - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvariantViolation(format!(
                "pure state norm^2 = {norm_sq} differs from 1 beyond {STATE_NORM_TOL:e}"
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            amplitudes,
        })
    }

    /// Normalizes the vector, then constructs the state.
    pub fn from_unnormalized(dim_a: usize, dim_b: usize, raw: Vec<Complex64>) -> Result<Self> {
        let norm: f64 = raw.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            return Err(Error::domain("cannot normalize the zero vector"));
        }
        Self::new(dim_a, dim_b, raw.into_iter().map(|a| a / norm).collect())
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn amplitudes(&self) -> &CVector {
        &self.amplitudes
    }

    /// The `dim_a x dim_b` coefficient matrix `M[i][j] = <ij|psi>`.
    pub fn coefficient_matrix(&self) -> CMatrix {
        CMatrix::from_fn(self.dim_a, self.dim_b, |i, j| {
            self.amplitudes[i * self.dim_b + j]
        })
    }

    /// Projector `|psi><psi|` as a raw matrix.
    pub fn projector(&self) -> CMatrix {
        let n = self.dim_a * self.dim_b;
        CMatrix::from_fn(n, n, |r, c| self.amplitudes[r] * self.amplitudes[c].conj())
    }
}

/// A density matrix on the bipartite space, entry `rho_{ij,kl}` at row
/// `i*dim_b + j`, column `k*dim_b + l`. Hermitian, unit trace, positive
/// semidefinite (all within the documented tolerances, checked eagerly).
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    dim_a: usize,
    dim_b: usize,
    matrix: CMatrix,
}

impl DensityMatrix {
    pub fn new(dim_a: usize, dim_b: usize, matrix: CMatrix) -> Result<Self> {
        if dim_a == 0 || dim_b == 0 {
            return Err(Error::domain("local dimensions must be positive"));
        }
        let n = dim_a * dim_b;
        if matrix.nrows() != n || matrix.ncols() != n {
            return Err(Error::InvariantViolation(format!(
                "matrix is {}x{}, expected {n}x{n}",
                matrix.nrows(),
                matrix.ncols()
            )));
        }
        let herm_dev = (&matrix - matrix.adjoint()).norm();
        if herm_dev > qmat::HERMITICITY_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix is not Hermitian (deviation {herm_dev:.3e})"
            )));
        }
        let trace = matrix.trace();
        if (trace.re - 1.0).abs() > STATE_NORM_TOL || trace.im.abs() > STATE_NORM_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix trace {trace} differs from 1 beyond {STATE_NORM_TOL:e}"
            )));
        }
        let spectrum = hermitian_eig(&matrix, true)?;
        let min = spectrum.eigenvalues.last().copied().unwrap_or(0.0);
        if min < -NEG_EIG_TOL {
            return Err(Error::InvariantViolation(format!(
                "density matrix has negative eigenvalue {min:.3e}"
            )));
        }
        Ok(Self {
            dim_a,
            dim_b,
            matrix,
        })
    }

    /// `|psi><psi|` as a density matrix.
    pub fn from_pure(psi: &PureState) -> Self {
        // Valid by construction; skip the eigenvalue check.
        Self {
            dim_a: psi.dim_a,
            dim_b: psi.dim_b,
            matrix: psi.projector(),
        }
    }

    /// Probability-weighted mixture of pure states. Weights must be positive
    /// and sum to 1 within [`STATE_NORM_TOL`]; dimensions must agree.
    pub fn mixture(members: &[(f64, PureState)]) -> Result<Self> {
        let (first_a, first_b) = match members.first() {
            Some((_, psi)) => (psi.dim_a, psi.dim_b),
            None => return Err(Error::domain("mixture of an empty ensemble")),
        };
        let mut total = 0.0;
        let n = first_a * first_b;
        let mut acc = CMatrix::zeros(n, n);
        for (p, psi) in members {
            if *p <= 0.0 {
                return Err(Error::domain("mixture weights must be positive"));
            }
            if psi.dim_a != first_a || psi.dim_b != first_b {
                return Err(Error::domain("mixture members have mismatched dimensions"));
            }
            total += p;
            acc += psi.projector().scale(*p);
        }
        if (total - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvariantViolation(format!(
                "mixture weights sum to {total}, expected 1"
            )));
        }
        Self::new(first_a, first_b, acc)
    }

    pub fn dim_a(&self) -> usize {
        self.dim_a
    }

    pub fn dim_b(&self) -> usize {
        self.dim_b
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    /// Entry `rho_{ij,kl}`.
    pub fn entry(&self, i: usize, j: usize, k: usize, l: usize) -> Complex64 {
        self.matrix[(i * self.dim_b + j, k * self.dim_b + l)]
    }
}

/// Squared Schmidt coefficients in nonincreasing order; all positive, sum 1.
#[derive(Debug, Clone)]
pub struct SchmidtVector {
    lambdas: Vec<f64>,
}

impl SchmidtVector {
    /// Sorts into nonincreasing order and validates positivity and the sum.
    pub fn new(mut lambdas: Vec<f64>) -> Result<Self> {
        if lambdas.is_empty() {
            return Err(Error::domain("Schmidt vector must be nonempty"));
        }
        if lambdas.iter().any(|&x| !(x > 0.0)) {
            return Err(Error::domain("Schmidt coefficients must be positive"));
        }
        lambdas.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
        let sum: f64 = lambdas.iter().sum();
        if (sum - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::InvariantViolation(format!(
                "Schmidt coefficients sum to {sum}, expected 1"
            )));
        }
        Ok(Self { lambdas })
    }

    pub fn lambdas(&self) -> &[f64] {
        &self.lambdas
    }

    /// Schmidt rank.
    pub fn rank(&self) -> usize {
        self.lambdas.len()
    }
}

/// Squared singular values of the coefficient matrix of `psi`, filtered at
/// `rank_tol` (default [`default_rank_tol`] of the largest) and renormalized.
/// Filtering away more than [`RANK_FILTER_MASS_TOL`] of mass is an error.
pub fn schmidt(psi: &PureState, rank_tol: Option<f64>) -> Result<SchmidtVector> {
    let sv = qmat::singular_values(&psi.coefficient_matrix());
    let lambdas_all: Vec<f64> = sv.iter().map(|s| s * s).collect();
    let tol = rank_tol.unwrap_or_else(|| default_rank_tol(lambdas_all[0]));
    let kept: Vec<f64> = lambdas_all.iter().copied().filter(|&x| x > tol).collect();
    let removed: f64 = lambdas_all.iter().copied().filter(|&x| x <= tol).sum();
    if removed > RANK_FILTER_MASS_TOL || kept.is_empty() {
        return Err(Error::RankTolTooAggressive { removed });
    }
    let kept_sum: f64 = kept.iter().sum();
    SchmidtVector::new(kept.into_iter().map(|x| x / kept_sum).collect())
}

/// Partial trace over B: `(rho_A)_{ik} = sum_j rho_{ij,kj}`.
pub fn partial_trace_b(rho: &DensityMatrix) -> CMatrix {
    let (da, db) = (rho.dim_a, rho.dim_b);
    CMatrix::from_fn(da, da, |i, k| {
        (0..db).map(|j| rho.entry(i, j, k, j)).sum()
    })
}

/// Partial transpose with respect to B: the output entry at
/// `(i*dim_b + l, k*dim_b + j)` is `rho_{ij,kl}`. Hermitian, involutive.
pub fn partial_transpose(rho: &DensityMatrix) -> CMatrix {
    let (da, db) = (rho.dim_a, rho.dim_b);
    let n = da * db;
    let mut out = CMatrix::zeros(n, n);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * db + l, k * db + j)] = rho.entry(i, j, k, l);
                }
            }
        }
    }
    out
}

/// Realignment: the `dim_a^2 x dim_b^2` matrix with entry
/// `rho_{ij,kl}` at row `i*dim_a + k`, column `j*dim_b + l`.
pub fn realign(rho: &DensityMatrix) -> CMatrix {
    let (da, db) = (rho.dim_a, rho.dim_b);
    let mut out = CMatrix::zeros(da * da, db * db);
    for i in 0..da {
        for j in 0..db {
            for k in 0..da {
                for l in 0..db {
                    out[(i * da + k, j * db + l)] = rho.entry(i, j, k, l);
                }
            }
        }
    }
    out
}

/// The maximally entangled state `(1/sqrt(d)) sum_i |ii>` on d x d.
pub fn max_entangled(d: usize) -> PureState {
    assert!(d >= 2, "max_entangled requires d >= 2");
    let mut amps = vec![Complex64::default(); d * d];
    let w = Complex64::new(1.0 / (d as f64).sqrt(), 0.0);
    for i in 0..d {
        amps[i * d + i] = w;
    }
    PureState::new(d, d, amps).expect("normalized by construction")
}

/// Isotropic state with fidelity `F = <Psi|rho_F|Psi>` to the maximally
/// entangled state: `rho_F = (1-F)/(d^2-1) (I - |Psi><Psi|) + F |Psi><Psi|`.
pub fn isotropic(d: usize, fidelity: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::domain("isotropic states require d >= 2"));
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::domain(format!(
            "isotropic fidelity must lie in [0, 1], got {fidelity}"
        )));
    }
    let n = d * d;
    let proj = max_entangled(d).projector();
    let rest = (CMatrix::identity(n, n) - &proj).scale((1.0 - fidelity) / (n as f64 - 1.0));
    DensityMatrix::new(d, d, rest + proj.scale(fidelity))
}

/// Werner state with antisymmetric weight
/// `W = Tr(rho_W sum_{i<j} |Psi^-_{ij}><Psi^-_{ij}|)`, built from the
/// symmetric-basis projectors `|kk>` and `|Psi^+_{ij}>` with weight
/// `2(1-W)/(d(d+1))` each, and the antisymmetric `|Psi^-_{ij}>` with weight
/// `2W/(d(d-1))` each, where `|Psi^+-_{ij}> = (|ij> +- |ji>)/sqrt(2)`.
pub fn werner(d: usize, weight: f64) -> Result<DensityMatrix> {
    if d < 2 {
        return Err(Error::domain("Werner states require d >= 2"));
    }
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::domain(format!(
            "Werner weight must lie in [0, 1], got {weight}"
        )));
    }
    let n = d * d;
    let sym_coeff = 2.0 * (1.0 - weight) / ((d * (d + 1)) as f64);
    let asym_coeff = 2.0 * weight / ((d * (d - 1)) as f64);
    let mut acc = CMatrix::zeros(n, n);
    let add_projector = |acc: &mut CMatrix, vec: &CVector, coeff: f64| {
        for r in 0..n {
            if vec[r] == Complex64::default() {
                continue;
            }
            for c in 0..n {
                acc[(r, c)] += vec[r] * vec[c].conj() * Complex64::new(coeff, 0.0);
            }
        }
    };
    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    for k in 0..d {
        let mut v = CVector::zeros(n);
        v[k * d + k] = Complex64::new(1.0, 0.0);
        add_projector(&mut acc, &v, sym_coeff);
    }
    for i in 0..d {
        for j in (i + 1)..d {
            let mut plus = CVector::zeros(n);
            plus[i * d + j] = half;
            plus[j * d + i] = half;
            add_projector(&mut acc, &plus, sym_coeff);

            let mut minus = CVector::zeros(n);
            minus[i * d + j] = half;
            minus[j * d + i] = -half;
            add_projector(&mut acc, &minus, asym_coeff);
        }
    }
    DensityMatrix::new(d, d, acc)
}

/// Draws a Haar-distributed pure state: i.i.d. complex Gaussian amplitudes
/// (Box-Muller pairs from a ChaCha12 stream), normalized. Deterministic for
/// a fixed seed.
pub fn random_pure(dim_a: usize, dim_b: usize, seed: u64) -> PureState {
    assert!(dim_a >= 1 && dim_b >= 1, "dimensions must be positive");
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let raw: Vec<Complex64> = (0..dim_a * dim_b)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    PureState::from_unnormalized(dim_a, dim_b, raw).expect("Gaussian vector is nonzero")
}

/// One standard complex Gaussian via the Box-Muller transform.
pub(crate) fn complex_gaussian<R: rand::Rng>(rng: &mut R) -> Complex64 {
    // u in (0, 1]: avoids ln(0).
    let u: f64 = 1.0 - rng.random::<f64>();
    let v: f64 = rng.random();
    let r = (-2.0 * u.ln()).sqrt();
    let phi = 2.0 * std::f64::consts::PI * v;
    // Both Box-Muller outputs feed one complex amplitude; the extra 1/sqrt(2)
    // makes the real and imaginary parts standard normals of variance 1/2,
    // i.e. a standard complex Gaussian.
    Complex64::new(r * phi.cos(), r * phi.sin()) * std::f64::consts::FRAC_1_SQRT_2
}

/// A state loaded from disk: either representation is accepted everywhere
/// the physics allows it.
#[derive(Debug, Clone)]
pub enum State {
    Pure(PureState),
    Mixed(DensityMatrix),
}

impl State {
    pub fn dims(&self) -> (usize, usize) {
        match self {
            State::Pure(p) => (p.dim_a, p.dim_b),
            State::Mixed(m) => (m.dim_a, m.dim_b),
        }
    }

    /// View as a density matrix (projector for pure inputs).
    pub fn to_density(&self) -> DensityMatrix {
        match self {
            State::Pure(p) => DensityMatrix::from_pure(p),
            State::Mixed(m) => m.clone(),
        }
    }
}

#[derive(Deserialize)]
struct StateFile {
    kind: String,
    dims: Vec<usize>,
    data: Vec<[f64; 2]>,
}

/// Parses and validates a state file (see [`save_state`] for the schema).
pub fn load_state(path: impl AsRef<Path>) -> Result<State> {
    let text = std::fs::read_to_string(path)?;
    load_state_str(&text)
}

/// Same as [`load_state`], from an in-memory JSON document.
pub fn load_state_str(text: &str) -> Result<State> {
    let file: StateFile =
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    if file.dims.len() != 2 || file.dims.iter().any(|&d| d == 0) {
        return Err(Error::Schema(
            "dims must hold two positive integers".to_string(),
        ));
    }
    let (da, db) = (file.dims[0], file.dims[1]);
    let entries: Vec<Complex64> = file
        .data
        .iter()
        .map(|[re, im]| Complex64::new(*re, *im))
        .collect();
    match file.kind.as_str() {
        "pure" => {
            if entries.len() != da * db {
                return Err(Error::Schema(format!(
                    "pure state needs {} amplitudes, file has {}",
                    da * db,
                    entries.len()
                )));
            }
            Ok(State::Pure(PureState::new(da, db, entries)?))
        }
        "mixed" => {
            let n = da * db;
            if entries.len() != n * n {
                return Err(Error::Schema(format!(
                    "mixed state needs {} entries, file has {}",
                    n * n,
                    entries.len()
                )));
            }
            let matrix = CMatrix::from_row_slice(n, n, &entries);
            Ok(State::Mixed(DensityMatrix::new(da, db, matrix)?))
        }
        other => Err(Error::Schema(format!(
            "kind must be \"pure\" or \"mixed\", got \"{other}\""
        ))),
    }
}

/// Serializes a state to the JSON schema
/// `{"kind": "pure"|"mixed", "dims": [dimA, dimB], "data": [[re, im], ...]}`
/// with row-major `data` and every number rendered with 17 significant
/// digits, enough for a bit-exact round trip of finite doubles.
pub fn save_state(state: &State, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, state_to_json(state))?;
    Ok(())
}

/// The exact document [`save_state`] writes.
pub fn state_to_json(state: &State) -> String {
    let (kind, dims, entries): (&str, (usize, usize), Vec<Complex64>) = match state {
        State::Pure(p) => (
            "pure",
            (p.dim_a, p.dim_b),
            p.amplitudes.iter().copied().collect(),
        ),
        State::Mixed(m) => {
            let n = m.dim_a * m.dim_b;
            let mut v = Vec::with_capacity(n * n);
            for r in 0..n {
                for c in 0..n {
                    v.push(m.matrix[(r, c)]);
                }
            }
            ("mixed", (m.dim_a, m.dim_b), v)
        }
    };
    let mut out = String::new();
    let _ = write!(
        out,
        "{{\"kind\":\"{kind}\",\"dims\":[{},{}],\"data\":[",
        dims.0, dims.1
    );
    for (idx, z) in entries.iter().enumerate() {
        if idx > 0 {
            out.push(',');
        }
        let _ = write!(out, "[{:.16e},{:.16e}]", z.re, z.im);
    }
    out.push_str("]}");
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qmat::trace_norm;
    use approx::assert_relative_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn bell() -> PureState {
        max_entangled(2)
    }

    fn basis_state(da: usize, db: usize, i: usize, j: usize) -> PureState {
        let mut amps = vec![Complex64::default(); da * db];
        amps[i * db + j] = c(1.0, 0.0);
        PureState::new(da, db, amps).unwrap()
    }

    #[test]
    fn pure_state_rejects_unnormalized() {
        let amps = vec![c(0.9, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)];
        assert!(matches!(
            PureState::new(2, 2, amps),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn schmidt_product_state() {
        let s = schmidt(&basis_state(2, 2, 0, 0), None).unwrap();
        assert_eq!(s.rank(), 1);
        assert_relative_eq!(s.lambdas()[0], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_bell_state() {
        let s = schmidt(&bell(), None).unwrap();
        assert_eq!(s.rank(), 2);
        assert_relative_eq!(s.lambdas()[0], 0.5, epsilon = 1e-12);
        assert_relative_eq!(s.lambdas()[1], 0.5, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_asymmetric_superposition() {
        // Oracle: SVD of the 2x2 coefficient matrix [[0, sqrt(.7)], [sqrt(.3), 0]]
        // has singular values sqrt(.7) and sqrt(.3) directly.
        let psi = PureState::new(
            2,
            2,
            vec![c(0.0, 0.0), c(0.7_f64.sqrt(), 0.0), c(0.3_f64.sqrt(), 0.0), c(0.0, 0.0)],
        )
        .unwrap();
        let s = schmidt(&psi, None).unwrap();
        assert_eq!(s.rank(), 2);
        assert_relative_eq!(s.lambdas()[0], 0.7, epsilon = 1e-12);
        assert_relative_eq!(s.lambdas()[1], 0.3, epsilon = 1e-12);
    }

    #[test]
    fn schmidt_rejects_aggressive_tol() {
        assert!(matches!(
            schmidt(&bell(), Some(0.6)),
            Err(Error::RankTolTooAggressive { .. })
        ));
    }

    #[test]
    fn schmidt_local_unitary_invariance() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(3);
        for trial in 0..10 {
            let psi = random_pure(3, 3, 100 + trial);
            let qa = CMatrix::from_fn(3, 3, |_, _| complex_gaussian(&mut rng)).qr().q();
            let qb = CMatrix::from_fn(3, 3, |_, _| complex_gaussian(&mut rng)).qr().q();
            let m = &qa * psi.coefficient_matrix() * qb.transpose();
            let rotated = PureState::new(
                3,
                3,
                (0..9).map(|idx| m[(idx / 3, idx % 3)]).collect(),
            )
            .unwrap();
            let s1 = schmidt(&psi, None).unwrap();
            let s2 = schmidt(&rotated, None).unwrap();
            assert_eq!(s1.rank(), s2.rank());
            for (a, b) in s1.lambdas().iter().zip(s2.lambdas()) {
                assert_relative_eq!(a, b, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn partial_trace_of_bell_is_maximally_mixed() {
        let rho = DensityMatrix::from_pure(&bell());
        let ra = partial_trace_b(&rho);
        assert!((ra - CMatrix::identity(2, 2).scale(0.5)).norm() < 1e-12);
    }

    #[test]
    fn partial_trace_of_product_basis_state() {
        let rho = DensityMatrix::from_pure(&basis_state(2, 2, 0, 1));
        let ra = partial_trace_b(&rho);
        assert_relative_eq!(ra[(0, 0)].re, 1.0, epsilon = 1e-12);
        assert_relative_eq!(ra[(1, 1)].re, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_trace_of_isotropic() {
        let rho = isotropic(2, 1.0).unwrap();
        let ra = partial_trace_b(&rho);
        assert!((ra - CMatrix::identity(2, 2).scale(0.5)).norm() < 1e-12);
    }

    #[test]
    fn partial_transpose_is_involution_and_hermitian() {
        let rho = isotropic(3, 0.63).unwrap();
        let pt = partial_transpose(&rho);
        assert!((&pt - pt.adjoint()).norm() < 1e-12);
        let back = partial_transpose(&DensityMatrix {
            dim_a: 3,
            dim_b: 3,
            matrix: pt.clone(),
        });
        assert_eq!(back, rho.matrix);
        assert_relative_eq!(pt.trace().re, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn partial_transpose_of_product_state() {
        // rho_A (x) rho_B maps to rho_A (x) rho_B^T: still a state, norm 1.
        let psi_a = vec![c(0.8, 0.0), c(0.0, 0.6)];
        let psi_b = vec![c(0.6, 0.0), c(0.8, 0.0)];
        let mut amps = Vec::new();
        for a in &psi_a {
            for b in &psi_b {
                amps.push(a * b);
            }
        }
        let rho = DensityMatrix::from_pure(&PureState::new(2, 2, amps).unwrap());
        assert_relative_eq!(trace_norm(&partial_transpose(&rho)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn partial_transpose_norm_of_bell_projector() {
        let rho = DensityMatrix::from_pure(&bell());
        assert_relative_eq!(trace_norm(&partial_transpose(&rho)), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn partial_transpose_norm_of_isotropic_is_fd() {
        let rho = isotropic(3, 0.8).unwrap();
        assert_relative_eq!(trace_norm(&partial_transpose(&rho)), 2.4, epsilon = 1e-10);
    }

    #[test]
    fn realign_norm_of_pure_product_is_one() {
        let rho = DensityMatrix::from_pure(&basis_state(2, 2, 1, 0));
        assert_relative_eq!(trace_norm(&realign(&rho)), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn realign_norm_of_bell_projector() {
        let rho = DensityMatrix::from_pure(&bell());
        assert_relative_eq!(trace_norm(&realign(&rho)), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn realign_norm_of_isotropic_at_unit_fidelity() {
        let rho = isotropic(2, 1.0).unwrap();
        assert_relative_eq!(trace_norm(&realign(&rho)), 2.0, epsilon = 1e-10);
    }

    #[test]
    fn realign_is_rectangular_for_unequal_dims() {
        let rho = DensityMatrix::from_pure(&basis_state(2, 3, 0, 2));
        let r = realign(&rho);
        assert_eq!((r.nrows(), r.ncols()), (4, 9));
        assert_relative_eq!(trace_norm(&r), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn isotropic_fidelity_matches_parameter() {
        for (d, f) in [(2, 0.25), (3, 1.0 / 3.0), (4, 0.9)] {
            let rho = isotropic(d, f).unwrap();
            let psi = max_entangled(d);
            let fid = (psi.amplitudes().adjoint() * rho.matrix() * psi.amplitudes())[(0, 0)];
            assert_relative_eq!(fid.re, f, epsilon = 1e-10);
        }
        // F = 1/d^2 is the maximally mixed state.
        let rho = isotropic(2, 0.25).unwrap();
        assert!((rho.matrix() - CMatrix::identity(4, 4).scale(0.25)).norm() < 1e-12);
        // F = 1 is the maximally entangled projector.
        let rho = isotropic(2, 1.0).unwrap();
        assert!((rho.matrix() - bell().projector()).norm() < 1e-12);
    }

    #[test]
    fn isotropic_rejects_bad_parameters() {
        assert!(isotropic(1, 0.5).is_err());
        assert!(isotropic(2, -0.1).is_err());
        assert!(isotropic(2, 1.1).is_err());
    }

    #[test]
    fn werner_weight_matches_parameter() {
        for (d, w) in [(2, 0.0), (2, 0.5), (3, 0.7), (4, 1.0)] {
            let rho = werner(d, w).unwrap();
            // Witness: total weight on the antisymmetric projectors.
            let mut weight = 0.0;
            for i in 0..d {
                for j in (i + 1)..d {
                    let n = d * d;
                    let half = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
                    let mut minus = CVector::zeros(n);
                    minus[i * d + j] = half;
                    minus[j * d + i] = -half;
                    weight += (minus.adjoint() * rho.matrix() * &minus)[(0, 0)].re;
                }
            }
            assert_relative_eq!(weight, w, epsilon = 1e-10);
        }
    }

    #[test]
    fn werner_extremes() {
        // d = 2, W = 1: the singlet projector.
        let rho = werner(2, 1.0).unwrap();
        let mut singlet = CVector::zeros(4);
        singlet[1] = c(std::f64::consts::FRAC_1_SQRT_2, 0.0);
        singlet[2] = c(-std::f64::consts::FRAC_1_SQRT_2, 0.0);
        let proj = CMatrix::from_fn(4, 4, |r, cc| singlet[r] * singlet[cc].conj());
        assert!((rho.matrix() - proj).norm() < 1e-12);

        // d = 3, W = 0: weight 1/6 on each |kk> projector.
        let rho = werner(3, 0.0).unwrap();
        for k in 0..3 {
            assert_relative_eq!(rho.entry(k, k, k, k).re, 1.0 / 6.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn max_entangled_schmidt_is_uniform() {
        let s = schmidt(&max_entangled(3), None).unwrap();
        assert_eq!(s.rank(), 3);
        for &l in s.lambdas() {
            assert_relative_eq!(l, 1.0 / 3.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn random_pure_is_deterministic_and_normalized() {
        let a = random_pure(2, 2, 7);
        let b = random_pure(2, 2, 7);
        assert_eq!(a.amplitudes(), b.amplitudes());
        for seed in 0..20 {
            let psi = random_pure(3, 3, seed);
            let norm: f64 = psi.amplitudes().iter().map(|z| z.norm_sqr()).sum();
            assert_relative_eq!(norm, 1.0, epsilon = 1e-12);
        }
        // Degenerate 1x1 space: the scalar state, Schmidt rank 1.
        let scalar = random_pure(1, 1, 42);
        assert_eq!(schmidt(&scalar, None).unwrap().rank(), 1);
    }

    #[test]
    fn state_file_round_trip_is_bit_exact() {
        let psi = random_pure(2, 3, 99);
        let json = state_to_json(&State::Pure(psi.clone()));
        match load_state_str(&json).unwrap() {
            State::Pure(back) => assert_eq!(psi.amplitudes(), back.amplitudes()),
            _ => panic!("expected a pure state"),
        }

        let rho = werner(2, 0.77).unwrap();
        let json = state_to_json(&State::Mixed(rho.clone()));
        match load_state_str(&json).unwrap() {
            State::Mixed(back) => assert_eq!(rho.matrix(), back.matrix()),
            _ => panic!("expected a mixed state"),
        }
    }

    #[test]
    fn state_file_errors() {
        // Pure-state file for |00>.
        let ok = r#"{"kind":"pure","dims":[2,2],"data":[[1.0,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]}"#;
        assert!(matches!(load_state_str(ok).unwrap(), State::Pure(_)));

        // Mixed file of identity/4.
        let mixed = state_to_json(&State::Mixed(isotropic(2, 0.25).unwrap()));
        assert!(matches!(load_state_str(&mixed).unwrap(), State::Mixed(_)));

        // Bad JSON.
        assert!(matches!(load_state_str("{"), Err(Error::Parse(_))));
        // Unknown kind.
        let bad = r#"{"kind":"thermal","dims":[2,2],"data":[]}"#;
        assert!(matches!(load_state_str(bad), Err(Error::Schema(_))));
        // Wrong amplitude count.
        let bad = r#"{"kind":"pure","dims":[2,2],"data":[[1.0,0.0]]}"#;
        assert!(matches!(load_state_str(bad), Err(Error::Schema(_))));
        // Trace off (norm 0.9): invariant violation.
        let bad = r#"{"kind":"pure","dims":[2,2],"data":[[0.9486832980505138,0.0],[0.0,0.0],[0.0,0.0],[0.0,0.0]]}"#;
        assert!(matches!(
            load_state_str(bad),
            Err(Error::InvariantViolation(_))
        ));
    }

    #[test]
    fn mixture_reproduces_construction() {
        let members = vec![
            (0.25, basis_state(2, 2, 0, 0)),
            (0.75, basis_state(2, 2, 1, 1)),
        ];
        let rho = DensityMatrix::mixture(&members).unwrap();
        assert_relative_eq!(rho.entry(0, 0, 0, 0).re, 0.25, epsilon = 1e-12);
        assert_relative_eq!(rho.entry(1, 1, 1, 1).re, 0.75, epsilon = 1e-12);
        assert!(DensityMatrix::mixture(&[]).is_err());
        assert!(DensityMatrix::mixture(&[(0.5, bell())]).is_err());
    }
}
