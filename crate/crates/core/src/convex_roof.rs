//! Numerical upper bound on the mixed-state alpha-concurrence by local
//! minimization over pure-state decompositions.
//!
//! Every decomposition of `rho` with `m` members is `psi~_i = sum_k V_ik
//! sqrt(mu_k) |e_k>` for an isometry `V` (m x rank, orthonormal columns)
//! over the eigenpairs `(mu_k, e_k)` of `rho`. The search never leaves that
//! manifold: it repeatedly mixes pairs of members by a 2x2 unitary, which
//! preserves the mixture exactly, and accepts rotations that lower the
//! ensemble average `sum_i p_i C_alpha(psi_i)`. Restarts draw fresh random
//! isometries; the reported value is the best restart and is an upper bound
//! on the convex roof by construction, not the roof itself.

use rand::SeedableRng;
use rand_chacha::ChaCha12Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures::Alpha;
use crate::qmat::{hermitian_eig, CMatrix, CVector, Complex64};
use crate::states::{complex_gaussian, DensityMatrix, PureState};

/// Eigenvalues of `rho` at or below this cutoff do not enter the support.
const EIG_CUTOFF: f64 = 1e-10;
/// Orthonormality tolerance for supplied isometries.
const ISOMETRY_TOL: f64 = 1e-9;
/// Members below this probability are pruned from reported ensembles.
const MEMBER_PRUNE_TOL: f64 = 1e-12;
/// Frobenius tolerance for the mixture-reconstruction invariant.
const MIXTURE_TOL: f64 = 1e-8;

/// A probability-weighted pure-state decomposition.
#[derive(Debug, Clone)]
pub struct Ensemble {
    members: Vec<(f64, PureState)>,
}

impl Ensemble {
    pub fn members(&self) -> &[(f64, PureState)] {
        &self.members
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }

    /// `sum_i p_i |psi_i><psi_i|` as a raw matrix.
    pub fn mixture_matrix(&self) -> CMatrix {
        let (da, db) = (self.members[0].1.dim_a(), self.members[0].1.dim_b());
        let n = da * db;
        let mut acc = CMatrix::zeros(n, n);
        for (p, psi) in &self.members {
            acc += psi.projector().scale(*p);
        }
        acc
    }

    /// Checks the two ensemble invariants against a target state:
    /// probabilities sum to 1 within 1e-10 and the mixture reproduces the
    /// target within Frobenius [`MIXTURE_TOL`].
    pub fn validate_against(&self, rho: &DensityMatrix) -> Result<()> {
        let total: f64 = self.members.iter().map(|(p, _)| p).sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvariantViolation(format!(
                "ensemble probabilities sum to {total}"
            )));
        }
        let dev = (self.mixture_matrix() - rho.matrix()).norm();
        if dev > MIXTURE_TOL {
            return Err(Error::InvariantViolation(format!(
                "ensemble mixture misses the target by {dev:.3e} (Frobenius)"
            )));
        }
        Ok(())
    }

    /// Ensemble average `sum_i p_i C_alpha(psi_i)`.
    pub fn average_alpha_concurrence(&self, alpha: Alpha) -> Result<f64> {
        let mut acc = 0.0;
        for (p, psi) in &self.members {
            acc += p * crate::measures::alpha_concurrence_pure_via_reduced(psi, alpha)?;
        }
        Ok(acc)
    }
}

/// Knobs of the roof search.
#[derive(Debug, Clone)]
pub struct RoofConfig {
    /// Members per decomposition; defaults to `min(rank^2, rank + 4)`,
    /// never below the rank and never above `(dim_a dim_b)^2`.
    pub ensemble_size: Option<usize>,
    /// Independent random initializations; the minimum is reported.
    pub restarts: usize,
    /// Maximum pair-rotation sweeps per restart.
    pub max_iters: usize,
    /// Resolution of the one-dimensional rotation-angle searches.
    pub step_tol: f64,
    /// A restart stops once the sweep improvement stays below this for
    /// three consecutive sweeps.
    pub value_tol: f64,
    /// Root seed; restart `t` draws from stream `t` of a ChaCha12 generator.
    pub seed: u64,
}

impl Default for RoofConfig {
    fn default() -> Self {
        Self {
            ensemble_size: None,
            restarts: 8,
            max_iters: 200,
            step_tol: 1e-9,
            value_tol: 1e-9,
            seed: 0,
        }
    }
}

/// Outcome of [`roof_upper_bound`].
#[derive(Debug, Clone)]
pub struct RoofResult {
    /// Best ensemble average found: an upper bound on the alpha-concurrence.
    pub value: f64,
    /// The ensemble attaining `value`.
    pub best: Ensemble,
    /// Whether the best restart reached its convergence streak before
    /// `max_iters` sweeps.
    pub converged: bool,
}

/// Eigen-support of a density matrix: pairs `(mu_k, e_k)` above the cutoff.
fn eigen_support(rho: &DensityMatrix) -> Result<Vec<(f64, CVector)>> {
    let spectrum = hermitian_eig(rho.matrix(), true)?;
    Ok(spectrum
        .eigenvalues
        .iter()
        .enumerate()
        .filter(|(_, &mu)| mu > EIG_CUTOFF)
        .map(|(k, &mu)| (mu, spectrum.eigenvectors.column(k).into_owned()))
        .collect())
}

/// Unnormalized members `psi~_i = sum_k V_ik sqrt(mu_k) e_k`.
fn members_from_isometry(support: &[(f64, CVector)], isometry: &CMatrix) -> Vec<CVector> {
    let n = support[0].1.len();
    (0..isometry.nrows())
        .map(|i| {
            let mut v = CVector::zeros(n);
            for (k, (mu, e)) in support.iter().enumerate() {
                let w = isometry[(i, k)] * Complex64::new(mu.sqrt(), 0.0);
                v.axpy(w, e, Complex64::new(1.0, 0.0));
            }
            v
        })
        .collect()
}

fn ensemble_from_members(dim_a: usize, dim_b: usize, members: &[CVector]) -> Result<Ensemble> {
    let mut out = Vec::new();
    for v in members {
        let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
        if p < MEMBER_PRUNE_TOL {
            continue;
        }
        let scale = Complex64::new(1.0 / p.sqrt(), 0.0);
        let amps: Vec<Complex64> = v.iter().map(|z| z * scale).collect();
        out.push((p, PureState::new(dim_a, dim_b, amps)?));
    }
    if out.is_empty() {
        return Err(Error::InvariantViolation(
            "every candidate member was pruned".to_string(),
        ));
    }
    let total: f64 = out.iter().map(|(p, _)| p).sum();
    for (p, _) in &mut out {
        *p /= total;
    }
    Ok(Ensemble { members: out })
}

/// Builds the decomposition of `rho` selected by an isometry with
/// orthonormal columns over the eigen-support of `rho`. Members below
/// probability 1e-12 are dropped and the weights renormalized.
pub fn decomposition_from_isometry(rho: &DensityMatrix, isometry: &CMatrix) -> Result<Ensemble> {
    let support = eigen_support(rho)?;
    let rank = support.len();
    if isometry.ncols() != rank {
        return Err(Error::domain(format!(
            "isometry has {} columns, state rank is {rank}",
            isometry.ncols()
        )));
    }
    let gram = isometry.adjoint() * isometry;
    let dev = (gram - CMatrix::identity(rank, rank)).norm();
    if dev > ISOMETRY_TOL {
        return Err(Error::NotIsometry { deviation: dev });
    }
    let members = members_from_isometry(&support, isometry);
    let ensemble = ensemble_from_members(rho.dim_a(), rho.dim_b(), &members)?;
    ensemble.validate_against(rho)?;
    Ok(ensemble)
}

/// `sum_i eig_i^alpha` over clamped eigenvalues, with the rank convention
/// at `alpha = 0`; `sqrt` fast paths cover the common exponents.
#[inline]
fn sum_pow(eigs: &[f64], alpha: f64, p: f64) -> f64 {
    if alpha == 0.0 {
        return eigs.iter().filter(|&&x| x > 1e-9 * p).count() as f64;
    }
    if alpha == 0.5 {
        return eigs.iter().map(|&x| x.max(0.0).sqrt()).sum();
    }
    if alpha == 0.25 {
        return eigs.iter().map(|&x| x.max(0.0).sqrt().sqrt()).sum();
    }
    eigs.iter().map(|&x| x.max(0.0).powf(alpha)).sum()
}

#[inline]
fn pow_one_minus_alpha(p: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        p
    } else if alpha == 0.5 {
        p.sqrt()
    } else if alpha == 0.25 {
        // p^(3/4)
        let s = p.sqrt();
        s * s.sqrt()
    } else {
        p.powf(1.0 - alpha)
    }
}

/// Eigenvalues of a 2x2 Hermitian matrix given (diag, off-diagonal).
#[inline]
fn eig2(a: f64, b: f64, c_norm_sqr: f64) -> [f64; 2] {
    let mean = 0.5 * (a + b);
    let disc = (0.25 * (a - b) * (a - b) + c_norm_sqr).sqrt();
    [mean + disc, mean - disc]
}

/// Eigenvalues of a 3x3 Hermitian matrix, trigonometric closed form.
/// `h` is row-major; diagonal entries must be (numerically) real.
#[inline]
fn eig3(h: &[Complex64; 9]) -> [f64; 3] {
    let (d0, d1, d2) = (h[0].re, h[4].re, h[8].re);
    let off = h[1].norm_sqr() + h[2].norm_sqr() + h[5].norm_sqr();
    let q = (d0 + d1 + d2) / 3.0;
    let p2 = (d0 - q) * (d0 - q) + (d1 - q) * (d1 - q) + (d2 - q) * (d2 - q) + 2.0 * off;
    if p2 <= 1e-300 {
        return [q, q, q];
    }
    let p = (p2 / 6.0).sqrt();
    let inv = 1.0 / p;
    // B = (H - q I)/p, det(B)/2 in [-1, 1] up to roundoff.
    let b0 = Complex64::new((d0 - q) * inv, 0.0);
    let b4 = Complex64::new((d1 - q) * inv, 0.0);
    let b8 = Complex64::new((d2 - q) * inv, 0.0);
    let b1 = h[1] * inv;
    let b2 = h[2] * inv;
    let b5 = h[5] * inv;
    let det = b0 * (b4 * b8 - b5 * b5.conj()) - b1 * (b1.conj() * b8 - b5 * b2.conj())
        + b2 * (b1.conj() * b5.conj() - b4 * b2.conj());
    let r = (det.re / 2.0).clamp(-1.0, 1.0);
    let phi = r.acos() / 3.0;
    let e0 = q + 2.0 * p * phi.cos();
    let e2 = q + 2.0 * p * (phi + 2.0 * std::f64::consts::PI / 3.0).cos();
    let e1 = 3.0 * q - e0 - e2;
    [e0, e1, e2]
}

/// Weighted pure-state cost `p C_alpha(v/|v|) = p^(1-alpha) sum eig^alpha - p`
/// from the reduced matrix on the smaller subsystem. Fast closed forms for
/// local dimension <= 3, generic eigenvalues beyond.
fn member_cost(v: &CVector, dim_a: usize, dim_b: usize, alpha: f64) -> f64 {
    let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if p < 1e-300 {
        return 0.0;
    }
    // Reduce on the smaller subsystem; the nonzero spectrum is the same.
    let (small, stride_small, stride_other, count_other) = if dim_a <= dim_b {
        (dim_a, dim_b, 1usize, dim_b)
    } else {
        (dim_b, 1usize, dim_b, dim_a)
    };
    let entry = |r: usize, c: usize| -> Complex64 {
        let mut acc = Complex64::default();
        for t in 0..count_other {
            acc += v[r * stride_small + t * stride_other] * v[c * stride_small + t * stride_other].conj();
        }
        acc
    };
    let spow = match small {
        1 => return 0.0,
        2 => {
            let a = entry(0, 0).re;
            let b = entry(1, 1).re;
            let c = entry(0, 1);
            sum_pow(&eig2(a, b, c.norm_sqr()), alpha, p)
        }
        3 => {
            let mut h = [Complex64::default(); 9];
            for r in 0..3 {
                for c in r..3 {
                    h[r * 3 + c] = entry(r, c);
                }
            }
            sum_pow(&eig3(&h), alpha, p)
        }
        _ => {
            let m = CMatrix::from_fn(small, small, |r, c| entry(r, c));
            let eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
            sum_pow(&eigs, alpha, p)
        }
    };
    pow_one_minus_alpha(p, alpha) * spow - p
}

/// Haar-style random isometry: QR of a Gaussian matrix, thin Q.
fn random_isometry(rng: &mut ChaCha12Rng, rows: usize, cols: usize) -> CMatrix {
    let g = CMatrix::from_fn(rows, cols, |_, _| complex_gaussian(rng));
    g.qr().q()
}

/// Descent over the isometry manifold. Pair rotations alone admit stable
/// points well above the optimum because a rotation couples only two
/// members; the projected gradient moves every member at once and drops
/// into the right basin quickly, after which the pair sweeps polish.
struct ManifoldDescent<'a> {
    /// Columns `sqrt(mu_k) e_k` over the support of the target state.
    scaled_support: CMatrix,
    /// Reciprocal support eigenvalues, for recovering an isometry from a
    /// member matrix.
    inv_mu: Vec<f64>,
    dim_a: usize,
    dim_b: usize,
    config: &'a RoofConfig,
}

impl ManifoldDescent<'_> {
    /// Members as columns: `M = C V^T`.
    fn members_matrix(&self, isometry: &CMatrix) -> CMatrix {
        &self.scaled_support * isometry.transpose()
    }

    /// Inverts [`Self::members_matrix`]: `V = (diag(1/mu) C^H M)^T`.
    fn isometry_from_members(&self, members: &[CVector]) -> CMatrix {
        let n = self.scaled_support.nrows();
        let m = members.len();
        let stacked = CMatrix::from_fn(n, m, |r, c| members[c][r]);
        let mut x = self.scaled_support.adjoint() * stacked;
        for (k, &inv) in self.inv_mu.iter().enumerate() {
            for c in 0..m {
                x[(k, c)] *= Complex64::new(inv, 0.0);
            }
        }
        x.transpose()
    }

    fn objective(&self, isometry: &CMatrix, alpha: f64) -> f64 {
        let m = self.members_matrix(isometry);
        m.column_iter()
            .map(|col| member_cost(&col.into_owned(), self.dim_a, self.dim_b, alpha))
            .sum()
    }

    /// Euclidean (Wirtinger) gradient with respect to the conjugated
    /// isometry entries. For one member `v` with weight `p = <v|v>` and
    /// unnormalized reduced state `r` (eigenpairs `lambda_t, a_t`), the
    /// cost `p^(1-alpha) sum lambda_t^alpha - p` has amplitude gradient
    /// `(1-alpha) p^(-alpha) s v + alpha p^(1-alpha) (r^(alpha-1) (x) I) v - v`.
    /// Eigenvalues below `1e-12 p` are dropped from `r^(alpha-1)`, which
    /// keeps the kink at product members finite (a subgradient choice).
    fn euclidean_gradient(&self, isometry: &CMatrix, alpha: f64) -> CMatrix {
        let members = self.members_matrix(isometry);
        let n = members.nrows();
        let m = members.ncols();
        let (da, db) = (self.dim_a, self.dim_b);
        let mut member_grads = CMatrix::zeros(n, m);
        for (i, v) in members.column_iter().enumerate() {
            let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
            if p < MEMBER_PRUNE_TOL {
                continue;
            }
            // Reduced state on A (da x da), eigendecomposition.
            let reduced = CMatrix::from_fn(da, da, |r, c| {
                (0..db).map(|j| v[r * db + j] * v[c * db + j].conj()).sum()
            });
            let eig = nalgebra::SymmetricEigen::new(reduced);
            let s: f64 = eig
                .eigenvalues
                .iter()
                .map(|&l| l.max(0.0).powf(alpha))
                .sum();
            // q = r^(alpha-1) restricted to eigenvalues above the clamp.
            let mut q = CMatrix::zeros(da, da);
            for (t, &l) in eig.eigenvalues.iter().enumerate() {
                if l > 1e-12 * p {
                    let col = eig.eigenvectors.column(t);
                    let w = Complex64::new(l.powf(alpha - 1.0), 0.0);
                    for r in 0..da {
                        for c in 0..da {
                            q[(r, c)] += col[r] * col[c].conj() * w;
                        }
                    }
                }
            }
            let p_pow = pow_one_minus_alpha(p, alpha);
            let scale_v = Complex64::new((1.0 - alpha) * p_pow / p * s - 1.0, 0.0);
            let scale_q = Complex64::new(alpha * p_pow, 0.0);
            let mut g = v.scale(1.0);
            g *= scale_v;
            // (q (x) I_B) v
            for jb in 0..db {
                for ra in 0..da {
                    let mut acc = Complex64::default();
                    for ca in 0..da {
                        acc += q[(ra, ca)] * v[ca * db + jb];
                    }
                    member_grads[(ra * db + jb, i)] = g[ra * db + jb] + scale_q * acc;
                }
            }
        }
        // d cost / d conj(V_ik) = <c_k | g_i>.
        (self.scaled_support.adjoint() * member_grads).transpose()
    }

    /// Projected gradient with QR retraction and a backtracking step,
    /// until the improvement stalls. Returns the final isometry.
    fn descend(&self, mut isometry: CMatrix, max_steps: usize, alpha: f64) -> CMatrix {
        if alpha == 0.0 {
            // Rank counting has no useful gradient.
            return isometry;
        }
        let mut value = self.objective(&isometry, alpha);
        let mut step = 0.5;
        let mut stall = 0usize;
        for _ in 0..max_steps {
            let grad = self.euclidean_gradient(&isometry, alpha);
            // Tangent projection: G - V herm(V^H G).
            let vhg = isometry.adjoint() * &grad;
            let herm = (&vhg + vhg.adjoint()).scale(0.5);
            let tangent = &grad - &isometry * herm;
            let norm_sq = tangent.norm_squared();
            if norm_sq < 1e-18 {
                break;
            }
            let mut accepted = false;
            for _ in 0..30 {
                let candidate = (&isometry - tangent.scale(step)).qr().q();
                let cand_value = self.objective(&candidate, alpha);
                if cand_value <= value - 1e-4 * step * norm_sq {
                    isometry = candidate;
                    let improved = value - cand_value;
                    value = cand_value;
                    step = (step * 1.5).min(4.0);
                    accepted = true;
                    if improved < self.config.value_tol {
                        stall += 1;
                    } else {
                        stall = 0;
                    }
                    break;
                }
                step *= 0.5;
                if step < 1e-14 {
                    break;
                }
            }
            if !accepted || stall >= 3 {
                break;
            }
        }
        isometry
    }
}

/// Mixes two unnormalized members by the unitary
/// [[cos t, sin t e^{i phi}], [-sin t e^{-i phi}, cos t]]; the sum of the
/// two projectors is preserved exactly.
fn rotate_vectors(va: &CVector, vb: &CVector, theta: f64, phi: f64) -> (CVector, CVector) {
    let (c, s) = (theta.cos(), theta.sin());
    let e = Complex64::from_polar(s, phi);
    let one = Complex64::new(1.0, 0.0);
    let mut u = va.scale(c);
    u.axpy(e, vb, one);
    let mut w = vb.scale(c);
    w.axpy(-e.conj(), va, one);
    (u, w)
}

/// Best rotation angles for the two-member objective: a coarse grid scan
/// followed by alternating golden-section refinements. Returns
/// `(theta, phi, value)` with `value <= base`.
fn best_rotation(
    va: &CVector,
    vb: &CVector,
    dim_a: usize,
    dim_b: usize,
    alpha: f64,
    step_tol: f64,
    base: f64,
) -> (f64, f64, f64) {
    let eval = |theta: f64, phi: f64| -> f64 {
        let (u, w) = rotate_vectors(va, vb, theta, phi);
        member_cost(&u, dim_a, dim_b, alpha) + member_cost(&w, dim_a, dim_b, alpha)
    };
    let mut best = (0.0f64, 0.0f64, base);
    const THETAS: [f64; 4] = [
        std::f64::consts::PI / 10.0,
        std::f64::consts::PI / 5.0,
        3.0 * std::f64::consts::PI / 10.0,
        2.0 * std::f64::consts::PI / 5.0,
    ];
    for &theta in &THETAS {
        for l in 0..8 {
            let phi = 2.0 * std::f64::consts::PI * l as f64 / 8.0;
            let v = eval(theta, phi);
            if v < best.2 {
                best = (theta, phi, v);
            }
        }
    }
    let golden = |f: &dyn Fn(f64) -> f64, mut lo: f64, mut hi: f64| -> (f64, f64) {
        const INV_PHI: f64 = 0.618_033_988_749_894_9;
        let mut x1 = hi - INV_PHI * (hi - lo);
        let mut x2 = lo + INV_PHI * (hi - lo);
        let (mut f1, mut f2) = (f(x1), f(x2));
        while hi - lo > step_tol {
            if f1 <= f2 {
                hi = x2;
                x2 = x1;
                f2 = f1;
                x1 = hi - INV_PHI * (hi - lo);
                f1 = f(x1);
            } else {
                lo = x1;
                x1 = x2;
                f1 = f2;
                x2 = lo + INV_PHI * (hi - lo);
                f2 = f(x2);
            }
        }
        if f1 <= f2 {
            (x1, f1)
        } else {
            (x2, f2)
        }
    };
    let (mut theta, mut phi, mut val) = best;
    for _ in 0..2 {
        let phi_now = phi;
        let (t, v) = golden(
            &|t| eval(t, phi_now),
            theta - std::f64::consts::PI / 10.0,
            theta + std::f64::consts::PI / 10.0,
        );
        if v < val {
            theta = t;
            val = v;
        }
        let theta_now = theta;
        let (f, v) = golden(
            &|f| eval(theta_now, f),
            phi - std::f64::consts::PI / 4.0,
            phi + std::f64::consts::PI / 4.0,
        );
        if v < val {
            phi = f;
            val = v;
        }
    }
    (theta, phi, val)
}

struct PairSearch<'a> {
    members: &'a mut Vec<CVector>,
    costs: Vec<f64>,
    dim_a: usize,
    dim_b: usize,
    alpha: f64,
}

impl<'a> PairSearch<'a> {
    fn new(members: &'a mut Vec<CVector>, dim_a: usize, dim_b: usize, alpha: f64) -> Self {
        let costs = members
            .iter()
            .map(|v| member_cost(v, dim_a, dim_b, alpha))
            .collect();
        Self {
            members,
            costs,
            dim_a,
            dim_b,
            alpha,
        }
    }

    fn total(&self) -> f64 {
        self.costs.iter().sum()
    }

    /// Candidate pair after mixing members i, j by the unitary
    /// [[cos t, sin t e^{i phi}], [-sin t e^{-i phi}, cos t]].
    fn rotated(&self, i: usize, j: usize, theta: f64, phi: f64) -> (CVector, CVector) {
        rotate_vectors(&self.members[i], &self.members[j], theta, phi)
    }

    /// Minimizes the pair objective over the rotation angles with a coarse
    /// grid followed by alternating golden-section refinement; applies the
    /// rotation when it improves on the current pair cost.
    fn improve_pair(&mut self, i: usize, j: usize, step_tol: f64) -> f64 {
        let base = self.costs[i] + self.costs[j];
        // The pair objective is nonnegative; nothing to gain here.
        if base <= 1e-13 {
            return 0.0;
        }
        let (theta, phi, val) = best_rotation(
            &self.members[i],
            &self.members[j],
            self.dim_a,
            self.dim_b,
            self.alpha,
            step_tol,
            base,
        );
        if val < base {
            let (u, w) = self.rotated(i, j, theta, phi);
            self.costs[i] = member_cost(&u, self.dim_a, self.dim_b, self.alpha);
            self.costs[j] = member_cost(&w, self.dim_a, self.dim_b, self.alpha);
            self.members[i] = u;
            self.members[j] = w;
            base - (self.costs[i] + self.costs[j])
        } else {
            0.0
        }
    }

    /// Coordinated three-member move: a coarse rotation of (i, j) followed
    /// by a fully optimized rotation against k. Pair moves alone admit
    /// stable ensembles above the optimum (the surviving descent direction
    /// couples three members); this move is the escape.
    fn improve_triple(&mut self, i: usize, j: usize, k: usize, step_tol: f64) -> f64 {
        let base = self.costs[i] + self.costs[j] + self.costs[k];
        if base <= 1e-13 {
            return 0.0;
        }
        let mut best: Option<(f64, CVector, CVector, CVector)> = None;
        let mut best_val = base;
        for step in 1..=4 {
            let theta1 = std::f64::consts::PI * step as f64 / 10.0;
            for l in 0..6 {
                let phi1 = 2.0 * std::f64::consts::PI * l as f64 / 6.0;
                let (u, w) = self.rotated(i, j, theta1, phi1);
                let cost_u = member_cost(&u, self.dim_a, self.dim_b, self.alpha);
                let cost_w = member_cost(&w, self.dim_a, self.dim_b, self.alpha);
                // Try closing the move through k with either partner.
                for (first, first_cost, spare, spare_cost) in
                    [(&u, cost_u, &w, cost_w), (&w, cost_w, &u, cost_u)]
                {
                    let pair_base = first_cost + self.costs[k];
                    let (t2, p2, val2) = best_rotation(
                        first,
                        &self.members[k],
                        self.dim_a,
                        self.dim_b,
                        self.alpha,
                        step_tol,
                        pair_base,
                    );
                    let total = val2 + spare_cost;
                    if total < best_val - 1e-15 {
                        let (a, b) = rotate_vectors(first, &self.members[k], t2, p2);
                        best_val = total;
                        best = Some((total, a, b, spare.clone()));
                    }
                }
            }
        }
        if let Some((total, a, b, spare)) = best {
            self.members[i] = a;
            self.members[k] = b;
            self.members[j] = spare;
            self.costs[i] = member_cost(&self.members[i], self.dim_a, self.dim_b, self.alpha);
            self.costs[j] = member_cost(&self.members[j], self.dim_a, self.dim_b, self.alpha);
            self.costs[k] = member_cost(&self.members[k], self.dim_a, self.dim_b, self.alpha);
            base - total
        } else {
            0.0
        }
    }

    /// Targets the most expensive members with triple moves; returns the
    /// accumulated gain.
    fn triple_escape(&mut self, step_tol: f64) -> f64 {
        let m = self.members.len();
        if m < 3 {
            return 0.0;
        }
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| self.costs[b].partial_cmp(&self.costs[a]).expect("finite"));
        let mut gain = 0.0;
        for &i in order.iter().take(2) {
            for j in 0..m {
                for k in (j + 1)..m {
                    if j == i || k == i {
                        continue;
                    }
                    gain += self.improve_triple(i, j, k, step_tol);
                }
            }
        }
        gain
    }

    /// Extracts an exact product member. For a nearly product member, the
    /// move solves `M x ~ a (x) b` (the member's rank-1 truncation) through
    /// the member matrix `M`, completes `x` to a unitary recombination and
    /// applies it: the first new member lands exactly on the product
    /// manifold while the mixture stays intact. Pair and gradient moves
    /// cannot do this for local dimension 3 and above (zeroing the smaller
    /// Schmidt coefficients there needs more than two members to conspire),
    /// and fractional powers punish even tiny residuals hard, so this move
    /// is what closes the final gap. Keeps a change only when the total
    /// objective improves; returns the accumulated gain.
    fn inject_products(&mut self) -> f64 {
        let m = self.members.len();
        if m < 2 {
            return 0.0;
        }
        let n = self.members[0].len();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| self.costs[a].partial_cmp(&self.costs[b]).expect("finite"));
        let mut gain = 0.0;
        for &i in &order {
            let p: f64 = self.members[i].iter().map(|z| z.norm_sqr()).sum();
            if p < MEMBER_PRUNE_TOL {
                continue;
            }
            // Rank-1 truncation of the candidate member.
            let coeff = CMatrix::from_fn(self.dim_a, self.dim_b, |r, c| {
                self.members[i][r * self.dim_b + c]
            });
            let svd = coeff.svd(true, true);
            let (u_loc, v_loc) = (svd.u.as_ref().expect("u"), svd.v_t.as_ref().expect("v_t"));
            let mut sv: Vec<f64> = svd.singular_values.iter().copied().collect();
            sv.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
            let top = svd
                .singular_values
                .iter()
                .enumerate()
                .max_by(|(_, x), (_, y)| x.partial_cmp(y).expect("finite"))
                .map(|(k, _)| k)
                .expect("nonempty");
            // Only nearly-product members are worth snapping, and members
            // that are already exact products have nothing to gain.
            let lambda2 = if sv.len() > 1 { sv[1] * sv[1] / p } else { 0.0 };
            if lambda2 > 0.2 || lambda2 <= 1e-13 {
                continue;
            }
            let mut target = CVector::zeros(n);
            for r in 0..self.dim_a {
                for c in 0..self.dim_b {
                    target[r * self.dim_b + c] = u_loc[(r, top)] * v_loc[(top, c)];
                }
            }
            // Solve M x ~ target; skip when the product is out of range.
            let stacked = CMatrix::from_fn(n, m, |r, c| self.members[c][r]);
            let msvd = stacked.clone().svd(true, true);
            let Ok(x) = msvd.solve(&target, 1e-12) else {
                continue;
            };
            let reached = &stacked * &x;
            let reach_norm = reached.norm();
            if reach_norm < 1e-10 {
                continue;
            }
            let angle_dev = (&reached - target.scale(1.0)).norm() / reach_norm.max(1.0);
            if angle_dev > 1e-9 {
                continue;
            }
            // Unitary completion with first column along x; the dominant
            // basis column is dropped so the completion stays close to a
            // relabeling of the remaining members.
            let dominant = (0..m)
                .max_by(|&a, &b| x[a].norm_sqr().partial_cmp(&x[b].norm_sqr()).expect("finite"))
                .expect("nonempty");
            let mut completion = CMatrix::zeros(m, m);
            completion.set_column(0, &x.scale(1.0 / x.norm()));
            let mut col = 1;
            for k in 0..m {
                if k == dominant {
                    continue;
                }
                completion[(k, col)] = Complex64::new(1.0, 0.0);
                col += 1;
            }
            let unitary = completion.qr().q();
            let mut rotated = &stacked * &unitary;
            // Snap the new first member onto the exact product.
            let first = rotated.column(0).into_owned();
            let overlap = target.dotc(&first);
            if overlap.norm() / first.norm().max(1e-300) > 1.0 - 1e-8 {
                let factor = overlap / overlap.norm() * Complex64::new(first.norm(), 0.0);
                rotated.set_column(0, &target.map(|z| z * factor));
            }
            let new_members: Vec<CVector> =
                rotated.column_iter().map(|c| c.into_owned()).collect();
            let new_costs: Vec<f64> = new_members
                .iter()
                .map(|v| member_cost(v, self.dim_a, self.dim_b, self.alpha))
                .collect();
            let before: f64 = self.costs.iter().sum();
            let after: f64 = new_costs.iter().sum();
            if after < before - 1e-15 {
                gain += before - after;
                *self.members = new_members;
                self.costs = new_costs;
            }
        }
        gain
    }

    /// Replaces every member (columns of `stacked`) and refreshes costs.
    fn reset_members(&mut self, stacked: CMatrix) {
        for (i, col) in stacked.column_iter().enumerate() {
            self.members[i] = col.into_owned();
            self.costs[i] = member_cost(&self.members[i], self.dim_a, self.dim_b, self.alpha);
        }
    }

    fn apply_random_rotation(&mut self, i: usize, j: usize, rng: &mut ChaCha12Rng) {
        use rand::RngExt;
        let theta = 0.15 + 0.5 * rng.random::<f64>();
        let phi = 2.0 * std::f64::consts::PI * rng.random::<f64>();
        let (u, w) = self.rotated(i, j, theta, phi);
        self.costs[i] = member_cost(&u, self.dim_a, self.dim_b, self.alpha);
        self.costs[j] = member_cost(&w, self.dim_a, self.dim_b, self.alpha);
        self.members[i] = u;
        self.members[j] = w;
    }

    /// Neutral perturbation: rotating two zero-cost members keeps the
    /// objective unchanged but moves the pair basis, which regularly
    /// unlocks further descent for pairs that were individually stuck.
    /// Returns false when fewer than two zero-cost members exist.
    fn free_kick(&mut self, rng: &mut ChaCha12Rng) -> bool {
        use rand::RngExt;
        let zero: Vec<usize> = self
            .costs
            .iter()
            .enumerate()
            .filter(|(_, &c)| c <= 1e-12)
            .map(|(i, _)| i)
            .collect();
        if zero.len() < 2 {
            return false;
        }
        for _ in 0..zero.len() {
            let a = zero[rng.random_range(0..zero.len())];
            let b = loop {
                let b = zero[rng.random_range(0..zero.len())];
                if b != a {
                    break b;
                }
            };
            self.apply_random_rotation(a, b, rng);
        };
        true
    }

    /// Random perturbation: rotates a handful of random pairs by moderate
    /// random angles, leaving the mixture intact.
    fn kick(&mut self, rng: &mut ChaCha12Rng) {
        use rand::RngExt;
        let m = self.members.len();
        for _ in 0..m.div_ceil(2) {
            let i = rng.random_range(0..m);
            let j = rng.random_range(0..m - 1);
            let j = if j >= i { j + 1 } else { j };
            self.apply_random_rotation(i, j, rng);
        }
    }
}

struct RestartOutcome {
    value: f64,
    members: Vec<CVector>,
    converged: bool,
}

/// Escape attempts per restart: after the sweeps stall, a perturbation
/// nudges the ensemble and the sweeps rerun, keeping the best visit. Pair
/// rotations alone have genuine stable points above the optimum (zero-cost
/// members freeze in place), so the escapes prefer objective-neutral
/// rotations among zero-cost members. All draws come from the restart's
/// own stream.
const KICK_CYCLES: usize = 8;

/// Sweeps pairs until the objective stalls for three consecutive sweeps or
/// the remaining iteration budget runs out. Returns whether it stalled.
fn sweep_until_stable(
    search: &mut PairSearch<'_>,
    config: &RoofConfig,
    iters_left: &mut usize,
) -> bool {
    let m = search.costs.len();
    let mut prev = search.total();
    let mut streak = 0usize;
    while *iters_left > 0 {
        *iters_left -= 1;
        for i in 0..m {
            for j in (i + 1)..m {
                search.improve_pair(i, j, config.step_tol);
            }
        }
        let now = search.total();
        if prev - now < config.value_tol {
            streak += 1;
            if streak >= 3 {
                return true;
            }
        } else {
            streak = 0;
        }
        prev = now;
    }
    false
}

/// Projected-gradient step budget per descent phase.
const GRAD_STEPS: usize = 300;

/// Pair sweeps interleaved with triple escapes until neither finds
/// anything; returns whether the final sweep phase stalled (as opposed to
/// exhausting the iteration budget).
fn polish(search: &mut PairSearch<'_>, config: &RoofConfig, iters_left: &mut usize) -> bool {
    let mut stalled = sweep_until_stable(search, config, iters_left);
    while *iters_left > 0 {
        if search.inject_products() >= config.value_tol {
            stalled = sweep_until_stable(search, config, iters_left);
            continue;
        }
        if search.triple_escape(config.step_tol) < config.value_tol {
            break;
        }
        stalled = sweep_until_stable(search, config, iters_left);
    }
    stalled
}

fn run_restart(
    descent: &ManifoldDescent<'_>,
    m: usize,
    alpha: f64,
    config: &RoofConfig,
    stream: u64,
) -> RestartOutcome {
    let (dim_a, dim_b) = (descent.dim_a, descent.dim_b);
    let mut rng = ChaCha12Rng::seed_from_u64(config.seed);
    rng.set_stream(stream);
    let rank = descent.inv_mu.len();
    let mut isometry = random_isometry(&mut rng, m, rank);
    // Continuation: the alpha = 1/2 landscape has the mildest kinks at
    // product members, and for the structured families the same ensembles
    // are optimal at every alpha. Optimizing there first and reusing the
    // point as a warm start avoids the needle-thin basins of small alpha.
    if alpha < 0.5 {
        isometry = descent.descend(isometry, GRAD_STEPS, 0.5);
    }
    let isometry = descent.descend(isometry, GRAD_STEPS, alpha);
    let mut members: Vec<CVector> = descent
        .members_matrix(&isometry)
        .column_iter()
        .map(|c| c.into_owned())
        .collect();
    let mut iters_left = config.max_iters;
    let mut search = PairSearch::new(&mut members, dim_a, dim_b, alpha);
    let mut converged = polish(&mut search, config, &mut iters_left);
    let mut best_value = search.total();
    let mut best_members = search.members.clone();
    for _ in 0..KICK_CYCLES {
        if iters_left == 0 || m < 2 {
            break;
        }
        if !search.free_kick(&mut rng) {
            search.kick(&mut rng);
        }
        // Collective descent out of the perturbed point, then pair polish.
        let kicked = descent.isometry_from_members(search.members.as_slice());
        let refined = descent.descend(kicked, GRAD_STEPS, alpha);
        search.reset_members(descent.members_matrix(&refined));
        let stalled = polish(&mut search, config, &mut iters_left);
        let value = search.total();
        if value < best_value {
            best_value = value;
            best_members = search.members.clone();
            converged = stalled;
        }
    }
    drop(search);
    // Report with the generic (high-accuracy) eigenvalue path.
    let value = best_members
        .iter()
        .map(|v| accurate_member_cost(v, dim_a, dim_b, alpha))
        .sum::<f64>()
        .max(0.0);
    RestartOutcome {
        value,
        members: best_members,
        converged,
    }
}

/// Like [`member_cost`] but always through the generic eigensolver.
fn accurate_member_cost(v: &CVector, dim_a: usize, dim_b: usize, alpha: f64) -> f64 {
    let p: f64 = v.iter().map(|z| z.norm_sqr()).sum();
    if p < MEMBER_PRUNE_TOL {
        return 0.0;
    }
    let small = dim_a.min(dim_b);
    if small == 1 {
        return 0.0;
    }
    let m = if dim_a <= dim_b {
        CMatrix::from_fn(dim_a, dim_a, |r, c| {
            (0..dim_b).map(|j| v[r * dim_b + j] * v[c * dim_b + j].conj()).sum()
        })
    } else {
        CMatrix::from_fn(dim_b, dim_b, |r, c| {
            (0..dim_a).map(|i| v[i * dim_b + r] * v[i * dim_b + c].conj()).sum()
        })
    };
    let eigs: Vec<f64> = m.symmetric_eigenvalues().iter().copied().collect();
    pow_one_minus_alpha(p, alpha) * sum_pow(&eigs, alpha, p) - p
}

/// Searches for a low ensemble average of the alpha-concurrence over
/// decompositions of `rho`; the result is a certified upper bound on the
/// convex roof (each restart evaluates an exact decomposition), best of
/// `config.restarts` independent local searches. Deterministic for a fixed
/// seed; restarts run in parallel.
pub fn roof_upper_bound(
    rho: &DensityMatrix,
    alpha: Alpha,
    config: &RoofConfig,
) -> Result<RoofResult> {
    if config.restarts < 1 {
        return Err(Error::Config("restarts must be at least 1".to_string()));
    }
    if !(config.step_tol > 0.0) || !(config.value_tol > 0.0) {
        return Err(Error::Config("tolerances must be positive".to_string()));
    }
    let support = eigen_support(rho)?;
    let rank = support.len();
    let cap = (rho.dim_a() * rho.dim_b()).pow(2);
    let m = match config.ensemble_size {
        Some(m) => {
            if m < rank {
                return Err(Error::Config(format!(
                    "ensemble size {m} is below the state rank {rank}"
                )));
            }
            if m > cap {
                return Err(Error::Config(format!(
                    "ensemble size {m} exceeds the sufficiency cap {cap}"
                )));
            }
            m
        }
        None => (rank * rank).min(rank + 4),
    };
    let a = alpha.value();
    let (da, db) = (rho.dim_a(), rho.dim_b());
    let n = da * db;
    let descent = ManifoldDescent {
        scaled_support: CMatrix::from_fn(n, rank, |r, k| {
            support[k].1[r] * Complex64::new(support[k].0.sqrt(), 0.0)
        }),
        inv_mu: support.iter().map(|(mu, _)| 1.0 / mu).collect(),
        dim_a: da,
        dim_b: db,
        config,
    };
    let outcomes: Vec<RestartOutcome> = (0..config.restarts)
        .into_par_iter()
        .map(|t| run_restart(&descent, m, a, config, t as u64 + 1))
        .collect();
    let best_idx = outcomes
        .iter()
        .enumerate()
        .min_by(|(ia, x), (ib, y)| {
            x.value
                .partial_cmp(&y.value)
                .expect("roof values are finite")
                .then(ia.cmp(ib))
        })
        .map(|(i, _)| i)
        .expect("at least one restart");
    let best = &outcomes[best_idx];
    let ensemble = ensemble_from_members(da, db, &best.members)?;
    ensemble.validate_against(rho)?;
    Ok(RoofResult {
        value: best.value,
        best: ensemble,
        converged: best.converged,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::measures::{alpha_concurrence_pure, isotropic_alpha, lower_bound_alpha};
    use crate::states::{isotropic, random_pure};
    use approx::assert_relative_eq;

    fn alpha(a: f64) -> Alpha {
        Alpha::new(a).unwrap()
    }

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_isometry_recovers_eigendecomposition() {
        let rho = isotropic(2, 0.7).unwrap();
        let support = eigen_support(&rho).unwrap();
        let rank = support.len();
        let ens = decomposition_from_isometry(&rho, &CMatrix::identity(rank, rank)).unwrap();
        assert_eq!(ens.len(), rank);
        ens.validate_against(&rho).unwrap();
        // Weights are the eigenvalues.
        let mut ps: Vec<f64> = ens.members().iter().map(|(p, _)| *p).collect();
        let mut mus: Vec<f64> = support.iter().map(|(mu, _)| *mu).collect();
        ps.sort_by(|x, y| y.partial_cmp(x).unwrap());
        mus.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (p, mu) in ps.iter().zip(&mus) {
            assert_relative_eq!(p, mu, epsilon = 1e-10);
        }
    }

    #[test]
    fn rank_one_state_gives_parallel_members() {
        let psi = random_pure(2, 2, 5);
        let rho = DensityMatrix::from_pure(&psi);
        let v = CMatrix::from_row_slice(
            3,
            1,
            &[c(0.6, 0.0), c(0.0, 0.48), c(0.64, 0.0)],
        );
        let ens = decomposition_from_isometry(&rho, &v).unwrap();
        ens.validate_against(&rho).unwrap();
        for (_, member) in ens.members() {
            let overlap = member
                .amplitudes()
                .dotc(psi.amplitudes())
                .norm();
            assert_relative_eq!(overlap, 1.0, epsilon = 1e-9);
        }
    }

    #[test]
    fn fourier_isometry_on_maximally_mixed() {
        // 4x4 discrete-Fourier isometry: four equal-weight members mixing
        // back to identity/4.
        let rho = isotropic(2, 0.25).unwrap();
        let omega = |k: usize| {
            Complex64::from_polar(0.5, 2.0 * std::f64::consts::PI * k as f64 / 4.0)
        };
        let v = CMatrix::from_fn(4, 4, |r, k| omega(r * k));
        let ens = decomposition_from_isometry(&rho, &v).unwrap();
        assert_eq!(ens.len(), 4);
        for (p, _) in ens.members() {
            assert_relative_eq!(*p, 0.25, epsilon = 1e-10);
        }
        ens.validate_against(&rho).unwrap();
    }

    #[test]
    fn rejects_non_isometry() {
        let rho = isotropic(2, 0.25).unwrap();
        let v = CMatrix::from_fn(4, 4, |r, k| c((r + k) as f64, 0.0));
        assert!(matches!(
            decomposition_from_isometry(&rho, &v),
            Err(Error::NotIsometry { .. })
        ));
        let wrong_rank = CMatrix::identity(4, 2);
        assert!(decomposition_from_isometry(&rho, &wrong_rank).is_err());
    }

    #[test]
    fn roof_on_pure_state_is_exact() {
        let psi = random_pure(2, 2, 11);
        let rho = DensityMatrix::from_pure(&psi);
        let config = RoofConfig {
            restarts: 2,
            ..Default::default()
        };
        for a in [0.25, 0.5] {
            let exact = alpha_concurrence_pure(&psi, alpha(a)).unwrap();
            let roof = roof_upper_bound(&rho, alpha(a), &config).unwrap();
            assert_relative_eq!(roof.value, exact, epsilon = 1e-9);
        }
    }

    #[test]
    fn roof_on_diagonal_separable_state_vanishes() {
        // 0.3 |00><00| + 0.7 |11><11|: the eigenbasis is already a product
        // decomposition, so the optimum is zero.
        let mut m = CMatrix::zeros(4, 4);
        m[(0, 0)] = c(0.3, 0.0);
        m[(3, 3)] = c(0.7, 0.0);
        let rho = DensityMatrix::new(2, 2, m).unwrap();
        let roof = roof_upper_bound(&rho, alpha(0.5), &RoofConfig::default()).unwrap();
        assert!(roof.value <= 1e-6, "roof value {}", roof.value);
    }

    #[test]
    fn roof_brackets_isotropic_closed_form() {
        let rho = isotropic(2, 0.9).unwrap();
        let a = alpha(0.5);
        let closed = isotropic_alpha(2, 0.9, a).unwrap();
        assert_relative_eq!(closed, 0.331_370_849_898_476, epsilon = 1e-12);
        let roof = roof_upper_bound(&rho, a, &RoofConfig::default()).unwrap();
        assert!(roof.value >= closed - 1e-7);
        assert!(roof.value <= closed + 1e-3, "roof {} closed {closed}", roof.value);
        let lb = lower_bound_alpha(&rho, a).unwrap().lower_bound;
        assert!(roof.value >= lb - 1e-7);
        roof.best.validate_against(&rho).unwrap();
    }

    #[test]
    fn more_restarts_never_worsen() {
        let rho = isotropic(2, 0.6).unwrap();
        let a = alpha(0.25);
        let mut prev = f64::INFINITY;
        for restarts in [1usize, 2, 4, 8] {
            let config = RoofConfig {
                restarts,
                ..Default::default()
            };
            let v = roof_upper_bound(&rho, a, &config).unwrap().value;
            assert!(v <= prev + 1e-12);
            prev = v;
        }
    }

    #[test]
    fn config_validation() {
        let rho = isotropic(2, 0.5).unwrap();
        let bad = RoofConfig {
            restarts: 0,
            ..Default::default()
        };
        assert!(matches!(
            roof_upper_bound(&rho, alpha(0.5), &bad),
            Err(Error::Config(_))
        ));
        let too_small = RoofConfig {
            ensemble_size: Some(1),
            ..Default::default()
        };
        assert!(matches!(
            roof_upper_bound(&rho, alpha(0.5), &too_small),
            Err(Error::Config(_))
        ));
        let too_big = RoofConfig {
            ensemble_size: Some(17),
            ..Default::default()
        };
        assert!(matches!(
            roof_upper_bound(&rho, alpha(0.5), &too_big),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn euclidean_gradient_matches_finite_differences() {
        use rand::SeedableRng;
        let rho = crate::states::werner(3, 0.7).unwrap();
        let support = eigen_support(&rho).unwrap();
        let rank = support.len();
        let n = 9;
        let descent = ManifoldDescent {
            scaled_support: CMatrix::from_fn(n, rank, |r, k| {
                support[k].1[r] * Complex64::new(support[k].0.sqrt(), 0.0)
            }),
            inv_mu: support.iter().map(|(mu, _)| 1.0 / mu).collect(),
            dim_a: 3,
            dim_b: 3,
            config: &RoofConfig::default(),
        };
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(42);
        let v = random_isometry(&mut rng, rank + 2, rank);
        for a in [0.25, 0.5] {
            let grad = descent.euclidean_gradient(&v, a);
            let h = 1e-6;
            for &(i, k) in &[(0usize, 0usize), (3, 4), (10, 8)] {
                for (re_part, expected) in [(true, 2.0 * grad[(i, k)].re), (false, 2.0 * grad[(i, k)].im)] {
                    let delta = if re_part {
                        Complex64::new(h, 0.0)
                    } else {
                        Complex64::new(0.0, h)
                    };
                    let mut vp = v.clone();
                    vp[(i, k)] += delta;
                    let mut vm = v.clone();
                    vm[(i, k)] -= delta;
                    let fd = (descent.objective(&vp, a) - descent.objective(&vm, a)) / (2.0 * h);
                    assert!(
                        (fd - expected).abs() < 1e-5 * (1.0 + expected.abs()),
                        "alpha={a} entry=({i},{k}) re={re_part}: fd={fd}, analytic={expected}"
                    );
                }
            }
        }
    }

    #[test]
    fn fast_and_accurate_member_costs_agree() {
        for seed in 0..20 {
            let psi = random_pure(3, 3, 2000 + seed);
            let v = psi.amplitudes().scale(1.3);
            for a in [0.0, 0.25, 0.37, 0.5] {
                let fast = member_cost(&v, 3, 3, a);
                let accurate = accurate_member_cost(&v, 3, 3, a);
                assert_relative_eq!(fast, accurate, epsilon = 1e-8);
            }
            // Asymmetric dims reduce on the smaller side.
            let psi = random_pure(2, 4, 3000 + seed);
            let v = psi.amplitudes().scale(0.7);
            for a in [0.25, 0.5] {
                assert_relative_eq!(
                    member_cost(&v, 2, 4, a),
                    accurate_member_cost(&v, 2, 4, a),
                    epsilon = 1e-8
                );
                let psi2 = random_pure(4, 2, 4000 + seed);
                let v2 = psi2.amplitudes().scale(0.7);
                assert_relative_eq!(
                    member_cost(&v2, 4, 2, a),
                    accurate_member_cost(&v2, 4, 2, a),
                    epsilon = 1e-8
                );
            }
        }
    }
}
