//! Closed-form entanglement quantities: the alpha-concurrence on pure
//! states, PPT/realignment lower bounds for mixed states, the exact
//! isotropic/Werner formulas, and the comparison measures (q-concurrence,
//! concurrence, Werner entanglement of formation).

use crate::error::{Error, Result};
use crate::qmat::{self, trace_norm};
use crate::states::{partial_trace_b, partial_transpose, realign, schmidt, DensityMatrix, PureState, SchmidtVector};

/// Exponent of the alpha-concurrence, restricted to `[0, 1/2]` at
/// construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Alpha(f64);

impl Alpha {
    pub fn new(alpha: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&alpha) {
            return Err(Error::domain(format!(
                "alpha must lie in [0, 1/2], got {alpha}"
            )));
        }
        Ok(Self(alpha))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

/// Which criterion norm attained the maximum in [`lower_bound_alpha`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundBranch {
    Ppt,
    Realignment,
    Both,
}

impl std::fmt::Display for BoundBranch {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BoundBranch::Ppt => write!(f, "ppt"),
            BoundBranch::Realignment => write!(f, "realignment"),
            BoundBranch::Both => write!(f, "both"),
        }
    }
}

/// Certified lower bound on the alpha-concurrence of a mixed state:
/// `(d^(1-alpha) - 1)/(d - 1) * [max(|rho^G|_1, |R(rho)|_1) - 1]`, clamped
/// at zero when both criteria are silent.
#[derive(Debug, Clone)]
pub struct BoundReport {
    pub ppt_norm: f64,
    pub realign_norm: f64,
    pub lower_bound: f64,
    pub branch: BoundBranch,
}

/// `sum_i lambda_i^alpha - 1` over the squared Schmidt coefficients.
pub fn alpha_concurrence_schmidt(lambda: &SchmidtVector, alpha: Alpha) -> f64 {
    let a = alpha.value();
    lambda.lambdas().iter().map(|&l| l.powf(a)).sum::<f64>() - 1.0
}

/// Pure-state alpha-concurrence via the Schmidt coefficients.
pub fn alpha_concurrence_pure(psi: &PureState, alpha: Alpha) -> Result<f64> {
    Ok(alpha_concurrence_schmidt(&schmidt(psi, None)?, alpha))
}

/// Pure-state alpha-concurrence via `Tr rho_A^alpha - 1`, the reduced
/// density matrix route. Agrees with [`alpha_concurrence_pure`] within 1e-9;
/// both are exposed so either can cross-check the other.
pub fn alpha_concurrence_pure_via_reduced(psi: &PureState, alpha: Alpha) -> Result<f64> {
    let rho_a = partial_trace_b(&DensityMatrix::from_pure(psi));
    Ok(qmat::trace_power(&rho_a, alpha.value(), None)? - 1.0)
}

/// q-concurrence `1 - Tr rho_A^q` for `q >= 2`.
pub fn q_concurrence_pure(psi: &PureState, q: f64) -> Result<f64> {
    if !(q >= 2.0) {
        return Err(Error::domain(format!("q-concurrence requires q >= 2, got {q}")));
    }
    let s = schmidt(psi, None)?;
    Ok(1.0 - s.lambdas().iter().map(|&l| l.powf(q)).sum::<f64>())
}

/// Concurrence `sqrt(2 (1 - Tr rho_A^2))` of a pure state.
pub fn concurrence_pure(psi: &PureState) -> Result<f64> {
    let s = schmidt(psi, None)?;
    let purity: f64 = s.lambdas().iter().map(|&l| l * l).sum();
    Ok((2.0 * (1.0 - purity)).max(0.0).sqrt())
}

/// Relative tolerance at which the two criterion norms count as tied.
const BRANCH_TIE_TOL: f64 = 1e-12;

/// Lower bound on the alpha-concurrence of `rho` from the PPT and
/// realignment criteria. Requires equal local dimensions.
pub fn lower_bound_alpha(rho: &DensityMatrix, alpha: Alpha) -> Result<BoundReport> {
    if rho.dim_a() != rho.dim_b() {
        return Err(Error::domain(format!(
            "the lower bound needs equal local dimensions, got {}x{}",
            rho.dim_a(),
            rho.dim_b()
        )));
    }
    let d = rho.dim_a();
    if d < 2 {
        return Err(Error::domain("the lower bound needs d >= 2"));
    }
    let ppt_norm = trace_norm(&partial_transpose(rho));
    let realign_norm = trace_norm(&realign(rho));
    let max_norm = ppt_norm.max(realign_norm);
    let branch = if (ppt_norm - realign_norm).abs() <= BRANCH_TIE_TOL * max_norm.max(1.0) {
        BoundBranch::Both
    } else if ppt_norm > realign_norm {
        BoundBranch::Ppt
    } else {
        BoundBranch::Realignment
    };
    let lower_bound = family_prefactor(d, alpha) * (max_norm - 1.0).max(0.0);
    Ok(BoundReport {
        ppt_norm,
        realign_norm,
        lower_bound,
        branch,
    })
}

/// `(d^(1-alpha) - 1)/(d - 1)`.
fn family_prefactor(d: usize, alpha: Alpha) -> f64 {
    ((d as f64).powf(1.0 - alpha.value()) - 1.0) / (d as f64 - 1.0)
}

fn check_family_params(d: usize, param: f64, name: &str) -> Result<()> {
    if d < 2 {
        return Err(Error::domain(format!("{name} requires d >= 2")));
    }
    if !(0.0..=1.0).contains(&param) {
        return Err(Error::domain(format!(
            "{name} parameter must lie in [0, 1], got {param}"
        )));
    }
    Ok(())
}

/// Exact alpha-concurrence of the isotropic state: zero up to the
/// separability threshold `F = 1/d`, then
/// `(d^(1-alpha) - 1)/(d - 1) * (dF - 1)`.
pub fn isotropic_alpha(d: usize, fidelity: f64, alpha: Alpha) -> Result<f64> {
    check_family_params(d, fidelity, "isotropic_alpha")?;
    let df = d as f64 * fidelity;
    if df <= 1.0 {
        return Ok(0.0);
    }
    Ok(family_prefactor(d, alpha) * (df - 1.0))
}

/// Exact alpha-concurrence of the Werner state: zero up to `W = 1/2`, then
/// `(2^(1-alpha) - 1)(2W - 1)`. The value is dimension independent.
pub fn werner_alpha(weight: f64, alpha: Alpha) -> Result<f64> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::domain(format!(
            "Werner weight must lie in [0, 1], got {weight}"
        )));
    }
    if weight <= 0.5 {
        return Ok(0.0);
    }
    Ok((2.0_f64.powf(1.0 - alpha.value()) - 1.0) * (2.0 * weight - 1.0))
}

/// Concurrence of the isotropic state, `sqrt(2/(d(d-1))) (dF - 1)` above
/// the threshold.
pub fn isotropic_concurrence(d: usize, fidelity: f64) -> Result<f64> {
    check_family_params(d, fidelity, "isotropic_concurrence")?;
    let df = d as f64 * fidelity;
    if df <= 1.0 {
        return Ok(0.0);
    }
    Ok((2.0 / (d as f64 * (d as f64 - 1.0))).sqrt() * (df - 1.0))
}

/// Concurrence of the Werner state, `2W - 1` above the threshold.
pub fn werner_concurrence(weight: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::domain(format!(
            "Werner weight must lie in [0, 1], got {weight}"
        )));
    }
    Ok((2.0 * weight - 1.0).max(0.0))
}

/// Entanglement of formation of the Werner state,
/// `H2(1/2 (1 - 2 sqrt(W(1-W))))` above the threshold.
pub fn werner_eof(weight: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::domain(format!(
            "Werner weight must lie in [0, 1], got {weight}"
        )));
    }
    if weight <= 0.5 {
        return Ok(0.0);
    }
    Ok(binary_entropy(0.5 * (1.0 - 2.0 * (weight * (1.0 - weight)).sqrt())))
}

/// Binary entropy `-x log2 x - (1-x) log2 (1-x)` with the limits
/// `H2(0) = H2(1) = 0` taken explicitly.
pub fn binary_entropy(x: f64) -> f64 {
    let term = |t: f64| if t <= 0.0 { 0.0 } else { -t * t.log2() };
    term(x) + term(1.0 - x)
}

/// Ratio of the alpha-concurrence to its rank-r maximum,
/// `(sum lambda_i^alpha - 1)/(r^(1-alpha) - 1)`; nonincreasing in alpha.
/// Undefined at rank 1 (both sides vanish).
pub fn normalized_alpha_concurrence(lambda: &SchmidtVector, alpha: Alpha) -> Result<f64> {
    let r = lambda.rank();
    if r < 2 {
        return Err(Error::domain(
            "the normalized alpha-concurrence needs Schmidt rank > 1",
        ));
    }
    Ok(alpha_concurrence_schmidt(lambda, alpha) / ((r as f64).powf(1.0 - alpha.value()) - 1.0))
}

/// Dimension at which the 1/2-concurrence prefactor of isotropic states
/// overtakes the concurrence prefactor: the root of
/// `(sqrt(d) - 1)/(d - 1) = sqrt(2/(d(d-1)))`, located by bisection on
/// `(2, 20]` to 1e-6.
pub fn concurrence_crossover_dimension() -> f64 {
    let gap = |d: f64| (d.sqrt() - 1.0) / (d - 1.0) - (2.0 / (d * (d - 1.0))).sqrt();
    let (mut lo, mut hi) = (2.0 + 1e-9, 20.0);
    debug_assert!(gap(lo) < 0.0 && gap(hi) > 0.0);
    while hi - lo > 1e-6 {
        let mid = 0.5 * (lo + hi);
        if gap(mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}
