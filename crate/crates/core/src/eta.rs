//! Brute-force verification of the two-level Schmidt-ansatz minimizations
//! behind the isotropic and Werner closed forms, plus the majorization
//! utilities used by the Schur-concavity tests.
//!
//! The ansatz: a Schmidt vector with `n` copies of `gamma^2` and `m` copies
//! of `delta^2` (`gamma >= delta >= 0`) subject to
//! `n gamma^2 + m delta^2 = 1` and `n gamma + m delta = sqrt(Fd)`. The
//! candidate objective is `n gamma^(2 alpha) + m delta^(2 alpha) - 1`,
//! minimized over the parallelogram `1 <= n <= Fd`, `Fd <= n + m <= d`. The
//! continuous minimum sits at the (generally non-integer) vertex `n = Fd`,
//! `m = 0` where the objective equals `(Fd)^(1-alpha) - 1`; the integer grid
//! can only approach that value from above, reaching it when `Fd` is an
//! integer.

use crate::error::{Error, Result};
use crate::measures::Alpha;
use crate::states::SchmidtVector;

/// Tolerance for the integer-vertex coincidences `n = Fd` and `n + m = Fd`.
const VERTEX_TOL: f64 = 1e-9;

/// One feasible point of the two-level ansatz.
#[derive(Debug, Clone, Copy)]
pub struct EtaCandidate {
    /// Count of the larger squared coefficient `gamma^2`.
    pub n: usize,
    /// Count of the smaller squared coefficient `delta^2`.
    pub m: usize,
    pub gamma: f64,
    pub delta: f64,
    /// `n gamma^(2 alpha) + m delta^(2 alpha) - 1`; zero coefficients
    /// contribute nothing (`0^0 = 0` here, as in the trace power).
    pub value: f64,
}

/// Solves the two constraint equations for `(gamma, delta)` at integer
/// `(n, m)`. Returns `None` when the cell is infeasible: the roots are real
/// only for `Fd <= n + m`, and `delta >= 0` only for `Fd >= n`. For `m = 0`
/// the pair degenerates to `gamma = 1/sqrt(n)`, feasible only when
/// `n = Fd` within tolerance.
pub fn gamma_delta(n: usize, m: usize, fidelity: f64, d: usize) -> Result<Option<(f64, f64)>> {
    if d < 2 {
        return Err(Error::domain("the ansatz requires d >= 2"));
    }
    if n < 1 {
        return Err(Error::domain("the ansatz requires n >= 1"));
    }
    let fd = fidelity * d as f64;
    if fd <= 1.0 {
        return Err(Error::domain(format!(
            "the ansatz requires F > 1/d, got F = {fidelity}, d = {d}"
        )));
    }
    let (nf, mf) = (n as f64, m as f64);
    if m == 0 {
        if (fd - nf).abs() <= VERTEX_TOL {
            return Ok(Some((1.0 / nf.sqrt(), 0.0)));
        }
        return Ok(None);
    }
    if fd > nf + mf + VERTEX_TOL || fd < nf - VERTEX_TOL {
        return Ok(None);
    }
    let disc = (nf * mf * (nf + mf - fd)).max(0.0).sqrt();
    let root_fd = fd.sqrt();
    let gamma = (nf * root_fd + disc) / (nf * (nf + mf));
    let delta = ((mf * root_fd - disc) / (mf * (nf + mf))).max(0.0);
    Ok(Some((gamma, delta)))
}

fn candidate(n: usize, m: usize, fidelity: f64, d: usize, alpha: Alpha) -> Result<Option<EtaCandidate>> {
    let Some((gamma, delta)) = gamma_delta(n, m, fidelity, d)? else {
        return Ok(None);
    };
    let a2 = 2.0 * alpha.value();
    let pow0 = |x: f64| if x > 0.0 { x.powf(a2) } else { 0.0 };
    let value = n as f64 * pow0(gamma) + m as f64 * pow0(delta) - 1.0;
    Ok(Some(EtaCandidate {
        n,
        m,
        gamma,
        delta,
        value,
    }))
}

/// Outcome of the brute-force minimization.
#[derive(Debug, Clone)]
pub struct EtaReport {
    /// Overall minimum: integer-grid candidates plus the continuous vertex.
    pub value: f64,
    /// Best integer-grid candidate.
    pub grid_min: Option<EtaCandidate>,
    /// Objective at the continuous vertex `n = Fd, m = 0`; coincides with
    /// the closed form `(Fd)^(1-alpha) - 1`.
    pub vertex_value: f64,
}

/// Minimizes the two-level ansatz for an isotropic state over all integer
/// cells of the parallelogram and the continuous vertex. Requires
/// `F in (1/d, 1]`.
pub fn eta_isotropic_bruteforce(d: usize, fidelity: f64, alpha: Alpha) -> Result<EtaReport> {
    if d < 2 {
        return Err(Error::domain("eta requires d >= 2"));
    }
    let fd = fidelity * d as f64;
    if !(fidelity <= 1.0) || fd <= 1.0 {
        return Err(Error::domain(format!(
            "eta requires F in (1/d, 1], got F = {fidelity}, d = {d}"
        )));
    }
    let vertex_value = fd.powf(1.0 - alpha.value()) - 1.0;
    let n_max = ((fd + VERTEX_TOL).floor() as usize).min(d).max(1);
    let mut grid_min: Option<EtaCandidate> = None;
    for n in 1..=n_max {
        let m_lo = ((fd - n as f64 - VERTEX_TOL).ceil().max(0.0)) as usize;
        for m in m_lo..=(d - n) {
            if let Some(cand) = candidate(n, m, fidelity, d, alpha)? {
                let better = grid_min
                    .as_ref()
                    .map_or(true, |best| cand.value < best.value);
                if better {
                    grid_min = Some(cand);
                }
            }
        }
    }
    let value = grid_min
        .as_ref()
        .map_or(vertex_value, |c| c.value.min(vertex_value));
    Ok(EtaReport {
        value,
        grid_min,
        vertex_value,
    })
}

/// Same minimization for a Werner state: the reduction sets `d = 2` and
/// `F = W`. Requires `W in (1/2, 1]`.
pub fn eta_werner_bruteforce(weight: f64, alpha: Alpha) -> Result<EtaReport> {
    if !(0.5..=1.0).contains(&weight) || weight == 0.5 {
        return Err(Error::domain(format!(
            "eta requires W in (1/2, 1], got {weight}"
        )));
    }
    eta_isotropic_bruteforce(2, weight, alpha)
}

/// Closed form `(Fd)^(1-alpha) - 1` above the threshold, zero at or below.
pub fn eta_isotropic_closed(d: usize, fidelity: f64, alpha: Alpha) -> Result<f64> {
    if d < 2 {
        return Err(Error::domain("eta requires d >= 2"));
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::domain(format!(
            "fidelity must lie in [0, 1], got {fidelity}"
        )));
    }
    let fd = fidelity * d as f64;
    if fd <= 1.0 {
        return Ok(0.0);
    }
    Ok(fd.powf(1.0 - alpha.value()) - 1.0)
}

/// Closed form `(2W)^(1-alpha) - 1` above the threshold, zero at or below.
pub fn eta_werner_closed(weight: f64, alpha: Alpha) -> Result<f64> {
    if !(0.0..=1.0).contains(&weight) {
        return Err(Error::domain(format!(
            "Werner weight must lie in [0, 1], got {weight}"
        )));
    }
    if weight <= 0.5 {
        return Ok(0.0);
    }
    Ok((2.0 * weight).powf(1.0 - alpha.value()) - 1.0)
}

/// Largest Werner weight reachable by twirling a pure state with the given
/// Schmidt vector: `(sum_i sqrt(lambda_i))^2 / 2`.
pub fn werner_overlap_bound(lambda: &SchmidtVector) -> f64 {
    let s: f64 = lambda.lambdas().iter().map(|&l| l.sqrt()).sum();
    s * s / 2.0
}

/// Checks whether `x` is majorized by `y`: every prefix sum of the
/// nonincreasing `x` stays at or below the matching prefix of `y` (within
/// 1e-12), with the full sums equal. Shorter vectors are padded with zeros.
pub fn majorization_check(x: &SchmidtVector, y: &SchmidtVector) -> bool {
    let len = x.rank().max(y.rank());
    let at = |v: &SchmidtVector, i: usize| v.lambdas().get(i).copied().unwrap_or(0.0);
    let (mut px, mut py) = (0.0, 0.0);
    for i in 0..len {
        px += at(x, i);
        py += at(y, i);
        if i + 1 < len {
            if px > py + 1e-12 {
                return false;
            }
        } else if (px - py).abs() > 1e-9 {
            return false;
        }
    }
    true
}
