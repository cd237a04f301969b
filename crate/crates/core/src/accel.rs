//! Tail extrapolation of checkpointed partial sums.
//!
//! Partial sums of the nested series approach their limit with an algebraic
//! tail `S_∞ - S_M ≈ Σ_t c_t · M^{-e_t} · (log M)^{j}`. The exponents come in
//! ladders `base + p` (p = 0, 1, 2, …); Pochhammer decorations contribute a
//! second, `α`-shifted ladder next to the integer one. The extrapolator
//! solves for `S_∞` on exactly determined windows of trailing checkpoints,
//! growing the basis one function at a time, and scores each fit by its
//! disagreement with the neighbouring fits (one fewer basis function, and the
//! same basis on a one-older window). The best-scoring fit wins; its score is
//! the reported error estimate.

use crate::error::Error;
use crate::scalar::Real;
use rug::ops::Pow;
use rug::ops::CompleteRound;
use rug::Float;

/// Extrapolated limit of a checkpointed partial-sum sequence.
#[derive(Clone, Debug)]
pub struct Extrapolation {
    pub limit: Real,
    /// Residual-based estimate; honest, not a bound.
    pub err_estimate: Real,
    /// False when the fit disagreement exceeds the last tail increment.
    pub converged: bool,
}

/// Exponent ladder depth per family.
const LADDER: u32 = 7;
/// Hard cap on basis size.
const MAX_BASIS: usize = 14;

/// Candidate basis functions `M^{-e} (log M)^j` for the given family bases,
/// ordered by decay exponent ascending, log power descending. Exponents below
/// 1/16 are dropped; exact-to-rounding duplicates are merged (nearly
/// coincident families stay separate and are resolved by the solver, which
/// has precision to spare).
pub(crate) fn tail_candidates(bases: &[Real], log_degree: u32, prec: u32) -> Vec<(Real, u32)> {
    let mut exps: Vec<Real> = Vec::new();
    for base in bases {
        for p in 0..LADDER {
            exps.push(base.clone() + Float::with_val(prec, p));
        }
    }
    exps.retain(|e| *e > Float::with_val(prec, 1) / 16u32);
    exps.sort_by(|a, b| a.partial_cmp(b).expect("finite exponents"));
    let mut dedup: Vec<Real> = Vec::new();
    for e in exps {
        let close = dedup
            .last()
            .map(|d| (e.clone() - d).abs() < Float::with_val(prec, 1) >> (prec / 4))
            .unwrap_or(false);
        if !close {
            dedup.push(e);
        }
    }
    let mut cands = Vec::new();
    for e in &dedup {
        for j in (0..=log_degree).rev() {
            cands.push((e.clone(), j));
        }
    }
    cands.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .expect("finite exponents")
            .then(b.1.cmp(&a.1))
    });
    cands.truncate(MAX_BASIS);
    cands
}

/// Fit `S(M) = x_0 + Σ_t x_t φ_t(M)` on an exactly determined window and
/// return `x_0`. Columns are scaled to 1 at the last node. `None` on a
/// singular system.
fn fit_window(points: &[(u64, Real)], cands: &[(Real, u32)], prec: u32) -> Option<Real> {
    let k = cands.len();
    debug_assert_eq!(points.len(), k + 1);
    let (m_last, _) = points[points.len() - 1];
    let ln_last = Float::with_val(prec, m_last).ln();
    let scale: Vec<Real> = cands
        .iter()
        .map(|(e, j)| (-(e.clone() * &ln_last)).exp() * ln_last.clone().pow(*j))
        .collect();

    let mut a: Vec<Vec<Real>> = Vec::with_capacity(k + 1);
    let mut b: Vec<Real> = Vec::with_capacity(k + 1);
    for (m, s) in points {
        let lnm = Float::with_val(prec, *m).ln();
        let mut row = Vec::with_capacity(k + 1);
        row.push(Float::with_val(prec, 1));
        for (t, (e, j)) in cands.iter().enumerate() {
            let phi = (-(e.clone() * &lnm)).exp() * lnm.clone().pow(*j);
            row.push(phi / &scale[t]);
        }
        a.push(row);
        b.push(s.clone());
    }
    solve_gauss(a, b).map(|x| x[0].clone())
}

/// Gaussian elimination with partial pivoting.
fn solve_gauss(mut a: Vec<Vec<Real>>, mut b: Vec<Real>) -> Option<Vec<Real>> {
    let n = b.len();
    for col in 0..n {
        let mut piv = col;
        for row in col + 1..n {
            if a[row][col].clone().abs() > a[piv][col].clone().abs() {
                piv = row;
            }
        }
        if a[piv][col].is_zero() {
            return None;
        }
        a.swap(col, piv);
        b.swap(col, piv);
        for row in col + 1..n {
            let factor = (&a[row][col] / &a[col][col]).complete(a[row][col].prec());
            if factor.is_zero() {
                continue;
            }
            for j in col..n {
                let delta = (&factor * &a[col][j]).complete(factor.prec());
                a[row][j] -= delta;
            }
            let delta = (&factor * &b[col]).complete(factor.prec());
            b[row] -= delta;
        }
    }
    let prec = b[0].prec();
    let mut x = vec![Float::with_val(prec, 0); n];
    for col in (0..n).rev() {
        let mut acc = b[col].clone();
        for j in col + 1..n {
            acc -= (&a[col][j] * &x[j]).complete(prec);
        }
        x[col] = acc / &a[col][col];
    }
    Some(x)
}

/// Extrapolate with explicit family bases. Used by the evaluators, which know
/// the decoration structure and hence the exponent families of their tails.
pub(crate) fn extrapolate(
    checkpoints: &[(u64, Real)],
    bases: &[Real],
    log_degree: u32,
) -> Result<Extrapolation, Error> {
    let n = checkpoints.len();
    if n < 2 {
        return Err(Error::invalid(
            "extrapolation requires at least 2 checkpoints",
        ));
    }
    let prec = checkpoints[0].1.prec();
    let cands = tail_candidates(bases, log_degree, prec);
    let k_max = cands.len().min(n - 1).min(MAX_BASIS);

    let last = &checkpoints[n - 1].1;
    let last_inc = (last - &checkpoints[n - 2].1).complete(prec).abs();

    // k = 0 is the raw last checkpoint scored by the last increment.
    let mut best_limit = last.clone();
    let mut best_score = last_inc.clone();
    let mut prev_limit = last.clone();
    for k in 1..=k_max {
        let window = &checkpoints[n - k - 1..];
        let Some(limit) = fit_window(window, &cands[..k], prec) else {
            continue;
        };
        let mut score = (limit.clone() - &prev_limit).abs();
        if n >= k + 2 {
            let shifted = &checkpoints[n - k - 2..n - 1];
            if let Some(limit2) = fit_window(shifted, &cands[..k], prec) {
                let d = (limit.clone() - &limit2).abs();
                if d > score {
                    score = d;
                }
            }
        }
        if score < best_score {
            best_score = score.clone();
            best_limit = limit.clone();
        }
        prev_limit = limit;
    }

    let floor = best_limit.clone().abs() >> (prec.saturating_sub(16));
    let err_estimate = if best_score > floor {
        best_score
    } else {
        floor.clone()
    };
    let tolerance_ref = if last_inc > floor {
        last_inc
    } else {
        (&floor << 2u32).complete(prec)
    };
    let converged = err_estimate <= tolerance_ref;
    Ok(Extrapolation {
        limit: best_limit,
        err_estimate,
        converged,
    })
}

/// Extrapolate the limit of a partial-sum sequence whose tail behaves as
/// `M^{-θ} (c_0 + c_1 log M + … + c_d log^d M)`, with automatic higher-order
/// ladder terms `M^{-θ-p}`. Requires at least `log_degree + 2` checkpoints at
/// increasing `M` and `θ > 0`.
///
/// On an exactly matching model the result is exact up to rounding. The
/// returned estimate is the fit disagreement; `converged` is false when that
/// disagreement exceeds the last tail increment, in which case the limit is
/// still the best available value.
pub fn accelerate(
    checkpoints: &[(u64, Real)],
    theta: &Real,
    log_degree: u32,
) -> Result<Extrapolation, Error> {
    if !(theta.is_sign_positive() && !theta.is_zero()) {
        return Err(Error::invalid("tail exponent theta must be positive"));
    }
    if checkpoints.len() < log_degree as usize + 2 {
        return Err(Error::invalid(format!(
            "need at least log_degree + 2 = {} checkpoints, got {}",
            log_degree + 2,
            checkpoints.len()
        )));
    }
    if checkpoints.windows(2).any(|w| w[0].0 >= w[1].0) {
        return Err(Error::invalid("checkpoints must have increasing M"));
    }
    extrapolate(checkpoints, std::slice::from_ref(theta), log_degree)
}


#[cfg(test)]
mod tests {
    use super::*;
    use rug::float::Constant;

    const PREC: u32 = 256;

    fn ckpt(ms: &[u64], f: impl Fn(u64) -> Real) -> Vec<(u64, Real)> {
        ms.iter().map(|&m| (m, f(m))).collect()
    }

    fn doubling(from: u32, to: u32) -> Vec<u64> {
        (from..=to).map(|k| 1u64 << k).collect()
    }

    #[test]
    fn basel_partial_sums() {
        // S(M) = sum_{m<M} 1/(m+1)^2 -> pi^2/6
        let mut sums = Vec::new();
        let mut acc = Float::with_val(PREC, 0);
        let ms = doubling(10, 16);
        let mut next = 0usize;
        for m in 0..(1u64 << 16) {
            acc += Float::with_val(PREC, m + 1).pow(-2i32);
            if next < ms.len() && m + 1 == ms[next] {
                sums.push((m + 1, acc.clone()));
                next += 1;
            }
        }
        let theta = Float::with_val(PREC, 1);
        let ex = accelerate(&sums, &theta, 0).unwrap();
        let pi = Float::with_val(PREC, Constant::Pi);
        let basel = pi.clone() * &pi / 6u32;
        let err = (ex.limit.clone() - &basel).abs();
        assert!(err < Float::with_val(PREC, 1e-10), "err = {err}");
        assert!(ex.converged);
        assert!(ex.err_estimate >= err || err < Float::with_val(PREC, 1e-40));
    }

    #[test]
    fn telescoping_partial_sums() {
        // S(M) = sum_{m<M} 1/((m+1)(m+2)) = 1 - 1/(M+1)
        let ms = doubling(10, 16);
        let sums = ckpt(&ms, |m| {
            Float::with_val(PREC, 1) - Float::with_val(PREC, m + 1).recip()
        });
        let theta = Float::with_val(PREC, 1);
        let ex = accelerate(&sums, &theta, 0).unwrap();
        let err = (ex.limit.clone() - 1u32).abs();
        assert!(err < Float::with_val(PREC, 1e-12), "err = {err}");
        assert!(ex.converged);
    }

    #[test]
    fn exact_tail_model_is_recovered_to_rounding() {
        // S(M) = 7/3 - 5 M^{-3/2}
        let ms = doubling(6, 14);
        let limit = Float::with_val(PREC, 7) / 3u32;
        let sums = ckpt(&ms, |m| {
            limit.clone() - Float::with_val(PREC, m).pow(Float::with_val(PREC, -1.5)) * 5u32
        });
        let theta = Float::with_val(PREC, 1.5);
        let ex = accelerate(&sums, &theta, 0).unwrap();
        let err = (ex.limit.clone() - &limit).abs();
        assert!(err < Float::with_val(PREC, 1e-60), "err = {err}");
        assert!(ex.converged);
    }

    #[test]
    fn constant_checkpoints_degenerate_fit() {
        let ms = doubling(8, 13);
        let sums = ckpt(&ms, |_| Float::with_val(PREC, 42) / 13u32);
        let ex = accelerate(&sums, &Float::with_val(PREC, 1), 0).unwrap();
        assert_eq!(ex.limit, Float::with_val(PREC, 42) / 13u32);
        assert!(ex.err_estimate < Float::with_val(PREC, 1e-60));
        assert!(ex.converged);
    }

    #[test]
    fn logarithmic_decay_is_flagged() {
        // S(M) = 1 - 1/log M decays slower than any power; no algebraic
        // basis fits it and the fit disagreement stays at increment scale.
        let ms = doubling(6, 16);
        let sums = ckpt(&ms, |m| {
            Float::with_val(PREC, 1) - Float::with_val(PREC, m).ln().recip()
        });
        let ex = accelerate(&sums, &Float::with_val(PREC, 2), 0).unwrap();
        // no algebraic model fits; the estimate must stay coarse
        assert!(ex.err_estimate > Float::with_val(PREC, 1e-4));
        assert!((ex.limit - 1u32).abs() < Float::with_val(PREC, 0.5));
    }

    #[test]
    fn precondition_errors() {
        let ms = doubling(8, 9);
        let sums = ckpt(&ms, |m| Float::with_val(PREC, m));
        assert!(accelerate(&sums, &Float::with_val(PREC, 1), 2).is_err());
        assert!(accelerate(&sums, &Float::with_val(PREC, 0), 0).is_err());
        let unsorted = vec![
            (8u64, Float::with_val(PREC, 1)),
            (4u64, Float::with_val(PREC, 1)),
        ];
        assert!(accelerate(&unsorted, &Float::with_val(PREC, 1), 0).is_err());
    }

    #[test]
    fn two_family_basis_handles_mixed_exponents() {
        // S(M) = L - 3 M^{-0.8} - 2 M^{-1} - M^{-1.8}
        let ms = doubling(6, 16);
        let limit = Float::with_val(PREC, 11) / 7u32;
        let e1 = Float::with_val(PREC, -0.8);
        let sums = ckpt(&ms, |m| {
            let mf = Float::with_val(PREC, m);
            limit.clone()
                - mf.clone().pow(e1.clone()) * 3u32
                - mf.clone().pow(-1i32) * 2u32
                - mf.pow(Float::with_val(PREC, -1.8))
        });
        let bases = [Float::with_val(PREC, 0.8), Float::with_val(PREC, 1)];
        let ex = extrapolate(&sums, &bases, 0).unwrap();
        let err = (ex.limit.clone() - &limit).abs();
        assert!(err < Float::with_val(PREC, 1e-50), "err = {err}");
    }
}
