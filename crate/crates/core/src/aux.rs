//! The coupled auxiliary series behind the cyclic sum formulas, their
//! rotation-difference identity, and the Pochhammer inner-sum identity used
//! in its proof.
//!
//! The auxiliary series attach the prefix decoration to an extra variable
//! `m_0` below the chain and couple it to the top through a `1/(m_n - m_0)`
//! factor, which blocks the linear sweep; evaluation is a quadratic sweep
//! over `(m_0, m)` pairs, parallel over `m_0` with a deterministic
//! ascending-`m_0` reduction.

use crate::accel::extrapolate;
use crate::error::Error;
use crate::index::Index;
use crate::pochhammer::build_pochhammer;
use crate::report::{sum_results, RelationReport};
use crate::scalar::{Rat, Real, Scalar};
use crate::series::{
    checkpoint_schedule, eval_dp, spec_z_i, spec_z_ii, spec_z_single, spec_zstar_i, EvalOptions,
    EvalResult, ParamPoint,
};
use rayon::prelude::*;
use rug::ops::CompleteRound;
use rug::Float;
use std::time::Instant;

/// Description of one coupled auxiliary series: `star` selects weak ordering
/// with the `m_0 ≠ m_n` exclusion, otherwise strict ordering throughout.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CoupledSeriesSpec {
    pub index: Index,
    pub star: bool,
}

struct InnerState<S> {
    /// Cumulative per inner layer over values processed so far.
    cum: Vec<S>,
    /// Accumulated contribution of this `m_0` (without the prefix factor).
    contrib: S,
    /// Next value of the running variable to process.
    cursor: u64,
}

/// Truncated partial sums of the coupled series (all variables `< M`) at
/// each scheduled `M`. Exact in the rational backend. Cost `O(depth × M²)`.
pub fn t_partial_sums<S: Scalar>(
    spec: &CoupledSeriesSpec,
    params: &ParamPoint<S>,
    ctx: S::Ctx,
    schedule: &[u64],
) -> Result<Vec<(u64, S)>, Error> {
    if !spec.index.is_admissible() {
        return Err(Error::invalid(format!(
            "index {} is not admissible (needs some part >= 2)",
            spec.index
        )));
    }
    params.validate(2)?;
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("schedule must be strictly increasing"));
    }
    let m_max = *schedule.last().ok_or_else(|| Error::invalid("empty schedule"))? as usize;
    let star = spec.star;
    let parts = spec.index.parts();
    let n = parts.len();

    let tables = build_pochhammer::<S>(ctx, &params.alpha, m_max)?;
    let mut weights: Vec<Vec<S>> = Vec::with_capacity(n);
    for &k in parts {
        let mut col = Vec::with_capacity(m_max);
        for m in 0..m_max as i64 {
            let w = params
                .alpha
                .add_i64(m)
                .recip()
                .mul(&params.beta.add_i64(m).powi(-(k as i32 - 1)));
            col.push(w);
        }
        weights.push(col);
    }

    let mut states: Vec<InnerState<S>> = Vec::with_capacity(m_max);
    let mut out = Vec::with_capacity(schedule.len());
    for &m_ckpt in schedule {
        let m_ckpt_us = m_ckpt as usize;
        while states.len() < m_ckpt_us {
            let m0 = states.len() as u64;
            states.push(InnerState {
                cum: vec![S::zero(ctx); n],
                contrib: S::zero(ctx),
                cursor: if star { m0 } else { m0 + 1 },
            });
        }
        let weights_ref = &weights;
        let suffix = tables.suffix();
        states.par_iter_mut().enumerate().for_each(|(m0, st)| {
            let m0 = m0 as u64;
            let mut terms: Vec<S> = Vec::with_capacity(n);
            for m in st.cursor..m_ckpt {
                terms.clear();
                for i in 0..n {
                    let basis = if i == 0 {
                        S::one(ctx)
                    } else if star {
                        st.cum[i - 1].add(&terms[i - 1])
                    } else {
                        st.cum[i - 1].clone()
                    };
                    terms.push(weights_ref[i][m as usize].mul(&basis));
                }
                if m != m0 {
                    let coupling = S::from_i64(ctx, m as i64 - m0 as i64).recip();
                    let inc = terms[n - 1].mul(&suffix[m as usize]).mul(&coupling);
                    st.contrib = st.contrib.add(&inc);
                }
                for i in 0..n {
                    st.cum[i] = st.cum[i].add(&terms[i]);
                }
            }
            st.cursor = st.cursor.max(m_ckpt);
        });
        // deterministic reduction by ascending m_0
        let mut total = S::zero(ctx);
        let prefix = tables.prefix();
        for (m0, st) in states.iter().enumerate() {
            total = total.add(&prefix[m0].mul(&st.contrib));
        }
        out.push((m_ckpt, total));
    }
    Ok(out)
}

fn eval_coupled(
    spec: &CoupledSeriesSpec,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
) -> Result<EvalResult, Error> {
    let prec = opts.precision;
    let params = ParamPoint {
        alpha: Float::with_val(prec, &params.alpha),
        beta: Float::with_val(prec, &params.beta),
        gamma: None,
    };
    let schedule = checkpoint_schedule(opts.m_max);
    let checkpoints = t_partial_sums(spec, &params, prec, &schedule)?;

    // Tail families: integer base max(k_n - 1, 1) plus its alpha-shift; the
    // coupling adds one log layer on top of the chain's harmonic layers.
    let k_n = *spec.index.parts().last().expect("nonempty") as i64;
    let e0 = Float::with_val(prec, k_n.max(2) - 1);
    let shifted = e0.clone() + (&params.alpha - 1u32).complete(prec);
    let bases = [shifted, e0];
    let harmonic = spec.index.parts().iter().filter(|&&k| k == 1).count() as u32;
    let log_degree = (2 + harmonic).min(5);

    let ex = extrapolate(&checkpoints, &bases, log_degree)?;
    let n = checkpoints.len();
    let last_inc = if n >= 2 {
        (&checkpoints[n - 1].1 - &checkpoints[n - 2].1)
            .complete(prec)
            .abs()
    } else {
        Float::with_val(prec, 0)
    };
    let tol_quarter = Float::with_val(prec, opts.tol) / 4u32;
    let scale = ex.limit.clone().abs().max(&Float::with_val(prec, 1));
    let rel = ex.err_estimate.clone() / scale;
    let converged = ex.converged && rel < tol_quarter;
    let err_estimate = if converged {
        ex.err_estimate
    } else {
        ex.err_estimate.max(&last_inc)
    };
    Ok(EvalResult {
        value: ex.limit,
        err_estimate,
        m_final: checkpoints[n - 1].0,
        checkpoints,
        accelerated: true,
        converged,
    })
}

/// Evaluate the strictly ordered coupled series.
pub fn eval_t(
    index: &Index,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
) -> Result<EvalResult, Error> {
    eval_coupled(
        &CoupledSeriesSpec {
            index: index.clone(),
            star: false,
        },
        params,
        opts,
    )
}

/// Evaluate the weakly ordered coupled series with the `m_0 ≠ m_n` exclusion.
pub fn eval_tstar(
    index: &Index,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
) -> Result<EvalResult, Error> {
    eval_coupled(
        &CoupledSeriesSpec {
            index: index.clone(),
            star: true,
        },
        params,
        opts,
    )
}

/// Default ceiling for the quadratic-cost coupled evaluations.
pub const T_DEFAULT_M_MAX: u64 = 1 << 13;

/// Options for the coupled-series side of the rotation identity, derived
/// from the caller's options: quadratic cost caps the ceiling at 2^13 and
/// the per-evaluation tolerance at `tol/16`.
fn t_opts(opts: &EvalOptions, tol: f64) -> EvalOptions {
    EvalOptions {
        precision: opts.precision,
        m_max: opts.m_max.min(T_DEFAULT_M_MAX),
        tol: tol / 16.0,
    }
}

/// Verify the rotation-difference identity of the coupled series against its
/// closed right-hand side.
///
/// Left side: `T(index) - T(rotated index)` where the rotation moves the last
/// part to the front (star variant uses the weak coupled series). Right side:
/// for the star variant, `(k_n - 1) Z(n | k-n+1) + Z(n+1 | k-n)` minus the
/// weak decorated series over the `j`-ladder of the last part; for the strict
/// variant, the strict series with the rotated index bumped in its last part
/// minus the strict `j`-ladder.
pub fn verify_lemma1(
    index: &Index,
    params: &ParamPoint<Real>,
    star: bool,
    tol: f64,
    opts: &EvalOptions,
) -> Result<RelationReport, Error> {
    if !index.is_admissible() {
        return Err(Error::invalid(format!(
            "index {index} is not admissible (needs some part >= 2)"
        )));
    }
    params.validate(2)?;
    let started = Instant::now();
    let prec = opts.precision;
    let n = index.depth();
    let k = index.weight() as i64;
    let k_n = *index.parts().last().expect("nonempty") as i64;
    let rotated = index.cyclic_shift(n - 1).unwrap_or_else(|_| index.clone());

    let topts = t_opts(opts, tol);
    let eval_side = |ix: &Index| -> Result<EvalResult, Error> {
        if star {
            eval_tstar(ix, params, &topts)
        } else {
            eval_t(ix, params, &topts)
        }
    };
    let lhs = if rotated == *index {
        // the rotation fixes the index, so the difference is identically zero
        EvalResult {
            value: Float::with_val(prec, 0),
            err_estimate: Float::with_val(prec, 0),
            m_final: 0,
            checkpoints: vec![],
            accelerated: false,
            converged: true,
        }
    } else {
        let t_a = eval_side(index)?;
        let t_b = eval_side(&rotated)?;
        sum_results(prec, &[(1, t_a), (-1, t_b)])
    };

    let zopts = opts.with_tol((tol / 64.0).min(opts.tol));
    let mut rhs_terms: Vec<(i64, EvalResult)> = Vec::new();
    if star {
        if k_n > 1 {
            let z1 = eval_dp(&spec_z_single(n as i32, (k - n as i64 + 1) as i32)?, params, &zopts)?;
            rhs_terms.push((k_n - 1, z1));
        }
        let z2 = eval_dp(&spec_z_single(n as i32 + 1, (k - n as i64) as i32)?, params, &zopts)?;
        rhs_terms.push((1, z2));
    } else {
        let mut bumped: Vec<u32> = rotated.parts().to_vec();
        *bumped.last_mut().expect("nonempty") += 1;
        let z = eval_dp(&spec_z_ii(&Index::new(bumped)?)?, params, &zopts)?;
        rhs_terms.push((1, z));
    }
    for j in 0..(k_n - 1) {
        let mut parts: Vec<u32> = Vec::with_capacity(n + 1);
        parts.push(j as u32 + 1);
        parts.extend_from_slice(&index.parts()[..n - 1]);
        parts.push((k_n - j) as u32);
        let ladder = Index::new(parts)?;
        let spec = if star {
            spec_zstar_i(&ladder)?
        } else {
            spec_z_i(&ladder)?
        };
        rhs_terms.push((-1, eval_dp(&spec, params, &zopts)?));
    }
    let rhs = sum_results(prec, &rhs_terms);

    let id = if star { "lemma1-star" } else { "lemma1-strict" };
    Ok(RelationReport::build(
        id,
        vec![("index".into(), index.to_string())],
        params.clone(),
        lhs,
        rhs,
        tol,
        started.elapsed().as_secs_f64(),
    ))
}

/// Verify the Pochhammer inner-sum identity
/// `(α)_{m+1}/m! · Σ_{l≥n} l!/((α)_{l+1}(l-m)) = n!/(α)_n · Σ_{l=0}^{m} (α)_l/(l!(n-l))`
/// for `0 <= m < n` and rational `α > 0`. The right side is evaluated
/// exactly; the left side is truncated and extrapolated with tail exponent
/// `α`; returns agreement within `1e-8`.
pub fn verify_inner_sum_identity(m: u32, n: u32, alpha: &Rat) -> Result<bool, Error> {
    if m >= n {
        return Err(Error::invalid(format!(
            "inner-sum identity requires 0 <= m < n, got m={m}, n={n}"
        )));
    }
    if !alpha.is_positive() {
        return Err(Error::domain("alpha must be > 0"));
    }
    let prec = crate::scalar::DEFAULT_PRECISION;

    // exact right side
    let tables = build_pochhammer::<Rat>((), alpha, m as usize + 1)?;
    let mut rhs = Rat::zero(());
    for l in 0..=m {
        // (α)_l / l! · 1/(n - l)
        let term = tables.prefix()[l as usize].mul(&Rat::from_i64((), (n - l) as i64).recip());
        rhs = rhs.add(&term);
    }
    // n! / (α)_n  =  suffix at n
    let tables_n = build_pochhammer::<Rat>((), alpha, n as usize)?;
    rhs = rhs.mul(&tables_n.suffix()[n as usize]);

    // truncated + extrapolated left side
    let alpha_f = Float::with_val(prec, alpha);
    let schedule = checkpoint_schedule(1 << 13);
    let mut checkpoints = Vec::with_capacity(schedule.len());
    let mut acc = Float::with_val(prec, 0);
    let mut suf = Float::with_val(prec, 1); // l!/(α)_l
    let mut next = 0usize;
    let m_max = 1u64 << 13;
    for l in 0..m_max {
        if l >= n as u64 {
            let denom = (alpha_f.clone() + l) * Float::with_val(prec, l - m as u64);
            acc += suf.clone() / denom;
        }
        let step = Float::with_val(prec, l + 1) / (alpha_f.clone() + l);
        suf *= step;
        if next < schedule.len() && l + 1 == schedule[next] {
            checkpoints.push((l + 1, acc.clone()));
            next += 1;
        }
    }
    let ex = extrapolate(&checkpoints, &[alpha_f.clone()], 1)?;
    let poch_m1 = {
        let t = build_pochhammer::<Rat>((), alpha, m as usize + 1)?;
        // (α)_{m+1}/m! = prefix[m+1] · (m+1)
        t.prefix()[m as usize + 1].mul_i64(m as i64 + 1)
    };
    let lhs = ex.limit * Float::with_val(prec, &poch_m1);

    let rhs_f = Float::with_val(prec, &rhs);
    let scale = rhs_f.clone().abs().max(&Float::with_val(prec, 1));
    let diff = (lhs - &rhs_f).abs() / scale;
    Ok(diff <= Float::with_val(prec, 1e-8))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat_from_str;

    fn ix(parts: &[u32]) -> Index {
        Index::new(parts.to_vec()).unwrap()
    }

    fn params11() -> ParamPoint<Real> {
        ParamPoint::two(Float::with_val(256, 1), Float::with_val(256, 1))
    }

    /// Literal nested-loop coupled sum (all variables < m_limit).
    fn t_naive(spec: &CoupledSeriesSpec, params: &ParamPoint<Rat>, m_limit: u64) -> Rat {
        let parts = spec.index.parts();
        let n = parts.len();
        let tables = build_pochhammer::<Rat>((), &params.alpha, m_limit as usize).unwrap();
        let w = |i: usize, v: u64| -> Rat {
            params
                .alpha
                .add_i64(v as i64)
                .recip()
                .mul(&params.beta.add_i64(v as i64).powi(-(parts[i] as i32 - 1)))
        };
        let mut total = Rat::zero(());
        let mut stack: Vec<u64> = vec![0; n + 1];
        fn rec(
            level: usize,
            n: usize,
            m_limit: u64,
            star: bool,
            stack: &mut Vec<u64>,
            w: &impl Fn(usize, u64) -> Rat,
            tables: &crate::pochhammer::PochhammerTables<Rat>,
            total: &mut Rat,
        ) {
            if level == n + 1 {
                let m0 = stack[0];
                let mn = stack[n];
                if m0 == mn {
                    return;
                }
                let mut term = tables.prefix()[m0 as usize]
                    .mul(&tables.suffix()[mn as usize])
                    .mul(&Rat::from_i64((), mn as i64 - m0 as i64).recip());
                for i in 1..=n {
                    term = term.mul(&w(i - 1, stack[i]));
                }
                *total = total.add(&term);
                return;
            }
            let lo = if level == 0 {
                0
            } else if star {
                stack[level - 1]
            } else {
                stack[level - 1] + 1
            };
            for v in lo..m_limit {
                stack[level] = v;
                rec(level + 1, n, m_limit, star, stack, w, tables, total);
            }
        }
        rec(0, n, m_limit, spec.star, &mut stack, &w, &tables, &mut total);
        total
    }

    #[test]
    fn coupled_truncations_match_brute_force_exactly() {
        let params = ParamPoint::two(rat_from_str("1/2").unwrap(), rat_from_str("3/2").unwrap());
        for star in [false, true] {
            for parts in [vec![2], vec![1, 2], vec![2, 1], vec![2, 2]] {
                let spec = CoupledSeriesSpec {
                    index: ix(&parts),
                    star,
                };
                let sums = t_partial_sums(&spec, &params, (), &[8, 16, 24]).unwrap();
                for (m, got) in sums {
                    let want = t_naive(&spec, &params, m);
                    assert_eq!(got, want, "star={star} parts={parts:?} m={m}");
                }
            }
        }
    }

    #[test]
    fn depth_one_strict_and_star_agree() {
        // For n = 1 both orderings describe the same summand set.
        let params = ParamPoint::two(rat_from_str("1").unwrap(), rat_from_str("1").unwrap());
        for star in [false, true] {
            let spec = CoupledSeriesSpec {
                index: ix(&[2]),
                star,
            };
            let sums = t_partial_sums(&spec, &params, (), &[32]).unwrap();
            let other = t_partial_sums(
                &CoupledSeriesSpec {
                    index: ix(&[2]),
                    star: !star,
                },
                &params,
                (),
                &[32],
            )
            .unwrap();
            assert_eq!(sums, other);
        }
    }

    #[test]
    fn rotation_telescoping_sums_to_zero() {
        // sum over all rotations of [T(rot_i) - T(rot_{i+1})] telescopes
        let params = params11();
        let opts = EvalOptions::default().with_m_max(1 << 10).with_tol(1e-4);
        let x = ix(&[1, 2]);
        let n = x.depth();
        let mut acc = Float::with_val(256, 0);
        for i in 1..=n {
            let a = x.cyclic_shift(i).unwrap();
            let b = a.cyclic_shift(n - 1).unwrap();
            let va = eval_t(&a, &params, &opts).unwrap();
            let vb = eval_t(&b, &params, &opts).unwrap();
            acc += va.value - vb.value;
        }
        let mag = acc.clone().abs();
        assert!(mag < Float::with_val(256, 1e-20), "telescope = {acc}");
    }

    #[test]
    fn lemma1_depth_one_is_trivial() {
        // index (2): rotation is the identity, so both sides must vanish
        let params = params11();
        let opts = EvalOptions::default();
        let rep = verify_lemma1(&ix(&[2]), &params, true, 1e-4, &opts).unwrap();
        assert!(rep.pass, "rel_diff = {}", rep.rel_diff);
        assert!(rep.lhs.value.is_zero());
    }

    #[test]
    fn lemma1_star_and_strict_examples() {
        let params = params11();
        let opts = EvalOptions::default().with_m_max(1 << 12);
        for star in [true, false] {
            let rep = verify_lemma1(&ix(&[1, 2]), &params, star, 1e-4, &opts).unwrap();
            assert!(
                rep.pass,
                "star={star} rel_diff={} lhs={} rhs={}",
                rep.rel_diff,
                rep.lhs.value,
                rep.rhs.value
            );
        }
    }

    #[test]
    fn lemma1_rejects_inadmissible() {
        let params = params11();
        let opts = EvalOptions::default();
        assert!(verify_lemma1(&ix(&[1, 1]), &params, true, 1e-4, &opts).is_err());
    }

    #[test]
    fn inner_sum_identity_small_cases() {
        for (m, n) in [(0u32, 1u32), (0, 2), (1, 2)] {
            for a in ["1/2", "1", "3/2"] {
                let alpha = rat_from_str(a).unwrap();
                assert!(
                    verify_inner_sum_identity(m, n, &alpha).unwrap(),
                    "m={m} n={n} alpha={a}"
                );
            }
        }
        assert!(verify_inner_sum_identity(2, 2, &rat_from_str("1").unwrap()).is_err());
    }
}
