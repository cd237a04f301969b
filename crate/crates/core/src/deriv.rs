//! Finite-difference differentiation oracle and the closed-form derivative
//! expansions of the decorated series in the shift parameters.
//!
//! Normalization throughout is `(-1)^r / r! · ∂^r`, matching the form in
//! which the derivative families are stated: under it the α-derivative of a
//! weak decorated series is the plain sum of the series with `{1}^{r_i}`
//! blocks inserted, and the β-derivative raises the β-exponents with
//! binomial weights.

use crate::error::Error;
use crate::index::{binomial, weak_compositions, Index};
use crate::report::{sum_results, RelationReport};
use crate::scalar::Real;
use crate::series::{
    eval_dp, spec_zr, spec_zstar_i, Decoration, EvalOptions, EvalResult, Link, ParamPoint,
    SeriesSpec,
};
use rug::ops::{CompleteRound, Pow};
use rug::Float;
use std::time::Instant;

/// Differentiation variable.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DerivVar {
    Alpha,
    Beta,
}

/// Finite-difference order budget; the stencils lose accuracy beyond this.
pub const FD_MAX_ORDER: u32 = 3;

/// Outcome of a finite-difference evaluation.
#[derive(Clone, Debug)]
pub struct FdResult {
    /// `(-1)^r / r!` times the `r`-th partial derivative.
    pub value: Real,
    /// Disagreement between the `h` and `h/2` stencils, same normalization.
    pub instability: Real,
    /// All constituent series evaluations converged.
    pub converged: bool,
}

fn shifted(params: &ParamPoint<Real>, which: DerivVar, delta: &Real) -> ParamPoint<Real> {
    let prec = delta.prec();
    let mut p = params.clone();
    match which {
        DerivVar::Alpha => p.alpha = (&params.alpha + delta).complete(prec),
        DerivVar::Beta => p.beta = (&params.beta + delta).complete(prec),
    }
    p
}

/// Central finite difference of order `r <= 3` with one Richardson step
/// (`h` and `h/2`), normalized by `(-1)^r / r!`.
pub fn fd_partial_ext(
    spec: &SeriesSpec,
    which: DerivVar,
    r: u32,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
    h: Option<&Real>,
) -> Result<FdResult, Error> {
    if r > FD_MAX_ORDER {
        return Err(Error::invalid(format!(
            "finite differences support r <= {FD_MAX_ORDER}, got {r}"
        )));
    }
    let prec = opts.precision;
    if r == 0 {
        let v = eval_dp(spec, params, opts)?;
        return Ok(FdResult {
            instability: v.err_estimate.clone(),
            converged: v.converged,
            value: v.value,
        });
    }

    let base = match which {
        DerivVar::Alpha => Float::with_val(prec, &params.alpha),
        DerivVar::Beta => Float::with_val(prec, &params.beta),
    };
    let h = match h {
        Some(h) => Float::with_val(prec, h),
        None => {
            // balance stencil truncation against series evaluation noise
            let eval_tol = Float::with_val(prec, opts.tol.max(1e-300));
            let hf = eval_tol.pow(Float::with_val(prec, 1.0 / (r as f64 + 2.0)));
            let floor = Float::with_val(prec, 1) >> (prec / 4);
            let h0 = hf.max(&floor).min(&Float::with_val(prec, 1e-2));
            h0 * base.clone().abs().max(&Float::with_val(prec, 1))
        }
    };
    if h <= 0 {
        return Err(Error::invalid("step h must be positive"));
    }
    // widest stencil point is 2h; require the shifted parameter positive
    let reach = Float::with_val(prec, if r >= 3 { 2 } else { 1 });
    if (base.clone() - reach * h.clone() * 2u32) <= 0 {
        return Err(Error::invalid(
            "parameter too close to the domain boundary for the stencil width",
        ));
    }

    let mut converged = true;
    let mut f = |delta: Real| -> Result<Real, Error> {
        let p = shifted(params, which, &delta);
        let ev = eval_dp(spec, &p, opts)?;
        converged &= ev.converged;
        Ok(ev.value)
    };
    let mut stencil = |h: &Real| -> Result<Real, Error> {
        Ok(match r {
            1 => {
                let fp = f(h.clone())?;
                let fm = f((-h).complete(prec))?;
                (fp - fm) / (h * 2u32).complete(prec)
            }
            2 => {
                let fp = f(h.clone())?;
                let f0 = f(Float::with_val(prec, 0))?;
                let fm = f((-h).complete(prec))?;
                (fp - f0.clone() * 2u32 + fm) / h.clone().square()
            }
            3 => {
                let f2p = f((h * 2u32).complete(prec))?;
                let fp = f(h.clone())?;
                let fm = f((-h).complete(prec))?;
                let f2m = f(-(h * 2u32).complete(prec))?;
                (f2p - fp * 2u32 + fm * 2u32 - f2m) / (h.clone().pow(3) * 2u32)
            }
            _ => unreachable!("guarded above"),
        })
    };

    let d_h = stencil(&h)?;
    let h2 = (&h / 2u32).complete(prec);
    let d_h2 = stencil(&h2)?;
    // both stencils are O(h^2); one Richardson step cancels that order
    let refined = (d_h2.clone() * 4u32 - &d_h) / 3u32;
    let norm = normalization(prec, r);
    Ok(FdResult {
        value: refined * &norm,
        instability: (d_h2 - d_h).abs() * norm.abs(),
        converged,
    })
}

/// `(-1)^r / r!`
fn normalization(prec: u32, r: u32) -> Real {
    let mut fact = Float::with_val(prec, 1);
    for j in 2..=r {
        fact *= j;
    }
    let sign = if r % 2 == 0 { 1 } else { -1 };
    Float::with_val(prec, sign) / fact
}

/// Normalized `r`-th partial derivative of a series value by central finite
/// differences; `h = None` picks a step balancing stencil truncation against
/// the series tolerance.
pub fn fd_partial(
    spec: &SeriesSpec,
    which: DerivVar,
    r: u32,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
    h: Option<&Real>,
) -> Result<Real, Error> {
    Ok(fd_partial_ext(spec, which, r, params, opts, h)?.value)
}

fn zero_result(prec: u32) -> EvalResult {
    EvalResult {
        value: Float::with_val(prec, 0),
        err_estimate: Float::with_val(prec, 0),
        m_final: 0,
        checkpoints: vec![],
        accelerated: false,
        converged: true,
    }
}

/// Closed-form α-derivative of the weak decorated series: the sum over
/// compositions `r_1 + … + r_{n-1} = r` of the series with `{1}^{r_i}`
/// inserted after position `i`. Depth 1 with `r >= 1` is identically zero
/// (no insertion slots; the decorations cancel).
pub fn expansion_alpha_star(
    index: &Index,
    r: u32,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
) -> Result<EvalResult, Error> {
    if !index.is_eval_admissible() {
        return Err(Error::invalid(format!(
            "index {index} needs last part >= 2"
        )));
    }
    let n = index.depth();
    if n == 1 && r >= 1 {
        return Ok(zero_result(opts.precision));
    }
    let mut terms = Vec::new();
    for comp in weak_compositions(r, n - 1) {
        let mut parts: Vec<u32> = Vec::with_capacity(n + r as usize);
        for (i, &k) in index.parts().iter().enumerate() {
            parts.push(k);
            if i + 1 < n {
                parts.extend(std::iter::repeat(1).take(comp[i] as usize));
            }
        }
        let spec = spec_zstar_i(&Index::new(parts)?)?;
        terms.push((1i64, eval_dp(&spec, params, opts)?));
    }
    Ok(sum_results(opts.precision, &terms))
}

fn is_plain_strict(spec: &SeriesSpec) -> bool {
    spec.param_arity == 2
        && spec.prefix == Decoration::Pochhammer
        && spec.suffix == Decoration::Pochhammer
        && spec.links.iter().all(|&l| l == Link::Strict)
        && spec.chain_len_total() == 0
}

/// Closed-form α-derivative of a strict decorated series: binomial-weighted
/// sum over compositions `r_1+…+r_{n-1} + s_1+…+s_n = r` of chain-inserted
/// series with the α-exponents raised by `s_i`.
pub fn expansion_alpha_general(
    spec: &SeriesSpec,
    r: u32,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
) -> Result<EvalResult, Error> {
    spec.validate()?;
    if !is_plain_strict(spec) {
        return Err(Error::invalid(
            "alpha expansion applies to strict decorated series without chains",
        ));
    }
    let n = spec.depth();
    let a_vec: Vec<i32> = spec.positions.iter().map(|p| p.a).collect();
    let b_vec: Vec<i32> = spec.positions.iter().map(|p| p.b).collect();
    let mut terms = Vec::new();
    for r_used in 0..=r {
        for r_vec in weak_compositions(r_used, n - 1) {
            for s_vec in weak_compositions(r - r_used, n) {
                let mut coef = 1i64;
                for i in 0..n {
                    coef *= binomial(a_vec[i] as i64 - 1 + s_vec[i] as i64, s_vec[i] as i64);
                }
                if coef == 0 {
                    continue;
                }
                let raised: Vec<i32> = a_vec
                    .iter()
                    .zip(&s_vec)
                    .map(|(&a, &s)| a + s as i32)
                    .collect();
                let term_spec = spec_zr(&r_vec, &raised, &b_vec)?;
                terms.push((coef, eval_dp(&term_spec, params, opts)?));
            }
        }
    }
    if terms.is_empty() {
        return Ok(zero_result(opts.precision));
    }
    Ok(sum_results(opts.precision, &terms))
}

/// Closed-form β-derivative of any two-parameter series: binomial-weighted
/// sum over compositions `r_1+…+r_n = r` of the series with `b_i` raised to
/// `b_i + r_i`. Positions with `b_i = 0` are skipped by the vanishing
/// binomial weight.
pub fn expansion_beta(
    spec: &SeriesSpec,
    r: u32,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
) -> Result<EvalResult, Error> {
    spec.validate()?;
    if spec.param_arity != 2 {
        return Err(Error::invalid(
            "beta expansion applies to two-parameter series",
        ));
    }
    let n = spec.depth();
    let mut terms = Vec::new();
    for s_vec in weak_compositions(r, n) {
        let mut coef = 1i64;
        for (p, &s) in spec.positions.iter().zip(&s_vec) {
            coef *= binomial(p.b as i64 - 1 + s as i64, s as i64);
        }
        if coef == 0 {
            continue;
        }
        let mut raised = spec.clone();
        for (p, &s) in raised.positions.iter_mut().zip(&s_vec) {
            p.b += s as i32;
        }
        terms.push((coef, eval_dp(&raised, params, opts)?));
    }
    if terms.is_empty() {
        return Ok(zero_result(opts.precision));
    }
    Ok(sum_results(opts.precision, &terms))
}

/// Which closed-form expansion a [`verify_expansion`] run checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExpansionKind {
    /// α-derivative of the weak decorated series via `{1}`-insertions.
    AlphaStar,
    /// α-derivative of a strict decorated series via chains and raised
    /// exponents.
    AlphaStrict,
    /// β-derivative via raised β-exponents.
    Beta,
}

impl ExpansionKind {
    pub fn id(self) -> &'static str {
        match self {
            ExpansionKind::AlphaStar => "eq10-star",
            ExpansionKind::AlphaStrict => "eq13-strict",
            ExpansionKind::Beta => "beta",
        }
    }
}

/// Target of an expansion check: an index (for the weak family) or a spec.
#[derive(Clone, Debug)]
pub enum ExpansionTarget {
    Index(Index),
    Spec(SeriesSpec),
}

/// Compare a closed-form expansion against the finite-difference oracle.
/// The report is inconclusive when the oracle is unstable at the requested
/// tolerance (estimated from the `h` vs `h/2` stencil disagreement).
pub fn verify_expansion(
    kind: ExpansionKind,
    target: &ExpansionTarget,
    r: u32,
    params: &ParamPoint<Real>,
    tol: f64,
    opts: &EvalOptions,
) -> Result<RelationReport, Error> {
    let started = Instant::now();
    let prec = opts.precision;
    let eval_opts = opts.with_tol(opts.tol.min(1e-12));

    let (spec, lhs, mut args): (SeriesSpec, EvalResult, Vec<(String, String)>) = match (kind, target)
    {
        (ExpansionKind::AlphaStar, ExpansionTarget::Index(ix)) => {
            let lhs = expansion_alpha_star(ix, r, params, &eval_opts)?;
            (
                spec_zstar_i(ix)?,
                lhs,
                vec![("index".into(), ix.to_string())],
            )
        }
        (ExpansionKind::AlphaStrict, ExpansionTarget::Spec(spec)) => {
            let lhs = expansion_alpha_general(spec, r, params, &eval_opts)?;
            (spec.clone(), lhs, vec![])
        }
        (ExpansionKind::Beta, ExpansionTarget::Spec(spec)) => {
            let lhs = expansion_beta(spec, r, params, &eval_opts)?;
            (spec.clone(), lhs, vec![])
        }
        _ => {
            return Err(Error::invalid(
                "expansion kind and target shape do not match",
            ))
        }
    };
    args.push(("kind".into(), kind.id().into()));
    args.push(("r".into(), r.to_string()));

    let which = match kind {
        ExpansionKind::Beta => DerivVar::Beta,
        _ => DerivVar::Alpha,
    };
    let fd = fd_partial_ext(&spec, which, r, params, &eval_opts, None)?;
    let scale = fd
        .value
        .clone()
        .abs()
        .max(&lhs.value.clone().abs())
        .max(&Float::with_val(prec, 1));
    let unstable = fd.instability.clone() > scale * Float::with_val(prec, tol) / 4u32;
    let rhs = EvalResult {
        value: fd.value,
        err_estimate: fd.instability,
        m_final: 0,
        checkpoints: vec![],
        accelerated: true,
        converged: fd.converged && !unstable,
    };
    Ok(RelationReport::build(
        format!("expansion-{}", kind.id()),
        args,
        params.clone(),
        lhs,
        rhs,
        tol,
        started.elapsed().as_secs_f64(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat_from_str, real_from_str, Rat, Scalar};
    use crate::series::spec_z_single;
    use rug::float::Constant;

    const PREC: u32 = 256;

    fn p2(a: &str, b: &str) -> ParamPoint<Real> {
        ParamPoint::two(
            real_from_str(a, PREC).unwrap(),
            real_from_str(b, PREC).unwrap(),
        )
    }

    fn ix(parts: &[u32]) -> Index {
        Index::new(parts.to_vec()).unwrap()
    }

    fn opts() -> EvalOptions {
        EvalOptions::default().with_tol(1e-12).with_m_max(1 << 18)
    }

    #[test]
    fn fd_order_zero_is_plain_eval() {
        let spec = spec_z_single(0, 2).unwrap();
        let params = p2("1", "1");
        let v = fd_partial(&spec, DerivVar::Alpha, 0, &params, &opts(), None).unwrap();
        let direct = eval_dp(&spec, &params, &opts()).unwrap();
        assert_eq!(v, direct.value);
    }

    #[test]
    fn fd_alpha_of_alpha_free_series_vanishes() {
        let spec = spec_z_single(0, 2).unwrap();
        let params = p2("1", "1");
        for r in 1..=2u32 {
            let v = fd_partial(&spec, DerivVar::Alpha, r, &params, &opts(), None).unwrap();
            assert!(v.clone().abs() < Float::with_val(PREC, 1e-10), "r={r} v={v}");
        }
    }

    #[test]
    fn fd_alpha_of_telescoping_single_matches_closed_form() {
        // normalized first alpha-derivative of sum 1/((m+a)(m+b)) at (1,2)
        // equals sum 1/((m+1)^2(m+2)) = pi^2/6 - 1
        let spec = spec_z_single(1, 1).unwrap();
        let params = p2("1", "2");
        let v = fd_partial(&spec, DerivVar::Alpha, 1, &params, &opts(), None).unwrap();
        let pi = Float::with_val(PREC, Constant::Pi);
        let want = pi.clone() * &pi / 6u32 - 1u32;
        let err = (v - want).abs();
        assert!(err < Float::with_val(PREC, 1e-12), "err = {err}");
    }

    #[test]
    fn fd_beta_of_telescoping_single_matches_closed_form() {
        // normalized first beta-derivative at (1,2): sum 1/((m+1)(m+2)^2) = 2 - pi^2/6
        let spec = spec_z_single(1, 1).unwrap();
        let params = p2("1", "2");
        let v = fd_partial(&spec, DerivVar::Beta, 1, &params, &opts(), None).unwrap();
        let pi = Float::with_val(PREC, Constant::Pi);
        let want = Float::with_val(PREC, 2) - pi.clone() * &pi / 6u32;
        let err = (v - want).abs();
        assert!(err < Float::with_val(PREC, 1e-12), "err = {err}");
    }

    #[test]
    fn fd_domain_margin_guard() {
        let spec = spec_z_single(1, 1).unwrap();
        let params = p2("1e-30", "2");
        assert!(fd_partial(&spec, DerivVar::Alpha, 1, &params, &opts(), None).is_err());
        assert!(fd_partial(&spec, DerivVar::Alpha, 4, &p2("1", "1"), &opts(), None).is_err());
    }

    #[test]
    fn star_expansion_depth_one_is_zero() {
        let params = p2("1.3", "0.9");
        let v = expansion_alpha_star(&ix(&[2]), 1, &params, &opts()).unwrap();
        assert!(v.value.is_zero());
        let fd = fd_partial(
            &spec_zstar_i(&ix(&[2])).unwrap(),
            DerivVar::Alpha,
            1,
            &params,
            &opts(),
            None,
        )
        .unwrap();
        assert!(fd.abs() < Float::with_val(PREC, 1e-10));
    }

    #[test]
    fn star_expansion_order_zero_is_base_series() {
        let params = p2("1", "1.5");
        let base = eval_dp(&spec_zstar_i(&ix(&[1, 2])).unwrap(), &params, &opts()).unwrap();
        let exp = expansion_alpha_star(&ix(&[1, 2]), 0, &params, &opts()).unwrap();
        assert_eq!(exp.value, base.value);
    }

    #[test]
    fn strict_expansion_alpha_free_first_position() {
        // depth-1 strict spec with a_1 = 0 has no alpha dependence
        let spec = crate::series::spec_z_i(&ix(&[2])).unwrap();
        let params = p2("1.2", "0.8");
        let v = expansion_alpha_general(&spec, 2, &params, &opts()).unwrap();
        assert!(v.value.is_zero());
    }

    #[test]
    fn expansions_match_fd_oracle() {
        let params = p2("1", "1");
        for r in 1..=2u32 {
            let rep = verify_expansion(
                ExpansionKind::AlphaStar,
                &ExpansionTarget::Index(ix(&[1, 2])),
                r,
                &params,
                1e-4,
                &opts(),
            )
            .unwrap();
            assert!(rep.pass, "star r={r}: rel={}", rep.rel_diff);
        }
        let spec = crate::series::spec_z_i(&ix(&[1, 2])).unwrap();
        let rep = verify_expansion(
            ExpansionKind::AlphaStrict,
            &ExpansionTarget::Spec(spec.clone()),
            1,
            &p2("1", "1.5"),
            1e-4,
            &opts(),
        )
        .unwrap();
        assert!(rep.pass, "strict rel={}", rep.rel_diff);
        let rep = verify_expansion(
            ExpansionKind::Beta,
            &ExpansionTarget::Spec(spec_zstar_i(&ix(&[1, 2])).unwrap()),
            1,
            &p2("0.9", "1.1"),
            1e-4,
            &opts(),
        )
        .unwrap();
        assert!(rep.pass, "beta rel={}", rep.rel_diff);
    }

    // ----- exact term-level check of the alpha-derivative product rule -----

    /// `g_p = Σ_{l=m_1}^{m_n-1} (α+l)^{-p} + Σ_{i=2}^{n} (m_i+α)^{-p}`
    fn g_p(alpha: &Rat, ms: &[u64], p: i32) -> Rat {
        let mut g = Rat::zero(());
        for l in ms[0]..ms[ms.len() - 1] {
            g = g.add(&alpha.add_i64(l as i64).powi(-p));
        }
        for &mi in &ms[1..] {
            g = g.add(&alpha.add_i64(mi as i64).powi(-p));
        }
        g
    }

    /// `F = (α)_{m_1}/(α)_{m_n} · Π_{i=2}^n 1/(m_i+α)`
    fn f_term(alpha: &Rat, ms: &[u64]) -> Rat {
        let mut f = Rat::one(());
        for l in ms[0]..ms[ms.len() - 1] {
            f = f.div(&alpha.add_i64(l as i64));
        }
        for &mi in &ms[1..] {
            f = f.div(&alpha.add_i64(mi as i64));
        }
        f
    }

    /// Weak chain sum `Σ_{lo <= l_1 <= … <= l_r <= hi} Π 1/(l_j+α)`, exact.
    fn chain_sum(alpha: &Rat, lo: u64, hi: u64, r: u32) -> Rat {
        if r == 0 {
            return Rat::one(());
        }
        // cum[v] = sum over chains of length d ending at value <= v
        let mut layer: Vec<Rat> = (lo..=hi)
            .map(|v| alpha.add_i64(v as i64).recip())
            .collect();
        for _ in 1..r {
            let mut cum = Rat::zero(());
            let mut next = Vec::with_capacity(layer.len());
            for (off, t) in layer.iter().enumerate() {
                cum = cum.add(t);
                let v = lo + off as u64;
                next.push(alpha.add_i64(v as i64).recip().mul(&cum));
            }
            layer = next;
        }
        let mut total = Rat::zero(());
        for t in &layer {
            total = total.add(t);
        }
        total
    }

    #[test]
    fn term_level_alpha_derivative_identity_is_exact() {
        // (-1)^r/r! d^r/dα^r F  ==  F · Σ_{|r_vec|=r} Π chain sums, exactly
        for alpha_s in ["1/2", "1", "3/2"] {
            let alpha = rat_from_str(alpha_s).unwrap();
            for n in 1..=3usize {
                let mut tuples: Vec<Vec<u64>> = vec![vec![]];
                for _ in 0..n {
                    tuples = tuples
                        .into_iter()
                        .flat_map(|t| {
                            let lo = *t.last().unwrap_or(&0);
                            (lo..=8).map(move |v| {
                                let mut t2 = t.clone();
                                t2.push(v);
                                t2
                            })
                        })
                        .collect();
                }
                for ms in &tuples {
                    let f = f_term(&alpha, ms);
                    let g1 = g_p(&alpha, ms, 1);
                    let g2 = g_p(&alpha, ms, 2);
                    for r in 0..=2u32 {
                        let lhs = match r {
                            0 => f.clone(),
                            1 => f.mul(&g1),
                            2 => f.mul(&g1.mul(&g1).add(&g2)).div(&Rat::from_i64((), 2)),
                            _ => unreachable!(),
                        };
                        let mut rhs = Rat::zero(());
                        for comp in weak_compositions(r, n - 1) {
                            let mut prod = Rat::one(());
                            for i in 0..n - 1 {
                                prod = prod.mul(&chain_sum(&alpha, ms[i], ms[i + 1], comp[i]));
                            }
                            rhs = rhs.add(&prod);
                        }
                        rhs = rhs.mul(&f);
                        assert_eq!(lhs, rhs, "alpha={alpha_s} ms={ms:?} r={r}");
                    }
                }
            }
        }
    }
}
