//! The generic nested-series evaluator.
//!
//! Every series in the laboratory is a chain of summation variables with
//! strict (`<`) or weak (`<=`) links, per-position weights
//! `1/((m+α)^a (m+β)^b (m+γ)^c)`, optional weakly-ordered auxiliary chains of
//! weight `1/(m+α)` inserted between positions, and optional Pochhammer
//! boundary decorations. [`eval_dp`] computes any such series by an
//! `O((depth + Σ chain) × M)` forward sweep with checkpointing and tail
//! extrapolation; [`eval_naive`] is the literal nested-loop oracle for small
//! truncations.

use crate::accel::extrapolate;
use crate::error::Error;
use crate::index::Index;
use crate::scalar::{Real, Scalar};
use rug::ops::CompleteRound;
use rug::Float;
use serde::{Deserialize, Serialize};

/// Ordering constraint between consecutive summation variables.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Link {
    Strict,
    Weak,
}

/// One main summation variable: weight `1/((m+α)^a (m+β)^b (m+γ)^c)`.
/// `c` participates only in 3-parameter mode.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Position {
    pub a: i32,
    pub b: i32,
    #[serde(default, skip_serializing_if = "is_zero_i32")]
    pub c: i32,
}

fn is_zero_i32(v: &i32) -> bool {
    *v == 0
}

impl Position {
    pub fn two(a: i32, b: i32) -> Self {
        Position { a, b, c: 0 }
    }
    pub fn three(a: i32, b: i32, c: i32) -> Self {
        Position { a, b, c }
    }
    fn exponent_sum(&self) -> i64 {
        self.a as i64 + self.b as i64 + self.c as i64
    }
}

/// Auxiliary chain inserted in the gap after a position: `len` variables of
/// weight `1/(m+α)`, weakly ordered among themselves and after the previous
/// position; `final_link` joins the last chain variable to the next position.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Chain {
    pub len: u32,
    pub final_link: Link,
}

impl Chain {
    pub const NONE: Chain = Chain {
        len: 0,
        final_link: Link::Strict,
    };
}

impl Default for Chain {
    fn default() -> Self {
        Chain::NONE
    }
}

/// Boundary decoration carried by the first (prefix) and last (suffix)
/// summation variable.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Decoration {
    #[default]
    None,
    /// `(α)_m / m!` on the first variable, `m! / (α)_m` on the last.
    Pochhammer,
    /// Additionally `(β)_m / (γ)_m` on the first, `(γ)_m / (β)_m` on the last.
    Pochhammer3,
}

/// Language-neutral description of one nested series.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSpec {
    pub positions: Vec<Position>,
    /// Per-gap links; used directly when the gap has no chain.
    pub links: Vec<Link>,
    /// Per-gap chains; an empty vector means no chains anywhere.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub chains: Vec<Chain>,
    #[serde(default)]
    pub prefix: Decoration,
    #[serde(default)]
    pub suffix: Decoration,
    pub param_arity: u8,
}

impl SeriesSpec {
    pub fn depth(&self) -> usize {
        self.positions.len()
    }

    pub fn chain_len_total(&self) -> u64 {
        self.chains.iter().map(|c| c.len as u64).sum()
    }

    pub fn total_vars(&self) -> u64 {
        self.depth() as u64 + self.chain_len_total()
    }

    /// Shape rules and the convergence guard: interior exponent sums >= 1,
    /// final exponent sum >= 2.
    pub fn validate(&self) -> Result<(), Error> {
        let n = self.depth();
        if n == 0 {
            return Err(Error::spec("series needs at least one position"));
        }
        if self.links.len() != n - 1 {
            return Err(Error::spec(format!(
                "expected {} links for depth {n}, got {}",
                n - 1,
                self.links.len()
            )));
        }
        if !self.chains.is_empty() && self.chains.len() != n - 1 {
            return Err(Error::spec(format!(
                "expected 0 or {} chains for depth {n}, got {}",
                n - 1,
                self.chains.len()
            )));
        }
        if self.param_arity != 2 && self.param_arity != 3 {
            return Err(Error::spec("param_arity must be 2 or 3"));
        }
        if self.param_arity == 2 {
            if self.positions.iter().any(|p| p.c != 0) {
                return Err(Error::spec("gamma exponents require param_arity 3"));
            }
            if self.prefix == Decoration::Pochhammer3 || self.suffix == Decoration::Pochhammer3 {
                return Err(Error::spec("pochhammer3 decoration requires param_arity 3"));
            }
        }
        for (i, p) in self.positions.iter().enumerate() {
            let s = p.exponent_sum();
            if i + 1 < n && s < 1 {
                return Err(Error::spec(format!(
                    "interior position {i} has exponent sum {s} < 1"
                )));
            }
            if i + 1 == n && s < 2 {
                return Err(Error::spec(format!(
                    "final position has exponent sum {s} < 2"
                )));
            }
        }
        Ok(())
    }
}

/// Real parameter values `(α, β)` or `(α, β, γ)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamPoint<S> {
    pub alpha: S,
    pub beta: S,
    pub gamma: Option<S>,
}

impl<S: Scalar> ParamPoint<S> {
    pub fn two(alpha: S, beta: S) -> Self {
        ParamPoint {
            alpha,
            beta,
            gamma: None,
        }
    }

    pub fn three(alpha: S, beta: S, gamma: S) -> Self {
        ParamPoint {
            alpha,
            beta,
            gamma: Some(gamma),
        }
    }

    /// Swap α and β (the two-parameter symmetry move).
    pub fn swapped(&self) -> Self {
        ParamPoint {
            alpha: self.beta.clone(),
            beta: self.alpha.clone(),
            gamma: self.gamma.clone(),
        }
    }

    /// Domain check: all parameters positive; in 3-parameter mode
    /// additionally `α + β - γ > 0`.
    pub fn validate(&self, arity: u8) -> Result<(), Error> {
        if !self.alpha.is_positive() {
            return Err(Error::domain("alpha must be > 0"));
        }
        if !self.beta.is_positive() {
            return Err(Error::domain("beta must be > 0"));
        }
        if arity == 3 {
            let Some(gamma) = &self.gamma else {
                return Err(Error::domain("3-parameter series needs gamma"));
            };
            if !gamma.is_positive() {
                return Err(Error::domain("gamma must be > 0"));
            }
            if !self.alpha.add(&self.beta).sub(gamma).is_positive() {
                return Err(Error::domain("3-parameter domain needs alpha + beta - gamma > 0"));
            }
        }
        Ok(())
    }
}

/// Evaluation policy for [`eval_dp`].
#[derive(Clone, Copy, Debug)]
pub struct EvalOptions {
    /// Working precision in bits.
    pub precision: u32,
    /// Truncation ceiling; checkpoints double from 64 up to here.
    pub m_max: u64,
    /// Relative tolerance target; the sweep stops once the extrapolation
    /// residual drops below `tol/4`.
    pub tol: f64,
}

impl Default for EvalOptions {
    fn default() -> Self {
        EvalOptions {
            precision: crate::scalar::DEFAULT_PRECISION,
            m_max: 1 << 20,
            tol: 1e-12,
        }
    }
}

impl EvalOptions {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
    pub fn with_m_max(mut self, m_max: u64) -> Self {
        self.m_max = m_max;
        self
    }
    pub fn with_precision(mut self, precision: u32) -> Self {
        self.precision = precision;
        self
    }
}

/// Outcome of one series evaluation.
#[derive(Clone, Debug)]
pub struct EvalResult {
    pub value: Real,
    /// Extrapolation residual; honest estimate, not a bound.
    pub err_estimate: Real,
    /// Largest truncation reached.
    pub m_final: u64,
    /// Partial sums at the geometric checkpoints.
    pub checkpoints: Vec<(u64, Real)>,
    pub accelerated: bool,
    pub converged: bool,
}

// ---------------------------------------------------------------------------
// compiled layer sequence and the streaming sweep
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug)]
enum LayerKind {
    Pos(usize),
    Chain,
}

#[derive(Clone, Copy, Debug)]
struct Layer {
    kind: LayerKind,
    /// Link from the previous layer; `None` for the first.
    link: Option<Link>,
}

fn compile_layers(spec: &SeriesSpec) -> Vec<Layer> {
    let n = spec.depth();
    let mut layers = Vec::with_capacity(spec.total_vars() as usize);
    layers.push(Layer {
        kind: LayerKind::Pos(0),
        link: None,
    });
    for g in 0..n - 1 {
        let chain = spec.chains.get(g).copied().unwrap_or(Chain::NONE);
        if chain.len == 0 {
            layers.push(Layer {
                kind: LayerKind::Pos(g + 1),
                link: Some(spec.links[g]),
            });
        } else {
            for _ in 0..chain.len {
                layers.push(Layer {
                    kind: LayerKind::Chain,
                    link: Some(Link::Weak),
                });
            }
            layers.push(Layer {
                kind: LayerKind::Pos(g + 1),
                link: Some(chain.final_link),
            });
        }
    }
    layers
}

pub(crate) struct Sweep<'a, S: Scalar> {
    spec: &'a SeriesSpec,
    layers: Vec<Layer>,
    ctx: S::Ctx,
    m: u64,
    m_alpha: S,
    m_beta: S,
    m_gamma: Option<S>,
    pre: S,
    suf: S,
    cum: Vec<S>,
    total: S,
}

impl<'a, S: Scalar> Sweep<'a, S> {
    pub(crate) fn new(
        spec: &'a SeriesSpec,
        params: &ParamPoint<S>,
        ctx: S::Ctx,
    ) -> Result<Self, Error> {
        spec.validate()?;
        params.validate(spec.param_arity)?;
        let layers = compile_layers(spec);
        let cum = vec![S::zero(ctx); layers.len()];
        Ok(Sweep {
            spec,
            layers,
            ctx,
            m: 0,
            m_alpha: params.alpha.clone(),
            m_beta: params.beta.clone(),
            m_gamma: params.gamma.clone(),
            pre: S::one(ctx),
            suf: S::one(ctx),
            cum,
            total: S::zero(ctx),
        })
    }

    fn weight(&self, kind: LayerKind) -> S {
        match kind {
            LayerKind::Chain => self.m_alpha.recip(),
            LayerKind::Pos(i) => {
                let p = &self.spec.positions[i];
                let mut w = S::one(self.ctx);
                if p.a != 0 {
                    w = w.mul(&self.m_alpha.powi(-p.a));
                }
                if p.b != 0 {
                    w = w.mul(&self.m_beta.powi(-p.b));
                }
                if p.c != 0 {
                    let mg = self.m_gamma.as_ref().expect("validated arity");
                    w = w.mul(&mg.powi(-p.c));
                }
                w
            }
        }
    }

    /// Process the current `m` and advance the decoration recurrences.
    fn step(&mut self) {
        let len = self.layers.len();
        let mut terms: Vec<S> = Vec::with_capacity(len);
        for (t, layer) in self.layers.iter().enumerate() {
            let w = self.weight(layer.kind);
            let basis = match layer.link {
                None => match self.spec.prefix {
                    Decoration::None => S::one(self.ctx),
                    _ => self.pre.clone(),
                },
                Some(Link::Strict) => self.cum[t - 1].clone(),
                Some(Link::Weak) => self.cum[t - 1].add(&terms[t - 1]),
            };
            terms.push(w.mul(&basis));
        }
        let tail = match self.spec.suffix {
            Decoration::None => terms[len - 1].clone(),
            _ => terms[len - 1].mul(&self.suf),
        };
        self.total = self.total.add(&tail);
        for (t, term) in terms.into_iter().enumerate() {
            self.cum[t] = self.cum[t].add(&term);
        }

        // advance m -> m+1 in the shifted parameters and decorations
        let m = self.m as i64;
        let pre_factor = |deco: Decoration, sweep: &Self| -> Option<S> {
            match deco {
                Decoration::None => None,
                Decoration::Pochhammer => {
                    Some(sweep.m_alpha.div(&S::from_i64(sweep.ctx, m + 1)))
                }
                Decoration::Pochhammer3 => {
                    let f = sweep.m_alpha.div(&S::from_i64(sweep.ctx, m + 1));
                    let g = sweep
                        .m_beta
                        .div(sweep.m_gamma.as_ref().expect("validated arity"));
                    Some(f.mul(&g))
                }
            }
        };
        if let Some(f) = pre_factor(self.spec.prefix, self) {
            self.pre = self.pre.mul(&f);
        }
        if let Some(f) = pre_factor(self.spec.suffix, self) {
            self.suf = self.suf.div(&f);
        }
        self.m_alpha = self.m_alpha.add_i64(1);
        self.m_beta = self.m_beta.add_i64(1);
        if let Some(mg) = &self.m_gamma {
            self.m_gamma = Some(mg.add_i64(1));
        }
        self.m += 1;
    }

    fn advance_to(&mut self, m_target: u64) {
        while self.m < m_target {
            self.step();
        }
    }

    fn total(&self) -> &S {
        &self.total
    }
}

/// Truncated partial sums of the series (all variables `< M`) at each
/// requested `M`, exactly in the scalar backend. The schedule must be
/// strictly increasing.
pub fn partial_sums<S: Scalar>(
    spec: &SeriesSpec,
    params: &ParamPoint<S>,
    ctx: S::Ctx,
    schedule: &[u64],
) -> Result<Vec<(u64, S)>, Error> {
    if schedule.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::invalid("schedule must be strictly increasing"));
    }
    let mut sweep = Sweep::new(spec, params, ctx)?;
    let mut out = Vec::with_capacity(schedule.len());
    for &m in schedule {
        sweep.advance_to(m);
        out.push((m, sweep.total().clone()));
    }
    Ok(out)
}

/// Geometric checkpoint schedule with two checkpoints per octave
/// (16, 24, 32, 48, 64, 96, …) up to `m_max`. Keeping the fit windows dense
/// at large M stops the extrapolation from reaching back into small-M
/// checkpoints whose unmodeled tail error would contaminate the solve.
pub(crate) fn checkpoint_schedule(m_max: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut m = 16u64;
    let mut half_step = false;
    while m < m_max {
        out.push(m);
        if half_step {
            m = m / 3 * 4;
        } else {
            m = m / 2 * 3;
        }
        half_step = !half_step;
    }
    out.push(m_max);
    out
}

/// Tail exponent family bases and log degree for a spec at given parameters.
///
/// The outermost position with exponent sum `s` and a decorated suffix gives
/// the leading family base `s - 1 + δ` (δ = α-1, or α+β-γ-1 in 3-parameter
/// mode); decorations additionally produce the integer-shift family `s - 1`.
/// The log degree grows with the number of harmonic-type interior layers.
pub(crate) fn tail_model(spec: &SeriesSpec, params: &ParamPoint<Real>, prec: u32) -> (Vec<Real>, u32) {
    let s_out = spec
        .positions
        .last()
        .expect("validated depth")
        .exponent_sum();
    let tau = Float::with_val(prec, s_out - 1);
    let delta = match spec.suffix {
        Decoration::None => Float::with_val(prec, 0),
        Decoration::Pochhammer => (&params.alpha - 1u32).complete(prec),
        Decoration::Pochhammer3 => {
            let g = params.gamma.as_ref().expect("validated arity");
            (&params.alpha - 1u32).complete(prec) + (&params.beta - g).complete(prec)
        }
    };
    let theta = tau.clone() + delta;
    let bases = if spec.suffix == Decoration::None {
        vec![tau]
    } else {
        vec![theta, tau]
    };
    let harmonic = spec
        .positions
        .iter()
        .take(spec.depth() - 1)
        .filter(|p| p.exponent_sum() <= 1)
        .count() as u64
        + spec.chain_len_total();
    let log_degree = harmonic.min(5) as u32;
    (bases, log_degree)
}

/// Truncation level from which early stopping may trigger.
const STOP_MIN_M: u64 = 1024;

/// Evaluate a series by the checkpointed forward sweep with tail
/// extrapolation. Work is `O((depth + Σ chain) × M_final)`.
///
/// The sweep doubles the truncation from 64 up to `opts.m_max`, extrapolating
/// at every checkpoint from 2^10 on, and stops early once the extrapolation
/// residual is below `opts.tol / 4` relative to `max(|value|, 1)`. If the
/// ceiling is reached without that, the result carries `converged = false`
/// and the error estimate is at least the last tail increment.
pub fn eval_dp(
    spec: &SeriesSpec,
    params: &ParamPoint<Real>,
    opts: &EvalOptions,
) -> Result<EvalResult, Error> {
    let prec = opts.precision;
    let params = reround(params, prec);
    let mut sweep = Sweep::new(spec, &params, prec)?;
    let (bases, log_degree) = tail_model(spec, &params, prec);
    let schedule = checkpoint_schedule(opts.m_max);
    let tol_quarter = Float::with_val(prec, opts.tol) / 4u32;

    let mut checkpoints: Vec<(u64, Real)> = Vec::with_capacity(schedule.len());
    for &m in &schedule {
        sweep.advance_to(m);
        checkpoints.push((m, sweep.total().clone()));
        if m < STOP_MIN_M || checkpoints.len() < 4 {
            continue;
        }
        let ex = extrapolate(&checkpoints, &bases, log_degree)?;
        let scale = ex.limit.clone().abs().max(&Float::with_val(prec, 1));
        let rel = ex.err_estimate.clone() / scale;
        if ex.converged && rel < tol_quarter {
            return Ok(EvalResult {
                value: ex.limit,
                err_estimate: ex.err_estimate,
                m_final: m,
                checkpoints,
                accelerated: true,
                converged: true,
            });
        }
    }

    // ceiling reached without meeting the tolerance
    let n = checkpoints.len();
    if n < 2 {
        let (m, value) = checkpoints[0].clone();
        return Ok(EvalResult {
            err_estimate: value.clone().abs(),
            value,
            m_final: m,
            checkpoints,
            accelerated: false,
            converged: false,
        });
    }
    let last_inc = (&checkpoints[n - 1].1 - &checkpoints[n - 2].1)
        .complete(prec)
        .abs();
    let ex = extrapolate(&checkpoints, &bases, log_degree)?;
    let err_estimate = ex.err_estimate.clone().max(&last_inc);
    Ok(EvalResult {
        value: ex.limit,
        err_estimate,
        m_final: checkpoints[n - 1].0,
        checkpoints,
        accelerated: true,
        converged: false,
    })
}

fn reround(params: &ParamPoint<Real>, prec: u32) -> ParamPoint<Real> {
    ParamPoint {
        alpha: Float::with_val(prec, &params.alpha),
        beta: Float::with_val(prec, &params.beta),
        gamma: params.gamma.as_ref().map(|g| Float::with_val(prec, g)),
    }
}

/// Size guard for the naive oracle.
const NAIVE_MAX_VARS: u64 = 4;
const NAIVE_MAX_M: u64 = 80;

/// Literal nested-loop sum of all terms with every variable `< m_limit`.
/// Exact in the rational backend. Cost is `m_limit^vars`, guarded by
/// `vars <= 4`, `m_limit <= 80`.
pub fn eval_naive<S: Scalar>(
    spec: &SeriesSpec,
    params: &ParamPoint<S>,
    ctx: S::Ctx,
    m_limit: u64,
) -> Result<S, Error> {
    spec.validate()?;
    params.validate(spec.param_arity)?;
    if spec.total_vars() > NAIVE_MAX_VARS {
        return Err(Error::invalid(format!(
            "naive evaluation is limited to {NAIVE_MAX_VARS} variables, spec has {}",
            spec.total_vars()
        )));
    }
    if m_limit > NAIVE_MAX_M {
        return Err(Error::invalid(format!(
            "naive evaluation is limited to M <= {NAIVE_MAX_M}, got {m_limit}"
        )));
    }
    let layers = compile_layers(spec);
    let m = m_limit as usize;

    // decoration tables up to m
    let mut pre = vec![S::one(ctx); m.max(1)];
    let mut suf = vec![S::one(ctx); m.max(1)];
    for v in 1..m {
        let i = v as i64 - 1;
        let mut f = params.alpha.add_i64(i).div(&S::from_i64(ctx, i + 1));
        if spec.param_arity == 3 {
            if spec.prefix == Decoration::Pochhammer3 || spec.suffix == Decoration::Pochhammer3 {
                let g = params.gamma.as_ref().expect("validated arity");
                f = f.mul(&params.beta.add_i64(i).div(&g.add_i64(i)));
            }
        }
        pre[v] = pre[v - 1].mul(&f);
        suf[v] = suf[v - 1].div(&f);
    }

    let weight = |kind: LayerKind, v: u64| -> S {
        match kind {
            LayerKind::Chain => params.alpha.add_i64(v as i64).recip(),
            LayerKind::Pos(i) => {
                let p = &spec.positions[i];
                let mut w = S::one(ctx);
                if p.a != 0 {
                    w = w.mul(&params.alpha.add_i64(v as i64).powi(-p.a));
                }
                if p.b != 0 {
                    w = w.mul(&params.beta.add_i64(v as i64).powi(-p.b));
                }
                if p.c != 0 {
                    let g = params.gamma.as_ref().expect("validated arity");
                    w = w.mul(&g.add_i64(v as i64).powi(-p.c));
                }
                w
            }
        }
    };

    fn rec<S: Scalar>(
        layers: &[Layer],
        t: usize,
        lo: u64,
        m_limit: u64,
        acc: &S,
        weight: &impl Fn(LayerKind, u64) -> S,
        suf: &[S],
        use_suffix: bool,
        total: &mut S,
    ) {
        let layer = layers[t];
        for v in lo..m_limit {
            let term = acc.mul(&weight(layer.kind, v));
            if t + 1 == layers.len() {
                let final_term = if use_suffix {
                    term.mul(&suf[v as usize])
                } else {
                    term
                };
                *total = total.add(&final_term);
            } else {
                let next_lo = match layers[t + 1].link {
                    Some(Link::Strict) => v + 1,
                    Some(Link::Weak) => v,
                    None => unreachable!("only the first layer lacks a link"),
                };
                rec(
                    layers,
                    t + 1,
                    next_lo,
                    m_limit,
                    &term,
                    weight,
                    suf,
                    use_suffix,
                    total,
                );
            }
        }
    }

    let mut total = S::zero(ctx);
    if m_limit > 0 {
        // fold the prefix decoration into the first layer's accumulator per v0
        let layers_ref = &layers[..];
        let use_prefix = spec.prefix != Decoration::None;
        let use_suffix = spec.suffix != Decoration::None;
        let layer0 = layers[0];
        for v0 in 0..m_limit {
            let acc = if use_prefix {
                pre[v0 as usize].mul(&weight(layer0.kind, v0))
            } else {
                weight(layer0.kind, v0)
            };
            if layers.len() == 1 {
                let t = if use_suffix {
                    acc.mul(&suf[v0 as usize])
                } else {
                    acc
                };
                total = total.add(&t);
            } else {
                let next_lo = match layers[1].link {
                    Some(Link::Strict) => v0 + 1,
                    Some(Link::Weak) => v0,
                    None => unreachable!(),
                };
                rec(
                    layers_ref,
                    1,
                    next_lo,
                    m_limit,
                    &acc,
                    &weight,
                    &suf,
                    use_suffix,
                    &mut total,
                );
            }
        }
    }
    Ok(total)
}

// ---------------------------------------------------------------------------
// named series builders
// ---------------------------------------------------------------------------

fn decorated_chain(index: &Index, link: Link) -> Result<SeriesSpec, Error> {
    if !index.is_eval_admissible() {
        return Err(Error::invalid(format!(
            "index {index} needs last part >= 2"
        )));
    }
    let parts = index.parts();
    let mut positions = Vec::with_capacity(parts.len());
    positions.push(Position::two(0, parts[0] as i32));
    for &k in &parts[1..] {
        positions.push(Position::two(1, k as i32 - 1));
    }
    Ok(SeriesSpec {
        links: vec![link; positions.len() - 1],
        positions,
        chains: vec![],
        prefix: Decoration::Pochhammer,
        suffix: Decoration::Pochhammer,
        param_arity: 2,
    })
}

/// Strict decorated series with first position `(0, k_1)` and interior
/// positions `(1, k_i - 1)`.
pub fn spec_z_i(index: &Index) -> Result<SeriesSpec, Error> {
    decorated_chain(index, Link::Strict)
}

/// Weak-link variant of [`spec_z_i`].
pub fn spec_zstar_i(index: &Index) -> Result<SeriesSpec, Error> {
    decorated_chain(index, Link::Weak)
}

/// Strict decorated series with positions `(1, k_i - 1)` and final position
/// `(2, k_n - 2)`.
pub fn spec_z_ii(index: &Index) -> Result<SeriesSpec, Error> {
    if !index.is_eval_admissible() {
        return Err(Error::invalid(format!(
            "index {index} needs last part >= 2"
        )));
    }
    let parts = index.parts();
    let n = parts.len();
    let mut positions = Vec::with_capacity(n);
    for &k in &parts[..n - 1] {
        positions.push(Position::two(1, k as i32 - 1));
    }
    positions.push(Position::two(2, parts[n - 1] as i32 - 2));
    Ok(SeriesSpec {
        links: vec![Link::Strict; n - 1],
        positions,
        chains: vec![],
        prefix: Decoration::Pochhammer,
        suffix: Decoration::Pochhammer,
        param_arity: 2,
    })
}

/// Undecorated single series `Σ 1/((m+α)^a (m+β)^b)`; requires `a + b >= 2`.
pub fn spec_z_single(a: i32, b: i32) -> Result<SeriesSpec, Error> {
    let spec = SeriesSpec {
        positions: vec![Position::two(a, b)],
        links: vec![],
        chains: vec![],
        prefix: Decoration::None,
        suffix: Decoration::None,
        param_arity: 2,
    };
    spec.validate()?;
    Ok(spec)
}

/// Strict decorated series with weak chains of length `r_i` in each gap
/// (final chain link strict) and general exponents `(a_i, b_i)`. With all
/// `r_i = 0` this is the plain strict series.
pub fn spec_zr(r_vec: &[u32], a_vec: &[i32], b_vec: &[i32]) -> Result<SeriesSpec, Error> {
    let n = a_vec.len();
    if n == 0 || b_vec.len() != n || r_vec.len() + 1 != n {
        return Err(Error::invalid(format!(
            "need |a| = |b| = |r| + 1 >= 1, got |a|={}, |b|={}, |r|={}",
            n,
            b_vec.len(),
            r_vec.len()
        )));
    }
    let positions = a_vec
        .iter()
        .zip(b_vec)
        .map(|(&a, &b)| Position::two(a, b))
        .collect();
    let spec = SeriesSpec {
        positions,
        links: vec![Link::Strict; n - 1],
        chains: r_vec
            .iter()
            .map(|&len| Chain {
                len,
                final_link: Link::Strict,
            })
            .collect(),
        prefix: Decoration::Pochhammer,
        suffix: Decoration::Pochhammer,
        param_arity: 2,
    };
    spec.validate()?;
    Ok(spec)
}

/// Weak three-parameter decorated series: first position `(0, 0, k_1)`,
/// interior `(1, 1, k_i - 2)`.
pub fn spec_zstar_i3(index: &Index) -> Result<SeriesSpec, Error> {
    if !index.is_eval_admissible() {
        return Err(Error::invalid(format!(
            "index {index} needs last part >= 2"
        )));
    }
    let parts = index.parts();
    let mut positions = Vec::with_capacity(parts.len());
    positions.push(Position::three(0, 0, parts[0] as i32));
    for &k in &parts[1..] {
        positions.push(Position::three(1, 1, k as i32 - 2));
    }
    Ok(SeriesSpec {
        links: vec![Link::Weak; positions.len() - 1],
        positions,
        chains: vec![],
        prefix: Decoration::Pochhammer3,
        suffix: Decoration::Pochhammer3,
        param_arity: 3,
    })
}

/// Undecorated three-parameter single series; requires `a + b + c >= 2`.
pub fn spec_z3_single(a: i32, b: i32, c: i32) -> Result<SeriesSpec, Error> {
    let spec = SeriesSpec {
        positions: vec![Position::three(a, b, c)],
        links: vec![],
        chains: vec![],
        prefix: Decoration::None,
        suffix: Decoration::None,
        param_arity: 3,
    };
    spec.validate()?;
    Ok(spec)
}
