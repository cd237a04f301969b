//! Rising-factorial ratio tables.
//!
//! `prefix[m] = (α)_m / m!` and `suffix[m] = m! / (α)_m`, built by the
//! recurrence `prefix[m+1] = prefix[m]·(m+α)/(m+1)` with `prefix[0] = 1`.
//! These are the boundary decorations of the nested series.

use crate::error::Error;
use crate::scalar::Scalar;

/// Incremental tables of `(α)_m/m!` and its reciprocal for `0 <= m <= M`.
#[derive(Clone, Debug)]
pub struct PochhammerTables<S> {
    alpha: S,
    prefix: Vec<S>,
    suffix: Vec<S>,
}

impl<S: Scalar> PochhammerTables<S> {
    pub fn alpha(&self) -> &S {
        &self.alpha
    }
    /// `(α)_m / m!`
    pub fn prefix(&self) -> &[S] {
        &self.prefix
    }
    /// `m! / (α)_m`
    pub fn suffix(&self) -> &[S] {
        &self.suffix
    }
}

/// Build tables of length `m_max + 1`. Requires real `α > 0`.
pub fn build_pochhammer<S: Scalar>(
    ctx: S::Ctx,
    alpha: &S,
    m_max: usize,
) -> Result<PochhammerTables<S>, Error> {
    if !alpha.is_positive() {
        return Err(Error::domain("pochhammer tables require alpha > 0"));
    }
    let mut prefix = Vec::with_capacity(m_max + 1);
    let mut suffix = Vec::with_capacity(m_max + 1);
    prefix.push(S::one(ctx));
    suffix.push(S::one(ctx));
    for m in 0..m_max as i64 {
        let num = alpha.add_i64(m);
        let step = num.div(&S::from_i64(ctx, m + 1));
        prefix.push(prefix[m as usize].mul(&step));
        suffix.push(suffix[m as usize].div(&step));
    }
    Ok(PochhammerTables {
        alpha: alpha.clone(),
        prefix,
        suffix,
    })
}
