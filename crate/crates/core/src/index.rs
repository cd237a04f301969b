//! Index combinatorics: admissibility, cyclic shifts, the term lists of the
//! cyclic sum formulas, and constrained composition enumeration.

use crate::error::Error;
use serde::{Deserialize, Serialize};
use std::fmt;
use std::str::FromStr;

/// A composition `(k_1, …, k_n)` of positive integers; the argument of the
/// named series.
///
/// `admissible` means some part is at least 2 (the cyclic-sum hypothesis);
/// `eval_admissible` means the last part is at least 2 (convergence of the
/// named series).
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Index {
    parts: Vec<u32>,
}

impl Index {
    pub fn new(parts: Vec<u32>) -> Result<Self, Error> {
        if parts.is_empty() {
            return Err(Error::invalid("index must have depth >= 1"));
        }
        if parts.iter().any(|&k| k == 0) {
            return Err(Error::invalid("index parts must be positive"));
        }
        Ok(Index { parts })
    }

    pub fn parts(&self) -> &[u32] {
        &self.parts
    }

    pub fn depth(&self) -> usize {
        self.parts.len()
    }

    pub fn weight(&self) -> u32 {
        self.parts.iter().sum()
    }

    /// Some part is `>= 2`.
    pub fn is_admissible(&self) -> bool {
        self.parts.iter().any(|&k| k >= 2)
    }

    /// The last part is `>= 2`.
    pub fn is_eval_admissible(&self) -> bool {
        *self.parts.last().expect("nonempty") >= 2
    }

    /// Rotation `(k_{i+1}, …, k_n, k_1, …, k_i)` for `1 <= i <= n`; `i = n`
    /// is the identity.
    pub fn cyclic_shift(&self, i: usize) -> Result<Index, Error> {
        let n = self.depth();
        if i == 0 || i > n {
            return Err(Error::invalid(format!(
                "shift amount {i} out of range 1..={n}"
            )));
        }
        let mut parts = Vec::with_capacity(n);
        parts.extend_from_slice(&self.parts[i..]);
        parts.extend_from_slice(&self.parts[..i]);
        Ok(Index { parts })
    }
}

impl fmt::Display for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for k in &self.parts {
            if !first {
                write!(f, ",")?;
            }
            write!(f, "{k}")?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for Index {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({self})")
    }
}

impl FromStr for Index {
    type Err = Error;

    /// Parses the text form `"k1,k2,...,kn"`.
    fn from_str(s: &str) -> Result<Self, Error> {
        let parts = s
            .split(',')
            .map(|p| {
                p.trim()
                    .parse::<u32>()
                    .map_err(|e| Error::invalid(format!("bad index part {p:?}: {e}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        Index::new(parts)
    }
}

/// Left side term list of the cyclic sum formulas: for each `i` with
/// `k_i >= 2` and each `j` in `0..=k_i-2`, the depth-`(n+1)` index
/// `(j+1, k_{i+1}, …, k_n, k_1, …, k_{i-1}, k_i - j)`.
///
/// Enumeration order is `i` ascending then `j` ascending. Parts equal to 1
/// contribute no terms (their inner sum is empty). The list length is
/// `weight - depth` and every emitted index has last part `>= 2`.
pub fn csf_lhs_terms(index: &Index) -> Result<Vec<Index>, Error> {
    if !index.is_admissible() {
        return Err(Error::invalid(format!(
            "index {index} is not admissible (needs some part >= 2)"
        )));
    }
    let parts = index.parts();
    let n = parts.len();
    let mut out = Vec::with_capacity((index.weight() as usize) - n);
    for i in 0..n {
        let k_i = parts[i];
        for j in 0..k_i.saturating_sub(1) {
            let mut t = Vec::with_capacity(n + 1);
            t.push(j + 1);
            t.extend_from_slice(&parts[i + 1..]);
            t.extend_from_slice(&parts[..i]);
            t.push(k_i - j);
            out.push(Index { parts: t });
        }
    }
    Ok(out)
}

/// Right side term list of the strict cyclic sum formula: the `n` indices
/// `(k_{i+1}, …, k_n, k_1, …, k_{i-1}, k_i + 1)` for `i = 1..n`.
pub fn csf_rhs_terms(index: &Index) -> Result<Vec<Index>, Error> {
    if !index.is_admissible() {
        return Err(Error::invalid(format!(
            "index {index} is not admissible (needs some part >= 2)"
        )));
    }
    let parts = index.parts();
    let n = parts.len();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut t = Vec::with_capacity(n);
        t.extend_from_slice(&parts[i + 1..]);
        t.extend_from_slice(&parts[..i]);
        t.push(parts[i] + 1);
        out.push(Index { parts: t });
    }
    Ok(out)
}

/// All compositions of `k` into `n` parts with every part `>= 1` and the last
/// part `>= 2`, in lexicographic order. Requires `0 < n < k`; the count is
/// `binom(k-2, n-1)`.
pub fn compositions(k: u32, n: u32) -> Result<Vec<Index>, Error> {
    if n == 0 || n >= k {
        return Err(Error::invalid(format!(
            "compositions require 0 < n < k, got k={k}, n={n}"
        )));
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(n as usize);
    fn rec(out: &mut Vec<Index>, cur: &mut Vec<u32>, rem: u32, slots: u32) {
        if slots == 1 {
            if rem >= 2 {
                let mut parts = cur.clone();
                parts.push(rem);
                out.push(Index { parts });
            }
            return;
        }
        // leave at least slots-2 ones and a final part of 2
        let max = rem.saturating_sub(slots);
        for v in 1..=max {
            cur.push(v);
            rec(out, cur, rem - v, slots - 1);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, k, n);
    Ok(out)
}

/// All ways to write `r` as an ordered sum of `parts` nonnegative integers,
/// lexicographic. `parts = 0` yields one empty composition when `r = 0`.
pub fn weak_compositions(r: u32, parts: usize) -> Vec<Vec<u32>> {
    if parts == 0 {
        return if r == 0 { vec![vec![]] } else { vec![] };
    }
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(parts);
    fn rec(out: &mut Vec<Vec<u32>>, cur: &mut Vec<u32>, rem: u32, slots: usize) {
        if slots == 1 {
            let mut c = cur.clone();
            c.push(rem);
            out.push(c);
            return;
        }
        for v in 0..=rem {
            cur.push(v);
            rec(out, cur, rem - v, slots - 1);
            cur.pop();
        }
    }
    rec(&mut out, &mut cur, r, parts);
    out
}

/// Exact binomial coefficient `C(n, k)` for possibly negative integer `n`,
/// by the falling-factorial product. `C(n, k) = 0` for `k < 0`; `C(-1, 0) = 1`.
pub fn binomial(n: i64, k: i64) -> i64 {
    if k < 0 {
        return 0;
    }
    let mut num: i128 = 1;
    let mut den: i128 = 1;
    for j in 0..k {
        num *= (n - j) as i128;
        den *= (j + 1) as i128;
    }
    i64::try_from(num / den).expect("binomial overflow")
}
