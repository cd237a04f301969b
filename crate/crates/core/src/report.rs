//! Relation reports and machine-readable report documents.
//!
//! Numeric fields in documents are decimal strings (digit count derived from
//! the working precision), never binary floats, so reports are
//! backend-independent and bit-stable across runs.

use crate::error::Error;
use crate::scalar::Real;
use crate::series::{EvalResult, ParamPoint};
use rug::ops::CompleteRound;
use rug::Float;
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::io::Write;

/// Decimal significant digits carried by reports at `prec` bits:
/// `floor(prec · log10 2) - 2`.
pub fn report_digits(prec: u32) -> usize {
    ((prec as f64 * std::f64::consts::LOG10_2).floor() as usize).saturating_sub(2).max(4)
}

/// Format a [`Real`] as a decimal string with precision-dependent digits.
pub fn format_real(x: &Real) -> String {
    let digits = report_digits(x.prec());
    format!("{:.*e}", digits - 1, x)
}

/// One verified identity instance.
#[derive(Clone, Debug)]
pub struct RelationReport {
    pub relation_id: String,
    /// Argument echo, insertion-ordered.
    pub args: Vec<(String, String)>,
    pub params: ParamPoint<Real>,
    pub lhs: EvalResult,
    pub rhs: EvalResult,
    pub abs_diff: Real,
    /// `abs_diff / max(|lhs|, |rhs|, 1)`.
    pub rel_diff: Real,
    pub tol: f64,
    pub pass: bool,
    /// Some constituent evaluation did not converge; distinct from a failed
    /// identity.
    pub inconclusive: bool,
    pub wall_time_s: f64,
}

impl RelationReport {
    pub fn build(
        relation_id: impl Into<String>,
        args: Vec<(String, String)>,
        params: ParamPoint<Real>,
        lhs: EvalResult,
        rhs: EvalResult,
        tol: f64,
        wall_time_s: f64,
    ) -> Self {
        let prec = lhs.value.prec();
        let abs_diff = (&lhs.value - &rhs.value).complete(prec).abs();
        let scale = lhs
            .value
            .clone()
            .abs()
            .max(&rhs.value.clone().abs())
            .max(&Float::with_val(prec, 1));
        let rel_diff = (&abs_diff / &scale).complete(prec);
        let inconclusive = !(lhs.converged && rhs.converged);
        let pass = !inconclusive && rel_diff <= Float::with_val(prec, tol);
        RelationReport {
            relation_id: relation_id.into(),
            args,
            params,
            lhs,
            rhs,
            abs_diff,
            rel_diff,
            tol,
            pass,
            inconclusive,
            wall_time_s,
        }
    }

    pub fn to_doc(&self) -> RelationReportDoc {
        RelationReportDoc {
            relation_id: self.relation_id.clone(),
            args: self.args.iter().cloned().collect(),
            params: ParamsDoc {
                alpha: format_real(&self.params.alpha),
                beta: format_real(&self.params.beta),
                gamma: self.params.gamma.as_ref().map(format_real),
            },
            lhs: eval_doc(&self.lhs),
            rhs: eval_doc(&self.rhs),
            abs_diff: format_real(&self.abs_diff),
            rel_diff: format_real(&self.rel_diff),
            tol: self.tol,
            pass: self.pass,
            inconclusive: self.inconclusive,
            wall_time_s: self.wall_time_s,
        }
    }
}

/// Integer-weighted sum of evaluation results, combined in term order.
/// The error estimates add; `converged` requires every term converged.
pub fn sum_results(prec: u32, terms: &[(i64, EvalResult)]) -> EvalResult {
    let mut value = Float::with_val(prec, 0);
    let mut err = Float::with_val(prec, 0);
    let mut m_final = 0u64;
    let mut accelerated = false;
    let mut converged = true;
    for (coef, t) in terms {
        value += (&t.value * *coef).complete(prec);
        err += (&t.err_estimate * coef.abs()).complete(prec);
        m_final = m_final.max(t.m_final);
        accelerated |= t.accelerated;
        converged &= t.converged;
    }
    EvalResult {
        value,
        err_estimate: err,
        m_final,
        checkpoints: vec![],
        accelerated,
        converged,
    }
}

fn eval_doc(r: &EvalResult) -> EvalResultDoc {
    EvalResultDoc {
        value: format_real(&r.value),
        err_estimate: format_real(&r.err_estimate),
        m_final: r.m_final,
        accelerated: r.accelerated,
        converged: r.converged,
    }
}

/// String-valued mirror of [`EvalResult`] for documents.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EvalResultDoc {
    pub value: String,
    pub err_estimate: String,
    pub m_final: u64,
    pub accelerated: bool,
    pub converged: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ParamsDoc {
    pub alpha: String,
    pub beta: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationReportDoc {
    pub relation_id: String,
    pub args: BTreeMap<String, String>,
    pub params: ParamsDoc,
    pub lhs: EvalResultDoc,
    pub rhs: EvalResultDoc,
    pub abs_diff: String,
    pub rel_diff: String,
    pub tol: f64,
    pub pass: bool,
    pub inconclusive: bool,
    pub wall_time_s: f64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

/// Top-level result document written by the suite runner.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub version: String,
    pub config: serde_json::Value,
    pub reports: Vec<RelationReportDoc>,
    pub summary: Summary,
    pub total_wall_time_s: f64,
}

impl ReportDocument {
    pub fn new(config: serde_json::Value, reports: Vec<RelationReportDoc>, total_wall_time_s: f64) -> Self {
        let mut summary = Summary::default();
        for r in &reports {
            if r.inconclusive {
                summary.inconclusive += 1;
            } else if r.pass {
                summary.pass += 1;
            } else {
                summary.fail += 1;
            }
        }
        ReportDocument {
            version: crate::VERSION.to_string(),
            config,
            reports,
            summary,
            total_wall_time_s,
        }
    }

    pub fn to_json(&self) -> Result<String, Error> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(s: &str) -> Result<Self, Error> {
        Ok(serde_json::from_str(s)?)
    }

    /// One CSV row per report:
    /// `relation_id,args,alpha,beta,gamma,lhs,rhs,rel_diff,pass`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<(), Error> {
        writeln!(w, "relation_id,args,alpha,beta,gamma,lhs,rhs,rel_diff,pass")?;
        for r in &self.reports {
            let args = r
                .args
                .iter()
                .map(|(k, v)| format!("{k}={v}"))
                .collect::<Vec<_>>()
                .join(";");
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                csv_field(&r.relation_id),
                csv_field(&args),
                csv_field(&r.params.alpha),
                csv_field(&r.params.beta),
                csv_field(r.params.gamma.as_deref().unwrap_or("")),
                csv_field(&r.lhs.value),
                csv_field(&r.rhs.value),
                csv_field(&r.rel_diff),
                r.pass
            )?;
        }
        Ok(())
    }
}

fn csv_field(s: &str) -> String {
    if s.contains(',') || s.contains('"') || s.contains('\n') {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Render a report as aligned plain text for the CLI.
pub fn render_text(r: &RelationReport) -> String {
    let mut out = String::new();
    let args = r
        .args
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ");
    let params = match &r.params.gamma {
        Some(g) => format!(
            "alpha={} beta={} gamma={}",
            short(&r.params.alpha),
            short(&r.params.beta),
            short(g)
        ),
        None => format!("alpha={} beta={}", short(&r.params.alpha), short(&r.params.beta)),
    };
    let verdict = if r.inconclusive {
        "INCONCLUSIVE"
    } else if r.pass {
        "PASS"
    } else {
        "FAIL"
    };
    out.push_str(&format!("relation  = {}\n", r.relation_id));
    if !args.is_empty() {
        out.push_str(&format!("args      = {args}\n"));
    }
    out.push_str(&format!("params    = {params}\n"));
    out.push_str(&format!("lhs       = {}\n", format_real(&r.lhs.value)));
    out.push_str(&format!("rhs       = {}\n", format_real(&r.rhs.value)));
    out.push_str(&format!("abs_diff  = {}\n", format_real(&r.abs_diff)));
    out.push_str(&format!("rel_diff  = {}\n", format_real(&r.rel_diff)));
    out.push_str(&format!("tol       = {:e}\n", r.tol));
    out.push_str(&format!(
        "m_final   = lhs:{} rhs:{}\n",
        r.lhs.m_final, r.rhs.m_final
    ));
    out.push_str(&format!("time_s    = {:.3}\n", r.wall_time_s));
    out.push_str(&format!("result    = {verdict}\n"));
    out
}

fn short(x: &Real) -> String {
    let f = x.to_f64();
    if f == f.trunc() && f.abs() < 1e15 {
        format!("{f}")
    } else {
        format!("{f}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn digit_count_tracks_precision() {
        assert_eq!(report_digits(256), 75);
        assert_eq!(report_digits(64), 17);
    }

    #[test]
    fn format_real_is_decimal_scientific() {
        let x = Float::with_val(64, 1.5);
        let s = format_real(&x);
        assert!(s.starts_with("1.5"));
        assert!(s.contains('e'));
        let parsed = Float::with_val(64, Float::parse(&s).unwrap());
        assert_eq!(parsed, x);
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("plain"), "plain");
        assert_eq!(csv_field("index=1,2"), "\"index=1,2\"");
        assert_eq!(csv_field("say \"hi\""), "\"say \"\"hi\"\"\"");
    }
}
