//! Suite configuration and the batch runner.
//!
//! A suite file is line-oriented: top-level `key = value` assignments,
//! then `[grid]` / `[grid3]` sections listing parameter points (whitespace
//! separated, decimal or `p/q` literals), then `[relations]` with one
//! instance pattern per line:
//!
//! ```text
//! precision = 256
//! m_max = 1048576
//! default_tol = 1e-6
//! jobs = 4
//!
//! [grid]
//! 1 1
//! 0.8 1.7
//!
//! [grid3]
//! 1 1 1
//!
//! [relations]
//! csf-star index=1,2 tol=1e-8
//! sum-formula k=5 n=3
//! eq21 s=2
//! lemma1-star index=2 tol=1e-4
//! ```
//!
//! Two-parameter relations run at every `[grid]` point, `eq21` at every
//! `[grid3]` point; a line may pin its own `alpha=`/`beta=`(/`gamma=`)
//! instead. Every instance is validated (known id, preconditions, parameter
//! domain) before anything is evaluated.

use crate::error::Error;
use crate::relations::{run_relation, validate_relation, RelationArgs, RELATION_IDS};
use crate::report::{RelationReport, ReportDocument};
use crate::scalar::{real_from_str, Real};
use crate::series::{EvalOptions, ParamPoint};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::time::Instant;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RelationLine {
    pub id: String,
    pub args: BTreeMap<String, String>,
    pub tol: Option<f64>,
    pub pinned: Option<Vec<String>>,
}

/// Parsed suite file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub precision: u32,
    pub m_max: u64,
    pub default_tol: f64,
    pub jobs: usize,
    pub grid2: Vec<Vec<String>>,
    pub grid3: Vec<Vec<String>>,
    pub relations: Vec<RelationLine>,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            precision: crate::scalar::DEFAULT_PRECISION,
            m_max: 1 << 20,
            default_tol: 1e-6,
            jobs: 0,
            grid2: vec![],
            grid3: vec![],
            relations: vec![],
        }
    }
}

impl SuiteConfig {
    pub fn parse(text: &str) -> Result<SuiteConfig, Error> {
        let mut cfg = SuiteConfig::default();
        let mut section = "";
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = |msg: String| Error::config(format!("line {}: {msg}", lineno + 1));
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| at("unterminated section header".into()))?;
                match name {
                    "grid" => section = "grid",
                    "grid3" => section = "grid3",
                    "relations" => section = "relations",
                    other => return Err(at(format!("unknown section [{other}]"))),
                }
                continue;
            }
            match section {
                "" => {
                    let (key, value) = line
                        .split_once('=')
                        .ok_or_else(|| at("expected key = value".into()))?;
                    let (key, value) = (key.trim(), value.trim());
                    match key {
                        "precision" => {
                            cfg.precision = value
                                .parse()
                                .map_err(|e| at(format!("bad precision: {e}")))?
                        }
                        "m_max" => {
                            cfg.m_max =
                                value.parse().map_err(|e| at(format!("bad m_max: {e}")))?
                        }
                        "default_tol" => {
                            cfg.default_tol = value
                                .parse()
                                .map_err(|e| at(format!("bad default_tol: {e}")))?
                        }
                        "jobs" => {
                            cfg.jobs = value.parse().map_err(|e| at(format!("bad jobs: {e}")))?
                        }
                        other => return Err(at(format!("unknown key {other:?}"))),
                    }
                }
                "grid" | "grid3" => {
                    let parts: Vec<String> =
                        line.split_whitespace().map(|s| s.to_string()).collect();
                    let want = if section == "grid" { 2 } else { 3 };
                    if parts.len() != want {
                        return Err(at(format!(
                            "expected {want} parameter values, got {}",
                            parts.len()
                        )));
                    }
                    if section == "grid" {
                        cfg.grid2.push(parts);
                    } else {
                        cfg.grid3.push(parts);
                    }
                }
                "relations" => {
                    let mut tokens = line.split_whitespace();
                    let id = tokens
                        .next()
                        .ok_or_else(|| at("missing relation id".into()))?
                        .to_string();
                    let mut args = BTreeMap::new();
                    let mut tol = None;
                    let mut alpha = None;
                    let mut beta = None;
                    let mut gamma = None;
                    for tok in tokens {
                        let (key, value) = tok
                            .split_once('=')
                            .ok_or_else(|| at(format!("expected key=value, got {tok:?}")))?;
                        match key {
                            "tol" => {
                                tol = Some(
                                    value.parse().map_err(|e| at(format!("bad tol: {e}")))?,
                                )
                            }
                            "alpha" => alpha = Some(value.to_string()),
                            "beta" => beta = Some(value.to_string()),
                            "gamma" => gamma = Some(value.to_string()),
                            _ => {
                                args.insert(key.to_string(), value.to_string());
                            }
                        }
                    }
                    let pinned = match (alpha, beta, gamma) {
                        (None, None, None) => None,
                        (Some(a), Some(b), g) => {
                            let mut v = vec![a, b];
                            v.extend(g);
                            Some(v)
                        }
                        _ => return Err(at("pinned params need both alpha= and beta=".into())),
                    };
                    cfg.relations.push(RelationLine {
                        id,
                        args,
                        tol,
                        pinned,
                    });
                }
                _ => unreachable!(),
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<SuiteConfig, Error> {
        SuiteConfig::parse(&std::fs::read_to_string(path)?)
    }
}

/// One validated relation instance ready to run.
struct Instance {
    id: String,
    args: RelationArgs,
    args_echo: BTreeMap<String, String>,
    params: ParamPoint<Real>,
    tol: f64,
}

fn parse_args(id: &str, raw: &BTreeMap<String, String>) -> Result<RelationArgs, Error> {
    let mut args = RelationArgs::default();
    for (key, value) in raw {
        match key.as_str() {
            "index" | "indexk" => {
                args.index = Some(value.parse()?);
            }
            "indexl" => {
                args.index2 = Some(value.parse()?);
            }
            "k" => args.k = Some(parse_u32(id, key, value)?),
            "n" => args.n = Some(parse_u32(id, key, value)?),
            "m" => args.m = Some(parse_u32(id, key, value)?),
            "r" => args.r = Some(parse_u32(id, key, value)?),
            "s" => args.s = Some(parse_u32(id, key, value)?),
            other => {
                return Err(Error::config(format!(
                    "relation {id}: unknown argument {other:?}"
                )))
            }
        }
    }
    Ok(args)
}

fn parse_u32(id: &str, key: &str, value: &str) -> Result<u32, Error> {
    value
        .parse()
        .map_err(|e| Error::config(format!("relation {id}: bad {key}={value:?}: {e}")))
}

fn build_instances(cfg: &SuiteConfig) -> Result<Vec<Instance>, Error> {
    let prec = cfg.precision;
    let mut out = Vec::new();
    for line in &cfg.relations {
        if !RELATION_IDS.contains(&line.id.as_str()) {
            return Err(Error::config(format!("unknown relation id {:?}", line.id)));
        }
        let args = parse_args(&line.id, &line.args)?;
        let tol = line.tol.unwrap_or(cfg.default_tol);
        let needs3 = line.id == "eq21";
        let points: Vec<Vec<String>> = if let Some(pin) = &line.pinned {
            vec![pin.clone()]
        } else if needs3 {
            cfg.grid3.clone()
        } else {
            cfg.grid2.clone()
        };
        if points.is_empty() {
            return Err(Error::config(format!(
                "relation {} has no parameter points (empty {} and no pinned params)",
                line.id,
                if needs3 { "[grid3]" } else { "[grid]" }
            )));
        }
        for pt in points {
            if needs3 && pt.len() != 3 {
                return Err(Error::config(format!(
                    "relation {} needs 3 parameters, point has {}",
                    line.id,
                    pt.len()
                )));
            }
            let alpha = real_from_str(&pt[0], prec)?;
            let beta = real_from_str(&pt[1], prec)?;
            let gamma = pt.get(2).map(|g| real_from_str(g, prec)).transpose()?;
            let params = ParamPoint { alpha, beta, gamma };
            validate_relation(&line.id, &args, &params).map_err(|e| {
                Error::config(format!("relation {} at ({}): {e}", line.id, pt.join(", ")))
            })?;
            let mut echo = line.args.clone();
            echo.insert("point".into(), pt.join(","));
            out.push(Instance {
                id: line.id.clone(),
                args: args.clone(),
                args_echo: echo,
                params,
                tol,
            });
        }
    }
    Ok(out)
}

/// Validate and run a suite; reports come back in configuration order
/// regardless of the parallelism degree.
pub fn run_suite(cfg: &SuiteConfig) -> Result<(ReportDocument, Vec<RelationReport>), Error> {
    let started = Instant::now();
    let instances = build_instances(cfg)?;
    let opts = EvalOptions {
        precision: cfg.precision,
        m_max: cfg.m_max,
        tol: cfg.default_tol / 100.0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| Error::config(format!("thread pool: {e}")))?;
    let results: Vec<Result<RelationReport, Error>> = pool.install(|| {
        use rayon::prelude::*;
        instances
            .par_iter()
            .map(|inst| {
                let mut rep = run_relation(&inst.id, &inst.args, &inst.params, inst.tol, &opts)?;
                rep.args = inst
                    .args_echo
                    .iter()
                    .map(|(k, v)| (k.clone(), v.clone()))
                    .collect();
                Ok(rep)
            })
            .collect()
    });
    let mut reports = Vec::with_capacity(results.len());
    for r in results {
        reports.push(r?);
    }
    let docs = reports.iter().map(|r| r.to_doc()).collect();
    let config_echo = serde_json::to_value(cfg)?;
    let doc = ReportDocument::new(config_echo, docs, started.elapsed().as_secs_f64());
    Ok((doc, reports))
}

#[cfg(test)]
mod tests {
    use super::*;

    const SMALL: &str = r#"
# a small suite
precision = 192
m_max = 65536
default_tol = 1e-6
jobs = 2

[grid]
1 1
1.5 0.6

[grid3]
1 1 1

[relations]
csf-star index=2 tol=1e-8
sum-formula k=3 n=2
eq21 s=2
"#;

    #[test]
    fn parse_and_run_small_suite() {
        let cfg = SuiteConfig::parse(SMALL).unwrap();
        assert_eq!(cfg.precision, 192);
        assert_eq!(cfg.grid2.len(), 2);
        assert_eq!(cfg.relations.len(), 3);
        let (doc, reports) = run_suite(&cfg).unwrap();
        // 2 relations x 2 grid points + eq21 x 1 point
        assert_eq!(reports.len(), 5);
        assert_eq!(doc.summary.pass, 5);
        assert_eq!(doc.summary.fail, 0);
        assert_eq!(doc.reports.len(), 5);
    }

    #[test]
    fn empty_suite_is_valid() {
        let cfg = SuiteConfig::parse("").unwrap();
        let (doc, reports) = run_suite(&cfg).unwrap();
        assert!(reports.is_empty());
        assert_eq!(doc.summary, crate::report::Summary::default());
    }

    #[test]
    fn out_of_domain_point_fails_validation_before_running() {
        let text = r#"
[grid]
-1 1
[relations]
csf-star index=2
"#;
        let cfg = SuiteConfig::parse(text).unwrap();
        assert!(matches!(run_suite(&cfg), Err(Error::Config(_))));
    }

    #[test]
    fn precondition_violations_are_config_errors() {
        let text = r#"
[grid]
1 1
[relations]
sum-formula k=2 n=2
"#;
        let cfg = SuiteConfig::parse(text).unwrap();
        assert!(run_suite(&cfg).is_err());
    }

    #[test]
    fn parse_errors_carry_line_numbers() {
        assert!(SuiteConfig::parse("[bogus]").is_err());
        assert!(SuiteConfig::parse("precision").is_err());
        assert!(SuiteConfig::parse("[grid]\n1 2 3").is_err());
        assert!(SuiteConfig::parse("[relations]\ncsf-star index=2 alpha=1").is_err());
    }

    #[test]
    fn pinned_params_override_grid() {
        let text = r#"
[relations]
csf-star index=2 alpha=1 beta=1 tol=1e-8
"#;
        let cfg = SuiteConfig::parse(text).unwrap();
        let (_, reports) = run_suite(&cfg).unwrap();
        assert_eq!(reports.len(), 1);
        assert!(reports[0].pass);
    }

    #[test]
    fn json_round_trip_and_csv() {
        let cfg = SuiteConfig::parse(
            "[grid]\n1 1\n[relations]\ncsf-star index=2 tol=1e-8\n",
        )
        .unwrap();
        let (doc, _) = run_suite(&cfg).unwrap();
        let json = doc.to_json().unwrap();
        let parsed = ReportDocument::from_json(&json).unwrap();
        assert_eq!(parsed, doc);
        let mut csv = Vec::new();
        doc.write_csv(&mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("relation_id,args,alpha,beta,gamma,lhs,rhs,rel_diff,pass"));
        assert!(text.contains("csf-star"));
    }

    #[test]
    fn determinism_across_runs_and_jobs() {
        let base = "
[grid]
1.1 0.9
[relations]
csf-star index=1,2
eq12 m=1 n=1
";
        let cfg1 = SuiteConfig::parse(&format!("jobs = 1\n{base}")).unwrap();
        let cfg2 = SuiteConfig::parse(&format!("jobs = 4\n{base}")).unwrap();
        let (d1, _) = run_suite(&cfg1).unwrap();
        let (d2, _) = run_suite(&cfg2).unwrap();
        let strip = |d: &ReportDocument| {
            d.reports
                .iter()
                .map(|r| {
                    (
                        r.relation_id.clone(),
                        r.lhs.value.clone(),
                        r.rhs.value.clone(),
                        r.abs_diff.clone(),
                        r.rel_diff.clone(),
                    )
                })
                .collect::<Vec<_>>()
        };
        assert_eq!(strip(&d1), strip(&d2));
    }
}
