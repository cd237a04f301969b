//! Command-line front end: evaluate named series, verify single relation
//! instances, and run suite files with machine-readable reports.

use clap::{Args, Parser, Subcommand};
use mzlab::aux::{eval_t, eval_tstar, T_DEFAULT_M_MAX};
use mzlab::relations::{run_relation, RelationArgs, RELATION_IDS};
use mzlab::report::{format_real, render_text};
use mzlab::scalar::{real_from_str, DEFAULT_PRECISION};
use mzlab::series::{
    eval_dp, spec_z3_single, spec_z_i, spec_z_ii, spec_z_single, spec_zr, spec_zstar_i,
    spec_zstar_i3, EvalOptions, EvalResult, ParamPoint, SeriesSpec,
};
use mzlab::{Error, Index};
use std::path::PathBuf;
use std::process::ExitCode;

const PRECISION_ENV: &str = "MZLAB_PRECISION_BITS";

#[derive(Parser)]
#[command(
    name = "mzlab",
    version,
    about = "Configurable-precision laboratory for parametrized multiple zeta-type series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a named series (or a series spec file) at a parameter point.
    Eval(EvalCmd),
    /// Verify one relation instance; exit 0 pass, 1 fail, 3 inconclusive.
    Verify(VerifyCmd),
    /// Run a suite file; writes a JSON report and a CSV summary.
    Suite(SuiteCmd),
}

#[derive(Args)]
struct ParamArgs {
    /// First shift parameter (decimal or p/q)
    #[arg(long)]
    alpha: Option<String>,
    /// Second shift parameter
    #[arg(long)]
    beta: Option<String>,
    /// Third shift parameter (3-parameter series only)
    #[arg(long)]
    gamma: Option<String>,
}

impl ParamArgs {
    fn build(&self, prec: u32) -> Result<ParamPoint<mzlab::Real>, Error> {
        let alpha = real_from_str(self.alpha.as_deref().unwrap_or("1"), prec)?;
        let beta = real_from_str(self.beta.as_deref().unwrap_or("1"), prec)?;
        let gamma = self
            .gamma
            .as_deref()
            .map(|g| real_from_str(g, prec))
            .transpose()?;
        Ok(ParamPoint { alpha, beta, gamma })
    }
}

#[derive(Args)]
struct EvalCmd {
    /// One of: zi | zii | zstar-i | z-single | zr | zstar-i3 | z3-single | t | tstar
    #[arg(long, conflicts_with = "spec_file")]
    series: Option<String>,
    /// Index "k1,k2,...,kn" for the indexed series
    #[arg(long)]
    index: Option<String>,
    /// Exponent a for the single series
    #[arg(long)]
    a: Option<i32>,
    /// Exponent b for the single series
    #[arg(long)]
    b: Option<i32>,
    /// Exponent c for the 3-parameter single series
    #[arg(long)]
    c: Option<i32>,
    /// Chain lengths "r1,...,r_{n-1}" for the chain series
    #[arg(long)]
    r_vec: Option<String>,
    /// Exponents "a1,...,an" for the chain series
    #[arg(long)]
    a_vec: Option<String>,
    /// Exponents "b1,...,bn" for the chain series
    #[arg(long)]
    b_vec: Option<String>,
    /// JSON series description file
    #[arg(long)]
    spec_file: Option<PathBuf>,
    #[command(flatten)]
    params: ParamArgs,
    /// Relative tolerance target
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    /// Truncation ceiling (defaults to 2^20, or 2^13 for t/tstar)
    #[arg(long)]
    m_max: Option<u64>,
    /// Working precision in bits (or set MZLAB_PRECISION_BITS)
    #[arg(long)]
    precision: Option<u32>,
    /// Emit JSON instead of text
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct VerifyCmd {
    /// Relation id (see --list)
    #[arg(long, required_unless_present = "list")]
    relation: Option<String>,
    /// List known relation ids and exit
    #[arg(long)]
    list: bool,
    /// Index argument "k1,...,kn"
    #[arg(long)]
    index: Option<String>,
    /// First index of the symmetry relation
    #[arg(long)]
    indexk: Option<String>,
    /// Second index of the symmetry relation
    #[arg(long)]
    indexl: Option<String>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    n: Option<u32>,
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    r: Option<u32>,
    #[arg(long)]
    s: Option<u32>,
    #[command(flatten)]
    params: ParamArgs,
    /// Pass/fail tolerance on the relative difference
    #[arg(long, default_value_t = 1e-6)]
    tol: f64,
    /// Truncation ceiling for the constituent evaluations
    #[arg(long)]
    m_max: Option<u64>,
    /// Working precision in bits (or set MZLAB_PRECISION_BITS)
    #[arg(long)]
    precision: Option<u32>,
    /// Emit the report as JSON
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct SuiteCmd {
    /// Suite configuration file
    config: PathBuf,
    /// JSON report output path
    #[arg(long, default_value = "report.json")]
    out: PathBuf,
    /// CSV summary output path
    #[arg(long, default_value = "report.csv")]
    csv: PathBuf,
    /// Override the configured parallelism degree
    #[arg(long)]
    jobs: Option<usize>,
}

fn resolve_precision(flag: Option<u32>) -> u32 {
    flag.or_else(|| {
        std::env::var(PRECISION_ENV)
            .ok()
            .and_then(|v| v.parse().ok())
    })
    .unwrap_or(DEFAULT_PRECISION)
}

fn parse_i32_list(s: &str, what: &str) -> Result<Vec<i32>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<i32>()
                .map_err(|e| Error::invalid(format!("bad {what} entry {p:?}: {e}")))
        })
        .collect()
}

fn parse_u32_list(s: &str, what: &str) -> Result<Vec<u32>, Error> {
    s.split(',')
        .map(|p| {
            p.trim()
                .parse::<u32>()
                .map_err(|e| Error::invalid(format!("bad {what} entry {p:?}: {e}")))
        })
        .collect()
}

fn need<'a, T>(opt: &'a Option<T>, flag: &str, ctx: &str) -> Result<&'a T, Error> {
    opt.as_ref()
        .ok_or_else(|| Error::invalid(format!("{ctx} requires --{flag}")))
}

fn run_eval(cmd: &EvalCmd) -> Result<EvalResult, Error> {
    let prec = resolve_precision(cmd.precision);
    let params = cmd.params.build(prec)?;
    let mut opts = EvalOptions {
        precision: prec,
        m_max: cmd.m_max.unwrap_or(1 << 20),
        tol: cmd.tol,
    };

    if let Some(path) = &cmd.spec_file {
        let text = std::fs::read_to_string(path)?;
        let spec: SeriesSpec = serde_json::from_str(&text)?;
        return eval_dp(&spec, &params, &opts);
    }

    let series = need(&cmd.series, "series", "eval")?.as_str();
    let get_index = || -> Result<Index, Error> {
        need(&cmd.index, "index", "this series")?.parse()
    };
    match series {
        "t" | "tstar" => {
            if cmd.m_max.is_none() {
                opts.m_max = T_DEFAULT_M_MAX;
            }
            let index = get_index()?;
            if series == "t" {
                eval_t(&index, &params, &opts)
            } else {
                eval_tstar(&index, &params, &opts)
            }
        }
        _ => {
            let spec = match series {
                "zi" => spec_z_i(&get_index()?)?,
                "zii" => spec_z_ii(&get_index()?)?,
                "zstar-i" => spec_zstar_i(&get_index()?)?,
                "zstar-i3" => spec_zstar_i3(&get_index()?)?,
                "z-single" => spec_z_single(
                    *need(&cmd.a, "a", "z-single")?,
                    *need(&cmd.b, "b", "z-single")?,
                )?,
                "z3-single" => spec_z3_single(
                    *need(&cmd.a, "a", "z3-single")?,
                    *need(&cmd.b, "b", "z3-single")?,
                    *need(&cmd.c, "c", "z3-single")?,
                )?,
                "zr" => {
                    let r = parse_u32_list(need(&cmd.r_vec, "r-vec", "zr")?, "r-vec")?;
                    let a = parse_i32_list(need(&cmd.a_vec, "a-vec", "zr")?, "a-vec")?;
                    let b = parse_i32_list(need(&cmd.b_vec, "b-vec", "zr")?, "b-vec")?;
                    spec_zr(&r, &a, &b)?
                }
                other => {
                    return Err(Error::invalid(format!(
                        "unknown series {other:?}; expected zi | zii | zstar-i | z-single | zr | zstar-i3 | z3-single | t | tstar"
                    )))
                }
            };
            eval_dp(&spec, &params, &opts)
        }
    }
}

fn print_eval(result: &EvalResult, json: bool) {
    if json {
        let doc = serde_json::json!({
            "value": format_real(&result.value),
            "err_estimate": format_real(&result.err_estimate),
            "m_final": result.m_final,
            "accelerated": result.accelerated,
            "converged": result.converged,
        });
        println!("{}", serde_json::to_string_pretty(&doc).expect("json"));
    } else {
        println!("value        = {}", format_real(&result.value));
        println!("err_estimate = {}", format_real(&result.err_estimate));
        println!("m_final      = {}", result.m_final);
        println!("converged    = {}", result.converged);
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Convergence(_) => 3,
        _ => 2,
    }
}

fn cmd_eval(cmd: &EvalCmd) -> u8 {
    match run_eval(cmd) {
        Ok(result) => {
            print_eval(&result, cmd.json);
            if result.converged {
                0
            } else {
                3
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_verify(cmd: &VerifyCmd) -> u8 {
    if cmd.list {
        for id in RELATION_IDS {
            println!("{id}");
        }
        return 0;
    }
    let run = || -> Result<mzlab::RelationReport, Error> {
        let prec = resolve_precision(cmd.precision);
        let params = cmd.params.build(prec)?;
        let opts = EvalOptions {
            precision: prec,
            m_max: cmd.m_max.unwrap_or(1 << 20),
            tol: cmd.tol / 100.0,
        };
        let mut args = RelationArgs {
            k: cmd.k,
            n: cmd.n,
            m: cmd.m,
            r: cmd.r,
            s: cmd.s,
            ..Default::default()
        };
        if let Some(ix) = &cmd.index {
            args.index = Some(ix.parse()?);
        }
        if let Some(ix) = &cmd.indexk {
            args.index = Some(ix.parse()?);
        }
        if let Some(ix) = &cmd.indexl {
            args.index2 = Some(ix.parse()?);
        }
        let id = cmd.relation.as_deref().expect("required by clap");
        run_relation(id, &args, &params, cmd.tol, &opts)
    };
    match run() {
        Ok(report) => {
            if cmd.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report.to_doc()).expect("json")
                );
            } else {
                print!("{}", render_text(&report));
            }
            if report.inconclusive {
                3
            } else if report.pass {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn cmd_suite(cmd: &SuiteCmd) -> u8 {
    let run = || -> Result<mzlab::ReportDocument, Error> {
        let mut cfg = mzlab::suite::SuiteConfig::load(&cmd.config)?;
        if let Some(jobs) = cmd.jobs {
            cfg.jobs = jobs;
        }
        let (doc, _) = mzlab::suite::run_suite(&cfg)?;
        std::fs::write(&cmd.out, doc.to_json()?)?;
        let mut csv = Vec::new();
        doc.write_csv(&mut csv)?;
        std::fs::write(&cmd.csv, csv)?;
        Ok(doc)
    };
    match run() {
        Ok(doc) => {
            println!(
                "{} pass, {} fail, {} inconclusive in {:.1}s -> {} / {}",
                doc.summary.pass,
                doc.summary.fail,
                doc.summary.inconclusive,
                doc.total_wall_time_s,
                cmd.out.display(),
                cmd.csv.display()
            );
            if doc.summary.fail == 0 && doc.summary.inconclusive == 0 {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match &cli.command {
        Command::Eval(cmd) => cmd_eval(cmd),
        Command::Verify(cmd) => cmd_verify(cmd),
        Command::Suite(cmd) => cmd_suite(cmd),
    };
    ExitCode::from(code)
}
