//! Command-line front end. [`run`] takes the argument list and output streams
//! so it can be driven from tests as well as from the `rank2` binary.

use std::ffi::OsString;
use std::io::Write;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use crate::ccmap::{CCMap, VertexClass};
use crate::error::Error;
use crate::quiver::{DimensionVector, EulerSolver, ModuleSpec};
use crate::rank2::{ClusterAlgebra, ExchangeType, SweepChecks};
use crate::report::CheckReport;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_INCONCLUSIVE: i32 = 3;

/// Environment variable consulted when `--seed` is absent.
pub const SEED_ENV: &str = "RANK2_SEED";

#[derive(Parser, Debug)]
#[command(name = "rank2", version, about = "Rank-two cluster variables, exactly and via quiver representations")]
struct Cli {
    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone, Copy)]
struct TypeArgs {
    #[arg(long, allow_hyphen_values = true)]
    b: i64,
    #[arg(long, allow_hyphen_values = true)]
    c: i64,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Cluster variable x_k in the initial cluster (x1, x2).
    Var {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
    },
    /// x_k in the cluster (x_m, x_{m+1}), written in y1 = x_m, y2 = x_{m+1}.
    Expand {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        #[arg(long, allow_hyphen_values = true)]
        m: i64,
    },
    /// Check positivity, exact division and denominator growth over a range.
    Sweep {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true, default_value_t = -6)]
        k_min: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 8)]
        k_max: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = -3)]
        m_min: i64,
        #[arg(long, allow_hyphen_values = true, default_value_t = 3)]
        m_max: i64,
        #[arg(long, value_enum, value_delimiter = ',', default_value = "positivity,laurent")]
        check: Vec<SweepCheck>,
        /// Report items predicted to exceed this many terms as inconclusive.
        #[arg(long)]
        max_terms: Option<u64>,
    },
    /// Smallest period of the sequence x_k, if at most --max.
    Period {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long)]
        max: u32,
    },
    /// Caldero-Chapoton character of the object attached to index k.
    Ccmap {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        k: i64,
        /// Also print the folded character.
        #[arg(long)]
        fold: bool,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Compare folded characters with the recurrence for k in a range.
    Verify {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, allow_hyphen_values = true)]
        k_min: i64,
        #[arg(long, allow_hyphen_values = true)]
        k_max: i64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Check the exchange relation between shifts s and s+1 of a class.
    Exchange {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long = "class")]
        class: String,
        #[arg(long, allow_hyphen_values = true)]
        s: i64,
        #[arg(long)]
        seed: Option<u64>,
    },
    /// Euler characteristic of a quiver Grassmannian Gr_e(M).
    Euler {
        #[command(flatten)]
        ty: TypeArgs,
        #[arg(long, value_enum)]
        module: ModuleKind,
        /// 1-based vertex index within the module's class.
        #[arg(long, default_value_t = 1)]
        index: usize,
        /// Dimension vector of a generic module.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        dim: Option<Vec<i64>>,
        /// Submodule dimension vector e.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        sub: Vec<i64>,
        #[arg(long)]
        seed: Option<u64>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum SweepCheck {
    Positivity,
    Laurent,
    Denominator,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModuleKind {
    #[value(name = "Pv")]
    Pv,
    #[value(name = "Pw")]
    Pw,
    #[value(name = "Iv")]
    Iv,
    #[value(name = "Iw")]
    Iw,
    #[value(name = "Sv")]
    Sv,
    #[value(name = "Sw")]
    Sw,
    #[value(name = "generic")]
    Generic,
}

/// What a subcommand produced before formatting.
struct Outcome {
    command: &'static str,
    text: Vec<String>,
    results: Vec<Value>,
    report: Option<CheckReport>,
}

impl Outcome {
    fn new(command: &'static str) -> Self {
        Outcome {
            command,
            text: Vec::new(),
            results: Vec::new(),
            report: None,
        }
    }

    fn exit_code(&self) -> i32 {
        match &self.report {
            Some(r) if r.has_failures() => EXIT_FAILED,
            Some(r) if r.has_inconclusive() => EXIT_INCONCLUSIVE,
            _ => EXIT_OK,
        }
    }
}

fn error_exit_code(e: &Error) -> i32 {
    if e.is_inconclusive() {
        EXIT_INCONCLUSIVE
    } else {
        match e {
            Error::NotDivisible => EXIT_FAILED,
            _ => EXIT_USAGE,
        }
    }
}

fn resolve_seed(seed: Option<u64>) -> Result<u64, Error> {
    if let Some(s) = seed {
        return Ok(s);
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("{SEED_ENV}={v} is not a 64-bit unsigned integer"))),
        Err(_) => Ok(0),
    }
}

fn exchange_type(ty: TypeArgs) -> Result<ExchangeType, Error> {
    ExchangeType::new(ty.b, ty.c)
}

fn execute(command: Command) -> Result<Outcome, Error> {
    match command {
        Command::Var { ty, k } => {
            let p = ClusterAlgebra::new(exchange_type(ty)?).cluster_variable(k)?;
            let mut out = Outcome::new("var");
            out.text.push(p.to_string());
            out.results.push(p.to_json_value());
            Ok(out)
        }
        Command::Expand { ty, k, m } => {
            let p = ClusterAlgebra::new(exchange_type(ty)?).expand_in_cluster(k, m)?;
            let mut out = Outcome::new("expand");
            out.text.push(p.to_string());
            out.results.push(p.to_json_value());
            Ok(out)
        }
        Command::Sweep {
            ty,
            k_min,
            k_max,
            m_min,
            m_max,
            check,
            max_terms,
        } => {
            if k_min > k_max || m_min > m_max {
                return Err(Error::Parse("empty sweep range".into()));
            }
            let mut checks = SweepChecks {
                positivity: check.contains(&SweepCheck::Positivity),
                laurent: check.contains(&SweepCheck::Laurent),
                denominator: check.contains(&SweepCheck::Denominator),
                max_terms: None,
            };
            checks.max_terms = max_terms;
            let report = ClusterAlgebra::new(exchange_type(ty)?).sweep(k_min..=k_max, m_min..=m_max, checks);
            let mut out = Outcome::new("sweep");
            out.report = Some(report);
            Ok(out)
        }
        Command::Period { ty, max } => {
            let period = ClusterAlgebra::new(exchange_type(ty)?).detect_period(max)?;
            let mut out = Outcome::new("period");
            out.text.push(match period {
                Some(p) => p.to_string(),
                None => format!("none ≤ {max}"),
            });
            out.results.push(json!({ "period": period, "max": max }));
            Ok(out)
        }
        Command::Ccmap { ty, k, fold, seed } => {
            let map = CCMap::new(ty.b, ty.c, resolve_seed(seed)?)?;
            let obj = map.object_for_index(k)?;
            let x = map.cc_polynomial(&obj)?;
            let mut out = Outcome::new("ccmap");
            out.text.push(format!("object: {}", obj.label(map.quiver())));
            out.text.push(format!("X = {x}"));
            out.results.push(x.to_json_value());
            if fold {
                let folded = map.fold(&x)?;
                out.text.push(format!("fold(X) = {folded}"));
                out.results.push(folded.to_json_value());
            }
            Ok(out)
        }
        Command::Verify {
            ty,
            k_min,
            k_max,
            seed,
        } => {
            if k_min > k_max {
                return Err(Error::Parse("empty k range".into()));
            }
            let map = CCMap::new(ty.b, ty.c, resolve_seed(seed)?)?;
            let mut out = Outcome::new("verify");
            out.report = Some(map.verify_folding(k_min..=k_max));
            Ok(out)
        }
        Command::Exchange { ty, class, s, seed } => {
            let class: VertexClass = class.parse()?;
            let map = CCMap::new(ty.b, ty.c, resolve_seed(seed)?)?;
            let mut out = Outcome::new("exchange");
            out.report = Some(map.verify_exchange_relation(class, s));
            Ok(out)
        }
        Command::Euler {
            ty,
            module,
            index,
            dim,
            sub,
            seed,
        } => {
            let map = CCMap::new(ty.b, ty.c, resolve_seed(seed)?)?;
            let vertex = |class| map.vertex(class, index);
            let spec = match module {
                ModuleKind::Pv => ModuleSpec::Projective(vertex(VertexClass::V)?),
                ModuleKind::Pw => ModuleSpec::Projective(vertex(VertexClass::W)?),
                ModuleKind::Iv => ModuleSpec::Injective(vertex(VertexClass::V)?),
                ModuleKind::Iw => ModuleSpec::Injective(vertex(VertexClass::W)?),
                ModuleKind::Sv => ModuleSpec::Simple(vertex(VertexClass::V)?),
                ModuleKind::Sw => ModuleSpec::Simple(vertex(VertexClass::W)?),
                ModuleKind::Generic => {
                    let d = dim.ok_or_else(|| Error::Parse("--dim is required for a generic module".into()))?;
                    ModuleSpec::Generic(DimensionVector::new(d)?)
                }
            };
            let e = DimensionVector::new(sub)?;
            let entry = EulerSolver::new(resolve_seed(seed)?).chi(map.quiver(), &spec, &e)?;
            let mut out = Outcome::new("euler");
            out.text.push(entry.chi.to_string());
            out.results.push(serde_json::to_value(&entry).expect("serializable"));
            Ok(out)
        }
    }
}

fn render(outcome: &Outcome, json_output: bool, out: &mut dyn Write) -> std::io::Result<()> {
    if json_output {
        let value = json!({
            "command": outcome.command,
            "results": outcome.results,
            "report": outcome.report,
        });
        writeln!(out, "{}", serde_json::to_string(&value).expect("serializable"))
    } else {
        for line in &outcome.text {
            writeln!(out, "{line}")?;
        }
        if let Some(report) = &outcome.report {
            writeln!(out, "{report}")?;
        }
        Ok(())
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let rendered = e.render().to_string();
            let _ = if code == EXIT_OK {
                write!(out, "{rendered}")
            } else {
                write!(err, "{rendered}")
            };
            return code;
        }
    };
    let json_output = cli.json;
    match execute(cli.command) {
        Ok(outcome) => {
            let code = outcome.exit_code();
            if render(&outcome, json_output, out).is_err() {
                return EXIT_FAILED;
            }
            if code == EXIT_FAILED {
                if let Some(w) = outcome.report.as_ref().and_then(|r| r.witness()) {
                    let _ = writeln!(err, "counterexample: {} ({})", w.label, w.detail.as_deref().unwrap_or(""));
                }
            }
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            error_exit_code(&e)
        }
    }
}
