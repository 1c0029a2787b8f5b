use std::fs::OpenOptions;
use std::io::{BufWriter, Read, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::Value;

use kronstab::census::{run_census, CensusConfig};
use kronstab::degeneracy::{degeneracy_dimension, filtration_indices, Strategy};
use kronstab::fixtures::{fixture, FAMILIES};
use kronstab::git::{git_verdict, git_verdict_probabilistic};
use kronstab::homology::{
    ext_dimensions, hoppe_criterion, mu_stability_verdict, stabilizer_dimension,
};
use kronstab::json::{from_json, to_json};
use kronstab::model::KroneckerMap;
use kronstab::report::{classify, Options};
use kronstab::Error;

const EXIT_VIOLATION: u8 = 1;
const EXIT_INPUT: u8 = 2;

#[derive(Parser)]
#[command(
    name = "kronstab",
    version,
    about = "Stability of Kronecker presentations on projective space"
)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Map as JSON; `-` reads stdin.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Named fixture instead of --input (see `fixture --list`).
    #[arg(long, global = true)]
    fixture: Option<String>,
    /// Prime for the F_p methods.
    #[arg(long, global = true)]
    prime: Option<u32>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[arg(long, global = true, default_value_t = 7)]
    trials: usize,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Cmd {
    /// GIT stability verdict; exit 0 stable, 10 strictly semistable, 11 unstable.
    Stability {
        /// Decide over F_p (required for k >= 3).
        #[arg(long)]
        probabilistic: bool,
    },
    /// Dimension of the degeneracy locus.
    Degeneracy {
        #[arg(long, value_enum, default_value_t = StrategyArg::Auto)]
        strategy: StrategyArg,
    },
    /// The indices sigma and tau.
    Filtration,
    /// H^0 of the normalized reflexive exterior powers.
    Hoppe,
    /// Slope stability of the cokernel sheaf.
    Mustab,
    /// Everything, with consistency checks.
    Classify,
    /// Hom, Ext^1, Ext^2 and the stabilizer dimension.
    Ext,
    /// Random census with JSONL records.
    Census {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Append records here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Skip the sheaf-side checks.
        #[arg(long)]
        skip_mu: bool,
    },
    /// List fixtures or print one as JSON.
    Fixture {
        #[arg(long, conflicts_with = "emit")]
        list: bool,
        #[arg(long)]
        emit: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    Auto,
    Exact,
    Enumeration,
    Slicing,
}

impl From<StrategyArg> for Strategy {
    fn from(s: StrategyArg) -> Self {
        match s {
            StrategyArg::Auto => Strategy::Auto,
            StrategyArg::Exact => Strategy::Exact,
            StrategyArg::Enumeration => Strategy::Enumeration,
            StrategyArg::Slicing => Strategy::Slicing,
        }
    }
}

/// An input or precondition error, reported with exit code 2.
struct Failure(String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure(e.to_string())
    }
}

fn load(g: &Global) -> Result<KroneckerMap, Failure> {
    match (&g.input, &g.fixture) {
        (Some(_), Some(_)) => Err(Failure("give either --input or --fixture, not both".into())),
        (None, None) => Err(Failure(
            "a map is required: --input PATH or --fixture ID".into(),
        )),
        (None, Some(id)) => Ok(fixture(id)?),
        (Some(path), None) => {
            let mut text = String::new();
            let read = if path.as_os_str() == "-" {
                std::io::stdin().read_to_string(&mut text).map(|_| ())
            } else {
                std::fs::read_to_string(path).map(|t| text = t)
            };
            read.map_err(|e| Failure(format!("{}: {e}", path.display())))?;
            Ok(from_json(&text)?)
        }
    }
}

fn render(v: &Value, indent: usize, out: &mut String) {
    let pad = "  ".repeat(indent);
    match v {
        Value::Object(map) => {
            for (k, val) in map {
                match val {
                    Value::Object(o) if !o.is_empty() => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        render(val, indent + 1, out);
                    }
                    Value::Array(items) if items.iter().any(Value::is_object) => {
                        out.push_str(&format!("{pad}{k}:\n"));
                        for item in items {
                            out.push_str(&format!("{pad}  -\n"));
                            render(item, indent + 2, out);
                        }
                    }
                    Value::String(s) => out.push_str(&format!("{pad}{k}: {s}\n")),
                    other => out.push_str(&format!("{pad}{k}: {other}\n")),
                }
            }
        }
        other => out.push_str(&format!("{pad}{other}\n")),
    }
}

fn emit<T: Serialize>(g: &Global, value: &T) {
    let v = serde_json::to_value(value).expect("reports serialize");
    let text = if g.json {
        serde_json::to_string_pretty(&v).expect("reports serialize") + "\n"
    } else {
        let mut s = String::new();
        render(&v, 0, &mut s);
        s
    };
    // A closed pipe downstream is not an error worth reporting.
    let _ = std::io::stdout().lock().write_all(text.as_bytes());
}

fn run(cli: Cli) -> Result<u8, Failure> {
    let g = &cli.global;
    let opts = Options {
        prime: g.prime,
        trials: g.trials,
        seed: g.seed,
    };
    match cli.cmd {
        Cmd::Stability { probabilistic } => {
            let a = load(g)?;
            let v = if probabilistic || a.dims().k != 2 {
                git_verdict_probabilistic(&a, opts.git_prime(), g.trials, g.seed)?
            } else {
                git_verdict(&a)?
            };
            emit(g, &v);
            Ok(v.status.exit_code() as u8)
        }
        Cmd::Degeneracy { strategy } => {
            let a = load(g)?;
            emit(
                g,
                &degeneracy_dimension(
                    &a,
                    opts.degeneracy_prime(),
                    strategy.into(),
                    g.trials,
                    g.seed,
                )?,
            );
            Ok(0)
        }
        Cmd::Filtration => {
            let a = load(g)?;
            emit(
                g,
                &filtration_indices(&a, opts.degeneracy_prime(), g.trials, g.seed)?,
            );
            Ok(0)
        }
        Cmd::Hoppe => {
            let a = load(g)?;
            emit(g, &hoppe_criterion(&a)?);
            Ok(0)
        }
        Cmd::Mustab => {
            let a = load(g)?;
            emit(
                g,
                &mu_stability_verdict(&a, opts.degeneracy_prime(), g.trials, g.seed)?,
            );
            Ok(0)
        }
        Cmd::Classify => {
            let a = load(g)?;
            let r = classify(&a, &opts);
            emit(g, &r);
            Ok(if r.failures().next().is_some() {
                EXIT_VIOLATION
            } else {
                0
            })
        }
        Cmd::Ext => {
            let a = load(g)?;
            #[derive(Serialize)]
            struct ExtReport {
                #[serde(flatten)]
                ext: kronstab::homology::ExtDimensions,
                stabilizer_dim: usize,
            }
            emit(
                g,
                &ExtReport {
                    ext: ext_dimensions(&a)?,
                    stabilizer_dim: stabilizer_dimension(&a)?,
                },
            );
            Ok(0)
        }
        Cmd::Census {
            n,
            m,
            count,
            out,
            skip_mu,
        } => {
            let cfg = CensusConfig {
                n,
                m,
                count,
                seed: g.seed,
                prime: opts.degeneracy_prime(),
                trials: g.trials,
                skip_mu,
            };
            let mut file = match &out {
                Some(path) => Some(BufWriter::new(
                    OpenOptions::new()
                        .create(true)
                        .append(true)
                        .open(path)
                        .map_err(|e| Failure(format!("{}: {e}", path.display())))?,
                )),
                None => None,
            };
            let summary = run_census(&cfg, |rec| {
                if let Some(f) = file.as_mut() {
                    serde_json::to_writer(&mut *f, rec)?;
                    f.write_all(b"\n")?;
                    f.flush()?;
                }
                Ok(())
            })?;
            emit(g, &summary);
            Ok(if summary.violations.is_empty() {
                0
            } else {
                EXIT_VIOLATION
            })
        }
        Cmd::Fixture { list, emit: id } => {
            if list {
                for (name, about) in FAMILIES {
                    println!("{name:<22} {about}");
                }
                return Ok(0);
            }
            let id = id.ok_or_else(|| Failure("fixture needs --list or --emit ID".into()))?;
            println!("{}", to_json(&fixture(&id)?));
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
