use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qdecouple::bounds::{auto_size_bits, bound_report, tripartite_entropies, ExpBase};
use qdecouple::entropy::{renyi_conditional_detailed, EntropyParams, Minimizer};
use qdecouple::harness::config::parse_state_source;
use qdecouple::harness::sweep::random_qubit_state;
use qdecouple::harness::{render, run_sweep, verify_acceptance, OutputFormat, StateSource, SweepConfig};
use qdecouple::states::format::read_state_file;
use qdecouple::states::DensityOperator;

/// Decoupling-protocol simulator: entropies, bounds, seeded sweeps and the
/// acceptance checks.
#[derive(Parser, Debug)]
#[command(name = "qdecouple", version)]
struct Cli {
    /// Master seed (overrides the config file).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output format: csv or json.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Sweep configuration file (flat key = value).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct StateArgs {
    /// ghz, max-entangled-AR, product, random or file:PATH
    #[arg(long, default_value = "ghz")]
    state: String,
    /// Rank of a random state.
    #[arg(long, default_value_t = 8)]
    rank: usize,
    /// Seed of a random state; defaults to --seed, then 0.
    #[arg(long)]
    state_seed: Option<u64>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Conditional Rényi entropy H_α(A|C) of a state.
    Entropy {
        #[command(flatten)]
        state: StateArgs,
        /// Comma-separated labels of the system whose entropy is taken.
        #[arg(long, default_value = "A")]
        system: String,
        /// Comma-separated conditioning labels (empty for none).
        #[arg(long, default_value = "B")]
        given: String,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
    },
    /// Closed-form bounds and rates at one parameter point.
    Bounds {
        #[command(flatten)]
        state: StateArgs,
        #[arg(long, default_value_t = 1)]
        n: usize,
        #[arg(long, default_value_t = 2.0)]
        alpha: f64,
        #[arg(long, default_value_t = 0.1)]
        delta: f64,
        /// log₂|F|; automatic when omitted.
        #[arg(long)]
        log2_f: Option<f64>,
        /// log₂ M; automatic when omitted.
        #[arg(long)]
        log2_m: Option<f64>,
        /// Base of the exponential: two or natural.
        #[arg(long, default_value = "two")]
        base: String,
    },
    /// Run the sweep described by --config.
    Run,
    /// Run the acceptance checks; exits non-zero if any fails.
    Accept,
}

fn load_state(args: &StateArgs, seed: Option<u64>) -> Result<DensityOperator> {
    let source = parse_state_source(&args.state, args.rank, args.state_seed.or(seed)).map_err(|e| anyhow!(e))?;
    Ok(match source {
        StateSource::Builtin(b) => b.state(),
        StateSource::Random { rank, seed } => random_qubit_state(rank, seed.unwrap_or(0))?,
        StateSource::File(p) => read_state_file(&p)
            .with_context(|| format!("reading {}", p.display()))?
            .into_density(),
    })
}

fn labels(s: &str) -> Vec<&str> {
    s.split(',').map(str::trim).filter(|x| !x.is_empty()).collect()
}

fn format_of(cli: &Cli, default: OutputFormat) -> Result<OutputFormat> {
    cli.format
        .as_deref()
        .map(|f| f.parse::<OutputFormat>())
        .transpose()
        .map_err(|e| anyhow!(e))
        .map(|f| f.unwrap_or(default))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Result<()> {
    match out {
        Some(p) => fs::write(p, bytes).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(bytes)?;
            Ok(stdout.flush()?)
        }
    }
}

fn key_values(pairs: &[(&str, String)], format: OutputFormat) -> Vec<u8> {
    match format {
        OutputFormat::Csv => {
            let mut s = String::from("key,value\n");
            for (k, v) in pairs {
                s.push_str(&format!("{k},{v}\n"));
            }
            s.into_bytes()
        }
        OutputFormat::Json => {
            let map: serde_json::Map<String, serde_json::Value> =
                pairs.iter().map(|(k, v)| (k.to_string(), json_value(v))).collect();
            let mut b = serde_json::to_vec_pretty(&map).expect("map serializes");
            b.push(b'\n');
            b
        }
    }
}

fn json_value(v: &str) -> serde_json::Value {
    if let Ok(i) = v.parse::<i64>() {
        return json!(i);
    }
    match v.parse::<f64>() {
        Ok(x) if x.is_finite() => json!(x),
        _ => match v {
            "true" => json!(true),
            "false" => json!(false),
            _ => json!(v),
        },
    }
}

fn run(cli: &Cli) -> Result<ExitCode> {
    match &cli.command {
        Command::Entropy {
            state,
            system,
            given,
            alpha,
        } => {
            let rho = load_state(state, cli.seed)?;
            let params = if *alpha == 1.0 { EntropyParams::von_neumann() } else { EntropyParams::new(*alpha)? };
            let out = renyi_conditional_detailed(&rho, &labels(system), &labels(given), &params)?;
            let method = match out.method {
                Minimizer::ClosedForm => "closed_form",
                Minimizer::FixedPoint => "fixed_point",
                Minimizer::Simplex => "simplex",
            };
            let pairs = [
                ("alpha", format!("{alpha}")),
                ("system", system.clone()),
                ("given", given.clone()),
                ("value", format!("{}", out.value)),
                ("method", method.to_string()),
                ("iterations", out.iterations.to_string()),
                ("residual", format!("{}", out.residual)),
            ];
            emit(cli.out.as_deref(), &key_values(&pairs, format_of(cli, OutputFormat::Csv)?))?;
        }
        Command::Bounds {
            state,
            n,
            alpha,
            delta,
            log2_f,
            log2_m,
            base,
        } => {
            let rho = load_state(state, cli.seed)?;
            let base = ExpBase::parse(base).ok_or_else(|| anyhow!("unknown base `{base}`"))?;
            let ent = tripartite_entropies(&rho, &EntropyParams::new(*alpha)?)?;
            let auto = auto_size_bits(*n, ent.dims, ent.h_tilde_a_given_b, ent.h_alpha_a_given_br, *delta);
            let f = log2_f.unwrap_or(auto.log2_f);
            let m = log2_m.unwrap_or(auto.log2_m);
            let r = bound_report(&ent, *n, *delta, f, m, base)?;
            let format = format_of(cli, OutputFormat::Json)?;
            let bytes = match format {
                OutputFormat::Json => {
                    let mut b = serde_json::to_vec_pretty(&r)?;
                    b.push(b'\n');
                    b
                }
                OutputFormat::Csv => {
                    let value = serde_json::to_value(&r)?;
                    let obj = value.as_object().expect("struct serializes to an object");
                    let pairs: Vec<(&str, String)> = obj
                        .iter()
                        .map(|(k, v)| {
                            let s = match v {
                                serde_json::Value::String(s) => s.clone(),
                                serde_json::Value::Object(o) => o
                                    .iter()
                                    .map(|(k, v)| format!("{k}={v}"))
                                    .collect::<Vec<_>>()
                                    .join(" "),
                                other => other.to_string(),
                            };
                            (k.as_str(), s)
                        })
                        .collect();
                    key_values(&pairs, OutputFormat::Csv)
                }
            };
            emit(cli.out.as_deref(), &bytes)?;
        }
        Command::Run => {
            let path = cli.config.as_ref().ok_or_else(|| anyhow!("run needs --config PATH"))?;
            let mut cfg = SweepConfig::from_file(path).with_context(|| format!("loading {}", path.display()))?;
            if let Some(s) = cli.seed {
                cfg.master_seed = s;
            }
            if cli.format.is_some() {
                cfg.format = format_of(cli, cfg.format)?;
            }
            if let Some(o) = &cli.out {
                cfg.output = Some(o.clone());
            }
            let records = run_sweep(&cfg)?;
            let bytes = render(&records, cfg.format)?;
            emit(cfg.output.as_deref(), &bytes)?;
            let failed = records.iter().filter(|r| r.error.is_some()).count();
            if failed > 0 {
                eprintln!("{failed} of {} runs failed", records.len());
            }
        }
        Command::Accept => {
            if cli.config.is_some() {
                bail!("accept takes no configuration");
            }
            let report = verify_acceptance();
            let text = match format_of(cli, OutputFormat::Csv)? {
                OutputFormat::Json => {
                    let mut b = serde_json::to_vec_pretty(&report)?;
                    b.push(b'\n');
                    b
                }
                OutputFormat::Csv => format!("{report}\n").into_bytes(),
            };
            emit(cli.out.as_deref(), &text)?;
            if !report.passed() {
                return Ok(ExitCode::FAILURE);
            }
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
