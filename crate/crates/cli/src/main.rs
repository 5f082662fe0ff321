use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use querybench::adversary::{build_hard_instance, evaluate_adversary, grover_relation, strongtype_report};
use querybench::harness::{report, sweep, sweep_exhaustive, text_table, Format, Generator, InstanceSpec, SweepResult};
use querybench::io::{load_adversary, load_function};
use querybench::lemma::{run_lemma_algorithm, verify_lemma_postcondition, worst_case_run, LemmaOutcome};
use querybench::measures::{block_sensitivity, certificate_complexity, deterministic_depth, inequality_chain, MeasureReport};
use querybench::model::{InputString, PartialAssignment, PartialFunction, TypeVector};
use querybench::symmetric::{classical_simulation, distinguishing_distance, estimate_type, hybrid_sequence, HiddenInput};
use querybench::{budget, Error, Result};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::Value;

#[derive(Parser)]
#[command(name = "querybench", version, about = "Exact query-complexity workbench")]
struct Cli {
    /// Enumeration budget (items).
    #[arg(long, global = true, env = "QUERYBENCH_BUDGET")]
    budget: Option<u64>,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// json, csv or table.
    #[arg(long, global = true, default_value = "json")]
    format: String,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct Source {
    /// Instance file (TOML).
    #[arg(long, conflicts_with = "gen")]
    instance: Option<PathBuf>,
    /// Generator id.
    #[arg(long)]
    gen: Option<String>,
    /// Generator parameter KEY=VALUE; repeatable.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
}

#[derive(Subcommand)]
enum Command {
    /// D, C, bs, s and the inequality chain.
    Measure(Source),
    /// Measures over many instances with scaling fits.
    Sweep {
        /// Generator id; parameters may list values `n=4,6,8`.
        #[arg(long)]
        gen: Option<String>,
        #[arg(long = "param", value_name = "KEY=VALUES")]
        params: Vec<String>,
        /// Every function on every single-type promise up to the bounds.
        #[arg(long)]
        exhaustive: bool,
        #[arg(long, default_value_t = 4)]
        max_n: usize,
        #[arg(long, default_value_t = 3)]
        max_m: usize,
        /// Instance files to include.
        #[arg(long)]
        instance: Vec<PathBuf>,
    },
    /// The certificate-structure search with postcondition check.
    Lemma {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        k: usize,
        /// Hidden input such as `1,0,2,3`; default: the first input giving a structure.
        #[arg(long)]
        input: Option<String>,
        /// Check the structure against every consistent input.
        #[arg(long)]
        verify: bool,
    },
    #[command(subcommand)]
    Adversary(AdversaryCommand),
    /// Least distance between differently-valued types.
    Distance(Source),
    /// Estimate a hidden input's type by sampling.
    SampleType {
        #[arg(long)]
        input: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        d: u32,
    },
    /// Hybrid sequence between two types such as `5,3,2`.
    Hybrid {
        #[arg(long)]
        from: String,
        #[arg(long)]
        to: String,
    },
    /// Classical simulation on a hidden input.
    Simulate {
        #[command(flatten)]
        source: Source,
        #[arg(long)]
        input: String,
        /// Query budget per examination; default D(f).
        #[arg(long)]
        alpha: Option<u32>,
        #[arg(long)]
        d: u32,
        #[arg(long)]
        reduce: bool,
    },
}

#[derive(Subcommand)]
enum AdversaryCommand {
    /// Evaluate an adversary instance file.
    Evaluate {
        #[arg(long)]
        file: PathBuf,
    },
    /// Input against its sensitive-block witnesses.
    Grover(Source),
    /// Hard instance from a certificate-structure run.
    Build {
        #[command(flatten)]
        source: Source,
        /// Size bound of the construction.
        #[arg(long)]
        k: usize,
        /// Certificate size bound; default C(f), which needs n <= 63.
        #[arg(long)]
        c: Option<usize>,
        /// Size bound for the structure search; default the certificate bound.
        #[arg(long)]
        lemma_k: Option<usize>,
        #[arg(long)]
        input: Option<String>,
    },
    /// beta and the derived lower bounds from D and C.
    Strongtype {
        #[command(flatten)]
        source: Source,
        #[arg(long, requires = "c")]
        d: Option<u32>,
        #[arg(long, requires = "d")]
        c: Option<usize>,
    },
}

fn parse_kv(items: &[String]) -> Result<BTreeMap<String, String>> {
    items
        .iter()
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::InvalidParameters(format!("expected KEY=VALUE, got `{kv}`")))
        })
        .collect()
}

fn load(source: &Source) -> Result<PartialFunction> {
    match (&source.instance, &source.gen) {
        (Some(path), _) => load_function(path),
        (None, Some(id)) => {
            let generator = Generator::from_params(id, &parse_kv(&source.params)?)?;
            querybench::harness::generate(&InstanceSpec::new(id.clone(), generator))
        }
        (None, None) => Err(Error::InvalidParameters("give --instance FILE or --gen NAME".into())),
    }
}

fn parse_input(text: &str) -> Result<InputString> {
    let p = PartialAssignment::parse(text)?;
    let entries: Option<Vec<_>> = p.0.into_iter().collect();
    entries.map(InputString).ok_or_else(|| Error::InvalidInput(format!("`{text}` has unset entries")))
}

fn parse_type(text: &str) -> Result<TypeVector> {
    text.split(',')
        .map(|v| v.trim().parse().map_err(|_| Error::InvalidInput(format!("bad type `{text}`"))))
        .collect::<Result<Vec<u32>>>()
        .map(TypeVector)
}

/// Top-level fields as `key`, compact-JSON `value` pairs.
fn flatten(value: &Value) -> Vec<(String, String)> {
    match value {
        Value::Object(map) => map
            .iter()
            .map(|(k, v)| {
                let text = match v {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                };
                (k.clone(), text)
            })
            .collect(),
        other => vec![("value".into(), other.to_string())],
    }
}

fn render<T: Serialize>(value: &T, format: Format) -> Result<String> {
    let json = serde_json::to_value(value).map_err(|e| Error::Parse(e.to_string()))?;
    match format {
        Format::Json => serde_json::to_string_pretty(&json).map_err(|e| Error::Parse(e.to_string())),
        Format::Table => {
            let rows: Vec<Vec<String>> = flatten(&json).into_iter().map(|(k, v)| vec![k, v]).collect();
            Ok(text_table(&["field", "value"], &rows))
        }
        Format::Csv => {
            let mut out = String::from("field,value\n");
            for (k, v) in flatten(&json) {
                out += &format!("{k},\"{}\"\n", v.replace('"', "\"\""));
            }
            Ok(out)
        }
    }
}

fn render_measure(r: &MeasureReport, format: Format) -> Result<String> {
    let header = ["input", "value", "C_x", "bs_x", "s_x", "certificate"];
    let rows: Vec<Vec<String>> = r
        .per_input
        .iter()
        .map(|row| {
            vec![
                row.input.to_string(),
                u8::from(row.value).to_string(),
                row.c.to_string(),
                row.bs.to_string(),
                row.s.to_string(),
                row.certificate.to_string(),
            ]
        })
        .collect();
    match format {
        Format::Json => render(r, format),
        Format::Csv => {
            let mut out = header.join(",") + "\n";
            for row in rows {
                out += &row.iter().map(|c| format!("\"{c}\"")).collect::<Vec<_>>().join(",");
                out += "\n";
            }
            Ok(out)
        }
        Format::Table => {
            let mut out = format!(
                "n = {}, M = {}, D = {}, C = {}, bs = {}, s = {}\n\n",
                r.n, r.m, r.d, r.c, r.bs, r.s
            );
            out += &text_table(&header, &rows);
            for a in &r.anomalies {
                out += &format!("anomaly: {a}\n");
            }
            Ok(out)
        }
    }
}

/// Cartesian product of comma-separated parameter values.
fn expand_params(params: &BTreeMap<String, String>) -> Vec<BTreeMap<String, String>> {
    let mut out = vec![BTreeMap::new()];
    for (k, vs) in params {
        let values: Vec<&str> = if k == "types" { vec![vs.as_str()] } else { vs.split(',').collect() };
        out = out
            .into_iter()
            .flat_map(|base| {
                values.iter().map(move |v| {
                    let mut m = base.clone();
                    m.insert(k.clone(), v.trim().to_string());
                    m
                })
            })
            .collect();
    }
    out
}

struct Outcome {
    text: String,
    /// Exit with 2 after writing the report.
    violation: bool,
}

fn ok(text: String) -> Result<Outcome> {
    Ok(Outcome { text, violation: false })
}

fn run(cli: &Cli, format: Format) -> Result<Outcome> {
    let mut rng = ChaCha8Rng::seed_from_u64(cli.seed);
    match &cli.command {
        Command::Measure(source) => {
            let f = load(source)?;
            ok(render_measure(&inequality_chain(&f)?, format)?)
        }
        Command::Sweep { gen, params, exhaustive, max_n, max_m, instance } => {
            let mut result = if *exhaustive { sweep_exhaustive(*max_n, *max_m)? } else { SweepResult::default() };
            let mut specs = Vec::new();
            if let Some(id) = gen {
                for p in expand_params(&parse_kv(params)?) {
                    let name = format!(
                        "{id}({})",
                        p.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(",")
                    );
                    specs.push(InstanceSpec::new(name, Generator::from_params(id, &p)?));
                }
            }
            for path in instance {
                specs.push(InstanceSpec::new(path.display().to_string(), Generator::ExplicitFile { path: path.clone() }));
            }
            if !specs.is_empty() {
                let more = sweep(&specs);
                if *exhaustive {
                    result.rows.extend(more.rows);
                    result.violations.extend(more.violations);
                    result.fits = more.fits;
                } else {
                    result = more;
                }
            }
            let violation = !result.violations.is_empty();
            Ok(Outcome { text: report(&result, format)?, violation })
        }
        Command::Lemma { source, k, input, verify } => {
            let f = load(source)?;
            let run = match input {
                Some(x) => run_lemma_algorithm(&f, *k, &parse_input(x)?)?,
                None => worst_case_run(&f, *k)?,
            };
            let mut doc = serde_json::to_value(&run).map_err(|e| Error::Parse(e.to_string()))?;
            let mut violation = false;
            if *verify {
                if let LemmaOutcome::Structure { p, s } = &run.outcome {
                    let found = verify_lemma_postcondition(&f, *k, p, s)?;
                    violation = found.is_some();
                    doc["postcondition_violation"] = serde_json::to_value(&found).unwrap();
                }
            }
            Ok(Outcome { text: render(&doc, format)?, violation })
        }
        Command::Adversary(cmd) => match cmd {
            AdversaryCommand::Evaluate { file } => ok(render(&evaluate_adversary(&load_adversary(file)?)?, format)?),
            AdversaryCommand::Grover(source) => {
                let f = load(source)?;
                let (_, _, blocks) = block_sensitivity(&f)?;
                let instance = grover_relation(&f, &blocks)?;
                let bound = evaluate_adversary(&instance)?;
                ok(render(&serde_json::json!({ "instance": instance, "bound": bound }), format)?)
            }
            AdversaryCommand::Build { source, k, c, lemma_k, input } => {
                let f = load(source)?;
                let c = match c {
                    Some(c) => *c,
                    None => certificate_complexity(&f)?.0,
                };
                let lk = lemma_k.unwrap_or(c.max(1));
                let run = match input {
                    Some(x) => run_lemma_algorithm(&f, lk, &parse_input(x)?)?,
                    None => worst_case_run(&f, lk)?,
                };
                let LemmaOutcome::Structure { p, s } = &run.outcome else {
                    return Err(Error::InvalidInput("the structure search determined f(x); no (p, S)".into()));
                };
                let built = build_hard_instance(&f, p, s, *k, c)?;
                let bound = evaluate_adversary(&built.instance)?;
                ok(render(&serde_json::json!({ "construction": built, "bound": bound }), format)?)
            }
            AdversaryCommand::Strongtype { source, d, c } => {
                let (d, c) = match (d, c) {
                    (Some(d), Some(c)) => (*d, *c),
                    _ => {
                        let f = load(source)?;
                        if !f.promise().is_single_type() {
                            return Err(Error::InvalidInput("strongtype needs a single-type promise".into()));
                        }
                        (deterministic_depth(&f)?, certificate_complexity(&f)?.0)
                    }
                };
                ok(render(&strongtype_report(d, c), format)?)
            }
        },
        Command::Distance(source) => ok(render(&distinguishing_distance(&load(source)?)?, format)?),
        Command::SampleType { input, m, d } => {
            let hidden = HiddenInput::new(parse_input(input)?);
            ok(render(&estimate_type(&hidden, *m, *d, &mut rng)?, format)?)
        }
        Command::Hybrid { from, to } => ok(render(&hybrid_sequence(&parse_type(from)?, &parse_type(to)?)?, format)?),
        Command::Simulate { source, input, alpha, d, reduce } => {
            let f = load(source)?;
            let alpha = match alpha {
                Some(a) => *a,
                None => deterministic_depth(&f)?,
            };
            let hidden = HiddenInput::new(parse_input(input)?);
            ok(render(&classical_simulation(&f, &hidden, alpha, *d, *reduce, &mut rng)?, format)?)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 4 } else { 0 });
        }
    };
    if let Some(b) = cli.budget {
        budget::set_budget(b);
    }
    let format = match cli.format.parse::<Format>() {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli, format) {
        Ok(outcome) => {
            let written = match &cli.out {
                Some(path) => std::fs::write(path, &outcome.text).map_err(Error::from),
                None => {
                    print!("{}", outcome.text);
                    if !outcome.text.ends_with('\n') {
                        println!();
                    }
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(e.exit_code() as u8);
            }
            ExitCode::from(if outcome.violation { 2 } else { 0 })
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
