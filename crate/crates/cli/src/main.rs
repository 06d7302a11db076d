//! `hookred`: OPEs, verification campaigns and serialized objects from the
//! command line.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context};
use clap::{Parser, Subcommand, ValueEnum};
use hookred::freefields::{hook_screenings, tilde_family, FreeFieldStack, StackSpec};
use hookred::invred::{run_campaign, screening_exponent, CampaignConfig, CAMPAIGNS};
use hookred::opecore::{format_expr, format_ope, ope, Engine, DEFAULT_BUDGET};
use hookred::rootdata::{good_grading, Variant};
use hookred::Error;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "hookred", version, about = "Exact OPE engine and inverse-reduction verification")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum VariantArg {
    Standard,
    Bar,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Standard => Variant::Standard,
            VariantArg::Bar => Variant::Bar,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Object {
    Screenings,
    TildeFamily,
    Grading,
    #[value(name = "exponent-A")]
    ExponentA,
}

#[derive(Subcommand)]
enum Command {
    /// Computes the singular part of `A(z)B(w)`.
    Ope {
        a: String,
        b: String,
        /// Stack such as `pi`, `heis:n=3`, `ghosts:n=3`, `tilde:n=3,m=4`.
        #[arg(long)]
        stack: String,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
    /// Runs a verification campaign; exits 0 iff every check passes.
    Verify {
        campaign: String,
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        m: Option<usize>,
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
        /// `sl2`, `sl3` or `sl4` (BRST campaign).
        #[arg(long)]
        algebra: Option<String>,
        /// `prin` or `min` (BRST campaign).
        #[arg(long)]
        f: Option<String>,
        #[arg(long, default_value_t = 2024)]
        seed: u64,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: usize,
        #[arg(long, default_value_t = 6)]
        truncation: usize,
        /// Randomized composites per property (engine-axioms).
        #[arg(long, default_value_t = 200)]
        samples: usize,
        /// Randomized raw trees (engine-axioms).
        #[arg(long, default_value_t = 500)]
        trees: usize,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Also write the report here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Include per-check wall times.
        #[arg(long)]
        timings: bool,
    },
    /// Writes a structured object.
    Emit {
        #[arg(value_enum)]
        object: Object,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        m: usize,
        #[arg(long, value_enum, default_value = "standard")]
        variant: VariantArg,
        #[arg(long, value_enum, default_value = "json")]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Renders a parse error with a caret under the offending offset.
fn explain(err: Error, text: &str) -> anyhow::Error {
    match &err {
        Error::Parse { offset, .. } => {
            anyhow::anyhow!("{err}\n  {text}\n  {}^", " ".repeat(text[..(*offset).min(text.len())].chars().count()))
        }
        _ => err.into(),
    }
}

fn write_output(out: &Option<PathBuf>, text: &str) -> anyhow::Result<()> {
    if let Some(path) = out {
        fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(())
}

fn check_hook(n: usize, m: usize) -> anyhow::Result<()> {
    if n == 0 || m == 0 || m > n + 1 {
        bail!("(n, m) = ({n}, {m}) is out of range: need n ≥ 1 and 1 ≤ m ≤ n+1");
    }
    Ok(())
}

fn cmd_ope(a: &str, b: &str, stack: &str, budget: usize, format: Format) -> anyhow::Result<()> {
    let stack = FreeFieldStack::parse(stack).map_err(|e| explain(e, stack))?;
    let pres = stack.presentation();
    let eng = Engine::with_budget(pres, budget);
    let x = stack.parse_expr(&eng, a).map_err(|e| explain(e, a))?;
    let y = stack.parse_expr(&eng, b).map_err(|e| explain(e, b))?;
    let r = ope(&eng, &x, &y)?;
    match format {
        Format::Text => println!("{}", format_ope(pres, &r)),
        Format::Json => {
            let poles: serde_json::Map<String, Value> =
                r.poles.iter().map(|(n, e)| (n.to_string(), Value::String(format_expr(pres, e)))).collect();
            println!("{}", serde_json::to_string_pretty(&json!({ "a": a, "b": b, "poles": poles }))?);
        }
    }
    Ok(())
}

fn cmd_emit(object: Object, n: usize, m: usize, variant: Variant) -> anyhow::Result<(Value, String)> {
    check_hook(n, m)?;
    Ok(match object {
        Object::Screenings => {
            let stack = FreeFieldStack::new(StackSpec::hook(n, m)?)?;
            let pres = stack.presentation();
            let qs = hook_screenings(&stack, m, variant)?;
            let rows: Vec<(String, String)> =
                qs.iter().enumerate().map(|(i, q)| (format!("Q{}", i + 1), format_expr(pres, q.body()))).collect();
            let text = rows.iter().map(|(k, v)| format!("{k} = {v}\n")).collect();
            let list: Vec<Value> = rows.iter().map(|(k, v)| json!({ "name": k, "body": v })).collect();
            (json!({ "n": n, "m": m, "variant": variant, "stack": stack.spec().to_string(), "screenings": list }), text)
        }
        Object::TildeFamily => {
            let fam = tilde_family(n, m)?;
            let pres = fam.stack().presentation();
            let rows = |t: &[(String, hookred::Expr)]| -> Vec<(String, String)> {
                t.iter().map(|(k, e)| (k.clone(), format_expr(pres, e))).collect()
            };
            let defs = rows(fam.definitions());
            let inv = rows(fam.inverse());
            let mut text = String::from("# tilded generators in untilded ones\n");
            for (k, v) in &defs {
                text.push_str(&format!("{k}~ = {v}\n"));
            }
            text.push_str("# untilded generators in tilded ones\n");
            for (k, v) in &inv {
                text.push_str(&format!("{k} = {v}\n"));
            }
            let as_json = |rows: &[(String, String)]| -> Vec<Value> {
                rows.iter().map(|(k, v)| json!({ "name": k, "expr": v })).collect()
            };
            let value = json!({
                "n": n,
                "m": m,
                "theta0": [fam.theta0().0, fam.theta0().1],
                "stack": fam.stack().spec().to_string(),
                "definitions": as_json(&defs),
                "inverse": as_json(&inv),
            });
            (value, text)
        }
        Object::Grading => {
            let g = good_grading(n, m)?;
            let text = format!("{:?}\n", g.grades);
            (serde_json::to_value(&g)?, text)
        }
        Object::ExponentA => {
            let a = screening_exponent(n, m)?;
            let pres = a.stack.presentation();
            let (lin, non) = (format_expr(pres, &a.linear), format_expr(pres, &a.nonlinear));
            let text = format!("linear = {lin}\nnonlinear = {non}\n");
            let value = json!({
                "n": n,
                "m": m,
                "stack": a.stack.spec().to_string(),
                "c_coefficient": a.c_coefficient.to_string(),
                "linear": lin,
                "nonlinear": non,
            });
            (value, text)
        }
    })
}

fn run(cli: Cli) -> anyhow::Result<bool> {
    match cli.command {
        Command::Ope { a, b, stack, budget, format } => {
            cmd_ope(&a, &b, &stack, budget, format)?;
            Ok(true)
        }
        Command::Verify {
            campaign,
            n,
            m,
            variant,
            algebra,
            f,
            seed,
            budget,
            truncation,
            samples,
            trees,
            format,
            out,
            timings,
        } => {
            if !CAMPAIGNS.contains(&campaign.as_str()) {
                bail!("unknown campaign `{campaign}`; expected one of {}", CAMPAIGNS.join(", "));
            }
            match (n, m) {
                (Some(n), Some(m)) => check_hook(n, m)?,
                (None, Some(_)) => bail!("--m needs --n"),
                (Some(n), None) if n == 0 => bail!("--n must be at least 1"),
                _ => {}
            }
            if truncation == 0 || budget == 0 {
                bail!("--truncation and --budget must be positive");
            }
            let cfg = CampaignConfig { n, m, variant: variant.into(), algebra, f, seed, budget, truncation, samples, trees };
            let report = run_campaign(&campaign, &cfg)?;
            let text = match format {
                Format::Text => report.to_text(timings),
                Format::Json => {
                    let config = serde_json::to_value(&cfg)?;
                    serde_json::to_string_pretty(&report.to_json(&config, timings))? + "\n"
                }
            };
            print!("{text}");
            write_output(&out, &text)?;
            Ok(report.all_passed())
        }
        Command::Emit { object, n, m, variant, format, out } => {
            let (value, text) = cmd_emit(object, n, m, variant.into())?;
            let text = match format {
                Format::Text => text,
                Format::Json => serde_json::to_string_pretty(&value)? + "\n",
            };
            print!("{text}");
            write_output(&out, &text)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
