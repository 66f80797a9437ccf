use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use vknot_core::families::{expected_k, expected_kprime, mismatches};
use vknot_core::invariants::{closed_invariants, full_report, DerivativeChecks, InvariantReport};
use vknot_core::surface::pairing_tables;
use vknot_core::verify::{run_suite_with, Suite, DEFAULT_MAX_CHORDS};
use vknot_core::{k_family, kprime_family, LongDiagram, PairingTables};

const DEFAULT_TRIALS: usize = 200;
const DEFAULT_SEED: u64 = 1;

#[derive(Parser)]
#[command(name = "vknot", version, about = "Intersection polynomials of long virtual knots")]
struct Cli {
    /// Output format.
    #[arg(long, value_enum, global = true, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Text,
    Latex,
}

#[derive(Subcommand)]
enum Command {
    /// Compute all invariants of a Gauss code.
    Invariants {
        /// Gauss code such as "O1+ O2+ U1+ U2+"; empty for the trivial knot.
        code: Option<String>,
        /// Read one code per line; `#` starts a comment.
        #[arg(long)]
        file: Option<PathBuf>,
        /// Shorthand for `--format latex`.
        #[arg(long)]
        latex: bool,
    },
    /// Run a randomized verification suite (or `all`).
    Verify {
        suite: String,
        #[arg(long, default_value_t = DEFAULT_TRIALS)]
        trials: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Largest random diagram, in chords.
        #[arg(long, default_value_t = DEFAULT_MAX_CHORDS)]
        max_chords: usize,
    },
    /// Tables and invariants of a family member, checked against closed forms.
    Family {
        #[arg(value_enum)]
        name: Family,
        n: u32,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Family {
    #[value(name = "K")]
    K,
    #[value(name = "Kprime")]
    Kprime,
}

enum Failure {
    Verification(String),
    Usage(String),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut out = String::new();
    let result = match cli.command {
        Command::Invariants { code, file, latex } => {
            let format = if latex { Format::Latex } else { cli.format };
            invariants(code, file, format, &mut out)
        }
        Command::Verify { suite, trials, seed, max_chords } => verify(&suite, trials, seed, max_chords, cli.format, &mut out),
        Command::Family { name, n } => family(name, n, cli.format, &mut out),
    };
    print!("{out}");
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Verification(msg)) => {
            eprintln!("vknot: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("vknot: {msg}");
            ExitCode::from(2)
        }
    }
}

fn read_codes(code: Option<String>, file: Option<PathBuf>) -> Result<Vec<(String, LongDiagram)>, Failure> {
    let mut lines = Vec::new();
    if let Some(c) = code {
        lines.push(("argument".to_string(), c));
    }
    if let Some(path) = file {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| Failure::Usage(format!("cannot read {}: {e}", path.display())))?;
        for (i, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if !line.is_empty() {
                lines.push((format!("{}:{}", path.display(), i + 1), line.to_string()));
            }
        }
    }
    if lines.is_empty() {
        return Err(Failure::Usage("no Gauss code given (pass a code or --file)".into()));
    }
    lines
        .into_iter()
        .map(|(at, c)| {
            let d = LongDiagram::parse(&c).map_err(|e| Failure::Usage(format!("{at}: {e}")))?;
            Ok((c, d))
        })
        .collect()
}

fn invariants(code: Option<String>, file: Option<PathBuf>, format: Format, out: &mut String) -> Result<(), Failure> {
    let codes = read_codes(code, file)?;
    let mut docs = Vec::new();
    for (_, d) in &codes {
        let report = full_report(d).map_err(|e| Failure::Verification(format!("{d}: {e}")))?;
        let closed = closed_invariants(&d.closure());
        let checks = DerivativeChecks::from_report(&report);
        match format {
            Format::Json => {
                let mut doc = report.to_json();
                doc["code"] = json!(d.to_string());
                doc["closure"] = closed.to_json();
                doc["derivatives"] = derivatives_json(&checks);
                docs.push(doc);
            }
            Format::Text => {
                let _ = writeln!(out, "code: {d}");
                out.push_str(&report.to_text());
                let _ = writeln!(out, "closure W = {}", closed.writhe);
                let _ = writeln!(out, "closure I = {}", closed.first);
                let _ = writeln!(out, "closure II = {}", closed.second);
                for (name, ok) in derivative_names().iter().zip(checks.as_array()) {
                    let _ = writeln!(out, "derivative {name}: {ok}");
                }
                out.push('\n');
            }
            Format::Latex => {
                let _ = writeln!(out, "% {d}");
                out.push_str(&report.to_latex());
                let _ = writeln!(
                    out,
                    "\\begin{{align*}}\nW(\\widehat{{K}};t) &= {}, \\\\\nI(\\widehat{{K}};t) &= {}, \\\\\nII(\\widehat{{K}};t) &= {}\n\\end{{align*}}",
                    closed.writhe.to_latex(),
                    closed.first.to_latex(),
                    closed.second.to_latex()
                );
            }
        }
    }
    if format == Format::Json {
        let value = if docs.len() == 1 { docs.pop().unwrap() } else { Value::Array(docs) };
        let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap());
    }
    Ok(())
}

fn derivative_names() -> [&'static str; 5] {
    ["writhe", "g_diagonal", "g_mixed", "f_equals_h", "second_order"]
}

fn derivatives_json(c: &DerivativeChecks) -> Value {
    let mut m = serde_json::Map::new();
    for (name, ok) in derivative_names().iter().zip(c.as_array()) {
        m.insert(name.to_string(), json!(ok));
    }
    Value::Object(m)
}

fn verify(suite: &str, trials: usize, seed: u64, max_chords: usize, format: Format, out: &mut String) -> Result<(), Failure> {
    let suites: Vec<Suite> = if suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![suite.parse().map_err(Failure::Usage)?]
    };
    let outcomes: Vec<_> = suites.into_iter().map(|s| run_suite_with(s, trials, seed, max_chords)).collect();
    match format {
        Format::Json => {
            let docs: Vec<Value> = outcomes.iter().map(|o| o.to_json()).collect();
            let value = if docs.len() == 1 { docs[0].clone() } else { Value::Array(docs) };
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&value).unwrap());
        }
        _ => outcomes.iter().for_each(|o| out.push_str(&o.to_text())),
    }
    let failed: Vec<&str> = outcomes.iter().filter(|o| !o.ok()).map(|o| o.suite.name()).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verification(format!("failed suites: {}", failed.join(", "))))
    }
}

fn tables_json(t: &PairingTables) -> Value {
    json!({
        "labels": t.labels,
        "alpha.alpha": t.alpha_alpha,
        "alpha.beta": t.alpha_beta,
        "beta.beta": t.beta_beta,
        "alpha.gamma": t.alpha_diagram,
    })
}

fn tables_latex(t: &PairingTables) -> String {
    let mut out = String::new();
    let cols = "r".repeat(t.labels.len() + 1);
    for (name, m) in [
        (r"\alpha_i\cdot\alpha_j", &t.alpha_alpha),
        (r"\alpha_i\cdot\beta_j", &t.alpha_beta),
        (r"\beta_i\cdot\beta_j", &t.beta_beta),
    ] {
        let _ = writeln!(out, "\\[\n\\begin{{array}}{{{cols}}}");
        let head: Vec<String> = t.labels.iter().map(|l| l.to_string()).collect();
        let _ = writeln!(out, "{name} & {} \\\\ \\hline", head.join(" & "));
        for (l, row) in t.labels.iter().zip(m) {
            let cells: Vec<String> = row.iter().map(|x| x.to_string()).collect();
            let _ = writeln!(out, "{l} & {} \\\\", cells.join(" & "));
        }
        let _ = writeln!(out, "\\end{{array}}\n\\]");
    }
    let cells: Vec<String> = t.alpha_diagram.iter().map(|x| x.to_string()).collect();
    let _ = writeln!(out, "\\[\\alpha_i\\cdot\\gamma_D = ({})\\]", cells.join(", "));
    out
}

fn family(name: Family, n: u32, format: Format, out: &mut String) -> Result<(), Failure> {
    let (d, expected, label) = match name {
        Family::K => (k_family(n), expected_k(n.max(2)), "K"),
        Family::Kprime => (kprime_family(n), expected_kprime(n.max(2)), "Kprime"),
    };
    let d = d.ok_or_else(|| Failure::Usage(format!("family {label} needs n >= 2, got {n}")))?;
    let tables = pairing_tables(&d);
    let report: InvariantReport = full_report(&d).map_err(|e| Failure::Verification(e.to_string()))?;
    let bad = mismatches(&report, &expected);
    let relations = tables.check_relations();
    match format {
        Format::Json => {
            let doc = json!({
                "schema": "vknot.family/1",
                "family": label,
                "n": n,
                "code": d.to_string(),
                "tables": tables_json(&tables),
                "report": report.to_json(),
                "mismatches": bad,
            });
            let _ = writeln!(out, "{}", serde_json::to_string_pretty(&doc).unwrap());
        }
        Format::Text => {
            let _ = writeln!(out, "family {label}({n})\ncode: {d}\n");
            out.push_str(&tables.to_tsv());
            out.push('\n');
            out.push_str(&report.to_text());
            if bad.is_empty() {
                let _ = writeln!(out, "closed forms: match");
            } else {
                let _ = writeln!(out, "closed forms: MISMATCH in {}", bad.join(", "));
            }
        }
        Format::Latex => {
            let _ = writeln!(out, "% {label}({n}): {d}");
            out.push_str(&tables_latex(&tables));
            out.push_str(&report.to_latex());
        }
    }
    if let Err(msg) = relations {
        return Err(Failure::Verification(format!("pairing tables: {msg}")));
    }
    if !bad.is_empty() {
        return Err(Failure::Verification(format!("closed-form mismatch in {}", bad.join(", "))));
    }
    Ok(())
}
