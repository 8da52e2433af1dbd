mod suites;

use clap::{Parser, Subcommand, ValueEnum};
use qvertex::combinatorics::{character, character_formula, enumerate_basis, hardy_identity_check, stats, QSeries};
use qvertex::quasiparticle::{straighten, QPMonomial};
use serde_json::json;
use std::io::Write;
use std::process::ExitCode;
use suites::{Check, Params};

#[derive(Parser)]
#[command(name = "qvertex", about = "Quasi-particle bases of quantum vertex algebras at level c")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
    /// Level c.
    #[arg(long, global = true, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    level: u64,
    /// Truncation order of q-series.
    #[arg(long, global = true, default_value_t = 12, value_parser = clap::value_parser!(u64).range(1..))]
    order: u64,
    /// Bound on deg_q for basis listings.
    #[arg(long, global = true, default_value_t = 4, value_parser = clap::value_parser!(u64).range(1..))]
    degq: u64,
    /// Bound on the weight of Fock states.
    #[arg(long, global = true, default_value_t = 3, value_parser = clap::value_parser!(u64).range(1..))]
    weight_bound: u64,
    /// Window half-width for z-exponents.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u64).range(1..))]
    window: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Seed for sampled checks.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Cmd {
    /// Run a verification suite.
    Verify { suite: Suite },
    /// List basis monomials with their diagrams.
    Basis,
    /// Tabulate the character.
    Character,
    /// Check the sum-product identity.
    Identity,
    /// Straighten a monomial such as "x[1,-1] x[1,-2] 1".
    Straighten { monomial: String },
}

#[derive(Clone, Copy, ValueEnum)]
enum Suite {
    Qcalc,
    FockRelations,
    Integrability,
    Associativity,
    Lemmas,
}

impl Suite {
    fn name(self) -> &'static str {
        match self {
            Suite::Qcalc => "qcalc",
            Suite::FockRelations => "fock-relations",
            Suite::Integrability => "integrability",
            Suite::Associativity => "associativity",
            Suite::Lemmas => "lemmas",
        }
    }
}

fn constant(s: &QSeries, n: usize) -> i64 {
    s.coeff(n)
        .integer_coeffs()
        .and_then(|m| m.get(&0).map(|k| k.to_string().parse().unwrap_or(0)))
        .unwrap_or(0)
}

fn emit(format: Format, text: String, value: serde_json::Value) {
    let mut out = std::io::stdout().lock();
    let _ = match format {
        Format::Text => write!(out, "{text}"),
        Format::Json => writeln!(out, "{}", serde_json::to_string_pretty(&value).expect("serializable")),
    };
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let p = Params {
        level: cli.level as usize,
        order: cli.order as usize,
        degq: cli.degq as i64,
        weight_bound: cli.weight_bound as u32,
        window: cli.window as i64,
        seed: cli.seed,
    };
    match cli.cmd {
        Cmd::Verify { suite } => {
            let checks: Vec<Check> = match suite {
                Suite::Qcalc => suites::qcalc(&p),
                Suite::FockRelations => suites::fock_relations(&p),
                Suite::Integrability => suites::integrability(&p),
                Suite::Associativity => suites::associativity(&p),
                Suite::Lemmas => suites::lemmas(&p),
            };
            let passed = checks.iter().all(|c| c.passed);
            let mut text = format!("suite {}\n", suite.name());
            for c in &checks {
                text += &format!("{} {}", if c.passed { "PASS" } else { "FAIL" }, c.name);
                if !c.detail.is_empty() {
                    text += &format!(" ({})", c.detail);
                }
                text.push('\n');
            }
            text += &format!("{}/{} checks passed\n", checks.iter().filter(|c| c.passed).count(), checks.len());
            emit(cli.format, text, json!({ "suite": suite.name(), "passed": passed, "checks": checks }));
            if passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Basis => {
            let mut text = String::new();
            let mut entries = Vec::new();
            for m in enumerate_basis(p.level, p.degq) {
                let s = stats(&m).expect("enumerated monomials are in basis form");
                let diagram = s.diagram.render();
                text += &format!("{m}  deg_q={} wt={}\n", s.deg_q, s.wt);
                for line in diagram.lines() {
                    text += &format!("    {line}\n");
                }
                entries.push(json!({ "pairs": m.pairs(), "deg_q": s.deg_q, "wt": s.wt, "diagram": diagram }));
            }
            text += &format!("{} elements\n", entries.len());
            emit(cli.format, text, serde_json::Value::Array(entries));
            ExitCode::SUCCESS
        }
        Cmd::Character => {
            let counted = character(p.level, p.order);
            let formula = character_formula(p.order).specialize(p.level as i64);
            let mut text = format!("{:>4} {:>8} {:>8}\n", "n", "count", "coeff");
            let mut rows = Vec::new();
            let mut agree = true;
            for n in 0..=p.order {
                let (a, b) = (constant(&counted, n), constant(&formula, n));
                agree &= a == b;
                text += &format!("{n:>4} {a:>8} {b:>8}\n");
                rows.push(json!({ "n": n, "count": a, "coeff": b }));
            }
            emit(cli.format, text, serde_json::Value::Array(rows));
            if agree {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Identity => {
            let r = hardy_identity_check(p.order);
            let text = match r.first_mismatch {
                None => format!("equal through q^{}\n", r.order),
                Some(n) => format!("first mismatch at q^{n}\n"),
            };
            emit(cli.format, text, json!({ "order": r.order, "equal": r.equal, "first_mismatch": r.first_mismatch }));
            if r.equal {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Cmd::Straighten { monomial } => {
            let m: QPMonomial = match monomial.parse() {
                Ok(m) => m,
                Err(e) => {
                    eprintln!("error: {e}");
                    return ExitCode::from(2);
                }
            };
            let out = straighten(&m, p.level);
            let mut text = format!("{m} at level {}\n", p.level);
            if out.is_empty() {
                text += "  = 0\n";
            }
            let mut terms = Vec::new();
            for (b, k) in &out {
                text += &format!("  + ({k}) {b}\n");
                terms.push(json!({ "coeff": k.to_string(), "monomial": b.to_string(), "pairs": b.pairs() }));
            }
            emit(cli.format, text, json!({ "input": m.to_string(), "level": p.level, "terms": terms }));
            ExitCode::SUCCESS
        }
    }
}
