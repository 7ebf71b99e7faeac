//! Command-line front end for the bracket engine.
//!
//! Three subcommands: `bracket` computes Gerstenhaber brackets on the Koszul,
//! cyclic, or bar instance; `verify` runs a named identity suite; `info`
//! dumps the structure of a complex. Exit codes: 0 success, 1 verification
//! failure, 2 usage error. `HHBRACKET_N` and `HHBRACKET_D` set default
//! truncations.

use clap::{Args, Parser, Subcommand};
use hochschild::text::{
    cochain_json, parse_algebra_spec, parse_cyclic_cochain, parse_element, parse_monomial,
    parse_vector_field, render_cyclic_cochain,
};
use hochschild::verify::{run_suite, SuiteOptions};
use hochschild::{
    BarResolution, ChainError, Cochain, CyclicInstance, Field, Generator, KoszulInstance,
};
use serde_json::json;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "hhbracket", version, about = "Gerstenhaber brackets on Hochschild cohomology, in exact arithmetic")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Compute a bracket [f, g] on a chosen resolution
    Bracket {
        #[command(subcommand)]
        instance: BracketCmd,
    },
    /// Run a named verification suite
    Verify {
        /// one of: bar-basics, prop23, koszul-all, cyclic-all, cross-check
        #[arg(long)]
        suite: String,
        #[arg(long, help = "algebra spec like \"F3[x]/(x^3)\" or \"Q[x,y]\"")]
        algebra: Option<String>,
        /// number of polynomial variables for Koszul suites
        #[arg(long)]
        n: Option<usize>,
        /// prime for cyclic suites
        #[arg(long)]
        p: Option<u64>,
        #[command(flatten)]
        trunc: Truncation,
        /// RNG seed for randomized checks
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        json: bool,
    },
    /// Show generator counts, truncation, and hypothesis status
    Info {
        #[command(subcommand)]
        instance: InfoCmd,
    },
}

#[derive(Args)]
struct Truncation {
    /// homological degree bound (default 4, env HHBRACKET_N)
    #[arg(long = "N")]
    n_bound: Option<usize>,
    /// internal polynomial degree bound (default 3, env HHBRACKET_D)
    #[arg(long = "D")]
    d_bound: Option<u32>,
}

impl Truncation {
    fn n(&self, fallback: usize) -> usize {
        self.n_bound
            .or_else(|| std::env::var("HHBRACKET_N").ok().and_then(|v| v.parse().ok()))
            .unwrap_or(fallback)
    }

    fn d(&self, fallback: u32) -> u32 {
        self.d_bound
            .or_else(|| std::env::var("HHBRACKET_D").ok().and_then(|v| v.parse().ok()))
            .unwrap_or(fallback)
    }
}

#[derive(Subcommand)]
enum BracketCmd {
    /// Koszul resolution of Q[x1..xn]; cochains in vector-field syntax
    /// ("x1^2*x2 d1 d3")
    Koszul {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        json: bool,
    },
    #[command(about = "Minimal resolution of F_p[x]/(x^p); cochains like \"x^2 xi1\"")]
    Cyclic {
        #[arg(long)]
        p: u64,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        json: bool,
    },
    /// Bar resolution of a finite-dimensional algebra; cochains as JSON
    /// [{"word": ["x","x^2"], "value": "2*x"}, ...]
    Bar {
        #[arg(long)]
        algebra: String,
        #[arg(long)]
        f: String,
        #[arg(long)]
        g: String,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Subcommand)]
enum InfoCmd {
    Koszul {
        #[arg(long)]
        n: usize,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        json: bool,
    },
    Cyclic {
        #[arg(long)]
        p: u64,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        json: bool,
    },
    Bar {
        #[arg(long)]
        algebra: String,
        #[command(flatten)]
        trunc: Truncation,
        #[arg(long)]
        json: bool,
    },
}

/// Failures carry the exit code mandated by the CLI contract.
struct Failure {
    code: u8,
    message: String,
}

fn usage(msg: impl Into<String>) -> Failure {
    Failure { code: 2, message: msg.into() }
}

/// Configuration mistakes visible from the flags are usage errors; failures
/// arising inside a computation (truncation exceeded, defect mismatch, …)
/// exit with 1.
fn math(e: ChainError) -> Failure {
    let code = match e {
        ChainError::NonPrimeP(_)
        | ChainError::WrongCharacteristic { .. }
        | ChainError::MixedAlgebras => 2,
        _ => 1,
    };
    Failure { code, message: e.to_string() }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode, Failure> {
    match cli.cmd {
        Cmd::Bracket { instance } => bracket_cmd(instance).map(|()| ExitCode::SUCCESS),
        Cmd::Verify { suite, algebra, n, p, trunc, seed, json } => {
            verify_cmd(suite, algebra, n, p, trunc, seed, json)
        }
        Cmd::Info { instance } => info_cmd(instance).map(|()| ExitCode::SUCCESS),
    }
}

fn bracket_cmd(cmd: BracketCmd) -> Result<(), Failure> {
    match cmd {
        BracketCmd::Koszul { n, f, g, trunc, json } => {
            let inst = KoszulInstance::build(n, Field::Rationals, trunc.n(n), trunc.d(3))
                .map_err(math)?;
            let vf = parse_vector_field(&inst.algebra, &f).map_err(|e| usage(e.to_string()))?;
            let vg = parse_vector_field(&inst.algebra, &g).map_err(|e| usage(e.to_string()))?;
            let result = inst.bracket_of_fields(&vf, &vg).map_err(math)?;
            let method = "phi (closed-form homotopy, Δ⁽²⁾ = (Δ_K⊗id)Δ_K)";
            let homotopy_status = verify_koszul_homotopy(&inst)?;
            if json {
                let cochain = inst.cochain_of(&result);
                println!(
                    "{}",
                    json!({
                        "bracket": cochain_json(&cochain),
                        "rendered": result.to_string(),
                        "method": method,
                        "homotopy": homotopy_status,
                    })
                );
            } else {
                println!("{result}");
                println!("method: {method}");
                println!("homotopy: {homotopy_status}");
            }
            Ok(())
        }
        BracketCmd::Cyclic { p, f, g, trunc, json } => {
            let inst = CyclicInstance::build(p, trunc.n(5)).map_err(math)?;
            let cf = parse_cyclic_cochain(inst.complex(), &f).map_err(|e| usage(e.to_string()))?;
            let cg = parse_cyclic_cochain(inst.complex(), &g).map_err(|e| usage(e.to_string()))?;
            let result = inst.bracket(&cf, &cg).map_err(math)?;
            // hypothesis (c) fails for p > 2: this Δ⁽²⁾ is the weak-mode
            // choice, validated against (π⊗π⊗π)Δ²_Bι
            let method = if p == 2 {
                "phi (Δ⁽²⁾ = (id⊗Δ)Δ, coassociative)"
            } else {
                "phi, weak-mode (explicit Δ⁽²⁾ = (id⊗Δ)Δ; hypothesis (c) fails)"
            };
            let to = cf.degree().max(cg.degree()).saturating_sub(1);
            inst.phi.verify_defect_is(&inst.package.f_map(), to).map_err(math)?;
            let homotopy_status = format!("d(φ) = F_K verified on degrees ≤ {to}");
            if json {
                println!(
                    "{}",
                    json!({
                        "bracket": cochain_json(&result),
                        "rendered": render_cyclic_cochain(&result),
                        "method": method,
                        "homotopy": homotopy_status,
                    })
                );
            } else {
                println!("{}", render_cyclic_cochain(&result));
                println!("method: {method}");
                println!("homotopy: {homotopy_status}");
            }
            Ok(())
        }
        BracketCmd::Bar { algebra, f, g, trunc, json } => {
            let alg = parse_algebra_spec(&algebra).map_err(|e| usage(e.to_string()))?;
            if !alg.is_finite_dimensional() {
                return Err(usage("bar brackets need a finite-dimensional algebra"));
            }
            let bar = BarResolution::build(&alg, trunc.n(4), None).map_err(math)?;
            let cf = parse_bar_cochain(&bar, &f)?;
            let cg = parse_bar_cochain(&bar, &g)?;
            let result = bar.bracket(&cf, &cg).map_err(math)?;
            let method = "classical circle-product commutator";
            if json {
                println!(
                    "{}",
                    json!({
                        "bracket": cochain_json(&result),
                        "method": method,
                    })
                );
            } else {
                println!("{result}");
                println!("method: {method}");
            }
            Ok(())
        }
    }
}

fn verify_koszul_homotopy(inst: &KoszulInstance) -> Result<String, Failure> {
    let top = inst.complex().max_degree();
    inst.phi.verify_defect_is(&inst.package.f_map(), top).map_err(math)?;
    Ok(format!("d(φ) = F_K verified on degrees ≤ {top}"))
}

fn parse_bar_cochain(bar: &BarResolution, input: &str) -> Result<Cochain, Failure> {
    let val: serde_json::Value =
        serde_json::from_str(input).map_err(|e| usage(format!("cochain JSON: {e}")))?;
    let arr = val.as_array().ok_or_else(|| usage("cochain JSON must be an array"))?;
    let alg = bar.complex.algebra().clone();
    let mut degree: Option<usize> = None;
    let mut values = Vec::new();
    for item in arr {
        let word = item
            .get("word")
            .and_then(|w| w.as_array())
            .ok_or_else(|| usage("each term needs a \"word\" array"))?;
        let entries: Result<Vec<_>, Failure> = word
            .iter()
            .map(|e| {
                e.as_str()
                    .ok_or_else(|| usage("word entries are strings"))
                    .and_then(|s| parse_monomial(&alg, s).map_err(|e| usage(e.to_string())))
            })
            .collect();
        let entries = entries?;
        match degree {
            None => degree = Some(entries.len()),
            Some(d) if d != entries.len() => {
                return Err(usage("all words must have the same length"))
            }
            _ => {}
        }
        let value_text = item
            .get("value")
            .and_then(|v| v.as_str())
            .ok_or_else(|| usage("each term needs a \"value\" string"))?;
        let value = parse_element(&alg, value_text).map_err(|e| usage(e.to_string()))?;
        values.push((Generator::Bar(entries), value));
    }
    let degree = degree.ok_or_else(|| usage("empty cochain"))?;
    if degree > bar.complex.max_degree() {
        return Err(usage(format!("cochain degree {degree} exceeds truncation")));
    }
    Ok(Cochain::from_values(&bar.complex, degree, values))
}

#[allow(clippy::too_many_arguments)]
fn verify_cmd(
    suite: String,
    algebra: Option<String>,
    n: Option<usize>,
    p: Option<u64>,
    trunc: Truncation,
    seed: Option<u64>,
    json: bool,
) -> Result<ExitCode, Failure> {
    let defaults = SuiteOptions::default();
    let opts = SuiteOptions {
        algebra,
        nvars: n.unwrap_or(defaults.nvars),
        p: p.unwrap_or(defaults.p),
        max_degree: trunc.n(defaults.max_degree),
        internal: trunc.d(defaults.internal),
        seed: seed.unwrap_or(defaults.seed),
    };
    let report = run_suite(&suite, &opts).map_err(|e| match e {
        ChainError::Other(msg) if msg.starts_with("unknown suite") => usage(msg),
        other => math(other),
    })?;
    if json {
        println!("{}", report.to_json());
    } else {
        for check in &report.checks {
            let mark = if check.passed { "pass" } else { "FAIL" };
            println!("[{mark}] {}: {}", check.name, check.detail);
        }
        println!(
            "suite {}: {}",
            report.suite,
            if report.all_passed() { "all checks passed" } else { "FAILED" }
        );
    }
    Ok(if report.all_passed() { ExitCode::SUCCESS } else { ExitCode::from(1) })
}

fn info_cmd(cmd: InfoCmd) -> Result<(), Failure> {
    match cmd {
        InfoCmd::Koszul { n, trunc, json } => {
            let inst =
                KoszulInstance::build(n, Field::Rationals, trunc.n(n), trunc.d(3)).map_err(math)?;
            let complex = inst.complex().clone();
            let counts: Vec<usize> =
                (0..=complex.max_degree()).map(|d| complex.generator_count(d)).collect();
            let report = inst.package.check_hypotheses(complex.max_degree());
            emit_info(
                json,
                &format!("Koszul resolution of Q[x1..x{n}]"),
                &counts,
                complex.max_degree(),
                complex.internal_bound(),
                Some((report.a, report.b, report.c)),
            );
            Ok(())
        }
        InfoCmd::Cyclic { p, trunc, json } => {
            let inst = CyclicInstance::build(p, trunc.n(4)).map_err(math)?;
            let complex = inst.complex().clone();
            let counts: Vec<usize> =
                (0..=complex.max_degree()).map(|d| complex.generator_count(d)).collect();
            let report = inst.package.check_hypotheses(complex.max_degree().min(3));
            emit_info(
                json,
                &format!("minimal resolution of F{p}[x]/(x^{p})"),
                &counts,
                complex.max_degree(),
                None,
                Some((report.a, report.b, report.c)),
            );
            Ok(())
        }
        InfoCmd::Bar { algebra, trunc, json } => {
            let alg = parse_algebra_spec(&algebra).map_err(|e| usage(e.to_string()))?;
            let d = if alg.is_finite_dimensional() { None } else { Some(trunc.d(3)) };
            let bar = BarResolution::build(&alg, trunc.n(4), d).map_err(math)?;
            let counts: Vec<usize> =
                (0..=bar.complex.max_degree()).map(|n| bar.complex.generator_count(n)).collect();
            emit_info(
                json,
                &format!("bar resolution of {algebra}"),
                &counts,
                bar.complex.max_degree(),
                bar.complex.internal_bound(),
                None,
            );
            Ok(())
        }
    }
}

fn emit_info(
    json_out: bool,
    title: &str,
    counts: &[usize],
    max_degree: usize,
    internal: Option<u32>,
    hypotheses: Option<(Option<bool>, Option<bool>, Option<bool>)>,
) {
    if json_out {
        let hyp = hypotheses.map(|(a, b, c)| json!({"a": a, "b": b, "c": c}));
        println!(
            "{}",
            json!({
                "complex": title,
                "max_degree": max_degree,
                "internal_bound": internal,
                "generator_counts": counts,
                "hypotheses": hyp,
            })
        );
        return;
    }
    println!("{title}");
    match internal {
        Some(d) => println!("truncation: N = {max_degree}, D = {d}"),
        None => println!("truncation: N = {max_degree}"),
    }
    for (degree, count) in counts.iter().enumerate() {
        println!("degree {degree}: {count} generator{}", if *count == 1 { "" } else { "s" });
    }
    if let Some((a, b, c)) = hypotheses {
        let show = |v: Option<bool>| match v {
            Some(true) => "yes",
            Some(false) => "no",
            None => "untested",
        };
        println!("hypotheses: a={} b={} c={}", show(a), show(b), show(c));
    }
}
