mod error;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use error::CliError;
use zhkit::diagram::{from_zhd, to_zhd, Diagram};
use zhkit::extract::{circuit_to_zh, post_circuit_from_json, post_circuit_to_json, post_circuit_to_zh, zh_to_circuit};
use zhkit::revcomp::{
    circuit_from_json, circuit_to_json, compile_permutation, gate_count, lower, lower_bound, permutation_from_json,
    simulate, verify_classical, Circuit, Permutation, LOWER_BOUND_SLOTS, PERM_GATE_CONSTANT,
};
use zhkit::rewrite::{check_soundness, find_rule, rule_catalog, DEFAULT_MAX_ARITY};
use zhkit::suite::{self, SuiteConfig, DEFAULT_SEED};
use zhkit::synth::{matrix_from_json, matrix_to_diagram_phase_free, matrix_to_diagram_ring};
use zhkit::{contract, Scalar};

/// Exact qudit ZH-calculus toolkit.
#[derive(Parser)]
#[command(name = "zhkit", version)]
struct Cli {
    #[command(flatten)]
    global: Global,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Args)]
struct Global {
    /// Qudit dimension; must agree with any input file.
    #[arg(long, global = true)]
    d: Option<u32>,
    /// Seed for randomized inputs.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Ring,
    PhaseFree,
}

#[derive(Subcommand)]
enum Cmd {
    /// Contract a .zhd diagram and print its tensor as JSON.
    Eval { file: PathBuf },
    /// Check every rewrite rule (or one) against exact contraction.
    CheckRules {
        #[arg(long, default_value_t = DEFAULT_MAX_ARITY)]
        max_arity: usize,
        #[arg(long)]
        rule: Option<String>,
    },
    /// Synthesize a diagram from a .mat matrix.
    Synth {
        file: PathBuf,
        #[arg(long, value_enum, default_value = "phase-free")]
        mode: Mode,
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Print k and size statistics.
        #[arg(long)]
        report: bool,
    },
    /// Compile a permutation file (or a random permutation on `--random` dits) into a circuit.
    CompilePerm {
        file: Option<PathBuf>,
        #[arg(long, conflicts_with = "file")]
        random: Option<usize>,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long)]
        stats: bool,
    },
    /// Turn a phase-free .zhd diagram into a postselected circuit.
    Extract {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Turn a .qc circuit back into a .zhd diagram.
    Embed {
        file: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Run a .qc circuit on a basis state and print the output state. A postselected
    /// circuit from `extract` is simulated whole and printed as √d^k times its tensor,
    /// in the same format as `eval`.
    Simulate {
        file: PathBuf,
        /// Comma-separated input dits; zeros when omitted.
        #[arg(long, value_delimiter = ',')]
        input: Option<Vec<u32>>,
    },
    /// Run the acceptance suite.
    Selftest {
        /// Criterion numbers to run; all when omitted.
        #[arg(long, value_delimiter = ',')]
        only: Option<Vec<u32>>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, format!("{text}\n")).map_err(|e| CliError::Usage(format!("{}: {e}", p.display()))),
        None => {
            println!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    serde_json::to_string_pretty(v).expect("json values serialize")
}

fn check_d(g: &Global, file_d: u32) -> Result<(), CliError> {
    match g.d {
        Some(d) if d != file_d => Err(CliError::Usage(format!("--d {d} but the input has d = {file_d}"))),
        _ => Ok(()),
    }
}

fn load_zhd(g: &Global, path: &Path) -> Result<Diagram, CliError> {
    let diag = from_zhd(&read(path)?)?;
    check_d(g, diag.d)?;
    Ok(diag)
}

fn eval(g: &Global, file: &Path) -> Result<(), CliError> {
    let t = contract(&load_zhd(g, file)?)?;
    println!("{}", t.to_json());
    Ok(())
}

fn check_rules(g: &Global, max_arity: usize, rule: Option<&str>) -> Result<(), CliError> {
    let d = g.d.unwrap_or(3);
    let rules = match rule {
        Some(name) => vec![find_rule(d, name).map_err(|e| CliError::Usage(e.to_string()))?],
        None => rule_catalog(d),
    };
    let mut failed = 0;
    for r in &rules {
        let rep = check_soundness(r, d, max_arity);
        println!("{rep}");
        failed += !rep.passed() as usize;
    }
    println!("{} rules, {failed} unsound", rules.len());
    if failed > 0 {
        return Err(CliError::Verify(format!("{failed} rules have counterexamples")));
    }
    Ok(())
}

fn synth(g: &Global, file: &Path, mode: Mode, output: Option<&Path>, report: bool) -> Result<(), CliError> {
    let m = matrix_from_json(&read(file)?)?;
    check_d(g, m.d)?;
    let s = match mode {
        Mode::Ring => matrix_to_diagram_ring(&m)?,
        Mode::PhaseFree => matrix_to_diagram_phase_free(&m)?,
    };
    let text = to_zhd(&s.diagram);
    if output.is_some() || !report {
        emit(text.trim_end(), output)?;
    }
    if report {
        let h = s.diagram.nodes.iter().filter(|n| matches!(n, zhkit::NodeKind::H(_))).count();
        println!("k = {}", s.k);
        println!("scale = {}", s.scale());
        println!("factors = {}", s.factors);
        println!("nodes = {} (z {}, h {})", s.diagram.nodes.len(), s.diagram.nodes.len() - h, h);
        println!("edges = {}", s.diagram.edges.len());
        println!("phase-free = {}", s.diagram.is_phase_free());
    }
    Ok(())
}

fn compile_perm(
    g: &Global,
    file: Option<&Path>,
    random: Option<usize>,
    output: Option<&Path>,
    stats: bool,
) -> Result<(), CliError> {
    let p = match (file, random) {
        (Some(f), _) => {
            let p = permutation_from_json(&read(f)?)?;
            check_d(g, p.d)?;
            p
        }
        (None, Some(n)) => {
            let mut rng = ChaCha8Rng::seed_from_u64(g.seed);
            Permutation::random(g.d.unwrap_or(3), n, &mut rng)
        }
        (None, None) => return Err(CliError::Usage("give a permutation file or --random N".into())),
    };
    let c = compile_permutation(&p)?;
    verify_classical(&c, |x| p.apply(x)).map_err(CliError::Verify)?;
    emit(&pretty(&circuit_to_json(&c)), output)?;
    if stats {
        print_stats(&p, &c)?;
    }
    Ok(())
}

fn print_stats(p: &Permutation, c: &Circuit) -> Result<(), CliError> {
    let (d, n) = (p.d, p.n);
    let scale = n * (d as usize).pow(n as u32);
    let native = gate_count(c, true)?;
    let expanded = gate_count(c, false)?;
    let bound = lower_bound(d, n, LOWER_BOUND_SLOTS);
    println!("gates = {}", c.gates.len());
    println!("native gates = {native} (with X^-1 and |0>CX^-1 as {} forward gates: {expanded})", d - 1);
    println!("wires = {} ({} data)", c.n_wires, n);
    println!("upper bound = {} (= {PERM_GATE_CONSTANT}·n·d^n)", PERM_GATE_CONSTANT * scale);
    println!("lower bound = {bound:.1}; achieved/lower = {:.2}", expanded as f64 / bound);
    Ok(())
}

fn extract(g: &Global, file: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let pc = zh_to_circuit(&load_zhd(g, file)?)?;
    let text = pretty(&post_circuit_to_json(&pc));
    match output {
        Some(_) => {
            emit(&text, output)?;
            println!("k = {}", pc.k);
        }
        None => {
            println!("{text}");
            eprintln!("k = {}", pc.k);
        }
    }
    Ok(())
}

fn embed(g: &Global, file: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let text = read(file)?;
    let value: serde_json::Value = serde_json::from_str(&text).map_err(|e| CliError::Usage(e.to_string()))?;
    let (diag, k) = if value.get("slots").is_some() {
        let pc = post_circuit_from_json(&text)?;
        (post_circuit_to_zh(&pc)?, pc.k)
    } else {
        let c = circuit_from_json(&text)?;
        let diag = match circuit_to_zh(&c) {
            Ok(diag) => diag,
            Err(zhkit::extract::ExtractError::Unsupported(_)) => circuit_to_zh(&lower(&c)?)?,
            Err(e) => return Err(e.into()),
        };
        (diag, 0)
    };
    check_d(g, diag.d)?;
    let out = to_zhd(&diag);
    match output {
        Some(_) => {
            emit(out.trim_end(), output)?;
            println!("k = {k}");
        }
        None => {
            println!("{}", out.trim_end());
            eprintln!("k = {k}");
        }
    }
    Ok(())
}

fn simulate_cmd(g: &Global, file: &Path, input: Option<&[u32]>) -> Result<(), CliError> {
    let text = read(file)?;
    if text.contains("\"slots\"") {
        if input.is_some() {
            return Err(CliError::Usage("--input applies to plain circuits only".into()));
        }
        let pc = post_circuit_from_json(&text)?;
        check_d(g, pc.d)?;
        let t = pc.tensor()?.scale(&Scalar::sqrt_d_pow(pc.d, pc.k));
        println!("{}", t.to_json());
        return Ok(());
    }
    let c = circuit_from_json(&text)?;
    check_d(g, c.d)?;
    let input = input.map(<[u32]>::to_vec).unwrap_or_else(|| vec![0; c.n_wires]);
    if input.len() != c.n_wires || input.iter().any(|&x| x >= c.d) {
        return Err(CliError::Usage(format!("input must be {} dits below {}", c.n_wires, c.d)));
    }
    let state = simulate(&c, &input)?;
    let mut entries = Vec::new();
    for (pos, a) in state.data.iter().enumerate() {
        if *a != Scalar::zero(c.d) {
            let idx: Vec<String> = state.index(pos).iter().map(u32::to_string).collect();
            entries.push(serde_json::json!({ "basis": idx.join(""), "amplitude": a }));
        }
    }
    println!("{}", pretty(&serde_json::Value::Array(entries)));
    Ok(())
}

fn selftest(g: &Global, only: Option<&[u32]>) -> Result<(), CliError> {
    let cfg = SuiteConfig { seed: g.seed, d: g.d };
    let ids: Vec<u32> = only.map(<[u32]>::to_vec).unwrap_or_else(|| (1..=9).collect());
    if let Some(bad) = ids.iter().find(|&&i| !(1..=9).contains(&i)) {
        return Err(CliError::Usage(format!("no criterion {bad}")));
    }
    let mut failed = Vec::new();
    for id in ids {
        let out = suite::run(id, &cfg);
        println!("{}", out.to_string().rsplit_once(" (").map_or(out.to_string(), |(s, _)| s.to_string()));
        if !out.passed() {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("all criteria passed");
        Ok(())
    } else {
        Err(CliError::Verify(format!("criteria {failed:?} failed")))
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    let g = &cli.global;
    match &cli.cmd {
        Cmd::Eval { file } => eval(g, file),
        Cmd::CheckRules { max_arity, rule } => check_rules(g, *max_arity, rule.as_deref()),
        Cmd::Synth { file, mode, output, report } => synth(g, file, *mode, output.as_deref(), *report),
        Cmd::CompilePerm { file, random, output, stats } => {
            compile_perm(g, file.as_deref(), *random, output.as_deref(), *stats)
        }
        Cmd::Extract { file, output } => extract(g, file, output.as_deref()),
        Cmd::Embed { file, output } => embed(g, file, output.as_deref()),
        Cmd::Simulate { file, input } => simulate_cmd(g, file, input.as_deref()),
        Cmd::Selftest { only } => selftest(g, only.as_deref()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("zhkit: {e}");
            ExitCode::from(e.code())
        }
    }
}
