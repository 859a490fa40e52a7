//! Command-line front end for the `postsel` library.
//!
//! Every subcommand renders its whole report into a `String` and picks an
//! exit code, so [`run`] is a pure function of its arguments (plus the
//! `POSTSEL_SEED` environment variable when no seed is given) and output
//! bytes can be asserted in tests.  Exit codes: 0 for success, 2 for a
//! negative verdict (an infeasible degree, a failed end-to-end check), 1 for
//! errors.

use std::fmt::Write as _;
use std::fs;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use postsel::acceptance::{run_criterion, CRITERION_COUNT};
use postsel::boolean::{certificate_complexity, cube, BitString, BooleanFunction};
use postsel::counting::{
    product_arity, strong_count_trace, verifier_conditional_one, weak_count_trace, CountRound,
    CountingParams,
};
use postsel::degree::{lp_feasible, maj_lower_bound, rdeg_plus, symmetric_lower_bound, LpMode};
use postsel::poly::PosRationalFunction;
use postsel::program::{seeded_rng, Outcome, Program};
use postsel::rat::{parse_rational, rat, Rational};
use postsel::transforms::{program_to_rational, rational_to_program};
use postsel::Error;

const EXIT_OK: i32 = 0;
const EXIT_ERR: i32 = 1;
const EXIT_NEGATIVE: i32 = 2;

/// Post-selected runs retried at most this often before giving up.
const ATTEMPT_CAP: u64 = 1 << 20;

type CmdResult = Result<(String, i32), String>;

#[derive(Parser)]
#[command(
    name = "postsel",
    version,
    about = "Exact tools for post-selected query algorithms",
    disable_help_subcommand = true
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print the exact outcome distribution of a program on an input
    Eval(EvalArgs),
    /// Sample seeded runs of a program and tally the outcomes
    Simulate(SimulateArgs),
    /// Convert between program text and rational-function text
    Convert {
        #[command(subcommand)]
        dir: ConvertCmd,
    },
    /// Certificate complexity of a Boolean function
    Certify(FnSel),
    /// Decide degree-d representability by exact LP, or sweep for the minimum degree
    Search(SearchArgs),
    /// Closed-form degree lower bounds for symmetric functions
    Bounds(BoundsArgs),
    /// Estimate the Hamming weight of a bit string by a doubling search
    Count(CountArgs),
    /// Re-run a numbered end-to-end check (1..=11, or `all`)
    Reproduce {
        /// Check number, or `all`
        id: String,
    },
}

/// Selects a Boolean function: a named builtin with a bit count, or a
/// truth-table file.
#[derive(Args)]
struct FnSel {
    /// Built-in name: or, and, maj, notmid, parity, const0, const1
    #[arg(long = "fn", value_name = "NAME")]
    function: Option<String>,
    /// Bit count for --fn
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Read the function from a file instead
    #[arg(long, value_name = "PATH", conflicts_with_all = ["function", "n"])]
    file: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    /// Program file
    #[arg(long, value_name = "PATH")]
    program: String,
    /// Input bits, leftmost character is x_1
    #[arg(long, value_name = "BITS")]
    x: Option<String>,
    /// Evaluate on every input of the cube instead
    #[arg(long, conflicts_with = "x")]
    all: bool,
    /// Treat the program as reading this many variables
    #[arg(long, value_name = "N")]
    n: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Program file
    #[arg(long, value_name = "PATH")]
    program: String,
    /// Input bits, leftmost character is x_1
    #[arg(long, value_name = "BITS")]
    x: String,
    /// Treat the program as reading this many variables
    #[arg(long, value_name = "N")]
    n: Option<usize>,
    /// Number of runs
    #[arg(long, default_value_t = 1000)]
    trials: u64,
    /// RNG seed (default: POSTSEL_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Resample aborted runs instead of counting them
    #[arg(long)]
    postselect: bool,
}

#[derive(Subcommand)]
enum ConvertCmd {
    /// Program text -> ratio of nonnegative literal polynomials
    Alg2rat {
        /// Program file
        #[arg(long, value_name = "PATH")]
        program: String,
        /// Treat the program as reading this many variables
        #[arg(long, value_name = "N")]
        n: Option<usize>,
        /// Write the result here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
    /// Ratio text -> program, by powering numerator and denominator
    Rat2alg {
        /// Rational-function file (P and Q blocks)
        #[arg(long, value_name = "PATH")]
        ratio: String,
        /// Power applied to both polynomials
        #[arg(long, default_value_t = 2)]
        power: usize,
        /// Weight of the denominator's exit branch
        #[arg(long, default_value = "2/9", value_name = "P/Q")]
        coin: String,
        /// Write the result here instead of stdout
        #[arg(long, value_name = "PATH")]
        out: Option<String>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Collapse symmetric instances, enumerate small general ones
    Auto,
    /// One constraint pair per input
    Full,
    /// One constraint pair per weight class (symmetric functions only)
    Collapsed,
}

impl From<ModeArg> for LpMode {
    fn from(m: ModeArg) -> LpMode {
        match m {
            ModeArg::Auto => LpMode::Auto,
            ModeArg::Full => LpMode::Full,
            ModeArg::Collapsed => LpMode::Collapsed,
        }
    }
}

#[derive(Args)]
struct SearchArgs {
    #[command(flatten)]
    sel: FnSel,
    /// Allowed conditional error on each input
    #[arg(long, default_value = "1/3", value_name = "P/Q")]
    eps: String,
    /// Test exactly this degree; without it, sweep upward from 0
    #[arg(long, value_name = "D")]
    degree: Option<usize>,
    /// Constraint layout
    #[arg(long, value_enum, default_value_t = ModeArg::Auto)]
    mode: ModeArg,
    /// Also print the LP dimensions and pivot count
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct BoundsArgs {
    #[command(flatten)]
    sel: FnSel,
    /// Allowed conditional error on each input
    #[arg(long, default_value = "1/3", value_name = "P/Q")]
    eps: String,
}

#[derive(Args)]
struct CountArgs {
    /// Bit string, or a file holding one
    #[arg(long, value_name = "BITS|PATH")]
    input: String,
    /// Failure probability budget
    #[arg(long, default_value = "1/3", value_name = "P/Q")]
    eps: String,
    /// Multiplicative accuracy p: estimate within factor 1 + 1/p
    #[arg(long, value_name = "P")]
    strong: Option<u64>,
    /// RNG seed (default: POSTSEL_SEED, then 0)
    #[arg(long)]
    seed: Option<u64>,
    /// Independent estimates, seeded seed, seed+1, ...
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Skip sampling: print the threshold-A verifier's exact conditional
    /// probability of answering 1 at every Hamming weight
    #[arg(long, value_name = "A")]
    exact_verifier: Option<usize>,
}

/// Parses the argument list (without the binary name) and runs the chosen
/// subcommand, returning the report text and the process exit code.
pub fn run(args: &[String]) -> (String, i32) {
    let mut argv = vec!["postsel".to_string()];
    argv.extend(args.iter().cloned());
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_ERR,
            };
            return (e.render().to_string(), code);
        }
    };
    let result = match cli.cmd {
        Cmd::Eval(a) => cmd_eval(a),
        Cmd::Simulate(a) => cmd_simulate(a),
        Cmd::Convert { dir } => cmd_convert(dir),
        Cmd::Certify(sel) => cmd_certify(sel),
        Cmd::Search(a) => cmd_search(a),
        Cmd::Bounds(a) => cmd_bounds(a),
        Cmd::Count(a) => cmd_count(a),
        Cmd::Reproduce { id } => cmd_reproduce(&id),
    };
    match result {
        Ok(done) => done,
        Err(msg) => (format!("error: {msg}\n"), EXIT_ERR),
    }
}

// -- shared loading ---------------------------------------------------------

fn read_file(path: &str) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))
}

fn load_function(sel: &FnSel) -> Result<BooleanFunction, String> {
    match (&sel.function, &sel.file) {
        (Some(name), None) => {
            let n = sel.n.ok_or("--n is required with --fn")?;
            BooleanFunction::builtin(name, n).map_err(|e| e.to_string())
        }
        (None, Some(path)) => {
            let text = read_file(path)?;
            BooleanFunction::parse_text(&text).map_err(|e| format!("{path}: {e}"))
        }
        _ => Err("pass either --fn NAME --n N or --file PATH".to_string()),
    }
}

/// Loads a program, widening its variable count to `min_n` when the text
/// infers fewer (a program need not read every input bit).
fn load_program(path: &str, min_n: usize) -> Result<Program, String> {
    let text = read_file(path)?;
    let p = Program::parse_text(&text, None).map_err(|e| format!("{path}: {e}"))?;
    if p.n() >= min_n {
        Ok(p)
    } else {
        Program::parse_text(&text, Some(min_n)).map_err(|e| format!("{path}: {e}"))
    }
}

fn parse_bits(s: &str) -> Result<BitString, String> {
    s.trim().parse().map_err(|e: Error| e.to_string())
}

/// A literal bit string, or the trimmed contents of a file.
fn load_input(arg: &str) -> Result<BitString, String> {
    let trimmed = arg.trim();
    if !trimmed.is_empty() && trimmed.chars().all(|c| c == '0' || c == '1') {
        return parse_bits(trimmed);
    }
    let text = read_file(arg)?;
    parse_bits(&text).map_err(|e| format!("{arg}: {e}"))
}

fn parse_eps(s: &str) -> Result<Rational, String> {
    let eps = parse_rational(s).map_err(|e| e.to_string())?;
    if eps < rat(0, 1) || eps >= rat(1, 2) {
        return Err(format!("the error bound must lie in [0, 1/2), got {s}"));
    }
    Ok(eps)
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.or_else(|| {
        std::env::var("POSTSEL_SEED")
            .ok()
            .and_then(|v| v.trim().parse().ok())
    })
    .unwrap_or(0)
}

fn ensure_nl(mut s: String) -> String {
    if !s.is_empty() && !s.ends_with('\n') {
        s.push('\n');
    }
    s
}

fn emit_text(text: String, out_path: Option<String>) -> CmdResult {
    match out_path {
        Some(path) => {
            fs::write(&path, &text).map_err(|e| format!("{path}: {e}"))?;
            Ok((format!("wrote {path}\n"), EXIT_OK))
        }
        None => Ok((ensure_nl(text), EXIT_OK)),
    }
}

// -- subcommands ------------------------------------------------------------

fn cmd_eval(a: EvalArgs) -> CmdResult {
    let mut out = String::new();
    if a.all {
        let p = load_program(&a.program, a.n.unwrap_or(0))?;
        if p.n() == 0 {
            return Err("the program reads no variables; pass --n to pick an input length".into());
        }
        for x in cube(p.n()) {
            let d = p.exact_distribution(&x);
            writeln!(out, "x={x} p0={} p1={} pbot={}", d.p0, d.p1, d.pbot).unwrap();
        }
        return Ok((out, EXIT_OK));
    }
    let xs = a.x.as_deref().ok_or("pass --x BITS or --all")?;
    let x = parse_bits(xs)?;
    let p = load_program(&a.program, x.len().max(a.n.unwrap_or(0)))?;
    if x.len() != p.n() {
        return Err(format!(
            "input has {} bits but the program reads {} variables",
            x.len(),
            p.n()
        ));
    }
    let d = p.exact_distribution(&x);
    writeln!(out, "p0={} p1={} pbot={}", d.p0, d.p1, d.pbot).unwrap();
    Ok((out, EXIT_OK))
}

fn cmd_simulate(a: SimulateArgs) -> CmdResult {
    let x = parse_bits(&a.x)?;
    let p = load_program(&a.program, x.len().max(a.n.unwrap_or(0)))?;
    if x.len() != p.n() {
        return Err(format!(
            "input has {} bits but the program reads {} variables",
            x.len(),
            p.n()
        ));
    }
    let seed = resolve_seed(a.seed);
    let mut rng = seeded_rng(seed);
    let mut out = String::new();
    if a.postselect {
        let (mut zeros, mut ones) = (0u64, 0u64);
        for _ in 0..a.trials {
            if p.run_postselected(&x, &mut rng, ATTEMPT_CAP)
                .map_err(|e| e.to_string())?
            {
                ones += 1;
            } else {
                zeros += 1;
            }
        }
        writeln!(
            out,
            "trials={} seed={seed} zeros={zeros} ones={ones} (post-selected)",
            a.trials
        )
        .unwrap();
        let (c0, c1) = p.conditional_distribution(&x).map_err(|e| e.to_string())?;
        writeln!(out, "exact: cond0={c0} cond1={c1}").unwrap();
    } else {
        let (mut zeros, mut ones, mut aborts) = (0u64, 0u64, 0u64);
        for _ in 0..a.trials {
            match p.sample(&x, &mut rng) {
                Outcome::Zero => zeros += 1,
                Outcome::One => ones += 1,
                Outcome::Bot => aborts += 1,
            }
        }
        writeln!(
            out,
            "trials={} seed={seed} zeros={zeros} ones={ones} aborts={aborts}",
            a.trials
        )
        .unwrap();
        let d = p.exact_distribution(&x);
        writeln!(out, "exact: p0={} p1={} pbot={}", d.p0, d.p1, d.pbot).unwrap();
    }
    Ok((out, EXIT_OK))
}

fn cmd_convert(dir: ConvertCmd) -> CmdResult {
    match dir {
        ConvertCmd::Alg2rat { program, n, out } => {
            let p = load_program(&program, n.unwrap_or(0))?;
            let ratio = program_to_rational(&p).map_err(|e| e.to_string())?;
            emit_text(ratio.to_text(), out)
        }
        ConvertCmd::Rat2alg {
            ratio,
            power,
            coin,
            out,
        } => {
            let text = read_file(&ratio)?;
            let r = PosRationalFunction::parse_text(&text).map_err(|e| format!("{ratio}: {e}"))?;
            let c = parse_rational(&coin).map_err(|e| e.to_string())?;
            let p = rational_to_program(&r, power, &c).map_err(|e| e.to_string())?;
            emit_text(p.to_text(), out)
        }
    }
}

fn cmd_certify(sel: FnSel) -> CmdResult {
    let f = load_function(&sel)?;
    let cc = certificate_complexity(&f).map_err(|e| e.to_string())?;
    Ok((format!("C0={} C1={} C={}\n", cc.c0, cc.c1, cc.c), EXIT_OK))
}

fn cmd_search(a: SearchArgs) -> CmdResult {
    let f = load_function(&a.sel)?;
    let eps = parse_eps(&a.eps)?;
    let mode = LpMode::from(a.mode);
    let mut out = String::new();
    let (report, code) = match a.degree {
        Some(d) => {
            let r = lp_feasible(&f, &eps, d, mode).map_err(|e| e.to_string())?;
            writeln!(
                out,
                "degree {d}: {}",
                if r.feasible { "feasible" } else { "infeasible" }
            )
            .unwrap();
            let code = if r.feasible { EXIT_OK } else { EXIT_NEGATIVE };
            (r, code)
        }
        None => {
            let (d, r) = rdeg_plus(&f, &eps, mode).map_err(|e| e.to_string())?;
            writeln!(out, "rdeg_plus = {d}").unwrap();
            (r, EXIT_OK)
        }
    };
    if a.trace {
        writeln!(
            out,
            "lp: {} rows x {} cols, {} pivots, {}",
            report.rows,
            report.cols,
            report.pivots,
            if report.collapsed {
                "collapsed"
            } else {
                "per-input"
            }
        )
        .unwrap();
    }
    if let Some(w) = &report.witness {
        out.push_str(&ensure_nl(w.to_text()));
    }
    Ok((out, code))
}

fn cmd_bounds(a: BoundsArgs) -> CmdResult {
    let f = load_function(&a.sel)?;
    let eps = parse_eps(&a.eps)?;
    let mut out = String::new();
    let mut any = false;
    if f.n() % 2 == 0 && f == BooleanFunction::maj(f.n()) {
        let d = maj_lower_bound(f.n(), &eps).map_err(|e| e.to_string())?;
        writeln!(out, "majority_bound: d >= {d}").unwrap();
        any = true;
    }
    match symmetric_lower_bound(&f, &eps) {
        Ok(d) => {
            writeln!(out, "symmetric_bound: d >= {d}").unwrap();
            any = true;
        }
        Err(Error::NotSymmetric | Error::NotTotal | Error::ConstantFunction { .. }) => {}
        Err(e) => return Err(e.to_string()),
    }
    if !any {
        writeln!(
            out,
            "no closed-form bound applies (needs a non-constant total symmetric function)"
        )
        .unwrap();
    } else if eps != rat(1, 3) {
        writeln!(
            out,
            "note: the closed-form statement and its derivation disagree away from error 1/3; \
             these bounds follow the derivation"
        )
        .unwrap();
    }
    Ok((out, EXIT_OK))
}

fn render_rounds(out: &mut String, rounds: &[CountRound]) {
    if rounds.is_empty() {
        writeln!(out, "  exact check: the input has weight 0").unwrap();
        return;
    }
    for r in rounds {
        writeln!(
            out,
            "  A={}: {}/{} ones -> {}",
            r.threshold,
            r.ones,
            r.reps,
            if 2 * r.ones < r.reps {
                "stop"
            } else {
                "continue"
            }
        )
        .unwrap();
    }
}

fn cmd_count(a: CountArgs) -> CmdResult {
    let x = load_input(&a.input)?;
    let eps = parse_eps(&a.eps)?;
    let n = x.len();
    let mut out = String::new();
    if let Some(threshold) = a.exact_verifier {
        writeln!(out, "exact verifier: n={n} A={threshold} k=2").unwrap();
        for w in 0..=n {
            let c = verifier_conditional_one(n, 2, threshold, w).map_err(|e| e.to_string())?;
            writeln!(out, "weight {w}: conditional-1 = {c}").unwrap();
        }
        return Ok((out, EXIT_OK));
    }
    let base = resolve_seed(a.seed);
    let strong_params = match a.strong {
        Some(p) => {
            let params = CountingParams::new(n, eps.clone())
                .and_then(|c| c.with_p(p))
                .map_err(|e| e.to_string())?;
            let t = product_arity(p).map_err(|e| e.to_string())?;
            writeln!(out, "strong mode: p={p}, product arity t={t}").unwrap();
            Some(params)
        }
        None => None,
    };
    let mut estimates = Vec::new();
    for trial in 0..a.trials {
        let seed = base.wrapping_add(trial);
        writeln!(out, "trial {trial}: seed={seed}").unwrap();
        let (estimate, rounds) = match &strong_params {
            Some(params) => strong_count_trace(&x, params, seed).map_err(|e| e.to_string())?,
            None => weak_count_trace(&x, &eps, seed).map_err(|e| e.to_string())?,
        };
        render_rounds(&mut out, &rounds);
        writeln!(out, "estimate: {estimate}").unwrap();
        estimates.push(estimate);
    }
    if a.trials > 1 {
        writeln!(
            out,
            "estimates: {} trials, min={} max={}",
            estimates.len(),
            estimates.iter().min().unwrap(),
            estimates.iter().max().unwrap()
        )
        .unwrap();
    }
    Ok((out, EXIT_OK))
}

fn cmd_reproduce(id: &str) -> CmdResult {
    let ids: Vec<usize> = if id == "all" {
        (1..=CRITERION_COUNT).collect()
    } else {
        let k: usize = id
            .parse()
            .ok()
            .filter(|k| (1..=CRITERION_COUNT).contains(k))
            .ok_or(format!(
                "the check id must be 1..={CRITERION_COUNT} or `all`, got `{id}`"
            ))?;
        vec![k]
    };
    let mut out = String::new();
    let mut all_pass = true;
    for k in ids {
        let r = run_criterion(k).map_err(|e| e.to_string())?;
        writeln!(
            out,
            "criterion {}: {} - {}",
            r.id,
            if r.pass { "PASS" } else { "FAIL" },
            r.title
        )
        .unwrap();
        for line in &r.details {
            writeln!(out, "  {line}").unwrap();
        }
        all_pass &= r.pass;
    }
    Ok((out, if all_pass { EXIT_OK } else { EXIT_NEGATIVE }))
}
