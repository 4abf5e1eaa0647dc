use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use orthospace::decomp::opt_decompose;
use orthospace::harness::{build_example_46, certify_example_46, run_example_46, run_on_defaults, run_suite, unsupported_reason, SuiteId, SuiteReport, DEFAULT_TOL, EXAMPLE_46_GRID};
use orthospace::ortho::{p_orthogonal_numeric, OrthoConfig};
use orthospace::spaces::{Exponent, SpaceSpec};
use orthospace::spec_file::parse_space_spec;
use orthospace::support::{crust_probe, positive_support, support_functional};
use orthospace::{Error, Vector};

#[derive(Parser)]
#[command(name = "orthospace", version, about = "p-orthogonality checks in finite-dimensional ordered normed spaces")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a property suite (or `all`) and emit JSON reports.
    Verify {
        /// Suite id or `all`.
        #[arg(value_parser = suite_arg)]
        suite: String,
        /// Space spec file; omitted means the default families.
        #[arg(long)]
        space: Option<PathBuf>,
        #[arg(long, default_value_t = 500)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Write the reports here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Grid size for ex46_nonuniqueness.
        #[arg(long, default_value_t = EXAMPLE_46_GRID)]
        n: usize,
    },
    /// Decide x ⊥_p y on the k grid.
    Ortho {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        x: String,
        #[arg(long, allow_hyphen_values = true)]
        y: String,
        /// Exponent, a number >= 1 or `inf`.
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = DEFAULT_TOL)]
        tol: f64,
    },
    /// Split v into positive parts with near-minimal p-aggregate.
    Decompose {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        #[arg(long)]
        p: String,
        #[arg(long, default_value_t = 1e-6)]
        eps: f64,
    },
    /// A norming functional of v.
    Support {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        v: String,
        /// Require a positive functional (v must be positive).
        #[arg(long)]
        positive: bool,
    },
    /// A positive norm-one functional vanishing on u, with the partner e - u.
    Crust {
        #[arg(long)]
        space: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        u: String,
    },
    /// The two decompositions of cos on a uniform grid.
    Example46 {
        #[arg(long, default_value_t = EXAMPLE_46_GRID)]
        n: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn suite_arg(s: &str) -> Result<String, String> {
    if s == "all" || s.parse::<SuiteId>().is_ok() {
        return Ok(s.to_string());
    }
    let names: Vec<&str> = SuiteId::ALL.iter().map(|id| id.name()).collect();
    Err(format!("unknown suite; expected `all` or one of: {}", names.join(", ")))
}

/// Exit code and message for a failed command.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Input(_) | Error::Unsupported(_) => 2,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

fn input(msg: impl Into<String>) -> Failure {
    Failure(2, msg.into())
}

fn load_space(path: &Path) -> Result<SpaceSpec, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| input(format!("cannot read {}: {e}", path.display())))?;
    Ok(parse_space_spec(&text)?)
}

fn parse_csv(name: &str, text: &str) -> Result<Vector, Failure> {
    let coords = text
        .split(',')
        .map(|t| t.parse::<f64>().map_err(|_| input(format!("--{name}: {t:?} is not a decimal number"))))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Vector::new(coords)?)
}

fn parse_exponent(text: &str) -> Result<Exponent, Failure> {
    if text == "inf" {
        return Ok(Exponent::Infinity);
    }
    let p = text.parse::<f64>().map_err(|_| input(format!("--p: invalid exponent {text:?}")))?;
    Ok(Exponent::new(p)?)
}

fn emit(value: &impl Serialize, out: Option<&Path>) -> Result<(), Failure> {
    let text = serde_json::to_string_pretty(value).expect("outputs serialise") + "\n";
    match out {
        Some(path) => std::fs::write(path, text).map_err(|e| input(format!("cannot write {}: {e}", path.display()))),
        None => {
            // a closed pipe is not worth a panic
            let _ = std::io::stdout().lock().write_all(text.as_bytes());
            Ok(())
        }
    }
}

fn summary(r: &SuiteReport) {
    let state = if r.is_unsupported() {
        "UNSUPPORTED"
    } else if r.counterexamples.is_empty() {
        "ok"
    } else {
        "FAIL"
    };
    eprintln!("{:<28} {:<11} {:>5}/{:<5} {:>9.1} ms  {}", r.suite.name(), state, r.passes, r.samples, r.elapsed_ms, r.space);
}

fn verify(suite: &str, space: Option<&Path>, samples: usize, tol: f64, seed: u64, n: usize) -> Result<(Vec<SuiteReport>, bool), Failure> {
    let requested: Vec<SuiteId> = if suite == "all" { SuiteId::ALL.to_vec() } else { vec![suite.parse::<SuiteId>()?] };
    let explicit = suite != "all";
    let space = space.map(load_space).transpose()?;
    let run_one = |id: SuiteId| -> Vec<SuiteReport> {
        match (&space, id) {
            (_, SuiteId::Ex46Nonuniqueness) => vec![run_example_46(n, tol.min(1e-12), seed)],
            (Some(s), _) => vec![run_suite(id, s, samples, tol, seed)],
            (None, _) => run_on_defaults(id, samples, tol, seed),
        }
    };
    // suites are independent and their streams depend only on (seed, suite)
    let reports: Vec<SuiteReport> = std::thread::scope(|scope| {
        let handles: Vec<_> = requested.iter().map(|id| scope.spawn(move || run_one(*id))).collect();
        handles.into_iter().flat_map(|h| h.join().expect("suite thread panicked")).collect()
    });
    let mut failed = reports.iter().any(|r| !r.counterexamples.is_empty());
    if explicit {
        failed |= reports.iter().any(|r| r.is_unsupported());
        if let (Some(s), Some(id)) = (&space, requested.first()) {
            if let Some(reason) = unsupported_reason(*id, s) {
                eprintln!("{id} is not supported on this space: {reason}");
            }
        }
    }
    Ok((reports, failed))
}

fn run(cli: Cli) -> Result<u8, Failure> {
    match cli.command {
        Command::Verify { suite, space, samples, tol, seed, out, n } => {
            if !(tol > 0.0) {
                return Err(input("--tol must be positive"));
            }
            let (reports, failed) = verify(&suite, space.as_deref(), samples, tol, seed, n)?;
            for r in &reports {
                summary(r);
            }
            emit(&reports, out.as_deref())?;
            Ok(u8::from(failed))
        }
        Command::Ortho { space, x, y, p, tol } => {
            let space = load_space(&space)?;
            let v = p_orthogonal_numeric(&space, &parse_csv("x", &x)?, &parse_csv("y", &y)?, parse_exponent(&p)?, &OrthoConfig::with_tol(tol))?;
            emit(&json!({ "verdict": v.verdict, "worst_residual": v.worst_residual, "witness_k": v.witness_k }), None)?;
            Ok(0)
        }
        Command::Decompose { space, v, p, eps } => {
            let space = load_space(&space)?;
            let d = opt_decompose(&space, &parse_csv("v", &v)?, parse_exponent(&p)?, eps)?;
            emit(&d, None)?;
            Ok(0)
        }
        Command::Support { space, v, positive } => {
            let space = load_space(&space)?;
            let v = parse_csv("v", &v)?;
            let r = if positive { positive_support(&space, &v)? } else { support_functional(&space, &v)? };
            emit(&r, None)?;
            Ok(0)
        }
        Command::Crust { space, u } => {
            let space = load_space(&space)?;
            let c = crust_probe(&space, &parse_csv("u", &u)?)?;
            emit(&json!({ "crust": c }), None)?;
            Ok(0)
        }
        Command::Example46 { n, out } => {
            let ex = build_example_46(n)?;
            let cert = certify_example_46(&ex, 1e-12)?;
            let passed = cert.passed(1e-12);
            eprintln!("max gap {} between f+ and g1; certified: {passed}", cert.max_gap);
            emit(&json!({ "example": ex, "certificate": cert, "passed": passed }), out.as_deref())?;
            Ok(u8::from(!passed))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
