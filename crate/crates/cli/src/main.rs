use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;
use serde::Serialize;
use serde_json::json;

use vahlen::compact::{dirac_spectrum, dm_eigenvalue, z_eval, z_exact, DmForm, HalfInt, Sign};
use vahlen::suites::{run_suite, SuiteConfig, SuiteReport, SUITES};
use vahlen::vahlen::ExtPoint;

mod matrix;

/// Verification suites for the Vahlen-matrix model of the Möbius group and
/// the spinor principal series.
#[derive(Parser, Debug)]
#[command(
    name = "vahlen",
    version,
    about,
    args_conflicts_with_subcommands = true
)]
struct Cli {
    #[command(subcommand)]
    command: Option<Command>,
    #[command(flatten)]
    run: RunArgs,
}

#[derive(Args, Debug)]
struct RunArgs {
    /// Suite to run: algebra, spin, group, sphere, covariance, residues,
    /// knapp-stein, spectra or all.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Restrict to one dimension n (default: each suite's own range).
    #[arg(long)]
    n: Option<usize>,
    /// Restrict the Dirac power order k (covariance, residues, spectra).
    #[arg(long)]
    k: Option<usize>,
    /// Restrict m in the spectral suite.
    #[arg(long)]
    m: Option<usize>,
    /// lambda for the Knapp–Stein check (default 0.3) and the E_1 check
    /// (default random).
    #[arg(long, allow_hyphen_values = true)]
    lambda: Option<f64>,
    /// Master seed; reports are reproducible per seed.
    #[arg(long, default_value_t = 2024)]
    seed: u64,
    /// Override every tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Override the case count of every randomized check.
    #[arg(long)]
    cases: Option<usize>,
    /// Gauss–Legendre nodes per radial panel (default 24).
    #[arg(long)]
    quad_radial: Option<usize>,
    /// Angular nodes (default 48 for n = 2, 24 for n = 3).
    #[arg(long)]
    quad_angular: Option<usize>,
    /// Write the JSON report to this path ("-" for stdout).
    #[arg(long)]
    json: Option<String>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Apply a Clifford matrix to a point of E^n ∪ {∞}.
    Apply {
        #[arg(long)]
        n: usize,
        /// Product of factors, e.g. "weyl * translation(1,0) * dilation(2)".
        #[arg(long, default_value = "identity", conflicts_with = "entries")]
        matrix: String,
        /// Explicit blade coefficients as JSON: [a, b, c, d].
        #[arg(long)]
        entries: Option<String>,
        /// Comma-separated coordinates or "inf".
        #[arg(long, allow_hyphen_values = true)]
        point: String,
    },
    /// Tabulate Dirac eigenvalues, Z at lambda = -1/2 - m and the
    /// eigenvalues of D(D^2 - 1)...(D^2 - m^2).
    Spectrum {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 0)]
        m: usize,
        /// Single k; otherwise 0..=kmax.
        #[arg(long)]
        k: Option<usize>,
        #[arg(long, default_value_t = 3)]
        kmax: usize,
    },
}

fn usage(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn point_json(p: &ExtPoint) -> serde_json::Value {
    match p {
        ExtPoint::Infinity => json!("infinity"),
        ExtPoint::Finite(x) => json!(x.coords()),
    }
}

fn apply(n: usize, matrix: &str, entries: Option<&str>, point: &str) -> ExitCode {
    let g = match entries {
        Some(e) => matrix::parse_entries(n, e),
        None => matrix::parse_matrix(n, matrix),
    };
    let g = match g {
        Ok(g) => g,
        Err(e) => return usage(e),
    };
    let p = match matrix::parse_point(n, point) {
        Ok(p) => p,
        Err(e) => return usage(e),
    };
    let image = g.apply(&p);
    let kappa = p
        .finite()
        .and_then(|x| g.conformal_data(x).ok())
        .map(|c| c.kappa);
    let out = json!({
        "n": n,
        "point": point_json(&p),
        "image": point_json(&image),
        "kappa": kappa,
    });
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    ExitCode::SUCCESS
}

#[derive(Serialize)]
struct SpectrumRow {
    k: usize,
    sign: Sign,
    dirac: HalfInt,
    z: String,
    z_eval: Option<f64>,
    dm_factored: String,
    dm_polynomial: String,
}

fn spectrum(n: usize, m: usize, k: Option<usize>, kmax: usize) -> ExitCode {
    if !(2..=8).contains(&n) {
        return usage(format!("n must lie in 2..=8, got {n}"));
    }
    let ks: Vec<usize> = match k {
        Some(k) => vec![k],
        None => (0..=kmax).collect(),
    };
    let mut rows = Vec::new();
    for k in ks {
        for sign in Sign::BOTH {
            let j = HalfInt::from_twice(2 * k as i64 + 1);
            rows.push(SpectrumRow {
                k,
                sign,
                dirac: dirac_spectrum(k, sign, n),
                z: z_exact(k, sign, m, n).to_string(),
                z_eval: z_eval(j, sign, Complex64::new(-0.5 - m as f64, 0.0), n)
                    .ok()
                    .map(|z| z.re),
                dm_factored: dm_eigenvalue(m, k, sign, n, DmForm::Factored).to_string(),
                dm_polynomial: dm_eigenvalue(m, k, sign, n, DmForm::Polynomial).to_string(),
            });
        }
    }
    let out = json!({ "n": n, "m": m, "rows": rows });
    println!(
        "{}",
        serde_json::to_string_pretty(&out).expect("serializable")
    );
    ExitCode::SUCCESS
}

fn write_json(path: &str, reports: &[SuiteReport]) -> std::io::Result<()> {
    let text = if reports.len() == 1 {
        serde_json::to_string_pretty(&reports[0])
    } else {
        serde_json::to_string_pretty(reports)
    }
    .expect("reports serialize");
    if path == "-" {
        let mut out = std::io::stdout().lock();
        writeln!(out, "{text}")
    } else {
        fs::write(path, text + "\n")
    }
}

fn run(args: RunArgs) -> ExitCode {
    if args.suite != "all" && !SUITES.contains(&args.suite.as_str()) {
        return usage(format!(
            "unknown suite {:?}; expected one of {} or all",
            args.suite,
            SUITES.join(", ")
        ));
    }
    let cfg = SuiteConfig {
        n: args.n,
        k: args.k,
        m: args.m,
        lambda: args.lambda,
        seed: args.seed,
        tol: args.tol,
        cases: args.cases,
        quad_radial: args.quad_radial,
        quad_angular: args.quad_angular,
    };
    let reports = match run_suite(&args.suite, &cfg) {
        Ok(r) => r,
        Err(e) => return usage(e),
    };
    let to_stdout = args.json.as_deref() == Some("-");
    for r in &reports {
        let line = r.summary();
        if to_stdout {
            eprintln!("{line}");
        } else {
            println!("{line}");
        }
        for f in r.failures.iter().take(5) {
            match (&f.error, f.residual) {
                (Some(e), _) => eprintln!("  case {}: {e}", f.case),
                (None, Some(res)) => eprintln!("  case {}: residual {res:.3e}", f.case),
                (None, None) => {}
            }
        }
    }
    if let Some(path) = &args.json {
        if let Err(e) = write_json(path, &reports) {
            eprintln!("error: cannot write {path}: {e}");
            return ExitCode::from(2);
        }
    }
    if reports.iter().all(|r| r.pass) {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Some(Command::Apply {
            n,
            matrix,
            entries,
            point,
        }) => apply(n, &matrix, entries.as_deref(), &point),
        Some(Command::Spectrum { n, m, k, kmax }) => spectrum(n, m, k, kmax),
        None => run(cli.run),
    }
}
