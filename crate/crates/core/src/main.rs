use std::io::Read;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cauchy_dual::cli::{parse_spec, run_demo, run_suite, Overrides, Report, Verbosity};
use cauchy_dual::Error;

/// Cauchy duals of weighted shifts on directed trees.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Args {
    /// JSON run specification (`-` reads stdin).
    #[arg(long, conflicts_with = "demo", required_unless_present = "demo")]
    spec: Option<PathBuf>,
    /// Run a catalog demo instead of a spec.
    #[arg(long)]
    demo: Option<String>,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the last computed moment sequence as CSV.
    #[arg(long)]
    csv: Option<PathBuf>,
    /// Override every tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Default number of moments.
    #[arg(long)]
    nmax: Option<usize>,
    /// Override the materialized depth.
    #[arg(long)]
    depth: Option<usize>,
    /// Print nothing on success.
    #[arg(long)]
    quiet: bool,
}

fn run(args: &Args) -> Result<(Report, Option<PathBuf>, Option<PathBuf>, bool), Error> {
    if let Some(t) = args.tol {
        if !(t.is_finite() && t > 0.0) {
            return Err(Error::Usage(format!("--tol must be positive, got {t}")));
        }
    }
    let overrides = Overrides {
        tol: args.tol,
        nmax: args.nmax,
        depth: args.depth,
    };
    if let Some(name) = &args.demo {
        return Ok((
            run_demo(name, &overrides)?,
            args.out.clone(),
            args.csv.clone(),
            args.quiet,
        ));
    }
    let path = args.spec.as_ref().expect("clap enforces --spec or --demo");
    let text = if path.as_os_str() == "-" {
        let mut s = String::new();
        std::io::stdin().read_to_string(&mut s).map_err(|e| Error::Io {
            path: "-".into(),
            message: e.to_string(),
        })?;
        s
    } else {
        std::fs::read_to_string(path).map_err(|e| Error::Io {
            path: path.display().to_string(),
            message: e.to_string(),
        })?
    };
    let spec = parse_spec(&text)?;
    let report = run_suite(&spec, &overrides)?;
    let quiet = args.quiet || spec.output.verbosity == Verbosity::Quiet;
    Ok((
        report,
        args.out.clone().or(spec.output.json),
        args.csv.clone().or(spec.output.csv),
        quiet,
    ))
}

fn write(path: &PathBuf, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::Io {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn main() -> ExitCode {
    let args = Args::parse();
    let outcome = run(&args).and_then(|(report, out, csv, quiet)| {
        match &out {
            Some(p) => {
                write(p, &report.to_json())?;
                if !quiet {
                    print!("{}", report.summary());
                }
            }
            None if !quiet => println!("{}", report.to_json()),
            None => {}
        }
        if let Some(p) = &csv {
            match &report.csv {
                Some(text) => write(p, text)?,
                None => eprintln!("warning: --csv given but no moments command ran"),
            }
        }
        Ok(report.exit_code())
    });
    match outcome {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
