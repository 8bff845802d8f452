//! Batch driver for convergence studies and the invariant self-test.

mod config;

use std::fs;
use std::process::ExitCode;

use brickcurl::selftest::{run_selftest, SelftestOptions};
use brickcurl::study::{Study, StudyConfig};
use brickcurl::system::SolverParams;
use brickcurl::Error;
use clap::Parser;

use config::{Cli, OutputFormat, RunConfig};

const EXIT_CONFIG: u8 = 2;
const EXIT_SOLVER: u8 = 3;
const EXIT_INVARIANT: u8 = 4;

fn exit_code(err: &Error) -> u8 {
    match err {
        Error::MaxIterations { .. } | Error::SingularSystem(_) => EXIT_SOLVER,
        Error::EmptyMesh | Error::NonDivisibleMesh { .. } | Error::ZeroQuadratureOrder => EXIT_CONFIG,
        _ => EXIT_INVARIANT,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match RunConfig::resolve(cli, |k| std::env::var(k).ok()) {
        Ok(c) => c,
        Err(msg) => {
            eprintln!("error: {msg}");
            return ExitCode::from(EXIT_CONFIG);
        }
    };
    if let Some(t) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("error: cannot configure {t} threads: {e}");
            return ExitCode::from(EXIT_CONFIG);
        }
    }
    if cfg.selftest {
        return selftest(&cfg);
    }
    study(&cfg)
}

fn selftest(cfg: &RunConfig) -> ExitCode {
    let options = SelftestOptions {
        vk_fault: cfg.fault,
        seed: 20,
    };
    match run_selftest(options) {
        Ok(report) => {
            for check in &report.checks {
                println!("{check}");
            }
            let failed = report.failures().count();
            println!(
                "{} checks, {failed} failed, {:.1}s",
                report.checks.len(),
                report.seconds
            );
            if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_INVARIANT)
            }
        }
        Err(e) => {
            println!("FAIL selftest aborted: {e}");
            ExitCode::from(EXIT_INVARIANT)
        }
    }
}

fn study(cfg: &RunConfig) -> ExitCode {
    if cfg.ns.iter().any(|&n| n > config::DESK_MAX_N) {
        eprintln!("warning: n > {} is an extended run and may take hours", config::DESK_MAX_N);
    }
    let study_cfg = StudyConfig {
        quad_order: cfg.quad_order,
        solver: SolverParams {
            tol: cfg.tol,
            max_iterations: cfg.max_iterations,
        },
    };
    let result = Study::new(study_cfg).and_then(|s| {
        s.run(&cfg.ns, &cfg.schemes, &cfg.quantities, |line| eprintln!("{line}"))
    });
    let reports = match result {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Err(e) = fs::create_dir_all(&cfg.out) {
        eprintln!("error: cannot create {}: {e}", cfg.out.display());
        return ExitCode::from(EXIT_CONFIG);
    }
    for report in &reports {
        let stem = format!("{}_{}", report.scheme, report.quantity);
        let md = report.to_markdown();
        println!("{md}");
        let mut files = Vec::new();
        if matches!(cfg.format, OutputFormat::Csv | OutputFormat::Both) {
            files.push((format!("{stem}.csv"), report.to_csv()));
        }
        if matches!(cfg.format, OutputFormat::Markdown | OutputFormat::Both) {
            files.push((format!("{stem}.md"), md));
        }
        for (name, body) in files {
            if let Err(e) = fs::write(cfg.out.join(&name), body) {
                eprintln!("error: cannot write {name}: {e}");
                return ExitCode::from(EXIT_CONFIG);
            }
        }
    }
    ExitCode::SUCCESS
}
