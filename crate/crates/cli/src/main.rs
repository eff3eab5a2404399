use std::process::ExitCode;

use clap::Parser;

use ctreserve_cli::cli::{Cli, Command};
use ctreserve_cli::csv_io::{write_exposure, write_triangle};
use ctreserve_cli::output::{significant, OutputDir};
use ctreserve_cli::{run, CliResult};
use ctreserve_core::triangle::embedded_schnieper_dataset;

fn export(out: &std::path::Path) -> CliResult<()> {
    let data = embedded_schnieper_dataset();
    let mut dir = OutputDir::create(out)?;
    dir.write_with("N.csv", |w| write_triangle(data.new_claims(), w))?;
    dir.write_with("D.csv", |w| write_triangle(data.development(), w))?;
    dir.write_with("E.csv", |w| write_exposure(data.exposure(), w))?;
    for p in dir.written() {
        println!("wrote {}", p.display());
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Export { out } => export(&out),
        Command::Run(args) => args.into_config().and_then(|cfg| {
            let report = run(&cfg)?;
            let reg = &report.calibration.regression;
            println!(
                "X_hat = {:.4}, reserve = {:.4}",
                reg.x_hat, report.calibration.reserve.total
            );
            for r in &report.results {
                println!(
                    "{:<28} sqrt(MSEP) {:>8}%   99.5% excess {:>8}%",
                    r.method.label(),
                    significant(r.summary.msep_root_pct, 4),
                    significant(r.summary.q995_excess_pct, 4)
                );
            }
            for p in &report.files {
                println!("wrote {}", p.display());
            }
            Ok(())
        }),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
