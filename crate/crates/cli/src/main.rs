mod cli;
mod commands;
mod config;
mod output;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use cli::{Cli, Command};
use config::{FileConfig, RunConfig};

const EXIT_VALIDATION: u8 = 1;
const EXIT_NUMERICAL: u8 = 2;
const EXIT_VERIFY_FAILED: u8 = 3;

fn classify(err: &anyhow::Error) -> u8 {
    let numerical = err
        .chain()
        .filter_map(|e| e.downcast_ref::<ricci_dynamo::Error>())
        .any(ricci_dynamo::Error::is_numerical);
    if numerical {
        EXIT_NUMERICAL
    } else {
        EXIT_VALIDATION
    }
}

fn run(cli: Cli) -> anyhow::Result<u8> {
    let file = match &cli.common.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    let cfg = RunConfig::merge(file, &cli.common)?;
    if cli.command == Command::Verify {
        let outcomes = commands::verify();
        for o in &outcomes {
            println!("{o}");
        }
        let failed = outcomes.iter().filter(|o| !o.passed).count();
        println!(
            "{} of {} criteria passed",
            outcomes.len() - failed,
            outcomes.len()
        );
        return Ok(if failed == 0 { 0 } else { EXIT_VERIFY_FAILED });
    }
    let table = commands::run_table(cli.command, &cfg)?;
    commands::write_table(&table, &cfg)?;
    Ok(0)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_VALIDATION),
            };
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(classify(&e))
        }
    }
}
