use clap::Parser;
use slrf_cli::args::{Cli, Command};
use slrf_cli::{cell, compare, runner, settings, CliError};

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // clap exits 2 by default; 2 is reserved for numerical failures
            // here, so argument problems report as configuration errors.
            if e.use_stderr() {
                eprintln!("{e}");
                std::process::exit(1);
            }
            print!("{e}");
            std::process::exit(0);
        }
    };
    if let Err(e) = dispatch(&cli) {
        eprintln!("{e}");
        std::process::exit(e.exit_code());
    }
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Run(args) => {
            let settings = settings::resolve(args)?;
            let outcome = runner::run(&settings)?;
            println!(
                "run complete ({:?}); outputs in {}",
                outcome.termination,
                outcome.out_dir.display()
            );
            Ok(())
        }
        Command::Compare(args) => {
            let report = compare::compare_dirs(&args.dirs, args.time_tol)?;
            compare::print_report(&report);
            if let Some(path) = &args.out {
                let csv = compare::report_csv(&report);
                std::fs::write(path, csv).map_err(CliError::from)?;
            }
            Ok(())
        }
        Command::CellCheck(args) => cell::cell_check(args),
    }
}
