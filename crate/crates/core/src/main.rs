use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;

use cyclotome::hochschild::DEFAULT_MAX_BASIS;
use cyclotome::workbench::{error_exit_code, run, Command, Format, JobSpec, Source};
use cyclotome::Field;

/// Exact Hochschild and cyclic homology workbench.
#[derive(Parser, Debug)]
#[command(name = "cyclotome", version)]
struct Cli {
    /// validate | hh | hc | hcminus | hcper | sbi | bicomplex | euler |
    /// chern | morita | tilting | ce-verify | ml-verify
    command: Command,
    /// Zoo entry, e.g. `dual_numbers`, `truncated:3`, `random_dg`.
    #[arg(long, conflicts_with = "input")]
    zoo: Option<String>,
    /// Presentation file (JSON).
    #[arg(long)]
    input: Option<PathBuf>,
    /// `Q` or `Fp:PRIME`.
    #[arg(long)]
    field: Option<Field>,
    #[arg(long, default_value_t = 4)]
    window: usize,
    #[arg(long = "pk-columns")]
    pk_columns: Option<usize>,
    #[arg(long, default_value = "json")]
    format: Format,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long = "max-basis", default_value_t = DEFAULT_MAX_BASIS)]
    max_basis: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print the elapsed time to stderr (never into the report).
    #[arg(long)]
    timings: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            // usage errors are validation failures; 2 is reserved for the cap
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    let source = match (cli.zoo, cli.input) {
        (Some(z), _) => Source::Zoo(z),
        (None, Some(p)) => Source::Input(p),
        (None, None) => Source::Default,
    };
    let job = JobSpec {
        command: cli.command,
        source,
        field: cli.field,
        window: cli.window,
        columns: cli.pk_columns,
        format: cli.format,
        seed: cli.seed,
        max_basis: cli.max_basis,
    };
    let start = Instant::now();
    let result = run(&job);
    if cli.timings {
        eprintln!("elapsed: {:.3}s", start.elapsed().as_secs_f64());
    }
    match result {
        Ok(report) => {
            let text = report.render(job.format);
            match &cli.out {
                Some(path) => {
                    if let Err(e) = std::fs::write(path, text) {
                        eprintln!("error: {e}");
                        return ExitCode::from(1);
                    }
                }
                None => print!("{text}"),
            }
            for f in &report.failures {
                eprintln!("failure: {f}");
            }
            ExitCode::from(report.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(error_exit_code(&e) as u8)
        }
    }
}
