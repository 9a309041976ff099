//! Front end for `lorentz-volume`: argument parsing, command dispatch and
//! table / CSV / JSON rendering of [`OutputRecord`]s.
//!
//! Exit statuses: 0 success, 2 invalid input, 3 precision-flagged result
//! under `--strict`, 4 a construction ran out of budget (partial results are
//! still printed).

pub mod args;
pub mod commands;
pub mod record;
pub mod render;

pub use args::{Cli, Command, Format};
pub use commands::{EXIT_CONSTRUCTION, EXIT_OK, EXIT_PRECISION, EXIT_USAGE};
pub use record::{OutputRecord, SCHEMA_VERSION};
pub use render::{render, sci};

use lorentz_volume::PrecisionContext;

/// What one invocation prints and how it exits.
#[derive(Debug)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Outcome {
    let ctx = match PrecisionContext::new(cli.bits) {
        Ok(c) => c,
        Err(e) => {
            return Outcome {
                stdout: String::new(),
                stderr: format!("error: {e}\n"),
                code: EXIT_USAGE,
            }
        }
    };
    let result = match &cli.command {
        Command::Volume(a) => commands::volume(a, &ctx),
        Command::Table(a) => commands::table(a, &ctx),
        Command::Asymptotics(a) => commands::asymptotics(a, &ctx),
        Command::Ratio(a) => commands::ratio(a, &ctx),
        Command::Entropy(a) => commands::entropy(a, &ctx),
    };
    match result {
        Ok(done) => {
            let code = if cli.strict && done.flagged {
                EXIT_PRECISION
            } else {
                EXIT_OK
            };
            let stderr = if code == EXIT_PRECISION {
                "error: precision-flagged results under --strict\n".to_string()
            } else {
                String::new()
            };
            Outcome {
                stdout: render(&done.record, cli.format),
                stderr,
                code,
            }
        }
        Err(f) => Outcome {
            stdout: f
                .partial
                .map(|r| render(&r, cli.format))
                .unwrap_or_default(),
            stderr: format!("error: {}\n", f.message),
            code: f.code,
        },
    }
}
