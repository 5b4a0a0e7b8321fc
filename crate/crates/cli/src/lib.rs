//! Spec loading, analysis orchestration and report emission for `reldyn`.

pub mod emit;
pub mod error;
pub mod report;
pub mod run;
pub mod spec;

pub use error::{CliError, CliResult};
pub use report::Report;
pub use run::{run, RunOptions, RunOutput};
pub use spec::{build_system, load_spec, parse_spec, Analysis, SystemSpec};

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const INPUT: i32 = 1;
    pub const VERIFICATION: i32 = 2;
}

/// Loads, runs and emits in one go. Returns the exit code.
pub fn execute(spec_path: &std::path::Path, out_dir: &std::path::Path, opts: &RunOptions) -> CliResult<(RunOutput, i32)> {
    let loaded = load_spec(spec_path)?;
    let sys = build_system(&loaded.spec)?;
    let out = run(&loaded, &sys, opts)?;
    emit::emit(&out, out_dir)?;
    let code = if out.report.verified() { exit::OK } else { exit::VERIFICATION };
    Ok((out, code))
}
