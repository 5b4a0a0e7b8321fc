//! Output files: the report, timings, the Morse graph and the Lyapunov field.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use reldyn::grid::Space;

use crate::error::{CliError, CliResult};
use crate::report::MorseReport;
use crate::run::{LyapunovCsv, RunOutput};

pub const REPORT_FILE: &str = "report.toml";
pub const TIMING_FILE: &str = "timing.toml";
pub const MORSE_FILE: &str = "morse.dot";
pub const LYAPUNOV_FILE: &str = "lyapunov.csv";

fn write(dir: &Path, name: &str, body: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, body).map_err(|source| CliError::Write { path: path.clone(), source })?;
    Ok(path)
}

/// Writes every output for `out` into `dir` and returns the paths written.
pub fn emit(out: &RunOutput, dir: &Path) -> CliResult<Vec<PathBuf>> {
    std::fs::create_dir_all(dir).map_err(|source| CliError::Write { path: dir.into(), source })?;
    let mut written = vec![write(dir, REPORT_FILE, &out.report.to_toml()?)?];
    written.push(write(dir, TIMING_FILE, &toml::to_string(&out.timing)?)?);
    if let Some(m) = &out.report.morse {
        written.push(write(dir, MORSE_FILE, &morse_dot(m))?);
    }
    if let Some(l) = &out.lyapunov {
        written.push(write(dir, LYAPUNOV_FILE, &lyapunov_csv(&out.space, l))?);
    }
    Ok(written)
}

/// The Morse graph with transitive edges dropped.
pub fn morse_dot(m: &MorseReport) -> String {
    let k = m.components.len();
    let mut reach = vec![vec![false; k]; k];
    for e in &m.edges {
        reach[e[0]][e[1]] = true;
    }
    let mut s = String::from("digraph morse {\n");
    for (i, c) in m.components.iter().enumerate() {
        let shown: Vec<String> = c.iter().take(6).map(|x| x.to_string()).collect();
        let more = if c.len() > 6 { format!(", … ({} cells)", c.len()) } else { String::new() };
        let _ = writeln!(s, "  m{i} [label=\"M{i}: {{{}{more}}}\"];", shown.join(", "));
    }
    for e in &m.edges {
        let (a, b) = (e[0], e[1]);
        if !(0..k).any(|c| c != a && c != b && reach[a][c] && reach[c][b]) {
            let _ = writeln!(s, "  m{a} -> m{b};");
        }
    }
    s.push_str("}\n");
    s
}

pub fn lyapunov_csv(space: &Space, l: &LyapunovCsv) -> String {
    let mut s = String::from("cell,multi_index,value,approx\n");
    for (c, (v, a)) in l.values.iter().zip(&l.approx).enumerate() {
        let idx = match space.as_grid() {
            Some(g) => g.multi_index(c).iter().map(|i| i.to_string()).collect::<Vec<_>>().join(":"),
            None => c.to_string(),
        };
        let _ = writeln!(s, "{c},{idx},{v},{a}");
    }
    s
}
