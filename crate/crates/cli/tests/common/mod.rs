#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_bibcite")
}

pub fn demo_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../demo")
}

/// Runs the binary from `cwd` against `data_dir`.
pub fn bibcite(cwd: &Path, data_dir: &Path, args: &[&str]) -> Output {
    Command::new(bin()).current_dir(cwd).arg("--data-dir").arg(data_dir).args(args).output().expect("binary runs")
}

/// Replays demo/commands.txt into a fresh data directory and returns the
/// transcript: each command line followed by its standard output.
pub fn run_demo(data_dir: &Path) -> Result<String, String> {
    let dir = demo_dir();
    let script = std::fs::read_to_string(dir.join("commands.txt")).map_err(|e| e.to_string())?;
    let mut transcript = String::new();
    for line in script.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
        let args = shlex::split(line).ok_or_else(|| format!("bad quoting: {line}"))?;
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out = bibcite(&dir, data_dir, &args);
        if !out.status.success() {
            return Err(format!("`{line}` exited with {}: {}", out.status, String::from_utf8_lossy(&out.stderr)));
        }
        transcript.push_str("$ bibcite ");
        transcript.push_str(line);
        transcript.push('\n');
        transcript.push_str(&String::from_utf8(out.stdout).map_err(|e| e.to_string())?);
    }
    Ok(transcript)
}

pub fn expected_demo_output() -> String {
    std::fs::read_to_string(demo_dir().join("expected_output.txt")).unwrap_or_default()
}
