//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fails.
//!
//! Criterion 12 is checked twice: in process across rayon pools, and here
//! through the `qheat` binary with `--threads 1` and `--threads 4`.

use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use qubit_heat_cli::presets::Preset;
use qubit_heat_cli::validate::{self, Check};

fn preset_bytes(dir: &Path, preset: Preset, threads: usize, run: usize) -> Result<Vec<u8>, String> {
    let out = dir.join(format!("{preset}-t{threads}-r{run}.csv"));
    let status = Command::new(env!("CARGO_BIN_EXE_qheat"))
        .args(["--threads", &threads.to_string(), "--out"])
        .arg(&out)
        .args(["preset", preset.name()])
        .env("RUST_LOG", "error")
        .status()
        .map_err(|e| e.to_string())?;
    if !status.success() {
        return Err(format!("qheat preset {preset} exited with {status}"));
    }
    let mut bytes = Vec::new();
    let mut files: Vec<_> = std::fs::read_dir(dir)
        .map_err(|e| e.to_string())?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.file_name().is_some_and(|n| n.to_string_lossy().starts_with(&format!("{preset}-t{threads}-r{run}.csv"))))
        .collect();
    files.sort();
    for f in files {
        bytes.extend(std::fs::read(&f).map_err(|e| e.to_string())?);
    }
    Ok(bytes)
}

fn binary_determinism() -> Check {
    let name = "determinism (binary)";
    let run = || -> Result<(bool, String), String> {
        let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
        let mut total = 0;
        let mut differing = Vec::new();
        for p in Preset::ALL {
            let reference = preset_bytes(dir.path(), p, 1, 0)?;
            total += reference.len();
            for (threads, run) in [(1, 1), (4, 0), (4, 1)] {
                if preset_bytes(dir.path(), p, threads, run)? != reference {
                    differing.push(format!("{p} (threads {threads})"));
                }
            }
        }
        Ok((
            differing.is_empty(),
            if differing.is_empty() {
                format!("all presets byte-identical over 2 runs x threads {{1, 4}}; {total} bytes per run incl. sidecars")
            } else {
                format!("differing outputs: {}", differing.join(", "))
            },
        ))
    };
    match run() {
        Ok((passed, detail)) => Check { id: 12, name, passed, detail },
        Err(e) => Check {
            id: 12,
            name,
            passed: false,
            detail: format!("error: {e}"),
        },
    }
}

fn main() -> ExitCode {
    let start = Instant::now();
    let mut checks = validate::run_all();
    checks.push(binary_determinism());
    for c in &checks {
        println!("{}", c.line());
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    println!(
        "acceptance: {} of {} checks passed in {:.1} s",
        checks.len() - failed,
        checks.len(),
        start.elapsed().as_secs_f64()
    );
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
