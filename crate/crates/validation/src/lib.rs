//! Helpers for the acceptance suite in `tests/acceptance.rs`.
//!
//! The suite lives in its own package so that a failing criterion does not
//! stop `cargo test --workspace` before the other packages have run.

use std::path::PathBuf;
use std::time::{Duration, Instant};

/// Path of the `casimir-friction` binary. `CASIMIR_FRICTION_BIN` overrides;
/// otherwise the binary is expected next to the running test executable's
/// `deps/` directory, where `cargo test --workspace` places it.
pub fn cli_binary() -> Result<PathBuf, String> {
    if let Some(p) = std::env::var_os("CASIMIR_FRICTION_BIN") {
        return Ok(PathBuf::from(p));
    }
    let exe = std::env::current_exe().map_err(|e| e.to_string())?;
    let name = format!("casimir-friction{}", std::env::consts::EXE_SUFFIX);
    exe.parent()
        .into_iter()
        .flat_map(|deps| [deps.join(&name), deps.parent().map(|p| p.join(&name)).unwrap_or_default()])
        .find(|p| p.is_file())
        .ok_or_else(|| "casimir-friction binary not found; build it with `cargo build -p casimir-cli` or set CASIMIR_FRICTION_BIN".into())
}

/// Result of one acceptance criterion.
#[derive(Debug, Clone)]
pub struct Verdict {
    pub id: usize,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
}

impl Verdict {
    pub fn line(&self) -> String {
        format!(
            "{} [{:>2}] {} ({:.2} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.detail
        )
    }
}

/// Runs `f`, which reports `(passed, detail)`; an `Err` counts as a failure.
pub fn judge(
    id: usize,
    title: &'static str,
    budget: Option<Duration>,
    f: impl FnOnce() -> Result<(bool, String), String>,
) -> Verdict {
    let start = Instant::now();
    let outcome = f();
    let elapsed = start.elapsed();
    let (mut passed, mut detail) = outcome.unwrap_or_else(|e| (false, format!("error: {e}")));
    if let Some(b) = budget {
        if elapsed > b {
            passed = false;
            detail.push_str(&format!("; exceeded runtime budget of {} s", b.as_secs()));
        }
    }
    Verdict {
        id,
        title,
        passed,
        detail,
        elapsed,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn budget_overrun_fails() {
        let v = judge(1, "t", Some(Duration::ZERO), || {
            std::thread::sleep(Duration::from_millis(2));
            Ok((true, "ok".into()))
        });
        assert!(!v.passed);
        assert!(v.line().starts_with("FAIL [ 1] t"));
    }

    #[test]
    fn errors_fail() {
        let v = judge(2, "t", None, || Err("boom".into()));
        assert!(!v.passed && v.detail.contains("boom"));
    }
}
