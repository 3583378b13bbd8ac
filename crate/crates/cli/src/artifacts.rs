//! Artifact rendering: CSV bodies are built in memory with a fixed decimal
//! format and written in one call, so identical configs produce
//! byte-identical files and a failed run leaves nothing half-written.
//! Wall-clock times only ever go into diagnostics JSON, never into CSV.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use ripa_core::linalg;
use ripa_core::trajectory::{IndexKind, Trajectory};

use crate::CliError;

/// 17-significant-digit scientific rendering: enough to round-trip any f64.
pub fn render_f64(v: f64) -> String {
    format!("{v:.16e}")
}

/// FNV-1a, 64-bit: tiny, stable across platforms, good enough to
/// fingerprint configs (this identifies experiments, it is not security).
pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn format_hash(hash: u64) -> String {
    format!("fnv1a64:{hash:016x}")
}

/// Continuous runs: `t,x1..xn,v1..vn,lambda,yosida_norm`.
/// Iteration runs: `k,x1..xn,dx_norm,k_dx_norm,lambda_k,yosida_norm`.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    match traj.kind {
        IndexKind::ContinuousTime => {
            out.push('t');
            for i in 1..=traj.dim {
                let _ = write!(out, ",x{i}");
            }
            for i in 1..=traj.dim {
                let _ = write!(out, ",v{i}");
            }
            out.push_str(",lambda,yosida_norm\n");
            for s in &traj.samples {
                out.push_str(&render_f64(s.index));
                for v in s.x.iter().chain(&s.velocity) {
                    out.push(',');
                    out.push_str(&render_f64(*v));
                }
                let _ = writeln!(
                    out,
                    ",{},{}",
                    render_f64(s.lambda),
                    render_f64(s.yosida_norm)
                );
            }
        }
        IndexKind::IterationCount => {
            out.push('k');
            for i in 1..=traj.dim {
                let _ = write!(out, ",x{i}");
            }
            out.push_str(",dx_norm,k_dx_norm,lambda_k,yosida_norm\n");
            for s in &traj.samples {
                let _ = write!(out, "{}", s.index as u64);
                for v in &s.x {
                    out.push(',');
                    out.push_str(&render_f64(*v));
                }
                let dx = linalg::norm(&s.velocity);
                let _ = writeln!(
                    out,
                    ",{},{},{},{}",
                    render_f64(dx),
                    render_f64(s.index * dx),
                    render_f64(s.lambda),
                    render_f64(s.yosida_norm)
                );
            }
        }
    }
    out
}

pub fn write_text(path: &Path, content: &str) -> Result<(), CliError> {
    if let Some(dir) = path.parent() {
        if !dir.as_os_str().is_empty() {
            fs::create_dir_all(dir)
                .map_err(|e| CliError::Io(format!("creating {}: {e}", dir.display())))?;
        }
    }
    fs::write(path, content).map_err(|e| CliError::Io(format!("writing {}: {e}", path.display())))
}

pub fn read_text(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("reading {}: {e}", path.display())))
}
