//! CSV emitters for tubes, hulls and trajectories.
//!
//! Numbers are written in Rust's shortest round-trip decimal form, so the
//! files are lossless (parse back to the same f64 bit pattern) and
//! diff-stable across runs.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use reachtube_core::{CellBox, ReachTube, Trajectory};

fn write_text(path: &Path, text: &str) -> Result<()> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

/// `tubes.csv`: one row per (cell, dimension).
pub fn write_tubes(path: &Path, tubes: &[CellBox]) -> Result<()> {
    let mut out = String::from("cell_index,dim,lo,hi\n");
    for (i, cell) in tubes.iter().enumerate() {
        for (d, iv) in cell.intervals().iter().enumerate() {
            writeln!(out, "{i},{d},{},{}", iv.lo(), iv.hi()).unwrap();
        }
    }
    write_text(path, &out)
}

/// `hull.csv`: one row per dimension of a single box.
pub fn write_hull(path: &Path, hull: &CellBox) -> Result<()> {
    let mut out = String::from("dim,lo,hi\n");
    for (d, iv) in hull.intervals().iter().enumerate() {
        writeln!(out, "{d},{},{}", iv.lo(), iv.hi()).unwrap();
    }
    write_text(path, &out)
}

/// `tube.csv`: per-step hulls, one row per (step, dimension).
pub fn write_step_hulls(path: &Path, tube: &ReachTube) -> Result<()> {
    let mut out = String::from("k,dim,lo,hi\n");
    for (k, step) in tube.steps().iter().enumerate() {
        for (d, iv) in step.hull().intervals().iter().enumerate() {
            writeln!(out, "{k},{d},{},{}", iv.lo(), iv.hi()).unwrap();
        }
    }
    write_text(path, &out)
}

/// `boxes.csv`: every per-step box, one row per (step, box, dimension).
pub fn write_step_boxes(path: &Path, tube: &ReachTube) -> Result<()> {
    let mut out = String::from("k,box_index,dim,lo,hi\n");
    for (k, step) in tube.steps().iter().enumerate() {
        for (b, cell) in step.boxes().iter().enumerate() {
            for (d, iv) in cell.intervals().iter().enumerate() {
                writeln!(out, "{k},{b},{d},{},{}", iv.lo(), iv.hi()).unwrap();
            }
        }
    }
    write_text(path, &out)
}

/// `trajectories.csv`: sampled states, one row per (trajectory, step, dim).
pub fn write_trajectories(path: &Path, trajs: &[Trajectory]) -> Result<()> {
    let mut out = String::from("trajectory,k,dim,value\n");
    for (t, traj) in trajs.iter().enumerate() {
        for (k, state) in traj.states.iter().enumerate() {
            for (d, v) in state.iter().enumerate() {
                writeln!(out, "{t},{k},{d},{v}").unwrap();
            }
        }
    }
    write_text(path, &out)
}
