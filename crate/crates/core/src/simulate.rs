//! Seeded Monte Carlo trajectories and tube-containment checking.
//!
//! Sampling is the soundness oracle for the estimation modules: every
//! simulated trajectory must land inside the computed tube at every step,
//! and any escape is a bug in the bound propagation, never in the sampler.
//! The generator is SplitMix64 (Steele, Lea and Flood's splittable output
//! mixer), hand-rolled so trajectories are bit-identical across platforms,
//! thread counts and library versions. Each trajectory draws from its own
//! substream, so trajectory `i` does not change when `count` grows or when
//! generation is reordered.

use crate::interval::Interval;
use crate::narma::ReachTube;
use crate::network::{NarmaModel, Scenario};
use crate::{Error, Result};

const GOLDEN: u64 = 0x9E37_79B9_7F4A_7C15;

fn mix(mut z: u64) -> u64 {
    z ^= z >> 30;
    z = z.wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z ^= z >> 27;
    z = z.wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// SplitMix64: 64-bit state, one add and one mix per output.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    /// Independent stream `index` of a master seed. Streams are decorrelated
    /// by mixing seed and index separately before combining.
    pub fn substream(seed: u64, index: u64) -> Self {
        Self {
            state: mix(seed) ^ mix(index.wrapping_add(1).wrapping_mul(GOLDEN)),
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        mix(self.state)
    }

    /// Uniform in [0, 1): the top 53 bits scaled by 2^-53.
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform draw from [lo, hi]. The product form can land a hair above
    /// `hi` when the width is large, so the result is clamped.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        (lo + self.next_f64() * (hi - lo)).min(hi)
    }

    fn draw_point(&mut self, cell: &crate::interval::CellBox) -> Vec<f64> {
        cell.intervals()
            .iter()
            .map(|iv: &Interval| self.uniform(iv.lo(), iv.hi()))
            .collect()
    }
}

/// One simulated run: states over `k = 0..=k_f` and the inputs drawn for
/// `k = 0..k_f`, plus the substream seed position that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub states: Vec<Vec<f64>>,
    pub inputs: Vec<Vec<f64>>,
    pub seed: u64,
}

/// Simulates `count` independent trajectories of the scenario.
///
/// Initial states are drawn uniformly from each initial set, inputs
/// uniformly and independently from the input set at every step, and later
/// states are exact `NarmaModel::step` iterates. Deterministic given
/// `(scenario, count, seed)`.
pub fn sample_trajectories(
    model: &NarmaModel,
    scenario: &Scenario,
    count: usize,
    seed: u64,
) -> Result<Vec<Trajectory>> {
    scenario.validate_against(model)?;
    if count == 0 {
        return Err(Error::invalid("trajectory count must be positive"));
    }
    let d_x = model.d_x();
    let d_u = model.d_u();
    let k_f = scenario.horizon();

    let mut out = Vec::with_capacity(count);
    for t in 0..count {
        let mut rng = SplitMix64::substream(seed, t as u64);
        let mut states: Vec<Vec<f64>> = Vec::with_capacity(k_f + 1);
        for k in 0..=d_x.min(k_f) {
            states.push(rng.draw_point(&scenario.initial_sets()[k]));
        }
        let inputs: Vec<Vec<f64>> = (0..k_f)
            .map(|_| rng.draw_point(scenario.input_set()))
            .collect();
        for k in d_x..k_f {
            let x_hist: Vec<Vec<f64>> = (0..=d_x).map(|j| states[k - j].clone()).collect();
            let u_hist: Vec<Vec<f64>> = (0..=d_u).map(|j| inputs[k - j].clone()).collect();
            states.push(model.step(&x_hist, &u_hist)?);
        }
        out.push(Trajectory {
            states,
            inputs,
            seed: t as u64,
        });
    }
    Ok(out)
}

/// First state found outside the tube.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub trajectory: usize,
    pub step: usize,
    pub state: Vec<f64>,
}

/// Outcome of checking trajectories against a tube.
#[derive(Debug, Clone, PartialEq)]
pub struct ContainmentReport {
    pub trajectories: usize,
    pub points_checked: usize,
    pub violations: usize,
    pub first_violation: Option<Violation>,
}

impl ContainmentReport {
    pub fn all_contained(&self) -> bool {
        self.violations == 0
    }
}

/// Checks that every trajectory state lies in some box of its step.
pub fn check_containment(tube: &ReachTube, trajs: &[Trajectory]) -> Result<ContainmentReport> {
    let steps = tube.steps().len();
    let mut points_checked = 0;
    let mut violations = 0;
    let mut first_violation = None;
    for (t, traj) in trajs.iter().enumerate() {
        if traj.states.len() != steps {
            return Err(Error::invalid(format!(
                "trajectory {t} has {} states, tube has {steps} steps",
                traj.states.len()
            )));
        }
        for (k, x) in traj.states.iter().enumerate() {
            points_checked += 1;
            let mut inside = false;
            for cell in tube.step(k).boxes() {
                if cell.contains(x)? {
                    inside = true;
                    break;
                }
            }
            if !inside {
                violations += 1;
                if first_violation.is_none() {
                    first_violation = Some(Violation {
                        trajectory: t,
                        step: k,
                        state: x.clone(),
                    });
                }
            }
        }
    }
    Ok(ContainmentReport {
        trajectories: trajs.len(),
        points_checked,
        violations,
        first_violation,
    })
}
