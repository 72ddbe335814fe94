//! Safety specifications and verification verdicts.
//!
//! A specification is a conjunction of half-spaces `a·x <= b`; the safe
//! region is their intersection. For an axis-aligned box the maximum of
//! `a·x` is attained at a corner and computable coordinate-wise, so the
//! box-against-half-space test is exact: a box either lies entirely in the
//! safe region or provably pokes out of it. Verification over a reach tube
//! is therefore one-directional: SAFE is a guarantee, UNCERTAIN only means
//! the over-approximation crossed the boundary, not that any real
//! trajectory does.

use std::fmt;

use crate::interval::CellBox;
use crate::narma::{reach_narma, ReachTube};
use crate::network::{NarmaModel, Scenario};
use crate::reach::ReachConfig;
use crate::{Error, Result};

/// One linear constraint `a·x <= b`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfSpace {
    a: Vec<f64>,
    b: f64,
}

impl HalfSpace {
    pub fn new(a: Vec<f64>, b: f64) -> Result<Self> {
        if a.is_empty() {
            return Err(Error::invalid("a half-space needs at least one coefficient"));
        }
        if a.iter().any(|c| !c.is_finite()) || !b.is_finite() {
            return Err(Error::invalid("half-space coefficients must be finite"));
        }
        Ok(Self { a, b })
    }

    pub fn a(&self) -> &[f64] {
        &self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    pub fn dim(&self) -> usize {
        self.a.len()
    }

    /// Exact maximum of `a·x` over the box: each coordinate contributes its
    /// upper end when the coefficient is nonnegative, its lower end
    /// otherwise.
    pub fn max_over(&self, cell: &CellBox) -> Result<f64> {
        if cell.dim() != self.a.len() {
            return Err(Error::invalid(format!(
                "box has dimension {}, constraint has {}",
                cell.dim(),
                self.a.len()
            )));
        }
        let mut sum = 0.0;
        for (i, &c) in self.a.iter().enumerate() {
            let iv = cell.interval(i);
            sum += c * if c >= 0.0 { iv.hi() } else { iv.lo() };
        }
        Ok(sum)
    }
}

/// A conjunction of half-spaces. The empty conjunction is the whole space,
/// under which everything is safe.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SafetySpec {
    constraints: Vec<HalfSpace>,
}

impl SafetySpec {
    /// The explicit no-constraint specification.
    pub fn whole_space() -> Self {
        Self::default()
    }

    pub fn new(constraints: Vec<HalfSpace>) -> Result<Self> {
        if constraints.is_empty() {
            return Err(Error::invalid(
                "a specification needs at least one constraint; use whole_space() for none",
            ));
        }
        let dim = constraints[0].dim();
        if constraints.iter().any(|h| h.dim() != dim) {
            return Err(Error::invalid(
                "all constraints must share one dimension",
            ));
        }
        Ok(Self { constraints })
    }

    pub fn constraints(&self) -> &[HalfSpace] {
        &self.constraints
    }

    pub fn is_whole_space(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Common constraint dimension, or `None` for the whole space.
    pub fn dim(&self) -> Option<usize> {
        self.constraints.first().map(HalfSpace::dim)
    }
}

/// Whether the whole box lies in the safe region. Exact for boxes:
/// equivalent to every corner satisfying every constraint.
pub fn box_satisfies(cell: &CellBox, spec: &SafetySpec) -> Result<bool> {
    for h in &spec.constraints {
        if h.max_over(cell)? > h.b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Whether a single point lies in the safe region.
pub fn point_satisfies(x: &[f64], spec: &SafetySpec) -> Result<bool> {
    for h in &spec.constraints {
        if x.len() != h.dim() {
            return Err(Error::invalid(format!(
                "point has dimension {}, constraint has {}",
                x.len(),
                h.dim()
            )));
        }
        let dot: f64 = h.a.iter().zip(x).map(|(c, xi)| c * xi).sum();
        if dot > h.b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Verification outcome. UNCERTAIN never means unsafe: the estimate is an
/// over-approximation, so a crossing can come from either a real
/// trajectory or from conservatism.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Safe,
    /// First violation found, in step then box then constraint order.
    Uncertain {
        step: usize,
        box_index: usize,
        constraint_index: usize,
    },
}

impl Verdict {
    pub fn is_safe(&self) -> bool {
        matches!(self, Verdict::Safe)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Safe => write!(f, "SAFE"),
            Verdict::Uncertain {
                step,
                box_index,
                constraint_index,
            } => write!(
                f,
                "UNCERTAIN k={step} box={box_index} constraint={constraint_index}"
            ),
        }
    }
}

/// Checks an already computed tube against a specification.
pub fn verify_tube(tube: &ReachTube, spec: &SafetySpec) -> Result<Verdict> {
    for (step, set) in tube.steps().iter().enumerate() {
        for (box_index, cell) in set.boxes().iter().enumerate() {
            for (constraint_index, h) in spec.constraints.iter().enumerate() {
                if h.max_over(cell)? > h.b {
                    return Ok(Verdict::Uncertain {
                        step,
                        box_index,
                        constraint_index,
                    });
                }
            }
        }
    }
    Ok(Verdict::Safe)
}

/// Estimates the tube and checks it: SAFE iff every box at every step lies
/// in the safe region.
pub fn verify_narma(
    model: &NarmaModel,
    scenario: &Scenario,
    spec: &SafetySpec,
    config: &ReachConfig,
) -> Result<Verdict> {
    let tube = reach_narma(model, scenario, config)?;
    verify_tube(&tube, spec)
}
