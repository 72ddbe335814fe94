//! Guaranteed output bounds for networks over box-shaped input sets.
//!
//! The single-layer bound is exact per neuron: a monotone activation of an
//! affine form attains its extrema over a box at the corners selected by
//! the weight signs, so both ends of every output interval are values the
//! layer really takes. Conservatism enters only across layers, where the
//! output box forgets the coupling between neurons. Partitioning the input
//! box recovers precision at a cost proportional to the cell count.

use rayon::prelude::*;

use crate::interval::{hull, make_partition, CellBox, Interval};
use crate::network::{Layer, Network};
use crate::{Error, Result};

/// Knobs for the estimation engine.
#[derive(Debug, Clone, Copy)]
pub struct ReachConfig {
    /// Refuse partitions with more cells than this.
    pub max_cells: u64,
    /// Outward padding applied to every computed layer bound. Zero by
    /// default; the bound formulas themselves do no outward rounding.
    pub widen_eps: f64,
}

impl Default for ReachConfig {
    fn default() -> Self {
        Self {
            max_cells: 1_000_000,
            widen_eps: 0.0,
        }
    }
}

/// Exact per-neuron output interval of one layer over a box.
///
/// For output neuron i with weight row w and bias b, the preactivation
/// minimum over the box is `sum_j (w_ij >= 0 ? w_ij*lo_j : w_ij*hi_j)` and
/// the maximum is the mirror sum; the activation being nondecreasing maps
/// those to the output interval ends.
pub fn layer_bound(layer: &Layer, in_box: &CellBox) -> Result<CellBox> {
    if in_box.dim() != layer.n_in() {
        return Err(Error::invalid(format!(
            "input box has {} dimensions, layer expects {}",
            in_box.dim(),
            layer.n_in()
        )));
    }
    let act = layer.activation();
    let dims = layer
        .weights()
        .iter()
        .zip(layer.bias())
        .map(|(row, &bias)| {
            let mut lo_sum = 0.0;
            let mut hi_sum = 0.0;
            for (w, iv) in row.iter().zip(in_box.intervals()) {
                if *w >= 0.0 {
                    lo_sum += w * iv.lo();
                    hi_sum += w * iv.hi();
                } else {
                    lo_sum += w * iv.hi();
                    hi_sum += w * iv.lo();
                }
            }
            Interval::new(act.eval(lo_sum + bias), act.eval(hi_sum + bias))
        })
        .collect::<Result<Vec<_>>>()?;
    CellBox::new(dims)
}

// One cell through every layer; the optional widening pads each computed
// bound, not just the final one, so it also cushions interior layers.
fn propagate(net: &Network, cell: &CellBox, widen_eps: f64) -> Result<CellBox> {
    let mut current = layer_bound(&net.layers()[0], cell)?;
    if widen_eps > 0.0 {
        current = current.widen(widen_eps)?;
    }
    for layer in &net.layers()[1..] {
        current = layer_bound(layer, &current)?;
        if widen_eps > 0.0 {
            current = current.widen(widen_eps)?;
        }
    }
    Ok(current)
}

/// Per-cell output boxes and their hull.
#[derive(Debug, Clone)]
pub struct MlpReachResult {
    tubes: Vec<CellBox>,
    hull: CellBox,
}

impl MlpReachResult {
    /// One output box per input cell, in row-major cell order.
    pub fn tubes(&self) -> &[CellBox] {
        &self.tubes
    }

    pub fn hull(&self) -> &CellBox {
        &self.hull
    }

    pub fn into_parts(self) -> (Vec<CellBox>, CellBox) {
        (self.tubes, self.hull)
    }
}

/// Partitions `input_box` by `counts` and bounds the network output over
/// every cell. Every network value H(v) with v in the input box lies in at
/// least one tube; the tube list keeps the canonical row-major cell order,
/// so results are reproducible across runs and thread schedules.
pub fn reach_mlp(
    net: &Network,
    input_box: &CellBox,
    counts: &[usize],
    config: &ReachConfig,
) -> Result<MlpReachResult> {
    if input_box.dim() != net.input_width() {
        return Err(Error::invalid(format!(
            "input box has {} dimensions, network expects {}",
            input_box.dim(),
            net.input_width()
        )));
    }
    if counts.len() != input_box.dim() {
        return Err(Error::invalid(format!(
            "{} partition counts for a {}-dimensional input box",
            counts.len(),
            input_box.dim()
        )));
    }
    if counts.iter().any(|&m| m == 0) {
        return Err(Error::invalid("partition counts must be positive"));
    }
    if !config.widen_eps.is_finite() || config.widen_eps < 0.0 {
        return Err(Error::invalid(format!(
            "widen epsilon must be finite and nonnegative, got {}",
            config.widen_eps
        )));
    }
    let cells: u128 = counts.iter().map(|&m| m as u128).product();
    if cells > config.max_cells as u128 {
        return Err(Error::CellBudget {
            cells,
            budget: config.max_cells,
        });
    }

    let partition = make_partition(input_box, counts)?;
    // Cells are independent; parallel evaluation preserves the cell order.
    let tubes = if partition.len() >= 64 {
        partition
            .cells()
            .par_iter()
            .map(|cell| propagate(net, cell, config.widen_eps))
            .collect::<Result<Vec<_>>>()?
    } else {
        partition
            .cells()
            .iter()
            .map(|cell| propagate(net, cell, config.widen_eps))
            .collect::<Result<Vec<_>>>()?
    };
    let hull = hull(&tubes)?;
    Ok(MlpReachResult { tubes, hull })
}
