//! MLP and NARMA model data structures, monotone activations, and file I/O.
//!
//! A network is a chain of affine layers, each followed by a monotone
//! scalar activation. A NARMA model wraps a network with lag orders so that
//! `x(k+1) = f(x(k), ..., x(k-d_x), u(k), ..., u(k-d_u))`, the network
//! consuming the lagged values newest-first, states before inputs. That
//! input layout is normative everywhere in this crate.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::interval::CellBox;
use crate::safety::SafetySpec;
use crate::{Error, Result};

/// The admitted activation functions. All are monotonically nondecreasing,
/// which is what makes interval bounds computable from interval endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ActivationKind {
    Tanh,
    Logistic,
    Relu,
    Linear,
}

impl ActivationKind {
    pub const ALL: [ActivationKind; 4] = [
        ActivationKind::Tanh,
        ActivationKind::Logistic,
        ActivationKind::Relu,
        ActivationKind::Linear,
    ];

    pub fn eval(self, z: f64) -> f64 {
        match self {
            ActivationKind::Tanh => z.tanh(),
            ActivationKind::Logistic => 1.0 / (1.0 + (-z).exp()),
            ActivationKind::Relu => z.max(0.0),
            ActivationKind::Linear => z,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            ActivationKind::Tanh => "tanh",
            ActivationKind::Logistic => "logistic",
            ActivationKind::Relu => "relu",
            ActivationKind::Linear => "linear",
        }
    }

    pub fn parse(name: &str) -> Option<ActivationKind> {
        match name {
            "tanh" => Some(ActivationKind::Tanh),
            "logistic" => Some(ActivationKind::Logistic),
            "relu" => Some(ActivationKind::Relu),
            "linear" => Some(ActivationKind::Linear),
            _ => None,
        }
    }
}

/// One affine layer `h(Wv + b)` with `n_out` rows and `n_in` columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Layer {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: ActivationKind,
}

impl Layer {
    pub fn new(weights: Vec<Vec<f64>>, bias: Vec<f64>, activation: ActivationKind) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("layer has no weight rows"));
        }
        let n_in = weights[0].len();
        if n_in == 0 {
            return Err(Error::invalid("layer weight rows are empty"));
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n_in {
                return Err(Error::invalid(format!(
                    "weight row {i} has {} entries, expected {n_in}",
                    row.len()
                )));
            }
        }
        if bias.len() != weights.len() {
            return Err(Error::invalid(format!(
                "bias length {} does not match {} weight rows",
                bias.len(),
                weights.len()
            )));
        }
        let finite = weights.iter().flatten().chain(&bias).all(|x| x.is_finite());
        if !finite {
            return Err(Error::invalid("layer weights and bias must be finite"));
        }
        Ok(Self {
            weights,
            bias,
            activation,
        })
    }

    pub fn n_in(&self) -> usize {
        self.weights[0].len()
    }

    pub fn n_out(&self) -> usize {
        self.weights.len()
    }

    pub fn weights(&self) -> &[Vec<f64>] {
        &self.weights
    }

    pub fn bias(&self) -> &[f64] {
        &self.bias
    }

    pub fn activation(&self) -> ActivationKind {
        self.activation
    }

    // Width is checked by Network::eval once per pass, not per layer.
    fn eval(&self, v: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .zip(&self.bias)
            .map(|(row, &b)| {
                let z: f64 = row.iter().zip(v).map(|(w, x)| w * x).sum::<f64>() + b;
                self.activation.eval(z)
            })
            .collect()
    }
}

/// A feed-forward network: at least one layer, widths chained.
#[derive(Debug, Clone, PartialEq)]
pub struct Network {
    layers: Vec<Layer>,
}

impl Network {
    pub fn new(layers: Vec<Layer>) -> Result<Self> {
        if layers.is_empty() {
            return Err(Error::invalid("network has no layers"));
        }
        for i in 1..layers.len() {
            if layers[i].n_in() != layers[i - 1].n_out() {
                return Err(Error::invalid(format!(
                    "layers[{i}]: input width {} does not match previous output width {}",
                    layers[i].n_in(),
                    layers[i - 1].n_out()
                )));
            }
        }
        Ok(Self { layers })
    }

    pub fn layers(&self) -> &[Layer] {
        &self.layers
    }

    pub fn input_width(&self) -> usize {
        self.layers[0].n_in()
    }

    pub fn output_width(&self) -> usize {
        self.layers.last().unwrap().n_out()
    }

    /// Exact forward pass, layer by layer.
    pub fn eval(&self, v: &[f64]) -> Result<Vec<f64>> {
        if v.len() != self.input_width() {
            return Err(Error::invalid(format!(
                "input has {} entries, network expects {}",
                v.len(),
                self.input_width()
            )));
        }
        let mut current = self.layers[0].eval(v);
        for layer in &self.layers[1..] {
            current = layer.eval(&current);
        }
        Ok(current)
    }
}

/// A NARMA model: a network interpreted as the one-step map of
/// `x(k+1) = f(x(k), ..., x(k-d_x), u(k), ..., u(k-d_u))`.
///
/// Requires `d_x >= d_u`, a network input width of
/// `n*(d_x+1) + m*(d_u+1)` and an output width of `n`.
#[derive(Debug, Clone, PartialEq)]
pub struct NarmaModel {
    net: Network,
    state_dim: usize,
    input_dim: usize,
    d_x: usize,
    d_u: usize,
}

impl NarmaModel {
    pub fn new(
        net: Network,
        state_dim: usize,
        input_dim: usize,
        d_x: usize,
        d_u: usize,
    ) -> Result<Self> {
        if state_dim == 0 || input_dim == 0 {
            return Err(Error::invalid("state and input dimensions must be positive"));
        }
        if d_x < d_u {
            return Err(Error::invalid(format!(
                "state lag d_x = {d_x} must be at least input lag d_u = {d_u}"
            )));
        }
        let want = state_dim * (d_x + 1) + input_dim * (d_u + 1);
        if net.input_width() != want {
            return Err(Error::invalid(format!(
                "network input width {} does not match n*(d_x+1) + m*(d_u+1) = {want}",
                net.input_width()
            )));
        }
        if net.output_width() != state_dim {
            return Err(Error::invalid(format!(
                "network output width {} does not match state dimension {state_dim}",
                net.output_width()
            )));
        }
        Ok(Self {
            net,
            state_dim,
            input_dim,
            d_x,
            d_u,
        })
    }

    pub fn net(&self) -> &Network {
        &self.net
    }

    pub fn state_dim(&self) -> usize {
        self.state_dim
    }

    pub fn input_dim(&self) -> usize {
        self.input_dim
    }

    pub fn d_x(&self) -> usize {
        self.d_x
    }

    pub fn d_u(&self) -> usize {
        self.d_u
    }

    /// One exact step. Histories are ordered newest-first:
    /// `x_hist = [x(k), x(k-1), ..., x(k-d_x)]`, `u_hist = [u(k), ..., u(k-d_u)]`.
    pub fn step(&self, x_hist: &[Vec<f64>], u_hist: &[Vec<f64>]) -> Result<Vec<f64>> {
        if x_hist.len() != self.d_x + 1 {
            return Err(Error::invalid(format!(
                "state history has {} entries, model needs d_x + 1 = {}",
                x_hist.len(),
                self.d_x + 1
            )));
        }
        if u_hist.len() != self.d_u + 1 {
            return Err(Error::invalid(format!(
                "input history has {} entries, model needs d_u + 1 = {}",
                u_hist.len(),
                self.d_u + 1
            )));
        }
        let mut v = Vec::with_capacity(self.net.input_width());
        for x in x_hist {
            if x.len() != self.state_dim {
                return Err(Error::invalid(format!(
                    "state vector has {} entries, expected {}",
                    x.len(),
                    self.state_dim
                )));
            }
            v.extend_from_slice(x);
        }
        for u in u_hist {
            if u.len() != self.input_dim {
                return Err(Error::invalid(format!(
                    "input vector has {} entries, expected {}",
                    u.len(),
                    self.input_dim
                )));
            }
            v.extend_from_slice(u);
        }
        self.net.eval(&v)
    }
}

/// How per-step box collections propagate into the next step.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepMode {
    /// Each past step enters the next input set as its interval hull.
    Hull,
    /// Per-cell boxes are carried forward until their count exceeds
    /// `max_boxes`, then the step collapses to its hull. With d_x >= 1 the
    /// step input is the cartesian product of the carried lists, so up to
    /// `max_boxes^(d_x+1)` estimation calls can occur per step.
    Union { max_boxes: usize },
}

/// Everything a reachability run needs besides the model: initial sets for
/// steps `0..=d_x`, the admissible input box, the horizon, partition counts
/// for the network input space, the step mode, and an optional safety
/// specification.
#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    initial_sets: Vec<CellBox>,
    input_set: CellBox,
    horizon: usize,
    partition_counts: Vec<usize>,
    step_mode: StepMode,
    safety: Option<SafetySpec>,
}

impl Scenario {
    pub fn new(
        model: &NarmaModel,
        initial_sets: Vec<CellBox>,
        input_set: CellBox,
        horizon: usize,
        partition_counts: Vec<usize>,
        step_mode: StepMode,
        safety: Option<SafetySpec>,
    ) -> Result<Self> {
        let scenario = Self {
            initial_sets,
            input_set,
            horizon,
            partition_counts,
            step_mode,
            safety,
        };
        scenario.validate_against(model)?;
        Ok(scenario)
    }

    /// Checks that every dimension in the scenario agrees with the model.
    pub fn validate_against(&self, model: &NarmaModel) -> Result<()> {
        if self.initial_sets.len() != model.d_x() + 1 {
            return Err(Error::invalid(format!(
                "{} initial sets, model needs d_x + 1 = {}",
                self.initial_sets.len(),
                model.d_x() + 1
            )));
        }
        for (k, set) in self.initial_sets.iter().enumerate() {
            if set.dim() != model.state_dim() {
                return Err(Error::invalid(format!(
                    "initial set {k} has dimension {}, state dimension is {}",
                    set.dim(),
                    model.state_dim()
                )));
            }
        }
        if self.input_set.dim() != model.input_dim() {
            return Err(Error::invalid(format!(
                "input set has dimension {}, input dimension is {}",
                self.input_set.dim(),
                model.input_dim()
            )));
        }
        if self.horizon == 0 {
            return Err(Error::invalid("horizon must be positive"));
        }
        if self.partition_counts.len() != model.net().input_width() {
            return Err(Error::invalid(format!(
                "{} partition counts, network input width is {}",
                self.partition_counts.len(),
                model.net().input_width()
            )));
        }
        if self.partition_counts.iter().any(|&m| m == 0) {
            return Err(Error::invalid("partition counts must be positive"));
        }
        if let StepMode::Union { max_boxes } = self.step_mode {
            if max_boxes == 0 {
                return Err(Error::invalid("union mode needs max_boxes >= 1"));
            }
        }
        if let Some(spec) = &self.safety {
            if let Some(dim) = spec.dim() {
                if dim != model.state_dim() {
                    return Err(Error::invalid(format!(
                        "safety constraints have dimension {dim}, state dimension is {}",
                        model.state_dim()
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn initial_sets(&self) -> &[CellBox] {
        &self.initial_sets
    }

    pub fn input_set(&self) -> &CellBox {
        &self.input_set
    }

    pub fn horizon(&self) -> usize {
        self.horizon
    }

    pub fn partition_counts(&self) -> &[usize] {
        &self.partition_counts
    }

    pub fn step_mode(&self) -> StepMode {
        self.step_mode
    }

    pub fn safety(&self) -> Option<&SafetySpec> {
        self.safety.as_ref()
    }

    /// Same scenario with different partition counts (length must match).
    pub fn with_partition_counts(&self, counts: Vec<usize>) -> Result<Scenario> {
        if counts.len() != self.partition_counts.len() {
            return Err(Error::invalid(format!(
                "{} partition counts, this scenario needs {}",
                counts.len(),
                self.partition_counts.len()
            )));
        }
        if counts.iter().any(|&m| m == 0) {
            return Err(Error::invalid("partition counts must be positive"));
        }
        Ok(Scenario {
            partition_counts: counts,
            ..self.clone()
        })
    }

    /// Same scenario with a different step mode.
    pub fn with_step_mode(&self, step_mode: StepMode) -> Result<Scenario> {
        if let StepMode::Union { max_boxes } = step_mode {
            if max_boxes == 0 {
                return Err(Error::invalid("union mode needs max_boxes >= 1"));
            }
        }
        Ok(Scenario {
            step_mode,
            ..self.clone()
        })
    }
}

// ---------------------------------------------------------------------------
// File formats.
//
// Network file: {"layers": [{"weights": [[...], ...], "bias": [...],
// "activation": "tanh"|"logistic"|"relu"|"linear"}, ...]}.
// A NARMA file is the same object plus "state_dim", "input_dim", "d_x", "d_u".
// Scenario file: {"initial_sets": [box, ...], "input_set": box, "horizon": N,
// "partition_counts": [...], "step_mode": "hull" | {"union": {"max_boxes": N}},
// "safety": [{"a": [...], "b": r}, ...] (optional)} where a box is a list of
// [lo, hi] pairs, one per dimension.

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct LayerFile {
    weights: Vec<Vec<f64>>,
    bias: Vec<f64>,
    activation: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NetworkFile {
    layers: Vec<LayerFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct NarmaFile {
    layers: Vec<LayerFile>,
    state_dim: usize,
    input_dim: usize,
    d_x: usize,
    d_u: usize,
}

#[derive(Serialize, Deserialize)]
enum StepModeFile {
    #[serde(rename = "hull")]
    Hull,
    #[serde(rename = "union")]
    Union { max_boxes: usize },
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct HalfSpaceFile {
    a: Vec<f64>,
    b: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    initial_sets: Vec<Vec<[f64; 2]>>,
    input_set: Vec<[f64; 2]>,
    horizon: usize,
    partition_counts: Vec<usize>,
    step_mode: StepModeFile,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    safety: Option<Vec<HalfSpaceFile>>,
}

fn parse_err(origin: &str, detail: impl Into<String>) -> Error {
    Error::Parse {
        path: origin.to_string(),
        detail: detail.into(),
    }
}

fn layers_from_file(layers: Vec<LayerFile>, origin: &str) -> Result<Network> {
    if layers.is_empty() {
        return Err(parse_err(origin, "network has no layers"));
    }
    let mut built = Vec::with_capacity(layers.len());
    for (i, lf) in layers.into_iter().enumerate() {
        let activation = ActivationKind::parse(&lf.activation)
            .ok_or_else(|| parse_err(origin, format!("layers[{i}]: unknown activation {:?}", lf.activation)))?;
        let layer = Layer::new(lf.weights, lf.bias, activation)
            .map_err(|e| parse_err(origin, format!("layers[{i}]: {e}")))?;
        built.push(layer);
    }
    Network::new(built).map_err(|e| parse_err(origin, e.to_string()))
}

pub(crate) fn parse_network_str(text: &str, origin: &str) -> Result<Network> {
    let file: NetworkFile =
        serde_json::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
    layers_from_file(file.layers, origin)
}

pub(crate) fn parse_narma_str(text: &str, origin: &str) -> Result<NarmaModel> {
    let file: NarmaFile =
        serde_json::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
    let net = layers_from_file(file.layers, origin)?;
    NarmaModel::new(net, file.state_dim, file.input_dim, file.d_x, file.d_u)
        .map_err(|e| parse_err(origin, e.to_string()))
}

fn box_from_pairs(pairs: &[[f64; 2]], what: &str, origin: &str) -> Result<CellBox> {
    let bounds: Vec<(f64, f64)> = pairs.iter().map(|p| (p[0], p[1])).collect();
    CellBox::from_bounds(&bounds).map_err(|e| parse_err(origin, format!("{what}: {e}")))
}

pub(crate) fn parse_scenario_str(text: &str, origin: &str, model: &NarmaModel) -> Result<Scenario> {
    let file: ScenarioFile =
        serde_json::from_str(text).map_err(|e| parse_err(origin, e.to_string()))?;
    let initial_sets = file
        .initial_sets
        .iter()
        .enumerate()
        .map(|(k, pairs)| box_from_pairs(pairs, &format!("initial_sets[{k}]"), origin))
        .collect::<Result<Vec<_>>>()?;
    let input_set = box_from_pairs(&file.input_set, "input_set", origin)?;
    let step_mode = match file.step_mode {
        StepModeFile::Hull => StepMode::Hull,
        StepModeFile::Union { max_boxes } => StepMode::Union { max_boxes },
    };
    let safety = match file.safety {
        None => None,
        Some(list) if list.is_empty() => Some(SafetySpec::whole_space()),
        Some(list) => {
            let constraints = list
                .into_iter()
                .enumerate()
                .map(|(c, hs)| {
                    crate::safety::HalfSpace::new(hs.a, hs.b)
                        .map_err(|e| parse_err(origin, format!("safety[{c}]: {e}")))
                })
                .collect::<Result<Vec<_>>>()?;
            Some(
                SafetySpec::new(constraints)
                    .map_err(|e| parse_err(origin, format!("safety: {e}")))?,
            )
        }
    };
    Scenario::new(
        model,
        initial_sets,
        input_set,
        file.horizon,
        file.partition_counts,
        step_mode,
        safety,
    )
    .map_err(|e| parse_err(origin, e.to_string()))
}

fn read_file(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|source| Error::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn load_network(path: impl AsRef<Path>) -> Result<Network> {
    let path = path.as_ref();
    parse_network_str(&read_file(path)?, &path.display().to_string())
}

pub fn load_narma(path: impl AsRef<Path>) -> Result<NarmaModel> {
    let path = path.as_ref();
    parse_narma_str(&read_file(path)?, &path.display().to_string())
}

pub fn load_scenario(path: impl AsRef<Path>, model: &NarmaModel) -> Result<Scenario> {
    let path = path.as_ref();
    parse_scenario_str(&read_file(path)?, &path.display().to_string(), model)
}

fn layer_files(net: &Network) -> Vec<LayerFile> {
    net.layers()
        .iter()
        .map(|layer| LayerFile {
            weights: layer.weights().to_vec(),
            bias: layer.bias().to_vec(),
            activation: layer.activation().name().to_string(),
        })
        .collect()
}

/// Writes a network file. Weights survive a save/load round trip
/// bit-exactly: the JSON encoder emits the shortest decimal form that
/// parses back to the identical double.
pub fn save_network(net: &Network, path: impl AsRef<Path>) -> Result<()> {
    let file = NetworkFile {
        layers: layer_files(net),
    };
    let text = serde_json::to_string_pretty(&file).expect("network serialization cannot fail");
    write_file(path.as_ref(), &(text + "\n"))
}

/// Writes a NARMA model file; same round-trip guarantee as [`save_network`].
pub fn save_narma(model: &NarmaModel, path: impl AsRef<Path>) -> Result<()> {
    let file = NarmaFile {
        layers: layer_files(model.net()),
        state_dim: model.state_dim(),
        input_dim: model.input_dim(),
        d_x: model.d_x(),
        d_u: model.d_u(),
    };
    let text = serde_json::to_string_pretty(&file).expect("model serialization cannot fail");
    write_file(path.as_ref(), &(text + "\n"))
}
