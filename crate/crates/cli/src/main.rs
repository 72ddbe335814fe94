//! reachtube: guaranteed over-approximation of neural-network reachable
//! sets from the command line.
//!
//! Subcommands: `reach-mlp` bounds a feed-forward network's outputs over a
//! box input set; `reach-narma` iterates the estimate over a NARMA model's
//! horizon; `verify` checks the tube against the scenario's safety
//! specification; `sample` cross-checks the tube with seeded Monte Carlo
//! trajectories. Data files (CSV/SVG) are deterministic and byte-identical
//! across reruns; report.json carries the wall-clock timings.
//!
//! Exit codes: 0 success (and SAFE / all contained), 2 for an UNCERTAIN
//! verdict or a containment violation, 1 for usage, I/O and validation
//! errors.

mod csv;
mod report;
mod svg;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use reachtube_core::{
    check_containment, load_narma, load_network, load_scenario, reach_mlp, reach_narma,
    sample_trajectories, verify_tube, CellBox, NarmaModel, ReachConfig, Scenario, StepMode,
    Trajectory,
};
use report::{cell_count, timed, RunReport, SamplingSummary, Timings};

const EXIT_VERDICT: i32 = 2;

#[derive(Parser)]
#[command(
    name = "reachtube",
    version,
    about = "Reachable-set estimation and safety verification for neural-network models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Bound a feed-forward network's outputs over a box input set.
    #[command(name = "reach-mlp")]
    ReachMlp(ReachMlpArgs),
    /// Estimate the reachable tube of a NARMA model over its horizon.
    #[command(name = "reach-narma")]
    ReachNarma(ReachNarmaArgs),
    /// Verify a NARMA model against the scenario's safety specification.
    Verify(VerifyArgs),
    /// Simulate seeded trajectories and check them against the tube.
    Sample(SampleArgs),
}

#[derive(Args)]
struct ComputeOpts {
    /// Worker threads for cell propagation (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Pad every computed bound outward by this amount.
    #[arg(long, default_value_t = 0.0)]
    widen_eps: f64,
    /// Refuse partitions with more cells than this.
    #[arg(long, default_value_t = 1_000_000)]
    max_cells: u64,
}

impl ComputeOpts {
    fn configure(&self) -> Result<ReachConfig> {
        if let Some(t) = self.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build_global()
                .context("configuring the thread pool")?;
        }
        Ok(ReachConfig {
            max_cells: self.max_cells,
            widen_eps: self.widen_eps,
        })
    }
}

#[derive(Args)]
struct ScenarioOpts {
    /// NARMA model file.
    #[arg(long)]
    model: PathBuf,
    /// Scenario file (initial sets, input set, horizon, counts, step mode).
    #[arg(long)]
    scenario: PathBuf,
    /// Override the scenario's partition counts, e.g. "20,20".
    #[arg(long)]
    counts: Option<String>,
    /// Override the scenario's step mode.
    #[arg(long, value_parser = ["hull", "union"])]
    mode: Option<String>,
    /// Box cap per step for union mode.
    #[arg(long)]
    max_boxes: Option<usize>,
}

impl ScenarioOpts {
    fn load(&self) -> Result<(NarmaModel, Scenario)> {
        let model = load_narma(&self.model)?;
        let mut scenario = load_scenario(&self.scenario, &model)?;
        if let Some(counts) = &self.counts {
            scenario = scenario.with_partition_counts(parse_counts(counts)?)?;
        }
        scenario = match (self.mode.as_deref(), self.max_boxes) {
            (None, None) => scenario,
            (Some("hull"), None) => scenario.with_step_mode(StepMode::Hull)?,
            (Some("union"), Some(n)) => {
                scenario.with_step_mode(StepMode::Union { max_boxes: n })?
            }
            (Some("union"), None) => bail!("--mode union needs --max-boxes"),
            (Some("hull"), Some(_)) => bail!("--max-boxes only applies to union mode"),
            (None, Some(n)) => match scenario.step_mode() {
                StepMode::Union { .. } => {
                    scenario.with_step_mode(StepMode::Union { max_boxes: n })?
                }
                StepMode::Hull => bail!("--max-boxes only applies to union mode"),
            },
            (Some(other), _) => unreachable!("mode {other:?} passed clap validation"),
        };
        Ok((model, scenario))
    }
}

#[derive(Args)]
struct ReachMlpArgs {
    /// Network file.
    #[arg(long)]
    model: PathBuf,
    /// Input box, one lo:hi pair per dimension: "lo:hi,lo:hi".
    #[arg(long = "box", allow_hyphen_values = true)]
    input_box: String,
    /// Partition counts per input dimension, e.g. "20,20".
    #[arg(long)]
    counts: String,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    #[command(flatten)]
    compute: ComputeOpts,
}

#[derive(Args)]
struct ReachNarmaArgs {
    #[command(flatten)]
    scenario: ScenarioOpts,
    /// Output directory (created if missing).
    #[arg(long)]
    out: PathBuf,
    /// Draw this many sampled trajectories over the tube plot.
    #[arg(long)]
    overlay_samples: Option<usize>,
    /// Seed for --overlay-samples.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    compute: ComputeOpts,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    scenario: ScenarioOpts,
    #[command(flatten)]
    compute: ComputeOpts,
}

#[derive(Args)]
struct SampleArgs {
    #[command(flatten)]
    scenario: ScenarioOpts,
    /// Number of trajectories to simulate.
    #[arg(long)]
    count: usize,
    /// Master seed; trajectory i uses substream i.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for trajectories.csv and report.json (optional).
    #[arg(long)]
    out: Option<PathBuf>,
    #[command(flatten)]
    compute: ComputeOpts,
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                print!("{err}");
                std::process::exit(0);
            }
            eprint!("{err}");
            std::process::exit(1);
        }
    };
    let outcome = match cli.command {
        Command::ReachMlp(args) => run_reach_mlp(args),
        Command::ReachNarma(args) => run_reach_narma(args),
        Command::Verify(args) => run_verify(args),
        Command::Sample(args) => run_sample(args),
    };
    match outcome {
        Ok(code) => std::process::exit(code),
        Err(err) => {
            eprintln!("error: {err:#}");
            std::process::exit(1);
        }
    }
}

fn parse_counts(s: &str) -> Result<Vec<usize>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<usize>()
                .with_context(|| format!("bad partition count {t:?}"))
        })
        .collect()
}

fn parse_box(s: &str) -> Result<CellBox> {
    let mut bounds = Vec::new();
    for part in s.split(',') {
        let (lo, hi) = part
            .split_once(':')
            .with_context(|| format!("bad box dimension {part:?}, expected lo:hi"))?;
        let lo: f64 = lo
            .trim()
            .parse()
            .with_context(|| format!("bad lower bound {lo:?}"))?;
        let hi: f64 = hi
            .trim()
            .parse()
            .with_context(|| format!("bad upper bound {hi:?}"))?;
        bounds.push((lo, hi));
    }
    Ok(CellBox::from_bounds(&bounds)?)
}

fn make_out_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))
}

fn run_reach_mlp(args: ReachMlpArgs) -> Result<i32> {
    let config = args.compute.configure()?;
    let mut timings = Timings::default();

    let net = timed(&mut timings.load_s, || load_network(&args.model))?;
    let input = parse_box(&args.input_box)?;
    let counts = parse_counts(&args.counts)?;
    make_out_dir(&args.out)?;

    let result = timed(&mut timings.compute_s, || {
        reach_mlp(&net, &input, &counts, &config)
    })?;

    let mut outputs = vec!["tubes.csv".to_string(), "hull.csv".to_string()];
    timed(&mut timings.write_s, || -> Result<()> {
        csv::write_tubes(&args.out.join("tubes.csv"), result.tubes())?;
        csv::write_hull(&args.out.join("hull.csv"), result.hull())?;
        if result.hull().dim() == 2 {
            let drawing = svg::reach2d(result.tubes(), result.hull());
            std::fs::write(args.out.join("reach2d.svg"), drawing)
                .context("writing reach2d.svg")?;
            outputs.push("reach2d.svg".to_string());
        }
        Ok(())
    })?;
    outputs.push("report.json".to_string());

    RunReport {
        command: "reach-mlp".into(),
        model: args.model.display().to_string(),
        scenario: None,
        partition_counts: counts.clone(),
        cell_count: cell_count(&counts),
        horizon: None,
        step_mode: None,
        verdict: None,
        sampling: None,
        timings,
        outputs,
    }
    .write(&args.out)?;

    println!(
        "{} tubes over {} cells -> {}",
        result.tubes().len(),
        cell_count(&counts),
        args.out.display()
    );
    Ok(0)
}

fn step_mode_name(mode: StepMode) -> String {
    match mode {
        StepMode::Hull => "hull".into(),
        StepMode::Union { max_boxes } => format!("union(max_boxes={max_boxes})"),
    }
}

fn run_reach_narma(args: ReachNarmaArgs) -> Result<i32> {
    let config = args.compute.configure()?;
    let mut timings = Timings::default();

    let (model, scenario) = timed(&mut timings.load_s, || args.scenario.load())?;
    make_out_dir(&args.out)?;

    let tube = timed(&mut timings.compute_s, || {
        reach_narma(&model, &scenario, &config)
    })?;
    let overlays: Vec<Trajectory> = match args.overlay_samples {
        Some(n) => sample_trajectories(&model, &scenario, n, args.seed)?,
        None => Vec::new(),
    };

    let mut outputs = vec![
        "tube.csv".to_string(),
        "boxes.csv".to_string(),
        "tube.svg".to_string(),
    ];
    timed(&mut timings.write_s, || -> Result<()> {
        csv::write_step_hulls(&args.out.join("tube.csv"), &tube)?;
        csv::write_step_boxes(&args.out.join("boxes.csv"), &tube)?;
        std::fs::write(args.out.join("tube.svg"), svg::tube_bands(&tube, &overlays))
            .context("writing tube.svg")?;
        Ok(())
    })?;
    outputs.push("report.json".to_string());

    RunReport {
        command: "reach-narma".into(),
        model: args.scenario.model.display().to_string(),
        scenario: Some(args.scenario.scenario.display().to_string()),
        partition_counts: scenario.partition_counts().to_vec(),
        cell_count: cell_count(scenario.partition_counts()),
        horizon: Some(scenario.horizon()),
        step_mode: Some(step_mode_name(scenario.step_mode())),
        verdict: None,
        sampling: None,
        timings,
        outputs,
    }
    .write(&args.out)?;

    println!(
        "{}-step tube ({} boxes) -> {}",
        tube.steps().len(),
        tube.steps().iter().map(|s| s.boxes().len()).sum::<usize>(),
        args.out.display()
    );
    Ok(0)
}

fn run_verify(args: VerifyArgs) -> Result<i32> {
    let config = args.compute.configure()?;
    let (model, scenario) = args.scenario.load()?;
    let Some(spec) = scenario.safety().cloned() else {
        bail!(
            "{} has no safety specification to verify against",
            args.scenario.scenario.display()
        );
    };
    let tube = reach_narma(&model, &scenario, &config)?;
    let verdict = verify_tube(&tube, &spec)?;
    println!("{verdict}");
    Ok(if verdict.is_safe() { 0 } else { EXIT_VERDICT })
}

fn run_sample(args: SampleArgs) -> Result<i32> {
    let config = args.compute.configure()?;
    let mut timings = Timings::default();

    let (model, scenario) = timed(&mut timings.load_s, || args.scenario.load())?;
    let (trajs, containment) = timed(&mut timings.compute_s, || -> Result<_> {
        let tube = reach_narma(&model, &scenario, &config)?;
        let trajs = sample_trajectories(&model, &scenario, args.count, args.seed)?;
        let containment = check_containment(&tube, &trajs)?;
        Ok((trajs, containment))
    })?;

    println!(
        "trajectories={} points={} violations={}",
        containment.trajectories, containment.points_checked, containment.violations
    );
    if let Some(v) = &containment.first_violation {
        println!(
            "first violation: trajectory {} step {} state {:?}",
            v.trajectory, v.step, v.state
        );
    }

    if let Some(dir) = &args.out {
        make_out_dir(dir)?;
        let outputs = vec!["trajectories.csv".to_string(), "report.json".to_string()];
        timed(&mut timings.write_s, || {
            csv::write_trajectories(&dir.join("trajectories.csv"), &trajs)
        })?;
        RunReport {
            command: "sample".into(),
            model: args.scenario.model.display().to_string(),
            scenario: Some(args.scenario.scenario.display().to_string()),
            partition_counts: scenario.partition_counts().to_vec(),
            cell_count: cell_count(scenario.partition_counts()),
            horizon: Some(scenario.horizon()),
            step_mode: Some(step_mode_name(scenario.step_mode())),
            verdict: None,
            sampling: Some(SamplingSummary {
                trajectories: containment.trajectories,
                points_checked: containment.points_checked,
                violations: containment.violations,
            }),
            timings,
            outputs,
        }
        .write(dir)?;
    }

    Ok(if containment.all_contained() {
        0
    } else {
        EXIT_VERDICT
    })
}
