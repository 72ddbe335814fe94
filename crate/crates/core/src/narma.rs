//! Finite-horizon reachable-set estimation for NARMA models.
//!
//! Steps `0..=d_x` echo the given initial sets. Each later step bounds the
//! one-step map over the product of the previous `d_x + 1` state estimates
//! and `d_u + 1` copies of the input set, assembled newest-state-first to
//! match the network's input layout. Forming that product forgets the
//! coupling between successive states; that conservatism is inherent to
//! the method and is why the estimate is a superset, never the exact set.

use crate::interval::{hull, CellBox};
use crate::network::{NarmaModel, Scenario, StepMode};
use crate::reach::{reach_mlp, ReachConfig};
use crate::Result;

/// The estimate for one time step: a union of boxes and its interval hull.
#[derive(Debug, Clone)]
pub struct StepSet {
    boxes: Vec<CellBox>,
    hull: CellBox,
}

impl StepSet {
    fn from_boxes(boxes: Vec<CellBox>) -> Result<Self> {
        let hull = hull(&boxes)?;
        Ok(Self { boxes, hull })
    }

    pub fn boxes(&self) -> &[CellBox] {
        &self.boxes
    }

    pub fn hull(&self) -> &CellBox {
        &self.hull
    }
}

/// Per-step reachable-set estimates over `k = 0..=k_f`.
#[derive(Debug, Clone)]
pub struct ReachTube {
    per_step: Vec<StepSet>,
}

impl ReachTube {
    pub fn steps(&self) -> &[StepSet] {
        &self.per_step
    }

    pub fn step(&self, k: usize) -> &StepSet {
        &self.per_step[k]
    }

    /// Number of recorded steps minus one (the final time index).
    pub fn horizon(&self) -> usize {
        self.per_step.len() - 1
    }
}

/// Recursive estimation over the scenario horizon.
///
/// In hull mode each past step enters the next input product as its
/// interval hull. In union mode the per-cell boxes are carried forward,
/// every combination of carried boxes is propagated separately, and a step
/// whose box count exceeds `max_boxes` collapses to its hull before being
/// carried further.
pub fn reach_narma(
    model: &NarmaModel,
    scenario: &Scenario,
    config: &ReachConfig,
) -> Result<ReachTube> {
    scenario.validate_against(model)?;
    let d_x = model.d_x();
    let d_u = model.d_u();
    let k_f = scenario.horizon();

    let mut per_step: Vec<StepSet> = Vec::with_capacity(k_f + 1);
    for k in 0..=d_x.min(k_f) {
        let set = scenario.initial_sets()[k].clone();
        per_step.push(StepSet {
            boxes: vec![set.clone()],
            hull: set,
        });
    }

    for k in (d_x + 1)..=k_f {
        let step = match scenario.step_mode() {
            StepMode::Hull => {
                let mut parts: Vec<&CellBox> = Vec::with_capacity(d_x + d_u + 2);
                for j in 1..=d_x + 1 {
                    parts.push(per_step[k - j].hull());
                }
                for _ in 0..=d_u {
                    parts.push(scenario.input_set());
                }
                let input = CellBox::concat(&parts)?;
                let (boxes, hull) =
                    reach_mlp(model.net(), &input, scenario.partition_counts(), config)?
                        .into_parts();
                StepSet { boxes, hull }
            }
            StepMode::Union { max_boxes } => {
                let lists: Vec<&[CellBox]> =
                    (1..=d_x + 1).map(|j| per_step[k - j].boxes()).collect();
                let mut boxes: Vec<CellBox> = Vec::new();
                let mut idx = vec![0usize; lists.len()];
                'combos: loop {
                    let mut parts: Vec<&CellBox> = Vec::with_capacity(lists.len() + d_u + 1);
                    for (list, &i) in lists.iter().zip(&idx) {
                        parts.push(&list[i]);
                    }
                    for _ in 0..=d_u {
                        parts.push(scenario.input_set());
                    }
                    let input = CellBox::concat(&parts)?;
                    boxes.extend(
                        reach_mlp(model.net(), &input, scenario.partition_counts(), config)?
                            .into_parts()
                            .0,
                    );
                    // Odometer over the combination indices, oldest fastest.
                    let mut d = lists.len();
                    loop {
                        if d == 0 {
                            break 'combos;
                        }
                        d -= 1;
                        idx[d] += 1;
                        if idx[d] < lists[d].len() {
                            break;
                        }
                        idx[d] = 0;
                    }
                }
                let mut step = StepSet::from_boxes(boxes)?;
                if step.boxes.len() > max_boxes {
                    step.boxes = vec![step.hull.clone()];
                }
                step
            }
        };
        per_step.push(step);
    }

    Ok(ReachTube { per_step })
}

/// Interval envelope of the whole tube: the hull over all step hulls.
pub fn reach_interval_union(tube: &ReachTube) -> Result<CellBox> {
    let hulls: Vec<CellBox> = tube.per_step.iter().map(|s| s.hull.clone()).collect();
    hull(&hulls)
}

// Used by tests to assemble tubes by hand.
#[cfg(test)]
pub(crate) fn tube_from_steps(steps: Vec<Vec<CellBox>>) -> Result<ReachTube> {
    let per_step = steps
        .into_iter()
        .map(StepSet::from_boxes)
        .collect::<Result<Vec<_>>>()?;
    if per_step.is_empty() {
        return Err(crate::Error::invalid("a tube needs at least one step"));
    }
    Ok(ReachTube { per_step })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::network::{ActivationKind, Layer, Network};
    use crate::simulate::SplitMix64;
    use crate::Error;

    fn rel_close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * b.abs().max(1.0)
    }

    fn e2_tube(counts: &[usize]) -> ReachTube {
        let model = fixtures::example2_narma();
        let scenario = fixtures::example2_scenario(&model)
            .with_partition_counts(counts.to_vec())
            .unwrap();
        reach_narma(&model, &scenario, &ReachConfig::default()).unwrap()
    }

    #[test]
    fn initial_step_is_echoed_exactly() {
        let tube = e2_tube(&[10, 10]);
        assert_eq!(tube.steps().len(), 51);
        let step0 = tube.step(0);
        assert_eq!(step0.boxes().len(), 1);
        let iv = step0.hull().interval(0);
        assert_eq!((iv.lo(), iv.hi()), (-0.2, 0.2));
    }

    #[test]
    fn benchmark_recursion_matches_frozen_values() {
        let tube = e2_tube(&[10, 10]);
        let s1 = tube.step(1).hull().interval(0);
        assert!(rel_close(s1.lo(), 3.9080594202315315, 1e-12));
        assert!(rel_close(s1.hi(), 4.7372950110283156, 1e-12));
        let s50 = tube.step(50).hull().interval(0);
        assert!(rel_close(s50.lo(), 8.0148442995134506, 1e-12));
        assert!(rel_close(s50.hi(), 8.7103706761018866, 1e-12));
    }

    #[test]
    fn benchmark_tube_stays_below_sixteen() {
        let tube = e2_tube(&[10, 10]);
        for (k, step) in tube.steps().iter().enumerate() {
            assert!(
                step.hull().interval(0).hi() < 16.0,
                "step {k} exceeds the safety line"
            );
        }
    }

    #[test]
    fn per_step_refinement_nesting() {
        let coarse = e2_tube(&[10, 10]);
        let fine = e2_tube(&[20, 20]);
        for (k, (c, f)) in coarse.steps().iter().zip(fine.steps()).enumerate() {
            assert!(
                c.hull().encloses(f.hull()).unwrap(),
                "fine step {k} not inside coarse step"
            );
        }
    }

    // A model with one state lag: x(k+1) = f(x(k), x(k-1), u(k)),
    // so horizons at or below d_x only echo.
    fn lagged_model() -> NarmaModel {
        let net = Network::new(vec![
            Layer::new(
                vec![vec![0.3, 0.2, 0.1], vec![-0.4, 0.5, 0.2]],
                vec![0.0, 0.1],
                ActivationKind::Tanh,
            )
            .unwrap(),
            Layer::new(vec![vec![0.7, -0.3]], vec![0.05], ActivationKind::Linear).unwrap(),
        ])
        .unwrap();
        NarmaModel::new(net, 1, 1, 1, 0).unwrap()
    }

    fn lagged_scenario(model: &NarmaModel, horizon: usize) -> Scenario {
        Scenario::new(
            model,
            vec![
                CellBox::from_bounds(&[(0.0, 0.1)]).unwrap(),
                CellBox::from_bounds(&[(0.2, 0.3)]).unwrap(),
            ],
            CellBox::from_bounds(&[(-1.0, 1.0)]).unwrap(),
            horizon,
            vec![2, 2, 2],
            StepMode::Hull,
            None,
        )
        .unwrap()
    }

    #[test]
    fn horizon_equal_to_lag_returns_initial_sets_only() {
        let model = lagged_model();
        let scenario = lagged_scenario(&model, 1);
        let tube = reach_narma(&model, &scenario, &ReachConfig::default()).unwrap();
        assert_eq!(tube.steps().len(), 2);
        assert_eq!(tube.step(0).boxes(), scenario.initial_sets()[..1].to_vec());
        assert_eq!(tube.step(1).boxes(), scenario.initial_sets()[1..].to_vec());
    }

    #[test]
    fn lagged_recursion_contains_sampled_trajectories() {
        let model = lagged_model();
        let scenario = lagged_scenario(&model, 12);
        let tube = reach_narma(&model, &scenario, &ReachConfig::default()).unwrap();
        let mut rng = SplitMix64::new(77);
        for _ in 0..200 {
            let mut states = vec![
                vec![rng.uniform(0.0, 0.1)],
                vec![rng.uniform(0.2, 0.3)],
            ];
            for k in 1..12 {
                let x_hist = vec![states[k].clone(), states[k - 1].clone()];
                let u = vec![rng.uniform(-1.0, 1.0)];
                states.push(model.step(&x_hist, &[u]).unwrap());
            }
            for (k, x) in states.iter().enumerate() {
                assert!(
                    tube.step(k).boxes().iter().any(|b| b.contains(x).unwrap()),
                    "state {x:?} at step {k} escaped the tube"
                );
            }
        }
    }

    #[test]
    fn union_mode_refines_hull_mode() {
        let model = fixtures::example2_narma();
        let base = fixtures::example2_scenario(&model);
        let hull_tube = reach_narma(&model, &base, &ReachConfig::default()).unwrap();
        let union_sc = base
            .with_step_mode(StepMode::Union { max_boxes: 100 })
            .unwrap();
        let union_tube = reach_narma(&model, &union_sc, &ReachConfig::default()).unwrap();
        for (k, (h, u)) in hull_tube.steps().iter().zip(union_tube.steps()).enumerate() {
            assert!(
                h.hull().encloses(u.hull()).unwrap(),
                "union step {k} not inside hull step"
            );
        }
    }

    #[test]
    fn union_mode_collapses_at_the_box_cap() {
        let model = fixtures::example2_narma();
        let sc = fixtures::example2_scenario(&model)
            .with_step_mode(StepMode::Union { max_boxes: 60 })
            .unwrap();
        // 100 cells per estimation call, cap 60: every computed step
        // collapses to a single hull box.
        let tube = reach_narma(&model, &sc, &ReachConfig::default()).unwrap();
        for step in &tube.steps()[1..] {
            assert_eq!(step.boxes().len(), 1);
        }
    }

    #[test]
    fn interval_union_examples() {
        let single = tube_from_steps(vec![vec![
            CellBox::from_bounds(&[(1.0, 2.0)]).unwrap(),
        ]])
        .unwrap();
        let env = reach_interval_union(&single).unwrap();
        assert_eq!((env.interval(0).lo(), env.interval(0).hi()), (1.0, 2.0));

        let two = tube_from_steps(vec![
            vec![CellBox::from_bounds(&[(0.0, 1.0)]).unwrap()],
            vec![CellBox::from_bounds(&[(2.0, 3.0)]).unwrap()],
        ])
        .unwrap();
        let env = reach_interval_union(&two).unwrap();
        assert_eq!((env.interval(0).lo(), env.interval(0).hi()), (0.0, 3.0));
    }

    #[test]
    fn maglev_envelopes_nest_with_refinement() {
        let model = fixtures::maglev_narma();
        let coarse_sc = fixtures::maglev_scenario(&model);
        let fine_sc = coarse_sc.with_partition_counts(vec![20, 20]).unwrap();
        let coarse = reach_narma(&model, &coarse_sc, &ReachConfig::default()).unwrap();
        let fine = reach_narma(&model, &fine_sc, &ReachConfig::default()).unwrap();
        let env_coarse = reach_interval_union(&coarse).unwrap();
        let env_fine = reach_interval_union(&fine).unwrap();
        assert!(env_fine.interval(0).lo() >= env_coarse.interval(0).lo());
        assert!(env_coarse.encloses(&env_fine).unwrap());
    }

    #[test]
    fn mismatched_model_and_scenario_are_rejected() {
        let model = fixtures::example2_narma();
        let scenario = fixtures::example2_scenario(&model);
        let other = lagged_model();
        assert!(matches!(
            reach_narma(&other, &scenario, &ReachConfig::default()),
            Err(Error::InvalidArgument(_))
        ));
    }
}
