//! The basic-version solver. Starting from a greedy first-week coloring of
//! the augmented instance, merges join cycles of its label permutation
//! until none is possible; the instance admits a balanced assignment iff a
//! single cycle remains.
//!
//! Merge times live in base coordinates: a merge at `x` in `(0, L]` swaps,
//! between two workers, every first-week slot ending after `x`. The two
//! workers must be idle at `x`, meaning none of their slots has `x`
//! strictly inside it, so no slot is cut in two.

use serde::Serialize;

use crate::assignment::{is_balanced, is_feasible, PeriodicAssignment};
use crate::augment::{augment, AugmentedInstance};
use crate::coloring::{color_first_week, FirstWeekColoring, Overload, SlotKind};
use crate::digraph::{LabelPermutation, WeekLabel};
use crate::error::{Result, RosterError};
use crate::model::{Instance, TaskId, WorkerId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MergeCandidate {
    /// Base coordinates; the same instant one week later is `at + L`.
    pub at: i64,
    pub first: TaskId,
    pub second: TaskId,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct MergeStep {
    pub candidate: MergeCandidate,
    pub cycles_before: usize,
    pub cycles_after: usize,
}

fn is_idle(coloring: &FirstWeekColoring, worker: WorkerId, x: i64) -> bool {
    coloring.slots_of(worker).all(|s| !s.straddles(x))
}

fn base_owner(coloring: &FirstWeekColoring, task: TaskId) -> WorkerId {
    coloring
        .color(task, SlotKind::Base)
        .expect("every task has a base slot")
}

/// First candidate in scan order: times are the distinct base end points in
/// ascending order, then boundary task pairs in ascending order.
pub fn find_merge(instance: &Instance, coloring: &FirstWeekColoring) -> Result<Option<MergeCandidate>> {
    let perm = coloring.label_permutation(instance)?;
    let cycles = perm.cycles();
    if cycles.len() < 2 {
        return Ok(None);
    }
    let cycle_of = |v: TaskId| cycles.iter().position(|c| c.contains(&v)).expect("vertex in a cycle");
    let mut times: Vec<i64> = instance.tasks.iter().map(|t| t.end).collect();
    times.sort_unstable();
    times.dedup();
    let u = instance.boundary_tasks();
    for &x in &times {
        for (k, &first) in u.iter().enumerate() {
            if !is_idle(coloring, base_owner(coloring, first), x) {
                continue;
            }
            for &second in &u[k + 1..] {
                if cycle_of(first) != cycle_of(second) && is_idle(coloring, base_owner(coloring, second), x) {
                    return Ok(Some(MergeCandidate { at: x, first, second }));
                }
            }
        }
    }
    Ok(None)
}

/// Swaps the late slots of the two workers. Panics if the result is not
/// proper or the cycle count does not drop by exactly one.
pub fn apply_merge(
    instance: &Instance,
    coloring: &FirstWeekColoring,
    candidate: MergeCandidate,
) -> Result<(FirstWeekColoring, MergeStep)> {
    let before = coloring.label_permutation(instance)?;
    let (a, b) = (
        base_owner(coloring, candidate.first),
        base_owner(coloring, candidate.second),
    );
    if before.cycle_of(candidate.first) == before.cycle_of(candidate.second) {
        return Err(RosterError::Precondition("merge tasks share a cycle".into()));
    }
    if !is_idle(coloring, a, candidate.at) || !is_idle(coloring, b, candidate.at) {
        return Err(RosterError::Precondition(format!("workers busy at {}", candidate.at)));
    }
    let colors = coloring
        .iter()
        .map(|(slot, w)| match w {
            _ if slot.end <= candidate.at => w,
            w if w == a => b,
            w if w == b => a,
            w => w,
        })
        .collect();
    let mut merged = coloring.clone();
    merged.set_colors(colors);
    assert!(merged.is_proper(), "merge broke properness: {:?}", merged.first_clash());
    let after = merged.label_permutation(instance)?;
    let step = MergeStep {
        candidate,
        cycles_before: before.cycle_count(),
        cycles_after: after.cycle_count(),
    };
    assert_eq!(
        step.cycles_after + 1,
        step.cycles_before,
        "a merge joins exactly two cycles"
    );
    Ok((merged, step))
}

/// Merges until no candidate is left.
pub fn saturate_merges(
    instance: &Instance,
    coloring: &FirstWeekColoring,
) -> Result<(FirstWeekColoring, Vec<MergeStep>)> {
    let mut current = coloring.clone();
    let mut steps = Vec::new();
    while let Some(candidate) = find_merge(instance, &current)? {
        let (next, step) = apply_merge(instance, &current, candidate)?;
        current = next;
        steps.push(step);
        assert!(steps.len() <= instance.workers as usize, "more merges than workers");
    }
    Ok((current, steps))
}

#[derive(Clone, Debug)]
pub enum BasicDecision {
    Balanced {
        augmented: AugmentedInstance,
        coloring: FirstWeekColoring,
        cycle: Vec<TaskId>,
        merges: Vec<MergeStep>,
    },
    Unbalanced {
        augmented: AugmentedInstance,
        coloring: FirstWeekColoring,
        cycles: Vec<Vec<TaskId>>,
        merges: Vec<MergeStep>,
    },
    Infeasible(Overload),
}

impl BasicDecision {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Self::Balanced { .. })
    }

    pub fn merges(&self) -> &[MergeStep] {
        match self {
            Self::Balanced { merges, .. } | Self::Unbalanced { merges, .. } => merges,
            Self::Infeasible(_) => &[],
        }
    }

    pub fn certificate(&self) -> serde_json::Value {
        match self {
            Self::Balanced {
                coloring,
                cycle,
                merges,
                ..
            } => serde_json::json!({
                "decision": "yes",
                "cycle": cycle,
                "merges": merges,
                "coloring": coloring.to_json(),
            }),
            Self::Unbalanced { cycles, merges, .. } => serde_json::json!({
                "decision": "no",
                "cycles": cycles,
                "merges": merges,
            }),
            Self::Infeasible(overload) => serde_json::json!({
                "decision": "infeasible",
                "overload": overload,
            }),
        }
    }
}

pub fn decide_balanced_basic(instance: &Instance) -> Result<BasicDecision> {
    if instance.is_extended() {
        return Err(RosterError::Precondition("instance carries a schedule set".into()));
    }
    if let Err(overload) = color_first_week(instance) {
        return Ok(BasicDecision::Infeasible(overload));
    }
    let augmented = augment(instance)?;
    let initial = color_first_week(&augmented.augmented).expect("augmentation keeps depth within q");
    let (coloring, merges) = saturate_merges(&augmented.augmented, &initial)?;
    let mut cycles = coloring.label_permutation(&augmented.augmented)?.cycles();
    Ok(if cycles.len() == 1 {
        BasicDecision::Balanced {
            augmented,
            coloring,
            cycle: cycles.remove(0),
            merges,
        }
    } else {
        BasicDecision::Unbalanced {
            augmented,
            coloring,
            cycles,
            merges,
        }
    })
}

/// Worker `w` finishes the same tasks in week `r + 1` that worker
/// `tau^-1(w)` finishes in week `r`, where `tau` sends the owner of each
/// base boundary slot to the owner of its shifted slot.
pub fn build_period_q_plan(aug: &AugmentedInstance, coloring: &FirstWeekColoring) -> Result<PeriodicAssignment> {
    let inst = &aug.augmented;
    let q = inst.workers;
    let perm: LabelPermutation = coloring.label_permutation(inst)?;
    if !perm.is_hamiltonian() {
        return Err(RosterError::Precondition(
            "label permutation is not a single cycle".into(),
        ));
    }
    let mut tau = vec![0; q as usize + 1];
    for i in inst.boundary_tasks() {
        tau[base_owner(coloring, i) as usize] = coloring.color(i, SlotKind::Shifted).expect("shifted slot");
    }
    let plan = PeriodicAssignment::from_fn(inst.task_count(), q, |i, r| {
        (1..r).fold(base_owner(coloring, i), |w, _| tau[w as usize])
    });
    assert_eq!(is_feasible(inst, &plan)?, None, "period-q plan must be feasible");
    assert!(is_balanced(inst, &plan), "period-q plan must be balanced");
    let restricted = aug.restrict_plan(&plan).canonicalized(q);
    assert_eq!(is_feasible(&aug.base, &restricted)?, None);
    assert!(is_balanced(&aug.base, &restricted));
    Ok(restricted)
}

/// Decides and, on a yes, builds the period-q plan.
pub fn solve_basic(instance: &Instance) -> Result<Option<PeriodicAssignment>> {
    match decide_balanced_basic(instance)? {
        BasicDecision::Balanced {
            augmented, coloring, ..
        } => build_period_q_plan(&augmented, &coloring).map(Some),
        _ => Ok(None),
    }
}

/// With `q >= 2n`, task `i` goes in week `r` to worker `(r + 2 - 2i) mod q`,
/// taken in `1..=q`.
pub fn closed_formula_plan(instance: &Instance) -> Result<PeriodicAssignment> {
    let q = i64::from(instance.workers);
    let n = instance.task_count() as i64;
    if q < 2 * n || q < 1 {
        return Err(RosterError::Precondition(format!(
            "closed formula needs q >= 2n, got q={q}, n={n}"
        )));
    }
    let plan = PeriodicAssignment::from_fn(n as usize, q as u32, |i, r| {
        let v = i64::from(r) % q + 2 - 2 * i64::from(i);
        (if v > 0 { v } else { v + q }) as WorkerId
    });
    assert_eq!(
        is_feasible(instance, &plan)?,
        None,
        "closed formula plan must be feasible"
    );
    assert!(is_balanced(instance, &plan), "closed formula plan must be balanced");
    Ok(plan)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct MinWorkers {
    pub workers: u32,
    /// `(q, balanced)` in probe order.
    pub probes: Vec<(u32, bool)>,
}

/// Binary search between the overlap depth and `2n`, where the closed
/// formula always succeeds.
pub fn min_workers(instance: &Instance) -> Result<MinWorkers> {
    let n = instance.task_count() as u32;
    let mut lo = (instance.max_overlap_depth() as u32).max(1);
    let mut hi = (2 * n).max(1);
    let mut probes = Vec::new();
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        let yes = decide_balanced_basic(&instance.with_workers(mid))?.is_balanced();
        probes.push((mid, yes));
        if yes {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(MinWorkers { workers: lo, probes })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assignment::balance_profile;

    fn e1() -> Instance {
        Instance::from_intervals(10, 2, &[(-3, 4), (2, 9)])
    }

    fn e2() -> Instance {
        Instance::from_intervals(10, 2, &[(-3, 4), (5, 9)])
    }

    /// E2 augmented with each worker keeping its own boundary task.
    fn e2_two_loops() -> (Instance, FirstWeekColoring) {
        let aug = augment(&e2()).unwrap().augmented;
        let c = FirstWeekColoring::from_fn(&aug, |task, _| if task == 1 { 1 } else { 2 }).unwrap();
        assert!(c.is_proper());
        (aug, c)
    }

    #[test]
    fn e2_hand_coloring_merges_once() {
        let (aug, c) = e2_two_loops();
        assert_eq!(c.label_permutation(&aug).unwrap().cycle_count(), 2);
        let cand = find_merge(&aug, &c).unwrap().unwrap();
        // Worker 2 runs t3 over 4; at 5 it hands over from t3 to t2.
        assert_eq!(
            cand,
            MergeCandidate {
                at: 5,
                first: 1,
                second: 3
            }
        );
        let (merged, step) = apply_merge(&aug, &c, cand).unwrap();
        assert_eq!((step.cycles_before, step.cycles_after), (2, 1));
        assert_eq!(merged.color(1, SlotKind::Base), Some(1));
        assert_eq!(merged.color(3, SlotKind::Base), Some(2));
        assert_eq!(merged.color(2, SlotKind::Base), Some(1));
        assert_eq!(merged.color(3, SlotKind::Shifted), Some(1));
        assert_eq!(merged.color(1, SlotKind::Shifted), Some(2));
        let (_, steps) = saturate_merges(&aug, &c).unwrap();
        assert_eq!(steps.len(), 1);
    }

    #[test]
    fn e1_has_no_merge() {
        let aug = augment(&e1()).unwrap().augmented;
        let c = color_first_week(&aug).unwrap();
        assert_eq!(find_merge(&aug, &c).unwrap(), None);
    }

    #[test]
    fn decisions_on_examples() {
        let d = decide_balanced_basic(&e2()).unwrap();
        assert!(d.is_balanced());
        match decide_balanced_basic(&e1()).unwrap() {
            BasicDecision::Unbalanced { cycles, merges, .. } => {
                assert_eq!(cycles, vec![vec![1], vec![3]]);
                assert!(merges.is_empty());
            }
            other => panic!("unexpected {other:?}"),
        }
        let crowded = Instance::from_intervals(10, 2, &[(1, 5), (2, 6), (3, 7)]);
        assert!(matches!(
            decide_balanced_basic(&crowded).unwrap(),
            BasicDecision::Infeasible(_)
        ));
    }

    #[test]
    fn e2_period_two_plan() {
        let plan = solve_basic(&e2()).unwrap().unwrap();
        assert_eq!(plan.period(), 2);
        assert_eq!((plan.worker(1, 1), plan.worker(2, 1)), (1, 1));
        assert_eq!((plan.worker(1, 2), plan.worker(2, 2)), (2, 2));
    }

    #[test]
    fn single_worker_plan_is_constant() {
        let inst = Instance::from_intervals(10, 1, &[(-3, 4), (5, 7)]);
        let plan = solve_basic(&inst).unwrap().unwrap();
        assert_eq!(plan.period(), 1);
        assert!(balance_profile(&inst, &plan).counts.iter().all(|row| row == &vec![1]));
    }

    #[test]
    fn closed_formula_values() {
        let inst = Instance::from_intervals(10, 4, &[(-3, 4), (2, 9)]);
        let plan = closed_formula_plan(&inst).unwrap();
        assert_eq!(plan.worker(1, 1), 1);
        assert_eq!(plan.worker(2, 1), 3);
        assert_eq!(plan.worker(2, 5), plan.worker(2, 1));
        assert!(closed_formula_plan(&e1()).is_err());
    }

    #[test]
    fn min_workers_examples() {
        assert_eq!(min_workers(&e2()).unwrap().workers, 2);
        assert_eq!(min_workers(&e1()).unwrap().workers, 3);
        assert_eq!(
            min_workers(&Instance::from_intervals(10, 7, &[(2, 5)]))
                .unwrap()
                .workers,
            1
        );
    }
}
