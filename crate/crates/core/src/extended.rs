//! Extended version: schedules restricted to an explicit set. A balanced
//! assignment exists iff the transition digraph of a universal label set on
//! the augmented instance is connected. Plans come from playing the labels
//! as colors of a pebble system, one pebble per worker.

use serde::Serialize;

use crate::assignment::{
    chain_decompositions, hand_over, is_balanced, is_feasible, PeriodicAssignment, WeekDecomposition,
};
use crate::augment::{augment, AugmentedInstance};
use crate::cover::{build_universal_set, find_decomposition};
use crate::digraph::{LabelPermutation, LabeledDigraph, WeekLabel};
use crate::error::{Result, RosterError};
use crate::model::{Instance, TaskId};
use crate::pebble::{factorial, periodic_color_sequence, ColoredGraph, DEFAULT_LIFT_CAP};

#[derive(Clone, Debug)]
pub enum ExtendedDecision {
    Balanced {
        augmented: AugmentedInstance,
        labels: Vec<WeekDecomposition>,
    },
    /// The components of the transition digraph.
    Unbalanced {
        augmented: AugmentedInstance,
        labels: Vec<WeekDecomposition>,
        components: Vec<Vec<TaskId>>,
    },
    Infeasible(String),
}

impl ExtendedDecision {
    pub fn is_balanced(&self) -> bool {
        matches!(self, Self::Balanced { .. })
    }

    pub fn certificate(&self) -> serde_json::Value {
        match self {
            Self::Balanced { labels, .. } => serde_json::json!({
                "decision": "yes",
                "labels": labels,
                "period_bound": period_bound(labels.len(), self.workers()),
            }),
            Self::Unbalanced { labels, components, .. } => serde_json::json!({
                "decision": "no",
                "labels": labels,
                "components": components,
            }),
            Self::Infeasible(reason) => serde_json::json!({
                "decision": "infeasible",
                "reason": reason,
            }),
        }
    }

    fn workers(&self) -> u32 {
        match self {
            Self::Balanced { augmented, .. } | Self::Unbalanced { augmented, .. } => augmented.base.workers,
            Self::Infeasible(_) => 0,
        }
    }
}

/// `|F| * q!`
pub fn period_bound(labels: usize, q: u32) -> u64 {
    labels as u64 * factorial(q as usize)
}

pub fn decide_balanced_extended(instance: &Instance) -> Result<ExtendedDecision> {
    if !instance.is_extended() {
        return Err(RosterError::Precondition("instance has no schedule set".into()));
    }
    instance.ensure_valid()?;
    let augmented = match augment(instance) {
        Ok(a) => a,
        Err(RosterError::Infeasible(reason)) => return Ok(ExtendedDecision::Infeasible(reason)),
        Err(e) => return Err(e),
    };
    let inst = &augmented.augmented;
    if find_decomposition(inst)?.is_none() {
        return Ok(ExtendedDecision::Infeasible(
            "no week decomposition into allowed schedules".into(),
        ));
    }
    let labels = build_universal_set(inst)?;
    let digraph = LabeledDigraph::build(inst, &labels)?;
    let components = digraph.components();
    Ok(if components.len() == 1 {
        debug_assert!(digraph.is_strongly_connected());
        ExtendedDecision::Balanced { augmented, labels }
    } else {
        ExtendedDecision::Unbalanced {
            augmented,
            labels,
            components,
        }
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ExtendedPlan {
    #[serde(skip)]
    pub plan: PeriodicAssignment,
    pub period: u32,
    pub bound: u64,
    /// Label index played in each week of the period.
    pub weeks: Vec<usize>,
}

/// Plays the universal labels as pebble colors on the boundary tasks of the
/// augmented instance and chains the resulting weeks. The lifted circuit
/// returns every worker to its starting boundary task, so the chain closes
/// after one circuit.
pub fn build_periodic_plan_extended(instance: &Instance) -> Result<ExtendedPlan> {
    let (augmented, labels) = match decide_balanced_extended(instance)? {
        ExtendedDecision::Balanced { augmented, labels } => (augmented, labels),
        _ => return Err(RosterError::Precondition("no balanced assignment exists".into())),
    };
    let inst = &augmented.augmented;
    let q = inst.workers;
    let u = inst.boundary_tasks();
    let index = |t: TaskId| u.binary_search(&t).expect("boundary task");
    let perms: Vec<LabelPermutation> = labels
        .iter()
        .map(|d| d.label_permutation(inst))
        .collect::<Result<_>>()?;
    let graph = ColoredGraph::from_permutations(
        u.len(),
        &perms
            .iter()
            .map(|p| u.iter().map(|&i| index(p.apply(i))).collect())
            .collect::<Vec<Vec<usize>>>(),
    );
    let seq = periodic_color_sequence(&graph, &(0..u.len()).collect::<Vec<_>>(), DEFAULT_LIFT_CAP.max(u.len()))?;

    // Worker k + 1 holds part k of the first week; order parts by their
    // boundary task so worker j starts on the j-th boundary task.
    let weeks: Vec<WeekDecomposition> = seq
        .colors
        .iter()
        .map(|&c| {
            let d = &labels[c];
            let mut parts = d.parts.clone();
            parts.sort_by_key(|p| p.finishing.iter().find(|t| u.contains(t)).map(|&t| index(t)));
            WeekDecomposition::new(parts)
        })
        .collect();
    let table = chain_decompositions(inst, &weeks)?;
    let wrap = hand_over(inst, weeks.last().expect("non-empty period"), &weeks[0])?;
    let closing_owner: Vec<u32> = {
        let last = &table[table.len() - 1];
        let mut owner = vec![0; wrap.len()];
        for (k, &target) in wrap.iter().enumerate() {
            let part = &weeks[weeks.len() - 1].parts[k];
            let any_task = part.finishing.iter().next().expect("parts finish a boundary task");
            owner[target] = last[*any_task as usize - 1];
        }
        owner
    };
    assert_eq!(
        closing_owner,
        (1..=q).collect::<Vec<_>>(),
        "color sequence must close the chain"
    );

    let period = weeks.len() as u32;
    let full = PeriodicAssignment::from_fn(inst.task_count(), period, |i, r| table[r as usize - 1][i as usize - 1]);
    assert_eq!(
        is_feasible(inst, &full)?,
        None,
        "extended plan must be feasible on the augmented instance"
    );
    let plan = augmented.restrict_plan(&full).canonicalized(q);
    let bound = period_bound(labels.len(), q);
    assert!(u64::from(period) <= bound, "period {period} exceeds {bound}");
    assert!(bound <= u64::from(q) * u64::from(q) * factorial(q as usize));
    assert_eq!(
        is_feasible(&augmented.base, &plan)?,
        None,
        "extended plan must be feasible"
    );
    assert!(is_balanced(&augmented.base, &plan), "extended plan must be balanced");
    Ok(ExtendedPlan {
        plan,
        period,
        bound,
        weeks: seq.colors,
    })
}
