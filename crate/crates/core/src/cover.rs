//! Exact cover of one week by allowed schedules: pick `q` schedules whose
//! finishing sets partition the tasks and whose starting tasks cover the
//! boundary tasks once each.
//!
//! Plain backtracking. Branching is on the lowest unfilled task, then on
//! the remaining starting slots, then on idle parts; candidate schedules are
//! tried in sorted order, so results are deterministic. A dancing-links
//! matrix would replace `Search::run` if instances ever grow past desk scale.

use std::collections::BTreeSet;

use crate::assignment::WeekDecomposition;
use crate::error::{Result, RosterError};
use crate::model::{Instance, Schedule, TaskId};

/// `part(from)` must start `to`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PairConstraint {
    pub from: TaskId,
    pub to: TaskId,
}

struct Search<'a> {
    schedules: Vec<&'a Schedule>,
    n: usize,
    q: usize,
    boundary: Vec<TaskId>,
    pair: Option<PairConstraint>,
    finished: Vec<bool>,
    started: Vec<bool>,
    chosen: Vec<usize>,
    limit: usize,
    found: Vec<WeekDecomposition>,
}

impl<'a> Search<'a> {
    fn new(instance: &'a Instance, pair: Option<PairConstraint>, limit: usize) -> Result<Self> {
        let schedules: Vec<&Schedule> = match &instance.schedules {
            Some(s) => {
                let mut v: Vec<&Schedule> = s.iter().collect::<BTreeSet<_>>().into_iter().collect();
                v.sort();
                v
            }
            None => return Err(RosterError::Precondition("instance has no schedule set".into())),
        };
        let n = instance.task_count();
        Ok(Self {
            schedules,
            n,
            q: instance.workers as usize,
            boundary: instance.boundary_tasks(),
            pair,
            finished: vec![false; n + 1],
            started: vec![false; n + 1],
            chosen: Vec::new(),
            limit,
            found: Vec::new(),
        })
    }

    fn fits(&self, s: &Schedule) -> bool {
        s.finishing
            .iter()
            .all(|&t| (t as usize) <= self.n && !self.finished[t as usize])
            && s.starting
                .is_none_or(|w| self.boundary.contains(&w) && !self.started[w as usize])
            && self
                .pair
                .is_none_or(|p| !s.finishing.contains(&p.from) || s.starting == Some(p.to))
    }

    fn toggle(&mut self, k: usize, on: bool) {
        let s = self.schedules[k];
        for &t in &s.finishing {
            self.finished[t as usize] = on;
        }
        if let Some(w) = s.starting {
            self.started[w as usize] = on;
        }
    }

    fn run(&mut self) {
        if self.found.len() >= self.limit || self.chosen.len() > self.q {
            return;
        }
        let open_task = (1..=self.n).find(|&t| !self.finished[t]);
        let open_start = self.boundary.iter().copied().find(|&w| !self.started[w as usize]);
        let candidates: Vec<usize> = match (open_task, open_start) {
            (Some(t), _) => (0..self.schedules.len())
                .filter(|&k| self.schedules[k].finishing.contains(&(t as TaskId)))
                .collect(),
            (None, Some(w)) => (0..self.schedules.len())
                .filter(|&k| self.schedules[k].finishing.is_empty() && self.schedules[k].starting == Some(w))
                .collect(),
            (None, None) => {
                let missing = self.q - self.chosen.len();
                if missing == 0 || self.schedules.iter().any(|s| **s == Schedule::idle()) {
                    let mut parts: Vec<Schedule> = self.chosen.iter().map(|&k| self.schedules[k].clone()).collect();
                    parts.extend(std::iter::repeat_n(Schedule::idle(), missing));
                    self.found.push(WeekDecomposition::new(parts).canonical());
                }
                return;
            }
        };
        if self.chosen.len() == self.q {
            return;
        }
        for k in candidates {
            if !self.fits(self.schedules[k]) {
                continue;
            }
            self.toggle(k, true);
            self.chosen.push(k);
            self.run();
            self.chosen.pop();
            self.toggle(k, false);
            if self.found.len() >= self.limit {
                return;
            }
        }
    }
}

fn search(instance: &Instance, pair: Option<PairConstraint>, limit: usize) -> Result<Vec<WeekDecomposition>> {
    let mut s = Search::new(instance, pair, limit)?;
    s.run();
    let mut found = s.found;
    found.dedup();
    for d in &found {
        d.check(instance)?;
    }
    Ok(found)
}

/// Any decomposition of one week, or `None` if the schedules admit none.
pub fn find_decomposition(instance: &Instance) -> Result<Option<WeekDecomposition>> {
    Ok(search(instance, None, 1)?.into_iter().next())
}

/// A decomposition in which the worker finishing `from` starts `to`.
pub fn find_decomposition_with_pair(
    instance: &Instance,
    from: TaskId,
    to: TaskId,
) -> Result<Option<WeekDecomposition>> {
    let u = instance.boundary_tasks();
    if !u.contains(&from) || !u.contains(&to) {
        return Err(RosterError::Precondition(format!(
            "t{from} and t{to} must be boundary tasks"
        )));
    }
    Ok(search(instance, Some(PairConstraint { from, to }), 1)?
        .into_iter()
        .next())
}

/// Every decomposition, as sorted multisets, without repetitions.
pub fn enumerate_decompositions(instance: &Instance) -> Result<Vec<WeekDecomposition>> {
    let found = search(instance, None, usize::MAX)?;
    let unique: BTreeSet<WeekDecomposition> = found.into_iter().collect();
    Ok(unique.into_iter().collect())
}

/// One decomposition per realizable boundary transition `(i, i')`,
/// deduplicated; at most `q^2` labels. Expects `|U| = q`.
pub fn build_universal_set(instance: &Instance) -> Result<Vec<WeekDecomposition>> {
    let u = instance.boundary_tasks();
    if u.len() != instance.workers as usize {
        return Err(RosterError::Precondition(
            "augment before building a universal set".into(),
        ));
    }
    let mut labels: Vec<WeekDecomposition> = Vec::new();
    for &i in &u {
        for &j in &u {
            if let Some(d) = find_decomposition_with_pair(instance, i, j)? {
                if !labels.contains(&d) {
                    labels.push(d);
                }
            }
        }
    }
    assert!(labels.len() <= u.len() * u.len());
    Ok(labels)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::augment;
    use crate::digraph::WeekLabel;

    fn with_all_schedules(inst: &Instance) -> Instance {
        Instance::extended(
            inst.units_per_week(),
            inst.workers,
            inst.tasks.clone(),
            inst.all_non_overlapping_schedules(),
        )
    }

    fn e2_full_augmented() -> Instance {
        let e2 = Instance::from_intervals(10, 2, &[(-3, 4), (5, 9)]);
        augment(&with_all_schedules(&e2)).unwrap().augmented
    }

    #[test]
    fn e2_decomposition() {
        let d = find_decomposition(&e2_full_augmented()).unwrap().unwrap();
        assert_eq!(d.parts.len(), 2);
        let with_t1 = &d.parts[d.part_finishing(1).unwrap()];
        assert_eq!(with_t1.finishing, [1].into_iter().collect());
        let with_t3 = &d.parts[d.part_finishing(3).unwrap()];
        assert_eq!(with_t3.finishing, [2, 3].into_iter().collect());
    }

    #[test]
    fn uncoverable_task() {
        let inst = Instance::extended(10, 1, vec![crate::model::Task::new(1, 1, 3)], vec![Schedule::idle()]);
        assert_eq!(find_decomposition(&augment(&inst).unwrap().augmented).unwrap(), None);
    }

    #[test]
    fn exact_partition_is_returned() {
        let parts = vec![Schedule::new([1], Some(1)), Schedule::new([2], Some(2))];
        let inst = Instance::extended(
            10,
            2,
            Instance::from_intervals(10, 2, &[(-3, 4), (0, 5)]).tasks,
            parts.clone(),
        );
        assert_eq!(find_decomposition(&inst).unwrap().unwrap().parts, parts);
        assert_eq!(find_decomposition_with_pair(&inst, 1, 2).unwrap(), None);
        assert!(find_decomposition_with_pair(&inst, 1, 1).unwrap().is_some());
    }

    #[test]
    fn e2_universal_set_has_identity_and_swap() {
        let inst = e2_full_augmented();
        let labels = build_universal_set(&inst).unwrap();
        let perms: Vec<_> = labels.iter().map(|d| d.label_permutation(&inst).unwrap()).collect();
        assert!(perms.iter().any(|p| p.apply(1) == 1));
        assert!(perms.iter().any(|p| p.apply(1) == 3));
        assert!(labels.len() <= 4);
    }

    #[test]
    fn single_boundary_task() {
        let inst = with_all_schedules(&Instance::from_intervals(10, 1, &[(-3, 4), (5, 7)]));
        assert_eq!(build_universal_set(&inst).unwrap().len(), 1);
    }

    #[test]
    fn enumeration_is_deterministic() {
        let inst = e2_full_augmented();
        assert_eq!(
            enumerate_decompositions(&inst).unwrap(),
            enumerate_decompositions(&inst).unwrap()
        );
    }
}
