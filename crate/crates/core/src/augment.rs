//! Padding an instance with short fictitious boundary tasks until exactly
//! `q` tasks straddle the week boundary, and moving plans and first-week
//! colorings between the padded and the original instance.

use std::collections::BTreeSet;

use crate::assignment::PeriodicAssignment;
use crate::coloring::{build_interval_graph, FirstWeekColoring, SlotKind};
use crate::error::{Result, RosterError};
use crate::model::{Instance, Schedule, Task, TaskId, WorkerId};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AugmentedInstance {
    pub base: Instance,
    pub augmented: Instance,
    /// Ids `n + 1 ..= n'`, each task `[0, epsilon)`.
    pub fictitious: Vec<TaskId>,
    pub epsilon: i64,
}

/// Length of the fictitious tasks: the earliest start of a non-boundary
/// task or of the next occurrence of a boundary task. A task-free instance
/// gets whole-week fictitious tasks.
pub fn fictitious_length(instance: &Instance) -> i64 {
    let l = instance.units_per_week();
    instance
        .tasks
        .iter()
        .map(|t| if t.is_boundary() { t.start + l } else { t.start })
        .min()
        .unwrap_or(l)
}

pub fn augment(instance: &Instance) -> Result<AugmentedInstance> {
    let boundary = instance.boundary_tasks();
    let q = instance.workers as usize;
    if boundary.len() > q {
        return Err(RosterError::Infeasible(format!(
            "{} tasks cover the week boundary but only {q} workers exist",
            boundary.len()
        )));
    }
    let epsilon = fictitious_length(instance);
    assert!(epsilon >= 1, "fictitious tasks must have positive length");

    let n = instance.task_count() as TaskId;
    let fictitious: Vec<TaskId> = (n + 1..=n + (q - boundary.len()) as TaskId).collect();
    let mut tasks = instance.tasks.clone();
    tasks.extend(fictitious.iter().map(|&id| Task::new(id, 0, epsilon)));

    let schedules = match &instance.schedules {
        Some(_) if fictitious.is_empty() => instance.schedules.clone(),
        Some(schedules) => Some(lift_schedules(instance, schedules, &fictitious)),
        None => None,
    };
    let augmented = Instance {
        grid: instance.grid,
        workers: instance.workers,
        tasks,
        schedules,
    };
    if let Some(lifted) = &augmented.schedules {
        for schedule in lifted {
            assert!(
                augmented.schedule_is_non_overlapping(schedule)?,
                "lifted schedule {schedule} overlaps"
            );
        }
    }
    Ok(AugmentedInstance {
        base: instance.clone(),
        augmented,
        fictitious,
        epsilon,
    })
}

/// A schedule without a boundary task gains one fictitious finishing task,
/// and one that starts nothing gains one fictitious starting task, in every
/// combination. Duplicates are removed.
fn lift_schedules(instance: &Instance, schedules: &[Schedule], fictitious: &[TaskId]) -> Vec<Schedule> {
    let mut out = BTreeSet::new();
    for schedule in schedules {
        let has_boundary = schedule.finishing.iter().any(|&t| instance.is_boundary(t));
        let finishing_options: Vec<BTreeSet<TaskId>> = if has_boundary {
            vec![schedule.finishing.clone()]
        } else {
            fictitious
                .iter()
                .map(|&f| {
                    let mut set = schedule.finishing.clone();
                    set.insert(f);
                    set
                })
                .collect()
        };
        let starting_options: Vec<Option<TaskId>> = match schedule.starting {
            Some(s) => vec![Some(s)],
            None => fictitious.iter().map(|&f| Some(f)).collect(),
        };
        for finishing in &finishing_options {
            for &starting in &starting_options {
                out.insert(Schedule {
                    finishing: finishing.clone(),
                    starting,
                });
            }
        }
    }
    out.into_iter().collect()
}

impl AugmentedInstance {
    pub fn is_fictitious(&self, task: TaskId) -> bool {
        self.fictitious.contains(&task)
    }

    /// Drops the rows of fictitious tasks.
    pub fn restrict_plan(&self, plan: &PeriodicAssignment) -> PeriodicAssignment {
        plan.restricted(self.base.task_count())
    }

    /// Extends a coloring of the original slots with the fictitious ones:
    /// each fictitious base slot goes to a worker holding no boundary task at
    /// the start of the week, each shifted slot to a worker holding none at
    /// the start of the next week, both in ascending worker order.
    pub fn extend_first_week(&self, coloring: &FirstWeekColoring) -> Result<FirstWeekColoring> {
        let q = self.base.workers;
        let holders = |kind: SlotKind| -> BTreeSet<WorkerId> {
            self.base
                .boundary_tasks()
                .into_iter()
                .filter_map(|t| coloring.color(t, kind))
                .collect()
        };
        let idle = |kind: SlotKind| -> Vec<WorkerId> {
            let busy = holders(kind);
            (1..=q).filter(|w| !busy.contains(w)).collect()
        };
        let idle_base = idle(SlotKind::Base);
        let idle_shifted = idle(SlotKind::Shifted);
        assert_eq!(idle_base.len(), self.fictitious.len(), "idle workers at the boundary");
        assert_eq!(
            idle_shifted.len(),
            self.fictitious.len(),
            "idle workers at the next boundary"
        );

        let slots = build_interval_graph(&self.augmented);
        let colors = slots
            .iter()
            .map(|slot| match self.fictitious.iter().position(|&f| f == slot.task) {
                Some(k) => Ok(match slot.kind {
                    SlotKind::Base => idle_base[k],
                    SlotKind::Shifted => idle_shifted[k],
                }),
                None => coloring
                    .color(slot.task, slot.kind)
                    .ok_or_else(|| RosterError::Precondition(format!("coloring misses slot of t{}", slot.task))),
            })
            .collect::<Result<Vec<_>>>()?;
        let extended = FirstWeekColoring::new(&self.augmented, slots, colors)?;
        assert!(extended.is_proper(), "fictitious slots must not collide");
        Ok(extended)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coloring::color_first_week;

    fn e1() -> Instance {
        Instance::from_intervals(10, 2, &[(-3, 4), (2, 9)])
    }

    #[test]
    fn e1_gets_one_fictitious_task() {
        let aug = augment(&e1()).unwrap();
        assert_eq!(aug.epsilon, 2);
        assert_eq!(aug.fictitious, vec![3]);
        assert_eq!(aug.augmented.task(3), Some(&Task::new(3, 0, 2)));
        assert_eq!(aug.augmented.boundary_tasks().len(), 2);
    }

    #[test]
    fn e2_fictitious_length() {
        let e2 = Instance::from_intervals(10, 2, &[(-3, 4), (5, 9)]);
        let aug = augment(&e2).unwrap();
        assert_eq!(aug.augmented.task(3), Some(&Task::new(3, 0, 5)));
    }

    #[test]
    fn full_boundary_is_unchanged() {
        let inst = Instance::from_intervals(10, 2, &[(-3, 4), (0, 6)]);
        let aug = augment(&inst).unwrap();
        assert!(aug.fictitious.is_empty());
        assert_eq!(aug.augmented, inst);
        let plan = PeriodicAssignment::from_fn(2, 1, |i, _| i);
        assert_eq!(aug.restrict_plan(&plan), plan);
    }

    #[test]
    fn too_many_boundary_tasks() {
        let inst = Instance::from_intervals(10, 1, &[(-3, 4), (0, 6)]);
        assert!(matches!(augment(&inst), Err(RosterError::Infeasible(_))));
    }

    #[test]
    fn empty_instance_gets_whole_week_tasks() {
        let aug = augment(&Instance::basic(10, 2, vec![])).unwrap();
        assert_eq!(aug.epsilon, 10);
        assert_eq!(aug.fictitious, vec![1, 2]);
    }

    #[test]
    fn e1_fictitious_goes_to_idle_worker() {
        let aug = augment(&e1()).unwrap();
        let base = color_first_week(&e1()).unwrap();
        assert_eq!(base.color(1, SlotKind::Base), Some(1));
        assert_eq!(base.color(2, SlotKind::Base), Some(2));
        assert_eq!(base.color(1, SlotKind::Shifted), Some(1));
        let ext = aug.extend_first_week(&base).unwrap();
        assert_eq!(ext.color(3, SlotKind::Base), Some(2));
        assert_eq!(ext.color(3, SlotKind::Shifted), Some(2));
    }

    #[test]
    fn three_workers_one_task() {
        let inst = Instance::from_intervals(10, 3, &[(-2, 5)]);
        let aug = augment(&inst).unwrap();
        assert_eq!(aug.fictitious, vec![2, 3]);
        let ext = aug.extend_first_week(&color_first_week(&inst).unwrap()).unwrap();
        assert_eq!(ext.color(1, SlotKind::Base), Some(1));
        assert_eq!(ext.color(2, SlotKind::Base), Some(2));
        assert_eq!(ext.color(3, SlotKind::Base), Some(3));
        assert_eq!(ext.color(3, SlotKind::Shifted), Some(3));
    }

    #[test]
    fn schedule_lifting_follows_the_four_rules() {
        // q = 3, one boundary task, two fictitious tasks 3 and 4.
        let tasks = e1().tasks;
        let schedules = vec![
            Schedule::new([1], Some(1)),
            Schedule::new([2], None),
            Schedule::new([], None),
        ];
        let inst = Instance::extended(10, 3, tasks, schedules);
        let aug = augment(&inst).unwrap();
        assert_eq!(aug.fictitious, vec![3, 4]);
        let lifted = aug.augmented.schedules.clone().unwrap();
        assert!(lifted.contains(&Schedule::new([1], Some(1))));
        for f in [3, 4] {
            for g in [3, 4] {
                assert!(lifted.contains(&Schedule::new([2, f], Some(g))));
                assert!(lifted.contains(&Schedule::new([f], Some(g))));
            }
        }
        assert_eq!(lifted.len(), 1 + 4 + 4);
        assert!(aug.augmented.validate().is_valid());
    }
}
