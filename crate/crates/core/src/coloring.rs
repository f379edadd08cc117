//! First-week interval graph and its greedy coloring.
//!
//! The first week is read broadly: one slot `[s, e)` per task plus a
//! shifted slot `[s + L, e + L)` for every boundary task (its second
//! occurrence, which starts before the week ends). Workers are colors.

use serde::Serialize;

use crate::assignment::WeekDecomposition;
use crate::error::{Result, RosterError};
use crate::model::{overlaps, Instance, Schedule, TaskId, WorkerId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SlotKind {
    Base,
    Shifted,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct Slot {
    pub task: TaskId,
    pub kind: SlotKind,
    pub start: i64,
    pub end: i64,
}

impl Slot {
    pub fn interval(&self) -> (i64, i64) {
        (self.start, self.end)
    }

    pub fn contains(&self, x: i64) -> bool {
        self.start <= x && x < self.end
    }

    /// `x` lies strictly inside the slot.
    pub fn straddles(&self, x: i64) -> bool {
        self.start < x && x < self.end
    }
}

/// Base slots in task id order, then shifted slots of boundary tasks.
pub fn build_interval_graph(instance: &Instance) -> Vec<Slot> {
    let l = instance.units_per_week();
    let mut slots: Vec<Slot> = instance
        .task_ids()
        .map(|id| {
            let t = instance.task(id).expect("valid instance");
            Slot {
                task: id,
                kind: SlotKind::Base,
                start: t.start,
                end: t.end,
            }
        })
        .collect();
    for id in instance.boundary_tasks() {
        let (start, end) = instance.task(id).expect("valid instance").shifted(1, l);
        slots.push(Slot {
            task: id,
            kind: SlotKind::Shifted,
            start,
            end,
        });
    }
    slots
}

/// A worker for every first-week slot.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FirstWeekColoring {
    workers: u32,
    slots: Vec<Slot>,
    colors: Vec<WorkerId>,
}

#[derive(Serialize)]
struct ColoredSlot {
    task: TaskId,
    kind: SlotKind,
    start: i64,
    end: i64,
    worker: WorkerId,
}

impl FirstWeekColoring {
    pub fn new(instance: &Instance, slots: Vec<Slot>, colors: Vec<WorkerId>) -> Result<Self> {
        if slots.len() != colors.len() {
            return Err(RosterError::Precondition("one color per slot".into()));
        }
        if let Some(&w) = colors.iter().find(|&&w| w < 1 || w > instance.workers) {
            return Err(RosterError::Precondition(format!(
                "color {w} outside 1..{}",
                instance.workers
            )));
        }
        Ok(Self {
            workers: instance.workers,
            slots,
            colors,
        })
    }

    /// Colors the slots of `instance` with `color(task, kind)`.
    pub fn from_fn(instance: &Instance, mut color: impl FnMut(TaskId, SlotKind) -> WorkerId) -> Result<Self> {
        let slots = build_interval_graph(instance);
        let colors = slots.iter().map(|s| color(s.task, s.kind)).collect();
        Self::new(instance, slots, colors)
    }

    pub fn workers(&self) -> u32 {
        self.workers
    }

    pub fn slots(&self) -> &[Slot] {
        &self.slots
    }

    pub fn colors(&self) -> &[WorkerId] {
        &self.colors
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Slot, WorkerId)> {
        self.slots.iter().zip(self.colors.iter().copied())
    }

    pub fn color(&self, task: TaskId, kind: SlotKind) -> Option<WorkerId> {
        self.iter()
            .find(|(s, _)| s.task == task && s.kind == kind)
            .map(|(_, w)| w)
    }

    pub fn slots_of(&self, worker: WorkerId) -> impl Iterator<Item = &Slot> {
        self.iter().filter(move |&(_, w)| w == worker).map(|(s, _)| s)
    }

    pub(crate) fn set_colors(&mut self, colors: Vec<WorkerId>) {
        assert_eq!(colors.len(), self.slots.len());
        self.colors = colors;
    }

    /// No two overlapping slots share a worker.
    pub fn is_proper(&self) -> bool {
        self.first_clash().is_none()
    }

    pub fn first_clash(&self) -> Option<(Slot, Slot)> {
        for (a, (sa, wa)) in self.iter().enumerate() {
            for (sb, wb) in self.iter().skip(a + 1) {
                if wa == wb && overlaps(sa.interval(), sb.interval()) {
                    return Some((*sa, *sb));
                }
            }
        }
        None
    }

    /// Worker `k + 1` gets part `k`: its base slots finish, its shifted slot
    /// (if any) is the task it starts.
    pub fn to_decomposition(&self) -> WeekDecomposition {
        let mut parts = vec![Schedule::idle(); self.workers as usize];
        for (slot, w) in self.iter() {
            let part = &mut parts[w as usize - 1];
            match slot.kind {
                SlotKind::Base => {
                    part.finishing.insert(slot.task);
                }
                SlotKind::Shifted => {
                    assert!(part.starting.is_none(), "two shifted slots on worker {w}");
                    part.starting = Some(slot.task);
                }
            }
        }
        WeekDecomposition::new(parts)
    }

    pub fn to_json(&self) -> serde_json::Value {
        let slots: Vec<ColoredSlot> = self
            .iter()
            .map(|(s, worker)| ColoredSlot {
                task: s.task,
                kind: s.kind,
                start: s.start,
                end: s.end,
                worker,
            })
            .collect();
        serde_json::to_value(slots).expect("coloring serializes")
    }
}

/// A point covered by more first-week slots than there are workers.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Overload {
    pub point: i64,
    pub slots: Vec<(TaskId, SlotKind)>,
}

/// Greedy sweep: slots by ascending (start, end, task, kind), each to the
/// lowest-numbered worker free at its start. Optimal on interval graphs, so
/// it fails exactly when some point is covered by more than `q` slots.
pub fn color_first_week(instance: &Instance) -> std::result::Result<FirstWeekColoring, Overload> {
    let slots = build_interval_graph(instance);
    let q = instance.workers as usize;
    let mut order: Vec<usize> = (0..slots.len()).collect();
    order.sort_by_key(|&k| (slots[k].start, slots[k].end, slots[k].task, slots[k].kind));

    let mut busy_until: Vec<Option<i64>> = vec![None; q];
    let mut colors = vec![0; slots.len()];
    for &k in &order {
        let slot = slots[k];
        match busy_until.iter().position(|b| b.is_none_or(|end| end <= slot.start)) {
            Some(w) => {
                busy_until[w] = Some(slot.end);
                colors[k] = w as WorkerId + 1;
            }
            None => {
                let covering = slots
                    .iter()
                    .filter(|s| s.contains(slot.start))
                    .map(|s| (s.task, s.kind))
                    .collect();
                return Err(Overload {
                    point: slot.start,
                    slots: covering,
                });
            }
        }
    }
    Ok(FirstWeekColoring::new(instance, slots, colors).expect("greedy colors lie in 1..q"))
}

/// A feasible assignment exists iff no point is covered more than `q` times.
pub fn decide_feasible(instance: &Instance) -> bool {
    instance.max_overlap_depth() <= instance.workers as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::augment;

    fn e1() -> Instance {
        Instance::from_intervals(10, 2, &[(-3, 4), (2, 9)])
    }

    fn e2() -> Instance {
        Instance::from_intervals(10, 2, &[(-3, 4), (5, 9)])
    }

    fn intervals(slots: &[Slot]) -> Vec<(i64, i64)> {
        slots.iter().map(Slot::interval).collect()
    }

    #[test]
    fn e1_slots() {
        assert_eq!(intervals(&build_interval_graph(&e1())), vec![(-3, 4), (2, 9), (7, 14)]);
    }

    #[test]
    fn no_boundary_tasks_means_no_shifted_slots() {
        let inst = Instance::from_intervals(10, 2, &[(1, 4), (2, 9)]);
        assert_eq!(build_interval_graph(&inst).len(), 2);
    }

    #[test]
    fn e2_augmented_slots() {
        let aug = augment(&e2()).unwrap().augmented;
        let mut got = intervals(&build_interval_graph(&aug));
        got.sort();
        assert_eq!(got, vec![(-3, 4), (0, 5), (5, 9), (7, 14), (10, 15)]);
    }

    #[test]
    fn e1_greedy_trace() {
        let c = color_first_week(&e1()).unwrap();
        assert_eq!(c.colors(), &[1, 2, 1]);
    }

    #[test]
    fn no_workers_is_infeasible() {
        let inst = Instance::from_intervals(10, 0, &[(1, 3)]);
        let overload = color_first_week(&inst).unwrap_err();
        assert_eq!(overload.point, 1);
        assert_eq!(overload.slots.len(), 1);
    }

    #[test]
    fn e2_augmented_uses_two_workers() {
        let aug = augment(&e2()).unwrap().augmented;
        let c = color_first_week(&aug).unwrap();
        assert!(c.is_proper());
        assert_eq!(c.colors().iter().max(), Some(&2));
    }

    #[test]
    fn feasibility_examples() {
        assert!(decide_feasible(&e1()));
        assert!(!decide_feasible(&e1().with_workers(1)));
        assert!(decide_feasible(&Instance::basic(10, 1, vec![])));
        let overload = color_first_week(&e1().with_workers(1)).unwrap_err();
        assert_eq!(overload.slots.len(), 2);
    }

    #[test]
    fn coloring_decomposes_into_schedules() {
        let c = color_first_week(&e1()).unwrap();
        let d = c.to_decomposition();
        assert_eq!(d.parts, vec![Schedule::new([1], Some(1)), Schedule::new([2], None)]);
        d.check(&e1()).unwrap();
    }
}
