//! Instances, tasks and weekly schedules on an integer time grid.
//!
//! A task is a half-open interval `[start, end)` of grid units with
//! `end` in `(0, L]` and `start` in `(-L, L)`, where `L` is the number of
//! units in one week. Its `r`-th occurrence covers `[start + rL, end + rL)`.
//! Tasks with `start <= 0` straddle the week boundary and are called
//! boundary tasks; they are the only ones whose occurrences can be carried
//! from one week into the next.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RosterError};

pub type TaskId = u32;
pub type WorkerId = u32;

/// Half-open interval overlap test.
#[inline]
pub fn overlaps(a: (i64, i64), b: (i64, i64)) -> bool {
    a.0 < b.1 && b.0 < a.1
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TimeGrid {
    pub units_per_week: i64,
}

impl TimeGrid {
    pub fn new(units_per_week: i64) -> Self {
        Self { units_per_week }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Task {
    pub id: TaskId,
    pub start: i64,
    pub end: i64,
}

impl Task {
    pub fn new(id: TaskId, start: i64, end: i64) -> Self {
        Self { id, start, end }
    }

    pub fn duration(&self) -> i64 {
        self.end - self.start
    }

    pub fn is_boundary(&self) -> bool {
        self.start <= 0
    }

    /// The interval of the occurrence shifted by `weeks` whole weeks.
    pub fn shifted(&self, weeks: i64, units_per_week: i64) -> (i64, i64) {
        (self.start + weeks * units_per_week, self.end + weeks * units_per_week)
    }
}

/// One worker's content for one week: the tasks finishing in the week and
/// at most one boundary task started in the week and finished in the next.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Schedule {
    pub finishing: BTreeSet<TaskId>,
    pub starting: Option<TaskId>,
}

impl Schedule {
    pub fn new(finishing: impl IntoIterator<Item = TaskId>, starting: Option<TaskId>) -> Self {
        Self {
            finishing: finishing.into_iter().collect(),
            starting,
        }
    }

    pub fn idle() -> Self {
        Self::default()
    }
}

impl fmt::Display for Schedule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let finishing: Vec<String> = self.finishing.iter().map(|t| format!("t{t}")).collect();
        match self.starting {
            Some(s) => write!(f, "({{{}}}, {{t{s}}})", finishing.join(",")),
            None => write!(f, "({{{}}}, {{}})", finishing.join(",")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Instance {
    #[serde(flatten)]
    pub grid: TimeGrid,
    pub workers: u32,
    pub tasks: Vec<Task>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedules: Option<Vec<Schedule>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", content = "id", rename_all = "snake_case")]
pub enum Entity {
    Instance,
    Task(TaskId),
    Schedule(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Violation {
    pub entity: Entity,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    fn push(&mut self, entity: Entity, message: impl Into<String>) {
        self.violations.push(Violation {
            entity,
            message: message.into(),
        });
    }

    pub fn has_message(&self, needle: &str) -> bool {
        self.violations.iter().any(|v| v.message.contains(needle))
    }
}

impl Instance {
    pub fn basic(units_per_week: i64, workers: u32, tasks: Vec<Task>) -> Self {
        Self {
            grid: TimeGrid::new(units_per_week),
            workers,
            tasks,
            schedules: None,
        }
    }

    pub fn extended(units_per_week: i64, workers: u32, tasks: Vec<Task>, schedules: Vec<Schedule>) -> Self {
        Self {
            schedules: Some(schedules),
            ..Self::basic(units_per_week, workers, tasks)
        }
    }

    /// Builds a basic instance from `(start, end)` pairs numbered from 1.
    pub fn from_intervals(units_per_week: i64, workers: u32, intervals: &[(i64, i64)]) -> Self {
        let tasks = intervals
            .iter()
            .zip(1..)
            .map(|(&(s, e), id)| Task::new(id, s, e))
            .collect();
        Self::basic(units_per_week, workers, tasks)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }

    pub fn units_per_week(&self) -> i64 {
        self.grid.units_per_week
    }

    pub fn task_count(&self) -> usize {
        self.tasks.len()
    }

    pub fn is_extended(&self) -> bool {
        self.schedules.is_some()
    }

    /// The same tasks and workers with the schedule constraints dropped.
    pub fn without_schedules(&self) -> Self {
        Self {
            schedules: None,
            ..self.clone()
        }
    }

    pub fn with_workers(&self, workers: u32) -> Self {
        Self {
            workers,
            ..self.clone()
        }
    }

    pub fn task(&self, id: TaskId) -> Option<&Task> {
        let idx = (id as usize).checked_sub(1)?;
        match self.tasks.get(idx) {
            Some(t) if t.id == id => Some(t),
            _ => self.tasks.iter().find(|t| t.id == id),
        }
    }

    pub fn task_ids(&self) -> impl Iterator<Item = TaskId> {
        1..=self.tasks.len() as TaskId
    }

    fn require_task(&self, id: TaskId) -> Result<&Task> {
        self.task(id).ok_or(RosterError::UnknownTask(id))
    }

    /// Boundary tasks `{i : start_i <= 0}` in ascending id order.
    pub fn boundary_tasks(&self) -> Vec<TaskId> {
        let mut ids: Vec<TaskId> = self.tasks.iter().filter(|t| t.is_boundary()).map(|t| t.id).collect();
        ids.sort_unstable();
        ids
    }

    pub fn is_boundary(&self, id: TaskId) -> bool {
        self.task(id).is_some_and(Task::is_boundary)
    }

    /// Largest number of task occurrences covering a single time point.
    pub fn max_overlap_depth(&self) -> usize {
        self.max_overlap_witness().map_or(0, |(_, depth)| depth)
    }

    /// A point of maximum coverage together with its depth.
    ///
    /// Sweeps the occurrences of weeks 0, 1 and 2; every point of week 1
    /// sees all of its covering occurrences among those.
    pub fn max_overlap_witness(&self) -> Option<(i64, usize)> {
        let l = self.units_per_week();
        // (coordinate, +1 | -1); ends sort before starts at equal coordinates.
        let mut events: Vec<(i64, i32)> = Vec::with_capacity(self.tasks.len() * 6);
        for task in &self.tasks {
            for week in 0..3 {
                let (s, e) = task.shifted(week, l);
                events.push((s, 1));
                events.push((e, -1));
            }
        }
        events.sort_unstable();
        let mut depth = 0i64;
        let mut best: Option<(i64, usize)> = None;
        for (x, delta) in events {
            depth += i64::from(delta);
            if delta > 0 && best.is_none_or(|(_, d)| depth as usize > d) {
                best = Some((x, depth as usize));
            }
        }
        best
    }

    /// Whether a schedule respects the in-week and carried-task disjointness
    /// constraints. Fails on unknown task ids.
    pub fn schedule_is_non_overlapping(&self, schedule: &Schedule) -> Result<bool> {
        let l = self.units_per_week();
        let finishing = schedule
            .finishing
            .iter()
            .map(|&id| self.require_task(id).map(|t| (t.start, t.end)))
            .collect::<Result<Vec<_>>>()?;
        for (k, &a) in finishing.iter().enumerate() {
            if finishing[k + 1..].iter().any(|&b| overlaps(a, b)) {
                return Ok(false);
            }
        }
        if let Some(id) = schedule.starting {
            let carried = self.require_task(id)?.shifted(1, l);
            if finishing.iter().any(|&a| overlaps(a, carried)) {
                return Ok(false);
            }
        }
        Ok(true)
    }

    /// Every non-overlapping schedule over this instance's tasks. With these
    /// as the schedule set the extended problem coincides with the basic one.
    pub fn all_non_overlapping_schedules(&self) -> Vec<Schedule> {
        let n = self.tasks.len();
        assert!(n < 24, "schedule enumeration is exponential in the task count");
        let boundary = self.boundary_tasks();
        let mut out = Vec::new();
        for mask in 0u32..(1 << n) {
            let finishing: Vec<TaskId> = (0..n as u32).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect();
            let starts = std::iter::once(None).chain(boundary.iter().copied().map(Some));
            for starting in starts {
                let schedule = Schedule::new(finishing.iter().copied(), starting);
                if self.schedule_is_non_overlapping(&schedule).unwrap_or(false) {
                    out.push(schedule);
                }
            }
        }
        out.sort();
        out
    }

    pub fn validate(&self) -> ValidationReport {
        let mut report = ValidationReport::default();
        let l = self.units_per_week();
        if l < 1 {
            report.push(Entity::Instance, "units_per_week must be at least 1");
        }
        if self.workers < 1 {
            report.push(Entity::Instance, "workers must be at least 1");
        }

        let mut seen = HashSet::new();
        for task in &self.tasks {
            let entity = Entity::Task(task.id);
            if !seen.insert(task.id) {
                report.push(entity.clone(), "duplicate id");
            }
            if task.id < 1 || task.id as usize > self.tasks.len() {
                report.push(entity.clone(), "id must lie in 1..n");
            }
            if !(task.end > 0 && task.end <= l) {
                report.push(entity.clone(), "end must lie in (0,L]");
            }
            if !(task.start > -l && task.start < l) {
                report.push(entity.clone(), "start must lie in (-L,L)");
            }
            if task.duration() < 1 {
                report.push(entity.clone(), "duration must be at least one grid unit");
            } else if task.duration() > l {
                report.push(entity, "duration must not exceed one week");
            }
        }

        if let Some(schedules) = &self.schedules {
            for (k, schedule) in schedules.iter().enumerate() {
                let entity = Entity::Schedule(k);
                let ids = schedule.finishing.iter().chain(schedule.starting.iter());
                if let Some(&bad) = ids.clone().find(|&&id| self.task(id).is_none()) {
                    report.push(entity, format!("unknown task id {bad}"));
                    continue;
                }
                if let Some(start) = schedule.starting {
                    if !self.is_boundary(start) {
                        report.push(entity.clone(), format!("starting task t{start} is not a boundary task"));
                    }
                }
                if !self.schedule_is_non_overlapping(schedule).unwrap_or(false) {
                    report.push(entity, "schedule is overlapping");
                }
            }
        }
        report
    }

    /// Validates and converts the report into an error.
    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        match report.violations.first() {
            None => Ok(()),
            Some(v) => Err(RosterError::InvalidInstance(format!(
                "{:?}: {} ({} violation(s))",
                v.entity,
                v.message,
                report.violations.len()
            ))),
        }
    }
}
