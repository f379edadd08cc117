//! Periodic assignment tables, weekly decompositions, and the feasibility and
//! balance checks on them.

use std::collections::HashSet;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Result, RosterError};
use crate::model::{overlaps, Instance, Schedule, TaskId, WorkerId};

/// Worker table over one period; week `r + period` repeats week `r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PeriodicAssignment {
    period: u32,
    task_count: usize,
    // task-major: table[(task - 1) * period + (week - 1)]
    table: Vec<WorkerId>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PlanRow {
    pub task: TaskId,
    pub week: u32,
    pub worker: WorkerId,
}

#[derive(Serialize, Deserialize)]
struct PlanFile {
    period: u32,
    rows: Vec<PlanRow>,
}

impl PeriodicAssignment {
    pub fn from_fn(task_count: usize, period: u32, mut f: impl FnMut(TaskId, u32) -> WorkerId) -> Self {
        assert!(period >= 1, "period must be positive");
        let mut table = Vec::with_capacity(task_count * period as usize);
        for task in 1..=task_count as TaskId {
            for week in 1..=period {
                table.push(f(task, week));
            }
        }
        Self {
            period,
            task_count,
            table,
        }
    }

    pub fn from_rows(period: u32, rows: &[PlanRow]) -> Result<Self> {
        if period < 1 {
            return Err(RosterError::InvalidPlan("period must be at least 1".into()));
        }
        let task_count = rows.iter().map(|r| r.task as usize).max().unwrap_or(0);
        let mut table = vec![0; task_count * period as usize];
        for row in rows {
            if row.task < 1 || row.week < 1 || row.week > period {
                return Err(RosterError::InvalidPlan(format!(
                    "row (task {}, week {}) outside 1..n x 1..{period}",
                    row.task, row.week
                )));
            }
            if row.worker < 1 {
                return Err(RosterError::InvalidPlan(format!(
                    "worker ids start at 1 (task {})",
                    row.task
                )));
            }
            let slot = &mut table[(row.task as usize - 1) * period as usize + (row.week as usize - 1)];
            if *slot != 0 {
                return Err(RosterError::InvalidPlan(format!(
                    "duplicate row for task {} week {}",
                    row.task, row.week
                )));
            }
            *slot = row.worker;
        }
        if let Some(pos) = table.iter().position(|&w| w == 0) {
            return Err(RosterError::InvalidPlan(format!(
                "missing row for task {} week {}",
                pos / period as usize + 1,
                pos % period as usize + 1
            )));
        }
        Ok(Self {
            period,
            task_count,
            table,
        })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: PlanFile = serde_json::from_str(text)?;
        Self::from_rows(file.period, &file.rows)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        let file = PlanFile {
            period: self.period,
            rows: self.rows(),
        };
        serde_json::to_string_pretty(&file).expect("plan serializes")
    }

    pub fn period(&self) -> u32 {
        self.period
    }

    pub fn task_count(&self) -> usize {
        self.task_count
    }

    /// Worker of occurrence `week` (1-based, any positive value) of `task`.
    pub fn worker(&self, task: TaskId, week: u32) -> WorkerId {
        debug_assert!(week >= 1);
        let r = (week - 1) % self.period;
        self.table[(task as usize - 1) * self.period as usize + r as usize]
    }

    pub fn rows(&self) -> Vec<PlanRow> {
        let mut rows = Vec::with_capacity(self.table.len());
        for week in 1..=self.period {
            for task in 1..=self.task_count as TaskId {
                rows.push(PlanRow {
                    task,
                    week,
                    worker: self.worker(task, week),
                });
            }
        }
        rows
    }

    pub fn max_worker(&self) -> WorkerId {
        self.table.iter().copied().max().unwrap_or(0)
    }

    /// Keeps tasks `1..=task_count` and drops the rest.
    pub fn restricted(&self, task_count: usize) -> Self {
        assert!(task_count <= self.task_count);
        Self {
            period: self.period,
            task_count,
            table: self.table[..task_count * self.period as usize].to_vec(),
        }
    }

    /// Renames workers by order of first appearance (week, then task id);
    /// workers that never appear keep the remaining ids in ascending order.
    pub fn canonicalized(&self, workers: u32) -> Self {
        let mut rename = vec![0; workers.max(self.max_worker()) as usize + 1];
        let mut next = 1;
        for week in 1..=self.period {
            for task in 1..=self.task_count as TaskId {
                let w = self.worker(task, week) as usize;
                if rename[w] == 0 {
                    rename[w] = next;
                    next += 1;
                }
            }
        }
        Self {
            period: self.period,
            task_count: self.task_count,
            table: self.table.iter().map(|&w| rename[w as usize]).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Occurrence {
    pub task: TaskId,
    pub week: u32,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Conflict {
    /// Two overlapping occurrences given to one worker.
    Overlap {
        worker: WorkerId,
        first: Occurrence,
        second: Occurrence,
    },
    /// An induced schedule outside the instance's schedule set.
    ScheduleNotAllowed {
        worker: WorkerId,
        week: u32,
        schedule: Schedule,
    },
}

fn check_plan_shape(instance: &Instance, plan: &PeriodicAssignment) -> Result<()> {
    if plan.task_count != instance.task_count() {
        return Err(RosterError::InvalidPlan(format!(
            "plan covers {} tasks, instance has {}",
            plan.task_count,
            instance.task_count()
        )));
    }
    if plan.max_worker() > instance.workers {
        return Err(RosterError::InvalidPlan(format!(
            "worker {} outside 1..{}",
            plan.max_worker(),
            instance.workers
        )));
    }
    Ok(())
}

/// Scans weeks `1..=weeks` for overlap conflicts against the same week and
/// the following one, then (extended instances) schedule membership. With
/// `periodic` the week after the last wraps around; otherwise the last week
/// is only compared backwards.
fn scan_conflicts(
    instance: &Instance,
    weeks: u32,
    periodic: bool,
    worker_of: impl Fn(TaskId, u32) -> WorkerId,
) -> Option<Conflict> {
    let l = instance.units_per_week();
    let ids: Vec<TaskId> = instance.task_ids().collect();
    let last_forward = if periodic { weeks } else { weeks.saturating_sub(1) };
    for r in 1..=weeks {
        for &i in &ids {
            let ti = instance.task(i).expect("valid instance");
            let a = ti.shifted(i64::from(r), l);
            let wa = worker_of(i, r);
            for &j in ids.iter().filter(|&&j| j > i) {
                let b = instance.task(j).expect("valid instance").shifted(i64::from(r), l);
                if worker_of(j, r) == wa && overlaps(a, b) {
                    return Some(Conflict::Overlap {
                        worker: wa,
                        first: Occurrence { task: i, week: r },
                        second: Occurrence { task: j, week: r },
                    });
                }
            }
            if r > last_forward {
                continue;
            }
            for &j in ids.iter().filter(|&&j| j != i) {
                let b = instance.task(j).expect("valid instance").shifted(i64::from(r) + 1, l);
                if worker_of(j, r + 1) == wa && overlaps(a, b) {
                    return Some(Conflict::Overlap {
                        worker: wa,
                        first: Occurrence { task: i, week: r },
                        second: Occurrence { task: j, week: r + 1 },
                    });
                }
            }
        }
    }

    if let Some(allowed) = &instance.schedules {
        let allowed: HashSet<&Schedule> = allowed.iter().collect();
        let boundary = instance.boundary_tasks();
        for r in 1..=last_forward {
            for worker in 1..=instance.workers {
                let schedule = Schedule {
                    finishing: ids.iter().copied().filter(|&i| worker_of(i, r) == worker).collect(),
                    // At most one after the overlap scan: boundary tasks pairwise overlap.
                    starting: boundary.iter().copied().find(|&i| worker_of(i, r + 1) == worker),
                };
                if !allowed.contains(&schedule) {
                    return Some(Conflict::ScheduleNotAllowed {
                        worker,
                        week: r,
                        schedule,
                    });
                }
            }
        }
    }
    None
}

/// Checks a periodic plan; returns the first conflict in (week, task) order.
pub fn is_feasible(instance: &Instance, plan: &PeriodicAssignment) -> Result<Option<Conflict>> {
    check_plan_shape(instance, plan)?;
    Ok(scan_conflicts(instance, plan.period, true, |i, r| plan.worker(i, r)))
}

/// Checks a finite table `table[week - 1][task - 1]` without wrapping.
pub fn finite_conflict(instance: &Instance, table: &[Vec<WorkerId>]) -> Option<Conflict> {
    scan_conflicts(instance, table.len() as u32, false, |i, r| {
        table[r as usize - 1][i as usize - 1]
    })
}

/// The schedule worker `worker` follows in week `week`.
pub fn induced_schedule(
    instance: &Instance,
    plan: &PeriodicAssignment,
    week: u32,
    worker: WorkerId,
) -> Result<Schedule> {
    check_plan_shape(instance, plan)?;
    if week < 1 {
        return Err(RosterError::Precondition("weeks are numbered from 1".into()));
    }
    let finishing = instance.task_ids().filter(|&i| plan.worker(i, week) == worker);
    let carried: Vec<TaskId> = instance
        .boundary_tasks()
        .into_iter()
        .filter(|&i| plan.worker(i, week + 1) == worker)
        .collect();
    if carried.len() > 1 {
        return Err(RosterError::Infeasible(format!(
            "worker {worker} starts {} boundary tasks in week {week}",
            carried.len()
        )));
    }
    Ok(Schedule::new(finishing, carried.first().copied()))
}

/// Per task and worker, how many weeks of one period the worker holds the task.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BalanceProfile {
    pub period: u32,
    /// counts[task - 1][worker - 1]
    pub counts: Vec<Vec<u32>>,
}

impl BalanceProfile {
    pub fn count(&self, task: TaskId, worker: WorkerId) -> u32 {
        self.counts[task as usize - 1][worker as usize - 1]
    }
}

pub fn balance_profile(instance: &Instance, plan: &PeriodicAssignment) -> BalanceProfile {
    let q = instance.workers.max(plan.max_worker()) as usize;
    let mut counts = vec![vec![0u32; q]; plan.task_count];
    for (task, row) in counts.iter_mut().enumerate() {
        for week in 1..=plan.period {
            row[plan.worker(task as TaskId + 1, week) as usize - 1] += 1;
        }
    }
    BalanceProfile {
        period: plan.period,
        counts,
    }
}

/// Every worker holds every task in exactly `period / q` weeks of the period.
pub fn is_balanced(instance: &Instance, plan: &PeriodicAssignment) -> bool {
    let q = instance.workers;
    if q == 0 || !plan.period.is_multiple_of(q) || plan.max_worker() > q {
        return false;
    }
    let share = plan.period / q;
    balance_profile(instance, plan)
        .counts
        .iter()
        .all(|row| row.iter().all(|&c| c == share))
}

/// The `q` schedules of one week, one per worker (order carries no meaning).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct WeekDecomposition {
    pub parts: Vec<Schedule>,
}

impl WeekDecomposition {
    pub fn new(parts: Vec<Schedule>) -> Self {
        Self { parts }
    }

    /// Parts sorted, so equal multisets compare equal.
    pub fn canonical(&self) -> Self {
        let mut parts = self.parts.clone();
        parts.sort();
        Self { parts }
    }

    /// Index of the part whose finishing set holds `task`.
    pub fn part_finishing(&self, task: TaskId) -> Option<usize> {
        self.parts.iter().position(|p| p.finishing.contains(&task))
    }

    pub fn part_starting(&self, task: TaskId) -> Option<usize> {
        self.parts.iter().position(|p| p.starting == Some(task))
    }

    /// Partition of the tasks, exact cover of the boundary tasks by the
    /// starting elements, non-overlapping parts, and membership in the
    /// schedule set for extended instances.
    pub fn check(&self, instance: &Instance) -> Result<()> {
        let bad = |msg: String| Err(RosterError::Precondition(format!("week decomposition: {msg}")));
        if self.parts.len() != instance.workers as usize {
            return bad(format!("{} parts for {} workers", self.parts.len(), instance.workers));
        }
        for task in instance.task_ids() {
            let holders = self.parts.iter().filter(|p| p.finishing.contains(&task)).count();
            if holders != 1 {
                return bad(format!("task t{task} finishes in {holders} parts"));
            }
        }
        if self.parts.iter().flat_map(|p| &p.finishing).count() != instance.task_count() {
            return bad("finishing sets mention unknown tasks".into());
        }
        let boundary = instance.boundary_tasks();
        for &task in &boundary {
            let holders = self.parts.iter().filter(|p| p.starting == Some(task)).count();
            if holders != 1 {
                return bad(format!("boundary task t{task} starts in {holders} parts"));
            }
        }
        if let Some(p) = self
            .parts
            .iter()
            .find(|p| p.starting.is_some_and(|s| !boundary.contains(&s)))
        {
            return bad(format!("part {p} starts a non-boundary task"));
        }
        for part in &self.parts {
            if !instance.schedule_is_non_overlapping(part)? {
                return bad(format!("part {part} overlaps"));
            }
        }
        if let Some(allowed) = &instance.schedules {
            if let Some(p) = self.parts.iter().find(|p| !allowed.contains(p)) {
                return bad(format!("part {p} is not an allowed schedule"));
            }
        }
        Ok(())
    }
}

/// The schedules induced in week `week`, part `k` belonging to worker `k + 1`.
pub fn decomposition_from_week(instance: &Instance, plan: &PeriodicAssignment, week: u32) -> Result<WeekDecomposition> {
    let parts = (1..=instance.workers)
        .map(|w| induced_schedule(instance, plan, week, w))
        .collect::<Result<Vec<_>>>()?;
    let decomposition = WeekDecomposition::new(parts);
    decomposition.check(instance)?;
    Ok(decomposition)
}

/// Worker hand-over between consecutive weeks: `next[k]` is the part of
/// `to` taken over by the worker holding part `k` of `from`.
///
/// A worker starting boundary task `i` must finish it in the next week;
/// workers starting nothing take the parts without boundary tasks, in
/// ascending order on both sides.
pub fn hand_over(instance: &Instance, from: &WeekDecomposition, to: &WeekDecomposition) -> Result<Vec<usize>> {
    let boundary = instance.boundary_tasks();
    let free_to: Vec<usize> = (0..to.parts.len())
        .filter(|&k| !to.parts[k].finishing.iter().any(|t| boundary.contains(t)))
        .collect();
    let mut free_iter = free_to.iter();
    let mut next = Vec::with_capacity(from.parts.len());
    for part in &from.parts {
        let target = match part.starting {
            Some(task) => to.part_finishing(task).ok_or_else(|| {
                RosterError::Precondition(format!("boundary task t{task} missing from the next week"))
            })?,
            None => *free_iter
                .next()
                .ok_or_else(|| RosterError::Precondition("unbalanced idle parts between weeks".into()))?,
        };
        next.push(target);
    }
    Ok(next)
}

/// Realizes a finite sequence of week decompositions as an assignment table
/// `table[week - 1][task - 1]`; worker `k + 1` holds part `k` in week 1.
pub fn chain_decompositions(instance: &Instance, weeks: &[WeekDecomposition]) -> Result<Vec<Vec<WorkerId>>> {
    let mut table = Vec::with_capacity(weeks.len());
    // owner[k] = worker holding part k of the current week
    let mut owner: Vec<WorkerId> = (1..=instance.workers).collect();
    for (idx, week) in weeks.iter().enumerate() {
        if idx > 0 {
            let moves = hand_over(instance, &weeks[idx - 1], week)?;
            let mut next_owner = vec![0; week.parts.len()];
            for (k, &target) in moves.iter().enumerate() {
                next_owner[target] = owner[k];
            }
            owner = next_owner;
        }
        let mut row = vec![0; instance.task_count()];
        for (k, part) in week.parts.iter().enumerate() {
            for &task in &part.finishing {
                row[task as usize - 1] = owner[k];
            }
        }
        table.push(row);
    }
    Ok(table)
}

/// Repeats one decomposition forever. The hand-over is then a fixed
/// permutation of the parts and the result is periodic with its order.
pub fn periodic_from_decomposition(instance: &Instance, week: &WeekDecomposition) -> Result<PeriodicAssignment> {
    week.check(instance)?;
    let moves = hand_over(instance, week, week)?;
    let mut period = 1u32;
    let mut pos: Vec<usize> = (0..moves.len()).collect();
    loop {
        pos = pos.iter().map(|&k| moves[k]).collect();
        if pos.iter().enumerate().all(|(k, &p)| k == p) {
            break;
        }
        period += 1;
    }
    let table = chain_decompositions(instance, &vec![week.clone(); period as usize])?;
    Ok(PeriodicAssignment::from_fn(instance.task_count(), period, |i, r| {
        table[r as usize - 1][i as usize - 1]
    }))
}
