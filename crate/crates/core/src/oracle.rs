//! Brute-force reference answers for small instances. Nothing here calls
//! the merge engine, the exact-cover search or the pebble system.
//!
//! Guardrails default to desk scale and can be raised through the
//! `ROSTER_ORACLE_CAP` environment variable, e.g.
//! `ROSTER_ORACLE_CAP="tasks=10,workers=5,schedules=40"`. Test use only.

use std::collections::{BTreeMap, BTreeSet, HashSet};

use serde::Serialize;

use crate::assignment::{finite_conflict, Conflict, PeriodicAssignment};
use crate::augment::augment;
use crate::coloring::{build_interval_graph, FirstWeekColoring};
use crate::digraph::{LabelPermutation, LabeledDigraph, WeekLabel};
use crate::error::{Result, RosterError};
use crate::model::{overlaps, Instance, Schedule, TaskId, WorkerId};
use crate::pebble::factorial;

pub const CAP_ENV: &str = "ROSTER_ORACLE_CAP";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct OracleLimits {
    /// Tasks after augmentation for coloring enumeration; original tasks for
    /// the periodic search.
    pub tasks: usize,
    pub workers: u32,
    pub schedules: usize,
}

impl Default for OracleLimits {
    fn default() -> Self {
        Self {
            tasks: 8,
            workers: 4,
            schedules: 10,
        }
    }
}

impl OracleLimits {
    /// The periodic-plan search is far more expensive; its defaults are
    /// `q <= 2`, `n <= 3`.
    pub fn periodic_default() -> Self {
        Self {
            tasks: 3,
            workers: 2,
            schedules: 10,
        }
    }

    /// Applies `key=value` overrides from `ROSTER_ORACLE_CAP`.
    pub fn with_env_overrides(self) -> Result<Self> {
        match std::env::var(CAP_ENV) {
            Ok(text) => self.with_overrides(&text),
            Err(_) => Ok(self),
        }
    }

    pub fn with_overrides(mut self, text: &str) -> Result<Self> {
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let bad = || RosterError::Precondition(format!("bad {CAP_ENV} entry {item:?}"));
            let (key, value) = item.split_once('=').ok_or_else(bad)?;
            let value: usize = value.trim().parse().map_err(|_| bad())?;
            match key.trim() {
                "tasks" => self.tasks = value,
                "workers" => self.workers = value as u32,
                "schedules" => self.schedules = value,
                _ => return Err(bad()),
            }
        }
        Ok(self)
    }

    fn check(&self, tasks: usize, workers: u32, schedules: usize) -> Result<()> {
        if tasks > self.tasks || workers > self.workers || schedules > self.schedules {
            return Err(RosterError::Guardrail(format!(
                "n={tasks}, q={workers}, |S|={schedules} exceeds n<={}, q<={}, |S|<={}",
                self.tasks, self.workers, self.schedules
            )));
        }
        Ok(())
    }
}

/// All proper colorings of the first-week slots with colors in `1..=q`, one
/// per class under worker renaming: colors appear in order of first use
/// along the slots sorted by start.
pub fn enumerate_first_week_colorings(instance: &Instance, limits: &OracleLimits) -> Result<Vec<FirstWeekColoring>> {
    limits.check(instance.task_count(), instance.workers, 0)?;
    let slots = build_interval_graph(instance);
    let q = instance.workers;
    // Sweep order puts the slots covering time 0 first; they form a clique,
    // so first-use canonicalization leaves a single choice for them.
    let mut order: Vec<usize> = (0..slots.len()).collect();
    order.sort_by_key(|&k| (slots[k].start, slots[k].end, slots[k].task, slots[k].kind));
    let conflicts: Vec<Vec<usize>> = (0..order.len())
        .map(|k| {
            (0..k)
                .filter(|&j| overlaps(slots[order[k]].interval(), slots[order[j]].interval()))
                .collect()
        })
        .collect();
    let mut out = Vec::new();
    let mut colors: Vec<WorkerId> = Vec::with_capacity(slots.len());
    fn rec(
        k: usize,
        used: u32,
        q: u32,
        conflicts: &[Vec<usize>],
        colors: &mut Vec<WorkerId>,
        emit: &mut dyn FnMut(&[WorkerId]),
    ) {
        if k == conflicts.len() {
            emit(colors);
            return;
        }
        for c in 1..=q.min(used + 1) {
            if conflicts[k].iter().all(|&j| colors[j] != c) {
                colors.push(c);
                rec(k + 1, used.max(c), q, conflicts, colors, emit);
                colors.pop();
            }
        }
    }
    let mut emit = |c: &[WorkerId]| {
        let mut colors = vec![0; c.len()];
        for (k, &slot) in order.iter().enumerate() {
            colors[slot] = c[k];
        }
        out.push(colors);
    };
    rec(0, 0, q, &conflicts, &mut colors, &mut emit);
    out.into_iter()
        .map(|c| FirstWeekColoring::new(instance, slots.clone(), c))
        .collect()
}

/// Distinct label permutations over every first-week coloring of the
/// augmented instance; `None` if the instance is infeasible.
pub fn exhaustive_labels(instance: &Instance, limits: &OracleLimits) -> Result<Option<Vec<LabelPermutation>>> {
    if instance.max_overlap_depth() > instance.workers as usize {
        return Ok(None);
    }
    let aug = augment(instance)?;
    let inst = &aug.augmented;
    let colorings = enumerate_first_week_colorings(inst, limits)?;
    let labels: BTreeSet<Vec<(TaskId, TaskId)>> = colorings
        .iter()
        .map(|c| c.label_permutation(inst).map(|p| p.pairs().collect()))
        .collect::<Result<_>>()?;
    if labels.is_empty() {
        return Ok(None);
    }
    labels
        .into_iter()
        .map(|pairs| LabelPermutation::new(pairs.into_iter().collect()))
        .collect::<Result<Vec<_>>>()
        .map(Some)
}

/// Balanced iff the digraph over every realizable label is connected.
pub fn oracle_decide_basic(instance: &Instance, limits: &OracleLimits) -> Result<bool> {
    let Some(labels) = exhaustive_labels(instance, limits)? else {
        return Ok(false);
    };
    let vertices = labels[0].vertices().collect();
    Ok(LabeledDigraph::from_permutations(vertices, labels)?.is_weakly_connected())
}

/// Week states and allowed week-to-week successions of the original
/// instance, as plain worker tables.
struct WeekGraph {
    weeks: Vec<Vec<WorkerId>>,
    next: Vec<Vec<usize>>,
}

impl WeekGraph {
    fn build(instance: &Instance) -> Self {
        let n = instance.task_count();
        let q = instance.workers;
        let l = instance.units_per_week();
        let tasks: Vec<(i64, i64)> = instance
            .task_ids()
            .map(|i| {
                let t = instance.task(i).expect("valid instance");
                (t.start, t.end)
            })
            .collect();
        let mut weeks = Vec::new();
        let total = (q as u64).pow(n as u32);
        for code in 0..total {
            let mut c = code;
            let week: Vec<WorkerId> = (0..n)
                .map(|_| {
                    let w = (c % q as u64) as WorkerId + 1;
                    c /= q as u64;
                    w
                })
                .collect();
            let proper = (0..n).all(|i| (i + 1..n).all(|j| week[i] != week[j] || !overlaps(tasks[i], tasks[j])));
            if proper {
                weeks.push(week);
            }
        }
        let allowed: Option<HashSet<&Schedule>> = instance.schedules.as_ref().map(|s| s.iter().collect());
        let boundary = instance.boundary_tasks();
        let fits = |a: &[WorkerId], b: &[WorkerId]| {
            for i in 0..n {
                for j in 0..n {
                    let shifted = (tasks[j].0 + l, tasks[j].1 + l);
                    if a[i] == b[j] && overlaps(tasks[i], shifted) {
                        return false;
                    }
                }
            }
            match &allowed {
                None => true,
                Some(allowed) => (1..=q).all(|w| {
                    let schedule = Schedule::new(
                        (1..=n as TaskId).filter(|&i| a[i as usize - 1] == w),
                        boundary.iter().copied().find(|&i| b[i as usize - 1] == w),
                    );
                    allowed.contains(&schedule)
                }),
            }
        };
        let next = weeks
            .iter()
            .map(|a| (0..weeks.len()).filter(|&k| fits(a, &weeks[k])).collect())
            .collect();
        Self { weeks, next }
    }

    /// First closed walk of length `h` accepted by `done`, pruned by `keep`.
    fn closed_walk(
        &self,
        h: usize,
        start_ok: &dyn Fn(usize) -> bool,
        keep: &mut dyn FnMut(&[usize]) -> bool,
        done: &dyn Fn(&[usize]) -> bool,
    ) -> Option<Vec<usize>> {
        fn rec(
            g: &WeekGraph,
            h: usize,
            walk: &mut Vec<usize>,
            keep: &mut dyn FnMut(&[usize]) -> bool,
            done: &dyn Fn(&[usize]) -> bool,
        ) -> bool {
            if walk.len() == h {
                return g.next[walk[h - 1]].contains(&walk[0]) && done(walk);
            }
            let last = *walk.last().expect("walk starts non-empty");
            for &k in &g.next[last] {
                walk.push(k);
                if keep(walk) && rec(g, h, walk, keep, done) {
                    return true;
                }
                walk.pop();
            }
            false
        }
        for s in (0..self.weeks.len()).filter(|&s| start_ok(s)) {
            let mut walk = vec![s];
            if keep(&walk) && rec(self, h, &mut walk, keep, done) {
                return Some(walk);
            }
        }
        None
    }

    fn plan(&self, walk: &[usize], n: usize) -> PeriodicAssignment {
        PeriodicAssignment::from_fn(n, walk.len() as u32, |i, r| {
            self.weeks[walk[r as usize - 1]][i as usize - 1]
        })
    }
}

/// Workers appear in order of first use along the tasks.
fn is_canonical(week: &[WorkerId]) -> bool {
    let mut next = 1;
    for &w in week {
        if w > next {
            return false;
        }
        if w == next {
            next += 1;
        }
    }
    true
}

fn periodic_guard(instance: &Instance, limits: &OracleLimits) -> Result<()> {
    limits.check(
        instance.task_count(),
        instance.workers,
        instance.schedules.as_ref().map_or(0, Vec::len),
    )
}

/// `q^2 q!`
pub fn period_limit(q: u32) -> usize {
    (q as u64 * q as u64 * factorial(q as usize)) as usize
}

/// Searches balanced periodic plans of every period `h <= q^2 q!` divisible
/// by `q`, week tables enumerated directly on the original instance.
pub fn oracle_balanced_plan(instance: &Instance, limits: &OracleLimits) -> Result<Option<PeriodicAssignment>> {
    periodic_guard(instance, limits)?;
    let q = instance.workers as usize;
    let n = instance.task_count();
    if q == 0 {
        return Ok(None);
    }
    let g = WeekGraph::build(instance);
    for h in (q..=period_limit(q as u32)).step_by(q) {
        let share = (h / q) as u32;
        let mut keep = |walk: &[usize]| {
            let last = &g.weeks[*walk.last().expect("non-empty")];
            (0..n).all(|i| {
                let held = walk.iter().filter(|&&k| g.weeks[k][i] == last[i]).count() as u32;
                held <= share
            })
        };
        let canonical_start = |s: usize| is_canonical(&g.weeks[s]);
        if let Some(walk) = g.closed_walk(h, &canonical_start, &mut keep, &|_| true) {
            return Ok(Some(g.plan(&walk, n)));
        }
    }
    Ok(None)
}

pub fn oracle_decide_extended(instance: &Instance, limits: &OracleLimits) -> Result<bool> {
    Ok(oracle_balanced_plan(instance, limits)?.is_some())
}

/// A feasible periodic plan (period up to `q^2 q!`) in which one worker
/// performs every task at least once.
pub fn oracle_single_worker_covers_all(
    instance: &Instance,
    limits: &OracleLimits,
) -> Result<Option<PeriodicAssignment>> {
    periodic_guard(instance, limits)?;
    let q = instance.workers;
    let n = instance.task_count();
    if q == 0 {
        return Ok(None);
    }
    let g = WeekGraph::build(instance);
    let covers = |walk: &[usize]| (1..=q).any(|w| (0..n).all(|i| walk.iter().any(|&k| g.weeks[k][i] == w)));
    for h in 1..=period_limit(q) {
        if let Some(walk) = g.closed_walk(h, &|s| is_canonical(&g.weeks[s]), &mut |_| true, &covers) {
            return Ok(Some(g.plan(&walk, n)));
        }
    }
    Ok(None)
}

/// Literal unrolling of a plan over `weeks` weeks.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct UnrolledReport {
    pub weeks: u32,
    /// `counts[task - 1][worker - 1]` over the first `weeks` weeks.
    pub counts: Vec<Vec<u32>>,
    pub conflict: Option<Conflict>,
}

impl UnrolledReport {
    /// Every worker held every task in exactly `weeks / q` weeks.
    pub fn is_exactly_uniform(&self) -> bool {
        self.counts
            .iter()
            .all(|row| row.iter().all(|&c| c as usize * row.len() == self.weeks as usize))
    }

    pub fn frequency(&self, task: TaskId, worker: WorkerId) -> f64 {
        f64::from(self.counts[task as usize - 1][worker as usize - 1]) / f64::from(self.weeks)
    }
}

pub fn unrolled_verify(instance: &Instance, plan: &PeriodicAssignment, weeks: u32) -> Result<UnrolledReport> {
    if weeks < 1 {
        return Err(RosterError::Precondition("unroll at least one week".into()));
    }
    let n = instance.task_count();
    let q = instance.workers.max(plan.max_worker()) as usize;
    let table: Vec<Vec<WorkerId>> = (1..=weeks)
        .map(|r| (1..=n as TaskId).map(|i| plan.worker(i, r)).collect())
        .collect();
    let mut counts = vec![vec![0u32; q]; n];
    for row in &table {
        for (i, &w) in row.iter().enumerate() {
            counts[i][w as usize - 1] += 1;
        }
    }
    Ok(UnrolledReport {
        weeks,
        counts,
        conflict: finite_conflict(instance, &table),
    })
}

/// Frequency of each (task, worker) pair over the first `weeks` weeks.
pub fn frequency_table(report: &UnrolledReport) -> BTreeMap<(TaskId, WorkerId), f64> {
    let mut out = BTreeMap::new();
    for (i, row) in report.counts.iter().enumerate() {
        for w in 0..row.len() {
            out.insert(
                (i as TaskId + 1, w as WorkerId + 1),
                report.frequency(i as TaskId + 1, w as WorkerId + 1),
            );
        }
    }
    out
}
