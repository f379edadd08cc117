//! Labeled multigraph on the boundary tasks: one permutation per label,
//! mapping the boundary task a worker finishes in one week to the boundary
//! task the same worker finishes in the next.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use serde::Serialize;

use crate::assignment::WeekDecomposition;
use crate::coloring::{FirstWeekColoring, SlotKind};
use crate::error::{Result, RosterError};
use crate::model::{Instance, TaskId};

/// A bijection on the boundary tasks.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct LabelPermutation {
    map: BTreeMap<TaskId, TaskId>,
}

/// Anything that fixes one week's behavior and so induces a permutation.
pub trait WeekLabel {
    fn label_permutation(&self, instance: &Instance) -> Result<LabelPermutation>;
}

fn require_full_boundary(instance: &Instance) -> Result<Vec<TaskId>> {
    let u = instance.boundary_tasks();
    if u.len() != instance.workers as usize {
        return Err(RosterError::Precondition(format!(
            "{} boundary tasks for {} workers; augment first",
            u.len(),
            instance.workers
        )));
    }
    Ok(u)
}

impl WeekLabel for FirstWeekColoring {
    /// The owner of base slot `i` owns shifted slot `i'`.
    fn label_permutation(&self, instance: &Instance) -> Result<LabelPermutation> {
        let u = require_full_boundary(instance)?;
        let mut map = BTreeMap::new();
        for &i in &u {
            let w = self
                .color(i, SlotKind::Base)
                .ok_or_else(|| RosterError::Precondition(format!("coloring misses t{i}")))?;
            let mut shifted = u.iter().filter(|&&j| self.color(j, SlotKind::Shifted) == Some(w));
            match (shifted.next(), shifted.next()) {
                (Some(&j), None) => {
                    map.insert(i, j);
                }
                _ => {
                    return Err(RosterError::Precondition(format!(
                        "worker {w} must own exactly one shifted boundary slot"
                    )))
                }
            }
        }
        LabelPermutation::new(map)
    }
}

impl WeekLabel for WeekDecomposition {
    /// The boundary task finished in each part maps to the part's starting task.
    fn label_permutation(&self, instance: &Instance) -> Result<LabelPermutation> {
        let u = require_full_boundary(instance)?;
        let mut map = BTreeMap::new();
        for part in &self.parts {
            let mut members = part.finishing.iter().filter(|t| u.contains(t));
            let (Some(&i), None) = (members.next(), members.next()) else {
                return Err(RosterError::Precondition(format!(
                    "part {part} must finish exactly one boundary task"
                )));
            };
            let j = part
                .starting
                .ok_or_else(|| RosterError::Precondition(format!("part {part} starts nothing")))?;
            map.insert(i, j);
        }
        LabelPermutation::new(map)
    }
}

impl LabelPermutation {
    pub fn new(map: BTreeMap<TaskId, TaskId>) -> Result<Self> {
        let image: BTreeSet<TaskId> = map.values().copied().collect();
        if image.len() != map.len() || !image.iter().all(|v| map.contains_key(v)) {
            return Err(RosterError::Precondition("label is not a bijection".into()));
        }
        Ok(Self { map })
    }

    pub fn identity(vertices: impl IntoIterator<Item = TaskId>) -> Self {
        Self {
            map: vertices.into_iter().map(|v| (v, v)).collect(),
        }
    }

    pub fn apply(&self, i: TaskId) -> TaskId {
        self.map[&i]
    }

    pub fn vertices(&self) -> impl Iterator<Item = TaskId> + '_ {
        self.map.keys().copied()
    }

    pub fn pairs(&self) -> impl Iterator<Item = (TaskId, TaskId)> + '_ {
        self.map.iter().map(|(&a, &b)| (a, b))
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// Cycles, each starting at its smallest vertex, ordered by that vertex.
    pub fn cycles(&self) -> Vec<Vec<TaskId>> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for &start in self.map.keys() {
            if !seen.insert(start) {
                continue;
            }
            let mut cycle = vec![start];
            let mut v = self.map[&start];
            while v != start {
                seen.insert(v);
                cycle.push(v);
                v = self.map[&v];
            }
            out.push(cycle);
        }
        out
    }

    pub fn cycle_count(&self) -> usize {
        self.cycles().len()
    }

    /// Single cycle through every vertex.
    pub fn is_hamiltonian(&self) -> bool {
        self.cycle_count() == 1
    }

    /// Index into `cycles()` of the cycle holding `v`.
    pub fn cycle_of(&self, v: TaskId) -> Option<usize> {
        self.cycles().iter().position(|c| c.contains(&v))
    }
}

pub fn cycle_count(p: &LabelPermutation) -> usize {
    p.cycle_count()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Arc {
    pub tail: TaskId,
    pub head: TaskId,
    pub label: usize,
}

/// Vertices are boundary task ids; label `k` refers to the `k`-th input.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LabeledDigraph {
    vertices: Vec<TaskId>,
    labels: Vec<LabelPermutation>,
    arcs: Vec<Arc>,
}

impl LabeledDigraph {
    pub fn build<L: WeekLabel>(instance: &Instance, labels: &[L]) -> Result<Self> {
        let perms = labels
            .iter()
            .map(|l| l.label_permutation(instance))
            .collect::<Result<Vec<_>>>()?;
        Self::from_permutations(instance.boundary_tasks(), perms)
    }

    pub fn from_permutations(vertices: Vec<TaskId>, labels: Vec<LabelPermutation>) -> Result<Self> {
        if labels.is_empty() {
            return Err(RosterError::Precondition("at least one label is required".into()));
        }
        let mut arcs = Vec::with_capacity(vertices.len() * labels.len());
        for (label, p) in labels.iter().enumerate() {
            if !p.vertices().eq(vertices.iter().copied()) {
                return Err(RosterError::Precondition(format!(
                    "label {label} has a different vertex set"
                )));
            }
            arcs.extend(p.pairs().map(|(tail, head)| Arc { tail, head, label }));
        }
        let d = Self { vertices, labels, arcs };
        assert_eq!(d.arcs.len(), d.vertices.len() * d.labels.len());
        for v in &d.vertices {
            let out = d.arcs.iter().filter(|a| a.tail == *v).count();
            let inn = d.arcs.iter().filter(|a| a.head == *v).count();
            assert!(
                out == d.labels.len() && inn == d.labels.len(),
                "labels must be cycle covers"
            );
        }
        Ok(d)
    }

    pub fn vertices(&self) -> &[TaskId] {
        &self.vertices
    }

    pub fn labels(&self) -> &[LabelPermutation] {
        &self.labels
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    fn index(&self, v: TaskId) -> usize {
        self.vertices.binary_search(&v).expect("vertex of this graph")
    }

    /// Components of the underlying undirected graph, each sorted, ordered
    /// by smallest vertex.
    pub fn components(&self) -> Vec<Vec<TaskId>> {
        let n = self.vertices.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for a in &self.arcs {
            let (x, y) = (
                find(&mut parent, self.index(a.tail)),
                find(&mut parent, self.index(a.head)),
            );
            parent[x.max(y)] = x.min(y);
        }
        let mut groups: BTreeMap<usize, Vec<TaskId>> = BTreeMap::new();
        for k in 0..n {
            let root = find(&mut parent, k);
            groups.entry(root).or_default().push(self.vertices[k]);
        }
        groups.into_values().collect()
    }

    pub fn is_weakly_connected(&self) -> bool {
        self.components().len() <= 1
    }

    /// Every vertex reaches every other one along directed arcs.
    pub fn is_strongly_connected(&self) -> bool {
        let n = self.vertices.len();
        if n == 0 {
            return true;
        }
        let reach_all = |forward: bool| {
            let mut seen = vec![false; n];
            let mut stack = vec![0];
            seen[0] = true;
            while let Some(x) = stack.pop() {
                for a in &self.arcs {
                    let (from, to) = if forward { (a.tail, a.head) } else { (a.head, a.tail) };
                    if self.index(from) == x {
                        let y = self.index(to);
                        if !seen[y] {
                            seen[y] = true;
                            stack.push(y);
                        }
                    }
                }
            }
            seen.into_iter().all(|s| s)
        };
        reach_all(true) && reach_all(false)
    }

    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph transitions {\n");
        for v in &self.vertices {
            let _ = writeln!(out, "  t{v};");
        }
        for a in &self.arcs {
            let _ = writeln!(out, "  t{} -> t{} [label=\"{}\"];", a.tail, a.head, a.label);
        }
        out.push_str("}\n");
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::augment::augment;
    use crate::coloring::color_first_week;
    use crate::model::Schedule;

    fn perm(pairs: &[(TaskId, TaskId)]) -> LabelPermutation {
        LabelPermutation::new(pairs.iter().copied().collect()).unwrap()
    }

    #[test]
    fn cycle_counts() {
        assert_eq!(LabelPermutation::identity(1..=4).cycle_count(), 4);
        assert_eq!(perm(&[(1, 2), (2, 3), (3, 1)]).cycle_count(), 1);
        assert_eq!(perm(&[(1, 2), (2, 1), (3, 3)]).cycles(), vec![vec![1, 2], vec![3]]);
    }

    #[test]
    fn non_bijection_is_rejected() {
        assert!(LabelPermutation::new([(1, 2), (2, 2)].into_iter().collect()).is_err());
    }

    #[test]
    fn e1_augmented_labels_are_loops() {
        let e1 = Instance::from_intervals(10, 2, &[(-3, 4), (2, 9)]);
        let aug = augment(&e1).unwrap().augmented;
        let c = color_first_week(&aug).unwrap();
        let p = c.label_permutation(&aug).unwrap();
        assert_eq!(p, perm(&[(1, 1), (3, 3)]));
        let d = LabeledDigraph::build(&aug, &[c]).unwrap();
        assert!(!d.is_weakly_connected());
        assert_eq!(d.components(), vec![vec![1], vec![3]]);
    }

    #[test]
    fn decomposition_label() {
        let inst = Instance::from_intervals(10, 2, &[(-3, 4), (0, 5)]);
        let d = WeekDecomposition::new(vec![Schedule::new([1], Some(1)), Schedule::new([2], Some(2))]);
        assert_eq!(d.label_permutation(&inst).unwrap(), LabelPermutation::identity([1, 2]));
        let bad = WeekDecomposition::new(vec![Schedule::new([1, 2], Some(1)), Schedule::new([], Some(2))]);
        assert!(bad.label_permutation(&inst).is_err());
    }

    #[test]
    fn identity_and_swap_connect() {
        let d = LabeledDigraph::from_permutations(
            vec![1, 2],
            vec![LabelPermutation::identity([1, 2]), perm(&[(1, 2), (2, 1)])],
        )
        .unwrap();
        assert_eq!(d.arcs().len(), 4);
        assert!(d.is_weakly_connected());
        assert!(d.is_strongly_connected());
        assert!(d.to_dot().contains("t1 -> t2 [label=\"1\"]"));
    }

    #[test]
    fn loops_only() {
        let d = LabeledDigraph::from_permutations(vec![1, 2, 3], vec![LabelPermutation::identity(1..=3)]).unwrap();
        assert_eq!(d.arcs().len(), 3);
        assert!(!d.is_weakly_connected());
        let single = LabeledDigraph::from_permutations(vec![4], vec![LabelPermutation::identity([4])]).unwrap();
        assert!(single.is_weakly_connected());
    }
}
