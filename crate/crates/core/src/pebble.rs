//! Pebbles on an arc-colored digraph where every color is a permutation of
//! the vertices. Playing a color moves every pebble along its arc of that
//! color. An Eulerian circuit of the lifted graph, whose vertices are the
//! pebble placements, yields a periodic color sequence under which every
//! pebble crosses every arc equally often.

use std::collections::{HashMap, VecDeque};
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Result, RosterError};

/// Largest vertex count `lift_component` accepts unless told otherwise.
pub const DEFAULT_LIFT_CAP: usize = 8;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Color {
    pub name: String,
    /// `perm[v - 1]` is the head of the arc of this color leaving `v`, 1-based.
    pub perm: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColoredGraph {
    pub vertices: usize,
    pub colors: Vec<Color>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct GraphReport {
    pub errors: Vec<String>,
    pub warnings: Vec<String>,
}

impl GraphReport {
    pub fn is_valid(&self) -> bool {
        self.errors.is_empty()
    }
}

pub fn validate_colored_graph(g: &ColoredGraph) -> GraphReport {
    let mut report = GraphReport::default();
    let n = g.vertices;
    for c in &g.colors {
        if c.perm.len() != n {
            report
                .errors
                .push(format!("color {}: {} entries for {n} vertices", c.name, c.perm.len()));
            continue;
        }
        if let Some(&v) = c.perm.iter().find(|&&v| v < 1 || v > n) {
            report
                .errors
                .push(format!("color {}: vertex {v} outside 1..{n}", c.name));
            continue;
        }
        let mut hit = vec![false; n];
        for &v in &c.perm {
            hit[v - 1] = true;
        }
        if hit.iter().any(|h| !h) {
            report.errors.push(format!("color {}: not a permutation", c.name));
        }
    }
    if n > 0 && g.colors.is_empty() {
        report.warnings.push("no colors".into());
    } else if report.is_valid() && !g.is_connected() {
        report.warnings.push("not strongly connected".into());
    }
    report
}

impl ColoredGraph {
    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }

    /// Builds a graph from 0-based permutations named `c1, c2, ...`.
    pub fn from_permutations(vertices: usize, perms: &[Vec<usize>]) -> Self {
        let colors = perms
            .iter()
            .enumerate()
            .map(|(k, p)| Color {
                name: format!("c{}", k + 1),
                perm: p.iter().map(|v| v + 1).collect(),
            })
            .collect();
        Self { vertices, colors }
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = validate_colored_graph(self);
        match report.errors.first() {
            None => Ok(()),
            Some(e) => Err(RosterError::InvalidGraph(e.clone())),
        }
    }

    pub fn arc_count(&self) -> usize {
        self.vertices * self.colors.len()
    }

    /// Head of the `color` arc leaving `v`, both 0-based.
    pub fn step(&self, color: usize, v: usize) -> usize {
        self.colors[color].perm[v] - 1
    }

    /// The union of the colors is connected. Each color is a permutation, so
    /// weak and strong connectivity coincide.
    pub fn is_connected(&self) -> bool {
        if self.vertices == 0 {
            return true;
        }
        let mut seen = vec![false; self.vertices];
        let mut stack = vec![0];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for c in 0..self.colors.len() {
                let w = self.step(c, v);
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen.into_iter().all(|s| s)
    }
}

/// Placements reachable from a seed; `placements[k][p]` is the vertex of
/// pebble `p`. Placement 0 is the seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LiftedComponent {
    pub placements: Vec<Vec<usize>>,
    /// `successors[k][c]`: placement after playing color `c` from `k`.
    pub successors: Vec<Vec<usize>>,
}

impl LiftedComponent {
    pub fn len(&self) -> usize {
        self.placements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.placements.is_empty()
    }

    pub fn arc_count(&self) -> usize {
        self.successors.iter().map(Vec::len).sum()
    }
}

pub fn identity_placement(g: &ColoredGraph) -> Vec<usize> {
    (0..g.vertices).collect()
}

fn check_placement(g: &ColoredGraph, placement: &[usize]) -> Result<()> {
    let mut hit = vec![false; g.vertices];
    if placement.len() != g.vertices {
        return Err(RosterError::Precondition(
            "placement needs one vertex per pebble".into(),
        ));
    }
    for &v in placement {
        if v >= g.vertices || std::mem::replace(&mut hit[v], true) {
            return Err(RosterError::Precondition("placement is not a bijection".into()));
        }
    }
    Ok(())
}

/// Breadth-first closure of `seed` under every color.
pub fn lift_component(g: &ColoredGraph, seed: &[usize], cap: usize) -> Result<LiftedComponent> {
    g.ensure_valid()?;
    if g.vertices > cap {
        return Err(RosterError::Guardrail(format!(
            "{} vertices exceed the lift cap of {cap}",
            g.vertices
        )));
    }
    check_placement(g, seed)?;
    let mut index: HashMap<Vec<usize>, usize> = HashMap::new();
    let mut placements = vec![seed.to_vec()];
    index.insert(seed.to_vec(), 0);
    let mut successors = Vec::new();
    let mut queue = VecDeque::from([0]);
    while let Some(k) = queue.pop_front() {
        let mut row = Vec::with_capacity(g.colors.len());
        for c in 0..g.colors.len() {
            let next: Vec<usize> = placements[k].iter().map(|&v| g.step(c, v)).collect();
            let id = *index.entry(next.clone()).or_insert_with(|| {
                placements.push(next);
                queue.push_back(placements.len() - 1);
                placements.len() - 1
            });
            row.push(id);
        }
        successors.push(row);
    }
    let component = LiftedComponent { placements, successors };
    let mut indegree = vec![0; component.len()];
    for row in &component.successors {
        for &k in row {
            indegree[k] += 1;
        }
    }
    assert!(
        indegree.iter().all(|&d| d == g.colors.len()),
        "lifted degrees must match the color count"
    );
    assert_eq!(factorial(g.vertices) % component.len() as u64, 0);
    Ok(component)
}

/// Closed walk from placement 0 using every lifted arc once, as
/// `(placement, color)` pairs. Unused arcs are taken in color order.
pub fn eulerian_circuit(k: &LiftedComponent) -> Vec<(usize, usize)> {
    let mut next_color = vec![0; k.len()];
    let mut stack: Vec<(usize, Option<(usize, usize)>)> = vec![(0, None)];
    let mut circuit = Vec::with_capacity(k.arc_count());
    while let Some(&(v, _)) = stack.last() {
        if let Some(&w) = k.successors[v].get(next_color[v]) {
            stack.push((w, Some((v, next_color[v]))));
            next_color[v] += 1;
        } else if let Some((_, Some(arc))) = stack.pop() {
            circuit.push(arc);
        }
    }
    circuit.reverse();
    assert_eq!(circuit.len(), k.arc_count(), "lifted component must be Eulerian");
    circuit
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ColorSequence {
    /// 0-based color indices of one period.
    pub colors: Vec<usize>,
}

impl ColorSequence {
    pub fn period(&self) -> usize {
        self.colors.len()
    }
}

pub fn periodic_color_sequence(g: &ColoredGraph, seed: &[usize], cap: usize) -> Result<ColorSequence> {
    if g.colors.is_empty() {
        return Err(RosterError::Precondition("no colors to play".into()));
    }
    let k = lift_component(g, seed, cap)?;
    let colors: Vec<usize> = eulerian_circuit(&k).into_iter().map(|(_, c)| c).collect();
    assert_eq!(colors.len(), g.colors.len() * k.len());
    assert!(colors.len() as u64 <= g.arc_count() as u64 * factorial(g.vertices.saturating_sub(1)));
    Ok(ColorSequence { colors })
}

pub fn factorial(n: usize) -> u64 {
    (1..=n as u64).product()
}

/// Number of components of the lifted graph, `|V|! / |K|`.
pub fn kappa(g: &ColoredGraph, component: &LiftedComponent) -> u64 {
    factorial(g.vertices) / component.len() as u64
}

/// Per-pebble per-arc visit counts of one lifted-circuit period,
/// `(|V| - 1)! / kappa`, provided the graph is connected.
pub fn expected_visits(g: &ColoredGraph, component: &LiftedComponent) -> u64 {
    factorial(g.vertices.saturating_sub(1)) / kappa(g, component)
}

/// `counts[p][v][c]`: how often pebble `p` crossed the `c` arc leaving `v`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VisitCounts {
    pub counts: Vec<Vec<Vec<u64>>>,
}

impl VisitCounts {
    fn zeros(g: &ColoredGraph) -> Self {
        Self {
            counts: vec![vec![vec![0; g.colors.len()]; g.vertices]; g.vertices],
        }
    }

    pub fn all(&self) -> impl Iterator<Item = u64> + '_ {
        self.counts.iter().flatten().flatten().copied()
    }

    /// The common value if every pebble crossed every arc equally often.
    pub fn uniform_value(&self) -> Option<u64> {
        let mut it = self.all();
        let first = it.next()?;
        it.all(|c| c == first).then_some(first)
    }
}

fn play(g: &ColoredGraph, positions: &mut [usize], color: usize, counts: &mut VisitCounts) {
    let mut occupied = vec![false; g.vertices];
    for (p, v) in positions.iter_mut().enumerate() {
        counts.counts[p][*v][color] += 1;
        *v = g.step(color, *v);
        assert!(!std::mem::replace(&mut occupied[*v], true), "two pebbles on one vertex");
    }
}

/// Plays `seq` `periods` times from `start` and counts arc crossings.
pub fn visit_frequencies(
    g: &ColoredGraph,
    seq: &ColorSequence,
    start: &[usize],
    periods: usize,
) -> Result<VisitCounts> {
    g.ensure_valid()?;
    check_placement(g, start)?;
    let mut counts = VisitCounts::zeros(g);
    let mut positions = start.to_vec();
    for _ in 0..periods {
        for &c in &seq.colors {
            play(g, &mut positions, c, &mut counts);
        }
    }
    Ok(counts)
}

/// Trajectory of each pebble over `periods` periods, including the start.
pub fn pebble_walks(g: &ColoredGraph, seq: &ColorSequence, start: &[usize], periods: usize) -> Vec<Vec<usize>> {
    let mut walks: Vec<Vec<usize>> = start.iter().map(|&v| vec![v]).collect();
    for _ in 0..periods {
        for &c in &seq.colors {
            for walk in &mut walks {
                let v = *walk.last().expect("walks start non-empty");
                walk.push(g.step(c, v));
            }
        }
    }
    walks
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MonteCarloReport {
    pub steps: u64,
    pub seed: u64,
    /// `frequencies[p][v][c]`
    pub frequencies: Vec<Vec<Vec<f64>>>,
    pub max_deviation: f64,
}

/// Plays `steps` independent uniform colors from the identity placement.
/// The generator is ChaCha8 seeded with `seed`.
pub fn simulate_random_colors(g: &ColoredGraph, steps: u64, seed: u64) -> Result<MonteCarloReport> {
    g.ensure_valid()?;
    if steps == 0 || g.colors.is_empty() {
        return Err(RosterError::Precondition("need at least one step and one color".into()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut counts = VisitCounts::zeros(g);
    let mut positions = identity_placement(g);
    for _ in 0..steps {
        let c = rng.gen_range(0..g.colors.len());
        play(g, &mut positions, c, &mut counts);
    }
    let target = 1.0 / g.arc_count() as f64;
    let frequencies: Vec<Vec<Vec<f64>>> = counts
        .counts
        .iter()
        .map(|pv| {
            pv.iter()
                .map(|vc| vc.iter().map(|&k| k as f64 / steps as f64).collect())
                .collect()
        })
        .collect();
    let max_deviation = frequencies
        .iter()
        .flatten()
        .flatten()
        .map(|f| (f - target).abs())
        .fold(0.0, f64::max);
    Ok(MonteCarloReport {
        steps,
        seed,
        frequencies,
        max_deviation,
    })
}

/// A random connected colored graph: uniform permutations, redrawn until
/// their union is connected.
pub fn random_connected_graph<R: Rng>(rng: &mut R, vertices: usize, colors: usize) -> ColoredGraph {
    assert!(
        colors >= 1 || vertices <= 1,
        "a connected graph on several vertices needs a color"
    );
    loop {
        let perms: Vec<Vec<usize>> = (0..colors)
            .map(|_| {
                let mut p: Vec<usize> = (0..vertices).collect();
                for k in (1..vertices).rev() {
                    p.swap(k, rng.gen_range(0..=k));
                }
                p
            })
            .collect();
        let g = ColoredGraph::from_permutations(vertices, &perms);
        if g.is_connected() {
            return g;
        }
    }
}
