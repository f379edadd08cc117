use std::path::PathBuf;

use roster_core::cover::{enumerate_decompositions, find_decomposition_with_pair};
use roster_core::pebble::ColoredGraph;
use roster_core::{augment, decide, feasible, solve, Instance};

fn load(name: &str) -> Instance {
    Instance::load(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)).unwrap()
}

#[test]
fn fixtures_are_valid() {
    for name in ["e1.json", "e2.json", "fig4.json", "fig4_basic.json"] {
        assert!(load(name).validate().is_valid(), "{name}");
    }
    let p1 = ColoredGraph::load(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures/p1.json")).unwrap();
    p1.ensure_valid().unwrap();
}

#[test]
fn fig4_boundary_task_stays_with_its_worker() {
    let inst = load("fig4.json");
    assert_eq!(inst.boundary_tasks(), vec![1]);
    let aug = augment(&inst).unwrap().augmented;
    let u = aug.boundary_tasks();
    assert_eq!(u.len(), 2);
    let other = u[1];
    assert!(find_decomposition_with_pair(&aug, 1, 1).unwrap().is_some());
    assert!(find_decomposition_with_pair(&aug, 1, other).unwrap().is_none());
    assert!(find_decomposition_with_pair(&aug, other, other).unwrap().is_some());
    assert!(!enumerate_decompositions(&aug).unwrap().is_empty());
}

#[test]
fn fig4_gap_between_versions() {
    let inst = load("fig4.json");
    assert!(feasible(&inst).unwrap());
    assert!(!decide(&inst).unwrap().is_balanced());
    assert!(solve(&inst).unwrap().is_none());
    let basic = load("fig4_basic.json");
    assert_eq!(basic, inst.without_schedules());
    let plan = solve(&basic).unwrap().unwrap();
    assert_eq!(plan.period(), 2);
}
