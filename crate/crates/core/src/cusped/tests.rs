use super::*;
use crate::group::GroupModel;
use crate::Error;

fn free_with_a(rank: usize) -> GroupModel {
    let mut m = GroupModel::free(rank);
    let a = m.parse("a").unwrap();
    m.add_peripheral("A", vec![a]).unwrap();
    m
}

#[test]
fn whole_group_peripheral_gives_vertical_path() {
    let m = free_with_a(1);
    let x = CuspedGraph::build(&m, 0, 3).unwrap();
    assert_eq!(x.len(), 4);
    assert_eq!(x.graph.edge_count(), 3);
}

#[test]
fn identity_coset_in_free_group() {
    let m = free_with_a(2);
    let x = CuspedGraph::build(&m, 2, 3).unwrap();
    let c = x
        .cosets
        .iter()
        .position(|c| c.members.contains(&0))
        .unwrap();
    let names: Vec<String> = x.cosets[c].members.iter().map(|&v| x.ball.label(&m, v)).collect();
    let mut want = vec!["a^-1 a^-1", "a^-1", "e", "a", "a a"];
    want.sort();
    let mut got = names.clone();
    got.sort();
    assert_eq!(got, want);
}

#[test]
fn horoball_shortcut() {
    let m = free_with_a(2);
    let x = CuspedGraph::build(&m, 8, 4).unwrap();
    let a8 = x.parse_vertex(&m, "a a a a a a a a").unwrap();
    let d = x.distance(x.basepoint(), a8).unwrap();
    assert_eq!(d.value, 6);
}

#[test]
fn no_peripherals_is_cayley_graph() {
    let m = GroupModel::free(2);
    let x = CuspedGraph::build(&m, 4, 3).unwrap();
    let v = x.parse_vertex(&m, "a b a b").unwrap();
    let d = x.distance(x.basepoint(), v).unwrap();
    assert_eq!(d.value, 4);
    assert!(x.coset.iter().all(|&c| c == NO_COSET));
}

#[test]
fn surface_identity_coset_contains_peripheral_powers() {
    let mut m = GroupModel::surface(2);
    let w = m.parse("a b a^-1 b^-1").unwrap();
    m.add_peripheral("C", vec![w]).unwrap();
    let x = CuspedGraph::build(&m, 4, 3).unwrap();
    let id = x
        .cosets
        .iter()
        .find(|c| c.members.contains(&0))
        .expect("identity coset");
    assert!(id.members.contains(&0));
    let ab = x.parse_vertex(&m, "a b a^-1 b^-1").unwrap();
    assert!(id.members.contains(&ab));
    let touching = x.cosets.iter().filter(|c| c.members.contains(&0)).count();
    assert_eq!(touching, 1);
}

#[test]
fn horoball_edges_respect_levels() {
    let m = free_with_a(2);
    let x = CuspedGraph::build(&m, 3, 3).unwrap();
    for (a, b) in x.graph.edges() {
        let (da, db) = (x.depth[a as usize], x.depth[b as usize]);
        assert!(da.abs_diff(db) <= 1);
        if da != db {
            assert_eq!(x.base[a as usize], x.base[b as usize]);
        }
        if da > 0 && da == db {
            assert_eq!(x.coset[a as usize], x.coset[b as usize]);
        }
    }
}

#[test]
fn cache_round_trip_is_byte_identical() {
    let m = free_with_a(2);
    let x = CuspedGraph::build(&m, 3, 3).unwrap();
    let text = x.to_cache(&m);
    let y = CuspedGraph::from_cache(&text, &m).unwrap();
    assert_eq!(y.to_cache(&m), text);
    assert_eq!(y.graph, x.graph);
}

#[test]
fn cache_rejects_other_model() {
    let m = free_with_a(2);
    let x = CuspedGraph::build(&m, 2, 2).unwrap();
    let text = x.to_cache(&m);
    let other = GroupModel::free(2);
    assert!(matches!(CuspedGraph::from_cache(&text, &other), Err(Error::StaleCache(_))));
}

#[test]
fn close_and_tight_hold_in_free_group() {
    let m = free_with_a(2);
    let x = CuspedGraph::build(&m, 4, 4).unwrap();
    let all: Vec<usize> = (0..x.cosets.len()).collect();
    let r = checks::lemma_close(&x, &all, 1.0);
    assert!(r.samples > 0);
    assert_eq!(r.violations, 0);
    let c = x.cosets.iter().position(|c| c.members.contains(&0)).unwrap();
    let t = checks::lemma_tight(&x, c, 2, 1.0);
    assert_eq!(t.violations, 0);
}
