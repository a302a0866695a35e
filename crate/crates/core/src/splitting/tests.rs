use super::*;
use crate::boundary::canonical_net;
use crate::fixtures;

fn ray_to(space: &CuspedGraph, model: &GroupModel, w: &str) -> RayApprox {
    let v = space.parse_vertex(model, w).unwrap();
    RayApprox::canonical_to(space, 0, v, &space.bfs(0)).unwrap()
}

fn keys(model: &GroupModel, path: &[Word]) -> Vec<String> {
    path.iter().map(|k| model.format(k)).collect()
}

#[test]
fn tree_paths_in_surface_amalgam() {
    let m = fixtures::surface();
    let x = CuspedGraph::build(&m, 4, 2).unwrap();
    assert!(tree_path(&x, &m, &ray_to(&x, &m, "a a a")).unwrap().is_empty());
    assert_eq!(keys(&m, &tree_path(&x, &m, &ray_to(&x, &m, "c c c")).unwrap()), vec![""]);
    assert_eq!(
        keys(&m, &tree_path(&x, &m, &ray_to(&x, &m, "c c a")).unwrap()),
        vec!["", "c c"]
    );
}

#[test]
fn hnn_ray_crosses_translates_of_the_edge() {
    let m = fixtures::hnn();
    let x = CuspedGraph::build(&m, 4, 2).unwrap();
    let p = edge_peripheral(&m).unwrap();
    let path = tree_path(&x, &m, &ray_to(&x, &m, "t t t")).unwrap();
    let want: Vec<Word> = ["", "t", "t t"]
        .iter()
        .map(|w| {
            let nf = m.base_normal_form(&m.parse(w).unwrap()).unwrap();
            m.coset_of(&nf, p).unwrap().0
        })
        .collect();
    assert_eq!(path, want);
}

#[test]
fn edge_and_vertex_paths_are_adjacent() {
    for m in [fixtures::surface(), fixtures::hnn()] {
        let x = CuspedGraph::build(&m, 3, 1).unwrap();
        for v in 0..x.cayley_len() {
            let nf = &x.ball.normal_forms[v];
            let e = edge_path(&m, nf).unwrap();
            let a = vertex_path(&m, nf, Factor::A).unwrap();
            let g = tree_geodesic(&e, &a);
            assert!(g.len() <= 2, "{}", m.format(nf));
            // the edge named by the path is the coset's own key
            let p = edge_peripheral(&m).unwrap();
            let c = x.coset_index[p][v] as usize;
            assert_eq!(e.last(), Some(&TreeNode::Edge(x.cosets[c].key.clone())));
        }
    }
}

#[test]
fn separation_basics() {
    let m = fixtures::surface();
    let x = CuspedGraph::build(&m, 4, 2).unwrap();
    let a = x.parse_vertex(&m, "a a").unwrap();
    let c = x.parse_vertex(&m, "c c").unwrap();
    assert!(!separation_check(&x, None, a, c).unwrap());
    let index = CosetIndex::new(&x, &m).unwrap();
    let id = index.get(&[]).unwrap();
    assert!(separation_check(&x, Some(id), a, c).unwrap());
    assert!(matches!(separation_check(&x, Some(id), 0, c), Err(Error::EndpointRemoved)));
    let far = index.get(&m.parse("c c").unwrap()).unwrap();
    assert!(!separation_check(&x, Some(far), a, x.parse_vertex(&m, "a b").unwrap()).unwrap());
}

#[test]
fn adjacent_factors_are_cut_by_the_identity_coset() {
    let m = fixtures::surface();
    let x = CuspedGraph::build(&m, 5, 2).unwrap();
    let index = CosetIndex::new(&x, &m).unwrap();
    let seq = cut_point_sequence(&x, &m, &ray_to(&x, &m, "a a"), &ray_to(&x, &m, "c c"), &index).unwrap();
    assert_eq!(seq.points.len(), 1);
    assert!(seq.points[0].coset_key.is_empty());
    assert_eq!(seq.points[0].q, Some(0));
    let same = cut_point_sequence(&x, &m, &ray_to(&x, &m, "a a"), &ray_to(&x, &m, "b b"), &index).unwrap();
    assert!(same.points.is_empty());
}

#[test]
fn oracle_agrees_on_small_surface_net() {
    let m = fixtures::surface();
    let x = CuspedGraph::build(&m, 5, 3).unwrap();
    let net = canonical_net(&x, 3, 1.0).unwrap();
    let pairs: Vec<(RayApprox, RayApprox)> = net
        .iter()
        .step_by(7)
        .zip(net.iter().skip(3).step_by(5))
        .map(|(a, b)| (a.clone(), b.clone()))
        .filter(|(a, b)| a != b)
        .take(12)
        .collect();
    let r = oracle_agreement(&x, &m, &pairs, 6).unwrap();
    assert!(r.pairs > 0);
    assert_eq!(r.false_cuts, 0, "{r:?}");
    assert_eq!(r.missed, 0, "{r:?}");
    assert_eq!(r.off_tree, 0, "{r:?}");
}

#[test]
fn hnn_vertex_group_has_cut_points_of_its_own() {
    // both ends lie in the vertex coset A, yet the b-axis separates them
    let m = fixtures::hnn();
    let x = CuspedGraph::build(&m, 5, 3).unwrap();
    let from = x.bfs(0);
    let ray = |w: &str| RayApprox::canonical_to(&x, 0, x.parse_vertex(&m, w).unwrap(), &from).unwrap();
    let r = oracle_agreement(&x, &m, &[(ray("a a a"), ray("b a^-1 b"))], 6).unwrap();
    assert_eq!((r.pairs, r.emitted, r.false_cuts, r.missed), (1, 0, 0, 0), "{r:?}");
    assert!(r.off_tree >= 1, "{r:?}");
}

#[test]
fn embedding_of_identical_space_has_no_difference() {
    let m = fixtures::free_rel_a();
    let x = CuspedGraph::build(&m, 4, 2).unwrap();
    let pairs: Vec<(u32, u32)> = (0..40).map(|i| (i, (i * 7 + 3) % 60)).collect();
    let r = compare_embedding_products(&x, &m, &x, &m, &pairs).unwrap();
    assert!(r.pairs > 0);
    assert_eq!(r.max_difference, 0.0);
}
