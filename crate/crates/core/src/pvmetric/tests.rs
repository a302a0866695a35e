use super::*;
use crate::boundary::canonical_net;
use crate::fixtures;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn surface_metric(radius: u32, depth: u32, t: u32) -> (GroupModel, CuspedGraph, PiecewiseMetric) {
    let m = fixtures::surface();
    let x = CuspedGraph::build(&m, radius, depth).unwrap();
    let net = canonical_net(&x, t, 1.0).unwrap();
    let net = distinct_points(&x, &m, &net).unwrap();
    let pm = PiecewiseMetric::new(&x, &m, &crate::boundary::thin_net(&net, 16), 1.0, VisualMetricSpec::new(1.0)).unwrap();
    (m, x, pm)
}

#[test]
fn intervals_follow_the_definition() {
    let (_, _, pm) = surface_metric(4, 3, 2);
    let n = pm.net_len;
    let mut same = 0;
    let mut single = 0;
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            let iv = pm.interval(i, j, None);
            assert!(iv.lower <= iv.upper);
            assert!(iv.width() <= iv.tail_bound * (1.0 + 1e-12));
            if pm.same_limit_set(i, j) {
                same += 1;
                assert_eq!(iv.width(), 0.0);
                assert_eq!(iv.lower, pm.d_v(i, j));
            }
            let (cuts, _, ix, iy) = pm.oriented(i, j);
            if cuts.len() == 1 && !ix && !iy {
                single += 1;
                let c = cuts[0];
                let want = pm.d_v(i, c) + pm.d_v(c, j);
                assert!((iv.lower - want).abs() < 1e-15);
            }
        }
    }
    assert!(same > 0 && single > 0, "{same} {single}");
}

#[test]
fn axioms_hold_on_a_small_net() {
    let (_, _, pm) = surface_metric(4, 3, 2);
    let iv = pm.all_pairs(None);
    let r = metric_axiom_check(&pm, &iv);
    assert_eq!((r.symmetry_violations, r.triangle_violations, r.positivity_violations), (0, 0, 0));
    assert_eq!(r.same_set_mismatches, 0);
    let md = holder_modulus_check(&pm, &iv);
    assert_eq!(md.visual_violations, 0);
    assert!(md.n_hat.is_finite());
}

#[test]
fn two_points_are_vacuous() {
    let (_, _, pm) = surface_metric(4, 3, 2);
    let iv = pm.all_pairs(None);
    let two: Vec<Vec<MetricInterval>> = iv[..2].iter().map(|r| r[..2].to_vec()).collect();
    let r = metric_axiom_check(&pm, &two);
    assert_eq!(r.triples, 0);
    assert_eq!(r.triangle_violations, 0);
}

#[test]
fn circle_is_linearly_connected() {
    let m = circle_metric(256);
    let r = linear_connectedness_check(&m, None).unwrap();
    assert!(r.k_hat >= 1.0);
    assert!(r.k_hat <= 1.0 + 2.0 * (2.0 * PI / 256.0), "{}", r.k_hat);
    let adjacent = r.pairs.iter().find(|p| p.i == 0 && p.j == 1).unwrap();
    assert_eq!(adjacent.ratio, 1.0);
    assert_eq!(adjacent.hops, 1);
}

#[test]
fn sparse_net_is_reported() {
    let m = vec![vec![0.0, 1.0, 5.0], vec![1.0, 0.0, 5.0], vec![5.0, 5.0, 0.0]];
    assert!(matches!(linear_connectedness_check(&m, Some(2.0)), Err(Error::Disconnected(0, 2))));
    let (mesh, bottleneck) = chain_scales(&m);
    assert_eq!((mesh, bottleneck), (5.0, 5.0));
}

#[test]
fn e1_formulas_and_ratios() {
    let r = e1_fixture(20, 400);
    assert_eq!(r.rows.len(), 20);
    for row in &r.rows {
        assert!(row.holds, "{row:?}");
        assert!(row.chord_rel_error < 1e-12 && row.diameter_rel_error < 1e-12);
    }
    assert!(r.growth >= 2.0);
    assert!((r.rows[0].ratio_bound - 1.25).abs() < 1e-15);
}

#[test]
fn doubling_counts() {
    assert_eq!(doubling_estimate(&[vec![0.0]], &[1.0]).max_count, 1);
    let m = circle_metric(128);
    let r = doubling_estimate(&m, &[0.1, 0.5, 1.0, 2.0]);
    assert!(r.max_count <= 5, "{r:?}");
}

#[test]
fn approx_holds_on_surface() {
    let m = fixtures::surface();
    let x = CuspedGraph::build(&m, 4, 2).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let r = approx_inequality_check(&x, &m, 20, 1, 1.0, &mut rng).unwrap();
    assert_eq!(r.violations, 0);
    assert!(r.max_excess <= 0.0);
}

#[test]
fn separate_in_a_tree() {
    let m = crate::group::GroupModel::free(2);
    let x = CuspedGraph::build(&m, 8, 1).unwrap();
    let from = x.bfs(0);
    let ray = |w: &str| RayApprox::canonical_to(&x, 0, x.parse_vertex(&m, w).unwrap(), &from).unwrap();
    let pairs = vec![(ray("a a a b"), ray("a b b b")), (ray("a a a a"), ray("b b b b"))];
    let r = separate_check(&x, &pairs, 0.0).unwrap();
    assert!(r.checked > 0);
    assert_eq!(r.violations, 0);
}

#[test]
fn truncation_refines() {
    let (_, _, pm) = surface_metric(4, 3, 2);
    for i in 0..pm.net_len {
        for j in 0..pm.net_len {
            if i != j {
                let coarse = pm.interval(i, j, Some(1));
                let fine = pm.interval(i, j, None);
                assert!(coarse.contains(fine.lower), "{coarse:?} {fine:?}");
            }
        }
    }
}

proptest! {
    #[test]
    fn chains_contain_their_ends(pts in prop::collection::vec((0.0f64..1.0, 0.0f64..1.0), 2..24)) {
        let m: Vec<Vec<f64>> = pts.iter().map(|a| pts.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect()).collect();
        let r = linear_connectedness_check(&m, None).unwrap();
        for p in &r.pairs {
            prop_assert!(p.distance == 0.0 || p.ratio >= 1.0 - 1e-12);
        }
        let d = doubling_estimate(&m, &[0.25]);
        prop_assert!(d.max_count >= 1);
    }
}

