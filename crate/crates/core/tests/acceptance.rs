//! One line per acceptance criterion. Runs without the test harness so the
//! lines always reach the output; exits nonzero if any criterion fails.

use cuspidal::boundary::{canonical_net, thin_net, RayApprox, VisualMetricSpec};
use cuspidal::cusped::CuspedGraph;
use cuspidal::fixtures;
use cuspidal::group::GroupModel;
use cuspidal::half::Half;
use cuspidal::hyperbolicity::{four_point_delta_exhaustive, triangle_from_table, DistanceTable};
use cuspidal::pvmetric::PiecewiseMetric;
use cuspidal::splitting::oracle_agreement;
use cuspidal::verify::{self, delta_estimate, net_resolution, run_suite, Suite, SuiteParams};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use std::time::Instant;

const SURFACE_BUDGET: usize = 20_000_000;

struct Verdict {
    passed: bool,
    detail: String,
}

fn verdict(passed: bool, detail: impl Into<String>) -> Verdict {
    Verdict {
        passed,
        detail: detail.into(),
    }
}

fn params(samples: usize) -> SuiteParams {
    SuiteParams {
        samples,
        budget: SURFACE_BUDGET,
        ..SuiteParams::default()
    }
}

fn suite(s: Suite, space: Option<(&CuspedGraph, &GroupModel)>, p: &SuiteParams) -> (bool, Value) {
    let out = run_suite(s, space, p).unwrap_or_else(|e| panic!("suite {s}: {e}"));
    (out.passed, out.report)
}

fn horoball_nf() -> Verdict {
    let t = Instant::now();
    let (ok, r) = suite(Suite::HoroballNf, None, &params(50));
    let secs = t.elapsed().as_secs_f64();
    verdict(
        ok && secs < 60.0,
        format!(
            "horoball normal form: {} pairs, {} length mismatches, hausdorff max {} (bound 4), {secs:.1} s (limit 60 s)",
            r["pairs"], r["mismatches"], r["hausdorff_max"]
        ),
    )
}

fn tree_sanity() -> Verdict {
    let model = GroupModel::free(2);
    let space = CuspedGraph::build(&model, 6, 1).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut all: Vec<u32> = (0..space.len() as u32).collect();
    let mut worst = Half::ZERO;
    for _ in 0..3 {
        all.shuffle(&mut rng);
        worst = worst.max(four_point_delta_exhaustive(&space, &all[..300]));
    }
    // every distance among these is certified
    let corners: Vec<u32> = (0..space.len() as u32).filter(|&v| space.ball.length[v as usize] <= 3).collect();
    let corners = &corners[..];
    let table = DistanceTable::new(&space, corners);
    let mut triangles = 0;
    let mut insize: f64 = 0.0;
    for (i, &x) in corners.iter().enumerate() {
        for (j, &y) in corners.iter().enumerate().skip(i + 1) {
            for &z in &corners[j + 1..] {
                insize = insize.max(triangle_from_table(&space, &table, x, y, z).unwrap().insize);
                triangles += 1;
            }
        }
    }
    verdict(
        worst == Half::ZERO && insize == 0.0,
        format!(
            "tree sanity: four-point delta {} on three 300-vertex subsets, max insize {insize} over all {triangles} triangles in the 3-ball",
            worst.to_f64()
        ),
    )
}

fn close(space: &CuspedGraph) -> Verdict {
    let (ok, r) = suite(Suite::Close, Some((space, &fixtures::free_rel_a())), &params(200));
    let c = &r["close"];
    verdict(
        ok && c["cosets"].as_u64().unwrap() >= 200,
        format!(
            "lemma close: {} cosets, max distance {} within 6δ̂+4 = {}, {} violations",
            c["cosets"], c["max_distance"], c["bound"], c["violations"]
        ),
    )
}

fn qc(space: &CuspedGraph) -> Verdict {
    let (ok, r) = suite(Suite::Qc, Some((space, &fixtures::free_rel_a())), &params(200));
    verdict(
        ok && r["pairs"].as_u64().unwrap() >= 200,
        format!(
            "quasi-convexity: {} pairs with N <= 3, max excess over N+2δ̂ {}, {} violations",
            r["pairs"], r["max_excess_over_bound"], r["violations"]
        ),
    )
}

fn equivariance(cases: &[(&str, &CuspedGraph, &GroupModel)]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, space, model) in cases {
        let (pass, r) = suite(Suite::Equivariance, Some((space, model)), &params(100));
        ok &= pass && r["checked"].as_u64().unwrap() >= 100;
        parts.push(format!("{name} {} checked {} mismatches", r["checked"], r["mismatches"]));
    }
    verdict(ok, format!("equivariance: {}", parts.join("; ")))
}

fn oracle_pairs(space: &CuspedGraph, size: usize) -> Vec<(RayApprox, RayApprox)> {
    let delta = delta_estimate(space, &params(1)).delta();
    let net = thin_net(&canonical_net(space, net_resolution(space), delta).unwrap(), size);
    (0..net.len())
        .flat_map(|i| (i + 1..net.len()).map(move |j| (i, j)))
        .map(|(i, j)| (net[i].clone(), net[j].clone()))
        .collect()
}

/// `vertex_limit_sets_connected`: whether the fixture's vertex groups have
/// relative boundaries without cut points, so that every separating coset
/// is a tree edge.
fn oracle(cases: &[(&str, &CuspedGraph, &GroupModel, bool)]) -> Verdict {
    let mut ok = true;
    let mut parts = Vec::new();
    for (name, space, model, vertex_limit_sets_connected) in cases {
        let r = oracle_agreement(space, model, &oracle_pairs(space, 12), 6).unwrap();
        ok &= r.pairs >= 30 && r.false_cuts == 0 && r.missed == 0 && r.unlocated == 0;
        ok &= !vertex_limit_sets_connected || r.off_tree == 0;
        parts.push(format!(
            "{name} {} pairs, {} cut points, {} false, {} tree cosets missed in {} exhaustive, {} off-tree separators",
            r.pairs, r.emitted, r.false_cuts, r.missed, r.exhaustive_pairs, r.off_tree
        ));
    }
    verdict(ok, format!("cut-point oracle: {}", parts.join("; ")))
}

fn axioms(space: &CuspedGraph) -> Verdict {
    let (ok, r) = suite(Suite::MetricAxioms, Some((space, &fixtures::surface())), &params(200));
    let a = &r["axioms"];
    verdict(
        ok && a["points"] == 20,
        format!(
            "metric axioms: {} points at resolution {}, symmetry {} triangle {} positivity {} violations, \
             {} same-limit-set pairs with {} width mismatches, {} unresolved pairs",
            a["points"],
            r["setup"]["resolution"],
            a["symmetry_violations"],
            a["triangle_violations"],
            a["positivity_violations"],
            a["same_set_pairs"],
            a["same_set_mismatches"],
            a["unresolved_pairs"]
        ),
    )
}

fn tails(space: &CuspedGraph, model: &GroupModel) -> Verdict {
    let deep = [
        "t t t t t t t",
        "t t t t t t a",
        "t t t t t t b",
        "a t t t t t t",
        "b t t t t t t",
        "t^-7",
        "t^-6 a",
    ];
    let short = ["a", "b", "a^-1", "b^-1", "a a", "b b"];
    let from = space.bfs(space.basepoint());
    let ray = |w: &str| RayApprox::canonical_to(space, space.basepoint(), space.parse_vertex(model, w).unwrap(), &from).unwrap();
    let rays: Vec<RayApprox> = deep.iter().chain(&short).map(|w| ray(w)).collect();
    let delta = delta_estimate(space, &params(1)).delta();
    let pm = PiecewiseMetric::new(space, model, &rays, delta, VisualMetricSpec::new(1.0)).unwrap();
    let mut pairs = Vec::new();
    for i in 0..deep.len() {
        for j in deep.len()..rays.len() {
            let (a, b) = pm.ideal_depth(i, j);
            if a.max(b) >= 6 {
                pairs.push((i, j));
            }
        }
    }
    pairs.truncate(20);
    let inside = pairs
        .iter()
        .filter(|&&(i, j)| {
            let before = pm.interval(i, j, Some(1));
            let after = pm.interval(i, j, Some(6));
            let slack = 1e-12 * before.upper.abs().max(1.0);
            after.lower >= before.lower - slack && after.upper <= before.upper + slack && after.tail_bound < before.tail_bound
        })
        .count();
    verdict(
        pairs.len() == 20 && inside == 20,
        format!("tail certificate: {inside}/{} refined intervals inside the prior ones (1 -> 6 terms)", pairs.len()),
    )
}

fn modulus(space: &CuspedGraph) -> Verdict {
    let (ok, r) = suite(Suite::Holder, Some((space, &fixtures::surface())), &params(200));
    let (a, b) = (&r["modulus"], &r["next_radius"]["modulus"]);
    let finite = a["n_hat"].as_f64().is_some_and(f64::is_finite) && b["n_hat"].as_f64().is_some_and(f64::is_finite);
    verdict(
        ok && finite,
        format!(
            "modulus: N̂ {:.4e} at R={} and {:.4e} at R={} (within 2x: {}), d_V > upper in {} + {} pairs",
            a["n_hat"].as_f64().unwrap_or(f64::NAN),
            space.radius,
            b["n_hat"].as_f64().unwrap_or(f64::NAN),
            space.radius + 1,
            r["stable"],
            a["visual_violations"],
            b["visual_violations"]
        ),
    )
}

fn linconn(space: &CuspedGraph) -> Verdict {
    let (ok, r) = suite(Suite::Linconn, Some((space, &fixtures::surface())), &params(200));
    let runs = r["runs"].as_array().unwrap();
    let e1 = verify::e1(20, &params(1));
    let rows = e1.report["e1"]["rows"].as_array().unwrap();
    let max_err = rows
        .iter()
        .flat_map(|row| [row["chord_rel_error"].as_f64().unwrap(), row["diameter_rel_error"].as_f64().unwrap()])
        .fold(0.0, f64::max);
    let ratios_hold = rows.len() == 20 && rows.iter().all(|row| row["holds"] == true);
    verdict(
        ok && e1.passed && ratios_hold && max_err < 1e-12,
        format!(
            "linear connectedness: K̂ {:.4} on {} points, {:.4} on {} (within 2x: {}); \
             E1 ratios >= (4k+1)/4 for k=1..20: {ratios_hold}, formula rel error {max_err:.1e}, growth {:.2}",
            runs[0]["k_hat"].as_f64().unwrap(),
            runs[0]["setup"]["points"],
            runs[1]["k_hat"].as_f64().unwrap(),
            runs[1]["setup"]["points"],
            r["refinement_stable"],
            e1.report["e1"]["growth"].as_f64().unwrap()
        ),
    )
}

fn approx(space: &CuspedGraph) -> Verdict {
    let (ok, r) = suite(Suite::Approx, Some((space, &fixtures::surface())), &params(100));
    let a = &r["approx"];
    verdict(
        ok && a["samples"] == 100,
        format!(
            "lemma approx: {} configurations, max deviation {} vs 26δ̂+12 = {}, {} violations",
            a["samples"], a["max_deviation"], a["bound"], a["violations"]
        ),
    )
}

fn reproducibility() -> Verdict {
    let model = fixtures::free_rel_a();
    let a = CuspedGraph::build(&model, 6, 5).unwrap().to_cache(&model);
    let b = CuspedGraph::build(&model, 6, 5).unwrap().to_cache(&model);
    let reread = CuspedGraph::from_cache(&a, &model).unwrap().to_cache(&model);
    let surface = fixtures::surface();
    let space = CuspedGraph::build(&surface, 4, 3).unwrap();
    let p = SuiteParams {
        net: 10,
        samples: 40,
        seed: 11,
        ..SuiteParams::default()
    };
    let report = |s: Suite| {
        let space = CuspedGraph::from_cache(&space.to_cache(&surface), &surface).unwrap();
        let out = run_suite(s, Some((&space, &surface)), &p).unwrap();
        (serde_json::to_string(&out.to_json(&p)).unwrap(), out.matrices)
    };
    let same_reports = [Suite::Close, Suite::MetricAxioms, Suite::Equivariance]
        .into_iter()
        .all(|s| report(s) == report(s));
    verdict(
        a == b && a == reread && same_reports,
        format!(
            "reproducibility: cache {} bytes identical on rebuild {}, after reload {}; seeded reports identical {}",
            a.len(),
            a == b,
            a == reread,
            same_reports
        ),
    )
}

fn main() {
    let mut results: Vec<Verdict> = Vec::new();
    let mut report = |n: usize, v: Verdict| {
        println!("criterion {n:>2}: {} {}", if v.passed { "PASS" } else { "FAIL" }, v.detail);
        results.push(v);
    };
    report(1, horoball_nf());
    report(2, tree_sanity());

    let free = fixtures::free_rel_a();
    let free7 = CuspedGraph::build(&free, 7, 5).unwrap();
    report(3, close(&free7));
    report(4, qc(&free7));

    let surface = fixtures::surface();
    let surface5 = CuspedGraph::build_with_budget(&surface, 5, 4, SURFACE_BUDGET).unwrap();
    report(
        5,
        equivariance(&[("free_rel_a R=7", &free7, &free), ("surface R=5", &surface5, &surface)]),
    );
    drop(free7);

    let hnn = fixtures::hnn();
    let hnn7 = CuspedGraph::build(&hnn, 7, 4).unwrap();
    {
        let surface6 = CuspedGraph::build_with_budget(&surface, 6, 4, SURFACE_BUDGET).unwrap();
        report(6, oracle(&[("surface R=6", &surface6, &surface, true), ("hnn R=7", &hnn7, &hnn, false)]));
    }
    report(7, axioms(&surface5));
    report(8, tails(&hnn7, &hnn));
    drop(hnn7);
    report(9, modulus(&surface5));
    report(10, linconn(&surface5));
    report(11, approx(&surface5));
    drop(surface5);
    report(12, reproducibility());

    let failed = results.iter().filter(|v| !v.passed).count();
    println!("acceptance: {} of {} criteria pass", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
