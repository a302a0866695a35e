//! Named verification suites with JSON reports, shared by the command line
//! and the acceptance tests.

use crate::boundary::{canonical_net, certified_sphere, matrix_to_csv, thin_net, RayApprox, VisualMetricSpec};
use crate::cusped::checks::{check_deep_penetration, check_quasiconvexity, lemma_close, sample_near_pairs};
use crate::cusped::CuspedGraph;
use crate::error::{Error, Result};
use crate::group::GroupModel;
use crate::horoball::{path_graph, HoroballGraph};
use crate::hyperbolicity::{check_equivariance, estimate_delta, DeltaReport};
use crate::pvmetric::{
    approx_inequality_check, circle_metric, d01_check, distinct_points, doubling_estimate, e1_fixture,
    holder_modulus_check, linear_connectedness_check, lower_matrix, metric_axiom_check, modulus_stable,
    separate_check, PiecewiseMetric,
};
use crate::par;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use std::fmt;
use std::str::FromStr;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Suite {
    HoroballNf,
    Close,
    Qc,
    Deep,
    Approx,
    Equivariance,
    MetricAxioms,
    Holder,
    Linconn,
    E1Fixture,
    Doubling,
}

impl Suite {
    pub const ALL: [Suite; 11] = [
        Suite::HoroballNf,
        Suite::Close,
        Suite::Qc,
        Suite::Deep,
        Suite::Approx,
        Suite::Equivariance,
        Suite::MetricAxioms,
        Suite::Holder,
        Suite::Linconn,
        Suite::E1Fixture,
        Suite::Doubling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::HoroballNf => "horoball-nf",
            Suite::Close => "close",
            Suite::Qc => "qc",
            Suite::Deep => "deep",
            Suite::Approx => "approx",
            Suite::Equivariance => "equivariance",
            Suite::MetricAxioms => "metric-axioms",
            Suite::Holder => "holder",
            Suite::Linconn => "linconn",
            Suite::E1Fixture => "e1-fixture",
            Suite::Doubling => "doubling",
        }
    }

    /// Suites that run on fixed fixtures and ignore the cache.
    pub fn standalone(self) -> bool {
        matches!(self, Suite::HoroballNf | Suite::E1Fixture)
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::Parse {
                line: 0,
                msg: format!("unknown suite `{s}`"),
            })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SuiteParams {
    pub samples: usize,
    pub seed: u64,
    /// Boundary net size.
    pub net: usize,
    pub epsilon: f64,
    /// Quadruples drawn for the δ estimate.
    pub delta_samples: usize,
    /// Vertex budget for auxiliary builds.
    pub budget: usize,
}

impl Default for SuiteParams {
    fn default() -> Self {
        SuiteParams {
            samples: 200,
            seed: 1,
            net: 20,
            epsilon: 1.0,
            delta_samples: 4000,
            budget: crate::group::ball::DEFAULT_VERTEX_BUDGET,
        }
    }
}

pub struct SuiteOutcome {
    pub suite: Suite,
    pub passed: bool,
    pub report: Value,
    /// `(file name, csv)` pairs for matrix output.
    pub matrices: Vec<(String, String)>,
}

impl SuiteOutcome {
    fn new(suite: Suite, passed: bool, report: Value) -> Self {
        SuiteOutcome {
            suite,
            passed,
            report,
            matrices: Vec::new(),
        }
    }

    /// The report wrapped with the suite name, verdict and parameters.
    pub fn to_json(&self, params: &SuiteParams) -> Value {
        json!({
            "suite": self.suite,
            "passed": self.passed,
            "params": params,
            "report": self.report,
        })
    }
}

fn rng(params: &SuiteParams, salt: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(params.seed.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt)
}

pub fn delta_estimate(space: &CuspedGraph, params: &SuiteParams) -> DeltaReport {
    estimate_delta(space, params.delta_samples, 2000, &mut rng(params, 0xde17a))
}

pub fn run_suite(
    suite: Suite,
    space: Option<(&CuspedGraph, &GroupModel)>,
    params: &SuiteParams,
) -> Result<SuiteOutcome> {
    match suite {
        Suite::HoroballNf => horoball_nf(64, 6, params),
        Suite::E1Fixture => Ok(e1(20, params)),
        _ => {
            let (space, model) = space.ok_or_else(|| Error::Io(format!("suite {suite} needs a cache")))?;
            match suite {
                Suite::Close => close(space, params),
                Suite::Qc => qc(space, params),
                Suite::Deep => deep(space, params),
                Suite::Approx => approx(space, model, params),
                Suite::Equivariance => equivariance(space, model, params),
                Suite::MetricAxioms => metric_axioms(space, model, params),
                Suite::Holder => holder(space, model, params),
                Suite::Linconn => linconn(space, model, params),
                Suite::Doubling => doubling(space, model, params),
                Suite::HoroballNf | Suite::E1Fixture => unreachable!(),
            }
        }
    }
}

/// Normal-form length against BFS on every pair of the horoball over a
/// path, and Hausdorff distance of sampled alternate geodesics.
pub fn horoball_nf(n: usize, depth: u32, params: &SuiteParams) -> Result<SuiteOutcome> {
    let h = HoroballGraph::build(&path_graph(n), depth)?;
    let len = h.len() as u32;
    let rows: Vec<Result<(u64, u64)>> = par::map_range(len as usize, |x| {
        let from = h.graph.bfs(x as u32);
        let mut mismatches = 0u64;
        let mut clipped = 0u64;
        for y in 0..len {
            match h.normal_form_geodesic(x as u32, y) {
                Ok(nf) => {
                    let ok = nf.path.len() as u32 - 1 == from[y as usize]
                        && nf.path.windows(2).all(|w| h.graph.has_edge(w[0], w[1]));
                    if !ok {
                        mismatches += 1;
                    }
                }
                Err(Error::DepthClipped { .. }) => clipped += 1,
                Err(e) => return Err(e),
            }
        }
        Ok((mismatches, clipped))
    });
    let (mut mismatches, mut clipped) = (0, 0);
    for r in rows {
        let (m, c) = r?;
        mismatches += m;
        clipped += c;
    }
    let mut rng = rng(params, 1);
    let samples = params.samples.min(50);
    let mut hausdorff = 0;
    let mut partial = 0;
    for _ in 0..samples {
        let (x, y) = (rng.gen_range(0..len), rng.gen_range(0..len));
        let r = h.hausdorff_check(x, y, crate::horoball::GEODESIC_CAP)?;
        hausdorff = hausdorff.max(r.max_distance);
        partial += r.partial as usize;
    }
    let pairs = len as u64 * len as u64;
    let passed = mismatches == 0 && clipped == 0 && hausdorff <= 4;
    Ok(SuiteOutcome::new(
        Suite::HoroballNf,
        passed,
        json!({
            "base_vertices": n,
            "depth": depth,
            "pairs": pairs,
            "mismatches": mismatches,
            "clipped": clipped,
            "hausdorff_samples": samples,
            "hausdorff_max": hausdorff,
            "hausdorff_bound": 4,
            "hausdorff_partial": partial,
        }),
    ))
}

fn sample_cosets<R: Rng>(space: &CuspedGraph, count: usize, rng: &mut R) -> Vec<usize> {
    let mut all: Vec<usize> = (0..space.cosets.len()).collect();
    all.shuffle(rng);
    all.truncate(count);
    all.sort_unstable();
    all
}

/// Lemma close on sampled cosets. The lemma's own sampling discards
/// contaminated members, so cosets are drawn until `samples` are usable.
pub fn close(space: &CuspedGraph, params: &SuiteParams) -> Result<SuiteOutcome> {
    let delta = delta_estimate(space, params);
    let mut rng = rng(params, 2);
    let mut order: Vec<usize> = (0..space.cosets.len()).collect();
    order.shuffle(&mut rng);
    let mut used = Vec::new();
    let mut report = None;
    for chunk in order.chunks(params.samples.max(1)) {
        used.extend_from_slice(chunk);
        let r = lemma_close(space, &used, delta.delta());
        let enough = r.cosets >= params.samples;
        report = Some(r);
        if enough {
            break;
        }
    }
    let r = report.ok_or(Error::EmptyGraph)?;
    let passed = r.violations == 0 && r.cosets >= params.samples.min(space.cosets.len());
    Ok(SuiteOutcome::new(Suite::Close, passed, json!({ "delta": delta, "close": r })))
}

/// Quasi-convexity of horoballs on sampled pairs near them, `N = 1..=3`.
pub fn qc(space: &CuspedGraph, params: &SuiteParams) -> Result<SuiteOutcome> {
    let delta = delta_estimate(space, params);
    let mut rng = rng(params, 3);
    let mut pairs = 0;
    let mut discarded = 0;
    let mut violations = 0;
    // largest distance to the horoball minus `N + 2δ`
    let mut max_excess = f64::NEG_INFINITY;
    let mut attempts = 0;
    while pairs < params.samples {
        attempts += 1;
        if attempts > 20 * params.samples.max(1) {
            return Err(Error::SampleExhausted(format!("{pairs} quasi-convexity pairs")));
        }
        let c = rng.gen_range(0..space.cosets.len());
        let n = rng.gen_range(1..=3);
        let Ok(sample) = sample_near_pairs(space, c, n, 1, &mut rng) else {
            continue;
        };
        let r = check_quasiconvexity(space, c, &sample, n, delta.delta());
        pairs += r.pairs;
        discarded += r.discarded;
        violations += r.violations;
        if r.pairs > 0 {
            max_excess = max_excess.max((r.max_excess + n as i64) as f64 - r.bound);
        }
    }
    Ok(SuiteOutcome::new(
        Suite::Qc,
        violations == 0 && max_excess <= 0.0,
        json!({
            "delta": delta,
            "pairs": pairs,
            "discarded": discarded,
            "max_excess_over_bound": max_excess,
            "violations": violations,
        }),
    ))
}

/// Deep penetration on geodesics between members of one coset, with δ
/// floored at 4 and with the raw estimate.
pub fn deep(space: &CuspedGraph, params: &SuiteParams) -> Result<SuiteOutcome> {
    let delta = delta_estimate(space, params);
    let mut rng = rng(params, 4);
    let mut out = Vec::new();
    for (label, d) in [("floored", delta.delta().max(4.0)), ("raw", delta.delta())] {
        let (mut checked, mut short, mut vacuous, mut failed) = (0, 0, 0, 0);
        for c in sample_cosets(space, params.samples, &mut rng) {
            let m = &space.cosets[c].members;
            if m.len() < 2 {
                continue;
            }
            let (a, b) = (m[0], m[m.len() - 1]);
            let path = space.geodesic(a, b)?.vertices;
            match check_deep_penetration(space, c, &path, 0, d) {
                Ok(r) if r.vacuous => vacuous += 1,
                Ok(r) => {
                    checked += 1;
                    failed += !r.holds as usize;
                }
                Err(Error::TooShort { .. }) => short += 1,
                Err(e) => return Err(e),
            }
        }
        out.push(json!({
            "mode": label,
            "delta_used": d,
            "checked": checked,
            "too_short": short,
            "vacuous": vacuous,
            "failed": failed,
        }));
    }
    let passed = out.iter().all(|r| r["failed"] == 0);
    Ok(SuiteOutcome::new(Suite::Deep, passed, json!({ "delta": delta, "runs": out })))
}

pub fn approx(space: &CuspedGraph, model: &GroupModel, params: &SuiteParams) -> Result<SuiteOutcome> {
    let delta = delta_estimate(space, params);
    let r = approx_inequality_check(space, model, params.samples.min(100), 2, delta.delta(), &mut rng(params, 5))?;
    Ok(SuiteOutcome::new(
        Suite::Approx,
        r.violations == 0 && r.max_excess <= 0.0,
        json!({ "delta": delta, "approx": r }),
    ))
}

pub fn equivariance(space: &CuspedGraph, model: &GroupModel, params: &SuiteParams) -> Result<SuiteOutcome> {
    let r = check_equivariance(space, model, params.samples.min(100), &mut rng(params, 6))?;
    Ok(SuiteOutcome::new(Suite::Equivariance, r.mismatches == 0 && r.checked > 0, json!(r)))
}

/// The largest resolution with a nonempty certified sphere.
pub fn net_resolution(space: &CuspedGraph) -> u32 {
    let mut t = 1;
    while !certified_sphere(space, t + 1).is_empty() {
        t += 1;
    }
    t
}

/// Canonical net at the top certified resolution, one ray per boundary
/// point.
pub fn boundary_net(space: &CuspedGraph, model: &GroupModel, delta: f64) -> Result<(u32, Vec<RayApprox>)> {
    let t = net_resolution(space);
    let net = canonical_net(space, t, delta)?;
    Ok((t, distinct_points(space, model, &net)?))
}

pub struct PvSetup {
    pub delta: DeltaReport,
    /// The δ the metric was built with; at least the estimate.
    pub delta_used: f64,
    pub resolution: u32,
    pub full_net: usize,
    pub metric: PiecewiseMetric,
}

pub fn pv_setup(space: &CuspedGraph, model: &GroupModel, params: &SuiteParams, size: usize) -> Result<PvSetup> {
    pv_setup_with(space, model, params, size, delta_estimate(space, params), 0.0)
}

/// As [`pv_setup`] with a known estimate, raised to `floor` if smaller.
pub fn pv_setup_with(
    space: &CuspedGraph,
    model: &GroupModel,
    params: &SuiteParams,
    size: usize,
    delta: DeltaReport,
    floor: f64,
) -> Result<PvSetup> {
    let used = delta.delta().max(floor);
    let (t, net) = boundary_net(space, model, used)?;
    let metric = PiecewiseMetric::new(
        space,
        model,
        &thin_net(&net, size),
        used,
        VisualMetricSpec::new(params.epsilon),
    )?;
    Ok(PvSetup {
        delta,
        delta_used: used,
        resolution: t,
        full_net: net.len(),
        metric,
    })
}

fn pv_header(s: &PvSetup) -> Value {
    json!({
        "delta": s.delta,
        "delta_used": s.delta_used,
        "resolution": s.resolution,
        "full_net": s.full_net,
        "points": s.metric.net_len,
        "cut_points": s.metric.cut_points(),
        "k1": s.metric.visual.k1,
        "k2": s.metric.visual.k2,
        "diameter": s.metric.diameter,
        "tail_constants": "fitted k1, k2 and measured diameter: the intervals are empirical, not certified",
    })
}

fn pv_matrices(s: &PvSetup, iv: &[Vec<crate::pvmetric::MetricInterval>]) -> Vec<(String, String)> {
    let n = s.metric.net_len;
    let dv: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| s.metric.d_v(i, j)).collect()).collect();
    let upper: Vec<Vec<f64>> = iv.iter().map(|r| r.iter().map(|m| m.upper).collect()).collect();
    vec![
        ("d_v.csv".into(), matrix_to_csv(&dv)),
        ("d_l_lower.csv".into(), matrix_to_csv(&lower_matrix(iv))),
        ("d_l_upper.csv".into(), matrix_to_csv(&upper)),
    ]
}

pub fn metric_axioms(space: &CuspedGraph, model: &GroupModel, params: &SuiteParams) -> Result<SuiteOutcome> {
    let s = pv_setup(space, model, params, params.net)?;
    let iv = s.metric.all_pairs(None);
    let r = metric_axiom_check(&s.metric, &iv);
    let pairs: Vec<(RayApprox, RayApprox)> = (0..s.metric.net_len)
        .flat_map(|i| (i + 1..s.metric.net_len).map(move |j| (i, j)))
        .map(|(i, j)| (s.metric.points[i].clone(), s.metric.points[j].clone()))
        .collect();
    let separate = separate_check(space, &pairs, s.delta.delta())?;
    let d01 = d01_check(space, &s.metric);
    let passed = r.symmetry_violations == 0
        && r.triangle_violations == 0
        && r.positivity_violations == 0
        && r.same_set_mismatches == 0
        && separate.violations == 0
        && d01.violations == 0;
    let mut out = SuiteOutcome::new(
        Suite::MetricAxioms,
        passed,
        json!({ "setup": pv_header(&s), "axioms": r, "separate": separate, "d01": d01 }),
    );
    out.matrices = pv_matrices(&s, &iv);
    Ok(out)
}

/// `d_L <= N d_V^{1/4}` at this resolution and one radius up, with a
/// shared δ.
pub fn holder(space: &CuspedGraph, model: &GroupModel, params: &SuiteParams) -> Result<SuiteOutcome> {
    let bigger = CuspedGraph::build_with_budget(model, space.radius + 1, space.max_depth, params.budget)?;
    let (d1, d2) = (delta_estimate(space, params), delta_estimate(&bigger, params));
    // both estimates bound the same δ from below
    let shared = d1.delta().max(d2.delta());
    let s = pv_setup_with(space, model, params, params.net, d1, shared)?;
    let iv = s.metric.all_pairs(None);
    let here = holder_modulus_check(&s.metric, &iv);
    let s2 = pv_setup_with(&bigger, model, params, params.net, d2, shared)?;
    let there = holder_modulus_check(&s2.metric, &s2.metric.all_pairs(None));
    let stable = modulus_stable(here.n_hat, there.n_hat);
    let passed = here.visual_violations == 0 && there.visual_violations == 0 && stable;
    let mut out = SuiteOutcome::new(
        Suite::Holder,
        passed,
        json!({
            "setup": pv_header(&s),
            "modulus": here,
            "next_radius": { "setup": pv_header(&s2), "modulus": there },
            "stable": stable,
        }),
    );
    out.matrices = pv_matrices(&s, &iv);
    Ok(out)
}

/// Linear connectedness of `d_L` on the net and on a net twice as large,
/// with the circle as a calibration fixture.
pub fn linconn(space: &CuspedGraph, model: &GroupModel, params: &SuiteParams) -> Result<SuiteOutcome> {
    let mut runs = Vec::new();
    let mut k = Vec::new();
    for size in [params.net, 2 * params.net] {
        let s = pv_setup(space, model, params, size)?;
        let r = linear_connectedness_check(&lower_matrix(&s.metric.all_pairs(None)), None)?;
        k.push(r.k_hat);
        runs.push(json!({
            "setup": pv_header(&s),
            "k_hat": r.k_hat,
            "eps_chain": r.eps_chain,
            "mesh": r.mesh,
            "pairs": r.pairs.len(),
        }));
    }
    let circle = linear_connectedness_check(&circle_metric(256), None)?;
    let circle_ok = circle.k_hat <= 1.0 + 2.0 * (2.0 * std::f64::consts::PI / 256.0);
    let stable = modulus_stable(k[0], k[1]);
    Ok(SuiteOutcome::new(
        Suite::Linconn,
        stable && circle_ok,
        json!({
            "runs": runs,
            "refinement_stable": stable,
            "circle": { "points": 256, "k_hat": circle.k_hat, "within_discretization": circle_ok },
            "metric": "d_L lower end (partial sums)",
        }),
    ))
}

pub fn e1(k_max: u32, _params: &SuiteParams) -> SuiteOutcome {
    let r = e1_fixture(k_max, 2000);
    let passed = r.rows.iter().all(|row| row.holds && row.chord_rel_error < 1e-12 && row.diameter_rel_error < 1e-12)
        && r.growth >= 2.0;
    SuiteOutcome::new(
        Suite::E1Fixture,
        passed,
        json!({ "expected": "not linearly connected: ratios grow with k", "e1": r }),
    )
}

pub fn doubling(space: &CuspedGraph, model: &GroupModel, params: &SuiteParams) -> Result<SuiteOutcome> {
    let s = pv_setup(space, model, params, params.net)?;
    let m = lower_matrix(&s.metric.all_pairs(None));
    let scale = m.iter().flatten().copied().fold(0.0, f64::max);
    let radii: Vec<f64> = (1..=4).map(|k| scale / (1 << k) as f64).collect();
    let r = doubling_estimate(&m, &radii);
    let circle = doubling_estimate(&circle_metric(128), &[0.1, 0.5, 1.0, 2.0]);
    Ok(SuiteOutcome::new(
        Suite::Doubling,
        circle.max_count <= 5,
        json!({
            "setup": pv_header(&s),
            "d_l": r,
            "circle": circle,
            "note": "exploratory: whether d_L is doubling is open",
        }),
    ))
}
