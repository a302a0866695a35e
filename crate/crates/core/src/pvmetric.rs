//! The piecewise visual metric `d_L` on the boundary, with truncation
//! intervals, and the checks run against it.

use crate::boundary::{chain_metric, product_matrix, ChainMetric, RayApprox, VisualMetricSpec};
use crate::cusped::CuspedGraph;
use crate::error::{Error, Result};
use crate::graph::UNREACHED;
use crate::group::amalgam::Factor;
use crate::group::GroupModel;
use crate::hyperbolicity::{ideal_internal_points, translate, DistanceTable, Space};
use crate::splitting::{cut_point_sequence, terminal_node, vertex_path, CosetIndex, CutPointSequence, SequenceKind, TreeNode};
use crate::word::Letter;
use crate::{par, Half};
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;
use std::f64::consts::PI;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MetricInterval {
    pub lower: f64,
    pub upper: f64,
    pub tail_bound: f64,
    pub terms_used: usize,
    /// The tail bound exceeds the partial sum.
    pub unresolved: bool,
}

impl MetricInterval {
    fn exact(value: f64, terms_used: usize) -> Self {
        MetricInterval {
            lower: value,
            upper: value,
            tail_bound: 0.0,
            terms_used,
            unresolved: false,
        }
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn contains(&self, v: f64) -> bool {
        self.lower <= v && v <= self.upper
    }
}

/// A pair's cut points as indices into the point set, ordered from the
/// lower-index ray to the higher one.
#[derive(Clone, Debug)]
struct Route {
    cuts: Vec<usize>,
    depths: Vec<u32>,
    kind: SequenceKind,
    sequence: CutPointSequence,
}

/// `d_V` on a net extended by the cut points of all its pairs, and the
/// cut-point sequences needed to sum `d_L`.
pub struct PiecewiseMetric {
    /// Net rays first, then one ray per cut coset.
    pub points: Vec<RayApprox>,
    pub net_len: usize,
    pub products: Vec<Vec<Option<Half>>>,
    pub visual: ChainMetric,
    pub delta: f64,
    pub spec: VisualMetricSpec,
    /// Largest `d_V` among the points; bounds both factor diameters.
    pub diameter: f64,
    /// Point index standing for each net point: net rays ending in an
    /// edge horoball are that coset's parabolic point.
    pub alias: Vec<usize>,
    cut_of_coset: HashMap<usize, usize>,
    routes: HashMap<(usize, usize), Route>,
}

/// The edge coset a ray ends at in the tree, if its terminal is an edge.
fn edge_coset_of(space: &CuspedGraph, model: &GroupModel, index: &CosetIndex, ray: &RayApprox) -> Result<Option<usize>> {
    Ok(match terminal_node(space, model, ray)?.0 {
        TreeNode::Edge(k) => index.get(&k),
        _ => None,
    })
}

/// Drops net rays that end in the horoball of an edge coset already
/// represented, so distinct entries are distinct boundary points.
pub fn distinct_points(space: &CuspedGraph, model: &GroupModel, net: &[RayApprox]) -> Result<Vec<RayApprox>> {
    let index = CosetIndex::new(space, model)?;
    let mut seen = std::collections::HashSet::new();
    let mut out = Vec::new();
    for r in net {
        if edge_coset_of(space, model, &index, r)?.map_or(true, |c| seen.insert(c)) {
            out.push(r.clone());
        }
    }
    Ok(out)
}

/// Geodesic from the basepoint to `q` followed by the vertical ray down
/// the horoball of coset `c`.
pub fn cut_ray(space: &CuspedGraph, c: usize, q: u32, from_base: &[u32]) -> Result<RayApprox> {
    let mut vertices = space.graph().geodesic_with(space.basepoint(), q, from_base)?;
    vertices.extend((1..=space.max_depth).filter_map(|k| space.horoball_vertex(c, q, k)));
    Ok(RayApprox::new(vertices))
}

impl PiecewiseMetric {
    pub fn new(
        space: &CuspedGraph,
        model: &GroupModel,
        net: &[RayApprox],
        delta: f64,
        spec: VisualMetricSpec,
    ) -> Result<Self> {
        if net.is_empty() {
            return Err(Error::EmptyNet);
        }
        let index = CosetIndex::new(space, model)?;
        let n = net.len();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        let sequences = par::map(&pairs, |&(i, j)| cut_point_sequence(space, model, &net[i], &net[j], &index));
        let from_base = space.bfs(space.basepoint());
        let mut points = net.to_vec();
        let mut cut_of_coset: HashMap<usize, usize> = HashMap::new();
        let mut routes = HashMap::new();
        let mut alias: Vec<usize> = (0..n).collect();
        for (i, r) in net.iter().enumerate() {
            if let Some(c) = edge_coset_of(space, model, &index, r)? {
                if !cut_of_coset.contains_key(&c) {
                    let q = space.closest_point(c, &from_base);
                    points.push(cut_ray(space, c, q, &from_base)?);
                    cut_of_coset.insert(c, points.len() - 1);
                }
                alias[i] = cut_of_coset[&c];
            }
        }
        for (&(i, j), seq) in pairs.iter().zip(sequences) {
            let seq = seq?;
            let mut cuts = Vec::new();
            let mut depths = Vec::new();
            for cp in &seq.points {
                let (Some(c), Some(q), Some(d)) = (cp.coset, cp.q, cp.dist_to_base) else {
                    return Err(Error::Contaminated("cut coset outside the ball".into()));
                };
                let slot = match cut_of_coset.get(&c) {
                    Some(&s) => s,
                    None => {
                        points.push(cut_ray(space, c, q, &from_base)?);
                        cut_of_coset.insert(c, points.len() - 1);
                        points.len() - 1
                    }
                };
                cuts.push(slot);
                depths.push(d);
            }
            routes.insert(
                (i, j),
                Route {
                    cuts,
                    depths,
                    kind: seq.kind,
                    sequence: seq,
                },
            );
        }
        let products = product_matrix(space, &points);
        let visual = chain_metric(&products, &spec)?;
        let diameter = visual
            .distance
            .iter()
            .flatten()
            .copied()
            .filter(|d| d.is_finite())
            .fold(0.0, f64::max);
        Ok(PiecewiseMetric {
            points,
            net_len: n,
            products,
            visual,
            delta,
            spec,
            diameter,
            alias,
            cut_of_coset,
            routes,
        })
    }

    /// Visual distance between points, net indices read through `alias`.
    pub fn d_v(&self, i: usize, j: usize) -> f64 {
        self.visual.distance[self.at(i)][self.at(j)]
    }

    pub fn product(&self, i: usize, j: usize) -> Option<Half> {
        self.products[self.at(i)][self.at(j)]
    }

    fn at(&self, k: usize) -> usize {
        if k < self.net_len {
            self.alias[k]
        } else {
            k
        }
    }

    pub fn cut_points(&self) -> usize {
        self.cut_of_coset.len()
    }

    pub fn sequence(&self, i: usize, j: usize) -> Option<&CutPointSequence> {
        self.routes.get(&(i.min(j), i.max(j))).map(|r| &r.sequence)
    }

    /// Cut points from `i` towards `j` with their basepoint distances and
    /// which ends are ideal.
    fn oriented(&self, i: usize, j: usize) -> (Vec<usize>, Vec<u32>, bool, bool) {
        let r = &self.routes[&(i.min(j), i.max(j))];
        let (mut cuts, mut depths) = (r.cuts.clone(), r.depths.clone());
        let (mut ix, mut iy) = match r.kind {
            SequenceKind::Finite => (false, false),
            SequenceKind::IdealX => (true, false),
            SequenceKind::IdealY => (false, true),
            SequenceKind::BiInfinite => (true, true),
        };
        if i > j {
            cuts.reverse();
            depths.reverse();
            std::mem::swap(&mut ix, &mut iy);
        }
        (cuts, depths, ix, iy)
    }

    /// Both net points lie in one vertex-group limit set.
    pub fn same_limit_set(&self, i: usize, j: usize) -> bool {
        i == j || self.routes[&(i.min(j), i.max(j))].cuts.is_empty()
    }

    /// The tail certificate for the terms beyond a computed cut point at
    /// distance `dq` from the basepoint: compared diameters shrink by
    /// `e^{-eps d(*,q)}`, and the distances strictly increase.
    pub fn tail_bound(&self, dq: u32) -> f64 {
        let eps = self.spec.epsilon;
        let k = self.visual.k2 / self.visual.k1;
        k * (eps * (26.0 * self.delta + 12.0)).exp() * self.diameter * (-eps * dq as f64).exp() / (1.0 - (-eps).exp())
    }

    /// `d_L` between net points `i` and `j`, keeping at most `terms` cut
    /// points on each ideal side.
    pub fn interval(&self, i: usize, j: usize, terms: Option<usize>) -> MetricInterval {
        if i == j {
            return MetricInterval::exact(0.0, 0);
        }
        let (cuts, depths, ideal_x, ideal_y) = self.oriented(i, j);
        if cuts.is_empty() {
            return MetricInterval::exact(self.d_v(i, j), 1);
        }
        let len = cuts.len();
        let (lo, hi) = match (terms.map(|t| t.max(1)), ideal_x, ideal_y) {
            (None, _, _) | (_, false, false) => (0, len),
            (Some(t), true, false) => (len.saturating_sub(t), len),
            (Some(t), false, true) => (0, t.min(len)),
            (Some(t), true, true) => {
                let centre = (0..len).min_by_key(|&k| (depths[k], k)).unwrap();
                (centre.saturating_sub(t), (centre + t + 1).min(len))
            }
        };
        let kept = &cuts[lo..hi];
        let mut values = Vec::with_capacity(kept.len() + 1);
        if !ideal_x {
            values.push(self.d_v(i, kept[0]));
        }
        values.extend(kept.windows(2).map(|w| self.d_v(w[0], w[1])));
        if !ideal_y {
            values.push(self.d_v(kept[kept.len() - 1], j));
        }
        // summing in sorted order makes the value independent of direction
        values.sort_by(f64::total_cmp);
        let partial = values.iter().fold(0.0, |a, b| a + b);
        let mut tail = 0.0;
        if ideal_x {
            tail += self.tail_bound(depths[lo]);
        }
        if ideal_y {
            tail += self.tail_bound(depths[hi - 1]);
        }
        MetricInterval {
            lower: partial,
            upper: partial + tail,
            tail_bound: tail,
            terms_used: values.len(),
            unresolved: tail > partial,
        }
    }

    /// Number of cut points on the ideal sides of a pair, `(x side, y side)`.
    pub fn ideal_depth(&self, i: usize, j: usize) -> (usize, usize) {
        let (cuts, depths, ix, iy) = self.oriented(i, j);
        if cuts.is_empty() {
            return (0, 0);
        }
        let centre = (0..cuts.len()).min_by_key(|&k| (depths[k], k)).unwrap();
        match (ix, iy) {
            (true, true) => (centre, cuts.len() - 1 - centre),
            (true, false) => (cuts.len(), 0),
            (false, true) => (0, cuts.len()),
            _ => (0, 0),
        }
    }

    /// All-pairs intervals over the net.
    pub fn all_pairs(&self, terms: Option<usize>) -> Vec<Vec<MetricInterval>> {
        let n = self.net_len;
        par::map_range(n, |i| (0..n).map(|j| self.interval(i, j, terms)).collect())
    }
}

pub fn lower_matrix(intervals: &[Vec<MetricInterval>]) -> Vec<Vec<f64>> {
    intervals.iter().map(|row| row.iter().map(|m| m.lower).collect()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AxiomReport {
    pub points: usize,
    pub triples: usize,
    pub symmetry_violations: usize,
    pub triangle_violations: usize,
    pub positivity_violations: usize,
    pub same_set_pairs: usize,
    /// Same-limit-set pairs whose interval is not exactly `d_V`.
    pub same_set_mismatches: usize,
    /// Least `upper(x,y) + upper(y,z) - lower(x,z)`.
    pub triangle_margin: f64,
    pub unresolved_pairs: usize,
}

pub fn metric_axiom_check(pm: &PiecewiseMetric, intervals: &[Vec<MetricInterval>]) -> AxiomReport {
    let n = intervals.len();
    let mut r = AxiomReport {
        points: n,
        triples: 0,
        symmetry_violations: 0,
        triangle_violations: 0,
        positivity_violations: 0,
        same_set_pairs: 0,
        same_set_mismatches: 0,
        triangle_margin: f64::INFINITY,
        unresolved_pairs: 0,
    };
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            if intervals[i][j] != intervals[j][i] {
                r.symmetry_violations += 1;
            }
            if i < j {
                // a truncated sum may start at 0; only the upper end refutes
                if intervals[i][j].upper <= 0.0 {
                    r.positivity_violations += 1;
                }
                if intervals[i][j].unresolved {
                    r.unresolved_pairs += 1;
                }
                if pm.same_limit_set(i, j) {
                    r.same_set_pairs += 1;
                    if intervals[i][j].width() != 0.0 || intervals[i][j].lower != pm.d_v(i, j) {
                        r.same_set_mismatches += 1;
                    }
                }
            }
        }
    }
    for x in 0..n {
        for y in 0..n {
            for z in 0..n {
                if x == y || y == z || x == z {
                    continue;
                }
                r.triples += 1;
                let margin = intervals[x][y].upper + intervals[y][z].upper - intervals[x][z].lower;
                r.triangle_margin = r.triangle_margin.min(margin);
                if margin < -1e-12 * intervals[x][z].lower.max(1.0) {
                    r.triangle_violations += 1;
                }
            }
        }
    }
    r
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModulusReport {
    pub pairs: usize,
    /// `max d_L.upper / d_V^{1/4}`.
    pub n_hat: f64,
    /// Pairs with `d_V > d_L.upper`.
    pub visual_violations: usize,
}

pub fn holder_modulus_check(pm: &PiecewiseMetric, intervals: &[Vec<MetricInterval>]) -> ModulusReport {
    let n = intervals.len();
    let mut r = ModulusReport {
        pairs: 0,
        n_hat: 0.0,
        visual_violations: 0,
    };
    for i in 0..n {
        for j in i + 1..n {
            let dv = pm.d_v(i, j);
            let up = intervals[i][j].upper;
            r.pairs += 1;
            if dv > up * (1.0 + 1e-12) {
                r.visual_violations += 1;
            }
            r.n_hat = r.n_hat.max(up / dv.powf(0.25));
        }
    }
    r
}

/// Two fitted moduli agree within a factor of two.
pub fn modulus_stable(a: f64, b: f64) -> bool {
    a.is_finite() && b.is_finite() && a > 0.0 && b > 0.0 && a.max(b) <= 2.0 * a.min(b)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PairChain {
    pub i: usize,
    pub j: usize,
    pub distance: f64,
    pub diameter: f64,
    pub ratio: f64,
    pub hops: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LinConnReport {
    pub pairs: Vec<PairChain>,
    pub k_hat: f64,
    pub eps_chain: f64,
    pub mesh: f64,
}

/// Largest nearest-neighbour distance, and the least threshold making the
/// proximity graph connected.
pub fn chain_scales(metric: &[Vec<f64>]) -> (f64, f64) {
    let n = metric.len();
    let mut mesh: f64 = 0.0;
    for i in 0..n {
        let nn = (0..n).filter(|&j| j != i).map(|j| metric[i][j]).fold(f64::INFINITY, f64::min);
        if nn.is_finite() {
            mesh = mesh.max(nn);
        }
    }
    // Prim's bottleneck
    let mut best = vec![f64::INFINITY; n];
    let mut done = vec![false; n];
    let mut bottleneck: f64 = 0.0;
    if n > 0 {
        best[0] = 0.0;
    }
    for _ in 0..n {
        let v = (0..n).filter(|&v| !done[v]).min_by(|&a, &b| best[a].total_cmp(&best[b])).unwrap();
        done[v] = true;
        bottleneck = bottleneck.max(best[v]);
        for w in 0..n {
            if !done[w] {
                best[w] = best[w].min(metric[v][w]);
            }
        }
    }
    (mesh, bottleneck)
}

struct Dsu {
    parent: Vec<usize>,
    members: Vec<Vec<usize>>,
}

impl Dsu {
    fn find(&mut self, mut v: usize) -> usize {
        while self.parent[v] != v {
            self.parent[v] = self.parent[self.parent[v]];
            v = self.parent[v];
        }
        v
    }
}

/// For each pair, a chain over the `eps_chain` proximity graph inside the
/// least ball about one end that connects them; reports chain diameters
/// over the distance.
pub fn linear_connectedness_check(metric: &[Vec<f64>], eps_chain: Option<f64>) -> Result<LinConnReport> {
    let n = metric.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let (mesh, bottleneck) = chain_scales(metric);
    let eps = eps_chain.unwrap_or((2.0 * mesh).max(bottleneck));
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| j != i && metric[i][j] <= eps).collect())
        .collect();
    let rows: Vec<Result<Vec<PairChain>>> = par::map_range(n, |x| {
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| metric[x][a].total_cmp(&metric[x][b]).then(a.cmp(&b)));
        let mut rank = vec![0; n];
        for (k, &v) in order.iter().enumerate() {
            rank[v] = k;
        }
        // rank of the last point added when each point joined x's component
        let mut joined = vec![usize::MAX; n];
        let mut dsu = Dsu {
            parent: (0..n).collect(),
            members: (0..n).map(|v| vec![v]).collect(),
        };
        for (k, &p) in order.iter().enumerate() {
            for &w in &adj[p] {
                if rank[w] > k {
                    continue;
                }
                let (a, b) = (dsu.find(p), dsu.find(w));
                if a == b {
                    continue;
                }
                let (big, small) = if dsu.members[a].len() >= dsu.members[b].len() { (a, b) } else { (b, a) };
                let moved = std::mem::take(&mut dsu.members[small]);
                dsu.parent[small] = big;
                dsu.members[big].extend(moved);
            }
            let root = dsu.find(x);
            for &m in &dsu.members[root] {
                if joined[m] == usize::MAX {
                    joined[m] = k;
                }
            }
        }
        let mut out = Vec::new();
        for y in x + 1..n {
            if joined[y] == usize::MAX {
                return Err(Error::Disconnected(x, y));
            }
            let limit = joined[y];
            let mut prev = vec![usize::MAX; n];
            prev[x] = x;
            let mut queue = std::collections::VecDeque::from([x]);
            while let Some(v) = queue.pop_front() {
                if v == y {
                    break;
                }
                for &w in &adj[v] {
                    if rank[w] <= limit && prev[w] == usize::MAX {
                        prev[w] = v;
                        queue.push_back(w);
                    }
                }
            }
            let mut path = vec![y];
            while *path.last().unwrap() != x {
                path.push(prev[*path.last().unwrap()]);
            }
            let mut diameter: f64 = 0.0;
            for a in 0..path.len() {
                for b in a + 1..path.len() {
                    diameter = diameter.max(metric[path[a]][path[b]]);
                }
            }
            let d = metric[x][y];
            out.push(PairChain {
                i: x,
                j: y,
                distance: d,
                diameter,
                ratio: if d > 0.0 { diameter / d } else { 1.0 },
                hops: path.len() - 1,
            });
        }
        Ok(out)
    });
    let mut pairs = Vec::new();
    for r in rows {
        pairs.extend(r?);
    }
    let k_hat = pairs.iter().map(|p| p.ratio).fold(0.0, f64::max);
    Ok(LinConnReport {
        pairs,
        k_hat,
        eps_chain: eps,
        mesh,
    })
}

/// Chordal metric on `n` equally spaced points of the unit circle.
pub fn circle_metric(n: usize) -> Vec<Vec<f64>> {
    let p: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / n as f64;
            (t.cos(), t.sin())
        })
        .collect();
    p.iter()
        .map(|a| p.iter().map(|b| (a.0 - b.0).hypot(a.1 - b.1)).collect())
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct E1Row {
    pub k: u32,
    /// `|P_k P_{k+1}|` with `P_k = (x_k, f(x_k))`.
    pub chord: f64,
    /// `2 (x_k - x_{k+1})`.
    pub chord_bound: f64,
    pub chord_formula: f64,
    pub chord_rel_error: f64,
    /// Diameter of the sampled arc from `P_{k+1}` to `P_k`.
    pub diameter: f64,
    /// `2 x_{k+1}`.
    pub diameter_bound: f64,
    pub diameter_formula: f64,
    pub diameter_rel_error: f64,
    pub ratio: f64,
    pub ratio_bound: f64,
    pub holds: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct E1Report {
    pub rows: Vec<E1Row>,
    /// Last ratio over the first.
    pub growth: f64,
}

/// The graph of `x sin(1/x)` near 0: the arc between consecutive peaks
/// `x_k = 2/((4k+1)pi)` has diameter far above the chord joining them.
pub fn e1_fixture(k_max: u32, samples: usize) -> E1Report {
    let f = |x: f64| x * (1.0 / x).sin();
    let xk = |k: u32| 2.0 / ((4 * k + 1) as f64 * PI);
    let yk = |k: u32| 2.0 / ((4 * k + 3) as f64 * PI);
    let rows: Vec<E1Row> = par::map_range(k_max as usize, |i| {
        let k = i as u32 + 1;
        let (a, b) = (xk(k + 1), xk(k));
        let chord = (b - a).hypot(f(b) - f(a));
        let chord_bound = 2.0 * (b - a);
        let chord_formula = 16.0 / (PI * ((4 * k + 1) * (4 * k + 5)) as f64);
        let diameter_bound = 2.0 * a;
        let diameter_formula = 4.0 / ((4 * k + 5) as f64 * PI);
        // samples uniform in 1/x, with the trough y_k included
        let (ua, ub) = (1.0 / a, 1.0 / b);
        let mut pts: Vec<(f64, f64)> = (0..=samples)
            .map(|s| 1.0 / (ub + (ua - ub) * s as f64 / samples as f64))
            .chain([a, b, yk(k)])
            .map(|x| (x, f(x)))
            .collect();
        pts.sort_by(|p, q| p.0.total_cmp(&q.0));
        let mut diameter: f64 = 0.0;
        for p in 0..pts.len() {
            for q in p + 1..pts.len() {
                diameter = diameter.max((pts[p].0 - pts[q].0).hypot(pts[p].1 - pts[q].1));
            }
        }
        let ratio = diameter / chord;
        let ratio_bound = (4 * k + 1) as f64 / 4.0;
        E1Row {
            k,
            chord,
            chord_bound,
            chord_formula,
            chord_rel_error: (chord_bound - chord_formula).abs() / chord_formula,
            diameter,
            diameter_bound,
            diameter_formula,
            diameter_rel_error: (diameter_bound - diameter_formula).abs() / diameter_formula,
            ratio,
            ratio_bound,
            holds: chord <= chord_bound && diameter >= diameter_bound && ratio >= ratio_bound,
        }
    });
    let growth = match (rows.first(), rows.last()) {
        (Some(a), Some(b)) => b.ratio / a.ratio,
        _ => 1.0,
    };
    E1Report { rows, growth }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DoublingReport {
    /// `(radius, worst greedy cover count)`.
    pub per_radius: Vec<(f64, usize)>,
    pub max_count: usize,
}

/// Greedy covers of every ball `B(x, r)` by net-centred balls of radius
/// `r/2`.
pub fn doubling_estimate(metric: &[Vec<f64>], radii: &[f64]) -> DoublingReport {
    let n = metric.len();
    let per_radius: Vec<(f64, usize)> = radii
        .iter()
        .map(|&r| {
            let counts = par::map_range(n, |x| {
                let mut open: Vec<usize> = (0..n).filter(|&p| metric[x][p] <= r).collect();
                let mut count = 0;
                while !open.is_empty() {
                    let c = (0..n)
                        .max_by_key(|&c| (open.iter().filter(|&&u| metric[c][u] <= r / 2.0).count(), usize::MAX - c))
                        .unwrap();
                    open.retain(|&u| metric[c][u] > r / 2.0);
                    count += 1;
                }
                count
            });
            (r, counts.into_iter().max().unwrap_or(0))
        })
        .collect();
    let max_count = per_radius.iter().map(|p| p.1).max().unwrap_or(0);
    DoublingReport { per_radius, max_count }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ApproxReport {
    pub samples: usize,
    pub discarded: usize,
    pub bound: f64,
    /// Largest `|(a1.a2)_* - d(*,q) - (a1.a2)_q|`.
    pub max_deviation: f64,
    pub max_excess: f64,
    pub violations: usize,
}

fn random_factor_word<R: Rng>(letters: &[Letter], len: usize, rng: &mut R) -> Vec<Letter> {
    let mut w: Vec<Letter> = Vec::with_capacity(len);
    while w.len() < len {
        let l = letters[rng.gen_range(0..letters.len())];
        if w.last() != Some(&l.inverse()) {
            w.push(l);
        }
    }
    w
}

/// Samples an edge coset `qC` beyond the root with `q` its closest point
/// (close enough to `*` that the samples stay in the ball), and two points `q w1`, `q w2` of the vertex coset `qA` across it;
/// compares the products seen from `*` and from `q`.
pub fn approx_inequality_check<R: Rng>(
    space: &CuspedGraph,
    model: &GroupModel,
    samples: usize,
    word_len: usize,
    delta: f64,
    rng: &mut R,
) -> Result<ApproxReport> {
    let index = CosetIndex::new(space, model)?;
    let from_base = space.bfs(space.basepoint());
    let mut cosets: Vec<usize> = index
        .cosets()
        .filter(|&c| {
            let q = space.closest_point(c, &from_base);
            if from_base[q as usize] as usize + word_len >= space.radius as usize {
                return false;
            }
            let nf = &space.ball.normal_forms[q as usize];
            match vertex_path(model, nf, Factor::A) {
                Ok(p) => p.len() >= 2 && p[p.len() - 2] == TreeNode::Edge(space.cosets[c].key.clone()) && !nf.is_empty(),
                Err(_) => false,
            }
        })
        .collect();
    cosets.sort_unstable();
    if cosets.is_empty() {
        return Err(Error::SampleExhausted("no edge coset beyond the root".into()));
    }
    let letters: Vec<Letter> = (0..2 * model.rank() as u32)
        .map(Letter::from_rank)
        .filter(|&l| model.letter_factor(l) == Some(Factor::A))
        .collect();
    let bound = 26.0 * delta + 12.0;
    let mut r = ApproxReport {
        samples: 0,
        discarded: 0,
        bound,
        max_deviation: 0.0,
        max_excess: f64::NEG_INFINITY,
        violations: 0,
    };
    let mut attempts = 0;
    while r.samples < samples {
        attempts += 1;
        if attempts > 50 * samples {
            return Err(Error::SampleExhausted(format!("{} approx samples", r.samples)));
        }
        let c = cosets[rng.gen_range(0..cosets.len())];
        let q = space.closest_point(c, &from_base);
        let nf = space.ball.normal_forms[q as usize].clone();
        let mut ends = Vec::new();
        for _ in 0..2 {
            let w = random_factor_word(&letters, word_len, rng);
            let g: Vec<Letter> = nf.iter().copied().chain(w).collect();
            ends.push(translate(space, model, &g, space.basepoint())?);
        }
        let (Some(a1), Some(a2)) = (ends[0], ends[1]) else {
            r.discarded += 1;
            continue;
        };
        if a1 == a2 {
            r.discarded += 1;
            continue;
        }
        let from_a1 = space.bfs(a1);
        let from_q = space.bfs(q);
        let base = space.basepoint();
        let d = |row: &[u32], v: u32| row[v as usize];
        let quantities = [
            (base, a1, d(&from_base, a1)),
            (base, a2, d(&from_base, a2)),
            (a1, a2, d(&from_a1, a2)),
            (q, a1, d(&from_q, a1)),
            (q, a2, d(&from_q, a2)),
        ];
        if quantities.iter().any(|&(u, v, dd)| dd == UNREACHED || !space.certified(u, v, dd)) {
            r.discarded += 1;
            continue;
        }
        let [b1, b2, d12, q1, q2] = quantities.map(|t| t.2 as i64);
        let at_base = Half::gromov(b1, b2, d12).to_f64();
        let at_q = Half::gromov(q1, q2, d12).to_f64();
        let dev = (at_base - from_base[q as usize] as f64 - at_q).abs();
        r.samples += 1;
        r.max_deviation = r.max_deviation.max(dev);
        r.max_excess = r.max_excess.max(dev - bound);
        if dev > bound {
            r.violations += 1;
        }
    }
    Ok(r)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SurrogateReport {
    pub checked: usize,
    pub discarded: usize,
    /// Least slack over the asserted inequality.
    pub min_margin: f64,
    pub violations: usize,
}

impl SurrogateReport {
    fn new() -> Self {
        SurrogateReport {
            checked: 0,
            discarded: 0,
            min_margin: f64::INFINITY,
            violations: 0,
        }
    }

    fn record(&mut self, margin: f64) {
        self.checked += 1;
        self.min_margin = self.min_margin.min(margin);
        if margin < 0.0 {
            self.violations += 1;
        }
    }
}

/// Points `b` of the line beyond the internal point towards `r`, at
/// distance `K`, stay at least `K - 2 delta` from the ray `s`.
pub fn separate_check<S: Space + ?Sized>(
    space: &S,
    pairs: &[(RayApprox, RayApprox)],
    delta: f64,
) -> Result<SurrogateReport> {
    let mut rep = SurrogateReport::new();
    for (r, s) in pairs {
        let tri = match ideal_internal_points(space, r, s, delta) {
            Ok(t) => t,
            Err(Error::Contaminated(_)) | Err(Error::RaysEquivalent) => {
                rep.discarded += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let j0 = tri.line.iter().position(|&v| v == tri.z).unwrap();
        let table = DistanceTable::new(space, &tri.line[..j0]);
        for k in 1..=j0 {
            let b = j0 - k;
            let mut nearest = u32::MAX;
            let mut certified = true;
            for &y in &s.vertices {
                let d = table.get(b, y);
                certified &= d != UNREACHED && space.certified(tri.line[b], y, d);
                nearest = nearest.min(d);
            }
            if !certified {
                rep.discarded += 1;
                continue;
            }
            rep.record(nearest as f64 - (k as f64 - 2.0 * delta));
        }
    }
    Ok(rep)
}

/// For net pairs whose rays meet the consecutive cut cosets around the
/// basepoint's vertex group at times `s0, s-1 >= m = (x1.x2)_*/2`, the cut
/// points' product is at least `m - 9 delta - 4`.
pub fn d01_check(space: &CuspedGraph, pm: &PiecewiseMetric) -> SurrogateReport {
    let mut rep = SurrogateReport::new();
    let first_entry = |ray: &RayApprox, c: usize| -> Option<usize> {
        ray.vertices.iter().position(|&v| space.coset_of_vertex(v) == Some(c))
    };
    let coset_of_point: HashMap<usize, usize> = pm.cut_of_coset.iter().map(|(&c, &p)| (p, c)).collect();
    for i in 0..pm.net_len {
        for j in i + 1..pm.net_len {
            let (cuts, _, _, _) = pm.oriented(i, j);
            let (ri, rj) = (&pm.points[i], &pm.points[j]);
            let Some(m) = pm.product(i, j) else {
                rep.discarded += 1;
                continue;
            };
            let m = m.to_f64() / 2.0;
            for w in cuts.windows(2) {
                let (cm1, c0) = (coset_of_point[&w[0]], coset_of_point[&w[1]]);
                let (Some(s_m1), Some(s_0)) = (first_entry(ri, cm1), first_entry(rj, c0)) else {
                    continue;
                };
                if (s_0 as f64) < m || (s_m1 as f64) < m {
                    continue;
                }
                match pm.product(w[0], w[1]) {
                    Some(p) => rep.record(p.to_f64() - (m - 9.0 * pm.delta - 4.0)),
                    None => rep.discarded += 1,
                }
            }
        }
    }
    rep
}

#[cfg(test)]
mod tests;
