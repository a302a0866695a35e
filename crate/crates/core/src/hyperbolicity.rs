//! Gromov products, four-point and thin-triangle estimates of δ, internal
//! points of finite and ideal triangles.

use crate::boundary::RayApprox;
use crate::cusped::CuspedGraph;
use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};
use crate::group::GroupModel;
use crate::horoball::HoroballGraph;
use crate::word::{mul, Letter, Word};
use crate::Half;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use std::collections::HashMap;

/// A finite graph whose distances may only be trusted under a certificate.
pub trait Space: Sync {
    fn graph(&self) -> &Graph;

    fn certified(&self, _x: u32, _y: u32, _d: u32) -> bool {
        true
    }

    fn depth(&self, _v: u32) -> u32 {
        0
    }

    fn max_depth(&self) -> u32 {
        0
    }

    /// Distance to the truncation frontier; unbounded for complete graphs.
    fn frontier(&self, _v: u32) -> u32 {
        u32::MAX
    }
}

impl Space for Graph {
    fn graph(&self) -> &Graph {
        self
    }
}

impl Space for HoroballGraph {
    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn depth(&self, v: u32) -> u32 {
        HoroballGraph::depth(self, v)
    }

    fn max_depth(&self) -> u32 {
        self.max_depth
    }
}

impl Space for CuspedGraph {
    fn graph(&self) -> &Graph {
        &self.graph
    }

    fn certified(&self, x: u32, y: u32, d: u32) -> bool {
        CuspedGraph::certified(self, x, y, d)
    }

    fn depth(&self, v: u32) -> u32 {
        self.depth[v as usize]
    }

    fn max_depth(&self) -> u32 {
        self.max_depth
    }

    fn frontier(&self, v: u32) -> u32 {
        self.frontier_distance[v as usize]
    }
}

/// BFS rows for a fixed list of sources.
pub struct DistanceTable {
    pub sources: Vec<u32>,
    rows: Vec<Vec<u32>>,
    index: HashMap<u32, usize>,
}

impl DistanceTable {
    pub fn new<S: Space + ?Sized>(space: &S, sources: &[u32]) -> Self {
        let rows = crate::par::map(sources, |&s| space.graph().bfs(s));
        let index = sources.iter().enumerate().map(|(i, &s)| (s, i)).collect();
        DistanceTable {
            sources: sources.to_vec(),
            rows,
            index,
        }
    }

    /// `d(a, b)`, from the table when `a` or `b` is a source.
    pub fn distance(&self, g: &Graph, a: u32, b: u32) -> u32 {
        if let Some(&i) = self.index.get(&a) {
            self.rows[i][b as usize]
        } else if let Some(&i) = self.index.get(&b) {
            self.rows[i][a as usize]
        } else {
            g.bfs(a)[b as usize]
        }
    }

    /// Distance from the `i`-th source to vertex `v`.
    pub fn get(&self, i: usize, v: u32) -> u32 {
        self.rows[i][v as usize]
    }

    pub fn row(&self, i: usize) -> &[u32] {
        &self.rows[i]
    }
}

pub fn gromov_product<S: Space + ?Sized>(space: &S, p: u32, x: u32, y: u32) -> Half {
    let from_p = space.graph().bfs(p);
    let from_x = space.graph().bfs(x);
    Half::gromov(from_p[x as usize] as i64, from_p[y as usize] as i64, from_x[y as usize] as i64)
}

/// Largest minus middle of the three pairings, halved. Equals the maximum
/// of `min{(x.z)_p, (z.y)_p} - (x.y)_p` over all labellings of the four
/// points.
pub fn four_point_value(dxy: u32, dzw: u32, dxz: u32, dyw: u32, dxw: u32, dyz: u32) -> Half {
    let mut s = [dxy as i64 + dzw as i64, dxz as i64 + dyw as i64, dxw as i64 + dyz as i64];
    s.sort_unstable();
    Half(s[2] - s[1])
}

/// Exhaustive four-point δ over all 4-subsets of `vertices`, using ambient
/// distances.
pub fn four_point_delta_exhaustive<S: Space + ?Sized>(space: &S, vertices: &[u32]) -> Half {
    let t = DistanceTable::new(space, vertices);
    let n = vertices.len();
    let d = |i: usize, j: usize| t.get(i, vertices[j]);
    let best = crate::par::max_range(n, 0, |i| {
        let mut m = 0i64;
        for j in i + 1..n {
            let dij = d(i, j);
            for k in j + 1..n {
                let (dik, djk) = (d(i, k), d(j, k));
                for l in k + 1..n {
                    let v = four_point_value(dij, d(k, l), dik, d(j, l), d(i, l), djk);
                    m = m.max(v.0);
                }
            }
        }
        m
    });
    Half(best)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeltaReport {
    pub delta_fourpoint: f64,
    pub delta_thin: f64,
    pub samples: usize,
    pub contaminated_discarded: usize,
    pub exhaustive: bool,
}

impl DeltaReport {
    /// Working constant δ̂ used by downstream checks.
    pub fn delta(&self) -> f64 {
        self.delta_fourpoint
    }
}

/// Up to `size` distinct vertices from the inner half of the space,
/// farthest from the truncation frontier first, half of them from the deep
/// half of the horoballs when there are any.
pub fn sample_pool<S: Space + ?Sized, R: Rng>(space: &S, size: usize, rng: &mut R) -> Vec<u32> {
    let n = space.graph().len() as u32;
    let far = (0..n).map(|v| space.frontier(v)).filter(|&f| f != UNREACHED && f != u32::MAX).max();
    let mut all: Vec<u32> = match far {
        Some(f) => (0..n).filter(|&v| space.frontier(v) >= f.div_ceil(2)).collect(),
        None => (0..n).collect(),
    };
    if all.len() <= size {
        return all;
    }
    all.shuffle(rng);
    all.sort_by_key(|&v| std::cmp::Reverse(space.frontier(v)));
    let half_depth = space.max_depth().div_ceil(2).max(1);
    let mut pool: Vec<u32> = all
        .iter()
        .copied()
        .filter(|&v| space.depth(v) >= half_depth)
        .take(size / 2)
        .collect();
    for &v in &all {
        if pool.len() == size {
            break;
        }
        if !pool.contains(&v) {
            pool.push(v);
        }
    }
    pool.sort_unstable();
    pool
}

/// Estimates δ. Graphs with at most `exhaustive_limit` vertices are treated
/// exhaustively; otherwise `samples` quadruples and triangles are drawn from
/// a biased pool.
pub fn estimate_delta<S: Space + ?Sized, R: Rng>(
    space: &S,
    samples: usize,
    exhaustive_limit: usize,
    rng: &mut R,
) -> DeltaReport {
    let n = space.graph().len();
    if n <= exhaustive_limit {
        let all: Vec<u32> = (0..n as u32).collect();
        let fp = four_point_delta_exhaustive(space, &all);
        let table = DistanceTable::new(space, &all);
        let mut triples = Vec::new();
        for x in 0..n as u32 {
            for y in x + 1..n as u32 {
                for z in y + 1..n as u32 {
                    triples.push((x, y, z));
                }
            }
        }
        let thin = thin_over(space, &table, &triples);
        return DeltaReport {
            delta_fourpoint: fp.to_f64(),
            delta_thin: thin.0,
            samples: triples.len(),
            contaminated_discarded: thin.1,
            exhaustive: true,
        };
    }
    let pool = sample_pool(space, 160.min(n), rng);
    let table = DistanceTable::new(space, &pool);
    let mut discarded = 0;
    let mut fp = 0i64;
    let mut triples = Vec::new();
    for _ in 0..samples {
        let q: Vec<usize> = rand::seq::index::sample(rng, pool.len(), 4).into_vec();
        let d = |a: usize, b: usize| table.get(q[a], pool[q[b]]);
        let pairs = [(0, 1), (2, 3), (0, 2), (1, 3), (0, 3), (1, 2)];
        if pairs.iter().any(|&(a, b)| {
            let v = d(a, b);
            v == UNREACHED || !space.certified(pool[q[a]], pool[q[b]], v)
        }) {
            discarded += 1;
            continue;
        }
        fp = fp.max(four_point_value(d(0, 1), d(2, 3), d(0, 2), d(1, 3), d(0, 3), d(1, 2)).0);
        triples.push((pool[q[0]], pool[q[1]], pool[q[2]]));
    }
    let thin = thin_over(space, &table, &triples);
    DeltaReport {
        delta_fourpoint: Half(fp).to_f64(),
        delta_thin: thin.0,
        samples,
        contaminated_discarded: discarded + thin.1,
        exhaustive: false,
    }
}

fn thin_over<S: Space + ?Sized>(space: &S, table: &DistanceTable, triples: &[(u32, u32, u32)]) -> (f64, usize) {
    let results = crate::par::map(triples, |&(x, y, z)| triangle_from_table(space, table, x, y, z));
    let mut worst = 0.0f64;
    let mut bad = 0;
    for r in results {
        match r {
            Ok(t) if t.certified => worst = worst.max(t.thinness),
            _ => bad += 1,
        }
    }
    (worst, bad)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TriangleData {
    pub corners: [u32; 3],
    /// Sides `[x,y]`, `[y,z]`, `[z,x]`, each a canonical geodesic.
    pub sides: [Vec<u32>; 3],
    /// Gromov products `(y.z)_x`, `(z.x)_y`, `(x.y)_z`.
    pub products: [Half; 3],
    /// `c_x` on `[y,z]`, `c_y` on `[z,x]`, `c_z` on `[x,y]`.
    pub internal: [u32; 3],
    pub insize: f64,
    /// Largest distance between points with the same image in the tripod.
    pub thinness: f64,
    /// Whether every distance used was certified exact.
    pub certified: bool,
}

pub fn internal_points<S: Space + ?Sized>(space: &S, x: u32, y: u32, z: u32) -> Result<TriangleData> {
    let table = DistanceTable::new(space, &[x, y, z]);
    triangle_from_table(space, &table, x, y, z)
}

fn row_of<'a>(table: &'a DistanceTable, v: u32, fallback: &'a mut Option<Vec<u32>>, g: &Graph) -> &'a [u32] {
    match table.index.get(&v) {
        Some(&i) => table.row(i),
        None => fallback.insert(g.bfs(v)),
    }
}

/// [`internal_points`] reusing rows from `table` for corners among its
/// sources.
pub fn triangle_from_table<S: Space + ?Sized>(
    space: &S,
    table: &DistanceTable,
    x: u32,
    y: u32,
    z: u32,
) -> Result<TriangleData> {
    let g = space.graph();
    let (mut fx, mut fy, mut fz) = (None, None, None);
    let rx = row_of(table, x, &mut fx, g);
    let ry = row_of(table, y, &mut fy, g);
    let rz = row_of(table, z, &mut fz, g);
    let (dxy, dyz, dzx) = (rx[y as usize], ry[z as usize], rz[x as usize]);
    if dxy == UNREACHED || dyz == UNREACHED || dzx == UNREACHED {
        return Err(Error::Disconnected(x as usize, y as usize));
    }
    let corners_ok = space.certified(x, y, dxy) && space.certified(y, z, dyz) && space.certified(z, x, dzx);
    if !corners_ok {
        return Err(Error::Contaminated(format!("triangle ({x}, {y}, {z})")));
    }
    let sides = [
        g.geodesic_with(x, y, rx)?,
        g.geodesic_with(y, z, ry)?,
        g.geodesic_with(z, x, rz)?,
    ];
    let (dxy, dyz, dzx) = (dxy as i64, dyz as i64, dzx as i64);
    let products = [
        Half::gromov(dxy, dzx, dyz),
        Half::gromov(dxy, dyz, dzx),
        Half::gromov(dzx, dyz, dxy),
    ];
    let slack = if products.iter().all(|p| p.is_integer()) { 0.0 } else { 0.5 };
    // c_z on [x,y] at (y.z)_x from x; c_x on [y,z] at (z.x)_y from y;
    // c_y on [z,x] at (x.y)_z from z.
    let cz = sides[0][products[0].floor() as usize];
    let cx = sides[1][products[1].floor() as usize];
    let cy = sides[2][products[2].floor() as usize];
    let mut certified = true;
    let mut dist = |a: u32, b: u32| -> u32 {
        let d = table.distance(g, a, b);
        if !space.certified(a, b, d) {
            certified = false;
        }
        d
    };
    let insize = [dist(cx, cy), dist(cy, cz), dist(cz, cx)].into_iter().max().unwrap() as f64 + slack;
    // fibres at corner x pair [x,y](t) with [x,z](t); [x,z] is side 2 reversed
    let mut thin = 0u32;
    let fibres: [(&[u32], Vec<u32>, Half); 3] = [
        (&sides[0], sides[2].iter().rev().copied().collect(), products[0]),
        (&sides[1], sides[0].iter().rev().copied().collect(), products[1]),
        (&sides[2], sides[1].iter().rev().copied().collect(), products[2]),
    ];
    for (a, b, p) in fibres.iter() {
        let top = p.floor() as usize;
        for t in 1..=top {
            thin = thin.max(dist(a[t], b[t]));
        }
    }
    Ok(TriangleData {
        corners: [x, y, z],
        sides,
        products,
        internal: [cx, cy, cz],
        insize,
        thinness: thin as f64 + slack,
        certified,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FellowReport {
    pub k: u32,
    pub k1: u32,
    pub k2: u32,
    pub k3: i64,
    /// Largest `d(alpha(K1+i), beta(K2+i))` over the matched window.
    pub max_gap: u32,
    /// Largest distance from a point of alpha to beta.
    pub max_to_beta: u32,
    /// `K3 <= K` and every matched gap `<= 2 delta`.
    pub holds: bool,
}

/// Offsets along which two geodesics with nearby endpoints fellow travel.
pub fn fellow_traveling_offsets<S: Space + ?Sized>(
    space: &S,
    alpha: &[u32],
    beta: &[u32],
    delta: f64,
) -> Result<FellowReport> {
    let (la, lb) = (alpha.len() - 1, beta.len() - 1);
    let rows = DistanceTable::new(space, alpha);
    let dist = |i: usize, v: u32| rows.get(i, v);
    let k = dist(0, beta[0]).max(dist(la, beta[lb])).max(delta.ceil() as u32);
    let gap_bound = (2.0 * delta).floor() as u32;
    let mut best: Option<(i64, u32, u32, u32)> = None;
    for k1 in 0..=(k as usize).min(la) {
        for k2 in 0..=(k as usize).min(lb) {
            let top = (la - k1).min(lb - k2);
            let mut run: i64 = -1;
            let mut gap = 0;
            for i in 0..=top {
                let d = dist(k1 + i, beta[k2 + i]);
                if d > gap_bound {
                    break;
                }
                gap = gap.max(d);
                run = i as i64;
            }
            if run < 0 {
                continue;
            }
            let k3 = la as i64 - k1 as i64 - run;
            let cand = (k3, k1 as u32, k2 as u32, gap);
            if best.is_none_or(|b| (cand.0, cand.1, cand.2) < (b.0, b.1, b.2)) {
                best = Some(cand);
            }
        }
    }
    let (k3, k1, k2, gap) = best.ok_or(Error::NoOverlap)?;
    let max_to_beta = (0..alpha.len())
        .map(|i| beta.iter().map(|&b| dist(i, b)).min().unwrap())
        .max()
        .unwrap();
    Ok(FellowReport {
        k,
        k1,
        k2,
        k3,
        max_gap: gap,
        max_to_beta,
        holds: k3 <= k as i64,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IdealTriangle {
    /// Product of the ray endpoints at the common resolution.
    pub m: Half,
    /// Witness on the discrete line joining the deepest ray points.
    pub z: u32,
    pub line: Vec<u32>,
    pub d_rz: u32,
    pub d_sz: u32,
    /// Largest tracking gap `d(l(-j), r(m+j))`, `d(l(j), s(m+j))`.
    pub max_gap: u32,
    pub bound: f64,
    pub holds: bool,
}

/// Internal points of the ideal triangle spanned by two rays, with the line
/// replaced by a canonical geodesic between their deepest points.
pub fn ideal_internal_points<S: Space + ?Sized>(
    space: &S,
    r: &RayApprox,
    s: &RayApprox,
    delta: f64,
) -> Result<IdealTriangle> {
    let g = space.graph();
    let t = r.resolution().min(s.resolution());
    let (rt, st) = (r.at(t), s.at(t));
    let from_rt = g.bfs(rt);
    let d = from_rt[st as usize];
    if d == UNREACHED || !space.certified(rt, st, d) {
        return Err(Error::Contaminated("ray endpoints".into()));
    }
    if (d as f64) <= delta {
        return Err(Error::RaysEquivalent);
    }
    let m = Half::gromov(t as i64, t as i64, d as i64);
    let mi = m.floor() as u32;
    let line = g.geodesic_with(rt, st, &from_rt)?;
    let table = DistanceTable::new(space, &line);
    let (rm, sm) = (r.at(mi), s.at(mi));
    let (j0, (d_rz, d_sz)) = (0..line.len())
        .map(|j| (j, (table.get(j, rm), table.get(j, sm))))
        .min_by_key(|&(j, (a, b))| (a.max(b), j))
        .unwrap();
    let mut gap = 0;
    for j in 0..=j0.min((t - mi) as usize) {
        gap = gap.max(table.get(j0 - j, r.at(mi + j as u32)));
    }
    for j in 0..=(line.len() - 1 - j0).min((t - mi) as usize) {
        gap = gap.max(table.get(j0 + j, s.at(mi + j as u32)));
    }
    let bound = 5.0 * delta;
    Ok(IdealTriangle {
        m,
        z: line[j0],
        holds: d_rz as f64 <= bound && d_sz as f64 <= bound && gap as f64 <= bound,
        line,
        d_rz,
        d_sz,
        max_gap: gap,
        bound,
    })
}

/// Left translate of vertex `v` by the group element `g`, if it lies in the
/// built space.
pub fn translate(space: &CuspedGraph, model: &GroupModel, g: &[Letter], v: u32) -> Result<Option<u32>> {
    if model.graph.is_some() {
        return Err(Error::UnsupportedFamily("user-graph".into()));
    }
    let base = space.base[v as usize];
    let w = mul(g, &space.ball.normal_forms[base as usize]);
    let Some(gb) = space.ball.lookup(model, &w) else {
        return Ok(None);
    };
    match space.coset_of_vertex(v) {
        None => Ok(Some(gb)),
        Some(c) => {
            let p = space.cosets[c].peripheral;
            let gc = space.coset_index[p][gb as usize];
            if gc == crate::cusped::NO_COSET {
                return Ok(None);
            }
            Ok(space.horoball_vertex(gc as usize, gb, space.depth[v as usize]))
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct EquivarianceReport {
    pub checked: usize,
    pub discarded: usize,
    pub mismatches: usize,
}

/// Random word of length at most `len` in the group generators.
pub fn random_element<R: Rng>(model: &GroupModel, len: usize, rng: &mut R) -> Word {
    let k = model.alphabet.len();
    let mut w = Vec::new();
    for _ in 0..rng.gen_range(0..=len) {
        let i = rng.gen_range(0..k);
        let l = if rng.gen_bool(0.5) { Letter::gen(i) } else { Letter::inv_gen(i) };
        w = mul(&w, &[l]);
    }
    w
}

/// Checks `(x.y)_* = (gx.gy)_{g*}` on `samples` random triples, keeping only
/// those whose six distances are all certified.
pub fn check_equivariance<R: Rng>(
    space: &CuspedGraph,
    model: &GroupModel,
    samples: usize,
    rng: &mut R,
) -> Result<EquivarianceReport> {
    let mut report = EquivarianceReport::default();
    let n = space.len() as u32;
    let mut tries = 0;
    let from_base = space.bfs(space.basepoint());
    let near: Vec<u32> = (0..n)
        .filter(|&v| from_base[v as usize] <= space.radius / 2 + 1)
        .collect();
    while report.checked < samples && tries < samples * 50 {
        tries += 1;
        let g = random_element(model, (space.radius / 2) as usize, rng);
        let (x, y) = (*near.choose(rng).unwrap(), *near.choose(rng).unwrap());
        let p = space.basepoint();
        let (Some(gp), Some(gx), Some(gy)) = (
            translate(space, model, &g, p)?,
            translate(space, model, &g, x)?,
            translate(space, model, &g, y)?,
        ) else {
            report.discarded += 1;
            continue;
        };
        let (rp, rx, rgp, rgx) = (from_base.clone(), space.bfs(x), space.bfs(gp), space.bfs(gx));
        let ds = [
            (p, x, rp[x as usize]),
            (p, y, rp[y as usize]),
            (x, y, rx[y as usize]),
            (gp, gx, rgp[gx as usize]),
            (gp, gy, rgp[gy as usize]),
            (gx, gy, rgx[gy as usize]),
        ];
        if ds.iter().any(|&(a, b, d)| d == UNREACHED || !space.certified(a, b, d)) {
            report.discarded += 1;
            continue;
        }
        let before = Half::gromov(ds[0].2 as i64, ds[1].2 as i64, ds[2].2 as i64);
        let after = Half::gromov(ds[3].2 as i64, ds[4].2 as i64, ds[5].2 as i64);
        report.checked += 1;
        if before != after {
            report.mismatches += 1;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::horoball::path_graph;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n)))
    }

    /// Ordered-quadruple brute force straight from the definition.
    fn brute_four_point(g: &Graph) -> Half {
        let n = g.len() as u32;
        let d: Vec<Vec<u32>> = (0..n).map(|v| g.bfs(v)).collect();
        let gp = |p: u32, a: u32, b: u32| {
            Half::gromov(d[p as usize][a as usize] as i64, d[p as usize][b as usize] as i64, d[a as usize][b as usize] as i64)
        };
        let mut best = Half::ZERO;
        for p in 0..n {
            for x in 0..n {
                for y in 0..n {
                    for z in 0..n {
                        let v = gp(p, x, z).min(gp(p, z, y)) - gp(p, x, y);
                        best = best.max(v);
                    }
                }
            }
        }
        best
    }

    #[test]
    fn product_in_tree() {
        let m = GroupModel::free(2);
        let x = CuspedGraph::build(&m, 3, 1).unwrap();
        let a = x.parse_vertex(&m, "a b").unwrap();
        let b = x.parse_vertex(&m, "a b^-1").unwrap();
        assert_eq!(gromov_product(&x, 0, a, b), Half::from_int(1));
        assert_eq!(gromov_product(&x, 0, a, a), Half::from_int(2));
        assert_eq!(gromov_product(&x, a, a, b), Half::ZERO);
    }

    #[test]
    fn four_point_matches_brute_force() {
        for n in [3, 4, 5, 6, 7, 9] {
            let g = cycle(n);
            let all: Vec<u32> = (0..n).collect();
            assert_eq!(four_point_delta_exhaustive(&g, &all), brute_four_point(&g), "cycle {n}");
        }
        let h = HoroballGraph::build(&path_graph(5), 2).unwrap();
        let all: Vec<u32> = (0..h.len() as u32).collect();
        assert_eq!(four_point_delta_exhaustive(&h, &all), brute_four_point(&h.graph));
    }

    #[test]
    fn tree_is_zero_hyperbolic() {
        let g = path_graph(12);
        let all: Vec<u32> = (0..12).collect();
        assert_eq!(four_point_delta_exhaustive(&g, &all), Half::ZERO);
    }

    #[test]
    fn horoball_estimators_agree() {
        let h = HoroballGraph::build(&path_graph(16), 4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = estimate_delta(&h, 0, 300, &mut rng);
        assert!(r.exhaustive);
        assert!(r.delta_fourpoint > 0.0);
        assert!(r.delta_thin <= 8.0 * r.delta_fourpoint.max(0.5));
        assert!(r.delta_thin <= 4.0 * r.delta_fourpoint + 2.0);
    }

    #[test]
    fn internal_points_of_tree_triangle() {
        let m = GroupModel::free(2);
        let x = CuspedGraph::build(&m, 2, 1).unwrap();
        let a = x.parse_vertex(&m, "a").unwrap();
        let b = x.parse_vertex(&m, "b").unwrap();
        let t = internal_points(&x, 0, a, b).unwrap();
        assert_eq!(t.internal, [0, 0, 0]);
        assert_eq!(t.insize, 0.0);
    }

    #[test]
    fn degenerate_triangle_has_zero_insize() {
        let g = path_graph(9);
        let t = internal_points(&g, 0, 8, 3).unwrap();
        assert_eq!(t.insize, 0.0);
        assert_eq!(t.thinness, 0.0);
    }

    #[test]
    fn horoball_triangle_internal_points() {
        let h = HoroballGraph::build(&path_graph(16), 4).unwrap();
        let t = internal_points(&h, h.vertex(0, 0), h.vertex(8, 0), h.vertex(4, 3)).unwrap();
        let d = |a: u32, b: u32| h.distance(a, b).unwrap() as i64;
        let [x, y, z] = t.corners;
        assert_eq!(t.products[0], Half::gromov(d(x, y), d(x, z), d(y, z)));
        assert_eq!(d(x, t.internal[2]), t.products[0].floor());
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let r = estimate_delta(&h, 0, 300, &mut rng);
        assert!(t.insize <= r.delta_fourpoint.max(r.delta_thin));
    }

    #[test]
    fn fellow_travel_of_equal_and_alternate_geodesics() {
        let h = HoroballGraph::build(&path_graph(16), 4).unwrap();
        let (x, y) = (h.vertex(0, 0), h.vertex(8, 0));
        let (all, _) = h.graph.all_geodesics(x, y, &h.graph.bfs(y), 100);
        assert!(all.len() >= 2);
        let r = fellow_traveling_offsets(&h, &all[0], &all[0], 1.0).unwrap();
        assert_eq!((r.k1, r.k2, r.max_gap), (0, 0, 0));
        let delta = estimate_delta(&h, 0, 300, &mut ChaCha8Rng::seed_from_u64(2)).delta();
        for b in &all[1..] {
            let r = fellow_traveling_offsets(&h, &all[0], b, delta).unwrap();
            assert!(r.max_gap as f64 <= 2.0 * delta);
            assert!(r.holds);
        }
    }

    #[test]
    fn ideal_points_in_tree() {
        let m = GroupModel::free(2);
        let x = CuspedGraph::build(&m, 8, 1).unwrap();
        let ray = |w: &str| {
            let end = x.parse_vertex(&m, w).unwrap();
            RayApprox::new(x.graph.geodesic(0, end).unwrap())
        };
        let t = ideal_internal_points(&x, &ray("a a a a"), &ray("b b b b"), 0.0).unwrap();
        assert_eq!(t.m, Half::ZERO);
        assert_eq!(t.z, 0);
        assert_eq!(t.max_gap, 0);
        let t = ideal_internal_points(&x, &ray("a b a a"), &ray("a b b b"), 0.0).unwrap();
        assert_eq!(t.m, Half::from_int(2));
        assert_eq!(t.z, x.parse_vertex(&m, "a b").unwrap());
    }

    #[test]
    fn equivariance_in_free_product_space() {
        let mut m = GroupModel::free(2);
        let a = m.parse("a").unwrap();
        m.add_peripheral("A", vec![a]).unwrap();
        let x = CuspedGraph::build(&m, 5, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let r = check_equivariance(&x, &m, 30, &mut rng).unwrap();
        assert!(r.checked > 0);
        assert_eq!(r.mismatches, 0);
    }
}
