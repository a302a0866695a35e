//! Finite-resolution boundary points, the visual quasi-metric and its
//! chain metrization.

use crate::cusped::CuspedGraph;
use crate::error::{Error, Result};
use crate::graph::UNREACHED;
use crate::group::GroupModel;
use crate::hyperbolicity::{translate, Space};
use crate::word::Letter;
use crate::Half;
use serde::Serialize;
use std::collections::HashMap;
use std::fmt::Write as _;

/// A geodesic segment from the basepoint standing in for a boundary point.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct RayApprox {
    pub vertices: Vec<u32>,
    pub canonical: bool,
}

impl RayApprox {
    pub fn new(vertices: Vec<u32>) -> Self {
        RayApprox {
            vertices,
            canonical: false,
        }
    }

    /// Canonical geodesic from the basepoint to `end`.
    pub fn canonical_to<S: Space + ?Sized>(space: &S, base: u32, end: u32, from_base: &[u32]) -> Result<Self> {
        Ok(RayApprox {
            vertices: space.graph().geodesic_with(base, end, from_base)?,
            canonical: true,
        })
    }

    pub fn resolution(&self) -> u32 {
        self.vertices.len() as u32 - 1
    }

    pub fn at(&self, t: u32) -> u32 {
        self.vertices[t as usize]
    }

    pub fn end(&self) -> u32 {
        *self.vertices.last().expect("rays are nonempty")
    }

    pub fn truncate(&self, t: u32) -> RayApprox {
        RayApprox {
            vertices: self.vertices[..=t as usize].to_vec(),
            canonical: self.canonical,
        }
    }
}

/// Memoised BFS rows.
#[derive(Default)]
pub struct RowCache {
    rows: HashMap<u32, Vec<u32>>,
}

impl RowCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn row<S: Space + ?Sized>(&mut self, space: &S, v: u32) -> &[u32] {
        self.rows.entry(v).or_insert_with(|| space.graph().bfs(v))
    }

    pub fn distance<S: Space + ?Sized>(&mut self, space: &S, a: u32, b: u32) -> u32 {
        if let Some(r) = self.rows.get(&b) {
            return r[a as usize];
        }
        self.row(space, a)[b as usize]
    }

    /// Fills rows for all `vertices` in parallel.
    pub fn prefetch<S: Space + ?Sized>(&mut self, space: &S, vertices: &[u32]) {
        let mut todo: Vec<u32> = vertices.iter().copied().filter(|v| !self.rows.contains_key(v)).collect();
        todo.sort_unstable();
        todo.dedup();
        let rows = crate::par::map(&todo, |&v| space.graph().bfs(v));
        self.rows.extend(todo.into_iter().zip(rows));
    }
}

pub fn ray_equivalent<S: Space + ?Sized>(
    space: &S,
    r: &RayApprox,
    s: &RayApprox,
    delta: f64,
) -> Result<bool> {
    if r.resolution() != s.resolution() {
        return Err(Error::ResolutionMismatch(r.resolution() as usize, s.resolution() as usize));
    }
    if delta < 0.0 {
        return Ok(false);
    }
    let limit = delta.floor() as u32;
    Ok((0..=r.resolution()).all(|t| space.graph().bounded_distance(r.at(t), s.at(t), limit).is_some()))
}

/// Vertices at distance `t` from the basepoint whose distances to each
/// other are all certified.
pub fn certified_sphere(space: &CuspedGraph, t: u32) -> Vec<u32> {
    let from_base = space.bfs(space.basepoint());
    // d(x,y) <= 2t, so frontier distance t - 1 at both ends certifies it
    (0..space.len() as u32)
        .filter(|&v| from_base[v as usize] == t && space.frontier_distance[v as usize] + 1 >= t)
        .collect()
}

/// The canonical net at resolution `t`: canonical geodesics to the
/// certified sphere, one per `ray_equivalent` class, keeping the least
/// endpoint id of each class.
pub fn canonical_net(space: &CuspedGraph, t: u32, delta: f64) -> Result<Vec<RayApprox>> {
    let sphere = certified_sphere(space, t);
    let from_base = space.bfs(space.basepoint());
    let mut net: Vec<RayApprox> = Vec::new();
    for &v in &sphere {
        let ray = RayApprox::canonical_to(space, space.basepoint(), v, &from_base)?;
        let mut fresh = true;
        for kept in &net {
            if ray_equivalent(space, kept, &ray, delta)? {
                fresh = false;
                break;
            }
        }
        if fresh {
            net.push(ray);
        }
    }
    if net.is_empty() {
        return Err(Error::EmptyNet);
    }
    Ok(net)
}

/// Evenly spaced subset of `net` of size at most `k`, order kept.
pub fn thin_net(net: &[RayApprox], k: usize) -> Vec<RayApprox> {
    if net.len() <= k {
        return net.to_vec();
    }
    (0..k).map(|i| net[i * net.len() / k].clone()).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BoundaryProduct {
    pub value: Half,
    /// Resolution at which `value` was taken.
    pub resolution: u32,
    /// `(r(t).s(t))_*` for `t = 0..=resolution`.
    pub sequence: Vec<Half>,
    /// Spread of the sequence over its top quartile.
    pub fluctuation: Half,
}

/// `(r(T).s(T))_*` at the largest common resolution with a certified
/// endpoint distance.
pub fn boundary_product<S: Space + ?Sized>(
    space: &S,
    r: &RayApprox,
    s: &RayApprox,
    delta: f64,
    rows: &mut RowCache,
) -> Result<BoundaryProduct> {
    let top = r.resolution().min(s.resolution());
    let mut sequence = Vec::new();
    let mut certified_top = None;
    for t in 0..=top {
        let d = rows.distance(space, r.at(t), s.at(t));
        if d == UNREACHED {
            return Err(Error::Disconnected(r.at(t) as usize, s.at(t) as usize));
        }
        if !space.certified(r.at(t), s.at(t), d) {
            break;
        }
        certified_top = Some((t, d));
        sequence.push(Half::gromov(t as i64, t as i64, d as i64));
    }
    let (t, d) = certified_top.ok_or_else(|| Error::Contaminated("ray pair".into()))?;
    if d as f64 <= delta && t == top {
        return Err(Error::RaysEquivalent);
    }
    let q = (3 * sequence.len()) / 4;
    let tail = &sequence[q.min(sequence.len() - 1)..];
    let fluctuation = *tail.iter().max().unwrap() - *tail.iter().min().unwrap();
    Ok(BoundaryProduct {
        value: sequence[t as usize],
        resolution: t,
        sequence,
        fluctuation,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VisualMetricSpec {
    pub epsilon: f64,
    pub chain: bool,
    pub k1: Option<f64>,
    pub k2: Option<f64>,
}

impl VisualMetricSpec {
    pub fn new(epsilon: f64) -> Self {
        VisualMetricSpec {
            epsilon,
            chain: true,
            k1: None,
            k2: None,
        }
    }

    pub fn parameter(&self) -> f64 {
        self.epsilon.exp()
    }
}

pub fn visual_quasimetric(product: Half, spec: &VisualMetricSpec) -> f64 {
    (-spec.epsilon * product.to_f64()).exp()
}

/// Pairwise products `(r(t).s(t))_*` over rays of any resolutions, at the
/// largest common `t` with a certified distance. The diagonal holds each
/// ray's resolution.
pub fn product_matrix<S: Space + ?Sized>(space: &S, rays: &[RayApprox]) -> Vec<Vec<Option<Half>>> {
    let n = rays.len();
    // a BFS from each ray's end answers every pair where that ray is shorter
    let ends: Vec<Vec<u32>> = crate::par::map_range(n, |i| {
        let row = space.graph().bfs(rays[i].end());
        let t = rays[i].resolution();
        (0..n)
            .map(|j| if rays[j].resolution() >= t { row[rays[j].at(t) as usize] } else { UNREACHED })
            .collect()
    });
    let mut m = vec![vec![None; n]; n];
    for i in 0..n {
        m[i][i] = Some(Half::from_int(rays[i].resolution() as i64));
        for j in i + 1..n {
            let (a, b) = if rays[i].resolution() <= rays[j].resolution() { (i, j) } else { (j, i) };
            let top = rays[a].resolution();
            let mut p = None;
            let d = ends[a][b];
            if d != UNREACHED && space.certified(rays[a].at(top), rays[b].at(top), d) {
                p = Some(Half::gromov(top as i64, top as i64, d as i64));
            } else {
                for t in (0..top).rev() {
                    let (u, v) = (rays[a].at(t), rays[b].at(t));
                    if let Some(d) = space.graph().bounded_distance(u, v, 2 * t) {
                        if space.certified(u, v, d) {
                            p = Some(Half::gromov(t as i64, t as i64, d as i64));
                            break;
                        }
                    }
                }
            }
            m[i][j] = p;
            m[j][i] = p;
        }
    }
    m
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChainMetric {
    pub quasi: Vec<Vec<f64>>,
    pub distance: Vec<Vec<f64>>,
    pub k1: f64,
    pub k2: f64,
}

/// Chain metrization of `a^{-product}` over a finite point set:
/// the least total cost of a chain through the set.
pub fn chain_metric(products: &[Vec<Option<Half>>], spec: &VisualMetricSpec) -> Result<ChainMetric> {
    let n = products.len();
    if n < 2 {
        return Err(Error::TooFewPoints(n));
    }
    let quasi: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| match (i == j, products[i][j]) {
                    (true, _) => 0.0,
                    (false, Some(p)) => visual_quasimetric(p, spec),
                    (false, None) => f64::INFINITY,
                })
                .collect()
        })
        .collect();
    let distance = floyd_warshall(&quasi);
    let mut k1 = f64::INFINITY;
    for i in 0..n {
        for j in 0..n {
            if i != j && quasi[i][j].is_finite() {
                k1 = k1.min(distance[i][j] / quasi[i][j]);
            }
        }
    }
    Ok(ChainMetric {
        quasi,
        distance,
        k1,
        k2: 1.0,
    })
}

pub fn floyd_warshall(w: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = w.len();
    let mut d = w.to_vec();
    for k in 0..n {
        for i in 0..n {
            let dik = d[i][k];
            if !dik.is_finite() {
                continue;
            }
            for j in 0..n {
                let via = dik + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Largest and smallest pairwise products within `points` at `p`, compared
/// with the same quantities for `g points` at `g p`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiameterCheck {
    pub before: Option<Half>,
    pub after: Option<Half>,
    pub equal: bool,
}

/// The visual diameter of a finite set is `a^{-min product}`, so the check
/// compares minimal pairwise products.
pub fn equivariant_diameter(
    space: &CuspedGraph,
    model: &GroupModel,
    g: &[Letter],
    points: &[u32],
) -> Result<DiameterCheck> {
    let p = space.basepoint();
    let min_product = |base: u32, pts: &[u32]| -> Option<Half> {
        let from_base = space.bfs(base);
        let mut best: Option<Half> = None;
        for (i, &x) in pts.iter().enumerate() {
            let from_x = space.bfs(x);
            for &y in &pts[i + 1..] {
                let ds = [(base, x, from_base[x as usize]), (base, y, from_base[y as usize]), (x, y, from_x[y as usize])];
                if ds.iter().any(|&(a, b, d)| d == UNREACHED || !space.certified(a, b, d)) {
                    return None;
                }
                let v = Half::gromov(ds[0].2 as i64, ds[1].2 as i64, ds[2].2 as i64);
                best = Some(best.map_or(v, |b| b.min(v)));
            }
        }
        best
    };
    let before = min_product(p, points);
    let gp = translate(space, model, g, p)?;
    let gpts: Option<Vec<u32>> = points
        .iter()
        .map(|&x| translate(space, model, g, x))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .collect();
    let after = match (gp, gpts) {
        (Some(gp), Some(gpts)) => min_product(gp, &gpts),
        _ => None,
    };
    Ok(DiameterCheck {
        before,
        after,
        equal: before.is_some() && before == after,
    })
}

/// `class,endpoint,path` rows; the path lists vertex labels separated by `/`.
pub fn net_to_csv(space: &CuspedGraph, model: &GroupModel, net: &[RayApprox]) -> String {
    let mut out = String::from("class,endpoint,path\n");
    for (i, r) in net.iter().enumerate() {
        let path: Vec<String> = r.vertices.iter().map(|&v| space.label(model, v)).collect();
        let _ = writeln!(out, "{i},{},{}", space.label(model, r.end()), path.join("/"));
    }
    out
}

pub fn matrix_to_csv(m: &[Vec<f64>]) -> String {
    let mut out = String::from("class");
    for j in 0..m.len() {
        let _ = write!(out, ",{j}");
    }
    out.push('\n');
    for (i, row) in m.iter().enumerate() {
        let _ = write!(out, "{i}");
        for v in row {
            let _ = write!(out, ",{v:.17e}");
        }
        out.push('\n');
    }
    out
}
