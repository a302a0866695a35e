//! The truncated cusped space: a Cayley ball with a combinatorial horoball
//! glued over every peripheral coset that meets it.

mod cache;
pub mod checks;

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};
use crate::group::ball::DEFAULT_VERTEX_BUDGET;
use crate::group::{peripheral_cosets_in_ball, CayleyBall, CosetDescriptor, GroupModel, PeripheralKind};
use serde::Serialize;

pub use cache::CACHE_VERSION;

pub const NO_COSET: u32 = u32::MAX;

#[derive(Clone, Debug)]
pub struct CuspedGraph {
    pub radius: u32,
    pub max_depth: u32,
    pub model_hash: String,
    pub ball: CayleyBall,
    pub cosets: Vec<CosetDescriptor>,
    pub graph: Graph,
    /// Per vertex: owning coset (`NO_COSET` for Cayley vertices), Cayley
    /// vertex underneath, and depth.
    pub coset: Vec<u32>,
    pub base: Vec<u32>,
    pub depth: Vec<u32>,
    /// Distance to the nearest vertex with a neighbour outside the
    /// truncation. Drives the exactness certificate.
    pub frontier_distance: Vec<u32>,
    /// `coset_index[p][v]`: coset of peripheral `p` containing Cayley vertex `v`.
    pub coset_index: Vec<Vec<u32>>,
    horo_start: Vec<u32>,
    peripheral_names: Vec<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Distance {
    pub value: u32,
    /// The truncated value equals the distance in the untruncated space.
    pub certified: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GeodesicPath {
    pub vertices: Vec<u32>,
    pub length: u32,
}

impl CuspedGraph {
    pub fn build(model: &GroupModel, radius: u32, depth: u32) -> Result<Self> {
        Self::build_with_budget(model, radius, depth, DEFAULT_VERTEX_BUDGET)
    }

    pub fn build_with_budget(model: &GroupModel, radius: u32, depth: u32, budget: usize) -> Result<Self> {
        let ball = CayleyBall::build_with_budget(model, radius, budget)?;
        let mut cosets = Vec::new();
        for p in 0..model.peripherals.len() {
            cosets.extend(peripheral_cosets_in_ball(&ball, model, p)?);
        }
        let n = ball.len();
        let mut horo_start = Vec::with_capacity(cosets.len());
        let mut total = n;
        for c in &cosets {
            horo_start.push(total as u32);
            total += c.members.len() * depth as usize;
            if total > budget {
                return Err(Error::ResourceLimit { what: "cusped space", budget });
            }
        }
        let mut coset = vec![NO_COSET; n];
        let mut base: Vec<u32> = (0..n as u32).collect();
        let mut dep = vec![0u32; n];
        for (ci, c) in cosets.iter().enumerate() {
            for k in 1..=depth {
                for &v in &c.members {
                    coset.push(ci as u32);
                    base.push(v);
                    dep.push(k);
                }
            }
        }
        let cayley = Graph::from_edges(n, ball.edges.iter().map(|&(a, b, _)| (a, b)));
        let mut edges: Vec<(u32, u32)> = ball.edges.iter().map(|&(a, b, _)| (a, b)).collect();
        for (ci, c) in cosets.iter().enumerate() {
            let metric = BaseMetric::new(model, &cayley, c);
            let m = c.members.len();
            let id = |i: usize, k: u32| -> u32 {
                if k == 0 {
                    c.members[i]
                } else {
                    horo_start[ci] + (k - 1) * m as u32 + i as u32
                }
            };
            for k in 0..depth {
                for i in 0..m {
                    edges.push((id(i, k), id(i, k + 1)));
                }
            }
            for k in 1..=depth {
                metric.for_each_pair_within(1u64 << k, |i, j| edges.push((id(i, k), id(j, k))));
            }
        }
        let graph = Graph::from_edges(total, edges);
        let mut coset_index = vec![vec![NO_COSET; n]; model.peripherals.len()];
        for (ci, c) in cosets.iter().enumerate() {
            for &v in &c.members {
                coset_index[c.peripheral][v as usize] = ci as u32;
            }
        }
        let mut space = CuspedGraph {
            radius,
            max_depth: depth,
            model_hash: model.hash(),
            ball,
            cosets,
            graph,
            coset,
            base,
            depth: dep,
            frontier_distance: Vec::new(),
            coset_index,
            horo_start,
            peripheral_names: model.peripherals.iter().map(|p| p.id.clone()).collect(),
        };
        space.frontier_distance = space.compute_frontier(model, &cayley);
        Ok(space)
    }

    fn compute_frontier(&self, model: &GroupModel, cayley: &Graph) -> Vec<u32> {
        let n = self.ball.len();
        let mut sources = Vec::new();
        let whole_user_graph = model.graph.as_ref().map(|g| g.names.len() == n);
        for v in 0..n {
            let edge = self.ball.length[v] == self.radius;
            let exits = match whole_user_graph {
                Some(whole) => edge && !whole,
                None => edge,
            };
            if exits {
                sources.push(v as u32);
            }
        }
        for (ci, c) in self.cosets.iter().enumerate() {
            let metric = BaseMetric::new(model, cayley, c);
            let complete = match (&model.peripherals[c.peripheral].kind, whole_user_graph) {
                (PeripheralKind::Vertices(all), _) => all.len() == c.members.len() && whole_user_graph != Some(false),
                _ => true,
            };
            let m = c.members.len() as u32;
            for k in 1..=self.max_depth {
                for i in 0..c.members.len() {
                    if k == self.max_depth || !complete || metric.missing_within(i, 1u64 << k) {
                        sources.push(self.horo_start[ci] + (k - 1) * m + i as u32);
                    }
                }
            }
        }
        self.graph.multi_bfs(&sources)
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn basepoint(&self) -> u32 {
        0
    }

    pub fn is_cayley(&self, v: u32) -> bool {
        self.coset[v as usize] == NO_COSET
    }

    /// Vertex `(member v, level k)` of the horoball over coset `c`; level 0
    /// is the Cayley vertex itself.
    pub fn horoball_vertex(&self, c: usize, v: u32, k: u32) -> Option<u32> {
        let members = &self.cosets[c].members;
        let i = members.binary_search(&v).ok()? as u32;
        match k {
            0 => Some(v),
            k if k <= self.max_depth => Some(self.horo_start[c] + (k - 1) * members.len() as u32 + i),
            _ => None,
        }
    }

    /// All vertices of the horoball over coset `c`, level 0 included.
    pub fn horoball_vertices(&self, c: usize) -> Vec<u32> {
        let m = self.cosets[c].members.len() as u32;
        let start = self.horo_start[c];
        let mut out = self.cosets[c].members.clone();
        out.extend(start..start + m * self.max_depth);
        out
    }

    pub fn bfs(&self, x: u32) -> Vec<u32> {
        self.graph.bfs(x)
    }

    /// Exactness certificate: a shorter path in the untruncated space must
    /// leave through frontier vertices at both ends.
    pub fn certified(&self, x: u32, y: u32, d: u32) -> bool {
        let fx = self.frontier_distance[x as usize] as u64;
        let fy = self.frontier_distance[y as usize] as u64;
        d as u64 <= fx + fy + 2
    }

    pub fn distance(&self, x: u32, y: u32) -> Result<Distance> {
        let d = self.bfs(x)[y as usize];
        if d == UNREACHED {
            return Err(Error::Disconnected(x as usize, y as usize));
        }
        Ok(Distance {
            value: d,
            certified: self.certified(x, y, d),
        })
    }

    pub fn geodesic(&self, x: u32, y: u32) -> Result<GeodesicPath> {
        let vertices = self.graph.geodesic(x, y)?;
        Ok(GeodesicPath {
            length: vertices.len() as u32 - 1,
            vertices,
        })
    }

    pub fn geodesic_with(&self, x: u32, y: u32, from_x: &[u32]) -> Result<GeodesicPath> {
        let vertices = self.graph.geodesic_with(x, y, from_x)?;
        Ok(GeodesicPath {
            length: vertices.len() as u32 - 1,
            vertices,
        })
    }

    pub fn label(&self, model: &GroupModel, v: u32) -> String {
        let b = self.ball.label(model, self.base[v as usize]);
        if self.is_cayley(v) {
            return b;
        }
        let c = &self.cosets[self.coset[v as usize] as usize];
        let mut s = format!("{b}:{}", self.depth[v as usize]);
        if self.peripheral_names.len() > 1 {
            s.push('@');
            s.push_str(&self.peripheral_names[c.peripheral]);
        }
        s
    }

    /// Inverse of [`label`](Self::label). Words need not be in normal form.
    pub fn parse_vertex(&self, model: &GroupModel, text: &str) -> Result<u32> {
        let unknown = || Error::UnknownVertex(text.to_string());
        let (rest, pid) = match text.rsplit_once('@') {
            Some((r, p)) => (r, Some(p)),
            None => (text, None),
        };
        let (word, k) = match rest.rsplit_once(':') {
            Some((w, k)) => (w, k.trim().parse::<u32>().map_err(|_| unknown())?),
            None => (rest, 0),
        };
        let word = word.trim();
        let v = if model.graph.is_some() {
            self.ball.lookup_name(word)
        } else if word == "e" || word.is_empty() {
            Some(0)
        } else {
            self.ball.lookup(model, &model.parse(word)?)
        }
        .ok_or_else(unknown)?;
        if k == 0 {
            return Ok(v);
        }
        let p = match pid {
            Some(p) => self.peripheral_names.iter().position(|n| n == p).ok_or_else(unknown)?,
            None => (0..self.coset_index.len())
                .find(|&p| self.coset_index[p][v as usize] != NO_COSET)
                .ok_or_else(unknown)?,
        };
        let c = self.coset_index[p][v as usize];
        if c == NO_COSET {
            return Err(unknown());
        }
        self.horoball_vertex(c as usize, v, k).ok_or_else(unknown)
    }

    pub fn coset_of_vertex(&self, v: u32) -> Option<usize> {
        (!self.is_cayley(v)).then(|| self.coset[v as usize] as usize)
    }

    /// Closest member of coset `c` to the basepoint (least id on ties).
    pub fn closest_point(&self, c: usize, from_base: &[u32]) -> u32 {
        *self.cosets[c]
            .members
            .iter()
            .min_by_key(|&&v| (from_base[v as usize], v))
            .expect("cosets are nonempty")
    }

    pub fn cayley_len(&self) -> usize {
        self.ball.len()
    }

    pub fn summary(&self) -> Summary {
        Summary {
            radius: self.radius,
            depth: self.max_depth,
            vertices: self.len(),
            edges: self.graph.edge_count(),
            cayley_vertices: self.ball.len(),
            cosets: self.cosets.len(),
            model_hash: self.model_hash.clone(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Summary {
    pub radius: u32,
    pub depth: u32,
    pub vertices: usize,
    pub edges: usize,
    pub cayley_vertices: usize,
    pub cosets: usize,
    pub model_hash: String,
}

/// Metric on the members of one coset: l1 on coordinates, or the induced
/// path metric for user-graph vertex sets.
enum BaseMetric {
    Line { sorted: Vec<(i64, usize)>, pos: Vec<usize> },
    Lattice(Vec<Vec<i64>>),
    Induced(Vec<Vec<u32>>),
}

impl BaseMetric {
    fn new(model: &GroupModel, cayley: &Graph, c: &CosetDescriptor) -> Self {
        match &model.peripherals[c.peripheral].kind {
            PeripheralKind::Vertices(_) => {
                let inside = |v: u32| c.members.binary_search(&v).is_ok();
                let rows = c
                    .members
                    .iter()
                    .map(|&s| {
                        let d = cayley.bfs_masked(&[s], inside);
                        c.members.iter().map(|&t| d[t as usize]).collect()
                    })
                    .collect();
                BaseMetric::Induced(rows)
            }
            _ if c.coords.first().map(|x| x.len()) == Some(1) => {
                let mut sorted: Vec<(i64, usize)> = c.coords.iter().enumerate().map(|(i, x)| (x[0], i)).collect();
                sorted.sort_unstable();
                let mut pos = vec![0; sorted.len()];
                for (p, &(_, i)) in sorted.iter().enumerate() {
                    pos[i] = p;
                }
                BaseMetric::Line { sorted, pos }
            }
            _ => BaseMetric::Lattice(c.coords.clone()),
        }
    }

    fn for_each_pair_within(&self, span: u64, mut f: impl FnMut(usize, usize)) {
        match self {
            BaseMetric::Line { sorted, .. } => {
                for a in 0..sorted.len() {
                    for b in a + 1..sorted.len() {
                        if (sorted[b].0 - sorted[a].0) as u64 > span {
                            break;
                        }
                        f(sorted[a].1, sorted[b].1);
                    }
                }
            }
            BaseMetric::Lattice(coords) => {
                for i in 0..coords.len() {
                    for j in i + 1..coords.len() {
                        if l1(&coords[i], &coords[j]) <= span {
                            f(i, j);
                        }
                    }
                }
            }
            BaseMetric::Induced(rows) => {
                for i in 0..rows.len() {
                    for j in i + 1..rows.len() {
                        if rows[i][j] != UNREACHED && rows[i][j] as u64 <= span {
                            f(i, j);
                        }
                    }
                }
            }
        }
    }

    /// Some element of the full coset within `span` of member `i` lies
    /// outside the ball.
    fn missing_within(&self, i: usize, span: u64) -> bool {
        match self {
            BaseMetric::Line { sorted, pos } => {
                let p = pos[i];
                let x = sorted[p].0;
                let run_ok = |dir: i64| {
                    let mut q = p as i64;
                    let mut last = x;
                    loop {
                        let next = q + dir;
                        if next < 0 || next >= sorted.len() as i64 {
                            return false;
                        }
                        let y = sorted[next as usize].0;
                        if (y - last).abs() != 1 {
                            return false;
                        }
                        if (y - x).unsigned_abs() >= span {
                            return true;
                        }
                        last = y;
                        q = next;
                    }
                };
                !(run_ok(-1) && run_ok(1))
            }
            BaseMetric::Lattice(coords) => {
                let r = span;
                let present = coords.iter().filter(|y| l1(&coords[i], y) <= r).count() as u64;
                present < lattice_ball(coords[i].len() as u64, r)
            }
            BaseMetric::Induced(_) => false,
        }
    }
}

fn l1(a: &[i64], b: &[i64]) -> u64 {
    a.iter().zip(b).map(|(x, y)| (x - y).unsigned_abs()).sum()
}

/// Number of points of `Z^m` with l1 norm at most `r`.
fn lattice_ball(m: u64, r: u64) -> u64 {
    let binom = |n: u64, k: u64| -> u64 {
        if k > n {
            return 0;
        }
        (0..k).fold(1u64, |acc, i| acc.saturating_mul(n - i) / (i + 1))
    };
    (0..=m.min(r)).map(|i| (1u64 << i).saturating_mul(binom(m, i)).saturating_mul(binom(r, i))).fold(0u64, u64::saturating_add)
}

#[cfg(test)]
mod tests;
