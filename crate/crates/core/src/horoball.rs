//! Truncated combinatorial horoballs over finite graphs.
//!
//! Vertex `(v, k)` has id `k * n + v` where `n` is the base size. Level-k
//! horizontal edges join `(v,k),(w,k)` when `0 < d(v,w) <= 2^k`; vertical
//! edges join `(v,k),(v,k+1)`.

use crate::error::{Error, Result};
use crate::graph::{Graph, UNREACHED};
use crate::par;
use std::collections::HashMap;

#[derive(Clone, Debug)]
pub struct HoroballGraph {
    pub base: Graph,
    pub base_labels: Vec<String>,
    /// All-pairs base distances, row-major.
    base_dist: Vec<u32>,
    pub max_depth: u32,
    pub graph: Graph,
}

/// Geodesic of the shape vertical, horizontal, vertical.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalForm {
    pub apex: u32,
    pub horizontal: u32,
    pub path: Vec<u32>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HausdorffReport {
    pub max_distance: u32,
    pub geodesics: usize,
    /// The enumeration hit its cap; the maximum is over a subset.
    pub partial: bool,
}

pub const GEODESIC_CAP: usize = 10_000;

impl HoroballGraph {
    pub fn build(base: &Graph, depth: u32) -> Result<Self> {
        let labels = (0..base.len()).map(|i| i.to_string()).collect();
        Self::build_labeled(base, labels, depth, crate::group::ball::DEFAULT_VERTEX_BUDGET)
    }

    pub fn build_labeled(base: &Graph, labels: Vec<String>, depth: u32, budget: usize) -> Result<Self> {
        let n = base.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let total = n * (depth as usize + 1);
        if total > budget {
            return Err(Error::ResourceLimit { what: "horoball", budget });
        }
        let rows = par::map_range(n, |i| base.bfs(i as u32));
        let base_dist: Vec<u32> = rows.into_iter().flatten().collect();
        if base_dist.contains(&UNREACHED) {
            return Err(Error::Disconnected(0, base_dist.iter().position(|&d| d == UNREACHED).unwrap() % n));
        }
        let mut edges = Vec::new();
        for k in 0..=depth {
            let span = 1u64 << k.min(63);
            let off = (k as usize * n) as u32;
            for v in 0..n {
                for w in v + 1..n {
                    if base_dist[v * n + w] as u64 <= span {
                        edges.push((off + v as u32, off + w as u32));
                    }
                }
                if k < depth {
                    edges.push((off + v as u32, off + (n + v) as u32));
                }
            }
        }
        Ok(HoroballGraph {
            base: base.clone(),
            base_labels: labels,
            base_dist,
            max_depth: depth,
            graph: Graph::from_edges(total, edges),
        })
    }

    pub fn base_len(&self) -> usize {
        self.base.len()
    }

    pub fn len(&self) -> usize {
        self.graph.len()
    }

    pub fn is_empty(&self) -> bool {
        self.graph.is_empty()
    }

    pub fn vertex(&self, v: usize, k: u32) -> u32 {
        (k as usize * self.base_len() + v) as u32
    }

    /// `(base vertex, depth)` of a vertex id.
    pub fn coords(&self, x: u32) -> (usize, u32) {
        let n = self.base_len();
        (x as usize % n, (x as usize / n) as u32)
    }

    pub fn depth(&self, x: u32) -> u32 {
        self.coords(x).1
    }

    pub fn base_distance(&self, v: usize, w: usize) -> u32 {
        self.base_dist[v * self.base_len() + w]
    }

    pub fn distance(&self, x: u32, y: u32) -> Result<u32> {
        match self.graph.bfs(x)[y as usize] {
            UNREACHED => Err(Error::Disconnected(x as usize, y as usize)),
            d => Ok(d),
        }
    }

    /// The geodesic that climbs to the apex level, crosses by at most three
    /// horizontal edges, and descends. Among minimal-length shapes the one
    /// with the highest apex is chosen.
    pub fn normal_form_geodesic(&self, x: u32, y: u32) -> Result<NormalForm> {
        let (v, kx) = self.coords(x);
        let (w, ky) = self.coords(y);
        let n = self.base_distance(v, w) as u64;
        let (apex, horizontal) = best_shape(n, kx, ky);
        if apex > self.max_depth {
            return Err(Error::DepthClipped {
                apex,
                max_depth: self.max_depth,
            });
        }
        let mut path = Vec::new();
        for k in kx..=apex {
            path.push(self.vertex(v, k));
        }
        let step = 1u64 << apex;
        let mut p = v;
        while p != w {
            let left = self.base_distance(p, w) as u64;
            let hop = left.min(step) as u32;
            p = (0..self.base_len())
                .find(|&q| self.base_distance(p, q) == hop && self.base_distance(q, w) as u64 == left - hop as u64)
                .expect("base graph is geodesic");
            path.push(self.vertex(p, apex));
        }
        for k in (ky..apex).rev() {
            path.push(self.vertex(w, k));
        }
        Ok(NormalForm {
            apex,
            horizontal: horizontal as u32,
            path,
        })
    }

    /// Largest Hausdorff distance from any geodesic between `x` and `y`
    /// (up to `cap` of them) to the normal-form geodesic.
    pub fn hausdorff_check(&self, x: u32, y: u32, cap: usize) -> Result<HausdorffReport> {
        let nf = self.normal_form_geodesic(x, y)?;
        let to_y = self.graph.bfs(y);
        let (all, partial) = self.graph.all_geodesics(x, y, &to_y, cap);
        let from_nf: Vec<Vec<u32>> = par::map(&nf.path, |&p| self.graph.bfs(p));
        let mut near_nf = vec![UNREACHED; self.len()];
        for row in &from_nf {
            for (m, &d) in near_nf.iter_mut().zip(row) {
                *m = (*m).min(d);
            }
        }
        let max_distance = par::map(&all, |g| {
            let one = g.iter().map(|&p| near_nf[p as usize]).max().unwrap_or(0);
            let other = from_nf
                .iter()
                .map(|row| g.iter().map(|&p| row[p as usize]).min().unwrap_or(0))
                .max()
                .unwrap_or(0);
            one.max(other)
        })
        .into_iter()
        .max()
        .unwrap_or(0);
        Ok(HausdorffReport {
            max_distance,
            geodesics: all.len(),
            partial,
        })
    }

    pub fn label(&self, x: u32) -> String {
        let (v, k) = self.coords(x);
        format!("{}:{k}", self.base_labels[v])
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("source,target\n");
        for (a, b) in self.graph.edges() {
            s.push_str(&self.label(a));
            s.push(',');
            s.push_str(&self.label(b));
            s.push('\n');
        }
        s
    }

    /// Reads an edge list written by [`to_csv`](Self::to_csv). The base graph
    /// is taken from level 0 and the whole edge set is checked against the
    /// horoball rules.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        match lines.next() {
            Some((_, h)) if h.trim() == "source,target" => {}
            _ => return Err(Error::Parse { line: 1, msg: "expected header `source,target`".into() }),
        }
        let mut names: Vec<String> = Vec::new();
        let mut ids: HashMap<String, usize> = HashMap::new();
        let mut raw = Vec::new();
        let mut depth = 0;
        for (i, line) in lines {
            let mut parse = |field: &str| -> Result<(usize, u32)> {
                let (v, k) = field
                    .trim()
                    .rsplit_once(':')
                    .ok_or_else(|| Error::Parse { line: i + 1, msg: format!("bad label `{field}`") })?;
                let k: u32 = k.parse().map_err(|_| Error::Parse { line: i + 1, msg: format!("bad depth `{k}`") })?;
                let next = ids.len();
                let id = *ids.entry(v.to_string()).or_insert_with(|| {
                    names.push(v.to_string());
                    next
                });
                Ok((id, k))
            };
            let (a, b) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse { line: i + 1, msg: "expected two fields".into() })?;
            let (a, b) = (parse(a)?, parse(b)?);
            depth = depth.max(a.1).max(b.1);
            raw.push((a, b));
        }
        if names.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let base = Graph::from_edges(
            names.len(),
            raw.iter().filter(|(a, b)| a.1 == 0 && b.1 == 0).map(|(a, b)| (a.0 as u32, b.0 as u32)),
        );
        let h = HoroballGraph::build_labeled(&base, names, depth, crate::group::ball::DEFAULT_VERTEX_BUDGET)?;
        let n = h.base_len();
        let given = Graph::from_edges(
            h.len(),
            raw.iter().map(|(a, b)| ((a.1 as usize * n + a.0) as u32, (b.1 as usize * n + b.0) as u32)),
        );
        if given != h.graph {
            return Err(Error::Parse { line: 0, msg: "edge list does not follow the horoball rules".into() });
        }
        Ok(h)
    }
}

/// `(apex, horizontal)` minimizing `(apex - kx) + (apex - ky) + ceil(n / 2^apex)`,
/// highest apex on ties, with no depth limit.
pub fn best_shape(n: u64, kx: u32, ky: u32) -> (u32, u64) {
    let lo = kx.max(ky);
    let mut best = (u64::MAX, lo, 0);
    for apex in lo..lo + 64 {
        let h = n.div_ceil(1u64 << apex.min(63));
        let total = (apex - kx) as u64 + (apex - ky) as u64 + h;
        if total <= best.0 {
            best = (total, apex, h);
        }
        if h == 0 {
            break;
        }
    }
    (best.1, best.2)
}

pub fn path_graph(n: usize) -> Graph {
    Graph::from_edges(n, (1..n as u32).map(|i| (i - 1, i)))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Exhaustive oracle: every apex level up to the truncation and the
    /// fewest horizontal hops reaching across.
    fn shape_oracle(n: u64, kx: u32, ky: u32, max: u32) -> u64 {
        (kx.max(ky)..=max)
            .map(|l| (l - kx) as u64 + (l - ky) as u64 + (0..).find(|h| h << l >= n).unwrap())
            .min()
            .unwrap()
    }

    #[test]
    fn single_vertex_is_a_vertical_path() {
        let h = HoroballGraph::build(&path_graph(1), 3).unwrap();
        assert_eq!(h.len(), 4);
        assert_eq!(h.graph.edge_count(), 3);
    }

    #[test]
    fn level_two_spans_four() {
        let h = HoroballGraph::build(&path_graph(9), 2).unwrap();
        for u in 0..9 {
            for w in 0..9 {
                let adj = h.graph.has_edge(h.vertex(u, 2), h.vertex(w, 2));
                assert_eq!(adj, u != w && u.abs_diff(w) <= 4);
            }
        }
    }

    #[test]
    fn path64_examples() {
        let h = HoroballGraph::build(&path_graph(64), 6).unwrap();
        assert_eq!(h.len(), 448);
        let v = |i, k| h.vertex(i, k);
        assert_eq!(h.distance(v(5, 2), v(5, 3)).unwrap(), 1);
        assert_eq!(h.distance(v(0, 0), v(8, 0)).unwrap(), 6);
        assert_eq!(h.distance(v(0, 0), v(3, 0)).unwrap(), 3);
        let nf = h.normal_form_geodesic(v(0, 0), v(8, 0)).unwrap();
        assert_eq!((nf.apex, nf.horizontal, nf.path.len() - 1), (2, 2, 6));
        let nf = h.normal_form_geodesic(v(0, 0), v(48, 0)).unwrap();
        assert_eq!((nf.apex, nf.horizontal, nf.path.len() - 1), (4, 3, 11));
        assert_eq!(shape_oracle(48, 0, 0, 6), 11);
        let nf = h.normal_form_geodesic(v(7, 0), v(7, 5)).unwrap();
        assert_eq!(nf.horizontal, 0);
        assert_eq!(nf.path.len(), 6);
    }

    #[test]
    fn clipped_apex() {
        let h = HoroballGraph::build(&path_graph(64), 2).unwrap();
        let e = h.normal_form_geodesic(h.vertex(0, 0), h.vertex(48, 0)).unwrap_err();
        assert!(matches!(e, Error::DepthClipped { apex: 4, max_depth: 2 }));
    }

    #[test]
    fn hausdorff_small_cases() {
        let h = HoroballGraph::build(&path_graph(64), 6).unwrap();
        let r = h.hausdorff_check(h.vertex(3, 1), h.vertex(3, 4), GEODESIC_CAP).unwrap();
        assert_eq!((r.max_distance, r.geodesics), (0, 1));
        let r = h.hausdorff_check(h.vertex(0, 0), h.vertex(2, 0), GEODESIC_CAP).unwrap();
        assert!(r.max_distance <= 2 && !r.partial);
        let r = h.hausdorff_check(h.vertex(0, 0), h.vertex(8, 0), GEODESIC_CAP).unwrap();
        assert!(r.max_distance <= 4 && r.geodesics > 1);
    }

    #[test]
    fn csv_round_trip_and_rule_check() {
        let h = HoroballGraph::build(&path_graph(5), 2).unwrap();
        let csv = h.to_csv();
        assert!(csv.contains("0:2,4:2"));
        let back = HoroballGraph::from_csv(&csv).unwrap();
        assert_eq!(back.graph.edge_count(), h.graph.edge_count());
        let broken = csv.replace("0:2,4:2\n", "");
        assert!(matches!(HoroballGraph::from_csv(&broken), Err(Error::Parse { .. })));
    }
}
