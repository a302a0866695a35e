//! Unit-weight undirected graphs in compressed sparse row form, with
//! breadth-first search and canonical geodesics.

use crate::error::{Error, Result};
use std::collections::VecDeque;

pub const UNREACHED: u32 = u32::MAX;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Graph {
    offsets: Vec<u32>,
    targets: Vec<u32>,
}

impl Graph {
    /// Builds from an undirected edge list. Loops and duplicate edges are
    /// dropped; neighbour lists come out sorted.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut pairs: Vec<(u32, u32)> = Vec::new();
        for (a, b) in edges {
            if a != b {
                pairs.push((a, b));
                pairs.push((b, a));
            }
        }
        pairs.sort_unstable();
        pairs.dedup();
        let mut offsets = vec![0u32; n + 1];
        for &(a, _) in &pairs {
            offsets[a as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        Graph {
            offsets,
            targets: pairs.into_iter().map(|(_, b)| b).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.offsets.len().saturating_sub(1)
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }

    pub fn neighbors(&self, v: u32) -> &[u32] {
        let v = v as usize;
        &self.targets[self.offsets[v] as usize..self.offsets[v + 1] as usize]
    }

    pub fn has_edge(&self, a: u32, b: u32) -> bool {
        self.neighbors(a).binary_search(&b).is_ok()
    }

    /// Each undirected edge once, as `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.len() as u32).flat_map(move |a| {
            self.neighbors(a).iter().filter(move |&&b| a < b).map(move |&b| (a, b))
        })
    }

    pub fn bfs(&self, source: u32) -> Vec<u32> {
        self.multi_bfs(&[source])
    }

    pub fn multi_bfs(&self, sources: &[u32]) -> Vec<u32> {
        self.bfs_masked(sources, |_| true)
    }

    /// BFS that only enters vertices accepted by `keep`.
    pub fn bfs_masked(&self, sources: &[u32], keep: impl Fn(u32) -> bool) -> Vec<u32> {
        let mut dist = vec![UNREACHED; self.len()];
        let mut queue = VecDeque::with_capacity(sources.len());
        for &s in sources {
            if dist[s as usize] == UNREACHED && keep(s) {
                dist[s as usize] = 0;
                queue.push_back(s);
            }
        }
        while let Some(v) = queue.pop_front() {
            let dv = dist[v as usize] + 1;
            for &w in self.neighbors(v) {
                if dist[w as usize] == UNREACHED && keep(w) {
                    dist[w as usize] = dv;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// `d(a, b)` when it is at most `limit`, exploring only that ball.
    pub fn bounded_distance(&self, a: u32, b: u32, limit: u32) -> Option<u32> {
        if a == b {
            return Some(0);
        }
        let mut seen = std::collections::HashSet::from([a]);
        let mut layer = vec![a];
        for d in 1..=limit {
            let mut next = Vec::new();
            for v in layer {
                for &w in self.neighbors(v) {
                    if w == b {
                        return Some(d);
                    }
                    if seen.insert(w) {
                        next.push(w);
                    }
                }
            }
            layer = next;
        }
        None
    }

    /// Canonical geodesic from `x` to `y`: the path to `x` in the BFS tree
    /// of `x` where every vertex's parent is its least-id neighbour one
    /// layer closer. `from_x` must be `bfs(x)`.
    pub fn geodesic_with(&self, x: u32, y: u32, from_x: &[u32]) -> Result<Vec<u32>> {
        if from_x[y as usize] == UNREACHED {
            return Err(Error::Disconnected(x as usize, y as usize));
        }
        let mut path = vec![y];
        let mut v = y;
        while v != x {
            let d = from_x[v as usize];
            v = *self
                .neighbors(v)
                .iter()
                .find(|&&w| from_x[w as usize] + 1 == d)
                .expect("bfs layers are consistent");
            path.push(v);
        }
        path.reverse();
        Ok(path)
    }

    pub fn geodesic(&self, x: u32, y: u32) -> Result<Vec<u32>> {
        self.geodesic_with(x, y, &self.bfs(x))
    }

    /// Connected component labels of the subgraph on vertices accepted by
    /// `keep`; removed vertices get `UNREACHED`.
    pub fn components(&self, keep: impl Fn(u32) -> bool) -> Vec<u32> {
        let mut label = vec![UNREACHED; self.len()];
        let mut next = 0;
        let mut stack = Vec::new();
        for s in 0..self.len() as u32 {
            if label[s as usize] != UNREACHED || !keep(s) {
                continue;
            }
            label[s as usize] = next;
            stack.push(s);
            while let Some(v) = stack.pop() {
                for &w in self.neighbors(v) {
                    if label[w as usize] == UNREACHED && keep(w) {
                        label[w as usize] = next;
                        stack.push(w);
                    }
                }
            }
            next += 1;
        }
        label
    }

    /// All geodesics from `x` to `y`, in lexicographic order, stopping
    /// after `cap`. The flag is true when the cap cut the enumeration short.
    pub fn all_geodesics(&self, x: u32, y: u32, to_y: &[u32], cap: usize) -> (Vec<Vec<u32>>, bool) {
        let mut out = Vec::new();
        if to_y[x as usize] == UNREACHED {
            return (out, false);
        }
        let mut path = vec![x];
        let truncated = self.extend_geodesics(&mut path, y, to_y, cap, &mut out);
        (out, truncated)
    }

    fn extend_geodesics(
        &self,
        path: &mut Vec<u32>,
        y: u32,
        to_y: &[u32],
        cap: usize,
        out: &mut Vec<Vec<u32>>,
    ) -> bool {
        let v = *path.last().unwrap();
        if v == y {
            if out.len() >= cap {
                return true;
            }
            out.push(path.clone());
            return false;
        }
        let d = to_y[v as usize];
        for &w in self.neighbors(v) {
            if to_y[w as usize] + 1 == d {
                path.push(w);
                let stop = self.extend_geodesics(path, y, to_y, cap, out);
                path.pop();
                if stop {
                    return true;
                }
            }
        }
        false
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle(n: u32) -> Graph {
        Graph::from_edges(n as usize, (0..n).map(|i| (i, (i + 1) % n)))
    }

    #[test]
    fn bfs_on_cycle() {
        let g = cycle(6);
        assert_eq!(g.bfs(0), vec![0, 1, 2, 3, 2, 1]);
        assert_eq!(g.edge_count(), 6);
    }

    #[test]
    fn canonical_geodesic_takes_least_parent() {
        let g = cycle(6);
        assert_eq!(g.geodesic(0, 3).unwrap(), vec![0, 1, 2, 3]);
        assert_eq!(g.geodesic(3, 0).unwrap(), vec![3, 2, 1, 0]);
        let (all, cut) = g.all_geodesics(0, 3, &g.bfs(3), 10);
        assert_eq!(all.len(), 2);
        assert!(!cut);
        let (some, cut) = g.all_geodesics(0, 3, &g.bfs(3), 1);
        assert_eq!(some.len(), 1);
        assert!(cut);
    }

    #[test]
    fn masked_components() {
        let g = cycle(6);
        let lab = g.components(|v| v != 0 && v != 3);
        assert_ne!(lab[1], lab[4]);
        assert_eq!(lab[1], lab[2]);
        assert_eq!(lab[0], UNREACHED);
        let dist = g.bfs_masked(&[1], |v| v != 0);
        assert_eq!(dist[5], 4);
    }

    #[test]
    fn disconnected_geodesic() {
        let g = Graph::from_edges(3, [(0, 1)]);
        assert!(matches!(g.geodesic(0, 2), Err(Error::Disconnected(0, 2))));
    }
}
