//! Finite-scale checks of the horoball lemmas in a built cusped space.
//! Every check discards samples whose distances are not certified exact.

use super::CuspedGraph;
use crate::error::{Error, Result};
use crate::graph::UNREACHED;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct CloseReport {
    pub cosets: usize,
    pub samples: usize,
    pub discarded: usize,
    pub max_distance: u32,
    pub bound: f64,
    pub violations: usize,
}

/// Geodesics from the basepoint that meet a coset only at their last
/// vertex end within `6 delta + 4` of the coset's closest point.
pub fn lemma_close(space: &CuspedGraph, cosets: &[usize], delta: f64) -> CloseReport {
    let from_base = space.bfs(space.basepoint());
    let bound = 6.0 * delta + 4.0;
    let per = crate::par::map(cosets, |&c| {
        let mut r = CloseReport::default();
        let members = &space.cosets[c].members;
        let q = space.closest_point(c, &from_base);
        let from_q = space.bfs(q);
        if !space.certified(space.basepoint(), q, from_base[q as usize]) {
            r.discarded += members.len();
            return r;
        }
        for &a in members {
            let da = from_base[a as usize];
            if !space.certified(space.basepoint(), a, da) || !space.certified(q, a, from_q[a as usize]) {
                r.discarded += 1;
                continue;
            }
            let path = space.graph.geodesic_with(space.basepoint(), a, &from_base).expect("connected");
            let touches_early = path[..path.len() - 1].iter().any(|v| members.binary_search(v).is_ok());
            if touches_early {
                continue;
            }
            r.samples += 1;
            let d = from_q[a as usize];
            r.max_distance = r.max_distance.max(d);
            if d as f64 > bound {
                r.violations += 1;
            }
        }
        r
    });
    let mut out = CloseReport {
        cosets: cosets.len(),
        bound,
        ..Default::default()
    };
    for r in per {
        out.samples += r.samples;
        out.discarded += r.discarded;
        out.violations += r.violations;
        out.max_distance = out.max_distance.max(r.max_distance);
    }
    out
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct QcReport {
    pub pairs: usize,
    pub discarded: usize,
    /// Largest distance to the horoball along a geodesic, minus `N`.
    pub max_excess: i64,
    pub bound: f64,
    pub violations: usize,
}

/// Distances to the horoball over coset `c` (all levels).
pub fn horoball_distance_field(space: &CuspedGraph, c: usize) -> Vec<u32> {
    space.graph.multi_bfs(&space.horoball_vertices(c))
}

/// Uniformly sampled vertex pairs within `n` of the horoball over `c`.
pub fn sample_near_pairs<R: Rng>(
    space: &CuspedGraph,
    c: usize,
    n: u32,
    count: usize,
    rng: &mut R,
) -> Result<Vec<(u32, u32)>> {
    let field = horoball_distance_field(space, c);
    let near: Vec<u32> = (0..space.len() as u32)
        .filter(|&v| field[v as usize] <= n && space.frontier_distance[v as usize] > 0)
        .collect();
    if near.len() < 2 {
        return Err(Error::SampleExhausted(format!("fewer than two vertices within {n} of coset {c}")));
    }
    Ok((0..count)
        .map(|_| {
            let pick: Vec<u32> = near.choose_multiple(rng, 2).copied().collect();
            (pick[0], pick[1])
        })
        .collect())
}

/// Every vertex of a geodesic between two points within `n` of the
/// horoball over `c` lies within `n + 2 delta` of it.
pub fn check_quasiconvexity(space: &CuspedGraph, c: usize, pairs: &[(u32, u32)], n: u32, delta: f64) -> QcReport {
    let field = horoball_distance_field(space, c);
    let bound = n as f64 + 2.0 * delta;
    let results = crate::par::map(pairs, |&(a, b)| {
        if field[a as usize] > n || field[b as usize] > n {
            return None;
        }
        let from_a = space.bfs(a);
        let d = from_a[b as usize];
        if d == UNREACHED || !space.certified(a, b, d) {
            return None;
        }
        let path = space.graph.geodesic_with(a, b, &from_a).ok()?;
        let mut worst = 0i64;
        for &p in &path {
            let h = field[p as usize];
            // a distance to the horoball is exact once it cannot be beaten
            // by a path through the frontier
            if h as u64 > space.frontier_distance[p as usize] as u64 + 2 {
                return None;
            }
            worst = worst.max(h as i64);
        }
        Some(worst - n as i64)
    });
    let mut r = QcReport {
        bound,
        max_excess: i64::MIN,
        ..Default::default()
    };
    for x in results {
        match x {
            Some(e) => {
                r.pairs += 1;
                r.max_excess = r.max_excess.max(e);
                if (e + n as i64) as f64 > bound {
                    r.violations += 1;
                }
            }
            None => r.discarded += 1,
        }
    }
    if r.pairs == 0 {
        r.max_excess = 0;
    }
    r
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DeepReport {
    pub delta_used: f64,
    pub length: u32,
    /// `[N + 3 delta, k - (N + 3 delta)]`, rounded inward.
    pub window: (u32, u32),
    pub vacuous: bool,
    /// Smallest depth seen inside the window.
    pub min_depth_in_window: Option<u32>,
    pub holds: bool,
    /// For geodesics starting on the coset: whether some geodesic between
    /// the same endpoints starts with a vertical run of length
    /// `ceil((k - (N + 3 delta)) / 2)`; `None` when that run is clipped.
    pub vertical_start: Option<bool>,
}

/// Deep penetration along `path` for the horoball over coset `c`.
pub fn check_deep_penetration(space: &CuspedGraph, c: usize, path: &[u32], n: u32, delta: f64) -> Result<DeepReport> {
    let k = path.len() as u32 - 1;
    let margin = n as f64 + 3.0 * delta;
    if (k as f64) < 2.0 * margin {
        return Err(Error::TooShort {
            len: k as usize,
            needed: (2.0 * margin).ceil() as usize,
        });
    }
    let lo = margin.ceil() as u32;
    let hi = (k as f64 - margin).floor() as u32;
    let need = delta.ceil() as u32;
    let mut min_depth = None;
    let mut holds = true;
    for &v in &path[lo as usize..=hi as usize] {
        let d = if space.coset_of_vertex(v) == Some(c) { space.depth[v as usize] } else { 0 };
        min_depth = Some(min_depth.map_or(d, |m: u32| m.min(d)));
        if d < need {
            holds = false;
        }
    }
    let start = path[0];
    let vertical_start = if space.is_cayley(start) && space.cosets[c].members.binary_search(&start).is_ok() {
        let run = ((k as f64 - margin) / 2.0).ceil() as u32;
        space.horoball_vertex(c, start, run).map(|w| {
            let to_end = space.bfs(w)[path[k as usize] as usize];
            run as u64 + to_end as u64 == k as u64
        })
    } else {
        None
    };
    Ok(DeepReport {
        delta_used: delta,
        length: k,
        window: (lo, hi),
        vacuous: lo > hi,
        min_depth_in_window: min_depth,
        holds,
        vertical_start,
    })
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct TightReport {
    pub pairs: usize,
    pub discarded: usize,
    pub max_entry_distance: u32,
    pub bound: f64,
    pub violations: usize,
}

/// First entry points into the level `level` horosphere of canonical
/// geodesics from the basepoint to vertices of depth at least `level` in
/// the horoball over `c` are pairwise within `2 delta + 1`.
pub fn lemma_tight(space: &CuspedGraph, c: usize, level: u32, delta: f64) -> TightReport {
    let base = space.basepoint();
    let from_base = space.bfs(base);
    let bound = 2.0 * delta + 1.0;
    let mut entries = Vec::new();
    let mut discarded = 0;
    for t in space.horoball_vertices(c) {
        if space.depth[t as usize] < level {
            continue;
        }
        if !space.certified(base, t, from_base[t as usize]) {
            discarded += 1;
            continue;
        }
        let path = space.graph.geodesic_with(base, t, &from_base).expect("connected");
        let x = *path
            .iter()
            .find(|&&p| space.coset_of_vertex(p) == Some(c) && space.depth[p as usize] == level)
            .expect("a geodesic into the horoball crosses each horosphere");
        entries.push(x);
    }
    entries.sort_unstable();
    entries.dedup();
    let mut r = TightReport {
        bound,
        discarded,
        ..Default::default()
    };
    for (i, &x) in entries.iter().enumerate() {
        let from_x = space.bfs(x);
        for &y in &entries[i + 1..] {
            let d = from_x[y as usize];
            if !space.certified(x, y, d) {
                r.discarded += 1;
                continue;
            }
            r.pairs += 1;
            r.max_entry_distance = r.max_entry_distance.max(d);
            if d as f64 > bound {
                r.violations += 1;
            }
        }
    }
    r
}
