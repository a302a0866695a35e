//! Plain-text cache of a built cusped space.
//!
//! ```text
//! cuspidal-cache <version>
//! model <hash>
//! radius <R>
//! depth <D>
//! [cosets] index,peripheral,representative,size
//! [vertices] id,coset,depth,base,length,label
//! [edges] a,b,letter          letter is `-` off the Cayley ball
//! ```

use super::{CuspedGraph, NO_COSET};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::group::{peripheral_cosets_in_ball, CayleyBall, GroupModel};
use crate::word::Letter;
use std::fmt::Write;

pub const CACHE_VERSION: &str = concat!("1/", env!("CARGO_PKG_VERSION"));

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

impl CuspedGraph {
    pub fn to_cache(&self, model: &GroupModel) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "cuspidal-cache {CACHE_VERSION}");
        let _ = writeln!(s, "model {}", self.model_hash);
        let _ = writeln!(s, "radius {}", self.radius);
        let _ = writeln!(s, "depth {}", self.max_depth);
        let _ = writeln!(s, "[cosets] {}", self.cosets.len());
        for (i, c) in self.cosets.iter().enumerate() {
            let _ = writeln!(s, "{i},{},{},{}", c.peripheral, c.representative, c.members.len());
        }
        let _ = writeln!(s, "[vertices] {}", self.len());
        for v in 0..self.len() {
            let coset = match self.coset[v] {
                NO_COSET => "-".to_string(),
                c => c.to_string(),
            };
            let label = if self.is_cayley(v as u32) {
                self.ball.label(model, v as u32)
            } else {
                String::new()
            };
            let length = if self.is_cayley(v as u32) { self.ball.length[v] } else { 0 };
            let _ = writeln!(s, "{v},{coset},{},{},{length},{label}", self.depth[v], self.base[v]);
        }
        let labeled: std::collections::HashSet<(u32, u32)> =
            self.ball.edges.iter().map(|&(a, b, _)| (a.min(b), a.max(b))).collect();
        let _ = writeln!(s, "[edges] {}", self.ball.edges.len() + self.graph.edge_count() - labeled.len());
        for &(a, b, l) in &self.ball.edges {
            let _ = writeln!(s, "{a},{b},{}", model.format(&[l]));
        }
        for (a, b) in self.graph.edges() {
            if !labeled.contains(&(a, b)) {
                let _ = writeln!(s, "{a},{b},-");
            }
        }
        s
    }

    /// Restores a space written by [`to_cache`](Self::to_cache). The model
    /// must be the one the cache was built from.
    pub fn from_cache(text: &str, model: &GroupModel) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut header = |key: &str| -> Result<String> {
            let (i, l) = lines.next().ok_or_else(|| perr(0, "truncated header"))?;
            l.strip_prefix(key)
                .map(|v| v.trim().to_string())
                .ok_or_else(|| perr(i, format!("expected `{key}`")))
        };
        let version = header("cuspidal-cache")?;
        if version != CACHE_VERSION {
            return Err(Error::StaleCache(format!("cache version {version}, expected {CACHE_VERSION}")));
        }
        let hash = header("model")?;
        if hash != model.hash() {
            return Err(Error::StaleCache(format!("cache built for model {hash}, config is {}", model.hash())));
        }
        let num = |s: String, line: usize| s.parse::<usize>().map_err(|_| perr(line, "expected a number"));
        let radius = num(header("radius")?, 3)? as u32;
        let depth = num(header("depth")?, 4)? as u32;
        let ncosets = num(header("[cosets]")?, 5)?;
        let mut stored_cosets = Vec::with_capacity(ncosets);
        for _ in 0..ncosets {
            let (i, l) = lines.next().ok_or_else(|| perr(0, "truncated coset table"))?;
            let f: Vec<&str> = l.split(',').collect();
            let parse = |k: usize| f.get(k).and_then(|x| x.parse::<u32>().ok()).ok_or_else(|| perr(i, "bad coset row"));
            stored_cosets.push((parse(1)? as usize, parse(2)?, parse(3)? as usize));
        }
        let (hi, hl) = lines.next().ok_or_else(|| perr(0, "missing vertex table"))?;
        let nv = num(hl.strip_prefix("[vertices]").ok_or_else(|| perr(hi, "expected [vertices]"))?.trim().to_string(), hi)?;
        let (mut coset, mut dep, mut base) = (Vec::with_capacity(nv), Vec::with_capacity(nv), Vec::with_capacity(nv));
        let (mut labels, mut length) = (Vec::new(), Vec::new());
        for _ in 0..nv {
            let (i, l) = lines.next().ok_or_else(|| perr(0, "truncated vertex table"))?;
            let f: Vec<&str> = l.splitn(6, ',').collect();
            if f.len() != 6 {
                return Err(perr(i, "bad vertex row"));
            }
            let p = |k: usize| f[k].parse::<u32>().map_err(|_| perr(i, "bad vertex row"));
            let c = if f[1] == "-" { NO_COSET } else { p(1)? };
            coset.push(c);
            dep.push(p(2)?);
            base.push(p(3)?);
            if c == NO_COSET {
                length.push(p(4)?);
                labels.push(f[5].to_string());
            }
        }
        let (ei, el) = lines.next().ok_or_else(|| perr(0, "missing edge table"))?;
        let ne = num(el.strip_prefix("[edges]").ok_or_else(|| perr(ei, "expected [edges]"))?.trim().to_string(), ei)?;
        let mut edges = Vec::with_capacity(ne);
        let mut ball_edges = Vec::new();
        for _ in 0..ne {
            let (i, l) = lines.next().ok_or_else(|| perr(0, "truncated edge table"))?;
            let f: Vec<&str> = l.split(',').collect();
            if f.len() != 3 {
                return Err(perr(i, "bad edge row"));
            }
            let a: u32 = f[0].parse().map_err(|_| perr(i, "bad edge row"))?;
            let b: u32 = f[1].parse().map_err(|_| perr(i, "bad edge row"))?;
            if a as usize >= nv || b as usize >= nv {
                return Err(perr(i, "edge endpoint out of range"));
            }
            edges.push((a, b));
            if f[2] != "-" {
                let letter: Letter = if model.graph.is_some() {
                    Letter::gen(0)
                } else {
                    *model.parse(f[2])?.first().ok_or_else(|| perr(i, "bad edge letter"))?
                };
                ball_edges.push((a, b, letter));
            }
        }
        let ball = CayleyBall::from_parts(model, radius, labels, length, ball_edges)?;
        let mut cosets = Vec::new();
        for p in 0..model.peripherals.len() {
            cosets.extend(peripheral_cosets_in_ball(&ball, model, p)?);
        }
        let consistent = cosets.len() == stored_cosets.len()
            && cosets
                .iter()
                .zip(&stored_cosets)
                .all(|(c, s)| (c.peripheral, c.representative, c.members.len()) == *s);
        if !consistent {
            return Err(Error::StaleCache("coset table does not match the model".into()));
        }
        let n = ball.len();
        let mut horo_start = Vec::with_capacity(cosets.len());
        let mut total = n;
        for c in &cosets {
            horo_start.push(total as u32);
            total += c.members.len() * depth as usize;
        }
        if total != nv {
            return Err(Error::StaleCache("vertex count does not match the coset table".into()));
        }
        let mut coset_index = vec![vec![NO_COSET; n]; model.peripherals.len()];
        for (ci, c) in cosets.iter().enumerate() {
            for &v in &c.members {
                coset_index[c.peripheral][v as usize] = ci as u32;
            }
        }
        let cayley = Graph::from_edges(n, ball.edges.iter().map(|&(a, b, _)| (a, b)));
        let mut space = CuspedGraph {
            radius,
            max_depth: depth,
            model_hash: hash,
            ball,
            cosets,
            graph: Graph::from_edges(nv, edges),
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
}
