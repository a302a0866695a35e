//! Bass–Serre tree navigation for one-edge splittings and the ordered
//! sequence of separating edge cosets between two boundary approximations.
//!
//! Tree nodes are named by canonical words: an edge `gC` by the key its
//! peripheral coset carries in the cusped space, a vertex `gF` by a prefix
//! of the normal form of `g`.

use crate::boundary::RayApprox;
use crate::cusped::{CuspedGraph, NO_COSET};
use crate::error::{Error, Result};
use crate::group::amalgam::Factor;
use crate::group::{GroupModel, PeripheralKind, SplittingSpec};
use crate::word::{mul, Letter, Word};
use serde::Serialize;
use std::collections::HashMap;

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum TreeNode {
    Edge(Word),
    Vertex(Factor, Word),
}

/// Index of the peripheral whose cosets are the tree edges.
pub fn edge_peripheral(model: &GroupModel) -> Result<usize> {
    let splitting = model
        .splitting
        .as_ref()
        .ok_or_else(|| Error::NormalFormUnavailable("no splitting".into()))?;
    for (i, p) in model.peripherals.iter().enumerate() {
        let PeripheralKind::Cyclic(w) = &p.kind else { continue };
        let hit = match splitting {
            SplittingSpec::Amalgam(o) => {
                crate::word::free_power_exponent(w, &o.u).is_some_and(|k| k.abs() == 1)
                    || crate::word::free_power_exponent(w, &o.v).is_some_and(|k| k.abs() == 1)
            }
            SplittingSpec::Hnn(o) => crate::group::hnn_side(o, w).is_some(),
        };
        if hit {
            return Ok(i);
        }
    }
    Err(Error::NormalFormUnavailable("no peripheral is the edge group".into()))
}

/// Tree path from the root (the edge `C` for amalgams, the vertex `A` for
/// HNN extensions) to the edge `hC`.
pub fn edge_path(model: &GroupModel, nf: &[Letter]) -> Result<Vec<TreeNode>> {
    match &model.splitting {
        Some(SplittingSpec::Amalgam(o)) => {
            let d = o.decompose(nf);
            let mut path = vec![TreeNode::Edge(Vec::new())];
            let mut prefix = Vec::new();
            for (f, s) in &d.syllables {
                path.push(TreeNode::Vertex(*f, prefix.clone()));
                prefix.extend_from_slice(s);
                path.push(TreeNode::Edge(prefix.clone()));
            }
            Ok(path)
        }
        Some(SplittingSpec::Hnn(o)) => {
            // the edge h<u> joins hA and h t^-1 A; x<v> is h<u> with h = x t
            let p = edge_peripheral(model)?;
            let (key, _) = model.coset_of(nf, p)?;
            let side = crate::group::hnn_side(o, &peripheral_word(model, p)).map(|s| s.1);
            let h = match side {
                Some(crate::group::HnnSide::V) => mul(nf, &[Letter::gen(o.stable)]),
                _ => nf.to_vec(),
            };
            let a = vertex_path(model, &h, Factor::A)?;
            let b = vertex_path(model, &mul(&h, &[Letter::inv_gen(o.stable)]), Factor::A)?;
            let mut longer = if a.len() > b.len() { a } else { b };
            longer.pop();
            debug_assert_eq!(longer.last(), Some(&TreeNode::Edge(key)));
            Ok(longer)
        }
        None => Err(Error::NormalFormUnavailable("no splitting".into())),
    }
}

fn peripheral_word(model: &GroupModel, p: usize) -> Word {
    match &model.peripherals[p].kind {
        PeripheralKind::Cyclic(w) => w.clone(),
        _ => Vec::new(),
    }
}

/// Tree path from the root to the vertex `hF`.
pub fn vertex_path(model: &GroupModel, nf: &[Letter], factor: Factor) -> Result<Vec<TreeNode>> {
    match &model.splitting {
        Some(SplittingSpec::Amalgam(o)) => {
            let d = o.decompose(nf);
            let n = d.syllables.len();
            let prefix_len = match d.syllables.last() {
                Some((f, _)) if *f == factor => n - 1,
                _ => n,
            };
            let prefix: Word = d.syllables[..prefix_len].iter().flat_map(|(_, s)| s.iter().copied()).collect();
            let mut path = edge_path(model, &prefix)?;
            path.push(TreeNode::Vertex(factor, prefix));
            Ok(path)
        }
        Some(SplittingSpec::Hnn(o)) => {
            let d = o.decompose(nf);
            let p = edge_peripheral(model)?;
            let mut path = vec![TreeNode::Vertex(Factor::A, Vec::new())];
            let mut prefix: Word = Vec::new();
            for (i, &e) in d.exps.iter().enumerate() {
                prefix.extend_from_slice(&d.pieces[i]);
                let t = if e == 1 { Letter::gen(o.stable) } else { Letter::inv_gen(o.stable) };
                let next = mul(&prefix, &[t]);
                // edge {gA, g t A} is keyed by the coset of g t; {gA, g t^-1 A} by that of g
                let keyed = if e == 1 { next.clone() } else { prefix.clone() };
                path.push(TreeNode::Edge(edge_key_hnn(model, p, &keyed)?));
                prefix = next;
                path.push(TreeNode::Vertex(Factor::A, prefix.clone()));
            }
            Ok(path)
        }
        None => Err(Error::NormalFormUnavailable("no splitting".into())),
    }
}

/// Key of the edge `{gA, g t^-1 A}` in the coset table of peripheral `p`.
fn edge_key_hnn(model: &GroupModel, p: usize, g: &[Letter]) -> Result<Word> {
    let Some(SplittingSpec::Hnn(o)) = &model.splitting else { unreachable!() };
    let side = crate::group::hnn_side(o, &peripheral_word(model, p)).map(|s| s.1);
    // the peripheral coset x<v> is keyed by x t<u>, so g<u> is x<v> with x = g t^-1
    let x = match side {
        Some(crate::group::HnnSide::V) => mul(g, &[Letter::inv_gen(o.stable)]),
        _ => g.to_vec(),
    };
    let nf = model.base_normal_form(&x)?;
    Ok(model.coset_of(&nf, p)?.0)
}

/// Where a ray ends in the tree: the edge of its horoball, or the vertex
/// coset it entered last.
pub fn terminal_node(space: &CuspedGraph, model: &GroupModel, ray: &RayApprox) -> Result<(TreeNode, Vec<TreeNode>)> {
    let end = ray.end();
    let p = edge_peripheral(model)?;
    let edge_of = |c: usize| -> Result<(TreeNode, Vec<TreeNode>)> {
        let rep = space.cosets[c].representative;
        let path = edge_path(model, &space.ball.normal_forms[rep as usize])?;
        Ok((path.last().unwrap().clone(), path))
    };
    if let Some(c) = space.coset_of_vertex(end) {
        if space.cosets[c].peripheral == p {
            return edge_of(c);
        }
    }
    let base = space.base[end as usize];
    let nf = &space.ball.normal_forms[base as usize];
    let factor = match &model.splitting {
        Some(SplittingSpec::Hnn(_)) => Some(Factor::A),
        _ => {
            let prev = ray.vertices.len().checked_sub(2).map(|i| ray.vertices[i]);
            match prev {
                Some(a) if space.is_cayley(a) && space.is_cayley(end) => {
                    let l = cayley_letter(space, model, a, end)?;
                    if is_edge_letter(model, p, l) {
                        None
                    } else {
                        model.letter_factor(l)
                    }
                }
                _ => None,
            }
        }
    };
    match factor {
        Some(f) => {
            let path = vertex_path(model, nf, f)?;
            Ok((path.last().unwrap().clone(), path))
        }
        None => {
            let c = space.coset_index[p][base as usize];
            if c == NO_COSET {
                return Err(Error::NormalFormUnavailable("ray end outside any edge coset".into()));
            }
            edge_of(c as usize)
        }
    }
}

fn is_edge_letter(model: &GroupModel, p: usize, l: Letter) -> bool {
    model.peripherals[p].generator_words.iter().any(|w| w.len() == 1 && w[0].index() == l.index())
}

/// Generator `l` with `a l = b`.
pub fn cayley_letter(space: &CuspedGraph, model: &GroupModel, a: u32, b: u32) -> Result<Letter> {
    let na = &space.ball.normal_forms[a as usize];
    let nb = &space.ball.normal_forms[b as usize];
    for r in 0..2 * model.alphabet.len() as u32 {
        let l = Letter::from_rank(r);
        if &model.base_normal_form(&mul(na, &model.expand(&[l])))? == nb {
            return Ok(l);
        }
    }
    Err(Error::NormalFormUnavailable("vertices are not adjacent".into()))
}

/// Edges of the tree crossed by a ray leaving the basepoint from the
/// vertex `A`, in order.
pub fn tree_path(space: &CuspedGraph, model: &GroupModel, ray: &RayApprox) -> Result<Vec<Word>> {
    let (_, path) = terminal_node(space, model, ray)?;
    let start = vertex_path(model, &[], Factor::A)?;
    Ok(tree_geodesic(&start, &path)
        .into_iter()
        .filter_map(|n| match n {
            TreeNode::Edge(k) => Some(k),
            _ => None,
        })
        .collect())
}

/// Nodes on the tree geodesic between two rooted paths, first to last.
pub fn tree_geodesic(p: &[TreeNode], q: &[TreeNode]) -> Vec<TreeNode> {
    let k = p.iter().zip(q).take_while(|(a, b)| a == b).count();
    assert!(k >= 1, "paths share the root");
    let mut out: Vec<TreeNode> = p[k - 1..].iter().rev().cloned().collect();
    out.extend_from_slice(&q[k..]);
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SequenceKind {
    Finite,
    /// Infinite towards `x` only.
    IdealX,
    IdealY,
    BiInfinite,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutPoint {
    pub coset_key: Word,
    /// Index in the space's coset table, when the coset meets the ball.
    pub coset: Option<usize>,
    /// Closest point of the coset to the basepoint.
    pub q: Option<u32>,
    pub dist_to_base: Option<u32>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CutPointSequence {
    pub points: Vec<CutPoint>,
    pub kind: SequenceKind,
    /// The vertex cosets between consecutive cut points.
    pub between: Vec<TreeNode>,
    pub x_terminal: TreeNode,
    pub y_terminal: TreeNode,
}

/// A ray is treated as ideal when its tree position kept moving over the
/// last third of its length.
pub fn looks_ideal(space: &CuspedGraph, model: &GroupModel, ray: &RayApprox) -> Result<bool> {
    let t = ray.resolution();
    if t < 3 {
        return Ok(false);
    }
    let early = ray.truncate(t - t / 3);
    let (_, pa) = terminal_node(space, model, &early)?;
    let (_, pb) = terminal_node(space, model, ray)?;
    Ok(pb.len() > pa.len())
}

pub fn cut_point_sequence(
    space: &CuspedGraph,
    model: &GroupModel,
    x: &RayApprox,
    y: &RayApprox,
    index: &CosetIndex,
) -> Result<CutPointSequence> {
    let (xt, xp) = terminal_node(space, model, x)?;
    let (yt, yp) = terminal_node(space, model, y)?;
    let geo = tree_geodesic(&xp, &yp);
    let from_base = space.bfs(space.basepoint());
    let mut points = Vec::new();
    let mut between = Vec::new();
    let interior = if geo.len() > 2 { &geo[1..geo.len() - 1] } else { &[][..] };
    for node in interior {
        match node {
            TreeNode::Edge(k) => {
                let c = index.get(k);
                let q = c.map(|c| space.closest_point(c, &from_base));
                points.push(CutPoint {
                    coset_key: k.clone(),
                    coset: c,
                    q,
                    dist_to_base: q.map(|q| from_base[q as usize]),
                });
            }
            v => between.push(v.clone()),
        }
    }
    let kind = match (looks_ideal(space, model, x)?, looks_ideal(space, model, y)?) {
        (false, false) => SequenceKind::Finite,
        (true, false) => SequenceKind::IdealX,
        (false, true) => SequenceKind::IdealY,
        (true, true) => SequenceKind::BiInfinite,
    };
    Ok(CutPointSequence {
        points,
        kind,
        between,
        x_terminal: xt,
        y_terminal: yt,
    })
}

/// Coset key to coset index for the edge peripheral.
pub struct CosetIndex {
    map: HashMap<Word, usize>,
}

impl CosetIndex {
    pub fn new(space: &CuspedGraph, model: &GroupModel) -> Result<Self> {
        let p = edge_peripheral(model)?;
        Ok(CosetIndex {
            map: space
                .cosets
                .iter()
                .enumerate()
                .filter(|(_, c)| c.peripheral == p)
                .map(|(i, c)| (c.key.clone(), i))
                .collect(),
        })
    }

    pub fn get(&self, key: &[Letter]) -> Option<usize> {
        self.map.get(key).copied()
    }

    pub fn cosets(&self) -> impl Iterator<Item = usize> + '_ {
        self.map.values().copied()
    }
}

/// Removes coset `c` and its horoball and reports whether `x_end` and
/// `y_end` land in different components.
pub fn separation_check(space: &CuspedGraph, c: Option<usize>, x_end: u32, y_end: u32) -> Result<bool> {
    let removed = |v: u32| match c {
        None => false,
        Some(c) => {
            space.coset_of_vertex(v) == Some(c)
                || (space.is_cayley(v) && space.cosets[c].members.binary_search(&v).is_ok())
        }
    };
    if removed(x_end) || removed(y_end) {
        return Err(Error::EndpointRemoved);
    }
    let dist = space.graph.bfs_masked(&[x_end], |v| !removed(v));
    Ok(dist[y_end as usize] == crate::graph::UNREACHED)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize)]
pub struct OracleReport {
    pub pairs: usize,
    pub emitted: usize,
    /// Emitted cosets that fail to separate.
    pub false_cuts: usize,
    /// Separating cosets on the tree geodesic that were not emitted
    /// (checked when the sequence is short).
    pub missed: usize,
    /// Separating cosets off the tree geodesic. These are cut points inside
    /// a vertex coset's limit set, so nonzero only when a vertex group's
    /// relative boundary has cut points of its own.
    pub off_tree: usize,
    pub exhaustive_pairs: usize,
    /// Emitted cosets outside the ball.
    pub unlocated: usize,
    pub skipped: usize,
}

/// Runs the separation oracle over every emitted cut point, and over every
/// edge coset of the ball when a sequence has at most `exhaustive_len`
/// points.
pub fn oracle_agreement(
    space: &CuspedGraph,
    model: &GroupModel,
    pairs: &[(RayApprox, RayApprox)],
    exhaustive_len: usize,
) -> Result<OracleReport> {
    let index = CosetIndex::new(space, model)?;
    let all: Vec<usize> = {
        let mut v: Vec<usize> = index.cosets().collect();
        v.sort_unstable();
        v
    };
    let mut rep = OracleReport::default();
    for (x, y) in pairs {
        let seq = cut_point_sequence(space, model, x, y, &index)?;
        let (xe, ye) = (x.end(), y.end());
        let emitted: Vec<Option<usize>> = seq.points.iter().map(|p| p.coset).collect();
        if emitted.iter().any(|c| c.is_some_and(|c| touches(space, c, xe) || touches(space, c, ye))) {
            rep.skipped += 1;
            continue;
        }
        rep.pairs += 1;
        rep.emitted += emitted.len();
        let checks = crate::par::map(&emitted, |&c| match c {
            Some(c) => separation_check(space, Some(c), xe, ye).map(Some),
            None => Ok(None),
        });
        for r in checks {
            match r? {
                Some(true) => {}
                Some(false) => rep.false_cuts += 1,
                None => rep.unlocated += 1,
            }
        }
        if seq.points.len() <= exhaustive_len {
            // a separating coset meets every path from x to y, in particular
            // the one running back along x and out along y; all other cosets
            // are connected around
            rep.exhaustive_pairs += 1;
            let mut others: Vec<usize> = Vec::new();
            for &v in x.vertices.iter().chain(&y.vertices) {
                let mut hit = |c: usize| {
                    if !emitted.contains(&Some(c)) && !others.contains(&c) && all.binary_search(&c).is_ok() {
                        others.push(c);
                    }
                };
                match space.coset_of_vertex(v) {
                    Some(c) => hit(c),
                    None => {
                        for row in &space.coset_index {
                            if row[v as usize] != NO_COSET {
                                hit(row[v as usize] as usize);
                            }
                        }
                    }
                }
            }
            others.retain(|&c| !touches(space, c, xe) && !touches(space, c, ye));
            let geo = tree_geodesic(&terminal_node(space, model, x)?.1, &terminal_node(space, model, y)?.1);
            let seps = crate::par::map(&others, |&c| separation_check(space, Some(c), xe, ye));
            for (&c, s) in others.iter().zip(seps) {
                if s? {
                    if geo.contains(&TreeNode::Edge(space.cosets[c].key.clone())) {
                        rep.missed += 1;
                    } else {
                        rep.off_tree += 1;
                    }
                }
            }
        }
    }
    Ok(rep)
}

fn touches(space: &CuspedGraph, c: usize, v: u32) -> bool {
    space.coset_of_vertex(v) == Some(c) || (space.is_cayley(v) && space.cosets[c].members.binary_search(&v).is_ok())
}

/// Checks that consecutive cut points lie in the vertex coset between them.
pub fn consecutive_membership(space: &CuspedGraph, model: &GroupModel, seq: &CutPointSequence) -> Result<bool> {
    for (i, w) in seq.points.windows(2).enumerate() {
        let node = &seq.between[i + usize::from(matches!(seq.x_terminal, TreeNode::Edge(..)))];
        let TreeNode::Vertex(f, _) = node else { return Ok(false) };
        for p in w {
            let Some(q) = p.q else { continue };
            let nf = &space.ball.normal_forms[space.base[q as usize] as usize];
            let path = vertex_path(model, nf, *f)?;
            if path.last() != Some(node) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct EmbeddingReport {
    pub pairs: usize,
    pub max_difference: f64,
    pub skipped: usize,
}

/// Maps a vertex of a vertex group's own cusped space into the ambient one
/// by spelling its group element in the ambient generators.
pub fn embed_vertex(
    inner: &CuspedGraph,
    inner_model: &GroupModel,
    outer: &CuspedGraph,
    outer_model: &GroupModel,
    v: u32,
) -> Result<Option<u32>> {
    let base = inner.base[v as usize];
    let text = inner_model.format(&inner.ball.normal_forms[base as usize]);
    let w = outer_model.parse(&text)?;
    let Some(ob) = outer.ball.lookup(outer_model, &w) else {
        return Ok(None);
    };
    match inner.coset_of_vertex(v) {
        None => Ok(Some(ob)),
        Some(c) => {
            let p = inner.cosets[c].peripheral;
            let id = &inner_model.peripherals[p].id;
            let Some(op) = outer_model.peripherals.iter().position(|q| &q.id == id) else {
                return Ok(None);
            };
            let oc = outer.coset_index[op][ob as usize];
            if oc == NO_COSET {
                return Ok(None);
            }
            Ok(outer.horoball_vertex(oc as usize, ob, inner.depth[v as usize]))
        }
    }
}

/// Compares products of pairs of inner points computed in the vertex
/// group's space with those of their images in the ambient space.
pub fn compare_embedding_products(
    inner: &CuspedGraph,
    inner_model: &GroupModel,
    outer: &CuspedGraph,
    outer_model: &GroupModel,
    pairs: &[(u32, u32)],
) -> Result<EmbeddingReport> {
    let ib = inner.bfs(inner.basepoint());
    let ob = outer.bfs(outer.basepoint());
    let mut rep = EmbeddingReport {
        pairs: 0,
        max_difference: 0.0,
        skipped: 0,
    };
    for &(x, y) in pairs {
        let (Some(ex), Some(ey)) = (
            embed_vertex(inner, inner_model, outer, outer_model, x)?,
            embed_vertex(inner, inner_model, outer, outer_model, y)?,
        ) else {
            rep.skipped += 1;
            continue;
        };
        let dxy = inner.bfs(x)[y as usize];
        let oxy = outer.bfs(ex)[ey as usize];
        let ok = inner.certified(x, y, dxy)
            && outer.certified(ex, ey, oxy)
            && inner.certified(0, x, ib[x as usize])
            && inner.certified(0, y, ib[y as usize])
            && outer.certified(0, ex, ob[ex as usize])
            && outer.certified(0, ey, ob[ey as usize]);
        if !ok {
            rep.skipped += 1;
            continue;
        }
        let pi = crate::Half::gromov(ib[x as usize] as i64, ib[y as usize] as i64, dxy as i64);
        let po = crate::Half::gromov(ob[ex as usize] as i64, ob[ey as usize] as i64, oxy as i64);
        rep.pairs += 1;
        rep.max_difference = rep.max_difference.max((pi - po).to_f64().abs());
    }
    Ok(rep)
}

#[cfg(test)]
mod tests;
