//! Balls in Cayley graphs and their peripheral coset partitions.

use super::{GroupModel, PeripheralKind};
use crate::error::{Error, Result};
use crate::word::{mul, Letter, Word};
use std::collections::{BTreeMap, HashMap, VecDeque};

/// Default cap on the number of vertices of any built graph.
pub const DEFAULT_VERTEX_BUDGET: usize = 5_000_000;

/// The full subgraph of the Cayley graph on elements of length `<= radius`.
///
/// Vertex ids follow breadth-first shortlex order, so vertex 0 is the
/// identity and each vertex word is the shortlex-least geodesic for its
/// element.
#[derive(Clone, Debug)]
pub struct CayleyBall {
    pub radius: u32,
    /// Shortlex-least geodesic word over S (empty for user graphs).
    pub words: Vec<Word>,
    /// Base normal form of each vertex (empty for user graphs).
    pub normal_forms: Vec<Word>,
    /// Vertex names for user graphs.
    pub names: Vec<String>,
    pub length: Vec<u32>,
    /// Unordered edges `(u, u s)` labeled by the generator `s`.
    pub edges: Vec<(u32, u32, Letter)>,
    index: HashMap<Word, u32>,
}

impl CayleyBall {
    pub fn build(model: &GroupModel, radius: u32) -> Result<Self> {
        Self::build_with_budget(model, radius, DEFAULT_VERTEX_BUDGET)
    }

    pub fn build_with_budget(model: &GroupModel, radius: u32, budget: usize) -> Result<Self> {
        if let Some(g) = &model.graph {
            return Self::from_user_graph(g, radius, budget);
        }
        let letters: Vec<Letter> = (0..2 * model.rank() as u32).map(Letter::from_rank).collect();
        let expanded: Vec<Word> = letters.iter().map(|&l| model.expand(&[l])).collect();
        let mut ball = CayleyBall {
            radius,
            words: vec![vec![]],
            normal_forms: vec![vec![]],
            names: Vec::new(),
            length: vec![0],
            edges: Vec::new(),
            index: HashMap::from([(Vec::new(), 0)]),
        };
        let mut queue = VecDeque::from([0u32]);
        while let Some(v) = queue.pop_front() {
            let len = ball.length[v as usize];
            for (l, ex) in letters.iter().zip(&expanded) {
                let nf = model.base_normal_form(&mul(&ball.normal_forms[v as usize], ex))?;
                let target = match ball.index.get(&nf) {
                    Some(&t) => Some(t),
                    None if len < radius => {
                        if ball.words.len() >= budget {
                            return Err(Error::ResourceLimit { what: "cayley ball", budget });
                        }
                        let t = ball.words.len() as u32;
                        let mut w = ball.words[v as usize].clone();
                        w.push(*l);
                        ball.words.push(w);
                        ball.index.insert(nf.clone(), t);
                        ball.normal_forms.push(nf);
                        ball.length.push(len + 1);
                        queue.push_back(t);
                        Some(t)
                    }
                    None => None,
                };
                if let Some(t) = target {
                    if !l.is_inverse() && t != v {
                        ball.edges.push((v, t, *l));
                    }
                }
            }
        }
        Ok(ball)
    }

    fn from_user_graph(g: &super::UserGraph, radius: u32, budget: usize) -> Result<Self> {
        if g.names.is_empty() {
            return Err(Error::EmptyGraph);
        }
        let n = g.names.len();
        let mut adj = vec![Vec::new(); n];
        for &(a, b) in &g.edges {
            adj[a].push(b);
            adj[b].push(a);
        }
        let mut id = vec![u32::MAX; n];
        let mut order = vec![0usize];
        let mut length = vec![0u32];
        id[0] = 0;
        let mut head = 0;
        while head < order.len() {
            let v = order[head];
            head += 1;
            let lv = length[id[v] as usize];
            if lv == radius {
                continue;
            }
            let mut nb = adj[v].clone();
            nb.sort_unstable();
            for w in nb {
                if id[w] == u32::MAX {
                    if order.len() >= budget {
                        return Err(Error::ResourceLimit { what: "user graph ball", budget });
                    }
                    id[w] = order.len() as u32;
                    order.push(w);
                    length.push(lv + 1);
                }
            }
        }
        let mut edges: Vec<(u32, u32, Letter)> = g
            .edges
            .iter()
            .filter(|(a, b)| id[*a] != u32::MAX && id[*b] != u32::MAX && a != b)
            .map(|&(a, b)| (id[a].min(id[b]), id[a].max(id[b]), Letter::gen(0)))
            .collect();
        edges.sort_unstable();
        edges.dedup();
        Ok(CayleyBall {
            radius,
            words: vec![Vec::new(); order.len()],
            normal_forms: vec![Vec::new(); order.len()],
            names: order.iter().map(|&v| g.names[v].clone()).collect(),
            length,
            edges,
            index: HashMap::new(),
        })
    }

    /// Reassembles a ball from stored vertex words (or user-graph names)
    /// and labeled edges, recomputing normal forms.
    pub fn from_parts(
        model: &GroupModel,
        radius: u32,
        labels: Vec<String>,
        length: Vec<u32>,
        edges: Vec<(u32, u32, Letter)>,
    ) -> Result<Self> {
        let n = labels.len();
        let mut ball = CayleyBall {
            radius,
            words: vec![Vec::new(); n],
            normal_forms: vec![Vec::new(); n],
            names: Vec::new(),
            length,
            edges,
            index: HashMap::new(),
        };
        if model.graph.is_some() {
            ball.names = labels;
            return Ok(ball);
        }
        for (i, l) in labels.iter().enumerate() {
            let w = if l == "e" { Vec::new() } else { model.parse(l)? };
            let nf = model.normal_form(&w)?;
            ball.index.insert(nf.clone(), i as u32);
            ball.words[i] = w;
            ball.normal_forms[i] = nf;
        }
        Ok(ball)
    }

    pub fn len(&self) -> usize {
        self.length.len()
    }

    pub fn is_empty(&self) -> bool {
        self.length.is_empty()
    }

    /// Vertex of the element represented by `w`, if it lies in the ball.
    pub fn lookup(&self, model: &GroupModel, w: &[Letter]) -> Option<u32> {
        if model.graph.is_some() {
            let name = model.format(w);
            return self.names.iter().position(|n| *n == name).map(|i| i as u32);
        }
        let nf = model.normal_form(w).ok()?;
        self.index.get(&nf).copied()
    }

    pub fn lookup_normal_form(&self, nf: &[Letter]) -> Option<u32> {
        self.index.get(nf).copied()
    }

    pub fn lookup_name(&self, name: &str) -> Option<u32> {
        self.names.iter().position(|n| n == name).map(|i| i as u32)
    }

    pub fn label(&self, model: &GroupModel, v: u32) -> String {
        if self.names.is_empty() {
            let w = &self.words[v as usize];
            if w.is_empty() {
                "e".to_string()
            } else {
                model.format(w)
            }
        } else {
            self.names[v as usize].clone()
        }
    }
}

/// One left coset `gP` of a peripheral subgroup, restricted to the ball.
#[derive(Clone, Debug, PartialEq)]
pub struct CosetDescriptor {
    pub peripheral: usize,
    /// Canonical key of the coset (a base word, or the user-graph set id).
    pub key: Word,
    /// Shortlex-least shortest member inside the ball.
    pub representative: u32,
    /// Member vertices in increasing id order.
    pub members: Vec<u32>,
    /// Coordinates of each member inside the coset (empty for user graphs).
    pub coords: Vec<Vec<i64>>,
}

pub fn peripheral_cosets_in_ball(
    ball: &CayleyBall,
    model: &GroupModel,
    peripheral: usize,
) -> Result<Vec<CosetDescriptor>> {
    let spec = &model.peripherals[peripheral];
    if let PeripheralKind::Vertices(vs) = &spec.kind {
        let g = model.graph.as_ref().ok_or_else(|| Error::UnsupportedPeripheral(spec.id.clone()))?;
        let mut members: Vec<u32> = vs
            .iter()
            .filter_map(|&v| ball.lookup_name(&g.names[v]))
            .collect();
        members.sort_unstable();
        if members.is_empty() {
            return Ok(Vec::new());
        }
        return Ok(vec![CosetDescriptor {
            peripheral,
            key: Vec::new(),
            representative: members[0],
            coords: Vec::new(),
            members,
        }]);
    }
    let mut groups: BTreeMap<u32, (Word, Vec<u32>, Vec<Vec<i64>>)> = BTreeMap::new();
    let mut first: HashMap<Word, u32> = HashMap::new();
    for v in 0..ball.len() as u32 {
        let (key, coords) = model.coset_of(&ball.normal_forms[v as usize], peripheral)?;
        let rep = *first.entry(key.clone()).or_insert(v);
        let entry = groups.entry(rep).or_insert_with(|| (key, Vec::new(), Vec::new()));
        entry.1.push(v);
        entry.2.push(coords);
    }
    Ok(groups
        .into_iter()
        .map(|(rep, (key, members, coords))| CosetDescriptor {
            peripheral,
            key,
            representative: rep,
            members,
            coords,
        })
        .collect())
}
