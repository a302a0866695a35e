//! Finitely generated groups with peripheral structure, for the families
//! where the word problem has an exact oracle.

pub mod amalgam;
pub mod ball;
pub mod dehn;

use crate::error::{Error, Result};
use crate::word::{self, free_left_coset_rep, free_power_exponent, reduce, Alphabet, Letter, Word};
use amalgam::{AmalgamOracle, Factor, HnnOracle};
use dehn::Dehn;
use serde::{Deserialize, Serialize};

pub use ball::{peripheral_cosets_in_ball, CayleyBall, CosetDescriptor};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Free,
    FreeAbelian,
    SurfaceAmalgam,
    Amalgam,
    Hnn,
    UserGraph,
}

impl Family {
    pub fn tag(self) -> &'static str {
        match self {
            Family::Free => "free",
            Family::FreeAbelian => "free-abelian",
            Family::SurfaceAmalgam => "surface-amalgam",
            Family::Amalgam => "amalgam",
            Family::Hnn => "hnn",
            Family::UserGraph => "user-graph",
        }
    }

    pub fn from_tag(tag: &str) -> Option<Family> {
        Some(match tag {
            "free" => Family::Free,
            "free-abelian" => Family::FreeAbelian,
            "surface-amalgam" => Family::SurfaceAmalgam,
            "amalgam" => Family::Amalgam,
            "hnn" => Family::Hnn,
            "user-graph" => Family::UserGraph,
            _ => return None,
        })
    }
}

/// How the members of one peripheral coset are coordinatized. The
/// horoball base metric is the l1 distance between coordinates.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum PeripheralKind {
    /// `<w>` for a single word over the base generators.
    Cyclic(Word),
    /// Free-abelian subgroup spanned by these base generators.
    Coordinates(Vec<usize>),
    /// Explicit vertex set of a user graph.
    Vertices(Vec<usize>),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PeripheralSpec {
    pub id: String,
    /// Words over the full generating set (base plus derived letters).
    pub generator_words: Vec<Word>,
    pub kind: PeripheralKind,
}

/// Splitting data used for Bass-Serre navigation.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum SplittingSpec {
    Amalgam(AmalgamOracle),
    Hnn(HnnOracle),
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct UserGraph {
    pub names: Vec<String>,
    pub edges: Vec<(usize, usize)>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupModel {
    /// The generating set S: base generators followed by derived
    /// peripheral generators.
    pub alphabet: Alphabet,
    pub base_rank: usize,
    /// Definitions of derived generators as base words.
    pub derived: Vec<Word>,
    pub relators: Vec<Word>,
    pub family: Family,
    pub peripherals: Vec<PeripheralSpec>,
    pub splitting: Option<SplittingSpec>,
    pub graph: Option<UserGraph>,
    #[serde(skip)]
    dehn: Option<Dehn>,
}

impl GroupModel {
    pub fn new(
        names: &[&str],
        relators: Vec<Word>,
        family: Family,
        splitting: Option<SplittingSpec>,
    ) -> Result<Self> {
        let alphabet = Alphabet::new(names);
        let dehn = match family {
            Family::SurfaceAmalgam => {
                let r = relators
                    .first()
                    .ok_or_else(|| Error::UnsupportedFamily("surface group needs a relator".into()))?;
                Some(Dehn::new(r))
            }
            _ => None,
        };
        let model = GroupModel {
            base_rank: alphabet.len(),
            alphabet,
            derived: Vec::new(),
            relators,
            family,
            peripherals: Vec::new(),
            splitting,
            graph: None,
            dehn,
        };
        for r in &model.relators {
            model.check_word(r)?;
        }
        Ok(model)
    }

    pub fn free(rank: usize) -> Self {
        let names: Vec<String> = (0..rank).map(default_name).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        GroupModel::new(&refs, vec![], Family::Free, None).unwrap()
    }

    pub fn free_abelian(rank: usize) -> Self {
        let names: Vec<String> = (0..rank).map(default_name).collect();
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut rels = Vec::new();
        for i in 0..rank {
            for j in i + 1..rank {
                rels.push(vec![Letter::gen(i), Letter::gen(j), Letter::inv_gen(i), Letter::inv_gen(j)]);
            }
        }
        GroupModel::new(&refs, rels, Family::FreeAbelian, None).unwrap()
    }

    /// Closed orientable surface group of the given genus, split as
    /// `F(a1,b1) *_C F(a2,...,bg)` along `C = <[a1,b1]>`.
    pub fn surface(genus: usize) -> Self {
        assert!(genus >= 2);
        let names: Vec<String> = if genus == 2 {
            ["a", "b", "c", "d"].iter().map(|s| s.to_string()).collect()
        } else {
            (1..=genus).flat_map(|i| [format!("a{i}"), format!("b{i}")]).collect()
        };
        let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
        let mut rel = Vec::new();
        for i in 0..genus {
            let (x, y) = (2 * i, 2 * i + 1);
            rel.extend([Letter::gen(x), Letter::gen(y), Letter::inv_gen(x), Letter::inv_gen(y)]);
        }
        let splitting = surface_splitting(genus, &rel);
        GroupModel::new(&refs, vec![rel], Family::SurfaceAmalgam, Some(splitting)).unwrap()
    }

    /// Appends peripheral subgroup `id` generated by `words` (given over the
    /// current generating set). Generators that are not already single
    /// letters are added to S as derived letters `id_1, id_2, ...`.
    pub fn add_peripheral(&mut self, id: &str, words: Vec<Word>) -> Result<()> {
        let mut gens = Vec::new();
        for (j, w) in words.iter().enumerate() {
            self.check_word(w)?;
            if w.len() == 1 && !w[0].is_inverse() {
                gens.push(w.clone());
            } else {
                let expanded = self.expand(w);
                let idx = self.alphabet.push(&format!("{id}_{}", j + 1));
                self.derived.push(expanded);
                gens.push(vec![Letter::gen(idx)]);
            }
        }
        let expanded: Vec<Word> = words.iter().map(|w| self.expand(w)).collect();
        let kind = self.peripheral_kind(&expanded)?;
        self.peripherals.push(PeripheralSpec {
            id: id.to_string(),
            generator_words: gens,
            kind,
        });
        Ok(())
    }

    fn peripheral_kind(&self, expanded: &[Word]) -> Result<PeripheralKind> {
        match self.family {
            Family::FreeAbelian => {
                let mut gens = Vec::new();
                for w in expanded {
                    match w.as_slice() {
                        [l] if !l.is_inverse() => gens.push(l.index()),
                        _ => {
                            return Err(Error::UnsupportedPeripheral(
                                "free-abelian peripherals must be spanned by generators".into(),
                            ))
                        }
                    }
                }
                gens.sort_unstable();
                gens.dedup();
                Ok(PeripheralKind::Coordinates(gens))
            }
            Family::UserGraph => Err(Error::UnsupportedPeripheral(
                "user-graph peripherals are vertex sets".into(),
            )),
            _ => {
                let [w] = expanded else {
                    return Err(Error::UnsupportedPeripheral("only cyclic peripherals are supported".into()));
                };
                let w = reduce(w);
                if w.is_empty() {
                    return Err(Error::UnsupportedPeripheral("trivial peripheral".into()));
                }
                match &self.splitting {
                    Some(SplittingSpec::Amalgam(o)) => {
                        if edge_sign(o, &w).is_none() {
                            return Err(Error::UnsupportedPeripheral(
                                "amalgam peripheral must be the edge group".into(),
                            ));
                        }
                    }
                    Some(SplittingSpec::Hnn(o)) => {
                        if hnn_side(o, &w).is_none() {
                            return Err(Error::UnsupportedPeripheral(
                                "hnn peripheral must be an associated subgroup <u> or <v>".into(),
                            ));
                        }
                    }
                    None => {}
                }
                Ok(PeripheralKind::Cyclic(w))
            }
        }
    }

    pub fn add_vertex_peripheral(&mut self, id: &str, vertices: Vec<usize>) {
        self.peripherals.push(PeripheralSpec {
            id: id.to_string(),
            generator_words: Vec::new(),
            kind: PeripheralKind::Vertices(vertices),
        });
    }

    pub fn family_tag(&self) -> &'static str {
        self.family.tag()
    }

    pub fn rank(&self) -> usize {
        self.alphabet.len()
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        self.alphabet.parse(text)
    }

    pub fn format(&self, w: &[Letter]) -> String {
        self.alphabet.format(w)
    }

    pub fn check_word(&self, w: &[Letter]) -> Result<()> {
        match w.iter().find(|l| l.index() >= self.alphabet.len()) {
            Some(l) => Err(Error::MalformedWord(format!("letter index {} out of range", l.index()))),
            None => Ok(()),
        }
    }

    /// Substitutes derived letters by their base definitions.
    pub fn expand(&self, w: &[Letter]) -> Word {
        let mut out = Vec::with_capacity(w.len());
        for &l in w {
            let i = l.index();
            if i < self.base_rank {
                out.push(l);
            } else {
                let def = &self.derived[i - self.base_rank];
                if l.is_inverse() {
                    out.extend(word::inverse(def));
                } else {
                    out.extend_from_slice(def);
                }
            }
        }
        out
    }

    /// Canonical form over the base generators: equal elements give equal
    /// words and `normal_form(normal_form(w)) == normal_form(w)`.
    pub fn normal_form(&self, w: &[Letter]) -> Result<Word> {
        self.check_word(w)?;
        let w = self.expand(w);
        self.base_normal_form(&w)
    }

    /// Same as [`normal_form`](Self::normal_form) for words already over the
    /// base generators.
    pub fn base_normal_form(&self, w: &[Letter]) -> Result<Word> {
        Ok(match (self.family, &self.splitting) {
            (Family::Free, _) => reduce(w),
            (Family::FreeAbelian, _) => abelian_word(&self.exponents(w)),
            (Family::SurfaceAmalgam | Family::Amalgam, Some(SplittingSpec::Amalgam(o))) => o.normal_form(w),
            (Family::Hnn, Some(SplittingSpec::Hnn(o))) => o.normal_form(w),
            _ => return Err(Error::UnsupportedFamily(self.family.tag().into())),
        })
    }

    /// Word-problem decision. Surface groups use Dehn's algorithm.
    pub fn is_identity(&self, w: &[Letter]) -> Result<bool> {
        self.check_word(w)?;
        let w = self.expand(w);
        if let Some(d) = &self.dehn {
            return Ok(d.is_identity(&w));
        }
        Ok(self.base_normal_form(&w)?.is_empty())
    }

    pub fn dehn(&self) -> Option<&Dehn> {
        self.dehn.as_ref()
    }

    fn exponents(&self, w: &[Letter]) -> Vec<i64> {
        let mut e = vec![0i64; self.base_rank];
        for l in w {
            e[l.index()] += if l.is_inverse() { -1 } else { 1 };
        }
        e
    }

    /// Canonical key of the left coset `g P` and the coordinates of `g`
    /// inside it, for `g` given by its base normal form.
    pub fn coset_of(&self, nf: &[Letter], peripheral: usize) -> Result<(Word, Vec<i64>)> {
        let spec = &self.peripherals[peripheral];
        match (&spec.kind, self.family, &self.splitting) {
            (PeripheralKind::Coordinates(gens), _, _) => {
                let mut e = self.exponents(nf);
                let coords = gens.iter().map(|&i| e[i]).collect();
                for &i in gens {
                    e[i] = 0;
                }
                Ok((abelian_word(&e), coords))
            }
            (PeripheralKind::Cyclic(w), Family::Free, _) => {
                let (rep, k) = free_left_coset_rep(nf, w);
                Ok((rep, vec![k]))
            }
            (PeripheralKind::Cyclic(w), _, Some(SplittingSpec::Amalgam(o))) => {
                let sign = edge_sign(o, w).ok_or_else(|| Error::UnsupportedPeripheral(spec.id.clone()))?;
                let d = o.decompose(nf);
                Ok((d.coset_word(), vec![sign * d.edge_power]))
            }
            (PeripheralKind::Cyclic(w), _, Some(SplittingSpec::Hnn(o))) => {
                let (sign, side) = hnn_side(o, w).ok_or_else(|| Error::UnsupportedPeripheral(spec.id.clone()))?;
                // g v^k t = g t u^k, so g<v> is labeled by the coset g t <u>.
                let g = match side {
                    HnnSide::U => nf.to_vec(),
                    HnnSide::V => word::mul(nf, &[Letter::gen(o.stable)]),
                };
                let (key, k) = o.decompose(&g).coset(o.stable, &o.u);
                Ok((key, vec![sign * k]))
            }
            _ => Err(Error::UnsupportedPeripheral(spec.id.clone())),
        }
    }

    /// Factor (for amalgams) or `None` (stable letter) of each generator of S.
    pub fn letter_factor(&self, l: Letter) -> Option<Factor> {
        let w = self.expand(&[l]);
        match &self.splitting {
            Some(SplittingSpec::Amalgam(o)) => {
                let f = o.factor_of[w[0].index()];
                w.iter().all(|x| o.factor_of[x.index()] == f).then_some(f)
            }
            Some(SplittingSpec::Hnn(o)) => {
                if w.iter().any(|x| x.index() == o.stable) {
                    None
                } else {
                    Some(Factor::A)
                }
            }
            None => None,
        }
    }

    /// Short stable fingerprint of the presentation.
    pub fn hash(&self) -> String {
        use sha2::{Digest, Sha256};
        let mut h = Sha256::new();
        h.update(self.family.tag());
        for n in self.alphabet.names() {
            h.update(n.as_bytes());
            h.update([0]);
        }
        for r in &self.relators {
            h.update(self.format(r));
            h.update([1]);
        }
        for d in &self.derived {
            h.update(self.format(d));
            h.update([2]);
        }
        for p in &self.peripherals {
            h.update(serde_json::to_string(p).unwrap_or_default());
        }
        if let Some(s) = &self.splitting {
            h.update(serde_json::to_string(s).unwrap_or_default());
        }
        if let Some(g) = &self.graph {
            h.update(serde_json::to_string(g).unwrap_or_default());
        }
        hex::encode(&h.finalize()[..16])
    }

    pub fn restore_oracles(&mut self) {
        if self.family == Family::SurfaceAmalgam {
            self.dehn = self.relators.first().map(|r| Dehn::new(r));
        }
    }
}

fn default_name(i: usize) -> String {
    const N: [&str; 8] = ["a", "b", "c", "d", "e", "f", "g", "h"];
    N.get(i).map(|s| s.to_string()).unwrap_or_else(|| format!("x{i}"))
}

fn abelian_word(exps: &[i64]) -> Word {
    let mut w = Vec::new();
    for (i, &e) in exps.iter().enumerate() {
        let l = if e < 0 { Letter::inv_gen(i) } else { Letter::gen(i) };
        w.extend(std::iter::repeat(l).take(e.unsigned_abs() as usize));
    }
    w
}

/// `+1`/`-1` if `w` is `u^{+-1}` (or `v^{+-1}`) in the amalgam.
fn edge_sign(o: &AmalgamOracle, w: &[Letter]) -> Option<i64> {
    let d = o.decompose(w);
    (d.syllables.is_empty() && d.edge_power.abs() == 1).then_some(d.edge_power)
}

/// Which associated subgroup of an HNN extension a peripheral is.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HnnSide {
    U,
    V,
}

/// `(sign, side)` when `w` is `u^{+-1}` or `v^{+-1}`.
pub fn hnn_side(o: &HnnOracle, w: &[Letter]) -> Option<(i64, HnnSide)> {
    match (free_power_exponent(w, &o.u), free_power_exponent(w, &o.v)) {
        (Some(k), _) if k.abs() == 1 => Some((k, HnnSide::U)),
        (_, Some(k)) if k.abs() == 1 => Some((k, HnnSide::V)),
        _ => None,
    }
}

pub(crate) fn surface_splitting(genus: usize, rel: &[Letter]) -> SplittingSpec {
    let mut factor_of = vec![Factor::B; 2 * genus];
    factor_of[0] = Factor::A;
    factor_of[1] = Factor::A;
    let u = rel[..4].to_vec();
    let v = word::inverse(&rel[4..]);
    SplittingSpec::Amalgam(AmalgamOracle { factor_of, u, v })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::HashMap;

    #[test]
    fn free_normal_form() {
        let g = GroupModel::free(2);
        let w = g.parse("a a^-1 b").unwrap();
        assert_eq!(g.format(&g.normal_form(&w).unwrap()), "b");
    }

    #[test]
    fn surface_relator_is_identity() {
        let g = GroupModel::surface(2);
        let w = g.parse("a b a^-1 b^-1 c d c^-1 d^-1").unwrap();
        assert!(g.normal_form(&w).unwrap().is_empty());
        assert!(g.is_identity(&w).unwrap());
    }

    #[test]
    fn abelian_normal_form_matches_enumeration() {
        // Oracle: group every word of length <= 3 by exponent vector; the
        // normal form must be constant on classes and distinct across them.
        let g = GroupModel::free_abelian(2);
        let mut classes: HashMap<(i64, i64), Word> = HashMap::new();
        let mut words: Vec<Word> = vec![vec![]];
        for _ in 0..3 {
            let mut next = Vec::new();
            for w in &words {
                for r in 0..4 {
                    let mut x = w.clone();
                    x.push(Letter::from_rank(r));
                    next.push(x);
                }
            }
            words.extend(next.clone());
            words.sort();
            words.dedup();
        }
        for w in &words {
            let e = g.exponents(w);
            let nf = g.normal_form(w).unwrap();
            let prev = classes.entry((e[0], e[1])).or_insert_with(|| nf.clone());
            assert_eq!(*prev, nf);
        }
        let nf = g.normal_form(&g.parse("b a b").unwrap()).unwrap();
        assert_eq!(g.format(&nf), "a b b");
    }

    #[test]
    fn unknown_symbol() {
        let g = GroupModel::free(2);
        assert!(matches!(g.parse("a z"), Err(Error::MalformedWord(_))));
        let bad = vec![Letter::gen(7)];
        assert!(matches!(g.normal_form(&bad), Err(Error::MalformedWord(_))));
    }

    #[test]
    fn user_graph_has_no_word_oracle() {
        let g = GroupModel::new(&["x"], vec![], Family::UserGraph, None).unwrap();
        assert!(matches!(g.normal_form(&[]), Err(Error::UnsupportedFamily(_))));
    }

    #[test]
    fn derived_peripheral_letter() {
        let mut g = GroupModel::surface(2);
        let c = g.parse("a b a^-1 b^-1").unwrap();
        g.add_peripheral("C", vec![c]).unwrap();
        assert_eq!(g.rank(), 5);
        let z = g.parse("C_1").unwrap();
        let w = g.parse("d c d^-1 c^-1").unwrap();
        assert_eq!(g.normal_form(&z).unwrap(), g.normal_form(&w).unwrap());
    }
}
