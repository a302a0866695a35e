//! Presentation files.
//!
//! One `key = value` per line; `#` starts a comment. Words are
//! whitespace-separated generator names with `^-1` marking inverses.
//!
//! ```text
//! family      = amalgam            # free | free-abelian | surface-amalgam | amalgam | hnn | user-graph
//! generators  = a b c d
//! relator     = a b a^-1 b^-1 c d c^-1 d^-1     # repeatable
//! split.A     = a b                # amalgam: letters of each factor
//! split.B     = c d
//! split.edge  = a b a^-1 b^-1 | d c d^-1 c^-1   # u in A identified with v in B
//! split.stable = t                 # hnn: t u t^-1 = v with split.edge = u | v
//! peripheral C = a b a^-1 b^-1     # generator words separated by `,`
//! ```
//!
//! A user graph lists `vertices = n0 n1 ...` and one `edge = n0 n1` per
//! edge; its peripherals are vertex lists. Vertex `n0` (the first listed)
//! is the basepoint.

use crate::error::{Error, Result};
use crate::group::amalgam::{AmalgamOracle, Factor, HnnOracle};
use crate::group::{surface_splitting, Family, GroupModel, SplittingSpec, UserGraph};
use crate::word::{inverse, Alphabet, Letter, Word};

struct Entry<'a> {
    line: usize,
    key: &'a str,
    value: &'a str,
}

fn perr(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse { line, msg: msg.into() }
}

pub fn parse_presentation(text: &str) -> Result<GroupModel> {
    let mut entries = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| perr(i + 1, format!("expected `key = value`, got `{line}`")))?;
        entries.push(Entry {
            line: i + 1,
            key: k.trim(),
            value: v.trim(),
        });
    }
    if entries.is_empty() {
        return Err(perr(0, "empty presentation"));
    }
    let one = |key: &str| entries.iter().find(|e| e.key == key);
    let all = |key: &'static str| entries.iter().filter(move |e| e.key == key);

    let fam = one("family").ok_or_else(|| perr(0, "missing `family`"))?;
    let family = Family::from_tag(fam.value).ok_or_else(|| perr(fam.line, format!("unknown family `{}`", fam.value)))?;
    if family == Family::UserGraph {
        return user_graph(&entries);
    }

    let gens = one("generators").ok_or_else(|| perr(0, "missing `generators`"))?;
    let names: Vec<&str> = gens.value.split_whitespace().collect();
    if names.is_empty() {
        return Err(perr(gens.line, "no generators"));
    }
    let alphabet = Alphabet::new(&names);
    let word = |e: &Entry, text: &str| alphabet.parse(text).map_err(|err| perr(e.line, err.to_string()));
    let mut relators = Vec::new();
    for e in all("relator").chain(all("relators")) {
        for r in e.value.split(';') {
            relators.push(word(e, r)?);
        }
    }

    let edge_pair = |e: &Entry| -> Result<(Word, Word)> {
        let (u, v) = e
            .value
            .split_once('|')
            .ok_or_else(|| perr(e.line, "split.edge needs `u | v`"))?;
        Ok((word(e, u)?, word(e, v)?))
    };
    let letters = |e: &Entry| -> Result<Vec<usize>> {
        e.value
            .split_whitespace()
            .map(|n| alphabet.index_of(n).ok_or_else(|| perr(e.line, format!("unknown generator `{n}`"))))
            .collect()
    };

    let splitting = match family {
        Family::SurfaceAmalgam => {
            let rel = relators.first().ok_or_else(|| perr(gens.line, "surface group needs its relator"))?;
            let genus = names.len() / 2;
            if names.len() % 2 != 0 || genus < 2 || rel.len() != 4 * genus {
                return Err(perr(gens.line, "surface group needs 2g >= 4 generators and one relator of length 4g"));
            }
            match one("split.edge") {
                Some(_) => Some(amalgam_split(&entries, names.len(), &letters, &edge_pair)?),
                None => Some(surface_splitting(genus, rel)),
            }
        }
        Family::Amalgam => Some(amalgam_split(&entries, names.len(), &letters, &edge_pair)?),
        Family::Hnn => {
            let st = one("split.stable").ok_or_else(|| perr(0, "hnn needs `split.stable`"))?;
            let stable = match letters(st)?.as_slice() {
                [s] => *s,
                _ => return Err(perr(st.line, "exactly one stable letter")),
            };
            let e = one("split.edge").ok_or_else(|| perr(0, "hnn needs `split.edge = u | v`"))?;
            let (u, v) = edge_pair(e)?;
            if u.is_empty() || v.is_empty() || u.iter().chain(&v).any(|l| l.index() == stable) {
                return Err(perr(e.line, "associated words must be nontrivial and avoid the stable letter"));
            }
            if relators.is_empty() {
                let mut r = vec![Letter::gen(stable)];
                r.extend(&u);
                r.push(Letter::inv_gen(stable));
                r.extend(inverse(&v));
                relators.push(r);
            }
            Some(SplittingSpec::Hnn(HnnOracle { stable, u, v }))
        }
        _ => None,
    };
    if family == Family::Amalgam && relators.is_empty() {
        if let Some(SplittingSpec::Amalgam(o)) = &splitting {
            let mut r = o.u.clone();
            r.extend(inverse(&o.v));
            relators.push(r);
        }
    }
    let mut model = match family {
        Family::FreeAbelian => {
            let mut m = GroupModel::free_abelian(names.len());
            m.alphabet = alphabet.clone();
            m
        }
        _ => GroupModel::new(&names, relators, family, splitting)?,
    };
    for e in entries.iter().filter(|e| e.key.starts_with("peripheral")) {
        let (id, words) = peripheral_entry(e)?;
        let ws = words
            .iter()
            .map(|w| model.parse(w).map_err(|err| perr(e.line, err.to_string())))
            .collect::<Result<Vec<_>>>()?;
        model.add_peripheral(id, ws).map_err(|err| perr(e.line, err.to_string()))?;
    }
    Ok(model)
}

fn peripheral_entry<'a>(e: &Entry<'a>) -> Result<(&'a str, Vec<&'a str>)> {
    let id = e
        .key
        .strip_prefix("peripheral")
        .map(str::trim)
        .filter(|s| !s.is_empty() && !s.contains(char::is_whitespace))
        .ok_or_else(|| perr(e.line, "expected `peripheral <id> = words`"))?;
    let words: Vec<&str> = e.value.split(',').map(str::trim).filter(|w| !w.is_empty()).collect();
    if words.is_empty() {
        return Err(perr(e.line, "peripheral without generators"));
    }
    Ok((id, words))
}

fn amalgam_split(
    entries: &[Entry],
    rank: usize,
    letters: &dyn Fn(&Entry) -> Result<Vec<usize>>,
    edge_pair: &dyn Fn(&Entry) -> Result<(Word, Word)>,
) -> Result<SplittingSpec> {
    let find = |k: &str| {
        entries
            .iter()
            .find(|e| e.key == k)
            .ok_or_else(|| perr(0, format!("amalgam needs `{k}`")))
    };
    let (a, b) = (find("split.A")?, find("split.B")?);
    let mut factor_of: Vec<Option<Factor>> = vec![None; rank];
    for (e, f) in [(a, Factor::A), (b, Factor::B)] {
        for i in letters(e)? {
            if factor_of[i].replace(f).is_some() {
                return Err(perr(e.line, "factors must be disjoint"));
            }
        }
    }
    let factor_of: Vec<Factor> = factor_of
        .into_iter()
        .collect::<Option<_>>()
        .ok_or_else(|| perr(a.line, "every generator must lie in split.A or split.B"))?;
    let e = find("split.edge")?;
    let (u, v) = edge_pair(e)?;
    let inside = |w: &Word, f| !w.is_empty() && w.iter().all(|l| factor_of[l.index()] == f);
    if !inside(&u, Factor::A) || !inside(&v, Factor::B) {
        return Err(perr(e.line, "edge words must be nontrivial words in A and in B"));
    }
    Ok(SplittingSpec::Amalgam(AmalgamOracle { factor_of, u, v }))
}

fn user_graph(entries: &[Entry]) -> Result<GroupModel> {
    let vs = entries
        .iter()
        .find(|e| e.key == "vertices")
        .ok_or_else(|| perr(0, "user graph needs `vertices`"))?;
    let names: Vec<String> = vs.value.split_whitespace().map(String::from).collect();
    if names.is_empty() {
        return Err(perr(vs.line, "no vertices"));
    }
    let index = |e: &Entry, n: &str| {
        names
            .iter()
            .position(|m| m == n)
            .ok_or_else(|| perr(e.line, format!("unknown vertex `{n}`")))
    };
    let mut edges = Vec::new();
    for e in entries.iter().filter(|e| e.key == "edge") {
        match e.value.split_whitespace().collect::<Vec<_>>().as_slice() {
            [x, y] => edges.push((index(e, x)?, index(e, y)?)),
            _ => return Err(perr(e.line, "edge needs two vertices")),
        }
    }
    let refs: Vec<&str> = names.iter().map(|s| s.as_str()).collect();
    let mut model = GroupModel::new(&refs, vec![], Family::UserGraph, None)?;
    model.graph = Some(UserGraph {
        names: names.clone(),
        edges,
    });
    for e in entries.iter().filter(|e| e.key.starts_with("peripheral")) {
        let (id, words) = peripheral_entry(e)?;
        let mut members = Vec::new();
        for w in words {
            for n in w.split_whitespace() {
                members.push(index(e, n)?);
            }
        }
        members.sort_unstable();
        members.dedup();
        model.add_vertex_peripheral(id, members);
    }
    Ok(model)
}
