//! Letters, words and the symbol table used to read and print them.
//!
//! Words are written as whitespace-separated generator names; an inverse
//! carries the suffix `^-1`, e.g. `a b a^-1 b^-1`, and `a^k` repeats a letter.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};
use std::fmt;

/// A generator or its inverse. Generator `i` is stored as `i + 1`, its
/// inverse as `-(i + 1)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Letter(i32);

impl Letter {
    pub fn gen(index: usize) -> Self {
        Letter(index as i32 + 1)
    }

    pub fn inv_gen(index: usize) -> Self {
        Letter(-(index as i32) - 1)
    }

    pub fn index(self) -> usize {
        (self.0.unsigned_abs() - 1) as usize
    }

    pub fn is_inverse(self) -> bool {
        self.0 < 0
    }

    pub fn inverse(self) -> Self {
        Letter(-self.0)
    }

    /// Shortlex rank: `a < a^-1 < b < b^-1 < ...`.
    pub fn rank(self) -> u32 {
        2 * self.index() as u32 + self.is_inverse() as u32
    }

    pub fn from_rank(rank: u32) -> Self {
        let i = (rank / 2) as usize;
        if rank % 2 == 0 {
            Letter::gen(i)
        } else {
            Letter::inv_gen(i)
        }
    }
}

pub type Word = Vec<Letter>;

pub fn inverse(w: &[Letter]) -> Word {
    w.iter().rev().map(|l| l.inverse()).collect()
}

/// Free reduction.
pub fn reduce(w: &[Letter]) -> Word {
    let mut out: Word = Vec::with_capacity(w.len());
    for &l in w {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

/// Freely reduced product `u v`.
pub fn mul(u: &[Letter], v: &[Letter]) -> Word {
    let mut out = u.to_vec();
    for &l in v {
        if out.last() == Some(&l.inverse()) {
            out.pop();
        } else {
            out.push(l);
        }
    }
    out
}

pub fn power(w: &[Letter], k: i64) -> Word {
    let base = if k < 0 { inverse(w) } else { w.to_vec() };
    let mut out = Vec::new();
    for _ in 0..k.unsigned_abs() {
        out = mul(&out, &base);
    }
    out
}

/// Shortlex comparison key.
pub fn shortlex_key(w: &[Letter]) -> (usize, Vec<u32>) {
    (w.len(), w.iter().map(|l| l.rank()).collect())
}

/// Reduced word as `(conjugator p, cyclic core c)` with `w = p c p^-1`.
pub fn cyclic_decomposition(w: &[Letter]) -> (Word, Word) {
    let w = reduce(w);
    let mut i = 0;
    while i < w.len() / 2 && w[i] == w[w.len() - 1 - i].inverse() {
        i += 1;
    }
    (w[..i].to_vec(), w[i..w.len() - i].to_vec())
}

/// If `x` (any word) equals `u^k` in the free group, returns `k`.
pub fn free_power_exponent(x: &[Letter], u: &[Letter]) -> Option<i64> {
    let (p, core) = cyclic_decomposition(u);
    if core.is_empty() {
        return if reduce(x).is_empty() { Some(0) } else { None };
    }
    let r = mul(&mul(&inverse(&p), x), &p);
    if r.is_empty() {
        return Some(0);
    }
    if r.len() % core.len() != 0 {
        return None;
    }
    let k = (r.len() / core.len()) as i64;
    if r.chunks(core.len()).all(|c| c == core.as_slice()) {
        return Some(k);
    }
    let inv = inverse(&core);
    if r.chunks(core.len()).all(|c| c == inv.as_slice()) {
        return Some(-k);
    }
    None
}

/// Canonical representative of the left coset `x<u>` in a free group: the
/// shortlex-least element of minimal length. Returns `(rep, k)` with
/// `x = rep u^k`.
pub fn free_left_coset_rep(x: &[Letter], u: &[Letter]) -> (Word, i64) {
    let x = reduce(x);
    let (_, core) = cyclic_decomposition(u);
    if core.is_empty() {
        return (x, 0);
    }
    let bound = (2 * x.len() / core.len() + 2) as i64;
    let uinv = inverse(u);
    let mut best: Option<(Word, i64)> = None;
    let consider = |cand: Word, j: i64, best: &mut Option<(Word, i64)>| {
        let better = match best {
            None => true,
            Some((b, _)) => shortlex_key(&cand) < shortlex_key(b),
        };
        if better {
            *best = Some((cand, j));
        }
    };
    // x u^j for j in [-bound, bound]; rep = x u^j means x = rep u^-j.
    let mut fwd = x.clone();
    let mut back = x.clone();
    consider(x.clone(), 0, &mut best);
    for j in 1..=bound {
        fwd = mul(&fwd, u);
        back = mul(&back, &uinv);
        consider(fwd.clone(), j, &mut best);
        consider(back.clone(), -j, &mut best);
    }
    let (rep, j) = best.expect("nonempty search");
    (rep, -j)
}

/// Maps generator names to indices and back.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Alphabet {
    names: Vec<String>,
}

impl Alphabet {
    pub fn new<S: AsRef<str>>(names: &[S]) -> Self {
        Alphabet {
            names: names.iter().map(|s| s.as_ref().to_string()).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn push(&mut self, name: &str) -> usize {
        self.names.push(name.to_string());
        self.names.len() - 1
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn parse(&self, text: &str) -> Result<Word> {
        let mut w = Vec::new();
        for tok in text.split_whitespace() {
            if tok == "1" {
                continue;
            }
            let (name, power) = match tok.split_once('^') {
                Some((n, k)) => (
                    n,
                    k.parse::<i64>()
                        .map_err(|_| Error::MalformedWord(format!("bad exponent in `{tok}`")))?,
                ),
                None => (tok, 1),
            };
            let i = self
                .index_of(name)
                .ok_or_else(|| Error::MalformedWord(format!("unknown symbol `{name}`")))?;
            let l = if power < 0 { Letter::inv_gen(i) } else { Letter::gen(i) };
            w.extend(std::iter::repeat(l).take(power.unsigned_abs() as usize));
        }
        Ok(w)
    }

    pub fn format(&self, w: &[Letter]) -> String {
        if w.is_empty() {
            return String::new();
        }
        w.iter()
            .map(|l| {
                let n = &self.names[l.index()];
                if l.is_inverse() {
                    format!("{n}^-1")
                } else {
                    n.clone()
                }
            })
            .collect::<Vec<_>>()
            .join(" ")
    }
}

pub struct Display<'a>(pub &'a Alphabet, pub &'a [Letter]);

impl fmt::Display for Display<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.format(self.1))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ab() -> Alphabet {
        Alphabet::new(&["a", "b"])
    }

    #[test]
    fn parse_and_format() {
        let al = ab();
        let w = al.parse("a b^-1 a^-1").unwrap();
        assert_eq!(al.format(&w), "a b^-1 a^-1");
        assert!(matches!(al.parse("a q"), Err(Error::MalformedWord(_))));
        assert_eq!(al.parse("a^3 b^-2").unwrap(), al.parse("a a a b^-1 b^-1").unwrap());
        assert!(al.parse("a^0").unwrap().is_empty());
        assert!(matches!(al.parse("a^x"), Err(Error::MalformedWord(_))));
    }

    #[test]
    fn free_reduction() {
        let al = ab();
        let w = al.parse("a a^-1 b").unwrap();
        assert_eq!(al.format(&reduce(&w)), "b");
    }

    #[test]
    fn power_exponent() {
        let al = ab();
        let u = al.parse("a b").unwrap();
        let x = al.parse("b^-1 a^-1 b^-1 a^-1").unwrap();
        assert_eq!(free_power_exponent(&x, &u), Some(-2));
        assert_eq!(free_power_exponent(&al.parse("a").unwrap(), &u), None);
        // non-cyclically-reduced generator
        let u = al.parse("b a b^-1").unwrap();
        let x = al.parse("b a a a b^-1").unwrap();
        assert_eq!(free_power_exponent(&x, &u), Some(3));
    }

    #[test]
    fn coset_rep_is_canonical() {
        let al = ab();
        let u = al.parse("a").unwrap();
        let x = al.parse("b a a").unwrap();
        let (rep, k) = free_left_coset_rep(&x, &u);
        assert_eq!(al.format(&rep), "b");
        assert_eq!(k, 2);
        let (rep2, _) = free_left_coset_rep(&al.parse("b a^-1").unwrap(), &u);
        assert_eq!(rep, rep2);
    }
}
