//! Normal forms for amalgams `A *_C B` of free groups over a cyclic edge
//! group, and for single-stable-letter HNN extensions of a free group over
//! cyclic associated subgroups.
//!
//! Both normal forms use canonical left-coset representatives of the edge
//! group in each factor, so the resulting word is a function of the group
//! element alone.

use crate::word::{free_left_coset_rep, free_power_exponent, mul, power, Letter, Word};
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Factor {
    A,
    B,
}

impl Factor {
    pub fn other(self) -> Factor {
        match self {
            Factor::A => Factor::B,
            Factor::B => Factor::A,
        }
    }
}

/// `A = F(letters marked A)`, `B = F(letters marked B)`, with `u in A`
/// identified with `v in B`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AmalgamOracle {
    pub factor_of: Vec<Factor>,
    pub u: Word,
    pub v: Word,
}

/// `t_1 ... t_n c` with each `t_i` a canonical left-coset representative of
/// the edge group in alternating factors and `c = u^edge_power`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AmalgamNormalForm {
    pub syllables: Vec<(Factor, Word)>,
    pub edge_power: i64,
}

impl AmalgamOracle {
    fn edge_gen(&self, f: Factor) -> &Word {
        match f {
            Factor::A => &self.u,
            Factor::B => &self.v,
        }
    }

    fn split(&self, w: &[Letter]) -> Vec<(Factor, Word)> {
        let mut out: Vec<(Factor, Word)> = Vec::new();
        for &l in w {
            let f = self.factor_of[l.index()];
            match out.last_mut() {
                Some((g, s)) if *g == f => *s = mul(s, &[l]),
                _ => out.push((f, vec![l])),
            }
        }
        out
    }

    fn reduce_syllables(&self, mut syl: Vec<(Factor, Word)>) -> Vec<(Factor, Word)> {
        loop {
            syl.retain(|(_, s)| !s.is_empty());
            let mut merged: Vec<(Factor, Word)> = Vec::with_capacity(syl.len());
            for (f, s) in syl.drain(..) {
                match merged.last_mut() {
                    Some((g, t)) if *g == f => {
                        *t = mul(t, &s);
                        if t.is_empty() {
                            merged.pop();
                        }
                    }
                    _ => merged.push((f, s)),
                }
            }
            syl = merged;
            if syl.len() < 2 {
                return syl;
            }
            let hit = syl.iter().enumerate().find_map(|(i, (f, s))| {
                free_power_exponent(s, self.edge_gen(*f)).map(|k| (i, *f, k))
            });
            match hit {
                Some((i, f, k)) => {
                    let g = f.other();
                    syl[i] = (g, power(self.edge_gen(g), k));
                }
                None => return syl,
            }
        }
    }

    pub fn decompose(&self, w: &[Letter]) -> AmalgamNormalForm {
        let syl = self.reduce_syllables(self.split(w));
        let mut carry = 0i64;
        let mut out = Vec::with_capacity(syl.len());
        for (f, s) in syl {
            let s = mul(&power(self.edge_gen(f), carry), &s);
            let (rep, k) = free_left_coset_rep(&s, self.edge_gen(f));
            carry = k;
            if !rep.is_empty() {
                out.push((f, rep));
            }
        }
        AmalgamNormalForm {
            syllables: out,
            edge_power: carry,
        }
    }

    pub fn normal_form(&self, w: &[Letter]) -> Word {
        self.decompose(w).to_word(self)
    }

    pub fn is_identity(&self, w: &[Letter]) -> bool {
        let d = self.decompose(w);
        d.syllables.is_empty() && d.edge_power == 0
    }
}

impl AmalgamNormalForm {
    pub fn to_word(&self, oracle: &AmalgamOracle) -> Word {
        let mut w = Vec::new();
        let n = self.syllables.len();
        if n == 0 {
            return power(&oracle.u, self.edge_power);
        }
        for (i, (f, s)) in self.syllables.iter().enumerate() {
            if i + 1 == n {
                w.extend(mul(s, &power(oracle.edge_gen(*f), self.edge_power)));
            } else {
                w.extend_from_slice(s);
            }
        }
        w
    }

    /// Canonical word for the left coset `g C`.
    pub fn coset_word(&self) -> Word {
        self.syllables.iter().flat_map(|(_, s)| s.iter().copied()).collect()
    }
}

/// `A = F(all letters except t)`, `t u t^-1 = v`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct HnnOracle {
    pub stable: usize,
    pub u: Word,
    pub v: Word,
}

/// `a_0 t^{e_1} a_1 ... t^{e_n} a_n` in Britton-reduced canonical form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HnnNormalForm {
    pub pieces: Vec<Word>,
    pub exps: Vec<i8>,
}

impl HnnOracle {
    fn split(&self, w: &[Letter]) -> (Vec<Word>, Vec<i8>) {
        let mut pieces = vec![Vec::new()];
        let mut exps = Vec::new();
        for &l in w {
            if l.index() == self.stable {
                exps.push(if l.is_inverse() { -1 } else { 1 });
                pieces.push(Vec::new());
            } else {
                let last = pieces.last_mut().unwrap();
                *last = mul(last, &[l]);
            }
        }
        (pieces, exps)
    }

    fn pinch(&self, pieces: &mut Vec<Word>, exps: &mut Vec<i8>) {
        'outer: loop {
            for i in 0..exps.len().saturating_sub(1) {
                let (e, f) = (exps[i], exps[i + 1]);
                if e != -f {
                    continue;
                }
                let mid = &pieces[i + 1];
                // t u^k t^-1 = v^k ; t^-1 v^k t = u^k
                let replaced = if e == 1 {
                    free_power_exponent(mid, &self.u).map(|k| power(&self.v, k))
                } else {
                    free_power_exponent(mid, &self.v).map(|k| power(&self.u, k))
                };
                if let Some(r) = replaced {
                    let merged = mul(&mul(&pieces[i], &r), &pieces[i + 2]);
                    pieces.splice(i..i + 3, [merged]);
                    exps.drain(i..i + 2);
                    continue 'outer;
                }
            }
            return;
        }
    }

    pub fn decompose(&self, w: &[Letter]) -> HnnNormalForm {
        let (mut pieces, mut exps) = self.split(w);
        self.pinch(&mut pieces, &mut exps);
        let mut carry: Word = Vec::new();
        let n = exps.len();
        for i in 0..=n {
            let a = mul(&carry, &pieces[i]);
            if i == n {
                pieces[i] = a;
                break;
            }
            // v^k t = t u^k ; u^k t^-1 = t^-1 v^k
            let (sub, image) = if exps[i] == 1 { (&self.v, &self.u) } else { (&self.u, &self.v) };
            let (rep, k) = free_left_coset_rep(&a, sub);
            pieces[i] = rep;
            carry = power(image, k);
        }
        HnnNormalForm { pieces, exps }
    }

    pub fn normal_form(&self, w: &[Letter]) -> Word {
        self.decompose(w).to_word(self.stable)
    }

    pub fn is_identity(&self, w: &[Letter]) -> bool {
        self.normal_form(w).is_empty()
    }
}

impl HnnNormalForm {
    pub fn to_word(&self, stable: usize) -> Word {
        let mut w = Vec::new();
        for (i, p) in self.pieces.iter().enumerate() {
            w.extend_from_slice(p);
            if i < self.exps.len() {
                w.push(if self.exps[i] == 1 { Letter::gen(stable) } else { Letter::inv_gen(stable) });
            }
        }
        w
    }

    /// Canonical word and coordinate for the left coset `g<u>`.
    pub fn coset(&self, stable: usize, u: &[Letter]) -> (Word, i64) {
        let mut head = HnnNormalForm {
            pieces: self.pieces.clone(),
            exps: self.exps.clone(),
        };
        let last = head.pieces.pop().unwrap();
        let (rep, k) = free_left_coset_rep(&last, u);
        head.pieces.push(rep);
        (head.to_word(stable), k)
    }
}
