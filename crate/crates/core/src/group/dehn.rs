//! Dehn's algorithm over a symmetrized single-relator set.

use crate::word::{inverse, reduce, Letter, Word};

#[derive(Clone, Debug)]
pub struct Dehn {
    /// Every cyclic permutation of the relator and its inverse.
    symmetrized: Vec<Word>,
    len: usize,
}

impl Dehn {
    pub fn new(relator: &[Letter]) -> Self {
        let r = reduce(relator);
        let len = r.len();
        let mut symmetrized = Vec::with_capacity(2 * len);
        for base in [r.clone(), inverse(&r)] {
            for i in 0..len {
                let mut p = base[i..].to_vec();
                p.extend_from_slice(&base[..i]);
                if !symmetrized.contains(&p) {
                    symmetrized.push(p);
                }
            }
        }
        Dehn { symmetrized, len }
    }

    /// Repeatedly replaces a subword that is more than half of a relator
    /// by the inverse of the complementary part.
    pub fn reduce(&self, w: &[Letter]) -> Word {
        let mut w = reduce(w);
        'outer: loop {
            for i in 0..w.len() {
                for rel in &self.symmetrized {
                    let mut m = 0;
                    while m < self.len && i + m < w.len() && w[i + m] == rel[m] {
                        m += 1;
                    }
                    if 2 * m > self.len {
                        let mut next = w[..i].to_vec();
                        next.extend(inverse(&rel[m..]));
                        next.extend_from_slice(&w[i + m..]);
                        w = reduce(&next);
                        continue 'outer;
                    }
                }
            }
            return w;
        }
    }

    pub fn is_identity(&self, w: &[Letter]) -> bool {
        self.reduce(w).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::word::Alphabet;

    #[test]
    fn relator_and_conjugates_vanish() {
        let al = Alphabet::new(&["a", "b", "c", "d"]);
        let r = al.parse("a b a^-1 b^-1 c d c^-1 d^-1").unwrap();
        let dehn = Dehn::new(&r);
        assert!(dehn.is_identity(&r));
        let conj = al.parse("c a b a^-1 b^-1 c d c^-1 d^-1 c^-1").unwrap();
        assert!(dehn.is_identity(&conj));
        assert!(!dehn.is_identity(&al.parse("a b a^-1 b^-1").unwrap()));
        // [a,b] = [d,c]
        let w = al.parse("a b a^-1 b^-1 c^-1 d^-1 c d").unwrap();
        assert!(!dehn.is_identity(&w));
        let w = al.parse("a b a^-1 b^-1 d c d^-1 c^-1").unwrap();
        assert!(!dehn.is_identity(&w));
        let w = al.parse("a b a^-1 b^-1 c d c^-1 d^-1 a b a^-1 b^-1 c d c^-1 d^-1").unwrap();
        assert!(dehn.is_identity(&w));
    }
}
