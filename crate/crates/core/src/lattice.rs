//! Height-3 orthocomplemented lattices `O < atoms < I` (the "Chinese lantern"
//! MO_K family). Atoms are numbered `1..=2K` and atom `a` is complemented by
//! `a + K` (mod 2K). For K = 2 this is the quadrangle numbering, where opposite
//! vertices 1-3 and 2-4 pair up; for K = 3 the hexagon pairs are 1-4, 2-5, 3-6.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum LatticeElement {
    Bottom,
    Atom(usize),
    Top,
}

impl fmt::Display for LatticeElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            LatticeElement::Bottom => write!(f, "O"),
            LatticeElement::Atom(a) => write!(f, "{a}"),
            LatticeElement::Top => write!(f, "I"),
        }
    }
}

use LatticeElement::{Atom, Bottom, Top};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OrthoLattice {
    pairs: usize,
}

/// Four-element Boolean sublattice `{O, a, a', I}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct BooleanBlock {
    pub atom: usize,
    pub complement: usize,
}

impl BooleanBlock {
    pub fn elements(&self) -> [LatticeElement; 4] {
        [Bottom, Atom(self.atom), Atom(self.complement), Top]
    }
}

pub fn build_lattice(pairs: usize) -> Result<OrthoLattice> {
    if pairs < 2 {
        return Err(Error::PairCount(pairs));
    }
    Ok(OrthoLattice { pairs })
}

impl OrthoLattice {
    pub fn pair_count(&self) -> usize {
        self.pairs
    }

    pub fn atom_count(&self) -> usize {
        2 * self.pairs
    }

    pub fn atom(&self, index: usize) -> Result<LatticeElement> {
        if (1..=self.atom_count()).contains(&index) {
            Ok(Atom(index))
        } else {
            Err(Error::InvalidArgument(format!(
                "atom {index} not in 1..={}",
                self.atom_count()
            )))
        }
    }

    /// Complementary atom index (1-based).
    pub fn complement_index(&self, a: usize) -> usize {
        (a - 1 + self.pairs) % self.atom_count() + 1
    }

    /// `O`, the atoms in index order, then `I`.
    pub fn elements(&self) -> Vec<LatticeElement> {
        let mut v = Vec::with_capacity(self.atom_count() + 2);
        v.push(Bottom);
        v.extend((1..=self.atom_count()).map(Atom));
        v.push(Top);
        v
    }

    pub fn leq(&self, x: LatticeElement, y: LatticeElement) -> bool {
        match (x, y) {
            (Bottom, _) | (_, Top) => true,
            (Atom(a), Atom(b)) => a == b,
            _ => false,
        }
    }

    pub fn meet(&self, x: LatticeElement, y: LatticeElement) -> LatticeElement {
        match (x, y) {
            (Top, z) | (z, Top) => z,
            (Bottom, _) | (_, Bottom) => Bottom,
            (Atom(a), Atom(b)) if a == b => x,
            _ => Bottom,
        }
    }

    pub fn join(&self, x: LatticeElement, y: LatticeElement) -> LatticeElement {
        match (x, y) {
            (Bottom, z) | (z, Bottom) => z,
            (Top, _) | (_, Top) => Top,
            (Atom(a), Atom(b)) if a == b => x,
            _ => Top,
        }
    }

    pub fn orthocomplement(&self, x: LatticeElement) -> LatticeElement {
        match x {
            Bottom => Top,
            Top => Bottom,
            Atom(a) => Atom(self.complement_index(a)),
        }
    }

    /// All triples violating `x ^ (y v z) = (x ^ y) v (x ^ z)`.
    pub fn check_distributivity(&self) -> Vec<(LatticeElement, LatticeElement, LatticeElement)> {
        self.distributivity_violations_within(&self.elements())
    }

    /// Violations among triples drawn from `subset` only.
    pub fn distributivity_violations_within(
        &self,
        subset: &[LatticeElement],
    ) -> Vec<(LatticeElement, LatticeElement, LatticeElement)> {
        let mut out = Vec::new();
        for &x in subset {
            for &y in subset {
                for &z in subset {
                    let lhs = self.meet(x, self.join(y, z));
                    let rhs = self.join(self.meet(x, y), self.meet(x, z));
                    if lhs != rhs {
                        out.push((x, y, z));
                    }
                }
            }
        }
        out
    }

    pub fn boolean_blocks(&self) -> Vec<BooleanBlock> {
        (1..=self.pairs)
            .map(|a| BooleanBlock {
                atom: a,
                complement: self.complement_index(a),
            })
            .collect()
    }

    /// Whether `block` is closed under meet, join and complement and distributive.
    pub fn is_boolean(&self, block: &BooleanBlock) -> bool {
        let els = block.elements();
        let closed = els.iter().all(|&x| {
            els.contains(&self.orthocomplement(x))
                && els
                    .iter()
                    .all(|&y| els.contains(&self.meet(x, y)) && els.contains(&self.join(x, y)))
        });
        closed && self.distributivity_violations_within(&els).is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn build_examples() {
        let l2 = build_lattice(2).unwrap();
        assert_eq!(l2.atom_count(), 4);
        assert_eq!(l2.complement_index(1), 3);
        assert_eq!(l2.complement_index(2), 4);
        assert_eq!(l2.complement_index(4), 2);
        let l3 = build_lattice(3).unwrap();
        let pairs: Vec<_> = (1..=6).map(|a| (a, l3.complement_index(a))).collect();
        assert_eq!(pairs, vec![(1, 4), (2, 5), (3, 6), (4, 1), (5, 2), (6, 3)]);
        assert_eq!(build_lattice(1), Err(Error::PairCount(1)));
        assert_eq!(build_lattice(0), Err(Error::PairCount(0)));
    }

    #[test]
    fn meet_join_examples() {
        let l = build_lattice(2).unwrap();
        assert_eq!(l.meet(Atom(1), Atom(2)), Bottom);
        assert_eq!(l.meet(Atom(3), Atom(3)), Atom(3));
        assert_eq!(l.join(Atom(1), Atom(3)), Top);
        assert_eq!(l.join(Atom(2), Atom(4)), Top);
        for x in l.elements() {
            assert_eq!(l.meet(x, Top), x);
            assert_eq!(l.join(x, Bottom), x);
        }
    }

    #[test]
    fn meet_and_join_agree_with_order() {
        // Brute-force glb/lub from `leq` alone.
        let l = build_lattice(3).unwrap();
        let els = l.elements();
        for &x in &els {
            for &y in &els {
                let lower: Vec<_> = els.iter().copied().filter(|&z| l.leq(z, x) && l.leq(z, y)).collect();
                let glb = *lower.iter().find(|&&g| lower.iter().all(|&z| l.leq(z, g))).unwrap();
                assert_eq!(l.meet(x, y), glb);
                let upper: Vec<_> = els.iter().copied().filter(|&z| l.leq(x, z) && l.leq(y, z)).collect();
                let lub = *upper.iter().find(|&&g| upper.iter().all(|&z| l.leq(g, z))).unwrap();
                assert_eq!(l.join(x, y), lub);
            }
        }
    }

    #[test]
    fn complement_examples() {
        let l = build_lattice(3).unwrap();
        assert_eq!(l.orthocomplement(Atom(2)), Atom(5));
        assert_eq!(l.orthocomplement(Bottom), Top);
        for x in l.elements() {
            let xc = l.orthocomplement(x);
            assert_eq!(l.orthocomplement(xc), x);
            assert_eq!(l.meet(x, xc), Bottom);
            assert_eq!(l.join(x, xc), Top);
            if let Atom(a) = x {
                assert_ne!(xc, Atom(a));
            }
        }
    }

    #[test]
    fn quadrangle_lattice_is_not_distributive() {
        let l = build_lattice(2).unwrap();
        let v = l.check_distributivity();
        assert!(v.contains(&(Atom(1), Atom(2), Atom(4))));
        assert_eq!(l.meet(Atom(1), l.join(Atom(2), Atom(4))), Atom(1));
    }

    #[test]
    fn blocks_are_boolean() {
        for k in 2..=4 {
            let l = build_lattice(k).unwrap();
            let blocks = l.boolean_blocks();
            assert_eq!(blocks.len(), k);
            for b in &blocks {
                assert!(l.is_boolean(b));
                assert!(l.distributivity_violations_within(&b.elements()).is_empty());
            }
        }
        let l = build_lattice(2).unwrap();
        let blocks = l.boolean_blocks();
        assert_eq!(blocks[0], BooleanBlock { atom: 1, complement: 3 });
        assert_eq!(blocks[1], BooleanBlock { atom: 2, complement: 4 });
    }

    #[test]
    fn atom_lookup() {
        let l = build_lattice(2).unwrap();
        assert_eq!(l.atom(4), Ok(Atom(4)));
        assert!(l.atom(5).is_err());
        assert!(l.atom(0).is_err());
    }
}
