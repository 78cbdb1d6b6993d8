//! Brute-force oracle written straight from the definitions, sharing no code
//! with the library beyond reading a relation matrix. Sets are `u32` masks.

#![allow(dead_code)]

use causal_core::{CausalClass, Causality};

pub struct Poset {
    pub n: usize,
    pub le: Vec<Vec<bool>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Delta,
    Nabla,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleUnion {
    Set(u32),
    NoSuperset,
    /// Several minimal supersets, so no smallest one.
    NoSmallest,
}

pub fn members(m: u32) -> Vec<usize> {
    (0..32).filter(|i| m >> i & 1 == 1).collect()
}

impl Poset {
    pub fn of(c: &Causality) -> Self {
        Poset {
            n: c.len(),
            le: c.relation_matrix(),
        }
    }

    pub fn all(&self) -> u32 {
        ((1u64 << self.n) - 1) as u32
    }

    pub fn subsets(&self) -> impl Iterator<Item = u32> {
        0..=self.all()
    }

    pub fn unrelated(&self, x: usize, y: usize) -> bool {
        !self.le[x][y] && !self.le[y][x]
    }

    pub fn diamond(&self, x: usize, y: usize) -> u32 {
        (0..self.n).filter(|&z| self.le[x][z] && self.le[z][y]).fold(0, |m, z| m | 1 << z)
    }

    pub fn complete(&self, u: u32) -> bool {
        let m = members(u);
        m.iter().all(|&x| m.iter().all(|&y| self.diamond(x, y) & !u == 0))
    }

    pub fn convergent(&self, u: u32) -> bool {
        let m = members(u);
        m.iter().all(|&x| {
            m.iter()
                .all(|&y| !self.unrelated(x, y) || m.iter().any(|&z| self.le[x][z] && self.le[y][z]))
        })
    }

    pub fn divergent(&self, u: u32) -> bool {
        let m = members(u);
        m.iter().all(|&x| {
            m.iter()
                .all(|&y| !self.unrelated(x, y) || m.iter().any(|&z| self.le[z][x] && self.le[z][y]))
        })
    }

    pub fn class(&self, u: u32) -> CausalClass {
        let (c, cv, dv) = (self.complete(u), self.convergent(u), self.divergent(u));
        match (c && cv, c && dv) {
            (true, true) => CausalClass::Both,
            (true, false) => CausalClass::StrictlyDelta,
            (false, true) => CausalClass::StrictlyNabla,
            (false, false) => CausalClass::Neither,
        }
    }

    pub fn in_family(&self, u: u32, f: Family) -> bool {
        let c = self.complete(u);
        match f {
            Family::Delta => c && self.convergent(u),
            Family::Nabla => c && self.divergent(u),
        }
    }

    pub fn strict(&self, u: u32, f: Family) -> bool {
        self.class(u)
            == match f {
                Family::Delta => CausalClass::StrictlyDelta,
                Family::Nabla => CausalClass::StrictlyNabla,
            }
    }

    /// Smallest family member containing `a ∪ b`, found by collecting the
    /// inclusion-minimal supersets.
    pub fn union(&self, a: u32, b: u32, f: Family) -> OracleUnion {
        let (sa, sb) = (self.class(a), self.class(b));
        if matches!(
            (sa, sb),
            (CausalClass::StrictlyDelta, CausalClass::StrictlyNabla) | (CausalClass::StrictlyNabla, CausalClass::StrictlyDelta)
        ) {
            return OracleUnion::Set(0);
        }
        let target = a | b;
        let supersets: Vec<u32> = self.subsets().filter(|&s| s & target == target && self.in_family(s, f)).collect();
        let minimal: Vec<u32> = supersets
            .iter()
            .copied()
            .filter(|&s| !supersets.iter().any(|&t| t != s && t & s == t))
            .collect();
        match minimal.as_slice() {
            [] => OracleUnion::NoSuperset,
            [one] => OracleUnion::Set(*one),
            _ => OracleUnion::NoSmallest,
        }
    }

    pub fn union_set(&self, a: u32, b: u32, f: Family) -> Option<u32> {
        match self.union(a, b, f) {
            OracleUnion::Set(s) => Some(s),
            _ => None,
        }
    }

    /// Pointwise, so it also runs past the 32-point mask limit.
    pub fn crossing_holds(&self) -> bool {
        let n = self.n;
        for x in 0..n {
            for y in 0..n {
                if !self.unrelated(x, y) {
                    continue;
                }
                for z in 0..n {
                    for w in 0..n {
                        if !(self.le[x][z] && self.le[y][z] && self.le[x][w] && self.le[y][w]) {
                            continue;
                        }
                        let meet = |a: usize, b: usize, c: usize, d: usize| {
                            (0..n).any(|t| self.le[a][t] && self.le[t][b] && self.le[c][t] && self.le[t][d])
                        };
                        let one = meet(x, z, y, w);
                        let two = meet(x, w, y, z);
                        if !one && !two {
                            return false;
                        }
                    }
                }
            }
        }
        true
    }

    /// `R(p)` as `(upper, lower)` masks in ascending order of `upper`, then `lower`.
    pub fn ribbon(&self, p: usize) -> Vec<(u32, u32)> {
        let mut out = Vec::new();
        for a in self.subsets() {
            if a >> p & 1 == 0 || !self.strict(a, Family::Delta) {
                continue;
            }
            for b in self.subsets() {
                if b >> p & 1 == 1 && a & b == 1 << p && self.strict(b, Family::Nabla) {
                    out.push((a, b));
                }
            }
        }
        out
    }

    /// Density read literally: every nontrivial `A ∩ V`, `B ∩ W` with
    /// `V, W` strict sets through `p` contains a ribbon pair `A″ ⊆ A ∩ V`,
    /// `B″ ⊆ B ∩ W`, found by scanning all subsets.
    pub fn dense(&self, p: usize, (a, b): (u32, u32)) -> bool {
        let cuts: Vec<u32> = self
            .subsets()
            .filter(|&v| v >> p & 1 == 1 && (self.strict(v, Family::Delta) || self.strict(v, Family::Nabla)))
            .collect();
        for &v in &cuts {
            let a1 = a & v;
            if a1.count_ones() <= 1 {
                continue;
            }
            for &w in &cuts {
                let b1 = b & w;
                if b1.count_ones() <= 1 {
                    continue;
                }
                let refined = self.subsets().filter(|&x| x & !a1 == 0).any(|a2| {
                    self.subsets().filter(|&y| y & !b1 == 0).any(|b2| {
                        a2.count_ones() > 1
                            && b2.count_ones() > 1
                            && a2 >> p & 1 == 1
                            && b2 >> p & 1 == 1
                            && a2 & b2 == 1 << p
                            && self.strict(a2, Family::Delta)
                            && self.strict(b2, Family::Nabla)
                    })
                });
                if !refined {
                    return false;
                }
            }
        }
        true
    }

    pub fn unions_keep_meet(&self, p: usize, (a, b): (u32, u32), (c, d): (u32, u32)) -> bool {
        if (a | c) & (b | d) != 1 << p {
            return true;
        }
        match (self.union_set(a, c, Family::Delta), self.union_set(b, d, Family::Nabla)) {
            (Some(u), Some(l)) => u & l == 1 << p,
            _ => false,
        }
    }

    pub fn regular_ribbon(&self, p: usize) -> bool {
        let r = self.ribbon(p);
        r.iter().all(|&x| self.dense(p, x)) && r.iter().all(|&x| r.iter().all(|&y| self.unions_keep_meet(p, x, y)))
    }

    /// `Some(congruent)` when both unions exist.
    pub fn congruent(&self, p: usize, (a, b): (u32, u32), (c, d): (u32, u32)) -> Option<bool> {
        let u = self.union_set(a, c, Family::Delta)?;
        let l = self.union_set(b, d, Family::Nabla)?;
        Some(self.ribbon(p).contains(&(u, l)))
    }
}

pub fn to_mask(c: &Causality, ids: &[&str]) -> u32 {
    ids.iter().fold(0, |m, id| m | 1 << c.index_of(id).expect("known id"))
}

pub fn ids(c: &Causality, m: u32) -> Vec<String> {
    members(m).into_iter().map(|i| c.points()[i].clone()).collect()
}
