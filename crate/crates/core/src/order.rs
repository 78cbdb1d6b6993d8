//! Finite causalities: a ground set of opaque point ids with a reflexive,
//! antisymmetric and transitive relation `⪯`.
//!
//! Rows are stored twice, as the future `C[x,∞] = {z : x ⪯ z}` and the past
//! `C[∞,x] = {z : z ⪯ x}` of every point, so that diamonds and the completeness
//! and convergence predicates reduce to word-wise bit operations.

use std::collections::HashMap;

use thiserror::Error;

use crate::pointset::PointSet;

/// Largest ground set handled by the single-word set engine used in the
/// exhaustive modes.
pub const MAX_MASK_POINTS: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OrderError {
    #[error("relation is {rows}x{cols} but there are {points} points")]
    ShapeMismatch {
        points: usize,
        rows: usize,
        cols: usize,
    },
    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),
    #[error("relation is not reflexive at point {0}")]
    NotReflexive(usize),
    #[error("relation is not antisymmetric: {0} ⪯ {1} and {1} ⪯ {0}")]
    NotAntisymmetric(usize, usize),
    #[error("relation is not transitive: {0} ⪯ {1} ⪯ {2} but not {0} ⪯ {2}")]
    NotTransitive(usize, usize, usize),
    #[error("unknown point id {0:?}")]
    UnknownPoint(String),
    #[error("invalid reversal map: {0}")]
    InvalidReversal(String),
    #[error("ground set of {size} points exceeds the cap of {cap}")]
    GroundSetTooLarge { size: usize, cap: usize },
}

/// Which incomplete diamond of a point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    /// `C[∞,x]`, everything below `x`.
    Upper,
    /// `C[x,∞]`, everything above `x`.
    Lower,
}

/// Outcome of the crossing-property scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Crossing {
    Holds,
    /// Unrelated `x, y` below both `z` and `w` with `C[x,z] ∩ C[y,w]` and
    /// `C[x,w] ∩ C[y,z]` both empty.
    Fails {
        x: usize,
        y: usize,
        z: usize,
        w: usize,
    },
}

impl Crossing {
    pub fn holds(&self) -> bool {
        matches!(self, Crossing::Holds)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Causality {
    points: Vec<String>,
    future: Vec<PointSet>,
    past: Vec<PointSet>,
}

/// Validates `relation` (entry `[i][j]` true iff `points[i] ⪯ points[j]`)
/// against the poset axioms.
pub fn validate_causality(
    points: Vec<String>,
    relation: &[Vec<bool>],
) -> Result<Causality, OrderError> {
    let n = points.len();
    if relation.len() != n || relation.iter().any(|row| row.len() != n) {
        return Err(OrderError::ShapeMismatch {
            points: n,
            rows: relation.len(),
            cols: relation.iter().map(Vec::len).find(|&l| l != n).unwrap_or(n),
        });
    }
    let mut seen = HashMap::with_capacity(n);
    for (i, p) in points.iter().enumerate() {
        if seen.insert(p.as_str(), i).is_some() {
            return Err(OrderError::DuplicatePoint(p.clone()));
        }
    }
    let future: Vec<PointSet> = relation
        .iter()
        .map(|row| PointSet::from_indices(n, (0..n).filter(|&j| row[j])))
        .collect();
    for (i, row) in future.iter().enumerate() {
        if !row.contains(i) {
            return Err(OrderError::NotReflexive(i));
        }
    }
    for (i, row) in future.iter().enumerate() {
        for j in row.iter() {
            if j > i && future[j].contains(i) {
                return Err(OrderError::NotAntisymmetric(i, j));
            }
        }
    }
    for (i, row) in future.iter().enumerate() {
        for j in row.iter() {
            if !future[j].is_subset(row) {
                let k = (&future[j] - row).iter().next().expect("nonempty difference");
                return Err(OrderError::NotTransitive(i, j, k));
            }
        }
    }
    let past = (0..n)
        .map(|j| PointSet::from_indices(n, (0..n).filter(|&i| future[i].contains(j))))
        .collect();
    Ok(Causality {
        points,
        future,
        past,
    })
}

/// Reflexive-transitive closure of a cover (or any generating) relation.
pub fn reflexive_transitive_closure(relation: &[Vec<bool>]) -> Vec<Vec<bool>> {
    let n = relation.len();
    let mut rows: Vec<PointSet> = relation
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut s = PointSet::from_indices(n, (0..row.len().min(n)).filter(|&j| row[j]));
            s.insert(i);
            s
        })
        .collect();
    // Warshall, one pivot at a time.
    for k in 0..n {
        let pivot = rows[k].clone();
        for row in rows.iter_mut() {
            if row.contains(k) {
                row.union_with(&pivot);
            }
        }
    }
    rows.iter()
        .map(|r| (0..n).map(|j| r.contains(j)).collect())
        .collect()
}

impl Causality {
    /// Builds a causality from a cover relation, closing it reflexively and
    /// transitively before validation.
    pub fn from_cover(points: Vec<String>, cover: &[Vec<bool>]) -> Result<Self, OrderError> {
        let n = points.len();
        if cover.len() != n || cover.iter().any(|row| row.len() != n) {
            return Err(OrderError::ShapeMismatch {
                points: n,
                rows: cover.len(),
                cols: cover.first().map_or(0, Vec::len),
            });
        }
        validate_causality(points, &reflexive_transitive_closure(cover))
    }

    /// Builds a causality from `(lower, upper)` pairs of point ids.
    pub fn from_pairs(points: &[&str], pairs: &[(&str, &str)]) -> Result<Self, OrderError> {
        let n = points.len();
        let index = |id: &str| {
            points
                .iter()
                .position(|p| *p == id)
                .ok_or_else(|| OrderError::UnknownPoint(id.to_string()))
        };
        let mut cover = vec![vec![false; n]; n];
        for (a, b) in pairs {
            cover[index(a)?][index(b)?] = true;
        }
        Self::from_cover(points.iter().map(|s| s.to_string()).collect(), &cover)
    }

    /// The causality on `n` points induced by a predicate; validated.
    pub fn from_predicate(
        points: Vec<String>,
        mut precedes: impl FnMut(usize, usize) -> bool,
    ) -> Result<Self, OrderError> {
        let n = points.len();
        let relation: Vec<Vec<bool>> = (0..n)
            .map(|i| (0..n).map(|j| precedes(i, j)).collect())
            .collect();
        validate_causality(points, &relation)
    }

    pub fn empty() -> Self {
        Causality {
            points: Vec::new(),
            future: Vec::new(),
            past: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[String] {
        &self.points
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.points.iter().position(|p| p == id)
    }

    pub fn precedes(&self, x: usize, y: usize) -> bool {
        self.future[x].contains(y)
    }

    /// Either `x ⪯ y` or `y ⪯ x`.
    pub fn related(&self, x: usize, y: usize) -> bool {
        self.precedes(x, y) || self.precedes(y, x)
    }

    pub fn relation_matrix(&self) -> Vec<Vec<bool>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.precedes(i, j)).collect())
            .collect()
    }

    pub fn empty_set(&self) -> PointSet {
        PointSet::empty(self.len())
    }

    pub fn full_set(&self) -> PointSet {
        PointSet::full(self.len())
    }

    /// Resolves point ids to a set.
    pub fn set_of<S: AsRef<str>>(&self, ids: &[S]) -> Result<PointSet, OrderError> {
        let mut s = self.empty_set();
        for id in ids {
            let i = self
                .index_of(id.as_ref())
                .ok_or_else(|| OrderError::UnknownPoint(id.as_ref().to_string()))?;
            s.insert(i);
        }
        Ok(s)
    }

    pub fn ids_of(&self, set: &PointSet) -> Vec<String> {
        set.iter().map(|i| self.points[i].clone()).collect()
    }

    /// Per-point future and past masks for the single-word engine.
    pub fn masks(&self) -> Result<(Vec<u64>, Vec<u64>), OrderError> {
        if self.len() > MAX_MASK_POINTS {
            return Err(OrderError::GroundSetTooLarge {
                size: self.len(),
                cap: MAX_MASK_POINTS,
            });
        }
        let word = |s: &PointSet| s.to_mask().expect("fits in one word");
        Ok((
            self.future.iter().map(word).collect(),
            self.past.iter().map(word).collect(),
        ))
    }

    /// `C[x,y] = {z : x ⪯ z ⪯ y}`.
    pub fn diamond(&self, x: usize, y: usize) -> PointSet {
        &self.future[x] & &self.past[y]
    }

    pub fn incomplete_diamond(&self, x: usize, direction: Direction) -> PointSet {
        match direction {
            Direction::Upper => self.past[x].clone(),
            Direction::Lower => self.future[x].clone(),
        }
    }

    fn check_set(&self, u: &PointSet) {
        assert_eq!(
            u.universe(),
            self.len(),
            "point set does not belong to this causality"
        );
    }

    /// All points above some member of `u`.
    pub fn up_closure(&self, u: &PointSet) -> PointSet {
        let mut out = self.empty_set();
        for x in u.iter() {
            out.union_with(&self.future[x]);
        }
        out
    }

    /// All points below some member of `u`.
    pub fn down_closure(&self, u: &PointSet) -> PointSet {
        let mut out = self.empty_set();
        for x in u.iter() {
            out.union_with(&self.past[x]);
        }
        out
    }

    /// Every diamond between members of `u` lies in `u`. Equivalent to
    /// `↑u ∩ ↓u ⊆ u`, which is what is evaluated.
    pub fn is_causally_complete(&self, u: &PointSet) -> bool {
        self.check_set(u);
        (&self.up_closure(u) & &self.down_closure(u)).is_subset(u)
    }

    /// Every unrelated pair in `u` has a common upper bound in `u`.
    pub fn is_convergent(&self, u: &PointSet) -> bool {
        self.check_set(u);
        self.directed(u, &self.future)
    }

    /// Every unrelated pair in `u` has a common lower bound in `u`.
    pub fn is_divergent(&self, u: &PointSet) -> bool {
        self.check_set(u);
        self.directed(u, &self.past)
    }

    fn directed(&self, u: &PointSet, cones: &[PointSet]) -> bool {
        let members: Vec<usize> = u.iter().collect();
        for (k, &x) in members.iter().enumerate() {
            for &y in &members[k + 1..] {
                if !self.related(x, y) && !cones[x].intersects3(&cones[y], u) {
                    return false;
                }
            }
        }
        true
    }

    /// The member of `u` bounding all of `u` from above (`Upper`) or below
    /// (`Lower`), if any. Antisymmetry makes it unique.
    pub fn vertex(&self, u: &PointSet, direction: Direction) -> Option<usize> {
        self.check_set(u);
        u.iter().find(|&v| match direction {
            Direction::Upper => u.is_subset(&self.past[v]),
            Direction::Lower => u.is_subset(&self.future[v]),
        })
    }

    /// Scans every quadruple `(x, y, z, w)` with `x, y` unrelated and
    /// `x, y ⪯ z, w`, `z = w` included, in lexicographic order.
    pub fn crossing_property(&self) -> Crossing {
        let n = self.len();
        for x in 0..n {
            for y in x + 1..n {
                if self.related(x, y) {
                    continue;
                }
                let common = &self.future[x] & &self.future[y];
                let uppers: Vec<usize> = common.iter().collect();
                for &z in &uppers {
                    let xz = self.diamond(x, z);
                    let yz = self.diamond(y, z);
                    for &w in &uppers {
                        let xw = self.diamond(x, w);
                        let yw = self.diamond(y, w);
                        if !xz.intersects(&yw) && !xw.intersects(&yz) {
                            return Crossing::Fails { x, y, z, w };
                        }
                    }
                }
            }
        }
        Crossing::Holds
    }

    /// The same points under the reversed relation `⪯⁻¹`.
    pub fn reversed(&self) -> Causality {
        Causality {
            points: self.points.clone(),
            future: self.past.clone(),
            past: self.future.clone(),
        }
    }

    /// Cover pairs `(x, y)`: `x ⪯ y`, `x ≠ y`, nothing strictly between.
    pub fn hasse_edges(&self) -> Vec<(usize, usize)> {
        let mut edges = Vec::new();
        for x in 0..self.len() {
            for y in self.future[x].iter() {
                if x != y && self.diamond(x, y).len() == 2 {
                    edges.push((x, y));
                }
            }
        }
        edges
    }

    /// Graphviz rendering of the Hasse diagram, edges pointing upward in the
    /// order.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph causality {\n  rankdir=BT;\n  node [shape=circle];\n");
        for (i, p) in self.points.iter().enumerate() {
            out.push_str(&format!("  n{i} [label={}];\n", dot_quote(p)));
        }
        for (x, y) in self.hasse_edges() {
            out.push_str(&format!("  n{x} -> n{y};\n"));
        }
        out.push_str("}\n");
        out
    }

    /// Image of `u` under a reversal map. `Structural` leaves the set alone;
    /// it is to be read in [`Causality::reversed`].
    pub fn reverse(&self, map: &ReversalMap, u: &PointSet) -> Result<PointSet, OrderError> {
        self.check_set(u);
        map.check(self)?;
        Ok(map.apply(u))
    }
}

fn dot_quote(s: &str) -> String {
    format!("\"{}\"", s.replace('\\', "\\\\").replace('"', "\\\""))
}

/// Order reversal `T`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ReversalMap {
    /// Identity on points; set-level questions are answered in the reversed
    /// relation.
    Structural,
    /// An order-reversing involution of the ground set, `mapping[i] = T(i)`.
    PointMap(Vec<usize>),
}

impl ReversalMap {
    /// Validates a point map against `c`: an involution with
    /// `T(x) ⪯ T(y) ⇔ y ⪯ x`.
    pub fn point_map(c: &Causality, mapping: Vec<usize>) -> Result<Self, OrderError> {
        let map = ReversalMap::PointMap(mapping);
        map.check(c)?;
        Ok(map)
    }

    pub fn check(&self, c: &Causality) -> Result<(), OrderError> {
        let ReversalMap::PointMap(t) = self else {
            return Ok(());
        };
        let n = c.len();
        if t.len() != n {
            return Err(OrderError::InvalidReversal(format!(
                "map has {} entries for {n} points",
                t.len()
            )));
        }
        for (x, &tx) in t.iter().enumerate() {
            if tx >= n || t[tx] != x {
                return Err(OrderError::InvalidReversal(format!(
                    "not an involution at point {x}"
                )));
            }
        }
        for x in 0..n {
            for y in 0..n {
                if c.precedes(t[x], t[y]) != c.precedes(y, x) {
                    return Err(OrderError::InvalidReversal(format!(
                        "not order reversing on ({x}, {y})"
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn apply(&self, u: &PointSet) -> PointSet {
        match self {
            ReversalMap::Structural => u.clone(),
            ReversalMap::PointMap(t) => PointSet::from_indices(u.universe(), u.iter().map(|x| t[x])),
        }
    }
}
