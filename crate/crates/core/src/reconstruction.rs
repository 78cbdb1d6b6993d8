//! Recovering the order from the set algebra alone.
//!
//! For a point `p` the ribbon `R(p)` holds every pair `(A, B)` of a strictly Δ
//! set and a strictly ∇ set through `p` that meet only in `p`. Two pairs are
//! congruent when their componentwise causal unions are again a pair of
//! `R(p)`. Points whose ribbon is regular carry at most two congruence
//! classes, and `p ⪯ q` is declared when some class `α` of `p` and `γ` of `q`
//! satisfy, for all `(A,B) ∈ α` and `(C,D) ∈ γ`,
//! `(A ∪ C, D) ∈ γ` and `(A, B ∪ D) ∈ α`.
//!
//! Everything here is exhaustive over the enumerated collections, so ground
//! sets are capped by [`Caps::ribbon`].

use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::algebra::{AlgebraError, CausalAlgebra, CausalClass, Caps, UnionFailure, UnionKind};
use crate::order::Causality;
use crate::pointset::{mask_bits, PointSet};
use crate::report::{LawReport, Tally};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReconstructionError {
    #[error("ground set of {size} points exceeds the cap of {cap}")]
    GroundSetTooLarge { size: usize, cap: usize },
    #[error("pair is not in the ribbon over point {0}")]
    NotInRibbon(usize),
    #[error("congruence over point {point} undecidable: a causal union is {reason}")]
    NotCongruentDecidable { point: usize, reason: String },
    #[error("ribbon over point {point} is not regular: {reason}")]
    NotRegular { point: usize, reason: String },
    #[error("theorem violated: {0}")]
    TheoremViolation(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RibbonPair {
    /// Strictly Δ, contains the basepoint.
    pub upper: PointSet,
    /// Strictly ∇, contains the basepoint.
    pub lower: PointSet,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Ribbon {
    pub basepoint: usize,
    pub pairs: Vec<RibbonPair>,
    /// `None` until regularity has been checked.
    pub regular: Option<bool>,
    /// Congruence classes as indices into `pairs`; empty until computed.
    pub classes: Vec<Vec<usize>>,
}

/// First failing condition of the regular-ribbon definition.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "condition", rename_all = "snake_case")]
pub enum RibbonDefect {
    /// A pair has a nontrivial cut `(A ∩ V, B ∩ W)` containing no ribbon pair.
    NotDense {
        pair: usize,
        cut_upper: Vec<usize>,
        cut_lower: Vec<usize>,
    },
    /// `(A ∪ C) ∩ (B ∪ D) = {p}` but the causal unions meet in more, or do
    /// not exist.
    UnionsOverlap {
        first: usize,
        second: usize,
        meet: Option<Vec<usize>>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularityDiagnostics {
    pub point: usize,
    pub regular: bool,
    pub empty: bool,
    pub pairs: usize,
    /// At most one defect per condition, density first.
    pub defects: Vec<RibbonDefect>,
}

/// Ribbons, congruence and reconstruction over one causality.
#[derive(Debug, Clone)]
pub struct RibbonEngine {
    algebra: CausalAlgebra,
    strict_delta: Vec<u64>,
    strict_nabla: Vec<u64>,
}

type Pair = (u64, u64);

impl RibbonEngine {
    pub fn new(c: &Causality, caps: Caps) -> Result<Self, ReconstructionError> {
        let cap = caps.ribbon.min(Caps::HARD.ribbon);
        if c.len() > cap {
            return Err(ReconstructionError::GroundSetTooLarge { size: c.len(), cap });
        }
        let algebra = CausalAlgebra::new(c, cap)?;
        let strict_delta = algebra
            .delta_masks()
            .iter()
            .copied()
            .filter(|&m| algebra.class_of(m) == CausalClass::StrictlyDelta)
            .collect();
        let strict_nabla = algebra
            .nabla_masks()
            .iter()
            .copied()
            .filter(|&m| algebra.class_of(m) == CausalClass::StrictlyNabla)
            .collect();
        Ok(RibbonEngine {
            algebra,
            strict_delta,
            strict_nabla,
        })
    }

    pub fn algebra(&self) -> &CausalAlgebra {
        &self.algebra
    }

    pub fn causality(&self) -> &Causality {
        self.algebra.causality()
    }

    /// `C₊(p)`: strictly Δ sets containing `p`.
    pub fn strict_delta_through(&self, p: usize) -> Vec<u64> {
        self.strict_delta.iter().copied().filter(|m| m >> p & 1 == 1).collect()
    }

    /// `C₋(p)`: strictly ∇ sets containing `p`.
    pub fn strict_nabla_through(&self, p: usize) -> Vec<u64> {
        self.strict_nabla.iter().copied().filter(|m| m >> p & 1 == 1).collect()
    }

    pub fn ribbon_pairs(&self, p: usize) -> Vec<Pair> {
        let bit = 1u64 << p;
        let minus = self.strict_nabla_through(p);
        self.strict_delta_through(p)
            .into_iter()
            .flat_map(|a| minus.iter().filter(move |&&b| a & b == bit).map(move |&b| (a, b)))
            .collect()
    }

    fn to_pair(&self, (a, b): Pair) -> RibbonPair {
        RibbonPair {
            upper: self.algebra.set(a),
            lower: self.algebra.set(b),
        }
    }

    fn mask_pair(&self, pair: &RibbonPair) -> Pair {
        (self.algebra.mask(&pair.upper), self.algebra.mask(&pair.lower))
    }

    /// The ribbon over `p`, pairs only.
    pub fn ribbon(&self, p: usize) -> Ribbon {
        Ribbon {
            basepoint: p,
            pairs: self.ribbon_pairs(p).into_iter().map(|x| self.to_pair(x)).collect(),
            regular: None,
            classes: Vec::new(),
        }
    }

    fn in_ribbon(&self, p: usize, (a, b): Pair) -> bool {
        a >> p & 1 == 1
            && b >> p & 1 == 1
            && a & b == 1 << p
            && self.algebra.class_of(a) == CausalClass::StrictlyDelta
            && self.algebra.class_of(b) == CausalClass::StrictlyNabla
    }

    /// A nontrivial cut `(A ∩ V, B ∩ W)`, `V, W ∈ C₊(p) ∪ C₋(p)`, with no ribbon
    /// pair inside it, if one exists.
    fn density_gap(&self, p: usize, (a, b): Pair, pairs: &[Pair], cuts: &[u64]) -> Option<Pair> {
        let distinct_cuts = |side: u64| {
            let mut out: Vec<u64> = cuts
                .iter()
                .map(|&v| side & v)
                .filter(|m| m.count_ones() > 1)
                .collect();
            out.sort_unstable();
            out.dedup();
            out
        };
        debug_assert!(a >> p & 1 == 1);
        let uppers = distinct_cuts(a);
        let lowers = distinct_cuts(b);
        for &cu in &uppers {
            for &cl in &lowers {
                if !pairs.iter().any(|&(x, y)| x & !cu == 0 && y & !cl == 0) {
                    return Some((cu, cl));
                }
            }
        }
        None
    }

    /// Whether `pair` is dense in `R(p)`. "Nontrivial" means neither `∅` nor
    /// `{p}`; the refining pair must itself lie in `R(p)`.
    pub fn is_dense(&self, p: usize, pair: &RibbonPair) -> Result<bool, ReconstructionError> {
        let pair = self.mask_pair(pair);
        if !self.in_ribbon(p, pair) {
            return Err(ReconstructionError::NotInRibbon(p));
        }
        let pairs = self.ribbon_pairs(p);
        let cuts = self.cuts(p);
        Ok(self.density_gap(p, pair, &pairs, &cuts).is_none())
    }

    fn cuts(&self, p: usize) -> Vec<u64> {
        let mut cuts = self.strict_delta_through(p);
        cuts.extend(self.strict_nabla_through(p));
        cuts
    }

    fn regularity_of(&self, p: usize, pairs: &[Pair]) -> RegularityDiagnostics {
        let mut defects = Vec::new();
        let cuts = self.cuts(p);
        let gap = pairs
            .iter()
            .enumerate()
            .find_map(|(i, &pair)| self.density_gap(p, pair, pairs, &cuts).map(|g| (i, g)));
        if let Some((i, (cu, cl))) = gap {
            defects.push(RibbonDefect::NotDense {
                pair: i,
                cut_upper: mask_bits(cu).collect(),
                cut_lower: mask_bits(cl).collect(),
            });
        }
        defects.extend(self.union_overlap(p, pairs));
        RegularityDiagnostics {
            point: p,
            regular: defects.is_empty(),
            empty: pairs.is_empty(),
            pairs: pairs.len(),
            defects,
        }
    }

    fn union_overlap(&self, p: usize, pairs: &[Pair]) -> Option<RibbonDefect> {
        let bit = 1u64 << p;
        for (i, &(a, b)) in pairs.iter().enumerate() {
            for (j, &(c, d)) in pairs.iter().enumerate().skip(i) {
                if (a | c) & (b | d) != bit {
                    continue;
                }
                let upper = self.algebra.union_masks(a, c, UnionKind::Delta);
                let lower = self.algebra.union_masks(b, d, UnionKind::Nabla);
                let meet = match (upper, lower) {
                    (Ok(u), Ok(l)) => Some(u & l),
                    _ => None,
                };
                if meet != Some(bit) {
                    return Some(RibbonDefect::UnionsOverlap {
                        first: i,
                        second: j,
                        meet: meet.map(|m| mask_bits(m).collect()),
                    });
                }
            }
        }
        None
    }

    /// Both regularity conditions, checked exhaustively; the diagnostics name
    /// the first failing pair and condition.
    pub fn is_regular_ribbon(&self, p: usize) -> RegularityDiagnostics {
        self.regularity_of(p, &self.ribbon_pairs(p))
    }

    fn congruent_masks(&self, p: usize, (a, b): Pair, (c, d): Pair) -> Result<bool, ReconstructionError> {
        let undecidable = |f: UnionFailure| ReconstructionError::NotCongruentDecidable {
            point: p,
            reason: match f {
                UnionFailure::NotClosed(_) => "not closed".into(),
                UnionFailure::NoSuperset => "without superset".into(),
                UnionFailure::Incompatible(..) => "between incompatible operands".into(),
            },
        };
        let upper = self.algebra.union_masks(a, c, UnionKind::Delta).map_err(undecidable)?;
        let lower = self.algebra.union_masks(b, d, UnionKind::Nabla).map_err(undecidable)?;
        let congruent = self.in_ribbon(p, (upper, lower));
        if congruent && (a & d != 1 << p || b & c != 1 << p) {
            return Err(ReconstructionError::TheoremViolation(format!(
                "congruent pairs over point {p} cross-meet outside the point"
            )));
        }
        Ok(congruent)
    }

    /// `(A,B) ≃ (C,D)` iff `(A ∪ C, B ∪ D) ∈ R(p)`.
    pub fn congruent(
        &self,
        p: usize,
        first: &RibbonPair,
        second: &RibbonPair,
    ) -> Result<bool, ReconstructionError> {
        let (x, y) = (self.mask_pair(first), self.mask_pair(second));
        for pair in [x, y] {
            if !self.in_ribbon(p, pair) {
                return Err(ReconstructionError::NotInRibbon(p));
            }
        }
        self.congruent_masks(p, x, y)
    }

    /// Connected components of the congruence relation, no regularity
    /// required. Used for diagnostics and by [`Self::congruence_classes`].
    pub fn congruence_components(&self, p: usize, pairs: &[Pair]) -> Result<Vec<Vec<usize>>, ReconstructionError> {
        let mut parent: Vec<usize> = (0..pairs.len()).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for i in 0..pairs.len() {
            for j in i + 1..pairs.len() {
                if self.congruent_masks(p, pairs[i], pairs[j])? {
                    let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                    if ri != rj {
                        parent[ri.max(rj)] = ri.min(rj);
                    }
                }
            }
        }
        let mut classes: Vec<Vec<usize>> = Vec::new();
        let mut slot: HashMap<usize, usize> = HashMap::new();
        for i in 0..pairs.len() {
            let root = find(&mut parent, i);
            let k = *slot.entry(root).or_insert_with(|| {
                classes.push(Vec::new());
                classes.len() - 1
            });
            classes[k].push(i);
        }
        Ok(classes)
    }

    fn classes_of(&self, p: usize, pairs: &[Pair]) -> Result<Vec<Vec<usize>>, ReconstructionError> {
        let classes = self.congruence_components(p, pairs)?;
        for class in &classes {
            for (k, &i) in class.iter().enumerate() {
                for &j in &class[k + 1..] {
                    if !self.congruent_masks(p, pairs[i], pairs[j])? {
                        return Err(ReconstructionError::TheoremViolation(format!(
                            "congruence is not transitive on the regular ribbon over point {p}: pairs {i} and {j}"
                        )));
                    }
                }
            }
        }
        if classes.len() > 2 {
            return Err(ReconstructionError::TheoremViolation(format!(
                "regular ribbon over point {p} has {} congruence classes",
                classes.len()
            )));
        }
        Ok(classes)
    }

    /// The ribbon over `p` with its congruence classes. Requires a regular
    /// ribbon; more than two classes, or a class whose members are not
    /// pairwise congruent, is a theorem violation.
    pub fn congruence_classes(&self, p: usize) -> Result<Ribbon, ReconstructionError> {
        let pairs = self.ribbon_pairs(p);
        let diag = self.regularity_of(p, &pairs);
        if !diag.regular {
            return Err(ReconstructionError::NotRegular {
                point: p,
                reason: format!("{:?}", diag.defects),
            });
        }
        let classes = self.classes_of(p, &pairs)?;
        Ok(Ribbon {
            basepoint: p,
            pairs: pairs.into_iter().map(|x| self.to_pair(x)).collect(),
            regular: Some(true),
            classes,
        })
    }

    fn analyze(&self, p: usize) -> PointAnalysis {
        let pairs = self.ribbon_pairs(p);
        let regularity = self.regularity_of(p, &pairs);
        let classes = if regularity.regular && !pairs.is_empty() {
            Some(self.classes_of(p, &pairs))
        } else {
            None
        };
        PointAnalysis {
            pairs,
            regularity,
            classes,
        }
    }

    /// Statement 1 of the order definition for one class of `p` and one of
    /// `q`, quantified over all members of both.
    fn precedes_by_classes(&self, p_pairs: &[Pair], alpha: &HashSet<Pair>, q_pairs: &[Pair], gamma: &HashSet<Pair>) -> bool {
        for &(a, b) in p_pairs {
            for &(c, d) in q_pairs {
                let Ok(upper) = self.algebra.union_masks(a, c, UnionKind::Delta) else {
                    return false;
                };
                if !gamma.contains(&(upper, d)) {
                    return false;
                }
                let Ok(lower) = self.algebra.union_masks(b, d, UnionKind::Nabla) else {
                    return false;
                };
                if !alpha.contains(&(a, lower)) {
                    return false;
                }
            }
        }
        true
    }

    /// Reconstructs the order on the points with a regular, nonempty ribbon
    /// and compares it with the causality the algebra came from.
    pub fn report(&self) -> ReconstructionReport {
        let c = self.causality();
        let n = c.len();
        let analyses: Vec<PointAnalysis> = (0..n).into_par_iter().map(|p| self.analyze(p)).collect();

        let mut violations = Vec::new();
        let mut per_point = Vec::with_capacity(n);
        let mut domain = Vec::new();
        let mut class_sets: Vec<Vec<(Vec<Pair>, HashSet<Pair>)>> = vec![Vec::new(); n];
        for (p, an) in analyses.iter().enumerate() {
            let (status, class_count) = match (&an.classes, an.pairs.is_empty(), an.regularity.regular) {
                (_, true, _) => (PointStatus::EmptyRibbon, None),
                (_, false, false) => (PointStatus::Irregular, None),
                (Some(Ok(classes)), false, true) => {
                    domain.push(p);
                    class_sets[p] = classes
                        .iter()
                        .map(|members| {
                            let list: Vec<Pair> = members.iter().map(|&i| an.pairs[i]).collect();
                            let set = list.iter().copied().collect();
                            (list, set)
                        })
                        .collect();
                    (PointStatus::Regular, Some(classes.len()))
                }
                (Some(Err(e)), false, true) => {
                    if let ReconstructionError::TheoremViolation(msg) = e {
                        violations.push(msg.clone());
                    }
                    (PointStatus::Failed(e.to_string()), None)
                }
                (None, false, true) => unreachable!("classes are computed for regular nonempty ribbons"),
            };
            per_point.push(PointReport {
                id: c.points()[p].clone(),
                ribbon_pairs: an.pairs.len(),
                status,
                classes: class_count,
                defects: an.regularity.defects.clone(),
            });
        }

        let relation: Vec<Vec<bool>> = domain
            .par_iter()
            .map(|&p| {
                domain
                    .iter()
                    .map(|&q| {
                        class_sets[p].iter().any(|(alpha_list, alpha)| {
                            class_sets[q].iter().any(|(gamma_list, gamma)| {
                                self.precedes_by_classes(alpha_list, alpha, gamma_list, gamma)
                            })
                        })
                    })
                    .collect()
            })
            .collect();

        let ids = |i: usize| c.points()[domain[i]].clone();
        let m = domain.len();
        for i in 0..m {
            if !relation[i][i] {
                violations.push(format!("reconstructed relation not reflexive at {}", ids(i)));
            }
            for j in 0..m {
                if i != j && relation[i][j] && relation[j][i] {
                    violations.push(format!(
                        "reconstructed relation not antisymmetric on {} and {}",
                        ids(i),
                        ids(j)
                    ));
                }
                for k in 0..m {
                    if relation[i][j] && relation[j][k] && !relation[i][k] {
                        violations.push(format!(
                            "reconstructed relation not transitive on {}, {}, {}",
                            ids(i),
                            ids(j),
                            ids(k)
                        ));
                    }
                }
            }
        }

        let mut diff = Vec::new();
        for i in 0..m {
            for j in 0..m {
                let original = c.precedes(domain[i], domain[j]);
                if original != relation[i][j] {
                    diff.push(OrderDiff {
                        p: ids(i),
                        q: ids(j),
                        original,
                        reconstructed: relation[i][j],
                    });
                }
            }
        }

        ReconstructionReport {
            points: c.points().to_vec(),
            domain: domain.iter().map(|&p| c.points()[p].clone()).collect(),
            domain_indices: domain,
            relation,
            per_point,
            theorem_violations: violations,
            diff,
        }
    }
}

struct PointAnalysis {
    pairs: Vec<Pair>,
    regularity: RegularityDiagnostics,
    classes: Option<Result<Vec<Vec<usize>>, ReconstructionError>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PointStatus {
    EmptyRibbon,
    Irregular,
    Regular,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PointReport {
    pub id: String,
    pub ribbon_pairs: usize,
    pub status: PointStatus,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub classes: Option<usize>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub defects: Vec<RibbonDefect>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OrderDiff {
    pub p: String,
    pub q: String,
    pub original: bool,
    pub reconstructed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReconstructionReport {
    pub points: Vec<String>,
    /// Points with a regular, nonempty ribbon.
    pub domain: Vec<String>,
    #[serde(skip)]
    pub domain_indices: Vec<usize>,
    /// Reconstructed relation over `domain`, row `i` column `j` true iff
    /// `domain[i] ⪯ domain[j]`.
    pub relation: Vec<Vec<bool>>,
    pub per_point: Vec<PointReport>,
    pub theorem_violations: Vec<String>,
    /// Entries of the reconstructed relation that differ from the original
    /// order on the domain.
    pub diff: Vec<OrderDiff>,
}

impl ReconstructionReport {
    /// Reconstructed `p ⪯ q` for ground-set indices, `None` outside the domain.
    pub fn precedes(&self, p: usize, q: usize) -> Option<bool> {
        let i = self.domain_indices.iter().position(|&x| x == p)?;
        let j = self.domain_indices.iter().position(|&x| x == q)?;
        Some(self.relation[i][j])
    }
}

/// Reconstructs the order; partial-order axiom failures of the result, or
/// theorem violations met on the way, are errors.
pub fn reconstruct_order(c: &Causality, caps: Caps) -> Result<ReconstructionReport, ReconstructionError> {
    let report = RibbonEngine::new(c, caps)?.report();
    if let Some(first) = report.theorem_violations.first() {
        return Err(ReconstructionError::TheoremViolation(first.clone()));
    }
    Ok(report)
}

/// Reconstructs the order of `c` and of its reversal and checks that regular
/// points correspond and that the two relations are transposes.
pub fn verify_t_reversal(c: &Causality, caps: Caps) -> Result<LawReport, ReconstructionError> {
    let forward = RibbonEngine::new(c, caps)?.report();
    let backward = RibbonEngine::new(&c.reversed(), caps)?.report();

    let mut regular = Tally::new("t_reversal_regular_points");
    regular.check(forward.domain_indices == backward.domain_indices, || {
        json!({"forward": forward.domain, "reversed": backward.domain})
    });

    let mut transpose = Tally::new("t_reversal_transpose");
    for &p in &forward.domain_indices {
        for &q in &forward.domain_indices {
            match (forward.precedes(p, q), backward.precedes(q, p)) {
                (Some(f), Some(b)) => transpose.check(f == b, || {
                    json!({"p": c.points()[p], "q": c.points()[q], "forward": f, "reversed_transpose": b})
                }),
                _ => transpose.skip(),
            }
        }
    }
    Ok(LawReport {
        entries: vec![regular.finish(), transpose.finish()],
    })
}

/// Which requirement of a regular causality failed first.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "bullet", rename_all = "snake_case")]
pub enum RegularityBullet {
    /// Union of two strictly Δ sets with upper vertex `p` is not strictly Δ
    /// with upper vertex `p`.
    UpperVertexUnion { point: String, a: Vec<String>, b: Vec<String> },
    /// Dual for strictly ∇ sets with lower vertex `p`.
    LowerVertexUnion { point: String, a: Vec<String>, b: Vec<String> },
    /// `p ⪯ q` but a vertex set of `p` (resp. `q`) has no enlargement with
    /// vertex `q` (resp. `p`).
    Extension { p: String, q: String, set: Vec<String> },
    Crossing { x: String, y: String, z: String, w: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RegularCausalityReport {
    pub regular: bool,
    pub first_failure: Option<RegularityBullet>,
    /// Per point: both vertex-union requirements hold at the point.
    pub vertex_unions_ok: Vec<bool>,
    /// `extension_ok[p][q]`: the extension requirement holds for `(p, q)`;
    /// true whenever `p ⋠ q`.
    pub extension_ok: Vec<Vec<bool>>,
}

impl RegularCausalityReport {
    /// The requirements hold locally for the pair: at both points and for the
    /// extension in whichever direction the points are related.
    pub fn pair_passes(&self, p: usize, q: usize) -> bool {
        self.vertex_unions_ok[p] && self.vertex_unions_ok[q] && self.extension_ok[p][q] && self.extension_ok[q][p]
    }
}

/// Checks the requirements of a regular causality: vertex-preserving causal
/// unions of bounded strict sets at every point, extension of bounded strict
/// sets along `⪯`, and the crossing property.
pub fn is_regular_causality(c: &Causality, caps: Caps) -> Result<RegularCausalityReport, ReconstructionError> {
    let engine = RibbonEngine::new(c, caps)?;
    let alg = &engine.algebra;
    let n = c.len();
    let ids = |m: u64| alg.ids(m);
    let name = |p: usize| c.points()[p].clone();

    let upper_bounded: Vec<Vec<u64>> = (0..n)
        .map(|p| engine.strict_delta_through(p).into_iter().filter(|&m| alg.vertex_mask(m, true) == Some(p)).collect())
        .collect();
    let lower_bounded: Vec<Vec<u64>> = (0..n)
        .map(|p| engine.strict_nabla_through(p).into_iter().filter(|&m| alg.vertex_mask(m, false) == Some(p)).collect())
        .collect();

    let mut first_failure = None;
    let mut vertex_unions_ok = vec![true; n];
    for p in 0..n {
        let checks = [
            (&upper_bounded[p], UnionKind::Delta, CausalClass::StrictlyDelta, true),
            (&lower_bounded[p], UnionKind::Nabla, CausalClass::StrictlyNabla, false),
        ];
        'point: for (sets, kind, class, upper) in checks {
            for (i, &a) in sets.iter().enumerate() {
                for &b in &sets[i..] {
                    let ok = alg
                        .union_masks(a, b, kind)
                        .is_ok_and(|u| alg.class_of(u) == class && alg.vertex_mask(u, upper) == Some(p));
                    if !ok {
                        vertex_unions_ok[p] = false;
                        if first_failure.is_none() {
                            let (point, a, b) = (name(p), ids(a), ids(b));
                            first_failure = Some(if upper {
                                RegularityBullet::UpperVertexUnion { point, a, b }
                            } else {
                                RegularityBullet::LowerVertexUnion { point, a, b }
                            });
                        }
                        break 'point;
                    }
                }
            }
        }
    }

    let mut extension_ok = vec![vec![true; n]; n];
    for p in 0..n {
        for q in 0..n {
            if !c.precedes(p, q) {
                continue;
            }
            let lifts = |from: &[u64], to: &[u64]| from.iter().find(|&&a| !to.iter().any(|&b| a & !b == 0)).copied();
            let missing = lifts(&upper_bounded[p], &upper_bounded[q]).or_else(|| lifts(&lower_bounded[q], &lower_bounded[p]));
            if let Some(set) = missing {
                extension_ok[p][q] = false;
                if first_failure.is_none() {
                    first_failure = Some(RegularityBullet::Extension {
                        p: name(p),
                        q: name(q),
                        set: ids(set),
                    });
                }
            }
        }
    }

    if let crate::order::Crossing::Fails { x, y, z, w } = alg.crossing() {
        if first_failure.is_none() {
            first_failure = Some(RegularityBullet::Crossing {
                x: name(x),
                y: name(y),
                z: name(z),
                w: name(w),
            });
        }
    }

    Ok(RegularCausalityReport {
        regular: first_failure.is_none(),
        first_failure,
        vertex_unions_ok,
        extension_ok,
    })
}
