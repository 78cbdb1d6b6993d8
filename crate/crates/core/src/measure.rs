//! Causal measures `σ : C_∇ → [1, ∞]` given as explicit tables, their axioms,
//! the two extensions to arbitrary subsets, and formal entropy.
//!
//! ```json
//! {"kind": "divergent", "entries": [{"set": ["a", "b"], "sigma": 2.0}, {"set": ["c"], "sigma": "inf"}]}
//! ```
//!
//! A `convergent` measure is the mirror notion on the Δ collection.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::algebra::{AlgebraError, CausalAlgebra, Caps, UnionKind};
use crate::order::{Causality, OrderError};
use crate::pointset::PointSet;
use crate::report::{LawReport, Tally};

/// Relative tolerance on equalities between measure values.
pub const MEASURE_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeasureKind {
    Divergent,
    Convergent,
}

impl MeasureKind {
    fn union_kind(self) -> UnionKind {
        match self {
            MeasureKind::Divergent => UnionKind::Nabla,
            MeasureKind::Convergent => UnionKind::Delta,
        }
    }
}

#[derive(Debug, Error)]
pub enum MeasureError {
    #[error("measure has no value on {0:?}")]
    MissingValue(Vec<String>),
    #[error("{0:?} is not a member of the measured collection")]
    NotInCollection(Vec<String>),
    #[error("invalid measure value {0}")]
    InvalidValue(String),
    #[error("duplicate entry for {0:?}")]
    DuplicateEntry(Vec<String>),
    #[error("malformed measure JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Order(#[from] OrderError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct CausalMeasure {
    pub kind: MeasureKind,
    pub table: HashMap<PointSet, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
enum SigmaJson {
    Number(f64),
    Text(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct EntryJson {
    set: Vec<String>,
    sigma: SigmaJson,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct MeasureJson {
    kind: MeasureKind,
    entries: Vec<EntryJson>,
}

impl CausalMeasure {
    /// `σ ≡ value` on every member of the collection.
    pub fn constant(c: &Causality, kind: MeasureKind, value: f64, caps: Caps) -> Result<Self, MeasureError> {
        Self::from_fn(c, kind, caps, |_| value)
    }

    pub fn from_fn(
        c: &Causality,
        kind: MeasureKind,
        caps: Caps,
        mut sigma: impl FnMut(&PointSet) -> f64,
    ) -> Result<Self, MeasureError> {
        let alg = CausalAlgebra::new(c, caps.laws.min(Caps::HARD.laws))?;
        let table = alg
            .family(kind.union_kind())
            .iter()
            .map(|&m| {
                let s = alg.set(m);
                let v = sigma(&s);
                (s, v)
            })
            .collect();
        Ok(CausalMeasure { kind, table })
    }

    pub fn get(&self, a: &PointSet) -> Option<f64> {
        self.table.get(a).copied()
    }

    pub fn set(&mut self, a: PointSet, value: f64) {
        self.table.insert(a, value);
    }

    pub fn from_json(c: &Causality, text: &str) -> Result<Self, MeasureError> {
        let raw: MeasureJson = serde_json::from_str(text)?;
        let alg = CausalAlgebra::new(c, Caps::HARD.enumeration)?;
        let mut table = HashMap::new();
        for entry in raw.entries {
            let ids: Vec<&str> = entry.set.iter().map(String::as_str).collect();
            let set = c.set_of(&ids)?;
            let accepted = match raw.kind {
                MeasureKind::Divergent => alg.class_of(alg.mask(&set)).is_nabla(),
                MeasureKind::Convergent => alg.class_of(alg.mask(&set)).is_delta(),
            };
            if !accepted {
                return Err(MeasureError::NotInCollection(entry.set));
            }
            let value = match entry.sigma {
                SigmaJson::Number(v) if !v.is_nan() => v,
                SigmaJson::Text(t) if matches!(t.to_ascii_lowercase().as_str(), "inf" | "+inf" | "infinity") => {
                    f64::INFINITY
                }
                SigmaJson::Number(v) => return Err(MeasureError::InvalidValue(v.to_string())),
                SigmaJson::Text(t) => return Err(MeasureError::InvalidValue(t)),
            };
            if table.insert(set, value).is_some() {
                return Err(MeasureError::DuplicateEntry(entry.set));
            }
        }
        Ok(CausalMeasure { kind: raw.kind, table })
    }

    /// Entries sorted by size, then lexicographically by point index.
    pub fn to_json(&self, c: &Causality) -> String {
        let mut sets: Vec<&PointSet> = self.table.keys().collect();
        sets.sort_by_key(|s| (s.len(), s.iter().collect::<Vec<_>>()));
        let entries = sets
            .into_iter()
            .map(|s| EntryJson {
                set: c.ids_of(s),
                sigma: match self.table[s] {
                    v if v.is_infinite() => SigmaJson::Text("inf".into()),
                    v => SigmaJson::Number(v),
                },
            })
            .collect();
        serde_json::to_string(&MeasureJson { kind: self.kind, entries }).expect("serializable")
    }
}

struct MaskedMeasure {
    alg: CausalAlgebra,
    kind: UnionKind,
    values: HashMap<u64, f64>,
}

impl MaskedMeasure {
    fn new(c: &Causality, sigma: &CausalMeasure, cap: usize) -> Result<Self, MeasureError> {
        let alg = CausalAlgebra::new(c, cap)?;
        let kind = sigma.kind.union_kind();
        let mut values = HashMap::new();
        for &m in alg.family(kind) {
            let value = sigma.get(&alg.set(m)).ok_or_else(|| MeasureError::MissingValue(alg.ids(m)))?;
            values.insert(m, value);
        }
        Ok(MaskedMeasure { alg, kind, values })
    }
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    a == b || (a - b).abs() <= tol * a.abs().max(b.abs())
}

/// Normalization, range and the super-multiplicative axiom with its equality
/// case, over all ordered pairs of the measured collection. Pairs whose
/// causal union or intersection leaves the collection are skipped.
pub fn verify_measure_axioms(c: &Causality, sigma: &CausalMeasure) -> Result<LawReport, MeasureError> {
    verify_measure_axioms_with(c, sigma, MEASURE_TOLERANCE)
}

/// [`verify_measure_axioms`] with a relative tolerance `tol`.
pub fn verify_measure_axioms_with(c: &Causality, sigma: &CausalMeasure, tol: f64) -> Result<LawReport, MeasureError> {
    let mm = MaskedMeasure::new(c, sigma, Caps::HARD.laws)?;
    let ids = |m: u64| mm.alg.ids(m);

    let mut normalization = Tally::new("measure_normalization");
    for m in std::iter::once(0u64).chain((0..c.len()).map(|p| 1u64 << p)) {
        let v = mm.values[&m];
        normalization.check(v == 1.0, || json!({"set": ids(m), "sigma": v}));
    }

    let mut range = Tally::new("measure_range");
    let family = mm.alg.family(mm.kind);
    for &m in family {
        let v = mm.values[&m];
        range.check(v >= 1.0, || json!({"set": ids(m), "sigma": v}));
    }

    let mut superm = Tally::new("measure_supermultiplicative");
    let mut equality = Tally::new("measure_equality_case");
    for &a in family {
        for &b in family {
            let (Ok(u), Some(&si)) = (mm.alg.union_masks(a, b, mm.kind), mm.values.get(&(a & b))) else {
                superm.skip();
                continue;
            };
            let (sa, sb, su) = (mm.values[&a], mm.values[&b], mm.values[&u]);
            let bound = sa * sb / si;
            if bound.is_nan() {
                superm.skip();
                continue;
            }
            let witness = || json!({"a": ids(a), "b": ids(b), "union": ids(u), "sigma_union": su, "bound": bound});
            superm.check(su >= bound || close(su, bound, tol), witness);
            if u == a | b {
                equality.check(close(su, bound, tol), witness);
            }
        }
    }
    Ok(LawReport {
        entries: vec![normalization.finish(), range.finish(), superm.finish(), equality.finish()],
    })
}

/// `σ(A) ≤ σ(B)` for members `A ⊆ B` of the collection, and the same for
/// both extensions over arbitrary subsets. The decomposition entries check
/// the step `σ(B) ≥ σ(A) · σ(B − A)` with each extension standing in for
/// `σ(B − A)`.
pub fn verify_monotonicity(c: &Causality, sigma: &CausalMeasure, caps: Caps) -> Result<LawReport, MeasureError> {
    let cap = caps.ribbon.min(Caps::HARD.ribbon).min(10);
    let mm = MaskedMeasure::new(c, sigma, cap)?;
    let ids = |m: u64| mm.alg.ids(m);
    let family = mm.alg.family(mm.kind);

    let mut members = Tally::new("measure_monotone");
    let mut decomposition_star = Tally::new("measure_decomposition_star");
    let mut decomposition_lower = Tally::new("measure_decomposition_lower");
    for &a in family {
        for &b in family.iter().filter(|&&b| a & !b == 0) {
            let (sa, sb) = (mm.values[&a], mm.values[&b]);
            members.check(sa <= sb || close(sa, sb, MEASURE_TOLERANCE), || json!({"a": ids(a), "b": ids(b), "sigma_a": sa, "sigma_b": sb}));
            let rest = b & !a;
            for (tally, ext) in [
                (&mut decomposition_star, star_mask(&mm, rest)),
                (&mut decomposition_lower, lower_mask(&mm, rest)),
            ] {
                let product = sa * ext;
                tally.check(sb >= product || close(sb, product, MEASURE_TOLERANCE), || {
                    json!({"a": ids(a), "b": ids(b), "sigma_b": sb, "sigma_a_times_rest": product})
                });
            }
        }
    }

    let all = mm.alg.full_mask();
    let subsets: Vec<u64> = (0..=all).filter(|m| m & !all == 0).collect();
    let star: Vec<f64> = subsets.iter().map(|&m| star_mask(&mm, m)).collect();
    let lower: Vec<f64> = subsets.iter().map(|&m| lower_mask(&mm, m)).collect();
    let mut star_tally = Tally::new("measure_monotone_star");
    let mut lower_tally = Tally::new("measure_monotone_lower");
    for (i, &a) in subsets.iter().enumerate() {
        for (j, &b) in subsets.iter().enumerate() {
            if a & !b != 0 {
                continue;
            }
            star_tally.check(star[i] <= star[j] || close(star[i], star[j], MEASURE_TOLERANCE), || json!({"a": ids(a), "b": ids(b)}));
            lower_tally.check(lower[i] <= lower[j] || close(lower[i], lower[j], MEASURE_TOLERANCE), || json!({"a": ids(a), "b": ids(b)}));
        }
    }
    Ok(LawReport {
        entries: vec![
            members.finish(),
            star_tally.finish(),
            lower_tally.finish(),
            decomposition_star.finish(),
            decomposition_lower.finish(),
        ],
    })
}

fn lower_mask(mm: &MaskedMeasure, a: u64) -> f64 {
    mm.alg
        .family(mm.kind)
        .iter()
        .filter(|&&x| a & !x == 0)
        .map(|x| mm.values[x])
        .fold(f64::INFINITY, f64::min)
}

fn star_mask(mm: &MaskedMeasure, a: u64) -> f64 {
    mm.alg
        .family(mm.kind)
        .iter()
        .filter(|&&x| x & !a == 0)
        .map(|x| mm.values[x])
        .fold(f64::NEG_INFINITY, f64::max)
}

/// Infimum of `σ` over members of the collection containing `a`; `+∞` when
/// there are none.
pub fn sigma_lower(c: &Causality, sigma: &CausalMeasure, a: &PointSet, caps: Caps) -> Result<f64, MeasureError> {
    let mm = MaskedMeasure::new(c, sigma, caps.enumeration.min(Caps::HARD.enumeration))?;
    Ok(lower_mask(&mm, mm.alg.mask(a)))
}

/// Supremum of `σ` over members of the collection contained in `a`; at
/// least `σ(∅)`.
pub fn sigma_star(c: &Causality, sigma: &CausalMeasure, a: &PointSet, caps: Caps) -> Result<f64, MeasureError> {
    let mm = MaskedMeasure::new(c, sigma, caps.enumeration.min(Caps::HARD.enumeration))?;
    Ok(star_mask(&mm, mm.alg.mask(a)))
}

/// Entropy in units where `k_b` carries the dimension.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyValue {
    pub value: f64,
    pub k_b: f64,
}

/// `S = k_B ln σ`; `σ = ∞` gives `S = ∞`.
pub fn formal_entropy(sigma: f64, k_b: f64) -> EntropyValue {
    EntropyValue {
        value: k_b * sigma.ln(),
        k_b,
    }
}

/// `S_q(A ∪ B) = S_q(A) + S_q(B) + (1 − q)/k_B · S_q(A) S_q(B)`.
pub fn tsallis_compose(sa: f64, sb: f64, q: f64, k_b: f64) -> f64 {
    sa + sb + (1.0 - q) / k_b * sa * sb
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TsallisViolation {
    pub sa: f64,
    pub sb: f64,
    pub q: f64,
    /// `S_q` of the composite, below `sa`.
    pub composed: f64,
}

/// Grid points where composing with a nonnegative `sb` lowers the entropy
/// below `sa`, in grid order (`q` outermost).
pub fn find_tsallis_violations(entropies: &[f64], qs: &[f64], k_b: f64) -> Vec<TsallisViolation> {
    let mut out = Vec::new();
    for &q in qs {
        for &sa in entropies {
            for &sb in entropies {
                let composed = tsallis_compose(sa, sb, q, k_b);
                if composed < sa {
                    out.push(TsallisViolation { sa, sb, q, composed });
                }
            }
        }
    }
    out
}
