//! Flat spacetime: the metric causal order, sprinkled causalities, the
//! truncated cone sets and their horizon entropy.
//!
//! Signature is `(+, −, …, −)` and the time orientation is the coordinate one,
//! so `x ⪯ y` iff `(y − x)² ≥ 0` and `y⁰ ≥ x⁰`. Lightlike separated events are
//! ordered.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::io::CausalityJson;
use crate::order::{Causality, OrderError, ReversalMap};
use crate::pointset::PointSet;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MinkowskiError {
    #[error("events of dimension {left} and {right} cannot be compared")]
    DimensionMismatch { left: usize, right: usize },
    #[error("spatial dimension {0} is not supported here")]
    UnsupportedDimension(usize),
    #[error("invalid sprinkle configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid cone set: {0}")]
    InvalidDescriptor(String),
    #[error(transparent)]
    Order(#[from] OrderError),
}

/// Coordinates `(x⁰, x¹, …, x^d)` in natural units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Event(pub Vec<f64>);

impl Event {
    pub fn new(coords: impl Into<Vec<f64>>) -> Self {
        Event(coords.into())
    }

    pub fn time(&self) -> f64 {
        self.0[0]
    }

    /// Number of spatial dimensions.
    pub fn d(&self) -> usize {
        self.0.len() - 1
    }
}

fn same_dim(x: &Event, y: &Event) -> Result<(), MinkowskiError> {
    if x.0.len() != y.0.len() {
        return Err(MinkowskiError::DimensionMismatch {
            left: x.0.len(),
            right: y.0.len(),
        });
    }
    Ok(())
}

/// `(x − y)²`: positive timelike, zero lightlike, negative spacelike.
pub fn interval(x: &Event, y: &Event) -> Result<f64, MinkowskiError> {
    same_dim(x, y)?;
    let dt = y.0[0] - x.0[0];
    let dx2: f64 = x.0[1..].iter().zip(&y.0[1..]).map(|(a, b)| (b - a) * (b - a)).sum();
    Ok(dt * dt - dx2)
}

pub fn precedes(x: &Event, y: &Event) -> Result<bool, MinkowskiError> {
    Ok(interval(x, y)? >= 0.0 && y.time() >= x.time())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "kebab-case")]
pub enum SprinkleMode {
    #[default]
    UniformIid,
    IntegerLattice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprinkleConfig {
    /// Spatial dimension, 1 or 3.
    pub d: usize,
    /// One `[min, max]` per axis, time first.
    pub bounds: Vec<(f64, f64)>,
    pub n: usize,
    pub seed: u64,
    pub mode: SprinkleMode,
}

impl SprinkleConfig {
    fn validate(&self) -> Result<(), MinkowskiError> {
        if self.d != 1 && self.d != 3 {
            return Err(MinkowskiError::UnsupportedDimension(self.d));
        }
        if self.bounds.len() != self.d + 1 {
            return Err(MinkowskiError::InvalidConfig(format!(
                "{} box intervals for {} axes",
                self.bounds.len(),
                self.d + 1
            )));
        }
        if let Some((lo, hi)) = self.bounds.iter().find(|(lo, hi)| !lo.is_finite() || !hi.is_finite() || lo >= hi) {
            return Err(MinkowskiError::InvalidConfig(format!("degenerate interval [{lo}, {hi}]")));
        }
        Ok(())
    }
}

/// Integer points of `[lo, hi]`.
fn integer_range((lo, hi): (f64, f64)) -> Vec<f64> {
    let (a, b) = (lo.ceil() as i64, hi.floor() as i64);
    (a..=b).map(|k| k as f64).collect()
}

fn lattice_events(cfg: &SprinkleConfig) -> Vec<Event> {
    let axes: Vec<Vec<f64>> = cfg.bounds.iter().map(|&b| integer_range(b)).collect();
    if cfg.d == 1 {
        // Light-cone coordinates: the box axes carry (u, v) and the event is
        // (t, x) = ((u + v)/2, (v − u)/2), so the lattice is a product order.
        return axes[0]
            .iter()
            .flat_map(|&u| axes[1].iter().map(move |&v| Event(vec![(u + v) / 2.0, (v - u) / 2.0])))
            .collect();
    }
    let mut events = vec![Vec::new()];
    for axis in &axes {
        events = events
            .into_iter()
            .flat_map(|prefix: Vec<f64>| {
                axis.iter().map(move |&c| {
                    let mut e = prefix.clone();
                    e.push(c);
                    e
                })
            })
            .collect();
    }
    events.into_iter().map(Event).collect()
}

/// Causality induced by `precedes` on events, ids `e0, e1, …`.
pub fn induced_causality(events: &[Event]) -> Result<Causality, MinkowskiError> {
    if let Some(first) = events.first() {
        for e in events {
            same_dim(first, e)?;
        }
    }
    let points = (0..events.len()).map(|i| format!("e{i}")).collect();
    Ok(Causality::from_predicate(points, |i, j| {
        precedes(&events[i], &events[j]).expect("dimensions checked")
    })?)
}

/// Generates events and the causality they induce. Uniform mode draws `n`
/// events from the box with a ChaCha8 stream seeded by `seed`; lattice mode
/// ignores `n` and `seed`.
pub fn sprinkle(cfg: &SprinkleConfig) -> Result<(Causality, Vec<Event>), MinkowskiError> {
    cfg.validate()?;
    let events = match cfg.mode {
        SprinkleMode::IntegerLattice => lattice_events(cfg),
        SprinkleMode::UniformIid => {
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
            (0..cfg.n)
                .map(|_| Event(cfg.bounds.iter().map(|&(lo, hi)| rng.gen_range(lo..hi)).collect()))
                .collect()
        }
    };
    Ok((induced_causality(&events)?, events))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SprinkleJson {
    pub events: Vec<Event>,
    pub causality: CausalityJson,
}

pub fn sprinkle_to_json(c: &Causality, events: &[Event]) -> String {
    serde_json::to_string(&SprinkleJson {
        events: events.to_vec(),
        causality: CausalityJson::from(c),
    })
    .expect("serializable")
}

/// Boost with rapidity `phi` along `x¹`.
pub fn boost(e: &Event, phi: f64) -> Event {
    let (ch, sh) = (phi.cosh(), phi.sinh());
    let mut out = e.0.clone();
    if out.len() > 1 {
        let (t, x) = (e.0[0], e.0[1]);
        out[0] = ch * t + sh * x;
        out[1] = sh * t + ch * x;
    }
    Event(out)
}

/// Point map `T` reflecting time about the middle of the events' time span,
/// when the event set is symmetric under that reflection.
pub fn time_reversal_map(c: &Causality, events: &[Event]) -> Result<ReversalMap, MinkowskiError> {
    let (lo, hi) = events.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), e| {
        (lo.min(e.time()), hi.max(e.time()))
    });
    let mapping = events
        .iter()
        .map(|e| {
            let mut image = e.0.clone();
            image[0] = lo + hi - e.time();
            events.iter().position(|f| f.0 == image).ok_or_else(|| {
                MinkowskiError::InvalidDescriptor(format!("event {:?} has no time-reflected partner", e.0))
            })
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(ReversalMap::point_map(c, mapping)?)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConeKind {
    /// `Y[p,t]`: events after `apex` up to time `cut`, optionally inside the
    /// diamond below `second_apex`.
    TruncatedFutureCone,
    /// `X[t,q]`: events before `apex` from time `cut` on, optionally inside
    /// the diamond above `second_apex`.
    TruncatedPastCone,
    /// `C[apex, second_apex]`.
    Diamond,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeSetDescriptor {
    pub kind: ConeKind,
    pub apex: Event,
    #[serde(default)]
    pub second_apex: Option<Event>,
    /// Truncation time; `None` leaves a cone unbounded.
    #[serde(default)]
    pub cut: Option<f64>,
}

/// Lower apex, upper apex and the time span `[start, end]` of a set.
struct Shape<'a> {
    lower: Option<&'a Event>,
    upper: Option<&'a Event>,
    start: f64,
    end: f64,
}

impl ConeSetDescriptor {
    pub fn future_cone(apex: Event, cut: Option<f64>) -> Self {
        ConeSetDescriptor {
            kind: ConeKind::TruncatedFutureCone,
            apex,
            second_apex: None,
            cut,
        }
    }

    pub fn past_cone(apex: Event, cut: Option<f64>) -> Self {
        ConeSetDescriptor {
            kind: ConeKind::TruncatedPastCone,
            apex,
            second_apex: None,
            cut,
        }
    }

    pub fn diamond(bottom: Event, top: Event) -> Self {
        ConeSetDescriptor {
            kind: ConeKind::Diamond,
            apex: bottom,
            second_apex: Some(top),
            cut: None,
        }
    }

    fn shape(&self) -> Result<Shape<'_>, MinkowskiError> {
        let second = self.second_apex.as_ref();
        if let Some(s) = second {
            same_dim(&self.apex, s)?;
        }
        let (lower, upper) = match self.kind {
            ConeKind::TruncatedFutureCone => (Some(&self.apex), second),
            ConeKind::TruncatedPastCone => (second, Some(&self.apex)),
            ConeKind::Diamond => {
                let s = second.ok_or_else(|| MinkowskiError::InvalidDescriptor("diamond needs two apexes".into()))?;
                (Some(&self.apex), Some(s))
            }
        };
        if let (Some(p), Some(q)) = (lower, upper) {
            if !precedes(p, q)? {
                return Err(MinkowskiError::InvalidDescriptor("apexes are not causally related".into()));
            }
        }
        let mut start = lower.map_or(f64::NEG_INFINITY, Event::time);
        let mut end = upper.map_or(f64::INFINITY, Event::time);
        match (self.kind, self.cut) {
            (ConeKind::TruncatedFutureCone, Some(t)) => end = end.min(t),
            (ConeKind::TruncatedPastCone, Some(t)) => start = start.max(t),
            _ => {}
        }
        Ok(Shape { lower, upper, start, end })
    }

    /// Whether `e` lies in the described set.
    pub fn contains(&self, e: &Event) -> Result<bool, MinkowskiError> {
        same_dim(&self.apex, e)?;
        let s = self.shape()?;
        Ok(e.time() >= s.start
            && e.time() <= s.end
            && match s.lower {
                Some(p) => precedes(p, e)?,
                None => true,
            }
            && match s.upper {
                Some(q) => precedes(e, q)?,
                None => true,
            })
    }

    /// Radius of the null boundary's cross-section at time `t`, zero outside
    /// the time span.
    fn radius(&self, t: f64) -> Result<f64, MinkowskiError> {
        let s = self.shape()?;
        if let (Some(p), Some(q)) = (s.lower, s.upper) {
            if p.0[1..] != q.0[1..] {
                return Err(MinkowskiError::InvalidDescriptor(
                    "apexes must share their spatial position".into(),
                ));
            }
        }
        if t < s.start || t > s.end {
            return Ok(0.0);
        }
        let from_lower = s.lower.map_or(f64::INFINITY, |p| t - p.time());
        let from_upper = s.upper.map_or(f64::INFINITY, |q| q.time() - t);
        Ok(from_lower.min(from_upper))
    }

    fn require_3d(&self) -> Result<(), MinkowskiError> {
        match self.apex.d() {
            3 => Ok(()),
            d => Err(MinkowskiError::UnsupportedDimension(d)),
        }
    }
}

/// Area of the horizon cross-section at time `t`, `4πR²(t)`.
pub fn horizon_area(desc: &ConeSetDescriptor, t: f64) -> Result<f64, MinkowskiError> {
    desc.require_3d()?;
    let r = desc.radius(t)?;
    Ok(4.0 * PI * r * r)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizonEntropy {
    /// `α · sup_t A(H_t)`; `+∞` for unbounded sets.
    pub value: f64,
    pub unbounded: bool,
    /// Time at which the supremum is attained.
    pub at_time: Option<f64>,
}

/// `α sup_t A(H_t)`, evaluated where the cross-section radius peaks: the cut
/// for a truncated cone, the midpoint for a diamond.
pub fn horizon_entropy(desc: &ConeSetDescriptor, alpha: f64) -> Result<HorizonEntropy, MinkowskiError> {
    desc.require_3d()?;
    if alpha.is_nan() || alpha <= 0.0 {
        return Err(MinkowskiError::InvalidDescriptor(format!("alpha must be positive, got {alpha}")));
    }
    let s = desc.shape()?;
    if s.start.is_infinite() || s.end.is_infinite() {
        desc.radius(0.0)?;
        return Ok(HorizonEntropy {
            value: f64::INFINITY,
            unbounded: true,
            at_time: None,
        });
    }
    let mut candidates = vec![s.start, s.end];
    if let (Some(p), Some(q)) = (s.lower, s.upper) {
        candidates.push(((p.time() + q.time()) / 2.0).clamp(s.start, s.end));
    }
    let mut best = (0.0, s.start);
    for t in candidates {
        let r = desc.radius(t)?;
        if r > best.0 {
            best = (r, t);
        }
    }
    let r = best.0;
    Ok(HorizonEntropy {
        value: alpha * 4.0 * PI * r * r,
        unbounded: false,
        at_time: Some(best.1),
    })
}

/// `α = k_B / (4 l_p²)`.
pub fn bekenstein_hawking_alpha(k_b: f64, l_p: f64) -> f64 {
    k_b / (4.0 * l_p * l_p)
}

const MC_SHARD: u64 = 1 << 16;

/// Monte-Carlo estimate of the horizon cross-section area at time `t`,
/// independent of the analytic radius: the slice `{x : (t, x) in the set}` is
/// sampled in a bounding cube, its volume estimated by hit counting and the
/// area of the ball with that volume returned, `(36π V²)^{1/3}`. Shards of
/// `2^16` samples use their own ChaCha8 stream so the result only depends on
/// `seed` and `samples`.
pub fn monte_carlo_cross_section(
    desc: &ConeSetDescriptor,
    t: f64,
    samples: u64,
    seed: u64,
) -> Result<f64, MinkowskiError> {
    desc.require_3d()?;
    let apexes: Vec<&Event> = std::iter::once(&desc.apex).chain(desc.second_apex.as_ref()).collect();
    let half = apexes.iter().map(|a| (t - a.time()).abs()).fold(f64::INFINITY, f64::min);
    if samples == 0 || half == 0.0 || !desc.contains(&Event(vec![t, desc.apex.0[1], desc.apex.0[2], desc.apex.0[3]]))? {
        return Ok(0.0);
    }
    let centre = &desc.apex.0[1..];
    let shards = samples.div_ceil(MC_SHARD);
    let hits: u64 = (0..shards)
        .into_par_iter()
        .map(|shard| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(shard);
            let count = MC_SHARD.min(samples - shard * MC_SHARD);
            let mut hits = 0u64;
            for _ in 0..count {
                let mut e = vec![t];
                e.extend(centre.iter().map(|c| c + rng.gen_range(-half..=half)));
                if desc.contains(&Event(e)).expect("dimensions match") {
                    hits += 1;
                }
            }
            hits
        })
        .sum();
    let volume = hits as f64 / samples as f64 * (2.0 * half).powi(3);
    Ok((36.0 * PI * volume * volume).cbrt())
}

/// The events lying in the described set.
pub fn canonical_set_points(desc: &ConeSetDescriptor, events: &[Event]) -> Result<PointSet, MinkowskiError> {
    let mut set = PointSet::empty(events.len());
    for (i, e) in events.iter().enumerate() {
        if desc.contains(e)? {
            set.insert(i);
        }
    }
    Ok(set)
}
