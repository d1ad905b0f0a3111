//! Greedy choice of reporting vehicles per zone.
//!
//! The zone's top-ranked vehicle is always the first reporter. Every further
//! reporter is the non-reporter with the largest weight
//!
//! ```text
//! w_i = alpha * C_i + sum_j beta * I_ij,   beta = (1 - alpha) / l
//! ```
//!
//! where `l` is the current number of reporters and `I_ij` is 1 when
//! candidate `i` is clear of reporter `j` and 0 when it interferes. Weights
//! are recomputed after every admission.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;

use crate::fleet::{Registry, VehicleId};
use crate::geometry::{Point3, ZoneId, GEOM_EPS};
use crate::time::SimTime;
use crate::trust::{Credibility, RankingList, Rankings};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionParams {
    /// Reporters per zone (`m`).
    pub reporters_per_zone: usize,
    pub alpha: f64,
    pub interference_range: f64,
    pub reselect_period: SimTime,
}

impl Default for SelectionParams {
    fn default() -> Self {
        SelectionParams {
            reporters_per_zone: 3,
            alpha: 0.5,
            interference_range: 250.0,
            reselect_period: SimTime::from_secs(1),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SelectionError {
    InvalidParams(&'static str),
    NoReporters,
    OffTick { now: SimTime, period: SimTime },
}

impl fmt::Display for SelectionError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SelectionError::InvalidParams(msg) => write!(f, "invalid selection parameters: {msg}"),
            SelectionError::NoReporters => {
                f.write_str("weights are only defined once a first reporter exists")
            }
            SelectionError::OffTick { now, period } => {
                write!(f, "reselection at {now} is not a multiple of the period {period}")
            }
        }
    }
}

impl core::error::Error for SelectionError {}

impl SelectionParams {
    pub fn validate(&self) -> Result<(), SelectionError> {
        if self.reporters_per_zone == 0 {
            return Err(SelectionError::InvalidParams("reporters per zone must be at least 1"));
        }
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(SelectionError::InvalidParams("alpha must lie strictly between 0 and 1"));
        }
        if !(self.interference_range.is_finite() && self.interference_range > 0.0) {
            return Err(SelectionError::InvalidParams("interference range must be positive"));
        }
        if self.reselect_period == SimTime::ZERO {
            return Err(SelectionError::InvalidParams("reselect period must be positive"));
        }
        Ok(())
    }
}

/// `0` when the two positions are within `range` of each other (interfering), `1` otherwise.
pub fn interference_indicator(a: &Point3, b: &Point3, range: f64) -> u8 {
    if a.distance(b) <= range + GEOM_EPS {
        0
    } else {
        1
    }
}

/// Selection weight of a candidate against the current reporter positions.
pub fn weight(
    credibility: Credibility,
    candidate: &Point3,
    reporters: &[Point3],
    alpha: f64,
    range: f64,
) -> Result<f64, SelectionError> {
    if reporters.is_empty() {
        return Err(SelectionError::NoReporters);
    }
    let beta = (1.0 - alpha) / reporters.len() as f64;
    let clear: f64 = reporters
        .iter()
        .map(|r| beta * f64::from(interference_indicator(candidate, r, range)))
        .sum();
    Ok(alpha * credibility.value() + clear)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reporter {
    pub vehicle: VehicleId,
    pub credibility: Credibility,
    /// Weight at admission; `None` for the ranking head, which is taken unweighted.
    pub weight: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReporterSet {
    pub zone: ZoneId,
    pub reporters: Vec<Reporter>,
    pub selected_at: SimTime,
}

impl ReporterSet {
    pub fn contains(&self, vehicle: VehicleId) -> bool {
        self.reporters.iter().any(|r| r.vehicle == vehicle)
    }

    pub fn vehicles(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.reporters.iter().map(|r| r.vehicle)
    }

    pub fn len(&self) -> usize {
        self.reporters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.reporters.is_empty()
    }
}

struct Candidate {
    vehicle: VehicleId,
    credibility: Credibility,
    position: Point3,
}

/// Larger weight first, then higher credibility, then lower id.
fn better(a: (f64, &Candidate), b: (f64, &Candidate)) -> bool {
    let ord = a
        .0
        .total_cmp(&b.0)
        .then(a.1.credibility.value().total_cmp(&b.1.credibility.value()))
        .then(b.1.vehicle.cmp(&a.1.vehicle));
    ord == Ordering::Greater
}

/// Picks up to `m` reporters for one zone.
pub fn select_reporters(
    ranking: &RankingList,
    registry: &Registry,
    params: &SelectionParams,
    now: SimTime,
) -> ReporterSet {
    let mut pool: Vec<Candidate> = ranking
        .entries()
        .iter()
        .filter_map(|e| {
            registry.get(e.vehicle).map(|rec| Candidate {
                vehicle: e.vehicle,
                credibility: e.credibility,
                position: rec.position,
            })
        })
        .collect();

    let mut set = ReporterSet { zone: ranking.zone(), reporters: Vec::new(), selected_at: now };
    if pool.is_empty() {
        return set;
    }

    // pool is in ranking order, so the head comes first
    let head = pool.remove(0);
    let mut positions = alloc::vec![head.position];
    set.reporters.push(Reporter { vehicle: head.vehicle, credibility: head.credibility, weight: None });

    while set.reporters.len() < params.reporters_per_zone && !pool.is_empty() {
        let mut best: Option<(usize, f64)> = None;
        for (i, cand) in pool.iter().enumerate() {
            // positions is non-empty here, so weight() cannot fail
            let w = weight(cand.credibility, &cand.position, &positions, params.alpha, params.interference_range)
                .unwrap_or(f64::NEG_INFINITY);
            let replace = match best {
                None => true,
                Some((j, bw)) => better((w, cand), (bw, &pool[j])),
            };
            if replace {
                best = Some((i, w));
            }
        }
        let Some((i, w)) = best else { break };
        let chosen = pool.remove(i);
        positions.push(chosen.position);
        set.reporters.push(Reporter {
            vehicle: chosen.vehicle,
            credibility: chosen.credibility,
            weight: Some(w),
        });
    }
    set
}

/// Runs [`select_reporters`] for every non-empty zone.
pub fn reselect_tick(
    rankings: &Rankings,
    registry: &Registry,
    params: &SelectionParams,
    now: SimTime,
) -> Result<BTreeMap<ZoneId, ReporterSet>, SelectionError> {
    if !now.is_multiple_of(params.reselect_period) {
        return Err(SelectionError::OffTick { now, period: params.reselect_period });
    }
    Ok(rankings
        .lists()
        .map(|list| (list.zone(), select_reporters(list, registry, params, now)))
        .collect())
}
