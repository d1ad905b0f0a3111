//! Vehicle credibility and the per-zone ranking lists.
//!
//! Credibility itself is owned by an external trust-management scheme; the
//! RSU reaches it through a [`CredibilityOracle`]. Three stand-ins are
//! provided: a static table, a ledger shared between RSUs, and a remote
//! lookup that only answers after a configurable delay.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::rc::Rc;
use alloc::vec::Vec;
use core::cell::RefCell;
use core::cmp::Ordering;
use core::fmt;

use crate::fleet::{Registry, RegistryDelta, VehicleId};
use crate::geometry::ZoneId;
use crate::time::SimTime;

/// A trust score in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
#[cfg_attr(feature = "serde", derive(serde::Serialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct Credibility(f64);

impl Credibility {
    pub fn new(value: f64) -> Result<Self, TrustError> {
        if value.is_finite() && (0.0..=1.0).contains(&value) {
            Ok(Credibility(value))
        } else {
            Err(TrustError::OutOfRange(value))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum TrustError {
    OutOfRange(f64),
    Duplicate(VehicleId),
}

impl fmt::Display for TrustError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TrustError::OutOfRange(v) => write!(f, "credibility {v} outside [0, 1]"),
            TrustError::Duplicate(v) => write!(f, "{v} is already ranked"),
        }
    }
}

impl core::error::Error for TrustError {}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleError {
    Unknown(VehicleId),
    /// The lookup is in flight and resolves at `ready_at`.
    Pending { ready_at: SimTime },
}

pub trait CredibilityOracle {
    fn credibility(&mut self, vehicle: VehicleId, now: SimTime) -> Result<Credibility, OracleError>;

    /// Scripted change of a vehicle's credibility.
    fn update(&mut self, vehicle: VehicleId, value: Credibility);
}

#[derive(Debug, Clone, Default)]
pub struct StaticTable {
    table: BTreeMap<VehicleId, Credibility>,
    fallback: Option<Credibility>,
}

impl StaticTable {
    pub fn new(table: BTreeMap<VehicleId, Credibility>) -> Self {
        StaticTable { table, fallback: None }
    }

    /// Answer `fallback` for vehicles missing from the table.
    pub fn with_fallback(mut self, fallback: Credibility) -> Self {
        self.fallback = Some(fallback);
        self
    }
}

impl CredibilityOracle for StaticTable {
    fn credibility(&mut self, vehicle: VehicleId, _now: SimTime) -> Result<Credibility, OracleError> {
        self.table.get(&vehicle).copied().or(self.fallback).ok_or(OracleError::Unknown(vehicle))
    }

    fn update(&mut self, vehicle: VehicleId, value: Credibility) {
        self.table.insert(vehicle, value);
    }
}

/// Credibility kept on a ledger every RSU reads; clones share the ledger.
#[derive(Debug, Clone, Default)]
pub struct BlockchainMock {
    ledger: Rc<RefCell<BTreeMap<VehicleId, Credibility>>>,
}

impl BlockchainMock {
    pub fn new(initial: BTreeMap<VehicleId, Credibility>) -> Self {
        BlockchainMock { ledger: Rc::new(RefCell::new(initial)) }
    }
}

impl CredibilityOracle for BlockchainMock {
    fn credibility(&mut self, vehicle: VehicleId, _now: SimTime) -> Result<Credibility, OracleError> {
        self.ledger.borrow().get(&vehicle).copied().ok_or(OracleError::Unknown(vehicle))
    }

    fn update(&mut self, vehicle: VehicleId, value: Credibility) {
        self.ledger.borrow_mut().insert(vehicle, value);
    }
}

/// Remote lookup: the first query for a vehicle starts a request that
/// answers `latency` later; queries before then report `Pending`.
#[derive(Debug, Clone)]
pub struct CloudMock {
    table: BTreeMap<VehicleId, Credibility>,
    latency: SimTime,
    inflight: BTreeMap<VehicleId, SimTime>,
}

impl CloudMock {
    pub fn new(table: BTreeMap<VehicleId, Credibility>, latency: SimTime) -> Self {
        CloudMock { table, latency, inflight: BTreeMap::new() }
    }
}

impl CredibilityOracle for CloudMock {
    fn credibility(&mut self, vehicle: VehicleId, now: SimTime) -> Result<Credibility, OracleError> {
        let value = *self.table.get(&vehicle).ok_or(OracleError::Unknown(vehicle))?;
        let ready_at = *self.inflight.entry(vehicle).or_insert(now + self.latency);
        if now >= ready_at {
            self.inflight.remove(&vehicle);
            Ok(value)
        } else {
            Err(OracleError::Pending { ready_at })
        }
    }

    fn update(&mut self, vehicle: VehicleId, value: Credibility) {
        self.table.insert(vehicle, value);
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankEntry {
    pub vehicle: VehicleId,
    pub credibility: Credibility,
}

/// Descending credibility, then ascending id.
fn rank_order(a: &RankEntry, b: &RankEntry) -> Ordering {
    b.credibility
        .value()
        .total_cmp(&a.credibility.value())
        .then(a.vehicle.cmp(&b.vehicle))
}

/// Vehicles of one zone in descending credibility order.
#[derive(Debug, Clone, PartialEq)]
pub struct RankingList {
    zone: ZoneId,
    entries: Vec<RankEntry>,
}

impl RankingList {
    pub fn new(zone: ZoneId) -> Self {
        RankingList { zone, entries: Vec::new() }
    }

    pub fn zone(&self) -> ZoneId {
        self.zone
    }

    pub fn entries(&self) -> &[RankEntry] {
        &self.entries
    }

    pub fn head(&self) -> Option<&RankEntry> {
        self.entries.first()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, vehicle: VehicleId) -> bool {
        self.entries.iter().any(|e| e.vehicle == vehicle)
    }

    pub fn insert(&mut self, vehicle: VehicleId, credibility: Credibility) -> Result<(), TrustError> {
        if self.contains(vehicle) {
            return Err(TrustError::Duplicate(vehicle));
        }
        let entry = RankEntry { vehicle, credibility };
        let at = self.entries.partition_point(|e| rank_order(e, &entry) == Ordering::Less);
        self.entries.insert(at, entry);
        Ok(())
    }

    /// Returns whether the vehicle was present.
    pub fn remove(&mut self, vehicle: VehicleId) -> bool {
        match self.entries.iter().position(|e| e.vehicle == vehicle) {
            Some(i) => {
                self.entries.remove(i);
                true
            }
            None => false,
        }
    }
}

/// Counts of what one [`Rankings::sync`] call changed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SyncReport {
    pub inserted: usize,
    pub removed: usize,
    pub queued: usize,
}

/// All per-zone ranking lists, plus vehicles whose credibility lookup has
/// not come back yet.
#[derive(Debug, Clone, Default)]
pub struct Rankings {
    lists: BTreeMap<ZoneId, RankingList>,
    placement: BTreeMap<VehicleId, ZoneId>,
    pending: BTreeMap<VehicleId, ZoneId>,
}

impl Rankings {
    pub fn new() -> Self {
        Rankings::default()
    }

    pub fn list(&self, zone: ZoneId) -> Option<&RankingList> {
        self.lists.get(&zone)
    }

    /// Non-empty lists in ascending zone order.
    pub fn lists(&self) -> impl Iterator<Item = &RankingList> {
        self.lists.values().filter(|l| !l.is_empty())
    }

    pub fn zone_of(&self, vehicle: VehicleId) -> Option<ZoneId> {
        self.placement.get(&vehicle).copied()
    }

    pub fn pending(&self) -> impl Iterator<Item = VehicleId> + '_ {
        self.pending.keys().copied()
    }

    fn detach(&mut self, vehicle: VehicleId, report: &mut SyncReport) {
        self.pending.remove(&vehicle);
        if let Some(zone) = self.placement.remove(&vehicle) {
            if let Some(list) = self.lists.get_mut(&zone) {
                if list.remove(vehicle) {
                    report.removed += 1;
                }
            }
        }
    }

    fn attach(
        &mut self,
        vehicle: VehicleId,
        zone: ZoneId,
        oracle: &mut dyn CredibilityOracle,
        registry: &mut Registry,
        now: SimTime,
        report: &mut SyncReport,
    ) {
        match oracle.credibility(vehicle, now) {
            Ok(cred) => {
                let list = self.lists.entry(zone).or_insert_with(|| RankingList::new(zone));
                // detach() ran first, so the id cannot already be present
                if list.insert(vehicle, cred).is_ok() {
                    self.placement.insert(vehicle, zone);
                    report.inserted += 1;
                }
                if let Some(rec) = registry.get_mut(vehicle) {
                    rec.credibility = Some(cred);
                }
            }
            Err(_) => {
                self.pending.insert(vehicle, zone);
                report.queued += 1;
            }
        }
    }

    /// Applies registry deltas. Lookups that fail are queued and retried on
    /// the next call, before that call's deltas.
    pub fn sync(
        &mut self,
        deltas: &[RegistryDelta],
        oracle: &mut dyn CredibilityOracle,
        registry: &mut Registry,
        now: SimTime,
    ) -> SyncReport {
        let mut report = SyncReport::default();

        let retry: Vec<(VehicleId, ZoneId)> =
            core::mem::take(&mut self.pending).into_iter().collect();
        for (vehicle, zone) in retry {
            self.attach(vehicle, zone, oracle, registry, now, &mut report);
        }

        for delta in deltas {
            match *delta {
                RegistryDelta::Joined { vehicle, zone } | RegistryDelta::Moved { vehicle, to: zone, .. } => {
                    self.detach(vehicle, &mut report);
                    if let Some(zone) = zone {
                        self.attach(vehicle, zone, oracle, registry, now, &mut report);
                    }
                }
                RegistryDelta::Expired { vehicle, .. } => self.detach(vehicle, &mut report),
                RegistryDelta::Refreshed { .. } | RegistryDelta::Stale { .. } => {}
            }
        }
        report
    }

    /// Re-ranks a vehicle after a scripted credibility change.
    pub fn update_credibility(
        &mut self,
        vehicle: VehicleId,
        value: Credibility,
        oracle: &mut dyn CredibilityOracle,
        registry: &mut Registry,
    ) {
        oracle.update(vehicle, value);
        if let Some(rec) = registry.get_mut(vehicle) {
            rec.credibility = Some(value);
        }
        if let Some(&zone) = self.placement.get(&vehicle) {
            if let Some(list) = self.lists.get_mut(&zone) {
                list.remove(vehicle);
                // just removed, so this cannot be a duplicate
                let _ = list.insert(vehicle, value);
            }
        }
    }

    /// Every ranked vehicle, for partition checks.
    pub fn ranked_vehicles(&self) -> BTreeSet<VehicleId> {
        self.placement.keys().copied().collect()
    }
}
