//! Vehicle mobility, Hello beacons and the RSU-side vehicle registry.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::fmt;

use crate::geometry::{Point3, Tiling, ZoneId};
use crate::time::SimTime;
use crate::trust::Credibility;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct VehicleId(pub u32);

impl fmt::Display for VehicleId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "v{}", self.0)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FleetError {
    EmptyTrace,
    NonIncreasingWaypoints { index: usize },
    NonFinitePosition { index: usize },
    OutOfRange { t: SimTime, start: SimTime, end: SimTime },
    ZeroInterval,
    ZeroPeriods,
}

impl fmt::Display for FleetError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FleetError::EmptyTrace => f.write_str("mobility trace has no waypoints"),
            FleetError::NonIncreasingWaypoints { index } => {
                write!(f, "waypoint {index} is not later than its predecessor")
            }
            FleetError::NonFinitePosition { index } => {
                write!(f, "waypoint {index} has a non-finite coordinate")
            }
            FleetError::OutOfRange { t, start, end } => {
                write!(f, "time {t} outside trace span [{start}, {end}]")
            }
            FleetError::ZeroInterval => f.write_str("Hello interval must be positive"),
            FleetError::ZeroPeriods => f.write_str("expiry needs at least one Hello period"),
        }
    }
}

impl core::error::Error for FleetError {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Waypoint {
    pub time: SimTime,
    pub position: Point3,
}

/// Piecewise-linear trajectory through timed waypoints.
#[derive(Debug, Clone, PartialEq)]
pub struct MobilityTrace {
    waypoints: Vec<Waypoint>,
}

impl MobilityTrace {
    pub fn new(waypoints: Vec<Waypoint>) -> Result<Self, FleetError> {
        if waypoints.is_empty() {
            return Err(FleetError::EmptyTrace);
        }
        for (i, w) in waypoints.iter().enumerate() {
            if !w.position.is_finite() {
                return Err(FleetError::NonFinitePosition { index: i });
            }
            if i > 0 && w.time <= waypoints[i - 1].time {
                return Err(FleetError::NonIncreasingWaypoints { index: i });
            }
        }
        Ok(MobilityTrace { waypoints })
    }

    /// A vehicle parked at `position` for the whole `[start, end]` window.
    pub fn stationary(position: Point3, start: SimTime, end: SimTime) -> Result<Self, FleetError> {
        let mut wps = alloc::vec![Waypoint { time: start, position }];
        if end > start {
            wps.push(Waypoint { time: end, position });
        }
        MobilityTrace::new(wps)
    }

    /// Straight-line motion at constant velocity (m/s per axis) over `[start, end]`.
    pub fn linear(
        origin: Point3,
        velocity: Point3,
        start: SimTime,
        end: SimTime,
    ) -> Result<Self, FleetError> {
        let dt = end.saturating_sub(start).as_secs_f64();
        let dest = Point3::new(
            origin.x + velocity.x * dt,
            origin.y + velocity.y * dt,
            origin.z + velocity.z * dt,
        );
        let mut wps = alloc::vec![Waypoint { time: start, position: origin }];
        if end > start {
            wps.push(Waypoint { time: end, position: dest });
        }
        MobilityTrace::new(wps)
    }

    pub fn waypoints(&self) -> &[Waypoint] {
        &self.waypoints
    }

    pub fn start(&self) -> SimTime {
        self.waypoints[0].time
    }

    pub fn end(&self) -> SimTime {
        self.waypoints[self.waypoints.len() - 1].time
    }

    fn segment(&self, t: SimTime) -> Result<usize, FleetError> {
        if t < self.start() || t > self.end() {
            return Err(FleetError::OutOfRange { t, start: self.start(), end: self.end() });
        }
        // index of the last waypoint at or before t
        Ok(self.waypoints.partition_point(|w| w.time <= t) - 1)
    }

    pub fn position_at(&self, t: SimTime) -> Result<Point3, FleetError> {
        let i = self.segment(t)?;
        let a = &self.waypoints[i];
        if a.time == t || i + 1 == self.waypoints.len() {
            return Ok(a.position);
        }
        let b = &self.waypoints[i + 1];
        let frac = (t - a.time).as_nanos() as f64 / (b.time - a.time).as_nanos() as f64;
        Ok(a.position.lerp(&b.position, frac))
    }

    /// Speed of the segment in effect at `t` (the last segment at the end of the trace).
    pub fn speed_at(&self, t: SimTime) -> Result<f64, FleetError> {
        let mut i = self.segment(t)?;
        if self.waypoints.len() == 1 {
            return Ok(0.0);
        }
        if i + 1 == self.waypoints.len() {
            i -= 1;
        }
        let (a, b) = (&self.waypoints[i], &self.waypoints[i + 1]);
        Ok(a.position.distance(&b.position) / (b.time - a.time).as_secs_f64())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HelloMessage {
    pub vehicle_id: VehicleId,
    pub position: Point3,
    pub speed: f64,
    pub timestamp: SimTime,
}

/// One Hello at every multiple of `interval` that falls inside `[start, end]`.
pub fn emit_hellos(
    vehicle_id: VehicleId,
    trace: &MobilityTrace,
    interval: SimTime,
    start: SimTime,
    end: SimTime,
) -> Result<Vec<HelloMessage>, FleetError> {
    if interval == SimTime::ZERO {
        return Err(FleetError::ZeroInterval);
    }
    let mut out = Vec::new();
    let first = start.as_nanos().div_ceil(interval.as_nanos());
    let mut k = first;
    loop {
        let t = interval.mul(k);
        if t > end {
            break;
        }
        out.push(HelloMessage {
            vehicle_id,
            position: trace.position_at(t)?,
            speed: trace.speed_at(t)?,
            timestamp: t,
        });
        k += 1;
    }
    Ok(out)
}

/// The RSU's view of one vehicle.
#[derive(Debug, Clone, PartialEq)]
pub struct VehicleRecord {
    pub vehicle_id: VehicleId,
    pub position: Point3,
    pub speed: f64,
    /// `None` until the credibility oracle has answered for this vehicle.
    pub credibility: Option<Credibility>,
    pub last_hello: SimTime,
    pub zone: Option<ZoneId>,
}

/// What a registry update did to a vehicle.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RegistryDelta {
    Joined { vehicle: VehicleId, zone: Option<ZoneId> },
    Moved { vehicle: VehicleId, from: Option<ZoneId>, to: Option<ZoneId> },
    Refreshed { vehicle: VehicleId, zone: Option<ZoneId> },
    Expired { vehicle: VehicleId, zone: Option<ZoneId> },
    /// Hello older than the one already applied; ignored.
    Stale { vehicle: VehicleId },
}

impl RegistryDelta {
    pub fn vehicle(&self) -> VehicleId {
        match *self {
            RegistryDelta::Joined { vehicle, .. }
            | RegistryDelta::Moved { vehicle, .. }
            | RegistryDelta::Refreshed { vehicle, .. }
            | RegistryDelta::Expired { vehicle, .. }
            | RegistryDelta::Stale { vehicle } => vehicle,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Registry {
    records: BTreeMap<VehicleId, VehicleRecord>,
}

impl Registry {
    pub fn new() -> Self {
        Registry::default()
    }

    pub fn get(&self, id: VehicleId) -> Option<&VehicleRecord> {
        self.records.get(&id)
    }

    pub fn get_mut(&mut self, id: VehicleId) -> Option<&mut VehicleRecord> {
        self.records.get_mut(&id)
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    /// Records in ascending vehicle id order.
    pub fn iter(&self) -> impl Iterator<Item = &VehicleRecord> {
        self.records.values()
    }

    pub fn apply(&mut self, msg: &HelloMessage, tiling: &Tiling) -> RegistryDelta {
        let zone = tiling.locate(&msg.position);
        let vehicle = msg.vehicle_id;
        match self.records.get_mut(&vehicle) {
            None => {
                self.records.insert(
                    vehicle,
                    VehicleRecord {
                        vehicle_id: vehicle,
                        position: msg.position,
                        speed: msg.speed,
                        credibility: None,
                        last_hello: msg.timestamp,
                        zone,
                    },
                );
                RegistryDelta::Joined { vehicle, zone }
            }
            Some(rec) if msg.timestamp < rec.last_hello => RegistryDelta::Stale { vehicle },
            Some(rec) => {
                let from = rec.zone;
                rec.position = msg.position;
                rec.speed = msg.speed;
                rec.last_hello = msg.timestamp;
                rec.zone = zone;
                if from == zone {
                    RegistryDelta::Refreshed { vehicle, zone }
                } else {
                    RegistryDelta::Moved { vehicle, from, to: zone }
                }
            }
        }
    }

    /// Drops every vehicle silent for more than `k_periods` Hello intervals.
    /// A Hello exactly on the deadline keeps the vehicle.
    pub fn expire_stale(
        &mut self,
        now: SimTime,
        hello_interval: SimTime,
        k_periods: u32,
    ) -> Result<Vec<RegistryDelta>, FleetError> {
        if k_periods == 0 {
            return Err(FleetError::ZeroPeriods);
        }
        let limit = hello_interval.mul(u64::from(k_periods));
        let mut removed = Vec::new();
        self.records.retain(|&vehicle, rec| {
            let keep = now.saturating_sub(rec.last_hello) <= limit;
            if !keep {
                removed.push(RegistryDelta::Expired { vehicle, zone: rec.zone });
            }
            keep
        });
        Ok(removed)
    }
}
