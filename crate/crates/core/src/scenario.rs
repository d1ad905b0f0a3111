//! Scenario description and the single-run simulation loop.
//!
//! A run drives the RSU side of the scheme up to the event time: Hello
//! beacons every interval, liveness expiry, ranking upkeep, and periodic
//! reporter reselection. At the event time the chosen [`Strategy`] decides
//! which vehicles report, their frames go through the CSMA [`Channel`], and
//! the run's [`RunMetrics`] are read off the frame outcomes.
//!
//! Randomness comes from independent ChaCha streams derived from the seed
//! (placement per fleet group, credibility per vehicle, MAC backoff), so the
//! strategy only ever changes who transmits.

use alloc::boxed::Box;
use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::fleet::{FleetError, HelloMessage, MobilityTrace, Registry, RegistryDelta, VehicleId, Waypoint};
use crate::geometry::{build_tiling_capped, GeometryError, Point3, Tiling, TilingMode, ZoneId, DEFAULT_ZONE_CAP, GEOM_EPS};
use crate::metrics::{MetricsError, RunMetrics};
use crate::netsim::{Channel, Destination, FrameId, FrameKind, FrameRecord, FrameSpec, NodeId, Outcome, RadioConfig, SimEvent};
use crate::selection::{reselect_tick, ReporterSet, SelectionParams};
use crate::time::SimTime;
use crate::trust::{BlockchainMock, CloudMock, Credibility, CredibilityOracle, Rankings, StaticTable};

/// Who transmits when an event is detected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Strategy {
    /// The event zone's reporter set unicasts to the RSU.
    Vts,
    /// Every detecting vehicle broadcasts.
    BroadcastAll,
    /// Detecting vehicles within the nearby radius unicast to the RSU.
    NearbyReport,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Vts, Strategy::BroadcastAll, Strategy::NearbyReport];

    pub fn as_str(self) -> &'static str {
        match self {
            Strategy::Vts => "vts",
            Strategy::BroadcastAll => "broadcast_all",
            Strategy::NearbyReport => "nearby_report",
        }
    }
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct TilingConfig {
    pub radius: f64,
    pub detection_distance: f64,
    pub mode: TilingMode,
    pub zone_cap: usize,
}

impl Default for TilingConfig {
    fn default() -> Self {
        TilingConfig { radius: 1000.0, detection_distance: 100.0, mode: TilingMode::Disc, zone_cap: DEFAULT_ZONE_CAP }
    }
}

/// Radio parameters in configuration units (microseconds for MAC timing).
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RadioSettings {
    pub bandwidth: u64,
    pub tx_range: f64,
    pub cs_range: f64,
    pub slot_time_us: u64,
    pub difs_us: u64,
    pub cw_min: u32,
    pub rsu_tx_range: f64,
}

impl Default for RadioSettings {
    fn default() -> Self {
        let r = RadioConfig::default();
        RadioSettings {
            bandwidth: r.bandwidth,
            tx_range: r.tx_range,
            cs_range: r.cs_range,
            slot_time_us: r.slot_time.as_nanos() / 1000,
            difs_us: r.difs.as_nanos() / 1000,
            cw_min: r.cw_min,
            rsu_tx_range: r.rsu_tx_range,
        }
    }
}

impl RadioSettings {
    pub fn to_radio(&self) -> RadioConfig {
        RadioConfig {
            bandwidth: self.bandwidth,
            tx_range: self.tx_range,
            cs_range: self.cs_range,
            slot_time: SimTime::from_micros(self.slot_time_us),
            difs: SimTime::from_micros(self.difs_us),
            cw_min: self.cw_min,
            rsu_tx_range: self.rsu_tx_range,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Heading {
    PlusX,
    MinusX,
    #[default]
    Either,
}

/// Vehicles placed uniformly at random in a box, driving along x.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct GroupSpec {
    pub count: usize,
    pub min: [f64; 3],
    pub max: [f64; 3],
    /// Speed range in m/s, drawn uniformly.
    pub speed: [f64; 2],
    pub heading: Heading,
    /// The `reporters` sweep variable sets this group's count.
    pub swept: bool,
}

impl Default for GroupSpec {
    fn default() -> Self {
        GroupSpec {
            count: 50,
            min: [-1000.0, -3.5, 0.0],
            max: [1000.0, 3.5, 0.0],
            speed: [10.0, 30.0],
            heading: Heading::Either,
            swept: false,
        }
    }
}

/// An explicitly listed vehicle. A single waypoint parks it for the whole run.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct VehicleSpec {
    pub id: u32,
    #[cfg_attr(feature = "serde", serde(default))]
    pub credibility: Option<f64>,
    /// `[t_seconds, x, y, z]` rows with strictly increasing times.
    pub waypoints: Vec<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct FleetConfig {
    pub vehicles: Vec<VehicleSpec>,
    pub groups: Vec<GroupSpec>,
    /// Mobility trace file; resolved into `vehicles` by the loader.
    pub trace_file: Option<String>,
}

impl Default for FleetConfig {
    fn default() -> Self {
        FleetConfig { vehicles: Vec::new(), groups: vec![GroupSpec::default()], trace_file: None }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct CredibilityConfig {
    /// `[vehicle_id, credibility]` pairs.
    pub values: Vec<(u32, f64)>,
    /// Range for vehicles with no listed value.
    pub random: [f64; 2],
    /// Credibility table file; resolved into `values` by the loader.
    pub table_file: Option<String>,
}

impl Default for CredibilityConfig {
    fn default() -> Self {
        CredibilityConfig { values: Vec::new(), random: [0.0, 1.0], table_file: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields))]
pub enum OracleConfig {
    #[default]
    Static,
    Blockchain,
    Cloud {
        /// Seconds.
        latency: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SelectionConfig {
    pub reporters_per_zone: usize,
    pub alpha: f64,
    /// Defaults to the radio's carrier-sense range.
    pub interference_range: Option<f64>,
    /// Seconds.
    pub reselect_period: f64,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        SelectionConfig { reporters_per_zone: 3, alpha: 0.5, interference_range: None, reselect_period: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct HelloConfig {
    /// Seconds.
    pub interval: f64,
    pub expiry_periods: u32,
    pub size: u32,
    /// Send Hellos over the shared channel instead of out of band.
    pub via_channel: bool,
}

impl Default for HelloConfig {
    fn default() -> Self {
        HelloConfig { interval: 0.1, expiry_periods: 3, size: 100, via_channel: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct EventConfig {
    /// Seconds.
    pub time: f64,
    /// Event location; defaults to the centre of `zone`.
    pub position: Option<[f64; 3]>,
    pub zone: u32,
    pub report_size: u32,
    /// Radius for the nearby-report strategy; defaults to the detection distance.
    pub nearby_radius: Option<f64>,
}

impl Default for EventConfig {
    fn default() -> Self {
        EventConfig { time: 1.0, position: None, zone: 0, report_size: 100, nearby_radius: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum SweepVariable {
    /// Vehicle count of every `swept` fleet group.
    Reporters,
    CsRange,
    ReportSize,
    ReportersPerZone,
    Alpha,
}

impl SweepVariable {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepVariable::Reporters => "reporters",
            SweepVariable::CsRange => "cs_range",
            SweepVariable::ReportSize => "report_size",
            SweepVariable::ReportersPerZone => "reporters_per_zone",
            SweepVariable::Alpha => "alpha",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct SweepConfig {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct SeedConfig {
    pub base: u64,
    pub count: u32,
}

impl Default for SeedConfig {
    fn default() -> Self {
        SeedConfig { base: 1, count: 1 }
    }
}

impl SeedConfig {
    pub fn seeds(&self) -> impl Iterator<Item = u64> + '_ {
        (0..u64::from(self.count)).map(move |i| self.base.wrapping_add(i))
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(deny_unknown_fields))]
pub struct CredibilityUpdate {
    /// Seconds.
    pub time: f64,
    pub vehicle: u32,
    pub value: f64,
}

/// Full description of an experiment. Defaults follow the reference
/// setup: 50 vehicles, 100-byte packets, 100 ms Hellos, 1 Mbps, 1000 m RSU
/// range, 250 m vehicle range, 100 m detection distance.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct ScenarioConfig {
    pub name: String,
    pub tiling: TilingConfig,
    pub radio: RadioSettings,
    pub fleet: FleetConfig,
    pub credibility: CredibilityConfig,
    pub credibility_updates: Vec<CredibilityUpdate>,
    pub oracle: OracleConfig,
    pub selection: SelectionConfig,
    pub hello: HelloConfig,
    pub event: EventConfig,
    pub strategies: Vec<Strategy>,
    pub sweep: Option<SweepConfig>,
    pub seeds: SeedConfig,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        ScenarioConfig {
            name: String::from("default"),
            tiling: TilingConfig::default(),
            radio: RadioSettings::default(),
            fleet: FleetConfig::default(),
            credibility: CredibilityConfig::default(),
            credibility_updates: Vec::new(),
            oracle: OracleConfig::default(),
            selection: SelectionConfig::default(),
            hello: HelloConfig::default(),
            event: EventConfig::default(),
            strategies: Strategy::ALL.to_vec(),
            sweep: None,
            seeds: SeedConfig::default(),
        }
    }
}

/// A configuration problem, located by its dotted field path.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConfigError {
    pub path: String,
    pub message: String,
}

impl ConfigError {
    fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        ConfigError { path: path.into(), message: message.into() }
    }
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

impl core::error::Error for ConfigError {}

#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioError {
    Config(ConfigError),
    Geometry(GeometryError),
    Fleet(FleetError),
    Metrics(MetricsError),
}

impl fmt::Display for ScenarioError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScenarioError::Config(e) => write!(f, "config error at {e}"),
            ScenarioError::Geometry(e) => write!(f, "tiling: {e}"),
            ScenarioError::Fleet(e) => write!(f, "fleet: {e}"),
            ScenarioError::Metrics(e) => write!(f, "metrics: {e}"),
        }
    }
}

impl core::error::Error for ScenarioError {}

impl From<ConfigError> for ScenarioError {
    fn from(e: ConfigError) -> Self {
        ScenarioError::Config(e)
    }
}

impl From<GeometryError> for ScenarioError {
    fn from(e: GeometryError) -> Self {
        ScenarioError::Geometry(e)
    }
}

impl From<FleetError> for ScenarioError {
    fn from(e: FleetError) -> Self {
        ScenarioError::Fleet(e)
    }
}

impl From<MetricsError> for ScenarioError {
    fn from(e: MetricsError) -> Self {
        ScenarioError::Metrics(e)
    }
}

fn positive(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(ConfigError::new(path, format!("must be positive and finite, got {v}")))
    }
}

fn unit_interval(path: &str, v: f64) -> Result<(), ConfigError> {
    if v.is_finite() && (0.0..=1.0).contains(&v) {
        Ok(())
    } else {
        Err(ConfigError::new(path, format!("must lie in [0, 1], got {v}")))
    }
}

fn seconds(path: &str, v: f64) -> Result<SimTime, ConfigError> {
    SimTime::from_secs_f64(v).ok_or_else(|| ConfigError::new(path, format!("not a valid time: {v}")))
}

impl ScenarioConfig {
    pub fn validate(&self) -> Result<(), ConfigError> {
        positive("tiling.radius", self.tiling.radius)?;
        positive("tiling.detection_distance", self.tiling.detection_distance)?;
        if self.tiling.zone_cap == 0 {
            return Err(ConfigError::new("tiling.zone_cap", "must be at least 1"));
        }

        let r = &self.radio;
        if r.bandwidth == 0 {
            return Err(ConfigError::new("radio.bandwidth", "must be positive"));
        }
        positive("radio.tx_range", r.tx_range)?;
        positive("radio.cs_range", r.cs_range)?;
        positive("radio.rsu_tx_range", r.rsu_tx_range)?;
        if r.slot_time_us == 0 {
            return Err(ConfigError::new("radio.slot_time_us", "must be positive"));
        }
        if r.difs_us == 0 {
            return Err(ConfigError::new("radio.difs_us", "must be positive"));
        }
        if r.cw_min == 0 {
            return Err(ConfigError::new("radio.cw_min", "must be at least 1"));
        }

        let mut seen = BTreeMap::new();
        for (i, v) in self.fleet.vehicles.iter().enumerate() {
            let path = format!("fleet.vehicles[{i}]");
            if seen.insert(v.id, ()).is_some() {
                return Err(ConfigError::new(format!("{path}.id"), format!("duplicate vehicle id {}", v.id)));
            }
            if let Some(c) = v.credibility {
                unit_interval(&format!("{path}.credibility"), c)?;
            }
            vehicle_trace(v, SimTime::ZERO).map_err(|e| ConfigError::new(format!("{path}.waypoints"), e))?;
        }
        for (i, g) in self.fleet.groups.iter().enumerate() {
            let path = format!("fleet.groups[{i}]");
            for a in 0..3 {
                if !(g.min[a].is_finite() && g.max[a].is_finite() && g.min[a] <= g.max[a]) {
                    return Err(ConfigError::new(format!("{path}.min"), "min must be finite and not exceed max"));
                }
            }
            if !(g.speed[0].is_finite() && g.speed[1].is_finite() && 0.0 <= g.speed[0] && g.speed[0] <= g.speed[1]) {
                return Err(ConfigError::new(format!("{path}.speed"), "expected 0 <= low <= high"));
            }
        }

        for (i, (_, c)) in self.credibility.values.iter().enumerate() {
            unit_interval(&format!("credibility.values[{i}]"), *c)?;
        }
        let [lo, hi] = self.credibility.random;
        unit_interval("credibility.random", lo)?;
        unit_interval("credibility.random", hi)?;
        if lo > hi {
            return Err(ConfigError::new("credibility.random", "low bound exceeds high bound"));
        }
        for (i, u) in self.credibility_updates.iter().enumerate() {
            seconds(&format!("credibility_updates[{i}].time"), u.time)?;
            unit_interval(&format!("credibility_updates[{i}].value"), u.value)?;
        }
        if let OracleConfig::Cloud { latency } = self.oracle {
            seconds("oracle.latency", latency)?;
        }

        let s = &self.selection;
        if s.reporters_per_zone == 0 {
            return Err(ConfigError::new("selection.reporters_per_zone", "must be at least 1"));
        }
        if !(s.alpha > 0.0 && s.alpha < 1.0) {
            return Err(ConfigError::new("selection.alpha", format!("must lie in (0, 1), got {}", s.alpha)));
        }
        if let Some(range) = s.interference_range {
            positive("selection.interference_range", range)?;
        }
        if seconds("selection.reselect_period", s.reselect_period)? == SimTime::ZERO {
            return Err(ConfigError::new("selection.reselect_period", "must be positive"));
        }

        if seconds("hello.interval", self.hello.interval)? == SimTime::ZERO {
            return Err(ConfigError::new("hello.interval", "must be positive"));
        }
        if self.hello.expiry_periods == 0 {
            return Err(ConfigError::new("hello.expiry_periods", "must be at least 1"));
        }

        seconds("event.time", self.event.time)?;
        if let Some(p) = self.event.position {
            if !Point3::from(p).is_finite() {
                return Err(ConfigError::new("event.position", "must be finite"));
            }
        }
        if let Some(nr) = self.event.nearby_radius {
            positive("event.nearby_radius", nr)?;
        }

        if self.strategies.is_empty() {
            return Err(ConfigError::new("strategies", "at least one strategy is required"));
        }
        if self.seeds.count == 0 {
            return Err(ConfigError::new("seeds.count", "must be at least 1"));
        }
        if let Some(sweep) = &self.sweep {
            if sweep.values.is_empty() {
                return Err(ConfigError::new("sweep.values", "must not be empty"));
            }
            for (i, &v) in sweep.values.iter().enumerate() {
                self.clone()
                    .with_sweep_value(sweep.variable, v)
                    .map_err(|e| ConfigError::new(format!("sweep.values[{i}]"), e.message))?;
            }
        }
        Ok(())
    }

    /// Copy of this config with one sweep variable set.
    pub fn with_sweep_value(mut self, variable: SweepVariable, value: f64) -> Result<Self, ConfigError> {
        let count = |v: f64| -> Result<usize, ConfigError> {
            if v.is_finite() && v >= 0.0 && v == libm::floor(v) {
                Ok(v as usize)
            } else {
                Err(ConfigError::new("sweep.values", format!("{v} is not a whole number")))
            }
        };
        match variable {
            SweepVariable::Reporters => {
                let n = count(value)?;
                if !self.fleet.groups.iter().any(|g| g.swept) {
                    return Err(ConfigError::new("fleet.groups", "no group is marked swept"));
                }
                for g in self.fleet.groups.iter_mut().filter(|g| g.swept) {
                    g.count = n;
                }
            }
            SweepVariable::CsRange => {
                positive("sweep.values", value)?;
                self.radio.cs_range = value;
            }
            SweepVariable::ReportSize => {
                self.event.report_size = u32::try_from(count(value)?)
                    .map_err(|_| ConfigError::new("sweep.values", "report size too large"))?;
            }
            SweepVariable::ReportersPerZone => {
                let m = count(value)?;
                if m == 0 {
                    return Err(ConfigError::new("sweep.values", "reporters per zone must be at least 1"));
                }
                self.selection.reporters_per_zone = m;
            }
            SweepVariable::Alpha => {
                if !(value > 0.0 && value < 1.0) {
                    return Err(ConfigError::new("sweep.values", "alpha must lie in (0, 1)"));
                }
                self.selection.alpha = value;
            }
        }
        Ok(self)
    }

    /// `(sweep value, config)` for every sweep point; a single `(None, self)` without a sweep.
    pub fn sweep_points(&self) -> Result<Vec<(Option<f64>, ScenarioConfig)>, ConfigError> {
        match &self.sweep {
            None => Ok(vec![(None, self.clone())]),
            Some(sweep) => sweep
                .values
                .iter()
                .map(|&v| Ok((Some(v), self.clone().with_sweep_value(sweep.variable, v)?)))
                .collect(),
        }
    }

    pub fn selection_params(&self) -> SelectionParams {
        SelectionParams {
            reporters_per_zone: self.selection.reporters_per_zone,
            alpha: self.selection.alpha,
            interference_range: self.selection.interference_range.unwrap_or(self.radio.cs_range),
            reselect_period: SimTime::from_secs_f64(self.selection.reselect_period).unwrap_or(SimTime::from_secs(1)),
        }
    }
}

fn vehicle_trace(v: &VehicleSpec, horizon: SimTime) -> Result<MobilityTrace, String> {
    let mut wps = Vec::with_capacity(v.waypoints.len());
    for row in &v.waypoints {
        let time = SimTime::from_secs_f64(row[0]).ok_or_else(|| format!("invalid waypoint time {}", row[0]))?;
        wps.push(Waypoint { time, position: Point3::new(row[1], row[2], row[3]) });
    }
    if wps.len() == 1 {
        let p = wps[0].position;
        if !p.is_finite() {
            return Err(FleetError::NonFinitePosition { index: 0 }.to_string());
        }
        return MobilityTrace::stationary(p, SimTime::ZERO, horizon.max(wps[0].time)).map_err(|e| e.to_string());
    }
    MobilityTrace::new(wps).map_err(|e| e.to_string())
}

/// A vehicle as the simulation moves it.
#[derive(Debug, Clone)]
pub struct SimVehicle {
    pub id: VehicleId,
    pub trace: MobilityTrace,
    pub credibility: Credibility,
}

impl SimVehicle {
    fn active(&self, t: SimTime) -> bool {
        self.trace.start() <= t && t <= self.trace.end()
    }

    fn hello(&self, t: SimTime) -> Result<HelloMessage, FleetError> {
        Ok(HelloMessage {
            vehicle_id: self.id,
            position: self.trace.position_at(t)?,
            speed: self.trace.speed_at(t)?,
            timestamp: t,
        })
    }
}

fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

const STREAM_MAC: u64 = 1;
const STREAM_CREDIBILITY: u64 = 2;
const STREAM_GROUP_BASE: u64 = 100;

/// Vehicles and their credibilities for one seed. Independent of strategy.
pub fn build_fleet(config: &ScenarioConfig, seed: u64) -> Result<Vec<SimVehicle>, ScenarioError> {
    let event_time = seconds("event.time", config.event.time)?;
    let horizon = event_time + SimTime::from_secs(60);

    let listed: BTreeMap<u32, f64> = config.credibility.values.iter().copied().collect();
    let [lo, hi] = config.credibility.random;
    let credibility_for = |id: u32, explicit: Option<f64>| -> Result<Credibility, ScenarioError> {
        let v = match explicit.or_else(|| listed.get(&id).copied()) {
            Some(v) => v,
            None => {
                let mut rng = stream(seed ^ u64::from(id).wrapping_mul(0x9E37_79B9_7F4A_7C15), STREAM_CREDIBILITY);
                if hi > lo {
                    rng.gen_range(lo..=hi)
                } else {
                    lo
                }
            }
        };
        Credibility::new(v).map_err(|e| ConfigError::new("credibility", e.to_string()).into())
    };

    let mut out = Vec::new();
    for (i, v) in config.fleet.vehicles.iter().enumerate() {
        let trace = vehicle_trace(v, horizon)
            .map_err(|e| ConfigError::new(format!("fleet.vehicles[{i}].waypoints"), e))?;
        out.push(SimVehicle { id: VehicleId(v.id), trace, credibility: credibility_for(v.id, v.credibility)? });
    }

    let mut next_id = config.fleet.vehicles.iter().map(|v| v.id + 1).max().unwrap_or(1);
    for (gi, g) in config.fleet.groups.iter().enumerate() {
        let mut rng = stream(seed, STREAM_GROUP_BASE + gi as u64);
        for _ in 0..g.count {
            let pos: [f64; 3] =
                core::array::from_fn(|a| if g.max[a] > g.min[a] { rng.gen_range(g.min[a]..g.max[a]) } else { g.min[a] });
            let speed = if g.speed[1] > g.speed[0] { rng.gen_range(g.speed[0]..g.speed[1]) } else { g.speed[0] };
            let sign = match g.heading {
                Heading::PlusX => 1.0,
                Heading::MinusX => -1.0,
                Heading::Either => {
                    if rng.gen_bool(0.5) {
                        1.0
                    } else {
                        -1.0
                    }
                }
            };
            let trace = MobilityTrace::linear(Point3::from(pos), Point3::new(sign * speed, 0.0, 0.0), SimTime::ZERO, horizon)?;
            let id = next_id;
            next_id += 1;
            out.push(SimVehicle { id: VehicleId(id), trace, credibility: credibility_for(id, None)? });
        }
    }
    out.sort_by_key(|v| v.id);
    Ok(out)
}

/// Vehicles whose last known position is within `d` of the event.
pub fn detect_event(event: &Point3, registry: &Registry, d: f64) -> Vec<VehicleId> {
    registry
        .iter()
        .filter(|r| r.position.distance(event) <= d + GEOM_EPS)
        .map(|r| r.vehicle_id)
        .collect()
}

/// Everything a run produced.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub strategy: Strategy,
    pub seed: u64,
    pub metrics: RunMetrics,
    pub frames: Vec<FrameRecord>,
    pub events: Vec<SimEvent>,
    pub event_zone: Option<ZoneId>,
    /// Vehicles within detection distance of the event, per the RSU registry.
    pub detecting: Vec<VehicleId>,
    /// Vehicles that sent a report.
    pub transmitters: Vec<VehicleId>,
    /// Reporter sets in force at the event.
    pub reporter_sets: BTreeMap<ZoneId, ReporterSet>,
    pub registry: Registry,
    pub rankings: Rankings,
}

/// Runs one strategy with one seed.
pub fn run(config: &ScenarioConfig, strategy: Strategy, seed: u64) -> Result<RunOutput, ScenarioError> {
    config.validate()?;
    let tiling = build_tiling_capped(
        config.tiling.radius,
        config.tiling.detection_distance,
        config.tiling.mode,
        config.tiling.zone_cap,
    )?;
    let fleet = build_fleet(config, seed)?;
    Simulation::new(config, tiling, fleet, strategy, seed)?.run()
}

struct Simulation<'a> {
    config: &'a ScenarioConfig,
    tiling: Tiling,
    fleet: Vec<SimVehicle>,
    strategy: Strategy,
    seed: u64,
    params: SelectionParams,
    hello_interval: SimTime,
    event_time: SimTime,
    event_pos: Point3,
    registry: Registry,
    rankings: Rankings,
    oracle: Box<dyn CredibilityOracle>,
    channel: Channel,
    reporter_sets: BTreeMap<ZoneId, ReporterSet>,
    hello_frames: BTreeMap<FrameId, HelloMessage>,
    applied_hellos: usize,
    updates: Vec<(SimTime, VehicleId, Credibility)>,
}

impl<'a> Simulation<'a> {
    fn new(
        config: &'a ScenarioConfig,
        tiling: Tiling,
        fleet: Vec<SimVehicle>,
        strategy: Strategy,
        seed: u64,
    ) -> Result<Self, ScenarioError> {
        let params = config.selection_params();
        let hello_interval = seconds("hello.interval", config.hello.interval)?;
        let event_time = seconds("event.time", config.event.time)?;
        let event_pos = match config.event.position {
            Some(p) => Point3::from(p),
            None => tiling
                .zone(ZoneId(config.event.zone))
                .map(|z| z.center())
                .ok_or_else(|| ConfigError::new("event.zone", format!("no zone {}", config.event.zone)))?,
        };

        let table: BTreeMap<VehicleId, Credibility> = fleet.iter().map(|v| (v.id, v.credibility)).collect();
        let oracle: Box<dyn CredibilityOracle> = match config.oracle {
            OracleConfig::Static => Box::new(StaticTable::new(table)),
            OracleConfig::Blockchain => Box::new(BlockchainMock::new(table)),
            OracleConfig::Cloud { latency } => Box::new(CloudMock::new(table, seconds("oracle.latency", latency)?)),
        };

        let mut updates = Vec::new();
        for (i, u) in config.credibility_updates.iter().enumerate() {
            let value = Credibility::new(u.value)
                .map_err(|e| ConfigError::new(format!("credibility_updates[{i}].value"), e.to_string()))?;
            updates.push((seconds(&format!("credibility_updates[{i}].time"), u.time)?, VehicleId(u.vehicle), value));
        }
        updates.sort_by_key(|u| (u.0, u.1));

        let channel = Channel::with_rng(config.radio.to_radio(), stream(seed, STREAM_MAC));

        Ok(Simulation {
            config,
            tiling,
            fleet,
            strategy,
            seed,
            params,
            hello_interval,
            event_time,
            event_pos,
            registry: Registry::new(),
            rankings: Rankings::new(),
            oracle,
            channel,
            reporter_sets: BTreeMap::new(),
            hello_frames: BTreeMap::new(),
            applied_hellos: 0,
            updates,
        })
    }

    fn next_multiple(t: SimTime, period: SimTime) -> SimTime {
        SimTime(t.as_nanos().div_ceil(period.as_nanos()) * period.as_nanos())
    }

    fn run(mut self) -> Result<RunOutput, ScenarioError> {
        let via_channel = self.config.hello.via_channel;
        let mut t = SimTime::ZERO;
        let mut reports: Vec<FrameId> = Vec::new();
        let mut event_done = false;
        let mut detecting = Vec::new();
        let mut transmitters = Vec::new();
        let mut event_zone = None;
        let mut update_idx = 0;

        loop {
            if via_channel {
                self.channel.run_before(t);
            }
            for v in &self.fleet {
                if v.active(t) {
                    self.channel.set_position(NodeId::Vehicle(v.id), v.trace.position_at(t)?);
                }
            }

            let mut deltas: Vec<RegistryDelta> = Vec::new();
            if via_channel {
                deltas.extend(self.apply_channel_hellos());
            }
            let hello_tick = t.is_multiple_of(self.hello_interval);
            if hello_tick {
                for v in &self.fleet {
                    if !v.active(t) {
                        continue;
                    }
                    let msg = v.hello(t)?;
                    if via_channel {
                        let spec = FrameSpec {
                            src: NodeId::Vehicle(v.id),
                            dst: Destination::Broadcast,
                            size: self.config.hello.size,
                            kind: FrameKind::Hello,
                        };
                        let id = self.channel.try_send(spec, t);
                        self.hello_frames.insert(id, msg);
                    } else {
                        deltas.push(self.registry.apply(&msg, &self.tiling));
                    }
                }
                deltas.extend(self.registry.expire_stale(t, self.hello_interval, self.config.hello.expiry_periods)?);
            }
            self.rankings.sync(&deltas, self.oracle.as_mut(), &mut self.registry, t);

            while update_idx < self.updates.len() && self.updates[update_idx].0 <= t {
                let (_, vehicle, value) = self.updates[update_idx];
                self.rankings.update_credibility(vehicle, value, self.oracle.as_mut(), &mut self.registry);
                update_idx += 1;
            }

            if t.is_multiple_of(self.params.reselect_period) {
                // t is on the tick, so this cannot fail
                if let Ok(sets) = reselect_tick(&self.rankings, &self.registry, &self.params, t) {
                    self.reporter_sets = sets;
                }
            }

            if !event_done && t == self.event_time {
                event_done = true;
                event_zone = self.tiling.locate(&self.event_pos);
                detecting = detect_event(&self.event_pos, &self.registry, self.tiling.detection_distance());
                transmitters = self.transmitters(&detecting, event_zone);
                let dst = match self.strategy {
                    Strategy::BroadcastAll => Destination::Broadcast,
                    Strategy::Vts | Strategy::NearbyReport => Destination::Unicast(NodeId::Rsu),
                };
                for &v in &transmitters {
                    let spec = FrameSpec {
                        src: NodeId::Vehicle(v),
                        dst,
                        size: self.config.event.report_size,
                        kind: FrameKind::Report,
                    };
                    reports.push(self.channel.try_send(spec, t));
                }
                if !via_channel {
                    self.channel.run_to_completion();
                    break;
                }
            }

            if event_done {
                let resolved = reports
                    .iter()
                    .all(|&id| self.channel.frame(id).is_none_or(|f| !f.outcomes.is_empty()));
                if resolved {
                    break;
                }
            }

            let mut next = Self::next_multiple(t + SimTime(1), self.hello_interval)
                .min(Self::next_multiple(t + SimTime(1), self.params.reselect_period));
            if !event_done {
                next = next.min(self.event_time);
            }
            if let Some(&(ut, _, _)) = self.updates.get(update_idx) {
                next = next.min(ut.max(t + SimTime(1)));
            }
            t = next;
        }

        let frames: Vec<FrameRecord> = self.channel.frames().to_vec();
        let metrics = RunMetrics::from_frames(frames.iter())?;
        Ok(RunOutput {
            strategy: self.strategy,
            seed: self.seed,
            metrics,
            events: self.channel.events().to_vec(),
            frames,
            event_zone,
            detecting,
            transmitters,
            reporter_sets: self.reporter_sets,
            registry: self.registry,
            rankings: self.rankings,
        })
    }

    /// Registry deltas for Hellos the RSU has received since the last call.
    fn apply_channel_hellos(&mut self) -> Vec<RegistryDelta> {
        let mut received: Vec<(SimTime, FrameId)> = Vec::new();
        for f in &self.channel.frames()[self.applied_hellos..] {
            if f.kind != FrameKind::Hello {
                continue;
            }
            if let (Some(end), Some(Outcome::Delivered)) = (f.tx_end, f.outcome_for(NodeId::Rsu)) {
                if self.hello_frames.contains_key(&f.id) {
                    received.push((end, f.id));
                }
            }
        }
        // frames before the first unresolved one will never change again
        let settled = self.channel.frames()[self.applied_hellos..]
            .iter()
            .position(|f| f.outcomes.is_empty())
            .map_or(self.channel.frames().len(), |i| self.applied_hellos + i);
        received.sort();
        let mut out = Vec::new();
        for (_, id) in received {
            if let Some(msg) = self.hello_frames.remove(&id) {
                out.push(self.registry.apply(&msg, &self.tiling));
            }
        }
        self.applied_hellos = settled;
        out
    }

    fn transmitters(&self, detecting: &[VehicleId], event_zone: Option<ZoneId>) -> Vec<VehicleId> {
        match self.strategy {
            Strategy::BroadcastAll => detecting.to_vec(),
            Strategy::NearbyReport => {
                let radius = self.config.event.nearby_radius.unwrap_or(self.tiling.detection_distance());
                detecting
                    .iter()
                    .copied()
                    .filter(|&v| {
                        self.registry
                            .get(v)
                            .is_some_and(|r| r.position.distance(&self.event_pos) <= radius + GEOM_EPS)
                    })
                    .collect()
            }
            Strategy::Vts => {
                let Some(set) = event_zone.and_then(|z| self.reporter_sets.get(&z)) else {
                    return Vec::new();
                };
                let mut out: Vec<VehicleId> = set.vehicles().filter(|v| detecting.contains(v)).collect();
                out.sort();
                out
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn single_vehicle(x: f64) -> ScenarioConfig {
        ScenarioConfig {
            fleet: FleetConfig {
                vehicles: vec![VehicleSpec { id: 1, credibility: Some(0.9), waypoints: vec![[0.0, x, 0.0, 0.0]] }],
                groups: Vec::new(),
                trace_file: None,
            },
            ..ScenarioConfig::default()
        }
    }

    #[test]
    fn sole_vehicle_report() {
        let cfg = single_vehicle(10.0);
        for strategy in Strategy::ALL {
            let out = run(&cfg, strategy, 7).unwrap();
            assert_eq!(out.metrics.reports_sent, 1, "{strategy}");
            assert_eq!(out.metrics.rlr, 0.0);
            assert_eq!(out.metrics.delays, vec![SimTime::from_micros(850)]);
            assert_eq!(out.metrics.ard, Some(SimTime::from_micros(850).as_secs_f64()));
        }
    }

    #[test]
    fn vehicle_outside_detection_does_not_report() {
        let cfg = single_vehicle(150.0);
        let out = run(&cfg, Strategy::BroadcastAll, 1).unwrap();
        assert_eq!(out.metrics.reports_sent, 0);
        assert_eq!(out.metrics.ard, None);
    }

    #[test]
    #[allow(clippy::field_reassign_with_default)]
    fn validation_paths() {
        let mut cfg = ScenarioConfig::default();
        cfg.radio.cs_range = -1.0;
        assert_eq!(cfg.validate().unwrap_err().path, "radio.cs_range");
        let mut cfg = ScenarioConfig::default();
        cfg.selection.alpha = 1.5;
        assert_eq!(cfg.validate().unwrap_err().path, "selection.alpha");
        let mut cfg = ScenarioConfig::default();
        cfg.sweep = Some(SweepConfig { variable: SweepVariable::Reporters, values: vec![1.0] });
        assert_eq!(cfg.validate().unwrap_err().path, "sweep.values[0]");
        let mut cfg = single_vehicle(0.0);
        cfg.fleet.vehicles.push(cfg.fleet.vehicles[0].clone());
        assert_eq!(cfg.validate().unwrap_err().path, "fleet.vehicles[1].id");
    }

    #[test]
    fn fleet_is_seeded() {
        let cfg = ScenarioConfig::default();
        let a = build_fleet(&cfg, 3).unwrap();
        let b = build_fleet(&cfg, 3).unwrap();
        let c = build_fleet(&cfg, 4).unwrap();
        assert_eq!(a.len(), 50);
        let pos = |f: &[SimVehicle]| f.iter().map(|v| v.trace.waypoints()[0].position).collect::<Vec<_>>();
        assert_eq!(pos(&a), pos(&b));
        assert_ne!(pos(&a), pos(&c));
    }
}
