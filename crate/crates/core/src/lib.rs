//! Core of the vehicle transmission scheduling simulator.
//!
//! An RSU sits at the origin and tiles its coverage with cubic detection
//! zones whose space diagonal equals the vehicles' accurate detection
//! distance. Vehicles are mapped to zones from their Hello messages, ranked
//! per zone by credibility, and a small set of reporting vehicles is picked
//! per zone by a greedy credibility-plus-interference weight. Reports are
//! carried over a simplified CSMA channel with carrier sensing, random
//! backoff and hidden-terminal collisions.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, experiment sweeps
//! and the command-line tool live in the `vts-sim` crate.

#![no_std]
#![warn(rust_2018_idioms, unused_qualifications)]

extern crate alloc;

pub mod fleet;
pub mod geometry;
pub mod metrics;
pub mod netsim;
pub mod scenario;
pub mod selection;
pub mod time;
pub mod trust;

mod math;

pub use fleet::{HelloMessage, MobilityTrace, Registry, RegistryDelta, VehicleId, VehicleRecord};
pub use geometry::{DetectionZone, Point3, Tiling, TilingMode, ZoneId};
pub use metrics::RunMetrics;
pub use netsim::{Channel, NodeId, Outcome, RadioConfig};
pub use scenario::{ScenarioConfig, Strategy};
pub use selection::{ReporterSet, SelectionParams};
pub use time::SimTime;
pub use trust::{Credibility, CredibilityOracle, RankingList, Rankings};
