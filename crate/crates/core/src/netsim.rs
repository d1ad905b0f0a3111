//! Event-driven CSMA channel.
//!
//! Simplified 802.11-style access: a node with a frame senses the medium;
//! if it stays idle for DIFS the node transmits, otherwise the node waits for
//! the sensed transmissions to end, waits DIFS plus a uniform backoff of
//! `[0, cw_min - 1]` slots, and senses again. There is no RTS/CTS, no ACK
//! and no retransmission, so every frame is resolved exactly once per
//! intended receiver when its transmission ends.
//!
//! Nodes only sense transmitters within `cs_range`. Two transmitters outside
//! each other's sensing range can overlap, and the overlap corrupts reception
//! at any receiver that senses both: the hidden-terminal case. A frame for the
//! RSU is also lost when the RSU lies outside the sender's sensing range.
//!
//! Events at the same instant run in (kind, node, insertion) order with
//! `TxEnd` first, so a transmission that ends at `t` never blocks one that
//! starts at `t`.

use alloc::collections::{BTreeMap, BinaryHeap, VecDeque};
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::cmp::{Ordering, Reverse};
use core::fmt;
use core::str::FromStr;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::fleet::VehicleId;
use crate::geometry::{Point3, GEOM_EPS};
use crate::time::SimTime;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default, deny_unknown_fields))]
pub struct RadioConfig {
    /// Bits per second.
    pub bandwidth: u64,
    /// Vehicle transmission range, metres.
    pub tx_range: f64,
    /// Carrier-sense range, metres. Also bounds what the RSU can hear.
    pub cs_range: f64,
    pub slot_time: SimTime,
    pub difs: SimTime,
    /// Contention window, in slots.
    pub cw_min: u32,
    pub rsu_tx_range: f64,
}

impl Default for RadioConfig {
    fn default() -> Self {
        RadioConfig {
            bandwidth: 1_000_000,
            tx_range: 250.0,
            cs_range: 250.0,
            slot_time: SimTime::from_micros(20),
            difs: SimTime::from_micros(50),
            cw_min: 32,
            rsu_tx_range: 1000.0,
        }
    }
}

impl RadioConfig {
    pub fn validate(&self) -> Result<(), &'static str> {
        let positive = |v: f64| v.is_finite() && v > 0.0;
        if self.bandwidth == 0 {
            return Err("bandwidth must be positive");
        }
        if !positive(self.tx_range) {
            return Err("tx_range must be positive");
        }
        if !positive(self.cs_range) {
            return Err("cs_range must be positive");
        }
        if !positive(self.rsu_tx_range) {
            return Err("rsu_tx_range must be positive");
        }
        if self.slot_time == SimTime::ZERO || self.difs == SimTime::ZERO {
            return Err("slot_time and difs must be positive");
        }
        if self.cw_min == 0 {
            return Err("cw_min must be at least one slot");
        }
        Ok(())
    }
}

/// Time on air for `size` bytes, rounded to the nearest nanosecond.
///
/// # Panics
/// If `bandwidth` is zero.
pub fn airtime(size: u32, bandwidth: u64) -> SimTime {
    assert!(bandwidth > 0, "bandwidth must be positive");
    let bits = u128::from(size) * 8 * 1_000_000_000;
    let bw = u128::from(bandwidth);
    SimTime(((bits + bw / 2) / bw) as u64)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NodeId {
    Rsu,
    Vehicle(VehicleId),
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            NodeId::Rsu => f.write_str("rsu"),
            NodeId::Vehicle(v) => write!(f, "{v}"),
        }
    }
}

/// A log field that does not name a known node, kind or outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError(pub String);

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "unrecognised value {:?}", self.0)
    }
}

impl core::error::Error for ParseError {}

impl FromStr for NodeId {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "rsu" {
            return Ok(NodeId::Rsu);
        }
        s.strip_prefix('v')
            .and_then(|n| n.parse().ok())
            .map(|n| NodeId::Vehicle(VehicleId(n)))
            .ok_or_else(|| ParseError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Destination {
    Unicast(NodeId),
    Broadcast,
}

impl fmt::Display for Destination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Destination::Unicast(n) => write!(f, "{n}"),
            Destination::Broadcast => f.write_str("broadcast"),
        }
    }
}

impl FromStr for Destination {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "broadcast" {
            Ok(Destination::Broadcast)
        } else {
            s.parse().map(Destination::Unicast)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum FrameKind {
    Report,
    Hello,
}

impl FrameKind {
    pub fn as_str(self) -> &'static str {
        match self {
            FrameKind::Report => "report",
            FrameKind::Hello => "hello",
        }
    }
}

impl FromStr for FrameKind {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "report" => Ok(FrameKind::Report),
            "hello" => Ok(FrameKind::Hello),
            _ => Err(ParseError(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Outcome {
    Delivered,
    Collided,
    OutOfRange,
    SenderUnsensed,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Delivered => "DELIVERED",
            Outcome::Collided => "COLLIDED",
            Outcome::OutOfRange => "OUT_OF_RANGE",
            Outcome::SenderUnsensed => "SENDER_UNSENSED",
        }
    }
}

impl FromStr for Outcome {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        [Outcome::Delivered, Outcome::Collided, Outcome::OutOfRange, Outcome::SenderUnsensed]
            .into_iter()
            .find(|o| o.as_str() == s)
            .ok_or_else(|| ParseError(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FrameId(pub u32);

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FrameSpec {
    pub src: NodeId,
    pub dst: Destination,
    pub size: u32,
    pub kind: FrameKind,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FrameRecord {
    pub id: FrameId,
    pub kind: FrameKind,
    pub src: NodeId,
    pub dst: Destination,
    pub size: u32,
    pub enqueue_time: SimTime,
    pub tx_start: Option<SimTime>,
    pub tx_end: Option<SimTime>,
    /// One entry per intended receiver, filled when the transmission ends.
    pub outcomes: Vec<(NodeId, Outcome)>,
}

impl FrameRecord {
    pub fn outcome_for(&self, node: NodeId) -> Option<Outcome> {
        self.outcomes.iter().find(|(n, _)| *n == node).map(|(_, o)| *o)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum EventKind {
    TxEnd,
    TxStart,
    BackoffExpire,
    TxAttempt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimEvent {
    pub time: SimTime,
    pub kind: EventKind,
    pub node: NodeId,
    pub frame: FrameId,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Queued {
    event: SimEvent,
    seq: u64,
}

impl Ord for Queued {
    fn cmp(&self, other: &Self) -> Ordering {
        (self.event.time, self.event.kind, self.event.node, self.seq).cmp(&(
            other.event.time,
            other.event.kind,
            other.event.node,
            other.seq,
        ))
    }
}

impl PartialOrd for Queued {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum MacState {
    Idle,
    /// Sensed idle at `since`; transmits at `since + difs` if it stays idle.
    Difs { since: SimTime },
    /// Counting down from `idle_from`.
    Backoff { idle_from: SimTime },
    Transmitting,
}

#[derive(Debug, Clone)]
struct NodeMac {
    queue: VecDeque<FrameId>,
    state: MacState,
}

impl Default for NodeMac {
    fn default() -> Self {
        NodeMac { queue: VecDeque::new(), state: MacState::Idle }
    }
}

#[derive(Debug, Clone, Copy)]
struct Transmission {
    node: NodeId,
    frame: FrameId,
    start: SimTime,
    end: SimTime,
}

/// One shared wireless medium.
#[derive(Debug, Clone)]
pub struct Channel {
    radio: RadioConfig,
    rng: ChaCha8Rng,
    positions: BTreeMap<NodeId, Point3>,
    macs: BTreeMap<NodeId, NodeMac>,
    heap: BinaryHeap<Reverse<Queued>>,
    seq: u64,
    now: SimTime,
    frames: Vec<FrameRecord>,
    transmissions: Vec<Transmission>,
    longest_airtime: SimTime,
    log: Vec<SimEvent>,
}

impl Channel {
    /// A channel with the RSU at the origin. `seed` drives backoff draws.
    pub fn new(radio: RadioConfig, seed: u64) -> Self {
        Channel::with_rng(radio, ChaCha8Rng::seed_from_u64(seed))
    }

    pub fn with_rng(radio: RadioConfig, rng: ChaCha8Rng) -> Self {
        let mut positions = BTreeMap::new();
        positions.insert(NodeId::Rsu, Point3::ORIGIN);
        Channel {
            radio,
            rng,
            positions,
            macs: BTreeMap::new(),
            heap: BinaryHeap::new(),
            seq: 0,
            now: SimTime::ZERO,
            frames: Vec::new(),
            transmissions: Vec::new(),
            longest_airtime: SimTime::ZERO,
            log: Vec::new(),
        }
    }

    pub fn radio(&self) -> &RadioConfig {
        &self.radio
    }

    pub fn now(&self) -> SimTime {
        self.now
    }

    pub fn set_position(&mut self, node: NodeId, position: Point3) {
        self.positions.insert(node, position);
    }

    pub fn position(&self, node: NodeId) -> Option<Point3> {
        self.positions.get(&node).copied()
    }

    pub fn frames(&self) -> &[FrameRecord] {
        &self.frames
    }

    pub fn frame(&self, id: FrameId) -> Option<&FrameRecord> {
        self.frames.get(id.0 as usize)
    }

    /// Every processed event, in processing order.
    pub fn events(&self) -> &[SimEvent] {
        &self.log
    }

    pub fn is_quiescent(&self) -> bool {
        self.heap.is_empty()
    }

    fn distance(&self, a: NodeId, b: NodeId) -> f64 {
        match (self.positions.get(&a), self.positions.get(&b)) {
            (Some(pa), Some(pb)) => pa.distance(pb),
            _ => f64::INFINITY,
        }
    }

    fn senses(&self, listener: NodeId, transmitter: NodeId) -> bool {
        self.distance(listener, transmitter) <= self.radio.cs_range + GEOM_EPS
    }

    /// True iff another node within `node`'s sensing range is mid-transmission at `t`.
    pub fn channel_busy(&self, node: NodeId, t: SimTime) -> bool {
        self.busy_during(node, t, t)
    }

    /// Whether a sensed transmission by another node touches `[from, to]`.
    fn busy_during(&self, node: NodeId, from: SimTime, to: SimTime) -> bool {
        self.transmissions.iter().any(|tx| {
            tx.node != node && tx.start <= to && tx.end > from && self.senses(node, tx.node)
        })
    }

    fn sensed_idle_at(&self, node: NodeId, t: SimTime) -> SimTime {
        self.transmissions
            .iter()
            .filter(|tx| tx.node != node && tx.start <= t && tx.end > t && self.senses(node, tx.node))
            .map(|tx| tx.end)
            .max()
            .unwrap_or(t)
    }

    fn schedule(&mut self, time: SimTime, kind: EventKind, node: NodeId, frame: FrameId) {
        self.seq += 1;
        self.heap.push(Reverse(Queued { event: SimEvent { time, kind, node, frame }, seq: self.seq }));
    }

    /// Queues a frame at `src` at time `t` and, if the node was idle,
    /// schedules its channel access attempt.
    pub fn try_send(&mut self, spec: FrameSpec, t: SimTime) -> FrameId {
        let id = FrameId(self.frames.len() as u32);
        self.frames.push(FrameRecord {
            id,
            kind: spec.kind,
            src: spec.src,
            dst: spec.dst,
            size: spec.size,
            enqueue_time: t,
            tx_start: None,
            tx_end: None,
            outcomes: Vec::new(),
        });
        let mac = self.macs.entry(spec.src).or_default();
        mac.queue.push_back(id);
        if mac.queue.len() == 1 && mac.state == MacState::Idle {
            self.schedule(t, EventKind::TxAttempt, spec.src, id);
        }
        id
    }

    /// Processes every event strictly before `limit`.
    pub fn run_before(&mut self, limit: SimTime) {
        while let Some(Reverse(next)) = self.heap.peek() {
            if next.event.time >= limit {
                break;
            }
            self.step();
        }
    }

    pub fn run_to_completion(&mut self) {
        while !self.heap.is_empty() {
            self.step();
        }
    }

    fn step(&mut self) {
        let Some(Reverse(q)) = self.heap.pop() else { return };
        let ev = q.event;
        self.now = ev.time;
        self.log.push(ev);
        match ev.kind {
            EventKind::TxAttempt => self.attempt(ev.node, ev.time),
            EventKind::TxStart => {
                if let Some(MacState::Difs { since }) = self.macs.get(&ev.node).map(|m| m.state) {
                    if self.busy_during(ev.node, since, ev.time) {
                        self.defer(ev.node, ev.time);
                    } else {
                        self.begin_tx(ev.node, ev.time);
                    }
                }
            }
            EventKind::BackoffExpire => {
                if let Some(MacState::Backoff { idle_from }) = self.macs.get(&ev.node).map(|m| m.state) {
                    if self.busy_during(ev.node, idle_from, ev.time) {
                        self.defer(ev.node, ev.time);
                    } else {
                        self.begin_tx(ev.node, ev.time);
                    }
                }
            }
            EventKind::TxEnd => self.end_tx(ev.node, ev.frame, ev.time),
        }
    }

    fn head_frame(&self, node: NodeId) -> Option<FrameId> {
        self.macs.get(&node).and_then(|m| m.queue.front().copied())
    }

    fn set_state(&mut self, node: NodeId, state: MacState) {
        if let Some(m) = self.macs.get_mut(&node) {
            m.state = state;
        }
    }

    fn attempt(&mut self, node: NodeId, t: SimTime) {
        let Some(frame) = self.head_frame(node) else { return };
        if self.channel_busy(node, t) {
            self.defer(node, t);
        } else {
            self.set_state(node, MacState::Difs { since: t });
            let at = t + self.radio.difs;
            self.schedule(at, EventKind::TxStart, node, frame);
        }
    }

    fn defer(&mut self, node: NodeId, t: SimTime) {
        let Some(frame) = self.head_frame(node) else { return };
        let idle_from = self.sensed_idle_at(node, t);
        let slots = self.rng.gen_range(0..self.radio.cw_min);
        let at = idle_from + self.radio.difs + self.radio.slot_time.mul(u64::from(slots));
        self.set_state(node, MacState::Backoff { idle_from });
        self.schedule(at, EventKind::BackoffExpire, node, frame);
    }

    fn begin_tx(&mut self, node: NodeId, t: SimTime) {
        let Some(frame) = self.head_frame(node) else { return };
        let air = airtime(self.frames[frame.0 as usize].size, self.radio.bandwidth);
        let end = t + air;
        self.longest_airtime = self.longest_airtime.max(air);
        let rec = &mut self.frames[frame.0 as usize];
        rec.tx_start = Some(t);
        rec.tx_end = Some(end);
        self.transmissions.push(Transmission { node, frame, start: t, end });
        self.set_state(node, MacState::Transmitting);
        self.schedule(end, EventKind::TxEnd, node, frame);
    }

    fn end_tx(&mut self, node: NodeId, frame: FrameId, t: SimTime) {
        let receivers = self.intended_receivers(frame);
        let outcomes: Vec<(NodeId, Outcome)> =
            receivers.into_iter().map(|r| (r, self.resolve_reception(frame, r))).collect();
        self.frames[frame.0 as usize].outcomes = outcomes;

        if let Some(m) = self.macs.get_mut(&node) {
            m.queue.pop_front();
            m.state = MacState::Idle;
        }
        if let Some(next) = self.head_frame(node) {
            self.schedule(t, EventKind::TxAttempt, node, next);
        }
        self.prune(t);
    }

    fn prune(&mut self, now: SimTime) {
        if self.transmissions.len() < 256 {
            return;
        }
        let window = self.radio.difs
            + self.radio.slot_time.mul(u64::from(self.radio.cw_min))
            + self.longest_airtime;
        let horizon = now.saturating_sub(window);
        self.transmissions.retain(|tx| tx.end >= horizon);
    }

    /// Unicast: the destination. Broadcast: the RSU plus every vehicle within
    /// the sender's transmission range.
    fn intended_receivers(&self, frame: FrameId) -> Vec<NodeId> {
        let rec = &self.frames[frame.0 as usize];
        match rec.dst {
            Destination::Unicast(n) => alloc::vec![n],
            Destination::Broadcast => {
                let range = self.tx_range_of(rec.src);
                let mut out = Vec::new();
                if rec.src != NodeId::Rsu {
                    out.push(NodeId::Rsu);
                }
                for &node in self.positions.keys() {
                    if node != rec.src
                        && node != NodeId::Rsu
                        && self.distance(node, rec.src) <= range + GEOM_EPS
                    {
                        out.push(node);
                    }
                }
                out
            }
        }
    }

    fn tx_range_of(&self, node: NodeId) -> f64 {
        match node {
            NodeId::Rsu => self.radio.rsu_tx_range,
            NodeId::Vehicle(_) => self.radio.tx_range,
        }
    }

    /// Outcome of a transmitted frame at one receiver.
    ///
    /// Checked in order: receiver beyond the sender's transmission range;
    /// RSU beyond the sender's sensing range; an overlapping transmission
    /// from any node the receiver senses (the receiver itself included);
    /// otherwise delivered.
    pub fn resolve_reception(&self, frame: FrameId, receiver: NodeId) -> Outcome {
        let rec = &self.frames[frame.0 as usize];
        let (Some(start), Some(end)) = (rec.tx_start, rec.tx_end) else {
            return Outcome::Collided;
        };
        let d = self.distance(rec.src, receiver);
        if d > self.tx_range_of(rec.src) + GEOM_EPS {
            return Outcome::OutOfRange;
        }
        if receiver == NodeId::Rsu && d > self.radio.cs_range + GEOM_EPS {
            return Outcome::SenderUnsensed;
        }
        let collided = self.transmissions.iter().any(|tx| {
            tx.frame != frame && tx.start < end && start < tx.end && self.senses(receiver, tx.node)
        });
        if collided {
            Outcome::Collided
        } else {
            Outcome::Delivered
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(id: u32) -> NodeId {
        NodeId::Vehicle(VehicleId(id))
    }

    fn report(src: NodeId, size: u32) -> FrameSpec {
        FrameSpec { src, dst: Destination::Unicast(NodeId::Rsu), size, kind: FrameKind::Report }
    }

    fn radio(cs: f64) -> RadioConfig {
        RadioConfig { cs_range: cs, ..RadioConfig::default() }
    }

    #[test]
    fn airtime_exact() {
        assert_eq!(airtime(100, 1_000_000), SimTime::from_micros(800));
        assert_eq!(airtime(800, 1_000_000), SimTime::from_micros(6400));
        assert_eq!(airtime(0, 1_000_000), SimTime::ZERO);
        assert_eq!(airtime(800, 1_000_000).as_secs_f64(), 0.0064);
    }

    #[test]
    fn busy_sensing_range() {
        let mut ch = Channel::new(radio(100.0), 1);
        ch.set_position(v(1), Point3::ORIGIN);
        ch.set_position(v(2), Point3::new(99.0, 0.0, 0.0));
        ch.set_position(v(3), Point3::new(-101.0, 0.0, 0.0));
        assert!(!ch.channel_busy(v(2), SimTime::ZERO));
        ch.try_send(report(v(1), 100), SimTime::ZERO);
        ch.run_before(SimTime::from_micros(100));
        let t = SimTime::from_micros(60);
        assert!(ch.channel_busy(v(2), t));
        assert!(!ch.channel_busy(v(3), t));
        assert!(!ch.channel_busy(v(1), t));
    }

    #[test]
    fn sole_sender() {
        let mut ch = Channel::new(radio(100.0), 1);
        ch.set_position(v(1), Point3::new(10.0, 0.0, 0.0));
        let t0 = SimTime::from_millis(5);
        let id = ch.try_send(report(v(1), 100), t0);
        ch.run_to_completion();
        let f = ch.frame(id).unwrap();
        assert_eq!(f.tx_start, Some(t0 + SimTime::from_micros(50)));
        assert_eq!(f.tx_end, Some(t0 + SimTime::from_micros(850)));
        assert_eq!(f.outcomes, alloc::vec![(NodeId::Rsu, Outcome::Delivered)]);
    }

    #[test]
    fn unsensed_and_out_of_range() {
        let mut ch = Channel::new(radio(20.0), 1);
        ch.set_position(v(1), Point3::new(40.0, 0.0, 0.0));
        ch.set_position(v(2), Point3::new(300.0, 0.0, 0.0));
        let a = ch.try_send(report(v(1), 100), SimTime::ZERO);
        let b = ch.try_send(report(v(2), 100), SimTime::ZERO);
        ch.run_to_completion();
        assert_eq!(ch.frame(a).unwrap().outcome_for(NodeId::Rsu), Some(Outcome::SenderUnsensed));
        assert_eq!(ch.frame(b).unwrap().outcome_for(NodeId::Rsu), Some(Outcome::OutOfRange));
    }

    #[test]
    fn broadcast_receivers() {
        let mut ch = Channel::new(radio(100.0), 1);
        ch.set_position(v(1), Point3::new(10.0, 0.0, 0.0));
        ch.set_position(v(2), Point3::new(50.0, 0.0, 0.0));
        ch.set_position(v(3), Point3::new(400.0, 0.0, 0.0));
        let spec = FrameSpec { src: v(1), dst: Destination::Broadcast, size: 100, kind: FrameKind::Report };
        let id = ch.try_send(spec, SimTime::ZERO);
        ch.run_to_completion();
        let f = ch.frame(id).unwrap();
        let rx: Vec<NodeId> = f.outcomes.iter().map(|(n, _)| *n).collect();
        assert_eq!(rx, alloc::vec![NodeId::Rsu, v(2)]);
        assert!(f.outcomes.iter().all(|(_, o)| *o == Outcome::Delivered));
    }

    #[test]
    fn queued_frames_go_back_to_back() {
        let mut ch = Channel::new(radio(100.0), 3);
        ch.set_position(v(1), Point3::new(10.0, 0.0, 0.0));
        let a = ch.try_send(report(v(1), 100), SimTime::ZERO);
        let b = ch.try_send(report(v(1), 100), SimTime::ZERO);
        ch.run_to_completion();
        let (fa, fb) = (ch.frame(a).unwrap(), ch.frame(b).unwrap());
        assert_eq!(fb.tx_start, Some(fa.tx_end.unwrap() + SimTime::from_micros(50)));
        assert_eq!(fb.outcome_for(NodeId::Rsu), Some(Outcome::Delivered));
    }
}
