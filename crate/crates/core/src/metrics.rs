//! Report loss rate and average report delay.

use alloc::vec::Vec;
use core::fmt;

use crate::netsim::{FrameKind, FrameRecord, NodeId, Outcome};
use crate::time::SimTime;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricsError {
    ReceivedExceedsSent { sent: u64, received: u64 },
    NegativeDelay(f64),
}

impl fmt::Display for MetricsError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MetricsError::ReceivedExceedsSent { sent, received } => {
                write!(f, "{received} reports received but only {sent} sent")
            }
            MetricsError::NegativeDelay(d) => write!(f, "report delay {d} is negative or not finite"),
        }
    }
}

impl core::error::Error for MetricsError {}

/// `(sent - received) / sent`; zero when nothing was sent.
pub fn report_loss_rate(sent: u64, received: u64) -> Result<f64, MetricsError> {
    if received > sent {
        return Err(MetricsError::ReceivedExceedsSent { sent, received });
    }
    if sent == 0 {
        return Ok(0.0);
    }
    Ok((sent - received) as f64 / sent as f64)
}

/// Mean of the delivered reports' delays, in seconds; `None` when nothing was delivered.
pub fn average_report_delay(delays: &[f64]) -> Result<Option<f64>, MetricsError> {
    if let Some(&bad) = delays.iter().find(|d| !d.is_finite() || **d < 0.0) {
        return Err(MetricsError::NegativeDelay(bad));
    }
    if delays.is_empty() {
        return Ok(None);
    }
    Ok(Some(delays.iter().sum::<f64>() / delays.len() as f64))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunMetrics {
    /// Reports sent (`R_t`).
    pub reports_sent: u64,
    /// Reports delivered to the RSU (`R_r`).
    pub reports_received: u64,
    pub rlr: f64,
    /// Seconds; absent when no report reached the RSU.
    pub ard: Option<f64>,
    /// Enqueue-to-delivery delay of each delivered report, in frame order.
    pub delays: Vec<SimTime>,
    /// Reports corrupted by an overlapping transmission at the RSU.
    pub collisions: u64,
}

impl RunMetrics {
    /// Counts report frames only. A report counts as received when its RSU
    /// outcome is `Delivered`; delay runs from enqueue to the end of transmission.
    pub fn from_frames<'a, I>(frames: I) -> Result<Self, MetricsError>
    where
        I: IntoIterator<Item = &'a FrameRecord>,
    {
        let mut sent = 0u64;
        let mut delays = Vec::new();
        let mut collisions = 0u64;
        for f in frames.into_iter().filter(|f| f.kind == FrameKind::Report) {
            sent += 1;
            match (f.outcome_for(NodeId::Rsu), f.tx_end) {
                (Some(Outcome::Delivered), Some(end)) => delays.push(end - f.enqueue_time),
                (Some(Outcome::Collided), _) => collisions += 1,
                _ => {}
            }
        }
        let received = delays.len() as u64;
        let secs: Vec<f64> = delays.iter().map(|d| d.as_secs_f64()).collect();
        Ok(RunMetrics {
            reports_sent: sent,
            reports_received: received,
            rlr: report_loss_rate(sent, received)?,
            ard: average_report_delay(&secs)?,
            delays,
            collisions,
        })
    }
}
