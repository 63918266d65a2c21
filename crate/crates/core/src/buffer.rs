//! Per-relay FIFO buffers of received Phase I blocks.

use std::collections::VecDeque;

use crate::channel::LinkRealization;
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, CVector};

/// One stored Phase I block.
///
/// Besides the received vector and the channel snapshot, the entry keeps the
/// quantities needed to evaluate the forwarding rates later, all expressed in
/// noise-normalized units.
#[derive(Debug, Clone, PartialEq)]
pub struct BufferEntry {
    pub y: CVector,
    pub h_sr_snapshot: LinkRealization,
    pub slot_index: u64,
    /// Effective source-to-relay channel after precoding and power scaling.
    pub effective_sr: CMatrix,
    /// Realized relay noise energy relative to its expectation.
    pub relay_noise_ratio: f64,
    /// Effective source-to-eavesdropper channel for this block, one per
    /// eavesdropper.
    pub eve_exposure: Vec<CMatrix>,
}

impl BufferEntry {
    /// Number of symbols this entry occupies.
    pub fn symbols(&self) -> usize {
        self.y.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BufferState {
    capacity: usize,
    occupancy: usize,
    entries: VecDeque<BufferEntry>,
}

impl BufferState {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            occupancy: 0,
            entries: VecDeque::new(),
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    /// Stored symbols.
    pub fn occupancy(&self) -> usize {
        self.occupancy
    }

    pub fn entries(&self) -> impl Iterator<Item = &BufferEntry> {
        self.entries.iter()
    }

    pub fn front(&self) -> Option<&BufferEntry> {
        self.entries.front()
    }

    pub fn can_receive(&self, n_m: usize) -> bool {
        self.occupancy + n_m <= self.capacity
    }

    pub fn can_transmit(&self, n_m: usize) -> bool {
        self.occupancy >= n_m
    }

    pub fn push(&mut self, entry: BufferEntry) -> Result<()> {
        let incoming = entry.symbols();
        if !self.can_receive(incoming) {
            return Err(Error::BufferOverflow {
                capacity: self.capacity,
                occupancy: self.occupancy,
                incoming,
            });
        }
        self.occupancy += incoming;
        self.entries.push_back(entry);
        Ok(())
    }

    /// Removes the oldest entry.
    pub fn pop(&mut self) -> Result<BufferEntry> {
        let entry = self.entries.pop_front().ok_or(Error::BufferUnderflow {
            occupancy: self.occupancy,
            needed: 1,
        })?;
        self.occupancy -= entry.symbols();
        Ok(entry)
    }
}
