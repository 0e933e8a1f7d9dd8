use crate::error::{Error, Result};
use crate::trace::{Op, ScheduleTrace, Unit};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CrossbarUse {
    /// Survivor permutation after list management.
    ListPermute,
    /// Gathering stored words during partial-sum generation.
    Gather,
}

/// An `L × L` crossbar with a fixed lane width per destination.
///
/// The same physical crossbar serves list permutations and gathers, so a
/// cycle may carry only one kind of traffic.
#[derive(Debug, Clone)]
pub struct Crossbar {
    unit: Unit,
    lane_bits: usize,
    cycle: Option<u64>,
    kind: Option<CrossbarUse>,
    moved: Vec<usize>,
}

impl Crossbar {
    pub fn new(unit: Unit, lane_bits: usize, paths: usize) -> Self {
        Self {
            unit,
            lane_bits,
            cycle: None,
            kind: None,
            moved: vec![0; paths],
        }
    }

    pub fn lane_bits(&self) -> usize {
        self.lane_bits
    }

    pub fn route(
        &mut self,
        cycle: u64,
        kind: CrossbarUse,
        dest: usize,
        bits: usize,
        trace: &mut ScheduleTrace,
    ) -> Result<()> {
        if self.cycle != Some(cycle) {
            self.cycle = Some(cycle);
            self.kind = None;
            self.moved.iter_mut().for_each(|m| *m = 0);
        }
        match self.kind {
            Some(k) if k != kind => {
                return Err(Error::Protocol(format!(
                    "cycle {cycle}: {} requested for {kind:?} while serving {k:?}",
                    self.unit
                )))
            }
            _ => self.kind = Some(kind),
        }
        self.moved[dest] += bits;
        if self.moved[dest] > self.lane_bits {
            return Err(Error::Protocol(format!(
                "cycle {cycle}: {} moved {} bits to path {dest}, lane is {}",
                self.unit, self.moved[dest], self.lane_bits
            )));
        }
        let op = match kind {
            CrossbarUse::ListPermute => Op::Permute,
            CrossbarUse::Gather => Op::Gather,
        };
        trace.push(cycle, self.unit, op, dest as u64, bits as u64);
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exclusivity_and_width() {
        let mut t = ScheduleTrace::new(false);
        let mut x = Crossbar::new(Unit::FpmXbar, 4, 2);
        x.route(0, CrossbarUse::ListPermute, 0, 4, &mut t).unwrap();
        assert!(x.route(0, CrossbarUse::Gather, 1, 1, &mut t).is_err());
        x.route(1, CrossbarUse::Gather, 1, 4, &mut t).unwrap();
        assert!(x.route(1, CrossbarUse::Gather, 1, 1, &mut t).is_err());
    }
}
