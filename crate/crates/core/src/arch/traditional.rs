use super::check_survivor_map;
use crate::bits::BitVector;
use crate::error::{Error, Result};
use crate::trace::{Op, ScheduleTrace, Unit};

/// `L` rows of `N` registers. After list management an `N`-bit crossbar
/// copies each survivor's parent row, then a shifter appends the new bit.
#[derive(Debug, Clone)]
pub struct TraditionalPathMemory {
    rows: Vec<Vec<u8>>,
    len: usize,
    filled: usize,
}

impl TraditionalPathMemory {
    pub fn new(len: usize, paths: usize) -> Self {
        Self {
            rows: vec![vec![0; len]; paths],
            len,
            filled: 0,
        }
    }

    pub fn filled(&self) -> usize {
        self.filled
    }

    pub fn crossbar_lane_bits(&self) -> usize {
        self.len
    }

    pub fn update(
        &mut self,
        cycle: u64,
        parents: &[usize],
        bits: &[u8],
        trace: &mut ScheduleTrace,
    ) -> Result<()> {
        check_survivor_map(parents, bits, self.rows.len())?;
        if self.filled == self.len {
            return Err(Error::Overflow(format!(
                "all {} register columns already hold decoded bits",
                self.len
            )));
        }
        let i = self.filled;
        if parents.iter().enumerate().any(|(l, &p)| l != p) {
            let old = self.rows.clone();
            for (l, &p) in parents.iter().enumerate() {
                if p != l {
                    self.rows[l][..i].copy_from_slice(&old[p][..i]);
                }
                trace.push(cycle, Unit::TpmXbar, Op::Permute, l as u64, i as u64);
            }
        }
        for (l, &b) in bits.iter().enumerate() {
            self.rows[l][i] = b;
            trace.push(cycle, Unit::TpmReg(l), Op::Append, i as u64, b as u64);
        }
        self.filled += 1;
        Ok(())
    }

    pub fn read_path(&self, l: usize) -> Result<BitVector> {
        let row = self
            .rows
            .get(l)
            .ok_or_else(|| Error::InvalidInput(format!("path {l} out of range")))?;
        Ok(BitVector::from_bits(row[..self.filled].to_vec()).expect("rows hold bits"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_appends_own_bit() {
        let mut t = ScheduleTrace::new(false);
        let mut m = TraditionalPathMemory::new(4, 2);
        m.update(0, &[0, 1], &[1, 0], &mut t).unwrap();
        m.update(1, &[0, 1], &[0, 1], &mut t).unwrap();
        assert_eq!(m.read_path(0).unwrap().to_string(), "10");
        assert_eq!(m.read_path(1).unwrap().to_string(), "01");
    }

    #[test]
    fn duplication_copies_prefix_before_append() {
        let mut t = ScheduleTrace::new(false);
        let mut m = TraditionalPathMemory::new(4, 2);
        m.update(0, &[0, 1], &[1, 0], &mut t).unwrap();
        m.update(1, &[0, 0], &[0, 1], &mut t).unwrap();
        assert_eq!(m.read_path(0).unwrap().to_string(), "10");
        assert_eq!(m.read_path(1).unwrap().to_string(), "11");
        assert!(m.read_path(2).is_err());
    }

    #[test]
    fn overflow_rejected() {
        let mut t = ScheduleTrace::new(false);
        let mut m = TraditionalPathMemory::new(2, 1);
        m.update(0, &[0], &[1], &mut t).unwrap();
        m.update(1, &[0], &[1], &mut t).unwrap();
        assert!(matches!(m.update(2, &[0], &[1], &mut t), Err(Error::Overflow(_))));
    }
}
