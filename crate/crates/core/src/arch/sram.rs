use crate::error::{Error, Result};

/// Word-addressed two-port SRAM.
///
/// One read port and one write port, each `lanes` words wide, usable in the
/// same cycle. Writes are staged and land at [`Sram::end_cycle`], so a read
/// and a write to the same address in one cycle return the old word. Several
/// reads of the same address in one cycle occupy a single lane.
#[derive(Debug, Clone)]
pub struct Sram {
    words: Vec<u64>,
    lanes: usize,
    cycle: u64,
    reads: Vec<usize>,
    pending: Vec<(usize, u64)>,
}

impl Sram {
    pub fn new(depth: usize, lanes: usize) -> Self {
        Self {
            words: vec![0; depth],
            lanes,
            cycle: 0,
            reads: Vec::with_capacity(lanes),
            pending: Vec::with_capacity(lanes),
        }
    }

    /// Preloaded contents, as if written in earlier cycles.
    pub fn from_words(words: Vec<u64>, lanes: usize) -> Self {
        Self {
            words,
            lanes,
            cycle: 0,
            reads: Vec::with_capacity(lanes),
            pending: Vec::with_capacity(lanes),
        }
    }

    pub fn depth(&self) -> usize {
        self.words.len()
    }

    fn enter(&mut self, cycle: u64) -> Result<()> {
        if cycle != self.cycle {
            if !self.pending.is_empty() {
                return Err(Error::Protocol(format!(
                    "SRAM moved to cycle {cycle} with writes of cycle {} uncommitted",
                    self.cycle
                )));
            }
            self.cycle = cycle;
            self.reads.clear();
        }
        Ok(())
    }

    fn check_addr(&self, addr: usize) -> Result<()> {
        if addr >= self.words.len() {
            return Err(Error::Protocol(format!(
                "SRAM address {addr} beyond depth {}",
                self.words.len()
            )));
        }
        Ok(())
    }

    pub fn read(&mut self, cycle: u64, addr: usize) -> Result<u64> {
        self.check_addr(addr)?;
        self.enter(cycle)?;
        if !self.reads.contains(&addr) {
            if self.reads.len() == self.lanes {
                return Err(Error::Protocol(format!(
                    "cycle {cycle}: read port exhausted ({} lanes)",
                    self.lanes
                )));
            }
            self.reads.push(addr);
        }
        Ok(self.words[addr])
    }

    pub fn write(&mut self, cycle: u64, addr: usize, word: u64) -> Result<()> {
        self.check_addr(addr)?;
        self.enter(cycle)?;
        if self.pending.len() == self.lanes {
            return Err(Error::Protocol(format!(
                "cycle {cycle}: write port exhausted ({} lanes)",
                self.lanes
            )));
        }
        if self.pending.iter().any(|&(a, _)| a == addr) {
            return Err(Error::Protocol(format!(
                "cycle {cycle}: two writes to address {addr}"
            )));
        }
        self.pending.push((addr, word));
        Ok(())
    }

    pub fn end_cycle(&mut self) {
        for (addr, word) in self.pending.drain(..) {
            self.words[addr] = word;
        }
    }

    /// Debug/inspection access; does not consume a port.
    pub fn peek(&self, addr: usize) -> u64 {
        self.words[addr]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn read_during_write_sees_old_word() {
        let mut s = Sram::new(4, 1);
        s.write(0, 1, 7).unwrap();
        s.end_cycle();
        s.write(1, 1, 9).unwrap();
        assert_eq!(s.read(1, 1).unwrap(), 7);
        s.end_cycle();
        assert_eq!(s.read(2, 1).unwrap(), 9);
    }

    #[test]
    fn port_budget() {
        let mut s = Sram::new(4, 2);
        s.read(0, 0).unwrap();
        s.read(0, 0).unwrap();
        s.read(0, 1).unwrap();
        assert!(s.read(0, 2).is_err());
        s.write(0, 0, 1).unwrap();
        s.write(0, 1, 1).unwrap();
        assert!(s.write(0, 2, 1).is_err());
        assert!(s.read(0, 9).is_err());
    }

    #[test]
    fn uncommitted_cycle_is_an_error() {
        let mut s = Sram::new(2, 1);
        s.write(0, 0, 1).unwrap();
        assert!(s.read(1, 0).is_err());
    }
}
