use std::collections::BTreeMap;

use crate::{Bitstring, Error, Result};

/// Measured bit strings and how often each was seen.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShotHistogram {
    num_bits: usize,
    counts: BTreeMap<Bitstring, u64>,
    total: u64,
}

impl ShotHistogram {
    pub fn new(num_bits: usize) -> Self {
        ShotHistogram {
            num_bits,
            counts: BTreeMap::new(),
            total: 0,
        }
    }

    pub fn from_counts(num_bits: usize, counts: impl IntoIterator<Item = (Bitstring, u64)>) -> Result<Self> {
        let mut h = ShotHistogram::new(num_bits);
        for (b, c) in counts {
            h.record(b, c)?;
        }
        Ok(h)
    }

    pub fn record(&mut self, bits: Bitstring, count: u64) -> Result<()> {
        if bits.len() != self.num_bits {
            return Err(Error::domain(format!(
                "outcome has {} bits, histogram holds {}",
                bits.len(),
                self.num_bits
            )));
        }
        if count > 0 {
            *self.counts.entry(bits).or_insert(0) += count;
            self.total += count;
        }
        Ok(())
    }

    pub fn merge(&mut self, other: &ShotHistogram) -> Result<()> {
        for (&b, &c) in &other.counts {
            self.record(b, c)?;
        }
        Ok(())
    }

    pub fn num_bits(&self) -> usize {
        self.num_bits
    }

    /// Total shots `t`.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Number of distinct outcomes.
    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn count(&self, bits: Bitstring) -> u64 {
        self.counts.get(&bits).copied().unwrap_or(0)
    }

    /// Outcomes in lexicographic order.
    pub fn iter(&self) -> impl Iterator<Item = (Bitstring, u64)> + '_ {
        self.counts.iter().map(|(&b, &c)| (b, c))
    }

    /// Outcomes by count descending, then lexicographically.
    pub fn sorted_by_count(&self) -> Vec<(Bitstring, u64)> {
        let mut v: Vec<_> = self.iter().collect();
        v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
        v
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn totals_track_records() {
        let mut h = ShotHistogram::new(2);
        h.record("01".parse().unwrap(), 3).unwrap();
        h.record("11".parse().unwrap(), 5).unwrap();
        h.record("01".parse().unwrap(), 1).unwrap();
        assert_eq!(h.total(), 9);
        assert_eq!(h.len(), 2);
        assert_eq!(h.sorted_by_count()[0].1, 5);
        assert!(h.record("1".parse().unwrap(), 1).is_err());
    }
}
