//! Bucket intervals and their order relations.
//!
//! Endpoints are bucket indices: positions in the topological order of the
//! remainder, with `t0` standing for the bucket that sits after every position.

use thiserror::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, serde::Serialize)]
pub struct BucketInterval {
    pub l: usize,
    pub r: usize,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum IntervalError {
    #[error("meet of {0:?} and {1:?} is undefined: the first does not cross the second")]
    UndefinedMeet(BucketInterval, BucketInterval),
    #[error("interval set is not proper: {0:?} lies inside {1:?}")]
    NotProper(BucketInterval, BucketInterval),
    #[error("endpoints of {0:?} are not increasing")]
    Degenerate(BucketInterval),
}

impl BucketInterval {
    pub fn new(l: usize, r: usize) -> Result<Self, IntervalError> {
        if l < r {
            Ok(Self { l, r })
        } else {
            Err(IntervalError::Degenerate(Self { l, r }))
        }
    }

    /// `[l, r]` of `self` lies inside `[l, r]` of `other`.
    pub fn within(&self, other: &Self) -> bool {
        other.l <= self.l && self.r <= other.r
    }

    /// Strict crossing: `l1 < l2 < r1 < r2`.
    pub fn precedes(&self, other: &Self) -> bool {
        self.l < other.l && other.l < self.r && self.r < other.r
    }

    pub fn join(&self, other: &Self) -> Self {
        Self { l: self.l.min(other.l), r: self.r.max(other.r) }
    }

    pub fn meet(&self, other: &Self) -> Result<Self, IntervalError> {
        if self.precedes(other) {
            Ok(Self { l: other.l, r: self.r })
        } else {
            Err(IntervalError::UndefinedMeet(*self, *other))
        }
    }

    /// Bucket indices of `indices` inside `[l, r]`.
    pub fn buckets(&self, indices: &[usize]) -> Vec<usize> {
        indices.iter().copied().filter(|&i| self.l <= i && i <= self.r).collect()
    }

    /// Remainder positions in `[l, r)`.
    pub fn contains_position(&self, p: usize) -> bool {
        self.l <= p && p < self.r
    }
}

/// Splits a proper set of intervals into maximal crossing chains, scanning by left endpoint.
///
/// Returns the chains and the join of each chain.
pub fn block_partition(
    set: &[BucketInterval],
) -> Result<(Vec<Vec<BucketInterval>>, Vec<BucketInterval>), IntervalError> {
    let mut sorted = set.to_vec();
    sorted.sort();
    sorted.dedup();
    for (i, a) in sorted.iter().enumerate() {
        for b in &sorted[i + 1..] {
            if a.within(b) {
                return Err(IntervalError::NotProper(*a, *b));
            }
            if b.within(a) {
                return Err(IntervalError::NotProper(*b, *a));
            }
        }
    }
    let mut blocks: Vec<Vec<BucketInterval>> = Vec::new();
    for iv in sorted {
        match blocks.last_mut() {
            Some(chain) if chain.last().is_some_and(|last| last.precedes(&iv)) => chain.push(iv),
            _ => blocks.push(vec![iv]),
        }
    }
    let joins = blocks.iter().map(|c| c.iter().skip(1).fold(c[0], |acc, x| acc.join(x))).collect();
    Ok((blocks, joins))
}

/// The inclusion-maximal members of `set`.
pub fn maximal(set: &[BucketInterval]) -> Vec<BucketInterval> {
    let mut out: Vec<BucketInterval> =
        set.iter().copied().filter(|a| !set.iter().any(|b| b != a && a.within(b))).collect();
    out.sort();
    out.dedup();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn iv(l: usize, r: usize) -> BucketInterval {
        BucketInterval::new(l, r).unwrap()
    }

    const INF: usize = usize::MAX;

    #[test]
    fn relations_on_the_reference_configuration() {
        let (i0, i1, i2) = (iv(8, 20), iv(14, INF), iv(20, INF));
        assert!(i0.precedes(&i1));
        assert!(i2.within(&i1));
        assert!(!i1.precedes(&i0) && !i2.precedes(&i1));
        assert_eq!(i0.buckets(&[8, 14, 20, INF]), vec![8, 14, 20]);
        assert_eq!(i0.meet(&i1), Ok(iv(14, 20)));
        assert_eq!(i0.join(&i1), iv(8, INF));
        assert_eq!(i1.meet(&i0), Err(IntervalError::UndefinedMeet(i1, i0)));
        assert!(BucketInterval::new(3, 3).is_err());
    }

    #[test]
    fn block_partition_examples() {
        let (blocks, joins) = block_partition(&[iv(1, 4)]).unwrap();
        assert_eq!((blocks.len(), joins), (1, vec![iv(1, 4)]));

        // Three crossing, a gap, two crossing, then one that only touches its neighbor.
        let set = [iv(1, 4), iv(2, 6), iv(5, 8), iv(8, 11), iv(10, 13), iv(13, 15)];
        let (blocks, joins) = block_partition(&set).unwrap();
        assert_eq!(blocks, vec![set[..3].to_vec(), set[3..5].to_vec(), set[5..].to_vec()]);
        assert_eq!(joins, vec![iv(1, 8), iv(8, 13), iv(13, 15)]);
        for w in joins.windows(2) {
            assert!(w[0].r <= w[1].l);
        }

        let (blocks, _) = block_partition(&[iv(1, 3), iv(5, 7)]).unwrap();
        assert_eq!(blocks.len(), 2);
        assert!(matches!(block_partition(&[iv(1, 5), iv(2, 4)]), Err(IntervalError::NotProper(..))));
        assert_eq!(maximal(&[iv(1, 5), iv(2, 4), iv(4, 9)]), vec![iv(1, 5), iv(4, 9)]);
    }
}
