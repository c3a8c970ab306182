use super::EraserImage;
use crate::error::{Error, Result};

/// Largest candidate list the exhaustive search accepts.
pub const ORACLE_LIMIT: usize = 25;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingSolution {
    /// Indices into the candidate list, ascending.
    pub members: Vec<usize>,
    /// Total image size of the members; they are pairwise disjoint.
    pub weight: usize,
}

/// Exhaustive maximum-weight set of pairwise disjoint images.
///
/// Meant as a reference for small inputs, so it refuses more than
/// [`ORACLE_LIMIT`] candidates.
pub fn exact_packing_oracle(candidates: &[EraserImage]) -> Result<PackingSolution> {
    let n = candidates.len();
    if n > ORACLE_LIMIT {
        return Err(Error::OracleTooLarge { limit: ORACLE_LIMIT, got: n });
    }
    let mut conflict = vec![0u32; n];
    for a in 0..n {
        for b in 0..n {
            if a != b && candidates[a].intersects(&candidates[b]) {
                conflict[a] |= 1 << b;
            }
        }
    }
    let weight: Vec<usize> = candidates.iter().map(EraserImage::size).collect();
    // suffix sums give a cheap upper bound for the remaining candidates
    let mut rest = vec![0usize; n + 1];
    for i in (0..n).rev() {
        rest[i] = rest[i + 1] + weight[i];
    }

    struct Search<'a> {
        conflict: &'a [u32],
        weight: &'a [usize],
        rest: &'a [usize],
        best: usize,
        best_mask: u32,
    }
    impl Search<'_> {
        fn go(&mut self, i: usize, chosen: u32, blocked: u32, w: usize) {
            if w > self.best {
                self.best = w;
                self.best_mask = chosen;
            }
            if i == self.weight.len() || w + self.rest[i] <= self.best {
                return;
            }
            if blocked & (1 << i) == 0 {
                self.go(i + 1, chosen | 1 << i, blocked | self.conflict[i], w + self.weight[i]);
            }
            self.go(i + 1, chosen, blocked, w);
        }
    }
    let mut s = Search { conflict: &conflict, weight: &weight, rest: &rest, best: 0, best_mask: 0 };
    s.go(0, 0, 0, 0);
    let members = (0..n).filter(|&i| s.best_mask & (1 << i) != 0).collect();
    Ok(PackingSolution { members, weight: s.best })
}
