//! Exhaustive generation of `(n, b)` towers.
//!
//! Towers are produced as sorted block lists by a depth-first walk that
//! appends one block at a time: either further right on the current level or
//! anywhere supported on the next level. Both choices are scanned in
//! increasing `(level, x)` order, so the walk visits every tower once and in
//! lexicographic order of its block list.

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tower::{Block, Tower};

/// Shape of a tower class: block width `k`, block count `n`, base size `b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct TowerClassParams {
    pub k: usize,
    pub n: usize,
    pub b: usize,
}

impl TowerClassParams {
    pub fn new(k: usize, n: usize, b: usize) -> Result<Self> {
        if k == 0 || b == 0 || b > n {
            return Err(Error::InvalidParams(format!(
                "need k >= 1 and n >= b >= 1, got k={k}, n={n}, b={b}"
            )));
        }
        Ok(TowerClassParams { k, n, b })
    }
}

struct Frame {
    candidates: Vec<Block>,
    next: usize,
}

/// The depth-first state machine shared by iteration and counting.
struct Walker {
    k: usize,
    n: usize,
    floor: usize,
    path: Vec<Block>,
    frames: Vec<Frame>,
    started: bool,
    done: bool,
}

impl Walker {
    fn new(k: usize, n: usize, prefix: Vec<Block>) -> Walker {
        Walker {
            k,
            n,
            floor: prefix.len(),
            path: prefix,
            frames: Vec::new(),
            started: false,
            done: false,
        }
    }

    /// Blocks that may follow the current path.
    fn candidates(&self) -> Vec<Block> {
        let k = self.k as i64;
        let last = *self.path.last().expect("path starts with the base");
        let level_start = |level: u32| self.path.partition_point(|b| b.level < level);
        let mut out = Vec::new();

        if last.level > 0 {
            let lo = level_start(last.level - 1);
            let hi = level_start(last.level);
            push_supported(&self.path[lo..hi], k, last.x + k, &mut out, last.level);
        }
        let lo = level_start(last.level);
        push_supported(&self.path[lo..], k, i64::MIN, &mut out, last.level + 1);
        out
    }

    /// Moves to the next complete tower; false once exhausted.
    fn advance(&mut self) -> bool {
        if self.done {
            return false;
        }
        if !self.started {
            self.started = true;
            if self.path.len() >= self.n {
                return true;
            }
            let candidates = self.candidates();
            self.frames.push(Frame {
                candidates,
                next: 0,
            });
        } else {
            if self.frames.is_empty() {
                self.done = true;
                return false;
            }
            self.path.pop();
        }
        loop {
            let Some(top) = self.frames.last_mut() else {
                self.done = true;
                return false;
            };
            if top.next < top.candidates.len() {
                let blk = top.candidates[top.next];
                top.next += 1;
                self.path.push(blk);
                if self.path.len() == self.n {
                    return true;
                }
                let candidates = self.candidates();
                self.frames.push(Frame {
                    candidates,
                    next: 0,
                });
            } else {
                self.frames.pop();
                if self.frames.is_empty() {
                    self.done = true;
                    return false;
                }
                self.path.pop();
                debug_assert!(self.path.len() >= self.floor);
            }
        }
    }
}

/// Appends every `x >= min_x` on `level` whose block shares a column with one
/// of `below`, in increasing order.
fn push_supported(below: &[Block], k: i64, min_x: i64, out: &mut Vec<Block>, level: u32) {
    let mut next = min_x;
    for y in below {
        let lo = (y.x - k + 1).max(next);
        let hi = y.x + k - 1;
        for x in lo..=hi {
            out.push(Block::new(level, x));
        }
        next = next.max(hi + 1);
    }
}

/// Lazily yields every tower of the class, in lexicographic order.
pub struct TowerIter {
    walker: Walker,
}

impl Iterator for TowerIter {
    type Item = Tower;

    fn next(&mut self) -> Option<Tower> {
        if self.walker.advance() {
            Some(Tower::from_blocks_unchecked(
                self.walker.k,
                self.walker.path.iter().copied(),
            ))
        } else {
            None
        }
    }
}

fn base(p: TowerClassParams) -> Vec<Block> {
    (0..p.b).map(|i| Block::new(0, (i * p.k) as i64)).collect()
}

pub fn enumerate_towers(p: TowerClassParams) -> TowerIter {
    TowerIter {
        walker: Walker::new(p.k, p.n, base(p)),
    }
}

/// All towers with `n` blocks, grouped by base size `b = 1..=n`.
pub fn enumerate_all(k: usize, n: usize) -> impl Iterator<Item = Tower> {
    (1..=n).flat_map(move |b| enumerate_towers(TowerClassParams { k, n, b }))
}

fn count_walker(mut w: Walker) -> u64 {
    let mut count = 0;
    while w.advance() {
        count += 1;
    }
    count
}

/// Work units for parallel counting: one per choice of the first non-base
/// block. Their concatenation is the full stream.
fn partitions(p: TowerClassParams) -> Vec<Vec<Block>> {
    let root = Walker::new(p.k, p.n, base(p));
    if p.n == p.b {
        return vec![root.path];
    }
    root.candidates()
        .into_iter()
        .map(|first| {
            let mut prefix = root.path.clone();
            prefix.push(first);
            prefix
        })
        .collect()
}

/// Number of towers in the class, counted serially.
pub fn count_by_enumeration(p: TowerClassParams) -> BigInt {
    BigInt::from(count_walker(Walker::new(p.k, p.n, base(p))))
}

/// Same count, split across the rayon pool by first non-base block.
pub fn count_by_enumeration_parallel(p: TowerClassParams) -> BigInt {
    let total: u64 = partitions(p)
        .into_par_iter()
        .map(|prefix| count_walker(Walker::new(p.k, p.n, prefix)))
        .sum();
    BigInt::from(total)
}

/// The full stream re-assembled from the parallel work units, in order.
pub fn enumerate_towers_parallel(p: TowerClassParams) -> Vec<Tower> {
    partitions(p)
        .into_par_iter()
        .map(|prefix| {
            TowerIter {
                walker: Walker::new(p.k, p.n, prefix),
            }
            .collect::<Vec<_>>()
        })
        .collect::<Vec<_>>()
        .into_iter()
        .flatten()
        .collect()
}

#[cfg(test)]
mod tests {
    use std::collections::BTreeSet;

    use super::*;
    use crate::tower::validate;

    fn params(k: usize, n: usize, b: usize) -> TowerClassParams {
        TowerClassParams::new(k, n, b).unwrap()
    }

    #[test]
    fn domino_pairs() {
        let towers: Vec<Tower> = enumerate_towers(params(2, 2, 1)).collect();
        let tops: Vec<i64> = towers.iter().map(|t| t.blocks()[1].x).collect();
        assert_eq!(tops, vec![-1, 0, 1]);
    }

    #[test]
    fn single_block_and_base_only() {
        for k in 1..5 {
            assert_eq!(enumerate_towers(params(k, 1, 1)).count(), 1);
            assert_eq!(count_by_enumeration(params(k, 4, 4)), BigInt::from(1));
        }
    }

    #[test]
    fn small_counts() {
        assert_eq!(count_by_enumeration(params(2, 4, 2)), BigInt::from(21));
        assert_eq!(count_by_enumeration(params(3, 2, 1)), BigInt::from(5));
        assert_eq!(enumerate_all(2, 2).count(), 4);
        assert_eq!(enumerate_all(1, 3).count(), 4);
        assert_eq!(enumerate_all(3, 2).count(), 6);
    }

    #[test]
    fn stream_is_sorted_distinct_and_valid() {
        for k in 1..=3 {
            for n in 1..=5 {
                for b in 1..=n {
                    let towers: Vec<Tower> = enumerate_towers(params(k, n, b)).collect();
                    for w in towers.windows(2) {
                        assert!(w[0].blocks() < w[1].blocks());
                    }
                    for t in &towers {
                        assert!(validate(t).is_ok(), "{t}");
                        assert_eq!((t.n(), t.b()), (n, b));
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_matches_serial() {
        let p = params(3, 5, 2);
        let serial: Vec<Tower> = enumerate_towers(p).collect();
        assert_eq!(enumerate_towers_parallel(p), serial);
        assert_eq!(count_by_enumeration_parallel(p), BigInt::from(serial.len()));
    }

    /// Independent completeness oracle: grow every tower of size n - 1 by one
    /// block in every supported position and keep the valid results.
    #[test]
    fn completeness_against_growth_closure() {
        for k in 1..=3 {
            let mut level: BTreeSet<Tower> = BTreeSet::from([Tower::base_only(k, 1)]);
            for n in 2..=5 {
                let mut next = BTreeSet::new();
                for t in &level {
                    let lo = t.blocks().iter().map(|b| b.x).min().unwrap() - k as i64;
                    let hi = t.blocks().iter().map(|b| b.x).max().unwrap() + k as i64;
                    for x in lo..=hi {
                        for lvl in 0..=t.max_level() + 1 {
                            let mut blocks = t.blocks().to_vec();
                            blocks.push(Block::new(lvl, x));
                            let raw = blocks.iter().map(|b| (b.level as i64, b.x));
                            if let Ok(c) = Tower::normalize(k, raw) {
                                next.insert(c);
                            }
                        }
                    }
                }
                let enumerated: BTreeSet<Tower> = enumerate_all(k, n).collect();
                assert_eq!(next, enumerated, "k={k} n={n}");
                level = next;
            }
        }
    }

    #[test]
    fn rejects_bad_params() {
        assert!(TowerClassParams::new(0, 2, 1).is_err());
        assert!(TowerClassParams::new(2, 2, 3).is_err());
        assert!(TowerClassParams::new(2, 2, 0).is_err());
    }
}
