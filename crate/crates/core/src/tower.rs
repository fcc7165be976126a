//! Towers of horizontal `k`-blocks.
//!
//! A tower is stored as its sorted block list. The heap order between blocks
//! is never materialized: `y` lies below `x` exactly when a chain of
//! [`support_set`] steps leads from `x` down to `y`.
//!
//! Every operation here is pure. Operations that may leave the class of
//! towers ([`delete_block`], [`grow_at`]) return the result together with its
//! [`Validation`] instead of failing.

use std::collections::{BTreeSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One `k`-block: it covers columns `x..x + k` at height `level`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(from = "(u32, i64)", into = "(u32, i64)")]
pub struct Block {
    pub level: u32,
    pub x: i64,
}

impl Block {
    pub const fn new(level: u32, x: i64) -> Self {
        Block { level, x }
    }

    /// True when the column ranges of two width-`k` blocks intersect.
    #[inline]
    pub fn shares_column(self, other: Block, k: usize) -> bool {
        (self.x - other.x).abs() < k as i64
    }

    pub fn last_column(self, k: usize) -> i64 {
        self.x + k as i64 - 1
    }

    fn shifted(self, dx: i64) -> Block {
        Block::new(self.level, self.x + dx)
    }
}

impl From<(u32, i64)> for Block {
    fn from((level, x): (u32, i64)) -> Self {
        Block::new(level, x)
    }
}

impl From<Block> for (u32, i64) {
    fn from(b: Block) -> Self {
        (b.level, b.x)
    }
}

impl fmt::Display for Block {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.level, self.x)
    }
}

/// A finite set of `k`-blocks, sorted by `(level, x)`.
///
/// Values built through [`Tower::new`], [`Tower::normalize`] or parsing are
/// valid and normalized. [`Tower::from_blocks_unchecked`] admits arbitrary
/// candidate data so that [`validate`] has something to reject.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Tower {
    k: usize,
    blocks: Vec<Block>,
}

impl Tower {
    /// Builds a tower from already-normalized blocks, rejecting invalid data.
    pub fn new(k: usize, blocks: impl IntoIterator<Item = Block>) -> Result<Tower> {
        let t = Tower::from_blocks_unchecked(k, blocks);
        let v = validate(&t);
        if v.is_ok() {
            Ok(t)
        } else {
            Err(Error::InvalidTower(v.violations))
        }
    }

    /// Sorts the blocks but checks nothing.
    pub fn from_blocks_unchecked(k: usize, blocks: impl IntoIterator<Item = Block>) -> Tower {
        let mut blocks: Vec<Block> = blocks.into_iter().collect();
        blocks.sort_unstable();
        Tower { k, blocks }
    }

    /// Translates `(level, x)` pairs so the lowest level becomes 0 and the
    /// leftmost block on it starts at column 0, then validates.
    pub fn normalize(k: usize, raw: impl IntoIterator<Item = (i64, i64)>) -> Result<Tower> {
        let raw: Vec<(i64, i64)> = raw.into_iter().collect();
        let Some(min_level) = raw.iter().map(|&(l, _)| l).min() else {
            return Err(Error::InvalidTower(vec![Violation::Empty]));
        };
        let dx = raw
            .iter()
            .filter(|&&(l, _)| l == min_level)
            .map(|&(_, x)| x)
            .min()
            .unwrap_or(0);
        let mut blocks = Vec::with_capacity(raw.len());
        for (l, x) in raw {
            let level = u32::try_from(l - min_level)
                .map_err(|_| Error::InvalidParams(format!("level {l} out of range")))?;
            blocks.push(Block::new(level, x - dx));
        }
        Tower::new(k, blocks)
    }

    /// The tower consisting of `b` base blocks only.
    pub fn base_only(k: usize, b: usize) -> Tower {
        Tower::from_blocks_unchecked(k, (0..b).map(|i| Block::new(0, (i * k) as i64)))
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    /// Number of blocks.
    pub fn n(&self) -> usize {
        self.blocks.len()
    }

    /// Number of base (level 0) blocks.
    pub fn b(&self) -> usize {
        self.level(0).len()
    }

    pub fn max_level(&self) -> u32 {
        self.blocks.last().map_or(0, |b| b.level)
    }

    /// Blocks on one level, left to right.
    pub fn level(&self, level: u32) -> &[Block] {
        let lo = self.blocks.partition_point(|b| b.level < level);
        let hi = self.blocks.partition_point(|b| b.level <= level);
        &self.blocks[lo..hi]
    }

    pub fn contains(&self, blk: Block) -> bool {
        self.blocks.binary_search(&blk).is_ok()
    }

    /// Interchange form `{"k":K,"blocks":[[level,x],...]}`.
    pub fn to_json(&self) -> String {
        serde_json::to_string(&TowerJson {
            k: self.k,
            blocks: self.blocks.clone(),
        })
        .expect("tower serialization is infallible")
    }

    /// Parses the interchange form, re-normalizing and re-validating.
    pub fn from_json(text: &str) -> Result<Tower> {
        let raw: RawTowerJson =
            serde_json::from_str(text).map_err(|e| Error::Json(e.to_string()))?;
        Tower::normalize(raw.k, raw.blocks)
    }
}

impl fmt::Display for Tower {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_json())
    }
}

#[derive(Serialize)]
struct TowerJson {
    k: usize,
    blocks: Vec<Block>,
}

#[derive(Deserialize)]
struct RawTowerJson {
    k: usize,
    blocks: Vec<(i64, i64)>,
}

/// One broken tower invariant.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    ZeroWidth,
    Empty,
    DuplicateBlock { block: Block },
    Overlap { left: Block, right: Block },
    MissingBase,
    BaseNotAnchored { leftmost: i64 },
    BaseGap { left: Block, right: Block },
    Unsupported { block: Block },
    GravityMismatch { block: Block, settled: u32 },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::ZeroWidth => write!(f, "block width is zero"),
            Violation::Empty => write!(f, "tower has no blocks"),
            Violation::DuplicateBlock { block } => write!(f, "duplicate block {block}"),
            Violation::Overlap { left, right } => write!(f, "blocks {left} and {right} overlap"),
            Violation::MissingBase => write!(f, "no block on level 0"),
            Violation::BaseNotAnchored { leftmost } => {
                write!(f, "base starts at column {leftmost}, not 0")
            }
            Violation::BaseGap { left, right } => {
                write!(f, "non-contiguous base between {left} and {right}")
            }
            Violation::Unsupported { block } => write!(f, "unsupported block {block}"),
            Violation::GravityMismatch { block, settled } => {
                write!(f, "block {block} would settle on level {settled}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize)]
pub struct Validation {
    pub violations: Vec<Violation>,
}

impl Validation {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks every tower invariant and reports each violation found.
pub fn validate(t: &Tower) -> Validation {
    let mut violations = Vec::new();
    let k = t.k;
    if k == 0 {
        violations.push(Violation::ZeroWidth);
    }
    if t.blocks.is_empty() {
        violations.push(Violation::Empty);
        return Validation { violations };
    }

    for w in t.blocks.windows(2) {
        if w[0] == w[1] {
            violations.push(Violation::DuplicateBlock { block: w[0] });
        } else if w[0].level == w[1].level && k > 0 && w[0].shares_column(w[1], k) {
            violations.push(Violation::Overlap {
                left: w[0],
                right: w[1],
            });
        }
    }

    let base = t.level(0);
    match base.first() {
        None => violations.push(Violation::MissingBase),
        Some(first) => {
            if first.x != 0 {
                violations.push(Violation::BaseNotAnchored { leftmost: first.x });
            }
            for w in base.windows(2) {
                if w[1].x != w[0].x + k as i64 {
                    violations.push(Violation::BaseGap {
                        left: w[0],
                        right: w[1],
                    });
                }
            }
        }
    }

    if k > 0 {
        for &blk in &t.blocks {
            if blk.level == 0 {
                continue;
            }
            let below = t.level(blk.level - 1);
            if !below.iter().any(|&y| y.shares_column(blk, k)) {
                violations.push(Violation::Unsupported { block: blk });
            }
        }
        let order: Vec<Block> = t.blocks.clone();
        for (blk, settled) in order.iter().zip(settle(k, &order)) {
            if settled.level != blk.level {
                violations.push(Violation::GravityMismatch {
                    block: *blk,
                    settled: settled.level,
                });
            }
        }
    }
    Validation { violations }
}

/// Drops the blocks one after another at their columns. Each comes to rest
/// one level above the highest earlier block sharing a column, or on level 0.
pub(crate) fn settle(k: usize, order: &[Block]) -> Vec<Block> {
    let mut placed: Vec<Block> = Vec::with_capacity(order.len());
    for blk in order {
        let level = placed
            .iter()
            .filter(|p| p.shares_column(*blk, k))
            .map(|p| p.level + 1)
            .max()
            .unwrap_or(0);
        placed.push(Block::new(level, blk.x));
    }
    placed
}

/// Translates so the leftmost level-0 block starts at column 0. Returns the
/// tower and the applied column offset.
pub(crate) fn anchor(k: usize, blocks: Vec<Block>) -> (Tower, i64) {
    let dx = blocks
        .iter()
        .filter(|b| b.level == 0)
        .map(|b| b.x)
        .min()
        .or_else(|| blocks.iter().map(|b| b.x).min())
        .map_or(0, |m| -m);
    let t = Tower::from_blocks_unchecked(k, blocks.into_iter().map(|b| b.shifted(dx)));
    (t, dx)
}

/// Output of an operation that may leave the class of valid towers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edit {
    pub tower: Tower,
    pub validation: Validation,
}

impl Edit {
    pub fn valid(&self) -> bool {
        self.validation.is_ok()
    }

    fn of(tower: Tower) -> Edit {
        let validation = validate(&tower);
        Edit { tower, validation }
    }
}

/// Blocks one level down that share a column with `blk`.
pub fn support_set(t: &Tower, blk: Block) -> Result<Vec<Block>> {
    if !t.contains(blk) {
        return Err(Error::BlockNotFound(blk));
    }
    if blk.level == 0 {
        return Ok(Vec::new());
    }
    Ok(t.level(blk.level - 1)
        .iter()
        .copied()
        .filter(|y| y.shares_column(blk, t.k))
        .collect())
}

/// Heap order: true when a chain of support steps leads from `x` down to `y`.
pub fn supports(t: &Tower, y: Block, x: Block) -> Result<bool> {
    if !t.contains(y) {
        return Err(Error::BlockNotFound(y));
    }
    let mut frontier = vec![x];
    let mut seen = BTreeSet::new();
    while let Some(cur) = frontier.pop() {
        for s in support_set(t, cur)? {
            if s == y {
                return Ok(true);
            }
            if s.level > y.level && seen.insert(s) {
                frontier.push(s);
            }
        }
    }
    Ok(false)
}

/// Re-levels everything except `t.blocks[skip]`, in original order.
fn settle_without(t: &Tower, skip: usize) -> Vec<Block> {
    let rest: Vec<Block> = t
        .blocks
        .iter()
        .enumerate()
        .filter(|&(i, _)| i != skip)
        .map(|(_, b)| *b)
        .collect();
    settle(t.k, &rest)
}

fn index_of(t: &Tower, blk: Block) -> Result<usize> {
    t.blocks
        .binary_search(&blk)
        .map_err(|_| Error::BlockNotFound(blk))
}

/// True when deleting `y` makes `x` fall at least one level.
pub fn completely_supports(t: &Tower, y: Block, x: Block) -> Result<bool> {
    let iy = index_of(t, y)?;
    let ix = index_of(t, x)?;
    if ix == iy {
        return Err(Error::Precondition(format!("{x} cannot support itself")));
    }
    let settled = settle_without(t, iy);
    let pos = if ix < iy { ix } else { ix - 1 };
    Ok(settled[pos].level < x.level)
}

/// Removes `blk`; blocks it completely supported fall under gravity.
pub fn delete_block(t: &Tower, blk: Block) -> Result<Edit> {
    let i = index_of(t, blk)?;
    let (tower, _) = anchor(t.k, settle_without(t, i));
    Ok(Edit::of(tower))
}

/// Result of [`grow_at`]: the new tower plus where the inserted block ended
/// up after normalization.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Grown {
    pub edit: Edit,
    pub inserted: Block,
}

impl Grown {
    pub fn valid(&self) -> bool {
        self.edit.valid()
    }
}

/// Inserts a block at columns `x0..x0 + k` on `level`, lifting every block
/// it would collide with together with everything those blocks support.
pub fn grow_at(t: &Tower, x0: i64, level: u32) -> Grown {
    let k = t.k;
    let new = Block::new(level, x0);
    let mut lifted = vec![false; t.blocks.len()];
    let mut queue: VecDeque<usize> = t
        .blocks
        .iter()
        .enumerate()
        .filter(|(_, b)| b.level == level && b.shares_column(new, k))
        .map(|(i, _)| i)
        .collect();
    for &i in &queue {
        lifted[i] = true;
    }
    while let Some(i) = queue.pop_front() {
        let cur = t.blocks[i];
        for (j, above) in t.blocks.iter().enumerate() {
            if !lifted[j] && above.level == cur.level + 1 && above.shares_column(cur, k) {
                lifted[j] = true;
                queue.push_back(j);
            }
        }
    }
    let mut blocks: Vec<Block> = t
        .blocks
        .iter()
        .zip(&lifted)
        .map(|(b, &up)| if up { Block::new(b.level + 1, b.x) } else { *b })
        .collect();
    blocks.push(new);
    let (tower, dx) = anchor(k, blocks);
    Grown {
        edit: Edit::of(tower),
        inserted: new.shifted(dx),
    }
}

/// Unit cells `(column, level)` covered by the tower.
pub fn cells(t: &Tower) -> BTreeSet<(i64, u32)> {
    t.blocks
        .iter()
        .flat_map(|b| (b.x..b.x + t.k as i64).map(move |c| (c, b.level)))
        .collect()
}

/// Rebuilds the block set from a cell set by tiling each horizontal run.
pub fn from_cells(k: usize, cells: &BTreeSet<(i64, u32)>) -> Result<Tower> {
    if k == 0 {
        return Err(Error::InvalidParams("k must be positive".into()));
    }
    let mut by_row: Vec<(u32, i64)> = cells.iter().map(|&(c, l)| (l, c)).collect();
    by_row.sort_unstable();
    let mut blocks = Vec::new();
    let mut i = 0;
    while i < by_row.len() {
        let (level, start) = by_row[i];
        let mut j = i + 1;
        while j < by_row.len() && by_row[j].0 == level && by_row[j].1 == by_row[j - 1].1 + 1 {
            j += 1;
        }
        let len = j - i;
        if len % k != 0 {
            return Err(Error::InvalidParams(format!(
                "run of {len} cells at level {level} is not a multiple of {k}"
            )));
        }
        blocks.extend((0..len / k).map(|m| Block::new(level, start + (m * k) as i64)));
        i = j;
    }
    Tower::new(k, blocks)
}

/// Text picture: top level first, `#` for cells, `.` for gaps.
pub fn render_ascii(t: &Tower) -> String {
    let k = t.k as i64;
    let (Some(lo), Some(hi)) = (
        t.blocks.iter().map(|b| b.x).min(),
        t.blocks.iter().map(|b| b.x + k - 1).max(),
    ) else {
        return String::new();
    };
    let width = (hi - lo + 1) as usize;
    let mut rows = Vec::new();
    for level in (0..=t.max_level()).rev() {
        let mut row = vec![b'.'; width];
        for b in t.level(level) {
            for c in b.x..b.x + k {
                row[(c - lo) as usize] = b'#';
            }
        }
        rows.push(String::from_utf8(row).expect("ascii"));
    }
    rows.join("\n")
}
