//! The reduction map from `(n, b)` towers to towers with one block fewer.
//!
//! Each tower falls into exactly one case:
//!
//! * **A**: the leftmost first-level block `L1` misses the base's leftmost
//!   column (or there is no first level) and `b >= 2`. Delete the leftmost
//!   base block.
//! * **Hang**: same geometry with `b = 1`. `L1` is then the only first-level
//!   block and hangs `h` columns to the right. Drop the base and lower
//!   everything by one level.
//! * **Composition**: `L1` covers the base's leftmost column. The overlaps
//!   `k0` (of `L1` with the base) and `k1, k2, ...` (of each rightmost block
//!   `R_i` with `R_{i-1}`, while it steps right) are accumulated up to the
//!   last index `j*` with `k0 + ... + k_j* <= k`. If the sum falls short by
//!   `s`, the base and `R_1..R_j*` slide `s` columns left beneath the rest.
//!   Then the overlapping cells of `L1, R_1..R_j*` are removed and their
//!   overhangs merge into a base of `b + j*` blocks. Everything else settles.
//!
//! A composition-case image of base size `b + j` has `C(k, j + 1)` preimages:
//! one per composition of `k` into `j + 1` parts and slide `0..parts[0]`.

use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::count::{binom, count_towers_closed};
use crate::enumerate::{enumerate_towers, TowerClassParams};
use crate::error::{Error, Result};
use crate::tower::{anchor, delete_block, grow_at, settle, validate, Block, Edit, Tower};

/// Overlap profile of a tower whose first level covers the base's left edge.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StaircaseProfile {
    /// Columns shared by `L1` and the leftmost base block.
    pub k0: usize,
    /// `k_1, k_2, ...`: overlaps of `R_i` with `R_{i-1}` while `R_i` steps
    /// strictly right. The first zero ends the list and is not stored.
    pub steps: Vec<usize>,
    pub j_star: usize,
}

impl StaircaseProfile {
    /// `k0 + k_1 + ... + k_j*`.
    pub fn covered(&self) -> usize {
        self.k0 + self.steps[..self.j_star].iter().sum::<usize>()
    }
}

/// Which preimage of a reduced tower a tower is.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum ReductionLabel {
    CaseA,
    CaseHang {
        h: usize,
    },
    CaseComposition {
        j: usize,
        parts: Vec<usize>,
        slide: usize,
    },
}

impl ReductionLabel {
    pub fn category(&self) -> Category {
        match self {
            ReductionLabel::CaseA => Category::A,
            ReductionLabel::CaseHang { .. } => Category::Hang,
            ReductionLabel::CaseComposition { j, .. } => Category::Composition(*j),
        }
    }
}

impl fmt::Display for ReductionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ReductionLabel::CaseA => write!(f, "A"),
            ReductionLabel::CaseHang { h } => write!(f, "hang(h={h})"),
            ReductionLabel::CaseComposition { j, parts, slide } => {
                write!(f, "composition(j={j}, parts={parts:?}, slide={slide})")
            }
        }
    }
}

/// Label kind without its fiber coordinate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Category {
    A,
    Hang,
    Composition(usize),
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Category::A => write!(f, "A"),
            Category::Hang => write!(f, "hang"),
            Category::Composition(j) => write!(f, "composition(j={j})"),
        }
    }
}

impl Serialize for Category {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

fn require_valid(t: &Tower) -> Result<()> {
    let v = validate(t);
    if v.is_ok() {
        Ok(())
    } else {
        Err(Error::InvalidTower(v.violations))
    }
}

/// `L1` when it covers column 0, i.e. the composition case applies.
fn left_edge_block(t: &Tower) -> Option<Block> {
    t.level(1).first().copied().filter(|l1| l1.x <= 0)
}

pub fn staircase_profile(t: &Tower) -> Result<StaircaseProfile> {
    let Some(l1) = left_edge_block(t) else {
        return Err(Error::Precondition(
            "staircase profile needs a first-level block over the base's left column".into(),
        ));
    };
    let k = t.k();
    let k0 = (l1.x + k as i64) as usize;
    let mut steps = Vec::new();
    let mut prev = *t.level(0).last().expect("valid tower has a base");
    for level in 1..=t.max_level() {
        let r = *t.level(level).last().expect("levels are contiguous");
        if r.x <= prev.x {
            break;
        }
        steps.push((prev.x + k as i64 - r.x) as usize);
        prev = r;
    }
    let mut covered = k0;
    let mut j_star = 0;
    while j_star < steps.len() && covered + steps[j_star] <= k {
        covered += steps[j_star];
        j_star += 1;
    }
    Ok(StaircaseProfile { k0, steps, j_star })
}

/// `R_1, ..., R_j`.
fn right_staircase(t: &Tower, j: usize) -> Vec<Block> {
    (1..=j as u32)
        .map(|l| *t.level(l).last().expect("staircase level"))
        .collect()
}

/// Slides the base and the right staircase `R_1..R_j*` by `s` columns to the
/// left (right for negative `s`), underneath every other block.
pub fn slide_group(t: &Tower, s: i64) -> Result<Edit> {
    let profile = staircase_profile(t)?;
    let moving = right_staircase(t, profile.j_star);
    let (mut group, rest): (Vec<Block>, Vec<Block>) = t
        .blocks()
        .iter()
        .partition(|b| b.level == 0 || moving.contains(b));
    for b in &mut group {
        b.x -= s;
    }
    group.extend(rest);
    let (tower, _) = anchor(t.k(), settle(t.k(), &group));
    let validation = validate(&tower);
    Ok(Edit { tower, validation })
}

/// Removes `L1, R_1..R_j` and turns their overhangs plus the old base into a
/// base of `b + j` blocks starting under `L1`. Requires the overlaps to sum to
/// exactly `k`.
fn merge_staircase(t: &Tower, j: usize) -> Tower {
    let k = t.k();
    let l1 = t.level(1)[0];
    let mut removed = right_staircase(t, j);
    removed.push(l1);
    let base_len = t.b() + j;
    let mut order: Vec<Block> = (0..base_len)
        .map(|i| Block::new(0, l1.x + (i * k) as i64))
        .collect();
    order.extend(
        t.blocks()
            .iter()
            .filter(|b| b.level > 0 && !removed.contains(b))
            .copied(),
    );
    anchor(k, settle(k, &order)).0
}

/// Result of [`reduce`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Reduction {
    pub tower: Tower,
    pub label: ReductionLabel,
}

pub fn reduce(t: &Tower) -> Result<Reduction> {
    require_valid(t)?;
    if t.n() < 2 {
        return Err(Error::Precondition(
            "a single block cannot be reduced".into(),
        ));
    }
    let k = t.k();
    let (tower, label) = match t.level(1).first() {
        Some(l1) if l1.x <= 0 => reduce_composition(t)?,
        Some(l1) if t.b() == 1 => {
            let lowered = t
                .blocks()
                .iter()
                .filter(|b| b.level > 0)
                .map(|b| Block::new(b.level - 1, b.x));
            let (tower, _) = anchor(k, lowered.collect());
            let h = l1.x as usize;
            (tower, ReductionLabel::CaseHang { h })
        }
        _ => {
            let edit = delete_block(t, Block::new(0, 0))?;
            (edit.tower, ReductionLabel::CaseA)
        }
    };
    let v = validate(&tower);
    if !v.is_ok() {
        return Err(Error::Internal(format!(
            "reducing {t} by {label} produced an invalid tower {tower}: {:?}",
            v.violations
        )));
    }
    Ok(Reduction { tower, label })
}

fn reduce_composition(t: &Tower) -> Result<(Tower, ReductionLabel)> {
    let k = t.k();
    let profile = staircase_profile(t)?;
    let j = profile.j_star;
    let slide = k - profile.covered();
    let slid = if slide > 0 {
        let edit = slide_group(t, slide as i64)?;
        if !edit.valid() {
            return Err(Error::Internal(format!(
                "sliding {t} by {slide} left the class: {:?}",
                edit.validation.violations
            )));
        }
        edit.tower
    } else {
        t.clone()
    };
    let after = staircase_profile(&slid)?;
    if after.covered() != k || after.j_star != j {
        return Err(Error::Internal(format!(
            "slide of {t} gave profile {after:?}, expected a full composition at j={j}"
        )));
    }
    let mut parts = vec![after.k0];
    parts.extend_from_slice(&after.steps[..j]);
    let tower = merge_staircase(&slid, j);
    Ok((tower, ReductionLabel::CaseComposition { j, parts, slide }))
}

/// Inverse of [`reduce`] for one fiber coordinate. Self-checking: the result
/// must reduce back to `(reduced, label)`.
pub fn expand(reduced: &Tower, label: &ReductionLabel) -> Result<Tower> {
    require_valid(reduced)?;
    let k = reduced.k();
    let tower = match label {
        ReductionLabel::CaseA => grow_at(reduced, -(k as i64), 0).edit.tower,
        ReductionLabel::CaseHang { h } => {
            if reduced.b() != 1 || *h == 0 || *h >= k {
                return Err(Error::Precondition(format!(
                    "hang label h={h} needs 1 <= h < k={k} and a single-block base"
                )));
            }
            let mut blocks: Vec<Block> = reduced
                .blocks()
                .iter()
                .map(|b| Block::new(b.level + 1, b.x))
                .collect();
            blocks.push(Block::new(0, -(*h as i64)));
            anchor(k, blocks).0
        }
        ReductionLabel::CaseComposition { j, parts, slide } => {
            expand_composition(reduced, *j, parts, *slide)?
        }
    };
    require_valid(&tower).map_err(|e| {
        Error::RoundTrip(format!(
            "expanding {reduced} by {label} is not a tower: {e}"
        ))
    })?;
    let back = reduce(&tower)?;
    if back.tower != *reduced || back.label != *label {
        return Err(Error::RoundTrip(format!(
            "expand({reduced}, {label}) = {tower} reduces to ({}, {})",
            back.tower, back.label
        )));
    }
    Ok(tower)
}

fn expand_composition(reduced: &Tower, j: usize, parts: &[usize], slide: usize) -> Result<Tower> {
    let k = reduced.k();
    if parts.len() != j + 1
        || parts.contains(&0)
        || parts.iter().sum::<usize>() != k
        || slide >= parts[0]
    {
        return Err(Error::Precondition(format!(
            "parts {parts:?} with slide {slide} is not a composition of {k} into {} parts",
            j + 1
        )));
    }
    if reduced.b() < j + 1 {
        return Err(Error::Precondition(format!(
            "base of {} blocks is too short for j={j}",
            reduced.b()
        )));
    }
    let b = reduced.b() - j;
    let ki = k as i64;
    let start = ki - parts[0] as i64 + slide as i64;
    let mut order: Vec<Block> = (0..b)
        .map(|i| Block::new(0, start + i as i64 * ki))
        .collect();
    order.push(Block::new(1, 0));
    let mut r = start + (b as i64 - 1) * ki;
    for (i, &p) in parts.iter().enumerate().skip(1) {
        r += ki - p as i64;
        order.push(Block::new(i as u32, r));
    }
    order.extend(reduced.blocks().iter().filter(|b| b.level > 0).copied());
    Ok(anchor(k, settle(k, &order)).0)
}

/// The four classes of domino (`k = 2`) towers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum DominoClass {
    A,
    B,
    C,
    D,
}

pub fn classify_domino(t: &Tower) -> Result<DominoClass> {
    if t.k() != 2 {
        return Err(Error::InvalidParams(format!(
            "domino classes need k = 2, got k = {}",
            t.k()
        )));
    }
    require_valid(t)?;
    let Some(l1) = t.level(1).first() else {
        return Ok(DominoClass::A);
    };
    Ok(match l1.x {
        x if x >= 1 => DominoClass::A,
        0 => DominoClass::B,
        _ => {
            let r1 = t.level(1).last().expect("non-empty level");
            let r0 = t.level(0).last().expect("non-empty base");
            if r1.x > r0.x {
                DominoClass::D
            } else {
                DominoClass::C
            }
        }
    })
}

/// Compositions of `total` into `parts` positive parts, lexicographically.
pub fn compositions(total: usize, parts: usize) -> Vec<Vec<usize>> {
    fn go(rest: usize, left: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if left == 0 {
            if rest == 0 {
                out.push(cur.clone());
            }
            return;
        }
        if rest < left {
            return;
        }
        for first in 1..=rest - (left - 1) {
            cur.push(first);
            go(rest - first, left - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    go(total, parts, &mut Vec::new(), &mut out);
    out
}

/// Checks that the first parts of all compositions of `k` into `j + 1`
/// positive parts add up to `C(k, j + 1)`.
pub fn composition_sum_check(k: usize, j: usize) -> Result<bool> {
    if k == 0 || j >= k {
        return Err(Error::InvalidParams(format!(
            "need 0 <= j < k, got k={k}, j={j}"
        )));
    }
    let total: usize = compositions(k, j + 1).iter().map(|c| c[0]).sum();
    Ok(binom(k as i64, j as i64 + 1) == total.into())
}

/// Every label of one category, i.e. one full fiber's worth.
pub fn labels(k: usize, category: Category) -> Vec<ReductionLabel> {
    match category {
        Category::A => vec![ReductionLabel::CaseA],
        Category::Hang => (1..k).map(|h| ReductionLabel::CaseHang { h }).collect(),
        Category::Composition(j) => compositions(k, j + 1)
            .into_iter()
            .flat_map(|parts| {
                (0..parts[0]).map(move |slide| ReductionLabel::CaseComposition {
                    j,
                    parts: parts.clone(),
                    slide,
                })
            })
            .collect(),
    }
}

/// Categories that occur for `(n, b)` towers, with their image base size.
pub fn categories(k: usize, n: usize, b: usize) -> Vec<(Category, usize)> {
    let mut out = Vec::new();
    if b >= 2 {
        out.push((Category::A, b - 1));
    }
    if b == 1 && k >= 2 {
        out.push((Category::Hang, 1));
    }
    for j in 0..k {
        if b + j < n {
            out.push((Category::Composition(j), b + j));
        }
    }
    out
}

/// Fiber sizes observed for one category of labels.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CategoryFibers {
    pub category: Category,
    pub image_b: usize,
    /// Number of `(n - 1, image_b)` towers.
    pub expected_images: u64,
    pub images: u64,
    pub expected_fiber: u64,
    /// fiber size -> number of images with that many preimages
    pub fiber_sizes: BTreeMap<u64, u64>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FiberReport {
    pub k: usize,
    pub n: usize,
    pub b: usize,
    pub towers: u64,
    pub categories: Vec<CategoryFibers>,
    pub unexpected: Vec<String>,
    pub round_trip_failures: Vec<String>,
    pub ok: bool,
}

/// Reduces every `(n, b)` tower, groups by image and label category, and
/// compares fiber sizes against `1`, `k - 1` and `C(k, j + 1)`. Every tower is
/// also expanded back from its label.
pub fn fiber_histogram(k: usize, n: usize, b: usize) -> Result<FiberReport> {
    let p = TowerClassParams::new(k, n, b)?;
    if n < 2 {
        return Err(Error::InvalidParams("fibers need n >= 2".into()));
    }
    let towers: Vec<Tower> = enumerate_towers(p).collect();
    let outcomes: Vec<std::result::Result<Reduction, String>> = towers
        .par_iter()
        .map(|t| {
            let red = reduce(t).map_err(|e| format!("{t}: {e}"))?;
            match expand(&red.tower, &red.label) {
                Ok(back) if back == *t => Ok(red),
                Ok(back) => Err(format!("{t}: expand gave {back}")),
                Err(e) => Err(format!("{t}: {e}")),
            }
        })
        .collect();

    let mut groups: BTreeMap<Category, BTreeMap<Tower, u64>> = BTreeMap::new();
    let mut round_trip_failures = Vec::new();
    for o in outcomes {
        match o {
            Ok(red) => {
                *groups
                    .entry(red.label.category())
                    .or_default()
                    .entry(red.tower)
                    .or_default() += 1;
            }
            Err(e) => round_trip_failures.push(e),
        }
    }

    let mut categories_out = Vec::new();
    for (category, image_b) in categories(k, n, b) {
        let expected_fiber = match category {
            Category::A => 1,
            Category::Hang => k as u64 - 1,
            Category::Composition(j) => u64::try_from(binom(k as i64, j as i64 + 1)).unwrap_or(0),
        };
        let expected_images = u64::try_from(count_towers_closed(TowerClassParams {
            k,
            n: n - 1,
            b: image_b,
        }))
        .unwrap_or(0);
        let fibers = groups.remove(&category).unwrap_or_default();
        let mut fiber_sizes = BTreeMap::new();
        let mut class_ok = true;
        for (image, size) in &fibers {
            *fiber_sizes.entry(*size).or_default() += 1;
            class_ok &= image.b() == image_b && image.n() == n - 1 && *size == expected_fiber;
        }
        let images = fibers.len() as u64;
        class_ok &= images == expected_images;
        categories_out.push(CategoryFibers {
            category,
            image_b,
            expected_images,
            images,
            expected_fiber,
            fiber_sizes,
            ok: class_ok,
        });
    }
    let unexpected: Vec<String> = groups
        .into_iter()
        .map(|(c, f)| format!("category {c} produced {} images", f.len()))
        .collect();
    let ok = round_trip_failures.is_empty()
        && unexpected.is_empty()
        && categories_out.iter().all(|c| c.ok);
    Ok(FiberReport {
        k,
        n,
        b,
        towers: towers.len() as u64,
        categories: categories_out,
        unexpected,
        round_trip_failures,
        ok,
    })
}
