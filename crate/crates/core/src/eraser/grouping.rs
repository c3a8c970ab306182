use super::{Eraser, EraserImage};
use crate::error::{Error, Result};
use crate::keyword::Keyword;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlannedGroup {
    /// Keywords of the group, in rule order.
    pub keywords: Vec<Keyword>,
    /// Erasers placed in the group, in placement order. Their images are
    /// disjoint and their union is exactly `keywords`.
    pub erasers: Vec<Eraser>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupPlan {
    pub groups: Vec<PlannedGroup>,
    /// Number of keywords not covered by the selected large erasers, each
    /// handled by an exact eraser.
    pub exact_fill: usize,
}

impl GroupPlan {
    pub fn largest_group(&self) -> usize {
        self.groups.iter().map(|g| g.keywords.len()).max().unwrap_or(0)
    }
}

/// Pack the selected large erasers, plus one exact eraser per uncovered
/// keyword, into groups of at most `target` keywords.
///
/// Starts from ceil(n / target) empty groups. Large erasers go first (bigger
/// image first, then earliest keyword), then exact erasers in keyword order.
/// Each one lands in the group with the lowest load that can still hold it,
/// ties broken by lower large-eraser load and then lower index; a new group is
/// opened when none fits.
pub fn make_group_plan(sk: &[Keyword], selected: &[EraserImage], target: usize) -> Result<GroupPlan> {
    if target == 0 {
        return Err(Error::NonPositive { what: "target_size" });
    }
    let n = sk.len();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (e, img) in selected.iter().enumerate() {
        if img.size() > target {
            return Err(Error::InfeasibleTarget { target, largest: img.size() });
        }
        for &p in &img.image {
            if p >= n {
                return Err(Error::InvalidAccount(format!("eraser {} points past the keyword list", img.eraser)));
            }
            if owner[p].is_some() {
                return Err(Error::OverlappingImages(sk[p].render()));
            }
            owner[p] = Some(e);
        }
    }

    let mut large: Vec<&EraserImage> = selected.iter().collect();
    large.sort_by_key(|img| (std::cmp::Reverse(img.size()), img.image.first().copied()));
    let mut fill: Vec<usize> = (0..n).filter(|&p| owner[p].is_none()).collect();
    fill.sort_by(|&a, &b| sk[a].cmp(&sk[b]));
    let exact_fill = fill.len();

    struct Bin {
        positions: Vec<usize>,
        erasers: Vec<Eraser>,
        large_load: usize,
    }
    let k = n.div_ceil(target);
    let mut bins: Vec<Bin> = (0..k).map(|_| Bin { positions: Vec::new(), erasers: Vec::new(), large_load: 0 }).collect();

    let items = large
        .into_iter()
        .map(|img| (img.eraser.clone(), img.image.clone()))
        .chain(fill.into_iter().map(|p| (Eraser::Exact(sk[p].clone()), vec![p])));
    for (eraser, image) in items {
        let size = image.len();
        let slot = bins
            .iter()
            .enumerate()
            .filter(|(_, b)| b.positions.len() + size <= target)
            .min_by_key(|(i, b)| (b.positions.len(), b.large_load, *i))
            .map(|(i, _)| i);
        let i = slot.unwrap_or_else(|| {
            bins.push(Bin { positions: Vec::new(), erasers: Vec::new(), large_load: 0 });
            bins.len() - 1
        });
        let bin = &mut bins[i];
        if !eraser.is_exact() {
            bin.large_load += size;
        }
        bin.positions.extend(image);
        bin.erasers.push(eraser);
    }

    let groups = bins
        .into_iter()
        .filter(|b| !b.positions.is_empty())
        .map(|mut b| {
            b.positions.sort_unstable();
            PlannedGroup { keywords: b.positions.iter().map(|&p| sk[p].clone()).collect(), erasers: b.erasers }
        })
        .collect();
    Ok(GroupPlan { groups, exact_fill })
}
