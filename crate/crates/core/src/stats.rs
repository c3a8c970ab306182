//! Reduction statistics of a corpus: candidate erasers, graph size and the
//! negative count before and after reduction.

use serde::Serialize;

use crate::bounds::nk_worst_case_optimal;
use crate::builder::{build_account, BuildConfig, BuildInput, Mode};
use crate::eraser::plan_reduction;
use crate::error::Result;
use crate::keyword::Keyword;
use crate::rules::RuleSet;

/// Ratios the reference experiments observed, printed for comparison only.
pub const REFERENCE_RATIO_BAND: (f64, f64) = (0.24, 0.35);

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReduceStats {
    pub n: usize,
    pub m: usize,
    pub m_prime: usize,
    /// Closed-form count for k = √n equal groups.
    #[serde(rename = "NK")]
    pub nk: u64,
    /// Negatives literally present in the naive build.
    pub total_negatives_naive: usize,
    pub neras: usize,
    pub ntrans: usize,
    /// Keywords covered by the selected color class.
    pub covered: usize,
    pub k: usize,
    pub group_sizes: Vec<usize>,
    /// Negatives literally present in the reduced build.
    pub h: usize,
    pub h_over_nk: f64,
    /// h over the naive literal count.
    pub ratio: f64,
}

pub fn reduce_stats(rules: &RuleSet, brands: &[Keyword], non_brands: &[Keyword], config: &BuildConfig) -> Result<ReduceStats> {
    let reduced_cfg = BuildConfig { mode: Mode::Reduced, ..config.clone() };
    let naive_cfg = BuildConfig { mode: Mode::Naive, ..config.clone() };
    let reduced = build_account(&BuildInput::new(rules.clone(), brands.to_vec(), non_brands.to_vec(), reduced_cfg.clone()))?;
    let naive = build_account(&BuildInput::new(rules.clone(), brands.to_vec(), non_brands.to_vec(), naive_cfg))?;
    let plan = plan_reduction(&rules.keywords(), &reduced_cfg.reduction())?;
    let n = rules.len();
    let nk = nk_worst_case_optimal(n as u64, brands.len() as u64, non_brands.len() as u64).rounded;
    let h = reduced.negative_count();
    let naive_count = naive.negative_count();
    Ok(ReduceStats {
        n,
        m: brands.len(),
        m_prime: non_brands.len(),
        nk,
        total_negatives_naive: naive_count,
        neras: plan.graph.node_count(),
        ntrans: plan.graph.edge_count(),
        covered: plan.class.covered.len(),
        k: reduced.partition.len(),
        group_sizes: reduced.partition.iter().map(|g| g.keywords.len()).collect(),
        h,
        h_over_nk: h as f64 / nk.max(1) as f64,
        ratio: h as f64 / naive_count.max(1) as f64,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::Rule;
    use crate::synth::{generate, SyntheticSpec};

    #[test]
    fn single_rule() {
        let rules = RuleSet::from_rules([Rule::parse("shoes", 1, &["a"]).unwrap()]).unwrap();
        let s = reduce_stats(&rules, &[], &[], &BuildConfig::default()).unwrap();
        assert_eq!((s.n, s.neras, s.ntrans, s.k), (1, 0, 0, 1));
        // C1 blocks the keyword, C3-1 has nothing to block
        assert_eq!(s.h, 1);
        assert_eq!(s.h, s.total_negatives_naive);
        assert_eq!(s.nk, 2);
    }

    #[test]
    fn reduction_helps_with_reuse() {
        let c = generate(&SyntheticSpec::matrix(300, 1)).unwrap();
        let s = reduce_stats(&c.rules, &c.brands, &c.non_brands, &BuildConfig::default()).unwrap();
        assert!(s.h < s.total_negatives_naive, "{s:?}");
        assert!(s.ratio < 1.0);
        assert_eq!(s.group_sizes.iter().sum::<usize>(), 300);
    }
}
