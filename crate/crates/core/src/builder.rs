//! Compile a rule set and brand lists into the three-level account.
//!
//! C1 (High) filters SK, sold and non-sold brands and lands everything else in
//! a catch-all AdGroup. C2 (Medium) filters SK and non-sold brands and routes
//! branded queries to one AdGroup per sold brand. Each C3 campaign (Low) serves
//! one group of the keyword partition: its negatives block the keywords of all
//! other groups, and inside it each keyword has its own AdGroup.

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::account::{
    c3_name, AdGroup, AdGroupTag, Account, Campaign, CampaignTag, Group, GroupErasers, Priority, ProductTree,
    DEFAULT_LIMIT,
};
use crate::eraser::{ceil_sqrt, plan_reduction, ColoringOrder, Eraser, ReductionConfig, DEFAULT_MAX_WORDS};
use crate::error::{Error, Result};
use crate::keyword::{Keyword, NegativeKeyword};
use crate::rules::{Money, RuleSet};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// C3 campaigns block other groups with one exact negative per keyword.
    Naive,
    /// C3 campaigns block other groups with their erasers.
    #[default]
    Reduced,
}

impl FromStr for Mode {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "naive" => Ok(Mode::Naive),
            "reduced" => Ok(Mode::Reduced),
            other => Err(format!("unknown mode {other:?} (expected naive or reduced)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BuildConfig {
    pub mode: Mode,
    pub max_words: usize,
    pub max_image: Option<usize>,
    pub target_size: Option<usize>,
    pub limit: usize,
    pub order: ColoringOrder,
    /// Bid of default trees; the lowest rule CPC when absent.
    pub default_bid: Option<Money>,
}

impl Default for BuildConfig {
    fn default() -> Self {
        BuildConfig {
            mode: Mode::default(),
            max_words: DEFAULT_MAX_WORDS,
            max_image: None,
            target_size: None,
            limit: DEFAULT_LIMIT,
            order: ColoringOrder::default(),
            default_bid: None,
        }
    }
}

impl BuildConfig {
    pub fn naive() -> Self {
        BuildConfig { mode: Mode::Naive, ..Self::default() }
    }

    pub fn reduced() -> Self {
        BuildConfig { mode: Mode::Reduced, ..Self::default() }
    }

    pub fn reduction(&self) -> ReductionConfig {
        ReductionConfig { max_words: self.max_words, max_image: self.max_image, target_size: self.target_size, order: self.order }
    }
}

#[derive(Clone, Debug, Default)]
pub struct BuildInput {
    pub rules: RuleSet,
    pub brands: Vec<Keyword>,
    pub non_brands: Vec<Keyword>,
    pub brand_trees: BTreeMap<Keyword, ProductTree>,
    pub config: BuildConfig,
}

impl BuildInput {
    pub fn new(rules: RuleSet, brands: Vec<Keyword>, non_brands: Vec<Keyword>, config: BuildConfig) -> Self {
        BuildInput { rules, brands, non_brands, brand_trees: BTreeMap::new(), config }
    }

    pub fn validate(&self) -> Result<()> {
        if self.rules.is_empty() {
            return Err(Error::EmptyRuleSet);
        }
        if self.config.limit == 0 {
            return Err(Error::NonPositive { what: "limit" });
        }
        if self.config.max_words == 0 {
            return Err(Error::NonPositive { what: "max_words" });
        }
        if self.config.max_image == Some(0) {
            return Err(Error::NonPositive { what: "max_image" });
        }
        if self.config.target_size == Some(0) {
            return Err(Error::NonPositive { what: "target_size" });
        }
        let sold: BTreeSet<&Keyword> = self.brands.iter().collect();
        if let Some(b) = self.non_brands.iter().find(|b| sold.contains(b)) {
            return Err(Error::BrandOverlap(b.render()));
        }
        for r in self.rules.rules() {
            check_non_sold(&r.keyword, &self.non_brands)?;
        }
        Ok(())
    }

    fn default_bid(&self) -> Money {
        self.config
            .default_bid
            .or_else(|| self.rules.rules().iter().map(|r| r.cpc).min())
            .unwrap_or_default()
    }
}

/// A keyword containing a non-sold brand is blocked by every campaign.
pub(crate) fn check_non_sold(keyword: &Keyword, non_brands: &[Keyword]) -> Result<()> {
    match non_brands.iter().find(|b| keyword.contains_phrase(b)) {
        Some(b) => Err(Error::KeywordContainsNonSoldBrand { keyword: keyword.render(), brand: b.render() }),
        None => Ok(()),
    }
}

pub(crate) fn check_limit(owner: &str, negatives: &BTreeSet<NegativeKeyword>, limit: usize) -> Result<()> {
    if negatives.len() > limit {
        return Err(Error::LimitExceeded { owner: owner.to_string(), count: negatives.len(), limit });
    }
    Ok(())
}

pub(crate) fn check_campaign_limits(c: &Campaign, limit: usize) -> Result<()> {
    check_limit(&c.name, &c.negatives, limit)?;
    for a in &c.adgroups {
        check_limit(&format!("{} / {}", c.name, a.name), &a.negatives, limit)?;
    }
    Ok(())
}

fn phrases(brands: &[Keyword]) -> impl Iterator<Item = NegativeKeyword> + '_ {
    brands.iter().cloned().map(NegativeKeyword::phrase)
}

pub fn build_c1(input: &BuildInput) -> Result<Campaign> {
    input.validate()?;
    let mut negatives: BTreeSet<NegativeKeyword> = input.rules.keywords().into_iter().map(NegativeKeyword::exact).collect();
    negatives.extend(phrases(&input.brands));
    negatives.extend(phrases(&input.non_brands));
    let c = Campaign {
        name: "C1".into(),
        priority: Priority::High,
        tag: CampaignTag::C1,
        negatives,
        adgroups: vec![AdGroup {
            name: "catch-all".into(),
            tag: AdGroupTag::CatchAll,
            negatives: BTreeSet::new(),
            tree: ProductTree::leaf(input.default_bid()),
        }],
    };
    check_campaign_limits(&c, input.config.limit)?;
    Ok(c)
}

/// `None` when there are no sold brands.
pub fn build_c2(input: &BuildInput) -> Result<Option<Campaign>> {
    input.validate()?;
    if input.brands.is_empty() {
        return Ok(None);
    }
    let mut negatives: BTreeSet<NegativeKeyword> = input.rules.keywords().into_iter().map(NegativeKeyword::exact).collect();
    negatives.extend(phrases(&input.non_brands));
    let adgroups = input
        .brands
        .iter()
        .map(|b| AdGroup {
            name: b.render(),
            tag: AdGroupTag::BrandTarget(b.clone()),
            negatives: phrases(&input.brands).filter(|n| &n.keyword != b).collect(),
            tree: input.brand_trees.get(b).cloned().unwrap_or_else(|| ProductTree::leaf(input.default_bid())),
        })
        .collect();
    let c = Campaign { name: "C2".into(), priority: Priority::Medium, tag: CampaignTag::C2, negatives, adgroups };
    check_campaign_limits(&c, input.config.limit)?;
    Ok(Some(c))
}

/// Partition SK and attach erasers to each group, numbered from 1.
pub fn plan_groups(input: &BuildInput) -> Result<(Vec<Group>, Vec<GroupErasers>)> {
    input.validate()?;
    let sk = input.rules.keywords();
    let groups: Vec<(Vec<Keyword>, Vec<Eraser>)> = match input.config.mode {
        Mode::Naive => {
            let mut sorted = sk.clone();
            sorted.sort();
            let target = input.config.target_size.unwrap_or_else(|| ceil_sqrt(sorted.len()));
            balanced_chunks(&sorted, target)
                .into_iter()
                .map(|ks| {
                    let es = ks.iter().cloned().map(Eraser::Exact).collect();
                    (ks, es)
                })
                .collect()
        }
        Mode::Reduced => {
            let plan = plan_reduction(&sk, &input.config.reduction())?;
            plan.plan.groups.into_iter().map(|g| (g.keywords, g.erasers)).collect()
        }
    };
    let mut partition = Vec::new();
    let mut erasers = Vec::new();
    for (i, (keywords, es)) in groups.into_iter().enumerate() {
        partition.push(Group { group: i + 1, keywords });
        erasers.push(GroupErasers { group: i + 1, erasers: es });
    }
    Ok((partition, erasers))
}

/// ceil(len / target) chunks whose sizes differ by at most one.
fn balanced_chunks(items: &[Keyword], target: usize) -> Vec<Vec<Keyword>> {
    let k = items.len().div_ceil(target).max(1);
    let (base, extra) = (items.len() / k, items.len() % k);
    let mut out = Vec::with_capacity(k);
    let mut start = 0;
    for i in 0..k {
        let len = base + usize::from(i < extra);
        out.push(items[start..start + len].to_vec());
        start += len;
    }
    out
}

/// Negatives of the C3 campaign for `group`: every other group's erasers plus
/// the non-sold brands as phrases.
pub fn c3_negatives(group: usize, erasers: &[GroupErasers], non_brands: &[Keyword]) -> BTreeSet<NegativeKeyword> {
    let mut negs: BTreeSet<NegativeKeyword> = erasers
        .iter()
        .filter(|g| g.group != group)
        .flat_map(|g| g.erasers.iter().map(Eraser::to_negative))
        .collect();
    negs.extend(phrases(non_brands));
    negs
}

/// AdGroup for keyword `l` of a C3 group: blocks its siblings exactly.
pub fn rule_adgroup(l: &Keyword, siblings: &[Keyword], bid: Money) -> AdGroup {
    AdGroup {
        name: l.render(),
        tag: AdGroupTag::RuleTarget(l.clone()),
        negatives: siblings.iter().filter(|s| *s != l).cloned().map(NegativeKeyword::exact).collect(),
        tree: ProductTree::leaf(bid),
    }
}

pub fn build_c3(input: &BuildInput) -> Result<(Vec<Campaign>, Vec<Group>, Vec<GroupErasers>)> {
    let (partition, erasers) = plan_groups(input)?;
    let mut campaigns = Vec::new();
    for g in &partition {
        let adgroups = g
            .keywords
            .iter()
            .map(|l| {
                let bid = input.rules.get(l).map(|r| r.cpc).unwrap_or_default();
                rule_adgroup(l, &g.keywords, bid)
            })
            .collect();
        let c = Campaign {
            name: c3_name(g.group),
            priority: Priority::Low,
            tag: CampaignTag::C3(g.group),
            negatives: c3_negatives(g.group, &erasers, &input.non_brands),
            adgroups,
        };
        check_campaign_limits(&c, input.config.limit)?;
        campaigns.push(c);
    }
    Ok((campaigns, partition, erasers))
}

pub fn build_account(input: &BuildInput) -> Result<Account> {
    let mut campaigns = vec![build_c1(input)?];
    campaigns.extend(build_c2(input)?);
    let (c3, partition, erasers) = build_c3(input)?;
    campaigns.extend(c3);
    let mut account = Account {
        limit: input.config.limit,
        brands: input.brands.clone(),
        non_brands: input.non_brands.clone(),
        campaigns,
        partition,
        erasers,
    };
    account.canonicalize();
    account.validate()?;
    Ok(account)
}
