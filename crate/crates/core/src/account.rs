//! Campaigns, AdGroups, accounts and the trajectory simulator.
//!
//! A query is tested against campaigns tier by tier, High first. A campaign
//! admits the query when none of its negatives match. If exactly one campaign
//! of a tier admits it, the query enters that campaign and lower tiers are not
//! looked at; inside, it lands if exactly one AdGroup is open.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::eraser::Eraser;
use crate::error::{Error, Result};
use crate::keyword::{Keyword, MatchType, NegativeKeyword};
use crate::rules::Money;

/// Default cap on negatives per campaign or AdGroup.
pub const DEFAULT_LIMIT: usize = 20_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Priority {
    Low,
    Medium,
    High,
}

impl fmt::Display for Priority {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Priority::Low => "low",
            Priority::Medium => "medium",
            Priority::High => "high",
        })
    }
}

/// A bid decision tree over item attributes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProductTree {
    Leaf { bid: Money },
    Node { attribute: String, branches: Vec<Branch>, others: Box<ProductTree> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Branch {
    pub value: String,
    pub tree: ProductTree,
}

impl ProductTree {
    pub fn leaf(bid: Money) -> Self {
        ProductTree::Leaf { bid }
    }

    /// The bid of the leaf reached by an item with these attribute values.
    /// Missing attributes and unlisted values take the `others` branch.
    pub fn evaluate(&self, attributes: &BTreeMap<String, String>) -> Money {
        let mut t = self;
        loop {
            match t {
                ProductTree::Leaf { bid } => return *bid,
                ProductTree::Node { attribute, branches, others } => {
                    let value = attributes.get(attribute);
                    t = branches
                        .iter()
                        .find(|b| Some(&b.value) == value)
                        .map_or(others.as_ref(), |b| &b.tree);
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AdGroupTag {
    RuleTarget(Keyword),
    BrandTarget(Keyword),
    CatchAll,
}

impl fmt::Display for AdGroupTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            AdGroupTag::RuleTarget(k) => write!(f, "rule:{k}"),
            AdGroupTag::BrandTarget(b) => write!(f, "brand:{b}"),
            AdGroupTag::CatchAll => f.write_str("catch-all"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CampaignTag {
    C1,
    C2,
    C3(usize),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AdGroup {
    pub name: String,
    pub tag: AdGroupTag,
    pub negatives: BTreeSet<NegativeKeyword>,
    pub tree: ProductTree,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Campaign {
    pub name: String,
    pub priority: Priority,
    pub tag: CampaignTag,
    pub negatives: BTreeSet<NegativeKeyword>,
    pub adgroups: Vec<AdGroup>,
}

impl Campaign {
    pub fn adgroup(&self, name: &str) -> Option<&AdGroup> {
        self.adgroups.iter().find(|a| a.name == name)
    }

    pub fn adgroup_mut(&mut self, name: &str) -> Option<&mut AdGroup> {
        self.adgroups.iter_mut().find(|a| a.name == name)
    }

    /// Campaign-level plus AdGroup-level negatives.
    pub fn negative_count(&self) -> usize {
        self.negatives.len() + self.adgroups.iter().map(|a| a.negatives.len()).sum::<usize>()
    }

    pub fn blocking_negative(&self, q: &Keyword) -> Option<&NegativeKeyword> {
        self.negatives.iter().find(|n| n.matches(q))
    }
}

pub fn c3_name(group: usize) -> String {
    format!("C3-{group}")
}

/// One part of the keyword partition, served by campaign `C3-{id}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Group {
    pub group: usize,
    pub keywords: Vec<Keyword>,
}

/// Erasers standing for a group's keywords in the other C3 campaigns.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupErasers {
    pub group: usize,
    pub erasers: Vec<Eraser>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Account {
    pub limit: usize,
    pub brands: Vec<Keyword>,
    pub non_brands: Vec<Keyword>,
    pub campaigns: Vec<Campaign>,
    pub partition: Vec<Group>,
    pub erasers: Vec<GroupErasers>,
}

impl Account {
    pub fn campaign(&self, name: &str) -> Option<&Campaign> {
        self.campaigns.iter().find(|c| c.name == name)
    }

    pub fn campaign_mut(&mut self, name: &str) -> Option<&mut Campaign> {
        self.campaigns.iter_mut().find(|c| c.name == name)
    }

    pub fn by_tag(&self, tag: CampaignTag) -> Option<&Campaign> {
        self.campaigns.iter().find(|c| c.tag == tag)
    }

    pub fn by_tag_mut(&mut self, tag: CampaignTag) -> Option<&mut Campaign> {
        self.campaigns.iter_mut().find(|c| c.tag == tag)
    }

    pub fn c1(&self) -> Option<&Campaign> {
        self.by_tag(CampaignTag::C1)
    }

    pub fn c2(&self) -> Option<&Campaign> {
        self.by_tag(CampaignTag::C2)
    }

    pub fn c3_campaigns(&self) -> impl Iterator<Item = &Campaign> {
        self.campaigns.iter().filter(|c| matches!(c.tag, CampaignTag::C3(_)))
    }

    pub fn group(&self, id: usize) -> Option<&Group> {
        self.partition.iter().find(|g| g.group == id)
    }

    pub fn group_erasers(&self, id: usize) -> Option<&GroupErasers> {
        self.erasers.iter().find(|g| g.group == id)
    }

    /// The group holding `keyword`, if any.
    pub fn group_of(&self, keyword: &Keyword) -> Option<usize> {
        self.partition.iter().find(|g| g.keywords.contains(keyword)).map(|g| g.group)
    }

    /// All partitioned keywords, group by group.
    pub fn sk(&self) -> Vec<Keyword> {
        self.partition.iter().flat_map(|g| g.keywords.iter().cloned()).collect()
    }

    pub fn negative_count(&self) -> usize {
        self.campaigns.iter().map(Campaign::negative_count).sum()
    }

    pub fn adgroup_count(&self) -> usize {
        self.campaigns.iter().map(|c| c.adgroups.len()).sum()
    }

    /// Sort campaigns by priority (High first) then tag, and the metadata by
    /// group id. AdGroup order is meaningful and left alone.
    pub fn canonicalize(&mut self) {
        self.campaigns.sort_by(|a, b| b.priority.cmp(&a.priority).then(a.tag.cmp(&b.tag)).then(a.name.cmp(&b.name)));
        self.partition.sort_by_key(|g| g.group);
        self.erasers.sort_by_key(|g| g.group);
    }

    /// Structural invariants that any well-formed snapshot satisfies.
    /// Negative-count limits are not checked here; the verifier reports them.
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidAccount(m));
        if self.limit == 0 {
            return bad("limit must be positive".into());
        }
        let c1: Vec<&Campaign> = self.campaigns.iter().filter(|c| c.tag == CampaignTag::C1).collect();
        if c1.len() != 1 || c1[0].priority != Priority::High {
            return bad("expected exactly one high-priority C1 campaign".into());
        }
        let c2: Vec<&Campaign> = self.campaigns.iter().filter(|c| c.tag == CampaignTag::C2).collect();
        if c2.len() > 1 || c2.iter().any(|c| c.priority != Priority::Medium) {
            return bad("expected at most one medium-priority C2 campaign".into());
        }
        if c2.is_empty() && !self.brands.is_empty() {
            return bad("sold brands are listed but C2 is missing".into());
        }
        let mut names = HashSet::new();
        let mut c3_ids = BTreeSet::new();
        for c in &self.campaigns {
            if !names.insert(c.name.as_str()) {
                return bad(format!("duplicate campaign name {:?}", c.name));
            }
            if c.adgroups.is_empty() {
                return bad(format!("campaign {} has no AdGroups", c.name));
            }
            let mut ag = HashSet::new();
            for a in &c.adgroups {
                if !ag.insert(a.name.as_str()) {
                    return bad(format!("duplicate AdGroup {:?} in {}", a.name, c.name));
                }
            }
            if let CampaignTag::C3(id) = c.tag {
                if c.priority != Priority::Low {
                    return bad(format!("campaign {} must have low priority", c.name));
                }
                c3_ids.insert(id);
            }
        }
        let mut seen = HashSet::new();
        let mut group_ids = BTreeSet::new();
        for g in &self.partition {
            if !group_ids.insert(g.group) {
                return bad(format!("group {} appears twice in the partition", g.group));
            }
            if g.keywords.is_empty() {
                return bad(format!("group {} is empty", g.group));
            }
            for k in &g.keywords {
                if !seen.insert(k) {
                    return bad(format!("keyword {k:?} belongs to two groups"));
                }
            }
        }
        if group_ids != c3_ids {
            return bad("partition groups and C3 campaigns do not correspond".into());
        }
        let eraser_ids: BTreeSet<usize> = self.erasers.iter().map(|g| g.group).collect();
        if eraser_ids.len() != self.erasers.len() || eraser_ids != group_ids {
            return bad("eraser assignment does not match the partition".into());
        }
        Ok(())
    }

    /// Canonical snapshot: sorted keys, sorted negative lists, pretty-printed.
    pub fn to_json(&self) -> String {
        let mut a = self.clone();
        a.canonicalize();
        let value = serde_json::to_value(&a).expect("account serializes");
        let mut s = serde_json::to_string_pretty(&value).expect("value serializes");
        s.push('\n');
        s
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let a: Account = serde_json::from_str(text).map_err(|e| Error::InvalidAccount(e.to_string()))?;
        a.validate()?;
        Ok(a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum Outcome {
    Blocked { by: NegativeKeyword },
    Entered { open_adgroups: Vec<String> },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Step {
    pub campaign: String,
    pub priority: Priority,
    #[serde(flatten)]
    pub outcome: Outcome,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "disposition", rename_all = "snake_case")]
pub enum Disposition {
    Landed { campaign: String, adgroup: String, tag: AdGroupTag },
    DeadEnd { campaign: String },
    FellThrough,
    Ambiguous { details: String },
}

impl Disposition {
    pub fn kind(&self) -> &'static str {
        match self {
            Disposition::Landed { .. } => "landed",
            Disposition::DeadEnd { .. } => "dead_end",
            Disposition::FellThrough => "fell_through",
            Disposition::Ambiguous { .. } => "ambiguous",
        }
    }

    pub fn landed_tag(&self) -> Option<&AdGroupTag> {
        match self {
            Disposition::Landed { tag, .. } => Some(tag),
            _ => None,
        }
    }
}

impl fmt::Display for Disposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Disposition::Landed { campaign, adgroup, .. } => write!(f, "landed in {campaign} / {adgroup}"),
            Disposition::DeadEnd { campaign } => write!(f, "dead end in {campaign}"),
            Disposition::FellThrough => f.write_str("fell through every campaign"),
            Disposition::Ambiguous { details } => write!(f, "ambiguous: {details}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub query: Keyword,
    pub steps: Vec<Step>,
    #[serde(flatten)]
    pub disposition: Disposition,
}

/// A negative set split by match type for fast repeated matching.
#[derive(Clone, Debug, Default)]
struct Filter {
    exact: HashSet<Keyword>,
    phrase: Vec<Keyword>,
    large: Vec<Keyword>,
}

impl Filter {
    fn new(negatives: &BTreeSet<NegativeKeyword>) -> Self {
        let mut f = Filter::default();
        for n in negatives {
            match n.match_type {
                MatchType::Exact => {
                    f.exact.insert(n.keyword.clone());
                }
                MatchType::Phrase => f.phrase.push(n.keyword.clone()),
                MatchType::Large => f.large.push(n.keyword.clone()),
            }
        }
        f
    }

    /// The first matching negative in canonical order.
    fn first_match(&self, q: &Keyword) -> Option<NegativeKeyword> {
        if self.exact.contains(q) {
            return Some(NegativeKeyword::exact(q.clone()));
        }
        if let Some(p) = self.phrase.iter().find(|p| q.contains_phrase(p)) {
            return Some(NegativeKeyword::phrase(p.clone()));
        }
        self.large
            .iter()
            .find(|l| q.contains_all(l.tokens().iter()))
            .map(|l| NegativeKeyword::large(l.clone()))
    }
}

struct CompiledCampaign<'a> {
    campaign: &'a Campaign,
    filter: Filter,
    adgroups: Vec<Filter>,
}

/// An account with its negative sets indexed, for simulating many queries.
pub struct Simulator<'a> {
    /// Tiers, High first; each holds campaigns in account order.
    tiers: Vec<Vec<CompiledCampaign<'a>>>,
}

impl<'a> Simulator<'a> {
    pub fn new(account: &'a Account) -> Self {
        let mut tiers = Vec::new();
        for p in [Priority::High, Priority::Medium, Priority::Low] {
            let tier: Vec<CompiledCampaign> = account
                .campaigns
                .iter()
                .filter(|c| c.priority == p)
                .map(|c| CompiledCampaign {
                    campaign: c,
                    filter: Filter::new(&c.negatives),
                    adgroups: c.adgroups.iter().map(|a| Filter::new(&a.negatives)).collect(),
                })
                .collect();
            tiers.push(tier);
        }
        Simulator { tiers }
    }

    pub fn simulate(&self, q: &Keyword) -> Trajectory {
        let mut steps = Vec::new();
        for tier in &self.tiers {
            let mut entered: Vec<(&CompiledCampaign, Vec<usize>)> = Vec::new();
            for cc in tier {
                match cc.filter.first_match(q) {
                    Some(by) => steps.push(Step {
                        campaign: cc.campaign.name.clone(),
                        priority: cc.campaign.priority,
                        outcome: Outcome::Blocked { by },
                    }),
                    None => {
                        let open: Vec<usize> =
                            (0..cc.adgroups.len()).filter(|&i| cc.adgroups[i].first_match(q).is_none()).collect();
                        steps.push(Step {
                            campaign: cc.campaign.name.clone(),
                            priority: cc.campaign.priority,
                            outcome: Outcome::Entered {
                                open_adgroups: open.iter().map(|&i| cc.campaign.adgroups[i].name.clone()).collect(),
                            },
                        });
                        entered.push((cc, open));
                    }
                }
            }
            let disposition = match entered.as_slice() {
                [] => continue,
                [(cc, open)] => match open.as_slice() {
                    [] => Disposition::DeadEnd { campaign: cc.campaign.name.clone() },
                    [i] => {
                        let a = &cc.campaign.adgroups[*i];
                        Disposition::Landed { campaign: cc.campaign.name.clone(), adgroup: a.name.clone(), tag: a.tag.clone() }
                    }
                    many => Disposition::Ambiguous {
                        details: format!("{} AdGroups open in {}", many.len(), cc.campaign.name),
                    },
                },
                many => {
                    let names: Vec<&str> = many.iter().map(|(cc, _)| cc.campaign.name.as_str()).collect();
                    Disposition::Ambiguous { details: format!("admitted by {}", names.join(", ")) }
                }
            };
            return Trajectory { query: q.clone(), steps, disposition };
        }
        Trajectory { query: q.clone(), steps, disposition: Disposition::FellThrough }
    }
}

/// Trace a single query. For many queries build a [`Simulator`] once.
pub fn simulate(account: &Account, q: &Keyword) -> Trajectory {
    Simulator::new(account).simulate(q)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryReport {
    pub trajectories: Vec<Trajectory>,
    /// Number of trajectories per disposition kind.
    pub counts: BTreeMap<String, usize>,
}

pub fn trace_report(account: &Account, queries: &[Keyword]) -> TrajectoryReport {
    let sim = Simulator::new(account);
    let trajectories: Vec<Trajectory> = queries.iter().map(|q| sim.simulate(q)).collect();
    let mut counts = BTreeMap::new();
    for t in &trajectories {
        *counts.entry(t.disposition.kind().to_string()).or_insert(0) += 1;
    }
    TrajectoryReport { trajectories, counts }
}
