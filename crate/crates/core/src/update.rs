//! Incremental updates: add a rule, remove a rule, remove an item.
//!
//! Every operation computes the new account and reports the difference as a
//! [`ChangeLog`]. Group erasers are kept strict: after each operation any
//! group whose erasers no longer expand to exactly its keywords gets them
//! recomputed.

use std::collections::{BTreeSet, HashMap};
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::account::{c3_name, AdGroup, AdGroupTag, Account, Campaign, CampaignTag, Group, GroupErasers, Priority, ProductTree};
use crate::builder::{c3_negatives, check_campaign_limits, check_non_sold, rule_adgroup};
use crate::changelog::{diff, ChangeLog};
use crate::eraser::{expand, reduce, word_subsets, Eraser, DEFAULT_MAX_WORDS};
use crate::error::{Error, Result};
use crate::keyword::{Keyword, MatchType, NegativeKeyword};
use crate::rules::{ItemId, Rule, RuleSet};

/// What to do with a keyword that every C3 campaign blocks.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Case2Strategy {
    /// Open a new C3 campaign for the keyword alone.
    #[default]
    NewCampaign,
    /// Put the keyword in the group giving the fewest total negatives.
    MinNegatives,
}

impl FromStr for Case2Strategy {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "new-campaign" => Ok(Case2Strategy::NewCampaign),
            "min-negatives" => Ok(Case2Strategy::MinNegatives),
            other => Err(format!("unknown strategy {other:?} (expected new-campaign or min-negatives)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpdateConfig {
    pub strategy: Case2Strategy,
    pub max_words: usize,
    pub balance_factor: f64,
}

impl Default for UpdateConfig {
    fn default() -> Self {
        UpdateConfig { strategy: Case2Strategy::default(), max_words: DEFAULT_MAX_WORDS, balance_factor: 2.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct BalanceAdvice {
    pub recommended: bool,
    pub reason: Option<String>,
    pub n: usize,
    pub groups: usize,
    pub largest_group: usize,
    pub threshold: f64,
}

/// How an added keyword was placed.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    /// Some C3 campaign admitted the keyword; it joined that group.
    JoinedGroup { group: usize },
    /// Every C3 campaign blocked it; a new group was opened.
    NewGroup { group: usize },
    /// Every C3 campaign blocked it; it joined the cheapest group.
    CheapestGroup { group: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct UpdateOutcome {
    pub account: Account,
    pub changes: ChangeLog,
    pub placement: Option<Placement>,
    pub balance: BalanceAdvice,
}

pub fn check_balance(account: &Account, factor: f64) -> BalanceAdvice {
    let n: usize = account.partition.iter().map(|g| g.keywords.len()).sum();
    let groups = account.partition.len();
    let largest_group = account.partition.iter().map(|g| g.keywords.len()).max().unwrap_or(0);
    let threshold = factor * (n as f64).sqrt();
    let reason = if largest_group as f64 > threshold {
        Some(format!("largest group has {largest_group} keywords, above {threshold:.2}"))
    } else if groups as f64 > threshold {
        Some(format!("{groups} groups, above {threshold:.2}"))
    } else {
        None
    };
    BalanceAdvice { recommended: reason.is_some(), reason, n, groups, largest_group, threshold }
}

fn finish(old: &Account, mut new: Account, placement: Option<Placement>, config: &UpdateConfig) -> Result<UpdateOutcome> {
    repair_erasers(&mut new, config.max_words);
    for c in &new.campaigns {
        check_campaign_limits(c, new.limit)?;
    }
    new.canonicalize();
    new.validate()?;
    let changes = diff(old, &new);
    let balance = check_balance(&new, config.balance_factor);
    Ok(UpdateOutcome { account: new, changes, placement, balance })
}

/// Recompute the erasers of any group whose erasers stopped being strict.
fn repair_erasers(a: &mut Account, max_words: usize) {
    let sk = a.sk();
    for g in &a.partition {
        let want: BTreeSet<Keyword> = g.keywords.iter().cloned().collect();
        let Some(entry) = a.erasers.iter_mut().find(|e| e.group == g.group) else { continue };
        if expand(&entry.erasers, &sk) != want {
            entry.erasers = reduce(&g.keywords, &sk, max_words);
        }
    }
}

/// Smallest word subset of `x` that erases no keyword of `group`, if any.
fn adgroup_eraser(x: &Keyword, group: &[Keyword]) -> Option<NegativeKeyword> {
    let words: Vec<_> = x.word_set().into_iter().collect();
    let mut subsets = word_subsets(&words, words.len());
    subsets.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    subsets.into_iter().find(|ws| !group.iter().any(|p| p.contains_all(ws.iter()))).map(|ws| {
        NegativeKeyword::large(Keyword::from_tokens(ws).expect("subsets are non-empty"))
    })
}

fn add_exact(c: &mut Campaign, x: &Keyword) {
    c.negatives.insert(NegativeKeyword::exact(x.clone()));
}

pub fn add_rule(account: &Account, rule: &Rule, config: &UpdateConfig) -> Result<UpdateOutcome> {
    let x = &rule.keyword;
    if account.group_of(x).is_some() {
        return Err(Error::DuplicateKeyword(x.render()));
    }
    check_non_sold(x, &account.non_brands)?;
    let mut new = account.clone();
    for tag in [CampaignTag::C1, CampaignTag::C2] {
        if let Some(c) = new.by_tag_mut(tag) {
            add_exact(c, x);
        }
    }

    let admitting: Vec<usize> = account
        .c3_campaigns()
        .filter(|c| c.blocking_negative(x).is_none())
        .filter_map(|c| match c.tag {
            CampaignTag::C3(id) => Some(id),
            _ => None,
        })
        .collect();

    let placement = if let Some(&chosen) =
        admitting.iter().min_by_key(|&&id| (account.group(id).map_or(0, |g| g.keywords.len()), id))
    {
        for &id in admitting.iter().filter(|&&id| id != chosen) {
            add_exact(new.by_tag_mut(CampaignTag::C3(id)).expect("admitting campaign exists"), x);
        }
        let siblings = account.group(chosen).expect("C3 campaign has a group").keywords.clone();
        let eraser = adgroup_eraser(x, &siblings).unwrap_or_else(|| NegativeKeyword::exact(x.clone()));
        let c = new.by_tag_mut(CampaignTag::C3(chosen)).expect("chosen campaign exists");
        for ag in &mut c.adgroups {
            ag.negatives.insert(eraser.clone());
        }
        c.adgroups.push(rule_adgroup(x, &siblings, rule.cpc));
        let g = new.partition.iter_mut().find(|g| g.group == chosen).expect("group exists");
        g.keywords.push(x.clone());
        let e = new.erasers.iter_mut().find(|e| e.group == chosen).expect("erasers exist");
        if !e.erasers.iter().any(|er| er.erases(x)) {
            e.erasers.push(Eraser::Exact(x.clone()));
        }
        Placement::JoinedGroup { group: chosen }
    } else {
        match config.strategy {
            Case2Strategy::MinNegatives if !account.partition.is_empty() => add_min_negatives(&mut new, rule, config)?,
            _ => add_new_campaign(&mut new, rule, config),
        }
    };
    finish(account, new, Some(placement), config)
}

fn add_new_campaign(new: &mut Account, rule: &Rule, config: &UpdateConfig) -> Placement {
    let x = &rule.keyword;
    let sk = new.sk();
    let mut universe = sk.clone();
    universe.push(x.clone());
    let id = new.partition.iter().map(|g| g.group).max().unwrap_or(0) + 1;
    let mut negatives: BTreeSet<NegativeKeyword> =
        reduce(&sk, &universe, config.max_words).iter().map(Eraser::to_negative).collect();
    negatives.extend(new.non_brands.iter().cloned().map(NegativeKeyword::phrase));
    new.campaigns.push(Campaign {
        name: c3_name(id),
        priority: Priority::Low,
        tag: CampaignTag::C3(id),
        negatives,
        adgroups: vec![AdGroup {
            name: x.render(),
            tag: AdGroupTag::RuleTarget(x.clone()),
            negatives: BTreeSet::new(),
            tree: ProductTree::leaf(rule.cpc),
        }],
    });
    new.partition.push(Group { group: id, keywords: vec![x.clone()] });
    new.erasers.push(GroupErasers { group: id, erasers: vec![Eraser::Exact(x.clone())] });
    Placement::NewGroup { group: id }
}

/// Try the keyword in every group; keep the assignment with fewest negatives.
fn add_min_negatives(new: &mut Account, rule: &Rule, config: &UpdateConfig) -> Result<Placement> {
    let x = &rule.keyword;
    let mut universe = new.sk();
    universe.push(x.clone());
    let mut best: Option<(usize, usize, Account)> = None;
    for l in new.partition.iter().map(|g| g.group) {
        let mut cand = new.clone();
        for g in &mut cand.partition {
            if g.group == l {
                g.keywords.push(x.clone());
            }
        }
        let mut erasers = Vec::new();
        for g in &cand.partition {
            let old = &new.group_erasers(g.group).expect("erasers exist").erasers;
            // Keep erasers that are still strict; only rebuild the others.
            let es = if g.group != l && !old.iter().any(|e| e.erases(x)) {
                old.clone()
            } else {
                reduce(&g.keywords, &universe, config.max_words)
            };
            erasers.push(GroupErasers { group: g.group, erasers: es });
        }
        for c in &mut cand.campaigns {
            let CampaignTag::C3(id) = c.tag else { continue };
            c.negatives = c3_negatives(id, &erasers, &cand.non_brands);
            if id == l {
                let siblings = new.group(l).expect("group exists").keywords.clone();
                for ag in &mut c.adgroups {
                    ag.negatives.insert(NegativeKeyword::exact(x.clone()));
                }
                c.adgroups.push(rule_adgroup(x, &siblings, rule.cpc));
            }
        }
        cand.erasers = erasers;
        let count = cand.negative_count();
        if best.as_ref().is_none_or(|(c, _, _)| count < *c) {
            best = Some((count, l, cand));
        }
    }
    let (_, l, cand) = best.expect("at least one group");
    *new = cand;
    Ok(Placement::CheapestGroup { group: l })
}

pub fn remove_rule(account: &Account, keyword: &Keyword, config: &UpdateConfig) -> Result<UpdateOutcome> {
    let gid = account.group_of(keyword).ok_or_else(|| Error::UnknownKeyword(keyword.render()))?;
    let mut new = account.clone();
    let x_exact = NegativeKeyword::exact(keyword.clone());

    let g = new.partition.iter_mut().find(|g| g.group == gid).expect("group exists");
    g.keywords.retain(|k| k != keyword);
    let group_now = g.keywords.clone();
    let sk = new.sk();
    let owner: HashMap<&Keyword, usize> =
        new.partition.iter().flat_map(|g| g.keywords.iter().map(move |k| (k, g.group))).collect();

    // A large negative is dead once it erases nothing it is meant to block.
    let alive = |n: &NegativeKeyword, universe: &[Keyword]| {
        n.match_type != MatchType::Large || universe.iter().any(|p| n.matches(p))
    };
    for c in &mut new.campaigns {
        c.negatives.remove(&x_exact);
        if let CampaignTag::C3(id) = c.tag {
            let others: Vec<Keyword> = sk.iter().filter(|p| owner.get(p) != Some(&id)).cloned().collect();
            c.negatives.retain(|n| alive(n, &others));
            if id == gid {
                c.adgroups.retain(|a| a.tag != AdGroupTag::RuleTarget(keyword.clone()));
                for a in &mut c.adgroups {
                    a.negatives.remove(&x_exact);
                    a.negatives.retain(|n| alive(n, &group_now));
                }
            }
        }
    }
    let e = new.erasers.iter_mut().find(|e| e.group == gid).expect("erasers exist");
    e.erasers.retain(|er| *er != Eraser::Exact(keyword.clone()));
    e.erasers.retain(|er| er.is_exact() || group_now.iter().any(|p| er.erases(p)));

    if group_now.is_empty() {
        new.campaigns.retain(|c| c.tag != CampaignTag::C3(gid));
        new.partition.retain(|g| g.group != gid);
        new.erasers.retain(|e| e.group != gid);
    }
    finish(account, new, None, config)
}

/// Drop `item` from every rule; rules left without items are removed from the
/// account. Returns the updated rules too.
pub fn remove_item(account: &Account, rules: &RuleSet, item: &ItemId, config: &UpdateConfig) -> Result<(UpdateOutcome, RuleSet)> {
    let mut current = account.clone();
    let mut kept = Vec::new();
    for r in rules.rules() {
        if !r.items.contains(item) {
            kept.push(r.clone());
        } else if r.items.len() == 1 {
            current = remove_rule(&current, &r.keyword, config)?.account;
        } else {
            let mut r = r.clone();
            r.items.remove(item);
            kept.push(r);
        }
    }
    let new_rules = RuleSet::from_rules(kept)?;
    let outcome = finish(account, current, None, config)?;
    Ok((outcome, new_rules))
}
