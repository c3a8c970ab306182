//! Account change logs: computed as a diff, applied by replay.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::account::{AdGroup, Account, Campaign, Group, GroupErasers};
use crate::eraser::Eraser;
use crate::error::{Error, Result};
use crate::keyword::{Keyword, NegativeKeyword};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Change {
    AddCampaign { campaign: Campaign },
    RemoveCampaign { campaign: String },
    AddCampaignNegative { campaign: String, negative: NegativeKeyword },
    RemoveCampaignNegative { campaign: String, negative: NegativeKeyword },
    AddAdGroup { campaign: String, adgroup: AdGroup },
    RemoveAdGroup { campaign: String, adgroup: String },
    AddAdGroupNegative { campaign: String, adgroup: String, negative: NegativeKeyword },
    RemoveAdGroupNegative { campaign: String, adgroup: String, negative: NegativeKeyword },
    /// `keywords: None` removes the group.
    SetGroup { group: usize, keywords: Option<Vec<Keyword>> },
    /// `erasers: None` removes the group's eraser entry.
    SetErasers { group: usize, erasers: Option<Vec<Eraser>> },
    SetBrands { brands: Vec<Keyword>, non_brands: Vec<Keyword> },
    SetLimit { limit: usize },
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChangeLog {
    pub changes: Vec<Change>,
}

impl ChangeLog {
    pub fn is_empty(&self) -> bool {
        self.changes.is_empty()
    }

    pub fn len(&self) -> usize {
        self.changes.len()
    }

    /// Names of campaigns touched by any change.
    pub fn touched_campaigns(&self) -> Vec<&str> {
        let mut out: Vec<&str> = self
            .changes
            .iter()
            .filter_map(|c| match c {
                Change::AddCampaign { campaign } => Some(campaign.name.as_str()),
                Change::RemoveCampaign { campaign }
                | Change::AddCampaignNegative { campaign, .. }
                | Change::RemoveCampaignNegative { campaign, .. }
                | Change::AddAdGroup { campaign, .. }
                | Change::RemoveAdGroup { campaign, .. }
                | Change::AddAdGroupNegative { campaign, .. }
                | Change::RemoveAdGroupNegative { campaign, .. } => Some(campaign.as_str()),
                _ => None,
            })
            .collect();
        out.sort_unstable();
        out.dedup();
        out
    }
}

/// The changes turning `old` into `new`.
pub fn diff(old: &Account, new: &Account) -> ChangeLog {
    let mut changes = Vec::new();
    if old.limit != new.limit {
        changes.push(Change::SetLimit { limit: new.limit });
    }
    if old.brands != new.brands || old.non_brands != new.non_brands {
        changes.push(Change::SetBrands { brands: new.brands.clone(), non_brands: new.non_brands.clone() });
    }

    let new_names: BTreeMap<&str, &Campaign> = new.campaigns.iter().map(|c| (c.name.as_str(), c)).collect();
    for c in &old.campaigns {
        if !new_names.contains_key(c.name.as_str()) {
            changes.push(Change::RemoveCampaign { campaign: c.name.clone() });
        }
    }
    for n in &new.campaigns {
        match old.campaign(&n.name) {
            None => changes.push(Change::AddCampaign { campaign: n.clone() }),
            Some(o) => diff_campaign(o, n, &mut changes),
        }
    }

    let old_groups: BTreeMap<usize, &Group> = old.partition.iter().map(|g| (g.group, g)).collect();
    let new_groups: BTreeMap<usize, &Group> = new.partition.iter().map(|g| (g.group, g)).collect();
    for (id, _) in old_groups.iter().filter(|(id, _)| !new_groups.contains_key(id)) {
        changes.push(Change::SetGroup { group: *id, keywords: None });
    }
    for (id, g) in &new_groups {
        if old_groups.get(id).map(|o| &o.keywords) != Some(&g.keywords) {
            changes.push(Change::SetGroup { group: *id, keywords: Some(g.keywords.clone()) });
        }
    }
    let old_er: BTreeMap<usize, &GroupErasers> = old.erasers.iter().map(|g| (g.group, g)).collect();
    let new_er: BTreeMap<usize, &GroupErasers> = new.erasers.iter().map(|g| (g.group, g)).collect();
    for (id, _) in old_er.iter().filter(|(id, _)| !new_er.contains_key(id)) {
        changes.push(Change::SetErasers { group: *id, erasers: None });
    }
    for (id, g) in &new_er {
        if old_er.get(id).map(|o| &o.erasers) != Some(&g.erasers) {
            changes.push(Change::SetErasers { group: *id, erasers: Some(g.erasers.clone()) });
        }
    }
    ChangeLog { changes }
}

fn diff_campaign(o: &Campaign, n: &Campaign, changes: &mut Vec<Change>) {
    // Replay appends AdGroups, so surviving ones must keep their relative
    // order; priority and tag changes are not expressible either.
    let kept_old: Vec<&str> =
        o.adgroups.iter().map(|a| a.name.as_str()).filter(|name| n.adgroup(name).is_some()).collect();
    let kept_new: Vec<&str> =
        n.adgroups.iter().map(|a| a.name.as_str()).filter(|name| o.adgroup(name).is_some()).collect();
    let appended_tail = n.adgroups[kept_new.len()..].iter().all(|a| o.adgroup(&a.name).is_none());
    if o.priority != n.priority || o.tag != n.tag || kept_old != kept_new || !appended_tail {
        changes.push(Change::RemoveCampaign { campaign: o.name.clone() });
        changes.push(Change::AddCampaign { campaign: n.clone() });
        return;
    }
    let name = &n.name;
    for neg in o.negatives.difference(&n.negatives) {
        changes.push(Change::RemoveCampaignNegative { campaign: name.clone(), negative: neg.clone() });
    }
    for neg in n.negatives.difference(&o.negatives) {
        changes.push(Change::AddCampaignNegative { campaign: name.clone(), negative: neg.clone() });
    }
    for a in &o.adgroups {
        if n.adgroup(&a.name).is_none() {
            changes.push(Change::RemoveAdGroup { campaign: name.clone(), adgroup: a.name.clone() });
        }
    }
    for a in &n.adgroups {
        let Some(prev) = o.adgroup(&a.name) else {
            changes.push(Change::AddAdGroup { campaign: name.clone(), adgroup: a.clone() });
            continue;
        };
        if prev.tag != a.tag || prev.tree != a.tree {
            // Not expressible as negative edits; rebuild the whole campaign.
            changes.retain(|c| !touches(c, name));
            changes.push(Change::RemoveCampaign { campaign: o.name.clone() });
            changes.push(Change::AddCampaign { campaign: n.clone() });
            return;
        }
        for neg in prev.negatives.difference(&a.negatives) {
            changes.push(Change::RemoveAdGroupNegative { campaign: name.clone(), adgroup: a.name.clone(), negative: neg.clone() });
        }
        for neg in a.negatives.difference(&prev.negatives) {
            changes.push(Change::AddAdGroupNegative { campaign: name.clone(), adgroup: a.name.clone(), negative: neg.clone() });
        }
    }
}

fn touches(c: &Change, campaign: &str) -> bool {
    match c {
        Change::AddCampaignNegative { campaign: n, .. }
        | Change::RemoveCampaignNegative { campaign: n, .. }
        | Change::AddAdGroup { campaign: n, .. }
        | Change::RemoveAdGroup { campaign: n, .. }
        | Change::AddAdGroupNegative { campaign: n, .. }
        | Change::RemoveAdGroupNegative { campaign: n, .. } => n == campaign,
        _ => false,
    }
}

/// Apply `log` to a copy of `account`. Every change must find its target.
pub fn replay(account: &Account, log: &ChangeLog) -> Result<Account> {
    let mut a = account.clone();
    for change in &log.changes {
        apply(&mut a, change)?;
    }
    a.canonicalize();
    Ok(a)
}

fn missing(what: &str, name: &str) -> Error {
    Error::Replay(format!("{what} {name:?} does not exist"))
}

fn apply(a: &mut Account, change: &Change) -> Result<()> {
    match change {
        Change::AddCampaign { campaign } => {
            if a.campaign(&campaign.name).is_some() {
                return Err(Error::Replay(format!("campaign {:?} already exists", campaign.name)));
            }
            a.campaigns.push(campaign.clone());
        }
        Change::RemoveCampaign { campaign } => {
            let before = a.campaigns.len();
            a.campaigns.retain(|c| &c.name != campaign);
            if a.campaigns.len() == before {
                return Err(missing("campaign", campaign));
            }
        }
        Change::AddCampaignNegative { campaign, negative } => {
            let c = a.campaign_mut(campaign).ok_or_else(|| missing("campaign", campaign))?;
            if !c.negatives.insert(negative.clone()) {
                return Err(Error::Replay(format!("{campaign} already has negative {negative}")));
            }
        }
        Change::RemoveCampaignNegative { campaign, negative } => {
            let c = a.campaign_mut(campaign).ok_or_else(|| missing("campaign", campaign))?;
            if !c.negatives.remove(negative) {
                return Err(Error::Replay(format!("{campaign} has no negative {negative}")));
            }
        }
        Change::AddAdGroup { campaign, adgroup } => {
            let c = a.campaign_mut(campaign).ok_or_else(|| missing("campaign", campaign))?;
            if c.adgroup(&adgroup.name).is_some() {
                return Err(Error::Replay(format!("AdGroup {:?} already exists in {campaign}", adgroup.name)));
            }
            c.adgroups.push(adgroup.clone());
        }
        Change::RemoveAdGroup { campaign, adgroup } => {
            let c = a.campaign_mut(campaign).ok_or_else(|| missing("campaign", campaign))?;
            let before = c.adgroups.len();
            c.adgroups.retain(|g| &g.name != adgroup);
            if c.adgroups.len() == before {
                return Err(missing("AdGroup", adgroup));
            }
        }
        Change::AddAdGroupNegative { campaign, adgroup, negative } => {
            let c = a.campaign_mut(campaign).ok_or_else(|| missing("campaign", campaign))?;
            let g = c.adgroup_mut(adgroup).ok_or_else(|| missing("AdGroup", adgroup))?;
            if !g.negatives.insert(negative.clone()) {
                return Err(Error::Replay(format!("{campaign} / {adgroup} already has negative {negative}")));
            }
        }
        Change::RemoveAdGroupNegative { campaign, adgroup, negative } => {
            let c = a.campaign_mut(campaign).ok_or_else(|| missing("campaign", campaign))?;
            let g = c.adgroup_mut(adgroup).ok_or_else(|| missing("AdGroup", adgroup))?;
            if !g.negatives.remove(negative) {
                return Err(Error::Replay(format!("{campaign} / {adgroup} has no negative {negative}")));
            }
        }
        Change::SetGroup { group, keywords } => {
            a.partition.retain(|g| g.group != *group);
            if let Some(ks) = keywords {
                a.partition.push(Group { group: *group, keywords: ks.clone() });
            }
        }
        Change::SetErasers { group, erasers } => {
            a.erasers.retain(|g| g.group != *group);
            if let Some(es) = erasers {
                a.erasers.push(GroupErasers { group: *group, erasers: es.clone() });
            }
        }
        Change::SetBrands { brands, non_brands } => {
            a.brands = brands.clone();
            a.non_brands = non_brands.clone();
        }
        Change::SetLimit { limit } => a.limit = *limit,
    }
    Ok(())
}
