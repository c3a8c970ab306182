//! Rules (keyword, CPC, items) and their file formats.
//!
//! Rules are read as JSON lines, one `{"keyword", "cpc_micros", "items"}`
//! record per line. Brand lists are plain text, one brand per line; blank
//! lines and lines starting with `#` are ignored.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyword::{normalize, Keyword};

/// A currency amount in micro-units.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Money(pub u64);

impl Money {
    pub fn from_micros(micros: u64) -> Self {
        Money(micros)
    }

    pub fn micros(self) -> u64 {
        self.0
    }
}

impl fmt::Display for Money {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}.{:06}", self.0 / 1_000_000, self.0 % 1_000_000)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct ItemId(String);

impl ItemId {
    pub fn new(id: impl Into<String>) -> Result<Self> {
        let id = id.into();
        if id.is_empty() {
            return Err(Error::EmptyItemId);
        }
        Ok(ItemId(id))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for ItemId {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        ItemId::new(value)
    }
}

impl From<ItemId> for String {
    fn from(i: ItemId) -> String {
        i.0
    }
}

impl fmt::Display for ItemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A bidding intent: queries equal to `keyword` should reach `items` at `cpc`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rule {
    pub keyword: Keyword,
    pub cpc: Money,
    pub items: BTreeSet<ItemId>,
}

impl Rule {
    pub fn new(keyword: Keyword, cpc: Money, items: BTreeSet<ItemId>) -> Result<Self> {
        if items.is_empty() {
            return Err(Error::EmptyItemSet(keyword.render()));
        }
        Ok(Rule { keyword, cpc, items })
    }

    /// Convenience constructor from raw strings.
    pub fn parse(keyword: &str, cpc_micros: u64, items: &[&str]) -> Result<Self> {
        let items = items.iter().map(|i| ItemId::new(*i)).collect::<Result<BTreeSet<_>>>()?;
        Rule::new(normalize(keyword)?, Money(cpc_micros), items)
    }
}

/// Rules with pairwise distinct keywords, kept in insertion order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RuleSet {
    rules: Vec<Rule>,
}

impl RuleSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_rules(rules: impl IntoIterator<Item = Rule>) -> Result<Self> {
        let mut set = RuleSet::new();
        for r in rules {
            set.push(r)?;
        }
        Ok(set)
    }

    pub fn push(&mut self, rule: Rule) -> Result<()> {
        if self.get(&rule.keyword).is_some() {
            return Err(Error::DuplicateKeyword(rule.keyword.render()));
        }
        self.rules.push(rule);
        Ok(())
    }

    pub fn get(&self, keyword: &Keyword) -> Option<&Rule> {
        self.rules.iter().find(|r| &r.keyword == keyword)
    }

    pub fn remove(&mut self, keyword: &Keyword) -> Option<Rule> {
        let pos = self.rules.iter().position(|r| &r.keyword == keyword)?;
        Some(self.rules.remove(pos))
    }

    pub fn rules(&self) -> &[Rule] {
        &self.rules
    }

    pub fn rules_mut(&mut self) -> &mut [Rule] {
        &mut self.rules
    }

    /// SK, in rule order.
    pub fn keywords(&self) -> Vec<Keyword> {
        self.rules.iter().map(|r| r.keyword.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.rules.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }
}

/// One line of a rules file.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RuleFileRecord {
    pub keyword: String,
    pub cpc_micros: u64,
    pub items: Vec<String>,
}

impl RuleFileRecord {
    pub fn from_rule(rule: &Rule) -> Self {
        RuleFileRecord {
            keyword: rule.keyword.render(),
            cpc_micros: rule.cpc.micros(),
            items: rule.items.iter().map(|i| i.as_str().to_string()).collect(),
        }
    }

    pub fn into_rule(self) -> Result<Rule> {
        let items = self.items.into_iter().map(ItemId::new).collect::<Result<BTreeSet<_>>>()?;
        Rule::new(normalize(&self.keyword)?, Money(self.cpc_micros), items)
    }
}

fn at_line(line: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Parse { .. } => e,
        other => Error::Parse { line, message: other.to_string() },
    }
}

/// Parse a JSON-lines rules file. Blank lines are skipped.
pub fn read_rules_jsonl(reader: impl BufRead) -> Result<RuleSet> {
    let mut set = RuleSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        if line.trim().is_empty() {
            continue;
        }
        let record: RuleFileRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        let rule = record.into_rule().map_err(at_line(lineno))?;
        set.push(rule).map_err(at_line(lineno))?;
    }
    Ok(set)
}

pub fn write_rules_jsonl(rules: &RuleSet, mut w: impl Write) -> std::io::Result<()> {
    for r in rules.rules() {
        let line = serde_json::to_string(&RuleFileRecord::from_rule(r)).map_err(std::io::Error::other)?;
        writeln!(w, "{line}")?;
    }
    Ok(())
}

/// Parse a brand list: one brand per line, multi-word brands allowed.
pub fn read_brand_list(reader: impl BufRead) -> Result<Vec<Keyword>> {
    let mut out: Vec<Keyword> = Vec::new();
    for (idx, line) in reader.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.map_err(|e| Error::Parse { line: lineno, message: e.to_string() })?;
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let k = normalize(trimmed).map_err(at_line(lineno))?;
        if !out.contains(&k) {
            out.push(k);
        }
    }
    Ok(out)
}

pub fn write_brand_list(brands: &[Keyword], mut w: impl Write) -> std::io::Result<()> {
    for b in brands {
        writeln!(w, "{b}")?;
    }
    Ok(())
}
