//! Machine checks of the routing properties and of structural sanity.
//!
//! 1. Every keyword of SK lands in its own RuleTarget AdGroup (exhaustive).
//! 2. Queries with exactly one sold-brand phrase, not in SK, land in that
//!    brand's AdGroup of C2 (seeded random probes).
//! 3. Queries with no brand phrase, not in SK, land in C1's catch-all
//!    (seeded random probes).

use std::collections::{BTreeSet, HashMap, HashSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::account::{Account, AdGroupTag, Disposition, Simulator};
use crate::eraser::expand;
use crate::error::{Error, Result};
use crate::keyword::{Keyword, Token};

/// Generic words mixed into probe queries besides the non-brand words of SK.
pub const FILLER_WORDS: &[&str] = &[
    "blue", "red", "black", "white", "green", "cheap", "sale", "new", "kids", "women", "men", "size", "light",
    "classic", "pro", "mini", "outdoor", "summer", "winter", "umbrella", "bag", "gift", "pack", "set",
];

pub const DEFAULT_PROBES: usize = 1000;
pub const DEFAULT_SEED: u64 = 42;

const MAX_ATTEMPTS_PER_PROBE: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ProbeConfig {
    pub probes: usize,
    pub seed: u64,
}

impl Default for ProbeConfig {
    fn default() -> Self {
        ProbeConfig { probes: DEFAULT_PROBES, seed: DEFAULT_SEED }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub query: String,
    pub expected: String,
    pub actual: Disposition,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PropertyResult {
    pub passed: bool,
    /// Nothing to check (no keywords, or no sold brands).
    pub vacuous: bool,
    pub checked: usize,
    pub counterexamples: Vec<Counterexample>,
}

impl PropertyResult {
    fn from_failures(checked: usize, counterexamples: Vec<Counterexample>) -> Self {
        PropertyResult { passed: counterexamples.is_empty(), vacuous: checked == 0, checked, counterexamples }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Severity {
    /// Breaks the structure.
    Error,
    /// Expected or undefined behavior worth knowing about.
    Info,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub kind: String,
    pub detail: String,
    pub query: Option<String>,
}

impl Finding {
    fn error(kind: &str, detail: String) -> Self {
        Finding { severity: Severity::Error, kind: kind.into(), detail, query: None }
    }

    fn info(kind: &str, detail: String, query: &Keyword) -> Self {
        Finding { severity: Severity::Info, kind: kind.into(), detail, query: Some(query.render()) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub property1: PropertyResult,
    pub property2: PropertyResult,
    pub property3: PropertyResult,
    pub structural: Vec<Finding>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.property1.passed
            && self.property2.passed
            && self.property3.passed
            && self.structural.iter().all(|f| f.severity != Severity::Error)
    }
}

pub fn verify_property1(account: &Account) -> PropertyResult {
    let sim = Simulator::new(account);
    let sk = account.sk();
    let failures = sk
        .iter()
        .filter_map(|q| {
            let t = sim.simulate(q);
            let want = AdGroupTag::RuleTarget(q.clone());
            (t.disposition.landed_tag() != Some(&want)).then(|| Counterexample {
                query: q.render(),
                expected: want.to_string(),
                actual: t.disposition,
            })
        })
        .collect();
    PropertyResult::from_failures(sk.len(), failures)
}

/// Tokens usable as probe filler: never part of any brand.
fn filler_pool(account: &Account) -> Vec<Token> {
    let brand_tokens: HashSet<&Token> =
        account.brands.iter().chain(&account.non_brands).flat_map(|b| b.tokens()).collect();
    let mut pool: BTreeSet<Token> = account.sk().iter().flat_map(|k| k.tokens().iter().cloned()).collect();
    pool.extend(FILLER_WORDS.iter().map(|w| Token::new(*w).expect("filler words are valid tokens")));
    pool.into_iter().filter(|t| !brand_tokens.contains(t)).collect()
}

fn brand_phrases_in<'a>(q: &Keyword, brands: &'a [Keyword]) -> Vec<&'a Keyword> {
    brands.iter().filter(|b| q.contains_phrase(b)).collect()
}

struct ProbeGen<'a> {
    rng: ChaCha8Rng,
    pool: Vec<Token>,
    sk: HashSet<Keyword>,
    account: &'a Account,
}

impl<'a> ProbeGen<'a> {
    fn new(account: &'a Account, seed: u64) -> Result<Self> {
        let pool = filler_pool(account);
        if pool.is_empty() {
            return Err(Error::EmptyProbePool("every candidate token belongs to a brand".into()));
        }
        Ok(ProbeGen { rng: ChaCha8Rng::seed_from_u64(seed), pool, sk: account.sk().into_iter().collect(), account })
    }

    fn fillers(&mut self, lo: usize, hi: usize) -> Vec<Token> {
        let n = self.rng.gen_range(lo..=hi);
        (0..n).map(|_| self.pool.choose(&mut self.rng).expect("pool is non-empty").clone()).collect()
    }

    /// A query holding exactly the phrase of `brand` among all brands.
    fn branded(&mut self, brand: &Keyword) -> Option<Keyword> {
        for _ in 0..MAX_ATTEMPTS_PER_PROBE {
            let mut tokens = self.fillers(1, 3);
            let at = self.rng.gen_range(0..=tokens.len());
            tokens.splice(at..at, brand.tokens().iter().cloned());
            let q = Keyword::from_tokens(tokens).expect("non-empty");
            if self.sk.contains(&q) {
                continue;
            }
            let sold = brand_phrases_in(&q, &self.account.brands);
            if sold.len() == 1 && brand_phrases_in(&q, &self.account.non_brands).is_empty() {
                return Some(q);
            }
        }
        None
    }

    fn unbranded(&mut self) -> Option<Keyword> {
        for _ in 0..MAX_ATTEMPTS_PER_PROBE {
            let q = Keyword::from_tokens(self.fillers(1, 3)).expect("non-empty");
            if !self.sk.contains(&q) {
                return Some(q);
            }
        }
        None
    }
}

pub fn verify_property2(account: &Account, probes: ProbeConfig) -> Result<PropertyResult> {
    if account.brands.is_empty() {
        return Ok(PropertyResult::from_failures(0, Vec::new()));
    }
    let mut gen = ProbeGen::new(account, probes.seed)?;
    let sim = Simulator::new(account);
    let mut failures = Vec::new();
    for _ in 0..probes.probes {
        let brand = account.brands.choose(&mut gen.rng).expect("brands non-empty").clone();
        let q = gen
            .branded(&brand)
            .ok_or_else(|| Error::EmptyProbePool(format!("cannot build a query around brand {brand:?}")))?;
        let t = sim.simulate(&q);
        let want = AdGroupTag::BrandTarget(brand.clone());
        let in_c2 = matches!(&t.disposition, Disposition::Landed { campaign, .. } if account.c2().is_some_and(|c| &c.name == campaign));
        if !in_c2 || t.disposition.landed_tag() != Some(&want) {
            failures.push(Counterexample { query: q.render(), expected: want.to_string(), actual: t.disposition });
        }
    }
    Ok(PropertyResult::from_failures(probes.probes, failures))
}

pub fn verify_property3(account: &Account, probes: ProbeConfig) -> Result<PropertyResult> {
    let mut gen = ProbeGen::new(account, probes.seed.wrapping_add(1))?;
    let sim = Simulator::new(account);
    let mut failures = Vec::new();
    for _ in 0..probes.probes {
        let q = gen.unbranded().ok_or_else(|| Error::EmptyProbePool("every probe collides with SK".into()))?;
        let t = sim.simulate(&q);
        if t.disposition.landed_tag() != Some(&AdGroupTag::CatchAll) {
            failures.push(Counterexample { query: q.render(), expected: AdGroupTag::CatchAll.to_string(), actual: t.disposition });
        }
    }
    Ok(PropertyResult::from_failures(probes.probes, failures))
}

/// Limit violations, partition overlaps and non-strict group erasers.
pub fn verify_structure(account: &Account) -> Vec<Finding> {
    let mut out = Vec::new();
    for c in &account.campaigns {
        if c.negatives.len() > account.limit {
            out.push(Finding::error("limit", format!("{} has {} negatives, limit {}", c.name, c.negatives.len(), account.limit)));
        }
        for a in &c.adgroups {
            if a.negatives.len() > account.limit {
                out.push(Finding::error(
                    "limit",
                    format!("{} / {} has {} negatives, limit {}", c.name, a.name, a.negatives.len(), account.limit),
                ));
            }
        }
    }
    let mut owner: HashMap<&Keyword, usize> = HashMap::new();
    for g in &account.partition {
        for k in &g.keywords {
            if let Some(prev) = owner.insert(k, g.group) {
                out.push(Finding::error("partition", format!("{k:?} is in groups {prev} and {}", g.group)));
            }
        }
    }
    let sk = account.sk();
    for g in &account.partition {
        let want: BTreeSet<Keyword> = g.keywords.iter().cloned().collect();
        match account.group_erasers(g.group) {
            None => out.push(Finding::error("erasers", format!("group {} has no erasers", g.group))),
            Some(e) => {
                let got = expand(&e.erasers, &sk);
                if got != want {
                    let extra: Vec<String> = got.difference(&want).map(Keyword::render).collect();
                    let lost: Vec<String> = want.difference(&got).map(Keyword::render).collect();
                    out.push(Finding::error(
                        "erasers",
                        format!("group {} erasers also erase {extra:?} and miss {lost:?}", g.group),
                    ));
                }
            }
        }
    }
    out
}

/// Queries whose behavior is by design or left undefined: each non-sold brand
/// alone, and a query made of two sold brands.
fn expected_findings(account: &Account) -> Vec<Finding> {
    let sim = Simulator::new(account);
    let mut out = Vec::new();
    for b in &account.non_brands {
        let t = sim.simulate(b);
        out.push(Finding::info("non_sold_brand", format!("non-sold brand query: {}", t.disposition), b));
    }
    if let [a, b, ..] = account.brands.as_slice() {
        let mut tokens = a.tokens().to_vec();
        tokens.extend(b.tokens().iter().cloned());
        let q = Keyword::from_tokens(tokens).expect("non-empty");
        if !account.sk().contains(&q) {
            let t = sim.simulate(&q);
            out.push(Finding::info("multi_brand", format!("two sold brands: {}", t.disposition), &q));
        }
    }
    out
}

pub fn verify(account: &Account, probes: ProbeConfig) -> Result<VerificationReport> {
    let mut structural = verify_structure(account);
    let property1 = verify_property1(account);
    for c in &property1.counterexamples {
        if let Disposition::Ambiguous { details } = &c.actual {
            structural.push(Finding {
                severity: Severity::Error,
                kind: "ambiguous".into(),
                detail: details.clone(),
                query: Some(c.query.clone()),
            });
        }
    }
    let property2 = verify_property2(account, probes)?;
    let property3 = verify_property3(account, probes)?;
    structural.extend(expected_findings(account));
    structural.sort();
    Ok(VerificationReport { property1, property2, property3, structural })
}
