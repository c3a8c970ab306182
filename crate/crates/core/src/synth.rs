//! Seeded synthetic rule corpora.
//!
//! Tokens are drawn with Zipf-like weights so popular words recur across
//! keywords and large erasers have something to erase. Brand names live in
//! their own namespace (vocabulary words never end in `x`), so a brand phrase
//! only ever appears where it was injected.

use std::collections::{BTreeSet, HashSet};
use std::fs;
use std::io;
use std::path::Path;

use rand::distributions::{Distribution, WeightedIndex};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyword::{Keyword, Token};
use crate::rules::{write_brand_list, write_rules_jsonl, ItemId, Money, Rule, RuleSet};

const SYLLABLES: &[&str] = &[
    "ka", "lo", "mi", "nu", "pe", "ra", "si", "to", "va", "zu", "bo", "de", "fi", "ga", "hu", "jo",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SyntheticSpec {
    pub n: usize,
    pub vocab_size: usize,
    pub min_words: usize,
    pub max_words: usize,
    pub brand_count: usize,
    pub non_brand_count: usize,
    /// Share of keywords that get a sold brand injected.
    pub brand_fraction: f64,
    /// Token weights are 1/rank^s; 0 draws uniformly.
    pub zipf_exponent: f64,
    pub seed: u64,
}

impl SyntheticSpec {
    /// The corpus shape used by the test matrix: vocabulary of max(12, 0.3n).
    pub fn matrix(n: usize, seed: u64) -> Self {
        SyntheticSpec {
            n,
            vocab_size: (n * 3 / 10).max(12),
            min_words: 1,
            max_words: 3,
            brand_count: 5,
            non_brand_count: 3,
            brand_fraction: 0.2,
            zipf_exponent: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n == 0 {
            return Err(Error::NonPositive { what: "n" });
        }
        if self.vocab_size == 0 {
            return Err(Error::NonPositive { what: "vocab_size" });
        }
        if self.min_words == 0 {
            return Err(Error::NonPositive { what: "min_words" });
        }
        if self.max_words < self.min_words {
            return Err(Error::InvalidAccount(format!(
                "max_words {} is below min_words {}",
                self.max_words, self.min_words
            )));
        }
        if !(0.0..=1.0).contains(&self.brand_fraction) {
            return Err(Error::InvalidAccount(format!("brand_fraction {} is outside [0, 1]", self.brand_fraction)));
        }
        if !(self.zipf_exponent >= 0.0 && self.zipf_exponent.is_finite()) {
            return Err(Error::InvalidAccount(format!("zipf_exponent {} must be finite and >= 0", self.zipf_exponent)));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SyntheticCorpus {
    pub rules: RuleSet,
    pub brands: Vec<Keyword>,
    pub non_brands: Vec<Keyword>,
}

/// Word number `i` spelled in base-16 syllables, at least two syllables long.
fn syllable_word(mut i: usize) -> String {
    let mut s = String::new();
    loop {
        s.push_str(SYLLABLES[i % SYLLABLES.len()]);
        i /= SYLLABLES.len();
        if i == 0 {
            break;
        }
    }
    if s.len() < 4 {
        s.push_str("ne");
    }
    s
}

fn token(text: String) -> Token {
    Token::new(text).expect("synthetic tokens are lowercase without whitespace")
}

pub fn vocabulary(size: usize) -> Vec<Token> {
    (0..size).map(|i| token(syllable_word(i))).collect()
}

fn brand(i: usize) -> Keyword {
    Keyword::from_tokens(vec![token(format!("{}x", syllable_word(i)))]).expect("non-empty")
}

pub fn generate(spec: &SyntheticSpec) -> Result<SyntheticCorpus> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let vocab = vocabulary(spec.vocab_size);
    let zipf = WeightedIndex::new((1..=vocab.len()).map(|r| (r as f64).powf(-spec.zipf_exponent))).expect("weights are positive");
    let brands: Vec<Keyword> = (0..spec.brand_count).map(brand).collect();
    let non_brands: Vec<Keyword> = (spec.brand_count..spec.brand_count + spec.non_brand_count).map(brand).collect();

    let mut seen: HashSet<Keyword> = HashSet::new();
    let mut rules = RuleSet::new();
    let budget = spec.n.saturating_mul(200).max(1000);
    for _ in 0..budget {
        if rules.len() == spec.n {
            break;
        }
        let want = rng.gen_range(spec.min_words..=spec.max_words).min(vocab.len());
        let mut words: Vec<Token> = Vec::with_capacity(want + 1);
        let mut used = BTreeSet::new();
        while words.len() < want {
            let i = zipf.sample(&mut rng);
            if used.insert(i) {
                words.push(vocab[i].clone());
            }
        }
        if !brands.is_empty() && rng.gen_bool(spec.brand_fraction) {
            let b = &brands[rng.gen_range(0..brands.len())];
            let at = rng.gen_range(0..=words.len());
            words.splice(at..at, b.tokens().iter().cloned());
        }
        let keyword = Keyword::from_tokens(words).expect("at least one word");
        if !seen.insert(keyword.clone()) {
            continue;
        }
        let idx = rules.len();
        let cpc = Money::from_micros(rng.gen_range(10..=200) * 10_000);
        let items: BTreeSet<ItemId> = (0..rng.gen_range(1..=3))
            .map(|j| ItemId::new(format!("item-{}", (idx * 7 + j * 13) % (spec.n.max(2) * 2))).expect("non-empty"))
            .collect();
        rules.push(Rule::new(keyword, cpc, items)?)?;
    }
    if rules.len() < spec.n {
        return Err(Error::InvalidAccount(format!(
            "vocabulary of {} words cannot yield {} distinct keywords",
            spec.vocab_size, spec.n
        )));
    }
    Ok(SyntheticCorpus { rules, brands, non_brands })
}

/// Writes `rules.jsonl`, `brands.txt` and `non_brands.txt` into `dir`.
pub fn write_corpus(corpus: &SyntheticCorpus, dir: &Path) -> io::Result<()> {
    fs::create_dir_all(dir)?;
    write_rules_jsonl(&corpus.rules, fs::File::create(dir.join("rules.jsonl"))?)?;
    write_brand_list(&corpus.brands, fs::File::create(dir.join("brands.txt"))?)?;
    write_brand_list(&corpus.non_brands, fs::File::create(dir.join("non_brands.txt"))?)?;
    Ok(())
}
