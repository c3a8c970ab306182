#![allow(dead_code)]

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use kwstruct::account::AdGroupTag;
use kwstruct::rules::{read_brand_list, read_rules_jsonl};
use kwstruct::{build_account, normalize, Account, BuildConfig, BuildInput, Keyword, RuleSet, Simulator};

pub fn fixture_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/golden")
}

pub fn kw(s: &str) -> Keyword {
    normalize(s).unwrap()
}

pub fn golden_rules() -> RuleSet {
    read_rules_jsonl(BufReader::new(File::open(fixture_dir().join("rules.jsonl")).unwrap())).unwrap()
}

pub fn golden_brands() -> (Vec<Keyword>, Vec<Keyword>) {
    let read = |name: &str| read_brand_list(BufReader::new(File::open(fixture_dir().join(name)).unwrap())).unwrap();
    (read("brands.txt"), read("non_brands.txt"))
}

pub fn golden_account(config: BuildConfig) -> Account {
    let (sb, snb) = golden_brands();
    build_account(&BuildInput::new(golden_rules(), sb, snb, config)).unwrap()
}

/// Every keyword of SK lands in its own AdGroup.
pub fn assert_sk_lands(a: &Account) {
    let sim = Simulator::new(a);
    for k in a.sk() {
        let t = sim.simulate(&k);
        assert_eq!(t.disposition.landed_tag(), Some(&AdGroupTag::RuleTarget(k.clone())), "{k}: {}", t.disposition);
    }
}
