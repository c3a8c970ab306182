mod common;

use common::{assert_sk_lands, golden_account, golden_rules, kw};
use kwstruct::rules::ItemId;
use kwstruct::update::{add_rule, remove_item, Case2Strategy, UpdateConfig};
use kwstruct::verify::{verify, ProbeConfig};
use kwstruct::{build_account, Account, BuildConfig, BuildInput, Rule, RuleSet};

fn rule(k: &str) -> Rule {
    Rule::parse(k, 10_000, &["i"]).unwrap()
}

fn build(list: &[&str]) -> Account {
    let rules = RuleSet::from_rules(list.iter().map(|k| rule(k))).unwrap();
    build_account(&BuildInput::new(rules, vec![], vec![], BuildConfig::reduced())).unwrap()
}

#[test]
fn growing_group_triggers_rebalance_advice() {
    let mut a = build(&["nike a", "nike b", "c d", "e f"]);
    let config = UpdateConfig::default();
    let mut first = None;
    for t in 1..=6 {
        let out = add_rule(&a, &rule(&format!("nike x{t}")), &config).unwrap();
        if out.balance.recommended && first.is_none() {
            first = Some(t);
            assert!(out.balance.reason.as_deref().unwrap().contains("largest group"));
        }
        a = out.account;
        assert_sk_lands(&a);
    }
    // largest group 6 > 2·sqrt(8)
    assert_eq!(first, Some(4));
}

#[test]
fn many_groups_trigger_rebalance_advice() {
    let mut list = Vec::new();
    for i in 1..=4 {
        list.push(format!("u{i} p{i}"));
        list.push(format!("u{i} q{i}"));
    }
    let refs: Vec<&str> = list.iter().map(String::as_str).collect();
    let mut a = build(&refs);
    let mut last = None;
    for (i, k) in ["u1 u2 z1", "u1 u3 z2", "u1 u4 z3"].iter().enumerate() {
        let out = add_rule(&a, &rule(k), &UpdateConfig::default()).unwrap();
        a = out.account;
        assert_sk_lands(&a);
        if i < 2 {
            assert!(!out.balance.recommended, "{:?}", out.balance);
        }
        last = Some(out.balance);
    }
    let b = last.unwrap();
    assert_eq!(b.groups, 7);
    assert!(b.recommended && b.reason.unwrap().contains("groups"));
}

#[test]
fn remove_item_drops_rules_that_lose_every_item() {
    let a = golden_account(BuildConfig::reduced());
    let rules = golden_rules();
    let (out, left) = remove_item(&a, &rules, &ItemId::new("item2").unwrap(), &UpdateConfig::default()).unwrap();
    // "large tee-shirt" keeps item3; the other item2 rules go
    assert_eq!(left.len(), 8);
    assert!(left.get(&kw("large tee-shirt")).is_some());
    assert!(left.get(&kw("air max")).is_none());
    assert_eq!(out.account.sk().len(), 8);
    let r = verify(&out.account, ProbeConfig { probes: 300, seed: 2 }).unwrap();
    assert!(r.passed(), "{r:#?}");
}

#[test]
fn cheapest_group_strategy_on_golden() {
    let a = golden_account(BuildConfig::reduced());
    let config = UpdateConfig { strategy: Case2Strategy::MinNegatives, ..UpdateConfig::default() };
    let out = add_rule(&a, &rule("nike large shoes"), &config).unwrap();
    assert_eq!(out.account.partition.len(), 3);
    assert!(out.account.negative_count() > a.negative_count());
    let r = verify(&out.account, ProbeConfig { probes: 300, seed: 4 }).unwrap();
    assert!(r.passed(), "{r:#?}");
}
