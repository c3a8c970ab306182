mod common;

use std::collections::BTreeSet;

use common::{assert_sk_lands, kw};
use kwstruct::account::{CampaignTag, Simulator};
use kwstruct::bounds::{nk_exact, NegativeBreakdown};
use kwstruct::changelog::replay;
use kwstruct::update::{add_rule, remove_rule, Case2Strategy, UpdateConfig};
use kwstruct::verify::{verify, verify_structure, ProbeConfig, Severity};
use kwstruct::{build_account, Account, BuildConfig, BuildInput, Keyword, Mode, NegativeKeyword, Rule, RuleSet};
use proptest::prelude::*;

const VOCAB: &[&str] = &["run", "shoe", "red", "max", "air", "tee", "kid", "sale"];
const BRANDS: &[&str] = &["acme", "zenith"];

fn arb_keyword() -> impl Strategy<Value = Keyword> {
    (prop::sample::subsequence(VOCAB, 1..=3), prop::option::weighted(0.25, prop::sample::select(BRANDS)), any::<bool>())
        .prop_map(|(mut ws, brand, front)| {
            if let Some(b) = brand {
                if front {
                    ws.insert(0, b);
                } else {
                    ws.push(b);
                }
            }
            kw(&ws.join(" "))
        })
}

fn arb_rules() -> impl Strategy<Value = RuleSet> {
    prop::collection::btree_set(arb_keyword(), 1..30).prop_map(|ks| {
        RuleSet::from_rules(ks.into_iter().enumerate().map(|(i, k)| {
            Rule::parse(&k.render(), 10_000 * (i as u64 + 1), &[&format!("item{}", i % 4)]).unwrap()
        }))
        .unwrap()
    })
}

fn brands() -> (Vec<Keyword>, Vec<Keyword>) {
    (BRANDS.iter().map(|b| kw(b)).collect(), vec![kw("nobrand")])
}

fn build(rules: &RuleSet, mode: Mode) -> Account {
    let (sb, snb) = brands();
    build_account(&BuildInput::new(rules.clone(), sb, snb, BuildConfig { mode, ..BuildConfig::default() })).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn every_build_routes_correctly(rules in arb_rules(), naive in any::<bool>()) {
        let a = build(&rules, if naive { Mode::Naive } else { Mode::Reduced });
        let r = verify(&a, ProbeConfig { probes: 100, seed: 5 }).unwrap();
        prop_assert!(r.passed(), "{:#?}", r);
    }

    #[test]
    fn modes_land_alike(rules in arb_rules()) {
        let naive = build(&rules, Mode::Naive);
        let reduced = build(&rules, Mode::Reduced);
        let (sn, sr) = (Simulator::new(&naive), Simulator::new(&reduced));
        for k in rules.keywords() {
            let (tn, tr) = (sn.simulate(&k), sr.simulate(&k));
            prop_assert_eq!(tn.disposition.landed_tag(), tr.disposition.landed_tag());
        }
    }

    #[test]
    fn naive_count_matches_formula(rules in arb_rules(), with_brands in any::<bool>()) {
        let (sb, snb) = if with_brands { brands() } else { (Vec::new(), vec![kw("nobrand")]) };
        // without sold brands, brand-bearing keywords are still legal
        let a = build_account(&BuildInput::new(rules, sb.clone(), snb.clone(), BuildConfig::naive())).unwrap();
        let parts: Vec<u64> = a.partition.iter().map(|g| g.keywords.len() as u64).collect();
        let b = NegativeBreakdown::naive(sb.len() as u64, snb.len() as u64, &parts, with_brands);
        prop_assert_eq!(a.negative_count() as u64, b.total());
        if with_brands {
            prop_assert_eq!(a.negative_count() as u64, nk_exact(sb.len() as u64, snb.len() as u64, &parts));
        }
    }

    #[test]
    fn extra_negatives_never_unblock(rules in arb_rules(), q in arb_keyword(), extra in arb_keyword(), pick in 0usize..8) {
        let a = build(&rules, Mode::Reduced);
        let mut b = a.clone();
        let i = pick % b.campaigns.len();
        b.campaigns[i].negatives.insert(NegativeKeyword::large(extra));
        for (ca, cb) in a.campaigns.iter().zip(&b.campaigns) {
            if ca.blocking_negative(&q).is_some() {
                prop_assert!(cb.blocking_negative(&q).is_some());
            }
        }
    }

    #[test]
    fn snapshot_round_trip(rules in arb_rules()) {
        let a = build(&rules, Mode::Reduced);
        let text = a.to_json();
        let back = Account::from_json(&text).unwrap();
        prop_assert_eq!(&back, &a);
        prop_assert_eq!(back.to_json(), text);
    }

    #[test]
    fn updates_keep_invariants(
        rules in arb_rules(),
        ops in prop::collection::vec((any::<bool>(), arb_keyword(), any::<prop::sample::Index>()), 1..6),
        min_neg in any::<bool>(),
    ) {
        let config = UpdateConfig {
            strategy: if min_neg { Case2Strategy::MinNegatives } else { Case2Strategy::NewCampaign },
            ..UpdateConfig::default()
        };
        let mut a = build(&rules, Mode::Reduced);
        for (add, k, idx) in ops {
            let sk = a.sk();
            let out = if add && !sk.contains(&k) {
                add_rule(&a, &Rule::parse(&k.render(), 50_000, &["new"]).unwrap(), &config).unwrap()
            } else if sk.len() > 1 {
                remove_rule(&a, idx.get(&sk), &config).unwrap()
            } else {
                continue;
            };
            prop_assert_eq!(&replay(&a, &out.changes).unwrap(), &out.account);
            a = out.account;
            assert_sk_lands(&a);
            prop_assert!(verify_structure(&a).iter().all(|f| f.severity != Severity::Error));
            let groups: BTreeSet<usize> = a.partition.iter().map(|g| g.group).collect();
            let c3: BTreeSet<usize> = a.c3_campaigns().filter_map(|c| match c.tag { CampaignTag::C3(i) => Some(i), _ => None }).collect();
            prop_assert_eq!(groups, c3);
        }
        let r = verify(&a, ProbeConfig { probes: 100, seed: 9 }).unwrap();
        prop_assert!(r.passed(), "{:#?}", r);
    }
}
