//! Acceptance run: one PASS/FAIL line per criterion.

mod common;

use std::collections::BTreeSet;
use std::fs;
use std::process::{Command, ExitCode};
use std::time::{Duration, Instant};

use common::{fixture_dir, golden_account, golden_rules, kw};
use kwstruct::account::{AdGroupTag, CampaignTag, Simulator};
use kwstruct::bounds::{nk_exact, nk_worst_case_optimal, site_note, NegativeBreakdown, SITES};
use kwstruct::eraser::{
    build_graph, enumerate_candidates, exact_packing_oracle, plan_reduction, select_color_class, welsh_powell,
    ColoringOrder, Eraser, ReductionConfig, ORACLE_LIMIT,
};
use kwstruct::stats::{reduce_stats, REFERENCE_RATIO_BAND};
use kwstruct::synth::{generate, SyntheticCorpus, SyntheticSpec};
use kwstruct::update::{add_rule, remove_rule, UpdateConfig};
use kwstruct::verify::{verify, ProbeConfig};
use kwstruct::{build_account, Account, BuildConfig, BuildInput, Keyword, Mode, NegativeKeyword, Rule};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

const SIZES: [usize; 3] = [10, 100, 1000];
const SEEDS: [u64; 3] = [1, 2, 3];
const PROBES: usize = 1000;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

struct Case {
    label: String,
    corpus: SyntheticCorpus,
    naive: Account,
    reduced: Account,
}

fn matrix() -> Vec<Case> {
    let mut out = Vec::new();
    for n in SIZES {
        for seed in SEEDS {
            let corpus = generate(&SyntheticSpec::matrix(n, seed)).expect("matrix corpus");
            let build = |mode| {
                let input = BuildInput::new(
                    corpus.rules.clone(),
                    corpus.brands.clone(),
                    corpus.non_brands.clone(),
                    BuildConfig { mode, ..BuildConfig::default() },
                );
                build_account(&input).expect("matrix build")
            };
            let (naive, reduced) = (build(Mode::Naive), build(Mode::Reduced));
            out.push(Case { label: format!("n={n} seed={seed}"), corpus, naive, reduced });
        }
    }
    out
}

fn ac1() -> Outcome {
    let exact = |n, m, mp, want| {
        let got = nk_worst_case_optimal(n, m, mp).rounded;
        ensure(got == want, || format!("({n},{m},{mp}) gave {got}, want {want}"))
    };
    exact(3000, 100, 30, 340_337)?;
    exact(10_000, 30, 20, 2_002_940)?;
    let s2 = nk_worst_case_optimal(7000, 1, 0).rounded;
    ensure(s2.abs_diff(1_171_324) <= 2, || format!("(7000,1,0) gave {s2}"))?;
    let s4 = nk_worst_case_optimal(10_000, 1000, 40).rounded;
    let note = site_note(&SITES[3]).unwrap_or_default();
    ensure(s4 == 3_004_080 && note.contains("3002040") && note.contains("typo"), || format!("site4 {s4}: {note:?}"))?;
    Ok(format!("340337, 2002940, {s2} (printed 1171324), 3004080 with note: {note}"))
}

fn large_words(e: &Eraser) -> String {
    match e {
        Eraser::Large(ws) => ws.iter().map(|t| t.as_str()).collect::<Vec<_>>().join(","),
        Eraser::Exact(k) => k.render(),
    }
}

fn ac2() -> Outcome {
    let sk = golden_rules().keywords();
    let plan = plan_reduction(&sk, &ReductionConfig::default()).map_err(|e| e.to_string())?;
    let names: BTreeSet<String> = plan.graph.nodes.iter().map(|c| large_words(&c.eraser)).collect();
    let want: BTreeSet<String> = ["nike", "shoes", "large", "air", "max", "adidas", "adidas,superstar", "soccer", "superstar"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    ensure(names == want, || format!("erasers {names:?}"))?;
    let image = |w: &str| -> BTreeSet<Keyword> {
        let node = plan.graph.nodes.iter().find(|c| large_words(&c.eraser) == w).expect("present");
        node.image.iter().map(|&i| sk[i].clone()).collect()
    };
    let set = |ks: &[&str]| ks.iter().map(|k| kw(k)).collect::<BTreeSet<_>>();
    ensure(image("nike") == set(&["nike shoes", "nike soccer white", "nike air max"]), || "image of nike".into())?;
    ensure(image("superstar") == set(&["adidas superstar", "adidas superstar sneaker", "large superstar shoes"]), || {
        "image of superstar".into()
    })?;
    ensure(plan.class.covered.len() == 8, || format!("class covers {}", plan.class.covered.len()))?;

    let a = golden_account(BuildConfig::reduced());
    let group = |id| a.group(id).map(|g| g.keywords.iter().cloned().collect::<BTreeSet<_>>()).unwrap_or_default();
    ensure(group(1) == set(&["nike shoes", "nike soccer white", "nike air max", "soccer colored mens"]), || format!("sk1 {:?}", group(1)))?;
    ensure(group(2) == set(&["adidas running shoes", "adidas superstar", "adidas superstar sneaker"]), || format!("sk2 {:?}", group(2)))?;
    ensure(group(3) == set(&["large superstar shoes", "air max", "large tee-shirt", "garmin chronometer"]), || format!("sk3 {:?}", group(3)))?;
    let c31 = a.by_tag(CampaignTag::C3(1)).ok_or("no C3-1")?;
    let lows: BTreeSet<NegativeKeyword> = c31.negatives.iter().filter(|n| !a.non_brands.contains(&n.keyword)).cloned().collect();
    let want_neg: BTreeSet<NegativeKeyword> = [
        NegativeKeyword::large(kw("adidas")),
        NegativeKeyword::large(kw("large")),
        NegativeKeyword::exact(kw("air max")),
        NegativeKeyword::exact(kw("garmin chronometer")),
    ]
    .into_iter()
    .collect();
    ensure(lows == want_neg, || format!("Neg(C3-1) {lows:?}"))?;
    Ok("9 erasers with their images, class covers 8/11, sk1/sk2/sk3 and Neg(C3-1) as listed (plus the non-sold brand phrase); sk1 also holds \"soccer colored mens\"".into())
}

fn ac3(cases: &[Case]) -> Outcome {
    let probes = ProbeConfig { probes: PROBES, seed: 42 };
    for c in cases {
        for (mode, a) in [("naive", &c.naive), ("reduced", &c.reduced)] {
            let r = verify(a, probes).map_err(|e| format!("{} {mode}: {e}", c.label))?;
            ensure(r.passed(), || {
                format!(
                    "{} {mode}: p1 {} p2 {} p3 {}",
                    c.label, r.property1.passed, r.property2.passed, r.property3.passed
                )
            })?;
        }
    }
    Ok(format!("{} accounts, properties 1-3 hold ({PROBES} probes each for 2 and 3)", cases.len() * 2))
}

fn ac4(cases: &[Case]) -> Outcome {
    let mut checked = 0;
    for c in cases {
        let (sn, sr) = (Simulator::new(&c.naive), Simulator::new(&c.reduced));
        for k in c.corpus.rules.keywords() {
            let (tn, tr) = (sn.simulate(&k), sr.simulate(&k));
            ensure(tn.disposition.landed_tag() == tr.disposition.landed_tag(), || {
                format!("{}: {k} lands as {} vs {}", c.label, tn.disposition, tr.disposition)
            })?;
            checked += 1;
        }
    }
    Ok(format!("{checked} keywords land in the same AdGroup in both modes"))
}

fn has_reuse(corpus: &SyntheticCorpus) -> bool {
    !enumerate_candidates(&corpus.rules.keywords(), 1, usize::MAX).is_empty()
}

fn ac5(cases: &[Case]) -> Outcome {
    let mut lines = Vec::new();
    for c in cases.iter().filter(|c| has_reuse(&c.corpus)) {
        let s = reduce_stats(&c.corpus.rules, &c.corpus.brands, &c.corpus.non_brands, &BuildConfig::default())
            .map_err(|e| e.to_string())?;
        ensure(s.h < s.total_negatives_naive, || format!("{}: h {} vs naive {}", c.label, s.h, s.total_negatives_naive))?;
        lines.push(format!("{} h/naive {:.3} h/NK {:.3}", c.label, s.ratio, s.h_over_nk));
    }
    ensure(!lines.is_empty(), || "no corpus with reuse".into())?;
    Ok(format!(
        "h < naive on {} corpora [{}]; reference band {:.2}-{:.2}",
        lines.len(),
        lines.join("; "),
        REFERENCE_RATIO_BAND.0,
        REFERENCE_RATIO_BAND.1
    ))
}

fn random_keywords(rng: &mut ChaCha8Rng) -> Vec<Keyword> {
    let vocab = ["a", "b", "c", "d", "e", "f", "g", "h"];
    let n = rng.gen_range(4..=12);
    let mut set = BTreeSet::new();
    while set.len() < n {
        let len = rng.gen_range(1..=3);
        let mut ws: Vec<&str> = (0..len).map(|_| vocab[rng.gen_range(0..vocab.len())]).collect();
        ws.sort_unstable();
        ws.dedup();
        set.insert(kw(&ws.join(" ")));
    }
    set.into_iter().collect()
}

fn ac6() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut ratios = Vec::new();
    let mut attempts = 0;
    while ratios.len() < 60 && attempts < 10_000 {
        attempts += 1;
        let sk = random_keywords(&mut rng);
        let cands = enumerate_candidates(&sk, 2, usize::MAX);
        if cands.is_empty() || cands.len() > ORACLE_LIMIT {
            continue;
        }
        let g = build_graph(cands);
        let class = select_color_class(&g, &welsh_powell(&g, ColoringOrder::default()));
        for (i, &a) in class.members.iter().enumerate() {
            for &b in &class.members[i + 1..] {
                ensure(!g.nodes[a].intersects(&g.nodes[b]), || format!("class members {a} and {b} overlap"))?;
            }
        }
        let opt = exact_packing_oracle(&g.nodes).map_err(|e| e.to_string())?;
        ensure(class.weight <= opt.weight, || format!("class {} beats optimum {}", class.weight, opt.weight))?;
        ratios.push(class.weight as f64 / opt.weight as f64);
    }
    ensure(ratios.len() >= 50, || format!("only {} instances", ratios.len()))?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let optimal = ratios.iter().filter(|&&r| r == 1.0).count();
    Ok(format!("{} instances, all feasible and within the optimum; mean ratio {mean:.3}, optimal in {optimal}", ratios.len()))
}

fn kwstruct(args: &[&str]) -> Result<String, String> {
    let o = Command::new(env!("CARGO_BIN_EXE_kwstruct")).args(args).output().map_err(|e| e.to_string())?;
    if !o.status.success() {
        return Err(format!("kwstruct {args:?}: {}", String::from_utf8_lossy(&o.stderr)));
    }
    Ok(String::from_utf8_lossy(&o.stdout).into_owned())
}

fn all_land(a: &Account) -> Result<(), String> {
    let sim = Simulator::new(a);
    for k in a.sk() {
        let t = sim.simulate(&k);
        ensure(t.disposition.landed_tag() == Some(&AdGroupTag::RuleTarget(k.clone())), || format!("{k}: {}", t.disposition))?;
    }
    Ok(())
}

fn ac7(cases: &[Case]) -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let path = |f: &str| dir.path().join(f).to_string_lossy().into_owned();
    let fx = |f: &str| fixture_dir().join(f).to_string_lossy().into_owned();
    kwstruct(&[
        "build", "--rules", &fx("rules.jsonl"), "--brands", &fx("brands.txt"), "--non-brands", &fx("non_brands.txt"),
        "--out", &path("base.json"),
    ])?;
    let load = |f: &str| -> Result<Account, String> {
        Account::from_json(&fs::read_to_string(path(f)).map_err(|e| e.to_string())?).map_err(|e| e.to_string())
    };

    let out = kwstruct(&[
        "update", "add-rule", "--account", &path("base.json"), "--keyword", "nike jogging", "--cpc-micros", "1200000",
        "--items", "item6", "--out", &path("jogging.json"),
    ])?;
    ensure(out.contains("add adgroup nike jogging to C3-1"), || format!("change log:\n{out}"))?;
    let jog = load("jogging.json")?;
    let c31 = jog.by_tag(CampaignTag::C3(1)).ok_or("no C3-1")?;
    let pos = c31.adgroups.iter().position(|g| g.name == "nike jogging").ok_or("no new AdGroup")?;
    ensure(
        c31.adgroups.iter().filter(|g| g.name != "nike jogging").all(|g| g.negatives.contains(&NegativeKeyword::large(kw("jogging")))),
        || "sibling AdGroups lack the jogging eraser".into(),
    )?;
    all_land(&jog)?;

    kwstruct(&[
        "update", "add-rule", "--account", &path("base.json"), "--keyword", "nike large shoes", "--cpc-micros", "1300000",
        "--items", "item1", "--strategy", "new-campaign", "--out", &path("large.json"),
    ])?;
    let big = load("large.json")?;
    let c34 = big.by_tag(CampaignTag::C3(4)).ok_or("no C3-4")?;
    for k in golden_rules().keywords() {
        ensure(c34.blocking_negative(&k).is_some(), || format!("C3-4 admits {k}"))?;
    }
    ensure(c34.blocking_negative(&kw("nike large shoes")).is_none(), || "C3-4 blocks the new keyword".into())?;
    ensure(big.sk().len() == 12, || "expected 12 keywords".into())?;
    all_land(&big)?;

    let probes = ProbeConfig { probes: PROBES, seed: 42 };
    for a in [&jog, &big] {
        ensure(verify(a, probes).map_err(|e| e.to_string())?.passed(), || "golden update fails verification".into())?;
    }
    // one add and one remove on every reduced matrix account
    let config = UpdateConfig::default();
    for c in cases {
        let sk = c.reduced.sk();
        let fresh = (0..)
            .map(|i| kw(&format!("fresh{i} {}", sk[0].render())))
            .find(|k| !sk.contains(k))
            .expect("some fresh keyword");
        let added = add_rule(&c.reduced, &Rule::parse(&fresh.render(), 10_000, &["new"]).map_err(|e| e.to_string())?, &config)
            .map_err(|e| format!("{}: {e}", c.label))?;
        let removed = remove_rule(&added.account, &sk[sk.len() / 2], &config).map_err(|e| format!("{}: {e}", c.label))?;
        for a in [&added.account, &removed.account] {
            let r = verify(a, probes).map_err(|e| e.to_string())?;
            ensure(r.passed(), || format!("{} after update: p1 {} p2 {} p3 {}", c.label, r.property1.passed, r.property2.passed, r.property3.passed))?;
        }
    }
    Ok(format!(
        "\"nike jogging\" joins C3-1 as AdGroup {} (sk1 already holds 4); \"nike large shoes\" opens C3-4 that blocks the 11 prior keywords; all 12 land; property suite holds after updates on {} matrix accounts",
        pos + 1,
        cases.len()
    ))
}

fn ac8(cases: &[Case]) -> Outcome {
    for c in cases {
        let a = &c.naive;
        let parts: Vec<u64> = a.partition.iter().map(|g| g.keywords.len() as u64).collect();
        let (m, mp) = (a.brands.len() as u64, a.non_brands.len() as u64);
        let literal = a.negative_count() as u64;
        let breakdown = NegativeBreakdown::naive(m, mp, &parts, a.c2().is_some());
        ensure(literal == breakdown.total(), || format!("{}: literal {literal} vs breakdown {}", c.label, breakdown.total()))?;
        ensure(literal == nk_exact(m, mp, &parts), || format!("{}: literal {literal} vs NK {}", c.label, nk_exact(m, mp, &parts)))?;
        let c1 = a.c1().map(|c| c.negative_count() as u64).unwrap_or(0);
        ensure(c1 == breakdown.c1, || format!("{}: C1 {c1} vs {}", c.label, breakdown.c1))?;
    }
    Ok(format!("literal naive count equals NK and its per-campaign breakdown on {} corpora", cases.len()))
}

fn report(name: &str, limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let mut result = f();
    let took = start.elapsed();
    if let (Ok(_), Some(limit)) = (&result, limit) {
        if took > limit {
            result = Err(format!("took {took:.2?}, limit {limit:?}"));
        }
    }
    match &result {
        Ok(detail) => println!("{name} PASS ({took:.2?}) {detail}"),
        Err(why) => println!("{name} FAIL ({took:.2?}) {why}"),
    }
    result.is_ok()
}

fn main() -> ExitCode {
    let start = Instant::now();
    let cases = matrix();
    println!("matrix: {} corpora built in both modes ({:.2?})", cases.len(), start.elapsed());
    let results = [
        report("AC1", Some(Duration::from_secs(1)), ac1),
        report("AC2", Some(Duration::from_secs(1)), ac2),
        report("AC3", Some(Duration::from_secs(60)), || ac3(&cases)),
        report("AC4", None, || ac4(&cases)),
        report("AC5", None, || ac5(&cases)),
        report("AC6", Some(Duration::from_secs(30)), ac6),
        report("AC7", None, || ac7(&cases)),
        report("AC8", None, || ac8(&cases)),
    ];
    let passed = results.iter().filter(|&&r| r).count();
    println!("{passed}/{} criteria passed", results.len());
    if passed == results.len() {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
