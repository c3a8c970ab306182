mod common;

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use common::fixture_dir;
use kwstruct::account::CampaignTag;
use kwstruct::changelog::{Change, ChangeLog};
use kwstruct::Account;

fn kwstruct(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_kwstruct")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> String {
    fixture_dir().join(name).to_string_lossy().into_owned()
}

fn build_golden(dir: &Path, mode: &str) -> (String, Output) {
    let out = dir.join(format!("{mode}.json")).to_string_lossy().into_owned();
    let o = kwstruct(&[
        "build",
        "--rules",
        &fixture("rules.jsonl"),
        "--brands",
        &fixture("brands.txt"),
        "--non-brands",
        &fixture("non_brands.txt"),
        "--mode",
        mode,
        "--out",
        &out,
    ]);
    (out, o)
}

fn count(text: &str, key: &str) -> usize {
    text.lines().find_map(|l| l.strip_prefix(key)).unwrap().trim().parse().unwrap()
}

#[test]
fn build_then_simulate_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let (snap, o) = build_golden(dir.path(), "reduced");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert_eq!(count(&text, "campaigns:"), 5);
    assert_eq!(count(&text, "groups:"), 3);
    assert!(count(&text, "negatives naive:") > count(&text, "negatives reduced:"));

    let s = kwstruct(&["simulate", "--account", &snap, "nike shoes", "reebok"]);
    assert!(s.status.success());
    let s = stdout(&s);
    assert!(s.contains("nike shoes: landed in C3-1 / nike shoes"), "{s}");
    assert!(s.contains("reebok: fell through"));

    let v = kwstruct(&["verify", "--account", &snap, "--probes", "300", "--seed", "1"]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));
}

#[test]
fn verify_fails_on_broken_snapshot() {
    let dir = tempfile::tempdir().unwrap();
    let (snap, _) = build_golden(dir.path(), "reduced");
    let mut a = Account::from_json(&fs::read_to_string(&snap).unwrap()).unwrap();
    a.campaigns.iter_mut().find(|c| c.tag == CampaignTag::C3(1)).unwrap().negatives.clear();
    fs::write(&snap, a.to_json()).unwrap();
    let report = dir.path().join("report.json");
    let v = kwstruct(&["verify", "--account", &snap, "--probes", "50", "--out", report.to_str().unwrap()]);
    assert_eq!(v.status.code(), Some(1));
    assert!(stdout(&v).contains("property 1: FAIL"));
    assert!(fs::read_to_string(report).unwrap().contains("ambiguous"));
}

#[test]
fn snapshot_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (snap, _) = build_golden(dir.path(), "naive");
    let text = fs::read_to_string(&snap).unwrap();
    assert_eq!(Account::from_json(&text).unwrap().to_json(), text);
    let (again, _) = build_golden(&dir.path().join("."), "naive");
    assert_eq!(fs::read_to_string(again).unwrap(), text);
}

#[test]
fn add_rule_names_the_campaign() {
    let dir = tempfile::tempdir().unwrap();
    let (snap, _) = build_golden(dir.path(), "reduced");
    let next = dir.path().join("next.json");
    let changes = dir.path().join("changes.json");
    let o = kwstruct(&[
        "update",
        "add-rule",
        "--account",
        &snap,
        "--keyword",
        "nike jogging",
        "--cpc-micros",
        "1200000",
        "--items",
        "item6",
        "--out",
        next.to_str().unwrap(),
        "--changes",
        changes.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("add adgroup nike jogging to C3-1"), "{text}");
    let log: ChangeLog = serde_json::from_str(&fs::read_to_string(changes).unwrap()).unwrap();
    assert!(log.changes.iter().any(|c| matches!(c, Change::AddAdGroup { campaign, .. } if campaign == "C3-1")));

    let rm = kwstruct(&["update", "rm-rule", "--account", next.to_str().unwrap(), "--keyword", "nike jogging", "--out", next.to_str().unwrap()]);
    assert!(rm.status.success());
    assert_eq!(fs::read_to_string(&next).unwrap(), fs::read_to_string(&snap).unwrap());
}

#[test]
fn rm_item_writes_remaining_rules() {
    let dir = tempfile::tempdir().unwrap();
    let (snap, _) = build_golden(dir.path(), "reduced");
    let next = dir.path().join("next.json");
    let rules_out = dir.path().join("rules.jsonl");
    let o = kwstruct(&[
        "update", "rm-item", "--account", &snap, "--rules", &fixture("rules.jsonl"), "--item", "item5",
        "--out", next.to_str().unwrap(), "--rules-out", rules_out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("rules left: 8"));
    assert_eq!(fs::read_to_string(rules_out).unwrap().lines().count(), 8);
}

#[test]
fn reduce_stats_counts_candidates() {
    let dir = tempfile::tempdir().unwrap();
    let json = dir.path().join("stats.json");
    let o = kwstruct(&["reduce-stats", "--rules", &fixture("rules.jsonl"), "--out", json.to_str().unwrap()]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("neras: 9"));
    let v: serde_json::Value = serde_json::from_str(&fs::read_to_string(json).unwrap()).unwrap();
    assert_eq!(v["neras"], 9);
    assert!(v["h"].as_u64().unwrap() <= v["total_negatives_naive"].as_u64().unwrap());
}

#[test]
fn bounds_prints_site_values() {
    let o = kwstruct(&["bounds", "3000", "100", "30"]);
    assert_eq!(stdout(&o).lines().next(), Some("340337"));
    let o = kwstruct(&["bounds", "10000", "30", "20"]);
    assert_eq!(stdout(&o).lines().next(), Some("2002940"));
    let table = stdout(&kwstruct(&["bounds"]));
    assert!(table.contains("3004080") && table.contains("3002040"));
}

#[test]
fn malformed_rules_report_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let rules = dir.path().join("bad.jsonl");
    fs::write(&rules, "{\"keyword\":\"a b\",\"cpc_micros\":1,\"items\":[\"x\"]}\n{\"keyword\":\"c\",\n").unwrap();
    let o = kwstruct(&["build", "--rules", rules.to_str().unwrap(), "--out", dir.path().join("o.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));
}

#[test]
fn synth_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for d in [&a, &b] {
        let o = kwstruct(&["synth", "--n", "200", "--seed", "7", "--out-dir", d.to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["rules.jsonl", "brands.txt", "non_brands.txt"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap());
    }
    assert_eq!(fs::read_to_string(a.join("rules.jsonl")).unwrap().lines().count(), 200);
}
