//! The `kwstruct` command line. JSON goes to files, summaries to stdout.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 input error.

use std::ffi::OsString;
use std::fmt::Display;
use std::fs::{self, File};
use std::io::{self, BufReader, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use crate::account::{trace_report, Account, Outcome};
use crate::bounds::{nk_exact, nk_worst_case_optimal, site_table, NegativeBreakdown};
use crate::builder::{build_account, BuildConfig, BuildInput, Mode};
use crate::changelog::{Change, ChangeLog};
use crate::eraser::ColoringOrder;
use crate::keyword::{normalize, Keyword};
use crate::rules::{read_brand_list, read_rules_jsonl, write_rules_jsonl, ItemId, Money, Rule, RuleSet};
use crate::stats::{reduce_stats, REFERENCE_RATIO_BAND};
use crate::synth::{generate, write_corpus, SyntheticSpec};
use crate::update::{add_rule, remove_item, remove_rule, Case2Strategy, UpdateConfig, UpdateOutcome};
use crate::verify::{verify, ProbeConfig, Severity, DEFAULT_PROBES, DEFAULT_SEED};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VERIFY_FAILED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "kwstruct", version, about = "Compile keyword bidding rules into a negative-keyword account structure")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build an account snapshot from rule and brand files.
    Build(BuildArgs),
    /// Trace queries through an account snapshot.
    Simulate(SimulateArgs),
    /// Check the routing properties and structural sanity of a snapshot.
    Verify(VerifyArgs),
    /// Closed-form negative counts; without arguments prints the site table.
    Bounds(BoundsArgs),
    /// Eraser and negative-count statistics of a rule corpus.
    ReduceStats(StatsArgs),
    /// Generate a seeded synthetic corpus.
    Synth(SynthArgs),
    /// Incrementally update a snapshot.
    Update {
        #[command(subcommand)]
        op: UpdateOp,
    },
}

#[derive(Debug, Args)]
pub struct BrandArgs {
    /// Sold brands, one per line.
    #[arg(long)]
    pub brands: Option<PathBuf>,
    /// Known brands that are not sold, one per line.
    #[arg(long)]
    pub non_brands: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[arg(long, default_value = "reduced")]
    pub mode: Mode,
    /// Largest word set considered as a large eraser.
    #[arg(long, default_value_t = crate::eraser::DEFAULT_MAX_WORDS)]
    pub max_words: usize,
    /// Largest eraser image kept; defaults to ceil(sqrt(n)).
    #[arg(long)]
    pub max_image: Option<usize>,
    /// Target keywords per group; defaults to ceil(sqrt(n)).
    #[arg(long)]
    pub target_size: Option<usize>,
    /// Negative keywords allowed per campaign or AdGroup.
    #[arg(long, default_value_t = crate::account::DEFAULT_LIMIT)]
    pub limit: usize,
    #[arg(long, default_value = "weighted-conflict")]
    pub order: ColoringOrder,
}

impl TuneArgs {
    fn config(&self) -> BuildConfig {
        BuildConfig {
            mode: self.mode,
            max_words: self.max_words,
            max_image: self.max_image,
            target_size: self.target_size,
            limit: self.limit,
            order: self.order,
            default_bid: None,
        }
    }
}

#[derive(Debug, Args)]
pub struct BuildArgs {
    /// Rules as JSON lines: {"keyword", "cpc_micros", "items"}.
    #[arg(long)]
    pub rules: PathBuf,
    #[command(flatten)]
    pub brands: BrandArgs,
    #[command(flatten)]
    pub tune: TuneArgs,
    /// Where to write the account snapshot.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub account: PathBuf,
    /// Queries to trace.
    #[arg(required_unless_present = "queries")]
    pub query: Vec<String>,
    /// File with one query per line.
    #[arg(long)]
    pub queries: Option<PathBuf>,
    /// Where to write the trajectories as JSON.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long)]
    pub account: PathBuf,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Random probes per probed property.
    #[arg(long, default_value_t = DEFAULT_PROBES)]
    pub probes: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundsArgs {
    /// Number of keywords.
    #[arg(requires_all = ["m", "m_prime"])]
    pub n: Option<u64>,
    /// Number of sold brands.
    pub m: Option<u64>,
    /// Number of non-sold brands.
    pub m_prime: Option<u64>,
    /// Exact count for these group sizes instead (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub parts: Option<Vec<u64>>,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub rules: PathBuf,
    #[command(flatten)]
    pub brands: BrandArgs,
    #[command(flatten)]
    pub tune: TuneArgs,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub n: usize,
    /// Vocabulary size; defaults to max(12, 0.3n).
    #[arg(long)]
    pub vocab: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub min_words: usize,
    #[arg(long, default_value_t = 3)]
    pub max_words: usize,
    #[arg(long, default_value_t = 5)]
    pub brand_count: usize,
    #[arg(long, default_value_t = 3)]
    pub non_brand_count: usize,
    #[arg(long, default_value_t = 0.2)]
    pub brand_fraction: f64,
    /// Token weights are 1/rank^s.
    #[arg(long, default_value_t = 1.0)]
    pub zipf: f64,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Receives rules.jsonl, brands.txt and non_brands.txt.
    #[arg(long)]
    pub out_dir: PathBuf,
}

#[derive(Debug, Args)]
pub struct UpdateCommon {
    #[arg(long)]
    pub account: PathBuf,
    /// Where to write the updated snapshot.
    #[arg(long)]
    pub out: PathBuf,
    /// Where to write the change log as JSON.
    #[arg(long)]
    pub changes: Option<PathBuf>,
    #[arg(long, default_value_t = crate::eraser::DEFAULT_MAX_WORDS)]
    pub max_words: usize,
    #[arg(long, default_value = "new-campaign")]
    pub strategy: Case2Strategy,
}

impl UpdateCommon {
    fn config(&self) -> UpdateConfig {
        UpdateConfig { strategy: self.strategy, max_words: self.max_words, ..UpdateConfig::default() }
    }
}

#[derive(Debug, Subcommand)]
pub enum UpdateOp {
    AddRule {
        #[command(flatten)]
        common: UpdateCommon,
        #[arg(long)]
        keyword: String,
        #[arg(long)]
        cpc_micros: u64,
        #[arg(long, value_delimiter = ',', required = true)]
        items: Vec<String>,
    },
    RmRule {
        #[command(flatten)]
        common: UpdateCommon,
        #[arg(long)]
        keyword: String,
    },
    RmItem {
        #[command(flatten)]
        common: UpdateCommon,
        /// The rules the snapshot was built from.
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        item: String,
        /// Where to write the remaining rules.
        #[arg(long)]
        rules_out: Option<PathBuf>,
    },
}

#[derive(Debug)]
enum Failure {
    Input(String),
    Verification,
}

impl<E: Display> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Input(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn with_path<T, E: Display>(path: &Path, r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    with_path(path, File::open(path)).map(BufReader::new)
}

fn read_rules(path: &Path) -> Result<RuleSet, Failure> {
    with_path(path, read_rules_jsonl(open(path)?))
}

fn read_brands(path: Option<&PathBuf>) -> Result<Vec<Keyword>, Failure> {
    match path {
        Some(p) => with_path(p, read_brand_list(open(p)?)),
        None => Ok(Vec::new()),
    }
}

fn read_account(path: &Path) -> Result<Account, Failure> {
    let text = with_path(path, fs::read_to_string(path))?;
    with_path(path, Account::from_json(&text))
}

fn write_text(path: &Path, text: &str) -> CmdResult {
    with_path(path, fs::write(path, text))
}

fn write_json(path: &Path, value: &impl Serialize) -> CmdResult {
    let mut text = serde_json::to_string_pretty(value)?;
    text.push('\n');
    write_text(path, &text)
}

/// Parse `args` (program name first) and run the command.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command, out) {
        Ok(()) => EXIT_OK,
        Err(Failure::Verification) => EXIT_VERIFY_FAILED,
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            EXIT_INPUT
        }
    }
}

fn execute(command: Command, out: &mut dyn Write) -> CmdResult {
    match command {
        Command::Build(a) => cmd_build(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Verify(a) => cmd_verify(a, out),
        Command::Bounds(a) => cmd_bounds(a, out),
        Command::ReduceStats(a) => cmd_reduce_stats(a, out),
        Command::Synth(a) => cmd_synth(a, out),
        Command::Update { op } => cmd_update(op, out),
    }
}

fn cmd_build(a: BuildArgs, out: &mut dyn Write) -> CmdResult {
    let rules = read_rules(&a.rules)?;
    let brands = read_brands(a.brands.brands.as_ref())?;
    let non_brands = read_brands(a.brands.non_brands.as_ref())?;
    let config = a.tune.config();
    let input = BuildInput::new(rules.clone(), brands.clone(), non_brands.clone(), config.clone());
    let account = build_account(&input)?;
    write_text(&a.out, &account.to_json())?;

    let other_mode = match config.mode {
        Mode::Naive => Mode::Reduced,
        Mode::Reduced => Mode::Naive,
    };
    let other = build_account(&BuildInput::new(rules, brands, non_brands, BuildConfig { mode: other_mode, ..config.clone() }))?;
    let (naive, reduced) = match config.mode {
        Mode::Naive => (account.negative_count(), other.negative_count()),
        Mode::Reduced => (other.negative_count(), account.negative_count()),
    };
    writeln!(out, "campaigns: {}", account.campaigns.len())?;
    writeln!(out, "adgroups: {}", account.adgroup_count())?;
    for c in &account.campaigns {
        writeln!(out, "  {} ({}): {} negatives, {} adgroups", c.name, c.priority, c.negative_count(), c.adgroups.len())?;
    }
    writeln!(out, "groups: {}", account.partition.len())?;
    for g in &account.partition {
        let kws: Vec<String> = g.keywords.iter().map(Keyword::render).collect();
        writeln!(out, "  sk{}: {}", g.group, kws.join(", "))?;
        if let Some(e) = account.group_erasers(g.group) {
            let es: Vec<String> = e.erasers.iter().map(ToString::to_string).collect();
            writeln!(out, "    erasers: {}", es.join(", "))?;
        }
    }
    writeln!(out, "negatives naive: {naive}")?;
    writeln!(out, "negatives reduced: {reduced}")?;
    writeln!(out, "wrote {}", a.out.display())?;
    Ok(())
}

fn cmd_simulate(a: SimulateArgs, out: &mut dyn Write) -> CmdResult {
    let account = read_account(&a.account)?;
    let mut raw = a.query;
    if let Some(p) = &a.queries {
        let text = with_path(p, fs::read_to_string(p))?;
        raw.extend(text.lines().filter(|l| !l.trim().is_empty()).map(str::to_string));
    }
    let queries = raw.iter().map(|q| normalize(q)).collect::<Result<Vec<_>, _>>()?;
    let report = trace_report(&account, &queries);
    for t in &report.trajectories {
        writeln!(out, "{}: {}", t.query, t.disposition)?;
        for s in &t.steps {
            let what = match &s.outcome {
                Outcome::Blocked { by } => format!("blocked by {by}"),
                Outcome::Entered { open_adgroups } => format!("entered, open adgroups [{}]", open_adgroups.join(", ")),
            };
            writeln!(out, "  {} ({}): {what}", s.campaign, s.priority)?;
        }
    }
    if let Some(p) = &a.out {
        write_json(p, &report)?;
    }
    Ok(())
}

fn cmd_verify(a: VerifyArgs, out: &mut dyn Write) -> CmdResult {
    let account = read_account(&a.account)?;
    let report = verify(&account, ProbeConfig { probes: a.probes, seed: a.seed })?;
    for (name, p) in [("property 1", &report.property1), ("property 2", &report.property2), ("property 3", &report.property3)] {
        let status = if !p.passed {
            "FAIL"
        } else if p.vacuous {
            "PASS (vacuous)"
        } else {
            "PASS"
        };
        writeln!(out, "{name}: {status} ({} checked, {} counterexamples)", p.checked, p.counterexamples.len())?;
        for c in p.counterexamples.iter().take(5) {
            writeln!(out, "  {:?}: expected {}, got {}", c.query, c.expected, c.actual)?;
        }
    }
    for f in &report.structural {
        let sev = match f.severity {
            Severity::Error => "error",
            Severity::Info => "info",
        };
        writeln!(out, "{sev} [{}] {}", f.kind, f.detail)?;
    }
    if let Some(p) = &a.out {
        write_json(p, &report)?;
    }
    if report.passed() {
        writeln!(out, "verification passed")?;
        Ok(())
    } else {
        writeln!(out, "verification FAILED")?;
        Err(Failure::Verification)
    }
}

fn cmd_bounds(a: BoundsArgs, out: &mut dyn Write) -> CmdResult {
    let (Some(n), Some(m), Some(mp)) = (a.n, a.m, a.m_prime) else {
        if a.parts.is_some() {
            return Err(Failure::Input("--parts needs N M M'".into()));
        }
        write!(out, "{}", site_table())?;
        return Ok(());
    };
    match a.parts {
        Some(parts) => {
            if parts.iter().sum::<u64>() != n || parts.contains(&0) {
                return Err(Failure::Input(format!("--parts must be positive and sum to {n}")));
            }
            let b = NegativeBreakdown::naive(m, mp, &parts, m > 0);
            writeln!(out, "NK = {}", nk_exact(m, mp, &parts))?;
            writeln!(
                out,
                "C1 {} | C2 {} + {} | C3 campaigns {} | C3 adgroups {} | literal total {}",
                b.c1,
                b.c2_campaign,
                b.c2_adgroups,
                b.c3_campaigns,
                b.c3_adgroups,
                b.total()
            )?;
        }
        None => {
            let wc = nk_worst_case_optimal(n, m, mp);
            writeln!(out, "{}", wc.rounded)?;
            writeln!(out, "NK(n={n}, m={m}, m'={mp}) = {:.2} with k = sqrt(n) equal groups", wc.value)?;
        }
    }
    Ok(())
}

fn cmd_reduce_stats(a: StatsArgs, out: &mut dyn Write) -> CmdResult {
    let rules = read_rules(&a.rules)?;
    let brands = read_brands(a.brands.brands.as_ref())?;
    let non_brands = read_brands(a.brands.non_brands.as_ref())?;
    let s = reduce_stats(&rules, &brands, &non_brands, &a.tune.config())?;
    writeln!(out, "n: {}  m: {}  m': {}", s.n, s.m, s.m_prime)?;
    writeln!(out, "NK: {}", s.nk)?;
    writeln!(out, "neras: {}  ntrans: {}", s.neras, s.ntrans)?;
    writeln!(out, "covered: {}  k: {}  group sizes: {:?}", s.covered, s.k, s.group_sizes)?;
    writeln!(out, "naive negatives: {}", s.total_negatives_naive)?;
    writeln!(out, "h: {}  h/NK: {:.3}  h/naive: {:.3}", s.h, s.h_over_nk, s.ratio)?;
    writeln!(out, "reference h/NK band: {:.2}-{:.2}", REFERENCE_RATIO_BAND.0, REFERENCE_RATIO_BAND.1)?;
    if let Some(p) = &a.out {
        write_json(p, &s)?;
    }
    Ok(())
}

fn cmd_synth(a: SynthArgs, out: &mut dyn Write) -> CmdResult {
    let spec = SyntheticSpec {
        n: a.n,
        vocab_size: a.vocab.unwrap_or((a.n * 3 / 10).max(12)),
        min_words: a.min_words,
        max_words: a.max_words,
        brand_count: a.brand_count,
        non_brand_count: a.non_brand_count,
        brand_fraction: a.brand_fraction,
        zipf_exponent: a.zipf,
        seed: a.seed,
    };
    let corpus = generate(&spec)?;
    with_path(&a.out_dir, write_corpus(&corpus, &a.out_dir))?;
    writeln!(out, "wrote {} rules, {} brands, {} non-sold brands to {}", corpus.rules.len(), corpus.brands.len(), corpus.non_brands.len(), a.out_dir.display())?;
    Ok(())
}

pub fn describe(change: &Change) -> String {
    match change {
        Change::AddCampaign { campaign } => format!("add campaign {} ({} negatives)", campaign.name, campaign.negatives.len()),
        Change::RemoveCampaign { campaign } => format!("remove campaign {campaign}"),
        Change::AddCampaignNegative { campaign, negative } => format!("add negative {negative} to {campaign}"),
        Change::RemoveCampaignNegative { campaign, negative } => format!("remove negative {negative} from {campaign}"),
        Change::AddAdGroup { campaign, adgroup } => {
            format!("add adgroup {} to {campaign} ({} negatives)", adgroup.name, adgroup.negatives.len())
        }
        Change::RemoveAdGroup { campaign, adgroup } => format!("remove adgroup {adgroup} from {campaign}"),
        Change::AddAdGroupNegative { campaign, adgroup, negative } => {
            format!("add negative {negative} to {campaign} / {adgroup}")
        }
        Change::RemoveAdGroupNegative { campaign, adgroup, negative } => {
            format!("remove negative {negative} from {campaign} / {adgroup}")
        }
        Change::SetGroup { group, keywords: Some(k) } => format!("group {group} now has {} keywords", k.len()),
        Change::SetGroup { group, keywords: None } => format!("remove group {group}"),
        Change::SetErasers { group, erasers: Some(e) } => {
            let es: Vec<String> = e.iter().map(ToString::to_string).collect();
            format!("group {group} erasers: {}", es.join(", "))
        }
        Change::SetErasers { group, erasers: None } => format!("remove erasers of group {group}"),
        Change::SetBrands { brands, non_brands } => format!("brands: {} sold, {} non-sold", brands.len(), non_brands.len()),
        Change::SetLimit { limit } => format!("limit: {limit}"),
    }
}

fn report_update(common: &UpdateCommon, outcome: &UpdateOutcome, out: &mut dyn Write) -> CmdResult {
    write_text(&common.out, &outcome.account.to_json())?;
    if let Some(p) = &common.changes {
        write_json(p, &outcome.changes)?;
    }
    if let Some(pl) = &outcome.placement {
        writeln!(out, "placement: {}", serde_json::to_string(pl)?)?;
    }
    print_changes(&outcome.changes, out)?;
    let b = &outcome.balance;
    if b.recommended {
        writeln!(out, "rebalance recommended: {}", b.reason.as_deref().unwrap_or_default())?;
    }
    writeln!(out, "wrote {}", common.out.display())?;
    Ok(())
}

fn print_changes(log: &ChangeLog, out: &mut dyn Write) -> CmdResult {
    writeln!(out, "changes: {}", log.len())?;
    for c in &log.changes {
        writeln!(out, "  {}", describe(c))?;
    }
    Ok(())
}

fn cmd_update(op: UpdateOp, out: &mut dyn Write) -> CmdResult {
    match op {
        UpdateOp::AddRule { common, keyword, cpc_micros, items } => {
            let account = read_account(&common.account)?;
            let items = items.iter().map(|i| ItemId::new(i.trim())).collect::<Result<_, _>>()?;
            let rule = Rule::new(normalize(&keyword)?, Money(cpc_micros), items)?;
            let outcome = add_rule(&account, &rule, &common.config())?;
            report_update(&common, &outcome, out)
        }
        UpdateOp::RmRule { common, keyword } => {
            let account = read_account(&common.account)?;
            let outcome = remove_rule(&account, &normalize(&keyword)?, &common.config())?;
            report_update(&common, &outcome, out)
        }
        UpdateOp::RmItem { common, rules, item, rules_out } => {
            let account = read_account(&common.account)?;
            let rule_set = read_rules(&rules)?;
            let (outcome, remaining) = remove_item(&account, &rule_set, &ItemId::new(item)?, &common.config())?;
            if let Some(p) = &rules_out {
                let mut buf = Vec::new();
                write_rules_jsonl(&remaining, &mut buf)?;
                with_path(p, fs::write(p, buf))?;
            }
            writeln!(out, "rules left: {}", remaining.len())?;
            report_update(&common, &outcome, out)
        }
    }
}

/// Entry point of the binary.
pub fn main() -> i32 {
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    run(std::env::args_os(), &mut lock)
}
