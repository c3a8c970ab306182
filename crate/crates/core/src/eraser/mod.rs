//! Erasers and the negative-keyword reduction pipeline.
//!
//! An eraser stands in for a block of exact negative keywords. A large eraser
//! is a word set and erases every keyword containing all of its words; an
//! exact eraser is a keyword and erases only itself. The pipeline:
//!
//! 1. [`enumerate_candidates`]: large erasers whose image over SK has between
//!    2 and `max_image` keywords.
//! 2. [`build_graph`]: one node per candidate, an edge wherever two images
//!    intersect.
//! 3. [`welsh_powell`] + [`select_color_class`]: a proper coloring, then the
//!    color class with the largest total image. A color class is an
//!    independent set, so its images are pairwise disjoint.
//! 4. [`make_group_plan`]: uncovered keywords become exact erasers and all
//!    erasers are packed into balanced groups.
//!
//! [`reduce`] and [`expand`] convert between a keyword set and a strict
//! eraser set for it.

mod candidates;
mod coloring;
mod graph;
mod grouping;
mod oracle;
mod reduce;

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::keyword::{Keyword, NegativeKeyword, Token};

pub use candidates::enumerate_candidates;
pub use coloring::{select_color_class, welsh_powell, ColorClass, Coloring, ColoringOrder};
pub use graph::{build_graph, EraserGraph};
pub use grouping::{make_group_plan, GroupPlan, PlannedGroup};
pub use oracle::{exact_packing_oracle, PackingSolution, ORACLE_LIMIT};
pub use reduce::{expand, reduce};

/// Default cap on the number of words in a large eraser.
pub const DEFAULT_MAX_WORDS: usize = 3;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "EraserRepr", into = "EraserRepr")]
pub enum Eraser {
    /// Erases exactly this keyword.
    Exact(Keyword),
    /// Erases every keyword whose word set contains all these words.
    Large(BTreeSet<Token>),
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum EraserRepr {
    Exact(Keyword),
    Large(BTreeSet<Token>),
}

impl TryFrom<EraserRepr> for Eraser {
    type Error = Error;
    fn try_from(r: EraserRepr) -> Result<Self> {
        match r {
            EraserRepr::Exact(k) => Ok(Eraser::Exact(k)),
            EraserRepr::Large(w) => Eraser::large(w),
        }
    }
}

impl From<Eraser> for EraserRepr {
    fn from(e: Eraser) -> Self {
        match e {
            Eraser::Exact(k) => EraserRepr::Exact(k),
            Eraser::Large(w) => EraserRepr::Large(w),
        }
    }
}

impl Eraser {
    pub fn large(words: BTreeSet<Token>) -> Result<Self> {
        if words.is_empty() {
            return Err(Error::MalformedKeyword("empty large eraser".into()));
        }
        Ok(Eraser::Large(words))
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, Eraser::Exact(_))
    }

    pub fn erases(&self, p: &Keyword) -> bool {
        erases(self, p)
    }

    /// The negative keyword that implements this eraser.
    pub fn to_negative(&self) -> NegativeKeyword {
        match self {
            Eraser::Exact(k) => NegativeKeyword::exact(k.clone()),
            Eraser::Large(words) => {
                let k = Keyword::from_tokens(words.iter().cloned().collect()).expect("large eraser is non-empty");
                NegativeKeyword::large(k)
            }
        }
    }
}

impl fmt::Display for Eraser {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Eraser::Exact(k) => write!(f, "{k} (exact)"),
            Eraser::Large(words) => {
                let ws: Vec<&str> = words.iter().map(Token::as_str).collect();
                write!(f, "{{{}}} (large)", ws.join(", "))
            }
        }
    }
}

/// Does `e` erase the keyword `p`?
pub fn erases(e: &Eraser, p: &Keyword) -> bool {
    match e {
        Eraser::Exact(k) => k == p,
        Eraser::Large(words) => p.contains_all(words.iter()),
    }
}

/// An eraser together with the keywords it erases inside a reference list.
///
/// `image` holds sorted positions into that list (usually SK in rule order).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EraserImage {
    pub eraser: Eraser,
    pub image: Vec<usize>,
}

impl EraserImage {
    /// Compute the image of `eraser` over `sk` by scanning every keyword.
    pub fn compute(eraser: Eraser, sk: &[Keyword]) -> Self {
        let image = sk.iter().enumerate().filter(|(_, p)| erases(&eraser, p)).map(|(i, _)| i).collect();
        EraserImage { eraser, image }
    }

    pub fn size(&self) -> usize {
        self.image.len()
    }

    pub fn keywords<'a>(&self, sk: &'a [Keyword]) -> Vec<&'a Keyword> {
        self.image.iter().map(|&i| &sk[i]).collect()
    }

    pub fn intersects(&self, other: &EraserImage) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.image.len() && j < other.image.len() {
            match self.image[i].cmp(&other.image[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return true,
            }
        }
        false
    }
}

/// Token → positions of the keywords containing it.
pub(crate) struct KeywordIndex<'a> {
    keywords: &'a [Keyword],
    postings: HashMap<&'a Token, Vec<usize>>,
}

impl<'a> KeywordIndex<'a> {
    pub(crate) fn new(keywords: &'a [Keyword]) -> Self {
        let mut postings: HashMap<&Token, Vec<usize>> = HashMap::new();
        for (i, p) in keywords.iter().enumerate() {
            for t in p.tokens() {
                let list = postings.entry(t).or_default();
                if list.last() != Some(&i) {
                    list.push(i);
                }
            }
        }
        KeywordIndex { keywords, postings }
    }

    /// Sorted positions of keywords containing every word of `words`.
    pub(crate) fn image<'w>(&self, words: impl IntoIterator<Item = &'w Token> + Clone) -> Vec<usize> {
        let mut shortest: Option<&Vec<usize>> = None;
        for w in words.clone() {
            match self.postings.get(w) {
                None => return Vec::new(),
                Some(list) => {
                    if shortest.is_none_or(|s| list.len() < s.len()) {
                        shortest = Some(list);
                    }
                }
            }
        }
        let Some(base) = shortest else { return Vec::new() };
        base.iter()
            .copied()
            .filter(|&i| self.keywords[i].contains_all(words.clone().into_iter()))
            .collect()
    }
}

/// All non-empty subsets of `words` with at most `max` elements, each sorted.
pub(crate) fn word_subsets(words: &[Token], max: usize) -> Vec<Vec<Token>> {
    fn rec(words: &[Token], start: usize, max: usize, cur: &mut Vec<Token>, out: &mut Vec<Vec<Token>>) {
        for i in start..words.len() {
            cur.push(words[i].clone());
            out.push(cur.clone());
            if cur.len() < max {
                rec(words, i + 1, max, cur, out);
            }
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if max > 0 {
        rec(words, 0, max, &mut Vec::new(), &mut out);
    }
    out
}

/// Tunables of the full reduction pipeline. `None` means "derive from n".
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionConfig {
    pub max_words: usize,
    pub max_image: Option<usize>,
    pub target_size: Option<usize>,
    pub order: ColoringOrder,
}

impl Default for ReductionConfig {
    fn default() -> Self {
        ReductionConfig { max_words: DEFAULT_MAX_WORDS, max_image: None, target_size: None, order: ColoringOrder::default() }
    }
}

/// ceil(√n), at least 1.
pub fn ceil_sqrt(n: usize) -> usize {
    if n == 0 {
        return 1;
    }
    let mut r = (n as f64).sqrt() as usize;
    while r * r < n {
        r += 1;
    }
    while r > 1 && (r - 1) * (r - 1) >= n {
        r -= 1;
    }
    r.max(1)
}

/// Every intermediate product of the pipeline, kept for statistics.
#[derive(Clone, Debug)]
pub struct ReductionPlan {
    pub graph: EraserGraph,
    pub coloring: Coloring,
    pub class: ColorClass,
    pub plan: GroupPlan,
    pub max_image: usize,
    pub target_size: usize,
}

/// Run the whole pipeline over `sk` (rule order matters for tie-breaks).
pub fn plan_reduction(sk: &[Keyword], config: &ReductionConfig) -> Result<ReductionPlan> {
    if config.max_words == 0 {
        return Err(Error::NonPositive { what: "max_words" });
    }
    let n = sk.len();
    let max_image = config.max_image.unwrap_or_else(|| ceil_sqrt(n));
    let target_size = config.target_size.unwrap_or_else(|| ceil_sqrt(n));
    if max_image == 0 {
        return Err(Error::NonPositive { what: "max_image" });
    }
    if target_size == 0 {
        return Err(Error::NonPositive { what: "target_size" });
    }
    // Erasers larger than a group can never be placed.
    let cap = max_image.min(target_size);
    let candidates = enumerate_candidates(sk, config.max_words, cap);
    let graph = build_graph(candidates);
    let coloring = welsh_powell(&graph, config.order);
    let class = select_color_class(&graph, &coloring);
    let selected: Vec<EraserImage> = class.members.iter().map(|&i| graph.nodes[i].clone()).collect();
    let plan = make_group_plan(sk, &selected, target_size)?;
    Ok(ReductionPlan { graph, coloring, class, plan, max_image, target_size })
}
