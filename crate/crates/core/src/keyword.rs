//! Keywords, tokens and the three negative-keyword match predicates.
//!
//! Matching is purely lexical. Raw text is lowercased and split on whitespace
//! at ingestion; punctuation inside a token (for instance the hyphen in
//! `tee-shirt`) is kept.

use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A single normalized word.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Token(String);

impl Token {
    pub fn new(text: impl Into<String>) -> Result<Self> {
        let text = text.into();
        if text.is_empty() || text.chars().any(char::is_whitespace) || text.to_lowercase() != text {
            return Err(Error::MalformedToken(text));
        }
        Ok(Token(text))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl TryFrom<String> for Token {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        Token::new(value)
    }
}

impl From<Token> for String {
    fn from(t: Token) -> String {
        t.0
    }
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An ordered, non-empty sequence of tokens.
///
/// Equality and ordering are positional over the token sequence.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Keyword(Vec<Token>);

impl Keyword {
    pub fn from_tokens(tokens: Vec<Token>) -> Result<Self> {
        if tokens.is_empty() {
            return Err(Error::MalformedKeyword(String::new()));
        }
        Ok(Keyword(tokens))
    }

    pub fn tokens(&self) -> &[Token] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Space-joined form; `normalize(render(k)) == k`.
    pub fn render(&self) -> String {
        let mut out = String::new();
        for (i, t) in self.0.iter().enumerate() {
            if i > 0 {
                out.push(' ');
            }
            out.push_str(t.as_str());
        }
        out
    }

    pub fn word_set(&self) -> BTreeSet<Token> {
        word_set(self)
    }

    pub fn contains_token(&self, token: &Token) -> bool {
        self.0.contains(token)
    }

    /// True when `phrase` occurs as a contiguous token run inside `self`.
    pub fn contains_phrase(&self, phrase: &Keyword) -> bool {
        let n = phrase.0.len();
        n <= self.0.len() && self.0.windows(n).any(|w| w == phrase.0.as_slice())
    }

    /// True when every token of `words` occurs somewhere in `self`.
    pub fn contains_all<'a>(&self, mut words: impl Iterator<Item = &'a Token>) -> bool {
        words.all(|w| self.0.contains(w))
    }
}

impl TryFrom<String> for Keyword {
    type Error = Error;
    fn try_from(value: String) -> Result<Self> {
        normalize(&value)
    }
}

impl From<Keyword> for String {
    fn from(k: Keyword) -> String {
        k.render()
    }
}

impl FromStr for Keyword {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        normalize(s)
    }
}

impl fmt::Display for Keyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Lowercase and whitespace-split `raw` into a keyword.
pub fn normalize(raw: &str) -> Result<Keyword> {
    let tokens: Vec<Token> = raw.split_whitespace().map(|w| Token(w.to_lowercase())).collect();
    if tokens.is_empty() {
        return Err(Error::MalformedKeyword(raw.to_string()));
    }
    Ok(Keyword(tokens))
}

/// The set of distinct words of `p`.
pub fn word_set(p: &Keyword) -> BTreeSet<Token> {
    p.0.iter().cloned().collect()
}

/// Every non-empty contiguous token run of `p`.
pub fn subword_set(p: &Keyword) -> BTreeSet<Keyword> {
    let n = p.0.len();
    let mut out = BTreeSet::new();
    for start in 0..n {
        for end in start + 1..=n {
            out.insert(Keyword(p.0[start..end].to_vec()));
        }
    }
    out
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatchType {
    Exact,
    Phrase,
    Large,
}

impl fmt::Display for MatchType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MatchType::Exact => "exact",
            MatchType::Phrase => "phrase",
            MatchType::Large => "large",
        })
    }
}

impl FromStr for MatchType {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "exact" => Ok(MatchType::Exact),
            "phrase" => Ok(MatchType::Phrase),
            "large" | "broad" => Ok(MatchType::Large),
            other => Err(format!("unknown match type {other:?}")),
        }
    }
}

/// A negative keyword attached to a campaign or an AdGroup.
///
/// Sorted by match type first, then keyword, which is the canonical order of
/// negative lists in account snapshots.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct NegativeKeyword {
    pub keyword: Keyword,
    pub match_type: MatchType,
}

impl NegativeKeyword {
    pub fn new(keyword: Keyword, match_type: MatchType) -> Self {
        NegativeKeyword { keyword, match_type }
    }

    pub fn exact(keyword: Keyword) -> Self {
        Self::new(keyword, MatchType::Exact)
    }

    pub fn phrase(keyword: Keyword) -> Self {
        Self::new(keyword, MatchType::Phrase)
    }

    pub fn large(keyword: Keyword) -> Self {
        Self::new(keyword, MatchType::Large)
    }

    pub fn matches(&self, q: &Keyword) -> bool {
        neg_matches(self, q)
    }
}

impl Ord for NegativeKeyword {
    fn cmp(&self, other: &Self) -> Ordering {
        self.match_type
            .cmp(&other.match_type)
            .then_with(|| self.keyword.cmp(&other.keyword))
    }
}

impl PartialOrd for NegativeKeyword {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for NegativeKeyword {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({})", self.keyword, self.match_type)
    }
}

/// Does `neg` block the query `q`?
pub fn neg_matches(neg: &NegativeKeyword, q: &Keyword) -> bool {
    match neg.match_type {
        MatchType::Exact => &neg.keyword == q,
        MatchType::Phrase => q.contains_phrase(&neg.keyword),
        MatchType::Large => q.contains_all(neg.keyword.tokens().iter()),
    }
}
