//! Compile keyword bidding rules into a three-priority shopping account.
//!
//! Rules map a keyword to a CPC and a set of items. The compiled account
//! routes each rule's keyword to its own AdGroup, branded queries to a brand
//! AdGroup and everything else to a catch-all, using negative keywords only.
//! The [`eraser`] module shrinks the number of negatives the low-priority
//! campaigns need.

pub mod account;
pub mod bounds;
pub mod builder;
pub mod changelog;
pub mod cli;
pub mod eraser;
pub mod error;
pub mod keyword;
pub mod rules;
pub mod stats;
pub mod synth;
pub mod update;
pub mod verify;

pub use account::{Account, Disposition, Simulator, Trajectory};
pub use builder::{build_account, BuildConfig, BuildInput, Mode};
pub use error::{Error, Result};
pub use keyword::{normalize, Keyword, MatchType, NegativeKeyword, Token};
pub use rules::{Money, Rule, RuleSet};
