//! Closed-form negative counts of the naive structure.
//!
//! With n keywords, m sold brands, m' non-sold brands and a partition of SK
//! into k groups of sizes s_1..s_k:
//!
//! - C1 carries n + m + m' negatives,
//! - C2 carries n + m' on the campaign and m(m-1) over its brand AdGroups,
//! - C3_i carries (n - s_i) + m' on the campaign and s_i(s_i - 1) over its
//!   AdGroups.
//!
//! Summing gives NK = m² + (k+2)m' + kn + Σ s_i², minimized near k = √n.

use std::fmt::Write as _;

use serde::Serialize;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct BoundInput {
    pub n: u64,
    pub m: u64,
    pub m_prime: u64,
    pub parts: Option<Vec<u64>>,
}

/// m² + (k+2)m' + kn + Σ|sk_i|², with n = Σ parts and k = number of parts.
pub fn nk_exact(m: u64, m_prime: u64, parts: &[u64]) -> u64 {
    let n: u64 = parts.iter().sum();
    let k = parts.len() as u64;
    m * m + (k + 2) * m_prime + k * n + parts.iter().map(|s| s * s).sum::<u64>()
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct WorstCase {
    pub value: f64,
    pub rounded: u64,
}

/// m² + (√n + 2)m' + 2n√n, the count for k = √n equal groups.
pub fn nk_worst_case_optimal(n: u64, m: u64, m_prime: u64) -> WorstCase {
    let r = (n as f64).sqrt();
    let value = (m * m) as f64 + (r + 2.0) * m_prime as f64 + 2.0 * n as f64 * r;
    WorstCase { value, rounded: value.round() as u64 }
}

/// Negatives of C1 and C2 together: 2n + 2m' + m².
pub fn high_medium_count(n: u64, m: u64, m_prime: u64) -> u64 {
    2 * n + 2 * m_prime + m * m
}

/// Per-campaign split of the naive count.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NegativeBreakdown {
    pub c1: u64,
    pub c2_campaign: u64,
    pub c2_adgroups: u64,
    pub c3_campaigns: u64,
    pub c3_adgroups: u64,
    /// The catch-all AdGroup of C1 has no negatives.
    pub catch_all: u64,
}

impl NegativeBreakdown {
    /// `c2_present` is false when there are no sold brands and C2 is omitted.
    pub fn naive(m: u64, m_prime: u64, parts: &[u64], c2_present: bool) -> Self {
        let n: u64 = parts.iter().sum();
        let k = parts.len() as u64;
        let (c2_campaign, c2_adgroups) = if c2_present { (n + m_prime, m * m.saturating_sub(1)) } else { (0, 0) };
        NegativeBreakdown {
            c1: n + m + m_prime,
            c2_campaign,
            c2_adgroups,
            c3_campaigns: k * (n + m_prime) - n,
            c3_adgroups: parts.iter().map(|s| s * (s - 1)).sum(),
            catch_all: 0,
        }
    }

    pub fn total(&self) -> u64 {
        self.c1 + self.c2_campaign + self.c2_adgroups + self.c3_campaigns + self.c3_adgroups + self.catch_all
    }
}

/// A row of the reference site table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Site {
    pub name: &'static str,
    pub n: u64,
    pub m: u64,
    pub m_prime: u64,
    /// The value printed in the reference table.
    pub printed: u64,
}

pub const SITES: [Site; 4] = [
    Site { name: "Site1", n: 3000, m: 100, m_prime: 30, printed: 340_337 },
    Site { name: "Site2", n: 7000, m: 1, m_prime: 0, printed: 1_171_324 },
    Site { name: "Site3", n: 10_000, m: 30, m_prime: 20, printed: 2_002_940 },
    Site { name: "Site4", n: 10_000, m: 1000, m_prime: 40, printed: 3_002_040 },
];

/// Notes explaining where the printed table and the formula disagree.
pub fn site_note(site: &Site) -> Option<String> {
    let computed = nk_worst_case_optimal(site.n, site.m, site.m_prime);
    if computed.rounded == site.printed {
        return None;
    }
    let diff = computed.rounded.abs_diff(site.printed);
    if diff <= 2 {
        return Some(format!("formula gives {:.2}; printed value differs by {diff} (rounding)", computed.value));
    }
    // Look for a single m' that explains the printed number.
    let alt = (0..=site.m_prime * 4).find(|&mp| nk_worst_case_optimal(site.n, site.m, mp).rounded == site.printed);
    Some(match alt {
        Some(mp) => format!(
            "formula gives {}; printed {} matches m'={mp}, likely a typo in the printed table",
            computed.rounded, site.printed
        ),
        None => format!("formula gives {}; printed {}", computed.rounded, site.printed),
    })
}

/// The site table as aligned text: Name, SK, m, m', NK (formula), printed, note.
pub fn site_table() -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<6} {:>6} {:>5} {:>4} {:>10} {:>10}  note", "Name", "SK", "m", "m'", "NK", "printed");
    for s in &SITES {
        let wc = nk_worst_case_optimal(s.n, s.m, s.m_prime);
        let note = site_note(s).unwrap_or_default();
        let _ = writeln!(out, "{:<6} {:>6} {:>5} {:>4} {:>10} {:>10}  {}", s.name, s.n, s.m, s.m_prime, wc.rounded, s.printed, note);
    }
    out
}
