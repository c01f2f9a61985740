use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use serde::{Deserialize, Serialize};

use crate::model::{ControlIdentifier, ControlNode};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MatchPolicy {
    pub name_similarity_threshold: f64,
    pub name_weight: f64,
    pub ancestor_weight: f64,
    pub max_retries: usize,
}

impl Default for MatchPolicy {
    fn default() -> Self {
        Self {
            name_similarity_threshold: 0.75,
            name_weight: 0.6,
            ancestor_weight: 0.4,
            max_retries: 3,
        }
    }
}

impl MatchPolicy {
    pub fn validate(&self) -> Result<(), String> {
        if !(0.0..=1.0).contains(&self.name_similarity_threshold) {
            return Err("name_similarity_threshold must lie in [0, 1]".into());
        }
        if self.name_weight < 0.0 || self.ancestor_weight < 0.0 {
            return Err("weights must be non-negative".into());
        }
        if (self.name_weight + self.ancestor_weight - 1.0).abs() > 1e-9 {
            return Err("name_weight and ancestor_weight must sum to 1".into());
        }
        Ok(())
    }
}

fn levenshtein(a: &[char], b: &[char]) -> usize {
    let mut row: Vec<usize> = (0..=b.len()).collect();
    for (i, ca) in a.iter().enumerate() {
        let mut diag = row[0];
        row[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let up = row[j + 1];
            row[j + 1] = if ca == cb { diag } else { 1 + diag.min(up).min(row[j]) };
            diag = up;
        }
    }
    row[b.len()]
}

/// `1 - distance / longer length`; identical strings score 1.
pub fn edit_similarity(a: &str, b: &str) -> f64 {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    1.0 - levenshtein(&a, &b) as f64 / longest as f64
}

fn lcs_len(a: &[String], b: &[String]) -> usize {
    let mut dp = vec![vec![0usize; b.len() + 1]; a.len() + 1];
    for i in 0..a.len() {
        for j in 0..b.len() {
            dp[i + 1][j + 1] = if a[i] == b[j] {
                dp[i][j] + 1
            } else {
                dp[i][j + 1].max(dp[i + 1][j])
            };
        }
    }
    dp[a.len()][b.len()]
}

/// Longest common subsequence of the two ancestor paths over the longer one.
pub fn ancestor_similarity(a: &[String], b: &[String]) -> f64 {
    let longest = a.len().max(b.len());
    if longest == 0 {
        return 1.0;
    }
    lcs_len(a, b) as f64 / longest as f64
}

/// Weighted score of `candidate` against `expected`, or `None` when the
/// control types differ.
pub fn match_score(expected: &ControlIdentifier, candidate: &ControlIdentifier, policy: &MatchPolicy) -> Option<f64> {
    if expected.control_type != candidate.control_type {
        return None;
    }
    let name = edit_similarity(&expected.primary_id, &candidate.primary_id);
    let anc = ancestor_similarity(&expected.ancestor_path, &candidate.ancestor_path);
    Some(policy.name_weight * name + policy.ancestor_weight * anc)
}

/// Same-type candidates with their scores, best first; equal scores keep
/// document order.
pub fn rank_candidates(
    expected: &ControlIdentifier,
    candidates: &[ControlNode],
    policy: &MatchPolicy,
) -> Vec<(usize, f64)> {
    let mut scored: Vec<(usize, f64)> = candidates
        .iter()
        .enumerate()
        .filter_map(|(i, c)| match_score(expected, &c.identifier, policy).map(|s| (i, s)))
        .collect();
    scored.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap_or(core::cmp::Ordering::Equal)
            .then(a.0.cmp(&b.0))
    });
    scored
}

/// The best same-type candidate scoring at least the policy threshold.
pub fn fuzzy_match<'a>(
    expected: &ControlIdentifier,
    candidates: &'a [ControlNode],
    policy: &MatchPolicy,
) -> Option<&'a ControlNode> {
    rank_candidates(expected, candidates, policy)
        .first()
        .filter(|(_, s)| *s >= policy.name_similarity_threshold)
        .map(|&(i, _)| &candidates[i])
}
