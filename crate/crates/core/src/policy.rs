//! Voting policies shared by the compiler, the runtime simulator and the
//! stochastic models.

use std::fmt;
use std::str::FromStr;

/// How the expiry votes of the watchdog replicas combine into a system
/// alarm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum VotingPolicy {
    /// Any single expiry raises the alarm.
    Or,
    /// Every replica must expire.
    And,
    /// At least `k` replicas must expire.
    KOutOfN(u32),
}

impl VotingPolicy {
    /// Number of expiry votes required given `n` replicas.
    pub fn votes_required(self, n: u32) -> u32 {
        match self {
            VotingPolicy::Or => 1,
            VotingPolicy::And => n,
            VotingPolicy::KOutOfN(k) => k,
        }
    }

    /// Stable label used in CSV output and CLI flags.
    pub fn label(self) -> String {
        match self {
            VotingPolicy::Or => "OR".to_string(),
            VotingPolicy::And => "AND".to_string(),
            VotingPolicy::KOutOfN(k) => format!("{k}ooN"),
        }
    }
}

impl fmt::Display for VotingPolicy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.label())
    }
}

impl FromStr for VotingPolicy {
    type Err = String;

    /// Accepts `AND`, `OR` and `KooN` forms such as `2oo3` (the replica
    /// count must match the model's, which is validated by the consumer).
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let upper = s.trim().to_ascii_uppercase();
        match upper.as_str() {
            "AND" => return Ok(VotingPolicy::And),
            "OR" => return Ok(VotingPolicy::Or),
            _ => {}
        }
        if let Some((k, _n)) = upper.split_once("OO") {
            if let Ok(k) = k.parse::<u32>() {
                return Ok(VotingPolicy::KOutOfN(k));
            }
        }
        Err(format!(
            "unknown policy `{s}` (expected AND, OR, or k-out-of-n like 2oo3)"
        ))
    }
}

/// Replica count annotation parsed from `KooN` labels, when present.
pub fn parse_policy_with_replicas(s: &str) -> Result<(VotingPolicy, Option<u32>), String> {
    let upper = s.trim().to_ascii_uppercase();
    if let Some((k, n)) = upper.split_once("OO") {
        if let (Ok(k), Ok(n)) = (k.parse::<u32>(), n.parse::<u32>()) {
            return Ok((VotingPolicy::KOutOfN(k), Some(n)));
        }
    }
    s.parse().map(|p| (p, None))
}

/// splitmix64 step; used to derive independent replication seeds from a
/// base seed.
pub fn derive_seed(base: u64, index: u64) -> u64 {
    let mut z = base.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul(index.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_round_trip() {
        for p in [VotingPolicy::Or, VotingPolicy::And, VotingPolicy::KOutOfN(2)] {
            let parsed: VotingPolicy = p.label().parse().unwrap();
            assert_eq!(p, parsed);
        }
        assert_eq!("2oo3".parse::<VotingPolicy>(), Ok(VotingPolicy::KOutOfN(2)));
        assert!("sometimes".parse::<VotingPolicy>().is_err());
    }

    #[test]
    fn votes_required_matches_policy() {
        assert_eq!(VotingPolicy::Or.votes_required(3), 1);
        assert_eq!(VotingPolicy::And.votes_required(3), 3);
        assert_eq!(VotingPolicy::KOutOfN(2).votes_required(3), 2);
    }

    #[test]
    fn derived_seeds_differ() {
        let a = derive_seed(42, 0);
        let b = derive_seed(42, 1);
        assert_ne!(a, b);
        assert_eq!(a, derive_seed(42, 0));
    }
}
