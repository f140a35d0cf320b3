//! Structural queries over the reachability graph.
//!
//! Two forms cover the dependability arguments made against these nets:
//! a universal emptiness check on a place over a state class, and an
//! existence check for a state enabling one of a set of transitions while
//! a place holds at least `k` tokens.

use super::{GspnError, PetriNet, PlaceId, ReachabilityGraph, StateClass as ReachClass, TransitionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    All,
    Tangible,
    Vanishing,
}

impl StateClass {
    fn matches(self, class: ReachClass) -> bool {
        match self {
            StateClass::All => true,
            StateClass::Tangible => class == ReachClass::Tangible,
            StateClass::Vanishing => class == ReachClass::Vanishing,
        }
    }
}

#[derive(Debug, Clone)]
pub enum Query {
    /// Does `place` hold zero tokens in every state of `class`?
    AlwaysEmpty { place: PlaceId, class: StateClass },
    /// Is there a state where any of `transitions` is enabled and
    /// `place` holds at least `min_tokens`? The place part is optional.
    ExistsEnabled {
        transitions: Vec<TransitionId>,
        place: Option<(PlaceId, u32)>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QueryOutcome {
    Holds,
    Counterexample(usize),
    Witness(usize),
    Absent,
}

pub fn run_query(graph: &ReachabilityGraph, net: &PetriNet, query: &Query) -> QueryOutcome {
    match query {
        Query::AlwaysEmpty { place, class } => {
            for (i, (marking, state_class)) in graph.states.iter().enumerate() {
                if class.matches(*state_class) && marking.tokens(*place) > 0 {
                    return QueryOutcome::Counterexample(i);
                }
            }
            QueryOutcome::Holds
        }
        Query::ExistsEnabled { transitions, place } => {
            for (i, (marking, _)) in graph.states.iter().enumerate() {
                let enabled = transitions
                    .iter()
                    .any(|&t| net.transition_enabled(t, marking));
                let tokens_ok = place
                    .map(|(p, min)| marking.tokens(p) >= min)
                    .unwrap_or(true);
                if enabled && tokens_ok {
                    return QueryOutcome::Witness(i);
                }
            }
            QueryOutcome::Absent
        }
    }
}

/// Parses the textual query forms used by the CLI:
///
/// - `always PLACE == 0 [in tangible|vanishing|all]`
/// - `exists enabled T1[,T2,...] [and PLACE >= K]`
pub fn parse_query(text: &str, net: &PetriNet) -> Result<Query, GspnError> {
    let tokens: Vec<&str> = text.split_whitespace().collect();
    let bad = |msg: &str| GspnError::BadQuery(msg.to_string());
    match tokens.first() {
        Some(&"always") => {
            if tokens.len() < 4 || tokens[2] != "==" || tokens[3] != "0" {
                return Err(bad("expected `always PLACE == 0 [in CLASS]`"));
            }
            let place = net
                .place_by_name(tokens[1])
                .ok_or_else(|| GspnError::UnknownName(tokens[1].to_string()))?;
            let class = match tokens.get(4) {
                None => StateClass::All,
                Some(&"in") => match tokens.get(5) {
                    Some(&"tangible") => StateClass::Tangible,
                    Some(&"vanishing") => StateClass::Vanishing,
                    Some(&"all") => StateClass::All,
                    _ => return Err(bad("state class must be tangible, vanishing or all")),
                },
                Some(_) => return Err(bad("expected `in CLASS` after the place condition")),
            };
            Ok(Query::AlwaysEmpty { place, class })
        }
        Some(&"exists") => {
            if tokens.get(1) != Some(&"enabled") {
                return Err(bad("expected `exists enabled T1[,T2,...] [and PLACE >= K]`"));
            }
            let names = tokens
                .get(2)
                .ok_or_else(|| bad("missing transition list"))?;
            let mut transitions = Vec::new();
            for name in names.split(',') {
                let t = net
                    .transition_by_name(name)
                    .ok_or_else(|| GspnError::UnknownName(name.to_string()))?;
                transitions.push(t);
            }
            let place = match tokens.get(3) {
                None => None,
                Some(&"and") => {
                    if tokens.len() != 7 || tokens[5] != ">=" {
                        return Err(bad("expected `and PLACE >= K`"));
                    }
                    let p = net
                        .place_by_name(tokens[4])
                        .ok_or_else(|| GspnError::UnknownName(tokens[4].to_string()))?;
                    let min: u32 = tokens[6]
                        .parse()
                        .map_err(|_| bad("token threshold must be a non-negative integer"))?;
                    Some((p, min))
                }
                Some(_) => return Err(bad("expected `and PLACE >= K` after transition list")),
            };
            Ok(Query::ExistsEnabled { transitions, place })
        }
        _ => Err(bad("query must start with `always` or `exists`")),
    }
}
