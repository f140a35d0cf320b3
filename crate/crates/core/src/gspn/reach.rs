//! Breadth-first state-space construction with tangible/vanishing
//! classification.

use std::collections::{HashMap, VecDeque};

use super::{GspnError, Marking, PetriNet, TransitionId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StateClass {
    /// Only timed transitions (or nothing) enabled.
    Tangible,
    /// At least one immediate transition enabled; left in zero time.
    Vanishing,
}

#[derive(Debug)]
pub struct ReachabilityGraph {
    pub states: Vec<(Marking, StateClass)>,
    /// Outgoing edges per state, one per enabled transition, in
    /// transition-index order.
    pub edges: Vec<Vec<(TransitionId, usize)>>,
    pub initial: usize,
}

impl ReachabilityGraph {
    pub fn marking(&self, state: usize) -> &Marking {
        &self.states[state].0
    }

    pub fn class(&self, state: usize) -> StateClass {
        self.states[state].1
    }

    pub fn tangible_indices(&self) -> Vec<usize> {
        (0..self.states.len())
            .filter(|&i| self.states[i].1 == StateClass::Tangible)
            .collect()
    }
}

/// Explores all markings reachable from the initial marking, stopping
/// with `StateSpaceExceeded` once more than `cap` states are discovered.
/// State indices follow BFS discovery order, so the result is
/// deterministic for a given net.
pub fn reachability(net: &PetriNet, cap: usize) -> Result<ReachabilityGraph, GspnError> {
    if cap == 0 {
        return Err(GspnError::StateSpaceExceeded { cap });
    }
    let initial = net.initial_marking();
    let mut index: HashMap<Marking, usize> = HashMap::new();
    let mut states: Vec<(Marking, StateClass)> = Vec::new();
    let mut enabled_sets: Vec<Vec<TransitionId>> = Vec::new();
    let mut edges: Vec<Vec<(TransitionId, usize)>> = Vec::new();
    let mut queue = VecDeque::new();

    let intern = |m: Marking,
                      states: &mut Vec<(Marking, StateClass)>,
                      enabled_sets: &mut Vec<Vec<TransitionId>>,
                      edges: &mut Vec<Vec<(TransitionId, usize)>>,
                      index: &mut HashMap<Marking, usize>,
                      queue: &mut VecDeque<usize>|
     -> Result<usize, GspnError> {
        if let Some(&i) = index.get(&m) {
            return Ok(i);
        }
        if states.len() >= cap {
            return Err(GspnError::StateSpaceExceeded { cap });
        }
        let enabled = net.enabled(&m);
        let class = if enabled
            .first()
            .is_some_and(|&t| net.transition(t).is_immediate())
        {
            StateClass::Vanishing
        } else {
            StateClass::Tangible
        };
        let i = states.len();
        index.insert(m.clone(), i);
        states.push((m, class));
        enabled_sets.push(enabled);
        edges.push(Vec::new());
        queue.push_back(i);
        Ok(i)
    };

    intern(
        initial,
        &mut states,
        &mut enabled_sets,
        &mut edges,
        &mut index,
        &mut queue,
    )?;

    while let Some(s) = queue.pop_front() {
        let enabled = enabled_sets[s].clone();
        let marking = states[s].0.clone();
        for t in enabled {
            let next = net.fire(t, &marking);
            let target = intern(
                next,
                &mut states,
                &mut enabled_sets,
                &mut edges,
                &mut index,
                &mut queue,
            )?;
            edges[s].push((t, target));
        }
    }

    Ok(ReachabilityGraph {
        states,
        edges,
        initial: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspn::ServerSemantics;

    #[test]
    fn two_place_cycle_has_two_tangible_states() {
        let mut b = PetriNet::builder();
        let p1 = b.place("P1", 1);
        let p2 = b.place("P2", 0);
        let t1 = b.timed("t1", 2.0, ServerSemantics::Single);
        let t2 = b.timed("t2", 1.0, ServerSemantics::Single);
        b.input(t1, p1, 1).output(t1, p2, 1);
        b.input(t2, p2, 1).output(t2, p1, 1);
        let net = b.build().unwrap();

        let graph = reachability(&net, 100).unwrap();
        assert_eq!(graph.states.len(), 2);
        assert!(graph
            .states
            .iter()
            .all(|(_, c)| *c == StateClass::Tangible));
        assert_eq!(graph.edges[0], vec![(TransitionId(0), 1)]);
        assert_eq!(graph.edges[1], vec![(TransitionId(1), 0)]);
    }

    #[test]
    fn unbounded_net_hits_cap() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 0);
        let src = b.timed("src", 1.0, ServerSemantics::Single);
        b.output(src, p, 1);
        let net = b.build().unwrap();
        assert!(matches!(
            reachability(&net, 100),
            Err(GspnError::StateSpaceExceeded { cap: 100 })
        ));
    }

    #[test]
    fn immediate_marks_vanishing() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 1);
        let q = b.place("Q", 0);
        let t = b.timed("t", 1.0, ServerSemantics::Single);
        let i = b.immediate("i", 1.0, 1);
        b.input(t, p, 1).output(t, q, 1);
        b.input(i, q, 1).output(i, p, 1);
        let net = b.build().unwrap();
        let graph = reachability(&net, 10).unwrap();
        assert_eq!(graph.states.len(), 2);
        assert_eq!(graph.class(0), StateClass::Tangible);
        assert_eq!(graph.class(1), StateClass::Vanishing);
    }
}
