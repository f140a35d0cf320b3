//! Reduction of a reachability graph to the embedded tangible CTMC.
//!
//! Vanishing markings are removed by redistributing each timed flow that
//! enters them over the tangible markings eventually reached, weighted by
//! the immediate-transition weights along the way. Expected immediate
//! firing counts per unit of entering flow are retained so immediate
//! transitions keep reportable throughputs after the reduction.

use std::collections::BTreeMap;

use super::{GspnError, Marking, PetriNet, ReachabilityGraph, StateClass, TransitionId, TransitionKind};

#[derive(Debug)]
pub struct TangibleChain {
    /// Tangible markings in reachability order.
    pub states: Vec<Marking>,
    /// Original reachability-graph index of each chain state.
    pub graph_index: Vec<usize>,
    /// Sparse generator rows: `rows[i]` holds (j, q_ij) including the
    /// diagonal; each row sums to zero.
    rows: Vec<Vec<(usize, f64)>>,
    /// Distribution over chain states after flushing an initially
    /// vanishing marking (a single unit entry when the initial marking is
    /// tangible).
    initial: Vec<(usize, f64)>,
    /// Effective rates of enabled timed transitions per state.
    timed_rates: Vec<Vec<(TransitionId, f64)>>,
    /// Expected immediate firings per unit time while in each state,
    /// accumulated over the vanishing paths its timed flows traverse.
    immediate_flow: Vec<Vec<(TransitionId, f64)>>,
}

impl TangibleChain {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    pub fn initial_distribution(&self) -> &[(usize, f64)] {
        &self.initial
    }

    pub fn timed_rates(&self, state: usize) -> &[(TransitionId, f64)] {
        &self.timed_rates[state]
    }

    pub fn immediate_flow(&self, state: usize) -> &[(TransitionId, f64)] {
        &self.immediate_flow[state]
    }

    /// Generator entry q_ij (diagonal included).
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        self.rows[i]
            .iter()
            .find(|&&(col, _)| col == j)
            .map(|&(_, q)| q)
            .unwrap_or(0.0)
    }

    /// Total outflow rate of state `i` (counting self-loops, which cancel
    /// in the generator but still represent firings).
    pub fn total_rate(&self, i: usize) -> f64 {
        self.timed_rates[i].iter().map(|&(_, r)| r).sum()
    }
}

struct VanishingData {
    /// Probability of eventually reaching each tangible graph state.
    absorb: BTreeMap<usize, f64>,
    /// Expected firings of each immediate transition before absorption.
    firings: BTreeMap<usize, f64>,
}

/// Eliminates vanishing states from `graph`, producing the tangible CTMC.
///
/// Fails with `VanishingLoop` if immediate firings can cycle through
/// vanishing markings without reaching a tangible one.
pub fn eliminate_vanishing(
    graph: &ReachabilityGraph,
    net: &PetriNet,
) -> Result<TangibleChain, GspnError> {
    let n = graph.states.len();
    let mut chain_index = vec![usize::MAX; n];
    let mut states = Vec::new();
    let mut graph_index = Vec::new();
    for i in 0..n {
        if graph.class(i) == StateClass::Tangible {
            chain_index[i] = states.len();
            states.push(graph.marking(i).clone());
            graph_index.push(i);
        }
    }

    let order = vanishing_topo_order(graph)?;
    let mut vanishing: BTreeMap<usize, VanishingData> = BTreeMap::new();
    for &v in order.iter().rev() {
        let mut total_weight = 0.0;
        for &(t, _) in &graph.edges[v] {
            total_weight += immediate_weight(net, t);
        }
        let mut absorb = BTreeMap::new();
        let mut firings = BTreeMap::new();
        for &(t, target) in &graph.edges[v] {
            let p = immediate_weight(net, t) / total_weight;
            *firings.entry(t.0).or_insert(0.0) += p;
            if graph.class(target) == StateClass::Tangible {
                *absorb.entry(target).or_insert(0.0) += p;
            } else {
                let data = &vanishing[&target];
                for (&j, &q) in &data.absorb {
                    *absorb.entry(j).or_insert(0.0) += p * q;
                }
                for (&u, &count) in &data.firings {
                    *firings.entry(u).or_insert(0.0) += p * count;
                }
            }
        }
        vanishing.insert(v, VanishingData { absorb, firings });
    }

    let m = states.len();
    if m == 0 {
        return Err(GspnError::NotErgodic(
            "no tangible marking is reachable".to_string(),
        ));
    }

    let mut rows: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); m];
    let mut timed_rates = vec![Vec::new(); m];
    let mut immediate_flow: Vec<BTreeMap<usize, f64>> = vec![BTreeMap::new(); m];
    for (ci, &gi) in graph_index.iter().enumerate() {
        let marking = graph.marking(gi);
        let mut total = 0.0;
        for &(t, target) in &graph.edges[gi] {
            let rate = net.effective_rate(t, marking);
            timed_rates[ci].push((t, rate));
            total += rate;
            if graph.class(target) == StateClass::Tangible {
                *rows[ci].entry(chain_index[target]).or_insert(0.0) += rate;
            } else {
                let data = &vanishing[&target];
                for (&j, &q) in &data.absorb {
                    *rows[ci].entry(chain_index[j]).or_insert(0.0) += rate * q;
                }
                for (&u, &count) in &data.firings {
                    *immediate_flow[ci].entry(u).or_insert(0.0) += rate * count;
                }
            }
        }
        // Diagonal: self-transitions contribute firings but no net flow.
        let self_inflow = rows[ci].get(&ci).copied().unwrap_or(0.0);
        rows[ci].insert(ci, self_inflow - total);
    }

    let initial = if graph.class(graph.initial) == StateClass::Tangible {
        vec![(chain_index[graph.initial], 1.0)]
    } else {
        vanishing[&graph.initial]
            .absorb
            .iter()
            .map(|(&j, &p)| (chain_index[j], p))
            .collect()
    };

    Ok(TangibleChain {
        states,
        graph_index,
        rows: rows
            .into_iter()
            .map(|r| r.into_iter().collect())
            .collect(),
        initial,
        timed_rates,
        immediate_flow: immediate_flow
            .into_iter()
            .map(|f| f.into_iter().map(|(t, v)| (TransitionId(t), v)).collect())
            .collect(),
    })
}

fn immediate_weight(net: &PetriNet, t: TransitionId) -> f64 {
    match net.transition(t).kind {
        TransitionKind::Immediate { weight, .. } => weight,
        TransitionKind::Timed { .. } => 0.0,
    }
}

/// Topological order of the vanishing subgraph (edges between vanishing
/// states only). Errors out on cycles.
fn vanishing_topo_order(graph: &ReachabilityGraph) -> Result<Vec<usize>, GspnError> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        Unvisited,
        Active,
        Done,
    }
    let n = graph.states.len();
    let mut marks = vec![Mark::Unvisited; n];
    let mut order = Vec::new();
    // Iterative DFS; stack entries are (state, next edge index).
    for start in 0..n {
        if graph.class(start) != StateClass::Vanishing || marks[start] != Mark::Unvisited {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        marks[start] = Mark::Active;
        while let Some(&(v, next)) = stack.last() {
            if let Some(&(_, target)) = graph.edges[v].get(next) {
                stack.last_mut().unwrap().1 += 1;
                if graph.class(target) != StateClass::Vanishing {
                    continue;
                }
                match marks[target] {
                    Mark::Unvisited => {
                        marks[target] = Mark::Active;
                        stack.push((target, 0));
                    }
                    Mark::Active => {
                        return Err(GspnError::VanishingLoop { state: target });
                    }
                    Mark::Done => {}
                }
            } else {
                marks[v] = Mark::Done;
                order.push(v);
                stack.pop();
            }
        }
    }
    order.reverse();
    Ok(order)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspn::{reachability, ServerSemantics};

    #[test]
    fn no_vanishing_states_is_identity() {
        let mut b = PetriNet::builder();
        let p1 = b.place("P1", 1);
        let p2 = b.place("P2", 0);
        let t1 = b.timed("t1", 2.0, ServerSemantics::Single);
        let t2 = b.timed("t2", 1.0, ServerSemantics::Single);
        b.input(t1, p1, 1).output(t1, p2, 1);
        b.input(t2, p2, 1).output(t2, p1, 1);
        let net = b.build().unwrap();
        let graph = reachability(&net, 10).unwrap();
        let chain = eliminate_vanishing(&graph, &net).unwrap();
        assert_eq!(chain.len(), 2);
        assert_eq!(chain.rate(0, 1), 2.0);
        assert_eq!(chain.rate(0, 0), -2.0);
        assert_eq!(chain.rate(1, 0), 1.0);
    }

    #[test]
    fn weights_split_redistributed_flow() {
        // s -(rate 2)-> v, then immediates a (weight 1) -> x, b (weight 3) -> y.
        // x and y drain back to s so every state stays reachable.
        let mut b = PetriNet::builder();
        let s = b.place("S", 1);
        let v = b.place("V", 0);
        let x = b.place("X", 0);
        let y = b.place("Y", 0);
        let lambda = b.timed("lambda", 2.0, ServerSemantics::Single);
        let a = b.immediate("a", 1.0, 1);
        let bb = b.immediate("b", 3.0, 1);
        let back_x = b.timed("back_x", 1.0, ServerSemantics::Single);
        let back_y = b.timed("back_y", 1.0, ServerSemantics::Single);
        b.input(lambda, s, 1).output(lambda, v, 1);
        b.input(a, v, 1).output(a, x, 1);
        b.input(bb, v, 1).output(bb, y, 1);
        b.input(back_x, x, 1).output(back_x, s, 1);
        b.input(back_y, y, 1).output(back_y, s, 1);
        let net = b.build().unwrap();

        let graph = reachability(&net, 10).unwrap();
        let chain = eliminate_vanishing(&graph, &net).unwrap();
        assert_eq!(chain.len(), 3);
        // Chain state 0 is the initial tangible marking S.
        let jx = chain
            .states
            .iter()
            .position(|m| m.tokens(crate::gspn::PlaceId(2)) == 1)
            .unwrap();
        let jy = chain
            .states
            .iter()
            .position(|m| m.tokens(crate::gspn::PlaceId(3)) == 1)
            .unwrap();
        assert!((chain.rate(0, jx) - 0.5).abs() < 1e-12);
        assert!((chain.rate(0, jy) - 1.5).abs() < 1e-12);
        // Immediate flow out of state 0: transition a fires 1/4 of the
        // time, b 3/4, per unit of rate 2.
        let flow = chain.immediate_flow(0);
        assert!((flow[0].1 - 0.5).abs() < 1e-12);
        assert!((flow[1].1 - 1.5).abs() < 1e-12);
    }

    #[test]
    fn vanishing_loop_is_rejected() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 0);
        let q = b.place("Q", 1);
        let t = b.timed("t", 1.0, ServerSemantics::Single);
        let fwd = b.immediate("fwd", 1.0, 1);
        let bwd = b.immediate("bwd", 1.0, 1);
        b.input(t, q, 1).output(t, p, 1);
        b.input(fwd, p, 1).output(fwd, q, 1);
        b.input(bwd, q, 1).output(bwd, p, 1);
        // From the initial marking Q=1 the immediate bwd fires to P=1,
        // then fwd back to Q=1: a pure vanishing cycle.
        let net = b.build().unwrap();
        let graph = reachability(&net, 10).unwrap();
        assert!(matches!(
            eliminate_vanishing(&graph, &net),
            Err(GspnError::VanishingLoop { .. })
        ));
    }

    #[test]
    fn row_mass_matches_timed_rates() {
        let mut b = PetriNet::builder();
        let s = b.place("S", 1);
        let v = b.place("V", 0);
        let t = b.place("T", 0);
        let go = b.timed("go", 3.0, ServerSemantics::Single);
        let imm = b.immediate("imm", 1.0, 1);
        let back = b.timed("back", 1.0, ServerSemantics::Single);
        b.input(go, s, 1).output(go, v, 1);
        b.input(imm, v, 1).output(imm, t, 1);
        b.input(back, t, 1).output(back, s, 1);
        let net = b.build().unwrap();
        let graph = reachability(&net, 10).unwrap();
        let chain = eliminate_vanishing(&graph, &net).unwrap();
        for i in 0..chain.len() {
            let row_sum: f64 = chain.rows()[i].iter().map(|&(_, q)| q).sum();
            assert!(row_sum.abs() < 1e-12);
            let off_diag: f64 = chain.rows()[i]
                .iter()
                .filter(|&&(j, _)| j != i)
                .map(|&(_, q)| q)
                .sum();
            assert!((off_diag - chain.total_rate(i)).abs() < 1e-12);
        }
    }
}
