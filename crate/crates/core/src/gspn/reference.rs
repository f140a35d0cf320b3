//! Independent reference solver for cross-checking.
//!
//! Solves the embedded Markov chain over the full state space (tangible
//! and vanishing markings together): one-step jump probabilities come
//! from normalized rates or immediate weights, the stationary vector of
//! the jump chain is found by a dense LU solve, and tangible
//! probabilities are recovered by weighting with mean sojourn times.
//! This path shares no reduction or elimination code with the production
//! solver.

use nalgebra::DMatrix;

use super::{GspnError, Marking, PetriNet, ReachabilityGraph, StateClass, TransitionKind};

#[derive(Debug)]
pub struct ReferenceSolution {
    /// Tangible markings paired with their steady-state probability.
    pub tangible: Vec<(Marking, f64)>,
}

impl ReferenceSolution {
    pub fn probability_of(&self, marking: &Marking) -> Option<f64> {
        self.tangible
            .iter()
            .find(|(m, _)| m == marking)
            .map(|&(_, p)| p)
    }
}

pub fn solve_embedded(
    net: &PetriNet,
    graph: &ReachabilityGraph,
) -> Result<ReferenceSolution, GspnError> {
    let n = graph.states.len();
    let mut p = DMatrix::<f64>::zeros(n, n);
    let mut sojourn = vec![0.0f64; n];

    for (i, (marking, class)) in graph.states.iter().enumerate() {
        match class {
            StateClass::Tangible => {
                let total: f64 = graph.edges[i]
                    .iter()
                    .map(|&(t, _)| net.effective_rate(t, marking))
                    .sum();
                if total <= 0.0 {
                    return Err(GspnError::NotErgodic(format!(
                        "state {i} is a dead marking"
                    )));
                }
                sojourn[i] = 1.0 / total;
                for &(t, target) in &graph.edges[i] {
                    p[(i, target)] += net.effective_rate(t, marking) / total;
                }
            }
            StateClass::Vanishing => {
                let total: f64 = graph.edges[i]
                    .iter()
                    .map(|&(t, _)| match net.transition(t).kind {
                        TransitionKind::Immediate { weight, .. } => weight,
                        TransitionKind::Timed { .. } => 0.0,
                    })
                    .sum();
                for &(t, target) in &graph.edges[i] {
                    if let TransitionKind::Immediate { weight, .. } = net.transition(t).kind {
                        p[(i, target)] += weight / total;
                    }
                }
            }
        }
    }

    // psi (P - I) = 0 with normalization: transpose and replace the last
    // equation by sum(psi) = 1.
    let mut a = p.transpose() - DMatrix::<f64>::identity(n, n);
    let mut b = nalgebra::DVector::<f64>::zeros(n);
    for j in 0..n {
        a[(n - 1, j)] = 1.0;
    }
    b[n - 1] = 1.0;
    let psi = a
        .lu()
        .solve(&b)
        .ok_or_else(|| GspnError::SolverFailure("embedded chain system is singular".to_string()))?;

    let mut weighted: Vec<f64> = (0..n).map(|i| psi[i] * sojourn[i]).collect();
    let total: f64 = weighted.iter().sum();
    if !(total > 0.0) {
        return Err(GspnError::SolverFailure(
            "embedded chain has no tangible mass".to_string(),
        ));
    }
    for w in &mut weighted {
        *w /= total;
    }

    let tangible = graph
        .states
        .iter()
        .enumerate()
        .filter(|(_, (_, class))| *class == StateClass::Tangible)
        .map(|(i, (marking, _))| (marking.clone(), weighted[i]))
        .collect();
    Ok(ReferenceSolution { tangible })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspn::{eliminate_vanishing, reachability, steady_state, ServerSemantics};

    #[test]
    fn agrees_with_production_solver_through_vanishing_states() {
        // Tangible A -(2)-> vanishing V -(weights 1:3)-> tangible X | Y,
        // each returning to A at different rates.
        let mut b = PetriNet::builder();
        let a = b.place("A", 1);
        let v = b.place("V", 0);
        let x = b.place("X", 0);
        let y = b.place("Y", 0);
        let go = b.timed("go", 2.0, ServerSemantics::Single);
        let pick_x = b.immediate("pick_x", 1.0, 1);
        let pick_y = b.immediate("pick_y", 3.0, 1);
        let back_x = b.timed("back_x", 0.7, ServerSemantics::Single);
        let back_y = b.timed("back_y", 1.3, ServerSemantics::Single);
        b.input(go, a, 1).output(go, v, 1);
        b.input(pick_x, v, 1).output(pick_x, x, 1);
        b.input(pick_y, v, 1).output(pick_y, y, 1);
        b.input(back_x, x, 1).output(back_x, a, 1);
        b.input(back_y, y, 1).output(back_y, a, 1);
        let net = b.build().unwrap();

        let graph = reachability(&net, 100).unwrap();
        let chain = eliminate_vanishing(&graph, &net).unwrap();
        let pi = steady_state(&chain, 1e-12).unwrap().probabilities;
        let reference = solve_embedded(&net, &graph).unwrap();
        for (i, marking) in chain.states.iter().enumerate() {
            let r = reference.probability_of(marking).unwrap();
            assert!(
                (pi[i] - r).abs() < 1e-12,
                "state {i}: {} vs {r}",
                pi[i]
            );
        }
    }
}
