//! Direct stochastic simulation of a GSPN, for cross-validating the
//! analytic solution.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::gspn::{GspnError, PetriNet, TransitionKind};
use crate::policy::derive_seed;

use super::model::{build, RwdModel, RwdParams};

#[derive(Debug, Clone, Copy)]
pub struct McEstimate {
    /// Mean firings per unit time across replications.
    pub mean: f64,
    /// Standard error of the mean.
    pub std_err: f64,
}

/// Simulates the built model for `horizon` time units, `replications`
/// times with independently derived seeds, and estimates the throughput
/// of every transition. Timed transitions race with exponential delays
/// at their effective (server-adjusted) rates; enabled immediates are
/// chosen weight-proportionally and fire in zero time.
pub fn monte_carlo(
    params: &RwdParams,
    horizon: f64,
    replications: u32,
    seed: u64,
) -> Result<(RwdModel, Vec<McEstimate>), GspnError> {
    if !(horizon > 0.0) || replications == 0 {
        return Err(GspnError::SolverFailure(
            "horizon and replications must be positive".to_string(),
        ));
    }
    let model = build(params)?;
    let n_transitions = model.net.transitions().len();
    let mut per_rep: Vec<Vec<f64>> = Vec::with_capacity(replications as usize);
    for rep in 0..replications {
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::from(rep)));
        per_rep.push(simulate_once(&model.net, horizon, &mut rng));
    }

    let reps = replications as f64;
    let estimates = (0..n_transitions)
        .map(|t| {
            let mean = per_rep.iter().map(|r| r[t]).sum::<f64>() / reps;
            let var = if replications > 1 {
                per_rep.iter().map(|r| (r[t] - mean).powi(2)).sum::<f64>() / (reps - 1.0)
            } else {
                0.0
            };
            McEstimate {
                mean,
                std_err: (var / reps).sqrt(),
            }
        })
        .collect();
    Ok((model, estimates))
}

/// One trajectory; returns firings per unit time for each transition.
pub fn simulate_once(net: &PetriNet, horizon: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    let mut marking = net.initial_marking();
    let mut counts = vec![0u64; net.transitions().len()];
    let mut now = 0.0f64;
    loop {
        let enabled = net.enabled(&marking);
        if enabled.is_empty() {
            break;
        }
        let first = enabled[0];
        if net.transition(first).is_immediate() {
            let weights: Vec<f64> = enabled
                .iter()
                .map(|&t| match net.transition(t).kind {
                    TransitionKind::Immediate { weight, .. } => weight,
                    TransitionKind::Timed { .. } => 0.0,
                })
                .collect();
            let t = enabled[weighted_choice(&weights, rng)];
            counts[t.0] += 1;
            marking = net.fire(t, &marking);
        } else {
            let rates: Vec<f64> = enabled
                .iter()
                .map(|&t| net.effective_rate(t, &marking))
                .collect();
            let total: f64 = rates.iter().sum();
            // Race of exponentials: advance by Exp(total), pick the
            // winner rate-proportionally.
            let u: f64 = rng.random::<f64>();
            now += -(1.0 - u).ln() / total;
            if now > horizon {
                break;
            }
            let t = enabled[weighted_choice(&rates, rng)];
            counts[t.0] += 1;
            marking = net.fire(t, &marking);
        }
    }
    counts.into_iter().map(|c| c as f64 / horizon).collect()
}

fn weighted_choice(weights: &[f64], rng: &mut ChaCha8Rng) -> usize {
    let total: f64 = weights.iter().sum();
    let mut draw: f64 = rng.random::<f64>() * total;
    for (i, &w) in weights.iter().enumerate() {
        draw -= w;
        if draw <= 0.0 {
            return i;
        }
    }
    weights.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspn::ServerSemantics;

    #[test]
    fn two_state_cycle_matches_analytic_throughput() {
        // lambda = 2, mu = 1: both transitions fire 2/3 per unit time.
        let mut b = PetriNet::builder();
        let p1 = b.place("P1", 1);
        let p2 = b.place("P2", 0);
        let t1 = b.timed("t1", 2.0, ServerSemantics::Single);
        let t2 = b.timed("t2", 1.0, ServerSemantics::Single);
        b.input(t1, p1, 1).output(t1, p2, 1);
        b.input(t2, p2, 1).output(t2, p1, 1);
        let net = b.build().unwrap();

        let horizon = 5_000.0;
        let reps = 16u32;
        let mut per_rep = Vec::new();
        for rep in 0..reps {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(7, u64::from(rep)));
            per_rep.push(simulate_once(&net, horizon, &mut rng));
        }
        for t in 0..2 {
            let mean: f64 = per_rep.iter().map(|r| r[t]).sum::<f64>() / f64::from(reps);
            let var: f64 = per_rep
                .iter()
                .map(|r| (r[t] - mean).powi(2))
                .sum::<f64>()
                / f64::from(reps - 1);
            let se = (var / f64::from(reps)).sqrt();
            assert!(
                (mean - 2.0 / 3.0).abs() <= 3.0 * se.max(1e-4),
                "transition {t}: mean {mean}, se {se}"
            );
        }
    }

    #[test]
    fn fixed_seed_reproduces_estimates() {
        let params = RwdParams::default();
        let (_, a) = monte_carlo(&params, 200.0, 4, 99).unwrap();
        let (_, b) = monte_carlo(&params, 200.0, 4, 99).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.mean, y.mean);
            assert_eq!(x.std_err, y.std_err);
        }
    }
}
