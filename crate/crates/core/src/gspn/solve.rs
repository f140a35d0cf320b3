//! Steady-state solution of the tangible CTMC and transition throughputs.

use super::{GspnError, PetriNet, TangibleChain};

/// State counts up to this size are solved by direct elimination; larger
/// chains fall back to uniformized power iteration.
pub const DIRECT_SOLVE_LIMIT: usize = 2_000;

const POWER_MAX_SWEEPS: usize = 2_000_000;

#[derive(Debug, Clone)]
pub struct SteadyState {
    /// Probability per chain state.
    pub probabilities: Vec<f64>,
    /// Max-norm of pi * Q at return.
    pub residual: f64,
}

/// Solves pi Q = 0, sum(pi) = 1 for an ergodic chain.
///
/// Ergodicity is checked structurally first (the positive-rate digraph
/// must be strongly connected); `NotErgodic` is returned otherwise.
/// `SolverFailure` is returned when the residual cannot be driven below
/// `tol`.
pub fn steady_state(chain: &TangibleChain, tol: f64) -> Result<SteadyState, GspnError> {
    if !(tol > 0.0) {
        return Err(GspnError::SolverFailure(format!(
            "tolerance {tol} must be positive"
        )));
    }
    let n = chain.len();
    check_ergodic(chain)?;
    if n == 1 {
        return Ok(SteadyState {
            probabilities: vec![1.0],
            residual: 0.0,
        });
    }

    let mut pi = if n <= DIRECT_SOLVE_LIMIT {
        direct_solve(chain)?
    } else {
        power_solve(chain, tol)?
    };

    // Clamp solver noise and renormalize.
    for p in &mut pi {
        if *p < 0.0 && *p > -tol {
            *p = 0.0;
        }
        if *p < 0.0 {
            return Err(GspnError::SolverFailure(format!(
                "negative probability {p} in solution"
            )));
        }
    }
    let total: f64 = pi.iter().sum();
    if !(total > 0.0) || !total.is_finite() {
        return Err(GspnError::SolverFailure(
            "solution mass is not positive".to_string(),
        ));
    }
    for p in &mut pi {
        *p /= total;
    }

    let residual = residual_max_norm(chain, &pi);
    if residual > tol {
        return Err(GspnError::SolverFailure(format!(
            "residual {residual:e} exceeds tolerance {tol:e}"
        )));
    }
    Ok(SteadyState {
        probabilities: pi,
        residual,
    })
}

/// Expected firings per unit time for every transition of the net.
///
/// Timed transitions accumulate `pi(s) * effective_rate(s)` over the
/// states enabling them; immediate transitions use the flow-weighted
/// firing counts retained during vanishing elimination.
pub fn throughputs(net: &PetriNet, chain: &TangibleChain, pi: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; net.transitions().len()];
    for (s, &p) in pi.iter().enumerate() {
        for &(t, rate) in chain.timed_rates(s) {
            out[t.0] += p * rate;
        }
        for &(t, flow) in chain.immediate_flow(s) {
            out[t.0] += p * flow;
        }
    }
    out
}

/// Net token flow balance per place: at steady state the inflow and
/// outflow rates of every place coincide; the imbalance vector is
/// returned for checking.
pub fn place_flow_imbalance(net: &PetriNet, thr: &[f64]) -> Vec<f64> {
    let mut balance = vec![0.0; net.places().len()];
    for (i, tr) in net.transitions().iter().enumerate() {
        for &(p, mult) in tr.outputs() {
            balance[p.0] += thr[i] * f64::from(mult);
        }
        for &(p, mult) in tr.inputs() {
            balance[p.0] -= thr[i] * f64::from(mult);
        }
    }
    balance
}

fn check_ergodic(chain: &TangibleChain) -> Result<(), GspnError> {
    let n = chain.len();
    let mut fwd = vec![Vec::new(); n];
    let mut bwd = vec![Vec::new(); n];
    for (i, row) in chain.rows().iter().enumerate() {
        for &(j, q) in row {
            if i != j && q > 0.0 {
                fwd[i].push(j);
                bwd[j].push(i);
            }
        }
    }
    let reach = |adj: &Vec<Vec<usize>>| {
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        while let Some(v) = stack.pop() {
            for &w in &adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
        seen
    };
    if let Some(i) = reach(&fwd).iter().position(|&s| !s) {
        return Err(GspnError::NotErgodic(format!(
            "state {i} is not reachable from state 0 in the tangible chain"
        )));
    }
    if let Some(i) = reach(&bwd).iter().position(|&s| !s) {
        return Err(GspnError::NotErgodic(format!(
            "state 0 is not reachable from state {i} in the tangible chain (absorbing subset)"
        )));
    }
    Ok(())
}

/// Gaussian elimination with partial pivoting on Q^T with the last
/// equation replaced by the normalization constraint.
fn direct_solve(chain: &TangibleChain) -> Result<Vec<f64>, GspnError> {
    let n = chain.len();
    let mut a = vec![vec![0.0f64; n + 1]; n];
    for (i, row) in chain.rows().iter().enumerate() {
        for &(j, q) in row {
            if j < n - 1 {
                a[j][i] = q;
            }
        }
    }
    for i in 0..n {
        a[n - 1][i] = 1.0;
    }
    a[n - 1][n] = 1.0;

    for col in 0..n {
        let pivot_row = (col..n)
            .max_by(|&r1, &r2| a[r1][col].abs().total_cmp(&a[r2][col].abs()))
            .unwrap();
        if a[pivot_row][col].abs() < f64::MIN_POSITIVE {
            return Err(GspnError::SolverFailure(format!(
                "singular system at column {col}"
            )));
        }
        a.swap(col, pivot_row);
        for row in col + 1..n {
            let factor = a[row][col] / a[col][col];
            if factor == 0.0 {
                continue;
            }
            for k in col..=n {
                a[row][k] -= factor * a[col][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let mut acc = a[row][n];
        for k in row + 1..n {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Ok(x)
}

/// Uniformized power iteration: pi <- pi (I + Q / lambda) until the
/// generator residual meets the tolerance.
fn power_solve(chain: &TangibleChain, tol: f64) -> Result<Vec<f64>, GspnError> {
    let n = chain.len();
    let lambda = chain
        .rows()
        .iter()
        .enumerate()
        .map(|(i, row)| {
            row.iter()
                .find(|&&(j, _)| j == i)
                .map(|&(_, q)| -q)
                .unwrap_or(0.0)
        })
        .fold(0.0f64, f64::max)
        * 1.02
        + 1e-12;
    let mut pi = vec![1.0 / n as f64; n];
    let mut next = vec![0.0f64; n];
    for sweep in 0..POWER_MAX_SWEEPS {
        next.copy_from_slice(&pi);
        for (i, row) in chain.rows().iter().enumerate() {
            let p = pi[i];
            if p == 0.0 {
                continue;
            }
            for &(j, q) in row {
                next[j] += p * q / lambda;
            }
        }
        let total: f64 = next.iter().sum();
        for v in &mut next {
            *v /= total;
        }
        std::mem::swap(&mut pi, &mut next);
        if sweep % 32 == 0 && residual_max_norm(chain, &pi) <= tol * 0.5 {
            return Ok(pi);
        }
    }
    Err(GspnError::SolverFailure(format!(
        "power iteration did not converge in {POWER_MAX_SWEEPS} sweeps"
    )))
}

fn residual_max_norm(chain: &TangibleChain, pi: &[f64]) -> f64 {
    let n = chain.len();
    let mut res = vec![0.0f64; n];
    for (i, row) in chain.rows().iter().enumerate() {
        for &(j, q) in row {
            res[j] += pi[i] * q;
        }
    }
    res.iter().fold(0.0f64, |m, v| m.max(v.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspn::{eliminate_vanishing, reachability, PetriNet, ServerSemantics};

    fn cycle(rates: &[f64]) -> PetriNet {
        let mut b = PetriNet::builder();
        let places: Vec<_> = (0..rates.len())
            .map(|i| b.place(format!("P{i}"), u32::from(i == 0)))
            .collect();
        for (i, &r) in rates.iter().enumerate() {
            let t = b.timed(format!("t{i}"), r, ServerSemantics::Single);
            b.input(t, places[i], 1)
                .output(t, places[(i + 1) % rates.len()], 1);
        }
        b.build().unwrap()
    }

    fn solve(net: &PetriNet) -> (TangibleChain, Vec<f64>) {
        let graph = reachability(net, 1000).unwrap();
        let chain = eliminate_vanishing(&graph, net).unwrap();
        let pi = steady_state(&chain, 1e-10).unwrap().probabilities;
        (chain, pi)
    }

    #[test]
    fn two_state_cycle_matches_closed_form() {
        // lambda = 2 out of state 0, mu = 1 back: pi = (1/3, 2/3).
        let net = cycle(&[2.0, 1.0]);
        let (_, pi) = solve(&net);
        assert!((pi[0] - 1.0 / 3.0).abs() < 1e-12);
        assert!((pi[1] - 2.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn three_state_uniform_rates_are_uniform() {
        let net = cycle(&[1.0, 1.0, 1.0]);
        let (_, pi) = solve(&net);
        for p in pi {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn cycle_throughputs_balance() {
        let net = cycle(&[2.0, 1.0]);
        let (chain, pi) = solve(&net);
        let thr = throughputs(&net, &chain, &pi);
        assert!((thr[0] - 2.0 / 3.0).abs() < 1e-12);
        assert!((thr[1] - 2.0 / 3.0).abs() < 1e-12);
        for imbalance in place_flow_imbalance(&net, &thr) {
            assert!(imbalance.abs() < 1e-12);
        }
    }

    #[test]
    fn absorbing_state_is_rejected() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 1);
        let q = b.place("Q", 0);
        let t = b.timed("t", 1.0, ServerSemantics::Single);
        b.input(t, p, 1).output(t, q, 1);
        let net = b.build().unwrap();
        let graph = reachability(&net, 10).unwrap();
        let chain = eliminate_vanishing(&graph, &net).unwrap();
        assert!(matches!(
            steady_state(&chain, 1e-10),
            Err(GspnError::NotErgodic(_))
        ));
    }
}
