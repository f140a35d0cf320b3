//! Timeout-rate sweeps producing throughput comparison tables.

use std::fmt::Write as _;

use crate::gspn::{eliminate_vanishing, reachability, steady_state, throughputs, GspnError};
use crate::policy::VotingPolicy;

use super::model::{build, RwdParams};

pub const SWEEP_CSV_HEADER: &str =
    "policy,timeout_rate,thr_activity,thr_ok,thr_timeout,thr_delayed,thr_faulty,thr_cycle";

#[derive(Debug, Clone, Copy)]
pub struct SweepThroughputs {
    pub activity: f64,
    pub ok: f64,
    pub timeout: f64,
    pub delayed: f64,
    pub faulty: f64,
    pub cycle: f64,
}

#[derive(Debug)]
pub struct SweepRow {
    pub policy: VotingPolicy,
    pub timeout_rate: f64,
    pub result: Result<SweepThroughputs, GspnError>,
}

/// Builds, solves and tabulates every (policy, rate) pair. Solver
/// failures mark their row failed instead of aborting the sweep. Rows
/// are ordered by (policy label, rate).
pub fn sweep(
    template: &RwdParams,
    policies: &[VotingPolicy],
    rates: &[f64],
    cap: usize,
    tol: f64,
) -> Vec<SweepRow> {
    let mut pairs: Vec<(VotingPolicy, f64)> = Vec::new();
    for &policy in policies {
        for &rate in rates {
            pairs.push((policy, rate));
        }
    }
    pairs.sort_by(|a, b| {
        (a.0.label(), a.1)
            .partial_cmp(&(b.0.label(), b.1))
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    pairs
        .into_iter()
        .map(|(policy, rate)| {
            let params = template.clone().with_policy(policy).with_timeout_rate(rate);
            SweepRow {
                policy,
                timeout_rate: rate,
                result: solve_point(&params, cap, tol),
            }
        })
        .collect()
}

pub fn solve_point(params: &RwdParams, cap: usize, tol: f64) -> Result<SweepThroughputs, GspnError> {
    let model = build(params)?;
    let graph = reachability(&model.net, cap)?;
    let chain = eliminate_vanishing(&graph, &model.net)?;
    let pi = steady_state(&chain, tol)?.probabilities;
    let thr = throughputs(&model.net, &chain, &pi);
    let roles = &model.roles;
    Ok(SweepThroughputs {
        activity: thr[roles.activity.0],
        ok: model.family_throughput(&roles.ok_family, &thr),
        timeout: thr[roles.timeout.0],
        delayed: thr[roles.delayed.0],
        faulty: thr[roles.faulty.0],
        cycle: thr[roles.cycle.0],
    })
}

pub fn write_sweep_csv(rows: &[SweepRow]) -> String {
    let mut out = String::from(SWEEP_CSV_HEADER);
    out.push('\n');
    for row in rows {
        match &row.result {
            Ok(t) => {
                let _ = writeln!(
                    out,
                    "{},{},{},{},{},{},{},{}",
                    row.policy, row.timeout_rate, t.activity, t.ok, t.timeout, t.delayed, t.faulty,
                    t.cycle
                );
            }
            Err(_) => {
                let _ = writeln!(
                    out,
                    "{},{},nan,nan,nan,nan,nan,nan",
                    row.policy, row.timeout_rate
                );
            }
        }
    }
    out
}

/// Whitespace-separated table, one block per policy separated by blank
/// lines, for `plot ... index N` style consumption.
pub fn write_sweep_gnuplot(rows: &[SweepRow]) -> String {
    let mut out = String::new();
    let mut current: Option<VotingPolicy> = None;
    for row in rows {
        if current != Some(row.policy) {
            if current.is_some() {
                out.push_str("\n\n");
            }
            let _ = writeln!(
                out,
                "# policy {}\n# rate activity ok timeout delayed faulty cycle",
                row.policy
            );
            current = Some(row.policy);
        }
        match &row.result {
            Ok(t) => {
                let _ = writeln!(
                    out,
                    "{} {} {} {} {} {} {}",
                    row.timeout_rate, t.activity, t.ok, t.timeout, t.delayed, t.faulty, t.cycle
                );
            }
            Err(_) => {
                let _ = writeln!(out, "{} nan nan nan nan nan nan", row.timeout_rate);
            }
        }
    }
    out
}
