//! Builder for the redundant-watchdog GSPN.
//!
//! The net couples a cyclic skeleton application with a bank of `n`
//! watchdog replicas and a reset path:
//!
//! - Application: `Ap1` (working) --activity--> `ApK` (kick pending);
//!   the immediate `ok` family consumes the kick and re-arms every
//!   surviving watchdog; `ap_fault` halts the application into `Ap2`.
//! - Watchdogs: `Wd1` (armed, initially `n`) --timeout--> `Wd2`
//!   (expired); `w_fault` moves armed replicas into `Wd3` (faulty) and
//!   `w_repair` respawns them.
//! - Policy: the immediates `delayed` (application alive, a false alarm)
//!   and `faulty` (application halted in `Ap2`, a detected fault) consume
//!   `votes` tokens from `Wd2`, where `votes` is 1 for OR, `n` for AND
//!   and `k` for k-out-of-n. Both raise the alarm by marking `Rst`.
//! - Reset: while `Rst` is marked every other activity is inhibited;
//!   immediate drains stage the application token into `ApS` and return
//!   expired/faulty watchdog tokens to `Wd1`; the timed `cycle` then
//!   restores the initial configuration exactly.
//!
//! The `ok` family has one variant per (armed, expired) split that a kick
//! can encounter: variant `ok_w{a}_e{b}` consumes `a` armed and exactly
//! `b` expired tokens (an inhibitor pins Wd2 == b) and re-arms all of
//! them. Splits with fewer than `n` survivors cover kicks sent while some
//! replicas are faulty; a kick never blocks the application. For AND the
//! full-strength variants (a + b = n, b < n) are the ones reachable in
//! the fault-free regime.

use crate::gspn::{GspnError, PetriNet, PlaceId, ServerSemantics, TransitionId};
use crate::policy::VotingPolicy;

#[derive(Debug, Clone, PartialEq)]
pub struct RwdParams {
    pub n_replicas: u32,
    /// Application activity rate (mean delay 0.5 at the default 2.0).
    pub rate_activity: f64,
    /// Fault rate for both the application and each watchdog replica.
    pub rate_fault: f64,
    /// Restart rate of the reset path.
    pub rate_cycle: f64,
    /// Respawn rate of a faulty watchdog replica.
    pub rate_repair: f64,
    /// Watchdog countdown rate; the sweep variable.
    pub rate_timeout: f64,
    pub policy: VotingPolicy,
}

impl Default for RwdParams {
    fn default() -> Self {
        RwdParams {
            n_replicas: 3,
            rate_activity: 2.0,
            rate_fault: 0.1,
            rate_cycle: 1.0,
            rate_repair: 1.0,
            rate_timeout: 1.0,
            policy: VotingPolicy::Or,
        }
    }
}

impl RwdParams {
    pub fn with_policy(mut self, policy: VotingPolicy) -> Self {
        self.policy = policy;
        self
    }

    pub fn with_timeout_rate(mut self, rate: f64) -> Self {
        self.rate_timeout = rate;
        self
    }

    fn validate(&self) -> Result<(), GspnError> {
        let bad = |what: String| GspnError::BadParameter {
            transition: "rwd model".to_string(),
            what,
        };
        if self.n_replicas == 0 {
            return Err(bad("n_replicas must be at least 1".to_string()));
        }
        for (name, rate) in [
            ("activity", self.rate_activity),
            ("fault", self.rate_fault),
            ("cycle", self.rate_cycle),
            ("repair", self.rate_repair),
            ("timeout", self.rate_timeout),
        ] {
            if !(rate > 0.0) || !rate.is_finite() {
                return Err(bad(format!("rate_{name} {rate} must be finite and positive")));
            }
        }
        let votes = self.policy.votes_required(self.n_replicas);
        if votes == 0 || votes > self.n_replicas {
            return Err(bad(format!(
                "policy {} needs {votes} votes but there are {} replicas",
                self.policy, self.n_replicas
            )));
        }
        Ok(())
    }
}

/// Named handles into the built net.
#[derive(Debug, Clone)]
pub struct RoleMap {
    pub ap_working: PlaceId,
    pub ap_halted: PlaceId,
    pub ap_kick: PlaceId,
    pub ap_staged: PlaceId,
    pub reset: PlaceId,
    pub wd_armed: PlaceId,
    pub wd_expired: PlaceId,
    pub wd_faulty: PlaceId,
    pub activity: TransitionId,
    pub ap_fault: TransitionId,
    pub w_fault: TransitionId,
    pub w_repair: TransitionId,
    pub timeout: TransitionId,
    pub cycle: TransitionId,
    pub delayed: TransitionId,
    pub faulty: TransitionId,
    pub ok_family: Vec<TransitionId>,
    pub drain_family: Vec<TransitionId>,
}

#[derive(Debug, Clone)]
pub struct RwdModel {
    pub net: PetriNet,
    pub roles: RoleMap,
    pub params: RwdParams,
}

impl RwdModel {
    /// Sum of throughputs over a transition family.
    pub fn family_throughput(&self, family: &[TransitionId], thr: &[f64]) -> f64 {
        family.iter().map(|t| thr[t.0]).sum()
    }
}

pub fn build(params: &RwdParams) -> Result<RwdModel, GspnError> {
    params.validate()?;
    let n = params.n_replicas;
    let votes = params.policy.votes_required(n);

    let mut b = PetriNet::builder();
    let ap1 = b.place("Ap1", 1);
    let ap2 = b.place("Ap2", 0);
    let apk = b.place("ApK", 0);
    let aps = b.place("ApS", 0);
    let rst = b.place("Rst", 0);
    let wd1 = b.place("Wd1", n);
    let wd2 = b.place("Wd2", 0);
    let wd3 = b.place("Wd3", 0);

    let inf = ServerSemantics::Infinite;
    let activity = b.timed("activity", params.rate_activity, inf);
    b.input(activity, ap1, 1).output(activity, apk, 1);
    let ap_fault = b.timed("ap_fault", params.rate_fault, inf);
    b.input(ap_fault, ap1, 1).output(ap_fault, ap2, 1);
    let w_fault = b.timed("w_fault", params.rate_fault, inf);
    b.input(w_fault, wd1, 1).output(w_fault, wd3, 1);
    let w_repair = b.timed("w_repair", params.rate_repair, inf);
    b.input(w_repair, wd3, 1).output(w_repair, wd1, 1);
    let timeout = b.timed("timeout", params.rate_timeout, inf);
    b.input(timeout, wd1, 1).output(timeout, wd2, 1);
    let cycle = b.timed("cycle", params.rate_cycle, inf);
    b.input(cycle, rst, 1).input(cycle, aps, 1).output(cycle, ap1, 1);

    // Everything but the reset path pauses while the system restarts.
    for t in [activity, ap_fault, w_fault, w_repair, timeout] {
        b.inhibitor(t, rst, 1);
    }

    // Alarm: the expiry votes are consumed and rearmed, the restart is
    // requested. `delayed` fires against a live application (false
    // alarm); `faulty` against a halted one and routes it to the reset
    // staging place.
    let delayed = b.immediate("delayed", 1.0, 1);
    b.input(delayed, wd2, votes)
        .output(delayed, wd1, votes)
        .output(delayed, rst, 1)
        .inhibitor(delayed, ap2, 1)
        .inhibitor(delayed, rst, 1);
    let faulty = b.immediate("faulty", 1.0, 1);
    b.input(faulty, wd2, votes)
        .input(faulty, ap2, 1)
        .output(faulty, wd1, votes)
        .output(faulty, rst, 1)
        .output(faulty, aps, 1)
        .inhibitor(faulty, rst, 1);

    // Kick handling: one variant per reachable (armed, expired) split.
    let mut ok_family = Vec::new();
    for faulted in 0..=n {
        let survivors = n - faulted;
        for expired in 0..=survivors.min(votes.saturating_sub(1)) {
            let armed = survivors - expired;
            let ok = b.immediate(format!("ok_w{armed}_e{expired}"), 1.0, 1);
            b.input(ok, apk, 1).output(ok, ap1, 1);
            if armed > 0 {
                b.input(ok, wd1, armed);
            }
            if expired > 0 {
                b.input(ok, wd2, expired);
            }
            if survivors > 0 {
                b.output(ok, wd1, survivors);
            }
            b.inhibitor(ok, wd2, expired + 1);
            b.inhibitor(ok, rst, 1);
            ok_family.push(ok);
        }
    }

    // Reset drains: stage the application token, return watchdog tokens
    // to the armed place, then `cycle` restores the initial marking.
    let mut drain_family = Vec::new();
    for (name, from, to) in [
        ("drain_ap1", ap1, aps),
        ("drain_apk", apk, aps),
        ("drain_wd2", wd2, wd1),
        ("drain_wd3", wd3, wd1),
    ] {
        let d = b.immediate(name, 1.0, 1);
        b.input(d, rst, 1)
            .output(d, rst, 1)
            .input(d, from, 1)
            .output(d, to, 1);
        drain_family.push(d);
    }

    let net = b.build()?;
    Ok(RwdModel {
        net,
        roles: RoleMap {
            ap_working: ap1,
            ap_halted: ap2,
            ap_kick: apk,
            ap_staged: aps,
            reset: rst,
            wd_armed: wd1,
            wd_expired: wd2,
            wd_faulty: wd3,
            activity,
            ap_fault,
            w_fault,
            w_repair,
            timeout,
            cycle,
            delayed,
            faulty,
            ok_family,
            drain_family,
        },
        params: params.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gspn::{
        eliminate_vanishing, p_invariants, reachability, steady_state, write_net, StateClass,
    };

    #[test]
    fn or_model_keeps_wd2_empty_in_tangible_states() {
        let model = build(&RwdParams::default()).unwrap();
        let graph = reachability(&model.net, 10_000).unwrap();
        for (marking, class) in &graph.states {
            if *class == StateClass::Tangible {
                assert_eq!(marking.tokens(model.roles.wd_expired), 0);
            }
        }
    }

    #[test]
    fn and_model_reaches_two_expired_tokens_with_positive_probability() {
        let params = RwdParams::default().with_policy(VotingPolicy::And);
        let model = build(&params).unwrap();
        let graph = reachability(&model.net, 10_000).unwrap();
        let chain = eliminate_vanishing(&graph, &model.net).unwrap();
        let pi = steady_state(&chain, 1e-10).unwrap().probabilities;
        let mass: f64 = chain
            .states
            .iter()
            .zip(&pi)
            .filter(|(m, _)| m.tokens(model.roles.wd_expired) == 2)
            .map(|(_, &p)| p)
            .sum();
        assert!(mass > 0.0, "no steady-state mass on Wd2 = 2");
    }

    #[test]
    fn single_replica_policies_build_identical_nets() {
        let or = build(&RwdParams {
            n_replicas: 1,
            ..RwdParams::default()
        })
        .unwrap();
        let and = build(&RwdParams {
            n_replicas: 1,
            policy: VotingPolicy::And,
            ..RwdParams::default()
        })
        .unwrap();
        assert_eq!(write_net(&or.net), write_net(&and.net));
    }

    #[test]
    fn builder_is_deterministic() {
        let a = build(&RwdParams::default()).unwrap();
        let b = build(&RwdParams::default()).unwrap();
        assert_eq!(write_net(&a.net), write_net(&b.net));
    }

    #[test]
    fn and_model_has_watchdog_token_invariant() {
        let params = RwdParams::default().with_policy(VotingPolicy::And);
        let model = build(&params).unwrap();
        let invs = p_invariants(&model.net).unwrap();
        let wd_support: Vec<usize> = vec![
            model.roles.wd_armed.0,
            model.roles.wd_expired.0,
            model.roles.wd_faulty.0,
        ];
        let found = invs.iter().find(|inv| {
            let mut support = inv.support();
            support.sort_unstable();
            let mut expected = wd_support.clone();
            expected.sort_unstable();
            support == expected
        });
        let inv = found.expect("no invariant with support {Wd1, Wd2, Wd3}");
        assert_eq!(inv.weighted_sum(&model.net.initial_marking()), 3);
    }

    #[test]
    fn rejects_invalid_params() {
        let mut p = RwdParams::default();
        p.rate_timeout = 0.0;
        assert!(build(&p).is_err());
        let p = RwdParams {
            policy: VotingPolicy::KOutOfN(4),
            ..RwdParams::default()
        };
        assert!(build(&p).is_err());
    }
}
