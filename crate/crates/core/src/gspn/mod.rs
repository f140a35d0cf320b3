//! Generalized stochastic Petri nets.
//!
//! A net has places holding tokens and transitions that are either timed
//! (exponentially distributed delay, single- or infinite-server) or
//! immediate (fire in zero time, chosen by weight within the highest
//! enabled priority class). Analyses provided here: reachability with
//! tangible/vanishing classification, elimination of vanishing markings
//! into a tangible CTMC, steady-state solution, transition throughputs,
//! minimal P-invariants, and structural state-space queries.

mod chain;
mod error;
mod format;
mod invariant;
mod query;
mod reach;
pub mod reference;
mod solve;

pub use chain::{eliminate_vanishing, TangibleChain};
pub use error::GspnError;
pub use format::{parse_net, write_net};
pub use invariant::{p_invariants, PInvariant};
pub use query::{parse_query, run_query, Query, QueryOutcome, StateClass as QueryClass};
pub use reach::{reachability, ReachabilityGraph, StateClass};
pub use solve::{place_flow_imbalance, steady_state, throughputs, SteadyState, DIRECT_SOLVE_LIMIT};

/// Index of a place within its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlaceId(pub usize);

/// Index of a transition within its net.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TransitionId(pub usize);

/// Firing semantics of a timed transition when its enabling degree
/// exceeds one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ServerSemantics {
    /// Rate is independent of the enabling degree.
    Single,
    /// Rate scales with the enabling degree (independent concurrent
    /// activities sharing one transition).
    Infinite,
}

#[derive(Debug, Clone, PartialEq)]
pub enum TransitionKind {
    Timed { rate: f64, server: ServerSemantics },
    Immediate { weight: f64, priority: u32 },
}

#[derive(Debug, Clone)]
pub struct Place {
    pub name: String,
    pub initial: u32,
}

#[derive(Debug, Clone)]
pub struct Transition {
    pub name: String,
    pub kind: TransitionKind,
    inputs: Vec<(PlaceId, u32)>,
    outputs: Vec<(PlaceId, u32)>,
    inhibitors: Vec<(PlaceId, u32)>,
}

impl Transition {
    pub fn is_immediate(&self) -> bool {
        matches!(self.kind, TransitionKind::Immediate { .. })
    }

    pub fn inputs(&self) -> &[(PlaceId, u32)] {
        &self.inputs
    }

    pub fn outputs(&self) -> &[(PlaceId, u32)] {
        &self.outputs
    }

    pub fn inhibitors(&self) -> &[(PlaceId, u32)] {
        &self.inhibitors
    }
}

/// Token counts indexed by place.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Marking(pub Vec<u32>);

impl Marking {
    pub fn tokens(&self, place: PlaceId) -> u32 {
        self.0[place.0]
    }
}

#[derive(Debug, Clone)]
pub struct PetriNet {
    places: Vec<Place>,
    transitions: Vec<Transition>,
}

impl PetriNet {
    pub fn builder() -> NetBuilder {
        NetBuilder::default()
    }

    pub fn places(&self) -> &[Place] {
        &self.places
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn place(&self, id: PlaceId) -> &Place {
        &self.places[id.0]
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id.0]
    }

    pub fn place_by_name(&self, name: &str) -> Option<PlaceId> {
        self.places.iter().position(|p| p.name == name).map(PlaceId)
    }

    pub fn transition_by_name(&self, name: &str) -> Option<TransitionId> {
        self.transitions
            .iter()
            .position(|t| t.name == name)
            .map(TransitionId)
    }

    pub fn initial_marking(&self) -> Marking {
        Marking(self.places.iter().map(|p| p.initial).collect())
    }

    /// A transition is enabled when every input place holds at least the
    /// arc multiplicity and every inhibitor place holds strictly less.
    pub fn transition_enabled(&self, t: TransitionId, m: &Marking) -> bool {
        let tr = &self.transitions[t.0];
        tr.inputs.iter().all(|&(p, mult)| m.tokens(p) >= mult)
            && tr.inhibitors.iter().all(|&(p, mult)| m.tokens(p) < mult)
    }

    /// Enabled transitions under immediate preemption: if any immediate
    /// transition is enabled, only the enabled immediates of maximal
    /// priority are returned; otherwise the enabled timed transitions.
    pub fn enabled(&self, m: &Marking) -> Vec<TransitionId> {
        let mut timed = Vec::new();
        let mut immediate: Vec<(u32, TransitionId)> = Vec::new();
        for (i, tr) in self.transitions.iter().enumerate() {
            let id = TransitionId(i);
            if !self.transition_enabled(id, m) {
                continue;
            }
            match tr.kind {
                TransitionKind::Timed { .. } => timed.push(id),
                TransitionKind::Immediate { priority, .. } => immediate.push((priority, id)),
            }
        }
        if immediate.is_empty() {
            return timed;
        }
        let top = immediate.iter().map(|&(p, _)| p).max().unwrap();
        immediate
            .into_iter()
            .filter(|&(p, _)| p == top)
            .map(|(_, id)| id)
            .collect()
    }

    /// Number of independent enablings of `t` in `m` (bounded by input
    /// arcs only; inhibitors gate enabledness, not degree).
    pub fn enabling_degree(&self, t: TransitionId, m: &Marking) -> u32 {
        if !self.transition_enabled(t, m) {
            return 0;
        }
        self.transitions[t.0]
            .inputs
            .iter()
            .map(|&(p, mult)| m.tokens(p) / mult)
            .min()
            .unwrap_or(1)
    }

    /// Firing rate of a timed transition in marking `m`, scaled by the
    /// enabling degree for infinite-server transitions. Zero if disabled
    /// or immediate.
    pub fn effective_rate(&self, t: TransitionId, m: &Marking) -> f64 {
        match self.transitions[t.0].kind {
            TransitionKind::Timed { rate, server } => match server {
                ServerSemantics::Single => {
                    if self.transition_enabled(t, m) {
                        rate
                    } else {
                        0.0
                    }
                }
                ServerSemantics::Infinite => rate * f64::from(self.enabling_degree(t, m)),
            },
            TransitionKind::Immediate { .. } => 0.0,
        }
    }

    /// Successor marking after firing `t`. Caller must ensure `t` is
    /// enabled.
    pub fn fire(&self, t: TransitionId, m: &Marking) -> Marking {
        let tr = &self.transitions[t.0];
        let mut next = m.clone();
        for &(p, mult) in &tr.inputs {
            next.0[p.0] -= mult;
        }
        for &(p, mult) in &tr.outputs {
            next.0[p.0] += mult;
        }
        next
    }

    /// Renders a marking as `place:tokens` pairs for nonzero places.
    pub fn describe_marking(&self, m: &Marking) -> String {
        let parts: Vec<String> = self
            .places
            .iter()
            .zip(&m.0)
            .filter(|(_, &tokens)| tokens > 0)
            .map(|(p, tokens)| format!("{}:{}", p.name, tokens))
            .collect();
        if parts.is_empty() {
            "empty".to_string()
        } else {
            parts.join(" ")
        }
    }
}

/// Incremental net construction with name and parameter validation at
/// `build`.
#[derive(Default)]
pub struct NetBuilder {
    places: Vec<Place>,
    transitions: Vec<Transition>,
}

impl NetBuilder {
    pub fn place(&mut self, name: impl Into<String>, initial: u32) -> PlaceId {
        self.places.push(Place {
            name: name.into(),
            initial,
        });
        PlaceId(self.places.len() - 1)
    }

    pub fn timed(&mut self, name: impl Into<String>, rate: f64, server: ServerSemantics) -> TransitionId {
        self.transitions.push(Transition {
            name: name.into(),
            kind: TransitionKind::Timed { rate, server },
            inputs: Vec::new(),
            outputs: Vec::new(),
            inhibitors: Vec::new(),
        });
        TransitionId(self.transitions.len() - 1)
    }

    pub fn immediate(&mut self, name: impl Into<String>, weight: f64, priority: u32) -> TransitionId {
        self.transitions.push(Transition {
            name: name.into(),
            kind: TransitionKind::Immediate { weight, priority },
            inputs: Vec::new(),
            outputs: Vec::new(),
            inhibitors: Vec::new(),
        });
        TransitionId(self.transitions.len() - 1)
    }

    pub fn input(&mut self, t: TransitionId, p: PlaceId, mult: u32) -> &mut Self {
        self.transitions[t.0].inputs.push((p, mult));
        self
    }

    pub fn output(&mut self, t: TransitionId, p: PlaceId, mult: u32) -> &mut Self {
        self.transitions[t.0].outputs.push((p, mult));
        self
    }

    pub fn inhibitor(&mut self, t: TransitionId, p: PlaceId, mult: u32) -> &mut Self {
        self.transitions[t.0].inhibitors.push((p, mult));
        self
    }

    pub fn build(self) -> Result<PetriNet, GspnError> {
        let mut seen = std::collections::BTreeSet::new();
        for p in &self.places {
            if !seen.insert(p.name.clone()) {
                return Err(GspnError::DuplicateName(p.name.clone()));
            }
        }
        let mut seen = std::collections::BTreeSet::new();
        for t in &self.transitions {
            if !seen.insert(t.name.clone()) {
                return Err(GspnError::DuplicateName(t.name.clone()));
            }
            match t.kind {
                TransitionKind::Timed { rate, .. } => {
                    if !(rate > 0.0) || !rate.is_finite() {
                        return Err(GspnError::BadParameter {
                            transition: t.name.clone(),
                            what: format!("rate {rate} must be finite and positive"),
                        });
                    }
                }
                TransitionKind::Immediate { weight, priority } => {
                    if !(weight > 0.0) || !weight.is_finite() {
                        return Err(GspnError::BadParameter {
                            transition: t.name.clone(),
                            what: format!("weight {weight} must be finite and positive"),
                        });
                    }
                    if priority == 0 {
                        return Err(GspnError::BadParameter {
                            transition: t.name.clone(),
                            what: "priority must be positive".to_string(),
                        });
                    }
                }
            }
            for &(_, mult) in t.inputs.iter().chain(&t.outputs).chain(&t.inhibitors) {
                if mult == 0 {
                    return Err(GspnError::BadParameter {
                        transition: t.name.clone(),
                        what: "arc multiplicity must be at least 1".to_string(),
                    });
                }
            }
        }
        Ok(PetriNet {
            places: self.places,
            transitions: self.transitions,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_place_cycle() -> PetriNet {
        let mut b = PetriNet::builder();
        let p1 = b.place("P1", 1);
        let p2 = b.place("P2", 0);
        let t1 = b.timed("t1", 2.0, ServerSemantics::Single);
        let t2 = b.timed("t2", 1.0, ServerSemantics::Single);
        b.input(t1, p1, 1).output(t1, p2, 1);
        b.input(t2, p2, 1).output(t2, p1, 1);
        b.build().unwrap()
    }

    #[test]
    fn simple_enabling() {
        let net = two_place_cycle();
        let m = net.initial_marking();
        assert_eq!(net.enabled(&m), vec![TransitionId(0)]);
        let m2 = net.fire(TransitionId(0), &m);
        assert_eq!(m2, Marking(vec![0, 1]));
        assert_eq!(net.enabled(&m2), vec![TransitionId(1)]);
    }

    #[test]
    fn multiplicity_gates_enabling() {
        let mut b = PetriNet::builder();
        let wd2 = b.place("Wd2", 2);
        let sink = b.place("S", 0);
        let delayed = b.immediate("delayed", 1.0, 1);
        b.input(delayed, wd2, 3).output(delayed, sink, 3);
        let net = b.build().unwrap();
        assert!(net.enabled(&net.initial_marking()).is_empty());
    }

    #[test]
    fn immediates_preempt_timed() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 1);
        let q = b.place("Q", 0);
        let slow = b.timed("slow", 1.0, ServerSemantics::Single);
        let now = b.immediate("now", 1.0, 1);
        b.input(slow, p, 1).output(slow, q, 1);
        b.input(now, p, 1).output(now, q, 1);
        let net = b.build().unwrap();
        assert_eq!(net.enabled(&net.initial_marking()), vec![TransitionId(1)]);
    }

    #[test]
    fn priority_filters_immediates() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 1);
        let lo = b.immediate("lo", 1.0, 1);
        let hi = b.immediate("hi", 1.0, 2);
        b.input(lo, p, 1);
        b.input(hi, p, 1);
        let net = b.build().unwrap();
        assert_eq!(net.enabled(&net.initial_marking()), vec![TransitionId(1)]);
    }

    #[test]
    fn inhibitor_blocks() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 1);
        let guard = b.place("G", 1);
        let t = b.timed("t", 1.0, ServerSemantics::Single);
        b.input(t, p, 1).inhibitor(t, guard, 1);
        let net = b.build().unwrap();
        assert!(net.enabled(&net.initial_marking()).is_empty());
    }

    #[test]
    fn infinite_server_scales_rate() {
        let mut b = PetriNet::builder();
        let p = b.place("P", 3);
        let inf = b.timed("inf", 0.5, ServerSemantics::Infinite);
        let single = b.timed("single", 0.5, ServerSemantics::Single);
        b.input(inf, p, 1);
        b.input(single, p, 1);
        let net = b.build().unwrap();
        let m = net.initial_marking();
        assert_eq!(net.effective_rate(TransitionId(0), &m), 1.5);
        assert_eq!(net.effective_rate(TransitionId(1), &m), 0.5);
    }

    #[test]
    fn builder_rejects_bad_parameters() {
        let mut b = PetriNet::builder();
        b.place("P", 0);
        b.timed("t", 0.0, ServerSemantics::Single);
        assert!(matches!(
            b.build(),
            Err(GspnError::BadParameter { .. })
        ));

        let mut b = PetriNet::builder();
        b.place("P", 0);
        b.place("P", 1);
        assert!(matches!(b.build(), Err(GspnError::DuplicateName(_))));
    }
}
