//! Minimal-support P-invariants via positive Farkas combination.

use super::{GspnError, Marking, PetriNet};

/// Non-negative integer place weighting `y` with `y * C = 0`, where `C`
/// is the incidence matrix (inhibitor arcs excluded). The weighted token
/// sum `y * m` is constant over all reachable markings.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PInvariant {
    pub coefficients: Vec<u64>,
}

impl PInvariant {
    /// Places with nonzero weight.
    pub fn support(&self) -> Vec<usize> {
        self.coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, _)| i)
            .collect()
    }

    /// Weighted token sum under `m`.
    pub fn weighted_sum(&self, m: &Marking) -> u64 {
        self.coefficients
            .iter()
            .zip(&m.0)
            .map(|(&c, &tokens)| c * u64::from(tokens))
            .sum()
    }

    /// Renders as `a*P + b*Q = constant` against the given names and
    /// initial marking.
    pub fn render(&self, net: &PetriNet) -> String {
        let terms: Vec<String> = self
            .coefficients
            .iter()
            .enumerate()
            .filter(|(_, &c)| c > 0)
            .map(|(i, &c)| {
                let name = &net.places()[i].name;
                if c == 1 {
                    name.clone()
                } else {
                    format!("{c}*{name}")
                }
            })
            .collect();
        format!(
            "{} = {}",
            terms.join(" + "),
            self.weighted_sum(&net.initial_marking())
        )
    }
}

/// Computes the minimal-support P-invariants of `net`.
///
/// Classic Farkas construction: start from `[C | I]`, cancel one
/// transition column at a time by positive combinations of rows with
/// opposite signs, gcd-reduce as rows are produced, and finally keep the
/// support-minimal identity parts.
pub fn p_invariants(net: &PetriNet) -> Result<Vec<PInvariant>, GspnError> {
    let n_places = net.places().len();
    let n_transitions = net.transitions().len();

    // Rows: [incidence columns | identity part].
    let mut rows: Vec<Vec<i64>> = Vec::with_capacity(n_places);
    for p in 0..n_places {
        let mut row = vec![0i64; n_transitions + n_places];
        for (t, tr) in net.transitions().iter().enumerate() {
            let mut delta: i64 = 0;
            for &(place, mult) in tr.outputs() {
                if place.0 == p {
                    delta += i64::from(mult);
                }
            }
            for &(place, mult) in tr.inputs() {
                if place.0 == p {
                    delta -= i64::from(mult);
                }
            }
            row[t] = delta;
        }
        row[n_transitions + p] = 1;
        rows.push(row);
    }

    for col in 0..n_transitions {
        let (mut zero, mut plus, mut minus) = (Vec::new(), Vec::new(), Vec::new());
        for row in rows {
            match row[col].cmp(&0) {
                std::cmp::Ordering::Equal => zero.push(row),
                std::cmp::Ordering::Greater => plus.push(row),
                std::cmp::Ordering::Less => minus.push(row),
            }
        }
        for pos in &plus {
            for neg in &minus {
                let a = -neg[col];
                let b = pos[col];
                let g = gcd(a as u64, b as u64) as i64;
                let (a, b) = (a / g, b / g);
                let mut combined = Vec::with_capacity(pos.len());
                for (x, y) in pos.iter().zip(neg) {
                    let val = a
                        .checked_mul(*x)
                        .and_then(|ax| b.checked_mul(*y).and_then(|by| ax.checked_add(by)))
                        .ok_or(GspnError::InvariantOverflow)?;
                    combined.push(val);
                }
                reduce_row(&mut combined);
                if combined.iter().any(|&v| v != 0) && !zero.contains(&combined) {
                    zero.push(combined);
                }
            }
        }
        rows = zero;
    }

    let mut invariants: Vec<PInvariant> = rows
        .into_iter()
        .map(|row| {
            let coefficients = row[n_transitions..]
                .iter()
                .map(|&v| {
                    debug_assert!(v >= 0);
                    v as u64
                })
                .collect();
            PInvariant { coefficients }
        })
        .filter(|inv| inv.coefficients.iter().any(|&c| c > 0))
        .collect();

    // Keep only support-minimal invariants, deduplicated.
    invariants.sort_by_key(|inv| (inv.support().len(), inv.coefficients.clone()));
    invariants.dedup();
    let mut minimal: Vec<PInvariant> = Vec::new();
    'outer: for inv in invariants {
        let support = inv.support();
        for kept in &minimal {
            let ks = kept.support();
            if ks.iter().all(|p| support.contains(p)) && ks.len() < support.len() {
                continue 'outer;
            }
        }
        minimal.push(inv);
    }
    Ok(minimal)
}

fn reduce_row(row: &mut [i64]) {
    let g = row
        .iter()
        .fold(0u64, |acc, &v| gcd(acc, v.unsigned_abs()));
    if g > 1 {
        for v in row {
            *v /= g as i64;
        }
    }
}

fn gcd(a: u64, b: u64) -> u64 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}
