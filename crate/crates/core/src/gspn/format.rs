//! Text format for nets.
//!
//! Three sections in order, whitespace-insensitive, `#` comments to end
//! of line:
//!
//! ```text
//! places
//!   Ap1 1
//!   Wd1 3
//! transitions
//!   activity timed 2 infinite      # name timed RATE [single|infinite]
//!   ok immediate 1 1               # name immediate WEIGHT [PRIORITY]
//! arcs
//!   Ap1 activity 1 normal          # from to MULTIPLICITY [normal|inhibitor]
//!   activity ApK 1 normal
//! ```
//!
//! Arc direction is inferred from the endpoint kinds: place-to-transition
//! arcs are inputs (or inhibitors), transition-to-place arcs are outputs.
//! Names must start with a letter or underscore and must not be one of
//! the section or option keywords.

use std::fmt::Write as _;

use super::{GspnError, NetBuilder, PetriNet, PlaceId, ServerSemantics, TransitionId, TransitionKind};

const KEYWORDS: &[&str] = &[
    "places",
    "transitions",
    "arcs",
    "timed",
    "immediate",
    "single",
    "infinite",
    "normal",
    "inhibitor",
];

struct Tok<'a> {
    text: &'a str,
    line: usize,
}

fn lex(text: &str) -> Vec<Tok<'_>> {
    let mut out = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("");
        for word in line.split_whitespace() {
            out.push(Tok {
                text: word,
                line: i + 1,
            });
        }
    }
    out
}

fn is_name(s: &str) -> bool {
    !KEYWORDS.contains(&s)
        && s.chars().next().is_some_and(|c| c.is_alphabetic() || c == '_')
        && s.chars().all(|c| c.is_alphanumeric() || c == '_')
}

pub fn parse_net(text: &str) -> Result<PetriNet, GspnError> {
    let toks = lex(text);
    let mut pos = 0;
    let err = |line: usize, message: String| GspnError::Parse { line, message };
    let expect_section = |toks: &[Tok], pos: &mut usize, name: &str| -> Result<(), GspnError> {
        match toks.get(*pos) {
            Some(t) if t.text == name => {
                *pos += 1;
                Ok(())
            }
            Some(t) => Err(err(t.line, format!("expected `{name}` section, found `{}`", t.text))),
            None => Err(err(0, format!("missing `{name}` section"))),
        }
    };

    let mut builder = NetBuilder::default();
    let mut place_ids: Vec<(String, PlaceId)> = Vec::new();
    let mut transition_ids: Vec<(String, TransitionId)> = Vec::new();

    expect_section(&toks, &mut pos, "places")?;
    while let Some(t) = toks.get(pos) {
        if t.text == "transitions" {
            break;
        }
        if !is_name(t.text) {
            return Err(err(t.line, format!("bad place name `{}`", t.text)));
        }
        let init_tok = toks
            .get(pos + 1)
            .ok_or_else(|| err(t.line, "missing initial marking".to_string()))?;
        let initial: u32 = init_tok.text.parse().map_err(|_| {
            err(
                init_tok.line,
                format!("initial marking `{}` is not a non-negative integer", init_tok.text),
            )
        })?;
        let id = builder.place(t.text, initial);
        place_ids.push((t.text.to_string(), id));
        pos += 2;
    }

    expect_section(&toks, &mut pos, "transitions")?;
    while let Some(t) = toks.get(pos) {
        if t.text == "arcs" {
            break;
        }
        if !is_name(t.text) {
            return Err(err(t.line, format!("bad transition name `{}`", t.text)));
        }
        let name = t.text;
        let line = t.line;
        let kind_tok = toks
            .get(pos + 1)
            .ok_or_else(|| err(line, "missing transition kind".to_string()))?;
        pos += 2;
        match kind_tok.text {
            "timed" => {
                let rate_tok = toks
                    .get(pos)
                    .ok_or_else(|| err(line, "missing rate".to_string()))?;
                let rate: f64 = rate_tok
                    .text
                    .parse()
                    .map_err(|_| err(rate_tok.line, format!("bad rate `{}`", rate_tok.text)))?;
                pos += 1;
                let server = match toks.get(pos).map(|t| t.text) {
                    Some("single") => {
                        pos += 1;
                        ServerSemantics::Single
                    }
                    Some("infinite") => {
                        pos += 1;
                        ServerSemantics::Infinite
                    }
                    _ => ServerSemantics::Infinite,
                };
                let id = builder.timed(name, rate, server);
                transition_ids.push((name.to_string(), id));
            }
            "immediate" => {
                let weight_tok = toks
                    .get(pos)
                    .ok_or_else(|| err(line, "missing weight".to_string()))?;
                let weight: f64 = weight_tok.text.parse().map_err(|_| {
                    err(weight_tok.line, format!("bad weight `{}`", weight_tok.text))
                })?;
                pos += 1;
                let priority = match toks.get(pos) {
                    Some(t) if t.text.parse::<u32>().is_ok() => {
                        pos += 1;
                        t.text.parse().unwrap()
                    }
                    _ => 1,
                };
                let id = builder.immediate(name, weight, priority);
                transition_ids.push((name.to_string(), id));
            }
            other => {
                return Err(err(
                    kind_tok.line,
                    format!("transition kind must be `timed` or `immediate`, found `{other}`"),
                ))
            }
        }
    }

    expect_section(&toks, &mut pos, "arcs")?;
    while pos < toks.len() {
        let from = &toks[pos];
        let to = toks
            .get(pos + 1)
            .ok_or_else(|| err(from.line, "arc is missing its target".to_string()))?;
        let mult_tok = toks
            .get(pos + 2)
            .ok_or_else(|| err(from.line, "arc is missing its multiplicity".to_string()))?;
        let mult: u32 = mult_tok.text.parse().map_err(|_| {
            err(
                mult_tok.line,
                format!("bad arc multiplicity `{}`", mult_tok.text),
            )
        })?;
        pos += 3;
        let inhibitor = match toks.get(pos).map(|t| t.text) {
            Some("inhibitor") => {
                pos += 1;
                true
            }
            Some("normal") => {
                pos += 1;
                false
            }
            _ => false,
        };

        let from_place = place_ids.iter().find(|(n, _)| n == from.text);
        let to_place = place_ids.iter().find(|(n, _)| n == to.text);
        let from_tr = transition_ids.iter().find(|(n, _)| n == from.text);
        let to_tr = transition_ids.iter().find(|(n, _)| n == to.text);
        match (from_place, to_tr, from_tr, to_place) {
            (Some(&(_, p)), Some(&(_, t)), _, _) => {
                if inhibitor {
                    builder.inhibitor(t, p, mult);
                } else {
                    builder.input(t, p, mult);
                }
            }
            (_, _, Some(&(_, t)), Some(&(_, p))) => {
                if inhibitor {
                    return Err(err(
                        from.line,
                        "inhibitor arcs must run from a place to a transition".to_string(),
                    ));
                }
                builder.output(t, p, mult);
            }
            _ => {
                return Err(err(
                    from.line,
                    format!(
                        "arc `{} -> {}` must connect a place and a transition",
                        from.text, to.text
                    ),
                ))
            }
        }
    }

    builder.build()
}

/// Canonical serialization; `parse_net(write_net(net))` reproduces the
/// net exactly (floats print in shortest round-trip form).
pub fn write_net(net: &PetriNet) -> String {
    let mut out = String::new();
    out.push_str("places\n");
    for p in net.places() {
        let _ = writeln!(out, "  {} {}", p.name, p.initial);
    }
    out.push_str("transitions\n");
    for t in net.transitions() {
        match t.kind {
            TransitionKind::Timed { rate, server } => {
                let server = match server {
                    ServerSemantics::Single => "single",
                    ServerSemantics::Infinite => "infinite",
                };
                let _ = writeln!(out, "  {} timed {} {}", t.name, rate, server);
            }
            TransitionKind::Immediate { weight, priority } => {
                let _ = writeln!(out, "  {} immediate {} {}", t.name, weight, priority);
            }
        }
    }
    out.push_str("arcs\n");
    for t in net.transitions() {
        for &(p, mult) in t.inputs() {
            let _ = writeln!(out, "  {} {} {} normal", net.place(p).name, t.name, mult);
        }
        for &(p, mult) in t.outputs() {
            let _ = writeln!(out, "  {} {} {} normal", t.name, net.place(p).name, mult);
        }
        for &(p, mult) in t.inhibitors() {
            let _ = writeln!(out, "  {} {} {} inhibitor", net.place(p).name, t.name, mult);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = "\
# tiny producer/consumer
places
  P1 1
  P2 0
transitions
  go timed 2.5 single
  ok immediate 1 1
arcs
  P1 go 1 normal
  go P2 1 normal
  P2 ok 1 normal
  ok P1 1 normal
  P2 go 2 inhibitor
";

    #[test]
    fn parses_and_round_trips() {
        let net = parse_net(SAMPLE).unwrap();
        assert_eq!(net.places().len(), 2);
        assert_eq!(net.transitions().len(), 2);
        let text = write_net(&net);
        let reparsed = parse_net(&text).unwrap();
        assert_eq!(write_net(&reparsed), text);
    }

    #[test]
    fn defaults_apply() {
        let net = parse_net(
            "places\n A 1\ntransitions\n t timed 1.0\n i immediate 2.0\narcs\n A t 1\n",
        )
        .unwrap();
        assert!(matches!(
            net.transitions()[0].kind,
            TransitionKind::Timed {
                server: ServerSemantics::Infinite,
                ..
            }
        ));
        assert!(matches!(
            net.transitions()[1].kind,
            TransitionKind::Immediate { priority: 1, .. }
        ));
    }

    #[test]
    fn rejects_arc_between_places() {
        let text = "places\n A 1\n B 0\ntransitions\n t timed 1.0\narcs\n A B 1 normal\n";
        assert!(matches!(
            parse_net(text),
            Err(GspnError::Parse { .. })
        ));
    }

    #[test]
    fn rejects_unknown_kind() {
        let text = "places\n A 1\ntransitions\n t sometimes 1.0\narcs\n";
        assert!(parse_net(text).is_err());
    }
}
