//! Text formats for schedules and states.
//!
//! Schedule file:
//!
//! ```text
//! # comment
//! n 3
//! S 1 3
//! A 3 2
//! S 1 2
//! ```
//!
//! `S i j` is a symmetric step, `A i j` an asymmetric step in which node `i`
//! updates. State file: one rational literal per line.

use std::fmt::Write as _;

use crate::arith::Rational;
use crate::error::{Error, Result};
use crate::gossip::{GossipStep, NetworkState, Schedule};

fn strip_comment(line: &str) -> &str {
    line.split('#').next().unwrap_or("").trim()
}

fn parse_index(tok: Option<&str>, line: usize) -> Result<usize> {
    let tok = tok.ok_or_else(|| Error::Parse {
        line,
        message: "missing node index".into(),
    })?;
    tok.parse().map_err(|_| Error::Parse {
        line,
        message: format!("bad node index `{tok}`"),
    })
}

pub fn parse_schedule(text: &str) -> Result<Schedule> {
    let mut n: Option<usize> = None;
    let mut steps = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let mut toks = body.split_whitespace();
        let head = toks.next().expect("nonempty line");
        let parse_err = |message: String| Error::Parse { line, message };
        match head {
            "n" => {
                if n.is_some() {
                    return Err(parse_err("duplicate `n` header".into()));
                }
                n = Some(parse_index(toks.next(), line)?);
            }
            "S" | "A" => {
                let Some(count) = n else {
                    return Err(parse_err("step before `n` header".into()));
                };
                let i = parse_index(toks.next(), line)?;
                let j = parse_index(toks.next(), line)?;
                let step = if head == "S" {
                    GossipStep::sym(i, j)
                } else {
                    GossipStep::asym(i, j)
                };
                step.validate(count).map_err(|e| parse_err(e.to_string()))?;
                steps.push(step);
            }
            other => return Err(parse_err(format!("unknown directive `{other}`"))),
        }
        if let Some(extra) = toks.next() {
            return Err(parse_err(format!("trailing token `{extra}`")));
        }
    }
    let n = n.ok_or(Error::Parse {
        line: 0,
        message: "missing `n` header".into(),
    })?;
    Schedule::new(n, steps)
}

pub fn write_schedule(sched: &Schedule) -> String {
    let mut out = String::new();
    writeln!(out, "n {}", sched.n()).unwrap();
    for step in sched.steps() {
        writeln!(out, "{step}").unwrap();
    }
    out
}

pub fn parse_state(text: &str) -> Result<NetworkState> {
    let mut values = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let body = strip_comment(raw);
        if body.is_empty() {
            continue;
        }
        let v: Rational = body.parse().map_err(|_| Error::Parse {
            line: idx + 1,
            message: format!("bad rational `{body}`"),
        })?;
        values.push(v);
    }
    Ok(NetworkState::new(values))
}

pub fn write_state(x: &NetworkState) -> String {
    x.values().iter().map(|v| format!("{v}\n")).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_with_comments_and_blanks() {
        let text = "# three nodes\n\nn 3\nS 1 3   # first\nA 3 2\n\nS 1 2\n";
        let s = parse_schedule(text).unwrap();
        assert_eq!(s.n(), 3);
        assert_eq!(
            s.steps(),
            &[
                GossipStep::sym(1, 3),
                GossipStep::asym(3, 2),
                GossipStep::sym(1, 2)
            ]
        );
        assert_eq!(parse_schedule(&write_schedule(&s)).unwrap(), s);
    }

    #[test]
    fn reports_line_numbers() {
        let err = parse_schedule("n 3\nS 1 2\nX 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 3, .. }), "{err}");
        let err = parse_schedule("n 3\nS 1 4\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_schedule("S 1 2\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 1, .. }), "{err}");
        let err = parse_schedule("n 3\nS 1\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        let err = parse_schedule("n 3\nS 1 2 3\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }), "{err}");
        assert!(parse_schedule("# nothing\n").is_err());
    }

    #[test]
    fn empty_schedule_round_trips() {
        let s = Schedule::empty(4);
        assert_eq!(write_schedule(&s), "n 4\n");
        assert_eq!(parse_schedule("n 4").unwrap(), s);
    }

    #[test]
    fn state_file() {
        let x = parse_state("0\n1/3\n\n5/2^2\n-7\n").unwrap();
        assert_eq!(x.len(), 4);
        assert_eq!(x.values()[2], Rational::new(5, 4).unwrap());
        assert_eq!(write_state(&x), "0\n1/3\n5/2^2\n-7\n");
        let err = parse_state("1\nx\n").unwrap_err();
        assert!(matches!(err, Error::Parse { line: 2, .. }));
    }
}
