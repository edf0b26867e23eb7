//! Line-oriented text formats: pulse-sequence scripts, gate specs, matrix
//! files and product-operator term lists. `#` starts a comment anywhere.
//!
//! Sequence script, one event per line:
//!
//! ```text
//! ideal <gate>                                  # instantaneous ideal unitary
//! soft <carrier_hz> <amp_hz|pi> <phase_deg> <duration_s> [key=value ...]
//! delay <duration_s>
//! ```
//!
//! `pi` as the amplitude means a calibrated π pulse, `1/(2·duration)`.
//!
//! Gate specs (angles in degrees, spins 1-based):
//!
//! ```text
//! tcnot <control> <target> <+|-> [on0]    transition CNOT pulse, exp[±i(π/2)σ_y·P]
//! ttof <c1> <c2> <target>                 transition Toffoli pulse
//! trot <k=s,...|-> <target> <angle> <phase>
//! rot <spin> <x|y|z> <angle>
//! cnot <control> <target>
//! toffoli <c1> <c2> <target>
//! fredkin <control> <t1> <t2>
//! ```
//!
//! Matrix file: one row per line, entries `re` or `re,im`.
//! Term list: `identity <value>` and `<label> <coefficient>` lines; a colon
//! after the first word is allowed.

use crate::error::{Error, Result};
use crate::gates::{GateSpec, Sense};
use crate::operator::Operator;
use crate::product::Decomposition;
use crate::scalar::{c, Real, C};
use crate::sequence::{PulseEvent, Sequence, SoftPulse};
use crate::spin::Axis;

#[derive(Clone, Copy, Debug)]
struct Token<'a> {
    text: &'a str,
    /// 1-based character column.
    column: usize,
}

/// Whitespace tokens of one line with the comment stripped.
fn tokenize(line: &str) -> Vec<Token<'_>> {
    let body = line.split('#').next().unwrap_or("");
    let mut out = Vec::new();
    let mut start: Option<(usize, usize)> = None;
    for (col, (byte, ch)) in body.char_indices().enumerate() {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some((byte, col + 1)),
            (true, Some((b, c))) => {
                out.push(Token {
                    text: &body[b..byte],
                    column: c,
                });
                start = None;
            }
            _ => {}
        }
    }
    if let Some((b, c)) = start {
        out.push(Token {
            text: &body[b..],
            column: c,
        });
    }
    out
}

/// Parse-error builder bound to one source line.
struct At<'s> {
    source: &'s str,
    line: usize,
    eol: usize,
}

impl At<'_> {
    fn err(&self, column: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            source_name: self.source.to_string(),
            line: self.line,
            column,
            message: message.into(),
        }
    }

    fn need<'a>(&self, toks: &[Token<'a>], i: usize, what: &str) -> Result<Token<'a>> {
        toks.get(i)
            .copied()
            .ok_or_else(|| self.err(self.eol, format!("missing {what}")))
    }

    fn real<T: Real>(&self, tok: Token<'_>, what: &str) -> Result<T> {
        tok.text
            .parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .map(T::lit)
            .ok_or_else(|| self.err(tok.column, format!("expected {what}, found '{}'", tok.text)))
    }

    fn spin(&self, tok: Token<'_>) -> Result<usize> {
        tok.text
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| self.err(tok.column, format!("expected a spin index, found '{}'", tok.text)))
    }

    fn bit(&self, tok: Token<'_>, text: &str) -> Result<u8> {
        match text {
            "0" => Ok(0),
            "1" => Ok(1),
            _ => Err(self.err(tok.column, format!("expected control state 0 or 1, found '{text}'"))),
        }
    }

    fn no_more(&self, toks: &[Token<'_>], used: usize) -> Result<()> {
        match toks.get(used) {
            Some(t) => Err(self.err(t.column, format!("unexpected '{}'", t.text))),
            None => Ok(()),
        }
    }
}

fn parse_gate_tokens<T: Real>(at: &At<'_>, toks: &[Token<'_>]) -> Result<GateSpec<T>> {
    let kind = at.need(toks, 0, "gate name")?;
    let arg = |i: usize, what: &str| at.need(toks, i, what);
    let spec = match kind.text {
        "tcnot" => {
            let control = at.spin(arg(1, "control spin")?)?;
            let target = at.spin(arg(2, "target spin")?)?;
            let s = arg(3, "sense (+ or -)")?;
            let sense = match s.text {
                "+" => Sense::Plus,
                "-" => Sense::Minus,
                _ => return Err(at.err(s.column, format!("expected + or -, found '{}'", s.text))),
            };
            let mut control_state = 1;
            let mut used = 4;
            if let Some(t) = toks.get(4) {
                if t.text == "on0" {
                    control_state = 0;
                    used = 5;
                } else if t.text == "on1" {
                    used = 5;
                }
            }
            at.no_more(toks, used)?;
            GateSpec::TransitionCnot {
                control,
                target,
                sense,
                control_state,
            }
        }
        "ttof" | "toffoli" => {
            let c1 = at.spin(arg(1, "first control spin")?)?;
            let c2 = at.spin(arg(2, "second control spin")?)?;
            let target = at.spin(arg(3, "target spin")?)?;
            at.no_more(toks, 4)?;
            if kind.text == "ttof" {
                GateSpec::TransitionToffoli {
                    controls: [c1, c2],
                    target,
                }
            } else {
                GateSpec::Toffoli {
                    controls: [c1, c2],
                    target,
                }
            }
        }
        "trot" => {
            let ct = arg(1, "controls (k=s,... or -)")?;
            let mut controls = Vec::new();
            if ct.text != "-" {
                for part in ct.text.split(',') {
                    let (k, s) = part
                        .split_once('=')
                        .ok_or_else(|| at.err(ct.column, format!("expected k=s, found '{part}'")))?;
                    let k = k
                        .parse::<usize>()
                        .ok()
                        .filter(|&k| k >= 1)
                        .ok_or_else(|| at.err(ct.column, format!("bad control spin '{k}'")))?;
                    controls.push((k, at.bit(ct, s)?));
                }
            }
            let target = at.spin(arg(2, "target spin")?)?;
            let angle: T = at.real(arg(3, "angle in degrees")?, "angle in degrees")?;
            let phase: T = at.real(arg(4, "phase in degrees")?, "phase in degrees")?;
            at.no_more(toks, 5)?;
            GateSpec::TransitionRotation {
                controls,
                target,
                angle: angle.to_radians(),
                phase: phase.to_radians(),
            }
        }
        "rot" => {
            let spin = at.spin(arg(1, "spin")?)?;
            let a = arg(2, "axis (x, y or z)")?;
            let axis: Axis = a
                .text
                .parse()
                .map_err(|_| at.err(a.column, format!("expected axis x, y or z, found '{}'", a.text)))?;
            let angle: T = at.real(arg(3, "angle in degrees")?, "angle in degrees")?;
            at.no_more(toks, 4)?;
            GateSpec::Rotation {
                spin,
                axis,
                angle: angle.to_radians(),
            }
        }
        "cnot" => {
            let control = at.spin(arg(1, "control spin")?)?;
            let target = at.spin(arg(2, "target spin")?)?;
            at.no_more(toks, 3)?;
            GateSpec::Cnot { control, target }
        }
        "fredkin" => {
            let control = at.spin(arg(1, "control spin")?)?;
            let t1 = at.spin(arg(2, "first target spin")?)?;
            let t2 = at.spin(arg(3, "second target spin")?)?;
            at.no_more(toks, 4)?;
            GateSpec::Fredkin {
                control,
                targets: [t1, t2],
            }
        }
        other => return Err(at.err(kind.column, format!("unknown gate '{other}'"))),
    };
    Ok(spec)
}

/// Parses a single gate spec such as `tcnot 3 2 +`.
pub fn parse_gate<T: Real>(text: &str) -> Result<GateSpec<T>> {
    let at = At {
        source: "<gate>",
        line: 1,
        eol: text.chars().count() + 1,
    };
    parse_gate_tokens(&at, &tokenize(text))
}

fn parse_event<T: Real>(at: &At<'_>, toks: &[Token<'_>]) -> Result<PulseEvent<T>> {
    let head = toks[0];
    match head.text {
        "ideal" => Ok(PulseEvent::Ideal(parse_gate_tokens(at, &toks[1..])?)),
        "delay" => {
            let t = at.need(toks, 1, "delay in seconds")?;
            let d: T = at.real(t, "delay in seconds")?;
            if d < T::zero() {
                return Err(at.err(t.column, "delay must be non-negative"));
            }
            at.no_more(toks, 2)?;
            Ok(PulseEvent::Delay(d))
        }
        "soft" => {
            let carrier: T = at.real(at.need(toks, 1, "carrier in Hz")?, "carrier in Hz")?;
            let amp_tok = at.need(toks, 2, "amplitude in Hz or 'pi'")?;
            let phase: T = at.real(at.need(toks, 3, "phase in degrees")?, "phase in degrees")?;
            let dur_tok = at.need(toks, 4, "duration in seconds")?;
            let duration: T = at.real(dur_tok, "duration in seconds")?;
            if duration < T::zero() {
                return Err(at.err(dur_tok.column, "duration must be non-negative"));
            }
            let amplitude: T = if amp_tok.text == "pi" {
                if !(duration > T::zero()) {
                    return Err(at.err(amp_tok.column, "'pi' amplitude needs a positive duration"));
                }
                T::one() / (T::two() * duration)
            } else {
                at.real(amp_tok, "amplitude in Hz or 'pi'")?
            };
            if amplitude < T::zero() {
                return Err(at.err(amp_tok.column, "amplitude must be non-negative"));
            }
            let mut pulse = SoftPulse::new(carrier, amplitude, phase, duration)
                .map_err(|e| at.err(head.column, e.to_string()))?;
            for t in &toks[5..] {
                let (k, v) = t
                    .text
                    .split_once('=')
                    .filter(|(k, _)| !k.is_empty())
                    .ok_or_else(|| at.err(t.column, format!("expected key=value, found '{}'", t.text)))?;
                pulse = pulse.with_metadata(k, v);
            }
            Ok(PulseEvent::Soft(pulse))
        }
        other => Err(at.err(
            head.column,
            format!("unknown event '{other}' (expected ideal, soft or delay)"),
        )),
    }
}

/// Parses a sequence script. `source_name` labels diagnostics.
pub fn parse_sequence<T: Real>(text: &str, source_name: &str) -> Result<Sequence<T>> {
    let mut events = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let at = At {
            source: source_name,
            line: i + 1,
            eol: line.split('#').next().unwrap_or("").trim_end().chars().count() + 1,
        };
        events.push(parse_event(&at, &toks)?);
    }
    Sequence::new(events)
}

/// Parses a square complex matrix whose side is a power of two.
pub fn parse_matrix<T: Real>(text: &str, source_name: &str) -> Result<Operator<T>> {
    let mut rows: Vec<Vec<C<T>>> = Vec::new();
    let mut first_line = 1;
    for (i, line) in text.lines().enumerate() {
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let at = At {
            source: source_name,
            line: i + 1,
            eol: line.chars().count() + 1,
        };
        if rows.is_empty() {
            first_line = i + 1;
        }
        let mut row = Vec::with_capacity(toks.len());
        for t in &toks {
            let (re, im) = match t.text.split_once(',') {
                Some((a, b)) => (a, b),
                None => (t.text, "0"),
            };
            let parse = |s: &str| -> Result<T> {
                s.parse::<f64>()
                    .ok()
                    .filter(|v| v.is_finite())
                    .map(T::lit)
                    .ok_or_else(|| at.err(t.column, format!("expected re or re,im, found '{}'", t.text)))
            };
            row.push(c(parse(re)?, parse(im)?));
        }
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(at.err(
                    1,
                    format!("row has {} entries, expected {}", row.len(), first.len()),
                ));
            }
        }
        rows.push(row);
    }
    let at = At {
        source: source_name,
        line: first_line,
        eol: 1,
    };
    if rows.is_empty() {
        return Err(at.err(1, "matrix file is empty"));
    }
    let d = rows.len();
    if rows[0].len() != d {
        return Err(at.err(1, format!("matrix is {}x{}, not square", d, rows[0].len())));
    }
    if !d.is_power_of_two() || d < 2 {
        return Err(at.err(1, format!("matrix side {d} is not a power of two >= 2")));
    }
    Operator::from_rows(&rows)
}

/// Parses a term list into a decomposition on `n` spins. The identity part
/// defaults to 1.
pub fn parse_terms<T: Real>(text: &str, n: usize, source_name: &str) -> Result<Decomposition<T>> {
    let mut identity = T::one();
    let mut pairs: Vec<(String, T, usize, usize)> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let toks = tokenize(line);
        if toks.is_empty() {
            continue;
        }
        let at = At {
            source: source_name,
            line: i + 1,
            eol: line.chars().count() + 1,
        };
        let mut head = toks[0];
        let mut rest = 1;
        if head.text == "term" {
            head = at.need(&toks, 1, "term label")?;
            rest = 2;
        }
        let label = head.text.trim_end_matches(':');
        let v: T = at.real(at.need(&toks, rest, "coefficient")?, "coefficient")?;
        at.no_more(&toks, rest + 1)?;
        if label == "identity" {
            identity = v;
        } else {
            crate::product::ProductTerm::<T>::parse(label, n, v)
                .map_err(|e| at.err(head.column, e.to_string()))?;
            pairs.push((label.to_string(), v, i + 1, head.column));
        }
    }
    let refs: Vec<(&str, T)> = pairs.iter().map(|(l, v, _, _)| (l.as_str(), *v)).collect();
    Decomposition::from_labels(n, identity, &refs).map_err(|e| Error::Parse {
        source_name: source_name.to_string(),
        line: pairs.last().map_or(1, |p| p.2),
        column: pairs.last().map_or(1, |p| p.3),
        message: e.to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gates::ideal_gate;

    fn parse_err(text: &str) -> (usize, usize, String) {
        match parse_sequence::<f64>(text, "t.seq") {
            Err(Error::Parse {
                line,
                column,
                message,
                ..
            }) => (line, column, message),
            other => panic!("expected a parse error, got {other:?}"),
        }
    }

    #[test]
    fn tokens_carry_columns() {
        let t = tokenize("  soft 1.5\tpi # comment");
        let cols: Vec<(usize, &str)> = t.iter().map(|t| (t.column, t.text)).collect();
        assert_eq!(cols, vec![(3, "soft"), (8, "1.5"), (12, "pi")]);
    }

    #[test]
    fn three_pulse_script() {
        let text = "# time order\nideal tcnot 3 2 -\nideal ttof 1 2 3\n\nideal tcnot 3 2 +  # last\n";
        let seq = parse_sequence::<f64>(text, "f.seq").unwrap();
        assert_eq!(seq.len(), 3);
        let rendered: Vec<String> = seq.events().iter().map(|e| e.to_string()).collect();
        assert_eq!(
            rendered,
            vec!["ideal tcnot 3 2 -", "ideal ttof 1 2 3", "ideal tcnot 3 2 +"]
        );
    }

    #[test]
    fn soft_and_delay_lines() {
        let text = "soft 22153.34 pi 90 0.06656 shift=-26.91 name=TP1\ndelay 0.001\nsoft 10 7.5 0 0.02";
        let seq = parse_sequence::<f64>(text, "s.seq").unwrap();
        match &seq.events()[0] {
            PulseEvent::Soft(p) => {
                assert!((p.amplitude - 1.0 / (2.0 * 0.06656)).abs() < 1e-12);
                assert_eq!(p.metadata[0], ("shift".to_string(), "-26.91".to_string()));
            }
            e => panic!("{e}"),
        }
        assert_eq!(seq.events()[1], PulseEvent::Delay(0.001));
        assert!((seq.total_duration() - 0.08756).abs() < 1e-12);
    }

    #[test]
    fn diagnostics_point_at_the_token() {
        assert_eq!(parse_err("delay 1\nwait 3").0, 2);
        assert_eq!(parse_err("delay 1\nwait 3").1, 1);
        let (l, c, m) = parse_err("soft 1 2 abc 0.1");
        assert_eq!((l, c), (1, 10));
        assert!(m.contains("phase"), "{m}");
        let (_, c, m) = parse_err("ideal tcnot 3 2");
        assert_eq!(c, 16);
        assert!(m.contains("sense"), "{m}");
        let (_, c, _) = parse_err("ideal cnot 1 2 3");
        assert_eq!(c, 16);
        let (_, c, _) = parse_err("delay -1");
        assert_eq!(c, 7);
        let (_, c, _) = parse_err("soft 0 pi 0 0");
        assert_eq!(c, 8);
        let (_, c, _) = parse_err("soft 0 1 0 1 junk");
        assert_eq!(c, 14);
    }

    #[test]
    fn gate_specs_round_trip() {
        for text in [
            "tcnot 3 2 +",
            "tcnot 1 2 - on0",
            "ttof 1 2 3",
            "rot 1 y 90",
            "cnot 3 2",
            "toffoli 1 2 3",
            "fredkin 1 2 3",
        ] {
            let g = parse_gate::<f64>(text).unwrap();
            assert_eq!(g.to_string(), text);
            let again = parse_gate::<f64>(&g.to_string()).unwrap();
            assert_eq!(ideal_gate(&g, 3).unwrap(), ideal_gate(&again, 3).unwrap());
        }
        let g = parse_gate::<f64>("trot 3=1 2 180 90").unwrap();
        let again = parse_gate::<f64>(&g.to_string()).unwrap();
        assert!(ideal_gate(&g, 3)
            .unwrap()
            .approx_eq(&ideal_gate(&again, 3).unwrap(), 1e-12));
        assert!(parse_gate::<f64>("swap 1 2").is_err());
        assert!(parse_gate::<f64>("rot 1 w 90").is_err());
    }

    #[test]
    fn matrix_files() {
        let m = parse_matrix::<f64>("1 0\n# c\n0 0,-1\n", "m.txt").unwrap();
        assert_eq!(m[(1, 1)], c(0.0, -1.0));
        assert!(parse_matrix::<f64>("1 0 0\n0 1 0\n0 0 1", "m").is_err());
        assert!(parse_matrix::<f64>("1 0\n0", "m").is_err());
        assert!(parse_matrix::<f64>("", "m").is_err());
        match parse_matrix::<f64>("1 0\n0 x", "m") {
            Err(Error::Parse { line, column, .. }) => assert_eq!((line, column), (2, 3)),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn term_lists() {
        let d = parse_terms::<f64>("identity: 1\nI1x: 1\nterm I2z 1\n2I1zI3x -0.5\n", 3, "t").unwrap();
        assert_eq!(d.labels(), ["I1x", "I2z", "2I1zI3x"]);
        assert_eq!(d.coefficient("2I1zI3x"), Some(-0.5));
        assert!(parse_terms::<f64>("I4x 1", 3, "t").is_err());
        assert!(parse_terms::<f64>("I1xI2x 1", 3, "t").is_err());
        assert!(parse_terms::<f64>("I1x 1\nI1x 2", 3, "t").is_err());
    }
}
