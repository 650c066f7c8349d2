//! Text formats for matrices and circuits.
//!
//! A matrix file holds four rows of eight reals (`re im` per entry). A
//! circuit file holds one gate per line (`ry <line> <angle>`,
//! `rz <line> <angle>`, `cnot <control> <target>`) after a
//! `# phase <re> <im>` header. In both formats other `#` lines and blank
//! lines are ignored.

use std::fmt::Write as _;

use crate::gate::{Circuit, Gate, Line};
use crate::mat::{Mat4, C64, ONE};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_real(token: &str, lineno: usize) -> Result<f64, String> {
    let x: f64 = token.parse().map_err(|_| format!("line {lineno}: '{token}' is not a number"))?;
    if x.is_finite() {
        Ok(x)
    } else {
        Err(format!("line {lineno}: '{token}' is not finite"))
    }
}

pub fn parse_matrix(text: &str) -> Result<Mat4, String> {
    let mut rows = Vec::with_capacity(4);
    for (lineno, line) in content_lines(text) {
        let values = line
            .split_whitespace()
            .map(|t| parse_real(t, lineno))
            .collect::<Result<Vec<f64>, String>>()?;
        if values.len() != 8 {
            return Err(format!("line {lineno}: expected 8 numbers, found {}", values.len()));
        }
        rows.push(values);
    }
    if rows.len() != 4 {
        return Err(format!("expected 4 matrix rows, found {}", rows.len()));
    }
    Ok(Mat4::new(std::array::from_fn(|i| {
        std::array::from_fn(|j| C64::new(rows[i][2 * j], rows[i][2 * j + 1]))
    })))
}

pub fn format_matrix(m: &Mat4) -> String {
    let mut s = String::new();
    for row in &m.0 {
        let cells: Vec<String> = row.iter().map(|z| format!("{:.16e} {:.16e}", z.re, z.im)).collect();
        let _ = writeln!(s, "{}", cells.join(" "));
    }
    s
}

fn parse_line_index(token: &str, lineno: usize) -> Result<Line, String> {
    match token {
        "0" => Ok(Line::Top),
        "1" => Ok(Line::Bottom),
        _ => Err(format!("line {lineno}: line index must be 0 or 1, got '{token}'")),
    }
}

fn parse_phase_header(line: &str, lineno: usize) -> Result<Option<C64>, String> {
    let mut tokens = line.trim_start_matches('#').split_whitespace();
    if tokens.next() != Some("phase") {
        return Ok(None);
    }
    let rest: Vec<&str> = tokens.collect();
    if rest.len() != 2 {
        return Err(format!("line {lineno}: phase header needs real and imaginary parts"));
    }
    let z = C64::new(parse_real(rest[0], lineno)?, parse_real(rest[1], lineno)?);
    if (z.norm() - 1.0).abs() > 1e-9 {
        return Err(format!("line {lineno}: global phase must have unit modulus"));
    }
    Ok(Some(z))
}

pub fn parse_circuit(text: &str) -> Result<Circuit, String> {
    let mut phase: Option<C64> = None;
    let mut gates = Vec::new();
    for (k, raw) in text.lines().enumerate() {
        let lineno = k + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if line.starts_with('#') {
            if let Some(z) = parse_phase_header(line, lineno)? {
                if phase.replace(z).is_some() {
                    return Err(format!("line {lineno}: duplicate phase header"));
                }
            }
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let gate = match tokens.as_slice() {
            ["ry", l, a] => Gate::ry(parse_line_index(l, lineno)?, parse_real(a, lineno)?),
            ["rz", l, a] => Gate::rz(parse_line_index(l, lineno)?, parse_real(a, lineno)?),
            ["cnot", c, t] => {
                let (c, t) = (parse_line_index(c, lineno)?, parse_line_index(t, lineno)?);
                if c == t {
                    return Err(format!("line {lineno}: control and target must differ"));
                }
                Gate::cnot(c)
            }
            _ => return Err(format!("line {lineno}: cannot parse gate '{line}'")),
        };
        gates.push(gate);
    }
    Ok(Circuit { gates, global_phase: phase.unwrap_or(ONE) })
}

pub fn format_circuit(c: &Circuit) -> String {
    let mut s = format!("# phase {:.16e} {:.16e}\n", c.global_phase.re, c.global_phase.im);
    for g in &c.gates {
        let _ = writeln!(s, "{g}");
    }
    s
}
