//! The input file format.
//!
//! ```text
//! # comments run to end of line
//! name = case1_4
//! p = 32003
//! vars = x, y
//! matrix = [
//!   [y^2, 0],
//!   [x, y]
//! ]
//! annihilator = x^2*(x - y)     # optional
//! expected_depth = 0            # optional: integer or CM
//! expected_h = 2 + z^2          # optional
//! expected_regular_form = z     # optional
//! ```
//!
//! Polynomial entries use `+ - * ^`, integer coefficients and the declared
//! variable identifiers. Matrices are row-major and must be square.

use anyhow::{anyhow, bail, Context, Result};
use gradmod_core::poly::parse_polynomial;
use gradmod_core::{Field, MultiPolynomial, Presentation, DEFAULT_PRIME};

/// Expected depth in a corpus file: a number or "CM".
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExpectedDepth {
    Cm,
    Depth(usize),
}

impl std::fmt::Display for ExpectedDepth {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ExpectedDepth::Cm => write!(f, "CM"),
            ExpectedDepth::Depth(d) => write!(f, "{d}"),
        }
    }
}

/// A parsed (not yet validated) input file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputFile {
    pub name: Option<String>,
    pub p: u64,
    pub vars: Vec<String>,
    pub matrix: Vec<Vec<String>>,
    pub annihilator: Option<String>,
    pub expected_depth: Option<ExpectedDepth>,
    pub expected_h: Option<Vec<i64>>,
    pub expected_regular_form: Option<String>,
}

impl InputFile {
    pub fn parse(text: &str) -> Result<InputFile> {
        let mut name = None;
        let mut p = None;
        let mut vars: Option<Vec<String>> = None;
        let mut matrix = None;
        let mut annihilator = None;
        let mut expected_depth = None;
        let mut expected_h = None;
        let mut expected_regular_form = None;

        let mut lines = text.lines().enumerate().peekable();
        while let Some((lineno, raw)) = lines.next() {
            let line = strip_comment(raw).trim().to_string();
            if line.is_empty() {
                continue;
            }
            let (key, mut value) = line
                .split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| anyhow!("line {}: expected 'key = value'", lineno + 1))?;
            if key == "matrix" {
                // The matrix value may span lines; accumulate until the
                // brackets balance.
                let mut depth = bracket_depth(&value);
                while depth > 0 {
                    let (no, raw) = lines
                        .next()
                        .ok_or_else(|| anyhow!("line {}: unbalanced '[' in matrix", lineno + 1))?;
                    let more = strip_comment(raw).trim().to_string();
                    depth += bracket_depth(&more);
                    value.push(' ');
                    value.push_str(&more);
                    let _ = no;
                }
            }
            match key.as_str() {
                "name" => name = Some(value),
                "p" => {
                    p = Some(
                        value
                            .parse::<u64>()
                            .with_context(|| format!("line {}: bad modulus", lineno + 1))?,
                    )
                }
                "vars" => {
                    let list: Vec<String> = value
                        .split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect();
                    if list.is_empty() {
                        bail!("line {}: empty variable list", lineno + 1);
                    }
                    for v in &list {
                        if !v
                            .chars()
                            .next()
                            .is_some_and(|c| c.is_alphabetic() || c == '_')
                            || !v.chars().all(|c| c.is_alphanumeric() || c == '_')
                        {
                            bail!("line {}: bad variable name '{v}'", lineno + 1);
                        }
                    }
                    vars = Some(list);
                }
                "matrix" => {
                    matrix = Some(
                        parse_matrix_literal(&value)
                            .with_context(|| format!("line {}: bad matrix", lineno + 1))?,
                    )
                }
                "annihilator" => annihilator = Some(value),
                "expected_depth" => {
                    expected_depth = Some(if value == "CM" {
                        ExpectedDepth::Cm
                    } else {
                        ExpectedDepth::Depth(value.parse::<usize>().with_context(|| {
                            format!(
                                "line {}: expected_depth must be an integer or CM",
                                lineno + 1
                            )
                        })?)
                    })
                }
                "expected_h" => {
                    expected_h = Some(
                        parse_z_poly(&value)
                            .with_context(|| format!("line {}: bad expected_h", lineno + 1))?,
                    )
                }
                "expected_regular_form" => expected_regular_form = Some(value),
                other => bail!("line {}: unknown key '{other}'", lineno + 1),
            }
        }
        let vars = vars.ok_or_else(|| anyhow!("missing 'vars'"))?;
        let matrix: Vec<Vec<String>> = matrix.ok_or_else(|| anyhow!("missing 'matrix'"))?;
        let r = matrix.len();
        if r == 0 || matrix.iter().any(|row| row.len() != r) {
            bail!("matrix must be square and non-empty");
        }
        Ok(InputFile {
            name,
            p: p.unwrap_or(DEFAULT_PRIME),
            vars,
            matrix,
            annihilator,
            expected_depth,
            expected_h,
            expected_regular_form,
        })
    }

    /// Validates the content: field, presentation, optional annihilator and
    /// optional regular form, all parsed over the declared variables.
    pub fn build(&self) -> Result<BuiltInput> {
        let field = Field::new(self.p).map_err(|e| anyhow!("{e}"))?;
        let mut rows = Vec::with_capacity(self.matrix.len());
        for (i, row) in self.matrix.iter().enumerate() {
            let mut out = Vec::with_capacity(row.len());
            for (j, text) in row.iter().enumerate() {
                let poly = parse_polynomial(&field, &self.vars, text)
                    .map_err(|e| anyhow!("matrix entry ({i},{j}): {e}"))?;
                out.push(poly);
            }
            rows.push(out);
        }
        let presentation = Presentation::new(field, rows).map_err(|e| anyhow!("{e}"))?;
        let annihilator = self
            .annihilator
            .as_ref()
            .map(|text| {
                parse_polynomial(&field, &self.vars, text).map_err(|e| anyhow!("annihilator: {e}"))
            })
            .transpose()?;
        let regular_form = self
            .expected_regular_form
            .as_ref()
            .map(|text| {
                parse_polynomial(&field, &self.vars, text)
                    .map_err(|e| anyhow!("expected_regular_form: {e}"))
            })
            .transpose()?;
        Ok(BuiltInput {
            presentation,
            annihilator,
            regular_form,
        })
    }

    /// Canonical rendering; `parse(render(f)) == f` up to whitespace.
    pub fn render(&self) -> String {
        let mut out = String::new();
        if let Some(name) = &self.name {
            out.push_str(&format!("name = {name}\n"));
        }
        out.push_str(&format!("p = {}\n", self.p));
        out.push_str(&format!("vars = {}\n", self.vars.join(", ")));
        out.push_str("matrix = [\n");
        for (i, row) in self.matrix.iter().enumerate() {
            let sep = if i + 1 == self.matrix.len() { "" } else { "," };
            out.push_str(&format!("  [{}]{sep}\n", row.join(", ")));
        }
        out.push_str("]\n");
        if let Some(f) = &self.annihilator {
            out.push_str(&format!("annihilator = {f}\n"));
        }
        if let Some(d) = &self.expected_depth {
            out.push_str(&format!("expected_depth = {d}\n"));
        }
        if let Some(h) = &self.expected_h {
            out.push_str(&format!("expected_h = {}\n", render_z_poly(h)));
        }
        if let Some(f) = &self.expected_regular_form {
            out.push_str(&format!("expected_regular_form = {f}\n"));
        }
        out
    }
}

/// The validated pieces of an input file.
#[derive(Debug)]
pub struct BuiltInput {
    pub presentation: Presentation,
    pub annihilator: Option<MultiPolynomial>,
    pub regular_form: Option<MultiPolynomial>,
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

fn bracket_depth(s: &str) -> i64 {
    s.chars().fold(0, |acc, c| match c {
        '[' => acc + 1,
        ']' => acc - 1,
        _ => acc,
    })
}

/// Parses `[[a, b], [c, d]]` into rows of entry strings, splitting on
/// top-level commas only.
fn parse_matrix_literal(text: &str) -> Result<Vec<Vec<String>>> {
    let text = text.trim();
    let inner = text
        .strip_prefix('[')
        .and_then(|t| t.strip_suffix(']'))
        .ok_or_else(|| anyhow!("matrix must be wrapped in [...]"))?;
    let mut rows = Vec::new();
    let mut depth = 0i64;
    let mut start = None;
    for (i, c) in inner.char_indices() {
        match c {
            '[' => {
                depth += 1;
                if depth == 1 {
                    start = Some(i + 1);
                }
            }
            ']' => {
                depth -= 1;
                if depth < 0 {
                    bail!("unbalanced ']' in matrix");
                }
                if depth == 0 {
                    let row_text = &inner[start.take().ok_or_else(|| anyhow!("stray ']'"))?..i];
                    rows.push(split_top_level(row_text));
                }
            }
            ',' | ' ' | '\t' if depth == 0 => {}
            other if depth == 0 && !other.is_whitespace() => {
                bail!("unexpected '{other}' between matrix rows")
            }
            _ => {}
        }
    }
    if depth != 0 {
        bail!("unbalanced '[' in matrix");
    }
    if rows.is_empty() {
        bail!("matrix has no rows");
    }
    Ok(rows)
}

fn split_top_level(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0i64;
    let mut cur = String::new();
    for c in text.chars() {
        match c {
            '(' => {
                depth += 1;
                cur.push(c);
            }
            ')' => {
                depth -= 1;
                cur.push(c);
            }
            ',' if depth == 0 => {
                out.push(cur.trim().to_string());
                cur = String::new();
            }
            _ => cur.push(c),
        }
    }
    if !cur.trim().is_empty() {
        out.push(cur.trim().to_string());
    }
    out
}

/// Parses an integer polynomial in `z`, e.g. `3 + 3*z^2 - z^3`.
pub fn parse_z_poly(text: &str) -> Result<Vec<i64>> {
    let cleaned: String = text.chars().filter(|c| !c.is_whitespace()).collect();
    if cleaned.is_empty() {
        bail!("empty polynomial");
    }
    let mut coeffs: Vec<i64> = Vec::new();
    let mut add = |deg: usize, c: i64| {
        if coeffs.len() <= deg {
            coeffs.resize(deg + 1, 0);
        }
        coeffs[deg] += c;
    };
    let bytes = cleaned.as_bytes();
    let mut i = 0;
    let mut sign = 1i64;
    loop {
        if i >= bytes.len() {
            bail!("trailing operator in polynomial");
        }
        // Optional coefficient.
        let mut coeff: Option<i64> = None;
        let start = i;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            i += 1;
        }
        if i > start {
            coeff = Some(cleaned[start..i].parse::<i64>()?);
        }
        if i < bytes.len() && bytes[i] == b'*' {
            i += 1;
        }
        // Optional z power.
        let mut deg = 0usize;
        if i < bytes.len() && bytes[i] == b'z' {
            i += 1;
            deg = 1;
            if i < bytes.len() && bytes[i] == b'^' {
                i += 1;
                let start = i;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i == start {
                    bail!("missing exponent after '^'");
                }
                deg = cleaned[start..i].parse::<usize>()?;
            }
        } else if coeff.is_none() {
            bail!("expected a coefficient or z at position {i}");
        }
        add(deg, sign * coeff.unwrap_or(1));
        if i == bytes.len() {
            break;
        }
        sign = match bytes[i] {
            b'+' => 1,
            b'-' => -1,
            other => bail!("unexpected '{}' in polynomial", other as char),
        };
        i += 1;
    }
    while coeffs.last() == Some(&0) {
        coeffs.pop();
    }
    Ok(coeffs)
}

pub fn render_z_poly(coeffs: &[i64]) -> String {
    gradmod_core::HPolynomial::new(coeffs.to_vec(), 0).render()
}
