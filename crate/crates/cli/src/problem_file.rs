//! Line-oriented problem files.
//!
//! ```text
//! # Bagley-Torvik
//! term 1 2
//! term 0.5 1.5
//! nonlinear 1 0.5
//! forcing 0 1 8
//! forcing 1 inf 0
//! init 0 0
//! init 1 0
//! ```
//!
//! `term <coefficient> <order>` in strictly decreasing order,
//! `nonlinear <power> <coefficient>` (repeatable, summed),
//! `forcing <t_from> <t_to|inf> <c0> [c1 …]` on `[t_from, t_to)`,
//! `init <k> <value>` for every `k = 0 … m₁−1`. Without `forcing` lines the
//! forcing is zero.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};

use fracdecomp::problem::ForcingSegment;
use fracdecomp::{Forcing, FracTerm, PiecewiseForcing, Polynomial, Problem};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub struct ParseError {
    pub line: Option<usize>,
    pub column: Option<usize>,
    pub message: String,
}

impl ParseError {
    fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), column: Some(column), message: message.into() }
    }

    fn on_line(line: usize, message: impl Into<String>) -> Self {
        Self { line: Some(line), column: None, message: message.into() }
    }

    fn global(message: impl Into<String>) -> Self {
        Self { line: None, column: None, message: message.into() }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, self.column) {
            (Some(l), Some(c)) => write!(f, "line {}, column {}: {}", l, c, self.message),
            (Some(l), None) => write!(f, "line {}: {}", l, self.message),
            _ => f.write_str(&self.message),
        }
    }
}

/// A parsed problem file with the source line of every directive.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemFile {
    pub path: PathBuf,
    pub spec: Problem,
    pub term_lines: Vec<usize>,
    pub forcing_lines: Vec<usize>,
    pub init_lines: Vec<usize>,
}

impl ProblemFile {
    pub fn load(path: impl AsRef<Path>) -> Result<Self, ParseError> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| ParseError::global(format!("cannot read {}: {}", path.display(), e)))?;
        let parsed = parse(&text)?;
        Ok(Self {
            path: path.to_path_buf(),
            spec: parsed.spec,
            term_lines: parsed.term_lines,
            forcing_lines: parsed.forcing_lines,
            init_lines: parsed.init_lines,
        })
    }
}

pub fn parse_problem(text: &str) -> Result<Problem, ParseError> {
    parse(text).map(|p| p.spec)
}

struct Parsed {
    spec: Problem,
    term_lines: Vec<usize>,
    forcing_lines: Vec<usize>,
    init_lines: Vec<usize>,
}

struct Token<'a> {
    text: &'a str,
    column: usize,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let code = line.split('#').next().unwrap_or("");
    let mut tokens = Vec::new();
    let mut start = None;
    for (pos, ch) in code.char_indices().chain(std::iter::once((code.len(), ' '))) {
        match (ch.is_whitespace(), start) {
            (false, None) => start = Some(pos),
            (true, Some(s)) => {
                tokens.push(Token { text: &code[s..pos], column: code[..s].chars().count() + 1 });
                start = None;
            }
            _ => {}
        }
    }
    tokens
}

fn number(tok: &Token<'_>, line: usize) -> Result<f64, ParseError> {
    let v: f64 = tok
        .text
        .parse()
        .map_err(|_| ParseError::at(line, tok.column, format!("expected a number, got `{}`", tok.text)))?;
    if !v.is_finite() {
        return Err(ParseError::at(line, tok.column, format!("expected a finite number, got `{}`", tok.text)));
    }
    Ok(v)
}

fn index(tok: &Token<'_>, line: usize, what: &str) -> Result<usize, ParseError> {
    tok.text.parse().map_err(|_| {
        ParseError::at(line, tok.column, format!("expected a non-negative integer {}, got `{}`", what, tok.text))
    })
}

fn arity(tokens: &[Token<'_>], line: usize, expected: usize, usage: &str) -> Result<(), ParseError> {
    if tokens.len() == expected {
        return Ok(());
    }
    let column = tokens.get(expected).map_or(tokens[0].column, |t| t.column);
    Err(ParseError::at(line, column, format!("expected `{}`", usage)))
}

fn parse(text: &str) -> Result<Parsed, ParseError> {
    let mut terms = Vec::new();
    let mut term_lines = Vec::new();
    let mut g = Polynomial::zero();
    let mut segments = Vec::new();
    let mut forcing_lines = Vec::new();
    let mut inits: Vec<(usize, usize, f64)> = Vec::new();

    for (n, raw) in text.lines().enumerate() {
        let line = n + 1;
        let tokens = tokenize(raw);
        let Some(head) = tokens.first() else { continue };
        match head.text {
            "term" => {
                arity(&tokens, line, 3, "term <coefficient> <order>")?;
                let term = FracTerm::new(number(&tokens[1], line)?, number(&tokens[2], line)?);
                if let Some(prev) = terms.last().map(|t: &FracTerm<f64>| t.order) {
                    if term.order >= prev {
                        return Err(ParseError::at(line, tokens[2].column, "orders must be strictly decreasing"));
                    }
                }
                terms.push(term);
                term_lines.push(line);
            }
            "nonlinear" => {
                arity(&tokens, line, 3, "nonlinear <power> <coefficient>")?;
                let power = index(&tokens[1], line, "power")?;
                g.add_monomial(power, number(&tokens[2], line)?);
            }
            "forcing" => {
                if tokens.len() < 4 {
                    return Err(ParseError::at(
                        line,
                        head.column,
                        "expected `forcing <t_from> <t_to|inf> <c0> [c1 …]`",
                    ));
                }
                let start = number(&tokens[1], line)?;
                let end = if tokens[2].text == "inf" { None } else { Some(number(&tokens[2], line)?) };
                let coefficients = tokens[3..].iter().map(|t| number(t, line)).collect::<Result<Vec<_>, _>>()?;
                segments.push(ForcingSegment { start, end, poly: Polynomial::new(coefficients) });
                forcing_lines.push(line);
            }
            "init" => {
                arity(&tokens, line, 3, "init <k> <value>")?;
                let k = index(&tokens[1], line, "derivative index")?;
                if inits.iter().any(|&(j, _, _)| j == k) {
                    return Err(ParseError::at(line, tokens[1].column, format!("duplicate init {}", k)));
                }
                inits.push((k, line, number(&tokens[2], line)?));
            }
            other => return Err(ParseError::at(line, head.column, format!("unknown directive `{}`", other))),
        }
    }

    if terms.is_empty() {
        return Err(ParseError::global("no terms"));
    }
    let m1 = terms[0].integer_order();
    let mut ics = vec![None; m1];
    let mut init_lines = vec![0; m1];
    for &(k, line, v) in &inits {
        if k >= m1 {
            return Err(ParseError::on_line(
                line,
                format!("init {} out of range: the leading order needs k = 0…{}", k, m1 as isize - 1),
            ));
        }
        ics[k] = Some(v);
        init_lines[k] = line;
    }
    if let Some(k) = ics.iter().position(Option::is_none) {
        return Err(ParseError::global(format!("missing init {} (need k = 0…{})", k, m1 - 1)));
    }
    let ics = ics.into_iter().flatten().collect();

    let forcing = if segments.is_empty() {
        PiecewiseForcing::constant(0.0)
    } else {
        PiecewiseForcing::new(segments).map_err(|e| ParseError {
            line: forcing_lines.first().copied(),
            column: None,
            message: e.to_string(),
        })?
    };
    let spec = Problem::new(terms, g, Forcing::Piecewise(forcing), ics).map_err(|e| {
        let message = e.to_string();
        let line = term_lines.first().copied().filter(|_| message.contains("coefficient") || message.contains("order"));
        ParseError { line, column: None, message }
    })?;
    Ok(Parsed { spec, term_lines, forcing_lines, init_lines })
}

/// Writes `spec` in the file grammar; `parse_problem` of the output
/// reproduces `spec` exactly. Sampled forcing has no textual form.
pub fn print_problem(spec: &Problem) -> Result<String, ParseError> {
    let Forcing::Piecewise(forcing) = spec.forcing() else {
        return Err(ParseError::global("sampled forcing cannot be written to a problem file"));
    };
    let mut out = String::new();
    for t in spec.terms() {
        writeln!(out, "term {} {}", t.coefficient, t.order).unwrap();
    }
    for (p, &c) in spec.nonlinearity().coefficients().iter().enumerate() {
        if c != 0.0 {
            writeln!(out, "nonlinear {} {}", p, c).unwrap();
        }
    }
    for seg in forcing.segments() {
        let end = seg.end.map_or_else(|| "inf".to_string(), |e| e.to_string());
        write!(out, "forcing {} {}", seg.start, end).unwrap();
        if seg.poly.is_zero() {
            out.push_str(" 0");
        }
        for c in seg.poly.coefficients() {
            write!(out, " {}", c).unwrap();
        }
        out.push('\n');
    }
    for (k, b) in spec.initial_conditions().iter().enumerate() {
        writeln!(out, "init {} {}", k, b).unwrap();
    }
    Ok(out)
}
