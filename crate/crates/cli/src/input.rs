//! The germ description grammar.
//!
//! ```text
//! # comment
//! lambda = 1, 2, -3
//! a1 = 1/2*z + x*y; a2 = 0
//! a3 = x*y*z
//! order = 6
//! ```
//!
//! Statements are separated by newlines or `;`. Missing `a_j` default to 0 and
//! a missing `order` to [`DEFAULT_ORDER`]. Instead of `lambda` and `a_j` the
//! full components `X1`, `X2`, `X3` of `Σ X_j ∂x_j` may be given.

use std::fmt;

use holint_core::series_core::text::{parse_constant_at, parse_series_at, ParseError, Position};
use holint_core::series_core::SeriesError;
use holint_core::{GaussianRational, TruncatedSeries3, VectorFieldGerm};
use num_traits::Zero;
use thiserror::Error;

pub const DEFAULT_ORDER: u32 = 6;
pub const MIN_ORDER: u32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Semantic {
    ZeroEigenvalue { index: usize },
    ConstantTerm { index: usize },
    NonInvariantPlane { index: usize },
    NotDiagonal { index: usize },
    OrderTooLow { order: u32 },
    Duplicate(String),
    UnknownKey(String),
    MixedForms,
    MissingLambda,
    EigenvalueCount(usize),
}

impl fmt::Display for Semantic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Semantic::ZeroEigenvalue { index } => write!(f, "zero eigenvalue: lambda{} = 0", index + 1),
            Semantic::ConstantTerm { index } => write!(f, "constant term in a{}: unit factors must vanish at the origin", index + 1),
            Semantic::NonInvariantPlane { index } => {
                write!(f, "non-invariant plane: X{} is not divisible by {}", index + 1, ["x", "y", "z"][*index])
            }
            Semantic::NotDiagonal { index } => write!(f, "linear part of X{} is not diagonal", index + 1),
            Semantic::OrderTooLow { order } => write!(f, "order {order} is below the minimum {MIN_ORDER}"),
            Semantic::Duplicate(key) => write!(f, "`{key}` given twice"),
            Semantic::UnknownKey(key) => write!(f, "unknown key `{key}`"),
            Semantic::MixedForms => f.write_str("lambda/a_j and X_j forms cannot be mixed"),
            Semantic::MissingLambda => f.write_str("no `lambda` statement"),
            Semantic::EigenvalueCount(n) => write!(f, "expected 3 eigenvalues, found {n}"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum InputError {
    #[error("syntax error at {0}")]
    Syntax(ParseError),
    #[error("invalid field at line {}, column {}: {kind}", .at.line, .at.column)]
    Semantic { at: Position, kind: Semantic },
}

impl InputError {
    fn semantic(at: Position, kind: Semantic) -> Self {
        InputError::Semantic { at, kind }
    }
}

impl From<ParseError> for InputError {
    fn from(e: ParseError) -> Self {
        InputError::Syntax(e)
    }
}

/// A statement `key = value` with the positions of both parts.
struct Statement<'a> {
    key: &'a str,
    key_at: Position,
    value: &'a str,
    value_at: Position,
}

fn advance(mut pos: Position, text: &str) -> Position {
    for c in text.chars() {
        if c == '\n' {
            pos.line += 1;
            pos.column = 1;
        } else {
            pos.column += 1;
        }
    }
    pos
}

fn skip_blank(s: &str, pos: Position) -> (&str, Position) {
    let t = s.trim_start();
    (t, advance(pos, &s[..s.len() - t.len()]))
}

fn statements(text: &str) -> Result<Vec<Statement<'_>>, InputError> {
    let mut out = Vec::new();
    let mut pos = Position::START;
    for line in text.split_inclusive('\n') {
        let body = line.split('#').next().unwrap_or("");
        let mut at = pos;
        for piece in body.split(';') {
            let next = advance(at, piece);
            let (s, start) = skip_blank(piece, at);
            at = advance(next, ";");
            let s = s.trim_end();
            if s.is_empty() {
                continue;
            }
            let Some(eq) = s.find('=') else {
                return Err(ParseError::at(start, "expected `key = value`").into());
            };
            let key = s[..eq].trim_end();
            if key.is_empty() {
                return Err(ParseError::at(start, "missing key before `=`").into());
            }
            let (value, value_at) = skip_blank(&s[eq + 1..], advance(start, &s[..=eq]));
            out.push(Statement { key, key_at: start, value, value_at });
        }
        pos = advance(pos, line);
    }
    Ok(out)
}

fn parse_order(st: &Statement<'_>) -> Result<u32, InputError> {
    st.value.parse::<u32>().map_err(|_| ParseError::at(st.value_at, "order must be a non-negative integer").into())
}

fn parse_lambda(st: &Statement<'_>) -> Result<Vec<GaussianRational>, InputError> {
    let mut at = st.value_at;
    let mut out = Vec::new();
    for part in st.value.split(',') {
        let (s, start) = skip_blank(part, at);
        if s.trim_end().is_empty() {
            return Err(ParseError::at(start, "missing eigenvalue").into());
        }
        out.push(parse_constant_at(s.trim_end(), start)?);
        at = advance(advance(at, part), ",");
    }
    Ok(out)
}

fn slot(key: &str, prefix: char) -> Option<usize> {
    let mut chars = key.chars();
    if chars.next() != Some(prefix) {
        return None;
    }
    match chars.as_str() {
        "1" => Some(0),
        "2" => Some(1),
        "3" => Some(2),
        _ => None,
    }
}

/// Parses a germ description. `order_override` replaces any `order`
/// statement in the text.
pub fn parse_field(text: &str, order_override: Option<u32>) -> Result<VectorFieldGerm, InputError> {
    let stmts = statements(text)?;
    let mut seen: Vec<&str> = Vec::new();
    let mut order = None;
    for st in &stmts {
        if seen.contains(&st.key) {
            return Err(InputError::semantic(st.key_at, Semantic::Duplicate(st.key.to_string())));
        }
        seen.push(st.key);
        if st.key == "order" {
            order = Some((parse_order(st)?, st.value_at));
        }
    }
    let (order, order_at) = match (order_override, order) {
        (Some(o), _) => (o, Position::START),
        (None, Some((o, at))) => (o, at),
        (None, None) => (DEFAULT_ORDER, Position::START),
    };
    if order < MIN_ORDER {
        return Err(InputError::semantic(order_at, Semantic::OrderTooLow { order }));
    }

    let mut lambda: Option<(Vec<GaussianRational>, Position)> = None;
    let mut a: [Option<(TruncatedSeries3, Position)>; 3] = Default::default();
    let mut comps: [Option<(TruncatedSeries3, Position)>; 3] = Default::default();
    for st in &stmts {
        if st.key == "order" {
            continue;
        } else if st.key == "lambda" {
            lambda = Some((parse_lambda(st)?, st.value_at));
        } else if let Some(j) = slot(st.key, 'a') {
            a[j] = Some((parse_series_at(st.value, order, st.value_at)?, st.value_at));
        } else if let Some(j) = slot(st.key, 'X') {
            comps[j] = Some((parse_series_at(st.value, order + 1, st.value_at)?, st.value_at));
        } else {
            return Err(InputError::semantic(st.key_at, Semantic::UnknownKey(st.key.to_string())));
        }
    }

    let has_comps = comps.iter().any(Option::is_some);
    if has_comps {
        if let Some(st) = stmts.iter().find(|s| s.key == "lambda" || slot(s.key, 'a').is_some()) {
            return Err(InputError::semantic(st.key_at, Semantic::MixedForms));
        }
        let at = |j: usize| comps[j].as_ref().map_or(Position::START, |c| c.1);
        let series = std::array::from_fn(|j| comps[j].as_ref().map_or_else(|| TruncatedSeries3::zero(order + 1), |c| c.0.clone()));
        return VectorFieldGerm::from_components(series).map_err(|e| {
            let (j, kind) = match e {
                SeriesError::ZeroEigenvalue { index } => (index, Semantic::ZeroEigenvalue { index }),
                SeriesError::NonInvariantPlane { index } => (index, Semantic::NonInvariantPlane { index }),
                SeriesError::NotDiagonal { index } => (index, Semantic::NotDiagonal { index }),
                SeriesError::NotInMaximalIdeal { index } => (index, Semantic::ConstantTerm { index }),
                other => unreachable!("component validation: {other}"),
            };
            InputError::semantic(at(j), kind)
        });
    }

    let Some((lambda, lambda_at)) = lambda else {
        return Err(InputError::semantic(Position::START, Semantic::MissingLambda));
    };
    let lambda: [GaussianRational; 3] = lambda
        .try_into()
        .map_err(|v: Vec<_>| InputError::semantic(lambda_at, Semantic::EigenvalueCount(v.len())))?;
    if let Some(index) = lambda.iter().position(|l| l.is_zero()) {
        return Err(InputError::semantic(lambda_at, Semantic::ZeroEigenvalue { index }));
    }
    for (index, s) in a.iter().enumerate() {
        if let Some((s, at)) = s {
            if !s.in_maximal_ideal() {
                return Err(InputError::semantic(*at, Semantic::ConstantTerm { index }));
            }
        }
    }
    let a = a.map(|s| s.map_or_else(|| TruncatedSeries3::zero(order), |(s, _)| s));
    Ok(VectorFieldGerm::new(lambda, a).expect("validated above"))
}

/// The canonical description of `x`; [`parse_field`] reads it back exactly.
pub fn print_field(x: &VectorFieldGerm) -> String {
    let [l1, l2, l3] = x.lambda();
    let mut out = format!("lambda = {l1}, {l2}, {l3}\n");
    for (j, s) in x.a().iter().enumerate() {
        out.push_str(&format!("a{} = {s}\n", j + 1));
    }
    out.push_str(&format!("order = {}\n", x.order()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use holint_core::series_core::text::parse_series;

    #[test]
    fn linear_example() {
        let x = parse_field("lambda = 1, 2, -3; a1 = 0; a2 = 0; a3 = 0; order = 6", None).unwrap();
        assert_eq!(x, VectorFieldGerm::linear_int([1, 2, -3], 6).unwrap());
        assert!(x.is_linear());
    }

    #[test]
    fn unit_factor_example() {
        let x = parse_field("lambda = 1, 2, -3\na1 = 1/2*z + x*y", None).unwrap();
        assert_eq!(x.a()[0], parse_series::<3>("1/2*z + x*y", DEFAULT_ORDER).unwrap());
        assert_eq!(x.a()[0].num_terms(), 2);
        assert_eq!(x.order(), DEFAULT_ORDER);
    }

    #[test]
    fn zero_eigenvalue_is_rejected() {
        let e = parse_field("lambda = 1, 0, -3", None).unwrap_err();
        assert_eq!(e, InputError::semantic(Position { line: 1, column: 10 }, Semantic::ZeroEigenvalue { index: 1 }));
        assert!(e.to_string().contains("zero eigenvalue"));
    }

    #[test]
    fn syntax_errors_carry_positions() {
        let e = parse_field("lambda = 1, 2, -3\n# note\na2 =  x + * y", None).unwrap_err();
        let InputError::Syntax(p) = e else { panic!("{e}") };
        assert_eq!((p.line, p.column), (3, 11));
        let InputError::Syntax(p) = parse_field("lambda = 1, 2 -; order = 4", None).unwrap_err() else { panic!() };
        assert_eq!(p.line, 1);
        assert!(p.column >= 13 && p.column <= 16, "{p}");
        let InputError::Syntax(p) = parse_field("lambda 1, 2, 3", None).unwrap_err() else { panic!() };
        assert_eq!((p.line, p.column), (1, 1));
        let InputError::Syntax(p) = parse_field("  order = six", None).unwrap_err() else { panic!() };
        assert_eq!((p.line, p.column), (1, 11));
    }

    #[test]
    fn semantic_errors() {
        let kind = |t: &str| match parse_field(t, None).unwrap_err() {
            InputError::Semantic { kind, .. } => kind,
            e => panic!("{e}"),
        };
        assert_eq!(kind("lambda = 1, 2, -3; a3 = 1 + x"), Semantic::ConstantTerm { index: 2 });
        assert_eq!(kind("X1 = x; X2 = 2*y + z; X3 = -3*z"), Semantic::NonInvariantPlane { index: 1 });
        assert_eq!(kind("X1 = x + x*y; X2 = y^2; X3 = -3*z"), Semantic::ZeroEigenvalue { index: 1 });
        assert_eq!(kind("lambda = 1, 2"), Semantic::EigenvalueCount(2));
        assert_eq!(kind("a1 = x"), Semantic::MissingLambda);
        assert_eq!(kind("lambda = 1, 2, 3; X1 = x"), Semantic::MixedForms);
        assert_eq!(kind("lambda = 1, 2, 3; b1 = x"), Semantic::UnknownKey("b1".into()));
        assert_eq!(kind("lambda = 1, 2, 3; order = 1"), Semantic::OrderTooLow { order: 1 });
        assert_eq!(kind("lambda = 1, 2, 3; lambda = 1, 2, 3"), Semantic::Duplicate("lambda".into()));
    }

    #[test]
    fn component_form_matches_unit_form() {
        let from_a = parse_field("lambda = 1, 2, -3; a1 = z; a3 = x*y; order = 4", None).unwrap();
        let from_x = parse_field("X1 = x + x*z\nX2 = 2*y\nX3 = -3*z - 3*x*y*z\norder = 4", None).unwrap();
        assert_eq!(from_a, from_x);
    }

    #[test]
    fn order_override_wins() {
        let x = parse_field("lambda = 1, 2, -3; a1 = z^5; order = 6", Some(3)).unwrap();
        assert_eq!(x.order(), 3);
        assert!(x.a()[0].is_zero());
    }

    #[test]
    fn print_round_trip() {
        let src = "lambda = 1/2+i, -3i, 7\na1 = (1-i)*x*y - 1/3*z^2\na2 = i*x\na3 = y*z^3\norder = 5";
        let x = parse_field(src, None).unwrap();
        assert_eq!(parse_field(&print_field(&x), None).unwrap(), x);
    }
}
