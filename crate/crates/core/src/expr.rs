//! A small deterministic expression language for time-dependent coefficients.
//!
//! Coefficients such as `a12(t) = "t^3*cos(t)"` are parsed once into an
//! immutable tree over the single variable `t` and evaluated wherever the
//! solvers and quadrature routines need them. Evaluation is plain IEEE-754
//! double arithmetic, so identical source text gives bit-identical values.

use serde::Serialize;
use std::fmt;
use std::sync::Arc;

/// Binary primitive functions available in the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Func2 {
    Min,
    Max,
}

/// Unary primitive functions available in the grammar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Func1 {
    Sin,
    Cos,
    Exp,
    Ln,
    Abs,
}

impl Func1 {
    fn name(self) -> &'static str {
        match self {
            Func1::Sin => "sin",
            Func1::Cos => "cos",
            Func1::Exp => "exp",
            Func1::Ln => "ln",
            Func1::Abs => "abs",
        }
    }
}

impl Func2 {
    fn name(self) -> &'static str {
        match self {
            Func2::Min => "min",
            Func2::Max => "max",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Time,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Un(Func1, Box<Expr>),
    Bin(Func2, Box<Expr>, Box<Expr>),
}

/// A parsed, immutable coefficient expression. Cheap to clone and safe to
/// evaluate from many threads at once.
#[derive(Debug, Clone, PartialEq)]
pub struct CoeffExpr {
    root: Arc<Expr>,
    source: Arc<str>,
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum ParseError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { offset: usize, name: String },
}

impl ParseError {
    pub fn offset(&self) -> usize {
        match self {
            ParseError::Syntax { offset, .. } => *offset,
            ParseError::UnknownIdentifier { offset, .. } => *offset,
        }
    }
}

#[derive(Debug, Clone, thiserror::Error, PartialEq)]
pub enum EvalError {
    #[error("singular point at t = {t}: {what}")]
    Singular { t: f64, what: &'static str },
}

// ---------------------------------------------------------------------------
// Lexer / parser
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Eof,
}

struct Lexer<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(src: &'a str) -> Self {
        Lexer { src: src.as_bytes(), pos: 0 }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn next_tok(&mut self) -> Result<(Tok, usize), ParseError> {
        self.skip_ws();
        let start = self.pos;
        if self.pos >= self.src.len() {
            return Ok((Tok::Eof, start));
        }
        let c = self.src[self.pos];
        let tok = match c {
            b'+' => Tok::Plus,
            b'-' => Tok::Minus,
            b'*' => Tok::Star,
            b'/' => Tok::Slash,
            b'^' => Tok::Caret,
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            b',' => Tok::Comma,
            b'0'..=b'9' | b'.' => return self.lex_number(start),
            c if c.is_ascii_alphabetic() || c == b'_' => return self.lex_ident(start),
            other => {
                return Err(ParseError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{}`", other as char),
                })
            }
        };
        self.pos += 1;
        Ok((tok, start))
    }

    fn lex_number(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let mut end = self.pos;
        while end < self.src.len() && (self.src[end].is_ascii_digit() || self.src[end] == b'.') {
            end += 1;
        }
        if end < self.src.len() && (self.src[end] == b'e' || self.src[end] == b'E') {
            let mut e = end + 1;
            if e < self.src.len() && (self.src[e] == b'+' || self.src[e] == b'-') {
                e += 1;
            }
            if e < self.src.len() && self.src[e].is_ascii_digit() {
                end = e;
                while end < self.src.len() && self.src[end].is_ascii_digit() {
                    end += 1;
                }
            }
        }
        let text = std::str::from_utf8(&self.src[start..end]).unwrap();
        let value: f64 = text.parse().map_err(|_| ParseError::Syntax {
            offset: start,
            message: format!("malformed number `{text}`"),
        })?;
        self.pos = end;
        Ok((Tok::Num(value), start))
    }

    fn lex_ident(&mut self, start: usize) -> Result<(Tok, usize), ParseError> {
        let mut end = self.pos;
        while end < self.src.len()
            && (self.src[end].is_ascii_alphanumeric() || self.src[end] == b'_')
        {
            end += 1;
        }
        let text = std::str::from_utf8(&self.src[start..end]).unwrap().to_owned();
        self.pos = end;
        Ok((Tok::Ident(text), start))
    }
}

struct Parser {
    toks: Vec<(Tok, usize)>,
    at: usize,
}

impl Parser {
    fn peek(&self) -> &(Tok, usize) {
        &self.toks[self.at.min(self.toks.len() - 1)]
    }

    fn bump(&mut self) -> (Tok, usize) {
        let t = self.toks[self.at.min(self.toks.len() - 1)].clone();
        if self.at < self.toks.len() {
            self.at += 1;
        }
        t
    }

    fn expect(&mut self, want: Tok, what: &str) -> Result<(), ParseError> {
        let (tok, off) = self.bump();
        if tok == want {
            Ok(())
        } else {
            Err(ParseError::Syntax { offset: off, message: format!("expected {what}") })
        }
    }

    // additive := multiplicative (('+'|'-') multiplicative)*
    fn additive(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.multiplicative()?;
        loop {
            match self.peek().0 {
                Tok::Plus => {
                    self.bump();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.multiplicative()?));
                }
                Tok::Minus => {
                    self.bump();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.multiplicative()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // multiplicative := unary (('*'|'/') unary)*
    fn multiplicative(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek().0 {
                Tok::Star => {
                    self.bump();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Tok::Slash => {
                    self.bump();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            let inner = self.unary()?;
            // fold literal negation so render/parse round-trips structurally
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    // power := primary ('^' unary)?   (right-associative, binds above unary -)
    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.primary()?;
        if self.peek().0 == Tok::Caret {
            self.bump();
            let exp = self.unary_no_sub()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    // exponent position: allow unary minus and nested powers, not +/*.
    fn unary_no_sub(&mut self) -> Result<Expr, ParseError> {
        if self.peek().0 == Tok::Minus {
            self.bump();
            let inner = self.unary_no_sub()?;
            return Ok(match inner {
                Expr::Const(c) => Expr::Const(-c),
                other => Expr::Neg(Box::new(other)),
            });
        }
        self.power()
    }

    fn primary(&mut self) -> Result<Expr, ParseError> {
        let (tok, off) = self.bump();
        match tok {
            Tok::Num(v) => Ok(Expr::Const(v)),
            Tok::LParen => {
                let e = self.additive()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(e)
            }
            Tok::Ident(name) => match name.as_str() {
                "t" => Ok(Expr::Time),
                "pi" => Ok(Expr::Const(std::f64::consts::PI)),
                "e" => Ok(Expr::Const(std::f64::consts::E)),
                "sin" | "cos" | "exp" | "ln" | "abs" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let arg = self.additive()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let f = match name.as_str() {
                        "sin" => Func1::Sin,
                        "cos" => Func1::Cos,
                        "exp" => Func1::Exp,
                        "ln" => Func1::Ln,
                        _ => Func1::Abs,
                    };
                    Ok(Expr::Un(f, Box::new(arg)))
                }
                "min" | "max" => {
                    self.expect(Tok::LParen, "`(` after function name")?;
                    let a = self.additive()?;
                    self.expect(Tok::Comma, "`,`")?;
                    let b = self.additive()?;
                    self.expect(Tok::RParen, "`)`")?;
                    let f = if name == "min" { Func2::Min } else { Func2::Max };
                    Ok(Expr::Bin(f, Box::new(a), Box::new(b)))
                }
                _ => Err(ParseError::UnknownIdentifier { offset: off, name }),
            },
            Tok::Eof => Err(ParseError::Syntax { offset: off, message: "expected expression, found end of input".into() }),
            other => Err(ParseError::Syntax { offset: off, message: format!("expected expression, found `{other:?}`") }),
        }
    }
}

impl CoeffExpr {
    /// Parse an expression over the variable `t`.
    pub fn parse(source: &str) -> Result<CoeffExpr, ParseError> {
        if source.trim().is_empty() {
            return Err(ParseError::Syntax { offset: 0, message: "empty expression".into() });
        }
        let mut lx = Lexer::new(source);
        let mut toks = Vec::new();
        loop {
            let (t, off) = lx.next_tok()?;
            let eof = t == Tok::Eof;
            toks.push((t, off));
            if eof {
                break;
            }
        }
        let mut p = Parser { toks, at: 0 };
        let root = p.additive()?;
        let (tok, off) = p.bump();
        if tok != Tok::Eof {
            return Err(ParseError::Syntax { offset: off, message: "trailing input".into() });
        }
        Ok(CoeffExpr { root: Arc::new(root), source: Arc::from(source) })
    }

    /// Constant expression without going through the parser.
    pub fn constant(v: f64) -> CoeffExpr {
        CoeffExpr { root: Arc::new(Expr::Const(v)), source: Arc::from(format!("{v}")) }
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn root(&self) -> &Expr {
        &self.root
    }

    /// Wrap in a unary negation (used for the reciprocal-equation maps).
    pub fn negated(&self) -> CoeffExpr {
        let root = match self.root.as_ref() {
            Expr::Const(c) => Expr::Const(-c),
            Expr::Neg(inner) => (**inner).clone(),
            other => Expr::Neg(Box::new(other.clone())),
        };
        let source = render(&root);
        CoeffExpr { root: Arc::new(root), source: Arc::from(source) }
    }

    fn from_root(root: Expr) -> CoeffExpr {
        let source = render(&root);
        CoeffExpr { root: Arc::new(root), source: Arc::from(source) }
    }

    /// `self - other` as a new expression tree.
    pub fn difference(&self, other: &CoeffExpr) -> CoeffExpr {
        Self::from_root(Expr::Sub(
            Box::new(self.root.as_ref().clone()),
            Box::new(other.root.as_ref().clone()),
        ))
    }

    /// `self + other` as a new expression tree.
    pub fn sum(&self, other: &CoeffExpr) -> CoeffExpr {
        Self::from_root(Expr::Add(
            Box::new(self.root.as_ref().clone()),
            Box::new(other.root.as_ref().clone()),
        ))
    }

    /// `self * other` as a new expression tree.
    pub fn product(&self, other: &CoeffExpr) -> CoeffExpr {
        Self::from_root(Expr::Mul(
            Box::new(self.root.as_ref().clone()),
            Box::new(other.root.as_ref().clone()),
        ))
    }

    /// Evaluate at `t`, reporting singular points (division by zero,
    /// logarithm of a non-positive value, non-finite power results).
    pub fn eval(&self, t: f64) -> Result<f64, EvalError> {
        eval_node(&self.root, t)
    }

    /// Infix rendering that re-parses to a structurally identical tree.
    pub fn render(&self) -> String {
        render(&self.root)
    }

    /// Sample-based sign certification on `[t1, t2]`.
    pub fn sign_certify(&self, t1: f64, t2: f64, budget: usize) -> SignCertificate {
        sign_certify_impl(self, t1, t2, budget)
    }
}

impl fmt::Display for CoeffExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

fn eval_node(e: &Expr, t: f64) -> Result<f64, EvalError> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Time => t,
        Expr::Neg(a) => -eval_node(a, t)?,
        Expr::Add(a, b) => eval_node(a, t)? + eval_node(b, t)?,
        Expr::Sub(a, b) => eval_node(a, t)? - eval_node(b, t)?,
        Expr::Mul(a, b) => eval_node(a, t)? * eval_node(b, t)?,
        Expr::Div(a, b) => {
            let d = eval_node(b, t)?;
            if d == 0.0 {
                return Err(EvalError::Singular { t, what: "division by zero" });
            }
            eval_node(a, t)? / d
        }
        Expr::Pow(a, b) => {
            let base = eval_node(a, t)?;
            let exp = eval_node(b, t)?;
            let v = base.powf(exp);
            if !v.is_finite() {
                return Err(EvalError::Singular { t, what: "non-finite power" });
            }
            v
        }
        Expr::Un(f, a) => {
            let x = eval_node(a, t)?;
            match f {
                Func1::Sin => x.sin(),
                Func1::Cos => x.cos(),
                Func1::Exp => {
                    let v = x.exp();
                    if !v.is_finite() {
                        return Err(EvalError::Singular { t, what: "exp overflow" });
                    }
                    v
                }
                Func1::Ln => {
                    if x <= 0.0 {
                        return Err(EvalError::Singular { t, what: "ln of non-positive value" });
                    }
                    x.ln()
                }
                Func1::Abs => x.abs(),
            }
        }
        Expr::Bin(f, a, b) => {
            let x = eval_node(a, t)?;
            let y = eval_node(b, t)?;
            match f {
                Func2::Min => x.min(y),
                Func2::Max => x.max(y),
            }
        }
    })
}

// Precedence levels used for parenthesisation while rendering. A negative
// literal renders with a leading minus, so it binds like a unary negation.
fn prec(e: &Expr) -> u8 {
    match e {
        Expr::Add(..) | Expr::Sub(..) => 1,
        Expr::Mul(..) | Expr::Div(..) => 2,
        Expr::Neg(..) => 3,
        Expr::Const(c) if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) => 3,
        Expr::Pow(..) => 4,
        _ => 5,
    }
}

fn render(e: &Expr) -> String {
    fn child(e: &Expr, min: u8) -> String {
        if prec(e) < min {
            format!("({})", render(e))
        } else {
            render(e)
        }
    }
    match e {
        Expr::Const(c) => {
            if *c < 0.0 || (*c == 0.0 && c.is_sign_negative()) {
                // negative literal renders with the sign glued on; the parser
                // folds it back into a constant
                format!("{c}")
            } else {
                format!("{c}")
            }
        }
        Expr::Time => "t".into(),
        Expr::Neg(a) => format!("-{}", child(a, 4)),
        Expr::Add(a, b) => format!("{} + {}", child(a, 1), child(b, 2)),
        Expr::Sub(a, b) => format!("{} - {}", child(a, 1), child(b, 2)),
        Expr::Mul(a, b) => format!("{}*{}", child(a, 2), child(b, 3)),
        Expr::Div(a, b) => format!("{}/{}", child(a, 2), child(b, 3)),
        Expr::Pow(a, b) => format!("{}^{}", child(a, 5), child(b, 4)),
        Expr::Un(f, a) => format!("{}({})", f.name(), render(a)),
        Expr::Bin(f, a, b) => format!("{}({}, {})", f.name(), render(a), render(b)),
    }
}

// ---------------------------------------------------------------------------
// Sign certification
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum SignVerdict {
    NonNegative,
    NonPositive,
    Mixed,
    Undetermined,
}

/// Outcome of sampling an expression's sign on an interval. The verdict is an
/// advisory gate; callers record the certificate in their reports.
#[derive(Debug, Clone, Serialize)]
pub struct SignCertificate {
    pub verdict: SignVerdict,
    /// Witness points `(t, value)`. For `Mixed` the first two carry strictly
    /// opposite signs.
    pub witnesses: Vec<(f64, f64)>,
    pub samples: usize,
    pub min_value: f64,
    pub max_value: f64,
}

impl SignCertificate {
    /// The sampled values admit `f ≥ 0` (identically-zero expressions do).
    pub fn admits_non_negative(&self) -> bool {
        self.verdict == SignVerdict::NonNegative
    }

    /// The sampled values admit `f ≤ 0` (identically-zero expressions do).
    pub fn admits_non_positive(&self) -> bool {
        self.verdict == SignVerdict::NonPositive
            || (self.verdict == SignVerdict::NonNegative && self.max_value <= SIGN_SLACK)
    }
}

const SIGN_SLACK: f64 = 1e-12;

fn sign_certify_impl(expr: &CoeffExpr, t1: f64, t2: f64, budget: usize) -> SignCertificate {
    assert!(t1 < t2, "sign_certify needs t1 < t2");
    let n = budget.max(16);
    let mid = 0.5 * (t1 + t2);
    let half = 0.5 * (t2 - t1);
    let mut pts: Vec<(f64, f64)> = Vec::with_capacity(n + 2);
    // Chebyshev nodes plus the endpoints
    for k in 0..n {
        let x = mid + half * (std::f64::consts::PI * (2.0 * k as f64 + 1.0) / (2.0 * n as f64)).cos();
        match expr.eval(x) {
            Ok(v) => pts.push((x, v)),
            Err(_) => {
                return SignCertificate {
                    verdict: SignVerdict::Undetermined,
                    witnesses: vec![],
                    samples: n,
                    min_value: f64::NAN,
                    max_value: f64::NAN,
                }
            }
        }
    }
    for x in [t1, t2] {
        if let Ok(v) = expr.eval(x) {
            pts.push((x, v));
        }
    }
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));

    let amp = pts.iter().fold(0.0f64, |m, p| m.max(p.1.abs()));
    let tol = SIGN_SLACK * amp.max(1.0);

    // refine around the extreme samples to catch narrow dips
    let refine = |seed: usize, pts: &Vec<(f64, f64)>, want_min: bool| -> Option<(f64, f64)> {
        let gap = (t2 - t1) / n as f64;
        let mut best = pts[seed];
        let mut lo = (best.0 - gap).max(t1);
        let mut hi = (best.0 + gap).min(t2);
        for _ in 0..4 {
            for k in 0..=16 {
                let x = lo + (hi - lo) * k as f64 / 16.0;
                if let Ok(v) = expr.eval(x) {
                    if (want_min && v < best.1) || (!want_min && v > best.1) {
                        best = (x, v);
                    }
                }
            }
            let w = (hi - lo) / 4.0;
            lo = (best.0 - w).max(t1);
            hi = (best.0 + w).min(t2);
        }
        Some(best)
    };
    let imin = pts.iter().enumerate().min_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(i, _)| i).unwrap();
    let imax = pts.iter().enumerate().max_by(|a, b| a.1 .1.total_cmp(&b.1 .1)).map(|(i, _)| i).unwrap();
    let min_pt = refine(imin, &pts, true).unwrap_or(pts[imin]);
    let max_pt = refine(imax, &pts, false).unwrap_or(pts[imax]);

    let has_neg = min_pt.1 < -tol;
    let has_pos = max_pt.1 > tol;
    let (verdict, witnesses) = match (has_neg, has_pos) {
        (true, true) => (SignVerdict::Mixed, vec![min_pt, max_pt]),
        (false, true) => (SignVerdict::NonNegative, vec![max_pt, min_pt]),
        (true, false) => (SignVerdict::NonPositive, vec![min_pt, max_pt]),
        // everything within slack of zero
        (false, false) => (SignVerdict::NonNegative, vec![min_pt, max_pt]),
    };
    SignCertificate { verdict, witnesses, samples: pts.len(), min_value: min_pt.1, max_value: max_pt.1 }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_grammar_forced_examples() {
        let e = CoeffExpr::parse("cos(t)").unwrap();
        assert_eq!(e.root(), &Expr::Un(Func1::Cos, Box::new(Expr::Time)));

        let e = CoeffExpr::parse("t^3*cos(t)").unwrap();
        assert_eq!(
            e.root(),
            &Expr::Mul(
                Box::new(Expr::Pow(Box::new(Expr::Time), Box::new(Expr::Const(3.0)))),
                Box::new(Expr::Un(Func1::Cos, Box::new(Expr::Time))),
            )
        );
    }

    #[test]
    fn unbalanced_paren_reports_offset() {
        let err = CoeffExpr::parse("sin(").unwrap_err();
        assert_eq!(err.offset(), 4);
    }

    #[test]
    fn unknown_identifier_reports_name() {
        match CoeffExpr::parse("2*q + 1").unwrap_err() {
            ParseError::UnknownIdentifier { name, offset } => {
                assert_eq!(name, "q");
                assert_eq!(offset, 2);
            }
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn eval_examples() {
        assert_eq!(CoeffExpr::parse("cos(t)").unwrap().eval(0.0).unwrap(), 1.0);
        assert_eq!(CoeffExpr::parse("t^2").unwrap().eval(3.0).unwrap(), 9.0);
        assert!(matches!(
            CoeffExpr::parse("1/t").unwrap().eval(0.0),
            Err(EvalError::Singular { .. })
        ));
    }

    #[test]
    fn precedence_rules() {
        let e = CoeffExpr::parse("-2^2").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), -4.0);
        let e = CoeffExpr::parse("2^-1").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 0.5);
        let e = CoeffExpr::parse("1 - 2 - 3").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), -4.0);
        let e = CoeffExpr::parse("2^3^2").unwrap();
        assert_eq!(e.eval(0.0).unwrap(), 512.0); // right-assoc
        let e = CoeffExpr::parse("min(t, 2) + max(t, 3)").unwrap();
        assert_eq!(e.eval(5.0).unwrap(), 2.0 + 5.0);
    }

    #[test]
    fn render_round_trips() {
        for src in [
            "cos(t)",
            "t^3*cos(t)",
            "-t^2 + 3*t - 1/(t + 2)",
            "exp(-2*t)*sin(t/2)",
            "min(1, max(t, -1))",
            "2^-t",
            "-(t + 1)*(t - 1)",
            "abs(sin(t))^1.5",
        ] {
            let a = CoeffExpr::parse(src).unwrap();
            let b = CoeffExpr::parse(&a.render()).unwrap();
            assert_eq!(a.root(), b.root(), "round-trip failed for `{src}` -> `{}`", a.render());
        }
    }

    #[test]
    fn sign_certificates() {
        let sq = CoeffExpr::parse("sin(t)^2").unwrap();
        assert_eq!(sq.sign_certify(0.0, 100.0, 256).verdict, SignVerdict::NonNegative);

        let c = CoeffExpr::parse("cos(t)").unwrap();
        let cert = c.sign_certify(0.0, 100.0, 256);
        assert_eq!(cert.verdict, SignVerdict::Mixed);
        let (w0, w1) = (cert.witnesses[0], cert.witnesses[1]);
        assert!(w0.1 < 0.0 && w1.1 > 0.0);

        let tc = CoeffExpr::parse("t^3*cos(t)").unwrap();
        assert_eq!(tc.sign_certify(1.0, 50.0, 256).verdict, SignVerdict::Mixed);

        let negsq = CoeffExpr::parse("-(sin(t)^2)").unwrap();
        assert_eq!(negsq.sign_certify(0.0, 100.0, 256).verdict, SignVerdict::NonPositive);
    }

    #[test]
    fn narrow_dip_is_found() {
        // positive except for a sharp dip near t = 5
        let e = CoeffExpr::parse("1 - 2*exp(-200*(t - 5)^2)").unwrap();
        let cert = e.sign_certify(0.0, 10.0, 64);
        assert_eq!(cert.verdict, SignVerdict::Mixed);
    }
}
