//! Scalar expressions over state variables `x1..xn`.
//!
//! Expressions carry the system dynamics. Evaluation comes in three
//! flavours: exact point evaluation, natural interval extension (an
//! inclusion function of the exact evaluation), and forward-mode interval
//! differentiation used to bound Lipschitz constants over a box.

use crate::error::{Error, Result};
use crate::interval::{Interval, IntervalBox};

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    /// Zero-based variable index; `x1` parses to `Var(0)`.
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Power with a constant exponent.
    Pow(Box<Expr>, f64),
    Neg(Box<Expr>),
    Exp(Box<Expr>),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Min(Box<Expr>, Box<Expr>),
    Max(Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn constant(c: f64) -> Expr {
        Expr::Const(c)
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    /// Largest variable index used, plus one; zero for constant expressions.
    pub fn arity(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b)
            | Expr::Sub(a, b)
            | Expr::Mul(a, b)
            | Expr::Div(a, b)
            | Expr::Min(a, b)
            | Expr::Max(a, b) => a.arity().max(b.arity()),
            Expr::Pow(a, _) | Expr::Neg(a) | Expr::Exp(a) | Expr::Sin(a) | Expr::Cos(a) => {
                a.arity()
            }
        }
    }

    /// True if the expression is the literal constant `c` after folding.
    pub fn is_const(&self, c: f64) -> bool {
        matches!(self.fold(), Some(v) if v == c)
    }

    /// Constant-fold; `None` when a variable is reachable.
    pub fn fold(&self) -> Option<f64> {
        match self {
            Expr::Const(c) => Some(*c),
            Expr::Var(_) => None,
            Expr::Add(a, b) => Some(a.fold()? + b.fold()?),
            Expr::Sub(a, b) => Some(a.fold()? - b.fold()?),
            Expr::Mul(a, b) => Some(a.fold()? * b.fold()?),
            Expr::Div(a, b) => Some(a.fold()? / b.fold()?),
            Expr::Pow(a, p) => Some(a.fold()?.powf(*p)),
            Expr::Neg(a) => Some(-a.fold()?),
            Expr::Exp(a) => Some(a.fold()?.exp()),
            Expr::Sin(a) => Some(a.fold()?.sin()),
            Expr::Cos(a) => Some(a.fold()?.cos()),
            Expr::Min(a, b) => Some(a.fold()?.min(b.fold()?)),
            Expr::Max(a, b) => Some(a.fold()?.max(b.fold()?)),
        }
    }
}

/// Exact floating-point evaluation of `e` at `x`.
pub fn eval_point(e: &Expr, x: &[f64]) -> Result<f64> {
    Ok(match e {
        Expr::Const(c) => *c,
        Expr::Var(i) => *x
            .get(*i)
            .ok_or_else(|| Error::Domain(format!("variable x{} out of range", i + 1)))?,
        Expr::Add(a, b) => eval_point(a, x)? + eval_point(b, x)?,
        Expr::Sub(a, b) => eval_point(a, x)? - eval_point(b, x)?,
        Expr::Mul(a, b) => eval_point(a, x)? * eval_point(b, x)?,
        Expr::Div(a, b) => {
            let d = eval_point(b, x)?;
            if d == 0.0 {
                return Err(Error::Domain("division by zero".into()));
            }
            eval_point(a, x)? / d
        }
        Expr::Pow(a, p) => {
            let base = eval_point(a, x)?;
            checked_pow(base, *p)?
        }
        Expr::Neg(a) => -eval_point(a, x)?,
        Expr::Exp(a) => eval_point(a, x)?.exp(),
        Expr::Sin(a) => eval_point(a, x)?.sin(),
        Expr::Cos(a) => eval_point(a, x)?.cos(),
        Expr::Min(a, b) => eval_point(a, x)?.min(eval_point(b, x)?),
        Expr::Max(a, b) => eval_point(a, x)?.max(eval_point(b, x)?),
    })
}

fn checked_pow(base: f64, p: f64) -> Result<f64> {
    if p.fract() == 0.0 {
        if base == 0.0 && p < 0.0 {
            return Err(Error::Domain("0 raised to a negative power".into()));
        }
        return Ok(base.powi(p as i32));
    }
    if base < 0.0 {
        return Err(Error::Domain(format!(
            "negative base {base} with non-integer exponent {p}"
        )));
    }
    if base == 0.0 && p < 0.0 {
        return Err(Error::Domain("0 raised to a negative power".into()));
    }
    Ok(base.powf(p))
}

/// Natural interval extension: the result contains `{eval_point(e, x) : x in b}`.
pub fn eval_interval(e: &Expr, b: &IntervalBox) -> Result<Interval> {
    Ok(match e {
        Expr::Const(c) => Interval::point(*c),
        Expr::Var(i) => *b
            .dims
            .get(*i)
            .ok_or_else(|| Error::Domain(format!("variable x{} out of range", i + 1)))?,
        Expr::Add(a, c) => eval_interval(a, b)?.add(eval_interval(c, b)?),
        Expr::Sub(a, c) => eval_interval(a, b)?.sub(eval_interval(c, b)?),
        Expr::Mul(a, c) => eval_interval(a, b)?.mul(eval_interval(c, b)?),
        Expr::Div(a, c) => {
            let den = eval_interval(c, b)?;
            eval_interval(a, b)?
                .div(den)
                .ok_or_else(|| Error::Domain("denominator interval contains zero".into()))?
        }
        Expr::Pow(a, p) => interval_pow(eval_interval(a, b)?, *p)?,
        Expr::Neg(a) => eval_interval(a, b)?.neg(),
        Expr::Exp(a) => eval_interval(a, b)?.exp(),
        Expr::Sin(a) => eval_interval(a, b)?.sin(),
        Expr::Cos(a) => eval_interval(a, b)?.cos(),
        Expr::Min(a, c) => eval_interval(a, b)?.min_i(eval_interval(c, b)?),
        Expr::Max(a, c) => eval_interval(a, b)?.max_i(eval_interval(c, b)?),
    })
}

fn interval_pow(base: Interval, p: f64) -> Result<Interval> {
    if p.fract() == 0.0 {
        let k = p as i32;
        if k >= 0 {
            return Ok(base.powi(k));
        }
        return Interval::point(1.0)
            .div(base.powi(-k))
            .ok_or_else(|| Error::Domain("interval power crosses zero".into()));
    }
    if base.lo < 0.0 {
        return Err(Error::Domain(format!(
            "interval [{}, {}] with non-integer exponent {p} crosses negative axis",
            base.lo, base.hi
        )));
    }
    // monotone for base >= 0
    let (lo, hi) = if p >= 0.0 {
        (base.lo.powf(p), base.hi.powf(p))
    } else {
        if base.lo == 0.0 {
            return Err(Error::Domain("0 in base with negative exponent".into()));
        }
        (base.hi.powf(p), base.lo.powf(p))
    };
    Ok(Interval::new(lo, hi).outward())
}

/// Value and per-variable derivative enclosures over a box (forward mode).
#[derive(Debug, Clone)]
pub struct Dual {
    pub value: Interval,
    pub grad: Vec<Interval>,
}

fn dual_zero(n: usize, v: Interval) -> Dual {
    Dual {
        value: v,
        grad: vec![Interval::point(0.0); n],
    }
}

fn zip_grad(a: &[Interval], b: &[Interval], f: impl Fn(Interval, Interval) -> Interval) -> Vec<Interval> {
    a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
}

/// Forward-mode interval differentiation of `e` over `b`.
pub fn eval_gradient(e: &Expr, b: &IntervalBox) -> Result<Dual> {
    let n = b.dim();
    Ok(match e {
        Expr::Const(c) => dual_zero(n, Interval::point(*c)),
        Expr::Var(i) => {
            let mut d = dual_zero(n, b.dims[*i]);
            d.grad[*i] = Interval::point(1.0);
            d
        }
        Expr::Add(x, y) => {
            let (a, c) = (eval_gradient(x, b)?, eval_gradient(y, b)?);
            Dual {
                value: a.value.add(c.value),
                grad: zip_grad(&a.grad, &c.grad, |p, q| p.add(q)),
            }
        }
        Expr::Sub(x, y) => {
            let (a, c) = (eval_gradient(x, b)?, eval_gradient(y, b)?);
            Dual {
                value: a.value.sub(c.value),
                grad: zip_grad(&a.grad, &c.grad, |p, q| p.sub(q)),
            }
        }
        Expr::Mul(x, y) => {
            let (a, c) = (eval_gradient(x, b)?, eval_gradient(y, b)?);
            Dual {
                value: a.value.mul(c.value),
                grad: zip_grad(&a.grad, &c.grad, |p, q| {
                    p.mul(c.value).add(q.mul(a.value))
                }),
            }
        }
        Expr::Div(x, y) => {
            let (a, c) = (eval_gradient(x, b)?, eval_gradient(y, b)?);
            let den2 = c.value.square();
            let value = a
                .value
                .div(c.value)
                .ok_or_else(|| Error::Domain("denominator interval contains zero".into()))?;
            let grad = a
                .grad
                .iter()
                .zip(&c.grad)
                .map(|(&p, &q)| {
                    p.mul(c.value)
                        .sub(q.mul(a.value))
                        .div(den2)
                        .ok_or_else(|| Error::Domain("denominator interval contains zero".into()))
                })
                .collect::<Result<Vec<_>>>()?;
            Dual { value, grad }
        }
        Expr::Pow(x, p) => {
            let a = eval_gradient(x, b)?;
            let value = interval_pow(a.value, *p)?;
            let dfac = interval_pow(a.value, p - 1.0)?.scale(*p);
            Dual {
                value,
                grad: a.grad.iter().map(|&g| g.mul(dfac)).collect(),
            }
        }
        Expr::Neg(x) => {
            let a = eval_gradient(x, b)?;
            Dual {
                value: a.value.neg(),
                grad: a.grad.iter().map(|g| g.neg()).collect(),
            }
        }
        Expr::Exp(x) => {
            let a = eval_gradient(x, b)?;
            let v = a.value.exp();
            Dual {
                value: v,
                grad: a.grad.iter().map(|&g| g.mul(v)).collect(),
            }
        }
        Expr::Sin(x) => {
            let a = eval_gradient(x, b)?;
            let c = a.value.cos();
            Dual {
                value: a.value.sin(),
                grad: a.grad.iter().map(|&g| g.mul(c)).collect(),
            }
        }
        Expr::Cos(x) => {
            let a = eval_gradient(x, b)?;
            let s = a.value.sin().neg();
            Dual {
                value: a.value.cos(),
                grad: a.grad.iter().map(|&g| g.mul(s)).collect(),
            }
        }
        Expr::Min(x, y) | Expr::Max(x, y) => {
            let (a, c) = (eval_gradient(x, b)?, eval_gradient(y, b)?);
            let is_min = matches!(e, Expr::Min(..));
            let value = if is_min {
                a.value.min_i(c.value)
            } else {
                a.value.max_i(c.value)
            };
            // Branch certain: take the active gradient; otherwise hull both.
            let a_wins = if is_min {
                a.value.hi <= c.value.lo
            } else {
                a.value.lo >= c.value.hi
            };
            let c_wins = if is_min {
                c.value.hi <= a.value.lo
            } else {
                c.value.lo >= a.value.hi
            };
            let grad = if a_wins {
                a.grad
            } else if c_wins {
                c.grad
            } else {
                zip_grad(&a.grad, &c.grad, |p, q| p.hull(&q))
            };
            Dual { value, grad }
        }
    })
}

/// Upper bound on the Lipschitz constant of `e` over `b`, with the
/// infinity norm on inputs: `sum_j sup |de/dx_j|`.
pub fn lipschitz_bound(e: &Expr, b: &IntervalBox) -> Result<f64> {
    let d = eval_gradient(e, b)?;
    Ok(d.grad
        .iter()
        .map(|g| g.lo.abs().max(g.hi.abs()))
        .sum())
}

// ---------------------------------------------------------------------------
// Parser: infix text with x1..xn, + - * / ^, exp, sin, cos, min, max.
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
}

struct Lexer<'a> {
    src: &'a str,
    toks: Vec<(Tok, usize)>, // token with 1-based column
}

fn lex(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut toks = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let col = i + 1;
        match c {
            ' ' | '\t' => {
                i += 1;
            }
            '+' => {
                toks.push((Tok::Plus, col));
                i += 1;
            }
            '-' => {
                toks.push((Tok::Minus, col));
                i += 1;
            }
            '*' => {
                toks.push((Tok::Star, col));
                i += 1;
            }
            '/' => {
                toks.push((Tok::Slash, col));
                i += 1;
            }
            '^' => {
                toks.push((Tok::Caret, col));
                i += 1;
            }
            '(' => {
                toks.push((Tok::LParen, col));
                i += 1;
            }
            ')' => {
                toks.push((Tok::RParen, col));
                i += 1;
            }
            ',' => {
                toks.push((Tok::Comma, col));
                i += 1;
            }
            '0'..='9' | '.' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_digit() || bytes[i] == b'.' || bytes[i] == b'e'
                        || bytes[i] == b'E'
                        || ((bytes[i] == b'+' || bytes[i] == b'-')
                            && i > start
                            && (bytes[i - 1] == b'e' || bytes[i - 1] == b'E')))
                {
                    i += 1;
                }
                let text = &src[start..i];
                let v: f64 = text.parse().map_err(|_| {
                    Error::Parse(format!("invalid number '{text}' at column {}", start + 1))
                })?;
                toks.push((Tok::Num(v), start + 1));
            }
            'a'..='z' | 'A'..='Z' | '_' => {
                let start = i;
                while i < bytes.len()
                    && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                {
                    i += 1;
                }
                toks.push((Tok::Ident(src[start..i].to_string()), start + 1));
            }
            other => {
                return Err(Error::Parse(format!(
                    "unexpected character '{other}' at column {col}"
                )))
            }
        }
    }
    Ok(toks)
}

struct Parser<'a> {
    lexer: Lexer<'a>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&(Tok, usize)> {
        self.lexer.toks.get(self.pos)
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.lexer.toks.get(self.pos).cloned();
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn end_col(&self) -> usize {
        self.lexer.src.len() + 1
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        match self.next() {
            Some((t, _)) if t == tok => Ok(()),
            Some((t, col)) => Err(Error::Parse(format!(
                "expected {what} at column {col}, found {t:?}"
            ))),
            None => Err(Error::Parse(format!(
                "expected {what} at column {}, found end of input",
                self.end_col()
            ))),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some((tok, _)) = self.peek() {
            match tok {
                Tok::Plus => {
                    self.next();
                    lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Tok::Minus => {
                    self.next();
                    lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some((tok, _)) = self.peek() {
            match tok {
                Tok::Star => {
                    self.next();
                    lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
                }
                Tok::Slash => {
                    self.next();
                    lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
                }
                _ => break,
            }
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let base = self.unary()?;
        if let Some((Tok::Caret, _)) = self.peek() {
            let (_, col) = self.next().unwrap();
            let exp_expr = self.unary()?;
            let p = exp_expr.fold().ok_or_else(|| {
                Error::Parse(format!(
                    "exponent after column {col} must be a constant expression"
                ))
            })?;
            return Ok(Expr::Pow(Box::new(base), p));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<Expr> {
        match self.peek() {
            Some((Tok::Minus, _)) => {
                self.next();
                Ok(Expr::Neg(Box::new(self.unary()?)))
            }
            _ => self.atom(),
        }
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.next() {
            Some((Tok::Num(v), _)) => Ok(Expr::Const(v)),
            Some((Tok::Ident(name), col)) => {
                if let Some(rest) = name.strip_prefix('x') {
                    if let Ok(idx) = rest.parse::<usize>() {
                        if idx == 0 {
                            return Err(Error::Parse(format!(
                                "variables are 1-based; 'x0' at column {col} is invalid"
                            )));
                        }
                        return Ok(Expr::Var(idx - 1));
                    }
                }
                match name.as_str() {
                    "exp" | "sin" | "cos" => {
                        self.expect(Tok::LParen, "'('")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(match name.as_str() {
                            "exp" => Expr::Exp(Box::new(arg)),
                            "sin" => Expr::Sin(Box::new(arg)),
                            _ => Expr::Cos(Box::new(arg)),
                        })
                    }
                    "min" | "max" => {
                        self.expect(Tok::LParen, "'('")?;
                        let a = self.expr()?;
                        self.expect(Tok::Comma, "','")?;
                        let b = self.expr()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(if name == "min" {
                            Expr::Min(Box::new(a), Box::new(b))
                        } else {
                            Expr::Max(Box::new(a), Box::new(b))
                        })
                    }
                    other => Err(Error::Parse(format!(
                        "unknown identifier '{other}' at column {col}"
                    ))),
                }
            }
            Some((t, col)) => Err(Error::Parse(format!(
                "unexpected token {t:?} at column {col}"
            ))),
            None => Err(Error::Parse(format!(
                "unexpected end of expression at column {}",
                self.end_col()
            ))),
        }
    }
}

/// Parse an infix expression. Errors carry the 1-based column.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let toks = lex(src)?;
    let mut p = Parser {
        lexer: Lexer { src, toks },
        pos: 0,
    };
    let e = p.expr()?;
    if let Some((t, col)) = p.peek() {
        return Err(Error::Parse(format!(
            "trailing input {t:?} at column {col}"
        )));
    }
    Ok(e)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bx(ranges: &[(f64, f64)]) -> IntervalBox {
        IntervalBox::new(ranges.iter().map(|&(a, b)| Interval::new(a, b)).collect())
    }

    #[test]
    fn point_eval_examples() {
        let e = parse_expr("0.8*x1").unwrap();
        assert_eq!(eval_point(&e, &[0.5]).unwrap(), 0.4);
        let e = parse_expr("x1*x2").unwrap();
        assert_eq!(eval_point(&e, &[2.0, 3.0]).unwrap(), 6.0);
        let e = parse_expr("exp(x1)").unwrap();
        assert_eq!(eval_point(&e, &[0.0]).unwrap(), 1.0);
    }

    #[test]
    fn division_by_zero_is_domain_error() {
        let e = parse_expr("1/x1").unwrap();
        assert!(matches!(eval_point(&e, &[0.0]), Err(Error::Domain(_))));
        assert!(matches!(
            eval_interval(&e, &bx(&[(-1.0, 1.0)])),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn interval_eval_examples() {
        let e = parse_expr("0.8*x1").unwrap();
        let iv = eval_interval(&e, &bx(&[(-1.0, 1.0)])).unwrap();
        assert!(iv.lo <= -0.8 && -0.8 <= iv.lo + 1e-12);
        assert!(iv.hi >= 0.8 && iv.hi <= 0.8 + 1e-12);

        let e = parse_expr("x1^2").unwrap();
        let iv = eval_interval(&e, &bx(&[(-1.0, 2.0)])).unwrap();
        assert!(iv.contains(0.0) && iv.contains(4.0));
    }

    #[test]
    fn logistic_contains_sampled_range() {
        // dense-sampling oracle: x*(1-x) on [0,1] peaks at 0.25
        let e = parse_expr("x1*(1-x1)").unwrap();
        let iv = eval_interval(&e, &bx(&[(0.0, 1.0)])).unwrap();
        for k in 0..=1000 {
            let x = k as f64 / 1000.0;
            let v = eval_point(&e, &[x]).unwrap();
            assert!(iv.contains(v), "{v} not in [{}, {}]", iv.lo, iv.hi);
        }
        assert!(iv.contains(0.0) && iv.contains(0.25));
    }

    #[test]
    fn parse_error_reports_column() {
        let err = parse_expr("0.5**").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("column 5"), "unexpected message: {msg}");
    }

    #[test]
    fn pow_requires_constant_exponent() {
        assert!(parse_expr("x1^2").is_ok());
        assert!(parse_expr("2^(1+1)").is_ok());
        assert!(parse_expr("x1^x1").is_err());
    }

    #[test]
    fn lipschitz_bounds_linear_and_trig() {
        let e = parse_expr("2*x1 - x2").unwrap();
        let l = lipschitz_bound(&e, &bx(&[(0.0, 1.0), (0.0, 1.0)])).unwrap();
        assert!((l - 3.0).abs() < 1e-9);
        let e = parse_expr("sin(x1)").unwrap();
        let l = lipschitz_bound(&e, &bx(&[(-10.0, 10.0)])).unwrap();
        assert!(l >= 1.0 && l <= 1.0 + 1e-9);
    }

    #[test]
    fn min_max_gradient_hulls_branches() {
        let e = parse_expr("min(x1, 2*x1)").unwrap();
        let l = lipschitz_bound(&e, &bx(&[(-1.0, 1.0)])).unwrap();
        assert!(l >= 2.0); // hull of slopes 1 and 2
    }
}
