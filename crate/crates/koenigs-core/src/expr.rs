//! Expression mini-grammar over the variable `y`.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'y' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! func    := log | exp | sin | cos | abs | sqrt
//! ```
//!
//! `^` is right associative and binds tighter than unary minus, so
//! `-y^2` is `-(y^2)`.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use core::fmt;
// Float supplies the libm-backed methods when std is absent.
#[allow(unused_imports)]
use num_traits::Float;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Func {
    Log,
    Exp,
    Sin,
    Cos,
    Abs,
    Sqrt,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Log => "log",
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Abs => "abs",
            Func::Sqrt => "sqrt",
        }
    }

    fn lookup(s: &str) -> Option<Func> {
        Some(match s {
            "log" => Func::Log,
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "abs" => Func::Abs,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Num(f64),
    Var,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ParseError {
    pub offset: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "at byte {}: {}", self.offset, self.message)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum EvalError {
    /// Result was NaN or an operation left its domain (log of a negative, 0/0, ...).
    Domain,
    /// Result overflowed to an infinity.
    Overflow,
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalError::Domain => f.write_str("evaluation left the function's domain"),
            EvalError::Overflow => f.write_str("evaluation overflowed"),
        }
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: &str) -> Result<T, ParseError> {
        Err(ParseError { offset: self.pos, message: msg.to_string() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat(b'-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat(b'/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat(b'-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(Expr::Pow(Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek() {
            None => self.err("unexpected end of expression"),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
                    self.pos += 1;
                }
                let word = core::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
                match word {
                    "y" => Ok(Expr::Var),
                    "pi" => Ok(Expr::Num(core::f64::consts::PI)),
                    "e" => Ok(Expr::Num(core::f64::consts::E)),
                    _ => match Func::lookup(word) {
                        Some(f) => {
                            if !self.eat(b'(') {
                                return self.err("expected '(' after function name");
                            }
                            let arg = self.expr()?;
                            if !self.eat(b')') {
                                return self.err("expected ')'");
                            }
                            Ok(Expr::Call(f, Box::new(arg)))
                        }
                        None => {
                            self.pos = start;
                            self.err("unknown identifier")
                        }
                    },
                }
            }
            Some(_) => self.err("unexpected character"),
        }
    }

    fn number(&mut self) -> Result<Expr, ParseError> {
        let start = self.pos;
        let s = self.src;
        while self.pos < s.len() && (s[self.pos].is_ascii_digit() || s[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < s.len() && (s[self.pos] == b'e' || s[self.pos] == b'E') {
            // Only an exponent if digits follow; otherwise `2e` would swallow the constant.
            let mut q = self.pos + 1;
            if q < s.len() && (s[q] == b'+' || s[q] == b'-') {
                q += 1;
            }
            if q < s.len() && s[q].is_ascii_digit() {
                self.pos = q;
                while self.pos < s.len() && s[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            }
        }
        let text = core::str::from_utf8(&s[start..self.pos]).unwrap_or("");
        match text.parse::<f64>() {
            Ok(v) => Ok(Expr::Num(v)),
            Err(_) => {
                self.pos = start;
                self.err("malformed number")
            }
        }
    }
}

/// Evaluation result with a continuity flag.
///
/// `continuous` is true when every operation on the path was evaluated
/// strictly inside an open set where it is continuous, so the expression
/// is continuous at the evaluation point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Certified {
    pub value: f64,
    pub continuous: bool,
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr, ParseError> {
        let mut p = Parser { src: src.as_bytes(), pos: 0 };
        let e = p.expr()?;
        if p.peek().is_some() {
            return p.err("trailing input");
        }
        Ok(e)
    }

    pub fn constant(v: f64) -> Expr {
        Expr::Num(v)
    }

    pub fn eval(&self, y: f64) -> Result<f64, EvalError> {
        self.eval_certified(y).map(|c| c.value)
    }

    pub fn eval_certified(&self, y: f64) -> Result<Certified, EvalError> {
        let (v, ok) = self.ev(y)?;
        if v.is_nan() {
            return Err(EvalError::Domain);
        }
        if v.is_infinite() {
            return Err(EvalError::Overflow);
        }
        Ok(Certified { value: v, continuous: ok })
    }

    fn ev(&self, y: f64) -> Result<(f64, bool), EvalError> {
        let r = match self {
            Expr::Num(v) => (*v, true),
            Expr::Var => (y, true),
            Expr::Neg(a) => {
                let (a, c) = a.ev(y)?;
                (-a, c)
            }
            Expr::Add(a, b) => {
                let ((a, ca), (b, cb)) = (a.ev(y)?, b.ev(y)?);
                (a + b, ca && cb)
            }
            Expr::Sub(a, b) => {
                let ((a, ca), (b, cb)) = (a.ev(y)?, b.ev(y)?);
                (a - b, ca && cb)
            }
            Expr::Mul(a, b) => {
                let ((a, ca), (b, cb)) = (a.ev(y)?, b.ev(y)?);
                (a * b, ca && cb)
            }
            Expr::Div(a, b) => {
                let ((a, ca), (b, cb)) = (a.ev(y)?, b.ev(y)?);
                if b == 0.0 {
                    return Err(EvalError::Domain);
                }
                (a / b, ca && cb)
            }
            Expr::Pow(a, b) => {
                let ((base, ca), (ex, cb)) = (a.ev(y)?, b.ev(y)?);
                let int_exp = matches!(**b, Expr::Num(_)) && ex == ex.trunc();
                let v = if base < 0.0 && !int_exp {
                    return Err(EvalError::Domain);
                } else {
                    base.powf(ex)
                };
                let cont = if base > 0.0 {
                    true
                } else if int_exp {
                    // polynomial power, or a negative power away from zero
                    ex >= 0.0 || base != 0.0
                } else {
                    // 0^x with variable or fractional exponent
                    false
                };
                (v, ca && cb && cont)
            }
            Expr::Call(f, a) => {
                let (a, c) = a.ev(y)?;
                match f {
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::Domain);
                        }
                        (a.ln(), c)
                    }
                    Func::Exp => (a.exp(), c),
                    Func::Sin => (a.sin(), c),
                    Func::Cos => (a.cos(), c),
                    Func::Abs => (a.abs(), c),
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::Domain);
                        }
                        (a.sqrt(), c && a > 0.0)
                    }
                }
            }
        };
        if r.0.is_nan() {
            return Err(EvalError::Domain);
        }
        Ok(r)
    }

    /// True when the expression does not mention `y`.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::Var => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
        }
    }

    /// `(m, c)` with `expr(y) = m*y + c` for all sufficiently large `dir*y`
    /// (`dir` is `1.0` or `-1.0`), found by structural recursion. `abs` of an
    /// affine argument resolves its sign on the tail.
    pub fn affine_on_tail(&self, dir: f64) -> Option<(f64, f64)> {
        if self.is_constant() {
            return self.eval(0.0).ok().map(|c| (0.0, c));
        }
        match self {
            Expr::Var => Some((1.0, 0.0)),
            Expr::Neg(a) => a.affine_on_tail(dir).map(|(m, c)| (-m, -c)),
            Expr::Add(a, b) => {
                let ((ma, ca), (mb, cb)) = (a.affine_on_tail(dir)?, b.affine_on_tail(dir)?);
                Some((ma + mb, ca + cb))
            }
            Expr::Sub(a, b) => {
                let ((ma, ca), (mb, cb)) = (a.affine_on_tail(dir)?, b.affine_on_tail(dir)?);
                Some((ma - mb, ca - cb))
            }
            Expr::Mul(a, b) => {
                if a.is_constant() {
                    let k = a.eval(0.0).ok()?;
                    b.affine_on_tail(dir).map(|(m, c)| (k * m, k * c))
                } else if b.is_constant() {
                    let k = b.eval(0.0).ok()?;
                    a.affine_on_tail(dir).map(|(m, c)| (k * m, k * c))
                } else {
                    None
                }
            }
            Expr::Div(a, b) if b.is_constant() => {
                let k = b.eval(0.0).ok()?;
                if k == 0.0 {
                    return None;
                }
                a.affine_on_tail(dir).map(|(m, c)| (m / k, c / k))
            }
            Expr::Call(Func::Abs, a) => {
                let (m, c) = a.affine_on_tail(dir)?;
                if m == 0.0 {
                    Some((0.0, c.abs()))
                } else if m * dir > 0.0 {
                    Some((m, c))
                } else {
                    Some((-m, -c))
                }
            }
            _ => None,
        }
    }

    /// `expr + c`.
    pub fn plus(self, c: f64) -> Expr {
        if c == 0.0 {
            return self;
        }
        match self {
            Expr::Num(v) => Expr::Num(v + c),
            e => Expr::Add(Box::new(e), Box::new(Expr::Num(c))),
        }
    }

    /// The expression with `y` replaced by `y - d`.
    pub fn shift_var(&self, d: f64) -> Expr {
        if d == 0.0 {
            return self.clone();
        }
        match self {
            Expr::Num(v) => Expr::Num(*v),
            Expr::Var => Expr::Sub(Box::new(Expr::Var), Box::new(Expr::Num(d))),
            Expr::Neg(a) => Expr::Neg(Box::new(a.shift_var(d))),
            Expr::Call(f, a) => Expr::Call(*f, Box::new(a.shift_var(d))),
            Expr::Add(a, b) => Expr::Add(Box::new(a.shift_var(d)), Box::new(b.shift_var(d))),
            Expr::Sub(a, b) => Expr::Sub(Box::new(a.shift_var(d)), Box::new(b.shift_var(d))),
            Expr::Mul(a, b) => Expr::Mul(Box::new(a.shift_var(d)), Box::new(b.shift_var(d))),
            Expr::Div(a, b) => Expr::Div(Box::new(a.shift_var(d)), Box::new(b.shift_var(d))),
            Expr::Pow(a, b) => Expr::Pow(Box::new(a.shift_var(d)), Box::new(b.shift_var(d))),
        }
    }
}

fn write_num(f: &mut fmt::Formatter<'_>, v: f64) -> fmt::Result {
    if v < 0.0 {
        write!(f, "({:?})", v)
    } else {
        write!(f, "{:?}", v)
    }
}

/// Fully parenthesized rendering; parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write_num(f, *v),
            Expr::Var => f.write_str("y"),
            Expr::Neg(a) => write!(f, "(-{})", a),
            Expr::Add(a, b) => write!(f, "({} + {})", a, b),
            Expr::Sub(a, b) => write!(f, "({} - {})", a, b),
            Expr::Mul(a, b) => write!(f, "({} * {})", a, b),
            Expr::Div(a, b) => write!(f, "({} / {})", a, b),
            Expr::Pow(a, b) => write!(f, "({}^{})", a, b),
            Expr::Call(g, a) => write!(f, "{}({})", g.name(), a),
        }
    }
}

impl core::error::Error for ParseError {}

impl core::error::Error for EvalError {}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::format;

    fn ev(s: &str, y: f64) -> f64 {
        Expr::parse(s).unwrap().eval(y).unwrap()
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("-y^2", 3.0), -9.0);
        assert_eq!(ev("2^3^2", 0.0), 512.0);
        assert_eq!(ev("8 / 4 / 2", 0.0), 1.0);
        assert_eq!(ev("y^-1", 4.0), 0.25);
        assert!(Expr::parse("2e").is_err());
        assert_eq!(ev("1.5e2", 0.0), 150.0);
    }

    #[test]
    fn functions_and_constants() {
        assert!((ev("sin(pi/2)", 0.0) - 1.0).abs() < 1e-15);
        assert!((ev("-(log(abs(y)+3))^0.5", 0.0) + 3f64.ln().sqrt()).abs() < 1e-15);
        assert_eq!(ev("sqrt(abs(y))", -4.0), 2.0);
    }

    #[test]
    fn domain_errors() {
        let e = Expr::parse("log(y)").unwrap();
        assert_eq!(e.eval(0.0), Err(EvalError::Domain));
        assert_eq!(Expr::parse("1/y").unwrap().eval(0.0), Err(EvalError::Domain));
        assert_eq!(Expr::parse("exp(y)").unwrap().eval(1000.0), Err(EvalError::Overflow));
        assert_eq!(Expr::parse("y^0.5").unwrap().eval(-1.0), Err(EvalError::Domain));
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let err = Expr::parse("1 + foo(y)").unwrap_err();
        assert_eq!(err.offset, 4);
        assert!(Expr::parse("(1 + y").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("").is_err());
    }

    #[test]
    fn continuity_flag() {
        let e = Expr::parse("sqrt(abs(y))").unwrap();
        assert!(!e.eval_certified(0.0).unwrap().continuous);
        assert!(e.eval_certified(1.0).unwrap().continuous);
        let p = Expr::parse("y^2").unwrap();
        assert!(p.eval_certified(0.0).unwrap().continuous);
    }

    #[test]
    fn display_round_trips() {
        for s in ["-(1/abs(y))*(1-cos(1/y))", "2^-y", "-0.5*log(abs(y)+1)", "y - -3"] {
            let e = Expr::parse(s).unwrap();
            let back = Expr::parse(&format!("{}", e)).unwrap();
            assert_eq!(e, back, "{}", s);
        }
    }

    #[test]
    fn affine_tails() {
        let e = Expr::parse("abs(y)").unwrap();
        assert_eq!(e.affine_on_tail(1.0), Some((1.0, 0.0)));
        assert_eq!(e.affine_on_tail(-1.0), Some((-1.0, 0.0)));
        assert_eq!(Expr::parse("3").unwrap().affine_on_tail(1.0), Some((0.0, 3.0)));
        assert_eq!(Expr::parse("2*(y-1)/4").unwrap().affine_on_tail(1.0), Some((0.5, -0.5)));
        assert_eq!(Expr::parse("log(abs(y)+1)").unwrap().affine_on_tail(1.0), None);
    }

    #[test]
    fn shift_substitutes_variable() {
        let e = Expr::parse("y^2").unwrap().shift_var(1.0);
        assert_eq!(e.eval(3.0).unwrap(), 4.0);
        assert_eq!(Expr::parse("y").unwrap().plus(2.0).eval(1.0).unwrap(), 3.0);
    }
}
