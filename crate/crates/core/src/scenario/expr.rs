//! Arithmetic expressions over `x`, `y`, `z`, `t` for field definitions.
//!
//! Grammar:
//!
//! ```text
//! expr    = term (("+" | "-") term)*
//! term    = unary (("*" | "/") unary)*
//! unary   = "-" unary | power
//! power   = atom ("^" unary)?
//! atom    = number | "x" | "y" | "z" | "t" | "pi" | func "(" expr ")" | "(" expr ")"
//! func    = "sin" | "cos" | "exp" | "sqrt" | "abs"
//! ```

use std::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Number(f64),
    Var(usize),
    Neg(Box<Expr>),
    Binary(Op, Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Op {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Sqrt,
    Abs,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub position: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} at character {}", self.message, self.position + 1)
    }
}

impl std::error::Error for ParseError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Sym(char),
}

fn tokenize(src: &str) -> Result<Vec<(usize, Token)>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() || c == '.' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                i += 1;
            }
            if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                let mut j = i + 1;
                if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                    j += 1;
                }
                if j < chars.len() && chars[j].is_ascii_digit() {
                    i = j;
                    while i < chars.len() && chars[i].is_ascii_digit() {
                        i += 1;
                    }
                }
            }
            let text: String = chars[start..i].iter().collect();
            let v = text
                .parse::<f64>()
                .map_err(|_| ParseError { position: start, message: format!("malformed number `{text}`") })?;
            out.push((start, Token::Num(v)));
        } else if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push((start, Token::Ident(chars[start..i].iter().collect())));
        } else if "+-*/^()".contains(c) {
            out.push((i, Token::Sym(c)));
            i += 1;
        } else {
            return Err(ParseError { position: i, message: format!("unexpected character `{c}`") });
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(usize, Token)>,
    pos: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(_, t)| t)
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |(p, _)| *p)
    }

    fn error<T>(&self, message: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError { position: self.here(), message: message.into() })
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(&Token::Sym(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            let op = if self.eat('+') {
                Op::Add
            } else if self.eat('-') {
                Op::Sub
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.term()?));
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            let op = if self.eat('*') {
                Op::Mul
            } else if self.eat('/') {
                Op::Div
            } else {
                return Ok(lhs);
            };
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(self.unary()?));
        }
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        let base = self.atom()?;
        if self.eat('^') {
            return Ok(Expr::Binary(Op::Pow, Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr, ParseError> {
        match self.peek().cloned() {
            Some(Token::Num(v)) => {
                self.pos += 1;
                Ok(Expr::Number(v))
            }
            Some(Token::Sym('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !self.eat(')') {
                    return self.error("expected `)`");
                }
                Ok(e)
            }
            Some(Token::Ident(name)) => {
                let func = match name.as_str() {
                    "x" => Some(Expr::Var(0)),
                    "y" => Some(Expr::Var(1)),
                    "z" => Some(Expr::Var(2)),
                    "t" => Some(Expr::Var(3)),
                    "pi" => Some(Expr::Number(std::f64::consts::PI)),
                    _ => None,
                };
                if let Some(e) = func {
                    self.pos += 1;
                    return Ok(e);
                }
                let f = match name.as_str() {
                    "sin" => Func::Sin,
                    "cos" => Func::Cos,
                    "exp" => Func::Exp,
                    "sqrt" => Func::Sqrt,
                    "abs" => Func::Abs,
                    _ => return self.error(format!("unknown name `{name}`")),
                };
                self.pos += 1;
                if !self.eat('(') {
                    return self.error(format!("expected `(` after `{name}`"));
                }
                let arg = self.expr()?;
                if !self.eat(')') {
                    return self.error("expected `)`");
                }
                Ok(Expr::Call(f, Box::new(arg)))
            }
            Some(Token::Sym(c)) => self.error(format!("unexpected `{c}`")),
            None => self.error("unexpected end of expression"),
        }
    }
}

impl Expr {
    pub fn parse(src: &str) -> Result<Self, ParseError> {
        let tokens = tokenize(src)?;
        let mut p = Parser { tokens, pos: 0, end: src.chars().count() };
        let e = p.expr()?;
        if p.pos != p.tokens.len() {
            return p.error("unexpected trailing input");
        }
        Ok(e)
    }

    /// Value at point `x` and time `t`.
    pub fn eval(&self, x: [f64; 3], t: f64) -> f64 {
        match self {
            Expr::Number(v) => *v,
            Expr::Var(i) => {
                if *i < 3 {
                    x[*i]
                } else {
                    t
                }
            }
            Expr::Neg(e) => -e.eval(x, t),
            Expr::Binary(op, a, b) => {
                let (a, b) = (a.eval(x, t), b.eval(x, t));
                match op {
                    Op::Add => a + b,
                    Op::Sub => a - b,
                    Op::Mul => a * b,
                    Op::Div => a / b,
                    Op::Pow => a.powf(b),
                }
            }
            Expr::Call(f, e) => {
                let v = e.eval(x, t);
                match f {
                    Func::Sin => v.sin(),
                    Func::Cos => v.cos(),
                    Func::Exp => v.exp(),
                    Func::Sqrt => v.sqrt(),
                    Func::Abs => v.abs(),
                }
            }
        }
    }

    /// True when the expression mentions `t`.
    pub fn depends_on_time(&self) -> bool {
        match self {
            Expr::Var(3) => true,
            Expr::Number(_) | Expr::Var(_) => false,
            Expr::Neg(e) | Expr::Call(_, e) => e.depends_on_time(),
            Expr::Binary(_, a, b) => a.depends_on_time() || b.depends_on_time(),
        }
    }

    /// The value if the expression is constant in space and time.
    pub fn as_constant(&self) -> Option<f64> {
        match self {
            Expr::Number(v) => Some(*v),
            Expr::Var(_) => None,
            Expr::Neg(e) => e.as_constant().map(|v| -v),
            Expr::Call(_, e) => e.as_constant().map(|_| self.eval([0.0; 3], 0.0)),
            Expr::Binary(_, a, b) => a.as_constant().and(b.as_constant()).map(|_| self.eval([0.0; 3], 0.0)),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: [f64; 3]) -> f64 {
        Expr::parse(s).unwrap().eval(x, 0.0)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", [0.0; 3]), 7.0);
        assert_eq!(ev("8 / 4 / 2", [0.0; 3]), 1.0);
        assert_eq!(ev("2 ^ 3 ^ 2", [0.0; 3]), 512.0);
        assert_eq!(ev("-2 ^ 2", [0.0; 3]), -4.0);
        assert_eq!(ev("(1 + 2) * -3", [0.0; 3]), -9.0);
    }

    #[test]
    fn variables_and_functions() {
        let v = ev("1 + 0.5*sin(2*pi*z)", [0.0, 0.0, 0.25]);
        assert!((v - 1.5).abs() < 1e-15);
        assert_eq!(ev("x*y - z", [2.0, 3.0, 1.0]), 5.0);
        assert_eq!(ev("1e-3*2", [0.0; 3]), 2e-3);
    }

    #[test]
    fn constants_detected() {
        assert_eq!(Expr::parse("2*pi").unwrap().as_constant(), Some(2.0 * std::f64::consts::PI));
        assert_eq!(Expr::parse("2*x").unwrap().as_constant(), None);
        assert!(Expr::parse("sin(t)").unwrap().depends_on_time());
    }

    #[test]
    fn errors_point_at_the_problem() {
        let e = Expr::parse("1 + foo(2)").unwrap_err();
        assert_eq!(e.position, 4);
        assert!(Expr::parse("(1 + 2").is_err());
        assert!(Expr::parse("1 2").is_err());
        assert!(Expr::parse("3 $").is_err());
    }
}
