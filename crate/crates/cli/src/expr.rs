//! Arithmetic expressions for custom coefficient families.
//!
//! The grammar is deliberately tiny so a config file can be audited at a
//! glance: binary + - * /, unary minus, the functions sin/cos/tan/exp/ln,
//! the time variable t, the named constants m, omega, pi, numeric literals,
//! and parentheses. Nothing else parses.

use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
}

impl Func {
    fn apply(self, x: f64) -> f64 {
        match self {
            Func::Sin => x.sin(),
            Func::Cos => x.cos(),
            Func::Tan => x.tan(),
            Func::Exp => x.exp(),
            Func::Ln => x.ln(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Time,
    Mass,
    Omega,
    Pi,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    /// Evaluates with the given bindings. Division by zero and ln of a
    /// nonpositive value follow IEEE semantics; the symplectic gate downstream
    /// rejects the resulting non-finite matrices.
    pub fn eval(&self, t: f64, mass: f64, omega: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::Time => t,
            Expr::Mass => mass,
            Expr::Omega => omega,
            Expr::Pi => std::f64::consts::PI,
            Expr::Neg(e) => -e.eval(t, mass, omega),
            Expr::Add(l, r) => l.eval(t, mass, omega) + r.eval(t, mass, omega),
            Expr::Sub(l, r) => l.eval(t, mass, omega) - r.eval(t, mass, omega),
            Expr::Mul(l, r) => l.eval(t, mass, omega) * r.eval(t, mass, omega),
            Expr::Div(l, r) => l.eval(t, mass, omega) / r.eval(t, mass, omega),
            Expr::Call(f, e) => f.apply(e.eval(t, mass, omega)),
        }
    }
}

/// Parse failure with the byte offset of the offending token.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ExprError {
    pub message: String,
    pub at: usize,
}

impl fmt::Display for ExprError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at byte {})", self.message, self.at)
    }
}

impl std::error::Error for ExprError {}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Name(String),
    Plus,
    Minus,
    Star,
    Slash,
    LParen,
    RParen,
}

fn lex(src: &str) -> Result<Vec<(Token, usize)>, ExprError> {
    let bytes = src.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let start = i;
        let c = bytes[i] as char;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' => {
                tokens.push((Token::Plus, start));
                i += 1;
            }
            '-' => {
                tokens.push((Token::Minus, start));
                i += 1;
            }
            '*' => {
                tokens.push((Token::Star, start));
                i += 1;
            }
            '/' => {
                tokens.push((Token::Slash, start));
                i += 1;
            }
            '(' => {
                tokens.push((Token::LParen, start));
                i += 1;
            }
            ')' => {
                tokens.push((Token::RParen, start));
                i += 1;
            }
            '0'..='9' | '.' => {
                while i < bytes.len() && matches!(bytes[i] as char, '0'..='9' | '.') {
                    i += 1;
                }
                // Optional exponent, only when something numeric follows the e.
                if i < bytes.len() && matches!(bytes[i] as char, 'e' | 'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && matches!(bytes[j] as char, '+' | '-') {
                        j += 1;
                    }
                    if j < bytes.len() && (bytes[j] as char).is_ascii_digit() {
                        i = j;
                        while i < bytes.len() && (bytes[i] as char).is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let value = text.parse::<f64>().map_err(|_| ExprError {
                    message: format!("malformed number '{text}'"),
                    at: start,
                })?;
                tokens.push((Token::Num(value), start));
            }
            'a'..='z' | 'A'..='Z' => {
                while i < bytes.len() && (bytes[i] as char).is_ascii_alphabetic() {
                    i += 1;
                }
                tokens.push((Token::Name(src[start..i].to_string()), start));
            }
            _ => {
                return Err(ExprError {
                    message: format!("unexpected character '{c}'"),
                    at: start,
                })
            }
        }
    }
    Ok(tokens)
}

struct Parser {
    tokens: Vec<(Token, usize)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn at(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.len, |(_, p)| *p)
    }

    fn bump(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).map(|(t, _)| t.clone());
        self.pos += 1;
        t
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ExprError> {
        if self.peek() == Some(&want) {
            self.pos += 1;
            Ok(())
        } else {
            Err(ExprError { message: format!("expected {what}"), at: self.at() })
        }
    }

    fn sum(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.product()?;
        loop {
            match self.peek() {
                Some(Token::Plus) => {
                    self.pos += 1;
                    left = Expr::Add(Box::new(left), Box::new(self.product()?));
                }
                Some(Token::Minus) => {
                    self.pos += 1;
                    left = Expr::Sub(Box::new(left), Box::new(self.product()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn product(&mut self) -> Result<Expr, ExprError> {
        let mut left = self.unary()?;
        loop {
            match self.peek() {
                Some(Token::Star) => {
                    self.pos += 1;
                    left = Expr::Mul(Box::new(left), Box::new(self.unary()?));
                }
                Some(Token::Slash) => {
                    self.pos += 1;
                    left = Expr::Div(Box::new(left), Box::new(self.unary()?));
                }
                _ => return Ok(left),
            }
        }
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if self.peek() == Some(&Token::Minus) {
            self.pos += 1;
            Ok(Expr::Neg(Box::new(self.unary()?)))
        } else {
            self.atom()
        }
    }

    fn atom(&mut self) -> Result<Expr, ExprError> {
        let at = self.at();
        match self.bump() {
            Some(Token::Num(v)) => Ok(Expr::Num(v)),
            Some(Token::LParen) => {
                let inner = self.sum()?;
                self.expect(Token::RParen, "')'")?;
                Ok(inner)
            }
            Some(Token::Name(name)) => match name.as_str() {
                "t" => Ok(Expr::Time),
                "m" => Ok(Expr::Mass),
                "omega" => Ok(Expr::Omega),
                "pi" => Ok(Expr::Pi),
                "sin" | "cos" | "tan" | "exp" | "ln" => {
                    let f = match name.as_str() {
                        "sin" => Func::Sin,
                        "cos" => Func::Cos,
                        "tan" => Func::Tan,
                        "exp" => Func::Exp,
                        _ => Func::Ln,
                    };
                    self.expect(Token::LParen, &format!("'(' after {name}"))?;
                    let arg = self.sum()?;
                    self.expect(Token::RParen, "')'")?;
                    Ok(Expr::Call(f, Box::new(arg)))
                }
                _ => Err(ExprError {
                    message: format!(
                        "unknown name '{name}' (allowed: t, m, omega, pi, sin, cos, tan, exp, ln)"
                    ),
                    at,
                }),
            },
            _ => Err(ExprError { message: "expected a value".into(), at }),
        }
    }
}

/// Parses one expression; the whole input must be consumed.
pub fn parse(src: &str) -> Result<Expr, ExprError> {
    let tokens = lex(src)?;
    if tokens.is_empty() {
        return Err(ExprError { message: "empty expression".into(), at: 0 });
    }
    let mut p = Parser { tokens, pos: 0, len: src.len() };
    let expr = p.sum()?;
    if p.peek().is_some() {
        return Err(ExprError { message: "unexpected trailing input".into(), at: p.at() });
    }
    Ok(expr)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval(src: &str, t: f64) -> f64 {
        parse(src).unwrap().eval(t, 1.0, 1.0)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval("1+2*3", 0.0), 7.0);
        assert_eq!(eval("(1+2)*3", 0.0), 9.0);
        assert_eq!(eval("1-2-3", 0.0), -4.0);
        assert_eq!(eval("8/4/2", 0.0), 1.0);
        assert_eq!(eval("-2*3", 0.0), -6.0);
        assert_eq!(eval("--2", 0.0), 2.0);
        assert_eq!(eval("2-(-3)", 0.0), 5.0);
    }

    #[test]
    fn numbers_parse_with_exponents() {
        assert_eq!(eval("0.5", 0.0), 0.5);
        assert_eq!(eval("1e-3", 0.0), 1e-3);
        assert_eq!(eval("2.5E2", 0.0), 250.0);
        assert_eq!(eval(".25", 0.0), 0.25);
    }

    #[test]
    fn names_and_functions_evaluate() {
        assert!((eval("sin(pi/2)", 0.0) - 1.0).abs() < 1e-15);
        assert!((eval("cos(t)", 0.3) - 0.3f64.cos()).abs() < 1e-15);
        assert!((eval("exp(ln(7))", 0.0) - 7.0).abs() < 1e-12);
        assert!((eval("tan(0.4)", 0.0) - 0.4f64.tan()).abs() < 1e-15);
        let e = parse("-sin(omega*t)/(m*omega)").unwrap();
        let (t, m, w) = (0.7, 2.0, 1.3);
        assert!((e.eval(t, m, w) + (w * t).sin() / (m * w)).abs() < 1e-15);
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(eval(" 1 +  2\t*\n3 ", 0.0), 7.0);
    }

    #[test]
    fn rejects_malformed_input() {
        for bad in ["", "2+", "sin", "sin 2", "foo(t)", "1..2", "(1+2", "1)", "t t", "2 @ 3"] {
            assert!(parse(bad).is_err(), "'{bad}' should not parse");
        }
    }

    #[test]
    fn error_reports_the_position() {
        let err = parse("1+foo").unwrap_err();
        assert_eq!(err.at, 2);
        assert!(err.message.contains("foo"));
    }
}
