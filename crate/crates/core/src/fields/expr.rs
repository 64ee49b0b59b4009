//! Polynomial literal grammar: integers, declared variables, `+ - * ^`, parentheses.
//! Exponents are integer literals, optionally negative (`x^-2`) for Laurent data.

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Int(i64),
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i64),
}

/// Interpretation of the grammar in some ring.
pub trait Eval {
    type Value: Clone;
    fn int(&self, n: i64) -> Result<Self::Value>;
    fn var(&self, index: usize) -> Result<Self::Value>;
    fn add(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn neg(&self, a: &Self::Value) -> Result<Self::Value>;
    fn mul(&self, a: &Self::Value, b: &Self::Value) -> Result<Self::Value>;
    fn pow(&self, a: &Self::Value, e: i64) -> Result<Self::Value>;
}

impl Expr {
    pub fn parse(src: &str, vars: &[&str]) -> Result<Expr> {
        let mut p = Parser { s: src.as_bytes(), pos: 0, vars };
        let e = p.sum()?;
        p.skip_ws();
        if p.pos < p.s.len() {
            return Err(p.err("unexpected character"));
        }
        Ok(e)
    }

    pub fn eval<E: Eval>(&self, ev: &E) -> Result<E::Value> {
        match self {
            Expr::Int(n) => ev.int(*n),
            Expr::Var(i) => ev.var(*i),
            Expr::Neg(a) => ev.neg(&a.eval(ev)?),
            Expr::Add(a, b) => ev.add(&a.eval(ev)?, &b.eval(ev)?),
            Expr::Sub(a, b) => ev.add(&a.eval(ev)?, &ev.neg(&b.eval(ev)?)?),
            Expr::Mul(a, b) => ev.mul(&a.eval(ev)?, &b.eval(ev)?),
            Expr::Pow(a, e) => ev.pow(&a.eval(ev)?, *e),
        }
    }
}

struct Parser<'a> {
    s: &'a [u8],
    pos: usize,
    vars: &'a [&'a str],
}

impl Parser<'_> {
    fn err(&self, msg: &str) -> Error {
        Error::Parse { column: self.pos + 1, message: msg.to_string() }
    }

    fn skip_ws(&mut self) {
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.s.get(self.pos).copied()
    }

    fn sum(&mut self) -> Result<Expr> {
        let mut acc = match self.peek() {
            Some(b'-') => {
                self.pos += 1;
                Expr::Neg(Box::new(self.product()?))
            }
            Some(b'+') => {
                self.pos += 1;
                self.product()?
            }
            _ => self.product()?,
        };
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    acc = Expr::Add(Box::new(acc), Box::new(self.product()?));
                }
                Some(b'-') => {
                    self.pos += 1;
                    acc = Expr::Sub(Box::new(acc), Box::new(self.product()?));
                }
                _ => return Ok(acc),
            }
        }
    }

    fn product(&mut self) -> Result<Expr> {
        let mut acc = self.power()?;
        while self.peek() == Some(b'*') {
            self.pos += 1;
            acc = Expr::Mul(Box::new(acc), Box::new(self.power()?));
        }
        Ok(acc)
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let neg = if self.peek() == Some(b'-') {
                self.pos += 1;
                true
            } else {
                false
            };
            self.skip_ws();
            let e = self.integer()?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn integer(&mut self) -> Result<i64> {
        let start = self.pos;
        while self.pos < self.s.len() && self.s[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        if start == self.pos {
            return Err(self.err("expected integer"));
        }
        std::str::from_utf8(&self.s[start..self.pos])
            .unwrap()
            .parse()
            .map_err(|_| Error::Parse { column: start + 1, message: "integer too large".into() })
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let e = self.sum()?;
                if self.peek() != Some(b')') {
                    return Err(self.err("expected ')'"));
                }
                self.pos += 1;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() => Ok(Expr::Int(self.integer()?)),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => {
                let start = self.pos;
                while self.pos < self.s.len() && (self.s[self.pos].is_ascii_alphanumeric() || self.s[self.pos] == b'_') {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.s[start..self.pos]).unwrap();
                match self.vars.iter().position(|v| *v == name) {
                    Some(i) => Ok(Expr::Var(i)),
                    None => Err(Error::Parse {
                        column: start + 1,
                        message: format!("unknown variable '{name}' (declared: {})", self.vars.join(", ")),
                    }),
                }
            }
            Some(_) => Err(self.err("unexpected character")),
            None => Err(self.err("unexpected end of input")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    struct Ints(Vec<i64>);

    impl Eval for Ints {
        type Value = i64;
        fn int(&self, n: i64) -> Result<i64> {
            Ok(n)
        }
        fn var(&self, i: usize) -> Result<i64> {
            Ok(self.0[i])
        }
        fn add(&self, a: &i64, b: &i64) -> Result<i64> {
            Ok(a + b)
        }
        fn neg(&self, a: &i64) -> Result<i64> {
            Ok(-a)
        }
        fn mul(&self, a: &i64, b: &i64) -> Result<i64> {
            Ok(a * b)
        }
        fn pow(&self, a: &i64, e: i64) -> Result<i64> {
            Ok(a.pow(e as u32))
        }
    }

    #[test]
    fn evaluates() {
        let e = Expr::parse("y^2 + 2*x*y + x", &["x", "y"]).unwrap();
        assert_eq!(e.eval(&Ints(vec![3, 5])).unwrap(), 25 + 30 + 3);
        let e = Expr::parse(" -(x - 1)*(x+1) ", &["x"]).unwrap();
        assert_eq!(e.eval(&Ints(vec![4])).unwrap(), -15);
    }

    #[test]
    fn reports_column() {
        let err = Expr::parse("x + z", &["x"]).unwrap_err();
        assert_eq!(err, Error::Parse { column: 5, message: "unknown variable 'z' (declared: x)".into() });
        assert!(matches!(Expr::parse("x +", &["x"]), Err(Error::Parse { column: 4, .. })));
    }
}
