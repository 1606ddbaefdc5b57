use std::cmp::Ordering;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed};

use super::poly::{canonical_vars, Monomial, MultiPoly};
use super::scalar::Scalar;
use crate::error::AlgebraError;

/// Display order: ascending, last variable most significant.
fn display_order(a: &Monomial, b: &Monomial) -> Ordering {
    a.exps().iter().rev().cmp(b.exps().iter().rev())
}

fn monomial_text(vars: &[String], m: &Monomial) -> String {
    let parts: Vec<String> = vars
        .iter()
        .zip(m.exps())
        .filter(|(_, &e)| e > 0)
        .map(|(v, &e)| if e == 1 { v.clone() } else { format!("{v}^{e}") })
        .collect();
    parts.join("*")
}

/// Canonical text: integer-normalized, common denominator pulled out.
pub fn to_text<C: Scalar>(p: &MultiPoly<C>) -> String {
    if p.is_zero() {
        return "0".to_string();
    }
    let den = p.common_denominator();
    let scaled = if den.is_one() {
        p.clone()
    } else {
        p.scale(&C::from_rational(&BigRational::from_integer(den.clone())))
    };
    let mut terms: Vec<(&Monomial, &C)> = scaled.terms().collect();
    terms.sort_by(|a, b| display_order(a.0, b.0));
    let mut out = String::new();
    for (i, (m, c)) in terms.iter().enumerate() {
        let mono = monomial_text(p.vars(), m);
        let (neg, body) = match c.to_rational() {
            Some(q) => {
                let n = q.numer().clone();
                let neg = n.is_negative();
                let a = n.abs();
                if mono.is_empty() {
                    (neg, a.to_string())
                } else if a.is_one() {
                    (neg, mono)
                } else {
                    (neg, format!("{a}*{mono}"))
                }
            }
            None => {
                let t = c.compound_text();
                if mono.is_empty() {
                    (false, t)
                } else {
                    (false, format!("{t}*{mono}"))
                }
            }
        };
        if i == 0 {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        out.push_str(&body);
    }
    if den.is_one() {
        out
    } else {
        format!("({out})/{den}")
    }
}

#[derive(Debug, Clone)]
enum Tok {
    Num(BigInt),
    Ident(String),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>, AlgebraError> {
    let bytes = s.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let ch = bytes[i] as char;
        if ch.is_ascii_whitespace() {
            i += 1;
        } else if ch.is_ascii_digit() {
            let start = i;
            while i < bytes.len() && bytes[i].is_ascii_digit() {
                i += 1;
            }
            out.push((start, Tok::Num(s[start..i].parse().unwrap())));
        } else if ch.is_ascii_alphabetic() || ch == '_' {
            let start = i;
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(s[start..i].to_string())));
        } else if "+-*/^()".contains(ch) {
            out.push((i, Tok::Op(ch)));
            i += 1;
        } else {
            return Err(AlgebraError::Parse { pos: i, msg: format!("unexpected character {ch:?}") });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone)]
enum Ast {
    Num(BigInt),
    Var(String),
    Zeta(u8),
    Add(Box<Ast>, Box<Ast>),
    Sub(Box<Ast>, Box<Ast>),
    Mul(Box<Ast>, Box<Ast>),
    Div(Box<Ast>, Box<Ast>),
    Neg(Box<Ast>),
    Pow(Box<Ast>, u32),
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    len: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.1)
    }

    fn here(&self) -> usize {
        self.toks.get(self.pos).map(|t| t.0).unwrap_or(self.len)
    }

    fn err<T>(&self, msg: &str) -> Result<T, AlgebraError> {
        Err(AlgebraError::Parse { pos: self.here(), msg: msg.to_string() })
    }

    fn expr(&mut self) -> Result<Ast, AlgebraError> {
        let mut lhs = self.term()?;
        loop {
            match self.peek() {
                Some(Tok::Op('+')) => {
                    self.pos += 1;
                    lhs = Ast::Add(Box::new(lhs), Box::new(self.term()?));
                }
                Some(Tok::Op('-')) => {
                    self.pos += 1;
                    lhs = Ast::Sub(Box::new(lhs), Box::new(self.term()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> Result<Ast, AlgebraError> {
        let mut lhs = self.unary()?;
        loop {
            match self.peek() {
                Some(Tok::Op('*')) => {
                    self.pos += 1;
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Op('/')) => {
                    self.pos += 1;
                    lhs = Ast::Div(Box::new(lhs), Box::new(self.unary()?));
                }
                Some(Tok::Num(_)) | Some(Tok::Ident(_)) | Some(Tok::Op('(')) => {
                    lhs = Ast::Mul(Box::new(lhs), Box::new(self.power()?));
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn unary(&mut self) -> Result<Ast, AlgebraError> {
        match self.peek() {
            Some(Tok::Op('-')) => {
                self.pos += 1;
                Ok(Ast::Neg(Box::new(self.unary()?)))
            }
            Some(Tok::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Ast, AlgebraError> {
        let base = self.atom()?;
        if let Some(Tok::Op('^')) = self.peek() {
            self.pos += 1;
            let e = match self.peek().cloned() {
                Some(Tok::Num(n)) => {
                    self.pos += 1;
                    n
                }
                Some(Tok::Op('(')) => {
                    self.pos += 1;
                    let n = match self.peek().cloned() {
                        Some(Tok::Num(n)) => n,
                        _ => return self.err("expected exponent"),
                    };
                    self.pos += 1;
                    if !matches!(self.peek(), Some(Tok::Op(')'))) {
                        return self.err("expected )");
                    }
                    self.pos += 1;
                    n
                }
                _ => return self.err("expected exponent"),
            };
            let e: u32 = u32::try_from(e).map_err(|_| AlgebraError::Parse {
                pos: self.here(),
                msg: "exponent out of range".into(),
            })?;
            return Ok(Ast::Pow(Box::new(base), e));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Ast, AlgebraError> {
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Ast::Num(n))
            }
            Some(Tok::Ident(name)) => {
                self.pos += 1;
                Ok(match name.as_str() {
                    "zeta3" => Ast::Zeta(3),
                    "zeta4" => Ast::Zeta(4),
                    _ => Ast::Var(name),
                })
            }
            Some(Tok::Op('(')) => {
                self.pos += 1;
                let e = self.expr()?;
                if !matches!(self.peek(), Some(Tok::Op(')'))) {
                    return self.err("expected )");
                }
                self.pos += 1;
                Ok(e)
            }
            _ => self.err("expected a number, variable or ("),
        }
    }
}

fn collect_vars(a: &Ast, out: &mut Vec<String>) {
    match a {
        Ast::Var(v) => out.push(v.clone()),
        Ast::Add(x, y) | Ast::Sub(x, y) | Ast::Mul(x, y) | Ast::Div(x, y) => {
            collect_vars(x, out);
            collect_vars(y, out);
        }
        Ast::Neg(x) | Ast::Pow(x, _) => collect_vars(x, out),
        Ast::Num(_) | Ast::Zeta(_) => {}
    }
}

fn build<C: Scalar>(a: &Ast, vars: &[String]) -> Result<MultiPoly<C>, AlgebraError> {
    Ok(match a {
        Ast::Num(n) => MultiPoly::constant(vars, C::from_rational(&BigRational::from_integer(n.clone()))),
        Ast::Var(v) => MultiPoly::var(vars, v),
        Ast::Zeta(k) => {
            let z = C::zeta(*k).ok_or_else(|| AlgebraError::Malformed(format!("zeta{k} is not available")))?;
            MultiPoly::constant(vars, z)
        }
        Ast::Add(x, y) => build::<C>(x, vars)?.add(&build(y, vars)?),
        Ast::Sub(x, y) => build::<C>(x, vars)?.sub(&build(y, vars)?),
        Ast::Mul(x, y) => build::<C>(x, vars)?.mul(&build(y, vars)?),
        Ast::Neg(x) => build::<C>(x, vars)?.neg(),
        Ast::Pow(x, e) => build::<C>(x, vars)?.pow(*e),
        Ast::Div(x, y) => {
            let den = build::<C>(y, vars)?;
            if !den.is_constant() || den.is_zero() {
                return Err(AlgebraError::Malformed("division by a non-constant or zero".into()));
            }
            build::<C>(x, vars)?.div_scalar(&den.constant_term())
        }
    })
}

/// Parse polynomial text. Juxtaposition multiplies; `zeta3`/`zeta4` denote
/// roots of unity. Variables default to those that appear.
pub fn parse_poly<C: Scalar>(text: &str, vars: Option<&[&str]>) -> Result<MultiPoly<C>, AlgebraError> {
    let toks = tokenize(text)?;
    let mut parser = Parser { toks, pos: 0, len: text.len() };
    let ast = parser.expr()?;
    if parser.pos != parser.toks.len() {
        return parser.err("trailing input");
    }
    let mut found = Vec::new();
    collect_vars(&ast, &mut found);
    let names: Vec<String> = match vars {
        Some(v) => {
            for f in &found {
                if !v.contains(&f.as_str()) {
                    return Err(AlgebraError::Malformed(format!("undeclared variable {f}")));
                }
            }
            v.iter().map(|s| s.to_string()).collect()
        }
        None => found,
    };
    let vars = canonical_vars(&names);
    build(&ast, &vars)
}

impl<C: Scalar> std::fmt::Display for MultiPoly<C> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&to_text(self))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::Rational;

    #[test]
    fn example_text() {
        let p: MultiPoly<Rational> = parse_poly("p^2 + 4 p - 4q", None).unwrap();
        assert_eq!(to_text(&p), "4*p + p^2 - 4*q");
    }

    #[test]
    fn denominators_pulled_out() {
        let p: MultiPoly<Rational> = parse_poly("11 + 7u + u^2/2", None).unwrap();
        assert_eq!(to_text(&p), "(22 + 14*u + u^2)/2");
        let back: MultiPoly<Rational> = parse_poly(&to_text(&p), None).unwrap();
        assert_eq!(back, p);
    }

    #[test]
    fn parse_errors() {
        assert!(parse_poly::<Rational>("p +", None).is_err());
        assert!(parse_poly::<Rational>("p / q", None).is_err());
        assert!(parse_poly::<Rational>("zeta3", None).is_err());
    }
}
