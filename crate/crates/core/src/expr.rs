//! A small expression language over the real operations.
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | primary
//! primary := number | ident | ident '(' expr [';' int] ')' | '(' expr ')'
//! ```
//! Functions: `sqrt`, `exp`, `hexp`, `recip`. `recip(x; k)` is the reciprocal
//! under the promise `x >= 2^-k`; `/` and `recip(x)` search adaptively.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::dyadic::{parse_decimal, Dyadic};
use crate::error::{Error, Result};
use crate::real::Real;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Expr {
    /// Exact non-negative rational literal.
    Num(BigRational),
    Var(String),
    Neg(Box<Expr>),
    Sqrt(Box<Expr>),
    Exp(Box<Expr>),
    Hexp(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Recip(Box<Expr>, Option<u64>),
}

impl Expr {
    pub fn int(v: i64) -> Expr {
        Expr::Num(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn num(n: i64, d: i64) -> Expr {
        Expr::Num(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    /// Builds the lazy real; every variable must be bound in `env`.
    pub fn to_real(&self, env: &HashMap<String, Real>) -> Result<Real> {
        Ok(match self {
            Expr::Num(q) => Real::rational(q.numer().clone(), q.denom().clone()),
            Expr::Var(v) => env
                .get(v)
                .cloned()
                .ok_or_else(|| Error::Domain(format!("unbound variable {v}")))?,
            Expr::Neg(a) => -a.to_real(env)?,
            Expr::Sqrt(a) => a.to_real(env)?.sqrt(),
            Expr::Exp(a) => a.to_real(env)?.exp(),
            Expr::Hexp(a) => a.to_real(env)?.hexp(),
            Expr::Add(a, b) => a.to_real(env)? + b.to_real(env)?,
            Expr::Sub(a, b) => a.to_real(env)? - b.to_real(env)?,
            Expr::Mul(a, b) => a.to_real(env)? * b.to_real(env)?,
            Expr::Div(a, b) => a.to_real(env)? / b.to_real(env)?,
            Expr::Recip(a, None) => a.to_real(env)?.recip(),
            Expr::Recip(a, Some(k)) => a.to_real(env)?.recip_enriched(*k),
        })
    }

    pub fn free_vars(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(&mut out);
        out
    }

    fn collect_vars(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Num(_) => {}
            Expr::Var(v) => {
                out.insert(v.clone());
            }
            Expr::Neg(a) | Expr::Sqrt(a) | Expr::Exp(a) | Expr::Hexp(a) | Expr::Recip(a, _) => a.collect_vars(out),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_vars(out);
                b.collect_vars(out);
            }
        }
    }
}

/// Fully parenthesized; literals print as exact decimals where possible, so
/// every literal the parser produces reads back unchanged.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => write_literal(f, q),
            Expr::Var(v) => write!(f, "{v}"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Sqrt(a) => write!(f, "sqrt({a})"),
            Expr::Exp(a) => write!(f, "exp({a})"),
            Expr::Hexp(a) => write!(f, "hexp({a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Recip(a, None) => write!(f, "recip({a})"),
            Expr::Recip(a, Some(k)) => write!(f, "recip({a}; {k})"),
        }
    }
}

fn write_literal(f: &mut fmt::Formatter<'_>, q: &BigRational) -> fmt::Result {
    if q.is_integer() {
        return write!(f, "{}", q.numer());
    }
    let (num, den) = (q.numer(), q.denom());
    // Terminating decimal iff den = 2^a 5^b.
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut rest = den.clone();
    let (mut a, mut b) = (0u32, 0u32);
    while (&rest % &two).is_zero() {
        rest /= &two;
        a += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        b += 1;
    }
    if !rest.is_one() {
        return write!(f, "({num}/{den})");
    }
    let digits = a.max(b);
    let scaled = num * BigInt::from(10u32).pow(digits) / den;
    let s = crate::dyadic::format_fixed(&scaled, digits as usize);
    write!(f, "{s}")
}

struct Parser<'a> {
    src: &'a str,
    pos: usize,
}

/// Parses an expression; errors carry the byte offset of the problem.
pub fn parse_expr(src: &str) -> Result<Expr> {
    let mut p = Parser { src, pos: 0 };
    let e = p.expr()?;
    p.skip_ws();
    if p.pos < src.len() {
        return Err(Error::parse(p.pos, format!("unexpected '{}'", p.peek_char().unwrap_or(' '))));
    }
    Ok(e)
}

impl<'a> Parser<'a> {
    fn rest(&self) -> &'a str {
        &self.src[self.pos..]
    }

    fn peek_char(&self) -> Option<char> {
        self.rest().chars().next()
    }

    fn skip_ws(&mut self) {
        let trimmed = self.rest().trim_start();
        self.pos = self.src.len() - trimmed.len();
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.peek_char()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += c.len_utf8();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, c: char) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            match self.peek() {
                Some(found) => Err(Error::parse(self.pos, format!("expected '{c}', found '{found}'"))),
                None => Err(Error::parse(self.pos, format!("expected '{c}', found end of input"))),
            }
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.unary()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.unary()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(Error::parse(self.pos, "unexpected end of input")),
            Some('(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.ident(),
            Some(c) => Err(Error::parse(self.pos, format!("unexpected '{c}'"))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src.as_bytes();
        let mut end = start;
        while end < bytes.len() && (bytes[end].is_ascii_digit() || bytes[end] == b'.') {
            end += 1;
        }
        if end < bytes.len() && (bytes[end] == b'e' || bytes[end] == b'E') {
            let mut k = end + 1;
            if k < bytes.len() && (bytes[k] == b'+' || bytes[k] == b'-') {
                k += 1;
            }
            if k < bytes.len() && bytes[k].is_ascii_digit() {
                while k < bytes.len() && bytes[k].is_ascii_digit() {
                    k += 1;
                }
                end = k;
            }
        }
        let text = &self.src[start..end];
        let value = parse_scientific(text).ok_or_else(|| Error::parse(start, format!("malformed number '{text}'")))?;
        self.pos = end;
        Ok(Expr::Num(value))
    }

    fn ident(&mut self) -> Result<Expr> {
        let start = self.pos;
        let len = self
            .rest()
            .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
            .unwrap_or(self.rest().len());
        let name = &self.src[start..start + len];
        self.pos += len;
        let func = matches!(name, "sqrt" | "exp" | "hexp" | "recip");
        if !func {
            return Ok(Expr::Var(name.to_string()));
        }
        if self.peek() != Some('(') {
            return Err(Error::parse(self.pos, format!("expected '(' after {name}")));
        }
        self.pos += 1;
        let arg = Box::new(self.expr()?);
        let e = match name {
            "sqrt" => Expr::Sqrt(arg),
            "exp" => Expr::Exp(arg),
            "hexp" => Expr::Hexp(arg),
            _ => {
                if self.eat(';') {
                    self.skip_ws();
                    let at = self.pos;
                    let digits = self.rest().find(|c: char| !c.is_ascii_digit()).unwrap_or(self.rest().len());
                    let k = self.rest()[..digits]
                        .parse::<u64>()
                        .map_err(|_| Error::parse(at, "enrichment must be a non-negative integer"))?;
                    self.pos += digits;
                    Expr::Recip(arg, Some(k))
                } else {
                    Expr::Recip(arg, None)
                }
            }
        };
        self.expect(')')?;
        Ok(e)
    }
}

/// `digits[.digits][e[+-]digits]` as an exact rational.
fn parse_scientific(text: &str) -> Option<BigRational> {
    let (mantissa, exp) = match text.find(['e', 'E']) {
        Some(i) => (&text[..i], text[i + 1..].parse::<i32>().ok()?),
        None => (text, 0),
    };
    let (num, den) = parse_decimal(mantissa).ok()?;
    let scale = BigInt::from(10u32).pow(exp.unsigned_abs());
    Some(if exp >= 0 {
        BigRational::new(num * scale, den)
    } else {
        BigRational::new(num, den * scale)
    })
}

/// Parses a numeric literal: `p/q`, a decimal, or `m*2^e` (signs allowed).
pub fn parse_number(src: &str) -> Result<BigRational> {
    let t = src.trim();
    if t.contains('*') {
        let d: Dyadic = t.parse()?;
        let (n, den) = d.to_ratio();
        return Ok(BigRational::new(n, den));
    }
    if let Some((a, b)) = t.split_once('/') {
        let (an, ad) = parse_decimal(a.trim())?;
        let (bn, bd) = parse_decimal(b.trim())?;
        if bn.is_zero() {
            return Err(Error::parse(a.len() + 1, "zero denominator"));
        }
        return Ok(BigRational::new(an * bd, ad * bn));
    }
    let (n, d) = parse_decimal(t)?;
    Ok(BigRational::new(n, d))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::real::EvalConfig;

    fn b(e: Expr) -> Box<Expr> {
        Box::new(e)
    }

    #[test]
    fn parse_examples() {
        assert_eq!(
            parse_expr("1/3 + 2/3").unwrap(),
            Expr::Add(b(Expr::Div(b(Expr::int(1)), b(Expr::int(3)))), b(Expr::Div(b(Expr::int(2)), b(Expr::int(3)))))
        );
        assert_eq!(parse_expr("exp(sqrt(2))").unwrap(), Expr::Exp(b(Expr::Sqrt(b(Expr::int(2))))));
        assert_eq!(parse_expr("hexp(0.5)").unwrap(), Expr::Hexp(b(Expr::num(1, 2))));
        assert_eq!(parse_expr("recip(x; 5)").unwrap(), Expr::Recip(b(Expr::Var("x".into())), Some(5)));
        assert_eq!(
            parse_expr("-2*3-4").unwrap(),
            Expr::Sub(b(Expr::Mul(b(Expr::Neg(b(Expr::int(2)))), b(Expr::int(3)))), b(Expr::int(4)))
        );
        assert_eq!(parse_expr("1.5e2").unwrap(), Expr::int(150));
    }

    #[test]
    fn parse_errors_have_offsets() {
        let cases = [("1 +", 3), ("(1", 2), ("1 $ 2", 2), ("sqrt 2", 5), ("recip(1; x)", 9), ("1..2", 0)];
        for (src, at) in cases {
            match parse_expr(src) {
                Err(Error::Parse { offset, .. }) => assert_eq!(offset, at, "{src}"),
                other => panic!("{src}: {other:?}"),
            }
        }
    }

    #[test]
    fn printing_round_trips() {
        for src in ["1/3+2/3", "exp(sqrt(2)) * -x", "recip(0.25; 2) - hexp(0.125)", "((1))", "0.001 / 7"] {
            let e = parse_expr(src).unwrap();
            assert_eq!(parse_expr(&e.to_string()).unwrap(), e, "{src}");
        }
    }

    #[test]
    fn evaluation() {
        let cfg = EvalConfig::default();
        let env = HashMap::new();
        let r = parse_expr("1/3 + 2/3").unwrap().to_real(&env).unwrap();
        assert_eq!(r.to_decimal(5, &cfg).unwrap(), "1.00000");
        let mut env = HashMap::new();
        env.insert("t".to_string(), Real::rational(1, 4));
        let r = parse_expr("t*(1-t)").unwrap().to_real(&env).unwrap();
        assert_eq!(r.to_decimal(4, &cfg).unwrap(), "0.1875");
        assert!(parse_expr("y").unwrap().to_real(&env).is_err());
        assert_eq!(parse_expr("t + exp(u)").unwrap().free_vars().len(), 2);
    }

    #[test]
    fn numeric_literals() {
        assert_eq!(parse_number("15/4").unwrap(), BigRational::new(15.into(), 4.into()));
        assert_eq!(parse_number("0.5").unwrap(), BigRational::new(1.into(), 2.into()));
        assert_eq!(parse_number("3*2^-2").unwrap(), BigRational::new(3.into(), 4.into()));
        assert_eq!(parse_number("-7").unwrap(), BigRational::from_integer((-7).into()));
        assert!(parse_number("1/0").is_err());
        assert!(parse_number("abc").is_err());
    }
}
