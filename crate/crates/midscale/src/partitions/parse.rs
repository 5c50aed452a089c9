use num::{BigInt, BigRational};

use super::{RationalFunction, RationalPoly, M, N, P};
use crate::error::{Error, Result};

/// Quotient of two polynomials, as produced by the parser.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyFraction {
    pub num: RationalPoly,
    pub den: RationalPoly,
}

impl PolyFraction {
    fn poly(p: RationalPoly) -> Self {
        Self { num: p, den: RationalPoly::one() }
    }

    fn add(self, o: Self, sign: i64) -> Self {
        let rhs = &o.num * &self.den;
        let lhs = &self.num * &o.den;
        let num = if sign > 0 { &lhs + &rhs } else { &lhs - &rhs };
        Self { num, den: &self.den * &o.den }
    }

    fn mul(self, o: Self) -> Self {
        Self { num: &self.num * &o.num, den: &self.den * &o.den }
    }

    fn div(self, o: Self) -> Result<Self> {
        if o.num.is_zero() {
            return Err(Error::Domain("division by zero polynomial".into()));
        }
        Ok(Self { num: &self.num * &o.den, den: &self.den * &o.num })
    }

    /// a/b = c/d as a·d = c·b, with n, m, p independent.
    pub fn cross_eq(&self, other: &Self) -> bool {
        &self.num * &other.den == &other.num * &self.den
    }

    pub fn from_function(f: &RationalFunction) -> Self {
        Self { num: f.numerator().clone(), den: f.denominator() }
    }
}

/// Parses expressions over n, m, p such as `n*p*(m*p + m + 2)/(16*(m - 2)*(m + 1))`
/// or `5/p^2 + 2/m`.
pub fn parse_fraction(s: &str) -> Result<PolyFraction> {
    let toks = tokenize(s)?;
    let mut pos = 0;
    let f = expr(&toks, &mut pos)?;
    if pos != toks.len() {
        return Err(Error::Domain(format!("unexpected input at token {} in {:?}", pos, s)));
    }
    Ok(f)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Int(BigInt),
    Var(usize),
    Op(char),
}

fn tokenize(s: &str) -> Result<Vec<Tok>> {
    let mut out = Vec::new();
    let cs: Vec<char> = s.chars().collect();
    let mut i = 0;
    while i < cs.len() {
        let c = cs[i];
        match c {
            ' ' | '\t' => i += 1,
            '0'..='9' => {
                let start = i;
                while i < cs.len() && cs[i].is_ascii_digit() {
                    i += 1;
                }
                let digits: String = cs[start..i].iter().collect();
                out.push(Tok::Int(digits.parse().expect("digits")));
            }
            'n' => {
                out.push(Tok::Var(N));
                i += 1;
            }
            'm' => {
                out.push(Tok::Var(M));
                i += 1;
            }
            'p' => {
                out.push(Tok::Var(P));
                i += 1;
            }
            '+' | '-' | '*' | '/' | '^' | '(' | ')' => {
                out.push(Tok::Op(c));
                i += 1;
            }
            _ => return Err(Error::Domain(format!("unexpected character {:?} in {:?}", c, s))),
        }
    }
    Ok(out)
}

fn expr(t: &[Tok], pos: &mut usize) -> Result<PolyFraction> {
    let mut acc = term(t, pos)?;
    while let Some(Tok::Op(c @ ('+' | '-'))) = t.get(*pos) {
        *pos += 1;
        let rhs = term(t, pos)?;
        acc = acc.add(rhs, if *c == '+' { 1 } else { -1 });
    }
    Ok(acc)
}

fn term(t: &[Tok], pos: &mut usize) -> Result<PolyFraction> {
    let mut acc = unary(t, pos)?;
    while let Some(Tok::Op(c @ ('*' | '/'))) = t.get(*pos) {
        *pos += 1;
        let rhs = unary(t, pos)?;
        acc = if *c == '*' { acc.mul(rhs) } else { acc.div(rhs)? };
    }
    Ok(acc)
}

fn unary(t: &[Tok], pos: &mut usize) -> Result<PolyFraction> {
    if let Some(Tok::Op('-')) = t.get(*pos) {
        *pos += 1;
        let v = unary(t, pos)?;
        return Ok(PolyFraction { num: -&v.num, den: v.den });
    }
    power(t, pos)
}

fn power(t: &[Tok], pos: &mut usize) -> Result<PolyFraction> {
    let base = atom(t, pos)?;
    if let Some(Tok::Op('^')) = t.get(*pos) {
        *pos += 1;
        let e = match t.get(*pos) {
            Some(Tok::Int(k)) => u32::try_from(k.clone()).map_err(|_| Error::Domain("exponent too large".into()))?,
            _ => return Err(Error::Domain("expected integer exponent".into())),
        };
        *pos += 1;
        return Ok(PolyFraction { num: base.num.pow(e), den: base.den.pow(e) });
    }
    Ok(base)
}

fn atom(t: &[Tok], pos: &mut usize) -> Result<PolyFraction> {
    match t.get(*pos) {
        Some(Tok::Int(k)) => {
            *pos += 1;
            Ok(PolyFraction::poly(RationalPoly::constant(BigRational::from_integer(k.clone()))))
        }
        Some(Tok::Var(i)) => {
            *pos += 1;
            Ok(PolyFraction::poly(RationalPoly::var(*i)))
        }
        Some(Tok::Op('(')) => {
            *pos += 1;
            let v = expr(t, pos)?;
            if t.get(*pos) != Some(&Tok::Op(')')) {
                return Err(Error::Domain("missing closing parenthesis".into()));
            }
            *pos += 1;
            Ok(v)
        }
        other => Err(Error::Domain(format!("unexpected token {:?}", other))),
    }
}

impl PolyFraction {
    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }
}
