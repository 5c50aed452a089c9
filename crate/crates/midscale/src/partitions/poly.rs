use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Signed, Zero};

/// Exponent triple (e_n, e_m, e_p).
pub type Exp = [u32; 3];

pub const N: usize = 0;
pub const M: usize = 1;
pub const P: usize = 2;

const NAMES: [&str; 3] = ["n", "m", "p"];

/// Exact polynomial in the formal variables n, m, p with rational coefficients.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct RationalPoly {
    terms: BTreeMap<Exp, BigRational>,
}

pub fn rat(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(x: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(x))
}

impl RationalPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(BigRational::one())
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, [0, 0, 0])
    }

    pub fn monomial(c: BigRational, e: Exp) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(e, c);
        }
        Self { terms }
    }

    pub fn var(i: usize) -> Self {
        let mut e = [0, 0, 0];
        e[i] = 1;
        Self::monomial(BigRational::one(), e)
    }

    pub fn n() -> Self {
        Self::var(N)
    }

    pub fn m() -> Self {
        Self::var(M)
    }

    pub fn p() -> Self {
        Self::var(P)
    }

    /// `var + c`
    pub fn var_plus(i: usize, c: i64) -> Self {
        &Self::var(i) + &Self::constant(int(c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exp, &BigRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, e: Exp) -> BigRational {
        self.terms.get(&e).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e[0] + e[1] + e[2]).max()
    }

    pub fn degree_in(&self, i: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[i]).max()
    }

    pub fn add_term(&mut self, e: Exp, c: BigRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(e) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn add_assign_ref(&mut self, other: &Self) {
        for (e, c) in &other.terms {
            self.add_term(*e, c.clone());
        }
    }

    /// self += c * other
    pub fn add_scaled(&mut self, other: &Self, c: &BigRational) {
        if c.is_zero() {
            return;
        }
        for (e, x) in &other.terms {
            self.add_term(*e, x * c);
        }
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self { terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect() }
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut out = Self::one();
        for _ in 0..k {
            out = &out * self;
        }
        out
    }

    /// Multiplies by n^a m^b p^c.
    pub fn shift(&self, e: Exp) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, x)| ([k[0] + e[0], k[1] + e[1], k[2] + e[2]], x.clone()))
                .collect(),
        }
    }

    /// Componentwise minimum exponent over all terms.
    pub fn min_exponents(&self) -> Exp {
        let mut out = [u32::MAX; 3];
        for e in self.terms.keys() {
            for i in 0..3 {
                out[i] = out[i].min(e[i]);
            }
        }
        if self.terms.is_empty() {
            [0, 0, 0]
        } else {
            out
        }
    }

    /// Divides by n^a m^b p^c; panics if some term is not divisible.
    pub fn unshift(&self, e: Exp) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, x)| {
                    assert!(k[0] >= e[0] && k[1] >= e[1] && k[2] >= e[2], "monomial not divisible");
                    ([k[0] - e[0], k[1] - e[1], k[2] - e[2]], x.clone())
                })
                .collect(),
        }
    }

    pub fn eval(&self, vals: [&BigRational; 3]) -> BigRational {
        let mut powers: [Vec<BigRational>; 3] = Default::default();
        for i in 0..3 {
            let d = self.degree_in(i).unwrap_or(0) as usize;
            let mut v = Vec::with_capacity(d + 1);
            v.push(BigRational::one());
            for k in 1..=d {
                let next = &v[k - 1] * vals[i];
                v.push(next);
            }
            powers[i] = v;
        }
        let mut acc = BigRational::zero();
        for (e, c) in &self.terms {
            acc += c
                * &powers[0][e[0] as usize]
                * &powers[1][e[1] as usize]
                * &powers[2][e[2] as usize];
        }
        acc
    }

    /// Substitutes variable `i` by the polynomial `q`.
    pub fn substitute(&self, i: usize, q: &Self) -> Self {
        let d = self.degree_in(i).unwrap_or(0) as usize;
        let mut qp = vec![Self::one()];
        for k in 1..=d {
            let next = &qp[k - 1] * q;
            qp.push(next);
        }
        let mut out = Self::zero();
        for (e, c) in &self.terms {
            let mut rest = *e;
            rest[i] = 0;
            let base = qp[e[i] as usize].shift(rest);
            out.add_scaled(&base, c);
        }
        out
    }

    /// Exact division by (m - a), or None when the remainder is nonzero.
    pub fn div_m_minus(&self, a: i64) -> Option<Self> {
        // group by m-degree: self = Σ_k c_k(n,p) m^k
        let dm = match self.degree_in(M) {
            None => return Some(Self::zero()),
            Some(d) => d,
        };
        let mut by_deg: Vec<Self> = vec![Self::zero(); dm as usize + 1];
        for (e, c) in &self.terms {
            by_deg[e[M] as usize].add_term([e[0], 0, e[2]], c.clone());
        }
        // synthetic division from the top
        let a = int(a);
        let mut q: Vec<Self> = vec![Self::zero(); dm as usize];
        let mut carry = Self::zero();
        for k in (0..=dm as usize).rev() {
            let cur = &by_deg[k] + &carry;
            if k == 0 {
                if !cur.is_zero() {
                    return None;
                }
            } else {
                carry = cur.scale(&a);
                q[k - 1] = cur;
            }
        }
        let mut out = Self::zero();
        for (k, c) in q.into_iter().enumerate() {
            out.add_assign_ref(&c.shift([0, k as u32, 0]));
        }
        Some(out)
    }

    /// gcd of the coefficient numerators over the lcm of their denominators,
    /// signed like the leading term. `self / content` has coprime integer
    /// coefficients and a positive leading term.
    pub fn content(&self) -> BigRational {
        use num::Integer;
        if self.is_zero() {
            return BigRational::one();
        }
        let mut g = BigInt::zero();
        let mut l = BigInt::one();
        for c in self.terms.values() {
            g = g.gcd(c.numer());
            l = l.lcm(c.denom());
        }
        let lead = self
            .terms
            .iter()
            .max_by(|a, b| a.0.iter().sum::<u32>().cmp(&b.0.iter().sum::<u32>()).then(a.0.cmp(b.0)))
            .map(|(_, c)| c.is_negative())
            .unwrap_or(false);
        let c = BigRational::new(g, l);
        if lead {
            -c
        } else {
            c
        }
    }
}

impl Add for &RationalPoly {
    type Output = RationalPoly;
    fn add(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out.add_assign_ref(rhs);
        out
    }
}

impl Sub for &RationalPoly {
    type Output = RationalPoly;
    fn sub(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = self.clone();
        out.add_scaled(rhs, &-BigRational::one());
        out
    }
}

impl Neg for &RationalPoly {
    type Output = RationalPoly;
    fn neg(self) -> RationalPoly {
        self.scale(&-BigRational::one())
    }
}

impl Mul for &RationalPoly {
    type Output = RationalPoly;
    fn mul(self, rhs: &RationalPoly) -> RationalPoly {
        let mut out = RationalPoly::zero();
        for (e1, c1) in &self.terms {
            for (e2, c2) in &rhs.terms {
                out.add_term([e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2]], c1 * c2);
            }
        }
        out
    }
}

macro_rules! owned_ops {
    ($tr:ident, $f:ident) => {
        impl $tr for RationalPoly {
            type Output = RationalPoly;
            fn $f(self, rhs: RationalPoly) -> RationalPoly {
                (&self).$f(&rhs)
            }
        }
    };
}
owned_ops!(Add, add);
owned_ops!(Sub, sub);
owned_ops!(Mul, mul);

fn fmt_monomial(e: &Exp) -> String {
    let mut parts = Vec::new();
    for i in 0..3 {
        match e[i] {
            0 => {}
            1 => parts.push(NAMES[i].to_string()),
            k => parts.push(format!("{}^{}", NAMES[i], k)),
        }
    }
    parts.join("*")
}

impl fmt::Display for RationalPoly {
    /// Highest-degree terms first, e.g. `m*p + m + 2`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut items: Vec<(&Exp, &BigRational)> = self.terms.iter().collect();
        items.sort_by(|a, b| {
            let da = a.0.iter().sum::<u32>();
            let db = b.0.iter().sum::<u32>();
            db.cmp(&da).then(b.0.cmp(a.0))
        });
        for (k, (e, c)) in items.iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if k == 0 {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { "-" } else { "+" })?;
            }
            let mono = fmt_monomial(e);
            if mono.is_empty() {
                write!(f, "{}", a)?;
            } else if a.is_one() {
                write!(f, "{}", mono)?;
            } else {
                write!(f, "{}*{}", a, mono)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for RationalPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RationalPoly({})", self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arithmetic_and_display() {
        let a = RationalPoly::var_plus(M, -2);
        let b = RationalPoly::var_plus(M, 1);
        let prod = &a * &b;
        assert_eq!(prod.to_string(), "m^2 - m - 2");
        assert_eq!(prod.div_m_minus(2).unwrap(), b);
        assert!(prod.div_m_minus(3).is_none());
    }

    #[test]
    fn substitution() {
        // n -> m + p + 1 in n - p - 1 gives m
        let q = &(&RationalPoly::m() + &RationalPoly::p()) + &RationalPoly::one();
        let x = &(&RationalPoly::n() - &RationalPoly::p()) - &RationalPoly::one();
        assert_eq!(x.substitute(N, &q), RationalPoly::m());
    }

    #[test]
    fn content_normalizes() {
        let x = &RationalPoly::n().scale(&rat(-3, 4)) + &RationalPoly::constant(rat(3, 2));
        let c = x.content();
        let prim = x.scale(&(BigRational::one() / &c));
        assert!(prim.terms().all(|(_, c)| c.is_integer()));
    }
}
