//! Sparse multivariate polynomials with exact rational coefficients.
//!
//! A [`Poly`] is a finite map from exponent vectors to nonzero rationals.
//! Zero coefficients are never stored, so structural equality is
//! mathematical equality.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num::{BigInt, One, Signed, Zero};

use crate::error::Error;

pub type Rational = num::BigRational;

/// Rational from a pair of machine integers. Panics on a zero denominator.
pub fn rat(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

pub fn int(value: i64) -> Rational {
    Rational::from_integer(BigInt::from(value))
}

/// Default variable names: `x, y, z` for up to three variables, `x1..xn` otherwise.
pub fn default_var_names(n: usize) -> Vec<String> {
    if n <= 3 {
        ["x", "y", "z"][..n].iter().map(|s| s.to_string()).collect()
    } else {
        (1..=n).map(|i| format!("x{i}")).collect()
    }
}

/// Exponent vector, ordered graded-lexicographically with `x_1 > x_2 > ...`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(vec![0; n])
    }

    pub fn var(n: usize, i: usize) -> Self {
        let mut e = vec![0; n];
        e[i] = 1;
        Monomial(e)
    }

    pub fn from_exponents(exps: Vec<u32>) -> Self {
        Monomial(exps)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn is_one(&self) -> bool {
        self.0.iter().all(|&e| e == 0)
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    /// All monomials in `n` variables of total degree at most `max_degree`,
    /// listed by increasing degree and, within one degree, with `x_1` first
    /// (`1, x, y, x^2, x*y, y^2, ...`).
    pub fn up_to_degree(n: usize, max_degree: u32) -> Vec<Monomial> {
        let mut out = Vec::new();
        for d in 0..=max_degree {
            let mut level = Vec::new();
            let mut cur = vec![0u32; n];
            fill_degree(&mut cur, 0, d, &mut level);
            if n == 0 && d > 0 {
                continue;
            }
            level.sort_by(|a, b| b.cmp(a));
            out.extend(level);
        }
        out
    }
}

fn fill_degree(cur: &mut Vec<u32>, pos: usize, remaining: u32, out: &mut Vec<Monomial>) {
    if pos == cur.len() {
        if remaining == 0 {
            out.push(Monomial(cur.clone()));
        }
        return;
    }
    for e in 0..=remaining {
        cur[pos] = e;
        fill_degree(cur, pos + 1, remaining - e, out);
    }
    cur[pos] = 0;
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Polynomial in a fixed number of variables over the rationals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Poly {
    num_vars: usize,
    terms: BTreeMap<Monomial, Rational>,
}

impl Poly {
    pub fn zero(num_vars: usize) -> Self {
        Poly {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn one(num_vars: usize) -> Self {
        Self::constant(num_vars, Rational::one())
    }

    pub fn constant(num_vars: usize, c: Rational) -> Self {
        Self::term(Monomial::one(num_vars), c)
    }

    pub fn from_int(num_vars: usize, c: i64) -> Self {
        Self::constant(num_vars, int(c))
    }

    /// The coordinate function `x_i`.
    pub fn var(num_vars: usize, i: usize) -> Self {
        assert!(
            i < num_vars,
            "variable index {i} out of range for {num_vars} variables"
        );
        Self::term(Monomial::var(num_vars, i), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        let num_vars = m.0.len();
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(m, c);
        }
        Poly { num_vars, terms }
    }

    /// Builds a polynomial from `(exponents, coefficient)` pairs, summing repeats.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, Rational)>,
    {
        let mut p = Poly::zero(num_vars);
        for (exps, c) in terms {
            assert_eq!(exps.len(), num_vars, "exponent vector length mismatch");
            p.add_term(Monomial(exps), c);
        }
        p
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(Monomial::is_one)
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Terms in increasing graded-lex order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &Rational)> {
        self.terms.iter()
    }

    pub fn coeff(&self, exps: &[u32]) -> Rational {
        self.terms
            .get(&Monomial(exps.to_vec()))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    /// Total degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<u32> {
        self.terms.keys().next_back().map(Monomial::degree)
    }

    fn add_term(&mut self, m: Monomial, c: Rational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
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

    pub fn scale(&self, c: &Rational) -> Poly {
        if c.is_zero() {
            return Poly::zero(self.num_vars);
        }
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, v)| (m.clone(), v * c)).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut base = self.clone();
        let mut acc = Poly::one(self.num_vars);
        while e > 0 {
            if e & 1 == 1 {
                acc = &acc * &base;
            }
            e >>= 1;
            if e > 0 {
                base = &base * &base;
            }
        }
        acc
    }

    /// Formal partial derivative with respect to `x_i`, checked.
    pub fn derivative(&self, i: usize) -> Result<Poly, Error> {
        if i >= self.num_vars {
            return Err(Error::IndexOutOfRange {
                what: "variable",
                index: i,
                bound: self.num_vars,
            });
        }
        Ok(self.partial(i))
    }

    /// Formal partial derivative with respect to `x_i`. Panics if `i` is out of range.
    pub fn partial(&self, i: usize) -> Poly {
        assert!(i < self.num_vars, "variable index out of range");
        let mut out = Poly::zero(self.num_vars);
        for (m, c) in &self.terms {
            let e = m.0[i];
            if e == 0 {
                continue;
            }
            let mut exps = m.0.clone();
            exps[i] -= 1;
            out.add_term(Monomial(exps), c * Rational::from_integer(BigInt::from(e)));
        }
        out
    }

    pub fn eval(&self, point: &[Rational]) -> Rational {
        assert_eq!(point.len(), self.num_vars, "point dimension mismatch");
        let mut acc = Rational::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(&m.0) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += t;
        }
        acc
    }

    /// Renders with the given variable names.
    pub fn display<'a>(&'a self, names: &'a [String]) -> PolyDisplay<'a> {
        PolyDisplay { poly: self, names }
    }

    pub fn to_string_with(&self, names: &[String]) -> String {
        self.display(names).to_string()
    }
}

pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub struct PolyDisplay<'a> {
    poly: &'a Poly,
    names: &'a [String],
}

impl fmt::Display for PolyDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.poly.is_zero() {
            return f.write_str("0");
        }
        for (k, (m, c)) in self.poly.terms.iter().rev().enumerate() {
            let neg = c.is_negative();
            let mag = c.abs();
            if k == 0 {
                if neg {
                    f.write_str("-")?;
                }
            } else if neg {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            let mut factors = Vec::new();
            if !mag.is_one() || m.is_one() {
                factors.push(fmt_rational(&mag));
            }
            for (i, &e) in m.0.iter().enumerate() {
                let name = self
                    .names
                    .get(i)
                    .cloned()
                    .unwrap_or_else(|| format!("x{}", i + 1));
                match e {
                    0 => {}
                    1 => factors.push(name),
                    _ => factors.push(format!("{name}^{e}")),
                }
            }
            f.write_str(&factors.join("*"))?;
        }
        Ok(())
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.num_vars);
        self.display(&names).fmt(f)
    }
}

impl AddAssign<&Poly> for Poly {
    fn add_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
}

impl SubAssign<&Poly> for Poly {
    fn sub_assign(&mut self, rhs: &Poly) {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        for (m, c) in &rhs.terms {
            self.add_term(m.clone(), -c.clone());
        }
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        assert_eq!(self.num_vars, rhs.num_vars, "variable count mismatch");
        let mut out = Poly::zero(self.num_vars);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &rhs.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly {
            num_vars: self.num_vars,
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect(),
        }
    }
}

impl Neg for Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        -&self
    }
}

macro_rules! forward_owned_binop {
    ($tr:ident, $method:ident) => {
        impl $tr<Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                (&self).$method(&rhs)
            }
        }
        impl $tr<&Poly> for Poly {
            type Output = Poly;
            fn $method(self, rhs: &Poly) -> Poly {
                (&self).$method(rhs)
            }
        }
        impl $tr<Poly> for &Poly {
            type Output = Poly;
            fn $method(self, rhs: Poly) -> Poly {
                self.$method(&rhs)
            }
        }
    };
}

forward_owned_binop!(Add, add);
forward_owned_binop!(Sub, sub);
forward_owned_binop!(Mul, mul);

impl AddAssign<Poly> for Poly {
    fn add_assign(&mut self, rhs: Poly) {
        *self += &rhs;
    }
}

impl SubAssign<Poly> for Poly {
    fn sub_assign(&mut self, rhs: Poly) {
        *self -= &rhs;
    }
}
