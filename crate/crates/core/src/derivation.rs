//! Derivations of the polynomial algebra, i.e. polynomial vector fields
//! `Σ_i D_i ∂/∂x_i`.

use std::fmt;

use crate::error::{check_dim, Error};
use crate::poly::{default_var_names, Poly};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Derivation {
    num_vars: usize,
    components: Vec<Poly>,
}

impl Derivation {
    pub fn zero(num_vars: usize) -> Self {
        Derivation {
            num_vars,
            components: vec![Poly::zero(num_vars); num_vars],
        }
    }

    /// The coordinate field `∂/∂x_i`.
    pub fn coordinate(num_vars: usize, i: usize) -> Self {
        let mut d = Self::zero(num_vars);
        d.components[i] = Poly::one(num_vars);
        d
    }

    pub fn new(num_vars: usize, components: Vec<Poly>) -> Result<Self, Error> {
        check_dim("derivation component count", num_vars, components.len())?;
        for c in &components {
            check_dim("number of variables", num_vars, c.num_vars())?;
        }
        Ok(Derivation {
            num_vars,
            components,
        })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &Poly {
        &self.components[i]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// `D(f) = Σ_i D_i ∂_i f`.
    pub fn apply(&self, f: &Poly) -> Result<Poly, Error> {
        check_dim("number of variables", self.num_vars, f.num_vars())?;
        Ok(self.act(f))
    }

    pub(crate) fn act(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero(self.num_vars);
        for (i, d) in self.components.iter().enumerate() {
            if d.is_zero() {
                continue;
            }
            let df = f.partial(i);
            if !df.is_zero() {
                out += d * &df;
            }
        }
        out
    }

    /// Commutator `[D1, D2]` with components `D1(D2_i) - D2(D1_i)`.
    pub fn commutator(&self, other: &Derivation) -> Result<Derivation, Error> {
        check_dim("number of variables", self.num_vars, other.num_vars)?;
        Ok(self.bracket(other))
    }

    pub(crate) fn bracket(&self, other: &Derivation) -> Derivation {
        let components = (0..self.num_vars)
            .map(|i| self.act(&other.components[i]) - other.act(&self.components[i]))
            .collect();
        Derivation {
            num_vars: self.num_vars,
            components,
        }
    }

    pub fn add(&self, other: &Derivation) -> Derivation {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Derivation) -> Derivation {
        self.zip_with(other, |a, b| a - b)
    }

    /// Module action `f·D`.
    pub fn mul_poly(&self, f: &Poly) -> Derivation {
        Derivation {
            num_vars: self.num_vars,
            components: self.components.iter().map(|c| f * c).collect(),
        }
    }

    fn zip_with(&self, other: &Derivation, op: impl Fn(&Poly, &Poly) -> Poly) -> Derivation {
        assert_eq!(self.num_vars, other.num_vars, "variable count mismatch");
        Derivation {
            num_vars: self.num_vars,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> DerivationDisplay<'a> {
        DerivationDisplay { der: self, names }
    }
}

pub struct DerivationDisplay<'a> {
    der: &'a Derivation,
    names: &'a [String],
}

/// Renders as `(x)*d/dx + (-1)*d/dy`, skipping zero components; `0` if all vanish.
impl fmt::Display for DerivationDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.der.components.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({})*d/d{}", c.display(self.names), self.names[i])?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl fmt::Display for Derivation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.num_vars);
        self.display(&names).fmt(f)
    }
}
