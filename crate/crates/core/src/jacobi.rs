//! Multivector fields, the Schouten–Nijenhuis bracket and Jacobi structures.
//!
//! A `p`-vector is stored on strictly increasing index tuples and read as a
//! polynomial in odd symbols `θ_i = ∂/∂x_i`. The bracket is
//!
//! ```text
//! [P,Q] = Σ_i (∂P/∂θ_i)·(∂Q/∂x_i) - (-1)^{(p-1)(q-1)} (∂Q/∂θ_i)·(∂P/∂x_i)
//! ```
//!
//! with `∂/∂θ_i` acting from the right. On vector fields this is the
//! commutator, and `[f, V] = -V(f)`.

use std::collections::BTreeMap;
use std::fmt;

use crate::bracket::{jacobiator, BidiffBracket, Tensor};
use crate::derivation::Derivation;
use crate::error::{check_dim, Error};
use crate::poly::{default_var_names, int, Poly};
use crate::qder::Section;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Multivector {
    num_vars: usize,
    degree: usize,
    components: BTreeMap<Vec<usize>, Poly>,
}

/// Sign of the permutation sorting `idx`, and the sorted tuple; `None` if
/// an index repeats.
fn sort_with_sign(idx: &[usize]) -> Option<(i64, Vec<usize>)> {
    let mut v = idx.to_vec();
    let mut sign = 1;
    for i in 0..v.len() {
        for j in 0..v.len() - 1 - i {
            match v[j].cmp(&v[j + 1]) {
                std::cmp::Ordering::Greater => {
                    v.swap(j, j + 1);
                    sign = -sign;
                }
                std::cmp::Ordering::Equal => return None,
                std::cmp::Ordering::Less => {}
            }
        }
    }
    if v.windows(2).any(|w| w[0] == w[1]) {
        return None;
    }
    Some((sign, v))
}

impl Multivector {
    pub fn zero(num_vars: usize, degree: usize) -> Self {
        Multivector {
            num_vars,
            degree,
            components: BTreeMap::new(),
        }
    }

    pub fn scalar(f: Poly) -> Self {
        let mut m = Self::zero(f.num_vars(), 0);
        m.insert(vec![], f);
        m
    }

    pub fn from_derivation(d: &Derivation) -> Self {
        let mut m = Self::zero(d.num_vars(), 1);
        for (i, c) in d.components().iter().enumerate() {
            m.insert(vec![i], c.clone());
        }
        m
    }

    pub fn vector(num_vars: usize, components: Vec<Poly>) -> Result<Self, Error> {
        Ok(Self::from_derivation(&Derivation::new(
            num_vars, components,
        )?))
    }

    /// Bivector from entries on pairs `i < j`; zero entries are dropped.
    pub fn bivector(num_vars: usize, entries: &[((usize, usize), Poly)]) -> Result<Self, Error> {
        let comps = entries.iter().map(|((i, j), p)| (vec![*i, *j], p.clone()));
        Self::new(num_vars, 2, comps)
    }

    /// Builds from `(increasing index tuple, coefficient)` pairs.
    pub fn new<I>(num_vars: usize, degree: usize, components: I) -> Result<Self, Error>
    where
        I: IntoIterator<Item = (Vec<usize>, Poly)>,
    {
        let mut m = Self::zero(num_vars, degree);
        for (idx, p) in components {
            check_dim("multivector index count", degree, idx.len())?;
            check_dim("number of variables", num_vars, p.num_vars())?;
            for &i in &idx {
                if i >= num_vars {
                    return Err(Error::IndexOutOfRange {
                        what: "variable",
                        index: i,
                        bound: num_vars,
                    });
                }
            }
            if idx.windows(2).any(|w| w[0] >= w[1]) {
                return Err(Error::Precondition(format!(
                    "multivector indices {idx:?} are not strictly increasing"
                )));
            }
            m.insert(idx, p);
        }
        Ok(m)
    }

    fn insert(&mut self, idx: Vec<usize>, p: Poly) {
        if p.is_zero() {
            self.components.remove(&idx);
        } else {
            self.components.insert(idx, p);
        }
    }

    fn accumulate(&mut self, idx: Vec<usize>, p: &Poly) {
        if p.is_zero() {
            return;
        }
        let sum = match self.components.get(&idx) {
            Some(old) => old + p,
            None => p.clone(),
        };
        self.insert(idx, sum);
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    /// Nonzero components on increasing tuples.
    pub fn components(&self) -> impl Iterator<Item = (&Vec<usize>, &Poly)> {
        self.components.iter()
    }

    /// Component on an arbitrary index tuple, extended skew-symmetrically.
    pub fn component(&self, idx: &[usize]) -> Poly {
        match sort_with_sign(idx) {
            None => Poly::zero(self.num_vars),
            Some((sign, sorted)) => match self.components.get(&sorted) {
                Some(p) => p.scale(&int(sign)),
                None => Poly::zero(self.num_vars),
            },
        }
    }

    pub fn to_derivation(&self) -> Result<Derivation, Error> {
        if self.degree != 1 {
            return Err(Error::DegreeMismatch {
                expected: 1,
                found: self.degree,
            });
        }
        let comps = (0..self.num_vars).map(|i| self.component(&[i])).collect();
        Derivation::new(self.num_vars, comps)
    }

    pub fn add(&self, other: &Multivector) -> Multivector {
        assert_eq!((self.num_vars, self.degree), (other.num_vars, other.degree));
        let mut out = self.clone();
        for (idx, p) in &other.components {
            out.accumulate(idx.clone(), p);
        }
        out
    }

    pub fn scale(&self, c: i64) -> Multivector {
        let mut out = Self::zero(self.num_vars, self.degree);
        for (idx, p) in &self.components {
            out.insert(idx.clone(), p.scale(&int(c)));
        }
        out
    }

    fn partial_x(&self, i: usize) -> Multivector {
        let mut out = Self::zero(self.num_vars, self.degree);
        for (idx, p) in &self.components {
            out.insert(idx.clone(), p.partial(i));
        }
        out
    }

    /// Right derivative in the odd symbol `θ_i`; zero in degree 0.
    fn partial_theta(&self, i: usize) -> Multivector {
        let mut out = Self::zero(self.num_vars, self.degree.saturating_sub(1));
        if self.degree == 0 {
            return out;
        }
        for (idx, p) in &self.components {
            if let Some(pos) = idx.iter().position(|&v| v == i) {
                let mut rest = idx.clone();
                rest.remove(pos);
                let sign = if (self.degree - 1 - pos).is_multiple_of(2) {
                    1
                } else {
                    -1
                };
                out.accumulate(rest, &p.scale(&int(sign)));
            }
        }
        out
    }

    fn wedge_unchecked(&self, other: &Multivector) -> Multivector {
        let mut out = Self::zero(self.num_vars, self.degree + other.degree);
        for (i, p) in &self.components {
            for (j, q) in &other.components {
                let mut joined = i.clone();
                joined.extend(j);
                if let Some((sign, sorted)) = sort_with_sign(&joined) {
                    out.accumulate(sorted, &(p * q).scale(&int(sign)));
                }
            }
        }
        out
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> MultivectorDisplay<'a> {
        MultivectorDisplay { mv: self, names }
    }
}

pub struct MultivectorDisplay<'a> {
    mv: &'a Multivector,
    names: &'a [String],
}

/// `(x*y)*dx^dy + ...`; `0` when empty.
impl fmt::Display for MultivectorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.mv.is_zero() {
            return f.write_str("0");
        }
        for (k, (idx, p)) in self.mv.components.iter().enumerate() {
            if k > 0 {
                f.write_str(" + ")?;
            }
            if idx.is_empty() {
                write!(f, "{}", p.display(self.names))?;
            } else {
                let basis: Vec<String> =
                    idx.iter().map(|&i| format!("d{}", self.names[i])).collect();
                write!(f, "({})*{}", p.display(self.names), basis.join("^"))?;
            }
        }
        Ok(())
    }
}

impl fmt::Display for Multivector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.num_vars);
        self.display(&names).fmt(f)
    }
}

/// Exterior product. Terms of degree above `n` vanish.
pub fn wedge(p: &Multivector, q: &Multivector) -> Result<Multivector, Error> {
    check_dim("number of variables", p.num_vars, q.num_vars)?;
    Ok(p.wedge_unchecked(q))
}

/// Schouten–Nijenhuis bracket, of degree `p + q - 1` (degree 0 and zero
/// when both arguments are functions).
pub fn sn_bracket(p: &Multivector, q: &Multivector) -> Result<Multivector, Error> {
    check_dim("number of variables", p.num_vars, q.num_vars)?;
    let n = p.num_vars;
    let (dp, dq) = (p.degree, q.degree);
    let degree = (dp + dq).saturating_sub(1);
    let mut out = Multivector::zero(n, degree);
    if dp + dq == 0 {
        return Ok(out);
    }
    let sign = if (dp + 1) * (dq + 1) % 2 == 0 { 1 } else { -1 };
    // (p-1)(q-1) has the parity of (p+1)(q+1)
    for i in 0..n {
        let a = p.partial_theta(i).wedge_unchecked(&q.partial_x(i));
        let b = q.partial_theta(i).wedge_unchecked(&p.partial_x(i));
        for (idx, c) in &a.components {
            out.accumulate(idx.clone(), c);
        }
        for (idx, c) in &b.components {
            out.accumulate(idx.clone(), &c.scale(&int(-sign)));
        }
    }
    Ok(out)
}

fn require_degree(m: &Multivector, degree: usize) -> Result<(), Error> {
    if m.degree == degree {
        Ok(())
    } else {
        Err(Error::DegreeMismatch {
            expected: degree,
            found: m.degree,
        })
    }
}

/// `i_{df} Λ`, with component `j` equal to `Σ_i ∂_i f Λ^{ij}`.
pub fn interior_df(f: &Poly, lambda: &Multivector) -> Result<Derivation, Error> {
    require_degree(lambda, 2)?;
    check_dim("number of variables", lambda.num_vars, f.num_vars())?;
    let n = lambda.num_vars;
    let df: Vec<Poly> = (0..n).map(|i| f.partial(i)).collect();
    let comps = (0..n)
        .map(|j| {
            let mut acc = Poly::zero(n);
            for (i, d) in df.iter().enumerate() {
                if !d.is_zero() {
                    acc += d * &lambda.component(&[i, j]);
                }
            }
            acc
        })
        .collect();
    Derivation::new(n, comps)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JacobiCondition {
    /// `[Γ, Λ] = 0`
    GammaLambda,
    /// `[Λ, Λ] + 2 Λ∧Γ = 0`
    LambdaLambda,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum JacobiPairVerdict {
    Yes,
    No {
        condition: JacobiCondition,
        defect: Multivector,
    },
}

impl JacobiPairVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, JacobiPairVerdict::Yes)
    }
}

fn check_pair(lambda: &Multivector, gamma: &Multivector) -> Result<(), Error> {
    require_degree(lambda, 2)?;
    require_degree(gamma, 1)?;
    check_dim("number of variables", lambda.num_vars, gamma.num_vars)
}

/// Decides `[Γ,Λ] = 0` and `[Λ,Λ] + 2Λ∧Γ = 0`.
pub fn jacobi_pair_check(
    lambda: &Multivector,
    gamma: &Multivector,
) -> Result<JacobiPairVerdict, Error> {
    check_pair(lambda, gamma)?;
    let first = sn_bracket(gamma, lambda)?;
    if !first.is_zero() {
        return Ok(JacobiPairVerdict::No {
            condition: JacobiCondition::GammaLambda,
            defect: first,
        });
    }
    let second = sn_bracket(lambda, lambda)?.add(&wedge(lambda, gamma)?.scale(2));
    if !second.is_zero() {
        return Ok(JacobiPairVerdict::No {
            condition: JacobiCondition::LambdaLambda,
            defect: second,
        });
    }
    Ok(JacobiPairVerdict::Yes)
}

/// Rank-1 bracket `[f,g] = Λ(df,dg) + fΓ(g) - gΓ(f)`.
pub fn jacobi_bracket(lambda: &Multivector, gamma: &Multivector) -> Result<BidiffBracket, Error> {
    check_pair(lambda, gamma)?;
    let n = lambda.num_vars;
    let mut b = BidiffBracket::zero(n, 1);
    for i in 0..n {
        let g = gamma.component(&[i]);
        b.set(Tensor::R, &[0, 0, 0, i], g.clone())?;
        b.set(Tensor::L, &[0, 0, 0, i], -g)?;
        for j in 0..n {
            b.set(Tensor::M, &[0, 0, 0, i, j], lambda.component(&[i, j]))?;
        }
    }
    Ok(b)
}

/// `f̂ = i_{df}Λ + fΓ`.
pub fn hamiltonian_anchor(
    lambda: &Multivector,
    gamma: &Multivector,
    f: &Poly,
) -> Result<Derivation, Error> {
    check_pair(lambda, gamma)?;
    Ok(interior_df(f, lambda)?.add(&gamma.to_derivation()?.mul_poly(f)))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PoissonSkewDefect {
    /// `[[f²,g]+[g,f²],h] - 2([f,g]+[g,f])[f,h]`
    pub identity: Poly,
    /// `[f,f]`
    pub self_bracket: Poly,
}

impl PoissonSkewDefect {
    pub fn is_zero(&self) -> bool {
        self.identity.is_zero() && self.self_bracket.is_zero()
    }
}

/// Evaluates the identity that turns the Jacobi identity plus the Leibniz
/// rule into skew-symmetry for rank-1 brackets, along with `[f,f]`.
pub fn poisson_skew_identity_check(
    b: &BidiffBracket,
    f: &Poly,
    g: &Poly,
    h: &Poly,
) -> Result<PoissonSkewDefect, Error> {
    check_dim("bracket rank", 1, b.rank())?;
    let n = b.num_vars();
    for p in [f, g, h] {
        check_dim("number of variables", n, p.num_vars())?;
    }
    if !crate::bracket::right_qd_check(b).is_yes() || !crate::bracket::left_qd_check(b).is_yes() {
        return Err(Error::Precondition("bracket is not a QD-algebroid".into()));
    }
    if !crate::bracket::jacobiator_is_zero(b).is_yes() {
        return Err(Error::Precondition("Jacobi identity fails".into()));
    }
    let s = |p: &Poly| Section::new(n, vec![p.clone()]).expect("shape");
    let br = |p: &Poly, q: &Poly| b.eval_unchecked(&s(p), &s(q)).component(0).clone();
    let f2 = f * f;
    let sym_f2g = &br(&f2, g) + &br(g, &f2);
    let lhs = br(&sym_f2g, h);
    let sym_fg = &br(f, g) + &br(g, f);
    let rhs = (&sym_fg * &br(f, h)).scale(&int(2));
    // sanity: the Jacobiator vanishes on this triple as well
    debug_assert!(jacobiator(b, &s(f), &s(g), &s(h)).expect("shape").is_zero());
    Ok(PoissonSkewDefect {
        identity: lhs - rhs,
        self_bracket: br(f, f),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{jacobiator_is_zero, left_anchor, rank1_from_vector_field};
    use crate::parse::parse_poly;

    fn p(n: usize, s: &str) -> Poly {
        parse_poly(s, &default_var_names(n)).unwrap()
    }

    fn field(n: usize, comps: &[&str]) -> Multivector {
        Multivector::vector(n, comps.iter().map(|s| p(n, s)).collect()).unwrap()
    }

    fn biv(n: usize, entries: &[((usize, usize), &str)]) -> Multivector {
        let e: Vec<_> = entries.iter().map(|(ij, s)| (*ij, p(n, s))).collect();
        Multivector::bivector(n, &e).unwrap()
    }

    #[test]
    fn wedge_examples() {
        let dx = field(2, &["1", "0"]);
        let dy = field(2, &["0", "1"]);
        assert!(wedge(&dx, &dx).unwrap().is_zero());
        assert_eq!(wedge(&dx, &dy).unwrap(), biv(2, &[((0, 1), "1")]));
        assert_eq!(wedge(&dy, &dx).unwrap(), biv(2, &[((0, 1), "-1")]));
        // (x∂_x) ∧ (y∂_y + ∂_x): only x∂_x ∧ y∂_y survives
        let r = wedge(&field(2, &["x", "0"]), &field(2, &["1", "y"])).unwrap();
        assert_eq!(r, biv(2, &[((0, 1), "x*y")]));
        // degree overflow
        let three = wedge(&biv(2, &[((0, 1), "1")]), &dx).unwrap();
        assert_eq!(three.degree(), 3);
        assert!(three.is_zero());
    }

    #[test]
    fn sn_examples() {
        let dy = field(2, &["0", "1"]);
        let lam = biv(2, &[((0, 1), "y")]);
        assert_eq!(sn_bracket(&dy, &lam).unwrap(), biv(2, &[((0, 1), "1")]));
        let ll = sn_bracket(&lam, &lam).unwrap();
        assert_eq!(ll.degree(), 3);
        assert!(ll.is_zero());
        let u = field(2, &["x*y", "y^2"]);
        let v = field(2, &["1", "x^2"]);
        let expected = Multivector::from_derivation(
            &u.to_derivation()
                .unwrap()
                .commutator(&v.to_derivation().unwrap())
                .unwrap(),
        );
        assert_eq!(sn_bracket(&u, &v).unwrap(), expected);
    }

    #[test]
    fn sn_with_functions() {
        let f = Multivector::scalar(p(2, "x^2*y"));
        let g = Multivector::scalar(p(2, "y"));
        assert!(sn_bracket(&f, &g).unwrap().is_zero());
        let v = field(2, &["x", "1"]);
        let vf = v.to_derivation().unwrap().apply(&p(2, "x^2*y")).unwrap();
        assert_eq!(sn_bracket(&v, &f).unwrap(), Multivector::scalar(vf.clone()));
        assert_eq!(sn_bracket(&f, &v).unwrap(), Multivector::scalar(-vf));
    }

    #[test]
    fn interior_examples() {
        let lam = biv(2, &[((0, 1), "1")]);
        assert!(interior_df(&p(2, "3"), &lam).unwrap().is_zero());
        let gamma0 = Multivector::zero(2, 1);
        let b = jacobi_bracket(&lam, &gamma0).unwrap();
        for (f, expected) in [("x", ["0", "1"]), ("y", ["-1", "0"])] {
            let got = interior_df(&p(2, f), &lam).unwrap();
            let oracle = left_anchor(&b, &Section::new(2, vec![p(2, f)]).unwrap()).unwrap();
            assert_eq!(got, oracle);
            assert_eq!(got, field(2, &expected).to_derivation().unwrap());
        }
        assert!(matches!(
            interior_df(&p(2, "x"), &field(2, &["1", "0"])),
            Err(Error::DegreeMismatch { .. })
        ));
    }

    #[test]
    fn pair_check_examples() {
        let lam = biv(2, &[((0, 1), "1")]);
        assert!(jacobi_pair_check(&lam, &Multivector::zero(2, 1))
            .unwrap()
            .is_yes());
        let lam_y = biv(2, &[((0, 1), "y")]);
        let gamma = field(2, &["0", "1"]);
        match jacobi_pair_check(&lam_y, &gamma).unwrap() {
            JacobiPairVerdict::No { condition, defect } => {
                assert_eq!(condition, JacobiCondition::GammaLambda);
                assert_eq!(defect, biv(2, &[((0, 1), "1")]));
            }
            v => panic!("expected no, got {v:?}"),
        }
        let b = jacobi_bracket(&lam_y, &gamma).unwrap();
        assert!(!jacobiator_is_zero(&b).is_yes());
        for g in [["1", "0"], ["x*y", "x^2 + 1"]] {
            assert!(jacobi_pair_check(&Multivector::zero(2, 2), &field(2, &g))
                .unwrap()
                .is_yes());
        }
        assert!(jacobi_pair_check(&gamma, &gamma).is_err());
    }

    #[test]
    fn contact_like_pair_satisfies_both_conditions() {
        // Λ = -x ∂x∧∂y + ∂x∧∂z, Γ = ∂y on three variables
        let lam = biv(3, &[((0, 1), "-x"), ((0, 2), "1")]);
        let gamma = field(3, &["0", "1", "0"]);
        assert!(jacobi_pair_check(&lam, &gamma).unwrap().is_yes());
        assert!(jacobiator_is_zero(&jacobi_bracket(&lam, &gamma).unwrap()).is_yes());
        // flipping the sign of Λ∧Γ breaks both
        let lam_bad = biv(3, &[((0, 1), "x"), ((0, 2), "1")]);
        assert!(!jacobi_pair_check(&lam_bad, &gamma).unwrap().is_yes());
        assert!(!jacobiator_is_zero(&jacobi_bracket(&lam_bad, &gamma).unwrap()).is_yes());
    }

    #[test]
    fn jacobi_bracket_examples() {
        assert!(
            jacobi_bracket(&Multivector::zero(2, 2), &Multivector::zero(2, 1))
                .unwrap()
                .is_zero()
        );
        let b = jacobi_bracket(&biv(2, &[((0, 1), "1")]), &Multivector::zero(2, 1)).unwrap();
        let s = |f: &str| Section::new(2, vec![p(2, f)]).unwrap();
        assert_eq!(b.eval(&s("x"), &s("y")).unwrap(), s("1"));
        assert!(b.eval(&s("x"), &s("x")).unwrap().is_zero());

        let gx = field(1, &["1"]);
        let b = jacobi_bracket(&Multivector::zero(1, 2), &gx).unwrap();
        assert_eq!(b, rank1_from_vector_field(&gx.to_derivation().unwrap()));
        let s1 = |f: &str| Section::new(1, vec![p(1, f)]).unwrap();
        assert_eq!(b.eval(&s1("x"), &s1("x^2")).unwrap(), s1("x^2"));
    }

    #[test]
    fn hamiltonian_examples() {
        let lam = biv(2, &[((0, 1), "1")]);
        let gamma = field(2, &["1", "0"]);
        assert!(hamiltonian_anchor(&lam, &gamma, &Poly::zero(2))
            .unwrap()
            .is_zero());
        let g0 = field(2, &["x", "y^2"]);
        let f = p(2, "x*y + 1");
        assert_eq!(
            hamiltonian_anchor(&Multivector::zero(2, 2), &g0, &f).unwrap(),
            g0.to_derivation().unwrap().mul_poly(&f)
        );
        let got = hamiltonian_anchor(&lam, &gamma, &p(2, "x")).unwrap();
        assert_eq!(got, field(2, &["x", "1"]).to_derivation().unwrap());
        let b = jacobi_bracket(&lam, &gamma).unwrap();
        let oracle = left_anchor(&b, &Section::new(2, vec![p(2, "x")]).unwrap()).unwrap();
        assert_eq!(got, oracle);
    }

    #[test]
    fn poisson_skew_examples() {
        let b = jacobi_bracket(&biv(2, &[((0, 1), "1")]), &Multivector::zero(2, 1)).unwrap();
        let d = poisson_skew_identity_check(&b, &p(2, "x"), &p(2, "y"), &p(2, "x*y")).unwrap();
        assert!(d.is_zero());
        let x = p(2, "x");
        let d = poisson_skew_identity_check(&b, &x, &x, &x).unwrap();
        assert!(d.self_bracket.is_zero());

        let mut sym = BidiffBracket::zero(1, 1);
        sym.set(Tensor::C, &[0, 0, 0], Poly::one(1)).unwrap();
        assert!(poisson_skew_identity_check(&sym, &x_1(), &x_1(), &x_1()).is_err());
    }

    fn x_1() -> Poly {
        Poly::var(1, 0)
    }
}
