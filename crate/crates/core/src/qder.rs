//! First-order operators on the free module `E = A^k` and quasi-derivations.
//!
//! An operator is stored as
//! `(D X)^c = Σ_a A^c_a X^a + Σ_{a,i} B^{c,i}_a ∂_i X^a`.
//! It is a quasi-derivation exactly when its principal part factors as
//! `B^{c,i}_a = δ^c_a b^i`, in which case `b` is its universal anchor.

use std::fmt;

use crate::bracket::BidiffBracket;
use crate::derivation::Derivation;
use crate::error::{check_dim, Error};
use crate::poly::{default_var_names, Monomial, Poly};

/// Element of `A^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Section {
    num_vars: usize,
    components: Vec<Poly>,
}

impl Section {
    pub fn zero(num_vars: usize, rank: usize) -> Self {
        Section {
            num_vars,
            components: vec![Poly::zero(num_vars); rank],
        }
    }

    pub fn new(num_vars: usize, components: Vec<Poly>) -> Result<Self, Error> {
        for c in &components {
            check_dim("number of variables", num_vars, c.num_vars())?;
        }
        Ok(Section {
            num_vars,
            components,
        })
    }

    /// The basis section `e_a`.
    pub fn basis(num_vars: usize, rank: usize, a: usize) -> Self {
        Self::monomial(rank, a, Monomial::one(num_vars))
    }

    /// `x^β e_a`.
    pub fn monomial(rank: usize, a: usize, m: Monomial) -> Self {
        let num_vars = m.exponents().len();
        let mut s = Self::zero(num_vars, rank);
        s.components[a] = Poly::term(m, num::One::one());
        s
    }

    /// All sections `x^β e_a` with `|β| <= max_degree`, monomial-major in
    /// graded-lex order, then by basis index.
    pub fn monomial_grid(num_vars: usize, rank: usize, max_degree: u32) -> Vec<Section> {
        let mut out = Vec::new();
        for m in Monomial::up_to_degree(num_vars, max_degree) {
            for a in 0..rank {
                out.push(Self::monomial(rank, a, m.clone()));
            }
        }
        out
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rank(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Poly] {
        &self.components
    }

    pub fn component(&self, a: usize) -> &Poly {
        &self.components[a]
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(Poly::is_zero)
    }

    /// First nonzero component, if any.
    pub fn first_nonzero(&self) -> Option<(usize, &Poly)> {
        self.components
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_zero())
    }

    pub fn add(&self, other: &Section) -> Section {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Section) -> Section {
        self.zip_with(other, |a, b| a - b)
    }

    pub fn mul_poly(&self, f: &Poly) -> Section {
        Section {
            num_vars: self.num_vars,
            components: self.components.iter().map(|c| f * c).collect(),
        }
    }

    fn zip_with(&self, other: &Section, op: impl Fn(&Poly, &Poly) -> Poly) -> Section {
        assert_eq!(self.rank(), other.rank(), "rank mismatch");
        Section {
            num_vars: self.num_vars,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    pub(crate) fn check_shape(&self, num_vars: usize, rank: usize) -> Result<(), Error> {
        check_dim("number of variables", num_vars, self.num_vars)?;
        check_dim("section rank", rank, self.rank())
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> SectionDisplay<'a> {
        SectionDisplay {
            section: self,
            names,
        }
    }
}

pub struct SectionDisplay<'a> {
    section: &'a Section,
    names: &'a [String],
}

impl fmt::Display for SectionDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (a, c) in self.section.components.iter().enumerate() {
            if a > 0 {
                f.write_str(", ")?;
            }
            c.display(self.names).fmt(f)?;
        }
        f.write_str(")")
    }
}

impl fmt::Display for Section {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = default_var_names(self.num_vars);
        self.display(&names).fmt(f)
    }
}

/// First-order differential operator on `A^k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FirstOrderOperator {
    num_vars: usize,
    rank: usize,
    // A^c_a at c * rank + a
    zeroth: Vec<Poly>,
    // B^{c,i}_a at (c * rank + a) * num_vars + i
    first: Vec<Poly>,
}

impl FirstOrderOperator {
    pub fn zero(num_vars: usize, rank: usize) -> Self {
        FirstOrderOperator {
            num_vars,
            rank,
            zeroth: vec![Poly::zero(num_vars); rank * rank],
            first: vec![Poly::zero(num_vars); rank * rank * num_vars],
        }
    }

    pub fn identity(num_vars: usize, rank: usize) -> Self {
        module_action(&Poly::one(num_vars), rank)
    }

    /// The derivation `δ` acting on each component separately.
    pub fn componentwise(der: &Derivation, rank: usize) -> Self {
        let mut op = Self::zero(der.num_vars(), rank);
        for a in 0..rank {
            for i in 0..der.num_vars() {
                op.set_b(a, a, i, der.component(i).clone());
            }
        }
        op
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    /// `A^c_a`.
    pub fn a(&self, c: usize, a: usize) -> &Poly {
        &self.zeroth[c * self.rank + a]
    }

    /// `B^{c,i}_a`.
    pub fn b(&self, c: usize, a: usize, i: usize) -> &Poly {
        &self.first[(c * self.rank + a) * self.num_vars + i]
    }

    pub fn set_a(&mut self, c: usize, a: usize, p: Poly) {
        assert_eq!(p.num_vars(), self.num_vars);
        self.zeroth[c * self.rank + a] = p;
    }

    pub fn set_b(&mut self, c: usize, a: usize, i: usize, p: Poly) {
        assert_eq!(p.num_vars(), self.num_vars);
        self.first[(c * self.rank + a) * self.num_vars + i] = p;
    }

    pub fn is_zero(&self) -> bool {
        self.zeroth.iter().chain(&self.first).all(Poly::is_zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    /// `f·D = f_E ∘ D`.
    pub fn mul_poly(&self, f: &Poly) -> Self {
        FirstOrderOperator {
            num_vars: self.num_vars,
            rank: self.rank,
            zeroth: self.zeroth.iter().map(|p| f * p).collect(),
            first: self.first.iter().map(|p| f * p).collect(),
        }
    }

    fn zip_with(&self, other: &Self, op: impl Fn(&Poly, &Poly) -> Poly) -> Self {
        assert_eq!((self.num_vars, self.rank), (other.num_vars, other.rank));
        FirstOrderOperator {
            num_vars: self.num_vars,
            rank: self.rank,
            zeroth: self
                .zeroth
                .iter()
                .zip(&other.zeroth)
                .map(|(a, b)| op(a, b))
                .collect(),
            first: self
                .first
                .iter()
                .zip(&other.first)
                .map(|(a, b)| op(a, b))
                .collect(),
        }
    }

    fn check_same_shape(&self, other: &Self) -> Result<(), Error> {
        check_dim("number of variables", self.num_vars, other.num_vars)?;
        check_dim("operator rank", self.rank, other.rank)
    }

    pub fn apply(&self, x: &Section) -> Result<Section, Error> {
        x.check_shape(self.num_vars, self.rank)?;
        Ok(self.act(x))
    }

    pub(crate) fn act(&self, x: &Section) -> Section {
        let n = self.num_vars;
        let k = self.rank;
        let partials: Vec<Vec<Poly>> = x
            .components()
            .iter()
            .map(|xa| (0..n).map(|i| xa.partial(i)).collect())
            .collect();
        let mut out = Section::zero(n, k);
        for c in 0..k {
            let mut acc = Poly::zero(n);
            for a in 0..k {
                let coef = self.a(c, a);
                if !coef.is_zero() && !x.component(a).is_zero() {
                    acc += coef * x.component(a);
                }
                for i in 0..n {
                    let coef = self.b(c, a, i);
                    if !coef.is_zero() && !partials[a][i].is_zero() {
                        acc += coef * &partials[a][i];
                    }
                }
            }
            out.components[c] = acc;
        }
        out
    }

    /// True when `B^{c,i}_a = δ^c_a b^i` for some `b`.
    pub fn is_diagonally_factorized(&self) -> bool {
        self.qd_defect().is_none()
    }

    fn qd_defect(&self) -> Option<QdWitness> {
        let k = self.rank;
        for i in 0..self.num_vars {
            for a in 0..k {
                for c in 0..k {
                    let entry = self.b(c, a, i);
                    if c != a {
                        if !entry.is_zero() {
                            return Some(QdWitness {
                                variable: i,
                                a,
                                c,
                                defect: entry.clone(),
                            });
                        }
                    } else if a > 0 && entry != self.b(0, 0, i) {
                        return Some(QdWitness {
                            variable: i,
                            a,
                            c,
                            defect: entry - self.b(0, 0, i),
                        });
                    }
                }
            }
        }
        None
    }

    /// The components `b^i = B^{0,i}_0`, meaningful only when diagonally factorized.
    fn principal_symbol(&self) -> Derivation {
        let comps = (0..self.num_vars)
            .map(|i| {
                if self.rank == 0 {
                    Poly::zero(self.num_vars)
                } else {
                    self.b(0, 0, i).clone()
                }
            })
            .collect();
        Derivation::new(self.num_vars, comps).expect("shape")
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> OperatorDisplay<'a> {
        OperatorDisplay { op: self, names }
    }
}

pub struct OperatorDisplay<'a> {
    op: &'a FirstOrderOperator,
    names: &'a [String],
}

/// Lists nonzero coefficients, one per line.
impl fmt::Display for OperatorDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = self.op;
        let mut any = false;
        for c in 0..op.rank {
            for a in 0..op.rank {
                let p = op.a(c, a);
                if !p.is_zero() {
                    any = true;
                    writeln!(f, "A[{c}][{a}] = {}", p.display(self.names))?;
                }
            }
        }
        for c in 0..op.rank {
            for a in 0..op.rank {
                for i in 0..op.num_vars {
                    let p = op.b(c, a, i);
                    if !p.is_zero() {
                        any = true;
                        writeln!(
                            f,
                            "B[{c}][{a}][{}] = {}",
                            self.names[i],
                            p.display(self.names)
                        )?;
                    }
                }
            }
        }
        if !any {
            writeln!(f, "0")?;
        }
        Ok(())
    }
}

/// Why an operator fails to be a quasi-derivation: `[D, x_i]` applied to
/// `e_a` is not a multiple of `e_a` by a common function.
///
/// For `a != c`, `defect` is the `e_c` coefficient of `[D, x_i](e_a)`.
/// For `a == c`, `defect` is the difference between the `e_a` coefficient of
/// `[D, x_i](e_a)` and the `e_0` coefficient of `[D, x_i](e_0)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QdWitness {
    pub variable: usize,
    pub a: usize,
    pub c: usize,
    pub defect: Poly,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum QdVerdict {
    Yes(Derivation),
    No(QdWitness),
}

impl QdVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, QdVerdict::Yes(_))
    }
}

/// The operator `f_E: X ↦ fX`.
pub fn module_action(f: &Poly, rank: usize) -> FirstOrderOperator {
    let mut op = FirstOrderOperator::zero(f.num_vars(), rank);
    for a in 0..rank {
        op.set_a(a, a, f.clone());
    }
    op
}

/// Decides whether `[D, f_E]` is a module operator for every `f`.
///
/// `[D, f_E]` is the zeroth-order operator with matrix `Σ_i B^{c,i}_a ∂_i f`,
/// so probing with the coordinate functions decides the question.
pub fn is_quasi_derivation(d: &FirstOrderOperator) -> QdVerdict {
    match d.qd_defect() {
        None => QdVerdict::Yes(d.principal_symbol()),
        Some(w) => QdVerdict::No(w),
    }
}

/// The derivation `D̂` with `[D, f_E] = (D̂ f)_E`.
pub fn universal_anchor(d: &FirstOrderOperator) -> Result<Derivation, Error> {
    match is_quasi_derivation(d) {
        QdVerdict::Yes(anchor) => Ok(anchor),
        QdVerdict::No(w) => Err(Error::Precondition(format!(
            "operator is not a quasi-derivation (probe x_{}, basis pair ({}, {}))",
            w.variable, w.a, w.c
        ))),
    }
}

type Matrix = Vec<Vec<Poly>>;

fn zeroth_matrix(d: &FirstOrderOperator) -> Matrix {
    (0..d.rank)
        .map(|c| (0..d.rank).map(|a| d.a(c, a).clone()).collect())
        .collect()
}

fn first_matrix(d: &FirstOrderOperator, i: usize) -> Matrix {
    (0..d.rank)
        .map(|c| (0..d.rank).map(|a| d.b(c, a, i).clone()).collect())
        .collect()
}

fn mat_mul(n: usize, p: &Matrix, q: &Matrix) -> Matrix {
    let k = p.len();
    (0..k)
        .map(|r| {
            (0..k)
                .map(|s| {
                    let mut acc = Poly::zero(n);
                    for t in 0..k {
                        if !p[r][t].is_zero() && !q[t][s].is_zero() {
                            acc += &p[r][t] * &q[t][s];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn mat_partial(p: &Matrix, i: usize) -> Matrix {
    p.iter()
        .map(|row| row.iter().map(|e| e.partial(i)).collect())
        .collect()
}

fn mat_axpy(acc: &mut Matrix, sign: bool, p: &Matrix) {
    for (ra, rp) in acc.iter_mut().zip(p) {
        for (a, e) in ra.iter_mut().zip(rp) {
            if sign {
                *a += e;
            } else {
                *a -= e;
            }
        }
    }
}

/// `[D1, D2] = D1∘D2 - D2∘D1`.
///
/// Second-order terms cancel when at least one input has a diagonally
/// factorized principal part; other inputs are rejected.
pub fn op_commutator(
    d1: &FirstOrderOperator,
    d2: &FirstOrderOperator,
) -> Result<FirstOrderOperator, Error> {
    d1.check_same_shape(d2)?;
    if !d1.is_diagonally_factorized() && !d2.is_diagonally_factorized() {
        return Err(Error::Unsupported(
            "commutator of two operators without diagonal principal part is second order".into(),
        ));
    }
    let n = d1.num_vars;
    let k = d1.rank;
    let a1 = zeroth_matrix(d1);
    let a2 = zeroth_matrix(d2);
    let b1: Vec<Matrix> = (0..n).map(|i| first_matrix(d1, i)).collect();
    let b2: Vec<Matrix> = (0..n).map(|i| first_matrix(d2, i)).collect();

    // D1∘D2 = A1A2 + Σ_j B1^j ∂_j A2
    //       + Σ_i (A1 B2^i + B1^i A2 + Σ_j B1^j ∂_j B2^i) ∂_i + (second order)
    let mut zeroth = mat_mul(n, &a1, &a2);
    mat_axpy(&mut zeroth, false, &mat_mul(n, &a2, &a1));
    for j in 0..n {
        mat_axpy(&mut zeroth, true, &mat_mul(n, &b1[j], &mat_partial(&a2, j)));
        mat_axpy(
            &mut zeroth,
            false,
            &mat_mul(n, &b2[j], &mat_partial(&a1, j)),
        );
    }

    let mut out = FirstOrderOperator::zero(n, k);
    for c in 0..k {
        for a in 0..k {
            out.set_a(c, a, zeroth[c][a].clone());
        }
    }
    for i in 0..n {
        let mut first = mat_mul(n, &a1, &b2[i]);
        mat_axpy(&mut first, true, &mat_mul(n, &b1[i], &a2));
        mat_axpy(&mut first, false, &mat_mul(n, &a2, &b1[i]));
        mat_axpy(&mut first, false, &mat_mul(n, &b2[i], &a1));
        for j in 0..n {
            mat_axpy(
                &mut first,
                true,
                &mat_mul(n, &b1[j], &mat_partial(&b2[i], j)),
            );
            mat_axpy(
                &mut first,
                false,
                &mat_mul(n, &b2[j], &mat_partial(&b1[i], j)),
            );
        }
        for c in 0..k {
            for a in 0..k {
                out.set_b(c, a, i, first[c][a].clone());
            }
        }
    }

    debug_assert!((0..n).all(|i| (0..n).all(|j| {
        let mut sym = mat_mul(n, &b1[i], &b2[j]);
        mat_axpy(&mut sym, true, &mat_mul(n, &b1[j], &b2[i]));
        mat_axpy(&mut sym, false, &mat_mul(n, &b2[i], &b1[j]));
        mat_axpy(&mut sym, false, &mat_mul(n, &b2[j], &b1[i]));
        sym.iter().flatten().all(Poly::is_zero)
    })));
    Ok(out)
}

/// `[D1, f·D2] - f·[D1, D2] - D̂1(f)·D2`, which vanishes for quasi-derivations.
pub fn leibniz_qder_check(
    d1: &FirstOrderOperator,
    d2: &FirstOrderOperator,
    f: &Poly,
) -> Result<FirstOrderOperator, Error> {
    d1.check_same_shape(d2)?;
    check_dim("number of variables", d1.num_vars, f.num_vars())?;
    let anchor1 = universal_anchor(d1)?;
    universal_anchor(d2)?;
    let lhs = op_commutator(d1, &d2.mul_poly(f))?;
    let bracket = op_commutator(d1, d2)?;
    Ok(lhs
        .sub(&bracket.mul_poly(f))
        .sub(&d2.mul_poly(&anchor1.act(f))))
}

/// `ad_X = [X, ·]` as a first-order operator.
pub fn ad_operator(b: &BidiffBracket, x: &Section) -> Result<FirstOrderOperator, Error> {
    x.check_shape(b.num_vars(), b.rank())?;
    Ok(ad_unchecked(b, x))
}

pub(crate) fn ad_unchecked(b: &BidiffBracket, x: &Section) -> FirstOrderOperator {
    let n = b.num_vars();
    let k = b.rank();
    let dx: Vec<Vec<Poly>> = x
        .components()
        .iter()
        .map(|xa| (0..n).map(|i| xa.partial(i)).collect())
        .collect();
    let mut op = FirstOrderOperator::zero(n, k);
    for c in 0..k {
        for bi in 0..k {
            let mut zeroth = Poly::zero(n);
            let mut first = vec![Poly::zero(n); n];
            for a in 0..k {
                let xa = x.component(a);
                if !xa.is_zero() {
                    let coef = b.c(c, a, bi);
                    if !coef.is_zero() {
                        zeroth += coef * xa;
                    }
                    for (j, fj) in first.iter_mut().enumerate() {
                        let coef = b.r(c, a, bi, j);
                        if !coef.is_zero() {
                            *fj += coef * xa;
                        }
                    }
                }
                for i in 0..n {
                    let d = &dx[a][i];
                    if d.is_zero() {
                        continue;
                    }
                    let coef = b.l(c, a, bi, i);
                    if !coef.is_zero() {
                        zeroth += coef * d;
                    }
                    for (j, fj) in first.iter_mut().enumerate() {
                        let coef = b.m(c, a, bi, i, j);
                        if !coef.is_zero() {
                            *fj += coef * d;
                        }
                    }
                }
            }
            op.set_a(c, bi, zeroth);
            for (j, fj) in first.into_iter().enumerate() {
                op.set_b(c, bi, j, fj);
            }
        }
    }
    op
}
