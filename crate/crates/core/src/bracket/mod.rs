//! First-order bidifferential brackets on `A^k`.
//!
//! ```text
//! [X,Y]^c = Σ_{a,b} ( C^c_{ab} X^a Y^b
//!                   + Σ_i L^{c,i}_{ab} ∂_i X^a Y^b
//!                   + Σ_i R^{c,i}_{ab} X^a ∂_i Y^b
//!                   + Σ_{i,j} M^{c,ij}_{ab} ∂_i X^a ∂_j Y^b )
//! ```

mod anchor;
mod checks;
mod classify;

pub use anchor::{
    anchor_linearity_identity_check, anchors_tensorial, left_anchor, left_qd_check, right_anchor,
    right_qd_check, AnchorData, AnchorVerdict,
};
pub use checks::{
    anchor_homomorphism_check, jacobiator, jacobiator_is_zero, loday_anchor_sign_check,
    pointwise_skew_at, skew_check, spot_check_jacobi, spot_check_skew, PointwiseSkew, Verdict,
    JACOBI_GRID_DEGREE, SKEW_GRID_DEGREE,
};
pub use classify::{classify, ClassificationReport, Flag};

use crate::derivation::Derivation;
use crate::error::{check_dim, Error};
use crate::poly::Poly;
use crate::qder::Section;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct BidiffBracket {
    num_vars: usize,
    rank: usize,
    c: Vec<Poly>,
    l: Vec<Poly>,
    r: Vec<Poly>,
    m: Vec<Poly>,
}

/// Which coefficient tensor an entry belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Tensor {
    C,
    L,
    R,
    M,
}

impl Tensor {
    pub const ALL: [Tensor; 4] = [Tensor::C, Tensor::L, Tensor::R, Tensor::M];

    pub fn name(self) -> &'static str {
        match self {
            Tensor::C => "C",
            Tensor::L => "L",
            Tensor::R => "R",
            Tensor::M => "M",
        }
    }

    /// Number of indices of an entry: `(c, a, b)` followed by derivative indices.
    pub fn arity(self) -> usize {
        match self {
            Tensor::C => 3,
            Tensor::L | Tensor::R => 4,
            Tensor::M => 5,
        }
    }
}

impl BidiffBracket {
    pub fn zero(num_vars: usize, rank: usize) -> Self {
        let k3 = rank * rank * rank;
        BidiffBracket {
            num_vars,
            rank,
            c: vec![Poly::zero(num_vars); k3],
            l: vec![Poly::zero(num_vars); k3 * num_vars],
            r: vec![Poly::zero(num_vars); k3 * num_vars],
            m: vec![Poly::zero(num_vars); k3 * num_vars * num_vars],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    #[inline]
    fn base(&self, c: usize, a: usize, b: usize) -> usize {
        (c * self.rank + a) * self.rank + b
    }

    pub fn c(&self, c: usize, a: usize, b: usize) -> &Poly {
        &self.c[self.base(c, a, b)]
    }

    pub fn l(&self, c: usize, a: usize, b: usize, i: usize) -> &Poly {
        &self.l[self.base(c, a, b) * self.num_vars + i]
    }

    pub fn r(&self, c: usize, a: usize, b: usize, i: usize) -> &Poly {
        &self.r[self.base(c, a, b) * self.num_vars + i]
    }

    pub fn m(&self, c: usize, a: usize, b: usize, i: usize, j: usize) -> &Poly {
        &self.m[(self.base(c, a, b) * self.num_vars + i) * self.num_vars + j]
    }

    fn slot(&self, t: Tensor, idx: &[usize]) -> Result<usize, Error> {
        check_dim("entry index count", t.arity(), idx.len())?;
        for (pos, &v) in idx.iter().enumerate() {
            let bound = if pos < 3 { self.rank } else { self.num_vars };
            if v >= bound {
                return Err(Error::IndexOutOfRange {
                    what: if pos < 3 { "basis" } else { "variable" },
                    index: v,
                    bound,
                });
            }
        }
        let n = self.num_vars;
        let base = self.base(idx[0], idx[1], idx[2]);
        Ok(match t {
            Tensor::C => base,
            Tensor::L | Tensor::R => base * n + idx[3],
            Tensor::M => (base * n + idx[3]) * n + idx[4],
        })
    }

    fn storage(&self, t: Tensor) -> &Vec<Poly> {
        match t {
            Tensor::C => &self.c,
            Tensor::L => &self.l,
            Tensor::R => &self.r,
            Tensor::M => &self.m,
        }
    }

    fn storage_mut(&mut self, t: Tensor) -> &mut Vec<Poly> {
        match t {
            Tensor::C => &mut self.c,
            Tensor::L => &mut self.l,
            Tensor::R => &mut self.r,
            Tensor::M => &mut self.m,
        }
    }

    pub fn get(&self, t: Tensor, idx: &[usize]) -> Result<&Poly, Error> {
        let s = self.slot(t, idx)?;
        Ok(&self.storage(t)[s])
    }

    pub fn set(&mut self, t: Tensor, idx: &[usize], p: Poly) -> Result<(), Error> {
        check_dim("number of variables", self.num_vars, p.num_vars())?;
        let s = self.slot(t, idx)?;
        self.storage_mut(t)[s] = p;
        Ok(())
    }

    /// Nonzero entries of one tensor, in index order.
    pub fn entries(&self, t: Tensor) -> Vec<(Vec<usize>, &Poly)> {
        let k = self.rank;
        let n = self.num_vars;
        let mut dims = vec![k, k, k];
        dims.extend(std::iter::repeat_n(n, t.arity() - 3));
        let data = self.storage(t);
        let mut out = Vec::new();
        for (flat, p) in data.iter().enumerate() {
            if p.is_zero() {
                continue;
            }
            let mut idx = vec![0; dims.len()];
            let mut rem = flat;
            for pos in (0..dims.len()).rev() {
                idx[pos] = rem % dims[pos];
                rem /= dims[pos];
            }
            out.push((idx, p));
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        Tensor::ALL
            .iter()
            .all(|&t| self.storage(t).iter().all(Poly::is_zero))
    }

    pub fn eval(&self, x: &Section, y: &Section) -> Result<Section, Error> {
        x.check_shape(self.num_vars, self.rank)?;
        y.check_shape(self.num_vars, self.rank)?;
        Ok(self.eval_unchecked(x, y))
    }

    pub(crate) fn eval_unchecked(&self, x: &Section, y: &Section) -> Section {
        crate::qder::ad_unchecked(self, x).act(y)
    }
}

/// Evaluates `[X, Y]`.
pub fn bracket_eval(b: &BidiffBracket, x: &Section, y: &Section) -> Result<Section, Error> {
    b.eval(x, y)
}

/// The bracket of vector fields on `n` coordinates, with sections of rank
/// `n` read as fields `Σ_a X^a ∂_a`.
pub fn tangent_algebroid(num_vars: usize) -> Result<BidiffBracket, Error> {
    if num_vars == 0 {
        return Err(Error::Precondition(
            "tangent algebroid needs at least one variable".into(),
        ));
    }
    let n = num_vars;
    let one = Poly::one(n);
    let mut b = BidiffBracket::zero(n, n);
    for a in 0..n {
        for i in 0..n {
            // [X,Y]^c = X^a ∂_a Y^c - Y^b ∂_b X^c
            b.set(Tensor::R, &[i, a, i, a], one.clone())?;
            b.set(Tensor::L, &[i, i, a, a], -&one)?;
        }
    }
    Ok(b)
}

/// Rank-1 bracket `[f,g] = f Γ(g) - g Γ(f)`.
pub fn rank1_from_vector_field(gamma: &Derivation) -> BidiffBracket {
    let n = gamma.num_vars();
    let mut b = BidiffBracket::zero(n, 1);
    for i in 0..n {
        let g = gamma.component(i);
        b.set(Tensor::R, &[0, 0, 0, i], g.clone())
            .expect("in range");
        b.set(Tensor::L, &[0, 0, 0, i], -g).expect("in range");
    }
    b
}

/// Bracket over a point (`n = 0`) from structure constants `[e_a, e_b] = Σ_c C^c_{ab} e_c`.
pub fn from_structure_constants(
    rank: usize,
    constants: &[(usize, usize, usize, crate::poly::Rational)],
) -> Result<BidiffBracket, Error> {
    let mut b = BidiffBracket::zero(0, rank);
    for (c, a, bi, v) in constants {
        b.set(Tensor::C, &[*c, *a, *bi], Poly::constant(0, v.clone()))?;
    }
    Ok(b)
}
