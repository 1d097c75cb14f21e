//! Quasi-derivation checks in each slot and anchor extraction.

use super::BidiffBracket;
use crate::derivation::Derivation;
use crate::error::{check_dim, Error};
use crate::poly::Poly;
use crate::qder::Section;
use crate::witness::{Witness, WitnessValue};

/// Anchor coefficients. The anchor of a section `X` is the derivation
///
/// `f ↦ Σ_{a,j} (ρ^j_a X^a + Σ_i m^{ij}_a ∂_i X^a) ∂_j f`.
///
/// `rho[a][j]` is the tensorial part; `m[a][i][j]` is the part that sees
/// first derivatives of `X` (index `i`) and differentiates `f` along `j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AnchorData {
    pub rho: Vec<Vec<Poly>>,
    pub m: Vec<Vec<Vec<Poly>>>,
}

impl AnchorData {
    pub fn zero(num_vars: usize, rank: usize) -> Self {
        AnchorData {
            rho: vec![vec![Poly::zero(num_vars); num_vars]; rank],
            m: vec![vec![vec![Poly::zero(num_vars); num_vars]; num_vars]; rank],
        }
    }

    pub fn rank(&self) -> usize {
        self.rho.len()
    }

    /// True when the differential part vanishes.
    pub fn is_tensorial(&self) -> bool {
        self.m.iter().flatten().flatten().all(Poly::is_zero)
    }

    pub fn anchor_of(&self, x: &Section) -> Derivation {
        let n = x.num_vars();
        let mut comps = vec![Poly::zero(n); n];
        for (a, xa) in x.components().iter().enumerate() {
            if xa.is_zero() {
                continue;
            }
            for (j, comp) in comps.iter_mut().enumerate() {
                let r = &self.rho[a][j];
                if !r.is_zero() {
                    *comp += r * xa;
                }
            }
            for i in 0..n {
                let d = xa.partial(i);
                if d.is_zero() {
                    continue;
                }
                for (j, comp) in comps.iter_mut().enumerate() {
                    let m = &self.m[a][i][j];
                    if !m.is_zero() {
                        *comp += m * &d;
                    }
                }
            }
        }
        Derivation::new(n, comps).expect("shape")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum AnchorVerdict {
    Yes(AnchorData),
    No(Witness),
}

impl AnchorVerdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, AnchorVerdict::Yes(_))
    }

    pub fn anchor(&self) -> Option<&AnchorData> {
        match self {
            AnchorVerdict::Yes(a) => Some(a),
            AnchorVerdict::No(_) => None,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    /// `[X, fY] - f[X,Y]` must be a multiple of `Y`.
    Right,
    /// `[fX, Y] - f[X,Y]` must be a multiple of `X`.
    Left,
}

impl Side {
    fn check_name(self) -> &'static str {
        match self {
            Side::Right => "right_qd",
            Side::Left => "left_qd",
        }
    }
}

/// One entry of the first-order part seen from the probed slot.
///
/// `fixed` is the basis index of the other slot, `probed` the basis index of
/// the slot that gets multiplied by `f`, `c` the output index, `j` the
/// direction in which `f` is differentiated, `inner` the derivative index of
/// the other slot (for the M tensor).
fn entry(
    b: &BidiffBracket,
    side: Side,
    c: usize,
    fixed: usize,
    probed: usize,
    inner: Option<usize>,
    j: usize,
) -> &Poly {
    match (side, inner) {
        (Side::Right, None) => b.r(c, fixed, probed, j),
        (Side::Right, Some(i)) => b.m(c, fixed, probed, i, j),
        (Side::Left, None) => b.l(c, probed, fixed, j),
        (Side::Left, Some(i)) => b.m(c, probed, fixed, j, i),
    }
}

fn qd_check(b: &BidiffBracket, side: Side) -> AnchorVerdict {
    let n = b.num_vars();
    let k = b.rank();
    // Pass 0 checks the tensorial part, pass 1 the M tensor; the second is
    // only meaningful once the first has passed.
    for inner_pass in [false, true] {
        for fixed in 0..k {
            let inners: Vec<Option<usize>> = if inner_pass {
                (0..n).map(Some).collect()
            } else {
                vec![None]
            };
            for inner in inners {
                for j in 0..n {
                    for probed in 0..k {
                        for c in 0..k {
                            let e = entry(b, side, c, fixed, probed, inner, j);
                            let bad = if c != probed {
                                !e.is_zero()
                            } else {
                                probed > 0 && e != entry(b, side, 0, fixed, 0, inner, j)
                            };
                            if bad {
                                return AnchorVerdict::No(qd_witness(
                                    b, side, fixed, inner, j, probed, c,
                                ));
                            }
                        }
                    }
                }
            }
        }
    }
    let mut data = AnchorData::zero(n, k);
    if k > 0 {
        for a in 0..k {
            for j in 0..n {
                data.rho[a][j] = entry(b, side, 0, a, 0, None, j).clone();
                for i in 0..n {
                    data.m[a][i][j] = entry(b, side, 0, a, 0, Some(i), j).clone();
                }
            }
        }
    }
    AnchorVerdict::Yes(data)
}

fn qd_witness(
    b: &BidiffBracket,
    side: Side,
    fixed: usize,
    inner: Option<usize>,
    j: usize,
    probed: usize,
    c: usize,
) -> Witness {
    let n = b.num_vars();
    let k = b.rank();
    let mut other = Section::basis(n, k, fixed);
    if let Some(i) = inner {
        other = other.mul_poly(&Poly::var(n, i));
    }
    let probe = if c == probed {
        Section::basis(n, k, 0).add(&Section::basis(n, k, probed))
    } else {
        Section::basis(n, k, probed)
    };
    let f = Poly::var(n, j);
    let diff = match side {
        Side::Right => b
            .eval_unchecked(&other, &probe.mul_poly(&f))
            .sub(&b.eval_unchecked(&other, &probe).mul_poly(&f)),
        Side::Left => b
            .eval_unchecked(&probe.mul_poly(&f), &other)
            .sub(&b.eval_unchecked(&probe, &other).mul_poly(&f)),
    };
    let (defect, which) = if c == probed {
        (
            diff.component(probed) - diff.component(0),
            WitnessValue::Indices(vec![0, probed]),
        )
    } else {
        (diff.component(c).clone(), WitnessValue::Index(c))
    };
    let (x, y) = match side {
        Side::Right => (other, probe),
        Side::Left => (probe, other),
    };
    let which_label = if c == probed { "compare" } else { "component" };
    Witness {
        check: side.check_name(),
        inputs: vec![
            ("X", WitnessValue::Section(x)),
            ("f", WitnessValue::Poly(f)),
            ("Y", WitnessValue::Section(y)),
            (which_label, which),
        ],
        defect,
    }
}

/// Decides whether every `[X, ·]` is a quasi-derivation, i.e.
/// `[X, fY] = f[X,Y] + X̂(f) Y`. On success returns the left-anchor data.
///
/// For `k > 1` a witness with `component` set reports an `e_c` part of
/// `[X,fY] - f[X,Y]` where `Y = e_b`, `c != b`; with `compare = [0, b]` it
/// reports that `Y = e_0 + e_b` is scaled unevenly.
pub fn right_qd_check(b: &BidiffBracket) -> AnchorVerdict {
    qd_check(b, Side::Right)
}

/// Mirror of [`right_qd_check`] for the left slot: `[fX, Y] = f[X,Y] + Ỹ(f) X`.
/// On success returns the right-anchor data.
pub fn left_qd_check(b: &BidiffBracket) -> AnchorVerdict {
    qd_check(b, Side::Left)
}

fn require(verdict: AnchorVerdict, what: &str) -> Result<AnchorData, Error> {
    match verdict {
        AnchorVerdict::Yes(a) => Ok(a),
        AnchorVerdict::No(_) => Err(Error::Precondition(format!(
            "bracket is not a quasi-derivation in the {what} slot"
        ))),
    }
}

/// `X̂`, defined by `[X, fY] = f[X,Y] + X̂(f) Y`.
pub fn left_anchor(b: &BidiffBracket, x: &Section) -> Result<Derivation, Error> {
    x.check_shape(b.num_vars(), b.rank())?;
    Ok(require(right_qd_check(b), "right")?.anchor_of(x))
}

/// `Ỹ`, defined by `[fX, Y] = f[X,Y] + Ỹ(f) X`.
pub fn right_anchor(b: &BidiffBracket, y: &Section) -> Result<Derivation, Error> {
    y.check_shape(b.num_vars(), b.rank())?;
    Ok(require(left_qd_check(b), "left")?.anchor_of(y))
}

/// Whether both anchors are `A`-linear. For rank above one this is forced
/// by the quasi-derivation property in both slots and is asserted.
pub fn anchors_tensorial(b: &BidiffBracket) -> Result<bool, Error> {
    let left = require(right_qd_check(b), "right")?;
    let right = require(left_qd_check(b), "left")?;
    let tensorial = left.is_tensorial() && right.is_tensorial();
    assert!(
        b.rank() <= 1 || tensorial,
        "rank > 1 quasi-derivation bracket with a differential anchor"
    );
    Ok(tensorial)
}

/// `(ĝX - gX̂)(f) Y - (f̃Y - fỸ)(g) X`, obtained by expanding `[gX, fY]`
/// in both orders. Zero for every bracket passing both checks.
pub fn anchor_linearity_identity_check(
    b: &BidiffBracket,
    f: &Poly,
    g: &Poly,
    x: &Section,
    y: &Section,
) -> Result<Section, Error> {
    let n = b.num_vars();
    check_dim("number of variables", n, f.num_vars())?;
    check_dim("number of variables", n, g.num_vars())?;
    x.check_shape(n, b.rank())?;
    y.check_shape(n, b.rank())?;
    let left = require(right_qd_check(b), "right")?;
    let right = require(left_qd_check(b), "left")?;

    let hat_gx = left.anchor_of(&x.mul_poly(g));
    let g_hat_x = left.anchor_of(x).mul_poly(g);
    let lhs = hat_gx.sub(&g_hat_x).act(f);

    let tilde_fy = right.anchor_of(&y.mul_poly(f));
    let f_tilde_y = right.anchor_of(y).mul_poly(f);
    let rhs = tilde_fy.sub(&f_tilde_y).act(g);

    Ok(y.mul_poly(&lhs).sub(&x.mul_poly(&rhs)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{rank1_from_vector_field, tangent_algebroid, Tensor};
    use crate::jacobi::{jacobi_bracket, Multivector};
    use crate::parse::parse_poly;
    use crate::poly::default_var_names;

    fn p(n: usize, s: &str) -> Poly {
        parse_poly(s, &default_var_names(n)).unwrap()
    }

    fn identity_pairing(n: usize, sign: i64) -> Vec<Vec<Poly>> {
        (0..n)
            .map(|a| {
                (0..n)
                    .map(|i| {
                        if a == i {
                            Poly::from_int(n, sign)
                        } else {
                            Poly::zero(n)
                        }
                    })
                    .collect()
            })
            .collect()
    }

    fn poisson_xy() -> BidiffBracket {
        let lambda = Multivector::bivector(2, &[((0, 1), Poly::one(2))]).unwrap();
        jacobi_bracket(&lambda, &Multivector::zero(2, 1)).unwrap()
    }

    #[test]
    fn zero_bracket_has_zero_anchors() {
        let b = BidiffBracket::zero(2, 2);
        assert_eq!(
            right_qd_check(&b),
            AnchorVerdict::Yes(AnchorData::zero(2, 2))
        );
        assert_eq!(
            left_qd_check(&b),
            AnchorVerdict::Yes(AnchorData::zero(2, 2))
        );
    }

    #[test]
    fn tangent_anchors_are_plus_minus_identity() {
        for n in 1..=3 {
            let b = tangent_algebroid(n).unwrap();
            let left = right_qd_check(&b).anchor().cloned().unwrap();
            assert_eq!(left.rho, identity_pairing(n, 1));
            assert!(left.is_tensorial());
            let right = left_qd_check(&b).anchor().cloned().unwrap();
            assert_eq!(right.rho, identity_pairing(n, -1));
        }
        // oracle: [f∂_x, ∂_y] = -(∂_y f)∂_x
        let b = tangent_algebroid(2).unwrap();
        let f = p(2, "x*y^2");
        let fx = Section::new(2, vec![f.clone(), Poly::zero(2)]).unwrap();
        let dy = Section::basis(2, 2, 1);
        let r = b.eval(&fx, &dy).unwrap();
        assert_eq!(r.component(0), &-f.partial(1));
        assert_eq!(
            right_anchor(&b, &dy).unwrap().apply(&f).unwrap(),
            -f.partial(1)
        );
    }

    #[test]
    fn off_diagonal_m_entry_fails_right_check() {
        // M^{1,xy}_{22} = 1 in one-based indexing
        let mut b = BidiffBracket::zero(2, 2);
        b.set(Tensor::M, &[0, 1, 1, 0, 1], Poly::one(2)).unwrap();
        let w = match right_qd_check(&b) {
            AnchorVerdict::No(w) => w,
            v => panic!("expected no, got {v:?}"),
        };
        assert_eq!(w.index("component"), Some(0));
        assert_eq!(w.poly("f"), Some(&p(2, "y")));
        assert_eq!(w.section("Y"), Some(&Section::basis(2, 2, 1)));
        // oracle: [x e_2, y e_2] - y [x e_2, e_2] has an e_1 part
        let xe2 = Section::basis(2, 2, 1).mul_poly(&p(2, "x"));
        let e2 = Section::basis(2, 2, 1);
        let y = p(2, "y");
        let diff = b
            .eval(&xe2, &e2.mul_poly(&y))
            .unwrap()
            .sub(&b.eval(&xe2, &e2).unwrap().mul_poly(&y));
        assert_eq!(diff.component(0), &Poly::one(2));
        assert_eq!(w.defect, Poly::one(2));
    }

    #[test]
    fn uneven_diagonal_fails_with_compare_witness() {
        let mut b = BidiffBracket::zero(1, 2);
        b.set(Tensor::R, &[0, 0, 0, 0], Poly::one(1)).unwrap();
        let w = match right_qd_check(&b) {
            AnchorVerdict::No(w) => w,
            v => panic!("expected no, got {v:?}"),
        };
        assert_eq!(w.input("compare"), Some(&WitnessValue::Indices(vec![0, 1])));
        assert_eq!(w.defect, Poly::from_int(1, -1));
    }

    #[test]
    fn jacobi_bracket_right_anchor_is_skew_counterpart() {
        let lambda = Multivector::bivector(2, &[((0, 1), p(2, "x"))]).unwrap();
        let gamma =
            Multivector::from_derivation(&Derivation::new(2, vec![p(2, "y"), p(2, "1")]).unwrap());
        let b = jacobi_bracket(&lambda, &gamma).unwrap();
        let left = right_qd_check(&b).anchor().cloned().unwrap();
        let right = left_qd_check(&b).anchor().cloned().unwrap();
        for j in 0..2 {
            assert_eq!(right.rho[0][j], -&left.rho[0][j]);
            for i in 0..2 {
                assert_eq!(right.m[0][i][j], -&left.m[0][i][j]);
            }
        }
        // oracle: expand [fX, Y] - f[X,Y] directly for X = 1, Y = g
        let f = p(2, "x^2 + y");
        let g = p(2, "x*y");
        let one = Section::new(2, vec![Poly::one(2)]).unwrap();
        let gs = Section::new(2, vec![g.clone()]).unwrap();
        let diff = b
            .eval(&one.mul_poly(&f), &gs)
            .unwrap()
            .sub(&b.eval(&one, &gs).unwrap().mul_poly(&f));
        assert_eq!(
            diff.component(0),
            &right_anchor(&b, &gs).unwrap().apply(&f).unwrap()
        );
    }

    #[test]
    fn anchor_examples() {
        let b = tangent_algebroid(2).unwrap();
        assert!(left_anchor(&b, &Section::zero(2, 2)).unwrap().is_zero());
        let x = Section::new(2, vec![p(2, "x*y"), p(2, "y - 1")]).unwrap();
        assert_eq!(left_anchor(&b, &x).unwrap().components(), x.components());

        let mut bad = BidiffBracket::zero(1, 2);
        bad.set(Tensor::R, &[0, 0, 1, 0], Poly::one(1)).unwrap();
        assert!(matches!(
            left_anchor(&bad, &Section::zero(1, 2)),
            Err(Error::Precondition(_))
        ));
    }

    #[test]
    fn tensorial_examples() {
        assert!(anchors_tensorial(&tangent_algebroid(2).unwrap()).unwrap());
        assert!(!anchors_tensorial(&poisson_xy()).unwrap());
        let gamma = Derivation::new(1, vec![p(1, "x")]).unwrap();
        assert!(anchors_tensorial(&rank1_from_vector_field(&gamma)).unwrap());
    }

    #[test]
    fn anchor_linearity_identity_examples() {
        let b = poisson_xy();
        let one = Section::new(2, vec![Poly::one(2)]).unwrap();
        let defect =
            anchor_linearity_identity_check(&b, &Poly::one(2), &Poly::one(2), &one, &one).unwrap();
        assert!(defect.is_zero());

        let (f, g) = (p(2, "x"), p(2, "y"));
        assert!(anchor_linearity_identity_check(&b, &f, &g, &one, &one)
            .unwrap()
            .is_zero());
        // both sides are individually nonzero: ŷ(x) = -1 and x̃(y) = -1
        let left = right_qd_check(&b).anchor().cloned().unwrap();
        let right = left_qd_check(&b).anchor().cloned().unwrap();
        let lhs = left.anchor_of(&one.mul_poly(&g)).act(&f);
        let rhs = right.anchor_of(&one.mul_poly(&f)).act(&g);
        assert_eq!(lhs, Poly::from_int(2, -1));
        assert_eq!(rhs, Poly::from_int(2, -1));

        let t = tangent_algebroid(2).unwrap();
        let x = Section::new(2, vec![p(2, "x^2"), p(2, "y")]).unwrap();
        let y = Section::new(2, vec![p(2, "1"), p(2, "x*y")]).unwrap();
        assert!(
            anchor_linearity_identity_check(&t, &p(2, "x*y"), &p(2, "y^2 + x"), &x, &y)
                .unwrap()
                .is_zero()
        );
    }
}
