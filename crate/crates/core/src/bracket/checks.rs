//! Skew-symmetry, Jacobi identity and the anchor identities, decided by
//! evaluation on monomial sections.
//!
//! A multi-differential operator of order at most `d` in each slot, with
//! polynomial coefficients, vanishes identically iff it vanishes on all
//! tuples of sections `x^β e_a` with `|β| <= d`: ordering the monomials by
//! degree, the value on `x^β` isolates the coefficient of `∂^β` up to the
//! nonzero factor `β!`.

use rand::Rng;
use rayon::prelude::*;

use super::anchor::{left_qd_check, right_qd_check, AnchorData};
use super::BidiffBracket;
use crate::error::{check_dim, Error};
use crate::poly::{Poly, Rational};
use crate::qder::{ad_unchecked, FirstOrderOperator, Section};
use crate::random::random_section;
use crate::witness::{Witness, WitnessValue};

/// Per-slot degree of the grid used for the symmetrized bracket.
pub const SKEW_GRID_DEGREE: u32 = 1;
/// Per-slot degree of the grid used for the Jacobiator. Nesting two
/// first-order brackets gives order at most two in every slot.
pub const JACOBI_GRID_DEGREE: u32 = 2;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Yes,
    No(Witness),
}

impl Verdict {
    pub fn is_yes(&self) -> bool {
        matches!(self, Verdict::Yes)
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Yes => None,
            Verdict::No(w) => Some(w),
        }
    }
}

fn section_witness(
    check: &'static str,
    inputs: &[(&'static str, &Section)],
    defect: &Section,
) -> Option<Witness> {
    let (c, p) = defect.first_nonzero()?;
    let mut all: Vec<(&'static str, WitnessValue)> = inputs
        .iter()
        .map(|(l, s)| (*l, WitnessValue::Section((*s).clone())))
        .collect();
    all.push(("component", WitnessValue::Index(c)));
    Some(Witness {
        check,
        inputs: all,
        defect: p.clone(),
    })
}

fn skew_defect(b: &BidiffBracket, x: &Section, y: &Section) -> Section {
    b.eval_unchecked(x, y).add(&b.eval_unchecked(y, x))
}

/// Decides `[X,Y] + [Y,X] = 0` for all sections.
pub fn skew_check(b: &BidiffBracket) -> Verdict {
    let grid = Section::monomial_grid(b.num_vars(), b.rank(), SKEW_GRID_DEGREE);
    let g = grid.len();
    let found = (0..g * g).into_par_iter().find_map_first(|idx| {
        let (x, y) = (&grid[idx / g], &grid[idx % g]);
        section_witness("skew", &[("X", x), ("Y", y)], &skew_defect(b, x, y))
    });
    match found {
        Some(w) => Verdict::No(w),
        None => Verdict::Yes,
    }
}

/// `J(X,Y,Z) = [[X,Y],Z] - [X,[Y,Z]] + [Y,[X,Z]]`.
pub fn jacobiator(
    b: &BidiffBracket,
    x: &Section,
    y: &Section,
    z: &Section,
) -> Result<Section, Error> {
    for s in [x, y, z] {
        s.check_shape(b.num_vars(), b.rank())?;
    }
    let xy = b.eval_unchecked(x, y);
    let yz = b.eval_unchecked(y, z);
    let xz = b.eval_unchecked(x, z);
    Ok(b.eval_unchecked(&xy, z)
        .sub(&b.eval_unchecked(x, &yz))
        .add(&b.eval_unchecked(y, &xz)))
}

/// Decides whether the Jacobiator vanishes identically.
pub fn jacobiator_is_zero(b: &BidiffBracket) -> Verdict {
    let grid = Section::monomial_grid(b.num_vars(), b.rank(), JACOBI_GRID_DEGREE);
    let g = grid.len();
    let ads: Vec<FirstOrderOperator> = grid.par_iter().map(|s| ad_unchecked(b, s)).collect();
    let pairs: Vec<Section> = (0..g * g)
        .into_par_iter()
        .map(|idx| ads[idx / g].act(&grid[idx % g]))
        .collect();
    let found = (0..g * g).into_par_iter().find_map_first(|xy| {
        let (xi, yi) = (xy / g, xy % g);
        let ad_xy = ad_unchecked(b, &pairs[xy]);
        (0..g).find_map(|zi| {
            let j = ad_xy
                .act(&grid[zi])
                .sub(&ads[xi].act(&pairs[yi * g + zi]))
                .add(&ads[yi].act(&pairs[xi * g + zi]));
            section_witness(
                "jacobi",
                &[("X", &grid[xi]), ("Y", &grid[yi]), ("Z", &grid[zi])],
                &j,
            )
        })
    });
    match found {
        Some(w) => Verdict::No(w),
        None => Verdict::Yes,
    }
}

fn require_left(b: &BidiffBracket) -> Result<AnchorData, Error> {
    right_qd_check(b).anchor().cloned().ok_or_else(|| {
        Error::Precondition("bracket is not a quasi-derivation in the right slot".into())
    })
}

fn require_right(b: &BidiffBracket) -> Result<AnchorData, Error> {
    left_qd_check(b).anchor().cloned().ok_or_else(|| {
        Error::Precondition("bracket is not a quasi-derivation in the left slot".into())
    })
}

/// Decides `[X,Y]^ = [X̂, Ŷ]` for the left anchor on all sections. Checked
/// directly rather than inferred from the Jacobi identity.
pub fn anchor_homomorphism_check(b: &BidiffBracket) -> Result<Verdict, Error> {
    let left = require_left(b)?;
    let grid = Section::monomial_grid(b.num_vars(), b.rank(), JACOBI_GRID_DEGREE);
    let g = grid.len();
    let anchors: Vec<_> = grid.iter().map(|s| left.anchor_of(s)).collect();
    let found = (0..g * g).into_par_iter().find_map_first(|idx| {
        let (xi, yi) = (idx / g, idx % g);
        let lhs = left.anchor_of(&b.eval_unchecked(&grid[xi], &grid[yi]));
        let rhs = anchors[xi].bracket(&anchors[yi]);
        let diff = lhs.sub(&rhs);
        let (i, p) = diff
            .components()
            .iter()
            .enumerate()
            .find(|(_, p)| !p.is_zero())?;
        Some(Witness {
            check: "anchor_homomorphism",
            inputs: vec![
                ("X", WitnessValue::Section(grid[xi].clone())),
                ("Y", WitnessValue::Section(grid[yi].clone())),
                ("direction", WitnessValue::Index(i)),
            ],
            defect: p.clone(),
        })
    });
    Ok(match found {
        Some(w) => Verdict::No(w),
        None => Verdict::Yes,
    })
}

fn require_loday_algebroid(b: &BidiffBracket) -> Result<(AnchorData, AnchorData), Error> {
    let left = require_left(b)?;
    let right = require_right(b)?;
    if !(left.is_tensorial() && right.is_tensorial()) {
        return Err(Error::Precondition("anchors are not tensorial".into()));
    }
    if !jacobiator_is_zero(b).is_yes() {
        return Err(Error::Precondition("Jacobi identity fails".into()));
    }
    Ok((left, right))
}

/// For a Loday algebroid, checks that the right anchor is minus the left one.
pub fn loday_anchor_sign_check(b: &BidiffBracket) -> Result<Verdict, Error> {
    let (left, right) = require_loday_algebroid(b)?;
    for a in 0..b.rank() {
        for i in 0..b.num_vars() {
            let sum = &left.rho[a][i] + &right.rho[a][i];
            if !sum.is_zero() {
                return Ok(Verdict::No(Witness {
                    check: "anchor_sign",
                    inputs: vec![
                        ("basis", WitnessValue::Index(a)),
                        ("direction", WitnessValue::Index(i)),
                    ],
                    defect: sum,
                }));
            }
        }
    }
    Ok(Verdict::Yes)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PointwiseSkew {
    /// Anchor is nonzero at the point and the symmetrized bracket vanishes there.
    Skew,
    /// Anchor vanishes at the point, so skew-symmetry is not required there.
    NotTriggered { skew_holds: bool },
    /// Anchor is nonzero but the symmetrized bracket is not.
    Violated(Witness),
}

/// Evaluates the coefficient tensors of `[X,Y] + [Y,X]` at `point` and
/// requires them to vanish when the left anchor is nonzero there.
pub fn pointwise_skew_at(b: &BidiffBracket, point: &[Rational]) -> Result<PointwiseSkew, Error> {
    check_dim("point dimension", b.num_vars(), point.len())?;
    let (left, _) = require_loday_algebroid(b)?;
    let anchor_nonzero = left
        .rho
        .iter()
        .flatten()
        .any(|p| !num::Zero::is_zero(&p.eval(point)));

    let n = b.num_vars();
    let k = b.rank();
    let mut first_bad: Option<(&'static str, Vec<usize>, Rational)> = None;
    let mut note = |name: &'static str, idx: Vec<usize>, v: Rational| {
        if first_bad.is_none() && !num::Zero::is_zero(&v) {
            first_bad = Some((name, idx, v));
        }
    };
    for c in 0..k {
        for a in 0..k {
            for bb in 0..k {
                note(
                    "C",
                    vec![c, a, bb],
                    (b.c(c, a, bb) + b.c(c, bb, a)).eval(point),
                );
                for i in 0..n {
                    note(
                        "L",
                        vec![c, a, bb, i],
                        (b.l(c, a, bb, i) + b.r(c, bb, a, i)).eval(point),
                    );
                    note(
                        "R",
                        vec![c, a, bb, i],
                        (b.r(c, a, bb, i) + b.l(c, bb, a, i)).eval(point),
                    );
                    for j in 0..n {
                        note(
                            "M",
                            vec![c, a, bb, i, j],
                            (b.m(c, a, bb, i, j) + b.m(c, bb, a, j, i)).eval(point),
                        );
                    }
                }
            }
        }
    }
    Ok(match (anchor_nonzero, first_bad) {
        (false, bad) => PointwiseSkew::NotTriggered {
            skew_holds: bad.is_none(),
        },
        (true, None) => PointwiseSkew::Skew,
        (true, Some((name, idx, v))) => {
            let tensor_pos = crate::bracket::Tensor::ALL
                .iter()
                .position(|t| t.name() == name)
                .expect("known tensor");
            let mut indices = vec![tensor_pos];
            indices.extend(idx);
            PointwiseSkew::Violated(Witness {
                check: "pointwise_skew",
                inputs: vec![
                    ("point", WitnessValue::Point(point.to_vec())),
                    ("tensor_and_indices", WitnessValue::Indices(indices)),
                ],
                defect: Poly::constant(n, v),
            })
        }
    })
}

/// Randomized confirmation of a Jacobi "yes": `count` random triples of
/// degree at most `degree`. Returns the first failing triple.
pub fn spot_check_jacobi<R: Rng>(
    b: &BidiffBracket,
    rng: &mut R,
    count: usize,
    degree: u32,
) -> Option<Witness> {
    (0..count).find_map(|_| {
        let x = random_section(rng, b.num_vars(), b.rank(), degree);
        let y = random_section(rng, b.num_vars(), b.rank(), degree);
        let z = random_section(rng, b.num_vars(), b.rank(), degree);
        let j = jacobiator(b, &x, &y, &z).expect("shapes match");
        section_witness("jacobi_spot", &[("X", &x), ("Y", &y), ("Z", &z)], &j)
    })
}

/// Randomized confirmation of a skew-symmetry "yes".
pub fn spot_check_skew<R: Rng>(
    b: &BidiffBracket,
    rng: &mut R,
    count: usize,
    degree: u32,
) -> Option<Witness> {
    (0..count).find_map(|_| {
        let x = random_section(rng, b.num_vars(), b.rank(), degree);
        let y = random_section(rng, b.num_vars(), b.rank(), degree);
        section_witness(
            "skew_spot",
            &[("X", &x), ("Y", &y)],
            &skew_defect(b, &x, &y),
        )
    })
}
