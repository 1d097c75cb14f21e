//! Built-in sweeps run by `qdalg selftest`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bracket::{jacobiator_is_zero, left_anchor, left_qd_check, right_qd_check, skew_check};
use crate::bracket::{BidiffBracket, Tensor};
use crate::jacobi::{hamiltonian_anchor, jacobi_bracket, jacobi_pair_check, Multivector};
use crate::poly::{int, Poly};
use crate::qder::Section;
use crate::random::{random_multivector, random_poly, sparse_poly};

/// Number of Jacobi brackets among the 6561 rank-1 brackets on one
/// variable with affine coefficients in {-1, 0, 1}.
pub const RANK1_SWEEP_JACOBI_COUNT: usize = 9;

/// The 9 polynomials `a + b x` with `a, b ∈ {-1, 0, 1}`.
pub fn affine_unit_polys() -> Vec<Poly> {
    let mut out = Vec::new();
    for a in -1..=1 {
        for b in -1..=1 {
            out.push(&Poly::from_int(1, a) + &Poly::var(1, 0).scale(&int(b)));
        }
    }
    out
}

/// The `index`-th bracket of the sweep, with `C`, `L`, `R`, `M` as base-9 digits.
pub fn sweep_bracket(index: usize) -> BidiffBracket {
    let polys = affine_unit_polys();
    let mut b = BidiffBracket::zero(1, 1);
    let mut rem = index;
    for t in Tensor::ALL {
        let p = polys[rem % 9].clone();
        rem /= 9;
        b.set(t, &vec![0; t.arity()], p).expect("in range");
    }
    b
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SweepSummary {
    pub total: usize,
    pub both_qd: usize,
    pub jacobi: usize,
    /// Sweep indices of Jacobi brackets that are not skew.
    pub not_skew: Vec<usize>,
}

impl SweepSummary {
    pub fn passed(&self) -> bool {
        self.not_skew.is_empty()
    }
}

impl fmt::Display for SweepSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "rank-1 sweep: {} brackets, {} QD in both slots, {} Jacobi, {} Jacobi but not skew",
            self.total,
            self.both_qd,
            self.jacobi,
            self.not_skew.len()
        )
    }
}

/// Every rank-1 bracket over one variable with affine `{-1,0,1}` coefficients:
/// those that are QD in both slots and satisfy Jacobi must be skew.
pub fn rank1_sweep() -> SweepSummary {
    let total = 9usize.pow(4);
    let rows: Vec<(bool, bool, bool)> = (0..total)
        .into_par_iter()
        .map(|i| {
            let b = sweep_bracket(i);
            let qd = right_qd_check(&b).is_yes() && left_qd_check(&b).is_yes();
            let jac = qd && jacobiator_is_zero(&b).is_yes();
            let skew = !jac || skew_check(&b).is_yes();
            (qd, jac, skew)
        })
        .collect();
    SweepSummary {
        total,
        both_qd: rows.iter().filter(|r| r.0).count(),
        jacobi: rows.iter().filter(|r| r.1).count(),
        not_skew: rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.2)
            .map(|(i, _)| i)
            .collect(),
    }
}

fn biv(n: usize, entries: Vec<((usize, usize), Poly)>) -> Multivector {
    Multivector::bivector(n, &entries).expect("increasing pairs")
}

fn constant_poly<R: Rng>(rng: &mut R, n: usize) -> Poly {
    Poly::from_int(n, rng.gen_range(-2..=2))
}

/// `(Λ, Γ)` pairs over `n ≤ 3` variables with polynomial degree at most 2.
/// Roughly half come from families satisfying both conditions, the rest are
/// unconstrained random pairs (almost always failing).
pub fn jacobi_pair_corpus<R: Rng>(rng: &mut R, count: usize) -> Vec<(Multivector, Multivector)> {
    (0..count)
        .map(|_| {
            let n = rng.gen_range(1..=3usize);
            if rng.gen_bool(0.5) {
                return (
                    random_multivector(rng, n, 2, 2, 0.3),
                    random_multivector(rng, n, 1, 2, 0.3),
                );
            }
            let family = rng.gen_range(0..6u8);
            match family {
                // Λ = 0, any Γ
                0 => (
                    Multivector::zero(n, 2),
                    random_multivector(rng, n, 1, 2, 0.3),
                ),
                // constant Λ, Γ = 0
                1 => (
                    random_multivector(rng, n, 2, 0, 0.3),
                    Multivector::zero(n, 1),
                ),
                // two variables: Γ = ∂_x and Λ = g(y) ∂x∧∂y
                2 => {
                    let g = random_poly(rng, 1, 2);
                    let g = Poly::from_terms(
                        2,
                        g.terms()
                            .map(|(m, c)| (vec![0, m.exponents()[0]], c.clone())),
                    );
                    let gamma = Multivector::vector(2, vec![Poly::one(2), Poly::zero(2)]).unwrap();
                    (biv(2, vec![((0, 1), g)]), gamma)
                }
                // f ∂_i∧∂_j on three variables, Γ = 0
                3 => {
                    let pairs = [(0, 1), (0, 2), (1, 2)];
                    let ij = *pairs.choose(rng).unwrap();
                    (
                        biv(3, vec![(ij, random_poly(rng, 3, 2))]),
                        Multivector::zero(3, 1),
                    )
                }
                // linear Poisson structure of so(3), scaled
                4 => {
                    let c = constant_poly(rng, 3);
                    let (x, y, z) = (Poly::var(3, 0), Poly::var(3, 1), Poly::var(3, 2));
                    let lam = biv(
                        3,
                        vec![((0, 1), &c * &z), ((1, 2), &c * &x), ((0, 2), -(&c * &y))],
                    );
                    (lam, Multivector::zero(3, 1))
                }
                // contact-type structure on three variables
                _ => {
                    let lam = biv(3, vec![((0, 1), -Poly::var(3, 0)), ((0, 2), Poly::one(3))]);
                    let gamma =
                        Multivector::vector(3, vec![Poly::zero(3), Poly::one(3), Poly::zero(3)])
                            .unwrap();
                    (lam, gamma)
                }
            }
        })
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnCorpusSummary {
    pub cases: usize,
    pub positives: usize,
    pub negatives: usize,
    /// Corpus positions where the two Jacobi verdicts differ.
    pub disagreements: Vec<usize>,
    /// Corpus positions where the Hamiltonian and left anchors differ.
    pub anchor_mismatches: Vec<usize>,
}

impl SnCorpusSummary {
    pub fn passed(&self) -> bool {
        self.disagreements.is_empty() && self.anchor_mismatches.is_empty()
    }
}

impl fmt::Display for SnCorpusSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "jacobi-pair corpus: {} cases ({} positive, {} negative), {} verdict disagreements, {} anchor mismatches",
            self.cases,
            self.positives,
            self.negatives,
            self.disagreements.len(),
            self.anchor_mismatches.len()
        )
    }
}

/// Compares the multivector conditions with the Jacobiator of the induced
/// bracket, and the Hamiltonian anchor with the bracket's left anchor.
pub fn sn_corpus(seed: u64, count: usize) -> SnCorpusSummary {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = jacobi_pair_corpus(&mut rng, count);
    let probes: Vec<Poly> = corpus
        .iter()
        .map(|(l, _)| sparse_poly(&mut rng, l.num_vars(), 2, 0.0))
        .collect();
    let rows: Vec<(bool, bool, bool)> = corpus
        .par_iter()
        .zip(probes.par_iter())
        .map(|((lambda, gamma), f)| {
            let sn = jacobi_pair_check(lambda, gamma).expect("shapes").is_yes();
            let b = jacobi_bracket(lambda, gamma).expect("shapes");
            let jac = jacobiator_is_zero(&b).is_yes();
            let n = lambda.num_vars();
            let ham = hamiltonian_anchor(lambda, gamma, f).expect("shapes");
            let left =
                left_anchor(&b, &Section::new(n, vec![f.clone()]).unwrap()).expect("rank-1 QD");
            (sn, jac, ham == left)
        })
        .collect();
    SnCorpusSummary {
        cases: count,
        positives: rows.iter().filter(|r| r.0).count(),
        negatives: rows.iter().filter(|r| !r.0).count(),
        disagreements: rows
            .iter()
            .enumerate()
            .filter(|(_, r)| r.0 != r.1)
            .map(|(i, _)| i)
            .collect(),
        anchor_mismatches: rows
            .iter()
            .enumerate()
            .filter(|(_, r)| !r.2)
            .map(|(i, _)| i)
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_indexing_covers_every_digit() {
        let b = sweep_bracket(9usize.pow(4) - 1);
        let top = affine_unit_polys()[8].clone();
        for t in Tensor::ALL {
            assert_eq!(b.get(t, &vec![0; t.arity()]).unwrap(), &top);
        }
        assert!(sweep_bracket(4 + 4 * 9 + 4 * 81 + 4 * 729).is_zero());
    }

    #[test]
    fn small_corpus_agrees() {
        let s = sn_corpus(7, 40);
        assert!(s.passed(), "{s}");
        assert!(s.positives > 0 && s.negatives > 0);
    }
}
