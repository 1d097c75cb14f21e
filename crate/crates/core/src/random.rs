//! Random generators for polynomials, sections, operators and brackets.
//!
//! Used by the property suites, the self-test sweep and the randomized
//! confirmation pass of the command-line tool. Coefficients are small
//! integers and occasional halves so that exact arithmetic stays cheap.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::bracket::{tangent_algebroid, BidiffBracket, Tensor};
use crate::derivation::Derivation;
use crate::jacobi::Multivector;
use crate::poly::{rat, Monomial, Poly, Rational};
use crate::qder::{FirstOrderOperator, Section};

fn random_coeff<R: Rng>(rng: &mut R) -> Rational {
    let num = rng.gen_range(-3..=3);
    if rng.gen_bool(0.2) {
        rat(num, 2)
    } else {
        rat(num, 1)
    }
}

/// Polynomial with up to four terms of total degree at most `max_degree`.
pub fn random_poly<R: Rng>(rng: &mut R, num_vars: usize, max_degree: u32) -> Poly {
    let monomials = Monomial::up_to_degree(num_vars, max_degree);
    let terms = rng.gen_range(0..=4usize);
    let mut p = Poly::zero(num_vars);
    for _ in 0..terms {
        let m = monomials.choose(rng).expect("nonempty").clone();
        p += Poly::term(m, random_coeff(rng));
    }
    p
}

/// Like [`random_poly`] but zero with probability `zero_prob`.
pub fn sparse_poly<R: Rng>(rng: &mut R, num_vars: usize, max_degree: u32, zero_prob: f64) -> Poly {
    if rng.gen_bool(zero_prob) {
        Poly::zero(num_vars)
    } else {
        random_poly(rng, num_vars, max_degree)
    }
}

pub fn random_section<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    rank: usize,
    max_degree: u32,
) -> Section {
    let comps = (0..rank)
        .map(|_| random_poly(rng, num_vars, max_degree))
        .collect();
    Section::new(num_vars, comps).expect("shape")
}

pub fn random_derivation<R: Rng>(rng: &mut R, num_vars: usize, max_degree: u32) -> Derivation {
    let comps = (0..num_vars)
        .map(|_| random_poly(rng, num_vars, max_degree))
        .collect();
    Derivation::new(num_vars, comps).expect("shape")
}

/// Quasi-derivation: arbitrary zeroth-order part plus a componentwise derivation.
pub fn random_quasi_derivation<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    rank: usize,
    max_degree: u32,
) -> FirstOrderOperator {
    let der = random_derivation(rng, num_vars, max_degree);
    let mut op = FirstOrderOperator::componentwise(&der, rank);
    for c in 0..rank {
        for a in 0..rank {
            op.set_a(c, a, sparse_poly(rng, num_vars, max_degree, 0.3));
        }
    }
    op
}

/// Random multivector of the given degree.
pub fn random_multivector<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    degree: usize,
    max_degree: u32,
    zero_prob: f64,
) -> Multivector {
    let mut tuples = Vec::new();
    increasing_tuples(num_vars, degree, 0, &mut Vec::new(), &mut tuples);
    let comps = tuples
        .into_iter()
        .map(|t| (t, sparse_poly(rng, num_vars, max_degree, zero_prob)));
    Multivector::new(num_vars, degree, comps).expect("valid tuples")
}

fn increasing_tuples(
    n: usize,
    len: usize,
    start: usize,
    cur: &mut Vec<usize>,
    out: &mut Vec<Vec<usize>>,
) {
    if cur.len() == len {
        out.push(cur.clone());
        return;
    }
    for i in start..n {
        cur.push(i);
        increasing_tuples(n, len, i + 1, cur, out);
        cur.pop();
    }
}

/// Bracket whose entries are each nonzero with probability `density`.
pub fn random_bracket<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    rank: usize,
    max_degree: u32,
    density: f64,
) -> BidiffBracket {
    let mut b = BidiffBracket::zero(num_vars, rank);
    let (n, k) = (num_vars, rank);
    for t in Tensor::ALL {
        let extra = t.arity() - 3;
        let count = k * k * k * n.pow(extra as u32);
        for flat in 0..count {
            if !rng.gen_bool(density) {
                continue;
            }
            let mut idx = vec![0; t.arity()];
            let mut rem = flat;
            for pos in (0..t.arity()).rev() {
                let dim = if pos < 3 { k } else { n };
                idx[pos] = rem % dim;
                rem /= dim;
            }
            b.set(t, &idx, random_poly(rng, n, max_degree))
                .expect("in range");
        }
    }
    b
}

/// Bracket that is a quasi-derivation in the right slot by construction:
/// random `C` and `L`, `R^{c,i}_{ab} = δ^c_b ρ^i_a`, `M^{c,ij}_{ab} = δ^c_b m^{ij}_a`.
pub fn random_right_qd_bracket<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    rank: usize,
    max_degree: u32,
) -> BidiffBracket {
    let (n, k) = (num_vars, rank);
    let mut b = BidiffBracket::zero(n, k);
    for c in 0..k {
        for a in 0..k {
            for bb in 0..k {
                b.set(Tensor::C, &[c, a, bb], sparse_poly(rng, n, max_degree, 0.5))
                    .unwrap();
                for i in 0..n {
                    b.set(
                        Tensor::L,
                        &[c, a, bb, i],
                        sparse_poly(rng, n, max_degree, 0.7),
                    )
                    .unwrap();
                }
            }
        }
    }
    for a in 0..k {
        for j in 0..n {
            let rho = sparse_poly(rng, n, max_degree, 0.4);
            let ms: Vec<Poly> = (0..n)
                .map(|_| sparse_poly(rng, n, max_degree, 0.7))
                .collect();
            for bb in 0..k {
                b.set(Tensor::R, &[bb, a, bb, j], rho.clone()).unwrap();
                for (i, m) in ms.iter().enumerate() {
                    b.set(Tensor::M, &[bb, a, bb, i, j], m.clone()).unwrap();
                }
            }
        }
    }
    b
}

/// Bracket passing both quasi-derivation checks: random `C`, tensorial
/// anchors in both slots, and for rank 1 an arbitrary `M`.
pub fn random_qd_bracket<R: Rng>(
    rng: &mut R,
    num_vars: usize,
    rank: usize,
    max_degree: u32,
) -> BidiffBracket {
    let (n, k) = (num_vars, rank);
    let mut b = BidiffBracket::zero(n, k);
    for c in 0..k {
        for a in 0..k {
            for bb in 0..k {
                b.set(Tensor::C, &[c, a, bb], sparse_poly(rng, n, max_degree, 0.5))
                    .unwrap();
            }
        }
    }
    for a in 0..k {
        for i in 0..n {
            let rho = sparse_poly(rng, n, max_degree, 0.3);
            let lam = sparse_poly(rng, n, max_degree, 0.3);
            for c in 0..k {
                b.set(Tensor::R, &[c, a, c, i], rho.clone()).unwrap();
                b.set(Tensor::L, &[c, c, a, i], lam.clone()).unwrap();
            }
        }
    }
    if k == 1 {
        for i in 0..n {
            for j in 0..n {
                b.set(
                    Tensor::M,
                    &[0, 0, 0, i, j],
                    sparse_poly(rng, n, max_degree, 0.5),
                )
                .unwrap();
            }
        }
    }
    b
}

/// Random invertible constant matrix: product of unit triangular factors
/// with a random permutation.
pub fn random_frame<R: Rng>(rng: &mut R, rank: usize) -> (Vec<Vec<Rational>>, Vec<Vec<Rational>>) {
    let mut p = identity_matrix(rank);
    for _ in 0..2 {
        let i = rng.gen_range(0..rank.max(1));
        let j = rng.gen_range(0..rank.max(1));
        if i != j {
            let c = Rational::from_integer(rng.gen_range(-2..=2).into());
            // row operation: row_i += c * row_j
            for col in 0..rank {
                let v = &p[j][col] * &c;
                p[i][col] += v;
            }
        }
    }
    let mut perm: Vec<usize> = (0..rank).collect();
    perm.shuffle(rng);
    let p: Vec<Vec<Rational>> = perm.iter().map(|&r| p[r].clone()).collect();
    let inv = invert(&p).expect("unit triangular products are invertible");
    (p, inv)
}

fn identity_matrix(k: usize) -> Vec<Vec<Rational>> {
    (0..k)
        .map(|i| (0..k).map(|j| rat((i == j) as i64, 1)).collect())
        .collect()
}

/// Gauss–Jordan inverse over the rationals.
pub fn invert(m: &[Vec<Rational>]) -> Option<Vec<Vec<Rational>>> {
    use num::Zero;
    let k = m.len();
    let mut a: Vec<Vec<Rational>> = m.to_vec();
    let mut inv = identity_matrix(k);
    for col in 0..k {
        let pivot = (col..k).find(|&r| !a[r][col].is_zero())?;
        a.swap(col, pivot);
        inv.swap(col, pivot);
        let pv = a[col][col].clone();
        for j in 0..k {
            a[col][j] = &a[col][j] / &pv;
            inv[col][j] = &inv[col][j] / &pv;
        }
        for r in 0..k {
            if r != col && !a[r][col].is_zero() {
                let f = a[r][col].clone();
                for j in 0..k {
                    let t = &a[col][j] * &f;
                    a[r][j] -= t;
                    let t = &inv[col][j] * &f;
                    inv[r][j] -= t;
                }
            }
        }
    }
    Some(inv)
}

/// Transports a bracket along the constant frame change `X = P X'`:
/// `[X', Y']' = P^{-1} [P X', P Y']`. Jacobi, skew and quasi-derivation
/// properties are preserved.
pub fn change_frame(
    b: &BidiffBracket,
    p: &[Vec<Rational>],
    p_inv: &[Vec<Rational>],
) -> BidiffBracket {
    use num::Zero;
    let (n, k) = (b.num_vars(), b.rank());
    let mut out = BidiffBracket::zero(n, k);
    for t in Tensor::ALL {
        let extra = t.arity() - 3;
        let derivs: Vec<Vec<usize>> = match extra {
            0 => vec![vec![]],
            1 => (0..n).map(|i| vec![i]).collect(),
            _ => (0..n)
                .flat_map(|i| (0..n).map(move |j| vec![i, j]))
                .collect(),
        };
        for d in &derivs {
            for c in 0..k {
                for a in 0..k {
                    for bb in 0..k {
                        let mut acc = Poly::zero(n);
                        for c2 in 0..k {
                            if p_inv[c][c2].is_zero() {
                                continue;
                            }
                            for a2 in 0..k {
                                if p[a2][a].is_zero() {
                                    continue;
                                }
                                for b2 in 0..k {
                                    if p[b2][bb].is_zero() {
                                        continue;
                                    }
                                    let mut idx = vec![c2, a2, b2];
                                    idx.extend(d);
                                    let e = b.get(t, &idx).expect("in range");
                                    if e.is_zero() {
                                        continue;
                                    }
                                    let s = &(&p_inv[c][c2] * &p[a2][a]) * &p[b2][bb];
                                    acc += e.scale(&s);
                                }
                            }
                        }
                        let mut idx = vec![c, a, bb];
                        idx.extend(d);
                        out.set(t, &idx, acc).expect("in range");
                    }
                }
            }
        }
    }
    out
}

/// A few Lie algebras over a point: abelian, `r2`, Heisenberg, `sl2`, `so3`.
pub fn lie_algebra_catalogue() -> Vec<BidiffBracket> {
    fn build(k: usize, brackets: &[(usize, usize, usize, i64)]) -> BidiffBracket {
        let mut b = BidiffBracket::zero(0, k);
        for &(a, bb, c, v) in brackets {
            b.set(Tensor::C, &[c, a, bb], Poly::from_int(0, v)).unwrap();
            b.set(Tensor::C, &[c, bb, a], Poly::from_int(0, -v))
                .unwrap();
        }
        b
    }
    vec![
        build(2, &[]),
        build(2, &[(0, 1, 1, 1)]),
        build(3, &[(0, 1, 2, 1)]),
        // sl2: [h,e] = 2e, [h,f] = -2f, [e,f] = h
        build(3, &[(0, 1, 1, 2), (0, 2, 2, -2), (1, 2, 0, 1)]),
        build(3, &[(0, 1, 2, 1), (1, 2, 0, 1), (2, 0, 1, 1)]),
    ]
}

/// Lie algebra from the catalogue in a random basis.
pub fn random_lie_algebra<R: Rng>(rng: &mut R) -> BidiffBracket {
    let cat = lie_algebra_catalogue();
    let b = cat.choose(rng).expect("nonempty").clone();
    let (p, inv) = random_frame(rng, b.rank());
    change_frame(&b, &p, &inv)
}

/// Tangent algebroid in a random constant frame.
pub fn random_tangent_algebroid<R: Rng>(rng: &mut R, num_vars: usize) -> BidiffBracket {
    let b = tangent_algebroid(num_vars).expect("n >= 1");
    let (p, inv) = random_frame(rng, num_vars);
    change_frame(&b, &p, &inv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bracket::{jacobiator_is_zero, left_qd_check, right_qd_check, skew_check};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn frames_invert() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for k in 1..=3 {
            let (p, inv) = random_frame(&mut rng, k);
            for i in 0..k {
                for j in 0..k {
                    let mut s = Rational::from_integer(0.into());
                    for t in 0..k {
                        s += &p[i][t] * &inv[t][j];
                    }
                    assert_eq!(s, rat((i == j) as i64, 1));
                }
            }
        }
    }

    #[test]
    fn catalogue_is_lie() {
        for b in lie_algebra_catalogue() {
            assert!(jacobiator_is_zero(&b).is_yes());
            assert!(skew_check(&b).is_yes());
        }
    }

    #[test]
    fn frame_change_preserves_structure() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for _ in 0..5 {
            let b = random_tangent_algebroid(&mut rng, 2);
            assert!(jacobiator_is_zero(&b).is_yes());
            assert!(right_qd_check(&b).is_yes());
            let l = random_lie_algebra(&mut rng);
            assert!(jacobiator_is_zero(&l).is_yes());
        }
    }

    #[test]
    fn qd_generators_pass_their_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for k in 1..=3 {
            let b = random_qd_bracket(&mut rng, 2, k, 2);
            assert!(right_qd_check(&b).is_yes());
            assert!(left_qd_check(&b).is_yes());
            assert!(right_qd_check(&random_right_qd_bracket(&mut rng, 2, k, 2)).is_yes());
        }
    }
}
