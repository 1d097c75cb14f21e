//! Acceptance gate. Each criterion prints one PASS/FAIL line; the test fails
//! if any criterion does. Run with `--nocapture` to see the lines.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use qdalg::bracket::{
    anchor_homomorphism_check, anchor_linearity_identity_check, anchors_tensorial,
    jacobiator_is_zero, left_qd_check, rank1_from_vector_field, right_qd_check, tangent_algebroid,
};
use qdalg::jacobi::{jacobi_bracket, jacobi_pair_check, poisson_skew_identity_check};
use qdalg::qder::{is_quasi_derivation, leibniz_qder_check, op_commutator, universal_anchor};
use qdalg::random::{
    change_frame, random_derivation, random_frame, random_lie_algebra, random_poly,
    random_qd_bracket, random_quasi_derivation, random_right_qd_bracket, random_section,
    random_tangent_algebroid,
};
use qdalg::selftest::{
    affine_unit_polys, jacobi_pair_corpus, rank1_sweep, sn_corpus, RANK1_SWEEP_JACOBI_COUNT,
};
use qdalg::{BidiffBracket, Derivation, Poly, Tensor};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

/// Name, check, and time limit in seconds.
type Criterion = (&'static str, fn() -> Outcome, u64);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn dims<R: Rng>(rng: &mut R) -> (usize, usize) {
    (rng.gen_range(1..=3), rng.gen_range(1..=3))
}

/// Quasi-derivations satisfy the module Leibniz rule with their anchor, and
/// the anchor is a derivation.
fn quasi_derivation_leibniz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(101);
    for case in 0..200 {
        let (n, k) = dims(&mut rng);
        let d = random_quasi_derivation(&mut rng, n, k, 2);
        let anchor = universal_anchor(&d).map_err(|e| format!("case {case}: {e}"))?;
        for _ in 0..20 {
            let f = random_poly(&mut rng, n, 2);
            let g = random_poly(&mut rng, n, 2);
            let x = random_section(&mut rng, n, k, 2);
            let lhs = d.apply(&x.mul_poly(&f)).unwrap();
            let af = anchor.apply(&f).unwrap();
            let rhs = d.apply(&x).unwrap().mul_poly(&f).add(&x.mul_poly(&af));
            ensure(lhs == rhs, || {
                format!("case {case}: D(fX) != fD(X) + D^(f)X")
            })?;
            let lhs = anchor.apply(&(&f * &g)).unwrap();
            let rhs = &(&f * &anchor.apply(&g).unwrap()) + &(&af * &g);
            ensure(lhs == rhs, || {
                format!("case {case}: anchor is not a derivation")
            })?;
        }
    }
    Ok("200 operators x 20 probes".into())
}

/// Commutators of quasi-derivations are quasi-derivations, and the anchor
/// of the commutator is the commutator of anchors.
fn commutator_closure() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(102);
    for case in 0..100 {
        let (n, k) = dims(&mut rng);
        let d1 = random_quasi_derivation(&mut rng, n, k, 2);
        let d2 = random_quasi_derivation(&mut rng, n, k, 2);
        let c = op_commutator(&d1, &d2).map_err(|e| format!("case {case}: {e}"))?;
        ensure(is_quasi_derivation(&c).is_yes(), || {
            format!("case {case}: commutator not QD")
        })?;
        // oracle: composition applied to a probe section
        let x = random_section(&mut rng, n, k, 2);
        let composed = d1
            .apply(&d2.apply(&x).unwrap())
            .unwrap()
            .sub(&d2.apply(&d1.apply(&x).unwrap()).unwrap());
        ensure(c.apply(&x).unwrap() == composed, || {
            format!("case {case}: commutator disagrees with composition")
        })?;
        let a1 = universal_anchor(&d1).unwrap();
        let a2 = universal_anchor(&d2).unwrap();
        let lhs = universal_anchor(&c).unwrap();
        ensure(lhs == a1.commutator(&a2).unwrap(), || {
            format!("case {case}: anchor is not a homomorphism")
        })?;
    }
    Ok("100 pairs".into())
}

/// `[D1, f D2] = f [D1, D2] + D1^(f) D2` as operators.
fn commutator_leibniz() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(103);
    for case in 0..100 {
        let (n, k) = dims(&mut rng);
        let d1 = random_quasi_derivation(&mut rng, n, k, 2);
        let d2 = random_quasi_derivation(&mut rng, n, k, 2);
        let f = random_poly(&mut rng, n, 2);
        let defect = leibniz_qder_check(&d1, &d2, &f).map_err(|e| format!("case {case}: {e}"))?;
        ensure(defect.is_zero(), || format!("case {case}: nonzero defect"))?;
        // oracle: the same identity assembled from the public operations
        let lhs = op_commutator(&d1, &d2.mul_poly(&f)).unwrap();
        let af = universal_anchor(&d1).unwrap().apply(&f).unwrap();
        let rhs = op_commutator(&d1, &d2)
            .unwrap()
            .mul_poly(&f)
            .add(&d2.mul_poly(&af));
        ensure(lhs == rhs, || {
            format!("case {case}: assembled identity fails")
        })?;
    }
    Ok("100 triples".into())
}

/// Candidate brackets whose second-order part has the shape allowed by
/// one quasi-derivation check or the other, or both at once.
fn qd_candidate<R: Rng>(rng: &mut R, n: usize, k: usize) -> BidiffBracket {
    match rng.gen_range(0..4) {
        0 => random_qd_bracket(rng, n, k, 2),
        1 => random_right_qd_bracket(rng, n, k, 2),
        2 => {
            // mirror of a right-QD bracket: swap the slots
            let r = random_right_qd_bracket(rng, n, k, 2);
            let mut b = BidiffBracket::zero(n, k);
            for (idx, p) in r.entries(Tensor::C) {
                b.set(Tensor::C, &[idx[0], idx[2], idx[1]], p.clone())
                    .unwrap();
            }
            for (idx, p) in r.entries(Tensor::L) {
                b.set(Tensor::R, &[idx[0], idx[2], idx[1], idx[3]], p.clone())
                    .unwrap();
            }
            for (idx, p) in r.entries(Tensor::R) {
                b.set(Tensor::L, &[idx[0], idx[2], idx[1], idx[3]], p.clone())
                    .unwrap();
            }
            for (idx, p) in r.entries(Tensor::M) {
                b.set(
                    Tensor::M,
                    &[idx[0], idx[2], idx[1], idx[4], idx[3]],
                    p.clone(),
                )
                .unwrap();
            }
            b
        }
        _ => {
            // both diagonal shapes at once, with independent second-order data
            let mut b = random_qd_bracket(rng, n, k, 2);
            for a in 0..k {
                for i in 0..n {
                    for j in 0..n {
                        let m = if rng.gen_bool(0.4) {
                            random_poly(rng, n, 1)
                        } else {
                            Poly::zero(n)
                        };
                        let m2 = if rng.gen_bool(0.4) {
                            random_poly(rng, n, 1)
                        } else {
                            Poly::zero(n)
                        };
                        for c in 0..k {
                            let old = b.m(c, a, c, i, j).clone();
                            b.set(Tensor::M, &[c, a, c, i, j], &old + &m).unwrap();
                            let old = b.m(c, c, a, i, j).clone();
                            b.set(Tensor::M, &[c, c, a, i, j], &old + &m2).unwrap();
                        }
                    }
                }
            }
            b
        }
    }
}

/// For rank at least 2, both quasi-derivation checks force tensorial anchors,
/// and the anchor identity holds on random inputs.
fn higher_rank_anchors_tensorial() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(104);
    let (mut passed, mut rejected_nontensorial, mut tried) = (0, 0, 0);
    while passed < 100 {
        tried += 1;
        ensure(tried < 5000, || {
            format!("only {passed} candidates passed both checks")
        })?;
        let n = rng.gen_range(1..=2);
        let k = rng.gen_range(2..=3);
        let b = qd_candidate(&mut rng, n, k);
        let has_second_order = !b.entries(Tensor::M).is_empty();
        if !(right_qd_check(&b).is_yes() && left_qd_check(&b).is_yes()) {
            if has_second_order {
                rejected_nontensorial += 1;
            }
            continue;
        }
        passed += 1;
        ensure(anchors_tensorial(&b).unwrap(), || {
            format!("candidate {tried}: differential anchor at rank {k}")
        })?;
        let f = random_poly(&mut rng, n, 2);
        let g = random_poly(&mut rng, n, 2);
        let x = random_section(&mut rng, n, k, 2);
        let y = random_section(&mut rng, n, k, 2);
        let e = anchor_linearity_identity_check(&b, &f, &g, &x, &y).map_err(|e| e.to_string())?;
        ensure(e.is_zero(), || {
            format!("candidate {tried}: anchor identity defect")
        })?;
    }
    ensure(rejected_nontensorial > 0, || {
        "no candidate with second-order part was exercised".into()
    })?;
    Ok(format!(
        "{passed} passing brackets, {rejected_nontensorial} second-order candidates rejected"
    ))
}

/// Brackets satisfying Jacobi have an anchor that is a homomorphism.
fn jacobi_implies_anchor_homomorphism() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(105);
    let mut pairs = jacobi_pair_corpus(&mut rng, 400)
        .into_iter()
        .filter(|(l, g)| jacobi_pair_check(l, g).unwrap().is_yes());
    let mut counts = [0usize; 4];
    for case in 0..100 {
        let family = case % 4;
        let b = match family {
            0 => {
                let n = rng.gen_range(1..=3);
                random_tangent_algebroid(&mut rng, n)
            }
            1 => {
                let n = rng.gen_range(1..=3);
                rank1_from_vector_field(&random_derivation(&mut rng, n, 2))
            }
            2 => {
                let (l, g) = pairs.next().ok_or("ran out of Jacobi pairs")?;
                jacobi_bracket(&l, &g).unwrap()
            }
            _ => random_lie_algebra(&mut rng),
        };
        ensure(jacobiator_is_zero(&b).is_yes(), || {
            format!("case {case}: generator broke Jacobi")
        })?;
        let v = anchor_homomorphism_check(&b).map_err(|e| format!("case {case}: {e}"))?;
        ensure(v.is_yes(), || {
            format!("case {case}: anchor is not a homomorphism")
        })?;
        counts[family] += 1;
    }
    Ok(format!(
        "tangent {}, vector field {}, jacobi pair {}, lie algebra {}",
        counts[0], counts[1], counts[2], counts[3]
    ))
}

/// Exhaustive rank-1 sweep on one variable, through the library and the binary.
fn rank1_sweep_is_skew() -> Outcome {
    let s = rank1_sweep();
    ensure(s.passed(), || {
        format!("Jacobi but not skew at sweep indices {:?}", s.not_skew)
    })?;
    ensure(s.jacobi == RANK1_SWEEP_JACOBI_COUNT, || {
        format!(
            "found {} Jacobi brackets, recorded {}",
            s.jacobi, RANK1_SWEEP_JACOBI_COUNT
        )
    })?;
    // oracle: the Jacobi brackets are exactly f Γ(g) - g Γ(f) for affine Γ
    let mut expected: Vec<BidiffBracket> = affine_unit_polys()
        .into_iter()
        .map(|p| rank1_from_vector_field(&Derivation::new(1, vec![p]).unwrap()))
        .collect();
    expected.dedup();
    ensure(expected.len() == s.jacobi, || {
        format!("vector-field family has {} members", expected.len())
    })?;
    for b in &expected {
        ensure(jacobiator_is_zero(b).is_yes(), || {
            "vector-field bracket fails Jacobi".into()
        })?;
    }
    let out = Command::new(env!("CARGO_BIN_EXE_qdalg"))
        .arg("selftest")
        .output()
        .map_err(|e| e.to_string())?;
    ensure(out.status.code() == Some(0), || {
        format!(
            "selftest exited {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stdout)
        )
    })?;
    Ok(format!("{s}"))
}

/// The multivector conditions agree with the Jacobiator of the bracket.
fn sn_equivalence() -> Outcome {
    let s = sn_corpus(107, 300);
    ensure(s.passed(), || {
        format!(
            "{s}: disagreements {:?}, anchor mismatches {:?}",
            s.disagreements, s.anchor_mismatches
        )
    })?;
    ensure(s.negatives >= 30, || {
        format!("only {} negative cases", s.negatives)
    })?;
    ensure(s.positives >= 30, || {
        format!("only {} positive cases", s.positives)
    })?;
    Ok(format!("{s}"))
}

/// Jacobi plus Leibniz forces skew-symmetry through the polynomial identity.
fn poisson_skew_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(108);
    let mut corpus = jacobi_pair_corpus(&mut rng, 600)
        .into_iter()
        .filter(|(l, g)| jacobi_pair_check(l, g).unwrap().is_yes());
    for case in 0..100 {
        let b = if case % 3 == 0 {
            let n = rng.gen_range(1..=3);
            let (p, inv) = random_frame(&mut rng, 1);
            change_frame(
                &rank1_from_vector_field(&random_derivation(&mut rng, n, 2)),
                &p,
                &inv,
            )
        } else {
            let (l, g) = corpus.next().ok_or("ran out of Jacobi pairs")?;
            jacobi_bracket(&l, &g).unwrap()
        };
        let n = b.num_vars();
        let f = random_poly(&mut rng, n, 2);
        let g = random_poly(&mut rng, n, 2);
        let h = random_poly(&mut rng, n, 2);
        let d =
            poisson_skew_identity_check(&b, &f, &g, &h).map_err(|e| format!("case {case}: {e}"))?;
        ensure(d.is_zero(), || {
            format!("case {case}: identity defect {:?}", d)
        })?;
    }
    Ok("100 brackets and triples".into())
}

fn fixtures_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures")
}

fn run_cli(args: &[&str]) -> Result<(i32, String, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_qdalg"))
        .args(args)
        .current_dir(fixtures_dir())
        .output()
        .map_err(|e| e.to_string())?;
    Ok((
        out.status.code().unwrap_or(-1),
        String::from_utf8_lossy(&out.stdout).into_owned(),
        String::from_utf8_lossy(&out.stderr).into_owned(),
    ))
}

fn read_expected(name: &str) -> String {
    std::fs::read_to_string(fixtures_dir().join("expected").join(name)).unwrap_or_default()
}

/// Every fixture document reproduces its stored report and exit code.
fn fixture_regression() -> Outcome {
    let table = [
        ("minimal", 0),
        ("tangent2", 0),
        ("index_out_of_range", 2),
        ("poisson_plane", 0),
        ("operator_dx", 0),
        ("operator_nonqd", 0),
        ("nonqd", 1),
        ("malformed", 2),
        ("action_algebroid", 0),
        ("loday_point", 0),
        ("jacobi_failure", 0),
        ("vector_field_line", 0),
    ];
    for (name, code) in table {
        let file = format!("{name}.json");
        let (got, stdout, stderr) = run_cli(&["check", &file])?;
        ensure(got == code, || {
            format!("{name}: exit {got}, expected {code}")
        })?;
        ensure(stdout == read_expected(&format!("{name}.report")), || {
            format!("{name}: report differs")
        })?;
        ensure(stderr == read_expected(&format!("{name}.stderr")), || {
            format!("{name}: stderr differs")
        })?;
        let (_, again, _) = run_cli(&["check", &file])?;
        ensure(again == stdout, || {
            format!("{name}: report is not deterministic")
        })?;
    }
    for name in ["tangent2", "poisson_plane", "operator_dx"] {
        let (code, stdout, _) = run_cli(&["anchors", &format!("{name}.json")])?;
        ensure(code == 0, || format!("{name}: anchors exit {code}"))?;
        ensure(stdout == read_expected(&format!("{name}.anchors")), || {
            format!("{name}: anchors differ")
        })?;
    }
    let (code, _, _) = run_cli(&["check", "does_not_exist.json"])?;
    ensure(code == 2, || format!("missing file: exit {code}"))?;
    Ok(format!("{} documents", table.len()))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        (
            "quasi-derivation Leibniz rule",
            quasi_derivation_leibniz,
            30,
        ),
        (
            "commutator closure and anchor homomorphism",
            commutator_closure,
            30,
        ),
        ("commutator Leibniz identity", commutator_leibniz, 30),
        (
            "rank >= 2 anchors are tensorial",
            higher_rank_anchors_tensorial,
            60,
        ),
        (
            "Jacobi implies anchor homomorphism",
            jacobi_implies_anchor_homomorphism,
            60,
        ),
        (
            "rank-1 sweep: Jacobi implies skew",
            rank1_sweep_is_skew,
            600,
        ),
        (
            "multivector conditions match Jacobiator",
            sn_equivalence,
            120,
        ),
        ("rank-1 skew identity", poisson_skew_identity, 30),
        ("fixture regression", fixture_regression, 10),
    ];
    let mut failures = Vec::new();
    for (i, (name, run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let over = elapsed > Duration::from_secs(*limit);
        let line = match (&outcome, over) {
            (Ok(detail), false) => format!(
                "PASS criterion {} ({name}): {detail} [{elapsed:.2?}]",
                i + 1
            ),
            (Ok(detail), true) => format!(
                "FAIL criterion {} ({name}): {detail}, took {elapsed:.2?} > {limit}s",
                i + 1
            ),
            (Err(e), _) => format!("FAIL criterion {} ({name}): {e} [{elapsed:.2?}]", i + 1),
        };
        println!("{line}");
        if outcome.is_err() || over {
            failures.push(line);
        }
    }
    assert!(
        failures.is_empty(),
        "{} criteria failed:\n{}",
        failures.len(),
        failures.join("\n")
    );
}

#[test]
fn tangent_fixture_matches_constructor() {
    let src = std::fs::read_to_string(fixtures_dir().join("tangent2.json")).unwrap();
    let doc = qdalg::load_document(&src).unwrap();
    assert_eq!(doc.bracket().unwrap(), tangent_algebroid(2).unwrap());
}
