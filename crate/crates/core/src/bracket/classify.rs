use std::fmt;

use super::anchor::{left_qd_check, right_qd_check, AnchorData, AnchorVerdict};
use super::checks::{anchor_homomorphism_check, jacobiator_is_zero, skew_check, Verdict};
use super::BidiffBracket;
use crate::jacobi::{jacobi_bracket, Multivector};
use crate::poly::rat;
use crate::witness::Witness;

/// Three-valued classification flag.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Flag {
    True,
    False,
    NotApplicable,
}

impl Flag {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Flag::True
        } else {
            Flag::False
        }
    }

    pub fn is_true(self) -> bool {
        self == Flag::True
    }
}

impl fmt::Display for Flag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flag::True => "true",
            Flag::False => "false",
            Flag::NotApplicable => "n/a",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClassificationReport {
    pub num_vars: usize,
    pub rank: usize,
    pub is_right_qd: Flag,
    pub is_left_qd: Flag,
    pub anchors_tensorial: Flag,
    pub is_skew: Flag,
    pub satisfies_jacobi: Flag,
    pub is_algebroid: Flag,
    pub is_loday_algebroid: Flag,
    pub is_lie_algebroid: Flag,
    pub is_lie_qd_algebroid: Flag,
    pub anchor_homomorphism: Flag,
    pub anchor_sign: Flag,
    pub rank1_jacobi_form: Flag,
    pub witnesses: Vec<Witness>,
    pub left_anchor: Option<AnchorData>,
    pub right_anchor: Option<AnchorData>,
    /// `(Λ, Γ)` recovered from the anchor data of a rank-1 Lie structure.
    pub recovered: Option<(Multivector, Multivector)>,
}

impl ClassificationReport {
    pub const FLAG_NAMES: [&'static str; 12] = [
        "is_right_qd",
        "is_left_qd",
        "anchors_tensorial",
        "is_skew",
        "satisfies_jacobi",
        "is_algebroid",
        "is_loday_algebroid",
        "is_lie_algebroid",
        "is_lie_qd_algebroid",
        "anchor_homomorphism",
        "anchor_sign",
        "rank1_jacobi_form",
    ];

    /// All flags in a fixed order.
    pub fn flags(&self) -> Vec<(&'static str, Flag)> {
        let values = [
            self.is_right_qd,
            self.is_left_qd,
            self.anchors_tensorial,
            self.is_skew,
            self.satisfies_jacobi,
            self.is_algebroid,
            self.is_loday_algebroid,
            self.is_lie_algebroid,
            self.is_lie_qd_algebroid,
            self.anchor_homomorphism,
            self.anchor_sign,
            self.rank1_jacobi_form,
        ];
        Self::FLAG_NAMES.iter().copied().zip(values).collect()
    }

    pub fn flag(&self, name: &str) -> Option<Flag> {
        self.flags()
            .into_iter()
            .find(|(n, _)| *n == name)
            .map(|(_, f)| f)
    }
}

fn record(witnesses: &mut Vec<Witness>, v: &Verdict) -> Flag {
    match v {
        Verdict::Yes => Flag::True,
        Verdict::No(w) => {
            witnesses.push(w.clone());
            Flag::False
        }
    }
}

/// `(Λ, Γ)` from rank-1 left-anchor data: `Γ` from the tensorial part and
/// `Λ` from the skew part of the differential part.
fn recover_jacobi_pair(left: &AnchorData, n: usize) -> (Multivector, Multivector) {
    let half = rat(1, 2);
    let mut pairs = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let skew = (&left.m[0][i][j] - &left.m[0][j][i]).scale(&half);
            pairs.push(((i, j), skew));
        }
    }
    let lambda = Multivector::bivector(n, &pairs).expect("increasing pairs");
    let gamma = Multivector::vector(n, left.rho[0].clone()).expect("n components");
    (lambda, gamma)
}

/// Runs every check and fills in the report. Failures become witnesses.
pub fn classify(b: &BidiffBracket) -> ClassificationReport {
    let mut witnesses = Vec::new();
    let right = right_qd_check(b);
    let left = left_qd_check(b);
    let is_right_qd = match &right {
        AnchorVerdict::Yes(_) => Flag::True,
        AnchorVerdict::No(w) => {
            witnesses.push(w.clone());
            Flag::False
        }
    };
    let is_left_qd = match &left {
        AnchorVerdict::Yes(_) => Flag::True,
        AnchorVerdict::No(w) => {
            witnesses.push(w.clone());
            Flag::False
        }
    };
    let left_anchor = right.anchor().cloned();
    let right_anchor = left.anchor().cloned();
    let both_qd = is_right_qd.is_true() && is_left_qd.is_true();

    let anchors_tensorial = match (&left_anchor, &right_anchor) {
        (Some(l), Some(r)) => {
            let t = l.is_tensorial() && r.is_tensorial();
            assert!(b.rank() <= 1 || t, "rank > 1 with differential anchor");
            Flag::from_bool(t)
        }
        _ => Flag::NotApplicable,
    };

    let is_skew = record(&mut witnesses, &skew_check(b));
    let satisfies_jacobi = record(&mut witnesses, &jacobiator_is_zero(b));

    let anchor_homomorphism = match anchor_homomorphism_check(b) {
        Ok(v) => record(&mut witnesses, &v),
        Err(_) => Flag::NotApplicable,
    };

    let tensorial = anchors_tensorial.is_true();
    let is_algebroid = Flag::from_bool(both_qd && tensorial);
    let is_loday_algebroid = Flag::from_bool(both_qd && tensorial && satisfies_jacobi.is_true());
    let lie = satisfies_jacobi.is_true() && is_skew.is_true();
    let is_lie_qd_algebroid = Flag::from_bool(both_qd && lie);
    let is_lie_algebroid = Flag::from_bool(both_qd && tensorial && lie);

    let anchor_sign = match (is_loday_algebroid, &left_anchor, &right_anchor) {
        (Flag::True, Some(l), Some(r)) => {
            let ok = l
                .rho
                .iter()
                .flatten()
                .zip(r.rho.iter().flatten())
                .all(|(x, y)| (x + y).is_zero());
            Flag::from_bool(ok)
        }
        _ => Flag::NotApplicable,
    };

    let mut recovered = None;
    let rank1_jacobi_form = if b.rank() != 1 {
        Flag::NotApplicable
    } else if !is_lie_qd_algebroid.is_true() {
        Flag::False
    } else {
        let left = left_anchor.as_ref().expect("qd passed");
        let (lambda, gamma) = recover_jacobi_pair(left, b.num_vars());
        // a skew bracket has no symmetric differential part
        for i in 0..b.num_vars() {
            for j in 0..b.num_vars() {
                assert!(
                    (&left.m[0][i][j] + &left.m[0][j][i]).is_zero(),
                    "skew rank-1 bracket with symmetric second-order part"
                );
            }
        }
        let rebuilt = jacobi_bracket(&lambda, &gamma).expect("shapes match");
        let same = &rebuilt == b;
        recovered = Some((lambda, gamma));
        Flag::from_bool(same)
    };

    ClassificationReport {
        num_vars: b.num_vars(),
        rank: b.rank(),
        is_right_qd,
        is_left_qd,
        anchors_tensorial,
        is_skew,
        satisfies_jacobi,
        is_algebroid,
        is_loday_algebroid,
        is_lie_algebroid,
        is_lie_qd_algebroid,
        anchor_homomorphism,
        anchor_sign,
        rank1_jacobi_form,
        witnesses,
        left_anchor,
        right_anchor,
        recovered,
    }
}
