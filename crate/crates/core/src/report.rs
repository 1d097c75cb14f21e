//! Deterministic text reports for structure documents.

use std::fmt::{self, Write as _};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{Map, Value};

use crate::bracket::{classify, spot_check_jacobi, spot_check_skew, AnchorData, Flag};
use crate::derivation::Derivation;
use crate::doc::{Payload, StructureDocument, SN_FLAG};
use crate::jacobi::{jacobi_pair_check, JacobiCondition, JacobiPairVerdict};
use crate::qder::{is_quasi_derivation, QdVerdict};

/// Knobs for the randomized confirmation pass that follows the exact checks.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ReportOptions {
    pub max_degree: u32,
    pub samples: usize,
    pub seed: u64,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            max_degree: 3,
            samples: 8,
            seed: 0x5eed,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReportDocument {
    pub kind: &'static str,
    pub variables: Vec<String>,
    pub rank: usize,
    /// Canonical form of the input document.
    pub structure: String,
    pub flags: Vec<(&'static str, Flag)>,
    pub witnesses: Vec<String>,
    /// Titled blocks of anchor and recovered data.
    pub sections: Vec<(String, Vec<String>)>,
    pub spot_checks: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExpectMismatch {
    pub flag: String,
    pub expected: Flag,
    pub found: Option<Flag>,
}

impl fmt::Display for ExpectMismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.found {
            Some(found) => write!(
                f,
                "expect {}: wanted {}, got {}",
                self.flag, self.expected, found
            ),
            None => write!(
                f,
                "expect {}: wanted {}, flag not reported",
                self.flag, self.expected
            ),
        }
    }
}

impl ReportDocument {
    pub fn flag(&self, name: &str) -> Option<Flag> {
        self.flags.iter().find(|(n, _)| *n == name).map(|(_, f)| *f)
    }

    /// Compares against the document's `expect` block.
    pub fn mismatches(&self, doc: &StructureDocument) -> Vec<ExpectMismatch> {
        doc.expect
            .iter()
            .filter_map(|(name, &expected)| {
                let found = self.flag(name);
                (found != Some(expected)).then(|| ExpectMismatch {
                    flag: name.clone(),
                    expected,
                    found,
                })
            })
            .collect()
    }

    /// Single-line JSON object of the flag table.
    pub fn flags_json(&self) -> String {
        let m: Map<String, Value> = self
            .flags
            .iter()
            .map(|(n, f)| {
                let v = match f {
                    Flag::True => Value::Bool(true),
                    Flag::False => Value::Bool(false),
                    Flag::NotApplicable => Value::String("n/a".into()),
                };
                (n.to_string(), v)
            })
            .collect();
        serde_json::to_string(&Value::Object(m)).expect("serializable")
    }

    /// Only the anchor blocks, as printed by the `anchors` command.
    pub fn render_anchors(&self) -> String {
        let mut out = String::new();
        for (title, lines) in &self.sections {
            write_block(&mut out, title, lines);
        }
        out
    }
}

fn write_block(out: &mut String, title: &str, lines: &[String]) {
    writeln!(out, "{title}:").unwrap();
    if lines.is_empty() {
        out.push_str("  (none)\n");
    }
    for l in lines {
        writeln!(out, "  {l}").unwrap();
    }
    out.push('\n');
}

impl fmt::Display for ReportDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        writeln!(out, "kind: {}", self.kind).unwrap();
        writeln!(out, "variables: [{}]", self.variables.join(", ")).unwrap();
        writeln!(out, "rank: {}\n", self.rank).unwrap();
        out.push_str("structure:\n");
        for l in self.structure.lines() {
            writeln!(out, "  {l}").unwrap();
        }
        out.push('\n');
        let width = self.flags.iter().map(|(n, _)| n.len()).max().unwrap_or(0);
        let flag_lines: Vec<String> = self
            .flags
            .iter()
            .map(|(n, v)| format!("{n:<width$}  {v}"))
            .collect();
        write_block(&mut out, "flags", &flag_lines);
        write_block(&mut out, "witnesses", &self.witnesses);
        out.push_str(&self.render_anchors());
        if !self.spot_checks.is_empty() {
            write_block(&mut out, "randomized confirmation", &self.spot_checks);
        }
        writeln!(out, "flags-json: {}", self.flags_json()).unwrap();
        f.write_str(&out)
    }
}

fn derivation_line(d: &Derivation, names: &[String]) -> String {
    d.display(names).to_string()
}

fn anchor_lines(data: &AnchorData, names: &[String]) -> Vec<String> {
    let n = names.len();
    let mut lines = Vec::new();
    for (a, rho) in data.rho.iter().enumerate() {
        let d = Derivation::new(n, rho.clone()).expect("n components");
        lines.push(format!("rho(e{a}) = {}", derivation_line(&d, names)));
    }
    for (a, per_i) in data.m.iter().enumerate() {
        for (i, per_j) in per_i.iter().enumerate() {
            for (j, p) in per_j.iter().enumerate() {
                if !p.is_zero() {
                    lines.push(format!(
                        "m[e{a}][d{}][d{}] = {}",
                        names[i],
                        names[j],
                        p.display(names)
                    ));
                }
            }
        }
    }
    lines
}

fn condition_name(c: JacobiCondition) -> &'static str {
    match c {
        JacobiCondition::GammaLambda => "[gamma, lambda] = 0",
        JacobiCondition::LambdaLambda => "[lambda, lambda] + 2 lambda^gamma = 0",
    }
}

/// Classifies the document's structure and assembles the report.
pub fn run_classify(doc: &StructureDocument, opts: &ReportOptions) -> ReportDocument {
    let names = &doc.variables;
    let mut report = ReportDocument {
        kind: doc.payload.key(),
        variables: names.clone(),
        rank: doc.rank,
        structure: doc.to_canonical_string(),
        flags: Vec::new(),
        witnesses: Vec::new(),
        sections: Vec::new(),
        spot_checks: Vec::new(),
    };

    if let Payload::Operator(op) = &doc.payload {
        let verdict = is_quasi_derivation(op);
        report
            .flags
            .push(("is_quasi_derivation", Flag::from_bool(verdict.is_yes())));
        match verdict {
            QdVerdict::Yes(anchor) => {
                report
                    .sections
                    .push(("anchor".into(), vec![derivation_line(&anchor, names)]));
            }
            QdVerdict::No(w) => {
                report.witnesses.push(format!(
                    "quasi_derivation: f={} a={} c={} defect={}",
                    names[w.variable],
                    w.a,
                    w.c,
                    w.defect.display(names)
                ));
                report.sections.push(("anchor".into(), vec!["n/a".into()]));
            }
        }
        return report;
    }

    let b = doc.bracket().expect("bracket payload");
    let c = classify(&b);
    report.flags = c.flags();
    report.witnesses = c
        .witnesses
        .iter()
        .map(|w| w.display(names).to_string())
        .collect();

    if let Payload::JacobiStructure { lambda, gamma } = &doc.payload {
        let sn = jacobi_pair_check(lambda, gamma).expect("validated shapes");
        report.flags.push((SN_FLAG, Flag::from_bool(sn.is_yes())));
        if let JacobiPairVerdict::No { condition, defect } = &sn {
            report.witnesses.push(format!(
                "{SN_FLAG}: {} fails, defect={}",
                condition_name(*condition),
                defect.display(names)
            ));
        }
        let agree = sn.is_yes() == c.satisfies_jacobi.is_true();
        report.spot_checks.push(format!(
            "sn_conditions vs jacobiator: {}",
            if agree { "agree" } else { "DISAGREE" }
        ));
    }

    let anchor_section = |data: &Option<AnchorData>| match data {
        Some(d) => anchor_lines(d, names),
        None => vec!["n/a".into()],
    };
    report
        .sections
        .push(("left anchor".into(), anchor_section(&c.left_anchor)));
    report
        .sections
        .push(("right anchor".into(), anchor_section(&c.right_anchor)));
    if let Some((lambda, gamma)) = &c.recovered {
        report.sections.push((
            "recovered jacobi pair".into(),
            vec![
                format!("lambda = {}", lambda.display(names)),
                format!("gamma = {}", gamma.display(names)),
            ],
        ));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let header = format!("{} samples, degree <= {}", opts.samples, opts.max_degree);
    let mut spot = |label: &str, ran: bool, w: Option<crate::witness::Witness>| {
        if ran {
            let line = match w {
                None => format!("{label}: ok ({header})"),
                Some(w) => format!("{label}: FAILED {}", w.display(names)),
            };
            report.spot_checks.push(line);
        }
    };
    let jacobi_yes = c.satisfies_jacobi.is_true();
    let w = jacobi_yes
        .then(|| spot_check_jacobi(&b, &mut rng, opts.samples, opts.max_degree))
        .flatten();
    spot("jacobi", jacobi_yes, w);
    let skew_yes = c.is_skew.is_true();
    let w = skew_yes
        .then(|| spot_check_skew(&b, &mut rng, opts.samples, opts.max_degree))
        .flatten();
    spot("skew", skew_yes, w);
    report
}
