//! Counterexamples attached to failed checks.

use std::fmt;

use crate::poly::{fmt_rational, Poly, Rational};
use crate::qder::Section;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum WitnessValue {
    Poly(Poly),
    Section(Section),
    Index(usize),
    Indices(Vec<usize>),
    Point(Vec<Rational>),
}

/// A failing input for a named check together with the nonzero defect it
/// produces.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    pub check: &'static str,
    pub inputs: Vec<(&'static str, WitnessValue)>,
    pub defect: Poly,
}

impl Witness {
    pub fn input(&self, label: &str) -> Option<&WitnessValue> {
        self.inputs
            .iter()
            .find(|(l, _)| *l == label)
            .map(|(_, v)| v)
    }

    pub fn section(&self, label: &str) -> Option<&Section> {
        match self.input(label) {
            Some(WitnessValue::Section(s)) => Some(s),
            _ => None,
        }
    }

    pub fn poly(&self, label: &str) -> Option<&Poly> {
        match self.input(label) {
            Some(WitnessValue::Poly(p)) => Some(p),
            _ => None,
        }
    }

    pub fn index(&self, label: &str) -> Option<usize> {
        match self.input(label) {
            Some(WitnessValue::Index(i)) => Some(*i),
            _ => None,
        }
    }

    pub fn display<'a>(&'a self, names: &'a [String]) -> WitnessDisplay<'a> {
        WitnessDisplay { w: self, names }
    }
}

pub struct WitnessDisplay<'a> {
    w: &'a Witness,
    names: &'a [String],
}

impl fmt::Display for WitnessDisplay<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.w.check)?;
        for (label, v) in &self.w.inputs {
            write!(f, " {label}=")?;
            match v {
                WitnessValue::Poly(p) => write!(f, "{}", p.display(self.names))?,
                WitnessValue::Section(s) => write!(f, "{}", s.display(self.names))?,
                WitnessValue::Index(i) => write!(f, "{i}")?,
                WitnessValue::Indices(ix) => {
                    let parts: Vec<String> = ix.iter().map(|i| i.to_string()).collect();
                    write!(f, "[{}]", parts.join(","))?
                }
                WitnessValue::Point(pt) => {
                    let parts: Vec<String> = pt.iter().map(fmt_rational).collect();
                    write!(f, "[{}]", parts.join(","))?
                }
            }
        }
        write!(f, " defect={}", self.w.defect.display(self.names))
    }
}
