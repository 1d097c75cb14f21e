//! Structure documents: JSON files describing a bracket, a Jacobi pair, an
//! operator or a vector field, with optional expected classification flags.
//!
//! ```json
//! {
//!   "variables": ["x", "y"],
//!   "rank": 1,
//!   "jacobi_structure": {
//!     "lambda": [{ "indices": [0, 1], "poly": "1" }],
//!     "gamma": []
//!   },
//!   "expect": { "rank1_jacobi_form": true, "is_lie_algebroid": false }
//! }
//! ```
//!
//! Indices are 0-based. Bracket entries are `C[c,a,b]`, `L[c,a,b,i]`,
//! `R[c,a,b,i]`, `M[c,a,b,i,j]`; operator entries are `A[c,a]` and
//! `B[c,a,i]`; bivector entries need `i < j`.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::bracket::{BidiffBracket, ClassificationReport, Flag, Tensor};
use crate::derivation::Derivation;
use crate::jacobi::Multivector;
use crate::parse::parse_poly;
use crate::poly::Poly;
use crate::qder::FirstOrderOperator;

/// Flags available to `expect` for operator documents.
pub const OPERATOR_FLAGS: [&str; 1] = ["is_quasi_derivation"];
/// Extra flag for Jacobi-pair documents: both conditions on `(Λ, Γ)`.
pub const SN_FLAG: &str = "sn_conditions";

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Payload {
    Bracket(BidiffBracket),
    JacobiStructure {
        lambda: Multivector,
        gamma: Multivector,
    },
    Operator(FirstOrderOperator),
    VectorField(Derivation),
}

impl Payload {
    pub fn key(&self) -> &'static str {
        match self {
            Payload::Bracket(_) => "bracket",
            Payload::JacobiStructure { .. } => "jacobi_structure",
            Payload::Operator(_) => "operator",
            Payload::VectorField(_) => "vector_field",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StructureDocument {
    pub variables: Vec<String>,
    pub rank: usize,
    pub payload: Payload,
    pub expect: BTreeMap<String, Flag>,
}

/// Load failure with a JSON-pointer-like path to the offending value.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{}: {reason}", if path.is_empty() { "/" } else { path })]
pub struct LoadError {
    pub path: String,
    pub reason: LoadErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoadErrorKind {
    #[error("invalid JSON: {0}")]
    Json(String),
    #[error("{0}")]
    Schema(String),
    #[error("polynomial syntax error: {0}")]
    Poly(#[from] crate::error::ParseError),
    #[error("index {index} out of range (must be < {bound})")]
    IndexRange { index: usize, bound: usize },
    #[error("duplicate entry for indices {0:?}")]
    Duplicate(Vec<usize>),
    #[error("unknown flag {0:?}")]
    UnknownFlag(String),
}

fn err(path: &str, reason: LoadErrorKind) -> LoadError {
    LoadError {
        path: path.to_string(),
        reason,
    }
}

fn schema(path: &str, msg: impl Into<String>) -> LoadError {
    err(path, LoadErrorKind::Schema(msg.into()))
}

fn as_object<'a>(v: &'a Value, path: &str) -> Result<&'a Map<String, Value>, LoadError> {
    v.as_object()
        .ok_or_else(|| schema(path, "expected an object"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>, LoadError> {
    v.as_array()
        .ok_or_else(|| schema(path, "expected an array"))
}

fn as_index(v: &Value, path: &str) -> Result<usize, LoadError> {
    v.as_u64()
        .map(|u| u as usize)
        .ok_or_else(|| schema(path, "expected a non-negative integer"))
}

fn reject_unknown(obj: &Map<String, Value>, path: &str, allowed: &[&str]) -> Result<(), LoadError> {
    for k in obj.keys() {
        if !allowed.contains(&k.as_str()) {
            return Err(schema(&format!("{path}/{k}"), "unknown key"));
        }
    }
    Ok(())
}

struct Ctx<'a> {
    vars: &'a [String],
    rank: usize,
}

impl Ctx<'_> {
    fn n(&self) -> usize {
        self.vars.len()
    }

    /// Parses an entry list; `bounds` gives the range of each index slot.
    fn entries(
        &self,
        v: &Value,
        path: &str,
        bounds: &[usize],
    ) -> Result<Vec<(Vec<usize>, Poly)>, LoadError> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (e, item) in as_array(v, path)?.iter().enumerate() {
            let p = format!("{path}/{e}");
            let obj = as_object(item, &p)?;
            reject_unknown(obj, &p, &["indices", "poly"])?;
            let idx_v = obj
                .get("indices")
                .ok_or_else(|| schema(&p, "missing key \"indices\""))?;
            let idx_path = format!("{p}/indices");
            let raw = as_array(idx_v, &idx_path)?;
            if raw.len() != bounds.len() {
                return Err(schema(
                    &idx_path,
                    format!("expected {} indices, found {}", bounds.len(), raw.len()),
                ));
            }
            let mut idx = Vec::with_capacity(raw.len());
            for (s, (iv, &bound)) in raw.iter().zip(bounds).enumerate() {
                let ip = format!("{idx_path}/{s}");
                let i = as_index(iv, &ip)?;
                if i >= bound {
                    return Err(err(&ip, LoadErrorKind::IndexRange { index: i, bound }));
                }
                idx.push(i);
            }
            let poly_path = format!("{p}/poly");
            let src = obj
                .get("poly")
                .ok_or_else(|| schema(&p, "missing key \"poly\""))?
                .as_str()
                .ok_or_else(|| schema(&poly_path, "expected a string"))?;
            let poly = parse_poly(src, self.vars).map_err(|e| err(&poly_path, e.into()))?;
            if !seen.insert(idx.clone()) {
                return Err(err(&idx_path, LoadErrorKind::Duplicate(idx)));
            }
            out.push((idx, poly));
        }
        Ok(out)
    }

    fn bracket(&self, v: &Value, path: &str) -> Result<BidiffBracket, LoadError> {
        let obj = as_object(v, path)?;
        reject_unknown(obj, path, &["C", "L", "R", "M"])?;
        let (n, k) = (self.n(), self.rank);
        let mut b = BidiffBracket::zero(n, k);
        for t in Tensor::ALL {
            let Some(list) = obj.get(t.name()) else {
                continue;
            };
            let mut bounds = vec![k, k, k];
            bounds.resize(t.arity(), n);
            for (idx, p) in self.entries(list, &format!("{path}/{}", t.name()), &bounds)? {
                b.set(t, &idx, p).expect("validated indices");
            }
        }
        Ok(b)
    }

    fn vector(&self, v: Option<&Value>, path: &str) -> Result<Vec<Poly>, LoadError> {
        let n = self.n();
        let mut comps = vec![Poly::zero(n); n];
        if let Some(v) = v {
            for (idx, p) in self.entries(v, path, &[n])? {
                comps[idx[0]] = p;
            }
        }
        Ok(comps)
    }

    fn jacobi(&self, v: &Value, path: &str) -> Result<(Multivector, Multivector), LoadError> {
        let obj = as_object(v, path)?;
        reject_unknown(obj, path, &["lambda", "gamma"])?;
        let n = self.n();
        let mut pairs = Vec::new();
        if let Some(l) = obj.get("lambda") {
            let lp = format!("{path}/lambda");
            for (e, (idx, p)) in self.entries(l, &lp, &[n, n])?.into_iter().enumerate() {
                if idx[0] >= idx[1] {
                    return Err(schema(
                        &format!("{lp}/{e}/indices"),
                        "bivector indices must satisfy i < j",
                    ));
                }
                pairs.push(((idx[0], idx[1]), p));
            }
        }
        let lambda = Multivector::bivector(n, &pairs).expect("validated pairs");
        let gamma = self.vector(obj.get("gamma"), &format!("{path}/gamma"))?;
        let gamma = Multivector::vector(n, gamma).expect("n components");
        Ok((lambda, gamma))
    }

    fn operator(&self, v: &Value, path: &str) -> Result<FirstOrderOperator, LoadError> {
        let obj = as_object(v, path)?;
        reject_unknown(obj, path, &["A", "B"])?;
        let (n, k) = (self.n(), self.rank);
        let mut op = FirstOrderOperator::zero(n, k);
        if let Some(a) = obj.get("A") {
            for (idx, p) in self.entries(a, &format!("{path}/A"), &[k, k])? {
                op.set_a(idx[0], idx[1], p);
            }
        }
        if let Some(b) = obj.get("B") {
            for (idx, p) in self.entries(b, &format!("{path}/B"), &[k, k, n])? {
                op.set_b(idx[0], idx[1], idx[2], p);
            }
        }
        Ok(op)
    }

    fn vector_field(&self, v: &Value, path: &str) -> Result<Derivation, LoadError> {
        let obj = as_object(v, path)?;
        reject_unknown(obj, path, &["gamma"])?;
        let comps = self.vector(obj.get("gamma"), &format!("{path}/gamma"))?;
        Ok(Derivation::new(self.n(), comps).expect("n components"))
    }
}

const PAYLOAD_KEYS: [&str; 4] = ["bracket", "jacobi_structure", "operator", "vector_field"];

/// Flag names an `expect` block may use for the given payload kind.
pub fn known_flags(payload_key: &str) -> Vec<&'static str> {
    match payload_key {
        "operator" => OPERATOR_FLAGS.to_vec(),
        "jacobi_structure" => {
            let mut v = ClassificationReport::FLAG_NAMES.to_vec();
            v.push(SN_FLAG);
            v
        }
        _ => ClassificationReport::FLAG_NAMES.to_vec(),
    }
}

fn valid_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
        && chars.all(|c| c.is_ascii_alphanumeric() || c == '_')
}

pub fn load_document(src: &str) -> Result<StructureDocument, LoadError> {
    let root: Value =
        serde_json::from_str(src).map_err(|e| err("", LoadErrorKind::Json(e.to_string())))?;
    let obj = as_object(&root, "")?;
    let mut allowed = vec!["variables", "rank", "expect"];
    allowed.extend(PAYLOAD_KEYS);
    reject_unknown(obj, "", &allowed)?;

    let vars_v = obj
        .get("variables")
        .ok_or_else(|| schema("", "missing key \"variables\""))?;
    let mut variables = Vec::new();
    for (i, v) in as_array(vars_v, "/variables")?.iter().enumerate() {
        let p = format!("/variables/{i}");
        let name = v.as_str().ok_or_else(|| schema(&p, "expected a string"))?;
        if !valid_identifier(name) {
            return Err(schema(&p, format!("{name:?} is not a valid variable name")));
        }
        if variables.iter().any(|x| x == name) {
            return Err(schema(&p, format!("variable {name:?} declared twice")));
        }
        variables.push(name.to_string());
    }

    let rank_v = obj
        .get("rank")
        .ok_or_else(|| schema("", "missing key \"rank\""))?;
    let rank = as_index(rank_v, "/rank")?;
    if rank == 0 {
        return Err(schema("/rank", "rank must be at least 1"));
    }

    let present: Vec<&str> = PAYLOAD_KEYS
        .iter()
        .copied()
        .filter(|k| obj.contains_key(*k))
        .collect();
    let key = match present.as_slice() {
        [k] => *k,
        [] => {
            return Err(schema(
                "",
                "missing payload: one of bracket, jacobi_structure, operator, vector_field",
            ))
        }
        _ => {
            return Err(schema(
                "",
                format!("more than one payload: {}", present.join(", ")),
            ))
        }
    };
    let path = format!("/{key}");
    if matches!(key, "jacobi_structure" | "vector_field") && rank != 1 {
        return Err(schema("/rank", format!("{key} requires rank 1")));
    }
    let ctx = Ctx {
        vars: &variables,
        rank,
    };
    let body = &obj[key];
    let payload = match key {
        "bracket" => Payload::Bracket(ctx.bracket(body, &path)?),
        "jacobi_structure" => {
            let (lambda, gamma) = ctx.jacobi(body, &path)?;
            Payload::JacobiStructure { lambda, gamma }
        }
        "operator" => Payload::Operator(ctx.operator(body, &path)?),
        _ => Payload::VectorField(ctx.vector_field(body, &path)?),
    };

    let mut expect = BTreeMap::new();
    if let Some(e) = obj.get("expect") {
        let known = known_flags(key);
        for (name, v) in as_object(e, "/expect")? {
            let p = format!("/expect/{name}");
            if !known.contains(&name.as_str()) {
                return Err(err(&p, LoadErrorKind::UnknownFlag(name.clone())));
            }
            let flag = match v {
                Value::Bool(b) => Flag::from_bool(*b),
                Value::String(s) if s == "n/a" => Flag::NotApplicable,
                _ => return Err(schema(&p, "expected true, false or \"n/a\"")),
            };
            expect.insert(name.clone(), flag);
        }
    }

    Ok(StructureDocument {
        variables,
        rank,
        payload,
        expect,
    })
}

fn entry_json(idx: &[usize], p: &Poly, names: &[String]) -> Value {
    json!({ "indices": idx, "poly": p.to_string_with(names) })
}

fn flag_json(f: Flag) -> Value {
    match f {
        Flag::True => Value::Bool(true),
        Flag::False => Value::Bool(false),
        Flag::NotApplicable => Value::String("n/a".into()),
    }
}

impl StructureDocument {
    /// The bracket this document describes, if it describes one.
    pub fn bracket(&self) -> Option<BidiffBracket> {
        match &self.payload {
            Payload::Bracket(b) => Some(b.clone()),
            Payload::JacobiStructure { lambda, gamma } => {
                Some(crate::jacobi::jacobi_bracket(lambda, gamma).expect("validated shapes"))
            }
            Payload::VectorField(g) => Some(crate::bracket::rank1_from_vector_field(g)),
            Payload::Operator(_) => None,
        }
    }

    pub fn to_json(&self) -> Value {
        let names = &self.variables;
        let vector_entries = |comps: &[Poly]| -> Vec<Value> {
            comps
                .iter()
                .enumerate()
                .filter(|(_, p)| !p.is_zero())
                .map(|(i, p)| entry_json(&[i], p, names))
                .collect()
        };
        let body = match &self.payload {
            Payload::Bracket(b) => {
                let mut m = Map::new();
                for t in Tensor::ALL {
                    let list: Vec<Value> = b
                        .entries(t)
                        .iter()
                        .map(|(idx, p)| entry_json(idx, p, names))
                        .collect();
                    m.insert(t.name().to_string(), Value::Array(list));
                }
                Value::Object(m)
            }
            Payload::JacobiStructure { lambda, gamma } => {
                let l: Vec<Value> = lambda
                    .components()
                    .map(|(idx, p)| entry_json(idx, p, names))
                    .collect();
                let g = gamma.to_derivation().expect("degree 1");
                json!({ "lambda": l, "gamma": vector_entries(g.components()) })
            }
            Payload::Operator(op) => {
                let (n, k) = (self.variables.len(), self.rank);
                let mut a = Vec::new();
                let mut b = Vec::new();
                for c in 0..k {
                    for aa in 0..k {
                        if !op.a(c, aa).is_zero() {
                            a.push(entry_json(&[c, aa], op.a(c, aa), names));
                        }
                        for i in 0..n {
                            if !op.b(c, aa, i).is_zero() {
                                b.push(entry_json(&[c, aa, i], op.b(c, aa, i), names));
                            }
                        }
                    }
                }
                json!({ "A": a, "B": b })
            }
            Payload::VectorField(g) => json!({ "gamma": vector_entries(g.components()) }),
        };
        let mut root = Map::new();
        root.insert("variables".into(), json!(self.variables));
        root.insert("rank".into(), json!(self.rank));
        root.insert(self.payload.key().into(), body);
        if !self.expect.is_empty() {
            let e: Map<String, Value> = self
                .expect
                .iter()
                .map(|(k, v)| (k.clone(), flag_json(*v)))
                .collect();
            root.insert("expect".into(), Value::Object(e));
        }
        Value::Object(root)
    }

    /// Canonical pretty-printed form; loading it gives back `self`.
    pub fn to_canonical_string(&self) -> String {
        let mut out = String::new();
        write_value(&mut out, &self.to_json(), 0);
        out
    }
}

fn is_scalar(v: &Value) -> bool {
    !matches!(v, Value::Array(_) | Value::Object(_))
}

/// Scalars, arrays of scalars, and objects holding only those.
fn fits_inline(v: &Value) -> bool {
    match v {
        Value::Array(a) => a.iter().all(is_scalar),
        Value::Object(o) => o
            .values()
            .all(|x| is_scalar(x) || matches!(x, Value::Array(a) if a.iter().all(is_scalar))),
        _ => true,
    }
}

fn write_inline(out: &mut String, v: &Value) {
    match v {
        Value::Array(a) => {
            out.push('[');
            for (i, x) in a.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_inline(out, x);
            }
            out.push(']');
        }
        Value::Object(o) if o.is_empty() => out.push_str("{}"),
        Value::Object(o) => {
            out.push_str("{ ");
            for (i, (k, x)) in o.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_inline(out, x);
            }
            out.push_str(" }");
        }
        scalar => out.push_str(&scalar.to_string()),
    }
}

/// Pretty printer that keeps index tuples and whole entries on one line.
fn write_value(out: &mut String, v: &Value, indent: usize) {
    if fits_inline(v) {
        write_inline(out, v);
        return;
    }
    let pad = "  ".repeat(indent + 1);
    let close = "  ".repeat(indent);
    match v {
        Value::Array(a) => {
            out.push_str("[\n");
            for (i, x) in a.iter().enumerate() {
                out.push_str(&pad);
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < a.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push(']');
        }
        Value::Object(o) => {
            out.push_str("{\n");
            for (i, (k, x)) in o.iter().enumerate() {
                out.push_str(&pad);
                out.push_str(&Value::String(k.clone()).to_string());
                out.push_str(": ");
                write_value(out, x, indent + 1);
                out.push_str(if i + 1 < o.len() { ",\n" } else { "\n" });
            }
            out.push_str(&close);
            out.push('}');
        }
        _ => unreachable!("scalars fit inline"),
    }
}

impl fmt::Display for StructureDocument {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_canonical_string())
    }
}
