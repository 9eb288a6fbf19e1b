//! Matrix, vector and basis files.
//!
//! Matrices use a Matrix-Market coordinate layout with 1-based indices:
//!
//! ```text
//! %%MatrixMarket matrix coordinate rational general
//! % field: rational
//! 3 3 4
//! 1 2 2
//! 2 1 3
//! 2 3 5
//! 3 2 7
//! ```
//!
//! or JSON `{"n": 3, "field": "rational", "entries": [[1, 2, "2"], ...]}`.
//! The field comes from `% field:` (or the JSON `field` key) unless the
//! caller overrides it; the default is the rationals.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::field::{Field, FieldSpec, PrimeField, Rationals};
use crate::kernel::Basis;
use crate::matrix::{AcyclicMatrix, SparseVector};

/// A matrix over whichever field its file named.
#[derive(Clone, Debug, PartialEq)]
pub enum AnyMatrix {
    Rational(AcyclicMatrix<Rationals>),
    Prime(AcyclicMatrix<PrimeField>),
}

impl AnyMatrix {
    pub fn spec(&self) -> FieldSpec {
        match self {
            AnyMatrix::Rational(m) => m.field().spec(),
            AnyMatrix::Prime(m) => m.field().spec(),
        }
    }

    pub fn n(&self) -> usize {
        match self {
            AnyMatrix::Rational(m) => m.n(),
            AnyMatrix::Prime(m) => m.n(),
        }
    }
}

impl From<AcyclicMatrix<Rationals>> for AnyMatrix {
    fn from(m: AcyclicMatrix<Rationals>) -> Self {
        AnyMatrix::Rational(m)
    }
}

impl From<AcyclicMatrix<PrimeField>> for AnyMatrix {
    fn from(m: AcyclicMatrix<PrimeField>) -> Self {
        AnyMatrix::Prime(m)
    }
}

/// Output layout for matrices and bases.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum Format {
    #[default]
    MatrixMarket,
    Json,
}

impl std::str::FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "mm" | "mtx" | "matrix-market" => Ok(Format::MatrixMarket),
            "json" => Ok(Format::Json),
            _ => Err(Error::InvalidParameter(format!(
                "unknown format {s:?} (expected mm or json)"
            ))),
        }
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

/// Entries as read from a file, before the field is fixed.
struct RawMatrix {
    n: usize,
    field: Option<FieldSpec>,
    /// `(line, row, column, literal)`, 0-based indices.
    entries: Vec<(usize, usize, usize, String)>,
}

pub fn read_matrix(path: &Path, field: Option<FieldSpec>) -> Result<AnyMatrix> {
    parse_matrix(&std::fs::read_to_string(path)?, field)
}

/// Parses either layout; `field` overrides whatever the text declares.
pub fn parse_matrix(text: &str, field: Option<FieldSpec>) -> Result<AnyMatrix> {
    let raw = if text.trim_start().starts_with('{') {
        parse_json_matrix(text)?
    } else {
        parse_mm_matrix(text)?
    };
    match field.or(raw.field).unwrap_or(FieldSpec::Rational) {
        FieldSpec::Rational => Ok(AnyMatrix::Rational(build(Rationals, raw)?)),
        FieldSpec::Prime(p) => Ok(AnyMatrix::Prime(build(PrimeField::new(p)?, raw)?)),
    }
}

fn build<F: Field>(field: F, raw: RawMatrix) -> Result<AcyclicMatrix<F>> {
    let mut triples = Vec::with_capacity(raw.entries.len());
    for (line, u, v, literal) in raw.entries {
        let x = field
            .parse(&literal)
            .map_err(|e| parse_err(line, e.to_string()))?;
        triples.push((u, v, x));
    }
    AcyclicMatrix::from_entries(field, raw.n, triples)
}

fn field_comment(body: &str, line: usize) -> Result<Option<FieldSpec>> {
    match body.trim().strip_prefix("field:") {
        Some(spec) => spec
            .trim()
            .parse()
            .map(Some)
            .map_err(|e: Error| parse_err(line, e.to_string())),
        None => Ok(None),
    }
}

fn parse_index(token: &str, n: usize, line: usize) -> Result<usize> {
    let i: usize = token
        .parse()
        .map_err(|_| parse_err(line, format!("bad index {token:?}")))?;
    if i == 0 || i > n {
        return Err(parse_err(line, format!("index {i} outside 1..={n}")));
    }
    Ok(i - 1)
}

fn parse_mm_matrix(text: &str) -> Result<RawMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l.trim()));
    let (_, banner) = lines.next().ok_or_else(|| parse_err(1, "empty input"))?;
    let words: Vec<String> = banner
        .split_whitespace()
        .map(str::to_ascii_lowercase)
        .collect();
    if words.len() != 5
        || words[0] != "%%matrixmarket"
        || words[1] != "matrix"
        || words[2] != "coordinate"
    {
        return Err(parse_err(
            1,
            "expected `%%MatrixMarket matrix coordinate <kind> general`",
        ));
    }
    if !matches!(words[3].as_str(), "real" | "integer" | "rational") {
        return Err(parse_err(
            1,
            format!("unsupported value kind {:?}", words[3]),
        ));
    }
    if words[4] != "general" {
        return Err(parse_err(1, format!("unsupported symmetry {:?}", words[4])));
    }

    let mut field = None;
    let mut size: Option<(usize, usize)> = None;
    let mut entries = Vec::new();
    for (line, l) in lines {
        if l.is_empty() {
            continue;
        }
        if let Some(body) = l.strip_prefix('%') {
            if let Some(spec) = field_comment(body, line)? {
                field = Some(spec);
            }
            continue;
        }
        let tokens: Vec<&str> = l.split_whitespace().collect();
        match size {
            None => {
                let [rows, cols, nnz] = tokens[..] else {
                    return Err(parse_err(line, "expected size line `n n nnz`"));
                };
                let num = |t: &str| {
                    t.parse::<usize>()
                        .map_err(|_| parse_err(line, format!("bad number {t:?}")))
                };
                let (rows, cols, nnz) = (num(rows)?, num(cols)?, num(nnz)?);
                if rows != cols {
                    return Err(parse_err(
                        line,
                        format!("matrix is {rows} x {cols}, not square"),
                    ));
                }
                size = Some((rows, nnz));
            }
            Some((n, _)) => {
                let [u, v, value] = tokens[..] else {
                    return Err(parse_err(line, "expected entry line `row column value`"));
                };
                entries.push((
                    line,
                    parse_index(u, n, line)?,
                    parse_index(v, n, line)?,
                    value.to_string(),
                ));
            }
        }
    }
    let (n, nnz) =
        size.ok_or_else(|| parse_err(text.lines().count().max(1), "missing size line"))?;
    if entries.len() != nnz {
        return Err(parse_err(
            text.lines().count().max(1),
            format!("size line announces {nnz} entries, found {}", entries.len()),
        ));
    }
    Ok(RawMatrix { n, field, entries })
}

/// A scalar in JSON: a string in field syntax, or a bare integer.
#[derive(Deserialize)]
#[serde(untagged)]
enum JsonScalar {
    Text(String),
    Int(i64),
}

impl JsonScalar {
    fn into_literal(self) -> String {
        match self {
            JsonScalar::Text(s) => s,
            JsonScalar::Int(i) => i.to_string(),
        }
    }
}

#[derive(Deserialize)]
struct MatrixIn {
    n: usize,
    #[serde(default)]
    field: Option<String>,
    entries: Vec<(usize, usize, JsonScalar)>,
}

#[derive(Serialize)]
struct MatrixOut {
    n: usize,
    field: String,
    entries: Vec<(usize, usize, String)>,
}

fn parse_json_matrix(text: &str) -> Result<RawMatrix> {
    let m: MatrixIn = serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let field = m.field.map(|s| s.parse()).transpose()?;
    let mut entries = Vec::with_capacity(m.entries.len());
    for (i, (u, v, x)) in m.entries.into_iter().enumerate() {
        // JSON has no per-entry lines; report the entry's position instead.
        let at = i + 1;
        let u = parse_index(&u.to_string(), m.n, at)?;
        let v = parse_index(&v.to_string(), m.n, at)?;
        entries.push((at, u, v, x.into_literal()));
    }
    Ok(RawMatrix {
        n: m.n,
        field,
        entries,
    })
}

fn mm_kind(spec: FieldSpec) -> &'static str {
    match spec {
        FieldSpec::Rational => "rational",
        FieldSpec::Prime(_) => "integer",
    }
}

/// Canonical text of a matrix: entries sorted by (row, column), values in
/// canonical field syntax. Parsing the result gives back `m`.
pub fn format_matrix<F: Field>(m: &AcyclicMatrix<F>, format: Format) -> String {
    let f = m.field();
    let triples = m.triples();
    match format {
        Format::MatrixMarket => {
            let mut out = String::new();
            let spec = f.spec();
            writeln!(
                out,
                "%%MatrixMarket matrix coordinate {} general",
                mm_kind(spec)
            )
            .unwrap();
            writeln!(out, "% field: {spec}").unwrap();
            writeln!(out, "{} {} {}", m.n(), m.n(), triples.len()).unwrap();
            for (u, v, x) in &triples {
                writeln!(out, "{} {} {}", u + 1, v + 1, f.format(x)).unwrap();
            }
            out
        }
        Format::Json => {
            let doc = MatrixOut {
                n: m.n(),
                field: f.spec().to_string(),
                entries: triples
                    .iter()
                    .map(|(u, v, x)| (u + 1, v + 1, f.format(x)))
                    .collect(),
            };
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

pub fn write_matrix<F: Field>(m: &AcyclicMatrix<F>, path: &Path, format: Format) -> Result<()> {
    std::fs::write(path, format_matrix(m, format))?;
    Ok(())
}

/// Serializes `(vertex, value)` pairs as a JSON object in the given order.
struct OrderedMap<'a>(&'a [(usize, String)]);

impl Serialize for OrderedMap<'_> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut map = s.serialize_map(Some(self.0.len()))?;
        for (v, x) in self.0 {
            map.serialize_entry(&(v + 1).to_string(), x)?;
        }
        map.end()
    }
}

fn labelled<F: Field>(field: &F, x: &SparseVector<F::Elem>) -> Vec<(usize, String)> {
    x.entries()
        .iter()
        .map(|(v, a)| (*v, field.format(a)))
        .collect()
}

#[derive(Serialize)]
struct BasisOut<'a> {
    n: usize,
    field: String,
    dimension: usize,
    vectors: Vec<OrderedMap<'a>>,
}

#[derive(Serialize)]
struct VectorOut<'a> {
    n: usize,
    field: String,
    entries: OrderedMap<'a>,
}

/// A basis as an `n x k` coordinate matrix (column j holds vector j) or as
/// JSON with one `{vertex: value}` map per vector.
pub fn format_basis<F: Field>(field: &F, basis: &Basis<F::Elem>, format: Format) -> String {
    let n = basis.ambient_dimension();
    let spec = field.spec();
    let columns: Vec<Vec<(usize, String)>> =
        basis.vectors().iter().map(|x| labelled(field, x)).collect();
    match format {
        Format::MatrixMarket => {
            let mut out = String::new();
            writeln!(
                out,
                "%%MatrixMarket matrix coordinate {} general",
                mm_kind(spec)
            )
            .unwrap();
            writeln!(out, "% field: {spec}").unwrap();
            writeln!(out, "{} {} {}", n, columns.len(), basis.total_nonzeros()).unwrap();
            for (j, col) in columns.iter().enumerate() {
                for (v, x) in col {
                    writeln!(out, "{} {} {}", v + 1, j + 1, x).unwrap();
                }
            }
            out
        }
        Format::Json => {
            let doc = BasisOut {
                n,
                field: spec.to_string(),
                dimension: columns.len(),
                vectors: columns.iter().map(|c| OrderedMap(c)).collect(),
            };
            serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
        }
    }
}

/// A single vector as JSON `{"n": .., "field": .., "entries": {vertex: value}}`.
pub fn format_vector<F: Field>(field: &F, x: &SparseVector<F::Elem>) -> String {
    let entries = labelled(field, x);
    let doc = VectorOut {
        n: x.dim(),
        field: field.spec().to_string(),
        entries: OrderedMap(&entries),
    };
    serde_json::to_string_pretty(&doc).expect("serializable") + "\n"
}

#[derive(Deserialize)]
struct VectorIn {
    n: usize,
    entries: BTreeMap<String, JsonScalar>,
}

/// Reads a JSON vector in `field`; any `field` key in the text is ignored
/// because the vector always lives next to a matrix that fixes the field.
pub fn parse_vector<F: Field>(field: &F, text: &str) -> Result<SparseVector<F::Elem>> {
    let doc: VectorIn =
        serde_json::from_str(text).map_err(|e| parse_err(e.line(), e.to_string()))?;
    let mut pairs = Vec::with_capacity(doc.entries.len());
    for (key, x) in doc.entries {
        let v = parse_index(&key, doc.n, 1)?;
        let literal = x.into_literal();
        let a = field
            .parse(&literal)
            .map_err(|e| parse_err(1, format!("vertex {key}: {e}")))?;
        pairs.push((v, a));
    }
    SparseVector::from_pairs(field, doc.n, pairs)
}

pub fn read_vector<F: Field>(field: &F, path: &Path) -> Result<SparseVector<F::Elem>> {
    parse_vector(field, &std::fs::read_to_string(path)?)
}
