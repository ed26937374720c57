//! JSON file formats and the error-to-exit-code mapping.
//!
//! Matrix tuples are `{"n": int, "field": "rational"|"float64", "matrices":
//! [[[entry,…],…],…]}`. Rational entries are `"p/q"` strings (bare integers
//! are also accepted); float entries are JSON numbers. Segments are
//! `{"vector": [entry,…]}`.

use std::fs;
use std::path::Path;

use mixdisc::matrix::{validate_psd_with_tol, PsdMatrix, SymMatrix};
use mixdisc::{Error, Rational, Scalar, Tolerance};
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Rational,
    Float64,
}

impl Field {
    pub fn name(self) -> &'static str {
        match self {
            Field::Rational => "rational",
            Field::Float64 => "float64",
        }
    }

    pub fn of<T: Scalar>() -> Self {
        if T::EXACT {
            Field::Rational
        } else {
            Field::Float64
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Kind {
    Schema,
    Domain,
    Limit,
}

#[derive(Debug, Clone)]
pub struct CliError {
    pub kind: Kind,
    pub code: &'static str,
    pub message: String,
    pub detail: Map<String, Value>,
}

impl CliError {
    pub fn schema(message: impl Into<String>) -> Self {
        CliError { kind: Kind::Schema, code: "SCHEMA", message: message.into(), detail: Map::new() }
    }

    fn new(kind: Kind, code: &'static str, message: String) -> Self {
        CliError { kind, code, message, detail: Map::new() }
    }

    pub fn exit_code(&self) -> u8 {
        match self.kind {
            Kind::Schema => 2,
            Kind::Domain => 3,
            Kind::Limit => 4,
        }
    }

    pub fn with(mut self, key: &str, value: Value) -> Self {
        self.detail.insert(key.to_string(), value);
        self
    }

    pub fn to_json(&self) -> Value {
        let mut e = self.detail.clone();
        e.insert("code".into(), json!(self.code));
        e.insert("message".into(), json!(self.message));
        json!({ "error": e })
    }

    /// Maps a library error, rendering scalars for backend `T`.
    pub fn from_lib<T: Scalar>(e: Error) -> Self {
        let message = e.to_string();
        match e {
            Error::NotPsd { witness, value } => CliError::new(Kind::Domain, "NOT_PSD", message)
                .with("witness", Value::Array(witness.iter().map(|s| repr_json::<T>(s)).collect()))
                .with("value", repr_json::<T>(&value)),
            Error::NotSymmetric { row, col } => {
                CliError::new(Kind::Domain, "NOT_SYMMETRIC", message).with("entry", json!([row + 1, col + 1]))
            }
            Error::DimensionTooLarge { n, cap } => {
                CliError::new(Kind::Limit, "DIMENSION_CAP", message).with("n", json!(n)).with("cap", json!(cap))
            }
            Error::SearchExhausted { .. } => CliError::new(Kind::Limit, "SEARCH_EXHAUSTED", message),
            Error::NotSquare { .. }
            | Error::EmptyDimension
            | Error::AmbientMismatch { .. }
            | Error::TupleLength { .. }
            | Error::InvalidScalar(_) => CliError::new(Kind::Schema, "SCHEMA", message),
            Error::NegativeCoefficient(_) => CliError::new(Kind::Domain, "NEGATIVE_COEFFICIENT", message),
            Error::ExactDecompositionUnsupported => CliError::new(Kind::Domain, "EXACT_DECOMPOSITION", message),
            Error::DecompositionMismatch => CliError::new(Kind::Domain, "DECOMPOSITION_MISMATCH", message),
            Error::NotInOrthogonalComplement { .. } => CliError::new(Kind::Domain, "NOT_ORTHOGONAL", message),
            Error::ReferenceTupleDegenerate => CliError::new(Kind::Domain, "REFERENCE_DEGENERATE", message),
            Error::ZeroAtomVector { .. } | Error::NonPositiveWeight(_) => {
                CliError::new(Kind::Domain, "INVALID_FUNCTIONAL", message)
            }
            Error::PreconditionViolated(_) => CliError::new(Kind::Domain, "PRECONDITION", message),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

fn repr_json<T: Scalar>(s: &str) -> Value {
    T::parse_repr(s).map_or_else(|| json!(s), |v| scalar_json(&v))
}

pub fn scalar_json<T: Scalar>(x: &T) -> Value {
    if T::EXACT {
        json!(x.to_repr())
    } else {
        json!(x.to_f64())
    }
}

pub fn vector_json<T: Scalar>(v: &[T]) -> Value {
    Value::Array(v.iter().map(scalar_json).collect())
}

pub fn matrix_json<T: Scalar>(m: &SymMatrix<T>) -> Value {
    Value::Array(m.rows().iter().map(|r| vector_json(r)).collect())
}

/// A tuple document in the input schema, so any serialized instance can be
/// fed back to the CLI.
pub fn tuple_json<'a, T: Scalar>(mats: impl IntoIterator<Item = &'a SymMatrix<T>>) -> Value {
    let mats: Vec<&SymMatrix<T>> = mats.into_iter().collect();
    let n = mats.first().map_or(0, |m| m.dim());
    json!({
        "n": n,
        "field": Field::of::<T>().name(),
        "matrices": mats.iter().map(|m| matrix_json(m)).collect::<Vec<_>>(),
    })
}

pub fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::schema(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::schema(format!("invalid JSON in {}: {e}", path.display())))
}

/// Writes `value` as pretty JSON with a trailing newline.
pub fn emit(value: &Value, out: Option<&Path>) -> std::io::Result<()> {
    let mut text = serde_json::to_string_pretty(value).expect("JSON values serialize");
    text.push('\n');
    match out {
        Some(p) => fs::write(p, text),
        None => {
            use std::io::Write;
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()
        }
    }
}

pub fn field_of(doc: &Value) -> CliResult<Field> {
    match doc.get("field") {
        None => Ok(Field::Rational),
        Some(Value::String(s)) if s == "rational" => Ok(Field::Rational),
        Some(Value::String(s)) if s == "float64" => Ok(Field::Float64),
        Some(other) => Err(CliError::schema(format!("\"field\" must be \"rational\" or \"float64\", got {other}"))),
    }
}

fn convert_rational<T: Scalar>(r: Rational) -> Option<T> {
    if T::EXACT {
        T::parse_repr(&r.to_repr())
    } else {
        T::from_f64(r.to_f64())
    }
}

/// One matrix or vector entry in the given field, converted to backend `T`.
pub fn parse_scalar<T: Scalar>(v: &Value, field: Field) -> CliResult<T> {
    let bad = || CliError::schema(format!("invalid {} entry {v}", field.name()));
    match field {
        Field::Rational => {
            let r = match v {
                Value::String(s) => Rational::parse_repr(s).ok_or_else(bad)?,
                Value::Number(n) if n.is_i64() || n.is_u64() => Rational::parse_repr(&n.to_string()).ok_or_else(bad)?,
                _ => return Err(bad()),
            };
            convert_rational(r).ok_or_else(bad)
        }
        Field::Float64 => {
            let x = match v {
                Value::Number(n) => n.as_f64().ok_or_else(bad)?,
                Value::String(s) => f64::parse_repr(s).ok_or_else(bad)?,
                _ => return Err(bad()),
            };
            T::from_f64(x).ok_or_else(bad)
        }
    }
}

pub fn parse_vector<T: Scalar>(v: &Value, field: Field) -> CliResult<Vec<T>> {
    v.as_array()
        .ok_or_else(|| CliError::schema(format!("expected an array of entries, got {v}")))?
        .iter()
        .map(|x| parse_scalar(x, field))
        .collect()
}

/// Parses a comma-separated list given on the command line. Exact backends
/// accept only integers and `p/q`; float backends also accept decimals.
pub fn parse_list<T: Scalar>(s: &str) -> CliResult<Vec<T>> {
    s.split(',')
        .map(|item| {
            let item = item.trim();
            Rational::parse_repr(item)
                .and_then(convert_rational)
                .or_else(|| if T::EXACT { None } else { f64::parse_repr(item).and_then(T::from_f64) })
                .ok_or_else(|| CliError::schema(format!("invalid number {item:?}")))
        })
        .collect()
}

/// Settings for reading matrices.
#[derive(Debug, Clone, Copy)]
pub struct Reader {
    pub field: Field,
    pub cap: usize,
    pub tol: Tolerance,
}

impl Reader {
    fn check_dim(&self, n: usize) -> CliResult<()> {
        if n > self.cap {
            return Err(CliError::from_lib::<f64>(Error::DimensionTooLarge { n, cap: self.cap }));
        }
        Ok(())
    }

    /// Reads, symmetry-checks and PSD-validates one matrix.
    pub fn matrix<T: Scalar>(&self, v: &Value, index: usize) -> CliResult<PsdMatrix<T>> {
        let rows = v.as_array().ok_or_else(|| CliError::schema(format!("matrix {} is not an array of rows", index + 1)))?;
        self.check_dim(rows.len())?;
        let rows: Vec<Vec<T>> = rows.iter().map(|r| parse_vector(r, self.field)).collect::<CliResult<_>>()?;
        let located = |e: Error| CliError::from_lib::<T>(e).with("matrix", json!(index + 1));
        let m = SymMatrix::from_rows_with_tol(rows, &self.tol).map_err(located)?;
        validate_psd_with_tol(m, self.tol).map_err(located)
    }

    /// Reads the `"matrices"` array, checking dimensions against `"n"`.
    pub fn matrices<T: Scalar>(&self, doc: &Value) -> CliResult<Vec<PsdMatrix<T>>> {
        let declared = match doc.get("n") {
            None => None,
            Some(v) => {
                let n = v.as_u64().filter(|&n| n >= 1).ok_or_else(|| CliError::schema(format!("\"n\" must be a positive integer, got {v}")))?;
                self.check_dim(n as usize)?;
                Some(n as usize)
            }
        };
        let list = doc
            .get("matrices")
            .and_then(Value::as_array)
            .ok_or_else(|| CliError::schema("missing \"matrices\" array"))?;
        let mats: Vec<PsdMatrix<T>> = list.iter().enumerate().map(|(i, m)| self.matrix(m, i)).collect::<CliResult<_>>()?;
        let n = declared.or_else(|| mats.first().map(PsdMatrix::dim));
        if let Some((i, m)) = mats.iter().enumerate().find(|(_, m)| Some(m.dim()) != n) {
            return Err(CliError::schema(format!("matrix {} has dimension {}, expected {}", i + 1, m.dim(), n.unwrap_or(0))));
        }
        Ok(mats)
    }

    /// Reads `{"vector": [...]}`.
    pub fn segment<T: Scalar>(&self, v: &Value) -> CliResult<Vec<T>> {
        let vector = v.get("vector").ok_or_else(|| CliError::schema("segment needs a \"vector\" field"))?;
        let out: Vec<T> = parse_vector(vector, self.field)?;
        self.check_dim(out.len())?;
        Ok(out)
    }
}
