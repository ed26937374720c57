use mixdisc::discriminant::{det_expansion, md, Algorithm, MatrixTuple};
use mixdisc::ellipsoid::{
    combine, decompose_segments, eq7_check, reduce_dimension, unit_ball_volume, verify_decomposition, Ellipsoid,
    L2Combination, Segment,
};
use mixdisc::harness::{audit, measure_functional, product_functional, CandidateFunctional, ScaledMd};
use mixdisc::matrix::{validate_psd, PsdMatrix, SymMatrix};
use mixdisc::positivity::{decide_with, PositivityVerdict, SearchConfig};
use mixdisc::suites::{self, SuiteParams};
use mixdisc::{Error, Rational, Scalar};
use serde_json::{json, Value};

use crate::io::{parse_list, parse_scalar, parse_vector, scalar_json, tuple_json, vector_json, CliError, CliResult, Field, Reader};
use crate::report;

/// Result of a command: JSON payload, whether all assertions held, and
/// optional human-readable lines for stderr.
pub struct Output {
    pub json: Value,
    pub ok: bool,
    pub human: Vec<String>,
}

impl Output {
    fn ok(json: Value) -> Self {
        Output { json, ok: true, human: Vec::new() }
    }

    fn checked(json: Value, ok: bool) -> Self {
        Output { json, ok, human: Vec::new() }
    }
}

fn lib<T: Scalar>(e: Error) -> CliError {
    CliError::from_lib::<T>(e)
}

pub fn compute<T: Scalar>(doc: &Value, rd: &Reader, algo: Algorithm, expand: bool, lambdas: Option<&str>) -> CliResult<Output> {
    let mats: Vec<PsdMatrix<T>> = rd.matrices(doc)?;
    let n = mats.first().ok_or_else(|| CliError::schema("\"matrices\" is empty"))?.dim();
    if expand || lambdas.is_some() {
        let table = det_expansion(&mats, n).map_err(lib::<T>)?;
        let coefficients: Vec<Value> = table
            .table()
            .iter()
            .map(|(k, v)| json!({ "multiset": k.iter().map(|i| i + 1).collect::<Vec<_>>(), "value": scalar_json(v) }))
            .collect();
        let mut out = json!({ "n": n, "m": mats.len(), "coefficients": coefficients });
        if let Some(s) = lambdas {
            let ls: Vec<T> = parse_list(s)?;
            if ls.len() != mats.len() {
                return Err(CliError::schema(format!("{} lambdas given for {} matrices", ls.len(), mats.len())));
            }
            out["lambdas"] = vector_json(&ls);
            out["determinant"] = scalar_json(&table.evaluate(&ls).map_err(lib::<T>)?);
        }
        return Ok(Output::ok(out));
    }
    let t = MatrixTuple::new(mats).map_err(lib::<T>)?;
    let value = md(&t, algo).map_err(lib::<T>)?;
    Ok(Output::ok(json!({ "value": scalar_json(&value), "algorithm": algo.name(), "n": n })))
}

pub fn positivity<T: Scalar>(doc: &Value, rd: &Reader, cfg: &SearchConfig) -> CliResult<Output> {
    let t = MatrixTuple::new(rd.matrices::<T>(doc)?).map_err(lib::<T>)?;
    let verdict = decide_with(&t, cfg).map_err(lib::<T>)?;
    let verified = verdict.verify(&t);
    let json = match &verdict {
        PositivityVerdict::Positive(c) => json!({
            "status": verdict.status(),
            "transversal": c.vectors.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
            "coefficients": c.coefficients.iter().map(|v| vector_json(v)).collect::<Vec<_>>(),
            "determinant": scalar_json(&c.determinant),
            "verified": verified,
        }),
        PositivityVerdict::Zero(c) => json!({
            "status": verdict.status(),
            "subset": c.indices.iter().map(|i| i + 1).collect::<Vec<_>>(),
            "dim": c.achieved_dim,
            "verified": verified,
        }),
    };
    Ok(Output::checked(json, verified))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum EllipsoidOp {
    /// Dimension and volume of each ellipsoid.
    Volume,
    /// Support function values in `--direction`.
    Support,
    /// L2 combination with weights `--lambdas`.
    Combine,
    /// Both sides of the volume polarization identity at `--lambdas`.
    Eq7,
    /// Segment decomposition (float), or check of given `"segments"`.
    Decompose,
    /// Whether the first ellipsoid lies inside the second.
    Contains,
    /// Dimension reduction along `"segment"` for the n−1 ellipsoids.
    Reduce,
}

fn ellipsoids<T: Scalar>(doc: &Value, rd: &Reader) -> CliResult<Vec<Ellipsoid<T>>> {
    Ok(rd.matrices::<T>(doc)?.into_iter().map(Ellipsoid::new).collect())
}

fn need_lambdas<T: Scalar>(lambdas: Option<&str>, m: usize) -> CliResult<Vec<T>> {
    let ls: Vec<T> = parse_list(lambdas.ok_or_else(|| CliError::schema("--lambdas is required"))?)?;
    if ls.len() != m {
        return Err(CliError::schema(format!("{} lambdas given for {m} ellipsoids", ls.len())));
    }
    Ok(ls)
}

fn exactly<T>(es: &[T], count: usize) -> CliResult<()> {
    if es.len() != count {
        return Err(CliError::schema(format!("expected {count} matrices, got {}", es.len())));
    }
    Ok(())
}

fn segment_json<T: Scalar>(s: &Segment<T>) -> Value {
    json!({ "vector": vector_json(s.vector()) })
}

pub fn ellipsoid<T: Scalar>(
    op: EllipsoidOp,
    doc: &Value,
    rd: &Reader,
    lambdas: Option<&str>,
    direction: Option<&str>,
) -> CliResult<Output> {
    match op {
        EllipsoidOp::Volume => {
            let es: Vec<Ellipsoid<T>> = ellipsoids(doc, rd)?;
            let n = es.first().map_or(0, Ellipsoid::ambient);
            let items: Vec<Value> = es
                .iter()
                .map(|e| {
                    json!({
                        "dim": e.dim(),
                        "volume_sq_normalized": scalar_json(&e.volume_sq_normalized()),
                        "volume": e.volume(),
                    })
                })
                .collect();
            Ok(Output::ok(json!({ "n": n, "unit_ball_volume": unit_ball_volume(n), "ellipsoids": items })))
        }
        EllipsoidOp::Support => {
            let u: Vec<T> = parse_list(direction.ok_or_else(|| CliError::schema("--direction is required"))?)?;
            let value = |s: mixdisc::ellipsoid::SupportValue<T>| json!({ "squared": scalar_json(&s.squared), "value": s.value });
            let es: Vec<Ellipsoid<T>> = ellipsoids(doc, rd)?;
            let mut out = json!({ "direction": vector_json(&u) });
            out["ellipsoids"] = es.iter().map(|e| e.support(&u).map(value)).collect::<Result<Vec<_>, _>>().map_err(lib::<T>)?.into();
            if let Some(list) = doc.get("segments").and_then(Value::as_array) {
                let segs = list.iter().map(|s| rd.segment::<T>(s).map(Segment::new)).collect::<CliResult<Vec<_>>>()?;
                out["segments"] = segs.iter().map(|s| s.support(&u).map(value)).collect::<Result<Vec<_>, _>>().map_err(lib::<T>)?.into();
            }
            Ok(Output::ok(out))
        }
        EllipsoidOp::Combine => {
            let es: Vec<Ellipsoid<T>> = ellipsoids(doc, rd)?;
            let ls: Vec<T> = need_lambdas(lambdas, es.len())?;
            let c = combine(&L2Combination { terms: ls.into_iter().zip(es).collect() }).map_err(lib::<T>)?;
            let mut out = tuple_json([c.matrix().matrix()]);
            out["dim"] = json!(c.dim());
            out["volume_sq_normalized"] = scalar_json(&c.volume_sq_normalized());
            Ok(Output::ok(out))
        }
        EllipsoidOp::Eq7 => {
            let es: Vec<Ellipsoid<T>> = ellipsoids(doc, rd)?;
            let ls: Vec<T> = need_lambdas(lambdas, es.len())?;
            let r = eq7_check(&es, &ls).map_err(lib::<T>)?;
            Ok(Output::checked(json!({ "lhs": scalar_json(&r.lhs), "rhs": scalar_json(&r.rhs), "equal": r.equal }), r.equal))
        }
        EllipsoidOp::Decompose => {
            let es: Vec<Ellipsoid<T>> = ellipsoids(doc, rd)?;
            exactly(&es, 1)?;
            let e = &es[0];
            let segs = match doc.get("segments") {
                Some(list) => list
                    .as_array()
                    .ok_or_else(|| CliError::schema("\"segments\" must be an array"))?
                    .iter()
                    .map(|s| rd.segment::<T>(s).map(Segment::new))
                    .collect::<CliResult<Vec<_>>>()?,
                None => decompose_segments(e).map_err(lib::<T>)?,
            };
            let verified = match verify_decomposition(e, &segs) {
                Ok(()) => true,
                Err(Error::DecompositionMismatch) => false,
                Err(other) => return Err(lib::<T>(other)),
            };
            let json = json!({
                "dim": e.dim(),
                "segments": segs.iter().map(segment_json).collect::<Vec<_>>(),
                "verified": verified,
            });
            Ok(Output::checked(json, verified))
        }
        EllipsoidOp::Contains => {
            let es: Vec<Ellipsoid<T>> = ellipsoids(doc, rd)?;
            exactly(&es, 2)?;
            Ok(Output::ok(json!({
                "contained": es[0].is_contained_in(&es[1]),
                "reverse": es[1].is_contained_in(&es[0]),
            })))
        }
        EllipsoidOp::Reduce => {
            let s = Segment::new(rd.segment::<T>(doc.get("segment").ok_or_else(|| CliError::schema("missing \"segment\""))?)?);
            let es: Vec<Ellipsoid<T>> = ellipsoids(doc, rd)?;
            let r = reduce_dimension(&s, &es).map_err(lib::<T>)?;
            Ok(Output::checked(json!({ "lhs": scalar_json(&r.lhs), "rhs": scalar_json(&r.rhs), "equal": r.equal }), r.equal))
        }
    }
}

/// Reads a candidate functional description and its dimension.
fn functional(doc: &Value, rd: &Reader, n_flag: Option<usize>) -> CliResult<(Box<dyn CandidateFunctional<Rational>>, usize)> {
    let kind = doc.get("kind").and_then(Value::as_str).ok_or_else(|| CliError::schema("functional needs a \"kind\""))?;
    let declared = match doc.get("n") {
        None => None,
        Some(v) => Some(v.as_u64().filter(|&n| n >= 1).ok_or_else(|| CliError::schema("\"n\" must be a positive integer"))? as usize),
    };
    let pick = |inherent: Option<usize>| -> CliResult<usize> {
        let candidates = [inherent, declared, n_flag];
        let n = candidates.iter().flatten().next().copied().unwrap_or(2);
        if candidates.iter().flatten().any(|&m| m != n) {
            return Err(CliError::schema(format!("conflicting dimensions {candidates:?}")));
        }
        if n > rd.cap {
            return Err(CliError::from_lib::<Rational>(Error::DimensionTooLarge { n, cap: rd.cap }));
        }
        Ok(n)
    };
    let f: (Box<dyn CandidateFunctional<Rational>>, usize) = match kind {
        "scaled_md" => {
            let factor = doc.get("factor").map_or(Ok(Rational::from_i64(1)), |v| parse_scalar(v, Field::Rational))?;
            (Box::new(ScaledMd::new(factor)), pick(None)?)
        }
        "product" => match doc.get("fixed") {
            Some(fixed) => {
                let fixed: Vec<PsdMatrix<Rational>> = rd.matrices(&json!({ "matrices": fixed }))?;
                let n = pick(Some(fixed.first().map_or(1, PsdMatrix::dim)))?;
                (Box::new(product_functional(n, fixed).map_err(lib::<Rational>)?), n)
            }
            None => {
                let n = pick(None)?;
                let id = validate_psd(SymMatrix::identity(n)).map_err(lib::<Rational>)?;
                (Box::new(product_functional(n, vec![id; n.saturating_sub(1)]).map_err(lib::<Rational>)?), n)
            }
        },
        "measure" => {
            let atoms = doc.get("atoms").and_then(Value::as_array).ok_or_else(|| CliError::schema("measure needs \"atoms\""))?;
            let atoms: Vec<Vec<Vec<Rational>>> = atoms
                .iter()
                .map(|a| {
                    a.as_array()
                        .ok_or_else(|| CliError::schema("each atom is an array of vectors"))?
                        .iter()
                        .map(|u| parse_vector(u, Field::Rational))
                        .collect()
                })
                .collect::<CliResult<_>>()?;
            let weights = match doc.get("weights") {
                Some(w) => parse_vector(w, Field::Rational)?,
                None => vec![Rational::from_i64(1); atoms.len()],
            };
            let n = pick(atoms.first().map(Vec::len))?;
            (Box::new(measure_functional(atoms, weights).map_err(lib::<Rational>)?), n)
        }
        other => return Err(CliError::schema(format!("unknown functional kind {other:?}"))),
    };
    Ok(f)
}

pub fn harness(doc: &Value, rd: &Reader, n: Option<usize>, trials: usize, seed: u64) -> CliResult<Output> {
    let (f, n) = functional(doc, rd, n)?;
    let r = audit(f.as_ref(), n, trials, seed).map_err(lib::<Rational>)?;
    let reverified = r.reverify(f.as_ref()).map_err(lib::<Rational>)?;
    Ok(Output::checked(report::audit_json(&r, reverified), reverified))
}

pub fn verify(suite: &str, params: &SuiteParams) -> CliResult<Output> {
    let reports = suites::run(suite, params).map_err(lib::<Rational>)?;
    let ok = reports.iter().all(|r| r.passed());
    Ok(Output { json: report::suites_json(&reports, params.seed), ok, human: report::suites_text(&reports) })
}
