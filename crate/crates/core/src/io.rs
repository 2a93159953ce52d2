//! JSON artifacts: matrices, Choi matrices, channels, subspace bases,
//! observable sets and expectation vectors.
//!
//! Floats are written with 17 significant digits so that a value read back
//! is bit-identical. Readers walk a [`Value`] by hand so that schema errors
//! carry the offending path.

use std::io;
use std::path::Path;

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use crate::channel::{ChoiFlags, ChoiMatrix, KrausChannel};
use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, HermitianMatrix, C64};
use crate::observables::{
    AmbientKind, AmbientSpace, Decomposition, InteractiveObservable, ObservableSet, Question,
};
use crate::subspaces::{CertificationSummary, Kind, SubspaceBasis, SubspaceKind};
use crate::tomography::{ExpectationVector, MeasurementMode};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Compact writer printing every float as `{:.16e}`, with `-0` written as `0`.
struct ExactFloats;

impl Formatter for ExactFloats {
    fn write_f64<W: ?Sized + io::Write>(&mut self, w: &mut W, value: f64) -> io::Result<()> {
        if value == 0.0 {
            w.write_all(b"0.0")
        } else if value.is_finite() {
            write!(w, "{value:.16e}")
        } else {
            w.write_all(b"null")
        }
    }
}

/// Serializes with 17-significant-digit floats and a trailing newline.
pub fn to_json_string<T: Serialize + ?Sized>(value: &T) -> Result<String> {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, ExactFloats);
    value.serialize(&mut ser)?;
    buf.push(b'\n');
    Ok(String::from_utf8(buf).expect("serde_json emits UTF-8"))
}

pub fn write_json<T: Serialize + ?Sized>(path: &Path, value: &T) -> Result<()> {
    std::fs::write(path, to_json_string(value)?)?;
    Ok(())
}

pub fn read_value(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|source| Error::Unreadable { path: path.display().to_string(), source })?;
    serde_json::from_str(&text).map_err(|e| Error::Schema { path: path.display().to_string(), message: e.to_string() })
}

fn schema(path: &str, message: impl Into<String>) -> Error {
    Error::Schema { path: path.to_string(), message: message.into() }
}

fn field<'a>(v: &'a Value, key: &str, path: &str) -> Result<&'a Value> {
    v.as_object()
        .ok_or_else(|| schema(path, "expected an object"))?
        .get(key)
        .ok_or_else(|| schema(&format!("{path}.{key}"), "missing field"))
}

fn as_usize(v: &Value, path: &str) -> Result<usize> {
    v.as_u64().map(|x| x as usize).ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn as_u64(v: &Value, path: &str) -> Result<u64> {
    v.as_u64().ok_or_else(|| schema(path, "expected a nonnegative integer"))
}

fn as_f64(v: &Value, path: &str) -> Result<f64> {
    v.as_f64().ok_or_else(|| schema(path, "expected a number"))
}

fn as_str<'a>(v: &'a Value, path: &str) -> Result<&'a str> {
    v.as_str().ok_or_else(|| schema(path, "expected a string"))
}

fn as_array<'a>(v: &'a Value, path: &str) -> Result<&'a Vec<Value>> {
    v.as_array().ok_or_else(|| schema(path, "expected an array"))
}

fn usize_field(v: &Value, key: &str, path: &str) -> Result<usize> {
    as_usize(field(v, key, path)?, &format!("{path}.{key}"))
}

/// `{ "rows", "cols", "entries": [[re, im], …] }`, row-major.
pub fn matrix_value(m: &ComplexMatrix) -> Value {
    let entries: Vec<Value> = m.row_major().iter().map(|z| json!([z.re, z.im])).collect();
    json!({ "rows": m.rows(), "cols": m.cols(), "entries": entries })
}

pub fn parse_matrix(v: &Value, path: &str) -> Result<ComplexMatrix> {
    let rows = usize_field(v, "rows", path)?;
    let cols = usize_field(v, "cols", path)?;
    let ep = format!("{path}.entries");
    let entries = as_array(field(v, "entries", path)?, &ep)?;
    if entries.len() != rows * cols {
        return Err(schema(&ep, format!("expected {} entries, found {}", rows * cols, entries.len())));
    }
    let mut out = Vec::with_capacity(entries.len());
    for (k, e) in entries.iter().enumerate() {
        let p = format!("{ep}[{k}]");
        let pair = as_array(e, &p)?;
        if pair.len() != 2 {
            return Err(schema(&p, "expected [re, im]"));
        }
        out.push(C64::new(as_f64(&pair[0], &format!("{p}[0]"))?, as_f64(&pair[1], &format!("{p}[1]"))?));
    }
    ComplexMatrix::from_row_major(rows, cols, out).map_err(|e| schema(path, e.to_string()))
}

pub fn parse_hermitian(v: &Value, path: &str) -> Result<HermitianMatrix> {
    HermitianMatrix::new(parse_matrix(v, path)?).map_err(|e| schema(path, e.to_string()))
}

pub fn choi_value(j: &ChoiMatrix) -> Value {
    let mut v = matrix_value(j.matrix().as_complex());
    let obj = v.as_object_mut().expect("object");
    obj.insert("dY".into(), json!(j.dims().dy));
    obj.insert("dX".into(), json!(j.dims().dx));
    obj.insert("flags".into(), json!(j.flags().names()));
    v
}

pub fn parse_choi(v: &Value, path: &str) -> Result<ChoiMatrix> {
    let dy = usize_field(v, "dY", path)?;
    let dx = usize_field(v, "dX", path)?;
    if dy != dx {
        return Err(schema(path, "only square channels (dY = dX) are supported"));
    }
    let fp = format!("{path}.flags");
    let mut flags = ChoiFlags::default();
    for (k, f) in as_array(field(v, "flags", path)?, &fp)?.iter().enumerate() {
        match as_str(f, &format!("{fp}[{k}]"))? {
            "psd" => flags.psd = true,
            "tp" => flags.tp = true,
            "unital" => flags.unital = true,
            other => return Err(schema(&format!("{fp}[{k}]"), format!("unknown flag '{other}'"))),
        }
    }
    ChoiMatrix::new(dx, parse_hermitian(v, path)?, flags).map_err(|e| schema(path, e.to_string()))
}

pub fn channel_value(ch: &KrausChannel) -> Value {
    json!({ "d": ch.dim(), "kraus": ch.kraus_ops().iter().map(matrix_value).collect::<Vec<_>>() })
}

/// Kraus operators of a PSD Choi matrix from its eigendecomposition.
pub fn kraus_from_choi(j: &ChoiMatrix) -> Result<KrausChannel> {
    let d = j.d();
    let (vals, vecs) = j.matrix().eigh()?;
    let tol = 1e-12 * vals.iter().cloned().fold(0.0, f64::max).max(1.0);
    let mut kraus = Vec::new();
    for (k, &l) in vals.iter().enumerate().rev() {
        if l > tol {
            let s = l.sqrt();
            let m = nalgebra::DMatrix::from_fn(d, d, |a, i| vecs[(a * d + i, k)] * s);
            kraus.push(ComplexMatrix::from_dmatrix(m)?);
        }
    }
    KrausChannel::new(kraus)
}

/// `{ "d", "kraus": [matrix] }` or a Choi document.
pub fn parse_channel(v: &Value, path: &str) -> Result<KrausChannel> {
    if v.get("kraus").is_some() {
        let d = usize_field(v, "d", path)?;
        let kp = format!("{path}.kraus");
        let ops = as_array(field(v, "kraus", path)?, &kp)?
            .iter()
            .enumerate()
            .map(|(k, m)| parse_matrix(m, &format!("{kp}[{k}]")))
            .collect::<Result<Vec<_>>>()?;
        let ch = KrausChannel::new(ops).map_err(|e| schema(&kp, e.to_string()))?;
        if ch.dim() != d {
            return Err(schema(&format!("{path}.d"), format!("Kraus operators are {0}x{0}", ch.dim())));
        }
        if !ch.is_trace_preserving() {
            return Err(schema(&kp, format!("not trace preserving (deviation {:e})", ch.tp_deviation())));
        }
        Ok(ch)
    } else {
        kraus_from_choi(&parse_choi(v, path)?).map_err(|e| schema(path, e.to_string()))
    }
}

pub fn basis_value(b: &SubspaceBasis) -> Value {
    json!({
        "version": VERSION,
        "kind": b.kind.kind.name(),
        "d": b.kind.d,
        "q": b.kind.q,
        "claimed_dim": b.claimed_dim,
        "seed": b.seed,
        "swapped": b.swapped,
        "certification": serde_json::to_value(&b.certification).expect("plain data"),
        "elements": b.elements.iter().map(|h| matrix_value(h.as_complex())).collect::<Vec<_>>(),
    })
}

pub fn parse_basis(v: &Value, path: &str) -> Result<SubspaceBasis> {
    let kp = format!("{path}.kind");
    let kind = Kind::parse(as_str(field(v, "kind", path)?, &kp)?).map_err(|e| schema(&kp, e.to_string()))?;
    let d = usize_field(v, "d", path)?;
    let q = usize_field(v, "q", path)?;
    let claimed_dim = usize_field(v, "claimed_dim", path)?;
    let seed = as_u64(field(v, "seed", path)?, &format!("{path}.seed"))?;
    let swapped = v.get("swapped").and_then(Value::as_bool).unwrap_or(false);
    let certification = v
        .get("certification")
        .map(|c| serde_json::from_value::<CertificationSummary>(c.clone()))
        .transpose()
        .map_err(|e| schema(&format!("{path}.certification"), e.to_string()))?
        .unwrap_or_default();
    let ep = format!("{path}.elements");
    let elements = as_array(field(v, "elements", path)?, &ep)?
        .iter()
        .enumerate()
        .map(|(k, m)| {
            let p = format!("{ep}[{k}]");
            let h = parse_hermitian(m, &p)?;
            if h.dim() != d * d {
                return Err(schema(&p, format!("expected {0}x{0}", d * d)));
            }
            Ok(h)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SubspaceBasis { kind: SubspaceKind { kind, d, q }, elements, claimed_dim, seed, swapped, certification })
}

fn ambient_name(k: AmbientKind) -> &'static str {
    match k {
        AmbientKind::All => "Q_all",
        AmbientKind::Unital => "Q_unital",
    }
}

pub fn observable_set_value(s: &ObservableSet) -> Value {
    let obs: Vec<Value> = s
        .observables
        .iter()
        .map(|o| {
            let mut m = Map::new();
            m.insert("H".into(), matrix_value(o.h.as_complex()));
            m.insert("scale".into(), json!(o.scale));
            if let Some(dec) = &o.decomposition {
                m.insert("P_plus".into(), matrix_value(dec.p_plus.as_complex()));
                m.insert("P_minus".into(), matrix_value(dec.p_minus.as_complex()));
            }
            Value::Object(m)
        })
        .collect();
    json!({
        "version": VERSION,
        "d": s.d,
        "q": s.q,
        "question": s.question.name(),
        "count": s.len(),
        "seed": s.seed,
        "ambient": ambient_name(s.ambient.kind),
        "subspace_kind": s.subspace.kind.name(),
        "subspace_dim": s.subspace_dim,
        "observables": obs,
    })
}

pub fn parse_observable_set(v: &Value, path: &str) -> Result<ObservableSet> {
    let d = usize_field(v, "d", path)?;
    let q = usize_field(v, "q", path)?;
    let qp = format!("{path}.question");
    let question = Question::parse(as_str(field(v, "question", path)?, &qp)?).map_err(|e| schema(&qp, e.to_string()))?;
    let count = usize_field(v, "count", path)?;
    let seed = as_u64(field(v, "seed", path)?, &format!("{path}.seed"))?;
    let (kind, ambient) = question.plan(q);
    let ambient = match v.get("ambient").and_then(Value::as_str) {
        Some("Q_all") => AmbientKind::All,
        Some("Q_unital") => AmbientKind::Unital,
        Some(other) => return Err(schema(&format!("{path}.ambient"), format!("unknown ambient space '{other}'"))),
        None => ambient,
    };
    let subspace_dim = v.get("subspace_dim").and_then(Value::as_u64).map(|x| x as usize).unwrap_or(0);
    let op = format!("{path}.observables");
    let arr = as_array(field(v, "observables", path)?, &op)?;
    if arr.len() != count {
        return Err(schema(&format!("{path}.count"), format!("count {count} but {} observables", arr.len())));
    }
    let n = d * d;
    let mut observables = Vec::with_capacity(arr.len());
    for (k, o) in arr.iter().enumerate() {
        let p = format!("{op}[{k}]");
        let h = parse_hermitian(field(o, "H", &p)?, &format!("{p}.H"))?;
        if h.dim() != n {
            return Err(schema(&format!("{p}.H"), format!("expected {n}x{n}")));
        }
        let scale = as_f64(field(o, "scale", &p)?, &format!("{p}.scale"))?;
        if !(scale > 0.0) {
            return Err(schema(&format!("{p}.scale"), "scale must be positive"));
        }
        let decomposition = match (o.get("P_plus"), o.get("P_minus")) {
            (Some(pp), Some(pm)) => {
                let p_plus = parse_hermitian(pp, &format!("{p}.P_plus"))?;
                let p_minus = parse_hermitian(pm, &format!("{p}.P_minus"))?;
                if p_plus.dim() != n || p_minus.dim() != n {
                    return Err(schema(&p, format!("POVM elements must be {n}x{n}")));
                }
                let inv = 1.0 / d as f64;
                Some(Decomposition {
                    xi: crate::channel::max_entangled_state(d)?,
                    q_plus: p_plus.scale(inv),
                    q_minus: p_minus.scale(inv),
                    p_plus,
                    p_minus,
                })
            }
            (None, None) => None,
            _ => return Err(schema(&p, "P_plus and P_minus must appear together")),
        };
        observables.push(InteractiveObservable { h, scale, decomposition });
    }
    Ok(ObservableSet {
        d,
        q,
        question,
        seed,
        ambient: AmbientSpace { kind: ambient, d },
        subspace: SubspaceKind { kind, d, q },
        subspace_dim,
        observables,
    })
}

pub fn expectation_value(e: &ExpectationVector) -> Value {
    let mut v = serde_json::to_value(e).expect("plain data");
    v.as_object_mut().expect("object").insert("version".into(), json!(VERSION));
    v
}

pub fn parse_expectations(v: &Value, path: &str) -> Result<ExpectationVector> {
    let vp = format!("{path}.values");
    let values = as_array(field(v, "values", path)?, &vp)?
        .iter()
        .enumerate()
        .map(|(k, x)| as_f64(x, &format!("{vp}[{k}]")))
        .collect::<Result<Vec<_>>>()?;
    let mode = match v.get("mode") {
        None => MeasurementMode::Exact,
        Some(m) => serde_json::from_value(m.clone()).map_err(|e| schema(&format!("{path}.mode"), e.to_string()))?,
    };
    let standard_errors = match v.get("standard_errors") {
        None | Some(Value::Null) => None,
        Some(s) => Some(
            as_array(s, &format!("{path}.standard_errors"))?
                .iter()
                .enumerate()
                .map(|(k, x)| as_f64(x, &format!("{path}.standard_errors[{k}]")))
                .collect::<Result<Vec<_>>>()?,
        ),
    };
    Ok(ExpectationVector { values, mode, standard_errors })
}
