//! The measure-spec document: one JSON object
//! `{"kind": ..., "generator": {...} | "atoms": [...] | "samples": [...], "label": ...}`.

use std::fmt;

use serde_json::{json, Map, Value};
use thiserror::Error;

use crate::markoff::{GeneratorSpec, GENERATOR_NAMES};
use crate::measure::{AtomSource, MeasureKind, MeasureSpec, WeightSource, WEIGHT_SUM_TOLERANCE};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DiagnosticCode {
    Malformed,
    UnknownGenerator,
    OutOfRange,
}

impl DiagnosticCode {
    pub fn as_str(self) -> &'static str {
        match self {
            DiagnosticCode::Malformed => "malformed-document",
            DiagnosticCode::UnknownGenerator => "unknown-generator",
            DiagnosticCode::OutOfRange => "out-of-range",
        }
    }
}

impl fmt::Display for DiagnosticCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
#[error("[{code}] {field}: {message}")]
pub struct SpecDiagnostic {
    pub code: DiagnosticCode,
    pub field: String,
    pub message: String,
}

fn diag(code: DiagnosticCode, field: &str, message: impl Into<String>) -> SpecDiagnostic {
    SpecDiagnostic {
        code,
        field: field.into(),
        message: message.into(),
    }
}

fn malformed(field: &str, message: impl Into<String>) -> SpecDiagnostic {
    diag(DiagnosticCode::Malformed, field, message)
}

fn out_of_range(field: &str, message: impl Into<String>) -> SpecDiagnostic {
    diag(DiagnosticCode::OutOfRange, field, message)
}

pub fn parse_measure_spec(document: &str) -> Result<MeasureSpec, SpecDiagnostic> {
    let value: Value = serde_json::from_str(document).map_err(|e| malformed("$", e.to_string()))?;
    measure_from_value(&value)
}

pub fn measure_from_value(value: &Value) -> Result<MeasureSpec, SpecDiagnostic> {
    let obj = value
        .as_object()
        .ok_or_else(|| malformed("$", "document must be a JSON object"))?;
    for key in obj.keys() {
        if !["kind", "generator", "atoms", "samples", "label"].contains(&key.as_str()) {
            return Err(malformed(key, "unknown field"));
        }
    }
    let kind = obj
        .get("kind")
        .ok_or_else(|| malformed("kind", "missing"))?
        .as_str()
        .ok_or_else(|| malformed("kind", "must be a string"))?;
    let label = match obj.get("label") {
        None => None,
        Some(Value::String(s)) => Some(s.clone()),
        Some(_) => return Err(malformed("label", "must be a string")),
    };
    let spec = match kind {
        "alpha_defined" => {
            only(obj, &["generator"], kind)?;
            let g = obj
                .get("generator")
                .ok_or_else(|| malformed("generator", "missing"))?;
            MeasureSpec::alpha_defined(parse_generator(g)?)
        }
        "atomic" => MeasureSpec::atomic(parse_atomic(obj)?),
        "weight_function" => MeasureSpec::weight(parse_weight(obj)?),
        other => {
            return Err(malformed(
                "kind",
                format!("`{other}` is not one of alpha_defined, atomic, weight_function"),
            ))
        }
    };
    Ok(match label {
        Some(l) => spec.with_label(l),
        None => spec,
    })
}

fn only(obj: &Map<String, Value>, allowed: &[&str], kind: &str) -> Result<(), SpecDiagnostic> {
    for key in ["generator", "atoms", "samples"] {
        if obj.contains_key(key) && !allowed.contains(&key) {
            return Err(malformed(key, format!("not allowed for kind {kind}")));
        }
    }
    Ok(())
}

fn generator_name(g: &Value) -> Result<&str, SpecDiagnostic> {
    g.as_object()
        .ok_or_else(|| malformed("generator", "must be an object"))?
        .get("name")
        .ok_or_else(|| malformed("generator.name", "missing"))?
        .as_str()
        .ok_or_else(|| malformed("generator.name", "must be a string"))
}

pub fn parse_generator(g: &Value) -> Result<GeneratorSpec, SpecDiagnostic> {
    let name = generator_name(g)?;
    if !GENERATOR_NAMES.contains(&name) {
        return Err(diag(
            DiagnosticCode::UnknownGenerator,
            "generator.name",
            format!("`{name}` is not one of {}", GENERATOR_NAMES.join(", ")),
        ));
    }
    let spec: GeneratorSpec =
        serde_json::from_value(g.clone()).map_err(|e| malformed("generator", e.to_string()))?;
    spec.validate()
        .map_err(|(field, why)| out_of_range(&format!("generator.{field}"), why))?;
    Ok(spec)
}

fn get_f64(g: &Map<String, Value>, field: &str) -> Result<f64, SpecDiagnostic> {
    g.get(field)
        .ok_or_else(|| malformed(&format!("generator.{field}"), "missing"))?
        .as_f64()
        .ok_or_else(|| malformed(&format!("generator.{field}"), "must be a number"))
}

fn get_usize(g: &Map<String, Value>, field: &str) -> Result<usize, SpecDiagnostic> {
    let v = g
        .get(field)
        .ok_or_else(|| malformed(&format!("generator.{field}"), "missing"))?;
    v.as_u64()
        .and_then(|n| usize::try_from(n).ok())
        .ok_or_else(|| {
            malformed(
                &format!("generator.{field}"),
                "must be a nonnegative integer",
            )
        })
}

fn check_keys(g: &Map<String, Value>, allowed: &[&str]) -> Result<(), SpecDiagnostic> {
    for key in g.keys() {
        if key != "name" && !allowed.contains(&key.as_str()) {
            return Err(malformed(&format!("generator.{key}"), "unknown field"));
        }
    }
    Ok(())
}

fn parse_atomic(obj: &Map<String, Value>) -> Result<AtomSource, SpecDiagnostic> {
    match (obj.get("atoms"), obj.get("generator")) {
        (Some(_), Some(_)) => Err(malformed(
            "atoms",
            "give either atoms or generator, not both",
        )),
        (None, None) => Err(malformed("atoms", "missing")),
        (Some(atoms), None) => {
            only(obj, &["atoms"], "atomic")?;
            let list = atoms
                .as_array()
                .ok_or_else(|| malformed("atoms", "must be an array of [angle, weight] pairs"))?;
            if list.is_empty() {
                return Err(out_of_range("atoms", "at least one atom is required"));
            }
            let mut pairs = Vec::with_capacity(list.len());
            for (i, a) in list.iter().enumerate() {
                let field = format!("atoms[{i}]");
                let pair = a
                    .as_array()
                    .filter(|p| p.len() == 2)
                    .ok_or_else(|| malformed(&field, "must be an [angle, weight] pair"))?;
                let angle = pair[0]
                    .as_f64()
                    .ok_or_else(|| malformed(&field, "angle must be a number"))?;
                let weight = pair[1]
                    .as_f64()
                    .ok_or_else(|| malformed(&field, "weight must be a number"))?;
                if !(weight > 0.0) || !angle.is_finite() {
                    return Err(out_of_range(
                        &field,
                        format!("weight {weight} must be positive"),
                    ));
                }
                pairs.push((angle, weight));
            }
            let total: f64 = pairs.iter().map(|p| p.1).sum();
            if (total - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(out_of_range(
                    "atoms",
                    format!("weights sum to {total}, expected 1 within {WEIGHT_SUM_TOLERANCE:e}"),
                ));
            }
            Ok(AtomSource::Explicit(pairs))
        }
        (None, Some(g)) => {
            only(obj, &["generator"], "atomic")?;
            let name = generator_name(g)?;
            if name != "zhedanov" {
                return Err(diag(
                    DiagnosticCode::UnknownGenerator,
                    "generator.name",
                    format!("atomic measures support only `zhedanov`, got `{name}`"),
                ));
            }
            let g = g.as_object().expect("checked object");
            check_keys(g, &["p", "theta0", "count"])?;
            let p = get_f64(g, "p")?;
            let theta0 = get_f64(g, "theta0")?;
            let count = get_usize(g, "count")?;
            if !(p > 0.0 && p < 1.0) {
                return Err(out_of_range(
                    "generator.p",
                    format!("p = {p} must lie in (0, 1)"),
                ));
            }
            if !theta0.is_finite() {
                return Err(out_of_range("generator.theta0", "θ₀ must be finite"));
            }
            if count == 0 {
                return Err(out_of_range(
                    "generator.count",
                    "at least one atom is required",
                ));
            }
            Ok(AtomSource::TruncatedZhedanov { p, theta0, count })
        }
    }
}

fn parse_weight(obj: &Map<String, Value>) -> Result<WeightSource, SpecDiagnostic> {
    match (obj.get("samples"), obj.get("generator")) {
        (Some(_), Some(_)) => Err(malformed(
            "samples",
            "give either samples or generator, not both",
        )),
        (None, None) => Err(malformed("samples", "missing")),
        (Some(samples), None) => {
            only(obj, &["samples"], "weight_function")?;
            let list = samples
                .as_array()
                .ok_or_else(|| malformed("samples", "must be an array of numbers"))?;
            let mut out = Vec::with_capacity(list.len());
            for (i, v) in list.iter().enumerate() {
                let field = format!("samples[{i}]");
                let w = v
                    .as_f64()
                    .ok_or_else(|| malformed(&field, "must be a number"))?;
                if !(w >= 0.0) || !w.is_finite() {
                    return Err(out_of_range(
                        &field,
                        format!("density {w} must be nonnegative"),
                    ));
                }
                out.push(w);
            }
            if out.is_empty() {
                return Err(out_of_range("samples", "at least one sample is required"));
            }
            let mean = out.iter().sum::<f64>() / out.len() as f64;
            if (mean - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
                return Err(out_of_range(
                    "samples",
                    format!("mean density {mean}, expected 1 within {WEIGHT_SUM_TOLERANCE:e}"),
                ));
            }
            Ok(WeightSource::Samples(out))
        }
        (None, Some(g)) => {
            only(obj, &["generator"], "weight_function")?;
            let name = generator_name(g)?;
            let g = g.as_object().expect("checked object");
            match name {
                "lebesgue" => {
                    check_keys(g, &["grid"])?;
                    let grid = positive_grid(g)?;
                    Ok(WeightSource::Lebesgue { grid })
                }
                "poisson" => {
                    check_keys(g, &["r", "grid"])?;
                    let r = get_f64(g, "r")?;
                    if !(r.abs() < 1.0) {
                        return Err(out_of_range(
                            "generator.r",
                            format!("r = {r} must lie in (-1, 1)"),
                        ));
                    }
                    let grid = positive_grid(g)?;
                    Ok(WeightSource::Poisson { r, grid })
                }
                other => Err(diag(
                    DiagnosticCode::UnknownGenerator,
                    "generator.name",
                    format!("weight functions support `lebesgue` and `poisson`, got `{other}`"),
                )),
            }
        }
    }
}

fn positive_grid(g: &Map<String, Value>) -> Result<usize, SpecDiagnostic> {
    let grid = get_usize(g, "grid")?;
    if grid == 0 {
        return Err(out_of_range("generator.grid", "grid must be positive"));
    }
    Ok(grid)
}

/// The inverse of [`parse_measure_spec`].
pub fn measure_to_value(spec: &MeasureSpec) -> Value {
    let mut out = match &spec.kind {
        MeasureKind::AlphaDefined(g) => json!({
            "kind": "alpha_defined",
            "generator": serde_json::to_value(g).expect("generators serialize"),
        }),
        MeasureKind::Atomic(AtomSource::Explicit(atoms)) => json!({
            "kind": "atomic",
            "atoms": atoms.iter().map(|&(a, w)| json!([a, w])).collect::<Vec<_>>(),
        }),
        MeasureKind::Atomic(AtomSource::TruncatedZhedanov { p, theta0, count }) => json!({
            "kind": "atomic",
            "generator": {"name": "zhedanov", "p": p, "theta0": theta0, "count": count},
        }),
        MeasureKind::WeightFunction(WeightSource::Samples(s)) => json!({
            "kind": "weight_function",
            "samples": s,
        }),
        MeasureKind::WeightFunction(WeightSource::Lebesgue { grid }) => json!({
            "kind": "weight_function",
            "generator": {"name": "lebesgue", "grid": grid},
        }),
        MeasureKind::WeightFunction(WeightSource::Poisson { r, grid }) => json!({
            "kind": "weight_function",
            "generator": {"name": "poisson", "r": r, "grid": grid},
        }),
    };
    out["label"] = Value::String(spec.label.clone());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(doc: &str) -> DiagnosticCode {
        parse_measure_spec(doc).unwrap_err().code
    }

    #[test]
    fn documented_examples() {
        let leb = parse_measure_spec(r#"{"kind":"alpha_defined","generator":{"name":"lebesgue"}}"#)
            .unwrap();
        assert_eq!(leb.kind, MeasureKind::AlphaDefined(GeneratorSpec::Lebesgue));

        let err = parse_measure_spec(
            r#"{"kind":"alpha_defined","generator":{"name":"zhedanov","p":1.5,"theta0":1}}"#,
        )
        .unwrap_err();
        assert_eq!(err.code, DiagnosticCode::OutOfRange);
        assert_eq!(err.field, "generator.p");

        let pair =
            parse_measure_spec(r#"{"kind":"atomic","atoms":[[0.0, 0.5],[3.14159, 0.5]]}"#).unwrap();
        assert_eq!(pair.rank(), Some(2));
    }

    #[test]
    fn distinct_codes() {
        assert_eq!(code("{not json"), DiagnosticCode::Malformed);
        assert_eq!(
            code(r#"{"kind":"alpha_defined"}"#),
            DiagnosticCode::Malformed
        );
        assert_eq!(
            code(r#"{"kind":"alpha_defined","generator":{"name":"cantor"}}"#),
            DiagnosticCode::UnknownGenerator
        );
        assert_eq!(
            code(r#"{"kind":"alpha_defined","generator":{"name":"poisson","r":0.5,"x":1}}"#),
            DiagnosticCode::Malformed
        );
        assert_eq!(
            code(r#"{"kind":"atomic","atoms":[[0.0, 0.5],[1.0, 0.4]]}"#),
            DiagnosticCode::OutOfRange
        );
        assert_eq!(
            code(r#"{"kind":"weight_function","samples":[1.0,-1.0,3.0]}"#),
            DiagnosticCode::OutOfRange
        );
    }

    #[test]
    fn round_trip() {
        for doc in [
            r#"{"kind":"alpha_defined","generator":{"name":"ell2_szego","c":0.5,"rho":0.5},"label":"x"}"#,
            r#"{"kind":"atomic","generator":{"name":"zhedanov","p":0.5,"theta0":1.0,"count":16}}"#,
            r#"{"kind":"weight_function","generator":{"name":"poisson","r":0.5,"grid":256}}"#,
            r#"{"kind":"alpha_defined","generator":{"name":"random_rotinv","profile":[1.0,2.0],"seed":7}}"#,
        ] {
            let spec = parse_measure_spec(doc).unwrap();
            let again = measure_from_value(&measure_to_value(&spec)).unwrap();
            assert_eq!(spec, again);
        }
    }
}
