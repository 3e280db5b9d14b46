//! Text formats: intensity CSV with JSON sidecar, coefficient tables and
//! report blocks. Numbers are written with 17 significant digits so that
//! every `f64` survives a write/read cycle bit for bit.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::angular::AngularFunction;
use crate::error::{Error, Result};
use crate::geometry::{RayGeometry, RaySign, Vec2};
use crate::karp::{FarFieldSeries, KarpExpansion};
use crate::scenes::{RayIntensityData, RayMeta};

/// Shortest fixed-width rendering with 17 significant digits.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn parse_f64(field: &str, line: usize, what: &str) -> Result<f64> {
    field
        .trim()
        .parse::<f64>()
        .map_err(|_| Error::Parse(format!("line {line}: invalid {what} {:?}", field.trim())))
}

fn parse_i64(field: &str, line: usize, what: &str) -> Result<i64> {
    field
        .trim()
        .parse::<i64>()
        .map_err(|_| Error::Parse(format!("line {line}: invalid {what} {:?}", field.trim())))
}

/// Non-empty lines after the header, with 1-based line numbers.
fn body<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, Vec<&'a str>)>> {
    let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
    match lines.next() {
        Some((_, first)) if first.trim().eq_ignore_ascii_case(header) => {}
        Some((_, first)) => {
            return Err(Error::Parse(format!(
                "expected header {header:?}, found {:?}",
                first.trim()
            )));
        }
        None => return Err(Error::Parse(format!("empty file, expected header {header:?}"))),
    }
    let width = header.split(',').count();
    let rows: Vec<(usize, Vec<&str>)> = lines.map(|(i, l)| (i + 1, l.split(',').collect())).collect();
    if let Some((line, fields)) = rows.iter().find(|(_, f)| f.len() != width) {
        return Err(Error::Parse(format!(
            "line {line}: expected {width} fields, found {}",
            fields.len()
        )));
    }
    Ok(rows.into_iter())
}

pub const INTENSITY_HEADER: &str = "s,intensity";

pub fn write_intensity_csv(rows: &[(f64, f64)]) -> String {
    let mut out = String::from(INTENSITY_HEADER);
    out.push('\n');
    for &(s, v) in rows {
        let _ = writeln!(out, "{},{}", fmt_f64(s), fmt_f64(v));
    }
    out
}

/// Rows `(s, intensity)`; values are not range-checked here.
pub fn parse_intensity_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    body(text, INTENSITY_HEADER)?
        .map(|(line, f)| Ok((parse_f64(f[0], line, "s")?, parse_f64(f[1], line, "intensity")?)))
        .collect()
}

/// Metadata written next to every intensity CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RaySidecar {
    pub kappa: f64,
    pub k: Vec2,
    pub theta: Vec2,
    pub base: Vec2,
    pub tau: f64,
    pub ray: RaySign,
    /// Origin of the recovery frame; defaults to `base`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_origin: Option<Vec2>,
    #[serde(default)]
    pub config_hash: String,
    /// Free-form record of defaulted and explicit settings.
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub config: serde_json::Map<String, serde_json::Value>,
}

impl RaySidecar {
    pub fn from_meta(meta: &RayMeta, config_hash: &str) -> Self {
        Self {
            kappa: meta.kappa,
            k: meta.k,
            theta: meta.geometry.theta,
            base: meta.geometry.base,
            tau: meta.geometry.tau,
            ray: meta.geometry.sign,
            frame_origin: (meta.frame_origin != meta.geometry.base).then_some(meta.frame_origin),
            config_hash: config_hash.to_string(),
            config: serde_json::Map::new(),
        }
    }

    pub fn to_meta(&self) -> Result<RayMeta> {
        let geometry = RayGeometry::new(self.base, self.theta, self.ray, self.tau)?;
        RayMeta::new(self.kappa, self.k, geometry, self.frame_origin.unwrap_or(self.base))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("sidecar serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }
}

/// Intensity rows plus sidecar into validated ray data.
pub fn load_ray(csv: &str, sidecar: &str) -> Result<RayIntensityData> {
    let meta = RaySidecar::from_json(sidecar)?.to_meta()?;
    RayIntensityData::new(meta, parse_intensity_csv(csv)?)
}

pub const ANGULAR_HEADER: &str = "m,re,im";

pub fn write_angular_csv(f: &AngularFunction) -> String {
    let mut out = String::from(ANGULAR_HEADER);
    out.push('\n');
    for (m, v) in f.modes() {
        let _ = writeln!(out, "{m},{},{}", fmt_f64(v.re), fmt_f64(v.im));
    }
    out
}

/// Angular function with the given truncation; modes outside it are
/// rejected.
pub fn parse_angular_csv(text: &str, truncation: usize) -> Result<AngularFunction> {
    let mut f = AngularFunction::zero(truncation);
    for (line, fields) in body(text, ANGULAR_HEADER)? {
        let m = parse_i64(fields[0], line, "mode")?;
        let v = Complex64::new(parse_f64(fields[1], line, "re")?, parse_f64(fields[2], line, "im")?);
        f.set_mode(m, v)?;
    }
    Ok(f)
}

pub const EXPANSION_HEADER: &str = "kind,j,m,re,im";

fn push_rows(out: &mut String, kind: &str, coeffs: &[AngularFunction]) {
    for (j, c) in coeffs.iter().enumerate() {
        for (m, v) in c.modes() {
            if v != Complex64::new(0.0, 0.0) {
                let _ = writeln!(out, "{kind},{j},{m},{},{}", fmt_f64(v.re), fmt_f64(v.im));
            }
        }
    }
}

/// `F` and `G` rows of a Karp expansion (zero modes omitted).
pub fn write_karp_csv(k: &KarpExpansion) -> String {
    let mut out = String::from(EXPANSION_HEADER);
    out.push('\n');
    push_rows(&mut out, "F", k.f());
    push_rows(&mut out, "G", k.g());
    out
}

/// `f` rows of a far-field series (zero modes omitted).
pub fn write_farfield_csv(f: &FarFieldSeries) -> String {
    let mut out = String::from(EXPANSION_HEADER);
    out.push('\n');
    push_rows(&mut out, "f", &f.f);
    out
}

/// Coefficient table as `(kind, j, m, value)` rows.
pub fn parse_expansion_csv(text: &str) -> Result<Vec<(String, usize, i64, Complex64)>> {
    body(text, EXPANSION_HEADER)?
        .map(|(line, f)| {
            let kind = f[0].trim();
            if !matches!(kind, "F" | "G" | "f") {
                return Err(Error::Parse(format!("line {line}: unknown coefficient kind {kind:?}")));
            }
            let j = parse_i64(f[1], line, "index")?;
            let j = usize::try_from(j).map_err(|_| Error::Parse(format!("line {line}: negative index {j}")))?;
            let m = parse_i64(f[2], line, "mode")?;
            let v = Complex64::new(parse_f64(f[3], line, "re")?, parse_f64(f[4], line, "im")?);
            Ok((kind.to_string(), j, m, v))
        })
        .collect()
}

fn assemble(
    rows: &[(String, usize, i64, Complex64)],
    kind: &str,
    len: usize,
    truncation: usize,
) -> Result<Vec<AngularFunction>> {
    let mut out = vec![AngularFunction::zero(truncation); len];
    for (_, j, m, v) in rows.iter().filter(|r| r.0 == kind) {
        let slot = &mut out[*j];
        if slot.mode(*m) != Complex64::new(0.0, 0.0) {
            return Err(Error::Parse(format!("duplicate {kind}_{j} mode {m}")));
        }
        slot.set_mode(*m, *v)?;
    }
    Ok(out)
}

fn table_shape(rows: &[(String, usize, i64, Complex64)], truncation: usize) -> Result<usize> {
    let len = rows.iter().map(|r| r.1 + 1).max().unwrap_or(1);
    if len > crate::karp::MAX_ORDER + 1 {
        return Err(Error::Parse(format!("coefficient index {} is too large", len - 1)));
    }
    if let Some(r) = rows.iter().find(|r| r.2.unsigned_abs() as usize > truncation) {
        return Err(Error::Parse(format!("mode {} exceeds truncation {truncation}", r.2)));
    }
    Ok(len)
}

pub fn parse_karp_csv(text: &str, kappa: f64, truncation: usize) -> Result<KarpExpansion> {
    let rows = parse_expansion_csv(text)?;
    if rows.iter().any(|r| r.0 == "f") {
        return Err(Error::Parse("Karp table may only contain F and G rows".to_string()));
    }
    let len = table_shape(&rows, truncation)?;
    KarpExpansion::new(
        kappa,
        assemble(&rows, "F", len, truncation)?,
        assemble(&rows, "G", len, truncation)?,
        0.0,
    )
}

pub fn parse_farfield_csv(text: &str, kappa: f64, truncation: usize) -> Result<FarFieldSeries> {
    let rows = parse_expansion_csv(text)?;
    if rows.iter().any(|r| r.0 != "f") {
        return Err(Error::Parse("far-field table may only contain f rows".to_string()));
    }
    let len = table_shape(&rows, truncation)?;
    FarFieldSeries::new(kappa, assemble(&rows, "f", len, truncation)?)
}

pub const COEFFICIENT_HEADER: &str = "order,re,im,diag_residual";

/// One report block: per-order value and diagnostic residual.
pub fn write_coefficient_block(values: &[Complex64], residuals: &[f64]) -> String {
    let mut out = String::from(COEFFICIENT_HEADER);
    out.push('\n');
    for (n, (v, r)) in values.iter().zip(residuals).enumerate() {
        let _ = writeln!(out, "{n},{},{},{}", fmt_f64(v.re), fmt_f64(v.im), fmt_f64(*r));
    }
    out
}

pub fn parse_coefficient_block(text: &str) -> Result<Vec<(Complex64, f64)>> {
    body(text, COEFFICIENT_HEADER)?
        .enumerate()
        .map(|(i, (line, f))| {
            let n = parse_i64(f[0], line, "order")?;
            if n != i as i64 {
                return Err(Error::Parse(format!("line {line}: expected order {i}, found {n}")));
            }
            Ok((
                Complex64::new(parse_f64(f[1], line, "re")?, parse_f64(f[2], line, "im")?),
                parse_f64(f[3], line, "diag_residual")?,
            ))
        })
        .collect()
}

pub const FIELD_HEADER: &str = "ray,s,re,im";

pub fn write_field_csv(samples: &[crate::recover::FieldSample]) -> String {
    let mut out = String::from(FIELD_HEADER);
    out.push('\n');
    for s in samples {
        let _ = writeln!(
            out,
            "{},{},{},{}",
            s.ray.label(),
            fmt_f64(s.s),
            fmt_f64(s.value.re),
            fmt_f64(s.value.im)
        );
    }
    out
}

pub fn parse_field_csv(text: &str) -> Result<Vec<(RaySign, f64, Complex64)>> {
    body(text, FIELD_HEADER)?
        .map(|(line, f)| {
            let ray = match f[0].trim() {
                "plus" => RaySign::Plus,
                "minus" => RaySign::Minus,
                other => return Err(Error::Parse(format!("line {line}: unknown ray {other:?}"))),
            };
            Ok((
                ray,
                parse_f64(f[1], line, "s")?,
                Complex64::new(parse_f64(f[2], line, "re")?, parse_f64(f[3], line, "im")?),
            ))
        })
        .collect()
}
