//! Profile CSV: a `#` header line with `n`, the closure and the target spacing, a
//! `z,r` column line, then one row per point. Floats use the shortest representation
//! that round-trips, so write-then-read is bit-exact.

use std::fmt::Write as _;
use std::path::Path;

use crate::geometry::{Closure, GeometryError, ProfileCurve, ProfilePoint};

const MAGIC: &str = "# gkflow-profile";

pub fn to_csv(c: &ProfileCurve) -> String {
    let mut out = String::with_capacity(40 * c.len() + 100);
    let closure = match c.closure() {
        Closure::ClosedCaps => "closure=closed_caps".to_string(),
        Closure::PeriodicInZ { period } => format!("closure=periodic period={period:e}"),
    };
    let _ = writeln!(
        out,
        "{MAGIC} n={} {closure} target_spacing={:e}",
        c.dim(),
        c.target_spacing()
    );
    out.push_str("z,r\n");
    for p in c.points() {
        let _ = writeln!(out, "{:e},{:e}", p.z, p.r);
    }
    out
}

pub fn from_csv(text: &str) -> Result<ProfileCurve, GeometryError> {
    let err = |m: &str| GeometryError::Parse(m.to_string());
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| err("empty file"))?;
    let rest = header
        .strip_prefix(MAGIC)
        .ok_or_else(|| err("missing profile header"))?;
    let (mut n, mut closure, mut period, mut spacing) = (None, None, None, None);
    for field in rest.split_whitespace() {
        let (key, value) = field
            .split_once('=')
            .ok_or_else(|| err("header fields must be key=value"))?;
        let num = || {
            value
                .parse::<f64>()
                .map_err(|_| err(&format!("bad number for {key}")))
        };
        match key {
            "n" => n = Some(value.parse::<usize>().map_err(|_| err("bad n"))?),
            "closure" => closure = Some(value.to_string()),
            "period" => period = Some(num()?),
            "target_spacing" => spacing = Some(num()?),
            other => return Err(err(&format!("unknown header key {other}"))),
        }
    }
    let closure = match (closure.as_deref(), period) {
        (Some("closed_caps"), None) => Closure::ClosedCaps,
        (Some("periodic"), Some(period)) => Closure::PeriodicInZ { period },
        _ => {
            return Err(err(
                "closure must be closed_caps, or periodic with a period",
            ))
        }
    };
    if lines.next().map(str::trim) != Some("z,r") {
        return Err(err("expected the column line z,r"));
    }
    let mut points = Vec::new();
    for (k, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let (z, r) = line
            .split_once(',')
            .ok_or_else(|| err(&format!("row {k}: expected z,r")))?;
        let parse = |v: &str| {
            v.trim()
                .parse::<f64>()
                .map_err(|_| err(&format!("row {k}: bad number")))
        };
        points.push(ProfilePoint::new(parse(z)?, parse(r)?));
    }
    ProfileCurve::new(
        n.ok_or_else(|| err("missing n"))?,
        points,
        closure,
        spacing.ok_or_else(|| err("missing target_spacing"))?,
    )
}

pub fn write_csv(c: &ProfileCurve, path: &Path) -> std::io::Result<()> {
    std::fs::write(path, to_csv(c))
}

pub fn read_csv(path: &Path) -> Result<ProfileCurve, GeometryError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| GeometryError::Parse(format!("{}: {e}", path.display())))?;
    from_csv(&text)
}
