//! Text dumps of point lists and model sets, and the CSV result tables.

use std::io::{BufRead, Write};

use serde::Serialize;

use crate::counting::{CountRow, PatchStats};
use crate::cutproject::{ModelPoint, ModelSet};
use crate::{Error, Result};

/// Decimal rendering with 12 significant digits.
pub fn format_sig12(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return if x == 0.0 { "0".into() } else { x.to_string() };
    }
    let exp = x.abs().log10().floor() as i32;
    let decimals = (11 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    // rounding can carry into a new leading digit
    let digits = s.chars().filter(|c| c.is_ascii_digit()).skip_while(|&c| c == '0').count();
    if digits > 12 && decimals > 0 {
        format!("{x:.prec$}", prec = decimals - 1)
    } else {
        s
    }
}

fn join(xs: &[f64]) -> String {
    xs.iter().map(|&x| format_sig12(x)).collect::<Vec<_>>().join(" ")
}

/// `n <dim>` followed by one point per line.
pub fn write_point_dump<W: Write>(mut w: W, dim: usize, points: &[Vec<f64>]) -> Result<()> {
    writeln!(w, "n {dim}")?;
    for p in points {
        if p.len() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.len() });
        }
        writeln!(w, "{}", join(p))?;
    }
    Ok(())
}

fn parse_err(kind: &'static str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { kind, line, message: message.into() }
}

fn header_value<'a>(line: &'a str, key: &str) -> Option<&'a str> {
    line.split_whitespace().find_map(|tok| tok.strip_prefix(key))
}

pub fn read_point_dump<R: BufRead>(r: R) -> Result<(usize, Vec<Vec<f64>>)> {
    const KIND: &str = "point dump";
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| parse_err(KIND, 1, "missing header"))??;
    let dim: usize = header
        .strip_prefix("n ")
        .and_then(|v| v.trim().parse().ok())
        .ok_or_else(|| parse_err(KIND, 1, format!("expected `n <dim>`, found {header:?}")))?;
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let p: Vec<f64> = line
            .split_whitespace()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(KIND, i + 2, e.to_string())))
            .collect::<Result<_>>()?;
        if p.len() != dim {
            return Err(parse_err(KIND, i + 2, format!("expected {dim} coordinates, found {}", p.len())));
        }
        points.push(p);
    }
    Ok((dim, points))
}

/// `cps d=<d> m=<m>` followed by the physical coordinates and the integer
/// lift of each point.
pub fn write_model_set_dump<W: Write>(mut w: W, d: usize, m: usize, ms: &ModelSet) -> Result<()> {
    writeln!(w, "cps d={d} m={m}")?;
    for p in &ms.points {
        if p.phys.len() != d || p.lift.len() != d + m {
            return Err(Error::DimensionMismatch { expected: d + m, got: p.lift.len() });
        }
        let lift: Vec<String> = p.lift.iter().map(|c| c.to_string()).collect();
        writeln!(w, "{} {}", join(&p.phys), lift.join(" "))?;
    }
    Ok(())
}

pub fn read_model_set_dump<R: BufRead>(r: R) -> Result<(usize, usize, Vec<ModelPoint>)> {
    const KIND: &str = "model-set dump";
    let mut lines = r.lines();
    let header = lines.next().ok_or_else(|| parse_err(KIND, 1, "missing header"))??;
    let bad_header = || parse_err(KIND, 1, format!("expected `cps d=<d> m=<m>`, found {header:?}"));
    if !header.starts_with("cps ") {
        return Err(bad_header());
    }
    let d: usize = header_value(&header, "d=").and_then(|v| v.parse().ok()).ok_or_else(bad_header)?;
    let m: usize = header_value(&header, "m=").and_then(|v| v.parse().ok()).ok_or_else(bad_header)?;
    let mut points = Vec::new();
    for (i, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let toks: Vec<&str> = line.split_whitespace().collect();
        if toks.len() != 2 * d + m {
            return Err(parse_err(KIND, i + 2, format!("expected {} fields, found {}", 2 * d + m, toks.len())));
        }
        let phys = toks[..d]
            .iter()
            .map(|t| t.parse::<f64>().map_err(|e| parse_err(KIND, i + 2, e.to_string())))
            .collect::<Result<_>>()?;
        let lift = toks[d..]
            .iter()
            .map(|t| t.parse::<i64>().map_err(|e| parse_err(KIND, i + 2, e.to_string())))
            .collect::<Result<_>>()?;
        points.push(ModelPoint { phys, lift });
    }
    Ok((d, m, points))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EstimatorRow {
    pub run_id: String,
    pub t: f64,
    pub count: usize,
    pub mean: f64,
    pub stderr: f64,
    pub reference: f64,
    pub z_score: f64,
}

pub fn write_estimator_csv<W: Write>(w: W, rows: &[EstimatorRow]) -> Result<()> {
    write_rows(w, rows)
}

#[derive(Serialize)]
struct CountingRecord {
    #[serde(rename = "T")]
    t: f64,
    vol: f64,
    count: u64,
    error: f64,
    log_vol: f64,
    log_abs_error: f64,
}

pub fn write_counting_csv<W: Write>(w: W, rows: &[CountRow]) -> Result<()> {
    let recs: Vec<CountingRecord> = rows
        .iter()
        .map(|r| CountingRecord {
            t: r.t,
            vol: r.vol,
            count: r.count,
            error: r.error,
            log_vol: r.log_vol(),
            log_abs_error: r.log_abs_error(),
        })
        .collect();
    write_rows(w, &recs)
}

#[derive(Serialize)]
struct PatchRecord {
    key_hash: String,
    multiplicity: u64,
    predicted_freq: f64,
    empirical_freq: f64,
    rel_error: f64,
}

pub fn write_patch_csv<W: Write>(w: W, stats: &PatchStats) -> Result<()> {
    let recs: Vec<PatchRecord> = stats
        .classes
        .iter()
        .map(|c| PatchRecord {
            key_hash: format!("{:016x}", c.key_hash()),
            multiplicity: c.multiplicity,
            predicted_freq: c.predicted,
            empirical_freq: c.empirical,
            rel_error: c.rel_error(),
        })
        .collect();
    write_rows(w, &recs)
}

/// CSV of serializable records, header taken from the field names.
pub fn write_rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    for r in rows {
        wtr.serialize(r)?;
    }
    wtr.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cutproject::presets;
    use crate::lattice::Region;

    #[test]
    fn twelve_significant_digits() {
        assert_eq!(format_sig12(std::f64::consts::PI), "3.14159265359");
        assert_eq!(format_sig12(-1234.5), "-1234.50000000");
        assert_eq!(format_sig12(9.999_999_999_999_9), "10.0000000000");
        assert_eq!(format_sig12(0.0), "0");
        assert_eq!(format_sig12(1.5e-5), "0.0000150000000000");
    }

    #[test]
    fn point_dump_round_trip() {
        let pts = vec![vec![0.5, -1.0 / 3.0], vec![1e6, 2.0f64.sqrt()]];
        let mut buf = Vec::new();
        write_point_dump(&mut buf, 2, &pts).unwrap();
        let (dim, back) = read_point_dump(buf.as_slice()).unwrap();
        assert_eq!(dim, 2);
        for (a, b) in pts.iter().flatten().zip(back.iter().flatten()) {
            assert!((a - b).abs() <= 1e-11 * a.abs().max(1.0));
        }
    }

    #[test]
    fn model_set_dump_round_trip() {
        let cp = presets::ammann_beenker();
        let ms = cp.generate(&Region::ball(2, 6.0)).unwrap();
        let mut buf = Vec::new();
        write_model_set_dump(&mut buf, 2, 2, &ms).unwrap();
        assert!(String::from_utf8_lossy(&buf).starts_with("cps d=2 m=2\n"));
        let (d, m, back) = read_model_set_dump(buf.as_slice()).unwrap();
        assert_eq!((d, m, back.len()), (2, 2, ms.len()));
        for (a, b) in ms.points.iter().zip(&back) {
            assert_eq!(a.lift, b.lift);
        }
    }

    #[test]
    fn malformed_dumps() {
        assert!(matches!(read_point_dump("x 2\n".as_bytes()), Err(Error::Parse { line: 1, .. })));
        assert!(matches!(read_point_dump("n 2\n1 2\n3\n".as_bytes()), Err(Error::Parse { line: 3, .. })));
        assert!(matches!(read_model_set_dump("cps d=1 m=1\n0.5 1\n".as_bytes()), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn csv_headers() {
        let mut buf = Vec::new();
        let rows = [EstimatorRow {
            run_id: "a".into(),
            t: 8.0,
            count: 4,
            mean: 1.0,
            stderr: 0.5,
            reference: 1.0,
            z_score: 0.0,
        }];
        write_estimator_csv(&mut buf, &rows).unwrap();
        let s = String::from_utf8(buf).unwrap();
        assert!(s.starts_with("run_id,t,count,mean,stderr,reference,z_score\n"));
        let mut buf = Vec::new();
        write_counting_csv(&mut buf, &[CountRow { t: 1.0, vol: 2.0, count: 1, error: -1.0 }]).unwrap();
        assert!(String::from_utf8(buf).unwrap().starts_with("T,vol,count,error,log_vol,log_abs_error\n"));
    }
}
