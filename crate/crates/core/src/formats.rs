//! CSV and JSON readers and writers. CSV floats carry 17 significant digits
//! and JSON floats use the shortest round-trip form, so every file reads back
//! to the same values.

use std::io::{Read, Write};

use crate::curve::SampledCurve;
use crate::error::{Error, Result};
use crate::surface::{SquareField, MAX_DEPTH};
use crate::tree::{GraphDocument, MetricGraphMap};
use crate::winding::WindingField;

fn parse_error(line: u64, message: impl Into<String>) -> Error {
    Error::Parse {
        line,
        message: message.into(),
    }
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::Io(io),
        kind => parse_error(line, format!("{kind:?}")),
    }
}

fn float(field: &str, line: u64, column: &str) -> Result<f64> {
    let v: f64 = field
        .trim()
        .parse()
        .map_err(|_| parse_error(line, format!("column {column}: {field:?} is not a number")))?;
    if !v.is_finite() {
        return Err(parse_error(line, format!("column {column}: non-finite value")));
    }
    Ok(v)
}

/// Header row, then one `(line, fields)` per record.
fn read_records(input: impl Read) -> Result<(Vec<String>, Vec<(u64, Vec<String>)>)> {
    let mut reader = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(input);
    let header = reader
        .headers()
        .map_err(csv_error)?
        .iter()
        .map(str::to_owned)
        .collect();
    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(csv_error)?;
        let line = record.position().map_or(0, |p| p.line());
        rows.push((line, record.iter().map(str::to_owned).collect()));
    }
    Ok((header, rows))
}

fn expect_header(header: &[String], expected: &[&str]) -> Result<()> {
    if header.len() != expected.len() || header.iter().zip(expected).any(|(h, e)| h != e) {
        return Err(parse_error(1, format!("expected header {:?}, found {header:?}", expected.join(","))));
    }
    Ok(())
}

/// Reads a `t,x1,...,xd` curve. The curve is closed when its first and last
/// samples are bitwise equal.
pub fn read_curve_csv(input: impl Read) -> Result<SampledCurve> {
    let (header, rows) = read_records(input)?;
    let dim = header.len().saturating_sub(1);
    if dim == 0 {
        return Err(parse_error(1, "header needs a time column and at least one coordinate"));
    }
    let names: Vec<String> = (1..=dim).map(|k| format!("x{k}")).collect();
    let mut expected = vec!["t"];
    expected.extend(names.iter().map(String::as_str));
    expect_header(&header, &expected)?;
    let mut times = Vec::with_capacity(rows.len());
    let mut coords = Vec::with_capacity(rows.len() * dim);
    for (line, fields) in &rows {
        times.push(float(&fields[0], *line, "t")?);
        for (k, f) in fields[1..].iter().enumerate() {
            coords.push(float(f, *line, &names[k])?);
        }
    }
    if let Some(w) = times.windows(2).position(|w| w[1] <= w[0]) {
        return Err(parse_error(rows[w + 1].0, "times must be strictly increasing"));
    }
    let n = times.len();
    let closed = n >= 2
        && coords[..dim]
            .iter()
            .zip(&coords[(n - 1) * dim..])
            .all(|(a, b)| a.to_bits() == b.to_bits());
    SampledCurve::from_flat(times, dim, coords, closed)
}

pub fn write_curve_csv(mut out: impl Write, curve: &SampledCurve) -> Result<()> {
    let header: Vec<String> = std::iter::once("t".to_owned())
        .chain((1..=curve.dim()).map(|k| format!("x{k}")))
        .collect();
    writeln!(out, "{}", header.join(","))?;
    for (i, t) in curve.times().iter().enumerate() {
        write!(out, "{t:.16e}")?;
        for v in curve.point(i) {
            write!(out, ",{v:.16e}")?;
        }
        writeln!(out)?;
    }
    Ok(())
}

/// Reads `s,t,phi1,phi2` rows covering a full `(2^N + 1)²` lattice, in any
/// order.
pub fn read_square_field_csv(input: impl Read) -> Result<SquareField> {
    let (header, rows) = read_records(input)?;
    expect_header(&header, &["s", "t", "phi1", "phi2"])?;
    let mut parsed = Vec::with_capacity(rows.len());
    for (line, f) in &rows {
        parsed.push((
            *line,
            float(&f[0], *line, "s")?,
            float(&f[1], *line, "t")?,
            float(&f[2], *line, "phi1")?,
            float(&f[3], *line, "phi2")?,
        ));
    }
    let axis = |pick: fn(&(u64, f64, f64, f64, f64)) -> f64| {
        let mut v: Vec<f64> = parsed.iter().map(pick).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    };
    let s_axis = axis(|r| r.1);
    let t_axis = axis(|r| r.2);
    let n = s_axis.len();
    let depth = (0..=MAX_DEPTH).find(|&d| (1usize << d) + 1 == n).ok_or_else(|| {
        parse_error(0, format!("{n} distinct s values is not 2^N + 1 for N ≤ {MAX_DEPTH}"))
    })?;
    if t_axis.len() != n || parsed.len() != n * n {
        return Err(parse_error(
            0,
            format!("expected a full {n} x {n} grid, found {} rows over {} t values", parsed.len(), t_axis.len()),
        ));
    }
    let corner = [s_axis[0], t_axis[0]];
    let side = s_axis[n - 1] - s_axis[0];
    let t_side = t_axis[n - 1] - t_axis[0];
    if !(side > 0.0) || (t_side - side).abs() > 1e-9 * side {
        return Err(parse_error(0, "the grid must be square with positive side"));
    }
    let mut phi1 = vec![f64::NAN; n * n];
    let mut phi2 = vec![f64::NAN; n * n];
    let mut seen = vec![false; n * n];
    for &(line, s, t, a, b) in &parsed {
        let col = s_axis.partition_point(|&v| v < s);
        let row = t_axis.partition_point(|&v| v < t);
        let k = row * n + col;
        if seen[k] {
            return Err(parse_error(line, format!("duplicate grid point ({s}, {t})")));
        }
        seen[k] = true;
        phi1[k] = a;
        phi2[k] = b;
    }
    SquareField::new(corner, side, depth, phi1, phi2)
}

pub fn write_square_field_csv(mut out: impl Write, field: &SquareField) -> Result<()> {
    writeln!(out, "s,t,phi1,phi2")?;
    let n = field.points_per_side();
    for row in 0..n {
        for col in 0..n {
            let [s, t] = field.point(col, row);
            let [a, b] = field.value(col, row);
            writeln!(out, "{s:.16e},{t:.16e},{a:.16e},{b:.16e}")?;
        }
    }
    Ok(())
}

pub fn read_graph_json(input: impl Read) -> Result<MetricGraphMap> {
    let doc: GraphDocument = serde_json::from_reader(input).map_err(|e| parse_error(e.line() as u64, e.to_string()))?;
    MetricGraphMap::from_document(doc)
}

pub fn write_graph_json(out: impl Write, map: &MetricGraphMap) -> Result<()> {
    serde_json::to_writer(out, &map.to_document())?;
    Ok(())
}

/// Writes `row,col,defined,value` for every cell.
pub fn write_winding_csv(mut out: impl Write, field: &WindingField) -> Result<()> {
    writeln!(out, "row,col,defined,value")?;
    for row in 0..field.nrows {
        for col in 0..field.ncols {
            let defined = u8::from(field.is_defined(col, row));
            writeln!(out, "{row},{col},{defined},{}", field.value(col, row))?;
        }
    }
    Ok(())
}

/// Reads a winding grid; the CSV carries no geometry, so the grid origin and
/// cell size are supplied by the caller.
pub fn read_winding_csv(input: impl Read, origin: [f64; 2], cell: f64) -> Result<WindingField> {
    let (header, rows) = read_records(input)?;
    expect_header(&header, &["row", "col", "defined", "value"])?;
    let mut cells = Vec::with_capacity(rows.len());
    let (mut nrows, mut ncols) = (0usize, 0usize);
    for (line, f) in &rows {
        let int = |k: usize, name: &str| -> Result<i64> {
            f[k].parse()
                .map_err(|_| parse_error(*line, format!("column {name}: {:?} is not an integer", f[k])))
        };
        let (row, col, defined, value) = (int(0, "row")?, int(1, "col")?, int(2, "defined")?, int(3, "value")?);
        if row < 0 || col < 0 || row >= 1 << 31 || col >= 1 << 31 {
            return Err(parse_error(*line, "row and col must be non-negative"));
        }
        if !(defined == 0 || defined == 1) {
            return Err(parse_error(*line, "defined must be 0 or 1"));
        }
        let value = i32::try_from(value).map_err(|_| parse_error(*line, "value out of range"))?;
        nrows = nrows.max(row as usize + 1);
        ncols = ncols.max(col as usize + 1);
        cells.push((*line, row as usize, col as usize, defined == 1, value));
    }
    if nrows.checked_mul(ncols) != Some(cells.len()) {
        return Err(parse_error(0, format!("expected {nrows} x {ncols} cells, found {}", cells.len())));
    }
    let mut values = vec![0; cells.len()];
    let mut defined = vec![false; cells.len()];
    let mut seen = vec![false; cells.len()];
    for (line, row, col, d, v) in cells {
        let k = row * ncols + col;
        if seen[k] {
            return Err(parse_error(line, format!("duplicate cell ({row}, {col})")));
        }
        seen[k] = true;
        values[k] = v;
        defined[k] = d;
    }
    Ok(WindingField {
        origin,
        cell,
        ncols,
        nrows,
        values,
        defined,
    })
}
