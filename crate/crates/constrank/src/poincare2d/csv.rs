//! CSV codecs for grid fields and face traces.
//!
//! Grid: header `x1,x2,comp_1..comp_d`, one row per node in row-major order
//! (`x1` outer). Traces: header `edge,t,comp_1..comp_d` with `edge` in
//! `{x1lo, x1hi, x2lo, x2hi}` and `M + 1` uniform samples per edge.

use super::{GridField, PoincareError, Traces};
use std::fs;
use std::path::Path;

fn parse_f64(s: &str, what: &str) -> Result<f64, PoincareError> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| PoincareError::Shape(format!("{what}: bad number {s:?}")))
}

pub fn read_grid_csv(path: &Path, n_grid: usize) -> Result<GridField, PoincareError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PoincareError::Shape(format!("reading {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| PoincareError::Shape("empty grid csv".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "x1" || cols[1] != "x2" {
        return Err(PoincareError::Shape(
            "grid csv header must be x1,x2,comp_1..comp_d".into(),
        ));
    }
    let d = cols.len() - 2;
    let mut values = Vec::with_capacity(n_grid * n_grid * d);
    let mut count = 0usize;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 2 {
            return Err(PoincareError::Shape(format!(
                "grid row {count} has {} fields, expected {}",
                fields.len(),
                d + 2
            )));
        }
        for f in &fields[2..] {
            values.push(parse_f64(f, "grid value")?);
        }
        count += 1;
    }
    if count != n_grid * n_grid {
        return Err(PoincareError::Shape(format!(
            "grid csv has {count} nodes; a {n_grid} x {n_grid} grid needs {}",
            n_grid * n_grid
        )));
    }
    Ok(GridField {
        n_grid,
        components: d,
        values,
    })
}

pub fn write_grid_csv(path: &Path, field: &GridField) -> Result<(), PoincareError> {
    let mut out = String::new();
    out.push_str("x1,x2");
    for c in 0..field.components {
        out.push_str(&format!(",comp_{}", c + 1));
    }
    out.push('\n');
    let n = field.n_grid;
    for p1 in 0..n {
        for p2 in 0..n {
            out.push_str(&format!("{},{}", p1 as f64 / n as f64, p2 as f64 / n as f64));
            for v in field.at(p1, p2) {
                out.push_str(&format!(",{v:e}"));
            }
            out.push('\n');
        }
    }
    fs::write(path, out)
        .map_err(|e| PoincareError::Shape(format!("writing {}: {e}", path.display())))
}

pub fn read_traces_csv(path: &Path) -> Result<Traces, PoincareError> {
    let text = fs::read_to_string(path)
        .map_err(|e| PoincareError::Shape(format!("reading {}: {e}", path.display())))?;
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines
        .next()
        .ok_or_else(|| PoincareError::Shape("empty traces csv".into()))?;
    let cols: Vec<&str> = header.split(',').collect();
    if cols.len() < 3 || cols[0] != "edge" || cols[1] != "t" {
        return Err(PoincareError::Shape(
            "traces csv header must be edge,t,comp_1..comp_d".into(),
        ));
    }
    let d = cols.len() - 2;
    let mut buckets: [Vec<(f64, Vec<f64>)>; 4] = [vec![], vec![], vec![], vec![]];
    for (row, line) in lines.enumerate() {
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != d + 2 {
            return Err(PoincareError::Shape(format!(
                "trace row {row} has {} fields, expected {}",
                fields.len(),
                d + 2
            )));
        }
        let idx = match fields[0].trim() {
            "x1lo" => 0,
            "x1hi" => 1,
            "x2lo" => 2,
            "x2hi" => 3,
            other => {
                return Err(PoincareError::Shape(format!(
                    "trace row {row}: unknown edge {other:?} (expected x1lo/x1hi/x2lo/x2hi)"
                )))
            }
        };
        let t = parse_f64(fields[1], "trace parameter")?;
        let mut vals = Vec::with_capacity(d);
        for f in &fields[2..] {
            vals.push(parse_f64(f, "trace value")?);
        }
        buckets[idx].push((t, vals));
    }
    for b in &mut buckets {
        b.sort_by(|x, y| x.0.total_cmp(&y.0));
    }
    let m = buckets[0].len();
    if m < 2 || buckets.iter().any(|b| b.len() != m) {
        return Err(PoincareError::Shape(
            "all four edges need the same number (>= 2) of samples".into(),
        ));
    }
    let strip = |b: &[(f64, Vec<f64>)]| b.iter().map(|(_, v)| v.clone()).collect::<Vec<_>>();
    Ok(Traces {
        x1_lo: strip(&buckets[0]),
        x1_hi: strip(&buckets[1]),
        x2_lo: strip(&buckets[2]),
        x2_hi: strip(&buckets[3]),
    })
}

pub fn write_traces_csv(path: &Path, traces: &Traces) -> Result<(), PoincareError> {
    let d = traces.x1_lo.first().map_or(0, Vec::len);
    let mut out = String::new();
    out.push_str("edge,t");
    for c in 0..d {
        out.push_str(&format!(",comp_{}", c + 1));
    }
    out.push('\n');
    let m = traces.resolution();
    {
        let mut dump = |name: &str, vals: &[Vec<f64>]| {
            for (j, v) in vals.iter().enumerate() {
                out.push_str(&format!("{name},{}", j as f64 / m as f64));
                for x in v {
                    out.push_str(&format!(",{x:e}"));
                }
                out.push('\n');
            }
        };
        dump("x1lo", &traces.x1_lo);
        dump("x1hi", &traces.x1_hi);
        dump("x2lo", &traces.x2_lo);
        dump("x2hi", &traces.x2_hi);
    }
    fs::write(path, out)
        .map_err(|e| PoincareError::Shape(format!("writing {}: {e}", path.display())))
}
