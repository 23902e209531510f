use std::io::{Read, Write};

use crate::error::{Error, Result};
use crate::plant::SimRecord;

/// `t,z1..zn,zhat1..zhatn,s,sfn,bound_lo,bound_hi,xi,v,u,G`
pub fn csv_header(order: usize) -> Vec<String> {
    let mut cols = vec!["t".to_string()];
    cols.extend((1..=order).map(|i| format!("z{i}")));
    cols.extend((1..=order).map(|i| format!("zhat{i}")));
    cols.extend(["s", "sfn", "bound_lo", "bound_hi", "xi", "v", "u", "G"].map(String::from));
    cols
}

/// 17 significant digits, which round-trips every `f64`.
fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(out: W, order: usize, records: &[SimRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(csv_header(order))?;
    for r in records {
        let mut row = vec![fmt(r.t)];
        row.extend(r.z_true.iter().chain(&r.z_hat).map(|&x| fmt(x)));
        row.extend(
            [r.s, r.s_fn, r.bound_lower, r.bound_upper, r.xi, r.v, r.u, r.gain].map(fmt),
        );
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

/// Records parsed back from a log. Quantities not stored in the file
/// (`nominal_upper`, `clamped`) are NaN and `false`; `coordinate` is `sfn`
/// when present and `s` otherwise.
#[derive(Clone, Debug, PartialEq)]
pub struct CsvLog {
    pub order: usize,
    pub records: Vec<SimRecord>,
}

pub fn read_csv<R: Read>(input: R) -> Result<CsvLog> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(String::from).collect();
    let order = header
        .len()
        .checked_sub(9)
        .filter(|k| k % 2 == 0 && *k > 0)
        .map(|k| k / 2)
        .ok_or_else(|| Error::Config(format!("unexpected CSV header {header:?}")))?;
    if header != csv_header(order) {
        return Err(Error::Config(format!("unexpected CSV header {header:?}")));
    }
    let mut records = Vec::new();
    for (line, row) in r.records().enumerate() {
        let row = row?;
        let vals = row
            .iter()
            .map(|f| f.parse::<f64>())
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| Error::Config(format!("CSV data row {}: {e}", line + 1)))?;
        let n = order;
        let tail = &vals[1 + 2 * n..];
        let (s, s_fn) = (tail[0], tail[1]);
        records.push(SimRecord {
            t: vals[0],
            z_true: vals[1..1 + n].to_vec(),
            z_hat: vals[1 + n..1 + 2 * n].to_vec(),
            s,
            s_fn,
            coordinate: if s_fn.is_nan() { s } else { s_fn },
            bound_lower: tail[2],
            bound_upper: tail[3],
            nominal_upper: f64::NAN,
            xi: tail[4],
            v: tail[5],
            u: tail[6],
            gain: tail[7],
            clamped: false,
        });
    }
    Ok(CsvLog { order, records })
}
