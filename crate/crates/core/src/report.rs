//! Report rows, CSV/JSON emission and number formatting for the CLI.

use std::io::{Read, Write};

use num_complex::Complex64;
use serde_json::json;

use crate::error::{Error, Result};
use crate::measures::CoherenceMeasureId;
use crate::power::PowerEstimate;

pub const CSV_HEADER: [&str; 8] = [
    "label",
    "N",
    "measure",
    "incoherent",
    "global",
    "gap",
    "seed",
    "ms",
];

/// One unitary's incoherent-restricted and global power side by side.
#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub label: String,
    pub dim: usize,
    pub measure: CoherenceMeasureId,
    pub incoherent: f64,
    pub global: f64,
    /// `global - incoherent`
    pub gap: f64,
    pub achiever: Vec<Complex64>,
    pub restarts: usize,
    pub seed: u64,
    pub ms: u64,
}

impl ReportRow {
    pub fn new(
        label: impl Into<String>,
        incoherent: &PowerEstimate,
        global: &PowerEstimate,
        seed: u64,
        ms: u64,
    ) -> Result<Self> {
        if incoherent.measure != global.measure {
            return Err(Error::InvalidParameter(
                "incoherent and global estimates use different measures".into(),
            ));
        }
        Ok(Self {
            label: label.into(),
            dim: global.achiever.dim(),
            measure: global.measure,
            incoherent: incoherent.value,
            global: global.value,
            gap: global.value - incoherent.value,
            achiever: global.achiever.amplitudes().to_vec(),
            restarts: global.diagnostics.restarts,
            seed,
            ms,
        })
    }

    pub fn csv_record(&self) -> CsvRecord {
        CsvRecord {
            label: self.label.clone(),
            dim: self.dim,
            measure: self.measure,
            incoherent: self.incoherent,
            global: self.global,
            gap: self.gap,
            seed: self.seed,
            ms: self.ms,
        }
    }
}

/// The columns of a scan CSV file, in header order.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRecord {
    pub label: String,
    pub dim: usize,
    pub measure: CoherenceMeasureId,
    pub incoherent: f64,
    pub global: f64,
    pub gap: f64,
    pub seed: u64,
    pub ms: u64,
}

/// 17 significant digits, lossless for f64.
pub fn format_file_float(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn write_csv<W: Write>(records: &[CsvRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let csv_err = |e: csv::Error| Error::Io(std::io::Error::other(e));
    w.write_record(CSV_HEADER).map_err(csv_err)?;
    for r in records {
        w.write_record([
            r.label.clone(),
            r.dim.to_string(),
            r.measure.to_string(),
            format_file_float(r.incoherent),
            format_file_float(r.global),
            format_file_float(r.gap),
            r.seed.to_string(),
            r.ms.to_string(),
        ])
        .map_err(csv_err)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<Vec<CsvRecord>> {
    let mut reader = csv::Reader::from_reader(input);
    let parse_err = |line: usize, message: String| Error::Parse {
        line,
        column: 1,
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    if headers.iter().ne(CSV_HEADER) {
        return Err(parse_err(1, format!("unexpected header {headers:?}")));
    }
    let mut records = Vec::new();
    for (i, rec) in reader.records().enumerate() {
        let line = i + 2;
        let rec = rec.map_err(|e| parse_err(line, e.to_string()))?;
        let field = |k: usize| rec.get(k).unwrap_or_default();
        let num = |k: usize| -> Result<f64> {
            field(k).parse().map_err(|_| {
                parse_err(
                    line,
                    format!("bad number `{}` in column {}", field(k), CSV_HEADER[k]),
                )
            })
        };
        let int = |k: usize| -> Result<u64> {
            field(k).parse().map_err(|_| {
                parse_err(
                    line,
                    format!("bad integer `{}` in column {}", field(k), CSV_HEADER[k]),
                )
            })
        };
        records.push(CsvRecord {
            label: field(0).to_string(),
            dim: int(1)? as usize,
            measure: field(2).parse()?,
            incoherent: num(3)?,
            global: num(4)?,
            gap: num(5)?,
            seed: int(6)?,
            ms: int(7)?,
        });
    }
    Ok(records)
}

/// Fixed-point rendering with `digits` significant digits.
pub fn format_sig(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn format_amplitudes(amps: &[Complex64]) -> String {
    amps.iter()
        .map(|z| format!("{},{}", format_sig(z.re, 12), format_sig(z.im, 12)))
        .collect::<Vec<_>>()
        .join(" ")
}

pub fn estimate_json(est: &PowerEstimate, seed: u64) -> serde_json::Value {
    let achiever: Vec<[f64; 2]> = est
        .achiever
        .amplitudes()
        .iter()
        .map(|z| [z.re, z.im])
        .collect();
    let d = &est.diagnostics;
    json!({
        "value": est.value,
        "measure": est.measure,
        "method": est.method,
        "achiever": achiever,
        "diagnostics": {
            "restarts": d.restarts,
            "iterations": d.iterations,
            "converged": d.converged,
            "best_restart": d.best_restart,
            "mixed_state_best": d.mixed_state_best,
        },
        "seed": seed,
    })
}

/// Linear-interpolation quantile of a non-empty sample.
pub fn quantile(values: &[f64], q: f64) -> f64 {
    assert!(!values.is_empty(), "quantile of an empty sample");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let pos = q.clamp(0.0, 1.0) * (v.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    v[lo] + (v[hi] - v[lo]) * (pos - lo as f64)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::rotation_x;
    use crate::optim::OptimizerConfig;
    use crate::power::{global_power, incoherent_l1_power};
    use proptest::prelude::*;

    fn record(label: String, a: f64, b: f64, seed: u64, ms: u64) -> CsvRecord {
        CsvRecord {
            label,
            dim: 3,
            measure: CoherenceMeasureId::RelEnt,
            incoherent: a,
            global: b,
            gap: b - a,
            seed,
            ms,
        }
    }

    #[test]
    fn report_row_gap() {
        let u = rotation_x(std::f64::consts::FRAC_PI_4);
        let inc = incoherent_l1_power(&u).unwrap();
        let glob = global_power(&u, CoherenceMeasureId::L1, &OptimizerConfig::default()).unwrap();
        let row = ReportRow::new("rx", &inc, &glob, 0, 1).unwrap();
        assert!((row.gap - (row.global - row.incoherent)).abs() <= 1e-12);
        assert_eq!(row.dim, 3);
        assert_eq!(row.restarts, 64);
    }

    #[test]
    fn csv_header_is_exact() {
        let mut buf = Vec::new();
        write_csv(&[], &mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf).unwrap(),
            "label,N,measure,incoherent,global,gap,seed,ms\n"
        );
    }

    #[test]
    fn read_csv_rejects_bad_input() {
        assert!(read_csv("a,b\n1,2\n".as_bytes()).is_err());
        let text = "label,N,measure,incoherent,global,gap,seed,ms\nx,3,l2,0,0,0,0,0\n";
        assert!(read_csv(text.as_bytes()).is_err());
    }

    #[test]
    fn significant_digit_formatting() {
        assert_eq!(format_sig(2.0, 12), "2.00000000000");
        assert_eq!(format_sig(0.0, 12), "0");
        assert_eq!(format_sig(0.080826875412395, 12), "0.0808268754124");
        assert_eq!(format_sig(-1234.5, 6), "-1234.50");
    }

    #[test]
    fn quantiles() {
        let v = [3.0, 1.0, 2.0, 4.0];
        assert_eq!(quantile(&v, 0.0), 1.0);
        assert_eq!(quantile(&v, 1.0), 4.0);
        assert_eq!(quantile(&v, 0.5), 2.5);
    }

    proptest! {
        #[test]
        fn csv_round_trip_is_byte_identical(
            rows in prop::collection::vec(
                ("[a-z0-9:,\" .]{0,12}", any::<f64>(), -1e3f64..1e3, any::<u64>(), any::<u64>()),
                0..6,
            )
        ) {
            let records: Vec<CsvRecord> = rows
                .into_iter()
                .filter(|r| r.1.is_finite())
                .map(|(l, a, b, s, ms)| record(l, a, b, s, ms))
                .collect();
            let mut first = Vec::new();
            write_csv(&records, &mut first).unwrap();
            let parsed = read_csv(first.as_slice()).unwrap();
            let mut second = Vec::new();
            write_csv(&parsed, &mut second).unwrap();
            prop_assert_eq!(first, second);
        }
    }
}
