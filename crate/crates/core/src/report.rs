//! CSV reports: `records.csv`, `informativeness.csv`, `variability.csv`.
//!
//! Floats are written with six significant digits in C `%g` style, empty
//! cells mark undefined values, and rows are sorted by their key columns.

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::metrics::{Metric, Summary};
use crate::network::Strategy;

pub const RECORDS_FILE: &str = "records.csv";
pub const INFORMATIVENESS_FILE: &str = "informativeness.csv";
pub const VARIABILITY_FILE: &str = "variability.csv";

pub const RECORDS_HEADER: [&str; 17] = [
    "text_id", "dataset_tag", "language", "size", "stopwords", "strategy", "P", "metric", "summary",
    "x_raw", "mu_r", "sigma_r", "x_norm", "eps", "d", "informative", "flags",
];
pub const INFORMATIVENESS_HEADER: [&str; 10] = [
    "size", "stopwords", "strategy", "P", "metric", "summary", "I", "n_t", "n_informative", "n_undefined",
];
pub const VARIABILITY_HEADER: [&str; 10] = [
    "size", "stopwords", "strategy", "P", "metric", "summary", "v_syntax", "v_semantics", "v_ratio",
    "syntax_dominant",
];

/// Formats like C's `%.6g`: six significant digits, trailing zeros removed,
/// scientific notation for exponents below -4 or above 5.
pub fn fmt_sig6(x: f64) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x > 0.0 { "inf".into() } else { "-inf".into() };
    }
    if x == 0.0 {
        return "0".into();
    }
    let sci = format!("{x:.5e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent in {:e} output");
    let exp: i32 = exp.parse().expect("integer exponent");
    if (-4..6).contains(&exp) {
        let decimals = (5 - exp) as usize;
        strip_zeros(&format!("{x:.decimals$}"))
    } else {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", strip_zeros(mantissa), exp.abs())
    }
}

fn strip_zeros(s: &str) -> String {
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s.to_string()
    }
}

fn fmt_opt(x: Option<f64>) -> String {
    x.map(fmt_sig6).unwrap_or_default()
}

fn fmt_bool(b: Option<bool>) -> String {
    b.map(|b| b.to_string()).unwrap_or_default()
}

fn parse_opt_f64(s: &str, column: &str) -> std::result::Result<Option<f64>, String> {
    match s {
        "" => Ok(None),
        "inf" => Ok(Some(f64::INFINITY)),
        "-inf" => Ok(Some(f64::NEG_INFINITY)),
        "nan" => Ok(Some(f64::NAN)),
        _ => s
            .parse::<f64>()
            .map(Some)
            .map_err(|e| format!("column {column}: {e}")),
    }
}

fn parse_f64(s: &str, column: &str) -> std::result::Result<f64, String> {
    parse_opt_f64(s, column)?.ok_or_else(|| format!("column {column}: empty"))
}

fn parse_opt_bool(s: &str, column: &str) -> std::result::Result<Option<bool>, String> {
    match s {
        "" => Ok(None),
        "true" => Ok(Some(true)),
        "false" => Ok(Some(false)),
        other => Err(format!("column {column}: expected true/false, got {other:?}")),
    }
}

fn parse_usize(s: &str, column: &str) -> std::result::Result<usize, String> {
    s.parse().map_err(|e| format!("column {column}: {e}"))
}

/// Whether stopwords were kept or filtered out before building networks.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum StopwordSetting {
    Keep,
    Filter,
}

impl StopwordSetting {
    pub fn as_str(self) -> &'static str {
        match self {
            StopwordSetting::Keep => "keep",
            StopwordSetting::Filter => "filter",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "keep" => Some(StopwordSetting::Keep),
            "filter" => Some(StopwordSetting::Filter),
            _ => None,
        }
    }

    pub fn filters(self) -> bool {
        self == StopwordSetting::Filter
    }
}

/// Identifies one configuration cell, independent of the text.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellKey {
    pub size: usize,
    pub stopwords: StopwordSetting,
    pub strategy: Strategy,
    pub fraction: f64,
    pub metric: Metric,
    pub summary: Summary,
}

impl CellKey {
    fn sort_key(&self) -> (usize, StopwordSetting, Strategy, u64, Metric, Summary) {
        (
            self.size,
            self.stopwords,
            self.strategy,
            ordered_bits(self.fraction),
            self.metric,
            self.summary,
        )
    }

    fn fields(&self) -> [String; 6] {
        [
            self.size.to_string(),
            self.stopwords.as_str().to_string(),
            self.strategy.as_str().to_string(),
            fmt_sig6(self.fraction),
            self.metric.as_str().to_string(),
            self.summary.as_str().to_string(),
        ]
    }

    fn parse(fields: &[&str]) -> std::result::Result<Self, String> {
        Ok(Self {
            size: parse_usize(fields[0], "size")?,
            stopwords: StopwordSetting::parse(fields[1]).ok_or_else(|| format!("column stopwords: {:?}", fields[1]))?,
            strategy: Strategy::parse(fields[2]).ok_or_else(|| format!("column strategy: {:?}", fields[2]))?,
            fraction: parse_f64(fields[3], "P")?,
            metric: Metric::parse(fields[4]).ok_or_else(|| format!("column metric: {:?}", fields[4]))?,
            summary: Summary::parse(fields[5]).ok_or_else(|| format!("column summary: {:?}", fields[5]))?,
        })
    }
}

/// Total order on non-negative fractions.
fn ordered_bits(x: f64) -> u64 {
    let bits = x.to_bits();
    if bits >> 63 == 1 {
        !bits
    } else {
        bits | (1 << 63)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RecordRow {
    pub text_id: String,
    pub dataset_tag: String,
    pub language: String,
    pub cell: CellKey,
    pub x_raw: Option<f64>,
    pub mu_r: Option<f64>,
    pub sigma_r: Option<f64>,
    pub x_norm: Option<f64>,
    pub eps: Option<f64>,
    pub d: Option<f64>,
    pub informative: Option<bool>,
    /// `;`-separated flags.
    pub flags: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InformativenessRow {
    pub cell: CellKey,
    pub percent: Option<f64>,
    pub n_t: usize,
    pub n_informative: usize,
    pub n_undefined: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariabilityRow {
    pub cell: CellKey,
    pub v_syntax: Option<f64>,
    pub v_semantics: Option<f64>,
    pub v_ratio: Option<f64>,
    pub syntax_dominant: Option<bool>,
}

pub fn sort_records(rows: &mut [RecordRow]) {
    rows.sort_by(|a, b| {
        a.text_id
            .cmp(&b.text_id)
            .then_with(|| a.cell.sort_key().cmp(&b.cell.sort_key()))
    });
}

pub fn sort_informativeness(rows: &mut [InformativenessRow]) {
    rows.sort_by_key(|r| r.cell.sort_key());
}

pub fn sort_variability(rows: &mut [VariabilityRow]) {
    rows.sort_by_key(|r| r.cell.sort_key());
}

fn write_csv(path: &Path, header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> Result<()> {
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(header).map_err(csv_err)?;
    for row in rows {
        w.write_record(&row).map_err(csv_err)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| Error::io(path, std::io::Error::other(e.to_string())))?;
    fs::write(path, bytes).map_err(|e| Error::io(path, e))
}

fn record_fields(r: &RecordRow) -> Vec<String> {
    let mut out = vec![r.text_id.clone(), r.dataset_tag.clone(), r.language.clone()];
    out.extend(r.cell.fields());
    out.extend([
        fmt_opt(r.x_raw),
        fmt_opt(r.mu_r),
        fmt_opt(r.sigma_r),
        fmt_opt(r.x_norm),
        fmt_opt(r.eps),
        fmt_opt(r.d),
        fmt_bool(r.informative),
        r.flags.clone(),
    ]);
    out
}

/// Writes the three report files into `outdir`, sorting rows first.
pub fn report_csv(
    records: &[RecordRow],
    informativeness: &[InformativenessRow],
    variability: &[VariabilityRow],
    outdir: impl AsRef<Path>,
) -> Result<()> {
    let outdir = outdir.as_ref();
    fs::create_dir_all(outdir).map_err(|e| Error::io(outdir, e))?;
    write_records(&outdir.join(RECORDS_FILE), records)?;
    write_informativeness(&outdir.join(INFORMATIVENESS_FILE), informativeness)?;
    write_variability(&outdir.join(VARIABILITY_FILE), variability)
}

pub fn write_records(path: &Path, rows: &[RecordRow]) -> Result<()> {
    let mut rows = rows.to_vec();
    sort_records(&mut rows);
    write_csv(path, &RECORDS_HEADER, rows.iter().map(record_fields))
}

pub fn write_informativeness(path: &Path, rows: &[InformativenessRow]) -> Result<()> {
    let mut rows = rows.to_vec();
    sort_informativeness(&mut rows);
    write_csv(
        path,
        &INFORMATIVENESS_HEADER,
        rows.iter().map(|r| {
            let mut f: Vec<String> = r.cell.fields().into();
            f.extend([
                fmt_opt(r.percent),
                r.n_t.to_string(),
                r.n_informative.to_string(),
                r.n_undefined.to_string(),
            ]);
            f
        }),
    )
}

pub fn write_variability(path: &Path, rows: &[VariabilityRow]) -> Result<()> {
    let mut rows = rows.to_vec();
    sort_variability(&mut rows);
    write_csv(
        path,
        &VARIABILITY_HEADER,
        rows.iter().map(|r| {
            let mut f: Vec<String> = r.cell.fields().into();
            f.extend([
                fmt_opt(r.v_syntax),
                fmt_opt(r.v_semantics),
                fmt_opt(r.v_ratio),
                fmt_bool(r.syntax_dominant),
            ]);
            f
        }),
    )
}

fn read_csv<T>(
    path: &Path,
    header: &[&str],
    parse: impl Fn(&[&str]) -> std::result::Result<T, String>,
) -> Result<Vec<T>> {
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(bytes.as_slice());
    let csv_err = |source| Error::Csv {
        path: path.to_path_buf(),
        source,
    };
    let found = r.headers().map_err(csv_err)?.clone();
    if found.iter().ne(header.iter().copied()) {
        return Err(Error::Config(format!(
            "{}: unexpected header {:?}",
            path.display(),
            found.iter().collect::<Vec<_>>()
        )));
    }
    let mut out = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(csv_err)?;
        let line = rec.position().map(|p| p.line()).unwrap_or(0);
        let fields: Vec<&str> = rec.iter().collect();
        out.push(parse(&fields).map_err(|reason| {
            Error::Config(format!("{}:{line}: {reason}", path.display()))
        })?);
    }
    Ok(out)
}

pub fn read_records(path: impl AsRef<Path>) -> Result<Vec<RecordRow>> {
    read_csv(path.as_ref(), &RECORDS_HEADER, |f| {
        Ok(RecordRow {
            text_id: f[0].to_string(),
            dataset_tag: f[1].to_string(),
            language: f[2].to_string(),
            cell: CellKey::parse(&f[3..9])?,
            x_raw: parse_opt_f64(f[9], "x_raw")?,
            mu_r: parse_opt_f64(f[10], "mu_r")?,
            sigma_r: parse_opt_f64(f[11], "sigma_r")?,
            x_norm: parse_opt_f64(f[12], "x_norm")?,
            eps: parse_opt_f64(f[13], "eps")?,
            d: parse_opt_f64(f[14], "d")?,
            informative: parse_opt_bool(f[15], "informative")?,
            flags: f[16].to_string(),
        })
    })
}

pub fn read_informativeness(path: impl AsRef<Path>) -> Result<Vec<InformativenessRow>> {
    read_csv(path.as_ref(), &INFORMATIVENESS_HEADER, |f| {
        Ok(InformativenessRow {
            cell: CellKey::parse(&f[0..6])?,
            percent: parse_opt_f64(f[6], "I")?,
            n_t: parse_usize(f[7], "n_t")?,
            n_informative: parse_usize(f[8], "n_informative")?,
            n_undefined: parse_usize(f[9], "n_undefined")?,
        })
    })
}

pub fn read_variability(path: impl AsRef<Path>) -> Result<Vec<VariabilityRow>> {
    read_csv(path.as_ref(), &VARIABILITY_HEADER, |f| {
        Ok(VariabilityRow {
            cell: CellKey::parse(&f[0..6])?,
            v_syntax: parse_opt_f64(f[6], "v_syntax")?,
            v_semantics: parse_opt_f64(f[7], "v_semantics")?,
            v_ratio: parse_opt_f64(f[8], "v_ratio")?,
            syntax_dominant: parse_opt_bool(f[9], "syntax_dominant")?,
        })
    })
}
