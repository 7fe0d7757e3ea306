//! Daily CSV and manifest reading and writing.
//!
//! Daily files are strict `year,day,value` tables on the 365-day no-leap
//! calendar: days 1..365 in order, every year complete, years
//! consecutive. Manifests are JSON arrays of cell records whose `path`
//! fields are resolved relative to the manifest file.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use gevkit::blocks::{DailySeries, Variable, DAYS_PER_YEAR};
use serde::{Deserialize, Serialize};

use crate::report;

pub fn parse_variable(s: &str) -> Result<Variable> {
    match s {
        "tmax" => Ok(Variable::Tmax),
        "tmin" => Ok(Variable::Tmin),
        other => bail!("unknown variable {other:?}, expected tmax or tmin"),
    }
}

pub fn variable_name(v: Variable) -> &'static str {
    match v {
        Variable::Tmax => "tmax",
        Variable::Tmin => "tmin",
    }
}

/// One cell of a manifest: where its daily CSV lives and what it holds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub cell_id: String,
    pub latitude: f64,
    pub longitude: f64,
    pub variable: String,
    /// Daily CSV path, relative to the manifest file.
    pub path: String,
}

pub fn read_manifest(path: &Path) -> Result<Vec<ManifestEntry>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let entries: Vec<ManifestEntry> = serde_json::from_str(&text)
        .with_context(|| format!("parsing manifest {}", path.display()))?;
    if entries.is_empty() {
        bail!("manifest {} lists no cells", path.display());
    }
    let mut ids: Vec<&str> = entries.iter().map(|e| e.cell_id.as_str()).collect();
    ids.sort_unstable();
    if let Some(pair) = ids.windows(2).find(|w| w[0] == w[1]) {
        bail!("manifest {} repeats cell {:?}", path.display(), pair[0]);
    }
    Ok(entries)
}

pub fn write_manifest(path: &Path, entries: &[ManifestEntry]) -> Result<()> {
    let json = serde_json::to_string_pretty(entries)?;
    report::write_atomic(path, format!("{json}\n").as_bytes())
}

/// Resolve a manifest-relative data path.
pub fn resolve(manifest: &Path, entry_path: &str) -> PathBuf {
    let p = Path::new(entry_path);
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        manifest.parent().unwrap_or_else(|| Path::new(".")).join(p)
    }
}

pub fn ingest_entry(manifest: &Path, entry: &ManifestEntry) -> Result<DailySeries<f64>> {
    let variable = parse_variable(&entry.variable)?;
    read_daily_csv(
        &resolve(manifest, &entry.path),
        &entry.cell_id,
        entry.latitude,
        entry.longitude,
        variable,
    )
}

/// Single-file convenience: cell id from the file stem, neutral metadata.
pub fn ingest_file(path: &Path) -> Result<DailySeries<f64>> {
    let stem = path
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("cell")
        .to_string();
    read_daily_csv(path, &stem, 0.0, 0.0, Variable::Tmax)
}

pub fn read_daily_csv(
    path: &Path,
    cell_id: &str,
    latitude: f64,
    longitude: f64,
    variable: Variable,
) -> Result<DailySeries<f64>> {
    let file = fs::File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(file);
    {
        let headers = reader
            .headers()
            .with_context(|| format!("reading header of {}", path.display()))?;
        let got: Vec<&str> = headers.iter().collect();
        if got != ["year", "day", "value"] {
            bail!(
                "{}: header must be year,day,value, found {:?}",
                path.display(),
                got.join(",")
            );
        }
    }

    let mut values = Vec::new();
    let mut started = false;
    let mut expect_year = 0i32;
    let mut expect_day = 1u32;
    for record in reader.records() {
        let record = record.with_context(|| format!("reading {}", path.display()))?;
        let line = record.position().map_or(0, |p| p.line());
        let fail = |msg: String| anyhow!("{} line {line}: {msg}", path.display());
        if record.len() != 3 {
            return Err(fail(format!("expected 3 fields, found {}", record.len())));
        }
        let year: i32 = record[0]
            .parse()
            .map_err(|_| fail(format!("bad year {:?}", &record[0])))?;
        let day: u32 = record[1]
            .parse()
            .map_err(|_| fail(format!("bad day {:?}", &record[1])))?;
        let value: f64 = record[2]
            .parse()
            .map_err(|_| fail(format!("bad value {:?}", &record[2])))?;
        if !(1..=DAYS_PER_YEAR as u32).contains(&day) {
            return Err(fail(format!("day {day} outside 1..365 (no leap days)")));
        }
        if !value.is_finite() {
            return Err(fail(format!("value {} is not finite", &record[2])));
        }
        if !started {
            started = true;
            expect_year = year;
        }
        if year != expect_year || day != expect_day {
            return Err(fail(format!(
                "expected year {expect_year} day {expect_day}, found year {year} day {day}"
            )));
        }
        values.push(value);
        if expect_day == DAYS_PER_YEAR as u32 {
            expect_day = 1;
            expect_year += 1;
        } else {
            expect_day += 1;
        }
    }
    if !started {
        bail!("{}: no data rows", path.display());
    }
    if expect_day != 1 {
        bail!(
            "{}: year {expect_year} is incomplete ({} of {DAYS_PER_YEAR} days)",
            path.display(),
            expect_day - 1
        );
    }
    let start_year = expect_year - (values.len() / DAYS_PER_YEAR) as i32;
    Ok(DailySeries::new(cell_id, latitude, longitude, start_year, variable, values)?)
}

pub fn write_daily_csv(path: &Path, series: &DailySeries<f64>) -> Result<()> {
    let mut out = String::with_capacity(series.values.len() * 30 + 16);
    out.push_str("year,day,value\n");
    for (i, v) in series.values.iter().enumerate() {
        let year = series.start_year + (i / DAYS_PER_YEAR) as i32;
        let day = i % DAYS_PER_YEAR + 1;
        out.push_str(&format!("{year},{day},{}\n", report::fmt_float(*v)));
    }
    report::write_atomic(path, out.as_bytes())
}
