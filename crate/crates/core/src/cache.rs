//! Line-oriented center cache.
//!
//! One record per line, fields separated by single spaces:
//!
//! ```text
//! # period real imag residual tags
//! 3 -1.75487766624669e0 0.00000000000000e0 2.22044604925031e-16 real_vein
//! 3 -1.22561166876654e-1 7.44861766619744e-1 1.11022302462516e-16 limb=1/3,wake_tested
//! ```
//!
//! Floats carry 15 significant digits in `{:.14e}` form. `tags` is a
//! comma-separated subset of `real_vein`, `limb=p/k`, `wake_tested`, or `-`
//! when empty. Lines starting with `#` and blank lines are ignored; any
//! other line that fails to parse is skipped with a warning.

use std::fs::{File, OpenOptions};
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::mandelbrot::{CenterRecord, CenterTags};

pub const HEADER: &str = "# period real imag residual tags";

fn tags_field(t: &CenterTags) -> String {
    let mut parts = Vec::new();
    if t.real_vein {
        parts.push("real_vein".to_string());
    }
    if let Some((p, k)) = t.limb {
        parts.push(format!("limb={p}/{k}"));
    }
    if t.wake_tested {
        parts.push("wake_tested".to_string());
    }
    if parts.is_empty() {
        "-".into()
    } else {
        parts.join(",")
    }
}

pub fn format_record(r: &CenterRecord) -> String {
    format!(
        "{} {:.14e} {:.14e} {:.14e} {}",
        r.period,
        r.value.re,
        r.value.im,
        r.residual_bound,
        tags_field(&r.tags)
    )
}

fn parse_tags(field: &str) -> Result<CenterTags> {
    let mut tags = CenterTags::default();
    if field == "-" {
        return Ok(tags);
    }
    for part in field.split(',') {
        match part {
            "real_vein" => tags.real_vein = true,
            "wake_tested" => tags.wake_tested = true,
            _ => {
                let limb = part.strip_prefix("limb=").and_then(|s| s.split_once('/'));
                match limb.map(|(p, k)| (p.parse(), k.parse())) {
                    Some((Ok(p), Ok(k))) => tags.limb = Some((p, k)),
                    _ => return invalid(format!("unknown tag {part:?}")),
                }
            }
        }
    }
    Ok(tags)
}

pub fn parse_record(line: &str) -> Result<CenterRecord> {
    let fields: Vec<&str> = line.split(' ').collect();
    if fields.len() != 5 {
        return invalid(format!("expected 5 fields, found {}", fields.len()));
    }
    let num = |s: &str| s.parse::<f64>().ok().filter(|x| x.is_finite());
    let (Ok(period), Some(re), Some(im), Some(residual_bound)) =
        (fields[0].parse::<u32>(), num(fields[1]), num(fields[2]), num(fields[3]))
    else {
        return invalid("malformed number");
    };
    if period == 0 || residual_bound < 0.0 {
        return invalid("period must be positive and the residual nonnegative");
    }
    Ok(CenterRecord { period, value: Complex64::new(re, im), residual_bound, tags: parse_tags(fields[4])? })
}

/// `r` as it reads back from the cache.
pub fn canonical(r: &CenterRecord) -> CenterRecord {
    parse_record(&format_record(r)).expect("formatted records parse")
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct CacheContents {
    pub records: Vec<CenterRecord>,
    /// One message per skipped line.
    pub warnings: Vec<String>,
}

pub fn parse_cache(text: &str) -> CacheContents {
    let mut out = CacheContents::default();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() || line.starts_with('#') {
            continue;
        }
        match parse_record(line) {
            Ok(r) => out.records.push(r),
            Err(e) => out.warnings.push(format!("line {}: skipped ({e})", i + 1)),
        }
    }
    out
}

pub fn read_cache(path: &Path) -> io::Result<CacheContents> {
    let mut text = String::new();
    for line in BufReader::new(File::open(path)?).lines() {
        text.push_str(&line?);
        text.push('\n');
    }
    Ok(parse_cache(&text))
}

/// Replaces the file with a header and `records`.
pub fn write_cache(path: &Path, records: &[CenterRecord]) -> io::Result<()> {
    let mut f = File::create(path)?;
    writeln!(f, "{HEADER}")?;
    for r in records {
        writeln!(f, "{}", format_record(r))?;
    }
    f.flush()
}

/// Appends `records`, writing the header first if the file is new.
pub fn append_records(path: &Path, records: &[CenterRecord]) -> io::Result<()> {
    let fresh = !path.exists() || std::fs::metadata(path)?.len() == 0;
    let mut f = OpenOptions::new().create(true).append(true).open(path)?;
    if fresh {
        writeln!(f, "{HEADER}")?;
    }
    for r in records {
        writeln!(f, "{}", format_record(r))?;
    }
    f.flush()
}

/// CSV with a header row; limb as `p/k` or empty.
pub fn to_csv(records: &[CenterRecord]) -> String {
    let mut out = String::from("period,real,imag,residual,real_vein,limb,wake_tested\n");
    for r in records {
        let limb = r.tags.limb.map(|(p, k)| format!("{p}/{k}")).unwrap_or_default();
        out.push_str(&format!(
            "{},{:.14e},{:.14e},{:.14e},{},{},{}\n",
            r.period, r.value.re, r.value.im, r.residual_bound, r.tags.real_vein, limb, r.tags.wake_tested
        ));
    }
    out
}
