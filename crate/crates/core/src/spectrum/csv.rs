//! Spectrum export and import as CSV.

use std::io::{BufRead, Write};

use super::{ConjugacyClassRecord, LengthSpectrum, Result, SpectrumError};

pub const HEADER: &str = "canonical_word,trace,length,primitive,orientation_partner";

/// `x` rounded to 12 significant digits.
pub fn significant(x: f64, digits: usize) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let magnitude = x.abs().log10().floor() as i64;
    let decimals = (digits as i64 - 1 - magnitude).max(0) as usize;
    format!("{x:.decimals$}")
}

pub fn write_csv<W: Write>(spec: &LengthSpectrum, mut out: W) -> Result<()> {
    writeln!(out, "{HEADER}")?;
    for r in &spec.records {
        writeln!(
            out,
            "{},{},{},{},{}",
            r.canonical_word,
            r.trace,
            significant(r.length, 12),
            r.primitive,
            r.orientation_partner
        )?;
    }
    Ok(())
}

pub fn to_csv_string(spec: &LengthSpectrum) -> String {
    let mut buf = Vec::new();
    write_csv(spec, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ascii output")
}

/// Read records back. The horizon defaults to the longest listed length.
pub fn read_csv<R: BufRead>(input: R, max_geodesic_length: Option<f64>) -> Result<LengthSpectrum> {
    let mut lines = input.lines();
    let header = lines.next().transpose()?.unwrap_or_default();
    if header.trim() != HEADER {
        return Err(SpectrumError::Csv { line: 1, reason: format!("expected header {HEADER:?}") });
    }
    let mut records = Vec::new();
    for (k, line) in lines.enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let err = |reason: String| SpectrumError::Csv { line: k + 2, reason };
        let fields: Vec<&str> = line.trim().split(',').collect();
        if fields.len() != 5 {
            return Err(err(format!("expected 5 fields, found {}", fields.len())));
        }
        let trace: f64 = fields[1].parse().map_err(|e| err(format!("trace: {e}")))?;
        let length: f64 = fields[2].parse().map_err(|e| err(format!("length: {e}")))?;
        let primitive: bool = fields[3].parse().map_err(|e| err(format!("primitive: {e}")))?;
        if !(length > 0.0) {
            return Err(err("length must be positive".into()));
        }
        records.push(ConjugacyClassRecord {
            canonical_word: fields[0].to_string(),
            trace,
            length,
            primitive,
            power: 1,
            power_of: None,
            orientation_partner: fields[4].to_string(),
        });
    }
    super::sort_records(&mut records);
    let longest = records.last().map_or(0.0, |r| r.length);
    Ok(LengthSpectrum {
        max_word_length: records.iter().map(|r| r.canonical_word.chars().count()).max().unwrap_or(0),
        max_geodesic_length: max_geodesic_length.unwrap_or(longest),
        dedup_tolerance: 1e-9,
        records,
        diagnostics: Default::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectrum::{bolza_generators, enumerate_classes};

    #[test]
    fn significant_digits() {
        assert_eq!(significant(3.0571422013185, 12), "3.05714220132");
        assert_eq!(significant(12.25, 12), "12.2500000000");
        assert_eq!(significant(0.001234, 3), "0.00123");
    }

    #[test]
    fn round_trip() {
        let spec = enumerate_classes(&bolza_generators(), 3, 6.0).unwrap();
        let text = to_csv_string(&spec);
        assert!(text.starts_with(HEADER));
        let back = read_csv(text.as_bytes(), Some(6.0)).unwrap();
        assert_eq!(back.len(), spec.len());
        for a in &spec.records {
            let b = back.records.iter().find(|b| b.canonical_word == a.canonical_word).unwrap();
            assert_eq!(a.trace, b.trace);
            assert!((a.length - b.length).abs() < 1e-10);
            assert_eq!(a.primitive, b.primitive);
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert!(read_csv("nope\n".as_bytes(), None).is_err());
        let bad = format!("{HEADER}\na,4.8,x,true,A\n");
        assert!(matches!(read_csv(bad.as_bytes(), None), Err(SpectrumError::Csv { line: 2, .. })));
    }
}
