//! CSV emission and parsing. All output is locale independent (dot
//! decimals, `\n` line endings, no trailing whitespace) and fully
//! deterministic, so reruns of the same configuration are byte identical.
//! The parser side is total: arbitrary input yields data or a typed error,
//! never a panic.

use crate::error::CsvError;

/// Shortest round-trip representation; `f64::from_str` recovers the bits.
pub fn fmt_f64(v: f64) -> String {
    if v == v.trunc() && v.abs() < 1e15 && v != 0.0 {
        // Keep integral values readable but unambiguous.
        format!("{v:.1}")
    } else {
        format!("{v}")
    }
}

/// Exponent form used where magnitudes span many decades.
pub fn fmt_exp(v: f64) -> String {
    format!("{v:e}")
}

/// Columnar solution output: `x` first, one column per conserved
/// component. Also the on-disk format of cached reference solutions.
pub fn solution_to_csv(x: &[f64], names: &[String], columns: &[Vec<f64>]) -> String {
    let mut out = String::new();
    out.push('x');
    for n in names {
        out.push(',');
        out.push_str(n);
    }
    out.push('\n');
    for (i, xv) in x.iter().enumerate() {
        out.push_str(&fmt_f64(*xv));
        for col in columns {
            out.push(',');
            out.push_str(&fmt_f64(col[i]));
        }
        out.push('\n');
    }
    out
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolutionCsv {
    /// Column names excluding the leading `x`.
    pub names: Vec<String>,
    pub x: Vec<f64>,
    /// One vector per named column.
    pub columns: Vec<Vec<f64>>,
}

/// Parse the columnar solution format back. Used for the reference cache
/// and exercised by the fuzz targets: must never panic on any input.
pub fn parse_solution_csv(text: &str) -> Result<SolutionCsv, CsvError> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines.next().ok_or(CsvError::Empty)?;
    let mut fields = header.split(',');
    if fields.next() != Some("x") {
        return Err(CsvError::BadHeader);
    }
    let names: Vec<String> = fields.map(|s| s.to_string()).collect();
    if names.is_empty() || names.iter().any(|n| n.is_empty()) {
        return Err(CsvError::BadHeader);
    }
    let width = names.len() + 1;
    let mut x = Vec::new();
    let mut columns = vec![Vec::new(); names.len()];
    for (lineno, line) in lines {
        if line.is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        if parts.len() != width {
            return Err(CsvError::FieldCount {
                line: lineno + 1,
                expected: width,
                got: parts.len(),
            });
        }
        for (slot, raw) in std::iter::once(&mut x)
            .chain(columns.iter_mut())
            .zip(parts.iter())
        {
            let v: f64 = raw.trim().parse().map_err(|_| CsvError::BadNumber {
                line: lineno + 1,
                field: raw.to_string(),
            })?;
            if !v.is_finite() {
                return Err(CsvError::BadNumber {
                    line: lineno + 1,
                    field: raw.to_string(),
                });
            }
            slot.push(v);
        }
    }
    Ok(SolutionCsv { names, x, columns })
}

/// Per-step diagnostics: step index, time, step size, and flagged-cell
/// counts per detector.
pub fn diagnostics_to_csv(diags: &[crate::harness::StepDiag]) -> String {
    let mut out = String::from("step,t,dt,cells_flagged_cad,cells_flagged_pad,cells_flagged_nad\n");
    for d in diags {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            d.step,
            fmt_f64(d.t),
            fmt_f64(d.dt),
            d.cad,
            d.pad,
            d.nad
        ));
    }
    out
}

pub fn timing_to_csv(seconds: &[f64]) -> String {
    let mut out = String::from("repeat,seconds\n");
    for (i, s) in seconds.iter().enumerate() {
        out.push_str(&format!("{},{}\n", i + 1, fmt_f64(*s)));
    }
    out
}

pub fn convergence_to_csv(table: &crate::harness::EocTable) -> String {
    let mut out = String::from("scheme,eps,N,l1_error,eoc\n");
    for row in &table.rows {
        out.push_str(&row.scheme);
        out.push(',');
        out.push_str(&fmt_exp(row.eps));
        out.push(',');
        out.push_str(&row.n_cells.to_string());
        out.push(',');
        out.push_str(&fmt_exp(row.l1));
        out.push(',');
        if let Some(e) = row.eoc {
            out.push_str(&fmt_f64(e));
        }
        out.push('\n');
    }
    out
}

pub fn stability_to_csv(regions: &[crate::stability::StabilityRegion]) -> String {
    let mut out = String::from("a,eps,mu_max,scheme\n");
    for region in regions {
        for p in &region.points {
            out.push_str(&format!(
                "{},{},{},{}\n",
                fmt_f64(p.a),
                fmt_exp(region.eps),
                fmt_f64(p.mu_max),
                region.scheme.label()
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solution_roundtrip() {
        let x = vec![0.25, 0.75];
        let names = vec!["u".to_string(), "v".to_string()];
        let cols = vec![vec![1.0, 2.0], vec![0.5, -0.125]];
        let text = solution_to_csv(&x, &names, &cols);
        assert!(text.ends_with('\n'));
        assert!(!text.contains(' '));
        let parsed = parse_solution_csv(&text).unwrap();
        assert_eq!(parsed.names, names);
        assert_eq!(parsed.x, x);
        assert_eq!(parsed.columns, cols);
    }

    #[test]
    fn parser_rejects_malformed_input() {
        assert_eq!(parse_solution_csv(""), Err(CsvError::Empty));
        assert_eq!(parse_solution_csv("t,u\n"), Err(CsvError::BadHeader));
        assert_eq!(parse_solution_csv("x\n"), Err(CsvError::BadHeader));
        assert!(matches!(
            parse_solution_csv("x,u\n1.0\n"),
            Err(CsvError::FieldCount { line: 2, .. })
        ));
        assert!(matches!(
            parse_solution_csv("x,u\n1.0,zebra\n"),
            Err(CsvError::BadNumber { .. })
        ));
        assert!(matches!(
            parse_solution_csv("x,u\n1.0,inf\n"),
            Err(CsvError::BadNumber { .. })
        ));
    }

    #[test]
    fn float_formats_roundtrip_exactly() {
        for v in [
            0.1,
            -3.5e-13,
            1.0 / 3.0,
            6.02e23,
            0.0,
            -0.0,
            f64::MIN_POSITIVE,
        ] {
            let parsed: f64 = fmt_f64(v).parse().unwrap();
            assert_eq!(parsed.to_bits(), v.to_bits(), "value {v}");
            let parsed_exp: f64 = fmt_exp(v).parse().unwrap();
            assert_eq!(parsed_exp.to_bits(), v.to_bits(), "value {v}");
        }
    }

    #[test]
    fn eps_column_format() {
        assert_eq!(fmt_exp(1.0), "1e0");
        assert_eq!(fmt_exp(1e-8), "1e-8");
        assert_eq!(fmt_exp(0.02), "2e-2");
    }
}
