//! Rendering of series, reports and candidates as JSON, CSV or plain text.

use anyhow::Result;
use serde::Serialize;

use qpd_core::identities::IdentityReport;
use qpd_core::verify::{Candidate, ClaimStatus, VerificationReport};
use qpd_core::TruncatedSeries;

use crate::config::Format;

/// Version of the JSON record layout.
pub const SCHEMA_VERSION: u32 = 1;

const CONJECTURAL_NOTE: &str = "conjectural, not proven";

#[derive(Serialize)]
struct Versioned<'a, T: Serialize> {
    schema_version: u32,
    #[serde(flatten)]
    body: &'a T,
    #[serde(skip_serializing_if = "Option::is_none")]
    note: Option<&'static str>,
}

fn versioned<'a, T: Serialize>(body: &'a T, note: Option<&'static str>) -> Versioned<'a, T> {
    Versioned {
        schema_version: SCHEMA_VERSION,
        body,
        note,
    }
}

fn json_lines<T: Serialize>(value: &T) -> Result<String> {
    let mut s = serde_json::to_string_pretty(value)?;
    s.push('\n');
    Ok(s)
}

fn csv_text<R: Serialize>(rows: impl IntoIterator<Item = R>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

#[derive(Serialize)]
struct SeriesJson<'a> {
    expression: &'a str,
    precision: usize,
    modulus: Option<u64>,
    coefficients: Vec<String>,
}

pub fn series(s: &TruncatedSeries, expression: &str, format: Format) -> Result<String> {
    let coeffs = s.coeffs();
    match format {
        Format::Plain => Ok(coeffs
            .iter()
            .enumerate()
            .map(|(n, c)| format!("{n},{c}\n"))
            .collect()),
        Format::Csv => {
            #[derive(Serialize)]
            struct Row {
                n: usize,
                c: String,
            }
            csv_text(coeffs.iter().enumerate().map(|(n, c)| Row {
                n,
                c: c.to_string(),
            }))
        }
        Format::Json => json_lines(&versioned(
            &SeriesJson {
                expression,
                precision: s.precision(),
                modulus: s.modulus(),
                coefficients: coeffs.iter().map(|c| c.to_string()).collect(),
            },
            None,
        )),
    }
}

fn params_text(params: &[(String, i64)]) -> String {
    params
        .iter()
        .map(|(k, v)| format!("{k}={v}"))
        .collect::<Vec<_>>()
        .join(" ")
}

fn progression(family: &str, step: u64, residue: u64) -> String {
    match (step, residue) {
        (1, 0) => format!("{family}(n)"),
        (1, r) => format!("{family}(n+{r})"),
        (a, 0) => format!("{family}({a}n)"),
        (a, r) => format!("{family}({a}n+{r})"),
    }
}

fn report_note(r: &VerificationReport) -> Option<&'static str> {
    (r.status == ClaimStatus::Conjectural).then_some(CONJECTURAL_NOTE)
}

#[derive(Serialize)]
struct ReportRow<'a> {
    claim_id: &'a str,
    status: String,
    verdict: String,
    params: String,
    family: &'a str,
    step: u64,
    residue: u64,
    modulus: u64,
    predicate: &'a str,
    argument_max: u64,
    n_first: Option<u64>,
    n_last: Option<u64>,
    support: u64,
    failure_count: u64,
    first_failure: Option<u64>,
}

pub fn reports(reports: &[VerificationReport], format: Format) -> Result<String> {
    match format {
        Format::Json => json_lines(
            &reports
                .iter()
                .map(|r| versioned(r, report_note(r)))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => csv_text(reports.iter().map(|r| ReportRow {
            claim_id: &r.claim_id,
            status: r.status.to_string(),
            verdict: r.verdict.to_string(),
            params: params_text(&r.params),
            family: &r.family,
            step: r.step,
            residue: r.residue,
            modulus: r.modulus,
            predicate: &r.predicate,
            argument_max: r.argument_max,
            n_first: r.n_first,
            n_last: r.n_last,
            support: r.support,
            failure_count: r.failure_count,
            first_failure: r.first_failure().map(|f| f.argument),
        })),
        Format::Plain => Ok(reports.iter().map(|r| plain_report(r) + "\n").collect()),
    }
}

fn plain_report(r: &VerificationReport) -> String {
    let mut line = r.claim_id.clone();
    if !r.params.is_empty() {
        line += &format!(" [{}]", params_text(&r.params));
    }
    let predicate = match r.predicate.as_str() {
        "zero" => "0",
        other => other,
    };
    line += &format!(
        " {} ≡ {} (mod {}): {} up to {}, support {}",
        progression(&r.family, r.step, r.residue),
        predicate,
        r.modulus,
        r.verdict,
        r.argument_max,
        r.support
    );
    if let Some(f) = r.first_failure() {
        line += &format!(
            ", first failure at argument {} (expected {}, got {})",
            f.argument, f.expected, f.actual
        );
    }
    if let Some(note) = report_note(r) {
        line += &format!(" ({note})");
    }
    line
}

pub fn candidates(cands: &[Candidate], format: Format) -> Result<String> {
    match format {
        Format::Csv => csv_text(cands),
        Format::Json => json_lines(&cands.iter().map(|c| versioned(c, None)).collect::<Vec<_>>()),
        Format::Plain => Ok(cands
            .iter()
            .map(|c| {
                let mut line = format!(
                    "{} ≡ 0 (mod {}) support {} {}",
                    progression(&format!("PD_{}", c.k), c.step, c.r),
                    c.m,
                    c.support,
                    c.status
                );
                if c.n_min > 0 {
                    line += &format!(" n >= {}", c.n_min);
                }
                if let Some(id) = &c.registry_id {
                    line += &format!(" {id}");
                }
                line + "\n"
            })
            .collect()),
    }
}

#[derive(Serialize)]
struct IdentityRow<'a> {
    id: &'a str,
    status: String,
    modulus: Option<u64>,
    precision: usize,
    passed: bool,
    mismatch_exponent: Option<usize>,
}

pub fn identities(reports: &[IdentityReport], format: Format) -> Result<String> {
    match format {
        Format::Json => json_lines(
            &reports
                .iter()
                .map(|r| versioned(r, None))
                .collect::<Vec<_>>(),
        ),
        Format::Csv => csv_text(reports.iter().map(|r| IdentityRow {
            id: &r.id,
            status: r.status.to_string(),
            modulus: r.modulus,
            precision: r.precision,
            passed: r.passed,
            mismatch_exponent: r.mismatch.as_ref().map(|m| m.exponent),
        })),
        Format::Plain => Ok(reports
            .iter()
            .map(|r| {
                let ring = r
                    .modulus
                    .map_or("exact".to_string(), |m| format!("mod {m}"));
                let outcome = match &r.mismatch {
                    None => "holds".to_string(),
                    Some(m) => format!("fails at q^{}: {} vs {}", m.exponent, m.lhs, m.rhs),
                };
                format!(
                    "{} ({}, {ring}, N = {}): {outcome}\n",
                    r.id, r.status, r.precision
                )
            })
            .collect()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn progression_text() {
        assert_eq!(progression("PD", 1, 0), "PD(n)");
        assert_eq!(progression("PD_2", 1, 3), "PD_2(n+3)");
        assert_eq!(progression("PD_3", 2, 0), "PD_3(2n)");
        assert_eq!(progression("PD_4", 32, 5), "PD_4(32n+5)");
    }

    #[test]
    fn csv_quotes_fields_with_commas() {
        #[derive(Serialize)]
        struct Row {
            a: &'static str,
        }
        assert_eq!(csv_text([Row { a: "x, y" }]).unwrap(), "a\n\"x, y\"\n");
    }
}
