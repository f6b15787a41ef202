use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};

use qsdc_core::analysis::DetectionReport;
use qsdc_core::protocol::Role;

use crate::config::Format;
use crate::run::Report;

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

const DETECTION_HEADER: [&str; 7] = ["strategy", "predicate", "p", "claimed", "abs_delta", "p_algebraic", "p_mc"];

fn detection_row(r: &DetectionReport) -> Vec<String> {
    vec![
        r.strategy.to_string(),
        r.predicate.to_string(),
        opt(r.p()),
        opt(r.published_claim.as_ref().map(|c| c.value)),
        opt(r.abs_delta),
        r.p_algebraic.to_string(),
        opt(r.p_mc),
    ]
}

fn table(report: &Report) -> (Vec<&'static str>, Vec<Vec<String>>) {
    match report {
        Report::Session(s) => {
            let header = vec!["group", "role", "op", "alice", "bob", "passed", "decoded"];
            let mut rows = Vec::new();
            for g in &s.transcript.groups {
                let check = s.transcript.checking.iter().find(|r| r.group_index == g.index);
                let enc = s.transcript.encoding.iter().position(|r| r.group_index == g.index);
                let row = match (g.role, check, enc) {
                    (Role::Checking, Some(c), _) => vec![
                        g.index.to_string(),
                        "checking".into(),
                        c.op.to_string(),
                        c.alice_outcome.to_string(),
                        c.bob_outcome.to_string(),
                        c.passed.to_string(),
                        String::new(),
                    ],
                    (Role::EncodingDecoding, _, Some(i)) => {
                        let r = &s.transcript.encoding[i];
                        let decoded = s.transcript.decoded_bits.ops().get(i).map(|op| op.to_string()).unwrap_or_default();
                        vec![
                            g.index.to_string(),
                            "encoding".into(),
                            String::new(),
                            r.alice_outcome.to_string(),
                            r.bob_outcome.to_string(),
                            String::new(),
                            decoded,
                        ]
                    }
                    (role, _, _) => vec![
                        g.index.to_string(),
                        if role == Role::Checking { "checking" } else { "encoding" }.into(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                        String::new(),
                    ],
                };
                rows.push(row);
            }
            (header, rows)
        }
        Report::Detect(r) => (DETECTION_HEADER.to_vec(), vec![detection_row(r)]),
        Report::Sweep(s) => (DETECTION_HEADER.to_vec(), s.rows.iter().map(detection_row).collect()),
        Report::Leakage(r) => (
            vec!["strategy", "guess_accuracy", "chance_level", "bob_fidelity", "claimed", "abs_delta"],
            vec![vec![
                r.strategy.to_string(),
                r.guess_accuracy.to_string(),
                r.chance_level.to_string(),
                r.bob_fidelity.to_string(),
                opt(r.published_claim.as_ref().map(|c| c.value)),
                opt(r.abs_delta),
            ]],
        ),
        Report::Identities(r) => (
            vec!["name", "passed", "max_error"],
            r.checks
                .iter()
                .map(|c| vec![c.name.clone(), c.passed.to_string(), c.max_error.to_string()])
                .collect(),
        ),
    }
}

pub fn render(report: &Report, format: Format) -> Result<Vec<u8>> {
    match format {
        Format::Json => {
            let mut out = serde_json::to_vec_pretty(report)?;
            out.push(b'\n');
            Ok(out)
        }
        Format::Csv => {
            let (header, rows) = table(report);
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&header)?;
            for row in rows {
                w.write_record(&row)?;
            }
            Ok(w.into_inner()?)
        }
    }
}

pub fn emit_report(report: &Report, format: Format, path: Option<&Path>) -> Result<()> {
    let bytes = render(report, format)?;
    match path {
        Some(p) => std::fs::write(p, &bytes).with_context(|| format!("cannot write report to {}", p.display())),
        None => {
            use std::io::Write;
            std::io::stdout().write_all(&bytes).context("cannot write report to stdout")
        }
    }
}

/// Aligned comparison table for a terminal.
pub fn summary(report: &Report) -> Option<String> {
    let Report::Sweep(s) = report else { return None };
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:<20} {:<13} {:>10} {:>10} {:>10} {:>10}",
        "strategy", "predicate", "exact", "mc", "claimed", "|delta|"
    );
    for r in &s.rows {
        let f = |v: Option<f64>| v.map(|x| format!("{x:.6}")).unwrap_or_else(|| "-".into());
        let _ = writeln!(
            out,
            "{:<20} {:<13} {:>10} {:>10} {:>10} {:>10}",
            r.strategy.to_string(),
            r.predicate.to_string(),
            f(r.p_exact),
            f(r.p_mc),
            f(r.published_claim.as_ref().map(|c| c.value)),
            f(r.abs_delta),
        );
    }
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::run::{IdentityReport, Report};
    use qsdc_core::identities::check_all;

    #[test]
    fn csv_has_header_and_one_row_per_check() {
        let checks = check_all();
        let n = checks.len();
        let r = Report::Identities(IdentityReport {
            all_passed: true,
            checks,
        });
        let text = String::from_utf8(render(&r, Format::Csv).unwrap()).unwrap();
        assert_eq!(text.lines().count(), n + 1);
        assert!(text.starts_with("name,passed,max_error\n"));
    }
}
