//! Command-line front end: calibration tables, single solves, design
//! audits, response scoring, and seeded simulation over design files.
//!
//! Output is deterministic: the same invocation (including `--seed`)
//! produces byte-identical bytes on stdout. Errors print one
//! machine-parsable `error[<class>]: ...` line on stderr and exit with a
//! class-specific code: 1 usage, 2 validation, 3 I/O.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand, ValueEnum};

use crate::calibration::{calibrate, calibration_table, CalibrationResult, DEFAULT_MAX_SCALE};
use crate::design::{audit_design, DesignAudit, QuestionnaireDesign};
use crate::error::Error;
use crate::io::{load_design, load_responses, scores_to_csv, write_scores};
use crate::moments::{rational_to_f64, ScaleSpec, MIN_SCALE};
use crate::scoring::score_sheet;
use crate::simulate::{run_simulation, SimulationConfig};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Parser)]
#[command(
    name = "sumscore",
    version,
    about = "Calibrate, audit, score, and simulate summated questionnaires that mix dichotomous and Likert items"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Print recommended dichotomous upper values for a range of scale lengths
    Table {
        #[arg(long, default_value_t = 3)]
        kmin: u32,
        #[arg(long, default_value_t = 10)]
        kmax: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Solve the equal-contribution condition for one scale length
    Solve {
        #[arg(long)]
        k: u32,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Audit per-item variance contributions for a design given by counts
    Contrib {
        /// Number of dichotomous items
        #[arg(long)]
        n1: usize,
        /// Number of Likert items
        #[arg(long)]
        n2: usize,
        /// Likert scale length
        #[arg(long)]
        k: u32,
        /// Dichotomous upper value in use
        #[arg(long)]
        upper: i64,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Score a response CSV against a design document
    Score {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        responses: PathBuf,
        /// Write the score CSV here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Estimate contributions by seeded simulation and compare to the audit
    Simulate {
        #[arg(long)]
        design: PathBuf,
        /// Number of simulated respondents
        #[arg(long)]
        n: u64,
        #[arg(long)]
        seed: u64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Lib(Error),
}

impl From<Error> for CliError {
    fn from(err: Error) -> Self {
        CliError::Lib(err)
    }
}

/// Parse arguments, dispatch, print, and return the process exit code.
pub fn run() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => return report_parse_error(err),
    };
    match dispatch(cli.command) {
        Ok(output) => {
            print!("{output}");
            EXIT_OK
        }
        Err(err) => report_error(&err),
    }
}

fn dispatch(command: Cmd) -> Result<String, CliError> {
    match command {
        Cmd::Table { kmin, kmax, format } => cmd_table(kmin, kmax, format),
        Cmd::Solve { k, format } => cmd_solve(k, format),
        Cmd::Contrib {
            n1,
            n2,
            k,
            upper,
            format,
        } => cmd_contrib(n1, n2, k, upper, format),
        Cmd::Score {
            design,
            responses,
            out,
        } => cmd_score(&design, &responses, out.as_deref()),
        Cmd::Simulate { design, n, seed } => cmd_simulate(&design, n, seed),
    }
}

fn cmd_table(kmin: u32, kmax: u32, format: Format) -> Result<String, CliError> {
    if kmin < MIN_SCALE || kmin > kmax || kmax > DEFAULT_MAX_SCALE {
        return Err(CliError::Usage(format!(
            "--kmin/--kmax must satisfy {MIN_SCALE} <= kmin <= kmax <= {DEFAULT_MAX_SCALE}, got ({kmin}, {kmax})"
        )));
    }
    let rows = calibration_table(kmin, kmax)?;
    Ok(match format {
        Format::Text => render_table_text(&rows),
        Format::Csv => render_table_csv(&rows),
        Format::Json => to_json(&rows),
    })
}

fn cmd_solve(k: u32, format: Format) -> Result<String, CliError> {
    let row = calibrate(k)?;
    Ok(match format {
        Format::Text => render_table_text(std::slice::from_ref(&row)),
        Format::Csv => render_table_csv(std::slice::from_ref(&row)),
        Format::Json => to_json(&row),
    })
}

fn cmd_contrib(
    n1: usize,
    n2: usize,
    k: u32,
    upper: i64,
    format: Format,
) -> Result<String, CliError> {
    let design = QuestionnaireDesign::from_counts(n1, n2, k, upper)?;
    let audit = audit_design(&design);
    Ok(match format {
        Format::Text => render_audit_text(&design, &audit),
        Format::Csv => render_audit_csv(&audit),
        Format::Json => to_json(&audit),
    })
}

fn cmd_score(
    design_path: &std::path::Path,
    responses_path: &std::path::Path,
    out: Option<&std::path::Path>,
) -> Result<String, CliError> {
    let design = load_design(design_path)?;
    let sheet = load_responses(responses_path)?;
    let scores = score_sheet(&design, &sheet)?;
    match out {
        Some(path) => {
            write_scores(path, &scores)?;
            Ok(String::new())
        }
        None => Ok(scores_to_csv(&scores)),
    }
}

fn cmd_simulate(design_path: &std::path::Path, n: u64, seed: u64) -> Result<String, CliError> {
    let design = load_design(design_path)?;
    let report = run_simulation(&SimulationConfig::uniform(design, n, seed))?;
    Ok(to_json(&report))
}

fn render_table_text(rows: &[CalibrationResult]) -> String {
    let mut out = String::from("Scale | Range | Upper Value | Suggested Value\n");
    for row in rows {
        out.push_str(&format!(
            "{} | {:.6} | {:.6} | {}\n",
            row.k, row.optimal_range, row.exact_upper, row.suggested_upper
        ));
    }
    out
}

fn render_table_csv(rows: &[CalibrationResult]) -> String {
    let mut out = String::from("scale,range,upper_value,suggested_value\n");
    for row in rows {
        out.push_str(&format!(
            "{},{:.6},{:.6},{}\n",
            row.k, row.optimal_range, row.exact_upper, row.suggested_upper
        ));
    }
    out
}

fn render_audit_text(design: &QuestionnaireDesign, audit: &DesignAudit) -> String {
    let mut out = format!(
        "items: {} ({} dichotomous, {} likert)\n",
        design.len(),
        design.dichotomous_count(),
        design.likert_count()
    );
    for kind in ["dichotomous", "likert"] {
        let representative = design
            .items()
            .iter()
            .zip(&audit.report.items)
            .find(|(item, _)| match item.scale {
                ScaleSpec::Dichotomous { .. } => kind == "dichotomous",
                ScaleSpec::Likert { .. } => kind == "likert",
            });
        if let Some((_, contribution)) = representative {
            out.push_str(&format!(
                "{kind} | variance {:.6} | contribution {:.6} | ideal {:.6} | deviation {:+.6}\n",
                rational_to_f64(contribution.variance),
                contribution.contribution,
                contribution.ideal,
                contribution.deviation
            ));
        }
    }
    out.push_str(&format!(
        "total variance: {:.6}\n",
        rational_to_f64(audit.report.total_variance)
    ));
    if let (Some(recommendation), Some((low, high))) =
        (&audit.recommendation, design.dichotomous_scale())
    {
        if audit.upper_mismatch {
            out.push_str(&format!(
                "warning: dichotomous range {} differs from suggested range {} (suggested upper value {} for k={})\n",
                high - low,
                recommendation.suggested_upper - 1,
                recommendation.suggested_upper,
                recommendation.k
            ));
        }
    }
    out
}

fn render_audit_csv(audit: &DesignAudit) -> String {
    let mut out = String::from("item_id,variance,contribution,ideal,deviation\n");
    for item in &audit.report.items {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            item.id,
            rational_to_f64(item.variance),
            item.contribution,
            item.ideal,
            item.deviation
        ));
    }
    out
}

fn to_json<T: serde::Serialize>(value: &T) -> String {
    let mut out = serde_json::to_string_pretty(value).expect("report types serialize");
    out.push('\n');
    out
}

fn report_parse_error(err: clap::Error) -> i32 {
    if matches!(err.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
        let _ = err.print();
        return EXIT_OK;
    }
    let rendered = err.render().to_string();
    let mut lines = rendered.lines();
    let first = lines.next().unwrap_or("invalid arguments");
    eprintln!("error[usage]: {}", first.trim_start_matches("error: "));
    for line in lines {
        eprintln!("{line}");
    }
    EXIT_USAGE
}

fn report_error(err: &CliError) -> i32 {
    match err {
        CliError::Usage(message) => {
            eprintln!("error[usage]: {message}");
            EXIT_USAGE
        }
        CliError::Lib(lib) => {
            let (class, code) = classify(lib);
            eprintln!("error[{class}]: {lib}");
            if let Error::InvalidResponses { violations } = lib {
                for violation in violations {
                    eprintln!("  {violation}");
                }
            }
            code
        }
    }
}

fn classify(err: &Error) -> (&'static str, i32) {
    match err {
        Error::Io { .. } => ("io", EXIT_IO),
        _ => ("validation", EXIT_VALIDATION),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_text_prints_six_decimal_columns() {
        let rows = calibration_table(7, 7).unwrap();
        assert_eq!(
            render_table_text(&rows),
            "Scale | Range | Upper Value | Suggested Value\n7 | 4.000000 | 5.000000 | 5\n"
        );
    }

    #[test]
    fn table_csv_matches_text_values() {
        let rows = calibration_table(7, 7).unwrap();
        assert_eq!(
            render_table_csv(&rows),
            "scale,range,upper_value,suggested_value\n7,4.000000,5.000000,5\n"
        );
    }

    #[test]
    fn contrib_text_carries_the_mismatch_warning() {
        let design = QuestionnaireDesign::from_counts(2, 8, 5, 5).unwrap();
        let audit = audit_design(&design);
        let text = render_audit_text(&design, &audit);
        assert!(text.contains("contribution 0.166667"));
        assert!(text.contains("suggested upper value 4 for k=5"));
    }

    #[test]
    fn contrib_text_is_quiet_when_upper_matches() {
        let design = QuestionnaireDesign::from_counts(2, 8, 7, 5).unwrap();
        let audit = audit_design(&design);
        let text = render_audit_text(&design, &audit);
        assert!(!text.contains("warning"));
    }

    #[test]
    fn bad_table_bounds_are_usage_errors() {
        assert!(matches!(
            cmd_table(5, 3, Format::Text),
            Err(CliError::Usage(_))
        ));
        assert!(matches!(
            cmd_table(2, 10, Format::Text),
            Err(CliError::Usage(_))
        ));
    }

    #[test]
    fn solve_below_minimum_is_a_validation_error() {
        match cmd_solve(2, Format::Text) {
            Err(CliError::Lib(err)) => assert_eq!(classify(&err).1, EXIT_VALIDATION),
            other => panic!("expected validation error, got {:?}", other.map(|_| ())),
        }
    }
}
