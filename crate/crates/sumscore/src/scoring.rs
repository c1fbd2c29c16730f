//! Recoding of raw dichotomous answers and sum-based scoring of response
//! sheets.
//!
//! Validation walks the whole sheet and reports every bad cell with its
//! (respondent, item) coordinates before failing; survey files tend to break
//! in bulk. Missing answers are rejected, never imputed.

use std::collections::HashMap;

use serde::Serialize;

use crate::design::{QuestionnaireDesign, RawMapping};
use crate::error::{Error, ResponseViolation, Result};
use crate::moments::ScaleSpec;

/// One cell of a response sheet before validation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RawAnswer {
    Int(i64),
    Missing,
    /// Cell content that did not parse as an integer.
    Invalid(String),
}

/// Tabular raw answers, one row per respondent, pre-recoding.
#[derive(Debug, Clone, PartialEq)]
pub struct ResponseSheet {
    respondents: Vec<String>,
    columns: Vec<String>,
    answers: Vec<Vec<RawAnswer>>,
}

impl ResponseSheet {
    pub fn new(
        respondents: Vec<String>,
        columns: Vec<String>,
        answers: Vec<Vec<RawAnswer>>,
    ) -> Result<Self> {
        if answers.len() != respondents.len() {
            return Err(Error::MalformedResponses(format!(
                "{} answer rows for {} respondents",
                answers.len(),
                respondents.len()
            )));
        }
        for (row, respondent) in answers.iter().zip(&respondents) {
            if row.len() != columns.len() {
                return Err(Error::MalformedResponses(format!(
                    "respondent `{respondent}` has {} answers for {} columns",
                    row.len(),
                    columns.len()
                )));
            }
        }
        Ok(ResponseSheet {
            respondents,
            columns,
            answers,
        })
    }

    pub fn respondents(&self) -> &[String] {
        &self.respondents
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn answers(&self) -> &[Vec<RawAnswer>] {
        &self.answers
    }
}

/// A respondent's summated score.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RespondentScore {
    pub respondent_id: String,
    pub score: i64,
}

/// Map a raw two-point answer onto {1, upper}.
pub fn recode_dichotomous(raw: i64, mapping: RawMapping, upper: i64) -> Result<i64> {
    if upper < 2 {
        return Err(Error::InvalidDichotomous {
            low: 1,
            high: upper,
        });
    }
    recode_to(raw, mapping, 1, upper)
}

fn recode_to(raw: i64, mapping: RawMapping, low: i64, high: i64) -> Result<i64> {
    if raw == mapping.low {
        Ok(low)
    } else if raw == mapping.high {
        Ok(high)
    } else {
        Err(Error::RawOutOfDomain {
            raw,
            low: mapping.low,
            high: mapping.high,
        })
    }
}

/// Sum-score every respondent: recode dichotomous answers, validate every
/// cell, and add the answers up. Column order in the sheet is free as long
/// as the ids match the design; output preserves respondent order.
pub fn score_sheet(
    design: &QuestionnaireDesign,
    sheet: &ResponseSheet,
) -> Result<Vec<RespondentScore>> {
    let column_items = match_columns(design, sheet)?;
    let mapping = design.raw_mapping();

    let mut violations = Vec::new();
    let mut scores = Vec::with_capacity(sheet.respondents().len());

    for (respondent, row) in sheet.respondents().iter().zip(sheet.answers()) {
        let mut sum = 0i64;
        for (item, answer) in column_items.iter().zip(row) {
            match validate_answer(item.1, mapping, answer) {
                Ok(value) => sum += value,
                Err(message) => violations.push(ResponseViolation {
                    respondent: respondent.clone(),
                    item: item.0.clone(),
                    message,
                }),
            }
        }
        scores.push(RespondentScore {
            respondent_id: respondent.clone(),
            score: sum,
        });
    }

    if !violations.is_empty() {
        return Err(Error::InvalidResponses { violations });
    }
    Ok(scores)
}

/// Recode one raw cell against its item's scale, or describe the violation.
fn validate_answer(
    scale: ScaleSpec,
    mapping: RawMapping,
    answer: &RawAnswer,
) -> std::result::Result<i64, String> {
    let value = match answer {
        RawAnswer::Int(v) => *v,
        RawAnswer::Missing => return Err("missing answer".into()),
        RawAnswer::Invalid(text) => return Err(format!("answer `{text}` is not an integer")),
    };
    match scale {
        ScaleSpec::Likert { k } => {
            if (1..=i64::from(k)).contains(&value) {
                Ok(value)
            } else {
                Err(format!("answer {value} outside likert range 1..={k}"))
            }
        }
        ScaleSpec::Dichotomous { low, high } => recode_to(value, mapping, low, high)
            .map_err(|_| format!("raw answer {value} not in {{{}, {}}}", mapping.low, mapping.high)),
    }
}

/// Pair each sheet column with its design item, erroring on any mismatch.
fn match_columns<'d>(
    design: &'d QuestionnaireDesign,
    sheet: &ResponseSheet,
) -> Result<Vec<(String, ScaleSpec)>> {
    let mut by_id: HashMap<&str, ScaleSpec> = HashMap::new();
    for item in design.items() {
        by_id.insert(item.id.as_str(), item.scale);
    }

    let mut seen = HashMap::new();
    let mut duplicated = Vec::new();
    let mut unexpected = Vec::new();
    let mut matched = Vec::with_capacity(sheet.columns().len());
    for column in sheet.columns() {
        match seen.insert(column.as_str(), ()) {
            Some(()) => duplicated.push(column.clone()),
            None => match by_id.get(column.as_str()) {
                Some(scale) => matched.push((column.clone(), *scale)),
                None => unexpected.push(column.clone()),
            },
        }
    }
    let missing: Vec<String> = design
        .items()
        .iter()
        .filter(|item| !sheet.columns().iter().any(|c| c == &item.id))
        .map(|item| item.id.clone())
        .collect();

    if !missing.is_empty() || !unexpected.is_empty() || !duplicated.is_empty() {
        return Err(Error::SchemaMismatch {
            missing,
            unexpected,
            duplicated,
        });
    }
    Ok(matched)
}
