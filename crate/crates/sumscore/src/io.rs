//! File formats: design documents (JSON) and response sheets (CSV).
//!
//! A design document looks like
//!
//! ```json
//! {
//!   "items": [
//!     {"id": "d1", "kind": "dichotomous", "upper": 4},
//!     {"id": "l1", "kind": "likert", "k": 5}
//!   ],
//!   "dichotomous_raw_mapping": {"low": 0, "high": 1}
//! }
//! ```
//!
//! The mapping is optional and defaults to {0, 1}. A response sheet is a
//! CSV whose header names the respondent-id column first and then one
//! column per item id; item columns may appear in any order.

use std::fs;
use std::path::Path;

use serde::Deserialize;

use crate::design::{DesignItem, QuestionnaireDesign, RawMapping};
use crate::error::{Error, Result};
use crate::moments::ScaleSpec;
use crate::scoring::{RawAnswer, RespondentScore, ResponseSheet};

#[derive(Debug, Deserialize)]
struct DesignDoc {
    items: Vec<ItemDoc>,
    #[serde(default)]
    dichotomous_raw_mapping: Option<RawMapping>,
}

#[derive(Debug, Deserialize)]
struct ItemDoc {
    id: String,
    kind: ItemKind,
    #[serde(default)]
    k: Option<u32>,
    #[serde(default)]
    upper: Option<i64>,
}

#[derive(Debug, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ItemKind {
    Likert,
    Dichotomous,
}

/// Parse a design document from JSON text.
pub fn design_from_json(json: &str) -> Result<QuestionnaireDesign> {
    let doc: DesignDoc =
        serde_json::from_str(json).map_err(|e| Error::MalformedDesign(e.to_string()))?;
    let mut items = Vec::with_capacity(doc.items.len());
    for item in doc.items {
        let scale = match item.kind {
            ItemKind::Likert => {
                let k = item.k.ok_or_else(|| {
                    Error::MalformedDesign(format!("item `{}`: likert item requires `k`", item.id))
                })?;
                ScaleSpec::likert(k)?
            }
            ItemKind::Dichotomous => {
                let upper = item.upper.ok_or_else(|| {
                    Error::MalformedDesign(format!(
                        "item `{}`: dichotomous item requires `upper`",
                        item.id
                    ))
                })?;
                ScaleSpec::dichotomous(1, upper)?
            }
        };
        items.push(DesignItem { id: item.id, scale });
    }
    QuestionnaireDesign::new(items, doc.dichotomous_raw_mapping.unwrap_or_default())
}

/// Read a design document from a file.
pub fn load_design(path: &Path) -> Result<QuestionnaireDesign> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    design_from_json(&text)
}

/// Parse a response sheet from CSV text.
pub fn responses_from_csv(text: &str) -> Result<ResponseSheet> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());

    let headers = reader
        .headers()
        .map_err(|e| Error::MalformedResponses(e.to_string()))?;
    if headers.len() < 2 {
        return Err(Error::MalformedResponses(
            "header must name a respondent-id column and at least one item column".into(),
        ));
    }
    let columns: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();

    let mut respondents = Vec::new();
    let mut answers = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| Error::MalformedResponses(e.to_string()))?;
        let mut fields = record.iter();
        let respondent = fields.next().unwrap_or("").to_string();
        respondents.push(respondent);
        answers.push(fields.map(parse_cell).collect());
    }
    ResponseSheet::new(respondents, columns, answers)
}

fn parse_cell(cell: &str) -> RawAnswer {
    if cell.is_empty() {
        return RawAnswer::Missing;
    }
    match cell.parse::<i64>() {
        Ok(value) => RawAnswer::Int(value),
        Err(_) => RawAnswer::Invalid(cell.to_string()),
    }
}

/// Read a response sheet from a CSV file.
pub fn load_responses(path: &Path) -> Result<ResponseSheet> {
    let text = fs::read_to_string(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    responses_from_csv(&text)
}

/// Render scores as a `respondent_id,score` CSV document.
pub fn scores_to_csv(scores: &[RespondentScore]) -> String {
    let mut writer = csv::Writer::from_writer(Vec::new());
    writer
        .write_record(["respondent_id", "score"])
        .expect("in-memory write");
    for score in scores {
        writer
            .write_record([score.respondent_id.as_str(), &score.score.to_string()])
            .expect("in-memory write");
    }
    String::from_utf8(writer.into_inner().expect("in-memory flush")).expect("csv output is utf-8")
}

/// Write scores as CSV to a file.
pub fn write_scores(path: &Path, scores: &[RespondentScore]) -> Result<()> {
    fs::write(path, scores_to_csv(scores)).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })
}
