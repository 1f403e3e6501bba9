//! Browser bindings. Every export takes plain strings and numbers and returns
//! a JSON document; failures come back as `{"error": "..."}`.

use notional::authoring::gen_distractors;
use notional::diagnosis::{diagnose as run_diagnosis, MatchMode, Observation, SearchConfig};
use notional::exec::Limits;
use notional::lang::{parse, Program};
use notional::registry::shipped;
use notional::variant::{profile_from_literal, run_variant};
use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

fn error(message: impl ToString) -> String {
    json!({ "error": message.to_string() }).to_string()
}

fn program(source: &str) -> Result<Program, String> {
    parse(source).map_err(|e| format!("syntax error at {e}"))
}

fn limits(spec: &str) -> Result<Limits, String> {
    if spec.trim().is_empty() {
        Ok(Limits::default())
    } else {
        spec.parse()
    }
}

fn respond(result: Result<Value, String>) -> String {
    match result {
        Ok(v) => v.to_string(),
        Err(e) => error(e),
    }
}

/// Runs `source` under `profile` (empty for the reference semantics).
#[wasm_bindgen]
pub fn simulate(source: &str, profile: &str, limit_spec: &str) -> String {
    respond((|| {
        let p = program(source)?;
        let profile = profile_from_literal(shipped(), profile).map_err(|e| e.to_string())?;
        let r = run_variant(&p, &profile, limits(limit_spec)?);
        let mut v = r.to_json();
        v["profile"] = json!(profile.to_string());
        v["trace"] = Value::Array(r.trace.iter().enumerate().map(|(i, e)| e.to_json(i)).collect());
        Ok(v)
    })())
}

/// Explains `answer` (one output line per line).
#[wasm_bindgen]
pub fn diagnose(source: &str, answer: &str, max_k: u8, mode: &str) -> String {
    respond((|| {
        let p = program(source)?;
        let mode: MatchMode = if mode.is_empty() { MatchMode::Exact } else { mode.parse()? };
        if usize::from(max_k) > SearchConfig::MAX_CARDINALITY {
            return Err(format!("max_k must be at most {}", SearchConfig::MAX_CARDINALITY));
        }
        let report = run_diagnosis(
            shipped(),
            &p,
            &Observation::from_text(answer, mode),
            &SearchConfig::with_k(usize::from(max_k)),
        );
        Ok(report.to_json())
    })())
}

#[wasm_bindgen]
pub fn distractors(source: &str, max_k: u8) -> String {
    respond((|| {
        let p = program(source)?;
        let ds = gen_distractors(&p, shipped(), usize::from(max_k.min(3)), Limits::default());
        Ok(Value::Array(ds.iter().map(|d| d.to_json()).collect()))
    })())
}

/// The bundled catalog document.
#[wasm_bindgen]
pub fn catalog() -> String {
    shipped().to_json()
}

#[cfg(test)]
mod tests {
    use super::*;

    const BIRNE: &str = "for (i = 10; i > 0; i = i - 4) { print(\"Birne\", i); } print(\"Apfel\");";

    fn parsed(s: String) -> Value {
        serde_json::from_str(&s).unwrap()
    }

    #[test]
    fn simulate_reports_transcript_and_trace() {
        let v = parsed(simulate(BIRNE, "ITER.3.b.ii.A", ""));
        assert_eq!(v["transcript"], json!(["Birne 6", "Birne 2", "Birne -2", "Apfel"]));
        assert_eq!(v["status"], "completed");
        assert!(!v["trace"].as_array().unwrap().is_empty());
        assert_eq!(parsed(simulate(BIRNE, "", "outputs=1"))["status"], "output_cap");
    }

    #[test]
    fn errors_are_json() {
        assert!(parsed(simulate("print(", "", "")).get("error").is_some());
        assert!(parsed(simulate(BIRNE, "XYZ", "")).get("error").is_some());
        assert!(parsed(diagnose(BIRNE, "1", 9, "")).get("error").is_some());
        assert!(parsed(diagnose(BIRNE, "1", 1, "fuzzy")).get("error").is_some());
    }

    #[test]
    fn diagnose_and_distractors() {
        let v = parsed(diagnose(BIRNE, "Birne 6\nBirne 2\nBirne -2\nApfel", 1, "exact"));
        assert_eq!(v["verdict"], "explained");
        assert_eq!(v["explanations"][0]["codes"], json!(["ITER.3.b.ii.A"]));
        let ds = parsed(distractors(BIRNE, 1));
        assert!(ds.as_array().unwrap().iter().all(|d| d["plausibilityRank"] == 1));
    }

    #[test]
    fn catalog_is_the_shipped_document() {
        let v = parsed(catalog());
        assert_eq!(v["entries"].as_array().unwrap().len(), 72);
    }
}
