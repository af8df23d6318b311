//! Human-readable tables for API responses. Lines never exceed [`WIDTH`].

use serde_json::Value;

pub const WIDTH: usize = 120;

const LETTERS: [(&str, &str); 5] = [
    ("fragmentation", "F"),
    ("actionability", "A"),
    ("believability", "B"),
    ("likelihood_of_spread", "L"),
    ("exploitativeness", "E"),
];

fn letter(token: &str) -> &str {
    LETTERS.iter().find(|(t, _)| *t == token).map_or(token, |(_, l)| l)
}

fn label(token: &str) -> String {
    let mut s = token.replace('_', " ");
    if let Some(first) = s.get_mut(0..1) {
        first.make_ascii_uppercase();
    }
    s
}

/// Cuts `s` to `max` characters, marking the cut with "...".
pub fn clip(s: &str, max: usize) -> String {
    let s = s.replace(['\n', '\r', '\t'], " ");
    if s.chars().count() <= max {
        return s;
    }
    let keep = max.saturating_sub(3);
    format!("{}...", s.chars().take(keep).collect::<String>())
}

fn str_of<'a>(v: &'a Value, key: &str) -> &'a str {
    v.get(key).and_then(Value::as_str).unwrap_or("")
}

fn score_cell(v: &Value) -> String {
    v.as_f64().map_or_else(|| "-".to_string(), |x| format!("{x:.2}"))
}

/// An RFC 3339 timestamp without its fractional seconds.
fn seconds(ts: &str) -> String {
    match (ts.get(..19), ts.ends_with('Z')) {
        (Some(head), true) => format!("{head}Z"),
        _ => ts.to_string(),
    }
}

fn push(out: &mut String, line: impl AsRef<str>) {
    out.push_str(&clip(line.as_ref(), WIDTH));
    out.push('\n');
}

fn vector_cells(vector: &Value) -> Vec<String> {
    vector
        .as_array()
        .map(|dims| dims.iter().map(|d| score_cell(&d["score"])).collect())
        .unwrap_or_default()
}

pub fn claim(v: &Value) -> String {
    let mut out = String::new();
    push(&mut out, format!("claim    {}", str_of(v, "claim_id")));
    push(&mut out, format!("status   {}", str_of(v, "status")));
    push(&mut out, format!("created  {}", str_of(v, "created_at")));
    for key in ["source_url", "platform"] {
        if let Some(s) = v.get(key).and_then(Value::as_str) {
            push(&mut out, format!("{key:<8} {s}"));
        }
    }
    push(&mut out, format!("text     {}", str_of(v, "text")));
    out
}

pub fn claim_list(v: &Value) -> String {
    let mut out = String::new();
    push(&mut out, format!("{:<24} {:<12} {:<20} TEXT", "CLAIM", "STATUS", "CREATED"));
    for c in v["claims"].as_array().into_iter().flatten() {
        push(
            &mut out,
            format!(
                "{:<24} {:<12} {:<20} {}",
                clip(str_of(c, "claim_id"), 24),
                str_of(c, "status"),
                seconds(str_of(c, "created_at")),
                str_of(c, "text")
            ),
        );
    }
    push(
        &mut out,
        format!("{} of {} claims (offset {})", v["claims"].as_array().map_or(0, Vec::len), v["total"], v["offset"]),
    );
    out
}

pub fn import_report(v: &Value) -> String {
    let mut out = String::new();
    let imported = v["imported"].as_array().cloned().unwrap_or_default();
    let errors = v["errors"].as_array().cloned().unwrap_or_default();
    push(&mut out, format!("imported {} claims, rejected {} rows", imported.len(), errors.len()));
    for c in &imported {
        push(&mut out, format!("  + {:<24} {}", clip(str_of(c, "claim_id"), 24), str_of(c, "text")));
    }
    for e in &errors {
        push(&mut out, format!("  ! line {}: {}", e["line"].to_string(), str_of(e, "reason")));
    }
    out
}

fn dimension_table(out: &mut String, vector: &Value, provisional: &Value) {
    push(out, format!("{:<3} {:<22} {:>6} {:>9} {:>9}  NOTE", "DIM", "NAME", "SCORE", "YES/ANS", "COVERAGE"));
    for d in vector.as_array().into_iter().flatten() {
        let token = str_of(d, "dimension");
        let note = if provisional[token].as_bool() == Some(true) { "provisional" } else { "" };
        push(
            out,
            format!(
                "{:<3} {:<22} {:>6} {:>9} {:>9}  {note}",
                letter(token),
                label(token),
                score_cell(&d["score"]),
                format!("{}/{}", d["yes_count"], d["answered_count"]),
                str_of(d, "coverage_exact"),
            ),
        );
    }
}

fn explanation(out: &mut String, e: &Value) {
    push(out, "why:");
    for d in e["dimensions"].as_array().into_iter().flatten() {
        let token = str_of(d, "dimension");
        let triggering = d["triggering"].as_array().cloned().unwrap_or_default();
        if triggering.is_empty() {
            push(out, format!("  {} {}: no Yes answers", letter(token), score_cell(&d["score"])));
            continue;
        }
        push(out, format!("  {} {}: {} Yes", letter(token), score_cell(&d["score"]), triggering.len()));
        for t in &triggering {
            push(out, format!("      {:<8} {}", str_of(t, "id"), str_of(t, "text")));
        }
    }
    let contested = e["contested"].as_array().cloned().unwrap_or_default();
    if !contested.is_empty() {
        push(out, "contested (excluded from scores):");
        for c in &contested {
            let votes = &c["votes"];
            push(
                out,
                format!(
                    "  {:<8} yes {} / no {} / unknown {}  {}",
                    str_of(c, "id"),
                    votes["yes"],
                    votes["no"],
                    votes["unknown"],
                    str_of(c, "text")
                ),
            );
        }
    }
}

pub fn score(v: &Value) -> String {
    let mut out = String::new();
    if let Some(assessors) = v.get("assessors").and_then(Value::as_array) {
        push(
            &mut out,
            format!("claim {}  questionnaire v{}  {} assessors", str_of(v, "claim_id"), v["questionnaire_version"], assessors.len()),
        );
        for a in assessors {
            out.push('\n');
            push(&mut out, format!("assessor {}  ({})", str_of(a, "assessor_id"), str_of(a, "created_at")));
            dimension_table(&mut out, &a["score_vector"], &a["provisional"]);
            explanation(&mut out, &a["explanation"]);
        }
        return out;
    }
    push(
        &mut out,
        format!(
            "claim {}  questionnaire v{}  {} assessments  disagreement {} ({:.2})",
            str_of(v, "claim_id"),
            v["questionnaire_version"],
            v["assessment_count"],
            str_of(v, "disagreement_exact"),
            v["disagreement"].as_f64().unwrap_or(0.0)
        ),
    );
    dimension_table(&mut out, &v["score_vector"], &v["provisional"]);
    explanation(&mut out, &v["explanation"]);
    out
}

pub fn queue(v: &Value) -> String {
    let mut out = String::new();
    let weighted = str_of(v, "mode") == "weighted";
    let mut title = format!("queue  profile {}  mode {}", str_of(v, "profile"), str_of(v, "mode"));
    if v["hypothetical"].as_bool() == Some(true) {
        title.push_str("  HYPOTHETICAL (not saved)");
    }
    push(&mut out, title);
    let lead = if weighted { format!("{:>4} {:>6}", "RANK", "SCALAR") } else { format!("{:>4}", "") };
    push(
        &mut out,
        format!("{lead} {:<20} {:>4} {:>4} {:>4} {:>4} {:>4}  {:<6} TEXT", "CLAIM", "F", "A", "B", "L", "E", "FLAGS"),
    );
    for e in v["entries"].as_array().into_iter().flatten() {
        let lead = if weighted {
            format!(
                "{:>4} {:>6}",
                e.get("rank").map_or("-".to_string(), Value::to_string),
                e.get("scalar").map_or("-".to_string(), score_cell)
            )
        } else {
            format!("{:>4}", if e["pareto_frontier"].as_bool() == Some(true) { "*" } else { "" })
        };
        let cells = vector_cells(&e["score_vector"]);
        let mut flags = String::new();
        if e["pareto_frontier"].as_bool() == Some(true) {
            flags.push('*');
        }
        if e["provisional"].as_bool() == Some(true) {
            flags.push('p');
        }
        if e["disagreement"].as_f64().is_some_and(|d| d > 0.0) {
            flags.push('!');
        }
        push(
            &mut out,
            format!(
                "{lead} {:<20} {:>4} {:>4} {:>4} {:>4} {:>4}  {:<6} {}",
                clip(str_of(e, "claim_id"), 20),
                cells.first().map_or("-", String::as_str),
                cells.get(1).map_or("-", String::as_str),
                cells.get(2).map_or("-", String::as_str),
                cells.get(3).map_or("-", String::as_str),
                cells.get(4).map_or("-", String::as_str),
                flags,
                str_of(e, "text")
            ),
        );
    }
    push(&mut out, "* Pareto frontier   p provisional (low coverage)   ! assessors disagree");
    out
}

pub fn audit(v: &Value) -> String {
    let mut out = String::new();
    push(&mut out, format!("{:>6} {:<20} {:<18} DETAIL", "SEQ", "RECORDED", "KIND"));
    for r in v.as_array().into_iter().flatten() {
        let p = &r["payload"];
        let detail = match str_of(r, "kind") {
            "ClaimAdded" => str_of(p, "text").to_string(),
            "StatusChanged" => format!("-> {}", str_of(p, "status")),
            "AssessmentRecorded" => format!(
                "assessor {} v{} ({} answers)",
                str_of(p, "assessor_id"),
                p["questionnaire_version"],
                p["answers"].as_array().map_or(0, Vec::len)
            ),
            "NoteAdded" => format!("{}: {}", str_of(p, "author_id"), str_of(p, "body")),
            _ => String::new(),
        };
        push(
            &mut out,
            format!(
                "{:>6} {:<20} {:<18} {detail}",
                r["seq"].to_string(),
                seconds(str_of(r, "recorded_at")),
                str_of(r, "kind")
            ),
        );
    }
    out
}

pub fn profiles(v: &Value) -> String {
    let mut out = String::new();
    push(&mut out, format!("{:<20} {:<9} {:<30} {:>8}", "NAME", "MODE", "WEIGHTS F/A/B/L/E", "MIN_COV"));
    for p in v["profiles"].as_array().into_iter().flatten() {
        let weights: Vec<String> = LETTERS.iter().map(|(t, _)| p["weights"][*t].to_string()).collect();
        push(
            &mut out,
            format!(
                "{:<20} {:<9} {:<30} {:>8}",
                clip(str_of(p, "name"), 20),
                str_of(p, "mode"),
                weights.join("/"),
                p["min_coverage"].to_string()
            ),
        );
    }
    out
}

pub fn profile(v: &Value) -> String {
    profiles(&serde_json::json!({ "profiles": [v] }))
}

pub fn assessment(v: &Value) -> String {
    let mut out = String::new();
    let a = &v["assessment"];
    push(
        &mut out,
        format!(
            "recorded assessment by {} for claim {} ({} answers)",
            str_of(a, "assessor_id"),
            str_of(a, "claim_id"),
            a["answers"].as_array().map_or(0, Vec::len)
        ),
    );
    for w in v["warnings"].as_array().into_iter().flatten() {
        let ids: Vec<&str> = w["unanswered"].as_array().into_iter().flatten().filter_map(Value::as_str).collect();
        push(&mut out, format!("  warning: {} unanswered: {}", label(str_of(w, "dimension")), ids.join(", ")));
    }
    out
}

pub fn note(v: &Value) -> String {
    format!("note added to {} by {}\n", str_of(v, "claim_id"), str_of(v, "author_id"))
}

pub fn questionnaire(v: &Value) -> String {
    let mut out = String::new();
    push(&mut out, format!("{} (version {}, {})", str_of(v, "title"), v["version"], str_of(v, "locale")));
    for q in v["questions"].as_array().into_iter().flatten() {
        push(&mut out, format!("  {} {:<8} {}", letter(str_of(q, "dimension")), str_of(q, "id"), str_of(q, "text")));
    }
    out
}
