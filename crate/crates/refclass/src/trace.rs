//! Query traces: what was considered, what clashed, and why the answer won.
//!
//! A [`Trace`] is assembled once per query and rendered in two stable forms:
//! an indented human-readable report and a JSON document. Both renderings
//! are deterministic byte for byte, so repeated runs of the same query over
//! the same knowledge base can be compared directly.

use serde::Serialize;

/// A candidate structure as listed in the trace, strongest first.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceCandidate {
    pub class: String,
    pub interval: [String; 2],
    pub provenance: String,
}

/// One reflection verdict: candidate `from` reflects candidate `to`.
/// Indices refer to the candidate list.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceReflection {
    pub from: usize,
    pub to: usize,
    pub rule: String,
}

/// One pass of the selection loop.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TraceIteration {
    pub selected: String,
    pub deleted: Vec<String>,
    pub failed: bool,
}

/// Full record of a query evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Trace {
    pub query: String,
    pub equivalences: Vec<String>,
    pub candidates: Vec<TraceCandidate>,
    pub disagreements: Vec<[usize; 2]>,
    pub reflections: Vec<TraceReflection>,
    pub iterations: Vec<TraceIteration>,
    pub outcome: String,
    pub prob: [String; 2],
    pub warnings: Vec<String>,
}

impl Trace {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serialization cannot fail")
    }

    pub fn to_human(&self) -> String {
        let mut out = String::new();
        let class_of = |i: usize| self.candidates[i].class.as_str();
        out.push_str(&format!("query: {}\n", self.query));
        for e in &self.equivalences {
            out.push_str(&format!("resolves to: {e}\n"));
        }
        if self.candidates.is_empty() {
            out.push_str("candidates: none\n");
        } else {
            out.push_str("candidates:\n");
            for (i, c) in self.candidates.iter().enumerate() {
                out.push_str(&format!(
                    "  {}. {} = [{}, {}] ({})\n",
                    i + 1,
                    c.class,
                    c.interval[0],
                    c.interval[1],
                    c.provenance
                ));
            }
        }
        if self.disagreements.is_empty() {
            out.push_str("disagreements: none\n");
        } else {
            out.push_str("disagreements:\n");
            for [i, j] in &self.disagreements {
                out.push_str(&format!("  {} vs {}\n", class_of(*i), class_of(*j)));
            }
        }
        if self.reflections.is_empty() {
            out.push_str("reflections: none\n");
        } else {
            out.push_str("reflections:\n");
            for r in &self.reflections {
                out.push_str(&format!(
                    "  {} reflects {} ({})\n",
                    class_of(r.from),
                    class_of(r.to),
                    r.rule
                ));
            }
        }
        if self.iterations.is_empty() {
            out.push_str("selection: no candidates\n");
        } else {
            out.push_str("selection:\n");
            for (i, it) in self.iterations.iter().enumerate() {
                let verdict = if it.failed { "failed" } else { "selected" };
                if it.deleted.is_empty() {
                    out.push_str(&format!("  {}. {} {}\n", i + 1, it.selected, verdict));
                } else {
                    out.push_str(&format!(
                        "  {}. {} {} (deleted: {})\n",
                        i + 1,
                        it.selected,
                        verdict,
                        it.deleted.join(", ")
                    ));
                }
            }
        }
        out.push_str(&format!("outcome: {}\n", self.outcome));
        for w in &self.warnings {
            out.push_str(&format!("warning: {w}\n"));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Trace {
        Trace {
            query: "t".into(),
            equivalences: vec!["(member m V)".into()],
            candidates: vec![
                TraceCandidate {
                    class: "H".into(),
                    interval: ["3/10".into(), "1/2".into()],
                    provenance: "asserted".into(),
                },
                TraceCandidate {
                    class: "D&H&K".into(),
                    interval: ["0".into(), "1".into()],
                    provenance: "asserted".into(),
                },
            ],
            disagreements: vec![],
            reflections: vec![TraceReflection { from: 1, to: 0, rule: "subset".into() }],
            iterations: vec![TraceIteration {
                selected: "H".into(),
                deleted: vec![],
                failed: false,
            }],
            outcome: "selected".into(),
            prob: ["3/10".into(), "1/2".into()],
            warnings: vec![],
        }
    }

    #[test]
    fn json_has_the_schema_keys_in_order() {
        let json = sample().to_json();
        let keys = [
            "\"query\"",
            "\"equivalences\"",
            "\"candidates\"",
            "\"disagreements\"",
            "\"reflections\"",
            "\"iterations\"",
            "\"outcome\"",
            "\"prob\"",
            "\"warnings\"",
        ];
        let positions: Vec<usize> =
            keys.iter().map(|k| json.find(k).expect("schema key present")).collect();
        assert!(positions.windows(2).all(|w| w[0] < w[1]), "keys out of order:\n{json}");

        let value: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(value["prob"][0], "3/10");
        assert_eq!(value["candidates"][1]["class"], "D&H&K");
        assert_eq!(value["reflections"][0]["rule"], "subset");
        assert_eq!(value["iterations"][0]["failed"], false);
    }

    #[test]
    fn renderings_are_deterministic() {
        let trace = sample();
        assert_eq!(trace.to_json(), trace.to_json());
        assert_eq!(trace.to_human(), trace.to_human());
    }

    #[test]
    fn human_report_names_classes_not_indices() {
        let mut trace = sample();
        trace.disagreements = vec![[0, 1]];
        let text = trace.to_human();
        assert!(text.contains("H vs D&H&K"));
        assert!(text.contains("D&H&K reflects H (subset)"));
        assert!(text.contains("1. H selected"));
        assert!(text.contains("outcome: selected"));
    }
}
