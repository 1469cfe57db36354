use std::collections::BTreeMap;
use std::fmt::Write;

use crate::dataset::TaskKind;
use crate::text_metrics::MetricValue;

#[derive(Debug, Clone, PartialEq)]
pub enum MetricEntry {
    Value(MetricValue),
    /// Metric could not be computed, e.g. no pair had two valid sides.
    Absent { reason: String },
}

impl MetricEntry {
    pub fn value(&self) -> Option<f64> {
        match self {
            MetricEntry::Value(v) => Some(v.value),
            MetricEntry::Absent { .. } => None,
        }
    }

    pub fn support(&self) -> usize {
        match self {
            MetricEntry::Value(v) => v.support,
            MetricEntry::Absent { .. } => 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub task: TaskKind,
    pub metrics: BTreeMap<String, MetricEntry>,
    pub n_total: usize,
    /// Number of syntactically and chemically valid predictions; SMILES tasks only.
    pub n_valid_pred: Option<usize>,
    pub n_skipped: usize,
    pub skip_reasons: BTreeMap<String, usize>,
}

impl MetricReport {
    pub(crate) fn new(task: TaskKind, n_total: usize) -> MetricReport {
        MetricReport {
            task,
            metrics: BTreeMap::new(),
            n_total,
            n_valid_pred: None,
            n_skipped: 0,
            skip_reasons: BTreeMap::new(),
        }
    }

    pub(crate) fn put(&mut self, v: MetricValue) {
        self.metrics.insert(v.name.clone(), MetricEntry::Value(v));
    }

    pub(crate) fn put_absent(&mut self, name: &str, reason: &str) {
        self.metrics
            .insert(name.to_string(), MetricEntry::Absent { reason: reason.to_string() });
    }

    pub(crate) fn skip(&mut self, reason: &str) {
        self.n_skipped += 1;
        *self.skip_reasons.entry(reason.to_string()).or_insert(0) += 1;
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.metrics.get(name).and_then(MetricEntry::value)
    }

    /// Single-line JSON with sorted keys and six fractional digits per value.
    pub fn to_canonical_json(&self) -> String {
        let mut metrics = String::from("{");
        for (i, (name, entry)) in self.metrics.iter().enumerate() {
            if i > 0 {
                metrics.push(',');
            }
            let body = match entry {
                MetricEntry::Value(v) => format!("{{\"support\":{},\"value\":{:.6}}}", v.support, v.value),
                MetricEntry::Absent { reason } => {
                    format!("{{\"absent\":{},\"support\":0}}", quote(reason))
                }
            };
            let _ = write!(metrics, "{}:{}", quote(name), body);
        }
        metrics.push('}');

        let mut reasons = String::from("{");
        for (i, (r, n)) in self.skip_reasons.iter().enumerate() {
            if i > 0 {
                reasons.push(',');
            }
            let _ = write!(reasons, "{}:{}", quote(r), n);
        }
        reasons.push('}');

        // keys in lexicographic order
        let mut out = format!("{{\"metrics\":{metrics},\"n_skipped\":{},\"n_total\":{}", self.n_skipped, self.n_total);
        if let Some(v) = self.n_valid_pred {
            let _ = write!(out, ",\"n_valid_pred\":{v}");
        }
        let _ = write!(out, ",\"skip_reasons\":{reasons},\"task\":{}}}", quote(self.task.name()));
        out
    }
}

fn quote(s: &str) -> String {
    serde_json::to_string(s).expect("strings serialize")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_json_layout() {
        let mut r = MetricReport::new(TaskKind::Text2Mol, 3);
        r.n_valid_pred = Some(2);
        r.put(MetricValue { name: "validity".into(), value: 2.0 / 3.0, support: 3 });
        r.put(MetricValue { name: "accuracy".into(), value: 1.0 / 3.0, support: 3 });
        r.put_absent("morgan_fts", "no pair with both sides valid");
        r.skip("invalid_prediction");
        let json = r.to_canonical_json();
        assert_eq!(
            json,
            "{\"metrics\":{\"accuracy\":{\"support\":3,\"value\":0.333333},\
             \"morgan_fts\":{\"absent\":\"no pair with both sides valid\",\"support\":0},\
             \"validity\":{\"support\":3,\"value\":0.666667}},\"n_skipped\":1,\"n_total\":3,\
             \"n_valid_pred\":2,\"skip_reasons\":{\"invalid_prediction\":1},\"task\":\"text2mol\"}"
        );
        let parsed: serde_json::Value = serde_json::from_str(&json).unwrap();
        assert_eq!(parsed["metrics"]["accuracy"]["value"].as_f64(), Some(0.333333));
    }
}
