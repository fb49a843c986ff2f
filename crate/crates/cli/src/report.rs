//! The verification report: one entry per identity, keyed by name.
//!
//! JSON form `{"<identity>": {"max_abs": number|null, "rms": number|null,
//! "pass": bool}, ...}` with keys in lexicographic order; non-finite
//! residuals serialize as `null` and never pass. The CSV form has the
//! header `identity,max_abs,rms,pass`.

use std::collections::BTreeMap;

use laxforge_core::fields::ResidualReport;
use serde::{Deserialize, Serialize};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry {
    pub max_abs: f64,
    pub rms: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Report(pub BTreeMap<String, Entry>);

impl Report {
    pub fn insert(&mut self, name: impl Into<String>, max_abs: f64, rms: f64, pass: bool) {
        let pass = pass && max_abs.is_finite() && rms.is_finite();
        self.0.insert(name.into(), Entry { max_abs, rms, pass });
    }

    /// Residual against an absolute tolerance.
    pub fn residual(&mut self, r: &ResidualReport, tol: f64) {
        self.insert(r.identity_name.clone(), r.max_abs, r.rms, r.passes(tol));
    }

    pub fn residual_as(&mut self, name: &str, r: &ResidualReport, tol: f64) {
        self.insert(name, r.max_abs, r.rms, r.passes(tol));
    }

    /// A pass/fail certificate without a residual (0 = pass, 1 = fail).
    pub fn flag(&mut self, name: &str, pass: bool) {
        let v = if pass { 0.0 } else { 1.0 };
        self.insert(name, v, v, pass);
    }

    pub fn merge(&mut self, other: Report) {
        self.0.extend(other.0);
    }

    pub fn failures(&self) -> Vec<String> {
        self.0.iter().filter(|(_, e)| !e.pass).map(|(k, _)| k.clone()).collect()
    }

    pub fn passes(&self) -> bool {
        self.0.values().all(|e| e.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("identity,max_abs,rms,pass\n");
        for (k, e) in &self.0 {
            s.push_str(&format!("{k},{:e},{:e},{}\n", e.max_abs, e.rms, e.pass));
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_schema_and_order() {
        let mut r = Report::default();
        r.insert("zeta", 1e-12, 1e-13, true);
        r.insert("alpha", f64::NAN, 0.0, true);
        let v: serde_json::Value = serde_json::from_str(&r.to_json()).unwrap();
        let obj = v.as_object().unwrap();
        assert_eq!(obj.keys().collect::<Vec<_>>(), ["alpha", "zeta"]);
        assert!(obj["alpha"]["max_abs"].is_null());
        assert_eq!(obj["alpha"]["pass"], false);
        assert_eq!(obj["zeta"]["pass"], true);
        assert_eq!(r.failures(), ["alpha"]);
    }

    #[test]
    fn csv_form() {
        let mut r = Report::default();
        r.flag("degree_audit", true);
        assert_eq!(r.to_csv(), "identity,max_abs,rms,pass\ndegree_audit,0e0,0e0,true\n");
    }
}
