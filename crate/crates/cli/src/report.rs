//! Output files: provenance stamps and the CSV layouts.

use std::io::Write;

use netlearn::rates::RateEstimate;
use netlearn::robustness::{ExperimentResult, SweepRow};
use serde::Serialize;
use serde_json::Value;
use sha2::{Digest, Sha256};

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Provenance {
    pub version: String,
    pub seed: u64,
    pub config_hash: String,
}

impl Provenance {
    /// Hashes the canonical JSON of `config`.
    pub fn new<C: Serialize>(seed: u64, config: &C) -> Self {
        let json = serde_json::to_vec(config).expect("config serializes");
        let digest = Sha256::digest(&json);
        let config_hash = digest[..8].iter().map(|b| format!("{b:02x}")).collect();
        Provenance { version: VERSION.to_string(), seed, config_hash }
    }

    pub fn comment(&self) -> String {
        format!("netlearn {} seed={} config={}", self.version, self.seed, self.config_hash)
    }

    /// `value` with a `provenance` member added; `value` must be an object.
    pub fn stamp(&self, value: Value) -> Value {
        let mut v = value;
        if let Value::Object(map) = &mut v {
            map.insert("provenance".into(), serde_json::to_value(self).expect("provenance serializes"));
        }
        v
    }
}

fn fmt_f(x: f64) -> String {
    format!("{x}")
}

fn writer<'a>(out: &'a mut Vec<u8>, prov: &Provenance) -> csv::Writer<&'a mut Vec<u8>> {
    writeln!(out, "# {}", prov.comment()).expect("write to memory");
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out)
}

pub struct RateRow {
    /// A vertex id, or `all` for the graph-level rate.
    pub vertex: String,
    pub estimate: RateEstimate,
}

pub fn rate_csv(rows: &[RateRow], q: f64, prov: &Provenance) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut w = writer(&mut out, prov);
        w.write_record(["vertex", "method", "mean", "half_width", "samples", "q", "seed"]).unwrap();
        for r in rows {
            let e = &r.estimate;
            w.write_record([
                r.vertex.clone(),
                e.method.to_string(),
                fmt_f(e.mean),
                fmt_f(e.half_width),
                e.samples.to_string(),
                fmt_f(q),
                prov.seed.to_string(),
            ])
            .unwrap();
        }
        w.flush().unwrap();
    }
    out
}

pub struct RobustnessRow {
    pub family: String,
    pub params: String,
    pub vertex: String,
    pub result: ExperimentResult,
}

pub fn robustness_csv(rows: &[RobustnessRow], prov: &Provenance) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut w = writer(&mut out, prov);
        w.write_record(["family", "params", "q", "vertex", "before", "after", "bound", "trials", "seed"])
            .unwrap();
        for r in rows {
            let x = &r.result;
            w.write_record([
                r.family.clone(),
                r.params.clone(),
                fmt_f(x.params.q),
                r.vertex.clone(),
                fmt_f(x.before.mean),
                fmt_f(x.after.mean),
                fmt_f(x.bound),
                x.params.trials.to_string(),
                prov.seed.to_string(),
            ])
            .unwrap();
        }
        w.flush().unwrap();
    }
    out
}

pub fn sweep_csv(rows: &[SweepRow], trials: usize, prov: &Provenance) -> Vec<u8> {
    let mut out = Vec::new();
    {
        let mut w = writer(&mut out, prov);
        w.write_record(["family", "params", "q", "vertex", "rate", "half_width", "method", "trials", "seed"])
            .unwrap();
        for r in rows {
            w.write_record([
                r.family.clone(),
                r.params.clone(),
                fmt_f(r.q),
                r.vertex.to_string(),
                fmt_f(r.rate.mean),
                fmt_f(r.rate.half_width),
                r.rate.method.to_string(),
                trials.to_string(),
                prov.seed.to_string(),
            ])
            .unwrap();
        }
        w.flush().unwrap();
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use netlearn::rates::Method;

    fn prov() -> Provenance {
        Provenance { version: "0.1.0".into(), seed: 7, config_hash: "00ff".into() }
    }

    #[test]
    fn rate_csv_golden() {
        let rows = vec![
            RateRow { vertex: "0".into(), estimate: RateEstimate::exact(0.7, 2) },
            RateRow {
                vertex: "all".into(),
                estimate: RateEstimate { mean: 0.5, half_width: 0.25, samples: 10, method: Method::McFull },
            },
        ];
        let s = String::from_utf8(rate_csv(&rows, 0.7, &prov())).unwrap();
        assert_eq!(
            s,
            "# netlearn 0.1.0 seed=7 config=00ff\n\
             vertex,method,mean,half_width,samples,q,seed\n\
             0,exact-enum,0.7,0,2,0.7,7\n\
             all,mc-full,0.5,0.25,10,0.7,7\n"
        );
    }

    #[test]
    fn hash_depends_on_config() {
        let a = Provenance::new(1, &serde_json::json!({"q": 0.7}));
        let b = Provenance::new(1, &serde_json::json!({"q": 0.8}));
        assert_ne!(a.config_hash, b.config_hash);
        assert_eq!(a.config_hash.len(), 16);
        assert_eq!(a, Provenance::new(1, &serde_json::json!({"q": 0.7})));
    }

    #[test]
    fn stamp_adds_member() {
        let v = prov().stamp(serde_json::json!({"n": 1}));
        assert_eq!(v["provenance"]["seed"], 7);
        assert_eq!(v["n"], 1);
    }
}
