//! Result records and their CSV row form.

use std::fmt;
use std::io::Write;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::SampleDesign;

/// Slack allowed between the two ends of an interval.
pub const INTERVAL_SLACK: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertifiedInterval {
    pub lo: f64,
    pub hi: f64,
    pub lo_method: String,
    pub hi_method: String,
}

impl CertifiedInterval {
    pub fn new(lo: f64, hi: f64, lo_method: impl Into<String>, hi_method: impl Into<String>) -> Result<Self> {
        if !(lo >= 0.0) || !(lo <= hi + INTERVAL_SLACK) {
            return Err(Error::Solver(format!("invalid certified interval [{lo}, {hi}]")));
        }
        Ok(Self { lo: lo.min(hi), hi, lo_method: lo_method.into(), hi_method: hi_method.into() })
    }

    pub fn exact(value: f64, method: impl Into<String>) -> Result<Self> {
        let method = method.into();
        Self::new(value.max(0.0), value.max(0.0), method.clone(), method)
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.lo + self.hi)
    }

    pub fn method(&self) -> String {
        if self.lo_method == self.hi_method {
            self.lo_method.clone()
        } else {
            format!("{}|{}", self.lo_method, self.hi_method)
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Quantity {
    /// sampling number
    G,
    /// diameter of information
    G0,
    /// entropy number
    Eps,
    /// inner entropy number
    Phi,
    /// Kolmogorov width upper bound
    DUb,
}

impl Quantity {
    pub const ALL: [Quantity; 5] = [Quantity::G, Quantity::G0, Quantity::Eps, Quantity::Phi, Quantity::DUb];

    pub fn tag(self) -> &'static str {
        match self {
            Quantity::G => "g",
            Quantity::G0 => "g0",
            Quantity::Eps => "eps",
            Quantity::Phi => "phi",
            Quantity::DUb => "d_ub",
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.tag())
    }
}

impl FromStr for Quantity {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Quantity::ALL
            .into_iter()
            .find(|q| q.tag() == s.trim())
            .ok_or_else(|| Error::Parameter(format!("unknown quantity {s:?} (expected g, g0, eps, phi, d_ub)")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantityResult {
    pub quantity: Quantity,
    pub n: usize,
    pub value: CertifiedInterval,
    pub best_design: Option<SampleDesign>,
    pub method: String,
    pub runtime_ms: u128,
    pub seed: u64,
}

impl QuantityResult {
    pub fn check(&self) -> Result<()> {
        let needs_design = matches!(self.quantity, Quantity::G | Quantity::G0);
        if needs_design != self.best_design.is_some() {
            return Err(Error::Parameter(format!("{} result must {}carry a design", self.quantity, if needs_design { "" } else { "not " })));
        }
        if self.value.lo > self.value.hi + INTERVAL_SLACK {
            return Err(Error::Solver(format!("{} interval is inverted", self.quantity)));
        }
        Ok(())
    }
}

pub const CSV_HEADER: [&str; 9] = ["class_id", "quantity", "n", "lo", "hi", "method", "design", "seed", "runtime_ms"];

/// Formats with 17 significant digits.
pub fn full_precision(x: f64) -> String {
    format!("{x:.16e}")
}

/// Writes result rows; `with_timing = false` leaves `runtime_ms` empty so
/// output is byte-identical across runs.
pub fn write_csv<W: Write>(out: W, rows: &[(String, QuantityResult)], with_timing: bool) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    let io = |e: csv::Error| Error::Parameter(format!("CSV write failed: {e}"));
    w.write_record(CSV_HEADER).map_err(io)?;
    for (class_id, r) in rows {
        r.check()?;
        let design = r.best_design.as_ref().map(|d| d.to_string()).unwrap_or_default();
        let timing = if with_timing { r.runtime_ms.to_string() } else { String::new() };
        w.write_record([
            class_id.as_str(),
            r.quantity.tag(),
            &r.n.to_string(),
            &full_precision(r.value.lo),
            &full_precision(r.value.hi),
            &r.method,
            &design,
            &r.seed.to_string(),
            &timing,
        ])
        .map_err(io)?;
    }
    w.flush().map_err(|e| Error::Parameter(format!("CSV flush failed: {e}")))?;
    Ok(())
}

/// One parsed CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct CsvRow {
    pub class_id: String,
    pub quantity: Quantity,
    pub n: usize,
    pub lo: f64,
    pub hi: f64,
    pub method: String,
    pub design: String,
    pub seed: u64,
}

pub fn read_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let bad = |e: &dyn fmt::Display| Error::Parameter(format!("malformed CSV: {e}"));
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec.map_err(|e| bad(&e))?;
        let field = |i: usize| rec.get(i).ok_or_else(|| bad(&format!("missing column {i}")));
        rows.push(CsvRow {
            class_id: field(0)?.to_string(),
            quantity: field(1)?.parse()?,
            n: field(2)?.parse().map_err(|e| bad(&e))?,
            lo: field(3)?.parse().map_err(|e| bad(&e))?,
            hi: field(4)?.parse().map_err(|e| bad(&e))?,
            method: field(5)?.to_string(),
            design: field(6)?.to_string(),
            seed: field(7)?.parse().map_err(|e| bad(&e))?,
        });
    }
    Ok(rows)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_invariants() {
        assert!(CertifiedInterval::new(1.0, 0.5, "a", "b").is_err());
        assert!(CertifiedInterval::new(-0.1, 0.5, "a", "b").is_err());
        let i = CertifiedInterval::new(0.5, 1.0, "pack", "cover").unwrap();
        assert_eq!(i.midpoint(), 0.75);
        assert_eq!(i.method(), "pack|cover");
    }

    #[test]
    fn csv_round_trip_keeps_full_precision() {
        let r = QuantityResult {
            quantity: Quantity::G,
            n: 2,
            value: CertifiedInterval::exact(1.0 / 3.0, "exhaustive").unwrap(),
            best_design: Some(SampleDesign::new(vec![0, 3], 4).unwrap()),
            method: "exhaustive".into(),
            runtime_ms: 12,
            seed: 7,
        };
        let mut buf = Vec::new();
        write_csv(&mut buf, &[("c".into(), r)], false).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let rows = read_csv(&text).unwrap();
        assert_eq!(rows[0].lo, 1.0 / 3.0);
        assert_eq!(SampleDesign::parse(&rows[0].design, 4).unwrap().indices(), &[0, 3]);
        assert!(text.lines().nth(1).unwrap().ends_with(",7,"));
    }

    #[test]
    fn design_presence_is_checked() {
        let r = QuantityResult {
            quantity: Quantity::Eps,
            n: 0,
            value: CertifiedInterval::exact(1.0, "x").unwrap(),
            best_design: Some(SampleDesign::empty()),
            method: "x".into(),
            runtime_ms: 0,
            seed: 0,
        };
        assert!(r.check().is_err());
        assert_eq!("d_ub".parse::<Quantity>().unwrap(), Quantity::DUb);
        assert!("zz".parse::<Quantity>().is_err());
    }
}
