//! JSON documents for instances and solver reports.
//!
//! Floats are written with shortest round-trip formatting and parsed with
//! correct rounding, so a serialize/parse cycle is bit-exact.

use serde::{Deserialize, Serialize};

use crate::dual::{mode_index, SolveReport};
use crate::error::{Error, Result};
use crate::oracle::{instance_diagonals, BruteForceSolution, LpSolution};
use crate::problem::{BitVector, InstanceMeta, QcqpInstance, QuadraticForm};
use crate::simplex::LpStatus;

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FormDoc {
    #[serde(rename = "A")]
    a: Vec<Vec<f64>>,
    c: Vec<f64>,
    d: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceDoc {
    n: usize,
    objective: FormDoc,
    constraints: Vec<FormDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    meta: Option<InstanceMeta>,
}

impl FormDoc {
    fn from_form(f: &QuadraticForm) -> Self {
        Self {
            a: f.a().chunks(f.n()).map(<[f64]>::to_vec).collect(),
            c: f.c().to_vec(),
            d: f.d(),
        }
    }

    fn into_form(self, n: usize, path: &str) -> Result<QuadraticForm> {
        if self.a.len() != n {
            return Err(Error::InvalidDocument(format!(
                "{path}.A has {} rows, expected {n}",
                self.a.len()
            )));
        }
        if let Some((i, row)) = self.a.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::InvalidDocument(format!(
                "{path}.A row {i} has {} entries, expected {n}",
                row.len()
            )));
        }
        if self.c.len() != n {
            return Err(Error::InvalidDocument(format!(
                "{path}.c has {} entries, expected {n}",
                self.c.len()
            )));
        }
        QuadraticForm::new(n, self.a.concat(), self.c, self.d)
    }
}

fn parse_error(e: serde_json::Error) -> Error {
    Error::Parse {
        line: e.line(),
        column: e.column(),
        message: e.to_string(),
    }
}

pub fn serialize_instance(inst: &QcqpInstance) -> String {
    let doc = InstanceDoc {
        n: inst.n(),
        objective: FormDoc::from_form(inst.objective()),
        constraints: inst.constraints().iter().map(FormDoc::from_form).collect(),
        meta: inst.meta().cloned(),
    };
    let mut text = serde_json::to_string_pretty(&doc).expect("instance documents serialize");
    text.push('\n');
    text
}

pub fn parse_instance(text: &str) -> Result<QcqpInstance> {
    let doc: InstanceDoc = serde_json::from_str(text).map_err(parse_error)?;
    let n = doc.n;
    let objective = doc.objective.into_form(n, "objective")?;
    let constraints = doc
        .constraints
        .into_iter()
        .enumerate()
        .map(|(m, f)| f.into_form(n, &format!("constraints[{m}]")))
        .collect::<Result<Vec<_>>>()?;
    let inst = QcqpInstance::new(objective, constraints)?;
    Ok(match doc.meta {
        Some(meta) => inst.with_meta(meta),
        None => inst,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportSource {
    Quantum,
    Lp,
    Brute,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ReportStatus {
    Converged,
    NotConverged,
    Optimal,
    Infeasible,
    Unbounded,
}

/// Shared schema for quantum solves and oracle runs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub source: ReportSource,
    pub status: ReportStatus,
    pub n: usize,
    pub m: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pmf: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub objective: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub constraint_values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_bitstring: Option<BitVector>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mode_deterministic_feasible: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outer_iterations: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub theta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub feasible_count: Option<usize>,
}

impl ReportDocument {
    fn empty(source: ReportSource, status: ReportStatus, inst: &QcqpInstance) -> Self {
        Self {
            source,
            status,
            n: inst.n(),
            m: inst.m(),
            pmf: None,
            lambda: None,
            objective: None,
            constraint_values: None,
            mode_bitstring: None,
            mode_deterministic_feasible: None,
            outer_iterations: None,
            theta: None,
            feasible_count: None,
        }
    }

    pub fn from_solve(inst: &QcqpInstance, report: &SolveReport) -> Self {
        let status = if report.converged {
            ReportStatus::Converged
        } else {
            ReportStatus::NotConverged
        };
        Self {
            pmf: Some(report.pmf.clone()),
            lambda: Some(report.lambda.clone()),
            objective: Some(report.objective),
            constraint_values: Some(report.constraint_values.clone()),
            mode_bitstring: Some(report.mode_bitstring.clone()),
            mode_deterministic_feasible: Some(report.mode_deterministic_feasible),
            outer_iterations: Some(report.outer_iterations()),
            theta: Some(report.theta.clone()),
            ..Self::empty(ReportSource::Quantum, status, inst)
        }
    }

    pub fn from_lp(inst: &QcqpInstance, lp: &LpSolution) -> Result<Self> {
        let status = match lp.status {
            LpStatus::Optimal => ReportStatus::Optimal,
            LpStatus::Infeasible => ReportStatus::Infeasible,
            LpStatus::Unbounded => ReportStatus::Unbounded,
        };
        let mut doc = Self::empty(ReportSource::Lp, status, inst);
        if let Some(pmf) = &lp.pmf {
            let (_, constraints) = instance_diagonals(inst)?;
            let mode = BitVector::from_index(mode_index(pmf), inst.n());
            doc.constraint_values = Some(
                constraints
                    .iter()
                    .map(|c| c.expectation_under(pmf))
                    .collect(),
            );
            doc.mode_deterministic_feasible = Some(inst.is_feasible(&mode)?);
            doc.mode_bitstring = Some(mode);
            doc.pmf = Some(pmf.clone());
            doc.lambda = lp.duals.clone();
            doc.objective = lp.objective;
        }
        Ok(doc)
    }

    pub fn from_brute(inst: &QcqpInstance, bf: &BruteForceSolution) -> Result<Self> {
        let status = if bf.best.is_some() {
            ReportStatus::Optimal
        } else {
            ReportStatus::Infeasible
        };
        let mut doc = Self::empty(ReportSource::Brute, status, inst);
        doc.feasible_count = Some(bf.feasible_count);
        if let Some(best) = &bf.best {
            let mut pmf = vec![0.0; 1 << inst.n()];
            pmf[best.to_index()] = 1.0;
            doc.pmf = Some(pmf);
            doc.objective = bf.best_value;
            doc.constraint_values = Some(
                inst.constraints()
                    .iter()
                    .map(|f| f.eval(best))
                    .collect::<Result<Vec<_>>>()?,
            );
            doc.mode_bitstring = Some(best.clone());
            doc.mode_deterministic_feasible = Some(true);
        }
        Ok(doc)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(self).expect("report documents serialize");
        text.push('\n');
        text
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(parse_error)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generate::gen_instance;

    #[test]
    fn round_trip_is_bit_exact() {
        let inst = gen_instance(3, 2, 17, true).unwrap();
        let text = serialize_instance(&inst);
        let back = parse_instance(&text).unwrap();
        assert_eq!(back, inst);
        for (x, y) in back.objective().a().iter().zip(inst.objective().a()) {
            assert_eq!(x.to_bits(), y.to_bits());
        }
    }

    #[test]
    fn empty_constraint_list_is_valid() {
        let text =
            r#"{"n": 1, "objective": {"A": [[1.5]], "c": [-2.0], "d": 0.25}, "constraints": []}"#;
        let inst = parse_instance(text).unwrap();
        assert_eq!(inst.m(), 0);
        assert_eq!(inst.objective().a(), &[1.5]);
        assert!(inst.meta().is_none());
    }

    #[test]
    fn mismatched_dimensions_are_rejected() {
        let bad_rows =
            r#"{"n": 2, "objective": {"A": [[1, 2]], "c": [0, 0], "d": 0}, "constraints": []}"#;
        assert!(matches!(
            parse_instance(bad_rows),
            Err(Error::InvalidDocument(_))
        ));
        let bad_c = r#"{"n": 1, "objective": {"A": [[1]], "c": [0], "d": 0},
            "constraints": [{"A": [[1]], "c": [0, 1], "d": 0}]}"#;
        let err = parse_instance(bad_c).unwrap_err();
        assert!(err.to_string().contains("constraints[0].c"), "{err}");
    }

    #[test]
    fn malformed_json_reports_location() {
        let text = "{\n  \"n\": 2,\n  \"objective\": oops\n}";
        match parse_instance(text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("unexpected {other:?}"),
        }
    }
}
