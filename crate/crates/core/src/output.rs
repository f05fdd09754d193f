//! Tabular and JSON rendering of scenario runs.

use std::io::{Read, Write};

use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::linalg::norm_sq;
use crate::scenarios::{Convention, RunSummary, ScenarioRun, SweepPoint};

pub const STANDARD_COLUMNS: [&str; 21] = [
    "s", "re_w", "im_w", "re_z", "im_z", "re_E1", "im_E1", "re_E2", "im_E2", "abs_c1", "abs_c2", "abs_d1", "abs_d2",
    "abs_e1", "abs_e2", "alpha", "norm_sq", "ratio_c21", "ratio_d21", "crit_12", "crit_21",
];

/// `⟨r_a, r_a⟩` and its phase-compensated counterpart `|e^{−∫A_aa}|²⟨r_a, r_a⟩`.
pub const NORM_COLUMNS: [&str; 4] = ["norm_r1", "norm_r2", "comp_norm_r1", "comp_norm_r2"];

const EXTRA_COLUMNS: [&str; 6] = ["pop1", "pop2", "re_d1", "im_d1", "re_d2", "im_d2"];

pub fn is_known_column(name: &str) -> bool {
    STANDARD_COLUMNS.contains(&name) || NORM_COLUMNS.contains(&name) || EXTRA_COLUMNS.contains(&name)
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutputTable {
    pub header: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

fn column_value(run: &ScenarioRun, k: usize, name: &str) -> f64 {
    let traj = &run.trajectory;
    let rec = &traj.records[k];
    let frame = traj.frame(k);
    let cfg = &run.config;
    let (want_c, want_d) = (cfg.wants(Convention::C), cfg.wants(Convention::D));
    let e = if cfg.wants(Convention::E) { rec.e } else { None };
    let crit = traj.criteria[k];
    let gated = |on: bool, x: f64| if on { x } else { f64::NAN };
    let comp = |a: usize| (-2.0 * traj.track.accumulator(k).int_a[a].re).exp() * norm_sq(&frame.r[a]);
    match name {
        "s" => rec.s,
        "re_w" => frame.pair.w.re,
        "im_w" => frame.pair.w.im,
        "re_z" => frame.pair.z.re,
        "im_z" => frame.pair.z.im,
        "re_E1" => frame.e[0].re,
        "im_E1" => frame.e[0].im,
        "re_E2" => frame.e[1].re,
        "im_E2" => frame.e[1].im,
        "abs_c1" => gated(want_c, rec.c[0].norm()),
        "abs_c2" => gated(want_c, rec.c[1].norm()),
        "abs_d1" => gated(want_d, rec.d[0].norm()),
        "abs_d2" => gated(want_d, rec.d[1].norm()),
        "abs_e1" => e.map_or(f64::NAN, |e| e[0].norm()),
        "abs_e2" => e.map_or(f64::NAN, |e| e[1].norm()),
        "alpha" => rec.alpha,
        "norm_sq" => rec.norm_sq,
        "ratio_c21" => gated(want_c, rec.c[1].norm() / rec.c[0].norm()),
        "ratio_d21" => gated(want_d, rec.d[1].norm() / rec.d[0].norm()),
        "crit_12" => crit.map_or(f64::NAN, |c| c.crit[0]),
        "crit_21" => crit.map_or(f64::NAN, |c| c.crit[1]),
        "norm_r1" => norm_sq(&frame.r[0]),
        "norm_r2" => norm_sq(&frame.r[1]),
        "comp_norm_r1" => comp(0),
        "comp_norm_r2" => comp(1),
        "pop1" | "pop2" => crate::tracking::consistent_population(rec)
            .map_or(f64::NAN, |p| p[if name == "pop1" { 0 } else { 1 }]),
        "re_d1" => gated(want_d, rec.d[0].re),
        "im_d1" => gated(want_d, rec.d[0].im),
        "re_d2" => gated(want_d, rec.d[1].re),
        "im_d2" => gated(want_d, rec.d[1].im),
        _ => f64::NAN,
    }
}

impl OutputTable {
    pub fn from_run(run: &ScenarioRun) -> Self {
        let header = run.config.output_columns.clone();
        let rows = (0..run.trajectory.records.len())
            .map(|k| header.iter().map(|c| column_value(run, k, c)).collect())
            .collect();
        OutputTable { header, rows }
    }

    pub fn column(&self, name: &str) -> Option<Vec<f64>> {
        let i = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| r[i]).collect())
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
        let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
        w.write_record(&self.header).map_err(io)?;
        for row in &self.rows {
            w.write_record(row.iter().map(|&x| format_value(x))).map_err(io)?;
        }
        w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("CSV is ASCII")
    }

    pub fn read_csv<R: Read>(input: R) -> Result<Self> {
        let mut r = csv::Reader::from_reader(input);
        let bad = |e: csv::Error| Error::Config(format!("reading CSV: {e}"));
        let header: Vec<String> = r.headers().map_err(bad)?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            let rec = rec.map_err(bad)?;
            let row = rec
                .iter()
                .map(|x| x.parse::<f64>().map_err(|_| Error::Config(format!("reading CSV: bad number '{x}'"))))
                .collect::<Result<Vec<f64>>>()?;
            rows.push(row);
        }
        Ok(OutputTable { header, rows })
    }

    /// Rows as JSON arrays, absent values as `null`.
    pub fn to_json(&self) -> Value {
        json!({
            "header": self.header,
            "rows": self.rows.iter().map(|r| r.iter().map(|&x| json_number(x)).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// 17 significant digits, `nan` for absent values.
pub fn format_value(x: f64) -> String {
    if x.is_nan() {
        "nan".to_string()
    } else {
        format!("{x:.16e}")
    }
}

fn json_number(x: f64) -> Value {
    serde_json::Number::from_f64(x).map_or(Value::Null, Value::Number)
}

fn complex_json(z: crate::linalg::C64) -> Value {
    json!([json_number(z.re), json_number(z.im)])
}

pub fn summary_json(run: &ScenarioRun) -> Value {
    let d = &run.diagnostics;
    let a = &run.artifacts;
    let summary = RunSummary::of(run);
    json!({
        "scenario": run.config.name,
        "description": run.config.description,
        "steps": run.config.steps,
        "duration": run.config.duration,
        "flags": a.flags(),
        "initial_branch": a.initial_branch,
        "max_ratio_c": json_number(a.max_ratio_c),
        "max_ratio_d": json_number(a.max_ratio_d),
        "final_ratio_d": json_number(a.final_ratio_d),
        "final_abs_d": summary.final_abs_d.map(json_number),
        "flip": run.flip.map(|f| f.as_str()),
        "holonomy": run.holonomy.map(|h| json!({
            "factors": h.factors.map(complex_json),
            "nu": h.nu.map(complex_json),
            "exchanged": h.exchanged,
            "overlaps": h.overlaps.map(json_number),
        })),
        "e_absent": run.trajectory.e_absent.as_ref().map(|e| e.code()),
        "diagnostics": {
            "max_eta_norm_error": json_number(d.max_eta_norm_error),
            "min_population_slack": json_number(d.min_population_slack),
            "eta_residual": json_number(d.eta_residual),
            "max_hat_norm": json_number(d.max_hat_norm),
            "final_norm_sq": json_number(d.final_norm_sq),
        },
    })
}

pub fn run_json(run: &ScenarioRun) -> Value {
    let mut v = summary_json(run);
    v["table"] = OutputTable::from_run(run).to_json();
    v
}

pub fn sweep_json(points: &[SweepPoint]) -> Value {
    Value::Array(
        points
            .iter()
            .map(|p| match &p.outcome {
                Ok(s) => json!({
                    "parameter": p.parameter,
                    "value": json_number(p.value),
                    "flags": s.flags,
                    "final_abs_d": s.final_abs_d.map(json_number),
                    "final_ratio_d21": json_number(s.final_ratio_d21),
                    "flip": s.flip.map(|f| f.as_str()),
                    "holonomy": s.holonomy.map(|h| h.map(complex_json)),
                    "exchanged": s.exchanged,
                    "final_norm_sq": json_number(s.final_norm_sq),
                }),
                Err(e) => json!({
                    "parameter": p.parameter,
                    "value": json_number(p.value),
                    "error": e.code(),
                    "message": e.to_string(),
                }),
            })
            .collect(),
    )
}

pub const SWEEP_COLUMNS: [&str; 9] = [
    "parameter", "value", "status", "flags", "flip", "exchanged", "abs_d1", "abs_d2", "norm_sq",
];

pub fn write_sweep_csv<W: Write>(points: &[SweepPoint], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(out);
    let io = |e: csv::Error| Error::Config(format!("writing CSV: {e}"));
    w.write_record(SWEEP_COLUMNS).map_err(io)?;
    for p in points {
        let row = match &p.outcome {
            Ok(s) => vec![
                p.parameter.clone(),
                format_value(p.value),
                "ok".into(),
                s.flags.join(";"),
                s.flip.map_or("nan".into(), |f| f.to_string()),
                s.exchanged.map_or("nan".into(), |x| x.to_string()),
                format_value(s.final_abs_d[0]),
                format_value(s.final_abs_d[1]),
                format_value(s.final_norm_sq),
            ],
            Err(e) => vec![
                p.parameter.clone(),
                format_value(p.value),
                e.code().into(),
                String::new(),
                "nan".into(),
                "nan".into(),
                "nan".into(),
                "nan".into(),
                "nan".into(),
            ],
        };
        w.write_record(&row).map_err(io)?;
    }
    w.flush().map_err(|e| Error::Config(format!("writing CSV: {e}")))?;
    Ok(())
}
