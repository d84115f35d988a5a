//! Serialization of results: JSON reports and trajectory CSV.
//!
//! Every real is written as `{:.16e}` (17 significant digits), which
//! round-trips and is byte-stable across runs.

use std::io::{self, Write};

use serde::Serialize;
use serde_json::ser::Formatter;
use serde_json::{json, Map, Value};

use crate::admissibility::AdmissibilityDecision;
use crate::coefficients::{CouplingVector, RestrictedCoupling};
use crate::collisions::CollisionReport;
use crate::constants::{ConservedReport, Drift};
use crate::kinematics::{SystemState, Trajectory};

pub fn fmt_real(x: f64) -> String {
    format!("{x:.16e}")
}

struct RealFormatter;

impl Formatter for RealFormatter {
    fn write_f64<W: ?Sized + Write>(&mut self, writer: &mut W, value: f64) -> io::Result<()> {
        if value.is_finite() {
            write!(writer, "{value:.16e}")
        } else {
            writer.write_all(b"null")
        }
    }

    fn write_f32<W: ?Sized + Write>(&mut self, writer: &mut W, value: f32) -> io::Result<()> {
        self.write_f64(writer, value as f64)
    }
}

/// Compact JSON with fixed-width reals, followed by a newline.
pub fn to_json<T: Serialize + ?Sized>(value: &T) -> String {
    let mut buf = Vec::new();
    let mut ser = serde_json::Serializer::with_formatter(&mut buf, RealFormatter);
    value
        .serialize(&mut ser)
        .expect("serializing to memory cannot fail");
    buf.push(b'\n');
    String::from_utf8(buf).expect("serde_json emits UTF-8")
}

pub fn kappa_map(couplings: &CouplingVector) -> Value {
    let mut map = Map::new();
    for (i, k) in couplings.as_slice().iter().enumerate() {
        map.insert((i + 1).to_string(), json!(k));
    }
    Value::Object(map)
}

pub fn decision_json(decision: &AdmissibilityDecision) -> Value {
    serde_json::to_value(decision).expect("decision is plain data")
}

pub fn coefficients_json(
    n_bodies: usize,
    p: i64,
    couplings: &CouplingVector,
    residual: [f64; 2],
    det_mt: f64,
) -> Value {
    json!({
        "N": n_bodies,
        "p": p,
        "kappa": kappa_map(couplings),
        "residual": residual,
        "det_Mt": det_mt,
    })
}

pub fn restricted_json(
    n_bodies: usize,
    p: i64,
    decision: &AdmissibilityDecision,
    coupling: &RestrictedCoupling,
    residual: [f64; 2],
) -> Value {
    json!({
        "N": n_bodies,
        "p": p,
        "restricted_case": decision.restricted_case,
        "kappa_o": coupling.kappa_o,
        "kappa_e": coupling.kappa_e,
        "kappa": kappa_map(&coupling.expand(n_bodies)),
        "residual": residual,
    })
}

fn drift_json(d: &Drift) -> Value {
    json!({
        "g": d.first_moment,
        "c": d.angular_momentum,
        "I": d.moment_of_inertia,
        "K": d.kinetic,
        "V": d.potential,
        "E": d.energy,
    })
}

pub fn constants_json(report: &ConservedReport) -> Value {
    let mut v = json!({
        "g": report.first_moment.to_array(),
        "c": report.angular_momentum,
        "I": report.moment_of_inertia,
        "K": report.kinetic,
        "V": report.potential,
    });
    if let Some(d) = &report.drift {
        v["drift"] = drift_json(d);
    }
    if let Some(d) = &report.relative_drift() {
        v["relative_drift"] = drift_json(d);
    }
    v
}

pub fn collisions_json(report: &CollisionReport) -> Value {
    let ratios: Vec<Value> = report
        .ratios
        .iter()
        .map(|r| json!({ "k": r.k, "ratio": r.ratio }))
        .collect();
    let witnesses: Vec<Value> = report
        .witnesses
        .iter()
        .map(|w| {
            json!({
                "k": w.k,
                "t": w.t_star,
                "bodies": [w.bodies.0, w.bodies.1],
                "point": w.point.to_array(),
                "distance": w.min_distance,
            })
        })
        .collect();
    json!({
        "collides": report.collides,
        "suspect": report.suspect,
        "ratios": ratios,
        "witnesses": witnesses,
    })
}

pub fn state_json(state: &SystemState) -> Value {
    let arr = |v: &[crate::vec2::Vec2]| v.iter().map(|x| x.to_array()).collect::<Vec<_>>();
    json!({
        "t": state.t,
        "positions": arr(&state.positions),
        "velocities": arr(&state.velocities),
    })
}

/// `t,body,x,y,vx,vy`, one row per sample and body, keeping every
/// `stride`-th sample.
pub fn write_trajectory_csv<W: Write + ?Sized>(
    out: &mut W,
    traj: &Trajectory,
    stride: usize,
) -> io::Result<()> {
    writeln!(out, "t,body,x,y,vx,vy")?;
    for s in traj.samples.iter().step_by(stride.max(1)) {
        let t = fmt_real(s.t);
        for (k, (q, v)) in s.positions.iter().zip(&s.velocities).enumerate() {
            writeln!(
                out,
                "{t},{k},{},{},{},{}",
                fmt_real(q.x),
                fmt_real(q.y),
                fmt_real(v.x),
                fmt_real(v.y)
            )?;
        }
    }
    Ok(())
}

pub fn trajectory_json(traj: &Trajectory, stride: usize) -> Value {
    let samples: Vec<Value> = traj
        .samples
        .iter()
        .step_by(stride.max(1))
        .map(state_json)
        .collect();
    json!({ "samples": samples })
}
