//! CSV and JSON formats for fields, sweeps and descent traces.
//!
//! Numbers are written with Rust's shortest round-trip exponent format, so a
//! field read back from CSV is bit-identical to the one written.

use std::io::{Read, Write};

use serde::Serialize;

use crate::elliptic::{EllipticSolution, PhasePoint};
use crate::error::{Error, Result};
use crate::grid::{ConstraintKind, CylinderField, PeriodicGrid, VectorField};
use crate::minimize::Constraint;
use crate::relax::{closed_form_constant, PoincareResult};
use crate::scalar::{to_f64, Real};
use crate::vec3::Vec3;

pub const FIELD_HEADER: [&str; 4] = ["t", "x", "y", "z"];
pub const CYLINDER_HEADER: [&str; 5] = ["z", "t", "x", "y", "z_comp"];
pub const POINCARE_HEADER: [&str; 5] = ["kappa2", "c2_closed", "c2_numeric", "phi_kappa", "regime"];
pub const ELLIPTIC_HEADER: [&str; 5] = [
    "kappa2",
    "alpha",
    "E_complete",
    "energy_deg0",
    "energy_deg1",
];
pub const LANDSCAPE_HEADER: [&str; 6] = [
    "kappa2",
    "c2_kappa",
    "energy_normal",
    "energy_axisym_min",
    "energy_deg0",
    "energy_inplane_min",
];
pub const PHASE_HEADER: [&str; 4] = ["curve", "level", "x", "y"];

pub fn fmt_real<T: Real>(x: T) -> String {
    format!("{x:e}")
}

fn parse_real<T: Real>(s: &str, row: usize) -> Result<T> {
    s.trim()
        .parse::<T>()
        .map_err(|_| Error::Format(format!("row {row}: cannot parse '{s}' as a number")))
}

fn check_header(rdr: &mut csv::Reader<impl Read>, want: &[&str]) -> Result<()> {
    let got = rdr.headers()?;
    if got.iter().map(str::trim).ne(want.iter().copied()) {
        return Err(Error::Format(format!(
            "expected header {}, got {}",
            want.join(","),
            got.iter().collect::<Vec<_>>().join(",")
        )));
    }
    Ok(())
}

fn read_rows<T: Real>(r: impl Read, header: &[&str]) -> Result<Vec<Vec<T>>> {
    let mut rdr = csv::Reader::from_reader(r);
    check_header(&mut rdr, header)?;
    rdr.records()
        .enumerate()
        .map(|(i, rec)| {
            let rec = rec?;
            if rec.len() != header.len() {
                return Err(Error::Format(format!(
                    "row {}: expected {} columns",
                    i + 1,
                    header.len()
                )));
            }
            rec.iter().map(|s| parse_real(s, i + 1)).collect()
        })
        .collect()
}

/// `t,x,y,z`, one row per node.
pub fn write_field_csv<T: Real>(w: impl Write, field: &VectorField<T>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(FIELD_HEADER)?;
    for (&t, v) in field.grid().nodes().iter().zip(field.values()) {
        wtr.write_record([fmt_real(t), fmt_real(v.x), fmt_real(v.y), fmt_real(v.z)])?;
    }
    wtr.flush()?;
    Ok(())
}

fn check_nodes<T: Real>(grid: &PeriodicGrid<T>, ts: impl Iterator<Item = T>) -> Result<()> {
    let tol = 1e-9;
    for (i, (t, &want)) in ts.zip(grid.nodes()).enumerate() {
        if (to_f64(t) - to_f64(want)).abs() > tol {
            return Err(Error::Format(format!(
                "row {}: t = {t} is not grid node {want}",
                i + 1
            )));
        }
    }
    Ok(())
}

/// Inverse of [`write_field_csv`]; the grid is rebuilt from the row count.
pub fn read_field_csv<T: Real>(r: impl Read, kind: ConstraintKind) -> Result<VectorField<T>> {
    let rows = read_rows::<T>(r, &FIELD_HEADER)?;
    let grid = PeriodicGrid::new(rows.len())?;
    check_nodes(&grid, rows.iter().map(|r| r[0]))?;
    let values = rows.iter().map(|r| Vec3::new(r[1], r[2], r[3])).collect();
    VectorField::new(grid, values, kind)
}

/// `z,t,x,y,z_comp`, rings in order of increasing `z`.
pub fn write_cylinder_csv<T: Real>(w: impl Write, field: &CylinderField<T>) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(CYLINDER_HEADER)?;
    let nodes = field.grid().nodes();
    for (&z, ring) in field.z_nodes().iter().zip(field.rings()) {
        for (&t, v) in nodes.iter().zip(ring.values()) {
            wtr.write_record([
                fmt_real(z),
                fmt_real(t),
                fmt_real(v.x),
                fmt_real(v.y),
                fmt_real(v.z),
            ])?;
        }
    }
    wtr.flush()?;
    Ok(())
}

pub fn read_cylinder_csv<T: Real>(r: impl Read, kind: ConstraintKind) -> Result<CylinderField<T>> {
    let rows = read_rows::<T>(r, &CYLINDER_HEADER)?;
    let first_z = rows
        .first()
        .map(|r| r[0])
        .ok_or_else(|| Error::Format("empty cylinder file".into()))?;
    let n = rows.iter().take_while(|r| r[0] == first_z).count();
    if rows.len() % n != 0 {
        return Err(Error::Format(format!(
            "{} rows do not split into rings of {n}",
            rows.len()
        )));
    }
    let grid = PeriodicGrid::new(n)?;
    let rings = rows
        .chunks(n)
        .map(|chunk| {
            if chunk.iter().any(|r| r[0] != chunk[0][0]) {
                return Err(Error::Format("ring rows must share one z value".into()));
            }
            check_nodes(&grid, chunk.iter().map(|r| r[1]))?;
            VectorField::new(
                grid.clone(),
                chunk.iter().map(|r| Vec3::new(r[2], r[3], r[4])).collect(),
                kind,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    CylinderField::new(rings)
}

pub fn write_poincare_csv<T: Real>(w: impl Write, rows: &[PoincareResult<T>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(POINCARE_HEADER)?;
    for r in rows {
        let numeric = r.c2_numeric.map(fmt_real).unwrap_or_default();
        wtr.write_record([
            fmt_real(r.kappa2),
            fmt_real(r.c2_closed),
            numeric,
            fmt_real(r.phi_kappa),
            r.regime.as_str().to_string(),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_elliptic_csv<T: Real>(w: impl Write, rows: &[EllipticSolution<T>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(ELLIPTIC_HEADER)?;
    for r in rows {
        wtr.write_record([
            fmt_real(r.kappa2),
            fmt_real(r.alpha),
            fmt_real(r.e_complete),
            fmt_real(r.energy_deg0),
            fmt_real(r.energy_deg1()),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Known minimal energies on the circle at one anisotropy value.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct LandscapeRow<T> {
    pub kappa2: T,
    pub c2_kappa: T,
    /// `F(±n) = 2π`.
    pub energy_normal: T,
    /// Minimum over axially symmetric fields: `2πκ²` for `κ² ≤ 1`, else `2π`.
    pub energy_axisym_min: T,
    pub energy_deg0: T,
    /// `min(energy_deg0, 2π)`: the in-plane minimum over degrees 0 and 1.
    pub energy_inplane_min: T,
}

impl<T: Real> LandscapeRow<T> {
    pub fn compute(kappa2: T) -> Result<Self> {
        let c2 = closed_form_constant(kappa2)?.c2_closed;
        let two_pi = T::TAU();
        let deg0 = EllipticSolution::solve(kappa2)?.energy_deg0;
        Ok(Self {
            kappa2,
            c2_kappa: c2,
            energy_normal: two_pi,
            energy_axisym_min: two_pi * kappa2.min(T::one()),
            energy_deg0: deg0,
            energy_inplane_min: deg0.min(two_pi),
        })
    }
}

pub fn write_landscape_csv<T: Real>(w: impl Write, rows: &[LandscapeRow<T>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(LANDSCAPE_HEADER)?;
    for r in rows {
        wtr.write_record(
            [
                r.kappa2,
                r.c2_kappa,
                r.energy_normal,
                r.energy_axisym_min,
                r.energy_deg0,
                r.energy_inplane_min,
            ]
            .map(fmt_real),
        )?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn write_phase_csv<T: Real>(w: impl Write, points: &[PhasePoint<T>]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    wtr.write_record(PHASE_HEADER)?;
    for p in points {
        wtr.write_record([
            p.curve.to_string(),
            fmt_real(p.level),
            fmt_real(p.x),
            fmt_real(p.y),
        ])?;
    }
    wtr.flush()?;
    Ok(())
}

/// Summary of a descent run as written to JSON.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TraceReport<T> {
    pub kappa2: T,
    pub constraint: Constraint,
    pub iterations: usize,
    pub energies: Vec<T>,
    pub final_label: String,
    pub final_energy: T,
}

impl<T: Real + Serialize> TraceReport<T> {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("trace serializes")
    }
}
