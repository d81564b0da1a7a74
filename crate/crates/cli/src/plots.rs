//! CSV series for the figures: field landscape, waves over tiles, `Lf^{1/2}` and the interval diagram.

use std::path::Path;

use anyhow::{Context, Result};
use base_field::{geometric_grid, BaseFieldOracle};
use rug::Integer;
use scalar_jet::Scalar;
use verification::flows::blowup_values;
use verification::wave::{highland_tile, tile_offsets, tile_rows};
use verification::Suite;

fn writer(path: &Path) -> Result<csv::Writer<std::fs::File>> {
    csv::Writer::from_path(path).with_context(|| format!("creating {}", path.display()))
}

/// `(x, ξ₀, Dξ₀, D²ξ₀)` on a geometric grid from 1 down to `lo`.
pub fn landscape<O: BaseFieldOracle + ?Sized, W: std::io::Write>(oracle: &O, lo: &Scalar, per_octave: u32, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["x_hex", "xi0", "D1", "D2"])?;
    for x in geometric_grid(&Scalar::one(oracle.prec()), lo, per_octave) {
        let j = oracle.field_jet(&x, 2)?;
        w.write_record([x.to_hex(), j.d(0).to_hex(), j.d(1).to_hex(), j.d(2).to_hex()])?;
    }
    w.flush()?;
    Ok(())
}

pub fn wave<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["k", "p", "tile", "x_hex", "nu", "D1", "D2", "tile_max_D2"])?;
    for idx in 1..=s.depth() {
        let mut tiles = vec![(Integer::new(), "lowland")];
        for r in tile_offsets(s.built.stack.plan(idx)?.q) {
            tiles.push((highland_tile(s, idx, r)?, "highland"));
        }
        for (p, kind) in tiles {
            let rows = tile_rows(s, idx, &p)?;
            let top = rows.iter().fold(Scalar::zero(s.prec()), |a, r| a.max(&r[3].abs()));
            for r in rows {
                w.write_record([
                    s.label(idx).to_string(),
                    p.to_string(),
                    kind.to_string(),
                    r[0].to_hex(),
                    r[1].to_hex(),
                    r[2].to_hex(),
                    r[3].to_hex(),
                    top.to_hex(),
                ])?;
            }
        }
    }
    w.flush()?;
    Ok(())
}

pub fn lf<O: BaseFieldOracle + Sync + ?Sized>(s: &Suite<'_, O>, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["l", "n_l", "Lf_hex", "closed_form_hex", "floor_hex", "log2_abs_Lf"])?;
    for l in 1..=s.depth() {
        let plan = s.built.stack.plan(l)?;
        let (m, closed) = blowup_values(s, l)?;
        let floor = -(&plan.w / &plan.u);
        w.write_record([
            s.label(l).to_string(),
            plan.n.to_string(),
            m.to_hex(),
            closed.to_hex(),
            floor.to_hex(),
            format!("{:.6}", m.log2_abs()),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub fn intervals<O: BaseFieldOracle + ?Sized>(s: &Suite<'_, O>, path: &Path) -> Result<()> {
    let mut w = writer(path)?;
    w.write_record(["k", "component", "parent", "lo_hex", "hi_hex", "lo", "hi"])?;
    for set in &s.built.intervals {
        for (i, c) in set.components.iter().enumerate() {
            w.write_record([
                set.k.to_string(),
                i.to_string(),
                c.parent.map(|p| p.to_string()).unwrap_or_default(),
                c.lo.to_hex(),
                c.hi.to_hex(),
                format!("{:.17e}", c.lo.to_f64()),
                format!("{:.17e}", c.hi.to_f64()),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}
