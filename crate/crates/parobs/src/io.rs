//! On-disk formats: a self-describing binary container for fields, CSV
//! series for plotting, JSON for grids and reports. All writes go through a
//! write-then-rename so partial files never appear under the final name.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::error::{Error, Result};
use crate::grid::{Grid, ScalarField};
use crate::solvers::{SolveResult, StepRecord, SweepTable};

const FIELD_MAGIC: &[u8; 4] = b"PFLD";
const FIELD_VERSION: u32 = 1;

/// Writes bytes atomically: temp file in the same directory, then rename.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir)?;
    let tmp = dir.join(format!(
        ".{}.tmp",
        path.file_name().map(|s| s.to_string_lossy()).unwrap_or_default()
    ));
    {
        let mut f = fs::File::create(&tmp)?;
        f.write_all(bytes)?;
        f.sync_all()?;
    }
    fs::rename(&tmp, path)?;
    Ok(())
}

/// Binary field container: magic, version, header length, JSON header
/// (grid + label + count), then little-endian f64 values.
pub fn write_field(path: &Path, field: &ScalarField) -> Result<()> {
    #[derive(Serialize)]
    struct Header<'a> {
        grid: &'a Grid,
        label: &'a str,
        count: usize,
    }
    let header = serde_json::to_vec(&Header {
        grid: &field.grid,
        label: &field.label,
        count: field.values.len(),
    })?;
    let mut bytes = Vec::with_capacity(16 + header.len() + 8 * field.values.len());
    bytes.extend_from_slice(FIELD_MAGIC);
    bytes.extend_from_slice(&FIELD_VERSION.to_le_bytes());
    bytes.extend_from_slice(&(header.len() as u64).to_le_bytes());
    bytes.extend_from_slice(&header);
    for v in &field.values {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path, &bytes)
}

pub fn read_field(path: &Path) -> Result<ScalarField> {
    #[derive(serde::Deserialize)]
    struct Header {
        grid: Grid,
        label: String,
        count: usize,
    }
    let bytes = fs::read(path)?;
    if bytes.len() < 16 || &bytes[0..4] != FIELD_MAGIC {
        return Err(Error::ConfigInvalid {
            path: path.display().to_string(),
            reason: "not a field container".into(),
        });
    }
    let version = u32::from_le_bytes(bytes[4..8].try_into().unwrap());
    if version != FIELD_VERSION {
        return Err(Error::ConfigInvalid {
            path: path.display().to_string(),
            reason: format!("unsupported container version {version}"),
        });
    }
    let hlen = u64::from_le_bytes(bytes[8..16].try_into().unwrap()) as usize;
    let header: Header = serde_json::from_slice(&bytes[16..16 + hlen])?;
    let data = &bytes[16 + hlen..];
    if data.len() != 8 * header.count {
        return Err(Error::ConfigInvalid {
            path: path.display().to_string(),
            reason: format!(
                "value section holds {} bytes, header promises {}",
                data.len(),
                8 * header.count
            ),
        });
    }
    let values: Vec<f64> = data
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()))
        .collect();
    Ok(ScalarField {
        grid: header.grid,
        values,
        label: header.label,
    })
}

/// One row per node: t, x1[, x2], value.
pub fn write_field_csv(path: &Path, field: &ScalarField) -> Result<()> {
    let g = &field.grid;
    let mut out = String::new();
    out.push_str(if g.dim == 1 { "t,x1,value\n" } else { "t,x1,x2,value\n" });
    for k in 0..g.n_time {
        let t = g.time(k);
        for c in 0..g.space_len() {
            match g.dim {
                1 => out.push_str(&format!("{},{},{}\n", t, g.coord(0, c), field.at(k, c))),
                _ => out.push_str(&format!(
                    "{},{},{},{}\n",
                    t,
                    g.coord(0, c % g.n_space),
                    g.coord(1, c / g.n_space),
                    field.at(k, c)
                )),
            }
        }
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_grid_json(path: &Path, grid: &Grid) -> Result<()> {
    write_atomic(path, &serde_json::to_vec_pretty(grid)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    write_atomic(path, &serde_json::to_vec_pretty(value)?)
}

/// Per-step march log.
pub fn write_steps_csv(path: &Path, steps: &[StepRecord]) -> Result<()> {
    let mut out =
        String::from("level,newton_iters,residual,complementarity_defect,min_gap\n");
    for s in steps {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            s.level, s.newton_iters, s.residual, s.complementarity_defect, s.min_gap
        ));
    }
    write_atomic(path, out.as_bytes())
}

pub fn write_sweep_csv(path: &Path, table: &SweepTable) -> Result<()> {
    let mut out = String::from("eps,err_inf,min_gap,complementarity_defect,modulus_fit\n");
    for r in &table.rows {
        out.push_str(&format!(
            "{},{},{},{},{}\n",
            r.eps,
            r.err_inf,
            r.min_gap,
            r.complementarity_defect,
            r.modulus_fit.map_or(String::new(), |v| v.to_string())
        ));
    }
    write_atomic(path, out.as_bytes())
}

/// Series of (x, y) pairs as two-column CSV.
pub fn write_series_csv(path: &Path, header: &str, series: &[(f64, f64)]) -> Result<()> {
    let mut out = format!("{header}\n");
    for (x, y) in series {
        out.push_str(&format!("{x},{y}\n"));
    }
    write_atomic(path, out.as_bytes())
}

/// Standard artifact layout of one solve.
pub fn write_solve_artifacts(dir: &Path, result: &SolveResult) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir)?;
    let mut written = Vec::new();
    let u_path = dir.join("u.field");
    write_field(&u_path, &result.u)?;
    written.push(u_path);
    let v_path = dir.join("v.field");
    write_field(&v_path, &result.v)?;
    written.push(v_path);
    let g_path = dir.join("grid.json");
    write_grid_json(&g_path, &result.u.grid)?;
    written.push(g_path);
    let s_path = dir.join("steps.csv");
    write_steps_csv(&s_path, &result.per_step)?;
    written.push(s_path);
    let u_csv = dir.join("u.csv");
    write_field_csv(&u_csv, &result.u)?;
    written.push(u_csv);
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::{make_grid, Geometry};
    use proptest::prelude::*;

    #[test]
    fn field_container_round_trip() {
        let g = make_grid(1, Geometry::Box, 17, 5, &[[0.0, 1.0]], 0.0, 0.1).unwrap();
        let f = ScalarField::sample(&g, "trip", |t, x| t + 3.0 * x[0]);
        let dir = std::env::temp_dir().join("parobs_io_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("field.bin");
        write_field(&path, &f).unwrap();
        let back = read_field(&path).unwrap();
        assert_eq!(back.values, f.values);
        assert_eq!(back.label, "trip");
        assert_eq!(back.grid, f.grid);
    }

    proptest! {
        #[test]
        fn container_preserves_arbitrary_values(vals in proptest::collection::vec(-1e12f64..1e12, 15)) {
            let g = make_grid(1, Geometry::Box, 5, 3, &[[0.0, 1.0]], 0.0, 0.1).unwrap();
            let mut f = ScalarField::zeros(&g, "p");
            f.values.copy_from_slice(&vals);
            let dir = std::env::temp_dir().join("parobs_io_prop");
            std::fs::create_dir_all(&dir).unwrap();
            let path = dir.join("prop.bin");
            write_field(&path, &f).unwrap();
            let back = read_field(&path).unwrap();
            prop_assert_eq!(back.values, f.values);
        }
    }
}
