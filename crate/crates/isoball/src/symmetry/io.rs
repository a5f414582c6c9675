//! Body import/export: CSV vertex loops (2-D) and flat binary occupancy
//! grids with a JSON sidecar header (3-D).

use super::body::{BodyRep, DiscreteBody, Polygon2, VoxelGrid};
use crate::error::{Error, Result};
use crate::geometry::BallGeometry;
use std::io::{BufRead, Read, Write};

/// Write a 2-D body as an x,y vertex loop.
pub fn write_loop_csv<W: Write>(body: &DiscreteBody, mut w: W) -> Result<()> {
    let BodyRep::Polygon(p) = &body.rep else {
        return Err(Error::Precondition("vertex-loop CSV is for 2-D bodies".into()));
    };
    writeln!(w, "x,y")?;
    for v in &p.vertices {
        writeln!(w, "{},{}", v[0], v[1])?;
    }
    Ok(())
}

/// Read a vertex loop written by `write_loop_csv`. The edge scale h is taken
/// from the loop itself (longest edge).
pub fn read_loop_csv<R: BufRead>(r: R) -> Result<DiscreteBody> {
    let mut vertices: Vec<[f64; 2]> = Vec::new();
    for (ln, line) in r.lines().enumerate() {
        let line = line?;
        let t = line.trim();
        if t.is_empty() || t.starts_with('#') || t.starts_with('x') {
            continue;
        }
        let mut parts = t.split(',');
        let x: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad x on line {}", ln + 1)))?;
        let y: f64 = parts
            .next()
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad y on line {}", ln + 1)))?;
        vertices.push([x, y]);
    }
    if vertices.len() < 3 {
        return Err(Error::Parse("vertex loop needs at least 3 vertices".into()));
    }
    let h = vertices
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let w = vertices[(i + 1) % vertices.len()];
            (w[0] - v[0]).hypot(w[1] - v[1])
        })
        .fold(0.0f64, f64::max);
    Ok(DiscreteBody {
        ambient: BallGeometry::unit_volume(2)?,
        rep: BodyRep::Polygon(Polygon2 { vertices, h }),
        axis: None,
        lens: None,
    })
}

/// Write a 3-D body as a JSON header plus flat bit-packed occupancy
/// (x-fastest, contiguous, little-endian byte order).
pub fn write_voxels<W: Write, H: Write>(body: &DiscreteBody, mut data: W, mut header: H) -> Result<()> {
    let BodyRep::Voxels(g) = &body.rep else {
        return Err(Error::Precondition("occupancy export is for 3-D bodies".into()));
    };
    writeln!(
        header,
        "{{\n  \"dimension\": 3,\n  \"cells\": {},\n  \"resolution\": {:e},\n  \"origin\": [{:e}, {:e}, {:e}],\n  \"packing\": \"bits-x-fastest\"\n}}",
        g.cells, g.h, g.origin, g.origin, g.origin
    )?;
    let total = g.cells * g.cells * g.cells;
    let mut buf = vec![0u8; total.div_ceil(8)];
    let mut bit = 0usize;
    for k in 0..g.cells {
        for j in 0..g.cells {
            for i in 0..g.cells {
                if g.occupied(i as i64, j as i64, k as i64) {
                    buf[bit / 8] |= 1 << (bit % 8);
                }
                bit += 1;
            }
        }
    }
    data.write_all(&buf)?;
    Ok(())
}

/// Read a body written by `write_voxels`.
pub fn read_voxels<R: Read, H: Read>(mut data: R, mut header: H) -> Result<DiscreteBody> {
    let mut text = String::new();
    header.read_to_string(&mut text)?;
    let cells = json_usize(&text, "cells")?;
    let h = json_f64(&text, "resolution")?;
    let origin = json_first_of_array(&text, "origin")?;
    let mut buf = Vec::new();
    data.read_to_end(&mut buf)?;
    let total = cells * cells * cells;
    if buf.len() < total.div_ceil(8) {
        return Err(Error::Parse(format!(
            "occupancy data too short: {} bytes for {} cells",
            buf.len(),
            total
        )));
    }
    let slab_words = (cells * cells).div_ceil(64);
    let mut occ = vec![0u64; slab_words * cells];
    let mut bit = 0usize;
    for k in 0..cells {
        for b in 0..cells * cells {
            if buf[bit / 8] >> (bit % 8) & 1 == 1 {
                occ[k * slab_words + b / 64] |= 1u64 << (b % 64);
            }
            bit += 1;
        }
    }
    Ok(DiscreteBody {
        ambient: BallGeometry::unit_volume(3)?,
        rep: BodyRep::Voxels(VoxelGrid {
            cells,
            h,
            origin,
            slab_words,
            occ,
        }),
        axis: None,
        lens: None,
    })
}

fn json_field<'a>(text: &'a str, key: &str) -> Result<&'a str> {
    let pat = format!("\"{key}\"");
    let at = text
        .find(&pat)
        .ok_or_else(|| Error::Parse(format!("header missing \"{key}\"")))?;
    let rest = &text[at + pat.len()..];
    let colon = rest
        .find(':')
        .ok_or_else(|| Error::Parse(format!("malformed field \"{key}\"")))?;
    Ok(rest[colon + 1..].trim_start())
}

fn json_usize(text: &str, key: &str) -> Result<usize> {
    let v = json_field(text, key)?;
    let end = v
        .find(|c: char| !(c.is_ascii_digit()))
        .unwrap_or(v.len());
    v[..end]
        .parse()
        .map_err(|_| Error::Parse(format!("bad integer for \"{key}\"")))
}

fn json_f64(text: &str, key: &str) -> Result<f64> {
    let v = json_field(text, key)?;
    let end = v
        .find(|c: char| !(c.is_ascii_digit() || "+-.eE".contains(c)))
        .unwrap_or(v.len());
    v[..end]
        .parse()
        .map_err(|_| Error::Parse(format!("bad number for \"{key}\"")))
}

fn json_first_of_array(text: &str, key: &str) -> Result<f64> {
    let v = json_field(text, key)?;
    let v = v
        .strip_prefix('[')
        .ok_or_else(|| Error::Parse(format!("\"{key}\" is not an array")))?;
    let end = v
        .find(|c: char| !(c.is_ascii_digit() || "+-.eE ".contains(c)))
        .unwrap_or(v.len());
    v[..end]
        .trim()
        .parse()
        .map_err(|_| Error::Parse(format!("bad array for \"{key}\"")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lens::solve_rho_for_volume;

    #[test]
    fn loop_roundtrip() {
        let lens = *solve_rho_for_volume(2, 0.2, 1e-12).unwrap().lens().unwrap();
        let body = DiscreteBody::lens_2d(&lens, 0.01).unwrap();
        let mut buf = Vec::new();
        write_loop_csv(&body, &mut buf).unwrap();
        let back = read_loop_csv(buf.as_slice()).unwrap();
        assert!((back.volume_measure() - body.volume_measure()).abs() < 1e-12);
    }

    #[test]
    fn voxel_roundtrip() {
        let body = DiscreteBody::blob_3d(3, 0.05).unwrap();
        let mut data = Vec::new();
        let mut header = Vec::new();
        write_voxels(&body, &mut data, &mut header).unwrap();
        let back = read_voxels(data.as_slice(), header.as_slice()).unwrap();
        assert_eq!(back.volume_measure(), body.volume_measure());
        assert_eq!(back.free_measure(), body.free_measure());
    }

    #[test]
    fn header_is_parseable_json_shape() {
        let body = DiscreteBody::ball_3d(0.1).unwrap();
        let mut data = Vec::new();
        let mut header = Vec::new();
        write_voxels(&body, &mut data, &mut header).unwrap();
        let text = String::from_utf8(header).unwrap();
        assert!(text.contains("\"dimension\": 3"));
        assert!(text.trim_start().starts_with('{') && text.trim_end().ends_with('}'));
    }
}
