//! ASCII OFF reading and writing.
//!
//! Vertex lines carry `dim` ambient coordinates; only the first three may be
//! nonzero for surfaces handled here.

use std::fmt::Write as _;
use std::path::Path;

use nalgebra::Vector3;

use super::mesh::TriMesh;
use crate::ambient::AmbientSpace;
use crate::error::{Error, Result};

/// Formats a float with 17 significant digits.
pub fn format_float(x: f64) -> String {
    format!("{:.16e}", x)
}

pub fn write_off_string(mesh: &TriMesh) -> String {
    let dim = mesh.ambient.dim;
    let mut out = String::new();
    out.push_str("OFF\n");
    let _ = writeln!(out, "{} {} 0", mesh.num_vertices(), mesh.num_faces());
    for v in &mesh.vertices {
        let coords: Vec<String> = (0..dim)
            .map(|i| format_float(if i < 3 { v[i] } else { 0.0 }))
            .collect();
        let _ = writeln!(out, "{}", coords.join(" "));
    }
    for f in &mesh.faces {
        let _ = writeln!(out, "3 {} {} {}", f[0], f[1], f[2]);
    }
    out
}

pub fn write_off(mesh: &TriMesh, path: &Path) -> Result<()> {
    std::fs::write(path, write_off_string(mesh))?;
    Ok(())
}

/// Parses an OFF mesh. Blank lines and `#` comments are skipped.
pub fn read_off_str(text: &str, ambient: AmbientSpace, with_boundary: bool) -> Result<TriMesh> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());
    let parse_err = |line: usize, msg: &str| Error::Parse(format!("line {line}: {msg}"));
    match lines.next() {
        Some((_, "OFF")) => {}
        Some((n, _)) => return Err(parse_err(n, "expected literal OFF")),
        None => return Err(Error::Parse("empty file".into())),
    }
    let (n, counts) = lines
        .next()
        .ok_or_else(|| Error::Parse("missing counts".into()))?;
    let counts: Vec<usize> = counts
        .split_whitespace()
        .map(|x| x.parse().map_err(|_| parse_err(n, "bad count")))
        .collect::<Result<_>>()?;
    if counts.len() != 3 {
        return Err(parse_err(n, "expected `V F 0`"));
    }
    let (nv, nf) = (counts[0], counts[1]);
    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated vertex list".into()))?;
        let c: Vec<f64> = l
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| parse_err(n, "bad coordinate")))
            .collect::<Result<_>>()?;
        if c.len() != ambient.dim {
            return Err(parse_err(n, &format!("expected {} coordinates", ambient.dim)));
        }
        if c[3..].iter().any(|&x| x != 0.0) {
            return Err(parse_err(n, "coordinates beyond the third must be zero"));
        }
        vertices.push(Vector3::new(c[0], c[1], c[2]));
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (n, l) = lines
            .next()
            .ok_or_else(|| Error::Parse("truncated face list".into()))?;
        let c: Vec<usize> = l
            .split_whitespace()
            .map(|x| x.parse().map_err(|_| parse_err(n, "bad index")))
            .collect::<Result<_>>()?;
        if c.len() != 4 || c[0] != 3 {
            return Err(parse_err(n, "only triangles `3 i j k` are supported"));
        }
        faces.push([c[1], c[2], c[3]]);
    }
    TriMesh::new(vertices, faces, ambient, with_boundary)
}

pub fn read_off(path: &Path, ambient: AmbientSpace, with_boundary: bool) -> Result<TriMesh> {
    read_off_str(&std::fs::read_to_string(path)?, ambient, with_boundary)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::surface::build::build_surface;
    use crate::surface::catalog::CatalogSurface;

    #[test]
    fn round_trip_is_bit_exact() {
        let m = build_surface(&CatalogSurface::unit_sphere(), 5).unwrap().mesh;
        let text = write_off_string(&m);
        let back = read_off_str(&text, m.ambient.clone(), false).unwrap();
        assert_eq!(back.faces, m.faces);
        for (a, b) in back.vertices.iter().zip(&m.vertices) {
            for i in 0..3 {
                assert_eq!(a[i].to_bits(), b[i].to_bits());
            }
        }
    }

    #[test]
    fn higher_dimensional_padding() {
        let m = build_surface(&CatalogSurface::unit_sphere(), 3).unwrap().mesh;
        let a4 = AmbientSpace::euclidean(4).unwrap();
        let m4 = TriMesh::new(m.vertices.clone(), m.faces.clone(), a4.clone(), false).unwrap();
        let text = write_off_string(&m4);
        assert_eq!(text.lines().nth(2).unwrap().split_whitespace().count(), 4);
        assert!(read_off_str(&text, a4, false).is_ok());
    }

    #[test]
    fn rejects_malformed_input() {
        let e = AmbientSpace::euclidean(3).unwrap();
        assert!(read_off_str("OFF\n1 0\n", e.clone(), false).is_err());
        assert!(read_off_str("PLY\n", e, false).is_err());
    }
}
