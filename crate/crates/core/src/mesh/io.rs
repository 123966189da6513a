//! ASCII OFF read/write. Periodic meshes carry a JSON sidecar
//! `<file>.json` holding `{lx, ly, nx, ny}`.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::{Periodicity, TriangleMesh};
use crate::error::{Error, Result};

pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Writes the mesh, plus the periodicity sidecar for periodic meshes.
pub fn save_off(mesh: &TriangleMesh, path: &Path) -> Result<()> {
    let mut out = String::new();
    writeln!(out, "OFF").unwrap();
    writeln!(out, "{} {} {}", mesh.n_vertices(), mesh.n_faces(), mesh.n_edges()).unwrap();
    for p in mesh.vertices() {
        writeln!(out, "{:e} {:e} {:e}", p[0], p[1], p[2]).unwrap();
    }
    for f in mesh.faces() {
        writeln!(out, "3 {} {} {}", f[0], f[1], f[2]).unwrap();
    }
    fs::write(path, out)?;
    if let Some(p) = mesh.periodicity() {
        fs::write(sidecar_path(path), serde_json::to_string_pretty(&p)?)?;
    }
    Ok(())
}

fn parse_err(path: &Path, line: usize, message: impl Into<String>) -> Error {
    Error::Parse { location: format!("{}:{}", path.display(), line), message: message.into() }
}

/// Reads a triangle OFF file; a sidecar next to it makes the mesh periodic.
pub fn load_off(path: &Path) -> Result<TriangleMesh> {
    let text = fs::read_to_string(path)?;
    // Comments start with '#'; blank lines are skipped.
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty());

    let (ln, header) = lines.next().ok_or_else(|| parse_err(path, 1, "empty file"))?;
    let counts_inline = match header.strip_prefix("OFF") {
        Some(rest) if rest.trim().is_empty() => None,
        Some(rest) => Some((ln, rest.trim())),
        None => return Err(parse_err(path, ln, "missing OFF header")),
    };
    let (ln, counts) = match counts_inline {
        Some(c) => c,
        None => lines.next().ok_or_else(|| parse_err(path, ln, "missing counts line"))?,
    };
    let nums: Vec<usize> = counts
        .split_whitespace()
        .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad count {t:?}"))))
        .collect::<Result<_>>()?;
    if nums.len() < 2 {
        return Err(parse_err(path, ln, "expected vertex and face counts"));
    }
    let (nv, nf) = (nums[0], nums[1]);

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(path, ln, "unexpected end of vertex list"))?;
        let xs: Vec<f64> = l
            .split_whitespace()
            .take(3)
            .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad coordinate {t:?}"))))
            .collect::<Result<_>>()?;
        if xs.len() != 3 {
            return Err(parse_err(path, ln, "vertex needs three coordinates"));
        }
        vertices.push([xs[0], xs[1], xs[2]]);
    }
    let mut faces = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines.next().ok_or_else(|| parse_err(path, ln, "unexpected end of face list"))?;
        let ids: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(path, ln, format!("bad index {t:?}"))))
            .collect::<Result<_>>()?;
        if ids.first() != Some(&3) || ids.len() < 4 {
            return Err(parse_err(path, ln, "only triangles are supported"));
        }
        faces.push([ids[1], ids[2], ids[3]]);
    }

    let side = sidecar_path(path);
    if side.exists() {
        let p: Periodicity = serde_json::from_str(&fs::read_to_string(&side)?)?;
        TriangleMesh::new_periodic(vertices, faces, p)
    } else {
        TriangleMesh::new(vertices, faces)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate_flat_torus, generate_icosphere};

    #[test]
    fn round_trip_sphere_and_torus() {
        let dir = tempfile::tempdir().unwrap();
        let s = generate_icosphere(1.0, 1).unwrap();
        let p = dir.path().join("s.off");
        save_off(&s, &p).unwrap();
        let back = load_off(&p).unwrap();
        assert_eq!(back.faces(), s.faces());
        assert!(back.periodicity().is_none());
        assert!((back.total_area() - s.total_area()).abs() < 1e-12);

        let t = generate_flat_torus(3.0, 2.0, 5, 4).unwrap();
        let p = dir.path().join("t.off");
        save_off(&t, &p).unwrap();
        let back = load_off(&p).unwrap();
        assert_eq!(back.periodicity(), t.periodicity());
        assert!((back.total_area() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn parse_errors_carry_line() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("bad.off");
        fs::write(&p, "OFF\n3 1 0\n0 0 0\n1 0 x\n").unwrap();
        match load_off(&p) {
            Err(Error::Parse { location, .. }) => assert!(location.ends_with(":4")),
            other => panic!("{other:?}"),
        }
    }
}
