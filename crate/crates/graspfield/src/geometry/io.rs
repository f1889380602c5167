//! Mesh, point-cloud and depth-image files.
//!
//! - Meshes load from ASCII OBJ (`v`/`f` records, 1-based indices) and
//!   binary little-endian PLY (float32 vertices, uint32 face indices).
//! - Point clouds export as ASCII PLY.
//! - Depth images use a raw format: magic `DPTH`, u32 width, u32 height,
//!   then float32 little-endian row-major meters.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::Path;

use nalgebra::Vector3;

use crate::{Error, Result};

use super::cloud::PointCloud;
use super::mesh::TriMesh;
use super::render::DepthImage;

fn format_err(path: &Path, why: impl Into<String>) -> Error {
    Error::Format { path: path.display().to_string(), why: why.into() }
}

/// Load an ASCII OBJ mesh (`v` and `f` records; polygons are fan
/// triangulated; `f` entries may carry `/vt/vn` suffixes).
pub fn load_obj(path: &Path) -> Result<TriMesh> {
    let file = File::open(path)?;
    let reader = BufReader::new(file);
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        let mut it = line.split_whitespace();
        match it.next() {
            Some("v") => {
                let mut coords = [0.0f64; 3];
                for c in &mut coords {
                    *c = it
                        .next()
                        .and_then(|s| s.parse().ok())
                        .ok_or_else(|| format_err(path, format!("bad vertex at line {}", lineno + 1)))?;
                }
                vertices.push(Vector3::new(coords[0], coords[1], coords[2]));
            }
            Some("f") => {
                let mut idx: Vec<u32> = Vec::new();
                for tok in it {
                    let first = tok.split('/').next().unwrap_or("");
                    let i: i64 = first
                        .parse()
                        .map_err(|_| format_err(path, format!("bad face index at line {}", lineno + 1)))?;
                    let resolved = if i > 0 {
                        (i - 1) as u32
                    } else if i < 0 {
                        (vertices.len() as i64 + i) as u32
                    } else {
                        return Err(format_err(path, format!("zero face index at line {}", lineno + 1)));
                    };
                    idx.push(resolved);
                }
                if idx.len() < 3 {
                    return Err(format_err(path, format!("face with <3 vertices at line {}", lineno + 1)));
                }
                for k in 1..idx.len() - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
            _ => {}
        }
    }
    TriMesh::new(vertices, triangles)
}

pub fn save_obj(path: &Path, mesh: &TriMesh) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    for v in &mesh.vertices {
        writeln!(w, "v {} {} {}", v.x, v.y, v.z)?;
    }
    for t in &mesh.triangles {
        writeln!(w, "f {} {} {}", t[0] + 1, t[1] + 1, t[2] + 1)?;
    }
    Ok(())
}

/// Load a binary little-endian PLY mesh (float vertex positions, integer
/// face index lists; extra vertex properties are skipped).
pub fn load_ply(path: &Path) -> Result<TriMesh> {
    let mut file = BufReader::new(File::open(path)?);

    #[derive(Clone, Copy, PartialEq)]
    enum Scalar {
        F32,
        F64,
        U8,
        I8,
        U16,
        I16,
        U32,
        I32,
    }
    fn scalar(name: &str) -> Option<Scalar> {
        Some(match name {
            "float" | "float32" => Scalar::F32,
            "double" | "float64" => Scalar::F64,
            "uchar" | "uint8" => Scalar::U8,
            "char" | "int8" => Scalar::I8,
            "ushort" | "uint16" => Scalar::U16,
            "short" | "int16" => Scalar::I16,
            "uint" | "uint32" => Scalar::U32,
            "int" | "int32" => Scalar::I32,
            _ => return None,
        })
    }
    fn width(s: Scalar) -> usize {
        match s {
            Scalar::U8 | Scalar::I8 => 1,
            Scalar::U16 | Scalar::I16 => 2,
            Scalar::F32 | Scalar::U32 | Scalar::I32 => 4,
            Scalar::F64 => 8,
        }
    }
    fn read_scalar(buf: &[u8], s: Scalar) -> f64 {
        match s {
            Scalar::F32 => f32::from_le_bytes(buf[..4].try_into().unwrap()) as f64,
            Scalar::F64 => f64::from_le_bytes(buf[..8].try_into().unwrap()),
            Scalar::U8 => buf[0] as f64,
            Scalar::I8 => buf[0] as i8 as f64,
            Scalar::U16 => u16::from_le_bytes(buf[..2].try_into().unwrap()) as f64,
            Scalar::I16 => i16::from_le_bytes(buf[..2].try_into().unwrap()) as f64,
            Scalar::U32 => u32::from_le_bytes(buf[..4].try_into().unwrap()) as f64,
            Scalar::I32 => i32::from_le_bytes(buf[..4].try_into().unwrap()) as f64,
        }
    }

    // Header.
    let mut line = String::new();
    let mut read_line = |file: &mut BufReader<File>| -> Result<String> {
        line.clear();
        let mut byte = [0u8; 1];
        loop {
            file.read_exact(&mut byte)?;
            if byte[0] == b'\n' {
                break;
            }
            line.push(byte[0] as char);
        }
        Ok(line.trim_end_matches('\r').to_string())
    };

    if read_line(&mut file)? != "ply" {
        return Err(format_err(path, "missing ply magic"));
    }
    struct Elem {
        name: String,
        count: usize,
        // (name, scalar) for plain properties; list properties recorded
        // separately.
        props: Vec<(String, Scalar)>,
        list: Option<(Scalar, Scalar, String)>,
    }
    let mut elems: Vec<Elem> = Vec::new();
    loop {
        let l = read_line(&mut file)?;
        let toks: Vec<&str> = l.split_whitespace().collect();
        match toks.as_slice() {
            ["format", fmt, _] => {
                if *fmt != "binary_little_endian" {
                    return Err(format_err(path, format!("unsupported format {fmt}")));
                }
            }
            ["comment", ..] | ["obj_info", ..] => {}
            ["element", name, count] => {
                let count = count.parse().map_err(|_| format_err(path, "bad element count"))?;
                elems.push(Elem { name: name.to_string(), count, props: Vec::new(), list: None });
            }
            ["property", "list", ct, it, name] => {
                let elem = elems.last_mut().ok_or_else(|| format_err(path, "property before element"))?;
                let ct = scalar(ct).ok_or_else(|| format_err(path, "bad list count type"))?;
                let it = scalar(it).ok_or_else(|| format_err(path, "bad list item type"))?;
                elem.list = Some((ct, it, name.to_string()));
            }
            ["property", ty, name] => {
                let elem = elems.last_mut().ok_or_else(|| format_err(path, "property before element"))?;
                let ty = scalar(ty).ok_or_else(|| format_err(path, format!("bad property type {ty}")))?;
                elem.props.push((name.to_string(), ty));
            }
            ["end_header"] => break,
            _ => return Err(format_err(path, format!("unrecognized header line: {l}"))),
        }
    }

    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut triangles: Vec<[u32; 3]> = Vec::new();
    for elem in &elems {
        if elem.name == "vertex" {
            let row: usize = elem.props.iter().map(|&(_, t)| width(t)).sum();
            let mut buf = vec![0u8; row];
            let find = |n: &str| -> Result<(usize, Scalar)> {
                let mut off = 0;
                for (name, ty) in &elem.props {
                    if name == n {
                        return Ok((off, *ty));
                    }
                    off += width(*ty);
                }
                Err(format_err(path, format!("vertex property {n} missing")))
            };
            let (xo, xt) = find("x")?;
            let (yo, yt) = find("y")?;
            let (zo, zt) = find("z")?;
            for _ in 0..elem.count {
                file.read_exact(&mut buf)?;
                vertices.push(Vector3::new(
                    read_scalar(&buf[xo..], xt),
                    read_scalar(&buf[yo..], yt),
                    read_scalar(&buf[zo..], zt),
                ));
            }
        } else if elem.name == "face" {
            let (ct, it, _) = elem
                .list
                .ok_or_else(|| format_err(path, "face element without an index list"))?;
            for _ in 0..elem.count {
                let mut cbuf = vec![0u8; width(ct)];
                file.read_exact(&mut cbuf)?;
                let n = read_scalar(&cbuf, ct) as usize;
                let mut idx = Vec::with_capacity(n);
                let mut ibuf = vec![0u8; width(it)];
                for _ in 0..n {
                    file.read_exact(&mut ibuf)?;
                    idx.push(read_scalar(&ibuf, it) as u32);
                }
                if n < 3 {
                    return Err(format_err(path, "face with <3 indices"));
                }
                for k in 1..n - 1 {
                    triangles.push([idx[0], idx[k], idx[k + 1]]);
                }
            }
        } else {
            // Skip unknown elements (only possible when fixed-width).
            let row: usize = elem.props.iter().map(|&(_, t)| width(t)).sum();
            if elem.list.is_some() {
                return Err(format_err(path, format!("cannot skip list element {}", elem.name)));
            }
            let mut buf = vec![0u8; row * elem.count];
            file.read_exact(&mut buf)?;
        }
    }
    TriMesh::new(vertices, triangles)
}

/// Save a binary little-endian PLY mesh (float32 vertices, uint32 faces).
pub fn save_ply_mesh(path: &Path, mesh: &TriMesh) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    write!(
        w,
        "ply\nformat binary_little_endian 1.0\nelement vertex {}\nproperty float x\nproperty float y\nproperty float z\nelement face {}\nproperty list uchar uint vertex_indices\nend_header\n",
        mesh.vertices.len(),
        mesh.triangles.len()
    )?;
    for v in &mesh.vertices {
        for c in [v.x, v.y, v.z] {
            w.write_all(&(c as f32).to_le_bytes())?;
        }
    }
    for t in &mesh.triangles {
        w.write_all(&[3u8])?;
        for &i in t {
            w.write_all(&i.to_le_bytes())?;
        }
    }
    Ok(())
}

/// Export a point cloud as ASCII PLY (normals included when present).
pub fn save_ply_cloud(path: &Path, cloud: &PointCloud) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    let has_normals = cloud.normals.is_some();
    writeln!(w, "ply\nformat ascii 1.0\nelement vertex {}", cloud.points.len())?;
    writeln!(w, "property float x\nproperty float y\nproperty float z")?;
    if has_normals {
        writeln!(w, "property float nx\nproperty float ny\nproperty float nz")?;
    }
    writeln!(w, "end_header")?;
    for (i, p) in cloud.points.iter().enumerate() {
        if let Some(ns) = &cloud.normals {
            let n = ns[i];
            writeln!(w, "{} {} {} {} {} {}", p.x, p.y, p.z, n.x, n.y, n.z)?;
        } else {
            writeln!(w, "{} {} {}", p.x, p.y, p.z)?;
        }
    }
    Ok(())
}

/// Export colored vertices plus edges as ASCII PLY (grasp-frame overlays).
pub fn save_ply_segments(
    path: &Path,
    vertices: &[(Vector3<f64>, [u8; 3])],
    edges: &[(u32, u32)],
) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    writeln!(w, "ply\nformat ascii 1.0\nelement vertex {}", vertices.len())?;
    writeln!(w, "property float x\nproperty float y\nproperty float z")?;
    writeln!(w, "property uchar red\nproperty uchar green\nproperty uchar blue")?;
    writeln!(w, "element edge {}\nproperty int vertex1\nproperty int vertex2", edges.len())?;
    writeln!(w, "end_header")?;
    for (p, c) in vertices {
        writeln!(w, "{} {} {} {} {} {}", p.x, p.y, p.z, c[0], c[1], c[2])?;
    }
    for (a, b) in edges {
        writeln!(w, "{a} {b}")?;
    }
    Ok(())
}

pub const DEPTH_MAGIC: &[u8; 4] = b"DPTH";

pub fn save_depth(path: &Path, depth: &DepthImage) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    w.write_all(DEPTH_MAGIC)?;
    w.write_all(&(depth.width as u32).to_le_bytes())?;
    w.write_all(&(depth.height as u32).to_le_bytes())?;
    for &d in &depth.data {
        w.write_all(&(d as f32).to_le_bytes())?;
    }
    Ok(())
}

pub fn load_depth(path: &Path) -> Result<DepthImage> {
    let mut r = BufReader::new(File::open(path)?);
    let mut magic = [0u8; 4];
    r.read_exact(&mut magic)?;
    if &magic != DEPTH_MAGIC {
        return Err(format_err(path, "bad depth magic"));
    }
    let mut word = [0u8; 4];
    r.read_exact(&mut word)?;
    let width = u32::from_le_bytes(word) as usize;
    r.read_exact(&mut word)?;
    let height = u32::from_le_bytes(word) as usize;
    let mut data = Vec::with_capacity(width * height);
    for _ in 0..width * height {
        r.read_exact(&mut word)?;
        data.push(f32::from_le_bytes(word) as f64);
    }
    Ok(DepthImage { width, height, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::primitives;

    #[test]
    fn obj_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("box.obj");
        let mesh = primitives::box_mesh(0.1, 0.2, 0.3);
        save_obj(&path, &mesh).unwrap();
        let loaded = load_obj(&path).unwrap();
        assert_eq!(loaded.triangles.len(), mesh.triangles.len());
        assert!(loaded.watertight);
        for (a, b) in mesh.vertices.iter().zip(loaded.vertices.iter()) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn obj_with_slashes_and_polygons() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("quad.obj");
        std::fs::write(
            &path,
            "v 0 0 0\nv 1 0 0\nv 1 1 0\nv 0 1 0\nvn 0 0 1\nf 1//1 2//1 3//1 4//1\n",
        )
        .unwrap();
        let mesh = load_obj(&path).unwrap();
        assert_eq!(mesh.triangles.len(), 2);
    }

    #[test]
    fn ply_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sphere.ply");
        let mesh = primitives::icosphere(0.05, 2);
        save_ply_mesh(&path, &mesh).unwrap();
        let loaded = load_ply(&path).unwrap();
        assert_eq!(loaded.triangles.len(), mesh.triangles.len());
        assert!(loaded.watertight);
        for (a, b) in mesh.vertices.iter().zip(loaded.vertices.iter()) {
            assert!((a - b).norm() < 1e-6); // f32 storage
        }
    }

    #[test]
    fn depth_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("img.dpth");
        let img = DepthImage { width: 3, height: 2, data: vec![0.0, 1.0, 2.0, 0.5, 0.25, 0.125] };
        save_depth(&path, &img).unwrap();
        let loaded = load_depth(&path).unwrap();
        assert_eq!(loaded.width, 3);
        assert_eq!(loaded.height, 2);
        assert_eq!(loaded.data, img.data);
    }

    #[test]
    fn bad_magic_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.dpth");
        std::fs::write(&path, b"NOPE\x01\x00\x00\x00\x01\x00\x00\x00").unwrap();
        assert!(matches!(load_depth(&path), Err(Error::Format { .. })));
    }

    #[test]
    fn cloud_ply_is_ascii() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cloud.ply");
        let cloud = PointCloud::with_normals(
            vec![Vector3::new(1.0, 2.0, 3.0)],
            vec![Vector3::new(0.0, 0.0, 1.0)],
        )
        .unwrap();
        save_ply_cloud(&path, &cloud).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert!(text.starts_with("ply\nformat ascii 1.0"));
        assert!(text.contains("1 2 3 0 0 1"));
    }
}
