//! OFF and Gmsh 2.2 ASCII readers.

use std::fmt::Write as _;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{Point3, SurfaceMesh};
use crate::error::{BemError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MeshFormat {
    Off,
    Gmsh22,
}

impl FromStr for MeshFormat {
    type Err = BemError;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "off" => Ok(Self::Off),
            "gmsh22" | "gmsh" | "msh" => Ok(Self::Gmsh22),
            other => Err(BemError::InvalidInput(format!("unknown mesh format '{other}'"))),
        }
    }
}

pub fn load_mesh(path: impl AsRef<Path>, format: MeshFormat) -> Result<SurfaceMesh> {
    let text = std::fs::read_to_string(path)?;
    match format {
        MeshFormat::Off => parse_off(&text),
        MeshFormat::Gmsh22 => parse_gmsh22(&text),
    }
}

fn parse_err(line: usize, message: impl Into<String>) -> BemError {
    BemError::Parse {
        line,
        message: message.into(),
    }
}

fn parse_num<T: FromStr>(tok: Option<&str>, line: usize, what: &str) -> Result<T> {
    tok.ok_or_else(|| parse_err(line, format!("missing {what}")))?
        .parse()
        .map_err(|_| parse_err(line, format!("invalid {what}")))
}

/// Content lines of an OFF file with their 1-based line numbers; comments and
/// blanks dropped.
fn off_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, l)| {
        let l = l.split('#').next().unwrap_or("").trim();
        (!l.is_empty()).then_some((i + 1, l))
    })
}

pub fn parse_off(text: &str) -> Result<SurfaceMesh> {
    let mut lines = off_lines(text);
    let (ln, header) = lines.next().ok_or_else(|| parse_err(1, "empty file"))?;
    // the counts may share the header line ("OFF 4 4 6")
    let rest = header
        .strip_prefix("OFF")
        .ok_or_else(|| parse_err(ln, "missing OFF header"))?
        .trim();
    let (ln, counts) = if rest.is_empty() {
        lines.next().ok_or_else(|| parse_err(ln + 1, "missing counts line"))?
    } else {
        (ln, rest)
    };
    let mut it = counts.split_whitespace();
    let nv: usize = parse_num(it.next(), ln, "vertex count")?;
    let nf: usize = parse_num(it.next(), ln, "face count")?;

    let mut vertices = Vec::with_capacity(nv);
    for _ in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(ln, "unexpected end of file in vertex list"))?;
        let mut it = l.split_whitespace();
        let x = parse_num(it.next(), ln, "x")?;
        let y = parse_num(it.next(), ln, "y")?;
        let z = parse_num(it.next(), ln, "z")?;
        vertices.push(Point3::new(x, y, z));
    }
    let mut triangles = Vec::with_capacity(nf);
    for _ in 0..nf {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| parse_err(ln, "unexpected end of file in face list"))?;
        let mut it = l.split_whitespace();
        let k: usize = parse_num(it.next(), ln, "face size")?;
        if k != 3 {
            return Err(parse_err(ln, format!("only triangles supported, got {k}-gon")));
        }
        let a: usize = parse_num(it.next(), ln, "vertex index")?;
        let b: usize = parse_num(it.next(), ln, "vertex index")?;
        let c: usize = parse_num(it.next(), ln, "vertex index")?;
        triangles.push([a, b, c]);
    }
    SurfaceMesh::new(vertices, triangles)
}

pub fn write_off(mesh: &SurfaceMesh) -> String {
    let mut s = String::new();
    writeln!(s, "OFF").unwrap();
    writeln!(s, "{} {} 0", mesh.num_vertices(), mesh.num_triangles()).unwrap();
    for v in mesh.vertices() {
        writeln!(s, "{:.17e} {:.17e} {:.17e}", v.x, v.y, v.z).unwrap();
    }
    for t in mesh.triangles() {
        writeln!(s, "3 {} {} {}", t[0], t[1], t[2]).unwrap();
    }
    s
}

/// Gmsh 2.2 ASCII. Only element type 2 (3-node triangle) is kept; node tags
/// are remapped to contiguous indices in file order.
pub fn parse_gmsh22(text: &str) -> Result<SurfaceMesh> {
    let lines: Vec<&str> = text.lines().map(str::trim).collect();
    let find = |tag: &str| lines.iter().position(|l| *l == tag);

    let nodes_at = find("$Nodes").ok_or_else(|| parse_err(1, "missing $Nodes section"))?;
    let n: usize = parse_num(lines.get(nodes_at + 1).copied(), nodes_at + 2, "node count")?;
    let mut tag_to_index = std::collections::HashMap::with_capacity(n);
    let mut vertices = Vec::with_capacity(n);
    for i in 0..n {
        let ln = nodes_at + 2 + i;
        let l = lines
            .get(ln)
            .ok_or_else(|| parse_err(ln + 1, "unexpected end of $Nodes"))?;
        let mut it = l.split_whitespace();
        let tag: usize = parse_num(it.next(), ln + 1, "node tag")?;
        let x = parse_num(it.next(), ln + 1, "x")?;
        let y = parse_num(it.next(), ln + 1, "y")?;
        let z = parse_num(it.next(), ln + 1, "z")?;
        tag_to_index.insert(tag, vertices.len());
        vertices.push(Point3::new(x, y, z));
    }

    let el_at = find("$Elements").ok_or_else(|| parse_err(1, "missing $Elements section"))?;
    let m: usize = parse_num(lines.get(el_at + 1).copied(), el_at + 2, "element count")?;
    let mut triangles = Vec::new();
    for i in 0..m {
        let ln = el_at + 2 + i;
        let l = lines
            .get(ln)
            .ok_or_else(|| parse_err(ln + 1, "unexpected end of $Elements"))?;
        let f: Vec<usize> = l
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| parse_err(ln + 1, "invalid integer")))
            .collect::<Result<_>>()?;
        if f.len() < 3 {
            return Err(parse_err(ln + 1, "truncated element line"));
        }
        if f[1] != 2 {
            continue;
        }
        let ntags = f[2];
        let nodes = f
            .get(3 + ntags..3 + ntags + 3)
            .ok_or_else(|| parse_err(ln + 1, "triangle with fewer than 3 nodes"))?;
        let mut tri = [0; 3];
        for (k, tag) in nodes.iter().enumerate() {
            tri[k] = *tag_to_index
                .get(tag)
                .ok_or_else(|| parse_err(ln + 1, format!("unknown node tag {tag}")))?;
        }
        triangles.push(tri);
    }
    SurfaceMesh::new(vertices, triangles)
}
