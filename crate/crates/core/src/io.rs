//! Text readers and writers: meshes, cochains, matching dumps, tunnel paths,
//! spanning-tree edge lists, and the structured solve report.
//!
//! Everything is plain whitespace-separated text with `#` comments, and all
//! round-trips are exact (rationals are serialized as `p/q`).

use crate::algebra::{Cochain, Id, Scalar};
use crate::complex::{CellComplex, ComplexError, ValidationReport};
use crate::matching::Matching;
use crate::solver::SolveTrace;
use std::fmt::Write as _;
use std::path::Path;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum IoError {
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("line {line}: no {what} with id {id}")]
    DimensionMismatch { line: usize, what: &'static str, id: Id },
    #[error(transparent)]
    Complex(#[from] ComplexError),
}

fn parse_err(line: usize, msg: impl Into<String>) -> IoError {
    IoError::Parse {
        line,
        msg: msg.into(),
    }
}

/// Lines with content, 1-based line numbers; `#` starts a comment.
fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            None
        } else {
            Some((i + 1, line))
        }
    })
}

/// Mesh text format: `vertices N tets M`, N coordinate lines (`x y z` or
/// `- - -`), then M tet lines of vertex ids.
pub fn parse_mesh(text: &str) -> Result<CellComplex, IoError> {
    let mut lines = content_lines(text);
    let (lno, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty mesh file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (nv, nt) = match tokens[..] {
        ["vertices", nv, "tets", nt] => (
            nv.parse::<usize>()
                .map_err(|_| parse_err(lno, "bad vertex count"))?,
            nt.parse::<usize>()
                .map_err(|_| parse_err(lno, "bad tet count"))?,
        ),
        _ => return Err(parse_err(lno, "expected `vertices N tets M`")),
    };
    let mut coords: Vec<[f64; 3]> = Vec::with_capacity(nv);
    let mut missing_coords = false;
    for _ in 0..nv {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(usize::MAX, "unexpected end of file in vertex list"))?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(lno, "expected three coordinates"));
        }
        if parts == ["-", "-", "-"] {
            missing_coords = true;
            coords.push([0.0; 3]);
        } else {
            let mut p = [0.0f64; 3];
            for (slot, tok) in p.iter_mut().zip(&parts) {
                *slot = tok
                    .parse::<f64>()
                    .map_err(|_| parse_err(lno, format!("bad coordinate `{tok}`")))?;
            }
            coords.push(p);
        }
    }
    let mut tets: Vec<[u32; 4]> = Vec::with_capacity(nt);
    for _ in 0..nt {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(usize::MAX, "unexpected end of file in tet list"))?;
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 4 {
            return Err(parse_err(lno, "expected four vertex ids"));
        }
        let mut t = [0u32; 4];
        for (slot, tok) in t.iter_mut().zip(&parts) {
            *slot = tok
                .parse::<u32>()
                .map_err(|_| parse_err(lno, format!("bad vertex id `{tok}`")))?;
        }
        tets.push(t);
    }
    let coordinates = if missing_coords { None } else { Some(coords) };
    Ok(CellComplex::build_from_tetrahedra(nv, &tets, coordinates)?)
}

pub fn read_mesh(path: &Path) -> Result<CellComplex, IoError> {
    parse_mesh(&std::fs::read_to_string(path)?)
}

pub fn mesh_to_string(complex: &CellComplex) -> String {
    let mut out = String::new();
    let nv = complex.count(0);
    let nt = complex.count(3);
    let _ = writeln!(out, "vertices {nv} tets {nt}");
    match complex.coordinates() {
        Some(coords) => {
            for c in coords {
                let _ = writeln!(out, "{} {} {}", c[0], c[1], c[2]);
            }
        }
        None => {
            for _ in 0..nv {
                let _ = writeln!(out, "- - -");
            }
        }
    }
    for cell in complex.cells(3) {
        let v = &cell.vertices;
        let _ = writeln!(out, "{} {} {} {}", v[0], v[1], v[2], v[3]);
    }
    out
}

pub fn write_mesh(complex: &CellComplex, path: &Path) -> Result<(), IoError> {
    Ok(std::fs::write(path, mesh_to_string(complex))?)
}

/// Cochain text format: `cochain k N`, then N lines `cell_id value` with
/// rational values as `p` or `p/q`. Unlisted ids are zero.
pub fn parse_cochain(text: &str, complex: &CellComplex, dim: usize) -> Result<Cochain, IoError> {
    let mut lines = content_lines(text);
    let (lno, header) = lines
        .next()
        .ok_or_else(|| parse_err(1, "empty cochain file"))?;
    let tokens: Vec<&str> = header.split_whitespace().collect();
    let (k, n) = match tokens[..] {
        ["cochain", k, n] => (
            k.parse::<usize>()
                .map_err(|_| parse_err(lno, "bad dimension"))?,
            n.parse::<usize>()
                .map_err(|_| parse_err(lno, "bad entry count"))?,
        ),
        _ => return Err(parse_err(lno, "expected `cochain k N`")),
    };
    if k != dim {
        return Err(parse_err(
            lno,
            format!("cochain has dimension {k}, expected {dim}"),
        ));
    }
    let what = match dim {
        0 => "vertex",
        1 => "edge",
        2 => "face",
        _ => "volume",
    };
    let mut out = Cochain::zeros(dim, complex.count(dim));
    for _ in 0..n {
        let (lno, line) = lines
            .next()
            .ok_or_else(|| parse_err(usize::MAX, "unexpected end of file in cochain"))?;
        let mut parts = line.split_whitespace();
        let id: Id = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(lno, "bad cell id"))?;
        let value: Scalar = parts
            .next()
            .and_then(|t| t.parse().ok())
            .ok_or_else(|| parse_err(lno, "bad rational value"))?;
        if id as usize >= complex.count(dim) {
            return Err(IoError::DimensionMismatch {
                line: lno,
                what,
                id,
            });
        }
        out.set(id, value).expect("id just checked");
    }
    Ok(out)
}

pub fn read_cochain(path: &Path, complex: &CellComplex, dim: usize) -> Result<Cochain, IoError> {
    parse_cochain(&std::fs::read_to_string(path)?, complex, dim)
}

pub fn cochain_to_string(v: &Cochain) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "cochain {} {}", v.dim(), v.len());
    for (id, value) in v.iter() {
        let _ = writeln!(out, "{id} {value}");
    }
    out
}

pub fn write_cochain(v: &Cochain, path: &Path) -> Result<(), IoError> {
    Ok(std::fs::write(path, cochain_to_string(v))?)
}

/// Matching dump: `pair k sigma tau kind order`.
pub fn matching_to_string(m: &Matching) -> String {
    let mut out = String::new();
    for (i, p) in m.pairs().iter().enumerate() {
        let _ = writeln!(
            out,
            "pair {} {} {} {} {}",
            m.dim(),
            p.low,
            p.high,
            p.kind.as_str(),
            i
        );
    }
    out
}

pub fn write_matching(m: &Matching, path: &Path) -> Result<(), IoError> {
    Ok(std::fs::write(path, matching_to_string(m))?)
}

/// Tunnel path file: one `x y z` lattice cell per line.
pub fn parse_knot_path(text: &str) -> Result<Vec<[usize; 3]>, IoError> {
    let mut cells = Vec::new();
    for (lno, line) in content_lines(text) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 3 {
            return Err(parse_err(lno, "expected `x y z`"));
        }
        let mut c = [0usize; 3];
        for (slot, tok) in c.iter_mut().zip(&parts) {
            *slot = tok
                .parse()
                .map_err(|_| parse_err(lno, format!("bad lattice coordinate `{tok}`")))?;
        }
        cells.push(c);
    }
    Ok(cells)
}

pub fn read_knot_path(path: &Path) -> Result<Vec<[usize; 3]>, IoError> {
    parse_knot_path(&std::fs::read_to_string(path)?)
}

/// Spanning-tree file: one `u v` vertex pair per line; each pair must be a
/// mesh edge. Returns the edge ids.
pub fn parse_tree_edges(text: &str, complex: &CellComplex) -> Result<Vec<Id>, IoError> {
    let mut edges = Vec::new();
    for (lno, line) in content_lines(text) {
        let parts: Vec<&str> = line.split_whitespace().collect();
        if parts.len() != 2 {
            return Err(parse_err(lno, "expected `u v`"));
        }
        let u: u32 = parts[0]
            .parse()
            .map_err(|_| parse_err(lno, "bad vertex id"))?;
        let v: u32 = parts[1]
            .parse()
            .map_err(|_| parse_err(lno, "bad vertex id"))?;
        match complex.edge_between(u, v) {
            Some(e) => edges.push(e),
            None => {
                return Err(parse_err(lno, format!("no mesh edge between {u} and {v}")));
            }
        }
    }
    Ok(edges)
}

pub fn read_tree_edges(path: &Path, complex: &CellComplex) -> Result<Vec<Id>, IoError> {
    parse_tree_edges(&std::fs::read_to_string(path)?, complex)
}

/// Structured run report, serialized as JSON text with stable key order.
#[derive(Debug, Clone)]
pub struct Report {
    pub validation: ValidationReport,
    pub trace: Option<SolveTrace>,
    /// Exactly-zero residual flag (never a norm).
    pub residual_zero: Option<bool>,
    pub wall_ms: f64,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut out = String::new();
        out.push_str("{\n");
        let v = &self.validation;
        let _ = writeln!(
            out,
            "  \"mesh\": {{\"vertices\": {}, \"edges\": {}, \"faces\": {}, \"volumes\": {}}},",
            v.vertices, v.edges, v.faces, v.volumes
        );
        let _ = writeln!(
            out,
            "  \"validation\": {{\"boundary_of_boundary\": {}, \"regular\": {}, \"manifold\": {}, \"connected\": {}, \"euler\": {}, \"boundary_connected\": {}, \"boundary_euler\": {}, \"topology_warning\": {}}},",
            v.boundary_of_boundary_ok,
            v.regular_ok,
            v.manifold_ok,
            v.vertex_graph_connected,
            v.euler,
            v.boundary_surface_connected,
            v.boundary_euler
                .map_or("null".to_string(), |e| e.to_string()),
            v.topology_warning()
        );
        match &self.trace {
            Some(trace) => {
                out.push_str("  \"solve\": {\n    \"levels\": [\n");
                for (i, l) in trace.levels.iter().enumerate() {
                    let _ = writeln!(
                        out,
                        "      {{\"level\": {}, \"basis_edges\": {}, \"basis_faces\": {}, \"m2_pairs\": {}, \"m1_pairs\": {}, \"free\": {}, \"flat\": {}, \"critical_edges\": {}, \"critical_faces\": {}, \"face_boundary_nonzeros\": {}, \"wall_ms\": {:.3}}}{}",
                        l.level,
                        l.basis_edges,
                        l.basis_faces,
                        l.m2_pairs,
                        l.m1_pairs,
                        l.free_pairs,
                        l.flat_pairs,
                        l.critical_edges,
                        l.critical_faces,
                        l.face_boundary_nonzeros,
                        l.wall.as_secs_f64() * 1e3,
                        if i + 1 < trace.levels.len() { "," } else { "" }
                    );
                }
                let _ = write!(
                    out,
                    "    ],\n    \"depth\": {},\n    \"terminal\": \"{}\",\n    \"wall_ms\": {:.3}\n  }},\n",
                    trace.depth(),
                    trace.terminal.as_str(),
                    trace.total_wall.as_secs_f64() * 1e3
                );
            }
            None => out.push_str("  \"solve\": null,\n"),
        }
        let _ = writeln!(
            out,
            "  \"residual_zero\": {},",
            self.residual_zero
                .map_or("null".to_string(), |b| b.to_string())
        );
        let _ = write!(out, "  \"wall_ms\": {:.3}\n}}\n", self.wall_ms);
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{cube_grid, random_solenoidal_field, GridSpec};

    #[test]
    fn mesh_round_trip_preserves_everything() {
        let k = cube_grid(&GridSpec { n: 2 }).unwrap();
        let text = mesh_to_string(&k);
        let back = parse_mesh(&text).unwrap();
        for dim in 0..4 {
            assert_eq!(k.cells(dim), back.cells(dim));
        }
        for dim in 0..=2 {
            assert_eq!(k.incidence_matrix(dim), back.incidence_matrix(dim));
        }
    }

    #[test]
    fn mesh_without_coordinates_round_trips() {
        let k = CellComplex::build_from_tetrahedra(4, &[[0, 1, 2, 3]], None).unwrap();
        let text = mesh_to_string(&k);
        assert!(text.contains("- - -"));
        let back = parse_mesh(&text).unwrap();
        assert!(back.coordinates().is_none());
        assert_eq!(k.cells(3), back.cells(3));
    }

    #[test]
    fn malformed_header_is_line_1() {
        let err = parse_mesh("vertices four tets 1\n").unwrap_err();
        assert!(matches!(err, IoError::Parse { line: 1, .. }));
        let err2 = parse_mesh("points 4 tets 1\n").unwrap_err();
        assert!(matches!(err2, IoError::Parse { line: 1, .. }));
    }

    #[test]
    fn repeated_tet_is_reported() {
        let text = "vertices 4 tets 2\n- - -\n- - -\n- - -\n- - -\n0 1 2 3\n0 1 2 3\n";
        assert!(matches!(
            parse_mesh(text),
            Err(IoError::Complex(ComplexError::DuplicateTet(_)))
        ));
    }

    #[test]
    fn cochain_round_trip_and_integers() {
        let k = cube_grid(&GridSpec { n: 2 }).unwrap();
        let i = random_solenoidal_field(&k, 1, 10);
        let text = cochain_to_string(&i);
        let back = parse_cochain(&text, &k, 2).unwrap();
        assert_eq!(i, back);

        let tet = crate::complex::single_tet();
        let parsed = parse_cochain("cochain 2 1\n0 3\n", &tet, 2).unwrap();
        assert_eq!(parsed.get(0), Some(&Scalar::from_int(3)));
    }

    #[test]
    fn cochain_unknown_id_is_rejected() {
        let tet = crate::complex::single_tet();
        assert!(matches!(
            parse_cochain("cochain 2 1\n9 1/2\n", &tet, 2),
            Err(IoError::DimensionMismatch { id: 9, .. })
        ));
    }

    #[test]
    fn knot_path_file_parses() {
        let cells = parse_knot_path("# tunnel\n2 2 11\n2 2 10\n").unwrap();
        assert_eq!(cells, vec![[2, 2, 11], [2, 2, 10]]);
        assert!(matches!(
            parse_knot_path("2 2\n"),
            Err(IoError::Parse { line: 1, .. })
        ));
    }

    #[test]
    fn tree_edge_file_maps_to_edge_ids() {
        let tet = crate::complex::single_tet();
        let edges = parse_tree_edges("0 1\n0 2\n0 3\n", &tet).unwrap();
        assert_eq!(edges.len(), 3);
        assert!(parse_tree_edges("0 0\n", &tet).is_err());
    }

    #[test]
    fn report_json_shape() {
        let k = crate::complex::single_tet();
        let report = Report {
            validation: k.validate(),
            trace: None,
            residual_zero: Some(true),
            wall_ms: 1.25,
        };
        let json = report.to_json();
        assert!(json.contains("\"mesh\""));
        assert!(json.contains("\"residual_zero\": true"));
    }
}
