//! Oriented cell complexes built from tetrahedral meshes.
//!
//! Cells carry explicit signed boundary lists, so the data model also admits
//! general polyhedral cells; the constructors and readers in this crate only
//! ever produce simplicial complexes. All algorithms downstream are purely
//! combinatorial; coordinates are carried for I/O and generators only.

use crate::algebra::{Id, Scalar, SignedSparseMatrix};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ComplexError {
    #[error("tetrahedron {0:?} appears more than once")]
    DuplicateTet([u32; 4]),
    #[error("vertex id {0} out of range")]
    DanglingVertexId(u32),
    #[error("degenerate tetrahedron {0:?} (repeated vertex)")]
    DegenerateTet([u32; 4]),
    #[error("cell boundary references missing {dim}-cell {id}")]
    DanglingCellRef { dim: usize, id: Id },
    #[error("coordinate list has {got} entries, expected {expected}")]
    CoordinateCount { expected: usize, got: usize },
}

/// One k-cell: its signed boundary over (k-1)-cell ids, plus the sorted
/// vertex set of its closure (used by I/O, generators and tree builders).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub vertices: Vec<u32>,
    pub boundary: Vec<(Id, i8)>,
}

/// Immutable oriented regular cell complex.
#[derive(Debug, Clone)]
pub struct CellComplex {
    coordinates: Option<Vec<[f64; 3]>>,
    /// cells[k] lists the k-cells; ids are positions in these lists.
    cells: [Vec<Cell>; 4],
    edge_lookup: HashMap<[u32; 2], Id>,
    face_lookup: HashMap<[u32; 3], Id>,
}

fn sorted<const N: usize>(mut t: [u32; N]) -> [u32; N] {
    t.sort_unstable();
    t
}

impl CellComplex {
    /// Builds the full simplicial complex spanned by a tetrahedron list.
    ///
    /// Edges and faces are derived deterministically: cells of every
    /// dimension are id-ordered lexicographically by sorted vertex tuple, a
    /// cell's orientation is the increasing order of its vertices, and the
    /// facet omitting the vertex at position i gets sign (-1)^i.
    pub fn build_from_tetrahedra(
        vertex_count: usize,
        tets: &[[u32; 4]],
        coordinates: Option<Vec<[f64; 3]>>,
    ) -> Result<Self, ComplexError> {
        if let Some(coords) = &coordinates {
            if coords.len() != vertex_count {
                return Err(ComplexError::CoordinateCount {
                    expected: vertex_count,
                    got: coords.len(),
                });
            }
        }
        let mut tet_set: BTreeSet<[u32; 4]> = BTreeSet::new();
        for tet in tets {
            for &v in tet {
                if v as usize >= vertex_count {
                    return Err(ComplexError::DanglingVertexId(v));
                }
            }
            let key = sorted(*tet);
            if key[0] == key[1] || key[1] == key[2] || key[2] == key[3] {
                return Err(ComplexError::DegenerateTet(*tet));
            }
            if !tet_set.insert(key) {
                return Err(ComplexError::DuplicateTet(key));
            }
        }

        let mut edge_set: BTreeSet<[u32; 2]> = BTreeSet::new();
        let mut face_set: BTreeSet<[u32; 3]> = BTreeSet::new();
        for t in &tet_set {
            let &[a, b, c, d] = t;
            for e in [[a, b], [a, c], [a, d], [b, c], [b, d], [c, d]] {
                edge_set.insert(e);
            }
            for f in [[b, c, d], [a, c, d], [a, b, d], [a, b, c]] {
                face_set.insert(f);
            }
        }

        let edge_lookup: HashMap<[u32; 2], Id> = edge_set
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i as Id))
            .collect();
        let face_lookup: HashMap<[u32; 3], Id> = face_set
            .iter()
            .enumerate()
            .map(|(i, f)| (*f, i as Id))
            .collect();

        let vertices: Vec<Cell> = (0..vertex_count as u32)
            .map(|v| Cell {
                vertices: vec![v],
                boundary: Vec::new(),
            })
            .collect();
        let edges: Vec<Cell> = edge_set
            .iter()
            .map(|&[a, b]| Cell {
                vertices: vec![a, b],
                boundary: vec![(b, 1), (a, -1)],
            })
            .collect();
        let faces: Vec<Cell> = face_set
            .iter()
            .map(|&[a, b, c]| Cell {
                vertices: vec![a, b, c],
                boundary: vec![
                    (edge_lookup[&[b, c]], 1),
                    (edge_lookup[&[a, c]], -1),
                    (edge_lookup[&[a, b]], 1),
                ],
            })
            .collect();
        let volumes: Vec<Cell> = tet_set
            .iter()
            .map(|&[a, b, c, d]| Cell {
                vertices: vec![a, b, c, d],
                boundary: vec![
                    (face_lookup[&[b, c, d]], 1),
                    (face_lookup[&[a, c, d]], -1),
                    (face_lookup[&[a, b, d]], 1),
                    (face_lookup[&[a, b, c]], -1),
                ],
            })
            .collect();

        Ok(CellComplex {
            coordinates,
            cells: [vertices, edges, faces, volumes],
            edge_lookup,
            face_lookup,
        })
    }

    /// Raw constructor from explicit signed boundary lists. This is the door
    /// the polyhedral-capable data model leaves open; only boundary-reference
    /// integrity is enforced here, everything else is `validate`'s job.
    pub fn from_boundaries(
        vertex_count: usize,
        coordinates: Option<Vec<[f64; 3]>>,
        edges: Vec<Vec<(Id, i8)>>,
        faces: Vec<Vec<(Id, i8)>>,
        volumes: Vec<Vec<(Id, i8)>>,
    ) -> Result<Self, ComplexError> {
        if let Some(coords) = &coordinates {
            if coords.len() != vertex_count {
                return Err(ComplexError::CoordinateCount {
                    expected: vertex_count,
                    got: coords.len(),
                });
            }
        }
        let counts = [vertex_count, edges.len(), faces.len(), volumes.len()];
        let mut cells: [Vec<Cell>; 4] = [
            (0..vertex_count as u32)
                .map(|v| Cell {
                    vertices: vec![v],
                    boundary: Vec::new(),
                })
                .collect(),
            Vec::new(),
            Vec::new(),
            Vec::new(),
        ];
        for (k, list) in [(1usize, edges), (2, faces), (3, volumes)] {
            for boundary in list {
                let mut verts: BTreeSet<u32> = BTreeSet::new();
                for &(id, _) in &boundary {
                    if id as usize >= counts[k - 1] {
                        return Err(ComplexError::DanglingCellRef { dim: k - 1, id });
                    }
                    verts.extend(cells[k - 1][id as usize].vertices.iter().copied());
                }
                cells[k].push(Cell {
                    vertices: verts.into_iter().collect(),
                    boundary,
                });
            }
        }
        let mut edge_lookup = HashMap::new();
        for (i, e) in cells[1].iter().enumerate() {
            if let [a, b] = e.vertices[..] {
                edge_lookup.insert([a, b], i as Id);
            }
        }
        let mut face_lookup = HashMap::new();
        for (i, f) in cells[2].iter().enumerate() {
            if let [a, b, c] = f.vertices[..] {
                face_lookup.insert([a, b, c], i as Id);
            }
        }
        Ok(CellComplex {
            coordinates,
            cells,
            edge_lookup,
            face_lookup,
        })
    }

    pub fn count(&self, k: usize) -> usize {
        self.cells[k].len()
    }

    pub fn vertex_count(&self) -> usize {
        self.count(0)
    }

    pub fn edge_count(&self) -> usize {
        self.count(1)
    }

    pub fn face_count(&self) -> usize {
        self.count(2)
    }

    pub fn volume_count(&self) -> usize {
        self.count(3)
    }

    pub fn cells(&self, k: usize) -> &[Cell] {
        &self.cells[k]
    }

    pub fn boundary(&self, k: usize, id: Id) -> &[(Id, i8)] {
        &self.cells[k][id as usize].boundary
    }

    pub fn coordinates(&self) -> Option<&[[f64; 3]]> {
        self.coordinates.as_deref()
    }

    pub fn edge_between(&self, a: u32, b: u32) -> Option<Id> {
        self.edge_lookup.get(&sorted([a, b])).copied()
    }

    pub fn face_by_vertices(&self, f: [u32; 3]) -> Option<Id> {
        self.face_lookup.get(&sorted(f)).copied()
    }

    /// Connectivity of the vertex-edge graph.
    pub fn is_connected(&self) -> bool {
        self.vertex_graph_connected()
    }

    /// Euler characteristic v - e + f - c.
    pub fn euler_characteristic(&self) -> i64 {
        self.count(0) as i64 - self.count(1) as i64 + self.count(2) as i64 - self.count(3) as i64
    }

    /// For each face, the volumes containing it (with incidence sign).
    pub fn face_cofaces(&self) -> Vec<Vec<(Id, i8)>> {
        let mut cof = vec![Vec::new(); self.count(2)];
        for (c, cell) in self.cells[3].iter().enumerate() {
            for &(f, s) in &cell.boundary {
                cof[f as usize].push((c as Id, s));
            }
        }
        cof
    }

    /// Incidence matrix D_k: rows are (k+1)-cells, columns k-cells, entries
    /// the signed incidence numbers. D_0 = G, D_1 = C, D_2 = D.
    pub fn incidence_matrix(&self, k: usize) -> SignedSparseMatrix {
        assert!(k <= 2, "incidence matrices exist for k in 0..=2");
        let mut m = SignedSparseMatrix::new(
            k + 1,
            k,
            0..self.count(k + 1) as Id,
            0..self.count(k) as Id,
        );
        for (t, cell) in self.cells[k + 1].iter().enumerate() {
            for &(s, sign) in &cell.boundary {
                m.set(t as Id, s, Scalar::from_int(sign as i64));
            }
        }
        m
    }

    /// Diagnostic validation: boundary-of-boundary, regularity, face
    /// manifoldness, connectivity, and Euler characteristics. Never errors;
    /// the report says what holds.
    pub fn validate(&self) -> ValidationReport {
        let boundary_of_boundary_ok = (2..=3).all(|k| {
            self.cells[k].iter().all(|cell| {
                let mut acc: BTreeMap<Id, i64> = BTreeMap::new();
                for &(mid, s) in &cell.boundary {
                    for &(low, t) in &self.cells[k - 1][mid as usize].boundary {
                        *acc.entry(low).or_insert(0) += s as i64 * t as i64;
                    }
                }
                acc.values().all(|&v| v == 0)
            })
        });

        let regular_ok = self.cells[1].iter().all(|e| {
            e.vertices.len() == 2 && e.boundary.len() == 2
        }) && self.cells[2].iter().all(|f| f.boundary.len() >= 3)
            && self.cells[3].iter().all(|c| c.boundary.len() >= 4);

        let cofaces = self.face_cofaces();
        let manifold_ok = cofaces.iter().all(|v| v.len() <= 2);

        let vertex_graph_connected = self.vertex_graph_connected();

        let euler = self.euler_characteristic();

        let (boundary_surface_connected, boundary_euler) = self.boundary_surface(&cofaces);

        ValidationReport {
            vertices: self.count(0),
            edges: self.count(1),
            faces: self.count(2),
            volumes: self.count(3),
            boundary_of_boundary_ok,
            regular_ok,
            manifold_ok,
            vertex_graph_connected,
            euler,
            boundary_surface_connected,
            boundary_euler,
        }
    }

    fn vertex_graph_connected(&self) -> bool {
        let n = self.count(0);
        if n == 0 {
            return true;
        }
        let mut adj: Vec<Vec<u32>> = vec![Vec::new(); n];
        for e in &self.cells[1] {
            if let [a, b] = e.vertices[..] {
                adj[a as usize].push(b);
                adj[b as usize].push(a);
            }
        }
        let mut seen = vec![false; n];
        let mut stack = vec![0u32];
        seen[0] = true;
        let mut visited = 1;
        while let Some(v) = stack.pop() {
            for &w in &adj[v as usize] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    visited += 1;
                    stack.push(w);
                }
            }
        }
        visited == n
    }

    /// Connectivity and Euler characteristic of the boundary surface (faces
    /// lying in at most one volume). Only meaningful when volumes exist.
    fn boundary_surface(&self, cofaces: &[Vec<(Id, i8)>]) -> (bool, Option<i64>) {
        if self.count(3) == 0 {
            return (true, None);
        }
        let boundary_faces: Vec<Id> = cofaces
            .iter()
            .enumerate()
            .filter(|(_, v)| v.len() == 1)
            .map(|(f, _)| f as Id)
            .collect();
        if boundary_faces.is_empty() {
            return (true, None);
        }
        let mut b_edges: BTreeSet<Id> = BTreeSet::new();
        let mut b_verts: BTreeSet<u32> = BTreeSet::new();
        let mut edge_to_faces: BTreeMap<Id, Vec<Id>> = BTreeMap::new();
        for &f in &boundary_faces {
            for &(e, _) in &self.cells[2][f as usize].boundary {
                b_edges.insert(e);
                edge_to_faces.entry(e).or_default().push(f);
            }
            b_verts.extend(self.cells[2][f as usize].vertices.iter().copied());
        }
        let euler =
            b_verts.len() as i64 - b_edges.len() as i64 + boundary_faces.len() as i64;
        // face-adjacency BFS over shared edges
        let mut seen: BTreeSet<Id> = BTreeSet::new();
        let mut stack = vec![boundary_faces[0]];
        seen.insert(boundary_faces[0]);
        while let Some(f) = stack.pop() {
            for &(e, _) in &self.cells[2][f as usize].boundary {
                for &g in &edge_to_faces[&e] {
                    if seen.insert(g) {
                        stack.push(g);
                    }
                }
            }
        }
        (seen.len() == boundary_faces.len(), Some(euler))
    }
}

/// Outcome of [`CellComplex::validate`].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationReport {
    pub vertices: usize,
    pub edges: usize,
    pub faces: usize,
    pub volumes: usize,
    pub boundary_of_boundary_ok: bool,
    pub regular_ok: bool,
    pub manifold_ok: bool,
    pub vertex_graph_connected: bool,
    pub euler: i64,
    pub boundary_surface_connected: bool,
    pub boundary_euler: Option<i64>,
}

impl ValidationReport {
    /// Euler characteristic differs from the trivial-topology value 1. The
    /// solver still runs; completeness ranks then come from the elimination
    /// fallback instead of the Euler formulas.
    pub fn topology_warning(&self) -> bool {
        self.euler != 1
    }

    /// All structural checks pass and the topology is trivial; such a
    /// complex is admissible solver input without caveats.
    pub fn all_pass(&self) -> bool {
        self.boundary_of_boundary_ok
            && self.regular_ok
            && self.manifold_ok
            && self.vertex_graph_connected
            && self.euler == 1
            && self.boundary_surface_connected
    }
}

/// The standalone tetrahedron on vertices {0,1,2,3}; ubiquitous in tests.
pub fn single_tet() -> CellComplex {
    CellComplex::build_from_tetrahedra(4, &[[0, 1, 2, 3]], None).expect("valid tet")
}

/// Two tetrahedra glued along the face {1,2,3}.
pub fn two_tets() -> CellComplex {
    CellComplex::build_from_tetrahedra(5, &[[0, 1, 2, 3], [1, 2, 3, 4]], None).expect("valid pair")
}
