//! Union-jack lattice of Toffoli triangles.
//!
//! Squares carry a center vertex joined to all four corners, cutting each
//! square into four triangles. Corner vertices are white (Toffoli controls),
//! centers are red (targets); one clock step per triangle. The clock order is
//! row-major over squares with the four triangles of a square visited
//! N, E, S, W — nothing in the construction depends on this beyond
//! reproducibility, so it is fixed here.

use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, DEFAULT_WIRE_CAP};
use crate::error::{Error, Result};
use crate::hamiltonian::TermHamiltonian;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexColor {
    White,
    Red,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum VertexInit {
    Zero,
    Plus,
}

/// White vertices host |0⟩ controls and red ones |+⟩ targets in the default
/// pattern; the all-plus variant prepares every vertex in |+⟩.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitPattern {
    Default,
    AllPlus,
}

impl InitPattern {
    fn init_for(&self, color: VertexColor) -> VertexInit {
        match (self, color) {
            (InitPattern::AllPlus, _) => VertexInit::Plus,
            (InitPattern::Default, VertexColor::White) => VertexInit::Zero,
            (InitPattern::Default, VertexColor::Red) => VertexInit::Plus,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Vertex {
    pub id: usize,
    pub color: VertexColor,
    pub init: VertexInit,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Triangle {
    pub controls: [usize; 2],
    pub target: usize,
    pub clock: usize,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct UnionJackLattice {
    pub rows: usize,
    pub cols: usize,
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<Triangle>,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct LatticeJson {
    pub schema_version: u32,
    pub rows: usize,
    pub cols: usize,
    pub vertices: Vec<Vertex>,
    pub triangles: Vec<Triangle>,
}

impl UnionJackLattice {
    pub fn to_json(&self) -> LatticeJson {
        LatticeJson {
            schema_version: 1,
            rows: self.rows,
            cols: self.cols,
            vertices: self.vertices.clone(),
            triangles: self.triangles.clone(),
        }
    }

    /// Triangle Toffolis in clock order, over wires numbered zero-inits first.
    pub fn to_circuit(&self) -> Result<Circuit> {
        let mut wire_of = vec![usize::MAX; self.vertices.len()];
        let mut next = 0;
        for v in self.vertices.iter().filter(|v| v.init == VertexInit::Zero) {
            wire_of[v.id] = next;
            next += 1;
        }
        let zero_inputs = next;
        for v in self.vertices.iter().filter(|v| v.init == VertexInit::Plus) {
            wire_of[v.id] = next;
            next += 1;
        }
        let mut triangles = self.triangles.clone();
        triangles.sort_by_key(|t| t.clock);
        let gates = triangles
            .iter()
            .map(|t| Gate::Toffoli {
                controls: [wire_of[t.controls[0]], wire_of[t.controls[1]]],
                target: wire_of[t.target],
            })
            .collect();
        Circuit::new(zero_inputs, self.vertices.len() - zero_inputs, gates)
    }
}

/// Full `rows × cols` lattice of squares (four triangles each) and the
/// equivalent circuit; lowering that circuit with the domain-wall backend
/// yields the localized clock Hamiltonian.
pub fn build_union_jack(
    rows: usize,
    cols: usize,
    pattern: InitPattern,
) -> Result<(UnionJackLattice, Circuit)> {
    if rows == 0 || cols == 0 {
        return Err(Error::Domain("lattice needs at least one square".into()));
    }
    let corners = (rows + 1) * (cols + 1);
    let centers = rows * cols;
    if corners + centers > DEFAULT_WIRE_CAP {
        return Err(Error::DimensionCap {
            required: 1usize << (corners + centers),
            cap: 1usize << DEFAULT_WIRE_CAP,
        });
    }
    let corner = |r: usize, c: usize| r * (cols + 1) + c;
    let center = |r: usize, c: usize| corners + r * cols + c;

    let mut vertices = Vec::with_capacity(corners + centers);
    for id in 0..corners {
        vertices.push(Vertex { id, color: VertexColor::White, init: pattern.init_for(VertexColor::White) });
    }
    for id in corners..corners + centers {
        vertices.push(Vertex { id, color: VertexColor::Red, init: pattern.init_for(VertexColor::Red) });
    }

    let mut triangles = Vec::with_capacity(4 * rows * cols);
    let mut clock = 0;
    for r in 0..rows {
        for c in 0..cols {
            let t = center(r, c);
            let sides = [
                [corner(r, c), corner(r, c + 1)],         // north
                [corner(r, c + 1), corner(r + 1, c + 1)], // east
                [corner(r + 1, c), corner(r + 1, c + 1)], // south
                [corner(r, c), corner(r + 1, c)],         // west
            ];
            for controls in sides {
                triangles.push(Triangle { controls, target: t, clock });
                clock += 1;
            }
        }
    }

    let lattice = UnionJackLattice { rows, cols, vertices, triangles };
    let circuit = lattice.to_circuit()?;
    Ok((lattice, circuit))
}

/// Smallest instance: a single triangle (two controls, one target).
pub fn single_triangle(pattern: InitPattern) -> (UnionJackLattice, Circuit) {
    let vertices = vec![
        Vertex { id: 0, color: VertexColor::White, init: pattern.init_for(VertexColor::White) },
        Vertex { id: 1, color: VertexColor::White, init: pattern.init_for(VertexColor::White) },
        Vertex { id: 2, color: VertexColor::Red, init: pattern.init_for(VertexColor::Red) },
    ];
    let triangles = vec![Triangle { controls: [0, 1], target: 2, clock: 0 }];
    let lattice = UnionJackLattice { rows: 0, cols: 0, vertices, triangles };
    let circuit = lattice.to_circuit().expect("single triangle is always in range");
    (lattice, circuit)
}

/// Largest support size over all terms.
pub fn max_term_locality(h: &TermHamiltonian) -> usize {
    h.max_locality()
}
