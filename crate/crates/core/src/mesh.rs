//! Uniform triangulations of the square plate `[-1, 1]²` with edges
//! classified against the clamped (top), free (sides) and contact (bottom)
//! boundary parts.

use std::collections::HashMap;

use serde::Serialize;

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum EdgeClass {
    Interior,
    /// Clamped part `y = 1`.
    Gamma1,
    /// Free part `x = ±1`.
    Gamma2,
    /// Frictional contact part `y = -1`.
    Gamma3,
}

#[derive(Clone, Debug)]
pub struct Edge {
    /// Endpoints, ordered counter-clockwise with respect to `plus`.
    pub vertices: [usize; 2],
    pub plus: usize,
    pub minus: Option<usize>,
    /// Local edge slot of this edge in `plus` (and `minus`).
    pub plus_local: usize,
    pub minus_local: Option<usize>,
    /// Unit normal pointing out of `plus`.
    pub normal: [f64; 2],
    pub length: f64,
    pub class: EdgeClass,
}

impl Edge {
    pub fn is_interior(&self) -> bool {
        self.class == EdgeClass::Interior
    }

    /// Member of the penalized set: interior edges and clamped boundary edges.
    pub fn is_penalized(&self) -> bool {
        matches!(self.class, EdgeClass::Interior | EdgeClass::Gamma1)
    }

    /// Elements supporting this edge, `plus` first.
    pub fn elements(&self) -> impl Iterator<Item = usize> + '_ {
        std::iter::once(self.plus).chain(self.minus)
    }
}

#[derive(Clone, Debug)]
pub struct Triangle {
    /// Counter-clockwise vertex indices.
    pub vertices: [usize; 3],
    /// Local edge `k` joins local vertices `k` and `(k + 1) % 3`.
    pub edges: [usize; 3],
}

#[derive(Clone, Debug)]
pub struct Mesh {
    pub vertices: Vec<Point>,
    pub triangles: Vec<Triangle>,
    pub edges: Vec<Edge>,
    pub cells_per_side: usize,
    /// Square cell size `2 / n`.
    pub h: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct EdgeHistogram {
    pub interior: usize,
    pub gamma1: usize,
    pub gamma2: usize,
    pub gamma3: usize,
}

#[derive(Clone, Debug, Serialize)]
pub struct MeshSummary {
    pub cells_per_side: usize,
    pub h: f64,
    pub vertices: usize,
    pub triangles: usize,
    pub edges: usize,
    pub boundary_edges: usize,
    pub penalized_edges: usize,
    pub edge_classes: EdgeHistogram,
}

/// Index sets of the edge partition.
#[derive(Clone, Debug, Default)]
pub struct EdgeSets {
    pub interior: Vec<usize>,
    pub boundary: Vec<usize>,
    pub penalized: Vec<usize>,
}

impl Mesh {
    /// `n × n` square cells, each cut by the bottom-left to top-right diagonal.
    pub fn uniform(n: usize) -> Result<Mesh> {
        if n == 0 {
            return Err(Error::InvalidResolution(n));
        }
        let h = 2.0 / n as f64;
        let vid = |i: usize, j: usize| i + j * (n + 1);
        let coord = |i: usize| -1.0 + 2.0 * i as f64 / n as f64;

        let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
        for j in 0..=n {
            for i in 0..=n {
                vertices.push([coord(i), coord(j)]);
            }
        }

        let mut tri_vertices = Vec::with_capacity(2 * n * n);
        for j in 0..n {
            for i in 0..n {
                let (bl, br) = (vid(i, j), vid(i + 1, j));
                let (tl, tr) = (vid(i, j + 1), vid(i + 1, j + 1));
                tri_vertices.push([bl, br, tr]);
                tri_vertices.push([bl, tr, tl]);
            }
        }

        let mut lookup: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges: Vec<Edge> = Vec::new();
        let mut triangles = Vec::with_capacity(tri_vertices.len());
        for (t, tv) in tri_vertices.iter().enumerate() {
            let mut tedges = [0usize; 3];
            for k in 0..3 {
                let (a, b) = (tv[k], tv[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                match lookup.get(&key) {
                    Some(&e) => {
                        let edge = &mut edges[e];
                        edge.minus = Some(t);
                        edge.minus_local = Some(k);
                        edge.class = EdgeClass::Interior;
                        tedges[k] = e;
                    }
                    None => {
                        let (pa, pb) = (vertices[a], vertices[b]);
                        let (dx, dy) = (pb[0] - pa[0], pb[1] - pa[1]);
                        let length = dx.hypot(dy);
                        let e = edges.len();
                        edges.push(Edge {
                            vertices: [a, b],
                            plus: t,
                            minus: None,
                            plus_local: k,
                            minus_local: None,
                            normal: [dy / length, -dx / length],
                            length,
                            class: boundary_class(a, b, n),
                        });
                        lookup.insert(key, e);
                        tedges[k] = e;
                    }
                }
            }
            triangles.push(Triangle {
                vertices: *tv,
                edges: tedges,
            });
        }

        Ok(Mesh {
            vertices,
            triangles,
            edges,
            cells_per_side: n,
            h,
        })
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn triangle_points(&self, t: usize) -> [Point; 3] {
        let v = self.triangles[t].vertices;
        [
            self.vertices[v[0]],
            self.vertices[v[1]],
            self.vertices[v[2]],
        ]
    }

    pub fn signed_area(&self, t: usize) -> f64 {
        let [a, b, c] = self.triangle_points(t);
        0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
    }

    /// Diameter of a triangle (its longest edge).
    pub fn diameter(&self, t: usize) -> f64 {
        self.triangles[t]
            .edges
            .iter()
            .map(|&e| self.edges[e].length)
            .fold(0.0, f64::max)
    }

    pub fn edge_sets(&self) -> EdgeSets {
        let mut sets = EdgeSets::default();
        for (i, e) in self.edges.iter().enumerate() {
            if e.is_interior() {
                sets.interior.push(i);
            } else {
                sets.boundary.push(i);
            }
            if e.is_penalized() {
                sets.penalized.push(i);
            }
        }
        sets
    }

    pub fn penalized_edges(&self) -> impl Iterator<Item = (usize, &Edge)> + '_ {
        self.edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.is_penalized())
    }

    pub fn histogram(&self) -> EdgeHistogram {
        let mut h = EdgeHistogram::default();
        for e in &self.edges {
            match e.class {
                EdgeClass::Interior => h.interior += 1,
                EdgeClass::Gamma1 => h.gamma1 += 1,
                EdgeClass::Gamma2 => h.gamma2 += 1,
                EdgeClass::Gamma3 => h.gamma3 += 1,
            }
        }
        h
    }

    pub fn summary(&self) -> MeshSummary {
        let hist = self.histogram();
        MeshSummary {
            cells_per_side: self.cells_per_side,
            h: self.h,
            vertices: self.num_vertices(),
            triangles: self.num_triangles(),
            edges: self.num_edges(),
            boundary_edges: hist.gamma1 + hist.gamma2 + hist.gamma3,
            penalized_edges: hist.interior + hist.gamma1,
            edge_classes: hist,
        }
    }

    /// Index of the triangle containing `p` (ties broken towards the lower
    /// triangle of the cell).
    pub fn locate(&self, p: Point) -> usize {
        let n = self.cells_per_side;
        let cell = |x: f64| -> (usize, f64) {
            let s = (x + 1.0) / self.h;
            let i = (s.floor().max(0.0) as usize).min(n - 1);
            (i, s - i as f64)
        };
        let (i, xi) = cell(p[0]);
        let (j, eta) = cell(p[1]);
        let base = 2 * (i + j * n);
        if xi >= eta {
            base
        } else {
            base + 1
        }
    }
}

fn boundary_class(a: usize, b: usize, n: usize) -> EdgeClass {
    let ij = |v: usize| (v % (n + 1), v / (n + 1));
    let ((ia, ja), (ib, jb)) = (ij(a), ij(b));
    if ja == n && jb == n {
        EdgeClass::Gamma1
    } else if ja == 0 && jb == 0 {
        EdgeClass::Gamma3
    } else if (ia == 0 && ib == 0) || (ia == n && ib == n) {
        EdgeClass::Gamma2
    } else {
        // Diagonals and interior grid lines; overwritten when the second
        // neighbour is found, so this value is never observed on a boundary.
        EdgeClass::Interior
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_zero_cells() {
        assert!(matches!(Mesh::uniform(0), Err(Error::InvalidResolution(0))));
    }

    #[test]
    fn two_by_two_counts() {
        let m = Mesh::uniform(2).unwrap();
        assert_eq!(
            (m.num_vertices(), m.num_triangles(), m.num_edges()),
            (9, 8, 16)
        );
        let h = m.histogram();
        assert_eq!(
            h,
            EdgeHistogram {
                interior: 8,
                gamma1: 2,
                gamma2: 4,
                gamma3: 2
            }
        );
        let sets = m.edge_sets();
        assert_eq!(sets.interior.len(), 8);
        assert_eq!(sets.boundary.len(), 8);
        assert_eq!(sets.penalized.len(), 10);
    }

    #[test]
    fn four_by_four_h_and_boundary() {
        let m = Mesh::uniform(4).unwrap();
        assert_eq!(m.h, 0.5);
        assert_eq!(m.edge_sets().boundary.len(), 16);
    }

    #[test]
    fn euler_relation_and_orientation() {
        for n in 1..7 {
            let m = Mesh::uniform(n).unwrap();
            assert_eq!(m.num_edges(), m.num_vertices() + m.num_triangles() - 1);
            let area: f64 = (0..m.num_triangles()).map(|t| m.signed_area(t)).sum();
            assert!((area - 4.0).abs() < 1e-12 * 4.0);
            for t in 0..m.num_triangles() {
                assert!(m.signed_area(t) > 0.0);
            }
        }
    }

    #[test]
    fn edge_adjacency_and_normals() {
        let m = Mesh::uniform(5).unwrap();
        let sqrt2 = 2f64.sqrt();
        for e in &m.edges {
            assert!((e.normal[0].hypot(e.normal[1]) - 1.0).abs() < 1e-15);
            assert!((e.length - m.h).abs() < 1e-14 || (e.length - m.h * sqrt2).abs() < 1e-14);
            assert_eq!(e.minus.is_some(), e.is_interior());
            if let (Some(minus), Some(ml)) = (e.minus, e.minus_local) {
                // the neighbour traverses the edge in the opposite direction
                let tv = m.triangles[minus].vertices;
                assert_eq!([tv[(ml + 1) % 3], tv[ml]], e.vertices);
            }
            // normal points away from the plus element's centroid
            let [a, b, c] = m.triangle_points(e.plus);
            let cen = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
            let p = m.vertices[e.vertices[0]];
            assert!((p[0] - cen[0]) * e.normal[0] + (p[1] - cen[1]) * e.normal[1] > 0.0);
        }
    }

    #[test]
    fn boundary_classes_match_geometry() {
        let m = Mesh::uniform(6).unwrap();
        for e in &m.edges {
            let [a, b] = e.vertices.map(|v| m.vertices[v]);
            let expect = if a[1] == 1.0 && b[1] == 1.0 {
                EdgeClass::Gamma1
            } else if a[1] == -1.0 && b[1] == -1.0 {
                EdgeClass::Gamma3
            } else if (a[0].abs() == 1.0 && a[0] == b[0]) && e.minus.is_none() {
                EdgeClass::Gamma2
            } else {
                EdgeClass::Interior
            };
            assert_eq!(e.class, expect);
        }
    }

    #[test]
    fn locate_finds_containing_triangle() {
        let m = Mesh::uniform(4).unwrap();
        for t in 0..m.num_triangles() {
            let [a, b, c] = m.triangle_points(t);
            let cen = [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0];
            assert_eq!(m.locate(cen), t);
        }
    }
}
