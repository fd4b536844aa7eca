//! Uniform P1 meshes of the supported domains.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;
use core::f64::consts::PI;

use crate::problem::{DomainKind, FacetSelector};
use crate::{Error, Point, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FacetTag {
    /// Part of `S`: the solution is constrained to vanish there.
    Dirichlet,
    /// Robin part `∂Ω \ S`.
    Robin,
}

/// Segment (1D) or triangle (2D), counter-clockwise in 2D.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Cell {
    nodes: [usize; 3],
    len: u8,
}

impl Cell {
    pub fn segment(a: usize, b: usize) -> Self {
        Self { nodes: [a, b, usize::MAX], len: 2 }
    }

    pub fn triangle(a: usize, b: usize, c: usize) -> Self {
        Self { nodes: [a, b, c], len: 3 }
    }

    #[inline]
    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.len as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryFacet {
    nodes: [usize; 2],
    len: u8,
    /// Outward unit normal.
    pub normal: Point,
    /// Length in 2D; 1 (counting measure) for the end points of an interval.
    pub measure: f64,
    pub midpoint: Point,
    pub tag: FacetTag,
}

impl BoundaryFacet {
    /// Facet with one (1D) or two (2D) nodes.
    pub fn new(nodes: &[usize], normal: Point, measure: f64, midpoint: Point, tag: FacetTag) -> Self {
        assert!(matches!(nodes.len(), 1 | 2), "a facet has one or two nodes");
        let mut n = [usize::MAX; 2];
        n[..nodes.len()].copy_from_slice(nodes);
        Self {
            nodes: n,
            len: nodes.len() as u8,
            normal,
            measure,
            midpoint,
            tag,
        }
    }

    #[inline]
    pub fn nodes(&self) -> &[usize] {
        &self.nodes[..self.len as usize]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub dim: usize,
    pub nodes: Vec<Point>,
    pub cells: Vec<Cell>,
    pub facets: Vec<BoundaryFacet>,
}

/// P1 geometry of one cell: measure and constant basis gradients.
#[derive(Debug, Clone, Copy)]
pub struct CellGeometry {
    pub measure: f64,
    /// Gradient of the local basis function attached to each vertex.
    pub gradients: [Point; 3],
}

impl Mesh {
    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn cell_vertices(&self, cell: &Cell) -> [Point; 3] {
        let n = cell.nodes();
        let mut v = [[0.0; 2]; 3];
        for (k, &i) in n.iter().enumerate() {
            v[k] = self.nodes[i];
        }
        v
    }

    pub fn geometry(&self, cell: &Cell) -> CellGeometry {
        let v = self.cell_vertices(cell);
        if self.dim == 1 {
            let h = v[1][0] - v[0][0];
            CellGeometry {
                measure: h,
                gradients: [[-1.0 / h, 0.0], [1.0 / h, 0.0], [0.0, 0.0]],
            }
        } else {
            let det = (v[1][0] - v[0][0]) * (v[2][1] - v[0][1]) - (v[2][0] - v[0][0]) * (v[1][1] - v[0][1]);
            let g = |a: usize, b: usize| [(v[a][1] - v[b][1]) / det, (v[b][0] - v[a][0]) / det];
            CellGeometry {
                measure: 0.5 * det,
                gradients: [g(1, 2), g(2, 0), g(0, 1)],
            }
        }
    }

    pub fn measure(&self) -> f64 {
        self.cells.iter().map(|c| self.geometry(c).measure).sum()
    }

    /// Total length of the boundary (number of end points in 1D).
    pub fn boundary_measure(&self) -> f64 {
        self.facets.iter().map(|f| f.measure).sum()
    }

    /// Nodes on the closure of `S`: every node of a facet tagged `Dirichlet`.
    pub fn dirichlet_nodes(&self) -> Vec<usize> {
        let mut mark = alloc::vec![false; self.nodes.len()];
        for f in self.facets.iter().filter(|f| f.tag == FacetTag::Dirichlet) {
            for &i in f.nodes() {
                mark[i] = true;
            }
        }
        (0..self.nodes.len()).filter(|&i| mark[i]).collect()
    }

    /// Checks conformity, positive cell measures and unit normals.
    pub fn check(&self) -> Result<()> {
        for c in &self.cells {
            if !(self.geometry(c).measure > 0.0) {
                return Err(Error::InvalidDomain("non-positive cell measure"));
            }
        }
        for f in &self.facets {
            let len = libm::hypot(f.normal[0], f.normal[1]);
            if (len - 1.0).abs() > 1e-12 {
                return Err(Error::InvalidDomain("normal is not a unit vector"));
            }
        }
        if self.dim == 2 {
            let mut edges: BTreeMap<(usize, usize), usize> = BTreeMap::new();
            for c in &self.cells {
                let n = c.nodes();
                for k in 0..3 {
                    let (a, b) = (n[k], n[(k + 1) % 3]);
                    *edges.entry((a.min(b), a.max(b))).or_insert(0) += 1;
                }
            }
            if edges.values().any(|&m| m > 2) {
                return Err(Error::InvalidDomain("edge shared by more than two cells"));
            }
            let boundary = edges.values().filter(|&&m| m == 1).count();
            if boundary != self.facets.len() {
                return Err(Error::InvalidDomain("boundary facets do not match open edges"));
            }
        }
        Ok(())
    }
}

/// Uniform mesh of the domain; boundary facets whose midpoint satisfies
/// `selector` are tagged as part of `S`.
///
/// `resolution` is the number of segments (interval), cells per axis
/// (rectangle) or concentric rings (disk polygon).
pub fn build_mesh(domain: DomainKind, resolution: usize, selector: &FacetSelector) -> Result<Mesh> {
    domain.check()?;
    if resolution < 2 {
        return Err(Error::InvalidDomain("resolution must be at least 2"));
    }
    let mesh = match domain {
        DomainKind::Interval { a, b } => interval(a, b, resolution, selector),
        DomainKind::Rectangle { ax, bx, ay, by } => {
            let mut nodes = Vec::with_capacity((resolution + 1) * (resolution + 1));
            for j in 0..=resolution {
                for i in 0..=resolution {
                    let (s, t) = (i as f64 / resolution as f64, j as f64 / resolution as f64);
                    nodes.push([ax + (bx - ax) * s, ay + (by - ay) * t]);
                }
            }
            let id = |i: usize, j: usize| j * (resolution + 1) + i;
            let mut cells = Vec::with_capacity(2 * resolution * resolution);
            for j in 0..resolution {
                for i in 0..resolution {
                    cells.push(Cell::triangle(id(i, j), id(i + 1, j), id(i + 1, j + 1)));
                    cells.push(Cell::triangle(id(i, j), id(i + 1, j + 1), id(i, j + 1)));
                }
            }
            planar(nodes, cells, selector)
        }
        DomainKind::UnitDiskPolygon { segments } => disk(segments, resolution, selector),
    };
    mesh.check()?;
    Ok(mesh)
}

fn interval(a: f64, b: f64, n: usize, selector: &FacetSelector) -> Mesh {
    let nodes: Vec<Point> = (0..=n).map(|i| [a + (b - a) * i as f64 / n as f64, 0.0]).collect();
    let cells = (0..n).map(|i| Cell::segment(i, i + 1)).collect();
    let facet = |node: usize, normal: f64| {
        let p = nodes[node];
        BoundaryFacet {
            nodes: [node, usize::MAX],
            len: 1,
            normal: [normal, 0.0],
            measure: 1.0,
            midpoint: p,
            tag: if selector.contains(p) { FacetTag::Dirichlet } else { FacetTag::Robin },
        }
    };
    let facets = alloc::vec![facet(0, -1.0), facet(n, 1.0)];
    Mesh {
        dim: 1,
        nodes,
        cells,
        facets,
    }
}

/// Orients cells counter-clockwise and extracts the boundary facets.
fn planar(nodes: Vec<Point>, mut cells: Vec<Cell>, selector: &FacetSelector) -> Mesh {
    for c in cells.iter_mut() {
        let [p, q, r] = [nodes[c.nodes[0]], nodes[c.nodes[1]], nodes[c.nodes[2]]];
        let det = (q[0] - p[0]) * (r[1] - p[1]) - (r[0] - p[0]) * (q[1] - p[1]);
        if det < 0.0 {
            c.nodes.swap(1, 2);
        }
    }
    let mut count: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for c in &cells {
        for k in 0..3 {
            let (a, b) = (c.nodes[k], c.nodes[(k + 1) % 3]);
            *count.entry((a.min(b), a.max(b))).or_insert(0) += 1;
        }
    }
    let mut facets = Vec::new();
    for c in &cells {
        for k in 0..3 {
            let (a, b) = (c.nodes[k], c.nodes[(k + 1) % 3]);
            if count[&(a.min(b), a.max(b))] != 1 {
                continue;
            }
            let (p, q) = (nodes[a], nodes[b]);
            let (dx, dy) = (q[0] - p[0], q[1] - p[1]);
            let len = libm::hypot(dx, dy);
            let midpoint = [0.5 * (p[0] + q[0]), 0.5 * (p[1] + q[1])];
            facets.push(BoundaryFacet {
                nodes: [a, b],
                len: 2,
                normal: [dy / len, -dx / len],
                measure: len,
                midpoint,
                tag: if selector.contains(midpoint) { FacetTag::Dirichlet } else { FacetTag::Robin },
            });
        }
    }
    Mesh {
        dim: 2,
        nodes,
        cells,
        facets,
    }
}

/// Concentric rings of nodes; ring `j` has radius `j / rings` and
/// `ceil(segments j / rings)` (at least 3) equally spaced nodes, so the
/// outer ring is the regular `segments`-gon inscribed in the unit circle.
fn disk(segments: usize, rings: usize, selector: &FacetSelector) -> Mesh {
    let mut nodes: Vec<Point> = alloc::vec![[0.0, 0.0]];
    let mut ring_start = alloc::vec![0usize];
    let mut ring_len = alloc::vec![1usize];
    for j in 1..=rings {
        let count = (segments * j).div_ceil(rings).max(3);
        let r = j as f64 / rings as f64;
        ring_start.push(nodes.len());
        ring_len.push(count);
        for i in 0..count {
            let th = 2.0 * PI * i as f64 / count as f64;
            nodes.push([r * libm::cos(th), r * libm::sin(th)]);
        }
    }
    let mut cells = Vec::new();
    // Fan around the centre.
    for i in 0..ring_len[1] {
        let s = ring_start[1];
        cells.push(Cell::triangle(0, s + i, s + (i + 1) % ring_len[1]));
    }
    for j in 1..rings {
        let (si, ni) = (ring_start[j], ring_len[j]);
        let (so, no) = (ring_start[j + 1], ring_len[j + 1]);
        let (mut i, mut o) = (0usize, 0usize);
        while i < ni || o < no {
            let next_in = (i + 1) as f64 / ni as f64;
            let next_out = (o + 1) as f64 / no as f64;
            if o < no && (i == ni || next_out <= next_in) {
                cells.push(Cell::triangle(si + i % ni, so + o % no, so + (o + 1) % no));
                o += 1;
            } else {
                cells.push(Cell::triangle(si + i % ni, so + o % no, si + (i + 1) % ni));
                i += 1;
            }
        }
    }
    planar(nodes, cells, selector)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interval_counts() {
        let m = build_mesh(DomainKind::Interval { a: 0.0, b: 1.0 }, 4, &FacetSelector::none()).unwrap();
        assert_eq!(m.node_count(), 5);
        assert_eq!(m.cells.len(), 4);
        assert_eq!(m.facets.len(), 2);
        assert_eq!(m.facets[0].normal, [-1.0, 0.0]);
        assert!(m.dirichlet_nodes().is_empty());
    }

    #[test]
    fn rectangle_all_dirichlet() {
        let dom = DomainKind::Rectangle { ax: 0.0, bx: 2.0, ay: 0.0, by: 1.0 };
        let m = build_mesh(dom, 4, &FacetSelector::all()).unwrap();
        assert_eq!(m.facets.len(), 16);
        assert!(m.facets.iter().all(|f| f.tag == FacetTag::Dirichlet));
        assert_eq!(m.dirichlet_nodes().len(), 16);
        assert!((m.measure() - 2.0).abs() < 1e-14);
        assert!((m.boundary_measure() - 6.0).abs() < 1e-14);
        for f in &m.facets {
            // outward: normal points away from the centre
            let d = [f.midpoint[0] - 1.0, f.midpoint[1] - 0.5];
            assert!(d[0] * f.normal[0] + d[1] * f.normal[1] > 0.0);
        }
    }

    #[test]
    fn disk_polygon_perimeter() {
        for (k, rings) in [(16usize, 4usize), (64, 8), (128, 12)] {
            let m = build_mesh(DomainKind::UnitDiskPolygon { segments: k }, rings, &FacetSelector::none()).unwrap();
            let exact = 2.0 * k as f64 * libm::sin(PI / k as f64);
            assert_eq!(m.facets.len(), k);
            assert!((m.boundary_measure() - exact).abs() < 1e-12);
            let area = DomainKind::UnitDiskPolygon { segments: k }.measure();
            assert!((m.measure() - area).abs() < 1e-12);
        }
        let perim = |k: usize| 2.0 * k as f64 * libm::sin(PI / k as f64);
        assert!((perim(1024) - 2.0 * PI).abs() < (perim(64) - 2.0 * PI).abs());
    }

    #[test]
    fn too_coarse_is_rejected() {
        let r = build_mesh(DomainKind::Interval { a: 0.0, b: 1.0 }, 1, &FacetSelector::none());
        assert!(matches!(r, Err(Error::InvalidDomain(_))));
    }

    #[test]
    fn p1_gradients_sum_to_zero() {
        let m = build_mesh(DomainKind::UnitDiskPolygon { segments: 12 }, 3, &FacetSelector::none()).unwrap();
        for c in &m.cells {
            let g = m.geometry(c).gradients;
            assert!((g[0][0] + g[1][0] + g[2][0]).abs() < 1e-12);
            assert!((g[0][1] + g[1][1] + g[2][1]).abs() < 1e-12);
        }
    }
}
