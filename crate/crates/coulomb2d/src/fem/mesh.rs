//! Triangulated polygonal domains with tagged boundary.
//!
//! A [`DomainMesh`] holds P1 triangles plus a complete list of boundary
//! edges, each tagged as clamped (`U`), loaded (`T`) or potential contact
//! (`C`). Validation establishes the invariants every solver relies on:
//! positively oriented triangles, a consistently oriented boundary loop,
//! a clamped part of positive measure, and a contact zone whose closure
//! does not touch the clamped part. The contact edges must form a single
//! open chain; the constructor orders its nodes along the boundary
//! direction and precomputes the per-node outward normals, tangents,
//! lumped boundary weights and arclength coordinates used by the contact
//! solvers.
//!
//! Frame convention on the contact chain: the tangent `t` and outward
//! normal `n` satisfy `n = rot90(t)` (rotating the tangent by +90° gives
//! the normal), so the body lies on the negative-normal side.

use serde::Deserialize;
use std::collections::{BTreeMap, BTreeSet};
use thiserror::Error;

/// Boundary-condition tag of a boundary edge.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, Deserialize)]
pub enum BoundaryTag {
    /// Clamped: zero displacement.
    U,
    /// Natural: surface traction (possibly zero).
    T,
    /// Potential contact with the rigid obstacle.
    C,
}

/// A tagged boundary edge between two node indices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BoundaryEdge {
    pub nodes: [usize; 2],
    pub tag: BoundaryTag,
}

/// Validation error for [`DomainMesh`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MeshError {
    #[error("node index {0} out of range")]
    NodeOutOfRange(usize),
    #[error("triangle {0} is degenerate (zero area)")]
    DegenerateTriangle(usize),
    #[error("edge ({0}, {1}) is not a boundary edge of the triangulation")]
    NotABoundaryEdge(usize, usize),
    #[error("boundary edge ({0}, {1}) of the triangulation is not tagged")]
    UntaggedBoundaryEdge(usize, usize),
    #[error("boundary edge ({0}, {1}) tagged more than once")]
    DuplicateBoundaryEdge(usize, usize),
    #[error("clamped boundary is empty; at least one U edge is required")]
    EmptyClampedBoundary,
    #[error("node {0} lies in the closures of both the clamped and contact boundaries")]
    ClampedTouchesContact(usize),
    #[error("contact edges do not form a single open chain")]
    ContactNotAChain,
    #[error("mesh parse error: {0}")]
    Parse(String),
}

/// Validated triangulation with boundary tags and contact-chain geometry.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainMesh {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<BoundaryEdge>,
    areas: Vec<f64>,
    dirichlet_nodes: Vec<usize>,
    contact_nodes: Vec<usize>,
    contact_normals: Vec<[f64; 2]>,
    contact_tangents: Vec<[f64; 2]>,
    contact_weights: Vec<f64>,
    contact_arclength: Vec<f64>,
}

/// JSON encoding of a mesh.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshJson {
    nodes: Vec<[f64; 2]>,
    triangles: Vec<[usize; 3]>,
    boundary_edges: Vec<MeshJsonEdge>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct MeshJsonEdge {
    n1: usize,
    n2: usize,
    tag: BoundaryTag,
}

impl DomainMesh {
    /// Builds and validates a mesh.
    ///
    /// Triangles are reoriented to positive area if needed. Boundary edges
    /// may be listed in either direction; they are normalized to the
    /// direction induced by the adjacent triangle (counterclockwise around
    /// the body). The tagged edges must cover the triangulation boundary
    /// exactly once.
    pub fn new(
        nodes: Vec<[f64; 2]>,
        triangles: Vec<[usize; 3]>,
        boundary_edges: Vec<BoundaryEdge>,
    ) -> Result<Self, MeshError> {
        let n_nodes = nodes.len();
        let mut tris = triangles;
        let mut areas = Vec::with_capacity(tris.len());
        for (ti, tri) in tris.iter_mut().enumerate() {
            for &v in tri.iter() {
                if v >= n_nodes {
                    return Err(MeshError::NodeOutOfRange(v));
                }
            }
            let a = signed_area(&nodes, *tri);
            if a == 0.0 {
                return Err(MeshError::DegenerateTriangle(ti));
            }
            if a < 0.0 {
                tri.swap(1, 2);
            }
            areas.push(a.abs());
        }

        // Directed edges of the (now positively oriented) triangles. A
        // boundary edge appears exactly once as a directed edge and never
        // in reverse.
        let mut directed: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for tri in &tris {
            for k in 0..3 {
                let e = (tri[k], tri[(k + 1) % 3]);
                *directed.entry(e).or_insert(0) += 1;
            }
        }
        let is_boundary = |a: usize, b: usize| -> bool {
            directed.get(&(a, b)).copied().unwrap_or(0) == 1
                && directed.get(&(b, a)).copied().unwrap_or(0) == 0
        };

        // Normalize tagged edges to the triangle-induced direction and
        // check coverage.
        let mut edges = Vec::with_capacity(boundary_edges.len());
        let mut seen: BTreeSet<(usize, usize)> = BTreeSet::new();
        for e in &boundary_edges {
            let [p, q] = e.nodes;
            if p >= n_nodes || q >= n_nodes {
                return Err(MeshError::NodeOutOfRange(p.max(q)));
            }
            let oriented = if is_boundary(p, q) {
                (p, q)
            } else if is_boundary(q, p) {
                (q, p)
            } else {
                return Err(MeshError::NotABoundaryEdge(p, q));
            };
            if !seen.insert(oriented) {
                return Err(MeshError::DuplicateBoundaryEdge(p, q));
            }
            edges.push(BoundaryEdge {
                nodes: [oriented.0, oriented.1],
                tag: e.tag,
            });
        }
        for (&(a, b), &count) in &directed {
            if count == 1 && directed.get(&(b, a)).copied().unwrap_or(0) == 0 && !seen.contains(&(a, b))
            {
                return Err(MeshError::UntaggedBoundaryEdge(a, b));
            }
        }

        // Clamped boundary must have positive measure and stay away from
        // the contact closure.
        let mut dirichlet: BTreeSet<usize> = BTreeSet::new();
        let mut contact_node_set: BTreeSet<usize> = BTreeSet::new();
        for e in &edges {
            match e.tag {
                BoundaryTag::U => {
                    dirichlet.insert(e.nodes[0]);
                    dirichlet.insert(e.nodes[1]);
                }
                BoundaryTag::C => {
                    contact_node_set.insert(e.nodes[0]);
                    contact_node_set.insert(e.nodes[1]);
                }
                BoundaryTag::T => {}
            }
        }
        if dirichlet.is_empty() {
            return Err(MeshError::EmptyClampedBoundary);
        }
        if let Some(&shared) = dirichlet.intersection(&contact_node_set).next() {
            return Err(MeshError::ClampedTouchesContact(shared));
        }

        // Order the contact nodes along the (directed) chain of C edges.
        let c_edges: Vec<[usize; 2]> = edges
            .iter()
            .filter(|e| e.tag == BoundaryTag::C)
            .map(|e| e.nodes)
            .collect();
        let contact_nodes = order_chain(&c_edges)?;

        let mut mesh = Self {
            nodes,
            triangles: tris,
            boundary_edges: edges,
            areas,
            dirichlet_nodes: dirichlet.into_iter().collect(),
            contact_nodes,
            contact_normals: Vec::new(),
            contact_tangents: Vec::new(),
            contact_weights: Vec::new(),
            contact_arclength: Vec::new(),
        };
        mesh.build_contact_frames();
        Ok(mesh)
    }

    /// Builds contact-node normals, tangents, lumped weights and arclength.
    fn build_contact_frames(&mut self) {
        let m = self.contact_nodes.len();
        let mut normals = vec![[0.0; 2]; m];
        let mut weights = vec![0.0; m];
        let mut arclength = vec![0.0; m];
        let index: BTreeMap<usize, usize> = self
            .contact_nodes
            .iter()
            .enumerate()
            .map(|(i, &n)| (n, i))
            .collect();
        for e in &self.boundary_edges {
            if e.tag != BoundaryTag::C {
                continue;
            }
            let [a, b] = e.nodes;
            let pa = self.nodes[a];
            let pb = self.nodes[b];
            let d = [pb[0] - pa[0], pb[1] - pa[1]];
            let len = d[0].hypot(d[1]);
            // Travel direction is counterclockwise (body on the left), so
            // the outward normal is the travel direction rotated by −90°.
            let n_edge = [d[1] / len, -d[0] / len];
            for node in [a, b] {
                let i = index[&node];
                normals[i][0] += n_edge[0] * len;
                normals[i][1] += n_edge[1] * len;
                weights[i] += 0.5 * len;
            }
        }
        let mut tangents = vec![[0.0; 2]; m];
        for i in 0..m {
            let norm = normals[i][0].hypot(normals[i][1]);
            normals[i] = [normals[i][0] / norm, normals[i][1] / norm];
            // n = rot90(t) means t = rot-90(n) = (n_y, −n_x).
            tangents[i] = [normals[i][1], -normals[i][0]];
        }
        for i in 1..m {
            let pa = self.nodes[self.contact_nodes[i - 1]];
            let pb = self.nodes[self.contact_nodes[i]];
            arclength[i] = arclength[i - 1] + (pb[0] - pa[0]).hypot(pb[1] - pa[1]);
        }
        self.contact_normals = normals;
        self.contact_tangents = tangents;
        self.contact_weights = weights;
        self.contact_arclength = arclength;
    }

    /// Parses the JSON mesh encoding
    /// `{nodes, triangles, boundary_edges: [{n1, n2, tag}]}`.
    pub fn from_json_str(text: &str) -> Result<Self, MeshError> {
        let raw: MeshJson =
            serde_json::from_str(text).map_err(|e| MeshError::Parse(e.to_string()))?;
        let edges = raw
            .boundary_edges
            .iter()
            .map(|e| BoundaryEdge {
                nodes: [e.n1, e.n2],
                tag: e.tag,
            })
            .collect();
        Self::new(raw.nodes, raw.triangles, edges)
    }

    /// Parses the classic ASCII triangle-mesh triple (`.node`, `.ele`,
    /// `.edge` file contents).
    ///
    /// Only boundary edges (nonzero marker) are read from the edge file;
    /// markers map as 1 → `U`, 2 → `T`, 3 → `C`. Node indices may be 0- or
    /// 1-based; the base is taken from the first listed node index.
    pub fn from_triangle_format(
        node_text: &str,
        ele_text: &str,
        edge_text: &str,
    ) -> Result<Self, MeshError> {
        let parse = |text: &str| -> Vec<Vec<String>> {
            text.lines()
                .map(|l| l.split('#').next().unwrap_or(""))
                .filter(|l| !l.trim().is_empty())
                .map(|l| l.split_whitespace().map(str::to_string).collect())
                .collect()
        };
        let bad = |what: &str| MeshError::Parse(format!("malformed {what} record"));

        let node_rows = parse(node_text);
        let (header, rows) = node_rows
            .split_first()
            .ok_or_else(|| bad("node header"))?;
        let n_nodes: usize = header
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("node header"))?;
        if rows.len() != n_nodes || n_nodes == 0 {
            return Err(bad("node count"));
        }
        let base: usize = rows[0]
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("node index"))?;
        let mut nodes = vec![[0.0; 2]; n_nodes];
        for row in rows {
            if row.len() < 3 {
                return Err(bad("node"));
            }
            let idx: usize = row[0].parse().map_err(|_| bad("node index"))?;
            let x: f64 = row[1].parse().map_err(|_| bad("node coordinate"))?;
            let y: f64 = row[2].parse().map_err(|_| bad("node coordinate"))?;
            let i = idx
                .checked_sub(base)
                .ok_or_else(|| bad("node index"))?;
            if i >= n_nodes {
                return Err(bad("node index"));
            }
            nodes[i] = [x, y];
        }

        let ele_rows = parse(ele_text);
        let (header, rows) = ele_rows.split_first().ok_or_else(|| bad("element header"))?;
        let n_tri: usize = header
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("element header"))?;
        if rows.len() != n_tri {
            return Err(bad("element count"));
        }
        let mut triangles = Vec::with_capacity(n_tri);
        for row in rows {
            if row.len() < 4 {
                return Err(bad("element"));
            }
            let mut tri = [0usize; 3];
            for k in 0..3 {
                let idx: usize = row[k + 1].parse().map_err(|_| bad("element node"))?;
                tri[k] = idx.checked_sub(base).ok_or_else(|| bad("element node"))?;
            }
            triangles.push(tri);
        }

        let edge_rows = parse(edge_text);
        let (header, rows) = edge_rows.split_first().ok_or_else(|| bad("edge header"))?;
        let n_edges: usize = header
            .first()
            .and_then(|s| s.parse().ok())
            .ok_or_else(|| bad("edge header"))?;
        if rows.len() != n_edges {
            return Err(bad("edge count"));
        }
        let mut edges = Vec::new();
        for row in rows {
            if row.len() < 4 {
                return Err(bad("edge"));
            }
            let n1: usize = row[1].parse().map_err(|_| bad("edge node"))?;
            let n2: usize = row[2].parse().map_err(|_| bad("edge node"))?;
            let marker: i64 = row[3].parse().map_err(|_| bad("edge marker"))?;
            let tag = match marker {
                0 => continue, // interior edge
                1 => BoundaryTag::U,
                2 => BoundaryTag::T,
                3 => BoundaryTag::C,
                other => {
                    return Err(MeshError::Parse(format!(
                        "unknown boundary marker {other} (use 1=U, 2=T, 3=C)"
                    )))
                }
            };
            edges.push(BoundaryEdge {
                nodes: [
                    n1.checked_sub(base).ok_or_else(|| bad("edge node"))?,
                    n2.checked_sub(base).ok_or_else(|| bad("edge node"))?,
                ],
                tag,
            });
        }
        Self::new(nodes, triangles, edges)
    }

    /// Structured triangulation of the axis-aligned rectangle
    /// `[0, w] × [0, h]` with `nx × ny` cells, each split into two
    /// triangles, and the four sides tagged as given (in the order bottom,
    /// right, top, left).
    pub fn structured_rectangle(
        nx: usize,
        ny: usize,
        w: f64,
        h: f64,
        tags: [BoundaryTag; 4],
    ) -> Result<Self, MeshError> {
        assert!(nx >= 1 && ny >= 1, "need at least one cell per direction");
        let id = |i: usize, j: usize| j * (nx + 1) + i;
        let mut nodes = Vec::with_capacity((nx + 1) * (ny + 1));
        for j in 0..=ny {
            for i in 0..=nx {
                nodes.push([w * i as f64 / nx as f64, h * j as f64 / ny as f64]);
            }
        }
        let mut triangles = Vec::with_capacity(2 * nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (n00, n10) = (id(i, j), id(i + 1, j));
                let (n01, n11) = (id(i, j + 1), id(i + 1, j + 1));
                triangles.push([n00, n10, n11]);
                triangles.push([n00, n11, n01]);
            }
        }
        let [bottom, right, top, left] = tags;
        let mut edges = Vec::new();
        for i in 0..nx {
            edges.push(BoundaryEdge {
                nodes: [id(i, 0), id(i + 1, 0)],
                tag: bottom,
            });
            edges.push(BoundaryEdge {
                nodes: [id(nx - i, ny), id(nx - i - 1, ny)],
                tag: top,
            });
        }
        for j in 0..ny {
            edges.push(BoundaryEdge {
                nodes: [id(nx, j), id(nx, j + 1)],
                tag: right,
            });
            edges.push(BoundaryEdge {
                nodes: [id(0, ny - j), id(0, ny - j - 1)],
                tag: left,
            });
        }
        Self::new(nodes, triangles, edges)
    }

    /// Unit square with contact at the bottom, clamped top and free sides —
    /// the standard press-onto-obstacle configuration.
    pub fn contact_square(nx: usize, ny: usize) -> Self {
        Self::structured_rectangle(
            nx,
            ny,
            1.0,
            1.0,
            [BoundaryTag::C, BoundaryTag::T, BoundaryTag::U, BoundaryTag::T],
        )
        .expect("structured square with disjoint U/C sides is valid")
    }

    /// Node coordinates.
    pub fn node_coords(&self) -> &[[f64; 2]] {
        &self.nodes
    }

    /// Number of nodes.
    pub fn n_nodes(&self) -> usize {
        self.nodes.len()
    }

    /// Positively oriented triangles.
    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    /// Triangle areas (positive).
    pub fn areas(&self) -> &[f64] {
        &self.areas
    }

    /// Tagged boundary edges, oriented counterclockwise around the body.
    pub fn boundary_edges(&self) -> &[BoundaryEdge] {
        &self.boundary_edges
    }

    /// Nodes of the clamped boundary (sorted).
    pub fn dirichlet_nodes(&self) -> &[usize] {
        &self.dirichlet_nodes
    }

    /// Contact-chain nodes in boundary order.
    pub fn contact_nodes(&self) -> &[usize] {
        &self.contact_nodes
    }

    /// Number of contact nodes.
    pub fn n_contact(&self) -> usize {
        self.contact_nodes.len()
    }

    /// Unit outward normal at each contact node (edge-length averaged).
    pub fn contact_normals(&self) -> &[[f64; 2]] {
        &self.contact_normals
    }

    /// Unit tangent at each contact node, with `n = rot90(t)`.
    pub fn contact_tangents(&self) -> &[[f64; 2]] {
        &self.contact_tangents
    }

    /// Lumped boundary weight (half the incident contact-edge length) at
    /// each contact node; pairs traction densities with trace values.
    pub fn contact_weights(&self) -> &[f64] {
        &self.contact_weights
    }

    /// Arclength coordinate along the contact chain.
    pub fn contact_arclength(&self) -> &[f64] {
        &self.contact_arclength
    }
}

fn signed_area(nodes: &[[f64; 2]], tri: [usize; 3]) -> f64 {
    let [a, b, c] = tri;
    let (pa, pb, pc) = (nodes[a], nodes[b], nodes[c]);
    0.5 * ((pb[0] - pa[0]) * (pc[1] - pa[1]) - (pc[0] - pa[0]) * (pb[1] - pa[1]))
}

/// Orders directed chain edges into a node sequence; rejects branching,
/// cycles and disconnected pieces. An empty edge set gives an empty chain.
fn order_chain(edges: &[[usize; 2]]) -> Result<Vec<usize>, MeshError> {
    if edges.is_empty() {
        return Ok(Vec::new());
    }
    let mut next: BTreeMap<usize, usize> = BTreeMap::new();
    let mut has_pred: BTreeSet<usize> = BTreeSet::new();
    for &[a, b] in edges {
        if next.insert(a, b).is_some() {
            return Err(MeshError::ContactNotAChain);
        }
        if !has_pred.insert(b) {
            return Err(MeshError::ContactNotAChain);
        }
    }
    let starts: Vec<usize> = next
        .keys()
        .filter(|k| !has_pred.contains(k))
        .copied()
        .collect();
    if starts.len() != 1 {
        return Err(MeshError::ContactNotAChain);
    }
    let mut chain = vec![starts[0]];
    let mut cur = starts[0];
    while let Some(&nxt) = next.get(&cur) {
        chain.push(nxt);
        cur = nxt;
    }
    if chain.len() != edges.len() + 1 {
        return Err(MeshError::ContactNotAChain);
    }
    Ok(chain)
}
