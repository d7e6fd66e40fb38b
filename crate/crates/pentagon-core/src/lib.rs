//! Convex pentagon shapes up to similarity.
//!
//! A [`PentagonShape`] stores five interior angles (radians) and five edge
//! lengths, with edge `i` lying between vertex `i` and vertex `i+1` (mod 5),
//! counterclockwise. Shapes are closure-validated on construction and
//! compared up to similarity via a canonical form that is invariant under
//! the dihedral group of ten relabelings (five rotations, with and without
//! reflection).

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Tolerance used for solver-grade residuals (radians / relative lengths).
pub const SOLVER_TOL: f64 = 1e-9;
/// Tolerance used for classification and congruence decisions.
pub const CLASS_TOL: f64 = 1e-6;

/// Rounding quantum for the canonical key (angles in radians, edges relative).
const KEY_ROUND: f64 = 1e-7;

#[derive(Debug, Error, PartialEq)]
pub enum ShapeError {
    #[error("interior angles must sum to 540 degrees, got {sum_deg:.6}")]
    BadAngleSum { sum_deg: f64 },
    #[error("edge loop does not close (residual {residual:.3e})")]
    NotClosed { residual: f64 },
    #[error("shape is not strictly convex")]
    NonConvex,
    #[error("edge {index} is degenerate (length ratio {ratio:.3e})")]
    DegenerateEdge { index: usize, ratio: f64 },
}

/// One of the ten dihedral relabelings acting on (angles, edges).
///
/// The reflection (applied first when `reflected` is set) maps angle `i` to
/// angle `(5-i) mod 5` and edge `i` to edge `(4-i) mod 5`, which is how the
/// labels of a mirror image read off against the original. The rotation then
/// shifts all labels by `rotation`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Labeling {
    pub rotation: u8,
    pub reflected: bool,
}

impl Labeling {
    pub const IDENTITY: Labeling = Labeling { rotation: 0, reflected: false };

    /// All ten elements of the dihedral relabeling group.
    pub fn all() -> [Labeling; 10] {
        let mut out = [Labeling::IDENTITY; 10];
        for r in 0..5 {
            out[2 * r] = Labeling { rotation: r as u8, reflected: false };
            out[2 * r + 1] = Labeling { rotation: r as u8, reflected: true };
        }
        out
    }

    /// Index permutation for angles: relabeled angle `i` is original angle
    /// `perm[i]`.
    pub fn angle_perm(&self) -> [usize; 5] {
        let mut p = [0usize; 5];
        for (i, slot) in p.iter_mut().enumerate() {
            let j = if self.reflected { (5 - i) % 5 } else { i };
            *slot = (j + self.rotation as usize) % 5;
        }
        if self.reflected {
            // reflection first, then rotation: angle i of the result reads
            // original angle (5 - (i + r)) mod 5 -- recompute directly.
            for (i, slot) in p.iter_mut().enumerate() {
                *slot = (5 - ((i + self.rotation as usize) % 5)) % 5;
            }
        }
        p
    }

    /// Index permutation for edges: relabeled edge `i` is original edge
    /// `perm[i]`.
    pub fn edge_perm(&self) -> [usize; 5] {
        let mut p = [0usize; 5];
        for (i, slot) in p.iter_mut().enumerate() {
            if self.reflected {
                *slot = (9 - ((i + self.rotation as usize) % 5)) % 5;
            } else {
                *slot = (i + self.rotation as usize) % 5;
            }
        }
        p
    }

    /// The labeling that undoes this one.
    pub fn inverse(&self) -> Labeling {
        if self.reflected {
            // reflections are involutions in this parameterization only
            // together with their rotation part; search the small group.
            for cand in Labeling::all() {
                if compose(*self, cand) == Labeling::IDENTITY {
                    return cand;
                }
            }
            unreachable!("dihedral group is closed under inversion");
        }
        Labeling { rotation: ((5 - self.rotation) % 5), reflected: false }
    }
}

/// Compose two labelings: `apply(compose(g, h), p) == apply(g, apply(h, p))`.
pub fn compose(g: Labeling, h: Labeling) -> Labeling {
    // work on the angle permutation representation
    let pg = g.angle_perm();
    let ph = h.angle_perm();
    let mut target = [0usize; 5];
    for i in 0..5 {
        target[i] = ph[pg[i]];
    }
    for cand in Labeling::all() {
        if cand.angle_perm() == target {
            return cand;
        }
    }
    unreachable!("dihedral group is closed under composition")
}

/// A validated convex pentagon, stored up to similarity.
#[derive(Debug, Clone, PartialEq)]
pub struct PentagonShape {
    angles: [f64; 5],
    edges: [f64; 5],
}

/// Canonical representative of a shape's dihedral orbit.
#[derive(Debug, Clone, PartialEq)]
pub struct CanonicalPentagon {
    pub shape: PentagonShape,
    pub labeling: Labeling,
    key: [f64; 10],
}

impl CanonicalPentagon {
    /// Rounded lexicographic key: five angles (radians) then five edges
    /// normalized to the first edge.
    pub fn key(&self) -> &[f64; 10] {
        &self.key
    }
}

/// Cumulative headings of the five edges for the given interior angles.
pub fn headings(angles: &[f64; 5]) -> [f64; 5] {
    let mut h = [0.0f64; 5];
    for i in 1..5 {
        h[i] = h[i - 1] + std::f64::consts::PI - angles[i];
    }
    h
}

/// Closure residual: norm of the edge-vector sum, for unit-scale edges.
pub fn closure_residual(angles: &[f64; 5], edges: &[f64; 5]) -> f64 {
    let h = headings(angles);
    let perim: f64 = edges.iter().sum();
    let (mut x, mut y) = (0.0, 0.0);
    for i in 0..5 {
        x += edges[i] * h[i].cos();
        y += edges[i] * h[i].sin();
    }
    (x * x + y * y).sqrt() / perim
}

/// Minimal least-squares correction of `edges` so the loop closes exactly
/// (the closure conditions are linear in the edges).
fn project_closure(angles: &[f64; 5], edges: &mut [f64; 5]) {
    let h = headings(angles);
    let c: Vec<f64> = h.iter().map(|t| t.cos()).collect();
    let s: Vec<f64> = h.iter().map(|t| t.sin()).collect();
    // residual r = M e; correction e -= M^T (M M^T)^{-1} r
    let rx: f64 = (0..5).map(|i| c[i] * edges[i]).sum();
    let ry: f64 = (0..5).map(|i| s[i] * edges[i]).sum();
    let a: f64 = c.iter().map(|v| v * v).sum();
    let b: f64 = (0..5).map(|i| c[i] * s[i]).sum();
    let d: f64 = s.iter().map(|v| v * v).sum();
    let det = a * d - b * b;
    if det.abs() < 1e-300 {
        return;
    }
    let lx = (d * rx - b * ry) / det;
    let ly = (a * ry - b * rx) / det;
    for i in 0..5 {
        edges[i] -= c[i] * lx + s[i] * ly;
    }
}

impl PentagonShape {
    /// Build from interior angles in degrees and positive edge lengths.
    ///
    /// The shape is validated (convexity, angle sum, closure), the edges are
    /// projected onto the exact closure subspace, and the scale is normalized
    /// so the canonical first edge is 1.
    pub fn from_angles_edges(angles_deg: [f64; 5], edges: [f64; 5]) -> Result<Self, ShapeError> {
        let angles: [f64; 5] = std::array::from_fn(|i| angles_deg[i].to_radians());
        for &a in &angles {
            if !(a > SOLVER_TOL && a < std::f64::consts::PI - SOLVER_TOL) {
                return Err(ShapeError::NonConvex);
            }
        }
        let sum: f64 = angles.iter().sum();
        if (sum - 3.0 * std::f64::consts::PI).abs() > CLASS_TOL {
            return Err(ShapeError::BadAngleSum { sum_deg: sum.to_degrees() });
        }
        let longest = edges.iter().cloned().fold(0.0f64, f64::max);
        for (i, &e) in edges.iter().enumerate() {
            if !(e > 0.0) || e < 1e-9 * longest {
                return Err(ShapeError::DegenerateEdge { index: i, ratio: e / longest });
            }
        }
        let residual = closure_residual(&angles, &edges);
        if residual > CLASS_TOL {
            return Err(ShapeError::NotClosed { residual });
        }
        let mut edges = edges;
        project_closure(&angles, &mut edges);
        // re-normalize the exact-sum constraint on angles by distributing the
        // (tiny) defect evenly, keeping the stored invariants exact-grade
        let defect = 3.0 * std::f64::consts::PI - angles.iter().sum::<f64>();
        let mut angles = angles;
        for a in &mut angles {
            *a += defect / 5.0;
        }
        let mut shape = PentagonShape { angles, edges };
        shape.normalize_scale();
        Ok(shape)
    }

    /// Build from five planar vertices.
    ///
    /// Clockwise input is accepted (the vertex order is reversed) and
    /// reported through the boolean flag as a reflected presentation.
    pub fn from_vertices(points: [[f64; 2]; 5]) -> Result<(Self, bool), ShapeError> {
        let area2: f64 = (0..5)
            .map(|i| {
                let [x0, y0] = points[i];
                let [x1, y1] = points[(i + 1) % 5];
                x0 * y1 - x1 * y0
            })
            .sum();
        let mut pts = points;
        let was_clockwise = area2 < 0.0;
        if was_clockwise {
            pts.reverse();
        }
        let mut edges = [0.0f64; 5];
        for i in 0..5 {
            let dx = pts[(i + 1) % 5][0] - pts[i][0];
            let dy = pts[(i + 1) % 5][1] - pts[i][1];
            edges[i] = (dx * dx + dy * dy).sqrt();
        }
        let longest = edges.iter().cloned().fold(0.0f64, f64::max);
        for (i, &e) in edges.iter().enumerate() {
            if e < 1e-9 * longest {
                return Err(ShapeError::DegenerateEdge { index: i, ratio: e / longest });
            }
        }
        let mut angles = [0.0f64; 5];
        for i in 0..5 {
            let prev = pts[(i + 4) % 5];
            let here = pts[i];
            let next = pts[(i + 1) % 5];
            let u = [prev[0] - here[0], prev[1] - here[1]];
            let v = [next[0] - here[0], next[1] - here[1]];
            let dot = u[0] * v[0] + u[1] * v[1];
            let cross = v[0] * u[1] - v[1] * u[0];
            let ang = cross.atan2(dot);
            // interior angle of a CCW convex polygon is in (0, pi)
            if ang <= SOLVER_TOL {
                return Err(ShapeError::NonConvex);
            }
            angles[i] = ang;
        }
        let sum: f64 = angles.iter().sum();
        if (sum - 3.0 * std::f64::consts::PI).abs() > CLASS_TOL {
            return Err(ShapeError::NonConvex);
        }
        let angles_deg: [f64; 5] = std::array::from_fn(|i| angles[i].to_degrees());
        Ok((Self::from_angles_edges(angles_deg, edges)?, was_clockwise))
    }

    pub fn angles(&self) -> &[f64; 5] {
        &self.angles
    }

    pub fn angles_deg(&self) -> [f64; 5] {
        std::array::from_fn(|i| self.angles[i].to_degrees())
    }

    pub fn edges(&self) -> &[f64; 5] {
        &self.edges
    }

    /// Vertices with vertex 0 at the origin and edge 0 along +x.
    pub fn vertices(&self) -> [[f64; 2]; 5] {
        let h = headings(&self.angles);
        let mut out = [[0.0f64; 2]; 5];
        let (mut x, mut y) = (0.0, 0.0);
        for i in 0..5 {
            out[i] = [x, y];
            x += self.edges[i] * h[i].cos();
            y += self.edges[i] * h[i].sin();
        }
        out
    }

    /// Apply a dihedral relabeling.
    pub fn relabel(&self, lab: Labeling) -> PentagonShape {
        let pa = lab.angle_perm();
        let pe = lab.edge_perm();
        let mut shape = PentagonShape {
            angles: std::array::from_fn(|i| self.angles[pa[i]]),
            edges: std::array::from_fn(|i| self.edges[pe[i]]),
        };
        shape.normalize_scale();
        shape
    }

    fn normalize_scale(&mut self) {
        let lab = self.canonical_labeling();
        let first = self.edges[lab.edge_perm()[0]];
        for e in &mut self.edges {
            *e /= first;
        }
    }

    fn key_under(&self, lab: Labeling) -> [f64; 10] {
        let pa = lab.angle_perm();
        let pe = lab.edge_perm();
        let e0 = self.edges[pe[0]];
        let mut key = [0.0f64; 10];
        for i in 0..5 {
            key[i] = round_to(self.angles[pa[i]], KEY_ROUND);
            key[5 + i] = round_to(self.edges[pe[i]] / e0, KEY_ROUND);
        }
        key
    }

    fn unrounded_under(&self, lab: Labeling) -> [f64; 10] {
        let pa = lab.angle_perm();
        let pe = lab.edge_perm();
        let e0 = self.edges[pe[0]];
        let mut key = [0.0f64; 10];
        for i in 0..5 {
            key[i] = self.angles[pa[i]];
            key[5 + i] = self.edges[pe[i]] / e0;
        }
        key
    }

    fn canonical_labeling(&self) -> Labeling {
        let mut best = Labeling::IDENTITY;
        let mut best_key = self.key_under(best);
        let mut best_raw = self.unrounded_under(best);
        for lab in Labeling::all() {
            let key = self.key_under(lab);
            match lex_cmp(&key, &best_key) {
                std::cmp::Ordering::Less => {
                    best = lab;
                    best_key = key;
                    best_raw = self.unrounded_under(lab);
                }
                std::cmp::Ordering::Equal => {
                    let raw = self.unrounded_under(lab);
                    if lex_cmp(&raw, &best_raw) == std::cmp::Ordering::Less {
                        best = lab;
                        best_raw = raw;
                    }
                }
                std::cmp::Ordering::Greater => {}
            }
        }
        best
    }

    /// Canonical representative under the ten dihedral relabelings.
    pub fn canonical_form(&self) -> CanonicalPentagon {
        let labeling = self.canonical_labeling();
        let shape = self.relabel(labeling);
        let key = shape.key_under(Labeling::IDENTITY);
        CanonicalPentagon { shape, labeling, key }
    }

    /// Similarity test through canonical keys.
    pub fn similar(&self, other: &PentagonShape, tol: f64) -> bool {
        let a = self.canonical_form();
        let b = other.canonical_form();
        a.key
            .iter()
            .zip(b.key.iter())
            .all(|(x, y)| (x - y).abs() <= tol)
    }

    /// Closure residual of the stored shape (should be solver-grade small).
    pub fn residual(&self) -> f64 {
        closure_residual(&self.angles, &self.edges)
    }
}

fn round_to(v: f64, quantum: f64) -> f64 {
    (v / quantum).round() * quantum
}

fn lex_cmp(a: &[f64; 10], b: &[f64; 10]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        match x.partial_cmp(y).expect("keys are finite") {
            std::cmp::Ordering::Equal => continue,
            other => return other,
        }
    }
    std::cmp::Ordering::Equal
}

/// JSON form of a pentagon: either angles/edges or raw vertices.
#[derive(Debug, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PentagonJson {
    AnglesEdges { angles_deg: [f64; 5], edges: [f64; 5] },
    Vertices { vertices: [[f64; 2]; 5] },
}

impl PentagonJson {
    pub fn into_shape(self) -> Result<PentagonShape, ShapeError> {
        match self {
            PentagonJson::AnglesEdges { angles_deg, edges } => {
                PentagonShape::from_angles_edges(angles_deg, edges)
            }
            PentagonJson::Vertices { vertices } => {
                PentagonShape::from_vertices(vertices).map(|(s, _)| s)
            }
        }
    }

    pub fn from_shape(shape: &PentagonShape) -> Self {
        PentagonJson::AnglesEdges { angles_deg: shape.angles_deg(), edges: *shape.edges() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn regular() -> PentagonShape {
        PentagonShape::from_angles_edges([108.0; 5], [1.0; 5]).unwrap()
    }

    #[test]
    fn regular_pentagon_is_valid() {
        let p = regular();
        assert!(p.residual() < SOLVER_TOL);
    }

    #[test]
    fn bad_angle_sum_rejected() {
        let err = PentagonShape::from_angles_edges([100.0; 5], [1.0; 5]).unwrap_err();
        assert!(matches!(err, ShapeError::BadAngleSum { .. }));
    }

    #[test]
    fn open_loop_rejected() {
        let err =
            PentagonShape::from_angles_edges([90.0, 90.0, 120.0, 120.0, 120.0], [1.0; 5])
                .unwrap_err();
        assert!(matches!(err, ShapeError::NotClosed { .. }));
    }

    #[test]
    fn labeling_group_closes() {
        for g in Labeling::all() {
            for h in Labeling::all() {
                let _ = compose(g, h);
            }
            assert_eq!(compose(g, g.inverse()), Labeling::IDENTITY);
        }
    }

    #[test]
    fn canonical_form_is_orbit_invariant() {
        let p = PentagonShape::from_vertices([
            [0.0, 0.0],
            [1.3, 0.0],
            [1.9, 0.9],
            [0.8, 1.7],
            [-0.4, 0.9],
        ])
        .unwrap()
        .0;
        let base = p.canonical_form();
        for lab in Labeling::all() {
            let q = p.relabel(lab);
            let c = q.canonical_form();
            for (a, b) in base.key().iter().zip(c.key().iter()) {
                assert!((a - b).abs() < 1e-9, "key mismatch under {:?}", lab);
            }
        }
    }

    #[test]
    fn similar_ignores_scale() {
        let p = PentagonShape::from_vertices([
            [0.0, 0.0],
            [1.3, 0.0],
            [1.9, 0.9],
            [0.8, 1.7],
            [-0.4, 0.9],
        ])
        .unwrap()
        .0;
        let scaled: [[f64; 2]; 5] =
            std::array::from_fn(|i| [p.vertices()[i][0] * 3.0, p.vertices()[i][1] * 3.0]);
        let q = PentagonShape::from_vertices(scaled).unwrap().0;
        assert!(p.similar(&q, CLASS_TOL));
    }

    #[test]
    fn vertices_round_trip() {
        let p = regular();
        let (q, cw) = PentagonShape::from_vertices(p.vertices()).unwrap();
        assert!(!cw);
        assert!(p.similar(&q, 1e-9));
    }
}
