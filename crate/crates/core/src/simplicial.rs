//! Twisted simplicial cochains on a triangulated 4g-gon: an independent route
//! to the Goldman pairing through the Alexander-Whitney cup product.
//!
//! The complex is a Δ-complex with ordered simplices. Every vertex carries a
//! chosen lift to the universal cover; an edge `v → w` stores the holonomy word
//! `γ` such that its lift starting at the lift of `v` ends at `γ ·` (lift of
//! `w`). A twisted 1-cochain stores one algebra value per edge, read at the
//! lift of its source.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::cohomology;
use crate::error::{Error, Result};
use crate::lie::{self, InvariantForm};
use crate::linalg::{self, CMatrix, CVector};
use crate::rep::Representation;
use crate::surface_group::{self, Word};
use crate::tol::COCYCLE_TOL;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Edge {
    pub source: usize,
    pub target: usize,
    pub holonomy: Word,
}

/// An ordered triangle `[v0, v1, v2]`. `edges` lists the faces
/// `[v1 v2], [v0 v2], [v0 v1]`; `orientation` is its coefficient in the
/// fundamental cycle.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Triangle {
    pub vertices: [usize; 3],
    pub edges: [usize; 3],
    pub orientation: i8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TriangulatedSurfaceComplex {
    genus: usize,
    refinement: usize,
    vertex_count: usize,
    edges: Vec<Edge>,
    triangles: Vec<Triangle>,
    /// Pairs of polygon sides glued together (side `k` runs from corner `k` to
    /// corner `k + 1` of the 4g-gon).
    side_pairs: Vec<(usize, usize)>,
}

impl TriangulatedSurfaceComplex {
    pub fn genus(&self) -> usize {
        self.genus
    }

    pub fn refinement(&self) -> usize {
        self.refinement
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn triangles(&self) -> &[Triangle] {
        &self.triangles
    }

    pub fn side_pairs(&self) -> &[(usize, usize)] {
        &self.side_pairs
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.vertex_count as i64 - self.edges.len() as i64 + self.triangles.len() as i64
    }

    /// Untwisted boundary of the fundamental cycle, as integer edge
    /// coefficients; all zero for a closed oriented surface.
    pub fn cycle_boundary(&self) -> Vec<i64> {
        let mut b = alloc::vec![0i64; self.edges.len()];
        for t in &self.triangles {
            for (face, &e) in t.edges.iter().enumerate() {
                let sign = if face % 2 == 0 { 1 } else { -1 };
                b[e] += sign * t.orientation as i64;
            }
        }
        b
    }

    fn holonomy_from_first_vertex(&self, t: &Triangle) -> [Word; 3] {
        [Word::identity(), self.edges[t.edges[2]].holonomy.clone(), self.edges[t.edges[1]].holonomy.clone()]
    }
}

/// Cone triangulation of the 4g-gon from one interior vertex, followed by
/// `refinement` barycentric subdivisions.
pub fn build_complex(genus: usize, refinement: usize) -> Result<TriangulatedSurfaceComplex> {
    let relator = surface_group::relator(genus)?;
    let letters = relator.letters();
    let sides = letters.len();

    // Vertex 0: the polygon corner (all corners are identified); vertex 1:
    // the cone point. Edges 0..2g: generators, oriented along x_j. Edges
    // 2g..2g+4g: spokes from the cone point to corner k.
    let corner = 0;
    let cone = 1;
    let mut edges: Vec<Edge> =
        (0..2 * genus).map(|j| Edge { source: corner, target: corner, holonomy: Word::generator(j) }).collect();
    let spoke0 = edges.len();
    for k in 0..sides {
        edges.push(Edge { source: cone, target: corner, holonomy: relator.prefix(k) });
    }
    let spoke = |k: usize| spoke0 + k % sides;

    let mut triangles = Vec::with_capacity(sides);
    for (k, l) in letters.iter().enumerate() {
        let generator_edge = l.generator;
        if l.inverse {
            // Side k is the generator edge traversed backwards.
            triangles.push(Triangle {
                vertices: [cone, corner, corner],
                edges: [generator_edge, spoke(k), spoke(k + 1)],
                orientation: -1,
            });
        } else {
            triangles.push(Triangle {
                vertices: [cone, corner, corner],
                edges: [generator_edge, spoke(k + 1), spoke(k)],
                orientation: 1,
            });
        }
    }

    let mut side_pairs = Vec::with_capacity(2 * genus);
    for j in 0..2 * genus {
        let mut occurrences = letters.iter().enumerate().filter(|(_, l)| l.generator == j).map(|(k, _)| k);
        let first = occurrences.next().expect("each generator occurs in the relator");
        let second = occurrences.next().expect("each generator occurs twice");
        side_pairs.push((first, second));
    }

    let mut complex =
        TriangulatedSurfaceComplex { genus, refinement: 0, vertex_count: 2, edges, triangles, side_pairs };
    for _ in 0..refinement {
        complex = barycentric_subdivision(&complex);
    }
    Ok(complex)
}

fn signed_area(p: [(f64, f64); 3]) -> f64 {
    (p[1].0 - p[0].0) * (p[2].1 - p[0].1) - (p[2].0 - p[0].0) * (p[1].1 - p[0].1)
}

/// One barycentric subdivision. New vertices are the old simplices; each new
/// edge joins the barycenter of a face (at a given position) to the
/// barycenter of the simplex, and inherits the inverse of the holonomy from
/// the simplex's first vertex to that face's first vertex.
fn barycentric_subdivision(old: &TriangulatedSurfaceComplex) -> TriangulatedSurfaceComplex {
    let v_old = old.vertex_count;
    let e_old = old.edges.len();
    let edge_vertex = |e: usize| v_old + e;
    let tri_vertex = |t: usize| v_old + e_old + t;

    let mut edges = Vec::new();
    // half[e][p]: new edge from old vertex at position p of edge e to b_e.
    let mut half = Vec::with_capacity(e_old);
    for (e, edge) in old.edges.iter().enumerate() {
        let first = edges.len();
        edges.push(Edge { source: edge.source, target: edge_vertex(e), holonomy: Word::identity() });
        edges.push(Edge { source: edge.target, target: edge_vertex(e), holonomy: edge.holonomy.inverse() });
        half.push([first, first + 1]);
    }

    // Face edges of a triangle: [v_m, v_m'] opposite v_m, with first vertex.
    const FACE_VERTICES: [[usize; 2]; 3] = [[1, 2], [0, 2], [0, 1]];
    let corners = [(0.0, 0.0), (1.0, 0.0), (0.0, 1.0)];
    let mut triangles = Vec::with_capacity(6 * old.triangles.len());
    for (ti, t) in old.triangles.iter().enumerate() {
        let hol = old.holonomy_from_first_vertex(t);
        let b_t = tri_vertex(ti);
        let from_vertex: [usize; 3] = core::array::from_fn(|i| {
            edges.push(Edge { source: t.vertices[i], target: b_t, holonomy: hol[i].inverse() });
            edges.len() - 1
        });
        let from_edge: [usize; 3] = core::array::from_fn(|m| {
            let first = FACE_VERTICES[m][0];
            edges.push(Edge { source: edge_vertex(t.edges[m]), target: b_t, holonomy: hol[first].inverse() });
            edges.len() - 1
        });
        let centroid = (1.0 / 3.0, 1.0 / 3.0);
        for i in 0..3 {
            for m in 0..3 {
                if m == i {
                    continue;
                }
                let pos = if FACE_VERTICES[m][0] == i { 0 } else { 1 };
                let other = FACE_VERTICES[m][1 - pos];
                let midpoint = ((corners[i].0 + corners[other].0) / 2.0, (corners[i].1 + corners[other].1) / 2.0);
                let sign = signed_area([corners[i], midpoint, centroid]).signum() as i8;
                triangles.push(Triangle {
                    vertices: [t.vertices[i], edge_vertex(t.edges[m]), b_t],
                    edges: [from_edge[m], from_vertex[i], half[t.edges[m]][pos]],
                    orientation: sign * t.orientation,
                });
            }
        }
    }

    TriangulatedSurfaceComplex {
        genus: old.genus,
        refinement: old.refinement + 1,
        vertex_count: v_old + e_old + old.triangles.len(),
        edges,
        triangles,
        side_pairs: old.side_pairs.clone(),
    }
}

/// Twisted simplicial 1-cochain: one algebra coordinate vector per edge.
pub type SimplicialCochain = Vec<CVector>;

/// Per-representation data: `Ad(ρ(γ))` for the first edge of every triangle.
pub struct TwistedComplex<'a> {
    complex: &'a TriangulatedSurfaceComplex,
    rep: &'a Representation,
    first_edge_ad: Vec<CMatrix>,
    gram: CMatrix,
}

impl<'a> TwistedComplex<'a> {
    pub fn new(complex: &'a TriangulatedSurfaceComplex, rep: &'a Representation, form: &InvariantForm) -> Result<Self> {
        if complex.genus != rep.genus() {
            return Err(Error::DimensionMismatch { expected: rep.genus(), found: complex.genus });
        }
        let first_edge_ad = complex
            .triangles
            .iter()
            .map(|t| {
                let w = &complex.edges[t.edges[2]].holonomy;
                let (g, g_inv) = surface_group::evaluate_word_with_inverse(rep, w)?;
                Ok(lie::ad_matrix_with_inverse(rep.spec(), &g, &g_inv))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { complex, rep, first_edge_ad, gram: form.gram() })
    }

    /// Largest `‖(δf)(T)‖ = ‖f(v0v1) + Ad(γ01) f(v1v2) − f(v0v2)‖`.
    pub fn cocycle_residual(&self, f: &SimplicialCochain) -> f64 {
        self.complex
            .triangles
            .iter()
            .zip(&self.first_edge_ad)
            .map(|(t, ad)| {
                let [e12, e02, e01] = t.edges;
                linalg::vector_norm(&(&f[e01] + ad * &f[e12] - &f[e02]))
            })
            .fold(0.0, f64::max)
    }

    /// Twisted coboundary of a 0-cochain: `(δσ)(v → w) = Ad(γ) σ(w) − σ(v)`.
    pub fn coboundary(&self, sigma: &[CVector]) -> Result<SimplicialCochain> {
        self.complex
            .edges
            .iter()
            .map(|e| {
                let (g, g_inv) = surface_group::evaluate_word_with_inverse(self.rep, &e.holonomy)?;
                let ad = lie::ad_matrix_with_inverse(self.rep.spec(), &g, &g_inv);
                Ok(ad * &sigma[e.target] - &sigma[e.source])
            })
            .collect()
    }

    /// `Σ_T ε_T B(f(v0v1), Ad(γ01) h(v1v2))`.
    pub fn cup(&self, f: &SimplicialCochain, h: &SimplicialCochain) -> Complex64 {
        self.complex
            .triangles
            .iter()
            .zip(&self.first_edge_ad)
            .map(|(t, ad)| {
                let [e12, _, e01] = t.edges;
                let transported = ad * &h[e12];
                linalg::bilinear_dot(&f[e01], &(&self.gram * transported)) * t.orientation as f64
            })
            .sum()
    }

    /// Antisymmetrized cup product on the fundamental cycle,
    /// `(⟨f⌣h⟩ − ⟨h⌣f⟩) / 2`.
    pub fn pairing(&self, f: &SimplicialCochain, h: &SimplicialCochain) -> Complex64 {
        (self.cup(f, h) - self.cup(h, f)) * 0.5
    }
}

/// Group cocycle to simplicial cocycle: an edge with holonomy `γ` receives
/// `u(γ)`.
pub fn transport_cocycle(
    rep: &Representation,
    u: &CVector,
    complex: &TriangulatedSurfaceComplex,
) -> Result<SimplicialCochain> {
    let delta1 = cohomology::cocycle_matrix(rep);
    let residual = linalg::vector_norm(&(&delta1 * u));
    if residual > COCYCLE_TOL * linalg::vector_norm(u).max(1.0) {
        return Err(Error::NotCocycle(residual));
    }
    complex.edges.iter().map(|e| cohomology::extend_cocycle(rep, u, &e.holonomy)).collect()
}

/// Pairing of two simplicial cocycles; both inputs are checked.
pub fn simplicial_pairing(
    complex: &TriangulatedSurfaceComplex,
    rep: &Representation,
    f: &SimplicialCochain,
    h: &SimplicialCochain,
    form: &InvariantForm,
) -> Result<Complex64> {
    let twisted = TwistedComplex::new(complex, rep, form)?;
    for x in [f, h] {
        let scale = x.iter().map(linalg::vector_norm).fold(1.0, f64::max);
        let residual = twisted.cocycle_residual(x);
        if residual > COCYCLE_TOL * scale {
            return Err(Error::NotCocycle(residual));
        }
    }
    Ok(twisted.pairing(f, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieGroupSpec;
    use crate::linalg::c;
    use crate::rep;

    #[test]
    fn counts_and_euler_characteristic() {
        let k = build_complex(2, 0).unwrap();
        assert_eq!(k.triangles().len(), 8);
        assert_eq!(k.euler_characteristic(), -2);
        let k3 = build_complex(3, 0).unwrap();
        assert_eq!(k3.triangles().len(), 12);
        assert_eq!(k3.euler_characteristic(), -4);
        let k1 = build_complex(2, 1).unwrap();
        assert_eq!(k1.triangles().len(), 48);
        assert_eq!(k1.euler_characteristic(), -2);
        let k2 = build_complex(2, 2).unwrap();
        assert_eq!(k2.triangles().len(), 288);
        assert_eq!(k2.euler_characteristic(), -2);
        assert!(build_complex(1, 0).is_err());
    }

    #[test]
    fn fundamental_cycle_is_closed() {
        for r in 0..3 {
            let k = build_complex(2, r).unwrap();
            assert!(k.cycle_boundary().iter().all(|&b| b == 0));
        }
    }

    #[test]
    fn every_side_is_glued_once_with_reversed_orientation() {
        let k = build_complex(3, 0).unwrap();
        let letters = surface_group::relator(3).unwrap();
        let mut seen = alloc::vec![0; 12];
        for &(a, b) in k.side_pairs() {
            seen[a] += 1;
            seen[b] += 1;
            let (la, lb) = (letters.letters()[a], letters.letters()[b]);
            assert_eq!(la.generator, lb.generator);
            assert_ne!(la.inverse, lb.inverse);
        }
        assert!(seen.iter().all(|&s| s == 1));
    }

    #[test]
    fn twisted_differentials_compose_to_zero() {
        let rep = rep::random_flat_representation(LieGroupSpec::sl(2), 2, 1, 0.5).unwrap();
        let form = InvariantForm::trace_form(*rep.spec());
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(9);
        for r in 0..2 {
            let k = build_complex(2, r).unwrap();
            let tw = TwistedComplex::new(&k, &rep, &form).unwrap();
            let sigma: Vec<CVector> =
                (0..k.vertex_count()).map(|_| crate::linalg::random_vector(&mut rng, 3)).collect();
            let f = tw.coboundary(&sigma).unwrap();
            assert!(tw.cocycle_residual(&f) < 1e-10);
        }
    }

    #[test]
    fn zero_cochain_transports_to_zero() {
        let rep = rep::random_flat_representation(LieGroupSpec::sl(2), 2, 1, 0.5).unwrap();
        let k = build_complex(2, 1).unwrap();
        let f = transport_cocycle(&rep, &CVector::zeros(12), &k).unwrap();
        assert!(f.iter().all(|x| x.iter().all(|z| *z == c(0.0, 0.0))));
    }

    #[test]
    fn torus_generator_is_supported_on_edges_through_it() {
        let rep = rep::random_flat_representation(LieGroupSpec::torus(), 2, 1, 1.0).unwrap();
        let k = build_complex(2, 0).unwrap();
        let mut u = CVector::zeros(4);
        u[0] = c(1.0, 0.0);
        let f = transport_cocycle(&rep, &u, &k).unwrap();
        for (e, val) in k.edges().iter().zip(&f) {
            let sum = e.holonomy.exponent_sums(4)[0];
            assert_eq!(val[0], c(sum as f64, 0.0));
            if val[0] != c(0.0, 0.0) {
                assert!(e.holonomy.letters().iter().any(|l| l.generator == 0));
            }
        }
    }
    fn random_cocycles(spaces: &cohomology::CohomologySpaces, seed: u64, count: usize) -> Vec<CVector> {
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(seed);
        let k = spaces.representatives.ncols();
        (0..count).map(|_| &spaces.representatives * crate::linalg::random_vector(&mut rng, k)).collect()
    }

    fn oracle_disagreement(spec: LieGroupSpec, refinement: usize) -> f64 {
        let rep = rep::random_flat_representation(spec, 2, 3, 0.5).unwrap();
        let spaces = cohomology::cohomology(&rep, crate::tol::FLAT_TOL, &crate::tol::RankPolicy::default()).unwrap();
        let form = InvariantForm::trace_form(spec);
        let cycle =
            crate::goldman::fundamental_cycle(&surface_group::SurfaceGroupPresentation::new(2).unwrap()).unwrap();
        let complex = build_complex(2, refinement).unwrap();
        let us = random_cocycles(&spaces, 5, 12);
        let transported: Vec<_> = us.iter().map(|u| transport_cocycle(&rep, u, &complex).unwrap()).collect();
        let mut worst: f64 = 0.0;
        for i in 0..us.len() {
            for j in 0..us.len() {
                let bar = crate::goldman::goldman_pairing(&rep, &us[i], &us[j], &cycle, &form).unwrap();
                let simp = simplicial_pairing(&complex, &rep, &transported[i], &transported[j], &form).unwrap();
                let scale = linalg::vector_norm(&us[i]) * linalg::vector_norm(&us[j]);
                worst = worst.max((bar - simp).norm() / bar.norm().max(scale * 1e-3));
            }
        }
        worst
    }

    #[test]
    fn agrees_with_bar_pairing() {
        for r in 0..2 {
            assert!(oracle_disagreement(LieGroupSpec::sl(2), r) < 1e-8);
            assert!(oracle_disagreement(LieGroupSpec::torus(), r) < 1e-8);
        }
    }

    #[test]
    fn coboundaries_pair_to_zero() {
        let rep = rep::random_flat_representation(LieGroupSpec::sl(2), 2, 1, 0.5).unwrap();
        let spaces = cohomology::cohomology(&rep, crate::tol::FLAT_TOL, &crate::tol::RankPolicy::default()).unwrap();
        let form = InvariantForm::trace_form(*rep.spec());
        let k = build_complex(2, 1).unwrap();
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(4);
        let s = crate::linalg::random_vector(&mut rng, 3);
        let f = transport_cocycle(&rep, &spaces.coboundary(&s), &k).unwrap();
        for v in random_cocycles(&spaces, 6, 5) {
            let h = transport_cocycle(&rep, &v, &k).unwrap();
            assert!(simplicial_pairing(&k, &rep, &f, &h, &form).unwrap().norm() < 1e-8);
        }
    }

    #[test]
    fn torus_generators_give_intersection_matrix() {
        let rep = rep::random_flat_representation(LieGroupSpec::torus(), 2, 2, 1.0).unwrap();
        let form = InvariantForm::trace_form(LieGroupSpec::torus());
        let k = build_complex(2, 0).unwrap();
        let basis: Vec<_> = (0..4)
            .map(|i| {
                let mut u = CVector::zeros(4);
                u[i] = c(1.0, 0.0);
                transport_cocycle(&rep, &u, &k).unwrap()
            })
            .collect();
        for i in 0..4 {
            for j in 0..4 {
                let expected = match (i % 2, j % 2) {
                    _ if i / 2 != j / 2 => 0.0,
                    (0, 1) => 1.0,
                    (1, 0) => -1.0,
                    _ => 0.0,
                };
                let got = simplicial_pairing(&k, &rep, &basis[i], &basis[j], &form).unwrap();
                assert!((got - c(expected, 0.0)).norm() < 1e-12, "({i},{j}) -> {got}");
            }
        }
    }
}
