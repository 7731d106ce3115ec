//! JSON documents exchanged by the command-line tool.
//!
//! Complex numbers are `[re, im]` pairs and matrices are arrays of rows.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use surfsym_core::abelian::{self, HyperellipticCurve, PeriodData};
use surfsym_core::cohomology::CohomologySpaces;
use surfsym_core::goldman::GoldmanMatrix;
use surfsym_core::lie::{GroupKind, LieGroupSpec};
use surfsym_core::linalg::{CMatrix, CVector};
use surfsym_core::rep::Representation;
use surfsym_core::simplicial::TriangulatedSurfaceComplex;

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

pub type Pair = [f64; 2];

pub fn pair(z: Complex64) -> Pair {
    [z.re, z.im]
}

pub fn matrix_rows(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| pair(m[(i, j)])).collect()).collect()
}

pub fn vector_entries(v: &CVector) -> Vec<Pair> {
    v.iter().copied().map(pair).collect()
}

pub fn columns(m: &CMatrix) -> Vec<Vec<Pair>> {
    (0..m.ncols()).map(|j| m.column(j).iter().copied().map(pair).collect()).collect()
}

fn matrix_from_rows(rows: &[Vec<Pair>]) -> Result<CMatrix, CliError> {
    let n = rows.len();
    if n == 0 || rows.iter().any(|r| r.len() != n) {
        return Err(CliError::Input("matrices must be square and non-empty".into()));
    }
    Ok(CMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RepresentationDoc {
    pub group: String,
    pub n: usize,
    pub genus: usize,
    pub matrices: Vec<Vec<Vec<Pair>>>,
    pub residual: f64,
}

impl RepresentationDoc {
    pub fn from_rep(rep: &Representation) -> Self {
        Self {
            group: rep.spec().kind().name().to_string(),
            n: rep.spec().n(),
            genus: rep.genus(),
            matrices: rep.matrices().iter().map(matrix_rows).collect(),
            residual: rep.residual(),
        }
    }

    /// Rebuilds the representation; the stored residual is recomputed rather
    /// than trusted.
    pub fn to_rep(&self) -> Result<Representation, CliError> {
        let kind: GroupKind = self.group.parse().map_err(CliError::Numeric)?;
        let spec = LieGroupSpec::new(kind, self.n).map_err(CliError::Numeric)?;
        let matrices = self.matrices.iter().map(|m| matrix_from_rows(m)).collect::<Result<Vec<_>, _>>()?;
        Ok(Representation::new(spec, self.genus, matrices)?)
    }

    /// SHA-256 of the canonical JSON encoding of the generator matrices.
    pub fn hash(&self) -> String {
        let canonical = serde_json::to_vec(&(&self.group, self.n, self.genus, &self.matrices)).expect("serializable");
        Sha256::digest(&canonical).iter().map(|b| format!("{b:02x}")).collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CohomologyDoc {
    pub h0: usize,
    pub h1: usize,
    pub h2: usize,
    pub euler_characteristic: i64,
    pub delta0_singular_values: Vec<f64>,
    pub delta1_singular_values: Vec<f64>,
    /// Representative cocycles, one coordinate vector each.
    pub representatives: Vec<Vec<Pair>>,
}

impl CohomologyDoc {
    pub fn new(spaces: &CohomologySpaces) -> Self {
        Self {
            h0: spaces.h0,
            h1: spaces.h1,
            h2: spaces.h2,
            euler_characteristic: spaces.euler_characteristic(),
            delta0_singular_values: spaces.delta0_singular_values.clone(),
            delta1_singular_values: spaces.delta1_singular_values.clone(),
            representatives: columns(&spaces.representatives),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct BasisProvenance {
    pub rep_hash: String,
    pub seed: Option<u64>,
    pub rank_tol: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct GoldmanDoc {
    pub size: usize,
    pub omega: Vec<Vec<Pair>>,
    pub basis: BasisProvenance,
}

impl GoldmanDoc {
    pub fn new(m: &GoldmanMatrix, basis: BasisProvenance) -> Self {
        Self { size: m.size(), omega: matrix_rows(&m.omega), basis }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct EdgeDoc {
    pub source: usize,
    pub target: usize,
    pub holonomy: Vec<i64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangleDoc {
    pub vertices: [usize; 3],
    /// Faces `[v1 v2], [v0 v2], [v0 v1]`.
    pub edges: [usize; 3],
    pub orientation: i8,
}

#[derive(Debug, Clone, Serialize)]
pub struct ComplexDoc {
    pub genus: usize,
    pub refinement: usize,
    pub vertices: usize,
    pub euler_characteristic: i64,
    pub edges: Vec<EdgeDoc>,
    pub triangles: Vec<TriangleDoc>,
    pub side_pairs: Vec<(usize, usize)>,
}

impl ComplexDoc {
    pub fn new(k: &TriangulatedSurfaceComplex) -> Self {
        Self {
            genus: k.genus(),
            refinement: k.refinement(),
            vertices: k.vertex_count(),
            euler_characteristic: k.euler_characteristic(),
            edges: k
                .edges()
                .iter()
                .map(|e| EdgeDoc { source: e.source, target: e.target, holonomy: e.holonomy.to_signed() })
                .collect(),
            triangles: k
                .triangles()
                .iter()
                .map(|t| TriangleDoc { vertices: t.vertices, edges: t.edges, orientation: t.orientation })
                .collect(),
            side_pairs: k.side_pairs().to_vec(),
        }
    }
}

/// A branch point: a real number, or `[re, im]` for experimental curves.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BranchPoint {
    Real(f64),
    Complex(Pair),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveDoc {
    pub branch_points: Vec<BranchPoint>,
    #[serde(default)]
    pub experimental: bool,
}

impl CurveDoc {
    pub fn to_curve(&self) -> Result<HyperellipticCurve, CliError> {
        let all_real: Option<Vec<f64>> = self
            .branch_points
            .iter()
            .map(|p| match p {
                BranchPoint::Real(x) => Some(*x),
                BranchPoint::Complex([x, 0.0]) => Some(*x),
                BranchPoint::Complex(_) => None,
            })
            .collect();
        match all_real {
            Some(points) if !self.experimental => Ok(HyperellipticCurve::new(&points)?),
            _ if !self.experimental => {
                Err(CliError::Input("complex branch points require \"experimental\": true".into()))
            }
            _ => {
                let points: Vec<Complex64> = self
                    .branch_points
                    .iter()
                    .map(|p| match p {
                        BranchPoint::Real(x) => Complex64::new(*x, 0.0),
                        BranchPoint::Complex([x, y]) => Complex64::new(*x, *y),
                    })
                    .collect();
                Ok(HyperellipticCurve::new_experimental(&points)?)
            }
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct PeriodDoc {
    pub genus: usize,
    pub branch_points: Vec<Pair>,
    pub experimental: bool,
    pub quadrature_order: usize,
    pub doubled_order: usize,
    pub drift: f64,
    pub orientation: i8,
    pub differentials: Vec<String>,
    pub cycles: Vec<String>,
    pub intersection: Vec<Vec<i32>>,
    pub pi_a: Vec<Vec<Pair>>,
    pub pi_b: Vec<Vec<Pair>>,
    pub relation_i_residual: f64,
    pub relation_ii_eigenvalues: Vec<f64>,
    pub relation_ii_definite: bool,
}

impl PeriodDoc {
    pub fn new(curve: &HyperellipticCurve, p: &PeriodData) -> Self {
        Self {
            genus: p.genus(),
            branch_points: curve.branch_points().iter().copied().map(pair).collect(),
            experimental: curve.is_experimental(),
            quadrature_order: p.order(),
            doubled_order: 2 * p.order(),
            drift: p.drift(),
            orientation: p.orientation(),
            differentials: abelian::holomorphic_basis(curve).iter().map(|d| d.to_string()).collect(),
            cycles: abelian::describe_cycles(p),
            intersection: p.intersection().to_vec(),
            pi_a: matrix_rows(p.pi_a()),
            pi_b: matrix_rows(p.pi_b()),
            relation_i_residual: p.relation_i_residual(),
            relation_ii_eigenvalues: p.relation_ii_eigenvalues().to_vec(),
            relation_ii_definite: p.relation_ii_definite(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use surfsym_core::rep;

    #[test]
    fn representation_round_trip() {
        let r = rep::random_flat_representation(LieGroupSpec::sl(2), 2, 1, 0.5).unwrap();
        let doc = RepresentationDoc::from_rep(&r);
        let text = serde_json::to_string(&doc).unwrap();
        let back: RepresentationDoc = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let r2 = back.to_rep().unwrap();
        assert_eq!(r2.matrices(), r.matrices());
        assert_eq!(back.hash(), doc.hash());
        assert_eq!(doc.hash().len(), 64);
    }

    #[test]
    fn curve_documents() {
        let doc: CurveDoc = serde_json::from_str(r#"{"branch_points": [5, -5, 3, -3, 1, -1]}"#).unwrap();
        let c = doc.to_curve().unwrap();
        assert_eq!(c.genus(), 2);
        assert_eq!(c.branch_points()[0].re, -5.0);
        let doc: CurveDoc = serde_json::from_str(r#"{"branch_points": [[0,1], 2, 3, 4, 5, 6]}"#).unwrap();
        assert!(doc.to_curve().is_err());
        let doc: CurveDoc =
            serde_json::from_str(r#"{"branch_points": [[-5,0.3], -3, [-1,0.3], 1, [3,0.3], 5], "experimental": true}"#)
                .unwrap();
        assert!(doc.to_curve().unwrap().is_experimental());
    }
}
