//! Matrix-group backends GL(n), SL(n) and the torus C*, their Lie algebras,
//! the adjoint action and the trace form.

use alloc::format;
use alloc::vec::Vec;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, CMatrix, CVector};
use crate::tol::DET_TOL;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GroupKind {
    GL,
    SL,
    Torus,
}

impl GroupKind {
    pub fn name(self) -> &'static str {
        match self {
            GroupKind::GL => "GL",
            GroupKind::SL => "SL",
            GroupKind::Torus => "TORUS",
        }
    }
}

impl core::str::FromStr for GroupKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "GL" | "gl" => Ok(GroupKind::GL),
            "SL" | "sl" => Ok(GroupKind::SL),
            "TORUS" | "torus" | "C*" => Ok(GroupKind::Torus),
            other => Err(Error::InvalidGroup(format!("unknown group kind {other:?}"))),
        }
    }
}

/// A matrix group together with its matrix size.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct LieGroupSpec {
    kind: GroupKind,
    n: usize,
}

impl LieGroupSpec {
    pub fn new(kind: GroupKind, n: usize) -> Result<Self> {
        match kind {
            GroupKind::Torus if n != 1 => Err(Error::InvalidGroup(format!("the torus C* has n = 1, got {n}"))),
            GroupKind::SL if n < 2 => Err(Error::InvalidGroup(format!("SL(n) needs n >= 2, got {n}"))),
            GroupKind::GL if n < 1 => Err(Error::InvalidGroup("GL(0) is empty".into())),
            _ => Ok(Self { kind, n }),
        }
    }

    pub fn gl(n: usize) -> Self {
        Self::new(GroupKind::GL, n).expect("n >= 1")
    }

    pub fn sl(n: usize) -> Self {
        Self::new(GroupKind::SL, n).expect("n >= 2")
    }

    pub fn torus() -> Self {
        Self { kind: GroupKind::Torus, n: 1 }
    }

    pub fn kind(&self) -> GroupKind {
        self.kind
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Dimension of the group (and of its Lie algebra).
    pub fn dim(&self) -> usize {
        match self.kind {
            GroupKind::GL => self.n * self.n,
            GroupKind::SL => self.n * self.n - 1,
            GroupKind::Torus => 1,
        }
    }

    /// Dimension of the center.
    pub fn center_dim(&self) -> usize {
        match self.kind {
            GroupKind::GL | GroupKind::Torus => 1,
            GroupKind::SL => 0,
        }
    }

    pub fn is_abelian(&self) -> bool {
        self.kind == GroupKind::Torus
    }

    /// Ordered basis: `E_ij` for GL; off-diagonal `E_ij` then
    /// `H_k = E_kk - E_(k+1)(k+1)` for SL; the scalar 1 for the torus.
    pub fn algebra_basis(&self) -> Vec<CMatrix> {
        let n = self.n;
        let unit = |i: usize, j: usize| {
            let mut m = CMatrix::zeros(n, n);
            m[(i, j)] = Complex64::new(1.0, 0.0);
            m
        };
        match self.kind {
            GroupKind::Torus => alloc::vec![linalg::identity(1)],
            GroupKind::GL => (0..n).flat_map(|i| (0..n).map(move |j| (i, j))).map(|(i, j)| unit(i, j)).collect(),
            GroupKind::SL => {
                let mut basis: Vec<CMatrix> = (0..n)
                    .flat_map(|i| (0..n).map(move |j| (i, j)))
                    .filter(|(i, j)| i != j)
                    .map(|(i, j)| unit(i, j))
                    .collect();
                for k in 0..n - 1 {
                    basis.push(unit(k, k) - unit(k + 1, k + 1));
                }
                basis
            }
        }
    }

    /// Coordinates of an algebra element in the ordered basis. For SL the
    /// trace part of `x` is ignored.
    pub fn coords(&self, x: &CMatrix) -> CVector {
        let n = self.n;
        match self.kind {
            GroupKind::Torus => CVector::from_element(1, x[(0, 0)]),
            GroupKind::GL => CVector::from_iterator(n * n, (0..n).flat_map(|i| (0..n).map(move |j| x[(i, j)]))),
            GroupKind::SL => {
                let mut out = CVector::zeros(self.dim());
                let mut k = 0;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            out[k] = x[(i, j)];
                            k += 1;
                        }
                    }
                }
                let mean = linalg::trace(x) / n as f64;
                let mut running = Complex64::new(0.0, 0.0);
                for d in 0..n - 1 {
                    running += x[(d, d)] - mean;
                    out[k + d] = running;
                }
                out
            }
        }
    }

    pub fn from_coords(&self, v: &CVector) -> CMatrix {
        let n = self.n;
        match self.kind {
            GroupKind::Torus => CMatrix::from_element(1, 1, v[0]),
            GroupKind::GL => CMatrix::from_fn(n, n, |i, j| v[i * n + j]),
            GroupKind::SL => {
                let mut m = CMatrix::zeros(n, n);
                let mut k = 0;
                for i in 0..n {
                    for j in 0..n {
                        if i != j {
                            m[(i, j)] = v[k];
                            k += 1;
                        }
                    }
                }
                for d in 0..n - 1 {
                    m[(d, d)] += v[k + d];
                    m[(d + 1, d + 1)] -= v[k + d];
                }
                m
            }
        }
    }

    /// Orthogonal projection of an n×n matrix onto the Lie algebra.
    pub fn project(&self, x: &CMatrix) -> CMatrix {
        match self.kind {
            GroupKind::SL => {
                let mean = linalg::trace(x) / self.n as f64;
                x - linalg::identity(self.n) * mean
            }
            _ => x.clone(),
        }
    }

    /// Deviation of `g` from the group constraint: `|det g - 1|` for SL and
    /// zero for the other backends. Singular matrices are rejected.
    pub fn check_element(&self, g: &CMatrix) -> Result<()> {
        if g.nrows() != self.n || g.ncols() != self.n {
            return Err(Error::DimensionMismatch { expected: self.n, found: g.nrows() });
        }
        let det = linalg::determinant(g);
        if det.norm() <= 1e-300 || !det.re.is_finite() {
            return Err(Error::Singular);
        }
        if self.kind == GroupKind::SL {
            let dev = (det - 1.0).norm();
            if dev > DET_TOL {
                return Err(Error::NotInGroup(dev));
            }
        }
        Ok(())
    }

    /// Rescale an invertible matrix back onto SL(n); other backends unchanged.
    pub fn normalize(&self, g: &CMatrix) -> CMatrix {
        if self.kind == GroupKind::SL {
            let det = linalg::determinant(g);
            g / linalg::principal_root(det, self.n)
        } else {
            g.clone()
        }
    }

    /// Algebra element with independent complex Gaussian basis coordinates.
    pub fn random_algebra_element<R: Rng + ?Sized>(&self, rng: &mut R) -> CMatrix {
        let v = CVector::from_fn(self.dim(), |_, _| {
            let re: f64 = StandardNormal.sample(rng);
            let im: f64 = StandardNormal.sample(rng);
            Complex64::new(re, im) * core::f64::consts::FRAC_1_SQRT_2
        });
        self.from_coords(&v)
    }

    /// Random group element `exp(scale * X)` with Gaussian `X`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, scale: f64) -> CMatrix {
        let x = self.random_algebra_element(rng);
        self.normalize(&linalg::expm(&(x * Complex64::new(scale, 0.0))))
    }
}

/// `g X g^-1`.
pub fn ad_action(g: &CMatrix, x: &CMatrix) -> Result<CMatrix> {
    let inv = linalg::inverse(g)?;
    Ok(g * x * inv)
}

/// Matrix of `Ad(g)` in basis coordinates, given `g` and its inverse.
pub fn ad_matrix_with_inverse(spec: &LieGroupSpec, g: &CMatrix, g_inv: &CMatrix) -> CMatrix {
    let dim = spec.dim();
    if spec.is_abelian() {
        return linalg::identity(1);
    }
    let basis = spec.algebra_basis();
    let mut m = CMatrix::zeros(dim, dim);
    for (k, e) in basis.iter().enumerate() {
        let image = spec.coords(&(g * e * g_inv));
        m.set_column(k, &image);
    }
    m
}

pub fn ad_matrix(spec: &LieGroupSpec, g: &CMatrix) -> Result<CMatrix> {
    let inv = linalg::inverse(g)?;
    Ok(ad_matrix_with_inverse(spec, g, &inv))
}

pub fn bracket(x: &CMatrix, y: &CMatrix) -> CMatrix {
    x * y - y * x
}

/// The invariant symmetric form `B(X, Y) = scale * tr(XY)`; on the torus this
/// is `scale * x * y`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InvariantForm {
    spec: LieGroupSpec,
    scale: f64,
}

impl InvariantForm {
    pub fn trace_form(spec: LieGroupSpec) -> Self {
        Self { spec, scale: 1.0 }
    }

    pub fn scaled(spec: LieGroupSpec, scale: f64) -> Self {
        Self { spec, scale }
    }

    pub fn spec(&self) -> &LieGroupSpec {
        &self.spec
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn eval(&self, x: &CMatrix, y: &CMatrix) -> Complex64 {
        linalg::trace(&(x * y)) * self.scale
    }

    /// Gram matrix `B(e_i, e_j)` on the ordered algebra basis.
    pub fn gram(&self) -> CMatrix {
        let basis = self.spec.algebra_basis();
        let d = basis.len();
        CMatrix::from_fn(d, d, |i, j| self.eval(&basis[i], &basis[j]))
    }
}

pub fn form_gram(spec: &LieGroupSpec) -> CMatrix {
    InvariantForm::trace_form(*spec).gram()
}
