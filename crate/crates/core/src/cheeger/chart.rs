//! Pointwise data of an isometric action: Lie algebra structure constants,
//! a bi-invariant form, the metric at the point and the Killing field values.

use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default tolerance for rank and positivity decisions.
pub const DEFAULT_TOL: f64 = 1e-10;

/// A finite-dimensional Lie algebra with a bi-invariant inner product.
#[derive(Clone)]
pub struct LieAlgebraData {
    dim: usize,
    /// Structure constants `c^k_(ij)`, flat row-major: index `(k*D + i)*D + j`.
    structure: Vec<f64>,
    q: DMatrix<f64>,
}

impl fmt::Debug for LieAlgebraData {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("LieAlgebraData")
            .field("dim", &self.dim)
            .finish()
    }
}

impl LieAlgebraData {
    /// Validates antisymmetry, the Jacobi identity and ad-invariance of `q`
    /// within `tol`, and positive definiteness of `q`.
    pub fn new(dim: usize, structure: Vec<f64>, q: DMatrix<f64>, tol: f64) -> Result<Self> {
        if structure.len() != dim * dim * dim {
            return Err(Error::SizeMismatch(format!(
                "structure constants need {} entries, got {}",
                dim * dim * dim,
                structure.len()
            )));
        }
        if q.nrows() != dim || q.ncols() != dim {
            return Err(Error::SizeMismatch(format!(
                "Q must be {dim}x{dim}, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        let alg = Self { dim, structure, q };
        let c = |k: usize, i: usize, j: usize| alg.structure[(k * dim + i) * dim + j];
        for k in 0..dim {
            for i in 0..dim {
                for j in 0..dim {
                    if (c(k, i, j) + c(k, j, i)).abs() > tol {
                        return Err(Error::ChartInvariant(format!(
                            "structure constants not antisymmetric at (k,i,j)=({k},{i},{j})"
                        )));
                    }
                }
            }
        }
        // Jacobi: sum_m c^m_(ij) c^l_(mk) + c^m_(jk) c^l_(mi) + c^m_(ki) c^l_(mj) = 0
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    for l in 0..dim {
                        let mut acc = 0.0;
                        for m in 0..dim {
                            acc += c(m, i, j) * c(l, m, k)
                                + c(m, j, k) * c(l, m, i)
                                + c(m, k, i) * c(l, m, j);
                        }
                        if acc.abs() > tol {
                            return Err(Error::ChartInvariant(format!(
                                "Jacobi identity fails at (i,j,k,l)=({i},{j},{k},{l}): {acc:e}"
                            )));
                        }
                    }
                }
            }
        }
        // ad-invariance: Q([e_i, e_j], e_k) + Q(e_j, [e_i, e_k]) = 0
        for i in 0..dim {
            for j in 0..dim {
                for k in 0..dim {
                    let mut acc = 0.0;
                    for m in 0..dim {
                        acc += c(m, i, j) * alg.q[(m, k)] + c(m, i, k) * alg.q[(j, m)];
                    }
                    if acc.abs() > tol {
                        return Err(Error::ChartInvariant(format!(
                            "Q is not ad-invariant at (i,j,k)=({i},{j},{k}): {acc:e}"
                        )));
                    }
                }
            }
        }
        if (&alg.q - alg.q.transpose()).abs().max() > tol {
            return Err(Error::ChartInvariant("Q is not symmetric".into()));
        }
        if nalgebra::Cholesky::new(alg.q.clone()).is_none() {
            return Err(Error::ChartInvariant("Q is not positive definite".into()));
        }
        Ok(alg)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn q(&self) -> &DMatrix<f64> {
        &self.q
    }

    /// `[x, y]` in basis coordinates.
    pub fn bracket(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let d = self.dim;
        let mut out = DVector::zeros(d);
        for i in 0..d {
            let xi = x[i];
            if xi == 0.0 {
                continue;
            }
            for j in 0..d {
                let yj = y[j];
                if yj == 0.0 {
                    continue;
                }
                for k in 0..d {
                    out[k] += self.structure[(k * d + i) * d + j] * xi * yj;
                }
            }
        }
        out
    }

    pub fn q_inner(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        (x.transpose() * &self.q * y)[(0, 0)]
    }

    pub fn q_norm_squared(&self, x: &DVector<f64>) -> f64 {
        self.q_inner(x, x)
    }

    /// `|x ^ y|^2` with respect to `Q`.
    pub fn q_wedge_squared(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let xx = self.q_inner(x, x);
        let yy = self.q_inner(y, y);
        let xy = self.q_inner(x, y);
        xx * yy - xy * xy
    }

    /// Sectional curvature `(1/4) |[x,y]|_Q^2 / |x ^ y|_Q^2` of the
    /// bi-invariant metric, normalized over a possibly non-orthonormal span.
    pub fn sec_q(&self, x: &DVector<f64>, y: &DVector<f64>) -> Result<f64> {
        let wedge = self.q_wedge_squared(x, y);
        let scale = self.q_norm_squared(x) * self.q_norm_squared(y);
        if wedge <= DEFAULT_TOL * scale.max(1e-300) {
            return Err(Error::DependentVectors);
        }
        Ok(0.25 * self.q_norm_squared(&self.bracket(x, y)) / wedge)
    }

    /// Abelian algebra of the given dimension with form `q`.
    pub fn abelian(dim: usize, q: DMatrix<f64>) -> Result<Self> {
        Self::new(dim, vec![0.0; dim * dim * dim], q, DEFAULT_TOL)
    }

    /// `so(n)` in the elementary antisymmetric basis `E_(ij)`, `i < j`,
    /// with `Q(A, B) = (1/2) tr(A^T B)` (the identity form in this basis).
    pub fn so_n(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidParameter("so(n) needs n >= 2".into()));
        }
        let pairs: Vec<(usize, usize)> = (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .collect();
        let dim = pairs.len();
        let basis: Vec<DMatrix<f64>> = pairs
            .iter()
            .map(|&(i, j)| {
                let mut m = DMatrix::zeros(n, n);
                m[(i, j)] = 1.0;
                m[(j, i)] = -1.0;
                m
            })
            .collect();
        let mut structure = vec![0.0; dim * dim * dim];
        for (a, ma) in basis.iter().enumerate() {
            for (b, mb) in basis.iter().enumerate() {
                let br = ma * mb - mb * ma;
                for (k, &(i, j)) in pairs.iter().enumerate() {
                    structure[(k * dim + a) * dim + b] = br[(i, j)];
                }
            }
        }
        Self::new(dim, structure, DMatrix::identity(dim, dim), DEFAULT_TOL)
    }

    /// `so(3)`, where the basis brackets are the cyclic relations.
    pub fn so3() -> Self {
        Self::so_n(3).expect("so(3) is valid")
    }

    /// The matrices of the `so(n)` basis in the order used by [`so_n`].
    pub fn so_n_basis(n: usize) -> Vec<DMatrix<f64>> {
        (0..n)
            .flat_map(|i| ((i + 1)..n).map(move |j| (i, j)))
            .map(|(i, j)| {
                let mut m = DMatrix::zeros(n, n);
                m[(i, j)] = 1.0;
                m[(j, i)] = -1.0;
                m
            })
            .collect()
    }
}

/// A sectional-curvature callback for planes in chart coordinates.
pub type SecCallback = Arc<dyn Fn(&DVector<f64>, &DVector<f64>) -> f64 + Send + Sync>;

/// Pointwise numerical data of an isometric action at one point.
#[derive(Clone)]
pub struct ActionChart {
    algebra: Arc<LieAlgebraData>,
    dim: usize,
    metric: DMatrix<f64>,
    killing: DMatrix<f64>,
    sec_h: Option<SecCallback>,
    tol: f64,
}

impl fmt::Debug for ActionChart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActionChart")
            .field("dim", &self.dim)
            .field("algebra_dim", &self.algebra.dim())
            .field("has_sec", &self.sec_h.is_some())
            .finish()
    }
}

impl ActionChart {
    /// `metric` is the M x M metric at the point, `killing` the M x D matrix
    /// of Killing field values for the algebra basis.
    pub fn new(
        algebra: Arc<LieAlgebraData>,
        metric: DMatrix<f64>,
        killing: DMatrix<f64>,
        tol: f64,
    ) -> Result<Self> {
        let dim = metric.nrows();
        if metric.ncols() != dim {
            return Err(Error::SizeMismatch("metric must be square".into()));
        }
        if (&metric - metric.transpose()).abs().max() > tol.max(1e-12) * 10.0 {
            return Err(Error::ChartInvariant("metric is not symmetric".into()));
        }
        if nalgebra::Cholesky::new(metric.clone()).is_none() {
            return Err(Error::ChartInvariant(
                "metric is not positive definite".into(),
            ));
        }
        if killing.nrows() != dim || killing.ncols() != algebra.dim() {
            return Err(Error::SizeMismatch(format!(
                "killing must be {dim}x{}, got {}x{}",
                algebra.dim(),
                killing.nrows(),
                killing.ncols()
            )));
        }
        Ok(Self {
            algebra,
            dim,
            metric,
            killing,
            sec_h: None,
            tol,
        })
    }

    pub fn with_sec(mut self, sec: SecCallback) -> Self {
        self.sec_h = Some(sec);
        self
    }

    pub fn with_sec_const(self, value: f64) -> Self {
        self.with_sec(Arc::new(move |_, _| value))
    }

    pub fn algebra(&self) -> &Arc<LieAlgebraData> {
        &self.algebra
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn killing(&self) -> &DMatrix<f64> {
        &self.killing
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn has_sec(&self) -> bool {
        self.sec_h.is_some()
    }

    pub fn sec(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        match &self.sec_h {
            Some(cb) => Ok(cb(v, w)),
            None => Err(Error::MissingCurvature),
        }
    }

    pub fn h_inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        (v.transpose() * &self.metric * w)[(0, 0)]
    }

    pub fn h_wedge_squared(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        let vv = self.h_inner(v, v);
        let ww = self.h_inner(w, w);
        let vw = self.h_inner(v, w);
        vv * ww - vw * vw
    }
}

/// JSON form of a Lie algebra (matrices row-major).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct LieAlgebraSpec {
    pub dimension: usize,
    pub q: Vec<f64>,
    pub structure_constants: Vec<f64>,
}

/// JSON form of one chart (matrices row-major).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartSpec {
    pub dimension: usize,
    pub metric: Vec<f64>,
    pub killing: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sec_h_const: Option<f64>,
}

/// JSON form of a chart set sharing one Lie algebra.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ChartSetSpec {
    pub lie_algebra: LieAlgebraSpec,
    pub charts: Vec<ChartSpec>,
}

impl ChartSetSpec {
    pub fn from_json(raw: &str) -> Result<Self> {
        Ok(serde_json::from_str(raw)?)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Validates and materializes the charts; reports the first failing
    /// invariant.
    pub fn build(&self, tol: f64) -> Result<Vec<ActionChart>> {
        let d = self.lie_algebra.dimension;
        if self.lie_algebra.q.len() != d * d {
            return Err(Error::SizeMismatch(format!(
                "lie_algebra.q must have {} entries",
                d * d
            )));
        }
        let q = DMatrix::from_row_slice(d, d, &self.lie_algebra.q);
        let algebra = Arc::new(LieAlgebraData::new(
            d,
            self.lie_algebra.structure_constants.clone(),
            q,
            tol.max(1e-10),
        )?);
        self.charts
            .iter()
            .map(|c| {
                let m = c.dimension;
                if c.metric.len() != m * m {
                    return Err(Error::SizeMismatch(format!(
                        "chart metric must have {} entries",
                        m * m
                    )));
                }
                if c.killing.len() != m * d {
                    return Err(Error::SizeMismatch(format!(
                        "chart killing must have {} entries",
                        m * d
                    )));
                }
                let metric = DMatrix::from_row_slice(m, m, &c.metric);
                let killing = DMatrix::from_row_slice(m, d, &c.killing);
                let chart = ActionChart::new(algebra.clone(), metric, killing, tol)?;
                Ok(match c.sec_h_const {
                    Some(v) => chart.with_sec_const(v),
                    None => chart,
                })
            })
            .collect()
    }
}
