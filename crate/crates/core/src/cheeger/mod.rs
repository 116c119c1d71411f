//! Cheeger deformations evaluated pointwise: orbit splittings, the orbit
//! tensor `P` and comparison operator `C_t`, the deformed metric `h_t`, the
//! curvature lower bound of horizontal-lift planes, non-commutation
//! certificates, and the `t0` search over sampled compacta.
//!
//! The deformation shrinks orbit directions: the product metric
//! `h + (1/t) Q` on `M x G` submerges onto `h_t` with `h(C_t v, w) =
//! h_t(v, w)`, and the horizontal lift of `C_t^(-1) v` at `(p, e)` is
//! `(v, -t P v_m)`. Sectional curvatures of lift planes decompose as
//! `alpha(t) sec_h + t beta(t) sec_Q`, which bounds `sec_(h_t)` from below
//! by Gray-O'Neill.

mod chart;
mod generators;

pub use chart::{
    ActionChart, ChartSetSpec, ChartSpec, LieAlgebraData, LieAlgebraSpec, SecCallback,
    DEFAULT_TOL,
};
pub use generators::{brieskorn_link_charts, flat_torus_chart, hopf_chart, random_charts};

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};

/// Basis columns of the null space of `a`, from the spectral decomposition
/// of `a^T a`; singular directions below `tol * sigma_max` count as null.
/// Forming the Gram matrix squares the spectrum, so the effective floor is
/// the square root of machine epsilon.
fn null_space(a: &DMatrix<f64>, tol: f64) -> DMatrix<f64> {
    let q = a.ncols();
    let gram = a.transpose() * a;
    let eig = nalgebra::SymmetricEigen::new(gram);
    let sigma_max = eig.eigenvalues.iter().fold(0.0f64, |m, &l| m.max(l.max(0.0))).sqrt();
    let tol = tol.max(1e-7);
    let threshold = if sigma_max > 0.0 { tol * sigma_max } else { tol };
    let mut cols = Vec::new();
    for (i, &l) in eig.eigenvalues.iter().enumerate() {
        if l.max(0.0).sqrt() <= threshold {
            cols.push(eig.eigenvectors.column(i).into_owned());
        }
    }
    let mut out = DMatrix::zeros(q, cols.len());
    for (i, c) in cols.iter().enumerate() {
        out.set_column(i, c);
    }
    out
}

/// Gram-Schmidt with respect to the inner product `w`; fails on rank drops.
fn orthonormalize(basis: &DMatrix<f64>, w: &DMatrix<f64>, tol: f64) -> Result<DMatrix<f64>> {
    let mut out = basis.clone();
    let n = out.ncols();
    for i in 0..n {
        for j in 0..i {
            let cj = out.column(j).into_owned();
            let proj = (cj.transpose() * w * out.column(i))[(0, 0)];
            let updated = out.column(i) - &cj * proj;
            out.set_column(i, &updated);
        }
        let norm_sq = (out.column(i).transpose() * w * out.column(i))[(0, 0)];
        if norm_sq <= tol * tol {
            return Err(Error::RankDeficient(
                "orthonormalization collapsed a basis vector".into(),
            ));
        }
        let scaled = out.column(i) / norm_sq.sqrt();
        out.set_column(i, &scaled);
    }
    Ok(out)
}

/// The orbit splitting `T_p M = V_p + H_p` together with the algebra
/// splitting `g = g_p + m_p` at the chart point.
#[derive(Debug, Clone)]
pub struct OrbitSplitting {
    /// Basis of the isotropy algebra `g_p` (columns, algebra coordinates).
    pub iso_basis: DMatrix<f64>,
    /// Q-orthonormal basis of `m_p` (columns, algebra coordinates).
    pub m_basis: DMatrix<f64>,
    /// Images `X_a^*` of the `m_p` basis under the Killing map (M x m).
    pub killing_m: DMatrix<f64>,
    /// h-orthonormal basis of the vertical space `V_p`.
    pub vertical: DMatrix<f64>,
    /// h-orthonormal basis of the horizontal space `H_p`.
    pub horizontal: DMatrix<f64>,
}

impl OrbitSplitting {
    pub fn vertical_dim(&self) -> usize {
        self.vertical.ncols()
    }

    pub fn horizontal_dim(&self) -> usize {
        self.horizontal.ncols()
    }

    pub fn m_dim(&self) -> usize {
        self.m_basis.ncols()
    }

    pub fn isotropy_dim(&self) -> usize {
        self.iso_basis.ncols()
    }
}

/// Splits the tangent space and the Lie algebra at the chart point:
/// `g_p` is the kernel of the Killing map, `m_p` its Q-orthogonal
/// complement, `V_p` the image of `m_p`, `H_p` the h-orthogonal complement.
pub fn orbit_splitting(chart: &ActionChart) -> Result<OrbitSplitting> {
    let tol = chart.tol();
    let alg = chart.algebra();
    let d = alg.dim();
    let k = chart.killing();

    let iso_raw = null_space(k, tol);
    let iso_basis = if iso_raw.ncols() > 0 {
        orthonormalize(&iso_raw, alg.q(), tol)?
    } else {
        iso_raw
    };

    let m_raw = if iso_basis.ncols() == 0 {
        DMatrix::identity(d, d)
    } else if iso_basis.ncols() == d {
        DMatrix::zeros(d, 0)
    } else {
        // m_p = kernel of x -> (iso_basis^T Q) x
        null_space(&(iso_basis.transpose() * alg.q()), tol)
    };
    let m_basis = if m_raw.ncols() > 0 {
        orthonormalize(&m_raw, alg.q(), tol)?
    } else {
        m_raw
    };

    let killing_m = k * &m_basis;
    let vertical = if killing_m.ncols() > 0 {
        orthonormalize(&killing_m, chart.metric(), tol)?
    } else {
        DMatrix::zeros(chart.dim(), 0)
    };

    let horizontal_raw = if vertical.ncols() == 0 {
        DMatrix::identity(chart.dim(), chart.dim())
    } else {
        null_space(&(vertical.transpose() * chart.metric()), tol)
    };
    let horizontal = if horizontal_raw.ncols() > 0 {
        orthonormalize(&horizontal_raw, chart.metric(), tol)?
    } else {
        horizontal_raw
    };

    if vertical.ncols() + horizontal.ncols() != chart.dim() {
        return Err(Error::RankDeficient(format!(
            "splitting dimensions {} + {} do not fill the tangent space of dimension {}",
            vertical.ncols(),
            horizontal.ncols(),
            chart.dim()
        )));
    }
    Ok(OrbitSplitting {
        iso_basis,
        m_basis,
        killing_m,
        vertical,
        horizontal,
    })
}

/// The orbit tensor `P` on `m_p` in the Q-orthonormal basis, defined by
/// `Q(P X, Y) = h(X^*, Y^*)`: the Gram matrix of the Killing images.
pub fn compute_p(chart: &ActionChart) -> Result<DMatrix<f64>> {
    let splitting = orbit_splitting(chart)?;
    if splitting.m_dim() == 0 {
        return Err(Error::RankDeficient(
            "m_p is trivial; P is defined on a nontrivial orbit direction".into(),
        ));
    }
    Ok(p_matrix(chart, &splitting))
}

fn p_matrix(chart: &ActionChart, splitting: &OrbitSplitting) -> DMatrix<f64> {
    splitting.killing_m.transpose() * chart.metric() * &splitting.killing_m
}

/// The deformed metric `h_t` at one chart point, with the cached operators.
#[derive(Debug, Clone)]
pub struct DeformedMetric<'a> {
    chart: &'a ActionChart,
    t: f64,
    splitting: OrbitSplitting,
    p: DMatrix<f64>,
    p_inv_times_kmt_h: DMatrix<f64>,
    c_t: DMatrix<f64>,
    h_t: DMatrix<f64>,
}

/// Builds the Cheeger deformation at parameter `t >= 0`; `t = 0` returns the
/// original metric.
pub fn deformed_metric(chart: &ActionChart, t: f64) -> Result<DeformedMetric<'_>> {
    let splitting = orbit_splitting(chart)?;
    DeformedMetric::with_splitting(chart, splitting, t)
}

impl<'a> DeformedMetric<'a> {
    fn with_splitting(
        chart: &'a ActionChart,
        splitting: OrbitSplitting,
        t: f64,
    ) -> Result<Self> {
        if t < 0.0 || !t.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "deformation parameter must be a finite t >= 0, got {t}"
            )));
        }
        let m = chart.dim();
        let mdim = splitting.m_dim();
        let h = chart.metric();
        let p = if mdim > 0 {
            p_matrix(chart, &splitting)
        } else {
            DMatrix::zeros(0, 0)
        };
        let (c_t, p_inv_times_kmt_h) = if mdim > 0 {
            // On the orbit part C_t acts by (1 + tP)^(-1) through the Killing
            // identification; on the horizontal part it is the identity.
            let a_t = (DMatrix::identity(mdim, mdim) + &p * t)
                .try_inverse()
                .ok_or_else(|| Error::RankDeficient("1 + tP is singular".into()))?;
            let km = &splitting.killing_m;
            let hor = &splitting.horizontal;
            let mut basis = DMatrix::zeros(m, m);
            let mut image = DMatrix::zeros(m, m);
            let km_a = km * &a_t;
            for i in 0..mdim {
                basis.set_column(i, &km.column(i));
                image.set_column(i, &km_a.column(i));
            }
            for i in 0..hor.ncols() {
                basis.set_column(mdim + i, &hor.column(i));
                image.set_column(mdim + i, &hor.column(i));
            }
            let basis_inv = basis
                .try_inverse()
                .ok_or_else(|| Error::RankDeficient("tangent basis is singular".into()))?;
            let c_t = image * basis_inv;
            // v_m = P^(-1) (K_m^T h v): the m_p coordinates of the V-projection.
            let p_inv = p
                .clone()
                .try_inverse()
                .ok_or_else(|| Error::RankDeficient("P is singular".into()))?;
            (c_t, p_inv * km.transpose() * h)
        } else {
            (DMatrix::identity(m, m), DMatrix::zeros(0, m))
        };
        let h_t_raw = h * &c_t;
        let h_t = (&h_t_raw + h_t_raw.transpose()) * 0.5;
        Ok(Self {
            chart,
            t,
            splitting,
            p,
            p_inv_times_kmt_h,
            c_t,
            h_t,
        })
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn chart(&self) -> &ActionChart {
        self.chart
    }

    pub fn splitting(&self) -> &OrbitSplitting {
        &self.splitting
    }

    /// `P` in the Q-orthonormal basis of `m_p` (empty if `m_p = 0`).
    pub fn p(&self) -> &DMatrix<f64> {
        &self.p
    }

    /// The comparison operator with `h(C_t v, w) = h_t(v, w)`.
    pub fn c_t(&self) -> &DMatrix<f64> {
        &self.c_t
    }

    /// The deformed metric matrix.
    pub fn h_t(&self) -> &DMatrix<f64> {
        &self.h_t
    }

    pub fn h_t_inner(&self, v: &DVector<f64>, w: &DVector<f64>) -> f64 {
        (v.transpose() * &self.h_t * w)[(0, 0)]
    }

    /// The `m_p` coordinates of the vertical projection of `v`.
    pub fn m_projection(&self, v: &DVector<f64>) -> DVector<f64> {
        if self.splitting.m_dim() == 0 {
            DVector::zeros(0)
        } else {
            &self.p_inv_times_kmt_h * v
        }
    }

    /// The wedge-norm weights `alpha(t)`, `beta(t)` of the lift plane of
    /// `(v, w)`.
    pub fn alpha_beta(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<(f64, f64)> {
        let parts = self.lift_plane_parts(v, w)?;
        Ok((parts.wedge_h / parts.denom, parts.beta_num / parts.denom))
    }

    /// Curvature of the horizontal lift plane
    /// `<(v, -t P v_m), (w, -t P w_m)>` in the product metric:
    /// `alpha(t) sec_h<v,w> + t beta(t) sec_Q<P v_m, P w_m>`.
    /// A lower bound for `sec_(h_t)<C_t^(-1) v, C_t^(-1) w>`.
    pub fn lift_plane_curvature_bound(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<f64> {
        let parts = self.lift_plane_parts(v, w)?;
        let sec_h = self.chart.sec(v, w)?;
        Ok((sec_h * parts.wedge_h + 0.25 * self.t.powi(3) * parts.bracket_q_sq) / parts.denom)
    }

    fn lift_plane_parts(&self, v: &DVector<f64>, w: &DVector<f64>) -> Result<LiftPlaneParts> {
        let chart = self.chart;
        if v.len() != chart.dim() || w.len() != chart.dim() {
            return Err(Error::DimensionMismatch {
                expected: chart.dim(),
                got: v.len().max(w.len()),
            });
        }
        let wedge_h = chart.h_wedge_squared(v, w);
        let scale = chart.h_inner(v, v) * chart.h_inner(w, w);
        if wedge_h <= chart.tol() * scale.max(1e-300) {
            return Err(Error::DependentVectors);
        }
        let t = self.t;
        let alg = chart.algebra();
        let (a, b, bracket_q_sq, wedge_q) = if self.splitting.m_dim() > 0 {
            let x = self.m_projection(v);
            let y = self.m_projection(w);
            let a = &self.splitting.m_basis * (&self.p * x);
            let b = &self.splitting.m_basis * (&self.p * y);
            let br = alg.bracket(&a, &b);
            (
                alg.q_inner(&a, &a),
                alg.q_inner(&b, &b),
                alg.q_norm_squared(&br),
                alg.q_wedge_squared(&a, &b),
            )
        } else {
            (0.0, 0.0, 0.0, 0.0)
        };
        // product metric h + (1/t) Q on the lifts (v, -tA), (w, -tB):
        // the Q part contributes (1/t) t^2 = t times the Q inner products.
        let g11 = chart.h_inner(v, v) + t * a;
        let g22 = chart.h_inner(w, w) + t * b;
        let g12 = chart.h_inner(v, w)
            + if self.splitting.m_dim() > 0 {
                let x = self.m_projection(v);
                let y = self.m_projection(w);
                let pa = &self.splitting.m_basis * (&self.p * x);
                let pb = &self.splitting.m_basis * (&self.p * y);
                t * alg.q_inner(&pa, &pb)
            } else {
                0.0
            };
        let denom = g11 * g22 - g12 * g12;
        Ok(LiftPlaneParts {
            wedge_h,
            bracket_q_sq,
            beta_num: t * t * wedge_q,
            denom,
        })
    }

    /// Pointwise scalar-curvature estimate: the average of the lift-plane
    /// bound over all plane pairs of an h_t-orthonormal basis. Positive
    /// values certify positive scalar curvature of `h_t` at this point on
    /// the sampled planes.
    pub fn scal_estimate(&self) -> Result<f64> {
        let m = self.chart.dim();
        let chol = nalgebra::Cholesky::new(self.h_t.clone())
            .ok_or_else(|| Error::RankDeficient("h_t is not positive definite".into()))?;
        // Columns of L^(-T) are h_t-orthonormal.
        let l_inv_t = chol
            .l()
            .transpose()
            .try_inverse()
            .ok_or_else(|| Error::RankDeficient("Cholesky factor is singular".into()))?;
        let mut total = 0.0;
        let mut pairs = 0usize;
        for i in 0..m {
            let vi = &self.c_t * l_inv_t.column(i).into_owned();
            for j in (i + 1)..m {
                let vj = &self.c_t * l_inv_t.column(j).into_owned();
                total += self.lift_plane_curvature_bound(&vi, &vj)?;
                pairs += 1;
            }
        }
        if pairs == 0 {
            return Err(Error::RankDeficient("chart has no tangent planes".into()));
        }
        Ok(total / pairs as f64)
    }
}

struct LiftPlaneParts {
    wedge_h: f64,
    bracket_q_sq: f64,
    beta_num: f64,
    denom: f64,
}

/// Searches `m_p` for a pair whose `P`-images do not commute: basis pairs
/// first, then 200 seeded random combinations. A returned pair certifies
/// unbounded curvature growth of the corresponding orbit plane.
pub fn noncommuting_pair(
    chart: &ActionChart,
    tol: f64,
    seed: u64,
) -> Result<Option<(DVector<f64>, DVector<f64>)>> {
    let splitting = orbit_splitting(chart)?;
    let mdim = splitting.m_dim();
    if mdim < 2 {
        return Ok(None);
    }
    let p = p_matrix(chart, &splitting);
    let alg = chart.algebra();
    let check = |x: &DVector<f64>, y: &DVector<f64>| -> Option<(DVector<f64>, DVector<f64>)> {
        let px = &splitting.m_basis * (&p * x);
        let py = &splitting.m_basis * (&p * y);
        let br = alg.bracket(&px, &py);
        let nx = alg.q_norm_squared(&px).sqrt();
        let ny = alg.q_norm_squared(&py).sqrt();
        if alg.q_norm_squared(&br).sqrt() > tol * nx * ny {
            Some((&splitting.m_basis * x, &splitting.m_basis * y))
        } else {
            None
        }
    };
    for i in 0..mdim {
        for j in (i + 1)..mdim {
            let ei = DVector::from_fn(mdim, |k, _| if k == i { 1.0 } else { 0.0 });
            let ej = DVector::from_fn(mdim, |k, _| if k == j { 1.0 } else { 0.0 });
            if let Some(pair) = check(&ei, &ej) {
                return Ok(Some(pair));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..200 {
        let x = DVector::from_fn(mdim, |_, _| rng.sample(StandardNormal));
        let y = DVector::from_fn(mdim, |_, _| rng.sample(StandardNormal));
        if let Some(pair) = check(&x, &y) {
            return Ok(Some(pair));
        }
    }
    Ok(None)
}

/// Grid configuration for the `t0` search.
#[derive(Debug, Clone)]
pub struct T0Config {
    pub t_max: f64,
    /// Geometric grid density.
    pub points_per_decade: usize,
    /// Smallest positive grid point.
    pub t_min: f64,
}

impl Default for T0Config {
    fn default() -> Self {
        Self {
            t_max: 1e4,
            points_per_decade: 64,
            t_min: 1e-3,
        }
    }
}

impl T0Config {
    /// `{0}` followed by a geometric grid from `t_min` to `t_max`.
    pub fn grid(&self) -> Vec<f64> {
        let mut grid = vec![0.0];
        if self.t_max <= 0.0 {
            return grid;
        }
        let t_min = self.t_min.min(self.t_max).max(1e-12);
        let decades = (self.t_max / t_min).log10();
        let steps = ((decades * self.points_per_decade as f64).ceil() as usize).max(1);
        for i in 0..=steps {
            let t = t_min * 10f64.powf(decades * i as f64 / steps as f64);
            grid.push(t.min(self.t_max));
        }
        grid
    }
}

/// Smallest grid value `t0 <= t_max` such that the scalar-curvature
/// estimate of every chart is strictly positive for all sampled
/// `t in [t0, t_max]`; `None` if no such grid point exists. This is a
/// numerical certificate on the sample, not a proof.
pub fn find_t0(charts: &[ActionChart], config: &T0Config) -> Result<Option<f64>> {
    if charts.is_empty() {
        return Err(Error::EmptyCharts);
    }
    for chart in charts {
        if !chart.has_sec() {
            return Err(Error::MissingCurvature);
        }
    }
    let grid = config.grid();
    // all_positive[i] = every chart has a positive estimate at grid[i]
    let mut all_positive = vec![true; grid.len()];
    let mut splittings = Vec::with_capacity(charts.len());
    for chart in charts {
        splittings.push(orbit_splitting(chart)?);
    }
    for (i, &t) in grid.iter().enumerate() {
        for (chart, splitting) in charts.iter().zip(splittings.iter()) {
            let dm = DeformedMetric::with_splitting(chart, splitting.clone(), t)?;
            if dm.scal_estimate()? <= 0.0 {
                all_positive[i] = false;
                break;
            }
        }
    }
    // earliest index from which the estimates stay positive through t_max
    let mut from = None;
    for i in (0..grid.len()).rev() {
        if all_positive[i] {
            from = Some(i);
        } else {
            break;
        }
    }
    Ok(from.map(|i| grid[i]))
}
