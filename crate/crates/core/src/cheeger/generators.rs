//! Built-in chart generators: the Hopf circle action on the round 3-sphere,
//! flat torus charts, Brieskorn-link charts for the `O(n)` action, and
//! randomized valid charts for stress tests.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::chart::{ActionChart, LieAlgebraData};
use crate::brieskorn::BrieskornData;
use crate::error::{Error, Result};
use num_rational::BigRational;

/// Round unit 3-sphere at a point, with the Hopf circle action.
///
/// Coordinates: an h-orthonormal frame `(fiber, e2, e3)`; the Killing field
/// of the unit circle generator is the unit fiber direction, and all
/// sectional curvatures equal 1.
pub fn hopf_chart() -> ActionChart {
    let algebra = Arc::new(
        LieAlgebraData::abelian(1, DMatrix::identity(1, 1)).expect("abelian algebra is valid"),
    );
    ActionChart::new(
        algebra,
        DMatrix::identity(3, 3),
        DMatrix::from_column_slice(3, 1, &[1.0, 0.0, 0.0]),
        1e-10,
    )
    .expect("hopf chart is valid")
    .with_sec_const(1.0)
}

/// Flat 2-torus acting on itself: abelian algebra, identity Killing map,
/// vanishing curvature.
pub fn flat_torus_chart() -> ActionChart {
    let algebra = Arc::new(
        LieAlgebraData::abelian(2, DMatrix::identity(2, 2)).expect("abelian algebra is valid"),
    );
    ActionChart::new(
        algebra,
        DMatrix::identity(2, 2),
        DMatrix::identity(2, 2),
        1e-10,
    )
    .expect("torus chart is valid")
    .with_sec_const(0.0)
}

/// Embeds a complex vector into `R^(2(n+1))` in block layout
/// `(Re z_1, ..., Re z_(n+1), Im z_1, ..., Im z_(n+1))`.
fn embed(z: &[Complex64]) -> DVector<f64> {
    let n = z.len();
    DVector::from_fn(2 * n, |i, _| {
        if i < n {
            z[i].re
        } else {
            z[i - n].im
        }
    })
}

/// Charts for the `O(n)` action at sampled points of the link
/// `Sigma_epsilon(d)`, with the induced (ambient-orthonormal) metric and a
/// synthetic constant sectional-curvature callback.
pub fn brieskorn_link_charts(
    n: u32,
    d: u32,
    epsilon: BigRational,
    samples: usize,
    seed: u64,
    sec_const: f64,
) -> Result<Vec<ActionChart>> {
    let data = BrieskornData::new(n, d, epsilon)?;
    let points = data.sample_link_points(samples, seed, 1e-10)?;
    let nn = n as usize;
    let ambient = 2 * (nn + 1);
    let chart_dim = (2 * n - 1) as usize;
    let algebra = Arc::new(LieAlgebraData::so_n(nn)?);
    let basis_matrices = LieAlgebraData::so_n_basis(nn);

    let mut charts = Vec::with_capacity(points.len());
    for z in &points {
        // Tangent space of the link: kernel of the three real constraint
        // gradients (the sphere normal and the two real parts of grad f).
        let grad = data.gradient(z)?;
        let conj_grad: Vec<Complex64> = grad.iter().map(|c| c.conj()).collect();
        let i_conj_grad: Vec<Complex64> = conj_grad.iter().map(|c| Complex64::i() * c).collect();
        let mut constraints = DMatrix::zeros(3, ambient);
        constraints.set_row(0, &embed(&z.0).transpose());
        constraints.set_row(1, &embed(&conj_grad).transpose());
        constraints.set_row(2, &embed(&i_conj_grad).transpose());
        let gram = constraints.transpose() * &constraints;
        let eig = nalgebra::SymmetricEigen::new(gram);
        let sigma_max = eig
            .eigenvalues
            .iter()
            .fold(0.0f64, |m, &l| m.max(l.max(0.0)))
            .sqrt();
        let mut tangent_cols = Vec::new();
        for (i, &l) in eig.eigenvalues.iter().enumerate() {
            // Gram-matrix eigenvalues square the singular values, so the
            // noise floor sits near sqrt(machine epsilon) times sigma_max.
            if l.max(0.0).sqrt() <= 1e-6 * sigma_max {
                tangent_cols.push(eig.eigenvectors.column(i).into_owned());
            }
        }
        if tangent_cols.len() != chart_dim {
            return Err(Error::RankDeficient(format!(
                "tangent space dimension {} at a sampled point (expected {chart_dim})",
                tangent_cols.len()
            )));
        }
        let mut tangent = DMatrix::zeros(ambient, chart_dim);
        for (i, c) in tangent_cols.iter().enumerate() {
            tangent.set_column(i, c);
        }

        // Killing fields: xi acts diagonally on the real and imaginary parts
        // of the first n coordinates.
        let mut killing_ambient = DMatrix::zeros(ambient, algebra.dim());
        for (a, xi) in basis_matrices.iter().enumerate() {
            let mut col = DVector::zeros(ambient);
            for i in 0..nn {
                for j in 0..nn {
                    let c = xi[(i, j)];
                    if c != 0.0 {
                        col[i] += c * z.0[j].re;
                        col[nn + 1 + i] += c * z.0[j].im;
                    }
                }
            }
            killing_ambient.set_column(a, &col);
        }
        // The fields are tangent to the link; express them in the chart frame.
        let killing = tangent.transpose() * killing_ambient;

        let chart = ActionChart::new(
            algebra.clone(),
            DMatrix::identity(chart_dim, chart_dim),
            killing,
            1e-10,
        )?
        .with_sec_const(sec_const);
        charts.push(chart);
    }
    Ok(charts)
}

/// Randomized valid charts over abelian and `so(3)` algebras; metrics are
/// random SPD matrices, Killing values are unconstrained.
pub fn random_charts(count: usize, seed: u64) -> Vec<ActionChart> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let so3 = Arc::new(LieAlgebraData::so3());
    let mut out = Vec::with_capacity(count);
    for idx in 0..count {
        let (algebra, alg_dim): (Arc<LieAlgebraData>, usize) = if idx % 2 == 0 {
            (so3.clone(), 3)
        } else {
            let d = 1 + idx % 3;
            (
                Arc::new(LieAlgebraData::abelian(d, DMatrix::identity(d, d)).unwrap()),
                d,
            )
        };
        let m = 3 + idx % 4;
        let a = DMatrix::from_fn(m, m, |_, _| rng.sample::<f64, _>(StandardNormal));
        let metric = &a * a.transpose() + DMatrix::identity(m, m) * 0.5;
        let killing = DMatrix::from_fn(m, alg_dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        out.push(
            ActionChart::new(algebra, metric, killing, 1e-10)
                .expect("randomized chart is valid by construction"),
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cheeger::{deformed_metric, noncommuting_pair, orbit_splitting};
    use crate::rational::parse_rational;

    #[test]
    fn brieskorn_charts_have_full_orbits() {
        let charts =
            brieskorn_link_charts(3, 3, parse_rational("1/2").unwrap(), 4, 11, 0.0).unwrap();
        assert_eq!(charts.len(), 4);
        for chart in &charts {
            assert_eq!(chart.dim(), 5);
            let s = orbit_splitting(chart).unwrap();
            // generic link points have trivial isotropy inside so(3)
            assert_eq!(s.m_dim(), 3);
            assert_eq!(s.vertical_dim(), 3);
            assert_eq!(s.horizontal_dim(), 2);
            assert!(noncommuting_pair(chart, 1e-8, 0).unwrap().is_some());
            // the deformation machinery runs on these charts
            let dm = deformed_metric(chart, 1.0).unwrap();
            assert!(dm.scal_estimate().unwrap() > 0.0);
        }
    }

    #[test]
    fn random_charts_are_valid() {
        let charts = random_charts(10, 0);
        assert_eq!(charts.len(), 10);
        for chart in &charts {
            let dm = deformed_metric(chart, 2.0).unwrap();
            assert_eq!(dm.c_t().nrows(), chart.dim());
        }
    }
}
