//! The Brieskorn polynomial `z_1^2 + ... + z_n^2 + z_{n+1}^d`, its links and
//! bounding varieties, the `S^1 x O(n)` actions, and the fixed-point and
//! isotropy data of the free involution `tau`.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::gaussian::GaussianRational;
use crate::rational::{rational_to_f64, ratio64_to_f64, serde_rational};

/// A point of `C^(n+1)` in double precision.
#[derive(Debug, Clone, PartialEq)]
pub struct Point(pub Vec<Complex64>);

impl Point {
    pub fn new(coords: Vec<Complex64>) -> Self {
        Self(coords)
    }

    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self(pairs.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm_squared(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(other.0.iter())
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt()
    }
}

impl Serialize for Point {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let pairs: Vec<[f64; 2]> = self.0.iter().map(|z| [z.re, z.im]).collect();
        pairs.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let pairs: Vec<Vec<f64>> = Vec::deserialize(d)?;
        let coords = pairs
            .into_iter()
            .map(|p| {
                if p.len() != 2 {
                    Err(D::Error::custom("coordinate must be a [re, im] pair"))
                } else {
                    Ok(Complex64::new(p[0], p[1]))
                }
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Point(coords))
    }
}

/// Which ambient space a point is examined on.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Space {
    /// The link `Sigma = V cap S^(2n+1)` with its `S^1 x O(n)` action.
    Link,
    /// The bounding variety `W = V cap D^(2n+2)` with its `O(n)` action.
    Variety,
}

/// Isotropy classes occurring in the orbit analysis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "camelCase")]
pub enum IsotropyLabel {
    Principal,
    CircleType,
    ReflectionType,
    TauFixed,
    SphereBoundaryType,
}

/// Isotropy class of a point together with a description of the group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IsotropyClass {
    pub label: IsotropyLabel,
    pub group: String,
}

/// One element of the groups acting on `C^(n+1)`.
#[derive(Debug, Clone)]
pub enum GroupElementAction {
    /// `w = exp(2 pi i turn)` acting by `(w^d z_1, ..., w^d z_n, w^2 z_(n+1))`.
    Circle { turn: Rational64 },
    /// `A in O(n)` acting on the first n coordinates.
    Orthogonal { matrix: DMatrix<f64> },
    /// The involution negating the first n coordinates.
    Tau,
}

const ORTHOGONALITY_TOL: f64 = 1e-10;

impl GroupElementAction {
    /// Applies the element to a point of `C^(n+1)`.
    pub fn apply(&self, data: &BrieskornData, z: &Point) -> Result<Point> {
        data.check_dimension(z)?;
        let n = data.n as usize;
        match self {
            GroupElementAction::Tau => {
                let mut out = z.0.clone();
                for c in out.iter_mut().take(n) {
                    *c = -*c;
                }
                Ok(Point(out))
            }
            GroupElementAction::Circle { turn } => {
                let theta = 2.0 * std::f64::consts::PI * ratio64_to_f64(turn);
                let wd = Complex64::from_polar(1.0, theta * data.d as f64);
                let w2 = Complex64::from_polar(1.0, theta * 2.0);
                let mut out = z.0.clone();
                for c in out.iter_mut().take(n) {
                    *c *= wd;
                }
                out[n] *= w2;
                Ok(Point(out))
            }
            GroupElementAction::Orthogonal { matrix } => {
                if matrix.nrows() != n || matrix.ncols() != n {
                    return Err(Error::DimensionMismatch {
                        expected: n,
                        got: matrix.nrows(),
                    });
                }
                let dev = (matrix.transpose() * matrix - DMatrix::identity(n, n)).abs().max();
                if dev > ORTHOGONALITY_TOL {
                    return Err(Error::NonOrthogonalMatrix {
                        deviation: dev,
                        tol: ORTHOGONALITY_TOL,
                    });
                }
                let mut out = z.0.clone();
                for i in 0..n {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for j in 0..n {
                        acc += matrix[(i, j)] * z.0[j];
                    }
                    out[i] = acc;
                }
                Ok(Point(out))
            }
        }
    }

    /// Exact application of `tau` to a Gaussian-rational point.
    pub fn apply_tau_exact(n: usize, z: &[GaussianRational]) -> Result<Vec<GaussianRational>> {
        if z.len() != n + 1 {
            return Err(Error::DimensionMismatch {
                expected: n + 1,
                got: z.len(),
            });
        }
        let mut out = z.to_vec();
        for c in out.iter_mut().take(n) {
            *c = c.neg();
        }
        Ok(out)
    }
}

/// An isolated fixed point `(0, ..., 0, lambda)` of `tau` on the variety,
/// with `lambda^d = epsilon`.
#[derive(Debug, Clone, Serialize)]
pub struct TauFixedPoint {
    /// Index `k` of the root, sorted by principal argument.
    pub index: u32,
    /// Argument `k/d` as a fraction of a full turn.
    #[serde(with = "crate::rational::serde_ratio64")]
    pub turn: Rational64,
    /// `epsilon^(1/d)` in double precision.
    pub radius: f64,
    /// Exact radius when `epsilon` is a d-th power of a rational.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius_exact: Option<String>,
    /// Ambient coordinates.
    pub point: Point,
}

impl TauFixedPoint {
    pub fn last_coordinate(&self) -> Complex64 {
        *self.point.0.last().expect("fixed point has coordinates")
    }

    /// Checks `lambda^d = epsilon` in double precision.
    pub fn verify_power(&self, data: &BrieskornData, tol: f64) -> bool {
        let lam = self.last_coordinate();
        (lam.powu(data.d) - Complex64::new(rational_to_f64(&data.epsilon), 0.0)).norm() <= tol
    }

    /// Checks `lambda^d = epsilon` in exact cyclotomic arithmetic when the
    /// radius has a rational closed form.
    pub fn verify_power_exact(&self, data: &BrieskornData) -> Option<bool> {
        let r = exact_root(&data.epsilon, data.d)?;
        let lam = Cyclotomic::root_of_unity(data.d, self.index as i64).scale(&r);
        let mut pow = Cyclotomic::one();
        for _ in 0..data.d {
            pow = pow.mul(&lam);
        }
        Some(pow.to_rational().as_ref() == Some(&data.epsilon))
    }
}

/// A permutation of `{0, ..., len-1}` stored by images.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Permutation(pub Vec<usize>);

impl Permutation {
    pub fn identity(len: usize) -> Self {
        Self((0..len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn is_identity(&self) -> bool {
        self.0.iter().enumerate().all(|(i, &j)| i == j)
    }

    pub fn is_bijection(&self) -> bool {
        let mut seen = vec![false; self.0.len()];
        for &j in &self.0 {
            if j >= self.0.len() || seen[j] {
                return false;
            }
            seen[j] = true;
        }
        true
    }

    /// `(self.compose(other))(i) = self(other(i))`.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    /// True iff the permutation is a single cycle through all elements.
    pub fn is_full_cycle(&self) -> bool {
        let d = self.0.len();
        if d == 0 {
            return false;
        }
        let mut i = 0;
        for step in 1..=d {
            i = self.0[i];
            if i == 0 {
                return step == d;
            }
        }
        false
    }
}

/// Parameters of one Brieskorn link/variety pair.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BrieskornData {
    n: u32,
    d: u32,
    #[serde(with = "serde_rational")]
    epsilon: BigRational,
}

impl BrieskornData {
    /// `n` odd and at least 3, `d` odd and at least 1, `0 <= epsilon < 1`.
    pub fn new(n: u32, d: u32, epsilon: BigRational) -> Result<Self> {
        if n % 2 == 0 || n < 3 {
            return Err(Error::Parity(format!("n must be odd and >= 3, got {n}")));
        }
        if d % 2 == 0 || d < 1 {
            return Err(Error::Parity(format!("d must be odd and >= 1, got {d}")));
        }
        if epsilon.is_negative() || epsilon >= BigRational::one() {
            return Err(Error::EpsilonOutOfRange(format!(
                "epsilon must lie in [0, 1), got {epsilon}"
            )));
        }
        Ok(Self { n, d, epsilon })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn epsilon(&self) -> &BigRational {
        &self.epsilon
    }

    pub fn epsilon_f64(&self) -> f64 {
        rational_to_f64(&self.epsilon)
    }

    /// Dimension `2n - 1` of the link.
    pub fn link_dim(&self) -> u32 {
        2 * self.n - 1
    }

    /// Dimension `2n` of the bounding variety.
    pub fn variety_dim(&self) -> u32 {
        2 * self.n
    }

    /// Number of complex ambient coordinates.
    pub fn ambient_len(&self) -> usize {
        self.n as usize + 1
    }

    fn check_dimension(&self, z: &Point) -> Result<()> {
        if z.len() != self.ambient_len() {
            Err(Error::DimensionMismatch {
                expected: self.ambient_len(),
                got: z.len(),
            })
        } else {
            Ok(())
        }
    }

    /// Evaluates `f_d(z) = z_1^2 + ... + z_n^2 + z_(n+1)^d`.
    pub fn polynomial(&self, z: &Point) -> Result<Complex64> {
        self.check_dimension(z)?;
        let n = self.n as usize;
        let mut acc = Complex64::new(0.0, 0.0);
        for c in z.0.iter().take(n) {
            acc += c * c;
        }
        acc += z.0[n].powu(self.d);
        Ok(acc)
    }

    /// Exact evaluation on a Gaussian-rational point.
    pub fn polynomial_exact(&self, z: &[GaussianRational]) -> Result<GaussianRational> {
        if z.len() != self.ambient_len() {
            return Err(Error::DimensionMismatch {
                expected: self.ambient_len(),
                got: z.len(),
            });
        }
        let n = self.n as usize;
        let mut acc = GaussianRational::zero();
        for c in z.iter().take(n) {
            acc = acc.add(&c.mul(c));
        }
        Ok(acc.add(&z[n].pow(self.d)))
    }

    /// Complex gradient of `f_d` at `z`.
    pub fn gradient(&self, z: &Point) -> Result<Vec<Complex64>> {
        self.check_dimension(z)?;
        let n = self.n as usize;
        let mut g: Vec<Complex64> = z.0.iter().take(n).map(|c| 2.0 * c).collect();
        g.push(self.d as f64 * z.0[n].powu(self.d - 1));
        Ok(g)
    }

    /// True iff `|f_d(z) - epsilon| <= tol` and `||z|^2 - 1| <= tol`.
    pub fn on_link(&self, z: &Point, tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::InvalidParameter("tol must be nonnegative".into()));
        }
        let f = self.polynomial(z)?;
        let eps = Complex64::new(self.epsilon_f64(), 0.0);
        Ok((f - eps).norm() <= tol && (z.norm_squared() - 1.0).abs() <= tol)
    }

    /// True iff `|f_d(z) - epsilon| <= tol` and `|z| <= 1 + tol`.
    pub fn in_variety(&self, z: &Point, tol: f64) -> Result<bool> {
        if tol < 0.0 {
            return Err(Error::InvalidParameter("tol must be nonnegative".into()));
        }
        let f = self.polynomial(z)?;
        let eps = Complex64::new(self.epsilon_f64(), 0.0);
        Ok((f - eps).norm() <= tol && z.norm() <= 1.0 + tol)
    }

    /// The `d` isolated fixed points of `tau` on the variety, sorted by
    /// principal argument of the last coordinate. Requires `0 < epsilon < 1`.
    pub fn tau_fixed_points(&self) -> Result<Vec<TauFixedPoint>> {
        if self.epsilon.is_zero() {
            return Err(Error::EpsilonOutOfRange(
                "epsilon = 0: the fiber is singular and the fixed set degenerates".into(),
            ));
        }
        let d = self.d;
        let radius = self.epsilon_f64().powf(1.0 / d as f64);
        let radius_exact = exact_root(&self.epsilon, d);
        let mut out = Vec::with_capacity(d as usize);
        for k in 0..d {
            let turn = Rational64::new(k as i64, d as i64);
            let theta = 2.0 * std::f64::consts::PI * k as f64 / d as f64;
            let lambda = Complex64::from_polar(radius, theta);
            let mut coords = vec![Complex64::new(0.0, 0.0); self.ambient_len()];
            coords[self.n as usize] = lambda;
            let point = Point(coords);
            // tau fixes the point by construction (first n coordinates are 0).
            debug_assert_eq!(
                GroupElementAction::Tau.apply(self, &point).unwrap(),
                point
            );
            out.push(TauFixedPoint {
                index: k,
                turn,
                radius,
                radius_exact: radius_exact.as_ref().map(|r| r.to_string()),
                point,
            });
        }
        Ok(out)
    }

    /// Permutation of the `tau`-fixed points induced by a 2d-th root of
    /// unity `w = exp(2 pi i turn)` acting through `w^2` on the last
    /// coordinate.
    pub fn z2d_permutation(&self, turn: Rational64) -> Result<Permutation> {
        let d = self.d as i64;
        let scaled = turn * Rational64::new(2 * d, 1);
        if !scaled.is_integer() {
            return Err(Error::NotRootOfUnity(format!(
                "exp(2 pi i {turn}) (needs order dividing {})",
                2 * d
            )));
        }
        let j = scaled.to_integer().rem_euclid(2 * d);
        let shift = (j % d) as usize;
        let dd = self.d as usize;
        let perm = Permutation((0..dd).map(|k| (k + shift) % dd).collect());

        // Cross-check numerically against the actual action on the points.
        let fps = self.tau_fixed_points()?;
        let action = GroupElementAction::Circle { turn };
        for (k, fp) in fps.iter().enumerate() {
            let image = action.apply(self, &fp.point)?;
            let target = &fps[perm.apply(k)].point;
            if image.distance(target) > 1e-9 * (1.0 + fp.radius) {
                return Err(Error::InvalidParameter(format!(
                    "permutation cross-check failed at fixed point {k}"
                )));
            }
        }
        Ok(perm)
    }

    /// Isotropy class of a point under the action attached to `space`
    /// (`S^1 x O(n)` on the link, `O(n)` on the variety).
    ///
    /// The class is read off the pattern of the real and imaginary parts
    /// `u, v` of the first `n` coordinates: the rank of `span{u, v}` and the
    /// vanishing of the last coordinate determine the stabilizer.
    pub fn isotropy_at(&self, z: &Point, space: Space, tol: f64) -> Result<IsotropyClass> {
        self.check_dimension(z)?;
        let on_space = match space {
            Space::Link => self.on_link(z, tol.max(1e-8))?,
            Space::Variety => self.in_variety(z, tol.max(1e-8))?,
        };
        if !on_space {
            return Err(Error::PointNotOnSpace(format!(
                "point fails the defining equations of the {space:?} within tolerance"
            )));
        }
        let n = self.n as usize;
        let u: Vec<f64> = z.0.iter().take(n).map(|c| c.re).collect();
        let v: Vec<f64> = z.0.iter().take(n).map(|c| c.im).collect();
        let nu: f64 = u.iter().map(|x| x * x).sum::<f64>().sqrt();
        let nv: f64 = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        let dot: f64 = u.iter().zip(v.iter()).map(|(a, b)| a * b).sum();
        let area_sq = (nu * nu) * (nv * nv) - dot * dot;
        let scale = nu.max(nv).max(1e-300);
        let rank = if nu.max(nv) <= tol {
            0
        } else if area_sq.max(0.0).sqrt() > tol * scale * scale {
            2
        } else {
            1
        };
        let last_zero = z.0[n].norm() <= tol;
        let m = self.n; // for group description strings
        match (space, rank, last_zero) {
            (Space::Link, 2, false) => Ok(IsotropyClass {
                label: IsotropyLabel::Principal,
                group: format!("Z2 x O({})", m - 2),
            }),
            (Space::Link, 2, true) => Ok(IsotropyClass {
                label: IsotropyLabel::CircleType,
                group: format!("S1 x O({})", m - 2),
            }),
            (Space::Link, 1, _) => Ok(IsotropyClass {
                label: IsotropyLabel::ReflectionType,
                group: format!("Z2 x O({})", m - 1),
            }),
            (Space::Link, _, _) => Err(Error::PointNotOnSpace(
                "link points have a nonzero component among the first n coordinates".into(),
            )),
            (Space::Variety, 0, _) => Ok(IsotropyClass {
                label: IsotropyLabel::TauFixed,
                group: format!("O({m})"),
            }),
            (Space::Variety, 1, true) => Ok(IsotropyClass {
                label: IsotropyLabel::SphereBoundaryType,
                group: format!("conjugate to O({})", m - 1),
            }),
            (Space::Variety, 1, false) => Ok(IsotropyClass {
                label: IsotropyLabel::ReflectionType,
                group: format!("conjugate to O({})", m - 1),
            }),
            (Space::Variety, _, _) => Ok(IsotropyClass {
                label: IsotropyLabel::Principal,
                group: format!("conjugate to O({})", m - 2),
            }),
        }
    }

    /// Draws `count` pseudo-random points on the link by projecting sphere
    /// points onto `f_d = epsilon` with the normalized gradient flow
    /// restricted to the sphere (at most 50 Newton steps, residual `tol`).
    /// Points failing the transversality check are rejected and resampled.
    pub fn sample_link_points(&self, count: usize, seed: u64, tol: f64) -> Result<Vec<Point>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0usize;
        let max_attempts = 200 * count.max(1);
        while out.len() < count {
            attempts += 1;
            if attempts > max_attempts {
                return Err(Error::Sampling(format!(
                    "projection failed to converge for {} of {} points",
                    count - out.len(),
                    count
                )));
            }
            let mut z: Vec<Complex64> = (0..self.ambient_len())
                .map(|_| {
                    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
                })
                .collect();
            normalize(&mut z);
            if let Some(p) = self.project_to_link(z, tol) {
                out.push(p);
            }
        }
        Ok(out)
    }

    fn project_to_link(&self, mut z: Vec<Complex64>, tol: f64) -> Option<Point> {
        let eps = Complex64::new(self.epsilon_f64(), 0.0);
        for _ in 0..50 {
            let p = Point(z.clone());
            let f = self.polynomial(&p).ok()?;
            if (f - eps).norm() <= tol {
                if self.transversal_at(&p) {
                    return Some(p);
                }
                return None;
            }
            let g = self.gradient(&p).ok()?;
            let gn: f64 = g.iter().map(|c| c.norm_sqr()).sum();
            if gn < 1e-30 {
                return None;
            }
            let step = (f - eps) / gn;
            for (zi, gi) in z.iter_mut().zip(g.iter()) {
                *zi -= step * gi.conj();
            }
            normalize(&mut z);
        }
        None
    }

    /// Checks that the defining equation cuts the sphere transversally at
    /// `z`: the two real gradients of `f_d`, projected to the sphere tangent
    /// space, must stay linearly independent.
    pub fn transversal_at(&self, z: &Point) -> bool {
        let Ok(g) = self.gradient(z) else {
            return false;
        };
        // Real gradients of Re f and Im f inside R^(2n+2) are conj(g) and
        // i*conj(g); project out the sphere normal (the point itself).
        let conj_g: Vec<Complex64> = g.iter().map(|c| c.conj()).collect();
        let i_conj_g: Vec<Complex64> = conj_g.iter().map(|c| Complex64::i() * c).collect();
        let zn = z.norm();
        if zn < 1e-30 {
            return false;
        }
        let dot = |a: &[Complex64], b: &[Complex64]| -> f64 {
            a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
        };
        let project = |u: &[Complex64]| -> Vec<Complex64> {
            let c = dot(&z.0, u) / (zn * zn);
            u.iter().zip(z.0.iter()).map(|(ui, zi)| ui - c * zi).collect()
        };
        let p1 = project(&conj_g);
        let p2 = project(&i_conj_g);
        let n1 = dot(&p1, &p1);
        let n2 = dot(&p2, &p2);
        let cross = dot(&p1, &p2);
        let gram = n1 * n2 - cross * cross;
        gram > 1e-12 * (n1 * n2).max(1e-300)
    }
}

fn normalize(z: &mut [Complex64]) {
    let n: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if n > 0.0 {
        for c in z.iter_mut() {
            *c /= n;
        }
    }
}

/// The exact d-th root of a positive rational, when both numerator and
/// denominator are d-th powers of integers.
fn exact_root(eps: &BigRational, d: u32) -> Option<BigRational> {
    if !eps.is_positive() {
        return None;
    }
    let num = eps.numer();
    let den = eps.denom();
    let rn = num.nth_root(d);
    let rd = den.nth_root(d);
    if &pow_bigint(&rn, d) == num && &pow_bigint(&rd, d) == den {
        Some(BigRational::new(rn, rd))
    } else {
        None
    }
}

fn pow_bigint(b: &BigInt, e: u32) -> BigInt {
    let mut acc = BigInt::one();
    for _ in 0..e {
        acc *= b;
    }
    acc
}
