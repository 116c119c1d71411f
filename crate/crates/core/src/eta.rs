//! Equivariant, covering and relative eta-invariants assembled from local
//! fixed-point contributions in exact cyclotomic arithmetic.
//!
//! The assembly works in the vanishing regime of positive scalar curvature,
//! where the index and kernel terms of the boundary fixed point formula are
//! zero and the equivariant eta-invariant reduces to twice the sum of the
//! local contributions.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::{BigRational, Rational64};
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::classify;
use crate::cyclotomic::Cyclotomic;
use crate::error::{Error, Result};
use crate::rational::{denominator_is_power_of_two, inverse_power_of_two, parse_rational};

/// Maximal angle denominator accepted by the local-contribution formula.
pub const DEFAULT_ANGLE_DENOMINATOR_BOUND: i64 = 64;

/// An exact rational eta value.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EtaValue(BigRational);

impl EtaValue {
    pub fn new(value: BigRational) -> Self {
        Self(value)
    }

    pub fn zero() -> Self {
        Self(BigRational::zero())
    }

    pub fn from_integer(n: i64) -> Self {
        Self(BigRational::from_integer(n.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }

    pub fn neg(&self) -> Self {
        Self(-self.0.clone())
    }

    pub fn add(&self, rhs: &Self) -> Self {
        Self(&self.0 + &rhs.0)
    }

    pub fn sub(&self, rhs: &Self) -> Self {
        Self(&self.0 - &rhs.0)
    }

    /// True iff the value lies in `Z[1/2]`, as all pipeline outputs must.
    pub fn is_dyadic(&self) -> bool {
        denominator_is_power_of_two(&self.0)
    }

    pub fn numer_string(&self) -> String {
        self.0.numer().to_string()
    }

    pub fn denom_string(&self) -> String {
        self.0.denom().to_string()
    }
}

impl fmt::Display for EtaValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for EtaValue {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(Self(parse_rational(s)?))
    }
}

impl Serialize for EtaValue {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_string().serialize(s)
    }
}

impl<'de> Deserialize<'de> for EtaValue {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = String::deserialize(d)?;
        raw.parse().map_err(serde::de::Error::custom)
    }
}

/// Rotation angles of a group element on the tangent space at an isolated
/// fixed point of a complex m-fold, as fractions of a full turn in `(0, 1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RotationData {
    angles: Vec<Rational64>,
}

impl RotationData {
    pub fn new(angles: Vec<Rational64>) -> Result<Self> {
        for a in &angles {
            if a.is_zero() || a.is_negative() || *a >= Rational64::one() {
                return Err(Error::ZeroAngle(a.to_string()));
            }
        }
        Ok(Self { angles })
    }

    /// All angles `1/2`: the rotation data of a holomorphic involution.
    pub fn involution(complex_dim: u32) -> Self {
        Self {
            angles: vec![Rational64::new(1, 2); complex_dim as usize],
        }
    }

    pub fn angles(&self) -> &[Rational64] {
        &self.angles
    }

    pub fn len(&self) -> usize {
        self.angles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.angles.is_empty()
    }

    pub fn max_denominator(&self) -> i64 {
        self.angles.iter().map(|a| *a.denom()).max().unwrap_or(1)
    }

    /// Parses angles from `p/q` strings.
    pub fn parse(raw: &[&str]) -> Result<Self> {
        let angles = raw
            .iter()
            .map(|s| {
                Rational64::from_str(s.trim())
                    .map_err(|_| Error::InvalidParameter(format!("invalid angle `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(angles)
    }
}

impl Serialize for RotationData {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let raw: Vec<String> = self.angles.iter().map(|a| a.to_string()).collect();
        raw.serialize(s)
    }
}

impl<'de> Deserialize<'de> for RotationData {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw: Vec<String> = Vec::deserialize(d)?;
        let refs: Vec<&str> = raw.iter().map(|s| s.as_str()).collect();
        Self::parse(&refs).map_err(serde::de::Error::custom)
    }
}

/// Character table of a finite group, elements indexed `0..N` with `0` the
/// identity; values are exact cyclotomic numbers.
#[derive(Debug, Clone)]
pub struct CharacterTable {
    values: Vec<Cyclotomic>,
}

impl CharacterTable {
    pub fn new(values: Vec<Cyclotomic>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::SizeMismatch("character table is empty".into()));
        }
        match values[0].to_rational() {
            Some(r) if r.is_integer() && r.is_positive() => Ok(Self { values }),
            _ => Err(Error::InvalidParameter(
                "character at the identity must be a positive integer rank".into(),
            )),
        }
    }

    pub fn order(&self) -> usize {
        self.values.len()
    }

    pub fn value(&self, u: usize) -> &Cyclotomic {
        &self.values[u]
    }

    /// Trivial character of a group of order `n`.
    pub fn trivial(n: usize) -> Self {
        Self {
            values: vec![Cyclotomic::one(); n],
        }
    }

    /// The sign character of `Z_2`.
    pub fn z2_sign() -> Self {
        Self {
            values: vec![Cyclotomic::one(), Cyclotomic::from_integer(-1)],
        }
    }

    /// The character `u -> zeta_n^(j u)` of the cyclic group `Z_n`.
    pub fn cyclic(n: u32, j: i64) -> Self {
        Self {
            values: (0..n as i64)
                .map(|u| Cyclotomic::root_of_unity(n, j * u))
                .collect(),
        }
    }
}

/// One isolated fixed point with its rotation data.
#[derive(Debug, Clone)]
pub struct FixedPointContribution {
    pub id: String,
    pub rotation: RotationData,
}

/// The fixed-point data entering the equivariant eta assembly.
#[derive(Debug, Clone)]
pub struct FixedPointSet {
    points: Vec<FixedPointContribution>,
    assert_psc_vanishing: bool,
}

impl FixedPointSet {
    pub fn new(points: Vec<FixedPointContribution>, assert_psc_vanishing: bool) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for p in &points {
            if !seen.insert(p.id.clone()) {
                return Err(Error::DuplicateFixedPointId(p.id.clone()));
            }
        }
        Ok(Self {
            points,
            assert_psc_vanishing,
        })
    }

    pub fn points(&self) -> &[FixedPointContribution] {
        &self.points
    }

    pub fn asserts_psc_vanishing(&self) -> bool {
        self.assert_psc_vanishing
    }
}

/// Local contribution of the equivariant Dolbeault operator at an isolated
/// fixed point: `prod_j 1 / (1 - zeta_j^(-1))` with `zeta_j = exp(2 pi i a_j)`.
pub fn dolbeault_local_contribution(rot: &RotationData) -> Result<Cyclotomic> {
    dolbeault_local_contribution_with_bound(rot, DEFAULT_ANGLE_DENOMINATOR_BOUND)
}

/// Same as [`dolbeault_local_contribution`] with an explicit denominator bound.
pub fn dolbeault_local_contribution_with_bound(
    rot: &RotationData,
    bound: i64,
) -> Result<Cyclotomic> {
    let max_den = rot.max_denominator();
    if max_den > bound {
        return Err(Error::DenominatorBound {
            got: max_den,
            bound,
        });
    }
    let mut order: u64 = 1;
    for a in rot.angles() {
        order = order.lcm(&(*a.denom() as u64));
    }
    let order = u32::try_from(order)
        .map_err(|_| Error::InvalidParameter("angle denominators overflow".into()))?;
    let mut acc = Cyclotomic::one();
    for a in rot.angles() {
        // zeta_j^(-1) = zeta_order^(-p * order/q).
        let e = -(a.numer() * (order as i64 / a.denom()));
        let factor = Cyclotomic::one_minus_root_inverse(order, e)?;
        acc = acc.mul(&factor);
    }
    Ok(acc)
}

fn extract_rational(value: &Cyclotomic, context: &str) -> Result<EtaValue> {
    match value.to_rational() {
        Some(r) => Ok(EtaValue::new(r)),
        None => Err(Error::NotRational(format!(
            "{context}: the exact value has a nonzero non-constant part in the cyclotomic field"
        ))),
    }
}

/// Equivariant eta-invariant `eta_u = 2 * sum_N a_N` over the fixed points,
/// valid only in the vanishing regime where the index and kernel terms of
/// the boundary fixed point formula are zero.
pub fn equivariant_eta_from_fixed_points(fps: &FixedPointSet) -> Result<EtaValue> {
    if !fps.asserts_psc_vanishing() {
        return Err(Error::PscVanishingRequired);
    }
    let mut acc = Cyclotomic::zero(1);
    for p in fps.points() {
        acc = acc.add(&dolbeault_local_contribution(&p.rotation)?);
    }
    let doubled = acc.scale(&BigRational::from_integer(2.into()));
    extract_rational(&doubled, "equivariant eta")
}

/// Covering formula: the twisted eta-invariant downstairs is the
/// character-weighted average `(1/N) * sum_u eta_u * chi(u)` of the
/// equivariant eta-invariants upstairs.
pub fn covering_eta(etas: &[EtaValue], chi: &CharacterTable) -> Result<EtaValue> {
    if etas.len() != chi.order() {
        return Err(Error::SizeMismatch(format!(
            "{} eta values vs character table of order {}",
            etas.len(),
            chi.order()
        )));
    }
    let mut acc = Cyclotomic::zero(1);
    for (u, eta) in etas.iter().enumerate() {
        let term = chi.value(u).scale(eta.value());
        acc = acc.add(&term);
    }
    let n = BigRational::new(BigInt::one(), BigInt::from(etas.len()));
    extract_rational(&acc.scale(&n), "covering eta")
}

/// Relative eta-invariant of the `Z_2` quotient: `eta_alpha - eta_e = -eta_tau`.
pub fn relative_eta_z2(eta_tau: &EtaValue) -> EtaValue {
    eta_tau.neg()
}

/// Full derivation trace of a relative eta-invariant computation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EtaDerivation {
    /// `brieskorn` (link quotient) or `plumbing` (disk-bundle plumbing).
    pub pipeline: String,
    pub d: u32,
    /// Complex dimension of the bounding manifold (`n`, resp. `2k+1`).
    pub complex_dim: u32,
    pub fixed_points: u32,
    /// Local contribution `2^(-complex_dim)` at each fixed point.
    pub local_contribution: EtaValue,
    /// `eta_tau = 2 * fixed_points * local_contribution`.
    pub equivariant_eta_tau: EtaValue,
    /// `-eta_tau`, the relative eta-invariant of the quotient.
    pub relative_eta: EtaValue,
    pub steps: Vec<String>,
}

/// Relative eta-invariant `-d * 2^(-(n-1))` of the Brieskorn quotient,
/// assembled end to end from the fixed-point data.
pub fn brieskorn_relative_eta(n: u32, d: u32) -> Result<EtaValue> {
    Ok(brieskorn_eta_derivation(n, d)?.relative_eta)
}

/// [`brieskorn_relative_eta`] with the full derivation trace.
pub fn brieskorn_eta_derivation(n: u32, d: u32) -> Result<EtaDerivation> {
    // A canonical smoothing parameter; the invariant does not depend on it.
    let data = crate::brieskorn::BrieskornData::new(n, d, BigRational::new(1.into(), 2.into()))?;
    let fixed = data.tau_fixed_points()?;
    let points = fixed
        .iter()
        .map(|fp| FixedPointContribution {
            id: format!("p{}", fp.index),
            rotation: RotationData::involution(n),
        })
        .collect();
    derive_from_involution_data("brieskorn", d, n, points)
}

/// Relative eta-invariant `-d * 2^(-2k)` of the quotient of the boundary of
/// the `A_(d-1)` plumbing of disk tangent bundles, via its fixed-point count.
pub fn plumbing_relative_eta(k: u32, d: u32) -> Result<EtaValue> {
    Ok(plumbing_eta_derivation(k, d)?.relative_eta)
}

/// [`plumbing_relative_eta`] with the full derivation trace.
pub fn plumbing_eta_derivation(k: u32, d: u32) -> Result<EtaDerivation> {
    if k < 1 {
        return Err(Error::InvalidParameter("k must be at least 1".into()));
    }
    let count = classify::plumbing_fixed_points(d as u64)?;
    let complex_dim = 2 * k + 1;
    let points = (0..count)
        .map(|i| FixedPointContribution {
            id: format!("p{i}"),
            rotation: RotationData::involution(complex_dim),
        })
        .collect();
    derive_from_involution_data("plumbing", d, complex_dim, points)
}

fn derive_from_involution_data(
    pipeline: &str,
    d: u32,
    complex_dim: u32,
    points: Vec<FixedPointContribution>,
) -> Result<EtaDerivation> {
    let count = points.len() as u32;
    let local = extract_rational(
        &dolbeault_local_contribution(&RotationData::involution(complex_dim))?,
        "local contribution",
    )?;
    let fps = FixedPointSet::new(points, true)?;
    let eta_tau = equivariant_eta_from_fixed_points(&fps)?;
    let relative = relative_eta_z2(&eta_tau);
    debug_assert!(relative.is_dyadic());
    debug_assert_eq!(local.value(), &inverse_power_of_two(complex_dim));
    let steps = vec![
        format!("enumerated {count} isolated involution fixed points"),
        format!(
            "local Dolbeault contribution at each fixed point: \
             prod of {complex_dim} factors 1/(1 - exp(-pi i)) = {local}"
        ),
        format!("equivariant eta at the involution: 2 * {count} * {local} = {eta_tau}"),
        format!(
            "covering identities on the quotient: eta_alpha = (eta - eta_tau)/2, \
             eta_e = (eta + eta_tau)/2"
        ),
        format!("relative eta-invariant: eta_alpha - eta_e = -eta_tau = {relative}"),
    ];
    Ok(EtaDerivation {
        pipeline: pipeline.into(),
        d,
        complex_dim,
        fixed_points: count,
        local_contribution: local,
        equivariant_eta_tau: eta_tau,
        relative_eta: relative,
        steps,
    })
}
