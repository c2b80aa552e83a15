//! Maps between finite spaces: class checks, rough inverses, and the transfer of
//! cotype inequalities along bi-Lipschitz, snowflaking and rough-isometric maps.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cotype::{evaluate_cotype, CotypeError, CotypeParams, TorusFunction};
use crate::metric::FiniteMetricSpace;
use crate::torus::Torus;

/// Relative slack allowed when comparing a fitted constant with a declared one.
pub const CHECK_TOLERANCE: f64 = 1e-12;

/// Relative violation tolerated by [`empirical_transfer_verify`].
pub const TRANSFER_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TransferError {
    #[error("map has an empty source")]
    EmptySource,
    #[error("assignment has {got} entries for a {expected}-point source")]
    AssignmentLength { expected: usize, got: usize },
    #[error("assignment sends point {point} to {value}, outside a {len}-point target")]
    AssignmentOutOfRange {
        point: usize,
        value: usize,
        len: usize,
    },
    #[error("image is not {c}-dense: target point {point} is at distance {distance}")]
    NotDense { point: usize, distance: f64, c: f64 },
    #[error("parameter out of range: {0}")]
    OutOfRange(String),
    #[error("map fails its declared {0:?} check")]
    MapCheckFailed(Box<MapReport>),
    #[error("cotype transfer is not available for {0:?} maps")]
    Unsupported(MapKind),
    #[error(transparent)]
    Cotype(#[from] CotypeError),
}

/// `phi: source -> target`, given by the image index of every source point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointMap {
    pub source: FiniteMetricSpace,
    pub target: FiniteMetricSpace,
    pub assignment: Vec<usize>,
}

impl PointMap {
    pub fn new(
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
        assignment: Vec<usize>,
    ) -> Result<Self, TransferError> {
        if assignment.len() != source.len() {
            return Err(TransferError::AssignmentLength {
                expected: source.len(),
                got: assignment.len(),
            });
        }
        if let Some((point, &value)) = assignment
            .iter()
            .enumerate()
            .find(|(_, &v)| v >= target.len())
        {
            return Err(TransferError::AssignmentOutOfRange {
                point,
                value,
                len: target.len(),
            });
        }
        Ok(PointMap {
            source,
            target,
            assignment,
        })
    }

    /// Index-preserving map between two spaces of the same size.
    pub fn by_index(
        source: FiniteMetricSpace,
        target: FiniteMetricSpace,
    ) -> Result<Self, TransferError> {
        let assignment = (0..source.len()).collect();
        Self::new(source, target, assignment)
    }

    pub fn identity(space: FiniteMetricSpace) -> Self {
        let assignment = (0..space.len()).collect();
        PointMap {
            source: space.clone(),
            target: space,
            assignment,
        }
    }

    /// `then ∘ self`.
    pub fn compose(&self, then: &PointMap) -> Result<Self, TransferError> {
        let assignment = self
            .assignment
            .iter()
            .map(|&v| then.assignment[v])
            .collect();
        Self::new(self.source.clone(), then.target.clone(), assignment)
    }

    fn image_distance(&self, x: usize, y: usize) -> f64 {
        self.target.d(self.assignment[x], self.assignment[y])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MapKind {
    Bilip,
    Snowflake,
    LinearQs,
    RoughIsometry,
}

/// Constants a map is claimed to satisfy. Unset fields are fitted.
///
/// `scale` is the factor `c` of the scaled classes, `distortion` their `L`, `alpha` the
/// snowflake exponent, `k` the slope of `eta(t) = K t`, and `additive` the rough-isometry `c`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct MapParams {
    pub scale: Option<f64>,
    pub distortion: Option<f64>,
    pub alpha: Option<f64>,
    pub k: Option<f64>,
    pub additive: Option<f64>,
}

/// Outcome of [`check_map`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MapReport {
    pub kind: MapKind,
    /// Exponent used for snowflake checks (1 for the other multiplicative kinds).
    pub alpha: f64,
    /// Best scale `c` (bilip and snowflake only).
    pub fitted_scale: Option<f64>,
    /// Infimal `L`, `K` or additive `c`; infinite when some pair collapses.
    pub fitted: f64,
    pub declared: Option<f64>,
    pub pass: bool,
    /// Extremal pairs (ratio maximiser, then minimiser) or the worst triple.
    pub witness: Vec<Vec<usize>>,
}

fn exceeds(value: f64, bound: f64) -> bool {
    value > bound * (1.0 + CHECK_TOLERANCE)
}

/// Verifies the defining inequalities of `kind` over all pairs (triples for `LinearQs`)
/// and fits the smallest constants that make them hold.
pub fn check_map(
    map: &PointMap,
    kind: MapKind,
    declared: &MapParams,
) -> Result<MapReport, TransferError> {
    let k = map.source.len();
    if k == 0 {
        return Err(TransferError::EmptySource);
    }
    let alpha = match kind {
        MapKind::Snowflake => {
            let a = declared
                .alpha
                .ok_or_else(|| TransferError::OutOfRange("snowflake check needs alpha".into()))?;
            if !(a > 0.0) || !a.is_finite() {
                return Err(TransferError::OutOfRange(format!(
                    "alpha must be positive, got {a}"
                )));
            }
            a
        }
        _ => 1.0,
    };
    let pairs = || (0..k).flat_map(move |x| (x + 1..k).map(move |y| (x, y)));

    match kind {
        MapKind::Bilip | MapKind::Snowflake => {
            // r = d_X(phi x, phi y) / d_Y(x, y)^alpha over distinct pairs.
            let mut hi = (f64::NEG_INFINITY, vec![]);
            let mut lo = (f64::INFINITY, vec![]);
            for (x, y) in pairs() {
                let r = map.image_distance(x, y) / map.source.d(x, y).powf(alpha);
                if r > hi.0 {
                    hi = (r, vec![x, y]);
                }
                if r < lo.0 {
                    lo = (r, vec![x, y]);
                }
            }
            let (fitted, fitted_scale) = if hi.1.is_empty() {
                (1.0, Some(1.0))
            } else if lo.0 > 0.0 {
                ((hi.0 / lo.0).sqrt(), Some(1.0 / (hi.0 * lo.0).sqrt()))
            } else {
                (f64::INFINITY, None)
            };
            let l = declared.distortion;
            let pass = match (l, declared.scale) {
                (None, _) => fitted.is_finite(),
                (Some(l), None) => fitted.is_finite() && !exceeds(fitted, l),
                (Some(l), Some(c)) => {
                    hi.1.is_empty() || (!exceeds(c * hi.0, l) && !exceeds(1.0, l * c * lo.0))
                }
            };
            let witness = if hi.1.is_empty() {
                vec![]
            } else {
                vec![hi.1, lo.1]
            };
            Ok(MapReport {
                kind,
                alpha,
                fitted_scale,
                fitted,
                declared: l,
                pass,
                witness,
            })
        }
        MapKind::LinearQs => {
            let mut worst = (0.0f64, vec![]);
            for x in 0..k {
                for y in 0..k {
                    for z in 0..k {
                        if x == y || y == z || x == z {
                            continue;
                        }
                        let target = map.image_distance(x, y) / map.image_distance(x, z);
                        let source = map.source.d(x, y) / map.source.d(x, z);
                        let need = if target.is_nan() {
                            f64::INFINITY
                        } else {
                            target / source
                        };
                        if need > worst.0 {
                            worst = (need, vec![x, y, z]);
                        }
                    }
                }
            }
            let fitted = if worst.1.is_empty() {
                1.0
            } else {
                worst.0.max(1.0)
            };
            let pass = fitted.is_finite() && declared.k.is_none_or(|kk| !exceeds(fitted, kk));
            let witness = if worst.1.is_empty() {
                vec![]
            } else {
                vec![worst.1]
            };
            Ok(MapReport {
                kind,
                alpha,
                fitted_scale: None,
                fitted,
                declared: declared.k,
                pass,
                witness,
            })
        }
        MapKind::RoughIsometry => {
            let mut worst = (0.0f64, vec![]);
            for (x, y) in pairs() {
                let gap = (map.source.d(x, y) - map.image_distance(x, y)).abs();
                if gap > worst.0 {
                    worst = (gap, vec![x, y]);
                }
            }
            let fitted = worst.0;
            let pass = declared
                .additive
                .is_none_or(|c| fitted <= c + CHECK_TOLERANCE * c.max(fitted));
            let witness = if worst.1.is_empty() {
                vec![]
            } else {
                vec![worst.1]
            };
            Ok(MapReport {
                kind,
                alpha,
                fitted_scale: None,
                fitted,
                declared: declared.additive,
                pass,
                witness,
            })
        }
    }
}

/// A rough inverse together with the displacement `d(phi(psi(x)), x)` of every target point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RoughInverse {
    pub map: PointMap,
    pub displacements: Vec<f64>,
    pub max_displacement: f64,
}

/// Sends each target point to the source point with the nearest image (lowest index on ties).
///
/// Fails with `NotDense` when some target point is farther than `c` from the image.
pub fn rough_inverse(map: &PointMap, c: f64) -> Result<RoughInverse, TransferError> {
    if map.source.is_empty() {
        return Err(TransferError::EmptySource);
    }
    if !(c >= 0.0) {
        return Err(TransferError::OutOfRange(format!(
            "density radius must be nonnegative, got {c}"
        )));
    }
    let mut assignment = Vec::with_capacity(map.target.len());
    let mut displacements = Vec::with_capacity(map.target.len());
    for x in 0..map.target.len() {
        let (best, dist) = (0..map.source.len())
            .map(|y| (y, map.target.d(map.assignment[y], x)))
            .fold(
                (usize::MAX, f64::INFINITY),
                |a, b| if b.1 < a.1 { b } else { a },
            );
        if dist > c + CHECK_TOLERANCE * c {
            return Err(TransferError::NotDense {
                point: x,
                distance: dist,
                c,
            });
        }
        assignment.push(best);
        displacements.push(dist);
    }
    let max_displacement = displacements.iter().copied().fold(0.0, f64::max);
    let inverse = PointMap::new(map.target.clone(), map.source.clone(), assignment)?;
    Ok(RoughInverse {
        map: inverse,
        displacements,
        max_displacement,
    })
}

/// Inputs of the individual transfer statements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum TransferSpec {
    /// Scaled `L`-bi-Lipschitz embedding into a space with constant `gamma`.
    Bilip { l: f64, gamma: f64 },
    /// Scaled `(alpha, L)`-snowflaking embedding; the scaling function obeys `m <= K n^{1/q}`.
    Snowflake {
        alpha: f64,
        l: f64,
        gamma: f64,
        k: f64,
        p: f64,
    },
    /// Bi-Lipschitz equivalence to an ultrametric, read as a quasisymmetry.
    QsChain { l: f64 },
    /// `eta(t) = K t` quasisymmetry of a space with the `C`-finite separation property.
    FspQs { k: f64, c: f64 },
    /// Approximation by `c`-rough isometries of spaces with constant `gamma`.
    Gh {
        gamma: f64,
        p: f64,
        q: f64,
        n: usize,
        m: usize,
        c: f64,
    },
}

/// Transferred inequality: `lhs <= constant^p' m^p' n^{1-p'/q} rhs + slack`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransferConstants {
    /// First exponent after transfer, when it changes or is fixed by the statement.
    pub exponent: Option<f64>,
    /// Cotype constant, or for the quasisymmetry statements the separation constant.
    pub constant: f64,
    pub slack: f64,
    /// `eta(1)` for the quasisymmetry chain.
    pub eta_at_one: Option<f64>,
}

fn at_least_one(name: &str, v: f64) -> Result<(), TransferError> {
    if v >= 1.0 && v.is_finite() {
        Ok(())
    } else {
        Err(TransferError::OutOfRange(format!(
            "{name} must be a finite value >= 1, got {v}"
        )))
    }
}

pub fn transfer_constants(spec: &TransferSpec) -> Result<TransferConstants, TransferError> {
    let plain = |constant: f64| TransferConstants {
        exponent: None,
        constant,
        slack: 0.0,
        eta_at_one: None,
    };
    match *spec {
        TransferSpec::Bilip { l, gamma } => {
            at_least_one("L", l)?;
            at_least_one("gamma", gamma)?;
            Ok(plain(l * l * gamma))
        }
        TransferSpec::Snowflake {
            alpha,
            l,
            gamma,
            k,
            p,
        } => {
            at_least_one("L", l)?;
            at_least_one("gamma", gamma)?;
            at_least_one("K", k)?;
            at_least_one("p", p)?;
            let p2 = alpha * p;
            if !(alpha > 0.0) || !(p2 >= 1.0) {
                return Err(TransferError::OutOfRange(format!(
                    "alpha * p must be >= 1, got {p2}"
                )));
            }
            let constant = l.powf(2.0 * p / p2) * gamma.powf((p + p2) / p2) * k.powf(p / p2);
            Ok(TransferConstants {
                exponent: Some(p2),
                ..plain(constant)
            })
        }
        TransferSpec::QsChain { l } => {
            at_least_one("L", l)?;
            Ok(TransferConstants {
                eta_at_one: Some(l * l),
                ..plain(2.0 * l * l)
            })
        }
        TransferSpec::FspQs { k, c } => {
            at_least_one("K", k)?;
            at_least_one("C", c)?;
            Ok(plain(2.0 * k * c))
        }
        TransferSpec::Gh {
            gamma,
            p,
            q,
            n,
            m,
            c,
        } => {
            at_least_one("gamma", gamma)?;
            CotypeParams::new(p, q, n, m).map_err(|e| TransferError::OutOfRange(e.to_string()))?;
            if !(c >= 0.0) || !c.is_finite() {
                return Err(TransferError::OutOfRange(format!(
                    "c must be >= 0, got {c}"
                )));
            }
            let scale = (m as f64).powf(p) * (n as f64).powf(1.0 - p / q);
            let slack = (6.0 * c).powf(p) * (n as f64 + 2f64.powf(p) * gamma.powf(p) * scale);
            Ok(TransferConstants {
                exponent: Some(p),
                slack,
                ..plain(4.0 * gamma)
            })
        }
    }
}

/// Result of [`empirical_transfer_verify`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub kind: MapKind,
    pub samples: u64,
    pub seed: u64,
    /// Constant assumed on the known side.
    pub gamma: f64,
    /// Whether `gamma` was supplied or taken as the largest constant observed.
    pub gamma_declared: bool,
    pub p: f64,
    pub transferred_p: f64,
    pub q: f64,
    pub n: usize,
    pub m: usize,
    pub constant: f64,
    pub slack: f64,
    /// Samples where the known side itself exceeded `gamma` or the scaling gate failed.
    pub precondition_failures: u64,
    pub violations: u64,
    /// Largest `(lhs - bound) / max(lhs, bound)` over the samples.
    pub max_relative_violation: f64,
    pub worst_sample: Option<u64>,
    pub pass: bool,
}

/// Samples functions into the space the inequality is transferred to and checks it with
/// the constants of [`transfer_constants`].
///
/// * `Bilip`, `Snowflake`: `f` maps into `map.source`; the known space is `map.target`,
///   reached through `phi`.
/// * `RoughIsometry`: `f` maps into `map.target`; the known space is `map.source`,
///   reached through a rough inverse of `phi`.
///
/// `params.gamma`, when set, is checked on the known side for every sample; otherwise the
/// largest constant observed there (at least 1) is used.
pub fn empirical_transfer_verify(
    map: &PointMap,
    kind: MapKind,
    declared: &MapParams,
    params: &CotypeParams,
    samples: u64,
    seed: u64,
) -> Result<TransferReport, TransferError> {
    params.validate()?;
    let report = check_map(map, kind, declared)?;
    if !report.pass {
        return Err(TransferError::MapCheckFailed(Box::new(report)));
    }
    let (p, q, n, m) = (params.p, params.q, params.n, params.m);
    let torus = Torus::new(n, m).map_err(CotypeError::from)?;

    let inverse;
    let (domain, known, through, transferred_p) = match kind {
        MapKind::Bilip => (&map.source, &map.target, &map.assignment, p),
        MapKind::Snowflake => {
            let p2 = report.alpha * p;
            if !(p2 >= 1.0 && p2 <= q) {
                return Err(TransferError::OutOfRange(format!(
                    "transferred exponent {p2} not in [1, q]"
                )));
            }
            (&map.source, &map.target, &map.assignment, p2)
        }
        MapKind::RoughIsometry => {
            let c = declared.additive.unwrap_or(report.fitted);
            inverse = rough_inverse(map, c)?;
            (&map.target, &map.source, &inverse.map.assignment, p)
        }
        MapKind::LinearQs => return Err(TransferError::Unsupported(kind)),
    };

    let evaluations = (0..samples)
        .into_par_iter()
        .map(|s| {
            let f = TorusFunction::sample(torus, domain.len(), seed, s);
            let known_eval = evaluate_cotype(known, &f.compose(through), p, q)?;
            let target_eval = evaluate_cotype(domain, &f, transferred_p, q)?;
            Ok((known_eval.implied_gamma, target_eval.lhs, target_eval.rhs))
        })
        .collect::<Result<Vec<_>, CotypeError>>()?;

    let observed = evaluations.iter().map(|e| e.0).fold(1.0, f64::max);
    let gamma = params.gamma.unwrap_or(observed);
    let l = declared.distortion.unwrap_or(report.fitted);
    let spec = match kind {
        MapKind::Bilip => TransferSpec::Bilip { l, gamma },
        MapKind::Snowflake => {
            let k = ((m as f64) / (n as f64).powf(1.0 / q)).max(1.0);
            TransferSpec::Snowflake {
                alpha: report.alpha,
                l,
                gamma,
                k,
                p,
            }
        }
        _ => {
            let c = declared.additive.unwrap_or(report.fitted);
            TransferSpec::Gh {
                gamma,
                p,
                q,
                n,
                m,
                c,
            }
        }
    };
    let constants = transfer_constants(&spec)?;
    let scaling_gate = kind != MapKind::Snowflake
        || (m as f64) >= crate::cotype::scaling_lower_bound(gamma, q, n) * (1.0 - CHECK_TOLERANCE);

    let scale = (m as f64).powf(transferred_p) * (n as f64).powf(1.0 - transferred_p / q);
    let factor = constants.constant.powf(transferred_p) * scale;
    let mut precondition_failures = 0;
    let mut violations = 0;
    let mut max_relative_violation = f64::NEG_INFINITY;
    let mut worst_sample = None;
    for (s, &(known_gamma, lhs, rhs)) in evaluations.iter().enumerate() {
        if !scaling_gate || known_gamma > gamma * (1.0 + TRANSFER_TOLERANCE) {
            precondition_failures += 1;
            continue;
        }
        let bound = factor * rhs + constants.slack;
        let denom = lhs.max(bound);
        let rel = if denom > 0.0 {
            (lhs - bound) / denom
        } else {
            0.0
        };
        if rel > TRANSFER_TOLERANCE {
            violations += 1;
        }
        if rel > max_relative_violation {
            max_relative_violation = rel;
            worst_sample = Some(s as u64);
        }
    }
    if worst_sample.is_none() {
        max_relative_violation = 0.0;
    }
    Ok(TransferReport {
        kind,
        samples,
        seed,
        gamma,
        gamma_declared: params.gamma.is_some(),
        p,
        transferred_p,
        q,
        n,
        m,
        constant: constants.constant,
        slack: constants.slack,
        precondition_failures,
        violations,
        max_relative_violation,
        worst_sample,
        pass: precondition_failures == 0 && violations == 0,
    })
}

/// `space -> (space, d^alpha)` by index.
pub fn snowflake_map(space: &FiniteMetricSpace, alpha: f64) -> Result<PointMap, TransferError> {
    let target = space
        .snowflake(alpha)
        .map_err(|e| TransferError::OutOfRange(e.to_string()))?;
    PointMap::by_index(space.clone(), target)
}

/// `space -> (space, rho)` by index, `rho` the subdominant ultrametric.
pub fn subdominant_map(space: &FiniteMetricSpace) -> PointMap {
    let (rho, _) = space.subdominant_ultrametric();
    PointMap::by_index(space.clone(), rho).expect("same size")
}

/// Identity onto a copy of `space` whose off-diagonal distances are raised by seeded
/// amounts in `[c/2, c]`. The copy is again a metric and the identity is a `c`-rough
/// isometry onto it.
pub fn perturbed_map(
    space: &FiniteMetricSpace,
    c: f64,
    seed: u64,
) -> Result<PointMap, TransferError> {
    if !(c >= 0.0) || !c.is_finite() {
        return Err(TransferError::OutOfRange(format!(
            "perturbation must be >= 0, got {c}"
        )));
    }
    let mut rng = crate::cotype::stream_rng(seed, 0);
    let mut matrix = space.matrix();
    let k = space.len();
    for i in 0..k {
        for j in i + 1..k {
            let bump = if c > 0.0 {
                rand::Rng::gen_range(&mut rng, c / 2.0..=c)
            } else {
                0.0
            };
            matrix[i][j] += bump;
            matrix[j][i] = matrix[i][j];
        }
    }
    let target = FiniteMetricSpace::new(matrix, space.labels().to_vec(), space.tolerance())
        .map_err(|e| TransferError::OutOfRange(e.to_string()))?;
    PointMap::by_index(space.clone(), target)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(points: &[f64]) -> FiniteMetricSpace {
        FiniteMetricSpace::from_line(points).unwrap()
    }

    #[test]
    fn identity_is_isometric() {
        let map = PointMap::identity(line(&[0.0, 1.0, 3.0]));
        let r = check_map(&map, MapKind::Bilip, &MapParams::default()).unwrap();
        assert_eq!((r.fitted, r.fitted_scale), (1.0, Some(1.0)));
        assert!(r.pass);
    }

    #[test]
    fn square_root_snowflake() {
        let x = line(&[0.0, 1.0, 3.0, 7.5]);
        let map = PointMap::by_index(x.clone(), x.snowflake(0.5).unwrap()).unwrap();
        let declared = MapParams {
            alpha: Some(0.5),
            distortion: Some(1.0),
            ..Default::default()
        };
        let r = check_map(&map, MapKind::Snowflake, &declared).unwrap();
        assert!(r.pass);
        assert!((r.fitted - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rough_isometry_fit() {
        let map = PointMap::by_index(line(&[0.0, 1.0, 2.0]), line(&[0.0, 1.0, 3.0])).unwrap();
        let r = check_map(&map, MapKind::RoughIsometry, &MapParams::default()).unwrap();
        assert_eq!(r.fitted, 1.0);
        assert_eq!(r.witness, vec![vec![0, 2]]);
    }

    #[test]
    fn collapsed_pair_fails_bilip() {
        let src = line(&[0.0, 1.0, 2.0]);
        let tgt = line(&[0.0, 5.0]);
        let map = PointMap::new(src, tgt, vec![0, 1, 1]).unwrap();
        let r = check_map(&map, MapKind::Bilip, &MapParams::default()).unwrap();
        assert!(!r.pass && r.fitted.is_infinite());
        assert_eq!(r.witness[1], vec![1, 2]);
        let qs = check_map(&map, MapKind::LinearQs, &MapParams::default()).unwrap();
        assert!(!qs.pass);
    }

    #[test]
    fn empty_source() {
        let empty = FiniteMetricSpace::from_matrix(vec![]).unwrap();
        let map = PointMap::new(empty, line(&[0.0]), vec![]).unwrap();
        assert_eq!(
            check_map(&map, MapKind::Bilip, &MapParams::default()),
            Err(TransferError::EmptySource)
        );
    }

    #[test]
    fn rough_inverse_examples() {
        let x = line(&[0.0, 1.0, 3.0]);
        let inv = rough_inverse(&PointMap::identity(x.clone()), 0.0).unwrap();
        assert_eq!(inv.map.assignment, vec![0, 1, 2]);
        assert_eq!(inv.max_displacement, 0.0);

        let src = line(&[0.0, 2.0]);
        let tgt = line(&[0.0, 0.5, 2.0]);
        let map = PointMap::new(src.clone(), tgt.clone(), vec![0, 2]).unwrap();
        let inv = rough_inverse(&map, 0.5).unwrap();
        assert_eq!(inv.map.assignment, vec![0, 0, 1]);
        assert!(inv.displacements.iter().all(|&d| d <= 0.5));

        let map = PointMap::new(src, line(&[0.0, 1.0, 2.0]), vec![0, 2]).unwrap();
        assert!(matches!(
            rough_inverse(&map, 0.5),
            Err(TransferError::NotDense { point: 1, .. })
        ));
    }

    #[test]
    fn constant_examples() {
        let sf = transfer_constants(&TransferSpec::Snowflake {
            alpha: 1.0,
            l: 2.0,
            gamma: 3.0,
            k: 5.0,
            p: 2.0,
        })
        .unwrap();
        assert!((sf.constant - 4.0 * 9.0 * 5.0).abs() < 1e-12);
        let gh = transfer_constants(&TransferSpec::Gh {
            gamma: 2.0,
            p: 2.0,
            q: 2.0,
            n: 2,
            m: 4,
            c: 0.0,
        })
        .unwrap();
        assert_eq!((gh.constant, gh.slack), (8.0, 0.0));
        let qs = transfer_constants(&TransferSpec::QsChain { l: 2.0 }).unwrap();
        assert_eq!((qs.eta_at_one, qs.constant), (Some(4.0), 8.0));
        assert!(transfer_constants(&TransferSpec::Snowflake {
            alpha: 0.25,
            l: 1.0,
            gamma: 1.0,
            k: 1.0,
            p: 2.0
        })
        .is_err());
        assert_eq!(
            transfer_constants(&TransferSpec::FspQs { k: 2.0, c: 3.0 })
                .unwrap()
                .constant,
            12.0
        );
    }
}
