//! Orbits of `g_d`, samples of the bounded sets on the catalogued varieties,
//! figure data, and numeric preimage counts.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_complex::Complex;
use num_integer::Integer;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::numeric::{aberth_roots, distinct_points, min_gap, relative_distance, scaled_residual};
use crate::algebra::{resultant, squarefree_part, to_text, CompiledMap, Scalar};
use crate::catalog::{entry, h_pm, AngleRule, VarietyEntry, A_H};
use crate::error::{AlgebraError, LabError, NumericError};
use crate::invariants::induced_morphism;
use crate::report::Report;
use crate::{qpoly_in, QMap, QPoly, Rational, C64};

pub const DEFAULT_ESCAPE_RADIUS: f64 = 1e6;
pub const DEFAULT_MAX_ITER: usize = 64;
/// Roots closer than this relative distance are the same point.
pub const CLUSTER_TOL: f64 = 1e-6;
/// Trials whose closest pair of preimages is nearer than this are discarded.
pub const MIN_GAP: f64 = 1e-4;
/// Half-width of the complex box for random targets.
pub const TARGET_BOX: f64 = 3.0;

/// Angles in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AngleSample {
    pub angles: Vec<f64>,
}

impl AngleSample {
    pub fn new(angles: &[f64]) -> Self {
        AngleSample { angles: angles.iter().map(|a| a.rem_euclid(TAU)).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum OrbitStatus {
    BoundedHorizon,
    Escaped,
}

#[derive(Debug, Clone, PartialEq)]
pub struct OrbitRecord<F> {
    pub start: Vec<Complex<F>>,
    /// `iterates[k]` is the `(k+1)`-th image of `start`.
    pub iterates: Vec<Vec<Complex<F>>>,
    pub status: OrbitStatus,
    pub escape_index: Option<usize>,
    /// An iterate overflowed; the orbit is reported as escaped.
    pub non_finite: bool,
}

fn max_norm<F: Float>(z: &[Complex<F>]) -> F {
    z.iter().map(|c| c.norm()).fold(F::zero(), F::max)
}

fn check_orbit_params<F: Float>(max_iter: usize, escape_radius: F) -> Result<(), NumericError> {
    if max_iter == 0 {
        return Err(NumericError::InvalidParameter("max_iter must be at least 1".into()));
    }
    if !(escape_radius > F::zero()) {
        return Err(NumericError::InvalidParameter("escape radius must be positive".into()));
    }
    Ok(())
}

/// Iterate until the max-norm exceeds `escape_radius` or `max_iter` steps pass.
pub fn iterate_orbit<F: Float>(
    map: &CompiledMap<F>,
    start: &[Complex<F>],
    max_iter: usize,
    escape_radius: F,
) -> Result<OrbitRecord<F>, NumericError> {
    check_orbit_params(max_iter, escape_radius)?;
    let mut iterates = Vec::with_capacity(max_iter);
    let mut cur = start.to_vec();
    for k in 0..max_iter {
        cur = map.eval(&cur);
        let finite = cur.iter().all(|c| c.re.is_finite() && c.im.is_finite());
        let escaped = !finite || max_norm(&cur) > escape_radius;
        iterates.push(cur.clone());
        if escaped {
            return Ok(OrbitRecord {
                start: start.to_vec(),
                iterates,
                status: OrbitStatus::Escaped,
                escape_index: Some(k),
                non_finite: !finite,
            });
        }
    }
    Ok(OrbitRecord {
        start: start.to_vec(),
        iterates,
        status: OrbitStatus::BoundedHorizon,
        escape_index: None,
        non_finite: false,
    })
}

/// Number of steps before escape, without recording the orbit.
pub fn escape_time<F: Float>(map: &CompiledMap<F>, start: &[Complex<F>], max_iter: usize, escape_radius: F) -> Option<usize> {
    let mut cur = start.to_vec();
    for k in 0..max_iter {
        cur = map.eval(&cur);
        let m = max_norm(&cur);
        if !(m <= escape_radius) {
            return Some(k);
        }
    }
    None
}

/// Point of a bounded set with the values of its sign conditions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KSample {
    pub angles: AngleSample,
    pub point: Vec<f64>,
    pub imag_residue: f64,
    /// Scaled values of the inequalities, nonnegative on the bounded set.
    pub residuals: Vec<f64>,
}

/// Polynomials that are nonnegative on the real bounded set of `g_d` on C^n/D.
pub fn k_set_inequalities(n: usize) -> Result<Vec<QPoly>, AlgebraError> {
    match n {
        2 => Ok(vec![qpoly_in("p^3 - q^2", &["p", "q"]), qpoly_in("27 + 8q - 18p - p^2", &["p", "q"])]),
        3 => Ok(vec![qpoly_in("p^2 - s", &["p", "s"]), qpoly_in(A_H, &["p", "q", "r", "s"])]),
        _ => Err(AlgebraError::UnsupportedDimension(n)),
    }
}

/// `k` irrational steps for an additive low-discrepancy sequence.
fn kronecker_steps(k: usize) -> Vec<f64> {
    let mut phi: f64 = 2.0;
    for _ in 0..64 {
        phi = (1.0 + phi).powf(1.0 / (k as f64 + 1.0));
    }
    (1..=k).map(|j| phi.powi(-(j as i32))).collect()
}

/// `samples` angle tuples, deterministic and equidistributed in the torus.
pub fn angle_grid(k: usize, samples: usize) -> Vec<AngleSample> {
    let steps = kronecker_steps(k);
    (0..samples)
        .map(|i| {
            let a: Vec<f64> = steps.iter().map(|s| TAU * (0.5 + s * (i as f64 + 1.0)).fract()).collect();
            AngleSample::new(&a)
        })
        .collect()
}

/// Evaluate the parametrization of `entry` at angle-grid parameters.
pub fn sample_k_set(entry: &VarietyEntry, samples: usize) -> Result<Vec<KSample>, LabError> {
    let rule = entry.angles.ok_or_else(|| NumericError::NoSamples(format!("{} has no angle rule", entry.name)))?;
    let n = entry.orbit_n.ok_or_else(|| NumericError::NoSamples(entry.name.clone()))?;
    let ineq = k_set_inequalities(n)?;
    let names: Vec<&str> = entry.ambient_vars.iter().map(|s| s.as_str()).collect();
    let param = entry.param.compile::<f64>();
    let mut out = Vec::with_capacity(samples);
    for ang in angle_grid(rule.angle_count(), samples) {
        let t: Vec<C64> = rule.params(&ang.angles).into_iter().map(|x| C64::new(x, 0.0)).collect();
        let x = param.eval(&t);
        let imag_residue = x.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
        let residuals = ineq.iter().map(|f| signed_scaled(f, &names, &x)).collect();
        out.push(KSample { angles: ang, point: x.iter().map(|z| z.re).collect(), imag_residue, residuals });
    }
    Ok(out)
}

/// Real value of `f` divided by the sum of its absolute terms.
fn signed_scaled(f: &QPoly, names: &[&str], x: &[C64]) -> f64 {
    let pt: Vec<C64> =
        f.vars().iter().map(|v| names.iter().position(|n| n == v).map(|i| x[i]).unwrap_or_default()).collect();
    let value = f.evaluate_complex(&pt).re;
    let magnitude = scaled_residual(f, &pt);
    let abs = f.evaluate_complex(&pt).norm();
    if abs == 0.0 {
        0.0
    } else {
        value * magnitude / abs
    }
}

/// Fractional bits for orbit checks on sampled points.
pub const SURVIVAL_BITS: u32 = 640;

/// Real fixed-point evaluation of a rational map with `bits` fractional bits.
pub struct FixedPointMap {
    bits: u32,
    comps: Vec<Vec<(BigInt, Vec<u32>)>>,
    max_exp: Vec<u32>,
}

impl FixedPointMap {
    pub fn new(map: &QMap, bits: u32) -> Self {
        let k = map.source_vars().len();
        let mut max_exp = vec![0; k];
        let comps = map
            .components()
            .iter()
            .map(|c| {
                let c = c.with_var_names(map.source_vars());
                c.terms()
                    .map(|(m, q)| {
                        for (mx, &e) in max_exp.iter_mut().zip(m.exps()) {
                            *mx = (*mx).max(e);
                        }
                        (fixed_from_rational(q, bits), m.exps().to_vec())
                    })
                    .collect()
            })
            .collect();
        FixedPointMap { bits, comps, max_exp }
    }

    pub fn from_f64(&self, x: f64) -> BigInt {
        fixed_from_rational(&Rational::from_float(x).unwrap_or_default(), self.bits)
    }

    pub fn to_f64(&self, x: &BigInt) -> f64 {
        Rational::new(x.clone(), BigInt::one() << self.bits).to_f64().unwrap_or(f64::NAN)
    }

    pub fn eval(&self, x: &[BigInt]) -> Vec<BigInt> {
        let one = BigInt::one() << self.bits;
        let powers: Vec<Vec<BigInt>> = x
            .iter()
            .zip(&self.max_exp)
            .map(|(xi, &m)| {
                let mut pw = vec![one.clone()];
                for e in 0..m as usize {
                    let next = (&pw[e] * xi) >> self.bits;
                    pw.push(next);
                }
                pw
            })
            .collect();
        self.comps
            .iter()
            .map(|terms| {
                let mut sum = BigInt::zero();
                for (c, exps) in terms {
                    let mut acc = c.clone();
                    for (pw, &e) in powers.iter().zip(exps) {
                        if e > 0 {
                            acc = (acc * &pw[e as usize]) >> self.bits;
                        }
                    }
                    sum += acc;
                }
                sum
            })
            .collect()
    }
}

fn fixed_from_rational(q: &Rational, bits: u32) -> BigInt {
    (q.numer() << bits).div_floor(q.denom())
}

/// Escape index of `param(t)` under `g`, iterated in fixed point from the
/// exact image of the parameters.
pub fn escape_time_fixed(
    g: &FixedPointMap,
    param: &FixedPointMap,
    t: &[f64],
    max_iter: usize,
    escape_radius: f64,
) -> Option<usize> {
    let bound = g.from_f64(escape_radius);
    let t: Vec<BigInt> = t.iter().map(|&x| param.from_f64(x)).collect();
    let mut x = param.eval(&t);
    for k in 0..max_iter {
        x = g.eval(&x);
        if x.iter().any(|c| c.abs() > bound) {
            return Some(k);
        }
    }
    None
}

/// Number of samples of `entry` whose orbit under `g_d` escapes within
/// `max_iter` steps, in `bits`-bit fixed point.
pub fn count_escapes(
    entry: &VarietyEntry,
    samples: &[KSample],
    d: u32,
    max_iter: usize,
    escape_radius: f64,
    bits: u32,
) -> Result<usize, LabError> {
    check_orbit_params(max_iter, escape_radius)?;
    let rule = entry.angles.ok_or_else(|| NumericError::NoSamples(format!("{} has no angle rule", entry.name)))?;
    let n = entry.orbit_n.ok_or_else(|| NumericError::NoSamples(entry.name.clone()))?;
    let g = FixedPointMap::new(&induced_morphism(n, d)?.map, bits);
    let param = FixedPointMap::new(&entry.param, bits);
    let workers = std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1).min(16);
    let chunk = samples.len().div_ceil(workers).max(1);
    let escaped = std::thread::scope(|scope| {
        let handles: Vec<_> = samples
            .chunks(chunk)
            .map(|part| {
                let (g, param) = (&g, &param);
                scope.spawn(move || {
                    part.iter()
                        .filter(|s| {
                            let t = rule.params(&s.angles.angles);
                            escape_time_fixed(g, param, &t, max_iter, escape_radius).is_some()
                        })
                        .count()
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap_or(usize::MAX)).sum()
    });
    Ok(escaped)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JordanPoint {
    pub arc_id: u8,
    pub theta: f64,
    pub p: f64,
    pub q: f64,
}

/// The closed curve bounding the real bounded set on the plane: arc 1 runs
/// from (9, 27) to (1, -1) on the cusp, arc 2 back along the parabola.
pub fn jordan_curve_data(samples_per_arc: usize) -> Result<Vec<JordanPoint>, NumericError> {
    if samples_per_arc < 2 {
        return Err(NumericError::InvalidParameter("at least two samples per arc".into()));
    }
    let last = (samples_per_arc - 1) as f64;
    let mut out = Vec::with_capacity(2 * samples_per_arc);
    for i in 0..samples_per_arc {
        let theta = PI * (i as f64) / last;
        let c = 1.0 + 2.0 * theta.cos();
        out.push(JordanPoint { arc_id: 1, theta, p: c * c, q: c * c * c });
    }
    for i in 0..samples_per_arc {
        let alpha = PI * (1.0 - (i as f64) / last);
        let c = alpha.cos();
        out.push(JordanPoint { arc_id: 2, theta: alpha, p: 5.0 + 4.0 * c, q: 11.0 + 14.0 * c + 2.0 * c * c });
    }
    Ok(out)
}

/// Both arcs start and end exactly at (1, -1) and (9, 27).
pub fn jordan_endpoints_ok(points: &[JordanPoint]) -> bool {
    let want = [(1.0, -1.0), (9.0, 27.0)];
    (1..=2).all(|arc| {
        let pts: Vec<&JordanPoint> = points.iter().filter(|p| p.arc_id == arc).collect();
        let (Some(first), Some(last)) = (pts.first(), pts.last()) else {
            return false;
        };
        let mut ends = [(first.p, first.q), (last.p, last.q)];
        ends.sort_by(|a, b| a.partial_cmp(b).unwrap());
        ends == want
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JacobianCell {
    pub u: f64,
    pub v: f64,
    pub det: f64,
    pub sign: i8,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JacobianGrid {
    pub size: usize,
    pub cells: Vec<JacobianCell>,
    /// Zero curves `u = v` and `u = v^3 - 3v` as `(u, v)` polylines.
    pub zero_curves: Vec<Vec<(f64, f64)>>,
}

/// Jacobian determinant of the plane parametrization, `-(u - v)(u + 3v - v^3)`.
pub fn jacobian_det(u: f64, v: f64) -> f64 {
    -(u - v) * (u + 3.0 * v - v * v * v)
}

/// `size x size` grid over `[-2, 2]^2`.
pub fn jacobian_partition_data(size: usize) -> Result<JacobianGrid, NumericError> {
    if size < 2 {
        return Err(NumericError::InvalidParameter("grid needs at least two points per axis".into()));
    }
    let at = |i: usize| -2.0 + 4.0 * (i as f64) / ((size - 1) as f64);
    let mut cells = Vec::with_capacity(size * size);
    for i in 0..size {
        for j in 0..size {
            let (u, v) = (at(i), at(j));
            let det = jacobian_det(u, v);
            let sign = if det > 0.0 {
                1
            } else if det < 0.0 {
                -1
            } else {
                0
            };
            cells.push(JacobianCell { u, v, det, sign });
        }
    }
    let diagonal = (0..size).map(|i| (at(i), at(i))).collect();
    let cubic = (0..size).map(at).map(|v| (v * v * v - 3.0 * v, v)).filter(|(u, _)| u.abs() <= 2.0).collect();
    Ok(JacobianGrid { size, cells, zero_curves: vec![diagonal, cubic] })
}

/// Symbolic determinant of `∂(p, q)/∂(u, v)` for the plane parametrization.
pub fn verify_jacobian_formula() -> Result<Report, AlgebraError> {
    let g = &entry("plane")?.param;
    let (p, q) = (g.component(0), g.component(1));
    let det = p.derivative("u").mul(&q.derivative("v")).sub(&p.derivative("v").mul(&q.derivative("u")));
    let want = qpoly_in("-(u - v)(u + 3v - v^3)", &["u", "v"]);
    let mut r = Report::new("Jacobian of the plane parametrization");
    r.check("det = -(u - v)(u + 3v - v^3)", det == want, to_text(&det));
    for (u, v, val) in [(0.0, 0.0, 0.0), (2.0, 0.0, -4.0)] {
        let got = jacobian_det(u, v);
        r.check(format!("det at ({u}, {v})"), got == val, format!("{got}"));
    }
    Ok(r)
}

/// Univariate complex polynomial of `f` in `var` with the other variables bound.
fn numeric_univariate(f: &QPoly, var: &str, values: &[(&str, C64)]) -> Result<Vec<C64>, AlgebraError> {
    f.coefficients_in(var).iter().map(|c| c.evaluate_named_complex(values)).collect()
}

fn rational_univariate_roots(f: &QPoly, var: &str) -> Result<Vec<C64>, LabError> {
    let sf = squarefree_part(f, var)?;
    let coeffs: Vec<C64> = sf.coefficients_in(var).iter().map(|c| c.constant_term().to_complex::<f64>()).collect();
    Ok(aberth_roots(&coeffs)?)
}

/// `g_d` with `Res_q(P - a, Q - b)` in `a, b, p` and `Res_p(P - a, Q - b)` in `a, b, q`.
pub type Eliminants = (QMap, QPoly, QPoly);

/// Eliminants of `g_d` on C^2/D3.
pub fn eliminants_n2(d: u32) -> Result<Eliminants, AlgebraError> {
    let g = induced_morphism(2, d)?;
    let v = ["a", "b", "p", "q"];
    let f = g.map.component(0).sub(&QPoly::var(&v, "a"));
    let h = g.map.component(1).sub(&QPoly::var(&v, "b"));
    Ok((g.map.clone(), resultant(&f, &h, "q")?, resultant(&f, &h, "p")?))
}

/// Keep the pairs `(p_i, q_j)` that map to `target`.
fn pair_roots(map: &CompiledMap<f64>, ps: &[C64], qs: &[C64], target: &[C64]) -> Vec<Vec<C64>> {
    let mut out = Vec::new();
    for &p in ps {
        for &q in qs {
            let y = map.eval(&[p, q]);
            if relative_distance(&y, target) < CLUSTER_TOL {
                out.push(vec![p, q]);
            }
        }
    }
    out
}

fn finish_count(points: Vec<Vec<C64>>, discard_close: bool) -> Result<Vec<Vec<C64>>, NumericError> {
    let distinct = distinct_points(&points, CLUSTER_TOL);
    let gap = min_gap(&distinct);
    if discard_close && gap < MIN_GAP {
        return Err(NumericError::IllConditioned(gap));
    }
    Ok(distinct)
}

/// Distinct preimages of a generic `target` under `g_d` on C^2/D3.
pub fn preimages_n2(elim: &Eliminants, target: &[C64]) -> Result<Vec<Vec<C64>>, LabError> {
    let (map, res_q, res_p) = elim;
    let vals = [("a", target[0]), ("b", target[1])];
    let ps = aberth_roots(&numeric_univariate(res_q, "p", &vals)?)?;
    let qs = aberth_roots(&numeric_univariate(res_p, "q", &vals)?)?;
    Ok(finish_count(pair_roots(&map.compile(), &ps, &qs, target), true)?)
}

/// Distinct preimages of an integer point, using exact squarefree eliminants.
pub fn special_preimages_n2(d: u32, target: [i64; 2]) -> Result<Vec<Vec<C64>>, LabError> {
    let (map, res_q, res_p) = eliminants_n2(d)?;
    let a = QPoly::constant(&["a"], Rational::from_integer(target[0].into()));
    let b = QPoly::constant(&["b"], Rational::from_integer(target[1].into()));
    let bind = [("a", &a), ("b", &b)];
    let ps = rational_univariate_roots(&res_q.substitute(&bind), "p")?;
    let qs = rational_univariate_roots(&res_p.substitute(&bind), "q")?;
    let y = [C64::new(target[0] as f64, 0.0), C64::new(target[1] as f64, 0.0)];
    Ok(finish_count(pair_roots(&map.compile(), &ps, &qs, &y), false)?)
}

/// Distinct preimages of `(a, b, c, d)` on `X_Q` under `g_2`, through the
/// quartics `h_±` and back-substitution.
pub fn preimages_n3(target: &[C64]) -> Result<Vec<Vec<C64>>, LabError> {
    let (hp, _) = h_pm();
    let u = target[1].sqrt();
    if u.norm() < MIN_GAP {
        return Err(NumericError::IllConditioned(u.norm()).into());
    }
    let v = target[2] / u;
    let a = target[0];
    let g = induced_morphism(3, 2)?.map.compile::<f64>();
    let mut pts = Vec::new();
    for sign in [1.0, -1.0] {
        let (us, vs) = (u * sign, v * sign);
        let coeffs = numeric_univariate(&hp, "p", &[("a", a), ("u", us), ("v", vs)])?;
        for p in aberth_roots(&coeffs)? {
            let q = p * 2.0 - 2.0 + us;
            let r = (p * p + p * 8.0 - 8.0 - a + us * 4.0) / 4.0;
            let s = (p * p * 2.0 - a + vs) / 2.0;
            let x = vec![p, q, r, s];
            if relative_distance(&g.eval(&x), target) < CLUSTER_TOL {
                pts.push(x);
            }
        }
    }
    Ok(finish_count(pts, true)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageTrial {
    pub target: Vec<[f64; 2]>,
    /// `None` when the trial was discarded as ill-conditioned.
    pub count: Option<usize>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PreimageCount {
    pub n: usize,
    pub d: u32,
    pub trials: Vec<PreimageTrial>,
    pub modal: Option<usize>,
    /// Fraction of all trials whose count equals the modal count.
    pub agreement: f64,
}

fn random_c64<R: Rng>(rng: &mut R, half: f64) -> C64 {
    C64::new(rng.gen_range(-half..half), rng.gen_range(-half..half))
}

/// Modal number of distinct preimages of random targets.
pub fn count_generic_preimages<R: Rng>(n: usize, d: u32, trials: usize, rng: &mut R) -> Result<PreimageCount, LabError> {
    if !matches!((n, d), (2, 2) | (2, 3) | (3, 2)) {
        return Err(NumericError::InvalidParameter(format!("preimage counting supports g_2, g_3 on n=2 and g_2 on n=3, not n={n} d={d}")).into());
    }
    if trials == 0 {
        return Err(NumericError::InvalidParameter("at least one trial".into()).into());
    }
    let elim = if n == 2 { Some(eliminants_n2(d)?) } else { None };
    let gx = entry("X_Q")?.param.compile::<f64>();
    let mut out = Vec::with_capacity(trials);
    for _ in 0..trials {
        let target: Vec<C64> = match n {
            2 => (0..2).map(|_| random_c64(rng, TARGET_BOX)).collect(),
            _ => {
                let t: Vec<C64> = (0..3).map(|_| random_c64(rng, 2.0)).collect();
                gx.eval(&t)
            }
        };
        let res = match &elim {
            Some(e) => preimages_n2(e, &target),
            None => preimages_n3(&target),
        };
        let (count, note) = match res {
            Ok(pts) => (Some(pts.len()), String::new()),
            Err(LabError::Numeric(e)) => (None, e.to_string()),
            Err(e) => return Err(e),
        };
        out.push(PreimageTrial { target: target.iter().map(|z| [z.re, z.im]).collect(), count, note });
    }
    let mut tally: Vec<(usize, usize)> = Vec::new();
    for c in out.iter().filter_map(|t| t.count) {
        match tally.iter_mut().find(|(k, _)| *k == c) {
            Some(e) => e.1 += 1,
            None => tally.push((c, 1)),
        }
    }
    tally.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let modal = tally.first().map(|t| t.0);
    let agreement = tally.first().map(|t| t.1 as f64 / trials as f64).unwrap_or(0.0);
    Ok(PreimageCount { n, d, trials: out, modal, agreement })
}

impl PreimageCount {
    pub fn report(&self, expected: usize, min_agreement: f64) -> Report {
        let mut r = Report::new(format!("generic degree n={} d={}", self.n, self.d));
        r.check(
            format!("modal preimage count is {expected}"),
            self.modal == Some(expected),
            format!("modal {:?} over {} trials", self.modal, self.trials.len()),
        );
        r.check(
            format!("trial agreement at least {min_agreement}"),
            self.agreement >= min_agreement,
            format!("{:.3}", self.agreement),
        );
        r
    }
}

/// The special points `O`, `(9, 27)`, `(1, -1)` with their expected counts for `g_d`.
pub fn special_points(d: u32) -> Result<[(&'static str, [i64; 2], usize); 3], NumericError> {
    match d {
        2 => Ok([("O", [0, 0], 2), ("(9, 27)", [9, 27], 2), ("(1, -1)", [1, -1], 2)]),
        3 => Ok([("O", [0, 0], 3), ("(9, 27)", [9, 27], 3), ("(1, -1)", [1, -1], 4)]),
        _ => Err(NumericError::InvalidParameter(format!("special points are tabulated for d = 2, 3, not {d}"))),
    }
}

/// Distinct preimages of the special points under `g_d` on C^2/D3.
pub fn classify_special_points(d: u32) -> Result<Report, LabError> {
    let mut r = Report::new(format!("special points d={d}"));
    for (label, pt, want) in special_points(d)? {
        let pts = special_preimages_n2(d, pt)?;
        r.check(format!("#g_{d}^-1{label} = {want}"), pts.len() == want, format!("{} preimages", pts.len()));
    }
    Ok(r)
}

/// Plain SVG canvas with a fixed viewBox; data coordinates are mapped by
/// the supplied bounds with the y axis pointing up.
pub struct SvgCanvas {
    bounds: [f64; 4],
    body: String,
}

pub const SVG_SIZE: f64 = 400.0;
const SVG_MARGIN: f64 = 20.0;

impl SvgCanvas {
    /// `bounds = [xmin, xmax, ymin, ymax]`.
    pub fn new(bounds: [f64; 4]) -> Self {
        SvgCanvas { bounds, body: String::new() }
    }

    pub fn fit(points: impl Iterator<Item = (f64, f64)>) -> Self {
        let mut b = [f64::INFINITY, f64::NEG_INFINITY, f64::INFINITY, f64::NEG_INFINITY];
        for (x, y) in points {
            b = [b[0].min(x), b[1].max(x), b[2].min(y), b[3].max(y)];
        }
        if !(b[0] < b[1]) {
            b[0] -= 1.0;
            b[1] += 1.0;
        }
        if !(b[2] < b[3]) {
            b[2] -= 1.0;
            b[3] += 1.0;
        }
        Self::new(b)
    }

    fn map(&self, x: f64, y: f64) -> (f64, f64) {
        let w = SVG_SIZE - 2.0 * SVG_MARGIN;
        let [x0, x1, y0, y1] = self.bounds;
        (SVG_MARGIN + w * (x - x0) / (x1 - x0), SVG_SIZE - SVG_MARGIN - w * (y - y0) / (y1 - y0))
    }

    pub fn polyline(&mut self, pts: &[(f64, f64)], stroke: &str) {
        let coords: Vec<String> = pts
            .iter()
            .map(|&(x, y)| {
                let (a, b) = self.map(x, y);
                format!("{a:.3},{b:.3}")
            })
            .collect();
        let _ = writeln!(
            self.body,
            r#"<polyline fill="none" stroke="{stroke}" stroke-width="1" points="{}"/>"#,
            coords.join(" ")
        );
    }

    pub fn dot(&mut self, x: f64, y: f64, r: f64, fill: &str) {
        let (a, b) = self.map(x, y);
        let _ = writeln!(self.body, r#"<circle cx="{a:.3}" cy="{b:.3}" r="{r}" fill="{fill}"/>"#);
    }

    pub fn finish(self) -> String {
        format!(
            "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 {s} {s}\" width=\"{s}\" height=\"{s}\">\n\
             <rect width=\"{s}\" height=\"{s}\" fill=\"white\"/>\n{}</svg>\n",
            self.body,
            s = SVG_SIZE
        )
    }
}

pub fn jordan_csv(points: &[JordanPoint]) -> String {
    let mut s = String::from("arc_id,theta,p,q\n");
    for p in points {
        let _ = writeln!(s, "{},{:.12},{:.12},{:.12}", p.arc_id, p.theta, p.p, p.q);
    }
    s
}

pub fn jordan_svg(points: &[JordanPoint]) -> String {
    let mut c = SvgCanvas::fit(points.iter().map(|p| (p.p, p.q)));
    for (arc, colour) in [(1, "black"), (2, "steelblue")] {
        let pts: Vec<(f64, f64)> = points.iter().filter(|p| p.arc_id == arc).map(|p| (p.p, p.q)).collect();
        c.polyline(&pts, colour);
    }
    for (x, y) in [(1.0, -1.0), (9.0, 27.0)] {
        c.dot(x, y, 3.0, "crimson");
    }
    c.finish()
}

/// Header: angle names, ambient coordinates, then `ineq1, ineq2`.
pub fn k_samples_csv(entry: &VarietyEntry, samples: &[KSample]) -> String {
    let angle_names = ["alpha", "beta", "gamma"];
    let k = entry.angles.map(AngleRule::angle_count).unwrap_or(0);
    let mut header: Vec<String> = angle_names[..k].iter().map(|s| s.to_string()).collect();
    header.extend(entry.ambient_vars.iter().cloned());
    header.extend(["ineq1".to_string(), "ineq2".to_string()]);
    let mut s = header.join(",");
    s.push('\n');
    for smp in samples {
        let fields: Vec<String> = smp
            .angles
            .angles
            .iter()
            .chain(&smp.point)
            .chain(&smp.residuals)
            .map(|x| format!("{x:.12}"))
            .collect();
        s.push_str(&fields.join(","));
        s.push('\n');
    }
    s
}

/// Scatter of the first two coordinates.
pub fn k_samples_svg(samples: &[KSample]) -> String {
    let mut c = SvgCanvas::fit(samples.iter().map(|s| (s.point[0], s.point[1])));
    for s in samples {
        c.dot(s.point[0], s.point[1], 0.6, "black");
    }
    c.finish()
}

pub fn jacobian_csv(grid: &JacobianGrid) -> String {
    let mut s = String::from("u,v,det,sign\n");
    for c in &grid.cells {
        let _ = writeln!(s, "{:.12},{:.12},{:.12},{}", c.u, c.v, c.det, c.sign);
    }
    s
}

pub fn jacobian_svg(grid: &JacobianGrid) -> String {
    let mut c = SvgCanvas::new([-2.0, 2.0, -2.0, 2.0]);
    for cell in &grid.cells {
        let fill = match cell.sign {
            1 => "lightcoral",
            -1 => "lightskyblue",
            _ => "black",
        };
        c.dot(cell.u, cell.v, 1.5, fill);
    }
    for curve in &grid.zero_curves {
        c.polyline(curve, "black");
    }
    c.finish()
}

/// Orbit as CSV: `step` then real and imaginary parts of each coordinate.
pub fn orbit_csv<F: Float>(names: &[&str], orbit: &OrbitRecord<F>) -> String {
    let mut header = vec!["step".to_string()];
    for n in names {
        header.push(format!("{n}_re"));
        header.push(format!("{n}_im"));
    }
    let mut s = header.join(",");
    s.push('\n');
    for (k, z) in std::iter::once(&orbit.start).chain(&orbit.iterates).enumerate() {
        let mut row = vec![k.to_string()];
        for c in z {
            row.push(format!("{:.12e}", c.re.to_f64().unwrap_or(f64::NAN)));
            row.push(format!("{:.12e}", c.im.to_f64().unwrap_or(f64::NAN)));
        }
        s.push_str(&row.join(","));
        s.push('\n');
    }
    s
}

/// Inequalities and forward invariance for `samples` points on every entry with an angle rule.
pub fn k_set_report(samples: usize, d: u32, max_iter: usize, escape_radius: f64) -> Result<Report, LabError> {
    let mut r = Report::new(format!("bounded sets, {samples} samples"));
    for name in ["plane", "X_Q", "S_A", "S_P"] {
        let e = entry(name)?;
        let pts = sample_k_set(e, samples)?;
        let imag = pts.iter().map(|s| s.imag_residue).fold(0.0, f64::max);
        let worst = pts.iter().flat_map(|s| s.residuals.iter().copied()).fold(f64::INFINITY, f64::min);
        r.check(format!("{name}: samples are real"), imag < 1e-9, format!("max imaginary part {imag:.3e}"));
        r.check(format!("{name}: inequalities hold to -1e-9"), worst >= -1e-9, format!("min scaled value {worst:.3e}"));
        let esc = count_escapes(e, &pts, d, max_iter, escape_radius, SURVIVAL_BITS)?;
        r.check(
            format!("{name}: no escape under g_{d} in {max_iter} steps"),
            esc == 0,
            format!("{esc} of {} escaped", pts.len()),
        );
    }
    Ok(r)
}

/// `g_d` as a compiled map together with its source names.
pub fn compiled_induced(n: usize, d: u32) -> Result<(Vec<String>, CompiledMap<f64>), AlgebraError> {
    let g = induced_morphism(n, d)?;
    Ok((g.map.source_vars().to_vec(), g.map.compile()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn g(n: usize, d: u32) -> CompiledMap<f64> {
        induced_morphism(n, d).unwrap().map.compile()
    }

    fn c(x: f64, y: f64) -> C64 {
        C64::new(x, y)
    }

    #[test]
    fn orbit_examples() {
        let g2 = g(2, 2);
        let o = iterate_orbit(&g2, &[c(1.0, 0.0), c(-1.0, 0.0)], 64, 1e6).unwrap();
        assert_eq!(o.status, OrbitStatus::BoundedHorizon);
        assert_eq!(o.iterates[0], vec![c(9.0, 0.0), c(27.0, 0.0)]);
        assert_eq!(o.iterates[1], vec![c(9.0, 0.0), c(27.0, 0.0)]);
        let o = iterate_orbit(&g2, &[c(10.0, 0.0), c(0.0, 0.0)], 64, 1e6).unwrap();
        assert_eq!(o.status, OrbitStatus::Escaped);
        assert!(max_norm(o.iterates.last().unwrap()) > 1e6);
        let o = iterate_orbit(&g2, &[c(0.0, 0.0), c(0.0, 0.0)], 64, 1e6).unwrap();
        assert_eq!(o.status, OrbitStatus::BoundedHorizon);
        assert!(o.iterates.iter().all(|z| z == &vec![c(0.0, 0.0); 2]));
        assert!(iterate_orbit(&g2, &[c(0.0, 0.0); 2], 0, 1e6).is_err());
        let big = iterate_orbit(&g2, &[c(1e200, 0.0), c(0.0, 0.0)], 4, f64::MAX).unwrap();
        assert!(big.non_finite && big.status == OrbitStatus::Escaped);
    }

    #[test]
    fn single_precision_orbit() {
        let g2 = induced_morphism(2, 2).unwrap().map.compile::<f32>();
        let o = iterate_orbit(&g2, &[Complex::new(1.0f32, 0.0), Complex::new(-1.0, 0.0)], 8, 1e6).unwrap();
        assert_eq!(o.status, OrbitStatus::BoundedHorizon);
    }

    #[test]
    fn sampling_examples() {
        let plane = entry("plane").unwrap();
        let rule = plane.angles.unwrap();
        let t: Vec<C64> = rule.params(&[0.0, 0.0]).into_iter().map(|x| c(x, 0.0)).collect();
        let x = plane.param.compile::<f64>().eval(&t);
        assert_eq!(x, vec![c(9.0, 0.0), c(27.0, 0.0)]);
        let pts = sample_k_set(plane, 500).unwrap();
        assert!(pts.iter().all(|s| s.residuals.iter().all(|&r| r >= -1e-9)));
        assert!(pts.iter().all(|s| s.angles.angles.iter().all(|&a| (0.0..TAU).contains(&a))));
        assert!(sample_k_set(entry("C_1").unwrap(), 10).is_err());
        let sa = entry("S_A").unwrap();
        let pts = sample_k_set(sa, 40).unwrap();
        assert_eq!(count_escapes(sa, &pts, 2, 64, 1e6, SURVIVAL_BITS).unwrap(), 0);
    }

    #[test]
    fn jordan_examples() {
        let pts = jordan_curve_data(65).unwrap();
        assert!(jordan_endpoints_ok(&pts));
        assert_eq!((pts[0].p, pts[0].q), (9.0, 27.0));
        assert_eq!((pts[64].p, pts[64].q), (1.0, -1.0));
        assert_eq!((pts[129].p, pts[129].q), (9.0, 27.0));
        assert!(jordan_curve_data(1).is_err());
        assert!(jordan_csv(&pts).starts_with("arc_id,theta,p,q\n"));
        assert!(jordan_svg(&pts).contains("viewBox=\"0 0 400 400\""));
    }

    #[test]
    fn jacobian_examples() {
        assert!(verify_jacobian_formula().unwrap().passed());
        let grid = jacobian_partition_data(5).unwrap();
        assert_eq!(grid.cells.len(), 25);
        let centre = grid.cells.iter().find(|c| c.u == 0.0 && c.v == 0.0).unwrap();
        assert_eq!(centre.sign, 0);
    }

    #[test]
    fn generic_counts() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (n, d, want) in [(2, 2, 4), (2, 3, 9), (3, 2, 8)] {
            let c = count_generic_preimages(n, d, 10, &mut rng).unwrap();
            assert!(c.report(want, 0.9).passed(), "{c:?}");
        }
        assert!(count_generic_preimages(3, 3, 1, &mut rng).is_err());
    }

    #[test]
    fn special_counts() {
        for d in [2, 3] {
            let r = classify_special_points(d).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }
}
