//! One-variable Chebyshev polynomials, the Chebyshev endomorphisms of C^2 and
//! C^3, their real forms, and the dihedral equivariance identities.

use num_complex::Complex;
use num_traits::{Float, One, Zero};
use rand::Rng;

use crate::algebra::numeric::{aberth_roots, recenter_clusters};
use crate::algebra::{CycRational, PolyMap, Scalar};
use crate::error::{AlgebraError, NumericError};
use crate::report::Report;
use crate::{qpoly_in, CycPoly, QMap, QPoly};

pub const DEFAULT_DEGREE_CAP: u32 = 16;

/// `T_d` in the variable `z`, normalised so that `T_d(s + 1/s) = s^d + s^-d`.
pub fn cheb1(d: u32) -> QPoly {
    cheb1_in(d, "z")
}

pub fn cheb1_in(d: u32, var: &str) -> QPoly {
    let z = QPoly::var(&[var], var);
    let mut prev = z.constant_like(crate::rat(2, 1));
    if d == 0 {
        return prev;
    }
    let mut cur = z.clone();
    for _ in 1..d {
        let next = z.mul(&cur).sub(&prev);
        prev = cur;
        cur = next;
    }
    cur
}

/// Checks `s^d T_d((s^2+1)/s) = s^(2d) + 1`, the cleared form of the Laurent identity.
pub fn cheb1_laurent_identity(d: u32) -> bool {
    let t = cheb1_in(d, "z");
    let s = QPoly::var(&["s"], "s");
    let s2p1 = s.mul(&s).add_constant(&crate::rat(1, 1));
    let mut acc = s.zero_like();
    for k in 0..=d {
        let c = t.coeff_of(&[("z", k)]);
        if c.is_zero() {
            continue;
        }
        acc = acc.add(&s2p1.pow(k).mul(&s.pow(d - k)).scale(&c));
    }
    acc == s.pow(2 * d).add_constant(&crate::rat(1, 1))
}

pub fn endo_vars(n: usize) -> Result<&'static [&'static str], AlgebraError> {
    match n {
        2 => Ok(&["z1", "z2"]),
        3 => Ok(&["z1", "z2", "z3"]),
        _ => Err(AlgebraError::UnsupportedDimension(n)),
    }
}

pub fn real_vars(n: usize) -> Result<&'static [&'static str], AlgebraError> {
    match n {
        2 => Ok(&["x", "y"]),
        3 => Ok(&["x", "y", "z"]),
        _ => Err(AlgebraError::UnsupportedDimension(n)),
    }
}

/// The map `T_d` on `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct ChebEndo {
    pub n: usize,
    pub d: u32,
    pub map: QMap,
}

fn swap_ends(p: &QPoly, n: usize) -> QPoly {
    match n {
        2 => p.rename(&[("z1", "z2"), ("z2", "z1")]),
        _ => p.rename(&[("z1", "z3"), ("z3", "z1")]),
    }
}

pub fn cheb_endo(n: usize, d: u32) -> Result<ChebEndo, AlgebraError> {
    let vars = endo_vars(n)?;
    if d == 0 {
        return Err(AlgebraError::Malformed("degree must be positive".into()));
    }
    let d_us = d as usize;
    let comps = if n == 2 {
        let z1 = QPoly::var(vars, "z1");
        let z2 = QPoly::var(vars, "z2");
        let mut s = vec![qpoly_in("3", vars), z1.clone(), qpoly_in("z1^2 - 2 z2", vars)];
        while s.len() <= d_us {
            let k = s.len();
            let next = z1.mul(&s[k - 1]).sub(&z2.mul(&s[k - 2])).add(&s[k - 3]);
            s.push(next);
        }
        let first = s[d_us].clone();
        vec![first.clone(), swap_ends(&first, 2)]
    } else {
        let z1 = QPoly::var(vars, "z1");
        let z2 = QPoly::var(vars, "z2");
        let z3 = QPoly::var(vars, "z3");
        let mut s = vec![
            qpoly_in("4", vars),
            z1.clone(),
            qpoly_in("z1^2 - 2 z2", vars),
            qpoly_in("z1^3 - 3 z1 z2 + 3 z3", vars),
        ];
        while s.len() <= d_us {
            let k = s.len();
            let next = z1.mul(&s[k - 1]).sub(&z2.mul(&s[k - 2])).add(&z3.mul(&s[k - 3])).sub(&s[k - 4]);
            s.push(next);
        }
        let first = s[d_us].clone();
        // Middle component: index k is stored at k + 2 so that k = -2 is slot 0.
        let e1 = z2.clone();
        let e2 = qpoly_in("z1 z3 - 1", vars);
        let e3 = qpoly_in("z1^2 - 2 z2 + z3^2", vars);
        let mut m = vec![
            qpoly_in("z2^2 - 2 z1 z3 + 2", vars),
            z2.clone(),
            qpoly_in("6", vars),
            z2.clone(),
            qpoly_in("z2^2 - 2 z1 z3 + 2", vars),
            qpoly_in("z2^3 - 3 z1 z2 z3 + 3 z3^2 + 3 z1^2 - 3 z2", vars),
        ];
        while m.len() <= d_us + 2 {
            let k = m.len();
            let next = e1
                .mul(&m[k - 1])
                .sub(&e2.mul(&m[k - 2]))
                .add(&e3.mul(&m[k - 3]))
                .sub(&e2.mul(&m[k - 4]))
                .add(&e1.mul(&m[k - 5]))
                .sub(&m[k - 6]);
            m.push(next);
        }
        vec![first.clone(), m[d_us + 2].clone(), swap_ends(&first, 3)]
    };
    Ok(ChebEndo { n, d, map: PolyMap::new(vars, comps)? })
}

/// Roots `t_1..t_{n+1}` of `t^{n+1} - z1 t^n + ... + (-1)^{n+1}`.
#[derive(Debug, Clone)]
pub struct RootTuple<F> {
    pub roots: Vec<Complex<F>>,
}

impl<F: Float> RootTuple<F> {
    pub fn from_point(z: &[Complex<F>]) -> Result<Self, NumericError> {
        let n = z.len();
        let one = Complex::new(F::one(), F::zero());
        // ascending coefficients
        let mut coeffs = vec![Complex::new(F::zero(), F::zero()); n + 2];
        coeffs[n + 1] = one;
        for (j, zj) in z.iter().enumerate() {
            let sign = if (j + 1) % 2 == 0 { F::one() } else { -F::one() };
            coeffs[n - j] = *zj * sign;
        }
        coeffs[0] = if (n + 1).is_multiple_of(2) { one } else { -one };
        let mut roots = aberth_roots(&coeffs)?;
        recenter_clusters(&coeffs, &mut roots, F::from(1e-3).unwrap());
        let prod = roots.iter().fold(one, |a, r| a * r);
        let err = (prod - one).norm();
        let scale = roots.iter().fold(F::one(), |a, r| a * (F::one() + r.norm()));
        if err > F::from(1e-6).unwrap() * scale {
            return Err(NumericError::RootFindingFailed(err.to_f64().unwrap_or(f64::NAN)));
        }
        Ok(RootTuple { roots })
    }
}

/// Elementary symmetric functions `e_1..e_k` of `values`.
pub fn elementary_symmetric<F: Float>(values: &[Complex<F>], k: usize) -> Vec<Complex<F>> {
    let zero = Complex::new(F::zero(), F::zero());
    let mut e = vec![zero; values.len() + 1];
    e[0] = Complex::new(F::one(), F::zero());
    for v in values {
        for j in (1..e.len()).rev() {
            e[j] = e[j] + e[j - 1] * v;
        }
    }
    e[1..=k].to_vec()
}

/// Independent numeric evaluation of `T_d(z)` via the roots `t_i`.
pub fn oracle_cheb_numeric<F: Float>(n: usize, d: u32, z: &[Complex<F>]) -> Result<Vec<Complex<F>>, NumericError> {
    assert_eq!(z.len(), n, "point arity");
    let tuple = RootTuple::from_point(z)?;
    let powered: Vec<Complex<F>> = tuple.roots.iter().map(|t| t.powu(d)).collect();
    Ok(elementary_symmetric(&powered, n))
}

/// `f_d`: the restriction of `T_d` to the real slice, in real coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct RealForm {
    pub n: usize,
    pub d: u32,
    pub map: QMap,
}

fn gaussian_split(p: &CycPoly) -> Result<(QPoly, QPoly), AlgebraError> {
    let re = p.try_map_coeffs(|c| c.re_im().map(|x| x.0));
    let im = p.try_map_coeffs(|c| c.re_im().map(|x| x.1));
    match (re, im) {
        (Some(a), Some(b)) => Ok((a, b)),
        _ => Err(AlgebraError::ComplexResidue("coefficient outside Q(i)".into())),
    }
}

pub fn lift(p: &QPoly) -> CycPoly {
    p.map_coeffs(CycRational::rational)
}

pub fn real_form(n: usize, d: u32) -> Result<RealForm, AlgebraError> {
    let endo = cheb_endo(n, d)?;
    let rv = real_vars(n)?;
    let i = CycRational::zeta(4).unwrap();
    let x = CycPoly::var(rv, "x");
    let iy = CycPoly::var(rv, "y").scale(&i);
    let plus = x.add(&iy);
    let minus = x.sub(&iy);
    let ev = endo_vars(n)?;
    let images: Vec<CycPoly> = if n == 2 {
        vec![plus, minus]
    } else {
        vec![plus, CycPoly::var(rv, "z"), minus]
    };
    let bindings: Vec<(&str, &CycPoly)> = ev.iter().copied().zip(images.iter()).collect();
    let comps: Vec<CycPoly> = endo.map.components().iter().map(|c| lift(c).substitute(&bindings)).collect();
    let (re1, im1) = gaussian_split(&comps[0])?;
    let (re_last, im_last) = gaussian_split(&comps[n - 1])?;
    if re_last != re1 || im_last != im1.neg() {
        return Err(AlgebraError::ComplexResidue("outer components are not conjugate".into()));
    }
    let mut out = vec![re1, im1];
    if n == 3 {
        let (re2, im2) = gaussian_split(&comps[1])?;
        if !im2.is_zero() {
            return Err(AlgebraError::ComplexResidue("middle component is not real".into()));
        }
        out.push(re2);
    }
    let map = PolyMap::new(rv, out)?;
    if !map.is_integral() {
        return Err(AlgebraError::NonIntegral(format!("f_{d}")));
    }
    Ok(RealForm { n, d, map })
}

/// Rotation and reversal identities for `T_d`, exact over Q(zeta_{n+1}).
pub fn verify_equivariance(n: usize, d: u32) -> Result<Report, AlgebraError> {
    let endo = cheb_endo(n, d)?;
    let vars = endo_vars(n)?;
    let k = (n + 1) as u8;
    let zeta = CycRational::zeta(k).unwrap();
    let pow = |e: u32| {
        let mut acc = CycRational::one();
        for _ in 0..e {
            acc *= &zeta;
        }
        acc
    };
    let comps: Vec<CycPoly> = endo.map.components().iter().map(lift).collect();
    let rotated: Vec<CycPoly> =
        vars.iter().enumerate().map(|(j, v)| CycPoly::var(vars, v).scale(&pow(j as u32 + 1))).collect();
    let bindings: Vec<(&str, &CycPoly)> = vars.iter().copied().zip(rotated.iter()).collect();
    let mut rotation_ok = true;
    for (j, c) in comps.iter().enumerate() {
        let lhs = c.scale(&pow((j as u32 + 1) * d));
        let rhs = c.substitute(&bindings);
        rotation_ok &= lhs == rhs;
    }
    let mut reversal_ok = true;
    for j in 0..n {
        let lhs = swap_ends(endo.map.component(j), n);
        reversal_ok &= &lhs == endo.map.component(n - 1 - j);
    }
    let mut r = Report::new(format!("equivariance n={n} d={d}"));
    r.check("rotation", rotation_ok, "zeta^(jd) z_j^(d)(z) = z_j^(d)(zeta z_1, ..., zeta^n z_n)");
    r.check("reversal", reversal_ok, "z_j^(d)(z_n, ..., z_1) = z_(n+1-j)^(d)(z_1, ..., z_n)");
    Ok(r)
}

/// `T_j ∘ T_k = T_{jk}` exactly.
pub fn verify_semigroup_endo(n: usize, j: u32, k: u32, cap: u32) -> Result<Report, AlgebraError> {
    if j * k > cap {
        return Err(AlgebraError::DegreeCapExceeded { requested: (j * k) as usize, cap: cap as usize });
    }
    let tj = cheb_endo(n, j)?;
    let tk = cheb_endo(n, k)?;
    let tjk = cheb_endo(n, j * k)?;
    let composed = tj.map.after(&tk.map)?;
    let mut r = Report::new(format!("semigroup n={n}"));
    r.check(format!("T_{j} o T_{k} = T_{}", j * k), composed == tjk.map, "");
    Ok(r)
}

/// Leading-term property: `z1^d` has coefficient 1 and is the only term of
/// total degree `d` in the first component.
pub fn leading_term_property(endo: &ChebEndo) -> bool {
    let c = endo.map.component(0);
    let top: Vec<_> = c.terms().filter(|(m, _)| m.degree() == endo.d).collect();
    top.len() == 1 && c.coeff_of(&[("z1", endo.d)]).is_one()
}

/// Relative agreement between `cheb_endo` and the numeric oracle at random points.
pub fn oracle_agreement<R: Rng>(n: usize, d: u32, samples: usize, rng: &mut R) -> Result<f64, AlgebraError> {
    let endo = cheb_endo(n, d)?;
    let compiled = endo.map.compile::<f64>();
    let mut worst: f64 = 0.0;
    for _ in 0..samples {
        let z: Vec<Complex<f64>> =
            (0..n).map(|_| Complex::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))).collect();
        let exact = compiled.eval(&z);
        let oracle = match oracle_cheb_numeric(n, d, &z) {
            Ok(o) => o,
            Err(_) => return Ok(f64::INFINITY),
        };
        let scale = exact.iter().map(|c| c.norm()).fold(1.0, f64::max);
        for (a, b) in exact.iter().zip(&oracle) {
            worst = worst.max((a - b).norm() / scale);
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly;
    use rand::SeedableRng;

    #[test]
    fn small_chebyshev() {
        assert_eq!(cheb1(2), qpoly("z^2 - 2"));
        assert_eq!(cheb1(4), qpoly("z^4 - 4z^2 + 2"));
        assert!(cheb1_laurent_identity(7));
    }

    #[test]
    fn endo_examples() {
        let t = cheb_endo(3, 3).unwrap();
        assert_eq!(t.map.component(0), &qpoly_in("z1^3 - 3 z1 z2 + 3 z3", &["z1", "z2", "z3"]));
        let t = cheb_endo(3, 2).unwrap();
        assert_eq!(t.map.component(1), &qpoly_in("z2^2 - 2 z1 z3 + 2", &["z1", "z2", "z3"]));
        let t = cheb_endo(2, 1).unwrap();
        assert_eq!(t.map, PolyMap::identity(&["z1", "z2"]));
        assert!(cheb_endo(4, 2).is_err());
    }

    #[test]
    fn oracle_at_repeated_roots() {
        let z = [Complex::new(3.0, 0.0), Complex::new(3.0, 0.0)];
        let out = oracle_cheb_numeric(2, 5, &z).unwrap();
        assert!(out.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-6), "{out:?}");
        let z = [Complex::new(4.0, 0.0), Complex::new(6.0, 0.0), Complex::new(4.0, 0.0)];
        for d in 1..=5 {
            let out = oracle_cheb_numeric(3, d, &z).unwrap();
            assert!(out.iter().zip(&z).all(|(a, b)| (a - b).norm() < 1e-6 * 6.0), "d={d} {out:?}");
        }
    }

    #[test]
    fn oracle_matches_recurrence() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for n in [2, 3] {
            for d in 2..=6 {
                assert!(oracle_agreement(n, d, 5, &mut rng).unwrap() < 1e-9, "n={n} d={d}");
            }
        }
    }
}
