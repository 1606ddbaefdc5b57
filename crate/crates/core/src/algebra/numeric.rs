use num_complex::Complex;
use num_traits::Float;

use super::poly::MultiPoly;
use super::scalar::Scalar;
use crate::error::NumericError;

fn c<F: Float>(x: f64) -> F {
    F::from(x).unwrap()
}

/// Value and derivative of `sum coeffs[i] z^i`.
pub fn horner_with_derivative<F: Float>(coeffs: &[Complex<F>], z: Complex<F>) -> (Complex<F>, Complex<F>) {
    let zero = Complex::new(F::zero(), F::zero());
    let mut p = zero;
    let mut dp = zero;
    for a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + *a;
    }
    (p, dp)
}

/// All complex roots of `sum coeffs[i] z^i` by Aberth–Ehrlich iteration.
/// Trailing (highest-order) exact zeros are dropped.
pub fn aberth_roots<F: Float>(coeffs: &[Complex<F>]) -> Result<Vec<Complex<F>>, NumericError> {
    let mut n = coeffs.len();
    while n > 0 && coeffs[n - 1].norm() == F::zero() {
        n -= 1;
    }
    if n <= 1 {
        return Ok(Vec::new());
    }
    let coeffs = &coeffs[..n];
    let deg = n - 1;
    let lead = coeffs[deg];
    let radius = coeffs[..deg]
        .iter()
        .map(|a| (a.norm() / lead.norm()).powf(F::one() / F::from(deg).unwrap()))
        .fold(F::zero(), F::max)
        .max(c(1e-3));
    let tau = c::<F>(std::f64::consts::TAU);
    let mut z: Vec<Complex<F>> = (0..deg)
        .map(|k| {
            let theta = tau * F::from(k).unwrap() / F::from(deg).unwrap() + c(0.4);
            Complex::from_polar(radius, theta)
        })
        .collect();
    let tol = F::epsilon() * c(4.0);
    for _ in 0..1000 {
        let mut worst = F::zero();
        for i in 0..deg {
            let (p, dp) = horner_with_derivative(coeffs, z[i]);
            if p.norm() == F::zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex::new(F::zero(), F::zero());
            for j in 0..deg {
                if j != i {
                    let diff = z[i] - z[j];
                    if diff.norm() > F::zero() {
                        s = s + diff.inv();
                    }
                }
            }
            let denom = Complex::new(F::one(), F::zero()) - ratio * s;
            let w = if denom.norm() > F::zero() { ratio / denom } else { ratio };
            if w.re.is_finite() && w.im.is_finite() {
                z[i] = z[i] - w;
                worst = worst.max(w.norm() / (F::one() + z[i].norm()));
            }
        }
        if worst <= tol {
            break;
        }
    }
    let residual = z.iter().map(|&r| relative_residual(coeffs, r)).fold(F::zero(), F::max);
    let limit: F = c(1e-6);
    if !(residual <= limit) {
        return Err(NumericError::RootFindingFailed(residual.to_f64().unwrap_or(f64::NAN)));
    }
    Ok(z)
}

/// Re-centre clusters of nearly equal roots. A cluster of `m` approximations
/// to an `m`-fold root is shifted so its mean is the simple root of the
/// `(m-1)`-th derivative nearby, which restores symmetric functions of the
/// roots to full precision.
pub fn recenter_clusters<F: Float>(coeffs: &[Complex<F>], roots: &mut [Complex<F>], tol: F) {
    let n = roots.len();
    let mut label: Vec<usize> = (0..n).collect();
    for i in 0..n {
        for j in 0..i {
            if (roots[i] - roots[j]).norm() <= tol * (F::one() + roots[i].norm()) {
                let (a, b) = (label[i], label[j]);
                for l in label.iter_mut() {
                    if *l == a {
                        *l = b;
                    }
                }
            }
        }
    }
    let mut seen = Vec::new();
    for &root_label in &label {
        if seen.contains(&root_label) {
            continue;
        }
        seen.push(root_label);
        let members: Vec<usize> = (0..n).filter(|&i| label[i] == root_label).collect();
        let m = members.len();
        if m < 2 {
            continue;
        }
        let zero = Complex::new(F::zero(), F::zero());
        let mean = members.iter().fold(zero, |a, &i| a + roots[i]) / F::from(m).unwrap();
        let mut q: Vec<Complex<F>> = coeffs.to_vec();
        for _ in 0..m - 1 {
            q = q.iter().enumerate().skip(1).map(|(k, a)| *a * F::from(k).unwrap()).collect();
        }
        let mut c = mean;
        for _ in 0..50 {
            let (v, dv) = horner_with_derivative(&q, c);
            if dv.norm() == F::zero() {
                break;
            }
            let step = v / dv;
            c = c - step;
            if step.norm() <= F::epsilon() * (F::one() + c.norm()) {
                break;
            }
        }
        if (c - mean).norm() <= tol * (F::one() + mean.norm()) {
            for &i in &members {
                roots[i] = roots[i] + (c - mean);
            }
        }
    }
}

/// `|p(z)| / sum |a_i| |z|^i`.
pub fn relative_residual<F: Float>(coeffs: &[Complex<F>], z: Complex<F>) -> F {
    let (p, _) = horner_with_derivative(coeffs, z);
    let r = z.norm();
    let mut scale = F::zero();
    for a in coeffs.iter().rev() {
        scale = scale * r + a.norm();
    }
    if scale == F::zero() {
        F::zero()
    } else {
        p.norm() / scale
    }
}

/// `|f(x)| / max(1, sum |c_m| |x^m|)`; `point` follows `f.vars()`.
pub fn scaled_residual<C: Scalar>(f: &MultiPoly<C>, point: &[Complex<f64>]) -> f64 {
    let mut scale: f64 = 0.0;
    for (m, c) in f.terms() {
        let mut t = c.to_complex::<f64>().norm();
        for (x, &e) in point.iter().zip(m.exps()) {
            t *= x.norm().powi(e as i32);
        }
        scale += t;
    }
    f.evaluate_complex(point).norm() / scale.max(1.0)
}

/// Relative distance used for clustering: `|a-b| / max(1, |a|, |b|)`.
pub fn relative_distance<F: Float>(a: &[Complex<F>], b: &[Complex<F>]) -> F {
    let mut num = F::zero();
    let mut scale = F::one();
    for (x, y) in a.iter().zip(b) {
        num = num.max((*x - *y).norm());
        scale = scale.max(x.norm()).max(y.norm());
    }
    num / scale
}

/// Greedy clustering of points within `tol` relative distance.
pub fn distinct_points<F: Float>(points: &[Vec<Complex<F>>], tol: F) -> Vec<Vec<Complex<F>>> {
    let mut reps: Vec<Vec<Complex<F>>> = Vec::new();
    for p in points {
        if !reps.iter().any(|r| relative_distance(r, p) <= tol) {
            reps.push(p.clone());
        }
    }
    reps
}

/// Smallest pairwise relative distance (infinite for fewer than two points).
pub fn min_gap<F: Float>(points: &[Vec<Complex<F>>]) -> F {
    let mut best = F::infinity();
    for i in 0..points.len() {
        for j in i + 1..points.len() {
            best = best.min(relative_distance(&points[i], &points[j]));
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cubic_roots() {
        let coeffs: Vec<Complex<f64>> = [-6.0, 11.0, -6.0, 1.0].iter().map(|&x| Complex::new(x, 0.0)).collect();
        let mut roots: Vec<f64> = aberth_roots(&coeffs).unwrap().iter().map(|z| z.re).collect();
        roots.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (r, e) in roots.iter().zip([1.0, 2.0, 3.0]) {
            assert!((r - e).abs() < 1e-10);
        }
    }

    #[test]
    fn single_precision_quadratic() {
        let coeffs: Vec<Complex<f32>> = [-2.0f32, 0.0, 1.0].iter().map(|&x| Complex::new(x, 0.0)).collect();
        let roots = aberth_roots(&coeffs).unwrap();
        for r in roots {
            assert!((r.norm() - 2f32.sqrt()).abs() < 1e-4);
        }
    }
}
