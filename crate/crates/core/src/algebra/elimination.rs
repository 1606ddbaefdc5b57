use super::poly::MultiPoly;
use super::scalar::Scalar;
use crate::error::AlgebraError;

/// Sylvester matrix of `f` and `g` with respect to `var`; entries are
/// polynomials in the remaining variables.
pub fn sylvester_matrix<C: Scalar>(f: &MultiPoly<C>, g: &MultiPoly<C>, var: &str) -> Vec<Vec<MultiPoly<C>>> {
    let (f, g) = super::poly::align(f, g);
    let fc = f.coefficients_in(var);
    let gc = g.coefficients_in(var);
    let m = fc.len() - 1;
    let n = gc.len() - 1;
    let size = m + n;
    let zero = fc[0].zero_like();
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![zero.clone(); size];
        for (k, c) in fc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![zero.clone(); size];
        for (k, c) in gc.iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Fraction-free (Bareiss) determinant over the polynomial ring.
pub fn determinant<C: Scalar>(mut m: Vec<Vec<MultiPoly<C>>>) -> Result<MultiPoly<C>, AlgebraError> {
    let n = m.len();
    if n == 0 {
        return Ok(MultiPoly::constant::<&str>(&[], C::one()));
    }
    let mut negate = false;
    let mut prev: Option<MultiPoly<C>> = None;
    for k in 0..n.saturating_sub(1) {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(i) => {
                    m.swap(k, i);
                    negate = !negate;
                }
                None => return Ok(m[0][0].zero_like()),
            }
        }
        let (top, bottom) = m.split_at_mut(k + 1);
        let pivot_row = &top[k];
        let pivot = &pivot_row[k];
        for row in bottom.iter_mut() {
            let lead = row[k].clone();
            for j in k + 1..n {
                let mut val = pivot.mul(&row[j]);
                if !lead.is_zero() && !pivot_row[j].is_zero() {
                    val = val.sub(&lead.mul(&pivot_row[j]));
                }
                if let Some(p) = &prev {
                    val = val.exact_divide(p).ok_or_else(|| {
                        AlgebraError::DivisionFailed("Bareiss step was not exact".into())
                    })?;
                }
                row[j] = val;
            }
            row[k] = row[k].zero_like();
        }
        prev = Some(m[k][k].clone());
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// Resultant of `f` and `g` in `var`.
pub fn resultant<C: Scalar>(f: &MultiPoly<C>, g: &MultiPoly<C>, var: &str) -> Result<MultiPoly<C>, AlgebraError> {
    if f.is_zero() || g.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    if f.degree_in(var) == 0 || g.degree_in(var) == 0 {
        return Err(AlgebraError::DegreeTooLow(var.to_string()));
    }
    determinant(sylvester_matrix(f, g, var))
}

/// `(-1)^(n(n-1)/2) Res(f, f') / lc(f)` with `n = deg_var f`.
pub fn discriminant<C: Scalar>(f: &MultiPoly<C>, var: &str) -> Result<MultiPoly<C>, AlgebraError> {
    let n = f.degree_in(var);
    if n < 2 {
        return Err(AlgebraError::DegreeTooLow(var.to_string()));
    }
    let res = resultant(f, &f.derivative(var), var)?;
    let (_, lc) = f.leading_coefficient_in(var);
    let q = res
        .exact_divide(&lc)
        .ok_or_else(|| AlgebraError::DivisionFailed("leading coefficient does not divide the resultant".into()))?;
    let sign_negative = (n as u64 * (n as u64 - 1) / 2) % 2 == 1;
    Ok(if sign_negative { q.neg() } else { q })
}

/// Repeatedly divide `f` by `factor`, returning the multiplicity and cofactor.
pub fn factor_multiplicity<C: Scalar>(f: &MultiPoly<C>, factor: &MultiPoly<C>) -> (u32, MultiPoly<C>) {
    let mut k = 0;
    let mut rest = f.clone();
    if factor.is_constant() || f.is_zero() {
        return (0, rest);
    }
    while let Some(q) = rest.exact_divide(factor) {
        rest = q;
        k += 1;
    }
    (k, rest)
}

pub fn is_nonzero_constant<C: Scalar>(p: &MultiPoly<C>) -> bool {
    p.is_constant() && !p.is_zero()
}

/// Remainder of `f` on division by `g` as polynomials in `var`; the leading
/// coefficient of `g` in `var` must be a nonzero constant.
pub fn remainder_in<C: Scalar>(f: &MultiPoly<C>, g: &MultiPoly<C>, var: &str) -> Result<MultiPoly<C>, AlgebraError> {
    let (dg, lg) = g.leading_coefficient_in(var);
    if !is_nonzero_constant(&lg) {
        return Err(AlgebraError::DivisionFailed(format!("leading coefficient in {var} is not constant")));
    }
    let lc = lg.constant_term();
    let x = MultiPoly::var(&[var], var);
    let mut r = f.clone();
    loop {
        if r.is_zero() {
            return Ok(r);
        }
        let (dr, lr) = r.leading_coefficient_in(var);
        if dr < dg {
            return Ok(r);
        }
        let step = lr.mul(&x.pow(dr - dg)).mul(g).div_scalar(&lc);
        r = r.sub(&step);
    }
}

/// Monic gcd of two polynomials in the single variable `var`.
pub fn univariate_gcd<C: Scalar>(f: &MultiPoly<C>, g: &MultiPoly<C>, var: &str) -> Result<MultiPoly<C>, AlgebraError> {
    for h in [f, g] {
        if h.used_vars().iter().any(|v| v != var) {
            return Err(AlgebraError::Malformed(format!("expected a polynomial in {var} only")));
        }
    }
    let (mut a, mut b) = (f.clone(), g.clone());
    while !b.is_zero() {
        let r = remainder_in(&a, &b, var)?;
        a = b;
        b = r;
    }
    if a.is_zero() {
        return Err(AlgebraError::ZeroPolynomial);
    }
    let (_, lc) = a.leading_coefficient_in(var);
    Ok(a.div_scalar(&lc.constant_term()))
}

/// `f / gcd(f, f')` for `f` in the single variable `var`.
pub fn squarefree_part<C: Scalar>(f: &MultiPoly<C>, var: &str) -> Result<MultiPoly<C>, AlgebraError> {
    if f.degree_in(var) == 0 {
        return Ok(f.clone());
    }
    let g = univariate_gcd(f, &f.derivative(var), var)?;
    f.exact_divide(&g).ok_or_else(|| AlgebraError::DivisionFailed("gcd does not divide".into()))
}
