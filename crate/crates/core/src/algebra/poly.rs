use std::cmp::Ordering;
use std::collections::hash_map::Entry;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use num_complex::Complex;
use num_traits::{Float, One};
use smallvec::SmallVec;

use super::scalar::Scalar;
use crate::error::AlgebraError;

pub type Exponents = SmallVec<[u32; 6]>;

/// Exponent vector ordered graded-lexicographically: total degree first, then
/// lexicographic with the first variable most significant.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Monomial(pub Exponents);

impl Monomial {
    pub fn one(n: usize) -> Self {
        Monomial(SmallVec::from_elem(0, n))
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn exps(&self) -> &[u32] {
        &self.0
    }

    fn mul(&self, other: &Monomial) -> Monomial {
        Monomial(self.0.iter().zip(other.0.iter()).map(|(a, b)| a + b).collect())
    }

    fn div(&self, other: &Monomial) -> Option<Monomial> {
        let mut out = Exponents::with_capacity(self.0.len());
        for (a, b) in self.0.iter().zip(other.0.iter()) {
            if a < b {
                return None;
            }
            out.push(a - b);
        }
        Some(Monomial(out))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree().cmp(&other.degree()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Names with a fixed rank; anything else sorts after them alphabetically.
const RANKED: &[&str] = &[
    "z1", "z2", "z3", "x", "y", "z", "p", "q", "r", "s", "a", "b", "c", "d", "u", "v", "w", "t", "T",
];

pub fn variable_rank(name: &str) -> (usize, &str) {
    match RANKED.iter().position(|v| *v == name) {
        Some(i) => (i, ""),
        None => (RANKED.len(), name),
    }
}

pub fn compare_vars(a: &str, b: &str) -> Ordering {
    variable_rank(a).cmp(&variable_rank(b))
}

/// Sorted, deduplicated variable list in the global order.
pub fn canonical_vars<I, S>(names: I) -> Arc<[String]>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut v: Vec<String> = names.into_iter().map(|s| s.as_ref().to_string()).collect();
    v.sort_by(|a, b| compare_vars(a, b));
    v.dedup();
    v.into()
}

/// Sparse multivariate polynomial with named variables.
#[derive(Clone, Debug)]
pub struct MultiPoly<C> {
    vars: Arc<[String]>,
    terms: BTreeMap<Monomial, C>,
}

impl<C: Scalar> PartialEq for MultiPoly<C> {
    fn eq(&self, other: &Self) -> bool {
        if self.vars == other.vars {
            return self.terms == other.terms;
        }
        let (a, b) = align(self, other);
        a.terms == b.terms
    }
}

/// Re-express both operands over the union of their variables.
pub fn align<C: Scalar>(a: &MultiPoly<C>, b: &MultiPoly<C>) -> (MultiPoly<C>, MultiPoly<C>) {
    if a.vars == b.vars {
        return (a.clone(), b.clone());
    }
    let vars = canonical_vars(a.vars.iter().chain(b.vars.iter()));
    (a.with_vars(&vars), b.with_vars(&vars))
}

impl<C: Scalar> MultiPoly<C> {
    pub fn zero<S: AsRef<str>>(vars: &[S]) -> Self {
        MultiPoly { vars: canonical_vars(vars.iter().map(|s| s.as_ref())), terms: BTreeMap::new() }
    }

    pub fn zero_like(&self) -> Self {
        MultiPoly { vars: self.vars.clone(), terms: BTreeMap::new() }
    }

    pub fn constant<S: AsRef<str>>(vars: &[S], c: C) -> Self {
        let mut p = Self::zero(vars);
        if !c.is_zero() {
            p.terms.insert(Monomial::one(p.vars.len()), c);
        }
        p
    }

    pub fn constant_like(&self, c: C) -> Self {
        let mut p = self.zero_like();
        if !c.is_zero() {
            p.terms.insert(Monomial::one(p.vars.len()), c);
        }
        p
    }

    pub fn one_like(&self) -> Self {
        self.constant_like(C::one())
    }

    /// The variable `name` as a polynomial over `vars` (which must contain it).
    pub fn var<S: AsRef<str>>(vars: &[S], name: &str) -> Self {
        let mut p = Self::zero(vars);
        let i = p.var_index(name).unwrap_or_else(|| panic!("unknown variable {name}"));
        let mut m = Monomial::one(p.vars.len());
        m.0[i] = 1;
        p.terms.insert(m, C::one());
        p
    }

    /// Convenience: all variables of a list as polynomials over that list.
    pub fn vars_of<S: AsRef<str>>(vars: &[S]) -> Vec<Self> {
        vars.iter().map(|v| Self::var(vars, v.as_ref())).collect()
    }

    pub fn from_terms<S: AsRef<str>, I>(vars: &[S], terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, C)>,
    {
        let declared: Vec<&str> = vars.iter().map(|s| s.as_ref()).collect();
        let mut p = Self::zero(&declared);
        let perm: Vec<usize> = declared.iter().map(|v| p.var_index(v).unwrap()).collect();
        for (e, c) in terms {
            assert_eq!(e.len(), declared.len(), "exponent vector length");
            let mut m = Monomial::one(p.vars.len());
            for (i, x) in e.into_iter().enumerate() {
                m.0[perm[i]] += x;
            }
            p.add_term(m, c);
        }
        p
    }

    pub fn vars(&self) -> &[String] {
        &self.vars
    }

    pub fn var_index(&self, name: &str) -> Option<usize> {
        self.vars.iter().position(|v| v == name)
    }

    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (&Monomial, &C)> + ExactSizeIterator {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|m| m.degree() == 0)
    }

    pub fn constant_term(&self) -> C {
        self.terms.get(&Monomial::one(self.vars.len())).cloned().unwrap_or_else(C::zero)
    }

    /// Coefficient of the monomial given as `(name, exponent)` pairs.
    pub fn coeff_of(&self, powers: &[(&str, u32)]) -> C {
        let mut m = Monomial::one(self.vars.len());
        for (name, e) in powers {
            match self.var_index(name) {
                Some(i) => m.0[i] += e,
                None if *e == 0 => {}
                None => return C::zero(),
            }
        }
        self.terms.get(&m).cloned().unwrap_or_else(C::zero)
    }

    pub fn total_degree(&self) -> u32 {
        self.terms.keys().map(|m| m.degree()).max().unwrap_or(0)
    }

    pub fn degree_in(&self, name: &str) -> u32 {
        match self.var_index(name) {
            Some(i) => self.terms.keys().map(|m| m.0[i]).max().unwrap_or(0),
            None => 0,
        }
    }

    /// Variables that actually occur.
    pub fn used_vars(&self) -> Vec<String> {
        (0..self.vars.len())
            .filter(|&i| self.terms.keys().any(|m| m.0[i] > 0))
            .map(|i| self.vars[i].clone())
            .collect()
    }

    pub fn leading_term(&self) -> Option<(&Monomial, &C)> {
        self.terms.iter().next_back()
    }

    fn add_term(&mut self, m: Monomial, c: C) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += &c;
                if e.get().is_zero() {
                    e.remove();
                }
            }
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
        }
    }

    /// Re-embed into a variable list that contains every used variable.
    pub fn with_vars(&self, vars: &Arc<[String]>) -> Self {
        if &self.vars == vars {
            return self.clone();
        }
        let pos: Vec<Option<usize>> =
            self.vars.iter().map(|v| vars.iter().position(|w| w == v)).collect();
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let mut e = Monomial::one(vars.len());
            for (i, &x) in m.0.iter().enumerate() {
                if x == 0 {
                    continue;
                }
                match pos[i] {
                    Some(j) => e.0[j] = x,
                    None => panic!("variable {} is used but absent from target list", self.vars[i]),
                }
            }
            terms.insert(e, c.clone());
        }
        MultiPoly { vars: vars.clone(), terms }
    }

    pub fn with_var_names<S: AsRef<str>>(&self, names: &[S]) -> Self {
        self.with_vars(&canonical_vars(names.iter().map(|s| s.as_ref())))
    }

    /// Drop variables that do not occur.
    pub fn trimmed(&self) -> Self {
        self.with_var_names(&self.used_vars())
    }

    pub fn add(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            let (a, b) = align(self, other);
            return a.add(&b);
        }
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), -c.clone())).collect(),
        }
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return self.zero_like();
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(m, c)| (m.clone(), c.mul_ref(k))).collect(),
        }
    }

    pub fn scale_int(&self, k: i64) -> Self {
        self.scale(&C::from_int(k))
    }

    pub fn add_constant(&self, c: &C) -> Self {
        let mut out = self.clone();
        out.add_term(Monomial::one(self.vars.len()), c.clone());
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.vars != other.vars {
            let (a, b) = align(self, other);
            return a.mul(&b);
        }
        if self.is_zero() || other.is_zero() {
            return self.zero_like();
        }
        let mut acc: HashMap<Monomial, C> = HashMap::with_capacity(self.len() * other.len() / 2 + 1);
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                let prod = c1.mul_ref(c2);
                match acc.entry(m1.mul(m2)) {
                    Entry::Occupied(mut e) => *e.get_mut() += &prod,
                    Entry::Vacant(e) => {
                        e.insert(prod);
                    }
                }
            }
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: acc.into_iter().filter(|(_, c)| !c.is_zero()).collect(),
        }
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = self.one_like();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, name: &str) -> Self {
        let Some(i) = self.var_index(name) else {
            return self.zero_like();
        };
        let mut out = self.zero_like();
        for (m, c) in &self.terms {
            if m.0[i] == 0 {
                continue;
            }
            let mut e = m.clone();
            e.0[i] -= 1;
            out.add_term(e, c.mul_ref(&C::from_int(i64::from(m.0[i]))));
        }
        out
    }

    /// Coefficients of `name^0, name^1, ...` as polynomials in the other variables.
    pub fn coefficients_in(&self, name: &str) -> Vec<Self> {
        let rest: Vec<String> = self.vars.iter().filter(|v| *v != name).cloned().collect();
        let rest_arc: Arc<[String]> = rest.into();
        let Some(i) = self.var_index(name) else {
            return vec![self.with_vars(&rest_arc)];
        };
        let deg = self.degree_in(name) as usize;
        let mut out: Vec<Self> = (0..=deg)
            .map(|_| MultiPoly { vars: rest_arc.clone(), terms: BTreeMap::new() })
            .collect();
        for (m, c) in &self.terms {
            let mut e = m.0.clone();
            let k = e.remove(i) as usize;
            out[k].terms.insert(Monomial(e), c.clone());
        }
        out
    }

    /// Coefficient of `name^0` after leading-term extraction: `(degree, leading coefficient)`.
    pub fn leading_coefficient_in(&self, name: &str) -> (u32, Self) {
        let coeffs = self.coefficients_in(name);
        let d = coeffs.len() as u32 - 1;
        (d, coeffs.into_iter().last().unwrap())
    }

    /// Inverse of [`coefficients_in`](Self::coefficients_in).
    pub fn from_coefficients_in(coeffs: &[Self], name: &str) -> Self {
        let mut acc: Option<Self> = None;
        for (k, c) in coeffs.iter().enumerate() {
            let mut vars: Vec<String> = c.vars.to_vec();
            vars.push(name.to_string());
            let x = Self::var(&vars, name).pow(k as u32);
            let term = c.with_var_names(&vars).mul(&x);
            acc = Some(match acc {
                Some(a) => a.add(&term),
                None => term,
            });
        }
        acc.unwrap_or_else(|| Self::zero(&[name]))
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D) -> MultiPoly<D> {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(m, c)| (m.clone(), f(c)))
                .filter(|(_, c)| !c.is_zero())
                .collect(),
        }
    }

    pub fn try_map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> Option<D>) -> Option<MultiPoly<D>> {
        let mut terms = BTreeMap::new();
        for (m, c) in &self.terms {
            let d = f(c)?;
            if !d.is_zero() {
                terms.insert(m.clone(), d);
            }
        }
        Some(MultiPoly { vars: self.vars.clone(), terms })
    }

    /// Rename variables; the result is re-sorted into the global order.
    pub fn rename(&self, pairs: &[(&str, &str)]) -> Self {
        let renamed: Vec<String> = self
            .vars
            .iter()
            .map(|v| {
                pairs.iter().find(|(a, _)| a == v).map(|(_, b)| b.to_string()).unwrap_or_else(|| v.clone())
            })
            .collect();
        let mut out = MultiPoly::zero(&renamed);
        let pos: Vec<usize> = renamed.iter().map(|v| out.var_index(v).unwrap()).collect();
        for (m, c) in &self.terms {
            let mut e = Monomial::one(out.vars.len());
            for (i, &x) in m.0.iter().enumerate() {
                e.0[pos[i]] += x;
            }
            out.add_term(e, c.clone());
        }
        out
    }

    /// Simultaneous substitution; unbound variables pass through unchanged.
    pub fn substitute(&self, bindings: &[(&str, &MultiPoly<C>)]) -> Self {
        let mut names: Vec<String> = Vec::new();
        for (i, v) in self.vars.iter().enumerate() {
            if !bindings.iter().any(|(b, _)| b == v) && self.terms.keys().any(|m| m.0[i] > 0) {
                names.push(v.clone());
            }
        }
        for (_, p) in bindings {
            names.extend(p.vars.iter().cloned());
        }
        let vars = canonical_vars(&names);
        let images: Vec<MultiPoly<C>> = self
            .vars
            .iter()
            .map(|v| match bindings.iter().find(|(b, _)| b == v) {
                Some((_, p)) => p.with_vars(&vars),
                None if vars.contains(v) => MultiPoly::var(&vars, v),
                None => MultiPoly { vars: vars.clone(), terms: BTreeMap::new() },
            })
            .collect();
        let terms: Vec<(&Monomial, &C)> = self.terms.iter().collect();
        let zero = MultiPoly { vars: vars.clone(), terms: BTreeMap::new() };
        let mut cache: Vec<Vec<MultiPoly<C>>> = vec![Vec::new(); images.len()];
        horner_substitute(&terms, 0, &images, &zero, &mut cache)
    }

    /// Positional substitution: the i-th variable (global order) maps to `images[i]`.
    pub fn compose(&self, images: &[MultiPoly<C>]) -> Self {
        assert_eq!(images.len(), self.vars.len(), "one image per variable");
        let names: Vec<String> = self.vars.to_vec();
        let bindings: Vec<(&str, &MultiPoly<C>)> =
            names.iter().map(|s| s.as_str()).zip(images.iter()).collect();
        self.substitute(&bindings)
    }

    /// Exact evaluation; `point` follows [`vars`](Self::vars).
    pub fn evaluate(&self, point: &[C]) -> C {
        assert_eq!(point.len(), self.vars.len(), "point arity");
        let mut acc = C::zero();
        for (m, c) in &self.terms {
            let mut t = c.clone();
            for (x, &e) in point.iter().zip(m.0.iter()) {
                for _ in 0..e {
                    t *= x;
                }
            }
            acc += &t;
        }
        acc
    }

    /// Exact evaluation at named values; missing names are an error.
    pub fn evaluate_named(&self, values: &[(&str, C)]) -> Result<C, AlgebraError> {
        let point: Result<Vec<C>, AlgebraError> = self
            .vars
            .iter()
            .map(|v| {
                values
                    .iter()
                    .find(|(n, _)| n == v)
                    .map(|(_, c)| c.clone())
                    .ok_or_else(|| AlgebraError::Malformed(format!("no value for {v}")))
            })
            .collect();
        Ok(self.evaluate(&point?))
    }

    /// Horner-style floating point evaluation; `point` follows [`vars`](Self::vars).
    pub fn evaluate_complex<F: Float>(&self, point: &[Complex<F>]) -> Complex<F> {
        assert_eq!(point.len(), self.vars.len(), "point arity");
        let terms: Vec<(&Monomial, Complex<F>)> =
            self.terms.iter().map(|(m, c)| (m, c.to_complex::<F>())).collect();
        horner_complex(&terms, 0, point)
    }

    /// Floating point evaluation at named values; missing names are an error.
    pub fn evaluate_named_complex<F: Float>(&self, values: &[(&str, Complex<F>)]) -> Result<Complex<F>, AlgebraError> {
        let point: Result<Vec<Complex<F>>, AlgebraError> = self
            .vars
            .iter()
            .map(|v| {
                values
                    .iter()
                    .find(|(n, _)| n == v)
                    .map(|(_, c)| *c)
                    .ok_or_else(|| AlgebraError::Malformed(format!("no value for {v}")))
            })
            .collect();
        Ok(self.evaluate_complex(&point?))
    }

    /// Divide by a nonzero scalar.
    pub fn div_scalar(&self, k: &C) -> Self {
        let inv = k.inverse().expect("division by zero scalar");
        self.scale(&inv)
    }

    /// Quotient under single-divisor multivariate division, or `None` when
    /// the remainder is nonzero.
    pub fn exact_divide(&self, den: &Self) -> Option<Self> {
        assert!(!den.is_zero(), "division by the zero polynomial");
        if self.vars != den.vars {
            let (a, b) = align(self, den);
            return a.exact_divide(&b);
        }
        if den.is_constant() {
            return Some(self.div_scalar(&den.constant_term()));
        }
        let (lm, lc) = den.leading_term().map(|(m, c)| (m.clone(), c.clone())).unwrap();
        let inv = lc.inverse().expect("nonzero leading coefficient");
        let mut rem = self.terms.clone();
        let mut quot: BTreeMap<Monomial, C> = BTreeMap::new();
        while let Some((m, c)) = rem.pop_last() {
            let q = m.div(&lm)?;
            let qc = c.mul_ref(&inv);
            for (dm, dc) in den.terms.iter().rev().skip(1) {
                let mm = q.mul(dm);
                let prod = qc.mul_ref(dc);
                match rem.entry(mm) {
                    std::collections::btree_map::Entry::Occupied(mut e) => {
                        *e.get_mut() -= &prod;
                        if e.get().is_zero() {
                            e.remove();
                        }
                    }
                    std::collections::btree_map::Entry::Vacant(e) => {
                        e.insert(-prod);
                    }
                }
            }
            quot.insert(q, qc);
        }
        Some(MultiPoly { vars: self.vars.clone(), terms: quot })
    }

    /// Split into parts that are homogeneous for every grading; each grading
    /// assigns a weight to every variable (following [`vars`](Self::vars)).
    pub fn graded_parts(&self, gradings: &[Vec<u32>]) -> BTreeMap<Vec<u32>, Self> {
        let mut out: BTreeMap<Vec<u32>, Self> = BTreeMap::new();
        for (m, c) in &self.terms {
            let key: Vec<u32> =
                gradings.iter().map(|w| w.iter().zip(m.0.iter()).map(|(a, b)| a * b).sum()).collect();
            out.entry(key).or_insert_with(|| self.zero_like()).terms.insert(m.clone(), c.clone());
        }
        out
    }

    /// True when only even powers of `name` occur.
    pub fn is_even_in(&self, name: &str) -> bool {
        match self.var_index(name) {
            Some(i) => self.terms.keys().all(|m| m.0[i] % 2 == 0),
            None => true,
        }
    }

    /// For a polynomial even in `name`, replace `name^2` by `new_name`.
    pub fn halve_even(&self, name: &str, new_name: &str) -> Option<Self> {
        if !self.is_even_in(name) {
            return None;
        }
        let Some(i) = self.var_index(name) else {
            return Some(self.clone());
        };
        let mut halved = self.clone();
        let terms: BTreeMap<Monomial, C> = self
            .terms
            .iter()
            .map(|(m, c)| {
                let mut e = m.clone();
                e.0[i] /= 2;
                (e, c.clone())
            })
            .collect();
        halved.terms = terms;
        Some(halved.rename(&[(name, new_name)]))
    }

    /// Least common multiple of coefficient denominators.
    pub fn common_denominator(&self) -> num_bigint::BigInt {
        use num_integer::Integer;
        self.terms.values().fold(num_bigint::BigInt::one(), |acc, c| acc.lcm(&c.denominator()))
    }

    pub fn is_integral(&self) -> bool {
        self.terms.values().all(|c| c.is_integral())
    }
}

fn horner_substitute<C: Scalar>(
    terms: &[(&Monomial, &C)],
    var: usize,
    images: &[MultiPoly<C>],
    zero: &MultiPoly<C>,
    cache: &mut Vec<Vec<MultiPoly<C>>>,
) -> MultiPoly<C> {
    if terms.is_empty() {
        return zero.clone();
    }
    if var == images.len() {
        let mut c = C::zero();
        for (_, k) in terms {
            c += *k;
        }
        return zero.constant_like(c);
    }
    let mut groups: BTreeMap<u32, Vec<(&Monomial, &C)>> = BTreeMap::new();
    for t in terms {
        groups.entry(t.0 .0[var]).or_default().push(*t);
    }
    let mut acc: Option<MultiPoly<C>> = None;
    let mut prev = 0u32;
    for (&e, group) in groups.iter().rev() {
        let inner = horner_substitute(group, var + 1, images, zero, cache);
        acc = Some(match acc {
            None => inner,
            Some(a) => a.mul(&power_cached(images, var, prev - e, cache)).add(&inner),
        });
        prev = e;
    }
    let acc = acc.unwrap();
    if prev > 0 {
        acc.mul(&power_cached(images, var, prev, cache))
    } else {
        acc
    }
}

fn power_cached<C: Scalar>(
    images: &[MultiPoly<C>],
    var: usize,
    e: u32,
    cache: &mut Vec<Vec<MultiPoly<C>>>,
) -> MultiPoly<C> {
    let table = &mut cache[var];
    if table.is_empty() {
        table.push(images[var].one_like());
    }
    while table.len() <= e as usize {
        let next = table.last().unwrap().mul(&images[var]);
        table.push(next);
    }
    table[e as usize].clone()
}

fn horner_complex<F: Float>(terms: &[(&Monomial, Complex<F>)], var: usize, point: &[Complex<F>]) -> Complex<F> {
    if var == point.len() {
        return terms.iter().fold(Complex::new(F::zero(), F::zero()), |a, t| a + t.1);
    }
    let mut groups: BTreeMap<u32, Vec<(&Monomial, Complex<F>)>> = BTreeMap::new();
    for t in terms {
        groups.entry(t.0 .0[var]).or_default().push(*t);
    }
    let x = point[var];
    let mut acc = Complex::new(F::zero(), F::zero());
    let mut prev: Option<u32> = None;
    for (&e, group) in groups.iter().rev() {
        let inner = horner_complex(group, var + 1, point);
        acc = match prev {
            None => inner,
            Some(p) => acc * x.powu(p - e) + inner,
        };
        prev = Some(e);
    }
    match prev {
        Some(p) if p > 0 => acc * x.powu(p),
        _ => acc,
    }
}

impl<C: Scalar> std::ops::Add for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn add(self, rhs: Self) -> MultiPoly<C> {
        MultiPoly::add(self, rhs)
    }
}

impl<C: Scalar> std::ops::Sub for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn sub(self, rhs: Self) -> MultiPoly<C> {
        MultiPoly::sub(self, rhs)
    }
}

impl<C: Scalar> std::ops::Mul for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn mul(self, rhs: Self) -> MultiPoly<C> {
        MultiPoly::mul(self, rhs)
    }
}

impl<C: Scalar> std::ops::Neg for &MultiPoly<C> {
    type Output = MultiPoly<C>;
    fn neg(self) -> MultiPoly<C> {
        MultiPoly::neg(self)
    }
}

/// Precompiled nested-Horner evaluator for repeated floating point use.
#[derive(Clone, Debug)]
pub enum HornerTree<F> {
    Leaf(Complex<F>),
    Node { var: usize, branches: Vec<(u32, HornerTree<F>)> },
}

impl<F: Float> HornerTree<F> {
    pub fn compile<C: Scalar>(p: &MultiPoly<C>) -> Self {
        let terms: Vec<(&Monomial, Complex<F>)> = p.terms.iter().map(|(m, c)| (m, c.to_complex::<F>())).collect();
        Self::build(&terms, 0, p.vars.len())
    }

    fn build(terms: &[(&Monomial, Complex<F>)], var: usize, n: usize) -> Self {
        if var == n || terms.is_empty() {
            return HornerTree::Leaf(terms.iter().fold(Complex::new(F::zero(), F::zero()), |a, t| a + t.1));
        }
        let mut groups: BTreeMap<u32, Vec<(&Monomial, Complex<F>)>> = BTreeMap::new();
        for t in terms {
            groups.entry(t.0 .0[var]).or_default().push(*t);
        }
        if groups.len() == 1 && groups.contains_key(&0) {
            return Self::build(terms, var + 1, n);
        }
        let branches = groups.iter().rev().map(|(&e, g)| (e, Self::build(g, var + 1, n))).collect();
        HornerTree::Node { var, branches }
    }

    pub fn eval(&self, point: &[Complex<F>]) -> Complex<F> {
        match self {
            HornerTree::Leaf(c) => *c,
            HornerTree::Node { var, branches } => {
                let x = point[*var];
                let mut acc = Complex::new(F::zero(), F::zero());
                let mut prev: Option<u32> = None;
                for (e, sub) in branches {
                    let inner = sub.eval(point);
                    acc = match prev {
                        None => inner,
                        Some(p) => acc * x.powu(p - e) + inner,
                    };
                    prev = Some(*e);
                }
                match prev {
                    Some(p) if p > 0 => acc * x.powu(p),
                    _ => acc,
                }
            }
        }
    }
}
