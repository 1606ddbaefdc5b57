//! Fundamental invariants of D3 acting on R^2 and D4 acting on R^3,
//! rewriting invariant polynomials in them, the induced maps `g_d`, Molien
//! series and the change-of-generators conjugacy.

use std::collections::{BTreeMap, HashMap};
use std::sync::{Arc, Mutex, OnceLock};

use num_complex::Complex;
use num_traits::{One, Zero};
use rand::Rng;

use crate::algebra::{remainder_in, solve_exact_linear, CycRational, LinearError, Monomial, PolyMap, Scalar};
use crate::chebyshev::{endo_vars, lift, real_form, real_vars, DEFAULT_DEGREE_CAP};
use crate::error::AlgebraError;
use crate::report::Report;
use crate::{qpoly_in, rat, CycPoly, QMap, QPoly, Rational};

/// Generators of an invariant ring together with the gradings used to cut
/// rewriting problems into small linear systems.
#[derive(Debug, Clone, PartialEq)]
pub struct FundamentalSystem {
    pub n: usize,
    pub x_vars: Vec<String>,
    pub names: Vec<String>,
    pub generators: Vec<QPoly>,
    /// Each grading assigns a weight to every x-variable.
    pub gradings: Vec<Vec<u32>>,
    /// `weights[g][k]`: degree of generator `g` in grading `k`.
    pub weights: Vec<Vec<u32>>,
    /// Index of the generator allowed only to exponent 0 or 1.
    pub module_var: Option<usize>,
    /// Replacement for the square of the module generator.
    pub square_rule: Option<QPoly>,
}

impl FundamentalSystem {
    pub fn new(
        n: usize,
        names: &[&str],
        generators: Vec<QPoly>,
        gradings: Vec<Vec<u32>>,
        module: Option<(&str, QPoly)>,
    ) -> Result<Self, AlgebraError> {
        let x_vars: Vec<String> = real_vars(n)?.iter().map(|s| s.to_string()).collect();
        if names.len() != generators.len() {
            return Err(AlgebraError::Arity { expected: names.len(), got: generators.len() });
        }
        let mut gens = Vec::with_capacity(generators.len());
        let mut weights = Vec::with_capacity(generators.len());
        for (name, g) in names.iter().zip(generators) {
            check_vars(&g, &x_vars)?;
            let g = g.with_var_names(&x_vars);
            let parts = g.graded_parts(&gradings);
            if parts.len() != 1 {
                return Err(AlgebraError::Malformed(format!("generator {name} is not homogeneous")));
            }
            let w = parts.into_keys().next().unwrap();
            if w.iter().all(|&x| x == 0) {
                return Err(AlgebraError::Malformed(format!("generator {name} has weight zero")));
            }
            gens.push(g);
            weights.push(w);
        }
        let names_owned: Vec<String> = names.iter().map(|s| s.to_string()).collect();
        let (module_var, square_rule) = match module {
            None => (None, None),
            Some((m, rule)) => {
                let idx = names
                    .iter()
                    .position(|s| *s == m)
                    .ok_or_else(|| AlgebraError::Malformed(format!("unknown module generator {m}")))?;
                check_vars(&rule, &names_owned)?;
                if rule.degree_in(m) > 0 {
                    return Err(AlgebraError::Malformed("square rule mentions the module generator".into()));
                }
                (Some(idx), Some(rule.with_var_names(&names_owned)))
            }
        };
        Ok(FundamentalSystem {
            n,
            x_vars,
            names: names_owned,
            generators: gens,
            gradings,
            weights,
            module_var,
            square_rule,
        })
    }

    /// `p = x^2+y^2`, `q = x^3-3xy^2`.
    pub fn d3() -> Self {
        let xv = ["x", "y"];
        Self::new(2, &["p", "q"], vec![qpoly_in("x^2 + y^2", &xv), qpoly_in("x^3 - 3x y^2", &xv)], vec![vec![1, 1]], None)
            .expect("D3 system")
    }

    /// `p = x^2+y^2`, `q = z^2`, `r = z(x^2-y^2)`, `s = (x^2-y^2)^2`, with `r^2 = qs`.
    pub fn d4() -> Self {
        let xv = ["x", "y", "z"];
        Self::new(
            3,
            &["p", "q", "r", "s"],
            vec![
                qpoly_in("x^2 + y^2", &xv),
                qpoly_in("z^2", &xv),
                qpoly_in("z (x^2 - y^2)", &xv),
                qpoly_in("(x^2 - y^2)^2", &xv),
            ],
            vec![vec![1, 1, 0], vec![0, 0, 1]],
            Some(("r", qpoly_in("q s", &["p", "q", "r", "s"]))),
        )
        .expect("D4 system")
    }

    pub fn for_dimension(n: usize) -> Result<Self, AlgebraError> {
        match n {
            2 => Ok(Self::d3()),
            3 => Ok(Self::d4()),
            _ => Err(AlgebraError::UnsupportedDimension(n)),
        }
    }

    pub fn name_refs(&self) -> Vec<&str> {
        self.names.iter().map(|s| s.as_str()).collect()
    }

    /// Total x-degree of each generator.
    pub fn degrees(&self) -> Vec<u32> {
        self.generators.iter().map(|g| g.total_degree()).collect()
    }

    /// `m^2 - rule` for the module generator `m`.
    pub fn syzygy(&self) -> Option<QPoly> {
        let idx = self.module_var?;
        let m = QPoly::var(&self.names, &self.names[idx]);
        Some(m.pow(2).sub(self.square_rule.as_ref()?))
    }

    /// Reduce so that the module generator occurs to exponent at most one.
    pub fn normal_form(&self, f: &QPoly) -> QPoly {
        let (Some(idx), Some(rule)) = (self.module_var, self.square_rule.as_ref()) else {
            return f.clone();
        };
        let m_name = &self.names[idx];
        let m = QPoly::var(&self.names, m_name);
        let mut out = QPoly::zero(&self.names);
        let mut rule_pow = QPoly::constant(&self.names, Rational::one());
        for (k, c) in f.coefficients_in(m_name).iter().enumerate() {
            if k >= 2 && k % 2 == 0 {
                rule_pow = rule_pow.mul(rule);
            }
            if c.is_zero() {
                continue;
            }
            let mut term = c.mul(&rule_pow);
            if k % 2 == 1 {
                term = term.mul(&m);
            }
            out = out.add(&term);
        }
        out.with_var_names(&self.names)
    }

    /// Substitute the generators for their names.
    pub fn expand(&self, f: &QPoly) -> QPoly {
        let bindings: Vec<(&str, &QPoly)> = self.names.iter().map(|s| s.as_str()).zip(self.generators.iter()).collect();
        f.substitute(&bindings).with_var_names(&self.x_vars)
    }

    fn candidates(&self, key: &[u32]) -> Vec<Vec<u32>> {
        let mut out = Vec::new();
        let mut cur = vec![0; self.generators.len()];
        self.enumerate(0, key.to_vec(), &mut cur, &mut out);
        out
    }

    fn enumerate(&self, g: usize, rem: Vec<u32>, cur: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if g == self.generators.len() {
            if rem.iter().all(|&r| r == 0) {
                out.push(cur.clone());
            }
            return;
        }
        let w = &self.weights[g];
        let mut max = u32::MAX;
        for (k, &wk) in w.iter().enumerate() {
            if wk > 0 {
                max = max.min(rem[k] / wk);
            }
        }
        if self.module_var == Some(g) {
            max = max.min(1);
        }
        for e in 0..=max {
            cur[g] = e;
            let next: Vec<u32> = rem.iter().zip(w).map(|(r, wk)| r - e * wk).collect();
            self.enumerate(g + 1, next, cur, out);
        }
        cur[g] = 0;
    }
}

fn check_vars(p: &QPoly, allowed: &[String]) -> Result<(), AlgebraError> {
    match p.used_vars().into_iter().find(|v| !allowed.contains(v)) {
        Some(v) => Err(AlgebraError::Malformed(format!("unexpected variable {v}"))),
        None => Ok(()),
    }
}

struct PowerCache<'a> {
    sys: &'a FundamentalSystem,
    powers: HashMap<(usize, u32), QPoly>,
}

impl PowerCache<'_> {
    fn power(&mut self, g: usize, e: u32) -> QPoly {
        if e == 0 {
            return QPoly::constant(&self.sys.x_vars, Rational::one());
        }
        if let Some(p) = self.powers.get(&(g, e)) {
            return p.clone();
        }
        let p = self.power(g, e - 1).mul(&self.sys.generators[g]);
        self.powers.insert((g, e), p.clone());
        p
    }

    fn monomial(&mut self, exps: &[u32]) -> QPoly {
        let mut acc = QPoly::constant(&self.sys.x_vars, Rational::one());
        for (g, &e) in exps.iter().enumerate() {
            if e > 0 {
                acc = acc.mul(&self.power(g, e));
            }
        }
        acc
    }
}

/// Express an invariant `h` in the generators; the result uses the module
/// generator to exponent at most one, which makes it unique.
pub fn rewrite_in_invariants(h: &QPoly, sys: &FundamentalSystem) -> Result<QPoly, AlgebraError> {
    check_vars(h, &sys.x_vars)?;
    let h = h.with_var_names(&sys.x_vars);
    let mut cache = PowerCache { sys, powers: HashMap::new() };
    let mut out = QPoly::zero(&sys.names);
    for (key, part) in h.graded_parts(&sys.gradings) {
        let cands = sys.candidates(&key);
        if cands.is_empty() {
            return Err(AlgebraError::NotInvariant(format!("no generator monomial has weight {key:?}")));
        }
        let expansions: Vec<QPoly> = cands.iter().map(|e| cache.monomial(e)).collect();
        let mut rows: BTreeMap<Monomial, usize> = BTreeMap::new();
        for p in expansions.iter().chain(std::iter::once(&part)) {
            for (m, _) in p.terms() {
                let next = rows.len();
                rows.entry(m.clone()).or_insert(next);
            }
        }
        let mut a = vec![vec![Rational::zero(); cands.len()]; rows.len()];
        let mut b = vec![Rational::zero(); rows.len()];
        for (j, p) in expansions.iter().enumerate() {
            for (m, c) in p.terms() {
                a[rows[m]][j] = c.clone();
            }
        }
        for (m, c) in part.terms() {
            b[rows[m]] = c.clone();
        }
        let x = solve_exact_linear(&a, &b).map_err(|e| match e {
            LinearError::Inconsistent => AlgebraError::NotInvariant(format!("weight {key:?} component")),
            other => AlgebraError::Malformed(other.to_string()),
        })?;
        let terms: Vec<(Vec<u32>, Rational)> =
            cands.into_iter().zip(x).filter(|(_, c)| !c.is_zero()).collect();
        out = out.add(&QPoly::from_terms(&sys.names, terms));
    }
    Ok(out)
}

/// Checks every generator against the group generators, acting as
/// `z_j -> zeta^j z_j` and `z_j -> z_{n+1-j}` in the complex coordinates.
pub fn verify_group_invariance(sys: &FundamentalSystem) -> Result<Report, AlgebraError> {
    let n = sys.n;
    let zv = endo_vars(n)?;
    let i = CycRational::zeta(4).unwrap();
    let half = CycRational::rational(&rat(1, 2));
    let z1 = CycPoly::var(zv, "z1");
    let zn = CycPoly::var(zv, zv[n - 1]);
    let x = z1.add(&zn).scale(&half);
    let y = z1.sub(&zn).scale(&half).scale(&-i.clone());
    let mut images = vec![x, y];
    if n == 3 {
        images.push(CycPoly::var(zv, "z2"));
    }
    let bindings: Vec<(&str, &CycPoly)> = sys.x_vars.iter().map(|s| s.as_str()).zip(images.iter()).collect();
    let k = (n + 1) as u8;
    let zeta = CycRational::zeta(k).unwrap();
    let mut rotated = Vec::new();
    let mut zp = CycRational::one();
    for v in zv {
        zp *= &zeta;
        rotated.push(CycPoly::var(zv, v).scale(&zp));
    }
    let rot_bind: Vec<(&str, &CycPoly)> = zv.iter().copied().zip(rotated.iter()).collect();
    let last = zv[n - 1];
    let mut r = Report::new(format!("group invariance n={n}"));
    for (name, g) in sys.names.iter().zip(&sys.generators) {
        let in_z = lift(g).substitute(&bindings);
        let rational = in_z.try_map_coeffs(|c| c.to_rational());
        let Some(rational) = rational else {
            r.check(format!("{name} rational in z"), false, "coefficient outside Q");
            continue;
        };
        let lifted = lift(&rational);
        r.check(format!("{name} rotation"), lifted.substitute(&rot_bind) == lifted, "");
        let swapped = rational.rename(&[("z1", last), (last, "z1")]);
        r.check(format!("{name} reversal"), swapped == rational, "");
    }
    Ok(r)
}

/// `g_d` on the orbit variety, in the generator names.
#[derive(Debug, Clone, PartialEq)]
pub struct InducedMorphism {
    pub n: usize,
    pub d: u32,
    pub map: QMap,
}

type InducedCache = Mutex<HashMap<(usize, u32), Arc<InducedMorphism>>>;

fn induced_cache() -> &'static InducedCache {
    static CACHE: OnceLock<InducedCache> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

fn compute_induced(n: usize, d: u32) -> Result<InducedMorphism, AlgebraError> {
    let sys = FundamentalSystem::for_dimension(n)?;
    let f = real_form(n, d)?;
    let bindings: Vec<(&str, &QPoly)> =
        sys.x_vars.iter().map(|s| s.as_str()).zip(f.map.components().iter()).collect();
    let mut comps = Vec::with_capacity(sys.generators.len());
    for (name, g) in sys.names.iter().zip(&sys.generators) {
        let image = g.substitute(&bindings);
        let c = rewrite_in_invariants(&image, &sys)?;
        if !c.is_integral() {
            return Err(AlgebraError::NonIntegral(format!("component {name} of g_{d}")));
        }
        comps.push(c);
    }
    Ok(InducedMorphism { n, d, map: PolyMap::new(&sys.names, comps)? })
}

/// Memoised; results are shared between threads.
pub fn induced_morphism(n: usize, d: u32) -> Result<Arc<InducedMorphism>, AlgebraError> {
    induced_morphism_capped(n, d, DEFAULT_DEGREE_CAP)
}

pub fn induced_morphism_capped(n: usize, d: u32, cap: u32) -> Result<Arc<InducedMorphism>, AlgebraError> {
    if d > cap {
        return Err(AlgebraError::DegreeCapExceeded { requested: d as usize, cap: cap as usize });
    }
    if let Some(hit) = induced_cache().lock().unwrap().get(&(n, d)) {
        return Ok(hit.clone());
    }
    let g = Arc::new(compute_induced(n, d)?);
    induced_cache().lock().unwrap().insert((n, d), g.clone());
    Ok(g)
}

/// `r^2 -> qs` reduction in `p, q, r, s`.
pub fn syzygy_normal_form(f: &QPoly) -> QPoly {
    FundamentalSystem::d4().normal_form(f)
}

/// Component-wise normal-form equality of maps into the orbit variety.
pub fn maps_agree(sys: &FundamentalSystem, a: &QMap, b: &QMap) -> bool {
    a.arity_out() == b.arity_out()
        && a.components().iter().zip(b.components()).all(|(x, y)| sys.normal_form(&x.sub(y)).is_zero())
}

/// `g_e ∘ g_d = g_{de}`, modulo the syzygy for n=3.
pub fn verify_semigroup_induced(n: usize, e: u32, d: u32, cap: u32) -> Result<Report, AlgebraError> {
    if e * d > cap {
        return Err(AlgebraError::DegreeCapExceeded { requested: (e * d) as usize, cap: cap as usize });
    }
    let sys = FundamentalSystem::for_dimension(n)?;
    let ge = induced_morphism_capped(n, e, cap)?;
    let gd = induced_morphism_capped(n, d, cap)?;
    let gde = induced_morphism_capped(n, e * d, cap)?;
    let composed = ge.map.after(&gd.map)?;
    let mut r = Report::new(format!("induced semigroup n={n}"));
    r.check(format!("g_{e} o g_{d} = g_{}", e * d), maps_agree(&sys, &composed, &gde.map), "");
    Ok(r)
}

/// For n=3: `Q_d S_d - R_d^2` reduces to zero, so `g_d` preserves the orbit variety.
pub fn image_contract(g: &InducedMorphism) -> bool {
    if g.n != 3 {
        return true;
    }
    let c = g.map.components();
    syzygy_normal_form(&c[1].mul(&c[3]).sub(&c[2].pow(2))).is_zero()
}

/// Leading-form checks for n=2 restricted to the cusp and parabola curves.
pub fn head_term_report(d: u32) -> Result<Report, AlgebraError> {
    let g = induced_morphism(2, d)?;
    let pv = ["p", "q"];
    let (pd, qd) = (g.map.component(0), g.map.component(1));
    let p = QPoly::var(&pv, "p");
    let mut r = Report::new(format!("head terms d={d}"));
    let rest = pd.sub(&p.pow(d));
    r.check("P_d = p^d + lower", rest.total_degree() < d || rest.is_zero(), format!("deg {}", rest.total_degree()));
    let two_pow = Rational::from_integer(num_bigint::BigInt::from(2u32).pow(d - 1));
    for (label, curve, lead) in [
        ("cusp", qpoly_in("p^3 - q^2", &pv), Rational::one()),
        ("parabola", qpoly_in("p^2 + 18p - 8q - 27", &pv), two_pow),
    ] {
        let red = remainder_in(qd, &curve, "p")?;
        let top_ok = red.total_degree() <= d;
        let coeff = red.coeff_of(&[("q", d)]);
        // degree-d part other than q^d must be divisible by p
        let others_ok = red.terms().all(|(m, _)| m.degree() < d || m.exps()[0] > 0 || m.exps()[1] == d);
        r.check(
            format!("{label}: Q_d = {} q^d + p H_2 + H_3", lead),
            top_ok && others_ok && coeff == lead,
            format!("q^d coefficient {coeff}"),
        );
    }
    Ok(r)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MolienGroup {
    D3OnR2,
    D4OnR3,
}

fn series_inverse(den: &[i64], order: usize) -> Vec<Rational> {
    let mut c = vec![Rational::zero(); order + 1];
    c[0] = Rational::one();
    for m in 1..=order {
        let mut acc = Rational::zero();
        for (i, &di) in den.iter().enumerate().skip(1) {
            if i <= m && di != 0 {
                acc -= Rational::from_integer(di.into()) * &c[m - i];
            }
        }
        c[m] = acc;
    }
    c
}

fn poly_mul(a: &[i64], b: &[i64]) -> Vec<i64> {
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// `det(1 - tA)` for every group element, built from 2x2 blocks and a
/// possible 1x1 block on `z`.
fn element_denominators(group: MolienGroup) -> Vec<Vec<i64>> {
    let rotation = |trace: i64| vec![1, -trace, 1];
    let reflection = vec![1, 0, -1];
    match group {
        MolienGroup::D3OnR2 => {
            let mut v: Vec<Vec<i64>> = [2, -1, -1].iter().map(|&t| rotation(t)).collect();
            v.extend(std::iter::repeat_n(reflection, 3));
            v
        }
        MolienGroup::D4OnR3 => {
            let mut v = Vec::new();
            for (j, t) in [2, 0, -2, 0].into_iter().enumerate() {
                let sign = if j % 2 == 0 { 1 } else { -1 };
                v.push(poly_mul(&rotation(t), &[1, -sign]));
                v.push(poly_mul(&reflection, &[1, -sign]));
            }
            v
        }
    }
}

/// Hilbert series of the invariant ring to order `order` (at most 64).
pub fn molien_series(group: MolienGroup, order: usize) -> Result<Vec<Rational>, AlgebraError> {
    if order > 64 {
        return Err(AlgebraError::DegreeCapExceeded { requested: order, cap: 64 });
    }
    let dens = element_denominators(group);
    let size = Rational::from_integer((dens.len() as i64).into());
    let mut total = vec![Rational::zero(); order + 1];
    for den in &dens {
        for (t, c) in total.iter_mut().zip(series_inverse(den, order)) {
            *t += c;
        }
    }
    Ok(total.into_iter().map(|c| c / &size).collect())
}

/// Parameters of the change of generators
/// `(p, q, r, s) -> (A(p, q), b r, c s + k p^2 + m pq + n q^2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugacyParams {
    pub a: [[Rational; 2]; 2],
    pub b: Rational,
    pub c: Rational,
    pub k: Rational,
    pub m: Rational,
    pub n: Rational,
}

impl ConjugacyParams {
    pub fn identity() -> Self {
        ConjugacyParams {
            a: [[rat(1, 1), rat(0, 1)], [rat(0, 1), rat(1, 1)]],
            b: rat(1, 1),
            c: rat(1, 1),
            k: rat(0, 1),
            m: rat(0, 1),
            n: rat(0, 1),
        }
    }
}

#[derive(Debug, Clone)]
pub struct ConjugateSystem {
    pub d: u32,
    pub phi: QMap,
    pub phi_inv: QMap,
    /// `φ ∘ g_d ∘ φ⁻¹`, reduced in the transformed coordinates.
    pub g_prime: QMap,
    /// Generators `φ(p, q, r, s)` in x, y, z with the transformed square rule.
    pub system: FundamentalSystem,
    pub report: Report,
}

const PQRS: [&str; 4] = ["p", "q", "r", "s"];

fn phi_components(params: &ConjugacyParams) -> Vec<QPoly> {
    let v = QPoly::vars_of(&PQRS);
    let [[a11, a12], [a21, a22]] = &params.a;
    vec![
        v[0].scale(a11).add(&v[1].scale(a12)),
        v[0].scale(a21).add(&v[1].scale(a22)),
        v[2].scale(&params.b),
        v[3].scale(&params.c)
            .add(&v[0].pow(2).scale(&params.k))
            .add(&v[0].mul(&v[1]).scale(&params.m))
            .add(&v[1].pow(2).scale(&params.n)),
    ]
}

fn phi_inverse_components(params: &ConjugacyParams) -> Result<Vec<QPoly>, AlgebraError> {
    let [[a11, a12], [a21, a22]] = &params.a;
    let det = a11.clone() * a22 - a12.clone() * a21;
    if det.is_zero() || params.b.is_zero() || params.c.is_zero() {
        return Err(AlgebraError::SingularParams("det A, b and c must be nonzero".into()));
    }
    let v = QPoly::vars_of(&PQRS);
    let p = v[0].scale(&(a22.clone() / &det)).sub(&v[1].scale(&(a12.clone() / &det)));
    let q = v[1].scale(&(a11.clone() / &det)).sub(&v[0].scale(&(a21.clone() / &det)));
    let r = v[2].scale(&(Rational::one() / &params.b));
    let correction =
        p.pow(2).scale(&params.k).add(&p.mul(&q).scale(&params.m)).add(&q.pow(2).scale(&params.n));
    let s = v[3].sub(&correction).scale(&(Rational::one() / &params.c));
    Ok(vec![p, q, r, s])
}

/// Conjugate `g_d` (n=3) by a change of generators and verify the result
/// symbolically and at random points of the orbit variety.
pub fn conjugate_system<R: Rng>(params: &ConjugacyParams, d: u32, rng: &mut R) -> Result<ConjugateSystem, AlgebraError> {
    let inv = phi_inverse_components(params)?;
    let phi = PolyMap::new(&PQRS, phi_components(params))?;
    let phi_inv = PolyMap::new(&PQRS, inv.clone())?;
    let base = FundamentalSystem::d4();
    let rule = inv[1].mul(&inv[3]).scale(&(params.b.clone() * &params.b));
    let gens = phi.apply(&base.generators);
    let system = FundamentalSystem::new(3, &PQRS, gens, vec![vec![1, 1, 1]], Some(("r", rule)))?;
    let g = induced_morphism(3, d)?;
    let raw = phi.after(&g.map)?.after(&phi_inv)?;
    let g_prime = PolyMap::new(&PQRS, raw.components().iter().map(|c| system.normal_form(c)).collect())?;

    let mut report = Report::new(format!("conjugacy d={d}"));
    let id = PolyMap::identity(&PQRS);
    report.check("phi o phi_inv = id", phi.after(&phi_inv)? == id, "");
    report.check("phi_inv o phi = id", phi_inv.after(&phi)? == id, "");
    let lhs = phi.after(&g.map)?;
    let rhs = g_prime.after(&phi)?;
    report.check("phi o g_d = g'_d o phi on X_Q", maps_agree(&base, &lhs, &rhs), "r^2 = qs normal form");

    let direct: Result<Vec<QPoly>, AlgebraError> = system
        .generators
        .iter()
        .map(|gen| {
            let f = real_form(3, d)?;
            let bind: Vec<(&str, &QPoly)> =
                system.x_vars.iter().map(|s| s.as_str()).zip(f.map.components().iter()).collect();
            rewrite_in_invariants(&gen.substitute(&bind), &system)
        })
        .collect();
    match direct {
        Ok(direct) => {
            let same = direct.iter().zip(g_prime.components()).all(|(a, b)| a == b);
            report.check("g'_d equals direct rewrite in transformed generators", same, "");
        }
        Err(e) => report.fail("g'_d equals direct rewrite in transformed generators", e),
    }

    let lhs_c = lhs.compile::<f64>();
    let rhs_c = rhs.compile::<f64>();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mut pt: Vec<Complex<f64>> =
            (0..4).map(|_| Complex::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
        pt[2] = (pt[1] * pt[3]).sqrt();
        let a = lhs_c.eval(&pt);
        let b = rhs_c.eval(&pt);
        let scale = a.iter().map(|z| z.norm()).fold(1.0, f64::max);
        for (x, y) in a.iter().zip(&b) {
            worst = worst.max((x - y).norm() / scale);
        }
    }
    report.check("numeric conjugacy at 50 points", worst < 1e-9, format!("max relative residual {worst:.3e}"));
    Ok(ConjugateSystem { d, phi, phi_inv, g_prime, system, report })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qpoly;

    #[test]
    fn rewrite_basics() {
        let sys = FundamentalSystem::d3();
        assert_eq!(rewrite_in_invariants(&qpoly("x^4 + 2x^2 y^2 + y^4"), &sys).unwrap(), qpoly("p^2"));
        assert!(matches!(rewrite_in_invariants(&qpoly("x"), &sys), Err(AlgebraError::NotInvariant(_))));
    }

    #[test]
    fn normal_form_examples() {
        let v = ["p", "q", "r", "s"];
        assert_eq!(syzygy_normal_form(&qpoly_in("r^2", &v)), qpoly_in("q s", &v));
        assert!(syzygy_normal_form(&qpoly_in("r^3 - r q s", &v)).is_zero());
        assert_eq!(syzygy_normal_form(&qpoly_in("p + q", &v)), qpoly_in("p + q", &v));
    }

    #[test]
    fn molien_first_terms() {
        let d3 = molien_series(MolienGroup::D3OnR2, 9).unwrap();
        let want: Vec<Rational> = [1, 0, 1, 1, 1, 1, 2, 1, 2, 2].iter().map(|&x| rat(x, 1)).collect();
        assert_eq!(d3, want);
    }

    #[test]
    fn induced_examples() {
        let pq = ["p", "q"];
        let g2 = induced_morphism(2, 2).unwrap();
        assert_eq!(g2.map.component(0), &qpoly_in("4p + p^2 - 4q", &pq));
        assert_eq!(g2.map.component(1), &qpoly_in("12p^2 - 8q - 6p q + 2q^2 - p^3", &pq));
        let g3 = induced_morphism(2, 3).unwrap();
        assert_eq!(g3.map.component(0), &qpoly_in("9 - 18p + 9p^2 + p^3 + 6q - 6p q", &pq));
        assert_eq!(
            g3.map.component(1),
            &qpoly_in("9p^4 - 3p^3 q - 36p^3 + 27p^2 q + 81p^2 - 18p q^2 - 54p q - 81p + 4q^3 + 18q^2 + 27q + 27", &pq)
        );
        let v = ["p", "q", "r", "s"];
        let g = induced_morphism(3, 2).unwrap();
        let want = [
            "p^2 + 4q - 4r",
            "(q - 2p + 2)^2",
            "(q - 2p + 2)(2s - p^2 - 4r + 4q)",
            "(2s - p^2 - 4r + 4q)^2",
        ];
        for (c, w) in g.map.components().iter().zip(want) {
            assert_eq!(c, &syzygy_normal_form(&qpoly_in(w, &v)), "{w}");
        }
        assert!(image_contract(&g));
    }

    #[test]
    fn invariance_and_molien_d4() {
        assert!(verify_group_invariance(&FundamentalSystem::d3()).unwrap().passed());
        assert!(verify_group_invariance(&FundamentalSystem::d4()).unwrap().passed());
        let d4 = molien_series(MolienGroup::D4OnR3, 9).unwrap();
        let want: Vec<Rational> = [1, 0, 2, 1, 4, 2, 6, 4, 9, 6].iter().map(|&x| rat(x, 1)).collect();
        assert_eq!(d4, want);
    }

    #[test]
    fn head_terms_and_semigroup() {
        for d in 1..=5 {
            let r = head_term_report(d).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert!(verify_semigroup_induced(2, 2, 2, 16).unwrap().passed());
        assert!(verify_semigroup_induced(3, 2, 3, 16).unwrap().passed());
    }

    #[test]
    fn conjugacy_examples() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(0);
        let id = conjugate_system(&ConjugacyParams::identity(), 2, &mut rng).unwrap();
        assert!(id.report.passed(), "{:?}", id.report);
        assert_eq!(id.g_prime, induced_morphism(3, 2).unwrap().map);
        let mut p = ConjugacyParams::identity();
        p.a = [[rat(1, 1), rat(1, 1)], [rat(0, 1), rat(1, 1)]];
        p.k = rat(1, 1);
        p.b = rat(2, 1);
        let c = conjugate_system(&p, 2, &mut rng).unwrap();
        assert!(c.report.passed(), "{:?}", c.report);
    }
}
