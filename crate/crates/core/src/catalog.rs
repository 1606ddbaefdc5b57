//! Invariant subvarieties of the orbit varieties, their parametrizations,
//! and exact checks of how `g_d` acts on them.

use std::sync::OnceLock;

use num_complex::Complex;
use num_traits::One;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::algebra::numeric::scaled_residual;
use crate::algebra::{discriminant, factor_multiplicity, parse_poly, resultant, to_text, PolyMap};
use crate::chebyshev::cheb1_in;
use crate::error::{AlgebraError, LabError, NumericError};
use crate::invariants::{induced_morphism, rewrite_in_invariants, syzygy_normal_form, FundamentalSystem};
use crate::report::Report;
use crate::{qpoly_in, rat, QMap, QPoly, Rational, C64};

pub const CATALOGUE_VERSION: u32 = 1;

const PQ: [&str; 2] = ["p", "q"];
const PQRS: [&str; 4] = ["p", "q", "r", "s"];
const ABC: [&str; 3] = ["a", "b", "c"];

/// How `g_d` acts on the parameters of an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum ParamRule {
    /// No rule is catalogued.
    None,
    /// Every parameter goes to `T_d` of itself.
    Chebyshev,
    /// `t -> T_d(t - c) + c`.
    Shift(i64),
    /// `t -> T_d(sqrt(k t))^2 / k`.
    Square(i64),
}

/// Degrees for which the rule holds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DegreeCondition {
    All,
    Odd,
    PrimeToThree,
}

impl DegreeCondition {
    pub fn holds(self, d: u32) -> bool {
        match self {
            DegreeCondition::All => true,
            DegreeCondition::Odd => d % 2 == 1,
            DegreeCondition::PrimeToThree => !d.is_multiple_of(3),
        }
    }
}

/// Real angle parametrization of the bounded set on an entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum AngleRule {
    /// `(2cos 3α, 2cos β)`.
    Plane,
    /// `(2cos 2α, 2cos(α+β), 2cos γ)`.
    Xq,
    /// `(2cos 2α, 2cos(α+β))`.
    Sa,
    /// `(2cos α, 2cos β)`.
    Sp,
}

impl AngleRule {
    pub fn angle_count(self) -> usize {
        match self {
            AngleRule::Xq => 3,
            _ => 2,
        }
    }

    /// Parameter values for the given angles.
    pub fn params(self, ang: &[f64]) -> Vec<f64> {
        let c2 = |x: f64| 2.0 * x.cos();
        match self {
            AngleRule::Plane => vec![c2(3.0 * ang[0]), c2(ang[1])],
            AngleRule::Xq => vec![c2(2.0 * ang[0]), c2(ang[0] + ang[1]), c2(ang[2])],
            AngleRule::Sa => vec![c2(2.0 * ang[0]), c2(ang[0] + ang[1])],
            AngleRule::Sp => vec![c2(ang[0]), c2(ang[1])],
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VarietyEntry {
    pub name: String,
    pub ambient_dim: usize,
    pub ambient_vars: Vec<String>,
    /// Dimension of the Chebyshev endomorphism whose `g_d` acts here, if any.
    pub orbit_n: Option<usize>,
    pub defining_polys: Vec<QPoly>,
    pub param: QMap,
    pub rule: ParamRule,
    pub rule_degrees: DegreeCondition,
    pub angles: Option<AngleRule>,
    pub notes: String,
}

impl VarietyEntry {
    pub fn param_arity(&self) -> usize {
        self.param.arity_in()
    }

    pub fn param_vars(&self) -> &[String] {
        self.param.source_vars()
    }

    pub fn rule_applies(&self, d: u32) -> bool {
        self.rule != ParamRule::None && self.rule_degrees.holds(d)
    }

    fn ambient_refs(&self) -> Vec<&str> {
        self.ambient_vars.iter().map(|s| s.as_str()).collect()
    }
}

fn fixture_map(source: &[&str], comps: &[&str]) -> QMap {
    let c = comps.iter().map(|t| qpoly_in(t, source)).collect();
    PolyMap::new(source, c).expect("fixture map")
}

fn fixture_polys(vars: &[&str], texts: &[&str]) -> Vec<QPoly> {
    texts.iter().map(|t| qpoly_in(t, vars)).collect()
}

pub const A_H: &str =
    "256 - 192p + 48p^2 - 4p^3 - 128q - 80p q + p^2 q + 16q^2 + 288r + 36p r - 8q r - 108s";

/// The polynomial of the astroid surface written in `x, y, z`.
pub const A_XYZ: &str = "256 - 192x^2 - 60x^4 - 4x^6 - 192y^2 + 312x^2 y^2 - 12x^4 y^2 - 60y^4 - 12x^2 y^4 \
    - 4y^6 + 288x^2 z + 36x^4 z - 288y^2 z - 36y^4 z - 128z^2 - 80x^2 z^2 + x^4 z^2 - 80y^2 z^2 \
    + 2x^2 y^2 z^2 + y^4 z^2 - 8x^2 z^3 + 8y^2 z^3 + 16z^4";

const G_PLANE: [&str; 2] = ["1 + u v + v^2", "(-2 + u^2 + 6v^2 + u v (3 + v^2))/2"];
const G_X: [&str; 4] = [
    "v^2 + u v w + w^2",
    "(u + v w)^2",
    "(u + v w)(2v w + u (v^2 + w^2)/2)",
    "(2v w + u (v^2 + w^2)/2)^2",
];
const G_A: [&str; 4] = ["4 + 2u v + v^2", "(u + 2v)^2", "(u + 2v)(2u + 4v + u v^2/2)", "(2u + 4v + u v^2/2)^2"];
const G_1: [&str; 4] = ["t^2", "(2t - 2)^2", "(2t - 2) t^2", "t^4"];
const G_2: [&str; 4] = ["4T", "(T + 2)^2", "4T (T + 2)", "16T^2"];
const C_1_IDEAL: [&str; 6] = [
    "r^2 - q s",
    "-16p - 12r + q r + 20s - 4p s + q s",
    "4p r + 4s - 4p s + q s",
    "16 - 8q + q^2 + 32r - 16s",
    "4p + p q + 4r - 4s",
    "p^2 - s",
];
const C_2_IDEAL: [&str; 3] = ["-64 + 16q - 8r + s", "-8p + 4r - s", "16r^2 - 64s - 8r s + s^2"];

struct EntrySpec<'a> {
    name: &'a str,
    ambient: &'a [&'a str],
    orbit_n: Option<usize>,
    defining: &'a [&'a str],
    source: &'a [&'a str],
    param: &'a [&'a str],
    rule: ParamRule,
    degrees: DegreeCondition,
    angles: Option<AngleRule>,
    notes: &'a str,
}

fn build(e: EntrySpec<'_>) -> VarietyEntry {
    VarietyEntry {
        name: e.name.to_string(),
        ambient_dim: e.ambient.len(),
        ambient_vars: e.ambient.iter().map(|s| s.to_string()).collect(),
        orbit_n: e.orbit_n,
        defining_polys: fixture_polys(e.ambient, e.defining),
        param: fixture_map(e.source, e.param),
        rule: e.rule,
        rule_degrees: e.degrees,
        angles: e.angles,
        notes: e.notes.to_string(),
    }
}

/// The curve `C_{m,n}`: the plane parametrization at `(T_{3m}(t), T_n(t))`.
pub fn c_mn_entry(m: u32, n: u32) -> VarietyEntry {
    let plane = fixture_map(&["u", "v"], &G_PLANE);
    let inner = PolyMap::new(&["t"], vec![cheb1_in(3 * m, "t"), cheb1_in(n, "t")]).expect("C_mn inner");
    VarietyEntry {
        name: format!("C_{m}_{n}"),
        ambient_dim: 2,
        ambient_vars: PQ.iter().map(|s| s.to_string()).collect(),
        orbit_n: Some(2),
        defining_polys: Vec::new(),
        param: plane.after(&inner).expect("C_mn param"),
        rule: ParamRule::Chebyshev,
        rule_degrees: DegreeCondition::All,
        angles: None,
        notes: format!("image of t -> (T_{}(t), T_{n}(t)) under the plane parametrization", 3 * m),
    }
}

fn build_catalogue() -> Vec<VarietyEntry> {
    let mut out = vec![
        build(EntrySpec {
            name: "plane",
            ambient: &PQ,
            orbit_n: Some(2),
            defining: &[],
            source: &["u", "v"],
            param: &G_PLANE,
            rule: ParamRule::Chebyshev,
            degrees: DegreeCondition::All,
            angles: Some(AngleRule::Plane),
            notes: "the whole orbit variety C^2/D3",
        }),
        build(EntrySpec {
            name: "C_C",
            ambient: &PQ,
            orbit_n: Some(2),
            defining: &["p^3 - q^2"],
            source: &["z"],
            param: &["(1 + z)^2", "(1 + z)^3"],
            rule: ParamRule::Chebyshev,
            degrees: DegreeCondition::All,
            angles: None,
            notes: "cuspidal cubic, part of the branch locus",
        }),
        build(EntrySpec {
            name: "C_D",
            ambient: &PQ,
            orbit_n: Some(2),
            defining: &["p^2 + 18p - 8q - 27"],
            source: &["u"],
            param: &["5 + 2u", "11 + 7u + u^2/2"],
            rule: ParamRule::Chebyshev,
            degrees: DegreeCondition::All,
            angles: None,
            notes: "parabola, part of the branch locus",
        }),
    ];
    out.push(c_mn_entry(2, 3));
    out.extend([
        build(EntrySpec {
            name: "X_Q",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &["q s - r^2"],
            source: &["u", "v", "w"],
            param: &G_X,
            rule: ParamRule::Chebyshev,
            degrees: DegreeCondition::All,
            angles: Some(AngleRule::Xq),
            notes: "the whole orbit variety C^3/D4",
        }),
        build(EntrySpec {
            name: "S_P",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &["p^2 - s", "q s - r^2"],
            source: &["w", "t"],
            param: &["(w + t)^2", "(w t + 2)^2", "(w + t)^2 (w t + 2)", "(w + t)^4"],
            rule: ParamRule::Chebyshev,
            degrees: DegreeCondition::All,
            angles: Some(AngleRule::Sp),
            notes: "surface swept by G_X at u = 2",
        }),
        build(EntrySpec {
            name: "S_A",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &[A_H, "q s - r^2"],
            source: &["u", "v"],
            param: &G_A,
            rule: ParamRule::Chebyshev,
            degrees: DegreeCondition::All,
            angles: Some(AngleRule::Sa),
            notes: "astroid surface, part of the branch locus",
        }),
        build(EntrySpec {
            name: "L_1",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &["q", "r", "s"],
            source: &["t"],
            param: &["t", "0", "0", "0"],
            rule: ParamRule::Square(1),
            degrees: DegreeCondition::Odd,
            angles: None,
            notes: "singular line of X_Q; g_2 maps it onto C_1",
        }),
        build(EntrySpec {
            name: "L_2",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &["p", "r", "s"],
            source: &["t"],
            param: &["0", "t", "0", "0"],
            rule: ParamRule::Square(1),
            degrees: DegreeCondition::Odd,
            angles: None,
            notes: "g_2 maps it onto C_2",
        }),
        build(EntrySpec {
            name: "L_3",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &["p - 1", "q", "r"],
            source: &["t"],
            param: &["1", "0", "0", "t"],
            rule: ParamRule::Square(4),
            degrees: DegreeCondition::PrimeToThree,
            angles: None,
            notes: "g_d maps it into C_A when 3 divides d",
        }),
        build(EntrySpec {
            name: "C_1",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &C_1_IDEAL,
            source: &["t"],
            param: &G_1,
            rule: ParamRule::Shift(2),
            degrees: DegreeCondition::All,
            angles: None,
            notes: "g_2(L_1)",
        }),
        build(EntrySpec {
            name: "C_2",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &C_2_IDEAL,
            source: &["T"],
            param: &G_2,
            rule: ParamRule::Square(1),
            degrees: DegreeCondition::All,
            angles: None,
            notes: "g_2(L_2)",
        }),
        build(EntrySpec {
            name: "C_A",
            ambient: &PQRS,
            orbit_n: Some(3),
            defining: &["-12 + 3p - q", "r^2 - q s", "108r + q r - 54s", "108q + q^2 - 54r"],
            source: &["t"],
            param: &["4 + 3t", "9t", "3t (6 + t/2)", "t (6 + t/2)^2"],
            rule: ParamRule::Square(1),
            degrees: DegreeCondition::All,
            angles: None,
            notes: "singular curve of S_A, the image of u = v",
        }),
        build(EntrySpec {
            name: "S_C",
            ambient: &ABC,
            orbit_n: None,
            defining: &["a c - b^2"],
            source: &["u", "v"],
            param: &["u^2", "u v", "v^2"],
            rule: ParamRule::None,
            degrees: DegreeCondition::All,
            angles: None,
            notes: "quadric cone, birational to S_A",
        }),
    ]);
    out
}

pub fn catalogue() -> &'static [VarietyEntry] {
    static CAT: OnceLock<Vec<VarietyEntry>> = OnceLock::new();
    CAT.get_or_init(build_catalogue)
}

pub fn entry(name: &str) -> Result<&'static VarietyEntry, AlgebraError> {
    catalogue()
        .iter()
        .find(|e| e.name == name)
        .ok_or_else(|| AlgebraError::Malformed(format!("no catalogue entry named {name}")))
}

/// Entries carrying a rule valid for every degree.
pub fn semiconjugacy_entries() -> Vec<&'static VarietyEntry> {
    catalogue().iter().filter(|e| e.rule != ParamRule::None && e.rule_degrees == DegreeCondition::All).collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EntryJson {
    pub name: String,
    pub ambient_dim: usize,
    pub ambient_vars: Vec<String>,
    pub orbit_n: Option<usize>,
    pub defining_polys: Vec<String>,
    pub param_vars: Vec<String>,
    pub param: Vec<String>,
    pub param_arity: usize,
    pub rule: ParamRule,
    pub rule_degrees: DegreeCondition,
    pub angles: Option<AngleRule>,
    pub notes: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogueJson {
    pub version: u32,
    pub entries: Vec<EntryJson>,
}

impl From<&VarietyEntry> for EntryJson {
    fn from(e: &VarietyEntry) -> Self {
        EntryJson {
            name: e.name.clone(),
            ambient_dim: e.ambient_dim,
            ambient_vars: e.ambient_vars.clone(),
            orbit_n: e.orbit_n,
            defining_polys: e.defining_polys.iter().map(to_text).collect(),
            param_vars: e.param_vars().to_vec(),
            param: e.param.to_texts(),
            param_arity: e.param_arity(),
            rule: e.rule,
            rule_degrees: e.rule_degrees,
            angles: e.angles,
            notes: e.notes.clone(),
        }
    }
}

impl EntryJson {
    pub fn to_entry(&self) -> Result<VarietyEntry, AlgebraError> {
        let amb: Vec<&str> = self.ambient_vars.iter().map(|s| s.as_str()).collect();
        let src: Vec<&str> = self.param_vars.iter().map(|s| s.as_str()).collect();
        let defining: Result<Vec<QPoly>, _> = self.defining_polys.iter().map(|t| parse_poly(t, Some(&amb))).collect();
        let comps: Result<Vec<QPoly>, _> = self.param.iter().map(|t| parse_poly(t, Some(&src))).collect();
        let param = PolyMap::new(&src, comps?)?;
        if param.arity_out() != self.ambient_dim || param.arity_in() != self.param_arity {
            return Err(AlgebraError::Arity { expected: self.ambient_dim, got: param.arity_out() });
        }
        Ok(VarietyEntry {
            name: self.name.clone(),
            ambient_dim: self.ambient_dim,
            ambient_vars: self.ambient_vars.clone(),
            orbit_n: self.orbit_n,
            defining_polys: defining?,
            param,
            rule: self.rule,
            rule_degrees: self.rule_degrees,
            angles: self.angles,
            notes: self.notes.clone(),
        })
    }
}

pub fn catalogue_json() -> CatalogueJson {
    CatalogueJson { version: CATALOGUE_VERSION, entries: catalogue().iter().map(EntryJson::from).collect() }
}

pub fn load_catalogue(j: &CatalogueJson) -> Result<Vec<VarietyEntry>, AlgebraError> {
    if j.version != CATALOGUE_VERSION {
        return Err(AlgebraError::Malformed(format!("unsupported catalogue version {}", j.version)));
    }
    j.entries.iter().map(EntryJson::to_entry).collect()
}

fn random_c64<R: Rng>(rng: &mut R, radius: f64) -> C64 {
    Complex::new(rng.gen_range(-radius..radius), rng.gen_range(-radius..radius))
}

/// Values for `f.vars()` looked up by name.
fn point_for(f: &QPoly, names: &[&str], values: &[C64]) -> Vec<C64> {
    f.vars()
        .iter()
        .map(|v| names.iter().position(|n| n == v).map(|i| values[i]).unwrap_or_default())
        .collect()
}

fn named_residual(f: &QPoly, names: &[&str], values: &[C64]) -> f64 {
    scaled_residual(f, &point_for(f, names, values))
}

/// Exact vanishing of the defining polynomials on the parametrization, plus
/// a numeric spot check at 100 random parameter points.
pub fn verify_membership<R: Rng>(entry: &VarietyEntry, rng: &mut R) -> Result<Report, AlgebraError> {
    let mut r = Report::new(format!("membership {}", entry.name));
    if entry.defining_polys.is_empty() {
        r.check("no defining polynomials", true, "the entry is the whole orbit variety or a curve given only by its parametrization");
        return Ok(r);
    }
    let amb = entry.ambient_refs();
    let defining = PolyMap::new(&amb, entry.defining_polys.clone())?;
    let pulled = defining.after(&entry.param)?;
    for (f, g) in entry.defining_polys.iter().zip(pulled.components()) {
        let detail = if g.is_zero() { String::new() } else { format!("residue {}", to_text(g)) };
        r.check(format!("{} vanishes on the parametrization", to_text(f)), g.is_zero(), detail);
    }
    let param = entry.param.compile::<f64>();
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let t: Vec<C64> = (0..entry.param_arity()).map(|_| random_c64(rng, 1.0)).collect();
        let x = param.eval(&t);
        for f in &entry.defining_polys {
            worst = worst.max(named_residual(f, &amb, &x));
        }
    }
    r.check("numeric membership at 100 points", worst < 1e-9, format!("max scaled residual {worst:.3e}"));
    Ok(r)
}

/// The map on parameters that `g_d` induces under `rule`.
pub fn rule_map(rule: ParamRule, params: &[String], d: u32) -> Result<QMap, AlgebraError> {
    let comps: Result<Vec<QPoly>, AlgebraError> = params
        .iter()
        .map(|x| {
            let xv = QPoly::var(&[x.as_str()], x);
            match rule {
                ParamRule::None => Err(AlgebraError::RuleMismatch("no reparametrization rule".into())),
                ParamRule::Chebyshev => Ok(cheb1_in(d, x)),
                ParamRule::Shift(c) => {
                    let c = Rational::from_integer(c.into());
                    let shifted = xv.add_constant(&-c.clone());
                    Ok(cheb1_in(d, "_w").substitute(&[("_w", &shifted)]).add_constant(&c))
                }
                ParamRule::Square(k) => {
                    let sq = cheb1_in(d, "_w").pow(2);
                    let halved = sq
                        .halve_even("_w", "_W")
                        .ok_or_else(|| AlgebraError::RuleMismatch(format!("T_{d}(w)^2 is not even in w")))?;
                    let k = Rational::from_integer(k.into());
                    let kx = xv.scale(&k);
                    Ok(halved.substitute(&[("_W", &kx)]).div_scalar(&k))
                }
            }
        })
        .collect();
    PolyMap::new(params, comps?)
}

fn checked_rule(entry: &VarietyEntry, d: u32) -> Result<QMap, AlgebraError> {
    if entry.orbit_n.is_none() || entry.rule == ParamRule::None {
        return Err(AlgebraError::RuleMismatch(format!("{} has no reparametrization rule", entry.name)));
    }
    if !entry.rule_degrees.holds(d) {
        return Err(AlgebraError::RuleMismatch(format!(
            "the rule for {} needs {:?} degree, got d = {d}",
            entry.name, entry.rule_degrees
        )));
    }
    rule_map(entry.rule, entry.param_vars(), d)
}

/// `g_d ∘ param = param ∘ E_d` with `E_d` the rule-adjusted Chebyshev map.
pub fn verify_semiconjugacy(entry: &VarietyEntry, d: u32) -> Result<Report, AlgebraError> {
    let e = checked_rule(entry, d)?;
    let g = induced_morphism(entry.orbit_n.unwrap(), d)?;
    let lhs = g.map.after(&entry.param)?;
    let rhs = entry.param.after(&e)?;
    let mut r = Report::new(format!("semiconjugacy {} d={d}", entry.name));
    for (i, (a, b)) in lhs.components().iter().zip(rhs.components()).enumerate() {
        let diff = a.sub(b);
        let detail = if diff.is_zero() { String::new() } else { format!("difference has {} terms", diff.len()) };
        r.check(format!("component {}", entry.ambient_vars[i]), diff.is_zero(), detail);
    }
    Ok(r)
}

/// `g_e(g_d(param)) = param(E_{ed})` on the entry.
pub fn verify_semigroup_on_variety(entry: &VarietyEntry, e: u32, d: u32) -> Result<Report, AlgebraError> {
    checked_rule(entry, e)?;
    checked_rule(entry, d)?;
    let ed = checked_rule(entry, e * d)?;
    let n = entry.orbit_n.unwrap();
    let inner = induced_morphism(n, d)?.map.after(&entry.param)?;
    let lhs = induced_morphism(n, e)?.map.after(&inner)?;
    let rhs = entry.param.after(&ed)?;
    let mut r = Report::new(format!("semigroup on {}", entry.name));
    r.check(format!("g_{e} o g_{d} o param = param o E_{}", e * d), lhs == rhs, "");
    Ok(r)
}

fn var_in(vars: &[&str], name: &str) -> QPoly {
    QPoly::var(vars, name)
}

/// Resultants and discriminants of `g_2` and `g_3` on C^2/D3.
pub fn branch_report_n2() -> Result<Report, AlgebraError> {
    let mut r = Report::new("branch locus n=2");
    let abpq = ["a", "b", "p", "q"];
    let a = var_in(&abpq, "a");
    let b = var_in(&abpq, "b");
    let cusp = qpoly_in("a^3 - b^2", &["a", "b"]);
    let parabola = qpoly_in("-27 + 18a + a^2 - 8b", &["a", "b"]);

    let g2 = induced_morphism(2, 2)?;
    let f = g2.map.component(0).sub(&a);
    let g = g2.map.component(1).sub(&b);
    let res_q = resultant(&f, &g, "q")?;
    let want_q = qpoly_in("32a + 2a^2 - 16b - 128p + 8a p + 96p^2 - 4a p^2 - 24p^3 + 2p^4", &["a", "b", "p"]);
    r.check("g_2: Res_q(P - a, Q - b)", res_q == want_q, to_text(&res_q));
    let res_p = resultant(&f, &g, "p")?;
    let want_p = qpoly_in(
        "192a^2 - a^3 - 256b - 36a b + b^2 - 2048q + 864a q - 24a^2 q - 152b q + 768q^2 - 108a q^2 \
         - 4b q^2 - 96q^3 + 4q^4",
        &["a", "b", "q"],
    );
    r.check("g_2: Res_p(P - a, Q - b)", res_p == want_p, to_text(&res_p));
    let disc = discriminant(&res_q, "p")?;
    let (k1, rest) = factor_multiplicity(&disc, &cusp);
    let (k2, rest) = factor_multiplicity(&rest, &parabola);
    r.check(
        "g_2: disc_p = const (a^3 - b^2)(-27 + 18a + a^2 - 8b)",
        k1 == 1 && k2 == 1 && rest.is_constant() && !rest.is_zero(),
        format!("multiplicities {k1}, {k2}; cofactor {}", to_text(&rest)),
    );

    let g3 = induced_morphism(2, 3)?;
    let f = g3.map.component(0).sub(&a);
    let g = g3.map.component(1).sub(&b);
    let res_q = resultant(&f, &g, "q")?;
    let (dq, lq) = res_q.leading_coefficient_in("p");
    r.check("g_3: Res_q has leading term -4p^9", dq == 9 && lq == lq.constant_like(rat(-4, 1)), to_text(&lq));
    let res_p = resultant(&f, &g, "p")?;
    let (dp, lp) = res_p.leading_coefficient_in("q");
    r.check("g_3: Res_p has leading term 64q^9", dp == 9 && lp == lp.constant_like(rat(64, 1)), to_text(&lp));
    let disc = discriminant(&res_q, "p")?;
    let a_minus_1 = qpoly_in("a - 1", &["a"]);
    let (k0, rest) = factor_multiplicity(&disc, &a_minus_1);
    let (k1, rest) = factor_multiplicity(&rest, &parabola);
    let (k2, rest) = factor_multiplicity(&rest, &cusp);
    r.check(
        "g_3: disc_p = const (a - 1)^6 (-27 + 18a + a^2 - 8b)^3 (a^3 - b^2)^3",
        k0 == 6 && k1 == 3 && k2 == 3 && rest.is_constant() && !rest.is_zero(),
        format!("multiplicities {k0}, {k1}, {k2}; cofactor {}", to_text(&rest)),
    );
    Ok(r)
}

pub const H_PLUS: &str = "64 + a^2 - 128p + 80p^2 - 2a p^2 - 16p^3 + p^4 - 64u + 64p u - 8p^2 u + 16u^2 + 16v \
    - 16p v - 8u v";
pub const H_MINUS: &str = "64 + a^2 - 128p + 80p^2 - 2a p^2 - 16p^3 + p^4 + 64u - 64p u + 8p^2 u + 16u^2 - 16v \
    + 16p v - 8u v";
const APUV: [&str; 4] = ["a", "p", "u", "v"];

/// `h_+`, `h_-` in `a, p, u, v`.
pub fn h_pm() -> (QPoly, QPoly) {
    (qpoly_in(H_PLUS, &APUV), qpoly_in(H_MINUS, &APUV))
}

/// Triangular relations solved for `(s, q, r)` given `p` on the `+` branch;
/// the `-` branch is `u, v -> -u, -v`.
pub fn triangular_plus() -> [QPoly; 3] {
    [
        qpoly_in("a - 2p^2 + 2s - v", &["a", "p", "s", "v"]),
        qpoly_in("2 - 2p + q - u", &["p", "q", "u"]),
        qpoly_in("8 + a - 8p - p^2 + 4r - 4u", &["a", "p", "r", "u"]),
    ]
}

fn flip_uv(f: &QPoly) -> QPoly {
    let mu = QPoly::var(&["u"], "u").neg();
    let mv = QPoly::var(&["v"], "v").neg();
    f.substitute(&[("u", &mu), ("v", &mv)])
}

/// Rewrite a polynomial whose monomials `u^i v^j` all have `i + j` even via
/// `u^2 -> b`, `uv -> c`, `v^2 -> d`; odd total degree gives `None`.
pub fn even_rewrite(f: &QPoly, u: &str, v: &str) -> Option<QPoly> {
    let vars = f.vars();
    let iu = f.var_index(u);
    let iv = f.var_index(v);
    let mut names: Vec<String> =
        vars.iter().filter(|x| x.as_str() != u && x.as_str() != v).cloned().collect();
    names.extend(["b", "c", "d"].iter().map(|s| s.to_string()));
    let k = names.len();
    let mut terms = Vec::with_capacity(f.len());
    for (m, c) in f.terms() {
        let i = iu.map(|x| m.exps()[x]).unwrap_or(0);
        let j = iv.map(|x| m.exps()[x]).unwrap_or(0);
        if (i + j) % 2 == 1 {
            return None;
        }
        let mut e: Vec<u32> = m
            .exps()
            .iter()
            .enumerate()
            .filter(|(x, _)| Some(*x) != iu && Some(*x) != iv)
            .map(|(_, &e)| e)
            .collect();
        e.extend([i / 2, i % 2, j / 2]);
        debug_assert_eq!(e.len(), k);
        terms.push((e, c.clone()));
    }
    Some(QPoly::from_terms(&names, terms))
}

/// `g_2` on `X_Q` written as `(a, u, v)` with `b = u^2`, `c = uv`, `d = v^2`.
fn g2_auv() -> Result<[QPoly; 3], AlgebraError> {
    let g = induced_morphism(3, 2)?;
    Ok([
        g.map.component(0).clone(),
        qpoly_in("q - 2p + 2", &PQRS),
        qpoly_in("2s - p^2 + 4q - 4r", &PQRS),
    ])
}

/// The quartics `h_±` and their product `H` for `g_2` on C^3/D4.
pub fn branch_report_n3<R: Rng>(rng: &mut R) -> Result<Report, AlgebraError> {
    let mut r = Report::new("branch locus n=3");
    let (hp, hm) = h_pm();
    r.check("h_- is h_+ with (u, v) -> (-u, -v)", flip_uv(&hp) == hm, "");

    let [ga, gu, gv] = g2_auv()?;
    let g = induced_morphism(3, 2)?;
    let split_ok = syzygy_normal_form(&gu.pow(2).sub(g.map.component(1))).is_zero()
        && syzygy_normal_form(&gu.mul(&gv).sub(g.map.component(2))).is_zero()
        && syzygy_normal_form(&gv.pow(2).sub(g.map.component(3))).is_zero();
    r.check("g_2 = (a, u^2, uv, v^2) on X_Q", split_ok, "");
    let bind = [("a", &ga), ("u", &gu), ("v", &gv)];
    let mut exact_ok = syzygy_normal_form(&hp.substitute(&bind)).is_zero();
    for t in triangular_plus() {
        exact_ok &= syzygy_normal_form(&t.substitute(&bind)).is_zero();
    }
    r.check("h_+ and the triangular relations vanish on X_Q after substituting g_2", exact_ok, "");

    let gx = entry("X_Q")?.param.compile::<f64>();
    let ca = PolyMap::new(&PQRS, vec![ga, gu, gv])?.compile::<f64>();
    let tri = triangular_plus();
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let t: Vec<C64> = (0..3).map(|_| random_c64(rng, 1.5)).collect();
        let x = gx.eval(&t);
        let auv = ca.eval(&x);
        let names = ["p", "q", "r", "s", "a", "u", "v"];
        let plus: Vec<C64> = x.iter().copied().chain(auv.iter().copied()).collect();
        let minus: Vec<C64> = x.iter().copied().chain([auv[0], -auv[1], -auv[2]]).collect();
        worst = worst.max(named_residual(&hp, &names, &plus));
        worst = worst.max(named_residual(&hm, &names, &minus));
        for f in &tri {
            worst = worst.max(named_residual(f, &names, &plus));
            worst = worst.max(named_residual(&flip_uv(f), &names, &minus));
        }
    }
    r.check("h_± and triangular relations at 50 random points", worst < 1e-8, format!("max scaled residual {worst:.3e}"));

    let a_factor = qpoly_in(
        "-256 + 192a - 48a^2 + 4a^3 + 128u^2 + 80a u^2 - a^2 u^2 - 16u^4 - 288u v - 36a u v + 8u^3 v + 108v^2",
        &["a", "u", "v"],
    );
    let a_h = qpoly_in(A_H, &PQRS).rename(&[("p", "a"), ("q", "b"), ("r", "c"), ("s", "d")]);
    let rewritten = even_rewrite(&a_factor, "u", "v");
    r.check(
        "astroid factor rewrites to -A_h(a, b, c, d)",
        rewritten.as_ref().is_some_and(|f| *f == a_h.neg()),
        rewritten.map(|f| to_text(&f)).unwrap_or_else(|| "odd monomial".into()),
    );
    for (label, h, sign) in [("h_+", &hp, 1), ("h_-", &hm, -1)] {
        let disc = discriminant(h, "p")?;
        let lin = qpoly_in(if sign > 0 { "a + v" } else { "a - v" }, &["a", "v"]);
        let (k1, rest) = factor_multiplicity(&disc, &lin);
        let (k2, rest) = factor_multiplicity(&rest, &a_factor);
        let want = rest.constant_like(rat(-16384, 1));
        r.check(
            format!("disc_p({label}) = -16384 (a {} v)^2 (astroid factor)", if sign > 0 { '+' } else { '-' }),
            k1 == 2 && k2 == 1 && rest == want,
            format!("multiplicities {k1}, {k2}; cofactor {}", to_text(&rest)),
        );
    }
    let prod = hp.mul(&hm);
    r.check("h_+ h_- is invariant under (u, v) -> (-u, -v)", flip_uv(&prod) == prod, "");
    match even_rewrite(&prod, "u", "v") {
        Some(h) => {
            let (deg, lead) = h.leading_coefficient_in("p");
            r.check("H(p) is monic of degree 8", deg == 8 && lead.is_constant() && lead.constant_term().is_one(), to_text(&lead));
            r.check("H(p) has integer coefficients", h.is_integral(), "");
        }
        None => r.fail("H(p) is even in (u, v)", "odd monomial"),
    }
    Ok(r)
}

/// Forward-inclusion claims about preimages of invariant varieties.
pub const PREIMAGE_CASES: [&str; 8] =
    ["g2-C_C", "g2-C_D", "g3-C_C", "g3-C_D", "g2-L_1", "g2-S_P", "g2-L_2", "g2-S_A"];

enum Source {
    Param(QMap),
    /// Points of the source, sampled by solving its triangular generators.
    Sampled(fn(C64) -> Vec<Vec<C64>>),
}

struct PreimageCase {
    n: usize,
    d: u32,
    source_ideal: Vec<QPoly>,
    source: Source,
    target: &'static str,
}

/// Both roots of `a z^2 + b z + c`.
fn quadratic_roots(a: C64, b: C64, c: C64) -> [C64; 2] {
    let disc = (b * b - a * c * 4.0).sqrt();
    [(-b + disc) / (a * 2.0), (-b - disc) / (a * 2.0)]
}

fn sample_g3_cusp_source(p: C64) -> Vec<Vec<C64>> {
    // -4q^2 + (18p - 18) q + (p^3 - 27p^2 + 54p - 27) = 0
    let one = C64::new(1.0, 0.0);
    let roots = quadratic_roots(one * -4.0, p * 18.0 - 18.0, p * p * p - p * p * 27.0 + p * 54.0 - 27.0);
    roots.iter().map(|&q| vec![p, q]).collect()
}

fn sample_l1_source(p: C64) -> Vec<Vec<C64>> {
    // q = 2p - 2, 2s = 8 - 8p + p^2 + 4r, r^2 + 4(1 - p) r + (1 - p)(8 - 8p + p^2) = 0
    let one = C64::new(1.0, 0.0);
    let w = one - p;
    let roots = quadratic_roots(one, w * 4.0, w * (p * p - p * 8.0 + 8.0));
    roots
        .iter()
        .map(|&r| {
            let q = p * 2.0 - 2.0;
            let s = (p * p - p * 8.0 + 8.0 + r * 4.0) / 2.0;
            vec![p, q, r, s]
        })
        .collect()
}

fn preimage_case(id: &str) -> Result<PreimageCase, AlgebraError> {
    let pq_map = |comps: &[&str]| fixture_map(&["t"], comps);
    let pqrs_map = |comps: &[&str]| fixture_map(&["p", "q"], comps);
    Ok(match id {
        "g2-C_C" => PreimageCase {
            n: 2,
            d: 2,
            source_ideal: fixture_polys(&PQ, &["3p - q - 4"]),
            source: Source::Param(pq_map(&["t", "3t - 4"])),
            target: "C_C",
        },
        "g2-C_D" => PreimageCase {
            n: 2,
            d: 2,
            source_ideal: fixture_polys(&PQ, &["p - 1"]),
            source: Source::Param(pq_map(&["1", "t"])),
            target: "C_D",
        },
        "g3-C_C" => PreimageCase {
            n: 2,
            d: 3,
            source_ideal: fixture_polys(&PQ, &["-27 + 54p - 27p^2 + p^3 - 18q + 18p q - 4q^2"]),
            source: Source::Sampled(sample_g3_cusp_source),
            target: "C_C",
        },
        "g3-C_D" => PreimageCase {
            n: 2,
            d: 3,
            source_ideal: fixture_polys(&PQ, &["p^2 - 2q"]),
            source: Source::Param(pq_map(&["t", "t^2/2"])),
            target: "C_D",
        },
        "g2-L_1" => PreimageCase {
            n: 3,
            d: 2,
            source_ideal: fixture_polys(&PQRS, &["r^2 - 2p s + 2s", "-8 + 8p - p^2 - 4r + 2s", "2 - 2p + q"]),
            source: Source::Sampled(sample_l1_source),
            target: "L_1",
        },
        "g2-S_P" => PreimageCase {
            n: 3,
            d: 2,
            source_ideal: fixture_polys(&PQRS, &["q s - r^2", "4q - 4r + s"]),
            source: Source::Param(pqrs_map(&["p", "q", "2q", "4q"])),
            target: "S_P",
        },
        "g2-L_2" => PreimageCase {
            n: 3,
            d: 2,
            source_ideal: fixture_polys(&PQRS, &["2r - s", "4q - s", "p^2 - s"]),
            source: Source::Param(fixture_map(&["p"], &["p", "p^2/4", "p^2/2", "p^2"])),
            target: "L_2",
        },
        "g2-S_A" => PreimageCase {
            n: 3,
            d: 2,
            source_ideal: fixture_polys(&PQRS, &["q s - r^2", "p^2 q - 4p r + 4s"]),
            source: Source::Param(pqrs_map(&["p", "q", "p q/2", "p^2 q/4"])),
            target: "S_A",
        },
        _ => return Err(AlgebraError::Malformed(format!("unknown preimage case {id}"))),
    })
}

/// Check that `g_d` maps the claimed source variety into the target.
pub fn verify_preimage_varieties<R: Rng>(case: &str, rng: &mut R) -> Result<Report, LabError> {
    let c = preimage_case(case)?;
    let target = entry(c.target)?;
    let g = induced_morphism(c.n, c.d)?;
    let amb: Vec<&str> = target.ambient_refs();
    let mut r = Report::new(format!("preimage {case}"));
    match &c.source {
        Source::Param(param) => {
            let mut on_source = true;
            let src = PolyMap::new(&amb, c.source_ideal.clone()).map_err(LabError::from)?;
            on_source &= src.after(param)?.components().iter().all(|f| f.is_zero());
            if c.n == 3 {
                let syz = PolyMap::new(&amb, vec![qpoly_in("q s - r^2", &PQRS)])?;
                on_source &= syz.after(param)?.component(0).is_zero();
            }
            r.check("parametrization lies on the source variety", on_source, "");
            let image = g.map.after(param)?;
            let defining = PolyMap::new(&amb, target.defining_polys.clone())?;
            let pulled = defining.after(&image)?;
            r.check(
                format!("g_{} maps the source into {}", c.d, c.target),
                pulled.components().iter().all(|f| f.is_zero()),
                "exact",
            );
        }
        Source::Sampled(sampler) => {
            let gc = g.map.compile::<f64>();
            let mut src_worst: f64 = 0.0;
            let mut img_worst: f64 = 0.0;
            let mut count = 0;
            for _ in 0..25 {
                let p = random_c64(rng, 3.0);
                for x in sampler(p) {
                    if x.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                        continue;
                    }
                    count += 1;
                    for f in &c.source_ideal {
                        src_worst = src_worst.max(named_residual(f, &amb, &x));
                    }
                    if c.n == 3 {
                        src_worst = src_worst.max(named_residual(&qpoly_in("q s - r^2", &PQRS), &amb, &x));
                    }
                    let y = gc.eval(&x);
                    for f in &target.defining_polys {
                        img_worst = img_worst.max(named_residual(f, &amb, &y));
                    }
                }
            }
            if count == 0 {
                return Err(NumericError::NoSamples(case.to_string()).into());
            }
            r.check(
                format!("{count} sampled points lie on the source variety"),
                src_worst < 1e-8,
                format!("max scaled residual {src_worst:.3e}"),
            );
            r.check(
                format!("g_{} maps the samples into {}", c.d, c.target),
                img_worst < 1e-8,
                format!("max scaled residual {img_worst:.3e}"),
            );
        }
    }
    Ok(r)
}

fn eval_exact(map: &QMap, point: &[Rational]) -> Vec<Rational> {
    map.evaluate(point)
}

fn ints(xs: &[i64]) -> Vec<Rational> {
    xs.iter().map(|&x| rat(x, 1)).collect()
}

/// Fixed points, preperiodic lines and the curves they are mapped onto.
pub fn verify_fixed_and_preperiodic(d: u32) -> Result<Report, AlgebraError> {
    let mut r = Report::new(format!("fixed and preperiodic d={d}"));
    let g = induced_morphism(2, d)?;
    let origin = eval_exact(&g.map, &ints(&[0, 0]));
    let want = if d.is_multiple_of(3) { ints(&[9, 27]) } else { ints(&[0, 0]) };
    r.check(format!("g_{d}(0, 0) = ({}, {})", want[0], want[1]), origin == want, format!("{origin:?}"));
    let top = eval_exact(&g.map, &ints(&[9, 27]));
    r.check(format!("g_{d}(9, 27) = (9, 27)"), top == ints(&[9, 27]), format!("{top:?}"));
    let corner = eval_exact(&g.map, &ints(&[1, -1]));
    let want = if d % 2 == 1 { ints(&[1, -1]) } else { ints(&[9, 27]) };
    r.check(format!("g_{d}(1, -1) = ({}, {})", want[0], want[1]), corner == want, format!("{corner:?}"));

    for name in ["L_1", "L_2", "L_3"] {
        let e = entry(name)?;
        if e.rule_applies(d) {
            let rep = verify_semiconjugacy(e, d)?;
            r.check(format!("g_{d} on {name} follows its rule"), rep.passed(), "");
        }
    }
    if d.is_multiple_of(3) {
        let l3 = entry("L_3")?;
        let ca = entry("C_A")?;
        let image = induced_morphism(3, d)?.map.after(&l3.param)?;
        let defining = PolyMap::new(&PQRS, ca.defining_polys.clone())?;
        let ok = defining.after(&image)?.components().iter().all(|f| f.is_zero());
        r.check(format!("g_{d}(L_3) lies in C_A"), ok, "");
    }
    if d == 2 || d == 3 {
        let g3 = induced_morphism(3, d)?;
        let cases: Vec<(&str, &str, QMap)> = if d == 2 {
            vec![
                ("L_1", "C_1", fixture_map(&["t"], &G_1)),
                ("L_2", "C_2", fixture_map(&["T"], &G_2)),
            ]
        } else {
            vec![("L_3", "C_A", fixture_map(&["t"], &["4 + 3(4t)", "9(4t)", "3(4t)(6 + 2t)", "4t (6 + 2t)^2"]))]
        };
        for (src, dst, want) in cases {
            let image = g3.map.after(&entry(src)?.param)?;
            let renamed = want.components().iter().map(|c| c.rename(&[("T", "t")])).collect();
            let want = PolyMap::new(&["t"], renamed)?;
            r.check(format!("g_{d}({src}) is {dst} through its parametrization"), image == want, "");
        }
    }
    Ok(r)
}

/// `ψ : (a, b, c) -> (p, q, r, s)`.
pub fn psi_map() -> QMap {
    fixture_map(
        &ABC,
        &[
            "4 + 2b + c",
            "a + 4b + 4c",
            "2a + 8b + 8c + a c/2 + b c",
            "4a + 16b + 16c + 2a c + 4b c + a c^2/4",
        ],
    )
}

/// Numerators of `φ = (N_a / D, N_b / (2D), N_c / D)` and the denominator `D`.
pub fn phi_parts() -> ([QPoly; 3], QPoly) {
    let v = ["p", "q", "r"];
    (
        [
            qpoly_in("-64 + 32p - 4p^2 + 4q + 5p q - q^2 - 12r", &v),
            qpoly_in("64 - 32p + 4p^2 + 16q - p q - 6r", &v),
            qpoly_in("-16 + 8p - p^2 - 12q + 6r", &v),
        ],
        qpoly_in("-12 + 3p - q", &v),
    )
}

fn phi_exact(x: &[Rational]) -> [Rational; 3] {
    let (nums, den) = phi_parts();
    let names = ["p", "q", "r", "s"];
    let ev = |f: &QPoly| {
        let vals: Vec<(&str, Rational)> = names.iter().copied().zip(x.iter().cloned()).collect();
        f.evaluate_named(&vals).unwrap_or_default()
    };
    let dv = ev(&den);
    [ev(&nums[0]) / &dv, ev(&nums[1]) / (dv.clone() * rat(2, 1)), ev(&nums[2]) / &dv]
}

/// `h_d` on the cone `ac = b^2`, built from the even/odd split of `T_d`.
pub fn h_d_map(d: u32) -> Result<QMap, AlgebraError> {
    let w = cheb1_in(d, "w");
    let j = d / 2;
    let av = var_in(&ABC, "a");
    let bv = var_in(&ABC, "b");
    let cv = var_in(&ABC, "c");
    let comps = if d.is_multiple_of(2) {
        let pj = w.halve_even("w", "W").ok_or_else(|| AlgebraError::RuleMismatch("T_d not even".into()))?;
        let pa = pj.rename(&[("W", "a")]);
        let pc = pj.rename(&[("W", "c")]);
        let lower = pa.mul(&pc).sub(&av.pow(j).mul(&cv.pow(j)));
        vec![pa.pow(2), bv.pow(d).add(&lower), pc.pow(2)]
    } else {
        let wv = QPoly::var(&["w"], "w");
        let qw = w.exact_divide(&wv).ok_or_else(|| AlgebraError::RuleMismatch("T_d not odd".into()))?;
        let qj = qw.halve_even("w", "W").ok_or_else(|| AlgebraError::RuleMismatch("T_d / w not even".into()))?;
        let qa = qj.rename(&[("W", "a")]);
        let qc = qj.rename(&[("W", "c")]);
        let lower = bv.mul(&qa).mul(&qc).sub(&bv.mul(&av.pow(j)).mul(&cv.pow(j)));
        vec![av.mul(&qa.pow(2)), bv.pow(d).add(&lower), cv.mul(&qc.pow(2))]
    };
    PolyMap::new(&ABC, comps)
}

/// ψ, φ and `h_d` on the cone `S_C` against the astroid surface `S_A`.
pub fn verify_cone_birationality<R: Rng>(d: u32, rng: &mut R) -> Result<Report, AlgebraError> {
    let mut r = Report::new(format!("cone maps d={d}"));
    let cone = entry("S_C")?.param.clone();
    let psi = psi_map();
    let on_cone = psi.after(&cone)?;
    r.check("psi(u^2, uv, v^2) = G_A(u, v)", on_cone == entry("S_A")?.param, "");

    let (nums, den) = phi_parts();
    let uv = ["u", "v"];
    let pull = |f: &QPoly| -> Result<QPoly, AlgebraError> {
        Ok(PolyMap::new(&PQRS, vec![f.clone()])?.after(&on_cone)?.component(0).clone())
    };
    let diff2 = qpoly_in("(u - v)^2", &uv);
    let dpull = pull(&den)?;
    r.check("denominator -12 + 3p - q on the cone is -(u - v)^2", dpull == diff2.neg(), to_text(&dpull));
    for (label, num, cof) in [
        ("a", &nums[0], "-u^2"),
        ("b", &nums[1], "-2u v"),
        ("c", &nums[2], "-v^2"),
    ] {
        let got = pull(num)?;
        let (k, rest) = factor_multiplicity(&got, &qpoly_in("u - v", &uv));
        r.check(
            format!("numerator of {label} is {cof} (u - v)^2"),
            k == 2 && rest == qpoly_in(cof, &uv),
            format!("multiplicity {k}, cofactor {}", to_text(&rest)),
        );
    }

    let h = h_d_map(d)?;
    let tu = cheb1_in(d, "u");
    let tv = cheb1_in(d, "v");
    let want = PolyMap::new(&uv, vec![tu.pow(2), tu.mul(&tv), tv.pow(2)])?;
    r.check(format!("h_{d}(u^2, uv, v^2) = (T_d(u)^2, T_d(u) T_d(v), T_d(v)^2)"), h.after(&cone)? == want, "");
    let head_ok = ["a", "b", "c"].iter().enumerate().all(|(i, v)| {
        let lower = h.component(i).sub(&var_in(&ABC, v).pow(d));
        lower.is_zero() || lower.total_degree() < d
    });
    r.check(format!("h_{d} = (a^d, b^d, c^d) + lower degree"), head_ok, "");

    let gd = &induced_morphism(3, d)?.map;
    let ga = &entry("S_A")?.param;
    let (mut round, mut conj) = (true, true);
    for _ in 0..20 {
        let u = rat(rng.gen_range(-40..=40), rng.gen_range(1..=9));
        let tu = cheb1_in(d, "u").evaluate(std::slice::from_ref(&u));
        let (mut v, mut tv) = (u.clone(), tu.clone());
        while tv == tu {
            v = rat(rng.gen_range(-40..=40), rng.gen_range(1..=9));
            tv = cheb1_in(d, "v").evaluate(&[v.clone()]);
        }
        let x = eval_exact(ga, &[u, v]);
        let back = phi_exact(&x);
        round &= eval_exact(&psi, &back) == x;
        let y = phi_exact(&eval_exact(gd, &x));
        conj &= y == [tu.clone() * &tu, tu.clone() * &tv, tv.clone() * &tv];
    }
    r.check("psi(phi(x)) = x at 20 rational points of S_A", round, "");
    r.check(
        format!("phi(g_{d}(psi(u^2, uv, v^2))) = (T_d(u)^2, T_d(u) T_d(v), T_d(v)^2) at 20 rational points"),
        conj,
        "",
    );
    Ok(r)
}

/// `(dp/dv, dq/dv, slope)` of `C_{2k,3}` at the corner `(1, -1)`, reached at `v = -2`.
pub fn c2k3_slope(k: u32) -> (Rational, Rational, Rational) {
    let plane = fixture_map(&["u", "v"], &G_PLANE);
    let inner = PolyMap::new(&["v"], vec![cheb1_in(2 * k, "v"), QPoly::var(&["v"], "v")]).expect("curve");
    let curve = plane.after(&inner).expect("curve");
    let at = [rat(-2, 1)];
    let dp = curve.component(0).derivative("v").evaluate(&at);
    let dq = curve.component(1).derivative("v").evaluate(&at);
    let slope = dq.clone() / &dp;
    (dp, dq, slope)
}

/// `C_{m,n}` is invariant under `g_d`; for `C_{2k,3}` also check the slope at `(1, -1)`.
pub fn invariant_family(m: u32, n: u32, d: u32) -> Result<Report, AlgebraError> {
    if m == 0 || n == 0 {
        return Err(AlgebraError::Malformed("m and n must be positive".into()));
    }
    let e = c_mn_entry(m, n);
    let mut r = Report::new(format!("family C_{m}_{n} d={d}"));
    r.absorb(verify_semiconjugacy(&e, d)?);
    let corner = e.param.evaluate(&[rat(-2, 1)]);
    if n == 3 && m.is_multiple_of(2) {
        let k = m / 2;
        r.check("the curve passes through (1, -1) at its corner parameter", corner == ints(&[1, -1]), format!("{corner:?}"));
        let (dp, _, slope) = c2k3_slope(k);
        let kk = Rational::from_integer((k * k).into());
        let four = rat(4, 1);
        let want_slope = rat(5, 2) + four.clone() / (four.clone() * &kk - Rational::one());
        let want_dp = rat(2, 1) * four * kk - rat(2, 1);
        r.check(format!("dp/dv at v = -2 is 2(2k)^2 - 2 for k = {k}"), dp == want_dp, format!("{dp}"));
        r.check(format!("slope at (1, -1) is 5/2 + 4/(4k^2 - 1) for k = {k}"), slope == want_slope, format!("{slope}"));
    }
    Ok(r)
}

/// `S_A ∩ S_P` through the parametrization `G_A`.
pub fn verify_surface_intersection() -> Result<Report, AlgebraError> {
    let mut r = Report::new("S_A meets S_P");
    let ga = &entry("S_A")?.param;
    let uv = ["u", "v"];
    let ps = ga.component(0).pow(2).sub(ga.component(3));
    let want = qpoly_in("(2 - u)(2 + u)(2 - v)^2 (2 + v)^2 / 4", &uv);
    r.check("p^2 - s on G_A = (2 - u)(2 + u)(2 - v)^2 (2 + v)^2 / 4", ps == want, to_text(&ps));

    let fix = |u: &str, v: &str| -> Result<QMap, AlgebraError> {
        let us = qpoly_in(u, &uv);
        let vs = qpoly_in(v, &uv);
        let comps: Vec<QPoly> = ga.components().iter().map(|c| c.substitute(&[("u", &us), ("v", &vs)])).collect();
        let free = if v.contains('v') { "v" } else { "u" };
        PolyMap::new(&[free], comps)
    };
    let vanish = |map: &QMap, name: &str| -> Result<bool, AlgebraError> {
        let e = entry(name)?;
        Ok(PolyMap::new(&PQRS, e.defining_polys.clone())?.after(map)?.components().iter().all(|f| f.is_zero()))
    };
    let shift = |var: &str| PolyMap::new(&[var], vec![qpoly_in(&format!("2 + {var}"), &[var])]);

    let g1 = fixture_map(&["t"], &G_1).components().iter().map(|c| c.rename(&[("t", "v")])).collect();
    let g1 = PolyMap::new(&["v"], g1)?.after(&shift("v")?)?;
    let a2 = fix("2", "v")?;
    r.check("G_A(2, v) = G_1(2 + v)", a2 == g1, "");
    r.check("G_A(-2, v) lies on C_1", vanish(&fix("-2", "v")?, "C_1")?, "");
    let g2 = fixture_map(&["T"], &G_2).components().iter().map(|c| c.rename(&[("T", "u")])).collect();
    let g2 = PolyMap::new(&["u"], g2)?.after(&shift("u")?)?;
    let au2 = fix("u", "2")?;
    r.check("G_A(u, 2) = G_2(2 + u)", au2 == g2, "");
    r.check("G_A(u, -2) lies on C_2", vanish(&fix("u", "-2")?, "C_2")?, "");
    Ok(r)
}

/// The astroid surface: its polynomial from the real form, the extra
/// relations of its parametrization and the rank drop of the Jacobian on `u = v`.
pub fn verify_astroid_structure<R: Rng>(rng: &mut R) -> Result<Report, AlgebraError> {
    let mut r = Report::new("astroid surface");
    let a_h = qpoly_in(A_H, &PQRS);
    let a_xyz = qpoly_in(A_XYZ, &["x", "y", "z"]);
    let rewritten = rewrite_in_invariants(&a_xyz, &FundamentalSystem::d4())?;
    r.check("A(x, y, z) rewrites to A_h(p, q, r, s)", rewritten == a_h, to_text(&rewritten));

    let ga = entry("S_A")?.param.clone();
    let extras = fixture_polys(
        &["p", "q", "r", "u", "v"],
        &["-16 + 8p - p^2 - 24q + 12r - 2q v^2 + 9v^4", "-8 + 2p - q + u^2 + 2v^2"],
    );
    let bind: Vec<(&str, &QPoly)> = PQRS.iter().copied().zip(ga.components().iter()).collect();
    let extra_ok = extras.iter().all(|f| f.substitute(&bind).is_zero());
    r.check("elimination relations in p, q, r, u, v vanish on G_A", extra_ok, "");

    let fs = [a_h.clone(), qpoly_in("q s - r^2", &PQRS)];
    let jac: Vec<Vec<QPoly>> = fs.iter().map(|f| PQRS.iter().map(|v| f.derivative(v)).collect()).collect();
    let mut minors = Vec::new();
    for i in 0..4 {
        for j in i + 1..4 {
            minors.push(jac[0][i].mul(&jac[1][j]).sub(&jac[0][j].mul(&jac[1][i])));
        }
    }
    let diag = PolyMap::new(&["u"], ga.components().iter().map(|c| c.rename(&[("v", "u")])).collect())?;
    let minors_map = PolyMap::new(&PQRS, minors.clone())?;
    let on_diag = minors_map.after(&diag)?;
    r.check("all 2x2 Jacobian minors vanish on G_A(u, u)", on_diag.components().iter().all(|f| f.is_zero()), "");
    let gc = ga.compile::<f64>();
    let mc = minors_map.compile::<f64>();
    let mut weakest = f64::INFINITY;
    for _ in 0..50 {
        let (u, v) = (random_c64(rng, 2.0), random_c64(rng, 2.0));
        let x = gc.eval(&[u, v]);
        let scale = x.iter().map(|z| z.norm()).fold(1.0, f64::max).powi(5);
        let best = mc.eval(&x).iter().map(|z| z.norm()).fold(0.0, f64::max) / scale;
        weakest = weakest.min(best);
    }
    r.check("Jacobian has rank 2 at 50 random points off u = v", weakest > 1e-10, format!("smallest scaled max minor {weakest:.3e}"));
    Ok(r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;

    fn rng() -> rand_chacha::ChaCha8Rng {
        rand_chacha::ChaCha8Rng::seed_from_u64(3)
    }

    #[test]
    fn membership_of_every_entry() {
        let mut rng = rng();
        for e in catalogue() {
            let r = verify_membership(e, &mut rng).unwrap();
            assert!(r.passed(), "{r:?}");
        }
        assert_eq!(semiconjugacy_entries().len(), 10);
    }

    #[test]
    fn semiconjugacy_examples() {
        let cc = entry("C_C").unwrap();
        let img = induced_morphism(2, 2).unwrap().map.after(&cc.param).unwrap();
        assert_eq!(img.component(0), &qpoly_in("(z^2 - 1)^2", &["z"]));
        assert_eq!(img.component(1), &qpoly_in("(z^2 - 1)^3", &["z"]));
        let g2 = induced_morphism(2, 2).unwrap();
        assert_eq!(g2.map.evaluate(&[rat(7, 1), rat(37, 2)]), vec![rat(3, 1), rat(9, 2)]);
        let g = induced_morphism(3, 2).unwrap();
        assert_eq!(g.map.evaluate(&ints(&[16, 36, 96, 256])), ints(&[16, 36, 96, 256]));
        for e in semiconjugacy_entries() {
            for d in 2..=3 {
                let r = verify_semiconjugacy(e, d).unwrap();
                assert!(r.passed(), "{r:?}");
            }
        }
        assert!(matches!(verify_semiconjugacy(entry("L_1").unwrap(), 2), Err(AlgebraError::RuleMismatch(_))));
        assert!(verify_semigroup_on_variety(entry("S_A").unwrap(), 2, 2).unwrap().passed());
    }

    #[test]
    fn rule_maps() {
        let t = vec!["t".to_string()];
        let sq = rule_map(ParamRule::Square(1), &t, 2).unwrap();
        assert_eq!(sq.component(0), &qpoly_in("(t - 2)^2", &["t"]));
        let sh = rule_map(ParamRule::Shift(2), &t, 2).unwrap();
        assert_eq!(sh.component(0), &qpoly_in("(t - 2)^2", &["t"]));
    }

    #[test]
    fn json_round_trip() {
        let j = catalogue_json();
        let text = serde_json::to_string(&j).unwrap();
        let back: CatalogueJson = serde_json::from_str(&text).unwrap();
        assert_eq!(load_catalogue(&back).unwrap(), catalogue().to_vec());
    }

    #[test]
    fn branch_n2() {
        let r = branch_report_n2().unwrap();
        assert!(r.passed(), "{r:#?}");
    }

    #[test]
    fn branch_n3() {
        let r = branch_report_n3(&mut rng()).unwrap();
        assert!(r.passed(), "{r:#?}");
        let f = qpoly_in("u^2 v^2 + u v", &["u", "v"]);
        assert_eq!(even_rewrite(&f, "u", "v").unwrap(), qpoly_in("b d + c", &["b", "c", "d"]));
    }

    #[test]
    fn preimages() {
        let mut rng = rng();
        for case in PREIMAGE_CASES {
            let r = verify_preimage_varieties(case, &mut rng).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn fixed_and_preperiodic() {
        for d in 1..=6 {
            let r = verify_fixed_and_preperiodic(d).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn cone_maps() {
        let h2 = h_d_map(2).unwrap();
        assert_eq!(h2.evaluate(&ints(&[4, 4, 4])), ints(&[4, 4, 4]));
        for d in 2..=4 {
            let r = verify_cone_birationality(d, &mut rng()).unwrap();
            assert!(r.passed(), "{r:#?}");
        }
    }

    #[test]
    fn family_and_slopes() {
        let (dp, _, slope) = c2k3_slope(1);
        assert_eq!(dp, rat(6, 1));
        assert_eq!(slope, rat(23, 6));
        let r = invariant_family(2, 3, 2).unwrap();
        assert!(r.passed(), "{r:#?}");
        assert!(invariant_family(1, 1, 3).unwrap().passed());
    }

    #[test]
    fn surfaces() {
        let r = verify_surface_intersection().unwrap();
        assert!(r.passed(), "{r:#?}");
        let r = verify_astroid_structure(&mut rng()).unwrap();
        assert!(r.passed(), "{r:#?}");
    }
}
