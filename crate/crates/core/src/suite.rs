//! Grouped verification runs shared by the CLI and the acceptance target.

use rand::Rng;

use crate::algebra::to_text;
use crate::catalog::{
    branch_report_n2, branch_report_n3, c2k3_slope, entry, semiconjugacy_entries, verify_cone_birationality,
    verify_fixed_and_preperiodic, verify_semiconjugacy,
};
use crate::chebyshev::{oracle_agreement, real_form, verify_equivariance, verify_semigroup_endo, DEFAULT_DEGREE_CAP};
use crate::dynamics::{
    classify_special_points, count_generic_preimages, jordan_curve_data, jordan_endpoints_ok, k_set_report,
    DEFAULT_ESCAPE_RADIUS, DEFAULT_MAX_ITER,
};
use crate::error::{AlgebraError, LabError};
use crate::invariants::{
    image_contract, induced_morphism, molien_series, syzygy_normal_form, verify_semigroup_induced, MolienGroup,
};
use crate::report::Report;
use crate::{qpoly_in, rat, QMap, Rational};

/// Fold a fallible sub-report into `r`, recording an error as a failure.
pub fn absorb<E: std::fmt::Display>(r: &mut Report, name: &str, res: Result<Report, E>) {
    match res {
        Ok(sub) => r.absorb(sub),
        Err(e) => r.fail(name, e),
    }
}

/// Canonical text of the components of `g_d` on the orbit variety of `C^n`.
pub fn derive_texts(n: usize, d: u32, cap: u32) -> Result<Vec<String>, AlgebraError> {
    let g = crate::invariants::induced_morphism_capped(n, d, cap)?;
    Ok(g.map.components().iter().map(to_text).collect())
}

fn compare_map(r: &mut Report, label: &str, got: &QMap, want: &[&str], reduce: bool) {
    let vars: Vec<&str> = got.source_vars().iter().map(|s| s.as_str()).collect();
    for (i, (c, w)) in got.components().iter().zip(want).enumerate() {
        let mut w = qpoly_in(w, &vars);
        if reduce {
            w = syzygy_normal_form(&w);
        }
        r.check(format!("{label} component {}", i + 1), c == &w, to_text(c));
    }
    r.check(format!("{label} has {} components", want.len()), got.components().len() == want.len(), "");
}

/// Induced maps and real forms against their displayed formulas.
pub fn formula_report() -> Result<Report, AlgebraError> {
    let mut r = Report::new("displayed formulas");
    compare_map(&mut r, "g_2 on C^2/D3", &induced_morphism(2, 2)?.map, &["p^2 + 4p - 4q", "2q^2 - 6p q - p^3 + 12p^2 - 8q"], false);
    compare_map(
        &mut r,
        "g_3 on C^2/D3",
        &induced_morphism(2, 3)?.map,
        &[
            "p^3 + 9p^2 - 6p q + 6q - 18p + 9",
            "4q^3 - 18p q^2 - 3p^3 q + 9p^4 + 27p^2 q - 36p^3 + 18q^2 - 54p q + 81p^2 + 27q - 81p + 27",
        ],
        false,
    );
    compare_map(
        &mut r,
        "g_2 on C^3/D4",
        &induced_morphism(3, 2)?.map,
        &["p^2 + 4q - 4r", "(q - 2p + 2)^2", "(q - 2p + 2)(2s - p^2 + 4q - 4r)", "(2s - p^2 + 4q - 4r)^2"],
        true,
    );
    compare_map(&mut r, "f_2 on R^2", &real_form(2, 2)?.map, &["x^2 - y^2 - 2x", "2x y + 2y"], false);
    compare_map(&mut r, "f_3 on R^2", &real_form(2, 3)?.map, &["x^3 - 3x y^2 - 3x^2 - 3y^2 + 3", "3x^2 y - y^3"], false);
    compare_map(&mut r, "f_2 on R^3", &real_form(3, 2)?.map, &["x^2 - y^2 - 2z", "2x y", "z^2 - 2x^2 - 2y^2 + 2"], false);
    Ok(r)
}

/// Equivariance, semigroup laws, integrality, the image contract and every
/// semiconjugacy for degrees up to `max_d`.
pub fn identity_report(max_d: u32, cap: u32) -> Report {
    let mut r = Report::new(format!("identities d <= {max_d}"));
    for n in [2, 3] {
        for d in 1..=max_d {
            absorb(&mut r, &format!("equivariance n={n} d={d}"), verify_equivariance(n, d));
        }
        for j in 1..=cap {
            for k in 1..=cap / j {
                absorb(&mut r, &format!("T_{j} o T_{k} n={n}"), verify_semigroup_endo(n, j, k, cap));
            }
        }
        for e in 1..=max_d {
            for d in 1..=max_d / e {
                absorb(&mut r, &format!("g_{e} o g_{d} n={n}"), verify_semigroup_induced(n, e, d, max_d));
            }
        }
        for d in 1..=max_d {
            match induced_morphism(n, d) {
                Ok(g) => {
                    r.check(format!("n={n} g_{d} integral"), g.map.is_integral(), "");
                    r.check(format!("n={n} g_{d} image contract"), image_contract(&g), "");
                }
                Err(e) => r.fail(format!("n={n} g_{d}"), e),
            }
        }
    }
    for e in semiconjugacy_entries() {
        for d in 1..=max_d {
            absorb(&mut r, &format!("{} d={d}", e.name), verify_semiconjugacy(e, d));
        }
    }
    r
}

pub fn branch_report<R: Rng>(rng: &mut R) -> Report {
    let mut r = Report::new("branch algebra");
    absorb(&mut r, "n=2", branch_report_n2());
    absorb(&mut r, "n=3", branch_report_n3(rng));
    r
}

/// Generic degrees 4, 9, 8 and the special-point counts.
pub fn degree_report<R: Rng>(trials: usize, min_agreement: f64, rng: &mut R) -> Report {
    let mut r = Report::new("preimage counts");
    for (n, d, want) in [(2, 2, 4), (2, 3, 9), (3, 2, 8)] {
        match count_generic_preimages(n, d, trials, rng) {
            Ok(c) => r.absorb(c.report(want, min_agreement)),
            Err(e) => r.fail(format!("n={n} d={d}"), e),
        }
    }
    for d in [2, 3] {
        absorb(&mut r, &format!("special d={d}"), classify_special_points(d));
    }
    r
}

/// Exact fixed points, the Jordan curve and sampled bounded sets.
pub fn dynamics_report(samples: usize) -> Report {
    let mut r = Report::new("dynamics fixtures");
    for d in 1..=8 {
        absorb(&mut r, &format!("d={d}"), verify_fixed_and_preperiodic(d));
    }
    match jordan_curve_data(257) {
        Ok(pts) => {
            r.check("arcs share exactly (1, -1) and (9, 27)", jordan_endpoints_ok(&pts), "");
        }
        Err(e) => r.fail("jordan curve", e),
    }
    absorb::<LabError>(&mut r, "bounded sets", k_set_report(samples, 2, DEFAULT_MAX_ITER, DEFAULT_ESCAPE_RADIUS));
    r
}

/// Cone birationality for `d <= max_d` and the slopes of `C_{2k,3}`.
pub fn cone_family_report<R: Rng>(max_d: u32, max_k: u32, rng: &mut R) -> Report {
    let mut r = Report::new("cone and families");
    for d in 1..=max_d {
        absorb(&mut r, &format!("cone d={d}"), verify_cone_birationality(d, rng));
    }
    for k in 1..=max_k {
        let (_, _, slope) = c2k3_slope(k);
        let k = k as i64;
        let want = rat(5, 2) + rat(4, 4 * k * k - 1);
        r.check(format!("C_{{{},3}} slope = 5/2 + 4/(4k^2 - 1)", 2 * k), slope == want, format!("{slope}"));
    }
    r
}

pub const MOLIEN_D3: [i64; 10] = [1, 0, 1, 1, 1, 1, 2, 1, 2, 2];
pub const MOLIEN_D4: [i64; 10] = [1, 0, 2, 1, 4, 2, 6, 4, 9, 6];

pub fn molien_report() -> Report {
    let mut r = Report::new("Molien series");
    for (label, group, want) in [("D3 on R^2", MolienGroup::D3OnR2, MOLIEN_D3), ("D4 on R^3", MolienGroup::D4OnR3, MOLIEN_D4)] {
        match molien_series(group, 9) {
            Ok(got) => {
                let want: Vec<Rational> = want.iter().map(|&x| rat(x, 1)).collect();
                let shown: Vec<String> = got.iter().map(|c| c.to_string()).collect();
                r.check(format!("{label} first 10 coefficients"), got == want, shown.join(", "));
            }
            Err(e) => r.fail(label, e),
        }
    }
    r
}

/// Closed form against the root-tuple oracle for `n = 2, 3` and `d <= max_d`.
pub fn oracle_report<R: Rng>(max_d: u32, points: usize, tol: f64, rng: &mut R) -> Report {
    let mut r = Report::new("oracle agreement");
    for n in [2, 3] {
        for d in 1..=max_d {
            match oracle_agreement(n, d, points, rng) {
                Ok(worst) => {
                    r.check(format!("n={n} d={d} within {tol:e}"), worst < tol, format!("{worst:.3e}"));
                }
                Err(e) => r.fail(format!("n={n} d={d}"), e),
            }
        }
    }
    r
}

/// Membership and semiconjugacy of one catalogue entry up to `max_d`.
pub fn entry_report<R: Rng>(name: &str, max_d: u32, rng: &mut R) -> Report {
    let mut r = Report::new(format!("entry {name}"));
    let e = match entry(name) {
        Ok(e) => e,
        Err(err) => {
            r.fail("lookup", err);
            return r;
        }
    };
    absorb(&mut r, "membership", crate::catalog::verify_membership(e, rng));
    for d in 1..=max_d.min(DEFAULT_DEGREE_CAP) {
        if e.rule_applies(d) {
            absorb(&mut r, &format!("d={d}"), verify_semiconjugacy(e, d));
        }
    }
    r
}
