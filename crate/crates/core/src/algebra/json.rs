use num_bigint::BigInt;
use serde::{Deserialize, Serialize};

use super::poly::MultiPoly;
use super::scalar::Scalar;
use crate::error::AlgebraError;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exp: Vec<u32>,
    /// Conductor of the coefficient field (1, 3 or 4).
    pub k: u8,
    pub num: Vec<String>,
    pub den: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolyJson {
    pub vars: Vec<String>,
    pub terms: Vec<TermJson>,
}

pub fn to_json<C: Scalar>(p: &MultiPoly<C>) -> PolyJson {
    PolyJson {
        vars: p.vars().to_vec(),
        terms: p
            .terms()
            .map(|(m, c)| {
                let (k, num, den) = c.to_parts();
                TermJson {
                    exp: m.exps().to_vec(),
                    k,
                    num: num.iter().map(|n| n.to_string()).collect(),
                    den: den.to_string(),
                }
            })
            .collect(),
    }
}

fn big(s: &str) -> Result<BigInt, AlgebraError> {
    s.parse().map_err(|_| AlgebraError::Malformed(format!("bad integer {s:?}")))
}

pub fn from_json<C: Scalar>(j: &PolyJson) -> Result<MultiPoly<C>, AlgebraError> {
    let mut terms = Vec::with_capacity(j.terms.len());
    for t in &j.terms {
        if t.exp.len() != j.vars.len() {
            return Err(AlgebraError::Arity { expected: j.vars.len(), got: t.exp.len() });
        }
        let num: Result<Vec<BigInt>, _> = t.num.iter().map(|s| big(s)).collect();
        let c = C::from_parts(t.k, &num?, &big(&t.den)?)
            .ok_or_else(|| AlgebraError::Malformed("coefficient outside the scalar field".into()))?;
        terms.push((t.exp.clone(), c));
    }
    Ok(MultiPoly::from_terms(&j.vars, terms))
}
