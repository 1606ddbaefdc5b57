use std::sync::Arc;

use num_complex::Complex;
use num_traits::Float;
use serde::{Deserialize, Serialize};

use super::json::{from_json, to_json, PolyJson};
use super::poly::{canonical_vars, HornerTree, MultiPoly};
use super::scalar::Scalar;
use super::text::to_text;
use crate::error::AlgebraError;

/// Tuple of polynomials over a shared, ordered list of source variables.
/// Positional inputs (points, composition) follow `source_vars` order.
#[derive(Clone, Debug)]
pub struct PolyMap<C> {
    source_vars: Vec<String>,
    components: Vec<MultiPoly<C>>,
}

impl<C: Scalar> PolyMap<C> {
    /// Components are re-expressed over exactly `source_vars`; a component
    /// using any other variable is rejected.
    pub fn new<S: AsRef<str>>(source_vars: &[S], components: Vec<MultiPoly<C>>) -> Result<Self, AlgebraError> {
        let source_vars: Vec<String> = source_vars.iter().map(|s| s.as_ref().to_string()).collect();
        let vars: Arc<[String]> = canonical_vars(&source_vars);
        if vars.len() != source_vars.len() {
            return Err(AlgebraError::Malformed("repeated source variable".into()));
        }
        let mut comps = Vec::with_capacity(components.len());
        for c in components {
            if let Some(v) = c.used_vars().into_iter().find(|v| !source_vars.contains(v)) {
                return Err(AlgebraError::Malformed(format!("component uses undeclared variable {v}")));
            }
            comps.push(c.with_vars(&vars));
        }
        Ok(PolyMap { source_vars, components: comps })
    }

    pub fn identity<S: AsRef<str>>(vars: &[S]) -> Self {
        let comps = vars.iter().map(|v| MultiPoly::var(vars, v.as_ref())).collect();
        Self::new(vars, comps).expect("identity map")
    }

    pub fn source_vars(&self) -> &[String] {
        &self.source_vars
    }

    pub fn components(&self) -> &[MultiPoly<C>] {
        &self.components
    }

    pub fn component(&self, i: usize) -> &MultiPoly<C> {
        &self.components[i]
    }

    pub fn arity_in(&self) -> usize {
        self.source_vars.len()
    }

    pub fn arity_out(&self) -> usize {
        self.components.len()
    }

    /// Substitute `inputs[i]` for the i-th source variable in every component.
    pub fn apply(&self, inputs: &[MultiPoly<C>]) -> Vec<MultiPoly<C>> {
        assert_eq!(inputs.len(), self.source_vars.len(), "one input per source variable");
        let bindings: Vec<(&str, &MultiPoly<C>)> =
            self.source_vars.iter().map(|s| s.as_str()).zip(inputs.iter()).collect();
        self.components.iter().map(|c| c.substitute(&bindings)).collect()
    }

    /// `self ∘ inner`.
    pub fn after(&self, inner: &PolyMap<C>) -> Result<PolyMap<C>, AlgebraError> {
        if inner.arity_out() != self.arity_in() {
            return Err(AlgebraError::Arity { expected: self.arity_in(), got: inner.arity_out() });
        }
        PolyMap::new(&inner.source_vars, self.apply(&inner.components))
    }

    pub fn evaluate(&self, point: &[C]) -> Vec<C> {
        self.apply_named(point, |c, pt| c.evaluate(pt))
    }

    pub fn evaluate_complex<F: Float>(&self, point: &[Complex<F>]) -> Vec<Complex<F>> {
        self.apply_named(point, |c, pt| c.evaluate_complex(pt))
    }

    fn apply_named<T: Clone, R>(&self, point: &[T], f: impl Fn(&MultiPoly<C>, &[T]) -> R) -> Vec<R> {
        assert_eq!(point.len(), self.source_vars.len(), "point arity");
        let order = self.canonical_positions();
        let reordered: Vec<T> = order.iter().map(|&i| point[i].clone()).collect();
        self.components.iter().map(|c| f(c, &reordered)).collect()
    }

    /// For each canonical variable slot, its index in `source_vars`.
    fn canonical_positions(&self) -> Vec<usize> {
        let vars = canonical_vars(&self.source_vars);
        vars.iter().map(|v| self.source_vars.iter().position(|s| s == v).unwrap()).collect()
    }

    pub fn compile<F: Float>(&self) -> CompiledMap<F> {
        CompiledMap {
            order: self.canonical_positions(),
            trees: self.components.iter().map(HornerTree::compile).collect(),
        }
    }

    pub fn map_coeffs<D: Scalar>(&self, f: impl Fn(&C) -> D + Copy) -> PolyMap<D> {
        PolyMap {
            source_vars: self.source_vars.clone(),
            components: self.components.iter().map(|c| c.map_coeffs(f)).collect(),
        }
    }

    pub fn to_texts(&self) -> Vec<String> {
        self.components.iter().map(to_text).collect()
    }

    pub fn is_integral(&self) -> bool {
        self.components.iter().all(|c| c.is_integral())
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            source_vars: self.source_vars.clone(),
            components: self.components.iter().map(to_json).collect(),
        }
    }

    pub fn from_json(j: &MapJson) -> Result<Self, AlgebraError> {
        let comps: Result<Vec<MultiPoly<C>>, AlgebraError> = j.components.iter().map(from_json).collect();
        Self::new(&j.source_vars, comps?)
    }
}

impl<C: Scalar> PartialEq for PolyMap<C> {
    fn eq(&self, other: &Self) -> bool {
        self.source_vars == other.source_vars && self.components == other.components
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MapJson {
    pub source_vars: Vec<String>,
    pub components: Vec<PolyJson>,
}

/// Floating point evaluator for a [`PolyMap`]; points follow `source_vars`.
#[derive(Clone, Debug)]
pub struct CompiledMap<F> {
    order: Vec<usize>,
    trees: Vec<HornerTree<F>>,
}

impl<F: Float> CompiledMap<F> {
    pub fn eval(&self, point: &[Complex<F>]) -> Vec<Complex<F>> {
        let reordered: Vec<Complex<F>> = self.order.iter().map(|&i| point[i]).collect();
        self.trees.iter().map(|t| t.eval(&reordered)).collect()
    }

    pub fn arity_out(&self) -> usize {
        self.trees.len()
    }
}
