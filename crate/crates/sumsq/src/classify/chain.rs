use num_traits::One;

use super::normal_form::xy;
use crate::error::Result;
use crate::{Rational, Series};

/// One coordinate change: `current ∘ images = unit · next`.
#[derive(Clone, Debug, PartialEq)]
pub struct ChainStep {
    pub label: String,
    pub images: Vec<Series>,
    pub unit: Series,
}

/// Steps applied so far, with the running totals `F ∘ Φ = U · current`.
#[derive(Clone, Debug)]
pub(crate) struct Chain {
    pub steps: Vec<ChainStep>,
    pub phi: Vec<Series>,
    pub unit: Series,
    current: Series,
}

pub(crate) fn identity_images() -> Vec<Series> {
    (0..2).map(|i| Series::var(xy(), i)).collect()
}

impl Chain {
    pub fn new(f: &Series) -> Self {
        Self { steps: Vec::new(), phi: identity_images(), unit: Series::one(xy()), current: f.clone() }
    }

    pub fn current(&self) -> &Series {
        &self.current
    }

    pub fn push(&mut self, label: impl Into<String>, images: Vec<Series>, unit: Series, next: Series) -> Result<()> {
        self.phi = self.phi.iter().map(|p| p.substitute(&images)).collect::<Result<Vec<_>>>()?;
        self.unit = &self.unit.substitute(&images)? * &unit;
        self.steps.push(ChainStep { label: label.into(), images, unit });
        self.current = next;
        Ok(())
    }

    /// Apply `images` to the current series and divide by the constant `c`.
    pub fn push_scaled(&mut self, label: &str, images: Vec<Series>, c: Rational) -> Result<()> {
        let next = self.current.substitute(&images)?.scalar_mul(&(Rational::one() / &c));
        self.push(label, images, Series::constant(xy(), c), next)
    }

    /// Apply `images` with unit one.
    pub fn push_plain(&mut self, label: &str, images: Vec<Series>) -> Result<()> {
        let next = self.current.substitute(&images)?;
        self.push(label, images, Series::one(xy()), next)
    }

    /// Order below which `F ∘ Φ - U · current` vanishes.
    pub fn verify(&self, f: &Series) -> Result<u32> {
        let r = &f.substitute(&self.phi)? - &(&self.unit * &self.current);
        Ok(r.order().lower_bound())
    }
}
