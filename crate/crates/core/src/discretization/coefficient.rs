use std::fmt;
use std::sync::Arc;

use crate::mesh::Point2;

/// Smoothness class of a coefficient, relative to the mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Regularity {
    /// Constant on every triangle; FE and FVE operators coincide.
    PiecewiseConstantPerElement,
    /// Lipschitz inside each region, possibly varying within triangles.
    SmoothPerRegion,
}

type Evaluator = dyn Fn(Point2, u32) -> f64 + Send + Sync;

/// Diffusion coefficient `α(x)`, evaluated with the region tag of the
/// triangle the sample belongs to so that element-aligned jumps are never
/// sampled ambiguously.
#[derive(Clone)]
pub struct CoefficientField {
    eval: Arc<Evaluator>,
    regularity: Regularity,
}

impl fmt::Debug for CoefficientField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CoefficientField")
            .field("regularity", &self.regularity)
            .finish_non_exhaustive()
    }
}

impl CoefficientField {
    pub fn new<F>(regularity: Regularity, f: F) -> Self
    where
        F: Fn(Point2, u32) -> f64 + Send + Sync + 'static,
    {
        CoefficientField {
            eval: Arc::new(f),
            regularity,
        }
    }

    pub fn constant(c: f64) -> Self {
        Self::new(Regularity::PiecewiseConstantPerElement, move |_, _| c)
    }

    /// `values[tag]` on triangles carrying region tag `tag`.
    pub fn per_region(values: Vec<f64>) -> Self {
        Self::new(Regularity::PiecewiseConstantPerElement, move |_, r| values[r as usize])
    }

    /// `2 + sin(kπx) sin(kπy)`.
    pub fn sinusoidal(frequency: f64) -> Self {
        Self::new(Regularity::SmoothPerRegion, move |p, _| sinusoid(frequency, p))
    }

    #[inline]
    pub fn eval(&self, p: Point2, region: u32) -> f64 {
        (self.eval)(p, region)
    }

    pub fn regularity(&self) -> Regularity {
        self.regularity
    }

    /// `c α`.
    pub fn scaled(&self, c: f64) -> Self {
        let inner = self.eval.clone();
        Self::new(self.regularity, move |p, r| c * inner(p, r))
    }
}

/// `2 + sin(kπx) sin(kπy)`
pub fn sinusoid(frequency: f64, p: Point2) -> f64 {
    use std::f64::consts::PI;
    2.0 + (frequency * PI * p.x).sin() * (frequency * PI * p.y).sin()
}
