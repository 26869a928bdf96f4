use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{InlsError, Result};
use crate::model::grid::Grid;
use crate::model::params::ProblemParams;

/// Parameters, grid and the discretized weight `|x|^{-b}` bundled together.
#[derive(Debug)]
pub struct Model {
    params: ProblemParams,
    grid: Arc<Grid>,
    potential: Vec<f64>,
}

impl Model {
    pub fn new(params: ProblemParams, grid: Arc<Grid>) -> Result<Arc<Model>> {
        if grid.dim() != params.dim {
            let msg = if grid.is_radial() {
                format!("radial grid is {}-dimensional but params have dim = {}", grid.dim(), params.dim)
            } else {
                format!("line geometry implies dim = 1, got dim = {}", params.dim)
            };
            return Err(InlsError::invalid("dim", msg));
        }
        if !grid.is_radial() && params.b >= 1.0 {
            return Err(InlsError::invalid("b", "b must be below the dimension"));
        }
        let potential = grid.potential_weights(params.b);
        Ok(Arc::new(Model { params, grid, potential }))
    }

    pub fn params(&self) -> &ProblemParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<Grid> {
        &self.grid
    }

    /// Nodal factors `W_j` standing in for `|x_j|^{-b}` under the grid quadrature.
    pub fn potential_weights(&self) -> &[f64] {
        &self.potential
    }

    pub fn zeros(self: &Arc<Self>) -> Field {
        Field {
            values: vec![Complex64::new(0.0, 0.0); self.grid.len()],
            model: Arc::clone(self),
        }
    }

    /// Samples `f` at the nodes (`x` on the line, `r` on radial grids).
    pub fn sample(self: &Arc<Self>, f: impl Fn(f64) -> Complex64) -> Field {
        Field {
            values: self.grid.nodes().iter().map(|&x| f(x)).collect(),
            model: Arc::clone(self),
        }
    }

    pub fn sample_real(self: &Arc<Self>, f: impl Fn(f64) -> f64) -> Field {
        self.sample(|x| Complex64::new(f(x), 0.0))
    }
}

/// Complex grid function.
#[derive(Debug, Clone)]
pub struct Field {
    values: Vec<Complex64>,
    model: Arc<Model>,
}

impl Field {
    pub fn new(model: &Arc<Model>, values: Vec<Complex64>) -> Result<Field> {
        if values.len() != model.grid.len() {
            return Err(InlsError::invalid(
                "values",
                format!("expected {} values, got {}", model.grid.len(), values.len()),
            ));
        }
        if let Some(j) = values.iter().position(|v| !(v.re.is_finite() && v.im.is_finite())) {
            return Err(InlsError::invalid("values", format!("non-finite value at node {j}")));
        }
        Ok(Field {
            values,
            model: Arc::clone(model),
        })
    }

    pub fn from_real(model: &Arc<Model>, values: &[f64]) -> Result<Field> {
        Field::new(model, values.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Skips the finiteness scan; for internal results of finite operations.
    pub(crate) fn from_parts(model: &Arc<Model>, values: Vec<Complex64>) -> Field {
        debug_assert_eq!(values.len(), model.grid.len());
        Field {
            values,
            model: Arc::clone(model),
        }
    }

    pub fn values(&self) -> &[Complex64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [Complex64] {
        &mut self.values
    }

    pub(crate) fn values_mut_vec(&mut self) -> &mut Vec<Complex64> {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<Complex64> {
        self.values
    }

    pub fn model(&self) -> &Arc<Model> {
        &self.model
    }

    pub fn params(&self) -> &ProblemParams {
        &self.model.params
    }

    pub fn grid(&self) -> &Grid {
        &self.model.grid
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }

    pub fn real_parts(&self) -> Vec<f64> {
        self.values.iter().map(|v| v.re).collect()
    }

    pub fn map(&self, f: impl Fn(Complex64) -> Complex64) -> Field {
        Field::from_parts(&self.model, self.values.iter().map(|&v| f(v)).collect())
    }

    /// `f(x_j, u_j)` pointwise.
    pub fn map_with_node(&self, f: impl Fn(f64, Complex64) -> Complex64) -> Field {
        let nodes = self.model.grid.nodes();
        Field::from_parts(&self.model, nodes.iter().zip(&self.values).map(|(&x, &v)| f(x, v)).collect())
    }

    pub fn scale(&self, c: Complex64) -> Field {
        self.map(|v| v * c)
    }

    pub fn scale_real(&self, c: f64) -> Field {
        self.map(|v| v * c)
    }

    /// Multiplies by `e^{iθ}`.
    pub fn rotate(&self, theta: f64) -> Field {
        self.scale(Complex64::from_polar(1.0, theta))
    }

    pub fn add(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field) -> Field {
        self.zip(other, |a, b| a - b)
    }

    fn zip(&self, other: &Field, f: impl Fn(Complex64, Complex64) -> Complex64) -> Field {
        assert_eq!(self.len(), other.len(), "fields live on different grids");
        Field::from_parts(
            &self.model,
            self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        )
    }

    /// `Σ w_j conj(u_j) v_j`.
    pub fn inner(&self, other: &Field) -> Complex64 {
        let w = self.model.grid.weights();
        self.values
            .iter()
            .zip(&other.values)
            .zip(w)
            .map(|((a, b), &w)| a.conj() * b * w)
            .sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).re.max(0.0).sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.norm()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_mismatched_dimension() {
        let grid = Grid::line(5.0, 64).unwrap();
        let p = ProblemParams::new(2, 0.75, 0.5).unwrap();
        assert!(Model::new(p, grid).is_err());
        let grid = Grid::radial(3, 5.0, 64).unwrap();
        let p = ProblemParams::new(2, 0.75, 0.5).unwrap();
        assert!(Model::new(p, grid).is_err());
    }

    #[test]
    fn rejects_non_finite_values() {
        let grid = Grid::line(5.0, 8).unwrap();
        let m = Model::new(ProblemParams::new(1, 1.5, 0.5).unwrap(), grid).unwrap();
        let mut v = vec![Complex64::new(1.0, 0.0); 8];
        v[3] = Complex64::new(f64::NAN, 0.0);
        assert!(Field::new(&m, v).is_err());
        assert!(Field::new(&m, vec![Complex64::new(0.0, 0.0); 7]).is_err());
    }
}
