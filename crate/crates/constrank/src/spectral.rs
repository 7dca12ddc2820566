//! Grid fields on the unit torus, discrete Fourier transforms and Fourier
//! coefficients of edge measures.
//!
//! Coefficients use the analytic normalization: for samples at `x = p/N`,
//! the forward transform returns `c(k) = (1/N^2) sum_x f(x) exp(-2 pi i k.x)`
//! so that `f(x) = sum_k c(k) exp(2 pi i k.x)` and smooth-function
//! coefficients match their integrals (`cos(2 pi x_1)` has coefficient `1/2`
//! at `k = (+-1, 0)`). Frequencies live in the symmetric band
//! `{-N/2, .., N/2 - 1}` per axis and differential symbols are evaluated at
//! `2 pi i k`.

use num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("grid size {0} is not a power of two")]
    BadSize(usize),
    #[error("edge trace with {samples} samples cannot resolve kmax = {kmax} (needs >= 4*kmax)")]
    UnderResolved { samples: usize, kmax: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

/// Which space the values of a [`TorusField`] live in.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Space {
    Physical,
    Coefficient,
}

/// `d`-component complex field on an `N x N` periodic grid (row-major,
/// node `(p1, p2)` at `x = (p1/N, p2/N)`), or its coefficient table.
#[derive(Clone, Debug)]
pub struct TorusField {
    n_grid: usize,
    components: usize,
    space: Space,
    data: Vec<Vec<Complex64>>,
}

impl TorusField {
    pub fn zeros(n_grid: usize, components: usize, space: Space) -> Result<Self, SpectralError> {
        if !n_grid.is_power_of_two() {
            return Err(SpectralError::BadSize(n_grid));
        }
        Ok(Self {
            n_grid,
            components,
            space,
            data: vec![vec![Complex64::new(0.0, 0.0); n_grid * n_grid]; components],
        })
    }

    /// Builds a physical-space field by sampling `f(x1, x2)` at the nodes.
    pub fn from_fn(
        n_grid: usize,
        components: usize,
        mut f: impl FnMut(f64, f64) -> Vec<f64>,
    ) -> Result<Self, SpectralError> {
        let mut field = Self::zeros(n_grid, components, Space::Physical)?;
        for p1 in 0..n_grid {
            for p2 in 0..n_grid {
                let x1 = p1 as f64 / n_grid as f64;
                let x2 = p2 as f64 / n_grid as f64;
                let v = f(x1, x2);
                assert_eq!(v.len(), components, "component count from sampler");
                for (c, val) in v.iter().enumerate() {
                    field.data[c][p1 * n_grid + p2] = Complex64::new(*val, 0.0);
                }
            }
        }
        Ok(field)
    }

    pub fn from_real_samples(
        n_grid: usize,
        components: usize,
        samples: &[Vec<f64>],
    ) -> Result<Self, SpectralError> {
        if samples.len() != n_grid * n_grid {
            return Err(SpectralError::Shape(format!(
                "expected {} nodes, got {}",
                n_grid * n_grid,
                samples.len()
            )));
        }
        let mut field = Self::zeros(n_grid, components, Space::Physical)?;
        for (node, row) in samples.iter().enumerate() {
            if row.len() != components {
                return Err(SpectralError::Shape(format!(
                    "node {node} has {} components, expected {components}",
                    row.len()
                )));
            }
            for (c, val) in row.iter().enumerate() {
                field.data[c][node] = Complex64::new(*val, 0.0);
            }
        }
        Ok(field)
    }

    pub fn n_grid(&self) -> usize {
        self.n_grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn space(&self) -> Space {
        self.space
    }

    pub fn at(&self, component: usize, p1: usize, p2: usize) -> Complex64 {
        self.data[component][p1 * self.n_grid + p2]
    }

    pub fn at_mut(&mut self, component: usize, p1: usize, p2: usize) -> &mut Complex64 {
        &mut self.data[component][p1 * self.n_grid + p2]
    }

    /// Symmetric-band frequency of an FFT index.
    pub fn frequency_of_index(&self, idx: usize) -> i64 {
        let n = self.n_grid as i64;
        let k = idx as i64;
        if k < n / 2 {
            k
        } else {
            k - n
        }
    }

    /// All `(index pair, frequency pair)` combinations.
    pub fn frequencies(&self) -> Vec<((usize, usize), (i64, i64))> {
        let n = self.n_grid;
        let mut out = Vec::with_capacity(n * n);
        for i1 in 0..n {
            for i2 in 0..n {
                out.push((
                    (i1, i2),
                    (self.frequency_of_index(i1), self.frequency_of_index(i2)),
                ));
            }
        }
        out
    }

    /// Mean-square norm: `(1/N^2) sum_x |f(x)|^2` in physical space, or the
    /// plain coefficient sum-of-squares in coefficient space.
    pub fn norm_sq(&self) -> f64 {
        let raw: f64 = self
            .data
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm_sqr()))
            .sum();
        match self.space {
            Space::Physical => raw / (self.n_grid * self.n_grid) as f64,
            Space::Coefficient => raw,
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data
            .iter()
            .flat_map(|c| c.iter().map(|z| z.norm()))
            .fold(0.0, f64::max)
    }
}

fn fft2_inplace(data: &mut [Complex64], n: usize, inverse: bool) {
    let mut planner = FftPlanner::new();
    let fft = if inverse {
        planner.plan_fft_inverse(n)
    } else {
        planner.plan_fft_forward(n)
    };
    // rows
    for r in 0..n {
        fft.process(&mut data[r * n..(r + 1) * n]);
    }
    // columns via transpose, fft, transpose back
    let mut col = vec![Complex64::new(0.0, 0.0); n];
    for c in 0..n {
        for r in 0..n {
            col[r] = data[r * n + c];
        }
        fft.process(&mut col);
        for r in 0..n {
            data[r * n + c] = col[r];
        }
    }
}

/// Forward transform into the coefficient table (analytic normalization).
pub fn dft2(f: &TorusField) -> Result<TorusField, SpectralError> {
    if f.space != Space::Physical {
        return Err(SpectralError::Shape("dft2 expects physical space".into()));
    }
    let n = f.n_grid;
    let scale = 1.0 / (n * n) as f64;
    let mut out = f.clone();
    out.space = Space::Coefficient;
    for comp in &mut out.data {
        fft2_inplace(comp, n, false);
        for z in comp.iter_mut() {
            *z *= scale;
        }
    }
    Ok(out)
}

/// Inverse transform back to grid samples.
pub fn idft2(c: &TorusField) -> Result<TorusField, SpectralError> {
    if c.space != Space::Coefficient {
        return Err(SpectralError::Shape(
            "idft2 expects coefficient space".into(),
        ));
    }
    let n = c.n_grid;
    let mut out = c.clone();
    out.space = Space::Physical;
    for comp in &mut out.data {
        fft2_inplace(comp, n, true);
    }
    Ok(out)
}

/// Edge of the square carrying an edge measure.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Edge {
    /// `Q1 = {0} x [0, 1]`, parametrized by `x2`.
    Q1,
    /// `Q2 = [0, 1] x {0}`, parametrized by `x1`.
    Q2,
}

/// Uniform samples of a vector-valued density on one edge: `values[j]` is
/// the `d`-vector at parameter `j / (values.len() - 1)`.
#[derive(Clone, Debug, Serialize)]
pub struct EdgeTrace {
    pub edge: Edge,
    pub values: Vec<Vec<f64>>,
}

impl EdgeTrace {
    pub fn from_fn(edge: Edge, samples: usize, mut f: impl FnMut(f64) -> Vec<f64>) -> Self {
        let values = (0..=samples)
            .map(|j| f(j as f64 / samples as f64))
            .collect();
        Self { edge, values }
    }

    pub fn components(&self) -> usize {
        self.values.first().map_or(0, Vec::len)
    }

    pub fn segments(&self) -> usize {
        self.values.len() - 1
    }

    /// Composite-trapezoid integral of the trace against a scalar weight.
    pub fn integrate_weighted(&self, mut w: impl FnMut(f64) -> Complex64) -> Vec<Complex64> {
        let m = self.segments();
        let d = self.components();
        let h = 1.0 / m as f64;
        let mut acc = vec![Complex64::new(0.0, 0.0); d];
        for (j, row) in self.values.iter().enumerate() {
            let t = j as f64 * h;
            let weight = if j == 0 || j == m { 0.5 } else { 1.0 };
            let wt = w(t) * weight * h;
            for (c, v) in row.iter().enumerate() {
                acc[c] += wt * *v;
            }
        }
        acc
    }

    pub fn integral(&self) -> Vec<f64> {
        self.integrate_weighted(|_| Complex64::new(1.0, 0.0))
            .into_iter()
            .map(|z| z.re)
            .collect()
    }
}

/// Fourier coefficients of the measure `t d H^1` on its edge. The table is
/// one-dimensional: for `Q1` the coefficient depends only on `k2`, for `Q2`
/// only on `k1`.
#[derive(Clone, Debug)]
pub struct EdgeCoeffs {
    pub edge: Edge,
    pub kmax: usize,
    /// `coeffs[kmax + k]` for `k in -kmax ..= kmax`; entries are `d`-vectors.
    pub coeffs: Vec<Vec<Complex64>>,
}

impl EdgeCoeffs {
    /// Coefficient at the two-dimensional frequency `(k1, k2)`.
    pub fn mu_hat(&self, k1: i64, k2: i64) -> &[Complex64] {
        let k = match self.edge {
            Edge::Q1 => k2,
            Edge::Q2 => k1,
        };
        let idx = (k + self.kmax as i64) as usize;
        &self.coeffs[idx]
    }
}

/// Computes `mu_hat(k) = int_0^1 t(s) exp(-2 pi i k s) ds` for `|k| <= kmax`
/// by the composite trapezoid rule.
pub fn edge_measure_coeffs(trace: &EdgeTrace, kmax: usize) -> Result<EdgeCoeffs, SpectralError> {
    let m = trace.segments();
    if m < 4 * kmax {
        return Err(SpectralError::UnderResolved {
            samples: m,
            kmax,
        });
    }
    let mut coeffs = Vec::with_capacity(2 * kmax + 1);
    for k in -(kmax as i64)..=(kmax as i64) {
        let w = |t: f64| {
            let phase = -2.0 * std::f64::consts::PI * k as f64 * t;
            Complex64::new(phase.cos(), phase.sin())
        };
        coeffs.push(trace.integrate_weighted(w));
    }
    Ok(EdgeCoeffs {
        edge: trace.edge,
        kmax,
        coeffs,
    })
}
