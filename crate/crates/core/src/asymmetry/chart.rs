//! Feasible-by-construction parameterizations of constrained states.

use crate::matops::{self, c64, psd_sqrt, ComplexMatrix};

pub(crate) trait Chart {
    fn num_params(&self) -> usize;
    /// Dimension of the space `σ` lives on.
    fn dim(&self) -> usize;
    fn sigma(&self, x: &[f64]) -> ComplexMatrix;
    /// Gradient in `x` of `f(σ(x))` given the Hermitian gradient `h` of `f` at `σ(x)`.
    fn pullback(&self, x: &[f64], h: &ComplexMatrix) -> Vec<f64>;
    /// Parameters reproducing (approximately) the state `hint` projected into the chart.
    fn params_near(&self, hint: &ComplexMatrix) -> Vec<f64>;
}

fn read_square(x: &[f64], offset: usize, r: usize) -> ComplexMatrix {
    let n = r * r;
    ComplexMatrix::from_fn(r, r, |i, j| c64(x[offset + i * r + j], x[offset + n + i * r + j]))
}

fn write_square(out: &mut [f64], offset: usize, g: &ComplexMatrix) {
    let r = g.nrows();
    let n = r * r;
    for i in 0..r {
        for j in 0..r {
            out[offset + i * r + j] = g[(i, j)].re;
            out[offset + n + i * r + j] = g[(i, j)].im;
        }
    }
}

/// `σ = ⊕_x G_x G_x† / Σ_x tr(G_x G_x†)`: block-diagonal states.
pub(crate) struct BlockChart {
    sizes: Vec<usize>,
    offsets: Vec<usize>,
    dim: usize,
}

impl BlockChart {
    pub(crate) fn new(sizes: Vec<usize>) -> Self {
        let mut offsets = Vec::with_capacity(sizes.len());
        let mut off = 0;
        for &r in &sizes {
            offsets.push(off);
            off += 2 * r * r;
        }
        let dim = sizes.iter().sum();
        Self { sizes, offsets, dim }
    }

    fn blocks(&self, x: &[f64]) -> (Vec<ComplexMatrix>, f64) {
        let gs: Vec<ComplexMatrix> = self
            .sizes
            .iter()
            .zip(&self.offsets)
            .map(|(&r, &o)| read_square(x, o, r))
            .collect();
        let t = x.iter().map(|v| v * v).sum::<f64>();
        (gs, t)
    }
}

impl Chart for BlockChart {
    fn num_params(&self) -> usize {
        self.sizes.iter().map(|r| 2 * r * r).sum()
    }

    fn dim(&self) -> usize {
        self.dim
    }

    fn sigma(&self, x: &[f64]) -> ComplexMatrix {
        let (gs, t) = self.blocks(x);
        let mut s = matops::zeros(self.dim, self.dim);
        let mut at = 0;
        for g in &gs {
            let r = g.nrows();
            s.view_mut((at, at), (r, r)).copy_from(&(g * g.adjoint()).unscale(t));
            at += r;
        }
        s
    }

    fn pullback(&self, x: &[f64], h: &ComplexMatrix) -> Vec<f64> {
        let (gs, t) = self.blocks(x);
        let sigma = self.sigma(x);
        let c = matops::trace_product_re(h, &sigma);
        let mut out = vec![0.0; x.len()];
        let mut at = 0;
        for (g, &o) in gs.iter().zip(&self.offsets) {
            let r = g.nrows();
            let hb = h.view((at, at), (r, r)).into_owned() - matops::identity(r).scale(c);
            let z = (hb * g).scale(2.0 / t);
            write_square(&mut out, o, &z);
            at += r;
        }
        out
    }

    fn params_near(&self, hint: &ComplexMatrix) -> Vec<f64> {
        let mut out = vec![0.0; self.num_params()];
        let mut at = 0;
        for (&r, &o) in self.sizes.iter().zip(&self.offsets) {
            let block = matops::hermitian_part(&hint.view((at, at), (r, r)).into_owned());
            write_square(&mut out, o, &psd_sqrt(&block));
            at += r;
        }
        out
    }
}

/// `σ = Σ_i E_i τ E_i†` with `τ = G G† / tr(G G†)` a state on the input space.
pub(crate) struct MapChart {
    ops: Vec<ComplexMatrix>,
    input_dim: usize,
    output_dim: usize,
}

impl MapChart {
    pub(crate) fn new(ops: Vec<ComplexMatrix>) -> Self {
        let (output_dim, input_dim) = ops[0].shape();
        Self { ops, input_dim, output_dim }
    }

    pub(crate) fn tau(&self, x: &[f64]) -> ComplexMatrix {
        let g = read_square(x, 0, self.input_dim);
        let t = x.iter().map(|v| v * v).sum::<f64>();
        (&g * g.adjoint()).unscale(t)
    }
}

impl Chart for MapChart {
    fn num_params(&self) -> usize {
        2 * self.input_dim * self.input_dim
    }

    fn dim(&self) -> usize {
        self.output_dim
    }

    fn sigma(&self, x: &[f64]) -> ComplexMatrix {
        let tau = self.tau(x);
        let mut s = matops::zeros(self.output_dim, self.output_dim);
        for e in &self.ops {
            s += e * &tau * e.adjoint();
        }
        s
    }

    fn pullback(&self, x: &[f64], h: &ComplexMatrix) -> Vec<f64> {
        let g = read_square(x, 0, self.input_dim);
        let t = x.iter().map(|v| v * v).sum::<f64>();
        let tau = (&g * g.adjoint()).unscale(t);
        let mut ht = matops::zeros(self.input_dim, self.input_dim);
        for e in &self.ops {
            ht += e.adjoint() * h * e;
        }
        let c = matops::trace_product_re(&ht, &tau);
        let z = ((ht - matops::identity(self.input_dim).scale(c)) * g).scale(2.0 / t);
        let mut out = vec![0.0; x.len()];
        write_square(&mut out, 0, &z);
        out
    }

    fn params_near(&self, hint: &ComplexMatrix) -> Vec<f64> {
        let mut out = vec![0.0; self.num_params()];
        let h = if hint.nrows() == self.input_dim {
            matops::hermitian_part(hint)
        } else {
            matops::identity(self.input_dim).unscale(self.input_dim as f64)
        };
        write_square(&mut out, 0, &psd_sqrt(&h));
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::random;
    use rand::Rng;

    fn check_pullback<C: Chart>(chart: &C, seed: u64) {
        let mut rng = random::rng_from_seed(seed);
        let x: Vec<f64> = (0..chart.num_params()).map(|_| rng.random::<f64>() - 0.5).collect();
        let n = chart.dim();
        let h = matops::hermitian_part(&random::ginibre(&mut rng, n, n));
        let f = |x: &[f64]| matops::trace_product_re(&h, &chart.sigma(x));
        let g = chart.pullback(&x, &h);
        for k in 0..x.len() {
            let mut xp = x.clone();
            let mut xm = x.clone();
            xp[k] += 1e-6;
            xm[k] -= 1e-6;
            let fd = (f(&xp) - f(&xm)) / 2e-6;
            assert!((fd - g[k]).abs() < 1e-7, "param {k}: {fd} vs {}", g[k]);
        }
        let s = chart.sigma(&x);
        assert!((matops::trace(&s).re - 1.0).abs() < 1e-12);
    }

    #[test]
    fn block_chart_gradient() {
        check_pullback(&BlockChart::new(vec![1, 2, 1]), 3);
    }

    #[test]
    fn map_chart_gradient() {
        let x = random::random_povm(2, 3, 4).unwrap();
        let ops: Vec<ComplexMatrix> = x.effects().iter().map(|e| psd_sqrt(e.matrix())).collect();
        check_pullback(&MapChart::new(ops), 8);
    }
}
