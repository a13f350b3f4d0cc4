//! σ-weighted functionals: L_p norms, inner product, Dirichlet form, the L_2
//! relative entropy, quartic Q-forms and 2→q superoperator norms.

use std::borrow::Cow;

use log::warn;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::operator::{
    from_coordinates, hermitian_basis, hermitian_coordinates, hermitian_eigen, max_abs, trace, vectorize, AsMatrix,
    CMatrix, FullRankState, HermitianOperator, Superoperator, C64,
};

/// Eigenvalues of σ^{1/4} f σ^{1/4} at or below this are treated as zero in Ent.
pub const ENT_CUTOFF: f64 = 1e-14;

/// Eigenvalues of f below minus this make Ent undefined.
pub const PSD_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QFormResult {
    pub value: C64,
    pub magnitude: f64,
}

/// Best value found by the multistart ascent plus an analytic ceiling when one
/// is known (q = 4).
#[derive(Debug, Clone)]
pub struct NormBracket {
    pub lower: f64,
    pub upper: Option<f64>,
    pub witness: HermitianOperator,
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
pub struct AscentOptions {
    pub restarts: usize,
    pub seed: u64,
    pub max_iters: usize,
    pub fd_step: f64,
    pub tolerance: f64,
}

impl Default for AscentOptions {
    fn default() -> Self {
        Self { restarts: 64, seed: 0, max_iters: 400, fd_step: 1e-6, tolerance: 1e-8 }
    }
}

/// All functionals are evaluated against one fixed reference state.
#[derive(Debug, Clone)]
pub struct WeightedContext {
    sigma: FullRankState,
}

fn sandwich(s: &CMatrix, f: &CMatrix) -> CMatrix {
    s * f * s
}

/// (Σ s_i^p)^{1/p}, scaled to avoid overflow at large p.
fn schatten(values: impl Iterator<Item = f64>, p: f64) -> f64 {
    let v: Vec<f64> = values.map(f64::abs).collect();
    let top = v.iter().cloned().fold(0.0, f64::max);
    if top == 0.0 {
        return 0.0;
    }
    top * v.iter().map(|x| (x / top).powf(p)).sum::<f64>().powf(1.0 / p)
}

impl WeightedContext {
    pub fn new(sigma: FullRankState) -> Self {
        Self { sigma }
    }

    pub fn sigma(&self) -> &FullRankState {
        &self.sigma
    }

    pub fn dim(&self) -> usize {
        self.sigma.dim()
    }

    fn check_dim(&self, f: &CMatrix) -> Result<()> {
        if f.nrows() != self.dim() || f.ncols() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: f.nrows() });
        }
        Ok(())
    }

    fn weight(&self, p: f64) -> Cow<'_, CMatrix> {
        self.sigma.power(1.0 / (2.0 * p))
    }

    /// ‖f‖_{p,σ} = tr[|σ^{1/2p} f σ^{1/2p}|^p]^{1/p}. Singular values are used so
    /// the value is also defined for non-Hermitian f.
    pub fn lp_norm<F: AsMatrix>(&self, f: F, p: f64) -> Result<f64> {
        if !(p >= 1.0) || !p.is_finite() {
            return Err(Error::InvalidExponent { p, requirement: "a finite real >= 1" });
        }
        let f = f.as_matrix();
        self.check_dim(f)?;
        let a = sandwich(&self.weight(p), f);
        Ok(schatten(a.singular_values().iter().copied(), p))
    }

    /// ‖f‖_{2,σ}, computed from the inner product.
    pub fn norm2<F: AsMatrix>(&self, f: F) -> f64 {
        let f = f.as_matrix();
        self.inner(f, f).re.max(0.0).sqrt()
    }

    /// ⟨f, g⟩_σ = tr[σ^{1/2} f† σ^{1/2} g]. Real for Hermitian arguments.
    pub fn inner<F: AsMatrix, G: AsMatrix>(&self, f: F, g: G) -> C64 {
        let s = self.sigma.power(0.5);
        let (f, g) = (f.as_matrix(), g.as_matrix());
        let left = s.as_ref() * f.adjoint();
        let right = s.as_ref() * g;
        // tr[XY] = Σ_ij X_ij Y_ji
        left.transpose().component_mul(&right).iter().sum()
    }

    /// ℰ(f) = −⟨f, ℒ(f)⟩_σ for a Heisenberg-picture generator.
    pub fn dirichlet_form<F: AsMatrix>(&self, l: &Superoperator, f: F) -> Result<f64> {
        let f = f.as_matrix();
        self.check_dim(f)?;
        if l.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: l.dim() });
        }
        let residual = unital_residual(l);
        if residual > 1e-10 * (1.0 + max_abs(l.matrix())) {
            return Err(Error::NotUnital { residual });
        }
        Ok(-self.inner(f, l.apply(f)).re)
    }

    /// L_2 relative entropy with A = σ^{1/4} f σ^{1/4}:
    /// tr[A² log A] − ½ tr[A² log σ] − ½ ‖f‖² log ‖f‖².
    pub fn ent(&self, f: &HermitianOperator) -> Result<f64> {
        self.check_dim(f.matrix())?;
        let fmin = f.spectral().min_eigenvalue();
        if fmin < -PSD_TOL {
            return Err(Error::NegativeInput { min_eigenvalue: fmin });
        }
        let a = sandwich(&self.sigma.power(0.25), f.matrix());
        let spec = hermitian_eigen(&a);
        let first: f64 = spec
            .eigenvalues
            .iter()
            .map(|&x| if x <= ENT_CUTOFF { 0.0 } else { x * x * x.ln() })
            .sum();
        let a2 = &a * &a;
        let second = 0.5 * trace(&(&a2 * self.sigma.log())).re;
        let norm_sq = trace(&a2).re;
        let third = if norm_sq <= 0.0 { 0.0 } else { 0.5 * norm_sq * norm_sq.ln() };
        Ok(first - second - third)
    }

    /// Classical-normalization entropy tr[A² log A²] − tr[A² log σ] − ‖f‖² log ‖f‖²,
    /// which is exactly twice [`Self::ent`]. This is the quantity that appears
    /// in the derivative of t ↦ ‖T_t f‖_{p(t),σ}.
    pub fn ent_squared(&self, f: &HermitianOperator) -> Result<f64> {
        Ok(2.0 * self.ent(f)?)
    }

    /// Q(v1, v2, v3, v4) = tr[σ^{1/4} v1† σ^{1/4} v2 σ^{1/4} v3† σ^{1/4} v4].
    pub fn q_form<A, B, C, D>(&self, v1: A, v2: B, v3: C, v4: D) -> QFormResult
    where
        A: AsMatrix,
        B: AsMatrix,
        C: AsMatrix,
        D: AsMatrix,
    {
        let s = self.sigma.power(0.25);
        let s = s.as_ref();
        let m = s * v1.as_matrix().adjoint() * s * v2.as_matrix() * s * v3.as_matrix().adjoint() * s * v4.as_matrix();
        let value = trace(&m);
        QFormResult { value, magnitude: value.norm() }
    }

    /// Weighted modulus σ^{-1/4}|σ^{1/4} f σ^{1/4}|σ^{-1/4}; its 2-norm equals
    /// that of f.
    #[allow(dead_code)]
    pub(crate) fn abs_two(&self, f: &HermitianOperator) -> HermitianOperator {
        let a = sandwich(&self.sigma.power(0.25), f.matrix());
        let spec = hermitian_eigen(&a);
        let abs = crate::operator::matrix_function(&spec, f64::abs).expect("abs is finite");
        HermitianOperator::from_hermitian_part(&sandwich(&self.sigma.power(-0.25), abs.matrix()))
    }

    /// f ↦ σ^{1/4} f σ^{1/4}, an isometry from the σ-weighted 2-norm to the
    /// Hilbert–Schmidt norm.
    pub fn gamma(&self) -> Superoperator {
        let s = self.sigma.power(0.25);
        Superoperator::sandwich(&s, &s)
    }

    pub fn gamma_inverse(&self) -> Superoperator {
        let s = self.sigma.power(-0.25);
        Superoperator::sandwich(&s, &s)
    }

    /// ‖T‖_{2→2,σ}: largest singular value of Γ T Γ⁻¹.
    pub fn norm_2_to_2(&self, t: &Superoperator) -> f64 {
        let m = self.gamma().compose(t).compose(&self.gamma_inverse());
        m.into_matrix().singular_values().iter().cloned().fold(0.0, f64::max)
    }

    /// Multistart projected gradient ascent of ‖T f‖_{q,σ}/‖f‖_{2,σ} over
    /// Hermitian f. The reported lower end is attained by the witness; the upper
    /// end is ‖σ⁻¹‖^{1/4}‖T‖_{2→2,σ} for q = 4.
    pub fn norm_2_to_q(&self, t: &Superoperator, q: f64, opts: &AscentOptions) -> Result<NormBracket> {
        if !(q > 2.0) {
            return Err(Error::InvalidExponent { p: q, requirement: "greater than 2" });
        }
        if t.dim() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: t.dim() });
        }
        let d = self.dim();
        let basis = hermitian_basis(d);
        let images: Vec<CMatrix> = basis.iter().map(|b| t.apply(b)).collect();
        let wq = self.weight(q).into_owned();
        let w2 = self.sigma.power(0.25).into_owned();
        let ratio = |x: &[f64]| -> f64 {
            let f = from_coordinates(&basis, x);
            let tf = from_coordinates_complex(&images, x);
            let num = schatten(sandwich(&wq, &tf).singular_values().iter().copied(), q);
            let den = schatten(hermitian_eigen(&sandwich(&w2, &f)).eigenvalues.into_iter(), 2.0);
            if den == 0.0 {
                0.0
            } else {
                num / den
            }
        };

        let identity_start = hermitian_coordinates(&basis, &CMatrix::identity(d, d));
        let restarts = opts.restarts.max(1);
        let runs: Vec<(f64, Vec<f64>, bool)> = (0..restarts)
            .into_par_iter()
            .map(|k| {
                let start = if k == 0 {
                    identity_start.clone()
                } else {
                    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed.wrapping_add(k as u64));
                    (0..d * d).map(|_| StandardNormal.sample(&mut rng)).collect()
                };
                ascend(&ratio, start, opts)
            })
            .collect();
        let (best_idx, _) = runs
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, r)| if r.0 > bv { (i, r.0) } else { (bi, bv) });
        let (lower, x, converged) = runs[best_idx].clone();
        if !converged {
            warn!("2->{q} norm ascent stalled before reaching tolerance {:e}", opts.tolerance);
        }
        let upper = if (q - 4.0).abs() < 1e-15 {
            Some(self.sigma.inverse_norm().powf(0.25) * self.norm_2_to_2(t))
        } else {
            None
        };
        let witness = HermitianOperator::from_hermitian_part(&from_coordinates(&basis, &x));
        Ok(NormBracket { lower, upper, witness, converged })
    }
}

fn from_coordinates_complex(images: &[CMatrix], x: &[f64]) -> CMatrix {
    let d = images[0].nrows();
    let mut m = CMatrix::zeros(d, d);
    for (b, &xi) in images.iter().zip(x) {
        m += b.scale(xi);
    }
    m
}

fn unit(x: &mut [f64]) {
    let n = x.iter().map(|v| v * v).sum::<f64>().sqrt();
    if n > 0.0 {
        x.iter_mut().for_each(|v| *v /= n);
    }
}

/// Gradient ascent on a degree-zero homogeneous objective, with central
/// finite differences and a backtracking step.
fn ascend<F: Fn(&[f64]) -> f64>(obj: &F, mut x: Vec<f64>, opts: &AscentOptions) -> (f64, Vec<f64>, bool) {
    unit(&mut x);
    let mut value = obj(&x);
    let mut step = 0.5;
    let h = opts.fd_step;
    for _ in 0..opts.max_iters {
        let mut grad = vec![0.0; x.len()];
        let mut probe = x.clone();
        for i in 0..x.len() {
            probe[i] = x[i] + h;
            let up = obj(&probe);
            probe[i] = x[i] - h;
            let down = obj(&probe);
            probe[i] = x[i];
            grad[i] = (up - down) / (2.0 * h);
        }
        let gnorm = grad.iter().map(|g| g * g).sum::<f64>().sqrt();
        if gnorm < 1e-12 {
            return (value, x, true);
        }
        let mut improved = false;
        while step > 1e-14 {
            let mut trial: Vec<f64> = x.iter().zip(&grad).map(|(a, g)| a + step * g / gnorm).collect();
            unit(&mut trial);
            let v = obj(&trial);
            if v > value {
                let gain = v - value;
                x = trial;
                value = v;
                step *= 2.0;
                improved = true;
                if gain <= opts.tolerance * value.abs().max(1.0) {
                    return (value, x, true);
                }
                break;
            }
            step *= 0.5;
        }
        if !improved {
            return (value, x, true);
        }
    }
    (value, x, false)
}

/// max |ℒ(𝟙)| entry.
pub fn unital_residual(l: &Superoperator) -> f64 {
    let d = l.dim();
    let image = l.matrix() * vectorize(&CMatrix::identity(d, d));
    image.iter().fold(0.0, |a, z| a.max(z.norm()))
}
