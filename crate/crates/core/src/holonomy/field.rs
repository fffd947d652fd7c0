use num_complex::Complex64;

use crate::series_core::{TruncatedSeries3, VectorFieldGerm};

/// A truncated series with coefficients rounded once to `f64`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericSeries {
    /// Terms grouped by total degree, lowest first.
    graded: Vec<Vec<([u32; 3], Complex64)>>,
    max_exponent: [u32; 3],
}

impl NumericSeries {
    pub fn from_exact(s: &TruncatedSeries3) -> Self {
        let mut graded: Vec<Vec<([u32; 3], Complex64)>> = Vec::new();
        let mut max_exponent = [0u32; 3];
        for (i, c) in s.terms() {
            let d = i.degree() as usize;
            if graded.len() <= d {
                graded.resize(d + 1, Vec::new());
            }
            let e = i.exponents();
            for v in 0..3 {
                max_exponent[v] = max_exponent[v].max(e[v]);
            }
            graded[d].push((e, c.to_complex64()));
        }
        Self { graded, max_exponent }
    }

    pub fn is_zero(&self) -> bool {
        self.graded.iter().all(|g| g.is_empty())
    }

    /// Sums each homogeneous part from a shared table of powers.
    pub fn eval(&self, p: [Complex64; 3]) -> Complex64 {
        if self.is_zero() {
            return Complex64::new(0.0, 0.0);
        }
        let powers: Vec<Vec<Complex64>> = (0..3)
            .map(|v| {
                let mut row = Vec::with_capacity(self.max_exponent[v] as usize + 1);
                let mut acc = Complex64::new(1.0, 0.0);
                row.push(acc);
                for _ in 0..self.max_exponent[v] {
                    acc *= p[v];
                    row.push(acc);
                }
                row
            })
            .collect();
        let mut total = Complex64::new(0.0, 0.0);
        for part in &self.graded {
            let mut sum = Complex64::new(0.0, 0.0);
            for (e, c) in part {
                sum += c * powers[0][e[0] as usize] * powers[1][e[1] as usize] * powers[2][e[2] as usize];
            }
            total += sum;
        }
        total
    }
}

/// `X` in floating point, with the invariant axis `S_X = {x = y = 0}`.
#[derive(Clone, Debug, PartialEq)]
pub struct NumericField {
    pub lambda: [Complex64; 3],
    pub a: [NumericSeries; 3],
}

impl NumericField {
    pub fn from_germ(x: &VectorFieldGerm) -> Self {
        Self { lambda: x.lambda().clone().map(|l| l.to_complex64()), a: x.a().clone().map(|s| NumericSeries::from_exact(&s)) }
    }

    /// `(dx/dθ, dy/dθ)` along `z(θ) = z₀e^{iθ}` on the leaf through `(x, y, z)`:
    /// `i(λ_j/λ₃) x_j (1 + a_j)/(1 + a₃)` for `j = 1, 2`.
    pub fn angular_rhs(&self, x: Complex64, y: Complex64, z: Complex64) -> [Complex64; 2] {
        let p = [x, y, z];
        let one = Complex64::new(1.0, 0.0);
        let denom = one + self.a[2].eval(p);
        let i = Complex64::new(0.0, 1.0);
        [
            i * self.lambda[0] / self.lambda[2] * x * (one + self.a[0].eval(p)) / denom,
            i * self.lambda[1] / self.lambda[2] * y * (one + self.a[1].eval(p)) / denom,
        ]
    }
}
