//! Real number fields given by a monic integer polynomial, orders given by an
//! explicit integral basis, and their Minkowski-embedded lattices.
//!
//! Complex embeddings contribute the pair `√2·(Re, Im)`, so the embedded
//! order has covolume `|disc|^{1/2}`; without the factor the covolume would be
//! smaller by `2^{-s}`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_rational::Ratio;

use crate::lattice::Grid;
use crate::{Error, Result};

pub use crate::lattice::covolume;

pub type Rational = Ratio<i128>;

const ROOT_RESIDUAL: f64 = 1e-10;
const ROOT_SEPARATION: f64 = 1e-8;

fn rat(n: i64) -> Rational {
    Rational::from_integer(n as i128)
}

fn trim(p: &mut Vec<Rational>) {
    while p.last().is_some_and(|c| *c == rat(0)) {
        p.pop();
    }
}

fn poly_rem(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let mut r = a.to_vec();
    trim(&mut r);
    let db = b.len() - 1;
    let lead = b[db];
    while r.len() > db {
        let k = r.len() - 1 - db;
        let q = r[r.len() - 1] / lead;
        for (i, c) in b.iter().enumerate() {
            r[k + i] -= q * c;
        }
        r.pop();
        trim(&mut r);
    }
    r
}

/// Degree of `gcd(p, p')` over ℚ.
fn derivative_gcd_degree(p: &[i64]) -> usize {
    let mut a: Vec<Rational> = p.iter().map(|&c| rat(c)).collect();
    let mut b: Vec<Rational> = p.iter().enumerate().skip(1).map(|(i, &c)| rat(c * i as i64)).collect();
    trim(&mut a);
    trim(&mut b);
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    a.len().saturating_sub(1)
}

fn horner(p: &[i64], z: Complex64) -> (Complex64, Complex64) {
    let mut v = Complex64::new(0.0, 0.0);
    let mut dv = Complex64::new(0.0, 0.0);
    for &c in p.iter().rev() {
        dv = dv * z + v;
        v = v * z + c as f64;
    }
    (v, dv)
}

fn polish(p: &[i64], mut z: Complex64) -> Complex64 {
    for _ in 0..100 {
        let (v, dv) = horner(p, z);
        if dv.norm() == 0.0 {
            break;
        }
        let next = z - v / dv;
        if horner(p, next).0.norm() >= v.norm() {
            break;
        }
        z = next;
    }
    z
}

fn validate_poly(min_poly: &[i64]) -> Result<usize> {
    if min_poly.len() < 2 {
        return Err(Error::InvalidPolynomial("degree must be at least 1".into()));
    }
    if *min_poly.last().unwrap() != 1 {
        return Err(Error::InvalidPolynomial("polynomial must be monic".into()));
    }
    let g = derivative_gcd_degree(min_poly);
    if g > 0 {
        return Err(Error::NonSquareFree(g));
    }
    Ok(min_poly.len() - 1)
}

/// All roots: companion-matrix eigenvalues, Newton-polished, real ones sorted
/// ascending, complex ones one per conjugate pair (positive imaginary part).
fn roots(min_poly: &[i64]) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let deg = validate_poly(min_poly)?;
    let companion = DMatrix::from_fn(deg, deg, |i, j| {
        if j == deg - 1 {
            -(min_poly[i] as f64)
        } else if i == j + 1 {
            1.0
        } else {
            0.0
        }
    });
    let eig = companion.complex_eigenvalues();
    let mut real = Vec::new();
    let mut complex = Vec::new();
    for z in eig.iter() {
        let z = polish(min_poly, *z);
        if z.im.abs() <= 1e-9 * z.norm().max(1.0) {
            let x = polish(min_poly, Complex64::new(z.re, 0.0)).re;
            real.push(x);
        } else if z.im > 0.0 {
            complex.push(z);
        }
    }
    real.sort_by(f64::total_cmp);
    complex.sort_by(|a, b| a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im)));

    if real.len() + 2 * complex.len() != deg {
        return Err(Error::InvalidPolynomial(format!(
            "found {} real and {} complex-pair roots for degree {deg}",
            real.len(),
            complex.len()
        )));
    }
    let all: Vec<Complex64> = real.iter().map(|&x| Complex64::new(x, 0.0)).chain(complex.iter().copied()).collect();
    for (i, a) in all.iter().enumerate() {
        let scale = 1.0 + a.norm().powi(deg as i32);
        if horner(min_poly, *a).0.norm() > ROOT_RESIDUAL * scale {
            return Err(Error::InvalidPolynomial(format!("root {a} did not converge")));
        }
        for b in &all[i + 1..] {
            if (a - b).norm() < ROOT_SEPARATION {
                return Err(Error::NonSquareFree(1));
            }
        }
    }
    Ok((real, complex))
}

/// Real roots of a monic integer polynomial (coefficients in ascending degree),
/// i.e. the real embeddings of its generator.
pub fn real_embeddings(min_poly: &[i64]) -> Result<Vec<f64>> {
    Ok(roots(min_poly)?.0)
}

/// `ℚ[x]/(min_poly)` with its archimedean embeddings.
#[derive(Debug, Clone, PartialEq)]
pub struct NumberField {
    min_poly: Vec<i64>,
    real_roots: Vec<f64>,
    complex_roots: Vec<Complex64>,
}

impl NumberField {
    pub fn new(min_poly: Vec<i64>) -> Result<Self> {
        let (real_roots, complex_roots) = roots(&min_poly)?;
        Ok(Self { min_poly, real_roots, complex_roots })
    }

    /// ℚ, presented by `x - 1`.
    pub fn rationals() -> Self {
        Self::new(vec![-1, 1]).expect("x - 1 is a valid field polynomial")
    }

    /// ℚ(√d) for a squarefree `d > 1`.
    pub fn real_quadratic(d: i64) -> Result<Self> {
        Self::new(vec![-d, 0, 1])
    }

    /// ℚ(φ) with `φ² = φ + 1`.
    pub fn golden() -> Self {
        Self::new(vec![-1, -1, 1]).expect("x^2 - x - 1 is a valid field polynomial")
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[i64] {
        &self.min_poly
    }

    pub fn real_roots(&self) -> &[f64] {
        &self.real_roots
    }

    pub fn complex_roots(&self) -> &[Complex64] {
        &self.complex_roots
    }

    pub fn is_totally_real(&self) -> bool {
        self.complex_roots.is_empty()
    }

    /// Reduces a power-basis coefficient vector of any length modulo `min_poly`.
    fn reduce(&self, mut c: Vec<Rational>) -> Vec<Rational> {
        let d = self.degree();
        while c.len() > d {
            let top = c.pop().unwrap();
            let k = c.len() - d;
            for i in 0..d {
                c[k + i] -= top * rat(self.min_poly[i]);
            }
        }
        c.resize(d, rat(0));
        c
    }

    /// Product of two elements in power-basis coordinates.
    pub fn mul(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let mut c = vec![rat(0); a.len() + b.len() - 1];
        for (i, x) in a.iter().enumerate() {
            for (j, y) in b.iter().enumerate() {
                c[i + j] += x * y;
            }
        }
        self.reduce(c)
    }

    /// Real coordinates of `σ(x)` for every embedding, complex pairs as `√2·(Re, Im)`.
    ///
    /// Real embeddings come first, by decreasing root, so that `σ₁` is the
    /// usual inclusion for real quadratic fields.
    pub fn embed(&self, x: &[Rational]) -> Vec<f64> {
        let eval = |z: Complex64| {
            let mut v = Complex64::new(0.0, 0.0);
            for c in x.iter().rev() {
                v = v * z + (*c.numer() as f64 / *c.denom() as f64);
            }
            v
        };
        let mut out = Vec::with_capacity(self.degree());
        for &r in self.real_roots.iter().rev() {
            out.push(eval(Complex64::new(r, 0.0)).re);
        }
        for &z in &self.complex_roots {
            let v = eval(z) * std::f64::consts::SQRT_2;
            out.push(v.re);
            out.push(v.im);
        }
        out
    }
}

/// An order of a number field, given by an integral basis.
#[derive(Debug, Clone, PartialEq)]
pub struct OrderBasis {
    field: NumberField,
    /// `basis[j]` holds the power-basis coordinates of the j-th basis element.
    basis: Vec<Vec<Rational>>,
}

fn solve_rational(columns: &[Vec<Rational>], rhs: &[Rational]) -> Option<Vec<Rational>> {
    let n = columns.len();
    let mut m: Vec<Vec<Rational>> = (0..n)
        .map(|i| {
            let mut row: Vec<Rational> = columns.iter().map(|c| c[i]).collect();
            row.push(rhs[i]);
            row
        })
        .collect();
    for col in 0..n {
        let piv = (col..n).find(|&r| m[r][col] != rat(0))?;
        m.swap(col, piv);
        let p = m[col][col];
        for v in m[col].iter_mut() {
            *v /= p;
        }
        for r in 0..n {
            if r != col && m[r][col] != rat(0) {
                let f = m[r][col];
                let pivot_row = m[col].clone();
                for (a, b) in m[r].iter_mut().zip(&pivot_row) {
                    *a -= f * b;
                }
            }
        }
    }
    Some(m.into_iter().map(|row| row[n]).collect())
}

impl OrderBasis {
    /// Checks that the basis is invertible and closed under multiplication.
    pub fn new(field: NumberField, basis: Vec<Vec<Rational>>) -> Result<Self> {
        let d = field.degree();
        if basis.len() != d || basis.iter().any(|c| c.len() != d) {
            return Err(Error::InvalidOrder(format!("basis must be {d}x{d}")));
        }
        let zero = vec![rat(0); d];
        if solve_rational(&basis, &zero).is_none() {
            return Err(Error::InvalidOrder("basis is not invertible".into()));
        }
        for (i, a) in basis.iter().enumerate() {
            for (j, b) in basis.iter().enumerate().skip(i) {
                let prod = field.mul(a, b);
                let x = solve_rational(&basis, &prod).expect("invertible");
                if x.iter().any(|c| !c.is_integer()) {
                    return Err(Error::InvalidOrder(format!("product of basis elements {i} and {j} leaves the order")));
                }
            }
        }
        Ok(Self { field, basis })
    }

    /// The order ℤ[θ] generated by the root of the defining polynomial.
    pub fn power_basis(field: NumberField) -> Self {
        let d = field.degree();
        let basis = (0..d).map(|j| (0..d).map(|i| rat(i64::from(i == j))).collect()).collect();
        Self { field, basis }
    }

    /// Parses basis entries such as `"1"`, `"-3"`, `"1/2"`.
    pub fn from_strings(field: NumberField, columns: &[Vec<String>]) -> Result<Self> {
        let basis = columns
            .iter()
            .map(|col| {
                col.iter()
                    .map(|s| {
                        s.trim()
                            .parse::<Rational>()
                            .map_err(|_| Error::InvalidOrder(format!("cannot parse rational {s:?}")))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(field, basis)
    }

    pub fn field(&self) -> &NumberField {
        &self.field
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }
}

/// The lattice `c·{(σ₁(x), …, σ_{r+s}(x)) : x ∈ Δᵏ}` in ℝ^{kD}.
///
/// Coordinates are ordered embedding-major: the block of embedding `j` holds
/// `σ_j(x_1), …, σ_j(x_k)` (complex embeddings contribute `2k` coordinates,
/// interleaved as Re/Im per copy). With `normalize`, `c` makes the covolume 1;
/// otherwise `c = 1`.
pub fn minkowski_lattice(order: &OrderBasis, k: usize, normalize: bool) -> Result<Grid> {
    if k == 0 {
        return Err(Error::InvalidArgument("number of copies must be positive".into()));
    }
    let field = &order.field;
    let d = field.degree();
    let n = k * d;
    let embedded: Vec<Vec<f64>> = order.basis.iter().map(|b| field.embed(b)).collect();
    let r = field.real_roots.len();

    // Row index of coordinate `slot` (0..D in embedding order) for copy `copy`.
    let row = |slot: usize, copy: usize| -> usize {
        if slot < r {
            slot * k + copy
        } else {
            let pair = (slot - r) / 2;
            let part = (slot - r) % 2;
            r * k + pair * 2 * k + copy * 2 + part
        }
    };
    let mut basis = DMatrix::zeros(n, n);
    for copy in 0..k {
        for (b, e) in embedded.iter().enumerate() {
            let col = copy * d + b;
            for (slot, v) in e.iter().enumerate() {
                basis[(row(slot, copy), col)] = *v;
            }
        }
    }
    let grid = Grid::new(basis, DVector::zeros(n))?;
    if normalize {
        let c = grid.covolume().powf(-1.0 / n as f64);
        Ok(grid.scaled(c))
    } else {
        Ok(grid)
    }
}
