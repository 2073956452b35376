//! Finite-dimensional complex Hilbert space primitives.
//!
//! The inner product is linear in the first argument and conjugate-linear in
//! the second: `inner(x, y) = Σ x_k · conj(y_k)`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng;

/// A complex coordinate vector of fixed, positive dimension with finite entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawVector", into = "RawVector")]
pub struct ComplexVector {
    entries: Vec<Complex64>,
}

/// Wire form: `{"dim": d, "entries": [[re, im], ...]}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawVector {
    dim: usize,
    entries: Vec<[f64; 2]>,
}

impl TryFrom<RawVector> for ComplexVector {
    type Error = Error;

    fn try_from(raw: RawVector) -> Result<Self> {
        if raw.entries.len() != raw.dim {
            return Err(Error::InvalidVector(format!(
                "dim is {} but {} entries were given",
                raw.dim,
                raw.entries.len()
            )));
        }
        ComplexVector::new(
            raw.entries
                .into_iter()
                .map(|[re, im]| Complex64::new(re, im))
                .collect(),
        )
    }
}

impl From<ComplexVector> for RawVector {
    fn from(v: ComplexVector) -> Self {
        RawVector {
            dim: v.dim(),
            entries: v.entries.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl ComplexVector {
    pub fn new(entries: Vec<Complex64>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::InvalidVector("dimension must be positive".into()));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidVector("entries must be finite".into()));
        }
        let v = ComplexVector { entries };
        if !v.norm().is_finite() {
            return Err(Error::InvalidVector("norm overflows".into()));
        }
        Ok(v)
    }

    pub fn from_real(entries: &[f64]) -> Result<Self> {
        Self::new(entries.iter().map(|&r| Complex64::new(r, 0.0)).collect())
    }

    pub(crate) fn from_vec_unchecked(entries: Vec<Complex64>) -> Self {
        debug_assert!(!entries.is_empty());
        ComplexVector { entries }
    }

    pub fn zeros(dim: usize) -> Result<Self> {
        Self::new(vec![Complex64::new(0.0, 0.0); dim])
    }

    /// Standard basis vector `e_k` of `ℂ^dim`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if k >= dim {
            return Err(Error::OutOfRange(format!("basis index {k} >= dim {dim}")));
        }
        let mut v = Self::zeros(dim)?;
        v.entries[k] = Complex64::new(1.0, 0.0);
        Ok(v)
    }

    pub fn dim(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn into_entries(self) -> Vec<Complex64> {
        self.entries
    }

    pub fn norm_sqr(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum()
    }

    pub fn norm(&self) -> f64 {
        self.norm_sqr().sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|z| z.re == 0.0 && z.im == 0.0)
    }

    pub fn scale(&self, c: Complex64) -> Self {
        ComplexVector::from_vec_unchecked(self.entries.iter().map(|z| z * c).collect())
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(ComplexVector::from_vec_unchecked(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a + b).collect(),
        ))
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        check_dims(self.dim(), other.dim())?;
        Ok(ComplexVector::from_vec_unchecked(
            self.entries.iter().zip(&other.entries).map(|(a, b)| a - b).collect(),
        ))
    }

    pub fn distance(&self, other: &Self) -> Result<f64> {
        check_dims(self.dim(), other.dim())?;
        Ok(self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| (a - b).norm_sqr())
            .sum::<f64>()
            .sqrt())
    }

    /// The unit vector in the direction of `self`.
    pub fn normalized(&self) -> Result<Self> {
        let n = self.norm();
        if n == 0.0 {
            return Err(Error::ZeroVector);
        }
        Ok(ComplexVector::from_vec_unchecked(
            self.entries.iter().map(|z| z / n).collect(),
        ))
    }
}

pub(crate) fn check_dims(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Unchecked inner product on raw slices, linear in `x`.
#[inline]
pub(crate) fn dot(x: &[Complex64], y: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        acc += a * b.conj();
    }
    acc
}

/// `⟨x, y⟩ = Σ x_k · conj(y_k)`.
pub fn inner(x: &ComplexVector, y: &ComplexVector) -> Result<Complex64> {
    check_dims(x.dim(), y.dim())?;
    Ok(dot(&x.entries, &y.entries))
}

/// Orthogonal projection of `x` onto the complex line spanned by `v`.
pub fn rank_one_apply(v: &ComplexVector, x: &ComplexVector) -> Result<ComplexVector> {
    check_dims(v.dim(), x.dim())?;
    let vv = v.norm_sqr();
    if vv == 0.0 {
        return Err(Error::ZeroVector);
    }
    let c = dot(&x.entries, &v.entries) / vv;
    Ok(v.scale(c))
}

/// A complex Gaussian vector normalized to the unit sphere.
pub fn random_unit_vector(dim: usize, seed: u64) -> Result<ComplexVector> {
    let mut rng = rng::rng_from_seed(seed);
    random_unit_vector_with(dim, &mut rng)
}

pub(crate) fn random_unit_vector_with<R: rand::Rng + ?Sized>(
    dim: usize,
    rng: &mut R,
) -> Result<ComplexVector> {
    if dim == 0 {
        return Err(Error::OutOfRange("dimension must be positive".into()));
    }
    loop {
        let v = ComplexVector::from_vec_unchecked(
            (0..dim).map(|_| rng::complex_gaussian(rng)).collect(),
        );
        if let Ok(u) = v.normalized() {
            return Ok(u);
        }
    }
}

/// A Haar-distributed orthonormal basis of `ℂ^n`: Gram–Schmidt (with one
/// reorthogonalization pass) applied to the columns of a complex Gaussian
/// matrix.
pub fn random_orthonormal_basis(n: usize, seed: u64) -> Result<Vec<ComplexVector>> {
    if n == 0 {
        return Err(Error::OutOfRange("dimension must be positive".into()));
    }
    let mut rng = rng::rng_from_seed(seed);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(n);
    while basis.len() < n {
        let mut col: Vec<Complex64> = (0..n).map(|_| rng::complex_gaussian(&mut rng)).collect();
        for _ in 0..2 {
            for q in &basis {
                let c = dot(&col, q);
                for (a, b) in col.iter_mut().zip(q) {
                    *a -= c * b;
                }
            }
        }
        let norm = col.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        // A Gaussian column lies in the span of the previous ones with
        // probability zero; redraw if rounding says otherwise.
        if norm < 1e-8 {
            continue;
        }
        col.iter_mut().for_each(|z| *z /= norm);
        basis.push(col);
    }
    Ok(basis.into_iter().map(ComplexVector::from_vec_unchecked).collect())
}

/// Largest entry of `|G − I|` where `G` is the Gram matrix of `vectors`.
pub fn gram_residual(vectors: &[ComplexVector]) -> f64 {
    let mut worst: f64 = 0.0;
    for (j, u) in vectors.iter().enumerate() {
        for (k, w) in vectors.iter().enumerate().skip(j) {
            if u.dim() != w.dim() {
                return f64::INFINITY;
            }
            let g = dot(u.entries(), w.entries());
            let target = if j == k { 1.0 } else { 0.0 };
            worst = worst.max((g - target).norm());
        }
    }
    worst
}

/// An orthogonal projection that can be applied to vectors of one dimension.
pub trait Projection {
    fn dim(&self) -> usize;

    fn apply(&self, x: &ComplexVector) -> Result<ComplexVector>;
}

/// `R_v`: the projection onto the complex line through `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankOneProjection {
    direction: ComplexVector,
}

impl RankOneProjection {
    pub fn new(direction: &ComplexVector) -> Result<Self> {
        Ok(RankOneProjection {
            direction: direction.normalized()?,
        })
    }

    pub fn direction(&self) -> &ComplexVector {
        &self.direction
    }
}

impl Projection for RankOneProjection {
    fn dim(&self) -> usize {
        self.direction.dim()
    }

    fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        rank_one_apply(&self.direction, x)
    }
}

/// Projection onto the span of a finite set of vectors, stored as an
/// orthonormal basis of that span.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceProjection {
    dim: usize,
    basis: Vec<ComplexVector>,
}

impl SubspaceProjection {
    /// Orthonormalizes `spanning` (dropping numerically dependent vectors).
    pub fn from_spanning(dim: usize, spanning: &[ComplexVector]) -> Result<Self> {
        let mut basis: Vec<ComplexVector> = Vec::new();
        for v in spanning {
            check_dims(dim, v.dim())?;
            let scale = v.norm();
            let mut w = v.entries().to_vec();
            for _ in 0..2 {
                for q in &basis {
                    let c = dot(&w, q.entries());
                    for (a, b) in w.iter_mut().zip(q.entries()) {
                        *a -= c * b;
                    }
                }
            }
            let n = w.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if n > 1e-10 * scale.max(f64::MIN_POSITIVE) && n > 0.0 {
                w.iter_mut().for_each(|z| *z /= n);
                basis.push(ComplexVector::from_vec_unchecked(w));
            }
        }
        Ok(SubspaceProjection { dim, basis })
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[ComplexVector] {
        &self.basis
    }
}

impl Projection for SubspaceProjection {
    fn dim(&self) -> usize {
        self.dim
    }

    fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.dim, x.dim())?;
        let mut out = vec![Complex64::new(0.0, 0.0); self.dim];
        for q in &self.basis {
            let c = dot(x.entries(), q.entries());
            for (o, b) in out.iter_mut().zip(q.entries()) {
                *o += c * b;
            }
        }
        Ok(ComplexVector::from_vec_unchecked(out))
    }
}

/// Largest dimension the dense oracle will materialize.
pub const DENSE_CAP: usize = 4096;

/// A dense square matrix, row-major. Test oracle only.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseOperator {
    pub fn zeros(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::OutOfRange("dimension must be positive".into()));
        }
        if dim > DENSE_CAP {
            return Err(Error::DenseCapExceeded { dim, cap: DENSE_CAP });
        }
        Ok(DenseOperator {
            dim,
            data: vec![Complex64::new(0.0, 0.0); dim * dim],
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut m = Self::zeros(dim)?;
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        Ok(m)
    }

    /// `v v* / ‖v‖²`.
    pub fn rank_one(v: &ComplexVector) -> Result<Self> {
        let u = v.normalized()?;
        let d = u.dim();
        let mut m = Self::zeros(d)?;
        for i in 0..d {
            for j in 0..d {
                m.data[i * d + j] = u.entries()[i] * u.entries()[j].conj();
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim + col]
    }

    /// Kronecker product `self ⊗ other`; `self` indexes the most significant digit.
    pub fn kron(&self, other: &DenseOperator) -> Result<Self> {
        let n = self.dim.checked_mul(other.dim).ok_or(Error::DenseCapExceeded {
            dim: usize::MAX,
            cap: DENSE_CAP,
        })?;
        let mut out = Self::zeros(n)?;
        let q = other.dim;
        for i in 0..self.dim {
            for j in 0..self.dim {
                let a = self.get(i, j);
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for k in 0..q {
                    for l in 0..q {
                        out.data[(i * q + k) * n + (j * q + l)] = a * other.get(k, l);
                    }
                }
            }
        }
        Ok(out)
    }

    pub fn mul_vec(&self, x: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.dim, x.dim())?;
        let out = self
            .data
            .chunks(self.dim)
            .map(|row| row.iter().zip(x.entries()).map(|(a, b)| a * b).sum())
            .collect();
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    pub fn matmul(&self, other: &DenseOperator) -> Result<Self> {
        check_dims(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n)?;
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in 0..n {
                    out.data[i * n + j] += a * other.data[k * n + j];
                }
            }
        }
        Ok(out)
    }

    /// `max |A_ij − conj(A_ji)|`.
    pub fn hermitian_residual(&self) -> f64 {
        let n = self.dim;
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i..n {
                worst = worst.max((self.get(i, j) - self.get(j, i).conj()).norm());
            }
        }
        worst
    }

    /// `max |(A²)_ij − A_ij|`.
    pub fn idempotence_residual(&self) -> Result<f64> {
        let sq = self.matmul(self)?;
        Ok(sq
            .data
            .iter()
            .zip(&self.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }

    pub fn max_abs_diff(&self, other: &DenseOperator) -> Result<f64> {
        check_dims(self.dim, other.dim)?;
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn inner_examples() {
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let e1 = ComplexVector::basis(2, 1).unwrap();
        assert_eq!(inner(&e0, &e1).unwrap(), c(0.0, 0.0));

        let i = ComplexVector::new(vec![c(0.0, 1.0)]).unwrap();
        let one = ComplexVector::new(vec![c(1.0, 0.0)]).unwrap();
        assert_eq!(inner(&i, &one).unwrap(), c(0.0, 1.0));
        assert_eq!(inner(&one, &i).unwrap(), c(0.0, -1.0));

        let u = ComplexVector::from_real(&[0.6, 0.8]).unwrap();
        assert!((inner(&u, &u).unwrap() - c(1.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn inner_rejects_mismatch() {
        let a = ComplexVector::zeros(2).unwrap();
        let b = ComplexVector::zeros(3).unwrap();
        assert_eq!(
            inner(&a, &b),
            Err(Error::DimensionMismatch { expected: 2, got: 3 })
        );
    }

    #[test]
    fn rank_one_examples() {
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let e1 = ComplexVector::basis(2, 1).unwrap();
        assert_eq!(rank_one_apply(&e0, &e0).unwrap(), e0);
        assert!(rank_one_apply(&e0, &e1).unwrap().is_zero());

        let h = std::f64::consts::FRAC_1_SQRT_2;
        let v = ComplexVector::from_real(&[h, h]).unwrap();
        let out = rank_one_apply(&v, &e0).unwrap();
        for z in out.entries() {
            assert!((z - c(0.5, 0.0)).norm() < 1e-15);
        }
        assert_eq!(
            rank_one_apply(&ComplexVector::zeros(2).unwrap(), &e0),
            Err(Error::ZeroVector)
        );
    }

    #[test]
    fn vector_validation() {
        assert!(ComplexVector::new(vec![]).is_err());
        assert!(ComplexVector::new(vec![c(f64::NAN, 0.0)]).is_err());
        assert!(ComplexVector::new(vec![c(1e300, 0.0), c(1e300, 0.0)]).is_err());
    }

    #[test]
    fn random_unit_vectors() {
        let v = random_unit_vector(1, 3).unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        let w = random_unit_vector(128, 42).unwrap();
        assert!((w.norm() - 1.0).abs() < 1e-12);
        assert_eq!(w, random_unit_vector(128, 42).unwrap());
        assert_ne!(w, random_unit_vector(128, 43).unwrap());
        assert!(random_unit_vector(0, 1).is_err());
    }

    #[test]
    fn orthonormal_bases() {
        let one = random_orthonormal_basis(1, 5).unwrap();
        assert_eq!(one.len(), 1);
        assert!((one[0].norm() - 1.0).abs() < 1e-12);

        assert!(gram_residual(&random_orthonormal_basis(2, 5).unwrap()) < 1e-10);

        let b = random_orthonormal_basis(64, 11).unwrap();
        assert_eq!(b, random_orthonormal_basis(64, 11).unwrap());
        // Oracle: explicit Gram matrix.
        for j in 0..64 {
            for k in 0..64 {
                let g: Complex64 = b[j]
                    .entries()
                    .iter()
                    .zip(b[k].entries())
                    .map(|(x, y)| x * y.conj())
                    .sum();
                let target = if j == k { 1.0 } else { 0.0 };
                assert!((g - c(target, 0.0)).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn subspace_projection_drops_dependent_vectors() {
        let a = ComplexVector::from_real(&[1.0, 1.0, 0.0]).unwrap();
        let b = a.scale(c(0.0, 2.0));
        let p = SubspaceProjection::from_spanning(3, &[a.clone(), b]).unwrap();
        assert_eq!(p.rank(), 1);
        let x = ComplexVector::basis(3, 0).unwrap();
        let px = p.apply(&x).unwrap();
        assert!((px.norm_sqr() - 0.5).abs() < 1e-14);
    }

    #[test]
    fn dense_rank_one_and_kron() {
        let v = ComplexVector::new(vec![c(1.0, 0.0), c(0.0, 1.0)]).unwrap();
        let r = DenseOperator::rank_one(&v).unwrap();
        assert!(r.hermitian_residual() < 1e-15);
        assert!(r.idempotence_residual().unwrap() < 1e-15);
        let k = r.kron(&DenseOperator::identity(3).unwrap()).unwrap();
        assert_eq!(k.dim(), 6);
        assert!(k.idempotence_residual().unwrap() < 1e-15);
        assert!(matches!(
            DenseOperator::zeros(DENSE_CAP + 1),
            Err(Error::DenseCapExceeded { .. })
        ));
    }

    #[test]
    fn vector_json_shape() {
        let v = ComplexVector::new(vec![c(1.0, -2.0)]).unwrap();
        let s = serde_json::to_string(&v).unwrap();
        assert_eq!(s, r#"{"dim":1,"entries":[[1.0,-2.0]]}"#);
        let back: ComplexVector = serde_json::from_str(&s).unwrap();
        assert_eq!(back, v);
        assert!(serde_json::from_str::<ComplexVector>(r#"{"dim":2,"entries":[[1,0]]}"#).is_err());
        assert!(serde_json::from_str::<ComplexVector>(r#"{"dim":0,"entries":[]}"#).is_err());
    }
}
