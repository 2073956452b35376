//! Single-axis projections `I ⊗ … ⊗ R_v ⊗ … ⊗ I` on `ℓ₂(B^A)` and their
//! products over distinct axes.
//!
//! Projections are stored structurally (axis plus unit direction) and applied
//! block by block; [`dense_materialize`] exists only as a small-scale oracle.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hilbert::{check_dims, ComplexVector, DenseOperator, Projection, DENSE_CAP};
use crate::index::{AxisLayout, TensorIndexSpace};

/// Applies `R_v` to every block of `x` along the axis described by `layout`.
/// `v` must be a unit vector of length `layout.alphabet_size`.
pub(crate) fn project_blocks(layout: AxisLayout, v: &[Complex64], x: &mut [Complex64]) {
    let stride = layout.stride;
    for block in 0..layout.block_count() {
        let base = layout.block_base(block);
        let mut c = Complex64::new(0.0, 0.0);
        for (b, vb) in v.iter().enumerate() {
            c += x[base + b * stride] * vb.conj();
        }
        for (b, vb) in v.iter().enumerate() {
            x[base + b * stride] = c * vb;
        }
    }
}

/// `Σ_s |⟨x(s), v⟩|²`, i.e. `‖P_{a,v}(x)‖²` without materializing the output.
pub(crate) fn projected_norm_sqr(layout: AxisLayout, v: &[Complex64], x: &[Complex64]) -> f64 {
    let stride = layout.stride;
    let mut total = 0.0;
    for block in 0..layout.block_count() {
        let base = layout.block_base(block);
        let mut c = Complex64::new(0.0, 0.0);
        for (b, vb) in v.iter().enumerate() {
            c += x[base + b * stride] * vb.conj();
        }
        total += c.norm_sqr();
    }
    total
}

/// `P_{a,v}`: `R_v` on axis `a`, identity on the other axes.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisProjection {
    space: TensorIndexSpace,
    axis: String,
    direction: ComplexVector,
}

impl AxisProjection {
    /// `direction` is normalized; it must be nonzero and of length `d`.
    pub fn new(space: TensorIndexSpace, axis: &str, direction: &ComplexVector) -> Result<Self> {
        space.position(axis)?;
        check_dims(space.alphabet_size(), direction.dim())?;
        Ok(AxisProjection {
            direction: direction.normalized()?,
            axis: axis.to_string(),
            space,
        })
    }

    pub fn space(&self) -> &TensorIndexSpace {
        &self.space
    }

    pub fn axis(&self) -> &str {
        &self.axis
    }

    pub fn direction(&self) -> &ComplexVector {
        &self.direction
    }

    /// `‖P(x)‖²`.
    pub fn projected_norm_sqr(&self, x: &ComplexVector) -> Result<f64> {
        check_dims(self.space.dim(), x.dim())?;
        let layout = self.space.layout(&self.axis)?;
        Ok(projected_norm_sqr(layout, self.direction.entries(), x.entries()))
    }

    pub fn to_product(&self) -> ProductProjection {
        let pos = self.space.position(&self.axis).expect("axis checked at construction");
        ProductProjection {
            space: self.space.clone(),
            directions: vec![(pos, self.direction.clone())],
        }
    }
}

impl Projection for AxisProjection {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        check_dims(self.space.dim(), x.dim())?;
        let layout = self.space.layout(&self.axis)?;
        let mut out = x.entries().to_vec();
        project_blocks(layout, self.direction.entries(), &mut out);
        Ok(ComplexVector::from_vec_unchecked(out))
    }
}

/// `∏_a P_{a, v_a}` over a set of distinct axes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawProjectionSpec", into = "RawProjectionSpec")]
pub struct ProductProjection {
    space: TensorIndexSpace,
    /// (axis position, unit direction), sorted by position.
    directions: Vec<(usize, ComplexVector)>,
}

/// Wire form: `{"axes": [...], "alphabet_size": d, "directions": {"axis": vector, ...}}`.
#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawProjectionSpec {
    axes: Vec<String>,
    alphabet_size: usize,
    directions: BTreeMap<String, ComplexVector>,
}

impl TryFrom<RawProjectionSpec> for ProductProjection {
    type Error = Error;

    fn try_from(raw: RawProjectionSpec) -> Result<Self> {
        let space = TensorIndexSpace::new(raw.axes, raw.alphabet_size)?;
        ProductProjection::new(space, raw.directions)
    }
}

impl From<ProductProjection> for RawProjectionSpec {
    fn from(p: ProductProjection) -> Self {
        let directions = p
            .directions
            .iter()
            .map(|(pos, v)| (p.space.axes()[*pos].clone(), v.clone()))
            .collect();
        RawProjectionSpec {
            axes: p.space.axes().to_vec(),
            alphabet_size: p.space.alphabet_size(),
            directions,
        }
    }
}

impl ProductProjection {
    pub fn new<I, S>(space: TensorIndexSpace, directions: I) -> Result<Self>
    where
        I: IntoIterator<Item = (S, ComplexVector)>,
        S: AsRef<str>,
    {
        let mut out: Vec<(usize, ComplexVector)> = Vec::new();
        for (axis, v) in directions {
            let pos = space.position(axis.as_ref())?;
            if out.iter().any(|(p, _)| *p == pos) {
                return Err(Error::InvalidSpace(format!(
                    "axis `{}` given twice",
                    axis.as_ref()
                )));
            }
            check_dims(space.alphabet_size(), v.dim())?;
            out.push((pos, v.normalized()?));
        }
        out.sort_by_key(|(p, _)| *p);
        Ok(ProductProjection {
            space,
            directions: out,
        })
    }

    pub fn space(&self) -> &TensorIndexSpace {
        &self.space
    }

    /// (axis label, unit direction) in axis order.
    pub fn directions(&self) -> impl Iterator<Item = (&str, &ComplexVector)> {
        self.directions
            .iter()
            .map(|(p, v)| (self.space.axes()[*p].as_str(), v))
    }

    pub fn axis_projections(&self) -> Vec<AxisProjection> {
        self.directions()
            .map(|(a, v)| AxisProjection {
                space: self.space.clone(),
                axis: a.to_string(),
                direction: v.clone(),
            })
            .collect()
    }

    /// Applies the factors in the given axis order. The result does not depend
    /// on the order up to rounding; this exists to check exactly that.
    pub fn apply_in_order(&self, x: &ComplexVector, order: &[usize]) -> Result<ComplexVector> {
        check_dims(self.space.dim(), x.dim())?;
        if order.len() != self.directions.len() {
            return Err(Error::OutOfRange("order must list every factor once".into()));
        }
        let mut seen = vec![false; self.directions.len()];
        let mut out = x.entries().to_vec();
        for &k in order {
            if k >= seen.len() || std::mem::replace(&mut seen[k], true) {
                return Err(Error::OutOfRange("order must list every factor once".into()));
            }
            let (pos, v) = &self.directions[k];
            project_blocks(self.space.layout_at(*pos), v.entries(), &mut out);
        }
        Ok(ComplexVector::from_vec_unchecked(out))
    }

    /// The unit vector `Σ_t ∏_a v_{a,t(a)} e_t`, fixed by every factor.
    /// Requires a direction on every axis.
    pub fn joint_fixed_vector(&self) -> Result<ComplexVector> {
        if self.directions.len() != self.space.axes().len() {
            let missing = self
                .space
                .axes()
                .iter()
                .enumerate()
                .find(|(i, _)| !self.directions.iter().any(|(p, _)| p == i))
                .map(|(_, a)| a.clone())
                .unwrap_or_default();
            return Err(Error::MissingDirection(missing));
        }
        // Kronecker product of the directions, first axis most significant.
        let mut acc = vec![Complex64::new(1.0, 0.0)];
        for (_, v) in &self.directions {
            acc = acc
                .iter()
                .flat_map(|a| v.entries().iter().map(move |b| a * b))
                .collect();
        }
        Ok(ComplexVector::from_vec_unchecked(acc))
    }
}

impl Projection for ProductProjection {
    fn dim(&self) -> usize {
        self.space.dim()
    }

    fn apply(&self, x: &ComplexVector) -> Result<ComplexVector> {
        let order: Vec<usize> = (0..self.directions.len()).collect();
        self.apply_in_order(x, &order)
    }
}

/// Dense Kronecker matrix of a product projection: `R_{v_a}` on the chosen
/// axes, identities elsewhere, in the lexicographic layout.
pub fn dense_materialize(spec: &ProductProjection) -> Result<DenseOperator> {
    let dim = spec.space.dim();
    if dim > DENSE_CAP {
        return Err(Error::DenseCapExceeded { dim, cap: DENSE_CAP });
    }
    let d = spec.space.alphabet_size();
    let mut acc = DenseOperator::identity(1)?;
    for pos in 0..spec.space.axes().len() {
        let factor = match spec.directions.iter().find(|(p, _)| *p == pos) {
            Some((_, v)) => DenseOperator::rank_one(v)?,
            None => DenseOperator::identity(d)?,
        };
        acc = acc.kron(&factor)?;
    }
    Ok(acc)
}

pub fn dense_materialize_axis(spec: &AxisProjection) -> Result<DenseOperator> {
    dense_materialize(&spec.to_product())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::{inner, random_unit_vector};
    use crate::index::FunctionIndex;

    fn space(axes: &[&str], d: usize) -> TensorIndexSpace {
        TensorIndexSpace::new(axes.to_vec(), d).unwrap()
    }

    fn basic(s: &TensorIndexSpace, pairs: &[(&str, usize)]) -> ComplexVector {
        let t = FunctionIndex::from_pairs(pairs.iter().map(|&(a, b)| (a, b)));
        ComplexVector::basis(s.dim(), s.linearize(&t).unwrap()).unwrap()
    }

    #[test]
    fn axis_examples() {
        let s = space(&["a", "b"], 3);
        let e0 = ComplexVector::basis(3, 0).unwrap();
        let p = AxisProjection::new(s.clone(), "a", &e0).unwrap();
        let fixed = basic(&s, &[("a", 0), ("b", 2)]);
        assert_eq!(p.apply(&fixed).unwrap(), fixed);
        assert!(p.apply(&basic(&s, &[("a", 1), ("b", 2)])).unwrap().is_zero());
    }

    #[test]
    fn basic_vector_identity() {
        // P(e_{s∪{(a,b)}}) = R_v(e_b) ⊗ e_s.
        let s = space(&["a", "b", "c"], 3);
        let v = random_unit_vector(3, 9).unwrap();
        let p = AxisProjection::new(s.clone(), "b", &v).unwrap();
        for idx in 0..s.dim() {
            let t = s.delinearize(idx).unwrap();
            let (rest, b) = t.split("b").unwrap();
            let out = p.apply(&ComplexVector::basis(s.dim(), idx).unwrap()).unwrap();
            let rv = crate::hilbert::rank_one_apply(&v, &ComplexVector::basis(3, b).unwrap()).unwrap();
            for j in 0..s.dim() {
                let tj = s.delinearize(j).unwrap();
                let (rest_j, bj) = tj.split("b").unwrap();
                let expected = if rest_j == rest { rv.entries()[bj] } else { Complex64::new(0.0, 0.0) };
                assert!((out.entries()[j] - expected).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn product_examples() {
        let s = space(&["a", "b"], 2);
        let e0 = ComplexVector::basis(2, 0).unwrap();
        let e1 = ComplexVector::basis(2, 1).unwrap();
        let p = ProductProjection::new(s.clone(), [("a", e0.clone()), ("b", e1.clone())]).unwrap();
        let x = basic(&s, &[("a", 0), ("b", 1)]);
        assert_eq!(p.apply(&x).unwrap(), x);
        assert!(p.apply(&basic(&s, &[("a", 1), ("b", 1)])).unwrap().is_zero());
        assert_eq!(p.joint_fixed_vector().unwrap(), x);
    }

    #[test]
    fn joint_fixed_vector_expansion() {
        let s = space(&["a", "b"], 2);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let p = ProductProjection::new(
            s.clone(),
            [
                ("a", ComplexVector::from_real(&[h, h]).unwrap()),
                ("b", ComplexVector::basis(2, 0).unwrap()),
            ],
        )
        .unwrap();
        let expected = basic(&s, &[("a", 0), ("b", 0)])
            .add(&basic(&s, &[("a", 1), ("b", 0)]))
            .unwrap()
            .scale(Complex64::new(h, 0.0));
        assert!(p.joint_fixed_vector().unwrap().distance(&expected).unwrap() < 1e-15);
    }

    #[test]
    fn joint_fixed_vector_needs_all_axes() {
        let s = space(&["a", "b"], 2);
        let p = ProductProjection::new(s, [("a", ComplexVector::basis(2, 0).unwrap())]).unwrap();
        assert_eq!(p.joint_fixed_vector(), Err(Error::MissingDirection("b".into())));
    }

    #[test]
    fn construction_errors() {
        let s = space(&["a", "b"], 2);
        let e0 = ComplexVector::basis(2, 0).unwrap();
        assert!(matches!(AxisProjection::new(s.clone(), "z", &e0), Err(Error::UnknownAxis(_))));
        assert_eq!(
            AxisProjection::new(s.clone(), "a", &ComplexVector::zeros(2).unwrap()),
            Err(Error::ZeroVector)
        );
        assert!(ProductProjection::new(s.clone(), [("a", e0.clone()), ("a", e0.clone())]).is_err());
        let p = AxisProjection::new(s, "a", &e0).unwrap();
        assert!(p.apply(&ComplexVector::zeros(3).unwrap()).is_err());
    }

    #[test]
    fn dense_examples() {
        let v = random_unit_vector(3, 4).unwrap();
        let single = space(&["a"], 3);
        let d = dense_materialize_axis(&AxisProjection::new(single, "a", &v).unwrap()).unwrap();
        assert!(d.max_abs_diff(&DenseOperator::rank_one(&v).unwrap()).unwrap() < 1e-15);

        let s = space(&["a", "b"], 2);
        let d = dense_materialize_axis(
            &AxisProjection::new(s, "a", &ComplexVector::basis(2, 0).unwrap()).unwrap(),
        )
        .unwrap();
        for i in 0..4 {
            for j in 0..4 {
                let expected = if i == j && i < 2 { 1.0 } else { 0.0 };
                assert_eq!(d.get(i, j), Complex64::new(expected, 0.0));
            }
        }

        let big = space(&["a", "b", "c"], 17);
        let p = AxisProjection::new(big, "a", &random_unit_vector(17, 1).unwrap()).unwrap();
        assert!(matches!(dense_materialize_axis(&p), Err(Error::DenseCapExceeded { .. })));
    }

    #[test]
    fn dense_oracle_matches_structural_apply() {
        let s = space(&["a", "b"], 4);
        let p = AxisProjection::new(s, "b", &random_unit_vector(4, 21).unwrap()).unwrap();
        let d = dense_materialize_axis(&p).unwrap();
        assert!(d.hermitian_residual() < 1e-12);
        assert!(d.idempotence_residual().unwrap() < 1e-12);
        let x = random_unit_vector(16, 22).unwrap();
        assert!(d.mul_vec(&x).unwrap().distance(&p.apply(&x).unwrap()).unwrap() < 1e-10);
    }

    #[test]
    fn orders_agree_for_three_axes() {
        let s = space(&["a", "b", "c"], 3);
        let p = ProductProjection::new(
            s,
            [
                ("a", random_unit_vector(3, 1).unwrap()),
                ("b", random_unit_vector(3, 2).unwrap()),
                ("c", random_unit_vector(3, 3).unwrap()),
            ],
        )
        .unwrap();
        let x = random_unit_vector(27, 5).unwrap();
        let reference = p.apply(&x).unwrap();
        for order in [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]] {
            let y = p.apply_in_order(&x, &order).unwrap();
            assert!(y.distance(&reference).unwrap() < 1e-12);
        }
        assert!(p.apply_in_order(&x, &[0, 0, 1]).is_err());
        // Fixed vector and quadratic form.
        let v = p.joint_fixed_vector().unwrap();
        assert!((v.norm() - 1.0).abs() < 1e-12);
        assert!(p.apply(&v).unwrap().distance(&v).unwrap() < 1e-10);
        let px = p.apply(&x).unwrap();
        assert!((inner(&px, &x).unwrap().re - px.norm_sqr()).abs() < 1e-12);
    }

    #[test]
    fn spec_json() {
        let json = r#"{"axes":["a","b"],"alphabet_size":2,"directions":{"b":{"dim":2,"entries":[[0.0,0.0],[2.0,0.0]]}}}"#;
        let p: ProductProjection = serde_json::from_str(json).unwrap();
        let dirs: Vec<_> = p.directions().collect();
        assert_eq!(dirs.len(), 1);
        assert_eq!(dirs[0].0, "b");
        assert_eq!(*dirs[0].1, ComplexVector::basis(2, 1).unwrap());
        let again: ProductProjection =
            serde_json::from_str(&serde_json::to_string(&p).unwrap()).unwrap();
        assert_eq!(again, p);
        let bad = r#"{"axes":["a"],"alphabet_size":2,"directions":{"z":{"dim":2,"entries":[[1,0],[0,0]]}}}"#;
        assert!(serde_json::from_str::<ProductProjection>(bad).is_err());
    }
}
