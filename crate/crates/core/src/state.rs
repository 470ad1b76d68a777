use ndarray::{Array1, Array2};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SystemLayout;

/// Offsets used to address a subsystem block inside the full space.
///
/// `bases` enumerates the flat indices where every target digit is zero;
/// `targets` enumerates the offsets of the target digit combinations (in the
/// order the target labels were given). Every flat index splits uniquely as
/// `base + target_offset`.
fn subsystem_offsets(layout: &SystemLayout, positions: &[usize]) -> (Vec<usize>, Vec<usize>) {
    let strides = layout.strides();
    let dims: Vec<usize> = positions
        .iter()
        .map(|&p| layout.subsystems()[p].1)
        .collect();
    let block: usize = dims.iter().product();

    let mut targets = Vec::with_capacity(block);
    for mut k in 0..block {
        let mut offset = 0;
        for i in (0..positions.len()).rev() {
            offset += (k % dims[i]) * strides[positions[i]];
            k /= dims[i];
        }
        targets.push(offset);
    }

    let mut bases = Vec::with_capacity(layout.dim() / block);
    'outer: for index in 0..layout.dim() {
        let digits = layout.unpack(index);
        for &p in positions {
            if digits[p] != 0 {
                continue 'outer;
            }
        }
        bases.push(index);
    }
    (bases, targets)
}

/// Applies `op` to the target digits of a flat state vector, identity on the
/// rest. `op` is `k x k` with `k` the product of the target dimensions.
fn apply_to_vector(
    op: &Array2<Complex64>,
    bases: &[usize],
    targets: &[usize],
    amps: &Array1<Complex64>,
) -> Array1<Complex64> {
    let k = targets.len();
    let mut out = Array1::zeros(amps.len());
    let mut scratch = vec![Complex64::new(0.0, 0.0); k];
    for &base in bases {
        for (j, &off) in targets.iter().enumerate() {
            scratch[j] = amps[base + off];
        }
        for (i, &off) in targets.iter().enumerate() {
            let mut acc = Complex64::new(0.0, 0.0);
            for j in 0..k {
                acc += op[(i, j)] * scratch[j];
            }
            out[base + off] = acc;
        }
    }
    out
}

fn check_op_dims(op: &Array2<Complex64>, layout: &SystemLayout, positions: &[usize]) -> Result<()> {
    let block: usize = positions
        .iter()
        .map(|&p| layout.subsystems()[p].1)
        .product();
    if op.nrows() != op.ncols() || op.nrows() != block {
        return Err(Error::DimensionMismatch(format!(
            "operator is {}x{}, target block is {}",
            op.nrows(),
            op.ncols(),
            block
        )));
    }
    Ok(())
}

/// Pure state over a labelled multipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Array1<Complex64>,
    layout: SystemLayout,
}

impl Ket {
    pub fn new(layout: SystemLayout, amps: Vec<Complex64>) -> Result<Self> {
        if amps.len() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{} amplitudes for a dimension-{} layout",
                amps.len(),
                layout.dim()
            )));
        }
        Ok(Self {
            amps: Array1::from(amps),
            layout,
        })
    }

    /// Computational basis state `|digits>`.
    pub fn basis(layout: SystemLayout, digits: &[usize]) -> Result<Self> {
        let index = layout.pack(digits)?;
        let mut amps = Array1::zeros(layout.dim());
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(Self { amps, layout })
    }

    /// Superposition built from `(digits, amplitude)` components.
    pub fn from_components(layout: SystemLayout, parts: &[(&[usize], Complex64)]) -> Result<Self> {
        let mut amps = Array1::zeros(layout.dim());
        for (digits, amp) in parts {
            amps[layout.pack(digits)?] += *amp;
        }
        Ok(Self { amps, layout })
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn amplitudes(&self) -> &Array1<Complex64> {
        &self.amps
    }

    pub fn amplitude(&self, digits: &[usize]) -> Result<Complex64> {
        Ok(self.amps[self.layout.pack(digits)?])
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    /// `<self|other>`.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.layout.dim() != other.layout.dim() {
            return Err(Error::DimensionMismatch(
                "inner product of kets with different dimensions".into(),
            ));
        }
        Ok(self
            .amps
            .iter()
            .zip(other.amps.iter())
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product; layouts are concatenated.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        let layout = self.layout.concat(&other.layout)?;
        let mut amps = Array1::zeros(layout.dim());
        let n = other.amps.len();
        for (i, a) in self.amps.iter().enumerate() {
            for (j, b) in other.amps.iter().enumerate() {
                amps[i * n + j] = a * b;
            }
        }
        Ok(Ket { amps, layout })
    }

    /// Density operator `|self><self|`.
    pub fn outer(&self) -> ComplexOperator {
        let n = self.amps.len();
        let mut mat = Array2::zeros((n, n));
        for i in 0..n {
            for j in 0..n {
                mat[(i, j)] = self.amps[i] * self.amps[j].conj();
            }
        }
        ComplexOperator {
            mat,
            layout: self.layout.clone(),
        }
    }

    /// Applies `op` on the listed subsystems, identity elsewhere.
    pub fn apply_on_subsystems(&self, op: &Array2<Complex64>, targets: &[&str]) -> Result<Ket> {
        let positions = self.layout.positions_of(targets)?;
        check_op_dims(op, &self.layout, &positions)?;
        let (bases, offs) = subsystem_offsets(&self.layout, &positions);
        Ok(Ket {
            amps: apply_to_vector(op, &bases, &offs, &self.amps),
            layout: self.layout.clone(),
        })
    }
}

/// Dense square operator over a labelled multipartite space.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexOperator {
    mat: Array2<Complex64>,
    layout: SystemLayout,
}

impl ComplexOperator {
    pub fn new(layout: SystemLayout, mat: Array2<Complex64>) -> Result<Self> {
        if mat.nrows() != mat.ncols() || mat.nrows() != layout.dim() {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} matrix for a dimension-{} layout",
                mat.nrows(),
                mat.ncols(),
                layout.dim()
            )));
        }
        Ok(Self { mat, layout })
    }

    pub fn identity(layout: SystemLayout) -> Self {
        let mat = Array2::eye(layout.dim());
        Self { mat, layout }
    }

    pub fn layout(&self) -> &SystemLayout {
        &self.layout
    }

    pub fn dim(&self) -> usize {
        self.mat.nrows()
    }

    pub fn matrix(&self) -> &Array2<Complex64> {
        &self.mat
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim()).map(|i| self.mat[(i, i)]).sum()
    }

    pub fn dagger(&self) -> ComplexOperator {
        let mut mat = Array2::zeros(self.mat.raw_dim());
        for i in 0..self.dim() {
            for j in 0..self.dim() {
                mat[(i, j)] = self.mat[(j, i)].conj();
            }
        }
        ComplexOperator {
            mat,
            layout: self.layout.clone(),
        }
    }

    pub fn matmul(&self, other: &ComplexOperator) -> Result<ComplexOperator> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch(
                "product of operators with different dimensions".into(),
            ));
        }
        Ok(ComplexOperator {
            mat: self.mat.dot(&other.mat),
            layout: self.layout.clone(),
        })
    }

    /// Kronecker product; layouts are concatenated.
    pub fn tensor(&self, other: &ComplexOperator) -> Result<ComplexOperator> {
        let layout = self.layout.concat(&other.layout)?;
        Ok(ComplexOperator {
            mat: ndarray::linalg::kron(&self.mat, &other.mat),
            layout,
        })
    }

    pub fn max_hermiticity_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for i in 0..self.dim() {
            for j in i..self.dim() {
                dev = dev.max((self.mat[(i, j)] - self.mat[(j, i)].conj()).norm());
            }
        }
        dev
    }

    pub fn max_abs_diff(&self, other: &ComplexOperator) -> f64 {
        let mut dev: f64 = 0.0;
        for (a, b) in self.mat.iter().zip(other.mat.iter()) {
            dev = dev.max((a - b).norm());
        }
        dev
    }

    /// `(O ⊗ I) · self`, with `O` acting on the listed subsystems.
    pub fn left_apply_on_subsystems(
        &self,
        op: &Array2<Complex64>,
        targets: &[&str],
    ) -> Result<ComplexOperator> {
        let positions = self.layout.positions_of(targets)?;
        check_op_dims(op, &self.layout, &positions)?;
        let (bases, offs) = subsystem_offsets(&self.layout, &positions);
        let mut mat = Array2::zeros(self.mat.raw_dim());
        for col in 0..self.dim() {
            let column = self.mat.column(col).to_owned();
            let transformed = apply_to_vector(op, &bases, &offs, &column);
            for row in 0..self.dim() {
                mat[(row, col)] = transformed[row];
            }
        }
        Ok(ComplexOperator {
            mat,
            layout: self.layout.clone(),
        })
    }

    /// `(O ⊗ I) · self · (O ⊗ I)†`, the conjugation used for channels.
    pub fn conjugate_on_subsystems(
        &self,
        op: &Array2<Complex64>,
        targets: &[&str],
    ) -> Result<ComplexOperator> {
        let left = self.left_apply_on_subsystems(op, targets)?;
        let positions = self.layout.positions_of(targets)?;
        let (bases, offs) = subsystem_offsets(&self.layout, &positions);
        // Right-multiplying by (O ⊗ I)† maps each row r to conj(O) r.
        let conj_op = op.mapv(|z| z.conj());
        let mut mat = Array2::zeros(self.mat.raw_dim());
        for row in 0..self.dim() {
            let r = left.mat.row(row).to_owned();
            let transformed = apply_to_vector(&conj_op, &bases, &offs, &r);
            for col in 0..self.dim() {
                mat[(row, col)] = transformed[col];
            }
        }
        Ok(ComplexOperator {
            mat,
            layout: self.layout.clone(),
        })
    }

    /// Reduced operator on the kept labels; the rest are traced out.
    ///
    /// Kept subsystems stay in their original layout order. Requires a valid
    /// density operator (Hermitian, unit trace).
    pub fn partial_trace(&self, keep: &[&str]) -> Result<ComplexOperator> {
        let dev = self.max_hermiticity_deviation();
        if dev > 1e-9 {
            return Err(Error::NotHermitian(dev));
        }
        let trace = self.trace();
        if (trace.re - 1.0).abs() > 1e-9 || trace.im.abs() > 1e-9 {
            return Err(Error::NotNormalized(trace.re));
        }

        let mut keep_positions = self.layout.positions_of(keep)?;
        keep_positions.sort_unstable();
        let kept: Vec<(&str, usize)> = keep_positions
            .iter()
            .map(|&p| {
                let (l, d) = &self.layout.subsystems()[p];
                (l.as_str(), *d)
            })
            .collect();
        let traced: Vec<usize> = (0..self.layout.n_subsystems())
            .filter(|p| !keep_positions.contains(p))
            .collect();

        if traced.is_empty() {
            return Ok(self.clone());
        }

        let (_, keep_offsets) = subsystem_offsets(&self.layout, &keep_positions);
        let (_, traced_offsets) = subsystem_offsets(&self.layout, &traced);

        let out_layout = SystemLayout::new(&kept)?;
        let mut mat = Array2::zeros((out_layout.dim(), out_layout.dim()));
        for (i, &ro) in keep_offsets.iter().enumerate() {
            for (j, &co) in keep_offsets.iter().enumerate() {
                let mut acc = Complex64::new(0.0, 0.0);
                for &to in &traced_offsets {
                    acc += self.mat[(ro + to, co + to)];
                }
                mat[(i, j)] = acc;
            }
        }
        Ok(ComplexOperator {
            mat,
            layout: out_layout,
        })
    }

    /// `<ket| self |ket>`.
    pub fn expectation(&self, ket: &Ket) -> Result<Complex64> {
        if ket.amps.len() != self.dim() {
            return Err(Error::DimensionMismatch(
                "expectation with mismatched ket".into(),
            ));
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for i in 0..self.dim() {
            if ket.amps[i] == Complex64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..self.dim() {
                acc += ket.amps[i].conj() * self.mat[(i, j)] * ket.amps[j];
            }
        }
        Ok(acc)
    }

    /// Convex combination accumulator: `self + weight * other`.
    pub fn add_scaled(&mut self, other: &ComplexOperator, weight: f64) {
        for (a, b) in self.mat.iter_mut().zip(other.mat.iter()) {
            *a += b * weight;
        }
    }

    pub fn zeros(layout: SystemLayout) -> Self {
        let dim = layout.dim();
        Self {
            mat: Array2::zeros((dim, dim)),
            layout,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::SystemLayout;
    use approx::assert_abs_diff_eq;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn qubit_pair() -> SystemLayout {
        SystemLayout::new(&[("h", 2), ("t", 2)]).unwrap()
    }

    fn psi_plus() -> Ket {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        Ket::from_components(qubit_pair(), &[(&[0, 1], c(s)), (&[1, 0], c(s))]).unwrap()
    }

    #[test]
    fn tensor_of_identities() {
        let i2 = ComplexOperator::identity(SystemLayout::single("a", 2).unwrap());
        let i3 = ComplexOperator::identity(SystemLayout::single("b", 3).unwrap());
        let i6 = i2.tensor(&i3).unwrap();
        let expected = ComplexOperator::identity(SystemLayout::new(&[("a", 2), ("b", 3)]).unwrap());
        assert_eq!(i6.max_abs_diff(&expected), 0.0);
    }

    #[test]
    fn tensor_of_basis_kets() {
        let zero = Ket::basis(SystemLayout::single("a", 2).unwrap(), &[0]).unwrap();
        let one = Ket::basis(SystemLayout::single("b", 2).unwrap(), &[1]).unwrap();
        let combined = zero.tensor(&one).unwrap();
        assert_eq!(combined.amplitude(&[0, 1]).unwrap(), c(1.0));
        assert_eq!(combined.amplitudes()[1], c(1.0));
        assert_abs_diff_eq!(combined.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn bell_state_norm() {
        assert_abs_diff_eq!(psi_plus().norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn z_on_travel_flips_bell_state() {
        // (I ⊗ Z)|psi+> = |psi-> up to a global phase.
        let z = ndarray::array![[c(1.0), c(0.0)], [c(0.0), c(-1.0)]];
        let flipped = psi_plus().apply_on_subsystems(&z, &["t"]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let psi_minus =
            Ket::from_components(qubit_pair(), &[(&[0, 1], c(s)), (&[1, 0], c(-s))]).unwrap();
        let overlap = psi_minus.inner(&flipped).unwrap();
        assert_abs_diff_eq!(overlap.norm(), 1.0, epsilon = 1e-15);
    }

    #[test]
    fn identity_application_is_noop() {
        let id = Array2::eye(2);
        let out = psi_plus().apply_on_subsystems(&id, &["h"]).unwrap();
        assert_eq!(out, psi_plus());
    }

    #[test]
    fn x_on_home_qubit() {
        let x = ndarray::array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let state = Ket::basis(qubit_pair(), &[0, 0]).unwrap();
        let out = state.apply_on_subsystems(&x, &["h"]).unwrap();
        assert_eq!(out.amplitude(&[1, 0]).unwrap(), c(1.0));
    }

    #[test]
    fn apply_rejects_bad_dims_and_labels() {
        let z3 = Array2::<Complex64>::eye(3);
        assert!(psi_plus().apply_on_subsystems(&z3, &["t"]).is_err());
        let z2 = Array2::<Complex64>::eye(2);
        assert!(psi_plus().apply_on_subsystems(&z2, &["q"]).is_err());
    }

    #[test]
    fn partial_trace_of_bell_pair_is_maximally_mixed() {
        let rho = psi_plus().outer();
        let reduced = rho.partial_trace(&["h"]).unwrap();
        assert_eq!(reduced.dim(), 2);
        assert_abs_diff_eq!(reduced.matrix()[(0, 0)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(reduced.matrix()[(1, 1)].re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(reduced.matrix()[(0, 1)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_keeping_everything_is_identity_map() {
        let rho = psi_plus().outer();
        let same = rho.partial_trace(&["h", "t"]).unwrap();
        assert_eq!(same.max_abs_diff(&rho), 0.0);
        assert_abs_diff_eq!(same.trace().re, rho.trace().re, epsilon = 1e-15);
    }

    #[test]
    fn partial_trace_rejects_unknown_label() {
        assert!(psi_plus().outer().partial_trace(&["q"]).is_err());
    }

    #[test]
    fn left_application_matches_dense_embedding() {
        let x = ndarray::array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let rho = psi_plus().outer();
        let via_subsystem = rho.left_apply_on_subsystems(&x, &["t"]).unwrap();
        let full = ndarray::linalg::kron(&Array2::eye(2), &x);
        let expected = ComplexOperator::new(qubit_pair(), full.dot(rho.matrix())).unwrap();
        assert!(via_subsystem.max_abs_diff(&expected) < 1e-15);
    }

    #[test]
    fn conjugation_matches_dense_embedding() {
        // X on t of the Bell pair, checked against an explicit 4x4 conjugation.
        let x = ndarray::array![[c(0.0), c(1.0)], [c(1.0), c(0.0)]];
        let rho = psi_plus().outer();
        let via_subsystem = rho.conjugate_on_subsystems(&x, &["t"]).unwrap();

        let full = ndarray::linalg::kron(&Array2::eye(2), &x);
        let dense = full.dot(rho.matrix()).dot(&full.mapv(|z| z.conj()).t());
        let expected = ComplexOperator::new(qubit_pair(), dense).unwrap();
        assert!(via_subsystem.max_abs_diff(&expected) < 1e-15);
    }
}
