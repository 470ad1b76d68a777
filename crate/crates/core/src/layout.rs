use crate::error::{Error, Result};

/// Label of Bob's home qubit.
pub const HOME: &str = "h";
/// Label of the travel mode (three levels, `|2>` is the vacuum).
pub const TRAVEL: &str = "t";
/// Label of Eve's first ancilla mode (prepared in the vacuum `|2>`).
pub const EVE_X: &str = "x";
/// Label of Eve's second ancilla mode (prepared in `|0>`).
pub const EVE_Y: &str = "y";

/// Ordered list of labelled subsystems with their dimensions.
///
/// Basis states are indexed row-major: the last subsystem varies fastest.
/// The canonical protocol layout is `[(h,2), (t,3), (x,3), (y,3)]`, a
/// 54-dimensional space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SystemLayout {
    subsystems: Vec<(String, usize)>,
}

impl SystemLayout {
    pub fn new(subsystems: &[(&str, usize)]) -> Result<Self> {
        for (i, (label, dim)) in subsystems.iter().enumerate() {
            if *dim < 2 {
                return Err(Error::InvalidParameter(format!(
                    "subsystem `{label}` has dimension {dim}; need at least 2"
                )));
            }
            if subsystems[..i].iter().any(|(l, _)| l == label) {
                return Err(Error::InvalidParameter(format!(
                    "duplicate subsystem label `{label}`"
                )));
            }
        }
        Ok(Self {
            subsystems: subsystems
                .iter()
                .map(|(l, d)| (l.to_string(), *d))
                .collect(),
        })
    }

    pub fn single(label: &str, dim: usize) -> Result<Self> {
        Self::new(&[(label, dim)])
    }

    /// The `h ⊗ t ⊗ x ⊗ y` layout used by the protocol.
    pub fn protocol() -> Self {
        Self::new(&[(HOME, 2), (TRAVEL, 3), (EVE_X, 3), (EVE_Y, 3)])
            .expect("protocol layout is valid")
    }

    /// Total Hilbert-space dimension (product of subsystem dimensions).
    pub fn dim(&self) -> usize {
        self.subsystems.iter().map(|(_, d)| d).product()
    }

    pub fn n_subsystems(&self) -> usize {
        self.subsystems.len()
    }

    pub fn subsystems(&self) -> &[(String, usize)] {
        &self.subsystems
    }

    pub fn position_of(&self, label: &str) -> Result<usize> {
        self.subsystems
            .iter()
            .position(|(l, _)| l == label)
            .ok_or_else(|| Error::UnknownLabel(label.to_string()))
    }

    /// Positions of the given labels, in the order given. Duplicates are
    /// rejected.
    pub fn positions_of(&self, labels: &[&str]) -> Result<Vec<usize>> {
        let mut positions = Vec::with_capacity(labels.len());
        for (i, label) in labels.iter().enumerate() {
            if labels[..i].contains(label) {
                return Err(Error::InvalidParameter(format!(
                    "label `{label}` listed twice"
                )));
            }
            positions.push(self.position_of(label)?);
        }
        Ok(positions)
    }

    pub fn dim_of(&self, label: &str) -> Result<usize> {
        Ok(self.subsystems[self.position_of(label)?].1)
    }

    /// Row-major strides, one per subsystem.
    pub fn strides(&self) -> Vec<usize> {
        let mut strides = vec![1; self.subsystems.len()];
        for i in (0..self.subsystems.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * self.subsystems[i + 1].1;
        }
        strides
    }

    /// Flat index of a basis state given one digit per subsystem.
    pub fn pack(&self, digits: &[usize]) -> Result<usize> {
        if digits.len() != self.subsystems.len() {
            return Err(Error::DimensionMismatch(format!(
                "expected {} digits, got {}",
                self.subsystems.len(),
                digits.len()
            )));
        }
        let mut index = 0;
        for (digit, (label, dim)) in digits.iter().zip(&self.subsystems) {
            if digit >= dim {
                return Err(Error::InvalidParameter(format!(
                    "digit {digit} out of range for subsystem `{label}` (dim {dim})"
                )));
            }
            index = index * dim + digit;
        }
        Ok(index)
    }

    /// Digits of a flat basis index, one per subsystem.
    pub fn unpack(&self, mut index: usize) -> Vec<usize> {
        let mut digits = vec![0; self.subsystems.len()];
        for (i, (_, dim)) in self.subsystems.iter().enumerate().rev() {
            digits[i] = index % dim;
            index /= dim;
        }
        digits
    }

    /// Concatenated layout, used by tensor products.
    pub fn concat(&self, other: &SystemLayout) -> Result<SystemLayout> {
        let mut subsystems: Vec<(&str, usize)> = self
            .subsystems
            .iter()
            .map(|(l, d)| (l.as_str(), *d))
            .collect();
        subsystems.extend(other.subsystems.iter().map(|(l, d)| (l.as_str(), *d)));
        SystemLayout::new(&subsystems)
    }
}
