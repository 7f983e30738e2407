use super::QsimError;

/// Largest simulable register file: 2^26 amplitudes is 1 GiB of f64 pairs.
pub const MAX_QUBITS: usize = 26;

/// The five named registers of the solver circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Register {
    /// Rotation ancilla, 1 qubit, most significant.
    S,
    /// Eigenvalue-reciprocal register, n_a qubits.
    A,
    /// Interference ancilla, 1 qubit.
    B,
    /// Phase-estimation clock, n_c qubits.
    C,
    /// Input/solution register, n_i qubits, least significant.
    I,
}

pub const REGISTERS: [Register; 5] = [Register::S, Register::A, Register::B, Register::C, Register::I];

/// Fixed qubit layout: registers S, A, B, C, I from most to least
/// significant bit of the basis index.
///
/// Within a register, qubit k carries place value 2^k of the register's
/// binary value, so a register reads as an ordinary unsigned integer from
/// its own bit span.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RegisterLayout {
    n_a: usize,
    n_c: usize,
    n_i: usize,
}

impl RegisterLayout {
    pub fn new(n_a: usize, n_c: usize, n_i: usize) -> Result<Self, QsimError> {
        if n_a == 0 || n_c == 0 || n_i == 0 {
            return Err(QsimError::InvalidLayout(
                "registers A, C, and I each need at least one qubit".into(),
            ));
        }
        let total = 2 + n_a + n_c + n_i;
        if total > MAX_QUBITS {
            return Err(QsimError::InvalidLayout(format!(
                "{total} qubits exceed the {MAX_QUBITS}-qubit simulator cap"
            )));
        }
        Ok(RegisterLayout { n_a, n_c, n_i })
    }

    pub fn total_qubits(&self) -> usize {
        2 + self.n_a + self.n_c + self.n_i
    }

    /// Statevector length 2^total.
    pub fn dimension(&self) -> usize {
        1usize << self.total_qubits()
    }

    pub fn width(&self, reg: Register) -> usize {
        match reg {
            Register::S | Register::B => 1,
            Register::A => self.n_a,
            Register::C => self.n_c,
            Register::I => self.n_i,
        }
    }

    /// Global index of the register's least significant qubit.
    pub fn offset(&self, reg: Register) -> usize {
        match reg {
            Register::I => 0,
            Register::C => self.n_i,
            Register::B => self.n_i + self.n_c,
            Register::A => self.n_i + self.n_c + 1,
            Register::S => self.n_i + self.n_c + 1 + self.n_a,
        }
    }

    /// Global index of qubit k (place value 2^k) of a register.
    pub fn qubit(&self, reg: Register, k: usize) -> usize {
        debug_assert!(k < self.width(reg), "qubit {k} outside register {reg:?}");
        self.offset(reg) + k
    }

    /// Bitmask covering the register's span.
    pub fn mask(&self, reg: Register) -> usize {
        ((1usize << self.width(reg)) - 1) << self.offset(reg)
    }

    /// The register's binary value inside a basis index.
    pub fn value_of(&self, basis_index: usize, reg: Register) -> usize {
        (basis_index & self.mask(reg)) >> self.offset(reg)
    }

    /// Builds a basis index from register values; unlisted registers are 0.
    pub fn pack(&self, values: &[(Register, usize)]) -> Result<usize, QsimError> {
        let mut index = 0usize;
        for &(reg, v) in values {
            if v >= (1usize << self.width(reg)) {
                return Err(QsimError::InvalidInput(format!(
                    "value {v} does not fit the {}-qubit register {reg:?}",
                    self.width(reg)
                )));
            }
            index |= v << self.offset(reg);
        }
        Ok(index)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn registers_tile_the_index_without_overlap() {
        let layout = RegisterLayout::new(3, 4, 5).unwrap();
        assert_eq!(layout.total_qubits(), 2 + 3 + 4 + 5);
        let mut seen = 0usize;
        for reg in REGISTERS {
            let mask = layout.mask(reg);
            assert_eq!(seen & mask, 0, "register {reg:?} overlaps");
            seen |= mask;
        }
        assert_eq!(seen, layout.dimension() - 1);
    }

    #[test]
    fn significance_order_is_s_a_b_c_i() {
        let layout = RegisterLayout::new(2, 3, 4).unwrap();
        assert!(layout.offset(Register::S) > layout.offset(Register::A));
        assert!(layout.offset(Register::A) > layout.offset(Register::B));
        assert!(layout.offset(Register::B) > layout.offset(Register::C));
        assert!(layout.offset(Register::C) > layout.offset(Register::I));
        assert_eq!(layout.offset(Register::I), 0);
        assert_eq!(layout.offset(Register::S), layout.total_qubits() - 1);
    }

    #[test]
    fn pack_and_value_round_trip() {
        let layout = RegisterLayout::new(2, 3, 4).unwrap();
        let idx = layout
            .pack(&[(Register::S, 1), (Register::A, 2), (Register::C, 5), (Register::I, 9)])
            .unwrap();
        assert_eq!(layout.value_of(idx, Register::S), 1);
        assert_eq!(layout.value_of(idx, Register::A), 2);
        assert_eq!(layout.value_of(idx, Register::B), 0);
        assert_eq!(layout.value_of(idx, Register::C), 5);
        assert_eq!(layout.value_of(idx, Register::I), 9);
        assert!(layout.pack(&[(Register::B, 2)]).is_err());
    }

    #[test]
    fn oversized_layouts_are_rejected() {
        assert!(RegisterLayout::new(0, 3, 4).is_err());
        assert!(RegisterLayout::new(10, 10, 10).is_err());
        assert!(RegisterLayout::new(8, 8, 8).is_ok());
    }
}
