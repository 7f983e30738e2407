use num_complex::Complex64;

use super::layout::{Register, RegisterLayout, REGISTERS};
use super::trace::{GateRecord, GateTrace};
use super::QsimError;
use crate::{CMatrix, CVector};

/// Zero-probability floor below which post-selection refuses to collapse.
pub const POSTSELECT_FLOOR: f64 = 1e-15;

/// A control condition: the gate acts only where `bit` reads `value`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Control {
    pub bit: usize,
    pub value: bool,
}

impl Control {
    pub fn positive(bit: usize) -> Self {
        Control { bit, value: true }
    }

    pub fn negative(bit: usize) -> Self {
        Control { bit, value: false }
    }
}

/// Dense statevector over the fixed register layout.
///
/// Amplitude index bit k is qubit k; registers occupy the contiguous spans
/// defined by [`RegisterLayout`]. All gates are exact complex arithmetic;
/// there is no sampling anywhere.
#[derive(Debug, Clone)]
pub struct Statevector {
    layout: RegisterLayout,
    amps: Vec<Complex64>,
    trace: Option<GateTrace>,
    gate_count: u64,
}

fn control_masks(
    total_qubits: usize,
    targets: &[usize],
    controls: &[Control],
) -> Result<(usize, usize), QsimError> {
    let mut cmask = 0usize;
    let mut cval = 0usize;
    for c in controls {
        if c.bit >= total_qubits {
            return Err(QsimError::InvalidInput(format!(
                "control qubit {} outside the {total_qubits}-qubit state",
                c.bit
            )));
        }
        let bit = 1usize << c.bit;
        if cmask & bit != 0 {
            return Err(QsimError::InvalidInput(format!("duplicate control on qubit {}", c.bit)));
        }
        if targets.contains(&c.bit) {
            return Err(QsimError::InvalidInput(format!(
                "qubit {} is both target and control",
                c.bit
            )));
        }
        cmask |= bit;
        if c.value {
            cval |= bit;
        }
    }
    for t in targets {
        if *t >= total_qubits {
            return Err(QsimError::InvalidInput(format!(
                "target qubit {t} outside the {total_qubits}-qubit state"
            )));
        }
    }
    Ok((cmask, cval))
}

impl Statevector {
    /// The all-zeros computational basis state.
    pub fn zero_state(layout: RegisterLayout) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); layout.dimension()];
        amps[0] = Complex64::new(1.0, 0.0);
        Statevector { layout, amps, trace: None, gate_count: 0 }
    }

    /// Loads a unit vector into register I, all other registers |0⟩.
    ///
    /// The input may be shorter than 2^{n_i}; missing entries are zero.
    /// Its norm must be 1 within 1e−9 and is then normalized exactly.
    pub fn prepare_input_state(y_hat: &CVector, layout: RegisterLayout) -> Result<Self, QsimError> {
        let cap = 1usize << layout.width(Register::I);
        if y_hat.len() > cap {
            return Err(QsimError::InvalidInput(format!(
                "{} input amplitudes exceed the {}-qubit register capacity {}",
                y_hat.len(),
                layout.width(Register::I),
                cap
            )));
        }
        let norm = y_hat.norm();
        if !norm.is_finite() || (norm - 1.0).abs() > 1e-9 {
            return Err(QsimError::NotNormalized { norm });
        }
        let mut state = Statevector::zero_state(layout);
        state.amps[0] = Complex64::new(0.0, 0.0);
        for (i, z) in y_hat.iter().enumerate() {
            state.amps[i] = z / norm;
        }
        Ok(state)
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Count of gate applications so far (a dense register unitary counts
    /// as one).
    pub fn gate_count(&self) -> u64 {
        self.gate_count
    }

    pub fn enable_trace(&mut self) {
        self.trace = Some(GateTrace::default());
    }

    pub fn trace(&self) -> Option<&GateTrace> {
        self.trace.as_ref()
    }

    pub fn take_trace(&mut self) -> Option<GateTrace> {
        self.trace.take()
    }

    fn record(
        &mut self,
        name: &'static str,
        targets: &[usize],
        controls: &[Control],
        angle: Option<f64>,
    ) {
        self.gate_count += 1;
        if let Some(trace) = &mut self.trace {
            trace.records.push(GateRecord {
                name,
                targets: targets.to_vec(),
                controls: controls.to_vec(),
                angle,
            });
        }
    }

    fn apply_1q(
        &mut self,
        u: [[Complex64; 2]; 2],
        bit: usize,
        controls: &[Control],
    ) -> Result<(), QsimError> {
        let (cmask, cval) = control_masks(self.layout.total_qubits(), &[bit], controls)?;
        let mask = 1usize << bit;
        for i in 0..self.amps.len() {
            if i & mask != 0 || i & cmask != cval {
                continue;
            }
            let j = i | mask;
            let a = self.amps[i];
            let b = self.amps[j];
            self.amps[i] = u[0][0] * a + u[0][1] * b;
            self.amps[j] = u[1][0] * a + u[1][1] * b;
        }
        Ok(())
    }

    /// Hadamard.
    pub fn h(&mut self, bit: usize, controls: &[Control]) -> Result<(), QsimError> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let h = [
            [Complex64::new(s, 0.0), Complex64::new(s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(-s, 0.0)],
        ];
        self.apply_1q(h, bit, controls)?;
        self.record("h", &[bit], controls, None);
        Ok(())
    }

    /// Hadamard on every qubit of a register.
    pub fn hadamard_all(&mut self, reg: Register) -> Result<(), QsimError> {
        for k in 0..self.layout.width(reg) {
            self.h(self.layout.qubit(reg, k), &[])?;
        }
        Ok(())
    }

    /// NOT.
    pub fn x(&mut self, bit: usize, controls: &[Control]) -> Result<(), QsimError> {
        let zero = Complex64::new(0.0, 0.0);
        let one = Complex64::new(1.0, 0.0);
        self.apply_1q([[zero, one], [one, zero]], bit, controls)?;
        self.record("x", &[bit], controls, None);
        Ok(())
    }

    /// Ry(θ): |0⟩ ↦ cos(θ/2)|0⟩ + sin(θ/2)|1⟩.
    pub fn ry(&mut self, angle: f64, bit: usize, controls: &[Control]) -> Result<(), QsimError> {
        let (s, c) = (angle / 2.0).sin_cos();
        let u = [
            [Complex64::new(c, 0.0), Complex64::new(-s, 0.0)],
            [Complex64::new(s, 0.0), Complex64::new(c, 0.0)],
        ];
        self.apply_1q(u, bit, controls)?;
        self.record("ry", &[bit], controls, Some(angle));
        Ok(())
    }

    /// Rz(θ) = diag(e^{−iθ/2}, e^{+iθ/2}).
    pub fn rz(&mut self, angle: f64, bit: usize, controls: &[Control]) -> Result<(), QsimError> {
        let zero = Complex64::new(0.0, 0.0);
        let u = [
            [Complex64::cis(-angle / 2.0), zero],
            [zero, Complex64::cis(angle / 2.0)],
        ];
        self.apply_1q(u, bit, controls)?;
        self.record("rz", &[bit], controls, Some(angle));
        Ok(())
    }

    /// Phase gate diag(1, e^{iθ}).
    pub fn phase(&mut self, angle: f64, bit: usize, controls: &[Control]) -> Result<(), QsimError> {
        let zero = Complex64::new(0.0, 0.0);
        let u = [
            [Complex64::new(1.0, 0.0), zero],
            [zero, Complex64::cis(angle)],
        ];
        self.apply_1q(u, bit, controls)?;
        self.record("phase", &[bit], controls, Some(angle));
        Ok(())
    }

    /// Rzz(θ) = e^{−i(θ/2) Z⊗Z}: equal-parity pairs get e^{−iθ/2},
    /// opposite-parity pairs e^{+iθ/2}.
    pub fn rzz(
        &mut self,
        angle: f64,
        bit_a: usize,
        bit_b: usize,
        controls: &[Control],
    ) -> Result<(), QsimError> {
        if bit_a == bit_b {
            return Err(QsimError::InvalidInput("rzz needs two distinct qubits".into()));
        }
        let (cmask, cval) = control_masks(self.layout.total_qubits(), &[bit_a, bit_b], controls)?;
        let same = Complex64::cis(-angle / 2.0);
        let diff = Complex64::cis(angle / 2.0);
        let ma = 1usize << bit_a;
        let mb = 1usize << bit_b;
        for (i, z) in self.amps.iter_mut().enumerate() {
            if i & cmask != cval {
                continue;
            }
            *z *= if ((i & ma != 0) as u8) == ((i & mb != 0) as u8) { same } else { diff };
        }
        self.record("rzz", &[bit_a, bit_b], controls, Some(angle));
        Ok(())
    }

    /// Exchanges two qubits.
    pub fn swap(&mut self, bit_a: usize, bit_b: usize, controls: &[Control]) -> Result<(), QsimError> {
        if bit_a == bit_b {
            return Err(QsimError::InvalidInput("swap needs two distinct qubits".into()));
        }
        let (cmask, cval) = control_masks(self.layout.total_qubits(), &[bit_a, bit_b], controls)?;
        let ma = 1usize << bit_a;
        let mb = 1usize << bit_b;
        for i in 0..self.amps.len() {
            // Visit each pair once from its (a=1, b=0) side.
            if i & ma == 0 || i & mb != 0 || i & cmask != cval {
                continue;
            }
            let j = (i & !ma) | mb;
            self.amps.swap(i, j);
        }
        self.record("swap", &[bit_a, bit_b], controls, None);
        Ok(())
    }

    /// Applies a dense unitary to a whole register, optionally controlled.
    ///
    /// Unitarity of `u` is validated (max entry deviation of UᴴU from the
    /// identity at most 1e−10).
    pub fn apply_register_unitary(
        &mut self,
        reg: Register,
        u: &CMatrix,
        controls: &[Control],
    ) -> Result<(), QsimError> {
        let dev = unitarity_deviation(u);
        if dev > 1e-10 {
            return Err(QsimError::NonUnitary { deviation: dev });
        }
        self.apply_register_unitary_prevalidated(reg, u, controls)
    }

    /// Same as [`Self::apply_register_unitary`] without the unitarity scan;
    /// for matrices validated once at circuit-construction time.
    pub(crate) fn apply_register_unitary_prevalidated(
        &mut self,
        reg: Register,
        u: &CMatrix,
        controls: &[Control],
    ) -> Result<(), QsimError> {
        let w = self.layout.width(reg);
        let o = self.layout.offset(reg);
        let dim_r = 1usize << w;
        if u.nrows() != dim_r || u.ncols() != dim_r {
            return Err(QsimError::InvalidInput(format!(
                "{}x{} matrix does not fit the {w}-qubit register {reg:?}",
                u.nrows(),
                u.ncols()
            )));
        }
        let targets: Vec<usize> = (0..w).map(|k| o + k).collect();
        let (cmask, cval) = control_masks(self.layout.total_qubits(), &targets, controls)?;
        let reg_mask = self.layout.mask(reg);
        let mut gathered = vec![Complex64::new(0.0, 0.0); dim_r];
        for base in 0..self.amps.len() {
            if base & reg_mask != 0 || base & cmask != cval {
                continue;
            }
            for (v, g) in gathered.iter_mut().enumerate() {
                *g = self.amps[base | (v << o)];
            }
            for r in 0..dim_r {
                let mut acc = Complex64::new(0.0, 0.0);
                for (v, g) in gathered.iter().enumerate() {
                    acc += u[(r, v)] * g;
                }
                self.amps[base | (r << o)] = acc;
            }
        }
        self.record("unitary", &targets, controls, None);
        Ok(())
    }

    /// Quantum Fourier transform on a register's value:
    /// |k⟩ ↦ 2^{−w/2} Σ_m e^{+2πi k m / 2^w} |m⟩.
    pub fn qft(&mut self, reg: Register) -> Result<(), QsimError> {
        let w = self.layout.width(reg);
        let o = self.layout.offset(reg);
        for q in (0..w).rev() {
            self.h(o + q, &[])?;
            for p in (0..q).rev() {
                let angle = std::f64::consts::TAU / (1u64 << (q - p + 1)) as f64;
                self.phase(angle, o + q, &[Control::positive(o + p)])?;
            }
        }
        for q in 0..w / 2 {
            self.swap(o + q, o + w - 1 - q, &[])?;
        }
        Ok(())
    }

    /// Inverse of [`Self::qft`]: gate-by-gate reversal with negated angles.
    pub fn inverse_qft(&mut self, reg: Register) -> Result<(), QsimError> {
        let w = self.layout.width(reg);
        let o = self.layout.offset(reg);
        for q in 0..w / 2 {
            self.swap(o + q, o + w - 1 - q, &[])?;
        }
        for q in 0..w {
            for p in 0..q {
                let angle = -std::f64::consts::TAU / (1u64 << (q - p + 1)) as f64;
                self.phase(angle, o + q, &[Control::positive(o + p)])?;
            }
            self.h(o + q, &[])?;
        }
        Ok(())
    }

    /// Exact probability that `bit` reads `outcome`.
    pub fn probability_of(&self, bit: usize, outcome: bool) -> f64 {
        let mask = 1usize << bit;
        let want = if outcome { mask } else { 0 };
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == want)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }

    /// Collapses `bit` onto `outcome`, renormalizes, and returns the exact
    /// outcome probability. Probabilities below the floor are refused.
    pub fn postselect(&mut self, bit: usize, outcome: bool) -> Result<f64, QsimError> {
        if bit >= self.layout.total_qubits() {
            return Err(QsimError::InvalidInput(format!("qubit {bit} outside the state")));
        }
        let p = self.probability_of(bit, outcome);
        if p < POSTSELECT_FLOOR {
            return Err(QsimError::ZeroProbabilityBranch { probability: p });
        }
        let mask = 1usize << bit;
        let want = if outcome { mask } else { 0 };
        let scale = 1.0 / p.sqrt();
        for (i, z) in self.amps.iter_mut().enumerate() {
            if i & mask == want {
                *z *= scale;
            } else {
                *z = Complex64::new(0.0, 0.0);
            }
        }
        Ok(p)
    }

    /// Marginal probability distribution over a register's values.
    pub fn register_probabilities(&self, reg: Register) -> Vec<f64> {
        let mut out = vec![0.0f64; 1usize << self.layout.width(reg)];
        for (i, z) in self.amps.iter().enumerate() {
            out[self.layout.value_of(i, reg)] += z.norm_sqr();
        }
        out
    }

    /// Raw amplitude slice of `reg` with every other register pinned to a
    /// basis value (0 unless listed in `others_fixed_at`).
    pub fn register_slice(
        &self,
        reg: Register,
        others_fixed_at: &[(Register, usize)],
    ) -> Result<CVector, QsimError> {
        for (other, _) in others_fixed_at {
            if *other == reg {
                return Err(QsimError::InvalidInput(
                    "cannot pin the register being read".into(),
                ));
            }
        }
        let base = self.layout.pack(others_fixed_at)?;
        let o = self.layout.offset(reg);
        let n = 1usize << self.layout.width(reg);
        Ok(CVector::from_fn(n, |v, _| self.amps[base | (v << o)]))
    }

    /// [`Self::register_slice`] with the global phase normalized so the
    /// first entry of modulus above 1e−12 is real-positive.
    pub fn read_register_amplitudes(
        &self,
        reg: Register,
        others_fixed_at: &[(Register, usize)],
    ) -> Result<CVector, QsimError> {
        let mut slice = self.register_slice(reg, others_fixed_at)?;
        if let Some(z) = slice.iter().find(|z| z.norm() > 1e-12) {
            let rotate = z.conj() / z.norm();
            slice *= rotate;
        }
        Ok(slice)
    }

    /// Checks that all registers outside `keep` read all-zeros with
    /// probability at least 1 − tolerance.
    pub fn zeros_probability_outside(&self, keep: &[Register]) -> f64 {
        let mut mask = 0usize;
        for reg in REGISTERS {
            if !keep.contains(&reg) {
                mask |= self.layout.mask(reg);
            }
        }
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask == 0)
            .map(|(_, z)| z.norm_sqr())
            .sum()
    }
}

/// Maximum entry deviation of UᴴU from the identity.
pub fn unitarity_deviation(u: &CMatrix) -> f64 {
    if u.nrows() != u.ncols() {
        return f64::INFINITY;
    }
    let gram = u.adjoint() * u;
    let mut dev = 0.0f64;
    for i in 0..gram.nrows() {
        for j in 0..gram.ncols() {
            let want = if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) };
            dev = dev.max((gram[(i, j)] - want).norm());
        }
    }
    dev
}
