use std::sync::Arc;
use std::time::{Duration, Instant};

use num_complex::Complex64;

use super::calibration::{calibrate_spectrum, HhlParams, RotationMode, DEFAULT_N_SA_MULTIPLIER};
use super::HhlError;
use crate::qsim::{unitarity_deviation, Control, Register, RegisterLayout, Statevector};
use crate::solvers::{direct_solve, fidelity, RegularizedSystem};
use crate::{CMatrix, CVector};

/// Success probabilities below this floor abort the solve as degenerate.
pub const P1_FLOOR: f64 = 1e-12;

/// Result of one quantum solve of Ξσ̃ = γ.
#[derive(Debug, Clone)]
pub struct HhlOutcome {
    /// Rescaled solution σ̃ of Ξσ̃ = γ, length = system dimension.
    pub solution: CVector,
    /// Exact probability of reading the rotation ancilla as |1⟩.
    pub p1: f64,
    /// |⟨quantum direction, classical direction⟩| against the eigenbasis
    /// solve.
    pub fidelity_vs_oracle: f64,
    pub gate_count: u64,
    pub qubit_count: usize,
    /// Probability mass on A = B = C = 0 just before post-selection;
    /// 1 − 1e−9 or better on calibrated systems.
    pub ancilla_zeros_probability: f64,
    pub condition_number: f64,
    pub wall_time: Duration,
    pub params: HhlParams,
}

impl HhlOutcome {
    /// Structured per-run report.
    pub fn report(&self) -> String {
        let p = &self.params;
        let mut out = String::new();
        out.push_str("eigenvalue-inversion run\n");
        out.push_str(&format!(
            "  registers: S=1 A={} B=1 C={} I={} (total {})\n",
            p.n_a, p.n_c, p.n_i, self.qubit_count
        ));
        match p.mode {
            RotationMode::LcmExact => {
                let mut distinct = p.scaled_eigenvalues.clone();
                distinct.sort_unstable();
                distinct.dedup();
                out.push_str(&format!(
                    "  scaled spectrum: {:?}  lcm={}  n_sa={}\n",
                    distinct, p.lcm, p.n_sa
                ));
            }
            RotationMode::GeneralizedFallback => {
                out.push_str("  rotation: generalized fallback (clock-keyed arcsin)\n");
            }
        }
        out.push_str(&format!("  condition number: {:.6}\n", self.condition_number));
        out.push_str(&format!(
            "  gates={}  p1={:.6e}  fidelity={:.9}\n",
            self.gate_count, self.p1, self.fidelity_vs_oracle
        ));
        out.push_str(&format!("  wall={:?}\n", self.wall_time));
        out
    }
}

/// Prebuilt circuit for one regularized system: layout, controlled
/// evolution powers, and rotation plan. Construction is immutable; each
/// run owns its statevector, so independent solves can share a solver
/// across threads.
#[derive(Debug, Clone)]
pub struct HhlSolver {
    sys: RegularizedSystem,
    params: HhlParams,
    layout: RegisterLayout,
    /// U^{2^t} on the padded input register, t = 0..n_c. Shared so a
    /// solver rebound to a new right-hand side costs nothing to clone.
    u_powers: Arc<Vec<CMatrix>>,
    /// U^{−2^t}, same indexing.
    u_inverse_powers: Arc<Vec<CMatrix>>,
}

impl HhlSolver {
    /// Builds the circuit for a system and calibrated parameters.
    pub fn new(sys: RegularizedSystem, params: HhlParams) -> Result<Self, HhlError> {
        let p = sys.dimension();
        if (1usize << params.n_i) < p {
            return Err(HhlError::Construction(format!(
                "{}-qubit input register cannot hold a dimension-{p} system",
                params.n_i
            )));
        }
        if params.mode == RotationMode::LcmExact {
            if params.scaled_eigenvalues.len() != p {
                return Err(HhlError::Construction(format!(
                    "{} scaled eigenvalues for a dimension-{p} system",
                    params.scaled_eigenvalues.len()
                )));
            }
            // The params must actually describe this system's spectrum.
            let scale = params.scale();
            for (l, &v) in sys.eigenvalues().iter().zip(&params.scaled_eigenvalues) {
                if (scale * l - v as f64).abs() > 1e-5 {
                    return Err(HhlError::Construction(format!(
                        "scaled eigenvalue {v} does not match spectrum entry {l} at scale {scale}"
                    )));
                }
            }
        }
        let layout = RegisterLayout::new(params.n_a, params.n_c, params.n_i)?;
        let mut u_powers = Vec::with_capacity(params.n_c);
        let mut u_inverse_powers = Vec::with_capacity(params.n_c);
        for t in 0..params.n_c {
            let fwd = evolution_power(&sys, &params, t, false);
            let bwd = evolution_power(&sys, &params, t, true);
            for m in [&fwd, &bwd] {
                let dev = unitarity_deviation(m);
                if dev > 1e-10 {
                    return Err(HhlError::Construction(format!(
                        "evolution power drifted from unitarity by {dev:.3e}"
                    )));
                }
            }
            u_powers.push(fwd);
            u_inverse_powers.push(bwd);
        }
        Ok(HhlSolver {
            sys,
            params,
            layout,
            u_powers: Arc::new(u_powers),
            u_inverse_powers: Arc::new(u_inverse_powers),
        })
    }

    /// The same circuit driven by a different right-hand side. The
    /// evolution powers depend only on the system core, so no rebuild or
    /// revalidation happens.
    pub fn with_rhs(&self, gamma: CVector) -> Result<Self, HhlError> {
        Ok(HhlSolver {
            sys: self.sys.with_rhs(gamma)?,
            params: self.params.clone(),
            layout: self.layout,
            u_powers: Arc::clone(&self.u_powers),
            u_inverse_powers: Arc::clone(&self.u_inverse_powers),
        })
    }

    /// Calibrates the system's spectrum and builds the circuit.
    pub fn calibrated(
        sys: RegularizedSystem,
        qubit_budget: usize,
        n_sa_multiplier: Option<u64>,
    ) -> Result<Self, HhlError> {
        let n_i = input_register_width(sys.dimension());
        let params = calibrate_spectrum(
            sys.eigenvalues(),
            n_i,
            qubit_budget,
            n_sa_multiplier.unwrap_or(DEFAULT_N_SA_MULTIPLIER),
        )?;
        Self::new(sys, params)
    }

    pub fn params(&self) -> &HhlParams {
        &self.params
    }

    pub fn layout(&self) -> RegisterLayout {
        self.layout
    }

    pub fn system(&self) -> &RegularizedSystem {
        &self.sys
    }

    /// The normalized right-hand side ŷ = γ/‖γ‖₂.
    pub fn normalized_rhs(&self) -> Result<CVector, HhlError> {
        let norm = self.sys.rhs().norm();
        if norm == 0.0 {
            return Err(HhlError::ZeroRhs);
        }
        Ok(self.sys.rhs() / Complex64::new(norm, 0.0))
    }

    /// Initial state: ŷ on the input register, everything else |0⟩.
    pub fn prepare(&self) -> Result<Statevector, HhlError> {
        Ok(Statevector::prepare_input_state(&self.normalized_rhs()?, self.layout)?)
    }

    /// Phase estimation: clock superposition, controlled evolution powers,
    /// inverse Fourier transform. On eigenvector input u_j the clock ends
    /// exactly at |λ̃_j⟩ (exact mode).
    pub fn run_phase_estimation(&self, state: &mut Statevector) -> Result<(), HhlError> {
        state.hadamard_all(Register::C)?;
        for t in 0..self.params.n_c {
            let control = Control::positive(self.layout.qubit(Register::C, t));
            state.apply_register_unitary_prevalidated(Register::I, &self.u_powers[t], &[control])?;
        }
        state.inverse_qft(Register::C)?;
        Ok(())
    }

    /// Writes each branch's divisor l_j = N_a/λ̃_j into register A, keyed
    /// on the clock pattern. Self-inverse.
    fn apply_divisor_load(&self, state: &mut Statevector) -> Result<(), HhlError> {
        let mut distinct = self.params.scaled_eigenvalues.clone();
        distinct.sort_unstable();
        distinct.dedup();
        for v in distinct {
            let l = self.params.lcm / v;
            let pattern = clock_pattern(&self.layout, self.params.n_c, v);
            for t in 0..self.params.n_a {
                if l & (1 << t) != 0 {
                    state.x(self.layout.qubit(Register::A, t), &pattern)?;
                }
            }
        }
        Ok(())
    }

    /// The interference identity on register B: an H sandwich around
    /// phase couplings −2π·2^{t+r}/N_a between every A bit t and clock
    /// bit r. On the reachable subspace A·C = l_j·λ̃_j = N_a, the phases
    /// total −2π, so B returns to |0⟩; any other A value would leave B
    /// with |1⟩ amplitude.
    fn apply_interference_check(&self, state: &mut Statevector) -> Result<(), HhlError> {
        let b = self.layout.qubit(Register::B, 0);
        state.h(b, &[])?;
        for t in 0..self.params.n_a {
            for r in 0..self.params.n_c {
                let angle = -std::f64::consts::TAU * 2f64.powi((t + r) as i32)
                    / self.params.lcm as f64;
                let controls = [
                    Control::positive(self.layout.qubit(Register::A, t)),
                    Control::positive(self.layout.qubit(Register::C, r)),
                ];
                state.phase(angle, b, &controls)?;
            }
        }
        state.h(b, &[])?;
        Ok(())
    }

    /// Controlled rotation of the ancilla S.
    ///
    /// Exact mode: divisor load into A, the B interference identity, then
    /// per-A-bit rotations composing to Ry(2·l_j/N_sa), leaving branch
    /// amplitude sin(l_j/N_sa) on S = |1⟩. Fallback mode: clock-keyed
    /// Ry(2·arcsin(1/m)) for every clock value m ≥ 1.
    pub fn run_controlled_rotation(&self, state: &mut Statevector) -> Result<(), HhlError> {
        match self.params.mode {
            RotationMode::LcmExact => {
                self.apply_divisor_load(state)?;
                self.apply_interference_check(state)?;
                let s = self.layout.qubit(Register::S, 0);
                for t in 0..self.params.n_a {
                    let angle = 2.0 * 2f64.powi(t as i32) / self.params.n_sa as f64;
                    let control = Control::positive(self.layout.qubit(Register::A, t));
                    state.ry(angle, s, &[control])?;
                }
            }
            RotationMode::GeneralizedFallback => {
                let s = self.layout.qubit(Register::S, 0);
                for m in 1..(1usize << self.params.n_c) {
                    let angle = 2.0 * (1.0 / m as f64).asin();
                    let pattern = clock_pattern(&self.layout, self.params.n_c, m as u64);
                    state.ry(angle, s, &pattern)?;
                }
            }
        }
        Ok(())
    }

    /// Restores A, B, and C to |0⟩: clears the divisor register (keyed on
    /// the still-loaded clock), then inverts phase estimation.
    pub fn run_uncomputation(&self, state: &mut Statevector) -> Result<(), HhlError> {
        if self.params.mode == RotationMode::LcmExact {
            self.apply_divisor_load(state)?;
        }
        state.qft(Register::C)?;
        for t in (0..self.params.n_c).rev() {
            let control = Control::positive(self.layout.qubit(Register::C, t));
            state.apply_register_unitary_prevalidated(
                Register::I,
                &self.u_inverse_powers[t],
                &[control],
            )?;
        }
        state.hadamard_all(Register::C)?;
        Ok(())
    }

    /// Analytic success probability Σ_j |β̂_j|² sin²(l_j/N_sa) from the
    /// eigenbasis coordinates β̂ of ŷ (exact mode only).
    pub fn analytic_p1(&self) -> Result<f64, HhlError> {
        if self.params.mode != RotationMode::LcmExact {
            return Err(HhlError::Construction(
                "analytic probability requires the exact rotation mode".into(),
            ));
        }
        let norm = self.sys.rhs().norm();
        if norm == 0.0 {
            return Err(HhlError::ZeroRhs);
        }
        let beta = self.sys.rhs_eigen_coords() / Complex64::new(norm, 0.0);
        Ok(self
            .params
            .divisors()
            .iter()
            .zip(beta.iter())
            .map(|(&l, b)| b.norm_sqr() * (l as f64 / self.params.n_sa as f64).sin().powi(2))
            .sum())
    }

    /// Runs the full circuit, post-selects S = |1⟩, and rescales the
    /// input-register readout to the solution of Ξσ̃ = γ.
    pub fn solve(&self) -> Result<HhlOutcome, HhlError> {
        let start = Instant::now();
        let gamma_norm = self.sys.rhs().norm();
        let mut state = self.prepare()?;
        self.run_phase_estimation(&mut state)?;
        self.run_controlled_rotation(&mut state)?;
        self.run_uncomputation(&mut state)?;

        let ancilla_zeros_probability = state.zeros_probability_outside(&[Register::S, Register::I]);
        let s = self.layout.qubit(Register::S, 0);
        let p1 = state.probability_of(s, true);
        if p1 < P1_FLOOR {
            return Err(HhlError::DegenerateSystem { p1 });
        }
        state.postselect(s, true)?;

        // Raw slice: the global phase carries the right-hand side's phase
        // into the solution, so no phase normalization here.
        let slice = state.register_slice(Register::I, &[(Register::S, 1)])?;
        let slice_norm = slice.norm();
        if slice_norm == 0.0 {
            return Err(HhlError::DegenerateSystem { p1: 0.0 });
        }
        let direction = slice / Complex64::new(slice_norm, 0.0);

        let rescale = match self.params.mode {
            RotationMode::LcmExact => {
                gamma_norm
                    * self.params.scale()
                    * p1.sqrt()
                    * (self.params.n_sa as f64 / self.params.lcm as f64)
            }
            // Clock-keyed rotation with unit numerator: amplitudes 1/m.
            RotationMode::GeneralizedFallback => gamma_norm * self.params.scale() * p1.sqrt(),
        };
        let mut solution = CVector::zeros(self.sys.dimension());
        for i in 0..self.sys.dimension() {
            solution[i] = rescale * direction[i];
        }

        let oracle = direct_solve(&self.sys)?;
        let truncated = CVector::from_fn(self.sys.dimension(), |i, _| direction[i]);
        let fidelity_vs_oracle = fidelity(&truncated, &oracle)?;

        Ok(HhlOutcome {
            solution,
            p1,
            fidelity_vs_oracle,
            gate_count: state.gate_count(),
            qubit_count: self.layout.total_qubits(),
            ancilla_zeros_probability,
            condition_number: self.sys.condition_number(),
            wall_time: start.elapsed(),
            params: self.params.clone(),
        })
    }
}

/// Input register width for a dimension-p system.
pub fn input_register_width(p: usize) -> usize {
    let mut n = 0usize;
    while (1usize << n) < p {
        n += 1;
    }
    n.max(1)
}

/// Clock-pattern controls selecting the basis value v on register C.
fn clock_pattern(layout: &RegisterLayout, n_c: usize, v: u64) -> Vec<Control> {
    (0..n_c)
        .map(|r| {
            let bit = layout.qubit(Register::C, r);
            if v & (1 << r) != 0 {
                Control::positive(bit)
            } else {
                Control::negative(bit)
            }
        })
        .collect()
}

/// U^{±2^t} for U = exp(i·2π·Ξ̃/2^{n_c}), assembled in the eigenbasis and
/// padded with the identity to the full input-register dimension.
///
/// Exact mode reduces λ̃_j·2^t modulo 2^{n_c} in integer arithmetic so
/// repeated squaring error cannot creep in.
fn evolution_power(sys: &RegularizedSystem, params: &HhlParams, t: usize, inverse: bool) -> CMatrix {
    let p = sys.dimension();
    let dim = 1usize << params.n_i;
    let modulus = 1u64 << params.n_c;
    let sign = if inverse { -1.0 } else { 1.0 };
    let phases: Vec<Complex64> = if params.mode == RotationMode::LcmExact {
        params
            .scaled_eigenvalues
            .iter()
            .map(|&v| {
                let k = ((v as u128) << t) % modulus as u128;
                Complex64::cis(sign * std::f64::consts::TAU * k as f64 / modulus as f64)
            })
            .collect()
    } else {
        let scale = params.scale();
        sys.eigenvalues()
            .iter()
            .map(|l| {
                let turns = scale * l * 2f64.powi(t as i32) / modulus as f64;
                Complex64::cis(sign * std::f64::consts::TAU * turns.fract())
            })
            .collect()
    };
    let v = sys.eigenvectors();
    let mut scaled_v = v.clone();
    for (j, phase) in phases.iter().enumerate() {
        for i in 0..p {
            scaled_v[(i, j)] = v[(i, j)] * phase;
        }
    }
    let block = &scaled_v * v.adjoint();
    let mut full = CMatrix::identity(dim, dim);
    full.view_mut((0, 0), (p, p)).copy_from(&block);
    full
}
