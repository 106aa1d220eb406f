//! Noise channels: one- and two-qudit Pauli decoherence for d = 2, 3 and
//! amplitude damping for d = 2, 3.
//!
//! Pauli channels are kept in mixed-unitary form (probability-weighted
//! conjugations, numerically exact); damping channels in Kraus form. Channel
//! construction is deterministic and channels carry no randomness: the
//! density-matrix evolution is exact, nothing is sampled.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SimError};
use crate::linalg::CMat;

/// Noise strengths for one run: entangling-gate Pauli probability, gate-time
/// to T₁ ratio, physical single-qudit gate duration as a fraction of the
/// entangling-gate time, and whether idle qudits damp during other blocks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    /// Pauli error probability per entangling gate.
    pub p2: f64,
    /// Entangling-gate duration over T₁.
    pub tg_over_t1: f64,
    /// Physical 1-qudit gate duration as a fraction of the entangling-gate
    /// time. Frame-change (Rz-type) rotations are virtual and contribute
    /// nothing regardless of this value.
    pub r1q: f64,
    /// Damp every register qudit for each block's duration, not just the
    /// qudits the block touches.
    pub idle_damping: bool,
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self { p2: 0.0, tg_over_t1: 0.0, r1q: 0.1, idle_damping: false }
    }
}

impl NoiseModel {
    pub fn noiseless() -> Self {
        Self::default()
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p2) {
            return Err(SimError::InvalidParameter(format!("p2 = {} outside [0, 1]", self.p2)));
        }
        if self.tg_over_t1 < 0.0 || !self.tg_over_t1.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "tg_over_t1 = {} must be finite and ≥ 0",
                self.tg_over_t1
            )));
        }
        if self.r1q < 0.0 || !self.r1q.is_finite() {
            return Err(SimError::InvalidParameter(format!(
                "r1q = {} must be finite and ≥ 0",
                self.r1q
            )));
        }
        Ok(())
    }
}

/// Channel in Kraus form: ρ → Σᵢ Kᵢ ρ Kᵢ†.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    dim: usize,
    kraus_ops: Vec<CMat>,
}

impl KrausChannel {
    /// Validates completeness Σ Kᵢ†Kᵢ = I within 1e-10.
    pub fn new(kraus_ops: Vec<CMat>) -> Result<Self> {
        let dim = match kraus_ops.first() {
            Some(k) if k.is_square() => k.rows(),
            _ => return Err(SimError::InvalidParameter("empty or non-square Kraus list".into())),
        };
        let mut sum = CMat::zeros(dim, dim);
        for k in &kraus_ops {
            if k.rows() != dim || k.cols() != dim {
                return Err(SimError::DimensionMismatch("Kraus operators differ in size".into()));
            }
            sum = &sum + &k.adjoint().matmul(k);
        }
        let dev = (&sum - &CMat::identity(dim)).max_abs();
        if dev > 1e-10 {
            return Err(SimError::IncompleteChannel { dev });
        }
        Ok(Self { dim, kraus_ops })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kraus_ops(&self) -> &[CMat] {
        &self.kraus_ops
    }
}

/// Channel as a probability-weighted mixture of unitaries.
#[derive(Debug, Clone)]
pub struct MixedUnitaryChannel {
    dim: usize,
    terms: Vec<(f64, CMat)>,
    /// Set when the non-identity part is a uniform twirl over a complete
    /// unitary operator basis of the target space, in which case applying
    /// the channel reduces to depolarising with this weight.
    uniform_twirl: Option<f64>,
}

impl MixedUnitaryChannel {
    /// Validates probabilities (≥ 0, sum 1 within 1e-12) and term unitarity
    /// (within 1e-10).
    pub fn new(terms: Vec<(f64, CMat)>) -> Result<Self> {
        let dim = match terms.first() {
            Some((_, u)) if u.is_square() => u.rows(),
            _ => return Err(SimError::InvalidParameter("empty or non-square term list".into())),
        };
        let mut total = 0.0;
        for (p, u) in &terms {
            if *p < 0.0 {
                return Err(SimError::InvalidParameter(format!("negative probability {p}")));
            }
            if u.rows() != dim || u.cols() != dim {
                return Err(SimError::DimensionMismatch("mixture terms differ in size".into()));
            }
            let dev = u.unitarity_deviation();
            if dev > 1e-10 {
                return Err(SimError::NotUnitary { dev });
            }
            total += *p;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(SimError::InvalidParameter(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Self { dim, terms, uniform_twirl: None })
    }

    fn with_uniform_twirl(mut self, p: f64) -> Self {
        self.uniform_twirl = Some(p);
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[(f64, CMat)] {
        &self.terms
    }

    /// Total twirl weight when the channel is a uniform complete-basis twirl.
    pub fn uniform_twirl_weight(&self) -> Option<f64> {
        self.uniform_twirl
    }
}

/// Either channel representation, as scheduled by the encodings.
#[derive(Debug, Clone)]
pub enum NoiseChannel {
    Kraus(KrausChannel),
    MixedUnitary(MixedUnitaryChannel),
}

impl NoiseChannel {
    pub fn dim(&self) -> usize {
        match self {
            NoiseChannel::Kraus(k) => k.dim(),
            NoiseChannel::MixedUnitary(m) => m.dim(),
        }
    }
}

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// The qubit Pauli group {I, X, Y, Z}.
pub fn pauli_matrices() -> [CMat; 4] {
    let i = CMat::identity(2);
    let x = CMat::from_fn(2, 2, |r, cc| if r != cc { c(1.0, 0.0) } else { c(0.0, 0.0) });
    let y = CMat::from_fn(2, 2, |r, cc| match (r, cc) {
        (0, 1) => c(0.0, -1.0),
        (1, 0) => c(0.0, 1.0),
        _ => c(0.0, 0.0),
    });
    let z = CMat::diag(&[c(1.0, 0.0), c(-1.0, 0.0)]);
    [i, x, y, z]
}

/// Qutrit shift operator: |0⟩→|2⟩→|1⟩→|0⟩.
pub fn weyl_shift() -> CMat {
    CMat::from_real_rows(&[&[0.0, 1.0, 0.0], &[0.0, 0.0, 1.0], &[1.0, 0.0, 0.0]])
}

/// Qutrit clock operator diag(1, e^{2πi/3}, e^{4πi/3}).
pub fn weyl_clock() -> CMat {
    let w = c(0.0, 2.0 * std::f64::consts::PI / 3.0).exp();
    CMat::diag(&[c(1.0, 0.0), w, w * w])
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(SimError::InvalidParameter(format!("probability {p} outside [0, 1]")));
    }
    Ok(())
}

fn check_arity(arity: usize) -> Result<()> {
    if arity != 1 && arity != 2 {
        return Err(SimError::InvalidParameter(format!("channel arity {arity} not in {{1, 2}}")));
    }
    Ok(())
}

/// Pauli decoherence channel on one or two qubits:
/// (1−p)ρ + (p/4ᵃ) Σ over the a-qubit Pauli group, identity terms included.
pub fn pauli_channel_qubit(p: f64, arity: usize) -> Result<NoiseChannel> {
    check_probability(p)?;
    check_arity(arity)?;
    let paulis = pauli_matrices();
    let mut terms = vec![(1.0 - p, CMat::identity(1 << arity))];
    if arity == 1 {
        for s in &paulis {
            terms.push((p / 4.0, s.clone()));
        }
    } else {
        for s1 in &paulis {
            for s2 in &paulis {
                terms.push((p / 16.0, s1.kron(s2)?));
            }
        }
    }
    Ok(NoiseChannel::MixedUnitary(MixedUnitaryChannel::new(terms)?.with_uniform_twirl(p)))
}

/// Generalised Pauli (Weyl) decoherence channel on one or two qutrits:
/// (1−p)ρ + (p/9ᵃ) Σ 𝒳ⁱ𝐙ʲ ρ (𝐙ʲ𝒳ⁱ)†, identity terms included.
pub fn pauli_channel_qutrit(p: f64, arity: usize) -> Result<NoiseChannel> {
    check_probability(p)?;
    check_arity(arity)?;
    let x = weyl_shift();
    let z = weyl_clock();
    let mut powers_x = vec![CMat::identity(3)];
    let mut powers_z = vec![CMat::identity(3)];
    for k in 1..3 {
        powers_x.push(powers_x[k - 1].matmul(&x));
        powers_z.push(powers_z[k - 1].matmul(&z));
    }
    let single: Vec<CMat> = (0..3)
        .flat_map(|i| (0..3).map(move |j| (i, j)))
        .map(|(i, j)| powers_x[i].matmul(&powers_z[j]))
        .collect();

    let dim = 3usize.pow(arity as u32);
    let mut terms = vec![(1.0 - p, CMat::identity(dim))];
    if arity == 1 {
        for w in &single {
            terms.push((p / 9.0, w.clone()));
        }
    } else {
        for w1 in &single {
            for w2 in &single {
                terms.push((p / 81.0, w1.kron(w2)?));
            }
        }
    }
    Ok(NoiseChannel::MixedUnitary(MixedUnitaryChannel::new(terms)?.with_uniform_twirl(p)))
}

/// Qubit amplitude damping for dimensionless duration t/T₁.
pub fn damping_channel_qubit(t_over_t1: f64) -> Result<NoiseChannel> {
    if t_over_t1 < 0.0 || t_over_t1.is_nan() {
        return Err(SimError::InvalidParameter(format!("negative damping time {t_over_t1}")));
    }
    let decay = (-t_over_t1).exp();
    let k0 = CMat::diag(&[c(1.0, 0.0), c(decay.sqrt(), 0.0)]);
    let mut k1 = CMat::zeros(2, 2);
    k1.set(0, 1, c((1.0 - decay).sqrt(), 0.0));
    Ok(NoiseChannel::Kraus(KrausChannel::new(vec![k0, k1])?))
}

/// Qutrit amplitude damping: |1⟩ decays to |0⟩ at rate 1/T₁ and |2⟩ decays
/// directly to |0⟩ at twice that rate.
pub fn damping_channel_qutrit(t_over_t1: f64) -> Result<NoiseChannel> {
    if t_over_t1 < 0.0 || t_over_t1.is_nan() {
        return Err(SimError::InvalidParameter(format!("negative damping time {t_over_t1}")));
    }
    let d1 = (-t_over_t1).exp();
    let d2 = (-2.0 * t_over_t1).exp();
    let k0 = CMat::diag(&[c(1.0, 0.0), c(d1.sqrt(), 0.0), c(d2.sqrt(), 0.0)]);
    let mut k1 = CMat::zeros(3, 3);
    k1.set(0, 1, c((1.0 - d1).sqrt(), 0.0));
    let mut k2 = CMat::zeros(3, 3);
    k2.set(0, 2, c((1.0 - d2).sqrt(), 0.0));
    Ok(NoiseChannel::Kraus(KrausChannel::new(vec![k0, k1, k2])?))
}
