//! Qubit and qutrit realisations of the rotor circuits.
//!
//! Gate-level layouts of the hardest sub-circuits exist only as figures in
//! the source material, so every block here carries a contract-exact unitary
//! while noise is inserted from the per-block gate counts (the cost table).
//! One consequence is tested rather than assumed: the transcribed coupling
//! circuit does not reproduce the exact two-rotor rotation (see
//! [`uzz_transcription_check`]), so exact blocks stay canonical everywhere.
//!
//! Qubit mapping: |0⟩₃ = |00⟩₂, |1⟩₃ = |01⟩₂, |2⟩₃ = |10⟩₂; |11⟩₂ is
//! unphysical and every block acts as the identity on it.

use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};

use crate::channels::{
    damping_channel_qubit, damping_channel_qutrit, pauli_channel_qubit, pauli_channel_qutrit,
    NoiseChannel, NoiseModel,
};
use crate::density::DensityMatrix;
use crate::error::{Result, SimError};
use crate::linalg::{inner, vec_norm, CMat};
use crate::model::{gamma_state, rotor_ops, ModelParams};
use crate::register::RegisterShape;

fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Which hardware register realises each three-state rotor.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingKind {
    Qubit,
    Qutrit,
}

impl std::fmt::Display for EncodingKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            EncodingKind::Qubit => write!(f, "qubit"),
            EncodingKind::Qutrit => write!(f, "qutrit"),
        }
    }
}

/// Register layout for one encoding of an `n_sites`-rotor chain plus ancilla.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Encoding {
    pub kind: EncodingKind,
    pub n_sites: usize,
}

impl Encoding {
    pub fn new(kind: EncodingKind, n_sites: usize) -> Self {
        Self { kind, n_sites }
    }

    pub fn qudits_per_rotor(&self) -> usize {
        match self.kind {
            EncodingKind::Qubit => 2,
            EncodingKind::Qutrit => 1,
        }
    }

    pub fn local_dim(&self) -> usize {
        match self.kind {
            EncodingKind::Qubit => 2,
            EncodingKind::Qutrit => 3,
        }
    }

    /// Register: rotors in site order, one ancilla qudit last.
    pub fn register_shape(&self) -> Result<RegisterShape> {
        let n = self.n_sites * self.qudits_per_rotor() + 1;
        RegisterShape::uniform(self.local_dim(), n)
    }

    /// Physical qudit indices of one rotor.
    pub fn rotor_sites(&self, rotor: usize) -> Vec<usize> {
        match self.kind {
            EncodingKind::Qubit => vec![2 * rotor, 2 * rotor + 1],
            EncodingKind::Qutrit => vec![rotor],
        }
    }

    pub fn ancilla_site(&self) -> usize {
        self.n_sites * self.qudits_per_rotor()
    }

    /// Dimension of one encoded rotor (3 for qutrits, 4 for qubit pairs).
    pub fn rotor_dim(&self) -> usize {
        match self.kind {
            EncodingKind::Qubit => 4,
            EncodingKind::Qutrit => 3,
        }
    }
}

/// How unphysical basis states are filled when widening a rotor operator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnphysicalFill {
    /// 1 on the diagonal: unitaries must leave |11⟩ sectors untouched.
    Identity,
    /// 0 everywhere: Hermitian generators vanish outside the image.
    Zero,
}

/// Widen a k-rotor operator (3ᵏ-dimensional) to the encoded register
/// (4ᵏ-dimensional for qubits; unchanged for qutrits).
pub fn encode_operator(op: &CMat, enc: &Encoding, fill: UnphysicalFill) -> Result<CMat> {
    if !op.is_square() {
        return Err(SimError::DimensionMismatch("rotor operator must be square".into()));
    }
    let mut k = 0usize;
    let mut dim = 1usize;
    while dim < op.rows() {
        dim *= 3;
        k += 1;
    }
    if dim != op.rows() {
        return Err(SimError::DimensionMismatch(format!(
            "rotor operator dimension {} is not a power of 3",
            op.rows()
        )));
    }
    if enc.kind == EncodingKind::Qutrit {
        return Ok(op.clone());
    }
    let wide = 4usize.pow(k as u32);
    // Encoded rotor value equals the qutrit level (|00⟩,|01⟩,|10⟩ ↔ 0,1,2);
    // value 3 is the unphysical |11⟩.
    let decode = |mut v: usize| -> Option<usize> {
        let mut digits = vec![0usize; k];
        for d in (0..k).rev() {
            digits[d] = v % 4;
            v /= 4;
            if digits[d] == 3 {
                return None;
            }
        }
        Some(digits.iter().fold(0, |acc, &d| acc * 3 + d))
    };
    // Mixed physical/unphysical entries stay zero: every block is
    // block-diagonal across the leakage boundary.
    let mut out = CMat::zeros(wide, wide);
    for a in 0..wide {
        match decode(a) {
            Some(pa) => {
                for b in 0..wide {
                    if let Some(pb) = decode(b) {
                        out.set(a, b, op.get(pa, pb));
                    }
                }
            }
            None => {
                if fill == UnphysicalFill::Identity {
                    out.set(a, a, c(1.0, 0.0));
                }
            }
        }
    }
    Ok(out)
}

/// Two-qutrit CSUM: |i⟩|j⟩ → |i⟩|(i+j) mod 3⟩.
pub fn csum() -> CMat {
    let mut m = CMat::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            m.set(i * 3 + (i + j) % 3, i * 3 + j, c(1.0, 0.0));
        }
    }
    m
}

/// Circuit-block labels; one per scheduled sub-circuit.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockLabel {
    Vg,
    Cug,
    AncillaPrep,
    UV,
    UX,
    UZz,
    MeasureAssist,
}

impl std::fmt::Display for BlockLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            BlockLabel::Vg => "V_g",
            BlockLabel::Cug => "CU_g",
            BlockLabel::AncillaPrep => "ancilla_prep",
            BlockLabel::UV => "exp(-iθ(Lz)²)",
            BlockLabel::UX => "exp(-iθUx)",
            BlockLabel::UZz => "exp(-iθLzLz)",
            BlockLabel::MeasureAssist => "measure_assist",
        };
        write!(f, "{name}")
    }
}

/// Gate-count table: 1-qudit and 2-qudit gates per block and encoding, plus
/// how many of the 1-qudit gates are physical (Rx/Ry-type) rather than
/// virtual frame changes.
#[derive(Debug, Clone, Copy)]
pub struct CostTable;

impl CostTable {
    /// (1-qudit, 2-qudit) gate counts.
    pub fn costs(label: BlockLabel, kind: EncodingKind) -> (usize, usize) {
        use BlockLabel::*;
        use EncodingKind::*;
        match (label, kind) {
            (Vg, Qubit) => (3, 2),
            (Vg, Qutrit) => (2, 0),
            (Cug, Qubit) => (54, 54),
            (Cug, Qutrit) => (5, 2),
            (UV, Qubit) => (1, 0),
            (UV, Qutrit) => (2, 0),
            (UX, Qubit) => (6, 2),
            (UX, Qutrit) => (5, 0),
            (UZz, Qubit) => (4, 26),
            (UZz, Qutrit) => (4, 3),
            (AncillaPrep, _) => (1, 0),
            (MeasureAssist, _) => (0, 0),
        }
    }

    /// 1-qudit gates that take real time (and damp). The diagonal blocks are
    /// pure frame changes; state preparation and the kinetic rotation are
    /// physical rotations; the ancilla superposition needs one rotation.
    pub fn physical_1q(label: BlockLabel, kind: EncodingKind) -> usize {
        use BlockLabel::*;
        match label {
            UV | UZz | MeasureAssist => 0,
            Vg | Cug | UX | AncillaPrep => Self::costs(label, kind).0,
        }
    }

    /// Serialized block duration in entangling-gate units.
    pub fn duration(label: BlockLabel, kind: EncodingKind, r1q: f64) -> f64 {
        let (_, two_q) = Self::costs(label, kind);
        two_q as f64 + r1q * Self::physical_1q(label, kind) as f64
    }
}

/// A named sub-circuit: exact unitary on its sites plus the gate counts that
/// drive noise insertion.
#[derive(Debug, Clone)]
pub struct CircuitBlock {
    pub label: BlockLabel,
    /// Register qudit indices, in the tensor order of `unitary`.
    pub sites: Vec<usize>,
    pub unitary: CMat,
    pub cost_1q: usize,
    pub cost_2q: usize,
    /// Serialized duration in units of the entangling-gate time.
    pub duration: f64,
}

impl CircuitBlock {
    fn new(label: BlockLabel, sites: Vec<usize>, unitary: CMat, enc: &Encoding, r1q: f64) -> Self {
        let (cost_1q, cost_2q) = CostTable::costs(label, enc.kind);
        let duration = CostTable::duration(label, enc.kind, r1q);
        debug_assert!(unitary.unitarity_deviation() < 1e-10);
        Self { label, sites, unitary, cost_1q, cost_2q, duration }
    }

    /// Fused diagonal carries per-site counts summed over rotors.
    fn new_fused(
        label: BlockLabel,
        sites: Vec<usize>,
        unitary: CMat,
        enc: &Encoding,
        copies: usize,
        r1q: f64,
    ) -> Self {
        let mut block = Self::new(label, sites, unitary, enc, r1q);
        block.cost_1q *= copies;
        block.cost_2q *= copies;
        block.duration *= copies as f64;
        block
    }
}

/// Deterministic unitary completion: the given leading columns, then
/// standard basis vectors Gram-Schmidt-orthogonalised in index order.
fn complete_unitary(leading: &[Vec<C64>], dim: usize) -> CMat {
    let mut cols: Vec<Vec<C64>> = leading.to_vec();
    let mut e = 0usize;
    while cols.len() < dim {
        assert!(e < dim, "completion ran out of basis vectors");
        let mut v = vec![c(0.0, 0.0); dim];
        v[e] = c(1.0, 0.0);
        e += 1;
        for col in &cols {
            let ov = inner(col, &v);
            for (vi, ci) in v.iter_mut().zip(col) {
                *vi -= ov * ci;
            }
        }
        let norm = vec_norm(&v);
        if norm > 1e-8 {
            for vi in &mut v {
                *vi /= norm;
            }
            cols.push(v);
        }
    }
    CMat::from_fn(dim, dim, |i, j| cols[j][i])
}

/// State-preparation rotation taking |0⟩ to |Γ⟩ on one rotor.
pub fn vg_block(g2: f64, enc: &Encoding, rotor: usize, r1q: f64) -> Result<CircuitBlock> {
    let gamma = gamma_state(g2)?;
    let v3 = complete_unitary(&[gamma.amplitudes.to_vec()], 3);
    let unitary = encode_operator(&v3, enc, UnphysicalFill::Identity)?;
    Ok(CircuitBlock::new(BlockLabel::Vg, enc.rotor_sites(rotor), unitary, enc, r1q))
}

/// Ancilla superposition |0⟩ → (|0⟩ + |1⟩)/√2: one physical rotation.
pub fn ancilla_prep_block(enc: &Encoding, r1q: f64) -> CircuitBlock {
    let d = enc.local_dim();
    let mut u = CMat::identity(d);
    let s = std::f64::consts::FRAC_1_SQRT_2;
    u.set(0, 0, c(s, 0.0));
    u.set(0, 1, c(-s, 0.0));
    u.set(1, 0, c(s, 0.0));
    u.set(1, 1, c(s, 0.0));
    CircuitBlock::new(BlockLabel::AncillaPrep, vec![enc.ancilla_site()], u, enc, r1q)
}

/// Controlled source excitation on (ancilla, rotor 0):
/// |0⟩⟨0|ₐ ⊗ V_g + |1⟩⟨1|ₐ ⊗ W with W|0⟩ = U⁺|Γ⟩/𝒩′, identity on the
/// remaining ancilla level.
pub fn cug_block(g2: f64, enc: &Encoding, r1q: f64) -> Result<CircuitBlock> {
    let gamma = gamma_state(g2)?;
    let ops = rotor_ops(3)?;
    let v3 = complete_unitary(&[gamma.amplitudes.to_vec()], 3);
    let mut excited = ops.u_plus.matvec(&gamma.amplitudes);
    let np = vec_norm(&excited);
    for a in &mut excited {
        *a /= np;
    }
    let w3 = complete_unitary(&[excited], 3);

    let rd = enc.rotor_dim();
    let ad = enc.local_dim();
    let v_enc = encode_operator(&v3, enc, UnphysicalFill::Identity)?;
    let w_enc = encode_operator(&w3, enc, UnphysicalFill::Identity)?;
    let mut u = CMat::zeros(ad * rd, ad * rd);
    for a in 0..ad {
        for i in 0..rd {
            for j in 0..rd {
                let v = match a {
                    0 => v_enc.get(i, j),
                    1 => w_enc.get(i, j),
                    _ => {
                        if i == j {
                            c(1.0, 0.0)
                        } else {
                            c(0.0, 0.0)
                        }
                    }
                };
                u.set(a * rd + i, a * rd + j, v);
            }
        }
    }
    let mut sites = vec![enc.ancilla_site()];
    sites.extend(enc.rotor_sites(0));
    Ok(CircuitBlock::new(BlockLabel::Cug, sites, u, enc, r1q))
}

/// Fused diagonal exp(−i·dt·Σᵢ cᵢ(L^z_i)²) over all rotors.
pub fn u_v_block(params: &ModelParams, dt: f64, enc: &Encoding, r1q: f64) -> Result<CircuitBlock> {
    let coeffs = params.site_quadratic_coeffs();
    let shape = params.model_shape()?;
    let d = shape.total_dim();
    let mut phases = Vec::with_capacity(d);
    for idx in 0..d {
        let digits = shape.digits(idx);
        let e: f64 = digits
            .iter()
            .zip(&coeffs)
            .map(|(&l, cf)| {
                let n = crate::model::charge_of_level(l, params.truncation) as f64;
                cf * n * n
            })
            .sum();
        phases.push(c(0.0, -dt * e).exp());
    }
    let diag3 = CMat::diag(&phases);
    let unitary = encode_operator(&diag3, enc, UnphysicalFill::Identity)?;
    let sites: Vec<usize> = (0..params.n_sites).flat_map(|r| enc.rotor_sites(r)).collect();
    Ok(CircuitBlock::new_fused(BlockLabel::UV, sites, unitary, enc, params.n_sites, r1q))
}

/// Kinetic rotation exp(+2i·dt·U^x) on one rotor.
pub fn u_x_block(dt: f64, enc: &Encoding, rotor: usize, r1q: f64) -> Result<CircuitBlock> {
    let ops = rotor_ops(3)?;
    let local = ops.ux.scale(c(-2.0, 0.0)).expm_hermitian(c(0.0, -dt));
    let unitary = encode_operator(&local, enc, UnphysicalFill::Identity)?;
    Ok(CircuitBlock::new(BlockLabel::UX, enc.rotor_sites(rotor), unitary, enc, r1q))
}

/// Coupling rotation exp(+i·dt·L^z⊗L^z) on one link (the cross term of the
/// expanded neighbour square carries coefficient −1).
pub fn u_zz_block(
    dt: f64,
    enc: &Encoding,
    link: (usize, usize),
    r1q: f64,
) -> Result<CircuitBlock> {
    let mut diag9 = CMat::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            let na = crate::model::charge_of_level(i, 3) as f64;
            let nb = crate::model::charge_of_level(j, 3) as f64;
            diag9.set(i * 3 + j, i * 3 + j, c(0.0, dt * na * nb).exp());
        }
    }
    let unitary = encode_operator(&diag9, enc, UnphysicalFill::Identity)?;
    let mut sites = enc.rotor_sites(link.0);
    sites.extend(enc.rotor_sites(link.1));
    Ok(CircuitBlock::new(BlockLabel::UZz, sites, unitary, enc, r1q))
}

/// One noise insertion: a channel on specific register sites.
#[derive(Debug, Clone)]
pub struct ChannelApplication {
    pub channel: NoiseChannel,
    pub sites: Vec<usize>,
}

/// Noise scheduled after one block: `cost_2q` two-qudit Pauli channels on the
/// block's coupled pair (round-robin over all pairs for wider blocks), then
/// one aggregated damping application per touched qudit for the block's
/// serialized duration. Virtual gates contribute neither noise nor time.
pub fn noise_schedule(
    block: &CircuitBlock,
    noise: &NoiseModel,
    enc: &Encoding,
) -> Result<Vec<ChannelApplication>> {
    noise.validate()?;
    let mut out = Vec::new();

    if noise.p2 > 0.0 && block.cost_2q > 0 && block.sites.len() >= 2 {
        let pauli = match enc.kind {
            EncodingKind::Qubit => pauli_channel_qubit(noise.p2, 2)?,
            EncodingKind::Qutrit => pauli_channel_qutrit(noise.p2, 2)?,
        };
        let mut pairs = Vec::new();
        for i in 0..block.sites.len() {
            for j in (i + 1)..block.sites.len() {
                pairs.push(vec![block.sites[i], block.sites[j]]);
            }
        }
        for g in 0..block.cost_2q {
            out.push(ChannelApplication {
                channel: pauli.clone(),
                sites: pairs[g % pairs.len()].clone(),
            });
        }
    }

    if noise.tg_over_t1 > 0.0 && block.duration > 0.0 {
        let t = block.duration * noise.tg_over_t1;
        let damp = match enc.kind {
            EncodingKind::Qubit => damping_channel_qubit(t)?,
            EncodingKind::Qutrit => damping_channel_qutrit(t)?,
        };
        let damped_sites: Vec<usize> = if noise.idle_damping {
            (0..enc.register_shape()?.n_sites()).collect()
        } else {
            block.sites.clone()
        };
        for site in damped_sites {
            out.push(ChannelApplication { channel: damp.clone(), sites: vec![site] });
        }
    }
    Ok(out)
}

/// Population outside the encoding's image: any rotor in |11⟩₂ for qubits,
/// the ancilla in |2⟩₃ for qutrits.
pub fn leakage(rho: &DensityMatrix, enc: &Encoding) -> f64 {
    let shape = rho.shape();
    let mut leaked = 0.0;
    for idx in 0..rho.dim() {
        let digits = shape.digits(idx);
        let unphysical = match enc.kind {
            EncodingKind::Qubit => (0..enc.n_sites)
                .any(|r| digits[2 * r] == 1 && digits[2 * r + 1] == 1),
            EncodingKind::Qutrit => digits[enc.ancilla_site()] == 2,
        };
        if unphysical {
            leaked += rho.matrix().get(idx, idx).re;
        }
    }
    leaked
}

/// Printed closed forms for the qutrit preparation angles.
pub fn vg_angles_qutrit(g2: f64) -> Result<(f64, f64, f64)> {
    if g2 <= 0.0 || !g2.is_finite() {
        return Err(SimError::InvalidParameter(format!("g2 = {g2} must be > 0")));
    }
    let m = (2.0 + (1.0 + 2.0 * g2 + (129.0 + 4.0 * g2 + 4.0 * g2 * g2).sqrt()) / 8.0).sqrt();
    let rho1 = -(1.0 / m).acos();
    let rho2 = -(1.0 / (m * m - 1.0).sqrt()).acos();
    Ok((rho1, rho2, m))
}

/// Discrepancy report between the printed preparation angles and Γ.
#[derive(Debug, Clone)]
pub struct VgAngleReport {
    pub m: f64,
    pub rho1: f64,
    pub rho2: f64,
    /// State built literally from the two printed rotations.
    pub literal_amplitudes: [C64; 3],
    /// |⟨Γ|state⟩|² with levels mapped to charges as printed.
    pub fidelity_literal: f64,
    /// Same after moving the dominant amplitude to the charge-0 level.
    pub fidelity_mid_dominant: f64,
    /// Dominant-to-edge ratio implied by the angles: √(ℳ² − 2).
    pub implied_ratio: f64,
    pub b: f64,
}

/// Build the two-rotation state the printed angles generate and compare it
/// with Γ. The mismatch is reported, not repaired: the angle formulas and
/// the trial-state amplitude b disagree in the source material.
pub fn vg_angle_check(g2: f64) -> Result<VgAngleReport> {
    let (rho1, rho2, m) = vg_angles_qutrit(g2)?;
    let gamma = gamma_state(g2)?;
    // R1 rotates |0⟩ in the (0,1) subspace, R2 rotates |1⟩ in (1,2).
    let (c1, s1) = (rho1.cos(), rho1.sin());
    let mut state = vec![c(c1, 0.0), c(s1, 0.0), c(0.0, 0.0)];
    let (c2, s2) = (rho2.cos(), rho2.sin());
    let mid = state[1];
    state[1] = mid * c2;
    state[2] = mid * s2;

    let fid = |s: &[C64]| inner(s, &gamma.amplitudes).norm_sqr();
    let fidelity_literal = fid(&state);
    // Permute so the dominant weight sits on the middle (charge-0) level.
    let permuted = [state[0], state[2], state[1]];
    let fidelity_mid_dominant = fid(&permuted);
    Ok(VgAngleReport {
        m,
        rho1,
        rho2,
        literal_amplitudes: [state[0], state[1], state[2]],
        fidelity_literal,
        fidelity_mid_dominant,
        implied_ratio: (m * m - 2.0).sqrt(),
        b: gamma.b,
    })
}

/// Reference rotation angles for the qutrit source-excitation circuit.
pub fn table3_angles() -> [f64; 4] {
    [1.5902, 1.9847, 2.4373, 1.5911]
}

/// Primitive gates for explicit circuit lists.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Gate {
    Cnot { control: usize, target: usize },
    Swap { a: usize, b: usize },
    Rz { site: usize, angle: f64 },
    Ry { site: usize, angle: f64 },
    Rx { site: usize, angle: f64 },
    Csum { control: usize, target: usize },
    /// Ry-type rotation in the (i, j) level pair of one qudit.
    RotSubspace { site: usize, i: usize, j: usize, angle: f64 },
}

pub type GateList = Vec<Gate>;

/// The transcribed four-qubit realisation of exp(−iθ L^z⊗L^z): 8 CNOTs,
/// 6 swaps and 4 Rz(θ/2) rotations in printed order.
pub fn uzz_qubit_gatelist(theta: f64) -> GateList {
    let h = theta / 2.0;
    vec![
        Gate::Swap { a: 2, b: 3 },
        Gate::Cnot { control: 1, target: 2 },
        Gate::Swap { a: 0, b: 1 },
        Gate::Rz { site: 2, angle: h },
        Gate::Cnot { control: 2, target: 3 },
        Gate::Rz { site: 3, angle: h },
        Gate::Swap { a: 2, b: 3 },
        Gate::Cnot { control: 2, target: 1 },
        Gate::Rz { site: 1, angle: h },
        Gate::Cnot { control: 2, target: 1 },
        Gate::Cnot { control: 3, target: 2 },
        Gate::Swap { a: 2, b: 3 },
        Gate::Cnot { control: 2, target: 1 },
        Gate::Rz { site: 1, angle: h },
        Gate::Cnot { control: 2, target: 1 },
        Gate::Swap { a: 0, b: 1 },
        Gate::Cnot { control: 1, target: 2 },
        Gate::Swap { a: 2, b: 3 },
    ]
}

fn gate_local(gate: &Gate, shape: &RegisterShape) -> Result<(CMat, Vec<usize>)> {
    match *gate {
        Gate::Cnot { control, target } => {
            let mut m = CMat::zeros(4, 4);
            for cbit in 0..2 {
                for tbit in 0..2 {
                    let out = if cbit == 1 { 1 - tbit } else { tbit };
                    m.set(cbit * 2 + out, cbit * 2 + tbit, c(1.0, 0.0));
                }
            }
            Ok((m, vec![control, target]))
        }
        Gate::Swap { a, b } => {
            let mut m = CMat::zeros(4, 4);
            for x in 0..2 {
                for y in 0..2 {
                    m.set(y * 2 + x, x * 2 + y, c(1.0, 0.0));
                }
            }
            Ok((m, vec![a, b]))
        }
        Gate::Rz { site, angle } => {
            let m = CMat::diag(&[c(0.0, -angle / 2.0).exp(), c(0.0, angle / 2.0).exp()]);
            Ok((m, vec![site]))
        }
        Gate::Ry { site, angle } => {
            let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            let m = CMat::from_real_rows(&[&[ch, -sh], &[sh, ch]]);
            Ok((m, vec![site]))
        }
        Gate::Rx { site, angle } => {
            let (ch, sh) = ((angle / 2.0).cos(), (angle / 2.0).sin());
            let mut m = CMat::zeros(2, 2);
            m.set(0, 0, c(ch, 0.0));
            m.set(1, 1, c(ch, 0.0));
            m.set(0, 1, c(0.0, -sh));
            m.set(1, 0, c(0.0, -sh));
            Ok((m, vec![site]))
        }
        Gate::Csum { control, target } => Ok((csum(), vec![control, target])),
        Gate::RotSubspace { site, i, j, angle } => {
            let d = shape.dim_at(site);
            let mut m = CMat::identity(d);
            let (ch, sh) = (angle.cos(), angle.sin());
            m.set(i, i, c(ch, 0.0));
            m.set(i, j, c(-sh, 0.0));
            m.set(j, i, c(sh, 0.0));
            m.set(j, j, c(ch, 0.0));
            Ok((m, vec![site]))
        }
    }
}

/// Ordered product of the embedded gates (first gate acts first).
pub fn circuit_unitary(gates: &GateList, shape: &RegisterShape) -> Result<CMat> {
    let d = shape.total_dim();
    let mut u = CMat::identity(d);
    for gate in gates {
        let (local, sites) = gate_local(gate, shape)?;
        let full = crate::register::embed(&local, &sites, shape)?;
        u = full.matmul(&u);
    }
    Ok(u)
}

/// Transcription check outcome for the coupling circuit.
#[derive(Debug, Clone)]
pub struct UzzTranscriptionReport {
    pub theta: f64,
    /// Max deviation from the exact encoded rotation on the physical
    /// subspace, after removing one global phase.
    pub max_deviation: f64,
    /// True when the transcription reproduces the exact block within 1e-10.
    pub matches: bool,
}

/// Compare the transcribed gate list against the exact two-rotor rotation on
/// the 9-dimensional physical subspace, up to a global phase. The exact
/// block remains canonical regardless of the outcome.
pub fn uzz_transcription_check(theta: f64) -> Result<UzzTranscriptionReport> {
    let shape = RegisterShape::uniform(2, 4)?;
    let circuit = circuit_unitary(&uzz_qubit_gatelist(theta), &shape)?;
    let mut exact9 = CMat::zeros(9, 9);
    for i in 0..3 {
        for j in 0..3 {
            let na = crate::model::charge_of_level(i, 3) as f64;
            let nb = crate::model::charge_of_level(j, 3) as f64;
            exact9.set(i * 3 + j, i * 3 + j, c(0.0, -theta * na * nb).exp());
        }
    }
    // Physical 4-qubit index of the qutrit pair (i, j).
    let phys = |i: usize, j: usize| -> usize {
        let (a1, a2) = (i / 2, i % 2);
        let (b1, b2) = (j / 2, j % 2);
        a1 * 8 + a2 * 4 + b1 * 2 + b2
    };
    // Global phase from the largest circuit entry on the physical block.
    let mut phase = c(1.0, 0.0);
    let mut best = 0.0;
    for i in 0..9 {
        for j in 0..9 {
            let v = circuit.get(phys(i / 3, i % 3), phys(j / 3, j % 3));
            if v.norm() > best && exact9.get(i, j).norm() > 1e-12 {
                best = v.norm();
                phase = exact9.get(i, j) / v;
            }
        }
    }
    let phase = phase / phase.norm();
    let mut max_deviation: f64 = 0.0;
    for i in 0..9 {
        for j in 0..9 {
            let got = circuit.get(phys(i / 3, i % 3), phys(j / 3, j % 3)) * phase;
            max_deviation = max_deviation.max((got - exact9.get(i, j)).norm());
        }
    }
    Ok(UzzTranscriptionReport { theta, max_deviation, matches: max_deviation <= 1e-10 })
}
