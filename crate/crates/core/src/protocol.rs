//! The ping-pong QKD round as a pure-state pipeline.
//!
//! Bob prepares `|psi+> = (|01> + |10>)/sqrt(2)` in polarization, keeps the
//! home qubit `h` and sends the travel mode `t` to Alice. Eve attaches two
//! ancilla modes: `x` starts in the vacuum `|2>`, `y` in `|0>`. On the onward
//! leg she applies the controlled-polarization-beam-splitter isometry `Q` on
//! `t x y`, Alice encodes her bit with `I` or `Z`, and on the return leg Eve
//! applies `Q^{-1}`. Bob then feeds his qubits through trusted damping noise
//! and performs a Bell measurement; Eve reads her `y` mode.

use ndarray::Array2;
use num_complex::Complex64;

use crate::channel::{
    ad_kraus_qubit, apply_channel, check_lambda, gad_kraus, GadParams, KrausChannel,
};
use crate::error::{Error, Result};
use crate::layout::{SystemLayout, EVE_X, EVE_Y, HOME, TRAVEL};
use crate::state::{ComplexOperator, Ket};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;
const DOMAIN_TOL: f64 = 1e-9;

fn real(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// Alice's one-bit encoding choice.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Encoding {
    /// Apply the identity (bit 0).
    Zero,
    /// Apply `sigma_z` on the travel polarization (bit 1).
    One,
}

impl Encoding {
    pub const BOTH: [Encoding; 2] = [Encoding::Zero, Encoding::One];

    pub fn bit(self) -> usize {
        match self {
            Encoding::Zero => 0,
            Encoding::One => 1,
        }
    }
}

/// Which trusted noise Bob inserts before his Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProtocolScenario {
    /// No added noise; the bare attack statistics.
    Noiseless,
    /// Amplitude damping on the returned travel mode only.
    Case1TravelOnly { lambda: f64 },
    /// Amplitude damping on the travel mode and the home qubit.
    Case2BothQubits { lambda: f64 },
    /// Generalized (finite-temperature) damping on both qubits.
    GadBothQubits { p: f64, lambda: f64 },
}

impl ProtocolScenario {
    pub fn validate(&self) -> Result<()> {
        match *self {
            ProtocolScenario::Noiseless => Ok(()),
            ProtocolScenario::Case1TravelOnly { lambda }
            | ProtocolScenario::Case2BothQubits { lambda } => check_lambda(lambda),
            ProtocolScenario::GadBothQubits { p, lambda } => GadParams::new(p, lambda).map(|_| ()),
        }
    }

    pub fn lambda(&self) -> f64 {
        match *self {
            ProtocolScenario::Noiseless => 0.0,
            ProtocolScenario::Case1TravelOnly { lambda }
            | ProtocolScenario::Case2BothQubits { lambda }
            | ProtocolScenario::GadBothQubits { lambda, .. } => lambda,
        }
    }
}

/// Eve's attack isometry: an explicit partial isometry between two
/// orthonormal four-frames of `t ⊗ x ⊗ y`.
///
/// ```text
/// |020> -> (|002> + |201>)/sqrt(2)      |120> -> (|210> + |112>)/sqrt(2)
/// |021> -> (|002> - |201>)/sqrt(2)      |121> -> (|210> - |112>)/sqrt(2)
/// ```
///
/// The protocol state provably stays inside the domain (onward) and image
/// (return) spans, so no completion to a full unitary is ever needed; inputs
/// outside the span are rejected.
#[derive(Debug, Clone)]
pub struct AttackMap {
    domain: Vec<Ket>,
    image: Vec<Ket>,
}

fn txy_layout() -> SystemLayout {
    SystemLayout::new(&[(TRAVEL, 3), (EVE_X, 3), (EVE_Y, 3)]).expect("valid layout")
}

impl AttackMap {
    pub fn wojcik() -> Self {
        let layout = txy_layout();
        let basis = |digits: &[usize]| Ket::basis(layout.clone(), digits).expect("valid digits");
        let superpose = |a: &[usize], b: &[usize], sign: f64| {
            Ket::from_components(
                layout.clone(),
                &[(a, real(FRAC_1_SQRT_2)), (b, real(sign * FRAC_1_SQRT_2))],
            )
            .expect("valid digits")
        };
        AttackMap {
            domain: vec![
                basis(&[0, 2, 0]),
                basis(&[0, 2, 1]),
                basis(&[1, 2, 0]),
                basis(&[1, 2, 1]),
            ],
            image: vec![
                superpose(&[0, 0, 2], &[2, 0, 1], 1.0),
                superpose(&[0, 0, 2], &[2, 0, 1], -1.0),
                superpose(&[2, 1, 0], &[1, 1, 2], 1.0),
                superpose(&[2, 1, 0], &[1, 1, 2], -1.0),
            ],
        }
    }

    pub fn domain(&self) -> &[Ket] {
        &self.domain
    }

    pub fn image(&self) -> &[Ket] {
        &self.image
    }

    /// Largest deviation of the two frames from orthonormality.
    pub fn frame_deviation(&self) -> f64 {
        let mut dev: f64 = 0.0;
        for frame in [&self.domain, &self.image] {
            for (i, a) in frame.iter().enumerate() {
                for (j, b) in frame.iter().enumerate() {
                    let expected = if i == j { 1.0 } else { 0.0 };
                    let overlap = a.inner(b).expect("same layout");
                    dev = dev.max((overlap - real(expected)).norm());
                }
            }
        }
        dev
    }

    /// Applies the partial isometry (or its adjoint) on the `t x y` factor of
    /// a full protocol state, independently for each home-qubit branch.
    fn apply(&self, state: &Ket, inverse: bool) -> Result<Ket> {
        let layout = state.layout().clone();
        if layout != SystemLayout::protocol() {
            return Err(Error::DimensionMismatch(
                "attack expects the h-t-x-y protocol layout".into(),
            ));
        }
        let (from, to) = if inverse {
            (&self.image, &self.domain)
        } else {
            (&self.domain, &self.image)
        };

        let block = 27;
        let amps = state.amplitudes();
        let mut out = vec![Complex64::new(0.0, 0.0); layout.dim()];
        let mut residual_sq = 0.0;
        for h in 0..2 {
            let offset = h * block;
            let coeffs: Vec<Complex64> = from
                .iter()
                .map(|f| {
                    let mut acc = Complex64::new(0.0, 0.0);
                    for (i, fa) in f.amplitudes().iter().enumerate() {
                        acc += fa.conj() * amps[offset + i];
                    }
                    acc
                })
                .collect();
            let mut block_sq = 0.0;
            for i in 0..block {
                block_sq += amps[offset + i].norm_sqr();
            }
            let spanned_sq: f64 = coeffs.iter().map(|c| c.norm_sqr()).sum();
            residual_sq += (block_sq - spanned_sq).max(0.0);
            for (coeff, target) in coeffs.iter().zip(to) {
                for (i, ta) in target.amplitudes().iter().enumerate() {
                    out[offset + i] += coeff * ta;
                }
            }
        }
        let residual = residual_sq.sqrt();
        if residual > DOMAIN_TOL {
            return Err(Error::OutsideAttackDomain(residual));
        }
        Ket::new(layout, out)
    }
}

/// `|Psi>_initial = |psi+>_{ht} |2>_x |0>_y`.
pub fn initial_state() -> Ket {
    Ket::from_components(
        SystemLayout::protocol(),
        &[
            (&[0, 1, 2, 0], real(FRAC_1_SQRT_2)),
            (&[1, 0, 2, 0], real(FRAC_1_SQRT_2)),
        ],
    )
    .expect("valid initial state")
}

/// Eve's onward-leg operation `Q` on `t x y`.
pub fn wojcik_onward(state: &Ket) -> Result<Ket> {
    AttackMap::wojcik().apply(state, false)
}

/// Eve's return-leg operation `Q^{-1}` on `t x y`.
pub fn wojcik_return(state: &Ket) -> Result<Ket> {
    AttackMap::wojcik().apply(state, true)
}

/// Alice's encoding: identity for bit 0, `diag(1, -1, 1)` on the travel mode
/// for bit 1 (the vacuum level picks up no phase).
pub fn alice_encode(state: &Ket, encoding: Encoding) -> Result<Ket> {
    match encoding {
        Encoding::Zero => Ok(state.clone()),
        Encoding::One => {
            let mut z = Array2::<Complex64>::zeros((3, 3));
            z[(0, 0)] = real(1.0);
            z[(1, 1)] = real(-1.0);
            z[(2, 2)] = real(1.0);
            state.apply_on_subsystems(&z, &[TRAVEL])
        }
    }
}

/// Damping of the returned travel mode, acting jointly on `t` and Eve's
/// record mode `y`.
///
/// The no-jump operator damps the `|1>_t` amplitude as usual. The jump
/// (emission) operators absorb the travel excitation *and* reset `y` to
/// `|0>`: the absorbed photon takes the which-bit record with it. This is
/// the channel realized by the protocol's damping stage; plain single-mode
/// damping on `t` would leave the Alice-Eve statistics untouched.
pub fn travel_damping_channel(lambda: f64) -> Result<KrausChannel> {
    check_lambda(lambda)?;
    KrausChannel::new(travel_noise_ops(1.0, lambda), "travel-ad")
}

/// Finite-temperature version of [`travel_damping_channel`].
///
/// The emission branch keeps the record reset; the thermal excitation and
/// no-jump branches act on the travel mode alone. At `p = 0` this reduces
/// exactly to [`travel_damping_channel`].
pub fn travel_gad_channel(params: &GadParams) -> Result<KrausChannel> {
    let mut ops = travel_noise_ops(1.0 - params.p(), params.lambda());
    let p = params.p();
    let lambda = params.lambda();
    // Thermal excitation |0>_t -> |1>_t.
    let mut a3 = Array2::<Complex64>::zeros((3, 3));
    a3[(1, 0)] = real((p * lambda).sqrt());
    ops.push(ndarray::linalg::kron(&a3, &Array2::eye(3)));
    // Thermal no-jump branch.
    let mut a4 = Array2::<Complex64>::zeros((3, 3));
    a4[(0, 0)] = real((p * (1.0 - lambda)).sqrt());
    a4[(1, 1)] = real(p.sqrt());
    a4[(2, 2)] = real(p.sqrt());
    ops.push(ndarray::linalg::kron(&a4, &Array2::eye(3)));
    KrausChannel::new(ops, "travel-gad")
}

/// No-jump + emission-with-record-reset operators on `t ⊗ y`, scaled by
/// `weight` (1 for plain damping, `1 - p` for the thermal channel). The set
/// is complete only once the caller adds the thermal branches for
/// `weight < 1`.
fn travel_noise_ops(weight: f64, lambda: f64) -> Vec<Array2<Complex64>> {
    let mut e0 = Array2::<Complex64>::zeros((3, 3));
    e0[(0, 0)] = real(weight.sqrt());
    e0[(1, 1)] = real((weight * (1.0 - lambda)).sqrt());
    e0[(2, 2)] = real(weight.sqrt());
    let mut ops = vec![ndarray::linalg::kron(&e0, &Array2::eye(3))];

    let mut emission = Array2::<Complex64>::zeros((3, 3));
    emission[(0, 1)] = real((weight * lambda).sqrt());
    for k in 0..3 {
        let mut reset = Array2::<Complex64>::zeros((3, 3));
        reset[(0, k)] = real(1.0);
        ops.push(ndarray::linalg::kron(&emission, &reset));
    }
    ops
}

/// Bob's trusted noise stage, applied strictly after the return leg.
pub fn bob_add_noise(
    rho: &ComplexOperator,
    scenario: &ProtocolScenario,
) -> Result<ComplexOperator> {
    scenario.validate()?;
    match *scenario {
        ProtocolScenario::Noiseless => Ok(rho.clone()),
        ProtocolScenario::Case1TravelOnly { lambda } => {
            apply_channel(rho, &travel_damping_channel(lambda)?, &[TRAVEL, EVE_Y])
        }
        ProtocolScenario::Case2BothQubits { lambda } => {
            let step = apply_channel(rho, &travel_damping_channel(lambda)?, &[TRAVEL, EVE_Y])?;
            apply_channel(&step, &ad_kraus_qubit(lambda)?, &[HOME])
        }
        ProtocolScenario::GadBothQubits { p, lambda } => {
            let params = GadParams::new(p, lambda)?;
            let step = apply_channel(rho, &travel_gad_channel(&params)?, &[TRAVEL, EVE_Y])?;
            apply_channel(&step, &gad_kraus(&params)?, &[HOME])
        }
    }
}

/// One full round for a fixed encoding: prepare, attack, encode, return,
/// add Bob's noise. Returns the pre-measurement density operator.
pub fn run_round(encoding: Encoding, scenario: &ProtocolScenario) -> Result<ComplexOperator> {
    let state = initial_state();
    let state = wojcik_onward(&state)?;
    let state = alice_encode(&state, encoding)?;
    let state = wojcik_return(&state)?;
    bob_add_noise(&state.outer(), scenario)
}

/// Joint outcome distribution over Alice's bit, Eve's record and Bob's Bell
/// outcome.
///
/// Indexing: `A in {0,1}`, `E in {0,1,2}` (Eve's `y` outcome; 2 is the vacuum
/// level and never occurs), `B in {0,1,2,3}` for `psi+, psi-, phi+, phi-`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    p: [[[f64; 4]; 3]; 2],
}

impl JointDistribution {
    pub const A_DIM: usize = 2;
    pub const E_DIM: usize = 3;
    pub const B_DIM: usize = 4;

    /// Builds a distribution, clamping `-1e-12 <= p < 0` entries to zero and
    /// requiring normalization within `1e-9`.
    pub fn new(mut p: [[[f64; 4]; 3]; 2]) -> Result<Self> {
        let mut total = 0.0;
        for a in p.iter_mut() {
            for e in a.iter_mut() {
                for v in e.iter_mut() {
                    if *v < 0.0 {
                        if *v < -1e-12 {
                            return Err(Error::InvalidParameter(format!(
                                "negative probability {v}"
                            )));
                        }
                        *v = 0.0;
                    }
                    total += *v;
                }
            }
        }
        if (total - 1.0).abs() > 1e-9 {
            return Err(Error::NotNormalized(total));
        }
        Ok(Self { p })
    }

    pub fn get(&self, a: usize, e: usize, b: usize) -> f64 {
        self.p[a][e][b]
    }

    pub fn total(&self) -> f64 {
        self.iter().map(|(_, v)| v).sum()
    }

    pub fn max_abs_diff(&self, other: &JointDistribution) -> f64 {
        self.iter()
            .zip(other.iter())
            .map(|((_, a), (_, b))| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn iter(&self) -> impl Iterator<Item = ((usize, usize, usize), f64)> + '_ {
        (0..Self::A_DIM).flat_map(move |a| {
            (0..Self::E_DIM)
                .flat_map(move |e| (0..Self::B_DIM).map(move |b| ((a, e, b), self.p[a][e][b])))
        })
    }
}

/// Bell-basis ket on the `h t` polarization subspace, tensored with
/// `|x> |e>` on the ancilla modes.
fn bell_ket(b: usize, x: usize, e: usize) -> Ket {
    let layout = SystemLayout::protocol();
    let (digits, sign): ([[usize; 4]; 2], f64) = match b {
        0 => ([[0, 1, x, e], [1, 0, x, e]], 1.0),
        1 => ([[0, 1, x, e], [1, 0, x, e]], -1.0),
        2 => ([[0, 0, x, e], [1, 1, x, e]], 1.0),
        _ => ([[0, 0, x, e], [1, 1, x, e]], -1.0),
    };
    Ket::from_components(
        layout,
        &[
            (&digits[0], real(FRAC_1_SQRT_2)),
            (&digits[1], real(sign * FRAC_1_SQRT_2)),
        ],
    )
    .expect("valid Bell component")
}

/// Runs both encodings with prior 1/2 and measures: Bell projectors on the
/// polarization of `h t`, computational projectors on Eve's `y`.
pub fn measure_joint(scenario: &ProtocolScenario) -> Result<JointDistribution> {
    scenario.validate()?;
    let mut probs = [[[0.0; 4]; 3]; 2];
    for encoding in Encoding::BOTH {
        let rho = run_round(encoding, scenario)?;
        for e in 0..3 {
            for b in 0..4 {
                let mut value = 0.0;
                for x in 0..3 {
                    value += rho.expectation(&bell_ket(b, x, e))?.re;
                }
                probs[encoding.bit()][e][b] = 0.5 * value;
            }
        }
    }
    JointDistribution::new(probs)
}

/// The analytic joint tables; the oracle that [`measure_joint`] must match.
///
/// There is no closed form for the finite-temperature scenario.
pub fn closed_form_joint(scenario: &ProtocolScenario) -> Result<JointDistribution> {
    scenario.validate()?;
    let mut p = [[[0.0; 4]; 3]; 2];
    match *scenario {
        ProtocolScenario::Noiseless => {
            p[0][0][0] = 0.5;
            for e in 0..2 {
                for b in 0..2 {
                    p[1][e][b] = 0.125;
                }
            }
        }
        ProtocolScenario::Case1TravelOnly { lambda } => {
            let s = (1.0 - lambda).sqrt();
            p[0][0][0] = (s + 1.0) * (s + 1.0) / 8.0;
            p[0][0][1] = (s - 1.0) * (s - 1.0) / 8.0;
            p[0][0][2] = lambda / 8.0;
            p[0][0][3] = lambda / 8.0;
            p[1][0][2] = lambda / 8.0;
            p[1][0][3] = lambda / 8.0;
            p[1][0][0] = 0.125;
            p[1][0][1] = 0.125;
            p[1][1][0] = (1.0 - lambda) / 8.0;
            p[1][1][1] = (1.0 - lambda) / 8.0;
        }
        ProtocolScenario::Case2BothQubits { lambda } => {
            p[0][0][0] = (1.0 - lambda) / 2.0;
            p[0][0][2] = lambda / 4.0;
            p[0][0][3] = lambda / 4.0;
            p[1][0][2] = lambda / 4.0;
            p[1][0][3] = lambda / 4.0;
            p[1][0][0] = (1.0 - lambda) / 8.0;
            p[1][0][1] = (1.0 - lambda) / 8.0;
            p[1][1][0] = (1.0 - lambda) / 8.0;
            p[1][1][1] = (1.0 - lambda) / 8.0;
        }
        ProtocolScenario::GadBothQubits { .. } => {
            return Err(Error::InvalidParameter(
                "no closed-form joint table for the finite-temperature scenario".into(),
            ));
        }
    }
    JointDistribution::new(p)
}

/// Eve's post-round states `(1/2, rho_xy)` for the two encodings.
pub fn eve_ensemble(scenario: &ProtocolScenario) -> Result<Vec<(f64, ComplexOperator)>> {
    ensemble(scenario, &[EVE_X, EVE_Y])
}

/// Bob's post-round states `(1/2, rho_ht)` for the two encodings.
pub fn bob_ensemble(scenario: &ProtocolScenario) -> Result<Vec<(f64, ComplexOperator)>> {
    ensemble(scenario, &[HOME, TRAVEL])
}

fn ensemble(scenario: &ProtocolScenario, keep: &[&str]) -> Result<Vec<(f64, ComplexOperator)>> {
    scenario.validate()?;
    Encoding::BOTH
        .iter()
        .map(|&encoding| Ok((0.5, run_round(encoding, scenario)?.partial_trace(keep)?)))
        .collect()
}
