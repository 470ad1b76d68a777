use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SystemLayout;
use crate::state::ComplexOperator;

const COMPLETENESS_TOL: f64 = 1e-9;

/// Parameters of the damped Jaynes-Cummings reservoir.
///
/// `g` is the spectral bandwidth of the noise and `gamma` the
/// system-environment coupling strength; the evolution is Markovian-like for
/// `2*gamma < g` and non-Markovian for `2*gamma > g`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingParams {
    g: f64,
    gamma: f64,
}

impl DampingParams {
    pub fn new(g: f64, gamma: f64) -> Result<Self> {
        if !(g > 0.0) || !g.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "bandwidth g must be positive, got {g}"
            )));
        }
        if !(gamma >= 0.0) || !gamma.is_finite() {
            return Err(Error::InvalidParameter(format!(
                "coupling gamma must be nonnegative, got {gamma}"
            )));
        }
        Ok(Self { g, gamma })
    }

    pub fn g(&self) -> f64 {
        self.g
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn is_non_markovian(&self) -> bool {
        2.0 * self.gamma > self.g
    }
}

/// Thermal mixing `p` and damping strength `lambda` of the generalized
/// amplitude-damping channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GadParams {
    p: f64,
    lambda: f64,
}

impl GadParams {
    pub fn new(p: f64, lambda: f64) -> Result<Self> {
        if !(0.0..=0.5).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "mixing p must lie in [0, 1/2], got {p}"
            )));
        }
        check_lambda(lambda)?;
        Ok(Self { p, lambda })
    }

    pub fn p(&self) -> f64 {
        self.p
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }
}

pub(crate) fn check_lambda(lambda: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "damping lambda must lie in [0, 1], got {lambda}"
        )));
    }
    Ok(())
}

/// Completeness-checked list of Kraus operators, all of one dimension.
#[derive(Debug, Clone)]
pub struct KrausChannel {
    ops: Vec<Array2<Complex64>>,
    label: String,
}

impl KrausChannel {
    pub fn new(ops: Vec<Array2<Complex64>>, label: &str) -> Result<Self> {
        let dim = match ops.first() {
            Some(op) => op.nrows(),
            None => {
                return Err(Error::InvalidParameter(
                    "channel needs at least one Kraus operator".into(),
                ))
            }
        };
        for op in &ops {
            if op.nrows() != dim || op.ncols() != dim {
                return Err(Error::DimensionMismatch(
                    "Kraus operators must be square and equally sized".into(),
                ));
            }
        }
        let channel = Self {
            ops,
            label: label.to_string(),
        };
        let dev = channel.completeness_deviation();
        if dev > COMPLETENESS_TOL {
            return Err(Error::InvalidParameter(format!(
                "Kraus operators violate completeness by {dev:.3e}"
            )));
        }
        Ok(channel)
    }

    pub fn ops(&self) -> &[Array2<Complex64>] {
        &self.ops
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn dim(&self) -> usize {
        self.ops[0].nrows()
    }

    /// `max |sum K' K - I|` entrywise.
    pub fn completeness_deviation(&self) -> f64 {
        let dim = self.dim();
        let mut sum = Array2::<Complex64>::zeros((dim, dim));
        for op in &self.ops {
            let dag = op.mapv(|z| z.conj()).reversed_axes();
            sum = sum + dag.dot(op);
        }
        let mut dev: f64 = 0.0;
        for i in 0..dim {
            for j in 0..dim {
                let expected = if i == j { 1.0 } else { 0.0 };
                dev = dev.max((sum[(i, j)] - Complex64::new(expected, 0.0)).norm());
            }
        }
        dev
    }

    /// `sum K K'`, the image of the (unnormalized) identity.
    pub fn identity_image(&self) -> Array2<Complex64> {
        let dim = self.dim();
        let mut sum = Array2::<Complex64>::zeros((dim, dim));
        for op in &self.ops {
            let dag = op.mapv(|z| z.conj()).reversed_axes();
            sum = sum + op.dot(&dag);
        }
        sum
    }
}

/// Damping schedule of the damped Jaynes-Cummings model,
/// `lambda(t) = 1 - e^{-g t} ((g/l) sinh(l t / 2) + cosh(l t / 2))^2`
/// with `l = sqrt(g^2 - 2 gamma g)`.
///
/// For `2 gamma > g`, `l` is imaginary and the bracket becomes
/// `cos(|l| t / 2) + (g/|l|) sin(|l| t / 2)`; the oscillation makes
/// `lambda(t)` non-monotone. The degenerate point `2 gamma = g` uses the
/// analytic limit `1 + g t / 2`.
pub fn jc_damping(params: &DampingParams, t: f64) -> Result<f64> {
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "time must be nonnegative, got {t}"
        )));
    }
    let g = params.g;
    let l_sq = g * g - 2.0 * params.gamma * g;
    let bracket = if l_sq.abs() < 1e-14 * g * g {
        1.0 + g * t / 2.0
    } else if l_sq > 0.0 {
        let l = l_sq.sqrt();
        (g / l) * (l * t / 2.0).sinh() + (l * t / 2.0).cosh()
    } else {
        let l = (-l_sq).sqrt();
        (l * t / 2.0).cos() + (g / l) * (l * t / 2.0).sin()
    };
    let lambda = 1.0 - (-g * t).exp() * bracket * bracket;
    if lambda < -1e-9 || lambda > 1.0 + 1e-9 {
        return Err(Error::InvalidParameter(format!(
            "damping schedule produced lambda = {lambda} outside [0, 1]"
        )));
    }
    Ok(lambda.clamp(0.0, 1.0))
}

/// Amplitude damping on a qubit: `E0 = diag(1, sqrt(1-lambda))`,
/// `E1 = sqrt(lambda) |0><1|`.
pub fn ad_kraus_qubit(lambda: f64) -> Result<KrausChannel> {
    check_lambda(lambda)?;
    let z = Complex64::new(0.0, 0.0);
    let e0 = ndarray::array![
        [Complex64::new(1.0, 0.0), z],
        [z, Complex64::new((1.0 - lambda).sqrt(), 0.0)]
    ];
    let e1 = ndarray::array![[z, Complex64::new(lambda.sqrt(), 0.0)], [z, z]];
    KrausChannel::new(vec![e0, e1], "ad-qubit")
}

/// Amplitude damping on a three-level mode; the vacuum level `|2>` is
/// untouched.
pub fn ad_kraus_mode(lambda: f64) -> Result<KrausChannel> {
    check_lambda(lambda)?;
    let mut e0 = Array2::<Complex64>::zeros((3, 3));
    e0[(0, 0)] = Complex64::new(1.0, 0.0);
    e0[(1, 1)] = Complex64::new((1.0 - lambda).sqrt(), 0.0);
    e0[(2, 2)] = Complex64::new(1.0, 0.0);
    let mut e1 = Array2::<Complex64>::zeros((3, 3));
    e1[(0, 1)] = Complex64::new(lambda.sqrt(), 0.0);
    KrausChannel::new(vec![e0, e1], "ad-mode")
}

/// Generalized amplitude damping on a qubit (finite-temperature bath).
pub fn gad_kraus(params: &GadParams) -> Result<KrausChannel> {
    let p = params.p;
    let lambda = params.lambda;
    let z = Complex64::new(0.0, 0.0);
    let sp = p.sqrt();
    let sq = (1.0 - p).sqrt();
    let sl = lambda.sqrt();
    let sd = (1.0 - lambda).sqrt();
    let a1 = ndarray::array![
        [Complex64::new(sq, 0.0), z],
        [z, Complex64::new(sq * sd, 0.0)]
    ];
    let a2 = ndarray::array![[z, Complex64::new(sq * sl, 0.0)], [z, z]];
    let a3 = ndarray::array![[z, z], [Complex64::new(sp * sl, 0.0), z]];
    let a4 = ndarray::array![
        [Complex64::new(sp * sd, 0.0), z],
        [z, Complex64::new(sp, 0.0)]
    ];
    KrausChannel::new(vec![a1, a2, a3, a4], "gad-qubit")
}

/// `sum_k K rho K'` with each Kraus operator lifted to the full space on the
/// listed target subsystems.
pub fn apply_channel(
    state: &ComplexOperator,
    channel: &KrausChannel,
    targets: &[&str],
) -> Result<ComplexOperator> {
    let block: usize = {
        let positions = state.layout().positions_of(targets)?;
        positions
            .iter()
            .map(|&p| state.layout().subsystems()[p].1)
            .product()
    };
    if channel.dim() != block {
        return Err(Error::DimensionMismatch(format!(
            "channel dimension {} does not match target block {}",
            channel.dim(),
            block
        )));
    }
    let mut out = ComplexOperator::zeros(state.layout().clone());
    for op in channel.ops() {
        let term = state.conjugate_on_subsystems(op, targets)?;
        out.add_scaled(&term, 1.0);
    }
    Ok(out)
}

/// Trace distance between the channel's image of the unnormalized identity
/// and the identity itself; zero exactly for unital qubit channels.
pub fn unitality_deviation(channel: &KrausChannel) -> Result<f64> {
    if channel.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "unitality probe is defined for qubit channels, got dimension {}",
            channel.dim()
        )));
    }
    let layout = SystemLayout::single("q", 2)?;
    let image = ComplexOperator::new(layout.clone(), channel.identity_image())?;
    let identity = ComplexOperator::identity(layout);
    crate::eigen::trace_distance(&image, &identity)
}

/// Result of the damping-revival scan.
#[derive(Debug, Clone, PartialEq)]
pub struct NonMarkovWitness {
    /// True iff `lambda(t)` is non-monotone on the sampled grid.
    pub non_markovian: bool,
    /// Maximal intervals on which `lambda` decreases (information backflow).
    pub revival_intervals: Vec<(f64, f64)>,
}

/// Scans `lambda(t)` on a uniform grid and reports revivals.
///
/// Under amplitude damping the trace distance of the optimal state pair is
/// `1 - lambda(t)`, so a decreasing `lambda` is exactly a distinguishability
/// revival.
pub fn nonmarkov_witness(
    params: &DampingParams,
    t_max: f64,
    n_points: usize,
) -> Result<NonMarkovWitness> {
    if !(t_max > 0.0) || n_points < 10 {
        return Err(Error::InvalidParameter(format!(
            "degenerate grid: t_max = {t_max}, n_points = {n_points}"
        )));
    }
    let step = t_max / (n_points - 1) as f64;
    let mut lambdas = Vec::with_capacity(n_points);
    for i in 0..n_points {
        lambdas.push(jc_damping(params, i as f64 * step)?);
    }

    let mut intervals = Vec::new();
    let mut run_start: Option<usize> = None;
    for i in 0..n_points - 1 {
        let decreasing = lambdas[i + 1] < lambdas[i] - 1e-12;
        match (decreasing, run_start) {
            (true, None) => run_start = Some(i),
            (false, Some(start)) => {
                intervals.push((start as f64 * step, i as f64 * step));
                run_start = None;
            }
            _ => {}
        }
    }
    if let Some(start) = run_start {
        intervals.push((start as f64 * step, t_max));
    }
    Ok(NonMarkovWitness {
        non_markovian: !intervals.is_empty(),
        revival_intervals: intervals,
    })
}
