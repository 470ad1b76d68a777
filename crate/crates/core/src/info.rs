//! Shannon and von Neumann information quantities, key rates, and the
//! analytic closed forms used as oracles. All logarithms are base 2.

use crate::eigen::von_neumann_entropy;
use crate::error::{Error, Result};
use crate::protocol::{
    bob_ensemble, eve_ensemble, measure_joint, JointDistribution, ProtocolScenario,
};
use crate::state::ComplexOperator;

/// Probabilities below this are treated as exact zeros in entropy sums.
const PROB_FLOOR: f64 = 1e-15;

/// Which pair of parties to keep when marginalizing the joint distribution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MarginalPair {
    AB,
    AE,
    EB,
}

/// Information quantities and key rates at one parameter point.
///
/// `k_min = i_ab - chi_ae` is the individual-attack lower bound;
/// `k_max = i_ab - i_ae` the rate against Eve's actual measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KeyRateReport {
    pub lambda: f64,
    pub i_ab: f64,
    pub i_ae: f64,
    pub chi_ae: f64,
    pub chi_ab: f64,
    pub k_min: f64,
    pub k_max: f64,
}

impl KeyRateReport {
    /// Internal consistency of one report; the CLI re-checks every emitted
    /// row against this.
    pub fn check(&self) -> Result<()> {
        let fields = [
            self.lambda,
            self.i_ab,
            self.i_ae,
            self.chi_ae,
            self.chi_ab,
            self.k_min,
            self.k_max,
        ];
        if fields.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidParameter("non-finite report field".into()));
        }
        if !(-1e-12..=1.0 + 1e-12).contains(&self.lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda {} outside [0, 1]",
                self.lambda
            )));
        }
        for v in [self.i_ab, self.i_ae, self.chi_ae, self.chi_ab] {
            if !(-1e-9..=2.0 + 1e-9).contains(&v) {
                return Err(Error::InvalidParameter(format!(
                    "information quantity {v} outside [0, 2] bits"
                )));
            }
        }
        if (self.k_min - (self.i_ab - self.chi_ae)).abs() > 1e-12
            || (self.k_max - (self.i_ab - self.i_ae)).abs() > 1e-12
        {
            return Err(Error::InvalidParameter(
                "key rates inconsistent with informations".into(),
            ));
        }
        Ok(())
    }
}

/// Sums out the third party of the joint distribution.
pub fn marginalize(joint: &JointDistribution, pair: MarginalPair) -> Vec<Vec<f64>> {
    match pair {
        MarginalPair::AB => {
            let mut out = vec![vec![0.0; JointDistribution::B_DIM]; JointDistribution::A_DIM];
            for ((a, _, b), v) in joint.iter() {
                out[a][b] += v;
            }
            out
        }
        MarginalPair::AE => {
            let mut out = vec![vec![0.0; JointDistribution::E_DIM]; JointDistribution::A_DIM];
            for ((a, e, _), v) in joint.iter() {
                out[a][e] += v;
            }
            out
        }
        MarginalPair::EB => {
            let mut out = vec![vec![0.0; JointDistribution::B_DIM]; JointDistribution::E_DIM];
            for ((_, e, b), v) in joint.iter() {
                out[e][b] += v;
            }
            out
        }
    }
}

/// Mutual information of a normalized 2-d distribution, in bits.
pub fn mutual_information(p: &[Vec<f64>]) -> Result<f64> {
    let mut total = 0.0;
    for row in p {
        for &v in row {
            if v < -1e-12 {
                return Err(Error::InvalidParameter(format!("negative probability {v}")));
            }
            total += v.max(0.0);
        }
    }
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let rows: Vec<f64> = p.iter().map(|r| r.iter().sum()).collect();
    let n_cols = p.first().map_or(0, Vec::len);
    let cols: Vec<f64> = (0..n_cols).map(|j| p.iter().map(|r| r[j]).sum()).collect();
    let mut info = 0.0;
    for (i, row) in p.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v > PROB_FLOOR {
                info += v * (v / (rows[i] * cols[j])).log2();
            }
        }
    }
    Ok(info.max(0.0))
}

/// Holevo bound `S(sum p_i rho_i) - sum p_i S(rho_i)` in bits.
pub fn holevo_bound(ensemble: &[(f64, ComplexOperator)]) -> Result<f64> {
    if ensemble.is_empty() {
        return Err(Error::InvalidParameter("empty ensemble".into()));
    }
    let total: f64 = ensemble.iter().map(|(p, _)| p).sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::NotNormalized(total));
    }
    let dim = ensemble[0].1.dim();
    let mut average = ComplexOperator::zeros(ensemble[0].1.layout().clone());
    let mut member_entropy = 0.0;
    for (p, rho) in ensemble {
        if *p < 0.0 {
            return Err(Error::InvalidParameter(format!("negative weight {p}")));
        }
        if rho.dim() != dim {
            return Err(Error::DimensionMismatch(
                "ensemble members differ in dimension".into(),
            ));
        }
        average.add_scaled(rho, *p);
        if *p > 0.0 {
            member_entropy += p * von_neumann_entropy(rho)?;
        }
    }
    let chi = von_neumann_entropy(&average)? - member_entropy;
    if chi < -1e-9 {
        return Err(Error::InvalidParameter(format!(
            "Holevo quantity came out negative: {chi}"
        )));
    }
    Ok(chi.max(0.0))
}

/// Full per-point report: informations from the measured joint distribution,
/// Holevo bounds from the reduced ensembles.
pub fn key_rates(scenario: &ProtocolScenario) -> Result<KeyRateReport> {
    let joint = measure_joint(scenario)?;
    let i_ab = mutual_information(&marginalize(&joint, MarginalPair::AB))?;
    let i_ae = mutual_information(&marginalize(&joint, MarginalPair::AE))?;
    let chi_ae = holevo_bound(&eve_ensemble(scenario)?)?;
    let chi_ab = holevo_bound(&bob_ensemble(scenario)?)?;
    Ok(KeyRateReport {
        lambda: scenario.lambda(),
        i_ab,
        i_ae,
        chi_ae,
        chi_ab,
        k_min: i_ab - chi_ae,
        k_max: i_ab - i_ae,
    })
}

/// Closed form for `I(A:E)` under either damping scenario, in bits:
/// `1 + (1/2) log2(2/(lambda+3)) + (1/4)(lambda+1) log2((lambda+1)/(lambda+3))`.
pub fn closed_form_iae(lambda: f64) -> Result<f64> {
    crate::channel::check_lambda(lambda)?;
    Ok(1.0
        + 0.5 * (2.0 / (lambda + 3.0)).log2()
        + 0.25 * (lambda + 1.0) * ((lambda + 1.0) / (lambda + 3.0)).log2())
}

/// Closed form for `I(A:B)` when both qubits are damped:
/// `(3/4)(1-lambda) log2(4/3)`.
pub fn closed_form_iab_case2(lambda: f64) -> Result<f64> {
    crate::channel::check_lambda(lambda)?;
    Ok(0.75 * (1.0 - lambda) * (4.0_f64 / 3.0).log2())
}

/// The long travel-only `I(A:B)` expression as printed in the literature,
/// evaluated verbatim with base-2 logs.
///
/// Kept only as a documented cross-check: it agrees with the
/// distribution-derived value at `lambda = 0` but drifts away for
/// intermediate damping (0.3046 vs 0.1796 at `lambda = 0.5`). The
/// distribution value is authoritative.
pub fn iab_case1_as_printed(lambda: f64) -> Result<f64> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(Error::InvalidParameter(format!(
            "printed expression is defined on [0, 1), got {lambda}"
        )));
    }
    let s = (1.0 - lambda).sqrt();
    // 0 * log(0) terms are dropped.
    let term = |coeff: f64, num: f64, den: f64| -> Result<f64> {
        if coeff == 0.0 {
            return Ok(0.0);
        }
        let ratio = num / den;
        if !(ratio > 0.0) {
            return Err(Error::InvalidParameter(format!(
                "nonpositive log argument {ratio} at lambda = {lambda}"
            )));
        }
        Ok(coeff * ratio.log2())
    };
    let mut sum = -2.0 * lambda;
    sum += term(
        lambda - 2.0 * (s + 1.0),
        -lambda + 2.0 * s + 2.0,
        -lambda + s + 2.0,
    )?;
    sum += term(lambda - 2.0, lambda - 2.0, lambda - s - 2.0)?;
    sum += term(lambda - 2.0, lambda - 2.0, lambda + s - 2.0)?;
    sum += term(lambda, lambda + 2.0 * s - 2.0, lambda + s - 2.0)?;
    sum += term(2.0 * (s - 1.0), lambda + 2.0 * s - 2.0, lambda + s - 2.0)?;
    Ok(-sum / 8.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::layout::SystemLayout;
    use crate::protocol::closed_form_joint;
    use crate::state::Ket;
    use approx::assert_abs_diff_eq;

    const NOISELESS_INFO: f64 = 0.311278124459133; // 3/2 - (3/4) log2(3)

    #[test]
    fn noiseless_marginals() {
        let joint = closed_form_joint(&ProtocolScenario::Noiseless).unwrap();
        let ab = marginalize(&joint, MarginalPair::AB);
        assert_abs_diff_eq!(ab[0][0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ab[1][0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(ab[1][1], 0.25, epsilon = 1e-15);

        let ae = marginalize(&joint, MarginalPair::AE);
        assert_abs_diff_eq!(ae[0][0], 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(ae[1][0], 0.25, epsilon = 1e-15);
        assert_abs_diff_eq!(ae[1][1], 0.25, epsilon = 1e-15);

        for pair in [MarginalPair::AB, MarginalPair::AE, MarginalPair::EB] {
            let m = marginalize(&joint, pair);
            let total: f64 = m.iter().flatten().sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn independent_distribution_has_zero_information() {
        let p = vec![vec![0.25, 0.25], vec![0.25, 0.25]];
        assert_abs_diff_eq!(mutual_information(&p).unwrap(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unnormalized_input_is_rejected() {
        let p = vec![vec![0.3, 0.3]];
        assert!(matches!(
            mutual_information(&p),
            Err(Error::NotNormalized(_))
        ));
    }

    #[test]
    fn noiseless_information_values() {
        let joint = closed_form_joint(&ProtocolScenario::Noiseless).unwrap();
        let i_ab = mutual_information(&marginalize(&joint, MarginalPair::AB)).unwrap();
        assert_abs_diff_eq!(i_ab, NOISELESS_INFO, epsilon = 1e-12);
    }

    #[test]
    fn case1_information_at_half_damping() {
        let joint = closed_form_joint(&ProtocolScenario::Case1TravelOnly { lambda: 0.5 }).unwrap();
        let i_ab = mutual_information(&marginalize(&joint, MarginalPair::AB)).unwrap();
        assert_abs_diff_eq!(i_ab, 0.179635062021674, epsilon = 1e-12);
    }

    #[test]
    fn holevo_of_identical_members_vanishes() {
        let layout = SystemLayout::single("q", 2).unwrap();
        let rho = Ket::basis(layout, &[0]).unwrap().outer();
        let chi = holevo_bound(&[(0.5, rho.clone()), (0.5, rho)]).unwrap();
        assert_abs_diff_eq!(chi, 0.0, epsilon = 1e-12);
    }

    #[test]
    fn holevo_of_orthogonal_pure_states_is_one_bit() {
        let layout = SystemLayout::single("q", 2).unwrap();
        let zero = Ket::basis(layout.clone(), &[0]).unwrap().outer();
        let one = Ket::basis(layout, &[1]).unwrap().outer();
        let chi = holevo_bound(&[(0.5, zero), (0.5, one)]).unwrap();
        assert_abs_diff_eq!(chi, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn noiseless_eve_holevo() {
        let chi =
            holevo_bound(&crate::protocol::eve_ensemble(&ProtocolScenario::Noiseless).unwrap())
                .unwrap();
        assert_abs_diff_eq!(chi, NOISELESS_INFO, epsilon = 1e-9);
    }

    #[test]
    fn noiseless_key_rates_vanish() {
        let report = key_rates(&ProtocolScenario::Noiseless).unwrap();
        assert_abs_diff_eq!(report.i_ab, NOISELESS_INFO, epsilon = 1e-9);
        assert_abs_diff_eq!(report.i_ae, NOISELESS_INFO, epsilon = 1e-9);
        assert_abs_diff_eq!(report.chi_ae, NOISELESS_INFO, epsilon = 1e-9);
        assert_abs_diff_eq!(report.k_min, 0.0, epsilon = 1e-9);
        assert_abs_diff_eq!(report.k_max, 0.0, epsilon = 1e-9);
        report.check().unwrap();
    }

    #[test]
    fn closed_form_iae_values() {
        assert_abs_diff_eq!(
            closed_form_iae(0.0).unwrap(),
            NOISELESS_INFO,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            closed_form_iae(0.5).unwrap(),
            0.137925380970030,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(closed_form_iae(1.0).unwrap(), 0.0, epsilon = 1e-12);
        assert!(closed_form_iae(1.5).is_err());
    }

    #[test]
    fn closed_form_iab_case2_values() {
        assert_abs_diff_eq!(
            closed_form_iab_case2(0.0).unwrap(),
            NOISELESS_INFO,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            closed_form_iab_case2(0.5).unwrap(),
            NOISELESS_INFO / 2.0,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(closed_form_iab_case2(1.0).unwrap(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn printed_case1_expression_values() {
        assert_abs_diff_eq!(
            iab_case1_as_printed(0.0).unwrap(),
            NOISELESS_INFO,
            epsilon = 1e-12
        );
        assert_abs_diff_eq!(
            iab_case1_as_printed(0.5).unwrap(),
            0.304635062021673,
            epsilon = 1e-12
        );
        // Limit toward full damping is 1/4, far from the distribution's 0.
        assert_abs_diff_eq!(
            iab_case1_as_printed(1.0 - 1e-9).unwrap(),
            0.25,
            epsilon = 1e-6
        );
        assert!(iab_case1_as_printed(1.0).is_err());
    }

    #[test]
    fn key_rate_spot_values() {
        let case1 = key_rates(&ProtocolScenario::Case1TravelOnly { lambda: 0.5 }).unwrap();
        assert_abs_diff_eq!(case1.k_max, 0.041709681051644, epsilon = 1e-9);
        let case2 = key_rates(&ProtocolScenario::Case2BothQubits { lambda: 0.5 }).unwrap();
        assert_abs_diff_eq!(case2.k_max, 0.017713681259537, epsilon = 1e-9);
    }

    #[test]
    fn report_check_catches_corruption() {
        let mut report = key_rates(&ProtocolScenario::Case1TravelOnly { lambda: 0.3 }).unwrap();
        report.check().unwrap();
        report.i_ab = f64::NAN;
        assert!(report.check().is_err());
    }
}
