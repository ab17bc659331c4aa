//! Entropy and mutual-information formulas, the `I(A:B) > I(A:E)` security
//! margin and its detection-probability threshold.
//!
//! All quantities are in bits.

use std::f64::consts::FRAC_PI_4;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Bisection bracket for [`detection_threshold`].
pub const THRESHOLD_BRACKET: (f64, f64) = (0.01, 0.49);

fn check_probability(p: f64, what: &str) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::invalid(format!("{what} = {p} outside [0, 1]")))
    }
}

/// `x·log₂x` with the `0·log₂0 = 0` limit.
fn xlog2x(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        x * x.log2()
    }
}

/// `H(p) = −p·log₂p − (1−p)·log₂(1−p)`.
pub fn binary_entropy(p: f64) -> Result<f64> {
    check_probability(p, "probability")?;
    Ok(-xlog2x(p) - xlog2x(1.0 - p))
}

fn check_half(d: f64) -> Result<()> {
    if (0.0..=0.5).contains(&d) {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "detection probability {d} outside [0, 1/2]"
        )))
    }
}

/// Maximal information an attacker gains at detection probability `d`,
/// on the monotone branch `0 ≤ d ≤ 1/2`.
pub fn eve_info_bound(d: f64) -> Result<f64> {
    check_half(d)?;
    binary_entropy(d)
}

/// Information available to the measure-resend attacker whose resent state
/// yields detection probability `d_m`. Same functional form as
/// [`eve_info_bound`]: the measurement attack saturates the bound.
pub fn eve_info_measurement(d_m: f64) -> Result<f64> {
    check_half(d_m)?;
    binary_entropy(d_m)
}

/// Bob's information under the symmetric entangling attack with angle
/// `α ∈ [0, π/4]`: `1 − H(sin²α)`.
pub fn bob_info_symmetric(alpha: f64) -> Result<f64> {
    if !(0.0..=FRAC_PI_4).contains(&alpha) {
        return Err(Error::invalid(format!("alpha = {alpha} outside [0, π/4]")));
    }
    Ok(1.0 - binary_entropy(alpha.sin().powi(2))?)
}

/// `I(A:B) − I(A:E)` at detection probability `d`; positive means a key
/// can be distilled.
pub fn security_margin(d: f64) -> Result<f64> {
    check_half(d)?;
    let alpha = d.sqrt().asin().min(FRAC_PI_4);
    Ok(bob_info_symmetric(alpha)? - eve_info_bound(d)?)
}

/// Root of [`security_margin`] by bisection on [`THRESHOLD_BRACKET`].
pub fn detection_threshold(tolerance: f64) -> Result<f64> {
    if !(tolerance > 0.0 && tolerance < 0.01) {
        return Err(Error::invalid(format!(
            "tolerance {tolerance} outside (0, 0.01)"
        )));
    }
    let (mut lo, mut hi) = THRESHOLD_BRACKET;
    // margin(lo) > 0 > margin(hi)
    while hi - lo > tolerance {
        let mid = 0.5 * (lo + hi);
        if security_margin(mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Mutual information of the binary symmetric channel obtained by the
/// optimal discrimination of `|↑_n⟩` from `|↓_n⟩`: `1 − H((1 − sin θ)/2)`.
pub fn helstrom_info(theta: f64) -> Result<f64> {
    if !(0.0..=std::f64::consts::FRAC_PI_2).contains(&theta) {
        return Err(Error::invalid(format!("theta = {theta} outside [0, π/2]")));
    }
    let error = ((1.0 - theta.sin()) / 2.0).clamp(0.0, 1.0);
    Ok(1.0 - binary_entropy(error)?)
}

/// Joint counts `counts[a][b]` of a sender bit `a` and a receiver's decoded bit `b`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct JointCounts2x2(pub [[u64; 2]; 2]);

impl JointCounts2x2 {
    pub fn record(&mut self, sent: u8, received: u8) {
        self.0[usize::from(sent & 1)][usize::from(received & 1)] += 1;
    }

    pub fn total(&self) -> u64 {
        self.0.iter().flatten().sum()
    }

    pub fn agreements(&self) -> u64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn merge(&mut self, other: &JointCounts2x2) {
        for a in 0..2 {
            for b in 0..2 {
                self.0[a][b] += other.0[a][b];
            }
        }
    }

    pub fn transposed(&self) -> JointCounts2x2 {
        let c = self.0;
        JointCounts2x2([[c[0][0], c[1][0]], [c[0][1], c[1][1]]])
    }
}

/// Plug-in estimate `Σ p(a,b)·log₂[p(a,b)/(p(a)p(b))]` over nonzero cells.
pub fn empirical_mutual_information(counts: &JointCounts2x2) -> Result<f64> {
    let total = counts.total();
    if total == 0 {
        return Err(Error::invalid("mutual information of empty counts"));
    }
    let n = total as f64;
    let c = counts.0;
    let row = [(c[0][0] + c[0][1]) as f64, (c[1][0] + c[1][1]) as f64];
    let col = [(c[0][0] + c[1][0]) as f64, (c[0][1] + c[1][1]) as f64];
    let mut info = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            if c[a][b] == 0 {
                continue;
            }
            let joint = c[a][b] as f64;
            info += joint / n * (joint * n / (row[a] * col[b])).log2();
        }
    }
    Ok(info.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn entropy_values() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        assert!((binary_entropy(0.11).unwrap() - 0.49999).abs() < 1e-4);
        assert!(binary_entropy(-0.01).is_err());
        assert!(binary_entropy(1.01).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn eve_bounds() {
        assert_eq!(eve_info_bound(0.5).unwrap(), 1.0);
        assert_eq!(eve_info_bound(0.0).unwrap(), 0.0);
        assert!(eve_info_bound(0.1).unwrap() < eve_info_bound(0.3).unwrap());
        assert!(eve_info_bound(0.6).is_err());

        let d_m = (FRAC_PI_2 / 2.0).sin().powi(2);
        assert!((eve_info_measurement(d_m).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(eve_info_measurement(0.0).unwrap(), 0.0);
        for i in 0..100 {
            let x = 0.5 * i as f64 / 99.0;
            assert_eq!(eve_info_measurement(x).unwrap(), eve_info_bound(x).unwrap());
        }
    }

    #[test]
    fn bob_info() {
        assert_eq!(bob_info_symmetric(0.0).unwrap(), 1.0);
        assert!(bob_info_symmetric(FRAC_PI_4).unwrap().abs() < 1e-12);
        let a = 0.11f64.sqrt().asin();
        assert!((bob_info_symmetric(a).unwrap() - 0.5).abs() < 1e-3);
        assert!(bob_info_symmetric(0.8).is_err());
    }

    #[test]
    fn margin_values() {
        assert_eq!(security_margin(0.0).unwrap(), 1.0);
        assert!((security_margin(0.5).unwrap() + 1.0).abs() < 1e-12);
        assert!(security_margin(0.11).unwrap().abs() < 2e-3);
        assert!(security_margin(0.51).is_err());
    }

    #[test]
    fn threshold_root() {
        let d = detection_threshold(1e-6).unwrap();
        assert!((d - 0.110028).abs() < 1e-6, "{d}");
        assert!(security_margin(d - 0.01).unwrap() > 0.0);
        assert!(security_margin(d + 0.01).unwrap() < 0.0);
        assert!(detection_threshold(0.0).is_err());
        assert!(detection_threshold(0.5).is_err());
    }

    #[test]
    fn helstrom_curve() {
        assert!((helstrom_info(FRAC_PI_2).unwrap() - 1.0).abs() < 1e-12);
        assert!(helstrom_info(0.0).unwrap().abs() < 1e-12);
        for i in 1..49 {
            let theta = FRAC_PI_2 * i as f64 / 49.0;
            let concrete = helstrom_info(theta).unwrap();
            let envelope = eve_info_measurement((theta / 2.0).sin().powi(2)).unwrap();
            assert!(concrete < envelope, "theta={theta}");
        }
    }

    #[test]
    fn empirical_mi_examples() {
        let perfect = JointCounts2x2([[500, 0], [0, 500]]);
        assert!((empirical_mutual_information(&perfect).unwrap() - 1.0).abs() < 1e-12);
        let flat = JointCounts2x2([[250, 250], [250, 250]]);
        assert_eq!(empirical_mutual_information(&flat).unwrap(), 0.0);
        let bsc = JointCounts2x2([[450, 50], [50, 450]]);
        let want = 1.0 - binary_entropy(0.1).unwrap();
        assert!((empirical_mutual_information(&bsc).unwrap() - want).abs() < 1e-9);
        assert!((want - 0.531).abs() < 1e-3);
        assert!(empirical_mutual_information(&JointCounts2x2::default()).is_err());
    }

    #[test]
    fn entropy_concave_on_grid() {
        let h = |p| binary_entropy(p).unwrap();
        for i in 0..=100 {
            for j in i..=100 {
                let (a, b) = (i as f64 / 100.0, j as f64 / 100.0);
                assert!(h((a + b) / 2.0) + 1e-12 >= (h(a) + h(b)) / 2.0);
            }
        }
    }

    #[test]
    fn margin_monotone_with_single_root() {
        let mut prev = f64::INFINITY;
        let mut sign_changes = 0;
        for i in 0..=1000 {
            let d = 0.5 * i as f64 / 1000.0;
            let m = security_margin(d).unwrap();
            assert!(m < prev);
            if prev.is_finite() && prev > 0.0 && m <= 0.0 {
                sign_changes += 1;
                assert!(d > 0.10 && d < 0.12);
            }
            prev = m;
        }
        assert_eq!(sign_changes, 1);
    }

    proptest! {
        #[test]
        fn entropy_symmetric(p in 0.0f64..=1.0) {
            let a = binary_entropy(p).unwrap();
            let b = binary_entropy(1.0 - p).unwrap();
            prop_assert!((a - b).abs() < 1e-12);
            prop_assert!((0.0..=1.0).contains(&a));
        }

        #[test]
        fn mi_bounded_and_label_symmetric(c in proptest::array::uniform4(0u64..10_000)) {
            prop_assume!(c.iter().sum::<u64>() > 0);
            let counts = JointCounts2x2([[c[0], c[1]], [c[2], c[3]]]);
            let i = empirical_mutual_information(&counts).unwrap();
            let t = empirical_mutual_information(&counts.transposed()).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&i));
            prop_assert!((i - t).abs() < 1e-12);
        }
    }
}
