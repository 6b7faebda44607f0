use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};

use crate::codec::{effective_channels, optimal_channels};
use crate::error::{invalid, Result};

/// Link parameters for the capacity estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CapacityParams {
    /// Modulation bandwidth in Hz.
    pub bandwidth: f64,
    /// Channel spacing in Hz.
    pub spacing: f64,
    /// Integration time per symbol in seconds.
    pub window: f64,
    /// Simultaneous tones per symbol.
    pub components: u64,
    /// Symbol error rate.
    pub error_rate: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CapacityReport {
    pub m_opt: u64,
    pub m_max: BigUint,
    pub raw_bps: f64,
    pub effective_bps: f64,
    pub p_e: f64,
    pub entropy_term: f64,
}

impl CapacityReport {
    pub const CSV_HEADER: &'static str = "m_opt,m_max,raw_bps,effective_bps,p_e,entropy_term";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.m_opt, self.m_max, self.raw_bps, self.effective_bps, self.p_e, self.entropy_term
        )
    }
}

/// `log₂ n` for arbitrarily large `n`; `-inf` for zero.
pub fn log2_big(n: &BigUint) -> f64 {
    let bits = n.bits();
    if bits == 0 {
        return f64::NEG_INFINITY;
    }
    if bits <= 1000 {
        return n.to_f64().map_or(f64::INFINITY, f64::log2);
    }
    // keep the top 64 bits as the mantissa
    let shift = bits - 64;
    let top = (n >> shift).to_u64().unwrap_or(u64::MAX);
    (top as f64).log2() + shift as f64
}

/// Binary entropy in bits.
pub fn binary_entropy(p: f64) -> f64 {
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * x.log2() };
    term(p) + term(1.0 - p)
}

/// Entropy written with base-`M` logarithms rescaled by `log₂ M`. Equal to
/// [`binary_entropy`] up to rounding for every `M ≥ 2`.
pub fn literal_entropy(p: f64, m_max: &BigUint) -> f64 {
    let log2_m = log2_big(m_max);
    let log_m = |x: f64| x.log2() / log2_m;
    let term = |x: f64| if x <= 0.0 { 0.0 } else { -x * log_m(x) };
    (term(p) + term(1.0 - p)) * log2_m
}

pub fn capacity(params: &CapacityParams) -> Result<CapacityReport> {
    let CapacityParams { bandwidth, spacing, window, components, error_rate } = *params;
    if !(window.is_finite() && window > 0.0) {
        return Err(invalid(format!("integration time must be positive, got {window}")));
    }
    if !(0.0..=1.0).contains(&error_rate) {
        return Err(invalid(format!("error rate must lie in [0, 1], got {error_rate}")));
    }
    let m_opt = optimal_channels(bandwidth, spacing)?;
    let m_max = effective_channels(m_opt, components)?;
    let raw_bps = log2_big(&m_max) / window;
    let p_e = if m_max.is_one() {
        0.0
    } else {
        let ratio = 1.0 + 1.0 / (&m_max - 1u32).to_f64().unwrap_or(f64::INFINITY);
        (error_rate * ratio / 2.0).min(1.0)
    };
    let entropy_term = binary_entropy(p_e);
    Ok(CapacityReport { m_opt, m_max, raw_bps, effective_bps: raw_bps * (1.0 - entropy_term), p_e, entropy_term })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn params(k: u64, e: f64) -> CapacityParams {
        CapacityParams { bandwidth: 1e9, spacing: 1e3, window: 1e-3, components: k, error_rate: e }
    }

    #[test]
    fn gigahertz_band_figures() {
        let three = capacity(&params(3, 0.0)).unwrap();
        assert_eq!(three.m_opt, 1_000_001);
        // C(1000001, 3) = 1000001 · 1000000 · 999999 / 6
        let expected = BigUint::from(1_000_001u64) * 1_000_000u64 * 999_999u64 / 6u32;
        assert_eq!(three.m_max, expected);
        assert!((three.effective_bps / 57.2e3 - 1.0).abs() < 0.005, "{}", three.effective_bps);
        assert_eq!(three.effective_bps, three.raw_bps);

        let one = capacity(&params(1, 0.0)).unwrap();
        assert!((one.raw_bps - 1_000_001f64.log2() * 1e3).abs() < 1e-6);
        assert!((one.raw_bps - 19.93e3).abs() < 5.0);
    }

    #[test]
    fn one_bit_per_window() {
        // two channels, one tone
        let r = capacity(&CapacityParams { bandwidth: 1e3, spacing: 1e3, window: 1e-3, components: 1, error_rate: 0.0 })
            .unwrap();
        assert_eq!(r.m_max, BigUint::from(2u32));
        assert_eq!(r.raw_bps, 1e3);
        assert_eq!(r.effective_bps, 1e3);
    }

    #[test]
    fn invalid_parameters() {
        assert!(capacity(&params(0, 0.0)).is_err());
        assert!(capacity(&params(1_000_002, 0.0)).is_err());
        assert!(capacity(&params(1, 1.5)).is_err());
        assert!(capacity(&CapacityParams { window: 0.0, ..params(1, 0.0) }).is_err());
    }

    #[test]
    fn big_log_matches_exact_powers() {
        for e in [0u32, 1, 63, 64, 65, 1000, 1001, 5000] {
            let n = BigUint::one() << e;
            assert_eq!(log2_big(&n), e as f64);
        }
        let n = (BigUint::one() << 3000u32) * 3u32;
        assert!((log2_big(&n) - (3000.0 + 3f64.log2())).abs() < 1e-9);
        assert_eq!(log2_big(&BigUint::default()), f64::NEG_INFINITY);
    }

    #[test]
    fn entropy_forms_agree() {
        for m in [2u64, 3, 11, 1_000_001] {
            let m = BigUint::from(m);
            for p in [0.0, 1e-9, 1e-5, 0.1, 0.25, 0.5, 0.9] {
                assert!((literal_entropy(p, &m) - binary_entropy(p)).abs() < 1e-12);
            }
        }
        assert_eq!(binary_entropy(0.5), 1.0);
        assert_eq!(binary_entropy(0.0), 0.0);
    }

    proptest! {
        #[test]
        fn effective_nonincreasing_in_error(k in 1u64..6, e in 0.0f64..0.9, de in 0.0f64..0.1) {
            let a = capacity(&params(k, e)).unwrap();
            let b = capacity(&params(k, e + de)).unwrap();
            prop_assert!(a.effective_bps <= a.raw_bps);
            prop_assert!((0.0..=1.0).contains(&a.p_e));
            if b.p_e <= 0.5 {
                prop_assert!(b.effective_bps <= a.effective_bps);
            }
        }
    }
}
