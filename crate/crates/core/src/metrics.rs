//! Closed-form figures of merit: power-delay product and the dynamic plus
//! static power decomposition.

use serde::{Deserialize, Serialize};

/// Power-delay product in joules: average power times worst-case delay.
pub fn pdp(delay_s: f64, power_w: f64) -> f64 {
    power_w * delay_s
}

/// Inputs of the `a·C·f·V² + I_static·V` power model, all in SI units.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub activity: f64,
    pub load_farads: f64,
    pub frequency_hz: f64,
    pub supply_volts: f64,
    pub static_amps: f64,
}

impl PowerBreakdown {
    pub fn is_valid(&self) -> bool {
        [
            self.activity,
            self.load_farads,
            self.frequency_hz,
            self.supply_volts,
            self.static_amps,
        ]
        .iter()
        .all(|v| v.is_finite() && *v >= 0.0)
    }

    pub fn dynamic_watts(&self) -> f64 {
        self.activity * self.load_farads * self.frequency_hz * self.supply_volts * self.supply_volts
    }

    pub fn static_watts(&self) -> f64 {
        self.static_amps * self.supply_volts
    }
}

pub fn power_total(p: &PowerBreakdown) -> f64 {
    p.dynamic_watts() + p.static_watts()
}

/// Relative reduction `(old - new) / old` in percent.
pub fn improvement_percent(old: f64, new: f64) -> f64 {
    if old == 0.0 {
        return 0.0;
    }
    (old - new) / old * 100.0
}

#[cfg(test)]
mod tests {
    use super::*;

    const PS: f64 = 1e-12;
    const UW: f64 = 1e-6;
    const FJ: f64 = 1e-15;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn pdp_reported_rows() {
        assert!(rel(pdp(67.210 * PS, 6.2825 * UW), 0.4223 * FJ) < 5e-4);
        assert!(rel(pdp(165.74 * PS, 4.1627 * UW), 0.6899 * FJ) < 5e-4);
        assert_eq!(pdp(0.0, 5.0 * UW), 0.0);
    }

    #[test]
    fn power_model_terms() {
        let dynamic = PowerBreakdown {
            activity: 1.0,
            load_farads: 2e-15,
            frequency_hz: 1e9,
            supply_volts: 0.9,
            static_amps: 0.0,
        };
        // 1 * 2e-15 * 1e9 * 0.81
        assert!((power_total(&dynamic) - 1.62e-6).abs() < 1e-15);

        let idle = PowerBreakdown { activity: 0.0, ..dynamic };
        assert_eq!(power_total(&idle), 0.0);

        let leaky = PowerBreakdown { static_amps: 1e-6, ..idle };
        assert!((power_total(&leaky) - 0.9e-6).abs() < 1e-15);
        assert!(leaky.is_valid());
        assert!(!PowerBreakdown { activity: -1.0, ..leaky }.is_valid());
    }

    #[test]
    fn static_term_ignores_load_and_frequency() {
        let base = PowerBreakdown {
            activity: 0.3,
            load_farads: 2e-15,
            frequency_hz: 1e9,
            supply_volts: 0.9,
            static_amps: 3e-6,
        };
        for (c, f) in [(1e-15, 1e8), (8e-15, 5e9), (0.0, 0.0)] {
            let p = PowerBreakdown { load_farads: c, frequency_hz: f, ..base };
            assert_eq!(p.static_watts(), base.static_watts());
        }
    }

    #[test]
    fn improvement_examples() {
        assert!((improvement_percent(106.0, 74.0) - 30.2).abs() < 0.05);
        assert!((improvement_percent(132.0, 76.0) - 42.4).abs() < 0.05);
        assert!((improvement_percent(1130.0, 266.0) - 76.5).abs() < 0.05);
    }
}
