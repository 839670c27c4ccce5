//! Synthetic five-city KPI data: trend, annual seasonality, a pandemic-style
//! collapse with logistic recovery, and multiplicative Gaussian noise.
//!
//! RevPAR is derived as `OCC / 100 * ADR`, so the accounting identity holds
//! exactly for every generated month.

use std::f64::consts::PI;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::month::MonthIndex;
use crate::series::{KpiKind, KpiSeries};

pub const MIN_MONTHS: usize = 24;
/// Months from shock onset to trough.
pub const COLLAPSE_MONTHS: i64 = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct CityProfile {
    pub name: String,
    pub base_occ: f64,
    pub base_adr: f64,
    /// Amplitude of the annual OCC sinusoid, percentage points.
    pub occ_seasonal_amp: f64,
    /// Amplitude of the annual ADR sinusoid, currency units.
    pub adr_seasonal_amp: f64,
    /// Compound growth per year applied to both base levels.
    pub annual_trend: f64,
    pub shock_start: MonthIndex,
    /// Trough multiplier on OCC, in (0, 1]. 1 disables the shock.
    pub occ_shock_floor: f64,
    /// Trough multiplier on ADR, in (0, 1].
    pub adr_shock_floor: f64,
    pub recovery_months: u32,
    /// Level the shock multiplier recovers to; above 1 models post-shock growth.
    pub recovery_level: f64,
    /// Extra ADR multiplier applied in December, January and February
    /// (peak-season events).
    pub event_boost: f64,
    /// Standard deviation of the multiplicative noise on OCC and ADR.
    pub noise_sigma: f64,
    pub seed: u64,
}

impl CityProfile {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::InvalidConfig(format!("{}: {m}", self.name)));
        if !(self.base_occ > 0.0 && self.base_occ <= 100.0 && self.base_adr > 0.0) {
            return bad("base values must be positive and OCC at most 100");
        }
        for f in [self.occ_shock_floor, self.adr_shock_floor] {
            if !(f > 0.0 && f <= 1.0) {
                return bad("shock floors must lie in (0, 1]");
            }
        }
        if self.recovery_months < 1 {
            return bad("recovery_months must be >= 1");
        }
        if !(self.recovery_level > 0.0) || !(self.noise_sigma >= 0.0) || self.event_boost <= -1.0 {
            return bad("recovery_level > 0, noise_sigma >= 0 and event_boost > -1 required");
        }
        Ok(())
    }

    /// Shock multiplier at `month` for a given trough floor.
    ///
    /// 1 before onset, linear descent to `floor` over [`COLLAPSE_MONTHS`], then a
    /// logistic climb to `recovery_level` over `recovery_months`.
    pub fn shock_factor(&self, month: MonthIndex, floor: f64) -> f64 {
        if floor >= 1.0 {
            return 1.0;
        }
        let k = self.shock_start.months_until(month);
        if k <= 0 {
            return 1.0;
        }
        if k <= COLLAPSE_MONTHS {
            return 1.0 - (1.0 - floor) * k as f64 / COLLAPSE_MONTHS as f64;
        }
        let tau = (k - COLLAPSE_MONTHS) as f64;
        let r = self.recovery_months as f64;
        // 1% and 99% of the climb land at tau = 0 and tau = r
        let steep = 2.0 * 99f64.ln() / r;
        let logistic = |t: f64| 1.0 / (1.0 + (-steep * (t - r / 2.0)).exp());
        let l0 = logistic(0.0);
        let progress = (logistic(tau) - l0) / (1.0 - l0);
        floor + (self.recovery_level - floor) * progress
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CityData {
    pub occ: KpiSeries<f64>,
    pub adr: KpiSeries<f64>,
    pub revpar: KpiSeries<f64>,
}

impl CityData {
    pub fn series(&self) -> [&KpiSeries<f64>; 3] {
        [&self.occ, &self.adr, &self.revpar]
    }

    pub fn into_series(self) -> [KpiSeries<f64>; 3] {
        [self.occ, self.adr, self.revpar]
    }
}

pub fn generate_city(
    profile: &CityProfile,
    start: MonthIndex,
    n_months: usize,
) -> Result<CityData> {
    if n_months < MIN_MONTHS {
        return Err(Error::SeriesTooShort {
            len: n_months,
            needed: MIN_MONTHS,
        });
    }
    profile.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let noise = Normal::new(0.0, profile.noise_sigma)
        .map_err(|e| Error::InvalidConfig(format!("{}: {e}", profile.name)))?;

    let mut occ = Vec::with_capacity(n_months);
    let mut adr = Vec::with_capacity(n_months);
    let mut revpar = Vec::with_capacity(n_months);
    for t in 0..n_months {
        let month = start.offset(t as i64);
        let growth = (1.0 + profile.annual_trend).powf(t as f64 / 12.0);
        let season = (2.0 * PI * t as f64 / 12.0).sin();
        let (e_occ, e_adr) = (noise.sample(&mut rng), noise.sample(&mut rng));

        let o = (profile.base_occ * growth + profile.occ_seasonal_amp * season)
            * profile.shock_factor(month, profile.occ_shock_floor)
            * (1.0 + e_occ);
        let o = o.clamp(1.0, 100.0);

        let event = if matches!(month.month(), 12 | 1 | 2) {
            1.0 + profile.event_boost
        } else {
            1.0
        };
        let a = (profile.base_adr * growth + profile.adr_seasonal_amp * season)
            * event
            * profile.shock_factor(month, profile.adr_shock_floor)
            * (1.0 + e_adr);
        let a = a.max(1.0);

        occ.push(o);
        adr.push(a);
        revpar.push(o / 100.0 * a);
    }
    let name = profile.name.as_str();
    Ok(CityData {
        occ: KpiSeries::from_values(name, KpiKind::Occ, start, &occ)?,
        adr: KpiSeries::from_values(name, KpiKind::Adr, start, &adr)?,
        revpar: KpiSeries::from_values(name, KpiKind::Revpar, start, &revpar)?,
    })
}

/// Five archetypes loosely calibrated to the pre-shock levels, trough depths and
/// recovery speeds reported for Manchester, Amsterdam, Dubai, Bangkok and Mumbai.
pub fn default_archetypes() -> Vec<CityProfile> {
    let shock = MonthIndex::new(2020, 3).expect("valid month");
    let city = |name: &str, seed: u64| CityProfile {
        name: name.to_string(),
        base_occ: 75.0,
        base_adr: 100.0,
        occ_seasonal_amp: 5.0,
        adr_seasonal_amp: 5.0,
        annual_trend: 0.0,
        shock_start: shock,
        occ_shock_floor: 0.5,
        adr_shock_floor: 0.7,
        recovery_months: 24,
        recovery_level: 1.0,
        event_boost: 0.0,
        noise_sigma: 0.01,
        seed,
    };
    vec![
        // mature domestic market: shallow, steady
        CityProfile {
            base_occ: 77.0,
            base_adr: 98.0,
            occ_seasonal_amp: 3.0,
            adr_seasonal_amp: 4.0,
            annual_trend: 0.015,
            occ_shock_floor: 0.45,
            adr_shock_floor: 0.74,
            recovery_months: 26,
            recovery_level: 1.05,
            noise_sigma: 0.008,
            ..city("Manchester", 101)
        },
        // premium European hub: deep shock, slow and incomplete recovery
        CityProfile {
            base_occ: 82.0,
            base_adr: 160.0,
            occ_seasonal_amp: 5.0,
            adr_seasonal_amp: 14.0,
            annual_trend: 0.01,
            occ_shock_floor: 0.33,
            adr_shock_floor: 0.55,
            recovery_months: 36,
            recovery_level: 0.95,
            noise_sigma: 0.012,
            ..city("Amsterdam", 102)
        },
        // luxury hub: deep shock, fast recovery, winter event spikes
        CityProfile {
            base_occ: 78.0,
            base_adr: 150.0,
            occ_seasonal_amp: 6.0,
            adr_seasonal_amp: 12.0,
            annual_trend: 0.02,
            occ_shock_floor: 0.22,
            adr_shock_floor: 0.67,
            recovery_months: 18,
            recovery_level: 1.1,
            event_boost: 0.08,
            noise_sigma: 0.015,
            ..city("Dubai", 103)
        },
        // tourism-dependent: deepest shock, slow recovery, strong seasonality
        CityProfile {
            base_occ: 78.0,
            base_adr: 98.0,
            occ_seasonal_amp: 7.0,
            adr_seasonal_amp: 8.0,
            annual_trend: 0.01,
            occ_shock_floor: 0.22,
            adr_shock_floor: 0.67,
            recovery_months: 40,
            recovery_level: 1.0,
            noise_sigma: 0.02,
            ..city("Bangkok", 104)
        },
        // emerging market: moderate base, strong post-shock growth
        CityProfile {
            base_occ: 76.0,
            base_adr: 122.0,
            occ_seasonal_amp: 3.0,
            adr_seasonal_amp: 6.0,
            annual_trend: 0.02,
            occ_shock_floor: 0.52,
            adr_shock_floor: 0.47,
            recovery_months: 24,
            recovery_level: 1.15,
            noise_sigma: 0.012,
            ..city("Mumbai", 105)
        },
    ]
}

/// Default archetypes with every profile seed offset by `seed`.
pub fn seeded_archetypes(seed: u64) -> Vec<CityProfile> {
    default_archetypes()
        .into_iter()
        .map(|p| CityProfile {
            seed: p.seed.wrapping_add(seed.wrapping_mul(1_000)),
            ..p
        })
        .collect()
}
