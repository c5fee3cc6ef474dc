//! Unit system and conversions.
//!
//! Internally: time in ps, angular frequency in rad/ps, temperature in K,
//! length in nm. Rates quoted in GHz or MHz are plain rates, so
//! 850 MHz enters as 8.5e-4 ps⁻¹.

/// k_B/ħ in rad ps⁻¹ K⁻¹.
pub const K_B_OVER_HBAR: f64 = 0.130920;

/// ħ in µeV·ps; multiplies rad/ps to give µeV.
pub const HBAR_UEV_PS: f64 = 658.211_956_9;

/// Vacuum speed of light in nm/ps.
pub const SPEED_OF_LIGHT_NM_PER_PS: f64 = 299_792.458;

/// Inverse temperature β = ħ/(k_B T) in ps/rad; `None` at T = 0.
pub fn beta(temperature: f64) -> Option<f64> {
    if temperature > 0.0 {
        Some(1.0 / (K_B_OVER_HBAR * temperature))
    } else {
        None
    }
}

pub fn rad_per_ps_to_uev(omega: f64) -> f64 {
    omega * HBAR_UEV_PS
}

pub fn uev_to_rad_per_ps(energy: f64) -> f64 {
    energy / HBAR_UEV_PS
}

pub fn ghz_to_per_ps(rate: f64) -> f64 {
    rate * 1e-3
}

pub fn per_ps_to_ghz(rate: f64) -> f64 {
    rate * 1e3
}

pub fn mhz_to_per_ps(rate: f64) -> f64 {
    rate * 1e-6
}

/// Vacuum angular frequency for a vacuum wavelength in nm.
pub fn wavelength_to_omega(wavelength_nm: f64) -> f64 {
    2.0 * std::f64::consts::PI * SPEED_OF_LIGHT_NM_PER_PS / wavelength_nm
}
