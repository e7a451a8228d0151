#pragma once
#include <cmath>
#include <limits>

#include "spanledger/errors.hpp"

// Unit conversions at the engineering/SI boundary. Everything downstream of
// these helpers works in strict SI (m, s, Hz, W).
namespace spanledger {

inline constexpr double speed_of_light = 2.99792458e8;   // m/s
inline constexpr double planck_h = 6.62607015e-34;       // J*s
inline constexpr double default_wavelength = 1550e-9;    // m, C-band center

inline double db_to_linear(double x_db) {
    return std::pow(10.0, x_db / 10.0);
}

inline double linear_to_db(double x) {
    if (!(x > 0.0))
        throw model_error("linear_to_db: argument must be positive");
    return 10.0 * std::log10(x);
}

// D [s/m^2] -> beta2 [s^2/m]; negative for D > 0 (anomalous dispersion)
inline double beta2_from_D(double D, double wavelength) {
    if (!std::isfinite(D) || !std::isfinite(wavelength) || wavelength <= 0.0)
        throw model_error("beta2_from_D: non-finite or non-positive input");
    return -D * wavelength * wavelength / (2.0 * M_PI * speed_of_light);
}

inline double D_from_beta2(double beta2, double wavelength) {
    if (!std::isfinite(beta2) || !std::isfinite(wavelength) || wavelength <= 0.0)
        throw model_error("D_from_beta2: non-finite or non-positive input");
    return -beta2 * 2.0 * M_PI * speed_of_light / (wavelength * wavelength);
}

// engineering ps/nm/km -> SI s/m^2
inline double dispersion_si(double ps_nm_km) { return ps_nm_km * 1e-6; }

// engineering dB/km -> SI field/power attenuation coefficient 1/m (power convention)
inline double attenuation_si(double db_per_km) {
    return db_per_km * std::log(10.0) / 10.0 / 1e3;
}

inline double dbm_to_watt(double dbm) { return 1e-3 * db_to_linear(dbm); }
inline double watt_to_dbm(double w) { return linear_to_db(w / 1e-3); }

}  // namespace spanledger
