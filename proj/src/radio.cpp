#include "eehc/radio.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace eehc {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require(bool ok, const char* field, const char* rule) {
  if (!ok) {
    throw std::invalid_argument(std::string("radio.") + field + ": " + rule);
  }
}

}  // namespace

double db_to_linear(double db) {
  if (!std::isfinite(db)) {
    throw std::invalid_argument("db_to_linear: non-finite input");
  }
  return std::pow(10.0, db / 10.0);
}

double RadioParams::snr_min_linear() const { return db_to_linear(snr_min_db); }

double RadioParams::noise_factor_linear() const {
  return db_to_linear(noise_factor_db);
}

void RadioParams::validate() const {
  require(std::isfinite(snr_min_db), "snr_min_db", "must be finite");
  require(std::isfinite(noise_factor_db), "noise_factor_db", "must be finite");
  require(thermal_noise_floor > 0 && std::isfinite(thermal_noise_floor),
          "thermal_noise_floor", "must be > 0");
  require(bandwidth_hz > 0 && std::isfinite(bandwidth_hz), "bandwidth_hz",
          "must be > 0");
  require(wavelength_m > 0 && std::isfinite(wavelength_m), "wavelength_m",
          "must be > 0");
  require(antenna_gain_product > 0 && std::isfinite(antenna_gain_product),
          "antenna_gain_product", "must be > 0");
  require(pa_efficiency > 0 && pa_efficiency <= 1, "pa_efficiency",
          "must be in (0, 1]");
  require(path_loss_exponent >= 2 && path_loss_exponent <= 6,
          "path_loss_exponent", "must be in [2, 6]");
  require(bit_rate > 0 && std::isfinite(bit_rate), "bit_rate", "must be > 0");
  require(electronics_power_w >= 0 && std::isfinite(electronics_power_w),
          "electronics_power_w", "must be >= 0");
  require(elec_energy_per_bit >= 0 && std::isfinite(elec_energy_per_bit),
          "elec_energy_per_bit", "must be >= 0");
  require(beamform_energy_per_bit >= 0 && std::isfinite(beamform_energy_per_bit),
          "beamform_energy_per_bit", "must be >= 0");
  require(long_range_amp >= 0 && std::isfinite(long_range_amp),
          "long_range_amp", "must be >= 0");
  require(reference_distance_m > 0 && std::isfinite(reference_distance_m),
          "reference_distance_m", "must be > 0");
}

double receiver_sensitivity(const RadioParams& p) {
  p.validate();
  return p.snr_min_linear() * p.noise_factor_linear() * p.thermal_noise_floor *
         p.bandwidth_hz;
}

namespace {

// (4*pi/w)^alpha * (1/d_o)^alpha / (G * eta): everything in the amplifier
// draw that does not depend on distance or sensitivity. With the default
// d_o = 0.1 and alpha = 2 the reference-distance term contributes 100.
double amp_factor(const RadioParams& p) {
  return std::pow(4.0 * kPi / p.wavelength_m, p.path_loss_exponent) *
         std::pow(1.0 / p.reference_distance_m, p.path_loss_exponent) /
         (p.antenna_gain_product * p.pa_efficiency);
}

void check_distance(double d) {
  if (!(d >= 0) || !std::isfinite(d)) {
    throw std::invalid_argument("distance_m: must be finite and >= 0");
  }
}

void check_bits(double bits) {
  if (!(bits >= 0) || !std::isfinite(bits)) {
    throw std::invalid_argument("bits: must be finite and >= 0");
  }
}

}  // namespace

double pa_power(const RadioParams& p, double distance_m) {
  check_distance(distance_m);
  return receiver_sensitivity(p) * amp_factor(p) *
         std::pow(distance_m, p.path_loss_exponent);
}

double tx_total_power(const RadioParams& p, double distance_m) {
  return pa_power(p, distance_m) + p.electronics_power_w;
}

double per_bit_energy(const RadioParams& p, double distance_m) {
  return pa_power(p, distance_m) / p.bit_rate;
}

double tx_energy(const RadioParams& p, double bits, double distance_m,
                 RangeClass range) {
  check_bits(bits);
  check_distance(distance_m);
  if (range == RangeClass::kLong) {
    p.validate();
    const double d2 = distance_m * distance_m;
    return bits * p.elec_energy_per_bit + bits * p.long_range_amp * d2 * d2;
  }
  return bits * p.elec_energy_per_bit + bits * per_bit_energy(p, distance_m);
}

double rx_energy(const RadioParams& p, double bits) {
  check_bits(bits);
  p.validate();
  return bits * (p.elec_energy_per_bit + p.beamform_energy_per_bit);
}

}  // namespace eehc
