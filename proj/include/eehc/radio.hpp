#pragma once

namespace eehc {

// Transceiver energy model for a first-order WSN radio. All quantities SI:
// watts, joules, metres, hertz, bits. Fields carrying decibel values say so
// in the name; everything else is linear.
struct RadioParams {
  double snr_min_db = 10.0;            // minimum S/N at the detector
  double noise_factor_db = 11.0;       // receiver noise figure
  double thermal_noise_floor = 4.17e-21;  // N_o, W/Hz at room temperature
  double bandwidth_hz = 1e6;           // channel bandwidth (1 Hz per bit/s)
  double wavelength_m = 0.328;         // carrier wavelength (915 MHz band)
  double antenna_gain_product = 0.01;  // G_tx * G_rx, linear
  double pa_efficiency = 0.2;          // power amplifier drain efficiency
  double path_loss_exponent = 2.0;     // alpha, short-range model
  double bit_rate = 1e6;               // bits/s
  double electronics_power_w = 3.63e-3;   // P_E: synthesizer + mixer + filters
  double elec_energy_per_bit = 50e-9;     // E_e, J/bit, either direction
  double beamform_energy_per_bit = 5e-9;  // E_bf, J/bit, receive-side combining
  double long_range_amp = 0.0013e-12;     // J/bit/m^4, d^4 amplifier model
  double reference_distance_m = 0.1;      // d_o for the path-loss reference

  double snr_min_linear() const;
  double noise_factor_linear() const;

  // Throws std::invalid_argument naming the offending field.
  void validate() const;
};

// 10^(db/10). Throws std::invalid_argument on non-finite input.
double db_to_linear(double db);

// Minimum detectable signal power at the receiver input, watts:
// lin(S/N) * lin(NF) * N_o * BW.
double receiver_sensitivity(const RadioParams& p);

// Power amplifier draw needed to hit receiver sensitivity at distance d:
// sensitivity * (4*pi/wavelength)^alpha * (d/d_o)^alpha
//   / (gain_product * efficiency). Zero at d = 0.
double pa_power(const RadioParams& p, double distance_m);

// Whole-transmitter draw: pa_power + electronics_power_w.
double tx_total_power(const RadioParams& p, double distance_m);

// Short-range amplifier energy per bit: pa_power / bit_rate. Distance
// dependent (grows as d^alpha); do not multiply by a distance power again.
double per_bit_energy(const RadioParams& p, double distance_m);

enum class RangeClass { kShort, kLong };

// Energy to push `bits` over `distance_m`:
//   short: bits * (elec_energy_per_bit + per_bit_energy(d))
//   long:  bits * (elec_energy_per_bit + long_range_amp * d^4)
double tx_energy(const RadioParams& p, double bits, double distance_m,
                 RangeClass range);

// Energy to receive `bits`: bits * (elec_energy_per_bit + beamform_energy_per_bit).
double rx_energy(const RadioParams& p, double bits);

}  // namespace eehc
