#pragma once

namespace srmetro {

/// Gaussian pulse imperfections. dS is the absolute standard deviation of the
/// pulse area in rad (area = pi + delta), dPhi that of the optical phase in rad.
/// retention is the fraction eta of atoms left at readout; it scales the signal.
///
/// By default only the 2N encoding pi pulses are perturbed. perturb_decode
/// extends the noise to the 2N decoding pi pulses and perturb_pi_half to the
/// two Ramsey pi/2 pulses.
struct NoiseParams {
  double dS = 0.0;
  double dPhi = 0.0;
  double retention = 1.0;
  bool perturb_decode = false;
  bool perturb_pi_half = false;

  void validate() const;
  bool operator==(const NoiseParams&) const = default;
};

/// Thermal motion: v_m is the most probable speed (um/us), tau the overall
/// measurement time (us). Atoms are frozen during each pulse train and fly
/// freely for tau between encode and decode.
struct ThermalParams {
  double v_m = 0.0;
  double tau = 0.0;

  void validate() const;
  bool operator==(const ThermalParams&) const = default;
};

}  // namespace srmetro
