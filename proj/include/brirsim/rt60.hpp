#pragma once

#include <cstddef>
#include <vector>

#include "brirsim/render.hpp"
#include "brirsim/scene.hpp"

namespace brirsim {

/// Schroeder energy decay curve in dB relative to the total energy, using
/// the mean of the channels' squared samples. -inf after the last nonzero
/// sample.
std::vector<double> energy_decay_curve(const ImpulseResponse& ir);

struct Rt60Estimate {
  double rt60 = 0.0;            // s, 60 / |slope|
  double slope = 0.0;           // dB/s over the -5..-25 dB span
  double intercept = 0.0;       // dB at t = 0
  double dynamic_range = 0.0;   // dB, deepest finite EDC level
};

/// T20 extrapolated to 60 dB. Throws AnalysisError("insufficient dynamic
/// range ...") when the EDC does not reach -30 dB.
Rt60Estimate analyze_rt60(const ImpulseResponse& ir);
double estimate_rt60(const ImpulseResponse& ir);

/// Area-weighted mean absorption of one band.
double mean_absorption(const RoomSpec& room, std::size_t band);

/// Eyring reverberation time 0.161 V / (-S ln(1 - mean alpha)).
double predicted_rt60_eyring(const RoomSpec& room, std::size_t band);

/// Uniform absorption for which the Eyring formula gives `rt60`.
double eyring_absorption_for_rt60(double volume, double area, double rt60);

}  // namespace brirsim
