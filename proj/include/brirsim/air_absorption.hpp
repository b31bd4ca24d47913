#pragma once

#include <span>
#include <vector>

namespace brirsim {

/// Pure-tone atmospheric attenuation in dB/m (ISO 9613-1): oxygen and
/// nitrogen relaxation plus the classical term.
/// frequency in Hz, temperature in C, relative humidity in %, pressure in kPa.
double air_absorption_db_per_m(double frequency, double temperature, double humidity,
                               double pressure = 101.325);

std::vector<double> air_absorption_db_per_m(std::span<const double> frequencies,
                                            double temperature, double humidity,
                                            double pressure = 101.325);

}  // namespace brirsim
