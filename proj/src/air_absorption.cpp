#include "brirsim/air_absorption.hpp"

#include <cmath>

namespace brirsim {

double air_absorption_db_per_m(double frequency, double temperature, double humidity,
                               double pressure) {
  constexpr double kRefPressure = 101.325;  // kPa
  constexpr double kRefTemperature = 293.15;
  constexpr double kTriplePoint = 273.16;

  const double t = temperature + 273.15;
  const double pa = pressure / kRefPressure;
  const double tr = t / kRefTemperature;
  const double f2 = frequency * frequency;

  const double c = -6.8346 * std::pow(kTriplePoint / t, 1.261) + 4.6151;
  const double h = humidity * std::pow(10.0, c) / pa;  // molar concentration of water vapour, %

  const double fr_o = pa * (24.0 + 4.04e4 * h * (0.02 + h) / (0.391 + h));
  const double fr_n =
      pa * std::pow(tr, -0.5) * (9.0 + 280.0 * h * std::exp(-4.170 * (std::pow(tr, -1.0 / 3.0) - 1.0)));

  const double classical = 1.84e-11 / pa * std::sqrt(tr);
  const double oxygen = 0.01275 * std::exp(-2239.1 / t) / (fr_o + f2 / fr_o);
  const double nitrogen = 0.1068 * std::exp(-3352.0 / t) / (fr_n + f2 / fr_n);
  return 8.686 * f2 * (classical + std::pow(tr, -2.5) * (oxygen + nitrogen));
}

std::vector<double> air_absorption_db_per_m(std::span<const double> frequencies,
                                            double temperature, double humidity,
                                            double pressure) {
  std::vector<double> out;
  out.reserve(frequencies.size());
  for (double f : frequencies) {
    out.push_back(air_absorption_db_per_m(f, temperature, humidity, pressure));
  }
  return out;
}

}  // namespace brirsim
