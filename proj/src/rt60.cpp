#include "brirsim/rt60.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "brirsim/error.hpp"

namespace brirsim {

namespace {
constexpr double kFitStart = -5.0;
constexpr double kFitEnd = -25.0;
constexpr double kRequiredRange = 30.0;
}  // namespace

std::vector<double> energy_decay_curve(const ImpulseResponse& ir) {
  const std::size_t n = ir.length();
  std::vector<double> edc(n, -std::numeric_limits<double>::infinity());
  if (n == 0 || ir.channel_count() == 0) return edc;
  std::vector<double> tail(n);
  double acc = 0.0;
  for (std::size_t i = n; i-- > 0;) {
    double e = 0.0;
    for (const auto& ch : ir.channels) e += ch[i] * ch[i];
    acc += e / static_cast<double>(ir.channel_count());
    tail[i] = acc;
  }
  const double total = tail[0];
  if (total <= 0.0) return edc;
  for (std::size_t i = 0; i < n; ++i) {
    if (tail[i] > 0.0) edc[i] = 10.0 * std::log10(tail[i] / total);
  }
  return edc;
}

Rt60Estimate analyze_rt60(const ImpulseResponse& ir) {
  const auto edc = energy_decay_curve(ir);
  double deepest = 0.0;
  bool any = false;
  for (double v : edc) {
    if (std::isfinite(v)) {
      deepest = std::min(deepest, v);
      any = true;
    }
  }
  if (!any) throw AnalysisError("insufficient dynamic range: impulse response is silent");
  const double range = -deepest;
  if (range < kRequiredRange) {
    std::ostringstream msg;
    msg << "insufficient dynamic range: EDC reaches " << range << " dB, need " << kRequiredRange
        << " dB";
    throw AnalysisError(msg.str());
  }

  // Least squares over the samples between the first crossings of -5 and -25 dB.
  std::size_t i0 = 0;
  while (edc[i0] > kFitStart) ++i0;
  std::size_t i1 = i0;
  while (edc[i1] > kFitEnd) ++i1;
  const double fs = ir.fs;
  if (static_cast<double>(i1 - i0) < 1e-3 * fs || i1 - i0 < 2) {
    std::ostringstream msg;
    msg << "insufficient dynamic range: -5..-25 dB span covers only " << (i1 - i0) << " samples";
    throw AnalysisError(msg.str());
  }
  const double count = static_cast<double>(i1 - i0 + 1);
  double st = 0.0, sy = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    st += static_cast<double>(i) / fs;
    sy += edc[i];
  }
  const double mt = st / count, my = sy / count;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    const double dt = static_cast<double>(i) / fs - mt;
    stt += dt * dt;
    sty += dt * (edc[i] - my);
  }
  Rt60Estimate est;
  est.slope = sty / stt;
  est.intercept = my - est.slope * mt;
  est.dynamic_range = range;
  if (!(est.slope < 0.0)) throw AnalysisError("energy decay curve does not decay");
  est.rt60 = 60.0 / -est.slope;
  return est;
}

double estimate_rt60(const ImpulseResponse& ir) { return analyze_rt60(ir).rt60; }

double mean_absorption(const RoomSpec& room, std::size_t band) {
  double weighted = 0.0;
  for (int w = 0; w < kWallCount; ++w) weighted += room.wall_area(w) * room.surfaces[w].absorption.at(band);
  return weighted / room.total_area();
}

double predicted_rt60_eyring(const RoomSpec& room, std::size_t band) {
  const double alpha = mean_absorption(room, band);
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError("Eyring formula needs mean absorption in (0, 1)");
  }
  return 0.161 * room.volume() / (-room.total_area() * std::log1p(-alpha));
}

double eyring_absorption_for_rt60(double volume, double area, double rt60) {
  if (!(volume > 0.0 && area > 0.0 && rt60 > 0.0)) {
    throw ValidationError("Eyring inversion needs positive volume, area and RT60");
  }
  return -std::expm1(-0.161 * volume / (area * rt60));
}

}  // namespace brirsim
