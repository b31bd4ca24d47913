#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "brirsim/arrival.hpp"
#include "brirsim/hrtf.hpp"
#include "brirsim/parallel.hpp"
#include "brirsim/scene.hpp"

namespace brirsim {

inline constexpr int kDefaultFractionalTaps = 33;
inline constexpr int kDefaultBandFilterTaps = 65;

struct ImpulseResponse {
  double fs = 48000.0;
  std::vector<std::vector<double>> channels;

  std::size_t channel_count() const { return channels.size(); }
  std::size_t length() const { return channels.empty() ? 0 : channels.front().size(); }

  friend bool operator==(const ImpulseResponse&, const ImpulseResponse&) = default;
};

/// Hann-windowed sinc centred at (taps - 1) / 2 + tau, normalised to unit sum.
std::vector<double> fractional_delay_kernel(double tau, int taps = kDefaultFractionalTaps);

/// Same kernel written into `out` (size taps) with one sin and one sincos per
/// call; the window phase table is built once.
class FractionalDelay {
 public:
  explicit FractionalDelay(int taps = kDefaultFractionalTaps);
  int taps() const { return taps_; }
  void kernel(double tau, std::span<double> out) const;

 private:
  int taps_;
  std::vector<double> cos_m_;
  std::vector<double> sin_m_;
};

/// Linear-phase band filters by frequency sampling. The amplitude response
/// is interpolated exactly on a grid of (L + 1) / 2 frequencies from DC to
/// Nyquist, with the grid points nearest the band centres moved onto them.
/// The target is linear in log frequency between centres and flat outside,
/// so a filter for gains g is sum_b g_b * basis(b).
///
/// L is the configured length or, if longer, the length needed to resolve
/// the lowest centre (grid spacing at most a quarter of it).
class BandFilterBank {
 public:
  BandFilterBank(std::vector<double> band_centers, double fs, int fir_length = kDefaultBandFilterTaps);

  std::size_t length() const { return length_; }
  std::size_t delay() const { return (length_ - 1) / 2; }
  std::size_t band_count() const { return centers_.size(); }
  const std::vector<double>& centers() const { return centers_; }
  std::span<const double> basis(std::size_t band) const { return basis_->at(band); }
  std::vector<double> design(std::span<const double> gains) const;

  /// Target magnitude at frequency f for the given band gains.
  double target(std::span<const double> gains, double f) const;

 private:
  std::vector<double> centers_;
  double fs_;
  std::size_t length_;
  std::shared_ptr<const std::vector<std::vector<double>>> basis_;  // shared design cache entry
};

std::vector<double> band_gain_filter(std::span<const double> gains, std::span<const double> band_centers,
                                     double fs, int fir_length = kDefaultBandFilterTaps);

/// Amplitude of an FIR at frequency f (magnitude of its DTFT).
double fir_magnitude(std::span<const double> h, double f, double fs);

/// HRTF set ready for a render at `fs`: resampled if needed, then normalised
/// when the receiver asks for it.
struct PreparedHrtf {
  HrtfSet set;
  HrtfInterpolation interpolation = HrtfInterpolation::nearest;
  bool resampled = false;
};

PreparedHrtf prepare_hrtf(const HrtfReceiver& receiver, double fs);
PreparedHrtf prepare_hrtf(HrtfSet set, const HrtfReceiver& receiver, double fs);

/// Accumulates arrivals into per-band delay lines and applies the band
/// filters once at the end. Arrivals are summed in the order they are added.
class Renderer {
 public:
  Renderer(const SimOptions& opts, const PreparedHrtf* hrtf);

  /// `arrivals` must be sorted by (time, id).
  void add(std::span<const Arrival> arrivals);
  ImpulseResponse finish() const;

  std::size_t arrival_count() const { return added_; }

 private:
  void add_one(const Arrival& a);

  SimOptions opts_;
  const PreparedHrtf* hrtf_;
  BandFilterBank bank_;
  FractionalDelay frac_;
  std::size_t channels_;
  std::size_t out_len_;
  std::size_t pad_;
  double energy_scale_;
  std::vector<std::vector<double>> acc_;  // [band * channels + ch], pad_ + out_len_ + pad_
  std::vector<double> kernel_;
  std::vector<double> scratch_;
  std::size_t added_ = 0;
};

ImpulseResponse render_arrivals(std::span<const Arrival> arrivals, const ReceiverSpec& receiver,
                                const PreparedHrtf* hrtf, const SimOptions& opts);

struct BrirStats {
  std::size_t specular = 0;
  std::size_t diffuse = 0;
};

/// Image-source and diffuse arrivals for one pair, rendered. Diffuse rays are
/// traced in fixed blocks (traced in parallel, added in ray order) so memory
/// stays bounded and the result does not depend on exec.workers.
ImpulseResponse assemble_brir(const ValidatedSpec& spec, std::size_t source_index,
                              std::size_t receiver_index, const PreparedHrtf* hrtf = nullptr,
                              const ExecutionOptions& exec = {}, BrirStats* stats = nullptr);

}  // namespace brirsim
