#include "brirsim/render.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <mutex>
#include <numbers>
#include <optional>
#include <tuple>

#include "brirsim/diffuse.hpp"
#include "brirsim/error.hpp"
#include "brirsim/ism.hpp"
#include "brirsim/simd/kernels.hpp"

namespace brirsim {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr std::size_t kMaxBandFilterLength = (std::size_t{1} << 18) + 1;
constexpr std::int64_t kRaysPerBlock = 2048;

using Basis = std::vector<std::vector<double>>;
using BankKey = std::tuple<std::vector<double>, double, std::size_t>;

// Grid indices of the band centres on a uniform (K)-point grid over
// [0, fs/2], or nullopt when two centres collide or one lands on an edge.
std::optional<std::vector<std::size_t>> snap_centers(const std::vector<double>& centers, double fs,
                                                     std::size_t length) {
  const std::size_t k = (length + 1) / 2;
  const double spacing = (fs / 2.0) / static_cast<double>(k - 1);
  std::vector<std::size_t> idx;
  for (double f : centers) {
    const auto j = static_cast<std::size_t>(std::llround(f / spacing));
    if (j == 0 || j >= k - 1 || (!idx.empty() && j <= idx.back())) return std::nullopt;
    idx.push_back(j);
  }
  return idx;
}

std::size_t choose_length(const std::vector<double>& centers, double fs, int configured) {
  std::size_t length = static_cast<std::size_t>(std::max(configured, 3));
  if (length % 2 == 0) ++length;
  const auto half = static_cast<std::size_t>(std::ceil(2.0 * fs / centers.front()));
  length = std::max(length, 2 * half + 1);
  while (!snap_centers(centers, fs, length)) {
    length = 2 * (length - 1) + 1;
    if (length > kMaxBandFilterLength) {
      throw ValidationError("band centers too close together to resolve");
    }
  }
  return length;
}

double log_interp_target(const std::vector<double>& centers, std::span<const double> g, double f) {
  if (f <= centers.front()) return g.front();
  if (f >= centers.back()) return g[centers.size() - 1];
  std::size_t b = 0;
  while (f >= centers[b + 1]) ++b;
  const double t = std::log(f / centers[b]) / std::log(centers[b + 1] / centers[b]);
  return (1.0 - t) * g[b] + t * g[b + 1];
}

Basis design_basis(const std::vector<double>& centers, double fs, std::size_t length) {
  const std::size_t k = (length + 1) / 2;
  const std::size_t bands = centers.size();
  const auto snapped = *snap_centers(centers, fs, length);
  const double spacing = (fs / 2.0) / static_cast<double>(k - 1);

  std::vector<double> grid(k);
  for (std::size_t j = 0; j < k; ++j) grid[j] = spacing * static_cast<double>(j);
  for (std::size_t b = 0; b < bands; ++b) grid[snapped[b]] = centers[b];

  Eigen::MatrixXd a(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    const double w = 2.0 * kPi * grid[j] / fs;
    a(j, 0) = 1.0;
    for (std::size_t m = 1; m < k; ++m) a(j, m) = 2.0 * std::cos(w * static_cast<double>(m));
  }
  Eigen::MatrixXd rhs(k, bands);
  std::vector<double> unit(bands, 0.0);
  for (std::size_t b = 0; b < bands; ++b) {
    std::fill(unit.begin(), unit.end(), 0.0);
    unit[b] = 1.0;
    for (std::size_t j = 0; j < k; ++j) rhs(j, b) = log_interp_target(centers, unit, grid[j]);
  }
  const Eigen::MatrixXd coef = a.partialPivLu().solve(rhs);

  const std::size_t mid = k - 1;
  Basis basis(bands, std::vector<double>(length, 0.0));
  for (std::size_t b = 0; b < bands; ++b) {
    basis[b][mid] = coef(0, b);
    for (std::size_t m = 1; m < k; ++m) {
      basis[b][mid - m] = coef(m, b);
      basis[b][mid + m] = coef(m, b);
    }
  }
  return basis;
}

std::shared_ptr<const Basis> cached_basis(const std::vector<double>& centers, double fs,
                                          std::size_t length) {
  static std::mutex mutex;
  static std::map<BankKey, std::shared_ptr<const Basis>> cache;
  BankKey key{centers, fs, length};
  {
    std::lock_guard lock(mutex);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  auto basis = std::make_shared<const Basis>(design_basis(centers, fs, length));
  std::lock_guard lock(mutex);
  return cache.emplace(std::move(key), std::move(basis)).first->second;
}

}  // namespace

FractionalDelay::FractionalDelay(int taps) : taps_(taps) {
  if (taps < 1 || taps % 2 == 0) throw ValidationError("fractional delay taps must be odd");
  const int c = (taps - 1) / 2;
  cos_m_.resize(static_cast<std::size_t>(taps));
  sin_m_.resize(static_cast<std::size_t>(taps));
  for (int k = 0; k < taps; ++k) {
    const double a = 2.0 * kPi * (k - c) / (taps + 1);
    cos_m_[static_cast<std::size_t>(k)] = std::cos(a);
    sin_m_[static_cast<std::size_t>(k)] = std::sin(a);
  }
}

void FractionalDelay::kernel(double tau, std::span<double> out) const {
  const int c = (taps_ - 1) / 2;
  // sin(pi (m - tau)) = -(-1)^m sin(pi tau); the Hann phase 2 pi (m - tau)/(T + 1)
  // expands into the precomputed m-terms and one sincos of tau.
  const double s = std::sin(kPi * tau);
  const double theta = 2.0 * kPi * tau / (taps_ + 1);
  const double ct = std::cos(theta), st = std::sin(theta);
  double sum = 0.0;
  for (int k = 0; k < taps_; ++k) {
    const int m = k - c;
    const double x = m - tau;
    const auto i = static_cast<std::size_t>(k);
    double sinc;
    if (x == 0.0) {
      sinc = 1.0;
    } else {
      sinc = ((m % 2 == 0) ? -s : s) / (kPi * x);
    }
    const double window = 0.5 * (1.0 + cos_m_[i] * ct + sin_m_[i] * st);
    out[i] = sinc * window;
    sum += out[i];
  }
  for (double& v : out.first(static_cast<std::size_t>(taps_))) v /= sum;
}

std::vector<double> fractional_delay_kernel(double tau, int taps) {
  std::vector<double> h(static_cast<std::size_t>(taps));
  FractionalDelay(taps).kernel(tau, h);
  return h;
}

BandFilterBank::BandFilterBank(std::vector<double> band_centers, double fs, int fir_length)
    : centers_(std::move(band_centers)), fs_(fs) {
  if (centers_.empty()) throw ValidationError("band filter needs at least one band");
  for (std::size_t b = 0; b < centers_.size(); ++b) {
    if (!(centers_[b] > 0.0 && centers_[b] < fs_ / 2.0) || (b > 0 && centers_[b] <= centers_[b - 1])) {
      throw ValidationError("band centers must be increasing and inside (0, fs/2)");
    }
  }
  length_ = choose_length(centers_, fs_, fir_length);
  basis_ = cached_basis(centers_, fs_, length_);
}

std::vector<double> BandFilterBank::design(std::span<const double> gains) const {
  if (gains.size() != centers_.size()) throw ValidationError("gain count differs from band count");
  std::vector<double> h(length_, 0.0);
  for (std::size_t b = 0; b < gains.size(); ++b) {
    if (!std::isfinite(gains[b])) throw ValidationError("non-finite band gain");
    simd::axpy(gains[b], basis(b), h);
  }
  return h;
}

double BandFilterBank::target(std::span<const double> gains, double f) const {
  return log_interp_target(centers_, gains, f);
}

std::vector<double> band_gain_filter(std::span<const double> gains, std::span<const double> band_centers,
                                     double fs, int fir_length) {
  for (double g : gains) {
    if (!(g >= 0.0) || !std::isfinite(g)) throw ValidationError("band gains must be finite and >= 0");
  }
  return BandFilterBank({band_centers.begin(), band_centers.end()}, fs, fir_length).design(gains);
}

double fir_magnitude(std::span<const double> h, double f, double fs) {
  std::complex<double> acc = 0.0;
  const double w = 2.0 * kPi * f / fs;
  for (std::size_t n = 0; n < h.size(); ++n) acc += h[n] * std::polar(1.0, -w * static_cast<double>(n));
  return std::abs(acc);
}

PreparedHrtf prepare_hrtf(const HrtfReceiver& receiver, double fs) {
  return prepare_hrtf(load_hrtf(receiver.path), receiver, fs);
}

PreparedHrtf prepare_hrtf(HrtfSet set, const HrtfReceiver& receiver, double fs) {
  bool resampled = false;
  if (set.fs() != fs) {
    set = resample(set, fs);
    resampled = true;
  }
  if (receiver.normalize) set = normalize(set);
  return {std::move(set), receiver.interpolation, resampled};
}

Renderer::Renderer(const SimOptions& opts, const PreparedHrtf* hrtf)
    : opts_(opts),
      hrtf_(hrtf),
      bank_(opts.band_centers, opts.fs),
      frac_(kDefaultFractionalTaps),
      channels_(hrtf != nullptr ? 2 : 1),
      out_len_(static_cast<std::size_t>(std::llround(opts.fs * opts.ir_duration))),
      pad_(bank_.delay()),
      energy_scale_(detection_energy_scale(opts.detection_radius)),
      acc_(bank_.band_count() * channels_, std::vector<double>(out_len_ + 2 * pad_, 0.0)),
      kernel_(static_cast<std::size_t>(frac_.taps())) {
  if (hrtf_ != nullptr && hrtf_->set.fs() != opts.fs) {
    throw ValidationError("HRTF set must be resampled to the simulation rate before rendering");
  }
}

void Renderer::add(std::span<const Arrival> arrivals) {
  for (const Arrival& a : arrivals) add_one(a);
}

void Renderer::add_one(const Arrival& a) {
  if (!(a.time >= 0.0) || !std::isfinite(a.time)) {
    throw ValidationError("arrival time < 0 or not finite");
  }
  const std::size_t bands = bank_.band_count();
  std::array<double, kMaxBands> gain{};
  bool any = false;
  for (std::size_t b = 0; b < bands; ++b) {
    const double v = a.band[b];
    if (!std::isfinite(v)) throw ValidationError("non-finite arrival gain");
    if (a.kind == ArrivalKind::diffuse) {
      if (v < 0.0) throw ValidationError("negative diffuse energy");
      gain[b] = a.sign * std::sqrt(energy_scale_ * v);
    } else {
      gain[b] = v;
    }
    any = any || gain[b] != 0.0;
  }
  ++added_;
  if (!any) return;

  double pos = a.time * opts_.fs;
  if (const double r = std::round(pos); std::abs(pos - r) < 1e-9) pos = r;
  const double base = std::floor(pos);
  const double tau = pos - base;
  const auto half = static_cast<std::int64_t>(frac_.taps() - 1) / 2;
  // Buffer index of the first kernel tap (output index + pad).
  const std::int64_t start = static_cast<std::int64_t>(base) - half + static_cast<std::int64_t>(pad_);
  const auto buf_len = static_cast<std::int64_t>(out_len_ + 2 * pad_);
  if (start >= buf_len) return;

  frac_.kernel(tau, kernel_);

  auto deposit = [&](std::span<const double> seq, std::size_t ch) {
    std::int64_t s = start;
    std::size_t offset = 0;
    if (s < 0) {
      offset = static_cast<std::size_t>(-s);
      s = 0;
    }
    if (offset >= seq.size()) return;
    const std::size_t n = std::min<std::size_t>(seq.size() - offset, static_cast<std::size_t>(buf_len - s));
    for (std::size_t b = 0; b < bands; ++b) {
      if (gain[b] == 0.0) continue;
      auto& acc = acc_[b * channels_ + ch];
      simd::axpy(gain[b], seq.subspan(offset, n), std::span<double>(acc).subspan(static_cast<std::size_t>(s), n));
    }
  };

  if (hrtf_ == nullptr) {
    deposit(kernel_, 0);
    return;
  }

  const Direction dir = Direction::from_vector(a.direction);
  const HrirBlend blend = hrtf_->interpolation == HrtfInterpolation::interpolate
                              ? interpolation_blend(hrtf_->set, dir)
                              : nearest_blend(hrtf_->set, dir);
  const std::size_t n = hrtf_->set.ir_length();
  scratch_.assign(n, 0.0);
  for (int ch = 0; ch < 2; ++ch) {
    std::fill(scratch_.begin(), scratch_.end(), 0.0);
    for (int i = 0; i < blend.count; ++i) {
      const auto ir = hrtf_->set.ir(blend.index[i], ch);
      for (std::size_t k = 0; k < n; ++k) scratch_[k] += blend.weight[i] * static_cast<double>(ir[k]);
    }
    deposit(simd::convolve(kernel_, scratch_), static_cast<std::size_t>(ch));
  }
}

ImpulseResponse Renderer::finish() const {
  ImpulseResponse ir;
  ir.fs = opts_.fs;
  ir.channels.assign(channels_, std::vector<double>(out_len_, 0.0));
  if (out_len_ == 0) return ir;
  const auto& kernels = simd::active_kernels();
  for (std::size_t ch = 0; ch < channels_; ++ch) {
    for (std::size_t b = 0; b < bank_.band_count(); ++b) {
      const auto h = bank_.basis(b);
      kernels.fir_accumulate(acc_[b * channels_ + ch].data(), h.data(), h.size(),
                             ir.channels[ch].data(), out_len_);
    }
  }
  return ir;
}

ImpulseResponse render_arrivals(std::span<const Arrival> arrivals, const ReceiverSpec& receiver,
                                const PreparedHrtf* hrtf, const SimOptions& opts) {
  if (receiver.is_binaural() != (hrtf != nullptr)) {
    throw ValidationError("an HRTF set is required exactly when the receiver is binaural");
  }
  if (!std::is_sorted(arrivals.begin(), arrivals.end(), arrival_before)) {
    throw ValidationError("arrivals must be sorted by (time, id)");
  }
  Renderer r(opts, hrtf);
  r.add(arrivals);
  return r.finish();
}

ImpulseResponse assemble_brir(const ValidatedSpec& vspec, std::size_t source_index,
                              std::size_t receiver_index, const PreparedHrtf* hrtf,
                              const ExecutionOptions& exec, BrirStats* stats) {
  const SimulationSpec& spec = vspec.spec();
  const ReceiverSpec& rcv = spec.receivers.at(receiver_index);
  std::optional<PreparedHrtf> loaded;
  if (rcv.is_binaural() && hrtf == nullptr) {
    loaded = prepare_hrtf(*rcv.hrtf, spec.options.fs);
    hrtf = &*loaded;
  }
  if (!rcv.is_binaural()) hrtf = nullptr;

  Renderer renderer(spec.options, hrtf);
  BrirStats local;

  if (spec.options.ism_enabled) {
    const auto specular = specular_arrivals(vspec, source_index, receiver_index);
    local.specular = specular.size();
    renderer.add(specular);
  }

  const DiffuseTracer tracer(vspec, source_index, receiver_index);
  const std::int64_t rays = tracer.ray_count();
  if (rays > 0) {
    const std::int64_t blocks = (rays + kRaysPerBlock - 1) / kRaysPerBlock;
    const std::int64_t batch = std::max<std::int64_t>(1, resolve_workers(exec.workers));
    std::vector<std::vector<Arrival>> traced;
    for (std::int64_t first = 0; first < blocks; first += batch) {
      const std::int64_t count = std::min(batch, blocks - first);
      traced.assign(static_cast<std::size_t>(count), {});
      parallel_for(static_cast<std::size_t>(count), exec.workers, [&](std::size_t k) {
        const std::int64_t block = first + static_cast<std::int64_t>(k);
        const std::int64_t r0 = block * kRaysPerBlock;
        traced[k] = tracer.trace_range(r0, std::min(rays, r0 + kRaysPerBlock));
      });
      for (const auto& part : traced) {
        local.diffuse += part.size();
        renderer.add(part);
      }
    }
  }

  if (stats != nullptr) *stats = local;
  return renderer.finish();
}

}  // namespace brirsim
