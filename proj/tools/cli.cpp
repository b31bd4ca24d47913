#include "cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "brirsim/dataset.hpp"
#include "brirsim/error.hpp"
#include "brirsim/hrtf.hpp"
#include "brirsim/render.hpp"
#include "brirsim/rt60.hpp"
#include "brirsim/setup_file.hpp"
#include "brirsim/simd/kernels.hpp"
#include "brirsim/wave.hpp"

namespace brirsim {

namespace fs = std::filesystem;

namespace {

enum Exit { kOk = 0, kUsage = 1, kInvalid = 2, kRuntime = 3 };

std::string one_line(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  std::optional<std::uint64_t> seed;
};

int simulate(Context& ctx, const fs::path& setup_path, unsigned jobs) {
  std::error_code ec;
  if (!fs::is_regular_file(setup_path, ec)) {
    ctx.err << "error: setup file not found: " << setup_path.string() << "\n";
    return kUsage;
  }
  std::ifstream in(setup_path);
  std::stringstream text;
  text << in.rdbuf();
  if (!in && !in.eof()) throw IoError("cannot read setup file " + setup_path.string());

  SimulationSpec spec = parse_setup(text.str());
  const fs::path base = setup_path.parent_path();
  auto resolve = [&](const std::string& p) {
    const fs::path path(p);
    return (path.is_absolute() || base.empty() ? path : base / path).string();
  };
  for (auto& r : spec.receivers) {
    if (!r.hrtf) continue;
    r.hrtf->path = resolve(r.hrtf->path);
    if (!fs::is_regular_file(r.hrtf->path, ec)) throw ValidationError("HRTF file not found: " + r.hrtf->path);
  }
  if (ctx.seed) spec.options.seed = *ctx.seed;
  const fs::path out_dir = resolve(spec.output.path);
  const ValidatedSpec vspec = validate(std::move(spec));

  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw IoError("cannot create output directory " + out_dir.string());

  // One prepared HRTF per distinct receiver configuration.
  std::vector<std::optional<PreparedHrtf>> hrtfs(vspec->receivers.size());
  for (std::size_t i = 0; i < hrtfs.size(); ++i) {
    const auto& r = vspec->receivers[i];
    if (!r.hrtf) continue;
    for (std::size_t j = 0; j < i; ++j) {
      if (vspec->receivers[j].hrtf == r.hrtf) hrtfs[i] = hrtfs[j];
    }
    if (!hrtfs[i]) {
      hrtfs[i] = prepare_hrtf(*r.hrtf, vspec->options.fs);
      if (hrtfs[i]->resampled) {
        ctx.out << "resampled HRTF " << r.hrtf->path << " to " << vspec->options.fs << " Hz\n";
      }
    }
  }

  const bool wav = vspec->output.format == OutputFormat::wav;
  for (std::size_t s = 0; s < vspec->sources.size(); ++s) {
    for (std::size_t r = 0; r < vspec->receivers.size(); ++r) {
      BrirStats stats;
      const PreparedHrtf* hrtf = hrtfs[r] ? &*hrtfs[r] : nullptr;
      const ImpulseResponse ir = assemble_brir(vspec, s, r, hrtf, ExecutionOptions{jobs}, &stats);
      const fs::path file = out_dir / ("s" + std::to_string(s + 1) + "_r" + std::to_string(r + 1) +
                                       (wav ? ".wav" : ".f64"));
      if (wav) {
        write_wave(ir, file);
      } else {
        write_f64raw(ir, file);
      }
      ctx.out << "source " << s + 1 << " receiver " << r + 1 << ": " << stats.specular << " specular, "
              << stats.diffuse << " diffuse arrivals, " << ir.length() << " samples x "
              << ir.channel_count() << " channels -> " << file.string() << "\n";
    }
  }
  return kOk;
}

int dataset(Context& ctx, const fs::path& spec_path, bool resume, unsigned jobs) {
  std::error_code ec;
  if (!fs::is_regular_file(spec_path, ec)) {
    ctx.err << "error: dataset spec not found: " << spec_path.string() << "\n";
    return kUsage;
  }
  const DatasetSpec spec = load_dataset_spec(spec_path);
  DatasetOptions opts;
  opts.jobs = jobs;
  opts.resume = resume;
  opts.seed = ctx.seed;
  opts.progress = [&](std::size_t done, std::size_t total) {
    ctx.out << "progress " << done << "/" << total << "\n";
  };
  const DatasetResult result = generate_dataset(spec, opts);
  ctx.out << "entries " << result.entries << "\nrendered " << result.rendered << "\nskipped "
          << result.skipped << "\nmanifest " << result.manifest.string() << "\n";
  return kOk;
}

int rt60(Context& ctx, const fs::path& wav_path) {
  const ImpulseResponse ir = read_wave(wav_path);
  const Rt60Estimate est = analyze_rt60(ir);
  ctx.out << "file " << wav_path.string() << "\nfs " << ir.fs << "\nchannels " << ir.channel_count()
          << "\nsamples " << ir.length() << "\nrt60 " << est.rt60 << "\nslope_db_per_s " << est.slope
          << "\ndynamic_range_db " << est.dynamic_range << "\n";
  return kOk;
}

int hrtf_info(Context& ctx, const fs::path& path) {
  const HrtfSet set = load_hrtf(path);
  double el_min = 90.0, el_max = -90.0, az_min = 360.0, az_max = 0.0;
  for (const auto& p : set.positions()) {
    el_min = std::min(el_min, p.elevation);
    el_max = std::max(el_max, p.elevation);
    az_min = std::min(az_min, p.azimuth);
    az_max = std::max(az_max, p.azimuth);
  }
  float peak = 0.0f;
  for (float v : set.data()) peak = std::max(peak, std::abs(v));
  ctx.out << "file " << path.string() << "\nfs " << set.fs() << "\ndirections " << set.size()
          << "\nir_length " << set.ir_length() << "\nchannels 2\nazimuth_range " << az_min << " "
          << az_max << "\nelevation_range " << el_min << " " << el_max << "\npeak " << peak
          << "\nmetadata " << set.metadata() << "\nchecksum ok\n";
  return kOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Shoebox room simulator for binaural room impulse responses", "brirsim"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string("brirsim ") + BRIRSIM_VERSION + " (" +
                                        std::string(simd::isa_name(simd::active_kernels().isa)) + ")");
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the random seed");

  std::string setup_path;
  unsigned sim_jobs = 0;
  auto* sim = app.add_subcommand("simulate", "Render one BRIR per source/receiver pair of a setup file");
  sim->add_option("setup", setup_path, "Setup file")->required();
  sim->add_option("--jobs", sim_jobs, "Worker threads (0 = all cores)");

  std::string spec_path;
  bool resume = false;
  unsigned jobs = 1;
  auto* ds = app.add_subcommand("dataset", "Generate a BRIR dataset from a JSON spec");
  ds->add_option("spec", spec_path, "Dataset spec (JSON)")->required();
  ds->add_flag("--resume", resume, "Keep existing valid outputs");
  ds->add_option("--jobs", jobs, "Entries rendered concurrently (0 = all cores)");

  std::string wav_path;
  auto* rt = app.add_subcommand("rt60", "Estimate the reverberation time of a WAVE impulse response");
  rt->add_option("wav", wav_path, "WAVE file")->required();

  std::string hrtf_path;
  auto* hi = app.add_subcommand("hrtf-info", "Describe an HRTF container");
  hi->add_option("container", hrtf_path, "HRTF container")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kUsage;
  }

  Context ctx{out, err, seed};
  try {
    if (*sim) return simulate(ctx, setup_path, sim_jobs);
    if (*ds) return dataset(ctx, spec_path, resume, jobs == 0 ? resolve_workers(0) : jobs);
    if (*rt) return rt60(ctx, wav_path);
    if (*hi) return hrtf_info(ctx, hrtf_path);
  } catch (const ParseError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kInvalid;
  } catch (const ValidationError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kInvalid;
  } catch (const FormatError& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kInvalid;
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << "\n";
    return kRuntime;
  }
  return kUsage;
}

}  // namespace brirsim
