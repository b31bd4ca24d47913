#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "brirsim/render.hpp"

namespace brirsim {

enum class SampleFormat { float32, int16 };

/// Canonical 44-byte-header RIFF/WAVE, interleaved little-endian samples.
/// float32 stores static_cast<float>(x); int16 stores round(x * 32767) and
/// rejects |x| > 1.
std::vector<std::uint8_t> encode_wave(const ImpulseResponse& ir, SampleFormat format);

/// Accepts PCM16 (format 1) and IEEE float32 (format 3); int16 samples are
/// divided by 32768. Unknown chunks are skipped.
ImpulseResponse decode_wave(std::span<const std::uint8_t> bytes);

void write_wave(const ImpulseResponse& ir, const std::filesystem::path& path,
                SampleFormat format = SampleFormat::float32);
ImpulseResponse read_wave(const std::filesystem::path& path);

/// Headerless little-endian float64, channels interleaved.
void write_f64raw(const ImpulseResponse& ir, const std::filesystem::path& path);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
/// Writes through a temporary sibling and renames, so readers never see a
/// partial file.
void write_file_atomic(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace brirsim
