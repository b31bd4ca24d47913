#pragma once

#include <string>
#include <string_view>

#include "brirsim/scene.hpp"

namespace brirsim {

/// Parses a setup file.
///
/// Grammar, one statement per line:
///
///     key = value          % comment to end of line
///
/// Values are numbers, bracketed vectors/matrices (`[a b c]`, rows split by
/// `;` or a line break), or strings (quoted with ' or ",
/// or bare to the end of the line). Sources and receivers are indexed from 1:
/// `source(1).location = [1 2 1.5]`.
///
/// Keys not present take the defaults of SimulationSpec; surface
/// coefficients default to absorption 0.2 / scattering 0.2 in every band.
/// `room.dimension` is required. Throws ParseError on syntax errors, unknown
/// or duplicate keys and type mismatches.
SimulationSpec parse_setup(std::string_view text);

/// Writes a spec back in setup-file form; parse_setup(serialize_setup(s)) == s.
std::string serialize_setup(const SimulationSpec& spec);

inline constexpr double kDefaultAbsorption = 0.2;
inline constexpr double kDefaultScattering = 0.2;

}  // namespace brirsim
