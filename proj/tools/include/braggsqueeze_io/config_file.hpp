#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "braggsqueeze/experiments.hpp"

namespace braggsqueeze::io {

/// Parses flat `key = value` text. Keys are the snake_case field names of
/// GratingConfig, PulseConfig and GridOptions; '#' starts a comment.
/// Leaving out lead_in, lead_out and center lets the leads be fitted
/// to the time window. Throws ConfigError naming the offending key.
Setup parse_config(std::istream& in, const Setup& defaults = reference_setup());
Setup load_config(const std::filesystem::path& path, const Setup& defaults = reference_setup());

/// Canonical text form, one key per line in a fixed order, round-trips
/// through parse_config.
std::string to_config_text(const Setup& s);

/// 64-bit FNV-1a of the canonical text, as 16 hex digits.
std::string config_hash(const Setup& s);
std::uint64_t fnv1a(std::string_view text);

/// Config keys in canonical order.
const std::vector<std::string>& config_keys();

} // namespace braggsqueeze::io
