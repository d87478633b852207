#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>

#include "braggsqueeze/config.hpp"
#include "braggsqueeze/field.hpp"
#include "braggsqueeze/grid.hpp"

namespace braggsqueeze::io {

/// A field pair together with the grid and grating it lives on.
///
/// On disk: a text header of `key = value` lines (format tag first,
/// `end_header` last), then 2 * n_z complex samples (a, then b) as
/// little-endian float64 pairs re, im.
struct FieldSnapshot {
    std::string label;     // free text, e.g. "initial" or "final"
    std::int64_t step = 0;
    GratingConfig grating;
    Grid grid;
    FieldPair field;
};

inline constexpr const char* kFieldFormatTag = "braggsqueeze-field 1";

void write_field(std::ostream& out, const FieldSnapshot& s);
void write_field(const std::filesystem::path& path, const FieldSnapshot& s);

/// Throws ConfigError on a malformed header and GridMismatch when the
/// payload does not match the header's n_z.
FieldSnapshot read_field(std::istream& in);
FieldSnapshot read_field(const std::filesystem::path& path);

} // namespace braggsqueeze::io
