#pragma once

#include <json.hpp>

#include "braggsqueeze/experiments.hpp"
#include "braggsqueeze_io/report.hpp"

namespace braggsqueeze::io {

using Json = nlohmann::ordered_json;

/// Config keys and values, plus the resolved lead geometry.
Json setup_json(const Setup& s);
Json stamp_json(const Stamp& st);
Json run_json(const RunResult& r);
Json classification_json(const PeakClassification& c);

/// Numbers as JSON values; non-finite values become null.
Json number_json(double v);

} // namespace braggsqueeze::io
