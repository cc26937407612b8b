#pragma once

#include <string>
#include <vector>

#include "dykls/diagnostics.hpp"

namespace dykls {

/// Three-panel static SVG for a trace: semilog gap/err, reciprocal gap, and
/// inverse-sqrt err, all against the sweep index.
void write_plot_svg(const std::string& path,
                    const std::vector<TraceRecord>& records);

}  // namespace dykls
