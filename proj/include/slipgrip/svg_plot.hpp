#pragma once

#include <filesystem>
#include <vector>

#include "slipgrip/detector.hpp"

namespace slipgrip {

// Convenience export: stacked panels of power (with event spans), duty and
// bend angle against time, as a standalone SVG. The CSV traces remain the
// contract; this is for quick visual inspection only.
void write_run_plot(const std::filesystem::path& path, const std::vector<double>& t,
                    const std::vector<double>& power, const std::vector<double>& duty,
                    const std::vector<double>& bend, const std::vector<SlipEvent>& events);

}  // namespace slipgrip
