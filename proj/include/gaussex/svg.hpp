#pragma once

#include <string>

#include "gaussex/harness.hpp"

namespace gaussex {

/// Ratio p_hat / asymptotic against u, with Wilson whiskers and a dashed line at 1.
std::string ratio_plot_svg(const ResultRecord& record, int width = 640, int height = 420);

}  // namespace gaussex
