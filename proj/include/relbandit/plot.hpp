#pragma once

#include "relbandit/simulation.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace relbandit {

/// Parses an aggregate CSV as written by write_aggregate_csv. Throws
/// ParseError with the 1-based line number on malformed or empty input.
std::vector<AggregateSeries> read_aggregate_csv(std::istream& in);

enum class PlotMetric { CumulativeRegret, AveragedReward };

/// SVG line chart: one polyline per agent, a mean ± std band, axes with
/// labels, and a legend.
std::string render_svg(const std::vector<AggregateSeries>& series, PlotMetric metric);

}  // namespace relbandit
