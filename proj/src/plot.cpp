#include "relbandit/plot.hpp"

#include "relbandit/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <istream>
#include <limits>
#include <sstream>

namespace relbandit {
namespace {

constexpr double kWidth = 800, kHeight = 500;
constexpr double kLeft = 80, kRight = 180, kTop = 30, kBottom = 60;
constexpr std::size_t kMaxPoints = 1000;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};

double parse_field(const std::string& s, std::size_t line) {
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError("expected a number, got '" + s + "'", line);
  return v;
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::vector<AggregateSeries> read_aggregate_csv(std::istream& in) {
  std::string line;
  std::size_t n = 0;
  if (!std::getline(in, line)) throw ParseError("empty aggregate CSV", 1);
  ++n;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "agent,iteration,mean_cum_regret,std_cum_regret,mean_avg_reward,std_avg_reward")
    throw ParseError("unexpected aggregate CSV header", n);

  std::vector<AggregateSeries> out;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::istringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (f.size() != 6) throw ParseError("expected 6 fields, found " + std::to_string(f.size()), n);
    if (f[0].empty()) throw ParseError("empty agent name", n);
    if (out.empty() || out.back().agent != f[0]) {
      for (const auto& s : out)
        if (s.agent == f[0]) throw ParseError("rows of agent '" + f[0] + "' are not contiguous", n);
      out.push_back({f[0], {}, {}, {}, {}});
    }
    auto& s = out.back();
    const double iter = parse_field(f[1], n);
    if (iter != static_cast<double>(s.mean_cum_regret.size() + 1))
      throw ParseError("iterations of agent '" + f[0] + "' must count up from 1", n);
    s.mean_cum_regret.push_back(parse_field(f[2], n));
    s.std_cum_regret.push_back(parse_field(f[3], n));
    s.mean_avg_reward.push_back(parse_field(f[4], n));
    s.std_avg_reward.push_back(parse_field(f[5], n));
  }
  if (out.empty()) throw ParseError("aggregate CSV has no data rows", n + 1);
  return out;
}

std::string render_svg(const std::vector<AggregateSeries>& series, PlotMetric metric) {
  const bool regret = metric == PlotMetric::CumulativeRegret;
  auto mean_of = [&](const AggregateSeries& s) -> const std::vector<double>& {
    return regret ? s.mean_cum_regret : s.mean_avg_reward;
  };
  auto std_of = [&](const AggregateSeries& s) -> const std::vector<double>& {
    return regret ? s.std_cum_regret : s.std_avg_reward;
  };

  std::size_t n_max = 1;
  double y_lo = std::numeric_limits<double>::infinity(), y_hi = -y_lo;
  for (const auto& s : series) {
    const auto& m = mean_of(s);
    const auto& sd = std_of(s);
    n_max = std::max(n_max, m.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      y_lo = std::min(y_lo, m[i] - sd[i]);
      y_hi = std::max(y_hi, m[i] + sd[i]);
    }
  }
  if (!std::isfinite(y_lo)) y_lo = 0, y_hi = 1;
  if (y_hi - y_lo < 1e-12) y_lo -= 0.5, y_hi += 0.5;

  const double plot_w = kWidth - kLeft - kRight, plot_h = kHeight - kTop - kBottom;
  auto px = [&](std::size_t iter) {
    return kLeft + plot_w * (n_max > 1 ? static_cast<double>(iter - 1) / static_cast<double>(n_max - 1) : 0.5);
  };
  auto py = [&](double y) { return kTop + plot_h * (1.0 - (y - y_lo) / (y_hi - y_lo)); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
      << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // Axes and ticks.
  svg << "<line x1=\"" << kLeft << "\" y1=\"" << kTop + plot_h << "\" x2=\"" << kLeft + plot_w << "\" y2=\""
      << kTop + plot_h << "\" stroke=\"black\"/>\n"
      << "<line x1=\"" << kLeft << "\" y1=\"" << kTop << "\" x2=\"" << kLeft << "\" y2=\"" << kTop + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double y = y_lo + (y_hi - y_lo) * i / 5.0;
    const auto iter = 1 + static_cast<std::size_t>(std::llround(static_cast<double>(n_max - 1) * i / 5.0));
    svg << "<text x=\"" << kLeft - 6 << "\" y=\"" << num(py(y) + 4) << "\" text-anchor=\"end\">" << tick_label(y)
        << "</text>\n"
        << "<text x=\"" << num(px(iter)) << "\" y=\"" << kTop + plot_h + 18 << "\" text-anchor=\"middle\">" << iter
        << "</text>\n";
  }
  svg << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 15 << "\" text-anchor=\"middle\">iteration</text>\n"
      << "<text x=\"20\" y=\"" << kTop + plot_h / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << kTop + plot_h / 2 << ")\">" << (regret ? "cumulative regret" : "averaged reward") << "</text>\n";

  for (std::size_t a = 0; a < series.size(); ++a) {
    const auto& s = series[a];
    const auto& m = mean_of(s);
    const auto& sd = std_of(s);
    const char* color = kPalette[a % std::size(kPalette)];
    if (m.empty()) continue;
    const std::size_t stride = std::max<std::size_t>(1, (m.size() + kMaxPoints - 1) / kMaxPoints);
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < m.size(); i += stride) idx.push_back(i);
    if (idx.back() != m.size() - 1) idx.push_back(m.size() - 1);

    svg << "<polygon class=\"band\" fill=\"" << color << "\" fill-opacity=\"0.15\" stroke=\"none\" points=\"";
    for (std::size_t i : idx) svg << num(px(i + 1)) << ',' << num(py(m[i] + sd[i])) << ' ';
    for (auto it = idx.rbegin(); it != idx.rend(); ++it) svg << num(px(*it + 1)) << ',' << num(py(m[*it] - sd[*it])) << ' ';
    svg << "\"/>\n";

    svg << "<polyline class=\"mean\" data-agent=\"" << escape(s.agent) << "\" fill=\"none\" stroke=\"" << color
        << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t k = 0; k < idx.size(); ++k)
      svg << (k ? " " : "") << num(px(idx[k] + 1)) << ',' << num(py(m[idx[k]]));
    svg << "\"/>\n";

    const double ly = kTop + 10 + 20.0 * static_cast<double>(a);
    svg << "<line x1=\"" << kWidth - kRight + 15 << "\" y1=\"" << ly << "\" x2=\"" << kWidth - kRight + 40
        << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
        << "<text x=\"" << kWidth - kRight + 46 << "\" y=\"" << ly + 4 << "\">" << escape(s.agent) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace relbandit
