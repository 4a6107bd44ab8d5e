#include "relbandit/dataset.hpp"

#include "relbandit/errors.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace relbandit {
namespace {

namespace fs = std::filesystem;

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find('\t', start);
    out.push_back(line.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad(const fs::path& file, std::size_t line, const std::string& what) {
  throw ValidationError(file.filename().string() + ":" + std::to_string(line) + ": " + what);
}

std::size_t parse_index(const std::string& s, const fs::path& file, std::size_t line) {
  std::size_t v = 0;
  const auto* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) bad(file, line, "expected a non-negative integer, got '" + s + "'");
  return v;
}

double parse_real(const std::string& s, const fs::path& file, std::size_t line) {
  if (s.empty()) bad(file, line, "empty numeric field");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    bad(file, line, "expected a finite real number, got '" + s + "'");
  return v;
}

std::vector<std::string> read_lines(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open " + file.string());
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  return lines;
}

/// Reads `<id>\t<v1>...\t<vd>` rows into a count×d matrix.
Eigen::MatrixXd read_feature_table(const fs::path& file, std::size_t count, std::size_t d) {
  const auto lines = read_lines(file);
  if (lines.size() != count)
    throw ValidationError(file.filename().string() + ": expected " + std::to_string(count) +
                          " rows, found " + std::to_string(lines.size()));
  Eigen::MatrixXd m(static_cast<Eigen::Index>(count), static_cast<Eigen::Index>(d));
  std::vector<char> seen(count, 0);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    const auto fields = split_tabs(lines[i]);
    if (fields.size() != d + 1)
      bad(file, i + 1, "expected " + std::to_string(d + 1) + " fields, found " + std::to_string(fields.size()));
    const std::size_t id = parse_index(fields[0], file, i + 1);
    if (id >= count) bad(file, i + 1, "id " + std::to_string(id) + " out of range");
    if (seen[id]) bad(file, i + 1, "duplicate id " + std::to_string(id));
    seen[id] = 1;
    for (std::size_t j = 0; j < d; ++j)
      m(static_cast<Eigen::Index>(id), static_cast<Eigen::Index>(j)) = parse_real(fields[j + 1], file, i + 1);
  }
  return m;
}

void write_feature_table(const fs::path& file, const Eigen::MatrixXd& m) {
  std::ofstream out(file, std::ios::binary);
  if (!out) throw IoError("cannot write " + file.string());
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    out << i;
    for (Eigen::Index j = 0; j < m.cols(); ++j) out << '\t' << format_double(m(i, j));
    out << '\n';
  }
  if (!out) throw IoError("error writing " + file.string());
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void validate_dataset(const Dataset& dataset) {
  const auto& cat = dataset.catalog;
  if (dataset.users.cols() != cat.dim())
    throw ValidationError("user features have dimension " + std::to_string(dataset.users.cols()) +
                          ", catalog has " + std::to_string(cat.dim()));
  if (dataset.users.rows() == 0) throw ValidationError("bundle has no users");
  if (!cat.arm_features().allFinite()) throw ValidationError("non-finite arm feature");
  if (!dataset.users.allFinite()) throw ValidationError("non-finite user feature");

  const Eigen::MatrixXd rewards = cat.arm_features() * dataset.users.transpose();
  Eigen::Index arm = 0, user = 0;
  const double lo = rewards.minCoeff(&arm, &user);
  if (lo < -kRewardRangeTolerance)
    throw ValidationError("expected reward of arm " + std::to_string(arm) + " for user " +
                          std::to_string(user) + " is " + format_double(lo) + " < 0");
  const double hi = rewards.maxCoeff(&arm, &user);
  if (hi > 1.0 + kRewardRangeTolerance)
    throw ValidationError("expected reward of arm " + std::to_string(arm) + " for user " +
                          std::to_string(user) + " is " + format_double(hi) + " > 1");
}

BundleStats bundle_stats(const Dataset& dataset) {
  const auto& cat = dataset.catalog;
  BundleStats s;
  s.d = static_cast<std::size_t>(cat.dim());
  s.num_arms = cat.num_arms();
  s.num_keyterms = cat.num_keyterms();
  s.num_users = dataset.num_users();
  const double edges = static_cast<double>(cat.graph().edges().size());
  s.avg_keyterms_per_arm = edges / static_cast<double>(s.num_arms);
  s.avg_arms_per_keyterm = edges / static_cast<double>(s.num_keyterms);
  const Eigen::MatrixXd rewards = cat.arm_features() * dataset.users.transpose();
  s.min_expected_reward = rewards.minCoeff();
  s.max_expected_reward = rewards.maxCoeff();
  return s;
}

Dataset load_bundle(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw IoError("bundle directory " + dir.string() + " does not exist");

  const auto meta_file = dir / "meta.tsv";
  const auto meta_lines = read_lines(meta_file);
  if (meta_lines.size() != 1) bad(meta_file, 1, "expected a single line");
  std::size_t d = 0, num_arms = 0, num_keyterms = 0, num_users = 0;
  int found = 0;
  for (const auto& field : split_tabs(meta_lines[0])) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) bad(meta_file, 1, "field '" + field + "' is not key=value");
    const auto key = field.substr(0, eq);
    const auto value = parse_index(field.substr(eq + 1), meta_file, 1);
    if (key == "d") d = value;
    else if (key == "num_arms") num_arms = value;
    else if (key == "num_keyterms") num_keyterms = value;
    else if (key == "num_users") num_users = value;
    else bad(meta_file, 1, "unknown key '" + key + "'");
    ++found;
  }
  if (found != 4 || d == 0 || num_arms == 0 || num_keyterms == 0 || num_users == 0)
    bad(meta_file, 1, "d, num_arms, num_keyterms and num_users must all be positive");

  Eigen::MatrixXd arms = read_feature_table(dir / "arms.tsv", num_arms, d);
  Eigen::MatrixXd users = read_feature_table(dir / "users.tsv", num_users, d);

  const auto graph_file = dir / "graph.tsv";
  const auto graph_lines = read_lines(graph_file);
  std::vector<Edge> edges;
  edges.reserve(graph_lines.size());
  for (std::size_t i = 0; i < graph_lines.size(); ++i) {
    const auto fields = split_tabs(graph_lines[i]);
    if (fields.size() != 3) bad(graph_file, i + 1, "expected 3 fields");
    edges.push_back({parse_index(fields[0], graph_file, i + 1), parse_index(fields[1], graph_file, i + 1),
                     parse_real(fields[2], graph_file, i + 1)});
  }

  RelationGraph graph = [&] {
    try {
      return RelationGraph::build(num_arms, num_keyterms, std::move(edges));
    } catch (const InvalidGraph& e) {
      throw ValidationError(std::string("graph.tsv: ") + e.what());
    }
  }();
  Dataset ds{Catalog(std::move(graph), std::move(arms)), std::move(users)};
  validate_dataset(ds);
  return ds;
}

void write_bundle(const fs::path& dir, const Dataset& dataset) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
  const auto& cat = dataset.catalog;
  {
    std::ofstream out(dir / "meta.tsv", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "meta.tsv").string());
    out << "d=" << cat.dim() << "\tnum_arms=" << cat.num_arms() << "\tnum_keyterms=" << cat.num_keyterms()
        << "\tnum_users=" << dataset.num_users() << '\n';
  }
  write_feature_table(dir / "arms.tsv", cat.arm_features());
  {
    std::ofstream out(dir / "graph.tsv", std::ios::binary);
    if (!out) throw IoError("cannot write " + (dir / "graph.tsv").string());
    for (const auto& e : cat.graph().edges())
      out << e.arm << '\t' << e.keyterm << '\t' << format_double(e.weight) << '\n';
    if (!out) throw IoError("error writing graph.tsv");
  }
  write_feature_table(dir / "users.tsv", dataset.users);
}

}  // namespace relbandit
