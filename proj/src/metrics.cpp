#include "rpbf/metrics.hpp"

#include <algorithm>
#include <ostream>

#include <json.hpp>

namespace rpbf {

std::uint64_t useful_ops(const GemmProblem& p) {
  return std::uint64_t{8} * p.batch * p.m * p.n * p.k;
}

std::uint64_t bytes_model(const GemmProblem& p) {
  const std::uint64_t inputs = std::uint64_t{p.m} * p.k + std::uint64_t{p.k} * p.n;
  const std::uint64_t outputs = std::uint64_t{2} * 4 * p.m * p.n;
  if (p.precision == Precision::half) return p.batch * (std::uint64_t{2} * 2 * inputs + outputs);
  return p.batch * (2 * inputs / 8 + outputs);
}

MetricsRecord MetricsRecord::from_run(const GemmProblem& p, double seconds, std::optional<double> joules) {
  MetricsRecord r;
  r.problem = p;
  r.ops = useful_ops(p);
  r.bytes = bytes_model(p);
  r.seconds = seconds;
  r.joules = joules;
  return r;
}

std::optional<double> MetricsRecord::ops_per_joule() const {
  if (!joules || *joules <= 0.0) return std::nullopt;
  return static_cast<double>(ops) / *joules;
}

double MachineCeiling::attainable(Precision p, double ai) const {
  return std::min(peak_compute(p), ai * peak_bandwidth);
}

std::string_view to_string(Bound b) noexcept { return b == Bound::memory ? "memory" : "compute"; }

std::vector<ReportRow> roofline_report(std::span<const MetricsRecord> samples, const MachineCeiling& ceiling) {
  std::vector<ReportRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) {
    const double ai = s.arithmetic_intensity();
    const Precision p = s.problem.precision;
    rows.push_back(ReportRow{s, ceiling.attainable(p, ai), ai < ceiling.ridge_point(p) ? Bound::memory : Bound::compute});
  }
  return rows;
}

std::vector<ReportRow> unclassified_rows(std::span<const MetricsRecord> samples) {
  std::vector<ReportRow> rows;
  rows.reserve(samples.size());
  for (const auto& s : samples) rows.push_back(ReportRow{s, std::nullopt, std::nullopt});
  return rows;
}

void write_csv(std::ostream& os, std::span<const ReportRow> rows) {
  bool first = true;
  for (const char* col : kReportColumns) {
    os << (first ? "" : ",") << col;
    first = false;
  }
  os << '\n';
  const auto old_precision = os.precision(10);
  for (const auto& row : rows) {
    const auto& r = row.record;
    os << to_string(r.problem.precision) << ',' << r.problem.batch << ',' << r.problem.m << ',' << r.problem.n << ','
       << r.problem.k << ',' << r.ops << ',' << r.bytes << ',' << r.arithmetic_intensity() << ',' << r.seconds << ','
       << r.ops_per_second() << ',';
    if (r.joules) os << *r.joules;
    os << ',';
    if (auto opj = r.ops_per_joule()) os << *opj;
    os << ',';
    if (row.bound) os << to_string(*row.bound);
    os << '\n';
  }
  os.precision(old_precision);
}

void write_json(std::ostream& os, std::span<const ReportRow> rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& row : rows) {
    const auto& r = row.record;
    nlohmann::json j;
    j["precision"] = std::string(to_string(r.problem.precision));
    j["batch"] = r.problem.batch;
    j["M"] = r.problem.m;
    j["N"] = r.problem.n;
    j["K"] = r.problem.k;
    j["ops"] = r.ops;
    j["bytes"] = r.bytes;
    j["ai"] = r.arithmetic_intensity();
    j["seconds"] = r.seconds;
    j["ops_per_s"] = r.ops_per_second();
    j["joules"] = r.joules ? nlohmann::json(*r.joules) : nlohmann::json(nullptr);
    const auto opj = r.ops_per_joule();
    j["ops_per_j"] = opj ? nlohmann::json(*opj) : nlohmann::json(nullptr);
    j["bound"] = row.bound ? nlohmann::json(std::string(to_string(*row.bound))) : nlohmann::json(nullptr);
    out.push_back(std::move(j));
  }
  os << out.dump(2) << '\n';
}

}  // namespace rpbf
