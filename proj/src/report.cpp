#include "gapamp/report.hpp"

#include "gapamp/io.hpp"
#include "gapamp/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gapamp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

double cell(const CsvData& d, const std::vector<std::string>& row, const std::string& col) {
  const int c = d.column(col);
  if (c < 0) throw std::invalid_argument("missing column '" + col + "'");
  std::size_t used = 0;
  const std::string& s = row[static_cast<std::size_t>(c)];
  const double v = std::stod(s, &used);
  if (used != s.size()) throw std::invalid_argument("bad number '" + s + "'");
  return v;
}

std::optional<double> slope_of(std::vector<double> xs, std::vector<double> ys) {
  std::vector<double> x, y;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (xs[i] > 0.0 && ys[i] > 0.0) {
      x.push_back(xs[i]);
      y.push_back(ys[i]);
    }
  }
  if (x.size() < 2) return std::nullopt;
  return loglog_slope(x, y);
}

json slopes_for(const std::string& name, const CsvData& d) {
  json out = json::object();
  if (name == "trotter_sweep.csv") {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_order;
    for (const auto& r : d.rows) {
      auto& [x, y] = by_order[static_cast<int>(cell(d, r, "order"))];
      x.push_back(cell(d, r, "steps"));
      y.push_back(cell(d, r, "error_norm"));
    }
    for (auto& [o, xy] : by_order)
      if (auto s = slope_of(xy.first, xy.second)) out["error_vs_steps_order" + std::to_string(o)] = *s;
  } else if (name == "trotter_calls.csv") {
    std::map<int, std::pair<std::vector<double>, std::vector<double>>> by_order;
    for (const auto& r : d.rows) {
      auto& [x, y] = by_order[static_cast<int>(cell(d, r, "order"))];
      x.push_back(cell(d, r, "L") * cell(d, r, "t"));
      y.push_back(cell(d, r, "calls"));
    }
    for (auto& [o, xy] : by_order)
      if (auto s = slope_of(xy.first, xy.second)) out["calls_vs_Lt_order" + std::to_string(o)] = *s;
  } else if (name == "lattice_scan.csv") {
    std::vector<double> x, y;
    for (const auto& r : d.rows) {
      x.push_back(cell(d, r, "M"));
      y.push_back(cell(d, r, "gap"));
    }
    if (auto s = slope_of(x, y)) out["gap_vs_M"] = *s;
  } else if (name == "mc_mix.csv") {
    std::map<double, std::vector<double>> by_m;
    for (const auto& r : d.rows) by_m[cell(d, r, "M")].push_back(cell(d, r, "hitting_time"));
    std::vector<double> x, y;
    for (auto& [m, h] : by_m) {
      std::sort(h.begin(), h.end());
      x.push_back(m);
      y.push_back(h[h.size() / 2]);
    }
    if (auto s = slope_of(x, y)) out["median_hitting_time_vs_M"] = *s;
  }
  return out;
}

}  // namespace

json build_report(const fs::path& dir) {
  json report = {{"files", json::object()}, {"slopes", json::object()}, {"errors", json::array()},
                 {"totals", {{"rows", 0}, {"passed", 0}, {"failed", 0}}}};
  std::error_code ec;
  if (!fs::is_directory(dir, ec)) {
    if (fs::exists(dir, ec)) report["errors"].push_back({{"file", dir.string()}, {"reason", "not a directory"}});
    return report;
  }
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir, ec))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());

  for (const auto& f : files) {
    const std::string rel = fs::relative(f, dir).generic_string();
    try {
      const CsvData d = parse_csv(read_text(f));
      json entry = {{"rows", d.rows.size()}};
      const int pc = d.column("pass");
      if (pc >= 0) {
        std::size_t pass = 0, fail = 0;
        for (const auto& r : d.rows) {
          const std::string& v = r[static_cast<std::size_t>(pc)];
          if (v == "true") ++pass;
          else if (v == "false") ++fail;
          else throw std::invalid_argument("pass column holds '" + v + "'");
        }
        entry["passed"] = pass;
        entry["failed"] = fail;
        report["totals"]["rows"] = report["totals"]["rows"].get<std::size_t>() + d.rows.size();
        report["totals"]["passed"] = report["totals"]["passed"].get<std::size_t>() + pass;
        report["totals"]["failed"] = report["totals"]["failed"].get<std::size_t>() + fail;
      }
      const json s = slopes_for(f.filename().string(), d);
      if (!s.empty()) report["slopes"][rel] = s;
      report["files"][rel] = entry;
    } catch (const std::exception& e) {
      report["errors"].push_back({{"file", rel}, {"reason", e.what()}});
    }
  }
  return report;
}

}  // namespace gapamp
