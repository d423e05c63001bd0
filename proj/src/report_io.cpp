#include <cmath>
#include <set>
#include <type_traits>

#include "io_util.hpp"
#include "oddforge/dqr_verify.hpp"
#include "oddforge/error.hpp"

namespace oddforge {

using ojson = nlohmann::ordered_json;
using nlohmann::json;

namespace {

ojson metric_value(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson result_to_json(const DqrResult& r) {
  ojson out;
  out["requirement"] = std::string(to_string(r.requirement));
  out["verdict"] = std::string(to_string(r.verdict));
  ojson metrics = ojson::object();
  for (const auto& [k, v] : r.metrics) metrics[k] = metric_value(v);
  out["metrics"] = std::move(metrics);
  ojson thresholds = ojson::object();
  for (const auto& [k, t] : r.thresholds) {
    thresholds[k] = {{"bound", t.bound == Bound::AtMost ? "<=" : ">="}, {"value", t.value}};
  }
  out["thresholds"] = std::move(thresholds);
  out["failed"] = r.verdict == Verdict::Advisory ? std::vector<std::string>{} : r.failed_metrics();
  out["note"] = r.note;
  out["evidence"] = r.evidence;
  return out;
}

// Key checking for the thresholds document.
class Section {
 public:
  Section(const json& doc, const char* name) : name_(name) {
    auto it = doc.find(name);
    if (it == doc.end()) return;
    if (!it->is_object()) throw ConfigError(std::string("thresholds: '") + name + "' must be an object");
    obj_ = &*it;
  }

  template <class T>
  void read(const char* key, T& target) {
    seen_.insert(key);
    if (!obj_) return;
    auto it = obj_->find(key);
    if (it == obj_->end()) return;
    try {
      if constexpr (std::is_same_v<T, Interval>) {
        const auto pair = it->template get<std::array<double, 2>>();
        target = Interval{pair[0], pair[1]};
      } else if constexpr (std::is_integral_v<T> && !std::is_same_v<T, bool>) {
        if (!it->is_number_integer() || (std::is_unsigned_v<T> && !it->is_number_unsigned())) throw ConfigError("");
        target = it->template get<T>();
      } else {
        target = it->template get<T>();
      }
    } catch (const std::exception&) {
      throw ConfigError(std::string("thresholds: ") + name_ + "." + key + " has the wrong type");
    }
  }

  void reject_unknown() const {
    if (!obj_) return;
    for (const auto& [k, v] : obj_->items()) {
      if (!seen_.contains(k)) throw ConfigError(std::string("thresholds: unknown key ") + name_ + "." + k);
    }
  }

 private:
  const char* name_;
  const json* obj_{nullptr};
  std::set<std::string, std::less<>> seen_;
};

}  // namespace

ojson report_to_json(const DqrReport& report) {
  ojson out;
  out["odd_version"] = report.odd_version;
  out["timestamp"] = report.timestamp;
  out["overall"] = report.overall ? "pass" : "fail";
  ojson splits = ojson::array();
  for (const auto& s : report.splits) {
    splits.push_back({{"name", s.name}, {"records", s.records}, {"synthetic", s.synthetic}, {"real", s.real}});
  }
  out["splits"] = std::move(splits);
  out["config"] = report.config;
  ojson results = ojson::array();
  for (const auto& r : report.results) results.push_back(result_to_json(r));
  out["results"] = std::move(results);
  return out;
}

std::string serialize_report(const DqrReport& report) { return report_to_json(report).dump(2) + "\n"; }

void write_report(const DqrReport& report, const std::filesystem::path& path) {
  detail::write_text_file(path, serialize_report(report));
}

std::string serialize_histogram_csv(const FeatureHistograms& h) {
  std::string out = "feature,bin_low,bin_high,train_count,test_count\n";
  for (std::size_t i = 0; i < h.train.bins(); ++i) {
    out += h.feature + "," + detail::format_double(h.train.bin_low(i)) + "," +
           detail::format_double(h.train.bin_high(i)) + "," + detail::format_double(h.train.counts[i]) + "," +
           detail::format_double(h.test.counts[i]) + "\n";
  }
  return out;
}

std::vector<std::filesystem::path> write_histograms(const std::vector<FeatureHistograms>& histograms,
                                                    const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> paths;
  for (const auto& h : histograms) {
    paths.push_back(dir / ("histogram_" + h.feature + ".csv"));
    detail::write_text_file(paths.back(), serialize_histogram_csv(h));
  }
  return paths;
}

VerifyConfig parse_thresholds(std::string_view text, VerifyConfig base) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("thresholds file does not parse: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("thresholds file must hold a JSON object");
  for (const auto& [k, v] : doc.items()) {
    if (k != "completeness" && k != "representativeness" && k != "accuracy") {
      throw ConfigError("thresholds: unknown section '" + k + "'");
    }
  }

  auto& c = base.completeness;
  Section comp(doc, "completeness");
  comp.read("cone_grid", c.cone_grid);
  comp.read("attitude_grid", c.attitude_grid);
  comp.read("min_per_cell", c.min_per_cell);
  comp.read("cone_coverage_min", c.cone_coverage_min);
  comp.read("attitude_coverage_min", c.attitude_coverage_min);
  comp.read("min_airports", c.min_airports);
  comp.reject_unknown();

  auto& r = base.representativeness;
  Section rep(doc, "representativeness");
  rep.read("bins", r.bins);
  rep.read("divergence_max", r.divergence_max);
  rep.read("aspect_band", r.aspect_band);
  rep.read("aspect_floor", r.aspect_floor);
  rep.read("fill_band", r.fill_band);
  rep.read("fill_floor", r.fill_floor);
  rep.read("area_min_px2", r.area_min_px2);
  rep.read("area_floor", r.area_floor);
  rep.read("range_coverage_min", r.range_coverage_min);
  rep.read("per_airport", r.per_airport);
  rep.reject_unknown();

  Section acc(doc, "accuracy");
  acc.read("reprojection_tol_px", base.accuracy.reprojection_tol_px);
  acc.reject_unknown();

  base.validate();
  return base;
}

VerifyConfig load_thresholds(const std::filesystem::path& path, VerifyConfig base) {
  return parse_thresholds(detail::read_text_file(path), std::move(base));
}

ojson thresholds_to_json(const VerifyConfig& cfg) {
  const auto& c = cfg.completeness;
  const auto& r = cfg.representativeness;
  ojson out;
  out["completeness"] = {{"cone_grid", c.cone_grid},
                         {"attitude_grid", c.attitude_grid},
                         {"min_per_cell", c.min_per_cell},
                         {"cone_coverage_min", c.cone_coverage_min},
                         {"attitude_coverage_min", c.attitude_coverage_min},
                         {"min_airports", c.min_airports}};
  out["representativeness"] = {{"bins", r.bins},
                               {"divergence_max", r.divergence_max},
                               {"aspect_band", {r.aspect_band.min, r.aspect_band.max}},
                               {"aspect_floor", r.aspect_floor},
                               {"fill_band", {r.fill_band.min, r.fill_band.max}},
                               {"fill_floor", r.fill_floor},
                               {"area_min_px2", r.area_min_px2},
                               {"area_floor", r.area_floor},
                               {"range_coverage_min", r.range_coverage_min},
                               {"per_airport", r.per_airport}};
  out["accuracy"] = {{"reprojection_tol_px", cfg.accuracy.reprojection_tol_px}};
  return out;
}

}  // namespace oddforge
