#include "oddforge/dqr_verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <iterator>
#include <limits>
#include <set>

#include "io_util.hpp"
#include "oddforge/error.hpp"
#include "oddforge/odd_spec_io.hpp"
#include "parallel.hpp"

namespace oddforge {

using ojson = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr std::size_t kEvidenceListCap = 50;

bool corners_finite(const Corners& c) {
  return std::all_of(c.begin(), c.end(), [](const PixelPoint& p) { return p.finite(); });
}

bool bbox_finite(const BBox& b) {
  return std::isfinite(b.x_min) && std::isfinite(b.y_min) && std::isfinite(b.x_max) && std::isfinite(b.y_max);
}

bool is_cone_parameter(const std::string& name) {
  const auto& names = cone_parameter_names();
  return std::find(names.begin(), names.end(), name) != names.end();
}

double fraction(std::size_t num, std::size_t den) {
  return den == 0 ? kNaN : static_cast<double>(num) / static_cast<double>(den);
}

std::vector<double> collect(const DatasetSplit& split, const std::string& name) {
  std::vector<double> out;
  out.reserve(split.records.size());
  for (const auto& r : split.records) {
    if (auto v = feature_value(r, name)) out.push_back(*v);
  }
  return out;
}

Interval pooled_range(const std::vector<double>& a, const std::vector<double>& b) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto* v : {&a, &b}) {
    for (double x : *v) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  }
  if (!(lo < hi)) return {lo - 0.5, hi + 0.5};
  return {lo, hi};
}

struct GridCoverage {
  std::size_t cells{};
  std::size_t covered{};
};

GridCoverage grid_coverage(const std::vector<Pose>& poses, const ApproachCone& cone,
                           const std::array<std::string_view, 3>& axes, const std::array<int, 3>& bins, int min_per_cell) {
  const std::size_t n0 = static_cast<std::size_t>(bins[0]);
  const std::size_t n1 = static_cast<std::size_t>(bins[1]);
  const std::size_t n2 = static_cast<std::size_t>(bins[2]);
  std::vector<int> counts(n0 * n1 * n2, 0);
  for (const auto& p : poses) {
    const std::size_t i = bin_index(p.get(axes[0]), cone.get(axes[0]), n0);
    const std::size_t j = bin_index(p.get(axes[1]), cone.get(axes[1]), n1);
    const std::size_t k = bin_index(p.get(axes[2]), cone.get(axes[2]), n2);
    ++counts[(i * n1 + j) * n2 + k];
  }
  GridCoverage g{counts.size(), 0};
  for (int c : counts) g.covered += c >= min_per_cell ? 1 : 0;
  return g;
}

struct CompletenessOne {
  double cone_coverage{};
  double attitude_coverage{};
  std::size_t airports{};
  ojson evidence;
};

CompletenessOne completeness_of(const DatasetSplit& split, const ApproachCone& cone, const CompletenessConfig& cfg) {
  CompletenessOne out;
  std::set<std::string> airports;
  std::vector<Pose> inside;
  std::size_t with_pose = 0;
  for (const auto& r : split.records) {
    airports.insert(r.airport_id);
    if (!r.pose) continue;
    ++with_pose;
    if (contains(cone, *r.pose)) inside.push_back(*r.pose);
  }
  if (!split.records.empty() && with_pose == 0) {
    throw NotApplicableError(std::string(to_string(split.name)) + " split has no record with a pose");
  }
  const auto cone_grid = grid_coverage(inside, cone, {param::kAlongTrack, param::kLateralPath, param::kVerticalPath},
                                       cfg.cone_grid, cfg.min_per_cell);
  const auto att_grid =
      grid_coverage(inside, cone, {param::kYaw, param::kPitch, param::kRoll}, cfg.attitude_grid, cfg.min_per_cell);
  out.cone_coverage = fraction(cone_grid.covered, cone_grid.cells);
  out.attitude_coverage = fraction(att_grid.covered, att_grid.cells);
  out.airports = airports.size();
  out.evidence = {{"split", std::string(to_string(split.name))},
                  {"records", split.records.size()},
                  {"pose_records", with_pose},
                  {"outside_cone", with_pose - inside.size()},
                  {"cone_cells", cone_grid.cells},
                  {"cone_cells_covered", cone_grid.covered},
                  {"attitude_cells", att_grid.cells},
                  {"attitude_cells_covered", att_grid.covered},
                  {"airports", out.airports}};
  return out;
}

ojson capped_list(const std::vector<ojson>& items) {
  ojson arr = ojson::array();
  for (std::size_t i = 0; i < items.size() && i < kEvidenceListCap; ++i) arr.push_back(items[i]);
  return arr;
}

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

DqrResult not_applicable(Requirement requirement, const std::string& reason) {
  DqrResult r;
  r.requirement = requirement;
  r.verdict = Verdict::Fail;
  r.note = "not applicable: " + reason;
  r.evidence["not_applicable"] = reason;
  return r;
}

}  // namespace

std::string_view to_string(Requirement requirement) {
  switch (requirement) {
    case Requirement::Suitability:
      return "suitability";
    case Requirement::Completeness:
      return "completeness";
    case Requirement::Representativeness:
      return "representativeness";
    case Requirement::Accuracy:
      return "accuracy";
  }
  return "completeness";
}

std::string_view to_string(Verdict verdict) {
  switch (verdict) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Advisory:
      return "advisory";
  }
  return "fail";
}

bool Threshold::satisfied_by(double metric) const {
  if (std::isnan(metric)) return false;
  return bound == Bound::AtMost ? metric <= value : metric >= value;
}

std::vector<std::string> DqrResult::failed_metrics() const {
  std::vector<std::string> out;
  for (const auto& [name, t] : thresholds) {
    auto it = metrics.find(name);
    if (it == metrics.end() || !t.satisfied_by(it->second)) out.push_back(name);
  }
  return out;
}

void settle_verdict(DqrResult& result) {
  if (result.verdict == Verdict::Advisory) return;
  result.verdict = result.failed_metrics().empty() ? Verdict::Pass : Verdict::Fail;
}

unsigned worker_threads() {
  unsigned n = std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("ODD_FORGE_THREADS"); env && *env) {
    auto cap = detail::parse_int(env);
    if (!cap || *cap < 1) throw ConfigError(std::string("ODD_FORGE_THREADS must be a positive integer, got '") + env + "'");
    n = std::min<unsigned>(n, static_cast<unsigned>(std::min<long long>(*cap, 1 << 16)));
  }
  return n;
}

std::vector<HistogramSpec> default_histogram_specs(const ApproachCone& cone, std::size_t bins) {
  std::vector<HistogramSpec> specs{
      {feature::center_x, bins, Interval{0.0, 1.0}},     {feature::center_y, bins, Interval{0.0, 1.0}},
      {feature::aspect_ratio, bins, Interval{0.0, 3.0}}, {feature::fill_ratio, bins, Interval{0.0, 1.0}},
      {feature::bbox_area_log, bins, Interval{1.0, 7.0}}, {feature::slant_distance, bins, std::nullopt},
      {feature::time_to_landing, bins, std::nullopt},
  };
  for (const auto& name : cone_parameter_names()) specs.push_back({name, bins, cone.get(name)});
  return specs;
}

std::optional<double> feature_value(const DatasetRecord& r, const std::string& name) {
  const Corners& c = r.label.corners;
  const BBox& b = r.label.bbox;
  if (name == feature::center_x || name == feature::center_y) {
    if (!corners_finite(c) || r.image_size.width <= 0 || r.image_size.height <= 0) return std::nullopt;
    const PixelPoint p = runway_center(c);
    return name == feature::center_x ? p.u / r.image_size.width : p.v / r.image_size.height;
  }
  if (name == feature::aspect_ratio) {
    if (!bbox_finite(b) || !(b.width() > 0.0)) return std::nullopt;
    return aspect_ratio(b);
  }
  if (name == feature::fill_ratio) {
    if (!is_simple_quad(c)) return std::nullopt;
    return fill_ratio(c);
  }
  if (name == feature::bbox_area_log) {
    if (!bbox_finite(b) || !(b.area() > 0.0)) return std::nullopt;
    return std::log10(b.area());
  }
  if (name == feature::slant_distance) return r.slant_distance_m;
  if (name == feature::time_to_landing) return r.time_to_landing_s;
  if (is_cone_parameter(name)) {
    if (!r.pose) return std::nullopt;
    return r.pose->get(name);
  }
  throw InvalidInputError("unknown feature '" + name + "'");
}

void VerifyConfig::validate() const {
  auto fraction_ok = [](double v) { return v >= 0.0 && v <= 1.0; };
  const auto& c = completeness;
  for (int b : c.cone_grid) {
    if (b < 1) throw ConfigError("completeness cone_grid bins must be >= 1");
  }
  for (int b : c.attitude_grid) {
    if (b < 1) throw ConfigError("completeness attitude_grid bins must be >= 1");
  }
  if (c.min_per_cell < 1) throw ConfigError("completeness min_per_cell must be >= 1");
  if (!fraction_ok(c.cone_coverage_min) || !fraction_ok(c.attitude_coverage_min)) {
    throw ConfigError("completeness coverage thresholds must lie in [0, 1]");
  }
  if (c.min_airports < 0) throw ConfigError("completeness min_airports must be >= 0");
  const auto& r = representativeness;
  if (r.bins < 2) throw ConfigError("representativeness bins must be >= 2");
  for (const auto& s : r.specs) {
    if (s.bins < 2) throw ConfigError("histogram " + s.feature + ": bins must be >= 2");
    if (s.range && !(s.range->min < s.range->max)) throw ConfigError("histogram " + s.feature + ": degenerate range");
  }
  if (!(r.divergence_max >= 0.0 && r.divergence_max <= std::log(2.0))) {
    throw ConfigError("representativeness divergence_max must lie in [0, ln 2]");
  }
  if (!fraction_ok(r.aspect_floor) || !fraction_ok(r.fill_floor) || !fraction_ok(r.area_floor) ||
      !fraction_ok(r.range_coverage_min)) {
    throw ConfigError("representativeness floors must lie in [0, 1]");
  }
  if (r.aspect_band.empty() || r.fill_band.empty()) throw ConfigError("representativeness bands must have min <= max");
  if (!(r.area_min_px2 >= 0.0)) throw ConfigError("representativeness area_min_px2 must be >= 0");
  if (!(accuracy.reprojection_tol_px >= 0.0)) throw ConfigError("accuracy reprojection_tol_px must be >= 0");
  try {
    camera.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
}

DqrResult check_completeness(const std::vector<const DatasetSplit*>& splits, const ApproachCone& cone,
                             const CompletenessConfig& cfg) {
  DqrResult res;
  res.requirement = Requirement::Completeness;
  double cone_cov = std::numeric_limits<double>::infinity();
  double att_cov = cone_cov;
  double airports = cone_cov;
  ojson per_split = ojson::array();
  for (const auto* split : splits) {
    auto one = completeness_of(*split, cone, cfg);
    cone_cov = std::min(cone_cov, one.cone_coverage);
    att_cov = std::min(att_cov, one.attitude_coverage);
    airports = std::min(airports, static_cast<double>(one.airports));
    per_split.push_back(std::move(one.evidence));
  }
  if (splits.empty()) cone_cov = att_cov = airports = 0.0;
  res.metrics = {{"cone_coverage", cone_cov}, {"attitude_coverage", att_cov}, {"airport_count", airports}};
  res.thresholds = {{"cone_coverage", {cfg.cone_coverage_min, Bound::AtLeast}},
                    {"attitude_coverage", {cfg.attitude_coverage_min, Bound::AtLeast}},
                    {"airport_count", {static_cast<double>(cfg.min_airports), Bound::AtLeast}}};
  res.evidence["splits"] = std::move(per_split);
  settle_verdict(res);
  return res;
}

DqrResult check_completeness(const DatasetSplit& split, const ApproachCone& cone, const CompletenessConfig& cfg) {
  return check_completeness(std::vector<const DatasetSplit*>{&split}, cone, cfg);
}

BandCounts count_bands(const DatasetSplit& split, const RepresentativenessConfig& cfg) {
  BandCounts c;
  for (const auto& r : split.records) {
    if (!corners_finite(r.label.corners)) continue;
    ++c.labelled;
    const BBox& b = r.label.bbox;
    if (bbox_finite(b) && b.width() > 0.0 && cfg.aspect_band.contains(aspect_ratio(b))) ++c.aspect_in_band;
    if (is_simple_quad(r.label.corners) && cfg.fill_band.contains(fill_ratio(r.label.corners))) ++c.fill_in_band;
    if (bbox_finite(b) && b.area() >= cfg.area_min_px2) ++c.area_at_least;
  }
  return c;
}

DqrResult check_representativeness(const DatasetSplit& train, const DatasetSplit& test, const ApproachCone& cone,
                                   const RepresentativenessConfig& cfg, std::vector<FeatureHistograms>* histograms) {
  if (train.records.empty()) throw NotApplicableError("train split is empty");
  if (test.records.empty()) throw NotApplicableError("test split is empty");
  const auto specs = cfg.specs.empty() ? default_histogram_specs(cone, cfg.bins) : cfg.specs;

  struct FeatureOutcome {
    std::optional<FeatureHistograms> hist;
    std::string skipped;
    std::size_t train_n{};
    std::size_t test_n{};
    std::optional<double> range_coverage;
    ojson per_airport;
  };
  std::vector<FeatureOutcome> outcomes(specs.size());
  detail::parallel_for(specs.size(), [&](std::size_t i) {
    const auto& spec = specs[i];
    FeatureOutcome& out = outcomes[i];
    const auto a = collect(train, spec.feature);
    const auto b = collect(test, spec.feature);
    out.train_n = a.size();
    out.test_n = b.size();
    if (a.empty() || b.empty()) {
      out.skipped = a.empty() ? "absent from train split" : "absent from test split";
      return;
    }
    const Interval range = spec.range ? *spec.range : pooled_range(a, b);
    FeatureHistograms h{spec.feature, make_histogram(a, range, spec.bins), make_histogram(b, range, spec.bins), 0.0};
    h.divergence = jensen_shannon(h.train.counts, h.test.counts);
    out.hist = std::move(h);
    if (is_cone_parameter(spec.feature)) {
      const Interval odd = cone.get(spec.feature);
      const auto [lo, hi] = std::minmax_element(b.begin(), b.end());
      out.range_coverage = (std::min(*hi, odd.max) - std::max(*lo, odd.min)) / odd.width();
      out.range_coverage = std::max(0.0, *out.range_coverage);
    }
    if (cfg.per_airport) {
      std::set<std::string> airports;
      for (const auto& r : train.records) airports.insert(r.airport_id);
      out.per_airport = ojson::object();
      for (const auto& ap : airports) {
        DatasetSplit ta{train.name, {}};
        DatasetSplit tb{test.name, {}};
        std::copy_if(train.records.begin(), train.records.end(), std::back_inserter(ta.records),
                     [&](const DatasetRecord& r) { return r.airport_id == ap; });
        std::copy_if(test.records.begin(), test.records.end(), std::back_inserter(tb.records),
                     [&](const DatasetRecord& r) { return r.airport_id == ap; });
        const auto va = collect(ta, spec.feature);
        const auto vb = collect(tb, spec.feature);
        if (va.empty() || vb.empty()) continue;
        out.per_airport[ap] = jensen_shannon(make_histogram(va, range, spec.bins).counts,
                                             make_histogram(vb, range, spec.bins).counts);
      }
    }
  });

  DqrResult res;
  res.requirement = Requirement::Representativeness;
  ojson features = ojson::array();
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& spec = specs[i];
    auto& out = outcomes[i];
    ojson ev = {{"feature", spec.feature}, {"train_values", out.train_n}, {"test_values", out.test_n}};
    if (!out.hist) {
      ev["skipped"] = out.skipped;
      features.push_back(std::move(ev));
      continue;
    }
    const std::string key = "divergence." + spec.feature;
    res.metrics[key] = out.hist->divergence;
    res.thresholds[key] = {cfg.divergence_max, Bound::AtMost};
    ev["bins"] = spec.bins;
    ev["range"] = {out.hist->train.range.min, out.hist->train.range.max};
    ev["divergence"] = out.hist->divergence;
    ev["exceeds_threshold"] = out.hist->divergence > cfg.divergence_max;
    if (out.range_coverage) {
      const std::string rkey = "range_coverage." + spec.feature;
      res.metrics[rkey] = *out.range_coverage;
      res.thresholds[rkey] = {cfg.range_coverage_min, Bound::AtLeast};
      ev["test_range_coverage"] = *out.range_coverage;
    }
    if (cfg.per_airport) ev["per_airport_divergence"] = std::move(out.per_airport);
    features.push_back(std::move(ev));
    if (histograms) histograms->push_back(std::move(*out.hist));
  }
  res.evidence["features"] = std::move(features);

  ojson bands = ojson::array();
  for (const auto* split : {&train, &test}) {
    const std::string name(to_string(split->name));
    const BandCounts c = count_bands(*split, cfg);
    res.metrics["aspect_band_fraction." + name] = fraction(c.aspect_in_band, c.labelled);
    res.metrics["fill_band_fraction." + name] = fraction(c.fill_in_band, c.labelled);
    res.metrics["area_fraction." + name] = fraction(c.area_at_least, c.labelled);
    res.thresholds["aspect_band_fraction." + name] = {cfg.aspect_floor, Bound::AtLeast};
    res.thresholds["fill_band_fraction." + name] = {cfg.fill_floor, Bound::AtLeast};
    res.thresholds["area_fraction." + name] = {cfg.area_floor, Bound::AtLeast};
    bands.push_back({{"split", name},
                     {"labelled", c.labelled},
                     {"aspect_in_band", c.aspect_in_band},
                     {"fill_in_band", c.fill_in_band},
                     {"area_at_least", c.area_at_least}});
  }
  res.evidence["bands"] = std::move(bands);
  res.evidence["aspect_band"] = {cfg.aspect_band.min, cfg.aspect_band.max};
  res.evidence["fill_band"] = {cfg.fill_band.min, cfg.fill_band.max};
  res.evidence["area_min_px2"] = cfg.area_min_px2;
  settle_verdict(res);
  return res;
}

DqrResult check_accuracy(const std::vector<const DatasetSplit*>& splits, const CameraModel& cam, const RunwayDb& runways,
                         const AccuracyConfig& cfg) {
  std::vector<const DatasetRecord*> records;
  for (const auto* s : splits) {
    for (const auto& r : s->records) records.push_back(&r);
  }

  struct RecordOutcome {
    std::vector<std::string> structural;
    std::optional<double> error;
    bool unverifiable{false};
  };
  std::vector<RecordOutcome> outcomes(records.size());
  detail::parallel_for(records.size(), [&](std::size_t i) {
    const DatasetRecord& r = *records[i];
    RecordOutcome& out = outcomes[i];
    const Corners& c = r.label.corners;
    if (!corners_finite(c)) {
      out.structural.emplace_back("non-projectable corners");
    } else {
      const bool inside = std::all_of(c.begin(), c.end(), [&](const PixelPoint& p) {
        return p.u >= 0.0 && p.u < r.image_size.width && p.v >= 0.0 && p.v < r.image_size.height;
      });
      if (!inside) out.structural.emplace_back("corner outside image");
      const double near_v = 0.5 * (c[0].v + c[1].v);
      const double far_v = 0.5 * (c[2].v + c[3].v);
      if (!(near_v > far_v)) out.structural.emplace_back("near corners not below far corners");
      if (!std::all_of(c.begin(), c.end(), [&](const PixelPoint& p) { return r.label.bbox.contains(p); })) {
        out.structural.emplace_back("bbox does not contain corners");
      }
    }
    if (r.source != Source::Synthetic || !r.pose) return;
    const RunwayGeometry* rw = runways.find(r.airport_id, r.runway_id);
    if (!rw) {
      out.unverifiable = true;
      return;
    }
    const ImageLabel ref = project_runway(*r.pose, *rw, cam, r.label.margin_px);
    double worst = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      const double e = std::hypot(ref.corners[k].u - c[k].u, ref.corners[k].v - c[k].v);
      worst = std::isnan(e) ? std::numeric_limits<double>::infinity() : std::max(worst, e);
    }
    out.error = worst;
  });

  DqrResult res;
  res.requirement = Requirement::Accuracy;
  std::size_t violations = 0;
  std::size_t verified = 0;
  std::size_t unverifiable = 0;
  std::size_t over_tol = 0;
  std::size_t real = 0;
  double sum = 0.0;
  double worst = 0.0;
  std::vector<ojson> structural_list;
  std::vector<ojson> flagged_list;
  std::vector<ojson> unverifiable_list;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const DatasetRecord& r = *records[i];
    const RecordOutcome& out = outcomes[i];
    if (r.source == Source::Real) ++real;
    if (!out.structural.empty()) {
      ++violations;
      structural_list.push_back({{"image_id", r.image_id}, {"reasons", out.structural}});
    }
    if (out.unverifiable) {
      ++unverifiable;
      unverifiable_list.push_back({{"image_id", r.image_id}, {"runway", r.airport_id + "/" + r.runway_id}});
    }
    if (out.error) {
      ++verified;
      sum += *out.error;
      worst = std::max(worst, *out.error);
      if (!(*out.error <= cfg.reprojection_tol_px)) {
        ++over_tol;
        flagged_list.push_back({{"image_id", r.image_id}, {"error_px", *out.error}});
      }
    }
  }
  res.metrics["records"] = static_cast<double>(records.size());
  res.metrics["structural_violations"] = static_cast<double>(violations);
  res.metrics["synthetic_verified"] = static_cast<double>(verified);
  res.metrics["unverifiable"] = static_cast<double>(unverifiable);
  res.metrics["records_over_tolerance"] = static_cast<double>(over_tol);
  res.thresholds["structural_violations"] = {0.0, Bound::AtMost};
  if (verified > 0) {
    res.metrics["mean_error_px"] = sum / static_cast<double>(verified);
    res.metrics["max_error_px"] = worst;
    res.thresholds["mean_error_px"] = {cfg.reprojection_tol_px, Bound::AtMost};
  }
  res.evidence["structural"] = capped_list(structural_list);
  res.evidence["over_tolerance"] = capped_list(flagged_list);
  res.evidence["unverifiable"] = capped_list(unverifiable_list);
  if (real > 0) {
    res.evidence["real_records"] = real;
    res.note = "real records carry no pose; structural checks only";
  }
  settle_verdict(res);
  return res;
}

DqrResult check_accuracy(const DatasetSplit& split, const CameraModel& cam, const RunwayDb& runways,
                         const AccuracyConfig& cfg) {
  return check_accuracy(std::vector<const DatasetSplit*>{&split}, cam, runways, cfg);
}

DqrResult check_source_suitability(const std::vector<const DatasetSplit*>& splits, std::size_t bins) {
  DqrResult res;
  res.requirement = Requirement::Suitability;
  res.verdict = Verdict::Advisory;
  DatasetSplit synthetic{SplitName::Train, {}};
  DatasetSplit real{SplitName::RealSubset, {}};
  for (const auto* s : splits) {
    for (const auto& r : s->records) (r.source == Source::Real ? real : synthetic).records.push_back(r);
  }
  res.metrics["synthetic_records"] = static_cast<double>(synthetic.records.size());
  res.metrics["real_records"] = static_cast<double>(real.records.size());
  if (real.records.empty()) {
    res.note = "no real-footage baseline";
    return res;
  }
  if (synthetic.records.empty()) {
    res.note = "no synthetic records to compare";
    return res;
  }
  const std::vector<HistogramSpec> specs{{feature::center_x, bins, Interval{0.0, 1.0}},
                                         {feature::center_y, bins, Interval{0.0, 1.0}},
                                         {feature::aspect_ratio, bins, Interval{0.0, 3.0}},
                                         {feature::fill_ratio, bins, Interval{0.0, 1.0}}};
  ojson features = ojson::array();
  for (const auto& spec : specs) {
    const auto a = collect(synthetic, spec.feature);
    const auto b = collect(real, spec.feature);
    ojson ev = {{"feature", spec.feature}, {"synthetic_values", a.size()}, {"real_values", b.size()}};
    if (a.empty() || b.empty()) {
      ev["skipped"] = a.empty() ? "absent from synthetic records" : "absent from real records";
      features.push_back(std::move(ev));
      continue;
    }
    const double d = jensen_shannon(make_histogram(a, *spec.range, spec.bins).counts,
                                     make_histogram(b, *spec.range, spec.bins).counts);
    res.metrics["divergence." + spec.feature] = d;
    ev["divergence"] = d;
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    ev["mean_shift"] = mean(b) - mean(a);
    features.push_back(std::move(ev));
  }
  res.evidence["features"] = std::move(features);
  return res;
}

DqrResult check_source_suitability(const DatasetSplit& split, std::size_t bins) {
  return check_source_suitability(std::vector<const DatasetSplit*>{&split}, bins);
}

const DqrResult& DqrReport::result(Requirement requirement) const {
  for (const auto& r : results) {
    if (r.requirement == requirement) return r;
  }
  throw InvalidInputError("report has no " + std::string(to_string(requirement)) + " result");
}

DqrReport run_all(const DatasetBundle& data, const OddSpec& spec, const VerifyConfig& cfg) {
  cfg.validate();
  check_disjoint(data.train, data.test);
  const ApproachCone cone = spec.cone();

  std::vector<const DatasetSplit*> all{&data.train, &data.test};
  if (data.real_subset) all.push_back(&*data.real_subset);
  const std::vector<const DatasetSplit*> train_test{&data.train, &data.test};

  DqrReport report;
  report.odd_version = spec.version();
  for (const auto* s : all) {
    SplitSummary sum{std::string(to_string(s->name)), s->records.size(), 0, 0};
    for (const auto& r : s->records) ++(r.source == Source::Real ? sum.real : sum.synthetic);
    report.splits.push_back(sum);
  }

  auto guarded = [](Requirement req, auto&& fn) {
    try {
      return fn();
    } catch (const NotApplicableError& e) {
      return not_applicable(req, e.what());
    }
  };
  report.results.push_back(guarded(Requirement::Suitability, [&] {
    return check_source_suitability(all, cfg.representativeness.bins);
  }));
  report.results.push_back(guarded(Requirement::Completeness, [&] {
    return check_completeness(train_test, cone, cfg.completeness);
  }));
  report.results.push_back(guarded(Requirement::Representativeness, [&] {
    return check_representativeness(data.train, data.test, cone, cfg.representativeness, &report.histograms);
  }));
  report.results.push_back(guarded(Requirement::Accuracy, [&] {
    return check_accuracy(all, cfg.camera, cfg.runways, cfg.accuracy);
  }));

  report.overall = std::all_of(report.results.begin(), report.results.end(), [](const DqrResult& r) {
    return r.requirement == Requirement::Suitability || r.verdict == Verdict::Pass;
  });
  report.config["odd_spec"] = ojson::parse(serialize_spec(spec));
  report.config["thresholds"] = thresholds_to_json(cfg);
  report.config["camera"] = {{"focal_px", cfg.camera.focal_px},       {"width_px", cfg.camera.width_px},
                             {"height_px", cfg.camera.height_px},     {"cx", cfg.camera.cx},
                             {"cy", cfg.camera.cy},                   {"crop_top_px", cfg.camera.crop_top_px},
                             {"crop_bottom_px", cfg.camera.crop_bottom_px}};
  report.config["runway_db"] = ojson::parse(serialize_runway_db(cfg.runways))["runways"];
  report.timestamp = utc_timestamp();
  return report;
}

}  // namespace oddforge
