#include "oddforge/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "csv.hpp"
#include "io_util.hpp"
#include "oddforge/error.hpp"

namespace oddforge {

using nlohmann::json;
using ojson = nlohmann::ordered_json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kSchemaVersion = 1;
constexpr double kNormalizedTolerancePx = 1e-6;

const std::vector<std::string>& core_columns() {
  static const std::vector<std::string> cols{
      "image_id",      "source",          "airport",          "runway",         "width",          "height",
      "x1",            "y1",              "x2",               "y2",             "x3",             "y3",
      "x4",            "y4",              "bbox_xmin",        "bbox_ymin",      "bbox_xmax",      "bbox_ymax",
      "slant_distance_m", "time_to_landing_s", "along_track_m", "lateral_deg",  "vertical_deg",   "yaw_deg",
      "pitch_deg",     "roll_deg"};
  return cols;
}

const std::vector<std::string>& extension_columns() {
  static const std::vector<std::string> cols{"margin_px", "fully_visible", "nx1", "ny1", "nx2", "ny2",
                                             "nx3",       "ny3",           "nx4", "ny4", "concepts"};
  return cols;
}

const std::vector<std::string>& pose_columns() {
  static const std::vector<std::string> cols{"along_track_m", "lateral_deg", "vertical_deg",
                                             "yaw_deg",       "pitch_deg",   "roll_deg"};
  return cols;
}

bool same_double(double a, double b) { return a == b || (std::isnan(a) && std::isnan(b)); }

bool same_label(const ImageLabel& a, const ImageLabel& b) {
  for (std::size_t i = 0; i < 4; ++i) {
    if (!same_double(a.corners[i].u, b.corners[i].u) || !same_double(a.corners[i].v, b.corners[i].v)) return false;
  }
  return same_double(a.bbox.x_min, b.bbox.x_min) && same_double(a.bbox.y_min, b.bbox.y_min) &&
         same_double(a.bbox.x_max, b.bbox.x_max) && same_double(a.bbox.y_max, b.bbox.y_max) &&
         same_double(a.margin_px, b.margin_px) && a.fully_visible == b.fully_visible &&
         a.projectable == b.projectable;
}

bool corners_finite(const Corners& c) {
  return std::all_of(c.begin(), c.end(), [](const PixelPoint& p) { return p.finite(); });
}

bool corners_inside(const Corners& c, const ImageSize& size) {
  return std::all_of(c.begin(), c.end(), [&](const PixelPoint& p) {
    return p.finite() && p.u >= 0.0 && p.u < size.width && p.v >= 0.0 && p.v < size.height;
  });
}

struct RowError {
  std::string reason;
};

double cell_number(const std::string& text, const std::string& column) {
  auto v = detail::parse_double(text);
  if (!v) throw RowError{"unparsable " + column + " '" + text + "'"};
  return *v;
}

std::optional<double> cell_optional(const std::string& text, const std::string& column) {
  if (text.empty()) return std::nullopt;
  return cell_number(text, column);
}

int cell_int(const std::string& text, const std::string& column) {
  auto v = detail::parse_int(text);
  if (!v) throw RowError{"unparsable " + column + " '" + text + "'"};
  return static_cast<int>(*v);
}

bool cell_bool(const std::string& text, const std::string& column) {
  if (text == "1" || text == "true") return true;
  if (text == "0" || text == "false") return false;
  throw RowError{"unparsable " + column + " '" + text + "'"};
}

json concepts_to_json(const std::vector<ConceptTag>& concepts) {
  json arr = json::array();
  for (const auto& c : concepts) arr.push_back({{"label", c.label}, {"category", std::string(to_string(c.category))}});
  return arr;
}

std::vector<ConceptTag> concepts_from_json(const json& arr) {
  if (!arr.is_array()) throw RowError{"concepts must be an array"};
  std::vector<ConceptTag> out;
  for (const auto& c : arr) {
    if (!c.is_object() || !c.contains("label") || !c.contains("category") || !c["label"].is_string() ||
        !c["category"].is_string()) {
      throw RowError{"malformed concept tag"};
    }
    auto cat = parse_concept_category(c["category"].get<std::string>());
    if (!cat) throw RowError{"unknown concept category '" + c["category"].get<std::string>() + "'"};
    out.push_back({c["label"].get<std::string>(), *cat});
  }
  return out;
}

// Fields shared by both formats once parsed, prior to schema validation.
void finish_label(DatasetRecord& r, std::optional<bool> fully_visible) {
  r.label.projectable = corners_finite(r.label.corners);
  r.label.fully_visible = fully_visible ? *fully_visible : (r.label.projectable && corners_inside(r.label.corners, r.image_size));
}

void check_normalized(const DatasetRecord& r, const std::array<std::optional<double>, 8>& normalized) {
  for (std::size_t i = 0; i < 4; ++i) {
    const auto& nu = normalized[2 * i];
    const auto& nv = normalized[2 * i + 1];
    const PixelPoint& p = r.label.corners[i];
    if (nu && !(std::isnan(*nu) && std::isnan(p.u)) &&
        !(std::fabs(*nu * r.image_size.width - p.u) <= kNormalizedTolerancePx)) {
      throw RowError{"normalized corner " + std::to_string(i + 1) + " inconsistent with absolute pixels"};
    }
    if (nv && !(std::isnan(*nv) && std::isnan(p.v)) &&
        !(std::fabs(*nv * r.image_size.height - p.v) <= kNormalizedTolerancePx)) {
      throw RowError{"normalized corner " + std::to_string(i + 1) + " inconsistent with absolute pixels"};
    }
  }
}

void finalize_load(LoadResult& result) {
  if (result.input_rows > 0 && 2 * result.rejections.size() > result.input_rows) {
    std::string first = result.rejections.front().reason;
    throw FormatError(std::to_string(result.rejections.size()) + " of " + std::to_string(result.input_rows) +
                      " rows rejected (first: row " + std::to_string(result.rejections.front().row) + ": " + first +
                      ")");
  }
}

void accept_or_reject(LoadResult& result, std::unordered_set<std::string>& ids, std::size_t row, DatasetRecord record) {
  auto reasons = validate_record(record);
  if (!reasons.empty()) {
    result.rejections.push_back({row, record.image_id, reasons.front()});
    return;
  }
  if (!ids.insert(record.image_id).second) {
    result.rejections.push_back({row, record.image_id, "duplicate image_id"});
    return;
  }
  result.split.records.push_back(std::move(record));
}

LoadResult parse_csv_records(std::string_view text, SplitName name) {
  auto rows = detail::parse_csv(text);
  if (rows.empty()) throw FormatError("label CSV has no header");
  const auto& header = rows.front().cells;
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!col.emplace(header[i], i).second) throw FormatError("duplicate column '" + header[i] + "'");
  }
  for (const auto& c : core_columns()) {
    if (!col.contains(c)) throw FormatError("label CSV lacks column '" + c + "'");
  }
  std::set<std::string> known(core_columns().begin(), core_columns().end());
  known.insert(extension_columns().begin(), extension_columns().end());
  std::vector<std::pair<std::string, std::size_t>> extras;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (!known.contains(header[i])) extras.emplace_back(header[i], i);
  }

  LoadResult result;
  result.split.name = name;
  std::unordered_set<std::string> ids;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r].cells;
    ++result.input_rows;
    const std::size_t row_no = r;
    if (cells.size() != header.size()) {
      result.rejections.push_back({row_no, cells.empty() ? "" : cells[0],
                                   "expected " + std::to_string(header.size()) + " fields, got " +
                                       std::to_string(cells.size())});
      continue;
    }
    auto get = [&](const std::string& c) -> const std::string& { return cells[col.at(c)]; };
    auto get_opt = [&](const std::string& c) -> std::optional<std::string> {
      auto it = col.find(c);
      if (it == col.end()) return std::nullopt;
      return cells[it->second];
    };
    DatasetRecord rec;
    rec.image_id = get("image_id");
    try {
      auto source = parse_source(get("source"));
      if (!source) throw RowError{"unknown source '" + get("source") + "'"};
      rec.source = *source;
      rec.airport_id = get("airport");
      rec.runway_id = get("runway");
      rec.image_size = {cell_int(get("width"), "width"), cell_int(get("height"), "height")};
      for (std::size_t i = 0; i < 4; ++i) {
        const std::string xs = "x" + std::to_string(i + 1);
        const std::string ys = "y" + std::to_string(i + 1);
        rec.label.corners[i] = {get(xs).empty() ? kNaN : cell_number(get(xs), xs),
                                get(ys).empty() ? kNaN : cell_number(get(ys), ys)};
      }
      auto box_cell = [&](const char* c) { return get(c).empty() ? kNaN : cell_number(get(c), c); };
      rec.label.bbox = {box_cell("bbox_xmin"), box_cell("bbox_ymin"), box_cell("bbox_xmax"), box_cell("bbox_ymax")};
      rec.slant_distance_m = cell_optional(get("slant_distance_m"), "slant_distance_m");
      rec.time_to_landing_s = cell_optional(get("time_to_landing_s"), "time_to_landing_s");

      std::size_t pose_cells = 0;
      for (const auto& c : pose_columns()) pose_cells += get(c).empty() ? 0 : 1;
      if (pose_cells == pose_columns().size()) {
        rec.pose = Pose{cell_number(get("along_track_m"), "along_track_m"),
                        cell_number(get("lateral_deg"), "lateral_deg"),
                        cell_number(get("vertical_deg"), "vertical_deg"),
                        cell_number(get("yaw_deg"), "yaw_deg"),
                        cell_number(get("pitch_deg"), "pitch_deg"),
                        cell_number(get("roll_deg"), "roll_deg")};
      } else if (pose_cells != 0) {
        throw RowError{"incomplete pose"};
      }

      if (auto m = get_opt("margin_px"); m && !m->empty()) rec.label.margin_px = cell_number(*m, "margin_px");
      std::optional<bool> visible;
      if (auto v = get_opt("fully_visible"); v && !v->empty()) visible = cell_bool(*v, "fully_visible");
      finish_label(rec, visible);

      std::array<std::optional<double>, 8> normalized{};
      for (std::size_t i = 0; i < 4; ++i) {
        if (auto nx = get_opt("nx" + std::to_string(i + 1))) normalized[2 * i] = cell_optional(*nx, "nx");
        if (auto ny = get_opt("ny" + std::to_string(i + 1))) normalized[2 * i + 1] = cell_optional(*ny, "ny");
      }
      check_normalized(rec, normalized);

      if (auto c = get_opt("concepts"); c && !c->empty()) {
        json parsed;
        try {
          parsed = json::parse(*c);
        } catch (const json::parse_error&) {
          throw RowError{"concepts cell is not valid JSON"};
        }
        rec.concepts = concepts_from_json(parsed);
      }
      for (const auto& [key, index] : extras) {
        if (!cells[index].empty()) rec.metadata[key] = cells[index];
      }
    } catch (const RowError& e) {
      result.rejections.push_back({row_no, rec.image_id, e.reason});
      continue;
    }
    accept_or_reject(result, ids, row_no, std::move(rec));
  }
  finalize_load(result);
  return result;
}

double json_double(const json& v, const std::string& what) {
  if (v.is_null()) return kNaN;
  if (!v.is_number()) throw RowError{what + " must be a number"};
  return v.get<double>();
}

std::optional<double> json_optional(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw RowError{std::string(key) + " must be a number"};
  return it->get<double>();
}

const json& json_field(const json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) throw RowError{std::string("missing ") + key};
  return *it;
}

std::string json_string(const json& obj, const char* key) {
  const json& v = json_field(obj, key);
  if (!v.is_string()) throw RowError{std::string(key) + " must be a string"};
  return v.get<std::string>();
}

LoadResult parse_json_records(std::string_view text, SplitName name) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("label JSON does not parse: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("records") || !doc["records"].is_array()) {
    throw FormatError("label JSON needs a top-level 'records' array");
  }
  if (!doc.contains("schema_version") || doc["schema_version"] != kSchemaVersion) {
    throw FormatError("label JSON has an unsupported schema_version");
  }
  LoadResult result;
  result.split.name = name;
  std::unordered_set<std::string> ids;
  const json& records = doc["records"];
  for (std::size_t i = 0; i < records.size(); ++i) {
    const json& obj = records[i];
    ++result.input_rows;
    const std::size_t row_no = i + 1;
    DatasetRecord rec;
    try {
      if (!obj.is_object()) throw RowError{"record is not an object"};
      rec.image_id = json_string(obj, "image_id");
      auto source = parse_source(json_string(obj, "source"));
      if (!source) throw RowError{"unknown source"};
      rec.source = *source;
      rec.airport_id = json_string(obj, "airport");
      rec.runway_id = json_string(obj, "runway");
      const json& w = json_field(obj, "width");
      const json& h = json_field(obj, "height");
      if (!w.is_number_integer() || !h.is_number_integer()) throw RowError{"width/height must be integers"};
      rec.image_size = {w.get<int>(), h.get<int>()};
      const json& corners = json_field(obj, "corners");
      if (!corners.is_array() || corners.size() != 4) throw RowError{"corners must hold 4 points"};
      for (std::size_t c = 0; c < 4; ++c) {
        if (!corners[c].is_array() || corners[c].size() != 2) throw RowError{"corner must be [u, v]"};
        rec.label.corners[c] = {json_double(corners[c][0], "corner"), json_double(corners[c][1], "corner")};
      }
      const json& box = json_field(obj, "bbox");
      if (!box.is_array() || box.size() != 4) throw RowError{"bbox must hold 4 numbers"};
      rec.label.bbox = {json_double(box[0], "bbox"), json_double(box[1], "bbox"), json_double(box[2], "bbox"),
                        json_double(box[3], "bbox")};
      rec.label.margin_px = json_optional(obj, "margin_px").value_or(0.0);
      std::optional<bool> visible;
      if (auto it = obj.find("fully_visible"); it != obj.end()) {
        if (!it->is_boolean()) throw RowError{"fully_visible must be a boolean"};
        visible = it->get<bool>();
      }
      finish_label(rec, visible);
      if (auto it = obj.find("corners_normalized"); it != obj.end()) {
        if (!it->is_array() || it->size() != 4) throw RowError{"corners_normalized must hold 4 points"};
        std::array<std::optional<double>, 8> normalized{};
        for (std::size_t c = 0; c < 4; ++c) {
          normalized[2 * c] = json_double((*it)[c][0], "corners_normalized");
          normalized[2 * c + 1] = json_double((*it)[c][1], "corners_normalized");
        }
        check_normalized(rec, normalized);
      }
      rec.slant_distance_m = json_optional(obj, "slant_distance_m");
      rec.time_to_landing_s = json_optional(obj, "time_to_landing_s");
      if (auto it = obj.find("pose"); it != obj.end() && !it->is_null()) {
        const json& p = *it;
        rec.pose = Pose{json_double(json_field(p, "along_track_m"), "along_track_m"),
                        json_double(json_field(p, "lateral_deg"), "lateral_deg"),
                        json_double(json_field(p, "vertical_deg"), "vertical_deg"),
                        json_double(json_field(p, "yaw_deg"), "yaw_deg"),
                        json_double(json_field(p, "pitch_deg"), "pitch_deg"),
                        json_double(json_field(p, "roll_deg"), "roll_deg")};
      }
      if (auto it = obj.find("concepts"); it != obj.end()) rec.concepts = concepts_from_json(*it);
      if (auto it = obj.find("metadata"); it != obj.end()) {
        if (!it->is_object()) throw RowError{"metadata must be an object"};
        for (const auto& [k, v] : it->items()) {
          if (!v.is_string()) throw RowError{"metadata values must be strings"};
          rec.metadata[k] = v.get<std::string>();
        }
      }
    } catch (const RowError& e) {
      result.rejections.push_back({row_no, rec.image_id, e.reason});
      continue;
    } catch (const json::exception& e) {
      result.rejections.push_back({row_no, rec.image_id, e.what()});
      continue;
    }
    accept_or_reject(result, ids, row_no, std::move(rec));
  }
  finalize_load(result);
  return result;
}

std::string opt_cell(const std::optional<double>& v) { return v ? detail::format_double(*v) : std::string(); }

std::string serialize_csv(const std::vector<DatasetRecord>& records) {
  std::set<std::string> extra_keys;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.metadata) extra_keys.insert(k);
  }
  std::vector<std::string> header = core_columns();
  header.insert(header.end(), extension_columns().begin(), extension_columns().end());
  header.insert(header.end(), extra_keys.begin(), extra_keys.end());

  std::string out = "# odd_forge labels schema_version=" + std::to_string(kSchemaVersion) + "\n";
  out += detail::csv_join(header) + "\n";
  for (const auto& r : records) {
    std::vector<std::string> cells;
    cells.reserve(header.size());
    cells.push_back(r.image_id);
    cells.emplace_back(to_string(r.source));
    cells.push_back(r.airport_id);
    cells.push_back(r.runway_id);
    cells.push_back(std::to_string(r.image_size.width));
    cells.push_back(std::to_string(r.image_size.height));
    for (const auto& p : r.label.corners) {
      cells.push_back(detail::format_double(p.u));
      cells.push_back(detail::format_double(p.v));
    }
    for (double b : {r.label.bbox.x_min, r.label.bbox.y_min, r.label.bbox.x_max, r.label.bbox.y_max}) {
      cells.push_back(detail::format_double(b));
    }
    cells.push_back(opt_cell(r.slant_distance_m));
    cells.push_back(opt_cell(r.time_to_landing_s));
    if (r.pose) {
      for (double v : {r.pose->along_track_m, r.pose->lateral_path_deg, r.pose->vertical_path_deg, r.pose->yaw_deg,
                       r.pose->pitch_deg, r.pose->roll_deg}) {
        cells.push_back(detail::format_double(v));
      }
    } else {
      cells.insert(cells.end(), 6, std::string());
    }
    cells.push_back(detail::format_double(r.label.margin_px));
    cells.push_back(r.label.fully_visible ? "1" : "0");
    for (const auto& p : r.label.corners) {
      cells.push_back(detail::format_double(p.u / r.image_size.width));
      cells.push_back(detail::format_double(p.v / r.image_size.height));
    }
    cells.push_back(r.concepts.empty() ? std::string() : concepts_to_json(r.concepts).dump());
    for (const auto& k : extra_keys) {
      auto it = r.metadata.find(k);
      cells.push_back(it == r.metadata.end() ? std::string() : it->second);
    }
    out += detail::csv_join(cells) + "\n";
  }
  return out;
}

ojson number_or_null(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

std::string serialize_json(const std::vector<DatasetRecord>& records) {
  ojson doc;
  doc["schema_version"] = kSchemaVersion;
  auto arr = ojson::array();
  for (const auto& r : records) {
    ojson obj;
    obj["image_id"] = r.image_id;
    obj["source"] = std::string(to_string(r.source));
    obj["airport"] = r.airport_id;
    obj["runway"] = r.runway_id;
    obj["width"] = r.image_size.width;
    obj["height"] = r.image_size.height;
    auto corners = ojson::array();
    auto normalized = ojson::array();
    for (const auto& p : r.label.corners) {
      corners.push_back({number_or_null(p.u), number_or_null(p.v)});
      normalized.push_back({number_or_null(p.u / r.image_size.width), number_or_null(p.v / r.image_size.height)});
    }
    obj["corners"] = std::move(corners);
    obj["corners_normalized"] = std::move(normalized);
    obj["bbox"] = {number_or_null(r.label.bbox.x_min), number_or_null(r.label.bbox.y_min),
                   number_or_null(r.label.bbox.x_max), number_or_null(r.label.bbox.y_max)};
    obj["margin_px"] = r.label.margin_px;
    obj["fully_visible"] = r.label.fully_visible;
    if (r.slant_distance_m) obj["slant_distance_m"] = *r.slant_distance_m;
    if (r.time_to_landing_s) obj["time_to_landing_s"] = *r.time_to_landing_s;
    if (r.pose) {
      obj["pose"] = {{"along_track_m", r.pose->along_track_m}, {"lateral_deg", r.pose->lateral_path_deg},
                     {"vertical_deg", r.pose->vertical_path_deg}, {"yaw_deg", r.pose->yaw_deg},
                     {"pitch_deg", r.pose->pitch_deg},           {"roll_deg", r.pose->roll_deg}};
    }
    if (!r.concepts.empty()) obj["concepts"] = ojson::parse(concepts_to_json(r.concepts).dump());
    if (!r.metadata.empty()) obj["metadata"] = r.metadata;
    arr.push_back(std::move(obj));
  }
  doc["records"] = std::move(arr);
  return doc.dump(1) + "\n";
}

}  // namespace

std::string_view to_string(Source source) { return source == Source::Synthetic ? "synthetic" : "real"; }

std::optional<Source> parse_source(std::string_view text) {
  if (text == "synthetic") return Source::Synthetic;
  if (text == "real") return Source::Real;
  return std::nullopt;
}

std::string_view to_string(SplitName name) {
  switch (name) {
    case SplitName::Train:
      return "train";
    case SplitName::Test:
      return "test";
    case SplitName::RealSubset:
      return "real_subset";
  }
  return "train";
}

std::string_view to_string(FileFormat format) { return format == FileFormat::Csv ? "csv" : "json"; }

std::optional<FileFormat> parse_format(std::string_view text) {
  if (text == "csv") return FileFormat::Csv;
  if (text == "json") return FileFormat::Json;
  return std::nullopt;
}

FileFormat format_from_path(const std::filesystem::path& path) {
  return path.extension() == ".json" ? FileFormat::Json : FileFormat::Csv;
}

bool equivalent(const DatasetRecord& a, const DatasetRecord& b) {
  return a.image_id == b.image_id && a.source == b.source && a.airport_id == b.airport_id &&
         a.runway_id == b.runway_id && same_label(a.label, b.label) && a.pose == b.pose &&
         a.slant_distance_m == b.slant_distance_m && a.time_to_landing_s == b.time_to_landing_s &&
         a.image_size == b.image_size && a.concepts == b.concepts && a.metadata == b.metadata;
}

std::vector<std::string> validate_record(const DatasetRecord& r) {
  std::vector<std::string> reasons;
  if (r.image_id.empty()) reasons.emplace_back("empty image_id");
  if (r.airport_id.empty()) reasons.emplace_back("empty airport");
  if (r.runway_id.empty()) reasons.emplace_back("empty runway");
  if (r.image_size.width <= 0 || r.image_size.height <= 0) reasons.emplace_back("non-positive image size");
  if (r.source == Source::Synthetic) {
    if (!r.pose) reasons.emplace_back("missing pose for synthetic");
    if (!r.slant_distance_m) reasons.emplace_back("missing slant_distance for synthetic");
    if (r.time_to_landing_s) reasons.emplace_back("time_to_landing present for synthetic");
  } else {
    if (!r.time_to_landing_s) reasons.emplace_back("missing time_to_landing for real");
    if (r.pose) reasons.emplace_back("pose present for real");
    if (r.slant_distance_m) reasons.emplace_back("slant_distance present for real");
  }
  if (r.pose && !r.pose->finite()) reasons.emplace_back("non-finite pose");
  if (r.slant_distance_m && !(*r.slant_distance_m >= 0.0)) reasons.emplace_back("negative slant_distance");
  if (r.time_to_landing_s && !(*r.time_to_landing_s >= 0.0)) reasons.emplace_back("negative time_to_landing");
  if (r.label.fully_visible) {
    if (!corners_inside(r.label.corners, r.image_size)) reasons.emplace_back("corner outside image");
    const BBox& b = r.label.bbox;
    if (!(b.x_min < b.x_max && b.y_min < b.y_max)) reasons.emplace_back("degenerate bbox");
    for (const auto& p : r.label.corners) {
      if (!b.contains(p)) {
        reasons.emplace_back("bbox does not contain corners");
        break;
      }
    }
  }
  return reasons;
}

void check_disjoint(const DatasetSplit& train, const DatasetSplit& test) {
  std::unordered_set<std::string> ids;
  for (const auto& r : train.records) ids.insert(r.image_id);
  for (const auto& r : test.records) {
    if (ids.contains(r.image_id)) {
      throw SplitIntegrityError("image_id '" + r.image_id + "' appears in both " + std::string(to_string(train.name)) +
                                " and " + std::string(to_string(test.name)));
    }
  }
}

LoadResult parse_records(std::string_view text, FileFormat format, SplitName name) {
  return format == FileFormat::Csv ? parse_csv_records(text, name) : parse_json_records(text, name);
}

LoadResult load_records(const std::filesystem::path& path, FileFormat format, SplitName name) {
  return parse_records(detail::read_text_file(path), format, name);
}

std::string serialize_labels(const std::vector<DatasetRecord>& records, FileFormat format) {
  return format == FileFormat::Csv ? serialize_csv(records) : serialize_json(records);
}

void write_labels(const std::vector<DatasetRecord>& records, const std::filesystem::path& path, FileFormat format) {
  detail::write_text_file(path, serialize_labels(records, format));
}

DatasetRecord label_pose(const std::string& image_id, const Pose& pose, const RunwayGeometry& rw,
                         const CameraModel& cam, double margin_px) {
  DatasetRecord rec;
  rec.image_id = image_id;
  rec.source = Source::Synthetic;
  rec.airport_id = rw.airport;
  rec.runway_id = rw.runway;
  rec.label = project_runway(pose, rw, cam, margin_px);
  rec.pose = pose;
  rec.slant_distance_m = slant_distance(to_cartesian(pose));
  rec.image_size = {cam.width_px, cam.height_px};
  return rec;
}

std::string serialize_scenario(const Trajectory& traj, const RunwayGeometry& rw) {
  const auto keyframes = make_keyframes(traj, rw);
  if (keyframes.empty()) return "[]\n";
  std::string out = "[\n";
  for (std::size_t i = 0; i < keyframes.size(); ++i) {
    const Keyframe& k = keyframes[i];
    ojson obj;
    obj["frame"] = k.frame;
    obj["lat"] = k.latitude_deg;
    obj["lon"] = k.longitude_deg;
    obj["alt_m"] = k.altitude_m;
    obj["yaw"] = k.yaw_deg;
    obj["pitch"] = k.pitch_deg;
    obj["roll"] = k.roll_deg;
    out += "  " + obj.dump();
    out += i + 1 < keyframes.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

void write_scenario(const Trajectory& traj, const RunwayGeometry& rw, const std::filesystem::path& path) {
  detail::write_text_file(path, serialize_scenario(traj, rw));
}

std::vector<Keyframe> parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("scenario does not parse: ") + e.what());
  }
  if (!doc.is_array()) throw FormatError("scenario must be a JSON array");
  std::vector<Keyframe> out;
  try {
    for (const auto& k : doc) {
      out.push_back({k.at("frame").get<std::size_t>(), k.at("lat").get<double>(), k.at("lon").get<double>(),
                     k.at("alt_m").get<double>(), k.at("yaw").get<double>(), k.at("pitch").get<double>(),
                     k.at("roll").get<double>()});
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed keyframe: ") + e.what());
  }
  return out;
}

RunwayDb::RunwayDb(std::vector<RunwayGeometry> runways) : runways_(std::move(runways)) {
  std::set<std::string> ids;
  for (const auto& rw : runways_) {
    rw.validate();
    if (!ids.insert(rw.id()).second) throw ConfigError("runway " + rw.id() + " listed twice");
  }
}

const RunwayGeometry* RunwayDb::find(std::string_view airport, std::string_view runway) const {
  auto it = std::find_if(runways_.begin(), runways_.end(),
                         [&](const RunwayGeometry& rw) { return rw.airport == airport && rw.runway == runway; });
  return it == runways_.end() ? nullptr : &*it;
}

const RunwayGeometry* RunwayDb::find(std::string_view id) const {
  auto slash = id.find('/');
  if (slash == std::string_view::npos) return nullptr;
  return find(id.substr(0, slash), id.substr(slash + 1));
}

RunwayDb parse_runway_db(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("runway database does not parse: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("runways") || !doc["runways"].is_array()) {
    throw FormatError("runway database needs a 'runways' array");
  }
  std::vector<RunwayGeometry> runways;
  try {
    for (const auto& r : doc["runways"]) {
      RunwayGeometry rw;
      rw.airport = r.at("airport").get<std::string>();
      rw.runway = r.at("runway").get<std::string>();
      rw.length_m = r.at("length_m").get<double>();
      rw.width_m = r.at("width_m").get<double>();
      rw.aiming_point_offset_m = r.value("aiming_point_offset_m", 300.0);
      if (auto it = r.find("georef"); it != r.end() && !it->is_null()) {
        rw.georef = GeoRef{it->at("latitude_deg").get<double>(), it->at("longitude_deg").get<double>(),
                           it->at("elevation_m").get<double>(), it->at("heading_deg").get<double>()};
      }
      runways.push_back(std::move(rw));
    }
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed runway entry: ") + e.what());
  }
  try {
    return RunwayDb(std::move(runways));
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
}

RunwayDb load_runway_db(const std::filesystem::path& path) { return parse_runway_db(detail::read_text_file(path)); }

std::string serialize_runway_db(const RunwayDb& db) {
  ojson doc;
  auto arr = ojson::array();
  for (const auto& rw : db.all()) {
    ojson obj;
    obj["airport"] = rw.airport;
    obj["runway"] = rw.runway;
    obj["length_m"] = rw.length_m;
    obj["width_m"] = rw.width_m;
    obj["aiming_point_offset_m"] = rw.aiming_point_offset_m;
    if (rw.georef) {
      obj["georef"] = {{"latitude_deg", rw.georef->latitude_deg},
                       {"longitude_deg", rw.georef->longitude_deg},
                       {"elevation_m", rw.georef->elevation_m},
                       {"heading_deg", rw.georef->heading_deg}};
    }
    arr.push_back(std::move(obj));
  }
  doc["runways"] = std::move(arr);
  return doc.dump(2) + "\n";
}

CameraModel parse_camera(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("camera config does not parse: ") + e.what());
  }
  if (!doc.is_object()) throw FormatError("camera config must be a JSON object");
  CameraModel cam;
  try {
    cam.focal_px = doc.value("focal_px", cam.focal_px);
    cam.width_px = doc.value("width_px", cam.width_px);
    cam.height_px = doc.value("height_px", cam.height_px);
    cam.cx = doc.value("cx", cam.width_px / 2.0);
    cam.cy = doc.value("cy", cam.height_px / 2.0);
    cam.crop_top_px = doc.value("crop_top_px", cam.crop_top_px);
    cam.crop_bottom_px = doc.value("crop_bottom_px", cam.crop_bottom_px);
  } catch (const json::exception& e) {
    throw FormatError(std::string("malformed camera config: ") + e.what());
  }
  try {
    cam.validate();
  } catch (const InvalidInputError& e) {
    throw ConfigError(e.what());
  }
  return cam;
}

CameraModel load_camera(const std::filesystem::path& path) { return parse_camera(detail::read_text_file(path)); }

std::string serialize_poses(const std::vector<PoseRow>& poses) {
  std::string out =
      "pose_id,along_track_m,lateral_deg,vertical_deg,yaw_deg,pitch_deg,roll_deg,x_m,y_m,z_m,slant_distance_m\n";
  for (const auto& row : poses) {
    const Pose& p = row.pose;
    const CartesianPose c = to_cartesian(p);
    std::vector<std::string> cells{row.pose_id};
    for (double v : {p.along_track_m, p.lateral_path_deg, p.vertical_path_deg, p.yaw_deg, p.pitch_deg, p.roll_deg,
                     c.x_m, c.y_m, c.z_m, slant_distance(c)}) {
      cells.push_back(detail::format_double(v));
    }
    out += detail::csv_join(cells) + "\n";
  }
  return out;
}

void write_poses(const std::vector<PoseRow>& poses, const std::filesystem::path& path) {
  detail::write_text_file(path, serialize_poses(poses));
}

std::vector<PoseRow> parse_poses(std::string_view text) {
  auto rows = detail::parse_csv(text);
  if (rows.empty()) throw FormatError("pose CSV has no header");
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < rows[0].cells.size(); ++i) col[rows[0].cells[i]] = i;
  std::vector<std::string> needed{"pose_id"};
  needed.insert(needed.end(), pose_columns().begin(), pose_columns().end());
  for (const auto& c : needed) {
    if (!col.contains(c)) throw FormatError("pose CSV lacks column '" + c + "'");
  }
  std::vector<PoseRow> out;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& cells = rows[r].cells;
    if (cells.size() != rows[0].cells.size()) {
      throw FormatError("pose CSV line " + std::to_string(rows[r].line) + " has the wrong field count");
    }
    auto num = [&](const char* c) {
      auto v = detail::parse_double(cells[col.at(c)]);
      if (!v) throw FormatError("pose CSV line " + std::to_string(rows[r].line) + ": bad " + c);
      return *v;
    };
    out.push_back({cells[col.at("pose_id")],
                   Pose{num("along_track_m"), num("lateral_deg"), num("vertical_deg"), num("yaw_deg"),
                        num("pitch_deg"), num("roll_deg")}});
  }
  return out;
}

std::vector<PoseRow> load_poses(const std::filesystem::path& path) {
  return parse_poses(detail::read_text_file(path));
}

}  // namespace oddforge
