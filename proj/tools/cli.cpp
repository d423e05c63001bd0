#include "cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "oddforge/dataset_io.hpp"
#include "oddforge/dqr_verify.hpp"
#include "oddforge/error.hpp"
#include "oddforge/odd_spec.hpp"
#include "oddforge/odd_spec_io.hpp"
#include "oddforge/sampling.hpp"

namespace oddforge::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kRejectionsShown = 10;

// An input problem detected by the command itself rather than by the library.
struct UsageProblem : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Options {
  std::string spec;
  std::string runway_db;
  std::string runway;
  std::string camera;
  std::string thresholds;
  std::string out;
  std::string out_dir;
  std::string format;
  std::uint64_t seed{0};
  std::size_t count{0};
  double margin_px{kDefaultMarginPx};
  bool require_visible{false};
  std::vector<int> strata;

  std::string poses;

  std::string kind{"nominal"};
  std::size_t frames{10};
  std::vector<double> entry;
  double crab_deg{0.0};
  double decrab_start_m{1000.0};
  double frame_interval_s{kDefaultFrameIntervalS};

  std::string train;
  std::string test;
  std::string real;
};

OddSpec load_valid_spec(const std::string& path) {
  OddSpec spec = load_spec(path);
  const auto violations = validate_spec(spec);
  if (!violations.empty()) {
    throw UsageProblem("invalid ODD spec '" + path + "': " + violations.front().kind + " (" +
                       violations.front().subject + ")");
  }
  return spec;
}

CameraModel camera_or_default(const std::string& path) {
  return path.empty() ? CameraModel{} : load_camera(path);
}

const RunwayGeometry& require_runway(const RunwayDb& db, const std::string& id) {
  const RunwayGeometry* rw = db.find(id);
  if (!rw) throw UsageProblem("unknown runway '" + id + "' (expected AIRPORT/RUNWAY from the runway database)");
  return *rw;
}

fs::path output_path(const Options& o, const char* default_name) {
  if (!o.out.empty()) return o.out;
  if (!o.out_dir.empty()) {
    fs::create_directories(o.out_dir);
    return fs::path(o.out_dir) / default_name;
  }
  return {};
}

void emit(const std::string& text, const fs::path& path, std::ostream& out) {
  if (path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write '" + path.string() + "'");
  f << text;
  if (!f) throw IoError("error while writing '" + path.string() + "'");
}

FileFormat format_or(const std::string& flag, const fs::path& path) {
  if (flag.empty()) return format_from_path(path);
  return *parse_format(flag);
}

void report_rejections(const LoadResult& r, const std::string& label, std::ostream& err) {
  if (r.rejections.empty()) return;
  err << label << ": rejected " << r.rejections.size() << " of " << r.input_rows << " rows\n";
  for (std::size_t i = 0; i < r.rejections.size() && i < kRejectionsShown; ++i) {
    const auto& rej = r.rejections[i];
    err << "  row " << rej.row << " (" << rej.image_id << "): " << rej.reason << "\n";
  }
}

int cmd_validate(const Options& o, std::ostream& out, std::ostream& err) {
  const OddSpec spec = load_spec(o.spec);
  const auto violations = validate_spec(spec);
  for (const auto& v : violations) err << "violation: " << v.kind << ": " << v.subject << ": " << v.message << "\n";
  if (!violations.empty()) return kExitFail;
  out << "ok: " << o.spec << " (version " << spec.version() << ", " << spec.restrictions().size()
      << " restrictions)\n";
  return kExitPass;
}

int cmd_sample(const Options& o, std::ostream& out, std::ostream& err) {
  const OddSpec spec = load_valid_spec(o.spec);
  SamplingConfig cfg;
  cfg.count = o.count;
  cfg.seed = o.seed;
  if (!o.strata.empty()) {
    if (o.strata.size() != 6) throw UsageProblem("--strata needs 6 bin counts");
    StratifiedStrategy s;
    std::copy(o.strata.begin(), o.strata.end(), s.bins.begin());
    cfg.strategy = s;
  }
  const auto poses = sample_cone(spec.cone(), cfg);
  std::vector<PoseRow> rows;
  rows.reserve(poses.size());
  for (std::size_t i = 0; i < poses.size(); ++i) rows.push_back({"pose_" + std::to_string(i), poses[i]});
  const fs::path path = output_path(o, "poses.csv");
  emit(serialize_poses(rows), path, out);
  if (!path.empty()) err << "wrote " << rows.size() << " poses to " << path.string() << "\n";
  return kExitPass;
}

int cmd_label(const Options& o, std::ostream& out, std::ostream& err) {
  const RunwayDb db = load_runway_db(o.runway_db);
  const RunwayGeometry& rw = require_runway(db, o.runway);
  const CameraModel cam = camera_or_default(o.camera);
  const auto poses = load_poses(o.poses);
  std::vector<DatasetRecord> records;
  std::size_t hidden = 0;
  for (const auto& row : poses) {
    DatasetRecord rec = label_pose(row.pose_id, row.pose, rw, cam, o.margin_px);
    if (!rec.label.fully_visible) {
      ++hidden;
      err << "not fully visible: " << row.pose_id << (rec.label.projectable ? "" : " (behind camera)") << "\n";
      if (o.require_visible) continue;
    }
    records.push_back(std::move(rec));
  }
  const fs::path path = output_path(o, o.format == "json" ? "labels.json" : "labels.csv");
  const FileFormat format = o.format.empty() ? (path.empty() ? FileFormat::Csv : format_from_path(path))
                                             : *parse_format(o.format);
  emit(serialize_labels(records, format), path, out);
  err << "labelled " << records.size() << " of " << poses.size() << " poses (" << hidden << " not fully visible"
      << (o.require_visible ? ", dropped" : ", flagged") << ")\n";
  return kExitPass;
}

int cmd_scenario(const Options& o, std::ostream& out, std::ostream& err) {
  const OddSpec spec = load_valid_spec(o.spec);
  const ApproachCone cone = spec.cone();
  const RunwayDb db = load_runway_db(o.runway_db);
  const RunwayGeometry& rw = require_runway(db, o.runway);
  if (!rw.georef) throw ConfigError("runway " + rw.id() + " has no georeference");

  Pose entry{cone.along_track_m.max, 0.0, cone.vertical_path_deg.center(), 0.0, cone.pitch_deg.center(), 0.0};
  if (!o.entry.empty()) {
    if (o.entry.size() != 6) throw UsageProblem("--entry needs 6 values");
    entry = Pose{o.entry[0], o.entry[1], o.entry[2], o.entry[3], o.entry[4], o.entry[5]};
  }
  ScenarioKind kind = NominalScenario{};
  if (o.kind == "crab_decrab") kind = CrabDecrabScenario{o.crab_deg, o.decrab_start_m};

  try {
    const Trajectory traj = generate_trajectory(cone, entry, o.frames, kind, o.frame_interval_s);
    const fs::path path = output_path(o, "scenario.json");
    emit(serialize_scenario(traj, rw), path, out);
    if (!path.empty()) err << "wrote " << traj.frames.size() << " keyframes to " << path.string() << "\n";
  } catch (const GenerationError& e) {
    err << "generation failed at frame " << e.frame() << ", parameter " << e.parameter() << ": " << e.what() << "\n";
    return kExitFail;
  }
  return kExitPass;
}

LoadResult load_split(const std::string& path, const std::string& format, SplitName name, std::ostream& err) {
  LoadResult r = load_records(path, format_or(format, path), name);
  report_rejections(r, std::string(to_string(name)), err);
  return r;
}

int cmd_verify(const Options& o, std::ostream& out, std::ostream& err) {
  worker_threads();
  const OddSpec spec = load_valid_spec(o.spec);
  VerifyConfig cfg;
  cfg.camera = camera_or_default(o.camera);
  cfg.runways = load_runway_db(o.runway_db);
  if (!o.thresholds.empty()) cfg = load_thresholds(o.thresholds, cfg);
  cfg.validate();

  DatasetBundle data;
  data.train = load_split(o.train, o.format, SplitName::Train, err).split;
  data.test = load_split(o.test, o.format, SplitName::Test, err).split;
  if (data.train.records.empty()) throw UsageProblem("train split '" + o.train + "' has no records");
  if (data.test.records.empty()) throw UsageProblem("test split '" + o.test + "' has no records");
  if (!o.real.empty()) data.real_subset = load_split(o.real, o.format, SplitName::RealSubset, err).split;

  const DqrReport report = run_all(data, spec, cfg);
  const fs::path dir = o.out_dir.empty() ? fs::path(".") : fs::path(o.out_dir);
  fs::create_directories(dir);
  write_report(report, dir / "report.json");
  write_histograms(report.histograms, dir);

  for (const auto& r : report.results) {
    out << to_string(r.requirement) << ": " << to_string(r.verdict);
    const auto failed = r.verdict == Verdict::Advisory ? std::vector<std::string>{} : r.failed_metrics();
    if (!failed.empty()) {
      out << " (";
      for (std::size_t i = 0; i < failed.size(); ++i) out << (i ? ", " : "") << failed[i];
      out << ")";
    }
    if (!r.note.empty()) out << " [" << r.note << "]";
    out << "\n";
  }
  out << "overall: " << (report.overall ? "pass" : "fail") << "\n";
  err << "report written to " << (dir / "report.json").string() << "\n";
  return report.overall ? kExitPass : kExitFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"odd_forge: ODD definitions, runway labels and data quality verification"};
  app.set_config("--config", "", "TOML/INI file with option values (command-line flags take precedence)");
  app.require_subcommand(1);
  Options o;

  const auto format_check = CLI::IsMember({"csv", "json"});

  auto* validate = app.add_subcommand("validate", "Check an ODD spec file against its invariants");
  validate->add_option("--spec", o.spec, "ODD spec JSON")->required();

  auto* sample = app.add_subcommand("sample", "Sample poses inside the approach cone");
  sample->add_option("--spec", o.spec, "ODD spec JSON")->required()->check(CLI::ExistingFile);
  sample->add_option("--count", o.count, "Number of poses")->required()->check(CLI::PositiveNumber);
  sample->add_option("--seed", o.seed, "Random seed")->capture_default_str();
  sample->add_option("--strata", o.strata, "Stratified bins for along_track,lateral,vertical,yaw,pitch,roll")
      ->delimiter(',')
      ->expected(6);
  sample->add_option("--out", o.out, "Pose CSV (stdout when neither --out nor --out-dir is set)");
  sample->add_option("--out-dir", o.out_dir, "Directory for poses.csv");

  auto* label = app.add_subcommand("label", "Project runway corners for each pose");
  label->add_option("--poses", o.poses, "Pose CSV from 'sample'")->required()->check(CLI::ExistingFile);
  label->add_option("--runway-db", o.runway_db, "Runway database JSON")->required()->check(CLI::ExistingFile);
  label->add_option("--runway", o.runway, "Runway id AIRPORT/RUNWAY")->required();
  label->add_option("--camera", o.camera, "Camera JSON (defaults: 2448x2048, f=1400 px, crop 300/300)")
      ->check(CLI::ExistingFile);
  label->add_option("--margin-px", o.margin_px, "Bounding box margin in pixels")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  label->add_flag("--require-visible", o.require_visible, "Drop poses whose runway is not fully visible");
  label->add_option("--format", o.format, "Label file format")->check(format_check);
  label->add_option("--out", o.out, "Label file (stdout when neither --out nor --out-dir is set)");
  label->add_option("--out-dir", o.out_dir, "Directory for labels.csv / labels.json");

  auto* scenario = app.add_subcommand("scenario", "Export renderer keyframes for an approach trajectory");
  scenario->add_option("--spec", o.spec, "ODD spec JSON")->required()->check(CLI::ExistingFile);
  scenario->add_option("--runway-db", o.runway_db, "Runway database JSON")->required()->check(CLI::ExistingFile);
  scenario->add_option("--runway", o.runway, "Runway id AIRPORT/RUNWAY")->required();
  scenario->add_option("--kind", o.kind, "Trajectory kind")
      ->check(CLI::IsMember({"nominal", "crab_decrab"}))
      ->capture_default_str();
  scenario->add_option("--frames", o.frames, "Number of frames")->check(CLI::Range(2, 1000000))->capture_default_str();
  scenario->add_option("--entry", o.entry, "Entry pose: along_track_m,lateral,vertical,yaw,pitch,roll")
      ->delimiter(',')
      ->expected(6);
  scenario->add_option("--crab-deg", o.crab_deg, "Crab yaw for crab_decrab")->capture_default_str();
  scenario->add_option("--decrab-start-m", o.decrab_start_m, "Along-track distance where de-crab begins")
      ->capture_default_str();
  scenario->add_option("--frame-interval-s", o.frame_interval_s, "Seconds between frames")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  scenario->add_option("--out", o.out, "Keyframe JSON (stdout when neither --out nor --out-dir is set)");
  scenario->add_option("--out-dir", o.out_dir, "Directory for scenario.json");

  auto* verify = app.add_subcommand("verify", "Check train/test label files against the data quality requirements");
  verify->add_option("--train", o.train, "Train label file")->required()->check(CLI::ExistingFile);
  verify->add_option("--test", o.test, "Test label file")->required()->check(CLI::ExistingFile);
  verify->add_option("--real", o.real, "Optional real-footage label file")->check(CLI::ExistingFile);
  verify->add_option("--spec", o.spec, "ODD spec JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--runway-db", o.runway_db, "Runway database JSON")->required()->check(CLI::ExistingFile);
  verify->add_option("--camera", o.camera, "Camera JSON")->check(CLI::ExistingFile);
  verify->add_option("--thresholds", o.thresholds, "Thresholds JSON")->check(CLI::ExistingFile);
  verify->add_option("--format", o.format, "Label file format (default: from extension)")->check(format_check);
  verify->add_option("--out-dir", o.out_dir, "Directory for report.json and histogram CSVs")->capture_default_str();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::Success& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitConfig;
  }

  try {
    if (validate->parsed()) return cmd_validate(o, out, err);
    if (sample->parsed()) return cmd_sample(o, out, err);
    if (label->parsed()) return cmd_label(o, out, err);
    if (scenario->parsed()) return cmd_scenario(o, out, err);
    if (verify->parsed()) return cmd_verify(o, out, err);
  } catch (const UsageProblem& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitConfig;
}

}  // namespace oddforge::cli
