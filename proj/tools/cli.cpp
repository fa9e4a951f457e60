#include "cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <optional>
#include <sstream>

#include "ribbon/dsp.hpp"
#include "ribbon/error.hpp"
#include "ribbon/geometry.hpp"
#include "ribbon/mapgrid.hpp"
#include "ribbon/model_io.hpp"
#include "ribbon/pipeline.hpp"
#include "ribbon/placement.hpp"
#include "ribbon/signal.hpp"
#include "ribbon/stream.hpp"
#include "ribbon/synth.hpp"
#include "ribbon/trial_io.hpp"

namespace ribbon::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr const char* kSeedEnv = "RIBBON_PROPRIO_SEED";

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::DegenerateTangent:
    case ErrorKind::FlatProfile:
      return kGeometryError;
    case ErrorKind::NoVariation:
      return kNoVariation;
    case ErrorKind::ExclusionTooWide:
    case ErrorKind::NearZeroReference:
      return kCalibrationError;
    default:
      return kInputError;
  }
}

// Manifest fields are optional; paths are relative to the manifest file.
class Manifest {
 public:
  Manifest() = default;

  static Manifest load(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(ErrorKind::InvalidInput, "cannot open manifest " + path);
    Manifest m;
    m.doc_ = json::parse(in, nullptr, false);
    if (m.doc_.is_discarded() || !m.doc_.is_object()) {
      fail(ErrorKind::ParseError, "manifest " + path + " is not a JSON object");
    }
    m.base_ = fs::path(path).parent_path();
    return m;
  }

  bool has(const char* key) const { return doc_.contains(key) && !doc_[key].is_null(); }
  const json& at(const char* key) const { return doc_.at(key); }

  std::optional<double> number(const char* key) const {
    if (!has(key)) return std::nullopt;
    if (!doc_[key].is_number()) fail(ErrorKind::ParseError, std::string("manifest field ") + key + " must be a number");
    return doc_[key].get<double>();
  }

  std::optional<std::string> string(const char* key) const {
    if (!has(key)) return std::nullopt;
    if (!doc_[key].is_string()) fail(ErrorKind::ParseError, std::string("manifest field ") + key + " must be a string");
    return doc_[key].get<std::string>();
  }

  std::string resolve(const std::string& p) const {
    const fs::path path(p);
    if (path.is_absolute() || base_.empty()) return path.string();
    return (base_ / path).string();
  }

 private:
  json doc_ = json::object();
  fs::path base_;
};

template <class T>
T pick(const std::optional<T>& flag, const std::optional<T>& manifest, T fallback) {
  if (flag) return *flag;
  if (manifest) return *manifest;
  return fallback;
}

std::optional<std::size_t> manifest_count(const Manifest& m, const char* key) {
  const auto v = m.number(key);
  if (!v) return std::nullopt;
  if (*v < 0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
    fail(ErrorKind::InvalidInput, std::string("manifest field ") + key + " must be a non-negative integer");
  }
  return static_cast<std::size_t>(*v);
}

std::optional<signal::Interval> parse_interval(const json& j) {
  if (j.is_null()) return std::nullopt;
  if (j.is_array() && j.size() == 2) return signal::Interval{j[0].get<double>(), j[1].get<double>()};
  if (j.is_object()) return signal::Interval{j.at("begin").get<double>(), j.at("end").get<double>()};
  fail(ErrorKind::ParseError, "buckling must be [begin, end] or {begin, end}");
}

std::optional<signal::Interval> interval_from(const std::vector<double>& flag, const Manifest& m) {
  if (!flag.empty()) {
    if (flag.size() != 2) fail(ErrorKind::InvalidInput, "--buckling takes begin,end");
    return signal::Interval{flag[0], flag[1]};
  }
  if (m.has("buckling")) {
    try {
      return parse_interval(m.at("buckling"));
    } catch (const json::exception& e) {
      fail(ErrorKind::ParseError, std::string("manifest buckling: ") + e.what());
    }
  }
  return std::nullopt;
}

void open_output(const std::string& path, std::ofstream& file, bool binary = false) {
  const fs::path p(path);
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  file.open(path, binary ? std::ios::binary | std::ios::trunc : std::ios::trunc);
  if (!file) fail(ErrorKind::InvalidInput, "cannot write " + path);
}

std::optional<std::string> output_path(const std::string& flag, const Manifest& m, const char* name) {
  if (!flag.empty()) return flag;
  if (auto dir = m.string("output_dir")) return (fs::path(m.resolve(*dir)) / name).lexically_normal().string();
  return std::nullopt;
}

// --- curves ---------------------------------------------------------------

struct CurveArgs {
  std::string manifest;
  std::vector<std::string> curves;
  std::optional<double> cutoff_ratio;
  std::optional<std::size_t> stations;
  std::optional<double> mm_per_unit;
  std::string unit;
  std::string out;
};

void add_curve_flags(CLI::App* cmd, CurveArgs& a) {
  cmd->add_option("--manifest", a.manifest, "JSON manifest");
  cmd->add_option("--curve", a.curves, "curve CSV named *_s<k>.csv (repeatable)");
  cmd->add_option("--cutoff-ratio", a.cutoff_ratio, "low-pass cutoff over sampling rate");
  cmd->add_option("--stations", a.stations, "arc-length stations per curve");
  cmd->add_option("--mm-per-unit", a.mm_per_unit, "curve units to mm");
  cmd->add_option("--unit", a.unit, "curve unit: mm or pixel");
  cmd->add_option("-o,--out", a.out, "report path (default stdout)");
}

std::map<int, std::string> curve_paths(const CurveArgs& a, const Manifest& m) {
  std::map<int, std::string> paths;
  auto add = [&](int state, const std::string& path) {
    if (state < 1 || state > placement::kStateCount) {
      fail(ErrorKind::InvalidInput, "state " + std::to_string(state) + " out of range 1..8 for " + path);
    }
    paths[state] = path;
  };
  auto from_name = [&](const std::string& path) {
    const auto s = geometry::state_from_filename(path);
    if (!s) fail(ErrorKind::InvalidInput, "cannot infer state from file name " + path + " (expected *_s<k>.csv)");
    return *s;
  };
  if (!a.curves.empty()) {
    for (const auto& p : a.curves) add(from_name(p), p);
  } else if (m.has("curves")) {
    const auto& c = m.at("curves");
    if (c.is_object()) {
      for (const auto& [k, v] : c.items()) {
        int state = 0;
        try {
          state = std::stoi(k);
        } catch (const std::exception&) {
          fail(ErrorKind::ParseError, "manifest curves key '" + k + "' is not a state number");
        }
        add(state, m.resolve(v.get<std::string>()));
      }
    } else if (c.is_array()) {
      for (const auto& v : c) add(from_name(v.get<std::string>()), m.resolve(v.get<std::string>()));
    } else {
      fail(ErrorKind::ParseError, "manifest curves must be an object or an array");
    }
  }
  for (int s = 1; s <= placement::kStateCount; ++s) {
    if (!paths.count(s)) fail(ErrorKind::InvalidInput, "missing curve for state " + std::to_string(s));
  }
  return paths;
}

placement::StateCurveSet load_curve_set(const CurveArgs& a, const Manifest& m, std::ostream& err) {
  placement::CurveSetOptions opts;
  opts.cutoff_ratio = pick(a.cutoff_ratio, m.number("cutoff_ratio"), opts.cutoff_ratio);
  opts.stations = pick(a.stations, manifest_count(m, "stations"), opts.stations);
  opts.mm_per_unit = pick(a.mm_per_unit, m.number("mm_per_unit"), opts.mm_per_unit);
  const std::string unit_text = !a.unit.empty() ? a.unit : m.string("unit").value_or("mm");
  const auto unit = geometry::parse_length_unit(unit_text);
  dsp::validate(dsp::LowPassSpec{2, opts.cutoff_ratio});

  err << "settings: states=" << placement::kStateCount << " cutoff_ratio=" << opts.cutoff_ratio
      << " stations=" << opts.stations << " mm_per_unit=" << opts.mm_per_unit
      << " unit=" << geometry::to_string(unit) << "\n";

  std::vector<geometry::RibbonCurve> curves;
  for (const auto& [state, path] : curve_paths(a, m)) {
    if (!fs::exists(path)) fail(ErrorKind::InvalidInput, "curve file for state " + std::to_string(state) + " not found: " + path);
    try {
      curves.push_back(geometry::read_curve_csv_file(path, state, unit));
    } catch (const Error& e) {
      if (e.kind() == ErrorKind::DegenerateTangent) throw;
      throw Error(e.kind(), "state " + std::to_string(state) + ": " + e.message());
    }
  }
  return placement::build_state_curve_set(curves, opts);
}

int emit_report(const placement::StateCurveSet& set, std::span<const placement::SensorRegion> regions,
                const std::optional<std::string>& path, std::ostream& out) {
  if (path) {
    std::ofstream file;
    open_output(*path, file);
    placement::emit_placement_report(set, regions, file);
  } else {
    placement::emit_placement_report(set, regions, out);
  }
  return kOk;
}

// --- trials ---------------------------------------------------------------

std::vector<std::string> trial_paths(const std::vector<std::string>& flag, const std::string& condition,
                                     const Manifest& m) {
  if (!flag.empty()) return flag;
  if (!m.has("trials")) fail(ErrorKind::InvalidInput, "no trial files given (--trial or manifest trials)");
  const auto& t = m.at("trials");
  std::vector<std::string> out;
  auto collect = [&](const json& list) {
    if (!list.is_array()) fail(ErrorKind::ParseError, "manifest trial list must be an array");
    for (const auto& v : list) out.push_back(m.resolve(v.get<std::string>()));
  };
  if (t.is_array()) {
    collect(t);
  } else if (t.is_object()) {
    if (!condition.empty()) {
      if (!t.contains(condition)) fail(ErrorKind::InvalidInput, "manifest has no condition '" + condition + "'");
      collect(t[condition]);
    } else if (t.size() == 1) {
      collect(t.begin().value());
    } else {
      fail(ErrorKind::InvalidInput, "manifest lists several conditions; choose one with --condition");
    }
  } else {
    fail(ErrorKind::ParseError, "manifest trials must be an array or an object");
  }
  return out;
}

svm::MulticlassSvm load_model_file(const std::string& path) {
  if (!fs::exists(path)) fail(ErrorKind::InvalidInput, "model file not found: " + path);
  return model_io::load_model(path);
}

std::string format_state_list(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ribbon proprioception toolkit: sensor placement, calibration, state classification"};
  app.require_subcommand(1);

  // curvature
  CurveArgs curv;
  auto* c_curv = app.add_subcommand("curvature", "normalized curvature report for 8 states");
  add_curve_flags(c_curv, curv);

  // place
  CurveArgs place;
  std::optional<double> window_mm, stride_mm;
  std::optional<std::size_t> top_k;
  std::string half_text;
  auto* c_place = app.add_subcommand("place", "score sensor windows and pick the stretched side");
  add_curve_flags(c_place, place);
  c_place->add_option("--window-mm", window_mm, "window width in mm");
  c_place->add_option("--stride-mm", stride_mm, "window stride in mm");
  c_place->add_option("--top-k", top_k, "number of regions");
  c_place->add_option("--half", half_text, "ribbon half to scan: trailing or leading");

  // calibrate
  std::string cal_manifest, cal_out, condition;
  std::vector<std::string> cal_trials;
  std::vector<double> cal_buckling;
  std::optional<double> gamma, c_param, start_time, pre_end, end_time;
  bool detect_end = false;
  auto* c_cal = app.add_subcommand("calibrate", "preprocess trials and train the state classifier");
  c_cal->add_option("--manifest", cal_manifest, "JSON manifest");
  c_cal->add_option("--trial", cal_trials, "trial JSON-lines file (repeatable)");
  c_cal->add_option("--condition", condition, "condition key in the manifest trials object");
  c_cal->add_option("--buckling", cal_buckling, "exclusion interval begin,end in seconds")->delimiter(',')->expected(2);
  c_cal->add_option("--start-time", start_time, "motion onset (state 1) in seconds");
  c_cal->add_option("--pre-contraction-end", pre_end, "time of state 7 in seconds");
  c_cal->add_option("--end-time", end_time, "time of full contraction (state 8) in seconds");
  c_cal->add_flag("--detect-end", detect_end, "detect end_time from the averaged signals");
  c_cal->add_option("--gamma", gamma, "RBF gamma (default 1/n_features)");
  c_cal->add_option("--c", c_param, "soft-margin penalty");
  c_cal->add_option("-o,--out", cal_out, "model path");

  // map
  std::string map_model, map_out, map_format;
  std::vector<double> map_bounds;
  std::size_t resolution = mapgrid::kDefaultResolution;
  bool no_overlay = false;
  auto* c_map = app.add_subcommand("map", "rasterize the decision regions");
  c_map->add_option("--model", map_model, "model JSON")->required();
  c_map->add_option("--bounds", map_bounds, "xmin,xmax,ymin,ymax")->delimiter(',')->expected(4);
  c_map->add_option("--resolution", resolution, "grid nodes per axis");
  c_map->add_option("--format", map_format, "ppm or csv (default from extension, else ppm)");
  c_map->add_flag("--no-overlay", no_overlay, "omit training points");
  c_map->add_option("-o,--out", map_out, "output path")->required();

  // classify
  std::string cls_model, cls_trial = "-", cls_out;
  int debounce = 3;
  std::vector<double> cls_buckling;
  auto* c_cls = app.add_subcommand("classify", "stream a trial through the classifier");
  c_cls->add_option("--model", cls_model, "model JSON")->required();
  c_cls->add_option("trial", cls_trial, "trial JSON-lines file or '-' for stdin");
  c_cls->add_option("--debounce", debounce, "consecutive samples to confirm a state");
  c_cls->add_option("--buckling", cls_buckling, "exclusion interval begin,end in seconds")->delimiter(',')->expected(2);
  c_cls->add_option("-o,--out", cls_out, "events path (default stdout)");

  // synth
  std::string spec_path, synth_dir;
  int n_trials = 3;
  std::optional<std::uint64_t> seed;
  std::optional<double> speed, sigma;
  auto* c_syn = app.add_subcommand("synth", "generate synthetic trials");
  c_syn->add_option("--spec", spec_path, "trajectory spec JSON");
  c_syn->add_option("-n,--n", n_trials, "number of trials");
  c_syn->add_option("--seed", seed, "seed of the first trial");
  c_syn->add_option("--speed-factor", speed, "speed multiplier");
  c_syn->add_option("--noise-sigma", sigma, "per-channel noise sigma");
  c_syn->add_option("--out-dir", synth_dir, "output directory")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "error: " << e.what() << "\n";
    return kInputError;
  }

  try {
    if (*c_curv) {
      const auto m = curv.manifest.empty() ? Manifest{} : Manifest::load(curv.manifest);
      const auto set = load_curve_set(curv, m, err);
      return emit_report(set, {}, output_path(curv.out, m, "curvature.csv"), out);
    }

    if (*c_place) {
      const auto m = place.manifest.empty() ? Manifest{} : Manifest::load(place.manifest);
      const double w = pick(window_mm, m.number("window_mm"), placement::kDefaultWindowMm);
      const double s = pick(stride_mm, m.number("stride_mm"), placement::kDefaultStrideMm);
      const std::size_t k = pick(top_k, manifest_count(m, "top_k"), std::size_t{2});
      placement::ScoringOptions so;
      const std::string h = !half_text.empty() ? half_text : m.string("half").value_or("trailing");
      if (h == "trailing") {
        so.half = placement::RibbonHalf::trailing;
      } else if (h == "leading") {
        so.half = placement::RibbonHalf::leading;
      } else {
        fail(ErrorKind::InvalidInput, "--half must be trailing or leading");
      }
      const auto set = load_curve_set(place, m, err);
      err << "settings: window_mm=" << w << " stride_mm=" << s << " top_k=" << k << " half=" << h << "\n";
      auto regions = placement::score_regions(set, w, s, so);
      if (regions.size() > k) regions.resize(k);
      for (auto& r : regions) {
        try {
          r.side = placement::select_surface(set, r, so.half).side;
        } catch (const Error& e) {
          if (e.kind() != ErrorKind::AmbiguousSide) throw;
          err << "warning: region at " << r.center_mm << " mm: " << e.message() << "\n";
        }
      }
      return emit_report(set, regions, output_path(place.out, m, "placement.csv"), out);
    }

    if (*c_cal) {
      const auto m = cal_manifest.empty() ? Manifest{} : Manifest::load(cal_manifest);
      signal::CalibrationOptions opts;
      opts.timing.start_time = pick(start_time, m.number("start_time"), 0.0);
      opts.timing.pre_contraction_end = pre_end ? pre_end : m.number("pre_contraction_end");
      opts.timing.exclusion = interval_from(cal_buckling, m);
      const auto end = end_time ? end_time : m.number("end_time");
      opts.detect_end = detect_end || !end;
      if (end && !detect_end) opts.timing.end_time = *end;

      svm::TrainOptions to;
      if (gamma) to.gamma = gamma;
      else if (m.has("model") && m.at("model").contains("gamma")) to.gamma = m.at("model")["gamma"].get<double>();
      if (c_param) to.c = *c_param;
      else if (m.has("model") && m.at("model").contains("c")) to.c = m.at("model")["c"].get<double>();

      std::vector<signal::TrialRecording> trials;
      for (const auto& p : trial_paths(cal_trials, condition, m)) {
        if (!fs::exists(p)) fail(ErrorKind::InvalidInput, "trial file not found: " + p);
        trials.push_back(trial_io::read_trial_file(p));
      }
      err << "settings: states=8 trials=" << trials.size() << " gamma="
          << (to.gamma ? std::to_string(*to.gamma) : std::string("1/n_features")) << " c=" << to.c
          << " end_time=" << (opts.detect_end ? std::string("detect") : std::to_string(opts.timing.end_time))
          << "\n";

      const auto cal = signal::calibrate(trials, opts);
      for (const auto& w : cal.warnings) err << "warning: " << w << "\n";
      const auto model = pipeline::train_from_calibration(cal, to);
      const auto path = output_path(cal_out, m, "model.json").value_or("model.json");
      if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
      model_io::save_model(model, path);
      const auto n = model.training.labels.size();
      const auto hits = static_cast<std::size_t>(std::llround(pipeline::training_accuracy(model) * static_cast<double>(n)));
      out << "training accuracy: " << hits << "/" << n << "\n";
      out << "gamma: " << model.params.gamma << "\n";
      out << "model: " << path << "\n";
      return kOk;
    }

    if (*c_map) {
      const auto model = load_model_file(map_model);
      mapgrid::Bounds b = map_bounds.empty() ? mapgrid::default_bounds(model)
                                             : mapgrid::Bounds{map_bounds[0], map_bounds[1], map_bounds[2], map_bounds[3]};
      std::string fmt = map_format;
      if (fmt.empty()) fmt = fs::path(map_out).extension() == ".csv" ? "csv" : "ppm";
      if (fmt != "ppm" && fmt != "csv") fail(ErrorKind::InvalidInput, "--format must be ppm or csv");
      err << "settings: resolution=" << resolution << " format=" << fmt << " bounds=" << b.x_min << ","
          << b.x_max << "," << b.y_min << "," << b.y_max << "\n";
      auto grid = mapgrid::rasterize(model, b, resolution);
      if (no_overlay) grid.overlay.clear();
      std::ofstream file;
      open_output(map_out, file, fmt == "ppm");
      if (fmt == "ppm") mapgrid::write_ppm(grid, file);
      else mapgrid::write_csv(grid, file);
      return kOk;
    }

    if (*c_cls) {
      const auto model = load_model_file(cls_model);
      stream::StreamOptions so;
      so.debounce = debounce;
      so.exclusion = interval_from(cls_buckling, Manifest{});
      err << "settings: debounce=" << debounce << " reference_window_s=" << so.reference_window_s << "\n";

      std::ifstream file_in;
      std::istream* src = &in;
      if (cls_trial != "-") {
        file_in.open(cls_trial);
        if (!file_in) fail(ErrorKind::InvalidInput, "cannot open trial " + cls_trial);
        src = &file_in;
      }
      std::ofstream file_out;
      std::ostream* dst = &out;
      if (!cls_out.empty()) {
        open_output(cls_out, file_out);
        dst = &file_out;
      }
      auto write_events = [&](const std::vector<stream::ClassificationEvent>& events) {
        for (const auto& e : events) {
          *dst << json{{"t", e.t}, {"state", e.state}, {"s1", e.features[0]}, {"s2", e.features[1]}}.dump()
               << "\n";
        }
      };

      stream::StreamClassifier classifier(model, so);
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(*src, line)) {
        ++line_no;
        trial_io::Record rec;
        try {
          rec = trial_io::parse_line(line);
        } catch (const Error& e) {
          throw Error(e.kind(), "line " + std::to_string(line_no) + ": " + e.message());
        }
        if (const auto* f = std::get_if<signal::RawFrame>(&rec)) write_events(classifier.push(*f));
      }
      write_events(classifier.finish());

      const auto& result = classifier.result();
      std::vector<signal::FeaturePair> trajectory;
      trajectory.reserve(result.samples.size());
      for (const auto& s : result.samples) {
        if (!s.excluded) trajectory.push_back(s.features);
      }
      const auto report = stream::manifold_report(trajectory, result.events, stream::manifold_points(model),
                                                  model.standardizer);
      *dst << json{{"report",
                    {{"samples", result.samples.size()},
                     {"dropped", result.dropped},
                     {"reference", result.reference},
                     {"visited", report.visited},
                     {"mean_distance", report.mean_distance},
                     {"max_distance", report.max_distance}}}}
                  .dump()
           << "\n";
      err << "visited: " << format_state_list(report.visited) << "\n";
      return kOk;
    }

    if (*c_syn) {
      synth::TrajectorySpec spec;
      if (!spec_path.empty()) {
        std::ifstream f(spec_path);
        if (!f) fail(ErrorKind::InvalidInput, "cannot open spec " + spec_path);
        std::stringstream ss;
        ss << f.rdbuf();
        spec = synth::spec_from_json(ss.str());
      }
      if (speed) spec.speed_factor = *speed;
      if (sigma) spec.noise_sigma = *sigma;
      std::uint64_t seed_base = spec.seed;
      if (const char* env = std::getenv(kSeedEnv); env && *env) {
        try {
          seed_base = std::stoull(env);
        } catch (const std::exception&) {
          fail(ErrorKind::InvalidInput, std::string(kSeedEnv) + " is not an unsigned integer");
        }
      }
      if (seed) seed_base = *seed;
      spec.seed = seed_base;
      synth::validate(spec);
      err << "settings: n=" << n_trials << " seed=" << seed_base << " speed_factor=" << spec.speed_factor
          << " noise_sigma=" << spec.noise_sigma << " sample_rate=" << spec.sample_rate << "\n";

      const auto trials = synth::generate_condition(spec, n_trials, seed_base);
      fs::create_directories(synth_dir);
      json files = json::array();
      for (std::size_t i = 0; i < trials.size(); ++i) {
        const std::string name = "trial_" + std::to_string(i + 1) + ".jsonl";
        trial_io::write_trial_file(trials[i], (fs::path(synth_dir) / name).string());
        files.push_back(name);
      }
      const auto timing = synth::state_timing(spec);
      json manifest = {{"trials", files},
                       {"start_time", timing.start_time},
                       {"pre_contraction_end", *timing.pre_contraction_end},
                       {"end_time", timing.end_time},
                       {"buckling", nullptr},
                       {"output_dir", "."}};
      if (timing.exclusion) manifest["buckling"] = {timing.exclusion->begin, timing.exclusion->end};
      std::ofstream mf;
      open_output((fs::path(synth_dir) / "manifest.json").string(), mf);
      mf << manifest.dump(1) << "\n";
      std::ofstream sf;
      open_output((fs::path(synth_dir) / "spec.json").string(), sf);
      sf << synth::spec_to_json(spec) << "\n";
      out << "wrote " << trials.size() << " trials to " << synth_dir << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const json::exception& e) {
    err << "error: ParseError: " << e.what() << "\n";
    return kInputError;
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kInputError;
  }
  return kInputError;
}

}  // namespace ribbon::cli
