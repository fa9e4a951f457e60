#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

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

namespace py = pybind11;
using namespace ribbon;

namespace {

using PointList = std::vector<std::pair<double, double>>;

geometry::RibbonCurve to_curve(const PointList& pts, int state, const std::string& unit) {
  geometry::RibbonCurve c;
  c.state_label = state;
  c.unit = geometry::parse_length_unit(unit);
  for (const auto& [x, y] : pts) c.points.push_back({x, y});
  c.anchor_index = c.points.size() / 2;
  return c;
}

std::optional<signal::Interval> to_interval(const std::optional<std::pair<double, double>>& b) {
  if (!b) return std::nullopt;
  return signal::Interval{b->first, b->second};
}

py::dict timing_dict(const signal::StateTiming& t) {
  py::dict d;
  d["start_time"] = t.start_time;
  d["pre_contraction_end"] = t.pre_contraction_end ? py::cast(*t.pre_contraction_end) : py::none();
  d["end_time"] = t.end_time;
  d["buckling"] = t.exclusion ? py::cast(std::pair{t.exclusion->begin, t.exclusion->end}) : py::none();
  return d;
}

std::string write_map(const mapgrid::DecisionGrid& g, const std::string& format) {
  std::ostringstream out;
  if (format == "ppm") mapgrid::write_ppm(g, out);
  else if (format == "csv") mapgrid::write_csv(g, out);
  else fail(ErrorKind::InvalidInput, "format must be ppm or csv");
  return out.str();
}

}  // namespace

PYBIND11_MODULE(_ribbon, m) {
  m.doc() = "Ribbon proprioception core: curvature, filtering, SVM calibration and streaming classification";

  static py::exception<Error> ribbon_error(m, "RibbonError", PyExc_ValueError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object err = ribbon_error;
      py::object inst = err(e.what());
      inst.attr("kind") = std::string(to_string(e.kind()));
      PyErr_SetObject(err.ptr(), inst.ptr());
    }
  });

  m.def(
      "curvature",
      [](const PointList& points, const std::string& unit) {
        const auto p = geometry::compute_curvature(to_curve(points, 1, unit));
        py::dict d;
        d["arclength"] = p.arclength;
        d["kappa"] = p.kappa;
        d["kappa_signed"] = p.kappa_signed;
        return d;
      },
      py::arg("points"), py::arg("unit") = "mm", "Unsigned and signed curvature of a polyline.");

  m.def(
      "butterworth2",
      [](double cutoff_ratio) {
        const auto c = dsp::design_butterworth2({2, cutoff_ratio});
        py::dict d;
        d["b"] = std::vector<double>{c.b0, c.b1, c.b2};
        d["a"] = std::vector<double>{1.0, c.a1, c.a2};
        d["settle_length"] = c.settle_length;
        return d;
      },
      py::arg("cutoff_ratio") = 0.02, "Second-order Butterworth low-pass coefficients.");

  m.def(
      "filtfilt",
      [](const std::vector<double>& x, double cutoff_ratio) {
        return dsp::apply_zero_phase(dsp::design_butterworth2({2, cutoff_ratio}), x);
      },
      py::arg("signal"), py::arg("cutoff_ratio") = 0.02, "Zero-phase Butterworth low-pass filtering.");

  m.def(
      "score_regions",
      [](const std::vector<PointList>& curves, double window_mm, double stride_mm, std::size_t stations,
         double cutoff_ratio, double mm_per_unit, const std::string& half) {
        std::vector<geometry::RibbonCurve> cs;
        for (std::size_t k = 0; k < curves.size(); ++k) cs.push_back(to_curve(curves[k], static_cast<int>(k + 1), "mm"));
        placement::CurveSetOptions opts{stations, cutoff_ratio, mm_per_unit};
        const auto set = placement::build_state_curve_set(cs, opts);
        placement::ScoringOptions so;
        if (half == "leading") so.half = placement::RibbonHalf::leading;
        else if (half != "trailing") fail(ErrorKind::InvalidInput, "half must be trailing or leading");
        py::list out;
        for (const auto& r : placement::score_regions(set, window_mm, stride_mm, so)) {
          py::dict d;
          d["center_mm"] = r.center_mm;
          d["half_width_mm"] = r.half_width_mm;
          d["score"] = r.score;
          try {
            const auto s = placement::select_surface(set, r, so.half);
            d["side"] = s.side == placement::Side::top ? "top" : "bottom";
          } catch (const Error& e) {
            if (e.kind() != ErrorKind::AmbiguousSide) throw;
            d["side"] = py::none();
          }
          out.append(d);
        }
        return out;
      },
      py::arg("curves"), py::arg("window_mm") = placement::kDefaultWindowMm,
      py::arg("stride_mm") = placement::kDefaultStrideMm, py::arg("stations") = geometry::kDefaultStations,
      py::arg("cutoff_ratio") = 0.02, py::arg("mm_per_unit") = 1.0, py::arg("half") = "trailing",
      "Ranked sensor windows for eight state curves given in state order.");

  py::class_<signal::TrialRecording>(m, "Trial")
      .def_property_readonly("trial_id", [](const signal::TrialRecording& t) { return t.meta.trial_id; })
      .def_property_readonly("frames",
                             [](const signal::TrialRecording& t) {
                               std::vector<std::tuple<double, int, std::int64_t, std::int64_t>> f;
                               for (const auto& r : t.frames) f.emplace_back(r.t, r.channel, r.active, r.ambient);
                               return f;
                             })
      .def("__len__", [](const signal::TrialRecording& t) { return t.frames.size(); })
      .def("to_jsonl",
           [](const signal::TrialRecording& t) {
             std::ostringstream out;
             trial_io::write_trial(t, out);
             return out.str();
           })
      .def("save", [](const signal::TrialRecording& t, const std::string& path) { trial_io::write_trial_file(t, path); })
      .def_static("from_jsonl",
                  [](const std::string& text) {
                    std::istringstream in(text);
                    return trial_io::read_trial(in);
                  })
      .def_static("load", &trial_io::read_trial_file, py::arg("path"));

  m.def(
      "synth_trials",
      [](const std::string& spec_json, int n, std::optional<std::uint64_t> seed) {
        auto spec = synth::spec_from_json(spec_json);
        return synth::generate_condition(spec, n, seed.value_or(spec.seed));
      },
      py::arg("spec_json") = "{}", py::arg("n") = 3, py::arg("seed") = py::none(),
      "Synthetic trials from a JSON trajectory description.");

  m.def(
      "synth_timing", [](const std::string& spec_json) { return timing_dict(synth::state_timing(synth::spec_from_json(spec_json))); },
      py::arg("spec_json") = "{}", "State timing of a synthetic trajectory.");

  py::class_<svm::MulticlassSvm>(m, "Model")
      .def_property_readonly("classes", [](const svm::MulticlassSvm& s) { return s.classes; })
      .def_property_readonly("gamma", [](const svm::MulticlassSvm& s) { return s.params.gamma; })
      .def_property_readonly("c", [](const svm::MulticlassSvm& s) { return s.params.c; })
      .def_property_readonly("n_machines", [](const svm::MulticlassSvm& s) { return s.machines.size(); })
      .def_property_readonly("training_accuracy", &pipeline::training_accuracy)
      .def("predict", [](const svm::MulticlassSvm& s, const std::vector<double>& x) { return svm::predict(s, x); })
      .def("decision_values",
           [](const svm::MulticlassSvm& s, const std::vector<double>& x) { return svm::decision_values(s, x); })
      .def("to_json", [](const svm::MulticlassSvm& s) { return model_io::to_json(s); })
      .def("save", [](const svm::MulticlassSvm& s, const std::string& path) { model_io::save_model(s, path); })
      .def_static("from_json", &model_io::from_json, py::arg("text"))
      .def_static("load", &model_io::load_model, py::arg("path"));

  m.def(
      "train",
      [](const std::vector<std::vector<double>>& x, const std::vector<int>& labels, std::optional<double> gamma,
         double c) {
        svm::TrainOptions opts;
        opts.gamma = gamma;
        opts.c = c;
        return svm::train_multiclass({x, labels}, opts);
      },
      py::arg("x"), py::arg("labels"), py::arg("gamma") = py::none(), py::arg("c") = 1.0,
      "One-vs-one RBF SVM on raw feature rows.");

  m.def(
      "calibrate",
      [](const std::vector<signal::TrialRecording>& trials, double start_time, std::optional<double> end_time,
         std::optional<double> pre_contraction_end, std::optional<std::pair<double, double>> buckling,
         std::optional<double> gamma, double c) {
        signal::CalibrationOptions opts;
        opts.timing.start_time = start_time;
        opts.timing.pre_contraction_end = pre_contraction_end;
        opts.timing.exclusion = to_interval(buckling);
        opts.detect_end = !end_time;
        if (end_time) opts.timing.end_time = *end_time;
        svm::TrainOptions to;
        to.gamma = gamma;
        to.c = c;
        return pipeline::train_from_calibration(signal::calibrate(trials, opts), to);
      },
      py::arg("trials"), py::arg("start_time") = 0.0, py::arg("end_time") = py::none(),
      py::arg("pre_contraction_end") = py::none(), py::arg("buckling") = py::none(), py::arg("gamma") = py::none(),
      py::arg("c") = 1.0, "Average trials, extract the eight states and train the classifier.");

  m.def(
      "classify",
      [](const svm::MulticlassSvm& model, const signal::TrialRecording& trial, int debounce,
         std::optional<std::pair<double, double>> buckling) {
        stream::StreamOptions so;
        so.debounce = debounce;
        so.exclusion = to_interval(buckling);
        const auto r = pipeline::classify_trial(model, trial, so);
        py::list events;
        for (const auto& e : r.stream.events) {
          py::dict d;
          d["t"] = e.t;
          d["state"] = e.state;
          d["s1"] = e.features[0];
          d["s2"] = e.features[1];
          events.append(d);
        }
        py::dict out;
        out["events"] = events;
        out["visited"] = r.report.visited;
        out["samples"] = r.stream.samples.size();
        out["dropped"] = r.stream.dropped;
        out["mean_distance"] = r.report.mean_distance;
        out["max_distance"] = r.report.max_distance;
        return out;
      },
      py::arg("model"), py::arg("trial"), py::arg("debounce") = 3, py::arg("buckling") = py::none(),
      "Stream a trial through the classifier.");

  m.def(
      "decision_map",
      [](const svm::MulticlassSvm& model, std::size_t resolution, const std::string& format,
         std::optional<std::tuple<double, double, double, double>> bounds, bool overlay) {
        mapgrid::Bounds b = mapgrid::default_bounds(model);
        if (bounds) b = {std::get<0>(*bounds), std::get<1>(*bounds), std::get<2>(*bounds), std::get<3>(*bounds)};
        auto g = mapgrid::rasterize(model, b, resolution);
        if (!overlay) g.overlay.clear();
        return py::bytes(write_map(g, format));
      },
      py::arg("model"), py::arg("resolution") = mapgrid::kDefaultResolution, py::arg("format") = "ppm",
      py::arg("bounds") = py::none(), py::arg("overlay") = true, "Decision-region raster as PPM or CSV bytes.");
}
