#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>

#include "throwsense/eval.hpp"
#include "throwsense/intent.hpp"
#include "throwsense/io.hpp"
#include "throwsense/models.hpp"
#include "throwsense/pipeline.hpp"
#include "throwsense/signal.hpp"
#include "throwsense/synth.hpp"
#include "throwsense/throwdetect.hpp"
#include "throwsense/version.hpp"

namespace py = pybind11;
using namespace throwsense;

namespace {

signal::Series make_series(const std::vector<double>& values, double fps) {
    return signal::Series{values, 1.0 / fps};
}

std::vector<std::vector<double>> prior_rows(const intent::PriorMatrix& prior) {
    std::vector<std::vector<double>> rows;
    for (int outcome = 1; outcome <= 9; ++outcome) {
        const auto& row = prior.row(Zone::cell(outcome));
        rows.emplace_back(row.begin(), row.end());
    }
    return rows;
}

py::dict report_to_dict(const eval::Report& report) {
    py::dict out;
    out["task"] = report.task;
    out["folds"] = report.folds;
    out["seed"] = report.seed;
    out["records_used"] = report.records_used;
    py::list per_fold;
    for (const auto& fold : report.per_fold) {
        py::dict d;
        for (const auto& [k, v] : fold) d[py::str(k)] = v;
        per_fold.append(d);
    }
    out["per_fold"] = per_fold;
    py::dict mean, stddev;
    for (const auto& [k, v] : report.mean) mean[py::str(k)] = v;
    for (const auto& [k, v] : report.stddev) stddev[py::str(k)] = v;
    out["mean"] = mean;
    out["stddev"] = stddev;
    out["warnings"] = report.warnings;
    return out;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "mistake-aware intent recognition for a target-throwing task";
    m.attr("__version__") = kToolVersion;

    py::register_exception<Error>(m, "ThrowsenseError");

    // signal chain
    m.def(
        "interpolate_missing",
        [](const std::vector<std::optional<double>>& values, double fps) {
            return signal::interpolate_missing(values, 1.0 / fps).values;
        },
        py::arg("values"), py::arg("fps") = 30.0,
        "Fill gaps (None entries) by linear interpolation, holding the edges.");
    m.def(
        "butterworth_lowpass",
        [](const std::vector<double>& values, double fps, double cutoff_hz, int order) {
            return signal::butterworth_lowpass(make_series(values, fps), cutoff_hz, order).values;
        },
        py::arg("values"), py::arg("fps") = 30.0, py::arg("cutoff_hz") = 2.0, py::arg("order") = 4,
        "Zero-phase low-pass filter (forward-backward).");
    m.def(
        "savgol_derivative",
        [](const std::vector<double>& values, double fps, int window, int polyorder) {
            return signal::savgol_derivative(make_series(values, fps), window, polyorder).values;
        },
        py::arg("values"), py::arg("fps") = 30.0, py::arg("window") = 11, py::arg("polyorder") = 2,
        "Smoothed first derivative in value-units per sample.");

    // throw-frame detection
    m.def(
        "frontal_scores",
        [](const std::vector<double>& speeds, double fps) {
            const auto ts = throwdetect::frontal_scores(make_series(speeds, fps));
            return py::make_tuple(ts.scores, ts.throw_frame,
                                  py::make_tuple(ts.window.start, ts.window.end));
        },
        py::arg("speeds"), py::arg("fps") = 30.0,
        "Relative-speed scores, the selected throw frame, and the search window.");
    m.def(
        "detect_throw_frame",
        [](const std::string& pose_path, const std::string& view, int toward_target_sign) {
            throwdetect::DetectConfig config;
            config.toward_target_sign = toward_target_sign;
            return throwdetect::detect_throw_frame(io::load_pose_sequence(pose_path),
                                                   view_from_name(view), config);
        },
        py::arg("pose_path"), py::arg("view") = "deg0", py::arg("toward_target_sign") = 1);

    // metrics and class weights
    m.def(
        "compute_metrics",
        [](const std::vector<std::vector<long>>& confusion) {
            eval::ConfusionMatrix cm(confusion.size());
            for (std::size_t i = 0; i < confusion.size(); ++i) {
                for (std::size_t j = 0; j < confusion[i].size(); ++j) cm.add(i, j, confusion[i][j]);
            }
            const auto metrics = eval::compute_metrics(cm);
            py::dict out;
            out["accuracy"] = metrics.accuracy;
            out["macro_f1"] = metrics.macro_f1;
            out["per_class_f1"] = metrics.per_class_f1;
            if (metrics.mcc.has_value()) out["mcc"] = *metrics.mcc;
            return out;
        },
        py::arg("confusion"), "Accuracy, macro-F1, per-class F1, and (binary) MCC.");
    m.def(
        "class_weights",
        [](const std::vector<int>& labels, std::size_t k) {
            return eval::class_weights(labels, k);
        },
        py::arg("labels"), py::arg("num_classes"));

    // prior matrix
    m.def(
        "build_prior",
        [](const std::string& manifest_path) {
            const auto manifest = io::load_manifest(manifest_path);
            std::vector<ThrowRecord> mistakes;
            for (const auto& rec : manifest.records) {
                if (!rec.congruence && !rec.outcome.is_miss()) mistakes.push_back(rec);
            }
            return prior_rows(intent::PriorMatrix::from_records(mistakes));
        },
        py::arg("manifest_path"),
        "Add-one smoothed P(intent | outcome, mistake) as nine rows of nine probabilities.");
    m.def(
        "predict_intent_from_prior",
        [](const std::string& prior_path, int outcome, std::uint64_t seed) {
            const auto prior = intent::PriorMatrix::load(prior_path);
            Rng rng(seed);
            return intent::predict_intent_from_prior(prior, Zone::cell(outcome), rng).cell_index();
        },
        py::arg("prior_path"), py::arg("outcome"), py::arg("seed") = 0);

    // synthetic data and evaluation
    m.def(
        "generate_dataset",
        [](const std::string& out_dir, std::uint64_t seed, const std::string& config_path) {
            synth::GeneratorConfig config;
            if (!config_path.empty()) config = synth::GeneratorConfig::from_json_file(config_path);
            std::filesystem::create_directories(out_dir);
            return synth::generate_dataset(config, seed, out_dir).records.size();
        },
        py::arg("out_dir"), py::arg("seed") = 0, py::arg("config_path") = std::string(),
        "Write a seeded synthetic dataset; returns the record count.");
    m.def(
        "evaluate",
        [](const std::string& manifest_path, const std::string& task, int folds, std::uint64_t seed,
           int max_epochs, int jobs) {
            eval::EvalConfig config;
            config.task = eval::task_from_name(task);
            config.folds = folds;
            config.seed = seed;
            config.max_epochs = max_epochs;
            config.jobs = jobs;
            return report_to_dict(eval::evaluate_pipeline(pipeline::load_dataset(manifest_path), config));
        },
        py::arg("manifest_path"), py::arg("task") = "end-to-end", py::arg("folds") = 5,
        py::arg("seed") = 0, py::arg("max_epochs") = 300, py::arg("jobs") = 1,
        "Cross-validated protocol over a dataset manifest; returns the report.");
}
