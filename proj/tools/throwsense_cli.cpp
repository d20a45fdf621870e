#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "throwsense/eval.hpp"
#include "throwsense/intent.hpp"
#include "throwsense/io.hpp"
#include "throwsense/pipeline.hpp"
#include "throwsense/synth.hpp"
#include "throwsense/throwdetect.hpp"
#include "throwsense/version.hpp"

namespace ts = throwsense;
using nlohmann::json;

namespace {

constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;

// Every artifact carries its provenance; the hash covers the resolved options.
json provenance(std::uint64_t seed, const json& resolved_options) {
    return json{{"seed", seed},
                {"config_hash", ts::Rng::fnv1a(resolved_options.dump())},
                {"tool_version", ts::kToolVersion}};
}

void ensure_writable(const std::filesystem::path& path, bool force) {
    if (!force && std::filesystem::exists(path)) {
        throw CLI::ValidationError("output", path.string() + " exists; pass --force to overwrite");
    }
}

void emit_report(const json& report, const std::string& report_path, bool force) {
    if (report_path.empty()) {
        std::cout << report.dump(2) << '\n';
        return;
    }
    ensure_writable(report_path, force);
    std::ofstream out(report_path);
    if (!out) throw ts::ParseError("cannot open " + report_path + " for writing");
    out << report.dump(2) << '\n';
}

std::vector<ts::nn::LabeledSample> task_samples(const ts::eval::Dataset& data,
                                                std::span<const std::size_t> idx, ts::eval::Task task) {
    std::vector<ts::nn::LabeledSample> samples;
    for (std::size_t i : idx) {
        const ts::ThrowRecord& rec = data.manifest.records[i];
        if (task == ts::eval::Task::outcome) {
            samples.push_back({ts::models::to_tensor(data.outcome_features[i]),
                               rec.outcome.cell_index() - 1});
        } else {
            samples.push_back({ts::models::to_tensor(data.reaction_features[i]),
                               rec.congruence ? 1 : 0});
        }
    }
    return samples;
}

// ------------------------------------------------------------- subcommands

struct SynthArgs {
    std::string config_path;
    std::string out_dir;
    std::uint64_t seed = 0;
    bool force = false;
};

int run_synth(const SynthArgs& args) {
    ts::synth::GeneratorConfig config;
    if (!args.config_path.empty()) {
        config = ts::synth::GeneratorConfig::from_json_file(args.config_path);
    }
    std::filesystem::create_directories(args.out_dir);
    const auto manifest_path = std::filesystem::path(args.out_dir) / "manifest.json";
    ensure_writable(manifest_path, args.force);

    const auto manifest = ts::synth::generate_dataset(config, args.seed, args.out_dir);

    json summary{{"manifest", manifest_path.string()},
                 {"records", manifest.records.size()},
                 {"provenance", provenance(args.seed, json::parse(config.canonical_json()))}};
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct DetectArgs {
    std::string pose_path;
    std::string view = "deg0";
    std::string scores_csv;
    int toward_target_sign = 1;
    bool force = false;
};

int run_detect(const DetectArgs& args) {
    const auto pose = ts::io::load_pose_sequence(args.pose_path);
    const ts::View view = ts::view_from_name(args.view);
    ts::throwdetect::DetectConfig config;
    config.toward_target_sign = args.toward_target_sign;

    const std::size_t frame = ts::throwdetect::detect_throw_frame(pose, view, config);
    const json resolved{{"pose", args.pose_path},
                        {"view", args.view},
                        {"toward_target_sign", args.toward_target_sign}};

    if (!args.scores_csv.empty()) {
        ensure_writable(args.scores_csv, args.force);
        std::ofstream csv(args.scores_csv);
        if (view == ts::View::deg0) {
            const auto scores = ts::throwdetect::frontal_scores(
                ts::throwdetect::wrist_speed_series(pose, config));
            csv << "frame,score\n";
            for (std::size_t i = 0; i < scores.scores.size(); ++i) {
                csv << i << ',' << scores.scores[i] << '\n';
            }
        } else {
            csv << "frame,throw_frame_indicator\n";
            for (std::size_t i = 0; i < pose.frame_count(); ++i) {
                csv << i << ',' << (i == frame ? 1 : 0) << '\n';
            }
        }
    }

    json out{{"throw_frame", frame},
             {"view", args.view},
             {"frames", pose.frame_count()},
             {"provenance", provenance(0, resolved)}};
    std::cout << out.dump(2) << '\n';
    return 0;
}

struct TrackArgs {
    std::string frames_path;
    std::string pose_path;
    std::string color_path;
    int throw_frame = -1;
    std::string report_path;
    bool force = false;
};

int run_track(const TrackArgs& args) {
    const auto frames = ts::io::load_raster_frames(args.frames_path);
    if (frames.empty()) throw ts::SchemaError("frames file holds no frames");
    const ts::balltrack::ColorRange range = args.color_path.empty()
                                                ? ts::synth::default_ball_range()
                                                : ts::io::load_color_range(args.color_path);

    json detections = json::array();
    std::vector<std::optional<ts::PixelPos>> raw;
    for (const auto& frame : frames) {
        const auto center = ts::balltrack::segment_ball(frame, range);
        raw.push_back(center);
        if (center.has_value()) {
            detections.push_back({center->x, center->y});
        } else {
            detections.push_back(nullptr);
        }
    }

    const json resolved{{"frames", args.frames_path},
                        {"pose", args.pose_path},
                        {"color", args.color_path},
                        {"throw_frame", args.throw_frame}};
    json out{{"detections", std::move(detections)}, {"provenance", provenance(0, resolved)}};

    if (!args.pose_path.empty() && args.throw_frame >= 0) {
        const auto pose = ts::io::load_pose_sequence(args.pose_path);
        const auto wrist_idx = pose.joint_index("right_wrist");
        std::vector<ts::PixelPos> wrist;
        for (const auto& f : pose.frames) wrist.push_back({f[wrist_idx].x, f[wrist_idx].y});
        const auto track = ts::balltrack::assemble_ball_track(raw, wrist, args.throw_frame);
        const auto features =
            ts::balltrack::outcome_feature_vector(track, frames[0].width, frames[0].height);

        json rows = json::array();
        for (int r = 0; r < ts::OutcomeFeatures::kRows; ++r) {
            rows.push_back({features.at(r, 0), features.at(r, 1)});
        }
        out["throw_frame"] = args.throw_frame;
        out["degenerate"] = track.degenerate;
        out["outcome_features"] = std::move(rows);
    }

    emit_report(out, args.report_path, args.force);
    return 0;
}

struct TrainArgs {
    std::string task = "outcome";
    std::string manifest_path;
    std::string out_path;
    std::string log_path;
    std::uint64_t seed = 0;
    int max_epochs = 300;
    std::size_t lstm_hidden = 32;
    bool force = false;
};

int run_train(const TrainArgs& args) {
    ensure_writable(args.out_path, args.force);
    const auto data = ts::pipeline::load_dataset(args.manifest_path);

    // keep only struck throws, as every model trains on them
    ts::eval::Dataset working;
    for (std::size_t i = 0; i < data.size(); ++i) {
        if (data.manifest.records[i].outcome.is_miss()) continue;
        working.manifest.records.push_back(data.manifest.records[i]);
        working.outcome_features.push_back(data.outcome_features[i]);
        working.reaction_features.push_back(data.reaction_features[i]);
    }
    if (working.manifest.records.empty()) throw ts::InsufficientData("no struck throws to train on");

    const json resolved{{"task", args.task},
                        {"manifest", args.manifest_path},
                        {"max_epochs", args.max_epochs},
                        {"lstm_hidden", args.lstm_hidden}};

    if (args.task == "intent") {
        // intent "training" is counting: build the mistake prior and save it
        std::vector<ts::ThrowRecord> mistakes;
        for (const auto& rec : working.manifest.records) {
            if (!rec.congruence) mistakes.push_back(rec);
        }
        const auto prior = ts::intent::PriorMatrix::from_records(mistakes);
        prior.save(args.out_path);
        json summary{{"task", args.task},
                     {"records", working.manifest.records.size()},
                     {"mistakes", mistakes.size()},
                     {"out", args.out_path},
                     {"provenance", provenance(args.seed, resolved)}};
        std::cout << summary.dump(2) << '\n';
        return 0;
    }

    // stratified 80:20 train/val split via a 5-fold plan's first fold
    const ts::eval::StratKey key = args.task == "outcome" ? ts::eval::StratKey::outcome
                                                          : ts::eval::StratKey::congruence;
    const auto plan = ts::eval::make_fold_plan(working.manifest, key, args.seed, 5);
    std::vector<std::size_t> train_idx = plan.folds[0].train;
    train_idx.insert(train_idx.end(), plan.folds[0].test.begin(), plan.folds[0].test.end());
    std::sort(train_idx.begin(), train_idx.end());
    const std::vector<std::size_t>& val_idx = plan.folds[0].val;

    ts::nn::TrainConfig tc;
    tc.max_epochs = args.max_epochs;
    tc.seed = ts::Rng(args.seed).split("train-fit").seed();

    const ts::eval::Task task = ts::eval::task_from_name(args.task);
    std::unique_ptr<ts::nn::Model> model;
    if (task == ts::eval::Task::outcome) {
        model = ts::models::build_outcome_model(ts::Rng(args.seed).split("train-init").seed(),
                                                args.lstm_hidden);
    } else if (task == ts::eval::Task::congruence) {
        model = ts::models::build_congruence_model(ts::Rng(args.seed).split("train-init").seed());
        std::vector<int> labels;
        for (std::size_t i : train_idx) {
            labels.push_back(working.manifest.records[i].congruence ? 1 : 0);
        }
        tc.class_weights = ts::eval::class_weights(labels, 2);
    } else {
        throw CLI::ValidationError("--task", "train accepts outcome, congruence, or intent");
    }

    const auto result = ts::nn::fit(*model, task_samples(working, train_idx, task),
                                    task_samples(working, val_idx, task), tc);
    ts::io::save_weights(model->export_weights(), args.out_path);

    json log = json::array();
    for (const auto& epoch : result.log) {
        log.push_back({{"train_loss", epoch.train_loss}, {"val_loss", epoch.val_loss}});
    }
    json summary{{"task", args.task},
                 {"epochs", result.log.size()},
                 {"best_epoch", result.best_epoch},
                 {"best_val_loss", result.best_val_loss},
                 {"out", args.out_path},
                 {"provenance", provenance(args.seed, resolved)}};
    if (!args.log_path.empty()) {
        ensure_writable(args.log_path, args.force);
        std::ofstream out(args.log_path);
        out << json{{"epochs", std::move(log)}, {"provenance", provenance(args.seed, resolved)}}.dump(2)
            << '\n';
    }
    std::cout << summary.dump(2) << '\n';
    return 0;
}

struct PredictArgs {
    std::string outcome_model_path;
    std::string congruence_model_path;
    std::string prior_path;
    std::string manifest_path;
    std::string report_path;
    std::size_t lstm_hidden = 32;
    std::uint64_t seed = 0;
    bool force = false;
};

int run_predict(const PredictArgs& args) {
    auto outcome_model = ts::models::build_outcome_model(0, args.lstm_hidden);
    outcome_model->import_weights(ts::io::load_weights(args.outcome_model_path));
    auto congruence_model = ts::models::build_congruence_model(0);
    congruence_model->import_weights(ts::io::load_weights(args.congruence_model_path));
    const auto prior = ts::intent::PriorMatrix::load(args.prior_path);

    const auto data = ts::pipeline::load_dataset(args.manifest_path);

    json rows = json::array();
    long correct = 0, labeled = 0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const ts::ThrowRecord& rec = data.manifest.records[i];
        ts::Rng rng = ts::Rng(args.seed).split("predict").split(i);
        const auto pred = ts::intent::end_to_end_predict(*outcome_model, *congruence_model, prior,
                                                         data.outcome_features[i],
                                                         data.reaction_features[i], rng);
        rows.push_back(
            {{"subject_id", rec.subject_id},
             {"predicted_intent", pred.intent.cell_index()},
             {"predicted_outcome", pred.outcome_used.cell_index()},
             {"congruence_prob", pred.congruence_prob},
             {"via", pred.via == ts::intent::PredictionRoute::congruent_pass_through ? "pass-through"
                                                                                     : "prior-argmax"},
             {"true_intent", rec.intent.cell_index()}});
        correct += pred.intent == rec.intent;
        ++labeled;
    }

    const json resolved{{"outcome_model", args.outcome_model_path},
                        {"congruence_model", args.congruence_model_path},
                        {"prior", args.prior_path},
                        {"manifest", args.manifest_path}};
    json report{{"predictions", std::move(rows)},
                {"intent_accuracy", labeled ? static_cast<double>(correct) / labeled : 0.0},
                {"provenance", provenance(args.seed, resolved)}};
    emit_report(report, args.report_path, args.force);
    return 0;
}

struct EvaluateArgs {
    std::string manifest_path;
    std::string task = "end-to-end";
    int folds = 5;
    std::uint64_t seed = 0;
    std::string report_path;
    std::string per_fold_csv;
    std::string prior_scope = "dataset";
    int jobs = 1;
    int max_epochs = 300;
    std::size_t lstm_hidden = 32;
    bool force = false;
};

int run_evaluate(const EvaluateArgs& args) {
    const auto data = ts::pipeline::load_dataset(args.manifest_path);

    ts::eval::EvalConfig config;
    config.task = ts::eval::task_from_name(args.task);
    config.folds = args.folds;
    config.seed = args.seed;
    config.jobs = args.jobs;
    config.max_epochs = args.max_epochs;
    config.lstm_hidden = args.lstm_hidden;
    if (args.prior_scope == "dataset") {
        config.prior_scope = ts::eval::PriorScope::dataset;
    } else if (args.prior_scope == "subject") {
        config.prior_scope = ts::eval::PriorScope::subject;
    } else if (args.prior_scope == "uniform") {
        config.prior_scope = ts::eval::PriorScope::uniform;
    } else {
        throw CLI::ValidationError("--prior-scope", "expected dataset, subject, or uniform");
    }

    const auto report = ts::eval::evaluate_pipeline(data, config);

    const json resolved{{"manifest", args.manifest_path}, {"task", args.task},
                        {"folds", args.folds},           {"prior_scope", args.prior_scope},
                        {"max_epochs", args.max_epochs}, {"lstm_hidden", args.lstm_hidden}};
    json folds = json::array();
    for (const auto& fold : report.per_fold) folds.push_back(fold);
    json out{{"task", report.task},
             {"folds", report.folds},
             {"records_used", report.records_used},
             {"per_fold", std::move(folds)},
             {"mean", report.mean},
             {"stddev", report.stddev},
             {"warnings", report.warnings},
             {"provenance", provenance(args.seed, resolved)}};
    emit_report(out, args.report_path, args.force);

    if (!args.per_fold_csv.empty()) {
        ensure_writable(args.per_fold_csv, args.force);
        std::ofstream csv(args.per_fold_csv);
        csv << "fold";
        for (const auto& [name, _] : report.mean) csv << ',' << name;
        csv << '\n';
        for (std::size_t f = 0; f < report.per_fold.size(); ++f) {
            csv << f;
            for (const auto& [name, _] : report.mean) csv << ',' << report.per_fold[f].at(name);
            csv << '\n';
        }
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"mistake-aware intent recognition pipeline for a target-throwing task"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ts::kToolVersion));

    const char* env_seed = std::getenv("THROWSENSE_SEED");
    const std::uint64_t default_seed = env_seed ? std::strtoull(env_seed, nullptr, 10) : 0;

    SynthArgs synth_args;
    synth_args.seed = default_seed;
    auto* synth_cmd = app.add_subcommand("synth", "synthetic data generation");
    auto* generate = synth_cmd->add_subcommand("generate", "generate a labeled dataset");
    generate->add_option("--config", synth_args.config_path, "generator config JSON");
    generate->add_option("--out", synth_args.out_dir, "output directory")->required();
    generate->add_option("--seed", synth_args.seed, "master seed");
    generate->add_flag("--force", synth_args.force, "overwrite existing outputs");

    DetectArgs detect_args;
    auto* detect = app.add_subcommand("detect-throw", "locate the throw frame in a pose file");
    detect->add_option("--pose", detect_args.pose_path, "pose JSON")->required();
    detect->add_option("--view", detect_args.view, "deg0|deg45|deg90")->required();
    detect->add_option("--scores", detect_args.scores_csv, "write the per-frame series as CSV");
    detect->add_option("--toward-target-sign", detect_args.toward_target_sign,
                       "image-x direction of the target (+1/-1)");
    detect->add_flag("--force", detect_args.force, "overwrite existing outputs");

    TrackArgs track_args;
    auto* track = app.add_subcommand("track-ball", "segment the ball and assemble its track");
    track->add_option("--frames", track_args.frames_path, "raster frames JSON")->required();
    track->add_option("--throw-frame", track_args.throw_frame, "throw frame index");
    track->add_option("--pose", track_args.pose_path, "pose JSON for the wrist overlap");
    track->add_option("--color", track_args.color_path, "HSV color range JSON");
    track->add_option("--report", track_args.report_path, "write the JSON output here");
    track->add_flag("--force", track_args.force, "overwrite existing outputs");

    TrainArgs train_args;
    train_args.seed = default_seed;
    auto* train = app.add_subcommand("train", "train a model (or build the intent prior)");
    train->add_option("--task", train_args.task, "outcome|congruence|intent")->required();
    train->add_option("--manifest", train_args.manifest_path, "dataset manifest")->required();
    train->add_option("--out", train_args.out_path, "weights (or prior JSON) output")->required();
    train->add_option("--log", train_args.log_path, "write the per-epoch loss log here");
    train->add_option("--seed", train_args.seed, "master seed");
    train->add_option("--max-epochs", train_args.max_epochs, "epoch cap");
    train->add_option("--lstm-hidden", train_args.lstm_hidden, "outcome LSTM width");
    train->add_flag("--force", train_args.force, "overwrite existing outputs");

    PredictArgs predict_args;
    predict_args.seed = default_seed;
    auto* predict = app.add_subcommand("predict", "end-to-end intent prediction on a manifest");
    predict->add_option("--outcome-model", predict_args.outcome_model_path)->required();
    predict->add_option("--congruence-model", predict_args.congruence_model_path)->required();
    predict->add_option("--prior", predict_args.prior_path)->required();
    predict->add_option("--manifest", predict_args.manifest_path)->required();
    predict->add_option("--report", predict_args.report_path, "write the JSON report here");
    predict->add_option("--lstm-hidden", predict_args.lstm_hidden, "outcome LSTM width");
    predict->add_option("--seed", predict_args.seed, "tie-break seed");
    predict->add_flag("--force", predict_args.force, "overwrite existing outputs");

    EvaluateArgs eval_args;
    eval_args.seed = default_seed;
    auto* evaluate = app.add_subcommand("evaluate", "cross-validated protocol over a manifest");
    evaluate->add_option("--manifest", eval_args.manifest_path)->required();
    evaluate->add_option("--task", eval_args.task, "outcome|congruence|intent|end-to-end");
    evaluate->add_option("--folds", eval_args.folds, "fold count");
    evaluate->add_option("--seed", eval_args.seed, "master seed");
    evaluate->add_option("--report", eval_args.report_path, "write the JSON report here");
    evaluate->add_option("--per-fold-csv", eval_args.per_fold_csv, "per-fold metrics CSV");
    evaluate->add_option("--prior-scope", eval_args.prior_scope, "dataset|subject|uniform");
    evaluate->add_option("--jobs", eval_args.jobs, "parallel fold workers");
    evaluate->add_option("--max-epochs", eval_args.max_epochs, "epoch cap");
    evaluate->add_option("--lstm-hidden", eval_args.lstm_hidden, "outcome LSTM width");
    evaluate->add_flag("--force", eval_args.force, "overwrite existing outputs");

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return run_synth(synth_args);
        if (detect->parsed()) return run_detect(detect_args);
        if (track->parsed()) return run_track(track_args);
        if (train->parsed()) return run_train(train_args);
        if (predict->parsed()) return run_predict(predict_args);
        if (evaluate->parsed()) return run_evaluate(eval_args);
        std::cerr << app.help() << '\n';
        return kExitUsage;
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitUsage;
    } catch (const ts::Diverged& e) {
        std::cerr << "training error: " << e.what() << '\n';
        return kExitTraining;
    } catch (const ts::Error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitData;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitData;
    }
}
