#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "throwsense/intent.hpp"
#include "throwsense/pipeline.hpp"
#include "throwsense/synth.hpp"
#include "throwsense/throwdetect.hpp"

using namespace throwsense;
using namespace throwsense::synth;
namespace fs = std::filesystem;

namespace {

// RK4 flight integration: an independent route to the ballistic impact
Vec3 rk4_flight(const Vec3& p0, const Vec3& v0, double g, double t_end, int steps) {
    Vec3 p = p0, v = v0;
    const double h = t_end / steps;
    for (int i = 0; i < steps; ++i) {
        // state (p, v), dp/dt = v, dv/dt = (0, 0, -g); gravity is constant so
        // the k-slopes only differ in the position component
        const Vec3 k1v{0.0, 0.0, -g};
        const Vec3 k1p = v;
        const Vec3 k2p{v[0], v[1], v[2] - g * h / 2.0};
        const Vec3 k3p = k2p;
        const Vec3 k4p{v[0], v[1], v[2] - g * h};
        for (int d = 0; d < 3; ++d) {
            p[d] += h / 6.0 * (k1p[d] + 2.0 * k2p[d] + 2.0 * k3p[d] + k4p[d]);
            v[d] += h * k1v[d];
        }
    }
    return p;
}

SubjectProfile noiseless_subject() {
    SubjectProfile s;
    s.release_speed_std = 0.0;
    s.aim_sigma_h = 0.0;
    s.aim_sigma_v = 0.0;
    s.pixel_jitter = 0.0;
    s.dropout_rate = 0.0;
    return s;
}

double channel_pair_mass(const ReactionFeatures& f) {
    double acc = 0.0;
    for (int r = 0; r < ReactionFeatures::kRows; ++r) acc += f.at(r, 5) + f.at(r, 6);
    return acc / ReactionFeatures::kRows;
}

} // namespace

TEST_CASE("noiseless throws hit their intent zone exactly") {
    const WorldConfig world;
    const auto subject = noiseless_subject();
    Rng rng(1);
    for (int zone = 1; zone <= 9; ++zone) {
        const auto result = simulate_throw(world, subject, Zone::cell(zone), rng);
        CHECK(result.outcome == result.intent);
        CHECK(result.congruence);
        const Vec3 center = world.zone_center(Zone::cell(zone));
        CHECK(std::abs(result.impact_y - center[1]) < 1e-9);
        CHECK(std::abs(result.impact_z - center[2]) < 1e-9);
    }
}

TEST_CASE("closed-form flight matches an RK4 integration oracle") {
    const WorldConfig world;
    Rng rng(2);
    SubjectProfile subject; // default noise
    for (int i = 0; i < 20; ++i) {
        const auto result = simulate_throw(world, subject, Zone::cell(1 + (i % 9)), rng);
        const Vec3 impact =
            rk4_flight(result.release_point, result.release_velocity, world.gravity,
                       result.flight_time, 400);
        CHECK(std::abs(impact[0] - world.target_plane_distance) < 1e-9);
        CHECK(std::abs(impact[1] - result.impact_y) < 1e-9);
        CHECK(std::abs(impact[2] - result.impact_z) < 1e-9);
    }
}

TEST_CASE("an underpowered throw is unreachable") {
    const WorldConfig world;
    auto subject = noiseless_subject();
    subject.release_speed_mean = 2.0;
    Rng rng(3);
    CHECK_THROWS_AS(simulate_throw(world, subject, Zone::cell(5), rng), Unreachable);
}

TEST_CASE("default calibration reproduces the reference mistake and miss fractions") {
    const GeneratorConfig config;
    Rng rng(4);
    int mistakes = 0, misses = 0, n = 0;
    for (int s = 0; s < 30; ++s) {
        Rng prof = Rng(4).split("cal" + std::to_string(s));
        SubjectProfile subject = config.subject;
        subject.release_speed_mean = std::clamp(
            subject.release_speed_mean + prof.normal(0.0, config.subject_speed_spread), 7.0, 12.0);
        const double scale = std::clamp(1.0 + prof.normal(0.0, config.subject_aim_spread), 0.55, 1.6);
        subject.aim_sigma_h *= scale;
        subject.aim_sigma_v *= scale;
        for (int i = 0; i < 150; ++i) {
            const auto r = simulate_throw(config.world, subject, Zone::cell(1 + (i % 9)), rng);
            mistakes += !r.congruence;
            misses += r.outcome.is_miss();
            ++n;
        }
    }
    const double mistake_rate = static_cast<double>(mistakes) / n;
    const double miss_rate = static_cast<double>(misses) / n;
    CHECK(std::abs(mistake_rate - 0.47) <= 0.05);
    CHECK(std::abs(miss_rate - 0.16) <= 0.05);
}

TEST_CASE("points on the optical axis project to the principal point") {
    const WorldConfig world;
    for (View view : {View::deg0, View::deg45, View::deg90}) {
        const auto cam = CameraModel::for_view(view, world);
        const Vec3 dir{cam.look_at[0] - cam.position[0], cam.look_at[1] - cam.position[1],
                       cam.look_at[2] - cam.position[2]};
        const Vec3 p{cam.position[0] + 0.7 * dir[0], cam.position[1] + 0.7 * dir[1],
                     cam.position[2] + 0.7 * dir[2]};
        const auto px = cam.project(p);
        REQUIRE(px.has_value());
        CHECK(px->x == doctest::Approx(424.0).epsilon(1e-9));
        CHECK(px->y == doctest::Approx(240.0).epsilon(1e-9));
    }
}

TEST_CASE("projection matches a homogeneous-matrix oracle") {
    const WorldConfig world;
    const auto cam = CameraModel::for_view(View::deg45, world);

    // independent 3x4 projection matrix K [R | t]
    const double fx = 424.0 / std::tan(cam.hfov_deg * M_PI / 360.0);
    const double fy = 240.0 / std::tan(cam.vfov_deg * M_PI / 360.0);
    Vec3 f{cam.look_at[0] - cam.position[0], cam.look_at[1] - cam.position[1],
           cam.look_at[2] - cam.position[2]};
    const double fn = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
    for (double& v : f) v /= fn;
    Vec3 r{f[1], -f[0], 0.0}; // f x z-up
    const double rn = std::sqrt(r[0] * r[0] + r[1] * r[1]);
    r[0] /= rn;
    r[1] /= rn;
    const Vec3 u{r[1] * f[2] - r[2] * f[1], r[2] * f[0] - r[0] * f[2], r[0] * f[1] - r[1] * f[0]};

    Rng rng(5);
    for (int i = 0; i < 100; ++i) {
        const Vec3 p{rng.uniform(-1.0, 1.5), rng.uniform(-1.5, 1.5), rng.uniform(0.0, 2.5)};
        // homogeneous multiply: rows (fx*r + cx*f, -fy*u + cy*f, f) applied to p - position
        const Vec3 d{p[0] - cam.position[0], p[1] - cam.position[1], p[2] - cam.position[2]};
        const double row_x = fx * (r[0] * d[0] + r[1] * d[1] + r[2] * d[2]) +
                             424.0 * (f[0] * d[0] + f[1] * d[1] + f[2] * d[2]);
        const double row_y = -fy * (u[0] * d[0] + u[1] * d[1] + u[2] * d[2]) +
                             240.0 * (f[0] * d[0] + f[1] * d[1] + f[2] * d[2]);
        const double w = f[0] * d[0] + f[1] * d[1] + f[2] * d[2];

        const PixelPos ours = cam.project_unclipped(p);
        CHECK(std::abs(ours.x - row_x / w) < 1e-9);
        CHECK(std::abs(ours.y - row_y / w) < 1e-9);
    }
}

TEST_CASE("the frontal camera sees the ball for 4-6 frames after release") {
    const GeneratorConfig config;
    const auto cam = CameraModel::for_view(View::deg0, config.world);
    Rng rng(6);
    std::vector<int> visible;
    for (int i = 0; i < 500; ++i) {
        const auto result = simulate_throw(config.world, config.subject, Zone::cell(1 + (i % 9)), rng);
        const auto track = project_trajectory(result, cam, config.world.gravity, 30);
        int count = 0;
        for (std::size_t k = 1; k < track.size() && track[k].has_value(); ++k) ++count;
        visible.push_back(count);
    }
    std::nth_element(visible.begin(), visible.begin() + 250, visible.end());
    const int median = visible[250];
    CHECK(median >= 4);
    CHECK(median <= 6);
}

TEST_CASE("noiseless wrist profiles recover the release frame exactly in every view") {
    GeneratorConfig config;
    config.subject = noiseless_subject();
    for (View view : {View::deg0, View::deg45, View::deg90}) {
        const auto cam = CameraModel::for_view(view, config.world);
        throwdetect::DetectConfig dc;
        dc.toward_target_sign = cam.toward_target_sign;
        for (int i = 0; i < 25; ++i) {
            Rng rng = Rng(7).split(view_name(view) + std::to_string(i));
            const auto gen =
                generate_throw(config, config.subject, "s01", view, Zone::cell(1 + (i % 9)), rng);
            CHECK(throwdetect::detect_throw_frame(gen.pose, view, dc) ==
                  static_cast<std::size_t>(gen.release_frame));
        }
    }
}

TEST_CASE("default noise keeps throw-frame recovery within 2 frames on 95% of throws") {
    const GeneratorConfig config;
    int within = 0;
    const int n = 500;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng(8).split(i);
        const auto gen =
            generate_throw(config, config.subject, "s01", View::deg0, Zone::cell(1 + (i % 9)), rng);
        const auto detected = throwdetect::detect_throw_frame(gen.pose, View::deg0);
        within += std::abs(static_cast<int>(detected) - gen.release_frame) <= 2;
    }
    CHECK(within >= n * 95 / 100);
}

TEST_CASE("the release frame sits strictly inside the trimmed search window") {
    const GeneratorConfig config;
    for (int i = 0; i < 40; ++i) {
        Rng rng = Rng(9).split(i);
        const auto gen =
            generate_throw(config, config.subject, "s02", View::deg0, Zone::cell(1 + (i % 9)), rng);
        const auto window = throwdetect::trimmed_window(gen.pose.frame_count());
        CHECK(static_cast<std::size_t>(gen.release_frame) > window.start);
        CHECK(static_cast<std::size_t>(gen.release_frame) < window.end);
    }
}

TEST_CASE("reaction rows live on the simplex") {
    Rng rng(10);
    for (bool congruent : {true, false}) {
        const auto f = synth_reaction(congruent, 1.0, rng);
        for (int r = 0; r < ReactionFeatures::kRows; ++r) {
            double sum = 0.0;
            for (int c = 0; c < ReactionFeatures::kCols; ++c) {
                CHECK(f.at(r, c) >= 0.0);
                sum += f.at(r, c);
            }
            CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
        }
    }
}

TEST_CASE("at intensity zero, congruent and incongruent reactions are indistinguishable") {
    Rng rng(11);
    const int n = 10000;
    double sum_a = 0.0, sum_b = 0.0, sq_a = 0.0, sq_b = 0.0;
    for (int i = 0; i < n; ++i) {
        const double a = channel_pair_mass(synth_reaction(true, 0.0, rng));
        const double b = channel_pair_mass(synth_reaction(false, 0.0, rng));
        sum_a += a;
        sum_b += b;
        sq_a += a * a;
        sq_b += b * b;
    }
    const double mean_a = sum_a / n, mean_b = sum_b / n;
    const double var_a = sq_a / n - mean_a * mean_a;
    const double var_b = sq_b / n - mean_b * mean_b;
    const double se = std::sqrt((var_a + var_b) / n);
    CHECK(std::abs(mean_a - mean_b) < 4.0 * se);
}

TEST_CASE("at intensity one, incongruent reactions shift mass onto the reaction channels") {
    Rng rng(12);
    double congruent_mass = 0.0, incongruent_mass = 0.0;
    const int n = 500;
    for (int i = 0; i < n; ++i) {
        congruent_mass += channel_pair_mass(synth_reaction(true, 1.0, rng));
        incongruent_mass += channel_pair_mass(synth_reaction(false, 1.0, rng));
    }
    CHECK(incongruent_mass / n - congruent_mass / n > 0.2);
}

TEST_CASE("dataset generation: counts, uniform intents, and paper-scale congruence") {
    GeneratorConfig config;
    config.n_subjects = 10;
    config.rounds_per_subject = 14;
    const auto throws_data = generate_throws(config, 77);
    CHECK(throws_data.size() == 1260);

    std::map<std::string, std::array<int, 10>> intents;
    int struck = 0, congruent_struck = 0;
    for (const auto& gen : throws_data) {
        intents[gen.record.subject_id][static_cast<std::size_t>(gen.record.intent.cell_index())]++;
        if (!gen.record.outcome.is_miss()) {
            ++struck;
            congruent_struck += gen.record.congruence;
        }
    }
    for (const auto& [subject, hist] : intents) {
        for (int zone = 1; zone <= 9; ++zone) {
            CHECK(hist[static_cast<std::size_t>(zone)] == config.rounds_per_subject);
        }
    }
    // among struck throws the congruent share sits near the reference 63%
    const double congruent_frac = static_cast<double>(congruent_struck) / struck;
    CHECK(std::abs(congruent_frac - 0.63) < 0.06);
}

TEST_CASE("the intent distribution among mistakes is close to uniform") {
    GeneratorConfig config;
    config.n_subjects = 6;
    config.rounds_per_subject = 20;
    const auto throws_data = generate_throws(config, 78);

    std::array<double, 10> mistake_by_intent{};
    double mistakes = 0.0;
    for (const auto& gen : throws_data) {
        if (!gen.record.congruence) {
            mistake_by_intent[static_cast<std::size_t>(gen.record.intent.cell_index())] += 1.0;
            mistakes += 1.0;
        }
    }
    for (int zone = 1; zone <= 9; ++zone) {
        CHECK(std::abs(mistake_by_intent[static_cast<std::size_t>(zone)] / mistakes - 1.0 / 9.0) < 0.04);
    }
}

TEST_CASE("aim anisotropy makes vertical neighbors dominate the prior") {
    GeneratorConfig config;
    config.n_subjects = 6;
    config.rounds_per_subject = 25;
    const auto throws_data = generate_throws(config, 79);

    std::vector<ThrowRecord> mistakes;
    for (const auto& gen : throws_data) {
        if (!gen.record.congruence && !gen.record.outcome.is_miss()) mistakes.push_back(gen.record);
    }
    const auto prior = intent::PriorMatrix::from_records(mistakes, false);

    double vertical = 0.0, horizontal = 0.0;
    int v_terms = 0, h_terms = 0;
    for (int outcome = 1; outcome <= 9; ++outcome) {
        const Zone z = Zone::cell(outcome);
        if (z.row() > 0) {
            vertical += prior.prob(z, outcome - 3);
            ++v_terms;
        }
        if (z.row() < 2) {
            vertical += prior.prob(z, outcome + 3);
            ++v_terms;
        }
        if (z.col() > 0) {
            horizontal += prior.prob(z, outcome - 1);
            ++h_terms;
        }
        if (z.col() < 2) {
            horizontal += prior.prob(z, outcome + 1);
            ++h_terms;
        }
    }
    CHECK(vertical / v_terms > 1.5 * (horizontal / h_terms));
}

TEST_CASE("generation is byte-identical for a fixed seed") {
    GeneratorConfig config;
    config.n_subjects = 2;
    config.rounds_per_subject = 2;

    const auto dir_a = fs::temp_directory_path() / "throwsense_gen_a";
    const auto dir_b = fs::temp_directory_path() / "throwsense_gen_b";
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
    fs::create_directories(dir_a);
    fs::create_directories(dir_b);
    generate_dataset(config, 123, dir_a);
    generate_dataset(config, 123, dir_b);

    for (const char* rel :
         {"manifest.json", "features/s01/throw_0000_pose.json", "features/s02/throw_0011_reaction.json"}) {
        std::ifstream a(dir_a / rel), b(dir_b / rel);
        REQUIRE(a);
        REQUIRE(b);
        const std::string sa((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
        const std::string sb((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
        CHECK(sa == sb);
    }
    fs::remove_all(dir_a);
    fs::remove_all(dir_b);
}

TEST_CASE("written datasets load back and yield the in-memory features") {
    GeneratorConfig config;
    config.n_subjects = 2;
    config.rounds_per_subject = 1;

    const auto dir = fs::temp_directory_path() / "throwsense_gen_rt";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const auto manifest = generate_dataset(config, 321, dir);
    CHECK(manifest.records.size() == 18);
    CHECK(manifest.metadata.find("seed=321") != std::string::npos);
    CHECK(manifest.metadata.find("config_hash=") != std::string::npos);

    const auto from_disk = pipeline::load_dataset(dir / "manifest.json");
    const auto in_memory = pipeline::dataset_from_throws(generate_throws(config, 321));
    REQUIRE(from_disk.size() == in_memory.size());
    for (std::size_t i = 0; i < from_disk.size(); ++i) {
        for (std::size_t k = 0; k < from_disk.outcome_features[i].values.size(); ++k) {
            CHECK(from_disk.outcome_features[i].values[k] ==
                  doctest::Approx(in_memory.outcome_features[i].values[k]).epsilon(1e-12));
        }
        CHECK(from_disk.reaction_features[i].values == in_memory.reaction_features[i].values);
    }
    fs::remove_all(dir);
}

TEST_CASE("outcome features rise through the image on the post-release rows") {
    GeneratorConfig config;
    config.subject = noiseless_subject();
    Rng rng(13);
    const auto gen = generate_throw(config, config.subject, "s01", View::deg0, Zone::cell(2), rng);
    const auto data = pipeline::dataset_from_throws(std::vector<GeneratedThrow>{gen});

    const auto& f = data.outcome_features[0];
    int strict_rises = 0;
    for (int r = 6; r < OutcomeFeatures::kRows; ++r) {
        CHECK(f.at(r, 1) <= f.at(r - 1, 1) + 1e-12); // image y shrinks as the ball climbs
        strict_rises += f.at(r, 1) < f.at(r - 1, 1);
    }
    CHECK(strict_rises >= 3);
}

TEST_CASE("rendered window frames segment to within a pixel of the ground truth") {
    GeneratorConfig config;
    config.subject = noiseless_subject();
    Rng rng(14);
    const auto gen = generate_throw(config, config.subject, "s01", View::deg0, Zone::cell(5), rng);
    const auto cam = CameraModel::for_view(View::deg0, config.world);

    for (int t = gen.release_frame - 10; t <= gen.release_frame + 5; ++t) {
        const auto truth = gen.ball.positions[static_cast<std::size_t>(t)];
        const auto frame = render_frame(gen, cam, static_cast<std::size_t>(t));
        const auto seg = balltrack::segment_ball(frame, default_ball_range());
        if (!truth.has_value()) continue; // ball already out of frame
        REQUIRE(seg.has_value());
        CHECK(std::abs(seg->x - truth->x) <= 1.0);
        CHECK(std::abs(seg->y - truth->y) <= 1.0);
    }
}

TEST_CASE("generator configs round-trip through JSON") {
    GeneratorConfig config;
    config.n_subjects = 3;
    config.views = {View::deg0, View::deg90};
    config.subject.aim_sigma_v = 0.07;

    const auto path = fs::temp_directory_path() / "throwsense_gencfg.json";
    config.to_json_file(path);
    const auto loaded = GeneratorConfig::from_json_file(path);
    fs::remove(path);

    CHECK(loaded.n_subjects == 3);
    CHECK(loaded.views.size() == 2);
    CHECK(loaded.subject.aim_sigma_v == 0.07);
    CHECK(loaded.canonical_json() == config.canonical_json());
}
