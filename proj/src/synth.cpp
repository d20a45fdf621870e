#include "throwsense/synth.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace throwsense::synth {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kBallRadiusM = 0.035;
constexpr std::uint8_t kBallRgb[3] = {230, 120, 34};
constexpr std::uint8_t kBackgroundRgb[3] = {90, 90, 95};

Vec3 operator-(const Vec3& a, const Vec3& b) { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; }
Vec3 operator+(const Vec3& a, const Vec3& b) { return {a[0] + b[0], a[1] + b[1], a[2] + b[2]}; }
Vec3 operator*(double s, const Vec3& a) { return {s * a[0], s * a[1], s * a[2]}; }
double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }
Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}
double norm(const Vec3& a) { return std::sqrt(dot(a, a)); }
Vec3 normalized(const Vec3& a) {
    const double n = norm(a);
    return {a[0] / n, a[1] / n, a[2] / n};
}

struct CameraBasis {
    Vec3 forward, right, up;
    double fx, fy, cx, cy;
};

CameraBasis basis_of(const CameraModel& cam) {
    CameraBasis b;
    b.forward = normalized(cam.look_at - cam.position);
    b.right = normalized(cross(b.forward, Vec3{0.0, 0.0, 1.0}));
    b.up = cross(b.right, b.forward);
    b.fx = (cam.width / 2.0) / std::tan(cam.hfov_deg * kPi / 360.0);
    b.fy = (cam.height / 2.0) / std::tan(cam.vfov_deg * kPi / 360.0);
    b.cx = cam.width / 2.0;
    b.cy = cam.height / 2.0;
    return b;
}

} // namespace

// ------------------------------------------------------------------ world

void WorldConfig::validate() const {
    if (target_plane_distance <= 0.0 || side_camera_distance <= 0.0 || zone_edge <= 0.0 ||
        grid_center_height <= 0.0 || gravity <= 0.0) {
        throw SchemaError("world config: all dimensions must be positive");
    }
}

Vec3 WorldConfig::zone_center(const Zone& zone) const {
    // row 0 is the top of the grid, col 0 the thrower's left (+y)
    const double y = (1 - zone.col()) * zone_edge;
    const double z = grid_center_height + (1 - zone.row()) * zone_edge;
    return {target_plane_distance, y, z};
}

Zone WorldConfig::classify_impact(double y, double z) const {
    const double u = y / zone_edge;
    const double w = (z - grid_center_height) / zone_edge;
    if (std::abs(u) > 1.5 || std::abs(w) > 1.5) return Zone::miss();
    const int col = std::clamp(static_cast<int>(std::floor(1.5 - u)), 0, 2);
    const int row = std::clamp(static_cast<int>(std::floor(1.5 - w)), 0, 2);
    return Zone::cell(3 * row + col + 1);
}

// ----------------------------------------------------------------- camera

CameraModel CameraModel::for_view(View view, const WorldConfig& world) {
    CameraModel cam;
    cam.look_at = {0.0, 0.0, 1.2}; // the thrower's torso
    switch (view) {
        case View::deg0:
            // under the target, looking back and slightly up at the thrower so
            // the rising ball stays in frame a few frames after release
            cam.position = {world.target_plane_distance, 0.0, 0.45};
            cam.look_at = {0.0, 0.0, 1.45};
            break;
        case View::deg45: {
            const double leg = world.side_camera_distance / std::sqrt(2.0);
            cam.position = {leg, -leg, 1.0};
            break;
        }
        case View::deg90:
            cam.position = {0.0, -world.side_camera_distance, 1.0};
            break;
    }
    // sign of the image-x response to motion toward the target
    const CameraBasis b = basis_of(cam);
    cam.toward_target_sign = b.right[0] >= 0.0 ? 1 : -1;
    return cam;
}

PixelPos CameraModel::project_unclipped(const Vec3& point) const {
    const CameraBasis b = basis_of(*this);
    const Vec3 d = point - position;
    const double depth = dot(d, b.forward);
    return {b.cx + b.fx * dot(d, b.right) / depth, b.cy - b.fy * dot(d, b.up) / depth};
}

std::optional<PixelPos> CameraModel::project(const Vec3& point) const {
    const CameraBasis b = basis_of(*this);
    const Vec3 d = point - position;
    const double depth = dot(d, b.forward);
    if (depth <= 1e-6) return std::nullopt;
    const PixelPos px{b.cx + b.fx * dot(d, b.right) / depth, b.cy - b.fy * dot(d, b.up) / depth};
    if (px.x < 0.0 || px.x >= width || px.y < 0.0 || px.y >= height) return std::nullopt;
    return px;
}

// ------------------------------------------------------------------ throws

void SubjectProfile::validate() const {
    if (release_speed_mean <= 0.0 || release_speed_std < 0.0 || aim_sigma_h < 0.0 ||
        aim_sigma_v < 0.0) {
        throw SchemaError("subject profile: speeds and noise must be non-negative");
    }
    if (reaction_intensity < 0.0 || reaction_intensity > 1.0) {
        throw SchemaError("subject profile: reaction intensity must lie in [0, 1]");
    }
}

ThrowResult simulate_throw(const WorldConfig& world, const SubjectProfile& subject, Zone intent,
                           Rng& rng) {
    world.validate();
    subject.validate();

    ThrowResult result;
    result.intent = intent;
    result.release_point = {subject.release_forward, subject.release_side, subject.release_height};

    const Vec3 target = world.zone_center(intent);
    const double dx = target[0] - result.release_point[0];
    const double dy = target[1] - result.release_point[1];
    const double dz = target[2] - result.release_point[2];
    const double d = std::hypot(dx, dy);
    const double g = world.gravity;
    const double s = subject.release_speed_mean;

    // flat ballistic solution for the elevation angle at the mean speed
    const double disc = s * s * s * s - g * (g * d * d + 2.0 * dz * s * s);
    if (disc < 0.0) {
        throw Unreachable("release speed " + std::to_string(s) + " m/s cannot reach the target");
    }
    const double theta = std::atan((s * s - std::sqrt(disc)) / (g * d));
    const double phi = std::atan2(dy, dx);

    // aim and speed perturbations (draw order is part of the seed contract)
    const double theta_actual = theta + rng.normal(0.0, subject.aim_sigma_v);
    const double phi_actual = phi + rng.normal(0.0, subject.aim_sigma_h);
    const double speed_actual = std::max(1.0, s + rng.normal(0.0, subject.release_speed_std));

    result.release_velocity = {speed_actual * std::cos(theta_actual) * std::cos(phi_actual),
                               speed_actual * std::cos(theta_actual) * std::sin(phi_actual),
                               speed_actual * std::sin(theta_actual)};
    if (result.release_velocity[0] < 0.5) {
        throw Unreachable("release velocity does not carry the ball toward the target plane");
    }

    result.flight_time = (world.target_plane_distance - result.release_point[0]) /
                         result.release_velocity[0];
    const Vec3 impact = trajectory_point(result, result.flight_time, g);
    result.impact_y = impact[1];
    result.impact_z = impact[2];
    result.outcome = world.classify_impact(result.impact_y, result.impact_z);
    result.congruence = congruence_of(result.intent, result.outcome);
    return result;
}

Vec3 trajectory_point(const ThrowResult& throw_result, double t, double gravity) {
    Vec3 p = throw_result.release_point + t * throw_result.release_velocity;
    p[2] -= 0.5 * gravity * t * t;
    return p;
}

std::vector<std::optional<PixelPos>> project_trajectory(const ThrowResult& throw_result,
                                                        const CameraModel& camera, double gravity,
                                                        std::size_t max_frames) {
    std::vector<std::optional<PixelPos>> track;
    track.reserve(max_frames);
    for (std::size_t k = 0; k < max_frames; ++k) {
        const double t = static_cast<double>(k) / camera.fps;
        track.push_back(camera.project(trajectory_point(throw_result, t, gravity)));
    }
    return track;
}

// ------------------------------------------------------------ wrist motion

namespace {

// cosine position easing from a to b over n frames (zero end speeds)
void ease_segment(std::vector<PixelPos>& out, const PixelPos& a, const PixelPos& b, int n) {
    for (int i = 1; i <= n; ++i) {
        const double t = (1.0 - std::cos(kPi * static_cast<double>(i) / n)) / 2.0;
        out.push_back({a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)});
    }
}

} // namespace

WristTracks synth_wrist_profile(const CameraModel& camera, const SubjectProfile& subject,
                                const Vec3& release_point, int release_frame, int total_frames) {
    const int whip_half = 8;      // half-width of the speed arc around release
    const int ext_half = 12;      // wider even window for the extension channel
    if (release_frame < ext_half + 10 || total_frames <= release_frame + ext_half + 2) {
        throw TooShort("release frame must sit well inside the clip");
    }

    const CameraBasis b = basis_of(camera);
    const double depth = dot(release_point - camera.position, b.forward);
    const double reach_px = b.fx * 0.6 / depth; // an arm's reach at the release depth

    const PixelPos release_px = camera.project_unclipped(release_point);
    const PixelPos rest_px = camera.project_unclipped({0.10, subject.release_side - 0.07, 0.85});
    const PixelPos windup_px = camera.project_unclipped({-0.05, subject.release_side - 0.12, 1.55});

    // pre-phase fills frame indices 0..release-ext_half, ending on the arc
    // entry so that arc offset tau lands exactly on frame release+tau
    const int pre = release_frame - ext_half + 1;
    const int hold = std::max(2, pre * 10 / 100);
    const int n_gather = std::max(3, (pre - hold) * 35 / 100);
    const int n_cock = pre - hold - n_gather;

    // Whip amplitude: start from anatomy, then raise it until the release-frame
    // speed dominates the approach segments with a 45% margin, so the global
    // speed maximum cannot land anywhere else even after filtering.
    double whip = 0.9 * reach_px;
    double extension = 0.0;
    PixelPos entry_px{};
    for (int pass = 0; pass < 4; ++pass) {
        extension = camera.toward_target_sign * 0.5 * whip;
        entry_px = {release_px.x - extension, release_px.y - whip};
        const double gather_peak = std::hypot(windup_px.x - rest_px.x, windup_px.y - rest_px.y) *
                                   kPi / (2.0 * n_gather);
        const double cock_peak = std::hypot(entry_px.x - windup_px.x, entry_px.y - windup_px.y) *
                                 kPi / (2.0 * n_cock);
        const double needed =
            std::max(gather_peak, cock_peak) / 0.55 * (2.0 * whip_half) / kPi;
        if (needed > whip) whip = needed;
    }

    WristTracks tracks;
    tracks.wrist.reserve(static_cast<std::size_t>(total_frames));

    // gather: stand still, small windup, then the cocking approach that dies
    // to zero speed exactly where the throwing arc begins
    for (int i = 0; i < hold; ++i) tracks.wrist.push_back(rest_px);
    ease_segment(tracks.wrist, rest_px, windup_px, n_gather);
    ease_segment(tracks.wrist, windup_px, entry_px, n_cock);

    // the throwing arc: around the release frame the extension channel is even
    // (its maximum exactly at release) and the whip channel odd (speed peak
    // exactly at release), so zero-phase filtering cannot move either argmax
    auto arc_u = [&](int tau) {
        return release_px.x + extension * (std::cos(kPi * tau / static_cast<double>(ext_half)) - 1.0) / 2.0;
    };
    auto arc_v = [&](int tau) {
        const int clamped = std::clamp(tau, -whip_half, whip_half);
        return release_px.y + whip * std::sin(kPi * clamped / (2.0 * whip_half));
    };
    for (int tau = -ext_half + 1; tau <= ext_half; ++tau) {
        tracks.wrist.push_back({arc_u(tau), arc_v(tau)});
    }

    // settle: ease the remaining frames toward a lowered carry position
    const PixelPos exit_px = tracks.wrist.back();
    const PixelPos settle_px{exit_px.x - 0.2 * extension, exit_px.y + 0.18 * whip};
    ease_segment(tracks.wrist, exit_px, settle_px,
                 total_frames - static_cast<int>(tracks.wrist.size()));

    // hip: static anchor with a slow, small sway
    const PixelPos hip_px = camera.project_unclipped({0.0, -0.12, 0.95});
    tracks.hip.reserve(static_cast<std::size_t>(total_frames));
    for (int i = 0; i < total_frames; ++i) {
        const double sway = 1.5 * std::sin(2.0 * kPi * 0.25 * static_cast<double>(i) / camera.fps);
        tracks.hip.push_back({hip_px.x + sway, hip_px.y});
    }
    return tracks;
}

// -------------------------------------------------------------- reactions

ReactionFeatures synth_reaction(bool congruent, double intensity, Rng& rng) {
    if (intensity < 0.0 || intensity > 1.0) {
        throw SchemaError("reaction intensity must lie in [0, 1]");
    }
    std::vector<double> alpha{1.0, 1.0, 8.0, 1.0, 1.0, 1.0, 1.0}; // neutral-dominant baseline
    if (!congruent) {
        alpha[5] += 6.0 * intensity;
        alpha[6] += 6.0 * intensity;
    }

    constexpr double kRho = 0.8;
    ReactionFeatures f;
    std::vector<double> row = rng.dirichlet(alpha);
    for (int r = 0; r < ReactionFeatures::kRows; ++r) {
        if (r > 0) {
            const std::vector<double> fresh = rng.dirichlet(alpha);
            for (int c = 0; c < ReactionFeatures::kCols; ++c) {
                row[static_cast<std::size_t>(c)] =
                    kRho * row[static_cast<std::size_t>(c)] + (1.0 - kRho) * fresh[static_cast<std::size_t>(c)];
            }
        }
        for (int c = 0; c < ReactionFeatures::kCols; ++c) f.at(r, c) = row[static_cast<std::size_t>(c)];
    }
    return f;
}

// ------------------------------------------------------------- generation

void GeneratorConfig::validate() const {
    world.validate();
    subject.validate();
    if (n_subjects < 1 || rounds_per_subject < 1 || views.empty()) {
        throw SchemaError("generator config: need at least one subject, round, and view");
    }
    if (min_frames_before_release < 20 || max_frames_before_release < min_frames_before_release ||
        frames_after_release < 15) {
        throw SchemaError("generator config: frame window bounds are out of range");
    }
}

namespace {

using nlohmann::json;

json config_to_json(const GeneratorConfig& c) {
    json views = json::array();
    for (View v : c.views) views.push_back(view_name(v));
    return json{
        {"schema", "throwsense.generator.v1"},
        {"world",
         {{"target_plane_distance", c.world.target_plane_distance},
          {"side_camera_distance", c.world.side_camera_distance},
          {"zone_edge", c.world.zone_edge},
          {"grid_center_height", c.world.grid_center_height},
          {"gravity", c.world.gravity}}},
        {"subject",
         {{"release_height", c.subject.release_height},
          {"release_forward", c.subject.release_forward},
          {"release_side", c.subject.release_side},
          {"release_speed_mean", c.subject.release_speed_mean},
          {"release_speed_std", c.subject.release_speed_std},
          {"aim_sigma_h", c.subject.aim_sigma_h},
          {"aim_sigma_v", c.subject.aim_sigma_v},
          {"reaction_intensity", c.subject.reaction_intensity},
          {"pixel_jitter", c.subject.pixel_jitter},
          {"dropout_rate", c.subject.dropout_rate}}},
        {"n_subjects", c.n_subjects},
        {"rounds_per_subject", c.rounds_per_subject},
        {"views", std::move(views)},
        {"subject_speed_spread", c.subject_speed_spread},
        {"subject_aim_spread", c.subject_aim_spread},
        {"min_frames_before_release", c.min_frames_before_release},
        {"max_frames_before_release", c.max_frames_before_release},
        {"frames_after_release", c.frames_after_release},
    };
}

template <typename T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace

GeneratorConfig GeneratorConfig::from_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (j.value("schema", "") != "throwsense.generator.v1") {
        throw SchemaError(path.string() + ": expected schema 'throwsense.generator.v1'");
    }

    GeneratorConfig c;
    if (j.contains("world")) {
        const json& w = j.at("world");
        maybe(w, "target_plane_distance", c.world.target_plane_distance);
        maybe(w, "side_camera_distance", c.world.side_camera_distance);
        maybe(w, "zone_edge", c.world.zone_edge);
        maybe(w, "grid_center_height", c.world.grid_center_height);
        maybe(w, "gravity", c.world.gravity);
    }
    if (j.contains("subject")) {
        const json& s = j.at("subject");
        maybe(s, "release_height", c.subject.release_height);
        maybe(s, "release_forward", c.subject.release_forward);
        maybe(s, "release_side", c.subject.release_side);
        maybe(s, "release_speed_mean", c.subject.release_speed_mean);
        maybe(s, "release_speed_std", c.subject.release_speed_std);
        maybe(s, "aim_sigma_h", c.subject.aim_sigma_h);
        maybe(s, "aim_sigma_v", c.subject.aim_sigma_v);
        maybe(s, "reaction_intensity", c.subject.reaction_intensity);
        maybe(s, "pixel_jitter", c.subject.pixel_jitter);
        maybe(s, "dropout_rate", c.subject.dropout_rate);
    }
    maybe(j, "n_subjects", c.n_subjects);
    maybe(j, "rounds_per_subject", c.rounds_per_subject);
    maybe(j, "subject_speed_spread", c.subject_speed_spread);
    maybe(j, "subject_aim_spread", c.subject_aim_spread);
    maybe(j, "min_frames_before_release", c.min_frames_before_release);
    maybe(j, "max_frames_before_release", c.max_frames_before_release);
    maybe(j, "frames_after_release", c.frames_after_release);
    if (j.contains("views")) {
        c.views.clear();
        for (const json& v : j.at("views")) c.views.push_back(view_from_name(v.get<std::string>()));
    }
    c.validate();
    return c;
}

void GeneratorConfig::to_json_file(const std::filesystem::path& path) const {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << config_to_json(*this).dump(2) << '\n';
}

std::string GeneratorConfig::canonical_json() const { return config_to_json(*this).dump(); }

namespace {

// nominal standing skeleton; the right wrist and right hip get real tracks
struct JointAnchor {
    const char* name;
    Vec3 position;
};

const std::vector<JointAnchor>& skeleton_anchors() {
    static const std::vector<JointAnchor> anchors = {
        {"nose", {0.05, 0.0, 1.62}},        {"left_eye", {0.04, 0.03, 1.65}},
        {"right_eye", {0.04, -0.03, 1.65}}, {"left_ear", {0.0, 0.07, 1.62}},
        {"right_ear", {0.0, -0.07, 1.62}},  {"left_shoulder", {0.0, 0.18, 1.45}},
        {"right_shoulder", {0.0, -0.18, 1.45}}, {"left_elbow", {0.02, 0.25, 1.15}},
        {"right_elbow", {0.05, -0.25, 1.2}},    {"left_wrist", {0.05, 0.28, 0.9}},
        {"right_wrist", {0.1, -0.25, 0.85}},    {"left_hip", {0.0, 0.12, 0.95}},
        {"right_hip", {0.0, -0.12, 0.95}},      {"left_knee", {0.02, 0.13, 0.5}},
        {"right_knee", {0.02, -0.13, 0.5}},     {"left_ankle", {0.0, 0.14, 0.08}},
        {"right_ankle", {0.0, -0.14, 0.08}},    {"head", {0.02, 0.0, 1.7}},
        {"neck", {0.0, 0.0, 1.5}},              {"mid_hip", {0.0, 0.0, 0.95}},
        {"left_big_toe", {0.08, 0.15, 0.02}},   {"right_big_toe", {0.08, -0.15, 0.02}},
        {"left_small_toe", {0.07, 0.18, 0.02}}, {"right_small_toe", {0.07, -0.18, 0.02}},
        {"left_heel", {-0.05, 0.14, 0.02}},     {"right_heel", {-0.05, -0.14, 0.02}},
    };
    return anchors;
}

} // namespace

GeneratedThrow generate_throw(const GeneratorConfig& config, const SubjectProfile& subject,
                              const std::string& subject_id, View view, Zone intent, Rng& rng) {
    GeneratedThrow gen;
    gen.physics = simulate_throw(config.world, subject, intent, rng);
    gen.gravity = config.world.gravity;

    const int span = config.max_frames_before_release - config.min_frames_before_release + 1;
    gen.release_frame =
        config.min_frames_before_release + static_cast<int>(rng.uniform_index(static_cast<std::uint64_t>(span)));
    const int total_frames = gen.release_frame + config.frames_after_release;

    const CameraModel camera = CameraModel::for_view(view, config.world);
    const WristTracks tracks =
        synth_wrist_profile(camera, subject, gen.physics.release_point, gen.release_frame, total_frames);

    // pose: projected static skeleton plus the dynamic wrist/hip, with jitter
    // and dropouts
    gen.pose.fps = camera.fps;
    gen.pose.joints = pose_joint_names();
    gen.pose.frames.reserve(static_cast<std::size_t>(total_frames));

    std::vector<PixelPos> static_px;
    for (const JointAnchor& anchor : skeleton_anchors()) {
        static_px.push_back(camera.project_unclipped(anchor.position));
    }
    const std::size_t wrist_idx = 10, hip_idx = 12; // canonical order

    for (int t = 0; t < total_frames; ++t) {
        std::vector<Keypoint> frame;
        frame.reserve(static_px.size());
        for (std::size_t j = 0; j < static_px.size(); ++j) {
            PixelPos p = static_px[j];
            if (j == wrist_idx) p = tracks.wrist[static_cast<std::size_t>(t)];
            if (j == hip_idx) p = tracks.hip[static_cast<std::size_t>(t)];
            Keypoint kp{p.x + rng.normal(0.0, subject.pixel_jitter),
                        p.y + rng.normal(0.0, subject.pixel_jitter),
                        0.6 + 0.4 * rng.uniform()};
            if (t > 0 && rng.uniform() < subject.dropout_rate) kp.confidence = kMissingConfidence;
            frame.push_back(kp);
        }
        gen.pose.frames.push_back(std::move(frame));
    }

    // ground-truth ball pixels: held at the wrist until release, ballistic and
    // frustum-clipped afterwards
    gen.ball.width = camera.width;
    gen.ball.height = camera.height;
    gen.ball.positions.assign(static_cast<std::size_t>(total_frames), std::nullopt);
    for (int t = 0; t < gen.release_frame; ++t) {
        gen.ball.positions[static_cast<std::size_t>(t)] = tracks.wrist[static_cast<std::size_t>(t)];
    }
    const auto flight = project_trajectory(gen.physics, camera, config.world.gravity,
                                           static_cast<std::size_t>(config.frames_after_release));
    for (std::size_t k = 0; k < flight.size(); ++k) {
        gen.ball.positions[static_cast<std::size_t>(gen.release_frame) + k] = flight[k];
    }

    gen.reaction = synth_reaction(gen.physics.congruence, subject.reaction_intensity, rng);

    gen.record.subject_id = subject_id;
    gen.record.view = view;
    gen.record.intent = gen.physics.intent;
    gen.record.outcome = gen.physics.outcome;
    gen.record.congruence = gen.physics.congruence;
    return gen;
}

std::vector<GeneratedThrow> generate_throws(const GeneratorConfig& config, std::uint64_t seed) {
    config.validate();
    const Rng master(seed);

    std::vector<GeneratedThrow> throws_out;
    throws_out.reserve(static_cast<std::size_t>(config.n_subjects) * config.rounds_per_subject * 9);

    for (int s = 0; s < config.n_subjects; ++s) {
        const std::string subject_id =
            "s" + std::string(s + 1 < 10 ? "0" : "") + std::to_string(s + 1);

        // per-subject skill variation around the base profile
        Rng profile_rng = master.split(subject_id + "|profile");
        SubjectProfile subject = config.subject;
        subject.release_speed_mean = std::clamp(
            subject.release_speed_mean + profile_rng.normal(0.0, config.subject_speed_spread), 7.0, 12.0);
        const double aim_scale =
            std::clamp(1.0 + profile_rng.normal(0.0, config.subject_aim_spread), 0.55, 1.6);
        subject.aim_sigma_h *= aim_scale;
        subject.aim_sigma_v *= aim_scale;
        subject.release_height = std::clamp(
            subject.release_height + profile_rng.normal(0.0, 0.08), 1.6, 2.15);

        int throw_index = 0;
        for (int round = 0; round < config.rounds_per_subject; ++round) {
            std::vector<int> intents{1, 2, 3, 4, 5, 6, 7, 8, 9};
            Rng round_rng = master.split(subject_id + "|round" + std::to_string(round));
            round_rng.shuffle(intents);

            for (int intent : intents) {
                Rng throw_rng = master.split(subject_id + "|throw" + std::to_string(throw_index));
                const View view = config.views[static_cast<std::size_t>(throw_index) % config.views.size()];
                throws_out.push_back(
                    generate_throw(config, subject, subject_id, view, Zone::cell(intent), throw_rng));
                ++throw_index;
            }
        }
    }
    return throws_out;
}

DatasetManifest generate_dataset(const GeneratorConfig& config, std::uint64_t seed,
                                 const std::filesystem::path& out_dir) {
    namespace fs = std::filesystem;
    auto throws_data = generate_throws(config, seed);

    DatasetManifest manifest;
    manifest.metadata = "seed=" + std::to_string(seed) + " config_hash=" +
                        std::to_string(Rng::fnv1a(config.canonical_json())) + " tool=throwsense/0.1.0";

    std::map<std::string, int> counters;
    for (auto& gen : throws_data) {
        const std::string& subject = gen.record.subject_id;
        const int n = counters[subject]++;
        char tag[32];
        std::snprintf(tag, sizeof(tag), "throw_%04d", n);

        const fs::path rel_dir = fs::path("features") / subject;
        fs::create_directories(out_dir / rel_dir);
        const std::string stem = (rel_dir / tag).string();

        gen.record.pose_ref = stem + "_pose.json";
        gen.record.ball_ref = stem + "_ball.json";
        gen.record.reaction_ref = stem + "_reaction.json";
        io::save_pose_sequence(gen.pose, out_dir / gen.record.pose_ref);
        io::save_ball_observations(gen.ball, out_dir / gen.record.ball_ref);
        io::save_reaction_features(gen.reaction, out_dir / gen.record.reaction_ref);
        manifest.records.push_back(gen.record);
    }
    io::save_manifest(manifest, out_dir / "manifest.json");
    return manifest;
}

// ------------------------------------------------------------- rendering

balltrack::ColorRange default_ball_range() {
    return balltrack::ColorRange{10.0, 45.0, 0.5, 1.0, 0.4, 1.0};
}

balltrack::RasterFrame render_frame(const GeneratedThrow& gen, const CameraModel& camera,
                                    std::size_t frame_index) {
    auto frame = balltrack::RasterFrame::solid(camera.width, camera.height, kBackgroundRgb[0],
                                               kBackgroundRgb[1], kBackgroundRgb[2]);
    const auto& pos = gen.ball.positions.at(frame_index);
    if (!pos.has_value()) return frame;

    // angular ball size from the release-to-camera depth (pre-release frames)
    // or the ballistic depth (after)
    const CameraBasis b = basis_of(camera);
    Vec3 world_point = gen.physics.release_point;
    if (frame_index >= static_cast<std::size_t>(gen.release_frame)) {
        const double t = static_cast<double>(frame_index - static_cast<std::size_t>(gen.release_frame)) /
                         camera.fps;
        world_point = trajectory_point(gen.physics, t, gen.gravity);
    }
    const double depth = std::max(0.5, dot(world_point - camera.position, b.forward));
    const double radius = std::max(2.5, b.fx * kBallRadiusM / depth);
    balltrack::paint_disk(frame, pos->x, pos->y, radius, kBallRgb[0], kBallRgb[1], kBallRgb[2]);
    return frame;
}

} // namespace throwsense::synth
