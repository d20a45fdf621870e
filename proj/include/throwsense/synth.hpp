#pragma once

#include <array>
#include <filesystem>
#include <optional>

#include "throwsense/balltrack.hpp"
#include "throwsense/io.hpp"
#include "throwsense/rng.hpp"
#include "throwsense/types.hpp"

namespace throwsense::synth {

using Vec3 = std::array<double, 3>;

// World frame: thrower at the origin, +x toward the target plane, +y the
// thrower's left, +z up. The grid is a contiguous 3x3 square centered on the
// x-axis at grid_center_height.
struct WorldConfig {
    double target_plane_distance = 4.0; // m
    double side_camera_distance = 2.75; // m
    double zone_edge = 0.4;             // m
    double grid_center_height = 1.5;    // m
    double gravity = 9.81;              // m/s^2

    void validate() const;

    // zone centers / classification in the target plane
    Vec3 zone_center(const Zone& zone) const;
    Zone classify_impact(double y, double z) const;
};

// Pinhole camera with a yaw/pitch basis derived from a look-at point.
struct CameraModel {
    Vec3 position{};
    Vec3 look_at{};
    double hfov_deg = 64.0;
    double vfov_deg = 41.0;
    int width = 848;
    int height = 480;
    double fps = 30.0;
    int toward_target_sign = 1; // sign of image-x motion toward the target

    static CameraModel for_view(View view, const WorldConfig& world);

    // Projection without the frustum test (callers that need off-screen
    // continuity use this).
    PixelPos project_unclipped(const Vec3& point) const;
    // Inside-frustum projection; absent when behind the camera or off screen.
    std::optional<PixelPos> project(const Vec3& point) const;
};

// Per-subject throwing characteristics. Aim noise is anisotropic: vertical
// (elevation) error exceeds horizontal (azimuth) error.
struct SubjectProfile {
    double release_height = 1.9;    // m
    double release_forward = 0.45;  // m ahead of the feet
    double release_side = -0.18;    // m, right-handed release is right of center
    double release_speed_mean = 8.5; // m/s
    double release_speed_std = 0.55; // m/s
    double aim_sigma_h = 0.036;     // rad
    double aim_sigma_v = 0.064;     // rad
    double reaction_intensity = 1.0; // [0, 1]
    double pixel_jitter = 2.0;      // px, pose noise
    double dropout_rate = 0.02;     // pose missing-joint probability

    void validate() const;
};

struct ThrowResult {
    Zone intent;
    Zone outcome;
    bool congruence = false;
    Vec3 release_point{};
    Vec3 release_velocity{};
    double flight_time = 0.0; // seconds to the target plane
    double impact_y = 0.0;
    double impact_z = 0.0;
};

// Solves the ideal release velocity to the intent-zone center at the mean
// speed (flat solution), perturbs direction and speed, and flies the ball to
// the target plane in closed form.
ThrowResult simulate_throw(const WorldConfig& world, const SubjectProfile& subject, Zone intent,
                           Rng& rng);

// Ballistic position t seconds after release.
Vec3 trajectory_point(const ThrowResult& throw_result, double t, double gravity);

// Pixel positions of the ball from the release frame on, sampled at the
// camera's fps; frames outside the frustum are absent.
std::vector<std::optional<PixelPos>> project_trajectory(const ThrowResult& throw_result,
                                                        const CameraModel& camera, double gravity,
                                                        std::size_t max_frames);

// Clean (noise-free) wrist and hip pixel tracks for one camera. The wrist
// speed profile carries the four throwing phases: a gather/windup bump, a
// cocking minimum, an acceleration peak exactly at the release frame, and a
// decaying follow-through. Around the release frame the extension channel is
// even and the whip channel odd, so the peak survives zero-phase filtering.
struct WristTracks {
    std::vector<PixelPos> wrist;
    std::vector<PixelPos> hip;
};

WristTracks synth_wrist_profile(const CameraModel& camera, const SubjectProfile& subject,
                                const Vec3& release_point, int release_frame, int total_frames);

// 30x7 reaction rows on the simplex: Dirichlet draws smoothed by an AR(1)
// process, neutral-channel dominant; incongruence shifts concentration toward
// the last two channels proportionally to intensity.
ReactionFeatures synth_reaction(bool congruent, double intensity, Rng& rng);

// ------------------------------------------------------------- generation

struct GeneratorConfig {
    WorldConfig world;
    SubjectProfile subject; // base profile; per-subject variation on top
    int n_subjects = 10;
    int rounds_per_subject = 14;
    std::vector<View> views = {View::deg0};
    double subject_speed_spread = 0.6;  // m/s, std of per-subject mean speed
    double subject_aim_spread = 0.25;   // relative std of per-subject aim noise
    int min_frames_before_release = 55;
    int max_frames_before_release = 70;
    int frames_after_release = 45;

    void validate() const;
    static GeneratorConfig from_json_file(const std::filesystem::path& path);
    void to_json_file(const std::filesystem::path& path) const;
    std::string canonical_json() const; // for config hashing
};

struct GeneratedThrow {
    ThrowRecord record; // feature refs empty until written to disk
    ThrowResult physics;
    double gravity = 9.81;
    int release_frame = 0;
    PoseSequence pose;
    io::BallObservations ball;
    ReactionFeatures reaction;
};

// One throw, fully synthesized for the record's view.
GeneratedThrow generate_throw(const GeneratorConfig& config, const SubjectProfile& subject,
                              const std::string& subject_id, View view, Zone intent, Rng& rng);

// Whole dataset in memory: per subject, rounds of 9 throws with a fresh
// random intent permutation each round.
std::vector<GeneratedThrow> generate_throws(const GeneratorConfig& config, std::uint64_t seed);

// Disk layout: <out>/manifest.json plus features/<subject>/throw_NNNN_*.json.
DatasetManifest generate_dataset(const GeneratorConfig& config, std::uint64_t seed,
                                 const std::filesystem::path& out_dir);

// ------------------------------------------------------------- rendering

// The synthetic ball color and the matching segmentation range.
balltrack::ColorRange default_ball_range();

// Renders the scene at one frame: flat background plus the ball disk at its
// ground-truth pixel position (wrist-held before release, ballistic after).
balltrack::RasterFrame render_frame(const GeneratedThrow& gen, const CameraModel& camera,
                                    std::size_t frame_index);

} // namespace throwsense::synth
