#include "throwsense/io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace throwsense::io {

namespace {

using nlohmann::json;

json read_json(const std::filesystem::path& path, const char* expected_schema) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ParseError(path.string() + ": " + e.what());
    }
    if (!j.is_object() || j.value("schema", "") != expected_schema) {
        throw SchemaError(path.string() + ": expected schema '" + expected_schema + "'");
    }
    return j;
}

void write_json(const json& j, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out << j.dump(2) << '\n';
}

double number_or_throw(const json& v, const std::string& what) {
    if (!v.is_number()) throw SchemaError(what + " must be a number");
    return v.get<double>();
}

} // namespace

// ------------------------------------------------------------------- pose

PoseSequence load_pose_sequence(const std::filesystem::path& path) {
    const json j = read_json(path, "throwsense.pose.v1");

    PoseSequence pose;
    pose.fps = number_or_throw(j.at("fps"), "fps");
    if (!(pose.fps > 0.0)) throw SchemaError(path.string() + ": fps must be positive");
    pose.joints = j.at("joints").get<std::vector<std::string>>();
    for (const char* required : {"right_wrist", "left_wrist", "right_hip", "left_hip"}) {
        if (std::find(pose.joints.begin(), pose.joints.end(), required) == pose.joints.end()) {
            throw SchemaError(path.string() + ": joint list lacks required joint '" + required + "'");
        }
    }

    const json& frames = j.at("frames");
    if (!frames.is_array()) throw SchemaError(path.string() + ": frames must be an array");
    pose.frames.reserve(frames.size());
    for (const json& frame : frames) {
        if (!frame.is_array() || frame.size() != pose.joints.size()) {
            throw SchemaError(path.string() + ": every frame must list exactly " +
                              std::to_string(pose.joints.size()) + " joints");
        }
        std::vector<Keypoint> kps;
        kps.reserve(frame.size());
        for (const json& kp : frame) {
            if (!kp.is_array() || kp.size() != 3) {
                throw SchemaError(path.string() + ": joints are [x, y, confidence] triples");
            }
            kps.push_back({number_or_throw(kp[0], "x"), number_or_throw(kp[1], "y"),
                           number_or_throw(kp[2], "confidence")});
        }
        pose.frames.push_back(std::move(kps));
    }
    return pose;
}

void save_pose_sequence(const PoseSequence& pose, const std::filesystem::path& path) {
    json frames = json::array();
    for (const auto& frame : pose.frames) {
        json row = json::array();
        for (const Keypoint& kp : frame) row.push_back({kp.x, kp.y, kp.confidence});
        frames.push_back(std::move(row));
    }
    write_json({{"schema", "throwsense.pose.v1"},
                {"fps", pose.fps},
                {"joints", pose.joints},
                {"frames", std::move(frames)}},
               path);
}

// ------------------------------------------------------------------- ball

BallObservations load_ball_observations(const std::filesystem::path& path) {
    const json j = read_json(path, "throwsense.ball.v1");
    BallObservations obs;
    obs.width = j.at("width").get<int>();
    obs.height = j.at("height").get<int>();
    if (obs.width <= 0 || obs.height <= 0) {
        throw SchemaError(path.string() + ": frame dimensions must be positive");
    }
    for (const json& p : j.at("positions")) {
        if (p.is_null()) {
            obs.positions.emplace_back(std::nullopt);
        } else if (p.is_array() && p.size() == 2) {
            obs.positions.emplace_back(PixelPos{p[0].get<double>(), p[1].get<double>()});
        } else {
            throw SchemaError(path.string() + ": positions are [x, y] or null");
        }
    }
    return obs;
}

void save_ball_observations(const BallObservations& obs, const std::filesystem::path& path) {
    json positions = json::array();
    for (const auto& p : obs.positions) {
        if (p.has_value()) {
            positions.push_back({p->x, p->y});
        } else {
            positions.push_back(nullptr);
        }
    }
    write_json({{"schema", "throwsense.ball.v1"},
                {"width", obs.width},
                {"height", obs.height},
                {"positions", std::move(positions)}},
               path);
}

// --------------------------------------------------------------- reaction

ReactionFeatures load_reaction_features(const std::filesystem::path& path) {
    const json j = read_json(path, "throwsense.reaction.v1");
    const json& matrix = j.at("matrix");
    if (!matrix.is_array() || matrix.size() != ReactionFeatures::kRows) {
        throw SchemaError(path.string() + ": matrix must have " +
                          std::to_string(ReactionFeatures::kRows) + " rows");
    }
    ReactionFeatures f;
    for (int r = 0; r < ReactionFeatures::kRows; ++r) {
        const json& row = matrix[static_cast<std::size_t>(r)];
        if (!row.is_array() || row.size() != ReactionFeatures::kCols) {
            throw SchemaError(path.string() + ": matrix rows must have " +
                              std::to_string(ReactionFeatures::kCols) + " channels");
        }
        for (int c = 0; c < ReactionFeatures::kCols; ++c) {
            f.at(r, c) = number_or_throw(row[static_cast<std::size_t>(c)], "matrix entry");
        }
    }
    return f;
}

void save_reaction_features(const ReactionFeatures& features, const std::filesystem::path& path) {
    json matrix = json::array();
    for (int r = 0; r < ReactionFeatures::kRows; ++r) {
        json row = json::array();
        for (int c = 0; c < ReactionFeatures::kCols; ++c) row.push_back(features.at(r, c));
        matrix.push_back(std::move(row));
    }
    write_json({{"schema", "throwsense.reaction.v1"}, {"matrix", std::move(matrix)}}, path);
}

// --------------------------------------------------------------- manifest

namespace {

Zone zone_from_json(const json& v, const std::string& what, bool miss_allowed) {
    if (v.is_string() && v.get<std::string>() == "miss") {
        if (!miss_allowed) throw SchemaError(what + " must be a zone in 1..9, not a miss");
        return Zone::miss();
    }
    if (v.is_number_integer()) return Zone::cell(v.get<int>());
    throw SchemaError(what + " must be an integer zone or \"miss\"");
}

json zone_to_json(const Zone& z) {
    if (z.is_miss()) return "miss";
    return z.cell_index();
}

} // namespace

DatasetManifest load_manifest(const std::filesystem::path& path) {
    const json j = read_json(path, "throwsense.manifest.v1");
    const auto base = path.parent_path();

    DatasetManifest manifest;
    manifest.metadata = j.value("metadata", "");
    for (const json& r : j.at("records")) {
        ThrowRecord rec;
        rec.subject_id = r.at("subject_id").get<std::string>();
        if (rec.subject_id.empty()) throw SchemaError(path.string() + ": subject_id must be non-empty");
        rec.view = view_from_name(r.at("view").get<std::string>());
        rec.intent = zone_from_json(r.at("intent"), "intent", false);
        rec.outcome = zone_from_json(r.at("outcome"), "outcome", true);
        rec.congruence = r.at("congruence").get<bool>();
        if (rec.congruence != congruence_of(rec.intent, rec.outcome)) {
            throw CongruenceMismatch(path.string() + ": stored congruence flag contradicts intent/outcome");
        }
        rec.pose_ref = r.value("pose_ref", "");
        rec.ball_ref = r.value("ball_ref", "");
        rec.reaction_ref = r.value("reaction_ref", "");
        for (const std::string& ref : {rec.pose_ref, rec.ball_ref, rec.reaction_ref}) {
            if (!ref.empty() && !std::filesystem::exists(base / ref)) {
                throw DanglingRef(path.string() + ": referenced file '" + ref + "' does not exist");
            }
        }
        manifest.records.push_back(std::move(rec));
    }
    return manifest;
}

void save_manifest(const DatasetManifest& manifest, const std::filesystem::path& path) {
    json records = json::array();
    for (const ThrowRecord& rec : manifest.records) {
        records.push_back({{"subject_id", rec.subject_id},
                           {"view", view_name(rec.view)},
                           {"intent", zone_to_json(rec.intent)},
                           {"outcome", zone_to_json(rec.outcome)},
                           {"congruence", rec.congruence},
                           {"pose_ref", rec.pose_ref},
                           {"ball_ref", rec.ball_ref},
                           {"reaction_ref", rec.reaction_ref}});
    }
    write_json({{"schema", "throwsense.manifest.v1"},
                {"metadata", manifest.metadata},
                {"records", std::move(records)}},
               path);
}

// ---------------------------------------------------------------- weights

namespace {

constexpr char kWeightsMagic[4] = {'T', 'S', 'W', 'B'};

std::uint64_t fnv1a_update(std::uint64_t h, const void* data, std::size_t n) {
    const auto* bytes = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;

template <typename T>
void write_le(std::ofstream& out, std::uint64_t& hash, T value) {
    unsigned char buf[sizeof(T)];
    std::memcpy(buf, &value, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(buf, buf + sizeof(T));
    }
    out.write(reinterpret_cast<const char*>(buf), sizeof(T));
    hash = fnv1a_update(hash, buf, sizeof(T));
}

template <typename T>
T read_le(std::ifstream& in, std::uint64_t& hash, const std::filesystem::path& path) {
    unsigned char buf[sizeof(T)];
    if (!in.read(reinterpret_cast<char*>(buf), sizeof(T))) {
        throw CorruptionError(path.string() + ": truncated weights file");
    }
    hash = fnv1a_update(hash, buf, sizeof(T));
    if constexpr (std::endian::native == std::endian::big) {
        std::reverse(buf, buf + sizeof(T));
    }
    T value;
    std::memcpy(&value, buf, sizeof(T));
    return value;
}

} // namespace

void save_weights(const ModelWeights& weights, const std::filesystem::path& path) {
    for (const WeightLayer& layer : weights.layers) {
        std::uint64_t expect = 1;
        for (std::uint64_t d : layer.shape) expect *= d;
        if (expect != layer.values.size()) {
            throw ShapeMismatch("layer '" + layer.name + "' has " + std::to_string(layer.values.size()) +
                                " values but shape implies " + std::to_string(expect));
        }
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot open " + path.string() + " for writing");
    out.write(kWeightsMagic, sizeof(kWeightsMagic));

    std::uint64_t hash = kFnvOffset;
    write_le<std::uint32_t>(out, hash, weights.format_version);
    write_le<std::uint32_t>(out, hash, static_cast<std::uint32_t>(weights.layers.size()));
    for (const WeightLayer& layer : weights.layers) {
        write_le<std::uint32_t>(out, hash, static_cast<std::uint32_t>(layer.name.size()));
        out.write(layer.name.data(), static_cast<std::streamsize>(layer.name.size()));
        hash = fnv1a_update(hash, layer.name.data(), layer.name.size());
        write_le<std::uint32_t>(out, hash, static_cast<std::uint32_t>(layer.shape.size()));
        for (std::uint64_t d : layer.shape) write_le<std::uint64_t>(out, hash, d);
        for (double v : layer.values) write_le<double>(out, hash, v);
    }

    std::uint64_t ignored = 0;
    write_le<std::uint64_t>(out, ignored, hash);
    if (!out) throw ParseError("failed to write " + path.string());
}

ModelWeights load_weights(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path.string());

    char magic[4];
    if (!in.read(magic, 4) || std::memcmp(magic, kWeightsMagic, 4) != 0) {
        throw CorruptionError(path.string() + ": bad magic");
    }

    std::uint64_t hash = kFnvOffset;
    ModelWeights weights;
    weights.format_version = read_le<std::uint32_t>(in, hash, path);
    if (weights.format_version != ModelWeights::kCurrentVersion) {
        throw VersionError(path.string() + ": unsupported weights format version " +
                           std::to_string(weights.format_version));
    }

    const auto layer_count = read_le<std::uint32_t>(in, hash, path);
    for (std::uint32_t i = 0; i < layer_count; ++i) {
        WeightLayer layer;
        const auto name_len = read_le<std::uint32_t>(in, hash, path);
        layer.name.resize(name_len);
        if (!in.read(layer.name.data(), name_len)) {
            throw CorruptionError(path.string() + ": truncated weights file");
        }
        hash = fnv1a_update(hash, layer.name.data(), layer.name.size());

        const auto ndim = read_le<std::uint32_t>(in, hash, path);
        std::uint64_t count = 1;
        for (std::uint32_t d = 0; d < ndim; ++d) {
            layer.shape.push_back(read_le<std::uint64_t>(in, hash, path));
            count *= layer.shape.back();
        }
        layer.values.reserve(count);
        for (std::uint64_t v = 0; v < count; ++v) {
            layer.values.push_back(read_le<double>(in, hash, path));
        }
        weights.layers.push_back(std::move(layer));
    }

    std::uint64_t ignored = kFnvOffset;
    const auto stored_hash = read_le<std::uint64_t>(in, ignored, path);
    if (stored_hash != hash) throw CorruptionError(path.string() + ": checksum mismatch");
    if (in.peek() != std::ifstream::traits_type::eof()) {
        throw CorruptionError(path.string() + ": trailing bytes after checksum");
    }
    return weights;
}

// ----------------------------------------------------------------- rasters

std::vector<balltrack::RasterFrame> load_raster_frames(const std::filesystem::path& path) {
    const json j = read_json(path, "throwsense.frames.v1");
    std::vector<balltrack::RasterFrame> frames;
    for (const json& f : j.at("frames")) {
        balltrack::RasterFrame frame;
        frame.width = f.at("width").get<int>();
        frame.height = f.at("height").get<int>();
        if (f.value("encoding", "rgb8") != "rgb8") {
            throw SchemaError(path.string() + ": only rgb8 frames are supported");
        }
        const json& pixels = f.at("pixels");
        const std::size_t expect = static_cast<std::size_t>(frame.width) * frame.height * 3;
        if (pixels.size() != expect) {
            throw SchemaError(path.string() + ": frame pixel count does not match its dimensions");
        }
        frame.rgb.reserve(expect);
        for (const json& v : pixels) {
            const int b = v.get<int>();
            if (b < 0 || b > 255) throw SchemaError(path.string() + ": pixel bytes must be 0..255");
            frame.rgb.push_back(static_cast<std::uint8_t>(b));
        }
        frames.push_back(std::move(frame));
    }
    return frames;
}

void save_raster_frames(const std::vector<balltrack::RasterFrame>& frames,
                        const std::filesystem::path& path) {
    json out_frames = json::array();
    for (const auto& frame : frames) {
        json pixels = json::array();
        for (std::uint8_t b : frame.rgb) pixels.push_back(static_cast<int>(b));
        out_frames.push_back({{"width", frame.width},
                              {"height", frame.height},
                              {"encoding", "rgb8"},
                              {"pixels", std::move(pixels)}});
    }
    write_json({{"schema", "throwsense.frames.v1"}, {"frames", std::move(out_frames)}}, path);
}

balltrack::ColorRange load_color_range(const std::filesystem::path& path) {
    const json j = read_json(path, "throwsense.color.v1");
    balltrack::ColorRange r;
    r.h_min = j.value("h_min", 0.0);
    r.h_max = j.value("h_max", 360.0);
    r.s_min = j.value("s_min", 0.0);
    r.s_max = j.value("s_max", 1.0);
    r.v_min = j.value("v_min", 0.0);
    r.v_max = j.value("v_max", 1.0);
    r.validate();
    return r;
}

void save_color_range(const balltrack::ColorRange& range, const std::filesystem::path& path) {
    write_json({{"schema", "throwsense.color.v1"},
                {"h_min", range.h_min},
                {"h_max", range.h_max},
                {"s_min", range.s_min},
                {"s_max", range.s_max},
                {"v_min", range.v_min},
                {"v_max", range.v_max}},
               path);
}

} // namespace throwsense::io
