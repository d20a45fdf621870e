#include "throwsense/types.hpp"

#include <algorithm>

namespace throwsense {

std::string view_name(View v) {
    switch (v) {
        case View::deg0: return "deg0";
        case View::deg45: return "deg45";
        case View::deg90: return "deg90";
    }
    throw SchemaError("invalid view enum value");
}

View view_from_name(const std::string& name) {
    if (name == "deg0") return View::deg0;
    if (name == "deg45") return View::deg45;
    if (name == "deg90") return View::deg90;
    throw SchemaError("unknown view '" + name + "' (expected deg0, deg45, or deg90)");
}

std::size_t PoseSequence::joint_index(const std::string& name) const {
    auto it = std::find(joints.begin(), joints.end(), name);
    if (it == joints.end()) throw MissingJoint("pose sequence has no joint named '" + name + "'");
    return static_cast<std::size_t>(it - joints.begin());
}

const std::vector<std::string>& pose_joint_names() {
    // Halpe 26-keypoint layout used by the pose files.
    static const std::vector<std::string> names = {
        "nose",          "left_eye",       "right_eye",     "left_ear",
        "right_ear",     "left_shoulder",  "right_shoulder", "left_elbow",
        "right_elbow",   "left_wrist",     "right_wrist",   "left_hip",
        "right_hip",     "left_knee",      "right_knee",    "left_ankle",
        "right_ankle",   "head",           "neck",          "mid_hip",
        "left_big_toe",  "right_big_toe",  "left_small_toe", "right_small_toe",
        "left_heel",     "right_heel",
    };
    return names;
}

bool ModelWeights::operator==(const ModelWeights& o) const {
    if (format_version != o.format_version || layers.size() != o.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].name != o.layers[i].name) return false;
        if (layers[i].shape != o.layers[i].shape) return false;
        if (layers[i].values != o.layers[i].values) return false;
    }
    return true;
}

} // namespace throwsense
