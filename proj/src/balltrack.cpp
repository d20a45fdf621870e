#include "throwsense/balltrack.hpp"

#include <algorithm>
#include <cmath>
#include <deque>

namespace throwsense::balltrack {

RasterFrame RasterFrame::solid(int width, int height, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RasterFrame f;
    f.width = width;
    f.height = height;
    f.rgb.resize(static_cast<std::size_t>(width) * height * 3);
    for (std::size_t i = 0; i < f.rgb.size(); i += 3) {
        f.rgb[i] = r;
        f.rgb[i + 1] = g;
        f.rgb[i + 2] = b;
    }
    return f;
}

void RasterFrame::set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    if (x < 0 || y < 0 || x >= width || y >= height) return;
    const std::size_t i = (static_cast<std::size_t>(y) * width + x) * 3;
    rgb[i] = r;
    rgb[i + 1] = g;
    rgb[i + 2] = b;
}

void paint_disk(RasterFrame& frame, double cx, double cy, double radius, std::uint8_t r,
                std::uint8_t g, std::uint8_t b) {
    const int x0 = static_cast<int>(std::floor(cx - radius)) - 1;
    const int x1 = static_cast<int>(std::ceil(cx + radius)) + 1;
    const int y0 = static_cast<int>(std::floor(cy - radius)) - 1;
    const int y1 = static_cast<int>(std::ceil(cy + radius)) + 1;
    const double r2 = radius * radius;
    for (int y = y0; y <= y1; ++y) {
        for (int x = x0; x <= x1; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= r2) frame.set_pixel(x, y, r, g, b);
        }
    }
}

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double max_v = std::max({r, g, b});
    const double min_v = std::min({r, g, b});
    const double delta = max_v - min_v;

    Hsv out;
    out.v = max_v;
    out.s = max_v > 0.0 ? delta / max_v : 0.0;
    if (delta > 0.0) {
        if (max_v == r) {
            out.h = 60.0 * std::fmod((g - b) / delta + 6.0, 6.0);
        } else if (max_v == g) {
            out.h = 60.0 * ((b - r) / delta + 2.0);
        } else {
            out.h = 60.0 * ((r - g) / delta + 4.0);
        }
    }
    return out;
}

bool ColorRange::contains(const Hsv& c) const {
    if (c.s < s_min || c.s > s_max || c.v < v_min || c.v > v_max) return false;
    if (h_min <= h_max) return c.h >= h_min && c.h <= h_max;
    return c.h >= h_min || c.h <= h_max; // hue wraps across 360
}

void ColorRange::validate() const {
    if (s_min > s_max || v_min > v_max) {
        throw SchemaError("color range: saturation/value minima must not exceed maxima");
    }
}

namespace {

// Binary mask over a sub-rectangle of the frame, zero-padded at its borders.
struct Mask {
    int x0 = 0, y0 = 0, w = 0, h = 0;
    std::vector<std::uint8_t> bits;

    std::uint8_t get(int x, int y) const {
        if (x < 0 || y < 0 || x >= w || y >= h) return 0;
        return bits[static_cast<std::size_t>(y) * w + x];
    }
};

Mask threshold(const RasterFrame& frame, const ColorRange& range) {
    // find the in-range bounding box first so morphology can stay local
    int min_x = frame.width, min_y = frame.height, max_x = -1, max_y = -1;
    std::vector<std::uint8_t> full(static_cast<std::size_t>(frame.width) * frame.height, 0);
    for (int y = 0; y < frame.height; ++y) {
        for (int x = 0; x < frame.width; ++x) {
            const std::size_t i = (static_cast<std::size_t>(y) * frame.width + x) * 3;
            if (range.contains(rgb_to_hsv(frame.rgb[i], frame.rgb[i + 1], frame.rgb[i + 2]))) {
                full[static_cast<std::size_t>(y) * frame.width + x] = 1;
                min_x = std::min(min_x, x);
                min_y = std::min(min_y, y);
                max_x = std::max(max_x, x);
                max_y = std::max(max_y, y);
            }
        }
    }

    Mask m;
    if (max_x < 0) return m; // nothing in range
    // margin 2: one pixel the dilation can grow into plus one zero border
    m.x0 = std::max(0, min_x - 2);
    m.y0 = std::max(0, min_y - 2);
    m.w = std::min(frame.width - 1, max_x + 2) - m.x0 + 1;
    m.h = std::min(frame.height - 1, max_y + 2) - m.y0 + 1;
    m.bits.resize(static_cast<std::size_t>(m.w) * m.h, 0);
    for (int y = 0; y < m.h; ++y) {
        for (int x = 0; x < m.w; ++x) {
            m.bits[static_cast<std::size_t>(y) * m.w + x] =
                full[static_cast<std::size_t>(y + m.y0) * frame.width + (x + m.x0)];
        }
    }
    return m;
}

// 3x3 square structuring element, zero padding outside the mask rectangle.
Mask morph(const Mask& in, bool dilate) {
    Mask out = in;
    for (int y = 0; y < in.h; ++y) {
        for (int x = 0; x < in.w; ++x) {
            std::uint8_t acc = dilate ? 0 : 1;
            for (int dy = -1; dy <= 1 && (dilate ? !acc : acc); ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const std::uint8_t v = in.get(x + dx, y + dy);
                    if (dilate && v) {
                        acc = 1;
                        break;
                    }
                    if (!dilate && !v) {
                        acc = 0;
                        break;
                    }
                }
            }
            out.bits[static_cast<std::size_t>(y) * in.w + x] = acc;
        }
    }
    return out;
}

struct Component {
    int area = 0;
    int min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

std::vector<Component> connected_components(const Mask& m) {
    std::vector<Component> comps;
    std::vector<std::uint8_t> seen(m.bits.size(), 0);
    for (int y = 0; y < m.h; ++y) {
        for (int x = 0; x < m.w; ++x) {
            const std::size_t idx = static_cast<std::size_t>(y) * m.w + x;
            if (!m.bits[idx] || seen[idx]) continue;

            Component c{0, x, y, x, y};
            std::deque<std::pair<int, int>> queue{{x, y}};
            seen[idx] = 1;
            while (!queue.empty()) {
                const auto [px, py] = queue.front();
                queue.pop_front();
                ++c.area;
                c.min_x = std::min(c.min_x, px);
                c.min_y = std::min(c.min_y, py);
                c.max_x = std::max(c.max_x, px);
                c.max_y = std::max(c.max_y, py);
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = px + dx, ny = py + dy;
                        if (nx < 0 || ny < 0 || nx >= m.w || ny >= m.h) continue;
                        const std::size_t nidx = static_cast<std::size_t>(ny) * m.w + nx;
                        if (m.bits[nidx] && !seen[nidx]) {
                            seen[nidx] = 1;
                            queue.emplace_back(nx, ny);
                        }
                    }
                }
            }
            comps.push_back(c);
        }
    }
    return comps;
}

} // namespace

std::optional<PixelPos> segment_ball(const RasterFrame& frame, const ColorRange& range,
                                     const SegmentConfig& config) {
    range.validate();
    Mask mask = threshold(frame, range);
    if (mask.bits.empty()) return std::nullopt;

    mask = morph(morph(mask, true), false); // closing: dilate, then erode

    const auto comps = connected_components(mask);
    const Component* best = nullptr;
    for (const Component& c : comps) {
        if (!best || c.area > best->area) best = &c; // first wins ties: scan order
    }
    if (!best || best->area < config.min_pixels) return std::nullopt;

    return PixelPos{mask.x0 + (best->min_x + best->max_x) / 2.0,
                    mask.y0 + (best->min_y + best->max_y) / 2.0};
}

BallTrack assemble_ball_track(std::span<const std::optional<PixelPos>> detections,
                              std::span<const PixelPos> wrist_track, int n_tf) {
    const std::size_t needed = static_cast<std::size_t>(n_tf) + 6; // frames 0..n_tf+5
    if (n_tf < 10 || detections.size() < needed || wrist_track.size() < needed) {
        throw InsufficientFrames("ball track needs frames 0.." + std::to_string(n_tf + 5) +
                                 " and a throw frame of at least 10");
    }
    const std::size_t total = std::min(detections.size(), wrist_track.size());
    const std::size_t win_lo = static_cast<std::size_t>(n_tf - 10);
    const std::size_t win_hi = static_cast<std::size_t>(n_tf + 5);

    BallTrack track;
    track.throw_frame = n_tf;
    track.positions.assign(total, std::nullopt);

    for (std::size_t i = 0; i < win_lo; ++i) track.positions[i] = wrist_track[i];

    std::vector<std::size_t> hits;
    for (std::size_t i = win_lo; i <= win_hi; ++i) {
        if (detections[i].has_value()) {
            track.positions[i] = detections[i];
            hits.push_back(i);
        }
    }

    if (hits.empty()) {
        // nothing segmented anywhere in the window: hold the wrist position
        // where the window starts and flag the track
        track.degenerate = true;
        for (std::size_t i = win_lo; i <= win_hi; ++i) track.positions[i] = wrist_track[win_lo];
        return track;
    }

    for (std::size_t i = win_lo; i <= win_hi; ++i) {
        if (track.positions[i].has_value()) continue;
        const auto next = std::lower_bound(hits.begin(), hits.end(), i);
        if (next == hits.begin()) {
            track.positions[i] = *track.positions[hits.front()]; // leading gap: hold first hit
        } else if (next == hits.end()) {
            track.positions[i] = *track.positions[hits.back()]; // trailing gap: hold last hit
        } else {
            const std::size_t hi = *next;
            const std::size_t lo = *(next - 1);
            const double t = static_cast<double>(i - lo) / static_cast<double>(hi - lo);
            const PixelPos a = *track.positions[lo];
            const PixelPos b = *track.positions[hi];
            track.positions[i] = PixelPos{a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)};
        }
    }
    return track;
}

BallTrack extract_ball_track(const FrameProvider& frames, std::size_t frame_count,
                             std::span<const PixelPos> wrist_track, int n_tf,
                             const ColorRange& range, const SegmentConfig& config) {
    if (n_tf < 10 || frame_count < static_cast<std::size_t>(n_tf) + 6) {
        throw InsufficientFrames("need frames 0.." + std::to_string(n_tf + 5) + " to track the ball");
    }
    std::vector<std::optional<PixelPos>> detections(frame_count, std::nullopt);
    for (std::size_t i = static_cast<std::size_t>(n_tf - 10); i <= static_cast<std::size_t>(n_tf + 5); ++i) {
        detections[i] = segment_ball(frames(i), range, config);
    }
    return assemble_ball_track(detections, wrist_track, n_tf);
}

OutcomeFeatures outcome_feature_vector(const BallTrack& track, int frame_width, int frame_height) {
    const int lo = track.throw_frame - 5;
    const int hi = track.throw_frame + 5;
    if (lo < 0 || static_cast<std::size_t>(hi) >= track.positions.size()) {
        throw WindowOutOfRange("ball track does not cover frames " + std::to_string(lo) + ".." +
                               std::to_string(hi));
    }
    OutcomeFeatures f;
    for (int i = lo; i <= hi; ++i) {
        const auto& p = track.positions[static_cast<std::size_t>(i)];
        if (!p.has_value()) {
            throw WindowOutOfRange("ball position absent at frame " + std::to_string(i));
        }
        f.at(i - lo, 0) = p->x / frame_width;
        f.at(i - lo, 1) = p->y / frame_height;
    }
    return f;
}

} // namespace throwsense::balltrack
