#include "mistd/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>
#include <string>

#include <nlohmann/json.hpp>

#include "mistd/errors.hpp"
#include "mistd/rng.hpp"

namespace mistd {

namespace {

using json = nlohmann::json;

constexpr std::uint64_t kTargetStream = 1;
constexpr std::uint64_t kClutterStream = 2;
constexpr std::uint64_t kNoiseStream = 3;

std::uint64_t window_seed(const SceneConfig& cfg, std::size_t window_index) {
    return cfg.seed * 0x100000001b3ULL + static_cast<std::uint64_t>(window_index);
}

} // namespace

void validate(const SceneConfig& cfg) {
    if (cfg.frames < 2) throw std::invalid_argument("synth: window needs at least 2 frames");
    if (cfg.height < 4 || cfg.width < 4)
        throw std::invalid_argument("synth: image extent must be at least 4x4");
    if (cfg.extent_min < 1.0)
        throw std::invalid_argument("synth: target extent must be >= 1 px");
    if (cfg.extent_max < cfg.extent_min)
        throw std::invalid_argument("synth: extent_max < extent_min");
    if (cfg.speed_max < cfg.speed_min || cfg.speed_min < 0.0)
        throw std::invalid_argument("synth: invalid speed range");
    if (cfg.noise_std < 0.0 || cfg.clutter_amp < 0.0 || cfg.target_peak < 0.0)
        throw std::invalid_argument("synth: negative intensity parameter");
    const double travel = cfg.speed_max * static_cast<double>(cfg.frames - 1);
    const double span = static_cast<double>(std::min(cfg.height, cfg.width) - 1);
    if (cfg.extent_max + travel > span)
        throw std::invalid_argument(
            "synth: targets would leave the frame (extent " + std::to_string(cfg.extent_max) +
            " + travel " + std::to_string(travel) + " exceeds span " + std::to_string(span) + ")");
}

FrameWindow render_window(const SceneConfig& cfg, const std::vector<TargetTrack>& tracks,
                          std::size_t window_index) {
    validate(cfg);
    const std::size_t H = cfg.height, W = cfg.width, T = cfg.frames;

    Rng clutter_rng = Rng::derive(window_seed(cfg, window_index), kClutterStream);
    Rng noise_rng = Rng::derive(window_seed(cfg, window_index), kNoiseStream);

    // Three fixed low-frequency modes with random phases, drifting rigidly.
    struct Mode {
        double fx, fy, px, py;
    };
    const double two_pi = 2.0 * std::numbers::pi;
    Mode modes[3] = {{1, 1, 0, 0}, {1, 2, 0, 0}, {2, 1, 0, 0}};
    for (Mode& m : modes) {
        m.px = clutter_rng.uniform_d(0.0, two_pi);
        m.py = clutter_rng.uniform_d(0.0, two_pi);
    }
    const double drift_angle = clutter_rng.uniform_d(0.0, two_pi);
    const double dx = cfg.clutter_drift * std::cos(drift_angle);
    const double dy = cfg.clutter_drift * std::sin(drift_angle);

    FrameWindow window;
    window.keyframe = T - 1;
    window.frames.reserve(T);
    for (std::size_t t = 0; t < T; ++t) {
        Tensor frame({H, W});
        const double td = static_cast<double>(t);
        for (std::size_t y = 0; y < H; ++y) {
            for (std::size_t x = 0; x < W; ++x) {
                double v = 0.35;
                for (const Mode& m : modes) {
                    const double ax =
                        two_pi * m.fx * (static_cast<double>(x) + dx * td) /
                            static_cast<double>(W) + m.px;
                    const double ay =
                        two_pi * m.fy * (static_cast<double>(y) + dy * td) /
                            static_cast<double>(H) + m.py;
                    v += cfg.clutter_amp / 3.0 * std::sin(ax) * std::cos(ay);
                }
                frame[y * W + x] = static_cast<float>(v);
            }
        }
        for (const TargetTrack& tr : tracks) {
            const double cx = tr.start_x + tr.vx * td;
            const double cy = tr.start_y + tr.vy * td;
            const double sigma = tr.extent / 6.0;
            const long reach = static_cast<long>(std::ceil(3.0 * sigma)) + 1;
            const long x0 = std::max(0L, static_cast<long>(std::floor(cx)) - reach);
            const long x1 = std::min(static_cast<long>(W) - 1,
                                     static_cast<long>(std::ceil(cx)) + reach);
            const long y0 = std::max(0L, static_cast<long>(std::floor(cy)) - reach);
            const long y1 = std::min(static_cast<long>(H) - 1,
                                     static_cast<long>(std::ceil(cy)) + reach);
            for (long y = y0; y <= y1; ++y) {
                for (long x = x0; x <= x1; ++x) {
                    const double rx = static_cast<double>(x) - cx;
                    const double ry = static_cast<double>(y) - cy;
                    const double g = tr.peak * std::exp(-(rx * rx + ry * ry) / (2 * sigma * sigma));
                    frame[static_cast<std::size_t>(y) * W + static_cast<std::size_t>(x)] +=
                        static_cast<float>(g);
                }
            }
        }
        if (cfg.noise_std > 0.0) {
            for (std::size_t i = 0; i < H * W; ++i)
                frame[i] += static_cast<float>(cfg.noise_std) * noise_rng.normal();
        }
        for (std::size_t i = 0; i < H * W; ++i)
            frame[i] = std::clamp(frame[i], 0.0f, 1.0f);
        window.frames.push_back(std::move(frame));
    }

    const double tk = static_cast<double>(T - 1);
    for (const TargetTrack& tr : tracks) {
        BBox gt;
        gt.cx = tr.start_x + tr.vx * tk;
        gt.cy = tr.start_y + tr.vy * tk;
        gt.w = tr.extent;
        gt.h = tr.extent;
        gt.score = 1.0;
        window.gts.push_back(gt);
    }
    return window;
}

FrameWindow generate_window(const SceneConfig& cfg, std::size_t window_index) {
    validate(cfg);
    Rng rng = Rng::derive(window_seed(cfg, window_index), kTargetStream);
    const double two_pi = 2.0 * std::numbers::pi;
    const double tk = static_cast<double>(cfg.frames - 1);

    std::vector<TargetTrack> tracks;
    for (std::size_t i = 0; i < cfg.target_count; ++i) {
        TargetTrack tr;
        tr.extent = rng.uniform_d(cfg.extent_min, cfg.extent_max);
        tr.peak = cfg.target_peak;
        const double speed = rng.uniform_d(cfg.speed_min, cfg.speed_max);
        const double angle = rng.uniform_d(0.0, two_pi);
        tr.vx = speed * std::cos(angle);
        tr.vy = speed * std::sin(angle);

        const double margin = tr.extent / 2.0;
        const double lo_x = margin - std::min(0.0, tr.vx * tk);
        const double hi_x = static_cast<double>(cfg.width - 1) - margin -
                            std::max(0.0, tr.vx * tk);
        const double lo_y = margin - std::min(0.0, tr.vy * tk);
        const double hi_y = static_cast<double>(cfg.height - 1) - margin -
                            std::max(0.0, tr.vy * tk);
        tr.start_x = rng.uniform_d(lo_x, hi_x);
        tr.start_y = rng.uniform_d(lo_y, hi_y);
        tracks.push_back(tr);
    }
    return render_window(cfg, tracks, window_index);
}

std::vector<FrameWindow> generate(const SceneConfig& cfg, std::size_t n_windows) {
    std::vector<FrameWindow> windows;
    windows.reserve(n_windows);
    for (std::size_t k = 0; k < n_windows; ++k) windows.push_back(generate_window(cfg, k));
    return windows;
}

void write_pgm(const std::filesystem::path& path, const Tensor& frame) {
    if (frame.rank() != 2) throw std::invalid_argument("write_pgm: expected rank-2 [H,W] frame");
    const std::size_t H = frame.extent(0), W = frame.extent(1);
    std::string buf = "P5\n" + std::to_string(W) + " " + std::to_string(H) + "\n255\n";
    buf.reserve(buf.size() + H * W);
    for (std::size_t i = 0; i < H * W; ++i) {
        const float v = std::clamp(frame[i], 0.0f, 1.0f);
        buf.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(v * 255.0f))));
    }
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("write_pgm: cannot open '" + tmp.string() + "'");
        f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!f) throw IoError("write_pgm: short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

namespace {

struct PgmParser {
    std::string buf;
    std::size_t pos = 0;
    std::string file;

    [[noreturn]] void fail(const std::string& what) const {
        throw IoError("read_pgm: " + what + " in '" + file + "' at byte offset " +
                      std::to_string(pos));
    }

    void skip_space() {
        while (pos < buf.size() &&
               (buf[pos] == ' ' || buf[pos] == '\t' || buf[pos] == '\n' || buf[pos] == '\r'))
            ++pos;
    }

    unsigned long number(const char* what) {
        skip_space();
        if (pos >= buf.size() || buf[pos] < '0' || buf[pos] > '9')
            fail(std::string("expected ") + what);
        unsigned long v = 0;
        while (pos < buf.size() && buf[pos] >= '0' && buf[pos] <= '9') {
            v = v * 10 + static_cast<unsigned long>(buf[pos] - '0');
            ++pos;
        }
        return v;
    }
};

} // namespace

Tensor read_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("read_pgm: cannot open '" + path.string() + "'");
    PgmParser p;
    p.file = path.string();
    p.buf.assign((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    if (p.buf.size() < 2 || p.buf[0] != 'P' || p.buf[1] != '5')
        p.fail("bad magic, expected \"P5\"");
    p.pos = 2;
    const unsigned long W = p.number("width");
    const unsigned long H = p.number("height");
    const unsigned long maxval = p.number("maxval");
    if (maxval != 255) p.fail("unsupported maxval " + std::to_string(maxval) + ", expected 255");
    if (p.pos >= p.buf.size()) p.fail("missing payload separator");
    ++p.pos; // single whitespace byte after maxval
    if (p.pos + H * W > p.buf.size()) p.fail("truncated payload, need " + std::to_string(H * W) +
                                             " bytes");

    Tensor frame({static_cast<std::size_t>(H), static_cast<std::size_t>(W)});
    for (std::size_t i = 0; i < H * W; ++i)
        frame[i] = static_cast<float>(static_cast<unsigned char>(p.buf[p.pos + i])) / 255.0f;
    return frame;
}

namespace {

json box_to_json(const BBox& b, bool with_score) {
    json j{{"cx", b.cx}, {"cy", b.cy}, {"w", b.w}, {"h", b.h}};
    if (with_score) j["score"] = b.score;
    return j;
}

void atomic_write_text(const std::filesystem::path& path, const std::string& text) {
    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("cannot open '" + tmp.string() + "' for writing");
        f << text;
        if (!f) throw IoError("short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

} // namespace

void write_sequence(const std::filesystem::path& dir, const FrameWindow& window,
                    std::size_t window_index) {
    if (window.frames.size() < 2)
        throw std::invalid_argument("write_sequence: window needs at least 2 frames");
    std::filesystem::create_directories(dir);
    const std::size_t T = window.frames.size();
    for (std::size_t i = 0; i < T; ++i)
        write_pgm(dir / ("frame_" + std::to_string(i) + ".pgm"), window.frames[i]);

    std::string lines;
    for (std::size_t i = 0; i < T; ++i) {
        json rec;
        rec["frame_id"] = window_index * T + i;
        rec["boxes"] = json::array();
        if (i == window.keyframe)
            for (const BBox& b : window.gts) rec["boxes"].push_back(box_to_json(b, false));
        lines += rec.dump();
        lines += '\n';
    }
    atomic_write_text(dir / "annotations.jsonl", lines);
}

LoadedWindow read_sequence(const std::filesystem::path& dir) {
    LoadedWindow loaded;
    for (std::size_t i = 0;; ++i) {
        const std::filesystem::path p = dir / ("frame_" + std::to_string(i) + ".pgm");
        if (!std::filesystem::exists(p)) break;
        loaded.window.frames.push_back(read_pgm(p));
    }
    if (loaded.window.frames.size() < 2)
        throw IoError("read_sequence: fewer than 2 frames in '" + dir.string() + "'");
    loaded.window.keyframe = loaded.window.frames.size() - 1;

    const std::filesystem::path ann = dir / "annotations.jsonl";
    std::ifstream f(ann);
    if (!f) throw IoError("read_sequence: cannot open '" + ann.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(f, line)) {
        ++line_no;
        if (line.empty()) continue;
        json rec;
        try {
            rec = json::parse(line);
        } catch (const json::parse_error& e) {
            throw IoError("read_sequence: bad JSON on line " + std::to_string(line_no) + " of '" +
                          ann.string() + "': " + e.what());
        }
        const std::size_t fid = rec.at("frame_id").get<std::size_t>();
        std::vector<BBox> boxes;
        for (const json& jb : rec.at("boxes")) {
            BBox b;
            b.cx = jb.at("cx").get<double>();
            b.cy = jb.at("cy").get<double>();
            b.w = jb.at("w").get<double>();
            b.h = jb.at("h").get<double>();
            b.score = jb.value("score", 1.0);
            boxes.push_back(b);
        }
        // Records are in frame order; the last one is the keyframe.
        loaded.keyframe_id = fid;
        loaded.window.gts = std::move(boxes);
    }
    return loaded;
}

} // namespace mistd
