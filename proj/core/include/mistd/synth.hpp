#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "mistd/detect.hpp"
#include "mistd/tensor.hpp"

namespace mistd {

// T consecutive grayscale frames in [0,1]; the keyframe is the last frame
// and carries the ground-truth boxes.
struct FrameWindow {
    std::vector<Tensor> frames; // each [H,W]
    std::size_t keyframe = 0;   // index within the window (T-1)
    std::vector<BBox> gts;      // keyframe annotations
};

struct SceneConfig {
    std::size_t height = 64;
    std::size_t width = 64;
    std::size_t frames = 5; // window length T
    std::size_t target_count = 1;
    double extent_min = 3.0; // 3-sigma box side, pixels
    double extent_max = 9.0;
    double target_peak = 0.6;
    double noise_std = 0.05;
    double clutter_amp = 0.1;
    double clutter_drift = 0.5;  // px/frame
    double speed_min = 0.0;      // px/frame
    double speed_max = 2.0;
    std::uint64_t seed = 0;
};

// Target state sampled per window: linear trajectory, Gaussian intensity
// blob with sigma = extent/6 (the 3-sigma box side equals extent).
struct TargetTrack {
    double start_x = 0.0;
    double start_y = 0.0;
    double vx = 0.0;
    double vy = 0.0;
    double extent = 6.0;
    double peak = 0.6;
};

void validate(const SceneConfig& cfg);

// Deterministic rendering of explicit tracks; the public generator samples
// tracks and delegates here.
FrameWindow render_window(const SceneConfig& cfg, const std::vector<TargetTrack>& tracks,
                          std::size_t window_index);

// Pure function of (cfg, window index).
FrameWindow generate_window(const SceneConfig& cfg, std::size_t window_index);
std::vector<FrameWindow> generate(const SceneConfig& cfg, std::size_t n_windows);

// Directory layout: <dir>/frame_<i>.pgm (binary P5, maxval 255) plus
// annotations.jsonl with one record per frame, frame ids global:
// window_index * T + i. Only the keyframe record carries boxes.
void write_sequence(const std::filesystem::path& dir, const FrameWindow& window,
                    std::size_t window_index);

struct LoadedWindow {
    FrameWindow window;
    std::size_t keyframe_id = 0; // global frame id of the keyframe
};

LoadedWindow read_sequence(const std::filesystem::path& dir);

// PGM P5 round trip for one [H,W] frame in [0,1].
void write_pgm(const std::filesystem::path& path, const Tensor& frame);
Tensor read_pgm(const std::filesystem::path& path);

} // namespace mistd
