#pragma once

#include <cstddef>
#include <vector>

namespace mistd {

// Dense row-major float32 tensor. Canonical layouts are [C,H,W] for feature
// maps and [T,C,H,W] for frame feature stacks; rank is otherwise free.
class Tensor {
public:
    Tensor() = default;
    explicit Tensor(std::vector<std::size_t> shape);
    Tensor(std::vector<std::size_t> shape, std::vector<float> data);

    static Tensor full(std::vector<std::size_t> shape, float value);

    const std::vector<std::size_t>& shape() const { return shape_; }
    std::size_t rank() const { return shape_.size(); }
    std::size_t size() const { return data_.size(); }
    std::size_t extent(std::size_t axis) const;

    float* data() { return data_.data(); }
    const float* data() const { return data_.data(); }
    float operator[](std::size_t i) const { return data_[i]; }
    float& operator[](std::size_t i) { return data_[i]; }

    // [C,H,W] / [T,C,H,W] element access, no bounds checks.
    float at(std::size_t c, std::size_t h, std::size_t w) const {
        return data_[(c * shape_[1] + h) * shape_[2] + w];
    }
    float& at(std::size_t c, std::size_t h, std::size_t w) {
        return data_[(c * shape_[1] + h) * shape_[2] + w];
    }
    float at(std::size_t t, std::size_t c, std::size_t h, std::size_t w) const {
        return data_[((t * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }
    float& at(std::size_t t, std::size_t c, std::size_t h, std::size_t w) {
        return data_[((t * shape_[1] + c) * shape_[2] + h) * shape_[3] + w];
    }

    // Same data, new shape; element counts must match.
    Tensor reshaped(std::vector<std::size_t> shape) const;

    bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }
    bool all_finite() const;

private:
    std::vector<std::size_t> shape_;
    std::vector<float> data_;
};

// groups == in_channels selects depth-wise; kernel 1 with groups 1 point-wise.
struct ConvSpec {
    std::size_t in_channels = 0;
    std::size_t out_channels = 0;
    std::size_t kernel = 3;
    std::size_t stride = 1;
    std::size_t padding = 0;
    std::size_t groups = 1;
    bool has_bias = true;
};

enum class PoolMode { Max, Avg };

// Cross-correlation (no kernel flip), zero padding, float32 accumulation in
// fixed kh->kw->ic order. Weight layout [OC, IC/G, k, k].
Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const ConvSpec& spec);

Tensor pool2d(const Tensor& x, PoolMode mode, std::size_t kernel, std::size_t stride);

// [C,H,W] -> [2,H,W]: plane 0 per-pixel channel mean, plane 1 channel max.
Tensor channel_pool(const Tensor& x);

Tensor relu(const Tensor& x);
Tensor silu(const Tensor& x);
Tensor sigmoid(const Tensor& x);
Tensor prelu(const Tensor& x, float slope);

// Numerically stable; normalizer accumulated in double so rows sum to 1
// within 1e-6 even for long rows.
Tensor softmax(const Tensor& x, std::size_t axis);

// Inference-form normalization with stored per-channel statistics.
Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta,
                  const Tensor& mean, const Tensor& var, float eps = 1e-5f);

Tensor upsample_nearest(const Tensor& x, std::size_t factor);
Tensor concat(const std::vector<Tensor>& xs, std::size_t axis);
Tensor matmul(const Tensor& a, const Tensor& b);

// Elementwise arithmetic on identical shapes.
Tensor add(const Tensor& a, const Tensor& b);
Tensor sub(const Tensor& a, const Tensor& b);
Tensor mul(const Tensor& a, const Tensor& b);
Tensor scale(const Tensor& a, float s);

// x:[C,H,W] * m:[1,H,W], the single-channel map broadcast over channels.
Tensor mul_channel_broadcast(const Tensor& x, const Tensor& m);

// Copy of slice i along axis 0 (e.g. frame t of a [T,C,H,W] stack).
Tensor slice0(const Tensor& x, std::size_t i);

} // namespace mistd
