#include "mistd/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mistd {

namespace {

std::size_t shape_product(const std::vector<std::size_t>& shape) {
    std::size_t n = 1;
    for (std::size_t e : shape) n *= e;
    return n;
}

[[noreturn]] void fail(const std::string& msg) { throw std::invalid_argument(msg); }

void require_rank3(const Tensor& x, const char* op) {
    if (x.rank() != 3)
        fail(std::string(op) + ": expected rank-3 [C,H,W] input, got rank " +
             std::to_string(x.rank()));
}

} // namespace

Tensor::Tensor(std::vector<std::size_t> shape)
    : shape_(std::move(shape)), data_(shape_product(shape_), 0.0f) {}

Tensor::Tensor(std::vector<std::size_t> shape, std::vector<float> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
    if (shape_product(shape_) != data_.size())
        fail("Tensor: shape product " + std::to_string(shape_product(shape_)) +
             " != data length " + std::to_string(data_.size()));
}

Tensor Tensor::full(std::vector<std::size_t> shape, float value) {
    Tensor t(std::move(shape));
    std::fill(t.data_.begin(), t.data_.end(), value);
    return t;
}

std::size_t Tensor::extent(std::size_t axis) const {
    if (axis >= shape_.size())
        fail("Tensor::extent: axis " + std::to_string(axis) + " out of range for rank " +
             std::to_string(shape_.size()));
    return shape_[axis];
}

Tensor Tensor::reshaped(std::vector<std::size_t> shape) const {
    if (shape_product(shape) != data_.size())
        fail("Tensor::reshaped: new shape product " + std::to_string(shape_product(shape)) +
             " != element count " + std::to_string(data_.size()));
    Tensor t;
    t.shape_ = std::move(shape);
    t.data_ = data_;
    return t;
}

bool Tensor::all_finite() const {
    for (float v : data_)
        if (!std::isfinite(v)) return false;
    return true;
}

Tensor conv2d(const Tensor& x, const Tensor& w, const Tensor* bias, const ConvSpec& spec) {
    require_rank3(x, "conv2d");
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
    if (C != spec.in_channels)
        fail("conv2d: input channels " + std::to_string(C) + " != spec.in_channels " +
             std::to_string(spec.in_channels));
    if (spec.groups == 0 || spec.in_channels % spec.groups != 0)
        fail("conv2d: in_channels " + std::to_string(spec.in_channels) +
             " not divisible by groups " + std::to_string(spec.groups));
    if (spec.out_channels % spec.groups != 0)
        fail("conv2d: out_channels " + std::to_string(spec.out_channels) +
             " not divisible by groups " + std::to_string(spec.groups));
    if (spec.stride < 1) fail("conv2d: stride must be >= 1");
    const std::size_t icg = spec.in_channels / spec.groups;
    const std::size_t ocg = spec.out_channels / spec.groups;
    const std::vector<std::size_t> want{spec.out_channels, icg, spec.kernel, spec.kernel};
    if (w.shape() != want)
        fail("conv2d: weight shape mismatch, expected [" + std::to_string(want[0]) + "," +
             std::to_string(want[1]) + "," + std::to_string(want[2]) + "," +
             std::to_string(want[3]) + "]");
    if (spec.has_bias) {
        if (bias == nullptr) fail("conv2d: spec.has_bias set but no bias tensor given");
        if (bias->rank() != 1 || bias->extent(0) != spec.out_channels)
            fail("conv2d: bias length != out_channels " + std::to_string(spec.out_channels));
    }
    const long Hl = static_cast<long>(H), Wl = static_cast<long>(W);
    const long k = static_cast<long>(spec.kernel), p = static_cast<long>(spec.padding);
    const long s = static_cast<long>(spec.stride);
    const long Ho = (Hl + 2 * p - k) / s + 1;
    const long Wo = (Wl + 2 * p - k) / s + 1;
    if (Ho < 1 || Wo < 1)
        fail("conv2d: kernel " + std::to_string(spec.kernel) + " with padding " +
             std::to_string(spec.padding) + " exceeds input extent " + std::to_string(H) + "x" +
             std::to_string(W));

    Tensor out({spec.out_channels, static_cast<std::size_t>(Ho), static_cast<std::size_t>(Wo)});
    const float* xd = x.data();
    const float* wd = w.data();
    for (std::size_t g = 0; g < spec.groups; ++g) {
        for (std::size_t oc = g * ocg; oc < (g + 1) * ocg; ++oc) {
            const float b = spec.has_bias ? (*bias)[oc] : 0.0f;
            for (long oh = 0; oh < Ho; ++oh) {
                for (long ow = 0; ow < Wo; ++ow) {
                    float acc = 0.0f;
                    for (long kh = 0; kh < k; ++kh) {
                        const long ih = oh * s + kh - p;
                        if (ih < 0 || ih >= Hl) continue;
                        for (long kw = 0; kw < k; ++kw) {
                            const long iw = ow * s + kw - p;
                            if (iw < 0 || iw >= Wl) continue;
                            for (std::size_t ic = 0; ic < icg; ++ic) {
                                const std::size_t xi =
                                    ((g * icg + ic) * H + static_cast<std::size_t>(ih)) * W +
                                    static_cast<std::size_t>(iw);
                                const std::size_t wi =
                                    ((oc * icg + ic) * spec.kernel + static_cast<std::size_t>(kh)) *
                                        spec.kernel +
                                    static_cast<std::size_t>(kw);
                                acc += xd[xi] * wd[wi];
                            }
                        }
                    }
                    out.at(oc, static_cast<std::size_t>(oh), static_cast<std::size_t>(ow)) =
                        acc + b;
                }
            }
        }
    }
    return out;
}

Tensor pool2d(const Tensor& x, PoolMode mode, std::size_t kernel, std::size_t stride) {
    require_rank3(x, "pool2d");
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
    if (kernel == 0 || stride == 0) fail("pool2d: kernel and stride must be >= 1");
    if (kernel > H || kernel > W)
        fail("pool2d: kernel " + std::to_string(kernel) + " larger than input " +
             std::to_string(H) + "x" + std::to_string(W));
    const std::size_t Ho = (H - kernel) / stride + 1;
    const std::size_t Wo = (W - kernel) / stride + 1;
    Tensor out({C, Ho, Wo});
    const float inv = 1.0f / static_cast<float>(kernel * kernel);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t oh = 0; oh < Ho; ++oh) {
            for (std::size_t ow = 0; ow < Wo; ++ow) {
                if (mode == PoolMode::Max) {
                    float m = -std::numeric_limits<float>::infinity();
                    for (std::size_t kh = 0; kh < kernel; ++kh)
                        for (std::size_t kw = 0; kw < kernel; ++kw)
                            m = std::max(m, x.at(c, oh * stride + kh, ow * stride + kw));
                    out.at(c, oh, ow) = m;
                } else {
                    float sum = 0.0f;
                    for (std::size_t kh = 0; kh < kernel; ++kh)
                        for (std::size_t kw = 0; kw < kernel; ++kw)
                            sum += x.at(c, oh * stride + kh, ow * stride + kw);
                    out.at(c, oh, ow) = sum * inv;
                }
            }
        }
    }
    return out;
}

Tensor channel_pool(const Tensor& x) {
    require_rank3(x, "channel_pool");
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
    if (C < 1) fail("channel_pool: need at least one channel");
    Tensor out({2, H, W});
    const float inv = 1.0f / static_cast<float>(C);
    for (std::size_t h = 0; h < H; ++h) {
        for (std::size_t w = 0; w < W; ++w) {
            float sum = 0.0f;
            float mx = -std::numeric_limits<float>::infinity();
            for (std::size_t c = 0; c < C; ++c) {
                const float v = x.at(c, h, w);
                sum += v;
                mx = std::max(mx, v);
            }
            out.at(std::size_t(0), h, w) = sum * inv;
            out.at(std::size_t(1), h, w) = mx;
        }
    }
    return out;
}

namespace {

template <typename F>
Tensor map_elementwise(const Tensor& x, F f) {
    Tensor out(x.shape());
    for (std::size_t i = 0; i < x.size(); ++i) out[i] = f(x[i]);
    return out;
}

} // namespace

Tensor relu(const Tensor& x) {
    return map_elementwise(x, [](float v) { return v > 0.0f ? v : 0.0f; });
}

Tensor silu(const Tensor& x) {
    return map_elementwise(x, [](float v) { return v / (1.0f + std::exp(-v)); });
}

Tensor sigmoid(const Tensor& x) {
    return map_elementwise(x, [](float v) { return 1.0f / (1.0f + std::exp(-v)); });
}

Tensor prelu(const Tensor& x, float slope) {
    return map_elementwise(x, [slope](float v) { return v >= 0.0f ? v : slope * v; });
}

Tensor softmax(const Tensor& x, std::size_t axis) {
    if (axis >= x.rank())
        fail("softmax: axis " + std::to_string(axis) + " out of range for rank " +
             std::to_string(x.rank()));
    const auto& shape = x.shape();
    const std::size_t n = shape[axis];
    std::size_t inner = 1, outer = 1;
    for (std::size_t i = axis + 1; i < shape.size(); ++i) inner *= shape[i];
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];

    Tensor out(shape);
    for (std::size_t o = 0; o < outer; ++o) {
        for (std::size_t in = 0; in < inner; ++in) {
            const std::size_t base = o * n * inner + in;
            float mx = -std::numeric_limits<float>::infinity();
            for (std::size_t i = 0; i < n; ++i) mx = std::max(mx, x[base + i * inner]);
            double denom = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                denom += std::exp(static_cast<double>(x[base + i * inner]) - mx);
            for (std::size_t i = 0; i < n; ++i)
                out[base + i * inner] = static_cast<float>(
                    std::exp(static_cast<double>(x[base + i * inner]) - mx) / denom);
        }
    }
    return out;
}

Tensor batch_norm(const Tensor& x, const Tensor& gamma, const Tensor& beta, const Tensor& mean,
                  const Tensor& var, float eps) {
    require_rank3(x, "batch_norm");
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
    for (const auto* p : {&gamma, &beta, &mean, &var}) {
        if (p->rank() != 1 || p->extent(0) != C)
            fail("batch_norm: parameter length != channel count " + std::to_string(C));
    }
    Tensor out(x.shape());
    for (std::size_t c = 0; c < C; ++c) {
        if (var[c] < 0.0f) fail("batch_norm: negative variance at channel " + std::to_string(c));
        const float inv = 1.0f / std::sqrt(var[c] + eps);
        for (std::size_t h = 0; h < H; ++h)
            for (std::size_t w = 0; w < W; ++w)
                out.at(c, h, w) = (x.at(c, h, w) - mean[c]) * inv * gamma[c] + beta[c];
    }
    return out;
}

Tensor upsample_nearest(const Tensor& x, std::size_t factor) {
    require_rank3(x, "upsample_nearest");
    if (factor == 0) fail("upsample_nearest: factor must be >= 1");
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
    Tensor out({C, H * factor, W * factor});
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t h = 0; h < H * factor; ++h)
            for (std::size_t w = 0; w < W * factor; ++w)
                out.at(c, h, w) = x.at(c, h / factor, w / factor);
    return out;
}

Tensor concat(const std::vector<Tensor>& xs, std::size_t axis) {
    if (xs.empty()) fail("concat: empty input list");
    const std::size_t rank = xs[0].rank();
    if (axis >= rank) fail("concat: axis " + std::to_string(axis) + " out of range");
    std::size_t total = 0;
    for (const Tensor& t : xs) {
        if (t.rank() != rank) fail("concat: mixed ranks");
        for (std::size_t a = 0; a < rank; ++a) {
            if (a == axis) continue;
            if (t.extent(a) != xs[0].extent(a))
                fail("concat: extent mismatch on axis " + std::to_string(a) + " (" +
                     std::to_string(t.extent(a)) + " vs " + std::to_string(xs[0].extent(a)) + ")");
        }
        total += t.extent(axis);
    }
    std::vector<std::size_t> shape = xs[0].shape();
    shape[axis] = total;

    std::size_t inner = 1, outer = 1;
    for (std::size_t i = axis + 1; i < rank; ++i) inner *= shape[i];
    for (std::size_t i = 0; i < axis; ++i) outer *= shape[i];

    Tensor out(shape);
    for (std::size_t o = 0; o < outer; ++o) {
        std::size_t off = 0;
        for (const Tensor& t : xs) {
            const std::size_t block = t.extent(axis) * inner;
            const float* src = t.data() + o * block;
            float* dst = out.data() + o * total * inner + off * inner;
            std::copy(src, src + block, dst);
            off += t.extent(axis);
        }
    }
    return out;
}

Tensor matmul(const Tensor& a, const Tensor& b) {
    if (a.rank() != 2 || b.rank() != 2) fail("matmul: expects rank-2 operands");
    const std::size_t m = a.extent(0), k = a.extent(1);
    if (b.extent(0) != k)
        fail("matmul: inner extents differ (" + std::to_string(k) + " vs " +
             std::to_string(b.extent(0)) + ")");
    const std::size_t n = b.extent(1);
    Tensor out({m, n});
    const float* ad = a.data();
    const float* bd = b.data();
    float* od = out.data();
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            float acc = 0.0f;
            for (std::size_t t = 0; t < k; ++t) acc += ad[i * k + t] * bd[t * n + j];
            od[i * n + j] = acc;
        }
    }
    return out;
}

namespace {

void require_same_shape(const Tensor& a, const Tensor& b, const char* op) {
    if (!a.same_shape(b)) fail(std::string(op) + ": shape mismatch");
}

} // namespace

Tensor add(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "add");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

Tensor sub(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "sub");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

Tensor mul(const Tensor& a, const Tensor& b) {
    require_same_shape(a, b, "mul");
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
    return out;
}

Tensor scale(const Tensor& a, float s) {
    Tensor out(a.shape());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * s;
    return out;
}

Tensor mul_channel_broadcast(const Tensor& x, const Tensor& m) {
    require_rank3(x, "mul_channel_broadcast");
    if (m.rank() != 3 || m.extent(0) != 1 || m.extent(1) != x.extent(1) ||
        m.extent(2) != x.extent(2))
        fail("mul_channel_broadcast: map must be [1,H,W] matching the input plane");
    Tensor out(x.shape());
    const std::size_t C = x.extent(0), HW = x.extent(1) * x.extent(2);
    for (std::size_t c = 0; c < C; ++c)
        for (std::size_t i = 0; i < HW; ++i)
            out[c * HW + i] = x[c * HW + i] * m[i];
    return out;
}

Tensor slice0(const Tensor& x, std::size_t i) {
    if (x.rank() < 2) fail("slice0: need rank >= 2");
    if (i >= x.extent(0))
        fail("slice0: index " + std::to_string(i) + " out of range " +
             std::to_string(x.extent(0)));
    std::vector<std::size_t> shape(x.shape().begin() + 1, x.shape().end());
    std::size_t block = 1;
    for (std::size_t e : shape) block *= e;
    std::vector<float> data(x.data() + i * block, x.data() + (i + 1) * block);
    return Tensor(std::move(shape), std::move(data));
}

} // namespace mistd
