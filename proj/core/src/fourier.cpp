#include "mistd/fourier.hpp"

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace mistd {

namespace {

using cd = std::complex<double>;

bool is_pow2(std::size_t n) { return n > 0 && (n & (n - 1)) == 0; }

// In-place iterative radix-2 Cooley-Tukey; sign = -1 forward, +1 inverse
// (no normalization here).
void fft_pow2(std::vector<cd>& a, int sign) {
    const std::size_t n = a.size();
    if (n == 1) return;
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j & bit; bit >>= 1) j ^= bit;
        j ^= bit;
        if (i < j) std::swap(a[i], a[j]);
    }
    for (std::size_t len = 2; len <= n; len <<= 1) {
        const double ang = sign * 2.0 * std::numbers::pi / static_cast<double>(len);
        const cd wl(std::cos(ang), std::sin(ang));
        for (std::size_t i = 0; i < n; i += len) {
            cd w(1.0, 0.0);
            for (std::size_t j = 0; j < len / 2; ++j) {
                const cd u = a[i + j];
                const cd v = a[i + j + len / 2] * w;
                a[i + j] = u + v;
                a[i + j + len / 2] = u - v;
                w *= wl;
            }
        }
    }
}

// Twiddle table exp(sign * 2*pi*i * k / n), k in [0, n).
std::vector<cd> twiddles(std::size_t n, int sign) {
    std::vector<cd> t(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double ang = sign * 2.0 * std::numbers::pi * static_cast<double>(k) /
                           static_cast<double>(n);
        t[k] = cd(std::cos(ang), std::sin(ang));
    }
    return t;
}

// One channel plane, H*W complex values in row-major order.
void transform_plane(std::vector<cd>& plane, std::size_t H, std::size_t W, int sign) {
    if (is_pow2(H) && is_pow2(W)) {
        std::vector<cd> row(W);
        for (std::size_t h = 0; h < H; ++h) {
            std::copy(plane.begin() + h * W, plane.begin() + (h + 1) * W, row.begin());
            fft_pow2(row, sign);
            std::copy(row.begin(), row.end(), plane.begin() + h * W);
        }
        std::vector<cd> col(H);
        for (std::size_t w = 0; w < W; ++w) {
            for (std::size_t h = 0; h < H; ++h) col[h] = plane[h * W + w];
            fft_pow2(col, sign);
            for (std::size_t h = 0; h < H; ++h) plane[h * W + w] = col[h];
        }
        return;
    }
    // Direct summation fallback, desk scale only.
    const auto tH = twiddles(H, sign);
    const auto tW = twiddles(W, sign);
    std::vector<cd> out(H * W);
    for (std::size_t u = 0; u < H; ++u) {
        for (std::size_t v = 0; v < W; ++v) {
            cd acc(0.0, 0.0);
            for (std::size_t h = 0; h < H; ++h)
                for (std::size_t w = 0; w < W; ++w)
                    acc += plane[h * W + w] * tH[(h * u) % H] * tW[(w * v) % W];
            out[u * W + v] = acc;
        }
    }
    plane = std::move(out);
}

} // namespace

ComplexMap dft2(const Tensor& x) {
    if (x.rank() != 3) throw std::invalid_argument("dft2: expected rank-3 [C,H,W] input");
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);
    if (H < 1 || W < 1) throw std::invalid_argument("dft2: empty spatial extents");
    ComplexMap X{Tensor(x.shape()), Tensor(x.shape())};
    std::vector<cd> plane(H * W);
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < H * W; ++i)
            plane[i] = cd(static_cast<double>(x[c * H * W + i]), 0.0);
        transform_plane(plane, H, W, -1);
        for (std::size_t i = 0; i < H * W; ++i) {
            X.re[c * H * W + i] = static_cast<float>(plane[i].real());
            X.im[c * H * W + i] = static_cast<float>(plane[i].imag());
        }
    }
    return X;
}

Tensor idft2(const ComplexMap& X) {
    if (X.re.rank() != 3 || !X.re.same_shape(X.im))
        throw std::invalid_argument("idft2: re/im must be rank-3 tensors of identical shape");
    const std::size_t C = X.re.extent(0), H = X.re.extent(1), W = X.re.extent(2);
    Tensor out(X.re.shape());
    std::vector<cd> plane(H * W);
    const double norm = 1.0 / (static_cast<double>(H) * static_cast<double>(W));
    for (std::size_t c = 0; c < C; ++c) {
        for (std::size_t i = 0; i < H * W; ++i)
            plane[i] = cd(static_cast<double>(X.re[c * H * W + i]),
                          static_cast<double>(X.im[c * H * W + i]));
        transform_plane(plane, H, W, +1);
        for (std::size_t i = 0; i < H * W; ++i)
            out[c * H * W + i] = static_cast<float>(plane[i].real() * norm);
    }
    return out;
}

PolarMap to_polar(const ComplexMap& X) {
    if (!X.re.same_shape(X.im))
        throw std::invalid_argument("to_polar: re/im shape mismatch");
    PolarMap p{Tensor(X.re.shape()), Tensor(X.re.shape())};
    for (std::size_t i = 0; i < X.re.size(); ++i) {
        const double re = X.re[i], im = X.im[i];
        p.amp[i] = static_cast<float>(std::hypot(re, im));
        p.phase[i] = (re == 0.0 && im == 0.0) ? 0.0f : static_cast<float>(std::atan2(im, re));
    }
    return p;
}

ComplexMap from_polar(const PolarMap& p) {
    if (!p.amp.same_shape(p.phase))
        throw std::invalid_argument("from_polar: amp/phase shape mismatch");
    ComplexMap X{Tensor(p.amp.shape()), Tensor(p.amp.shape())};
    for (std::size_t i = 0; i < p.amp.size(); ++i) {
        const double a = p.amp[i], ph = p.phase[i];
        X.re[i] = static_cast<float>(a * std::cos(ph));
        X.im[i] = static_cast<float>(a * std::sin(ph));
    }
    return X;
}

} // namespace mistd
