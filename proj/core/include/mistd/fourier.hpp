#pragma once

#include "mistd/tensor.hpp"

namespace mistd {

// Per-channel frequency planes; index (u,v) = (vertical, horizontal) bin.
struct ComplexMap {
    Tensor re;
    Tensor im;
};

// amp >= 0 everywhere, phase in [-pi, pi].
struct PolarMap {
    Tensor amp;
    Tensor phase;
};

// Forward 2D DFT of a [C,H,W] tensor, unnormalized:
//   X(u,v) = sum_h sum_w x(h,w) exp(-j 2 pi (h u / H + w v / W))
// Radix-2 FFT when both extents are powers of two, direct summation
// otherwise. Internal math runs in double; results stored as float32.
ComplexMap dft2(const Tensor& x);

// Inverse transform carrying the 1/(H*W) normalization.
Tensor idft2(const ComplexMap& X);

// amp = sqrt(re^2+im^2), phase = atan2(im, re); zero bins get phase 0.
PolarMap to_polar(const ComplexMap& X);
ComplexMap from_polar(const PolarMap& p);

} // namespace mistd
