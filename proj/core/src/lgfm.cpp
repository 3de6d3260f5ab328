#include "mistd/lgfm.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "mistd/fourier.hpp"

namespace mistd {

namespace {

Tensor dw3(const Tensor& x, const WeightStore& w, const std::string& prefix) {
    const std::size_t C = x.extent(0);
    ConvSpec spec{C, C, 3, 1, 1, C, true};
    const Tensor& bias = w.get(prefix + ".bias");
    return conv2d(x, w.get(prefix + ".weight"), &bias, spec);
}

Tensor pw1(const Tensor& x, const WeightStore& w, const std::string& prefix) {
    const Tensor& weight = w.get(prefix + ".weight");
    ConvSpec spec{x.extent(0), weight.extent(0), 1, 1, 0, 1, true};
    const Tensor& bias = w.get(prefix + ".bias");
    return conv2d(x, weight, &bias, spec);
}

Tensor attention_map(const Tensor& planes, const WeightStore& w, const std::string& prefix) {
    // channel_pool output [2,H,W] -> DW 3x3 (groups 2) -> ReLU -> PW to one
    // channel -> sigmoid.
    return sigmoid(pw1(relu(dw3(planes, w, prefix + ".dw")), w, prefix + ".pw"));
}

} // namespace

Tensor freq_enhance(const Tensor& x, const WeightStore& weights) {
    if (x.rank() != 3) throw std::invalid_argument("freq_enhance: expected [C,H,W]");
    const std::size_t C = x.extent(0), H = x.extent(1), W = x.extent(2);

    const ComplexMap spec = dft2(x);
    const PolarMap polar = to_polar(spec);

    const Tensor amp1 = relu(pw1(relu(dw3(polar.amp, weights, "lgfm.amp.dw")), weights,
                                 "lgfm.amp.pw"));
    const Tensor m_a = attention_map(channel_pool(amp1), weights, "lgfm.amp_attn");
    const Tensor amp2 = mul_channel_broadcast(amp1, m_a);
    const Tensor amp_res = sub(amp2, polar.amp);

    const Tensor phase_in = concat({polar.phase, amp_res}, 0);
    const Tensor phase1 = sigmoid(pw1(relu(dw3(phase_in, weights, "lgfm.phase.dw")), weights,
                                      "lgfm.phase.pw"));
    const Tensor m_p = attention_map(channel_pool(phase1), weights, "lgfm.phase_attn");
    const Tensor phase2 = mul_channel_broadcast(phase1, m_p);

    const float pi = std::numbers::pi_v<float>;
    Tensor re({C, H, W}), im({C, H, W});
    for (std::size_t i = 0; i < re.size(); ++i) {
        const float p3 = 2.0f * pi * phase2[i] - pi;
        re[i] = amp2[i] * std::cos(p3);
        im[i] = amp2[i] * std::sin(p3);
    }
    return add(x, idft2(ComplexMap{std::move(re), std::move(im)}));
}

Tensor conv_branch(const Tensor& stacked, const WeightStore& weights) {
    if (stacked.rank() != 3) throw std::invalid_argument("conv_branch: expected [T*C,H,W]");
    const Tensor& w1 = weights.get("lgfm.conv_branch.conv1.weight");
    ConvSpec s1{stacked.extent(0), w1.extent(0), 3, 1, 1, 1, true};
    const Tensor& b1 = weights.get("lgfm.conv_branch.conv1.bias");
    Tensor y = conv2d(stacked, w1, &b1, s1);
    y = batch_norm(y, weights.get("lgfm.conv_branch.conv1.bn.gamma"),
                   weights.get("lgfm.conv_branch.conv1.bn.beta"),
                   weights.get("lgfm.conv_branch.conv1.bn.mean"),
                   weights.get("lgfm.conv_branch.conv1.bn.var"));
    y = silu(y);

    const Tensor& w2 = weights.get("lgfm.conv_branch.conv2.weight");
    ConvSpec s2{y.extent(0), w2.extent(0), 3, 1, 1, 1, true};
    const Tensor& b2 = weights.get("lgfm.conv_branch.conv2.bias");
    y = conv2d(y, w2, &b2, s2);
    y = batch_norm(y, weights.get("lgfm.conv_branch.conv2.bn.gamma"),
                   weights.get("lgfm.conv_branch.conv2.bn.beta"),
                   weights.get("lgfm.conv_branch.conv2.bn.mean"),
                   weights.get("lgfm.conv_branch.conv2.bn.var"));
    return silu(y);
}

namespace {

// tokens [N,E] x weight [O,E] + bias [O] -> [N,O]
Tensor linear(const Tensor& tokens, const Tensor& weight, const Tensor& bias) {
    const std::size_t n = tokens.extent(0), e = tokens.extent(1), o = weight.extent(0);
    if (weight.extent(1) != e) throw std::invalid_argument("linear: weight/input width mismatch");
    Tensor out({n, o});
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < o; ++j) {
            float acc = 0.0f;
            for (std::size_t t = 0; t < e; ++t) acc += tokens[i * e + t] * weight[j * e + t];
            out[i * o + j] = acc + bias[j];
        }
    }
    return out;
}

Tensor silu_t(const Tensor& x) { return silu(x); }

} // namespace

Tensor swin_branch(const Tensor& stacked, const WindowAttnConfig& cfg, const WeightStore& weights,
                   std::vector<Tensor>* attn_out) {
    if (stacked.rank() != 3) throw std::invalid_argument("swin_branch: expected [T*C,H,W]");
    if (cfg.window == 0 || cfg.heads == 0 || cfg.embed % cfg.heads != 0)
        throw std::invalid_argument("swin_branch: embed dim must divide into heads");
    const std::size_t H = stacked.extent(1), W = stacked.extent(2);
    const std::size_t E = cfg.embed, wsz = cfg.window;
    const std::size_t head_dim = E / cfg.heads;

    Tensor x = pw1(stacked, weights, "lgfm.swin.in_proj"); // [E,H,W]

    // Zero-pad bottom/right to window multiples.
    const std::size_t Hp = (H + wsz - 1) / wsz * wsz;
    const std::size_t Wp = (W + wsz - 1) / wsz * wsz;
    if (Hp != H || Wp != W) {
        Tensor padded({E, Hp, Wp});
        for (std::size_t c = 0; c < E; ++c)
            for (std::size_t h = 0; h < H; ++h)
                for (std::size_t w = 0; w < W; ++w) padded.at(c, h, w) = x.at(c, h, w);
        x = std::move(padded);
    }

    const Tensor& wq = weights.get("lgfm.swin.q.weight");
    const Tensor& bq = weights.get("lgfm.swin.q.bias");
    const Tensor& wk = weights.get("lgfm.swin.k.weight");
    const Tensor& bk = weights.get("lgfm.swin.k.bias");
    const Tensor& wv = weights.get("lgfm.swin.v.weight");
    const Tensor& bv = weights.get("lgfm.swin.v.bias");
    const Tensor& wo = weights.get("lgfm.swin.out.weight");
    const Tensor& bo = weights.get("lgfm.swin.out.bias");
    const Tensor& wm1 = weights.get("lgfm.swin.mlp.fc1.weight");
    const Tensor& bm1 = weights.get("lgfm.swin.mlp.fc1.bias");
    const Tensor& wm2 = weights.get("lgfm.swin.mlp.fc2.weight");
    const Tensor& bm2 = weights.get("lgfm.swin.mlp.fc2.bias");

    const std::size_t n_tok = wsz * wsz;
    Tensor result({E, Hp, Wp});
    for (std::size_t wy = 0; wy < Hp / wsz; ++wy) {
        for (std::size_t wx = 0; wx < Wp / wsz; ++wx) {
            Tensor tok({n_tok, E});
            for (std::size_t ty = 0; ty < wsz; ++ty)
                for (std::size_t tx = 0; tx < wsz; ++tx)
                    for (std::size_t c = 0; c < E; ++c)
                        tok[(ty * wsz + tx) * E + c] = x.at(c, wy * wsz + ty, wx * wsz + tx);

            const Tensor q = linear(tok, wq, bq);
            const Tensor k = linear(tok, wk, bk);
            const Tensor v = linear(tok, wv, bv);

            Tensor attn_cat({n_tok, E});
            for (std::size_t head = 0; head < cfg.heads; ++head) {
                const std::size_t off = head * head_dim;
                Tensor logits({n_tok, n_tok});
                const float inv = 1.0f / std::sqrt(static_cast<float>(head_dim));
                for (std::size_t i = 0; i < n_tok; ++i)
                    for (std::size_t j = 0; j < n_tok; ++j) {
                        float acc = 0.0f;
                        for (std::size_t t = 0; t < head_dim; ++t)
                            acc += q[i * E + off + t] * k[j * E + off + t];
                        logits[i * n_tok + j] = acc * inv;
                    }
                const Tensor a = softmax(logits, 1);
                if (attn_out) attn_out->push_back(a);
                for (std::size_t i = 0; i < n_tok; ++i)
                    for (std::size_t t = 0; t < head_dim; ++t) {
                        float acc = 0.0f;
                        for (std::size_t j = 0; j < n_tok; ++j)
                            acc += a[i * n_tok + j] * v[j * E + off + t];
                        attn_cat[i * E + off + t] = acc;
                    }
            }

            const Tensor msa = add(tok, linear(attn_cat, wo, bo));
            const Tensor mlp = linear(silu_t(linear(msa, wm1, bm1)), wm2, bm2);
            const Tensor out = add(msa, mlp);

            for (std::size_t ty = 0; ty < wsz; ++ty)
                for (std::size_t tx = 0; tx < wsz; ++tx)
                    for (std::size_t c = 0; c < E; ++c)
                        result.at(c, wy * wsz + ty, wx * wsz + tx) =
                            out[(ty * wsz + tx) * E + c];
        }
    }

    if (Hp != H || Wp != W) {
        Tensor cropped({E, H, W});
        for (std::size_t c = 0; c < E; ++c)
            for (std::size_t h = 0; h < H; ++h)
                for (std::size_t w = 0; w < W; ++w) cropped.at(c, h, w) = result.at(c, h, w);
        result = std::move(cropped);
    }
    return pw1(result, weights, "lgfm.swin.out_proj");
}

Tensor lgfm_stack(const Tensor& f_c, const WeightStore& weights) {
    if (f_c.rank() != 4) throw std::invalid_argument("lgfm_stack: expected [T,C,H,W]");
    std::vector<Tensor> enhanced;
    enhanced.reserve(f_c.extent(0));
    for (std::size_t t = 0; t < f_c.extent(0); ++t)
        enhanced.push_back(freq_enhance(slice0(f_c, t), weights));
    return concat(enhanced, 0);
}

} // namespace mistd
