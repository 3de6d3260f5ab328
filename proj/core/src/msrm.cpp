#include "mistd/msrm.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace mistd {

namespace {

Tensor conv1x1(const Tensor& x, const WeightStore& w, const std::string& prefix) {
    const Tensor& weight = w.get(prefix + ".weight");
    ConvSpec spec{x.extent(0), weight.extent(0), 1, 1, 0, 1, true};
    const Tensor& bias = w.get(prefix + ".bias");
    return conv2d(x, weight, &bias, spec);
}

Tensor transpose2d(const Tensor& a) {
    const std::size_t m = a.extent(0), n = a.extent(1);
    Tensor t({n, m});
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < n; ++j) t[j * m + i] = a[i * n + j];
    return t;
}

} // namespace

Tensor fuse_references(const Tensor& f_c, const WeightStore& weights) {
    if (f_c.rank() != 4) throw std::invalid_argument("fuse_references: expected [T,C,H,W]");
    const std::size_t T = f_c.extent(0), C = f_c.extent(1);
    if (T < 2) throw std::invalid_argument("fuse_references: need at least 2 frames, got " +
                                           std::to_string(T));
    std::vector<Tensor> refs;
    refs.reserve(T - 1);
    for (std::size_t t = 0; t + 1 < T; ++t) refs.push_back(slice0(f_c, t));
    const Tensor f_t = slice0(f_c, T - 1);
    const Tensor ref_cat = concat(refs, 0);

    ConvSpec gate_spec{(T - 1) * C, C, 3, 1, 1, 1, true};
    const Tensor& gate_bias = weights.get("msrm.gate.bias");
    const Tensor gate = sigmoid(conv2d(ref_cat, weights.get("msrm.gate.weight"), &gate_bias,
                                       gate_spec));
    const Tensor gated = mul(gate, f_t);

    ConvSpec local_spec{2 * C, C, 3, 1, 1, 1, true};
    const Tensor& local_bias = weights.get("msrm.local.bias");
    return conv2d(concat({gated, f_t}, 0), weights.get("msrm.local.weight"), &local_bias,
                  local_spec);
}

Tensor non_local(const Tensor& f_l, const NabConfig& cfg, const WeightStore& weights,
                 Tensor* attn_out) {
    if (f_l.rank() != 3) throw std::invalid_argument("non_local: expected [C,H,W]");
    if (!f_l.all_finite()) throw std::invalid_argument("non_local: non-finite input");
    const std::size_t C = f_l.extent(0), H = f_l.extent(1), W = f_l.extent(2);
    const std::size_t HW = H * W;

    const Tensor q = conv1x1(f_l, weights, "msrm.nab.q");
    const Tensor k = conv1x1(f_l, weights, "msrm.nab.k");
    const Tensor v = conv1x1(f_l, weights, "msrm.nab.v");
    const std::size_t d = q.extent(0);
    if (k.extent(0) != d)
        throw std::invalid_argument("non_local: query/key channel counts differ");
    if (v.extent(0) != C)
        throw std::invalid_argument("non_local: value channels must match input channels");

    // [HW, HW] logits, rows = query positions.
    Tensor logits = matmul(transpose2d(q.reshaped({d, HW})), k.reshaped({d, HW}));
    logits = scale(logits, 1.0f / std::sqrt(static_cast<float>(d)));
    const Tensor attn = softmax(logits, 1);
    if (attn_out) *attn_out = attn;

    // out[c,q] = sum_j attn[q,j] v[c,j]
    const Tensor out = matmul(v.reshaped({C, HW}), transpose2d(attn));
    return add(scale(out.reshaped({C, H, W}), cfg.gamma), f_l);
}

MemoryBank build_memory_bank(const Tensor& f_t, const Tensor& f_g, const WeightStore& weights) {
    if (f_t.rank() != 3 || f_g.rank() != 3)
        throw std::invalid_argument("memory_read: expected [C,H,W] inputs");
    MemoryBank bank;
    bank.k_q = conv1x1(f_t, weights, "msrm.mem.query.key");
    bank.v_q = conv1x1(f_t, weights, "msrm.mem.query.value");
    bank.k_m = conv1x1(f_g, weights, "msrm.mem.memory.key");
    bank.v_m = conv1x1(f_g, weights, "msrm.mem.memory.value");
    if (bank.k_m.extent(0) != bank.k_q.extent(0))
        throw std::invalid_argument("memory_read: memory/query key channels differ (" +
                                    std::to_string(bank.k_m.extent(0)) + " vs " +
                                    std::to_string(bank.k_q.extent(0)) + ")");
    if (bank.v_m.extent(0) != bank.v_q.extent(0))
        throw std::invalid_argument("memory_read: memory/query value channels differ (" +
                                    std::to_string(bank.v_m.extent(0)) + " vs " +
                                    std::to_string(bank.v_q.extent(0)) + ")");
    return bank;
}

Tensor memory_read(const Tensor& f_t, const Tensor& f_g, const WeightStore& weights,
                   Tensor* sim_out) {
    const MemoryBank bank = build_memory_bank(f_t, f_g, weights);
    const std::size_t ck = bank.k_q.extent(0), cv = bank.v_q.extent(0);
    const std::size_t Hq = bank.k_q.extent(1), Wq = bank.k_q.extent(2);
    const std::size_t HWq = Hq * Wq;
    const std::size_t HWm = bank.k_m.extent(1) * bank.k_m.extent(2);

    // [HWq, HWm] affinity, softmax over the memory axis.
    const Tensor affinity =
        matmul(transpose2d(bank.k_q.reshaped({ck, HWq})), bank.k_m.reshaped({ck, HWm}));
    const Tensor sim = softmax(affinity, 1);
    if (sim_out) *sim_out = sim;

    // read[c,q] = sum_m sim[q,m] v_m[c,m]
    const Tensor read = matmul(bank.v_m.reshaped({cv, HWm}), transpose2d(sim));
    const Tensor cat = concat({read.reshaped({cv, Hq, Wq}), bank.v_q}, 0);
    return conv1x1(cat, weights, "msrm.mem.match");
}

Tensor msrm_forward(const Tensor& f_c, const NabConfig& cfg, const WeightStore& weights) {
    const Tensor f_l = fuse_references(f_c, weights);
    const Tensor f_g = non_local(f_l, cfg, weights);
    const Tensor f_t = slice0(f_c, f_c.extent(0) - 1);
    return memory_read(f_t, f_g, weights);
}

} // namespace mistd
