#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "mistd/tensor.hpp"

namespace mistd {

// Named-tensor parameter bundle with a flat binary file format:
//   magic "TRDW", version u32, count u32, then per entry
//   name length u32 + UTF-8 name, rank u32, extents u32 x rank,
//   payload little-endian float32.
// Entry order is preserved; names are unique.
class WeightStore {
public:
    static constexpr std::uint32_t kVersion = 1;

    void add(std::string name, Tensor t);
    bool contains(std::string_view name) const;
    const Tensor& get(std::string_view name) const;
    std::size_t size() const { return entries_.size(); }
    const std::vector<std::pair<std::string, Tensor>>& entries() const { return entries_; }

    void save(const std::filesystem::path& path) const;
    static WeightStore load(const std::filesystem::path& path);

private:
    std::vector<std::pair<std::string, Tensor>> entries_;
    std::unordered_map<std::string, std::size_t> index_;
};

} // namespace mistd
