#include "mistd/weights.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

#include "mistd/errors.hpp"

namespace mistd {

namespace {

void put_u32(std::string& buf, std::uint32_t v) {
    char b[4];
    b[0] = static_cast<char>(v & 0xff);
    b[1] = static_cast<char>((v >> 8) & 0xff);
    b[2] = static_cast<char>((v >> 16) & 0xff);
    b[3] = static_cast<char>((v >> 24) & 0xff);
    buf.append(b, 4);
}

void put_f32(std::string& buf, float f) {
    std::uint32_t v;
    std::memcpy(&v, &f, 4);
    put_u32(buf, v);
}

struct Reader {
    const std::string& buf;
    std::size_t pos = 0;

    [[noreturn]] void fail(const std::string& what) const {
        throw IoError("weights: " + what + " at byte offset " + std::to_string(pos));
    }

    std::uint32_t u32(const char* what) {
        if (pos + 4 > buf.size()) fail(std::string("truncated ") + what);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i)
            v = (v << 8) | static_cast<unsigned char>(buf[pos + static_cast<std::size_t>(i)]);
        pos += 4;
        return v;
    }

    float f32(const char* what) {
        const std::uint32_t v = u32(what);
        float f;
        std::memcpy(&f, &v, 4);
        return f;
    }

    std::string bytes(std::size_t n, const char* what) {
        if (pos + n > buf.size()) fail(std::string("truncated ") + what);
        std::string s = buf.substr(pos, n);
        pos += n;
        return s;
    }
};

} // namespace

void WeightStore::add(std::string name, Tensor t) {
    if (index_.count(name))
        throw std::invalid_argument("WeightStore: duplicate name '" + name + "'");
    index_.emplace(name, entries_.size());
    entries_.emplace_back(std::move(name), std::move(t));
}

bool WeightStore::contains(std::string_view name) const {
    return index_.count(std::string(name)) > 0;
}

const Tensor& WeightStore::get(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end())
        throw std::invalid_argument("WeightStore: missing weight '" + std::string(name) + "'");
    return entries_[it->second].second;
}

void WeightStore::save(const std::filesystem::path& path) const {
    std::string buf;
    buf.append("TRDW", 4);
    put_u32(buf, kVersion);
    put_u32(buf, static_cast<std::uint32_t>(entries_.size()));
    for (const auto& [name, tensor] : entries_) {
        put_u32(buf, static_cast<std::uint32_t>(name.size()));
        buf.append(name);
        put_u32(buf, static_cast<std::uint32_t>(tensor.rank()));
        for (std::size_t a = 0; a < tensor.rank(); ++a)
            put_u32(buf, static_cast<std::uint32_t>(tensor.extent(a)));
        for (std::size_t i = 0; i < tensor.size(); ++i) put_f32(buf, tensor[i]);
    }

    const std::filesystem::path tmp = path.string() + ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) throw IoError("weights: cannot open '" + tmp.string() + "' for writing");
        f.write(buf.data(), static_cast<std::streamsize>(buf.size()));
        if (!f) throw IoError("weights: short write to '" + tmp.string() + "'");
    }
    std::filesystem::rename(tmp, path);
}

WeightStore WeightStore::load(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("weights: cannot open '" + path.string() + "'");
    std::string buf((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());

    Reader r{buf};
    const std::string magic = r.bytes(4, "magic");
    if (magic != "TRDW") {
        r.pos = 0;
        r.fail("bad magic, expected \"TRDW\"");
    }
    const std::uint32_t version = r.u32("version");
    if (version != kVersion)
        throw IoError("weights: unsupported version " + std::to_string(version));
    const std::uint32_t count = r.u32("entry count");

    WeightStore store;
    for (std::uint32_t e = 0; e < count; ++e) {
        const std::uint32_t name_len = r.u32("name length");
        const std::string name = r.bytes(name_len, "name");
        const std::uint32_t rank = r.u32("rank");
        std::vector<std::size_t> shape(rank);
        std::size_t total = 1;
        for (std::uint32_t a = 0; a < rank; ++a) {
            shape[a] = r.u32("extent");
            total *= shape[a];
        }
        std::vector<float> data(total);
        for (std::size_t i = 0; i < total; ++i) data[i] = r.f32("payload");
        store.add(name, Tensor(std::move(shape), std::move(data)));
    }
    return store;
}

} // namespace mistd
