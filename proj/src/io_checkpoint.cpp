#include "cadence/io/checkpoint.hpp"

#include <cstdint>
#include <cstring>
#include <fstream>

namespace cadence::io {

namespace {

constexpr char kMagic[8] = {'C', 'A', 'D', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_u64(std::ostream& os, std::uint64_t v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}
void put_str(std::ostream& os, const std::string& s) {
    put_u32(os, static_cast<std::uint32_t>(s.size()));
    os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

std::uint32_t get_u32(std::istream& is) {
    std::uint32_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw ParseError("checkpoint: truncated (u32)", -1);
    return v;
}
std::uint64_t get_u64(std::istream& is) {
    std::uint64_t v = 0;
    is.read(reinterpret_cast<char*>(&v), sizeof(v));
    if (!is) throw ParseError("checkpoint: truncated (u64)", -1);
    return v;
}
std::string get_str(std::istream& is) {
    const std::uint32_t n = get_u32(is);
    if (n > (1u << 20)) throw ParseError("checkpoint: implausible string length", -1);
    std::string s(n, '\0');
    is.read(s.data(), n);
    if (!is) throw ParseError("checkpoint: truncated (string)", -1);
    return s;
}

} // namespace

void Checkpoint::save(const std::string& path) const {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw IoError("cannot open for writing: " + path);
    os.write(kMagic, sizeof(kMagic));
    put_u32(os, kVersion);

    put_u32(os, static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, pv] : params) {
        put_str(os, name);
        put_u32(os, static_cast<std::uint32_t>(pv.tensor_count()));
        for (std::size_t i = 0; i < pv.tensor_count(); ++i) {
            const auto& t = pv.tensor(i);
            put_str(os, t.name);
            put_u32(os, static_cast<std::uint32_t>(t.shape.size()));
            for (auto d : t.shape) put_u64(os, d);
        }
        put_u64(os, pv.size());
        os.write(reinterpret_cast<const char*>(pv.flat().data()),
                 static_cast<std::streamsize>(pv.size() * sizeof(double)));
    }

    put_u32(os, static_cast<std::uint32_t>(meta_real.size()));
    for (const auto& [k, v] : meta_real) {
        put_str(os, k);
        os.write(reinterpret_cast<const char*>(&v), sizeof(v));
    }
    put_u32(os, static_cast<std::uint32_t>(meta_int.size()));
    for (const auto& [k, v] : meta_int) {
        put_str(os, k);
        std::int64_t x = v;
        os.write(reinterpret_cast<const char*>(&x), sizeof(x));
    }
    put_u32(os, static_cast<std::uint32_t>(meta_str.size()));
    for (const auto& [k, v] : meta_str) {
        put_str(os, k);
        put_str(os, v);
    }
    if (!os) throw IoError("write failed: " + path);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw IoError("cannot open: " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (!is || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0)
        throw ParseError("checkpoint: bad magic in " + path, -1);
    const std::uint32_t version = get_u32(is);
    if (version != kVersion)
        throw ParseError("checkpoint: unsupported version", -1);

    Checkpoint ck;
    const std::uint32_t n_params = get_u32(is);
    for (std::uint32_t p = 0; p < n_params; ++p) {
        const std::string name = get_str(is);
        nn::ParamVector pv;
        const std::uint32_t n_tensors = get_u32(is);
        for (std::uint32_t i = 0; i < n_tensors; ++i) {
            const std::string tname = get_str(is);
            const std::uint32_t nd = get_u32(is);
            std::vector<std::size_t> shape(nd);
            for (auto& d : shape) d = static_cast<std::size_t>(get_u64(is));
            pv.add(tname, shape);
        }
        const std::uint64_t total = get_u64(is);
        if (total != pv.size())
            throw ParseError("checkpoint: value count does not match layout", -1);
        is.read(reinterpret_cast<char*>(pv.flat().data()),
                static_cast<std::streamsize>(total * sizeof(double)));
        if (!is) throw ParseError("checkpoint: truncated values", -1);
        ck.params.emplace(name, std::move(pv));
    }

    const std::uint32_t n_real = get_u32(is);
    for (std::uint32_t i = 0; i < n_real; ++i) {
        const std::string k = get_str(is);
        double v;
        is.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!is) throw ParseError("checkpoint: truncated meta", -1);
        ck.meta_real[k] = v;
    }
    const std::uint32_t n_int = get_u32(is);
    for (std::uint32_t i = 0; i < n_int; ++i) {
        const std::string k = get_str(is);
        std::int64_t v;
        is.read(reinterpret_cast<char*>(&v), sizeof(v));
        if (!is) throw ParseError("checkpoint: truncated meta", -1);
        ck.meta_int[k] = v;
    }
    const std::uint32_t n_str = get_u32(is);
    for (std::uint32_t i = 0; i < n_str; ++i) {
        const std::string k = get_str(is);
        ck.meta_str[k] = get_str(is);
    }
    return ck;
}

void save_params(const nn::ParamVector& params, const std::string& path) {
    Checkpoint ck;
    ck.params.emplace("params", params);
    ck.save(path);
}

nn::ParamVector load_params(const std::string& path) {
    auto ck = Checkpoint::load(path);
    auto it = ck.params.find("params");
    if (it == ck.params.end())
        throw ParseError("checkpoint: missing 'params' section", -1);
    return std::move(it->second);
}

} // namespace cadence::io
