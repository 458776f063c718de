#pragma once

#include <map>
#include <string>

#include "cadence/nn/param_vector.hpp"

// Versioned binary checkpoint container: named ParamVector sections plus
// scalar/string metadata. Layout (little-endian, documented in README):
//   magic "CADCKPT1", u32 version,
//   u32 n_param_sections, each: name, tensor table, raw float64 values,
//   u32 n_meta entries, each: key, tag (d/i/s), value.
// Round trips are bit-exact.

namespace cadence::io {

struct Checkpoint {
    std::map<std::string, nn::ParamVector> params;
    std::map<std::string, double> meta_real;
    std::map<std::string, long long> meta_int;
    std::map<std::string, std::string> meta_str;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

    double real_or(const std::string& key, double fallback) const {
        auto it = meta_real.find(key);
        return it == meta_real.end() ? fallback : it->second;
    }
    long long int_or(const std::string& key, long long fallback) const {
        auto it = meta_int.find(key);
        return it == meta_int.end() ? fallback : it->second;
    }
};

// Single-vector convenience used by the nn module's save/load contract.
void save_params(const nn::ParamVector& params, const std::string& path);
nn::ParamVector load_params(const std::string& path);

} // namespace cadence::io
