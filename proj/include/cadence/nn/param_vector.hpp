#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cadence/common.hpp"

namespace cadence::nn {

struct TensorLayout {
    std::string name;
    std::vector<std::size_t> shape; // row-major
    std::size_t offset = 0;
    std::size_t size = 0;
};

// Flat parameter storage with a named-tensor layout. Tensors are appended in
// order; offsets are contiguous and cover the full flat vector. Save/load is
// bit-exact (see io/checkpoint.hpp for the on-disk container).
class ParamVector {
  public:
    // Appends a tensor and returns its index. Name must be unique.
    std::size_t add(const std::string& name, std::vector<std::size_t> shape);

    bool has(const std::string& name) const;
    const TensorLayout& tensor(const std::string& name) const;
    const TensorLayout& tensor(std::size_t idx) const { return layout_[idx]; }
    std::size_t tensor_count() const { return layout_.size(); }

    VecView view(const std::string& name) const;
    MutVecView view(const std::string& name);
    VecView view(const TensorLayout& t) const { return {values_.data() + t.offset, t.size}; }
    MutVecView view(const TensorLayout& t) { return {values_.data() + t.offset, t.size}; }

    std::size_t size() const { return values_.size(); }
    VecView flat() const { return values_; }
    MutVecView flat() { return values_; }
    const std::vector<TensorLayout>& layout() const { return layout_; }

    // True when both vectors have identical layouts (names, shapes, offsets).
    bool layout_matches(const ParamVector& other) const;

  private:
    std::vector<double> values_;
    std::vector<TensorLayout> layout_;
    std::size_t find(const std::string& name) const;
};

} // namespace cadence::nn
