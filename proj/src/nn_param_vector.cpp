#include "cadence/nn/param_vector.hpp"

namespace cadence::nn {

std::size_t ParamVector::add(const std::string& name, std::vector<std::size_t> shape) {
    if (has(name)) throw InvalidArgumentError("duplicate tensor name: " + name);
    std::size_t n = 1;
    for (std::size_t s : shape) n *= s;
    TensorLayout t;
    t.name = name;
    t.shape = std::move(shape);
    t.offset = values_.size();
    t.size = n;
    layout_.push_back(std::move(t));
    values_.resize(values_.size() + n, 0.0);
    return layout_.size() - 1;
}

std::size_t ParamVector::find(const std::string& name) const {
    for (std::size_t i = 0; i < layout_.size(); ++i)
        if (layout_[i].name == name) return i;
    throw InvalidArgumentError("unknown tensor name: " + name);
}

bool ParamVector::has(const std::string& name) const {
    for (const auto& t : layout_)
        if (t.name == name) return true;
    return false;
}

const TensorLayout& ParamVector::tensor(const std::string& name) const {
    return layout_[find(name)];
}

VecView ParamVector::view(const std::string& name) const {
    const auto& t = layout_[find(name)];
    return {values_.data() + t.offset, t.size};
}

MutVecView ParamVector::view(const std::string& name) {
    const auto& t = layout_[find(name)];
    return {values_.data() + t.offset, t.size};
}

bool ParamVector::layout_matches(const ParamVector& other) const {
    if (layout_.size() != other.layout_.size()) return false;
    for (std::size_t i = 0; i < layout_.size(); ++i) {
        const auto& a = layout_[i];
        const auto& b = other.layout_[i];
        if (a.name != b.name || a.shape != b.shape || a.offset != b.offset) return false;
    }
    return true;
}

} // namespace cadence::nn
