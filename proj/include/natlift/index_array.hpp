#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cmath>
#include <cstddef>
#include <vector>

namespace natlift {

/// Dense array with `Rank` indices each running over [0, dim).
///
/// Used for the component arrays of M-tensor fields (Christoffel symbols,
/// connection and curvature blocks). Storage is row-major in the index order
/// written in the accessor.
template <std::size_t Rank>
class IndexArray {
public:
    IndexArray() = default;
    explicit IndexArray(int dim) : dim_(dim), data_(size_for(dim), 0.0) {}

    int dim() const noexcept { return dim_; }
    std::size_t size() const noexcept { return data_.size(); }

    template <typename... Idx>
    double& operator()(Idx... idx) {
        static_assert(sizeof...(Idx) == Rank);
        return data_[offset({static_cast<int>(idx)...})];
    }
    template <typename... Idx>
    double operator()(Idx... idx) const {
        static_assert(sizeof...(Idx) == Rank);
        return data_[offset({static_cast<int>(idx)...})];
    }

    const std::vector<double>& data() const noexcept { return data_; }
    std::vector<double>& data() noexcept { return data_; }

    double max_abs() const {
        double m = 0.0;
        for (double v : data_) m = std::max(m, std::abs(v));
        return m;
    }

    IndexArray& operator*=(double s) {
        for (double& v : data_) v *= s;
        return *this;
    }

    friend double max_abs_diff(const IndexArray& a, const IndexArray& b) {
        assert(a.dim_ == b.dim_);
        double m = 0.0;
        for (std::size_t k = 0; k < a.data_.size(); ++k) m = std::max(m, std::abs(a.data_[k] - b.data_[k]));
        return m;
    }

private:
    static std::size_t size_for(int dim) {
        std::size_t s = 1;
        for (std::size_t r = 0; r < Rank; ++r) s *= static_cast<std::size_t>(dim);
        return s;
    }

    std::size_t offset(const std::array<int, Rank>& idx) const {
        std::size_t off = 0;
        for (std::size_t r = 0; r < Rank; ++r) {
            assert(idx[r] >= 0 && idx[r] < dim_);
            off = off * static_cast<std::size_t>(dim_) + static_cast<std::size_t>(idx[r]);
        }
        return off;
    }

    int dim_ = 0;
    std::vector<double> data_;
};

using Array3 = IndexArray<3>;
using Array4 = IndexArray<4>;

}  // namespace natlift
