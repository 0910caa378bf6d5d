#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "cfssm/errors.hpp"

namespace cfssm {

/// Latent-state vector of dimension 1 or 2. Value type; the dimension is
/// fixed per scenario and shared by every particle and the true trajectory.
class StateVec {
public:
    StateVec() = default;
    explicit StateVec(double x0) : c_{x0, 0.0}, dim_(1) {}
    StateVec(double x0, double x1) : c_{x0, x1}, dim_(2) {}

    static StateVec zeros(int dim) {
        if (dim != 1 && dim != 2) throw InvalidParameterError("StateVec: dim must be 1 or 2");
        return dim == 1 ? StateVec(0.0) : StateVec(0.0, 0.0);
    }

    int dim() const { return dim_; }
    double operator[](int i) const { return c_[static_cast<std::size_t>(i)]; }
    double& operator[](int i) { return c_[static_cast<std::size_t>(i)]; }

    bool all_finite() const {
        for (int i = 0; i < dim_; ++i)
            if (!std::isfinite(c_[static_cast<std::size_t>(i)])) return false;
        return true;
    }

    double squared_distance(const StateVec& other) const {
        double d2 = 0.0;
        for (int i = 0; i < dim_; ++i) {
            const double d = (*this)[i] - other[i];
            d2 += d * d;
        }
        return d2;
    }

    friend bool operator==(const StateVec& a, const StateVec& b) {
        if (a.dim_ != b.dim_) return false;
        for (int i = 0; i < a.dim_; ++i)
            if (a[i] != b[i]) return false;
        return true;
    }

private:
    std::array<double, 2> c_{0.0, 0.0};
    int dim_ = 1;
};

}  // namespace cfssm
