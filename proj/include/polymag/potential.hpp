#pragma once

#include "polymag/common.hpp"

namespace polymag {

/// Magnetic vector potential x -> A(x). Linear potentials store their
/// gradient matrix so curl and translations are exact; general smooth
/// potentials are wrapped callables.
class PotentialField {
public:
    PotentialField() : linear_(true), grad_(Mat3::Zero()) {}

    static PotentialField zero() { return PotentialField(); }

    /// A(x) = M x with M = grad A (entries M(j,k) = d_k A_j).
    static PotentialField linear(const Mat3& grad) {
        PotentialField p;
        p.linear_ = true;
        p.grad_ = grad;
        return p;
    }

    static PotentialField smooth(std::function<Vec3(const Vec3&)> f) {
        PotentialField p;
        p.linear_ = false;
        p.fn_ = std::move(f);
        return p;
    }

    Vec3 operator()(const Vec3& x) const { return linear_ ? Vec3(grad_ * x) : fn_(x); }

    bool is_linear() const { return linear_; }

    const Mat3& gradient() const {
        require(linear_, "PotentialField: gradient only stored for linear potentials");
        return grad_;
    }

    /// curl A, analytic for linear potentials.
    Vec3 curl_linear() const {
        const Mat3& m = gradient();
        return Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
    }

    /// Linear part at a base point: x -> grad A(x0) . x, gradient by central
    /// differences when the potential is not closed-form linear.
    PotentialField linear_part_at(const Vec3& x0, double fd_step = 1e-5) const {
        if (linear_) return *this;
        Mat3 g;
        for (int k = 0; k < 3; ++k) {
            Vec3 e = Vec3::Zero(); e[k] = fd_step;
            Vec3 d = ((*this)(x0 + e) - (*this)(x0 - e)) / (2 * fd_step);
            g.col(k) = d;
        }
        return linear(g);
    }

private:
    bool linear_;
    Mat3 grad_;
    std::function<Vec3(const Vec3&)> fn_;
};

/// A(x) = (1/2) B ^ x; curl A = B identically for constant B.
inline PotentialField symmetric_gauge_potential(const Vec3& B) {
    Mat3 m;
    m << 0, -B[2] / 2, B[1] / 2,
         B[2] / 2, 0, -B[0] / 2,
        -B[1] / 2, B[0] / 2, 0;
    return PotentialField::linear(m);
}

/// Scalar (electric-type) potential used by the fibered model operators.
using ScalarPotential = std::function<double(const Vec3&)>;

} // namespace polymag
