#pragma once

#include "polymag/grid.hpp"

#include <memory>

namespace polymag {

/// Node samples on a (shared) grid with multilinear off-grid evaluation.
/// Points outside the sampled mask evaluate to 0 (profiles handed to this
/// helper decay below truncation level before reaching the mask edge).
class GridFunction {
public:
    GridFunction() = default;
    GridFunction(std::shared_ptr<const Grid> g, Eigen::VectorXcd v)
        : grid_(std::move(g)), v_(std::move(v)) {
        require(std::size_t(v_.size()) == grid_->size(), "GridFunction: size mismatch");
    }
    GridFunction(Grid g, Eigen::VectorXcd v)
        : GridFunction(std::make_shared<const Grid>(std::move(g)), std::move(v)) {}

    bool empty() const { return !grid_; }
    const Grid& grid() const { return *grid_; }
    std::shared_ptr<const Grid> grid_ptr() const { return grid_; }
    const Eigen::VectorXcd& values() const { return v_; }

    cd operator()(const Vec3& x) const {
        const Grid& g = *grid_;
        double w[3][2];
        int base[3];
        for (int a = 0; a < 3; ++a) {
            if (a >= g.dim) {
                base[a] = 0;
                w[a][0] = 1;
                w[a][1] = 0;
                continue;
            }
            double t = (x[a] - g.lo[a]) / g.step[a] - 0.5;
            double fl = std::floor(t);
            base[a] = int(fl);
            w[a][1] = t - fl;
            w[a][0] = 1.0 - w[a][1];
        }
        cd acc(0, 0);
        const int nk = g.dim > 2 ? 2 : 1, nj = g.dim > 1 ? 2 : 1;
        for (int dk = 0; dk < nk; ++dk)
            for (int dj = 0; dj < nj; ++dj)
                for (int di = 0; di < 2; ++di) {
                    double ww = w[0][di] * (nj > 1 ? w[1][dj] : 1.0) * (nk > 1 ? w[2][dk] : 1.0);
                    if (ww == 0) continue;
                    int c = grid_->compressed_index(base[0] + di, base[1] + dj, base[2] + dk);
                    if (c >= 0) acc += ww * v_[c];
                }
        return acc;
    }

private:
    std::shared_ptr<const Grid> grid_;
    Eigen::VectorXcd v_;
};

} // namespace polymag
