#pragma once

#include "polymag/common.hpp"

#include <array>
#include <cstdint>

namespace polymag {

enum class NodeTag : std::uint8_t { interior, neumann_boundary, dirichlet_boundary };

/// Cell-centered finite-difference grid on an axis-aligned box, masked to the
/// computational domain. A node is kept when its cell center lies both in the
/// physical set (cone, wedge, polyhedron, ...) and in the truncation set
/// (ball or box used to cut an unbounded model domain).
///
/// Severed links are classified at assembly time: a neighbor cell outside the
/// physical set means the cut face sits on the physical boundary (magnetic
/// Neumann, natural in the quadratic form); a neighbor that is physical but
/// outside the truncation set is an artificial Dirichlet cut.
class Grid {
public:
    using Pred = std::function<bool(const Vec3&)>;

    int dim = 0;
    std::array<double, 3> lo{}, step{};
    std::array<int, 3> n{1, 1, 1};

    Grid() = default;

    /// A null inside_physical means "everything is physical": every severed
    /// link is then a Neumann cut (bounded physical domains, free boxes).
    static Grid build(int dim, const Vec3& lo, const Vec3& hi, const Vec3& step,
                      Pred inside_physical, Pred inside_trunc = nullptr) {
        require(dim >= 1 && dim <= 3, "Grid: dimension must be 1, 2 or 3");
        Grid g;
        g.dim = dim;
        g.inside_physical_ = std::move(inside_physical);
        g.inside_trunc_ = std::move(inside_trunc);
        for (int a = 0; a < 3; ++a) {
            if (a < dim) {
                require(step[a] > 0, "Grid: step must be positive");
                g.lo[a] = lo[a];
                g.step[a] = step[a];
                g.n[a] = std::max(1, int(std::round((hi[a] - lo[a]) / step[a])));
            } else {
                g.lo[a] = 0; g.step[a] = 1; g.n[a] = 1;
            }
        }
        g.mask_.assign(std::size_t(g.n[0]) * g.n[1] * g.n[2], -1);
        for (int k = 0; k < g.n[2]; ++k)
            for (int j = 0; j < g.n[1]; ++j)
                for (int i = 0; i < g.n[0]; ++i) {
                    Vec3 x = g.center(i, j, k);
                    if (g.is_inside(x)) {
                        g.mask_[g.box_index(i, j, k)] = int(g.nodes_.size());
                        g.nodes_.push_back({i, j, k});
                    }
                }
        require(!g.nodes_.empty(), "Grid: mask is empty");
        g.assign_tags();
        return g;
    }

    /// Full box (no masking, all physical-Neumann boundary) in `dim` dimensions.
    static Grid box(int dim, const Vec3& lo, const Vec3& hi, const Vec3& step) {
        return build(dim, lo, hi, step, nullptr);
    }

    std::size_t size() const { return nodes_.size(); }
    double cell_volume() const { return step[0] * (dim > 1 ? step[1] : 1.0) * (dim > 2 ? step[2] : 1.0); }

    Vec3 center(int i, int j, int k) const {
        return Vec3(lo[0] + (i + 0.5) * step[0],
                    dim > 1 ? lo[1] + (j + 0.5) * step[1] : 0.0,
                    dim > 2 ? lo[2] + (k + 0.5) * step[2] : 0.0);
    }
    Vec3 node(std::size_t c) const {
        const auto& t = nodes_[c];
        return center(t[0], t[1], t[2]);
    }
    const std::array<int, 3>& node_ijk(std::size_t c) const { return nodes_[c]; }

    /// Compressed index of neighbor in direction axis/dir, or -1 if the cell
    /// is outside the mask or the box.
    int neighbor(std::size_t c, int axis, int dir) const {
        auto t = nodes_[c];
        t[axis] += dir;
        if (t[axis] < 0 || t[axis] >= n[axis]) return -1;
        return mask_[box_index(t[0], t[1], t[2])];
    }

    /// Geometric classification of a severed link: Neumann when the neighbor
    /// cell center left the physical set, Dirichlet when it only left the
    /// truncation set (or the bounding box while still physical).
    NodeTag cut_kind(std::size_t c, int axis, int dir) const {
        auto t = nodes_[c];
        t[axis] += dir;
        Vec3 x = center(t[0], t[1], t[2]);
        if (!inside_physical_ || !inside_physical_(x)) return NodeTag::neumann_boundary;
        return NodeTag::dirichlet_boundary;
    }

    NodeTag tag(std::size_t c) const { return tags_[c]; }

    /// Compressed index of cell (i,j,k), or -1 when outside box or mask.
    int compressed_index(int i, int j, int k) const {
        if (i < 0 || i >= n[0] || j < 0 || j >= n[1] || k < 0 || k >= n[2]) return -1;
        return mask_[box_index(i, j, k)];
    }

    bool is_inside(const Vec3& x) const {
        if (inside_physical_ && !inside_physical_(x)) return false;
        if (inside_trunc_ && !inside_trunc_(x)) return false;
        return true;
    }

    /// Sample a function at all masked nodes.
    template <class F>
    Eigen::VectorXcd sample(F&& f) const {
        Eigen::VectorXcd v(size());
        for (std::size_t c = 0; c < size(); ++c) v[c] = cd(f(node(c)));
        return v;
    }

private:
    std::size_t box_index(int i, int j, int k) const {
        return std::size_t(i) + std::size_t(n[0]) * (std::size_t(j) + std::size_t(n[1]) * k);
    }

    void assign_tags() {
        tags_.assign(nodes_.size(), NodeTag::interior);
        for (std::size_t c = 0; c < nodes_.size(); ++c) {
            for (int a = 0; a < dim; ++a)
                for (int d = -1; d <= 1; d += 2)
                    if (neighbor(c, a, d) < 0) {
                        NodeTag k = cut_kind(c, a, d);
                        if (k == NodeTag::neumann_boundary && tags_[c] == NodeTag::interior)
                            tags_[c] = NodeTag::neumann_boundary;
                        if (k == NodeTag::dirichlet_boundary)
                            tags_[c] = NodeTag::dirichlet_boundary;
                    }
        }
    }

    Pred inside_physical_, inside_trunc_;
    std::vector<int> mask_;                    // box index -> compressed, -1 outside
    std::vector<std::array<int, 3>> nodes_;    // compressed -> (i,j,k)
    std::vector<NodeTag> tags_;
};

} // namespace polymag
