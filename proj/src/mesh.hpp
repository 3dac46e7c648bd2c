#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "error.hpp"

namespace shum {

// Node identity is an integer index on the half-step lattice: point = index * (h/2).
// All dual-set algebra is exact integer arithmetic; reals appear only at the surface.

enum class set_kind { M, M_star, M_bar, boundary_M, boundary_M_star, custom };

struct NodeSet {
    set_kind kind = set_kind::custom;
    double h = 0.0;
    std::vector<long> idx; // sorted, unique, in units of h/2

    std::size_t size() const { return idx.size(); }
    bool empty() const { return idx.empty(); }
    double point(std::size_t i) const { return static_cast<double>(idx[i]) * (h / 2.0); }
    std::vector<double> points() const;
    std::optional<std::size_t> find(long index) const;
    bool contains(long index) const { return find(index).has_value(); }
    bool same_nodes(const NodeSet& other) const { return h == other.h && idx == other.idx; }
};

// Snaps points to the half-lattice of h; beyond 1e-12*h off-lattice is an error.
NodeSet make_node_set(const std::vector<double>& points, double h, set_kind kind = set_kind::custom);
NodeSet make_node_set_from_indices(std::vector<long> indices, double h, set_kind kind = set_kind::custom);

NodeSet shift(const NodeSet& W, long steps); // steps in h/2 units
NodeSet set_union(const NodeSet& a, const NodeSet& b);
NodeSet set_intersection(const NodeSet& a, const NodeSet& b);
NodeSet set_difference(const NodeSet& a, const NodeSet& b);

NodeSet prime(const NodeSet& W); // W' = τ₊(W) ∩ τ₋(W)
NodeSet star(const NodeSet& W);  // W* = τ₊(W) ∪ τ₋(W)
NodeSet bar(const NodeSet& W);   // (W*)*
NodeSet ring(const NodeSet& W);  // (W')'
NodeSet boundary(const NodeSet& W); // bar(W) \ W

// W' and W* of one set, the paper's dual-mesh pair.
std::pair<NodeSet, NodeSet> dual_sets(const NodeSet& W, double h);

struct Mesh {
    long N = 0;
    double h = 0.0;
    std::vector<double> nodes_K; // x_0 .. x_{N+1}
    NodeSet M;        // interior nodes x_1..x_N
    NodeSet M_star;   // h/2 .. 1-h/2
    NodeSet M_bar;    // 0 .. 1
    NodeSet dM;       // {0, 1}
    NodeSet dM_star;  // {-h/2, 1+h/2}
    NodeSet M_ext;    // x_{-1} .. x_{N+2}, carries the ghost nodes
};

Mesh build_mesh(long N); // N >= 4

struct GridFunction {
    NodeSet set;
    Eigen::VectorXd values;

    GridFunction() = default;
    GridFunction(NodeSet s, Eigen::VectorXd v);
    double at_index(long index) const; // error if the node is absent
};

GridFunction grid_constant(const NodeSet& set, double c);
template <typename F>
GridFunction grid_from_fn(const NodeSet& set, F&& f) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(set.size()));
    for (std::size_t i = 0; i < set.size(); ++i) v[static_cast<Eigen::Index>(i)] = f(set.point(i));
    return GridFunction(set, std::move(v));
}

// Values of u at the nodes of S; every node of S must belong to u's set.
GridFunction restrict_to(const GridFunction& u, const NodeSet& S);

GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double c, const GridFunction& a);
GridFunction cwise_product(const GridFunction& a, const GridFunction& b);

struct BoundarySignature {
    double point = 0.0;
    int nu = 0;
};

int outward_normal(const NodeSet& W, double x);
std::vector<BoundarySignature> boundary_signatures(const NodeSet& W);

// Trace at x ∈ ∂W of u defined on W* (or a superset of it).
double trace(const GridFunction& u, double x, const NodeSet& W);

double integrate(const GridFunction& u);          // h * Σ values
double integrate_boundary(const GridFunction& u); // Σ values, no h factor

// <u, v>_{L²_h} on a common set.
double inner_product(const GridFunction& u, const GridFunction& v);

} // namespace shum
