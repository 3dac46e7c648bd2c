#include "mesh.hpp"

#include <algorithm>
#include <cmath>
#include <fmt/format.h>

namespace shum {

std::vector<double> NodeSet::points() const {
    std::vector<double> p(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) p[i] = point(i);
    return p;
}

std::optional<std::size_t> NodeSet::find(long index) const {
    auto it = std::lower_bound(idx.begin(), idx.end(), index);
    if (it == idx.end() || *it != index) return std::nullopt;
    return static_cast<std::size_t>(it - idx.begin());
}

NodeSet make_node_set_from_indices(std::vector<long> indices, double h, set_kind kind) {
    require(h > 0.0, errc::config, "node set requires positive spacing h");
    std::sort(indices.begin(), indices.end());
    indices.erase(std::unique(indices.begin(), indices.end()), indices.end());
    NodeSet s;
    s.kind = kind;
    s.h = h;
    s.idx = std::move(indices);
    return s;
}

NodeSet make_node_set(const std::vector<double>& points, double h, set_kind kind) {
    require(h > 0.0, errc::config, "node set requires positive spacing h");
    std::vector<long> indices;
    indices.reserve(points.size());
    for (double x : points) {
        double raw = x / (h / 2.0);
        double snapped = std::round(raw);
        if (std::abs(x - snapped * (h / 2.0)) > 1e-12 * h)
            fail_config(fmt::format("point {} is off the h/2 lattice for h = {}", x, h));
        indices.push_back(static_cast<long>(snapped));
    }
    return make_node_set_from_indices(std::move(indices), h, kind);
}

NodeSet shift(const NodeSet& W, long steps) {
    NodeSet s = W;
    s.kind = set_kind::custom;
    for (long& i : s.idx) i += steps;
    return s;
}

namespace {

void check_compatible(const NodeSet& a, const NodeSet& b) {
    require(a.h == b.h, errc::config, "node sets live on different lattices");
}

} // namespace

NodeSet set_union(const NodeSet& a, const NodeSet& b) {
    check_compatible(a, b);
    std::vector<long> out;
    std::set_union(a.idx.begin(), a.idx.end(), b.idx.begin(), b.idx.end(), std::back_inserter(out));
    return make_node_set_from_indices(std::move(out), a.h);
}

NodeSet set_intersection(const NodeSet& a, const NodeSet& b) {
    check_compatible(a, b);
    std::vector<long> out;
    std::set_intersection(a.idx.begin(), a.idx.end(), b.idx.begin(), b.idx.end(), std::back_inserter(out));
    return make_node_set_from_indices(std::move(out), a.h);
}

NodeSet set_difference(const NodeSet& a, const NodeSet& b) {
    check_compatible(a, b);
    std::vector<long> out;
    std::set_difference(a.idx.begin(), a.idx.end(), b.idx.begin(), b.idx.end(), std::back_inserter(out));
    return make_node_set_from_indices(std::move(out), a.h);
}

NodeSet prime(const NodeSet& W) { return set_intersection(shift(W, -1), shift(W, +1)); }
NodeSet star(const NodeSet& W) { return set_union(shift(W, -1), shift(W, +1)); }
NodeSet bar(const NodeSet& W) { return star(star(W)); }
NodeSet ring(const NodeSet& W) { return prime(prime(W)); }
NodeSet boundary(const NodeSet& W) { return set_difference(bar(W), W); }

std::pair<NodeSet, NodeSet> dual_sets(const NodeSet& W, double h) {
    require(!W.empty(), errc::config, "dual_sets requires a nonempty node set");
    require(W.h == h, errc::config, "node set spacing does not match the given h");
    return {prime(W), star(W)};
}

Mesh build_mesh(long N) {
    require(N >= 4, errc::config,
            fmt::format("mesh needs N >= 4 interior nodes so the fourth-difference stencil has "
                        "two neighbors on each side; got N = {}",
                        N));
    Mesh m;
    m.N = N;
    m.h = 1.0 / static_cast<double>(N + 1);
    m.nodes_K.resize(static_cast<std::size_t>(N + 2));
    for (long i = 0; i <= N + 1; ++i) m.nodes_K[static_cast<std::size_t>(i)] = i * m.h;

    std::vector<long> interior;
    for (long i = 1; i <= N; ++i) interior.push_back(2 * i);
    m.M = make_node_set_from_indices(std::move(interior), m.h, set_kind::M);
    m.M_star = star(m.M);
    m.M_star.kind = set_kind::M_star;
    m.M_bar = bar(m.M);
    m.M_bar.kind = set_kind::M_bar;
    m.dM = boundary(m.M);
    m.dM.kind = set_kind::boundary_M;
    m.dM_star = boundary(m.M_star);
    m.dM_star.kind = set_kind::boundary_M_star;

    std::vector<long> ext;
    for (long i = -1; i <= N + 2; ++i) ext.push_back(2 * i);
    m.M_ext = make_node_set_from_indices(std::move(ext), m.h);
    return m;
}

GridFunction::GridFunction(NodeSet s, Eigen::VectorXd v) : set(std::move(s)), values(std::move(v)) {
    require(static_cast<std::size_t>(values.size()) == set.size(), errc::config,
            "grid function value count does not match its node set");
}

double GridFunction::at_index(long index) const {
    auto pos = set.find(index);
    if (!pos)
        fail_config(fmt::format("grid function has no value at node x = {}",
                                static_cast<double>(index) * (set.h / 2.0)));
    return values[static_cast<Eigen::Index>(*pos)];
}

GridFunction grid_constant(const NodeSet& set, double c) {
    return GridFunction(set, Eigen::VectorXd::Constant(static_cast<Eigen::Index>(set.size()), c));
}

GridFunction restrict_to(const GridFunction& u, const NodeSet& S) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(S.size()));
    for (std::size_t i = 0; i < S.size(); ++i) v[static_cast<Eigen::Index>(i)] = u.at_index(S.idx[i]);
    return GridFunction(S, std::move(v));
}

namespace {

void check_same_set(const GridFunction& a, const GridFunction& b) {
    require(a.set.same_nodes(b.set), errc::config,
            "grid function arithmetic requires both operands on the same node set");
}

} // namespace

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
    check_same_set(a, b);
    return GridFunction(a.set, a.values + b.values);
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
    check_same_set(a, b);
    return GridFunction(a.set, a.values - b.values);
}

GridFunction operator*(double c, const GridFunction& a) { return GridFunction(a.set, c * a.values); }

GridFunction cwise_product(const GridFunction& a, const GridFunction& b) {
    check_same_set(a, b);
    return GridFunction(a.set, a.values.cwiseProduct(b.values));
}

int outward_normal(const NodeSet& W, double x) {
    NodeSet bd = boundary(W);
    NodeSet st = star(W);
    double raw = x / (W.h / 2.0);
    long index = static_cast<long>(std::round(raw));
    if (std::abs(x - static_cast<double>(index) * (W.h / 2.0)) > 1e-12 * W.h || !bd.contains(index))
        fail_config(fmt::format("x = {} is not a boundary node of the set", x));
    bool minus_in = st.contains(index - 1);
    bool plus_in = st.contains(index + 1);
    if (minus_in && !plus_in) return +1;
    if (!minus_in && plus_in) return -1;
    return 0;
}

std::vector<BoundarySignature> boundary_signatures(const NodeSet& W) {
    std::vector<BoundarySignature> out;
    for (long index : boundary(W).idx) {
        double x = static_cast<double>(index) * (W.h / 2.0);
        out.push_back({x, outward_normal(W, x)});
    }
    return out;
}

double trace(const GridFunction& u, double x, const NodeSet& W) {
    int nu = outward_normal(W, x);
    if (nu == 0) return 0.0;
    long index = static_cast<long>(std::round(x / (W.h / 2.0)));
    long half = (nu == +1) ? index - 1 : index + 1;
    auto pos = u.set.find(half);
    if (!pos)
        fail_config(fmt::format("trace at x = {} needs a value at the half-point x = {}, "
                                "which the grid function does not carry",
                                x, static_cast<double>(half) * (W.h / 2.0)));
    return u.values[static_cast<Eigen::Index>(*pos)];
}

double integrate(const GridFunction& u) { return u.set.h * u.values.sum(); }

double integrate_boundary(const GridFunction& u) { return u.values.sum(); }

double inner_product(const GridFunction& u, const GridFunction& v) {
    check_same_set(u, v);
    return u.set.h * u.values.dot(v.values);
}

} // namespace shum
