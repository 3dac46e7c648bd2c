#include "tree.hpp"

#include <cmath>
#include <fmt/format.h>

#include "error.hpp"

namespace shum {

NoiseTree build_tree(int K, double T) {
    require(T > 0.0, errc::config, fmt::format("time horizon T = {} must be positive", T));
    if (K < 1 || K > 16) {
        double mib = std::ldexp(8.0 * 64.0, K) / (1024.0 * 1024.0);
        fail_config(fmt::format(
            "K = {} time levels is outside the supported range 1..16; the terminal level "
            "stores 2^K path columns ({:.0f} MiB per field at 64 spatial nodes), so larger "
            "trees need a sampled scheme instead",
            K, mib));
    }
    NoiseTree tree;
    tree.K = K;
    tree.T = T;
    tree.dt = T / K;
    tree.sqrt_dt = std::sqrt(tree.dt);
    return tree;
}

AdaptedField AdaptedField::zeros(const NodeSet& set, const NoiseTree& tree, int levels) {
    require(levels >= 1 && levels <= tree.K + 1, errc::internal,
            fmt::format("adapted field with {} levels does not fit a depth-{} tree", levels, tree.K));
    AdaptedField field;
    field.set = set;
    field.values.reserve(levels);
    for (int k = 0; k < levels; ++k)
        field.values.emplace_back(Eigen::MatrixXd::Zero(set.size(), tree.nodes_at(k)));
    return field;
}

Eigen::VectorXd expectation(const Eigen::MatrixXd& level_values) {
    return level_values.rowwise().sum() / static_cast<double>(level_values.cols());
}

Eigen::VectorXd expectation(const AdaptedField& field, int level) {
    require(level >= 0 && level < field.levels(), errc::internal,
            fmt::format("expectation at level {} of a field with {} levels", level, field.levels()));
    return expectation(field.values[level]);
}

static void check_child_level(const Eigen::MatrixXd& child_level) {
    require(child_level.cols() >= 2 && child_level.cols() % 2 == 0, errc::internal,
            fmt::format("level with {} path columns has no parent level", child_level.cols()));
}

Eigen::MatrixXd cond_expectation(const Eigen::MatrixXd& child_level) {
    check_child_level(child_level);
    long parents = child_level.cols() / 2;
    Eigen::MatrixXd out(child_level.rows(), parents);
    for (long j = 0; j < parents; ++j)
        out.col(j) = 0.5 * (child_level.col(2 * j) + child_level.col(2 * j + 1));
    return out;
}

Eigen::MatrixXd cond_expectation(const AdaptedField& field, int child_level) {
    require(child_level >= 1 && child_level < field.levels(), errc::internal,
            "conditional expectation needs a child level with a parent");
    return cond_expectation(field.values[child_level]);
}

Eigen::MatrixXd martingale_rep(const Eigen::MatrixXd& child_level, double sqrt_dt) {
    check_child_level(child_level);
    long parents = child_level.cols() / 2;
    Eigen::MatrixXd out(child_level.rows(), parents);
    for (long j = 0; j < parents; ++j)
        out.col(j) = (child_level.col(2 * j) - child_level.col(2 * j + 1)) / (2.0 * sqrt_dt);
    return out;
}

Eigen::MatrixXd martingale_rep(const AdaptedField& field, int child_level, const NoiseTree& tree) {
    require(child_level >= 1 && child_level < field.levels(), errc::internal,
            "martingale representation needs a child level with a parent");
    return martingale_rep(field.values[child_level], tree.sqrt_dt);
}

} // namespace shum
