#include "nestdiag/geometry.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace nestdiag {

namespace {

// Squared pairwise distances via the Gram matrix; diagonal set to +inf so
// self-distances never win a nearest-neighbour scan.
Eigen::MatrixXd pairwise_sq(const Eigen::MatrixXd& pts) {
    const Eigen::MatrixXd gram = pts * pts.transpose();
    const Eigen::VectorXd sq = gram.diagonal();
    Eigen::MatrixXd d2 = (-2.0 * gram).rowwise() + sq.transpose();
    d2.colwise() += sq;
    d2 = d2.cwiseMax(0.0);
    d2.diagonal().setConstant(std::numeric_limits<double>::infinity());
    return d2;
}

double bootstrap_max_nn_sq(const Eigen::MatrixXd& dist_sq, int rounds,
                           Rng& rng) {
    const int n = static_cast<int>(dist_sq.rows());
    std::vector<char> selected(n);
    std::vector<int> train;
    train.reserve(n);
    double max_sq = 0.0;
    int done = 0;
    while (done < rounds) {
        std::fill(selected.begin(), selected.end(), 0);
        for (int i = 0; i < n; ++i)
            selected[rng.uniform_index(static_cast<std::uint64_t>(n))] = 1;
        train.clear();
        int num_test = 0;
        for (int i = 0; i < n; ++i) {
            if (selected[i])
                train.push_back(i);
            else
                ++num_test;
        }
        if (num_test == 0) continue;  // all points drawn: redraw the round
        ++done;
        for (int i = 0; i < n; ++i) {
            if (selected[i]) continue;
            double nearest = std::numeric_limits<double>::infinity();
            const double* col = dist_sq.col(i).data();
            for (int j : train) nearest = std::min(nearest, col[j]);
            max_sq = std::max(max_sq, nearest);
        }
    }
    return max_sq;
}

class UnionFind {
public:
    explicit UnionFind(int n) : parent_(n) {
        std::iota(parent_.begin(), parent_.end(), 0);
    }
    int find(int i) {
        while (parent_[i] != i) {
            parent_[i] = parent_[parent_[i]];
            i = parent_[i];
        }
        return i;
    }
    void unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a != b) parent_[std::max(a, b)] = std::min(a, b);
    }

private:
    std::vector<int> parent_;
};

ClusterAssignment linkage_from_sq(const Eigen::MatrixXd& dist_sq,
                                  double radius_sq) {
    const int n = static_cast<int>(dist_sq.rows());
    UnionFind uf(n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (dist_sq(j, i) <= radius_sq) uf.unite(i, j);

    ClusterAssignment out;
    out.labels.assign(n, -1);
    std::vector<int> root_label(n, -1);
    for (int i = 0; i < n; ++i) {
        const int root = uf.find(i);
        if (root_label[root] < 0) root_label[root] = out.num_clusters++;
        out.labels[i] = root_label[root];
    }
    return out;
}

void scale_space(WhitenedSpace& space, double factor) {
    space.transform *= factor;
    space.inverse_transform /= factor;
}

}  // namespace

Eigen::MatrixXd WhitenedSpace::whiten_rows(const Eigen::MatrixXd& points) const {
    return (points.rowwise() - mean.transpose()) * transform.transpose();
}

Eigen::MatrixXd stack_points(const std::vector<UnitPoint>& points) {
    if (points.empty()) return {};
    const Eigen::Index d = points.front().u.size();
    Eigen::MatrixXd out(static_cast<Eigen::Index>(points.size()), d);
    for (Eigen::Index i = 0; i < out.rows(); ++i)
        out.row(i) = points[static_cast<std::size_t>(i)].u.transpose();
    return out;
}

namespace {

// Core whitening without the point-count precondition: the ridge keeps the
// factorization alive even for rank-deficient sets, where distances within
// the sample span remain meaningful.
WhitenedSpace whitened_space_impl(
    const Eigen::MatrixXd& points,
    const std::optional<ClusterAssignment>& clusters) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());

    const Eigen::VectorXd mean = points.colwise().mean();

    Eigen::MatrixXd centered;
    if (clusters) {
        if (static_cast<int>(clusters->labels.size()) != n)
            throw PreconditionError(
                "build_whitened_space: cluster labels do not match points");
        // Center each point on its own cluster mean, then pool.
        Eigen::MatrixXd cluster_mean =
            Eigen::MatrixXd::Zero(clusters->num_clusters, d);
        std::vector<int> count(static_cast<std::size_t>(clusters->num_clusters));
        for (int i = 0; i < n; ++i) {
            cluster_mean.row(clusters->labels[static_cast<std::size_t>(i)]) +=
                points.row(i);
            ++count[static_cast<std::size_t>(
                clusters->labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < clusters->num_clusters; ++c)
            cluster_mean.row(c) /= static_cast<double>(count[static_cast<std::size_t>(c)]);
        centered = points;
        for (int i = 0; i < n; ++i)
            centered.row(i) -=
                cluster_mean.row(clusters->labels[static_cast<std::size_t>(i)]);
    } else {
        centered = points.rowwise() - mean.transpose();
    }

    const Eigen::MatrixXd cov =
        centered.transpose() * centered / static_cast<double>(n - 1);
    const double ridge_unit = cov.trace() / d;

    Eigen::LLT<Eigen::MatrixXd> llt;
    for (double eps = 1e-10; eps <= 1.001e-6; eps *= 10.0) {
        Eigen::MatrixXd reg = cov;
        reg.diagonal().array() += eps * ridge_unit;
        llt.compute(reg);
        if (llt.info() == Eigen::Success) {
            WhitenedSpace space;
            space.mean = mean;
            const Eigen::MatrixXd lower = llt.matrixL();
            space.transform = lower.triangularView<Eigen::Lower>().solve(
                Eigen::MatrixXd::Identity(d, d));
            space.inverse_transform = lower;
            return space;
        }
    }

    int worst_axis = 0;
    cov.diagonal().minCoeff(&worst_axis);
    throw DegenerateGeometryError(
        "covariance is singular after regularization; flattest direction is "
        "axis " +
        std::to_string(worst_axis) +
        " (variance " + std::to_string(cov(worst_axis, worst_axis)) + ")");
}

}  // namespace

WhitenedSpace build_whitened_space(
    const Eigen::MatrixXd& points,
    const std::optional<ClusterAssignment>& clusters) {
    const int n = static_cast<int>(points.rows());
    const int d = static_cast<int>(points.cols());
    if (d < 1) throw PreconditionError("build_whitened_space: empty points");
    if (n < d + 1)
        throw PreconditionError("build_whitened_space: need at least d+1 = " +
                                std::to_string(d + 1) + " points, got " +
                                std::to_string(n));
    return whitened_space_impl(points, clusters);
}

MLFriendsRadius bootstrap_radius(const Eigen::MatrixXd& points, int rounds,
                                 Rng& rng) {
    if (points.rows() < 2)
        throw PreconditionError("bootstrap_radius: need at least 2 points");
    if (rounds < 1)
        throw PreconditionError("bootstrap_radius: rounds must be >= 1");
    const Eigen::MatrixXd dist_sq = pairwise_sq(points);
    return MLFriendsRadius{std::sqrt(bootstrap_max_nn_sq(dist_sq, rounds, rng)),
                           rounds};
}

ClusterAssignment single_linkage_clusters(const Eigen::MatrixXd& points,
                                          double linking_radius) {
    if (!(linking_radius > 0.0))
        throw PreconditionError("single_linkage_clusters: radius must be > 0");
    return linkage_from_sq(pairwise_sq(points),
                           linking_radius * linking_radius);
}

std::pair<MLFriendsRadius, WhitenedSpace> compute_reference_radius(
    const Eigen::MatrixXd& live_points, int rounds, Rng& rng) {
    if (live_points.rows() < 2)
        throw PreconditionError(
            "compute_reference_radius: need at least 2 points");
    const double ellipsoid_scale =
        std::sqrt(static_cast<double>(live_points.cols()) + 2.0);

    WhitenedSpace pass1 = whitened_space_impl(live_points, std::nullopt);
    scale_space(pass1, 1.0 / ellipsoid_scale);
    const Eigen::MatrixXd dist1_sq =
        pairwise_sq(pass1.whiten_rows(live_points));
    const double r1_sq = bootstrap_max_nn_sq(dist1_sq, rounds, rng);

    const ClusterAssignment clusters = linkage_from_sq(dist1_sq, r1_sq);

    WhitenedSpace pass2 = whitened_space_impl(live_points, clusters);
    scale_space(pass2, 1.0 / ellipsoid_scale);
    const double r2_sq = bootstrap_max_nn_sq(
        pairwise_sq(pass2.whiten_rows(live_points)), rounds, rng);

    return {MLFriendsRadius{std::sqrt(r2_sq), rounds}, std::move(pass2)};
}

double mahalanobis_distance(const WhitenedSpace& space,
                            const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b) {
    if (a.size() != space.dim() || b.size() != space.dim())
        throw PreconditionError("mahalanobis_distance: dimension mismatch");
    return (space.transform * (a - b)).norm();
}

}  // namespace nestdiag
