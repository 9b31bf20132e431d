#pragma once

#include <Eigen/Core>

#include <optional>
#include <utility>
#include <vector>

#include "nestdiag/core.hpp"

namespace nestdiag {

/// Affine map from unit-cube coordinates to decorrelated coordinates:
/// y = transform * (u - mean). transform * inverse_transform = I.
struct WhitenedSpace {
    Eigen::VectorXd mean;
    Eigen::MatrixXd transform;
    Eigen::MatrixXd inverse_transform;

    int dim() const { return static_cast<int>(mean.size()); }

    Eigen::VectorXd whiten(const Eigen::VectorXd& u) const {
        return transform * (u - mean);
    }

    /// Whiten a stack of points (one per row).
    Eigen::MatrixXd whiten_rows(const Eigen::MatrixXd& points) const;
};

/// Partition of a point set into connected components.
struct ClusterAssignment {
    std::vector<int> labels;
    int num_clusters = 0;
};

/// Bootstrapped maximum nearest-neighbour distance among live points.
struct MLFriendsRadius {
    double r = 0.0;
    int bootstrap_rounds = 0;
};

/// Whitening transform from the sample covariance of `points` (one per
/// row). With a cluster assignment, each point is centered on its own
/// cluster mean before the pooled covariance estimate, so multi-modal
/// sets are whitened by their within-cluster shape.
///
/// The covariance diagonal is regularized by eps*trace/d with eps
/// escalating from 1e-10 to 1e-6 before giving up.
WhitenedSpace build_whitened_space(
    const Eigen::MatrixXd& points,
    const std::optional<ClusterAssignment>& clusters = std::nullopt);

/// Out-of-bag bootstrap of the maximum nearest-neighbour distance:
/// each round resamples n indices with replacement as the training set,
/// never-selected points form the test set (empty test sets are redrawn),
/// and r is the max over rounds of the max over test points of the
/// distance to the nearest training point.
MLFriendsRadius bootstrap_radius(const Eigen::MatrixXd& points, int rounds,
                                 Rng& rng);

/// Transitive closure of "pairwise distance <= linking_radius".
ClusterAssignment single_linkage_clusters(const Eigen::MatrixXd& points,
                                          double linking_radius);

/// Two-pass MLFriends reference radius. Pass 1 whitens without clusters
/// and bootstraps a radius; pass 2 clusters at that radius, re-whitens
/// cluster-aware, and bootstraps again. Distances are measured in
/// ellipsoid-normalized whitened coordinates (the covariance whitening
/// scaled by 1/sqrt(d+2)), so r = 1 corresponds to the surface of the
/// data ellipsoid. The returned space uses the same units, making jump
/// distances directly comparable to r.
std::pair<MLFriendsRadius, WhitenedSpace> compute_reference_radius(
    const Eigen::MatrixXd& live_points, int rounds, Rng& rng);

/// Euclidean distance between the whitened images of a and b.
double mahalanobis_distance(const WhitenedSpace& space,
                            const Eigen::VectorXd& a,
                            const Eigen::VectorXd& b);

/// Stack unit points into an n-by-d matrix, one point per row.
Eigen::MatrixXd stack_points(const std::vector<UnitPoint>& points);

}  // namespace nestdiag
