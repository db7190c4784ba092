#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "streamsched/topology.hpp"

namespace streamsched {

/// Continuous relaxation of a schedule: one row per thread, one column per
/// machine. Produced by the actor network and not itself feasible.
using ProtoAction = Eigen::MatrixXd;

struct KnnResult {
  std::vector<ScheduleMatrix> actions;
  std::vector<double> distances;  // squared Euclidean, nondecreasing
};

inline constexpr std::size_t kDefaultBruteForceCap = 4096;

/// ||a - proto||^2 summed row-major over every entry.
double squared_distance(const ScheduleMatrix& action, const ProtoAction& proto);

/// Number of feasible actions M^N, saturating at SIZE_MAX.
std::size_t action_space_size(int threads, int machines);

/// Per row, the machine with the largest proto entry (lowest index on ties).
ScheduleMatrix nearest_action(const ProtoAction& proto);

/// The K feasible actions closest to `proto`, nearest first; equal distances
/// are ordered lexicographically by assignment vector. Exact: rows decompose,
/// so this is a best-first K-smallest-sums search over per-row sorted costs.
/// Throws kKTooLarge when K exceeds M^N, kInvalidConfig when K < 1.
KnnResult k_nearest_actions(const ProtoAction& proto, std::size_t k);

/// Exhaustive oracle for k_nearest_actions. Throws kSpaceTooLarge when M^N
/// exceeds `cap`.
KnnResult brute_force_knn(const ProtoAction& proto, std::size_t k,
                          std::size_t cap = kDefaultBruteForceCap);

}  // namespace streamsched
