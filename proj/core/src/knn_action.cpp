#include "streamsched/knn_action.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <queue>

#include "streamsched/error.hpp"

namespace streamsched {
namespace {

void check_proto(const ProtoAction& proto) {
  if (proto.rows() < 1 || proto.cols() < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "proto-action must be at least 1x1");
  }
  if (!proto.allFinite()) throw Error(ErrorCode::kDimensionMismatch, "proto-action is not finite");
}

struct Candidate {
  ScheduleMatrix action;
  double distance;
};

void sort_candidates(std::vector<Candidate>& c) {
  std::sort(c.begin(), c.end(), [](const Candidate& a, const Candidate& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.action < b.action;
  });
}

KnnResult to_result(std::vector<Candidate>&& candidates, std::size_t k) {
  KnnResult r;
  r.actions.reserve(k);
  r.distances.reserve(k);
  for (std::size_t i = 0; i < k && i < candidates.size(); ++i) {
    r.actions.push_back(std::move(candidates[i].action));
    r.distances.push_back(candidates[i].distance);
  }
  return r;
}

void check_k(std::size_t k, std::size_t space) {
  if (k < 1) throw Error(ErrorCode::kInvalidConfig, "K must be >= 1");
  if (k > space) {
    throw Error(ErrorCode::kKTooLarge,
                "K=" + std::to_string(k) + " exceeds action space size " + std::to_string(space));
  }
}

}  // namespace

double squared_distance(const ScheduleMatrix& action, const ProtoAction& proto) {
  if (action.threads() != proto.rows() || action.machines() != proto.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "action and proto-action shapes differ");
  }
  double sum = 0.0;
  for (Eigen::Index i = 0; i < proto.rows(); ++i) {
    const int chosen = action.machine_of(static_cast<int>(i));
    for (Eigen::Index j = 0; j < proto.cols(); ++j) {
      const double d = (j == chosen ? 1.0 : 0.0) - proto(i, j);
      sum += d * d;
    }
  }
  return sum;
}

std::size_t action_space_size(int threads, int machines) {
  std::size_t size = 1;
  const auto m = static_cast<std::size_t>(machines);
  for (int i = 0; i < threads; ++i) {
    if (m != 0 && size > std::numeric_limits<std::size_t>::max() / m) {
      return std::numeric_limits<std::size_t>::max();
    }
    size *= m;
  }
  return size;
}

ScheduleMatrix nearest_action(const ProtoAction& proto) {
  check_proto(proto);
  std::vector<int> assignment(static_cast<std::size_t>(proto.rows()));
  for (Eigen::Index i = 0; i < proto.rows(); ++i) {
    Eigen::Index best = 0;
    for (Eigen::Index j = 1; j < proto.cols(); ++j) {
      if (proto(i, j) > proto(i, best)) best = j;
    }
    assignment[static_cast<std::size_t>(i)] = static_cast<int>(best);
  }
  return ScheduleMatrix(std::move(assignment), static_cast<int>(proto.cols()));
}

KnnResult k_nearest_actions(const ProtoAction& proto, std::size_t k) {
  check_proto(proto);
  const auto n = static_cast<std::size_t>(proto.rows());
  const auto m = static_cast<std::size_t>(proto.cols());
  check_k(k, action_space_size(static_cast<int>(n), static_cast<int>(m)));

  // Row cost of choosing machine j: ||proto_i||^2 - 2 proto_ij + 1.
  std::vector<std::vector<std::pair<double, int>>> row_costs(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto row = proto.row(static_cast<Eigen::Index>(i));
    const double norm2 = row.squaredNorm();
    auto& costs = row_costs[i];
    costs.reserve(m);
    for (std::size_t j = 0; j < m; ++j) {
      costs.emplace_back(norm2 - 2.0 * row(static_cast<Eigen::Index>(j)) + 1.0,
                         static_cast<int>(j));
    }
    std::sort(costs.begin(), costs.end());
  }

  // Visit rows in order of increasing gap between their best and second-best
  // choice. With that order, "shift the only bump one row later" never lowers
  // the cost, so every child is at least as expensive as its parent.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto gap = [&](std::size_t i) {
    return m > 1 ? row_costs[i][1].first - row_costs[i][0].first
                 : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return gap(a) < gap(b); });

  struct Node {
    double cost;
    std::uint64_t seq;
    std::vector<std::uint16_t> rank;  // indexed by position in `order`
    std::ptrdiff_t last;              // last position with a nonzero rank
  };
  auto later = [](const Node& a, const Node& b) {
    if (a.cost != b.cost) return a.cost > b.cost;
    return a.seq > b.seq;
  };
  std::priority_queue<Node, std::vector<Node>, decltype(later)> frontier(later);
  std::uint64_t seq = 0;

  auto cost_at = [&](std::size_t pos, std::uint16_t r) { return row_costs[order[pos]][r].first; };

  Node root{0.0, seq++, std::vector<std::uint16_t>(n, 0), -1};
  for (std::size_t i = 0; i < n; ++i) root.cost += row_costs[i][0].first;
  frontier.push(std::move(root));

  auto materialize = [&](const Node& node) {
    std::vector<int> assignment(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
      assignment[order[pos]] = row_costs[order[pos]][node.rank[pos]].second;
    }
    ScheduleMatrix action(std::move(assignment), static_cast<int>(m));
    const double d = squared_distance(action, proto);
    return Candidate{std::move(action), d};
  };

  std::vector<Candidate> found;
  double cutoff = std::numeric_limits<double>::infinity();
  while (!frontier.empty()) {
    Node node = frontier.top();
    if (found.size() >= k && node.cost > cutoff) break;
    frontier.pop();

    // Successors: bump the last row's rank, shift a rank-1 bump to the next
    // row, or add a rank-1 bump on the next row. Each state has one parent.
    const auto q = node.last;
    if (q >= 0) {
      const auto pos = static_cast<std::size_t>(q);
      if (node.rank[pos] + 1u < m) {
        Node child{node.cost - cost_at(pos, node.rank[pos]) + cost_at(pos, node.rank[pos] + 1),
                   seq++, node.rank, q};
        ++child.rank[pos];
        frontier.push(std::move(child));
      }
      if (pos + 1 < n && m > 1) {
        if (node.rank[pos] == 1) {
          Node shift{node.cost - cost_at(pos, 1) + cost_at(pos, 0) - cost_at(pos + 1, 0) +
                         cost_at(pos + 1, 1),
                     seq++, node.rank, q + 1};
          shift.rank[pos] = 0;
          shift.rank[pos + 1] = 1;
          frontier.push(std::move(shift));
        }
        Node add{node.cost - cost_at(pos + 1, 0) + cost_at(pos + 1, 1), seq++, node.rank, q + 1};
        add.rank[pos + 1] = 1;
        frontier.push(std::move(add));
      }
    } else if (m > 1) {
      Node first{node.cost - cost_at(0, 0) + cost_at(0, 1), seq++, node.rank, 0};
      first.rank[0] = 1;
      frontier.push(std::move(first));
    }

    found.push_back(materialize(node));
    if (found.size() == k) {
      // Keep draining near-ties of the K-th cost so the final ordering can
      // apply the lexicographic tie rule over all of them.
      cutoff = node.cost + 1e-9 * std::max(1.0, std::abs(node.cost));
    }
  }

  sort_candidates(found);
  return to_result(std::move(found), k);
}

KnnResult brute_force_knn(const ProtoAction& proto, std::size_t k, std::size_t cap) {
  check_proto(proto);
  const auto n = static_cast<std::size_t>(proto.rows());
  const int m = static_cast<int>(proto.cols());
  const std::size_t space = action_space_size(static_cast<int>(n), m);
  if (space > cap) {
    throw Error(ErrorCode::kSpaceTooLarge, "action space " + std::to_string(space) +
                                               " exceeds brute-force cap " + std::to_string(cap));
  }
  check_k(k, space);

  std::vector<Candidate> all;
  all.reserve(space);
  std::vector<int> assignment(n, 0);
  for (std::size_t idx = 0; idx < space; ++idx) {
    ScheduleMatrix action(assignment, m);
    const double d = squared_distance(action, proto);
    all.push_back({std::move(action), d});
    // Odometer increment, last row fastest.
    for (std::size_t pos = n; pos-- > 0;) {
      if (++assignment[pos] < m) break;
      assignment[pos] = 0;
    }
  }
  sort_candidates(all);
  return to_result(std::move(all), k);
}

}  // namespace streamsched
