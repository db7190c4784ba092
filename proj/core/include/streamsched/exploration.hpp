#pragma once

#include "streamsched/knn_action.hpp"
#include "streamsched/rng.hpp"

namespace streamsched {

/// With probability epsilon, adds independent U[0,1] noise to every entry of
/// the proto-action; otherwise returns it unchanged.
ProtoAction explore(const ProtoAction& proto, double epsilon, Rng& rng);

/// Linear decay from `initial` to `final_value` over `decay_epochs`, flat after.
struct EpsilonSchedule {
  double initial = 1.0;
  double final_value = 0.05;
  int decay_epochs = 1;

  double at(int epoch) const;
};

}  // namespace streamsched
