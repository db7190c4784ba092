#include "streamsched/exploration.hpp"

#include <algorithm>

#include "streamsched/error.hpp"

namespace streamsched {

ProtoAction explore(const ProtoAction& proto, double epsilon, Rng& rng) {
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "epsilon must be in [0, 1]");
  }
  if (epsilon == 0.0 || uniform01(rng) >= epsilon) return proto;
  ProtoAction noisy = proto;
  for (Eigen::Index j = 0; j < noisy.cols(); ++j) {
    for (Eigen::Index i = 0; i < noisy.rows(); ++i) noisy(i, j) += uniform01(rng);
  }
  return noisy;
}

double EpsilonSchedule::at(int epoch) const {
  if (decay_epochs <= 0 || epoch >= decay_epochs) return final_value;
  const double frac = static_cast<double>(std::max(epoch, 0)) / decay_epochs;
  return initial + (final_value - initial) * frac;
}

}  // namespace streamsched
