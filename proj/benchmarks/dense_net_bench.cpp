#include <benchmark/benchmark.h>

#include "streamsched/dense_net.hpp"

namespace {

void BM_ForwardBatch(benchmark::State& state) {
  const int in = static_cast<int>(state.range(0));
  streamsched::Rng rng(3);
  const auto net = streamsched::DenseNet::make(in, {64, 32}, 1, streamsched::Activation::kIdentity, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(in, 32);
  for (auto _ : state) benchmark::DoNotOptimize(streamsched::forward_batch(net, x));
}
BENCHMARK(BM_ForwardBatch)->Arg(81)->Arg(2001)->Unit(benchmark::kMicrosecond);

void BM_Backward(benchmark::State& state) {
  const int in = static_cast<int>(state.range(0));
  streamsched::Rng rng(4);
  const auto net = streamsched::DenseNet::make(in, {64, 32}, 1, streamsched::Activation::kIdentity, rng);
  const Eigen::MatrixXd x = Eigen::MatrixXd::Random(in, 32);
  const Eigen::MatrixXd up = Eigen::MatrixXd::Ones(1, 32);
  for (auto _ : state) benchmark::DoNotOptimize(streamsched::backward(net, x, up));
}
BENCHMARK(BM_Backward)->Arg(81)->Arg(2001)->Unit(benchmark::kMicrosecond);

}  // namespace
