#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gddim/approximator.hpp"
#include "gddim/metrics.hpp"
#include "gddim/noise_family.hpp"
#include "gddim/oracle.hpp"
#include "gddim/sampler.hpp"
#include "gddim/trainer.hpp"

namespace {

gddim::Points random_points(Eigen::Index n, Eigen::Index d, std::uint64_t seed) {
  std::mt19937_64 eng(seed);
  std::normal_distribution<double> n01;
  gddim::Points p(n, d);
  for (Eigen::Index i = 0; i < p.size(); ++i) p.data()[i] = n01(eng);
  return p;
}

void BM_SampleStandard(benchmark::State& state) {
  const auto kind = static_cast<gddim::FamilyKind::Tag>(state.range(0));
  const gddim::NoiseFamily fam({kind, kind == gddim::FamilyKind::Tag::StudentT ? 3.0 : 1.5});
  gddim::Rng rng(1);
  std::vector<double> out(4096);
  for (auto _ : state) {
    fam.sample(rng, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(out.size()));
  state.SetLabel(fam.kind().name());
}
BENCHMARK(BM_SampleStandard)->DenseRange(0, 4);

void BM_TrainStep(benchmark::State& state) {
  const auto net = gddim::Approximator::initialized(gddim::Architecture{}, 1);
  const auto sched = gddim::Schedule::build(gddim::ScheduleKind::Linear, 1000);
  const gddim::NoiseFamily fam(gddim::FamilyKind::gaussian());
  const gddim::Points x0 = random_points(state.range(0), 2, 2);
  std::vector<double> grad(net.parameter_count());
  gddim::Approximator::Tape tape;
  gddim::Rng rng(3);
  for (auto _ : state) {
    benchmark::DoNotOptimize(gddim::mom_loss(net, x0, sched, fam, rng, true, grad, tape));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_TrainStep)->Arg(64)->Arg(256);

void BM_NetReverseStep(benchmark::State& state) {
  const auto net = gddim::Approximator::initialized(gddim::Architecture{}, 1);
  const auto sched = gddim::Schedule::build(gddim::ScheduleKind::Cosine, 1000);
  const gddim::NoiseFamily fam(gddim::FamilyKind::laplace());
  const gddim::NetMomentSource src(net, sched);
  gddim::Points x = random_points(state.range(0), 2, 4);
  std::vector<gddim::Rng> rngs;
  for (Eigen::Index i = 0; i < x.rows(); ++i) rngs.push_back(gddim::Rng::stream(5, static_cast<std::uint64_t>(i)));
  for (auto _ : state) {
    gddim::reverse_step(x, 500, 490, sched, fam, src, gddim::SampleMode::MeanAndVariance, rngs);
    x = x.cwiseMax(-5.0).cwiseMin(5.0);
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_NetReverseStep)->Arg(1024)->Arg(10000);

void BM_OracleMoments(benchmark::State& state) {
  const auto sched = gddim::Schedule::build(gddim::ScheduleKind::Linear, 1000);
  const gddim::NoiseFamily fam(gddim::FamilyKind::gaussian());
  const gddim::AtomicDistribution dist(random_points(state.range(0), 2, 6));
  const std::vector<double> x{0.3, -0.2};
  for (auto _ : state) benchmark::DoNotOptimize(gddim::oracle_moments(dist, x, 300, sched, fam));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_OracleMoments)->Arg(2)->Arg(256);

void BM_SlicedWasserstein(benchmark::State& state) {
  const gddim::Points a = random_points(state.range(0), 2, 7);
  const gddim::Points b = random_points(state.range(0), 2, 8);
  for (auto _ : state) benchmark::DoNotOptimize(gddim::sliced_wasserstein(a, b, gddim::kDefaultProjections, 0));
}
BENCHMARK(BM_SlicedWasserstein)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_EnergyDistance(benchmark::State& state) {
  const gddim::Points a = random_points(state.range(0), 2, 7);
  const gddim::Points b = random_points(state.range(0), 2, 8);
  for (auto _ : state) benchmark::DoNotOptimize(gddim::energy_distance(a, b));
}
BENCHMARK(BM_EnergyDistance)->Arg(1000)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
