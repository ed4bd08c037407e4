// Serial vs OpenMP sup-error sweeps over the same nets.

#include <benchmark/benchmark.h>

#include <cmath>

#include "silunet/constructors.hpp"
#include "silunet/kernels.hpp"
#include "silunet/stepfun.hpp"

namespace {

double square_target(std::span<const double> x) { return x[0] * x[0]; }
double product_target(std::span<const double> x) { return x[0] * x[1]; }

void BM_SupErrorSquareSerial(benchmark::State& state) {
  const auto net = silunet::build_square({0.0, 0.27, 3, 1.0});
  const auto box = silunet::Box::interval(-1, 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(silunet::sup_error_serial(net, square_target, box, n).sup_error);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SupErrorSquareOmp(benchmark::State& state) {
  const auto net = silunet::build_square({0.0, 0.27, 3, 1.0});
  const auto box = silunet::Box::interval(-1, 1);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(silunet::sup_error(net, square_target, box, n).sup_error);
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_SupErrorProductSerial(benchmark::State& state) {
  const auto net = silunet::build_product(0.0, 0.27, 3);
  const auto box = silunet::Box::cube(2, 1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(silunet::sup_error_serial(net, product_target, box, n).sup_error);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

void BM_SupErrorProductOmp(benchmark::State& state) {
  const auto net = silunet::build_product(0.0, 0.27, 3);
  const auto box = silunet::Box::cube(2, 1.0);
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(silunet::sup_error(net, product_target, box, n).sup_error);
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}

// A wide step net: many bumps per evaluation.
void BM_StepNetOmp(benchmark::State& state) {
  auto f = [](double x) { return std::sin(3.0 * x); };
  const auto ca = silunet::build_continuous_approx(f, -1.0, 1.0,
                                                   silunet::ModulusSpec::lipschitz(3.0), 0.05);
  const auto box = silunet::Box::interval(-1, 1);
  const silunet::ScalarField target = [f](std::span<const double> x) { return f(x[0]); };
  for (auto _ : state)
    benchmark::DoNotOptimize(
        silunet::sup_error(ca.step.net, target, box, 10001, ca.step.bands).sup_error);
}

}  // namespace

BENCHMARK(BM_SupErrorSquareSerial)->Arg(10001)->Arg(100001);
BENCHMARK(BM_SupErrorSquareOmp)->Arg(10001)->Arg(100001);
BENCHMARK(BM_SupErrorProductSerial)->Arg(201)->Arg(801);
BENCHMARK(BM_SupErrorProductOmp)->Arg(201)->Arg(801);
BENCHMARK(BM_StepNetOmp);

BENCHMARK_MAIN();
