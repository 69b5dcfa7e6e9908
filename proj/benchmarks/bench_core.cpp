#include <benchmark/benchmark.h>

#include "sparsect/fbp.hpp"
#include "sparsect/linsolve.hpp"
#include "sparsect/phantom.hpp"
#include "sparsect/projection.hpp"
#include "sparsect/regularizers.hpp"

using namespace sparsect;

namespace {

ProjectionOperator make_op(std::size_t side, std::size_t views) {
  return ProjectionOperator(side, side, make_angles(views), default_detector_count(side));
}

void BM_ProjectorForward(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const ProjectionOperator op = make_op(side, 8);
  const Image2D img = gen_phantom(PhantomKind::SheppLogan, side, 0);
  for (auto _ : state) benchmark::DoNotOptimize(op.forward(img));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(8 * op.n_det()));
}
BENCHMARK(BM_ProjectorForward)->Arg(64)->Arg(128)->Arg(256);

void BM_ProjectorAdjoint(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const ProjectionOperator op = make_op(side, 8);
  const Sinogram sino = op.forward(gen_phantom(PhantomKind::SheppLogan, side, 0));
  for (auto _ : state) benchmark::DoNotOptimize(op.adjoint(sino));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(8 * op.n_det()));
}
BENCHMARK(BM_ProjectorAdjoint)->Arg(64)->Arg(128)->Arg(256);

void BM_Fbp(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const ProjectionOperator op = make_op(side, 8);
  const Sinogram sino = op.forward(gen_phantom(PhantomKind::SheppLogan, side, 0));
  for (auto _ : state) benchmark::DoNotOptimize(fbp_reconstruct(sino, side, side));
}
BENCHMARK(BM_Fbp)->Arg(64)->Arg(128)->Arg(256);

// x-step solve to 1e-6, plain CG vs circulant-preconditioned PCG.
void BM_XStepSolve(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const bool precond = state.range(1) != 0;
  const ProjectionOperator op = make_op(side, 8);
  const Sinogram sino = op.forward(gen_phantom(PhantomKind::SheppLogan, side, 0));
  const Image2D rhs = op.adjoint(sino);
  const Image2D x0(side, side, 0.0);
  const XStepOperator xop(&op, 10.0, 10.0, 1.0, side, side);
  const CirculantPreconditioner pre(side, side, estimate_ata_scale(op), 10.0, 10.0, 1.0);
  std::size_t iters = 0;
  for (auto _ : state) {
    const PcgResult r = pcg_solve(xop, rhs, x0, 10000, 1e-6, precond ? &pre : nullptr);
    iters = r.iterations;
    benchmark::DoNotOptimize(r.x.data.data());
  }
  state.counters["iterations"] = static_cast<double>(iters);
}
BENCHMARK(BM_XStepSolve)
    ->ArgsProduct({{64, 128}, {0, 1}})
    ->ArgNames({"side", "precond"});

void BM_Svt(benchmark::State& state) {
  const std::size_t side = static_cast<std::size_t>(state.range(0));
  const Image2D img = gen_phantom(PhantomKind::SheppLogan, side, 0);
  const PatchLayout layout(16, 16, 16, 16, side, side);
  const PatchMatrix m = patch_unfold(img, layout);
  for (auto _ : state) benchmark::DoNotOptimize(svt(m, 0.02));
}
BENCHMARK(BM_Svt)->Arg(64)->Arg(128)->Arg(256);

}  // namespace

BENCHMARK_MAIN();
