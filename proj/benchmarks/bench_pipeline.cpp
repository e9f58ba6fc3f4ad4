#include <benchmark/benchmark.h>

#include "prekahler/connection.hpp"
#include "prekahler/domain.hpp"
#include "prekahler/parse.hpp"
#include "prekahler/prekahler.hpp"
#include "prekahler/wirtinger.hpp"

using namespace pk;

static void BM_ParseFlat(benchmark::State& st) {
  const std::string text = builtin_potential("flat").text;
  for (auto _ : st) benchmark::DoNotOptimize(parse_expr(text));
}
BENCHMARK(BM_ParseFlat);

static void BM_Jet(benchmark::State& st) {
  Potential p = builtin_potential("envelope");
  Point q;
  q.z1 = cplx(0.1, 0.2);
  for (auto _ : st) benchmark::DoNotOptimize(jet(p.rho, q, static_cast<int>(st.range(0))));
}
BENCHMARK(BM_Jet)->DenseRange(2, 5);

static void BM_TapeEval(benchmark::State& st) {
  Potential p = builtin_potential("envelope");
  ClosedForms cf = structure_functions(p.rho);
  Tape t({cf.T1, cf.T2});
  auto pts = p.domain.sample(64);
  std::size_t i = 0;
  for (auto _ : st) benchmark::DoNotOptimize(t.eval(pts[i++ % pts.size()]));
  st.counters["instructions"] = static_cast<double>(t.size());
}
BENCHMARK(BM_TapeEval);

static void BM_Analyze(benchmark::State& st) {
  Potential p = builtin_potential("homog", {{"a", 3.0}});
  auto pts = p.domain.sample(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(analyze(p.rho, pts, p.domain.params));
}
BENCHMARK(BM_Analyze)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_FromPrekahler(benchmark::State& st) {
  Potential p = builtin_potential("homog", {{"a", 0.5}});
  auto pts = p.domain.sample(16);
  for (auto _ : st) benchmark::DoNotOptimize(from_prekahler(p.rho, pts, p.domain.params));
}
BENCHMARK(BM_FromPrekahler)->Unit(benchmark::kMillisecond);

static void BM_RandomConnection(benchmark::State& st) {
  ChristoffelInput ci = random_christoffel(1, static_cast<int>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(connection_data(frame_from_christoffel(ci.gamma, ci.sigma)));
}
BENCHMARK(BM_RandomConnection)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
