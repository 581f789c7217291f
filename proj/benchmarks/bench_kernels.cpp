#include "gaius/bench/corpus.hpp"
#include "gaius/bench/plt.hpp"

#include <benchmark/benchmark.h>

#include <filesystem>

using namespace gaius;
using namespace gaius::bench;

namespace {

const std::vector<CorpusPage>& corpus() {
    static const auto pages = load_corpus(std::filesystem::path(GAIUS_FIXTURES_DIR) / "corpus");
    return pages;
}

const std::vector<policy::Fidelity> kAll{policy::Fidelity::low, policy::Fidelity::medium, policy::Fidelity::high};

void run_corpus_kernel(benchmark::State& state, Execution exec) {
    const auto& pages = corpus();
    for (auto _ : state) {
        auto report = run_corpus(pages, NetworkModel{}, kAll, exec);
        benchmark::DoNotOptimize(report.rows.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(pages.size()));
}

void BM_RunCorpusSerial(benchmark::State& state) { run_corpus_kernel(state, Execution::serial); }
void BM_RunCorpusParallel(benchmark::State& state) { run_corpus_kernel(state, Execution::parallel); }

void BM_SimulateHtmlPage(benchmark::State& state) {
    const auto graph = html_graph(corpus().front().snapshot);
    for (auto _ : state) benchmark::DoNotOptimize(simulate_plt(graph, NetworkModel{}));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(graph.nodes.size()));
}

}  // namespace

BENCHMARK(BM_RunCorpusSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_RunCorpusParallel)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SimulateHtmlPage)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
