#pragma once

#include "gaius/bench/plt.hpp"
#include "gaius/convert/snapshot.hpp"
#include "gaius/maml/types.hpp"
#include "gaius/policy/fidelity.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace gaius::bench {

// One corpus entry: a captured snapshot and its frozen MAML conversion.
struct CorpusPage {
    std::string name;  // directory name
    convert::HtmlPageSnapshot snapshot;
    maml::Page maml;
};

// Every subdirectory holding a manifest.json, in name order. The frozen
// conversion is read from maml.json; a page without one is converted on load.
// Throws Error(empty_corpus) when nothing is found.
std::vector<CorpusPage> load_corpus(const std::filesystem::path& dir);

struct VariantRow {
    std::string page;
    std::string variant;  // "html" or "maml"
    std::optional<policy::Fidelity> fidelity;  // set for maml rows
    double plt_s = 0;
    std::uint64_t size_bytes = 0;
    std::uint64_t requests = 0;

    friend bool operator==(const VariantRow&, const VariantRow&) = default;
};

struct BenchReport {
    std::string corpus_id;
    std::string model_id;
    // Per page: the html row, maml at high, then the other requested
    // fidelities from low to high.
    std::vector<VariantRow> rows;

    friend bool operator==(const BenchReport&, const BenchReport&) = default;
};

// Byte size of a snapshot image at a fidelity: the transcoded JPEG when the
// body was captured, else the declared size. Videos keep their size except at
// a fidelity without video, where the poster image stands in.
maml::MediaSizes maml_media_sizes(const CorpusPage& page, policy::Fidelity f, const policy::FidelityProfile& profile);

// Rows for one page. This is the per-page kernel run_corpus distributes.
std::vector<VariantRow> evaluate_page(const CorpusPage& page, const NetworkModel& model,
                                      const std::vector<policy::Fidelity>& fidelities,
                                      const policy::FidelityProfile& profile = {});

enum class Execution { serial, parallel };

// Evaluates every page; the parallel form distributes pages over OpenMP
// threads and yields the same report as the serial one.
// Throws Error(empty_corpus).
BenchReport run_corpus(const std::vector<CorpusPage>& corpus, const NetworkModel& model,
                       const std::vector<policy::Fidelity>& fidelities, Execution exec = Execution::parallel,
                       const policy::FidelityProfile& profile = {}, std::string corpus_id = "corpus");
BenchReport run_corpus(const std::filesystem::path& dir, const NetworkModel& model,
                       const std::vector<policy::Fidelity>& fidelities, Execution exec = Execution::parallel,
                       const policy::FidelityProfile& profile = {});

}  // namespace gaius::bench
