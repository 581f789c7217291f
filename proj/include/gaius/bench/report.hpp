#pragma once

#include "gaius/bench/corpus.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace gaius::bench {

// Label of a row: "html" or "maml-<fidelity>".
std::string row_label(const VariantRow& row);

// Fractional reductions (html - maml) / html of one maml row against the html
// row of its page. A zero html value gives a zero reduction.
struct PageReduction {
    std::string page;
    policy::Fidelity fidelity = policy::Fidelity::high;
    double requests = 0;
    double size = 0;
    double plt = 0;
};

// Throws Error(invalid_argument) when a maml row has no html row for its page.
std::vector<PageReduction> page_reductions(const BenchReport& report);

struct VariantStats {
    std::string label;
    std::size_t pages = 0;
    double median_plt_s = 0;
    double p90_plt_s = 0;
    double median_size_bytes = 0;
    double median_requests = 0;
};

struct ReductionStats {
    policy::Fidelity fidelity = policy::Fidelity::high;
    double median_requests = 0;
    double median_size = 0;
    double median_plt = 0;
    double min_plt = 0;
    bool faster_on_every_page = false;
};

struct BenchSummary {
    std::string corpus_id;
    std::string model_id;
    std::size_t pages = 0;
    std::vector<VariantStats> variants;      // html first, then maml low to high
    std::vector<ReductionStats> reductions;  // low to high
};

// Throws Error(empty_corpus) for a report without rows.
BenchSummary summarize(const BenchReport& report);

// The corpus thresholds: median request, size and PLT reductions at high
// fidelity, and MAML loading faster than HTML on every page at every
// evaluated fidelity.
struct ThresholdCheck {
    std::string name;
    double value = 0;
    double threshold = 0;
    bool pass = false;
};

std::vector<ThresholdCheck> check_thresholds(const BenchSummary& summary);

// Columns page,variant,fidelity,plt_s,size_bytes,requests; the fidelity cell
// is empty on html rows.
std::string write_csv(const BenchReport& report);
// Inverse of write_csv; ids are left empty. Throws Error(parse_failure).
BenchReport read_csv(std::string_view text);

std::string summary_json(const BenchSummary& summary);
std::string summary_markdown(const BenchSummary& summary);

struct CdfSeries {
    std::string label;
    std::vector<double> values;
};

// Empirical CDF plot of each series as a standalone SVG document.
std::string cdf_svg(std::string_view title, std::string_view x_label, const std::vector<CdfSeries>& series);

// Writes pages.csv, summary.json, summary.md, cdf_plt.svg, cdf_size.svg,
// cdf_requests.svg and cdf_reduction.svg into out_dir, creating it if needed.
// Throws Error(empty_corpus) or Error(io_error).
void emit_report(const BenchReport& report, const std::filesystem::path& out_dir);

}  // namespace gaius::bench
