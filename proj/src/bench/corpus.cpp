#include "gaius/bench/corpus.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/convert/html_convert.hpp"
#include "gaius/maml/codec.hpp"
#include "gaius/maml/geometry.hpp"
#include "gaius/policy/transcode.hpp"

#include <algorithm>

namespace gaius::bench {

namespace fs = std::filesystem;

std::vector<CorpusPage> load_corpus(const fs::path& dir) {
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error(Errc::empty_corpus, "corpus directory " + dir.string() + " not found");
    std::vector<fs::path> dirs;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_directory() && fs::is_regular_file(entry.path() / "manifest.json")) dirs.push_back(entry.path());
    }
    if (dirs.empty()) throw Error(Errc::empty_corpus, "no snapshots under " + dir.string());
    std::sort(dirs.begin(), dirs.end());
    std::vector<CorpusPage> out;
    for (const auto& d : dirs) {
        CorpusPage page;
        page.name = d.filename().string();
        page.snapshot = convert::load_snapshot(d);
        if (fs::is_regular_file(d / "maml.json")) {
            page.maml = maml::parse_page(read_file(d / "maml.json"));
        } else {
            page.maml = convert::convert_html(page.snapshot).page;
        }
        out.push_back(std::move(page));
    }
    return out;
}

namespace {

std::uint64_t image_size(const convert::Resource& r, policy::Fidelity f, const policy::FidelityProfile& profile) {
    if (!r.body) return r.byte_size;
    try {
        return policy::transcode_image(*r.body, f, profile, "bench").bytes.size();
    } catch (const Error& e) {
        // Formats the transcoder does not handle are served as captured.
        if (e.code() == Errc::unsupported_image_format) return r.byte_size;
        throw;
    }
}

}  // namespace

maml::MediaSizes maml_media_sizes(const CorpusPage& page, policy::Fidelity f, const policy::FidelityProfile& profile) {
    maml::MediaSizes sizes;
    const auto& snap = page.snapshot;
    for (const auto& obj : page.maml.objects) {
        const std::string* url = maml::media_url(obj);
        if (url == nullptr || sizes.contains(*url)) continue;
        const auto idx = snap.find(*url);
        if (!idx) throw Error(Errc::missing_media_size, "media url " + *url + " is not in the snapshot");
        const auto& r = snap.resources[*idx];
        std::uint64_t bytes = 0;
        if (r.is_video()) {
            if (profile.at(f).video_allowed) {
                bytes = r.byte_size;
            } else if (r.poster) {
                if (const auto p = snap.find(*r.poster)) bytes = image_size(snap.resources[*p], f, profile);
            }
        } else {
            bytes = image_size(r, f, profile);
        }
        sizes.emplace(*url, bytes);
    }
    return sizes;
}

std::vector<VariantRow> evaluate_page(const CorpusPage& page, const NetworkModel& model,
                                      const std::vector<policy::Fidelity>& fidelities,
                                      const policy::FidelityProfile& profile) {
    std::vector<VariantRow> rows;
    rows.push_back(VariantRow{page.name, "html", std::nullopt, simulate_plt(html_graph(page.snapshot), model),
                              page.snapshot.total_bytes(), page.snapshot.resources.size()});
    std::vector<policy::Fidelity> order{policy::Fidelity::high};
    for (auto f : policy::kAllFidelities) {
        if (f != policy::Fidelity::high && std::find(fidelities.begin(), fidelities.end(), f) != fidelities.end()) {
            order.push_back(f);
        }
    }
    for (auto f : order) {
        const auto sizes = maml_media_sizes(page, f, profile);
        rows.push_back(VariantRow{page.name, "maml", f, simulate_plt(maml_graph(page.maml, sizes), model),
                                  maml::page_weight(page.maml, sizes), maml::request_count(page.maml)});
    }
    return rows;
}

BenchReport run_corpus(const std::vector<CorpusPage>& corpus, const NetworkModel& model,
                       const std::vector<policy::Fidelity>& fidelities, Execution exec,
                       const policy::FidelityProfile& profile, std::string corpus_id) {
    if (corpus.empty()) throw Error(Errc::empty_corpus, "corpus has no pages");
    model.check();
    std::vector<std::vector<VariantRow>> per_page(corpus.size());
    if (exec == Execution::serial) {
        for (std::size_t i = 0; i < corpus.size(); ++i) per_page[i] = evaluate_page(corpus[i], model, fidelities, profile);
    } else {
        std::vector<std::exception_ptr> errors(corpus.size());
        const auto n = static_cast<long>(corpus.size());
#pragma omp parallel for schedule(dynamic, 1)
        for (long i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            try {
                per_page[k] = evaluate_page(corpus[k], model, fidelities, profile);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
        for (const auto& e : errors) {
            if (e) std::rethrow_exception(e);
        }
    }
    BenchReport report;
    report.corpus_id = std::move(corpus_id);
    report.model_id = model.id();
    for (auto& rows : per_page) {
        for (auto& r : rows) report.rows.push_back(std::move(r));
    }
    return report;
}

BenchReport run_corpus(const fs::path& dir, const NetworkModel& model, const std::vector<policy::Fidelity>& fidelities,
                       Execution exec, const policy::FidelityProfile& profile) {
    auto name = dir.lexically_normal();
    if (name.filename().empty()) name = name.parent_path();
    return run_corpus(load_corpus(dir), model, fidelities, exec, profile, name.filename().string());
}

}  // namespace gaius::bench
