#include "gaius/bench/report.hpp"

#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/common/numfmt.hpp"
#include "gaius/common/stats.hpp"

#include <boost/tokenizer.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

namespace gaius::bench {

namespace fs = std::filesystem;

std::string row_label(const VariantRow& row) {
    if (!row.fidelity) return row.variant;
    return row.variant + "-" + std::string(policy::fidelity_name(*row.fidelity));
}

namespace {

double reduction(double html, double maml) { return html == 0 ? 0.0 : (html - maml) / html; }

std::vector<double> column(const std::vector<const VariantRow*>& rows, double (*get)(const VariantRow&)) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto* r : rows) out.push_back(get(*r));
    return out;
}

double plt_of(const VariantRow& r) { return r.plt_s; }
double size_of(const VariantRow& r) { return static_cast<double>(r.size_bytes); }
double requests_of(const VariantRow& r) { return static_cast<double>(r.requests); }

// Rows grouped by label, html first and maml from low to high.
std::vector<std::pair<std::string, std::vector<const VariantRow*>>> by_label(const BenchReport& report) {
    std::map<int, std::pair<std::string, std::vector<const VariantRow*>>> groups;
    for (const auto& r : report.rows) {
        const int key = r.fidelity ? 1 + static_cast<int>(*r.fidelity) : 0;
        auto& g = groups[key];
        g.first = row_label(r);
        g.second.push_back(&r);
    }
    std::vector<std::pair<std::string, std::vector<const VariantRow*>>> out;
    for (auto& [k, g] : groups) out.push_back(std::move(g));
    return out;
}

}  // namespace

std::vector<PageReduction> page_reductions(const BenchReport& report) {
    std::map<std::string, const VariantRow*> html;
    for (const auto& r : report.rows) {
        if (!r.fidelity) html[r.page] = &r;
    }
    std::vector<PageReduction> out;
    for (const auto& r : report.rows) {
        if (!r.fidelity) continue;
        const auto it = html.find(r.page);
        if (it == html.end()) throw Error(Errc::invalid_argument, "page " + r.page + " has no html row");
        const auto& h = *it->second;
        out.push_back(PageReduction{r.page, *r.fidelity, reduction(requests_of(h), requests_of(r)),
                                    reduction(size_of(h), size_of(r)), reduction(h.plt_s, r.plt_s)});
    }
    return out;
}

BenchSummary summarize(const BenchReport& report) {
    if (report.rows.empty()) throw Error(Errc::empty_corpus, "report has no rows");
    BenchSummary s;
    s.corpus_id = report.corpus_id;
    s.model_id = report.model_id;
    for (auto& [label, rows] : by_label(report)) {
        auto plt = column(rows, plt_of);
        std::sort(plt.begin(), plt.end());
        s.variants.push_back(VariantStats{label, rows.size(), percentile(plt, 50), percentile(plt, 90),
                                          median(column(rows, size_of)), median(column(rows, requests_of))});
        s.pages = std::max(s.pages, rows.size());
    }
    const auto reductions = page_reductions(report);
    for (auto f : policy::kAllFidelities) {
        std::vector<double> req, size, plt;
        for (const auto& r : reductions) {
            if (r.fidelity != f) continue;
            req.push_back(r.requests);
            size.push_back(r.size);
            plt.push_back(r.plt);
        }
        if (plt.empty()) continue;
        ReductionStats st;
        st.fidelity = f;
        st.median_requests = median(req);
        st.median_size = median(size);
        st.median_plt = median(plt);
        st.min_plt = *std::min_element(plt.begin(), plt.end());
        st.faster_on_every_page = st.min_plt > 0;
        s.reductions.push_back(st);
    }
    return s;
}

std::vector<ThresholdCheck> check_thresholds(const BenchSummary& s) {
    const auto high = std::find_if(s.reductions.begin(), s.reductions.end(),
                                   [](const auto& r) { return r.fidelity == policy::Fidelity::high; });
    if (high == s.reductions.end()) throw Error(Errc::invalid_argument, "summary has no high fidelity rows");
    double min_plt = high->min_plt;
    for (const auto& r : s.reductions) min_plt = std::min(min_plt, r.min_plt);
    return {
        {"median request reduction", high->median_requests, 0.60, high->median_requests >= 0.60},
        {"median size reduction at high fidelity", high->median_size, 0.50, high->median_size >= 0.50},
        {"median PLT reduction at high fidelity", high->median_plt, 0.60, high->median_plt >= 0.60},
        {"smallest PLT reduction on any page", min_plt, 0.0, min_plt > 0.0},
    };
}

namespace {

std::string csv_cell(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + '"';
}

template <class T>
T parse_cell(const std::string& cell, std::size_t line, const char* what) {
    T v{};
    const auto* end = cell.data() + cell.size();
    const auto [p, ec] = std::from_chars(cell.data(), end, v);
    if (ec != std::errc() || p != end) {
        throw Error(Errc::parse_failure, "line " + std::to_string(line) + ": bad " + what + " '" + cell + "'");
    }
    return v;
}

constexpr std::string_view kHeader = "page,variant,fidelity,plt_s,size_bytes,requests";

}  // namespace

std::string write_csv(const BenchReport& report) {
    std::string out(kHeader);
    out += '\n';
    for (const auto& r : report.rows) {
        out += csv_cell(r.page) + ',' + csv_cell(r.variant) + ',';
        if (r.fidelity) out += policy::fidelity_name(*r.fidelity);
        out += ',' + format_number(r.plt_s) + ',' + std::to_string(r.size_bytes) + ',' + std::to_string(r.requests) + '\n';
    }
    return out;
}

BenchReport read_csv(std::string_view text) {
    using Tokenizer = boost::tokenizer<boost::escaped_list_separator<char>>;
    const boost::escaped_list_separator<char> sep('\0', ',', '"');
    std::istringstream in{std::string(text)};
    std::string line;
    if (!std::getline(in, line)) throw Error(Errc::parse_failure, "empty csv");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader) throw Error(Errc::parse_failure, "unexpected csv header '" + line + "'");
    BenchReport report;
    std::size_t n = 1;
    while (std::getline(in, line)) {
        ++n;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> cells;
        try {
            const Tokenizer tok(line, sep);
            cells.assign(tok.begin(), tok.end());
        } catch (const boost::escaped_list_error& e) {
            throw Error(Errc::parse_failure, "line " + std::to_string(n) + ": " + e.what());
        }
        if (cells.size() != 6) throw Error(Errc::parse_failure, "line " + std::to_string(n) + ": expected 6 cells");
        VariantRow r;
        r.page = cells[0];
        r.variant = cells[1];
        if (!cells[2].empty()) {
            try {
                r.fidelity = policy::parse_fidelity(cells[2]);
            } catch (const Error&) {
                throw Error(Errc::parse_failure, "line " + std::to_string(n) + ": bad fidelity '" + cells[2] + "'");
            }
        }
        r.plt_s = parse_cell<double>(cells[3], n, "plt_s");
        r.size_bytes = parse_cell<std::uint64_t>(cells[4], n, "size_bytes");
        r.requests = parse_cell<std::uint64_t>(cells[5], n, "requests");
        report.rows.push_back(std::move(r));
    }
    return report;
}

std::string summary_json(const BenchSummary& s) {
    nlohmann::ordered_json j;
    j["corpus"] = s.corpus_id;
    j["model"] = s.model_id;
    j["pages"] = s.pages;
    j["variants"] = nlohmann::ordered_json::array();
    for (const auto& v : s.variants) {
        j["variants"].push_back({{"label", v.label},
                                 {"pages", v.pages},
                                 {"median_plt_s", v.median_plt_s},
                                 {"p90_plt_s", v.p90_plt_s},
                                 {"median_size_bytes", v.median_size_bytes},
                                 {"median_requests", v.median_requests}});
    }
    j["reductions"] = nlohmann::ordered_json::array();
    for (const auto& r : s.reductions) {
        j["reductions"].push_back({{"fidelity", policy::fidelity_name(r.fidelity)},
                                   {"median_requests", r.median_requests},
                                   {"median_size", r.median_size},
                                   {"median_plt", r.median_plt},
                                   {"min_plt", r.min_plt},
                                   {"faster_on_every_page", r.faster_on_every_page}});
    }
    return j.dump(2) + "\n";
}

namespace {

std::string fixed(double v, int digits) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(digits);
    os << v;
    return os.str();
}

std::string percent(double fraction) { return fixed(fraction * 100.0, 1) + "%"; }

}  // namespace

std::string summary_markdown(const BenchSummary& s) {
    std::ostringstream md;
    md << "# Page load benchmark\n\n";
    md << "Corpus `" << s.corpus_id << "`, " << s.pages << " pages, network model `" << s.model_id << "`.\n\n";
    md << "| variant | pages | median PLT (s) | p90 PLT (s) | median size (bytes) | median requests |\n";
    md << "|---|---:|---:|---:|---:|---:|\n";
    for (const auto& v : s.variants) {
        md << "| " << v.label << " | " << v.pages << " | " << fixed(v.median_plt_s, 3) << " | " << fixed(v.p90_plt_s, 3)
           << " | " << fixed(v.median_size_bytes, 0) << " | " << fixed(v.median_requests, 1) << " |\n";
    }
    md << "\nMedian reduction against the HTML page:\n\n";
    md << "| fidelity | requests | size | PLT | smallest PLT reduction | faster on every page |\n";
    md << "|---|---:|---:|---:|---:|---|\n";
    for (const auto& r : s.reductions) {
        md << "| " << policy::fidelity_name(r.fidelity) << " | " << percent(r.median_requests) << " | "
           << percent(r.median_size) << " | " << percent(r.median_plt) << " | " << percent(r.min_plt) << " | "
           << (r.faster_on_every_page ? "yes" : "no") << " |\n";
    }
    return md.str();
}

namespace {

std::string escape_xml(std::string_view s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string tick_text(double v) {
    const double a = std::abs(v);
    if (a >= 1e6) return format_number(std::round(v / 1e5) / 10) + "M";
    if (a >= 1e4) return format_number(std::round(v / 100) / 10) + "k";
    return format_number(std::round(v * 100) / 100);
}

}  // namespace

std::string cdf_svg(std::string_view title, std::string_view x_label, const std::vector<CdfSeries>& series) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
    constexpr double W = 640, H = 400, L = 60, R = 160, T = 40, B = 50;
    const double pw = W - L - R, ph = H - T - B;
    double lo = 0, hi = 0;
    bool any = false;
    for (const auto& s : series) {
        for (double v : s.values) {
            lo = any ? std::min(lo, v) : v;
            hi = any ? std::max(hi, v) : v;
            any = true;
        }
    }
    lo = std::min(lo, 0.0);
    if (hi <= lo) hi = lo + 1;
    auto x = [&](double v) { return L + (v - lo) / (hi - lo) * pw; };
    auto y = [&](double p) { return T + (1 - p) * ph; };

    std::ostringstream svg;
    svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
        << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    svg << "<text x=\"" << W / 2 << "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" << escape_xml(title)
        << "</text>\n";
    svg << "<g stroke=\"#ccc\">\n";
    for (int i = 0; i <= 4; ++i) {
        const double p = i / 4.0;
        svg << "<line x1=\"" << L << "\" y1=\"" << y(p) << "\" x2=\"" << L + pw << "\" y2=\"" << y(p) << "\"/>\n";
    }
    svg << "</g>\n";
    svg << "<g stroke=\"black\"><line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph
        << "\"/><line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph << "\"/></g>\n";
    for (int i = 0; i <= 4; ++i) {
        const double p = i / 4.0;
        svg << "<text x=\"" << L - 6 << "\" y=\"" << y(p) + 4 << "\" text-anchor=\"end\">" << format_number(p)
            << "</text>\n";
        const double v = lo + (hi - lo) * p;
        svg << "<text x=\"" << x(v) << "\" y=\"" << T + ph + 16 << "\" text-anchor=\"middle\">" << tick_text(v)
            << "</text>\n";
    }
    svg << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 10 << "\" text-anchor=\"middle\">" << escape_xml(x_label)
        << "</text>\n";
    svg << "<text x=\"16\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " << T + ph / 2
        << ")\">fraction of pages</text>\n";
    for (std::size_t k = 0; k < series.size(); ++k) {
        const auto* color = kColors[k % std::size(kColors)];
        auto values = series[k].values;
        std::sort(values.begin(), values.end());
        if (!values.empty()) {
            std::ostringstream pts;
            pts << x(values.front()) << ',' << y(0);
            for (std::size_t i = 0; i < values.size(); ++i) {
                const double p = static_cast<double>(i + 1) / static_cast<double>(values.size());
                const double prev = static_cast<double>(i) / static_cast<double>(values.size());
                pts << ' ' << x(values[i]) << ',' << y(prev) << ' ' << x(values[i]) << ',' << y(p);
            }
            svg << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts.str()
                << "\"/>\n";
        }
        const double ly = T + 12 + 18.0 * static_cast<double>(k);
        svg << "<line x1=\"" << L + pw + 12 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 32 << "\" y2=\"" << ly
            << "\" stroke=\"" << color << "\" stroke-width=\"2\"/><text x=\"" << L + pw + 38 << "\" y=\"" << ly + 4
            << "\">" << escape_xml(series[k].label) << "</text>\n";
    }
    svg << "</svg>\n";
    return svg.str();
}

void emit_report(const BenchReport& report, const fs::path& out_dir) {
    const auto summary = summarize(report);
    std::vector<CdfSeries> plt, size, requests;
    for (auto& [label, rows] : by_label(report)) {
        plt.push_back({label, column(rows, plt_of)});
        size.push_back({label, column(rows, size_of)});
        requests.push_back({label, column(rows, requests_of)});
    }
    std::vector<CdfSeries> reduction_series;
    const auto reductions = page_reductions(report);
    for (auto f : policy::kAllFidelities) {
        CdfSeries req{"requests " + std::string(policy::fidelity_name(f)), {}};
        CdfSeries sz{"size " + std::string(policy::fidelity_name(f)), {}};
        CdfSeries pl{"PLT " + std::string(policy::fidelity_name(f)), {}};
        for (const auto& r : reductions) {
            if (r.fidelity != f) continue;
            req.values.push_back(r.requests * 100);
            sz.values.push_back(r.size * 100);
            pl.values.push_back(r.plt * 100);
        }
        if (pl.values.empty()) continue;
        reduction_series.push_back(std::move(req));
        reduction_series.push_back(std::move(sz));
        reduction_series.push_back(std::move(pl));
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw Error(Errc::io_error, "cannot create " + out_dir.string() + ": " + ec.message());
    write_file_atomic(out_dir / "pages.csv", write_csv(report));
    write_file_atomic(out_dir / "summary.json", summary_json(summary));
    write_file_atomic(out_dir / "summary.md", summary_markdown(summary));
    write_file_atomic(out_dir / "cdf_plt.svg", cdf_svg("Page load time", "seconds", plt));
    write_file_atomic(out_dir / "cdf_size.svg", cdf_svg("Page size", "bytes", size));
    write_file_atomic(out_dir / "cdf_requests.svg", cdf_svg("Requests per page", "requests", requests));
    write_file_atomic(out_dir / "cdf_reduction.svg",
                      cdf_svg("Reduction against HTML", "reduction (%)", reduction_series));
}

}  // namespace gaius::bench
