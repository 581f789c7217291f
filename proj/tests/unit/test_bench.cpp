#include "gaius/bench/corpus.hpp"
#include "gaius/bench/plt.hpp"
#include "gaius/bench/report.hpp"
#include "gaius/common/error.hpp"
#include "gaius/convert/html_convert.hpp"
#include "gaius/maml/codec.hpp"

#include "edge_harness.hpp"
#include "golden.hpp"

#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>

using namespace gaius;
using namespace gaius::bench;
using gaius::testing::golden;
using gaius::testing::slurp;
using policy::Fidelity;

namespace {

const std::filesystem::path kFixtures{GAIUS_FIXTURES_DIR};
const std::filesystem::path kCorpus = kFixtures / "corpus";

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an error");
    return Errc::io_error;
}

const std::vector<CorpusPage>& corpus() {
    static const auto pages = load_corpus(kCorpus);
    return pages;
}

// rtt 100 ms, 100000 bytes/s, dns 50 ms.
NetworkModel oracle_model() {
    NetworkModel m;
    m.rtt_ms = 100;
    m.bandwidth_kbps = 800;
    m.dns_ms = 50;
    return m;
}

// Twelve objects; object 0 is 20000 bytes, object i is 5000 * i bytes and the
// last three live on host "b".
FetchGraph twelve_objects() {
    FetchGraph g;
    g.nodes.push_back({"a", 20000});
    for (std::uint64_t i = 1; i < 12; ++i) g.nodes.push_back({i >= 9 ? "b" : "a", 5000 * i});
    return g;
}

}  // namespace

TEST_CASE("corpus conversions are frozen") {
    for (const auto& entry : std::filesystem::directory_iterator(kCorpus)) {
        if (!entry.is_directory()) continue;
        const auto snap = convert::load_snapshot(entry.path());
        const auto maml = maml::serialize_page(convert::convert_html(snap).page);
        CHECK_MESSAGE(golden(entry.path() / "maml.json", maml) == maml, entry.path().filename().string());
    }
}

TEST_CASE("single empty object costs dns, setup and one request") {
    NetworkModel m;
    m.rtt_ms = 100;
    m.dns_ms = 100;
    FetchGraph g{{{"h", 0}}, {}};
    CHECK(simulate_plt(g, m) == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("independent objects on one host overlap") {
    NetworkModel m;
    m.max_connections_per_host = 2;
    FetchGraph one{{{"h", 50000}}, {}};
    FetchGraph two{{{"h", 50000}, {"h", 20000}}, {}};
    const double a = simulate_plt(one, m);
    CHECK(simulate_plt(two, m) == doctest::Approx(a).epsilon(1e-12));

    m.max_connections_per_host = 1;
    CHECK(simulate_plt(two, m) > a + 0.1);
}

TEST_CASE("cycles are rejected") {
    FetchGraph g{{{"h", 1}, {"h", 1}, {"h", 1}}, {{0, 1}, {1, 2}, {2, 1}}};
    CHECK(code_of([&] { simulate_plt(g, NetworkModel{}); }) == Errc::cyclic_graph);
    FetchGraph self{{{"h", 1}}, {{0, 0}}};
    CHECK(code_of([&] { simulate_plt(self, NetworkModel{}); }) == Errc::cyclic_graph);
    FetchGraph dangling{{{"h", 1}}, {{0, 3}}};
    CHECK(code_of([&] { simulate_plt(dangling, NetworkModel{}); }) == Errc::invalid_argument);
    NetworkModel bad;
    bad.rtt_ms = 0;
    CHECK(code_of([&] { simulate_plt(FetchGraph{{{"h", 1}}, {}}, bad); }) == Errc::invalid_argument);
}

TEST_CASE("twelve objects as a chain and as a flat page match the hand-unrolled event list") {
    const auto m = oracle_model();

    // Chain 0 -> 1 -> ... -> 11. Every depth holds one object per host, so
    // host a reuses its first connection and host b opens one.
    //   obj0  a: dns .05 + setup .1 + req .1 + .2            = 0.45
    //   obj1..8 a: +.1 + .05*i each -> 0.45 + .8 + 1.8       = 3.05
    //   obj9  b: dns .05 + setup .1 + req .1 + .45 from 3.05 = 3.75
    //   obj10 b: +.1 + .5                                    = 4.35
    //   obj11 b: +.1 + .55                                   = 5.00
    auto chain = twelve_objects();
    for (std::size_t i = 0; i + 1 < 12; ++i) chain.edges.emplace_back(i, i + 1);
    CHECK(std::abs(simulate_plt(chain, m) - 5.00) < 1e-3);

    // Flat: 0 -> every other object. Depth 1 on host a is dealt over six
    // connections: c0 {1, 7}, c1 {2, 8}, c2 {3}, c3 {4}, c4 {5}, c5 {6}.
    //   obj0  a c0: 0.45
    //   c0: obj1 0.45 + .1 + .05 = 0.60, obj7 0.60 + .1 + .35 = 1.05
    //   c1: obj2 0.45 + .2 + .10 = 0.75, obj8 0.75 + .1 + .40 = 1.25
    //   c2..c5: obj3 0.80, obj4 0.85, obj5 0.90, obj6 0.95
    //   b: dns done 0.50; obj9 0.50 + .2 + .45 = 1.15, obj10 1.20, obj11 1.25
    auto flat = twelve_objects();
    for (std::size_t i = 1; i < 12; ++i) flat.edges.emplace_back(0, i);
    CHECK(std::abs(simulate_plt(flat, m) - 1.25) < 1e-3);

    // One connection per host serializes host a after the root.
    //   a: 0.45 + sum_{i=1..8} (.1 + .05 i) = 0.45 + .8 + 1.8 = 3.05
    //   b: 0.50 + .1 setup then .1 + .45, .1 + .5, .1 + .55  = 2.40
    auto serial = oracle_model();
    serial.max_connections_per_host = 1;
    CHECK(std::abs(simulate_plt(flat, serial) - 3.05) < 1e-3);
}

TEST_CASE("PLT never decreases when an object grows or the rtt rises") {
    std::mt19937_64 rng(20190701);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + rng() % 30;
        FetchGraph g;
        for (std::size_t i = 0; i < n; ++i) g.nodes.push_back({"h" + std::to_string(rng() % 4), rng() % 200000});
        for (std::size_t c = 1; c < n; ++c) {
            const auto parents = rng() % 3;
            for (std::uint64_t k = 0; k < parents; ++k) g.edges.emplace_back(rng() % c, c);
        }
        NetworkModel m;
        m.rtt_ms = 10 + static_cast<double>(rng() % 300);
        m.bandwidth_kbps = 64 + static_cast<double>(rng() % 4096);
        m.dns_ms = 1 + static_cast<double>(rng() % 200);
        m.max_connections_per_host = 1 + static_cast<int>(rng() % 6);
        const double base = simulate_plt(g, m);

        auto bigger = g;
        bigger.nodes[rng() % n].bytes += 1 + rng() % 500000;
        CHECK(simulate_plt(bigger, m) >= base);

        auto slower = m;
        slower.rtt_ms += 1 + static_cast<double>(rng() % 200);
        CHECK(simulate_plt(g, slower) >= base);
    }
}

TEST_CASE("a page whose MAML equals its HTML shows no reduction") {
    CorpusPage page;
    page.name = "one";
    page.maml.page_id = "p-one";
    page.maml.title = "One";
    maml::Text t;
    t.txt = "hello";
    t.box = {0, 0, 200, 40};
    page.maml.objects.push_back(t);
    const auto bytes = maml::serialize_page(page.maml).size();
    page.snapshot.url = "http://one.example/";
    page.snapshot.resources.push_back({"http://one.example/", "text/html", bytes, std::nullopt, std::nullopt});

    const auto report = run_corpus(std::vector{page}, NetworkModel{}, {});
    REQUIRE(report.rows.size() == 2);
    const auto s = summarize(report);
    REQUIRE(s.reductions.size() == 1);
    CHECK(s.reductions[0].median_requests == 0);
    CHECK(s.reductions[0].median_size == 0);
    CHECK(s.reductions[0].median_plt == 0);
    CHECK_FALSE(s.reductions[0].faster_on_every_page);
}

TEST_CASE("bundled corpus report") {
    const auto all = std::vector{Fidelity::low, Fidelity::medium, Fidelity::high};
    const auto serial = run_corpus(corpus(), NetworkModel{}, all, Execution::serial);
    const auto parallel = run_corpus(corpus(), NetworkModel{}, all, Execution::parallel);
    CHECK(serial == parallel);
    CHECK(run_corpus(corpus(), NetworkModel{}, all) == parallel);
    REQUIRE(serial.rows.size() == 40);
    CHECK(serial.model_id == "rtt100-bw1024-dns100-c6-s1-r1");

    std::map<std::string, std::uint64_t> html_requests;
    for (const auto& r : serial.rows) {
        if (!r.fidelity) html_requests[r.page] = r.requests;
    }
    CHECK(html_requests.size() == 10);
    for (const auto& r : serial.rows) {
        if (r.fidelity) CHECK(r.requests <= html_requests.at(r.page));
    }

    // Per page: html, maml-high, maml-low, maml-medium.
    for (std::size_t p = 0; p < 10; ++p) {
        CHECK(row_label(serial.rows[4 * p]) == "html");
        CHECK(row_label(serial.rows[4 * p + 1]) == "maml-high");
        CHECK(row_label(serial.rows[4 * p + 2]) == "maml-low");
        CHECK(row_label(serial.rows[4 * p + 3]) == "maml-medium");
    }

    const auto from_dir = run_corpus(kCorpus, NetworkModel{}, all);
    CHECK(from_dir.rows == serial.rows);
    CHECK(from_dir.corpus_id == "corpus");
    CHECK(run_corpus(kCorpus / "", NetworkModel{}, all).corpus_id == "corpus");
}

TEST_CASE("the fidelity set selects the maml variants") {
    const auto high_only = run_corpus(corpus(), NetworkModel{}, {});
    CHECK(high_only.rows.size() == 20);
    const auto s = summarize(high_only);
    REQUIRE(s.variants.size() == 2);
    CHECK(s.variants[0].label == "html");
    CHECK(s.variants[1].label == "maml-high");
    REQUIRE(s.reductions.size() == 1);
    CHECK(s.reductions[0].fidelity == Fidelity::high);

    const auto low = run_corpus(corpus(), NetworkModel{}, {Fidelity::low});
    CHECK(low.rows.size() == 30);
    CHECK(summarize(low).reductions.size() == 2);
}

TEST_CASE("csv round trip and an independent aggregation agree with the summary") {
    const auto report = run_corpus(corpus(), NetworkModel{}, {Fidelity::low, Fidelity::medium});
    const auto csv = write_csv(report);
    CHECK(csv.starts_with("page,variant,fidelity,plt_s,size_bytes,requests\n"));
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 41);
    const auto back = read_csv(csv);
    CHECK(back.rows == report.rows);

    // Medians recomputed from the CSV rows alone.
    auto med = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const auto n = v.size();
        return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2;
    };
    std::map<std::string, const VariantRow*> html;
    for (const auto& r : back.rows) {
        if (r.variant == "html") html[r.page] = &r;
    }
    const auto s = summarize(report);
    for (const auto& rs : s.reductions) {
        std::vector<double> req, size, plt;
        for (const auto& r : back.rows) {
            if (r.fidelity != rs.fidelity) continue;
            const auto& h = *html.at(r.page);
            req.push_back(1.0 - static_cast<double>(r.requests) / static_cast<double>(h.requests));
            size.push_back(1.0 - static_cast<double>(r.size_bytes) / static_cast<double>(h.size_bytes));
            plt.push_back(1.0 - r.plt_s / h.plt_s);
        }
        CHECK(med(req) == doctest::Approx(rs.median_requests).epsilon(1e-12));
        CHECK(med(size) == doctest::Approx(rs.median_size).epsilon(1e-12));
        CHECK(med(plt) == doctest::Approx(rs.median_plt).epsilon(1e-12));
    }
    for (const auto& v : s.variants) {
        std::vector<double> plt;
        for (const auto& r : back.rows) {
            if (row_label(r) == v.label) plt.push_back(r.plt_s);
        }
        CHECK(v.pages == plt.size());
        CHECK(med(plt) == doctest::Approx(v.median_plt_s).epsilon(1e-12));
    }

    CHECK(code_of([] { read_csv("page,variant\n"); }) == Errc::parse_failure);
    CHECK(code_of([] { read_csv("page,variant,fidelity,plt_s,size_bytes,requests\na,maml,huge,1,2,3\n"); }) ==
          Errc::parse_failure);
    CHECK(code_of([] { read_csv("page,variant,fidelity,plt_s,size_bytes,requests\na,html,,x,2,3\n"); }) ==
          Errc::parse_failure);
    const auto quoted = read_csv("page,variant,fidelity,plt_s,size_bytes,requests\n\"a,b\",html,,1.5,2,3\n");
    REQUIRE(quoted.rows.size() == 1);
    CHECK(quoted.rows[0].page == "a,b");
    CHECK(read_csv(write_csv(quoted)).rows == quoted.rows);
}

TEST_CASE("emitted report files") {
    const auto report = run_corpus(corpus(), NetworkModel{}, {Fidelity::low, Fidelity::medium});
    const gaius::testing::TempDir dir;
    const auto out = dir.path() / "report";
    emit_report(report, out);
    for (const char* name : {"pages.csv", "summary.json", "summary.md", "cdf_plt.svg", "cdf_size.svg",
                             "cdf_requests.svg", "cdf_reduction.svg"}) {
        CHECK_MESSAGE(std::filesystem::is_regular_file(out / name), name);
    }
    CHECK(read_csv(slurp(out / "pages.csv")).rows == report.rows);
    const auto md = slurp(out / "summary.md");
    CHECK(md.find("| maml-high |") != std::string::npos);
    CHECK(md.find("rtt100-bw1024-dns100-c6-s1-r1") != std::string::npos);
    const auto svg = slurp(out / "cdf_plt.svg");
    CHECK(svg.starts_with("<svg"));
    CHECK(std::count(svg.begin(), svg.end(), '\n') > 10);
    CHECK(svg.find("maml-low") != std::string::npos);

    CHECK(code_of([&] { emit_report(BenchReport{}, out); }) == Errc::empty_corpus);
    // A regular file where the directory should be.
    CHECK(code_of([&] { emit_report(report, out / "pages.csv" / "x"); }) == Errc::io_error);
}

TEST_CASE("empty corpus") {
    const gaius::testing::TempDir dir;
    CHECK(code_of([&] { load_corpus(dir.path()); }) == Errc::empty_corpus);
    CHECK(code_of([&] { load_corpus(dir.path() / "missing"); }) == Errc::empty_corpus);
    CHECK(code_of([] { run_corpus(std::vector<CorpusPage>{}, NetworkModel{}, {}); }) == Errc::empty_corpus);
}
