// Operator entry point: convert, rss, validate, fmt, serve, bench, metrics.
// Exit codes: 0 success, 1 the input was read but failed a check, 2 the input
// could not be read or used.

#include "gaius/bench/corpus.hpp"
#include "gaius/bench/report.hpp"
#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/common/numfmt.hpp"
#include "gaius/common/time.hpp"
#include "gaius/convert/html_convert.hpp"
#include "gaius/convert/rss.hpp"
#include "gaius/convert/snapshot.hpp"
#include "gaius/edge/config.hpp"
#include "gaius/edge/http.hpp"
#include "gaius/edge/metrics.hpp"
#include "gaius/edge/model.hpp"
#include "gaius/edge/service.hpp"
#include "gaius/maml/codec.hpp"
#include "gaius/maml/geometry.hpp"
#include "gaius/maml/validate.hpp"

#include <CLI11.hpp>
#include <httplib.h>
#include <nlohmann/json.hpp>

#include <csignal>
#include <cstdlib>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using gaius::Errc;
using gaius::Error;
using json = nlohmann::ordered_json;

namespace {

constexpr int kOk = 0;
constexpr int kCheckFailed = 1;
constexpr int kBadInput = 2;

// Thrown for input problems the handlers detect themselves.
struct InputError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

void write_output(const std::string& path, const std::string& bytes) {
    if (path.empty() || path == "-") {
        std::cout << bytes;
        std::cout.flush();
    } else {
        gaius::write_file_atomic(path, bytes);
    }
}

std::string read_input(const std::string& path) {
    if (!fs::exists(path)) throw InputError(path + ": no such file or directory");
    return gaius::read_file(path);
}

json violations_json(const std::vector<gaius::maml::Violation>& vs) {
    json out = json::array();
    for (const auto& v : vs) out.push_back({{"object_index", v.object_index}, {"field", v.field}, {"rule", v.rule}});
    return out;
}

void print_violations(const std::vector<gaius::maml::Violation>& vs) {
    for (const auto& v : vs) {
        std::cerr << "  ";
        if (v.object_index >= 0) std::cerr << "object " << v.object_index << ' ';
        std::cerr << v.field << ": " << v.rule << '\n';
    }
}

// convert

struct ConvertArgs {
    std::string input;
    std::string output;
    std::string page_id;
    bool validate_only = false;
    bool no_fallback = false;
    bool json_out = false;
};

int cmd_convert(const ConvertArgs& a) {
    if (!fs::exists(a.input)) throw InputError(a.input + ": no such file or directory");
    const auto snap = fs::is_directory(a.input) ? gaius::convert::load_snapshot(a.input)
                                                : gaius::convert::import_har(gaius::read_file(a.input));
    gaius::convert::ConvertOptions opts;
    opts.page_id = a.page_id;
    opts.allow_fallback_layout = !a.no_fallback;
    const auto result = gaius::convert::convert_html(snap, opts);
    const auto violations = gaius::maml::validate(result.page);

    if (a.json_out) {
        json j{{"page_id", result.page.page_id},
               {"objects", result.page.objects.size()},
               {"requests", gaius::maml::request_count(result.page)},
               {"html_requests", snap.resources.size()},
               {"fallback_layout", result.used_fallback_layout},
               {"notes", result.notes},
               {"violations", violations_json(violations)}};
        std::cout << j.dump(2) << '\n';
    } else {
        std::cerr << a.input << ": " << result.page.objects.size() << " objects, "
                  << gaius::maml::request_count(result.page) << " requests (HTML " << snap.resources.size() << ")"
                  << (result.used_fallback_layout ? ", fallback layout" : "") << '\n';
        for (const auto& n : result.notes) std::cerr << "  note: " << n << '\n';
        print_violations(violations);
    }
    if (!violations.empty()) return kCheckFailed;
    if (a.validate_only) return kOk;
    if (a.json_out && a.output.empty()) return kOk;
    write_output(a.output, gaius::maml::serialize_page(result.page));
    return kOk;
}

// rss

struct RssArgs {
    std::string source;
    std::string output;
    std::string page_id = "rss";
    std::string fetched_at;
    std::string language = "en";
    bool json_out = false;
};

std::string fetch_feed(const std::string& url) {
    if (url.starts_with("https://")) {
        throw InputError("https feeds are not fetched directly; download the feed and pass the file");
    }
    const auto rest = url.substr(7);
    const auto slash = rest.find('/');
    const auto authority = rest.substr(0, slash);
    const auto path = slash == std::string::npos ? std::string("/") : rest.substr(slash);
    httplib::Client client("http://" + authority);
    client.set_follow_location(true);
    client.set_connection_timeout(10);
    client.set_read_timeout(30);
    const auto res = client.Get(path);
    if (!res) throw InputError(url + ": " + httplib::to_string(res.error()));
    if (res->status != 200) throw InputError(url + ": HTTP " + std::to_string(res->status));
    return res->body;
}

int cmd_rss(const RssArgs& a) {
    const bool remote = a.source.starts_with("http://") || a.source.starts_with("https://");
    const auto xml = remote ? fetch_feed(a.source) : read_input(a.source);
    const auto fetched = a.fetched_at.empty() ? gaius::SystemClock{}.now() : gaius::parse_utc(a.fetched_at);
    const auto feed = gaius::convert::parse_feed(xml, remote ? a.source : std::string{}, fetched);
    gaius::convert::RssLayoutParams params;
    params.page_id = a.page_id;
    params.language = a.language;
    const auto page = gaius::convert::translate_rss(feed, params);
    const auto text = gaius::maml::serialize_page(page);
    if (a.json_out) {
        std::cout << json{{"title", feed.title}, {"items", feed.items.size()}, {"objects", page.objects.size()}}.dump(2)
                  << '\n';
        if (!a.output.empty()) write_output(a.output, text);
    } else {
        std::cerr << (feed.title.empty() ? a.source : feed.title) << ": " << feed.items.size() << " items, "
                  << page.objects.size() << " objects\n";
        write_output(a.output, text);
    }
    return kOk;
}

// validate and fmt

struct DocArgs {
    std::string input;
    std::string output;
    bool lenient = false;
    bool json_out = false;
};

int cmd_validate(const DocArgs& a) {
    const auto text = read_input(a.input);
    const auto parsed = gaius::maml::parse_page_with_notes(text, {!a.lenient, false});
    const auto violations = gaius::maml::validate(parsed.page);
    if (a.json_out) {
        std::cout << json{{"valid", violations.empty()},
                          {"objects", parsed.page.objects.size()},
                          {"notes", parsed.notes},
                          {"violations", violations_json(violations)}}
                         .dump(2)
                  << '\n';
    } else {
        for (const auto& n : parsed.notes) std::cerr << "  note: " << n << '\n';
        if (violations.empty()) {
            std::cerr << a.input << ": valid, " << parsed.page.objects.size() << " objects\n";
        } else {
            std::cerr << a.input << ": " << violations.size() << " violations\n";
            print_violations(violations);
        }
    }
    return violations.empty() ? kOk : kCheckFailed;
}

int cmd_fmt(const DocArgs& a) {
    const auto page = gaius::maml::parse_page(read_input(a.input), {!a.lenient, true});
    write_output(a.output, gaius::maml::serialize_page(page));
    return kOk;
}

// serve

struct ServeArgs {
    std::string config;
    std::string host;
    int port = -1;
};

int cmd_serve(const ServeArgs& a) {
    std::string path = a.config;
    if (path.empty()) {
        if (const char* env = std::getenv("GAIUS_EDGE_CONFIG")) path = env;
    }
    gaius::edge::EdgeConfig config;
    if (!path.empty()) {
        if (!fs::is_regular_file(path)) throw InputError(path + ": config file not found");
        config = gaius::edge::load_config(path);
    }
    if (!a.host.empty()) config.listen_host = a.host;
    if (a.port >= 0) config.listen_port = a.port;

    // Block the shutdown signals before any thread starts so only sigwait
    // below receives them.
    sigset_t signals;
    sigemptyset(&signals);
    sigaddset(&signals, SIGINT);
    sigaddset(&signals, SIGTERM);
    pthread_sigmask(SIG_BLOCK, &signals, nullptr);

    gaius::SystemClock clock;
    gaius::edge::EdgeService service(config, clock);
    gaius::edge::HttpServer server(service);
    const int port = server.start(config.listen_host, config.listen_port);
    std::cout << "listening on " << config.listen_host << ':' << port << std::endl;

    int sig = 0;
    sigwait(&signals, &sig);
    std::cerr << "signal " << sig << ", shutting down\n";
    server.stop();
    return kOk;
}

// bench

struct BenchArgs {
    std::string corpus;
    std::string out = "bench-report";
    std::vector<std::string> fidelities;
    gaius::bench::NetworkModel model;
    bool serial = false;
    bool assert_thresholds = false;
    bool json_out = false;
};

std::string percent(double fraction) {
    std::ostringstream os;
    os.setf(std::ios::fixed);
    os.precision(1);
    os << fraction * 100 << '%';
    return os.str();
}

int cmd_bench(const BenchArgs& a) {
    std::vector<gaius::policy::Fidelity> fidelities;
    const auto names = a.fidelities.empty() ? std::vector<std::string>{"low", "medium", "high"} : a.fidelities;
    for (const auto& f : names) fidelities.push_back(gaius::policy::parse_fidelity(f));
    a.model.check();
    const auto exec = a.serial ? gaius::bench::Execution::serial : gaius::bench::Execution::parallel;
    const auto report = gaius::bench::run_corpus(fs::path(a.corpus), a.model, fidelities, exec);
    gaius::bench::emit_report(report, a.out);
    const auto summary = gaius::bench::summarize(report);
    const auto checks = gaius::bench::check_thresholds(summary);
    bool pass = true;
    for (const auto& c : checks) pass = pass && c.pass;

    if (a.json_out) {
        auto j = json::parse(gaius::bench::summary_json(summary));
        j["out"] = a.out;
        j["thresholds"] = json::array();
        for (const auto& c : checks) {
            j["thresholds"].push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
        }
        std::cout << j.dump(2) << '\n';
    } else {
        std::cout << gaius::bench::summary_markdown(summary) << '\n';
        for (const auto& c : checks) {
            std::cout << (c.pass ? "ok   " : "FAIL ") << c.name << ": " << percent(c.value) << " (threshold "
                      << percent(c.threshold) << ")\n";
        }
        std::cout << "report written to " << a.out << '\n';
    }
    return a.assert_thresholds && !pass ? kCheckFailed : kOk;
}

// metrics

struct MetricsArgs {
    std::string input;
    bool json_out = false;
};

int cmd_metrics_summary(const MetricsArgs& a) {
    fs::path path = a.input;
    if (fs::is_directory(path)) path = path / "logs" / "requests.jsonl";
    std::istringstream in(read_input(path.string()));
    std::vector<gaius::edge::RequestLog> records;
    std::string line;
    std::size_t n = 0;
    while (std::getline(in, line)) {
        ++n;
        if (line.empty()) continue;
        try {
            records.push_back(gaius::edge::request_log_from_json(nlohmann::json::parse(line)));
        } catch (const std::exception& e) {
            throw InputError(path.string() + ":" + std::to_string(n) + ": " + e.what());
        }
    }
    const auto s = gaius::edge::summarize(records);
    if (a.json_out) {
        std::cout << gaius::edge::to_json(s).dump(2) << '\n';
        return kOk;
    }
    auto row = [](const char* name, const gaius::edge::Distribution& d) {
        std::cout << name << ": n=" << d.count;
        if (d.count > 0) {
            std::cout << " min=" << gaius::format_number(d.min) << " p50=" << gaius::format_number(d.p50)
                      << " p90=" << gaius::format_number(d.p90) << " p95=" << gaius::format_number(d.p95)
                      << " max=" << gaius::format_number(d.max) << " mean=" << gaius::format_number(d.mean);
        }
        std::cout << '\n';
    };
    std::cout << "requests: " << s.requests << " (low " << s.by_fidelity[0] << ", medium " << s.by_fidelity[1]
              << ", high " << s.by_fidelity[2] << ")\n";
    row("page_size", s.page_size);
    row("plt_ms", s.plt_ms);
    return kOk;
}

// Errors that mean the input could not be used, as opposed to internal
// failures.
bool is_input_error(Errc c) {
    switch (c) {
        case Errc::parse_failure:
        case Errc::empty_snapshot:
        case Errc::unscalable_viewport:
        case Errc::unsupported_image_format:
        case Errc::zero_dimension:
        case Errc::cyclic_graph:
        case Errc::empty_corpus:
        case Errc::io_error:
        case Errc::invalid_argument:
        case Errc::missing_media_size:
        case Errc::invariant_violation:
            return true;
        default:
            return false;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Flattened-page toolchain: converters, edge server and load-time benchmark"};
    app.require_subcommand(1);

    ConvertArgs convert;
    auto* c = app.add_subcommand("convert", "Convert a snapshot directory or a HAR file to MAML");
    c->add_option("input", convert.input, "Snapshot directory (manifest.json) or .har file")->required();
    c->add_option("-o,--output", convert.output, "Output file (stdout when omitted)");
    c->add_option("--page-id", convert.page_id, "Page id (derived from the url by default)");
    c->add_flag("--validate-only", convert.validate_only, "Convert and validate without writing");
    c->add_flag("--no-fallback", convert.no_fallback, "Fail instead of using the fallback layout");
    c->add_flag("--json", convert.json_out, "Machine-readable report on stdout");

    RssArgs rss;
    auto* r = app.add_subcommand("rss", "Translate an RSS or Atom feed to MAML");
    r->add_option("source", rss.source, "Feed file or http:// URL")->required();
    r->add_option("-o,--output", rss.output, "Output file (stdout when omitted)");
    r->add_option("--page-id", rss.page_id, "Page id")->capture_default_str();
    r->add_option("--language", rss.language, "Page language")->capture_default_str();
    r->add_option("--fetched-at", rss.fetched_at, "Fetch time, e.g. 2019-07-18T12:00:00Z (now by default)");
    r->add_flag("--json", rss.json_out, "Machine-readable report on stdout");

    DocArgs validate;
    auto* v = app.add_subcommand("validate", "Check a MAML document against the format invariants");
    v->add_option("input", validate.input, "MAML file")->required();
    v->add_flag("--lenient", validate.lenient, "Drop unknown keys instead of rejecting them");
    v->add_flag("--json", validate.json_out, "Machine-readable report on stdout");

    DocArgs fmt;
    auto* f = app.add_subcommand("fmt", "Rewrite a MAML document in canonical form");
    f->add_option("input", fmt.input, "MAML file")->required();
    f->add_option("-o,--output", fmt.output, "Output file (stdout when omitted)");
    f->add_flag("--lenient", fmt.lenient, "Drop unknown keys instead of rejecting them");

    ServeArgs serve;
    auto* s = app.add_subcommand("serve", "Run the edge server until SIGINT or SIGTERM");
    s->add_option("-c,--config", serve.config, "Config file (GAIUS_EDGE_CONFIG when omitted)");
    s->add_option("--host", serve.host, "Override the listen host");
    s->add_option("--port", serve.port, "Override the listen port (0 picks a free port)")->check(CLI::Range(0, 65535));

    BenchArgs bench;
    auto* b = app.add_subcommand("bench", "Compare HTML snapshots with their MAML conversions");
    b->add_option("corpus", bench.corpus, "Corpus directory of snapshot directories")->required();
    b->add_option("-o,--out", bench.out, "Report directory")->capture_default_str();
    b->add_option("--fidelity", bench.fidelities, "Fidelities to evaluate besides high (default: all)")
        ->check(CLI::IsMember({"low", "medium", "high"}))
        ->delimiter(',');
    b->add_option("--rtt-ms", bench.model.rtt_ms, "Round-trip time")->capture_default_str();
    b->add_option("--bandwidth-kbps", bench.model.bandwidth_kbps, "Bandwidth")->capture_default_str();
    b->add_option("--dns-ms", bench.model.dns_ms, "DNS lookup per host")->capture_default_str();
    b->add_option("--connections", bench.model.max_connections_per_host, "Connections per host")->capture_default_str();
    b->add_option("--setup-rtts", bench.model.connection_setup_rtts, "RTTs to open a connection")->capture_default_str();
    b->add_option("--request-rtts", bench.model.request_rtts, "RTTs per request")->capture_default_str();
    b->add_flag("--serial", bench.serial, "Evaluate pages on one thread");
    b->add_flag("--assert-thresholds", bench.assert_thresholds, "Exit 1 when a corpus threshold fails");
    b->add_flag("--json", bench.json_out, "Machine-readable summary on stdout");

    MetricsArgs metrics;
    auto* m = app.add_subcommand("metrics", "Request log tools");
    m->require_subcommand(1);
    auto* ms = m->add_subcommand("summary", "Distributions of page size and PLT from a request log");
    ms->add_option("input", metrics.input, "requests.jsonl or a store directory")->required();
    ms->add_flag("--json", metrics.json_out, "Machine-readable summary on stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kBadInput;
    }

    try {
        if (c->parsed()) return cmd_convert(convert);
        if (r->parsed()) return cmd_rss(rss);
        if (v->parsed()) return cmd_validate(validate);
        if (f->parsed()) return cmd_fmt(fmt);
        if (s->parsed()) return cmd_serve(serve);
        if (b->parsed()) return cmd_bench(bench);
        if (ms->parsed()) return cmd_metrics_summary(metrics);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const gaius::maml::ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kBadInput;
    } catch (const Error& e) {
        std::cerr << "error: " << gaius::errc_name(e.code()) << ": " << e.what() << '\n';
        return is_input_error(e.code()) ? kBadInput : kCheckFailed;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kCheckFailed;
    }
    return kBadInput;
}
