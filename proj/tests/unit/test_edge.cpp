#include "gaius/common/error.hpp"
#include "gaius/common/fs.hpp"
#include "gaius/edge/config.hpp"
#include "gaius/edge/feed.hpp"
#include "gaius/edge/http.hpp"
#include "gaius/edge/metrics.hpp"
#include "gaius/maml/codec.hpp"
#include "gaius/maml/geometry.hpp"
#include "gaius/policy/variants.hpp"

#include "edge_harness.hpp"

#include <doctest.h>
#include <httplib.h>

#include <algorithm>
#include <atomic>
#include <fstream>
#include <random>
#include <thread>

#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

using namespace gaius;
using namespace gaius::edge;
using gaius::testing::EdgeHarness;
using gaius::testing::slurp;
using policy::Fidelity;

namespace {

const std::filesystem::path kFixtures{GAIUS_FIXTURES_DIR};

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::io_error;
}

constexpr const char* kThreeObjects = R"({"page":{"title":"Water point notice"},"objects":[
  {"type":"rect","x":0,"y":0,"w":1080,"h":120,"color":"#0d47a1"},
  {"type":"txt","txt":"Kiosk 4 opens at 7","x":24,"y":30,"w":1000,"h":47,"font":36,"font-type":"Arial","color":"#ffffff"},
  {"type":"button","label":"Remind me","action":"/v1/forms/remind","x":24,"y":140,"w":300,"h":60,"color":"#cccccc"}]})";

constexpr const char* kBadColor = R"({"objects":[
  {"type":"rect","x":0,"y":0,"w":100,"h":100,"color":"#ffffff"},
  {"type":"rect","x":0,"y":100,"w":100,"h":100,"color":"red"}]})";

ContentItem item(std::string id, std::optional<GeoPoint> at, std::uint64_t views, const char* created) {
    ContentItem c;
    c.content_id = std::move(id);
    c.author = "u";
    c.location = at;
    c.views = views;
    c.created_at = parse_utc(created);
    return c;
}

std::vector<std::string> ids(const std::vector<ContentItem>& v) {
    std::vector<std::string> out;
    for (const auto& c : v) out.push_back(c.content_id);
    return out;
}

adx::AdCampaign global_image_ad(const std::string& id, std::uint64_t target) {
    adx::AdCampaign c;
    c.ad_id = id;
    c.advertiser_id = "adv-" + id;
    c.creatives.image_url = "https://ads.example/" + id + ".jpg";
    c.creatives.text_body = "Maize flour 10% off";
    c.click_href = "https://shop.example/" + id;
    c.visibility = adx::Visibility::global;
    c.target_impressions = target;
    c.active_start = parse_utc("2019-06-01T00:00:00Z");
    c.active_end = parse_utc("2019-09-01T00:00:00Z");
    return c;
}

}  // namespace

TEST_CASE("config parsing") {
    const auto cfg = parse_config(R"(# edge for ward 3
[store]
path = "/var/lib/gaius"

[server]
host = 0.0.0.0
port = 9090
threads = 4

[fidelity.low]
image_scale = 0.2
image_quality = 30

[pricing]
base_cpi = 0.02
weekly_infra_cost = 140

[feed]
alpha = 0.7

[metrics]
ttl_s = 60
)");
    CHECK(cfg.store_path == "/var/lib/gaius");
    CHECK(cfg.listen_host == "0.0.0.0");
    CHECK(cfg.listen_port == 9090);
    CHECK(cfg.threads == 4);
    CHECK(cfg.profile.at(Fidelity::low).image_scale == 0.2);
    CHECK(cfg.profile.at(Fidelity::low).image_quality == 30);
    CHECK(cfg.profile.at(Fidelity::medium).image_scale == 0.5);
    CHECK(cfg.base_cpi == 0.02);
    CHECK(cfg.weekly_infra_cost == 140);
    CHECK(cfg.feed_alpha == 0.7);
    CHECK(cfg.metrics_ttl == std::chrono::seconds(60));

    const auto defaults = parse_config("");
    CHECK(defaults.listen_port == 8080);
    CHECK(defaults.base_cpi == 0.01);

    auto message = [](const char* text) {
        try {
            parse_config(text);
        } catch (const Error& e) {
            CHECK(e.code() == Errc::invalid_argument);
            return std::string(e.what());
        }
        FAIL("expected an error");
        return std::string();
    };
    CHECK(message("[store]\npath = x\nbogus = 1\n").find("bogus") != std::string::npos);
    CHECK(message("[server]\nport = eighty\n").find("port") != std::string::npos);
    CHECK(message("[server]\nport = 70000\n").find("range") != std::string::npos);
    CHECK(message("[feed]\nalpha = 1.5\n").find("alpha") != std::string::npos);
    CHECK(message("[store]\n[server\n").find("line 2") != std::string::npos);
    CHECK(message("[fidelity.ultra]\nimage_scale = 1\n").find("fidelity") != std::string::npos);
    // Scales must grow with fidelity.
    CHECK(message("[fidelity.low]\nimage_scale = 0.9\n").find("fidelity") != std::string::npos);

    CHECK(code_of([] { load_config("/nonexistent/gaius.conf"); }) == Errc::io_error);
}

TEST_CASE("rank_feed examples") {
    UserProfile user;
    user.location = GeoPoint{-1.2921, 36.8219};
    const GeoPoint far{-1.2921 + 100.0 / 111.19492664455873, 36.8219};  // about 100 km north
    auto near = item("near", user.location, 0, "2019-07-01T00:00:00Z");
    auto distant = item("distant", far, 0, "2019-07-02T00:00:00Z");
    CHECK(ids(rank_feed({distant, near}, user, 1.0)) == std::vector<std::string>{"near", "distant"});

    auto popular = item("popular", std::nullopt, 10, "2019-07-01T00:00:00Z");
    auto quiet = item("quiet", std::nullopt, 5, "2019-07-02T00:00:00Z");
    CHECK(ids(rank_feed({quiet, popular}, user, 0.0)) == std::vector<std::string>{"popular", "quiet"});

    // No views anywhere: popularity is 0, so proximity alone decides.
    CHECK(ids(rank_feed({distant, near}, user, 0.5)) == std::vector<std::string>{"near", "distant"});
    CHECK(rank_feed({}, user).empty());
    CHECK(code_of([&] { rank_feed({near}, user, 1.5); }) == Errc::invalid_argument);
    CHECK(code_of([&] { rank_feed({near}, user, -0.1); }) == Errc::invalid_argument);
}

TEST_CASE("rank_feed matches the hand-computed 8-item ordering") {
    // User in central Nairobi, alpha 0.5, max views 100. Scores computed by hand:
    //   a-market  0 km,   10 views  0.5*1       + 0.5*0.1 = 0.55
    //   f-water   0 km,    0 views  0.5*1       + 0       = 0.50  (created 07-05)
    //   g-power   0 km,    0 views  0.5*1       + 0       = 0.50  (created 07-04)
    //   b-clinic  no loc, 100 views 0           + 0.5*1   = 0.50  (created 07-02)
    //   c-school  1.0008 km, 40     0.5/2.0008  + 0.5*0.4 = 0.44991 (same place and day as e-bus)
    //   e-bus     1.0008 km, 40     0.44991
    //   h-farm    100.08 km, 80     0.5/101.08  + 0.5*0.8 = 0.40495
    //   d-church  10.008 km, 60     0.5/11.008  + 0.5*0.6 = 0.34542
    UserProfile user;
    const GeoPoint u{-1.2921, 36.8219};
    user.location = u;
    const GeoPoint one_km{u.lat + 0.009, u.lon};
    std::vector<ContentItem> items{
        item("a-market", u, 10, "2019-07-01T08:00:00Z"),
        item("b-clinic", std::nullopt, 100, "2019-07-02T08:00:00Z"),
        item("c-school", one_km, 40, "2019-07-03T08:00:00Z"),
        item("d-church", GeoPoint{u.lat + 0.09, u.lon}, 60, "2019-07-01T08:00:00Z"),
        item("e-bus", one_km, 40, "2019-07-03T08:00:00Z"),
        item("f-water", u, 0, "2019-07-05T08:00:00Z"),
        item("g-power", u, 0, "2019-07-04T08:00:00Z"),
        item("h-farm", GeoPoint{u.lat + 0.9, u.lon}, 80, "2019-07-02T08:00:00Z"),
    };
    const std::vector<std::string> expected{"a-market", "f-water", "g-power", "b-clinic",
                                            "c-school", "e-bus",   "h-farm",  "d-church"};
    CHECK(ids(rank_feed(items, user, 0.5)) == expected);
    CHECK(proximity(user, items[2]) == doctest::Approx(1.0 / (1.0 + 1.00075434)).epsilon(1e-8));

    // Any input order gives the same total order.
    std::mt19937 rng(11);
    for (int i = 0; i < 50; ++i) {
        std::shuffle(items.begin(), items.end(), rng);
        CHECK(ids(rank_feed(items, user, 0.5)) == expected);
    }
}

TEST_CASE("rank_feed output is a permutation of its input") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> d(-0.5, 0.5);
    std::uniform_int_distribution<int> views(0, 50);
    UserProfile user;
    user.location = GeoPoint{-1.29, 36.82};
    for (int round = 0; round < 30; ++round) {
        std::vector<ContentItem> items;
        for (int i = 0; i < 20; ++i) {
            items.push_back(item("i" + std::to_string(i), GeoPoint{-1.29 + d(rng), 36.82 + d(rng)},
                                 static_cast<std::uint64_t>(views(rng)), "2019-07-01T00:00:00Z"));
        }
        auto ranked = rank_feed(items, user, round / 29.0);
        auto a = ids(items), b = ids(ranked);
        std::sort(a.begin(), a.end());
        std::sort(b.begin(), b.end());
        CHECK(a == b);
    }
}

TEST_CASE("model json round trips") {
    Community c{"kibera", "Kibera notices", "u-amina", "Ward 3", {"water", "health"}, CommunityVisibility::private_,
                {"u-amina", "u-baraka"}, {"k-1", "k-2"}};
    CHECK(community_from_json(to_json(c)) == c);

    ContentItem i = item("k-1", GeoPoint{-1.31, 36.78}, 12, "2019-07-01T06:00:00Z");
    i.page_id = "p-1";
    i.community_id = "kibera";
    i.language = "sw-KE";
    CHECK(content_from_json(to_json(i)) == i);

    UserProfile u{"u-amina", "Amina", Fidelity::low, "sw-KE", GeoPoint{-1.31, 36.78}, {"water"}, {"kibera"}};
    CHECK(user_from_json(to_json(u)) == u);

    RequestLog r{parse_utc("2019-07-01T06:00:00Z"), "p-1", Fidelity::low, 9000, 1600.5, GeoPoint{-1.31, 36.78}, "3g",
                 "SM-J200G"};
    CHECK(request_log_from_json(to_json(r)) == r);
    r.plt_ms.reset();
    r.geo.reset();
    CHECK(request_log_from_json(to_json(r)) == r);

    auto ad = global_image_ad("maize", 500);
    ad.geo_target = adx::GeoTarget{GeoPoint{-1.3, 36.8}, 5};
    ad.interest_tags = {"food"};
    ad.served_impressions = 17;
    CHECK(campaign_from_json(to_json(ad)) == ad);

    CHECK(code_of([] { user_from_json(json{{"fidelity", "ultra"}}); }) == Errc::invalid_argument);
    CHECK(code_of([] { content_from_json(json{{"id", "x"}, {"kind", "poem"}}); }) == Errc::invalid_argument);
    CHECK(code_of([] { request_log_from_json(json::array()); }) == Errc::invalid_argument);
    CHECK(coarse(GeoPoint{-1.31337, 36.78761}) == GeoPoint{-1.31, 36.79});
}

TEST_CASE("publish_page and get") {
    EdgeHarness h;
    const auto amina = h.user("u-amina", GeoPoint{-1.3133, 36.7876});
    const auto id = h->publish_page("u-amina", std::nullopt, kThreeObjects);
    const auto stored = maml::parse_page(h->get_page(id, std::nullopt));
    const auto sent = maml::parse_page(kThreeObjects);
    CHECK(stored.objects == sent.objects);
    CHECK(stored.author_id == "u-amina");
    CHECK(stored.version == 1);
    // Language and location come from the author's profile.
    CHECK(stored.language == "en-KE");
    CHECK(stored.location == std::optional<GeoPoint>(GeoPoint{-1.3133, 36.7876}));
    CHECK(stored.created_at == h.clock.now());

    // Republishing the same id bumps the version and keeps created_at.
    auto doc = json::parse(h->get_page(id, std::nullopt));
    doc["objects"][1]["txt"] = "Kiosk 4 opens at 8";
    h.clock.advance(std::chrono::hours(2));
    CHECK(h->publish_page("u-amina", std::nullopt, doc.dump()) == id);
    const auto v2 = maml::parse_page(h->get_page(id, std::nullopt));
    CHECK(v2.version == 2);
    CHECK(v2.created_at == stored.created_at);
    CHECK(v2.updated_at == h.clock.now());
    CHECK(std::get<maml::Text>(v2.objects[1]).txt == "Kiosk 4 opens at 8");

    // Another author cannot overwrite it.
    h.user("u-other");
    CHECK(code_of([&] { h->publish_page("u-other", std::nullopt, doc.dump()); }) == Errc::forbidden);
    CHECK(code_of([&] { h->publish_page("u-ghost", std::nullopt, kThreeObjects); }) == Errc::unauthorized);
    CHECK(code_of([&] { h->publish_page("u-amina", std::string("nowhere"), kThreeObjects); }) == Errc::unknown_community);
    CHECK(code_of([&] { h->get_page("missing", std::nullopt); }) == Errc::not_found);
}

TEST_CASE("publish_page reports every violated rule") {
    EdgeHarness h;
    h.user("u-amina");
    try {
        h->publish_page("u-amina", std::nullopt, kBadColor);
        FAIL("expected ValidationFailed");
    } catch (const ValidationFailed& e) {
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].rule == "color-format");
        CHECK(e.violations()[0].object_index == 1);
        CHECK(e.code() == Errc::validation_failed);
    }
    try {
        h->publish_page("u-amina", std::nullopt, "{\"objects\": [");
        FAIL("expected ValidationFailed");
    } catch (const ValidationFailed& e) {
        CHECK(e.violations().size() == 1);
    }
    CHECK(h->store().read_all("content").empty());
}

TEST_CASE("publish then serve at high fidelity returns the published objects") {
    EdgeHarness h;
    h.user("u-ruth");
    const auto id = h.publish_news("u-ruth");
    const auto published = maml::parse_page(h->get_page(id, std::nullopt));
    const auto served = h->serve_page(id, std::nullopt, Fidelity::high);
    const auto page = maml::parse_page(served.document);
    CHECK(page.objects == published.objects);
    CHECK(served.document == h->get_page(id, std::nullopt));
    CHECK(served.ad_ids.empty());
}

TEST_CASE("serve_page on the news fixture") {
    EdgeHarness h;
    h.user("u-ruth");
    const auto id = h.publish_news("u-ruth");

    std::array<std::uint64_t, 3> size{};
    for (auto f : policy::kAllFidelities) {
        const auto served = h->serve_page(id, std::nullopt, f);
        CHECK(served.fidelity == f);
        // Independent weight: the document plus the bytes the client would fetch.
        std::uint64_t expect = served.document.size();
        for (const auto& obj : maml::parse_page(served.document).objects) {
            if (const auto* url = maml::media_url(obj)) {
                const auto mid = policy::media_id_of(*url);
                REQUIRE(mid.has_value());
                const auto q = url->find("?fidelity=");
                const auto vf = q == std::string::npos ? Fidelity::high : policy::parse_fidelity(url->substr(q + 10));
                CHECK(vf == f);
                expect += h->get_media(*mid, vf).bytes.size();
            }
        }
        CHECK(served.page_size == expect);
        size[static_cast<std::size_t>(f)] = served.page_size;
    }
    MESSAGE("news weights low/medium/high: " << size[0] << " " << size[1] << " " << size[2]);
    CHECK(size[0] < size[1]);
    CHECK(size[1] < size[2]);
    CHECK(static_cast<double>(size[0]) <= 0.25 * static_cast<double>(size[2]));

    // Fidelity from the profile, then from network hints.
    UserProfile slow;
    slow.user_id = "u-slow";
    slow.preferred_fidelity = Fidelity::low;
    h->register_user(slow);
    CHECK(h->serve_page(id, std::string("u-slow"), std::nullopt).fidelity == Fidelity::low);
    CHECK(h->serve_page(id, std::string("u-slow"), Fidelity::high).fidelity == Fidelity::high);
    ClientInfo edge_2g;
    edge_2g.network = policy::NetworkHint{900, 100};
    CHECK(h->serve_page(id, std::nullopt, std::nullopt, edge_2g).fidelity == Fidelity::low);
    CHECK(h->serve_page(id, std::nullopt, std::nullopt).fidelity == Fidelity::medium);
}

TEST_CASE("unknown page is NotFound and logs nothing") {
    EdgeHarness h;
    CHECK(code_of([&] { h->serve_page("no-such-page", std::nullopt, Fidelity::low); }) == Errc::not_found);
    CHECK(code_of([&] { h->serve_page("../etc/passwd", std::nullopt, Fidelity::low); }) == Errc::not_found);
    CHECK(h->pending_count() == 0);
    h->flush_all();
    CHECK(h->store().read_log().empty());
}

TEST_CASE("serving is deterministic for a frozen inventory") {
    EdgeHarness h;
    h.user("u-ruth");
    const auto id = h.publish_news("u-ruth");
    h->submit_campaign(global_image_ad("maize", 100));
    const auto a = h->serve_page(id, std::nullopt, Fidelity::medium);
    const auto b = h->serve_page(id, std::nullopt, Fidelity::medium);
    CHECK(a.document == b.document);
    CHECK(a.page_size == b.page_size);
    CHECK(a.ad_ids == std::vector<std::string>{"maize"});
    CHECK(a.token != b.token);
    CHECK(h->exchange().get("maize")->served_impressions == 2);
    CHECK(a.document.find("https://ads.example/maize.jpg") != std::string::npos);

    // At low fidelity the text creative fills the slot.
    const auto low = h->serve_page(id, std::nullopt, Fidelity::low);
    CHECK(low.document.find("Maize flour 10% off") != std::string::npos);
    // High fidelity wants a video creative, which this campaign lacks.
    CHECK(h->serve_page(id, std::nullopt, Fidelity::high).ad_ids.empty());
    CHECK(h->exchange().get("maize")->served_impressions == 3);
}

TEST_CASE("concurrent serving never exceeds an impression target") {
    EdgeHarness h;
    h.user("u-ruth");
    const auto id = h.publish_news("u-ruth");
    h->submit_campaign(global_image_ad("capped", 50));
    std::atomic<int> with_ad{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 8; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 12; ++i) with_ad += !h->serve_page(id, std::nullopt, Fidelity::medium).ad_ids.empty();
        });
    }
    for (auto& t : threads) t.join();
    CHECK(with_ad == 50);
    CHECK(h->exchange().get("capped")->served_impressions == 50);
    CHECK(h->pending_count() == 96);
}

TEST_CASE("log_metrics") {
    EdgeHarness h;
    h.user("u-ruth");
    const auto id = h.publish_news("u-ruth");
    ClientInfo client;
    client.location = GeoPoint{0.51432, 35.26981};
    client.network_type = "3g";
    client.device_model = "SM-J200G";
    const auto served = h->serve_page(id, std::nullopt, Fidelity::low, client);
    CHECK(h->store().read_log().empty());

    const auto rec = h->log_metrics(served.token, 1600);
    CHECK(rec.plt_ms == std::optional<double>(1600));
    CHECK(rec.page_size == served.page_size);
    const auto log = h->store().read_log();
    REQUIRE(log.size() == 1);
    CHECK(log[0] == rec);
    CHECK(log[0].page_id == id);
    CHECK(log[0].fidelity == Fidelity::low);
    CHECK(log[0].geo == std::optional<GeoPoint>(GeoPoint{0.51, 35.27}));
    CHECK(log[0].network_type == "3g");
    CHECK(log[0].device_model == "SM-J200G");
    CHECK(log[0].timestamp == h.clock.now());

    CHECK(code_of([&] { h->log_metrics(served.token, 1700); }) == Errc::unknown_token);
    CHECK(code_of([&] { h->log_metrics("nope", 1700); }) == Errc::unknown_token);
    CHECK(code_of([&] { h->log_metrics(h->serve_page(id, std::nullopt, Fidelity::low).token, -1); }) ==
          Errc::invalid_argument);

    // A request whose client never reports is logged without a PLT once the TTL passes.
    h->flush_all();
    const auto before = h->store().read_log().size();
    const auto silent = h->serve_page(id, std::nullopt, Fidelity::medium);
    h.clock.advance(std::chrono::seconds(299));
    CHECK(h->flush_expired() == 0);
    h.clock.advance(std::chrono::seconds(1));
    CHECK(h->flush_expired() == 1);
    const auto after = h->store().read_log();
    REQUIRE(after.size() == before + 1);
    CHECK_FALSE(after.back().plt_ms.has_value());
    CHECK(code_of([&] { h->log_metrics(silent.token, 900); }) == Errc::unknown_token);
}

TEST_CASE("every served page yields exactly one log record") {
    EdgeHarness h;
    h.user("u-ruth");
    const auto id = h.publish_news("u-ruth");
    std::vector<std::string> tokens;
    for (int i = 0; i < 30; ++i) tokens.push_back(h->serve_page(id, std::nullopt, policy::kAllFidelities[i % 3]).token);
    for (std::size_t i = 0; i < tokens.size(); i += 2) h->log_metrics(tokens[i], 1000.0 + static_cast<double>(i));
    h.restart();
    const auto log = h->store().read_log();
    CHECK(log.size() == 30);
    CHECK(std::count_if(log.begin(), log.end(), [](const auto& r) { return r.plt_ms.has_value(); }) == 15);
}

TEST_CASE("metrics summary matches the offline aggregation") {
    std::vector<RequestLog> trace;
    std::ifstream in(kFixtures / "metrics" / "trace.jsonl");
    std::string line;
    while (std::getline(in, line)) trace.push_back(request_log_from_json(json::parse(line)));
    const auto expected = json::parse(slurp(kFixtures / "metrics" / "summary.json"));
    const auto got = summarize(trace);
    CHECK(got.requests == expected["requests"].get<std::size_t>());
    CHECK(got.by_fidelity[0] == expected["by_fidelity"]["low"].get<std::size_t>());
    CHECK(got.by_fidelity[1] == expected["by_fidelity"]["medium"].get<std::size_t>());
    CHECK(got.by_fidelity[2] == expected["by_fidelity"]["high"].get<std::size_t>());
    for (const auto& [name, dist] : {std::pair{"page_size", got.page_size}, std::pair{"plt_ms", got.plt_ms}}) {
        CAPTURE(name);
        const auto& e = expected[name];
        CHECK(dist.count == e["count"].get<std::size_t>());
        for (const auto& [key, value] : {std::pair{"min", dist.min}, std::pair{"p50", dist.p50}, std::pair{"p90", dist.p90},
                                         std::pair{"p95", dist.p95}, std::pair{"max", dist.max}, std::pair{"mean", dist.mean}}) {
            CAPTURE(key);
            CHECK(value == doctest::Approx(e[key].get<double>()).epsilon(1e-12));
        }
    }
    CHECK(percentile({1, 2, 3, 4}, 50) == 2.5);
    CHECK(percentile({7}, 90) == 7);
    CHECK(code_of([] { percentile({}, 50); }) == Errc::invalid_argument);
}

TEST_CASE("private community isolation matrix") {
    EdgeHarness h;
    h.user("u-owner");
    h.user("u-member");
    h.user("u-outsider");
    for (const auto* vis : {"public", "private"}) {
        Community draft;
        draft.community_id = std::string("c-") + vis;
        draft.name = vis;
        draft.visibility = std::string(vis) == "private" ? CommunityVisibility::private_ : CommunityVisibility::public_;
        h->create_community("u-owner", draft);
        h->add_member(draft.community_id, "u-owner", "u-member");
    }
    // Only the owner adds members to a private community; anyone joins a public one.
    CHECK(code_of([&] { h->add_member("c-private", "u-member", "u-outsider"); }) == Errc::forbidden);
    CHECK(code_of([&] { h->add_member("c-private", "u-outsider", "u-outsider"); }) == Errc::forbidden);
    CHECK(code_of([&] { h->publish_page("u-outsider", std::string("c-private"), kThreeObjects); }) == Errc::forbidden);

    const std::map<std::string, std::string> pages{
        {"c-public", h->publish_page("u-member", std::string("c-public"), kThreeObjects)},
        {"c-private", h->publish_page("u-member", std::string("c-private"), kThreeObjects)},
    };
    const std::vector<std::optional<std::string>> roles{std::nullopt, "u-outsider", "u-member", "u-owner"};
    for (const auto& [community, page] : pages) {
        const bool is_private = community == "c-private";
        for (const auto& role : roles) {
            CAPTURE(community);
            CAPTURE(role.value_or("anonymous"));
            const bool member = role && *role != "u-outsider";
            const Errc denied = role ? Errc::forbidden : Errc::unauthorized;
            const auto pending = h->pending_count();
            if (!is_private || member) {
                CHECK_NOTHROW(h->get_page(page, role));
                CHECK_NOTHROW(h->serve_page(page, role, Fidelity::low));
                CHECK(h->pending_count() == pending + 1);
                CHECK(ids(h->feed(community, role)).size() == 1);
            } else {
                CHECK(code_of([&] { h->get_page(page, role); }) == denied);
                CHECK(code_of([&] { h->serve_page(page, role, Fidelity::low); }) == denied);
                CHECK(code_of([&] { h->feed(community, role); }) == denied);
                CHECK(h->pending_count() == pending);
            }
            const auto listed = h->list_communities(role);
            const bool visible = std::any_of(listed.begin(), listed.end(),
                                             [&](const Community& c) { return c.community_id == community; });
            CHECK(visible == (!is_private || member));
        }
    }
}

TEST_CASE("media upload and variants") {
    EdgeHarness h;
    const auto jpeg = slurp(kFixtures / "images" / "hero.jpg");
    const auto id = h->put_media(jpeg);
    CHECK(id == content_id(jpeg).substr(0, 16));
    CHECK(h->put_media(jpeg) == id);
    const auto set = h->variants(id);
    REQUIRE(set.has_value());
    CHECK(set->ordered());
    for (auto f : policy::kAllFidelities) {
        const auto blob = h->get_media(id, f);
        CHECK(blob.mime == "image/jpeg");
        CHECK(blob.bytes.size() == set->at(f)->byte_size);
    }
    CHECK(code_of([&] { h->get_media("0000000000000000", Fidelity::low); }) == Errc::not_found);
    CHECK(code_of([&] { h->put_media("not an image"); }) == Errc::unsupported_image_format);

    // A video takes its low variant from the poster image.
    std::string mp4("\0\0\0\x18" "ftypmp42", 12);
    mp4 += std::string(4096, '\x42');
    const auto vid = h->put_media(mp4, id);
    const auto vset = h->variants(vid);
    REQUIRE(vset.has_value());
    CHECK(vset->video);
    CHECK(h->get_media(vid, Fidelity::high).mime == "video/mp4");
    CHECK(h->get_media(vid, Fidelity::low).bytes == h->get_media(id, Fidelity::low).bytes);
    CHECK(code_of([&] { h->put_media(mp4 + "x", std::string("missing")); }) == Errc::not_found);
}

TEST_CASE("campaigns and quotes") {
    EdgeHarness h;
    auto c = global_image_ad("bread", 1000);
    c.advertiser_id = "adv-1";
    h->submit_campaign(c);
    auto q = h->quote("bread");
    CHECK(q.weekly_charge == 80.0);
    for (int i = 2; i <= 7; ++i) {
        auto other = global_image_ad("ad-" + std::to_string(i), 10);
        other.advertiser_id = "adv-" + std::to_string(i);
        h->submit_campaign(other);
    }
    q = h->quote("bread");
    CHECK(q.base_component == 10.0);
    CHECK(q.infra_component == 10.0);
    CHECK(q.weekly_charge == 20.0);
    CHECK(code_of([&] { h->quote("missing"); }) == Errc::unknown_ad);
    auto local = global_image_ad("local", 10);
    local.home_community_id = "nowhere";
    CHECK(code_of([&] { h->submit_campaign(local); }) == Errc::unknown_community);
}

TEST_CASE("state survives a restart") {
    EdgeHarness h;
    const auto reg = h.user("u-ruth");
    Community draft;
    draft.community_id = "valley";
    draft.name = "Valley";
    h->create_community("u-ruth", draft);
    const auto id = h.publish_news("u-ruth", std::string("valley"));
    h->submit_campaign(global_image_ad("maize", 100));
    h->serve_page(id, std::nullopt, Fidelity::medium);
    const auto token = h->serve_page(id, std::nullopt, Fidelity::medium).token;
    h.restart();
    CHECK(h->authenticate(reg.token) == std::optional<std::string>("u-ruth"));
    CHECK(h->exchange().get("maize")->served_impressions == 2);
    CHECK(h->community("valley")->content_ids.size() == 1);
    const auto feed = h->feed("valley", std::nullopt);
    REQUIRE(feed.size() == 1);
    CHECK(feed[0].views == 2);
    CHECK(h->store().read_log().size() == 2);
    // Pending tokens do not survive: their records were flushed on shutdown.
    CHECK(code_of([&] { h->log_metrics(token, 100); }) == Errc::unknown_token);
}

TEST_CASE("a sweep persists counters without a restart") {
    EdgeHarness h;
    h.user("u-ruth");
    Community draft;
    draft.community_id = "valley";
    draft.name = "Valley";
    h->create_community("u-ruth", draft);
    const auto id = h.publish_news("u-ruth", std::string("valley"));
    h->submit_campaign(global_image_ad("maize", 100));
    h->serve_page(id, std::nullopt, Fidelity::medium);
    h->flush_expired();
    const auto ad = h->store().read_record("campaigns", "maize");
    REQUIRE(ad.has_value());
    CHECK((*ad)["served_impressions"] == 1);
    const auto feed = h->feed("valley", std::nullopt);
    REQUIRE(feed.size() == 1);
    const auto item = h->store().read_record("content", feed[0].content_id);
    REQUIRE(item.has_value());
    CHECK((*item)["views"] == 1);
}

TEST_CASE("store writes are never torn") {
    gaius::testing::TempDir dir;
    FileStore store(dir.path());
    maml::Page v1 = maml::parse_page(kThreeObjects);
    v1.page_id = "notice";
    v1.version = 1;
    store.update_page("notice", [&](const auto&) { return v1; });

    // A crash after writing a temp file but before the rename leaves the old page.
    std::ofstream(dir.path() / "pages" / "notice.json.tmp.999.0") << "{\"page\":{\"id\":\"notice\",\"vers";
    CHECK(store.read_page("notice") == std::optional<maml::Page>(v1));
    CHECK(FileStore(dir.path()).read_all("pages").size() == 1);

    // Kill a writer at arbitrary points: the page always parses whole.
    for (int round = 0; round < 4; ++round) {
        const pid_t child = ::fork();
        REQUIRE(child >= 0);
        if (child == 0) {
            FileStore writer(dir.path());
            for (std::int64_t v = 2;; ++v) {
                writer.update_page("notice", [&](const std::optional<maml::Page>& cur) {
                    maml::Page next = cur.value_or(v1);
                    next.version = v;
                    auto& t = std::get<maml::Text>(next.objects[1]);
                    t.txt = std::string(static_cast<std::size_t>(v % 5000), 'x');
                    t.box.h = 26;
                    t.box.w = 1000;
                    return next;
                });
            }
        }
        ::usleep(static_cast<useconds_t>(20000 + round * 15000));
        ::kill(child, SIGKILL);
        ::waitpid(child, nullptr, 0);
        const auto page = store.read_page("notice");
        REQUIRE(page.has_value());
        CHECK(page->version >= 1);
    }
}

TEST_CASE("http endpoints") {
    EdgeHarness h;
    HttpServer server(*h);
    const int port = server.start("127.0.0.1", 0);
    REQUIRE(port > 0);
    httplib::Client cli("127.0.0.1", port);
    cli.set_read_timeout(std::chrono::seconds(10));

    auto health = cli.Get("/healthz");
    REQUIRE(health);
    CHECK(health->status == 200);

    auto reg = cli.Post("/v1/users", R"({"id":"u-ruth","language":"en-KE","location":{"lat":0.5143,"lon":35.2698}})",
                        "application/json");
    REQUIRE(reg);
    REQUIRE(reg->status == 201);
    const auto token = json::parse(reg->body)["token"].get<std::string>();
    const httplib::Headers auth{{"Authorization", "Bearer " + token}};

    auto com = cli.Post("/v1/communities", auth, R"({"id":"valley","name":"Valley","visibility":"private"})",
                        "application/json");
    REQUIRE(com);
    CHECK(com->status == 201);

    for (const auto& entry : std::filesystem::directory_iterator(kFixtures / "news" / "media")) {
        auto up = cli.Post("/v1/media", auth, slurp(entry.path()), "image/jpeg");
        REQUIRE(up);
        CHECK(up->status == 201);
        CHECK(json::parse(up->body)["id"] == entry.path().stem().string());
    }

    auto pub = cli.Post("/v1/pages?community=valley", auth, slurp(kFixtures / "news" / "page.json"), "application/json");
    REQUIRE(pub);
    REQUIRE(pub->status == 201);
    const auto page_id = json::parse(pub->body)["page_id"].get<std::string>();

    // Private: anonymous gets 401, an unknown token 401 too.
    auto anon = cli.Get("/v1/pages/" + page_id + "?fidelity=low");
    REQUIRE(anon);
    CHECK(anon->status == 401);
    CHECK(json::parse(anon->body)["error"] == "Unauthorized");
    auto bogus = cli.Get("/v1/pages/" + page_id, httplib::Headers{{"Authorization", "Bearer deadbeef"}});
    REQUIRE(bogus);
    CHECK(bogus->status == 401);

    httplib::Headers slow = auth;
    slow.emplace("RTT", "900");
    slow.emplace("Downlink", "0.2");
    slow.emplace("ECT", "2g");
    slow.emplace("Sec-CH-UA-Model", "\"SM-J200G\"");
    auto got = cli.Get("/v1/pages/" + page_id, slow);
    REQUIRE(got);
    REQUIRE(got->status == 200);
    CHECK(got->get_header_value("X-Gaius-Fidelity") == "low");
    const auto req_token = got->get_header_value("X-Gaius-Request");
    CHECK_FALSE(req_token.empty());
    CHECK(std::stoull(got->get_header_value("X-Gaius-Page-Size")) > got->body.size());
    CHECK(maml::parse_page(got->body).page_id == page_id);

    auto media = cli.Get("/v1/media/0000000000000000?fidelity=low");
    REQUIRE(media);
    CHECK(media->status == 404);

    auto metrics = cli.Post("/v1/metrics", json{{"token", req_token}, {"plt_ms", 1600}}.dump(), "application/json");
    REQUIRE(metrics);
    CHECK(metrics->status == 200);
    CHECK(json::parse(metrics->body)["device_model"] == "SM-J200G");
    auto again = cli.Post("/v1/metrics", json{{"token", req_token}, {"plt_ms", 1600}}.dump(), "application/json");
    REQUIRE(again);
    CHECK(again->status == 404);

    auto bad = cli.Post("/v1/pages", auth, kBadColor, "application/json");
    REQUIRE(bad);
    CHECK(bad->status == 422);
    CHECK(json::parse(bad->body)["violations"][0]["rule"] == "color-format");

    auto missing = cli.Get("/v1/pages/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);

    auto feed = cli.Get("/v1/communities/valley/feed?alpha=0.3", auth);
    REQUIRE(feed);
    CHECK(feed->status == 200);
    CHECK(json::parse(feed->body)["items"].size() == 1);

    auto ad = cli.Post("/v1/ads", auth,
                       R"({"creatives":{"text":"Seeds in stock"},"click_href":"https://agro.example/",
                           "visibility":"global","target_impressions":1000,
                           "start":"2019-06-01T00:00:00Z","end":"2019-08-01T00:00:00Z"})",
                       "application/json");
    REQUIRE(ad);
    REQUIRE(ad->status == 201);
    const auto ad_json = json::parse(ad->body);
    CHECK(ad_json["quote"]["weekly_charge"] == 80.0);
    auto quote = cli.Post("/v1/ads/" + ad_json["ad_id"].get<std::string>() + "/quote", "", "application/json");
    REQUIRE(quote);
    CHECK(json::parse(quote->body)["weekly_charge"] == 80.0);
    auto no_creative = cli.Post("/v1/ads", auth, R"({"click_href":"x","target_impressions":1,
        "start":"2019-06-01T00:00:00Z","end":"2019-08-01T00:00:00Z"})", "application/json");
    REQUIRE(no_creative);
    CHECK(no_creative->status == 400);

    auto list = cli.Get("/v1/communities");
    REQUIRE(list);
    CHECK(json::parse(list->body).empty());
    auto malformed = cli.Post("/v1/users", "{", "application/json");
    REQUIRE(malformed);
    CHECK(malformed->status == 400);

    server.stop();
    // Shutdown appended the record that never got a PLT report: none here.
    CHECK(h->store().read_log().size() == 1);
}
