#include "gaius/adx/exchange.hpp"
#include "gaius/common/error.hpp"

#include "adx_oracle.hpp"

#include <doctest.h>

#include <atomic>
#include <thread>

using namespace gaius;
using namespace gaius::adx;
using policy::Fidelity;

namespace {

Errc code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected an Error");
    return Errc::io_error;
}

const Timestamp kNow = parse_utc("2019-07-01T12:00:00Z");

AdCampaign text_ad(std::string id) {
    AdCampaign c;
    c.ad_id = std::move(id);
    c.advertiser_id = "adv";
    c.creatives.text_body = "Fresh bread daily";
    c.click_href = "https://bakery.example/";
    c.home_community_id = "kibera";
    c.target_impressions = 10;
    c.active_start = kNow - std::chrono::hours(1);
    c.active_end = kNow + std::chrono::hours(24 * 7);
    return c;
}

AdContext ctx_low() {
    AdContext ctx;
    ctx.user_location = GeoPoint{-1.3133, 36.7876};
    ctx.community_id = "kibera";
    ctx.fidelity = Fidelity::low;
    ctx.now = kNow;
    return ctx;
}

std::vector<std::string> ids(const std::vector<AdCampaign>& v) {
    std::vector<std::string> out;
    for (const auto& c : v) out.push_back(c.ad_id);
    return out;
}

}  // namespace

TEST_CASE("submit_campaign") {
    AdExchange ex;
    CHECK(ex.submit(text_ad("bread")) == "bread");

    auto none = text_ad("none");
    none.creatives = {};
    CHECK(code_of([&] { ex.submit(none); }) == Errc::no_creative);
    none.creatives.text_body = "";
    CHECK(code_of([&] { ex.submit(none); }) == Errc::no_creative);

    auto window = text_ad("window");
    window.active_end = window.active_start;
    CHECK(code_of([&] { ex.submit(window); }) == Errc::invalid_window);

    auto radius = text_ad("radius");
    radius.geo_target = GeoTarget{GeoPoint{0, 0}, 0};
    CHECK(code_of([&] { ex.submit(radius); }) == Errc::invalid_argument);

    auto zero = text_ad("zero");
    zero.target_impressions = 0;
    CHECK(code_of([&] { ex.submit(zero); }) == Errc::invalid_argument);

    CHECK(ex.snapshot().size() == 1);
}

TEST_CASE("text-only campaign serves only at low fidelity") {
    AdExchange ex;
    ex.submit(text_ad("bread"));
    auto ctx = ctx_low();
    CHECK(ids(ex.select(ctx, 3)) == std::vector<std::string>{"bread"});
    ctx.fidelity = Fidelity::medium;
    CHECK(ex.select(ctx, 3).empty());
    ctx.fidelity = Fidelity::high;
    CHECK(ex.select(ctx, 3).empty());
}

TEST_CASE("resubmission replaces the campaign and keeps its counter") {
    AdExchange ex;
    ex.submit(text_ad("bread"));
    ex.record_impression("bread");
    ex.record_impression("bread");
    auto changed = text_ad("bread");
    changed.creatives.text_body = "Bread and mandazi";
    changed.served_impressions = 0;  // ignored on submit
    ex.submit(changed);
    const auto stored = ex.get("bread");
    REQUIRE(stored.has_value());
    CHECK(stored->creatives.text_body == std::optional<std::string>("Bread and mandazi"));
    CHECK(stored->served_impressions == 2);
    CHECK(ex.record_impression("bread") == 3);

    // Lowering the target below the count caps the counter at the target.
    changed.target_impressions = 2;
    ex.submit(changed);
    CHECK(ex.get("bread")->served_impressions == 2);
    CHECK(code_of([&] { ex.record_impression("bread"); }) == Errc::target_reached);
}

TEST_CASE("record_impression") {
    AdExchange ex;
    auto c = text_ad("one");
    c.target_impressions = 1;
    ex.submit(c);
    CHECK(ex.record_impression("one") == 1);
    CHECK(code_of([&] { ex.record_impression("one"); }) == Errc::target_reached);
    CHECK(ex.get("one")->served_impressions == 1);
    CHECK(code_of([&] { ex.record_impression("nope"); }) == Errc::unknown_ad);
    // At its target the campaign is no longer eligible.
    CHECK(ex.select(ctx_low(), 5).empty());
}

TEST_CASE("100 concurrent impressions against a target of 60") {
    AdExchange ex;
    auto c = text_ad("capped");
    c.target_impressions = 60;
    ex.submit(c);
    std::atomic<int> ok{0}, refused{0};
    std::vector<std::thread> threads;
    for (int i = 0; i < 100; ++i) {
        threads.emplace_back([&] {
            try {
                ex.record_impression("capped");
                ++ok;
            } catch (const Error& e) {
                if (e.code() == Errc::target_reached) ++refused;
            }
        });
    }
    for (auto& t : threads) t.join();
    CHECK(ok == 60);
    CHECK(refused == 40);
    CHECK(ex.get("capped")->served_impressions == 60);
}

TEST_CASE("impression conservation under concurrent resubmission") {
    AdExchange ex;
    auto c = text_ad("busy");
    c.target_impressions = 1000000;
    ex.submit(c);
    std::atomic<std::uint64_t> ok{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&] {
            for (int i = 0; i < 500; ++i) {
                ex.record_impression("busy");
                ++ok;
            }
        });
    }
    threads.emplace_back([&] {
        for (int i = 0; i < 50; ++i) ex.submit(c);
    });
    for (auto& t : threads) t.join();
    CHECK(ex.get("busy")->served_impressions == ok.load());
}

TEST_CASE("select_ads examples") {
    CHECK(select_ads(ctx_low(), 3, {}).empty());
    CHECK(ids(select_ads(ctx_low(), 3, {text_ad("only")})) == std::vector<std::string>{"only"});
    CHECK(select_ads(ctx_low(), 0, {text_ad("only")}).empty());

    auto far = text_ad("far");
    far.geo_target = GeoTarget{GeoPoint{-4.0435, 39.6682}, 50};  // Mombasa
    auto near = text_ad("near");
    near.geo_target = GeoTarget{GeoPoint{-1.29, 36.82}, 10};
    auto other = text_ad("other-community");
    other.home_community_id = "mathare";
    auto global = text_ad("global");
    global.home_community_id = "mathare";
    global.visibility = Visibility::global;
    auto future = text_ad("future");
    future.active_start = kNow + std::chrono::hours(1);
    auto ended = text_ad("ended");
    ended.active_end = kNow;
    CHECK(ids(select_ads(ctx_low(), 10, {far, near, other, global, future, ended})) ==
          std::vector<std::string>{"global", "near"});
}

TEST_CASE("select_ads ranking") {
    auto a = text_ad("a");
    auto b = text_ad("b");
    auto c = text_ad("c");
    auto d = text_ad("d");
    a.interest_tags = {"food"};
    b.interest_tags = {"food", "music"};
    c.interest_tags = {"food"};
    c.served_impressions = 0;
    a.served_impressions = 3;
    d.interest_tags = {};
    auto ctx = ctx_low();
    ctx.interest_tags = {"food", "music"};
    CHECK(ids(select_ads(ctx, 4, {a, b, c, d})) == std::vector<std::string>{"b", "c", "a", "d"});
    CHECK(ids(select_ads(ctx, 2, {d, c, b, a})) == std::vector<std::string>{"b", "c"});
}

TEST_CASE("select_ads matches the brute-force oracle on random inventories") {
    gaius::testing::AdGenerator gen(7);
    int non_empty = 0, multi = 0;
    for (int instance = 0; instance < 500; ++instance) {
        const auto inventory = gen.inventory(10);
        const auto ctx = gen.context();
        const auto k = static_cast<std::size_t>(gen.pick(0, 4));
        CAPTURE(instance);
        const auto got = select_ads(ctx, k, inventory);
        non_empty += !got.empty();
        multi += got.size() > 1;
        CHECK(ids(got) == gaius::testing::oracle_select(ctx, k, inventory));
        // No returned campaign violates an eligibility clause.
        for (const auto& c : got) CHECK(eligible(c, ctx));
        // Determinism.
        CHECK(ids(select_ads(ctx, k, inventory)) == ids(got));
    }
    MESSAGE("non-empty selections: " << non_empty << ", with ranking: " << multi);
    CHECK(non_empty >= 100);
    CHECK(multi >= 30);
}

TEST_CASE("creative_for follows the fidelity mapping") {
    AdCampaign c = text_ad("all");
    c.creatives.video_url = "https://ads.example/v.mp4";
    c.creatives.image_url = "/v1/media/img";
    CHECK(creative_for(c, Fidelity::high)->format == policy::AdFormat::video);
    CHECK(creative_for(c, Fidelity::high)->content == "https://ads.example/v.mp4");
    CHECK(creative_for(c, Fidelity::medium)->content == "/v1/media/img");
    CHECK(creative_for(c, Fidelity::low)->content == "Fresh bread daily");
    CHECK(creative_for(c, Fidelity::low)->click_href == "https://bakery.example/");
    CHECK_FALSE(creative_for(text_ad("t"), Fidelity::high).has_value());
}

TEST_CASE("quote_price") {
    auto c = text_ad("q");
    c.target_impressions = 1000;
    const auto one = quote_price(c, ExchangeState{70, 1}, 0.01, kNow);
    CHECK(one.base_component == 10.0);
    CHECK(one.infra_component == 70.0);
    CHECK(one.weekly_charge == 80.0);
    CHECK(one.quoted_at == kNow);
    const auto seven = quote_price(c, ExchangeState{70, 7}, 0.01);
    CHECK(seven.base_component == 10.0);
    CHECK(seven.infra_component == 10.0);
    CHECK(seven.weekly_charge == 20.0);
    CHECK(code_of([&] { quote_price(c, ExchangeState{70, 0}, 0.01); }) == Errc::invalid_argument);

    double prev = quote_price(c, ExchangeState{70, 1}, 0.01).infra_component;
    for (std::uint64_t n = 2; n <= 100; ++n) {
        const auto q = quote_price(c, ExchangeState{70, n}, 0.01);
        CHECK(q.infra_component <= prev);
        CHECK(q.weekly_charge == q.base_component + q.infra_component);
        prev = q.infra_component;
    }
    double prev_charge = -1;
    for (std::uint64_t t = 1; t <= 100; ++t) {
        c.target_impressions = t;
        const auto q = quote_price(c, ExchangeState{70, 3}, 0.01);
        CHECK(q.weekly_charge > prev_charge);
        prev_charge = q.weekly_charge;
    }
}

TEST_CASE("active advertisers") {
    AdExchange ex;
    auto a = text_ad("a");
    auto b = text_ad("b");
    auto c = text_ad("c");
    c.advertiser_id = "other";
    auto old = text_ad("old");
    old.advertiser_id = "gone";
    old.active_start = kNow - std::chrono::hours(48);
    old.active_end = kNow - std::chrono::hours(24);
    for (const auto& x : {a, b, c, old}) ex.submit(x);
    CHECK(ex.active_advertiser_count(kNow) == 2);
}

TEST_CASE("restore keeps persisted counters") {
    AdExchange ex;
    auto c = text_ad("r");
    c.served_impressions = 7;
    ex.restore({c});
    CHECK(ex.get("r")->served_impressions == 7);
    CHECK(ex.record_impression("r") == 8);
}
