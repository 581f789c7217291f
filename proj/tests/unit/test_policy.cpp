#include "gaius/common/error.hpp"
#include "gaius/maml/codec.hpp"
#include "gaius/maml/geometry.hpp"
#include "gaius/maml/validate.hpp"
#include "gaius/policy/assemble.hpp"
#include "gaius/policy/fidelity.hpp"
#include "gaius/policy/image_codec.hpp"
#include "gaius/policy/transcode.hpp"

#include "golden.hpp"

#include <doctest.h>

#include <filesystem>
#include <map>

using namespace gaius;
using namespace gaius::policy;
using gaius::testing::slurp;

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

struct MemoryVariants {
    std::map<std::string, MediaVariantSet, std::less<>> sets;
    std::map<std::string, std::array<std::uint64_t, 3>, std::less<>> byte_lengths;

    VariantLookup lookup() const {
        return [this](std::string_view id) -> std::optional<MediaVariantSet> {
            auto it = sets.find(id);
            if (it == sets.end()) return std::nullopt;
            return it->second;
        };
    }
};

// Transcodes every original of the news fixture once.
const MemoryVariants& news_variants() {
    static const MemoryVariants store = [] {
        MemoryVariants s;
        for (const auto& entry : std::filesystem::directory_iterator(kFixtures / "news" / "media")) {
            const auto id = entry.path().stem().string();
            auto t = transcode_all(slurp(entry.path()), FidelityProfile{}, id);
            s.sets.emplace(id, t.set);
            s.byte_lengths[id] = {t.bytes[0].size(), t.bytes[1].size(), t.bytes[2].size()};
        }
        return s;
    }();
    return store;
}

const maml::Page& news_page() {
    static const maml::Page page = maml::parse_page(slurp(kFixtures / "news" / "page.json"));
    return page;
}

// Weight recomputed from the transcoder outputs, without variant_sizes().
std::uint64_t independent_weight(const maml::Page& assembled, const MemoryVariants& store) {
    maml::MediaSizes sizes;
    for (const auto& obj : assembled.objects) {
        const auto* url = maml::media_url(obj);
        if (url == nullptr) continue;
        const auto q = url->find('?');
        const std::string id = url->substr(10, q == std::string::npos ? std::string::npos : q - 10);
        std::size_t level = 2;
        if (url->ends_with("fidelity=medium")) level = 1;
        if (url->ends_with("fidelity=low")) level = 0;
        sizes[*url] = store.byte_lengths.at(id)[level];
    }
    return maml::page_weight(assembled, sizes);
}

RgbImage solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    RgbImage img;
    img.width = w;
    img.height = h;
    for (int i = 0; i < w * h; ++i) img.pixels.insert(img.pixels.end(), {r, g, b});
    return img;
}

}  // namespace

TEST_CASE("fidelity order and names") {
    CHECK(Fidelity::low < Fidelity::medium);
    CHECK(Fidelity::medium < Fidelity::high);
    for (auto f : kAllFidelities) CHECK(parse_fidelity(fidelity_name(f)) == f);
    CHECK(code_of([] { parse_fidelity("ultra"); }) == Errc::invalid_argument);
}

TEST_CASE("default fidelity profile") {
    const FidelityProfile p;
    CHECK_NOTHROW(p.check());
    CHECK(p.at(Fidelity::high).image_scale == 1.0);
    CHECK(p.at(Fidelity::medium).image_scale == 0.5);
    CHECK(p.at(Fidelity::low).image_scale == 0.25);
    CHECK(p.at(Fidelity::high).image_quality == 85);
    CHECK(p.at(Fidelity::medium).image_quality == 60);
    CHECK(p.at(Fidelity::low).image_quality == 35);
    CHECK(p.at(Fidelity::high).ad_format == AdFormat::video);
    CHECK(p.at(Fidelity::medium).ad_format == AdFormat::image);
    CHECK(p.at(Fidelity::low).ad_format == AdFormat::text);
    CHECK_FALSE(p.at(Fidelity::low).video_allowed);

    auto bad = p;
    bad.at(Fidelity::medium).image_quality = 85;
    CHECK(code_of([&] { bad.check(); }) == Errc::invalid_argument);
    bad = p;
    bad.at(Fidelity::low).video_allowed = true;
    CHECK(code_of([&] { bad.check(); }) == Errc::invalid_argument);
    bad = p;
    bad.at(Fidelity::medium).ad_format = AdFormat::text;
    CHECK(code_of([&] { bad.check(); }) == Errc::invalid_argument);
}

TEST_CASE("select_fidelity") {
    CHECK(select_fidelity(Fidelity::low, NetworkHint{50, 5000}) == Fidelity::low);
    CHECK(select_fidelity(std::nullopt, NetworkHint{50, 5000}) == Fidelity::high);
    CHECK(select_fidelity(std::nullopt, std::nullopt) == Fidelity::medium);
    CHECK(select_fidelity(Fidelity::high, std::nullopt) == Fidelity::high);

    struct Row {
        double rtt, kbps;
        Fidelity want;
    };
    for (const auto& r : {Row{100, 255.9, Fidelity::low}, Row{100, 256, Fidelity::medium}, Row{800, 2000, Fidelity::medium},
                          Row{800.1, 2000, Fidelity::low}, Row{300, 1024, Fidelity::high}, Row{300.1, 1024, Fidelity::medium},
                          Row{100, 1023, Fidelity::medium}, Row{900, 100000, Fidelity::low}}) {
        CAPTURE(r.rtt);
        CAPTURE(r.kbps);
        CHECK(select_fidelity(std::nullopt, NetworkHint{r.rtt, r.kbps}) == r.want);
    }
}

TEST_CASE("scaled dimensions round half up") {
    CHECK(scaled_dimension(1080, 1.0) == 1080);
    CHECK(scaled_dimension(607, 1.0) == 607);
    CHECK(scaled_dimension(1080, 0.5) == 540);
    CHECK(scaled_dimension(607, 0.5) == 304);
    CHECK(scaled_dimension(607, 0.25) == 152);
    CHECK(scaled_dimension(1, 0.25) == 1);
}

TEST_CASE("box resize against hand-computed averages") {
    RgbImage src;
    src.width = 4;
    src.height = 2;
    // Row 0: 0 40 80 120, row 1: 200 200 200 200 (grey levels)
    for (int v : {0, 40, 80, 120, 200, 200, 200, 200}) {
        const auto b = static_cast<std::uint8_t>(v);
        src.pixels.insert(src.pixels.end(), {b, b, b});
    }
    auto out = resize(src, 2, 1);
    REQUIRE(out.pixels.size() == 6);
    CHECK(out.pixels[0] == 110);  // (0 + 40 + 200 + 200) / 4
    CHECK(out.pixels[3] == 150);  // (80 + 120 + 200 + 200) / 4

    auto uniform = resize(solid(7, 5, 10, 20, 30), 3, 2);
    for (std::size_t i = 0; i < uniform.pixels.size(); i += 3) {
        CHECK(uniform.pixels[i] == 10);
        CHECK(uniform.pixels[i + 1] == 20);
        CHECK(uniform.pixels[i + 2] == 30);
    }
    CHECK(code_of([] { resize(solid(2, 2, 0, 0, 0), 0, 1); }) == Errc::zero_dimension);
}

TEST_CASE("transcode_image dimensions") {
    const auto hero = slurp(kFixtures / "images" / "hero.jpg");
    const auto high = transcode_image(hero, Fidelity::high, FidelityProfile{}, "hero");
    CHECK(high.variant.width == 1080);
    CHECK(high.variant.height == 607);
    CHECK(high.variant.url == "/v1/media/hero");
    const auto medium = transcode_image(hero, Fidelity::medium, FidelityProfile{}, "hero");
    CHECK(medium.variant.width == 540);
    CHECK(medium.variant.height == 304);
    CHECK(medium.variant.url == "/v1/media/hero?fidelity=medium");
    CHECK(medium.variant.byte_size == medium.bytes.size());
    const auto back = decode_image(medium.bytes);
    CHECK(back.width == 540);
    CHECK(back.height == 304);
}

TEST_CASE("every bundled image shrinks with fidelity") {
    int count = 0;
    for (const auto& entry : std::filesystem::directory_iterator(kFixtures / "images")) {
        CAPTURE(entry.path().string());
        const auto t = transcode_all(slurp(entry.path()), FidelityProfile{}, entry.path().stem().string());
        CHECK(t.bytes[0].size() < t.bytes[2].size());
        CHECK(t.bytes[0].size() <= t.bytes[1].size());
        CHECK(t.bytes[1].size() <= t.bytes[2].size());
        CHECK(t.set.ordered());
        ++count;
    }
    CHECK(count >= 5);
}

TEST_CASE("transparent PNG pixels become white") {
    const auto t = transcode_image(slurp(kFixtures / "images" / "logo.png"), Fidelity::high, FidelityProfile{}, "logo");
    const auto img = decode_image(t.bytes);
    // The top-left corner of the logo is transparent.
    CHECK(img.pixels[0] > 240);
    CHECK(img.pixels[1] > 240);
    CHECK(img.pixels[2] > 240);
}

TEST_CASE("transcode errors") {
    const std::string gif = "GIF89a\x01\x00\x01\x00\x80\x00\x00\xff\xff\xff\x00\x00\x00,";
    CHECK(code_of([&] { transcode_image(gif, Fidelity::low, FidelityProfile{}, "g"); }) == Errc::unsupported_image_format);
    CHECK(code_of([] { transcode_image("not an image", Fidelity::low, FidelityProfile{}, "x"); }) ==
          Errc::unsupported_image_format);
    const auto hero = slurp(kFixtures / "images" / "hero.jpg");
    CHECK(code_of([&] { transcode_image(hero.substr(0, 200), Fidelity::low, FidelityProfile{}, "t"); }) ==
          Errc::unsupported_image_format);
}

TEST_CASE("media urls") {
    CHECK(media_id_of("/v1/media/abc") == std::optional<std::string>("abc"));
    CHECK(media_id_of("/v1/media/abc?fidelity=low") == std::optional<std::string>("abc"));
    CHECK_FALSE(media_id_of("https://example.org/v1/media/abc").has_value());
    CHECK_FALSE(media_id_of("/v1/media/").has_value());
    CHECK(variant_url("abc", Fidelity::high) == "/v1/media/abc");
    CHECK(variant_url("abc", Fidelity::low) == "/v1/media/abc?fidelity=low");
}

TEST_CASE("news fixture: low fidelity weighs at most a quarter of high") {
    const auto& store = news_variants();
    const auto& page = news_page();
    std::array<std::uint64_t, 3> weight{};
    for (auto f : kAllFidelities) {
        const auto assembled = assemble_page(page, f, {}, store.lookup());
        CHECK(maml::validate(assembled).empty());
        weight[static_cast<std::size_t>(f)] = maml::page_weight(assembled, variant_sizes(assembled, store.lookup()));
        CHECK(weight[static_cast<std::size_t>(f)] == independent_weight(assembled, store));
    }
    MESSAGE("news fixture weight low/medium/high: " << weight[0] << " / " << weight[1] << " / " << weight[2]);
    CHECK(weight[0] <= weight[1]);
    CHECK(weight[1] <= weight[2]);
    CHECK(static_cast<double>(weight[0]) <= 0.25 * static_cast<double>(weight[2]));
}

TEST_CASE("assembly with no ads at high fidelity is the identity") {
    const auto& page = news_page();
    const auto assembled = assemble_page(page, Fidelity::high, {}, news_variants().lookup());
    CHECK(assembled == page);
    CHECK(maml::serialize_page(assembled) == maml::serialize_page(page));
}

TEST_CASE("assembly is pure") {
    const AdCreative ad{"a1", AdFormat::text, "Fresh mangoes at Gikomba, 50 bob", "https://ads.example/a1"};
    const auto a = maml::serialize_page(assemble_page(news_page(), Fidelity::low, {ad}, news_variants().lookup()));
    const auto b = maml::serialize_page(assemble_page(news_page(), Fidelity::low, {ad}, news_variants().lookup()));
    CHECK(a == b);
}

TEST_CASE("ads fill slots in the format of the fidelity") {
    MemoryVariants store;
    MediaVariantSet adimg{"adimg", false, {}};
    adimg.at(Fidelity::low) = MediaVariant{variant_url("adimg", Fidelity::low), 80, 20, 900, "image/jpeg"};
    adimg.at(Fidelity::medium) = MediaVariant{variant_url("adimg", Fidelity::medium), 160, 40, 3000, "image/jpeg"};
    adimg.at(Fidelity::high) = MediaVariant{variant_url("adimg", Fidelity::high), 320, 80, 9000, "image/jpeg"};
    store.sets.emplace("adimg", adimg);

    maml::Page page;
    page.page_id = "slots";
    page.objects.push_back(maml::Rect{maml::Box{0, 0, 1080, 100}, "#00adfe"});
    page.objects.push_back(maml::Rect{maml::Box{0, 100, 1080, 100}, "#ffffff"});
    page.objects.push_back(maml::Rect{maml::Box{0, 200, 1080, 100}, "#00adfe"});
    CHECK(ad_slots(page) == std::vector<std::size_t>{0, 2});

    const AdCreative video{"v", AdFormat::video, "https://ads.example/v.mp4", "https://ads.example/v"};
    const AdCreative image{"i", AdFormat::image, "/v1/media/adimg", "https://ads.example/i"};
    const AdCreative text{"t", AdFormat::text, "Tailoring, Toi market stall 12", "https://ads.example/t"};

    auto high = assemble_page(page, Fidelity::high, {video}, store.lookup());
    REQUIRE(std::holds_alternative<maml::Video>(high.objects[0]));
    CHECK(std::get<maml::Video>(high.objects[0]).href == std::optional<std::string>("https://ads.example/v"));
    CHECK(maml::box_of(high.objects[0]) == maml::Box{0, 0, 1080, 100});
    CHECK(std::holds_alternative<maml::Rect>(high.objects[2]));  // unfilled slot stays

    auto medium = assemble_page(page, Fidelity::medium, {image, image, image}, store.lookup());
    REQUIRE(std::holds_alternative<maml::Image>(medium.objects[0]));
    REQUIRE(std::holds_alternative<maml::Image>(medium.objects[2]));
    CHECK(std::get<maml::Image>(medium.objects[2]).url == "/v1/media/adimg?fidelity=medium");
    CHECK(std::get<maml::Image>(medium.objects[2]).href == std::optional<std::string>("https://ads.example/i"));

    auto low = assemble_page(page, Fidelity::low, {text}, store.lookup());
    REQUIRE(std::holds_alternative<maml::Text>(low.objects[0]));
    const auto& t = std::get<maml::Text>(low.objects[0]);
    CHECK(t.txt == text.content);
    CHECK(t.href == std::optional<std::string>("https://ads.example/t"));
    CHECK(maml::validate(low).empty());

    // Ad-format law: any other pairing is refused.
    for (auto f : kAllFidelities) {
        for (const auto* ad : {&video, &image, &text}) {
            const bool matches = FidelityProfile{}.at(f).ad_format == ad->format;
            if (matches) {
                CHECK_NOTHROW(assemble_page(page, f, {*ad}, store.lookup()));
            } else {
                CHECK(code_of([&] { assemble_page(page, f, {*ad}, store.lookup()); }) == Errc::invalid_argument);
            }
        }
    }
}

TEST_CASE("videos degrade to their poster at low fidelity") {
    MemoryVariants store;
    MediaVariantSet clip{"clip", true, {}};
    clip.at(Fidelity::high) = MediaVariant{variant_url("clip", Fidelity::high), 1280, 720, 900000, "video/mp4"};
    clip.at(Fidelity::medium) = MediaVariant{variant_url("clip", Fidelity::medium), 1280, 720, 900000, "video/mp4"};
    clip.at(Fidelity::low) = MediaVariant{variant_url("clip", Fidelity::low), 320, 180, 6000, "image/jpeg"};
    store.sets.emplace("clip", clip);

    maml::Page page;
    page.page_id = "v";
    page.objects.push_back(maml::Video{"/v1/media/clip", maml::Box{0, 0, 1080, 608}, "/page/more"});
    page.objects.push_back(maml::Video{"https://elsewhere.example/x.mp4", maml::Box{0, 608, 1080, 608}, std::nullopt});

    auto medium = assemble_page(page, Fidelity::medium, {}, store.lookup());
    CHECK(std::get<maml::Video>(medium.objects[0]).url == "/v1/media/clip?fidelity=medium");
    CHECK(std::get<maml::Video>(medium.objects[1]).url == "https://elsewhere.example/x.mp4");
    CHECK(variant_sizes(medium, store.lookup()).at("https://elsewhere.example/x.mp4") == 0);

    // An external video has no poster to fall back on.
    CHECK(code_of([&] { assemble_page(page, Fidelity::low, {}, store.lookup()); }) == Errc::missing_variant);
    page.objects.pop_back();
    auto low = assemble_page(page, Fidelity::low, {}, store.lookup());
    REQUIRE(std::holds_alternative<maml::Image>(low.objects[0]));
    const auto& poster = std::get<maml::Image>(low.objects[0]);
    CHECK(poster.url == "/v1/media/clip?fidelity=low");
    CHECK(poster.box == maml::Box{0, 0, 1080, 608});
    CHECK(poster.href == std::optional<std::string>("/page/more"));
}

TEST_CASE("assembly errors") {
    maml::Page page;
    page.page_id = "p";
    page.objects.push_back(maml::Image{"/v1/media/nope", maml::Box{0, 0, 10, 10}, std::nullopt});
    CHECK(code_of([&] { assemble_page(page, Fidelity::low, {}, MemoryVariants{}.lookup()); }) == Errc::missing_variant);

    AssemblyStores stores;
    stores.pages = [](std::string_view) -> std::optional<maml::Page> { return std::nullopt; };
    CHECK(code_of([&] { assemble_page("missing", Fidelity::high, {}, stores); }) == Errc::page_not_found);
    stores.pages = [&](std::string_view id) -> std::optional<maml::Page> {
        if (id == "news") return news_page();
        return std::nullopt;
    };
    stores.variants = news_variants().lookup();
    CHECK(assemble_page("news", Fidelity::high, {}, stores) == news_page());
}
