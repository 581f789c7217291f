#include "gaius/common/time.hpp"

#include "gaius/common/error.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

namespace gaius {

using namespace std::chrono;

std::string format_utc(Timestamp t) {
    const auto day = floor<days>(t);
    const year_month_day ymd{day};
    const hh_mm_ss hms{t - day};
    char buf[64];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02ld:%02ld:%02lldZ", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<long>(hms.hours().count()), static_cast<long>(hms.minutes().count()),
                  static_cast<long long>(hms.seconds().count()));
    return buf;
}

Timestamp SystemClock::now() const { return floor<seconds>(system_clock::now()); }

namespace {

[[noreturn]] void bad_date(std::string_view text) {
    throw Error(Errc::parse_failure, "unrecognized date: " + std::string(text));
}

struct Cursor {
    std::string_view s;
    std::size_t i = 0;

    bool done() const { return i >= s.size(); }
    char peek() const { return done() ? '\0' : s[i]; }
    void skip_ws() {
        while (!done() && std::isspace(static_cast<unsigned char>(s[i]))) ++i;
    }
    bool eat(char c) {
        if (peek() != c) return false;
        ++i;
        return true;
    }
    // Reads exactly `width` digits (or 1..width when width_max is set).
    bool digits(int min_width, int max_width, int& out) {
        int n = 0;
        int v = 0;
        while (n < max_width && !done() && std::isdigit(static_cast<unsigned char>(s[i]))) {
            v = v * 10 + (s[i] - '0');
            ++i;
            ++n;
        }
        out = v;
        return n >= min_width;
    }
};

Timestamp make_time(std::string_view text, int y, int mo, int d, int h, int mi, int sec, int offset_min) {
    const year_month_day ymd{year{y}, month{static_cast<unsigned>(mo)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok() || h > 23 || mi > 59 || sec > 60) bad_date(text);
    return sys_days{ymd} + hours{h} + minutes{mi} + seconds{sec} - minutes{offset_min};
}

bool parse_offset(Cursor& c, int& offset_min) {
    offset_min = 0;
    c.skip_ws();
    if (c.done()) return true;
    if (c.eat('Z') || c.eat('z')) return c.done();
    const char sign = c.peek();
    if (sign == '+' || sign == '-') {
        ++c.i;
        int hh = 0;
        int mm = 0;
        if (!c.digits(2, 2, hh)) return false;
        c.eat(':');
        if (!c.digits(2, 2, mm)) return false;
        offset_min = (hh * 60 + mm) * (sign == '-' ? -1 : 1);
        return c.done();
    }
    static constexpr std::array<std::pair<std::string_view, int>, 10> kZones{{
        {"GMT", 0}, {"UT", 0}, {"UTC", 0}, {"EST", -300}, {"EDT", -240},
        {"CST", -360}, {"CDT", -300}, {"MST", -420}, {"MDT", -360}, {"PST", -480},
    }};
    std::string_view rest = c.s.substr(c.i);
    for (auto [name, off] : kZones) {
        if (rest == name) {
            offset_min = off;
            return true;
        }
    }
    return rest == "PDT" ? (offset_min = -420, true) : false;
}

Timestamp parse_iso(std::string_view text) {
    Cursor c{text};
    int y = 0, mo = 0, d = 0, h = 0, mi = 0, sec = 0;
    if (!c.digits(4, 4, y) || !c.eat('-') || !c.digits(2, 2, mo) || !c.eat('-') || !c.digits(2, 2, d)) {
        bad_date(text);
    }
    if (c.done()) return make_time(text, y, mo, d, 0, 0, 0, 0);
    if (!(c.eat('T') || c.eat('t') || c.eat(' '))) bad_date(text);
    if (!c.digits(2, 2, h) || !c.eat(':') || !c.digits(2, 2, mi)) bad_date(text);
    if (c.eat(':') && !c.digits(2, 2, sec)) bad_date(text);
    if (c.eat('.')) {
        int frac = 0;
        if (!c.digits(1, 9, frac)) bad_date(text);
        while (std::isdigit(static_cast<unsigned char>(c.peek()))) ++c.i;
    }
    int offset = 0;
    if (!parse_offset(c, offset)) bad_date(text);
    return make_time(text, y, mo, d, h, mi, sec, offset);
}

Timestamp parse_rfc822(std::string_view text) {
    Cursor c{text};
    c.skip_ws();
    // Optional "Tue," prefix.
    if (std::isalpha(static_cast<unsigned char>(c.peek()))) {
        while (std::isalpha(static_cast<unsigned char>(c.peek()))) ++c.i;
        if (!c.eat(',')) bad_date(text);
        c.skip_ws();
    }
    int d = 0;
    if (!c.digits(1, 2, d)) bad_date(text);
    c.skip_ws();
    static constexpr std::array<std::string_view, 12> kMonths{
        "jan", "feb", "mar", "apr", "may", "jun", "jul", "aug", "sep", "oct", "nov", "dec"};
    std::string mon;
    while (std::isalpha(static_cast<unsigned char>(c.peek()))) {
        mon.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c.peek()))));
        ++c.i;
    }
    int mo = 0;
    for (std::size_t k = 0; k < kMonths.size(); ++k) {
        if (mon.substr(0, 3) == kMonths[k]) mo = static_cast<int>(k) + 1;
    }
    if (mo == 0) bad_date(text);
    c.skip_ws();
    int y = 0;
    if (!c.digits(2, 4, y)) bad_date(text);
    if (y < 100) y += (y < 70 ? 2000 : 1900);
    c.skip_ws();
    int h = 0, mi = 0, sec = 0;
    if (!c.done()) {
        if (!c.digits(1, 2, h) || !c.eat(':') || !c.digits(2, 2, mi)) bad_date(text);
        if (c.eat(':') && !c.digits(2, 2, sec)) bad_date(text);
    }
    int offset = 0;
    if (!parse_offset(c, offset)) bad_date(text);
    return make_time(text, y, mo, d, h, mi, sec, offset);
}

}  // namespace

Timestamp parse_utc(std::string_view text) {
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.front()))) text.remove_prefix(1);
    while (!text.empty() && std::isspace(static_cast<unsigned char>(text.back()))) text.remove_suffix(1);
    if (text.size() >= 10 && std::isdigit(static_cast<unsigned char>(text[0])) && text[4] == '-') {
        return parse_iso(text);
    }
    return parse_rfc822(text);
}

}  // namespace gaius
