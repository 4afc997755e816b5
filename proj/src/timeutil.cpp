#include "tfsi/timeutil.hpp"

#include <cstdio>
#include <cstdlib>

#include "tfsi/error.hpp"

namespace tfsi {

using namespace std::chrono;

namespace {

// UTC instants at which DST begins and ends in a given year.
struct DstBounds {
    SysSeconds begin;
    SysSeconds end;
};

DstBounds dst_bounds(int y) {
    const year yr{y};
    sys_days begin_day;
    sys_days end_day;
    if (y >= 2007) {
        begin_day = sys_days{yr / March / Sunday[2]};
        end_day = sys_days{yr / November / Sunday[1]};
    } else {
        begin_day = sys_days{yr / April / Sunday[1]};
        end_day = sys_days{yr / October / Sunday[last]};
    }
    // 02:00 EST = 07:00 UTC; 02:00 EDT = 06:00 UTC.
    return {begin_day + hours{7}, end_day + hours{6}};
}

[[noreturn]] void parse_fail(std::string_view what, std::string_view text) {
    throw Error(ErrorKind::kParse, std::string(what) + ": '" + std::string(text) + "'");
}

int read_int(std::string_view text, size_t pos, size_t len, std::string_view whole) {
    if (pos + len > text.size()) parse_fail("truncated timestamp", whole);
    int v = 0;
    for (size_t i = pos; i < pos + len; ++i) {
        const char c = text[i];
        if (c < '0' || c > '9') parse_fail("non-digit in timestamp", whole);
        v = v * 10 + (c - '0');
    }
    return v;
}

Date make_date(int y, int m, int d, std::string_view whole) {
    const Date ymd{year{y}, month{static_cast<unsigned>(m)}, day{static_cast<unsigned>(d)}};
    if (!ymd.ok()) parse_fail("invalid calendar date", whole);
    return ymd;
}

void expect_char(std::string_view text, size_t pos, char c, std::string_view whole) {
    if (pos >= text.size() || text[pos] != c) parse_fail("malformed timestamp", whole);
}

}  // namespace

EasternTime to_eastern(SysSeconds utc, TzRule rule) {
    int offset = -300;
    if (rule == TzRule::kNewYork) {
        const int y = static_cast<int>(year_month_day{floor<days>(utc)}.year());
        const DstBounds b = dst_bounds(y);
        if (utc >= b.begin && utc < b.end) offset = -240;
    }
    EasternTime out;
    out.utc = utc;
    out.offset_minutes = offset;
    out.local = LocalSeconds{utc.time_since_epoch() + minutes{offset}};
    return out;
}

SysSeconds from_eastern(LocalSeconds local, TzRule rule) {
    const auto as_utc = [&](int offset_min) {
        return SysSeconds{local.time_since_epoch() - minutes{offset_min}};
    };
    if (rule == TzRule::kFixedEst) return as_utc(-300);
    // Earlier instant first: EDT maps a wall time to an earlier UTC than EST.
    for (int offset : {-240, -300}) {
        const SysSeconds candidate = as_utc(offset);
        if (to_eastern(candidate, rule).local == local) return candidate;
    }
    return as_utc(-300);
}

SysSeconds parse_rfc3339(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && (s.front() == ' ')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ')) s.remove_suffix(1);
    if (s.size() < 19) parse_fail("timestamp too short", text);
    const int y = read_int(s, 0, 4, text);
    expect_char(s, 4, '-', text);
    const int mo = read_int(s, 5, 2, text);
    expect_char(s, 7, '-', text);
    const int d = read_int(s, 8, 2, text);
    if (s[10] != 'T' && s[10] != ' ' && s[10] != 't') parse_fail("missing date/time separator", text);
    const int hh = read_int(s, 11, 2, text);
    expect_char(s, 13, ':', text);
    const int mm = read_int(s, 14, 2, text);
    expect_char(s, 16, ':', text);
    const int ss = read_int(s, 17, 2, text);
    if (hh > 23 || mm > 59 || ss > 60) parse_fail("time of day out of range", text);
    size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        ++pos;
        while (pos < s.size() && s[pos] >= '0' && s[pos] <= '9') ++pos;
    }
    int offset_min = 0;
    if (pos >= s.size()) parse_fail("missing UTC designator", text);
    if (s[pos] == 'Z' || s[pos] == 'z') {
        ++pos;
    } else if (s[pos] == '+' || s[pos] == '-') {
        const int sign = s[pos] == '-' ? -1 : 1;
        const int oh = read_int(s, pos + 1, 2, text);
        expect_char(s, pos + 3, ':', text);
        const int om = read_int(s, pos + 4, 2, text);
        offset_min = sign * (oh * 60 + om);
        pos += 6;
    } else {
        parse_fail("bad UTC offset", text);
    }
    if (pos != s.size()) parse_fail("trailing characters in timestamp", text);
    const Date ymd = make_date(y, mo, d, text);
    return SysSeconds{sys_days{ymd}.time_since_epoch() + hours{hh} + minutes{mm} + seconds{ss} -
                      minutes{offset_min}};
}

namespace {

std::string format_fields(days since_epoch, seconds tod) {
    const Date ymd{sys_days{since_epoch}};
    const hh_mm_ss<seconds> hms{tod};
    char buf[32];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02uT%02d:%02d:%02d", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()),
                  static_cast<int>(hms.hours().count()), static_cast<int>(hms.minutes().count()),
                  static_cast<int>(hms.seconds().count()));
    return buf;
}

}  // namespace

std::string format_rfc3339_utc(SysSeconds t) {
    const auto day = floor<days>(t);
    return format_fields(day.time_since_epoch(), t - day) + "Z";
}

std::string format_eastern(const EasternTime& t) {
    const auto day = floor<days>(t.local);
    std::string out = format_fields(day.time_since_epoch(), t.local - day);
    const int off = t.offset_minutes;
    char buf[16];
    std::snprintf(buf, sizeof buf, "%c%02d:%02d", off < 0 ? '-' : '+', std::abs(off) / 60, std::abs(off) % 60);
    return out + buf;
}

std::string format_local(LocalSeconds t) {
    const auto day = floor<days>(t);
    std::string out = format_fields(day.time_since_epoch(), t - day);
    out[10] = ' ';
    return out;
}

LocalSeconds parse_local(std::string_view text) {
    // Reuse the RFC-3339 reader; a bare wall time carries no offset.
    std::string s(text);
    if (s.size() >= 25 && (s[19] == '+' || s[19] == '-')) s = s.substr(0, 19);
    const SysSeconds t = parse_rfc3339(s + "Z");
    return LocalSeconds{t.time_since_epoch()};
}

Date parse_date(std::string_view text) {
    std::string_view s = text;
    while (!s.empty() && s.back() == ' ') s.remove_suffix(1);
    while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
    if (s.size() != 10) parse_fail("expected YYYY-MM-DD", text);
    const int y = read_int(s, 0, 4, text);
    expect_char(s, 4, '-', text);
    const int m = read_int(s, 5, 2, text);
    expect_char(s, 7, '-', text);
    const int d = read_int(s, 8, 2, text);
    return make_date(y, m, d, text);
}

std::string format_date(Date d) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(d.year()),
                  static_cast<unsigned>(d.month()), static_cast<unsigned>(d.day()));
    return buf;
}

int parse_clock(std::string_view text) {
    if (text.size() != 5 && text.size() != 8) parse_fail("expected HH:MM[:SS]", text);
    const int h = read_int(text, 0, 2, text);
    expect_char(text, 2, ':', text);
    const int m = read_int(text, 3, 2, text);
    int s = 0;
    if (text.size() == 8) {
        expect_char(text, 5, ':', text);
        s = read_int(text, 6, 2, text);
    }
    if (h > 23 || m > 59 || s > 59) parse_fail("clock time out of range", text);
    return h * 3600 + m * 60 + s;
}

LocalSeconds at_local(Date d, int hour, int minute, int second) {
    return LocalSeconds{local_days{d}.time_since_epoch() + hours{hour} + minutes{minute} + seconds{second}};
}

Date local_date(LocalSeconds t) { return Date{sys_days{floor<days>(t).time_since_epoch()}}; }

bool is_weekday(Date d) {
    const weekday wd{sys_days{d}};
    return wd != Saturday && wd != Sunday;
}

Date previous_weekday(Date d) {
    Date p = add_days(d, -1);
    while (!is_weekday(p)) p = add_days(p, -1);
    return p;
}

Date add_days(Date d, int n) { return Date{sys_days{d} + days{n}}; }

int days_between(Date from, Date to) {
    return static_cast<int>((sys_days{to} - sys_days{from}).count());
}

Date week_start(Date d) {
    const weekday wd{sys_days{d}};
    const int since_monday = static_cast<int>((wd - Monday).count());
    return add_days(d, -since_monday);
}

Date month_start(Date d) { return Date{d.year(), d.month(), day{1}}; }

}  // namespace tfsi
