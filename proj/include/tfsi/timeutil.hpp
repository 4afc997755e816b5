#pragma once

#include <chrono>
#include <string>
#include <string_view>

namespace tfsi {

using SysSeconds = std::chrono::sys_seconds;
using LocalSeconds = std::chrono::local_seconds;
using Date = std::chrono::year_month_day;

/// Which UTC->Eastern mapping to apply.
///   kNewYork  - DST-aware America/New_York rules (1987 onwards)
///   kFixedEst - literal UTC-5 all year
enum class TzRule { kNewYork, kFixedEst };

struct EasternTime {
    SysSeconds utc{};
    LocalSeconds local{};
    int offset_minutes = -300;

    bool is_dst() const { return offset_minutes == -240; }
};

EasternTime to_eastern(SysSeconds utc, TzRule rule = TzRule::kNewYork);

/// Inverse of to_eastern. Ambiguous wall times (fall-back hour) resolve to the
/// earlier instant; nonexistent ones (spring-forward gap) shift forward an hour.
SysSeconds from_eastern(LocalSeconds local, TzRule rule = TzRule::kNewYork);

/// Accepts "YYYY-MM-DDTHH:MM:SS[.fff](Z|+HH:MM|-HH:MM)"; a space may replace 'T'.
SysSeconds parse_rfc3339(std::string_view text);
std::string format_rfc3339_utc(SysSeconds t);
/// "YYYY-MM-DDTHH:MM:SS-04:00"
std::string format_eastern(const EasternTime& t);
/// "YYYY-MM-DD HH:MM:SS" of a wall-clock time.
std::string format_local(LocalSeconds t);
LocalSeconds parse_local(std::string_view text);

Date parse_date(std::string_view text);
std::string format_date(Date d);

/// Parses "HH:MM" or "HH:MM:SS" into seconds after midnight.
int parse_clock(std::string_view text);

LocalSeconds at_local(Date d, int hour, int minute = 0, int second = 0);
Date local_date(LocalSeconds t);
bool is_weekday(Date d);
Date previous_weekday(Date d);
Date add_days(Date d, int days);
int days_between(Date from, Date to);

/// Monday of the ISO week containing d.
Date week_start(Date d);
Date month_start(Date d);

}  // namespace tfsi
