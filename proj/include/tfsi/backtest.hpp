#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tfsi/timeutil.hpp"

namespace tfsi::backtest {

enum class Position { kShort = -1, kFlat = 0, kLong = 1 };

struct Signal {
    std::vector<Date> dates;
    std::vector<Position> positions;
    std::size_t missing = 0;  // days without an overnight value (held flat)
};

enum class SignalMode { kUnrestricted, kThreshold };

/// unrestricted: long iff tfsi < 0, short iff tfsi > 0.
/// threshold: short iff tfsi > tau, long iff tfsi < -tau, otherwise flat.
Signal build_signal(const std::vector<Date>& dates, const std::vector<std::optional<double>>& overnight_tfsi,
                    SignalMode mode, double tau = 0.12);

/// +r long, -r short, 0 flat.
std::vector<double> simulate(const Signal& signal, std::span<const double> open_to_close);

/// Non-flat days over all days; throws on an empty signal.
double trade_fraction(const Signal& signal);

enum class VarRule {
    kLowerOrder,    // order statistic at ceil(0.05 n)
    kInterpolated,  // linear interpolation between order statistics
};

struct StatsOptions {
    double periods_per_year = 252.0;
    double level = 0.05;
    VarRule var_rule = VarRule::kLowerOrder;
};

struct StrategyStats {
    std::size_t n = 0;
    double avg_ret_ann = 0.0;  // %
    double std_ret_ann = 0.0;  // %
    std::optional<double> info_ratio;
    std::optional<double> skewness;
    std::optional<double> kurtosis;  // raw, not excess
    double var_95 = 0.0;
    double es_95 = 0.0;
};

/// Daily returns in percent; at least two observations.
StrategyStats performance_stats(std::span<const double> returns, const StatsOptions& opts = {});

struct MarketDay {
    Date date{};
    double open_to_close = 0.0;   // %
    double close_to_close = 0.0;  // %, missing on the first day
    bool has_close_to_close = false;
    double overnight = 0.0;  // %
};

/// "date,open,close" or "date,ret_open_to_close".
std::vector<MarketDay> parse_market_csv(std::string_view text);

enum class Benchmark { kCloseToClose, kOpenToClose };

struct Table5Options {
    double tau = 0.12;
    Date post_cli_start = Date{std::chrono::year{2017}, std::chrono::month{12}, std::chrono::day{1}};
    Benchmark benchmark = Benchmark::kCloseToClose;
    bool include_flat_days = true;
    StatsOptions stats;
};

struct Table5Column {
    std::string name;
    StrategyStats stats;
    std::optional<double> trade_fraction;
};

struct Table5 {
    std::vector<Table5Column> post_cli;  // threshold, unrestricted, benchmark
    std::vector<Table5Column> full;
    std::vector<Date> dates;
    std::vector<double> threshold_returns;
    std::vector<double> unrestricted_returns;
};

Table5 run_table5(const std::vector<MarketDay>& market, const std::vector<Date>& tfsi_dates,
                  const std::vector<std::optional<double>>& overnight_tfsi, const Table5Options& opts = {});

/// Row names as printed: "Avg. Ret (ann)", ..., "Exp. Shortfall (95%)".
const std::vector<std::string>& table5_rows();
std::string table5_csv(const Table5& t);
std::string table5_text(const Table5& t);

}  // namespace tfsi::backtest
