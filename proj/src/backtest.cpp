#include "tfsi/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"
#include "tfsi/index.hpp"

namespace tfsi::backtest {

Signal build_signal(const std::vector<Date>& dates, const std::vector<std::optional<double>>& overnight_tfsi,
                    SignalMode mode, double tau) {
    if (dates.size() != overnight_tfsi.size()) throw Error(ErrorKind::kInvalidArgument, "signal: dates and values differ in length");
    if (mode == SignalMode::kThreshold && !(tau >= 0.0)) throw Error(ErrorKind::kInvalidArgument, "threshold must be >= 0");
    Signal s;
    s.dates = dates;
    s.positions.reserve(dates.size());
    for (const auto& v : overnight_tfsi) {
        Position p = Position::kFlat;
        if (!v) {
            ++s.missing;
        } else if (mode == SignalMode::kUnrestricted) {
            p = *v < 0.0 ? Position::kLong : *v > 0.0 ? Position::kShort : Position::kFlat;
        } else {
            p = *v < -tau ? Position::kLong : *v > tau ? Position::kShort : Position::kFlat;
        }
        s.positions.push_back(p);
    }
    return s;
}

std::vector<double> simulate(const Signal& signal, std::span<const double> open_to_close) {
    if (signal.positions.size() != open_to_close.size()) {
        throw Error(ErrorKind::kInvalidArgument, "simulate: signal and return series differ in length");
    }
    std::vector<double> out(open_to_close.size());
    for (size_t i = 0; i < out.size(); ++i) {
        switch (signal.positions[i]) {
            case Position::kLong: out[i] = open_to_close[i]; break;
            case Position::kShort: out[i] = -open_to_close[i]; break;
            case Position::kFlat: out[i] = 0.0; break;
        }
    }
    return out;
}

double trade_fraction(const Signal& signal) {
    if (signal.positions.empty()) throw Error(ErrorKind::kInvalidArgument, "trade fraction of an empty signal");
    const auto active = std::count_if(signal.positions.begin(), signal.positions.end(),
                                      [](Position p) { return p != Position::kFlat; });
    return static_cast<double>(active) / static_cast<double>(signal.positions.size());
}

StrategyStats performance_stats(std::span<const double> returns, const StatsOptions& opts) {
    const size_t n = returns.size();
    if (n < 2) throw Error(ErrorKind::kInvalidArgument, "performance stats need at least two returns");
    const auto nd = static_cast<double>(n);
    index::CompensatedSum s1;
    for (double r : returns) s1.add(r);
    const double mean = s1.value() / nd;
    index::CompensatedSum s2, s3, s4;
    for (double r : returns) {
        const double d = r - mean;
        s2.add(d * d);
        s3.add(d * d * d);
        s4.add(d * d * d * d);
    }
    StrategyStats st;
    st.n = n;
    st.avg_ret_ann = opts.periods_per_year * mean;
    const double sd = std::sqrt(s2.value() / (nd - 1.0));
    st.std_ret_ann = std::sqrt(opts.periods_per_year) * sd;
    const double m2 = s2.value() / nd;
    if (m2 > 0.0) {
        st.info_ratio = st.avg_ret_ann / st.std_ret_ann;
        st.skewness = (s3.value() / nd) / std::pow(m2, 1.5);
        st.kurtosis = (s4.value() / nd) / (m2 * m2);
    }

    std::vector<double> sorted(returns.begin(), returns.end());
    std::sort(sorted.begin(), sorted.end());
    if (opts.var_rule == VarRule::kLowerOrder) {
        auto k = static_cast<size_t>(std::ceil(opts.level * nd - 1e-9));
        k = std::clamp<size_t>(k, 1, n);
        st.var_95 = sorted[k - 1];
    } else {
        const double h = opts.level * (nd - 1.0);
        const auto lo = static_cast<size_t>(std::floor(h));
        const size_t hi = std::min(lo + 1, n - 1);
        st.var_95 = sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
    }
    index::CompensatedSum tail;
    size_t m = 0;
    for (double r : sorted) {
        if (r > st.var_95) break;
        tail.add(r);
        ++m;
    }
    // The interpolated VaR can sit below every observation only when n is tiny.
    st.es_95 = m ? tail.value() / static_cast<double>(m) : sorted.front();
    return st;
}

std::vector<MarketDay> parse_market_csv(std::string_view text) {
    const CsvTable t = parse_csv(text);
    const size_t c_date = t.column("date");
    const auto c_open = t.find_column("open");
    const auto c_close = t.find_column("close");
    const auto c_ret = t.find_column("ret_open_to_close");
    if (!(c_open && c_close) && !c_ret) {
        throw Error(ErrorKind::kParse, "market file needs 'date,open,close' or 'date,ret_open_to_close'");
    }
    std::vector<MarketDay> out;
    double prev_close = 0.0;
    bool have_prev = false;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            MarketDay m;
            m.date = parse_date(row.at(c_date));
            if (!out.empty() && !(out.back().date < m.date)) throw Error(ErrorKind::kParse, "dates must be increasing");
            if (c_open && c_close) {
                const double open = parse_double(row.at(*c_open));
                const double close = parse_double(row.at(*c_close));
                if (!(open > 0.0) || !(close > 0.0)) throw Error(ErrorKind::kParse, "prices must be positive");
                m.open_to_close = (close / open - 1.0) * 100.0;
                if (have_prev) {
                    m.close_to_close = (close / prev_close - 1.0) * 100.0;
                    m.overnight = (open / prev_close - 1.0) * 100.0;
                    m.has_close_to_close = true;
                }
                prev_close = close;
                have_prev = true;
            } else {
                m.open_to_close = parse_double(row.at(*c_ret));
            }
            out.push_back(m);
        } catch (const std::exception& e) {
            throw Error(ErrorKind::kParse, "market line " + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return out;
}

const std::vector<std::string>& table5_rows() {
    static const std::vector<std::string> rows{"Avg. Ret (ann)", "St. Dev. Ret (ann)", "Inf. Ratio", "Skewness",
                                               "Kurtosis",       "Value-at-Risk (95%)", "Exp. Shortfall (95%)"};
    return rows;
}

namespace {

std::vector<Table5Column> panel(const std::vector<double>& thr, const std::vector<double>& unr,
                                const std::vector<double>& bench, const Signal& sig_thr, const Signal& sig_unr,
                                const std::string& bench_name, const Table5Options& opts) {
    const auto active_only = [&](const std::vector<double>& r, const Signal& s) {
        if (opts.include_flat_days) return r;
        std::vector<double> out;
        for (size_t i = 0; i < r.size(); ++i) {
            if (s.positions[i] != Position::kFlat) out.push_back(r[i]);
        }
        return out;
    };
    std::vector<Table5Column> cols(3);
    cols[0].name = "TFSI threshold";
    cols[0].stats = performance_stats(active_only(thr, sig_thr), opts.stats);
    cols[0].trade_fraction = trade_fraction(sig_thr);
    cols[1].name = "TFSI unrestricted";
    cols[1].stats = performance_stats(active_only(unr, sig_unr), opts.stats);
    cols[1].trade_fraction = trade_fraction(sig_unr);
    cols[2].name = bench_name;
    cols[2].stats = performance_stats(bench, opts.stats);
    return cols;
}

Signal slice(const Signal& s, size_t from) {
    Signal out;
    out.dates.assign(s.dates.begin() + static_cast<std::ptrdiff_t>(from), s.dates.end());
    out.positions.assign(s.positions.begin() + static_cast<std::ptrdiff_t>(from), s.positions.end());
    return out;
}

std::vector<double> tail_of(const std::vector<double>& v, size_t from) {
    return {v.begin() + static_cast<std::ptrdiff_t>(from), v.end()};
}

}  // namespace

Table5 run_table5(const std::vector<MarketDay>& market, const std::vector<Date>& tfsi_dates,
                  const std::vector<std::optional<double>>& overnight_tfsi, const Table5Options& opts) {
    if (tfsi_dates.size() != overnight_tfsi.size()) throw Error(ErrorKind::kInvalidArgument, "tfsi dates and values differ in length");
    std::map<Date, std::optional<double>> tfsi;
    for (size_t i = 0; i < tfsi_dates.size(); ++i) tfsi[tfsi_dates[i]] = overnight_tfsi[i];

    const bool have_c2c = std::any_of(market.begin(), market.end(), [](const MarketDay& m) { return m.has_close_to_close; });
    const bool use_c2c = opts.benchmark == Benchmark::kCloseToClose && have_c2c;

    Table5 t;
    std::vector<std::optional<double>> values;
    std::vector<double> o2c, bench;
    for (const auto& m : market) {
        const auto it = tfsi.find(m.date);
        if (it == tfsi.end()) continue;
        if (use_c2c && !m.has_close_to_close) continue;
        t.dates.push_back(m.date);
        values.push_back(it->second);
        o2c.push_back(m.open_to_close);
        bench.push_back(use_c2c ? m.close_to_close : m.open_to_close);
    }
    if (t.dates.size() < 2) throw Error(ErrorKind::kStage, "backtest: fewer than two trading days with an overnight index");

    const Signal thr = build_signal(t.dates, values, SignalMode::kThreshold, opts.tau);
    const Signal unr = build_signal(t.dates, values, SignalMode::kUnrestricted);
    t.threshold_returns = simulate(thr, o2c);
    t.unrestricted_returns = simulate(unr, o2c);
    const std::string bench_name = "SP500";
    t.full = panel(t.threshold_returns, t.unrestricted_returns, bench, thr, unr, bench_name, opts);

    const auto first_post = static_cast<size_t>(
        std::lower_bound(t.dates.begin(), t.dates.end(), opts.post_cli_start) - t.dates.begin());
    if (t.dates.size() - first_post >= 2) {
        t.post_cli = panel(tail_of(t.threshold_returns, first_post), tail_of(t.unrestricted_returns, first_post),
                           tail_of(bench, first_post), slice(thr, first_post), slice(unr, first_post), bench_name, opts);
    }
    return t;
}

namespace {

std::vector<std::optional<double>> row_values(const StrategyStats& s) {
    return {s.avg_ret_ann, s.std_ret_ann, s.info_ratio, s.skewness, s.kurtosis, s.var_95, s.es_95};
}

}  // namespace

std::string table5_csv(const Table5& t) {
    std::string out = "statistic,post_cli_threshold,post_cli_unrestricted,post_cli_sp500,full_threshold,full_unrestricted,full_sp500\n";
    const auto& rows = table5_rows();
    for (size_t r = 0; r < rows.size(); ++r) {
        out += csv_escape(rows[r]);
        for (const auto* p : {&t.post_cli, &t.full}) {
            for (size_t c = 0; c < 3; ++c) {
                out += ',';
                if (p->size() == 3) {
                    const auto v = row_values((*p)[c].stats)[r];
                    if (v) out += format_double(*v);
                }
            }
        }
        out += '\n';
    }
    return out;
}

std::string table5_text(const Table5& t) {
    const auto& rows = table5_rows();
    const auto cell = [](const std::optional<double>& v, size_t r) -> std::string {
        if (!v) return "NA";
        const bool pct = r == 0 || r == 1 || r == 5 || r == 6;
        return pct ? format_fixed(*v, 1) + "%" : format_fixed(*v, 2);
    };
    std::vector<std::vector<std::string>> grid;
    grid.push_back({"", "Post-CLI", "", "", "Full", "", ""});
    std::vector<std::string> head{""};
    for (int k = 0; k < 2; ++k) {
        head.insert(head.end(), {"TFSI threshold", "TFSI unrestricted", "SP500"});
    }
    grid.push_back(head);
    for (size_t r = 0; r < rows.size(); ++r) {
        std::vector<std::string> line{rows[r]};
        for (const auto* p : {&t.post_cli, &t.full}) {
            for (size_t c = 0; c < 3; ++c) line.push_back(p->size() == 3 ? cell(row_values((*p)[c].stats)[r], r) : "NA");
        }
        grid.push_back(line);
    }
    std::vector<std::string> tf{"Trade fraction"};
    for (const auto* p : {&t.post_cli, &t.full}) {
        for (size_t c = 0; c < 3; ++c) {
            tf.push_back(p->size() == 3 && (*p)[c].trade_fraction ? format_fixed(*(*p)[c].trade_fraction, 2) : "");
        }
    }
    grid.push_back(tf);
    std::vector<size_t> width(7, 0);
    for (const auto& row : grid) {
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out = "Return moments across trading strategies\n";
    for (const auto& row : grid) {
        std::string line;
        for (size_t c = 0; c < row.size(); ++c) {
            if (c == 0) {
                line += row[c] + std::string(width[c] - row[c].size(), ' ');
            } else {
                line += std::string(width[c] - row[c].size() + 2, ' ') + row[c];
            }
        }
        while (!line.empty() && line.back() == ' ') line.pop_back();
        out += line + '\n';
    }
    return out;
}

}  // namespace tfsi::backtest
