#include "tfsi/econometrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "tfsi/csv.hpp"
#include "tfsi/error.hpp"

namespace tfsi::econometrics {

using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

std::string column_name(const std::vector<std::string>& names, Eigen::Index j) {
    if (j >= 0 && static_cast<size_t>(j) < names.size()) return names[static_cast<size_t>(j)];
    return "x" + std::to_string(j);
}

bool is_constant_column(const MatrixXd& X, Eigen::Index j) {
    return X.rows() > 0 && (X.col(j).array() == X(0, j)).all();
}

bool has_intercept(const MatrixXd& X) {
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (is_constant_column(X, j) && X(0, j) != 0.0) return true;
    }
    return false;
}

}  // namespace

OlsFit ols_fit(const MatrixXd& X, const VectorXd& y, const std::vector<std::string>& names) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (y.size() != n) throw Error(ErrorKind::kInvalidArgument, "ols: X and y row counts differ");
    if (p == 0) throw Error(ErrorKind::kInvalidArgument, "ols: no regressors");
    if (n <= p) {
        throw Error(ErrorKind::kNumeric,
                    "ols: need more observations than regressors (n=" + std::to_string(n) + ", p=" + std::to_string(p) + ")");
    }
    if (!X.allFinite() || !y.allFinite()) throw Error(ErrorKind::kNumeric, "ols: non-finite input");

    Eigen::ColPivHouseholderQR<MatrixXd> qr(X);
    if (qr.rank() < p) {
        const auto& perm = qr.colsPermutation().indices();
        std::string cols;
        for (auto k = qr.rank(); k < p; ++k) {
            if (!cols.empty()) cols += ", ";
            cols += column_name(names, perm(k));
        }
        throw Error(ErrorKind::kNumeric, "ols: design matrix is rank deficient; collinear column(s): " + cols);
    }

    OlsFit f;
    f.n = static_cast<size_t>(n);
    f.p = static_cast<size_t>(p);
    f.beta = qr.solve(y);
    f.residuals = y - X * f.beta;

    const MatrixXd R = qr.matrixR().topLeftCorner(p, p).template triangularView<Eigen::Upper>();
    const MatrixXd r_inv = R.template triangularView<Eigen::Upper>().solve(MatrixXd::Identity(p, p));
    const MatrixXd inner = r_inv * r_inv.transpose();
    const auto& P = qr.colsPermutation();
    f.xtx_inv = P * inner * P.transpose();

    const double ssr = f.residuals.squaredNorm();
    const double sst = has_intercept(X) ? (y.array() - y.mean()).matrix().squaredNorm() : y.squaredNorm();
    f.r2 = sst > 0.0 ? 1.0 - ssr / sst : 0.0;
    f.adj_r2 = 1.0 - (1.0 - f.r2) * static_cast<double>(n - 1) / static_cast<double>(n - p);
    f.sigma2 = ssr / static_cast<double>(n - p);
    return f;
}

const char* to_string(Kernel k) { return k == Kernel::kBartlett ? "bartlett" : "qs"; }

Kernel parse_kernel(std::string_view s) {
    if (s == "bartlett" || s == "nw" || s == "newey-west") return Kernel::kBartlett;
    if (s == "qs" || s == "quadratic_spectral" || s == "quadratic-spectral") return Kernel::kQuadraticSpectral;
    throw Error(ErrorKind::kConfig, "kernel must be 'bartlett' or 'qs', got '" + std::string(s) + "'");
}

double bartlett_weight(double j, double lags) {
    const double x = j / (lags + 1.0);
    return x < 1.0 ? 1.0 - x : 0.0;
}

double qs_weight(double x) {
    if (x == 0.0) return 1.0;
    const double z = 6.0 * std::numbers::pi * x / 5.0;
    return 25.0 / (12.0 * std::numbers::pi * std::numbers::pi * x * x) * (std::sin(z) / z - std::cos(z));
}

int newey_west_lags(size_t n) {
    return static_cast<int>(std::floor(4.0 * std::pow(static_cast<double>(n) / 100.0, 2.0 / 9.0)));
}

double andrews_qs_bandwidth(const MatrixXd& scores) {
    const auto n = scores.rows();
    if (n < 3) throw Error(ErrorKind::kNumeric, "bandwidth selection needs at least 3 observations");
    double num = 0.0;
    double den = 0.0;
    for (Eigen::Index a = 0; a < scores.cols(); ++a) {
        const VectorXd v = scores.col(a);
        const double sxx = v.head(n - 1).squaredNorm();
        if (sxx <= 0.0) continue;
        const double rho = std::clamp(v.tail(n - 1).dot(v.head(n - 1)) / sxx, -0.97, 0.97);
        const double s2 = (v.tail(n - 1) - rho * v.head(n - 1)).squaredNorm() / static_cast<double>(n - 1);
        const double s4 = s2 * s2;
        num += 4.0 * rho * rho * s4 / std::pow(1.0 - rho, 8);
        den += s4 / std::pow(1.0 - rho, 4);
    }
    if (!(den > 0.0)) return 1e-6;
    const double alpha2 = num / den;
    return std::max(1.3221 * std::pow(alpha2 * static_cast<double>(n), 0.2), 1e-6);
}

HacResult hac_covariance(const MatrixXd& X, const VectorXd& residuals, const HacOptions& opts) {
    const auto n = X.rows();
    const auto p = X.cols();
    if (residuals.size() != n) throw Error(ErrorKind::kInvalidArgument, "hac: residual length mismatch");
    const MatrixXd V = X.array().colwise() * residuals.array();

    HacResult out;
    std::vector<double> w(static_cast<size_t>(n), 0.0);
    w[0] = 1.0;
    if (opts.kernel == Kernel::kBartlett) {
        const double lags = opts.bandwidth ? *opts.bandwidth : newey_west_lags(static_cast<size_t>(n));
        if (lags < 0.0 || !std::isfinite(lags)) throw Error(ErrorKind::kInvalidArgument, "hac: Bartlett lag count must be >= 0");
        out.bandwidth = lags;
        for (Eigen::Index j = 1; j < n; ++j) w[static_cast<size_t>(j)] = bartlett_weight(static_cast<double>(j), lags);
    } else {
        double bw = 0.0;
        if (opts.bandwidth) {
            bw = *opts.bandwidth;
            if (!(bw > 0.0) || !std::isfinite(bw)) throw Error(ErrorKind::kInvalidArgument, "hac: bandwidth must be > 0");
        } else {
            MatrixXd used(n, 0);
            std::vector<Eigen::Index> keep;
            for (Eigen::Index j = 0; j < p; ++j) {
                if (!is_constant_column(X, j) || p == 1) keep.push_back(j);
            }
            used.resize(n, static_cast<Eigen::Index>(keep.size()));
            for (size_t k = 0; k < keep.size(); ++k) used.col(static_cast<Eigen::Index>(k)) = V.col(keep[k]);
            bw = andrews_qs_bandwidth(used);
        }
        out.bandwidth = bw;
        for (Eigen::Index j = 1; j < n; ++j) w[static_cast<size_t>(j)] = qs_weight(static_cast<double>(j) / bw);
    }

    // S = V' W V with the symmetric Toeplitz weight matrix W_ts = w(|t - s|).
    MatrixXd WV = V;
    for (Eigen::Index j = 1; j < n; ++j) {
        const double wj = w[static_cast<size_t>(j)];
        if (wj == 0.0) continue;
        WV.bottomRows(n - j) += wj * V.topRows(n - j);
        WV.topRows(n - j) += wj * V.bottomRows(n - j);
    }
    MatrixXd S = V.transpose() * WV;
    S = 0.5 * (S + S.transpose());

    const MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(MatrixXd::Identity(p, p));
    out.cov = xtx_inv * S * xtx_inv;
    out.cov = 0.5 * (out.cov + out.cov.transpose());
    return out;
}

MatrixXd white_covariance(const MatrixXd& X, const VectorXd& residuals) {
    const auto p = X.cols();
    const MatrixXd V = X.array().colwise() * residuals.array();
    MatrixXd S = V.transpose() * V;
    S = 0.5 * (S + S.transpose());
    const MatrixXd xtx_inv = (X.transpose() * X).ldlt().solve(MatrixXd::Identity(p, p));
    MatrixXd cov = xtx_inv * S * xtx_inv;
    return 0.5 * (cov + cov.transpose());
}

MatrixXd classical_covariance(const OlsFit& fit) { return fit.sigma2 * fit.xtx_inv; }

WhiteTest white_test(const MatrixXd& X, const VectorXd& residuals, const std::vector<std::string>& names) {
    const auto n = X.rows();
    if (residuals.size() != n) throw Error(ErrorKind::kInvalidArgument, "white test: residual length mismatch");
    std::vector<Eigen::Index> vars;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        if (!is_constant_column(X, j)) vars.push_back(j);
    }
    std::vector<VectorXd> cols;
    std::vector<std::string> labels;
    for (auto j : vars) {
        cols.emplace_back(X.col(j));
        labels.push_back(column_name(names, j));
    }
    for (size_t a = 0; a < vars.size(); ++a) {
        for (size_t b = a; b < vars.size(); ++b) {
            cols.emplace_back(X.col(vars[a]).cwiseProduct(X.col(vars[b])));
            labels.push_back(column_name(names, vars[a]) + "*" + column_name(names, vars[b]));
        }
    }

    WhiteTest out;
    // Exact duplicates (a dummy and its square) and constants go first.
    std::vector<size_t> kept;
    for (size_t c = 0; c < cols.size(); ++c) {
        bool dup = (cols[c].array() == cols[c](0)).all();
        for (size_t k : kept) {
            if (dup) break;
            dup = cols[k] == cols[c];
        }
        if (dup) {
            out.dropped.push_back(labels[c]);
        } else {
            kept.push_back(c);
        }
    }
    // Then anything the QR still finds collinear.
    while (true) {
        MatrixXd Z(n, static_cast<Eigen::Index>(kept.size()) + 1);
        Z.col(0).setOnes();
        for (size_t k = 0; k < kept.size(); ++k) Z.col(static_cast<Eigen::Index>(k) + 1) = cols[kept[k]];
        Eigen::ColPivHouseholderQR<MatrixXd> qr(Z);
        if (qr.rank() == Z.cols()) break;
        const auto& perm = qr.colsPermutation().indices();
        std::set<size_t> drop;
        for (auto k = qr.rank(); k < Z.cols(); ++k) {
            if (perm(k) > 0) drop.insert(static_cast<size_t>(perm(k) - 1));
        }
        if (drop.empty()) break;
        std::vector<size_t> next;
        for (size_t k = 0; k < kept.size(); ++k) {
            if (drop.count(k)) {
                out.dropped.push_back(labels[kept[k]]);
            } else {
                next.push_back(kept[k]);
            }
        }
        kept = std::move(next);
    }

    out.df = static_cast<int>(kept.size());
    if (out.df == 0) return out;
    MatrixXd Z(n, out.df + 1);
    Z.col(0).setOnes();
    for (size_t k = 0; k < kept.size(); ++k) Z.col(static_cast<Eigen::Index>(k) + 1) = cols[kept[k]];
    const VectorXd e2 = residuals.array().square().matrix();
    if (n <= Z.cols()) throw Error(ErrorKind::kNumeric, "white test: too few observations for the auxiliary regression");
    const VectorXd centered = (e2.array() - e2.mean()).matrix();
    if (centered.squaredNorm() <= 1e-300 || (e2.array() == e2(0)).all()) {
        out.statistic = 0.0;
        out.p_value = 1.0;
        return out;
    }
    const OlsFit aux = ols_fit(Z, e2);
    out.statistic = static_cast<double>(n) * aux.r2;
    const boost::math::chi_squared dist(out.df);
    out.p_value = boost::math::cdf(boost::math::complement(dist, std::max(out.statistic, 0.0)));
    return out;
}

double t_pvalue(double t, double df) {
    if (!(df > 0.0) || !std::isfinite(t)) return std::numeric_limits<double>::quiet_NaN();
    const boost::math::students_t dist(df);
    return 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
}

std::string stars(double p) {
    if (!(p == p)) return "";
    if (p < 0.01) return "***";
    if (p < 0.05) return "**";
    if (p < 0.1) return "*";
    return "";
}

// ---------------------------------------------------------------------------

const std::vector<std::optional<double>>& Dataset::column(const std::string& name) const {
    const auto it = columns.find(name);
    if (it == columns.end()) throw Error(ErrorKind::kMissingInput, "dataset has no column '" + name + "'");
    return it->second;
}

const std::vector<std::string>& dataset_columns() {
    static const std::vector<std::string> cols{"sp500_open_to_close", "sp500_close_to_close", "sp500_overnight",
                                               "tfsi_overnight",      "tfsi_daily",           "news",
                                               "fomc",                "hml",                  "smb",
                                               "mom",                 "vix"};
    return cols;
}

Dataset parse_dataset_csv(std::string_view text, const std::vector<std::string>& required) {
    const CsvTable t = parse_csv(text);
    const size_t c_date = t.column("date");
    for (const auto& r : required) {
        if (!t.find_column(r)) throw Error(ErrorKind::kParse, "dataset is missing column '" + r + "'");
    }
    Dataset ds;
    for (size_t c = 0; c < t.header.size(); ++c) {
        if (c != c_date) ds.columns[t.header[c]];
    }
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            if (row.size() != t.header.size()) throw Error(ErrorKind::kParse, "wrong number of fields");
            const Date d = parse_date(row[c_date]);
            if (!ds.dates.empty() && !(ds.dates.back() < d)) throw Error(ErrorKind::kParse, "dates must be increasing");
            ds.dates.push_back(d);
            for (size_t c = 0; c < t.header.size(); ++c) {
                if (c != c_date) ds.columns[t.header[c]].push_back(parse_optional_double(row[c]));
            }
        } catch (const std::exception& e) {
            throw Error(ErrorKind::kParse, "dataset line " + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return ds;
}

std::string dataset_csv(const Dataset& ds, const std::vector<std::string>& columns) {
    std::string out = "date";
    for (const auto& c : columns) out += ',' + c;
    out += '\n';
    for (size_t i = 0; i < ds.rows(); ++i) {
        out += format_date(ds.dates[i]);
        for (const auto& c : columns) {
            out += ',';
            const auto& v = ds.column(c)[i];
            if (v) out += format_double(*v);
        }
        out += '\n';
    }
    return out;
}

EventPanels parse_event_panel(std::string_view text) {
    const CsvTable t = parse_csv(text);
    const size_t c_date = t.column("date"), c_kind = t.column("kind"), c_shock = t.column("shock");
    const size_t c_pre = t.column("tfsi_pre"), c_post = t.column("tfsi_post");
    EventPanels panels;
    for (size_t r = 0; r < t.rows.size(); ++r) {
        const auto& row = t.rows[r];
        try {
            const std::string kind = to_lower(trim(row.at(c_kind)));
            Dataset& ds = panels[kind];
            const Date d = parse_date(row.at(c_date));
            if (!ds.dates.empty() && !(ds.dates.back() < d)) throw Error(ErrorKind::kParse, "dates must be increasing per kind");
            ds.dates.push_back(d);
            ds.columns["shock"].push_back(parse_optional_double(row.at(c_shock)));
            ds.columns["tfsi_pre"].push_back(parse_optional_double(row.at(c_pre)));
            ds.columns["tfsi_post"].push_back(parse_optional_double(row.at(c_post)));
        } catch (const std::exception& e) {
            throw Error(ErrorKind::kParse, "event panel line " + std::to_string(t.line_numbers[r]) + ": " + e.what());
        }
    }
    return panels;
}

const char* to_string(CovarianceType c) {
    switch (c) {
        case CovarianceType::kClassical: return "classical";
        case CovarianceType::kHac: return "hac";
        case CovarianceType::kWhite: return "white";
    }
    return "hac";
}

size_t RegressionResult::index_of(std::string_view name) const {
    for (size_t i = 0; i < names.size(); ++i) {
        if (names[i] == name) return i;
    }
    throw Error(ErrorKind::kInvalidArgument, "regression " + spec + " has no regressor '" + std::string(name) + "'");
}

std::string Regressor::label() const { return lag == 0 ? column : column + "_lag" + std::to_string(lag); }

RegressionResult fit_design(const Dataset& ds, const Design& d, CovarianceType cov, const SpecOptions& opts,
                            const std::string& spec_name) {
    const auto& ycol = ds.column(d.dependent);
    std::vector<const std::vector<std::optional<double>>*> xcols;
    for (const auto& r : d.regressors) {
        if (r.lag < 0) throw Error(ErrorKind::kInvalidArgument, "negative lag for " + r.column);
        xcols.push_back(&ds.column(r.column));
    }
    const std::vector<std::optional<double>>* shock = d.shock_sign ? &ds.column(d.shock_column) : nullptr;

    std::vector<size_t> rows;
    size_t dropped = 0;
    for (size_t i = 0; i < ds.rows(); ++i) {
        bool ok = ycol[i].has_value();
        for (size_t k = 0; ok && k < xcols.size(); ++k) {
            const int lag = d.regressors[k].lag;
            ok = i >= static_cast<size_t>(lag) && (*xcols[k])[i - static_cast<size_t>(lag)].has_value();
        }
        if (ok && shock) ok = (*shock)[i].has_value();
        if (!ok) {
            ++dropped;
            continue;
        }
        if (shock) {
            const double s = *(*shock)[i];
            if (*d.shock_sign > 0 ? !(s > 0.0) : !(s < 0.0)) continue;
        }
        rows.push_back(i);
    }
    const auto n = static_cast<Eigen::Index>(rows.size());
    const auto p = static_cast<Eigen::Index>(d.regressors.size()) + 1;
    if (n == 0) throw Error(ErrorKind::kStage, "spec " + spec_name + ": empty estimation sample");
    if (n <= p) {
        throw Error(ErrorKind::kStage, "spec " + spec_name + ": only " + std::to_string(n) + " observations for " +
                                           std::to_string(p) + " coefficients");
    }

    VectorXd y(n);
    MatrixXd X(n, p);
    X.col(0).setOnes();
    for (Eigen::Index r = 0; r < n; ++r) {
        const size_t i = rows[static_cast<size_t>(r)];
        y(r) = *ycol[i];
        for (size_t k = 0; k < xcols.size(); ++k) {
            X(r, static_cast<Eigen::Index>(k) + 1) = *(*xcols[k])[i - static_cast<size_t>(d.regressors[k].lag)];
        }
    }
    const auto standardize_vec = [&](VectorXd v, const std::string& what) -> VectorXd {
        try {
            const auto z = index::standardize(std::vector<double>(v.data(), v.data() + v.size()), opts.standardization);
            return Eigen::Map<const VectorXd>(z.data(), static_cast<Eigen::Index>(z.size()));
        } catch (const Error&) {
            throw Error(ErrorKind::kNumeric, "spec " + spec_name + ": cannot standardize " + what + " (zero variance)");
        }
    };
    if (d.standardize_dependent) y = standardize_vec(y, d.dependent);
    for (size_t k = 0; k < d.regressors.size(); ++k) {
        if (d.regressors[k].standardize) {
            X.col(static_cast<Eigen::Index>(k) + 1) = standardize_vec(X.col(static_cast<Eigen::Index>(k) + 1), d.regressors[k].column);
        }
    }

    RegressionResult res;
    res.spec = spec_name;
    res.dependent = d.dependent;
    res.names.push_back("const");
    for (const auto& r : d.regressors) res.names.push_back(r.label());
    const OlsFit fit = ols_fit(X, y, res.names);
    MatrixXd V;
    switch (cov) {
        case CovarianceType::kClassical: V = classical_covariance(fit); break;
        case CovarianceType::kWhite: V = white_covariance(X, fit.residuals); break;
        case CovarianceType::kHac: {
            const HacResult h = hac_covariance(X, fit.residuals, opts.hac);
            V = h.cov;
            res.bandwidth = h.bandwidth;
            break;
        }
    }
    res.covariance = cov;
    res.coef = fit.beta;
    res.se = V.diagonal().cwiseMax(0.0).cwiseSqrt();
    res.t = res.coef.cwiseQuotient(res.se);
    res.p.resize(p);
    const double df = static_cast<double>(n - p);
    for (Eigen::Index j = 0; j < p; ++j) {
        res.p(j) = t_pvalue(res.t(j), df);
        res.stars.push_back(stars(res.p(j)));
    }
    res.r2 = fit.r2;
    res.adj_r2 = fit.adj_r2;
    res.n_obs = static_cast<size_t>(n);
    res.n_dropped = dropped;
    res.residuals = fit.residuals;
    res.X = std::move(X);
    return res;
}

namespace {

const std::vector<std::string> kShockKinds{"mar", "jk", "bs"};
const std::vector<std::string> kSubsamples{"all", "tight", "ease"};

Design table1_design(int col) {
    Design d;
    d.dependent = "sp500_open_to_close";
    d.regressors.push_back({"tfsi_overnight", 0, true});
    if (col >= 2) d.regressors.push_back({"news", 0, true});
    if (col >= 3) {
        d.regressors.push_back({"sp500_close_to_close", 1, false});
        d.regressors.push_back({"sp500_overnight", 0, false});
        d.regressors.push_back({"vix", 1, false});
    }
    if (col >= 4) d.regressors.push_back({"fomc", 0, false});
    if (col >= 5) {
        d.regressors.push_back({"hml", 1, false});
        d.regressors.push_back({"smb", 1, false});
        d.regressors.push_back({"mom", 1, false});
    }
    return d;
}

Design table2_design(int col) {
    Design d;
    d.dependent = "sp500_close_to_close";
    d.regressors.push_back({"tfsi_daily", 0, true});
    if (col >= 2) d.regressors.push_back({"news", 0, true});
    if (col >= 3) {
        d.regressors.push_back({"sp500_close_to_close", 1, false});
        d.regressors.push_back({"vix", 0, false});
    }
    if (col >= 4) d.regressors.push_back({"fomc", 0, false});
    if (col >= 5) {
        d.regressors.push_back({"hml", 0, false});
        d.regressors.push_back({"smb", 0, false});
        d.regressors.push_back({"mom", 0, false});
    }
    return d;
}

std::vector<std::string> split_spec(std::string_view spec) { return split(spec, '.'); }

}  // namespace

std::vector<std::string> table_spec_names(int table) {
    std::vector<std::string> out;
    if (table == 1 || table == 2) {
        for (int c = 1; c <= 5; ++c) out.push_back("table" + std::to_string(table) + "." + std::to_string(c));
    } else if (table == 3) {
        for (const auto& k : kShockKinds) {
            for (const auto& s : kSubsamples) out.push_back("table3." + k + "." + s);
        }
    } else if (table == 4) {
        for (const auto& k : kShockKinds) {
            for (const auto& s : kSubsamples) {
                out.push_back("table4." + k + "." + s + ".uni");
                out.push_back("table4." + k + "." + s + ".with_pre");
            }
        }
    }
    return out;
}

std::vector<std::string> all_spec_names() {
    std::vector<std::string> out;
    for (int t = 1; t <= 4; ++t) {
        const auto names = table_spec_names(t);
        out.insert(out.end(), names.begin(), names.end());
    }
    return out;
}

bool is_known_spec(std::string_view spec) {
    const auto names = all_spec_names();
    return std::find(names.begin(), names.end(), spec) != names.end();
}

RegressionResult run_spec(const std::string& spec, const SpecInputs& in, const SpecOptions& opts) {
    if (!is_known_spec(spec)) throw Error(ErrorKind::kConfig, "unknown regression spec '" + spec + "'");
    const auto parts = split_spec(spec);
    if (parts[0] == "table1" || parts[0] == "table2") {
        if (!in.daily) throw Error(ErrorKind::kMissingInput, spec + " needs the daily analysis dataset");
        const int col = std::stoi(parts[1]);
        const Design d = parts[0] == "table1" ? table1_design(col) : table2_design(col);
        return fit_design(*in.daily, d, opts.daily_covariance, opts, spec);
    }
    if (!in.events) throw Error(ErrorKind::kMissingInput, spec + " needs the event panel");
    const auto it = in.events->find(parts[1]);
    if (it == in.events->end()) throw Error(ErrorKind::kMissingInput, spec + ": no " + parts[1] + " shocks in the event panel");
    Design d;
    d.shock_column = "shock";
    if (parts[2] == "tight") d.shock_sign = 1;
    if (parts[2] == "ease") d.shock_sign = -1;
    const bool z = opts.standardize_event_specs;
    d.standardize_dependent = z;
    if (parts[0] == "table3") {
        d.dependent = "shock";
        d.regressors.push_back({"tfsi_pre", 0, z});
    } else {
        d.dependent = "tfsi_post";
        d.regressors.push_back({"shock", 0, z});
        if (parts[3] == "with_pre") d.regressors.push_back({"tfsi_pre", 0, z});
    }
    return fit_design(it->second, d, opts.event_covariance, opts, spec);
}

std::string results_csv(const std::vector<RegressionResult>& results) {
    std::string out = "spec,variable,estimate,se,t,p,stars\n";
    for (const auto& r : results) {
        for (size_t j = 0; j < r.names.size(); ++j) {
            const auto k = static_cast<Eigen::Index>(j);
            out += r.spec + ',' + r.names[j] + ',' + format_double(r.coef(k)) + ',' + format_double(r.se(k)) + ',' +
                   format_double(r.t(k)) + ',' + format_double(r.p(k)) + ',' + r.stars[j] + '\n';
        }
        out += r.spec + ",n_obs," + std::to_string(r.n_obs) + ",,,,\n";
        out += r.spec + ",adj_r2," + format_double(r.adj_r2) + ",,,,\n";
    }
    return out;
}

std::string results_text(const std::string& title, const std::vector<RegressionResult>& results) {
    std::vector<std::string> vars;
    for (const auto& r : results) {
        for (const auto& n : r.names) {
            if (n != "const" && std::find(vars.begin(), vars.end(), n) == vars.end()) vars.push_back(n);
        }
    }
    vars.push_back("const");

    std::vector<std::vector<std::string>> grid;
    std::vector<std::string> head{""};
    for (size_t c = 0; c < results.size(); ++c) head.push_back("(" + std::to_string(c + 1) + ")");
    grid.push_back(head);
    std::vector<std::string> specs{""};
    for (const auto& r : results) specs.push_back(r.spec);
    grid.push_back(specs);
    for (const auto& v : vars) {
        std::vector<std::string> est{v}, se{""};
        for (const auto& r : results) {
            const auto it = std::find(r.names.begin(), r.names.end(), v);
            if (it == r.names.end()) {
                est.emplace_back();
                se.emplace_back();
                continue;
            }
            const auto j = static_cast<size_t>(it - r.names.begin());
            const auto k = static_cast<Eigen::Index>(j);
            est.push_back(format_fixed(r.coef(k), 3) + r.stars[j]);
            se.push_back("(" + format_fixed(r.se(k), 3) + ")");
        }
        grid.push_back(est);
        grid.push_back(se);
    }
    std::vector<std::string> nobs{"Observations"}, adj{"Adjusted R2"};
    for (const auto& r : results) {
        nobs.push_back(std::to_string(r.n_obs));
        adj.push_back(format_fixed(r.adj_r2, 3));
    }
    grid.push_back(nobs);
    grid.push_back(adj);

    std::vector<size_t> width(head.size(), 0);
    for (const auto& row : grid) {
        for (size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::string out = title + "\n";
    size_t total = 0;
    for (size_t w : width) total += w + 2;
    const std::string rule(total, '-');
    out += rule + "\n";
    for (size_t r = 0; r < grid.size(); ++r) {
        if (r == grid.size() - 2) out += rule + "\n";
        for (size_t c = 0; c < grid[r].size(); ++c) {
            const auto& cell = grid[r][c];
            if (c == 0) {
                out += cell + std::string(width[c] - cell.size() + 2, ' ');
            } else {
                out += std::string(width[c] - cell.size() + 2, ' ') + cell;
            }
        }
        while (!out.empty() && out.back() == ' ') out.pop_back();
        out += '\n';
        if (r == 1) out += rule + "\n";
    }
    out += rule + "\n";
    const auto cov = results.empty() ? CovarianceType::kHac : results.front().covariance;
    out += std::string("Note: *p<0.1; **p<0.05; ***p<0.01. Standard errors: ") + to_string(cov) + ".\n";
    return out;
}

}  // namespace tfsi::econometrics
