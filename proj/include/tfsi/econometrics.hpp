#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "tfsi/index.hpp"
#include "tfsi/timeutil.hpp"

namespace tfsi::econometrics {

struct OlsFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd residuals;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    std::size_t n = 0;
    std::size_t p = 0;
    /// Residual variance s^2 = e'e / (n - p).
    double sigma2 = 0.0;
    Eigen::MatrixXd xtx_inv;
};

/// Least squares via column-pivoted QR. X carries its own intercept column.
/// Throws kNumeric naming the collinear columns when X is rank deficient.
OlsFit ols_fit(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const std::vector<std::string>& names = {});

enum class Kernel { kBartlett, kQuadraticSpectral };
const char* to_string(Kernel k);
Kernel parse_kernel(std::string_view s);

struct HacOptions {
    Kernel kernel = Kernel::kQuadraticSpectral;
    /// Bartlett: number of lags L >= 0 (weights 1 - j/(L+1)); L = 0 is White.
    /// Quadratic spectral: bandwidth > 0. Unset = automatic.
    std::optional<double> bandwidth;
};

struct HacResult {
    Eigen::MatrixXd cov;
    double bandwidth = 0.0;
};

double bartlett_weight(double j, double lags);
double qs_weight(double x);

/// Newey-West rule floor(4 (n/100)^(2/9)).
int newey_west_lags(std::size_t n);
/// Andrews AR(1) plug-in 1.3221 (alpha(2) n)^(1/5) over the score columns.
double andrews_qs_bandwidth(const Eigen::MatrixXd& scores);

/// (X'X)^-1 [sum_j k(j/B) Gamma_j] (X'X)^-1, no small-sample correction.
HacResult hac_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals, const HacOptions& opts = {});
/// HC0: (X'X)^-1 X' diag(e^2) X (X'X)^-1.
Eigen::MatrixXd white_covariance(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals);
/// s^2 (X'X)^-1.
Eigen::MatrixXd classical_covariance(const OlsFit& fit);

struct WhiteTest {
    double statistic = 0.0;
    double p_value = 1.0;
    int df = 0;
    /// Auxiliary regressors dropped as duplicates or collinear.
    std::vector<std::string> dropped;
};

/// n R^2 of e^2 on levels, squares and cross-products of the non-constant
/// columns of X, against chi-squared(df).
WhiteTest white_test(const Eigen::MatrixXd& X, const Eigen::VectorXd& residuals,
                     const std::vector<std::string>& names = {});

/// Two-sided p-value of t with df degrees of freedom.
double t_pvalue(double t, double df);
/// "***" p < 0.01, "**" p < 0.05, "*" p < 0.1.
std::string stars(double p);

// ---------------------------------------------------------------------------
// Datasets and named specifications

/// Date-indexed numeric columns; empty field = missing.
struct Dataset {
    std::vector<Date> dates;
    std::map<std::string, std::vector<std::optional<double>>> columns;

    std::size_t rows() const { return dates.size(); }
    bool has(const std::string& name) const { return columns.count(name) > 0; }
    const std::vector<std::optional<double>>& column(const std::string& name) const;
};

/// Column order of the daily analysis dataset.
const std::vector<std::string>& dataset_columns();

Dataset parse_dataset_csv(std::string_view text, const std::vector<std::string>& required = dataset_columns());
std::string dataset_csv(const Dataset& ds, const std::vector<std::string>& columns = dataset_columns());

/// Event panel rows for one shock kind: columns shock, tfsi_pre, tfsi_post.
using EventPanels = std::map<std::string, Dataset>;
/// CSV "date,kind,shock,tfsi_pre,tfsi_post,n_pre,n_post,regime".
EventPanels parse_event_panel(std::string_view text);

enum class CovarianceType { kClassical, kHac, kWhite };
const char* to_string(CovarianceType c);

struct SpecOptions {
    HacOptions hac;
    index::Standardization standardization = index::Standardization::kPopulation;
    /// Tables 3-4 standardize dependent and independent variables within each subsample.
    bool standardize_event_specs = true;
    /// Tables 3-4 report OLS standard errors unless overridden.
    CovarianceType event_covariance = CovarianceType::kClassical;
    CovarianceType daily_covariance = CovarianceType::kHac;
};

struct RegressionResult {
    std::string spec;
    std::string dependent;
    std::vector<std::string> names;  // "const" first
    Eigen::VectorXd coef, se, t, p;
    std::vector<std::string> stars;
    double r2 = 0.0;
    double adj_r2 = 0.0;
    std::size_t n_obs = 0;
    std::size_t n_dropped = 0;  // listwise deletions
    Eigen::VectorXd residuals;
    Eigen::MatrixXd X;  // design actually fitted
    CovarianceType covariance = CovarianceType::kHac;
    double bandwidth = 0.0;

    /// Index of a regressor by name; throws when absent.
    std::size_t index_of(std::string_view name) const;
};

/// Regressor drawn from a dataset column, optionally lagged by rows.
struct Regressor {
    std::string column;
    int lag = 0;
    bool standardize = false;
    std::string label() const;
};

struct Design {
    std::string dependent;
    bool standardize_dependent = false;
    std::vector<Regressor> regressors;
    /// Keep rows where this returns true (applied after listwise deletion).
    std::optional<int> shock_sign;  // +1 tight, -1 ease
    std::string shock_column;
};

RegressionResult fit_design(const Dataset& ds, const Design& d, CovarianceType cov, const SpecOptions& opts,
                            const std::string& spec_name = "");

/// Every known specification name, in table order.
std::vector<std::string> all_spec_names();
std::vector<std::string> table_spec_names(int table);
bool is_known_spec(std::string_view spec);

struct SpecInputs {
    const Dataset* daily = nullptr;
    const EventPanels* events = nullptr;
};

/// table1.1-5, table2.1-5, table3.{mar,jk,bs}.{all,tight,ease},
/// table4.{mar,jk,bs}.{all,tight,ease}.{uni,with_pre}.
RegressionResult run_spec(const std::string& spec, const SpecInputs& in, const SpecOptions& opts = {});

std::string results_csv(const std::vector<RegressionResult>& results);
/// Aligned text table: one column per result, coefficient with stars over the
/// standard error in parentheses, then observations and adjusted R^2.
std::string results_text(const std::string& title, const std::vector<RegressionResult>& results);

}  // namespace tfsi::econometrics
