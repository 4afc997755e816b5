#include <gtest/gtest.h>

#include <boost/math/distributions/chi_squared.hpp>
#include <random>

#include "tfsi/econometrics.hpp"
#include "tfsi/error.hpp"

using namespace tfsi;
using namespace tfsi::econometrics;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

struct Gen {
    std::mt19937_64 rng;
    std::normal_distribution<double> n{0.0, 1.0};
    explicit Gen(unsigned s) : rng(s) {}
    double operator()() { return n(rng); }
};

MatrixXd design(Gen& g, int n, int k) {
    MatrixXd X(n, k + 1);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = 1.0;
        for (int j = 1; j <= k; ++j) X(i, j) = g();
    }
    return X;
}

VectorXd normal_equations(const MatrixXd& X, const VectorXd& y) {
    const MatrixXd xtx = X.transpose() * X;
    return xtx.inverse() * (X.transpose() * y);
}

// White's auxiliary regression written out directly: levels, squares and
// cross-products of the non-constant regressors, solved by normal equations.
double white_oracle(const MatrixXd& X, const VectorXd& e) {
    const int n = static_cast<int>(X.rows()), k = static_cast<int>(X.cols()) - 1;
    std::vector<VectorXd> cols{VectorXd::Ones(n)};
    for (int j = 1; j <= k; ++j) cols.push_back(X.col(j));
    for (int a = 1; a <= k; ++a) {
        for (int b = a; b <= k; ++b) cols.push_back(X.col(a).cwiseProduct(X.col(b)));
    }
    MatrixXd Z(n, static_cast<int>(cols.size()));
    for (size_t c = 0; c < cols.size(); ++c) Z.col(static_cast<int>(c)) = cols[c];
    const VectorXd u = e.cwiseProduct(e);
    const VectorXd fit = Z * normal_equations(Z, u);
    const double mean = u.mean();
    const double ssr = (u - fit).squaredNorm(), sst = (u.array() - mean).matrix().squaredNorm();
    return n * (1.0 - ssr / sst);
}

Dataset daily_dataset(Gen& g, int n, double beta) {
    Dataset ds;
    Date d = parse_date("2015-01-01");
    for (const auto& c : dataset_columns()) ds.columns[c];
    for (int i = 0; i < n; ++i) {
        ds.dates.push_back(d);
        d = add_days(d, 1);
        const double x = g();
        ds.columns["tfsi_overnight"].push_back(x);
        ds.columns["tfsi_daily"].push_back(x + 0.3 * g());
        ds.columns["sp500_open_to_close"].push_back(beta * x + g());
        ds.columns["sp500_close_to_close"].push_back(g());
        ds.columns["sp500_overnight"].push_back(0.5 * g());
        ds.columns["news"].push_back(g());
        ds.columns["fomc"].push_back(i % 30 == 0 ? 1.0 : 0.0);
        for (const char* c : {"hml", "smb", "mom"}) ds.columns[c].push_back(0.5 * g());
        ds.columns["vix"].push_back(18.0 + 3.0 * g());
    }
    return ds;
}

}  // namespace

TEST(Ols, ExactFit) {
    MatrixXd X(5, 2);
    VectorXd y(5);
    for (int i = 0; i < 5; ++i) {
        X(i, 0) = 1.0;
        X(i, 1) = i;
        y(i) = 2.0 + 3.0 * i;
    }
    const auto f = ols_fit(X, y);
    EXPECT_NEAR(f.beta(0), 2.0, 1e-12);
    EXPECT_NEAR(f.beta(1), 3.0, 1e-12);
    EXPECT_LT(f.residuals.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(f.r2, 1.0, 1e-12);
}

TEST(Ols, MatchesNormalEquations) {
    Gen g(1);
    for (int rep = 0; rep < 20; ++rep) {
        const MatrixXd X = design(g, 200, 4);
        VectorXd y(200);
        for (int i = 0; i < 200; ++i) y(i) = 1.0 + 0.5 * X(i, 1) - 0.2 * X(i, 3) + g();
        const auto f = ols_fit(X, y);
        const VectorXd b = normal_equations(X, y);
        for (int j = 0; j < 5; ++j) EXPECT_NEAR(f.beta(j), b(j), 1e-10 * std::max(1.0, std::fabs(b(j))));
        const double n = 200, p = 5;
        EXPECT_NEAR(f.adj_r2, 1.0 - (1.0 - f.r2) * (n - 1) / (n - p), 1e-14);
        EXPECT_NEAR(f.sigma2, f.residuals.squaredNorm() / (n - p), 1e-12);
    }
}

TEST(Ols, IndependentResponseHasSmallSlope) {
    Gen g(2);
    const MatrixXd X = design(g, 2000, 1);
    VectorXd y(2000);
    for (int i = 0; i < 2000; ++i) y(i) = g();
    const auto f = ols_fit(X, y);
    EXPECT_LT(std::fabs(f.beta(1)), 0.1);
    EXPECT_LT(f.adj_r2, 0.01);
}

TEST(Ols, RankDeficiencyNamesColumns) {
    Gen g(3);
    MatrixXd X = design(g, 50, 2);
    X.col(2) = 2.0 * X.col(1);
    VectorXd y = VectorXd::Random(50);
    try {
        ols_fit(X, y, {"const", "a", "twice_a"});
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.kind(), ErrorKind::kNumeric);
        const std::string msg = e.what();
        EXPECT_TRUE(msg.find("twice_a") != std::string::npos || msg.find(": a") != std::string::npos) << msg;
    }
    EXPECT_THROW(ols_fit(design(g, 3, 3), VectorXd::Ones(3)), Error);
}

TEST(Hac, BartlettZeroLagsIsWhite) {
    Gen g(4);
    const MatrixXd X = design(g, 300, 3);
    VectorXd y(300);
    for (int i = 0; i < 300; ++i) y(i) = X(i, 1) + std::fabs(X(i, 2)) * g();
    const auto f = ols_fit(X, y);
    const auto hac = hac_covariance(X, f.residuals, {Kernel::kBartlett, 0.0});
    const MatrixXd w = white_covariance(X, f.residuals);
    EXPECT_LT((hac.cov - w).cwiseAbs().maxCoeff(), 1e-12 * w.cwiseAbs().maxCoeff());
}

TEST(Hac, RejectsBadBandwidth) {
    Gen g(5);
    const MatrixXd X = design(g, 50, 1);
    const VectorXd e = VectorXd::Random(50);
    EXPECT_THROW(hac_covariance(X, e, {Kernel::kQuadraticSpectral, 0.0}), Error);
    EXPECT_THROW(hac_covariance(X, e, {Kernel::kQuadraticSpectral, -1.0}), Error);
    EXPECT_THROW(hac_covariance(X, e, {Kernel::kBartlett, -1.0}), Error);
}

TEST(Hac, KernelsAndRules) {
    EXPECT_EQ(qs_weight(0.0), 1.0);
    EXPECT_NEAR(qs_weight(1.0), 25.0 / (12 * M_PI * M_PI) * (std::sin(6 * M_PI / 5) / (6 * M_PI / 5) - std::cos(6 * M_PI / 5)), 1e-15);
    EXPECT_DOUBLE_EQ(bartlett_weight(1, 3), 0.75);
    EXPECT_EQ(bartlett_weight(4, 3), 0.0);
    EXPECT_EQ(newey_west_lags(100), 4);
    EXPECT_EQ(newey_west_lags(1000), 6);
}

TEST(Hac, ManualBartlettSandwich) {
    Gen g(6);
    const MatrixXd X = design(g, 60, 2);
    const VectorXd e = VectorXd::Random(60);
    const int L = 3;
    MatrixXd S = MatrixXd::Zero(3, 3);
    for (int j = -L; j <= L; ++j) {
        const double w = 1.0 - std::abs(j) / (L + 1.0);
        for (int t = 0; t < 60; ++t) {
            const int s = t - j;
            if (s < 0 || s >= 60) continue;
            S += w * e(t) * e(s) * X.row(t).transpose() * X.row(s);
        }
    }
    const MatrixXd bread = (X.transpose() * X).inverse();
    const MatrixXd expected = bread * S * bread;
    const auto hac = hac_covariance(X, e, {Kernel::kBartlett, static_cast<double>(L)});
    EXPECT_LT((hac.cov - expected).cwiseAbs().maxCoeff(), 1e-12 * expected.cwiseAbs().maxCoeff());
}

TEST(Hac, InvariantToColumnOrder) {
    Gen g(7);
    const MatrixXd X = design(g, 200, 3);
    VectorXd y(200);
    double u = 0;
    for (int i = 0; i < 200; ++i) {
        u = 0.6 * u + g();
        y(i) = X(i, 1) + u;
    }
    const auto f = ols_fit(X, y);
    const auto a = hac_covariance(X, f.residuals);
    const std::vector<int> perm{0, 3, 1, 2};
    MatrixXd P(200, 4);
    for (int j = 0; j < 4; ++j) P.col(j) = X.col(perm[static_cast<size_t>(j)]);
    const auto fp = ols_fit(P, y);
    const auto b = hac_covariance(P, fp.residuals);
    for (int i = 0; i < 4; ++i) {
        for (int j = 0; j < 4; ++j) {
            EXPECT_NEAR(b.cov(i, j), a.cov(perm[static_cast<size_t>(i)], perm[static_cast<size_t>(j)]), 1e-12);
        }
    }
}

TEST(Hac, IidErrorsStayNearClassical) {
    Gen g(8);
    double ratio = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const MatrixXd X = design(g, 200, 1);
        VectorXd y(200);
        for (int i = 0; i < 200; ++i) y(i) = 0.2 * X(i, 1) + g();
        const auto f = ols_fit(X, y);
        ratio += std::sqrt(hac_covariance(X, f.residuals).cov(1, 1) / classical_covariance(f)(1, 1)) / 500.0;
    }
    EXPECT_NEAR(ratio, 1.0, 0.15);
}

TEST(White, ConstantResidualsGiveZero) {
    Gen g(9);
    const MatrixXd X = design(g, 40, 2);
    const auto w = white_test(X, VectorXd::Constant(40, 0.7));
    EXPECT_EQ(w.statistic, 0.0);
    EXPECT_EQ(w.p_value, 1.0);
}

TEST(White, MatchesAuxiliaryRegressionOracle) {
    Gen g(10);
    for (int rep = 0; rep < 10; ++rep) {
        const MatrixXd X = design(g, 150, 2);
        VectorXd y(150);
        for (int i = 0; i < 150; ++i) y(i) = X(i, 1) + (1.0 + std::fabs(X(i, 1))) * g();
        const auto f = ols_fit(X, y);
        const auto w = white_test(X, f.residuals);
        EXPECT_EQ(w.df, 5);
        EXPECT_NEAR(w.statistic, white_oracle(X, f.residuals), 1e-8);
        const boost::math::chi_squared chi(5);
        EXPECT_NEAR(w.p_value, boost::math::cdf(boost::math::complement(chi, w.statistic)), 1e-12);
    }
}

TEST(White, DropsDuplicatedAuxiliaryColumns) {
    Gen g(11);
    MatrixXd X = design(g, 100, 2);
    for (int i = 0; i < 100; ++i) X(i, 2) = X(i, 1) > 0 ? 1.0 : 0.0;  // dummy: d^2 == d
    const VectorXd e = VectorXd::Random(100);
    const auto w = white_test(X, e, {"const", "x", "d"});
    EXPECT_EQ(w.df, 4);
    EXPECT_FALSE(w.dropped.empty());
}

TEST(Stars, Thresholds) {
    EXPECT_EQ(stars(0.005), "***");
    EXPECT_EQ(stars(0.03), "**");
    EXPECT_EQ(stars(0.07), "*");
    EXPECT_EQ(stars(0.2), "");
    EXPECT_NEAR(t_pvalue(1.96, 1e6), 0.05, 1e-3);
}

TEST(Specs, NamesAndUnknown) {
    EXPECT_EQ(all_spec_names().size(), 5u + 5u + 9u + 18u);
    EXPECT_TRUE(is_known_spec("table4.bs.ease.with_pre"));
    EXPECT_FALSE(is_known_spec("table1.6"));
    Gen g(12);
    const auto ds = daily_dataset(g, 100, 0.0);
    EXPECT_THROW(run_spec("table9.1", {&ds, nullptr}), Error);
    EXPECT_THROW(run_spec("table3.mar.all", {&ds, nullptr}), Error);
}

TEST(Specs, Table1ColumnsAndStarsConsistent) {
    Gen g(13);
    const auto ds = daily_dataset(g, 800, -0.3);
    for (const auto& spec : table_spec_names(1)) {
        const auto r = run_spec(spec, {&ds, nullptr});
        EXPECT_EQ(r.names.front(), "const");
        for (Eigen::Index j = 0; j < r.coef.size(); ++j) {
            EXPECT_NEAR(r.t(j), r.coef(j) / r.se(j), 1e-12);
            EXPECT_EQ(r.stars[static_cast<size_t>(j)], stars(r.p(j)));
        }
        EXPECT_LT(r.coef(static_cast<Eigen::Index>(r.index_of("tfsi_overnight"))), 0.0);
    }
    const auto r5 = run_spec("table1.5", {&ds, nullptr});
    EXPECT_EQ(r5.names.size(), 10u);
    EXPECT_NO_THROW(r5.index_of("vix_lag1"));
    EXPECT_EQ(r5.n_obs, 799u);
    EXPECT_EQ(r5.n_dropped, 1u);
    const auto r2 = run_spec("table2.5", {&ds, nullptr});
    EXPECT_NO_THROW(r2.index_of("vix"));
    EXPECT_NO_THROW(r2.index_of("sp500_close_to_close_lag1"));
}

TEST(Specs, EventSubsamplesSplitAndStandardize) {
    Gen g(14);
    Dataset panel;
    Date d = parse_date("2015-01-01");
    for (int i = 0; i < 60; ++i) {
        panel.dates.push_back(d);
        d = add_days(d, 7);
        const double pre = g();
        const double shock = i % 2 ? std::fabs(1.0 + 0.5 * pre + 0.3 * g()) : -std::fabs(1.0 + 0.3 * g());
        panel.columns["shock"].push_back(shock);
        panel.columns["tfsi_pre"].push_back(pre);
        panel.columns["tfsi_post"].push_back(i == 5 ? std::optional<double>() : std::optional<double>(0.5 * pre + g()));
    }
    const EventPanels panels{{"mar", panel}};
    const SpecInputs in{nullptr, &panels};
    const auto all = run_spec("table3.mar.all", in);
    const auto tight = run_spec("table3.mar.tight", in);
    const auto ease = run_spec("table3.mar.ease", in);
    EXPECT_EQ(all.n_obs, tight.n_obs + ease.n_obs);
    for (const auto* r : {&all, &tight, &ease}) {
        EXPECT_NEAR(r->coef(0), 0.0, 1e-10);
        EXPECT_EQ(r->covariance, CovarianceType::kClassical);
    }
    EXPECT_GT(tight.coef(1), 0.0);
    const auto post = run_spec("table4.mar.all.with_pre", in);
    EXPECT_EQ(post.n_obs, 59u);
    EXPECT_EQ(post.names.size(), 3u);

    Dataset only_tight = panel;
    for (auto& v : only_tight.columns["shock"]) v = std::fabs(*v) + 0.1;
    const EventPanels p2{{"mar", only_tight}};
    EXPECT_THROW(run_spec("table3.mar.ease", {nullptr, &p2}), Error);
}

TEST(Specs, IrrelevantRegressorDoesNotRaiseAdjustedR2OnAverage) {
    Gen g(15);
    double diff = 0;
    for (int rep = 0; rep < 500; ++rep) {
        const MatrixXd X = design(g, 100, 2);
        VectorXd y(100);
        for (int i = 0; i < 100; ++i) y(i) = 0.5 * X(i, 1) + g();
        diff += (ols_fit(X, y).adj_r2 - ols_fit(X.leftCols(2), y).adj_r2) / 500.0;
    }
    EXPECT_LT(diff, 1e-3);
}

TEST(Dataset, CsvRoundTripAndLagLabels) {
    Gen g(16);
    auto ds = daily_dataset(g, 20, 0.1);
    ds.columns["vix"][3].reset();
    const std::string csv = dataset_csv(ds);
    EXPECT_EQ(dataset_csv(parse_dataset_csv(csv)), csv);
    EXPECT_EQ((Regressor{"vix", 1, false}.label()), "vix_lag1");
    EXPECT_THROW(parse_dataset_csv("date,sp500_open_to_close\n2020-01-01,1\n"), Error);
}

TEST(Results, CsvShape) {
    Gen g(17);
    const auto ds = daily_dataset(g, 200, -0.3);
    const auto r = run_spec("table1.1", {&ds, nullptr});
    const std::string csv = results_csv({r});
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "spec,variable,estimate,se,t,p,stars");
    EXPECT_NE(csv.find("table1.1,n_obs,200"), std::string::npos);
    const std::string text = results_text("T", {r});
    EXPECT_NE(text.find("Observations"), std::string::npos);
}
