#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "tdt/error.hpp"
#include "tdt/stationarity.hpp"

namespace tdt {

namespace {

// MacKinnon, J.G. (2010), "Critical Values for Cointegration Tests",
// Queen's Economics Department Working Paper 1227, Table 2, case "c", N = 1:
// cv(n) = b0 + b1/n + b2/n^2 + b3/n^3.
struct CriticalSurface {
    double alpha;
    double b[4];
};

constexpr CriticalSurface kConstantOnly[] = {
    {0.01, {-3.43035, -6.5393, -16.786, -79.433}},
    {0.05, {-2.86154, -2.8903, -4.234, -40.040}},
    {0.10, {-2.56677, -1.5384, -2.809, 0.0}},
};

constexpr std::size_t kMinLength = 12;

struct OlsFit {
    double rss = 0.0;
    double t_level = 0.0;
    std::size_t nobs = 0;
};

// Rows s = start..T-2 of dy[s] = c + g*y[s] + sum_{j=1..p} d_j dy[s-j].
OlsFit regress(std::span<const double> y, const std::vector<double>& dy, std::size_t p, std::size_t start,
               bool want_t) {
    const std::size_t nobs = dy.size() - start;
    const std::size_t k = 2 + p;
    Eigen::MatrixXd X(nobs, k);
    Eigen::VectorXd target(nobs);
    for (std::size_t r = 0; r < nobs; ++r) {
        const std::size_t s = start + r;
        target(r) = dy[s];
        X(r, 0) = 1.0;
        X(r, 1) = y[s];
        for (std::size_t j = 1; j <= p; ++j) X(r, 1 + j) = dy[s - j];
    }
    const Eigen::MatrixXd xtx = X.transpose() * X;
    const Eigen::LDLT<Eigen::MatrixXd> ldlt(xtx);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-12 * ldlt.vectorD().maxCoeff()) {
        throw NumericalError("adf_test: singular regression design");
    }
    const Eigen::VectorXd beta = ldlt.solve(X.transpose() * target);
    const Eigen::VectorXd resid = target - X * beta;
    OlsFit fit;
    fit.nobs = nobs;
    fit.rss = resid.squaredNorm();
    if (want_t) {
        if (nobs <= k) throw DataError("adf_test: too few observations for the regression");
        const double s2 = fit.rss / static_cast<double>(nobs - k);
        Eigen::VectorXd e1 = Eigen::VectorXd::Zero(k);
        e1(1) = 1.0;
        const double var = s2 * ldlt.solve(e1)(1);
        if (!(var > 0.0)) throw NumericalError("adf_test: degenerate coefficient variance");
        fit.t_level = beta(1) / std::sqrt(var);
    }
    return fit;
}

} // namespace

double adf_critical_value(double alpha, std::size_t nobs) {
    for (const auto& row : kConstantOnly) {
        if (std::abs(row.alpha - alpha) < 1e-12) {
            const double inv = 1.0 / static_cast<double>(nobs);
            return row.b[0] + inv * (row.b[1] + inv * (row.b[2] + inv * row.b[3]));
        }
    }
    throw UsageError("adf_test: alpha must be one of 0.01, 0.05, 0.10");
}

AdfResult adf_test(std::span<const double> series, double alpha) {
    const std::size_t T = series.size();
    if (T < kMinLength) {
        throw DataError("adf_test: series of length " + std::to_string(T) + " is shorter than " +
                        std::to_string(kMinLength));
    }
    double mean = 0.0;
    for (double v : series) {
        if (!std::isfinite(v)) throw DataError("adf_test: non-finite value in series");
        mean += v;
    }
    mean /= static_cast<double>(T);
    double ss = 0.0;
    for (double v : series) ss += (v - mean) * (v - mean);
    if (!(ss > 0.0)) throw DataError("adf_test: constant series (zero variance)");

    // Validate alpha before the regressions.
    adf_critical_value(alpha, T);

    std::vector<double> dy(T - 1);
    for (std::size_t t = 1; t < T; ++t) dy[t - 1] = series[t] - series[t - 1];

    const auto schwert = static_cast<std::size_t>(std::floor(12.0 * std::pow(static_cast<double>(T) / 100.0, 0.25)));
    const std::size_t pmax = std::min(schwert, T / 2 - 2);

    std::size_t best_p = 0;
    double best_aic = std::numeric_limits<double>::infinity();
    for (std::size_t p = 0; p <= pmax; ++p) {
        OlsFit fit;
        try {
            fit = regress(series, dy, p, pmax, false);
        } catch (const NumericalError&) {
            continue; // collinear lag set, not a candidate
        }
        const double n = static_cast<double>(fit.nobs);
        const double aic = n * std::log(std::max(fit.rss, std::numeric_limits<double>::min()) / n) +
                           2.0 * static_cast<double>(p + 2);
        if (aic < best_aic) {
            best_aic = aic;
            best_p = p;
        }
    }

    const OlsFit fit = regress(series, dy, best_p, best_p, true);
    AdfResult res;
    res.statistic = fit.t_level;
    res.lags_used = best_p;
    res.max_lags = pmax;
    res.nobs = fit.nobs;
    res.alpha = alpha;
    res.critical_value = adf_critical_value(alpha, fit.nobs);
    res.reject_unit_root = res.statistic < res.critical_value;
    return res;
}

} // namespace tdt
