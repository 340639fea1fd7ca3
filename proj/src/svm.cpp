#include "tdt/classifier.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tdt/error.hpp"
#include "tdt/rng.hpp"

namespace tdt {

using nlohmann::json;

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma) {
    if (u.size() != v.size()) {
        throw UsageError("rbf_kernel: dimension mismatch (" + std::to_string(u.size()) + " vs " +
                         std::to_string(v.size()) + ")");
    }
    double d2 = 0.0;
    for (std::size_t k = 0; k < u.size(); ++k) {
        const double d = u[k] - v[k];
        d2 += d * d;
    }
    return std::exp(-gamma * d2);
}

Standardizer Standardizer::fit(std::span<const FeaturePoint> points) {
    if (points.empty()) throw DataError("cannot fit a standardizer on zero samples");
    const std::size_t d = points.front().size();
    Standardizer s;
    s.mean.assign(d, 0.0);
    s.std.assign(d, 0.0);
    for (const auto& p : points) {
        if (p.size() != d) throw DataError("feature vectors have inconsistent dimensions");
        for (std::size_t k = 0; k < d; ++k) s.mean[k] += p[k];
    }
    const double n = static_cast<double>(points.size());
    for (auto& m : s.mean) m /= n;
    for (const auto& p : points) {
        for (std::size_t k = 0; k < d; ++k) s.std[k] += (p[k] - s.mean[k]) * (p[k] - s.mean[k]);
    }
    for (auto& sd : s.std) sd = std::max(std::sqrt(sd / n), kStdFloor);
    return s;
}

FeaturePoint Standardizer::apply(std::span<const double> x) const {
    if (x.size() != mean.size()) throw DataError("feature dimension does not match the standardizer");
    FeaturePoint out(x.size());
    for (std::size_t k = 0; k < x.size(); ++k) out[k] = (x[k] - mean[k]) / std[k];
    return out;
}

namespace {

class SmoSolver {
public:
    SmoSolver(const std::vector<FeaturePoint>& x, const std::vector<double>& y, double gamma, double C)
        : x_(x), y_(y), gamma_(gamma), C_(C), n_(x.size()) {
        kernel_.resize(n_ * n_);
        for (std::size_t i = 0; i < n_; ++i) {
            kernel_[i * n_ + i] = 1.0;
            for (std::size_t j = i + 1; j < n_; ++j) {
                const double k = rbf_kernel(x_[i], x_[j], gamma_);
                kernel_[i * n_ + j] = k;
                kernel_[j * n_ + i] = k;
            }
        }
        alpha_.assign(n_, 0.0);
        grad_.assign(n_, -1.0);
    }

    // Returns the final violation gap.
    double solve(double tol, std::size_t max_iter) {
        constexpr double kTau = 1e-12;
        for (iterations_ = 0; iterations_ < max_iter; ++iterations_) {
            std::size_t i = n_;
            std::size_t j = n_;
            double gap = 0.0;
            if (select_working_set(i, j, gap, tol)) return gap;

            const double Kii = K(i, i), Kjj = K(j, j), Kij = K(i, j);
            const double Qij = y_[i] * y_[j] * Kij;
            const double old_ai = alpha_[i];
            const double old_aj = alpha_[j];

            if (y_[i] != y_[j]) {
                double quad = Kii + Kjj + 2.0 * Qij;
                if (quad <= 0.0) quad = kTau;
                const double delta = (-grad_[i] - grad_[j]) / quad;
                const double diff = alpha_[i] - alpha_[j];
                alpha_[i] += delta;
                alpha_[j] += delta;
                if (diff > 0.0) {
                    if (alpha_[j] < 0.0) {
                        alpha_[j] = 0.0;
                        alpha_[i] = diff;
                    }
                } else if (alpha_[i] < 0.0) {
                    alpha_[i] = 0.0;
                    alpha_[j] = -diff;
                }
                if (diff > 0.0) {
                    if (alpha_[i] > C_) {
                        alpha_[i] = C_;
                        alpha_[j] = C_ - diff;
                    }
                } else if (alpha_[j] > C_) {
                    alpha_[j] = C_;
                    alpha_[i] = C_ + diff;
                }
            } else {
                double quad = Kii + Kjj - 2.0 * Qij;
                if (quad <= 0.0) quad = kTau;
                const double delta = (grad_[i] - grad_[j]) / quad;
                const double sum = alpha_[i] + alpha_[j];
                alpha_[i] -= delta;
                alpha_[j] += delta;
                if (sum > C_) {
                    if (alpha_[i] > C_) {
                        alpha_[i] = C_;
                        alpha_[j] = sum - C_;
                    }
                } else if (alpha_[j] < 0.0) {
                    alpha_[j] = 0.0;
                    alpha_[i] = sum;
                }
                if (sum > C_) {
                    if (alpha_[j] > C_) {
                        alpha_[j] = C_;
                        alpha_[i] = sum - C_;
                    }
                } else if (alpha_[i] < 0.0) {
                    alpha_[i] = 0.0;
                    alpha_[j] = sum;
                }
            }

            const double dai = alpha_[i] - old_ai;
            const double daj = alpha_[j] - old_aj;
            for (std::size_t t = 0; t < n_; ++t) {
                grad_[t] += y_[t] * (y_[i] * K(t, i) * dai + y_[j] * K(t, j) * daj);
            }
        }
        std::size_t i = n_, j = n_;
        double gap = 0.0;
        select_working_set(i, j, gap, tol);
        return gap;
    }

    double rho() const {
        double ub = std::numeric_limits<double>::infinity();
        double lb = -std::numeric_limits<double>::infinity();
        double sum_free = 0.0;
        std::size_t n_free = 0;
        for (std::size_t t = 0; t < n_; ++t) {
            const double yg = y_[t] * grad_[t];
            if (is_upper(t)) {
                if (y_[t] < 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else if (is_lower(t)) {
                if (y_[t] > 0) ub = std::min(ub, yg);
                else lb = std::max(lb, yg);
            } else {
                ++n_free;
                sum_free += yg;
            }
        }
        return n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;
    }

    const std::vector<double>& alpha() const { return alpha_; }
    std::size_t iterations() const { return iterations_; }

private:
    double K(std::size_t i, std::size_t j) const { return kernel_[i * n_ + j]; }
    bool is_upper(std::size_t t) const { return alpha_[t] >= C_; }
    bool is_lower(std::size_t t) const { return alpha_[t] <= 0.0; }
    bool in_up(std::size_t t) const { return y_[t] > 0 ? !is_upper(t) : !is_lower(t); }
    bool in_low(std::size_t t) const { return y_[t] > 0 ? !is_lower(t) : !is_upper(t); }

    // Second-order selection (Fan, Chen, Lin 2005). Returns true when optimal.
    bool select_working_set(std::size_t& out_i, std::size_t& out_j, double& gap, double tol) const {
        constexpr double kTau = 1e-12;
        double gmax = -std::numeric_limits<double>::infinity();
        double gmin = std::numeric_limits<double>::infinity();
        std::size_t i = n_;
        for (std::size_t t = 0; t < n_; ++t) {
            if (in_up(t) && -y_[t] * grad_[t] > gmax) {
                gmax = -y_[t] * grad_[t];
                i = t;
            }
        }
        std::size_t j = n_;
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t t = 0; t < n_; ++t) {
            if (!in_low(t)) continue;
            const double v = -y_[t] * grad_[t];
            gmin = std::min(gmin, v);
            if (i == n_) continue;
            const double b = gmax - v;
            if (b > 0.0) {
                double a = K(i, i) + K(t, t) - 2.0 * K(i, t);
                if (a <= 0.0) a = kTau;
                const double obj = -(b * b) / a;
                if (obj < best) {
                    best = obj;
                    j = t;
                }
            }
        }
        gap = gmax - gmin;
        if (i == n_ || j == n_ || gap < tol) return true;
        out_i = i;
        out_j = j;
        return false;
    }

    const std::vector<FeaturePoint>& x_;
    const std::vector<double>& y_;
    double gamma_;
    double C_;
    std::size_t n_;
    std::vector<double> kernel_;
    std::vector<double> alpha_;
    std::vector<double> grad_;
    std::size_t iterations_ = 0;
};

} // namespace

SvmModel fit_svm(std::span<const FeaturePoint> features, std::span<const Label> labels, const SvmParams& params) {
    if (features.size() != labels.size()) throw DataError("fit_svm: features and labels differ in length");
    if (features.size() < 2) throw DataError("fit_svm: need at least 2 samples");
    if (!(params.C > 0.0)) throw UsageError("fit_svm: C must be > 0");
    if (params.gamma && !(*params.gamma > 0.0)) throw UsageError("fit_svm: gamma must be > 0");
    const bool has_pos = std::ranges::count(labels, Label::Machine) > 0;
    const bool has_neg = std::ranges::count(labels, Label::Human) > 0;
    if (!has_pos || !has_neg) throw DataError("fit_svm: training data contains a single class");

    const std::size_t n = features.size();
    for (const auto& p : features) {
        for (double v : p) {
            if (!std::isfinite(v)) throw DataError("fit_svm: non-finite feature value");
        }
    }

    SvmModel model;
    model.C = params.C;
    model.seed = params.seed;
    model.standardizer = Standardizer::fit(features);
    const std::size_t d = model.standardizer.mean.size();

    // Canonical order first, so that the seeded shuffle (and therefore the
    // solution) does not depend on how the caller ordered the samples.
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::ranges::sort(order, [&](std::size_t a, std::size_t b) {
        if (features[a] != features[b]) return features[a] < features[b];
        return labels[a] < labels[b];
    });
    Xoshiro256 rng(params.seed);
    rng.shuffle(std::span<std::size_t>(order));

    std::vector<FeaturePoint> x;
    std::vector<double> y;
    x.reserve(n);
    y.reserve(n);
    for (std::size_t idx : order) {
        x.push_back(model.standardizer.apply(features[idx]));
        y.push_back(labels[idx] == Label::Machine ? 1.0 : -1.0);
    }

    if (params.gamma) {
        model.gamma = *params.gamma;
    } else {
        double var_total = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            double m = 0.0, ss = 0.0;
            for (const auto& p : x) m += p[k];
            m /= static_cast<double>(n);
            for (const auto& p : x) ss += (p[k] - m) * (p[k] - m);
            var_total += ss / static_cast<double>(n);
        }
        var_total /= static_cast<double>(d);
        model.gamma = var_total > 0.0 ? 1.0 / (static_cast<double>(d) * var_total) : 1.0;
    }

    const std::size_t max_iter = params.max_iterations.value_or(std::max<std::size_t>(100000, 10 * n * n));
    SmoSolver solver(x, y, model.gamma, model.C);
    const double gap = solver.solve(params.tolerance, max_iter);
    if (gap >= params.tolerance) {
        std::ostringstream msg;
        msg << "fit_svm: SMO did not converge after " << solver.iterations()
            << " iterations (KKT violation " << gap << ", tolerance " << params.tolerance << ")";
        throw NumericalError(msg.str());
    }
    model.iterations = solver.iterations();
    model.bias = -solver.rho();

    const auto& alpha = solver.alpha();
    for (std::size_t t = 0; t < n; ++t) {
        if (alpha[t] > 0.0) {
            model.support_vectors.push_back(x[t]);
            model.dual_coefs.push_back(alpha[t] * y[t]);
        }
    }
    if (model.support_vectors.empty()) throw NumericalError("fit_svm: solution has no support vectors");
    model.validate();
    return model;
}

void SvmModel::validate() const {
    if (!(C > 0.0) || !(gamma > 0.0)) throw DataError("SVM model: C and gamma must be > 0");
    if (support_vectors.empty() || support_vectors.size() != dual_coefs.size()) {
        throw DataError("SVM model: support vector and coefficient counts differ or are zero");
    }
    const std::size_t d = standardizer.mean.size();
    if (d == 0 || standardizer.std.size() != d) throw DataError("SVM model: malformed standardizer");
    for (double s : standardizer.std) {
        if (!(s > 0.0)) throw DataError("SVM model: standardizer std must be > 0");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < dual_coefs.size(); ++i) {
        if (support_vectors[i].size() != d) throw DataError("SVM model: support vector dimension mismatch");
        if (std::abs(dual_coefs[i]) > C + 1e-9) throw DataError("SVM model: |dual coefficient| exceeds C");
        sum += dual_coefs[i];
    }
    if (std::abs(sum) > 1e-6) throw DataError("SVM model: dual coefficients do not sum to zero");
    if (!std::isfinite(bias)) throw DataError("SVM model: non-finite bias");
}

double decision_function(const SvmModel& model, std::span<const double> x) {
    const FeaturePoint z = model.standardizer.apply(x);
    double f = model.bias;
    for (std::size_t i = 0; i < model.support_vectors.size(); ++i) {
        f += model.dual_coefs[i] * rbf_kernel(model.support_vectors[i], z, model.gamma);
    }
    return f;
}

double dual_objective(const SvmModel& model) {
    double linear = 0.0;
    double quad = 0.0;
    const auto& sv = model.support_vectors;
    for (std::size_t i = 0; i < sv.size(); ++i) {
        linear += std::abs(model.dual_coefs[i]);
        for (std::size_t j = 0; j < sv.size(); ++j) {
            quad += model.dual_coefs[i] * model.dual_coefs[j] * rbf_kernel(sv[i], sv[j], model.gamma);
        }
    }
    return linear - 0.5 * quad;
}

json to_json(const SvmModel& model) {
    json j;
    j["version"] = 1;
    j["C"] = model.C;
    j["gamma"] = model.gamma;
    j["seed"] = model.seed;
    j["standardizer"] = {{"mean", model.standardizer.mean}, {"std", model.standardizer.std}};
    j["support_vectors"] = model.support_vectors;
    j["dual_coefs"] = model.dual_coefs;
    j["bias"] = model.bias;
    return j;
}

SvmModel svm_from_json(const json& j) {
    SvmModel m;
    try {
        if (j.at("version").get<int>() != 1) throw DataError("unsupported SVM model version");
        m.C = j.at("C").get<double>();
        m.gamma = j.at("gamma").get<double>();
        m.seed = j.at("seed").get<std::uint64_t>();
        m.standardizer.mean = j.at("standardizer").at("mean").get<std::vector<double>>();
        m.standardizer.std = j.at("standardizer").at("std").get<std::vector<double>>();
        m.support_vectors = j.at("support_vectors").get<std::vector<FeaturePoint>>();
        m.dual_coefs = j.at("dual_coefs").get<std::vector<double>>();
        m.bias = j.at("bias").get<double>();
    } catch (const json::exception& e) {
        throw DataError(std::string("malformed SVM model file: ") + e.what());
    }
    m.validate();
    return m;
}

} // namespace tdt
