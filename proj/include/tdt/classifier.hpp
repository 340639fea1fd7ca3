#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "tdt/features.hpp"
#include "tdt/ingest.hpp"

namespace tdt {

using FeaturePoint = std::vector<double>;

inline FeaturePoint to_point(const TdtFeatureVector& fv) {
    return {fv.morph_energy, fv.syn_energy, fv.disc_energy};
}

double rbf_kernel(std::span<const double> u, std::span<const double> v, double gamma);

struct Standardizer {
    std::vector<double> mean;
    std::vector<double> std;

    static constexpr double kStdFloor = 1e-8;

    // Population mean/std per column; std floored at kStdFloor.
    static Standardizer fit(std::span<const FeaturePoint> points);
    FeaturePoint apply(std::span<const double> x) const;
};

struct SvmParams {
    double C = 1.0;
    std::optional<double> gamma; // nullopt selects the "scale" heuristic
    double tolerance = 1e-3;
    std::uint64_t seed = 0;
    std::optional<std::size_t> max_iterations; // default 10 * n * n, at least 100000
};

struct SvmModel {
    std::vector<FeaturePoint> support_vectors; // standardized space
    std::vector<double> dual_coefs;            // alpha_i * y_i
    double bias = 0.0;
    double gamma = 1.0;
    double C = 1.0;
    std::uint64_t seed = 0;
    Standardizer standardizer;
    std::size_t iterations = 0;

    std::size_t dimension() const { return standardizer.mean.size(); }
    // Throws DataError when an invariant is violated.
    void validate() const;
};

// Soft-margin C-SVM dual solved by SMO with second-order working-set selection.
SvmModel fit_svm(std::span<const FeaturePoint> features, std::span<const Label> labels,
                 const SvmParams& params = {});

// sum_i coef_i K(sv_i, standardize(x)) + bias; positive means machine.
double decision_function(const SvmModel& model, std::span<const double> x);
inline double decision_function(const SvmModel& model, const TdtFeatureVector& fv) {
    return decision_function(model, to_point(fv));
}

// Dual objective sum(alpha) - 1/2 sum_ij alpha_i alpha_j y_i y_j K_ij at the fitted solution.
double dual_objective(const SvmModel& model);

nlohmann::json to_json(const SvmModel& model);
SvmModel svm_from_json(const nlohmann::json& j);

enum class ThresholdDirection { GreaterIsMachine, LessIsMachine };

struct ThresholdModel {
    double threshold = 0.0;
    ThresholdDirection direction = ThresholdDirection::GreaterIsMachine;
    double f1 = 0.0; // training F1 at the chosen threshold

    bool is_machine(double score) const {
        return direction == ThresholdDirection::GreaterIsMachine ? score > threshold : score < threshold;
    }
};

std::string to_string(ThresholdDirection direction);

// Sweeps midpoints of sorted unique scores plus one point beyond each end, in
// both directions, maximizing machine-class F1.
ThresholdModel fit_threshold(std::span<const double> scores, std::span<const Label> labels);

} // namespace tdt
