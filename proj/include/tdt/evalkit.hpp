#pragma once

#include <span>
#include <vector>

#include <json.hpp>

#include "tdt/classifier.hpp"
#include "tdt/ingest.hpp"

namespace tdt {

// Mann-Whitney AUROC: P(pos > neg) + 1/2 P(pos == neg).
double auroc(std::span<const double> scores, std::span<const Label> labels);

// Best TPR among thresholds "score >= t" whose empirical FPR <= fpr_target.
// Step-function ROC, no interpolation.
double tpr_at_fpr(std::span<const double> scores, std::span<const Label> labels, double fpr_target = 0.05);

// Machine-class F1; 0 when precision + recall is 0.
double f1_score(std::span<const Label> predictions, std::span<const Label> labels);

struct MiEstimate {
    double bits = 0.0;     // clamped at 0 for reporting
    double raw_bits = 0.0; // estimator output before clamping
    std::size_t k = 3;
    std::size_t n = 0;
};

// k-NN estimator of I(features; label) for a discrete label (Ross 2014).
// Features are standardized per column; Euclidean metric; neighbor ties broken by index.
MiEstimate mi_knn(std::span<const FeaturePoint> features, std::span<const Label> labels, std::size_t k = 3);

struct EvalReport {
    double auroc = 0.0;
    double f1 = 0.0;
    double tpr_at_fpr = 0.0;
    double fpr_target = 0.05;
    std::size_t n_pos = 0;
    std::size_t n_neg = 0;
};

EvalReport evaluate(std::span<const double> scores, std::span<const Label> labels,
                    std::span<const Label> predictions, double fpr_target = 0.05);

// Scalar path: threshold fitted for F1 on dev; test scores are oriented by the
// fitted direction before AUROC / TPR.
EvalReport evaluate_threshold_path(std::span<const double> dev_scores, std::span<const Label> dev_labels,
                                   std::span<const double> test_scores, std::span<const Label> test_labels,
                                   double fpr_target = 0.05);

// SVM path: decision values on test, predictions by sign.
EvalReport evaluate_svm_path(const SvmModel& model, std::span<const FeaturePoint> test_features,
                             std::span<const Label> test_labels, double fpr_target = 0.05);

nlohmann::json to_json(const EvalReport& report);

} // namespace tdt
