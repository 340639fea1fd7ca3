#include <algorithm>
#include <cmath>
#include <numeric>

#include "tdt/error.hpp"
#include "tdt/evalkit.hpp"

namespace tdt {

namespace {

void check_inputs(std::span<const double> scores, std::span<const Label> labels, const char* who) {
    if (scores.size() != labels.size()) throw DataError(std::string(who) + ": scores and labels differ in length");
    const auto pos = std::ranges::count(labels, Label::Machine);
    if (pos == 0 || pos == static_cast<std::ptrdiff_t>(labels.size())) {
        throw DataError(std::string(who) + ": both classes must be present");
    }
    for (double s : scores) {
        if (std::isnan(s)) throw DataError(std::string(who) + ": NaN score");
    }
}

std::vector<std::size_t> order_by_score(std::span<const double> scores) {
    std::vector<std::size_t> idx(scores.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::ranges::stable_sort(idx, [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
    return idx;
}

} // namespace

double auroc(std::span<const double> scores, std::span<const Label> labels) {
    check_inputs(scores, labels, "auroc");
    const auto idx = order_by_score(scores);
    // Counted in half-units so the result is exact for any tie pattern.
    double half_wins = 0.0;
    double neg_below = 0.0;
    double n_pos = 0.0, n_neg = 0.0;
    for (std::size_t g = 0; g < idx.size();) {
        std::size_t e = g;
        double pos = 0.0, neg = 0.0;
        while (e < idx.size() && scores[idx[e]] == scores[idx[g]]) {
            (labels[idx[e]] == Label::Machine ? pos : neg) += 1.0;
            ++e;
        }
        half_wins += 2.0 * pos * neg_below + pos * neg;
        neg_below += neg;
        n_pos += pos;
        n_neg += neg;
        g = e;
    }
    return half_wins / (2.0 * n_pos * n_neg);
}

double tpr_at_fpr(std::span<const double> scores, std::span<const Label> labels, double fpr_target) {
    check_inputs(scores, labels, "tpr_at_fpr");
    if (!(fpr_target > 0.0 && fpr_target < 1.0)) throw UsageError("tpr_at_fpr: target must lie in (0, 1)");
    auto idx = order_by_score(scores);
    std::reverse(idx.begin(), idx.end());
    const double n_pos = static_cast<double>(std::ranges::count(labels, Label::Machine));
    const double n_neg = static_cast<double>(labels.size()) - n_pos;

    double tp = 0.0, fp = 0.0, best = 0.0;
    for (std::size_t g = 0; g < idx.size();) {
        std::size_t e = g;
        while (e < idx.size() && scores[idx[e]] == scores[idx[g]]) {
            (labels[idx[e]] == Label::Machine ? tp : fp) += 1.0;
            ++e;
        }
        if (fp / n_neg > fpr_target) break;
        best = std::max(best, tp / n_pos);
        g = e;
    }
    return best;
}

double f1_score(std::span<const Label> predictions, std::span<const Label> labels) {
    if (predictions.size() != labels.size()) throw DataError("f1: predictions and labels differ in length");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const bool p = predictions[i] == Label::Machine;
        const bool t = labels[i] == Label::Machine;
        tp += p && t;
        fp += p && !t;
        fn += !p && t;
    }
    if (tp == 0) return 0.0;
    const double precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    const double recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return 2.0 * precision * recall / (precision + recall);
}

EvalReport evaluate(std::span<const double> scores, std::span<const Label> labels,
                    std::span<const Label> predictions, double fpr_target) {
    EvalReport r;
    r.auroc = auroc(scores, labels);
    r.tpr_at_fpr = tpr_at_fpr(scores, labels, fpr_target);
    r.f1 = f1_score(predictions, labels);
    r.fpr_target = fpr_target;
    r.n_pos = static_cast<std::size_t>(std::ranges::count(labels, Label::Machine));
    r.n_neg = labels.size() - r.n_pos;
    return r;
}

EvalReport evaluate_threshold_path(std::span<const double> dev_scores, std::span<const Label> dev_labels,
                                   std::span<const double> test_scores, std::span<const Label> test_labels,
                                   double fpr_target) {
    const ThresholdModel thr = fit_threshold(dev_scores, dev_labels);
    const double sign = thr.direction == ThresholdDirection::GreaterIsMachine ? 1.0 : -1.0;
    std::vector<double> oriented(test_scores.size());
    std::vector<Label> pred(test_scores.size());
    for (std::size_t i = 0; i < test_scores.size(); ++i) {
        oriented[i] = sign * test_scores[i];
        pred[i] = thr.is_machine(test_scores[i]) ? Label::Machine : Label::Human;
    }
    return evaluate(oriented, test_labels, pred, fpr_target);
}

EvalReport evaluate_svm_path(const SvmModel& model, std::span<const FeaturePoint> test_features,
                             std::span<const Label> test_labels, double fpr_target) {
    std::vector<double> scores(test_features.size());
    std::vector<Label> pred(test_features.size());
    for (std::size_t i = 0; i < test_features.size(); ++i) {
        scores[i] = decision_function(model, test_features[i]);
        pred[i] = scores[i] > 0.0 ? Label::Machine : Label::Human;
    }
    return evaluate(scores, test_labels, pred, fpr_target);
}

nlohmann::json to_json(const EvalReport& r) {
    return {{"auroc", r.auroc}, {"f1", r.f1},       {"tpr_at_fpr", r.tpr_at_fpr},
            {"fpr_target", r.fpr_target}, {"n_pos", r.n_pos}, {"n_neg", r.n_neg}};
}

} // namespace tdt
