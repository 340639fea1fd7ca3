#include <algorithm>
#include <cmath>
#include <vector>

#include "tdt/classifier.hpp"
#include "tdt/error.hpp"

namespace tdt {

std::string to_string(ThresholdDirection direction) {
    return direction == ThresholdDirection::GreaterIsMachine ? "greater-is-machine" : "less-is-machine";
}

namespace {

double f1_at(std::span<const double> scores, std::span<const Label> labels, const ThresholdModel& m) {
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        const bool pred = m.is_machine(scores[i]);
        const bool truth = labels[i] == Label::Machine;
        tp += pred && truth;
        fp += pred && !truth;
        fn += !pred && truth;
    }
    const double denom = static_cast<double>(2 * tp + fp + fn);
    return denom > 0.0 ? 2.0 * static_cast<double>(tp) / denom : 0.0;
}

} // namespace

ThresholdModel fit_threshold(std::span<const double> scores, std::span<const Label> labels) {
    if (scores.size() != labels.size()) throw DataError("fit_threshold: scores and labels differ in length");
    if (std::ranges::count(labels, Label::Machine) == 0 || std::ranges::count(labels, Label::Human) == 0) {
        throw DataError("fit_threshold: labels contain a single class");
    }
    for (double s : scores) {
        if (!std::isfinite(s)) throw DataError("fit_threshold: non-finite score");
    }

    std::vector<double> unique(scores.begin(), scores.end());
    std::ranges::sort(unique);
    unique.erase(std::unique(unique.begin(), unique.end()), unique.end());

    std::vector<double> candidates;
    candidates.push_back(unique.front() - 1.0);
    for (std::size_t i = 0; i + 1 < unique.size(); ++i) {
        candidates.push_back(unique[i] + 0.5 * (unique[i + 1] - unique[i]));
    }
    candidates.push_back(unique.back() + 1.0);

    ThresholdModel best;
    best.f1 = -1.0;
    // Candidates ascend, and a strict improvement is required, so ties keep
    // the greater-is-machine direction and then the lower threshold.
    for (ThresholdDirection dir : {ThresholdDirection::GreaterIsMachine, ThresholdDirection::LessIsMachine}) {
        for (double t : candidates) {
            ThresholdModel m{t, dir, 0.0};
            m.f1 = f1_at(scores, labels, m);
            if (m.f1 > best.f1) best = m;
        }
    }
    return best;
}

} // namespace tdt
