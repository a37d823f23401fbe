#include "spe/dataset.hpp"

#include <cmath>
#include <string>

#include "spe/error.hpp"

namespace spe {

ScoreDataset ScoreDataset::make(std::vector<double> scores,
                                std::vector<std::int8_t> labels) {
    if (scores.empty()) throw Error(ErrorKind::Validation, "dataset has no items");
    if (scores.size() != labels.size())
        throw Error(ErrorKind::Validation,
                    "scores/labels length mismatch: " + std::to_string(scores.size()) +
                        " vs " + std::to_string(labels.size()));
    ScoreDataset d;
    d.scores_ = std::move(scores);
    d.labels_ = std::move(labels);
    for (std::size_t i = 0; i < d.scores_.size(); ++i) {
        const double s = d.scores_[i];
        if (!std::isfinite(s) || s < 0.0)
            throw Error(ErrorKind::Validation,
                        "score at index " + std::to_string(i) +
                            " must be finite and >= 0, got " + std::to_string(s));
        const std::int8_t y = d.labels_[i];
        if (y != -1 && y != 0 && y != 1)
            throw Error(ErrorKind::Validation,
                        "label at index " + std::to_string(i) + " must be -1, 0 or 1");
        (y < 0 ? d.unlabeled_ : d.labeled_).push_back(static_cast<std::int32_t>(i));
    }
    return d;
}

ScoreDataset ScoreDataset::unlabeled(std::vector<double> scores) {
    const std::size_t n = scores.size();
    return make(std::move(scores), std::vector<std::int8_t>(n, std::int8_t{-1}));
}

std::size_t ScoreDataset::positive_label_count() const {
    std::size_t n = 0;
    for (std::int32_t i : labeled_) n += labels_[static_cast<std::size_t>(i)] == 1;
    return n;
}

}  // namespace spe
