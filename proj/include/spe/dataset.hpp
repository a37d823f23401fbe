#pragma once

#include <cstdint>
#include <vector>

namespace spe {

// Scores with a partial labeling. labels[i] is 0/1 for oracle-labeled items
// and -1 for unknown; the labeled/unlabeled index partition is derived once
// at construction and kept consistent by value semantics.
class ScoreDataset {
  public:
    // Validates: equal lengths, nonempty, scores finite and >= 0,
    // labels in {-1, 0, 1}.
    static ScoreDataset make(std::vector<double> scores, std::vector<std::int8_t> labels);

    // All items unlabeled.
    static ScoreDataset unlabeled(std::vector<double> scores);

    const std::vector<double>& scores() const { return scores_; }
    const std::vector<std::int8_t>& labels() const { return labels_; }
    const std::vector<std::int32_t>& labeled() const { return labeled_; }
    const std::vector<std::int32_t>& unlabeled_indices() const { return unlabeled_; }

    std::size_t size() const { return scores_.size(); }
    bool fully_labeled() const { return unlabeled_.empty(); }
    std::size_t positive_label_count() const;

  private:
    std::vector<double> scores_;
    std::vector<std::int8_t> labels_;
    std::vector<std::int32_t> labeled_;
    std::vector<std::int32_t> unlabeled_;
};

}  // namespace spe
