#pragma once

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "core/labels.hpp"
#include "core/learners.hpp"

namespace ratl {

enum class MlMethod { br, lp };

using MlDataset = std::vector<std::pair<SparseCountVector, LabelSet>>;

// Binary relevance holds one present/absent classifier per label; label
// powerset holds one multiclass classifier whose classes index a codebook of
// the label combinations observed in training (sorted by bitmask).
class MultilabelModel {
public:
    MlMethod method() const { return method_; }
    const Vocabulary& vocab() const;
    const FeatureConfig& features() const;

    const std::array<TrainedClassifier, kLabelCount>& submodels() const { return submodels_; }
    bool always_negative(Label l) const { return always_negative_[static_cast<int>(l)]; }
    const TrainedClassifier& lp_classifier() const { return *lp_model_; }
    const std::vector<LabelSet>& codebook() const { return codebook_; }

    friend MultilabelModel ml_train(const MlDataset&, MlMethod, const ClassifierConfig&,
                                    const Vocabulary&, const FeatureConfig&,
                                    std::vector<std::string>*);
    friend MultilabelModel ml_from_json(const nlohmann::json& j);

private:
    MlMethod method_ = MlMethod::br;
    std::array<TrainedClassifier, kLabelCount> submodels_;
    std::array<bool, kLabelCount> always_negative_{};
    std::optional<TrainedClassifier> lp_model_;
    std::vector<LabelSet> codebook_;
};

// Trains the wrapper. BR sub-models get seed+label-index so they match a
// standalone binary classifier trained the same way; LP meta-classes are the
// distinct observed label subsets. Every training LabelSet must be non-empty.
MultilabelModel ml_train(const MlDataset& dataset, MlMethod method,
                         const ClassifierConfig& config, const Vocabulary& vocab,
                         const FeatureConfig& features,
                         std::vector<std::string>* warnings = nullptr);

// BR: union of labels whose sub-model fires (possibly empty).
// LP: decoded subset of the winning meta-class (never empty).
LabelSet ml_predict(const MultilabelModel& model, const SparseCountVector& x);

nlohmann::json ml_to_json(const MultilabelModel& model);
MultilabelModel ml_from_json(const nlohmann::json& j);
void save_ml_model(const MultilabelModel& model, const std::string& path);
MultilabelModel load_ml_model(const std::string& path);

} // namespace ratl
