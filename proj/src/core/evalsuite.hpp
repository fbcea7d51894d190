#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "core/balance.hpp"
#include "core/corpus.hpp"
#include "core/learners.hpp"
#include "core/multilabel.hpp"

namespace ratl {

struct ConfusionCounts {
    std::int64_t tp = 0, fp = 0, fn = 0, tn = 0;
};

struct MetricsTriple {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
    bool degenerate = false; // some component was 0/0 and was reported as 0.0
};

// precision = tp/(tp+fp), recall = tp/(tp+fn), f1 = harmonic mean; 0/0 counts
// as 0.0 with the degenerate flag set.
MetricsTriple metrics_from_counts(const ConfusionCounts& c);

std::pair<ConfusionCounts, MetricsTriple> metrics(const std::vector<int>& predictions,
                                                  const std::vector<int>& truth, int cls);
std::pair<ConfusionCounts, MetricsTriple> metrics(const std::vector<LabelSet>& predictions,
                                                  const std::vector<LabelSet>& truth, Label l);

struct CVConfig {
    enum class Scheme { kfold, team };
    Scheme scheme = Scheme::kfold;
    int k = 10;
    bool stratify = true;
    std::uint64_t seed = 0;
};

// Instances are shuffled per stratum, then dealt round-robin to folds with a
// counter that continues across strata, so per-stratum fold counts differ by
// at most one and so do total fold sizes.
std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& strata, int k,
                                                       std::uint64_t seed);

// One fold per distinct team, in team-name order.
std::vector<std::vector<std::size_t>> team_folds(const std::vector<std::string>& teams);

// Spearman rank correlation: Pearson over fractional ranks (ties get average
// ranks). nullopt when either sequence is constant.
std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y);

enum class Task { binary, fine };

struct PipelineConfig {
    Task task = Task::binary;
    ClassifierConfig classifier;
    MlMethod method = MlMethod::br; // fine task only
    BalanceConfig balance;          // binary task only
    CVConfig cv;
    FeatureConfig features;
    std::uint64_t seed = 0; // base seed; per-fold seeds are derived from it
};

struct ClassReport {
    std::string name;
    MetricsTriple mean; // arithmetic mean of per-fold metrics
    std::vector<ConfusionCounts> fold_counts;
    std::vector<MetricsTriple> fold_metrics;
};

struct EvaluationReport {
    PipelineConfig config;
    std::size_t instances = 0;
    int folds = 0;
    std::vector<ClassReport> classes;
    std::size_t br_empty_predictions = 0; // fine/br only: rationale messages left unlabeled
    std::vector<std::string> warnings;

    nlohmann::json to_json() const;
};

// Per fold: vocabulary from the training partition only, vectorize, balance
// the training set (binary task), train, predict the held-out fold; metrics
// are averaged over folds. Identical seeds give identical reports.
EvaluationReport run_pipeline(const Corpus& corpus, const PipelineConfig& config);

// The vocabulary step of run_pipeline, exposed so tests can check that
// held-out text never reaches it.
Vocabulary build_vocabulary_subset(const std::vector<std::string>& texts,
                                   const std::vector<std::size_t>& training_indices,
                                   const FeatureConfig& config);

const char* task_name(Task t);
const char* balance_name(BalanceStrategy s);
const char* scheme_name(CVConfig::Scheme s);

} // namespace ratl
