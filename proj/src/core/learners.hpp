#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <json.hpp>

#include "core/textfeat.hpp"

namespace ratl {

enum class ClassifierKind { nbm, svm };

struct ClassifierConfig {
    ClassifierKind kind = ClassifierKind::nbm;
    double nb_alpha = 1.0;    // Laplace smoothing
    double svm_lambda = 1e-4; // L2 regularization
    int svm_epochs = 20;
    std::uint64_t seed = 0;
};

using Dataset = std::vector<std::pair<SparseCountVector, int>>;

struct NbmParams {
    std::vector<double> log_prior;                  // per class
    std::vector<std::vector<double>> log_likelihood; // per class, dense over vocab
};

struct SvmParams {
    std::vector<std::vector<double>> weights; // per class (one-vs-rest), dense over vocab
    std::vector<double> bias;                 // per class
};

class TrainedClassifier {
public:
    TrainedClassifier() = default;
    TrainedClassifier(ClassifierKind kind, ClassifierConfig config, std::vector<int> classes,
                      Vocabulary vocab, FeatureConfig features,
                      std::variant<NbmParams, SvmParams> params)
        : kind_(kind), config_(std::move(config)), classes_(std::move(classes)),
          vocab_(std::move(vocab)), features_(features), params_(std::move(params)) {}

    ClassifierKind kind() const { return kind_; }
    const ClassifierConfig& config() const { return config_; }
    const std::vector<int>& classes() const { return classes_; }
    const Vocabulary& vocab() const { return vocab_; }
    const FeatureConfig& features() const { return features_; }

    const NbmParams& nbm() const { return std::get<NbmParams>(params_); }
    const SvmParams& svm() const { return std::get<SvmParams>(params_); }

private:
    ClassifierKind kind_ = ClassifierKind::nbm;
    ClassifierConfig config_;
    std::vector<int> classes_; // ascending; ties in predict resolve to the earliest
    Vocabulary vocab_;
    FeatureConfig features_;
    std::variant<NbmParams, SvmParams> params_;
};

// Fits NBM (priors n_c/N, Laplace-smoothed term likelihoods) or a linear SVM
// (one-vs-rest, stochastic subgradient descent on the hinge loss with step
// size 1/(lambda*t); the stored weights are the averaged iterate). Identical
// seed/config/data give bit-identical models.
TrainedClassifier train(const Dataset& dataset, const ClassifierConfig& config,
                        const Vocabulary& vocab, const FeatureConfig& features,
                        std::vector<std::string>* warnings = nullptr);

// Highest-scoring class; ties go to the earliest class in class order.
int predict(const TrainedClassifier& model, const SparseCountVector& x);

// Per-class scores in class order (log-posterior up to a constant for NBM,
// w.x + b for SVM).
std::vector<double> decision_values(const TrainedClassifier& model, const SparseCountVector& x);

// Softmax-normalized class posteriors; NBM only.
std::map<int, double> posterior(const TrainedClassifier& model, const SparseCountVector& x);

// Full-batch one-vs-rest hinge objective:
// lambda/2*(|w|^2+b^2) + mean_i max(0, 1 - y_i*(w.x_i + b)), y_i = +-1 against
// positive_class. Used by the training tests and the acceptance suite.
double svm_objective(const std::vector<double>& weights, double bias, double lambda,
                     const Dataset& dataset, int positive_class);

nlohmann::json classifier_to_json(const TrainedClassifier& model);
TrainedClassifier classifier_from_json(const nlohmann::json& j);

// Self-describing JSON document {format_version, kind, config, classes,
// vocabulary, parameters}; round-trips bit-exactly.
void save_model(const TrainedClassifier& model, const std::string& path);
TrainedClassifier load_model(const std::string& path);

} // namespace ratl
