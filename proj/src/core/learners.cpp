#include "core/learners.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ratl {
namespace {

using nlohmann::json;

std::vector<int> distinct_classes(const Dataset& dataset) {
    std::set<int> seen;
    for (const auto& [x, y] : dataset) seen.insert(y);
    return {seen.begin(), seen.end()};
}

NbmParams train_nbm(const Dataset& dataset, const std::vector<int>& classes, double alpha,
                    std::size_t vocab_size) {
    const std::size_t c_count = classes.size();
    std::vector<double> class_n(c_count, 0.0);
    std::vector<std::vector<double>> term_counts(c_count, std::vector<double>(vocab_size, 0.0));

    for (const auto& [x, y] : dataset) {
        const std::size_t c = static_cast<std::size_t>(
            std::lower_bound(classes.begin(), classes.end(), y) - classes.begin());
        class_n[c] += 1.0;
        for (const auto& [idx, count] : x.entries) term_counts[c][idx] += count;
    }

    NbmParams params;
    params.log_prior.resize(c_count);
    params.log_likelihood.resize(c_count);
    const double n_total = static_cast<double>(dataset.size());
    for (std::size_t c = 0; c < c_count; ++c) {
        params.log_prior[c] = std::log(class_n[c] / n_total);
        double total = 0;
        for (double t : term_counts[c]) total += t;
        const double denom = std::log(total + alpha * static_cast<double>(vocab_size));
        auto& row = params.log_likelihood[c];
        row.resize(vocab_size);
        for (std::size_t t = 0; t < vocab_size; ++t) {
            row[t] = std::log(term_counts[c][t] + alpha) - denom;
        }
    }
    return params;
}

// Pegasos-style binary subgradient descent on the augmented problem (the bias
// is a constant-1 feature, so it is regularized with the weights). The weight
// vector is kept as scale*values and the running sum of iterates as
// avg_offset + avg_scale*values, which keeps every step O(nnz).
struct BinarySvm {
    std::vector<double> weights; // averaged iterate, vocab_size entries
    double bias = 0.0;
};

BinarySvm train_binary_svm(const Dataset& dataset, const std::vector<char>& positive,
                           double lambda, int epochs, std::uint64_t seed) {
    const std::size_t dim = [&] {
        std::uint32_t max_idx = 0;
        for (const auto& [x, y] : dataset) max_idx = std::max(max_idx, x.max_index());
        return static_cast<std::size_t>(max_idx) + 2; // +1 for size, +1 for bias slot
    }();

    std::vector<double> values(dim, 0.0);
    std::vector<double> avg_offset(dim, 0.0);
    double scale = 0.0; // w = scale * values; w is zero at the start
    double avg_scale = 0.0;
    const std::size_t bias_slot = dim - 1;

    Rng rng(seed);
    const std::size_t n = dataset.size();
    const std::size_t steps = static_cast<std::size_t>(epochs) * n;
    for (std::size_t t = 1; t <= steps; ++t) {
        const std::size_t i = rng.index(n);
        const auto& x = dataset[i].first;
        const double y = positive[i] ? 1.0 : -1.0;

        const double margin = y * scale * (dot(x, values) + values[bias_slot]);
        const double eta = 1.0 / (lambda * static_cast<double>(t));

        scale *= 1.0 - eta * lambda;
        if (scale == 0.0) {
            // Only at t=1, where the iterate is still zero; the scaled
            // representation needs a nonzero scale before the first add.
            scale = 1.0;
        }
        if (margin < 1.0) {
            const double step = eta * y / scale;
            for (const auto& [idx, count] : x.entries) {
                values[idx] += step * count;
                avg_offset[idx] -= avg_scale * step * count;
            }
            values[bias_slot] += step;
            avg_offset[bias_slot] -= avg_scale * step;
        }
        avg_scale += scale;
    }

    BinarySvm out;
    out.weights.assign(dim - 1, 0.0);
    const double inv_steps = 1.0 / static_cast<double>(steps);
    for (std::size_t k = 0; k + 1 < dim; ++k) {
        out.weights[k] = (avg_offset[k] + avg_scale * values[k]) * inv_steps;
    }
    out.bias = (avg_offset[bias_slot] + avg_scale * values[bias_slot]) * inv_steps;
    return out;
}

SvmParams train_svm(const Dataset& dataset, const std::vector<int>& classes,
                    const ClassifierConfig& config, std::size_t vocab_size) {
    SvmParams params;
    params.weights.resize(classes.size());
    params.bias.resize(classes.size());
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (classes.size() == 1) {
            params.weights[c].assign(vocab_size, 0.0);
            params.bias[c] = 0.0;
            continue;
        }
        std::vector<char> positive(dataset.size());
        for (std::size_t i = 0; i < dataset.size(); ++i) {
            positive[i] = dataset[i].second == classes[c];
        }
        // Per-class derived seed keeps one-vs-rest runs independent of order.
        BinarySvm model = train_binary_svm(dataset, positive, config.svm_lambda,
                                           config.svm_epochs, mix_seed(config.seed, c));
        model.weights.resize(vocab_size, 0.0);
        params.weights[c] = std::move(model.weights);
        params.bias[c] = model.bias;
    }
    return params;
}

void check_indices(const TrainedClassifier& model, const SparseCountVector& x) {
    if (!x.entries.empty() && x.max_index() >= model.vocab().size()) {
        throw std::invalid_argument("feature index " + std::to_string(x.max_index()) +
                                    " out of range for vocabulary of size " +
                                    std::to_string(model.vocab().size()));
    }
}

json config_to_json(const ClassifierConfig& c, const FeatureConfig& f) {
    return json{
        {"nb_alpha", c.nb_alpha},       {"svm_lambda", c.svm_lambda},
        {"svm_epochs", c.svm_epochs},   {"seed", c.seed},
        {"ngram_min", f.ngram_min},     {"ngram_max", f.ngram_max},
        {"lowercase", f.lowercase},     {"stopword_removal", f.stopword_removal},
    };
}

} // namespace

TrainedClassifier train(const Dataset& dataset, const ClassifierConfig& config,
                        const Vocabulary& vocab, const FeatureConfig& features,
                        std::vector<std::string>* warnings) {
    if (dataset.empty()) throw std::invalid_argument("train: empty dataset");
    for (const auto& [x, y] : dataset) {
        if (!x.entries.empty() && x.max_index() >= vocab.size()) {
            throw std::invalid_argument("train: feature index out of vocabulary range");
        }
    }
    std::vector<int> classes = distinct_classes(dataset);
    if (classes.size() == 1 && warnings) {
        warnings->push_back("training data contains a single class (" +
                            std::to_string(classes[0]) + "); model will always predict it");
    }

    if (config.kind == ClassifierKind::nbm) {
        return TrainedClassifier(ClassifierKind::nbm, config, classes, vocab, features,
                                 train_nbm(dataset, classes, config.nb_alpha, vocab.size()));
    }
    return TrainedClassifier(ClassifierKind::svm, config, classes, vocab, features,
                             train_svm(dataset, classes, config, vocab.size()));
}

std::vector<double> decision_values(const TrainedClassifier& model, const SparseCountVector& x) {
    check_indices(model, x);
    std::vector<double> scores(model.classes().size());
    if (model.kind() == ClassifierKind::nbm) {
        const auto& p = model.nbm();
        for (std::size_t c = 0; c < scores.size(); ++c) {
            scores[c] = p.log_prior[c] + dot(x, p.log_likelihood[c]);
        }
    } else {
        const auto& p = model.svm();
        for (std::size_t c = 0; c < scores.size(); ++c) {
            scores[c] = dot(x, p.weights[c]) + p.bias[c];
        }
    }
    return scores;
}

int predict(const TrainedClassifier& model, const SparseCountVector& x) {
    const std::vector<double> scores = decision_values(model, x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < scores.size(); ++c) {
        if (scores[c] > scores[best]) best = c;
    }
    return model.classes()[best];
}

std::map<int, double> posterior(const TrainedClassifier& model, const SparseCountVector& x) {
    if (model.kind() != ClassifierKind::nbm) {
        throw UnsupportedError("posterior is only defined for nbm models");
    }
    const std::vector<double> scores = decision_values(model, x);
    const double max_score = *std::max_element(scores.begin(), scores.end());
    double denom = 0;
    std::vector<double> exps(scores.size());
    for (std::size_t c = 0; c < scores.size(); ++c) {
        exps[c] = std::exp(scores[c] - max_score);
        denom += exps[c];
    }
    std::map<int, double> out;
    for (std::size_t c = 0; c < scores.size(); ++c) {
        out[model.classes()[c]] = exps[c] / denom;
    }
    return out;
}

double svm_objective(const std::vector<double>& weights, double bias, double lambda,
                     const Dataset& dataset, int positive_class) {
    double norm2 = bias * bias;
    for (double w : weights) norm2 += w * w;
    double hinge = 0;
    for (const auto& [x, y] : dataset) {
        const double label = y == positive_class ? 1.0 : -1.0;
        hinge += std::max(0.0, 1.0 - label * (dot(x, weights) + bias));
    }
    return 0.5 * lambda * norm2 + hinge / static_cast<double>(dataset.size());
}

json classifier_to_json(const TrainedClassifier& model) {
    json j{
        {"kind", model.kind() == ClassifierKind::nbm ? "nbm" : "svm"},
        {"config", config_to_json(model.config(), model.features())},
        {"classes", model.classes()},
        {"vocabulary", model.vocab().terms()},
    };
    if (model.kind() == ClassifierKind::nbm) {
        j["parameters"] = json{{"log_prior", model.nbm().log_prior},
                               {"log_likelihood", model.nbm().log_likelihood}};
    } else {
        j["parameters"] = json{{"weights", model.svm().weights}, {"bias", model.svm().bias}};
    }
    return j;
}

TrainedClassifier classifier_from_json(const json& j) {
    try {
        const std::string kind_name = j.at("kind").get<std::string>();
        const json& cfg = j.at("config");
        ClassifierConfig config;
        config.kind = kind_name == "nbm" ? ClassifierKind::nbm : ClassifierKind::svm;
        config.nb_alpha = cfg.at("nb_alpha").get<double>();
        config.svm_lambda = cfg.at("svm_lambda").get<double>();
        config.svm_epochs = cfg.at("svm_epochs").get<int>();
        config.seed = cfg.at("seed").get<std::uint64_t>();
        FeatureConfig features;
        features.ngram_min = cfg.at("ngram_min").get<int>();
        features.ngram_max = cfg.at("ngram_max").get<int>();
        features.lowercase = cfg.at("lowercase").get<bool>();
        features.stopword_removal = cfg.at("stopword_removal").get<bool>();

        auto classes = j.at("classes").get<std::vector<int>>();
        Vocabulary vocab(j.at("vocabulary").get<std::vector<std::string>>());

        std::variant<NbmParams, SvmParams> params;
        const json& p = j.at("parameters");
        if (config.kind == ClassifierKind::nbm) {
            NbmParams nbm;
            nbm.log_prior = p.at("log_prior").get<std::vector<double>>();
            nbm.log_likelihood = p.at("log_likelihood").get<std::vector<std::vector<double>>>();
            if (nbm.log_prior.size() != classes.size() ||
                nbm.log_likelihood.size() != classes.size()) {
                throw DataError("corrupt model file: parameter shape mismatch");
            }
            params = std::move(nbm);
        } else {
            SvmParams svm;
            svm.weights = p.at("weights").get<std::vector<std::vector<double>>>();
            svm.bias = p.at("bias").get<std::vector<double>>();
            if (svm.weights.size() != classes.size() || svm.bias.size() != classes.size()) {
                throw DataError("corrupt model file: parameter shape mismatch");
            }
            params = std::move(svm);
        }
        return TrainedClassifier(config.kind, config, std::move(classes), std::move(vocab),
                                 features, std::move(params));
    } catch (const json::exception& e) {
        throw DataError(std::string("corrupt model file: ") + e.what());
    }
}

void save_model(const TrainedClassifier& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    json j = classifier_to_json(model);
    j["format_version"] = 1;
    out << j.dump(2) << '\n';
}

TrainedClassifier load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("corrupt model file: invalid JSON");
    if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
        throw DataError("corrupt model file: missing format_version");
    }
    if (j["format_version"].get<int>() != 1) {
        throw UnsupportedError("unsupported model file version " +
                               std::to_string(j["format_version"].get<int>()));
    }
    return classifier_from_json(j);
}

} // namespace ratl
