#include "core/evalsuite.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ratl {
namespace {

using nlohmann::json;

std::vector<double> fractional_ranks(const std::vector<double>& values) {
    const std::size_t n = values.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

    std::vector<double> ranks(n);
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
        const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg_rank;
        i = j + 1;
    }
    return ranks;
}

struct FoldPredictions {
    // Binary task uses ints, fine task uses LabelSets; only one pair is used.
    std::vector<int> pred_cls, truth_cls;
    std::vector<LabelSet> pred_set, truth_set;
};

MetricsTriple mean_metrics(const std::vector<MetricsTriple>& per_fold) {
    MetricsTriple m;
    for (const auto& t : per_fold) {
        m.precision += t.precision;
        m.recall += t.recall;
        m.f1 += t.f1;
        m.degenerate = m.degenerate || t.degenerate;
    }
    const double n = static_cast<double>(per_fold.size());
    m.precision /= n;
    m.recall /= n;
    m.f1 /= n;
    return m;
}

json triple_to_json(const MetricsTriple& m) {
    return json{{"precision", m.precision},
                {"recall", m.recall},
                {"f1", m.f1},
                {"degenerate", m.degenerate}};
}

} // namespace

MetricsTriple metrics_from_counts(const ConfusionCounts& c) {
    MetricsTriple m;
    if (c.tp + c.fp > 0) {
        m.precision = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp);
    } else {
        m.degenerate = true;
    }
    if (c.tp + c.fn > 0) {
        m.recall = static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fn);
    } else {
        m.degenerate = true;
    }
    if (m.precision + m.recall > 0) {
        m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
    } else {
        m.degenerate = true;
    }
    return m;
}

std::pair<ConfusionCounts, MetricsTriple> metrics(const std::vector<int>& predictions,
                                                  const std::vector<int>& truth, int cls) {
    if (predictions.size() != truth.size()) {
        throw std::invalid_argument("metrics: predictions and truth differ in length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool p = predictions[i] == cls;
        const bool t = truth[i] == cls;
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
        else ++c.tn;
    }
    return {c, metrics_from_counts(c)};
}

std::pair<ConfusionCounts, MetricsTriple> metrics(const std::vector<LabelSet>& predictions,
                                                  const std::vector<LabelSet>& truth, Label l) {
    if (predictions.size() != truth.size()) {
        throw std::invalid_argument("metrics: predictions and truth differ in length");
    }
    ConfusionCounts c;
    for (std::size_t i = 0; i < predictions.size(); ++i) {
        const bool p = predictions[i].contains(l);
        const bool t = truth[i].contains(l);
        if (p && t) ++c.tp;
        else if (p && !t) ++c.fp;
        else if (!p && t) ++c.fn;
        else ++c.tn;
    }
    return {c, metrics_from_counts(c)};
}

std::vector<std::vector<std::size_t>> stratified_kfold(const std::vector<int>& strata, int k,
                                                       std::uint64_t seed) {
    if (k < 2) throw std::invalid_argument("stratified_kfold: k must be >= 2");
    if (static_cast<std::size_t>(k) > strata.size()) {
        throw std::invalid_argument("stratified_kfold: k exceeds dataset size " +
                                    std::to_string(strata.size()));
    }
    std::map<int, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < strata.size(); ++i) groups[strata[i]].push_back(i);

    Rng rng(seed);
    std::vector<std::vector<std::size_t>> folds(static_cast<std::size_t>(k));
    std::size_t next_fold = 0;
    for (auto& [stratum, indices] : groups) {
        rng.shuffle(indices);
        for (std::size_t idx : indices) {
            folds[next_fold].push_back(idx);
            next_fold = (next_fold + 1) % static_cast<std::size_t>(k);
        }
    }
    for (auto& fold : folds) std::sort(fold.begin(), fold.end());
    return folds;
}

std::vector<std::vector<std::size_t>> team_folds(const std::vector<std::string>& teams) {
    std::map<std::string, std::vector<std::size_t>> by_team;
    for (std::size_t i = 0; i < teams.size(); ++i) by_team[teams[i]].push_back(i);
    if (by_team.size() < 2) {
        throw DataError("team cross validation requires at least 2 teams, got " +
                        std::to_string(by_team.size()));
    }
    std::vector<std::vector<std::size_t>> folds;
    folds.reserve(by_team.size());
    for (auto& [team, indices] : by_team) folds.push_back(std::move(indices));
    return folds;
}

std::optional<double> spearman(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw std::invalid_argument("spearman: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("spearman: need at least 2 points");

    const std::vector<double> rx = fractional_ranks(x);
    const std::vector<double> ry = fractional_ranks(y);
    const double n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += rx[i];
        my += ry[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0, sxx = 0, syy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return std::nullopt; // constant sequence
    return sxy / std::sqrt(sxx * syy);
}

Vocabulary build_vocabulary_subset(const std::vector<std::string>& texts,
                                   const std::vector<std::size_t>& training_indices,
                                   const FeatureConfig& config) {
    std::vector<std::string> training;
    training.reserve(training_indices.size());
    for (std::size_t i : training_indices) training.push_back(texts[i]);
    return build_vocabulary(training, config);
}

const char* task_name(Task t) { return t == Task::binary ? "binary" : "fine"; }

const char* balance_name(BalanceStrategy s) {
    switch (s) {
    case BalanceStrategy::none: return "none";
    case BalanceStrategy::under: return "under";
    case BalanceStrategy::smote_under: return "smote-under";
    }
    return "?";
}

const char* scheme_name(CVConfig::Scheme s) {
    return s == CVConfig::Scheme::kfold ? "kfold" : "team";
}

EvaluationReport run_pipeline(const Corpus& corpus, const PipelineConfig& config) {
    if (!corpus.annotated()) throw std::invalid_argument("run_pipeline: corpus is not annotated");
    if (config.task == Task::fine && config.balance.strategy != BalanceStrategy::none) {
        throw std::invalid_argument("run_pipeline: balancing is defined for the binary task only");
    }

    // Instance table. The fine task sees only the rationale messages.
    std::vector<std::string> texts;
    std::vector<std::string> teams;
    std::vector<int> binary_truth;
    std::vector<LabelSet> fine_truth;
    for (const auto& m : corpus.messages()) {
        if (config.task == Task::fine && m.labels.empty()) continue;
        texts.push_back(m.message.text);
        teams.push_back(m.message.team);
        binary_truth.push_back(m.labels.empty() ? 0 : 1);
        fine_truth.push_back(m.labels);
    }
    if (texts.empty()) {
        throw DataError(config.task == Task::fine
                            ? "fine-grained evaluation requires rationale messages"
                            : "empty corpus");
    }

    // Strata: rationale presence for the binary task, label-powerset
    // meta-class for the fine task (unstratified when a meta-class is
    // smaller than k).
    std::vector<std::vector<std::size_t>> folds;
    if (config.cv.scheme == CVConfig::Scheme::team) {
        folds = team_folds(teams);
    } else {
        std::vector<int> strata(texts.size(), 0);
        if (config.cv.stratify) {
            if (config.task == Task::binary) {
                strata = binary_truth;
            } else {
                std::map<int, int> sizes;
                for (std::size_t i = 0; i < fine_truth.size(); ++i) {
                    strata[i] = fine_truth[i].bits();
                    ++sizes[strata[i]];
                }
                const bool too_small =
                    std::any_of(sizes.begin(), sizes.end(),
                                [&](const auto& kv) { return kv.second < config.cv.k; });
                if (too_small) std::fill(strata.begin(), strata.end(), 0);
            }
        }
        folds = stratified_kfold(strata, config.cv.k, mix_seed(config.seed, 0));
    }

    EvaluationReport report;
    report.config = config;
    report.instances = texts.size();
    report.folds = static_cast<int>(folds.size());

    const int class_count = config.task == Task::binary ? 2 : kLabelCount;
    std::vector<std::vector<ConfusionCounts>> fold_counts(class_count);
    std::vector<std::vector<MetricsTriple>> fold_metrics(class_count);

    for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<char> in_val(texts.size(), 0);
        for (std::size_t i : folds[f]) in_val[i] = 1;
        std::vector<std::size_t> train_idx;
        train_idx.reserve(texts.size() - folds[f].size());
        for (std::size_t i = 0; i < texts.size(); ++i) {
            if (!in_val[i]) train_idx.push_back(i);
        }
        if (train_idx.empty()) throw DataError("fold " + std::to_string(f) + " has no training data");

        const Vocabulary vocab = build_vocabulary_subset(texts, train_idx, config.features);

        ClassifierConfig clf = config.classifier;
        clf.seed = mix_seed(config.seed, 2 * f + 1);
        BalanceConfig bal = config.balance;
        bal.seed = mix_seed(config.seed, 2 * f + 2);

        FoldPredictions fp;
        if (config.task == Task::binary) {
            Dataset train_ds;
            train_ds.reserve(train_idx.size());
            for (std::size_t i : train_idx) {
                train_ds.emplace_back(vectorize(texts[i], vocab, config.features),
                                      binary_truth[i]);
            }
            train_ds = apply_balance(train_ds, bal, &report.warnings);
            const TrainedClassifier model =
                train(train_ds, clf, vocab, config.features, &report.warnings);
            for (std::size_t i : folds[f]) {
                fp.pred_cls.push_back(predict(model, vectorize(texts[i], vocab, config.features)));
                fp.truth_cls.push_back(binary_truth[i]);
            }
        } else {
            MlDataset train_ds;
            train_ds.reserve(train_idx.size());
            for (std::size_t i : train_idx) {
                train_ds.emplace_back(vectorize(texts[i], vocab, config.features), fine_truth[i]);
            }
            const MultilabelModel model = ml_train(train_ds, config.method, clf, vocab,
                                                   config.features, &report.warnings);
            for (std::size_t i : folds[f]) {
                LabelSet predicted = ml_predict(model, vectorize(texts[i], vocab, config.features));
                if (predicted.empty()) ++report.br_empty_predictions;
                fp.pred_set.push_back(predicted);
                fp.truth_set.push_back(fine_truth[i]);
            }
        }

        if (config.task == Task::binary) {
            // rationale (class 1) first, mirroring the report layout.
            const int classes[2] = {1, 0};
            for (int c = 0; c < 2; ++c) {
                auto [counts, triple] = metrics(fp.pred_cls, fp.truth_cls, classes[c]);
                fold_counts[c].push_back(counts);
                fold_metrics[c].push_back(triple);
            }
        } else {
            for (Label l : all_labels()) {
                auto [counts, triple] = metrics(fp.pred_set, fp.truth_set, l);
                fold_counts[static_cast<int>(l)].push_back(counts);
                fold_metrics[static_cast<int>(l)].push_back(triple);
            }
        }
    }

    for (int c = 0; c < class_count; ++c) {
        ClassReport cr;
        if (config.task == Task::binary) {
            cr.name = c == 0 ? "rationale" : "no_rationale";
        } else {
            cr.name = label_name(static_cast<Label>(c));
        }
        cr.fold_counts = std::move(fold_counts[c]);
        cr.fold_metrics = std::move(fold_metrics[c]);
        cr.mean = mean_metrics(cr.fold_metrics);
        report.classes.push_back(std::move(cr));
    }
    return report;
}

json EvaluationReport::to_json() const {
    json j{
        {"report", "evaluation"},
        {"task", task_name(config.task)},
        {"classifier", config.classifier.kind == ClassifierKind::nbm ? "nbm" : "svm"},
        {"balance", balance_name(config.balance.strategy)},
        {"cv",
         {{"scheme", scheme_name(config.cv.scheme)},
          {"k", config.cv.scheme == CVConfig::Scheme::kfold ? json(config.cv.k) : json(nullptr)},
          {"stratify", config.cv.stratify}}},
        {"seed", config.seed},
        {"instances", instances},
        {"folds", folds},
        {"config",
         {{"nb_alpha", config.classifier.nb_alpha},
          {"svm_lambda", config.classifier.svm_lambda},
          {"svm_epochs", config.classifier.svm_epochs},
          {"smote_k", config.balance.smote_k},
          {"smote_percent", config.balance.smote_percent},
          {"ngram_min", config.features.ngram_min},
          {"ngram_max", config.features.ngram_max},
          {"lowercase", config.features.lowercase},
          {"stopword_removal", config.features.stopword_removal}}},
        {"warnings", warnings},
    };
    if (config.task == Task::fine) {
        j["method"] = config.method == MlMethod::br ? "br" : "lp";
        if (config.method == MlMethod::br) j["br_empty_predictions"] = br_empty_predictions;
    }
    json classes_json = json::array();
    for (const auto& cr : classes) {
        json cj{{"name", cr.name},
                {"precision", cr.mean.precision},
                {"recall", cr.mean.recall},
                {"f1", cr.mean.f1},
                {"degenerate", cr.mean.degenerate}};
        json folds_json = json::array();
        for (std::size_t f = 0; f < cr.fold_counts.size(); ++f) {
            json fj = triple_to_json(cr.fold_metrics[f]);
            fj["tp"] = cr.fold_counts[f].tp;
            fj["fp"] = cr.fold_counts[f].fp;
            fj["fn"] = cr.fold_counts[f].fn;
            fj["tn"] = cr.fold_counts[f].tn;
            folds_json.push_back(std::move(fj));
        }
        cj["folds"] = std::move(folds_json);
        classes_json.push_back(std::move(cj));
    }
    j["classes"] = std::move(classes_json);
    return j;
}

} // namespace ratl
