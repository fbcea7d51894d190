#include "core/multilabel.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace ratl {
namespace {

using nlohmann::json;

} // namespace

const Vocabulary& MultilabelModel::vocab() const {
    return method_ == MlMethod::lp ? lp_model_->vocab() : submodels_[0].vocab();
}

const FeatureConfig& MultilabelModel::features() const {
    return method_ == MlMethod::lp ? lp_model_->features() : submodels_[0].features();
}

MultilabelModel ml_train(const MlDataset& dataset, MlMethod method,
                         const ClassifierConfig& config, const Vocabulary& vocab,
                         const FeatureConfig& features, std::vector<std::string>* warnings) {
    if (dataset.empty()) throw std::invalid_argument("ml_train: empty dataset");
    for (const auto& [x, labels] : dataset) {
        if (labels.empty()) {
            throw std::invalid_argument("ml_train: every training message must carry a label");
        }
    }

    MultilabelModel model;
    model.method_ = method;

    if (method == MlMethod::br) {
        for (Label l : all_labels()) {
            const int li = static_cast<int>(l);
            Dataset binary;
            binary.reserve(dataset.size());
            std::size_t positives = 0;
            for (const auto& [x, labels] : dataset) {
                const int y = labels.contains(l) ? 1 : 0;
                positives += static_cast<std::size_t>(y);
                binary.emplace_back(x, y);
            }
            ClassifierConfig sub_config = config;
            sub_config.seed = config.seed + static_cast<std::uint64_t>(li);
            if (positives == 0) {
                model.always_negative_[li] = true;
                if (warnings) {
                    warnings->push_back("label \"" + label_name(l) +
                                        "\" has no positive training examples; "
                                        "sub-model is always-negative");
                }
            } else if (positives == dataset.size() && warnings) {
                warnings->push_back("label \"" + label_name(l) +
                                    "\" is present on every training example; "
                                    "sub-model is always-positive");
            }
            model.submodels_[li] = train(binary, sub_config, vocab, features, nullptr);
        }
        return model;
    }

    // Label powerset: meta-class ids are ranks in bitmask order.
    std::set<std::uint8_t> observed;
    for (const auto& [x, labels] : dataset) observed.insert(labels.bits());
    model.codebook_.reserve(observed.size());
    for (std::uint8_t bits : observed) model.codebook_.push_back(LabelSet::from_bits(bits));

    Dataset meta;
    meta.reserve(dataset.size());
    for (const auto& [x, labels] : dataset) {
        const auto it = std::lower_bound(
            model.codebook_.begin(), model.codebook_.end(), labels,
            [](const LabelSet& a, const LabelSet& b) { return a.bits() < b.bits(); });
        meta.emplace_back(x, static_cast<int>(it - model.codebook_.begin()));
    }
    model.lp_model_ = train(meta, config, vocab, features, warnings);
    return model;
}

LabelSet ml_predict(const MultilabelModel& model, const SparseCountVector& x) {
    if (model.method() == MlMethod::br) {
        LabelSet out;
        for (Label l : all_labels()) {
            if (predict(model.submodels()[static_cast<int>(l)], x) == 1) out.add(l);
        }
        return out;
    }
    const int meta = predict(model.lp_classifier(), x);
    return model.codebook()[static_cast<std::size_t>(meta)];
}

json ml_to_json(const MultilabelModel& model) {
    json j{{"method", model.method() == MlMethod::br ? "br" : "lp"}};
    if (model.method() == MlMethod::br) {
        json subs = json::array();
        json flags = json::array();
        for (Label l : all_labels()) {
            subs.push_back(classifier_to_json(model.submodels()[static_cast<int>(l)]));
            flags.push_back(model.always_negative(l));
        }
        j["submodels"] = std::move(subs);
        j["always_negative"] = std::move(flags);
    } else {
        j["classifier"] = classifier_to_json(model.lp_classifier());
        json codebook = json::array();
        for (const LabelSet& s : model.codebook()) codebook.push_back(s.names());
        j["codebook"] = std::move(codebook);
    }
    return j;
}

MultilabelModel ml_from_json(const json& j) {
    try {
        MultilabelModel model;
        const std::string method = j.at("method").get<std::string>();
        if (method == "br") {
            model.method_ = MlMethod::br;
            const json& subs = j.at("submodels");
            if (subs.size() != kLabelCount) {
                throw DataError("corrupt model file: expected 5 sub-models");
            }
            for (int i = 0; i < kLabelCount; ++i) {
                model.submodels_[i] = classifier_from_json(subs[i]);
                model.always_negative_[i] = j.at("always_negative")[i].get<bool>();
            }
        } else if (method == "lp") {
            model.method_ = MlMethod::lp;
            model.lp_model_ = classifier_from_json(j.at("classifier"));
            for (const auto& names : j.at("codebook")) {
                LabelSet s;
                for (const auto& name : names) {
                    auto l = label_from_string(name.get<std::string>());
                    if (!l) throw DataError("corrupt model file: unknown label in codebook");
                    s.add(*l);
                }
                model.codebook_.push_back(s);
            }
        } else {
            throw DataError("corrupt model file: unknown multilabel method \"" + method + "\"");
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("corrupt model file: ") + e.what());
    }
}

void save_ml_model(const MultilabelModel& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write " + path);
    json j = ml_to_json(model);
    j["format_version"] = 1;
    out << j.dump(2) << '\n';
}

MultilabelModel load_ml_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw DataError("corrupt model file: invalid JSON");
    if (!j.contains("format_version") || j["format_version"].get<int>() != 1) {
        throw UnsupportedError("unsupported model file version");
    }
    return ml_from_json(j);
}

} // namespace ratl
