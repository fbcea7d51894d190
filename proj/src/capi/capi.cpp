#include "ratl/ratl.h"

#include <cstring>
#include <exception>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <string>

#include <json.hpp>

#include "core/analytics.hpp"
#include "core/corpus.hpp"
#include "core/digest.hpp"
#include "core/errors.hpp"
#include "core/evalsuite.hpp"
#include "core/learners.hpp"
#include "core/multilabel.hpp"
#include "core/report_render.hpp"
#include "core/rng.hpp"
#include "core/version.hpp"

using nlohmann::json;

struct ratl_corpus {
    ratl::Corpus corpus;
};

struct ratl_model {
    int task = RATL_TASK_BINARY;
    std::optional<ratl::TrainedClassifier> binary;
    std::optional<ratl::MultilabelModel> fine;
};

namespace {

thread_local std::string g_last_error;

char* alloc_string(const std::string& s) {
    char* out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

ratl_status set_error(ratl_status code, const std::string& message) {
    g_last_error = message;
    return code;
}

// Runs fn, translating exceptions to status codes.
template <typename Fn>
ratl_status guarded(Fn&& fn) {
    try {
        fn();
        return RATL_OK;
    } catch (const ratl::IoError& e) {
        return set_error(RATL_ERR_IO, e.what());
    } catch (const ratl::DataError& e) {
        return set_error(RATL_ERR_DATA, e.what());
    } catch (const ratl::UnsupportedError& e) {
        return set_error(RATL_ERR_UNSUPPORTED, e.what());
    } catch (const std::invalid_argument& e) {
        return set_error(RATL_ERR_INVALID_ARGUMENT, e.what());
    } catch (const std::exception& e) {
        return set_error(RATL_ERR_INTERNAL, e.what());
    }
}

void require(bool condition, const char* message) {
    if (!condition) throw std::invalid_argument(message);
}

ratl::FeatureConfig feature_config(const ratl_train_options& o) {
    ratl::FeatureConfig f;
    f.ngram_min = o.ngram_min;
    f.ngram_max = o.ngram_max;
    f.lowercase = o.lowercase != 0;
    f.stopword_removal = o.stopword_removal != 0;
    if (f.ngram_min < 1 || f.ngram_min > f.ngram_max) {
        throw std::invalid_argument("require 1 <= ngram_min <= ngram_max");
    }
    return f;
}

ratl::ClassifierConfig classifier_config(const ratl_train_options& o) {
    require(o.classifier == RATL_CLASSIFIER_NBM || o.classifier == RATL_CLASSIFIER_SVM,
            "unknown classifier");
    require(o.nb_alpha > 0, "nb_alpha must be positive");
    require(o.svm_lambda > 0, "svm_lambda must be positive");
    require(o.svm_epochs >= 1, "svm_epochs must be >= 1");
    ratl::ClassifierConfig c;
    c.kind = o.classifier == RATL_CLASSIFIER_NBM ? ratl::ClassifierKind::nbm
                                                 : ratl::ClassifierKind::svm;
    c.nb_alpha = o.nb_alpha;
    c.svm_lambda = o.svm_lambda;
    c.svm_epochs = o.svm_epochs;
    c.seed = o.seed;
    return c;
}

ratl::BalanceConfig balance_config(const ratl_train_options& o) {
    require(o.balance >= RATL_BALANCE_NONE && o.balance <= RATL_BALANCE_SMOTE_UNDER,
            "unknown balance strategy");
    ratl::BalanceConfig b;
    b.strategy = static_cast<ratl::BalanceStrategy>(o.balance);
    b.smote_k = o.smote_k;
    b.smote_percent = o.smote_percent;
    b.seed = o.seed;
    return b;
}

json predict_one(const ratl_model& model, const ratl::AnnotatedMessage& m) {
    json rec{{"message_id", m.message.id}};
    if (model.task == RATL_TASK_BINARY) {
        const auto& clf = *model.binary;
        const auto x = ratl::vectorize(m.message.text, clf.vocab(), clf.features());
        rec["rationale"] = ratl::predict(clf, x) == 1;
    } else {
        const auto& ml = *model.fine;
        const auto x = ratl::vectorize(m.message.text, ml.vocab(), ml.features());
        rec["labels"] = ratl::ml_predict(ml, x).names();
    }
    return rec;
}

} // namespace

extern "C" {

const char* ratl_version(void) { return RATL_VERSION; }

const char* ratl_last_error(void) { return g_last_error.c_str(); }

void ratl_string_free(char* s) { delete[] s; }

ratl_status ratl_corpus_load(const char* path, const char* format, ratl_corpus** out) {
    return guarded([&] {
        require(path && format && out, "path, format and out must be non-NULL");
        ratl::CorpusFormat fmt;
        if (std::strcmp(format, "jsonl") == 0) {
            fmt = ratl::CorpusFormat::jsonl;
        } else if (std::strcmp(format, "csv") == 0) {
            fmt = ratl::CorpusFormat::csv;
        } else {
            throw std::invalid_argument("format must be \"jsonl\" or \"csv\"");
        }
        *out = new ratl_corpus{ratl::load_messages(path, fmt)};
    });
}

ratl_status ratl_corpus_filter_bots(const ratl_corpus* in, ratl_corpus** out) {
    return guarded([&] {
        require(in && out, "corpus and out must be non-NULL");
        *out = new ratl_corpus{ratl::filter_bots(in->corpus)};
    });
}

ratl_status ratl_corpus_join_annotations(const ratl_corpus* in, const char* annotations_path,
                                         ratl_corpus** out) {
    return guarded([&] {
        require(in && annotations_path && out, "corpus, path and out must be non-NULL");
        auto annotations = ratl::load_annotations(annotations_path);
        *out = new ratl_corpus{ratl::join_annotations(in->corpus, annotations)};
    });
}

ratl_status ratl_corpus_write_jsonl(const ratl_corpus* corpus, const char* path) {
    return guarded([&] {
        require(corpus && path, "corpus and path must be non-NULL");
        ratl::write_messages_jsonl(corpus->corpus, std::string(path));
    });
}

size_t ratl_corpus_message_count(const ratl_corpus* corpus) {
    return corpus ? corpus->corpus.size() : 0;
}

size_t ratl_corpus_team_count(const ratl_corpus* corpus) {
    return corpus ? corpus->corpus.teams().size() : 0;
}

size_t ratl_corpus_rationale_count(const ratl_corpus* corpus) {
    return corpus ? corpus->corpus.count_rationale() : 0;
}

void ratl_corpus_free(ratl_corpus* corpus) { delete corpus; }

ratl_status ratl_frequency_report(const ratl_corpus* corpus, const char* granularity,
                                  char** json_out) {
    return guarded([&] {
        require(corpus && granularity && json_out, "corpus, granularity and out must be non-NULL");
        ratl::BinGranularity g;
        if (std::strcmp(granularity, "day") == 0) {
            g = ratl::BinGranularity::day;
        } else if (std::strcmp(granularity, "week") == 0) {
            g = ratl::BinGranularity::week;
        } else {
            throw std::invalid_argument("granularity must be \"day\" or \"week\"");
        }
        *json_out = alloc_string(ratl::frequency_report(corpus->corpus, g).to_json().dump(2));
    });
}

ratl_status ratl_completeness_report(const ratl_corpus* corpus, const char* links_path,
                                     char** json_out) {
    return guarded([&] {
        require(corpus && links_path && json_out, "corpus, path and out must be non-NULL");
        auto links = ratl::load_links(links_path, corpus->corpus);
        *json_out =
            alloc_string(ratl::completeness_report(corpus->corpus, links).to_json().dump(2));
    });
}

ratl_status ratl_report_render_text(const char* report_json, char** text_out) {
    return guarded([&] {
        require(report_json && text_out, "report_json and out must be non-NULL");
        json j = json::parse(report_json, nullptr, false);
        if (j.is_discarded()) throw ratl::DataError("report is not valid JSON");
        *text_out = alloc_string(ratl::render_report_text(j));
    });
}

void ratl_train_options_init(ratl_train_options* options) {
    if (!options) return;
    options->task = RATL_TASK_BINARY;
    options->classifier = RATL_CLASSIFIER_NBM;
    options->ml_method = RATL_ML_BR;
    options->balance = RATL_BALANCE_NONE;
    options->nb_alpha = 1.0;
    options->svm_lambda = 1e-4;
    options->svm_epochs = 20;
    options->smote_k = 5;
    options->smote_percent = 100;
    options->ngram_min = 1;
    options->ngram_max = 3;
    options->lowercase = 1;
    options->stopword_removal = 0;
    options->seed = 0;
}

void ratl_cv_options_init(ratl_cv_options* options) {
    if (!options) return;
    options->scheme = RATL_CV_KFOLD;
    options->k = 10;
    options->stratify = 1;
}

ratl_status ratl_train(const ratl_corpus* corpus, const ratl_train_options* options,
                       ratl_model** out) {
    return guarded([&] {
        require(corpus && options && out, "corpus, options and out must be non-NULL");
        require(options->task == RATL_TASK_BINARY || options->task == RATL_TASK_FINE,
                "unknown task");
        const ratl::Corpus& c = corpus->corpus;
        if (!c.annotated()) throw ratl::DataError("training requires an annotated corpus");

        const ratl::FeatureConfig features = feature_config(*options);
        ratl::ClassifierConfig clf = classifier_config(*options);
        clf.seed = ratl::mix_seed(options->seed, 1);

        auto model = std::make_unique<ratl_model>();
        model->task = options->task;

        if (options->task == RATL_TASK_BINARY) {
            std::vector<std::string> texts;
            for (const auto& m : c.messages()) texts.push_back(m.message.text);
            const ratl::Vocabulary vocab = ratl::build_vocabulary(texts, features);
            ratl::Dataset dataset;
            dataset.reserve(c.size());
            for (const auto& m : c.messages()) {
                dataset.emplace_back(ratl::vectorize(m.message.text, vocab, features),
                                     m.labels.empty() ? 0 : 1);
            }
            ratl::BalanceConfig bal = balance_config(*options);
            bal.seed = ratl::mix_seed(options->seed, 2);
            dataset = ratl::apply_balance(dataset, bal);
            model->binary = ratl::train(dataset, clf, vocab, features);
        } else {
            require(options->ml_method == RATL_ML_BR || options->ml_method == RATL_ML_LP,
                    "unknown multilabel method");
            require(options->balance == RATL_BALANCE_NONE,
                    "balancing is defined for the binary task only");
            std::vector<std::string> texts;
            for (const auto& m : c.messages()) {
                if (!m.labels.empty()) texts.push_back(m.message.text);
            }
            if (texts.empty()) throw ratl::DataError("no rationale messages to train on");
            const ratl::Vocabulary vocab = ratl::build_vocabulary(texts, features);
            ratl::MlDataset dataset;
            for (const auto& m : c.messages()) {
                if (m.labels.empty()) continue;
                dataset.emplace_back(ratl::vectorize(m.message.text, vocab, features), m.labels);
            }
            model->fine = ratl::ml_train(
                dataset, options->ml_method == RATL_ML_BR ? ratl::MlMethod::br : ratl::MlMethod::lp,
                clf, vocab, features);
        }
        *out = model.release();
    });
}

ratl_status ratl_evaluate(const ratl_corpus* corpus, const ratl_train_options* options,
                          const ratl_cv_options* cv, char** json_out) {
    return guarded([&] {
        require(corpus && options && cv && json_out,
                "corpus, options, cv and out must be non-NULL");
        require(options->task == RATL_TASK_BINARY || options->task == RATL_TASK_FINE,
                "unknown task");
        require(cv->scheme == RATL_CV_KFOLD || cv->scheme == RATL_CV_TEAM, "unknown cv scheme");

        ratl::PipelineConfig config;
        config.task = options->task == RATL_TASK_BINARY ? ratl::Task::binary : ratl::Task::fine;
        config.classifier = classifier_config(*options);
        config.method = options->ml_method == RATL_ML_LP ? ratl::MlMethod::lp : ratl::MlMethod::br;
        config.balance = balance_config(*options);
        config.features = feature_config(*options);
        config.cv.scheme = cv->scheme == RATL_CV_KFOLD ? ratl::CVConfig::Scheme::kfold
                                                       : ratl::CVConfig::Scheme::team;
        config.cv.k = cv->k;
        config.cv.stratify = cv->stratify != 0;
        config.seed = options->seed;

        *json_out = alloc_string(ratl::run_pipeline(corpus->corpus, config).to_json().dump(2));
    });
}

ratl_status ratl_model_save(const ratl_model* model, const char* path) {
    return guarded([&] {
        require(model && path, "model and path must be non-NULL");
        json j;
        if (model->task == RATL_TASK_BINARY) {
            j = ratl::classifier_to_json(*model->binary);
            j["task"] = "binary";
        } else {
            j = ratl::ml_to_json(*model->fine);
            j["task"] = "fine";
        }
        j["format_version"] = 1;
        std::ofstream out(path, std::ios::binary);
        if (!out) throw ratl::IoError(std::string("cannot write ") + path);
        out << j.dump(2) << '\n';
    });
}

ratl_status ratl_model_load(const char* path, ratl_model** out) {
    return guarded([&] {
        require(path && out, "path and out must be non-NULL");
        std::ifstream in(path, std::ios::binary);
        if (!in) throw ratl::IoError(std::string("cannot open ") + path);
        json j = json::parse(in, nullptr, false);
        if (j.is_discarded() || !j.is_object()) {
            throw ratl::DataError("corrupt model file: invalid JSON");
        }
        if (!j.contains("format_version") || !j["format_version"].is_number_integer()) {
            throw ratl::DataError("corrupt model file: missing format_version");
        }
        if (j["format_version"].get<int>() != 1) {
            throw ratl::UnsupportedError("unsupported model file version");
        }
        auto model = std::make_unique<ratl_model>();
        // Plain classifier files (no "task") load as binary-task models.
        const std::string task = j.value("task", std::string("binary"));
        if (task == "binary") {
            model->task = RATL_TASK_BINARY;
            model->binary = ratl::classifier_from_json(j);
        } else if (task == "fine") {
            model->task = RATL_TASK_FINE;
            model->fine = ratl::ml_from_json(j);
        } else {
            throw ratl::DataError("corrupt model file: unknown task \"" + task + "\"");
        }
        *out = model.release();
    });
}

int ratl_model_task(const ratl_model* model) {
    return model ? model->task : -1;
}

void ratl_model_free(ratl_model* model) { delete model; }

ratl_status ratl_predict_text(const ratl_model* model, const char* text, char** json_out) {
    return guarded([&] {
        require(model && text && json_out, "model, text and out must be non-NULL");
        json rec;
        if (model->task == RATL_TASK_BINARY) {
            const auto& clf = *model->binary;
            const auto x = ratl::vectorize(text, clf.vocab(), clf.features());
            rec["rationale"] = ratl::predict(clf, x) == 1;
        } else {
            const auto& ml = *model->fine;
            const auto x = ratl::vectorize(text, ml.vocab(), ml.features());
            rec["labels"] = ratl::ml_predict(ml, x).names();
        }
        *json_out = alloc_string(rec.dump());
    });
}

ratl_status ratl_predict_corpus(const ratl_model* model, const ratl_corpus* corpus,
                                char** jsonl_out) {
    return guarded([&] {
        require(model && corpus && jsonl_out, "model, corpus and out must be non-NULL");
        std::ostringstream out;
        for (const auto& m : corpus->corpus.messages()) {
            out << predict_one(*model, m).dump() << '\n';
        }
        *jsonl_out = alloc_string(out.str());
    });
}

ratl_status ratl_predict_chain(const ratl_model* binary_model, const ratl_model* fine_model,
                               const ratl_corpus* corpus, char** jsonl_out) {
    return guarded([&] {
        require(binary_model && fine_model && corpus && jsonl_out,
                "models, corpus and out must be non-NULL");
        require(binary_model->task == RATL_TASK_BINARY, "first model must be a binary model");
        require(fine_model->task == RATL_TASK_FINE, "second model must be a fine-grained model");
        const auto& clf = *binary_model->binary;
        const auto& ml = *fine_model->fine;
        std::ostringstream out;
        for (const auto& m : corpus->corpus.messages()) {
            const bool rationale =
                ratl::predict(clf, ratl::vectorize(m.message.text, clf.vocab(), clf.features())) ==
                1;
            json rec{{"message_id", m.message.id}, {"rationale", rationale}};
            if (rationale) {
                rec["labels"] =
                    ratl::ml_predict(ml, ratl::vectorize(m.message.text, ml.vocab(), ml.features()))
                        .names();
            } else {
                rec["labels"] = json::array();
            }
            out << rec.dump() << '\n';
        }
        *jsonl_out = alloc_string(out.str());
    });
}

ratl_status ratl_file_digest(const char* path, char** hex_out) {
    return guarded([&] {
        require(path && hex_out, "path and out must be non-NULL");
        *hex_out = alloc_string(ratl::digest_file(path));
    });
}

} // extern "C"
