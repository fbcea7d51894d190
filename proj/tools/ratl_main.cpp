// ratl command line: ingest / stats / completeness / train / evaluate /
// predict over chat-log exports. Built entirely on the public C API.
//
// Exit codes: 0 success, 1 usage error, 2 data/processing error.

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ratl/ratl.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitData = 2;

struct CorpusDeleter {
    void operator()(ratl_corpus* c) const { ratl_corpus_free(c); }
};
struct ModelDeleter {
    void operator()(ratl_model* m) const { ratl_model_free(m); }
};
using CorpusPtr = std::unique_ptr<ratl_corpus, CorpusDeleter>;
using ModelPtr = std::unique_ptr<ratl_model, ModelDeleter>;

// Owned C string from an out-parameter.
class ApiString {
public:
    char** slot() { return &str_; }
    const char* get() const { return str_ ? str_ : ""; }
    ~ApiString() { ratl_string_free(str_); }

private:
    char* str_ = nullptr;
};

[[noreturn]] void fail(ratl_status status) {
    std::cerr << "error: " << ratl_last_error() << "\n";
    std::exit(status == RATL_ERR_INVALID_ARGUMENT ? kExitUsage : kExitData);
}

void check(ratl_status status) {
    if (status != RATL_OK) fail(status);
}

CorpusPtr load_corpus(const std::string& path, const std::string& format, bool keep_bots,
                      const std::string& annotations_path) {
    ratl_corpus* raw = nullptr;
    check(ratl_corpus_load(path.c_str(), format.c_str(), &raw));
    CorpusPtr corpus(raw);
    if (!keep_bots) {
        ratl_corpus* filtered = nullptr;
        check(ratl_corpus_filter_bots(corpus.get(), &filtered));
        corpus.reset(filtered);
    }
    if (!annotations_path.empty()) {
        ratl_corpus* annotated = nullptr;
        check(ratl_corpus_join_annotations(corpus.get(), annotations_path.c_str(), &annotated));
        corpus.reset(annotated);
    }
    return corpus;
}

void write_output(const std::string& content, const std::string& output_path) {
    if (output_path.empty() || output_path == "-") {
        std::cout << content;
        if (!content.empty() && content.back() != '\n') std::cout << '\n';
        return;
    }
    std::ofstream out(output_path, std::ios::binary);
    if (!out) {
        std::cerr << "error: cannot write " << output_path << "\n";
        std::exit(kExitData);
    }
    out << content;
    if (!content.empty() && content.back() != '\n') out << '\n';
}

// Every run emits a manifest: the subcommand, every resolved option, the seed
// and input digests. Identical manifests mean byte-identical outputs.
class Manifest {
public:
    Manifest(std::string command) {
        doc_["command"] = std::move(command);
        doc_["version"] = ratl_version();
        doc_["inputs"] = json::object();
        doc_["config"] = json::object();
    }

    void input(const std::string& path) {
        if (path.empty()) return;
        ApiString digest;
        check(ratl_file_digest(path.c_str(), digest.slot()));
        doc_["inputs"][path] = digest.get();
    }

    template <typename T>
    void option(const std::string& name, const T& value) {
        doc_["config"][name] = value;
    }

    void seed(std::uint64_t s) { doc_["seed"] = s; }

    // Default sink: "<output>.manifest.json" next to the output file, or
    // stderr when the output goes to stdout.
    void emit(const std::string& explicit_path, const std::string& output_path) const {
        const std::string text = doc_.dump(2) + "\n";
        std::string path = explicit_path;
        if (path.empty() && !output_path.empty() && output_path != "-") {
            path = output_path + ".manifest.json";
        }
        if (path.empty()) {
            std::cerr << "manifest: " << doc_.dump() << "\n";
            return;
        }
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            std::cerr << "error: cannot write " << path << "\n";
            std::exit(kExitData);
        }
        out << text;
    }

private:
    json doc_;
};

struct CommonOptions {
    std::string input;
    std::string format = "jsonl";
    std::string annotations;
    std::string output;
    std::string manifest_path;
};

void add_input_options(CLI::App* cmd, CommonOptions& opt, bool with_annotations) {
    cmd->add_option("--input", opt.input, "message file (JSONL or CSV export)")->required();
    cmd->add_option("--format", opt.format, "input format: jsonl|csv")
        ->check(CLI::IsMember({"jsonl", "csv"}));
    if (with_annotations) {
        cmd->add_option("--annotations", opt.annotations,
                        "annotation JSONL: {\"message_id\", \"labels\"}");
    }
    cmd->add_option("--output", opt.output, "output file (default: stdout)");
    cmd->add_option("--manifest", opt.manifest_path,
                    "manifest file (default: <output>.manifest.json)");
}

struct TrainFlags {
    std::string task = "binary";
    std::string classifier = "nbm";
    std::string method = "br";
    std::string balance = "none";
    double nb_alpha = 1.0;
    double svm_lambda = 1e-4;
    int svm_epochs = 20;
    int smote_k = 5;
    int smote_percent = 100;
    int ngram_min = 1;
    int ngram_max = 3;
    bool no_lowercase = false;
    bool remove_stopwords = false;
    std::uint64_t seed = 0;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f, bool with_task) {
    if (with_task) {
        cmd->add_option("--task", f.task, "binary|fine")->check(CLI::IsMember({"binary", "fine"}));
    }
    cmd->add_option("--classifier", f.classifier, "nbm|svm")
        ->check(CLI::IsMember({"nbm", "svm"}));
    cmd->add_option("--method", f.method, "multilabel method for --task fine: br|lp")
        ->check(CLI::IsMember({"br", "lp"}));
    cmd->add_option("--balance", f.balance, "none|under|smote-under (binary task)")
        ->check(CLI::IsMember({"none", "under", "smote-under"}));
    cmd->add_option("--nb-alpha", f.nb_alpha, "NBM Laplace smoothing");
    cmd->add_option("--svm-lambda", f.svm_lambda, "SVM L2 regularization");
    cmd->add_option("--svm-epochs", f.svm_epochs, "SVM training epochs");
    cmd->add_option("--smote-k", f.smote_k, "SMOTE neighbor count");
    cmd->add_option("--smote-percent", f.smote_percent, "SMOTE oversampling percent");
    cmd->add_option("--ngram-min", f.ngram_min, "shortest n-gram");
    cmd->add_option("--ngram-max", f.ngram_max, "longest n-gram");
    cmd->add_flag("--no-lowercase", f.no_lowercase, "keep original casing");
    cmd->add_flag("--remove-stopwords", f.remove_stopwords, "drop common English stopwords");
    cmd->add_option("--seed", f.seed, "seed for every random choice in the run");
}

ratl_train_options to_options(const TrainFlags& f) {
    ratl_train_options o;
    ratl_train_options_init(&o);
    o.task = f.task == "fine" ? RATL_TASK_FINE : RATL_TASK_BINARY;
    o.classifier = f.classifier == "svm" ? RATL_CLASSIFIER_SVM : RATL_CLASSIFIER_NBM;
    o.ml_method = f.method == "lp" ? RATL_ML_LP : RATL_ML_BR;
    o.balance = f.balance == "under"
                    ? RATL_BALANCE_UNDER
                    : (f.balance == "smote-under" ? RATL_BALANCE_SMOTE_UNDER : RATL_BALANCE_NONE);
    o.nb_alpha = f.nb_alpha;
    o.svm_lambda = f.svm_lambda;
    o.svm_epochs = f.svm_epochs;
    o.smote_k = f.smote_k;
    o.smote_percent = f.smote_percent;
    o.ngram_min = f.ngram_min;
    o.ngram_max = f.ngram_max;
    o.lowercase = f.no_lowercase ? 0 : 1;
    o.stopword_removal = f.remove_stopwords ? 1 : 0;
    o.seed = f.seed;
    return o;
}

void manifest_train_flags(Manifest& m, const TrainFlags& f, bool with_task) {
    if (with_task) m.option("task", f.task);
    m.option("classifier", f.classifier);
    m.option("method", f.method);
    m.option("balance", f.balance);
    m.option("nb_alpha", f.nb_alpha);
    m.option("svm_lambda", f.svm_lambda);
    m.option("svm_epochs", f.svm_epochs);
    m.option("smote_k", f.smote_k);
    m.option("smote_percent", f.smote_percent);
    m.option("ngram_min", f.ngram_min);
    m.option("ngram_max", f.ngram_max);
    m.option("lowercase", !f.no_lowercase);
    m.option("stopword_removal", f.remove_stopwords);
    m.seed(f.seed);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rationale analytics and classification for development chat logs"};
    app.require_subcommand(1);

    // --- ingest ---
    CommonOptions ingest_opt;
    bool keep_bots = false;
    auto* ingest = app.add_subcommand(
        "ingest", "load, validate and bot-filter a chat export; emit canonical JSONL");
    add_input_options(ingest, ingest_opt, /*with_annotations=*/false);
    ingest->add_flag("--keep-bots", keep_bots, "keep bot messages instead of filtering them");

    // --- stats ---
    CommonOptions stats_opt;
    std::string bin_granularity = "week";
    std::string stats_report_format = "json";
    auto* stats = app.add_subcommand("stats", "rationale frequency report");
    add_input_options(stats, stats_opt, /*with_annotations=*/true);
    stats->add_option("--bin", bin_granularity, "time bin granularity: day|week")
        ->check(CLI::IsMember({"day", "week"}));
    stats->add_option("--report", stats_report_format, "report format: json|table")
        ->check(CLI::IsMember({"json", "table"}));

    // --- completeness ---
    CommonOptions comp_opt;
    std::string links_path;
    std::string comp_report_format = "json";
    auto* completeness =
        app.add_subcommand("completeness", "rationale completeness over element links");
    add_input_options(completeness, comp_opt, /*with_annotations=*/true);
    completeness->add_option("--links", links_path, "links JSONL file")->required();
    completeness->add_option("--report", comp_report_format, "report format: json|table")
        ->check(CLI::IsMember({"json", "table"}));

    // --- train ---
    CommonOptions train_opt;
    TrainFlags train_flags;
    auto* train = app.add_subcommand("train", "fit a classifier and save the model");
    add_input_options(train, train_opt, /*with_annotations=*/true);
    add_train_flags(train, train_flags, /*with_task=*/true);
    train->get_option("--output")->required();

    // --- evaluate ---
    CommonOptions eval_opt;
    TrainFlags eval_flags;
    std::string cv_spec = "kfold:10";
    std::string stratify = "on";
    std::string eval_report_format = "json";
    auto* evaluate = app.add_subcommand("evaluate", "cross-validated evaluation report");
    add_input_options(evaluate, eval_opt, /*with_annotations=*/true);
    add_train_flags(evaluate, eval_flags, /*with_task=*/true);
    evaluate->add_option("--cv", cv_spec, "validation scheme: kfold[:k]|team");
    evaluate->add_option("--stratify", stratify, "stratified k-fold: on|off")
        ->check(CLI::IsMember({"on", "off"}));
    evaluate->add_option("--report", eval_report_format, "report format: json|table")
        ->check(CLI::IsMember({"json", "table"}));

    // --- predict ---
    CommonOptions pred_opt;
    std::string model_path, fine_model_path;
    std::string predict_task = "binary";
    auto* predict = app.add_subcommand("predict", "apply a saved model to new messages");
    add_input_options(predict, pred_opt, /*with_annotations=*/false);
    predict->add_option("--model", model_path, "model file")->required();
    predict->add_option("--fine-model", fine_model_path, "fine model for --task chain");
    predict->add_option("--task", predict_task, "binary|fine|chain")
        ->check(CLI::IsMember({"binary", "fine", "chain"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitUsage;
    }

    if (ingest->parsed()) {
        Manifest manifest("ingest");
        manifest.input(ingest_opt.input);
        manifest.option("input", ingest_opt.input);
        manifest.option("format", ingest_opt.format);
        manifest.option("keep_bots", keep_bots);
        manifest.seed(0);

        CorpusPtr corpus = load_corpus(ingest_opt.input, ingest_opt.format, keep_bots, "");
        if (ingest_opt.output.empty() || ingest_opt.output == "-") {
            // write through a temporary buffer so stdout stays line-oriented
            const std::string tmp = ingest_opt.input + ".ingest.tmp";
            check(ratl_corpus_write_jsonl(corpus.get(), tmp.c_str()));
            std::ifstream in(tmp, std::ios::binary);
            std::cout << in.rdbuf();
            std::remove(tmp.c_str());
        } else {
            check(ratl_corpus_write_jsonl(corpus.get(), ingest_opt.output.c_str()));
        }
        std::cerr << "ingested " << ratl_corpus_message_count(corpus.get()) << " messages from "
                  << ratl_corpus_team_count(corpus.get()) << " team(s)\n";
        manifest.emit(ingest_opt.manifest_path, ingest_opt.output);
        return kExitOk;
    }

    if (stats->parsed()) {
        if (stats_opt.annotations.empty()) {
            std::cerr << "error: stats requires --annotations\n";
            return kExitUsage;
        }
        Manifest manifest("stats");
        manifest.input(stats_opt.input);
        manifest.input(stats_opt.annotations);
        manifest.option("input", stats_opt.input);
        manifest.option("format", stats_opt.format);
        manifest.option("annotations", stats_opt.annotations);
        manifest.option("bin", bin_granularity);
        manifest.option("report", stats_report_format);
        manifest.seed(0);

        CorpusPtr corpus =
            load_corpus(stats_opt.input, stats_opt.format, false, stats_opt.annotations);
        ApiString report;
        check(ratl_frequency_report(corpus.get(), bin_granularity.c_str(), report.slot()));
        if (stats_report_format == "table") {
            ApiString table;
            check(ratl_report_render_text(report.get(), table.slot()));
            write_output(table.get(), stats_opt.output);
        } else {
            write_output(report.get(), stats_opt.output);
        }
        manifest.emit(stats_opt.manifest_path, stats_opt.output);
        return kExitOk;
    }

    if (completeness->parsed()) {
        if (comp_opt.annotations.empty()) {
            std::cerr << "error: completeness requires --annotations\n";
            return kExitUsage;
        }
        Manifest manifest("completeness");
        manifest.input(comp_opt.input);
        manifest.input(comp_opt.annotations);
        manifest.input(links_path);
        manifest.option("input", comp_opt.input);
        manifest.option("format", comp_opt.format);
        manifest.option("annotations", comp_opt.annotations);
        manifest.option("links", links_path);
        manifest.option("report", comp_report_format);
        manifest.seed(0);

        CorpusPtr corpus =
            load_corpus(comp_opt.input, comp_opt.format, false, comp_opt.annotations);
        ApiString report;
        check(ratl_completeness_report(corpus.get(), links_path.c_str(), report.slot()));
        if (comp_report_format == "table") {
            ApiString table;
            check(ratl_report_render_text(report.get(), table.slot()));
            write_output(table.get(), comp_opt.output);
        } else {
            write_output(report.get(), comp_opt.output);
        }
        manifest.emit(comp_opt.manifest_path, comp_opt.output);
        return kExitOk;
    }

    if (train->parsed()) {
        if (train_opt.annotations.empty()) {
            std::cerr << "error: train requires --annotations\n";
            return kExitUsage;
        }
        Manifest manifest("train");
        manifest.input(train_opt.input);
        manifest.input(train_opt.annotations);
        manifest.option("input", train_opt.input);
        manifest.option("format", train_opt.format);
        manifest.option("annotations", train_opt.annotations);
        manifest.option("output", train_opt.output);
        manifest_train_flags(manifest, train_flags, true);

        CorpusPtr corpus =
            load_corpus(train_opt.input, train_opt.format, false, train_opt.annotations);
        const ratl_train_options options = to_options(train_flags);
        ratl_model* raw = nullptr;
        check(ratl_train(corpus.get(), &options, &raw));
        ModelPtr model(raw);
        check(ratl_model_save(model.get(), train_opt.output.c_str()));
        std::cerr << "model written to " << train_opt.output << "\n";
        manifest.emit(train_opt.manifest_path, train_opt.output);
        return kExitOk;
    }

    if (evaluate->parsed()) {
        if (eval_opt.annotations.empty()) {
            std::cerr << "error: evaluate requires --annotations\n";
            return kExitUsage;
        }
        ratl_cv_options cv;
        ratl_cv_options_init(&cv);
        if (cv_spec == "team") {
            cv.scheme = RATL_CV_TEAM;
        } else if (cv_spec == "kfold" || cv_spec.rfind("kfold:", 0) == 0) {
            cv.scheme = RATL_CV_KFOLD;
            if (cv_spec.size() > 6 && cv_spec[5] == ':') {
                try {
                    cv.k = std::stoi(cv_spec.substr(6));
                } catch (...) {
                    std::cerr << "error: bad --cv value \"" << cv_spec << "\"\n";
                    return kExitUsage;
                }
            }
        } else {
            std::cerr << "error: bad --cv value \"" << cv_spec << "\" (kfold[:k]|team)\n";
            return kExitUsage;
        }
        cv.stratify = stratify == "on" ? 1 : 0;

        Manifest manifest("evaluate");
        manifest.input(eval_opt.input);
        manifest.input(eval_opt.annotations);
        manifest.option("input", eval_opt.input);
        manifest.option("format", eval_opt.format);
        manifest.option("annotations", eval_opt.annotations);
        manifest.option("cv", cv_spec);
        manifest.option("stratify", stratify == "on");
        manifest.option("report", eval_report_format);
        manifest_train_flags(manifest, eval_flags, true);

        CorpusPtr corpus =
            load_corpus(eval_opt.input, eval_opt.format, false, eval_opt.annotations);
        const ratl_train_options options = to_options(eval_flags);
        ApiString report;
        check(ratl_evaluate(corpus.get(), &options, &cv, report.slot()));
        if (eval_report_format == "table") {
            ApiString table;
            check(ratl_report_render_text(report.get(), table.slot()));
            write_output(table.get(), eval_opt.output);
        } else {
            write_output(report.get(), eval_opt.output);
        }
        manifest.emit(eval_opt.manifest_path, eval_opt.output);
        return kExitOk;
    }

    if (predict->parsed()) {
        if (predict_task == "chain" && fine_model_path.empty()) {
            std::cerr << "error: --task chain requires --fine-model\n";
            return kExitUsage;
        }
        Manifest manifest("predict");
        manifest.input(pred_opt.input);
        manifest.input(model_path);
        manifest.input(fine_model_path);
        manifest.option("input", pred_opt.input);
        manifest.option("format", pred_opt.format);
        manifest.option("model", model_path);
        manifest.option("fine_model", fine_model_path);
        manifest.option("task", predict_task);
        manifest.seed(0);

        CorpusPtr corpus = load_corpus(pred_opt.input, pred_opt.format, true, "");
        ratl_model* raw = nullptr;
        check(ratl_model_load(model_path.c_str(), &raw));
        ModelPtr model(raw);

        const int want_task = predict_task == "fine" ? RATL_TASK_FINE : RATL_TASK_BINARY;
        if (predict_task != "chain" && ratl_model_task(model.get()) != want_task) {
            std::cerr << "error: model in " << model_path << " is a "
                      << (ratl_model_task(model.get()) == RATL_TASK_FINE ? "fine" : "binary")
                      << " model, but --task " << predict_task << " was requested\n";
            return kExitData;
        }

        ApiString predictions;
        if (predict_task == "chain") {
            ratl_model* fine_raw = nullptr;
            check(ratl_model_load(fine_model_path.c_str(), &fine_raw));
            ModelPtr fine_model(fine_raw);
            check(ratl_predict_chain(model.get(), fine_model.get(), corpus.get(),
                                     predictions.slot()));
        } else {
            check(ratl_predict_corpus(model.get(), corpus.get(), predictions.slot()));
        }
        write_output(predictions.get(), pred_opt.output);
        manifest.emit(pred_opt.manifest_path, pred_opt.output);
        return kExitOk;
    }

    return kExitUsage;
}
