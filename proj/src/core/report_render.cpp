#include "core/report_render.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "core/errors.hpp"

namespace ratl {
namespace {

using nlohmann::json;

std::string fmt(const char* format, double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, format, v);
    return buf;
}

std::string num_or_na(const json& v, const char* format = "%.2f") {
    return v.is_null() ? "n/a" : fmt(format, v.get<double>());
}

void render_evaluation(const json& r, std::ostringstream& out) {
    out << "Evaluation: task=" << r["task"].get<std::string>()
        << " classifier=" << r["classifier"].get<std::string>();
    if (r.contains("method")) out << " method=" << r["method"].get<std::string>();
    out << " balance=" << r["balance"].get<std::string>()
        << " cv=" << r["cv"]["scheme"].get<std::string>();
    if (!r["cv"]["k"].is_null()) out << ":" << r["cv"]["k"].get<int>();
    out << " seed=" << r["seed"].get<std::uint64_t>() << "\n";
    out << "Instances: " << r["instances"].get<std::int64_t>()
        << "   folds: " << r["folds"].get<int>() << "\n\n";

    char line[160];
    std::snprintf(line, sizeof line, "%-16s %10s %10s %10s\n", "Class", "Precision", "Recall",
                  "F1");
    out << line;
    out << std::string(49, '-') << "\n";
    for (const auto& cls : r["classes"]) {
        std::snprintf(line, sizeof line, "%-16s %10.2f %10.2f %10.2f%s\n",
                      cls["name"].get<std::string>().c_str(), cls["precision"].get<double>(),
                      cls["recall"].get<double>(), cls["f1"].get<double>(),
                      cls["degenerate"].get<bool>() ? "  (degenerate folds)" : "");
        out << line;
    }
    if (r.contains("br_empty_predictions") && r["br_empty_predictions"].get<std::int64_t>() > 0) {
        out << "\nEmpty BR predictions: " << r["br_empty_predictions"].get<std::int64_t>() << "\n";
    }
    if (!r["warnings"].empty()) {
        out << "\nWarnings:\n";
        for (const auto& w : r["warnings"]) out << "  - " << w.get<std::string>() << "\n";
    }
}

void render_frequency(const json& r, std::ostringstream& out) {
    out << "Messages: " << r["total_messages"].get<std::int64_t>()
        << "   with rationale: " << r["rationale_messages"].get<std::int64_t>() << " ("
        << fmt("%.1f", 100.0 * r["share"].get<double>()) << "%)\n\n";

    char line[160];
    std::snprintf(line, sizeof line, "%-14s %8s %8s\n", "Element", "Count", "Share");
    out << line;
    out << std::string(32, '-') << "\n";
    for (const auto& [name, e] : r["elements"].items()) {
        const json& share = e["share"];
        std::snprintf(line, sizeof line, "%-14s %8lld %8s\n", name.c_str(),
                      static_cast<long long>(e["count"].get<std::int64_t>()),
                      share.is_null() ? "n/a"
                                      : (fmt("%.1f", 100.0 * share.get<double>()) + "%").c_str());
        out << line;
    }

    out << "\n";
    std::snprintf(line, sizeof line, "%-8s %9s %10s %7s %10s %11s\n", "Team", "Messages",
                  "Rationale", "Share", "rho(time)", "rho(volume)");
    out << line;
    out << std::string(60, '-') << "\n";
    for (const auto& t : r["teams"]) {
        const json& share = t["share"];
        std::snprintf(line, sizeof line, "%-8s %9lld %10lld %7s %10s %11s\n",
                      t["team"].get<std::string>().c_str(),
                      static_cast<long long>(t["total_messages"].get<std::int64_t>()),
                      static_cast<long long>(t["rationale_messages"].get<std::int64_t>()),
                      share.is_null() ? "n/a"
                                      : (fmt("%.1f", 100.0 * share.get<double>()) + "%").c_str(),
                      num_or_na(t["corr_time_rationale"]).c_str(),
                      num_or_na(t["corr_volume_rationale"]).c_str());
        out << line;
    }
    out << "\nBin granularity: " << r["granularity"].get<std::string>()
        << " (bin counts available in the JSON report)\n";
}

void render_completeness(const json& r, std::ostringstream& out) {
    const json& issues = r["issues"];
    const json& decisions = r["decisions"];
    auto row = [&](const char* label, const json& b, std::int64_t denom) {
        char line[160];
        std::snprintf(line, sizeof line, "%-38s %6lld /%6lld %8s\n", label,
                      static_cast<long long>(b["count"].get<std::int64_t>()),
                      static_cast<long long>(denom),
                      b["pct"].is_null() ? "n/a"
                                         : (fmt("%.0f", b["pct"].get<double>()) + "%").c_str());
        out << line;
    };
    out << "Issues: " << issues["total"].get<std::int64_t>()
        << "   Decisions: " << decisions["total"].get<std::int64_t>() << "\n\n";
    const std::int64_t it = issues["total"].get<std::int64_t>();
    const std::int64_t dt = decisions["total"].get<std::int64_t>();
    row("issues with proposed alternatives", issues["with_alternative"], it);
    row("issues with an identified decision", issues["with_decision"], it);
    row("issues with neither (bare)", issues["bare"], it);
    row("decisions with supporting pro-args", decisions["with_pro"], dt);
}

} // namespace

std::string render_report_text(const json& report) {
    if (!report.is_object() || !report.contains("report")) {
        throw DataError("not a report document (missing \"report\" field)");
    }
    const std::string type = report["report"].get<std::string>();
    std::ostringstream out;
    if (type == "evaluation") {
        render_evaluation(report, out);
    } else if (type == "frequency") {
        render_frequency(report, out);
    } else if (type == "completeness") {
        render_completeness(report, out);
    } else {
        throw DataError("unknown report type \"" + type + "\"");
    }
    return out.str();
}

} // namespace ratl
