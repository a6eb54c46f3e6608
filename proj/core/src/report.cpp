#include "radml/report.hpp"

#include "radml/common.hpp"

#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace radml::report {

using nlohmann::json;
using eval::EvaluationReport;

namespace {

json interval_json(const stats::Interval& i) {
    return json{{"lower", i.lower}, {"mean", i.mean}, {"upper", i.upper}};
}

stats::Interval interval_from(const json& j) {
    stats::Interval i;
    i.lower = j.at("lower");
    i.mean = j.at("mean");
    i.upper = j.at("upper");
    return i;
}

json hashed_region(const EvaluationReport& r) {
    json config{{"seed", r.seed},
                {"budget", r.budget},
                {"ensemble_size", r.ensemble_size},
                {"inner_folds", r.inner_folds},
                {"inner_validation_fraction", r.inner_validation_fraction},
                {"iterations", r.n_iterations},
                {"test_fraction", r.test_fraction},
                {"split_mode", r.split_mode},
                {"combat_group", r.combat_group},
                {"feature_names", r.feature_names}};

    json iterations = json::array();
    for (const auto& m : r.iterations) {
        iterations.push_back({{"auc", m.auc},
                              {"bca", m.bca},
                              {"sensitivity", m.sensitivity},
                              {"specificity", m.specificity}});
    }
    json per_patient = json::array();
    for (const auto& p : r.per_patient) {
        per_patient.push_back({{"id", p.id}, {"tested", p.tested}, {"correct", p.correct}});
    }
    json ambiguous = json::array();
    for (const auto& [id, fraction] : r.typicality.ambiguous) {
        ambiguous.push_back({{"id", id}, {"fraction", fraction}});
    }
    json fitted = json::array();
    for (std::uint64_t h : r.fitted_hashes) fitted.push_back(h);

    json results{{"iterations", iterations},
                 {"ci", json{{"auc", interval_json(r.ci_auc)},
                             {"bca", interval_json(r.ci_bca)},
                             {"sensitivity", interval_json(r.ci_sensitivity)},
                             {"specificity", interval_json(r.ci_specificity)}}},
                 {"roc", json{{"fpr_grid", r.roc.fpr_grid},
                              {"mean_tpr", r.roc.mean_tpr},
                              {"band_half_width", r.roc.half_width}}},
                 {"per_patient", per_patient},
                 {"typicality", json{{"typical", r.typicality.typical},
                                     {"atypical", r.typicality.atypical},
                                     {"ambiguous", ambiguous},
                                     {"never_tested", r.typicality.never_tested}}},
                 {"fitted_hashes", fitted}};
    return json{{"config", config}, {"results", results}};
}

} // namespace

std::string determinism_region(const EvaluationReport& report) {
    return hashed_region(report).dump();
}

std::uint64_t determinism_hash(const EvaluationReport& report) {
    return fnv1a64(determinism_region(report));
}

std::string to_json(const EvaluationReport& report) {
    json j = hashed_region(report);
    j["schema_version"] = 1;
    j["determinism_hash"] = determinism_hash(report);
    j["meta"] = json{{"runtime_seconds", report.runtime_seconds},
                     {"threads", report.threads},
                     {"timestamp", report.timestamp}};
    return j.dump(2);
}

EvaluationReport from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("bad report json: ") + e.what());
    }
    try {
        if (j.at("schema_version") != 1) {
            throw DataError("unsupported report schema version");
        }
        EvaluationReport r;
        const json& config = j.at("config");
        r.seed = config.at("seed");
        r.budget = config.at("budget");
        r.ensemble_size = config.at("ensemble_size");
        r.inner_folds = config.at("inner_folds");
        r.inner_validation_fraction = config.at("inner_validation_fraction");
        r.n_iterations = config.at("iterations");
        r.test_fraction = config.at("test_fraction");
        r.split_mode = config.at("split_mode");
        r.combat_group = config.at("combat_group");
        r.feature_names = config.at("feature_names").get<std::vector<std::string>>();

        const json& results = j.at("results");
        for (const auto& m : results.at("iterations")) {
            r.iterations.push_back({m.at("auc"), m.at("bca"), m.at("sensitivity"),
                                    m.at("specificity")});
        }
        r.ci_auc = interval_from(results.at("ci").at("auc"));
        r.ci_bca = interval_from(results.at("ci").at("bca"));
        r.ci_sensitivity = interval_from(results.at("ci").at("sensitivity"));
        r.ci_specificity = interval_from(results.at("ci").at("specificity"));
        r.roc.fpr_grid = results.at("roc").at("fpr_grid").get<std::vector<double>>();
        r.roc.mean_tpr = results.at("roc").at("mean_tpr").get<std::vector<double>>();
        r.roc.half_width = results.at("roc").at("band_half_width");
        for (const auto& p : results.at("per_patient")) {
            r.per_patient.push_back({p.at("id"), p.at("tested"), p.at("correct")});
        }
        r.typicality.typical = results.at("typicality").at("typical").get<std::vector<std::string>>();
        r.typicality.atypical =
            results.at("typicality").at("atypical").get<std::vector<std::string>>();
        for (const auto& a : results.at("typicality").at("ambiguous")) {
            r.typicality.ambiguous.push_back({a.at("id"), a.at("fraction")});
        }
        r.typicality.never_tested =
            results.at("typicality").at("never_tested").get<std::vector<std::string>>();
        for (const auto& h : results.at("fitted_hashes")) {
            r.fitted_hashes.push_back(h.get<std::uint64_t>());
        }
        const json& meta = j.at("meta");
        r.runtime_seconds = meta.at("runtime_seconds");
        r.threads = meta.at("threads");
        r.timestamp = meta.at("timestamp");
        return r;
    } catch (const json::exception& e) {
        throw DataError(std::string("bad report json: ") + e.what());
    }
}

void write_report(const EvaluationReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write report: " + path);
    out << to_json(report) << "\n";
}

EvaluationReport read_report(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open report: " + path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_json(buffer.str());
}

namespace {

std::string bounded(double v) {
    if (v < 0.0) return "<0.00";
    if (v > 1.0) return ">1.00";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return buf;
}

} // namespace

std::string format_metric(const stats::Interval& interval) {
    char mean[16];
    std::snprintf(mean, sizeof(mean), "%.2f", interval.mean);
    return std::string(mean) + " [" + bounded(interval.lower) + ", " + bounded(interval.upper) + "]";
}

std::string render_table(const EvaluationReport& report) {
    std::ostringstream out;
    out << "Model evaluation (" << report.split_mode << ", " << report.n_iterations
        << " iterations, seed " << report.seed << ")\n";
    if (!report.combat_group.empty()) out << "Harmonization: ComBat by " << report.combat_group << "\n";
    out << "\n";
    const std::pair<const char*, const stats::Interval*> rows[] = {
        {"AUC", &report.ci_auc},
        {"BCA", &report.ci_bca},
        {"Sensitivity", &report.ci_sensitivity},
        {"Specificity", &report.ci_specificity},
    };
    for (const auto& [name, interval] : rows) {
        out << name;
        for (std::size_t i = std::string(name).size(); i < 14; ++i) out << ' ';
        out << format_metric(*interval) << "\n";
    }
    out << "\nROC band half-width: ";
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%.3f", report.roc.half_width);
    out << buf << "\n";
    out << "Typical patients: " << report.typicality.typical.size()
        << ", atypical: " << report.typicality.atypical.size() << "\n";
    if (!report.typicality.never_tested.empty()) {
        out << "Warning: " << report.typicality.never_tested.size()
            << " patients never appeared in a test set\n";
    }
    return out.str();
}

std::string roc_csv(const EvaluationReport& report) {
    std::ostringstream out;
    out << "fpr,mean_tpr,band_lower,band_upper\n";
    for (std::size_t i = 0; i < report.roc.fpr_grid.size(); ++i) {
        const double mean = report.roc.mean_tpr[i];
        // band endpoints clamp to [0, 1] in rendering only
        const double lo = std::max(0.0, mean - report.roc.half_width);
        const double hi = std::min(1.0, mean + report.roc.half_width);
        char buf[96];
        std::snprintf(buf, sizeof(buf), "%.6f,%.6f,%.6f,%.6f\n", report.roc.fpr_grid[i], mean, lo,
                      hi);
        out << buf;
    }
    return out.str();
}

} // namespace radml::report
