#include "radml/workflow_config.hpp"

#include "radml/common.hpp"
#include "radml/default_space.hpp"

#include <json.hpp>

namespace radml::pipeline {

using nlohmann::json;

const char* to_string(ImputerKind k) {
    switch (k) {
        case ImputerKind::Mean: return "mean";
        case ImputerKind::Median: return "median";
        case ImputerKind::MostFrequent: return "most_frequent";
        case ImputerKind::Knn: return "knn";
    }
    return "?";
}

const char* to_string(PcaMode m) {
    switch (m) {
        case PcaMode::Off: return "off";
        case PcaMode::Variance95: return "variance95";
        case PcaMode::FixedK: return "fixed_k";
    }
    return "?";
}

const char* to_string(ResamplerKind k) {
    switch (k) {
        case ResamplerKind::None: return "none";
        case ResamplerKind::RandomOver: return "random_over";
        case ResamplerKind::RandomUnder: return "random_under";
        case ResamplerKind::NearMiss: return "near_miss";
        case ResamplerKind::NeighborhoodCleaning: return "ncl";
        case ResamplerKind::Adasyn: return "adasyn";
        case ResamplerKind::Smote: return "smote";
        case ResamplerKind::SmoteBorderline: return "smote_borderline";
        case ResamplerKind::SmoteTomek: return "smote_tomek";
        case ResamplerKind::SmoteEnn: return "smote_enn";
    }
    return "?";
}

const char* to_string(ClassifierKind k) {
    switch (k) {
        case ClassifierKind::Logistic: return "logistic";
        case ClassifierKind::Svm: return "svm";
        case ClassifierKind::RandomForest: return "random_forest";
        case ClassifierKind::NaiveBayes: return "naive_bayes";
        case ClassifierKind::Lda: return "lda";
        case ClassifierKind::Qda: return "qda";
    }
    return "?";
}

const char* to_string(SvmKernel k) { return k == SvmKernel::Linear ? "linear" : "rbf"; }

namespace {

template <typename E>
E parse_enum(const std::string& name, const std::vector<std::pair<const char*, E>>& table,
             const std::string& what) {
    for (const auto& [text, value] : table) {
        if (name == text) return value;
    }
    throw DataError("unknown " + what + ": " + name);
}

const std::vector<std::pair<const char*, ImputerKind>> kImputerNames = {
    {"mean", ImputerKind::Mean},
    {"median", ImputerKind::Median},
    {"most_frequent", ImputerKind::MostFrequent},
    {"knn", ImputerKind::Knn}};
const std::vector<std::pair<const char*, PcaMode>> kPcaNames = {
    {"off", PcaMode::Off}, {"variance95", PcaMode::Variance95}, {"fixed_k", PcaMode::FixedK}};
const std::vector<std::pair<const char*, ResamplerKind>> kResamplerNames = {
    {"none", ResamplerKind::None},
    {"random_over", ResamplerKind::RandomOver},
    {"random_under", ResamplerKind::RandomUnder},
    {"near_miss", ResamplerKind::NearMiss},
    {"ncl", ResamplerKind::NeighborhoodCleaning},
    {"adasyn", ResamplerKind::Adasyn},
    {"smote", ResamplerKind::Smote},
    {"smote_borderline", ResamplerKind::SmoteBorderline},
    {"smote_tomek", ResamplerKind::SmoteTomek},
    {"smote_enn", ResamplerKind::SmoteEnn}};
const std::vector<std::pair<const char*, ClassifierKind>> kClassifierNames = {
    {"logistic", ClassifierKind::Logistic},   {"svm", ClassifierKind::Svm},
    {"random_forest", ClassifierKind::RandomForest}, {"naive_bayes", ClassifierKind::NaiveBayes},
    {"lda", ClassifierKind::Lda},             {"qda", ClassifierKind::Qda}};
const std::vector<std::pair<const char*, SvmKernel>> kKernelNames = {
    {"linear", SvmKernel::Linear}, {"rbf", SvmKernel::Rbf}};

} // namespace

std::string WorkflowConfig::to_json() const {
    json j;
    j["imputer"] = to_string(imputer);
    j["knn_k"] = knn_k;
    j["scaler"] = scaler_on;
    j["groups"] = group_flags;
    j["univariate_on"] = univariate_on;
    j["univariate_p"] = univariate_p;
    j["pca_mode"] = to_string(pca_mode);
    j["pca_k"] = pca_k;
    j["resampler"] = to_string(resampler);
    j["near_miss_version"] = near_miss_version;
    j["classifier"] = to_string(classifier);
    j["logistic_lambda"] = logistic_lambda;
    j["svm_kernel"] = to_string(svm_kernel);
    j["svm_c"] = svm_c;
    j["svm_gamma"] = svm_gamma;
    j["rf_trees"] = rf_trees;
    j["rf_depth"] = rf_depth;
    j["da_ridge"] = da_ridge;
    j["config_index"] = config_index;
    j["rng_stream"] = rng_stream;
    return j.dump();
}

WorkflowConfig WorkflowConfig::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("bad workflow config json: ") + e.what());
    }
    WorkflowConfig c;
    try {
        c.imputer = parse_enum<ImputerKind>(j.at("imputer"), kImputerNames, "imputer");
        c.knn_k = j.at("knn_k");
        c.scaler_on = j.at("scaler");
        c.group_flags = j.at("groups").get<std::map<std::string, bool>>();
        c.univariate_on = j.at("univariate_on");
        c.univariate_p = j.at("univariate_p");
        c.pca_mode = parse_enum<PcaMode>(j.at("pca_mode"), kPcaNames, "pca mode");
        c.pca_k = j.at("pca_k");
        c.resampler = parse_enum<ResamplerKind>(j.at("resampler"), kResamplerNames, "resampler");
        c.near_miss_version = j.at("near_miss_version");
        c.classifier = parse_enum<ClassifierKind>(j.at("classifier"), kClassifierNames, "classifier");
        c.logistic_lambda = j.at("logistic_lambda");
        c.svm_kernel = parse_enum<SvmKernel>(j.at("svm_kernel"), kKernelNames, "svm kernel");
        c.svm_c = j.at("svm_c");
        c.svm_gamma = j.at("svm_gamma");
        c.rf_trees = j.at("rf_trees");
        c.rf_depth = j.at("rf_depth");
        c.da_ridge = j.at("da_ridge");
        c.config_index = j.at("config_index");
        c.rng_stream = j.at("rng_stream");
    } catch (const json::exception& e) {
        throw DataError(std::string("bad workflow config json: ") + e.what());
    }
    return c;
}

std::uint64_t WorkflowConfig::hash() const { return fnv1a64(to_json()); }

SearchSpace SearchSpace::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("bad search space json: ") + e.what());
    }
    SearchSpace s;
    try {
        s.version = j.at("version");
        if (s.version != 1) {
            throw DataError("unsupported search space version " + std::to_string(s.version));
        }
        for (const auto& k : j.at("imputer").at("kinds")) {
            s.imputer_kinds.push_back(parse_enum<ImputerKind>(k, kImputerNames, "imputer"));
        }
        s.knn_k_min = j.at("imputer").at("knn_k")[0];
        s.knn_k_max = j.at("imputer").at("knn_k")[1];
        s.scaler_on_probability = j.at("scaler").at("on_probability");
        s.group_on_probability = j.at("groups").at("on_probability");
        s.univariate_on_probability = j.at("univariate").at("on_probability");
        s.univariate_p_min = j.at("univariate").at("p_threshold")[0];
        s.univariate_p_max = j.at("univariate").at("p_threshold")[1];
        s.pca_off_probability = j.at("pca").at("off_probability");
        s.pca_variance95_probability = j.at("pca").at("variance95_probability");
        s.pca_fixed_k_probability = j.at("pca").at("fixed_k_probability");
        s.pca_k_min = j.at("pca").at("fixed_k")[0];
        s.pca_k_max = j.at("pca").at("fixed_k")[1];
        s.resampler_none_probability = j.at("resampler").at("none_probability");
        for (const auto& k : j.at("resampler").at("kinds")) {
            s.resampler_kinds.push_back(parse_enum<ResamplerKind>(k, kResamplerNames, "resampler"));
        }
        s.near_miss_min = j.at("resampler").at("near_miss_version")[0];
        s.near_miss_max = j.at("resampler").at("near_miss_version")[1];
        for (const auto& k : j.at("classifier").at("kinds")) {
            s.classifier_kinds.push_back(parse_enum<ClassifierKind>(k, kClassifierNames, "classifier"));
        }
        s.logistic_lambda_min = j.at("classifier").at("logistic_lambda")[0];
        s.logistic_lambda_max = j.at("classifier").at("logistic_lambda")[1];
        for (const auto& k : j.at("classifier").at("svm_kernels")) {
            s.svm_kernels.push_back(parse_enum<SvmKernel>(k, kKernelNames, "svm kernel"));
        }
        s.svm_c_min = j.at("classifier").at("svm_c")[0];
        s.svm_c_max = j.at("classifier").at("svm_c")[1];
        s.svm_gamma_min = j.at("classifier").at("svm_gamma")[0];
        s.svm_gamma_max = j.at("classifier").at("svm_gamma")[1];
        s.rf_trees_min = j.at("classifier").at("rf_trees")[0];
        s.rf_trees_max = j.at("classifier").at("rf_trees")[1];
        s.rf_depth_min = j.at("classifier").at("rf_depth")[0];
        s.rf_depth_max = j.at("classifier").at("rf_depth")[1];
        s.da_ridge_min = j.at("classifier").at("da_ridge")[0];
        s.da_ridge_max = j.at("classifier").at("da_ridge")[1];
    } catch (const json::exception& e) {
        throw DataError(std::string("bad search space json: ") + e.what());
    }
    if (s.imputer_kinds.empty() || s.resampler_kinds.empty() || s.classifier_kinds.empty() ||
        s.svm_kernels.empty()) {
        throw DataError("search space must list at least one option per method");
    }
    return s;
}

SearchSpace SearchSpace::builtin_default() { return from_json(default_search_space_json()); }

WorkflowConfig SearchSpace::sample(std::uint64_t master_seed, std::uint64_t index,
                                   const std::vector<std::string>& group_tags) const {
    Rng rng = Rng::derive(master_seed, "workflow", {index});
    WorkflowConfig c;
    c.config_index = index;
    c.rng_stream = Rng::derive(master_seed, "workflow-exec", {index}).next_u64();

    c.imputer = imputer_kinds[rng.uniform_int(static_cast<std::uint64_t>(imputer_kinds.size()))];
    c.knn_k = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(knn_k_min),
                                               static_cast<std::int64_t>(knn_k_max)));
    c.scaler_on = rng.bernoulli(scaler_on_probability);
    for (const auto& tag : group_tags) c.group_flags[tag] = rng.bernoulli(group_on_probability);
    c.univariate_on = rng.bernoulli(univariate_on_probability);
    c.univariate_p = rng.uniform(univariate_p_min, univariate_p_max);

    const double pca_total =
        pca_off_probability + pca_variance95_probability + pca_fixed_k_probability;
    const double pca_draw = rng.uniform(0.0, pca_total);
    c.pca_mode = pca_draw < pca_off_probability                               ? PcaMode::Off
                 : pca_draw < pca_off_probability + pca_variance95_probability ? PcaMode::Variance95
                                                                               : PcaMode::FixedK;
    c.pca_k = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(pca_k_min),
                                               static_cast<std::int64_t>(pca_k_max)));

    if (rng.bernoulli(resampler_none_probability)) {
        c.resampler = ResamplerKind::None;
    } else {
        c.resampler =
            resampler_kinds[rng.uniform_int(static_cast<std::uint64_t>(resampler_kinds.size()))];
    }
    c.near_miss_version = static_cast<int>(rng.uniform_int(
        static_cast<std::int64_t>(near_miss_min), static_cast<std::int64_t>(near_miss_max)));

    c.classifier =
        classifier_kinds[rng.uniform_int(static_cast<std::uint64_t>(classifier_kinds.size()))];
    c.logistic_lambda = rng.log_uniform(logistic_lambda_min, logistic_lambda_max);
    c.svm_kernel = svm_kernels[rng.uniform_int(static_cast<std::uint64_t>(svm_kernels.size()))];
    c.svm_c = rng.log_uniform(svm_c_min, svm_c_max);
    c.svm_gamma = rng.log_uniform(svm_gamma_min, svm_gamma_max);
    c.rf_trees = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(rf_trees_min),
                                                  static_cast<std::int64_t>(rf_trees_max)));
    c.rf_depth = static_cast<int>(rng.uniform_int(static_cast<std::int64_t>(rf_depth_min),
                                                  static_cast<std::int64_t>(rf_depth_max)));
    c.da_ridge = rng.uniform(da_ridge_min, da_ridge_max);
    return c;
}

} // namespace radml::pipeline
