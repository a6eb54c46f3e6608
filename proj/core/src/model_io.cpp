#include "radml/model_io.hpp"

#include <json.hpp>

#include <fstream>

namespace radml::model_io {

using nlohmann::json;
using namespace radml::pipeline;

namespace {

constexpr char kMagic[8] = {'R', 'M', 'L', 'M', 'O', 'D', 'L', '1'};

json vec_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Vector vec_from(const json& j) {
    Vector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v(static_cast<Eigen::Index>(i)) = j[i];
    return v;
}

json mat_json(const Matrix& m) {
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        for (Eigen::Index c = 0; c < m.cols(); ++c) data.push_back(m(r, c));
    }
    return json{{"rows", m.rows()}, {"cols", m.cols()}, {"data", data}};
}

Matrix mat_from(const json& j) {
    const Eigen::Index rows = j.at("rows"), cols = j.at("cols");
    Matrix m(rows, cols);
    const auto& data = j.at("data");
    std::size_t k = 0;
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = data[k++];
    }
    return m;
}

json classifier_json(const ClassifierModel& model) {
    json j;
    std::visit(
        [&](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, LogisticModel>) {
                j["kind"] = "logistic";
                j["weights"] = vec_json(m.weights);
            } else if constexpr (std::is_same_v<T, SvmModel>) {
                j["kind"] = "svm";
                j["kernel"] = to_string(m.kernel);
                j["gamma"] = m.gamma;
                j["support"] = mat_json(m.support);
                j["alpha_y"] = vec_json(m.alpha_y);
                j["bias"] = m.bias;
                j["platt_a"] = m.platt_a;
                j["platt_b"] = m.platt_b;
            } else if constexpr (std::is_same_v<T, ForestModel>) {
                j["kind"] = "forest";
                json trees = json::array();
                for (const auto& tree : m.trees) {
                    json nodes = json::array();
                    for (const auto& n : tree) {
                        nodes.push_back({{"f", n.feature},
                                         {"t", n.threshold},
                                         {"l", n.left},
                                         {"r", n.right},
                                         {"p", n.leaf_positive_fraction}});
                    }
                    trees.push_back(std::move(nodes));
                }
                j["trees"] = std::move(trees);
            } else if constexpr (std::is_same_v<T, NaiveBayesModel>) {
                j["kind"] = "naive_bayes";
                j["prior"] = m.prior_positive;
                j["mean0"] = vec_json(m.mean0);
                j["mean1"] = vec_json(m.mean1);
                j["var0"] = vec_json(m.var0);
                j["var1"] = vec_json(m.var1);
            } else if constexpr (std::is_same_v<T, DiscriminantModel>) {
                j["kind"] = m.quadratic ? "qda" : "lda";
                j["prior"] = m.prior_positive;
                j["mean0"] = vec_json(m.mean0);
                j["mean1"] = vec_json(m.mean1);
                j["cov_inv0"] = mat_json(m.cov_inv0);
                j["cov_inv1"] = mat_json(m.cov_inv1);
                j["log_det0"] = m.log_det0;
                j["log_det1"] = m.log_det1;
            }
        },
        model);
    return j;
}

ClassifierModel classifier_from(const json& j) {
    const std::string kind = j.at("kind");
    if (kind == "logistic") {
        LogisticModel m;
        m.weights = vec_from(j.at("weights"));
        return m;
    }
    if (kind == "svm") {
        SvmModel m;
        m.kernel = j.at("kernel") == "linear" ? SvmKernel::Linear : SvmKernel::Rbf;
        m.gamma = j.at("gamma");
        m.support = mat_from(j.at("support"));
        m.alpha_y = vec_from(j.at("alpha_y"));
        m.bias = j.at("bias");
        m.platt_a = j.at("platt_a");
        m.platt_b = j.at("platt_b");
        return m;
    }
    if (kind == "forest") {
        ForestModel m;
        for (const auto& tree : j.at("trees")) {
            std::vector<TreeNode> nodes;
            for (const auto& n : tree) {
                nodes.push_back({n.at("f"), n.at("t"), n.at("l"), n.at("r"), n.at("p")});
            }
            m.trees.push_back(std::move(nodes));
        }
        return m;
    }
    if (kind == "naive_bayes") {
        NaiveBayesModel m;
        m.prior_positive = j.at("prior");
        m.mean0 = vec_from(j.at("mean0"));
        m.mean1 = vec_from(j.at("mean1"));
        m.var0 = vec_from(j.at("var0"));
        m.var1 = vec_from(j.at("var1"));
        return m;
    }
    if (kind == "lda" || kind == "qda") {
        DiscriminantModel m;
        m.quadratic = kind == "qda";
        m.prior_positive = j.at("prior");
        m.mean0 = vec_from(j.at("mean0"));
        m.mean1 = vec_from(j.at("mean1"));
        m.cov_inv0 = mat_from(j.at("cov_inv0"));
        m.cov_inv1 = mat_from(j.at("cov_inv1"));
        m.log_det0 = j.at("log_det0");
        m.log_det1 = j.at("log_det1");
        return m;
    }
    throw DataError("unknown classifier kind in model file: " + kind);
}

} // namespace

void save_model(const search::EnsembleModel& model, const std::string& path) {
    json members = json::array();
    for (const auto& member : model.members) {
        json m;
        m["config"] = json::parse(member.config.to_json());
        m["mean_f1"] = member.mean_f1;
        const auto& p = member.fitted;
        m["input_features"] = p.input_features;
        if (p.scaler) {
            m["scaler"] = json{{"center", vec_json(p.scaler->center)},
                               {"scale", vec_json(p.scaler->scale)}};
        }
        m["imputer"] = json{{"kind", to_string(p.imputer.kind)},
                            {"k", p.imputer.k},
                            {"fill", vec_json(p.imputer.fill)},
                            {"donors", mat_json(p.imputer.donors)}};
        m["selected"] = p.selected;
        if (p.pca) {
            m["pca"] = json{{"mean", vec_json(p.pca->mean)}, {"basis", mat_json(p.pca->basis)}};
        }
        m["classifier"] = classifier_json(p.classifier);
        m["notes"] = p.notes;
        members.push_back(std::move(m));
    }
    json root{{"schema_version", 1},
              {"requested_size", model.requested_size},
              {"feature_contract", model.feature_contract},
              {"members", members}};

    const std::vector<std::uint8_t> payload = json::to_cbor(root);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write model: " + path);
    out.write(kMagic, sizeof(kMagic));
    out.write(reinterpret_cast<const char*>(payload.data()),
              static_cast<std::streamsize>(payload.size()));
    if (!out) throw DataError("short write to " + path);
}

search::EnsembleModel load_model(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open model: " + path);
    char magic[sizeof(kMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
        throw DataError("not a model file (bad magic): " + path);
    }
    std::vector<std::uint8_t> payload((std::istreambuf_iterator<char>(in)),
                                      std::istreambuf_iterator<char>());
    json root;
    try {
        root = json::from_cbor(payload);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("corrupt model payload: ") + e.what());
    }
    try {
        if (root.at("schema_version") != 1) throw DataError("unsupported model schema version");
        search::EnsembleModel model;
        model.requested_size = root.at("requested_size");
        model.feature_contract = root.at("feature_contract").get<std::vector<std::string>>();
        for (const auto& m : root.at("members")) {
            search::EnsembleModel::Member member;
            member.config = WorkflowConfig::from_json(m.at("config").dump());
            member.mean_f1 = m.at("mean_f1");
            auto& p = member.fitted;
            p.input_features = m.at("input_features").get<std::vector<std::string>>();
            if (m.contains("scaler")) {
                FittedScaler s;
                s.center = vec_from(m.at("scaler").at("center"));
                s.scale = vec_from(m.at("scaler").at("scale"));
                p.scaler = std::move(s);
            }
            const auto& imp = m.at("imputer");
            const std::string kind = imp.at("kind");
            p.imputer.kind = kind == "mean"          ? ImputerKind::Mean
                             : kind == "median"      ? ImputerKind::Median
                             : kind == "most_frequent" ? ImputerKind::MostFrequent
                                                        : ImputerKind::Knn;
            p.imputer.k = imp.at("k");
            p.imputer.fill = vec_from(imp.at("fill"));
            p.imputer.donors = mat_from(imp.at("donors"));
            p.selected = m.at("selected").get<std::vector<int>>();
            if (m.contains("pca")) {
                FittedPca pca;
                pca.mean = vec_from(m.at("pca").at("mean"));
                pca.basis = mat_from(m.at("pca").at("basis"));
                p.pca = std::move(pca);
            }
            p.classifier = classifier_from(m.at("classifier"));
            p.notes = m.at("notes").get<std::vector<std::string>>();
            model.members.push_back(std::move(member));
        }
        return model;
    } catch (const json::exception& e) {
        throw DataError(std::string("corrupt model payload: ") + e.what());
    }
}

} // namespace radml::model_io
