#include "rbv/model_io.hpp"

#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace rbv {

namespace {
using nlohmann::json;

json config_to_json(const HgbConfig& c) {
    return json{{"max_bins", c.max_bins},
                {"max_iter", c.max_iter},
                {"max_leaves", c.max_leaves},
                {"min_samples_leaf", c.min_samples_leaf},
                {"learning_rate", c.learning_rate},
                {"l2", c.l2},
                {"min_gain", c.min_gain},
                {"seed", c.seed}};
}

HgbConfig config_from_json(const json& j) {
    HgbConfig c;
    c.max_bins = j.at("max_bins").get<int>();
    c.max_iter = j.at("max_iter").get<int>();
    c.max_leaves = j.at("max_leaves").get<int>();
    c.min_samples_leaf = j.at("min_samples_leaf").get<int>();
    c.learning_rate = j.at("learning_rate").get<double>();
    c.l2 = j.at("l2").get<double>();
    c.min_gain = j.at("min_gain").get<double>();
    c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}
}  // namespace

std::string ensemble_to_json(const BoostedEnsemble& model) {
    json j;
    j["format"] = "rbv-hgb-1";
    j["config"] = config_to_json(model.config());
    j["base_score"] = model.base_score();
    j["feature_nos"] = model.feature_nos();

    json edges = json::array();
    for (std::size_t f = 0; f < model.mapper().n_features(); ++f) {
        edges.push_back(model.mapper().edges(f));
    }
    j["bin_edges"] = edges;
    j["max_bins"] = model.mapper().max_bins();

    json trees = json::array();
    for (const Tree& tree : model.trees()) {
        json nodes = json::array();
        for (const TreeNode& n : tree.nodes) {
            nodes.push_back(json{{"feature", n.feature},
                                 {"bin", n.bin_threshold},
                                 {"split", n.split_value},
                                 {"left", n.left},
                                 {"right", n.right},
                                 {"value", n.value}});
        }
        trees.push_back(std::move(nodes));
    }
    j["trees"] = trees;
    return j.dump(2);
}

BoostedEnsemble ensemble_from_json(const std::string& json_text) {
    const json j = json::parse(json_text);
    if (j.at("format").get<std::string>() != "rbv-hgb-1") {
        throw std::runtime_error("model file has unknown format tag");
    }
    std::vector<std::vector<double>> edges;
    for (const auto& e : j.at("bin_edges")) edges.push_back(e.get<std::vector<double>>());
    BinMapper mapper(std::move(edges), j.at("max_bins").get<int>());

    BoostedEnsemble model(std::move(mapper), j.at("feature_nos").get<std::vector<int>>(),
                          j.at("base_score").get<double>(), config_from_json(j.at("config")));
    for (const auto& tj : j.at("trees")) {
        Tree tree;
        for (const auto& nj : tj) {
            TreeNode n;
            n.feature = nj.at("feature").get<int>();
            n.bin_threshold = nj.at("bin").get<int>();
            n.split_value = nj.at("split").get<double>();
            n.left = nj.at("left").get<int>();
            n.right = nj.at("right").get<int>();
            n.value = nj.at("value").get<double>();
            tree.nodes.push_back(n);
        }
        model.trees().push_back(std::move(tree));
    }
    return model;
}

void save_ensemble(const BoostedEnsemble& model, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write model file: " + path);
    out << ensemble_to_json(model) << '\n';
}

BoostedEnsemble load_ensemble(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return ensemble_from_json(text);
}

}  // namespace rbv
