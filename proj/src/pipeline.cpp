#include "rbv/pipeline.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "rbv/correlation.hpp"
#include "rbv/csv.hpp"
#include "rbv/model_io.hpp"
#include "rbv/preprocess.hpp"
#include "rbv/rng.hpp"
#include "rbv/sha256.hpp"
#include "rbv/stats.hpp"
#include "rbv/sweep.hpp"
#include "rbv/synthetic.hpp"
#include "rbv/threshold.hpp"

namespace rbv {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

std::string fmt(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}
std::string fmt4(double v) { return fmt(v, 4); }
std::string fmt5(double v) { return fmt(v, 5); }

json smote_to_json(const SmoteConfig& c) {
    return json{{"k_neighbors", c.k_neighbors}, {"target_ratio", c.target_ratio}};
}

json hgb_to_json(const HgbConfig& c) {
    return json{{"max_bins", c.max_bins},
                {"max_iter", c.max_iter},
                {"max_leaves", c.max_leaves},
                {"min_samples_leaf", c.min_samples_leaf},
                {"learning_rate", c.learning_rate},
                {"l2", c.l2},
                {"min_gain", c.min_gain}};
}

json config_to_json(const RunConfig& c) {
    return json{{"input_csv", c.input_csv},
                {"synth_spec", c.synth_spec},
                {"label_column", c.label_column},
                {"output_dir", c.output_dir},
                {"seed", c.seed},
                {"alpha", c.alpha},
                {"winsor_lower", c.winsor_lower},
                {"winsor_upper", c.winsor_upper},
                {"synth_survived", c.synth_survived},
                {"synth_nonsurvived", c.synth_nonsurvived},
                {"smote", smote_to_json(c.smote)},
                {"hgb", hgb_to_json(c.hgb)},
                {"dt_max_depth", c.baselines.dt.max_depth},
                {"knn_k", c.baselines.knn.k},
                {"gnb_var_smoothing", c.baselines.gnb.var_smoothing},
                {"folds", c.folds},
                {"paper_mode", c.paper_mode},
                {"train_set_eval", c.train_set_eval},
                {"no_balance", c.no_balance},
                {"snap_to_data", c.snap_to_data},
                {"mask_points", c.mask_points},
                {"pair_top_k", c.pair_top_k},
                {"delta_top_k", c.delta_top_k},
                {"significant_cutoff", c.significant_cutoff}};
}

template <typename T>
void maybe_get(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

}  // namespace

std::string RunConfig::to_json_text() const { return config_to_json(*this).dump(2); }

RunConfig RunConfig::from_json_text(const std::string& text) {
    RunConfig c;
    const json j = json::parse(text);
    maybe_get(j, "input_csv", c.input_csv);
    maybe_get(j, "synth_spec", c.synth_spec);
    maybe_get(j, "label_column", c.label_column);
    maybe_get(j, "output_dir", c.output_dir);
    maybe_get(j, "seed", c.seed);
    maybe_get(j, "alpha", c.alpha);
    maybe_get(j, "winsor_lower", c.winsor_lower);
    maybe_get(j, "winsor_upper", c.winsor_upper);
    maybe_get(j, "synth_survived", c.synth_survived);
    maybe_get(j, "synth_nonsurvived", c.synth_nonsurvived);
    if (j.contains("smote")) {
        maybe_get(j.at("smote"), "k_neighbors", c.smote.k_neighbors);
        maybe_get(j.at("smote"), "target_ratio", c.smote.target_ratio);
    }
    if (j.contains("hgb")) {
        const json& h = j.at("hgb");
        maybe_get(h, "max_bins", c.hgb.max_bins);
        maybe_get(h, "max_iter", c.hgb.max_iter);
        maybe_get(h, "max_leaves", c.hgb.max_leaves);
        maybe_get(h, "min_samples_leaf", c.hgb.min_samples_leaf);
        maybe_get(h, "learning_rate", c.hgb.learning_rate);
        maybe_get(h, "l2", c.hgb.l2);
        maybe_get(h, "min_gain", c.hgb.min_gain);
    }
    maybe_get(j, "dt_max_depth", c.baselines.dt.max_depth);
    maybe_get(j, "knn_k", c.baselines.knn.k);
    maybe_get(j, "gnb_var_smoothing", c.baselines.gnb.var_smoothing);
    maybe_get(j, "folds", c.folds);
    maybe_get(j, "paper_mode", c.paper_mode);
    maybe_get(j, "train_set_eval", c.train_set_eval);
    maybe_get(j, "no_balance", c.no_balance);
    maybe_get(j, "snap_to_data", c.snap_to_data);
    maybe_get(j, "mask_points", c.mask_points);
    maybe_get(j, "pair_top_k", c.pair_top_k);
    maybe_get(j, "delta_top_k", c.delta_top_k);
    maybe_get(j, "significant_cutoff", c.significant_cutoff);
    return c;
}

EvalProtocol RunConfig::protocol() const {
    EvalProtocol p;
    p.mode = train_set_eval ? EvalMode::train_set : EvalMode::kfold;
    p.folds = folds;
    p.paper_mode = paper_mode;
    p.balance = !no_balance;
    p.smote = smote;
    p.seed = seed;
    return p;
}

std::string manifest_timestamp() {
    std::time_t t;
    if (const char* env = std::getenv("SOURCE_DATE_EPOCH")) {
        t = static_cast<std::time_t>(std::strtoll(env, nullptr, 10));
    } else {
        t = std::time(nullptr);
    }
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

namespace {

const char* feature_name(int no) { return FeatureCatalog::instance().by_no(no).name.c_str(); }

std::ofstream open_out(const fs::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    return out;
}

void append_metrics_header(std::ofstream& out) {
    out << "precision_surv,precision_nonsurv,recall_surv,recall_nonsurv,"
           "f1_surv,f1_nonsurv,f1_squared";
}

void append_metrics_row(std::ofstream& out, const EvalReport& r) {
    out << fmt4(r.precision_surv) << ',' << fmt4(r.precision_nonsurv) << ','
        << fmt4(r.recall_surv) << ',' << fmt4(r.recall_nonsurv) << ',' << fmt4(r.f1_surv) << ','
        << fmt4(r.f1_nonsurv) << ',' << fmt5(r.f1_squared);
}

struct StatsRow {
    int feature_no;
    ClassQuartiles quartiles;
    TestResult mw;
    bool selected;
};

void write_descriptives(const fs::path& path, const std::vector<StatsRow>& rows, double alpha) {
    auto out = open_out(path);
    out << "feature_no,name,unit,surv_median,surv_q25,surv_q75,"
           "nonsurv_median,nonsurv_q25,nonsurv_q75,mann_whitney_u,p_value,selected_at_alpha_"
        << format_double(alpha) << '\n';
    for (const auto& r : rows) {
        const auto& entry = FeatureCatalog::instance().by_no(r.feature_no);
        out << r.feature_no << ',' << entry.name << ',' << entry.unit << ','
            << format_double(r.quartiles.survived.median) << ','
            << format_double(r.quartiles.survived.q25) << ','
            << format_double(r.quartiles.survived.q75) << ','
            << format_double(r.quartiles.non_survived.median) << ','
            << format_double(r.quartiles.non_survived.q25) << ','
            << format_double(r.quartiles.non_survived.q75) << ','
            << format_double(r.mw.statistic) << ',' << format_double(r.mw.p_value) << ','
            << (r.selected ? 1 : 0) << '\n';
    }
}

void write_deltas(const fs::path& path, const std::vector<CorrelationDelta>& deltas) {
    auto out = open_out(path);
    out << "no_a,no_b,name_a,name_b,rho_surv,rho_nonsurv,direction\n";
    for (const auto& d : deltas) {
        out << d.feature_a << ',' << d.feature_b << ',' << feature_name(d.feature_a) << ','
            << feature_name(d.feature_b) << ',' << fmt5(d.rho_survived) << ','
            << fmt5(d.rho_nonsurvived) << ',' << (d.up ? "Up" : "Down") << '\n';
    }
}

void write_correlation_matrix(const fs::path& path, const CorrelationReport& report) {
    auto out = open_out(path);
    out << "feature";
    for (const int no : report.feature_nos) out << ',' << feature_name(no);
    out << '\n';
    const std::size_t k = report.feature_nos.size();
    for (std::size_t i = 0; i < k; ++i) {
        out << feature_name(report.feature_nos[i]);
        for (std::size_t j = 0; j < k; ++j) out << ',' << fmt5(report.at(i, j));
        out << '\n';
    }
}

void write_model_comparison(const fs::path& path,
                            const std::vector<std::pair<std::string, EvalReport>>& reports) {
    auto out = open_out(path);
    out << "model,f1_squared,precision_surv,precision_nonsurv,recall_surv,recall_nonsurv,"
           "f1_surv,f1_nonsurv,accuracy,a_th,protocol\n";
    for (const auto& [name, r] : reports) {
        out << name << ',' << fmt5(r.f1_squared) << ',' << fmt4(r.precision_surv) << ','
            << fmt4(r.precision_nonsurv) << ',' << fmt4(r.recall_surv) << ','
            << fmt4(r.recall_nonsurv) << ',' << fmt4(r.f1_surv) << ',' << fmt4(r.f1_nonsurv)
            << ',' << fmt4(r.accuracy) << ',' << fmt4(r.a_th) << ',' << r.protocol << '\n';
    }
}

void write_single_sweep(const fs::path& path, const std::vector<SweepEntry>& entries) {
    auto out = open_out(path);
    out << "feature_no,name,";
    append_metrics_header(out);
    out << '\n';
    for (const auto& e : entries) {
        out << e.features[0] << ',' << feature_name(e.features[0]) << ',';
        append_metrics_row(out, e.report);
        out << '\n';
    }
}

void write_pair_sweep(const fs::path& path, const std::vector<SweepEntry>& entries) {
    auto out = open_out(path);
    out << "no_a,no_b,name_a,name_b,";
    append_metrics_header(out);
    out << '\n';
    for (const auto& e : entries) {
        out << e.features[0] << ',' << e.features[1] << ',' << feature_name(e.features[0])
            << ',' << feature_name(e.features[1]) << ',';
        append_metrics_row(out, e.report);
        out << '\n';
    }
}

void write_significant(const fs::path& path, const std::vector<SweepEntry>& significant,
                       const std::vector<ThresholdSearchResult>& one,
                       const std::vector<ThresholdSearchResult>& two) {
    auto out = open_out(path);
    out << "name,feature_no,f1sq_hgb,f1sq_one_threshold,f1sq_two_threshold\n";
    auto threshold_f1sq = [](const std::vector<ThresholdSearchResult>& results, int no) {
        for (const auto& r : results) {
            if (r.rule.feature_no == no) return r.report.f1_squared;
        }
        return 0.0;
    };
    for (const auto& e : significant) {
        const int no = e.features[0];
        out << feature_name(no) << ',' << no << ',' << fmt5(e.report.f1_squared) << ','
            << fmt5(threshold_f1sq(one, no)) << ',' << fmt5(threshold_f1sq(two, no)) << '\n';
    }
}

void write_threshold(const fs::path& path, const std::vector<ThresholdSearchResult>& results) {
    auto out = open_out(path);
    out << "feature_no,name,type,v_th1,v_th2,a_th,";
    append_metrics_header(out);
    out << '\n';
    for (const auto& r : results) {
        out << r.rule.feature_no << ',' << feature_name(r.rule.feature_no) << ','
            << r.rule.rule_type << ',';
        if (r.rule.kind == RuleKind::one) {
            out << format_double(r.rule.v_th) << ',';
        } else {
            out << format_double(r.rule.v_th1) << ',' << format_double(r.rule.v_th2);
        }
        out << ',' << fmt4(r.a_th) << ',';
        append_metrics_row(out, r.report);
        out << '\n';
    }
}

void write_mask(const fs::path& csv_path, const fs::path& json_path, const MaskGrid& grid,
                const BoostedEnsemble& model) {
    auto out = open_out(csv_path);
    if (grid.axes.size() == 1) {
        for (std::size_t i = 0; i < grid.axes[0].n_points; ++i) {
            out << (i ? "," : "") << int(grid.at(i));
        }
        out << '\n';
    } else {
        for (std::size_t iy = 0; iy < grid.axes[1].n_points; ++iy) {
            for (std::size_t ix = 0; ix < grid.axes[0].n_points; ++ix) {
                out << (ix ? "," : "") << int(grid.at(ix, iy));
            }
            out << '\n';
        }
    }

    json axes = json::array();
    for (const auto& axis : grid.axes) {
        axes.push_back(json{{"feature_no", axis.feature_no},
                            {"name", feature_name(axis.feature_no)},
                            {"min", axis.min},
                            {"max", axis.max},
                            {"n_points", axis.n_points}});
    }
    json descriptor{{"axes", axes},
                    {"label_encoding", "0=survived,1=non-survived"},
                    {"grid_layout", grid.axes.size() == 1 ? "single row"
                                                          : "row-major, rows follow axis 1 (y)"},
                    {"model", json{{"kind", "hgb"},
                                   {"config", hgb_to_json(model.config())},
                                   {"base_score", model.base_score()},
                                   {"n_trees", model.trees().size()}}}};
    auto jout = open_out(json_path);
    jout << descriptor.dump(2) << '\n';
}

}  // namespace

PipelineResult run_pipeline(const RunConfig& config) {
    if (config.input_csv.empty() == config.synth_spec.empty()) {
        throw InputError("exactly one of input CSV and synthetic spec must be given");
    }
    const fs::path out_dir(config.output_dir);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw InputError("cannot create output directory " + out_dir.string());

    json manifest;
    manifest["config"] = json::parse(config.to_json_text());
    manifest["seed"] = config.seed;
    manifest["generated_at"] = manifest_timestamp();
    manifest["status"] = "running";
    json artifacts = json::array();
    std::vector<std::string> artifact_paths;

    const auto note = [&](const std::string& msg) {
        if (config.verbose) std::cerr << "[pipeline] " << msg << '\n';
    };
    const auto add_artifact = [&](const std::string& name,
                                  const std::vector<fs::path>& files) {
        json files_json = json::array();
        for (const auto& f : files) {
            files_json.push_back(json{{"path", f.filename().string()},
                                      {"sha256", Sha256::hash_file_hex(f.string())}});
            artifact_paths.push_back(f.string());
        }
        artifacts.push_back(json{{"name", name}, {"files", files_json}});
    };
    const auto write_manifest = [&]() {
        manifest["artifacts"] = artifacts;
        auto out = open_out(out_dir / "manifest.json");
        out << manifest.dump(2) << '\n';
    };

    std::string current_stage = "ingest";
    try {
        // ingest
        note("ingest");
        FeatureTable raw;
        if (!config.input_csv.empty()) {
            try {
                raw = load_csv(config.input_csv, config.label_column);
            } catch (const std::exception& e) {
                throw InputError(e.what());
            }
        } else {
            SyntheticSpec spec;
            try {
                spec.features = load_marginals(config.synth_spec);
            } catch (const std::exception& e) {
                throw InputError(e.what());
            }
            spec.n_survived = config.synth_survived;
            spec.n_nonsurvived = config.synth_nonsurvived;
            spec.seed = config.seed;
            raw = generate_synthetic(spec);
        }

        current_stage = "winsorize";
        note(current_stage);
        FeatureTable table = config.winsor_lower == 0.0 && config.winsor_upper == 100.0
                                 ? raw
                                 : winsorize(raw, config.winsor_lower, config.winsor_upper);

        current_stage = "impute";
        note(current_stage);
        table = impute_mean(table);
        table.require_finalized();
        table.require_both_classes();

        current_stage = "describe";
        note(current_stage);
        std::vector<StatsRow> stats_rows;
        for (const int no : table.feature_nos()) {
            StatsRow row{no, describe(table, no), {}, false};
            const std::size_t c = table.col_of(no);
            row.mw = mann_whitney(table.class_column(c, kSurvived),
                                  table.class_column(c, kNonSurvived));
            row.selected = row.mw.p_value < config.alpha;
            stats_rows.push_back(row);
        }

        current_stage = "select";
        note(current_stage);
        const std::vector<int> selected = select_features(table, config.alpha);
        manifest["selected_features"] = selected;
        write_descriptives(out_dir / "descriptive_stats.csv", stats_rows, config.alpha);
        add_artifact("descriptive_stats", {out_dir / "descriptive_stats.csv"});

        current_stage = "correlate";
        note(current_stage);
        const auto spearman_all = correlate(table, CorrMethod::spearman, CorrScope::all);
        write_correlation_matrix(out_dir / "correlation_spearman.csv", spearman_all);
        const auto deltas = correlation_deltas(table, config.delta_top_k);
        write_deltas(out_dir / "correlation_deltas.csv", deltas);
        add_artifact("correlation_deltas", {out_dir / "correlation_deltas.csv",
                                            out_dir / "correlation_spearman.csv"});

        const EvalProtocol protocol = config.protocol();
        const FeatureTable model_table = selected.size() >= 2 ? table.subset(selected) : table;

        current_stage = "eval-models";
        note(current_stage);
        std::vector<std::pair<std::string, EvalReport>> comparison;
        for (const ModelKind kind :
             {ModelKind::hgb, ModelKind::knn, ModelKind::gnb, ModelKind::dt}) {
            comparison.emplace_back(to_string(kind), evaluate_model(model_table, kind,
                                                                    config.hgb,
                                                                    config.baselines, protocol));
        }
        std::stable_sort(comparison.begin(), comparison.end(), [](const auto& a, const auto& b) {
            return a.second.f1_squared > b.second.f1_squared;
        });
        write_model_comparison(out_dir / "model_comparison.csv", comparison);
        add_artifact("model_comparison", {out_dir / "model_comparison.csv"});

        current_stage = "sweep-single";
        note(current_stage);
        const auto singles = sweep_single(table, config.hgb, protocol);
        write_single_sweep(out_dir / "single_feature_sweep.csv", singles);
        add_artifact("single_feature_sweep", {out_dir / "single_feature_sweep.csv"});

        current_stage = "threshold-one";
        note(current_stage);
        ThresholdSearchOptions topts;
        topts.balance = !config.no_balance;
        topts.snap_to_data = config.snap_to_data;
        topts.smote = config.smote;
        topts.seed = config.seed;
        const auto one_results = search_all(table, RuleKind::one, topts);
        write_threshold(out_dir / "one_threshold.csv", one_results);
        add_artifact("one_threshold", {out_dir / "one_threshold.csv"});

        current_stage = "threshold-two";
        note(current_stage);
        const auto two_results = search_all(table, RuleKind::two, topts);
        write_threshold(out_dir / "two_threshold.csv", two_results);
        add_artifact("two_threshold", {out_dir / "two_threshold.csv"});

        current_stage = "significant";
        note(current_stage);
        const auto significant = significant_features(singles, config.significant_cutoff);
        write_significant(out_dir / "significant_features.csv", significant, one_results,
                          two_results);
        add_artifact("significant_features", {out_dir / "significant_features.csv"});

        current_stage = "sweep-pairs";
        note(current_stage);
        const auto pairs = sweep_pairs(model_table, config.hgb, protocol, config.pair_top_k);
        write_pair_sweep(out_dir / "pair_sweep.csv", pairs);
        add_artifact("pair_sweep", {out_dir / "pair_sweep.csv"});

        // masks for the best single feature and the best pair
        current_stage = "mask-single";
        note(current_stage);
        const auto train_mask_model = [&](const std::vector<int>& features) {
            FeatureTable sub = table.subset(features);
            if (!config.no_balance) {
                SmoteConfig cfg = config.smote;
                cfg.seed = substream_seed(config.seed, "smote-mask");
                sub = smote_balance(sub, cfg).table;
            }
            return fit_hgb(sub, config.hgb);
        };
        const std::vector<int> top_single = singles.front().features;
        const auto mask1_model = train_mask_model(top_single);
        const auto mask1 = make_mask(mask1_model, table, top_single, config.mask_points);
        write_mask(out_dir / "mask_single.csv", out_dir / "mask_single.json", mask1,
                   mask1_model);
        add_artifact("mask_single", {out_dir / "mask_single.csv", out_dir / "mask_single.json"});

        current_stage = "mask-pair";
        note(current_stage);
        const std::vector<int> top_pair = pairs.front().features;
        const auto mask2_model = train_mask_model(top_pair);
        const auto mask2 = make_mask(mask2_model, table, top_pair, config.mask_points);
        write_mask(out_dir / "mask_pair.csv", out_dir / "mask_pair.json", mask2, mask2_model);
        add_artifact("mask_pair", {out_dir / "mask_pair.csv", out_dir / "mask_pair.json"});

        manifest["status"] = "ok";
        manifest.erase("failed_stage");
        write_manifest();
    } catch (const InputError&) {
        throw;
    } catch (const std::exception& e) {
        manifest["status"] = "failed";
        manifest["failed_stage"] = current_stage;
        manifest["error"] = e.what();
        write_manifest();
        throw StageError(current_stage, e.what());
    }

    PipelineResult result;
    result.manifest_path = (out_dir / "manifest.json").string();
    result.artifact_paths = artifact_paths;
    return result;
}

}  // namespace rbv
