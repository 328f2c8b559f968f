// rbv: mortality-risk analysis of routine blood values from the command line.
//
// Subcommands cover each stage of the analysis (ingest, synth, describe,
// select, correlate, balance, train, eval-models, sweep, threshold, mask)
// plus `pipeline`, which runs everything and writes a hashed manifest.
// Exit codes: 0 success, 2 input error, 3 stage failure.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rbv/correlation.hpp"
#include "rbv/csv.hpp"
#include "rbv/metrics.hpp"
#include "rbv/model_io.hpp"
#include "rbv/pipeline.hpp"
#include "rbv/preprocess.hpp"
#include "rbv/rng.hpp"
#include "rbv/smote.hpp"
#include "rbv/stats.hpp"
#include "rbv/sweep.hpp"
#include "rbv/synthetic.hpp"
#include "rbv/threshold.hpp"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitStage = 3;

struct DataArgs {
    std::string input_csv;
    std::string synth_spec;
    std::string label_column = "label";
    std::size_t n_survived = 2364;
    std::size_t n_nonsurvived = 233;
    std::uint64_t seed = 42;
    double winsor_lower = 1.0;
    double winsor_upper = 99.0;
    bool no_preprocess = false;
};

void add_data_options(CLI::App* cmd, DataArgs& args) {
    cmd->add_option("--input", args.input_csv, "input CSV file");
    cmd->add_option("--synth-spec", args.synth_spec, "synthetic marginals JSON");
    cmd->add_option("--label-column", args.label_column, "label column name")
        ->capture_default_str();
    cmd->add_option("--n-survived", args.n_survived, "synthetic class-0 rows")
        ->capture_default_str();
    cmd->add_option("--n-nonsurvived", args.n_nonsurvived, "synthetic class-1 rows")
        ->capture_default_str();
    cmd->add_option("--seed", args.seed, "root seed")->capture_default_str();
    cmd->add_option("--winsor-lower", args.winsor_lower, "winsorize lower percentile")
        ->capture_default_str();
    cmd->add_option("--winsor-upper", args.winsor_upper, "winsorize upper percentile")
        ->capture_default_str();
    cmd->add_flag("--no-preprocess", args.no_preprocess,
                  "skip winsorization and imputation (data must be complete)");
}

rbv::FeatureTable load_table(const DataArgs& args) {
    if (args.input_csv.empty() == args.synth_spec.empty()) {
        throw rbv::InputError("give exactly one of --input and --synth-spec");
    }
    rbv::FeatureTable table;
    try {
        if (!args.input_csv.empty()) {
            table = rbv::load_csv(args.input_csv, args.label_column);
        } else {
            rbv::SyntheticSpec spec;
            spec.features = rbv::load_marginals(args.synth_spec);
            spec.n_survived = args.n_survived;
            spec.n_nonsurvived = args.n_nonsurvived;
            spec.seed = args.seed;
            table = rbv::generate_synthetic(spec);
        }
    } catch (const std::exception& e) {
        throw rbv::InputError(e.what());
    }
    if (!args.no_preprocess) {
        if (!(args.winsor_lower == 0.0 && args.winsor_upper == 100.0)) {
            table = rbv::winsorize(table, args.winsor_lower, args.winsor_upper);
        }
        table = rbv::impute_mean(table);
    }
    return table;
}

// Writes to the file when a path is set, otherwise to stdout.
class OutputTarget {
public:
    explicit OutputTarget(const std::string& path) {
        if (!path.empty()) {
            file_.open(path, std::ios::binary);
            if (!file_) throw rbv::InputError("cannot write output file: " + path);
        }
    }
    std::ostream& stream() { return file_.is_open() ? file_ : std::cout; }

private:
    std::ofstream file_;
};

std::string fmt(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, v);
    return buf;
}

const std::string& name_of(int feature_no) {
    return rbv::FeatureCatalog::instance().by_no(feature_no).name;
}

void print_metrics_columns(std::ostream& out) {
    out << "precision_surv,precision_nonsurv,recall_surv,recall_nonsurv,"
           "f1_surv,f1_nonsurv,f1_squared";
}

void print_metrics_row(std::ostream& out, const rbv::EvalReport& r) {
    out << fmt(r.precision_surv, 4) << ',' << fmt(r.precision_nonsurv, 4) << ','
        << fmt(r.recall_surv, 4) << ',' << fmt(r.recall_nonsurv, 4) << ',' << fmt(r.f1_surv, 4)
        << ',' << fmt(r.f1_nonsurv, 4) << ',' << fmt(r.f1_squared, 5);
}

json report_to_json(const rbv::EvalReport& r) {
    return json{{"precision_surv", r.precision_surv},
                {"precision_nonsurv", r.precision_nonsurv},
                {"recall_surv", r.recall_surv},
                {"recall_nonsurv", r.recall_nonsurv},
                {"f1_surv", r.f1_surv},
                {"f1_nonsurv", r.f1_nonsurv},
                {"accuracy", r.accuracy},
                {"a_th", r.a_th},
                {"f1_squared", r.f1_squared},
                {"counts", json{{"tp", r.counts.tp},
                                {"fp", r.counts.fp},
                                {"tn", r.counts.tn},
                                {"fn", r.counts.fn}}},
                {"protocol", r.protocol}};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"analysis of routine blood values for mortality risk"};
    app.require_subcommand(1);

    // ---- ingest ----
    DataArgs ingest_args;
    std::string ingest_out;
    auto* ingest = app.add_subcommand("ingest", "read, clean and re-emit a dataset as CSV");
    add_data_options(ingest, ingest_args);
    ingest->add_option("--out", ingest_out, "output CSV (default stdout)");

    // ---- synth ----
    DataArgs synth_args;
    std::string synth_out;
    std::string synth_copula;
    auto* synth = app.add_subcommand("synth", "generate a synthetic surrogate dataset");
    synth->add_option("--spec", synth_args.synth_spec, "marginals JSON")->required();
    synth->add_option("--n-survived", synth_args.n_survived, "class-0 rows")
        ->capture_default_str();
    synth->add_option("--n-nonsurvived", synth_args.n_nonsurvived, "class-1 rows")
        ->capture_default_str();
    synth->add_option("--seed", synth_args.seed, "seed")->capture_default_str();
    synth->add_option("--copula-spearman", synth_copula,
                      "CSV matrix of Spearman targets (header row/col of names)");
    synth->add_option("--out", synth_out, "output CSV (default stdout)");

    // ---- describe ----
    DataArgs describe_args;
    std::string describe_out, describe_format = "csv";
    double describe_alpha = 0.05;
    auto* describe = app.add_subcommand("describe", "per-class quartiles and rank-test p-values");
    add_data_options(describe, describe_args);
    describe->add_option("--alpha", describe_alpha, "selection threshold")->capture_default_str();
    describe->add_option("--format", describe_format, "csv or json")->capture_default_str();
    describe->add_option("--out", describe_out, "output file (default stdout)");

    // ---- select ----
    DataArgs select_args;
    std::string select_out, select_format = "csv";
    double select_alpha = 0.05;
    auto* select = app.add_subcommand("select", "features that differ between classes");
    add_data_options(select, select_args);
    select->add_option("--alpha", select_alpha, "p-value threshold")->capture_default_str();
    select->add_option("--format", select_format, "csv or json")->capture_default_str();
    select->add_option("--out", select_out, "output file (default stdout)");

    // ---- correlate ----
    DataArgs corr_args;
    std::string corr_out, corr_format = "csv", corr_method = "spearman", corr_scope = "all";
    bool corr_deltas = false;
    std::size_t corr_top_k = 41;
    auto* correlate = app.add_subcommand("correlate", "correlation matrices and per-class deltas");
    add_data_options(correlate, corr_args);
    correlate->add_option("--method", corr_method, "pearson, spearman or kendall")
        ->capture_default_str();
    correlate->add_option("--scope", corr_scope, "all, survived or non_survived")
        ->capture_default_str();
    correlate->add_flag("--deltas", corr_deltas, "emit the per-class Spearman delta table");
    correlate->add_option("--top-k", corr_top_k, "delta rows to keep")->capture_default_str();
    correlate->add_option("--format", corr_format, "csv or json")->capture_default_str();
    correlate->add_option("--out", corr_out, "output file (default stdout)");

    // ---- balance ----
    DataArgs balance_args;
    std::string balance_out;
    rbv::SmoteConfig balance_smote;
    auto* balance = app.add_subcommand("balance", "SMOTE-balance a dataset and emit CSV");
    add_data_options(balance, balance_args);
    balance->add_option("--k", balance_smote.k_neighbors, "neighbors")->capture_default_str();
    balance->add_option("--ratio", balance_smote.target_ratio, "minority/majority target")
        ->capture_default_str();
    balance->add_option("--out", balance_out, "output CSV (default stdout)");

    // ---- train ----
    DataArgs train_args;
    std::string train_model = "hgb", train_out, train_features = "all";
    double train_alpha = 0.05;
    bool train_paper_mode = false, train_no_balance = false;
    rbv::HgbConfig train_hgb;
    auto* train = app.add_subcommand("train", "fit one model and report training metrics");
    add_data_options(train, train_args);
    train->add_option("--model", train_model, "hgb, dt, knn or gnb")->capture_default_str();
    train->add_option("--features", train_features,
                      "comma-separated feature numbers, 'all' or 'all-selected'")
        ->capture_default_str();
    train->add_option("--alpha", train_alpha, "alpha for 'all-selected'")->capture_default_str();
    train->add_flag("--paper-mode", train_paper_mode, "evaluate on the balanced data");
    train->add_flag("--no-balance", train_no_balance, "skip SMOTE before fitting");
    train->add_option("--max-iter", train_hgb.max_iter, "boosting rounds")->capture_default_str();
    train->add_option("--max-leaves", train_hgb.max_leaves, "leaves per tree")
        ->capture_default_str();
    train->add_option("--max-bins", train_hgb.max_bins, "histogram bins")->capture_default_str();
    train->add_option("--learning-rate", train_hgb.learning_rate, "shrinkage")
        ->capture_default_str();
    train->add_option("--l2", train_hgb.l2, "L2 regularization")->capture_default_str();
    train->add_option("--min-samples-leaf", train_hgb.min_samples_leaf, "min rows per leaf")
        ->capture_default_str();
    train->add_option("--out", train_out, "save the fitted model (hgb only) as JSON");

    // ---- eval-models ----
    DataArgs eval_args;
    std::string eval_out;
    int eval_folds = 5;
    bool eval_paper_mode = false, eval_no_balance = false, eval_train_set = false;
    rbv::HgbConfig eval_hgb;
    auto* eval_models = app.add_subcommand("eval-models",
                                           "compare hgb/knn/gnb/dt ranked by F1 squared");
    add_data_options(eval_models, eval_args);
    eval_models->add_option("--folds", eval_folds, "stratified folds")->capture_default_str();
    eval_models->add_flag("--paper-mode", eval_paper_mode, "SMOTE before splitting");
    eval_models->add_flag("--no-balance", eval_no_balance, "no SMOTE anywhere");
    eval_models->add_flag("--train-set", eval_train_set, "fit once, score the training data");
    eval_models->add_option("--max-iter", eval_hgb.max_iter, "boosting rounds")
        ->capture_default_str();
    eval_models->add_option("--out", eval_out, "output CSV (default stdout)");

    // ---- sweep ----
    DataArgs sweep_args;
    std::string sweep_out;
    bool sweep_single_flag = false, sweep_pairs_flag = false;
    bool sweep_paper_mode = false, sweep_no_balance = false, sweep_train_set = false;
    int sweep_folds = 5;
    std::size_t sweep_top_k = 40;
    double sweep_alpha = 0.05;
    bool sweep_selected_only = false;
    rbv::HgbConfig sweep_hgb;
    auto* sweep = app.add_subcommand("sweep", "per-feature / per-pair model evaluation");
    add_data_options(sweep, sweep_args);
    sweep->add_flag("--single", sweep_single_flag, "sweep every feature on its own");
    sweep->add_flag("--pairs", sweep_pairs_flag, "sweep all feature pairs");
    sweep->add_flag("--selected-only", sweep_selected_only,
                    "restrict to features passing selection at --alpha");
    sweep->add_option("--alpha", sweep_alpha, "selection alpha")->capture_default_str();
    sweep->add_option("--top-k", sweep_top_k, "pairs to keep")->capture_default_str();
    sweep->add_option("--folds", sweep_folds, "stratified folds")->capture_default_str();
    sweep->add_flag("--paper-mode", sweep_paper_mode, "SMOTE before splitting");
    sweep->add_flag("--no-balance", sweep_no_balance, "no SMOTE anywhere");
    sweep->add_flag("--train-set", sweep_train_set, "fit once, score the training data");
    sweep->add_option("--max-iter", sweep_hgb.max_iter, "boosting rounds")
        ->capture_default_str();
    sweep->add_option("--out", sweep_out, "output CSV (default stdout)");

    // ---- threshold ----
    DataArgs thr_args;
    std::string thr_out, thr_kind = "two";
    bool thr_no_balance = false, thr_snap = false;
    rbv::SmoteConfig thr_smote;
    auto* threshold = app.add_subcommand("threshold",
                                         "exhaustive one/two-threshold rule search per feature");
    add_data_options(threshold, thr_args);
    threshold->add_option("--kind", thr_kind, "one or two")->capture_default_str();
    threshold->add_flag("--no-balance", thr_no_balance, "search the raw columns");
    threshold->add_flag("--snap-to-data", thr_snap, "report observed values, not midpoints");
    threshold->add_option("--k", thr_smote.k_neighbors, "SMOTE neighbors")
        ->capture_default_str();
    threshold->add_option("--out", thr_out, "output CSV (default stdout)");

    // ---- mask ----
    DataArgs mask_args;
    std::string mask_out_prefix = "mask", mask_features, mask_model_path;
    std::size_t mask_points = 200;
    bool mask_no_balance = false;
    rbv::HgbConfig mask_hgb;
    auto* mask = app.add_subcommand("mask", "decision-region grid for 1 or 2 features");
    add_data_options(mask, mask_args);
    mask->add_option("--features", mask_features, "one or two feature numbers, comma-separated")
        ->required();
    mask->add_option("--n-points", mask_points, "grid points per axis")->capture_default_str();
    mask->add_option("--model", mask_model_path, "reuse a saved hgb model instead of training");
    mask->add_flag("--no-balance", mask_no_balance, "train the mask model without SMOTE");
    mask->add_option("--max-iter", mask_hgb.max_iter, "boosting rounds")->capture_default_str();
    mask->add_option("--out-prefix", mask_out_prefix, "writes <prefix>.csv and <prefix>.json")
        ->capture_default_str();

    // ---- pipeline ----
    rbv::RunConfig cli_cfg;
    if (const char* env = std::getenv("RBV_OUTPUT_DIR")) cli_cfg.output_dir = env;
    std::string pipeline_config_path;
    auto* pipeline = app.add_subcommand("pipeline", "run the full analysis and write a manifest");
    pipeline->add_option("--config", pipeline_config_path, "JSON config file (flags override)");
    auto* opt_input = pipeline->add_option("--input", cli_cfg.input_csv, "input CSV");
    auto* opt_spec = pipeline->add_option("--synth-spec", cli_cfg.synth_spec, "marginals JSON");
    auto* opt_label =
        pipeline->add_option("--label-column", cli_cfg.label_column, "label column name");
    auto* opt_outdir = pipeline->add_option("--out-dir", cli_cfg.output_dir,
                                            "output directory (env RBV_OUTPUT_DIR)");
    auto* opt_seed = pipeline->add_option("--seed", cli_cfg.seed, "root seed");
    auto* opt_alpha = pipeline->add_option("--alpha", cli_cfg.alpha, "selection alpha");
    auto* opt_wl = pipeline->add_option("--winsor-lower", cli_cfg.winsor_lower, "");
    auto* opt_wu = pipeline->add_option("--winsor-upper", cli_cfg.winsor_upper, "");
    auto* opt_ns = pipeline->add_option("--n-survived", cli_cfg.synth_survived, "");
    auto* opt_nn = pipeline->add_option("--n-nonsurvived", cli_cfg.synth_nonsurvived, "");
    auto* opt_folds = pipeline->add_option("--folds", cli_cfg.folds, "stratified folds");
    auto* opt_paper = pipeline->add_flag("--paper-mode", cli_cfg.paper_mode,
                                         "SMOTE before splitting");
    auto* opt_train_set = pipeline->add_flag("--train-set", cli_cfg.train_set_eval,
                                             "training-set evaluation");
    auto* opt_nobal = pipeline->add_flag("--no-balance", cli_cfg.no_balance, "no SMOTE");
    auto* opt_snap = pipeline->add_flag("--snap-to-data", cli_cfg.snap_to_data,
                                        "thresholds snap to observed values");
    auto* opt_iter = pipeline->add_option("--max-iter", cli_cfg.hgb.max_iter, "boosting rounds");
    auto* opt_points = pipeline->add_option("--mask-points", cli_cfg.mask_points, "");
    auto* opt_topk = pipeline->add_option("--pair-top-k", cli_cfg.pair_top_k, "");
    bool quiet = false, verbose = false;
    pipeline->add_flag("--quiet", quiet, "suppress the summary line");
    pipeline->add_flag("--verbose", verbose, "per-stage progress on stderr");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitInput;
    }

    try {
        if (ingest->parsed()) {
            const auto table = load_table(ingest_args);
            if (ingest_out.empty()) {
                const std::string tmp = "/dev/stdout";
                rbv::write_csv(table, tmp, ingest_args.label_column);
            } else {
                rbv::write_csv(table, ingest_out, ingest_args.label_column);
            }
            return kExitOk;
        }

        if (synth->parsed()) {
            rbv::SyntheticSpec spec;
            try {
                spec.features = rbv::load_marginals(synth_args.synth_spec);
            } catch (const std::exception& e) {
                throw rbv::InputError(e.what());
            }
            spec.n_survived = synth_args.n_survived;
            spec.n_nonsurvived = synth_args.n_nonsurvived;
            spec.seed = synth_args.seed;
            if (!synth_copula.empty()) {
                // matrix CSV: header row of names, one row per feature
                std::ifstream in(synth_copula);
                if (!in) throw rbv::InputError("cannot open " + synth_copula);
                std::string line;
                std::getline(in, line);  // header
                std::vector<double> m;
                while (std::getline(in, line)) {
                    std::stringstream ss(line);
                    std::string cell;
                    bool first = true;
                    while (std::getline(ss, cell, ',')) {
                        if (first) {
                            first = false;
                            continue;
                        }
                        m.push_back(std::stod(cell));
                    }
                }
                spec.spearman_target = std::move(m);
            }
            const auto table = rbv::generate_synthetic(spec);
            rbv::write_csv(table, synth_out.empty() ? "/dev/stdout" : synth_out, "label");
            return kExitOk;
        }

        if (describe->parsed()) {
            const auto table = load_table(describe_args);
            OutputTarget target(describe_out);
            auto& out = target.stream();
            if (describe_format == "json") {
                json rows = json::array();
                for (const int no : table.feature_nos()) {
                    const auto q = rbv::describe(table, no);
                    const std::size_t c = table.col_of(no);
                    const auto mw = rbv::mann_whitney(table.class_column(c, rbv::kSurvived),
                                                      table.class_column(c, rbv::kNonSurvived));
                    rows.push_back(json{
                        {"feature_no", no},
                        {"name", name_of(no)},
                        {"survived", {q.survived.median, q.survived.q25, q.survived.q75}},
                        {"non_survived",
                         {q.non_survived.median, q.non_survived.q25, q.non_survived.q75}},
                        {"mann_whitney_u", mw.statistic},
                        {"p_value", mw.p_value}});
                }
                out << rows.dump(2) << '\n';
            } else {
                out << "feature_no,name,surv_median,surv_q25,surv_q75,"
                       "nonsurv_median,nonsurv_q25,nonsurv_q75,mann_whitney_u,p_value\n";
                for (const int no : table.feature_nos()) {
                    const auto q = rbv::describe(table, no);
                    const std::size_t c = table.col_of(no);
                    const auto mw = rbv::mann_whitney(table.class_column(c, rbv::kSurvived),
                                                      table.class_column(c, rbv::kNonSurvived));
                    out << no << ',' << name_of(no) << ','
                        << rbv::format_double(q.survived.median) << ','
                        << rbv::format_double(q.survived.q25) << ','
                        << rbv::format_double(q.survived.q75) << ','
                        << rbv::format_double(q.non_survived.median) << ','
                        << rbv::format_double(q.non_survived.q25) << ','
                        << rbv::format_double(q.non_survived.q75) << ','
                        << rbv::format_double(mw.statistic) << ','
                        << rbv::format_double(mw.p_value) << '\n';
                }
            }
            return kExitOk;
        }

        if (select->parsed()) {
            const auto table = load_table(select_args);
            const auto selected = rbv::select_features(table, select_alpha);
            OutputTarget target(select_out);
            auto& out = target.stream();
            if (select_format == "json") {
                json j{{"alpha", select_alpha}, {"selected", selected}};
                out << j.dump(2) << '\n';
            } else {
                out << "feature_no,name\n";
                for (const int no : selected) out << no << ',' << name_of(no) << '\n';
            }
            return kExitOk;
        }

        if (correlate->parsed()) {
            const auto table = load_table(corr_args);
            OutputTarget target(corr_out);
            auto& out = target.stream();
            if (corr_deltas) {
                const auto deltas = rbv::correlation_deltas(table, corr_top_k);
                if (corr_format == "json") {
                    json rows = json::array();
                    for (const auto& d : deltas) {
                        rows.push_back(json{{"no_a", d.feature_a},
                                            {"no_b", d.feature_b},
                                            {"name_a", name_of(d.feature_a)},
                                            {"name_b", name_of(d.feature_b)},
                                            {"rho_surv", d.rho_survived},
                                            {"rho_nonsurv", d.rho_nonsurvived},
                                            {"direction", d.up ? "Up" : "Down"}});
                    }
                    out << rows.dump(2) << '\n';
                } else {
                    out << "no_a,no_b,name_a,name_b,rho_surv,rho_nonsurv,direction\n";
                    for (const auto& d : deltas) {
                        out << d.feature_a << ',' << d.feature_b << ',' << name_of(d.feature_a)
                            << ',' << name_of(d.feature_b) << ',' << fmt(d.rho_survived, 5)
                            << ',' << fmt(d.rho_nonsurvived, 5) << ','
                            << (d.up ? "Up" : "Down") << '\n';
                    }
                }
                return kExitOk;
            }
            rbv::CorrMethod method;
            if (corr_method == "pearson") method = rbv::CorrMethod::pearson;
            else if (corr_method == "spearman") method = rbv::CorrMethod::spearman;
            else if (corr_method == "kendall") method = rbv::CorrMethod::kendall;
            else throw rbv::InputError("unknown method: " + corr_method);
            rbv::CorrScope scope;
            if (corr_scope == "all") scope = rbv::CorrScope::all;
            else if (corr_scope == "survived") scope = rbv::CorrScope::survived;
            else if (corr_scope == "non_survived") scope = rbv::CorrScope::non_survived;
            else throw rbv::InputError("unknown scope: " + corr_scope);
            const auto report = rbv::correlate(table, method, scope);
            const std::size_t k = report.feature_nos.size();
            if (corr_format == "json") {
                json j{{"method", rbv::to_string(report.method)},
                       {"scope", rbv::to_string(report.scope)},
                       {"feature_nos", report.feature_nos},
                       {"matrix", report.matrix},
                       {"constant_features", report.constant_features}};
                out << j.dump(2) << '\n';
            } else {
                out << "feature";
                for (const int no : report.feature_nos) out << ',' << name_of(no);
                out << '\n';
                for (std::size_t i = 0; i < k; ++i) {
                    out << name_of(report.feature_nos[i]);
                    for (std::size_t j = 0; j < k; ++j) out << ',' << fmt(report.at(i, j), 5);
                    out << '\n';
                }
            }
            if (!report.constant_features.empty()) {
                std::cerr << "warning: constant columns reported as 0:";
                for (const int no : report.constant_features) std::cerr << ' ' << name_of(no);
                std::cerr << '\n';
            }
            return kExitOk;
        }

        if (balance->parsed()) {
            const auto table = load_table(balance_args);
            balance_smote.seed = rbv::substream_seed(balance_args.seed, "smote");
            const auto result = rbv::smote_balance(table, balance_smote);
            rbv::write_csv(result.table, balance_out.empty() ? "/dev/stdout" : balance_out,
                           balance_args.label_column);
            return kExitOk;
        }

        if (train->parsed()) {
            auto table = load_table(train_args);
            if (train_features == "all-selected") {
                const auto selected = rbv::select_features(table, train_alpha);
                if (selected.size() < 1) throw rbv::InputError("no features selected");
                table = table.subset(selected);
            } else if (train_features != "all") {
                try {
                    std::vector<int> nos;
                    std::stringstream ss(train_features);
                    std::string tok;
                    while (std::getline(ss, tok, ',')) nos.push_back(std::stoi(tok));
                    table = table.subset(nos);
                } catch (const std::exception&) {
                    throw rbv::InputError("--features expects catalog numbers, 'all' or "
                                          "'all-selected'");
                }
            }
            rbv::FeatureTable fit_table = table;
            if (!train_no_balance) {
                rbv::SmoteConfig cfg;
                cfg.seed = rbv::substream_seed(train_args.seed, "smote");
                fit_table = rbv::smote_balance(table, cfg).table;
            }
            train_hgb.seed = train_args.seed;
            const auto kind = rbv::model_kind_from(train_model);
            auto model = rbv::make_classifier(kind, train_hgb, rbv::BaselineConfig{});
            model->fit(fit_table);
            const auto& eval_on = train_paper_mode ? fit_table : table;
            const auto report =
                rbv::compute_metrics(rbv::confusion_from(eval_on.labels(),
                                                         model->predict(eval_on)));
            json j = report_to_json(report);
            j["model"] = train_model;
            j["rows_fit"] = fit_table.n_rows();
            std::cout << j.dump(2) << '\n';
            if (!train_out.empty()) {
                if (kind != rbv::ModelKind::hgb) {
                    throw rbv::InputError("--out: only hgb models serialize to JSON");
                }
                const auto ensemble = rbv::fit_hgb(fit_table, train_hgb);
                rbv::save_ensemble(ensemble, train_out);
            }
            return kExitOk;
        }

        if (eval_models->parsed()) {
            const auto table = load_table(eval_args);
            rbv::EvalProtocol protocol;
            protocol.mode = eval_train_set ? rbv::EvalMode::train_set : rbv::EvalMode::kfold;
            protocol.folds = eval_folds;
            protocol.paper_mode = eval_paper_mode;
            protocol.balance = !eval_no_balance;
            protocol.seed = eval_args.seed;
            std::vector<std::pair<std::string, rbv::EvalReport>> rows;
            for (const auto kind : {rbv::ModelKind::hgb, rbv::ModelKind::knn,
                                    rbv::ModelKind::gnb, rbv::ModelKind::dt}) {
                rows.emplace_back(rbv::to_string(kind),
                                  rbv::evaluate_model(table, kind, eval_hgb,
                                                      rbv::BaselineConfig{}, protocol));
            }
            std::stable_sort(rows.begin(), rows.end(), [](const auto& a, const auto& b) {
                return a.second.f1_squared > b.second.f1_squared;
            });
            OutputTarget target(eval_out);
            auto& out = target.stream();
            out << "model,f1_squared,precision_surv,precision_nonsurv,recall_surv,"
                   "recall_nonsurv,f1_surv,f1_nonsurv,accuracy,a_th,protocol\n";
            for (const auto& [name, r] : rows) {
                out << name << ',' << fmt(r.f1_squared, 5) << ',' << fmt(r.precision_surv, 4)
                    << ',' << fmt(r.precision_nonsurv, 4) << ',' << fmt(r.recall_surv, 4)
                    << ',' << fmt(r.recall_nonsurv, 4) << ',' << fmt(r.f1_surv, 4) << ','
                    << fmt(r.f1_nonsurv, 4) << ',' << fmt(r.accuracy, 4) << ','
                    << fmt(r.a_th, 4) << ',' << r.protocol << '\n';
            }
            return kExitOk;
        }

        if (sweep->parsed()) {
            if (sweep_single_flag == sweep_pairs_flag) {
                throw rbv::InputError("pass exactly one of --single and --pairs");
            }
            auto table = load_table(sweep_args);
            if (sweep_selected_only) {
                const auto selected = rbv::select_features(table, sweep_alpha);
                if (selected.size() < 2) throw rbv::InputError("fewer than 2 features selected");
                table = table.subset(selected);
            }
            rbv::EvalProtocol protocol;
            protocol.mode = sweep_train_set ? rbv::EvalMode::train_set : rbv::EvalMode::kfold;
            protocol.folds = sweep_folds;
            protocol.paper_mode = sweep_paper_mode;
            protocol.balance = !sweep_no_balance;
            protocol.seed = sweep_args.seed;
            OutputTarget target(sweep_out);
            auto& out = target.stream();
            if (sweep_single_flag) {
                const auto entries = rbv::sweep_single(table, sweep_hgb, protocol);
                out << "feature_no,name,";
                print_metrics_columns(out);
                out << '\n';
                for (const auto& e : entries) {
                    out << e.features[0] << ',' << name_of(e.features[0]) << ',';
                    print_metrics_row(out, e.report);
                    out << '\n';
                }
            } else {
                const auto entries = rbv::sweep_pairs(table, sweep_hgb, protocol, sweep_top_k);
                out << "no_a,no_b,name_a,name_b,";
                print_metrics_columns(out);
                out << '\n';
                for (const auto& e : entries) {
                    out << e.features[0] << ',' << e.features[1] << ','
                        << name_of(e.features[0]) << ',' << name_of(e.features[1]) << ',';
                    print_metrics_row(out, e.report);
                    out << '\n';
                }
            }
            return kExitOk;
        }

        if (threshold->parsed()) {
            const auto table = load_table(thr_args);
            rbv::ThresholdSearchOptions options;
            options.balance = !thr_no_balance;
            options.snap_to_data = thr_snap;
            options.smote = thr_smote;
            options.seed = thr_args.seed;
            const auto kind = thr_kind == "one" ? rbv::RuleKind::one : rbv::RuleKind::two;
            if (thr_kind != "one" && thr_kind != "two") {
                throw rbv::InputError("--kind must be one or two");
            }
            const auto results = rbv::search_all(table, kind, options);
            OutputTarget target(thr_out);
            auto& out = target.stream();
            out << "feature_no,name,type,v_th1,v_th2,a_th,";
            print_metrics_columns(out);
            out << '\n';
            for (const auto& r : results) {
                out << r.rule.feature_no << ',' << name_of(r.rule.feature_no) << ','
                    << r.rule.rule_type << ',';
                if (r.rule.kind == rbv::RuleKind::one) {
                    out << rbv::format_double(r.rule.v_th) << ',';
                } else {
                    out << rbv::format_double(r.rule.v_th1) << ','
                        << rbv::format_double(r.rule.v_th2);
                }
                out << ',' << fmt(r.a_th, 4) << ',';
                print_metrics_row(out, r.report);
                out << '\n';
            }
            return kExitOk;
        }

        if (mask->parsed()) {
            const auto table = load_table(mask_args);
            std::vector<int> features;
            try {
                std::stringstream ss(mask_features);
                std::string tok;
                while (std::getline(ss, tok, ',')) features.push_back(std::stoi(tok));
            } catch (const std::exception&) {
                throw rbv::InputError("--features expects catalog numbers like 35 or 31,35");
            }
            std::sort(features.begin(), features.end());
            rbv::BoostedEnsemble model;
            if (!mask_model_path.empty()) {
                try {
                    model = rbv::load_ensemble(mask_model_path);
                } catch (const std::exception& e) {
                    throw rbv::InputError(e.what());
                }
            } else {
                rbv::FeatureTable sub = table.subset(features);
                if (!mask_no_balance) {
                    rbv::SmoteConfig cfg;
                    cfg.seed = rbv::substream_seed(mask_args.seed, "smote-mask");
                    sub = rbv::smote_balance(sub, cfg).table;
                }
                mask_hgb.seed = mask_args.seed;
                model = rbv::fit_hgb(sub, mask_hgb);
            }
            const auto grid = rbv::make_mask(model, table, features, mask_points);
            std::ofstream csv(mask_out_prefix + ".csv", std::ios::binary);
            if (grid.axes.size() == 1) {
                for (std::size_t i = 0; i < grid.axes[0].n_points; ++i) {
                    csv << (i ? "," : "") << int(grid.at(i));
                }
                csv << '\n';
            } else {
                for (std::size_t iy = 0; iy < grid.axes[1].n_points; ++iy) {
                    for (std::size_t ix = 0; ix < grid.axes[0].n_points; ++ix) {
                        csv << (ix ? "," : "") << int(grid.at(ix, iy));
                    }
                    csv << '\n';
                }
            }
            json axes = json::array();
            for (const auto& axis : grid.axes) {
                axes.push_back(json{{"feature_no", axis.feature_no},
                                    {"name", name_of(axis.feature_no)},
                                    {"min", axis.min},
                                    {"max", axis.max},
                                    {"n_points", axis.n_points}});
            }
            json descriptor{{"axes", axes},
                            {"label_encoding", "0=survived,1=non-survived"},
                            {"model", json{{"kind", "hgb"}, {"n_trees", model.trees().size()}}}};
            std::ofstream jf(mask_out_prefix + ".json", std::ios::binary);
            jf << descriptor.dump(2) << '\n';
            return kExitOk;
        }

        if (pipeline->parsed()) {
            rbv::RunConfig cfg = cli_cfg;
            if (!pipeline_config_path.empty()) {
                std::ifstream in(pipeline_config_path);
                if (!in) throw rbv::InputError("cannot open config: " + pipeline_config_path);
                std::string text((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
                cfg = rbv::RunConfig::from_json_text(text);
                // flags given on the command line win over the file
                if (opt_input->count()) cfg.input_csv = cli_cfg.input_csv;
                if (opt_spec->count()) cfg.synth_spec = cli_cfg.synth_spec;
                if (opt_label->count()) cfg.label_column = cli_cfg.label_column;
                if (opt_outdir->count()) cfg.output_dir = cli_cfg.output_dir;
                if (opt_seed->count()) cfg.seed = cli_cfg.seed;
                if (opt_alpha->count()) cfg.alpha = cli_cfg.alpha;
                if (opt_wl->count()) cfg.winsor_lower = cli_cfg.winsor_lower;
                if (opt_wu->count()) cfg.winsor_upper = cli_cfg.winsor_upper;
                if (opt_ns->count()) cfg.synth_survived = cli_cfg.synth_survived;
                if (opt_nn->count()) cfg.synth_nonsurvived = cli_cfg.synth_nonsurvived;
                if (opt_folds->count()) cfg.folds = cli_cfg.folds;
                if (opt_paper->count()) cfg.paper_mode = cli_cfg.paper_mode;
                if (opt_train_set->count()) cfg.train_set_eval = cli_cfg.train_set_eval;
                if (opt_nobal->count()) cfg.no_balance = cli_cfg.no_balance;
                if (opt_snap->count()) cfg.snap_to_data = cli_cfg.snap_to_data;
                if (opt_iter->count()) cfg.hgb.max_iter = cli_cfg.hgb.max_iter;
                if (opt_points->count()) cfg.mask_points = cli_cfg.mask_points;
                if (opt_topk->count()) cfg.pair_top_k = cli_cfg.pair_top_k;
            }
            cfg.verbose = verbose;
            const auto result = rbv::run_pipeline(cfg);
            if (!quiet) {
                std::cout << "pipeline complete: " << result.artifact_paths.size()
                          << " files, manifest at " << result.manifest_path << '\n';
            }
            return kExitOk;
        }
    } catch (const rbv::InputError& e) {
        std::cerr << "input error: " << e.what() << '\n';
        return kExitInput;
    } catch (const rbv::StageError& e) {
        std::cerr << "stage failure: " << e.what() << '\n';
        return kExitStage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitStage;
    }
    return kExitOk;
}
