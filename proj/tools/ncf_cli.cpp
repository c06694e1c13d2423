// Command-line front end: ingest ratings, train the four architectures,
// run the evaluation grid, and print reliability-filtered recommendations.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <memory>

#include "ncf/checkpoint.hpp"
#include "ncf/dataset.hpp"
#include "ncf/evaluation.hpp"
#include "ncf/model.hpp"
#include "ncf/reliability.hpp"
#include "ncf/runconfig.hpp"
#include "ncf/synth.hpp"

namespace fs = std::filesystem;
using namespace ncf;

namespace {

struct CliOptions {
    RunConfig cfg;
    std::string config_file;
    std::string scores = "";
    std::string n_list, theta_list, beta_list;

    CLI::Option* opt_data = nullptr;
    CLI::Option* opt_format = nullptr;
    CLI::Option* opt_scores = nullptr;
    CLI::Option* opt_ratio = nullptr;
    CLI::Option* opt_seed = nullptr;
    CLI::Option* opt_model = nullptr;
    CLI::Option* opt_epochs = nullptr;
    CLI::Option* opt_batch = nullptr;
    CLI::Option* opt_lr = nullptr;
    CLI::Option* opt_embed = nullptr;
    CLI::Option* opt_dropout = nullptr;
    CLI::Option* opt_trunk = nullptr;
    CLI::Option* opt_btheta = nullptr;
    CLI::Option* opt_n = nullptr;
    CLI::Option* opt_theta = nullptr;
    CLI::Option* opt_beta = nullptr;
    CLI::Option* opt_family = nullptr;
    CLI::Option* opt_out = nullptr;
};

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

void add_common_options(CLI::App* app, CliOptions& o) {
    app->add_option("--config", o.config_file, "flat key=value config file");
    o.opt_data = app->add_option("--data", o.cfg.data_path, "rating file path");
    o.opt_format = app->add_option("--format", o.cfg.format, "ml100k|csv")
                       ->check(CLI::IsMember({"ml100k", "csv"}));
    o.opt_scores = app->add_option("--scores", o.scores, "score range, e.g. 1:5");
    o.opt_ratio = app->add_option("--train-ratio", o.cfg.train_ratio, "train fraction");
    o.opt_seed = app->add_option("--seed", o.cfg.seed, "global seed");
    o.opt_model = app->add_option("--model", o.cfg.model,
                                  "classification|regression|binary|deepmf|all");
    o.opt_epochs = app->add_option("--epochs", o.cfg.epochs, "training epochs");
    o.opt_batch = app->add_option("--batch", o.cfg.batch_size, "mini-batch size");
    o.opt_lr = app->add_option("--lr", o.cfg.learning_rate, "Adam learning rate");
    o.opt_embed = app->add_option("--embed", o.cfg.embed_dim, "embedding size F");
    o.opt_dropout = app->add_option("--dropout", o.cfg.dropout, "dropout rate");
    o.opt_trunk = app->add_option("--regression-trunk", o.cfg.regression_trunk,
                                  "dot|mlp merge for the regression baseline");
    o.opt_btheta = app->add_option("--binary-theta", o.cfg.binary_theta,
                                   "relevancy threshold for binary labels");
    o.opt_n = app->add_option("--n", o.n_list, "comma-separated N values");
    o.opt_theta = app->add_option("--theta", o.theta_list, "comma-separated thetas");
    o.opt_beta = app->add_option("--beta", o.beta_list, "comma-separated betas");
    o.opt_family = app->add_option("--family", o.cfg.family, "topn|perrating|pvc|all")
                       ->check(CLI::IsMember({"topn", "perrating", "pvc", "all"}));
    o.opt_out = app->add_option("--out", o.cfg.out_dir, "run directory");
}

// Start from the config file when given, then let explicit flags win.
RunConfig resolve_config(const CliOptions& o) {
    RunConfig cfg = o.cfg;
    if (!o.config_file.empty()) {
        RunConfig base = read_run_config(o.config_file);
        if (!o.opt_data->count()) cfg.data_path = base.data_path;
        if (!o.opt_format->count()) cfg.format = base.format;
        if (!o.opt_scores->count()) cfg.v_max = base.v_max;
        if (!o.opt_ratio->count()) cfg.train_ratio = base.train_ratio;
        if (!o.opt_seed->count()) cfg.seed = base.seed;
        if (!o.opt_model->count()) cfg.model = base.model;
        if (!o.opt_epochs->count()) cfg.epochs = base.epochs;
        if (!o.opt_batch->count()) cfg.batch_size = base.batch_size;
        if (!o.opt_lr->count()) cfg.learning_rate = base.learning_rate;
        if (!o.opt_embed->count()) cfg.embed_dim = base.embed_dim;
        if (!o.opt_dropout->count()) cfg.dropout = base.dropout;
        if (!o.opt_trunk->count()) cfg.regression_trunk = base.regression_trunk;
        if (!o.opt_btheta->count()) cfg.binary_theta = base.binary_theta;
        if (!o.opt_n->count()) cfg.n_values = base.n_values;
        if (!o.opt_theta->count()) cfg.theta_values = base.theta_values;
        if (!o.opt_beta->count()) cfg.beta_values = base.beta_values;
        if (!o.opt_family->count()) cfg.family = base.family;
        if (!o.opt_out->count()) cfg.out_dir = base.out_dir;
    }
    if (o.opt_scores->count()) {
        const auto colon = o.scores.find(':');
        if (colon == std::string::npos || o.scores.substr(0, colon) != "1")
            throw std::runtime_error("--scores must look like 1:V");
        cfg.v_max = std::stoi(o.scores.substr(colon + 1));
    }
    if (o.opt_n->count()) cfg.n_values = parse_int_list(o.n_list);
    if (o.opt_theta->count()) cfg.theta_values = parse_int_list(o.theta_list);
    if (o.opt_beta->count()) cfg.beta_values = parse_double_list(o.beta_list);
    return cfg;
}

struct IngestResult {
    DatasetIndex index;
    SplitDataset split;
};

IngestResult ingest(const RunConfig& cfg, bool verbose) {
    if (cfg.data_path.empty()) throw std::runtime_error("--data is required");
    auto records = load_ratings(cfg.data_path, cfg.file_format(), cfg.v_max);
    if (records.empty()) throw std::runtime_error("empty dataset");
    std::size_t dups = 0;
    auto unique = drop_duplicates(records, &dups);
    if (dups > 0)
        std::cerr << "warning: " << dups << " duplicate (user, item) votes, kept last\n";

    IngestResult res;
    res.index = build_index(unique, cfg.v_max);
    res.split = split_dataset(unique, res.index, cfg.train_ratio, cfg.seed);

    fs::create_directories(cfg.out_dir);
    write_run_config(cfg.out_dir + "/config", cfg);
    write_index_csv(cfg.out_dir + "/index.csv", res.index);
    write_split_csv(cfg.out_dir + "/split.csv", res.split);

    if (verbose) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.2f", sparsity(res.index));
        std::cout << res.index.num_users << " users, " << res.index.num_items
                  << " items, " << res.index.num_ratings << " ratings (raw "
                  << records.size() << "), sparsity " << buf << "%\n";
        std::cout << "train " << res.split.train.size() << ", test "
                  << res.split.test.size() << "\n";
    }
    return res;
}

IngestResult load_or_ingest(const RunConfig& cfg) {
    const std::string split_path = cfg.out_dir + "/split.csv";
    const std::string index_path = cfg.out_dir + "/index.csv";
    if (fs::exists(split_path) && fs::exists(index_path) && cfg.data_path.empty()) {
        IngestResult res;
        res.index = read_index_csv(index_path);
        res.split = read_split_csv(split_path);
        return res;
    }
    return ingest(cfg, false);
}

int cmd_ingest(const CliOptions& o) {
    ingest(resolve_config(o), true);
    return 0;
}

int cmd_train(const CliOptions& o) {
    RunConfig cfg = resolve_config(o);
    IngestResult data = load_or_ingest(cfg);
    fs::create_directories(cfg.out_dir + "/checkpoints");
    fs::create_directories(cfg.out_dir + "/logs");
    write_run_config(cfg.out_dir + "/config", cfg);

    for (ModelKind kind : cfg.selected_models()) {
        auto model = build_model(kind, data.index.num_users, data.index.num_items,
                                 cfg.v_max, data.split.train, cfg.train_config());
        std::cout << "training " << kind_name(kind) << " ("
                  << model->param_count() << " parameters)\n";
        TrainHistory history = fit(*model, data.split, cfg.train_config());
        for (const EpochStats& st : history) {
            char buf[160];
            std::snprintf(buf, sizeof buf,
                          "  epoch %d: train_loss %.4f test_loss %.4f metric %.4f (%.1fs)",
                          st.epoch, st.train_loss, st.test_loss, st.test_metric,
                          st.seconds);
            std::cout << buf << "\n";
        }
        save_checkpoint(cfg.out_dir + "/checkpoints/" + kind_name(kind) + ".ckpt",
                        *model);
        write_train_log(cfg.out_dir + "/logs/" + kind_name(kind) + ".csv", history);
    }
    return 0;
}

int cmd_evaluate(const CliOptions& o) {
    RunConfig cfg = resolve_config(o);
    // Evaluation re-runs must see the run's own config unless overridden.
    if (o.config_file.empty() && fs::exists(cfg.out_dir + "/config")) {
        CliOptions merged = o;
        merged.config_file = cfg.out_dir + "/config";
        cfg = resolve_config(merged);
    }
    IngestResult data = load_or_ingest(cfg);

    std::vector<std::unique_ptr<ModelGraph>> keep_alive;
    ModelSet models;
    for (ModelKind kind : cfg.selected_models()) {
        const std::string path =
            cfg.out_dir + "/checkpoints/" + kind_name(kind) + ".ckpt";
        if (!fs::exists(path))
            throw std::runtime_error("missing checkpoint for model " + kind_name(kind) +
                                     ": " + path);
        keep_alive.push_back(load_checkpoint(path, data.split.train));
        ModelGraph& m = *keep_alive.back();
        Scorer scorer = make_model_scorer(m);
        switch (kind) {
            case ModelKind::classification:
                models.entries.emplace_back(RecommenderRule::proposed, scorer);
                models.entries.emplace_back(RecommenderRule::classification_baseline,
                                            scorer);
                break;
            case ModelKind::regression:
                models.entries.emplace_back(RecommenderRule::regression, scorer);
                break;
            case ModelKind::deepmf:
                models.entries.emplace_back(RecommenderRule::deepmf, scorer);
                break;
            case ModelKind::binary:
                models.entries.emplace_back(RecommenderRule::binary, scorer);
                break;
        }
    }

    MetricsReport report =
        run_experiment_grid(models, data.split, cfg.v_max, cfg.eval_config());
    fs::create_directories(cfg.out_dir + "/metrics");
    if (cfg.family == "all") {
        for (const char* fam : {"topn", "perrating", "pvc"})
            write_metrics_csv(cfg.out_dir + "/metrics/" + fam + ".csv", report, fam);
        write_metrics_csv(cfg.out_dir + "/metrics/combined.csv", report);
    } else {
        write_metrics_csv(cfg.out_dir + "/metrics/" + cfg.family + ".csv", report,
                          cfg.family);
    }
    std::cout << "wrote " << report.cells.size() << " metric cells to " << cfg.out_dir
              << "/metrics\n";
    return 0;
}

int cmd_recommend(const CliOptions& o, long raw_user, int n, int theta) {
    if (n < 1) throw std::runtime_error("N must be >= 1");
    RunConfig cfg = resolve_config(o);
    if (o.config_file.empty() && fs::exists(cfg.out_dir + "/config")) {
        CliOptions merged = o;
        merged.config_file = cfg.out_dir + "/config";
        cfg = resolve_config(merged);
    }
    IngestResult data = load_or_ingest(cfg);
    const auto uit = data.index.user_map.find(raw_user);
    if (uit == data.index.user_map.end())
        throw std::runtime_error("unknown user: " + std::to_string(raw_user));
    const int user = uit->second;

    const std::string path = cfg.out_dir + "/checkpoints/classification.ckpt";
    if (!fs::exists(path))
        throw std::runtime_error("missing checkpoint for model classification: " + path);
    auto model = load_checkpoint(path);

    const TestByUser test = group_test_by_user(data.split);
    std::vector<ScoredCandidate> cands;
    if (auto it = test.find(user); it != test.end())
        for (const auto& [item, rating] : it->second)
            cands.push_back(score_candidate(*model, user, item));
    const int eff_theta = theta > 0 ? theta : cfg.effective_binary_theta();
    auto recs = recommend_classification(std::move(cands), n, eff_theta);

    std::cout << "rank,item,rating,reliability\n";
    char buf[96];
    for (std::size_t r = 0; r < recs.size(); ++r) {
        std::snprintf(buf, sizeof buf, "%zu,%ld,%d,%.4f", r + 1,
                      data.index.item_raw[std::size_t(recs[r].item_idx)],
                      recs[r].rating, recs[r].reliability);
        std::cout << buf << "\n";
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"classification-based neural collaborative filtering"};
    app.require_subcommand(1);

    CliOptions ingest_o, train_o, eval_o, rec_o;
    auto* sub_ingest = app.add_subcommand("ingest", "load, index and split a rating file");
    add_common_options(sub_ingest, ingest_o);
    auto* sub_train = app.add_subcommand("train", "train model(s), write checkpoints");
    add_common_options(sub_train, train_o);
    auto* sub_eval = app.add_subcommand("evaluate", "run the experiment grid");
    add_common_options(sub_eval, eval_o);

    auto* sub_rec = app.add_subcommand("recommend", "reliability-filtered top-N for a user");
    add_common_options(sub_rec, rec_o);
    long rec_user = -1;
    int rec_n = 10, rec_theta = 0;
    sub_rec->add_option("--user", rec_user, "raw user id")->required();
    sub_rec->add_option("--topn", rec_n, "number of recommendations");
    sub_rec->add_option("--relevancy", rec_theta, "relevancy threshold");

    auto* sub_synth = app.add_subcommand("synth", "write a synthetic rating file");
    SynthConfig synth_cfg;
    std::string synth_out = "synth.data";
    std::string synth_scores = "1:5";
    sub_synth->add_option("--out", synth_out, "output file (u.data format)");
    sub_synth->add_option("--users", synth_cfg.num_users);
    sub_synth->add_option("--items", synth_cfg.num_items);
    sub_synth->add_option("--ratings", synth_cfg.num_ratings);
    sub_synth->add_option("--scores", synth_scores, "score range, e.g. 1:5");
    sub_synth->add_option("--seed", synth_cfg.seed);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sub_ingest->parsed()) return cmd_ingest(ingest_o);
        if (sub_train->parsed()) return cmd_train(train_o);
        if (sub_eval->parsed()) return cmd_evaluate(eval_o);
        if (sub_rec->parsed()) return cmd_recommend(rec_o, rec_user, rec_n, rec_theta);
        if (sub_synth->parsed()) {
            const auto colon = synth_scores.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("--scores must look like 1:V");
            synth_cfg.v_max = std::stoi(synth_scores.substr(colon + 1));
            write_ratings_file(synth_out, generate_synthetic(synth_cfg));
            std::cout << "wrote " << synth_cfg.num_ratings << " ratings to " << synth_out
                      << "\n";
            return 0;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
