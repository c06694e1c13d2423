#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncf/evaluation.hpp"
#include "ncf/model.hpp"

namespace ncf {

// Everything a run needs, serializable as flat `key = value` lines so a run
// directory always carries the exact config that produced it.
struct RunConfig {
    std::string data_path;
    std::string format = "ml100k";  // ml100k | csv
    int v_max = 5;
    double train_ratio = 0.8;
    std::uint64_t seed = 42;

    std::string model = "all";  // classification|regression|binary|deepmf|all
    int epochs = 15;
    int batch_size = 256;
    double learning_rate = 0.001;
    int embed_dim = 10;
    double dropout = 0.4;
    std::string regression_trunk = "dot";
    int binary_theta = 0;  // 0 = derive from v_max

    std::vector<int> n_values = {2, 4, 6, 8, 10};
    std::vector<int> theta_values;      // empty = defaults for v_max
    std::vector<double> beta_values;    // empty = defaults for v_max
    std::string family = "all";         // topn | perrating | pvc | all

    std::string out_dir = "run";

    int effective_binary_theta() const;
    TrainConfig train_config() const;
    EvalConfig eval_config() const;
    FileFormat file_format() const;
    std::vector<ModelKind> selected_models() const;
};

void write_run_config(const std::string& path, const RunConfig& cfg);
RunConfig read_run_config(const std::string& path);

}  // namespace ncf
