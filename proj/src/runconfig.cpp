#include "ncf/runconfig.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace ncf {

namespace {

template <typename T>
std::string join(const std::vector<T>& v) {
    std::ostringstream ss;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) ss << ',';
        ss << v[i];
    }
    return ss.str();
}

std::vector<int> parse_int_list(const std::string& s) {
    std::vector<int> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) out.push_back(std::stoi(tok));
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::istringstream ss(s);
    std::string tok;
    while (std::getline(ss, tok, ',')) if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

}  // namespace

int RunConfig::effective_binary_theta() const {
    if (binary_theta > 0) return binary_theta;
    return v_max == 5 ? 4 : v_max - 3;
}

TrainConfig RunConfig::train_config() const {
    TrainConfig cfg;
    cfg.epochs = epochs;
    cfg.batch_size = batch_size;
    cfg.learning_rate = learning_rate;
    cfg.embed_dim = embed_dim;
    cfg.dropout = dropout;
    cfg.seed = seed;
    cfg.regression_trunk =
        regression_trunk == "mlp" ? RegressionTrunk::mlp : RegressionTrunk::dot;
    cfg.binary_theta = effective_binary_theta();
    return cfg;
}

EvalConfig RunConfig::eval_config() const {
    EvalConfig cfg = EvalConfig::defaults_for(v_max);
    if (!n_values.empty()) cfg.n_values = n_values;
    if (!theta_values.empty()) cfg.theta_values = theta_values;
    if (!beta_values.empty()) cfg.beta_values = beta_values;
    return cfg;
}

FileFormat RunConfig::file_format() const {
    if (format == "ml100k") return FileFormat::ml100k;
    if (format == "csv") return FileFormat::csv;
    throw std::invalid_argument("unknown format: " + format);
}

std::vector<ModelKind> RunConfig::selected_models() const {
    if (model == "all")
        return {ModelKind::classification, ModelKind::regression, ModelKind::binary,
                ModelKind::deepmf};
    return {kind_from_name(model)};
}

void write_run_config(const std::string& path, const RunConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write config: " + path);
    char buf[64];
    out << "data = " << cfg.data_path << "\n";
    out << "format = " << cfg.format << "\n";
    out << "scores = 1:" << cfg.v_max << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.train_ratio);
    out << "train_ratio = " << buf << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "model = " << cfg.model << "\n";
    out << "epochs = " << cfg.epochs << "\n";
    out << "batch = " << cfg.batch_size << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.learning_rate);
    out << "lr = " << buf << "\n";
    out << "embed = " << cfg.embed_dim << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", cfg.dropout);
    out << "dropout = " << buf << "\n";
    out << "regression_trunk = " << cfg.regression_trunk << "\n";
    out << "binary_theta = " << cfg.binary_theta << "\n";
    out << "n = " << join(cfg.n_values) << "\n";
    out << "theta = " << join(cfg.theta_values) << "\n";
    out << "beta = " << join(cfg.beta_values) << "\n";
    out << "family = " << cfg.family << "\n";
    out << "out = " << cfg.out_dir << "\n";
}

RunConfig read_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config: " + path);
    RunConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("config line " + std::to_string(lineno) +
                                     ": expected key = value");
        auto strip = [](std::string s) {
            const auto a = s.find_first_not_of(" \t");
            const auto b = s.find_last_not_of(" \t");
            return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
        };
        const std::string key = strip(line.substr(0, eq));
        const std::string val = strip(line.substr(eq + 1));
        if (key == "data") cfg.data_path = val;
        else if (key == "format") cfg.format = val;
        else if (key == "scores") {
            const auto colon = val.find(':');
            if (colon == std::string::npos || val.substr(0, colon) != "1")
                throw std::runtime_error("scores must look like 1:V");
            cfg.v_max = std::stoi(val.substr(colon + 1));
        } else if (key == "train_ratio") cfg.train_ratio = std::stod(val);
        else if (key == "seed") cfg.seed = std::stoull(val);
        else if (key == "model") cfg.model = val;
        else if (key == "epochs") cfg.epochs = std::stoi(val);
        else if (key == "batch") cfg.batch_size = std::stoi(val);
        else if (key == "lr") cfg.learning_rate = std::stod(val);
        else if (key == "embed") cfg.embed_dim = std::stoi(val);
        else if (key == "dropout") cfg.dropout = std::stod(val);
        else if (key == "regression_trunk") cfg.regression_trunk = val;
        else if (key == "binary_theta") cfg.binary_theta = std::stoi(val);
        else if (key == "n") cfg.n_values = parse_int_list(val);
        else if (key == "theta") cfg.theta_values = parse_int_list(val);
        else if (key == "beta") cfg.beta_values = parse_double_list(val);
        else if (key == "family") cfg.family = val;
        else if (key == "out") cfg.out_dir = val;
        else throw std::runtime_error("unknown config key: " + key);
    }
    return cfg;
}

}  // namespace ncf
