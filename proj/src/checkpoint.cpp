#include "ncf/checkpoint.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace ncf {

namespace {
constexpr const char* kMagic = "ncf-checkpoint v1";

std::string trunk_name(RegressionTrunk t) {
    return t == RegressionTrunk::dot ? "dot" : "mlp";
}

std::string join_ints(const std::vector<int>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(v[i]);
    }
    return s;
}

std::vector<int> parse_ints(const std::string& s) {
    std::vector<int> out;
    std::istringstream ss(s);
    int v;
    while (ss >> v) out.push_back(v);
    return out;
}

}  // namespace

void save_checkpoint(const std::string& path, ModelGraph& model) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << kMagic << "\n";
    out << "kind " << kind_name(model.kind) << "\n";
    out << "num_users " << model.num_users << "\n";
    out << "num_items " << model.num_items << "\n";
    out << "v_max " << model.v_max << "\n";
    out << "embed_dim " << model.cfg.embed_dim << "\n";
    out << "hidden " << join_ints(model.cfg.hidden) << "\n";
    out << "deepmf_hidden " << join_ints(model.cfg.deepmf_hidden) << "\n";
    out << "dropout " << model.cfg.dropout << "\n";
    out << "learning_rate " << model.cfg.learning_rate << "\n";
    out << "seed " << model.cfg.seed << "\n";
    out << "regression_trunk " << trunk_name(model.cfg.regression_trunk) << "\n";
    out << "binary_theta " << model.cfg.binary_theta << "\n";

    char buf[40];
    for (auto& [name, tensor] : model.named_tensors()) {
        out << "tensor " << name << ' ' << tensor->rows << ' ' << tensor->cols << "\n";
        for (std::size_t i = 0; i < tensor->rows; ++i) {
            const double* row = tensor->row(i);
            for (std::size_t j = 0; j < tensor->cols; ++j) {
                std::snprintf(buf, sizeof buf, "%a", row[j]);
                out << buf << (j + 1 == tensor->cols ? '\n' : ' ');
            }
        }
    }
}

std::unique_ptr<ModelGraph> load_checkpoint(const std::string& path,
                                            std::span<const Interaction> train) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string line;
    std::getline(in, line);
    if (line != kMagic) throw std::runtime_error("not a checkpoint file: " + path);

    ModelKind kind = ModelKind::classification;
    int num_users = 0, num_items = 0, v_max = 0;
    TrainConfig cfg;
    while (in.peek() != EOF && std::getline(in, line)) {
        std::istringstream ss(line);
        std::string key;
        ss >> key;
        if (key == "tensor") {
            // push the line back logic: handle below with a saved header
            break;
        }
        std::string rest;
        std::getline(ss, rest);
        if (!rest.empty() && rest.front() == ' ') rest.erase(0, 1);
        if (key == "kind") kind = kind_from_name(rest);
        else if (key == "num_users") num_users = std::stoi(rest);
        else if (key == "num_items") num_items = std::stoi(rest);
        else if (key == "v_max") v_max = std::stoi(rest);
        else if (key == "embed_dim") cfg.embed_dim = std::stoi(rest);
        else if (key == "hidden") cfg.hidden = parse_ints(rest);
        else if (key == "deepmf_hidden") cfg.deepmf_hidden = parse_ints(rest);
        else if (key == "dropout") cfg.dropout = std::stod(rest);
        else if (key == "learning_rate") cfg.learning_rate = std::stod(rest);
        else if (key == "seed") cfg.seed = std::stoull(rest);
        else if (key == "regression_trunk")
            cfg.regression_trunk = rest == "mlp" ? RegressionTrunk::mlp : RegressionTrunk::dot;
        else if (key == "binary_theta") cfg.binary_theta = std::stoi(rest);
    }

    if (kind == ModelKind::deepmf && train.empty())
        throw std::runtime_error("deepmf checkpoint needs the train split to rebuild");
    auto model = build_model(kind, num_users, num_items, v_max, train, cfg);

    // `line` currently holds the first tensor header.
    auto tensors = model->named_tensors();
    do {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::string tag, name;
        std::size_t rows, cols;
        ss >> tag >> name >> rows >> cols;
        if (tag != "tensor") throw std::runtime_error("bad checkpoint block: " + line);
        Matrix* target = nullptr;
        for (auto& [tname, tensor] : tensors)
            if (tname == name) target = tensor;
        if (!target) throw std::runtime_error("unknown tensor in checkpoint: " + name);
        if (target->rows != rows || target->cols != cols)
            throw std::runtime_error("tensor shape mismatch for " + name);
        for (std::size_t i = 0; i < rows; ++i) {
            std::string row_line;
            if (!std::getline(in, row_line))
                throw std::runtime_error("truncated checkpoint tensor: " + name);
            const char* p = row_line.c_str();
            char* end = nullptr;
            for (std::size_t j = 0; j < cols; ++j) {
                target->at(i, j) = std::strtod(p, &end);
                if (p == end) throw std::runtime_error("bad value in tensor " + name);
                p = end;
            }
        }
    } while (std::getline(in, line));

    return model;
}

}  // namespace ncf
