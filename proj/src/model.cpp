#include "ncf/model.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>

#include "ncf/losses.hpp"
#include "ncf/rng.hpp"

namespace ncf {

std::string kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::classification: return "classification";
        case ModelKind::regression: return "regression";
        case ModelKind::binary: return "binary";
        case ModelKind::deepmf: return "deepmf";
    }
    return "?";
}

ModelKind kind_from_name(const std::string& name) {
    if (name == "classification") return ModelKind::classification;
    if (name == "regression") return ModelKind::regression;
    if (name == "binary") return ModelKind::binary;
    if (name == "deepmf") return ModelKind::deepmf;
    throw std::invalid_argument("unknown model kind: " + name);
}

void TrainConfig::validate() const {
    if (epochs < 0) throw std::invalid_argument("epochs must be >= 0");
    if (batch_size <= 0) throw std::invalid_argument("batch_size must be positive");
    if (learning_rate <= 0.0) throw std::invalid_argument("learning_rate must be positive");
    if (embed_dim <= 0) throw std::invalid_argument("embed_dim must be positive");
    if (dropout < 0.0 || dropout >= 1.0)
        throw std::invalid_argument("dropout must be in [0, 1)");
    for (int h : hidden)
        if (h <= 0) throw std::invalid_argument("hidden sizes must be positive");
    for (int h : deepmf_hidden)
        if (h <= 0) throw std::invalid_argument("deepmf hidden sizes must be positive");
}

std::size_t ModelGraph::param_count() {
    std::size_t n = 0;
    for (const ParamRef& p : params()) n += p.n;
    return n;
}

namespace {

void check_pair_range(int user, int item, int num_users, int num_items) {
    if (user < 0 || user >= num_users)
        throw std::out_of_range("predict: user index out of range");
    if (item < 0 || item >= num_items)
        throw std::out_of_range("predict: item index out of range");
}

}  // namespace

std::vector<double> ModelGraph::predict_dist(int user, int item) {
    if (kind != ModelKind::classification)
        throw std::logic_error("predict_dist requires a classification model");
    check_pair_range(user, item, num_users, num_items);
    const int u[1] = {user}, i[1] = {item};
    Matrix out = forward(std::span<const int>(u, 1), std::span<const int>(i, 1), false);
    return std::vector<double>(out.row(0), out.row(0) + out.cols);
}

double ModelGraph::predict_scalar(int user, int item) {
    if (kind == ModelKind::classification)
        throw std::logic_error("predict_scalar: use predict_dist for classification");
    check_pair_range(user, item, num_users, num_items);
    const int u[1] = {user}, i[1] = {item};
    Matrix out = forward(std::span<const int>(u, 1), std::span<const int>(i, 1), false);
    double v = out.data[0];
    if (kind == ModelKind::regression || kind == ModelKind::deepmf)
        v = std::clamp(v, 1.0, double(v_max));
    return v;
}

namespace {

// Shared embedding + MLP graph for the classification, binary, and regression
// architectures. Merge is concatenate or dot per the architecture table.
class EmbeddingMlpModel final : public ModelGraph {
  public:
    EmbeddingTable user_emb, item_emb;
    bool merge_dot = false;
    std::vector<DenseLayer> layers;
    std::vector<DropoutLayer> dropouts;  // one per hidden layer

    // forward caches for backward
    std::vector<int> cached_users, cached_items;
    Matrix cached_uvec, cached_ivec;

    EmbeddingMlpModel(ModelKind k, int nu, int ni, int vmax, bool dot,
                      int head_width, Activation head_act, const TrainConfig& c) {
        kind = k;
        num_users = nu;
        num_items = ni;
        v_max = vmax;
        cfg = c;
        merge_dot = dot;
        adam.lr = c.learning_rate;

        const std::size_t f = std::size_t(c.embed_dim);
        user_emb = EmbeddingTable(std::size_t(nu) + 1, f);
        item_emb = EmbeddingTable(std::size_t(ni) + 1, f);

        std::size_t in = merge_dot ? 1 : 2 * f;
        for (int h : c.hidden) {
            layers.emplace_back(in, std::size_t(h), Activation::relu);
            dropouts.emplace_back(c.dropout);
            in = std::size_t(h);
        }
        layers.emplace_back(in, std::size_t(head_width), head_act);

        auto init_rng = make_stream(c.seed, Stream::init);
        user_emb.init_uniform(init_rng);
        item_emb.init_uniform(init_rng);
        for (DenseLayer& l : layers) l.init_uniform(init_rng);
        dropout_rng = make_stream(c.seed, Stream::dropout);
    }

    Matrix forward(std::span<const int> users, std::span<const int> items,
                   bool train) override {
        cached_users.assign(users.begin(), users.end());
        cached_items.assign(items.begin(), items.end());
        cached_uvec = user_emb.forward(users);
        cached_ivec = item_emb.forward(items);
        Matrix x = merge_dot ? dot_merge(cached_uvec, cached_ivec)
                             : concat_cols(cached_uvec, cached_ivec);
        for (std::size_t li = 0; li + 1 < layers.size(); ++li) {
            x = layers[li].forward(x);
            x = dropouts[li].forward(x, train, dropout_rng);
        }
        return layers.back().forward(x);
    }

    void backward(const Matrix& out_grad) override {
        Matrix g = layers.back().backward(out_grad);
        for (std::size_t li = layers.size() - 1; li-- > 0;) {
            g = dropouts[li].backward(g);
            g = layers[li].backward(g);
        }
        Matrix gu, gi;
        if (merge_dot)
            dot_merge_backward(g, cached_uvec, cached_ivec, gu, gi);
        else
            split_cols(g, cached_uvec.cols, gu, gi);
        user_emb.backward(cached_users, gu);
        item_emb.backward(cached_items, gi);
    }

    std::vector<ParamRef> params() override {
        std::vector<ParamRef> out;
        auto add = [&out](Matrix& w, Matrix& g, Matrix& m, Matrix& v) {
            out.push_back({w.data.data(), g.data.data(), m.data.data(), v.data.data(),
                           w.size()});
        };
        add(user_emb.weights, user_emb.grad, user_emb.adam_m, user_emb.adam_v);
        add(item_emb.weights, item_emb.grad, item_emb.adam_m, item_emb.adam_v);
        for (DenseLayer& l : layers) {
            add(l.W, l.dW, l.mW, l.vW);
            add(l.b, l.db, l.mb, l.vb);
        }
        return out;
    }

    std::vector<std::pair<std::string, Matrix*>> named_tensors() override {
        std::vector<std::pair<std::string, Matrix*>> out;
        out.emplace_back("user_embedding", &user_emb.weights);
        out.emplace_back("item_embedding", &item_emb.weights);
        for (std::size_t i = 0; i < layers.size(); ++i) {
            out.emplace_back("dense" + std::to_string(i) + ".W", &layers[i].W);
            out.emplace_back("dense" + std::to_string(i) + ".b", &layers[i].b);
        }
        return out;
    }
};

// Two MLP towers over raw rating rows/columns merged by a dot product.
class DeepMfModel final : public ModelGraph {
  public:
    Matrix user_rows;  // num_users x num_items, train ratings only
    Matrix item_cols;  // num_items x num_users
    std::vector<DenseLayer> user_tower, item_tower;
    Matrix cached_u, cached_v;

    DeepMfModel(int nu, int ni, int vmax, std::span<const Interaction> train,
                const TrainConfig& c) {
        kind = ModelKind::deepmf;
        num_users = nu;
        num_items = ni;
        v_max = vmax;
        cfg = c;
        adam.lr = c.learning_rate;

        user_rows = Matrix(std::size_t(nu), std::size_t(ni));
        item_cols = Matrix(std::size_t(ni), std::size_t(nu));
        for (const Interaction& it : train) {
            user_rows.at(std::size_t(it.user), std::size_t(it.item)) = double(it.rating);
            item_cols.at(std::size_t(it.item), std::size_t(it.user)) = double(it.rating);
        }

        auto build_tower = [&c](std::vector<DenseLayer>& tower, std::size_t in) {
            for (std::size_t hi = 0; hi < c.deepmf_hidden.size(); ++hi) {
                const bool last = hi + 1 == c.deepmf_hidden.size();
                tower.emplace_back(in, std::size_t(c.deepmf_hidden[hi]),
                                   last ? Activation::linear : Activation::relu);
                in = std::size_t(c.deepmf_hidden[hi]);
            }
            tower.front().input_grad_needed = false;
        };
        build_tower(user_tower, std::size_t(ni));
        build_tower(item_tower, std::size_t(nu));

        auto init_rng = make_stream(c.seed, Stream::init);
        for (DenseLayer& l : user_tower) l.init_uniform(init_rng);
        for (DenseLayer& l : item_tower) l.init_uniform(init_rng);
        dropout_rng = make_stream(c.seed, Stream::dropout);
    }

    Matrix forward(std::span<const int> users, std::span<const int> items,
                   bool /*train*/) override {
        Matrix ux(users.size(), user_rows.cols);
        for (std::size_t i = 0; i < users.size(); ++i) {
            if (users[i] < 0 || users[i] >= num_users)
                throw std::out_of_range("deepmf: user index out of range");
            const double* src = user_rows.row(std::size_t(users[i]));
            std::copy(src, src + user_rows.cols, ux.row(i));
        }
        Matrix ix(items.size(), item_cols.cols);
        for (std::size_t i = 0; i < items.size(); ++i) {
            if (items[i] < 0 || items[i] >= num_items)
                throw std::out_of_range("deepmf: item index out of range");
            const double* src = item_cols.row(std::size_t(items[i]));
            std::copy(src, src + item_cols.cols, ix.row(i));
        }
        Matrix u = ux, v = ix;
        for (DenseLayer& l : user_tower) u = l.forward(u);
        for (DenseLayer& l : item_tower) v = l.forward(v);
        cached_u = u;
        cached_v = v;
        return dot_merge(u, v);
    }

    void backward(const Matrix& out_grad) override {
        Matrix du, dv;
        dot_merge_backward(out_grad, cached_u, cached_v, du, dv);
        for (std::size_t li = user_tower.size(); li-- > 0;)
            du = user_tower[li].backward(du);
        for (std::size_t li = item_tower.size(); li-- > 0;)
            dv = item_tower[li].backward(dv);
    }

    std::vector<ParamRef> params() override {
        std::vector<ParamRef> out;
        for (auto* tower : {&user_tower, &item_tower})
            for (DenseLayer& l : *tower) {
                out.push_back({l.W.data.data(), l.dW.data.data(), l.mW.data.data(),
                               l.vW.data.data(), l.W.size()});
                out.push_back({l.b.data.data(), l.db.data.data(), l.mb.data.data(),
                               l.vb.data.data(), l.b.size()});
            }
        return out;
    }

    std::vector<std::pair<std::string, Matrix*>> named_tensors() override {
        std::vector<std::pair<std::string, Matrix*>> out;
        for (std::size_t i = 0; i < user_tower.size(); ++i) {
            out.emplace_back("user_tower" + std::to_string(i) + ".W", &user_tower[i].W);
            out.emplace_back("user_tower" + std::to_string(i) + ".b", &user_tower[i].b);
        }
        for (std::size_t i = 0; i < item_tower.size(); ++i) {
            out.emplace_back("item_tower" + std::to_string(i) + ".W", &item_tower[i].W);
            out.emplace_back("item_tower" + std::to_string(i) + ".b", &item_tower[i].b);
        }
        return out;
    }
};

}  // namespace

std::unique_ptr<ModelGraph> build_classification(int num_users, int num_items,
                                                 int v_max, const TrainConfig& cfg) {
    cfg.validate();
    return std::make_unique<EmbeddingMlpModel>(ModelKind::classification, num_users,
                                               num_items, v_max, false, v_max,
                                               Activation::softmax, cfg);
}

std::unique_ptr<ModelGraph> build_regression(int num_users, int num_items, int v_max,
                                             const TrainConfig& cfg) {
    cfg.validate();
    const bool dot = cfg.regression_trunk == RegressionTrunk::dot;
    return std::make_unique<EmbeddingMlpModel>(ModelKind::regression, num_users,
                                               num_items, v_max, dot, 1,
                                               Activation::linear, cfg);
}

std::unique_ptr<ModelGraph> build_binary(int num_users, int num_items, int v_max,
                                         int theta, const TrainConfig& cfg) {
    cfg.validate();
    if (theta < 1 || theta > v_max)
        throw std::invalid_argument("binary threshold outside score range");
    TrainConfig c = cfg;
    c.binary_theta = theta;
    return std::make_unique<EmbeddingMlpModel>(ModelKind::binary, num_users, num_items,
                                               v_max, false, 1, Activation::sigmoid, c);
}

std::unique_ptr<ModelGraph> build_deepmf(int num_users, int num_items, int v_max,
                                         std::span<const Interaction> train,
                                         const TrainConfig& cfg) {
    cfg.validate();
    return std::make_unique<DeepMfModel>(num_users, num_items, v_max, train, cfg);
}

std::unique_ptr<ModelGraph> build_model(ModelKind kind, int num_users, int num_items,
                                        int v_max, std::span<const Interaction> train,
                                        const TrainConfig& cfg) {
    switch (kind) {
        case ModelKind::classification:
            return build_classification(num_users, num_items, v_max, cfg);
        case ModelKind::regression:
            return build_regression(num_users, num_items, v_max, cfg);
        case ModelKind::binary:
            return build_binary(num_users, num_items, v_max, cfg.binary_theta, cfg);
        case ModelKind::deepmf:
            return build_deepmf(num_users, num_items, v_max, train, cfg);
    }
    throw std::logic_error("unreachable");
}

namespace {

LossResult batch_loss(ModelGraph& model, const Matrix& out,
                      std::span<const Interaction> batch) {
    switch (model.kind) {
        case ModelKind::classification: {
            Matrix targets(batch.size(), std::size_t(model.v_max));
            for (std::size_t i = 0; i < batch.size(); ++i)
                targets.at(i, std::size_t(batch[i].rating - 1)) = 1.0;
            return categorical_crossentropy(out, targets);
        }
        case ModelKind::binary: {
            Matrix targets(batch.size(), 1);
            for (std::size_t i = 0; i < batch.size(); ++i)
                targets.data[i] = binarize(batch[i].rating, model.cfg.binary_theta) ? 1.0 : 0.0;
            return binary_crossentropy(out, targets);
        }
        case ModelKind::regression:
        case ModelKind::deepmf: {
            Matrix targets(batch.size(), 1);
            for (std::size_t i = 0; i < batch.size(); ++i)
                targets.data[i] = double(batch[i].rating);
            return mse_loss(out, targets);
        }
    }
    throw std::logic_error("unreachable");
}

}  // namespace

double train_epoch(ModelGraph& model, std::span<const Interaction> train,
                   const TrainConfig& cfg, std::mt19937_64& shuffle_rng) {
    if (train.empty()) throw std::runtime_error("train_epoch: empty train data");

    std::vector<std::size_t> order(train.size());
    std::iota(order.begin(), order.end(), 0);
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), shuffle_rng);

    auto all_params = model.params();
    double total = 0.0;
    const std::size_t bs = std::size_t(cfg.batch_size);
    for (std::size_t start = 0; start < train.size(); start += bs) {
        const std::size_t end = std::min(start + bs, train.size());
        std::vector<Interaction> batch;
        std::vector<int> users, items;
        batch.reserve(end - start);
        for (std::size_t k = start; k < end; ++k) {
            batch.push_back(train[order[k]]);
            users.push_back(batch.back().user);
            items.push_back(batch.back().item);
        }
        Matrix out = model.forward(users, items, true);
        LossResult lr = batch_loss(model, out, batch);
        model.backward(lr.grad);
        adam_step(model.adam, all_params);
        total += lr.loss * double(batch.size());
    }
    return total / double(train.size());
}

std::pair<double, double> evaluate_loss(ModelGraph& model,
                                        std::span<const Interaction> data) {
    if (data.empty()) return {0.0, 0.0};
    const std::size_t bs = 1024;
    double total = 0.0, metric = 0.0;
    for (std::size_t start = 0; start < data.size(); start += bs) {
        const std::size_t end = std::min(start + bs, data.size());
        auto batch = data.subspan(start, end - start);
        std::vector<int> users, items;
        for (const Interaction& it : batch) {
            users.push_back(it.user);
            items.push_back(it.item);
        }
        Matrix out = model.forward(users, items, false);
        total += batch_loss(model, out, batch).loss * double(batch.size());
        for (std::size_t i = 0; i < batch.size(); ++i) {
            switch (model.kind) {
                case ModelKind::classification: {
                    const double* row = out.row(i);
                    std::size_t best = 0;
                    for (std::size_t j = 1; j < out.cols; ++j)
                        if (row[j] > row[best]) best = j;
                    if (int(best) + 1 == batch[i].rating) metric += 1.0;
                    break;
                }
                case ModelKind::binary: {
                    const bool pred = out.data[i] >= 0.5;
                    if (pred == binarize(batch[i].rating, model.cfg.binary_theta))
                        metric += 1.0;
                    break;
                }
                case ModelKind::regression:
                case ModelKind::deepmf: {
                    const double v = std::clamp(out.data[i], 1.0, double(model.v_max));
                    metric += std::abs(v - double(batch[i].rating));
                    break;
                }
            }
        }
    }
    return {total / double(data.size()), metric / double(data.size())};
}

TrainHistory fit(ModelGraph& model, const SplitDataset& split, const TrainConfig& cfg) {
    TrainHistory history;
    auto shuffle_rng = make_stream(cfg.seed, Stream::shuffle);
    for (int e = 0; e < cfg.epochs; ++e) {
        const auto t0 = std::chrono::steady_clock::now();
        EpochStats st;
        st.epoch = e + 1;
        st.train_loss = train_epoch(model, split.train, cfg, shuffle_rng);
        auto [test_loss, test_metric] = evaluate_loss(model, split.test);
        st.test_loss = test_loss;
        st.test_metric = test_metric;
        st.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                         .count();
        history.push_back(st);
    }
    return history;
}

void write_train_log(const std::string& path, const TrainHistory& history) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write training log: " + path);
    out << "epoch,train_loss,test_loss,test_metric,seconds\n";
    char buf[256];
    for (const EpochStats& st : history) {
        std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.3f\n", st.epoch,
                      st.train_loss, st.test_loss, st.test_metric, st.seconds);
        out << buf;
    }
}

}  // namespace ncf
