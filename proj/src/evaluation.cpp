#include "ncf/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace ncf {

void EvalConfig::validate(int v_max) const {
    if (n_values.empty() || theta_values.empty() || beta_values.empty())
        throw std::invalid_argument("evaluation grid axes must be non-empty");
    for (int t : theta_values)
        if (t < 1 || t > v_max)
            throw std::invalid_argument("relevancy threshold outside score range");
    for (double b : beta_values)
        if (b < 1.0 || b > double(v_max))
            throw std::invalid_argument("beta threshold outside [1, V]");
    for (int n : n_values)
        if (n < 1) throw std::invalid_argument("N values must be >= 1");
}

EvalConfig EvalConfig::defaults_for(int v_max) {
    EvalConfig cfg;
    if (v_max != 5) {
        cfg.theta_values = {v_max - 3, v_max - 2, v_max - 1};
        cfg.beta_values.clear();
        for (int k = 0; k < 5; ++k)
            cfg.beta_values.push_back(double(v_max - 1) + 0.2 * double(k));
    }
    return cfg;
}

TestByUser group_test_by_user(const SplitDataset& split) {
    TestByUser out;
    for (const Interaction& it : split.test)
        out[it.user].emplace_back(it.item, it.rating);
    return out;
}

Scorer make_model_scorer(ModelGraph& model) {
    return [&model](int user, int item) { return score_candidate(model, user, item); };
}

namespace {

std::vector<ScoredCandidate> score_all(const Scorer& scorer, int user,
                                       const std::vector<std::pair<int, int>>& items) {
    std::vector<ScoredCandidate> cands;
    cands.reserve(items.size());
    for (const auto& [item, rating] : items) cands.push_back(scorer(user, item));
    return cands;
}

long count_hits(const std::vector<ScoredCandidate>& recs,
                const std::vector<std::pair<int, int>>& truth, int theta) {
    long hits = 0;
    for (const ScoredCandidate& r : recs)
        for (const auto& [item, rating] : truth)
            if (item == r.item_idx && rating >= theta) {
                ++hits;
                break;
            }
    return hits;
}

}  // namespace

TopNResult evaluate_topn(const Scorer& scorer, RecommenderRule rule,
                         const TestByUser& test, int n, int theta,
                         double reliability_min) {
    TopNResult res;
    double prec_sum = 0.0, rec_sum = 0.0;
    for (const auto& [user, items] : test) {
        auto recs = recommend(score_all(scorer, user, items), n, theta, rule,
                              reliability_min);
        const long hits = count_hits(recs, items, theta);
        if (!recs.empty()) {
            prec_sum += double(hits) / double(recs.size());
            ++res.precision_users;
        }
        long relevant = 0;
        for (const auto& [item, rating] : items)
            if (rating >= theta) ++relevant;
        if (relevant > 0) {
            rec_sum += double(hits) / double(relevant);
            ++res.recall_users;
        }
    }
    if (res.precision_users > 0) res.precision = prec_sum / double(res.precision_users);
    if (res.recall_users > 0) res.recall = rec_sum / double(res.recall_users);
    return res;
}

PerRatingResult evaluate_per_rating(const Scorer& scorer, RecommenderRule rule,
                                    const SplitDataset& split, int r) {
    if (rule == RecommenderRule::binary)
        throw std::invalid_argument("unsupported for per-rating evaluation");
    PerRatingResult res;
    long correct = 0;
    for (const Interaction& it : split.test) {
        const ScoredCandidate c = scorer(it.user, it.item);
        if (c.rating == r) {
            ++res.denominator;
            if (it.rating == r) ++correct;
        }
    }
    if (res.denominator > 0)
        res.precision = double(correct) / double(res.denominator);
    return res;
}

PvcResult evaluate_precision_vs_coverage(const Scorer& scorer, RecommenderRule rule,
                                         const TestByUser& test, int n, int theta,
                                         double beta, double reliability_min) {
    PvcResult res;
    double prec_sum = 0.0;
    long prec_users = 0;
    for (const auto& [user, items] : test) {
        auto cands = score_all(scorer, user, items);
        std::erase_if(cands,
                      [&](const ScoredCandidate& c) { return c.score < beta; });
        auto recs = recommend(std::move(cands), n, theta, rule, reliability_min);
        res.issued += long(recs.size());
        if (!recs.empty()) {
            prec_sum += double(count_hits(recs, items, theta)) / double(recs.size());
            ++prec_users;
        }
        ++res.users;
    }
    if (prec_users > 0) res.precision = prec_sum / double(prec_users);
    if (res.users > 0)
        res.coverage = double(res.issued) / (double(n) * double(res.users));
    return res;
}

MetricsReport run_experiment_grid(const ModelSet& models, const SplitDataset& split,
                                  int v_max, const EvalConfig& cfg) {
    cfg.validate(v_max);
    MetricsReport report;
    const TestByUser test = group_test_by_user(split);
    const int pvc_n = cfg.n_values.empty() ? 10 : cfg.n_values.back();

    for (const auto& [rule, scorer] : models.entries) {
        const std::string model = rule_name(rule);

        for (int n : cfg.n_values)
            for (int theta : cfg.theta_values) {
                const TopNResult r =
                    evaluate_topn(scorer, rule, test, n, theta, cfg.reliability_min);
                report.cells.push_back({"topn", model, n, theta, std::nullopt,
                                        std::nullopt, "precision", r.precision,
                                        r.precision_users});
                report.cells.push_back({"topn", model, n, theta, std::nullopt,
                                        std::nullopt, "recall", r.recall,
                                        r.recall_users});
            }

        if (rule != RecommenderRule::binary &&
            rule != RecommenderRule::classification_baseline) {
            for (int r = 1; r <= v_max; ++r) {
                const PerRatingResult pr = evaluate_per_rating(scorer, rule, split, r);
                report.cells.push_back({"perrating", model, std::nullopt, std::nullopt,
                                        std::nullopt, r, "precision", pr.precision,
                                        pr.denominator});
            }
        }

        for (int theta : cfg.theta_values)
            for (double beta : cfg.beta_values) {
                const PvcResult pv = evaluate_precision_vs_coverage(
                    scorer, rule, test, pvc_n, theta, beta, cfg.reliability_min);
                report.cells.push_back({"pvc", model, pvc_n, theta, beta, std::nullopt,
                                        "precision", pv.precision, pv.issued});
                report.cells.push_back({"pvc", model, pvc_n, theta, beta, std::nullopt,
                                        "coverage", pv.coverage, pv.users});
            }
    }
    return report;
}

void write_metrics_csv(const std::string& path, const MetricsReport& report,
                       const std::string& family_filter) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write metrics csv: " + path);
    out << "family,model,N,theta,beta,rating,value_kind,value,denominator\n";
    char buf[64];
    for (const MetricCell& c : report.cells) {
        if (!family_filter.empty() && c.family != family_filter) continue;
        out << c.family << ',' << c.model << ',';
        if (c.n) out << *c.n;
        out << ',';
        if (c.theta) out << *c.theta;
        out << ',';
        if (c.beta) {
            std::snprintf(buf, sizeof buf, "%g", *c.beta);
            out << buf;
        }
        out << ',';
        if (c.rating) out << *c.rating;
        out << ',' << c.value_kind << ',';
        if (c.value) {
            std::snprintf(buf, sizeof buf, "%.17g", *c.value);
            out << buf;
        }
        out << ',' << c.denominator << '\n';
    }
}

}  // namespace ncf
