#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ncf/dataset.hpp"
#include "ncf/reliability.hpp"

namespace ncf {

struct EvalConfig {
    std::vector<int> n_values = {2, 4, 6, 8, 10};
    std::vector<int> theta_values = {3, 4, 5};
    std::vector<double> beta_values = {4.0, 4.2, 4.4, 4.6, 4.8};
    std::vector<int> per_rating_n = {2, 6, 10};
    double reliability_min = 0.5;

    void validate(int v_max) const;
    // {3,4,5} for 1-5 scales, {v-3, v-2, v-1} otherwise (e.g. {7,8,9} on 1-10).
    static EvalConfig defaults_for(int v_max);
};

// Test-partition interactions grouped per user; the candidate pool for all
// recommendation-based metrics.
using TestByUser = std::map<int, std::vector<std::pair<int, int>>>;  // user -> (item, rating)

TestByUser group_test_by_user(const SplitDataset& split);

using Scorer = std::function<ScoredCandidate(int user, int item)>;

Scorer make_model_scorer(ModelGraph& model);

struct TopNResult {
    std::optional<double> precision;  // absent when no user issued a recommendation
    std::optional<double> recall;     // absent when no user has a relevant test item
    long precision_users = 0;
    long recall_users = 0;
};

// Macro-averaged precision/recall@N against the user's held-out votes.
TopNResult evaluate_topn(const Scorer& scorer, RecommenderRule rule,
                         const TestByUser& test, int n, int theta,
                         double reliability_min = 0.5);

struct PerRatingResult {
    std::optional<double> precision;  // absent when the model never predicts r
    long denominator = 0;
};

// Confusion-matrix precision of predicting rating r over all test
// interactions. Not defined for the binary model.
PerRatingResult evaluate_per_rating(const Scorer& scorer, RecommenderRule rule,
                                    const SplitDataset& split, int r);

struct PvcResult {
    std::optional<double> precision;
    double coverage = 0.0;
    long issued = 0;
    long users = 0;
};

// Candidates with continuous score >= beta feed the rule's top-N
// recommendation; coverage = issued / (N * users with >= 1 test item).
PvcResult evaluate_precision_vs_coverage(const Scorer& scorer, RecommenderRule rule,
                                         const TestByUser& test, int n, int theta,
                                         double beta, double reliability_min = 0.5);

struct MetricCell {
    std::string family;  // topn | perrating | pvc
    std::string model;
    std::optional<int> n;
    std::optional<int> theta;
    std::optional<double> beta;
    std::optional<int> rating;
    std::string value_kind;  // precision | recall | coverage
    std::optional<double> value;  // absent cell <=> zero denominator
    long denominator = 0;
};

struct MetricsReport {
    std::vector<MetricCell> cells;
};

struct ModelSet {
    std::vector<std::pair<RecommenderRule, Scorer>> entries;
};

// Fills every (N, theta, model) precision/recall cell, the per-rating table,
// and the beta curve of the experiment grid.
MetricsReport run_experiment_grid(const ModelSet& models, const SplitDataset& split,
                                  int v_max, const EvalConfig& cfg);

// family,model,N,theta,beta,rating,value_kind,value,denominator. Fields that
// do not apply stay empty; absent values leave the value column empty.
void write_metrics_csv(const std::string& path, const MetricsReport& report,
                       const std::string& family_filter = "");

}  // namespace ncf
