#pragma once

#include <vector>

#include "ncf/model.hpp"

namespace ncf {

// Length-V probability vector from the classification head.
struct ClassDistribution {
    std::vector<double> probs;

    int v_max() const { return int(probs.size()); }
    void validate() const;
};

// <discrete rating, reliability>: the argmax class and its probability mass.
struct PredictionPair {
    int rating = 0;
    double reliability = 0.0;
};

// Argmax ties break toward the lowest class index.
PredictionPair to_pair(const ClassDistribution& dist);

// Sum of r * p_r; the continuous score the classification model exposes to
// beta filtering and baseline-style ranking.
double expected_rating(const ClassDistribution& dist);

// Ranking input unified across the four architectures.
//   classification family: rating/reliability from to_pair, score = expected rating
//   regression/deepmf:     rating = rounded score, score = clamped prediction
//   binary:                score = relevance probability
struct ScoredCandidate {
    int item_idx = 0;
    int rating = 0;
    double reliability = 0.0;
    double score = 0.0;
};

// Proposed method: keep rating >= theta and reliability >= reliability_min,
// order by reliability desc, rating desc, item asc; truncate to N. May return
// fewer than N entries.
std::vector<ScoredCandidate> recommend_classification(std::vector<ScoredCandidate> cands,
                                                      int n, int theta,
                                                      double reliability_min = 0.5);

// How the proposed and baseline architectures rank candidates.
enum class RecommenderRule {
    proposed,                 // reliability-filtered classification
    classification_baseline,  // argmax filter, ranked by expected rating
    regression,
    deepmf,
    binary,
};

std::string rule_name(RecommenderRule r);

// Baseline rules: regression/deepmf keep score >= theta sorted by score;
// classification baseline keeps argmax rating >= theta sorted by expected
// rating; binary keeps p >= 0.5 sorted by p. Ties break by item asc.
std::vector<ScoredCandidate> recommend_baseline(std::vector<ScoredCandidate> cands,
                                                int n, int theta, RecommenderRule rule);

std::vector<ScoredCandidate> recommend(std::vector<ScoredCandidate> cands, int n,
                                       int theta, RecommenderRule rule,
                                       double reliability_min = 0.5);

// Scores one (user, item) pair with the model, filling the candidate fields
// the recommendation rules need.
ScoredCandidate score_candidate(ModelGraph& model, int user, int item);

}  // namespace ncf
