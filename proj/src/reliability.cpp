#include "ncf/reliability.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ncf {

void ClassDistribution::validate() const {
    if (probs.empty()) throw std::invalid_argument("empty class distribution");
    double sum = 0.0;
    for (double p : probs) {
        if (p < 0.0 || p > 1.0)
            throw std::invalid_argument("class probability outside [0, 1]");
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9)
        throw std::invalid_argument("class distribution does not sum to 1");
}

PredictionPair to_pair(const ClassDistribution& dist) {
    dist.validate();
    std::size_t best = 0;
    for (std::size_t j = 1; j < dist.probs.size(); ++j)
        if (dist.probs[j] > dist.probs[best]) best = j;
    return {int(best) + 1, dist.probs[best]};
}

double expected_rating(const ClassDistribution& dist) {
    dist.validate();
    double e = 0.0;
    for (std::size_t j = 0; j < dist.probs.size(); ++j)
        e += double(j + 1) * dist.probs[j];
    return e;
}

std::vector<ScoredCandidate> recommend_classification(std::vector<ScoredCandidate> cands,
                                                      int n, int theta,
                                                      double reliability_min) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    std::erase_if(cands, [&](const ScoredCandidate& c) {
        return c.rating < theta || c.reliability < reliability_min;
    });
    std::sort(cands.begin(), cands.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                  if (a.reliability != b.reliability) return a.reliability > b.reliability;
                  if (a.rating != b.rating) return a.rating > b.rating;
                  return a.item_idx < b.item_idx;
              });
    if (cands.size() > std::size_t(n)) cands.resize(std::size_t(n));
    return cands;
}

std::string rule_name(RecommenderRule r) {
    switch (r) {
        case RecommenderRule::proposed: return "proposed";
        case RecommenderRule::classification_baseline: return "classification";
        case RecommenderRule::regression: return "regression";
        case RecommenderRule::deepmf: return "deepmf";
        case RecommenderRule::binary: return "binary";
    }
    return "?";
}

std::vector<ScoredCandidate> recommend_baseline(std::vector<ScoredCandidate> cands,
                                                int n, int theta, RecommenderRule rule) {
    if (n < 1) throw std::invalid_argument("N must be >= 1");
    switch (rule) {
        case RecommenderRule::classification_baseline:
            std::erase_if(cands,
                          [&](const ScoredCandidate& c) { return c.rating < theta; });
            break;
        case RecommenderRule::regression:
        case RecommenderRule::deepmf:
            std::erase_if(cands,
                          [&](const ScoredCandidate& c) { return c.score < double(theta); });
            break;
        case RecommenderRule::binary:
            std::erase_if(cands, [](const ScoredCandidate& c) { return c.score < 0.5; });
            break;
        case RecommenderRule::proposed:
            throw std::invalid_argument("use recommend_classification for the proposed rule");
    }
    std::sort(cands.begin(), cands.end(),
              [](const ScoredCandidate& a, const ScoredCandidate& b) {
                  if (a.score != b.score) return a.score > b.score;
                  return a.item_idx < b.item_idx;
              });
    if (cands.size() > std::size_t(n)) cands.resize(std::size_t(n));
    return cands;
}

std::vector<ScoredCandidate> recommend(std::vector<ScoredCandidate> cands, int n,
                                       int theta, RecommenderRule rule,
                                       double reliability_min) {
    if (rule == RecommenderRule::proposed)
        return recommend_classification(std::move(cands), n, theta, reliability_min);
    return recommend_baseline(std::move(cands), n, theta, rule);
}

ScoredCandidate score_candidate(ModelGraph& model, int user, int item) {
    ScoredCandidate c;
    c.item_idx = item;
    switch (model.kind) {
        case ModelKind::classification: {
            ClassDistribution dist{model.predict_dist(user, item)};
            const PredictionPair pair = to_pair(dist);
            c.rating = pair.rating;
            c.reliability = pair.reliability;
            c.score = expected_rating(dist);
            break;
        }
        case ModelKind::regression:
        case ModelKind::deepmf: {
            c.score = model.predict_scalar(user, item);
            c.rating = std::clamp(int(std::floor(c.score + 0.5)), 1, model.v_max);
            break;
        }
        case ModelKind::binary: {
            c.score = model.predict_scalar(user, item);
            c.rating = c.score >= 0.5 ? 1 : 0;  // relevant / not relevant
            break;
        }
    }
    return c;
}

}  // namespace ncf
