#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ncf/dataset.hpp"

namespace ncf {

struct SynthConfig {
    int num_users = 943;
    int num_items = 1682;
    std::size_t num_ratings = 100000;
    int v_max = 5;
    std::uint64_t seed = 7;
    // Latent-factor generative model: rating = clamp(round(mu + b_u + b_i +
    // p_u . q_i + noise)). Larger factor_sd means more learnable signal.
    int factor_dim = 6;
    double global_mean = 3.6;
    double bias_sd = 0.45;
    double factor_sd = 0.5;
    double noise_sd = 0.35;
    // A slice of the catalogue is polarizing: those items draw a bimodal
    // rating (love-it-or-hate-it) instead of the additive score, so low
    // ratings carry a categorical signal a conditional mean cannot express.
    double polarized_low_frac = 0.10;  // items rated 1 or v_max
    double polarized_mid_frac = 0.18;  // items rated 2 or v_max-1
    double polarized_p_low = 0.62;     // mass on the low mode
};

// Deterministic synthetic rating set for demos and tests. Every user and
// every item is guaranteed at least one rating and all (user, item) pairs are
// distinct, so the index statistics match the config exactly.
std::vector<RatingRecord> generate_synthetic(const SynthConfig& cfg);

// Writes records in MovieLens u.data format (tab-separated).
void write_ratings_file(const std::string& path,
                        const std::vector<RatingRecord>& records);

}  // namespace ncf
