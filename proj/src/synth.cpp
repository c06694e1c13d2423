#include "ncf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <unordered_set>

#include "ncf/rng.hpp"

namespace ncf {

std::vector<RatingRecord> generate_synthetic(const SynthConfig& cfg) {
    const int nu = cfg.num_users, ni = cfg.num_items;
    if (cfg.num_ratings < std::size_t(nu) || cfg.num_ratings < std::size_t(ni))
        throw std::invalid_argument("num_ratings too small to cover all users and items");
    if (cfg.num_ratings > std::size_t(nu) * std::size_t(ni))
        throw std::invalid_argument("num_ratings exceeds the matrix size");

    auto rng = make_stream(cfg.seed, Stream::data);
    std::normal_distribution<double> normal(0.0, 1.0);

    // Popularity / activity weights (log-normal, heavy tail like real data).
    std::vector<double> item_w(static_cast<std::size_t>(ni)), user_w(static_cast<std::size_t>(nu));
    for (double& w : item_w) w = std::exp(1.2 * normal(rng));
    for (double& w : user_w) w = std::exp(0.9 * normal(rng));
    std::discrete_distribution<int> pick_item(item_w.begin(), item_w.end());
    std::discrete_distribution<int> pick_user(user_w.begin(), user_w.end());

    // Latent structure the models are supposed to recover.
    std::vector<double> user_bias(static_cast<std::size_t>(nu)), item_bias(static_cast<std::size_t>(ni));
    for (double& b : user_bias) b = cfg.bias_sd * normal(rng);
    for (double& b : item_bias) b = cfg.bias_sd * normal(rng);
    std::vector<double> p(std::size_t(nu) * std::size_t(cfg.factor_dim));
    std::vector<double> q(std::size_t(ni) * std::size_t(cfg.factor_dim));
    for (double& v : p) v = cfg.factor_sd * normal(rng);
    for (double& v : q) v = cfg.factor_sd * normal(rng);

    // Polarizing items: 0 = additive, 1 = rated 1/v_max, 2 = rated 2/v_max-1.
    // Needs at least a 1..5 scale to leave room for the additive band.
    std::vector<int> item_mode(static_cast<std::size_t>(ni), 0);
    if (cfg.v_max >= 5) {
        std::uniform_real_distribution<double> u01(0.0, 1.0);
        for (int& mode : item_mode) {
            const double r = u01(rng);
            if (r < cfg.polarized_low_frac) mode = 1;
            else if (r < cfg.polarized_low_frac + cfg.polarized_mid_frac) mode = 2;
        }
    }

    std::vector<std::unordered_set<int>> rated{std::size_t(nu)};
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(cfg.num_ratings);
    auto add_pair = [&](int u, int i) {
        if (!rated[std::size_t(u)].insert(i).second) return false;
        pairs.emplace_back(u, i);
        return true;
    };

    // Coverage passes: every user rates one item, every item gets one vote.
    std::vector<bool> item_covered(static_cast<std::size_t>(ni), false);
    for (int u = 0; u < nu; ++u) {
        int i;
        do { i = pick_item(rng); } while (!add_pair(u, i));
        item_covered[std::size_t(i)] = true;
    }
    for (int i = 0; i < ni; ++i) {
        if (item_covered[std::size_t(i)]) continue;
        while (!add_pair(pick_user(rng), i)) {}
    }
    // Fill the remainder with popularity-weighted draws.
    while (pairs.size() < cfg.num_ratings) {
        add_pair(pick_user(rng), pick_item(rng));
    }

    std::vector<RatingRecord> records;
    records.reserve(pairs.size());
    long ts = 874724710;
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    // The additive band stays above the polarized modes so that ratings 1 and
    // 2 are exclusively bimodal outcomes.
    const int additive_floor = cfg.v_max >= 5 ? 3 : 1;
    for (const auto& [u, i] : pairs) {
        int rating;
        const int mode = item_mode[std::size_t(i)];
        if (mode == 1) {
            rating = u01(rng) < cfg.polarized_p_low ? 1 : cfg.v_max;
        } else if (mode == 2) {
            rating = u01(rng) < cfg.polarized_p_low ? 2 : cfg.v_max - 1;
        } else {
            double s =
                cfg.global_mean + user_bias[std::size_t(u)] + item_bias[std::size_t(i)];
            const double* pu = p.data() + std::size_t(u) * std::size_t(cfg.factor_dim);
            const double* qi = q.data() + std::size_t(i) * std::size_t(cfg.factor_dim);
            for (int k = 0; k < cfg.factor_dim; ++k) s += pu[k] * qi[k];
            s += cfg.noise_sd * normal(rng);
            rating = std::clamp(int(std::lround(s)), additive_floor, cfg.v_max);
        }
        records.push_back({long(u) + 1, long(i) + 1, rating, ts++});
    }
    return records;
}

void write_ratings_file(const std::string& path,
                        const std::vector<RatingRecord>& records) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write ratings file: " + path);
    for (const RatingRecord& r : records)
        out << r.user_raw << '\t' << r.item_raw << '\t' << r.rating << '\t'
            << (r.timestamp < 0 ? 0 : r.timestamp) << '\n';
}

}  // namespace ncf
