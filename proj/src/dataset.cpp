#include "ncf/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "ncf/rng.hpp"

namespace ncf {

namespace {

std::vector<std::string> split_fields(const std::string& line, char delim) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, delim)) out.push_back(field);
    return out;
}

bool parse_long(const std::string& s, long& out) {
    try {
        std::size_t pos = 0;
        out = std::stol(s, &pos);
        return pos == s.size();
    } catch (...) {
        return false;
    }
}

}  // namespace

std::vector<RatingRecord> load_ratings(const std::string& path, FileFormat fmt,
                                       int v_max) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open rating file: " + path);
    const char delim = fmt == FileFormat::ml100k ? '\t' : ',';

    std::vector<RatingRecord> records;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto fields = split_fields(line, delim);
        if (fields.size() < 3)
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": expected at least 3 fields");
        long rating_l = 0;
        if (!parse_long(fields[2], rating_l)) {
            // CSV files may carry a single header line; skip it only there.
            if (fmt == FileFormat::csv && lineno == 1 && records.empty()) continue;
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": non-integer rating '" + fields[2] + "'");
        }
        RatingRecord rec;
        if (!parse_long(fields[0], rec.user_raw) || !parse_long(fields[1], rec.item_raw))
            throw std::runtime_error("line " + std::to_string(lineno) +
                                     ": non-integer user/item id");
        if (rating_l < 1 || rating_l > v_max)
            throw std::runtime_error("line " + std::to_string(lineno) + ": rating " +
                                     std::to_string(rating_l) + " outside [1, " +
                                     std::to_string(v_max) + "]");
        rec.rating = int(rating_l);
        if (fields.size() > 3 && !fields[3].empty()) {
            long ts;
            if (parse_long(fields[3], ts)) rec.timestamp = ts;
        }
        records.push_back(rec);
    }
    return records;
}

std::vector<RatingRecord> drop_duplicates(std::span<const RatingRecord> records,
                                          std::size_t* dup_count) {
    std::vector<RatingRecord> out;
    out.reserve(records.size());
    std::unordered_map<long, std::unordered_map<long, std::size_t>> seen;
    std::size_t dups = 0;
    for (const RatingRecord& r : records) {
        auto& by_item = seen[r.user_raw];
        auto it = by_item.find(r.item_raw);
        if (it == by_item.end()) {
            by_item.emplace(r.item_raw, out.size());
            out.push_back(r);
        } else {
            out[it->second] = r;  // keep the last vote
            ++dups;
        }
    }
    if (dup_count) *dup_count = dups;
    return out;
}

DatasetIndex build_index(std::span<const RatingRecord> records, int v_max) {
    if (records.empty()) throw std::runtime_error("empty dataset");
    DatasetIndex idx;
    idx.v_max = v_max;
    idx.num_ratings = records.size();
    for (const RatingRecord& r : records) {
        if (idx.user_map.emplace(r.user_raw, int(idx.user_raw.size())).second)
            idx.user_raw.push_back(r.user_raw);
        if (idx.item_map.emplace(r.item_raw, int(idx.item_raw.size())).second)
            idx.item_raw.push_back(r.item_raw);
    }
    idx.num_users = int(idx.user_raw.size());
    idx.num_items = int(idx.item_raw.size());
    return idx;
}

double sparsity(const DatasetIndex& index) {
    if (index.num_users <= 0 || index.num_items <= 0)
        throw std::invalid_argument("sparsity: empty index");
    const double cells = double(index.num_users) * double(index.num_items);
    return 100.0 * (1.0 - double(index.num_ratings) / cells);
}

SplitDataset split_dataset(std::span<const RatingRecord> records,
                           const DatasetIndex& index, double train_ratio,
                           std::uint64_t seed) {
    if (train_ratio <= 0.0 || train_ratio >= 1.0)
        throw std::invalid_argument("train_ratio must be in (0, 1)");

    std::vector<std::size_t> order(records.size());
    std::iota(order.begin(), order.end(), 0);
    auto rng = make_stream(seed, Stream::data);
    std::shuffle(order.begin(), order.end(), rng);

    const std::size_t n = records.size();
    std::size_t n_train = std::size_t(std::floor(train_ratio * double(n)));
    if (n >= 2) {
        n_train = std::max<std::size_t>(1, std::min(n_train, n - 1));
    } else {
        n_train = n;
    }

    SplitDataset out;
    out.split_seed = seed;
    out.train_ratio = train_ratio;
    for (std::size_t k = 0; k < n; ++k) {
        const RatingRecord& r = records[order[k]];
        Interaction it{index.user_map.at(r.user_raw), index.item_map.at(r.item_raw),
                       r.rating};
        (k < n_train ? out.train : out.test).push_back(it);
    }
    return out;
}

std::vector<double> one_hot(int rating, int v_max) {
    if (rating < 1 || rating > v_max)
        throw std::out_of_range("one_hot: rating " + std::to_string(rating) +
                                " outside [1, " + std::to_string(v_max) + "]");
    std::vector<double> v(std::size_t(v_max), 0.0);
    v[std::size_t(rating - 1)] = 1.0;
    return v;
}

bool binarize(int rating, int theta) { return rating >= theta; }

void write_split_csv(const std::string& path, const SplitDataset& split) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write split dump: " + path);
    out << "user_idx,item_idx,rating,partition\n";
    for (const Interaction& it : split.train)
        out << it.user << ',' << it.item << ',' << it.rating << ",train\n";
    for (const Interaction& it : split.test)
        out << it.user << ',' << it.item << ',' << it.rating << ",test\n";
}

SplitDataset read_split_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open split dump: " + path);
    SplitDataset split;
    std::string line;
    std::getline(in, line);  // header
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        auto fields = split_fields(line, ',');
        if (fields.size() != 4)
            throw std::runtime_error("split dump line " + std::to_string(lineno) +
                                     ": expected 4 fields");
        Interaction it{std::stoi(fields[0]), std::stoi(fields[1]), std::stoi(fields[2])};
        if (fields[3] == "train")
            split.train.push_back(it);
        else if (fields[3] == "test")
            split.test.push_back(it);
        else
            throw std::runtime_error("split dump line " + std::to_string(lineno) +
                                     ": bad partition '" + fields[3] + "'");
    }
    return split;
}

void write_index_csv(const std::string& path, const DatasetIndex& index) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write index dump: " + path);
    out << "num_users=" << index.num_users << ",num_items=" << index.num_items
        << ",v_max=" << index.v_max << ",num_ratings=" << index.num_ratings << "\n";
    for (int i = 0; i < index.num_users; ++i)
        out << "user," << index.user_raw[std::size_t(i)] << ',' << i << "\n";
    for (int i = 0; i < index.num_items; ++i)
        out << "item," << index.item_raw[std::size_t(i)] << ',' << i << "\n";
}

DatasetIndex read_index_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open index dump: " + path);
    DatasetIndex idx;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("index dump is empty");
    for (const std::string& kv : split_fields(line, ',')) {
        auto eq = kv.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = kv.substr(0, eq);
        const long val = std::stol(kv.substr(eq + 1));
        if (key == "num_users") idx.num_users = int(val);
        else if (key == "num_items") idx.num_items = int(val);
        else if (key == "v_max") idx.v_max = int(val);
        else if (key == "num_ratings") idx.num_ratings = std::size_t(val);
    }
    idx.user_raw.resize(std::size_t(idx.num_users));
    idx.item_raw.resize(std::size_t(idx.num_items));
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        auto fields = split_fields(line, ',');
        if (fields.size() != 3) throw std::runtime_error("bad index dump line: " + line);
        const long raw = std::stol(fields[1]);
        const int dense = std::stoi(fields[2]);
        if (fields[0] == "user") {
            idx.user_map[raw] = dense;
            idx.user_raw[std::size_t(dense)] = raw;
        } else {
            idx.item_map[raw] = dense;
            idx.item_raw[std::size_t(dense)] = raw;
        }
    }
    return idx;
}

}  // namespace ncf
