#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace ncf {

struct RatingRecord {
    long user_raw = 0;
    long item_raw = 0;
    int rating = 0;
    long timestamp = -1;  // ignored by the models
};

enum class FileFormat { ml100k, csv };  // tab-separated / comma-separated

// Reads all records; any malformed line or out-of-range rating aborts the
// load with the offending line number (fail-fast).
std::vector<RatingRecord> load_ratings(const std::string& path, FileFormat fmt,
                                       int v_max);

// Keeps the last rating per (user, item) pair; record order follows the
// pair's first appearance. Increments *dup_count per dropped re-vote.
std::vector<RatingRecord> drop_duplicates(std::span<const RatingRecord> records,
                                          std::size_t* dup_count = nullptr);

struct DatasetIndex {
    std::unordered_map<long, int> user_map, item_map;
    std::vector<long> user_raw, item_raw;  // inverse lookup
    int num_users = 0;
    int num_items = 0;
    int v_max = 0;
    std::size_t num_ratings = 0;
};

// Dense contiguous indices assigned in order of first appearance.
DatasetIndex build_index(std::span<const RatingRecord> records, int v_max);

// 100 * (1 - num_ratings / (num_users * num_items)).
double sparsity(const DatasetIndex& index);

struct Interaction {
    int user = 0;
    int item = 0;
    int rating = 0;
};

struct SplitDataset {
    std::vector<Interaction> train, test;
    std::uint64_t split_seed = 0;
    double train_ratio = 0.8;
};

// Seeded uniform random holdout. Train size = floor(ratio * n), then
// adjusted so both partitions keep at least one record (n >= 2).
SplitDataset split_dataset(std::span<const RatingRecord> records,
                           const DatasetIndex& index, double train_ratio,
                           std::uint64_t seed);

std::vector<double> one_hot(int rating, int v_max);
bool binarize(int rating, int theta);

// Canonical split dump: user_idx,item_idx,rating,partition.
void write_split_csv(const std::string& path, const SplitDataset& split);
SplitDataset read_split_csv(const std::string& path);

// Raw-id <-> dense-index dump: kind,raw_id,index (kind in {user,item}),
// header line with num_users,num_items,v_max,num_ratings.
void write_index_csv(const std::string& path, const DatasetIndex& index);
DatasetIndex read_index_csv(const std::string& path);

}  // namespace ncf
