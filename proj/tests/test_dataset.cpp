#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "ncf/dataset.hpp"

using namespace ncf;

namespace {

struct TempFile {
    std::string path;
    explicit TempFile(const std::string& content, const std::string& name) {
        path = (std::filesystem::temp_directory_path() / name).string();
        std::ofstream out(path);
        out << content;
    }
    ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("load_ratings parses a handcrafted tab-separated file") {
    TempFile f("1\t7\t5\t100\n2\t7\t3\t200\n1\t9\t4\t300\n", "ncf_test_tsv.data");
    auto records = load_ratings(f.path, FileFormat::ml100k, 5);
    REQUIRE(records.size() == 3);
    CHECK(records[0].user_raw == 1);
    CHECK(records[0].item_raw == 7);
    CHECK(records[0].rating == 5);
    CHECK(records[1].rating == 3);
    CHECK(records[2].user_raw == 1);
    CHECK(records[2].item_raw == 9);
    CHECK(records[2].timestamp == 300);
}

TEST_CASE("load_ratings on an empty file returns an empty sequence") {
    TempFile f("", "ncf_test_empty.data");
    CHECK(load_ratings(f.path, FileFormat::ml100k, 5).empty());
}

TEST_CASE("load_ratings fails fast on bad records") {
    TempFile out_of_range("1\t2\t9\t0\n", "ncf_test_oor.data");
    CHECK_THROWS_WITH_AS((void)load_ratings(out_of_range.path, FileFormat::ml100k, 5),
                         doctest::Contains("line 1"), std::runtime_error);

    TempFile non_integer("1\t2\tx\t0\n", "ncf_test_nonint.data");
    CHECK_THROWS_AS((void)load_ratings(non_integer.path, FileFormat::ml100k, 5),
                    std::runtime_error);

    TempFile short_line("1\t2\n", "ncf_test_short.data");
    CHECK_THROWS_AS((void)load_ratings(short_line.path, FileFormat::ml100k, 5),
                    std::runtime_error);

    CHECK_THROWS_AS((void)load_ratings("/nonexistent/u.data", FileFormat::ml100k, 5),
                    std::runtime_error);
}

TEST_CASE("csv loader skips a single header line") {
    TempFile f("user,item,rating\n1,2,4\n3,4,5\n", "ncf_test_hdr.csv");
    auto records = load_ratings(f.path, FileFormat::csv, 5);
    REQUIRE(records.size() == 2);
    CHECK(records[0].rating == 4);
    CHECK(records[1].user_raw == 3);
}

TEST_CASE("drop_duplicates keeps the last vote") {
    std::vector<RatingRecord> records = {{1, 7, 5}, {2, 7, 3}, {1, 7, 2}};
    std::size_t dups = 0;
    auto unique = drop_duplicates(records, &dups);
    REQUIRE(unique.size() == 2);
    CHECK(dups == 1);
    CHECK(unique[0].rating == 2);  // re-vote replaced the first occurrence
    CHECK(unique[1].user_raw == 2);
}

TEST_CASE("build_index assigns dense indices in first-appearance order") {
    std::vector<RatingRecord> records = {{10, 5, 3}, {42, 5, 4}, {10, 6, 1}};
    DatasetIndex idx = build_index(records, 5);
    CHECK(idx.num_users == 2);
    CHECK(idx.num_items == 2);
    CHECK(idx.user_map.at(10) == 0);
    CHECK(idx.user_map.at(42) == 1);
    CHECK(idx.num_ratings == 3);
}

TEST_CASE("build_index rejects empty input and handles a single record") {
    CHECK_THROWS_WITH_AS((void)build_index({}, 5), "empty dataset", std::runtime_error);
    std::vector<RatingRecord> one = {{7, 9, 5}};
    DatasetIndex idx = build_index(one, 5);
    CHECK(idx.num_users == 1);
    CHECK(idx.num_items == 1);
}

TEST_CASE("index round-trips raw ids") {
    std::vector<RatingRecord> records = {{100, 7, 3}, {5, 900, 4}, {33, 7, 5}};
    DatasetIndex idx = build_index(records, 5);
    for (const auto& [raw, dense] : idx.user_map)
        CHECK(idx.user_raw[std::size_t(dense)] == raw);
    for (const auto& [raw, dense] : idx.item_map)
        CHECK(idx.item_raw[std::size_t(dense)] == raw);
}

TEST_CASE("sparsity matches hand-computed MovieLens values") {
    DatasetIndex ml100k;
    ml100k.num_users = 943;
    ml100k.num_items = 1682;
    ml100k.num_ratings = 99831;
    CHECK(sparsity(ml100k) == doctest::Approx(93.71).epsilon(0.0001));

    DatasetIndex ml1m;
    ml1m.num_users = 6040;
    ml1m.num_items = 3706;
    ml1m.num_ratings = 911031;
    // direct formula gives 95.93 (sometimes quoted rounded up to 95.94)
    CHECK(sparsity(ml1m) ==
          doctest::Approx(100.0 * (1.0 - 911031.0 / (6040.0 * 3706.0))).epsilon(1e-12));
    CHECK(sparsity(ml1m) == doctest::Approx(95.93).epsilon(0.0001));

    DatasetIndex dense1;
    dense1.num_users = 1;
    dense1.num_items = 1;
    dense1.num_ratings = 1;
    CHECK(sparsity(dense1) == 0.0);
}

TEST_CASE("split is deterministic, disjoint, and size-preserving") {
    std::vector<RatingRecord> records;
    for (long k = 0; k < 10; ++k) records.push_back({k % 4, k, int(k % 5) + 1});
    DatasetIndex idx = build_index(records, 5);

    SplitDataset a = split_dataset(records, idx, 0.8, 123);
    SplitDataset b = split_dataset(records, idx, 0.8, 123);
    CHECK(a.train.size() == 8);
    CHECK(a.test.size() == 2);
    for (std::size_t i = 0; i < a.train.size(); ++i) {
        CHECK(a.train[i].user == b.train[i].user);
        CHECK(a.train[i].item == b.train[i].item);
    }

    std::set<std::pair<int, int>> train_pairs, test_pairs;
    for (const auto& it : a.train) train_pairs.insert({it.user, it.item});
    for (const auto& it : a.test) test_pairs.insert({it.user, it.item});
    for (const auto& p : test_pairs) CHECK(train_pairs.count(p) == 0);
    CHECK(train_pairs.size() + test_pairs.size() == records.size());
}

TEST_CASE("split boundary: ratio 0.999 on 2 records keeps one on each side") {
    std::vector<RatingRecord> records = {{1, 1, 3}, {2, 2, 4}};
    DatasetIndex idx = build_index(records, 5);
    SplitDataset s = split_dataset(records, idx, 0.999, 1);
    CHECK(s.train.size() == 1);
    CHECK(s.test.size() == 1);
}

TEST_CASE("split disjointness holds for every seed on a 5-record set") {
    std::vector<RatingRecord> records = {{1, 1, 1}, {1, 2, 2}, {2, 1, 3}, {2, 2, 4},
                                         {3, 1, 5}};
    DatasetIndex idx = build_index(records, 5);
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
        for (double ratio : {0.2, 0.4, 0.6, 0.8}) {
            SplitDataset s = split_dataset(records, idx, ratio, seed);
            CHECK(s.train.size() + s.test.size() == records.size());
            std::set<std::pair<int, int>> seen;
            for (const auto& it : s.train) seen.insert({it.user, it.item});
            for (const auto& it : s.test) CHECK(seen.insert({it.user, it.item}).second);
            CHECK(!s.train.empty());
            CHECK(!s.test.empty());
        }
    }
}

TEST_CASE("split rejects out-of-range ratios") {
    std::vector<RatingRecord> records = {{1, 1, 3}, {2, 2, 4}};
    DatasetIndex idx = build_index(records, 5);
    CHECK_THROWS_AS((void)split_dataset(records, idx, 0.0, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)split_dataset(records, idx, 1.0, 1), std::invalid_argument);
}

TEST_CASE("one_hot basics and range check") {
    CHECK(one_hot(3, 5) == std::vector<double>{0, 0, 1, 0, 0});
    CHECK(one_hot(1, 5) == std::vector<double>{1, 0, 0, 0, 0});
    auto v10 = one_hot(10, 10);
    CHECK(v10[9] == 1.0);
    CHECK_THROWS_AS((void)one_hot(0, 5), std::out_of_range);
    CHECK_THROWS_AS((void)one_hot(6, 5), std::out_of_range);
}

TEST_CASE("one_hot has exactly one nonzero entry summing to 1") {
    for (int v_max : {2, 5, 10})
        for (int r = 1; r <= v_max; ++r) {
            auto v = one_hot(r, v_max);
            double sum = 0.0;
            int nonzero = 0;
            for (double x : v) {
                sum += x;
                if (x != 0.0) ++nonzero;
            }
            CHECK(sum == 1.0);
            CHECK(nonzero == 1);
        }
}

TEST_CASE("binarize follows the relevancy threshold") {
    CHECK(binarize(4, 4));
    CHECK(!binarize(3, 4));
    CHECK(binarize(7, 7));
    CHECK(binarize(5, 4));
}

TEST_CASE("split dump round-trips through CSV") {
    std::vector<RatingRecord> records;
    for (long k = 0; k < 12; ++k) records.push_back({k % 3, k % 4, int(k % 5) + 1});
    auto unique = drop_duplicates(records);
    DatasetIndex idx = build_index(unique, 5);
    SplitDataset s = split_dataset(unique, idx, 0.75, 7);

    const std::string path =
        (std::filesystem::temp_directory_path() / "ncf_test_split.csv").string();
    write_split_csv(path, s);
    SplitDataset back = read_split_csv(path);
    std::remove(path.c_str());

    REQUIRE(back.train.size() == s.train.size());
    REQUIRE(back.test.size() == s.test.size());
    for (std::size_t i = 0; i < s.train.size(); ++i) {
        CHECK(back.train[i].user == s.train[i].user);
        CHECK(back.train[i].item == s.train[i].item);
        CHECK(back.train[i].rating == s.train[i].rating);
    }
}

TEST_CASE("index dump round-trips through CSV") {
    std::vector<RatingRecord> records = {{100, 7, 3}, {5, 900, 4}, {33, 7, 5}};
    DatasetIndex idx = build_index(records, 5);
    const std::string path =
        (std::filesystem::temp_directory_path() / "ncf_test_index.csv").string();
    write_index_csv(path, idx);
    DatasetIndex back = read_index_csv(path);
    std::remove(path.c_str());
    CHECK(back.num_users == idx.num_users);
    CHECK(back.num_items == idx.num_items);
    CHECK(back.v_max == idx.v_max);
    CHECK(back.num_ratings == idx.num_ratings);
    CHECK(back.user_map == idx.user_map);
    CHECK(back.item_map == idx.item_map);
}
