#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>

#include "cryptoval/error.hpp"
#include "cryptoval/explain.hpp"
#include "oracles.hpp"
#include "support.hpp"

using namespace cryptoval;
namespace ex = cryptoval::explain;

namespace {

struct Blobs {
    std::vector<ex::Point2> points;
    std::vector<int> truth;
};

Blobs blobs(std::mt19937_64& rng, std::size_t per_blob) {
    const ex::Point2 centers[4] = {{0, 0}, {50, 0}, {0, 50}, {50, 50}};
    std::normal_distribution<double> z(0.0, 1.0);
    Blobs b;
    for (std::size_t i = 0; i < per_blob; ++i)
        for (int c = 0; c < 4; ++c) {
            b.points.push_back({centers[c][0] + z(rng), centers[c][1] + z(rng)});
            b.truth.push_back(c);
        }
    return b;
}

std::vector<ex::InvestmentPoint> as_investments(const std::vector<ex::Point2>& pts, auto&& roi) {
    std::vector<ex::InvestmentPoint> out;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        out.push_back({i, cvtest::day0() + static_cast<std::int32_t>(i), pts[i][0], pts[i][1], roi(pts[i])});
    }
    return out;
}

ex::ClusterReport cluster(const std::vector<ex::InvestmentPoint>& inv, int k, std::uint64_t seed) {
    std::vector<ex::Point2> pts;
    for (const auto& p : inv) pts.push_back({p.ratio_buy, p.ratio_sell});
    ex::KMeansOptions o;
    o.k = k;
    o.seed = seed;
    return ex::kmeans(pts, o);
}

}  // namespace

TEST_CASE("build_points") {
    const auto ds = cvtest::dataset_from_price(std::vector<double>(100, 2.0));
    const auto rp = metrics::returns(ds, {90});
    Series ratio(100, 7.0);
    const auto pts = ex::build_points(ratio, rp, 90);
    CHECK(pts.size() == 10);
    for (const auto& p : pts) {
        CHECK(p.ratio_buy == 7.0);
        CHECK(p.ratio_sell == 7.0);
        CHECK(p.roi == 0.0);
    }
    ratio[95] = std::nullopt;
    const auto fewer = ex::build_points(ratio, rp, 90);
    CHECK(fewer.size() == 9);
    CHECK(std::none_of(fewer.begin(), fewer.end(), [](const auto& p) { return p.buy_index == 5; }));
    CHECK_THROWS_AS(ex::build_points(Series(100), rp, 90), Error);
}

TEST_CASE("kmeans recovers well separated blobs") {
    std::mt19937_64 rng(31);
    const auto b = blobs(rng, 50);
    for (std::uint64_t seed : {0ull, 1ull, 2ull, 12345ull}) {
        ex::KMeansOptions o;
        o.seed = seed;
        const auto r = ex::kmeans(b.points, o);
        CHECK(cvtest::adjusted_rand_index(r.labels, b.truth) == 1.0);
        for (auto s : r.sizes) CHECK(s == 50);
    }
}

TEST_CASE("kmeans with k = 1 returns the grand mean") {
    std::mt19937_64 rng(32);
    const auto b = blobs(rng, 10);
    ex::KMeansOptions o;
    o.k = 1;
    const auto r = ex::kmeans(b.points, o);
    double mx = 0.0, my = 0.0;
    for (const auto& p : b.points) {
        mx += p[0];
        my += p[1];
    }
    CHECK(r.centroids[0][0] == doctest::Approx(mx / 40.0).epsilon(1e-12));
    CHECK(r.centroids[0][1] == doctest::Approx(my / 40.0).epsilon(1e-12));
}

TEST_CASE("kmeans on identical points") {
    const std::vector<ex::Point2> same(6, ex::Point2{3.0, 4.0});
    ex::KMeansOptions o;
    o.k = 2;
    const auto r = ex::kmeans(same, o);
    CHECK(r.wcss == 0.0);
    for (auto s : r.sizes) CHECK(s >= 1);
    for (int l : r.labels) CHECK((l >= 0 && l < 2));
    o.k = 7;
    CHECK_THROWS_AS(ex::kmeans(same, o), Error);
}

TEST_CASE("Lloyd iterations never increase WCSS") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    for (int rep = 0; rep < 50; ++rep) {
        std::vector<ex::Point2> pts(60 + rep);
        for (auto& p : pts) p = {u(rng), u(rng) * (rep % 2 ? 1.0 : 0.1)};
        ex::KMeansOptions o;
        o.k = 2 + rep % 5;
        o.seed = static_cast<std::uint64_t>(rep);
        const auto r = ex::kmeans(pts, o);
        REQUIRE_FALSE(r.wcss_trace.empty());
        for (std::size_t i = 1; i < r.wcss_trace.size(); ++i) CHECK(r.wcss_trace[i] <= r.wcss_trace[i - 1]);
        CHECK(r.wcss >= 0.0);
        CHECK(r.wcss == r.wcss_trace.back());
        for (auto s : r.sizes) CHECK(s >= 1);
    }
}

TEST_CASE("kmeans is deterministic for a fixed seed") {
    std::mt19937_64 rng(34);
    std::uniform_real_distribution<double> u(0.0, 10.0);
    std::vector<ex::Point2> pts(300);
    for (auto& p : pts) p = {u(rng), u(rng)};
    ex::KMeansOptions o;
    o.seed = 77;
    const auto a = ex::kmeans(pts, o);
    const auto b = ex::kmeans(pts, o);
    CHECK(a.labels == b.labels);
    CHECK(std::memcmp(a.centroids.data(), b.centroids.data(), a.centroids.size() * sizeof(ex::Point2)) == 0);
    CHECK(a.wcss_trace == b.wcss_trace);
}

TEST_CASE("check_criteria on a linear ROI construction") {
    std::mt19937_64 rng(35);
    std::uniform_real_distribution<double> buy(20.0, 200.0), gap(-60.0, 120.0);
    std::vector<ex::Point2> pts(400);
    for (auto& p : pts) {
        p[0] = buy(rng);
        p[1] = p[0] + gap(rng);
    }
    const auto inv = as_investments(pts, [](const ex::Point2& p) { return 0.01 * (p[1] - p[0]); });
    const auto c = ex::check_criteria(cluster(inv, 4, 5), inv);
    CHECK(c.exists_buy_low_sell_high);
    CHECK(c.best_cluster_has_max_roi);
}

TEST_CASE("check_criteria with ROI = (sell - buy) / buy on separated clusters") {
    std::mt19937_64 rng(36);
    std::normal_distribution<double> z(0.0, 1.0);
    const ex::Point2 centers[4] = {{40, 160}, {100, 100}, {150, 60}, {160, 170}};
    std::vector<ex::Point2> pts;
    for (int i = 0; i < 40; ++i)
        for (const auto& c : centers) pts.push_back({c[0] + z(rng), c[1] + z(rng)});
    const auto inv = as_investments(pts, [](const ex::Point2& p) { return (p[1] - p[0]) / p[0]; });
    const auto c = ex::check_criteria(cluster(inv, 4, 0), inv);
    CHECK(c.exists_buy_low_sell_high);
    CHECK(c.best_cluster_has_max_roi);
}

TEST_CASE("check_criteria: every sell below buy fails the first criterion") {
    std::mt19937_64 rng(37);
    std::uniform_real_distribution<double> u(10.0, 100.0), drop(1.0, 9.0);
    std::vector<ex::Point2> pts(100);
    for (auto& p : pts) {
        p[0] = u(rng);
        p[1] = p[0] - drop(rng);
    }
    const auto inv = as_investments(pts, [](const ex::Point2& p) { return p[1] / p[0] - 1.0; });
    CHECK_FALSE(ex::check_criteria(cluster(inv, 4, 1), inv).exists_buy_low_sell_high);
}

TEST_CASE("check_criteria ignores cluster numbering") {
    std::mt19937_64 rng(38);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    std::vector<ex::Point2> pts(200);
    for (auto& p : pts) p = {u(rng), u(rng)};
    const auto inv = as_investments(pts, [](const ex::Point2& p) { return std::sin(p[0]) + p[1] / 50.0; });
    const auto r = cluster(inv, 4, 2);
    const int perm[4] = {2, 0, 3, 1};
    auto relabeled = r;
    for (std::size_t j = 0; j < 4; ++j) relabeled.centroids[static_cast<std::size_t>(perm[j])] = r.centroids[j];
    for (auto& l : relabeled.labels) l = perm[l];
    for (std::size_t j = 0; j < 4; ++j) relabeled.sizes[static_cast<std::size_t>(perm[j])] = r.sizes[j];
    for (auto stat : {ex::RoiStatistic::Mean, ex::RoiStatistic::Median}) {
        const auto a = ex::check_criteria(r, inv, stat);
        const auto b = ex::check_criteria(relabeled, inv, stat);
        CHECK(a.exists_buy_low_sell_high == b.exists_buy_low_sell_high);
        CHECK(a.best_cluster_has_max_roi == b.best_cluster_has_max_roi);
        CHECK(perm[a.winning_cluster] == b.winning_cluster);
    }
}

TEST_CASE("entropy and gini") {
    const std::size_t even[2] = {1, 1}, pure[2] = {9, 0}, skew[2] = {3, 1};
    CHECK(ex::entropy(even) == 1.0);
    CHECK(ex::gini(even) == 0.5);
    CHECK(ex::entropy(pure) == 0.0);
    CHECK(ex::gini(pure) == 0.0);
    CHECK(ex::entropy(skew) == doctest::Approx(-(0.75 * std::log2(0.75) + 0.25 * std::log2(0.25))).epsilon(1e-15));
    CHECK(ex::entropy(skew) == doctest::Approx(0.8112781245).epsilon(1e-9));
    CHECK(ex::gini(skew) == 0.375);
    const std::size_t empty[2] = {0, 0};
    CHECK_THROWS_AS(ex::entropy(empty), Error);
    CHECK_THROWS_AS(ex::gini(empty), Error);

    std::mt19937_64 rng(39);
    std::uniform_int_distribution<std::size_t> u(0, 50);
    for (int rep = 0; rep < 500; ++rep) {
        std::size_t c[2] = {u(rng), u(rng)};
        if (c[0] + c[1] == 0) continue;
        const double e = ex::entropy(c), g = ex::gini(c);
        CHECK((e >= 0.0 && e <= 1.0));
        CHECK((g >= 0.0 && g <= 0.5));
        const bool is_pure = c[0] == 0 || c[1] == 0;
        CHECK((e == 0.0) == is_pure);
        CHECK((g == 0.0) == is_pure);
    }
}

TEST_CASE("separable stump") {
    std::vector<ex::LabeledSample> s;
    for (double v : {1.0, 2.0, 3.0, 4.0, 5.0}) s.push_back({v, false});
    for (double v : {6.0, 7.5, 9.0}) s.push_back({v, true});
    for (auto c : {ex::SplitCriterion::Entropy, ex::SplitCriterion::Gini}) {
        const auto root = ex::grow_tree(s, c, 1);
        REQUIRE(root->threshold.has_value());
        CHECK(*root->threshold > 5.0);
        CHECK(*root->threshold < 6.0);
        CHECK(root->left->impurity == 0.0);
        CHECK(root->right->impurity == 0.0);
        CHECK(root->gain == doctest::Approx(root->impurity).epsilon(1e-15));
        CHECK(root->left->samples + root->right->samples == root->samples);
    }
}

TEST_CASE("fit_tree errors") {
    std::vector<ex::LabeledSample> same(20, {1.0, true});
    for (std::size_t i = 0; i < same.size(); ++i) same[i].feature = static_cast<double>(i);
    CHECK_THROWS_AS(ex::fit_tree(same, {}), Error);
    try {
        ex::fit_tree(same, {});
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::SingleClassTraining);
    }
    const std::vector<ex::LabeledSample> one{{1.0, true}};
    ex::TreeOptions o;
    try {
        ex::fit_tree(one, o);
        FAIL("expected EmptySplit");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptySplit);
    }
}

TEST_CASE("fit_tree: chronological split with purge") {
    std::vector<ex::LabeledSample> s;
    for (int i = 0; i < 100; ++i) s.push_back({static_cast<double>(i % 17), i % 3 == 0});
    ex::TreeOptions o;
    const auto r = ex::fit_tree(s, o);
    CHECK(r.train_size == 75);
    CHECK(r.test_size == 25);
    o.purge = 10;
    const auto p = ex::fit_tree(s, o);
    CHECK(p.train_size == 75);
    CHECK(p.test_size == 15);
    CHECK(*p.root->threshold == *r.root->threshold);
}

TEST_CASE("stump matches the exhaustive oracle") {
    std::mt19937_64 rng(40);
    for (int rep = 0; rep < 200; ++rep) {
        std::uniform_int_distribution<int> levels(2, 40);
        std::uniform_int_distribution<int> v(0, levels(rng));
        std::bernoulli_distribution coin(0.3 + 0.4 * (rep % 2));
        std::vector<ex::LabeledSample> s(30 + static_cast<std::size_t>(rep));
        for (auto& x : s) {
            x.feature = 0.37 * v(rng);
            x.bull = coin(rng) != (x.feature > 5.0);
        }
        const auto c = rep % 2 ? ex::SplitCriterion::Gini : ex::SplitCriterion::Entropy;
        const auto got = ex::best_split(s, c);
        const auto want = cvtest::stump_oracle(s, c);
        REQUIRE(got.has_value() == want.has_value());
        if (got) {
            CHECK(got->threshold == want->threshold);
            CHECK(got->gain == want->gain);
        }
    }
}

TEST_CASE("render_tree lists each annotation on its own line") {
    std::vector<ex::LabeledSample> s;
    for (int i = 0; i < 40; ++i) s.push_back({static_cast<double>(i), i < 12});
    ex::TreeOptions o;
    o.feature_name = "pu_ratio";
    const auto text = ex::render_tree(ex::fit_tree(s, o));
    CHECK(text.find("pu_ratio <= 11.5") != std::string::npos);
    CHECK(text.find("entropy = ") != std::string::npos);
    CHECK(text.find("samples = 30") != std::string::npos);
    CHECK(text.find("value = [not bull 18, bull 12]") != std::string::npos);
    CHECK(text.find("[True]") != std::string::npos);
}
