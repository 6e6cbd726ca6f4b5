#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cryptoval/date.hpp"
#include "cryptoval/metrics.hpp"
#include "cryptoval/series.hpp"

namespace cryptoval::explain {

/// One h-day investment described by the valuation ratio on its buy and sell days.
struct InvestmentPoint {
    std::size_t buy_index = 0;
    Date buy_date;
    double ratio_buy = 0.0;
    double ratio_sell = 0.0;
    double roi = 0.0;

    double difference() const { return ratio_buy - ratio_sell; }
};

std::vector<InvestmentPoint> build_points(const Series& ratio, const metrics::ReturnPanel& rp, int horizon);

using Point2 = std::array<double, 2>;

struct KMeansOptions {
    int k = 4;
    std::uint64_t seed = 0;
    int restarts = 10;
    int max_iterations = 300;
};

struct ClusterReport {
    int k = 0;
    std::uint64_t seed = 0;
    int restarts = 0;
    std::vector<Point2> centroids;
    std::vector<int> labels;
    std::vector<std::size_t> sizes;
    double wcss = 0.0;
    int iterations = 0;
    int best_restart = 0;
    /// WCSS after every Lloyd iteration of the winning restart.
    std::vector<double> wcss_trace;
};

/// A single Lloyd run from fixed initial centroids.
struct LloydRun {
    std::vector<Point2> centroids;
    std::vector<int> labels;
    double wcss = 0.0;
    int iterations = 0;
    std::vector<double> wcss_trace;
};

LloydRun lloyd(std::span<const Point2> points, std::vector<Point2> centroids, int max_iterations);

/// Best of `restarts` Lloyd runs (lowest WCSS) from random distinct-point initializations.
ClusterReport kmeans(std::span<const Point2> points, const KMeansOptions& options);

struct Criteria {
    bool exists_buy_low_sell_high = false;
    bool best_cluster_has_max_roi = false;
    /// Cluster with the largest (sell - buy) centroid gap.
    int winning_cluster = -1;
    std::vector<double> cluster_mean_roi;
    std::vector<double> cluster_median_roi;
};

enum class RoiStatistic { Mean, Median };

/// Both buy-low/sell-high consistency checks on a clustering of (buy, sell) points.
Criteria check_criteria(const ClusterReport& report, std::span<const InvestmentPoint> points,
                        RoiStatistic statistic = RoiStatistic::Mean);

struct InvestmentClustering {
    std::vector<InvestmentPoint> points;
    ClusterReport report;
    Criteria criteria;
};

InvestmentClustering cluster_investments(const Series& ratio, const metrics::ReturnPanel& rp, int horizon,
                                         const KMeansOptions& options,
                                         RoiStatistic statistic = RoiStatistic::Mean);

/// Class counts of a node: index 0 = not bull, 1 = bull.
using ClassCounts = std::array<std::size_t, 2>;

double entropy(std::span<const std::size_t> counts);
double gini(std::span<const std::size_t> counts);

enum class SplitCriterion { Entropy, Gini };
std::string to_string(SplitCriterion c);
double impurity(SplitCriterion c, const ClassCounts& counts);

struct TreeNode {
    std::optional<double> threshold;
    double impurity = 0.0;
    std::size_t samples = 0;
    ClassCounts counts{};
    bool predicted_bull = false;
    double gain = 0.0;
    std::unique_ptr<TreeNode> left;   // feature <= threshold
    std::unique_ptr<TreeNode> right;  // feature > threshold

    bool is_leaf() const { return !left; }
    bool predict(double feature) const;
};

struct LabeledSample {
    double feature = 0.0;
    bool bull = false;
};

struct BestSplit {
    double threshold = 0.0;
    double gain = 0.0;
};

/// Greedy best threshold over midpoints of consecutive distinct feature
/// values; nullopt when all values are equal.
std::optional<BestSplit> best_split(std::span<const LabeledSample> samples, SplitCriterion criterion);

struct TreeOptions {
    SplitCriterion criterion = SplitCriterion::Entropy;
    int max_depth = 1;
    double train_fraction = 0.75;
    /// Samples dropped right after the train/test boundary.
    std::size_t purge = 0;
    std::string feature_name = "ratio";
};

struct ClassificationMetrics {
    std::size_t n = 0;
    double accuracy = 0.0;
    std::optional<double> precision;
    std::optional<double> recall;
};

struct TreeReport {
    TreeOptions options;
    std::unique_ptr<TreeNode> root;
    std::size_t train_size = 0;
    std::size_t test_size = 0;
    ClassificationMetrics train;
    ClassificationMetrics test;
};

std::unique_ptr<TreeNode> grow_tree(std::span<const LabeledSample> samples, SplitCriterion criterion,
                                    int max_depth);

/// Chronological split, then recursive single-feature greedy splitting.
TreeReport fit_tree(std::span<const LabeledSample> samples, const TreeOptions& options);

ClassificationMetrics evaluate(const TreeNode& root, std::span<const LabeledSample> samples);

/// Labels each investment as bull when its ROI exceeds `bull_threshold`.
std::vector<LabeledSample> label_points(std::span<const InvestmentPoint> points, double bull_threshold = 0.20);

/// Indented text rendering, one annotation per line: split, impurity, samples, counts, class.
std::string render_tree(const TreeReport& report);

}  // namespace cryptoval::explain
