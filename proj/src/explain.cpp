#include "cryptoval/explain.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>

#include "cryptoval/error.hpp"

namespace cryptoval::explain {

std::vector<InvestmentPoint> build_points(const Series& ratio, const metrics::ReturnPanel& rp, int horizon) {
    const Series& roi = rp.at(horizon);
    const auto h = static_cast<std::size_t>(horizon);
    std::vector<InvestmentPoint> points;
    for (std::size_t t = 0; t + h < ratio.size() && t < roi.size(); ++t) {
        if (!ratio[t] || !ratio[t + h] || !roi[t]) continue;
        points.push_back({t, rp.dates[t], *ratio[t], *ratio[t + h], *roi[t]});
    }
    if (points.empty()) {
        throw Error(ErrorKind::NoValidPoints, "no day has the ratio defined at buy and sell dates for horizon " +
                                                  std::to_string(horizon));
    }
    return points;
}

namespace {

double sq_dist(const Point2& a, const Point2& b) {
    const double dx = a[0] - b[0];
    const double dy = a[1] - b[1];
    return dx * dx + dy * dy;
}

double total_wcss(std::span<const Point2> points, const std::vector<Point2>& centroids,
                  const std::vector<int>& labels) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) s += sq_dist(points[i], centroids[labels[i]]);
    return s;
}

// Uniform integer in [0, bound) from the raw 64-bit engine output. Kept
// independent of std::uniform_int_distribution so streams are identical
// across standard libraries.
std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                std::numeric_limits<std::uint64_t>::max() % bound;
    std::uint64_t r = 0;
    do {
        r = rng();
    } while (r >= limit);
    return r % bound;
}

}  // namespace

LloydRun lloyd(std::span<const Point2> points, std::vector<Point2> centroids, int max_iterations) {
    const std::size_t n = points.size();
    const std::size_t k = centroids.size();
    LloydRun run;
    run.labels.assign(n, -1);
    std::vector<int> next(n);
    std::vector<std::size_t> sizes(k);

    for (int it = 1; it <= max_iterations; ++it) {
        std::fill(sizes.begin(), sizes.end(), 0);
        for (std::size_t i = 0; i < n; ++i) {
            int best = 0;
            double best_d = sq_dist(points[i], centroids[0]);
            for (std::size_t j = 1; j < k; ++j) {
                const double d = sq_dist(points[i], centroids[j]);
                if (d < best_d) {
                    best_d = d;
                    best = static_cast<int>(j);
                }
            }
            next[i] = best;
            ++sizes[best];
        }

        // Empty clusters are reseeded at the point farthest from its centroid.
        for (std::size_t j = 0; j < k; ++j) {
            if (sizes[j] != 0) continue;
            std::size_t far = n;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                if (sizes[next[i]] < 2) continue;
                const double d = sq_dist(points[i], centroids[next[i]]);
                if (d > far_d) {
                    far_d = d;
                    far = i;
                }
            }
            if (far == n) break;
            --sizes[next[far]];
            next[far] = static_cast<int>(j);
            sizes[j] = 1;
            centroids[j] = points[far];
        }

        const bool changed = next != run.labels;
        run.labels = next;

        std::vector<Point2> sums(k, Point2{0.0, 0.0});
        for (std::size_t i = 0; i < n; ++i) {
            sums[next[i]][0] += points[i][0];
            sums[next[i]][1] += points[i][1];
        }
        for (std::size_t j = 0; j < k; ++j) {
            if (sizes[j] == 0) continue;
            const double c = static_cast<double>(sizes[j]);
            centroids[j] = {sums[j][0] / c, sums[j][1] / c};
        }

        run.wcss = total_wcss(points, centroids, run.labels);
        run.wcss_trace.push_back(run.wcss);
        run.iterations = it;
        if (!changed) break;
    }
    run.centroids = std::move(centroids);
    return run;
}

ClusterReport kmeans(std::span<const Point2> points, const KMeansOptions& options) {
    if (options.k < 1) throw Error(ErrorKind::InvalidArgument, "k must be >= 1");
    if (options.restarts < 1) throw Error(ErrorKind::InvalidArgument, "restarts must be >= 1");
    const std::size_t n = points.size();
    const auto k = static_cast<std::size_t>(options.k);
    if (n < k) {
        throw Error(ErrorKind::TooFewPoints, std::to_string(n) + " points for k = " + std::to_string(k));
    }

    ClusterReport best;
    bool have_best = false;
    std::vector<std::size_t> idx(n);
    for (int r = 0; r < options.restarts; ++r) {
        std::seed_seq seq{static_cast<std::uint32_t>(options.seed), static_cast<std::uint32_t>(options.seed >> 32),
                          static_cast<std::uint32_t>(r)};
        std::mt19937_64 rng(seq);
        std::iota(idx.begin(), idx.end(), std::size_t{0});
        std::vector<Point2> init(k);
        for (std::size_t j = 0; j < k; ++j) {
            const std::size_t pick = j + static_cast<std::size_t>(uniform_below(rng, n - j));
            std::swap(idx[j], idx[pick]);
            init[j] = points[idx[j]];
        }

        auto run = lloyd(points, std::move(init), options.max_iterations);
        if (!have_best || run.wcss < best.wcss) {
            have_best = true;
            best.centroids = std::move(run.centroids);
            best.labels = std::move(run.labels);
            best.wcss = run.wcss;
            best.iterations = run.iterations;
            best.wcss_trace = std::move(run.wcss_trace);
            best.best_restart = r;
        }
    }
    best.k = options.k;
    best.seed = options.seed;
    best.restarts = options.restarts;
    best.sizes.assign(k, 0);
    for (int l : best.labels) ++best.sizes[static_cast<std::size_t>(l)];
    return best;
}

Criteria check_criteria(const ClusterReport& report, std::span<const InvestmentPoint> points,
                        RoiStatistic statistic) {
    if (report.labels.size() != points.size()) {
        throw Error(ErrorKind::InvalidArgument, "cluster labels do not match the investment points");
    }
    const auto k = static_cast<std::size_t>(report.k);
    std::vector<std::vector<double>> rois(k);
    for (std::size_t i = 0; i < points.size(); ++i) {
        rois[static_cast<std::size_t>(report.labels[i])].push_back(points[i].roi);
    }

    Criteria c;
    for (auto& v : rois) {
        if (v.empty()) {
            c.cluster_mean_roi.push_back(std::numeric_limits<double>::quiet_NaN());
            c.cluster_median_roi.push_back(std::numeric_limits<double>::quiet_NaN());
            continue;
        }
        c.cluster_mean_roi.push_back(std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()));
        std::sort(v.begin(), v.end());
        const std::size_t m = v.size() / 2;
        c.cluster_median_roi.push_back(v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]));
    }

    double best_gap = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < k; ++j) {
        const double gap = report.centroids[j][1] - report.centroids[j][0];
        if (gap > 0.0) c.exists_buy_low_sell_high = true;
        if (gap > best_gap) {
            best_gap = gap;
            c.winning_cluster = static_cast<int>(j);
        }
    }

    const auto& stat = statistic == RoiStatistic::Mean ? c.cluster_mean_roi : c.cluster_median_roi;
    const double winner = stat[static_cast<std::size_t>(c.winning_cluster)];
    c.best_cluster_has_max_roi = true;
    for (std::size_t j = 0; j < k; ++j) {
        if (static_cast<int>(j) != c.winning_cluster && !(winner >= stat[j]) && !std::isnan(stat[j])) {
            c.best_cluster_has_max_roi = false;
        }
    }
    return c;
}

InvestmentClustering cluster_investments(const Series& ratio, const metrics::ReturnPanel& rp, int horizon,
                                         const KMeansOptions& options, RoiStatistic statistic) {
    InvestmentClustering out;
    out.points = build_points(ratio, rp, horizon);
    std::vector<Point2> xy;
    xy.reserve(out.points.size());
    for (const auto& p : out.points) xy.push_back({p.ratio_buy, p.ratio_sell});
    out.report = kmeans(xy, options);
    out.criteria = check_criteria(out.report, out.points, statistic);
    return out;
}

namespace {

std::size_t total_of(std::span<const std::size_t> counts) {
    std::size_t total = 0;
    for (auto c : counts) total += c;
    if (total == 0) throw Error(ErrorKind::EmptySet, "impurity of an empty node");
    return total;
}

}  // namespace

double entropy(std::span<const std::size_t> counts) {
    const double total = static_cast<double>(total_of(counts));
    double h = 0.0;
    for (auto c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log2(p);
    }
    return h;
}

double gini(std::span<const std::size_t> counts) {
    const double total = static_cast<double>(total_of(counts));
    double s = 0.0;
    for (auto c : counts) {
        const double p = static_cast<double>(c) / total;
        s += p * p;
    }
    return 1.0 - s;
}

std::string to_string(SplitCriterion c) {
    return c == SplitCriterion::Entropy ? "entropy" : "gini";
}

double impurity(SplitCriterion c, const ClassCounts& counts) {
    return c == SplitCriterion::Entropy ? entropy(counts) : gini(counts);
}

bool TreeNode::predict(double feature) const {
    if (is_leaf()) return predicted_bull;
    return feature <= *threshold ? left->predict(feature) : right->predict(feature);
}

std::optional<BestSplit> best_split(std::span<const LabeledSample> samples, SplitCriterion criterion) {
    if (samples.empty()) throw Error(ErrorKind::EmptySet, "no samples to split");
    std::vector<LabeledSample> sorted(samples.begin(), samples.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const LabeledSample& a, const LabeledSample& b) { return a.feature < b.feature; });

    ClassCounts all{};
    for (const auto& s : sorted) ++all[s.bull];
    const double parent = impurity(criterion, all);
    const std::size_t n_total = sorted.size();
    const double n = static_cast<double>(n_total);

    std::optional<BestSplit> best;
    ClassCounts left{};
    for (std::size_t i = 0; i + 1 < n_total; ++i) {
        ++left[sorted[i].bull];
        if (!(sorted[i].feature < sorted[i + 1].feature)) continue;
        double threshold = 0.5 * (sorted[i].feature + sorted[i + 1].feature);
        if (threshold >= sorted[i + 1].feature) threshold = sorted[i].feature;

        const ClassCounts right{all[0] - left[0], all[1] - left[1]};
        const std::size_t nl = i + 1;
        const std::size_t nr = n_total - nl;
        const double gain = parent - (static_cast<double>(nl) / n) * impurity(criterion, left) -
                            (static_cast<double>(nr) / n) * impurity(criterion, right);
        if (!best || gain > best->gain) best = BestSplit{threshold, gain};
    }
    return best;
}

std::unique_ptr<TreeNode> grow_tree(std::span<const LabeledSample> samples, SplitCriterion criterion,
                                    int max_depth) {
    auto node = std::make_unique<TreeNode>();
    for (const auto& s : samples) ++node->counts[s.bull];
    node->samples = samples.size();
    node->impurity = impurity(criterion, node->counts);
    node->predicted_bull = node->counts[1] > node->counts[0];
    if (max_depth <= 0 || node->impurity == 0.0) return node;

    const auto split = best_split(samples, criterion);
    if (!split || !(split->gain > 0.0)) return node;

    std::vector<LabeledSample> lo, hi;
    for (const auto& s : samples) (s.feature <= split->threshold ? lo : hi).push_back(s);
    node->threshold = split->threshold;
    node->gain = split->gain;
    node->left = grow_tree(lo, criterion, max_depth - 1);
    node->right = grow_tree(hi, criterion, max_depth - 1);
    return node;
}

ClassificationMetrics evaluate(const TreeNode& root, std::span<const LabeledSample> samples) {
    ClassificationMetrics m;
    m.n = samples.size();
    std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
    for (const auto& s : samples) {
        const bool pred = root.predict(s.feature);
        correct += pred == s.bull;
        tp += pred && s.bull;
        fp += pred && !s.bull;
        fn += !pred && s.bull;
    }
    if (m.n > 0) m.accuracy = static_cast<double>(correct) / static_cast<double>(m.n);
    if (tp + fp > 0) m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
    if (tp + fn > 0) m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
    return m;
}

TreeReport fit_tree(std::span<const LabeledSample> samples, const TreeOptions& options) {
    if (!(options.train_fraction > 0.0 && options.train_fraction < 1.0)) {
        throw Error(ErrorKind::InvalidArgument, "train_fraction must lie in (0, 1)");
    }
    if (options.max_depth < 0) throw Error(ErrorKind::InvalidArgument, "max_depth must be >= 0");

    // Test size rounds up, matching an unshuffled 75/25 split.
    const std::size_t n = samples.size();
    const auto n_test = static_cast<std::size_t>(std::ceil((1.0 - options.train_fraction) * static_cast<double>(n)));
    const std::size_t n_train = n > n_test ? n - n_test : 0;
    const std::size_t test_begin = std::min(n, n_train + options.purge);
    if (n_train == 0 || test_begin >= n) {
        throw Error(ErrorKind::EmptySplit, "split of " + std::to_string(n) + " samples leaves an empty side");
    }

    const auto train = samples.subspan(0, n_train);
    const auto test = samples.subspan(test_begin);
    ClassCounts counts{};
    for (const auto& s : train) ++counts[s.bull];
    if (counts[0] == 0 || counts[1] == 0) {
        throw Error(ErrorKind::SingleClassTraining, "training set has a single class");
    }

    TreeReport report;
    report.options = options;
    report.root = grow_tree(train, options.criterion, options.max_depth);
    report.train_size = train.size();
    report.test_size = test.size();
    report.train = evaluate(*report.root, train);
    report.test = evaluate(*report.root, test);
    return report;
}

std::vector<LabeledSample> label_points(std::span<const InvestmentPoint> points, double bull_threshold) {
    std::vector<LabeledSample> out;
    out.reserve(points.size());
    for (const auto& p : points) out.push_back({p.ratio_buy, p.roi > bull_threshold});
    return out;
}

namespace {

void render_node(const TreeNode& node, const TreeReport& report, int depth, const std::string& branch,
                 std::ostringstream& out) {
    const std::string pad(static_cast<std::size_t>(depth) * 4, ' ');
    char buf[64];
    out << pad << branch;
    if (node.threshold) {
        std::snprintf(buf, sizeof buf, "%.3f", *node.threshold);
        out << report.options.feature_name << " <= " << buf << '\n';
    } else {
        out << "leaf\n";
    }
    std::snprintf(buf, sizeof buf, "%.3f", node.impurity);
    out << pad << "  " << to_string(report.options.criterion) << " = " << buf << '\n';
    out << pad << "  samples = " << node.samples << '\n';
    out << pad << "  value = [not bull " << node.counts[0] << ", bull " << node.counts[1] << "]\n";
    out << pad << "  class = " << (node.predicted_bull ? "bull" : "not bull") << '\n';
    if (!node.is_leaf()) {
        render_node(*node.left, report, depth + 1, "[True] ", out);
        render_node(*node.right, report, depth + 1, "[False] ", out);
    }
}

}  // namespace

std::string render_tree(const TreeReport& report) {
    std::ostringstream out;
    if (report.root) render_node(*report.root, report, 0, "", out);
    return out.str();
}

}  // namespace cryptoval::explain
