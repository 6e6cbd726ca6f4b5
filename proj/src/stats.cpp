#include "cryptoval/stats.hpp"

#include <algorithm>
#include <cmath>

#include "cryptoval/error.hpp"

namespace cryptoval::stats {

std::string LagPolicy::describe() const {
    return mode == Mode::Fixed ? "fixed:" + std::to_string(fixed_lags) : "horizon-1";
}

namespace {

// Bartlett-weighted long-run sum: sum g_t^2 + 2 sum_j w_j sum_t g_t g_{t-j}.
double long_run_sum(const std::vector<double>& g, int lags) {
    double s = 0.0;
    for (double v : g) s += v * v;
    const std::size_t n = g.size();
    for (int j = 1; j <= lags && static_cast<std::size_t>(j) < n; ++j) {
        double cross = 0.0;
        for (std::size_t t = static_cast<std::size_t>(j); t < n; ++t) cross += g[t] * g[t - j];
        s += 2.0 * bartlett_weight(j, lags) * cross;
    }
    return s;
}

double mean_of(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
}

}  // namespace

double hac_variance_of_mean(const std::vector<double>& values, int lags) {
    if (values.empty()) throw Error(ErrorKind::InsufficientData, "no observations");
    const double m = mean_of(values);
    std::vector<double> u(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) u[i] = values[i] - m;
    const double n = static_cast<double>(values.size());
    return long_run_sum(u, lags) / (n * n);
}

SummaryStats summarize(const Series& returns, int horizon, const LagPolicy& lags) {
    const auto v = defined_values(returns);
    if (v.size() < 3) {
        throw Error(ErrorKind::InsufficientData, "horizon " + std::to_string(horizon) + " has " +
                                                     std::to_string(v.size()) + " defined returns");
    }
    SummaryStats s;
    s.horizon = horizon;
    s.n = v.size();
    s.lags = std::min(lags.lags_for(horizon), static_cast<int>(v.size()) - 1);
    s.mean = mean_of(v);

    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    std::size_t positive = 0;
    for (double x : v) {
        const double d = x - s.mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
        positive += x > 0.0;
    }
    const double n = static_cast<double>(v.size());
    s.sd = std::sqrt(m2 / (n - 1.0));
    s.pct_positive = 100.0 * static_cast<double>(positive) / n;

    m2 /= n;
    m3 /= n;
    m4 /= n;
    if (m2 > 0.0) {
        s.sharpe = s.mean / s.sd;
        s.skewness = m3 / std::pow(m2, 1.5);
        s.kurtosis = m4 / (m2 * m2);
        const double var = hac_variance_of_mean(v, s.lags);
        if (var > 0.0) s.t_stat = s.mean / std::sqrt(var);
    }
    return s;
}

std::vector<ExtremeEventRow> extreme_events(const Series& daily_returns,
                                            const std::vector<double>& thresholds) {
    const auto v = defined_values(daily_returns);
    std::vector<ExtremeEventRow> rows;
    for (double thr : thresholds) {
        ExtremeEventRow row;
        row.threshold = thr;
        for (double r : v) {
            row.disasters += r < -thr;
            row.miracles += r > thr;
        }
        if (!v.empty()) {
            row.disasters_pct = 100.0 * static_cast<double>(row.disasters) / static_cast<double>(v.size());
            row.miracles_pct = 100.0 * static_cast<double>(row.miracles) / static_cast<double>(v.size());
        }
        rows.push_back(row);
    }
    return rows;
}

ReturnSummary summarize_returns(const metrics::ReturnPanel& rp, const LagPolicy& lags) {
    ReturnSummary out;
    for (std::size_t k = 0; k < rp.horizons.size(); ++k) {
        out.by_horizon.push_back(summarize(rp.roi[k], rp.horizons[k], lags));
        if (rp.horizons[k] == 1) out.extremes = extreme_events(rp.roi[k]);
    }
    return out;
}

RegressionResult nw_regress(const Series& y, const Series& x, int lags) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < y.size() && i < x.size(); ++i) {
        if (y[i] && x[i]) {
            xs.push_back(*x[i]);
            ys.push_back(*y[i]);
        }
    }
    const std::size_t n = xs.size();
    if (n < 3) {
        throw Error(ErrorKind::InsufficientData, std::to_string(n) + " jointly defined observations");
    }
    if (lags < 0 || static_cast<std::size_t>(lags) >= n) {
        throw Error(ErrorKind::InsufficientData, "lags " + std::to_string(lags) + " not below n_obs " +
                                                     std::to_string(n));
    }

    const double x_mean = mean_of(xs);
    const double y_mean = mean_of(ys);
    double sxx = 0.0, sxy = 0.0, syy = 0.0, x_scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - x_mean;
        const double dy = ys[i] - y_mean;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
        x_scale = std::max(x_scale, std::abs(xs[i]));
    }
    const double eps = 1e-14 * x_scale;
    if (sxx <= static_cast<double>(n) * eps * eps) {
        throw Error(ErrorKind::DegenerateRegressor, "regressor is constant");
    }
    if (syy == 0.0) throw Error(ErrorKind::InsufficientData, "dependent variable is constant");

    RegressionResult r;
    r.n_obs = n;
    r.lags = lags;
    r.beta = sxy / sxx;
    r.alpha = y_mean - r.beta * x_mean;

    // By Frisch-Waugh-Lovell the slope's sandwich variance only involves the
    // demeaned regressor times the residual.
    std::vector<double> g(n);
    double ssr = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double u = ys[i] - r.alpha - r.beta * xs[i];
        ssr += u * u;
        g[i] = (xs[i] - x_mean) * u;
    }
    r.beta_variance = long_run_sum(g, lags) / (sxx * sxx);
    r.t_stat = r.beta / std::sqrt(r.beta_variance);
    r.r_squared = std::clamp(1.0 - ssr / syy, 0.0, 1.0);
    return r;
}

std::string significance_stars(double t_stat) {
    const double a = std::abs(t_stat);
    if (a > 2.5758293035489004) return "***";
    if (a > 1.959963984540054) return "**";
    if (a > 1.6448536269514722) return "*";
    return "";
}

Table2 predictive_regressions(const metrics::ProxyPanel& panel, const metrics::ReturnPanel& rp,
                              const std::vector<std::string>& proxies, const std::vector<int>& horizons,
                              const LagPolicy& lags) {
    Table2 table;
    table.horizons = horizons;
    table.lag_policy = lags;
    for (const auto& name : proxies) {
        Table2Row row;
        row.proxy = name;
        const Series& x = panel.column(name);
        for (int h : horizons) {
            Table2Cell cell;
            cell.horizon = h;
            try {
                auto r = nw_regress(rp.at(h), x, lags.lags_for(h));
                r.proxy_name = name;
                r.horizon_days = h;
                cell.result = r;
            } catch (const Error& e) {
                cell.error = std::string(to_string(e.kind())) + ": " + e.what();
            }
            row.cells.push_back(std::move(cell));
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

Eigenpair leading_eigenpair(const std::vector<double>& matrix, std::size_t p,
                            const PowerIterationOptions& options) {
    if (p == 0 || matrix.size() != p * p) throw Error(ErrorKind::InvalidArgument, "matrix shape mismatch");

    // A slightly tilted all-ones start avoids being orthogonal to the
    // leading eigenvector of typical correlation matrices.
    std::vector<double> v(p), next(p);
    for (std::size_t i = 0; i < p; ++i) v[i] = 1.0 + 1e-3 * static_cast<double>(i + 1);
    auto normalize = [](std::vector<double>& w) {
        double norm = 0.0;
        for (double a : w) norm += a * a;
        norm = std::sqrt(norm);
        if (norm == 0.0) return false;
        for (double& a : w) a /= norm;
        return true;
    };
    normalize(v);

    for (int it = 1; it <= options.max_iterations; ++it) {
        for (std::size_t i = 0; i < p; ++i) {
            double s = 0.0;
            for (std::size_t j = 0; j < p; ++j) s += matrix[i * p + j] * v[j];
            next[i] = s;
        }
        if (!normalize(next)) throw Error(ErrorKind::ConvergenceFailure, "matrix annihilated the iterate");
        double diff = 0.0;
        for (std::size_t i = 0; i < p; ++i) diff = std::max(diff, std::abs(next[i] - v[i]));
        v.swap(next);
        if (diff < options.tolerance) {
            Eigenpair e;
            for (std::size_t i = 0; i < p; ++i) {
                double s = 0.0;
                for (std::size_t j = 0; j < p; ++j) s += matrix[i * p + j] * v[j];
                e.value += v[i] * s;
            }
            e.vector = v;
            e.iterations = it;
            return e;
        }
    }
    throw Error(ErrorKind::ConvergenceFailure,
                "power iteration did not converge in " + std::to_string(options.max_iterations) + " iterations");
}

PCAResult first_pc(const std::vector<Series>& columns, const std::vector<std::string>& names,
                   const PowerIterationOptions& options) {
    const std::size_t p = columns.size();
    if (p == 0) throw Error(ErrorKind::InvalidArgument, "no columns");
    const std::size_t len = columns.front().size();

    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < len; ++t) {
        bool all = true;
        for (const auto& c : columns) all = all && t < c.size() && c[t].has_value();
        if (all) rows.push_back(t);
    }
    if (rows.size() < p + 1) {
        throw Error(ErrorKind::InsufficientData, std::to_string(rows.size()) + " jointly defined rows for " +
                                                     std::to_string(p) + " columns");
    }

    PCAResult res;
    res.names = names.empty() ? std::vector<std::string>(p) : names;
    res.n_rows = rows.size();
    const double n = static_cast<double>(rows.size());

    std::vector<std::vector<double>> z(p, std::vector<double>(rows.size()));
    for (std::size_t j = 0; j < p; ++j) {
        double m = 0.0;
        for (std::size_t t : rows) m += *columns[j][t];
        m /= n;
        double ss = 0.0;
        for (std::size_t t : rows) ss += (*columns[j][t] - m) * (*columns[j][t] - m);
        const double sd = std::sqrt(ss / (n - 1.0));
        if (!(sd > 0.0)) {
            throw Error(ErrorKind::ZeroVarianceColumn,
                        "column " + (res.names[j].empty() ? std::to_string(j) : res.names[j]) +
                            " has zero variance");
        }
        res.column_means.push_back(m);
        res.column_sds.push_back(sd);
        for (std::size_t k = 0; k < rows.size(); ++k) z[j][k] = (*columns[j][rows[k]] - m) / sd;
    }

    std::vector<double> corr(p * p);
    for (std::size_t a = 0; a < p; ++a) {
        for (std::size_t b = a; b < p; ++b) {
            double s = 0.0;
            for (std::size_t k = 0; k < rows.size(); ++k) s += z[a][k] * z[b][k];
            corr[a * p + b] = corr[b * p + a] = s / (n - 1.0);
        }
    }

    auto eig = leading_eigenpair(corr, p, options);
    std::size_t largest = 0;
    for (std::size_t j = 1; j < p; ++j) {
        if (std::abs(eig.vector[j]) > std::abs(eig.vector[largest])) largest = j;
    }
    if (eig.vector[largest] < 0.0) {
        for (double& a : eig.vector) a = -a;
    }

    res.loadings = eig.vector;
    res.eigenvalue = eig.value;
    res.iterations = eig.iterations;
    res.explained_variance_fraction = std::clamp(eig.value / static_cast<double>(p), 0.0, 1.0);
    res.scores = Series(len);
    for (std::size_t k = 0; k < rows.size(); ++k) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += z[j][k] * res.loadings[j];
        res.scores[rows[k]] = s;
    }
    return res;
}

PCAResult attach_first_pc(metrics::ProxyPanel& panel) {
    std::vector<Series> cols;
    for (const auto& name : kFpcInputs) cols.push_back(panel.column(name));
    auto res = first_pc(cols, kFpcInputs);
    panel.fpc = res.scores;
    return res;
}

}  // namespace cryptoval::stats
