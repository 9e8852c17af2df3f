#include "greenlab/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "greenlab/errors.hpp"

namespace greenlab {

namespace {

void clamp_into(std::vector<double>& x, const std::vector<double>& lo,
                const std::vector<double>& hi) {
    for (std::size_t j = 0; j < x.size(); ++j) x[j] = std::clamp(x[j], lo[j], hi[j]);
}

}  // namespace

SimplexResult minimize_simplex(const std::function<double(const std::vector<double>&)>& f,
                               std::vector<double> x0, const std::vector<double>& lower,
                               const std::vector<double>& upper, const SimplexOptions& options) {
    const std::size_t n = x0.size();
    if (n == 0) throw CalibrationError("simplex needs at least one dimension");
    if (lower.size() != n || upper.size() != n)
        throw CalibrationError("bound vectors must match the dimension");
    for (std::size_t j = 0; j < n; ++j)
        if (!(lower[j] < upper[j])) throw CalibrationError("bounds must satisfy lower < upper");
    clamp_into(x0, lower, upper);

    SimplexResult result;
    result.x = x0;
    result.value = std::numeric_limits<double>::infinity();

    long evals = 0;
    auto eval = [&](const std::vector<double>& x) {
        const double v = f(x);
        ++evals;
        if (v < result.value) {
            result.value = v;
            result.x = x;
        }
        return v;
    };

    std::vector<std::vector<double>> v(n + 1);
    std::vector<double> fv(n + 1);

    auto build_simplex = [&](const std::vector<double>& center, double step_rel) {
        v.assign(n + 1, center);
        for (std::size_t j = 0; j < n; ++j) {
            const double step = step_rel * std::max(std::abs(center[j]), 1e-8);
            auto& p = v[j + 1];
            p[j] += step;
            clamp_into(p, lower, upper);
            if (p[j] == center[j]) {
                p[j] = center[j] - step;  // pinned at the upper bound, go down
                clamp_into(p, lower, upper);
            }
        }
        for (std::size_t i = 0; i <= n; ++i) fv[i] = eval(v[i]);
    };

    auto spread = [&] {
        const auto [lo_it, hi_it] = std::minmax_element(fv.begin(), fv.end());
        return *hi_it - *lo_it;
    };

    // One Nelder-Mead run on the current simplex; true if the spread converged.
    auto iterate = [&](long budget) {
        while (evals < budget) {
            std::vector<std::size_t> order(n + 1);
            std::iota(order.begin(), order.end(), std::size_t{0});
            std::sort(order.begin(), order.end(),
                      [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
            const std::size_t best = order[0], second_worst = order[n - 1], worst = order[n];

            if (spread() <= options.tolerance * (1.0 + std::abs(fv[best]))) return true;

            std::vector<double> centroid(n, 0.0);
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == worst) continue;
                for (std::size_t j = 0; j < n; ++j) centroid[j] += v[i][j];
            }
            for (double& c : centroid) c /= static_cast<double>(n);

            auto along = [&](double t) {
                std::vector<double> x(n);
                for (std::size_t j = 0; j < n; ++j)
                    x[j] = centroid[j] + t * (centroid[j] - v[worst][j]);
                clamp_into(x, lower, upper);
                return x;
            };

            const auto xr = along(1.0);
            const double fr = eval(xr);
            if (fr < fv[best]) {
                const auto xe = along(2.0);
                const double fe = eval(xe);
                if (fe < fr) {
                    v[worst] = xe;
                    fv[worst] = fe;
                } else {
                    v[worst] = xr;
                    fv[worst] = fr;
                }
                continue;
            }
            if (fr < fv[second_worst]) {
                v[worst] = xr;
                fv[worst] = fr;
                continue;
            }
            if (fr < fv[worst]) {
                const auto xc = along(0.5);  // outside contraction
                const double fc = eval(xc);
                if (fc <= fr) {
                    v[worst] = xc;
                    fv[worst] = fc;
                    continue;
                }
            } else {
                const auto xc = along(-0.5);  // inside contraction
                const double fc = eval(xc);
                if (fc < fv[worst]) {
                    v[worst] = xc;
                    fv[worst] = fc;
                    continue;
                }
            }
            // Shrink toward the best vertex.
            for (std::size_t i = 0; i <= n; ++i) {
                if (i == best) continue;
                for (std::size_t j = 0; j < n; ++j)
                    v[i][j] = v[best][j] + 0.5 * (v[i][j] - v[best][j]);
                clamp_into(v[i], lower, upper);
                fv[i] = eval(v[i]);
                if (evals >= budget) return false;
            }
        }
        return false;
    };

    const long budget = std::max<long>(options.max_evaluations, static_cast<long>(n) + 2);
    build_simplex(x0, options.initial_step_rel);
    result.converged = iterate(budget);

    // Re-seed shrinking simplexes around the incumbent until they stop helping.
    double step = options.initial_step_rel;
    for (int r = 0; r < options.max_restarts && evals < budget; ++r) {
        step *= 0.25;
        const double before = result.value;
        build_simplex(result.x, step);
        const bool conv = iterate(budget);
        result.converged = result.converged || conv;
        if (!(result.value < before - options.tolerance * (1.0 + std::abs(before)))) break;
    }

    result.evaluations = evals;
    return result;
}

}  // namespace greenlab
