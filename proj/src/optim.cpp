#include "spe/optim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace spe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

double norm2(const std::vector<double>& a) { return std::sqrt(dot(a, a)); }

}  // namespace

OptimResult minimize_bfgs(const ObjectiveFn& fn, std::vector<double> x0,
                          const OptimOptions& opt) {
    const std::size_t n = x0.size();
    OptimResult res;
    res.x = x0;

    int evals = 0;
    const auto eval = [&](std::span<const double> x) {
        ++evals;
        const double v = fn(x);
        return std::isnan(v) ? kInf : v;
    };

    double fx = eval(x0);
    res.value = fx;
    res.usable = std::isfinite(fx);
    if (!res.usable) {
        res.evaluations = evals;
        return res;  // nothing to improve from an infeasible start
    }

    const auto gradient = [&](const std::vector<double>& x, std::vector<double>& g) {
        std::vector<double> xp = x;
        for (std::size_t d = 0; d < n; ++d) {
            const double h = opt.fd_step * std::max(1.0, std::fabs(x[d]));
            xp[d] = x[d] + h;
            const double fp = eval(xp);
            xp[d] = x[d] - h;
            const double fm = eval(xp);
            xp[d] = x[d];
            if (std::isfinite(fp) && std::isfinite(fm)) {
                g[d] = (fp - fm) / (2.0 * h);
            } else if (std::isfinite(fp)) {
                g[d] = (fp - fx) / h;  // one-sided near an infeasible wall
            } else if (std::isfinite(fm)) {
                g[d] = (fx - fm) / h;
            } else {
                g[d] = 0.0;
            }
        }
    };

    std::vector<double> x = x0, g(n), g_new(n);
    // Inverse Hessian approximation, dense; problems here have <= 7 dims.
    std::vector<std::vector<double>> H(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) H[i][i] = 1.0;

    gradient(x, g);
    int stalls = 0;

    for (int iter = 0; iter < opt.max_iterations; ++iter) {
        res.iterations = iter;
        if (norm2(g) < opt.gradient_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> dir(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) dir[i] -= H[i][j] * g[j];
        double slope = dot(dir, g);
        if (!(slope < 0.0)) {  // not a descent direction; reset to steepest
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t j = 0; j < n; ++j) H[i][j] = 0.0;
                H[i][i] = 1.0;
                dir[i] = -g[i];
            }
            slope = dot(dir, g);
            if (!(slope < 0.0)) break;
        }

        // Clamp the raw step so exp() reparameterizations cannot overflow.
        const double dmax = *std::max_element(dir.begin(), dir.end(),
                                              [](double a, double b) {
                                                  return std::fabs(a) < std::fabs(b);
                                              });
        double alpha = 1.0;
        if (std::fabs(dmax) > opt.max_step) alpha = opt.max_step / std::fabs(dmax);

        // Backtracking Armijo line search.
        double f_new = kInf;
        std::vector<double> x_new(n);
        bool accepted = false;
        for (int ls = 0; ls < 50; ++ls) {
            for (std::size_t i = 0; i < n; ++i) x_new[i] = x[i] + alpha * dir[i];
            f_new = eval(x_new);
            if (std::isfinite(f_new) && f_new <= fx + 1e-4 * alpha * slope) {
                accepted = true;
                break;
            }
            alpha *= 0.5;
        }
        if (!accepted) break;

        gradient(x_new, g_new);

        // BFGS inverse update; skipped when the curvature pair is unusable.
        std::vector<double> sv(n), yv(n);
        for (std::size_t i = 0; i < n; ++i) {
            sv[i] = x_new[i] - x[i];
            yv[i] = g_new[i] - g[i];
        }
        const double sy = dot(sv, yv);
        if (sy > 1e-12) {
            const double rho = 1.0 / sy;
            std::vector<double> Hy(n, 0.0);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j) Hy[i] += H[i][j] * yv[j];
            const double yHy = dot(yv, Hy);
            for (std::size_t i = 0; i < n; ++i)
                for (std::size_t j = 0; j < n; ++j)
                    H[i][j] += (1.0 + rho * yHy) * rho * sv[i] * sv[j] -
                               rho * (Hy[i] * sv[j] + sv[i] * Hy[j]);
        }

        const double improvement = fx - f_new;
        x = x_new;
        fx = f_new;
        g = g_new;
        if (improvement < 1e-12 * (1.0 + std::fabs(fx))) {
            if (++stalls >= 2) break;
        } else {
            stalls = 0;
        }
    }

    res.x = x;
    res.value = fx;
    res.evaluations = evals;
    res.usable = std::isfinite(fx);
    return res;
}

}  // namespace spe
