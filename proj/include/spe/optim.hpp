#pragma once

#include <functional>
#include <span>
#include <vector>

namespace spe {

using ObjectiveFn = std::function<double(std::span<const double>)>;

struct OptimOptions {
    int max_iterations = 200;
    double gradient_tol = 1e-6;   // ||grad||_2 convergence threshold
    double fd_step = 1e-6;        // relative central-difference step
    double max_step = 10.0;       // per-coordinate cap on a line-search step
};

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int iterations = 0;
    int evaluations = 0;
    bool converged = false;   // gradient tolerance reached
    bool usable = false;      // finite objective attained at x
};

// Quasi-Newton (BFGS, numerical gradients) minimizer for small smooth
// problems in unconstrained coordinates. The objective may return +inf or
// NaN outside its useful region; the line search backs off. The result is
// never worse than the starting point.
OptimResult minimize_bfgs(const ObjectiveFn& fn, std::vector<double> x0,
                          const OptimOptions& options = {});

}  // namespace spe
