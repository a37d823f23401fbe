#pragma once

#include <span>
#include <string>
#include <vector>

#include "spe/rng.hpp"

namespace spe {

// Parametric score-distribution families. Families whose natural support
// extends below zero (the truncated-* pair and both Gumbel skews) are
// truncated at s = 0 and renormalized, so every family has its mass in
// [0, inf). Scores live in (0, 1] after ingestion but the layer accepts
// any nonnegative score.
enum class Family {
    TruncatedNormal,
    Gamma,
    LogNormal,
    GumbelLeft,
    GumbelRight,
    TruncatedStudentT,
    Gompertz,
    FrechetRight,
};

enum class ParamKind { Location, Positive };

// Parameter vector, natural scale. Layout per family:
//   truncated-normal:    location, scale
//   gamma:               shape, scale
//   log-normal:          log-location, log-scale
//   gumbel-left/right:   location, scale
//   truncated-student-t: location, scale, dof
//   gompertz:            shape, rate
//   frechet-right:       shape, scale
struct DistParams {
    std::vector<double> v;
};

std::vector<Family> all_families();
int param_dim(Family family);
const std::vector<ParamKind>& param_kinds(Family family);
std::string family_name(Family family);
std::string family_abbrev(Family family);
// Accepts full names and the short tags (n, g, ln, g-l, g-r, t, gz, f-r).
Family family_from_name(const std::string& name);

// Scalar density/tail interface. Invalid parameters raise ParameterDomain;
// a score outside the support is not an error (log_pdf -inf, cdf 0/1).
double log_pdf(Family family, const DistParams& params, double s);
double cdf(Family family, const DistParams& params, double s);
double survival(Family family, const DistParams& params, double s);
// |cdf(quantile(p)) - p| <= 1e-9; quantile(0) = 0, quantile(1) = +inf.
double quantile(Family family, const DistParams& params, double p);
// Inverse-CDF draw; deterministic given the stream state.
double sample(Family family, const DistParams& params, Rng& rng);

// Fast path: validates the parameters once and hoists the per-evaluation
// constants (normalizers, truncation mass) out of the per-score work.
// log_s must equal log(s) for s > 0 (any value is ignored when s <= 0);
// callers that evaluate many parameter vectors against fixed scores cache
// the logs once.
class PreparedDist {
  public:
    PreparedDist(Family family, const DistParams& params);

    double log_pdf(double s, double log_s) const;
    double log_pdf(double s) const;

    Family family() const { return family_; }

  private:
    Family family_;
    double a_ = 0.0, b_ = 0.0, c_ = 0.0;   // natural parameters
    double k0_ = 0.0, k1_ = 0.0;           // hoisted constants
};

// Moment-matched starting point for mle_fit; also seeds the mixture
// optimizer's starts.
DistParams moment_init(Family family, std::span<const double> scores);

// Maximum-likelihood fit: moment-matched initializer, then quasi-Newton
// refinement with positive parameters optimized on the log scale. The
// returned likelihood never falls below the initializer's.
DistParams mle_fit(Family family, std::span<const double> scores);

struct RankedFamily {
    Family family;
    bool fitted = false;         // false marks a fit failure; ranked last
    double holdout_log_lik = 0;  // undefined when !fitted
    DistParams params;           // MLE params on the training split
};

// Single random train/holdout split; families ordered by held-out
// log-likelihood, fit failures last.
std::vector<RankedFamily> rank_families(std::span<const double> scores,
                                        double holdout_fraction, Rng& rng,
                                        std::span<const Family> families = {});

}  // namespace spe
