#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spe/dataset.hpp"
#include "spe/distributions.hpp"

namespace spe {

// One mixture component: a family tag plus its parameter vector.
struct DistributionSpec {
    Family family = Family::Gamma;
    DistParams params;
};

// theta = {pi, theta_0, theta_1}. Component 1 is the positive class.
struct MixtureParams {
    double pi = 0.5;
    DistributionSpec comp0, comp1;
};

// Priors: beta on pi, normal on location-kind parameters, gamma on
// positive-kind parameters (scales, shapes, dof), all on the natural scale.
// Defaults are weakly informative for scores normalized into (0, 1].
struct PriorSpec {
    double pi_beta_a = 1.0, pi_beta_b = 1.0;
    double location_mean = 0.5, location_sd = 0.25;
    double positive_shape = 2.0, positive_scale = 1.0;
};

// Likelihoods (natural log). The supervised form requires every item
// labeled and raises Contract otherwise; the semisupervised form
// marginalizes unlabeled items with a log-sum-exp per item.
double log_likelihood_supervised(const MixtureParams& theta, const ScoreDataset& data);
double log_likelihood_semisupervised(const MixtureParams& theta, const ScoreDataset& data);
double log_prior(const MixtureParams& theta, const PriorSpec& priors);
// Unnormalized: semisupervised log-likelihood + log prior.
double log_posterior(const MixtureParams& theta, const ScoreDataset& data,
                     const PriorSpec& priors);

// Precomputes per-score transforms so repeated likelihood evaluations over
// one dataset (the optimizer's hot loop) cost only arithmetic per item.
class MixtureLogLik {
  public:
    explicit MixtureLogLik(const ScoreDataset& data);

    double supervised(const MixtureParams& theta) const;
    double semisupervised(const MixtureParams& theta) const;

    const ScoreDataset& data() const { return *data_; }

  private:
    const ScoreDataset* data_;
    std::vector<double> log_scores_;
};

// Bijection between natural mixture parameters and the unconstrained
// coordinates used for optimization and sampling: logit(pi), identity on
// location-kind parameters, log on positive-kind parameters.
class Reparam {
  public:
    Reparam(Family family0, Family family1);

    int dim() const { return dim_; }
    Family family0() const { return f0_; }
    Family family1() const { return f1_; }

    std::vector<double> to_unconstrained(const MixtureParams& theta) const;
    MixtureParams to_natural(std::span<const double> z) const;
    // log |d theta / d z|; needed when a theta-space density is evaluated
    // through z-space draws.
    double log_jacobian(std::span<const double> z) const;

  private:
    Family f0_, f1_;
    int dim_;
    std::vector<ParamKind> kinds_;  // component params, comp0 then comp1
};

struct StartDiagnostic {
    int start_index = 0;
    double initial_log_posterior = 0.0;
    double final_log_posterior = 0.0;
    int iterations = 0;
    bool converged = false;
    bool usable = false;
};

struct MapResult {
    MixtureParams params;
    double log_posterior = 0.0;
    std::vector<StartDiagnostic> starts;
};

// MAP estimate via multi-start BFGS in unconstrained coordinates. Start 0
// is a moment-based initializer (split at the labeled-class boundary, or at
// the score median when a class has no labels); the rest are seeded
// perturbations of it. Deterministic given (data, priors, seed, n_starts).
MapResult map_estimate(const ScoreDataset& data, const PriorSpec& priors,
                       Family family0, Family family1, int n_starts,
                       std::uint64_t seed);

struct FamilyPairResult {
    Family family0, family1;
    MapResult map;
    // (pair, attained log posterior or -inf) for every candidate pair tried.
    std::vector<std::pair<std::string, double>> tried;
};

// Runs map_estimate for every ordered candidate pair (p0, p1) and keeps the
// pair with the highest attained log posterior.
FamilyPairResult select_family_pair(const ScoreDataset& data, const PriorSpec& priors,
                                    std::span<const Family> candidates, int n_starts,
                                    std::uint64_t seed);

}  // namespace spe
