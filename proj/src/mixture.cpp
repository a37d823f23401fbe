#include "spe/mixture.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "spe/error.hpp"
#include "spe/optim.hpp"
#include "spe/rng.hpp"

namespace spe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;

// log(exp(a) + exp(b)) without overflow; respects -inf arguments.
double log_add_exp(double a, double b) {
    if (a == -kInf) return b;
    if (b == -kInf) return a;
    const double m = std::max(a, b);
    return m + std::log1p(std::exp(std::min(a, b) - m));
}

double log1p_exp(double x) { return x > 30.0 ? x : std::log1p(std::exp(x)); }

double logistic(double z) {
    return z >= 0.0 ? 1.0 / (1.0 + std::exp(-z)) : std::exp(z) / (1.0 + std::exp(z));
}

double normal_log_pdf(double x, double mean, double sd) {
    const double z = (x - mean) / sd;
    return -0.5 * z * z - std::log(sd) - kLogSqrt2Pi;
}

double gamma_log_pdf(double x, double shape, double scale) {
    if (x <= 0.0) return -kInf;
    return (shape - 1.0) * std::log(x) - x / scale - std::lgamma(shape) -
           shape * std::log(scale);
}

double beta_log_pdf(double x, double a, double b) {
    if (x < 0.0 || x > 1.0) return -kInf;
    const double lbeta = std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    double t = -lbeta;
    if (a != 1.0) t += (a - 1.0) * std::log(x);        // log(0) -> -inf when a > 1
    if (b != 1.0) t += (b - 1.0) * std::log1p(-x);
    return t;
}

struct PreparedMixture {
    PreparedDist p0, p1;
    double log_pi, log_1m_pi;

    explicit PreparedMixture(const MixtureParams& theta)
        : p0(theta.comp0.family, theta.comp0.params),
          p1(theta.comp1.family, theta.comp1.params),
          log_pi(std::log(theta.pi)),
          log_1m_pi(std::log1p(-theta.pi)) {
        if (!(theta.pi >= 0.0 && theta.pi <= 1.0))
            throw Error(ErrorKind::ParameterDomain,
                        "mixture weight must lie in [0, 1], got " +
                            std::to_string(theta.pi));
    }
};

}  // namespace

// ---------------------------------------------------------------------------
// Likelihood evaluator
// ---------------------------------------------------------------------------

MixtureLogLik::MixtureLogLik(const ScoreDataset& data) : data_(&data) {
    log_scores_.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double s = data.scores()[i];
        log_scores_[i] = s > 0.0 ? std::log(s) : -kInf;
    }
}

double MixtureLogLik::supervised(const MixtureParams& theta) const {
    if (!data_->fully_labeled())
        throw Error(ErrorKind::Contract,
                    "supervised likelihood requires every item labeled; " +
                        std::to_string(data_->unlabeled_indices().size()) +
                        " items are unlabeled");
    const PreparedMixture m(theta);
    double total = 0.0;
    for (std::size_t i = 0; i < data_->size(); ++i) {
        const double s = data_->scores()[i];
        const double ls = log_scores_[i];
        total += data_->labels()[i] == 1 ? m.log_pi + m.p1.log_pdf(s, ls)
                                         : m.log_1m_pi + m.p0.log_pdf(s, ls);
    }
    return total;
}

double MixtureLogLik::semisupervised(const MixtureParams& theta) const {
    const PreparedMixture m(theta);
    double total = 0.0;
    const auto& scores = data_->scores();
    const auto& labels = data_->labels();
    for (std::size_t i = 0; i < data_->size(); ++i) {
        const double s = scores[i];
        const double ls = log_scores_[i];
        if (labels[i] < 0) {
            total += log_add_exp(m.log_1m_pi + m.p0.log_pdf(s, ls),
                                 m.log_pi + m.p1.log_pdf(s, ls));
        } else if (labels[i] == 1) {
            total += m.log_pi + m.p1.log_pdf(s, ls);
        } else {
            total += m.log_1m_pi + m.p0.log_pdf(s, ls);
        }
    }
    return total;
}

double log_likelihood_supervised(const MixtureParams& theta, const ScoreDataset& data) {
    return MixtureLogLik(data).supervised(theta);
}

double log_likelihood_semisupervised(const MixtureParams& theta,
                                     const ScoreDataset& data) {
    return MixtureLogLik(data).semisupervised(theta);
}

double log_prior(const MixtureParams& theta, const PriorSpec& priors) {
    double total = beta_log_pdf(theta.pi, priors.pi_beta_a, priors.pi_beta_b);
    for (const DistributionSpec* comp : {&theta.comp0, &theta.comp1}) {
        const auto& kinds = param_kinds(comp->family);
        if (comp->params.v.size() != kinds.size())
            throw Error(ErrorKind::ParameterDomain,
                        family_name(comp->family) + ": wrong parameter count");
        for (std::size_t d = 0; d < kinds.size(); ++d) {
            const double x = comp->params.v[d];
            total += kinds[d] == ParamKind::Location
                         ? normal_log_pdf(x, priors.location_mean, priors.location_sd)
                         : gamma_log_pdf(x, priors.positive_shape, priors.positive_scale);
        }
    }
    return total;
}

double log_posterior(const MixtureParams& theta, const ScoreDataset& data,
                     const PriorSpec& priors) {
    const double lp = log_prior(theta, priors);
    if (lp == -kInf) return -kInf;
    return log_likelihood_semisupervised(theta, data) + lp;
}

// ---------------------------------------------------------------------------
// Reparameterization
// ---------------------------------------------------------------------------

Reparam::Reparam(Family family0, Family family1) : f0_(family0), f1_(family1) {
    const auto& k0 = param_kinds(f0_);
    const auto& k1 = param_kinds(f1_);
    kinds_.insert(kinds_.end(), k0.begin(), k0.end());
    kinds_.insert(kinds_.end(), k1.begin(), k1.end());
    dim_ = 1 + static_cast<int>(kinds_.size());
}

std::vector<double> Reparam::to_unconstrained(const MixtureParams& theta) const {
    if (theta.comp0.family != f0_ || theta.comp1.family != f1_)
        throw Error(ErrorKind::Contract, "reparam/family mismatch");
    std::vector<double> z;
    z.reserve(static_cast<std::size_t>(dim_));
    const double pi = std::clamp(theta.pi, 1e-12, 1.0 - 1e-12);
    z.push_back(std::log(pi) - std::log1p(-pi));
    std::size_t k = 0;
    for (const DistributionSpec* comp : {&theta.comp0, &theta.comp1})
        for (double x : comp->params.v)
            z.push_back(kinds_[k++] == ParamKind::Positive ? std::log(x) : x);
    return z;
}

MixtureParams Reparam::to_natural(std::span<const double> z) const {
    if (static_cast<int>(z.size()) != dim_)
        throw Error(ErrorKind::Contract, "reparam dimension mismatch");
    MixtureParams theta;
    theta.pi = logistic(z[0]);
    theta.comp0.family = f0_;
    theta.comp1.family = f1_;
    const std::size_t d0 = static_cast<std::size_t>(param_dim(f0_));
    std::size_t k = 0;
    for (std::size_t i = 1; i < z.size(); ++i, ++k) {
        const double x = kinds_[k] == ParamKind::Positive ? std::exp(z[i]) : z[i];
        (k < d0 ? theta.comp0.params.v : theta.comp1.params.v).push_back(x);
    }
    return theta;
}

double Reparam::log_jacobian(std::span<const double> z) const {
    if (static_cast<int>(z.size()) != dim_)
        throw Error(ErrorKind::Contract, "reparam dimension mismatch");
    // d pi / d z0 = sigma(z0) (1 - sigma(z0)); d exp(z) / d z = exp(z).
    double lj = -(log1p_exp(z[0]) + log1p_exp(-z[0]));
    for (std::size_t k = 0; k < kinds_.size(); ++k)
        if (kinds_[k] == ParamKind::Positive) lj += z[k + 1];
    return lj;
}

// ---------------------------------------------------------------------------
// MAP estimation
// ---------------------------------------------------------------------------

namespace {

// Moment initializer: assign items above/below a split point to the
// positive/negative component. The split comes from labeled class means
// when both classes are represented, else from the score median, which
// also anchors component 1 to the higher-scoring cluster when no labels
// exist.
MixtureParams initial_theta(const ScoreDataset& data, Family f0, Family f1) {
    const auto& scores = data.scores();
    const auto& labels = data.labels();
    const std::size_t n = scores.size();

    double pos_sum = 0, neg_sum = 0;
    std::size_t pos_n = 0, neg_n = 0;
    for (std::int32_t i : data.labeled()) {
        if (labels[static_cast<std::size_t>(i)] == 1) {
            pos_sum += scores[static_cast<std::size_t>(i)];
            ++pos_n;
        } else {
            neg_sum += scores[static_cast<std::size_t>(i)];
            ++neg_n;
        }
    }

    std::vector<double> sorted(scores.begin(), scores.end());
    std::sort(sorted.begin(), sorted.end());
    double split;
    if (pos_n > 0 && neg_n > 0)
        split = 0.5 * (pos_sum / static_cast<double>(pos_n) +
                       neg_sum / static_cast<double>(neg_n));
    else
        split = sorted[n / 2];

    auto cut = std::upper_bound(sorted.begin(), sorted.end(), split);
    std::size_t n_low = static_cast<std::size_t>(cut - sorted.begin());
    // Keep both sides large enough for a moment fit.
    const std::size_t floor_n = std::max<std::size_t>(3, n / 20);
    n_low = std::clamp(n_low, std::min(floor_n, n - 1), n - std::min(floor_n, n - 1));

    MixtureParams theta;
    theta.comp0.family = f0;
    theta.comp1.family = f1;
    theta.comp0.params = moment_init(f0, std::span<const double>(sorted).first(n_low));
    theta.comp1.params = moment_init(f1, std::span<const double>(sorted).subspan(n_low));
    if (pos_n + neg_n > 0)
        theta.pi = std::clamp(static_cast<double>(pos_n) /
                                  static_cast<double>(pos_n + neg_n),
                              0.02, 0.98);
    else
        theta.pi = static_cast<double>(n - n_low) / static_cast<double>(n);
    return theta;
}

}  // namespace

MapResult map_estimate(const ScoreDataset& data, const PriorSpec& priors,
                       Family family0, Family family1, int n_starts,
                       std::uint64_t seed) {
    if (n_starts < 1) throw Error(ErrorKind::Domain, "map_estimate: n_starts must be >= 1");

    const MixtureLogLik loglik(data);
    const Reparam reparam(family0, family1);
    const auto objective = [&](std::span<const double> z) {
        try {
            const MixtureParams theta = reparam.to_natural(z);
            const double lp = log_prior(theta, priors);
            if (lp == -kInf) return kInf;
            return -(loglik.semisupervised(theta) + lp);
        } catch (const Error&) {
            return kInf;
        }
    };

    const std::vector<double> z_base =
        reparam.to_unconstrained(initial_theta(data, family0, family1));

    MapResult result;
    bool have_best = false;
    double best_value = kInf;

    for (int s = 0; s < n_starts; ++s) {
        std::vector<double> z0 = z_base;
        if (s > 0) {
            Rng rng(mix_seed(seed, static_cast<std::uint64_t>(s)));
            for (double& zd : z0) zd += 0.3 * rng.normal();
        }
        const OptimResult opt = minimize_bfgs(objective, z0);

        StartDiagnostic diag;
        diag.start_index = s;
        diag.initial_log_posterior = -objective(z0);
        diag.final_log_posterior = -opt.value;
        diag.iterations = opt.iterations;
        diag.converged = opt.converged;
        diag.usable = opt.usable;
        result.starts.push_back(diag);

        if (opt.usable && (!have_best || opt.value < best_value)) {
            // Strict < keeps ties resolved by the lowest start index.
            have_best = true;
            best_value = opt.value;
            result.params = reparam.to_natural(opt.x);
            result.log_posterior = -opt.value;
        }
    }

    if (!have_best) {
        std::ostringstream msg;
        msg << "MAP estimation failed for (" << family_name(family0) << ", "
            << family_name(family1) << "); all " << n_starts << " starts infeasible:";
        for (const auto& d : result.starts)
            msg << " [start " << d.start_index << " init " << d.initial_log_posterior
                << "]";
        throw Error(ErrorKind::Estimation, msg.str());
    }
    return result;
}

FamilyPairResult select_family_pair(const ScoreDataset& data, const PriorSpec& priors,
                                    std::span<const Family> candidates, int n_starts,
                                    std::uint64_t seed) {
    if (candidates.empty())
        throw Error(ErrorKind::Domain, "select_family_pair: no candidate families");

    FamilyPairResult best;
    bool have_best = false;
    std::vector<std::pair<std::string, double>> tried;

    std::uint64_t pair_index = 0;
    for (Family f0 : candidates) {
        for (Family f1 : candidates) {
            const std::string tag = family_name(f0) + "/" + family_name(f1);
            double attained = -kInf;
            try {
                MapResult map =
                    map_estimate(data, priors, f0, f1, n_starts, mix_seed(seed, pair_index));
                attained = map.log_posterior;
                if (!have_best || attained > best.map.log_posterior) {
                    best.family0 = f0;
                    best.family1 = f1;
                    best.map = std::move(map);
                    have_best = true;
                }
            } catch (const Error&) {
                // recorded below with -inf; selection continues
            }
            tried.emplace_back(tag, attained);
            ++pair_index;
        }
    }
    if (!have_best)
        throw Error(ErrorKind::Estimation,
                    "family selection failed: no candidate pair produced a usable MAP");
    best.tried = std::move(tried);
    return best;
}

}  // namespace spe
