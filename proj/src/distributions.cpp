#include "spe/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <boost/math/distributions/gamma.hpp>
#include <boost/math/distributions/lognormal.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include "spe/error.hpp"
#include "spe/optim.hpp"

namespace spe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log sqrt(2*pi)
constexpr double kEulerGamma = 0.57721566490153286061;

using boost::math::gamma_distribution;
using boost::math::lognormal_distribution;
using boost::math::normal_distribution;
using boost::math::students_t_distribution;

const normal_distribution<> kStdNormal(0.0, 1.0);

double phi_cdf(double z) { return boost::math::cdf(kStdNormal, z); }
double phi_sf(double z) { return boost::math::cdf(boost::math::complement(kStdNormal, z)); }
double phi_inv(double p) { return boost::math::quantile(kStdNormal, p); }

void require(bool ok, ErrorKind kind, const std::string& msg) {
    if (!ok) throw Error(kind, msg);
}

bool pos_finite(double x) { return std::isfinite(x) && x > 0.0; }

struct FamilyMeta {
    const char* name;
    const char* abbrev;
    std::vector<ParamKind> kinds;
};

const FamilyMeta& meta(Family f) {
    static const FamilyMeta table[] = {
        {"truncated-normal", "n", {ParamKind::Location, ParamKind::Positive}},
        {"gamma", "g", {ParamKind::Positive, ParamKind::Positive}},
        {"log-normal", "ln", {ParamKind::Location, ParamKind::Positive}},
        {"gumbel-left", "g-l", {ParamKind::Location, ParamKind::Positive}},
        {"gumbel-right", "g-r", {ParamKind::Location, ParamKind::Positive}},
        {"truncated-student-t", "t",
         {ParamKind::Location, ParamKind::Positive, ParamKind::Positive}},
        {"gompertz", "gz", {ParamKind::Positive, ParamKind::Positive}},
        {"frechet-right", "f-r", {ParamKind::Positive, ParamKind::Positive}},
    };
    return table[static_cast<int>(f)];
}

void validate_params(Family f, const DistParams& p) {
    const auto& kinds = meta(f).kinds;
    require(p.v.size() == kinds.size(), ErrorKind::ParameterDomain,
            family_name(f) + " expects " + std::to_string(kinds.size()) +
                " parameters, got " + std::to_string(p.v.size()));
    for (std::size_t d = 0; d < kinds.size(); ++d) {
        if (kinds[d] == ParamKind::Positive)
            require(pos_finite(p.v[d]), ErrorKind::ParameterDomain,
                    family_name(f) + " parameter " + std::to_string(d) +
                        " must be finite and > 0");
        else
            require(std::isfinite(p.v[d]), ErrorKind::ParameterDomain,
                    family_name(f) + " parameter " + std::to_string(d) +
                        " must be finite");
    }
}

}  // namespace

std::vector<Family> all_families() {
    return {Family::TruncatedNormal, Family::Gamma,           Family::LogNormal,
            Family::GumbelLeft,      Family::GumbelRight,     Family::TruncatedStudentT,
            Family::Gompertz,        Family::FrechetRight};
}

int param_dim(Family family) { return static_cast<int>(meta(family).kinds.size()); }

const std::vector<ParamKind>& param_kinds(Family family) { return meta(family).kinds; }

std::string family_name(Family family) { return meta(family).name; }

std::string family_abbrev(Family family) { return meta(family).abbrev; }

Family family_from_name(const std::string& name) {
    for (Family f : all_families())
        if (name == meta(f).name || name == meta(f).abbrev) return f;
    throw Error(ErrorKind::Domain, "unknown family tag '" + name + "'");
}

// ---------------------------------------------------------------------------
// PreparedDist: parameter validation + hoisted normalization constants.
// ---------------------------------------------------------------------------

PreparedDist::PreparedDist(Family family, const DistParams& params) : family_(family) {
    validate_params(family, params);
    a_ = params.v[0];
    b_ = params.v[1];
    c_ = params.v.size() > 2 ? params.v[2] : 0.0;

    switch (family_) {
        case Family::TruncatedNormal: {
            const double z_mass = phi_sf(-a_ / b_);  // P(X > 0), X ~ N(a, b)
            k0_ = -std::log(b_) - kLogSqrt2Pi - std::log(z_mass);
            k1_ = 1.0 / b_;
            break;
        }
        case Family::Gamma:
            k0_ = -std::lgamma(a_) - a_ * std::log(b_);
            k1_ = 1.0 / b_;
            break;
        case Family::LogNormal:
            k0_ = -std::log(b_) - kLogSqrt2Pi;
            k1_ = 1.0 / b_;
            break;
        case Family::GumbelLeft: {
            // log Z with Z = exp(-exp(-a/b)); overflows only for a/b << 0.
            const double log_z = -std::exp(-a_ / b_);
            k0_ = -std::log(b_) - log_z;
            k1_ = 1.0 / b_;
            break;
        }
        case Family::GumbelRight: {
            const double z_mass = -std::expm1(-std::exp(a_ / b_));  // 1 - F(0)
            k0_ = -std::log(b_) - std::log(z_mass);
            k1_ = 1.0 / b_;
            break;
        }
        case Family::TruncatedStudentT: {
            const students_t_distribution<> st(c_);
            const double z_mass =
                boost::math::cdf(boost::math::complement(st, -a_ / b_));
            // Student-t normalizer: lgamma((v+1)/2) - lgamma(v/2) - 0.5*log(v*pi)
            k0_ = std::lgamma(0.5 * (c_ + 1.0)) - std::lgamma(0.5 * c_) -
                  0.5 * std::log(c_ * boost::math::constants::pi<double>()) -
                  std::log(b_) - std::log(z_mass);
            k1_ = 1.0 / b_;
            break;
        }
        case Family::Gompertz:
            k0_ = std::log(a_) + std::log(b_);
            k1_ = 0.0;
            break;
        case Family::FrechetRight:
            k0_ = std::log(a_) - std::log(b_);
            k1_ = std::log(b_);
            break;
    }
    require(std::isfinite(k0_), ErrorKind::ParameterDomain,
            family_name(family_) + ": truncation renormalization not representable");
}

double PreparedDist::log_pdf(double s, double log_s) const {
    switch (family_) {
        case Family::TruncatedNormal: {
            if (s < 0.0) return -kInf;
            const double z = (s - a_) * k1_;
            return k0_ - 0.5 * z * z;
        }
        case Family::Gamma:
            if (s <= 0.0) return -kInf;
            return k0_ + (a_ - 1.0) * log_s - s * k1_;
        case Family::LogNormal: {
            if (s <= 0.0) return -kInf;
            const double z = (log_s - a_) * k1_;
            return k0_ - log_s - 0.5 * z * z;
        }
        case Family::GumbelLeft: {
            if (s < 0.0) return -kInf;
            const double z = (s - a_) * k1_;
            return k0_ + z - std::exp(z);
        }
        case Family::GumbelRight: {
            if (s < 0.0) return -kInf;
            const double z = (s - a_) * k1_;
            return k0_ - z - std::exp(-z);
        }
        case Family::TruncatedStudentT: {
            if (s < 0.0) return -kInf;
            const double z = (s - a_) * k1_;
            return k0_ - 0.5 * (c_ + 1.0) * std::log1p(z * z / c_);
        }
        case Family::Gompertz:
            if (s < 0.0) return -kInf;
            return k0_ + b_ * s - a_ * std::expm1(b_ * s);
        case Family::FrechetRight: {
            if (s <= 0.0) return -kInf;
            const double u = log_s - k1_;  // log(s / scale)
            return k0_ - (1.0 + a_) * u - std::exp(-a_ * u);
        }
    }
    return -kInf;
}

double PreparedDist::log_pdf(double s) const {
    return log_pdf(s, s > 0.0 ? std::log(s) : 0.0);
}

double log_pdf(Family family, const DistParams& params, double s) {
    return PreparedDist(family, params).log_pdf(s);
}

// ---------------------------------------------------------------------------
// cdf / survival. Each side is computed from its own stable expression; the
// pair agrees with 1 - other to ~1e-15 on interior points.
// ---------------------------------------------------------------------------

double cdf(Family family, const DistParams& params, double s) {
    validate_params(family, params);
    const double a = params.v[0], b = params.v[1];
    if (std::isnan(s)) throw Error(ErrorKind::Domain, "cdf: score is NaN");
    if (s <= 0.0) return 0.0;
    switch (family) {
        case Family::TruncatedNormal: {
            const double f0 = phi_cdf(-a / b);
            const double z_mass = phi_sf(-a / b);
            return std::min(1.0, (phi_cdf((s - a) / b) - f0) / z_mass);
        }
        case Family::Gamma:
            return boost::math::cdf(gamma_distribution<>(a, b), s);
        case Family::LogNormal:
            return boost::math::cdf(lognormal_distribution<>(a, b), s);
        case Family::GumbelLeft: {
            // F(x) = 1 - exp(-exp((x-a)/b)), truncated at 0.
            const double f0 = -std::expm1(-std::exp(-a / b));
            const double z_mass = std::exp(-std::exp(-a / b));
            const double fs = -std::expm1(-std::exp((s - a) / b));
            return std::min(1.0, (fs - f0) / z_mass);
        }
        case Family::GumbelRight: {
            const double f0 = std::exp(-std::exp(a / b));
            const double z_mass = -std::expm1(-std::exp(a / b));
            const double fs = std::exp(-std::exp(-(s - a) / b));
            return std::min(1.0, (fs - f0) / z_mass);
        }
        case Family::TruncatedStudentT: {
            const students_t_distribution<> st(params.v[2]);
            const double f0 = boost::math::cdf(st, -a / b);
            const double z_mass = boost::math::cdf(boost::math::complement(st, -a / b));
            return std::min(1.0, (boost::math::cdf(st, (s - a) / b) - f0) / z_mass);
        }
        case Family::Gompertz:
            return -std::expm1(-a * std::expm1(b * s));
        case Family::FrechetRight:
            return std::exp(-std::exp(-a * std::log(s / b)));
    }
    return 0.0;
}

double survival(Family family, const DistParams& params, double s) {
    validate_params(family, params);
    const double a = params.v[0], b = params.v[1];
    if (std::isnan(s)) throw Error(ErrorKind::Domain, "survival: score is NaN");
    if (s <= 0.0) return 1.0;
    switch (family) {
        case Family::TruncatedNormal:
            return std::min(1.0, phi_sf((s - a) / b) / phi_sf(-a / b));
        case Family::Gamma:
            return boost::math::cdf(boost::math::complement(gamma_distribution<>(a, b), s));
        case Family::LogNormal:
            return boost::math::cdf(
                boost::math::complement(lognormal_distribution<>(a, b), s));
        case Family::GumbelLeft:
            // exp(exp(-a/b) - exp((s-a)/b)) in one shot; stable in the far tail.
            return std::min(1.0, std::exp(std::exp(-a / b) - std::exp((s - a) / b)));
        case Family::GumbelRight: {
            const double z_mass = -std::expm1(-std::exp(a / b));
            return std::min(1.0, -std::expm1(-std::exp(-(s - a) / b)) / z_mass);
        }
        case Family::TruncatedStudentT: {
            const students_t_distribution<> st(params.v[2]);
            const double z_mass = boost::math::cdf(boost::math::complement(st, -a / b));
            return std::min(
                1.0, boost::math::cdf(boost::math::complement(st, (s - a) / b)) / z_mass);
        }
        case Family::Gompertz:
            return std::exp(-a * std::expm1(b * s));
        case Family::FrechetRight:
            return -std::expm1(-std::exp(-a * std::log(s / b)));
    }
    return 1.0;
}

// ---------------------------------------------------------------------------
// quantile / sample
// ---------------------------------------------------------------------------

double quantile(Family family, const DistParams& params, double p) {
    validate_params(family, params);
    require(std::isfinite(p) && p >= 0.0 && p <= 1.0, ErrorKind::Domain,
            "quantile: probability must lie in [0, 1]");
    if (p == 0.0) return 0.0;  // support infimum for every family
    if (p == 1.0) return kInf;
    const double a = params.v[0], b = params.v[1];
    // For truncated families, map p through the untruncated cdf:
    // v = F(0) + p * (1 - F(0)), then invert F. Clamp for rounding at p -> 1.
    auto clamp_prob = [](double v) { return std::min(v, 1.0 - 1e-16); };
    switch (family) {
        case Family::TruncatedNormal: {
            const double f0 = phi_cdf(-a / b);
            const double v = clamp_prob(f0 + p * (1.0 - f0));
            return a + b * phi_inv(v);
        }
        case Family::Gamma:
            return boost::math::quantile(gamma_distribution<>(a, b), p);
        case Family::LogNormal:
            return boost::math::quantile(lognormal_distribution<>(a, b), p);
        case Family::GumbelLeft: {
            const double f0 = -std::expm1(-std::exp(-a / b));
            const double v = clamp_prob(f0 + p * (1.0 - f0));
            return a + b * std::log(-std::log1p(-v));
        }
        case Family::GumbelRight: {
            const double f0 = std::exp(-std::exp(a / b));
            const double v = clamp_prob(f0 + p * (1.0 - f0));
            return a - b * std::log(-std::log(v));
        }
        case Family::TruncatedStudentT: {
            const students_t_distribution<> st(params.v[2]);
            const double f0 = boost::math::cdf(st, -a / b);
            const double v = clamp_prob(f0 + p * (1.0 - f0));
            return a + b * boost::math::quantile(st, v);
        }
        case Family::Gompertz:
            return std::log1p(-std::log1p(-p) / a) / b;
        case Family::FrechetRight:
            return b * std::pow(-std::log(p), -1.0 / a);
    }
    return 0.0;
}

double sample(Family family, const DistParams& params, Rng& rng) {
    return quantile(family, params, rng.uniform01());
}

// ---------------------------------------------------------------------------
// MLE fitting
// ---------------------------------------------------------------------------

namespace {

struct Moments {
    double mean = 0, sd = 0, log_mean = 0, log_sd = 0;
};

Moments moments(std::span<const double> xs) {
    Moments m;
    const double n = static_cast<double>(xs.size());
    double s = 0, sl = 0;
    for (double x : xs) {
        s += x;
        sl += std::log(std::max(x, 1e-300));
    }
    m.mean = s / n;
    m.log_mean = sl / n;
    double v = 0, vl = 0;
    for (double x : xs) {
        const double d = x - m.mean;
        const double dl = std::log(std::max(x, 1e-300)) - m.log_mean;
        v += d * d;
        vl += dl * dl;
    }
    m.sd = std::sqrt(v / std::max(1.0, n - 1.0));
    m.log_sd = std::sqrt(vl / std::max(1.0, n - 1.0));
    return m;
}

}  // namespace

DistParams moment_init(Family family, std::span<const double> scores) {
    const Moments m = moments(scores);
    const double sd = std::max(m.sd, 1e-6);
    const double log_sd = std::max(m.log_sd, 1e-6);
    const double gumbel_scale = sd * std::sqrt(6.0) / boost::math::constants::pi<double>();
    switch (family) {
        case Family::TruncatedNormal:
            return {{m.mean, sd}};
        case Family::Gamma: {
            const double var = sd * sd;
            const double shape = std::clamp(m.mean * m.mean / var, 1e-2, 1e6);
            const double scale = std::clamp(var / m.mean, 1e-9, 1e6);
            return {{shape, scale}};
        }
        case Family::LogNormal:
            return {{m.log_mean, log_sd}};
        case Family::GumbelLeft:
            return {{m.mean + kEulerGamma * gumbel_scale, gumbel_scale}};
        case Family::GumbelRight:
            return {{m.mean - kEulerGamma * gumbel_scale, gumbel_scale}};
        case Family::TruncatedStudentT:
            return {{m.mean, sd, 5.0}};
        case Family::Gompertz:
            return {{1.0, 1.0 / std::max(m.mean, 1e-9)}};
        case Family::FrechetRight: {
            const double shape =
                std::max(0.3, boost::math::constants::pi<double>() /
                                  (log_sd * std::sqrt(6.0)));
            return {{shape, std::exp(m.log_mean - kEulerGamma / shape)}};
        }
    }
    return {{1.0, 1.0}};
}

namespace {

// Positive parameters are optimized as logs so the search stays in-domain.
std::vector<double> params_to_z(Family f, const DistParams& p) {
    const auto& kinds = param_kinds(f);
    std::vector<double> z(p.v.size());
    for (std::size_t d = 0; d < z.size(); ++d)
        z[d] = kinds[d] == ParamKind::Positive ? std::log(p.v[d]) : p.v[d];
    return z;
}

DistParams z_to_params(Family f, std::span<const double> z) {
    const auto& kinds = param_kinds(f);
    DistParams p;
    p.v.resize(z.size());
    for (std::size_t d = 0; d < z.size(); ++d)
        p.v[d] = kinds[d] == ParamKind::Positive ? std::exp(z[d]) : z[d];
    return p;
}

double mean_log_lik(Family f, const DistParams& p, std::span<const double> scores) {
    const PreparedDist dist(f, p);
    double total = 0.0;
    for (double s : scores) total += dist.log_pdf(s);
    return total / static_cast<double>(scores.size());
}

}  // namespace

DistParams mle_fit(Family family, std::span<const double> scores) {
    const std::size_t dim = static_cast<std::size_t>(param_dim(family));
    if (scores.size() < dim + 1)
        throw Error(ErrorKind::Fit,
                    family_name(family) + ": need at least " + std::to_string(dim + 1) +
                        " scores, got " + std::to_string(scores.size()));
    const double lo = *std::min_element(scores.begin(), scores.end());
    const double hi = *std::max_element(scores.begin(), scores.end());
    if (!(std::isfinite(lo) && lo >= 0.0))
        throw Error(ErrorKind::Fit, family_name(family) +
                                        ": scores must be finite and >= 0 (min " +
                                        std::to_string(lo) + ")");
    if (lo == hi)
        throw Error(ErrorKind::Fit, family_name(family) +
                                        ": degenerate data, all scores equal " +
                                        std::to_string(lo));

    const DistParams init = moment_init(family, scores);
    const auto objective = [&](std::span<const double> z) {
        try {
            return -mean_log_lik(family, z_to_params(family, z), scores);
        } catch (const Error&) {
            return kInf;
        }
    };
    const OptimResult res = minimize_bfgs(objective, params_to_z(family, init));
    if (!res.usable)
        throw Error(ErrorKind::Fit,
                    family_name(family) + ": likelihood not finite at any visited point");
    return z_to_params(family, res.x);
}

std::vector<RankedFamily> rank_families(std::span<const double> scores,
                                        double holdout_fraction, Rng& rng,
                                        std::span<const Family> families) {
    if (scores.empty()) throw Error(ErrorKind::Domain, "rank_families: no scores");
    require(holdout_fraction > 0.0 && holdout_fraction < 1.0, ErrorKind::Domain,
            "rank_families: holdout fraction must be in (0, 1)");
    const std::size_t n = scores.size();
    const std::size_t n_holdout =
        static_cast<std::size_t>(std::lround(holdout_fraction * static_cast<double>(n)));
    require(n_holdout >= 1 && n_holdout < n, ErrorKind::Domain,
            "rank_families: holdout split is empty on one side");

    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = n - 1; i > 0; --i) {
        const std::size_t j =
            static_cast<std::size_t>(rng.uniform01() * static_cast<double>(i + 1));
        std::swap(idx[i], idx[std::min(j, i)]);
    }
    std::vector<double> holdout, train;
    holdout.reserve(n_holdout);
    train.reserve(n - n_holdout);
    for (std::size_t i = 0; i < n; ++i)
        (i < n_holdout ? holdout : train).push_back(scores[idx[i]]);

    std::vector<Family> def;
    if (families.empty()) {
        def = all_families();
        families = def;
    }
    std::vector<RankedFamily> out;
    for (Family f : families) {
        RankedFamily r;
        r.family = f;
        try {
            r.params = mle_fit(f, train);
            const PreparedDist dist(f, r.params);
            double ll = 0.0;
            for (double s : holdout) ll += dist.log_pdf(s);
            if (std::isnan(ll)) throw Error(ErrorKind::Fit, "holdout likelihood NaN");
            r.holdout_log_lik = ll;
            r.fitted = true;
        } catch (const Error&) {
            r.fitted = false;
            r.holdout_log_lik = -kInf;
        }
        out.push_back(std::move(r));
    }
    std::stable_sort(out.begin(), out.end(), [](const RankedFamily& x, const RankedFamily& y) {
        if (x.fitted != y.fitted) return x.fitted;
        return x.holdout_log_lik > y.holdout_log_lik;
    });
    return out;
}

double Rng::normal() { return phi_inv(uniform01()); }

}  // namespace spe
