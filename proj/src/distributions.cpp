#include "mph/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mph/common.hpp"
#include "mph/tensor.hpp"

namespace mph {

namespace {

constexpr double kHalfLog2PiE = 1.4189385332046727;  // 0.5 * log(2*pi*e)
constexpr double kHalfLog2Pi = 0.9189385332046727;   // 0.5 * log(2*pi)

double clamp_prob(double p) {
    return std::clamp(p, kProbMin, 1.0 - kProbMin);
}

bool prob_clamped(double p) { return p <= kProbMin || p >= 1.0 - kProbMin; }

bool log_std_clamped(double ls) { return ls <= kLogStdMin || ls >= kLogStdMax; }

void require_bit(double b) {
    if (b != 0.0 && b != 1.0) {
        throw DomainError("bernoulli action entries must be 0 or 1");
    }
}

int require_index(const Action& action, int k) {
    if (action.size() != 1) throw ShapeError("categorical action must be a single index");
    const double raw = action[0];
    const int idx = static_cast<int>(raw);
    if (raw != static_cast<double>(idx) || idx < 0 || idx >= k) {
        throw DomainError("categorical action index out of support");
    }
    return idx;
}

void require_same_dim(int a, int b, const char* what) {
    if (a != b) throw ShapeError(std::string(what) + ": dimension mismatch");
}

}  // namespace

BernoulliVector BernoulliVector::from_probs(std::vector<double> p) {
    if (p.empty()) throw ShapeError("bernoulli vector must be non-empty");
    check_finite(p, "bernoulli probs");
    for (double& x : p) x = clamp_prob(x);
    return BernoulliVector{std::move(p)};
}

BernoulliVector BernoulliVector::from_logits(const std::vector<double>& logits) {
    if (logits.empty()) throw ShapeError("bernoulli vector must be non-empty");
    check_finite(logits, "bernoulli logits");
    std::vector<double> p(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
        p[i] = clamp_prob(1.0 / (1.0 + std::exp(-logits[i])));
    }
    return BernoulliVector{std::move(p)};
}

DiagGaussian DiagGaussian::make(std::vector<double> mean,
                                const std::vector<double>& log_std_raw) {
    require_same_dim(static_cast<int>(mean.size()),
                     static_cast<int>(log_std_raw.size()), "gaussian make");
    check_finite(mean, "gaussian mean");
    check_finite(log_std_raw, "gaussian log_std");
    std::vector<double> ls(log_std_raw.size());
    for (size_t i = 0; i < ls.size(); ++i) {
        ls[i] = std::clamp(log_std_raw[i], kLogStdMin, kLogStdMax);
    }
    return DiagGaussian{std::move(mean), std::move(ls)};
}

Categorical Categorical::from_logits(std::vector<double> logits) {
    if (logits.size() < 2) throw ShapeError("categorical needs K >= 2 choices");
    check_finite(logits, "categorical logits");
    const double max_logit = *std::max_element(logits.begin(), logits.end());
    double sum = 0.0;
    for (double l : logits) sum += std::exp(l - max_logit);
    const double lse = max_logit + std::log(sum);
    Categorical d;
    d.logits = std::move(logits);
    d.log_probs.resize(d.logits.size());
    d.probs.resize(d.logits.size());
    for (size_t i = 0; i < d.logits.size(); ++i) {
        d.log_probs[i] = d.logits[i] - lse;
        d.probs[i] = std::exp(d.log_probs[i]);
    }
    return d;
}

// --- sampling ---

Action sample(const BernoulliVector& d, Rng& rng) {
    Action bits(d.probs.size());
    for (size_t i = 0; i < d.probs.size(); ++i) {
        bits[i] = rng.uniform() < d.probs[i] ? 1.0 : 0.0;
    }
    return bits;
}

Action sample(const DiagGaussian& d, Rng& rng) {
    Action x(d.mean.size());
    for (size_t i = 0; i < d.mean.size(); ++i) {
        x[i] = d.mean[i] + std::exp(d.log_std[i]) * rng.normal();
    }
    return x;
}

Action sample(const Categorical& d, Rng& rng) {
    const double u = rng.uniform();
    double cdf = 0.0;
    for (size_t i = 0; i < d.probs.size(); ++i) {
        cdf += d.probs[i];
        if (u < cdf) return Action{static_cast<double>(i)};
    }
    return Action{static_cast<double>(d.probs.size() - 1)};
}

Action sample(const PolicyDist& d, Rng& rng) {
    return std::visit([&rng](const auto& dist) { return sample(dist, rng); }, d);
}

// --- log probability ---

double log_prob(const BernoulliVector& d, const Action& action) {
    require_same_dim(d.dim(), static_cast<int>(action.size()), "bernoulli log_prob");
    double lp = 0.0;
    for (size_t i = 0; i < action.size(); ++i) {
        require_bit(action[i]);
        lp += action[i] == 1.0 ? std::log(d.probs[i]) : std::log(1.0 - d.probs[i]);
    }
    return lp;
}

double log_prob(const DiagGaussian& d, const Action& action) {
    require_same_dim(d.dim(), static_cast<int>(action.size()), "gaussian log_prob");
    double lp = 0.0;
    for (size_t i = 0; i < action.size(); ++i) {
        const double z = (action[i] - d.mean[i]) * std::exp(-d.log_std[i]);
        lp += -0.5 * z * z - d.log_std[i] - kHalfLog2Pi;
    }
    return lp;
}

double log_prob(const Categorical& d, const Action& action) {
    return d.log_probs[require_index(action, d.dim())];
}

double log_prob(const PolicyDist& d, const Action& action) {
    return std::visit([&action](const auto& dist) { return log_prob(dist, action); }, d);
}

// --- entropy ---

double entropy(const BernoulliVector& d) {
    double h = 0.0;
    for (double p : d.probs) {
        h += -p * std::log(p) - (1.0 - p) * std::log(1.0 - p);
    }
    return h;
}

double entropy(const DiagGaussian& d) {
    double h = 0.0;
    for (double ls : d.log_std) h += kHalfLog2PiE + ls;
    return h;
}

double entropy(const Categorical& d) {
    double h = 0.0;
    for (size_t i = 0; i < d.probs.size(); ++i) h -= d.probs[i] * d.log_probs[i];
    return h;
}

double entropy(const PolicyDist& d) {
    return std::visit([](const auto& dist) { return entropy(dist); }, d);
}

// --- KL divergence ---

double kl(const BernoulliVector& p, const BernoulliVector& q) {
    require_same_dim(p.dim(), q.dim(), "bernoulli kl");
    double d = 0.0;
    for (size_t i = 0; i < p.probs.size(); ++i) {
        const double a = p.probs[i];
        const double b = q.probs[i];
        d += a * std::log(a / b) + (1.0 - a) * std::log((1.0 - a) / (1.0 - b));
    }
    return std::max(d, 0.0);
}

double kl(const DiagGaussian& p, const DiagGaussian& q) {
    require_same_dim(p.dim(), q.dim(), "gaussian kl");
    double d = 0.0;
    for (size_t i = 0; i < p.mean.size(); ++i) {
        const double var_p = std::exp(2.0 * p.log_std[i]);
        const double var_q = std::exp(2.0 * q.log_std[i]);
        const double dm = p.mean[i] - q.mean[i];
        d += q.log_std[i] - p.log_std[i] + (var_p + dm * dm) / (2.0 * var_q) - 0.5;
    }
    return std::max(d, 0.0);
}

double kl(const Categorical& p, const Categorical& q) {
    require_same_dim(p.dim(), q.dim(), "categorical kl");
    double d = 0.0;
    for (size_t i = 0; i < p.probs.size(); ++i) {
        d += p.probs[i] * (p.log_probs[i] - q.log_probs[i]);
    }
    return std::max(d, 0.0);
}

double kl(const PolicyDist& p, const PolicyDist& q) {
    if (p.index() != q.index()) throw DomainError("kl: distribution family mismatch");
    if (const auto* bp = std::get_if<BernoulliVector>(&p)) {
        return kl(*bp, std::get<BernoulliVector>(q));
    }
    if (const auto* gp = std::get_if<DiagGaussian>(&p)) {
        return kl(*gp, std::get<DiagGaussian>(q));
    }
    return kl(std::get<Categorical>(p), std::get<Categorical>(q));
}

// --- total variation ---

double total_variation(const BernoulliVector& p, const BernoulliVector& q) {
    require_same_dim(p.dim(), q.dim(), "bernoulli tv");
    // exact TV over the joint distribution: enumerate all 2^m bit patterns
    // (signal widths are small)
    const int m = p.dim();
    double tv = 0.0;
    for (int mask = 0; mask < (1 << m); ++mask) {
        double pp = 1.0, qq = 1.0;
        for (int i = 0; i < m; ++i) {
            const bool on = (mask >> i) & 1;
            pp *= on ? p.probs[i] : 1.0 - p.probs[i];
            qq *= on ? q.probs[i] : 1.0 - q.probs[i];
        }
        tv += std::abs(pp - qq);
    }
    return 0.5 * tv;
}

double total_variation(const Categorical& p, const Categorical& q) {
    require_same_dim(p.dim(), q.dim(), "categorical tv");
    double tv = 0.0;
    for (size_t i = 0; i < p.probs.size(); ++i) tv += std::abs(p.probs[i] - q.probs[i]);
    return 0.5 * tv;
}

// --- head gradients ---

std::vector<double> bernoulli_logprob_grad_logits(const std::vector<double>& logits,
                                                  const Action& bits) {
    require_same_dim(static_cast<int>(logits.size()), static_cast<int>(bits.size()),
                     "bernoulli grad");
    std::vector<double> g(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
        require_bit(bits[i]);
        const double p = clamp_prob(1.0 / (1.0 + std::exp(-logits[i])));
        g[i] = prob_clamped(p) ? 0.0 : bits[i] - p;
    }
    return g;
}

std::vector<double> bernoulli_kl_grad_logits(const BernoulliVector& old_d,
                                             const std::vector<double>& new_logits) {
    require_same_dim(old_d.dim(), static_cast<int>(new_logits.size()), "bernoulli kl grad");
    std::vector<double> g(new_logits.size());
    for (size_t i = 0; i < new_logits.size(); ++i) {
        const double pn = clamp_prob(1.0 / (1.0 + std::exp(-new_logits[i])));
        g[i] = prob_clamped(pn) ? 0.0 : pn - old_d.probs[i];
    }
    return g;
}

std::vector<double> categorical_logprob_grad_logits(const std::vector<double>& logits,
                                                    const Action& index) {
    const Categorical d = Categorical::from_logits(logits);
    const int idx = require_index(index, d.dim());
    std::vector<double> g(logits.size());
    for (size_t i = 0; i < logits.size(); ++i) {
        g[i] = (static_cast<int>(i) == idx ? 1.0 : 0.0) - d.probs[i];
    }
    return g;
}

std::vector<double> categorical_kl_grad_logits(const Categorical& old_d,
                                               const std::vector<double>& new_logits) {
    const Categorical nd = Categorical::from_logits(new_logits);
    require_same_dim(old_d.dim(), nd.dim(), "categorical kl grad");
    std::vector<double> g(new_logits.size());
    for (size_t i = 0; i < new_logits.size(); ++i) {
        g[i] = nd.probs[i] - old_d.probs[i];
    }
    return g;
}

GaussianGrad gaussian_logprob_grad(const std::vector<double>& mean,
                                   const std::vector<double>& log_std_raw,
                                   const Action& action) {
    const DiagGaussian d = DiagGaussian::make(mean, log_std_raw);
    require_same_dim(d.dim(), static_cast<int>(action.size()), "gaussian grad");
    GaussianGrad g;
    g.d_mean.resize(mean.size());
    g.d_log_std.resize(mean.size());
    for (size_t i = 0; i < mean.size(); ++i) {
        const double inv_var = std::exp(-2.0 * d.log_std[i]);
        const double diff = action[i] - d.mean[i];
        g.d_mean[i] = diff * inv_var;
        g.d_log_std[i] =
            log_std_clamped(d.log_std[i]) ? 0.0 : diff * diff * inv_var - 1.0;
    }
    return g;
}

GaussianGrad gaussian_kl_grad(const DiagGaussian& old_d,
                              const std::vector<double>& new_mean,
                              const std::vector<double>& new_log_std_raw) {
    const DiagGaussian nd = DiagGaussian::make(new_mean, new_log_std_raw);
    require_same_dim(old_d.dim(), nd.dim(), "gaussian kl grad");
    GaussianGrad g;
    g.d_mean.resize(new_mean.size());
    g.d_log_std.resize(new_mean.size());
    for (size_t i = 0; i < new_mean.size(); ++i) {
        const double var_o = std::exp(2.0 * old_d.log_std[i]);
        const double var_n = std::exp(2.0 * nd.log_std[i]);
        const double dm = old_d.mean[i] - nd.mean[i];
        g.d_mean[i] = -dm / var_n;
        g.d_log_std[i] = log_std_clamped(nd.log_std[i])
                             ? 0.0
                             : 1.0 - (var_o + dm * dm) / var_n;
    }
    return g;
}

}  // namespace mph
