#pragma once

#include <variant>
#include <vector>

#include "mph/rng.hpp"

namespace mph {

// Actions are stored uniformly as flat double vectors: Bernoulli bit vectors
// as 0/1 entries, continuous actions as reals, categorical choices as a
// single entry holding the index.
using Action = std::vector<double>;

inline constexpr double kProbMin = 1e-6;
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;

// Independent Bernoulli bits, the MPH modulation head. Probabilities are
// clamped to [kProbMin, 1 - kProbMin] so log-probs stay finite.
struct BernoulliVector {
    std::vector<double> probs;

    static BernoulliVector from_probs(std::vector<double> p);
    static BernoulliVector from_logits(const std::vector<double>& logits);
    int dim() const { return static_cast<int>(probs.size()); }
};

// Diagonal Gaussian with state-independent log-std, clamped to
// [kLogStdMin, kLogStdMax].
struct DiagGaussian {
    std::vector<double> mean;
    std::vector<double> log_std;

    static DiagGaussian make(std::vector<double> mean, const std::vector<double>& log_std_raw);
    int dim() const { return static_cast<int>(mean.size()); }
};

// Categorical over K >= 2 choices; log-probs cached at construction.
struct Categorical {
    std::vector<double> logits;
    std::vector<double> log_probs;
    std::vector<double> probs;

    static Categorical from_logits(std::vector<double> logits);
    int dim() const { return static_cast<int>(logits.size()); }
};

using PolicyDist = std::variant<BernoulliVector, DiagGaussian, Categorical>;

Action sample(const BernoulliVector& d, Rng& rng);
Action sample(const DiagGaussian& d, Rng& rng);
Action sample(const Categorical& d, Rng& rng);
Action sample(const PolicyDist& d, Rng& rng);

double log_prob(const BernoulliVector& d, const Action& action);
double log_prob(const DiagGaussian& d, const Action& action);
double log_prob(const Categorical& d, const Action& action);
double log_prob(const PolicyDist& d, const Action& action);

double entropy(const BernoulliVector& d);
double entropy(const DiagGaussian& d);
double entropy(const Categorical& d);
double entropy(const PolicyDist& d);

double kl(const BernoulliVector& p, const BernoulliVector& q);
double kl(const DiagGaussian& p, const DiagGaussian& q);
double kl(const Categorical& p, const Categorical& q);
double kl(const PolicyDist& p, const PolicyDist& q);

// Total variation distance, defined for the discrete families. Used by the
// Pinsker consistency checks (TV <= sqrt(KL/2)).
double total_variation(const BernoulliVector& p, const BernoulliVector& q);
double total_variation(const Categorical& p, const Categorical& q);

// --- head gradients (chain rule into the raw network outputs) ---
// Entries where the head output was clamped get zero gradient, so analytic
// gradients match finite differences of the clamped functions exactly.

std::vector<double> bernoulli_logprob_grad_logits(const std::vector<double>& logits,
                                                  const Action& bits);
std::vector<double> bernoulli_kl_grad_logits(const BernoulliVector& old_d,
                                             const std::vector<double>& new_logits);

std::vector<double> categorical_logprob_grad_logits(const std::vector<double>& logits,
                                                    const Action& index);
std::vector<double> categorical_kl_grad_logits(const Categorical& old_d,
                                               const std::vector<double>& new_logits);

struct GaussianGrad {
    std::vector<double> d_mean;
    std::vector<double> d_log_std;  // w.r.t. the raw (unclamped) parameter
};
GaussianGrad gaussian_logprob_grad(const std::vector<double>& mean,
                                   const std::vector<double>& log_std_raw,
                                   const Action& action);
GaussianGrad gaussian_kl_grad(const DiagGaussian& old_d,
                              const std::vector<double>& new_mean,
                              const std::vector<double>& new_log_std_raw);

}  // namespace mph
