#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mph/distributions.hpp"
#include "mph/rng.hpp"
#include "test_util.hpp"

using namespace mph;

namespace {

BernoulliVector random_bernoulli(Rng& rng, int m) {
    std::vector<double> p(m);
    for (double& x : p) x = rng.uniform(0.02, 0.98);
    return BernoulliVector::from_probs(std::move(p));
}

Categorical random_categorical(Rng& rng, int k) {
    std::vector<double> logits(k);
    for (double& x : logits) x = rng.uniform(-2.0, 2.0);
    return Categorical::from_logits(std::move(logits));
}

}  // namespace

TEST_CASE("bernoulli sampling near-degenerate probs") {
    BernoulliVector d = BernoulliVector::from_probs({1.0 - kProbMin, kProbMin, 1.0 - kProbMin});
    Rng rng(1);
    for (int i = 0; i < 1000; ++i) {
        Action bits = sample(d, rng);
        CHECK(bits[0] == 1.0);
        CHECK(bits[1] == 0.0);
        CHECK(bits[2] == 1.0);
    }
}

TEST_CASE("gaussian log_std clamps at -5") {
    DiagGaussian d = DiagGaussian::make({0.0}, {-20.0});
    CHECK(d.log_std[0] == -5.0);
    Rng rng(2);
    for (int i = 0; i < 1000; ++i) {
        Action x = sample(d, rng);
        CHECK(std::abs(x[0]) < 6.0 * std::exp(-5.0));
    }
}

TEST_CASE("bernoulli empirical mean follows the law") {
    BernoulliVector d = BernoulliVector::from_probs({0.5, 0.5, 0.5});
    Rng rng(3);
    double counts[3] = {0, 0, 0};
    const int n = 100000;
    for (int i = 0; i < n; ++i) {
        Action bits = sample(d, rng);
        for (int j = 0; j < 3; ++j) counts[j] += bits[j];
    }
    for (int j = 0; j < 3; ++j) {
        const double mean = counts[j] / n;
        CHECK(mean > 0.49);
        CHECK(mean < 0.51);
    }
}

TEST_CASE("log_prob analytic values") {
    BernoulliVector b = BernoulliVector::from_probs({0.5, 0.5});
    CHECK(log_prob(b, {1.0, 0.0}) == doctest::Approx(std::log(0.25)).epsilon(1e-9));
    Categorical c = Categorical::from_logits({0.0, 0.0, 0.0});
    CHECK(log_prob(c, {2.0}) == doctest::Approx(-1.0986123).epsilon(1e-6));
    CHECK_THROWS_AS(log_prob(b, {0.5, 1.0}), DomainError);
    CHECK_THROWS_AS(log_prob(c, {3.0}), DomainError);
}

TEST_CASE("log_prob normalizes over the support") {
    Rng rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        BernoulliVector b = random_bernoulli(rng, 3);
        double total = 0.0;
        for (int mask = 0; mask < 8; ++mask) {
            Action bits = {double(mask & 1), double((mask >> 1) & 1), double((mask >> 2) & 1)};
            total += std::exp(log_prob(b, bits));
        }
        CHECK(total == doctest::Approx(1.0).epsilon(1e-3));

        Categorical c = random_categorical(rng, 4);
        double ctotal = 0.0;
        for (int k = 0; k < 4; ++k) ctotal += std::exp(log_prob(c, {double(k)}));
        CHECK(ctotal == doctest::Approx(1.0).epsilon(1e-3));
    }
    // 1-D gaussian: trapezoid integration of exp(log_prob) over +-8 sigma
    DiagGaussian g = DiagGaussian::make({0.3}, {-0.5});
    const double sigma = std::exp(-0.5);
    const double lo = 0.3 - 8.0 * sigma, hi = 0.3 + 8.0 * sigma;
    const int steps = 20000;
    double integral = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double x = lo + (hi - lo) * i / steps;
        const double w = (i == 0 || i == steps) ? 0.5 : 1.0;
        integral += w * std::exp(log_prob(g, {x}));
    }
    integral *= (hi - lo) / steps;
    CHECK(integral == doctest::Approx(1.0).epsilon(1e-3));
}

TEST_CASE("entropy closed forms") {
    CHECK(entropy(BernoulliVector::from_probs({0.5, 0.5, 0.5})) ==
          doctest::Approx(3.0 * std::log(2.0)).epsilon(1e-9));
    CHECK(entropy(Categorical::from_logits({30.0, 0.0, 0.0})) ==
          doctest::Approx(0.0).epsilon(1e-6));
    CHECK(entropy(DiagGaussian::make({0.0}, {0.0})) ==
          doctest::Approx(1.4189385).epsilon(1e-6));
}

TEST_CASE("kl analytic values and properties") {
    BernoulliVector p = BernoulliVector::from_probs({0.5});
    BernoulliVector q = BernoulliVector::from_probs({0.25});
    const double expect = 0.5 * std::log(0.5 / 0.25) + 0.5 * std::log(0.5 / 0.75);
    CHECK(kl(p, q) == doctest::Approx(expect).epsilon(1e-9));
    CHECK(kl(p, q) == doctest::Approx(0.1438410).epsilon(1e-5));
    CHECK(kl(p, p) == 0.0);

    Rng rng(5);
    for (int trial = 0; trial < 10000; ++trial) {
        BernoulliVector a = random_bernoulli(rng, 2);
        BernoulliVector b = random_bernoulli(rng, 2);
        CHECK(kl(a, b) >= 0.0);
        CHECK(kl(a, a) == 0.0);
        Categorical ca = random_categorical(rng, 3);
        Categorical cb = random_categorical(rng, 3);
        CHECK(kl(ca, cb) >= 0.0);
        CHECK(kl(ca, ca) == 0.0);
    }
}

TEST_CASE("kl family and dimension mismatches") {
    PolicyDist b = BernoulliVector::from_probs({0.5});
    PolicyDist c = Categorical::from_logits({0.0, 0.0});
    CHECK_THROWS_AS(kl(b, c), DomainError);
    CHECK_THROWS_AS(kl(BernoulliVector::from_probs({0.5}),
                       BernoulliVector::from_probs({0.5, 0.5})),
                    ShapeError);
}

TEST_CASE("pinsker: tv <= sqrt(kl/2) on random pairs") {
    Rng rng(6);
    for (int trial = 0; trial < 10000; ++trial) {
        BernoulliVector a = random_bernoulli(rng, 3);
        BernoulliVector b = random_bernoulli(rng, 3);
        CHECK(total_variation(a, b) <= std::sqrt(kl(a, b) / 2.0) + 1e-12);
        Categorical ca = random_categorical(rng, 4);
        Categorical cb = random_categorical(rng, 4);
        CHECK(total_variation(ca, cb) <= std::sqrt(kl(ca, cb) / 2.0) + 1e-12);
    }
}

TEST_CASE("log_prob of sampled actions is finite") {
    Rng rng(7);
    for (int trial = 0; trial < 1000; ++trial) {
        BernoulliVector b = random_bernoulli(rng, 3);
        CHECK(std::isfinite(log_prob(b, sample(b, rng))));
        Categorical c = random_categorical(rng, 5);
        CHECK(std::isfinite(log_prob(c, sample(c, rng))));
        DiagGaussian g = DiagGaussian::make({rng.uniform(-1, 1)}, {rng.uniform(-6, 3)});
        CHECK(std::isfinite(log_prob(g, sample(g, rng))));
    }
}

TEST_CASE("head gradients match finite differences") {
    Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        // bernoulli log_prob and kl
        std::vector<double> logits = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Action bits = {double(rng.uniform_int(2)), double(rng.uniform_int(2))};
        auto g = bernoulli_logprob_grad_logits(logits, bits);
        auto lp_loss = [&] { return log_prob(BernoulliVector::from_logits(logits), bits); };
        std::vector<double*> entries = {&logits[0], &logits[1]};
        std::vector<const double*> analytic = {&g[0], &g[1]};
        CHECK(testutil::fd_check(lp_loss, entries, analytic).max_rel_err < 1e-6);

        BernoulliVector old_d = random_bernoulli(rng, 2);
        auto gk = bernoulli_kl_grad_logits(old_d, logits);
        auto kl_loss = [&] { return kl(old_d, BernoulliVector::from_logits(logits)); };
        analytic = {&gk[0], &gk[1]};
        CHECK(testutil::fd_check(kl_loss, entries, analytic).max_rel_err < 1e-6);

        // categorical
        std::vector<double> clogits = {rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        Action idx = {double(rng.uniform_int(3))};
        auto cg = categorical_logprob_grad_logits(clogits, idx);
        auto clp_loss = [&] { return log_prob(Categorical::from_logits(clogits), idx); };
        std::vector<double*> centries = {&clogits[0], &clogits[1], &clogits[2]};
        std::vector<const double*> canalytic = {&cg[0], &cg[1], &cg[2]};
        CHECK(testutil::fd_check(clp_loss, centries, canalytic).max_rel_err < 1e-6);

        Categorical cold = random_categorical(rng, 3);
        auto ckg = categorical_kl_grad_logits(cold, clogits);
        auto ckl_loss = [&] { return kl(cold, Categorical::from_logits(clogits)); };
        canalytic = {&ckg[0], &ckg[1], &ckg[2]};
        CHECK(testutil::fd_check(ckl_loss, centries, canalytic).max_rel_err < 1e-6);

        // gaussian
        std::vector<double> mean = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        std::vector<double> log_std = {rng.uniform(-2, 1), rng.uniform(-2, 1)};
        Action act = {rng.uniform(-2, 2), rng.uniform(-2, 2)};
        GaussianGrad gg = gaussian_logprob_grad(mean, log_std, act);
        auto glp_loss = [&] { return log_prob(DiagGaussian::make(mean, log_std), act); };
        std::vector<double*> gentries = {&mean[0], &mean[1], &log_std[0], &log_std[1]};
        std::vector<const double*> ganalytic = {&gg.d_mean[0], &gg.d_mean[1],
                                                &gg.d_log_std[0], &gg.d_log_std[1]};
        CHECK(testutil::fd_check(glp_loss, gentries, ganalytic).max_rel_err < 1e-6);

        DiagGaussian gold = DiagGaussian::make({rng.uniform(-1, 1), rng.uniform(-1, 1)},
                                               {rng.uniform(-2, 1), rng.uniform(-2, 1)});
        GaussianGrad gkg = gaussian_kl_grad(gold, mean, log_std);
        auto gkl_loss = [&] { return kl(gold, DiagGaussian::make(mean, log_std)); };
        ganalytic = {&gkg.d_mean[0], &gkg.d_mean[1], &gkg.d_log_std[0], &gkg.d_log_std[1]};
        CHECK(testutil::fd_check(gkl_loss, gentries, ganalytic).max_rel_err < 1e-6);
    }
}
