#include <doctest.h>

#include <cmath>
#include <vector>

#include "mfprox/generate.hpp"
#include "mfprox/objective.hpp"
#include "oracles.hpp"

using namespace mfprox;

namespace {

EnergyModel mixed_model() { return EnergyModel(3, {{{0, 1}, 2.0}, {{2}, -1.0}}, {0.5, 0.5, 0.5}); }
EnergyModel pair_model() { return EnergyModel(2, {{{0, 1}, 2.0}}, {0.5, 0.5}); }

EnergyModel random_model(std::uint64_t seed, std::size_t n) {
  RandomPolyOptions opts;
  opts.scale = 2.0;
  opts.random_priors = true;
  opts.constant_term = seed % 2 == 0;
  return generate_random_poly(n, seed, opts);
}

}  // namespace

TEST_CASE("MeanFieldState rejects boundary values") {
  CHECK_THROWS_AS(MeanFieldState({0.5, 0.0}), ModelError);
  CHECK_THROWS_AS(MeanFieldState({1.0}), ModelError);
  CHECK_THROWS_AS(MeanFieldState({std::nan("")}), ModelError);
  MeanFieldState s({0.5, 0.5});
  CHECK_THROWS_AS(s.set(0, 1.0), ModelError);
  s.set(1, 0.25);
  CHECK(s[1] == 0.25);
}

TEST_CASE("omega") {
  CHECK(omega(pair_model(), MeanFieldState({0.5, 0.5})) == 0.5);
  CHECK(omega(EnergyModel(2, {}, {0.5, 0.5}), MeanFieldState({0.2, 0.9})) == 0.0);
  CHECK(omega(mixed_model(), MeanFieldState({0.5, 0.5, 0.5})) == 0.0);
  CHECK_THROWS_AS(omega(pair_model(), MeanFieldState({0.5})), ModelError);
}

TEST_CASE("omega equals the enumerated expectation") {
  Rng rng(11);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const EnergyModel m = random_model(seed, 1 + seed % 12);
    const MeanFieldState q = random_state(m.size(), rng);
    CHECK(omega(m, q) == doctest::Approx(static_cast<double>(oracle::expected_psi(m, q.values())))
                             .epsilon(1e-10));
  }
}

TEST_CASE("conditional_gap") {
  CHECK(conditional_gap(pair_model(), MeanFieldState({0.5, 0.5}), 0) == 1.0);
  const EnergyModel lone(3, {{{2}, -1.0}}, {0.5, 0.5, 0.5});
  CHECK(conditional_gap(lone, MeanFieldState({0.3, 0.7, 0.9}), 0) == 0.0);
  // Enumeration over x0, x1 weighted by q gives exactly -1.
  const MeanFieldState q({0.3, 0.7, 0.9});
  CHECK(conditional_gap(mixed_model(), q, 2) == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(static_cast<double>(oracle::conditional_gap(mixed_model(), q.values(), 2)) ==
        doctest::Approx(-1.0).epsilon(1e-15));
  CHECK_THROWS_AS(conditional_gap(mixed_model(), q, 3), ModelError);
}

TEST_CASE("conditional_gap matches enumeration on random models") {
  Rng rng(5);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const EnergyModel m = random_model(100 + seed, 1 + seed % 9);
    const MeanFieldState q = random_state(m.size(), rng);
    for (std::size_t i = 0; i < m.size(); ++i) {
      CHECK(conditional_gap(m, q, i) ==
            doctest::Approx(static_cast<double>(oracle::conditional_gap(m, q.values(), i)))
                .epsilon(1e-10));
    }
  }
}

TEST_CASE("entropy_term") {
  CHECK(entropy_term(0.5, 0.5) == 0.0);
  CHECK(entropy_term(0.25, 0.25) == 0.0);
  // log 2 - H(0.25), evaluated at 50 digits.
  CHECK(entropy_term(0.5, 0.25) == doctest::Approx(0.13081203594113696).epsilon(1e-14));
  for (double p : {0.05, 0.3, 0.5, 0.77}) {
    for (double q = 0.01; q < 1.0; q += 0.07) CHECK(entropy_term(p, q) >= 0.0);
  }
}

TEST_CASE("objective_g") {
  CHECK(objective_g(EnergyModel(2, {}, {0.3, 0.6}), MeanFieldState({0.3, 0.6})) == 0.0);
  CHECK(objective_g(pair_model(), MeanFieldState({0.5, 0.5})) == 0.5);
}

TEST_CASE("objective_g equals KL - log Z on enumerable models") {
  Rng rng(21);
  for (std::uint64_t seed = 0; seed < 80; ++seed) {
    const EnergyModel m = random_model(200 + seed, 1 + seed % 12);
    const MeanFieldState q = random_state(m.size(), rng);
    const double g = objective_g(m, q);
    const OracleResult o = kl_oracle(m, q);
    CHECK(std::abs(g - (o.kl_exact - o.log_z)) <= 1e-9 * (1.0 + std::abs(g)));
    CHECK(g == doctest::Approx(static_cast<double>(oracle::objective(m, q.values()))).epsilon(1e-10));
  }
}

TEST_CASE("kl_oracle") {
  SUBCASE("zero energy at the prior") {
    const EnergyModel m(3, {}, {0.2, 0.5, 0.7});
    const OracleResult o = kl_oracle(m, MeanFieldState(m.priors()));
    CHECK(o.log_z == doctest::Approx(0.0));
    CHECK(o.kl_exact == doctest::Approx(0.0));
  }
  SUBCASE("zero energy away from the prior is a product KL") {
    const EnergyModel m(2, {}, {0.2, 0.5});
    const MeanFieldState q({0.6, 0.1});
    const OracleResult o = kl_oracle(m, q);
    CHECK(o.kl_exact ==
          doctest::Approx(entropy_term(0.2, 0.6) + entropy_term(0.5, 0.1)).epsilon(1e-13));
  }
  SUBCASE("large energies do not overflow log Z") {
    const EnergyModel m(2, {{{0}, -900.0}, {{1}, 800.0}}, {0.5, 0.5});
    const OracleResult o = kl_oracle(m, MeanFieldState({0.5, 0.5}));
    CHECK(std::isfinite(o.log_z));
    CHECK(o.log_z == doctest::Approx(900.0 + std::log(0.25)).epsilon(1e-12));
  }
  SUBCASE("kl is zero only when Q equals P") {
    // For N = 1 the posterior is itself a product, so the exact posterior mean has KL 0.
    const double theta = 1.3, p0 = 0.2;
    const EnergyModel m(1, {{{0}, theta}}, {p0});
    const double post = p0 * std::exp(-theta) / (p0 * std::exp(-theta) + 1.0 - p0);
    CHECK(kl_oracle(m, MeanFieldState({post})).kl_exact == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(kl_oracle(m, MeanFieldState({0.5})).kl_exact > 1e-3);
  }
  SUBCASE("refuses N > 20") {
    const EnergyModel m(21, {}, std::vector<double>(21, 0.5));
    CHECK_THROWS_AS(kl_oracle(m, MeanFieldState(m.priors())), ModelError);
  }
}

TEST_CASE("grad_g") {
  const auto zero = grad_g(EnergyModel(2, {}, {0.3, 0.8}), MeanFieldState({0.3, 0.8}));
  CHECK(zero[0] == doctest::Approx(0.0));
  CHECK(zero[1] == doctest::Approx(0.0));
  const auto g = grad_g(pair_model(), MeanFieldState({0.5, 0.5}));
  CHECK(g[0] == 1.0);
  CHECK(g[1] == 1.0);
}

TEST_CASE("grad_g matches central finite differences") {
  Rng rng(3);
  for (std::uint64_t seed = 0; seed < 60; ++seed) {
    const EnergyModel m = random_model(300 + seed, 4);
    const MeanFieldState q = random_state(4, rng, 0.05, 0.95);
    const auto fd = oracle::fd_gradient(
        [&](const std::vector<double>& x) { return objective_g(m, MeanFieldState(x)); }, q.values());
    const auto g = grad_g(m, q);
    for (std::size_t i = 0; i < 4; ++i) {
      CHECK(std::abs(g[i] - fd[i]) <= 1e-5 * std::max(1.0, std::abs(fd[i])));
    }
  }
}

TEST_CASE("hessian_g") {
  const auto h1 = hessian_g(EnergyModel(1, {}, {0.5}), MeanFieldState({0.5}));
  CHECK(h1(0, 0) == 4.0);
  const auto h2 = hessian_g(pair_model(), MeanFieldState({0.5, 0.5}));
  CHECK(h2(0, 0) == 4.0);
  CHECK(h2(1, 1) == 4.0);
  CHECK(h2(0, 1) == 2.0);
  CHECK(h2(1, 0) == 2.0);
}

TEST_CASE("hessian_g is symmetric and matches finite differences of grad_g") {
  Rng rng(8);
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    const EnergyModel m = random_model(400 + seed, 3);
    const MeanFieldState q = random_state(3, rng, 0.05, 0.95);
    const auto h = hessian_g(m, q);
    CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
    for (std::size_t j = 0; j < 3; ++j) {
      const auto column = oracle::fd_gradient(
          [&](const std::vector<double>& x) { return grad_g(m, MeanFieldState(x))[j]; },
          q.values());
      for (std::size_t i = 0; i < 3; ++i) {
        CHECK(std::abs(h(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) - column[i]) <=
              1e-4);
      }
    }
  }
}

TEST_CASE("prox_value and prox_derivative") {
  CHECK(prox_value(0.3, 0.3) == 0.0);
  // 0.5 log 2 + 0.5 log(2/3) and log 3, evaluated at 50 digits.
  CHECK(prox_value(0.5, 0.25) == doctest::Approx(0.14384103622589046).epsilon(1e-14));
  CHECK(prox_derivative(0.5, 0.25) == doctest::Approx(1.0986122886681097).epsilon(1e-14));
  CHECK(prox_derivative(0.42, 0.42) == 0.0);
}

TEST_CASE("prox_value is 1-strongly convex: l(q, q0) >= (q - q0)^2 / 2") {
  for (int a = 1; a < 200; ++a) {
    for (int b = 1; b < 200; ++b) {
      const double q = a / 200.0, q0 = b / 200.0;
      CHECK(prox_value(q, q0) >= 0.5 * (q - q0) * (q - q0));
    }
  }
}

TEST_CASE("prox_derivative is the derivative of prox_value") {
  for (double q0 : {0.05, 0.3, 0.5, 0.9}) {
    for (double q = 0.02; q < 0.99; q += 0.03) {
      const double h = 1e-6;
      const double fd = (prox_value(q + h, q0) - prox_value(q - h, q0)) / (2 * h);
      CHECK(std::abs(fd - prox_derivative(q, q0)) <= 1e-6 * std::max(1.0, std::abs(fd)));
    }
  }
}
