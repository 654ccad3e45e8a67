#include <doctest.h>

#include <cmath>
#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "mfprox/generate.hpp"
#include "mfprox/model.hpp"
#include "oracles.hpp"

using namespace mfprox;

namespace {

EnergyModel mixed_model() { return EnergyModel(3, {{{0, 1}, 2.0}, {{2}, -1.0}}, {0.5, 0.5, 0.5}); }

std::string validation_message(std::size_t n, std::vector<Term> terms, std::vector<double> priors) {
  try {
    validate(n, terms, priors);
  } catch (const ModelError& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_CASE("validate accepts a well-formed model") {
  CHECK_NOTHROW(validate(1, std::vector<Term>{{{0}, 1.0}}, std::vector<double>{0.5}));
  CHECK_NOTHROW(EnergyModel(1, {{{0}, 1.0}}, {0.5}));
}

TEST_CASE("validate reports the first violated invariant") {
  CHECK(validation_message(1, {}, {0.0}).find("prior not interior") != std::string::npos);
  CHECK(validation_message(1, {}, {1.0}).find("prior not interior") != std::string::npos);
  CHECK(validation_message(2, {{{0, 0}, 1.0}}, {0.5, 0.5}).find("varset not strictly increasing") !=
        std::string::npos);
  CHECK(validation_message(2, {{{1, 0}, 1.0}}, {0.5, 0.5}).find("varset not strictly increasing") !=
        std::string::npos);
  CHECK(validation_message(2, {{{0, 2}, 1.0}}, {0.5, 0.5}).find("out of range") != std::string::npos);
  CHECK(validation_message(2, {{{0}, 1.0}, {{0}, 2.0}}, {0.5, 0.5}).find("duplicate varset") !=
        std::string::npos);
  CHECK(validation_message(1, {{{0}, std::numeric_limits<double>::infinity()}}, {0.5})
            .find("non-finite") != std::string::npos);
  CHECK(validation_message(1, {{{0}, std::nan("")}}, {0.5}).find("non-finite") != std::string::npos);
  CHECK(validation_message(2, {}, {0.5}).find("expected 2 priors") != std::string::npos);
  CHECK(validation_message(0, {}, {}).find("at least one variable") != std::string::npos);
  CHECK_THROWS_AS(EnergyModel(1, {}, {std::nan("")}), ModelError);
}

TEST_CASE("constant offset terms are allowed") {
  const EnergyModel m(2, {{{}, 1.5}, {{0, 1}, -1.0}}, {0.5, 0.5});
  const std::vector<std::uint8_t> x{1, 1};
  CHECK(psi_eval(m, x) == doctest::Approx(0.5));
  CHECK_THROWS_AS(EnergyModel(1, {{{}, 1.0}, {{}, 2.0}}, {0.5}), ModelError);
}

TEST_CASE("psi_eval") {
  const EnergyModel pair(2, {{{0, 1}, 2.0}}, {0.5, 0.5});
  CHECK(psi_eval(pair, std::vector<std::uint8_t>{1, 1}) == 2.0);
  CHECK(psi_eval(pair, std::vector<std::uint8_t>{1, 0}) == 0.0);
  CHECK(psi_eval(mixed_model(), std::vector<std::uint8_t>{1, 1, 1}) == 1.0);
  CHECK_THROWS_AS(psi_eval(pair, std::vector<std::uint8_t>{1}), ModelError);
  CHECK_THROWS_AS(psi_eval(pair, std::vector<std::uint8_t>{1, 2}), ModelError);
}

TEST_CASE("psi_bounds exact and interval") {
  const PsiBounds exact = psi_bounds(mixed_model());
  CHECK(exact.mode == BoundsMode::exact);
  CHECK(exact.psi_min == -1.0);
  CHECK(exact.psi_max == 2.0);

  const PsiBounds interval = psi_bounds(mixed_model(), 2);
  CHECK(interval.mode == BoundsMode::interval);
  CHECK(interval.psi_min == -1.0);
  CHECK(interval.psi_max == 2.0);

  const EnergyModel zero(3, {}, {0.5, 0.5, 0.5});
  CHECK(psi_bounds(zero).psi_min == 0.0);
  CHECK(psi_bounds(zero).psi_max == 0.0);

  // Interval bounds are loose when terms cannot be simultaneously active at their extremes.
  const EnergyModel frustrated(2, {{{0}, 1.0}, {{0, 1}, -1.0}}, {0.5, 0.5});
  CHECK(psi_bounds(frustrated).psi_max == 1.0);
  CHECK(psi_bounds(frustrated).psi_min == 0.0);
  CHECK(interval_psi_bounds(frustrated).psi_min == -1.0);
}

TEST_CASE("psi bounds enclose every configuration and exact bounds are attained") {
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RandomPolyOptions opts;
    opts.scale = 3.0;
    opts.constant_term = seed % 3 == 0;
    const EnergyModel m = generate_random_poly(1 + seed % 10, seed, opts);
    const PsiBounds exact = psi_bounds(m);
    const PsiBounds interval = interval_psi_bounds(m);
    REQUIRE(exact.mode == BoundsMode::exact);
    bool hit_min = false, hit_max = false;
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m.size()); ++mask) {
      const double v = static_cast<double>(oracle::brute_psi(m, mask));
      CHECK(v >= exact.psi_min - 1e-12);
      CHECK(v <= exact.psi_max + 1e-12);
      CHECK(v >= interval.psi_min - 1e-12);
      CHECK(v <= interval.psi_max + 1e-12);
      hit_min = hit_min || std::abs(v - exact.psi_min) <= 1e-12;
      hit_max = hit_max || std::abs(v - exact.psi_max) <= 1e-12;
    }
    CHECK(hit_min);
    CHECK(hit_max);
    CHECK(interval.psi_min <= exact.psi_min + 1e-12);
    CHECK(interval.psi_max >= exact.psi_max - 1e-12);
  }
}

TEST_CASE("box_bounds") {
  SUBCASE("degenerate bounds collapse the box to the priors") {
    const EnergyModel zero(3, {}, {0.5, 0.2, 0.9});
    const BoxBounds box = box_bounds(zero, psi_bounds(zero));
    CHECK(box.q_min == zero.priors());
    CHECK(box.q_max == zero.priors());

    const EnergyModel offset(2, {{{}, 4.0}}, {0.3, 0.7});
    const BoxBounds box2 = box_bounds(offset, psi_bounds(offset));
    CHECK(box2.q_min == offset.priors());
    CHECK(box2.q_max == offset.priors());
  }
  SUBCASE("unit spread at p0 = 0.5") {
    const EnergyModel m(1, {{{0}, 1.0}}, {0.5});
    const BoxBounds box = box_bounds(m, {0.0, 1.0, BoundsMode::exact});
    CHECK(box.q_min[0] == doctest::Approx(0.26894142136999512).epsilon(1e-15));
    CHECK(box.q_max[0] == doctest::Approx(0.73105857863000488).epsilon(1e-15));
  }
  SUBCASE("spread 3 on the mixed model") {
    // 1/(1+e^3) and 1/(1+e^-3) evaluated at 50 digits.
    const BoxBounds box = box_bounds(mixed_model(), psi_bounds(mixed_model()));
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(box.q_min[i] == doctest::Approx(0.047425873177566781).epsilon(1e-15));
      CHECK(box.q_max[i] == doctest::Approx(0.95257412682243322).epsilon(1e-15));
    }
  }
  SUBCASE("huge spreads stay strictly interior") {
    const EnergyModel m(1, {{{0}, 5000.0}}, {0.5});
    const BoxBounds box = box_bounds(m, psi_bounds(m));
    CHECK(box.q_min[0] > 0.0);
    CHECK(box.q_max[0] < 1.0);
  }
}

TEST_CASE("widening psi bounds never shrinks the box") {
  const EnergyModel m(3, {{{0, 1}, 1.0}}, {0.1, 0.5, 0.85});
  BoxBounds prev = box_bounds(m, {0.0, 0.0, BoundsMode::exact});
  for (double w = 0.25; w < 40.0; w *= 1.5) {
    const BoxBounds cur = box_bounds(m, {-w / 3.0, 2.0 * w / 3.0, BoundsMode::interval});
    for (std::size_t i = 0; i < 3; ++i) {
      CHECK(cur.q_min[i] <= prev.q_min[i]);
      CHECK(cur.q_max[i] >= prev.q_max[i]);
      CHECK(cur.q_min[i] <= m.prior(i));
      CHECK(cur.q_max[i] >= m.prior(i));
    }
    prev = cur;
  }
}
