#include <catch2/catch_amalgamated.hpp>

#include "dynres/scenarios.hpp"

#include <cmath>

#include "dynres/linalg.hpp"

using namespace dynres;

TEST_CASE("box validation accepts the standard boxes and names violations") {
  CHECK_NOTHROW(validate_box(pr_box()));
  CHECK_NOTHROW(validate_box(white_box(BoxScenario{3, 2, 4, 2})));
  CHECK_NOTHROW(validate_box(isotropic_box(0.3)));

  Box bad = pr_box();
  bad.table(0) = -0.1;
  CHECK_THROWS_WITH(validate_box(bad), Catch::Matchers::ContainsSubstring("negative"));

  bad = pr_box();
  bad.table(0) += 0.25;
  CHECK_THROWS_WITH(validate_box(bad), Catch::Matchers::ContainsSubstring("sums to"));

  // a = y is a textbook signalling table: the left outcome tracks the right
  // setting.
  Box signalling{BoxScenario{2, 2, 2, 2}, RVec::Zero(16)};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      signalling.table(box_table_index(signalling.scenario, x, y, y, 0)) = 1.0;
  CHECK_THROWS_WITH(validate_box(signalling),
                    Catch::Matchers::ContainsSubstring("left marginal"));

  CHECK_THROWS_AS(isotropic_box(1.2), std::invalid_argument);
  Box short_table{BoxScenario{2, 2, 2, 2}, RVec::Zero(7)};
  CHECK_THROWS_AS(validate_box(short_table), std::invalid_argument);
}

TEST_CASE("box channels carry the table on the Choi diagonal") {
  // Deterministic box a = x, b = y.
  BoxScenario sc{2, 2, 2, 2};
  Box det{sc, RVec::Zero(16)};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      det.table(box_table_index(sc, x, y, x, y)) = 1.0;
  Channel ch = box_to_channel(det);
  int ones = 0;
  for (int i = 0; i < 16; ++i) {
    double v = ch.choi(i, i).real();
    CHECK((std::abs(v) < 1e-14 || std::abs(v - 1.0) < 1e-14));
    ones += v > 0.5;
  }
  CHECK(ones == 4);

  Channel pr = box_to_channel(pr_box());
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          int i = box_table_index(sc, x, y, a, b);
          double expect = ((a ^ b) == (x & y)) ? 0.5 : 0.0;
          CHECK(pr.choi(i, i).real() == Catch::Approx(expect));
        }

  Channel white = box_to_channel(white_box(sc));
  CHECK(white.choi.diagonal().real().isApproxToConstant(0.25, 1e-14));

  // Round trip is exact.
  Box back = channel_to_box(pr, sc);
  CHECK((back.table - pr_box().table).cwiseAbs().maxCoeff() == 0.0);

  CHECK_THROWS_WITH(channel_to_box(identity_channel(4), sc),
                    Catch::Matchers::ContainsSubstring("off-diagonal"));
  CHECK_THROWS_AS(channel_to_box(identity_channel(3), sc), std::invalid_argument);
}

TEST_CASE("box tensor powers stay normalized and no-signalling") {
  Box two = box_power(pr_box(), 2);
  CHECK(two.scenario.nx == 4);
  CHECK(two.scenario.nb == 4);
  CHECK_NOTHROW(validate_box(two, 1e-12));

  // Entries multiply: winning pairs of both copies carry 1/4.
  const BoxScenario& sc = two.scenario;
  CHECK(two.table(box_table_index(sc, 0, 0, 0, 0)) == Catch::Approx(0.25));

  Box mixed = tensor_boxes(pr_box(), isotropic_box(0.4));
  CHECK_NOTHROW(validate_box(mixed, 1e-12));
}

TEST_CASE("isotropic scan reproduces the nonlocality curves") {
  double tsirelson = 1.0 - std::sqrt(2.0) / 2.0;
  std::vector<IsotropicRow> rows = isotropic_scan({0.0, tsirelson, 0.3, 1.0});
  REQUIRE(rows.size() == 4);

  CHECK(rows[0].r_max == Catch::Approx(4.0 / 3.0).margin(1e-6));
  CHECK(rows[0].r_s == Catch::Approx(1.5).margin(1e-6));
  CHECK(rows[0].r_min == Catch::Approx(4.0 / 3.0).margin(1e-6));

  // Both robustness curves decrease linearly in the noise weight until they
  // hit 1 at p = 1/2; the support measure collapses to 1 as soon as the
  // table has full support.
  for (const IsotropicRow& row : rows) {
    double expect_rmax = std::max(1.0, 4.0 / 3.0 - 2.0 * row.p / 3.0);
    double expect_rs = std::max(1.0, 1.5 - row.p);
    CHECK(row.r_max == Catch::Approx(expect_rmax).margin(1e-6));
    CHECK(row.r_s == Catch::Approx(expect_rs).margin(1e-6));
    if (row.p > 0) CHECK(row.r_min == Catch::Approx(1.0).margin(1e-6));
  }

  // Tsirelson-point anchors.
  CHECK(rows[1].r_max == Catch::Approx((2.0 + std::sqrt(2.0)) / 3.0).margin(1e-6));
  CHECK(rows[1].r_s == Catch::Approx(0.5 + std::sqrt(0.5)).margin(1e-6));
}

TEST_CASE("povm validation names the failing setting") {
  CHECK_NOTHROW(validate_povm_set(noisy_xz_pair(0.9)));

  PovmSet broken = noisy_xz_pair(0.9);
  broken.effects[1][0] = 0.9 * broken.effects[1][0];
  CHECK_THROWS_WITH(validate_povm_set(broken),
                    Catch::Matchers::ContainsSubstring("sum to the identity"));

  PovmSet negative = noisy_xz_pair(1.0);
  negative.effects[0][0](0, 0) = -0.2;
  negative.effects[0][1] =
      Mat::Identity(2, 2) - negative.effects[0][0];
  CHECK_THROWS_WITH(validate_povm_set(negative),
                    Catch::Matchers::ContainsSubstring("negative eigenvalue"));

  Rng rng(99);
  CHECK_NOTHROW(validate_povm_set(random_povm_set(rng, 3, 2, 3)));
}

TEST_CASE("povm channels embed measurements block-diagonally") {
  PovmSet xz = noisy_xz_pair(1.0);
  Channel ch = povm_to_channel(xz);
  CHECK(ch.d_in == 4);
  CHECK(ch.d_out == 2);

  // No coherence between different settings.
  int d = 2, na = 2;
  for (int i = 0; i < ch.choi_dim(); ++i)
    for (int j = 0; j < ch.choi_dim(); ++j) {
      int xi = i / (d * na), xj = j / (d * na);
      if (xi != xj) CHECK(std::abs(ch.choi(i, j)) < 1e-14);
    }

  // The trivial set is compatible, the sharp X/Z pair is not.
  PovmSet trivial;
  trivial.d = 2;
  trivial.nx = 2;
  trivial.na = 2;
  trivial.effects.assign(2, {Mat::Identity(2, 2) / 2.0, Mat::Identity(2, 2) / 2.0});
  FreeSetDescriptor compat = compatible_povms(2, 2, 2);
  CHECK(membership_check(compat, povm_to_channel(trivial)).member);
  MembershipReport sharp = membership_check(compat, ch);
  CHECK_FALSE(sharp.member);
  CHECK(sharp.violation > 1e-3);
}

TEST_CASE("incompatibility robustness agrees across both levels") {
  // Projective X/Z pair; the parent-measurement oracle value is 1.17157288.
  PovmSet xz = noisy_xz_pair(1.0);
  MonotoneResult povm = incompatibility_robustness(xz, IncompatLevel::povm);
  MonotoneResult chan = incompatibility_robustness(xz, IncompatLevel::channel);
  CHECK(povm.value == Catch::Approx(1.17157288).margin(1e-5));
  CHECK(chan.value == Catch::Approx(povm.value).margin(1e-5));

  // Below the compatibility threshold both levels sit at 1.
  PovmSet mild = noisy_xz_pair(0.65);
  CHECK(incompatibility_robustness(mild, IncompatLevel::povm).value ==
        Catch::Approx(1.0).margin(1e-6));
  CHECK(incompatibility_robustness(mild, IncompatLevel::channel).value ==
        Catch::Approx(1.0).margin(1e-5));

  // Partially noisy anchor from the same oracle.
  PovmSet mid = noisy_xz_pair(0.9);
  CHECK(incompatibility_robustness(mid, IncompatLevel::povm).value ==
        Catch::Approx(1.11299423).margin(1e-5));

  // A single measurement is always compatible with itself.
  PovmSet solo;
  solo.d = 2;
  solo.nx = 1;
  solo.na = 2;
  solo.effects = {{Mat::Zero(2, 2), Mat::Zero(2, 2)}};
  solo.effects[0][0](0, 0) = 1;
  solo.effects[0][1](1, 1) = 1;
  CHECK(incompatibility_robustness(solo, IncompatLevel::povm).value ==
        Catch::Approx(1.0).margin(1e-7));

  // Random near-projective pairs: the two levels track each other.
  Rng rng(6061);
  for (int trial = 0; trial < 2; ++trial) {
    PovmSet s = random_povm_set(rng, 2, 2, 2);
    double a = incompatibility_robustness(s, IncompatLevel::povm).value;
    double b = incompatibility_robustness(s, IncompatLevel::channel).value;
    CHECK(a == Catch::Approx(b).margin(1e-5));
  }

  // Parent enumeration is capped.
  PovmSet wide;
  wide.d = 2;
  wide.nx = 9;
  wide.na = 2;
  wide.effects.assign(9, {Mat::Identity(2, 2) / 2.0, Mat::Identity(2, 2) / 2.0});
  CHECK_THROWS_WITH(incompatibility_robustness(wide, IncompatLevel::povm),
                    Catch::Matchers::ContainsSubstring("exceed"));
}
