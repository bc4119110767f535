#include <catch2/catch_amalgamated.hpp>

#include "dynres/fidelity.hpp"

using namespace dynres;

TEST_CASE("identical channels have unit fidelity") {
  Rng rng(41);
  Channel e = random_channel(rng, 2, 2);
  ChannelFidelity f = worst_case_fidelity(e, e);
  CHECK_FALSE(f.inaccurate);
  CHECK(f.value == Catch::Approx(1.0).margin(1e-6));
  CHECK(choi_fidelity(e, e) == Catch::Approx(1.0).margin(1e-9));
}

TEST_CASE("unitary channels compare through their overlap") {
  // For identity versus a phase rotation diag(1, e^{i t}) the worst input is
  // an equal superposition: F = cos^2(t/2).
  const double t = 0.8;
  Mat U = Mat::Identity(2, 2);
  U(1, 1) = std::exp(cxd(0, t));
  ChannelFidelity f = worst_case_fidelity(identity_channel(2), unitary_channel(U));
  CHECK_FALSE(f.inaccurate);
  const double want = std::cos(t / 2) * std::cos(t / 2);
  CHECK(f.value == Catch::Approx(want).margin(1e-6));
  CHECK(f.search_value == Catch::Approx(want).margin(1e-6));
}

TEST_CASE("worst case is below the choi point and symmetric") {
  Rng rng(43);
  for (int trial = 0; trial < 3; ++trial) {
    Channel e1 = random_channel(rng, 2, 2);
    Channel e2 = random_channel(rng, 2, 2);
    ChannelFidelity f12 = worst_case_fidelity(e1, e2);
    ChannelFidelity f21 = worst_case_fidelity(e2, e1);
    CHECK_FALSE(f12.inaccurate);
    CHECK(f12.value <= choi_fidelity(e1, e2) + 1e-7);
    CHECK(f12.value == Catch::Approx(f21.value).margin(1e-7));
  }
}

TEST_CASE("witness input reproduces the reported value") {
  Rng rng(47);
  Channel e1 = random_channel(rng, 2, 3);
  Channel e2 = random_channel(rng, 2, 3);
  ChannelFidelity f = worst_case_fidelity(e1, e2);
  CHECK_FALSE(f.inaccurate);
  CHECK(fidelity_at_input(e1, e2, f.worst_input) ==
        Catch::Approx(f.search_value).margin(1e-9));
  CHECK(f.search_value >= f.value - 1e-7);

  // The witness state is a normalized purification with the right marginal.
  Mat full = f.witness * f.witness.adjoint();
  CHECK(std::abs(full.trace().real() - 1.0) < 1e-9);
  CHECK((ptrace_second(full, 2, 2) - f.worst_input).cwiseAbs().maxCoeff() <
        1e-9);
}

TEST_CASE("depolarizing against identity has a known value") {
  // id (x) D_p on a pure input yields (1-p) psi + p rho_ref (x) I/d; at any
  // pure input the fidelity is (1-p) + p <psi| rho_ref (x) I/2 |psi> and the
  // minimum over inputs is attained on a maximally entangled state.
  const double p = 0.3;
  ChannelFidelity f =
      worst_case_fidelity(identity_channel(2), depolarizing_channel(2, p));
  CHECK_FALSE(f.inaccurate);
  CHECK(f.value == Catch::Approx(1.0 - p + p / 4.0).margin(1e-5));
}

TEST_CASE("replacement channels compare by output fidelity") {
  // Both channels discard the input, so the worst case equals the fidelity
  // of the replacement states against each other... with the reference
  // marginal shared, F = F(sigma1, sigma2) at product inputs.
  Mat s1 = Mat::Zero(2, 2), s2 = Mat::Zero(2, 2);
  s1(0, 0) = 1;
  s2 << 0.5, 0.5, 0.5, 0.5;
  ChannelFidelity f = worst_case_fidelity(replacement_channel(2, s1),
                                          replacement_channel(2, s2));
  CHECK_FALSE(f.inaccurate);
  CHECK(f.value == Catch::Approx(state_fidelity(s1, s2)).margin(1e-5));
}
