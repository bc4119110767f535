#include <catch2/catch_amalgamated.hpp>

#include "dynres/conic.hpp"

#include <Eigen/Eigenvalues>

using namespace dynres;

TEST_CASE("scalar lp with one bound") {
  ConicProgram p;
  ScalarVar t = p.add_scalar("t");
  p.add_ineq(p.expr(t) - AffExpr(5.0));  // t >= 5
  p.minimize(p.expr(t));
  Solution s = p.solve();
  REQUIRE(s.ok());
  CHECK(s.objective == Catch::Approx(5.0).margin(1e-7));
  // Solution invariants from the solver contract.
  CHECK(s.gap <= 1e-7 * (1 + std::abs(s.objective)));
  CHECK(s.pres <= 1e-7);
}

TEST_CASE("lp with equalities and signs") {
  // min x + 2y s.t. x + y = 1, x >= 0, y >= 0 -> x = 1, y = 0.
  ConicProgram p;
  ScalarVar x = p.add_scalar(), y = p.add_scalar();
  p.add_eq(p.expr(x) + p.expr(y) - AffExpr(1.0));
  p.add_ineq(p.expr(x));
  ConstraintId ypos = p.add_ineq(p.expr(y));
  p.minimize(p.expr(x) + 2.0 * p.expr(y));
  Solution s = p.solve();
  REQUIRE(s.ok());
  CHECK(s.objective == Catch::Approx(1.0).margin(1e-7));
  CHECK(p.value(s, x) == Catch::Approx(1.0).margin(1e-6));
  // The inactive bound on x has zero multiplier; y's is 1.
  CHECK(p.dual(s, ypos) == Catch::Approx(1.0).margin(1e-5));
}

TEST_CASE("maximization sense") {
  ConicProgram p;
  ScalarVar x = p.add_scalar();
  p.add_ineq(AffExpr(3.0) - p.expr(x));  // x <= 3
  p.maximize(p.expr(x));
  Solution s = p.solve();
  REQUIRE(s.ok());
  CHECK(s.objective == Catch::Approx(3.0).margin(1e-7));
}

TEST_CASE("infeasible program is certified") {
  ConicProgram p;
  ScalarVar x = p.add_scalar();
  p.add_ineq(p.expr(x));                   // x >= 0
  p.add_ineq(AffExpr(-1.0) - p.expr(x));   // x <= -1
  p.minimize(p.expr(x));
  Solution s = p.solve();
  CHECK(s.status == SolveStatus::infeasible);
  CHECK(std::isnan(s.objective));
}

TEST_CASE("unbounded program is certified") {
  ConicProgram p;
  ScalarVar x = p.add_scalar();
  p.add_ineq(-1.0 * p.expr(x));  // x <= 0
  p.minimize(p.expr(x));
  Solution s = p.solve();
  CHECK(s.status == SolveStatus::unbounded);
}

TEST_CASE("largest eigenvalue as an sdp, real and complex") {
  Rng rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const int d = 3 + trial;
    Mat C = rng.random_hermitian(d);
    Eigen::SelfAdjointEigenSolver<Mat> es(C, Eigen::EigenvaluesOnly);
    const double lmax = es.eigenvalues().maxCoeff();

    ConicProgram p;
    ScalarVar t = p.add_scalar();
    MatExpr tI = ConicProgram::map_linear(
        ConicProgram::from_svec(1, {p.expr(t)}), d, [&](const Mat& m) {
          return Mat(m(0, 0).real() * Mat::Identity(d, d));
        });
    ConstraintId cone = p.add_psd(tI - ConicProgram::constant(C));
    p.minimize(p.expr(t));
    Solution s = p.solve();
    REQUIRE(s.ok());
    CHECK(s.objective == Catch::Approx(lmax).margin(1e-6));

    // Dual optimizer is a density matrix aligned with the top eigenspace.
    Mat Z = p.dual_matrix(s, cone);
    CHECK(min_eigenvalue(Z) > -1e-7);
    CHECK(Z.trace().real() == Catch::Approx(1.0).margin(1e-6));
    CHECK((C * Z).trace().real() == Catch::Approx(lmax).margin(1e-5));
  }
}

TEST_CASE("matrix variable with equality pinning") {
  // min <C, X> s.t. Tr X = 1, X >= 0 gives the smallest eigenvalue.
  Rng rng(23);
  const int d = 4;
  Mat C = rng.random_hermitian(d);
  Eigen::SelfAdjointEigenSolver<Mat> es(C, Eigen::EigenvaluesOnly);

  ConicProgram p;
  MatVar X = p.add_herm(d, "X");
  p.add_psd(p.expr(X));
  p.add_eq(ConicProgram::trace(p.expr(X)) - AffExpr(1.0));
  p.minimize(ConicProgram::inner(C, p.expr(X)));
  Solution s = p.solve();
  REQUIRE(s.ok());
  CHECK(s.objective ==
        Catch::Approx(es.eigenvalues().minCoeff()).margin(1e-6));
  Mat Xv = p.value(s, X);
  CHECK(min_eigenvalue(Xv) > -1e-7);
}

TEST_CASE("root fidelity block program matches the closed form") {
  // 2 max Re Tr X / 2 s.t. [[rho, X], [X^dag, sigma]] >= 0 equals
  // sqrt(F)(rho, sigma). Exercises block2x2 with a general off-diagonal.
  Rng rng(25);
  const int d = 3;
  Mat rho = rng.random_density(d);
  Mat sigma = rng.random_density(d);

  ConicProgram p;
  std::vector<std::vector<AffExpr>> bre(d, std::vector<AffExpr>(d));
  std::vector<std::vector<AffExpr>> bim(d, std::vector<AffExpr>(d));
  AffExpr retr;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      bre[i][j] = p.expr(p.add_scalar());
      bim[i][j] = p.expr(p.add_scalar());
      if (i == j) retr = retr + bre[i][j];
    }
  p.add_psd(ConicProgram::block2x2(ConicProgram::constant(rho),
                                   ConicProgram::constant(sigma), bre, bim));
  p.maximize(retr);
  Solution s = p.solve();
  REQUIRE(s.ok());
  CHECK(s.objective ==
        Catch::Approx(std::sqrt(state_fidelity(rho, sigma))).margin(1e-6));
}

TEST_CASE("hermitian-entry extraction round trips") {
  Rng rng(27);
  const int d = 3;
  Mat C = rng.random_hermitian(d);
  MatExpr ce = ConicProgram::constant(C);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      auto [re, im] = ConicProgram::entry(ce, i, j);
      CHECK(re.k == Catch::Approx(C(i, j).real()).margin(1e-12));
      CHECK(im.k == Catch::Approx(C(i, j).imag()).margin(1e-12));
    }
}

TEST_CASE("membership emission optimizes over density matrices") {
  // O = {X : X >= 0, Tr X = 1} in normal form; minimize <C, J> over J in O.
  Rng rng(29);
  const int d = 3;
  Mat C = rng.random_hermitian(d);
  Eigen::SelfAdjointEigenSolver<Mat> es(C, Eigen::EigenvaluesOnly);

  MembershipForm form;
  form.dim = d;
  const int sd = svec_dim(d);
  form.L = RMat::Identity(sd, sd);
  form.l0 = RVec::Zero(sd);
  form.E = herm_to_svec(Mat::Identity(d, d)).transpose();
  form.e = RVec::Ones(1);
  form.ucone.psd = {d};
  form.slater = true;

  ConicProgram p;
  MatVar J = p.add_herm(d);
  emit_membership(p, form, p.expr(J), AffExpr(1.0));
  p.minimize(ConicProgram::inner(C, p.expr(J)));
  Solution s = p.solve();
  REQUIRE(s.ok());
  CHECK(s.objective ==
        Catch::Approx(es.eigenvalues().minCoeff()).margin(1e-6));
}

TEST_CASE("support dual emission bounds the support function") {
  // sup over density matrices of <Q, rho> is the largest eigenvalue of Q;
  // minimizing an upper bound lam recovers it.
  Rng rng(31);
  const int d = 4;
  Mat Q = rng.random_hermitian(d);
  Eigen::SelfAdjointEigenSolver<Mat> es(Q, Eigen::EigenvaluesOnly);

  MembershipForm form;
  form.dim = d;
  const int sd = svec_dim(d);
  form.L = RMat::Identity(sd, sd);
  form.l0 = RVec::Zero(sd);
  form.E = herm_to_svec(Mat::Identity(d, d)).transpose();
  form.e = RVec::Ones(1);
  form.ucone.psd = {d};
  form.slater = true;

  ConicProgram p;
  ScalarVar lam = p.add_scalar();
  emit_support_dual(p, form, ConicProgram::constant(Q), p.expr(lam));
  p.minimize(p.expr(lam));
  Solution s = p.solve();
  REQUIRE(s.ok());
  CHECK(s.objective ==
        Catch::Approx(es.eigenvalues().maxCoeff()).margin(1e-6));

  MembershipForm noslater = form;
  noslater.slater = false;
  ConicProgram p2;
  ScalarVar lam2 = p2.add_scalar();
  CHECK_THROWS_AS(
      emit_support_dual(p2, noslater, ConicProgram::constant(Q), p2.expr(lam2)),
      std::logic_error);
}

TEST_CASE("moderate sdp sizes stay accurate") {
  // A random feasible pair keeps the solver honest at the largest block
  // size the programs in this library produce.
  Rng rng(33);
  const int d = 16;
  Mat C = rng.random_hermitian(d);
  ConicProgram p;
  MatVar X = p.add_herm(d);
  p.add_psd(p.expr(X));
  p.add_eq(ConicProgram::trace(p.expr(X)) - AffExpr(1.0));
  p.minimize(ConicProgram::inner(C, p.expr(X)));
  Solution s = p.solve();
  REQUIRE(s.ok());
  Eigen::SelfAdjointEigenSolver<Mat> es(C, Eigen::EigenvaluesOnly);
  CHECK(s.objective ==
        Catch::Approx(es.eigenvalues().minCoeff()).margin(1e-6));
  CHECK(s.gap <= 1e-7 * (1 + std::abs(s.objective)));
}

TEST_CASE("solves are deterministic") {
  auto run = [] {
    Rng rng(35);
    Mat C = rng.random_hermitian(5);
    ConicProgram p;
    MatVar X = p.add_herm(5);
    p.add_psd(p.expr(X));
    p.add_eq(ConicProgram::trace(p.expr(X)) - AffExpr(1.0));
    p.minimize(ConicProgram::inner(C, p.expr(X)));
    return p.solve().objective;
  };
  CHECK(run() == run());
}
