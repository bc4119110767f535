#include <catch2/catch_amalgamated.hpp>

#include "dynres/linalg.hpp"

using namespace dynres;

namespace {
Mat bell_state() {
  Vec v(4);
  v << 1, 0, 0, 1;
  v /= std::sqrt(2.0);
  return v * v.adjoint();
}
}  // namespace

TEST_CASE("hermiticity and psd checks") {
  Mat h(2, 2);
  h << 1.0, cxd(0.5, 0.25), cxd(0.5, -0.25), 2.0;
  CHECK(is_hermitian(h));
  CHECK(is_psd(h));

  Mat nh = h;
  nh(0, 1) = cxd(0.5, 0.3);
  CHECK_FALSE(is_hermitian(nh));

  Mat neg(2, 2);
  neg << 1.0, 0.0, 0.0, -0.1;
  CHECK_FALSE(is_psd(neg));
  CHECK(min_eigenvalue(neg) == Catch::Approx(-0.1));
}

TEST_CASE("kron and partial traces") {
  Rng rng(7);
  Mat a = rng.random_density(2);
  Mat b = rng.random_density(3);
  Mat ab = kron(a, b);
  REQUIRE(ab.rows() == 6);
  CHECK((ptrace_second(ab, 2, 3) - a).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((ptrace_first(ab, 2, 3) - b).cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(ab.trace().real() - 1.0) < 1e-12);
}

TEST_CASE("partial transpose squares to identity and flags entanglement") {
  Mat bell = bell_state();
  Mat pt = ptranspose_second(bell, 2, 2);
  CHECK((ptranspose_second(pt, 2, 2) - bell).cwiseAbs().maxCoeff() < 1e-14);
  // The Bell state has a negative partial transpose eigenvalue of -1/2.
  CHECK(min_eigenvalue(pt) == Catch::Approx(-0.5));

  Rng rng(3);
  Mat sep = kron(rng.random_density(2), rng.random_density(2));
  CHECK(min_eigenvalue(ptranspose_second(sep, 2, 2)) > -1e-10);
}

TEST_CASE("system permutation relabels tensor factors") {
  Rng rng(11);
  Mat a = rng.random_hermitian(2);
  Mat b = rng.random_hermitian(3);
  Mat c = rng.random_hermitian(2);
  Mat abc = kron(kron(a, b), c);
  Mat cab = kron(kron(c, a), b);
  Mat moved = permute_systems(abc, {2, 3, 2}, {2, 0, 1});
  CHECK((moved - cab).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("svec is an isometry onto real coordinates") {
  Rng rng(5);
  const int d = 4;
  Mat x = rng.random_hermitian(d);
  Mat y = rng.random_hermitian(d);
  RVec sx = herm_to_svec(x);
  RVec sy = herm_to_svec(y);
  REQUIRE(sx.size() == svec_dim(d));
  const double ip = (x.adjoint() * y).trace().real();
  CHECK(sx.dot(sy) == Catch::Approx(ip).margin(1e-10));
  CHECK((svec_to_herm(sx, d) - x).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("matrix square roots and pseudo inverse") {
  Rng rng(13);
  Mat rho = rng.random_density(3);
  Mat s = herm_sqrt(rho);
  CHECK((s * s - rho).cwiseAbs().maxCoeff() < 1e-10);

  // Rank-deficient input: pinv sqrt inverts on the support only.
  Vec psi = rng.random_pure(3);
  Mat proj = psi * psi.adjoint();
  Mat pis = herm_pinv_sqrt(proj);
  CHECK((pis * proj * pis - proj).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((support_projector(proj) - proj).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("fidelity and trace distance on states") {
  Rng rng(17);
  Mat rho = rng.random_density(3);
  CHECK(state_fidelity(rho, rho) == Catch::Approx(1.0).margin(1e-9));

  Mat e0 = Mat::Zero(2, 2), e1 = Mat::Zero(2, 2);
  e0(0, 0) = 1;
  e1(1, 1) = 1;
  CHECK(state_fidelity(e0, e1) == Catch::Approx(0.0).margin(1e-12));
  CHECK(trace_distance(e0, e1) == Catch::Approx(1.0).margin(1e-12));

  // Fuchs-van-de-Graaf sanity: 1 - sqrt(F) <= D <= sqrt(1 - F).
  Mat sig = rng.random_density(3);
  const double f = state_fidelity(rho, sig);
  const double dd = trace_distance(rho, sig);
  CHECK(dd <= std::sqrt(1.0 - f) + 1e-9);
  CHECK(dd >= 1.0 - std::sqrt(f) - 1e-9);

  CHECK_THROWS(state_fidelity(Mat::Identity(2, 2), -Mat::Identity(2, 2)));
}

TEST_CASE("canonical purification has the right marginal") {
  Rng rng(19);
  Mat rho = rng.random_density(4);
  Vec psi = canonical_purification(rho);
  Mat full = psi * psi.adjoint();
  // rho sits on the first (reference) factor; the second carries rho^T.
  CHECK((ptrace_second(full, 4, 4) - rho).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((ptrace_first(full, 4, 4) - rho.transpose()).cwiseAbs().maxCoeff() <
        1e-10);
}

TEST_CASE("rng outputs are reproducible and well formed") {
  Rng r1(42), r2(42);
  Mat u1 = r1.random_unitary(4);
  Mat u2 = r2.random_unitary(4);
  CHECK((u1 - u2).cwiseAbs().maxCoeff() == 0.0);
  CHECK((u1.adjoint() * u1 - Mat::Identity(4, 4)).cwiseAbs().maxCoeff() < 1e-12);

  Mat rho = r1.random_density(5);
  CHECK(is_psd(rho));
  CHECK(std::abs(rho.trace().real() - 1.0) < 1e-12);
}
