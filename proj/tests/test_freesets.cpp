#include <catch2/catch_amalgamated.hpp>

#include "dynres/freesets.hpp"

#include <Eigen/Eigenvalues>

using namespace dynres;

namespace {

// PR box: a XOR b = x AND y, uniform marginals.
Channel pr_box_channel() {
  BoxScenario sc{2, 2, 2, 2};
  Mat j = Mat::Zero(16, 16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b)
          if ((a ^ b) == (x & y)) {
            int i = box_table_index(sc, x, y, a, b);
            j(i, i) = 0.5;
          }
  return channel_from_choi(j, 4, 4);
}

Channel box_channel_from_table(const BoxScenario& sc, const RVec& q) {
  Mat j = Mat::Zero(sc.d_in() * sc.d_out(), sc.d_in() * sc.d_out());
  for (int i = 0; i < sc.table_size(); ++i) j(i, i) = q(i);
  return channel_from_choi(j, sc.d_in(), sc.d_out());
}

// Measurement channel (x, rho) -> outcome distribution of POVM x.
Channel povm_assemblage_channel(int d, const std::vector<std::vector<Mat>>& povms) {
  const int nx = static_cast<int>(povms.size());
  const int na = static_cast<int>(povms[0].size());
  Mat j = Mat::Zero(nx * d * na, nx * d * na);
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < na; ++a) {
      Mat ex = Mat::Zero(nx, nx);
      ex(x, x) = 1;
      Mat ea = Mat::Zero(na, na);
      ea(a, a) = 1;
      j += kron(ex, kron(povms[x][a].transpose(), ea));
    }
  return channel_from_choi(j, nx * d, na);
}

std::vector<std::vector<Mat>> noisy_xz_povms(double eta) {
  Mat id = Mat::Identity(2, 2);
  Mat xp(2, 2), xm(2, 2);
  xp << 0.5, 0.5, 0.5, 0.5;
  xm << 0.5, -0.5, -0.5, 0.5;
  Mat zp = Mat::Zero(2, 2), zm = Mat::Zero(2, 2);
  zp(0, 0) = 1;
  zm(1, 1) = 1;
  auto smear = [&](const Mat& m) { return eta * m + (1 - eta) * id / 2; };
  return {{smear(xp), smear(xm)}, {smear(zp), smear(zm)}};
}

}  // namespace

TEST_CASE("replacement channels: membership and closed forms") {
  FreeSetDescriptor rep = replacement_channels(2);
  Rng rng(7);

  Mat sigma = rng.random_density(2);
  CHECK(membership_check(rep, replacement_channel(2, sigma)).member);
  MembershipReport idrep = membership_check(rep, identity_channel(2));
  CHECK_FALSE(idrep.member);
  CHECK(idrep.violation > 0.1);
  CHECK(idrep.witness.rows() == 4);

  // Reduced dimensional: the affine hull has dimension d^2 - 1 = 3.
  CHECK(rep.affine_basis.size() == 3);
  CHECK(dim_classify(rep) == DimClass::reduced);

  // Closed-form support function against a direct maximization over the
  // membership form.
  Mat q = rng.random_hermitian(4);
  ConicProgram sup("sup");
  ScalarVar lam = sup.add_scalar();
  emit_support_ub(sup, rep, ConicProgram::constant(q), sup.expr(lam));
  sup.minimize(sup.expr(lam));
  Solution ssup = sup.solve();
  REQUIRE(ssup.ok());

  ConicProgram prim("primal");
  MatVar jv = prim.add_herm(4);
  emit_member_scaled(prim, rep, prim.expr(jv), AffExpr(1.0));
  prim.maximize(ConicProgram::inner(q, prim.expr(jv)));
  Solution sprim = prim.solve();
  REQUIRE(sprim.ok());
  CHECK(ssup.objective == Catch::Approx(sprim.objective).margin(1e-6));

  // And against the eigenvalue formula sup_sigma <Q, I x sigma>.
  Eigen::SelfAdjointEigenSolver<Mat> es(ptrace_first(q, 2, 2));
  CHECK(ssup.objective == Catch::Approx(es.eigenvalues().maxCoeff()).margin(1e-6));
}

TEST_CASE("replacement channels: affine equalities pin every member") {
  FreeSetDescriptor rep = replacement_channels(2);
  Rng rng(11);
  // Find any Q with <Q, J_M> = 0.7 for all replacement M; then check the
  // value on sampled members.
  ConicProgram prog("affine");
  MatVar qv = prog.add_herm(4);
  emit_affine_eq(prog, rep, prog.expr(qv), AffExpr(0.7));
  // Tr_in Q = 0.7 I already pins Tr Q; the PSD shift just keeps the
  // feasibility-style program conic.
  prog.add_psd(prog.expr(qv) + ConicProgram::constant(10 * Mat::Identity(4, 4)));
  prog.minimize(ConicProgram::trace(prog.expr(qv)));
  Solution sol = prog.solve();
  REQUIRE(sol.ok());
  Mat qstar = prog.value(sol, qv);
  for (int k = 0; k < 4; ++k) {
    Mat member = sample_member(rep, rng);
    CHECK((qstar.adjoint() * member).trace().real() == Catch::Approx(0.7).margin(1e-6));
  }
}

TEST_CASE("cptp channels: membership, sampling, and support duality") {
  FreeSetDescriptor all = cptp_channels(2, 3);
  Rng rng(23);
  CHECK(membership_check(all, random_channel(rng, 2, 3)).member);

  Mat sampled = sample_member(all, rng);
  CHECK(channel_from_choi(sampled, 2, 3).is_valid(1e-6));

  // Support function via the conic dual equals the primal maximum.
  Mat q = rng.random_hermitian(6);
  ConicProgram sup("sup");
  ScalarVar lam = sup.add_scalar();
  emit_support_ub(sup, all, ConicProgram::constant(q), sup.expr(lam));
  sup.minimize(sup.expr(lam));
  Solution ssup = sup.solve();
  REQUIRE(ssup.ok());

  ConicProgram prim("primal");
  MatVar jv = prim.add_herm(6);
  emit_member_scaled(prim, all, prim.expr(jv), AffExpr(1.0));
  prim.maximize(ConicProgram::inner(q, prim.expr(jv)));
  Solution sprim = prim.solve();
  REQUIRE(sprim.ok());
  CHECK(ssup.objective == Catch::Approx(sprim.objective).margin(1e-6));

  // <rho x I, J_M> = 1 for every trace-preserving M, so the support of
  // such a functional is exactly 1.
  Mat rho = rng.random_density(2);
  ConicProgram one("one");
  ScalarVar lam1 = one.add_scalar();
  emit_support_ub(one, all, ConicProgram::constant(kron(rho, Mat::Identity(3, 3))),
                  one.expr(lam1));
  one.minimize(one.expr(lam1));
  Solution sone = one.solve();
  REQUIRE(sone.ok());
  CHECK(sone.objective == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("ppt channels: qubit depolarizing threshold") {
  FreeSetDescriptor ppt = ppt_channels(2, 2);
  CHECK_FALSE(membership_check(ppt, identity_channel(2)).member);
  // Choi of depolarizing(p) has partial transpose eigenvalue p/2 - (1-p),
  // nonnegative from p = 2/3 on.
  CHECK(membership_check(ppt, depolarizing_channel(2, 0.7)).member);
  CHECK_FALSE(membership_check(ppt, depolarizing_channel(2, 0.6)).member);
  // Classical channels are PPT.
  CHECK(membership_check(ppt, dephasing_channel(2, 1.0)).member);
}

TEST_CASE("ppt channels: bipartite preparations") {
  FreeSetDescriptor ppt = ppt_channels(1, 1, 2, 2);
  Vec bell(4);
  bell << 1, 0, 0, 1;
  bell /= std::sqrt(2.0);
  Channel bell_prep = preparation_channel(bell * bell.adjoint());
  MembershipReport rep = membership_check(ppt, bell_prep);
  CHECK_FALSE(rep.member);
  CHECK(rep.violation > 0.2);

  Rng rng(3);
  Mat product = kron(rng.random_density(2), rng.random_density(2));
  CHECK(membership_check(ppt, preparation_channel(product)).member);
}

TEST_CASE("separable relaxation levels nest") {
  FreeSetDescriptor r0 = sep_channels_relax(2, 2, 0);
  FreeSetDescriptor r1 = sep_channels_relax(2, 2, 1);
  CHECK(r0.exactness == Exactness::outer_relaxation);
  CHECK(r1.exactness == Exactness::outer_relaxation);

  CHECK_FALSE(membership_check(r1, identity_channel(2)).member);
  // On two qubits PPT already captures separability, so a PPT member must
  // admit the level-1 extension too.
  CHECK(membership_check(r1, depolarizing_channel(2, 0.75)).member);
  CHECK(membership_check(r1, dephasing_channel(2, 1.0)).member);
  CHECK_FALSE(membership_check(r1, depolarizing_channel(2, 0.6)).member);
}

TEST_CASE("local boxes: chsh polytope") {
  FreeSetDescriptor loc = local_boxes(2, 2, 2, 2);
  CHECK(loc.generators.size() == 16);
  CHECK(loc.is_polytope);
  REQUIRE(loc.box.has_value());

  // The affine hull of the CHSH scenario has dimension 8, both from the
  // analytic no-signalling rows and from the vertices themselves.
  CHECK(loc.affine_basis.size() == 8);
  CHECK(loc.ambient_affine_dim == 8);
  CHECK(dim_classify(loc) == DimClass::full);
  FreeSetDescriptor from_vertices = loc;
  compute_affine_hull(from_vertices);
  CHECK(from_vertices.affine_basis.size() == 8);

  // White noise is local, the PR box is not.
  BoxScenario sc = *loc.box;
  RVec white = RVec::Constant(16, 0.25);
  CHECK(membership_check(loc, box_channel_from_table(sc, white)).member);
  MembershipReport pr = membership_check(loc, pr_box_channel());
  CHECK_FALSE(pr.member);
  CHECK(pr.violation > 0.5);

  // Every vertex is a member of its own polytope.
  for (int k = 0; k < 16; k += 5)
    CHECK(membership_check(loc, channel_from_choi(loc.generators[k], 4, 4)).member);
}

TEST_CASE("local boxes: lazy oracle matches brute force") {
  // Force the lazy path on the small scenario where every vertex is known.
  FreeSetDescriptor lazy = local_boxes(2, 2, 2, 2, /*lazy_threshold=*/4);
  FreeSetDescriptor eager = local_boxes(2, 2, 2, 2);
  REQUIRE(lazy.best_generator);

  Rng rng(41);
  for (int trial = 0; trial < 5; ++trial) {
    Mat q = Mat::Zero(16, 16);
    for (int i = 0; i < 16; ++i) q(i, i) = rng.uniform(-1.0, 1.0);
    Mat best = lazy.best_generator(q);
    double oracle = (best.adjoint() * q).trace().real();
    double brute = -1e300;
    for (const Mat& v : eager.generators)
      brute = std::max(brute, (v.adjoint() * q).trace().real());
    CHECK(oracle == Catch::Approx(brute).margin(1e-12));
  }

  // Lazy separation still rejects the PR box and accepts white noise.
  CHECK_FALSE(membership_check(lazy, pr_box_channel()).member);
  RVec white = RVec::Constant(16, 0.25);
  CHECK(membership_check(lazy, box_channel_from_table(*lazy.box, white)).member);
}

TEST_CASE("no-signalling boxes") {
  FreeSetDescriptor ns = ns_boxes(2, 2, 2, 2);
  CHECK(membership_check(ns, pr_box_channel()).member);
  CHECK(ns.affine_basis.size() == 8);

  // A box where Alice's outcome leaks Bob's setting signals.
  BoxScenario sc = *ns.box;
  RVec leak = RVec::Zero(16);
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y) leak(box_table_index(sc, x, y, y, 0)) = 1.0;
  MembershipReport rep = membership_check(ns, box_channel_from_table(sc, leak));
  CHECK_FALSE(rep.member);
  CHECK(rep.violation > 0.2);

  // A channel with off-diagonal Choi entries is no box at all.
  CHECK_FALSE(membership_check(ns, unitary_channel(Mat::Identity(4, 4))).member);
}

TEST_CASE("two-copy scenario stays tractable") {
  FreeSetDescriptor loc2 = local_boxes(4, 4, 4, 4);
  REQUIRE(loc2.best_generator);
  CHECK(loc2.membership.dim == 0);
  CHECK_FALSE(loc2.has_affine_hull());
  CHECK(loc2.ambient_affine_dim > 0);

  // Oracle dominates random deterministic boxes.
  BoxScenario sc = *loc2.box;
  Rng rng(5);
  Mat q = Mat::Zero(256, 256);
  for (int i = 0; i < 256; ++i) q(i, i) = rng.uniform(-1.0, 1.0);
  Mat best = loc2.best_generator(q);
  double oracle = (best.adjoint() * q).trace().real();
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<int> f(4), g(4);
    for (int i = 0; i < 4; ++i) {
      f[i] = static_cast<int>(rng.uniform(0.0, 4.0)) % 4;
      g[i] = static_cast<int>(rng.uniform(0.0, 4.0)) % 4;
    }
    CHECK(oracle >= det_box_table(sc, f, g).dot(q.diagonal().real()) - 1e-12);
  }

  // The product of two PR tables satisfies the two-copy no-signalling rows.
  BoxScenario chsh{2, 2, 2, 2};
  RVec pr = pr_box_channel().choi.diagonal().real();
  RVec pr2 = RVec::Zero(sc.table_size());
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int y1 = 0; y1 < 2; ++y1)
        for (int y2 = 0; y2 < 2; ++y2)
          for (int a1 = 0; a1 < 2; ++a1)
            for (int a2 = 0; a2 < 2; ++a2)
              for (int b1 = 0; b1 < 2; ++b1)
                for (int b2 = 0; b2 < 2; ++b2)
                  pr2(box_table_index(sc, 2 * x1 + x2, 2 * y1 + y2, 2 * a1 + a2,
                                      2 * b1 + b2)) =
                      pr(box_table_index(chsh, x1, y1, a1, b1)) *
                      pr(box_table_index(chsh, x2, y2, a2, b2));
  BoxLinearForm rows = ns_table_rows(sc);
  RVec resid = rows.rows * pr2 - rows.rhs_scale;
  CHECK(resid.norm() < 1e-12);
}

TEST_CASE("povm channels and joint measurability") {
  FreeSetDescriptor compat = compatible_povms(2, 2, 2);
  FreeSetDescriptor allpovm = povm_channels(2, 2, 2);
  CHECK(compat.d_in == 4);
  CHECK(compat.d_out == 2);

  for (const Mat& g : compat.generators)
    CHECK(membership_check(allpovm, channel_from_choi(g, 4, 2)).member);

  // Mutually unbiased qubit pairs are jointly measurable exactly up to
  // visibility 1/sqrt(2).
  CHECK(membership_check(compat, povm_assemblage_channel(2, noisy_xz_povms(0.5))).member);
  CHECK(membership_check(compat, povm_assemblage_channel(2, noisy_xz_povms(0.70))).member);
  MembershipReport sharp =
      membership_check(compat, povm_assemblage_channel(2, noisy_xz_povms(1.0)));
  CHECK_FALSE(sharp.member);
  CHECK(sharp.violation > 0.05);
  CHECK_FALSE(
      membership_check(compat, povm_assemblage_channel(2, noisy_xz_povms(0.9))).member);

  // Sampling from the compatible set lands inside it.
  Rng rng(17);
  Mat sampled = sample_member(compat, rng);
  CHECK(membership_check(compat, channel_from_choi(sampled, 4, 2)).member);
}

TEST_CASE("generic polytope descriptor") {
  Mat j0 = identity_channel(2).choi;
  Mat s1 = Mat::Zero(2, 2);
  s1(0, 0) = 1;
  Mat j1 = replacement_channel(2, s1).choi;
  FreeSetDescriptor poly = generic_polytope("pair", 2, 2, {j0, j1});
  CHECK(poly.is_polytope);
  CHECK(poly.affine_basis.size() == 1);

  CHECK(membership_check(poly, identity_channel(2)).member);
  CHECK(membership_check(poly, channel_from_choi(0.5 * j0 + 0.5 * j1, 2, 2)).member);
  Mat s2 = Mat::Zero(2, 2);
  s2(1, 1) = 1;
  CHECK_FALSE(membership_check(poly, replacement_channel(2, s2)).member);

  // Vertices must be valid Choi matrices.
  CHECK_THROWS_AS(generic_polytope("bad", 2, 2, {2.0 * j0}), std::invalid_argument);
}

TEST_CASE("slater points are strictly interior members") {
  Rng rng(29);
  for (FreeSetDescriptor desc :
       {replacement_channels(2), cptp_channels(2, 2), ppt_channels(2, 2),
        compatible_povms(2, 2, 2), local_boxes(2, 2, 2, 2), ns_boxes(2, 2, 2, 2)}) {
    REQUIRE(desc.slater_choi.has_value());
    Channel ch = channel_from_choi(*desc.slater_choi, desc.d_in, desc.d_out);
    CHECK(ch.is_valid(1e-8));
    CHECK(membership_check(desc, ch).member);
  }
}
