#include "dynres/scenarios.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "dynres/conic.hpp"
#include "dynres/linalg.hpp"

namespace dynres {
namespace {

const BoxScenario kChsh{2, 2, 2, 2};

std::string setting_pair(int x, int y) {
  return "(x=" + std::to_string(x) + ",y=" + std::to_string(y) + ")";
}

}  // namespace

void validate_box(const Box& b, double tol) {
  const BoxScenario& sc = b.scenario;
  if (sc.nx < 1 || sc.ny < 1 || sc.na < 1 || sc.nb < 1)
    throw std::invalid_argument("box scenario has empty setting or outcome sets");
  if (b.table.size() != sc.table_size())
    throw std::invalid_argument(
        "box table has " + std::to_string(b.table.size()) + " entries, scenario needs " +
        std::to_string(sc.table_size()));
  for (int i = 0; i < b.table.size(); ++i)
    if (b.table(i) < -tol)
      throw std::invalid_argument("box table entry " + std::to_string(i) +
                                  " is negative (" + std::to_string(b.table(i)) + ")");
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y) {
      double sum = 0;
      for (int a = 0; a < sc.na; ++a)
        for (int bb = 0; bb < sc.nb; ++bb)
          sum += b.table(box_table_index(sc, x, y, a, bb));
      if (std::abs(sum - 1.0) > tol)
        throw std::invalid_argument("box table at " + setting_pair(x, y) +
                                    " sums to " + std::to_string(sum) +
                                    " instead of 1");
    }
  // No-signalling: each side's marginal may not depend on the other side's
  // setting.
  for (int x = 0; x < sc.nx; ++x)
    for (int a = 0; a < sc.na; ++a)
      for (int y = 1; y < sc.ny; ++y) {
        double m0 = 0, my = 0;
        for (int bb = 0; bb < sc.nb; ++bb) {
          m0 += b.table(box_table_index(sc, x, 0, a, bb));
          my += b.table(box_table_index(sc, x, y, a, bb));
        }
        if (std::abs(m0 - my) > tol)
          throw std::invalid_argument(
              "box table signals: the left marginal p(a=" + std::to_string(a) +
              "|x=" + std::to_string(x) + ") moves from " + std::to_string(m0) +
              " at y=0 to " + std::to_string(my) + " at y=" + std::to_string(y));
      }
  for (int y = 0; y < sc.ny; ++y)
    for (int bb = 0; bb < sc.nb; ++bb)
      for (int x = 1; x < sc.nx; ++x) {
        double m0 = 0, mx = 0;
        for (int a = 0; a < sc.na; ++a) {
          m0 += b.table(box_table_index(sc, 0, y, a, bb));
          mx += b.table(box_table_index(sc, x, y, a, bb));
        }
        if (std::abs(m0 - mx) > tol)
          throw std::invalid_argument(
              "box table signals: the right marginal p(b=" + std::to_string(bb) +
              "|y=" + std::to_string(y) + ") moves from " + std::to_string(m0) +
              " at x=0 to " + std::to_string(mx) + " at x=" + std::to_string(x));
      }
}

Box pr_box() {
  Box b{kChsh, RVec::Zero(kChsh.table_size())};
  for (int x = 0; x < 2; ++x)
    for (int y = 0; y < 2; ++y)
      for (int a = 0; a < 2; ++a)
        for (int bb = 0; bb < 2; ++bb)
          if ((a ^ bb) == (x & y)) b.table(box_table_index(kChsh, x, y, a, bb)) = 0.5;
  return b;
}

Box white_box(const BoxScenario& sc) {
  return Box{sc, RVec::Constant(sc.table_size(), 1.0 / (sc.na * sc.nb))};
}

Box isotropic_box(double p) {
  if (p < 0 || p > 1)
    throw std::invalid_argument("isotropic_box: noise weight must lie in [0,1]");
  Box b = pr_box();
  b.table = (1.0 - p) * b.table + p * white_box(kChsh).table;
  return b;
}

Box tensor_boxes(const Box& a, const Box& b) {
  BoxScenario sc{a.scenario.nx * b.scenario.nx, a.scenario.ny * b.scenario.ny,
                 a.scenario.na * b.scenario.na, a.scenario.nb * b.scenario.nb};
  Box out{sc, RVec::Zero(sc.table_size())};
  for (int x1 = 0; x1 < a.scenario.nx; ++x1)
    for (int x2 = 0; x2 < b.scenario.nx; ++x2)
      for (int y1 = 0; y1 < a.scenario.ny; ++y1)
        for (int y2 = 0; y2 < b.scenario.ny; ++y2)
          for (int a1 = 0; a1 < a.scenario.na; ++a1)
            for (int a2 = 0; a2 < b.scenario.na; ++a2)
              for (int b1 = 0; b1 < a.scenario.nb; ++b1)
                for (int b2 = 0; b2 < b.scenario.nb; ++b2) {
                  int i = box_table_index(
                      sc, x1 * b.scenario.nx + x2, y1 * b.scenario.ny + y2,
                      a1 * b.scenario.na + a2, b1 * b.scenario.nb + b2);
                  out.table(i) =
                      a.table(box_table_index(a.scenario, x1, y1, a1, b1)) *
                      b.table(box_table_index(b.scenario, x2, y2, a2, b2));
                }
  return out;
}

Box box_power(const Box& b, int n) {
  if (n < 1) throw std::invalid_argument("box_power: need n >= 1");
  Box out = b;
  for (int k = 1; k < n; ++k) out = tensor_boxes(out, b);
  return out;
}

Channel box_to_channel(const Box& b) {
  validate_box(b);
  const BoxScenario& sc = b.scenario;
  Mat j = Mat::Zero(sc.d_in() * sc.d_out(), sc.d_in() * sc.d_out());
  for (int i = 0; i < sc.table_size(); ++i) j(i, i) = std::max(0.0, b.table(i));
  return channel_from_choi(j, sc.d_in(), sc.d_out());
}

Box channel_to_box(const Channel& ch, const BoxScenario& sc) {
  if (ch.d_in != sc.d_in() || ch.d_out != sc.d_out())
    throw std::invalid_argument(
        "channel_to_box: channel signature " + std::to_string(ch.d_in) + "->" +
        std::to_string(ch.d_out) + " does not fit the scenario");
  Mat off = ch.choi;
  off.diagonal().setZero();
  if (off.cwiseAbs().maxCoeff() > 1e-10 * std::max(1.0, ch.choi.cwiseAbs().maxCoeff()))
    throw std::invalid_argument(
        "channel_to_box: the Choi matrix has off-diagonal weight; not a "
        "classical box channel");
  Box b{sc, ch.choi.diagonal().real()};
  validate_box(b, 1e-8);
  return b;
}

std::vector<IsotropicRow> isotropic_scan(const std::vector<double>& p_grid) {
  FreeSetDescriptor local = local_boxes(2, 2, 2, 2);
  FreeSetDescriptor ns = ns_boxes(2, 2, 2, 2);
  std::vector<IsotropicRow> rows;
  rows.reserve(p_grid.size());
  for (double p : p_grid) {
    Channel ch = box_to_channel(isotropic_box(p));
    IsotropicRow row;
    row.p = p;
    row.r_max = robustness(ch, local, ns).value;
    row.r_s = robustness(ch, local, local).value;
    row.r_min = min_relative_entropy(ch, local).value;
    rows.push_back(row);
  }
  return rows;
}

void validate_povm_set(const PovmSet& s, double tol) {
  if (s.d < 1 || s.nx < 1 || s.na < 1)
    throw std::invalid_argument("povm set needs positive dimension, settings and outcomes");
  if (static_cast<int>(s.effects.size()) != s.nx)
    throw std::invalid_argument("povm set stores " + std::to_string(s.effects.size()) +
                                " settings, declared " + std::to_string(s.nx));
  for (int x = 0; x < s.nx; ++x) {
    if (static_cast<int>(s.effects[x].size()) != s.na)
      throw std::invalid_argument("setting " + std::to_string(x) + " has " +
                                  std::to_string(s.effects[x].size()) +
                                  " effects, declared " + std::to_string(s.na));
    Mat sum = Mat::Zero(s.d, s.d);
    for (int a = 0; a < s.na; ++a) {
      const Mat& m = s.effects[x][a];
      if (m.rows() != s.d || m.cols() != s.d)
        throw std::invalid_argument("effect (" + std::to_string(x) + "," +
                                    std::to_string(a) + ") has the wrong dimension");
      if ((m - m.adjoint()).norm() > tol)
        throw std::invalid_argument("effect (" + std::to_string(x) + "," +
                                    std::to_string(a) + ") is not hermitian");
      Eigen::SelfAdjointEigenSolver<Mat> es(m);
      if (es.eigenvalues().minCoeff() < -tol)
        throw std::invalid_argument("effect (" + std::to_string(x) + "," +
                                    std::to_string(a) + ") has a negative eigenvalue");
      sum += m;
    }
    if ((sum - Mat::Identity(s.d, s.d)).norm() > tol * s.d)
      throw std::invalid_argument("setting " + std::to_string(x) +
                                  " does not sum to the identity");
  }
}

Channel povm_to_channel(const PovmSet& s) {
  validate_povm_set(s);
  int din = s.nx * s.d;
  Mat j = Mat::Zero(din * s.na, din * s.na);
  for (int x = 0; x < s.nx; ++x) {
    Mat ex = Mat::Zero(s.nx, s.nx);
    ex(x, x) = 1;
    for (int a = 0; a < s.na; ++a) {
      Mat ea = Mat::Zero(s.na, s.na);
      ea(a, a) = 1;
      j += kron(ex, kron(s.effects[x][a].transpose(), ea));
    }
  }
  return channel_from_choi(j, din, s.na);
}

PovmSet noisy_xz_pair(double eta) {
  if (eta < 0 || eta > 1)
    throw std::invalid_argument("noisy_xz_pair: visibility must lie in [0,1]");
  Mat plus(2, 2), minus(2, 2), zero = Mat::Zero(2, 2), one = Mat::Zero(2, 2);
  plus << 0.5, 0.5, 0.5, 0.5;
  minus << 0.5, -0.5, -0.5, 0.5;
  zero(0, 0) = 1;
  one(1, 1) = 1;
  Mat half = Mat::Identity(2, 2) / 2.0;
  PovmSet s;
  s.d = 2;
  s.nx = 2;
  s.na = 2;
  s.effects = {{eta * plus + (1 - eta) * half, eta * minus + (1 - eta) * half},
               {eta * zero + (1 - eta) * half, eta * one + (1 - eta) * half}};
  return s;
}

PovmSet random_povm_set(Rng& rng, int d, int nx, int na) {
  PovmSet s;
  s.d = d;
  s.nx = nx;
  s.na = na;
  s.effects.assign(nx, std::vector<Mat>(na));
  for (int x = 0; x < nx; ++x) {
    std::vector<Mat> raw(na);
    Mat total = Mat::Zero(d, d);
    for (int a = 0; a < na; ++a) {
      Vec v = rng.random_pure(d);
      raw[a] = v * v.adjoint() + 1e-6 * Mat::Identity(d, d);
      total += raw[a];
    }
    Mat fix = herm_pinv_sqrt(total);
    for (int a = 0; a < na; ++a) s.effects[x][a] = fix * raw[a] * fix;
  }
  return s;
}

namespace {

// Parent-measurement form of incompatibility robustness: scaled effects
// G_lambda, one per deterministic post-processing lambda: settings ->
// outcomes, with sum_lambda G = t*I and marginals dominating the given
// effects. Compatible sets reach t = 1.
MonotoneResult incompat_parent_sdp(const PovmSet& s) {
  double parents_d = std::pow(static_cast<double>(s.na), s.nx);
  if (parents_d > 256.0)
    throw std::invalid_argument(
        "incompatibility_robustness: " + std::to_string(parents_d) +
        " deterministic parents exceed the supported 256");
  int parents = static_cast<int>(std::lround(parents_d));

  ConicProgram prog("incompatibility[" + std::to_string(s.nx) + " settings]");
  std::vector<MatVar> g;
  g.reserve(parents);
  for (int l = 0; l < parents; ++l)
    g.push_back(prog.add_herm(s.d, "g" + std::to_string(l)));
  ScalarVar tv = prog.add_scalar("t");

  for (int l = 0; l < parents; ++l) prog.add_psd(prog.expr(g[l]));

  MatExpr total = prog.expr(g[0]);
  for (int l = 1; l < parents; ++l) total = total + prog.expr(g[l]);
  for (int i = 0; i < s.d; ++i)
    for (int j = 0; j <= i; ++j) {
      auto [re, im] = ConicProgram::entry(total, i, j);
      if (i == j) {
        prog.add_eq(re - prog.expr(tv));
      } else {
        prog.add_eq(re);
        prog.add_eq(im);
      }
    }

  // lambda(x) = digit x of l in base na.
  for (int x = 0; x < s.nx; ++x) {
    int stride = 1;
    for (int k = 0; k < x; ++k) stride *= s.na;
    for (int a = 0; a < s.na; ++a) {
      MatExpr marg;
      bool first = true;
      for (int l = 0; l < parents; ++l) {
        if ((l / stride) % s.na != a) continue;
        marg = first ? prog.expr(g[l]) : marg + prog.expr(g[l]);
        first = false;
      }
      prog.add_psd(marg - ConicProgram::constant(s.effects[x][a]));
    }
  }

  prog.minimize(prog.expr(tv));
  Solution sol = prog.solve();

  MonotoneResult res;
  res.status = sol.status;
  res.bound_direction = BoundDirection::exact;
  if (!sol.ok()) {
    res.value = 1.0;
    res.notes = "parent-measurement program did not reach an optimal point";
    return res;
  }
  res.value = std::max(1.0, prog.value(sol, tv));
  res.opt.r = res.value - 1.0;
  return res;
}

}  // namespace

MonotoneResult incompatibility_robustness(const PovmSet& s, IncompatLevel level) {
  validate_povm_set(s);
  if (level == IncompatLevel::povm) return incompat_parent_sdp(s);
  FreeSetDescriptor compat = compatible_povms(s.d, s.nx, s.na);
  FreeSetDescriptor all = povm_channels(s.d, s.nx, s.na);
  return robustness(povm_to_channel(s), compat, all);
}

}  // namespace dynres
