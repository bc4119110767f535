#include "dynres/fidelity.hpp"

#include <algorithm>
#include <cmath>

namespace dynres {

namespace {

// (rho^{1/2} (x) I) J (rho^{1/2} (x) I): the output of id (x) E at the
// canonical purification of rho, written directly on the Choi matrix.
Mat pinched_choi(const Mat& choi, const Mat& rho_sqrt, int d_out) {
  Mat f = kron(rho_sqrt, Mat::Identity(d_out, d_out));
  return f * choi * f;
}

}  // namespace

double fidelity_at_input(const Channel& a, const Channel& b, const Mat& rho) {
  Mat rs = herm_sqrt(rho);
  return state_fidelity(pinched_choi(a.choi, rs, a.d_out),
                        pinched_choi(b.choi, rs, b.d_out));
}

double choi_fidelity(const Channel& a, const Channel& b) {
  return state_fidelity(a.choi / a.d_in, b.choi / b.d_in);
}

ChannelFidelity worst_case_fidelity(const Channel& a, const Channel& b) {
  if (a.d_in != b.d_in || a.d_out != b.d_out)
    throw std::invalid_argument("worst_case_fidelity: signature mismatch");
  const int din = a.d_in, dd = a.d_in * a.d_out;

  // Exact program: the root fidelity between the pinched Choi matrices is
  //   1/2 min <W, J_a> + <Z, J_b>  s.t.  [[W, rho (x) I], [rho (x) I, Z]] >= 0
  // jointly over W, Z and the input density rho.
  ConicProgram p;
  MatVar W = p.add_herm(dd, "W");
  MatVar Z = p.add_herm(dd, "Z");
  MatVar rho = p.add_herm(din, "rho");
  p.add_psd(p.expr(rho));
  p.add_eq(ConicProgram::trace(p.expr(rho)) - AffExpr(1.0));
  MatExpr rho_big = ConicProgram::map_linear(
      p.expr(rho), dd,
      [&](const Mat& m) { return kron(m, Mat::Identity(a.d_out, a.d_out)); });
  std::vector<std::vector<AffExpr>> bre(dd, std::vector<AffExpr>(dd));
  std::vector<std::vector<AffExpr>> bim(dd, std::vector<AffExpr>(dd));
  for (int i = 0; i < dd; ++i)
    for (int j = 0; j < dd; ++j) {
      auto [re, im] = ConicProgram::entry(rho_big, i, j);
      bre[i][j] = re;
      bim[i][j] = im;
    }
  p.add_psd(ConicProgram::block2x2(p.expr(W), p.expr(Z), bre, bim));
  p.minimize(0.5 * (ConicProgram::inner(a.choi, p.expr(W)) +
                    ConicProgram::inner(b.choi, p.expr(Z))));
  Solution s = p.solve();

  ChannelFidelity out;
  out.inaccurate = !s.ok();
  out.sqrt_value = std::clamp(s.objective, 0.0, 1.0);
  out.value = out.sqrt_value * out.sqrt_value;
  Mat rho_star = project_psd(p.value(s, rho));
  const double tr = rho_star.trace().real();
  rho_star = tr > 1e-12 ? Mat(rho_star / tr)
                        : Mat(Mat::Identity(din, din) / din);

  // Direct search over input marginals, seeded at the program optimizer.
  // rho is parameterized as V V^dag / Tr and descended by finite differences;
  // this confirms the certified value and produces the witness state.
  auto eval = [&](const Mat& r) { return fidelity_at_input(a, b, r); };
  auto from_params = [&](const RVec& v) {
    Mat V(din, din);
    for (int i = 0; i < din; ++i)
      for (int j = 0; j < din; ++j)
        V(i, j) = cxd(v(2 * (i * din + j)), v(2 * (i * din + j) + 1));
    Mat r = V * V.adjoint();
    const double t = r.trace().real();
    return t > 1e-14 ? Mat(r / t) : Mat(Mat::Identity(din, din) / din);
  };
  auto to_params = [&](const Mat& r) {
    Mat V = herm_sqrt(r);
    RVec v(2 * din * din);
    for (int i = 0; i < din; ++i)
      for (int j = 0; j < din; ++j) {
        v(2 * (i * din + j)) = V(i, j).real();
        v(2 * (i * din + j) + 1) = V(i, j).imag();
      }
    return v;
  };
  auto descend = [&](RVec v) {
    double f = eval(from_params(v));
    double step = 0.1;
    const double fd = 1e-5;
    for (int it = 0; it < 60 && step > 1e-7; ++it) {
      RVec g(v.size());
      for (int k = 0; k < v.size(); ++k) {
        RVec vp = v, vm = v;
        vp(k) += fd;
        vm(k) -= fd;
        g(k) = (eval(from_params(vp)) - eval(from_params(vm))) / (2 * fd);
      }
      if (g.norm() < 1e-9) break;
      RVec cand = v - step * g / g.norm();
      const double fc = eval(from_params(cand));
      if (fc < f - 1e-12) {
        v = cand;
        f = fc;
        step *= 1.2;
      } else {
        step *= 0.5;
      }
    }
    return std::make_pair(v, f);
  };

  Rng rng(20240517);
  RVec best_v = to_params(rho_star);
  double best_f = eval(rho_star);
  std::vector<RVec> starts = {best_v, to_params(Mat::Identity(din, din) / din)};
  for (int k = 0; k < 4; ++k) starts.push_back(to_params(rng.random_density(din)));
  for (const RVec& s0 : starts) {
    auto [v, f] = descend(s0);
    if (f < best_f) {
      best_f = f;
      best_v = v;
    }
  }
  out.search_value = best_f;
  out.worst_input = from_params(best_v);
  out.witness = canonical_purification(out.worst_input);
  if (std::abs(out.search_value - out.value) > 1e-5) out.inaccurate = true;
  return out;
}

}  // namespace dynres
