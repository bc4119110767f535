#include "dynres/monotones.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace dynres {

namespace {

constexpr double kDivergenceCap = 1e6;
constexpr int kMaxCutRounds = 200;
constexpr double kInf = std::numeric_limits<double>::infinity();

double hinner(const Mat& a, const Mat& b) {
  return std::real((a.adjoint() * b).trace());
}

BoundDirection direction_of(const FreeSetDescriptor& desc) {
  switch (desc.exactness) {
    case Exactness::exact:
      return BoundDirection::exact;
    case Exactness::outer_relaxation:
      return BoundDirection::lower;
    case Exactness::inner_approximation:
      return BoundDirection::upper;
  }
  return BoundDirection::exact;
}

// Enlarging either set only lowers a robustness-type value, so the two
// relaxation directions compose unless they genuinely conflict.
BoundDirection combine_direction(BoundDirection a, BoundDirection b,
                                 std::string* notes) {
  if (a == b || b == BoundDirection::exact) return a;
  if (a == BoundDirection::exact) return b;
  if (notes) {
    if (!notes->empty()) *notes += "; ";
    *notes += "the two sets are relaxed in opposite directions";
  }
  return BoundDirection::lower;
}

void append_note(std::string* notes, const std::string& msg) {
  if (!notes->empty()) *notes += "; ";
  *notes += msg;
}

void check_dims(const char* who, const Channel& ch,
                const FreeSetDescriptor& desc) {
  if (ch.d_in != desc.d_in || ch.d_out != desc.d_out) {
    std::ostringstream os;
    os << who << ": channel maps " << ch.d_in << " -> " << ch.d_out
       << " but the set '" << desc.name << "' holds channels " << desc.d_in
       << " -> " << desc.d_out;
    throw std::invalid_argument(os.str());
  }
}

Mat clip01(const Mat& x) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (x + x.adjoint()));
  RVec ev = es.eigenvalues().cwiseMax(0.0).cwiseMin(1.0);
  return es.eigenvectors() * ev.asDiagonal().toDenseMatrix().cast<cxd>() *
         es.eigenvectors().adjoint();
}

// The programs run in the pinched picture Q = (rho^1/2 (x) I) P (rho^1/2 (x) I);
// this undoes the pinch and clips the effect back into [0, I].
Mat unpin_effect(const Mat& q, const Mat& rho, int d_out) {
  Mat big = kron(herm_pinv_sqrt(rho), Mat::Identity(d_out, d_out));
  return clip01(big * q * big);
}

Mat normalized_density(const Mat& x) {
  Mat p = project_psd(0.5 * (x + x.adjoint()));
  double tr = p.trace().real();
  if (tr > 1e-12) p /= tr;
  return p;
}

// Solver output carries residuals around 1e-8 while Channel validation is
// tighter; pull a recovered Choi matrix back onto the CPTP manifold before
// wrapping. The shift is of the order of the residual itself.
Channel polish_channel(const Mat& j, int d_in, int d_out) {
  Mat p = project_psd(0.5 * (j + j.adjoint()));
  Mat marg = ptrace_second(p, d_in, d_out);
  Eigen::SelfAdjointEigenSolver<Mat> es(marg);
  RVec ev = es.eigenvalues().cwiseMax(1e-9);
  Mat c = es.eigenvectors() *
          ev.cwiseSqrt().cwiseInverse().asDiagonal().toDenseMatrix().cast<cxd>() *
          es.eigenvectors().adjoint();
  Mat big = kron(c, Mat::Identity(d_out, d_out));
  Mat fixed = big * p * big;
  Mat resid = Mat::Identity(d_in, d_in) - ptrace_second(fixed, d_in, d_out);
  fixed += kron(resid, Mat::Identity(d_out, d_out) / d_out);
  return Channel{d_in, d_out, fixed};
}

// ---------------------------------------------------------------------------
// Box-table plumbing
// ---------------------------------------------------------------------------

RVec box_table(const char* who, const Channel& ch, const BoxScenario& sc) {
  if (ch.d_in != sc.d_in() || ch.d_out != sc.d_out()) {
    throw std::invalid_argument(std::string(who) +
                                ": channel dimensions do not match the "
                                "scenario of the box set");
  }
  Mat off = ch.choi;
  off.diagonal().setZero();
  if (off.norm() > 1e-8 * std::max(1.0, ch.choi.norm())) {
    throw std::invalid_argument(
        std::string(who) +
        ": box sets expect a classical box channel (diagonal Choi matrix)");
  }
  return ch.choi.diagonal().real();
}

// Clips and renormalizes a recovered table so the wrapped channel is exact.
Channel polish_table_channel(const BoxScenario& sc, RVec q) {
  const int nout = sc.d_out();
  q = q.cwiseMax(0.0);
  for (int s = 0; s < sc.d_in(); ++s) {
    double total = q.segment(s * nout, nout).sum();
    if (total > 1e-12)
      q.segment(s * nout, nout) /= total;
    else
      q.segment(s * nout, nout).setConstant(1.0 / nout);
  }
  Mat j = Mat::Zero(sc.d_in() * nout, sc.d_in() * nout);
  j.diagonal() = q.cast<cxd>();
  return channel_from_choi(j, sc.d_in(), nout);
}

// c'q over scalar variables, built directly to avoid quadratic expression
// growth on large tables.
AffExpr weighted_sum(const std::vector<ScalarVar>& vars, const RVec& w) {
  AffExpr e;
  int top = 0;
  for (const auto& v : vars) top = std::max(top, v.offset);
  e.c = RVec::Zero(top + 1);
  for (int i = 0; i < static_cast<int>(vars.size()); ++i)
    e.c(vars[i].offset) += w(i);
  return e;
}

AffExpr sum_of(const std::vector<ScalarVar>& vars) {
  return weighted_sum(vars, RVec::Ones(static_cast<int>(vars.size())));
}

std::vector<RVec> vertex_tables(const FreeSetDescriptor& desc) {
  std::vector<RVec> out;
  out.reserve(desc.generators.size());
  for (const Mat& g : desc.generators) out.push_back(g.diagonal().real());
  return out;
}

// q_expr in t * O over tables: convex-combination weights for polytopes,
// nonnegativity plus the scaled no-signalling rows otherwise.
void emit_table_member(ConicProgram& prog, const FreeSetDescriptor& desc,
                       const std::vector<AffExpr>& q, const AffExpr& t,
                       const char* who) {
  const BoxScenario& sc = *desc.box;
  const int tsize = sc.table_size();
  if (desc.is_polytope) {
    if (desc.best_generator) {
      throw std::logic_error(
          std::string(who) + ": scaled membership in '" + desc.name +
          "' needs the full vertex list, which is kept lazy at this size; "
          "only the support-side measures run over lazy scenarios");
    }
    std::vector<RVec> vt = vertex_tables(desc);
    std::vector<ScalarVar> w;
    w.reserve(vt.size());
    for (size_t j = 0; j < vt.size(); ++j) w.push_back(prog.add_scalar());
    RVec coeff(static_cast<int>(vt.size()));
    for (int i = 0; i < tsize; ++i) {
      for (size_t j = 0; j < vt.size(); ++j) coeff(static_cast<int>(j)) = vt[j](i);
      prog.add_eq(weighted_sum(w, coeff) - q[i]);
    }
    for (const auto& wv : w) prog.add_ineq(prog.expr(wv));
    prog.add_eq(sum_of(w) - t);
  } else {
    for (int i = 0; i < tsize; ++i) prog.add_ineq(q[i]);
    BoxLinearForm lf = ns_table_rows(sc);
    for (int r = 0; r < lf.rows.rows(); ++r) {
      AffExpr row;
      for (int i = 0; i < tsize; ++i)
        if (lf.rows(r, i) != 0.0) row = row + lf.rows(r, i) * q[i];
      prog.add_eq(row - lf.rhs_scale(r) * t);
    }
  }
}

// Affine hull of a box set in table coordinates: the white-noise anchor plus
// the kernel of the no-signalling rows. Recomputed locally so the large
// scenarios that skip the svec hull still get affine variants.
struct TableHull {
  RVec anchor;
  RMat dirs;  // columns
};

TableHull box_table_hull(const BoxScenario& sc) {
  TableHull h;
  const int tsize = sc.table_size();
  h.anchor = RVec::Constant(tsize, 1.0 / (sc.na * sc.nb));
  BoxLinearForm lf = ns_table_rows(sc);
  Eigen::FullPivLU<RMat> lu(lf.rows);
  lu.setThreshold(1e-9);
  h.dirs = lu.kernel();
  return h;
}

// ---------------------------------------------------------------------------
// Shared post-solve handling
// ---------------------------------------------------------------------------

// Fills status and the divergence conventions shared by the minimization
// programs; returns false when the result is final (no optimizers to read).
bool settle_min_program(const Solution& sol, double t, MonotoneResult* res,
                        const char* diverge_msg) {
  res->status = sol.status;
  res->dual_certificate = sol.cone_dual;
  if (sol.status == SolveStatus::infeasible) {
    res->value = kInf;
    append_note(&res->notes, diverge_msg);
    return false;
  }
  if (sol.status == SolveStatus::unbounded) {
    // The objective is bounded below by construction; certificates of
    // unboundedness only arise from numerical breakdown.
    res->status = SolveStatus::inaccurate;
    append_note(&res->notes, "solver returned an unboundedness certificate "
                             "for a bounded program; treating as inaccurate");
    res->value = t;
    return false;
  }
  if (t > kDivergenceCap) {
    res->value = kInf;
    append_note(&res->notes, "mixing weight exceeded the divergence cap");
    return false;
  }
  res->value = t;
  return true;
}

}  // namespace

const char* to_string(BoundDirection b) {
  switch (b) {
    case BoundDirection::exact:
      return "exact";
    case BoundDirection::lower:
      return "lower";
    case BoundDirection::upper:
      return "upper";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Robustness
// ---------------------------------------------------------------------------

namespace {

MonotoneResult robustness_tables(const Channel& ch,
                                 const FreeSetDescriptor& within,
                                 const FreeSetDescriptor& mixing) {
  const BoxScenario& sc = *within.box;
  RVec p = box_table("robustness", ch, sc);
  const int tsize = sc.table_size();

  ConicProgram prog("robustness[" + within.name + "]");
  std::vector<ScalarVar> y;
  y.reserve(tsize);
  for (int i = 0; i < tsize; ++i) y.push_back(prog.add_scalar());
  ScalarVar tv = prog.add_scalar("t");

  std::vector<AffExpr> qy(tsize), ye(tsize);
  for (int i = 0; i < tsize; ++i) {
    ye[i] = prog.expr(y[i]);
    qy[i] = AffExpr(p(i)) + ye[i];
  }
  emit_table_member(prog, within, qy, prog.expr(tv), "robustness");
  emit_table_member(prog, mixing, ye, prog.expr(tv) - AffExpr(1.0),
                    "robustness");
  prog.minimize(prog.expr(tv));

  Solution sol = prog.solve();
  MonotoneResult res;
  res.bound_direction =
      combine_direction(direction_of(within), direction_of(mixing), &res.notes);
  double t = (sol.status == SolveStatus::infeasible) ? 0.0
                                                     : prog.value(sol, tv);
  if (!settle_min_program(sol, t, &res,
                          "no finite mixing weight reaches the set; the "
                          "measure diverges"))
    return res;

  res.opt.r = t - 1.0;
  RVec yv(tsize), fm(tsize);
  for (int i = 0; i < tsize; ++i) {
    yv(i) = prog.value(sol, y[i]);
    fm(i) = (p(i) + yv(i)) / t;
  }
  res.opt.free_member = polish_table_channel(sc, fm);
  if (res.opt.r > 1e-9)
    res.opt.mixing = polish_table_channel(sc, yv / res.opt.r);
  return res;
}

}  // namespace

MonotoneResult robustness(const Channel& ch, const FreeSetDescriptor& within,
                          const FreeSetDescriptor& mixing) {
  check_dims("robustness", ch, within);
  check_dims("robustness", ch, mixing);
  if (within.box && mixing.box) return robustness_tables(ch, within, mixing);

  const int D = ch.choi_dim();
  ConicProgram prog("robustness[" + within.name + "]");
  MatVar yv = prog.add_herm(D, "Y");
  ScalarVar tv = prog.add_scalar("t");
  MatExpr je = ConicProgram::constant(ch.choi);
  emit_member_scaled(prog, within, je + prog.expr(yv), prog.expr(tv));
  emit_member_scaled(prog, mixing, prog.expr(yv), prog.expr(tv) - AffExpr(1.0));
  prog.minimize(prog.expr(tv));

  Solution sol = prog.solve();
  MonotoneResult res;
  res.bound_direction =
      combine_direction(direction_of(within), direction_of(mixing), &res.notes);
  double t = (sol.status == SolveStatus::infeasible) ? 0.0
                                                     : prog.value(sol, tv);
  if (!settle_min_program(sol, t, &res,
                          "no finite mixing weight reaches the set; the "
                          "measure diverges"))
    return res;

  res.opt.r = t - 1.0;
  Mat y = prog.value(sol, yv);
  res.opt.free_member = polish_channel((ch.choi + y) / t, ch.d_in, ch.d_out);
  if (res.opt.r > 1e-9)
    res.opt.mixing = polish_channel(y / res.opt.r, ch.d_in, ch.d_out);
  return res;
}

// ---------------------------------------------------------------------------
// Hypothesis-testing measure
// ---------------------------------------------------------------------------

namespace {

MonotoneResult rh_tables(const Channel& ch, const FreeSetDescriptor& desc,
                         double eps, bool affine) {
  const BoxScenario& sc = *desc.box;
  RVec p = box_table("hypothesis_testing", ch, sc);
  const int tsize = sc.table_size();
  const int nsettings = sc.d_in();
  const int nout = sc.d_out();

  ConicProgram prog("hypothesis-testing[" + desc.name + "]");
  std::vector<ScalarVar> pi, q;
  pi.reserve(nsettings);
  q.reserve(tsize);
  for (int s = 0; s < nsettings; ++s) pi.push_back(prog.add_scalar());
  for (int i = 0; i < tsize; ++i) q.push_back(prog.add_scalar());
  ScalarVar lv = prog.add_scalar("lambda");

  for (int s = 0; s < nsettings; ++s) prog.add_ineq(prog.expr(pi[s]));
  prog.add_eq(sum_of(pi) - AffExpr(1.0));
  for (int i = 0; i < tsize; ++i) {
    prog.add_ineq(prog.expr(q[i]));
    prog.add_ineq(prog.expr(pi[i / nout]) - prog.expr(q[i]));
  }
  prog.add_ineq(weighted_sum(q, p) - AffExpr(1.0 - eps));

  if (affine) {
    TableHull hull = box_table_hull(sc);
    prog.add_eq(weighted_sum(q, hull.anchor) - prog.expr(lv));
    for (int k = 0; k < hull.dirs.cols(); ++k)
      prog.add_eq(weighted_sum(q, hull.dirs.col(k)));
  } else {
    for (const RVec& v : vertex_tables(desc))
      prog.add_ineq(prog.expr(lv) - weighted_sum(q, v));
  }
  prog.minimize(prog.expr(lv));

  Solution sol = prog.solve();
  MonotoneResult res;
  res.bound_direction = direction_of(desc);
  bool cuts_stalled = false;

  // Lazy scenarios seed with a partial vertex list; separate on the optimal
  // effect and re-solve until no deterministic box beats the level.
  if (!affine && desc.best_generator) {
    int round = 0;
    for (; round < kMaxCutRounds; ++round) {
      if (sol.status == SolveStatus::infeasible) break;
      RVec qv(tsize);
      for (int i = 0; i < tsize; ++i) qv(i) = prog.value(sol, q[i]);
      double lam = prog.value(sol, lv);
      Mat score = Mat::Zero(tsize, tsize);
      score.diagonal() = qv.cast<cxd>();
      RVec v = desc.best_generator(score).diagonal().real();
      if (qv.dot(v) <= lam + 1e-7 * std::max(1.0, std::abs(lam))) break;
      prog.add_ineq(prog.expr(lv) - weighted_sum(q, v));
      sol = prog.solve();
    }
    if (round == kMaxCutRounds) {
      cuts_stalled = true;
      append_note(&res.notes,
                  "vertex cuts did not converge in 200 rounds; the last "
                  "iterate underestimates the level");
    }
  }

  res.dual_certificate = sol.cone_dual;
  res.status = cuts_stalled ? SolveStatus::inaccurate : sol.status;
  if (sol.status == SolveStatus::infeasible) {
    // The pair Q = rho (x) I, lambda = 1 is always feasible, so solver
    // infeasibility is a numerical artifact; fall back to the trivial point.
    res.value = 1.0;
    append_note(&res.notes,
                "solver reported infeasible although the trivial effect is "
                "feasible; returning the trivial value");
    return res;
  }

  double lam = prog.value(sol, lv);
  if (lam < 1e-10) {
    lam = 1e-10;
    res.status = SolveStatus::inaccurate;
    append_note(&res.notes, "support level collapsed to zero; value clamped");
  }
  res.value = 1.0 / lam;
  res.opt.lambda = lam;

  RVec piv(nsettings), qv(tsize);
  for (int s = 0; s < nsettings; ++s) piv(s) = std::max(0.0, prog.value(sol, pi[s]));
  for (int i = 0; i < tsize; ++i) qv(i) = prog.value(sol, q[i]);
  piv /= piv.sum();
  Mat rho = Mat::Zero(nsettings, nsettings);
  rho.diagonal() = piv.cast<cxd>();
  res.opt.rho = rho;
  Mat eff = Mat::Zero(ch.choi_dim(), ch.choi_dim());
  for (int i = 0; i < tsize; ++i) {
    double ps = piv(i / nout);
    eff(i, i) = (ps > 1e-12) ? std::min(1.0, std::max(0.0, qv(i) / ps)) : 0.0;
  }
  res.opt.effect = eff;
  return res;
}

MonotoneResult rh_quantum(const Channel& ch, const FreeSetDescriptor& desc,
                          double eps, bool affine) {
  const int din = ch.d_in, dout = ch.d_out, D = ch.choi_dim();
  ConicProgram prog("hypothesis-testing[" + desc.name + "]");
  MatVar rv = prog.add_herm(din, "rho");
  MatVar qv = prog.add_herm(D, "Q");
  ScalarVar lv = prog.add_scalar("lambda");

  prog.add_psd(prog.expr(rv));
  prog.add_eq(ConicProgram::trace(prog.expr(rv)) - AffExpr(1.0));
  prog.add_psd(prog.expr(qv));
  MatExpr rho_big = ConicProgram::map_linear(
      prog.expr(rv), D,
      [dout](const Mat& m) { return kron(m, Mat::Identity(dout, dout)); });
  prog.add_psd(rho_big - prog.expr(qv));
  prog.add_ineq(ConicProgram::inner(ch.choi, prog.expr(qv)) -
                AffExpr(1.0 - eps));
  if (affine)
    emit_affine_eq(prog, desc, prog.expr(qv), prog.expr(lv));
  else
    emit_support_ub(prog, desc, prog.expr(qv), prog.expr(lv));
  prog.minimize(prog.expr(lv));

  Solution sol = prog.solve();
  MonotoneResult res;
  res.bound_direction = direction_of(desc);
  bool cuts_stalled = false;

  if (!affine && desc.best_generator) {
    int round = 0;
    for (; round < kMaxCutRounds; ++round) {
      if (sol.status == SolveStatus::infeasible) break;
      Mat qm = prog.value(sol, qv);
      double lam = prog.value(sol, lv);
      Mat v = desc.best_generator(qm);
      if (hinner(v, qm) <= lam + 1e-7 * std::max(1.0, std::abs(lam))) break;
      prog.add_ineq(prog.expr(lv) - ConicProgram::inner(v, prog.expr(qv)));
      sol = prog.solve();
    }
    if (round == kMaxCutRounds) {
      cuts_stalled = true;
      append_note(&res.notes,
                  "vertex cuts did not converge in 200 rounds; the last "
                  "iterate underestimates the level");
    }
  }

  res.dual_certificate = sol.cone_dual;
  res.status = cuts_stalled ? SolveStatus::inaccurate : sol.status;
  if (sol.status == SolveStatus::infeasible) {
    res.value = 1.0;
    append_note(&res.notes,
                "solver reported infeasible although the trivial effect is "
                "feasible; returning the trivial value");
    return res;
  }

  double lam = prog.value(sol, lv);
  if (lam < 1e-10) {
    lam = 1e-10;
    res.status = SolveStatus::inaccurate;
    append_note(&res.notes, "support level collapsed to zero; value clamped");
  }
  res.value = 1.0 / lam;
  res.opt.lambda = lam;
  Mat rho = normalized_density(prog.value(sol, rv));
  res.opt.rho = rho;
  res.opt.effect = unpin_effect(prog.value(sol, qv), rho, dout);
  return res;
}

}  // namespace

MonotoneResult hypothesis_testing(const Channel& ch,
                                  const FreeSetDescriptor& desc, double eps,
                                  bool affine) {
  if (!(eps >= 0.0 && eps < 1.0))
    throw std::invalid_argument("hypothesis_testing: eps must lie in [0, 1)");
  check_dims("hypothesis_testing", ch, desc);
  if (desc.box) return rh_tables(ch, desc, eps, affine);
  return rh_quantum(ch, desc, eps, affine);
}

// ---------------------------------------------------------------------------
// Min-relative-entropy measure
// ---------------------------------------------------------------------------

MonotoneResult min_relative_entropy(const Channel& ch,
                                    const FreeSetDescriptor& desc,
                                    bool affine) {
  check_dims("min_relative_entropy", ch, desc);
  if (!affine) {
    MonotoneResult res = hypothesis_testing(ch, desc, 0.0, false);
    append_note(&res.notes, "computed as the zero-error hypothesis-testing "
                            "program");
    return res;
  }

  // Affine variant. Zero error pins the effect to the projector onto the
  // support of the output id (x) ch applied to the purified input, so the
  // program collapses to a feasibility check per input state: the pinched
  // projector must have constant overlap with the whole affine hull.
  const bool closed = (desc.support == SupportKind::replacement);
  if (!closed && !desc.has_affine_hull()) {
    throw std::logic_error(
        "min_relative_entropy: the affine variant needs the affine hull of '" +
        desc.name + "', which is not built at this size");
  }
  const int din = ch.d_in, dout = ch.d_out, D = ch.choi_dim();

  std::vector<Mat> starts;
  starts.push_back(Mat::Identity(din, din) / din);
  Rng rng(97531);
  for (int k = 0; k < 12; ++k) starts.push_back(rng.random_density(din));

  MonotoneResult res;
  res.status = SolveStatus::optimal;
  double best = -1.0;
  for (const Mat& rho : starts) {
    Mat big = kron(herm_sqrt(rho), Mat::Identity(dout, dout));
    Mat proj = support_projector(big * ch.choi * big, 1e-9);
    Mat t = big * proj * big;
    double scale = std::max(1.0, t.norm());
    double lam = 0.0;
    bool feasible = true;
    if (closed) {
      Mat marg = ptrace_first(t, din, dout);
      lam = marg.trace().real() / dout;
      feasible = (marg - lam * Mat::Identity(dout, dout)).norm() <= 1e-8 * scale;
    } else {
      lam = hinner(desc.affine_anchor, t);
      for (const RVec& dir : desc.affine_basis) {
        if (std::abs(hinner(svec_to_herm(dir, D), t)) > 1e-8 * scale) {
          feasible = false;
          break;
        }
      }
    }
    if (!feasible || lam <= 1e-12) continue;
    if (1.0 / lam > best) {
      best = 1.0 / lam;
      res.opt.rho = rho;
      res.opt.effect = proj;
      res.opt.lambda = lam;
    }
  }

  if (best < 0.0) {
    res.value = 0.0;
    append_note(&res.notes,
                "no input state makes the output support projector constant "
                "on the affine hull; the inner infimum is empty and the "
                "measure vanishes");
  } else {
    res.value = best;
  }
  if (closed && is_pure_output(ch)) {
    res.bound_direction = BoundDirection::exact;
  } else {
    res.bound_direction = BoundDirection::lower;
    append_note(&res.notes, "finite multistart over input states; the value "
                            "is achievable but need not be maximal");
  }
  res.bound_direction =
      combine_direction(res.bound_direction, direction_of(desc), &res.notes);
  return res;
}

// ---------------------------------------------------------------------------
// G fidelity measure
// ---------------------------------------------------------------------------

namespace {

MonotoneResult g_tables(const Channel& ch, const FreeSetDescriptor& desc,
                        double m, bool affine) {
  const BoxScenario& sc = *desc.box;
  RVec p = box_table("g_measure", ch, sc);
  const int tsize = sc.table_size();
  const int nsettings = sc.d_in();
  const int nout = sc.d_out();
  const double level = 1.0 / m;

  ConicProgram prog("g-measure[" + desc.name + "]");
  std::vector<ScalarVar> pi, q;
  for (int s = 0; s < nsettings; ++s) pi.push_back(prog.add_scalar());
  for (int i = 0; i < tsize; ++i) q.push_back(prog.add_scalar());
  for (int s = 0; s < nsettings; ++s) prog.add_ineq(prog.expr(pi[s]));
  prog.add_eq(sum_of(pi) - AffExpr(1.0));
  for (int i = 0; i < tsize; ++i) {
    prog.add_ineq(prog.expr(q[i]));
    prog.add_ineq(prog.expr(pi[i / nout]) - prog.expr(q[i]));
  }
  if (affine) {
    TableHull hull = box_table_hull(sc);
    prog.add_eq(weighted_sum(q, hull.anchor) - AffExpr(level));
    for (int k = 0; k < hull.dirs.cols(); ++k)
      prog.add_eq(weighted_sum(q, hull.dirs.col(k)));
  } else {
    for (const RVec& v : vertex_tables(desc))
      prog.add_ineq(AffExpr(level) - weighted_sum(q, v));
  }
  prog.maximize(weighted_sum(q, p));

  Solution sol = prog.solve();
  MonotoneResult res;
  res.bound_direction = direction_of(desc);
  bool cuts_stalled = false;

  if (!affine && desc.best_generator) {
    int round = 0;
    for (; round < kMaxCutRounds; ++round) {
      if (sol.status == SolveStatus::infeasible) break;
      RVec qv(tsize);
      for (int i = 0; i < tsize; ++i) qv(i) = prog.value(sol, q[i]);
      Mat score = Mat::Zero(tsize, tsize);
      score.diagonal() = qv.cast<cxd>();
      RVec v = desc.best_generator(score).diagonal().real();
      if (qv.dot(v) <= level + 1e-7 * std::max(1.0, level)) break;
      prog.add_ineq(AffExpr(level) - weighted_sum(q, v));
      sol = prog.solve();
    }
    if (round == kMaxCutRounds) {
      cuts_stalled = true;
      append_note(&res.notes,
                  "vertex cuts did not converge in 200 rounds; the last "
                  "iterate overestimates the measure");
    }
  }

  res.dual_certificate = sol.cone_dual;
  res.status = cuts_stalled ? SolveStatus::inaccurate : sol.status;
  if (sol.status == SolveStatus::infeasible) {
    res.value = 0.0;
    append_note(&res.notes, "the affine equalities at this scale admit no "
                            "feasible effect; the measure is zero and the "
                            "dual certificate witnesses it");
    return res;
  }

  res.value = sol.objective;
  res.opt.lambda = level;
  RVec piv(nsettings), qvv(tsize);
  for (int s = 0; s < nsettings; ++s) piv(s) = std::max(0.0, prog.value(sol, pi[s]));
  for (int i = 0; i < tsize; ++i) qvv(i) = prog.value(sol, q[i]);
  piv /= piv.sum();
  Mat rho = Mat::Zero(nsettings, nsettings);
  rho.diagonal() = piv.cast<cxd>();
  res.opt.rho = rho;
  Mat eff = Mat::Zero(ch.choi_dim(), ch.choi_dim());
  for (int i = 0; i < tsize; ++i) {
    double ps = piv(i / nout);
    eff(i, i) = (ps > 1e-12) ? std::min(1.0, std::max(0.0, qvv(i) / ps)) : 0.0;
  }
  res.opt.effect = eff;
  return res;
}

MonotoneResult g_quantum(const Channel& ch, const FreeSetDescriptor& desc,
                         double m, bool affine) {
  const int din = ch.d_in, dout = ch.d_out, D = ch.choi_dim();
  const double level = 1.0 / m;
  ConicProgram prog("g-measure[" + desc.name + "]");
  MatVar rv = prog.add_herm(din, "rho");
  MatVar qv = prog.add_herm(D, "Q");
  prog.add_psd(prog.expr(rv));
  prog.add_eq(ConicProgram::trace(prog.expr(rv)) - AffExpr(1.0));
  prog.add_psd(prog.expr(qv));
  MatExpr rho_big = ConicProgram::map_linear(
      prog.expr(rv), D,
      [dout](const Mat& m2) { return kron(m2, Mat::Identity(dout, dout)); });
  prog.add_psd(rho_big - prog.expr(qv));
  if (affine)
    emit_affine_eq(prog, desc, prog.expr(qv), AffExpr(level));
  else
    emit_support_ub(prog, desc, prog.expr(qv), AffExpr(level));
  prog.maximize(ConicProgram::inner(ch.choi, prog.expr(qv)));

  Solution sol = prog.solve();
  MonotoneResult res;
  res.bound_direction = direction_of(desc);
  bool cuts_stalled = false;

  if (!affine && desc.best_generator) {
    int round = 0;
    for (; round < kMaxCutRounds; ++round) {
      if (sol.status == SolveStatus::infeasible) break;
      Mat qm = prog.value(sol, qv);
      Mat v = desc.best_generator(qm);
      if (hinner(v, qm) <= level + 1e-7 * std::max(1.0, level)) break;
      prog.add_ineq(AffExpr(level) - ConicProgram::inner(v, prog.expr(qv)));
      sol = prog.solve();
    }
    if (round == kMaxCutRounds) {
      cuts_stalled = true;
      append_note(&res.notes,
                  "vertex cuts did not converge in 200 rounds; the last "
                  "iterate overestimates the measure");
    }
  }

  res.dual_certificate = sol.cone_dual;
  res.status = cuts_stalled ? SolveStatus::inaccurate : sol.status;
  if (sol.status == SolveStatus::infeasible) {
    res.value = 0.0;
    append_note(&res.notes, "the affine equalities at this scale admit no "
                            "feasible effect; the measure is zero and the "
                            "dual certificate witnesses it");
    return res;
  }

  res.value = sol.objective;
  res.opt.lambda = level;
  Mat rho = normalized_density(prog.value(sol, rv));
  res.opt.rho = rho;
  res.opt.effect = unpin_effect(prog.value(sol, qv), rho, dout);
  return res;
}

}  // namespace

MonotoneResult g_measure(const Channel& ch, const FreeSetDescriptor& desc,
                         double m, bool affine) {
  if (affine ? !(m > 0.0) : !(m >= 1.0)) {
    throw std::invalid_argument(
        "g_measure: the scale must satisfy m >= 1 (any m > 0 for the affine "
        "variant)");
  }
  check_dims("g_measure", ch, desc);
  if (desc.box) return g_tables(ch, desc, m, affine);
  return g_quantum(ch, desc, m, affine);
}

// ---------------------------------------------------------------------------
// Smoothed robustness
// ---------------------------------------------------------------------------

namespace {

// Entries of a general complex matrix X = H1 + i H2 spanned by two Hermitian
// variables, as (real, imag) affine expressions for block2x2.
void complex_entries(const ConicProgram& prog, MatVar h1, MatVar h2, int D,
                     std::vector<std::vector<AffExpr>>* bre,
                     std::vector<std::vector<AffExpr>>* bim) {
  bre->assign(D, std::vector<AffExpr>(D));
  bim->assign(D, std::vector<AffExpr>(D));
  MatExpr e1 = prog.expr(h1), e2 = prog.expr(h2);
  for (int i = 0; i < D; ++i) {
    for (int j = 0; j < D; ++j) {
      auto [r1, i1] = ConicProgram::entry(e1, i, j);
      auto [r2, i2] = ConicProgram::entry(e2, i, j);
      (*bre)[i][j] = r1 - i2;
      (*bim)[i][j] = i1 + r2;
    }
  }
}

MonotoneResult smooth_tables(SmoothKind kind, const Channel& ch,
                             const FreeSetDescriptor& within,
                             const FreeSetDescriptor& allowed,
                             const FreeSetDescriptor& mixdesc, double eps,
                             SmoothMetric metric) {
  const BoxScenario& sc = *within.box;
  RVec p = box_table("smooth", ch, sc);
  const int tsize = sc.table_size();
  const double target = std::sqrt(1.0 - eps);

  ConicProgram prog("smoothed robustness[" + within.name + "]");
  std::vector<ScalarVar> qp, y;
  for (int i = 0; i < tsize; ++i) qp.push_back(prog.add_scalar());
  for (int i = 0; i < tsize; ++i) y.push_back(prog.add_scalar());
  ScalarVar tv = prog.add_scalar("t");

  std::vector<AffExpr> qpe(tsize), ye(tsize), qye(tsize);
  for (int i = 0; i < tsize; ++i) {
    qpe[i] = prog.expr(qp[i]);
    ye[i] = prog.expr(y[i]);
    qye[i] = qpe[i] + ye[i];
  }
  emit_table_member(prog, allowed, qpe, AffExpr(1.0), "smooth");
  emit_table_member(prog, within, qye, prog.expr(tv), "smooth");
  emit_table_member(prog, mixdesc, ye, prog.expr(tv) - AffExpr(1.0), "smooth");

  // Root-fidelity surrogates: s_i^2 <= p_i * q'_i through 2x2 blocks. The
  // worst-case metric bounds every setting's Bhattacharyya sum; the Choi
  // metric bounds the single global sum.
  const Mat one = Mat::Identity(1, 1);
  std::vector<AffExpr> setting_sum(sc.d_in());
  AffExpr global_sum;
  for (int i = 0; i < tsize; ++i) {
    if (p(i) <= 1e-15) continue;
    ScalarVar sv = prog.add_scalar();
    MatExpr prod = ConicProgram::from_svec(1, {p(i) * qpe[i]});
    prog.add_psd(ConicProgram::block2x2(prod, ConicProgram::constant(one),
                                        {{prog.expr(sv)}}, {{AffExpr(0.0)}}));
    if (metric == SmoothMetric::worst_case)
      setting_sum[i / sc.d_out()] = setting_sum[i / sc.d_out()] + prog.expr(sv);
    else
      global_sum = global_sum + prog.expr(sv);
  }
  if (metric == SmoothMetric::worst_case) {
    for (int s = 0; s < sc.d_in(); ++s)
      prog.add_ineq(setting_sum[s] - AffExpr(target));
  } else {
    prog.add_ineq(global_sum - AffExpr(target * sc.d_in()));
  }
  prog.minimize(prog.expr(tv));

  Solution sol = prog.solve();
  MonotoneResult res;
  res.bound_direction =
      combine_direction(direction_of(within), direction_of(mixdesc), &res.notes);
  double t = (sol.status == SolveStatus::infeasible) ? 0.0
                                                     : prog.value(sol, tv);
  if (!settle_min_program(sol, t, &res,
                          "no channel within the fidelity ball has finite "
                          "robustness; the smoothed measure diverges"))
    return res;

  res.opt.r = t - 1.0;
  RVec qpv(tsize), yv(tsize), fm(tsize);
  for (int i = 0; i < tsize; ++i) {
    qpv(i) = std::max(0.0, prog.value(sol, qp[i]));
    yv(i) = prog.value(sol, y[i]);
    fm(i) = (qpv(i) + yv(i)) / t;
  }
  res.opt.smoothed = polish_table_channel(sc, qpv);
  res.opt.free_member = polish_table_channel(sc, fm);
  if (res.opt.r > 1e-9)
    res.opt.mixing = polish_table_channel(sc, yv / res.opt.r);
  return res;
}

// Shared constraint body of the quantum smoothing programs; the metric
// decides which fidelity constraints join it.
struct SmoothBody {
  ConicProgram prog;
  MatVar jp;
  MatVar yv;
  ScalarVar tv;
  SmoothBody(const Channel& ch, const FreeSetDescriptor& within,
             const FreeSetDescriptor& allowed, const FreeSetDescriptor& mix)
      : prog("smoothed robustness[" + within.name + "]"),
        jp(prog.add_herm(ch.choi_dim(), "Jp")),
        yv(prog.add_herm(ch.choi_dim(), "Y")),
        tv(prog.add_scalar("t")) {
    emit_member_scaled(prog, allowed, prog.expr(jp), AffExpr(1.0));
    emit_member_scaled(prog, within, prog.expr(jp) + prog.expr(yv),
                       prog.expr(tv));
    emit_member_scaled(prog, mix, prog.expr(yv), prog.expr(tv) - AffExpr(1.0));
    prog.minimize(prog.expr(tv));
  }
};

// Root-fidelity coupling sqrt(F)(A(x), B) >= target for a matrix expression
// A against constant B, via [[A, X],[X^dag, B]] psd and Re tr X >= target.
void add_fidelity_block(ConicProgram& prog, const MatExpr& a, const Mat& b,
                        double target) {
  const int D = a.dim;
  MatVar h1 = prog.add_herm(D);
  MatVar h2 = prog.add_herm(D);
  std::vector<std::vector<AffExpr>> bre, bim;
  complex_entries(prog, h1, h2, D, &bre, &bim);
  prog.add_psd(ConicProgram::block2x2(a, ConicProgram::constant(b), bre, bim));
  prog.add_ineq(ConicProgram::trace(prog.expr(h1)) - AffExpr(target));
}

MonotoneResult finish_smooth(const SmoothBody& body, const Solution& sol,
                             const Channel& ch,
                             const FreeSetDescriptor& within,
                             const FreeSetDescriptor& mixdesc) {
  MonotoneResult res;
  res.bound_direction =
      combine_direction(direction_of(within), direction_of(mixdesc), &res.notes);
  double t = (sol.status == SolveStatus::infeasible)
                 ? 0.0
                 : body.prog.value(sol, body.tv);
  if (!settle_min_program(sol, t, &res,
                          "no channel within the fidelity ball has finite "
                          "robustness; the smoothed measure diverges"))
    return res;
  res.opt.r = t - 1.0;
  Mat jpv = body.prog.value(sol, body.jp);
  Mat yvv = body.prog.value(sol, body.yv);
  res.opt.smoothed = polish_channel(jpv, ch.d_in, ch.d_out);
  res.opt.free_member = polish_channel((jpv + yvv) / t, ch.d_in, ch.d_out);
  if (res.opt.r > 1e-9)
    res.opt.mixing = polish_channel(yvv / res.opt.r, ch.d_in, ch.d_out);
  return res;
}

MonotoneResult smooth_choi(const Channel& ch, const FreeSetDescriptor& within,
                           const FreeSetDescriptor& allowed,
                           const FreeSetDescriptor& mixdesc, double eps) {
  SmoothBody body(ch, within, allowed, mixdesc);
  add_fidelity_block(body.prog, (1.0 / ch.d_in) * body.prog.expr(body.jp),
                     ch.choi / ch.d_in, std::sqrt(1.0 - eps));
  Solution sol = body.prog.solve();
  MonotoneResult res = finish_smooth(body, sol, ch, within, mixdesc);
  append_note(&res.notes, "fidelity measured between normalized Choi states");
  return res;
}

MonotoneResult smooth_worst_case(const Channel& ch,
                                 const FreeSetDescriptor& within,
                                 const FreeSetDescriptor& allowed,
                                 const FreeSetDescriptor& mixdesc, double eps) {
  const int dout = ch.d_out;
  const double target = std::sqrt(1.0 - eps);
  SmoothBody body(ch, within, allowed, mixdesc);

  auto add_input_cut = [&](const Mat& rho) {
    Mat big = kron(herm_sqrt(rho), Mat::Identity(dout, dout));
    MatExpr pinched = ConicProgram::map_linear(
        body.prog.expr(body.jp), ch.choi_dim(),
        [big](const Mat& m) { return Mat(big * m * big); });
    add_fidelity_block(body.prog, pinched, Mat(big * ch.choi * big), target);
  };

  add_input_cut(Mat::Identity(ch.d_in, ch.d_in) / ch.d_in);
  Solution sol = body.prog.solve();
  double shortfall = 0.0;
  bool fidelity_ok = false;
  bool oracle_flag = false;
  for (int round = 0; round < kMaxCutRounds; ++round) {
    if (sol.status == SolveStatus::infeasible) break;
    Channel cand =
        polish_channel(body.prog.value(sol, body.jp), ch.d_in, ch.d_out);
    ChannelFidelity wc = worst_case_fidelity(cand, ch);
    oracle_flag = oracle_flag || wc.inaccurate;
    shortfall = (1.0 - eps) - wc.value;
    if (shortfall <= 1e-5) {
      fidelity_ok = true;
      break;
    }
    add_input_cut(wc.worst_input);
    sol = body.prog.solve();
  }

  MonotoneResult res = finish_smooth(body, sol, ch, within, mixdesc);
  if (sol.status != SolveStatus::infeasible && !fidelity_ok) {
    res.status = SolveStatus::inaccurate;
    std::ostringstream os;
    os << "input-state cuts did not close the worst-case fidelity gap in "
       << kMaxCutRounds << " rounds; the last iterate misses the fidelity "
       << "target by " << shortfall;
    append_note(&res.notes, os.str());
  }
  if (oracle_flag)
    append_note(&res.notes, "the worst-case fidelity oracle flagged itself "
                            "inaccurate at least once");
  return res;
}

}  // namespace

MonotoneResult smooth(SmoothKind kind, const Channel& ch,
                      const FreeSetDescriptor& within,
                      const FreeSetDescriptor& allowed, double eps,
                      SmoothMetric metric) {
  if (!(eps >= 0.0 && eps < 1.0))
    throw std::invalid_argument("smooth: eps must lie in [0, 1)");
  check_dims("smooth", ch, within);
  check_dims("smooth", ch, allowed);
  const FreeSetDescriptor& mixdesc =
      (kind == SmoothKind::rs) ? within : allowed;
  if (eps == 0.0) {
    MonotoneResult res = robustness(ch, within, mixdesc);
    res.opt.smoothed = ch;
    append_note(&res.notes, "eps = 0 reduces to the plain robustness");
    return res;
  }
  if (within.box && allowed.box)
    return smooth_tables(kind, ch, within, allowed, mixdesc, eps, metric);
  if (metric == SmoothMetric::choi)
    return smooth_choi(ch, within, allowed, mixdesc, eps);
  return smooth_worst_case(ch, within, allowed, mixdesc, eps);
}

}  // namespace dynres
