#include "dynres/freesets.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace dynres {

const char* to_string(DimClass d) {
  return d == DimClass::full ? "full" : "reduced";
}

const char* to_string(Exactness e) {
  switch (e) {
    case Exactness::exact:
      return "exact";
    case Exactness::outer_relaxation:
      return "outer-relaxation";
    case Exactness::inner_approximation:
      return "inner-approximation";
  }
  return "?";
}

namespace {

// Choi dimensions above this keep descriptors vertex/table-only: the dense
// svec membership form and affine hull would need svec_dim(D)-sized rows.
constexpr int kMaxDenseChoiDim = 64;

MatExpr scaled_identity(int dim, const AffExpr& lam) {
  std::vector<AffExpr> coords(svec_dim(dim));
  for (int i = 0; i < dim; ++i) coords[i] = lam;
  return ConicProgram::from_svec(dim, coords);
}

// Real matrix of a Hermitian-preserving linear map in svec coordinates,
// built column by column.
RMat svec_map_matrix(int dim_in, int dim_out,
                     const std::function<Mat(const Mat&)>& f) {
  const int si = svec_dim(dim_in), so = svec_dim(dim_out);
  RMat m(so, si);
  RVec unit = RVec::Zero(si);
  for (int j = 0; j < si; ++j) {
    unit(j) = 1.0;
    m.col(j) = herm_to_svec(f(svec_to_herm(unit, dim_in)));
    unit(j) = 0.0;
  }
  return m;
}

// Partial transpose of the factors selected by mask: move them to the back,
// transpose that block, move them home.
Mat ptranspose_factors(const Mat& x, const std::vector<int>& dims,
                       const std::vector<bool>& mask) {
  std::vector<int> order;
  int keep = 1, moved = 1;
  for (size_t i = 0; i < dims.size(); ++i)
    if (!mask[i]) {
      order.push_back(static_cast<int>(i));
      keep *= dims[i];
    }
  for (size_t i = 0; i < dims.size(); ++i)
    if (mask[i]) {
      order.push_back(static_cast<int>(i));
      moved *= dims[i];
    }
  Mat y = ptranspose_second(permute_systems(x, dims, order), keep, moved);
  std::vector<int> inv(order.size());
  std::vector<int> pdims(order.size());
  for (size_t s = 0; s < order.size(); ++s) {
    inv[order[s]] = static_cast<int>(s);
    pdims[s] = dims[order[s]];
  }
  return permute_systems(y, pdims, inv);
}

// Membership form of conv(vertices) through convex-combination weights.
MembershipForm polytope_membership(const std::vector<Mat>& vertices) {
  const int dim = static_cast<int>(vertices.front().rows());
  const int n = static_cast<int>(vertices.size());
  MembershipForm f;
  f.dim = dim;
  f.L.resize(svec_dim(dim), n);
  for (int j = 0; j < n; ++j) f.L.col(j) = herm_to_svec(vertices[j]);
  f.l0 = RVec::Zero(svec_dim(dim));
  f.E = RMat::Ones(1, n);
  f.e = RVec::Ones(1);
  f.ucone.nonneg = n;
  f.slater = true;  // uniform weights are strictly interior
  return f;
}

// Density matrices spanning the full Hermitian space of C^d.
std::vector<Mat> spanning_states(int d) {
  std::vector<Mat> out;
  for (int k = 0; k < d; ++k) {
    Mat s = Mat::Zero(d, d);
    s(k, k) = 1;
    out.push_back(s);
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      Vec v = Vec::Zero(d);
      v(i) = 1;
      v(j) = 1;
      out.push_back(v * v.adjoint() / 2.0);
      Vec w = Vec::Zero(d);
      w(i) = 1;
      w(j) = cxd(0, 1);
      out.push_back(w * w.adjoint() / 2.0);
    }
  return out;
}

MatExpr ptrace_in_expr(const MatExpr& q, int d_in, int d_out) {
  return ConicProgram::map_linear(q, d_out, [d_in, d_out](const Mat& m) {
    return ptrace_first(m, d_in, d_out);
  });
}

}  // namespace

// ---------------------------------------------------------------------------
// Box tables
// ---------------------------------------------------------------------------

int box_table_index(const BoxScenario& sc, int x, int y, int a, int b) {
  return ((x * sc.ny + y) * sc.na + a) * sc.nb + b;
}

RVec det_box_table(const BoxScenario& sc, const std::vector<int>& f,
                   const std::vector<int>& g) {
  RVec q = RVec::Zero(sc.table_size());
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y) q(box_table_index(sc, x, y, f[x], g[y])) = 1.0;
  return q;
}

BoxLinearForm ns_table_rows(const BoxScenario& sc) {
  const int t = sc.table_size();
  const int nrm = sc.nx * sc.ny;
  const int nsa = sc.na * sc.nx * (sc.ny - 1);
  const int nsb = sc.nb * sc.ny * (sc.nx - 1);
  BoxLinearForm form;
  form.rows = RMat::Zero(nrm + nsa + nsb, t);
  form.rhs_scale = RVec::Zero(nrm + nsa + nsb);
  int r = 0;
  for (int x = 0; x < sc.nx; ++x)
    for (int y = 0; y < sc.ny; ++y, ++r) {
      for (int a = 0; a < sc.na; ++a)
        for (int b = 0; b < sc.nb; ++b) form.rows(r, box_table_index(sc, x, y, a, b)) = 1;
      form.rhs_scale(r) = 1;
    }
  // Alice's marginal must not depend on y, Bob's not on x.
  for (int a = 0; a < sc.na; ++a)
    for (int x = 0; x < sc.nx; ++x)
      for (int y = 0; y + 1 < sc.ny; ++y, ++r)
        for (int b = 0; b < sc.nb; ++b) {
          form.rows(r, box_table_index(sc, x, y, a, b)) += 1;
          form.rows(r, box_table_index(sc, x, y + 1, a, b)) -= 1;
        }
  for (int b = 0; b < sc.nb; ++b)
    for (int y = 0; y < sc.ny; ++y)
      for (int x = 0; x + 1 < sc.nx; ++x, ++r)
        for (int a = 0; a < sc.na; ++a) {
          form.rows(r, box_table_index(sc, x, y, a, b)) += 1;
          form.rows(r, box_table_index(sc, x + 1, y, a, b)) -= 1;
        }
  return form;
}

namespace {

Mat table_to_choi(const BoxScenario& sc, const RVec& q) {
  const int d = sc.d_in() * sc.d_out();
  Mat j = Mat::Zero(d, d);
  for (int i = 0; i < sc.table_size(); ++i) j(i, i) = q(i);
  return j;
}

std::vector<int> digits(long long code, int base, int len) {
  std::vector<int> d(len);
  for (int i = 0; i < len; ++i) {
    d[i] = static_cast<int>(code % base);
    code /= base;
  }
  return d;
}

// Best deterministic box against a diagonal score table: for each strategy f
// of Alice the optimal g decouples across Bob's settings.
RVec best_det_table(const BoxScenario& sc, const RVec& score) {
  long long nf = 1;
  for (int x = 0; x < sc.nx; ++x) nf *= sc.na;
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> bestf, bestg;
  for (long long code = 0; code < nf; ++code) {
    std::vector<int> f = digits(code, sc.na, sc.nx);
    double val = 0;
    std::vector<int> g(sc.ny);
    for (int y = 0; y < sc.ny; ++y) {
      double vb = -std::numeric_limits<double>::infinity();
      for (int b = 0; b < sc.nb; ++b) {
        double s = 0;
        for (int x = 0; x < sc.nx; ++x) s += score(box_table_index(sc, x, y, f[x], b));
        if (s > vb) {
          vb = s;
          g[y] = b;
        }
      }
      val += vb;
    }
    if (val > best) {
      best = val;
      bestf = f;
      bestg = g;
    }
  }
  return det_box_table(sc, bestf, bestg);
}

// Affine hull of the no-signalling table space, lifted to diagonal Choi
// svec directions. Shared by local and no-signalling descriptors, whose
// affine hulls coincide.
void fill_box_affine_hull(FreeSetDescriptor& desc, const BoxScenario& sc) {
  BoxLinearForm form = ns_table_rows(sc);
  Eigen::FullPivLU<RMat> lu(form.rows);
  lu.setThreshold(1e-9);
  RMat ker = lu.kernel();
  // Orthonormalize the kernel columns.
  Eigen::HouseholderQR<RMat> qr(ker);
  RMat qfull = qr.householderQ() * RMat::Identity(ker.rows(), ker.cols());
  desc.ambient_affine_dim = static_cast<int>(ker.cols());
  const int d = sc.d_in() * sc.d_out();
  if (d > kMaxDenseChoiDim) return;
  RVec white = RVec::Constant(sc.table_size(), 1.0 / (sc.na * sc.nb));
  desc.affine_anchor = table_to_choi(sc, white);
  for (int k = 0; k < qfull.cols(); ++k)
    desc.affine_basis.push_back(herm_to_svec(table_to_choi(sc, qfull.col(k))));
}

// Separation over probability tables. Box sets contain only diagonal Choi
// matrices, so an off-diagonal part is itself a witness; the diagonal part
// is handled by a small LP over table functionals with entries in [-1, 1],
// with lazy deterministic-box cuts for the local polytope and the linear
// no-signalling dual otherwise.
MembershipReport box_membership_check(const FreeSetDescriptor& desc,
                                      const Channel& ch, double tol) {
  const BoxScenario& sc = *desc.box;
  Mat offdiag = ch.choi;
  offdiag.diagonal().setZero();
  const double off = offdiag.norm();
  if (off > std::max(tol, 1e-9)) {
    MembershipReport rep;
    rep.violation = off;
    rep.witness = offdiag / off;
    return rep;
  }
  const RVec q = ch.choi.diagonal().real();
  const int t = sc.table_size();
  std::vector<RVec> cuts;
  for (const Mat& g : desc.generators) cuts.push_back(g.diagonal().real());

  for (int round = 0; round < 400; ++round) {
    ConicProgram prog("membership:" + desc.name);
    std::vector<ScalarVar> xt(t);
    for (int i = 0; i < t; ++i) xt[i] = prog.add_scalar();
    ScalarVar tv = prog.add_scalar("t");
    AffExpr score;
    for (int i = 0; i < t; ++i) {
      prog.add_ineq(AffExpr(1.0) - prog.expr(xt[i]));
      prog.add_ineq(prog.expr(xt[i]) + AffExpr(1.0));
      score = score + q(i) * prog.expr(xt[i]);
    }
    if (desc.is_polytope) {
      for (const RVec& v : cuts) {
        AffExpr lhs = prog.expr(tv);
        for (int i = 0; i < t; ++i)
          if (v(i) != 0.0) lhs = lhs - v(i) * prog.expr(xt[i]);
        prog.add_ineq(lhs);
      }
    } else {
      // sup over the no-signalling polytope through its LP dual.
      BoxLinearForm ns = ns_table_rows(sc);
      const int nr = static_cast<int>(ns.rows.rows());
      std::vector<ScalarVar> y(nr);
      for (int r = 0; r < nr; ++r) y[r] = prog.add_scalar();
      for (int i = 0; i < t; ++i) {
        AffExpr lhs;
        for (int r = 0; r < nr; ++r)
          if (ns.rows(r, i) != 0.0) lhs = lhs + ns.rows(r, i) * prog.expr(y[r]);
        prog.add_ineq(lhs - prog.expr(xt[i]));
      }
      AffExpr ry;
      for (int r = 0; r < nr; ++r) ry = ry + ns.rhs_scale(r) * prog.expr(y[r]);
      prog.add_ineq(prog.expr(tv) - ry);
    }
    prog.maximize(score - prog.expr(tv));
    Solution sol = prog.solve();
    if (!sol.ok())
      throw std::runtime_error("membership_check: table separation returned " +
                               std::string(to_string(sol.status)) + " for " + desc.name);
    RVec xstar(t);
    for (int i = 0; i < t; ++i) xstar(i) = prog.value(sol, xt[i]);
    if (desc.is_polytope) {
      RVec vbest = best_det_table(sc, xstar);
      if (vbest.dot(xstar) > prog.value(sol, tv) + 1e-9) {
        cuts.push_back(vbest);
        continue;
      }
    }
    MembershipReport rep;
    rep.violation = std::max(0.0, sol.objective);
    rep.member = rep.violation <= tol;
    if (!rep.member) rep.witness = table_to_choi(sc, xstar);
    return rep;
  }
  throw std::runtime_error("membership_check: cut loop did not close for " + desc.name);
}

}  // namespace

// ---------------------------------------------------------------------------
// Constraint emission
// ---------------------------------------------------------------------------

void emit_support_ub(ConicProgram& prog, const FreeSetDescriptor& desc,
                     const MatExpr& Q, const AffExpr& bound) {
  switch (desc.support) {
    case SupportKind::vertices: {
      if (desc.generators.empty())
        throw std::logic_error("emit_support_ub: no generators for " + desc.name);
      for (const Mat& v : desc.generators)
        prog.add_ineq(bound - ConicProgram::inner(v, Q));
      return;
    }
    case SupportKind::conic_dual:
      emit_support_dual(prog, desc.membership, Q, bound);
      return;
    case SupportKind::replacement: {
      // sup_sigma <Q, I (x) sigma> = lambda_max(Tr_in Q).
      prog.add_psd(scaled_identity(desc.d_out, bound) -
                   ptrace_in_expr(Q, desc.d_in, desc.d_out));
      return;
    }
  }
}

void emit_affine_eq(ConicProgram& prog, const FreeSetDescriptor& desc,
                    const MatExpr& Q, const AffExpr& value) {
  if (desc.support == SupportKind::replacement) {
    // <Q, I (x) H> = value over all unit-trace Hermitian H forces
    // Tr_in Q = value * I entrywise.
    MatExpr t = ptrace_in_expr(Q, desc.d_in, desc.d_out);
    for (int i = 0; i < desc.d_out; ++i)
      for (int j = i; j < desc.d_out; ++j) {
        auto [re, im] = ConicProgram::entry(t, i, j);
        prog.add_eq(i == j ? re - value : re);
        if (j > i) prog.add_eq(im);
      }
    return;
  }
  if (!desc.has_affine_hull())
    throw std::logic_error("emit_affine_eq: " + desc.name +
                           " carries no affine hull; compute one from generators first");
  prog.add_eq(ConicProgram::inner(desc.affine_anchor, Q) - value);
  const int dim = static_cast<int>(desc.affine_anchor.rows());
  for (const RVec& dir : desc.affine_basis)
    prog.add_eq(ConicProgram::inner(svec_to_herm(dir, dim), Q));
}

void emit_member_scaled(ConicProgram& prog, const FreeSetDescriptor& desc,
                        const MatExpr& J, const AffExpr& t) {
  if (desc.membership.dim == 0)
    throw std::logic_error("emit_member_scaled: " + desc.name +
                           " has no membership form at this size; use the table programs");
  emit_membership(prog, desc.membership, J, t);
}

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

MembershipReport membership_check(const FreeSetDescriptor& desc,
                                  const Channel& ch, double tol) {
  if (ch.d_in != desc.d_in || ch.d_out != desc.d_out)
    throw std::invalid_argument("membership_check: channel is " +
                                std::to_string(ch.d_in) + "->" + std::to_string(ch.d_out) +
                                " but " + desc.name + " expects " +
                                std::to_string(desc.d_in) + "->" + std::to_string(desc.d_out));
  if (desc.box) return box_membership_check(desc, ch, tol);
  const int d = desc.d_in * desc.d_out;
  const bool cut_based = desc.support == SupportKind::vertices;
  std::vector<Mat> cuts = desc.generators;
  if (cut_based && cuts.empty() && desc.best_generator)
    cuts.push_back(desc.best_generator(ch.choi));

  for (int round = 0; round < 200; ++round) {
    ConicProgram prog("membership:" + desc.name);
    MatVar xv = prog.add_herm(d, "X");
    ScalarVar tv = prog.add_scalar("t");
    MatExpr x = prog.expr(xv);
    Mat eye = Mat::Identity(d, d);
    prog.add_psd(ConicProgram::constant(eye) - x);
    prog.add_psd(ConicProgram::constant(eye) + x);
    if (cut_based) {
      for (const Mat& v : cuts) prog.add_ineq(prog.expr(tv) - ConicProgram::inner(v, x));
    } else {
      if (desc.membership.dim == 0)
        throw std::logic_error("membership_check: " + desc.name +
                               " has no membership form at this size");
      emit_support_ub(prog, desc, x, prog.expr(tv));
    }
    prog.maximize(ConicProgram::inner(ch.choi, x) - prog.expr(tv));
    Solution sol = prog.solve();
    if (!sol.ok())
      throw std::runtime_error("membership_check: separation solve returned " +
                               std::string(to_string(sol.status)) + " for " + desc.name);
    Mat xstar = prog.value(sol, xv);
    if (cut_based && desc.best_generator) {
      Mat vbest = desc.best_generator(xstar);
      double outside = (vbest.adjoint() * xstar).trace().real();
      if (outside > prog.value(sol, tv) + 1e-9) {
        cuts.push_back(vbest);
        continue;
      }
    }
    MembershipReport rep;
    rep.violation = std::max(0.0, sol.objective);
    rep.member = rep.violation <= tol;
    if (!rep.member) rep.witness = xstar;
    return rep;
  }
  throw std::runtime_error("membership_check: cut loop did not close for " + desc.name);
}

DimClass dim_classify(const FreeSetDescriptor& desc) {
  if (!desc.has_affine_hull()) return desc.dim_class;
  const int d = desc.d_in * desc.d_out;
  const int ambient = desc.ambient_affine_dim >= 0
                          ? desc.ambient_affine_dim
                          : d * d - desc.d_in * desc.d_in;
  return static_cast<int>(desc.affine_basis.size()) < ambient ? DimClass::reduced
                                                              : DimClass::full;
}

Mat sample_member(const FreeSetDescriptor& desc, Rng& rng) {
  const int d = desc.d_in * desc.d_out;
  if (desc.membership.dim > 0) {
    ConicProgram prog("sample:" + desc.name);
    MatVar jv = prog.add_herm(d, "J");
    emit_membership(prog, desc.membership, prog.expr(jv), AffExpr(1.0));
    prog.maximize(ConicProgram::inner(rng.random_hermitian(d), prog.expr(jv)));
    Solution sol = prog.solve();
    if (!sol.ok())
      throw std::runtime_error("sample_member: solve returned " +
                               std::string(to_string(sol.status)) + " for " + desc.name);
    return prog.value(sol, jv);
  }
  if (desc.best_generator) {
    // Vertex-only polytope: a random mixture of extremal members.
    Mat m = Mat::Zero(d, d);
    double tot = 0;
    for (int k = 0; k < 4; ++k) {
      double w = rng.uniform(0.1, 1.0);
      m += w * desc.best_generator(rng.random_hermitian(d));
      tot += w;
    }
    return m / tot;
  }
  if (!desc.generators.empty()) {
    Mat m = Mat::Zero(d, d);
    double tot = 0;
    for (const Mat& v : desc.generators) {
      double w = rng.uniform(0.0, 1.0);
      m += w * v;
      tot += w;
    }
    return m / tot;
  }
  throw std::logic_error("sample_member: " + desc.name + " offers nothing to sample from");
}

void compute_affine_hull(FreeSetDescriptor& desc, double rank_cutoff) {
  if (desc.generators.empty())
    throw std::logic_error("compute_affine_hull: no generators for " + desc.name);
  desc.affine_anchor = desc.generators.front();
  desc.affine_basis.clear();
  RVec a0 = herm_to_svec(desc.affine_anchor);
  for (size_t i = 1; i < desc.generators.size(); ++i) {
    RVec v = herm_to_svec(desc.generators[i]) - a0;
    for (int pass = 0; pass < 2; ++pass)
      for (const RVec& b : desc.affine_basis) v -= b.dot(v) * b;
    double n = v.norm();
    if (n > rank_cutoff) desc.affine_basis.push_back(v / n);
  }
}

// ---------------------------------------------------------------------------
// Built-in descriptors
// ---------------------------------------------------------------------------

FreeSetDescriptor replacement_channels(int d) {
  FreeSetDescriptor desc;
  desc.name = "replacement(" + std::to_string(d) + ")";
  desc.d_in = desc.d_out = d;
  desc.dim_class = DimClass::reduced;
  desc.support = SupportKind::replacement;
  const int dd = d * d;

  MembershipForm f;
  f.dim = dd;
  f.L = svec_map_matrix(
      d, dd, [d](const Mat& s) { return kron(Mat::Identity(d, d), s); });
  f.l0 = RVec::Zero(svec_dim(dd));
  f.E.resize(1, svec_dim(d));
  f.E.row(0) = herm_to_svec(Mat::Identity(d, d)).transpose();
  f.e = RVec::Ones(1);
  f.ucone.psd = {d};
  f.slater = true;
  desc.membership = std::move(f);

  desc.slater_choi = kron(Mat::Identity(d, d), Mat::Identity(d, d) / d);
  for (const Mat& s : spanning_states(d))
    desc.generators.push_back(kron(Mat::Identity(d, d), s));
  compute_affine_hull(desc);
  return desc;
}

FreeSetDescriptor cptp_channels(int d_in, int d_out) {
  FreeSetDescriptor desc;
  desc.name = "cptp(" + std::to_string(d_in) + "->" + std::to_string(d_out) + ")";
  desc.d_in = d_in;
  desc.d_out = d_out;
  const int d = d_in * d_out;

  MembershipForm f;
  f.dim = d;
  f.L = RMat::Identity(svec_dim(d), svec_dim(d));
  f.l0 = RVec::Zero(svec_dim(d));
  f.E = svec_map_matrix(d, d_in, [d_in, d_out](const Mat& m) {
    return ptrace_second(m, d_in, d_out);
  });
  f.e = herm_to_svec(Mat::Identity(d_in, d_in));
  f.ucone.psd = {d};
  f.slater = true;
  desc.membership = std::move(f);

  desc.slater_choi =
      kron(Mat::Identity(d_in, d_in), Mat::Identity(d_out, d_out) / d_out);
  return desc;
}

FreeSetDescriptor ppt_channels(int da_in, int db_in, int da_out, int db_out) {
  const int d_in = da_in * db_in, d_out = da_out * db_out;
  const int d = d_in * d_out;
  const int sd = svec_dim(d), sin = svec_dim(d_in);
  FreeSetDescriptor desc;
  desc.name = "ppt(" + std::to_string(da_in) + "x" + std::to_string(db_in) +
              "->" + std::to_string(da_out) + "x" + std::to_string(db_out) + ")";
  desc.d_in = d_in;
  desc.d_out = d_out;

  std::vector<int> dims = {da_in, db_in, da_out, db_out};
  std::vector<bool> mask = {false, true, false, true};
  RMat pt = svec_map_matrix(
      d, d, [dims, mask](const Mat& m) { return ptranspose_factors(m, dims, mask); });
  RMat tp = svec_map_matrix(d, d_in, [d_in, d_out](const Mat& m) {
    return ptrace_second(m, d_in, d_out);
  });

  // u = (svec J, svec J^pt), both PSD, linked entrywise.
  MembershipForm f;
  f.dim = d;
  f.L = RMat::Zero(sd, 2 * sd);
  f.L.leftCols(sd).setIdentity();
  f.l0 = RVec::Zero(sd);
  f.E = RMat::Zero(sd + sin, 2 * sd);
  f.E.topLeftCorner(sd, sd) = pt;
  f.E.topRightCorner(sd, sd) = -RMat::Identity(sd, sd);
  f.E.bottomLeftCorner(sin, sd) = tp;
  f.e = RVec::Zero(sd + sin);
  f.e.tail(sin) = herm_to_svec(Mat::Identity(d_in, d_in));
  f.ucone.psd = {d, d};
  f.slater = true;
  desc.membership = std::move(f);

  desc.slater_choi =
      kron(Mat::Identity(d_in, d_in), Mat::Identity(d_out, d_out) / d_out);
  return desc;
}

FreeSetDescriptor ppt_channels(int d_in, int d_out) {
  FreeSetDescriptor desc = ppt_channels(d_in, 1, 1, d_out);
  desc.name = "ppt(" + std::to_string(d_in) + "->" + std::to_string(d_out) + ")";
  return desc;
}

FreeSetDescriptor sep_channels_relax(int da_in, int db_in, int da_out,
                                     int db_out, int level) {
  const int d_in = da_in * db_in, d_out = da_out * db_out;
  FreeSetDescriptor desc = ppt_channels(da_in, db_in, da_out, db_out);
  desc.name = "sep-relax" + std::to_string(level) + "(" + std::to_string(da_in) +
              "x" + std::to_string(db_in) + "->" + std::to_string(da_out) + "x" +
              std::to_string(db_out) + ")";
  desc.exactness = Exactness::outer_relaxation;
  if (level <= 0) return desc;

  const int d = d_in * d_out;
  const int da = da_in * da_out, db = db_in * db_out;
  int dom = da;
  for (int i = 0; i <= level; ++i) dom *= db;
  const int sd = svec_dim(d), sin = svec_dim(d_in), som = svec_dim(dom);

  std::vector<int> jdims = {da_in, db_in, da_out, db_out};
  RMat pt = svec_map_matrix(d, d, [jdims](const Mat& m) {
    return ptranspose_factors(m, jdims, {false, true, false, true});
  });
  RMat tp = svec_map_matrix(d, d_in, [d_in, d_out](const Mat& m) {
    return ptrace_second(m, d_in, d_out);
  });
  // J reordered to Alice (x) Bob = [a_in, a_out, b_in, b_out].
  RMat reorder = svec_map_matrix(d, d, [jdims](const Mat& m) {
    return permute_systems(m, jdims, {0, 2, 1, 3});
  });

  std::vector<int> odims(level + 2, db);
  odims[0] = da;
  // Trace over all extension copies, keeping Alice and the first Bob.
  RMat ext_trace = svec_map_matrix(dom, da * db, [da, db, dom](const Mat& m) {
    return ptrace_second(m, da * db, dom / (da * db));
  });
  std::vector<RMat> swaps;
  for (int i = 1; i <= level; ++i) {
    std::vector<int> perm(level + 2);
    for (int s = 0; s < level + 2; ++s) perm[s] = s;
    std::swap(perm[i], perm[i + 1]);
    swaps.push_back(svec_map_matrix(
        dom, dom, [odims, perm](const Mat& m) { return permute_systems(m, odims, perm); }));
  }
  std::vector<RMat> pts;
  for (int j = 1; j <= level + 1; ++j) {
    std::vector<bool> m(level + 2, false);
    for (int s = 0; s < j; ++s) m[level + 1 - s] = true;
    pts.push_back(svec_map_matrix(
        dom, dom, [odims, m](const Mat& x) { return ptranspose_factors(x, odims, m); }));
  }

  // u = (J, J^pt, Omega, Omega^pt_1 .. Omega^pt_{level+1}).
  const int nblocks = level + 1;
  const int ucols = 2 * sd + (nblocks + 1) * som;
  const int nrows = sd + sin + sd + level * som + nblocks * som;
  MembershipForm f;
  f.dim = d;
  f.L = RMat::Zero(sd, ucols);
  f.L.leftCols(sd).setIdentity();
  f.l0 = RVec::Zero(sd);
  f.E = RMat::Zero(nrows, ucols);
  f.e = RVec::Zero(nrows);
  int r = 0;
  f.E.block(r, 0, sd, sd) = pt;
  f.E.block(r, sd, sd, sd) = -RMat::Identity(sd, sd);
  r += sd;
  f.E.block(r, 0, sin, sd) = tp;
  f.e.segment(r, sin) = herm_to_svec(Mat::Identity(d_in, d_in));
  r += sin;
  // The extension marginal reproduces the reordered Choi matrix.
  f.E.block(r, 2 * sd, sd, som) = ext_trace;
  f.E.block(r, 0, sd, sd) = -reorder;
  r += sd;
  for (const RMat& sw : swaps) {
    f.E.block(r, 2 * sd, som, som) = sw - RMat::Identity(som, som);
    r += som;
  }
  for (int j = 0; j < nblocks; ++j) {
    f.E.block(r, 2 * sd, som, som) = pts[j];
    f.E.block(r, 2 * sd + (j + 1) * som, som, som) = -RMat::Identity(som, som);
    r += som;
  }
  f.ucone.psd.assign({d, d});
  for (int j = 0; j <= nblocks; ++j) f.ucone.psd.push_back(dom);
  f.slater = true;  // the fully depolarizing channel extends symmetrically
  desc.membership = std::move(f);
  return desc;
}

FreeSetDescriptor sep_channels_relax(int d_in, int d_out, int level) {
  FreeSetDescriptor desc = sep_channels_relax(d_in, 1, 1, d_out, level);
  desc.name = "sep-relax" + std::to_string(level) + "(" + std::to_string(d_in) +
              "->" + std::to_string(d_out) + ")";
  return desc;
}

FreeSetDescriptor local_boxes(int nx, int ny, int na, int nb, int lazy_threshold) {
  BoxScenario sc{nx, ny, na, nb};
  FreeSetDescriptor desc;
  desc.name = "local(" + std::to_string(nx) + std::to_string(ny) +
              std::to_string(na) + std::to_string(nb) + ")";
  desc.d_in = sc.d_in();
  desc.d_out = sc.d_out();
  desc.is_polytope = true;
  desc.support = SupportKind::vertices;
  desc.box = sc;

  double count = std::pow(static_cast<double>(na), nx) *
                 std::pow(static_cast<double>(nb), ny);
  if (count <= lazy_threshold) {
    long long nf = 1, ng = 1;
    for (int x = 0; x < nx; ++x) nf *= na;
    for (int y = 0; y < ny; ++y) ng *= nb;
    for (long long cf = 0; cf < nf; ++cf)
      for (long long cg = 0; cg < ng; ++cg)
        desc.generators.push_back(
            table_to_choi(sc, det_box_table(sc, digits(cf, na, nx), digits(cg, nb, ny))));
    desc.membership = polytope_membership(desc.generators);
  } else {
    // Seed cuts plus an exact separation oracle over all deterministic boxes.
    Rng seed_rng(20240901);
    long long nf = 1, ng = 1;
    for (int x = 0; x < nx; ++x) nf *= na;
    for (int y = 0; y < ny; ++y) ng *= nb;
    for (int k = 0; k < 32; ++k) {
      long long cf = static_cast<long long>(seed_rng.uniform(0.0, 1.0) * nf);
      long long cg = static_cast<long long>(seed_rng.uniform(0.0, 1.0) * ng);
      desc.generators.push_back(table_to_choi(
          sc, det_box_table(sc, digits(std::min(cf, nf - 1), na, nx),
                            digits(std::min(cg, ng - 1), nb, ny))));
    }
    desc.best_generator = [sc](const Mat& q) {
      return table_to_choi(sc, best_det_table(sc, q.diagonal().real()));
    };
  }
  fill_box_affine_hull(desc, sc);
  RVec white = RVec::Constant(sc.table_size(), 1.0 / (na * nb));
  desc.slater_choi = table_to_choi(sc, white);
  return desc;
}

FreeSetDescriptor ns_boxes(int nx, int ny, int na, int nb) {
  BoxScenario sc{nx, ny, na, nb};
  FreeSetDescriptor desc;
  desc.name = "ns(" + std::to_string(nx) + std::to_string(ny) +
              std::to_string(na) + std::to_string(nb) + ")";
  desc.d_in = sc.d_in();
  desc.d_out = sc.d_out();
  desc.box = sc;
  const int d = desc.d_in * desc.d_out;

  if (d <= kMaxDenseChoiDim) {
    const int t = sc.table_size();
    BoxLinearForm rows = ns_table_rows(sc);
    MembershipForm f;
    f.dim = d;
    f.L = RMat::Zero(svec_dim(d), t);
    for (int i = 0; i < t; ++i) {
      RVec unit = RVec::Zero(t);
      unit(i) = 1;
      f.L.col(i) = herm_to_svec(table_to_choi(sc, unit));
    }
    f.l0 = RVec::Zero(svec_dim(d));
    f.E = rows.rows;
    f.e = rows.rhs_scale;
    f.ucone.nonneg = t;
    f.slater = true;  // the white-noise box is strictly positive
    desc.membership = std::move(f);
  }
  fill_box_affine_hull(desc, sc);
  RVec white = RVec::Constant(sc.table_size(), 1.0 / (na * nb));
  desc.slater_choi = table_to_choi(sc, white);
  return desc;
}

namespace {

// Choi matrix of the classical-quantum measurement channel defined by a
// POVM assemblage: input (setting, system), output the outcome label.
Mat assemblage_choi(int d, int nx, int na, const std::vector<std::vector<Mat>>& povms) {
  Mat j = Mat::Zero(nx * d * na, nx * d * na);
  for (int x = 0; x < nx; ++x) {
    Mat ex = Mat::Zero(nx, nx);
    ex(x, x) = 1;
    for (int a = 0; a < na; ++a) {
      Mat ea = Mat::Zero(na, na);
      ea(a, a) = 1;
      j += kron(ex, kron(povms[x][a].transpose(), ea));
    }
  }
  return j;
}

}  // namespace

FreeSetDescriptor compatible_povms(int d, int nx, int na) {
  FreeSetDescriptor desc;
  desc.name = "compatible-povms(d=" + std::to_string(d) + ",x=" +
              std::to_string(nx) + ",a=" + std::to_string(na) + ")";
  desc.d_in = nx * d;
  desc.d_out = na;
  const int dj = desc.d_in * desc.d_out;
  long long nl = 1;
  for (int x = 0; x < nx; ++x) nl *= na;

  // u = parent-POVM effects G_lambda over deterministic post-processings
  // lambda: settings -> outcomes; F_{a|x} = sum_{lambda(x)=a} G_lambda.
  MembershipForm f;
  f.dim = dj;
  const int sg = svec_dim(d);
  f.L = RMat::Zero(svec_dim(dj), nl * sg);
  for (long long l = 0; l < nl; ++l) {
    std::vector<int> lam = digits(l, na, nx);
    RVec unit = RVec::Zero(sg);
    for (int k = 0; k < sg; ++k) {
      unit(k) = 1;
      Mat g = svec_to_herm(unit, d);
      unit(k) = 0;
      std::vector<std::vector<Mat>> povms(nx, std::vector<Mat>(na, Mat::Zero(d, d)));
      for (int x = 0; x < nx; ++x) povms[x][lam[x]] = g;
      f.L.col(l * sg + k) = herm_to_svec(assemblage_choi(d, nx, na, povms));
    }
  }
  f.l0 = RVec::Zero(svec_dim(dj));
  f.E = RMat::Zero(sg, nl * sg);
  for (long long l = 0; l < nl; ++l)
    f.E.block(0, l * sg, sg, sg) = RMat::Identity(sg, sg);
  f.e = herm_to_svec(Mat::Identity(d, d));
  f.ucone.psd.assign(nl, d);
  f.slater = true;  // G_lambda = I / n_lambda
  desc.membership = std::move(f);

  // Deterministic-outcome assemblages as a generating family, plus the
  // trivial uniformly random one.
  for (long long l = 0; l < nl; ++l) {
    std::vector<int> lam = digits(l, na, nx);
    std::vector<std::vector<Mat>> povms(nx, std::vector<Mat>(na, Mat::Zero(d, d)));
    for (int x = 0; x < nx; ++x) povms[x][lam[x]] = Mat::Identity(d, d);
    desc.generators.push_back(assemblage_choi(d, nx, na, povms));
  }
  std::vector<std::vector<Mat>> trivial(
      nx, std::vector<Mat>(na, Mat::Identity(d, d) / na));
  desc.slater_choi = assemblage_choi(d, nx, na, trivial);
  desc.generators.push_back(*desc.slater_choi);
  desc.ambient_affine_dim = nx * (na - 1) * d * d;
  return desc;
}

FreeSetDescriptor povm_channels(int d, int nx, int na) {
  FreeSetDescriptor desc;
  desc.name = "povm-channels(d=" + std::to_string(d) + ",x=" +
              std::to_string(nx) + ",a=" + std::to_string(na) + ")";
  desc.d_in = nx * d;
  desc.d_out = na;
  const int dj = desc.d_in * desc.d_out;
  const int sg = svec_dim(d);

  MembershipForm f;
  f.dim = dj;
  f.L = RMat::Zero(svec_dim(dj), nx * na * sg);
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < na; ++a) {
      RVec unit = RVec::Zero(sg);
      for (int k = 0; k < sg; ++k) {
        unit(k) = 1;
        Mat n = svec_to_herm(unit, d);
        unit(k) = 0;
        std::vector<std::vector<Mat>> povms(nx, std::vector<Mat>(na, Mat::Zero(d, d)));
        povms[x][a] = n;
        f.L.col((x * na + a) * sg + k) = herm_to_svec(assemblage_choi(d, nx, na, povms));
      }
    }
  f.l0 = RVec::Zero(svec_dim(dj));
  f.E = RMat::Zero(nx * sg, nx * na * sg);
  for (int x = 0; x < nx; ++x)
    for (int a = 0; a < na; ++a)
      f.E.block(x * sg, (x * na + a) * sg, sg, sg) = RMat::Identity(sg, sg);
  f.e = RVec::Zero(nx * sg);
  for (int x = 0; x < nx; ++x)
    f.e.segment(x * sg, sg) = herm_to_svec(Mat::Identity(d, d));
  f.ucone.psd.assign(nx * na, d);
  f.slater = true;
  desc.membership = std::move(f);

  std::vector<std::vector<Mat>> trivial(
      nx, std::vector<Mat>(na, Mat::Identity(d, d) / na));
  desc.slater_choi = assemblage_choi(d, nx, na, trivial);
  desc.ambient_affine_dim = nx * (na - 1) * d * d;
  return desc;
}

FreeSetDescriptor generic_polytope(std::string name, int d_in, int d_out,
                                   std::vector<Mat> vertices) {
  if (vertices.empty())
    throw std::invalid_argument("generic_polytope: empty vertex list for " + name);
  for (size_t i = 0; i < vertices.size(); ++i) {
    Channel ch{d_in, d_out, vertices[i]};
    if (!ch.is_valid(1e-8))
      throw std::invalid_argument("generic_polytope: vertex " + std::to_string(i) +
                                  " of " + name + " is not a valid Choi matrix");
  }
  FreeSetDescriptor desc;
  desc.name = std::move(name);
  desc.d_in = d_in;
  desc.d_out = d_out;
  desc.is_polytope = true;
  desc.support = SupportKind::vertices;
  desc.generators = std::move(vertices);
  desc.membership = polytope_membership(desc.generators);
  compute_affine_hull(desc);
  desc.dim_class = dim_classify(desc);
  return desc;
}

}  // namespace dynres
