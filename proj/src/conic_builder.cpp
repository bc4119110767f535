#include "dynres/conic.hpp"

#include <cmath>

namespace dynres {

namespace {

RVec pad(const RVec& v, int n) {
  RVec out = RVec::Zero(n);
  out.head(v.size()) = v;
  return out;
}

RMat pad_cols(const RMat& m, int n) {
  RMat out = RMat::Zero(m.rows(), n);
  out.leftCols(m.cols()) = m;
  return out;
}

int ncols(const AffExpr& e) { return static_cast<int>(e.c.size()); }

}  // namespace

AffExpr operator+(const AffExpr& a, const AffExpr& b) {
  AffExpr r;
  const int n = std::max(ncols(a), ncols(b));
  r.c = pad(a.c, n) + pad(b.c, n);
  r.k = a.k + b.k;
  return r;
}

AffExpr operator-(const AffExpr& a, const AffExpr& b) { return a + (-b); }

AffExpr operator-(const AffExpr& a) {
  AffExpr r;
  r.c = -a.c;
  r.k = -a.k;
  return r;
}

AffExpr operator*(double t, const AffExpr& a) {
  AffExpr r;
  r.c = t * a.c;
  r.k = t * a.k;
  return r;
}

MatExpr operator+(const MatExpr& a, const MatExpr& b) {
  if (a.dim != b.dim)
    throw std::invalid_argument("MatExpr: dimension mismatch");
  MatExpr r;
  r.dim = a.dim;
  const int n = std::max<int>(a.gexpr.cols(), b.gexpr.cols());
  r.gexpr = pad_cols(a.gexpr, n) + pad_cols(b.gexpr, n);
  r.g0 = a.g0 + b.g0;
  return r;
}

MatExpr operator-(const MatExpr& a, const MatExpr& b) {
  return a + (-1.0 * b);
}

MatExpr operator*(double t, const MatExpr& a) {
  MatExpr r;
  r.dim = a.dim;
  r.gexpr = t * a.gexpr;
  r.g0 = t * a.g0;
  return r;
}

MatVar ConicProgram::add_herm(int dim, std::string name) {
  MatVar v{nvars_, dim};
  nvars_ += svec_dim(dim);
  var_names_.emplace_back(std::move(name), v.offset);
  return v;
}

ScalarVar ConicProgram::add_scalar(std::string name) {
  ScalarVar v{nvars_};
  nvars_ += 1;
  var_names_.emplace_back(std::move(name), v.offset);
  return v;
}

AffExpr ConicProgram::expr(ScalarVar v) const {
  AffExpr e;
  e.c = RVec::Zero(v.offset + 1);
  e.c(v.offset) = 1.0;
  return e;
}

MatExpr ConicProgram::expr(MatVar v) const {
  MatExpr m;
  m.dim = v.dim;
  const int sd = svec_dim(v.dim);
  m.gexpr = RMat::Zero(sd, v.offset + sd);
  m.gexpr.rightCols(sd).setIdentity();
  m.g0 = RVec::Zero(sd);
  return m;
}

MatExpr ConicProgram::constant(const Mat& m) {
  MatExpr r;
  r.dim = static_cast<int>(m.rows());
  r.gexpr = RMat::Zero(svec_dim(r.dim), 0);
  r.g0 = herm_to_svec(m);
  return r;
}

AffExpr ConicProgram::inner(const Mat& c, const MatExpr& m) {
  const RVec sc = herm_to_svec(c);
  AffExpr e;
  e.c = m.gexpr.transpose() * sc;
  e.k = sc.dot(m.g0);
  return e;
}

AffExpr ConicProgram::trace(const MatExpr& m) {
  return inner(Mat::Identity(m.dim, m.dim), m);
}

MatExpr ConicProgram::map_linear(const MatExpr& m, int out_dim,
                                 const std::function<Mat(const Mat&)>& f) {
  MatExpr r;
  r.dim = out_dim;
  const int sd = svec_dim(out_dim);
  r.gexpr = RMat::Zero(sd, m.gexpr.cols());
  for (int j = 0; j < m.gexpr.cols(); ++j) {
    if (m.gexpr.col(j).isZero(0)) continue;
    r.gexpr.col(j) = herm_to_svec(f(svec_to_herm(m.gexpr.col(j), m.dim)));
  }
  r.g0 = herm_to_svec(f(svec_to_herm(m.g0, m.dim)));
  return r;
}

MatExpr ConicProgram::from_svec(int dim, const std::vector<AffExpr>& coords) {
  if (static_cast<int>(coords.size()) != svec_dim(dim))
    throw std::invalid_argument("from_svec: coordinate count mismatch");
  int n = 0;
  for (const AffExpr& e : coords) n = std::max(n, ncols(e));
  MatExpr r;
  r.dim = dim;
  r.gexpr = RMat::Zero(svec_dim(dim), n);
  r.g0 = RVec::Zero(svec_dim(dim));
  for (int i = 0; i < svec_dim(dim); ++i) {
    r.gexpr.row(i) = pad(coords[i].c, n).transpose();
    r.g0(i) = coords[i].k;
  }
  return r;
}

std::pair<AffExpr, AffExpr> ConicProgram::entry(const MatExpr& m, int i,
                                                int j) {
  // svec layout: d diagonal entries, then (sqrt2 Re, sqrt2 Im) for each
  // upper-triangle pair in row-major order.
  const int d = m.dim;
  auto coord = [&](int idx, double scale) {
    AffExpr e;
    e.c = scale * m.gexpr.row(idx).transpose();
    e.k = scale * m.g0(idx);
    return e;
  };
  if (i == j) return {coord(i, 1.0), AffExpr(0.0)};
  const bool lower = i > j;
  const int r = lower ? j : i, c = lower ? i : j;
  int idx = d;
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      if (a == r && b == c) {
        const double s = 1.0 / std::sqrt(2.0);
        AffExpr re = coord(idx, s);
        AffExpr im = coord(idx + 1, lower ? -s : s);
        return {re, im};
      }
      idx += 2;
    }
  throw std::logic_error("entry: index out of range");
}

MatExpr ConicProgram::block2x2(const MatExpr& a, const MatExpr& d,
                               const std::vector<std::vector<AffExpr>>& b_re,
                               const std::vector<std::vector<AffExpr>>& b_im) {
  const int da = a.dim, dd = d.dim, dim = da + dd;
  if (static_cast<int>(b_re.size()) != da || static_cast<int>(b_im.size()) != da)
    throw std::invalid_argument("block2x2: off-diagonal shape mismatch");
  std::vector<AffExpr> coords(svec_dim(dim));
  auto re_of = [&](int i, int j) -> AffExpr {
    // Entry (i, j) with i <= j of the assembled Hermitian matrix.
    if (i < da && j < da) return entry(a, i, j).first;
    if (i >= da && j >= da) return entry(d, i - da, j - da).first;
    return b_re[i][j - da];
  };
  auto im_of = [&](int i, int j) -> AffExpr {
    if (i < da && j < da) return entry(a, i, j).second;
    if (i >= da && j >= da) return entry(d, i - da, j - da).second;
    return b_im[i][j - da];
  };
  int idx = 0;
  for (int i = 0; i < dim; ++i) coords[idx++] = re_of(i, i);
  const double s = std::sqrt(2.0);
  for (int i = 0; i < dim; ++i)
    for (int j = i + 1; j < dim; ++j) {
      coords[idx++] = s * re_of(i, j);
      coords[idx++] = s * im_of(i, j);
    }
  return from_svec(dim, coords);
}

ConstraintId ConicProgram::add_eq(const AffExpr& e) {
  eqs_.push_back(e);
  return {0, static_cast<int>(eqs_.size()) - 1};
}

ConstraintId ConicProgram::add_ineq(const AffExpr& e) {
  ineqs_.push_back(e);
  return {1, static_cast<int>(ineqs_.size()) - 1};
}

ConstraintId ConicProgram::add_psd(const MatExpr& m) {
  psds_.push_back(m);
  return {2, static_cast<int>(psds_.size()) - 1};
}

void ConicProgram::minimize(const AffExpr& obj) {
  objective_ = obj;
  obj_sign_ = 1.0;
  has_objective_ = true;
}

void ConicProgram::maximize(const AffExpr& obj) {
  objective_ = obj;
  obj_sign_ = -1.0;
  has_objective_ = true;
}

StandardForm ConicProgram::build() const {
  if (!has_objective_)
    throw std::logic_error("ConicProgram: no objective set");
  StandardForm sf;
  const int n = nvars_;
  sf.c = obj_sign_ * pad(objective_.c, n);
  const int p = static_cast<int>(eqs_.size());
  sf.A = RMat::Zero(p, n);
  sf.b = RVec::Zero(p);
  for (int i = 0; i < p; ++i) {
    sf.A.row(i) = pad(eqs_[i].c, n).transpose();
    sf.b(i) = -eqs_[i].k;
  }
  int m = static_cast<int>(ineqs_.size());
  sf.cone.nonneg = m;
  for (const MatExpr& e : psds_) {
    sf.cone.psd.push_back(e.dim);
    m += svec_dim(e.dim);
  }
  sf.G = RMat::Zero(m, n);
  sf.h = RVec::Zero(m);
  // expr >= 0 becomes slack s = expr: G row -c, h = k.
  for (size_t i = 0; i < ineqs_.size(); ++i) {
    sf.G.row(i) = -pad(ineqs_[i].c, n).transpose();
    sf.h(i) = ineqs_[i].k;
  }
  int off = static_cast<int>(ineqs_.size());
  for (const MatExpr& e : psds_) {
    const int sd = svec_dim(e.dim);
    sf.G.block(off, 0, sd, n) = -pad_cols(e.gexpr, n);
    sf.h.segment(off, sd) = e.g0;
    off += sd;
  }
  return sf;
}

Solution ConicProgram::solve(const IpmOptions& opts) const {
  StandardForm sf = build();
  IpmResult r = solve_standard(sf, opts);
  Solution sol;
  sol.status = r.status;
  sol.x = r.x.size() == nvars_ ? r.x : RVec::Zero(nvars_);
  sol.cone_dual = r.z;
  sol.eq_dual = r.y;
  sol.gap = r.gap;
  sol.pres = r.pres;
  sol.dres = r.dres;
  sol.iters = r.iters;
  if (r.status == SolveStatus::optimal ||
      r.status == SolveStatus::inaccurate)
    sol.objective = value(sol, objective_);
  else
    sol.objective = std::numeric_limits<double>::quiet_NaN();
  return sol;
}

double ConicProgram::value(const Solution& s, const AffExpr& e) const {
  return pad(e.c, nvars_).dot(s.x) + e.k;
}

double ConicProgram::value(const Solution& s, ScalarVar v) const {
  return s.x(v.offset);
}

Mat ConicProgram::value(const Solution& s, MatVar v) const {
  return svec_to_herm(s.x.segment(v.offset, svec_dim(v.dim)), v.dim);
}

Mat ConicProgram::value(const Solution& s, const MatExpr& m) const {
  RVec coords = pad_cols(m.gexpr, nvars_) * s.x + m.g0;
  return svec_to_herm(coords, m.dim);
}

double ConicProgram::dual(const Solution& s, ConstraintId id) const {
  if (id.kind == 0) return s.eq_dual(id.index);
  if (id.kind == 1) return s.cone_dual(id.index);
  throw std::invalid_argument("dual: not a scalar constraint");
}

Mat ConicProgram::dual_matrix(const Solution& s, ConstraintId id) const {
  if (id.kind != 2)
    throw std::invalid_argument("dual_matrix: not a PSD constraint");
  int off = static_cast<int>(ineqs_.size());
  for (int i = 0; i < id.index; ++i) off += svec_dim(psds_[i].dim);
  const int d = psds_[id.index].dim;
  return svec_to_herm(s.cone_dual.segment(off, svec_dim(d)), d);
}

void emit_membership(ConicProgram& prog, const MembershipForm& form,
                     const MatExpr& J, const AffExpr& t) {
  const int nu = form.ucone.total();
  // Fresh auxiliary block u, laid out free / nonneg / psd.
  std::vector<ScalarVar> u(nu);
  for (int i = 0; i < nu; ++i) u[i] = prog.add_scalar();
  auto ucol = [&](int i) { return prog.expr(u[i]); };

  // Coupling rows svec(J) = L u + t l0 and E u = t e.
  const int sd = svec_dim(form.dim);
  for (int r = 0; r < sd; ++r) {
    AffExpr row = form.l0(r) * t;
    for (int i = 0; i < nu; ++i)
      if (form.L(r, i) != 0.0) row = row + form.L(r, i) * ucol(i);
    // subtract svec(J)_r
    AffExpr jr;
    jr.c = J.gexpr.row(r).transpose();
    jr.k = J.g0(r);
    prog.add_eq(row - jr);
  }
  for (int r = 0; r < form.E.rows(); ++r) {
    AffExpr row = (-form.e(r)) * t;
    for (int i = 0; i < nu; ++i)
      if (form.E(r, i) != 0.0) row = row + form.E(r, i) * ucol(i);
    prog.add_eq(row);
  }

  // Cone membership of u.
  int off = form.ucone.nfree;
  for (int i = 0; i < form.ucone.nonneg; ++i) prog.add_ineq(ucol(off + i));
  off += form.ucone.nonneg;
  for (int d : form.ucone.psd) {
    std::vector<AffExpr> coords(svec_dim(d));
    for (int i = 0; i < svec_dim(d); ++i) coords[i] = ucol(off + i);
    prog.add_psd(ConicProgram::from_svec(d, coords));
    off += svec_dim(d);
  }
}

void emit_support_dual(ConicProgram& prog, const MembershipForm& form,
                       const MatExpr& Q, const AffExpr& rhs) {
  if (!form.slater)
    throw std::logic_error(
        "emit_support_dual: descriptor lacks a strictly feasible point; "
        "provide an explicit generating family instead");
  const int ny = static_cast<int>(form.E.rows());
  std::vector<ScalarVar> y(ny);
  for (int i = 0; i < ny; ++i) y[i] = prog.add_scalar();

  // sup over J in O of <Q, J> is bounded by e'y + l0'q whenever
  // E'y - L'q lies in the dual cone of K_u.
  AffExpr q_l0;
  q_l0.c = Q.gexpr.transpose() * form.l0;
  q_l0.k = form.l0.dot(Q.g0);
  AffExpr bound = q_l0;
  for (int i = 0; i < ny; ++i) bound = bound + form.e(i) * prog.expr(y[i]);
  prog.add_ineq(rhs - bound);

  auto dual_coord = [&](int i) {
    AffExpr e;
    for (int r = 0; r < ny; ++r)
      if (form.E(r, i) != 0.0) e = e + form.E(r, i) * prog.expr(y[r]);
    AffExpr lq;
    lq.c = Q.gexpr.transpose() * form.L.col(i);
    lq.k = form.L.col(i).dot(Q.g0);
    return e - lq;
  };
  int off = 0;
  for (int i = 0; i < form.ucone.nfree; ++i) prog.add_eq(dual_coord(off + i));
  off += form.ucone.nfree;
  for (int i = 0; i < form.ucone.nonneg; ++i)
    prog.add_ineq(dual_coord(off + i));
  off += form.ucone.nonneg;
  for (int d : form.ucone.psd) {
    std::vector<AffExpr> coords(svec_dim(d));
    for (int i = 0; i < svec_dim(d); ++i) coords[i] = dual_coord(off + i);
    prog.add_psd(ConicProgram::from_svec(d, coords));
    off += svec_dim(d);
  }
}

}  // namespace dynres
