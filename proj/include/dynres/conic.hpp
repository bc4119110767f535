#pragma once

// Conic-program modeling layer and the embedded primal-dual solver.
//
// Standard form handled by the solver:
//   minimize    c'x
//   subject to  A x = b
//               G x + s = h,  s in K
// where K is a product of a nonnegative orthant and complex-Hermitian PSD
// blocks stored in svec coordinates. Complex blocks are handled natively by
// the cone arithmetic; no realification is performed. Infeasibility and
// unboundedness are certified through a homogeneous self-dual embedding.
//
// The modeling layer (ConicProgram) offers named Hermitian matrix variables,
// scalar variables, PSD and scalar constraints, and dual retrieval per
// constraint. emit_membership / emit_support_dual translate a conic
// description of a channel set into program constraints.

#include "dynres/linalg.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace dynres {

// ---------------------------------------------------------------------------
// Solver core
// ---------------------------------------------------------------------------

struct ConeLayout {
  int nonneg = 0;            // leading nonnegative entries of s
  std::vector<int> psd;      // Hermitian PSD block dimensions, in order
  int total() const {
    int t = nonneg;
    for (int d : psd) t += svec_dim(d);
    return t;
  }
  int degree() const {
    int t = nonneg;
    for (int d : psd) t += d;
    return t;
  }
};

struct StandardForm {
  RVec c;
  RMat A;
  RVec b;
  RMat G;
  RVec h;
  ConeLayout cone;
};

enum class SolveStatus { optimal, infeasible, unbounded, inaccurate };

const char* to_string(SolveStatus s);

struct IpmOptions {
  double tol;        // feasibility and gap tolerance
  int max_iters = 100;
  bool verbose = false;
  IpmOptions();      // reads DYNRES_SOLVER_TOL, default 1e-8
};

struct IpmResult {
  SolveStatus status = SolveStatus::inaccurate;
  RVec x, s, z, y;   // primal/dual point, or certificate (see below)
  double pobj = 0, dobj = 0;
  double gap = 0;    // absolute duality gap at the returned point
  double pres = 0, dres = 0;
  int iters = 0;
  // status == infeasible: (y, z) certify A'y + G'z = 0, b'y + h'z = -1.
  // status == unbounded: (x, s) certify A x = 0, G x + s = 0, c'x = -1.
};

IpmResult solve_standard(const StandardForm& sf, const IpmOptions& opts = {});

// ---------------------------------------------------------------------------
// Modeling layer
// ---------------------------------------------------------------------------

struct MatVar {
  int offset = -1;
  int dim = 0;
};
struct ScalarVar {
  int offset = -1;
};

// Affine real scalar c'x + k. Coefficient vectors are padded on demand, so
// expressions built before later variable declarations stay valid.
struct AffExpr {
  RVec c;
  double k = 0;
  AffExpr() = default;
  AffExpr(double constant) : k(constant) {}
};

AffExpr operator+(const AffExpr& a, const AffExpr& b);
AffExpr operator-(const AffExpr& a, const AffExpr& b);
AffExpr operator-(const AffExpr& a);
AffExpr operator*(double t, const AffExpr& a);

// Affine Hermitian-matrix expression in svec coordinates:
// svec(M(x)) = gexpr * x + g0.
struct MatExpr {
  int dim = 0;
  RMat gexpr;
  RVec g0;
};

MatExpr operator+(const MatExpr& a, const MatExpr& b);
MatExpr operator-(const MatExpr& a, const MatExpr& b);
MatExpr operator*(double t, const MatExpr& a);

struct ConstraintId {
  int kind = -1;   // 0 eq, 1 ineq, 2 psd
  int index = -1;
};

struct Solution {
  SolveStatus status = SolveStatus::inaccurate;
  double objective = 0;        // in the requested sense
  RVec x;
  RVec cone_dual;              // z of the internal minimization form
  RVec eq_dual;                // y of the internal minimization form
  double gap = 0, pres = 0, dres = 0;
  int iters = 0;
  bool ok() const { return status == SolveStatus::optimal; }
};

class ConicProgram {
 public:
  explicit ConicProgram(std::string name = "") : name_(std::move(name)) {}

  MatVar add_herm(int dim, std::string name = "");
  ScalarVar add_scalar(std::string name = "");

  AffExpr expr(ScalarVar v) const;
  MatExpr expr(MatVar v) const;
  static MatExpr constant(const Mat& m);

  // <C, M(x)> as an affine scalar, C Hermitian.
  static AffExpr inner(const Mat& c, const MatExpr& m);
  static AffExpr trace(const MatExpr& m);
  // Image of an expression under a Hermitian-preserving linear map, given as
  // a callable on matrices (conjugation, partial trace, partial transpose,
  // kron with a constant factor, and so on).
  static MatExpr map_linear(const MatExpr& m, int out_dim,
                            const std::function<Mat(const Mat&)>& f);
  // Assemble a matrix expression from its svec coordinate expressions.
  static MatExpr from_svec(int dim, const std::vector<AffExpr>& coords);
  // Real and imaginary part of entry (i, j) as affine scalars.
  static std::pair<AffExpr, AffExpr> entry(const MatExpr& m, int i, int j);
  // Block matrix [[A, B],[B^dag, D]] of compatible expressions; B is given
  // as a general (not necessarily Hermitian) complex matrix of affine
  // entries encoded by a pair (real part expr, imag part expr) per entry.
  static MatExpr block2x2(const MatExpr& a, const MatExpr& d,
                          const std::vector<std::vector<AffExpr>>& b_re,
                          const std::vector<std::vector<AffExpr>>& b_im);

  ConstraintId add_eq(const AffExpr& e);     // e == 0
  ConstraintId add_ineq(const AffExpr& e);   // e >= 0
  ConstraintId add_psd(const MatExpr& m);    // M(x) >= 0

  void minimize(const AffExpr& obj);
  void maximize(const AffExpr& obj);

  Solution solve(const IpmOptions& opts = {}) const;

  int num_vars() const { return nvars_; }

  // Accessors for a returned solution.
  double value(const Solution& s, const AffExpr& e) const;
  double value(const Solution& s, ScalarVar v) const;
  Mat value(const Solution& s, MatVar v) const;
  Mat value(const Solution& s, const MatExpr& m) const;
  double dual(const Solution& s, ConstraintId id) const;   // eq or ineq
  Mat dual_matrix(const Solution& s, ConstraintId id) const;  // psd

 private:
  friend void emit_membership(ConicProgram&, const struct MembershipForm&,
                              const MatExpr&, const AffExpr&);
  std::string name_;
  int nvars_ = 0;
  std::vector<std::pair<std::string, int>> var_names_;
  std::vector<AffExpr> eqs_;
  std::vector<AffExpr> ineqs_;
  std::vector<MatExpr> psds_;
  AffExpr objective_;
  double obj_sign_ = 1.0;    // +1 minimize, -1 maximize
  bool has_objective_ = false;

  StandardForm build() const;
};

// ---------------------------------------------------------------------------
// Membership normal form for a closed convex set of Hermitian matrices
// ---------------------------------------------------------------------------

// Cone of the auxiliary variable u: free entries first, then nonnegative
// entries, then Hermitian PSD blocks in svec coordinates.
struct UCone {
  int nfree = 0;
  int nonneg = 0;
  std::vector<int> psd;
  int total() const {
    int t = nfree + nonneg;
    for (int d : psd) t += svec_dim(d);
    return t;
  }
};

// J in t*O  <=>  exists u: svec(J) = L u + t l0, E u = t e, u in K_u.
// For t = 1 this is plain membership. slater records that a strictly
// feasible u exists, which is what licenses the support-function dual.
struct MembershipForm {
  int dim = 0;
  RMat L;
  RVec l0;
  RMat E;
  RVec e;
  UCone ucone;
  bool slater = false;
};

// Adds constraints forcing J(x) in t(x) * O. Fresh auxiliary variables are
// created inside prog.
void emit_membership(ConicProgram& prog, const MembershipForm& form,
                     const MatExpr& J, const AffExpr& t);

// Adds constraints equivalent to sup_{J in O} <Q(x), J> <= rhs(x) via the
// conic dual of the support function. Requires form.slater; otherwise
// throws, demanding an explicit generating family.
void emit_support_dual(ConicProgram& prog, const MembershipForm& form,
                       const MatExpr& Q, const AffExpr& rhs);

}  // namespace dynres
