#pragma once

// Descriptors for the free channel sets of a resource theory and for the
// larger sets of allowed channels. A descriptor bundles a conic membership
// form, an optional generating family, the affine hull of the set, and the
// hooks the monotone programs need: support-function upper bounds
// (sup over the set of <Q, J_M> <= lambda), affine-hull equalities
// (<Q, J_M> = lambda for every member), and scaled membership (J in t*O).

#include "dynres/channel.hpp"
#include "dynres/conic.hpp"

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace dynres {

enum class DimClass { full, reduced };
enum class Exactness { exact, outer_relaxation, inner_approximation };

const char* to_string(DimClass d);
const char* to_string(Exactness e);

// Bell-scenario shape for box theories: nx/ny input settings, na/nb
// outcomes. Probability tables q(ab|xy) are stored as real vectors indexed
// ((x*ny + y)*na + a)*nb + b, matching the diagonal of the box Choi matrix.
struct BoxScenario {
  int nx = 0, ny = 0, na = 0, nb = 0;
  int table_size() const { return nx * ny * na * nb; }
  int d_in() const { return nx * ny; }
  int d_out() const { return na * nb; }
};

int box_table_index(const BoxScenario& sc, int x, int y, int a, int b);

// Table of the deterministic box a = f(x), b = g(y).
RVec det_box_table(const BoxScenario& sc, const std::vector<int>& f,
                   const std::vector<int>& g);

// Equality rows of the no-signalling polytope over tables, scaled so that
// rows * q = t * rhs_scale describes t*O: normalization per setting first,
// then marginal-consistency rows (rhs 0).
struct BoxLinearForm {
  RMat rows;
  RVec rhs_scale;
};
BoxLinearForm ns_table_rows(const BoxScenario& sc);

// How the support function sup_{M in O} <Q, J_M> is emitted.
enum class SupportKind {
  vertices,      // one constraint per generator; exact for polytopes
  conic_dual,    // dual of the membership form (needs a Slater point)
  replacement,   // closed form through the output-sided partial trace
};

struct FreeSetDescriptor {
  std::string name;
  int d_in = 0;
  int d_out = 0;
  DimClass dim_class = DimClass::full;
  Exactness exactness = Exactness::exact;
  SupportKind support = SupportKind::conic_dual;

  // Conic description of {J_M : M in O}, scaled: J in t*O.
  MembershipForm membership;

  // Finite family of member Choi matrices. Vertices when is_polytope (then
  // O = conv(generators)); otherwise a spanning family of members used for
  // affine-hull extraction and freeness sampling.
  std::vector<Mat> generators;
  bool is_polytope = false;

  // Strictly feasible member, used by tests and sanity checks.
  std::optional<Mat> slater_choi;

  // Affine hull of {J_M}: anchor + orthonormal svec directions of
  // span{J_M - anchor}. Filled from generators (rank cutoff 1e-8) or
  // analytically by the builder.
  Mat affine_anchor;
  std::vector<RVec> affine_basis;

  // Optional separation oracle over the generating family: returns the
  // generator maximizing <Q, J_v>. Set for polytopes whose vertex count
  // makes eager emission impractical; the monotone programs then add
  // vertex cuts lazily. When present, `generators` holds only a seed set.
  std::function<Mat(const Mat& q)> best_generator;

  // Set for box theories. Large scenarios skip the dense svec membership
  // form and affine hull entirely; the monotone programs then work on
  // probability tables through ns_table_rows and det_box_table instead.
  std::optional<BoxScenario> box;

  // Real dimension of the affine hull of the theory's allowed set, the
  // yardstick dim_classify measures against. Builders fill it; negative
  // means "use the trace-preserving subspace of all channels".
  int ambient_affine_dim = -1;

  bool has_affine_hull() const { return affine_anchor.size() > 0; }
};

struct MembershipReport {
  bool member = false;
  // Separation value max_{|X| <= 1} <X, J_ch> - sup_O <X, J_M>; zero (up to
  // tolerance) for members.
  double violation = 0;
  Mat witness;   // separating functional when violation is positive
};

// ---------------------------------------------------------------------------
// Constraint emission
// ---------------------------------------------------------------------------

// sup_{M in O} <Q, J_M> <= bound.
void emit_support_ub(ConicProgram& prog, const FreeSetDescriptor& desc,
                     const MatExpr& Q, const AffExpr& bound);

// <Q, J_M> = value for every M in O (equivalently for every point of the
// affine hull). Throws when the descriptor carries no affine hull and no
// closed form.
void emit_affine_eq(ConicProgram& prog, const FreeSetDescriptor& desc,
                    const MatExpr& Q, const AffExpr& value);

// J in t*O. Uses the conic membership form, or convex-combination weights
// over the vertices for polytopes.
void emit_member_scaled(ConicProgram& prog, const FreeSetDescriptor& desc,
                        const MatExpr& J, const AffExpr& t);

// ---------------------------------------------------------------------------
// Queries
// ---------------------------------------------------------------------------

// Feasibility of the membership program for ch, with a separating witness on
// failure (found by maximizing <X, J_ch> - sup_O <X, J_M> over |X| <= 1).
MembershipReport membership_check(const FreeSetDescriptor& desc,
                                  const Channel& ch, double tol = 1e-7);

// Recomputes the dimension class from the stored affine hull: reduced when
// the hull has deficient dimension relative to the trace-preserving affine
// subspace of channels.
DimClass dim_classify(const FreeSetDescriptor& desc);

// A member of O obtained by maximizing a random linear functional over the
// membership form; near-extremal, useful for sampled freeness checks.
Mat sample_member(const FreeSetDescriptor& desc, Rng& rng);

// Fills affine_anchor/affine_basis from the generator family.
void compute_affine_hull(FreeSetDescriptor& desc, double rank_cutoff = 1e-8);

// ---------------------------------------------------------------------------
// Built-in descriptors
// ---------------------------------------------------------------------------

// Replacement channels {rho -> sigma}: Choi I_d (x) sigma. Reduced
// dimensional; support function in closed form.
FreeSetDescriptor replacement_channels(int d);

// All channels d_in -> d_out (the unrestricted allowed set).
FreeSetDescriptor cptp_channels(int d_in, int d_out);

// Channels whose Choi matrix stays PSD under partial transposition of the
// given factors. The Choi lives on in' (x) out, viewed as the four factors
// [A_in, B_in, A_out, B_out]; the transpose acts on B_in and B_out. The
// two-argument form is the point-to-point convention A -> B, transposing
// the whole output factor.
FreeSetDescriptor ppt_channels(int d_in, int d_out);
FreeSetDescriptor ppt_channels(int da_in, int db_in, int da_out, int db_out);

// Outer relaxation of separable channels: PPT plus `level` symmetric
// extensions of the B side. level 0 is plain PPT. Monotone values computed
// against it are one-sided; the descriptor records outer_relaxation.
FreeSetDescriptor sep_channels_relax(int d_in, int d_out, int level);
FreeSetDescriptor sep_channels_relax(int da_in, int db_in, int da_out,
                                     int db_out, int level);

// Local (LOSR-simulable) boxes of a Bell scenario: polytope generated by
// the deterministic boxes. Scenarios with more than `lazy_threshold`
// vertices get a separation oracle instead of an eager vertex list.
FreeSetDescriptor local_boxes(int nx, int ny, int na, int nb,
                              int lazy_threshold = 1024);

// No-signalling boxes of a Bell scenario (the allowed set of box theories).
FreeSetDescriptor ns_boxes(int nx, int ny, int na, int nb);

// Channels implementing jointly measurable POVM assemblages on C^d with
// `nx` settings of `na` outcomes each; membership through a parent POVM
// over the deterministic post-processings.
FreeSetDescriptor compatible_povms(int d, int nx, int na);

// Channels implementing arbitrary POVM assemblages (the allowed set of the
// measurement-incompatibility theory).
FreeSetDescriptor povm_channels(int d, int nx, int na);

// User-supplied polytope theory over explicit Choi vertices.
FreeSetDescriptor generic_polytope(std::string name, int d_in, int d_out,
                                   std::vector<Mat> vertices);

}  // namespace dynres
