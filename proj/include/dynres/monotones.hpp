#pragma once

// Resource monotones of channels, each as a conic program over Choi
// matrices: the robustness family (generalized, standard, and general
// two-set), the hypothesis-testing measure and its affine-hull variant,
// min-relative-entropy measures, the G fidelity measures, and
// fidelity-smoothed robustness. Box theories are recognized through their
// scenario tag and solved as linear programs over probability tables, with
// lazy deterministic-box cuts when the scenario is too large to enumerate.

#include "dynres/channel.hpp"
#include "dynres/conic.hpp"
#include "dynres/fidelity.hpp"
#include "dynres/freesets.hpp"

#include <optional>
#include <string>

namespace dynres {

enum class BoundDirection { exact, lower, upper };
const char* to_string(BoundDirection b);

// Witnesses recovered from a monotone program, in the pieces the
// superchannel constructions consume.
struct MonotoneOptimizers {
  Mat rho;     // optimal input marginal (d_in x d_in) when the program has one
  Mat effect;  // P* or W on ref (x) out, unpinched and clipped into [0, I]
  double lambda = 0;  // inner support level of the effect programs
  double r = 0;       // robustness mixing weight
  std::optional<Channel> mixing;       // robustness decomposition channel M
  std::optional<Channel> smoothed;     // E' from a smoothed program
  std::optional<Channel> free_member;  // (J + r J_M)/(1 + r), a member of O
};

struct MonotoneResult {
  double value = 0;  // +infinity when the program certifies divergence
  SolveStatus status = SolveStatus::inaccurate;
  BoundDirection bound_direction = BoundDirection::exact;
  MonotoneOptimizers opt;
  RVec dual_certificate;  // cone duals of the defining program
  std::string notes;
  bool finite() const { return std::isfinite(value); }
};

// min{1 + r : (J_ch + r J_M)/(1 + r) in O, M in O_mix} with O = within.
// O_mix = the theory's allowed set gives the generalized robustness, and
// O_mix = O the standard one, which genuinely diverges (+infinity) in
// reduced-dimensional theories.
MonotoneResult robustness(const Channel& ch, const FreeSetDescriptor& within,
                          const FreeSetDescriptor& mixing);

// Hypothesis-testing measure at error eps; the affine flag replaces the
// support bound by equality on the affine hull of the free set.
MonotoneResult hypothesis_testing(const Channel& ch,
                                  const FreeSetDescriptor& desc, double eps,
                                  bool affine = false);

// Min-relative-entropy measure. The plain variant is the eps = 0
// hypothesis-testing program. The affine variant pins the effect to the
// support projector of the output itself, which admits a closed form for
// pure-output channels and can legitimately vanish.
MonotoneResult min_relative_entropy(const Channel& ch,
                                    const FreeSetDescriptor& desc,
                                    bool affine = false);

// Fidelity measure at scale m >= 1: maximize <id (x) ch(psi), W> over input
// states and effects 0 <= W <= I with <id (x) M(psi), W> <= 1/m over the
// free set. The affine flag turns the bound into equality on the affine
// hull (any m > 0); an infeasible equality yields value 0.
MonotoneResult g_measure(const Channel& ch, const FreeSetDescriptor& desc,
                         double m, bool affine = false);

enum class SmoothKind { rmax, rs };
enum class SmoothMetric { worst_case, choi };

// Smoothed robustness: minimize over channels E' in the allowed set with
// F(E', ch) >= 1 - eps. The worst-case metric runs a cutting-plane loop
// over input states; the Choi metric is a single program; box theories get
// exact per-setting fidelity constraints in one program.
MonotoneResult smooth(SmoothKind kind, const Channel& ch,
                      const FreeSetDescriptor& within,
                      const FreeSetDescriptor& allowed, double eps,
                      SmoothMetric metric = SmoothMetric::worst_case);

}  // namespace dynres
