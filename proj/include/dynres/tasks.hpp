#pragma once

// Operational rate tasks on top of the monotone layer. A target set is a
// discrete family of benchmark channels (identities, maximally entangled
// preparations, or an explicit list) with their monotone values; one-shot
// distillation floors a smoothed monotone into that family and dilution
// ceils it, each attaching the superchannel that achieves the rounded
// value. Capacity suites bundle the two directions for a communication
// code class, entanglement rates do the same for bipartite channels
// against PPT-style free sets, and the fidelity-bound task sandwiches the
// best achievable conversion fidelity between two G-measure evaluations.

#include "dynres/channel.hpp"
#include "dynres/freesets.hpp"
#include "dynres/monotones.hpp"
#include "dynres/superchannels.hpp"

#include <optional>
#include <string>
#include <vector>

namespace dynres {

// One benchmark channel together with the free set at its signature and
// its monotone value inside that set (support measure; affine flavor when
// the family is affine).
struct Target {
  std::string label;
  Channel channel;
  FreeSetDescriptor desc;
  double value = 0;
};

// A strictly increasing family of targets. The flags record properties the
// rounding calculus relies on; factories verify them numerically on the
// first members at construction and leave them false when the check
// fails, in which case the rate operations degrade to labeled bounds.
struct TargetSet {
  std::string family;
  std::vector<Target> targets;     // values strictly increasing
  double log_scale = 1.0;          // rate = log_scale * log2(value)
  bool affine = false;             // flavor the values were computed in
  bool pure_output = false;        // every member has rank-one Choi
  bool rmin_equals_rs = false;     // support measure == standard robustness
  bool rmin_aff_equals_rmax = false;  // affine support == generalized rob.
  std::string verification_notes;
};

// Largest / smallest target by value at or below / at or above x. Both
// throw std::invalid_argument when no member qualifies.
const Target& floor_T(const TargetSet& ts, double x);
const Target& ceil_T(const TargetSet& ts, double x);

enum class CodeClass { ns, ppt, sep_relax };
const char* to_string(CodeClass cls);

// Identity channels id_1 .. id_{d_max} against the code class's free set
// (replacement channels for ns, PPT channels for ppt, the level-1 separable
// relaxation for sep_relax). The ns family stores values on the d^2 scale
// and reports rates as (1/2) log2, matching two-dimensions-per-qubit
// counting; the others store d directly.
TargetSet identity_targets(CodeClass cls, int d_max, bool verify_flags = true);

// Preparations of maximally entangled states phi_1 .. phi_{d_max} against
// PPT (or relaxed-separable) preparations. For the ppt class the stored
// channel-level values are cross-checked against independent state-level
// programs and the agreement is recorded in the notes.
TargetSet preparation_targets(CodeClass cls, int d_max,
                              bool verify_flags = true);

// Wrap caller-supplied targets: computes each member's value (support
// measure, affine flavor per the flag), sorts by value, and verifies the
// flags numerically on the first three members.
TargetSet explicit_targets(std::string family, std::vector<Target> targets,
                           bool affine = false, bool verify_flags = true);

struct RateResult {
  double value = 0;  // log2 scale, after the family's log_scale factor
  std::string target_label;
  double target_value = 0;    // monotone value of the achieving target
  double monotone_value = 0;  // smoothed monotone of the resource
  BoundDirection bound_direction = BoundDirection::exact;
  bool exact = false;  // the family's flags held, so floor/ceil is the rate
  std::optional<Transformation> achieving;
  std::string notes;
};

// One-shot distillation: floor the (affine when the family is affine)
// hypothesis-testing measure of e at error eps into the target family and
// attach the transformation that reaches the floored target with fidelity
// at least 1 - eps. Throws when even the smallest target is out of reach.
RateResult distillable_resource(const Channel& e, const FreeSetDescriptor& desc,
                                const TargetSet& targets, double eps,
                                bool attach_superchannel = true);

// One-shot dilution: ceil the smoothed robustness (standard, or generalized
// when the family is affine) into the family and attach the transformation
// from the ceiled target back onto a channel eps-close to e. Throws when
// the cost exceeds every target.
RateResult resource_cost(const Channel& e, const FreeSetDescriptor& desc,
                         const TargetSet& targets, double eps,
                         bool attach_superchannel = true,
                         const FreeSetDescriptor* allowed = nullptr);

struct CapacitySuite {
  RateResult quantum_capacity;  // distillation toward identities
  RateResult simulation_cost;   // dilution from identities
};

// Both rate directions for e under a code class at error eps. Builds the
// identity target family on the fly unless one is supplied.
CapacitySuite capacity_suite(const Channel& e, CodeClass cls, double eps,
                             const TargetSet* targets = nullptr,
                             bool attach_superchannels = true);

// How a channel's wires split into the two parties: input dimension
// da_in * db_in, output da_out * db_out, ordered [A_in, B_in, A_out, B_out].
struct BipartiteSplit {
  int da_in = 1, db_in = 1, da_out = 1, db_out = 1;
};

struct EntanglementRates {
  RateResult distillable;  // toward maximally entangled preparations
  RateResult cost;         // from maximally entangled preparations
};

// Entanglement rates of a bipartite channel against PPT channels on the
// given split (cls ppt), or against the level-1 separable relaxation
// (cls sep_relax, where results are labeled with the relaxation
// direction). The overload without a split requires a preparation-shaped
// channel (trivial input, square output) and infers the cut.
EntanglementRates channel_entanglement_rates(const Channel& e,
                                             const BipartiteSplit& split,
                                             CodeClass cls, double eps,
                                             const TargetSet* targets = nullptr,
                                             bool attach_superchannels = true);
EntanglementRates channel_entanglement_rates(const Channel& e, CodeClass cls,
                                             double eps);

// State-level entanglement measures of a bipartite state against PPT
// states, as direct semidefinite programs independent of the channel-level
// descriptor machinery. Used to confirm that preparation channels inherit
// their state's measures.
double state_rmax_ppt(const Mat& rho, int da, int db);
double state_rs_ppt(const Mat& rho, int da, int db);
double state_rmin_ppt(const Mat& rho, int da, int db);

// Density matrix of sum_i |ii> / sqrt(d) on a d x d bipartite space.
Mat maximally_entangled_state(int d);

// Two-sided bounds on the best worst-case fidelity any free transformation
// can reach from e toward a pure-output target, plus the fidelity a
// concrete construction achieves. The lower bound evaluates the G measure
// at the target's robustness (standard on the standard route, generalized
// on the affine route), the upper bound at its support measure; the
// construction reuses the G optimizers of the lower bound.
struct FidelityBounds {
  double upper = 0;
  double lower = 0;
  double achieved = 0;
  bool pinched = false;  // upper and lower agree within tolerance
  Superchannel theta;
  FreenessReport freeness_check;
  std::string notes;
};

FidelityBounds distillation_fidelity_bounds(const Channel& e,
                                            const Channel& target,
                                            const FreeSetDescriptor& in_o,
                                            const FreeSetDescriptor& out_o,
                                            TransformRoute route,
                                            const FreeSetDescriptor* allowed =
                                                nullptr);

struct SweepRow {
  double eps = 0;
  double quantum_capacity = 0;
  double simulation_cost = 0;
  BoundDirection q_direction = BoundDirection::exact;
  BoundDirection c_direction = BoundDirection::exact;
};

// Capacity suite across an error grid, reusing one target family and
// skipping superchannel attachment.
std::vector<SweepRow> capacity_sweep(const Channel& e, CodeClass cls,
                                     const std::vector<double>& eps_grid);

}  // namespace dynres
