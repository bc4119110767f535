#pragma once

// Free superchannels and one-shot channel transformations.
//
// A superchannel maps channels to channels. Two representations are kept:
//
//   general         Theta(L) = post o (L (x) id_mem) o pre, stored as the
//                   pre and post channels plus the memory dimension.
//   measure_prepare Theta(L) = p(L) * branch_main + (1 - p(L)) * branch_else
//                   with p(L) = <effect, id (x) L(psi)> for a fixed bipartite
//                   input state psi and a fixed two-outcome effect. The input
//                   state is stored through its reference-side marginal
//                   input_rho; psi is the canonical purification of that
//                   marginal, so id (x) L(psi) is the Choi matrix of L
//                   pinched by sqrt(input_rho) on the reference factor.
//
// construct_transformation builds the measure-prepare superchannel that sends
// a resource channel E to (an approximation of) a target channel N whenever
// the hypothesis-testing monotone of E dominates the smoothed robustness of
// the target. The effect and input state come from the hypothesis-testing
// optimizer of E, the branches from the smoothed robustness decomposition of
// N. On the standard route the branch weights stay convex for every free
// input because p(M) <= lambda* <= 1/R; on the affine route p(M) is constant
// on the affine hull of the free set, the else-branch is padded so that every
// free channel maps to exactly the same free channel.

#include <optional>
#include <string>
#include <vector>

#include "dynres/channel.hpp"
#include "dynres/freesets.hpp"
#include "dynres/monotones.hpp"

namespace dynres {

enum class SuperchannelForm { general, measure_prepare };

struct Superchannel {
  SuperchannelForm form = SuperchannelForm::general;

  // Signature: accepts channels d_in_in -> d_in_out, emits d_out_in -> d_out_out.
  int d_in_in = 0;
  int d_in_out = 0;
  int d_out_in = 0;
  int d_out_out = 0;

  // measure_prepare data. effect acts on (reference (x) output) of the probed
  // channel, with reference dimension d_in_in.
  Mat input_rho;
  Mat effect;
  std::optional<Channel> branch_main;
  std::optional<Channel> branch_else;

  // general-form data. pre: d_out_in -> d_in_in * mem_dim with the memory as
  // the second tensor factor; post: d_in_out * mem_dim -> d_out_out.
  std::optional<Channel> pre;
  std::optional<Channel> post;
  int mem_dim = 1;
};

// Validates the stored data: measure_prepare needs 0 <= effect <= I (within
// tol), a unit-trace PSD input_rho and valid branch channels of the output
// signature; general needs valid pre and post channels with matching wire
// dimensions, and the composition is spot-checked to keep sample channels
// completely positive and trace preserving.
bool superchannel_is_valid(const Superchannel& theta, double tol = 1e-9);

// Theta(L). Throws std::invalid_argument when L does not match the input
// signature. The output Choi matrix is validated before being returned.
Channel apply_superchannel(const Superchannel& theta, const Channel& ch);

// The do-nothing superchannel on channels d_in -> d_out.
Superchannel identity_superchannel(int d_in, int d_out);

// Freeness audit: pushes every generator of in_o (plus n_samples random
// members) through theta and membership-checks the outputs against out_o.
// For polytope input theories the generator check is exact; otherwise the
// verdict is certified only up to the sampled inputs, and `regime` says so.
struct FreenessReport {
  bool pass = true;
  double worst_violation = 0.0;
  // Index into in_o.generators for the worst failure, -1 when the failure
  // came from a sampled input (or when there is no failure).
  int generator_index = -1;
  Mat violating_input;   // Choi matrix of the worst offending free input
  Mat witness;           // separating witness at the output, when available
  std::string regime;    // "generators (exact)" or "generators + sampling"
};

FreenessReport verify_freeness(const Superchannel& theta,
                               const FreeSetDescriptor& in_o,
                               const FreeSetDescriptor& out_o,
                               int n_samples = 8, double tol = 1e-6,
                               unsigned seed = 8151623);

// Outcome of a one-shot transformation construction.
struct LedgerEntry {
  std::string name;
  double value = 0.0;
};

struct TransformationCertificate {
  double fidelity_achieved = 0.0;   // worst-case channel fidelity of Theta(E) vs N
  double fidelity_guarantee = 0.0;  // a-priori lower bound from the construction
  FreenessReport freeness_check;
  std::vector<LedgerEntry> monotone_ledger;  // the monotone values the construction used
  std::string notes;
};

struct Transformation {
  Superchannel theta;
  TransformationCertificate certificate;
};

enum class TransformRoute { standard, affine };

// Builds the free superchannel sending E (free set in_o) toward N (free set
// out_o), first smoothing the target to tolerance eps and running the
// hypothesis-testing program on E at error delta. Preconditions:
//   standard  R_H^delta(E | in_o)      >= R_s^eps(N | out_o)   and eps + 2*delta < 1
//   affine    R_H^delta(E | aff(in_o)) >= R_max^eps(N | out_o) and eps + 2*delta < 1
// The guarantee is 1 - eps - 2*delta. `allowed` is the set of all channels of
// the target theory (used as the smoothing neighbourhood and, on the affine
// route, as the robustness mixing set); when omitted it defaults to the
// no-signalling boxes of the same scenario for box theories and to all CPTP
// maps otherwise. Throws std::invalid_argument when a precondition fails
// (the message reports both monotone values) and std::runtime_error when a
// subproblem solve comes back inaccurate.
Transformation construct_transformation(
    const Channel& resource, const Channel& target,
    const FreeSetDescriptor& in_o, const FreeSetDescriptor& out_o,
    double eps, double delta, TransformRoute route = TransformRoute::standard,
    const FreeSetDescriptor* allowed = nullptr);

// Variant for pure-output targets (isometries): the roles of eps and delta
// swap, the precondition becomes R_H^eps(E) >= R_s^delta(N) (affine analogue
// with R_max), and the guarantee sharpens to 1 - eps - delta. Throws
// std::invalid_argument when the target is not pure-output, pointing at
// construct_transformation instead.
Transformation construct_pure_target_transformation(
    const Channel& resource, const Channel& target,
    const FreeSetDescriptor& in_o, const FreeSetDescriptor& out_o,
    double eps, double delta, TransformRoute route = TransformRoute::standard,
    const FreeSetDescriptor* allowed = nullptr);

// Worst-case channel fidelity used in certificates: closed-form minimum over
// classical inputs when both Choi matrices are diagonal (box channels), the
// fidelity program otherwise.
double certificate_fidelity(const Channel& a, const Channel& b);

}  // namespace dynres
