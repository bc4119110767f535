#pragma once

// Fidelity measures between channels. The worst-case fidelity minimizes the
// output fidelity over all pure inputs, reference system included; it is
// computed exactly as a semidefinite program and cross-checked by a direct
// search over inputs that also yields the witness state.

#include "dynres/channel.hpp"
#include "dynres/conic.hpp"

namespace dynres {

struct ChannelFidelity {
  double value = 0;        // worst-case fidelity F
  double sqrt_value = 0;   // certified root fidelity from the program
  Mat worst_input;         // reference-side marginal of the worst input
  Vec witness;             // its canonical purification on ref (x) in
  double search_value = 0; // best fidelity found by the direct search
  bool inaccurate = false; // program and search disagree beyond 1e-5
};

// F(id (x) E1(psi), id (x) E2(psi)) minimized over pure psi.
ChannelFidelity worst_case_fidelity(const Channel& a, const Channel& b);

// Fidelity of the normalized Choi states, i.e. the output fidelity at the
// maximally entangled input. Upper bounds the worst case.
double choi_fidelity(const Channel& a, const Channel& b);

// Output fidelity at the fixed input marginal rho (purified canonically).
double fidelity_at_input(const Channel& a, const Channel& b, const Mat& rho);

}  // namespace dynres
