#pragma once

// Choi-matrix channel calculus. A channel E from a d_in- to a
// d_out-dimensional system is stored through its Choi operator
//   J_E = sum_ij |i><j| (x) E(|i><j|),
// so Tr_out(J) = I_in (trace d_in) and input indices come first.

#include <vector>

#include "dynres/linalg.hpp"

namespace dynres {

struct Channel {
  int d_in = 0;
  int d_out = 0;
  Mat choi;

  int choi_dim() const { return d_in * d_out; }

  // Invariant checks: Hermitian Choi, min eigenvalue >= -1e-9,
  // Tr_out(choi) = I_in entrywise within 1e-9.
  bool is_valid(double tol = 1e-9) const;
  void require_valid(const char* what) const;
};

// ---- constructors ----

// Kraus operators are d_out x d_in; completeness sum K^dag K = I is
// enforced within 1e-9 and violation is reported with its magnitude.
Channel channel_from_kraus(const std::vector<Mat>& kraus, int d_in, int d_out);

Channel channel_from_choi(const Mat& choi, int d_in, int d_out);
Channel identity_channel(int d);
Channel replacement_channel(int d_in, const Mat& sigma);
Channel depolarizing_channel(int d, double p);  // (1-p) id + p full mixing
Channel dephasing_channel(int d, double q);     // (1-q) id + q basis dephasing
Channel unitary_channel(const Mat& U);
// Preparation channel with trivial (one-dimensional) input.
Channel preparation_channel(const Mat& state);

// Extracts a Kraus decomposition by eigendecomposition of the Choi matrix.
std::vector<Mat> kraus_from_channel(const Channel& ch, double cutoff = 1e-10);

// ---- application and composition ----

// id (x) E applied to an operator on ref (x) in; dim_ref inferred from the
// input size. Works for any ref dimension, including 1.
Mat apply_channel(const Channel& ch, const Mat& input);

// E2 after E1 (signature: d_in of E1 -> d_out of E2).
Channel compose(const Channel& e2, const Channel& e1);

// E1 (x) E2 with inputs (in1 in2) and outputs (out1 out2).
Channel tensor(const Channel& e1, const Channel& e2);

// Convex mixture p*E1 + (1-p)*E2.
Channel mix(const Channel& e1, const Channel& e2, double p);

// True when the channel preserves purity even when acting on one half of an
// entangled input, i.e. the Choi matrix is rank one within tol. This singles
// out isometry channels and, for trivial input, pure-state preparations; a
// replacement channel onto a pure state does not qualify since it breaks
// entanglement with the reference.
bool is_pure_output(const Channel& ch, double tol = 1e-9);

// Random CPTP channel via a Haar isometry with environment dimension env.
Channel random_channel(Rng& rng, int d_in, int d_out, int env = 0);

}  // namespace dynres
