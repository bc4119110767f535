#pragma once

// Concrete theory adapters: Bell boxes as classical-classical channels over
// the local-polytope LP, the isotropic-box monotone scan, and POVM
// incompatibility embedded as measurement channels.

#include <vector>

#include "dynres/channel.hpp"
#include "dynres/freesets.hpp"
#include "dynres/monotones.hpp"

namespace dynres {

// Conditional outcome table p(ab|xy), stored in box_table_index order.
struct Box {
  BoxScenario scenario;
  RVec table;
};

// Throws std::invalid_argument naming the violated constraint: wrong table
// size, negative entries, broken normalization, or a signalling marginal
// (the message identifies whose marginal moved and between which settings).
void validate_box(const Box& b, double tol = 1e-10);

Box pr_box();
Box white_box(const BoxScenario& sc);
// (1 - p) PR + p white noise on the CHSH scenario.
Box isotropic_box(double p);

// Product box: settings and outcomes pair up with the right factor minor,
// matching the tensor order of the embedded channels.
Box tensor_boxes(const Box& a, const Box& b);
Box box_power(const Box& b, int n);

// Classical-classical channel whose Choi matrix carries the table on its
// diagonal. Validates the box first.
Channel box_to_channel(const Box& b);

// Inverse of box_to_channel: extracts the diagonal. Throws when the
// dimensions do not match the scenario or the Choi has off-diagonal weight.
Box channel_to_box(const Channel& ch, const BoxScenario& sc);

struct IsotropicRow {
  double p = 0;
  double r_max = 0;
  double r_s = 0;
  double r_min = 0;
};

// Nonlocality monotones of the isotropic box over a grid of noise levels,
// computed with the local-polytope LP (global robustness mixes over
// no-signalling boxes, standard robustness over local ones).
std::vector<IsotropicRow> isotropic_scan(const std::vector<double>& p_grid);

// A finite collection of POVMs on C^d: effects[x][a] is outcome a of
// measurement setting x.
struct PovmSet {
  int d = 0;
  int nx = 0;
  int na = 0;
  std::vector<std::vector<Mat>> effects;
};

// Throws std::invalid_argument naming the failing setting: non-hermitian or
// negative effects, or a completeness sum away from the identity.
void validate_povm_set(const PovmSet& s, double tol = 1e-9);

// Measurement channel (setting, state) -> outcome label with Choi matrix
// sum_{x,a} |x><x| (x) M_{a|x}^T (x) |a><a|, the same embedding the
// compatible-povms free set uses.
Channel povm_to_channel(const PovmSet& s);

// eta * (projective X/Z qubit pair) + (1 - eta) * I/2 on each effect.
PovmSet noisy_xz_pair(double eta);

// Random near-projective POVMs: normalized random rank-one effects with a
// small ridge, generically incompatible across settings.
PovmSet random_povm_set(Rng& rng, int d, int nx, int na);

enum class IncompatLevel { povm, channel };

// Robustness of measurement incompatibility. level = povm solves the
// parent-measurement SDP over deterministic post-processings; level =
// channel embeds the set as a measurement channel and reuses the channel
// robustness over the compatible set. The two levels agree; value 1 means
// compatible. The povm level throws when n_a^{n_x} exceeds 256 parents.
MonotoneResult incompatibility_robustness(const PovmSet& s, IncompatLevel level);

}  // namespace dynres
