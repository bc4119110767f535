#include "dynres/channel.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace dynres {

bool Channel::is_valid(double tol) const {
  if (d_in <= 0 || d_out <= 0 || choi.rows() != choi_dim()) return false;
  if (!is_hermitian(choi, 1e-8)) return false;
  if (min_eigenvalue(choi) < -tol) return false;
  Mat marg = ptrace_second(choi, d_in, d_out);
  return (marg - Mat::Identity(d_in, d_in)).cwiseAbs().maxCoeff() <= tol;
}

void Channel::require_valid(const char* what) const {
  if (!is_valid())
    throw std::invalid_argument(std::string(what) +
                                ": Choi matrix violates the CPTP invariants");
}

Channel channel_from_kraus(const std::vector<Mat>& kraus, int d_in, int d_out) {
  Mat sum = Mat::Zero(d_in, d_in);
  for (const Mat& K : kraus) {
    if (K.rows() != d_out || K.cols() != d_in)
      throw std::invalid_argument("channel_from_kraus: operator shape mismatch");
    sum += K.adjoint() * K;
  }
  const double dev = (sum - Mat::Identity(d_in, d_in)).cwiseAbs().maxCoeff();
  if (dev > 1e-9) {
    std::ostringstream os;
    os << "channel_from_kraus: completeness sum deviates from identity by "
       << dev;
    throw std::invalid_argument(os.str());
  }
  // J = sum_k vec(K_k) vec(K_k)^dag with vec(K)(i*d_out + a) = K(a,i).
  Mat choi = Mat::Zero(d_in * d_out, d_in * d_out);
  for (const Mat& K : kraus) {
    Vec v(d_in * d_out);
    for (int i = 0; i < d_in; ++i)
      for (int a = 0; a < d_out; ++a) v(i * d_out + a) = K(a, i);
    choi += v * v.adjoint();
  }
  return Channel{d_in, d_out, choi};
}

Channel channel_from_choi(const Mat& choi, int d_in, int d_out) {
  Channel ch{d_in, d_out, choi};
  ch.require_valid("channel_from_choi");
  return ch;
}

Channel identity_channel(int d) {
  Vec omega = max_entangled_unnormalized(d);
  return Channel{d, d, omega * omega.adjoint()};
}

Channel replacement_channel(int d_in, const Mat& sigma) {
  return Channel{d_in, static_cast<int>(sigma.rows()),
                 kron(Mat::Identity(d_in, d_in), sigma)};
}

Channel depolarizing_channel(int d, double p) {
  Channel id = identity_channel(d);
  Mat mixed = Mat::Identity(d, d) / d;
  Mat choi = (1.0 - p) * id.choi + p * kron(Mat::Identity(d, d), mixed);
  return Channel{d, d, choi};
}

Channel dephasing_channel(int d, double q) {
  Channel id = identity_channel(d);
  Mat choi = (1.0 - q) * id.choi;
  for (int i = 0; i < d; ++i) {
    Mat ii = Mat::Zero(d, d);
    ii(i, i) = 1.0;
    choi += q * kron(ii, ii);
  }
  return Channel{d, d, choi};
}

Channel unitary_channel(const Mat& U) {
  return channel_from_kraus({U}, static_cast<int>(U.cols()),
                            static_cast<int>(U.rows()));
}

Channel preparation_channel(const Mat& state) {
  return Channel{1, static_cast<int>(state.rows()), state};
}

std::vector<Mat> kraus_from_channel(const Channel& ch, double cutoff) {
  Eigen::SelfAdjointEigenSolver<Mat> es(ch.choi);
  std::vector<Mat> out;
  for (int k = 0; k < es.eigenvalues().size(); ++k) {
    const double ev = es.eigenvalues()(k);
    if (ev <= cutoff) continue;
    Vec v = std::sqrt(ev) * es.eigenvectors().col(k);
    Mat K(ch.d_out, ch.d_in);
    for (int i = 0; i < ch.d_in; ++i)
      for (int a = 0; a < ch.d_out; ++a) K(a, i) = v(i * ch.d_out + a);
    out.push_back(K);
  }
  return out;
}

Mat apply_channel(const Channel& ch, const Mat& input) {
  const long din = ch.d_in;
  if (input.rows() % din != 0)
    throw std::invalid_argument("apply_channel: input does not factor as ref x in");
  const long dref = input.rows() / din;
  const long dout = ch.d_out;
  // (id (x) E)(X) = Tr_in[(I_ref (x) X_in^T (x) I_out)(I_ref (x) J)] done
  // blockwise: out(r,s) blocks of size d_out from sandwiching Choi blocks.
  Mat out = Mat::Zero(dref * dout, dref * dout);
  for (long r = 0; r < dref; ++r)
    for (long s = 0; s < dref; ++s)
      for (long i = 0; i < din; ++i)
        for (long j = 0; j < din; ++j)
          out.block(r * dout, s * dout, dout, dout) +=
              input(r * din + i, s * din + j) *
              ch.choi.block(i * dout, j * dout, dout, dout);
  return out;
}

Channel compose(const Channel& e2, const Channel& e1) {
  if (e1.d_out != e2.d_in)
    throw std::invalid_argument("compose: signature mismatch");
  // Build the composite Choi by acting on a basis of |i><j|.
  Mat choi = Mat::Zero(e1.d_in * e2.d_out, e1.d_in * e2.d_out);
  for (int i = 0; i < e1.d_in; ++i)
    for (int j = 0; j < e1.d_in; ++j) {
      Mat eij = Mat::Zero(e1.d_in, e1.d_in);
      eij(i, j) = 1.0;
      Mat mid = apply_channel(e1, eij);
      Mat fin = apply_channel(e2, mid);
      for (int a = 0; a < e2.d_out; ++a)
        for (int b = 0; b < e2.d_out; ++b)
          choi(i * e2.d_out + a, j * e2.d_out + b) = fin(a, b);
    }
  return Channel{e1.d_in, e2.d_out, choi};
}

Channel tensor(const Channel& e1, const Channel& e2) {
  // kron(J1, J2) carries ordering (in1 out1 in2 out2); channels want
  // (in1 in2 out1 out2).
  Mat big = kron(e1.choi, e2.choi);
  Mat perm = permute_systems(
      big, {e1.d_in, e1.d_out, e2.d_in, e2.d_out}, {0, 2, 1, 3});
  return Channel{e1.d_in * e2.d_in, e1.d_out * e2.d_out, perm};
}

Channel mix(const Channel& e1, const Channel& e2, double p) {
  if (e1.d_in != e2.d_in || e1.d_out != e2.d_out)
    throw std::invalid_argument("mix: signature mismatch");
  return Channel{e1.d_in, e1.d_out, p * e1.choi + (1.0 - p) * e2.choi};
}

bool is_pure_output(const Channel& ch, double tol) {
  Eigen::SelfAdjointEigenSolver<Mat> es(ch.choi, Eigen::EigenvaluesOnly);
  const auto& ev = es.eigenvalues();
  // Rank-one Choi: all but the top eigenvalue vanish.
  for (int i = 0; i + 1 < ev.size(); ++i)
    if (ev(i) > tol) return false;
  return true;
}

Channel random_channel(Rng& rng, int d_in, int d_out, int env) {
  if (env <= 0) env = d_in;  // generic full-Kraus-rank choice
  // Isometry V: C^{d_in} -> C^{d_out * env} from the first columns of a
  // Haar unitary; Kraus operators are the environment slices.
  const int big = d_out * env;
  if (big < d_in)
    throw std::invalid_argument("random_channel: environment too small");
  Mat U = rng.random_unitary(big);
  Mat V = U.leftCols(d_in);
  std::vector<Mat> kraus;
  for (int e = 0; e < env; ++e) {
    Mat K(d_out, d_in);
    for (int a = 0; a < d_out; ++a) K.row(a) = V.row(a * env + e);
    kraus.push_back(K);
  }
  return channel_from_kraus(kraus, d_in, d_out);
}

}  // namespace dynres
