#include "dynres/linalg.hpp"

#include <cmath>

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

namespace dynres {

bool is_hermitian(const Mat& X, double tol) {
  if (X.rows() != X.cols()) return false;
  return (X - X.adjoint()).cwiseAbs().maxCoeff() <= tol;
}

double min_eigenvalue(const Mat& X) {
  Eigen::SelfAdjointEigenSolver<Mat> es(X, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

bool is_psd(const Mat& X, double tol) {
  return is_hermitian(X, 1e-8) && min_eigenvalue(X) >= -tol;
}

void require_hermitian(const Mat& X, const char* what, double tol) {
  if (!is_hermitian(X, tol))
    throw std::invalid_argument(std::string(what) + ": matrix is not Hermitian");
}

Mat kron(const Mat& A, const Mat& B) {
  Mat out(A.rows() * B.rows(), A.cols() * B.cols());
  for (int i = 0; i < A.rows(); ++i)
    for (int j = 0; j < A.cols(); ++j)
      out.block(i * B.rows(), j * B.cols(), B.rows(), B.cols()) = A(i, j) * B;
  return out;
}

Mat ptrace_first(const Mat& X, int dA, int dB) {
  Mat out = Mat::Zero(dB, dB);
  for (int a = 0; a < dA; ++a)
    out += X.block(a * dB, a * dB, dB, dB);
  return out;
}

Mat ptrace_second(const Mat& X, int dA, int dB) {
  Mat out = Mat::Zero(dA, dA);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      out(i, j) = X.block(i * dB, j * dB, dB, dB).trace();
  return out;
}

Mat ptranspose_second(const Mat& X, int dA, int dB) {
  Mat out(dA * dB, dA * dB);
  for (int i = 0; i < dA; ++i)
    for (int j = 0; j < dA; ++j)
      out.block(i * dB, j * dB, dB, dB) =
          X.block(i * dB, j * dB, dB, dB).transpose();
  return out;
}

Mat permute_systems(const Mat& X, const std::vector<int>& dims,
                    const std::vector<int>& perm) {
  const int k = static_cast<int>(dims.size());
  long total = 1;
  for (int d : dims) total *= d;
  if (X.rows() != total || X.cols() != total)
    throw std::invalid_argument("permute_systems: dimension mismatch");

  // Strides of each factor in the flat index, old ordering.
  std::vector<long> stride(k, 1);
  for (int i = k - 2; i >= 0; --i) stride[i] = stride[i + 1] * dims[i + 1];

  // new index -> old index
  std::vector<long> map(total);
  std::vector<int> digits(k, 0);
  std::vector<int> new_dims(k);
  for (int j = 0; j < k; ++j) new_dims[j] = dims[perm[j]];
  for (long idx = 0; idx < total; ++idx) {
    long rem = idx;
    long old = 0;
    for (int j = 0; j < k; ++j) {
      long block = 1;
      for (int l = j + 1; l < k; ++l) block *= new_dims[l];
      int digit = static_cast<int>(rem / block);
      rem %= block;
      old += digit * stride[perm[j]];
    }
    map[idx] = old;
  }
  Mat out(total, total);
  for (long i = 0; i < total; ++i)
    for (long j = 0; j < total; ++j) out(i, j) = X(map[i], map[j]);
  return out;
}

Vec max_entangled_unnormalized(int d) {
  Vec v = Vec::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i) v(i * d + i) = 1.0;
  return v;
}

int svec_dim(int d) { return d * d; }

RVec herm_to_svec(const Mat& X) {
  const int d = static_cast<int>(X.rows());
  RVec v(svec_dim(d));
  int k = 0;
  for (int i = 0; i < d; ++i) v(k++) = X(i, i).real();
  const double s = std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      v(k++) = s * X(i, j).real();
      v(k++) = s * X(i, j).imag();
    }
  return v;
}

Mat svec_to_herm(const RVec& v, int d) {
  Mat X = Mat::Zero(d, d);
  int k = 0;
  for (int i = 0; i < d; ++i) X(i, i) = v(k++);
  const double s = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j) {
      const double re = v(k++) * s;
      const double im = v(k++) * s;
      X(i, j) = cxd(re, im);
      X(j, i) = cxd(re, -im);
    }
  return X;
}

namespace {
template <typename F>
Mat herm_func(const Mat& X, F f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(X);
  Vec diag(X.rows());
  for (int i = 0; i < X.rows(); ++i) diag(i) = f(es.eigenvalues()(i));
  return es.eigenvectors() * diag.asDiagonal() * es.eigenvectors().adjoint();
}
}  // namespace

Mat herm_sqrt(const Mat& X) {
  return herm_func(X, [](double x) { return std::sqrt(std::max(x, 0.0)); });
}

Mat herm_pinv_sqrt(const Mat& X) {
  return herm_func(X, [](double x) {
    return x > 1e-12 ? 1.0 / std::sqrt(x) : 0.0;
  });
}

Mat project_psd(const Mat& X) {
  return herm_func(X, [](double x) { return std::max(x, 0.0); });
}

Mat support_projector(const Mat& X, double cutoff) {
  return herm_func(X, [cutoff](double x) { return x > cutoff ? 1.0 : 0.0; });
}

double trace_norm(const Mat& X) {
  return X.jacobiSvd().singularValues().sum();
}

double state_fidelity(const Mat& rho, const Mat& sigma) {
  require_hermitian(rho, "state_fidelity");
  require_hermitian(sigma, "state_fidelity");
  if (min_eigenvalue(rho) < -1e-8 || min_eigenvalue(sigma) < -1e-8)
    throw std::invalid_argument("state_fidelity: input is not PSD");
  const double root = trace_norm(herm_sqrt(rho) * herm_sqrt(sigma));
  return root * root;
}

double trace_distance(const Mat& rho, const Mat& sigma) {
  return 0.5 * trace_norm(rho - sigma);
}

Vec canonical_purification(const Mat& rho) {
  const int d = static_cast<int>(rho.rows());
  const Mat r = herm_sqrt(rho);
  Vec psi = Vec::Zero(static_cast<long>(d) * d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) psi(i * d + j) = r(i, j);
  return psi;
}

double Rng::uniform(double lo, double hi) {
  std::uniform_real_distribution<double> dist(lo, hi);
  return dist(gen);
}

cxd Rng::gaussian_c() {
  std::normal_distribution<double> dist(0.0, 1.0);
  return cxd(dist(gen), dist(gen));
}

Vec Rng::random_pure(int d) {
  Vec v(d);
  for (int i = 0; i < d; ++i) v(i) = gaussian_c();
  return v / v.norm();
}

Mat Rng::random_density(int d) {
  Mat G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gaussian_c();
  Mat rho = G * G.adjoint();
  return rho / rho.trace().real();
}

Mat Rng::random_unitary(int d) {
  Mat G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gaussian_c();
  Eigen::HouseholderQR<Mat> qr(G);
  Mat Q = qr.householderQ();
  Mat R = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix phases so the distribution is Haar.
  for (int i = 0; i < d; ++i) {
    cxd r = R(i, i);
    Q.col(i) *= (std::abs(r) > 0 ? r / std::abs(r) : cxd(1, 0));
  }
  return Q;
}

Mat Rng::random_hermitian(int d, double scale) {
  Mat G(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) G(i, j) = gaussian_c();
  return scale * 0.5 * (G + G.adjoint());
}

}  // namespace dynres
