#pragma once

// Dense complex-matrix helpers shared by the whole library: Hermitian
// bases and svec coordinates, partial traces and transposes, tensor
// permutations, matrix functions on Hermitian operators, and seeded
// random states/unitaries/channels for property tests.

#include <complex>
#include <random>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace dynres {

using cxd = std::complex<double>;
using Mat = Eigen::MatrixXcd;
using Vec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

inline constexpr double kHermTol = 1e-10;

// ---- basic checks ----

bool is_hermitian(const Mat& X, double tol = kHermTol);
double min_eigenvalue(const Mat& X);
bool is_psd(const Mat& X, double tol = 1e-9);

// Throws std::invalid_argument when X is not Hermitian within tol.
void require_hermitian(const Mat& X, const char* what, double tol = kHermTol);

// ---- tensor calculus ----

Mat kron(const Mat& A, const Mat& B);

// Partial trace over the first (dims dA) or second (dims dB) factor of a
// dA*dB square matrix.
Mat ptrace_first(const Mat& X, int dA, int dB);
Mat ptrace_second(const Mat& X, int dA, int dB);

// Partial transpose on the second factor.
Mat ptranspose_second(const Mat& X, int dA, int dB);

// Reorders tensor factors: X lives on H_1 x ... x H_k with dims[i] the
// dimension of factor i; perm[j] names which old factor lands at slot j.
Mat permute_systems(const Mat& X, const std::vector<int>& dims,
                    const std::vector<int>& perm);

// Unnormalized maximally entangled vector sum_i |ii> on C^d x C^d.
Vec max_entangled_unnormalized(int d);

// ---- Hermitian svec coordinates ----
//
// A d x d Hermitian matrix is stored as d^2 real coordinates: diagonal
// entries first, then (sqrt2*Re, sqrt2*Im) of the strictly upper
// triangle, so that <X,Y> = svec(X).dot(svec(Y)).

int svec_dim(int d);
RVec herm_to_svec(const Mat& X);
Mat svec_to_herm(const RVec& v, int d);

// ---- Hermitian matrix functions (eigendecomposition based) ----

Mat herm_sqrt(const Mat& X);        // eigenvalues floored at 0
Mat herm_pinv_sqrt(const Mat& X);   // pseudo-inverse square root
Mat project_psd(const Mat& X);      // nearest PSD in Frobenius norm
Mat support_projector(const Mat& X, double cutoff = 1e-9);

// Trace norm ||X||_1 of a general (not necessarily Hermitian) matrix.
double trace_norm(const Mat& X);

// ---- states and fidelity ----

// Uhlmann fidelity F(rho,sigma) = ||sqrt(rho) sqrt(sigma)||_1^2.
// Accepts unnormalized PSD arguments (the value then scales accordingly).
double state_fidelity(const Mat& rho, const Mat& sigma);

double trace_distance(const Mat& rho, const Mat& sigma);

// Canonical purification of rho on ref x in with ref == in: the vector
// (sqrt(rho) (x) I) sum_i |ii>, which has reduced state rho on the first
// factor.
Vec canonical_purification(const Mat& rho);

// ---- seeded randomness for tests and sampled verification ----

struct Rng {
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  std::mt19937_64 gen;

  double uniform(double lo = 0.0, double hi = 1.0);
  cxd gaussian_c();
  Vec random_pure(int d);                  // Haar-distributed unit vector
  Mat random_density(int d);               // full-rank random state
  Mat random_unitary(int d);               // Haar via QR of Ginibre
  Mat random_hermitian(int d, double scale = 1.0);
};

}  // namespace dynres
