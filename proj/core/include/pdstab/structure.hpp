#pragma once

// System description and the algebraic checks at the equilibrium U = 0:
// symmetrizer, partially dissipative normal form, dissipativity inequality and
// the block-diagonal boundary weights X1, X2.

#include "pdstab/matrixcore.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>

namespace pdstab {

using MatrixField = std::function<Matrix(const Vector&)>;
using VectorField = std::function<Vector(const Vector&)>;
using DirectionalField = std::function<Matrix(const Vector&, const Vector&)>;

/// U_t + A(U) U_x = Q(U) on (0,1) with equilibrium U = 0.
///
/// `reference_spectrum`, when set, fixes the scaling of the characteristic
/// variables xi = L(0) U. Feedback matrices and the weight L^T e^{-Lambda x} L
/// are only meaningful relative to that scaling, so models with a published
/// normalization should carry it. Otherwise spectral_decompose(A(0)) is used.
struct SystemModel {
  std::string name;
  Index n = 0;
  Index m = 0;
  Index r = 0;
  MatrixField A;
  VectorField Q;
  MatrixField Q_U;
  MatrixField A0;
  Matrix P0;
  Matrix S0;
  std::optional<Matrix> R;  // dissipation weight of the generalized inequality; I_r when absent
  DirectionalField A_dir;   // A'(U)W; finite differences when empty
  std::optional<Spectrum> reference_spectrum;
};

/// A'(U)W from the model, or by central differences with step
/// cbrt(eps) * (1 + |U|) along W / |W|.
Matrix directional_derivative(const SystemModel& model, const Vector& u, const Vector& w);

/// Spectrum of A(0) in the model's reference normalization.
Spectrum reference_spectrum(const SystemModel& model, double tol = kDefaultSpectralTol);

/// Structural checks need every callable and consistent dimensions.
void validate_model(const SystemModel& model);

struct SymmetrizerCheck {
  double residual = 0.0;   // |A0 A - A^T A0|_max
  double threshold = 0.0;  // tol * |A0|_max * |A|_max
  double a0_margin = 0.0;  // smallest eigenvalue of A0(U)
  bool passed = false;
};

/// Error{A0NotSPD} if A0(U) is not symmetric positive definite.
SymmetrizerCheck check_symmetrizer(const SystemModel& model, const Vector& u, double tol);

struct BoundaryWeights {
  Matrix X1;  // m x m, weights of xi_-
  Matrix X2;  // (n-m) x (n-m), weights of xi_+
  double offdiag_residual = 0.0;
  double X1_margin = 0.0;
  double X2_margin = 0.0;
};

/// Diagonal blocks of (L^{-1})^T A0(0) L^{-1}.
///
/// Error{BlockCouplingTooLarge} if the off-diagonal blocks exceed
/// tol * (largest entry); Error{A0NotSPD} if a block is not SPD.
BoundaryWeights compute_boundary_weights(const Spectrum& spectrum0, const Matrix& a00, double tol = 1e-9);

struct StructureReport {
  Vector lambda;
  Index m = 0;
  double symmetrizer_residual = 0.0;
  bool symmetrizer_pass = false;
  double a0_margin = 0.0;
  double pdq_residual = 0.0;
  bool pdq_pass = false;
  double dissipativity_margin = 0.0;
  double dissipative_block_slack = 0.0;
  bool dissipativity_pass = false;
  Matrix transformed_source_jacobian;  // P0 Q_U(0) P0^{-1}
  Matrix transformed_dissipation;      // P0^{-T} (A0 Q_U + Q_U^T A0) P0^{-1}
  Matrix X1;
  Matrix X2;
  double X1_margin = 0.0;
  double X2_margin = 0.0;
  double block_offdiag_residual = 0.0;
  double commutation_residual = 0.0;
  double generalized_S11_norm = 0.0;
  double generalized_S21_norm = 0.0;

  bool passed() const { return symmetrizer_pass && pdq_pass && dissipativity_pass; }
};

/// Full structural report at U = 0.
///
/// `dissipativity_margin` is -lambda_max(A0 Q_U + Q_U^T A0 + P0^T diag(0,R) P0)
/// and passes iff >= -tol; `dissipative_block_slack` is the same quantity
/// restricted to the lower r x r block in the transformed coordinates. The
/// S11/S21 norms of the generalized normal form are reported, not judged.
///
/// Error{SNotInvertible} if S0 or the lower r x r block of P0 Q_U(0) P0^{-1}
/// is singular.
StructureReport check_partial_dissipativity(const SystemModel& model, double tol = 1e-9,
                                            const std::optional<Matrix>& r_override = std::nullopt);

struct NeighborhoodDiagnostic {
  double max_symmetrizer_residual = 0.0;
  double min_a0_margin = 0.0;
  double max_relative_residual = 0.0;
  int samples = 0;
};

/// Samples U uniformly in the max-norm ball of radius rho.
NeighborhoodDiagnostic sample_symmetrizer(const SystemModel& model, double rho, int samples, std::uint64_t seed);

}  // namespace pdstab
