#pragma once

// Saint-Venant-Exner river model around a uniform flowing equilibrium.
//
//   H_t + V H_x + H V_x = 0
//   B_t + a V^2 V_x     = 0
//   V_t + V V_x + g H_x + g B_x = g S_b - C_f V^2 / H
//
// State U = (h, b, v) = (H - H*, B - B*, V - V*).  m = 1 negative speed
// (water, upstream), two positive speeds (slow sediment, fast water).

#include "pdstab/feedback.hpp"
#include "pdstab/matrixcore.hpp"
#include "pdstab/structure.hpp"

#include <array>
#include <optional>
#include <vector>

namespace pdstab::sve {

struct SveParameters {
  double g = 9.81;
  double S_b = 0.0;
  double C_f = 0.0;
  double a = 0.0;
  double H_star = 1.0;
  double B_star = 0.0;
  double V_star = 1.0;
};

/// S_b from the friction/slope balance g S_b H* = C_f V*^2; B* defaults to 0.
/// Error{InvalidParameters} unless g, a, H*, V* > 0 and C_f >= 0.
SveParameters make_equilibrium(double g, double a, double H_star, double V_star, double C_f);

/// Loader-side constructor: when S_b is supplied it must satisfy the
/// equilibrium balance to `balance_tol` relative.
SveParameters from_values(double g, double a, double H_star, double V_star, double C_f,
                          std::optional<double> S_b, double B_star = 0.0, double balance_tol = 1e-10);

/// (g, a, H*, V*, C_f) = (9.81, 0.005, 1, 1, 0.01).
SveParameters reference_parameters();

/// Throws Error{InvalidParameters} when the invariants fail (balance to 1e-12 relative).
void validate(const SveParameters& p);

Matrix flux_jacobian(const Vector& u, const SveParameters& p);
/// d/ds A(U + s W) at s = 0.
Matrix flux_jacobian_directional(const Vector& u, const Vector& w, const SveParameters& p);
/// Error{DryBed} if h + H* <= 0.
Vector source(const Vector& u, const SveParameters& p);
Matrix source_jacobian(const Vector& u, const SveParameters& p);
/// A0 with (H*, V*) replaced by the local depth and velocity; a symmetrizer of A(U).
Matrix symmetrizer(const Vector& u, const SveParameters& p);

/// Roots of lambda^3 - 2V lambda^2 + (V^2 - g a V^2 - g H) lambda + g a V^3, ascending.
///
/// Computed as eigenvalues of the companion matrix; Vieta relations are
/// checked to 1e-10 relative. Error{AssumptionViolated} unless
/// lambda1 < 0 < lambda2 <= lambda3, lambda2 < -lambda1 and lambda2 < 1.5 V*.
std::array<double, 3> characteristic_roots(const SveParameters& p);

struct VietaResiduals {
  double product = 0.0;
  double sum = 0.0;
  double pairwise = 0.0;
};

/// Relative residuals of the three Vieta relations.
VietaResiduals vieta_residuals(const std::array<double, 3>& lambda, const SveParameters& p);

struct StructuralMatrices {
  Matrix P0;
  Matrix A00;
  double det_cofactor = 0.0;
  double det_product = 0.0;  // g / (a H*^2 V*^3) prod(lambda_i - 1.5 V*)
};

/// Error{AssumptionViolated} if A0(0) is not SPD.
StructuralMatrices structural_matrices(const SveParameters& p);

struct EigenvectorMatrices {
  Matrix L0;      // rows (g/(lambda_i - V*), g/lambda_i, 1)
  Matrix L0_inv;  // closed form
  std::array<double, 3> X{};  // closed-form  X_jj = lambda_j (lambda_j - 1.5V*) / prod_{k!=j}(lambda_j - lambda_k)
  Matrix X_quadratic;         // (L0^{-1})^T A0(0) L0^{-1}
};

EigenvectorMatrices eigvector_matrices(const SveParameters& p);

/// Spectrum of A(0) with the closed-form row scaling of L0.
Spectrum spectrum(const SveParameters& p);

struct SveSpectralData {
  std::array<double, 3> lambda{};
  std::array<double, 3> X{};
  double beta2 = 0.0;
  double beta3 = 0.0;
  double eta2 = 0.0;
  double eta3 = 0.0;
};

SveSpectralData spectral_data(const SveParameters& p);

/// pi_j(k1), j = 2, 3: injection of xi_1(t,0) into xi_j(t,0).
double pi(int j, double k1, const SveParameters& p);
/// chi_j(k2), j = 2, 3: injection of xi_j(t,1) into xi_1(t,1).
double chi(int j, double k2, const SveParameters& p);

/// Maps a matrix acting (xi2, xi3, xi1)(t,1|0) -> (xi2, xi3, xi1)(t,0|1) onto
/// the (xi_+; xi_-) convention of FeedbackGain. Both orderings list the two
/// positive fields first, so this is the identity permutation; every consumer
/// goes through here so the convention lives in one place.
Matrix boundary_ordering_to_toolkit(const Matrix& k_boundary_order);

/// Error{SingularFeedback} if g - k1(lambda1 - V*) or g + k2(lambda1 - V*) is ~0.
FeedbackGain feedback_matrix(double k1, double k2, const SveParameters& p);

enum class AdmissibilityMode { Exact, Sufficient };

struct AdmissibilityReport {
  AdmissibilityMode mode = AdmissibilityMode::Exact;
  // Exact: X-weighted pi, X-weighted chi, exp-weighted pi, exp-weighted chi.
  // Sufficient: beta-weighted pi, eta-weighted chi.
  std::vector<double> lhs;
  std::vector<bool> pass;
  bool passed = false;
  bool implication_holds = true;  // sufficient pass => exact pass
};

AdmissibilityReport gain_admissible(double k1, double k2, const SveParameters& p, AdmissibilityMode mode);

/// Each condition evaluated as "<= 1", the form in which they are stated.
bool admissible_exact(double k1, double k2, const SveParameters& p);
bool admissible_sufficient(double k1, double k2, const SveParameters& p);

/// (n, m, r) = (3, 1, 1); carries the closed-form reference spectrum, the
/// analytic A'(U)W and a dissipation weight R = [2 C_f V* / H*].
SystemModel as_system_model(const SveParameters& p);

/// max(|b(0)|, |v(0) + k1 h(0)|, |v(1) + k2 (h(1) + b(1))|).
double physical_boundary_residual(const Vector& u_left, const Vector& u_right, double k1, double k2);

}  // namespace pdstab::sve
