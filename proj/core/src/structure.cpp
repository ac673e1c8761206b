#include "pdstab/structure.hpp"

#include "pdstab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace pdstab {

Matrix directional_derivative(const SystemModel& model, const Vector& u, const Vector& w) {
  if (model.A_dir) return model.A_dir(u, w);
  const double wn = w.norm();
  if (wn == 0.0) return Matrix::Zero(model.n, model.n);
  const double h = std::cbrt(std::numeric_limits<double>::epsilon()) * (1.0 + u.norm());
  const Vector dir = w / wn;
  return (model.A(u + h * dir) - model.A(u - h * dir)) * (wn / (2.0 * h));
}

Spectrum reference_spectrum(const SystemModel& model, double tol) {
  if (model.reference_spectrum) return *model.reference_spectrum;
  return spectral_decompose(model.A(Vector::Zero(model.n)), tol);
}

void validate_model(const SystemModel& model) {
  if (model.n <= 0 || model.r <= 0 || model.r > model.n || model.m < 0 || model.m > model.n) {
    throw Error(ErrorCode::DimensionMismatch, "model dimensions (n, m, r) are inconsistent");
  }
  if (!model.A || !model.Q || !model.Q_U || !model.A0) {
    throw Error(ErrorCode::InvalidConfig, "model '" + model.name + "' is missing a callable");
  }
  require_shape(model.P0, model.n, model.n, "P0");
  require_shape(model.S0, model.r, model.r, "S0");
  if (model.R) require_shape(*model.R, model.r, model.r, "R");
}

SymmetrizerCheck check_symmetrizer(const SystemModel& model, const Vector& u, double tol) {
  const Matrix a = model.A(u);
  const Matrix a0 = model.A0(u);
  const auto pd = is_positive_definite(a0, 0.0);
  if (!pd.positive || pd.asymmetry > tol * std::max(1.0, max_norm(a0))) {
    throw Error(ErrorCode::A0NotSPD, "symmetrizer is not symmetric positive definite (margin " +
                                         std::to_string(pd.margin) + ")");
  }
  SymmetrizerCheck c;
  c.residual = max_norm(Matrix(a0 * a - a.transpose() * a0));
  c.threshold = tol * max_norm(a0) * max_norm(a);
  c.a0_margin = pd.margin;
  c.passed = c.residual <= c.threshold;
  return c;
}

BoundaryWeights compute_boundary_weights(const Spectrum& spectrum0, const Matrix& a00, double tol) {
  const Index n = spectrum0.n();
  const Index m = spectrum0.m;
  require_shape(a00, n, n, "A0(0)");
  const Matrix full = spectrum0.L_inv.transpose() * a00 * spectrum0.L_inv;
  const Blocks b = partition(full, m, m);

  BoundaryWeights w;
  w.X1 = symmetrize(b.b00);
  w.X2 = symmetrize(b.b11);
  w.offdiag_residual = std::max(max_norm(b.b01), max_norm(b.b10));
  if (w.offdiag_residual > tol * max_norm(full)) {
    throw Error(ErrorCode::BlockCouplingTooLarge,
                "(L^-1)^T A0 L^-1 couples negative and positive fields: " + std::to_string(w.offdiag_residual));
  }
  const auto pd1 = is_positive_definite(w.X1);
  const auto pd2 = is_positive_definite(w.X2);
  w.X1_margin = pd1.margin;
  w.X2_margin = pd2.margin;
  if (!pd1.positive || !pd2.positive) throw Error(ErrorCode::A0NotSPD, "boundary weight block is not SPD");
  return w;
}

namespace {

bool singular(const Matrix& m, double tol) {
  if (m.size() == 0) return true;
  Eigen::FullPivLU<Matrix> lu(m);
  lu.setThreshold(tol);
  return !lu.isInvertible();
}

double largest_eigenvalue(const Matrix& m) {
  if (m.size() == 0) return -std::numeric_limits<double>::infinity();
  Eigen::SelfAdjointEigenSolver<Matrix> solver(symmetrize(m), Eigen::EigenvaluesOnly);
  return solver.eigenvalues().maxCoeff();
}

}  // namespace

StructureReport check_partial_dissipativity(const SystemModel& model, double tol,
                                            const std::optional<Matrix>& r_override) {
  validate_model(model);
  const Index n = model.n;
  const Index r = model.r;
  const Index k = n - r;
  const Vector zero = Vector::Zero(n);

  StructureReport rep;
  const Spectrum s0 = reference_spectrum(model);
  rep.lambda = s0.lambda;
  rep.m = s0.m;

  const SymmetrizerCheck sym = check_symmetrizer(model, zero, tol);
  rep.symmetrizer_residual = sym.residual;
  rep.symmetrizer_pass = sym.passed;
  rep.a0_margin = sym.a0_margin;

  const Matrix a00 = model.A0(zero);
  const Matrix qu = model.Q_U(zero);
  const Matrix p_inv = invert(model.P0);

  rep.transformed_source_jacobian = model.P0 * qu * p_inv;
  const Blocks nf = partition(rep.transformed_source_jacobian, k, k);
  if (singular(model.S0, tol) || singular(nf.b11, tol)) {
    throw Error(ErrorCode::SNotInvertible, "dissipative block of P0 Q_U(0) P0^-1 is singular");
  }
  rep.generalized_S11_norm = max_norm(nf.b00);
  rep.generalized_S21_norm = max_norm(nf.b10);
  rep.pdq_residual =
      max_norm(Matrix(rep.transformed_source_jacobian - block_diag(Matrix::Zero(k, k), model.S0)));
  rep.pdq_pass = rep.pdq_residual <= tol * std::max(1.0, max_norm(qu));

  const Matrix weight_r = r_override ? *r_override : (model.R ? *model.R : Matrix::Identity(r, r));
  require_shape(weight_r, r, r, "R");
  const Matrix lifted_r = block_diag(Matrix::Zero(k, k), weight_r);
  const Matrix dissipation = a00 * qu + qu.transpose() * a00;
  rep.dissipativity_margin = 0.0 - largest_eigenvalue(dissipation + model.P0.transpose() * lifted_r * model.P0);
  rep.transformed_dissipation = symmetrize(p_inv.transpose() * dissipation * p_inv);
  rep.dissipative_block_slack =
      0.0 - largest_eigenvalue(Matrix(rep.transformed_dissipation + lifted_r).bottomRightCorner(r, r));
  rep.dissipativity_pass = rep.dissipativity_margin >= -tol * std::max(1.0, max_norm(dissipation));

  const Matrix x = s0.L_inv.transpose() * a00 * s0.L_inv;
  rep.commutation_residual = max_norm(Matrix(x * s0.lambda.asDiagonal() - s0.lambda.asDiagonal() * x));
  const BoundaryWeights w = compute_boundary_weights(s0, a00, std::max(tol, 1e-9));
  rep.X1 = w.X1;
  rep.X2 = w.X2;
  rep.X1_margin = w.X1_margin;
  rep.X2_margin = w.X2_margin;
  rep.block_offdiag_residual = w.offdiag_residual;
  return rep;
}

NeighborhoodDiagnostic sample_symmetrizer(const SystemModel& model, double rho, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(-rho, rho);
  NeighborhoodDiagnostic d;
  d.min_a0_margin = std::numeric_limits<double>::infinity();
  for (int s = 0; s < samples; ++s) {
    Vector u(model.n);
    for (Index i = 0; i < model.n; ++i) u[i] = dist(rng);
    const SymmetrizerCheck c = check_symmetrizer(model, u, 1.0);
    d.max_symmetrizer_residual = std::max(d.max_symmetrizer_residual, c.residual);
    d.max_relative_residual = std::max(d.max_relative_residual, c.residual / std::max(c.threshold, 1e-300));
    d.min_a0_margin = std::min(d.min_a0_margin, c.a0_margin);
    ++d.samples;
  }
  return d;
}

}  // namespace pdstab
