#pragma once

// Parametric family for user-supplied systems:
//
//   A(U) = A_c + sum_k U_k A_k
//   Q_i(U) = (J U + U^T H_i U)_i / (1 + d . U)
//
// so that U = 0 is an equilibrium with Q_U(0) = J. The symmetrizer is either
// a constant matrix or L(U)^T L(U) built from the local eigenbasis.

#include "pdstab/structure.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pdstab {

struct AffineModelSpec {
  std::string name = "custom";
  Index n = 0;
  Index r = 0;
  Matrix A_const;
  std::vector<Matrix> A_lin;   // empty, or n matrices
  Matrix J;
  std::vector<Matrix> H;       // empty, or n symmetric matrices
  Vector d;                    // empty means zero
  std::optional<Matrix> A0;    // constant symmetrizer
  std::optional<Matrix> P0;    // identity when absent
  std::optional<Matrix> R;
};

/// Error{InvalidConfig} on inconsistent sizes or non-finite entries.
void validate(const AffineModelSpec& spec);

/// m is read off the spectrum of A_const; S0 is the lower r x r block of
/// P0 J P0^{-1}. Propagates spectral errors of A_const.
SystemModel make_affine_model(const AffineModelSpec& spec);

}  // namespace pdstab
