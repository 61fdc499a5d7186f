#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Sparse>

#include "tjflow/network.hpp"

namespace tjflow {

using BranchValues = std::array<std::vector<double>, 3>;

// P1 discretization on n elements per branch. Unknown (i, j) sits at index
// i * (n + 1) + j.
struct StabilityForms {
  int n = 0;
  Eigen::SparseMatrix<double> K;
  Eigen::SparseMatrix<double> B;
  Eigen::RowVectorXd constraint;
};

StabilityForms assemble_forms(const StationaryNetwork& network, int n);

struct SpectrumResult {
  double lambda_max = 0.0;
  BranchValues eigenfunction;
  double rayleigh = 0.0;
  int n = 0;
};

// Largest eigenvalue of -K phi = lambda B phi on sum gamma^i phi^i(0) = 0.
SpectrumResult max_eigenvalue(const StationaryNetwork& network, int n);

// Number of eigenvalues of K phi = mu B phi (constrained) below mu.
int eigenvalue_count_below(const StationaryNetwork& network, int n, double mu);

enum class Verdict { Stable, Unstable, Marginal };
enum class CriterionCase { AllPositive, OneNonPositive, TwoOrMoreNonPositive };

struct StabilityVerdict {
  Verdict verdict = Verdict::Marginal;
  double criterion_value = 0.0;
  CriterionCase which = CriterionCase::AllPositive;
  double marginal_band = 1e-10;
};

// sum gamma^i (1 + l^i h^i) h^j h^k over cyclic (i, j, k).
double criterion_expression(const std::array<double, 3>& l, const std::array<double, 3>& h,
                            const SurfaceTensions& tensions);

StabilityVerdict stability_criterion(const std::array<double, 3>& l, const std::array<double, 3>& h,
                                     const SurfaceTensions& tensions, double marginal_band = 1e-10);

// I[phi, phi] / sum gamma^i ||phi^i||^2 with the discrete forms.
double rayleigh_quotient(const StationaryNetwork& network, const BranchValues& phi);

const char* to_string(Verdict v);
const char* to_string(CriterionCase c);

}  // namespace tjflow
