#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "kernelguard/features.hpp"
#include "kernelguard/kernel.hpp"

namespace kernelguard {

struct TrainConfig {
  double C = 1.0;
  double kkt_tol = 1e-3;
  int max_passes = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Solution of  max sum(a) - 1/2 a'Qa,  0 <= a <= C,  y'a = 0,
/// with Q_ij = y_i y_j K_ij.
struct DualSolution {
  std::vector<double> alpha;
  double bias = 0.0;
  double objective = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

/// Sequential minimal optimization over a precomputed Gram matrix. The
/// working pair is the maximal KKT violator pair; ties are broken by a
/// seed-dependent index order. Stops when the violation gap falls below
/// half of kkt_tol, or after max_passes * max(n, 100) pair updates.
DualSolution solve_dual(const Eigen::MatrixXd& gram, std::span<const int> y, const TrainConfig& cfg);

/// Returns the minimum eigenvalue; throws DataError below -1e-6.
double require_psd(const Eigen::MatrixXd& gram);

/// Dual objective sum(a) - 1/2 a'Qa.
double dual_objective(const Eigen::MatrixXd& gram, std::span<const int> y,
                      std::span<const double> alpha);

struct TrainingPage {
  FeatureVector x;
  std::string site_id;
  int y = 0;  // +1 fake, -1 real
};

struct SupportVector {
  FeatureVector x;
  MetaFeatures phi;  // leave-site-out meta-features from training
  int y = 0;
  double alpha = 0.0;
  std::size_t training_index = 0;
};

struct SvmModel {
  std::vector<SupportVector> support_vectors;
  double bias = 0.0;
  KernelSpec kernel_spec;
  TrainConfig train_config;
  std::uint64_t catalog_fingerprint = 0;
  ReferenceSets reference_sets;

  // Diagnostics, not part of the decision function.
  std::size_t iterations = 0;
  bool converged = false;
  bool degenerate = false;  // the kernel expansion is flat (all |f - b| <= kkt_tol)
  double min_gram_eigenvalue = 0.0;
};

struct TrainResult {
  SvmModel model;
  Eigen::MatrixXd gram;
  std::vector<MetaFeatures> phis;  // per training page
};

/// Trains a soft-margin SVM with the composite kernel. Throws
/// InvalidArgument for single-class input and DataError if the Gram matrix
/// has an eigenvalue below -1e-6.
TrainResult train(std::span<const TrainingPage> pages, const ReferenceSets& refs,
                  const KernelSpec& kspec, const TrainConfig& cfg);

/// f(x) = sum_i alpha_i y_i K(s_i, x) + b; positive means fake. The page's
/// meta-features are taken against the full reference sets.
/// Throws DataError when x was built against another catalog.
double decision_value(const SvmModel& model, const FeatureVector& x);
double decision_value(const SvmModel& model, const FeatureVector& x, const MetaFeatures& phi);

struct KktViolation {
  std::size_t index = 0;
  double alpha = 0.0;
  double margin = 0.0;  // y * f(x)
};

/// Checks the soft-margin KKT conditions of every training point:
/// a = 0 => yf >= 1 - tol, 0 < a < C => |yf - 1| <= tol, a = C => yf <= 1 + tol.
std::vector<KktViolation> kkt_report(const SvmModel& model, std::span<const TrainingPage> pages,
                                     const Eigen::MatrixXd& gram, double tol);

}  // namespace kernelguard
