#include "kernelguard/svm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "kernelguard/error.hpp"
#include "kernelguard/rng.hpp"

namespace kernelguard {
namespace {

constexpr double kTau = 1e-12;  // floor for a non-positive pair curvature
constexpr double kGramEigenFloor = -1e-6;

struct WorkingPair {
  std::ptrdiff_t i = -1;  // argmax over I_up of -y G
  std::ptrdiff_t j = -1;  // argmin over I_low of -y G
  double gmax = -std::numeric_limits<double>::infinity();
  double gmin = std::numeric_limits<double>::infinity();
  double gap() const { return gmax - gmin; }
};

class Smo {
 public:
  Smo(const Eigen::MatrixXd& gram, std::span<const int> y, const TrainConfig& cfg)
      : k_(gram), y_(y), c_(cfg.C), n_(y.size()), alpha_(n_, 0.0), grad_(n_, -1.0), order_(n_) {
    std::iota(order_.begin(), order_.end(), std::size_t{0});
    Rng rng(cfg.seed);
    rng.shuffle(order_);
  }

  DualSolution run(const TrainConfig& cfg) {
    const double stop = 0.5 * cfg.kkt_tol;
    const std::size_t max_iter =
        static_cast<std::size_t>(std::max(cfg.max_passes, 1)) * std::max<std::size_t>(n_, 100);
    DualSolution out;
    while (true) {
      auto pair = select();
      if (pair.i < 0 || pair.j < 0 || pair.gap() < stop) {
        // Confirm on an exactly recomputed gradient before stopping.
        recompute_gradient();
        pair = select();
        if (pair.i < 0 || pair.j < 0 || pair.gap() < stop) {
          out.converged = true;
          break;
        }
      }
      if (out.iterations >= max_iter) break;
      update(static_cast<std::size_t>(std::min(pair.i, pair.j)),
             static_cast<std::size_t>(std::max(pair.i, pair.j)));
      ++out.iterations;
    }
    recompute_gradient();
    out.bias = bias();
    out.alpha = alpha_;
    double objective = 0.0;
    for (std::size_t t = 0; t < n_; ++t) objective += alpha_[t] * (1.0 - grad_[t]);
    out.objective = 0.5 * objective;
    return out;
  }

 private:
  double q(std::size_t a, std::size_t b) const {
    return static_cast<double>(y_[a] * y_[b]) * k_(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b));
  }
  bool in_up(std::size_t t) const { return y_[t] > 0 ? alpha_[t] < c_ : alpha_[t] > 0.0; }
  bool in_low(std::size_t t) const { return y_[t] > 0 ? alpha_[t] > 0.0 : alpha_[t] < c_; }
  double score(std::size_t t) const { return -static_cast<double>(y_[t]) * grad_[t]; }

  WorkingPair select() const {
    WorkingPair pair;
    for (std::size_t t : order_) {
      const double s = score(t);
      if (in_up(t) && s > pair.gmax) {
        pair.gmax = s;
        pair.i = static_cast<std::ptrdiff_t>(t);
      }
      if (in_low(t) && s < pair.gmin) {
        pair.gmin = s;
        pair.j = static_cast<std::ptrdiff_t>(t);
      }
    }
    return pair;
  }

  // Analytic optimum of the two-variable subproblem, clipped to the box.
  // Called with a < b so the arithmetic does not depend on which of the
  // two indices was the "up" violator.
  void update(std::size_t a, std::size_t b) {
    const double old_a = alpha_[a];
    const double old_b = alpha_[b];
    double& alpha_a = alpha_[a];
    double& alpha_b = alpha_[b];
    if (y_[a] != y_[b]) {
      double quad = q(a, a) + q(b, b) + 2.0 * q(a, b);
      if (quad <= 0.0) quad = kTau;
      const double delta = (-grad_[a] - grad_[b]) / quad;
      const double diff = alpha_a - alpha_b;
      alpha_a += delta;
      alpha_b += delta;
      if (diff > 0.0) {
        if (alpha_b < 0.0) {
          alpha_b = 0.0;
          alpha_a = diff;
        }
      } else if (alpha_a < 0.0) {
        alpha_a = 0.0;
        alpha_b = -diff;
      }
      if (diff > 0.0) {
        if (alpha_a > c_) {
          alpha_a = c_;
          alpha_b = c_ - diff;
        }
      } else if (alpha_b > c_) {
        alpha_b = c_;
        alpha_a = c_ + diff;
      }
    } else {
      double quad = q(a, a) + q(b, b) - 2.0 * q(a, b);
      if (quad <= 0.0) quad = kTau;
      const double delta = (grad_[a] - grad_[b]) / quad;
      const double sum = alpha_a + alpha_b;
      alpha_a -= delta;
      alpha_b += delta;
      if (sum > c_) {
        if (alpha_a > c_) {
          alpha_a = c_;
          alpha_b = sum - c_;
        }
      } else if (alpha_b < 0.0) {
        alpha_b = 0.0;
        alpha_a = sum;
      }
      if (sum > c_) {
        if (alpha_b > c_) {
          alpha_b = c_;
          alpha_a = sum - c_;
        }
      } else if (alpha_a < 0.0) {
        alpha_a = 0.0;
        alpha_b = sum;
      }
    }
    const double da = alpha_a - old_a;
    const double db = alpha_b - old_b;
    for (std::size_t t = 0; t < n_; ++t) grad_[t] += q(t, a) * da + q(t, b) * db;
  }

  void recompute_gradient() {
    for (std::size_t t = 0; t < n_; ++t) {
      double g = -1.0;
      for (std::size_t s = 0; s < n_; ++s) {
        if (alpha_[s] != 0.0) g += q(t, s) * alpha_[s];
      }
      grad_[t] = g;
    }
  }

  // Mean of y_i - sum_j a_j y_j K_ij over free vectors; midpoint of the
  // feasible interval when every multiplier sits at a bound.
  double bias() const {
    double sum = 0.0;
    std::size_t free = 0;
    for (std::size_t t = 0; t < n_; ++t) {
      if (alpha_[t] > 0.0 && alpha_[t] < c_) {
        sum += score(t);
        ++free;
      }
    }
    if (free > 0) return sum / static_cast<double>(free);
    const auto pair = select();
    const double hi = pair.i >= 0 ? pair.gmax : pair.gmin;
    const double lo = pair.j >= 0 ? pair.gmin : pair.gmax;
    return 0.5 * (hi + lo);
  }

  const Eigen::MatrixXd& k_;
  std::span<const int> y_;
  double c_;
  std::size_t n_;
  std::vector<double> alpha_;
  std::vector<double> grad_;
  std::vector<std::size_t> order_;
};

void check_problem(const Eigen::MatrixXd& gram, std::span<const int> y) {
  if (gram.rows() != gram.cols() || static_cast<std::size_t>(gram.rows()) != y.size()) {
    throw InvalidArgument("gram matrix and label vector sizes differ");
  }
  bool pos = false, neg = false;
  for (int label : y) {
    if (label == 1) pos = true;
    else if (label == -1) neg = true;
    else throw InvalidArgument("labels must be -1 or +1");
  }
  if (!pos || !neg) throw InvalidArgument("training data must contain both classes");
}

std::vector<MetaFeatures> page_phis(std::span<const TrainingPage> pages, const ReferenceSets& refs,
                                    const KernelSpec& kspec) {
  if (kspec.theta_meta == 0.0) return std::vector<MetaFeatures>(pages.size());
  std::vector<MetaFeatures> phis;
  phis.reserve(pages.size());
  for (const auto& page : pages) phis.push_back(meta_features(page.x, refs, kspec, page.site_id));
  return phis;
}

}  // namespace

void TrainConfig::validate() const {
  if (!(C > 0.0) || !std::isfinite(C)) throw InvalidArgument("C must be a positive finite number");
  if (!(kkt_tol > 0.0)) throw InvalidArgument("kkt_tol must be positive");
  if (max_passes < 1) throw InvalidArgument("max_passes must be >= 1");
}

double require_psd(const Eigen::MatrixXd& gram) {
  const double min_eig = min_eigenvalue(gram);
  if (min_eig < kGramEigenFloor) {
    throw DataError("gram matrix is not positive semidefinite (min eigenvalue " + std::to_string(min_eig) + ")");
  }
  return min_eig;
}

double dual_objective(const Eigen::MatrixXd& gram, std::span<const int> y, std::span<const double> alpha) {
  const auto n = y.size();
  double linear = 0.0, quadratic = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    linear += alpha[i];
    for (std::size_t j = 0; j < n; ++j) {
      quadratic += alpha[i] * alpha[j] * y[i] * y[j] *
                   gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }
  }
  return linear - 0.5 * quadratic;
}

DualSolution solve_dual(const Eigen::MatrixXd& gram, std::span<const int> y, const TrainConfig& cfg) {
  cfg.validate();
  check_problem(gram, y);
  return Smo(gram, y, cfg).run(cfg);
}

TrainResult train(std::span<const TrainingPage> pages, const ReferenceSets& refs, const KernelSpec& kspec,
                  const TrainConfig& cfg) {
  cfg.validate();
  kspec.validate();
  if (pages.empty()) throw InvalidArgument("no training pages");
  const auto fingerprint = pages.front().x.catalog_fingerprint;
  std::vector<FeatureVector> xs;
  std::vector<int> y;
  xs.reserve(pages.size());
  y.reserve(pages.size());
  for (const auto& page : pages) {
    if (page.x.catalog_fingerprint != fingerprint) {
      throw DataError("training pages were vectorized against different catalogs");
    }
    xs.push_back(page.x);
    y.push_back(page.y);
  }

  TrainResult result;
  result.phis = page_phis(pages, refs, kspec);
  result.gram = gram_matrix(xs, result.phis, kspec);
  check_problem(result.gram, y);
  const double min_eig = require_psd(result.gram);

  const DualSolution dual = Smo(result.gram, y, cfg).run(cfg);

  SvmModel& model = result.model;
  model.bias = dual.bias;
  model.kernel_spec = kspec;
  model.train_config = cfg;
  model.catalog_fingerprint = fingerprint;
  model.reference_sets = refs;
  model.iterations = dual.iterations;
  model.converged = dual.converged;
  model.min_gram_eigenvalue = min_eig;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    if (dual.alpha[i] > 0.0) {
      model.support_vectors.push_back({pages[i].x, result.phis[i], pages[i].y, dual.alpha[i], i});
    }
  }
  double spread = 0.0;
  for (std::size_t t = 0; t < pages.size(); ++t) {
    double f = 0.0;
    for (const auto& sv : model.support_vectors) {
      f += sv.alpha * sv.y *
           result.gram(static_cast<Eigen::Index>(sv.training_index), static_cast<Eigen::Index>(t));
    }
    spread = std::max(spread, std::abs(f));
  }
  model.degenerate = spread <= cfg.kkt_tol;
  return result;
}

double decision_value(const SvmModel& model, const FeatureVector& x, const MetaFeatures& phi) {
  if (x.catalog_fingerprint != model.catalog_fingerprint) {
    throw DataError("feature vector was built against a different catalog than the model");
  }
  double f = 0.0;
  for (const auto& sv : model.support_vectors) {
    f += sv.alpha * sv.y * composite_kernel(sv.x, x, sv.phi, phi, model.kernel_spec);
  }
  return f + model.bias;
}

double decision_value(const SvmModel& model, const FeatureVector& x) {
  const MetaFeatures phi = model.kernel_spec.theta_meta == 0.0
                               ? MetaFeatures{}
                               : meta_features(x, model.reference_sets, model.kernel_spec, std::nullopt);
  return decision_value(model, x, phi);
}

std::vector<KktViolation> kkt_report(const SvmModel& model, std::span<const TrainingPage> pages,
                                     const Eigen::MatrixXd& gram, double tol) {
  const double c = model.train_config.C;
  std::vector<double> alpha(pages.size(), 0.0);
  for (const auto& sv : model.support_vectors) alpha.at(sv.training_index) = sv.alpha;

  std::vector<KktViolation> violations;
  for (std::size_t i = 0; i < pages.size(); ++i) {
    double f = model.bias;
    for (const auto& sv : model.support_vectors) {
      f += sv.alpha * sv.y * gram(static_cast<Eigen::Index>(sv.training_index), static_cast<Eigen::Index>(i));
    }
    const double margin = pages[i].y * f;
    bool ok;
    if (alpha[i] <= 0.0) {
      ok = margin >= 1.0 - tol;
    } else if (alpha[i] >= c) {
      ok = margin <= 1.0 + tol;
    } else {
      ok = std::abs(margin - 1.0) <= tol;
    }
    if (!ok) violations.push_back({i, alpha[i], margin});
  }
  return violations;
}

}  // namespace kernelguard
