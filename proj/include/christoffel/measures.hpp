#pragma once

#include <Eigen/Core>
#include <map>
#include <memory>
#include <mutex>
#include <random>
#include <string>
#include <vector>

#include "christoffel/multi_index.hpp"

namespace christoffel {

// Axis-aligned box given by per-axis bounds lo[i] <= hi[i].
struct AxisBox {
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;

  AxisBox() = default;
  AxisBox(Eigen::VectorXd lo_, Eigen::VectorXd hi_);
  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
};

// Weighted point cloud backing an empirical measure. An empty weight
// vector means uniform weights 1/m (kept implicit so the m-fold sum
// stays exact). Explicit weights must be nonnegative and sum to 1
// within 1e-12.
struct SampleCloud {
  Eigen::MatrixXd points;        // m x d
  std::vector<double> weights;   // empty => uniform 1/m

  explicit SampleCloud(Eigen::MatrixXd pts, std::vector<double> w = {});
  Eigen::Index count() const { return points.rows(); }
  int dim() const { return static_cast<int>(points.cols()); }
  double weight(Eigen::Index j) const {
    return weights.empty() ? 1.0 / static_cast<double>(points.rows())
                           : weights[static_cast<std::size_t>(j)];
  }
};

class MomentProvider;
using MomentProviderPtr = std::shared_ptr<const MomentProvider>;

// Source of the moments mu_a = int x^a dmu. Analytic kinds use closed
// forms, the empirical kind sums over a SampleCloud. Computed moments
// are memoized per exponent vector, so equal exponents always yield the
// same double; the cache is guarded for concurrent readers.
class MomentProvider : public std::enable_shared_from_this<MomentProvider> {
 public:
  virtual ~MomentProvider() = default;

  virtual int dim() const = 0;
  virtual std::string kind() const = 0;
  virtual bool is_empirical() const { return false; }
  // Smallest axis box known to carry the measure.
  virtual AxisBox bounding_box() const = 0;

  double total_mass() const;
  double moment(const MultiIndex& alpha) const;

  // Provider for the pushforward of this measure under T(x) = (x - shift)/scale.
  virtual MomentProviderPtr pushforward(const Eigen::VectorXd& shift, double scale) const;

  // One draw from the measure normalized to a probability distribution.
  // Throws ConfigError for kinds that cannot be sampled.
  virtual Eigen::VectorXd sample(std::mt19937_64& rng) const;

 protected:
  virtual double moment_impl(const MultiIndex& alpha) const = 0;

 private:
  mutable std::mutex cache_mutex_;
  mutable std::map<std::vector<int>, double> cache_;
};

// Lebesgue measure on an axis box, optionally rescaled to a prescribed
// total mass (the density is then mass/vol, constant on the box).
class LebesgueBoxProvider : public MomentProvider {
 public:
  explicit LebesgueBoxProvider(AxisBox box);
  LebesgueBoxProvider(AxisBox box, double mass);

  int dim() const override { return box_.dim(); }
  std::string kind() const override { return "lebesgue-box"; }
  AxisBox bounding_box() const override { return box_; }
  double mass() const { return mass_; }
  double density_value() const { return mass_ / box_.volume(); }

  MomentProviderPtr pushforward(const Eigen::VectorXd& shift, double scale) const override;
  Eigen::VectorXd sample(std::mt19937_64& rng) const override;

 protected:
  double moment_impl(const MultiIndex& alpha) const override;

 private:
  AxisBox box_;
  double mass_;
};

// dmu = dx / sqrt(1 - x^2) on [-1, 1] (total mass pi). Moments are
// pi * C(k, k/2) / 2^k for even k and 0 for odd k.
class Chebyshev1dProvider : public MomentProvider {
 public:
  Chebyshev1dProvider() = default;

  int dim() const override { return 1; }
  std::string kind() const override { return "chebyshev-1d"; }
  AxisBox bounding_box() const override;

  MomentProviderPtr pushforward(const Eigen::VectorXd& shift, double scale) const override;
  Eigen::VectorXd sample(std::mt19937_64& rng) const override;

 protected:
  double moment_impl(const MultiIndex& alpha) const override;
};

// Tensor product of independent factors; moments multiply across the
// factors' coordinate slices.
class ProductProvider : public MomentProvider {
 public:
  explicit ProductProvider(std::vector<MomentProviderPtr> factors);

  int dim() const override { return dim_; }
  std::string kind() const override { return "product"; }
  AxisBox bounding_box() const override;
  const std::vector<MomentProviderPtr>& factors() const { return factors_; }

  MomentProviderPtr pushforward(const Eigen::VectorXd& shift, double scale) const override;
  Eigen::VectorXd sample(std::mt19937_64& rng) const override;

 protected:
  double moment_impl(const MultiIndex& alpha) const override;

 private:
  std::vector<MomentProviderPtr> factors_;
  int dim_ = 0;
};

// Empirical measure of a sample cloud: moment(a) = sum_j w_j x_j^a.
class EmpiricalProvider : public MomentProvider {
 public:
  explicit EmpiricalProvider(SampleCloud cloud);

  int dim() const override { return cloud_.dim(); }
  std::string kind() const override { return "empirical"; }
  bool is_empirical() const override { return true; }
  AxisBox bounding_box() const override;
  const SampleCloud& cloud() const { return cloud_; }

  MomentProviderPtr pushforward(const Eigen::VectorXd& shift, double scale) const override;

 protected:
  double moment_impl(const MultiIndex& alpha) const override;

 private:
  SampleCloud cloud_;
};

// Moment matrix M(a, b) = mu_{a+b} over an index set. Entries with equal
// a+b are bit-identical (each distinct moment is computed once).
struct MomentMatrix {
  IndexSet index_set;
  Eigen::MatrixXd values;
};

MomentMatrix moment_matrix(const MomentProvider& provider, const IndexSet& set);

}  // namespace christoffel
