#include "christoffel/measures.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "christoffel/errors.hpp"

namespace christoffel {

namespace {

double uniform01(std::mt19937_64& rng) {
  // 53-bit mantissa draw; keeps sample streams reproducible across platforms.
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

AxisBox::AxisBox(Eigen::VectorXd lo_, Eigen::VectorXd hi_)
    : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size()) throw DimensionMismatch("AxisBox: bound dimensions differ");
  if (lo.size() == 0) throw std::invalid_argument("AxisBox: empty bounds");
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || lo[i] >= hi[i]) {
      throw std::invalid_argument("AxisBox: requires finite lo < hi per axis");
    }
  }
}

double AxisBox::volume() const {
  double v = 1.0;
  for (Eigen::Index i = 0; i < lo.size(); ++i) v *= hi[i] - lo[i];
  return v;
}

SampleCloud::SampleCloud(Eigen::MatrixXd pts, std::vector<double> w)
    : points(std::move(pts)), weights(std::move(w)) {
  if (points.rows() < 1) throw std::invalid_argument("SampleCloud: needs at least one point");
  if (points.cols() < 1) throw std::invalid_argument("SampleCloud: needs at least one column");
  if (!points.allFinite()) throw std::invalid_argument("SampleCloud: non-finite coordinate");
  if (!weights.empty()) {
    if (static_cast<Eigen::Index>(weights.size()) != points.rows()) {
      throw DimensionMismatch("SampleCloud: weight count does not match point count");
    }
    double sum = 0.0, comp = 0.0;  // Kahan, so the tolerance below is meaningful
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0) {
        throw std::invalid_argument("SampleCloud: weights must be finite and >= 0");
      }
      double y = w - comp;
      double t = sum + y;
      comp = (t - sum) - y;
      sum = t;
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw std::invalid_argument("SampleCloud: weights must sum to 1 (within 1e-12)");
    }
  }
}

double MomentProvider::total_mass() const {
  return moment(MultiIndex(std::vector<int>(static_cast<std::size_t>(dim()), 0)));
}

double MomentProvider::moment(const MultiIndex& alpha) const {
  if (alpha.dim() != dim()) throw DimensionMismatch("moment: index dimension mismatch");
  for (int e : alpha.exponents) {
    if (e < 0) throw std::invalid_argument("moment: negative exponent");
  }
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(alpha.exponents);
    if (it != cache_.end()) return it->second;
  }
  double value = moment_impl(alpha);
  std::lock_guard<std::mutex> lock(cache_mutex_);
  auto [it, inserted] = cache_.emplace(alpha.exponents, value);
  return it->second;
}

Eigen::VectorXd MomentProvider::sample(std::mt19937_64&) const {
  throw ConfigError("measure kind '" + kind() + "' does not support sampling");
}

// ---------------------------------------------------------------------------
// Generic pushforward: nu_a = int ((x - shift)/scale)^a dmu, expanded with
// the binomial theorem into base moments.

namespace {

class BinomialPushforward : public MomentProvider {
 public:
  BinomialPushforward(MomentProviderPtr base, Eigen::VectorXd shift, double scale)
      : base_(std::move(base)), shift_(std::move(shift)), scale_(scale) {}

  int dim() const override { return base_->dim(); }
  std::string kind() const override { return "pushforward(" + base_->kind() + ")"; }
  bool is_empirical() const override { return base_->is_empirical(); }

  AxisBox bounding_box() const override {
    AxisBox b = base_->bounding_box();
    return AxisBox((b.lo - shift_) / scale_, (b.hi - shift_) / scale_);
  }

  MomentProviderPtr pushforward(const Eigen::VectorXd& shift, double scale) const override {
    if (shift.size() != dim()) throw DimensionMismatch("pushforward: shift dimension mismatch");
    if (!(scale > 0.0) || !std::isfinite(scale)) {
      throw std::invalid_argument("pushforward: scale must be > 0");
    }
    // T2(T1(x)) = (x - (shift1 + scale1*shift2)) / (scale1*scale2)
    return std::make_shared<BinomialPushforward>(base_, shift_ + scale_ * shift,
                                                 scale_ * scale);
  }

  Eigen::VectorXd sample(std::mt19937_64& rng) const override {
    return (base_->sample(rng) - shift_) / scale_;
  }

 protected:
  double moment_impl(const MultiIndex& alpha) const override {
    const int d = dim();
    std::vector<int> gamma(static_cast<std::size_t>(d), 0);
    double total = 0.0;
    // Iterate gamma <= alpha componentwise.
    while (true) {
      double coeff = 1.0;
      for (int i = 0; i < d; ++i) {
        const int a = alpha[i];
        const int g = gamma[static_cast<std::size_t>(i)];
        coeff *= binomial(a, g) * std::pow(-shift_[i], a - g);
      }
      if (coeff != 0.0) {
        total += coeff * base_->moment(MultiIndex(gamma));
      }
      int i = 0;
      for (; i < d; ++i) {
        auto& g = gamma[static_cast<std::size_t>(i)];
        if (g < alpha[i]) {
          ++g;
          break;
        }
        g = 0;
      }
      if (i == d) break;
    }
    return total * std::pow(scale_, -alpha.degree());
  }

 private:
  static double binomial(int n, int k) {
    double b = 1.0;
    for (int i = 1; i <= k; ++i) b = b * static_cast<double>(n - k + i) / static_cast<double>(i);
    return b;
  }

  MomentProviderPtr base_;
  Eigen::VectorXd shift_;
  double scale_;
};

}  // namespace

MomentProviderPtr MomentProvider::pushforward(const Eigen::VectorXd& shift,
                                              double scale) const {
  if (shift.size() != dim()) throw DimensionMismatch("pushforward: shift dimension mismatch");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("pushforward: scale must be > 0");
  }
  if (weak_from_this().expired()) {
    // The generic wrapper keeps the base alive through a shared_ptr;
    // without shared ownership the wrapper would dangle.
    throw std::logic_error(
        "pushforward: provider must be held in a shared_ptr for the generic path");
  }
  return std::make_shared<BinomialPushforward>(shared_from_this(), shift, scale);
}

// ---------------------------------------------------------------------------
// Lebesgue on a box

LebesgueBoxProvider::LebesgueBoxProvider(AxisBox box)
    : box_(std::move(box)), mass_(box_.volume()) {}

LebesgueBoxProvider::LebesgueBoxProvider(AxisBox box, double mass)
    : box_(std::move(box)), mass_(mass) {
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("LebesgueBoxProvider: mass must be > 0");
  }
}

double LebesgueBoxProvider::moment_impl(const MultiIndex& alpha) const {
  double value = mass_ / box_.volume();
  for (int i = 0; i < dim(); ++i) {
    const int k = alpha[i];
    value *= (std::pow(box_.hi[i], k + 1) - std::pow(box_.lo[i], k + 1)) /
             static_cast<double>(k + 1);
  }
  return value;
}

MomentProviderPtr LebesgueBoxProvider::pushforward(const Eigen::VectorXd& shift,
                                                   double scale) const {
  if (shift.size() != dim()) throw DimensionMismatch("pushforward: shift dimension mismatch");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("pushforward: scale must be > 0");
  }
  AxisBox moved((box_.lo - shift) / scale, (box_.hi - shift) / scale);
  return std::make_shared<LebesgueBoxProvider>(std::move(moved), mass_);
}

Eigen::VectorXd LebesgueBoxProvider::sample(std::mt19937_64& rng) const {
  Eigen::VectorXd x(dim());
  for (int i = 0; i < dim(); ++i) {
    x[i] = box_.lo[i] + (box_.hi[i] - box_.lo[i]) * uniform01(rng);
  }
  return x;
}

// ---------------------------------------------------------------------------
// Chebyshev weight on [-1, 1]

AxisBox Chebyshev1dProvider::bounding_box() const {
  Eigen::VectorXd lo(1), hi(1);
  lo[0] = -1.0;
  hi[0] = 1.0;
  return AxisBox(lo, hi);
}

double Chebyshev1dProvider::moment_impl(const MultiIndex& alpha) const {
  const int k = alpha[0];
  if (k % 2 == 1) return 0.0;
  long double b = 1.0L;  // C(k, k/2), exact up to the degrees in range here
  for (int i = 1; i <= k / 2; ++i) {
    b = b * static_cast<long double>(k / 2 + i) / static_cast<long double>(i);
  }
  return static_cast<double>(std::numbers::pi_v<long double> * b /
                             std::pow(2.0L, static_cast<long double>(k)));
}

MomentProviderPtr Chebyshev1dProvider::pushforward(const Eigen::VectorXd& shift,
                                                   double scale) const {
  if (shift.size() != 1) throw DimensionMismatch("pushforward: shift dimension mismatch");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("pushforward: scale must be > 0");
  }
  // Stateless provider: wrap a fresh instance, so the call also works on
  // instances that are not shared-owned.
  return std::make_shared<BinomialPushforward>(std::make_shared<Chebyshev1dProvider>(),
                                               shift, scale);
}

Eigen::VectorXd Chebyshev1dProvider::sample(std::mt19937_64& rng) const {
  Eigen::VectorXd x(1);
  x[0] = std::cos(std::numbers::pi * uniform01(rng));
  return x;
}

// ---------------------------------------------------------------------------
// Product measure

ProductProvider::ProductProvider(std::vector<MomentProviderPtr> factors)
    : factors_(std::move(factors)) {
  if (factors_.empty()) throw std::invalid_argument("ProductProvider: needs >= 1 factor");
  for (const auto& f : factors_) dim_ += f->dim();
}

double ProductProvider::moment_impl(const MultiIndex& alpha) const {
  double value = 1.0;
  int offset = 0;
  for (const auto& f : factors_) {
    std::vector<int> slice(alpha.exponents.begin() + offset,
                           alpha.exponents.begin() + offset + f->dim());
    value *= f->moment(MultiIndex(std::move(slice)));
    offset += f->dim();
  }
  return value;
}

AxisBox ProductProvider::bounding_box() const {
  Eigen::VectorXd lo(dim_), hi(dim_);
  int offset = 0;
  for (const auto& f : factors_) {
    AxisBox b = f->bounding_box();
    lo.segment(offset, f->dim()) = b.lo;
    hi.segment(offset, f->dim()) = b.hi;
    offset += f->dim();
  }
  return AxisBox(lo, hi);
}

MomentProviderPtr ProductProvider::pushforward(const Eigen::VectorXd& shift,
                                               double scale) const {
  if (shift.size() != dim()) throw DimensionMismatch("pushforward: shift dimension mismatch");
  std::vector<MomentProviderPtr> moved;
  moved.reserve(factors_.size());
  int offset = 0;
  for (const auto& f : factors_) {
    moved.push_back(f->pushforward(shift.segment(offset, f->dim()), scale));
    offset += f->dim();
  }
  return std::make_shared<ProductProvider>(std::move(moved));
}

Eigen::VectorXd ProductProvider::sample(std::mt19937_64& rng) const {
  Eigen::VectorXd x(dim_);
  int offset = 0;
  for (const auto& f : factors_) {
    x.segment(offset, f->dim()) = f->sample(rng);
    offset += f->dim();
  }
  return x;
}

// ---------------------------------------------------------------------------
// Empirical measure

EmpiricalProvider::EmpiricalProvider(SampleCloud cloud) : cloud_(std::move(cloud)) {}

double EmpiricalProvider::moment_impl(const MultiIndex& alpha) const {
  const Eigen::Index m = cloud_.count();
  const bool uniform = cloud_.weights.empty();
  double sum = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    double term = 1.0;
    for (int i = 0; i < dim(); ++i) {
      const int k = alpha[i];
      if (k > 0) term *= std::pow(cloud_.points(j, i), k);
    }
    sum += uniform ? term : cloud_.weights[static_cast<std::size_t>(j)] * term;
  }
  return uniform ? sum / static_cast<double>(m) : sum;
}

AxisBox EmpiricalProvider::bounding_box() const {
  Eigen::VectorXd lo = cloud_.points.colwise().minCoeff();
  Eigen::VectorXd hi = cloud_.points.colwise().maxCoeff();
  for (Eigen::Index i = 0; i < lo.size(); ++i) {
    if (lo[i] == hi[i]) {  // degenerate axis; widen so AxisBox stays valid
      lo[i] -= 0.5;
      hi[i] += 0.5;
    }
  }
  return AxisBox(lo, hi);
}

MomentProviderPtr EmpiricalProvider::pushforward(const Eigen::VectorXd& shift,
                                                 double scale) const {
  if (shift.size() != dim()) throw DimensionMismatch("pushforward: shift dimension mismatch");
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw std::invalid_argument("pushforward: scale must be > 0");
  }
  Eigen::MatrixXd pts = (cloud_.points.rowwise() - shift.transpose()) / scale;
  return std::make_shared<EmpiricalProvider>(SampleCloud(std::move(pts), cloud_.weights));
}

// ---------------------------------------------------------------------------

MomentMatrix moment_matrix(const MomentProvider& provider, const IndexSet& set) {
  if (provider.dim() != set.dim()) {
    throw DimensionMismatch("moment_matrix: provider/index set dimension mismatch");
  }
  const auto s = static_cast<Eigen::Index>(set.size());
  Eigen::MatrixXd values(s, s);
  for (Eigen::Index j = 0; j < s; ++j) {
    for (Eigen::Index k = j; k < s; ++k) {
      const double m = provider.moment(set[static_cast<std::size_t>(j)] +
                                       set[static_cast<std::size_t>(k)]);
      values(j, k) = m;
      values(k, j) = m;
    }
  }
  return MomentMatrix{set, std::move(values)};
}

}  // namespace christoffel
