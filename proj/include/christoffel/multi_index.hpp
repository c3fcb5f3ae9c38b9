#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <map>
#include <vector>

namespace christoffel {

// Exponent vector of a d-variate monomial, x^a = prod_i x_i^{a[i]}.
struct MultiIndex {
  std::vector<int> exponents;

  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : exponents(std::move(e)) {}

  int dim() const { return static_cast<int>(exponents.size()); }
  int degree() const;
  int operator[](int i) const { return exponents[static_cast<std::size_t>(i)]; }

  friend bool operator==(const MultiIndex& a, const MultiIndex& b) {
    return a.exponents == b.exponents;
  }
};

MultiIndex operator+(const MultiIndex& a, const MultiIndex& b);

// All exponent vectors of total degree <= n in d variables, ordered
// graded-lexicographically: ascending total degree, and within a degree
// block lexicographically with the leading variable first, so that for
// d=2, n=2 the order is (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
// Cardinality is C(d+n, d).
class IndexSet {
 public:
  static IndexSet enumerate(int dim, int degree);

  int dim() const { return dim_; }
  int degree() const { return degree_; }
  std::size_t size() const { return entries_.size(); }
  const std::vector<MultiIndex>& entries() const { return entries_; }
  const MultiIndex& operator[](std::size_t k) const { return entries_[k]; }

  // Row index of an exponent vector; throws std::out_of_range if absent.
  std::size_t position(const MultiIndex& alpha) const;
  bool contains(const MultiIndex& alpha) const;

 private:
  IndexSet(int dim, int degree);

  int dim_ = 0;
  int degree_ = 0;
  std::vector<MultiIndex> entries_;
  std::map<std::vector<int>, std::size_t> positions_;
  // entry k (k > 0) equals entry parent_[k] with exponent axis_[k] bumped;
  // lets monomial evaluation run with one multiply per entry.
  std::vector<std::size_t> parent_;
  std::vector<int> axis_;

  friend Eigen::VectorXd monomial_vector(const IndexSet&, const Eigen::VectorXd&);
};

// Vector (x^a)_{a in set}, in the set's order. Entry for a=0 is exactly 1.
Eigen::VectorXd monomial_vector(const IndexSet& set, const Eigen::VectorXd& x);

// C(n+d, d) without overflow for the sizes used here.
std::size_t simplex_cardinality(int dim, int degree);

}  // namespace christoffel
