#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "fluxanneal/errors.hpp"
#include "fluxanneal/rng.hpp"

namespace fluxanneal {

/// Spin configuration, entries exactly +1 or -1.
using SpinConfig = std::vector<std::int8_t>;

/// One symmetric coupling J[i][j] with i < j.
struct Triplet {
  int i;
  int j;
  double value;
};

/// Small dense symmetric matrix helper used by the instance generators and
/// the MAX-CUT mapping.
struct DenseMatrix {
  int n = 0;
  std::vector<double> a;  // row-major n*n

  DenseMatrix() = default;
  explicit DenseMatrix(int size) : n(size), a(static_cast<std::size_t>(size) * size, 0.0) {}

  double& operator()(int i, int j) { return a[static_cast<std::size_t>(i) * n + j]; }
  double operator()(int i, int j) const { return a[static_cast<std::size_t>(i) * n + j]; }
};

/// Ising model with symmetric couplings J (zero diagonal) and fields h:
///
///   E(s) = 1/2 sum_{i != j} J[i][j] s_i s_j + sum_i h_i s_i
///
/// Storage is picked by size: dense row-major up to kDenseThreshold sites,
/// compressed sparse rows above. Both backends satisfy the same evaluation
/// contract and iterate couplings in (i < j) lexicographic order, so file
/// output and energy sums are bit-stable regardless of backend.
/// Problems are immutable after construction and safe to share across threads.
class IsingProblem {
 public:
  static constexpr int kDenseThreshold = 4096;

  IsingProblem(int n_sites, std::vector<Triplet> couplings, std::vector<double> fields)
      : n_(n_sites) {
    // n_sites == 0 is the legal degenerate case produced by an all-frozen
    // reduction; its energy is identically zero.
    if (n_sites < 0) throw ContractViolation("IsingProblem: n_sites must be non-negative");
    if (fields.empty()) fields.assign(static_cast<std::size_t>(n_sites), 0.0);
    if (static_cast<int>(fields.size()) != n_sites)
      throw ContractViolation("IsingProblem: fields length != n_sites");
    for (double h : fields)
      if (!std::isfinite(h)) throw ContractViolation("IsingProblem: non-finite field");
    fields_ = std::move(fields);

    for (auto& t : couplings) {
      if (t.i == t.j) throw ContractViolation("IsingProblem: diagonal coupling J[i][i] != 0");
      if (t.i < 0 || t.j < 0 || t.i >= n_sites || t.j >= n_sites)
        throw ContractViolation("IsingProblem: coupling index out of range");
      if (!std::isfinite(t.value)) throw ContractViolation("IsingProblem: non-finite coupling");
      if (t.i > t.j) std::swap(t.i, t.j);
    }
    std::sort(couplings.begin(), couplings.end(), [](const Triplet& a, const Triplet& b) {
      return a.i != b.i ? a.i < b.i : a.j < b.j;
    });
    for (std::size_t k = 1; k < couplings.size(); ++k)
      if (couplings[k].i == couplings[k - 1].i && couplings[k].j == couplings[k - 1].j)
        throw ContractViolation("IsingProblem: duplicate coupling entry");

    if (n_ > 0 && n_ <= kDenseThreshold) {
      dense_.assign(static_cast<std::size_t>(n_) * n_, 0.0);
      for (const auto& t : couplings) {
        dense_[static_cast<std::size_t>(t.i) * n_ + t.j] = t.value;
        dense_[static_cast<std::size_t>(t.j) * n_ + t.i] = t.value;
      }
      pair_count_ = 0;
      for (const auto& t : couplings)
        if (t.value != 0.0) ++pair_count_;
    } else {
      build_csr(couplings);
    }
  }

  /// Builds from a full symmetric matrix; asymmetry or a nonzero diagonal is
  /// a contract violation.
  static IsingProblem from_dense(const DenseMatrix& j, std::vector<double> fields = {}) {
    check_symmetric(j);
    std::vector<Triplet> triplets;
    for (int i = 0; i < j.n; ++i)
      for (int k = i + 1; k < j.n; ++k)
        if (j(i, k) != 0.0) triplets.push_back({i, k, j(i, k)});
    return IsingProblem(j.n, std::move(triplets), std::move(fields));
  }

  int n_sites() const { return n_; }
  const std::vector<double>& fields() const { return fields_; }
  double field(int i) const { return fields_[static_cast<std::size_t>(i)]; }
  bool is_dense() const { return !dense_.empty(); }

  /// Number of stored nonzero unordered pairs.
  std::size_t coupling_count() const { return pair_count_; }

  double coupling(int i, int j) const {
    if (i == j) return 0.0;
    if (is_dense()) return dense_[static_cast<std::size_t>(i) * n_ + j];
    auto first = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    auto last = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return 0.0;
    return val_[static_cast<std::size_t>(it - col_.begin())];
  }

  /// Visits nonzero couplings as (i, j, value) with i < j, lexicographic.
  template <typename F>
  void for_each_coupling(F&& f) const {
    if (is_dense()) {
      for (int i = 0; i < n_; ++i) {
        const double* row = dense_.data() + static_cast<std::size_t>(i) * n_;
        for (int j = i + 1; j < n_; ++j)
          if (row[j] != 0.0) f(i, j, row[j]);
      }
    } else {
      for (int i = 0; i < n_; ++i)
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
          if (col_[k] > i) f(i, col_[k], val_[k]);
    }
  }

  std::vector<Triplet> upper_triplets() const {
    std::vector<Triplet> out;
    out.reserve(pair_count_);
    for_each_coupling([&](int i, int j, double v) { out.push_back({i, j, v}); });
    return out;
  }

  /// out[i] = sum_j J[i][j] x[j]; rows [row_begin, row_end) only.
  /// The dot products accumulate in eight fixed interleaved chains: the
  /// summation order is part of the determinism contract, and the independent
  /// chains keep the hot loop off the serial-addition latency wall.
  void multiply_rows(const double* x, double* out, int row_begin, int row_end) const {
    if (is_dense()) {
      for (int i = row_begin; i < row_end; ++i) {
        const double* row = dense_.data() + static_cast<std::size_t>(i) * n_;
        out[i] = dot_chains(row, x, n_);
      }
    } else {
      for (int i = row_begin; i < row_end; ++i) {
        double acc[4] = {0.0, 0.0, 0.0, 0.0};
        std::size_t k = row_ptr_[i];
        const std::size_t end = row_ptr_[i + 1];
        for (; k + 4 <= end; k += 4) {
          acc[0] += val_[k] * x[col_[k]];
          acc[1] += val_[k + 1] * x[col_[k + 1]];
          acc[2] += val_[k + 2] * x[col_[k + 2]];
          acc[3] += val_[k + 3] * x[col_[k + 3]];
        }
        double tail = 0.0;
        for (; k < end; ++k) tail += val_[k] * x[col_[k]];
        out[i] = ((acc[0] + acc[1]) + (acc[2] + acc[3])) + tail;
      }
    }
  }

  void multiply(const std::vector<double>& x, std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(n_));
    multiply_rows(x.data(), out.data(), 0, n_);
  }

  /// out[j] += scale * J[k][j] for all j; the incremental local-field update
  /// after flipping spin k.
  void add_scaled_row(int k, double scale, std::vector<double>& out) const {
    if (is_dense()) {
      const double* row = dense_.data() + static_cast<std::size_t>(k) * n_;
      for (int j = 0; j < n_; ++j) out[j] += scale * row[j];
    } else {
      for (std::size_t idx = row_ptr_[k]; idx < row_ptr_[k + 1]; ++idx)
        out[col_[idx]] += scale * val_[idx];
    }
  }

 private:
  static double dot_chains(const double* a, const double* b, int n) {
    double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
    double s4 = 0.0, s5 = 0.0, s6 = 0.0, s7 = 0.0;
    int k = 0;
    for (; k + 8 <= n; k += 8) {
      s0 += a[k] * b[k];
      s1 += a[k + 1] * b[k + 1];
      s2 += a[k + 2] * b[k + 2];
      s3 += a[k + 3] * b[k + 3];
      s4 += a[k + 4] * b[k + 4];
      s5 += a[k + 5] * b[k + 5];
      s6 += a[k + 6] * b[k + 6];
      s7 += a[k + 7] * b[k + 7];
    }
    double tail = 0.0;
    for (; k < n; ++k) tail += a[k] * b[k];
    return (((s0 + s1) + (s2 + s3)) + ((s4 + s5) + (s6 + s7))) + tail;
  }

  static void check_symmetric(const DenseMatrix& j) {
    for (int i = 0; i < j.n; ++i) {
      if (j(i, i) != 0.0) throw ContractViolation("matrix has nonzero diagonal");
      for (int k = i + 1; k < j.n; ++k)
        if (j(i, k) != j(k, i)) throw ContractViolation("matrix is not symmetric");
    }
  }

  void build_csr(const std::vector<Triplet>& upper) {
    pair_count_ = 0;
    std::vector<std::size_t> degree(static_cast<std::size_t>(n_), 0);
    for (const auto& t : upper) {
      if (t.value == 0.0) continue;
      ++pair_count_;
      ++degree[t.i];
      ++degree[t.j];
    }
    row_ptr_.assign(static_cast<std::size_t>(n_) + 1, 0);
    for (int i = 0; i < n_; ++i) row_ptr_[i + 1] = row_ptr_[i] + degree[i];
    col_.resize(row_ptr_[n_]);
    val_.resize(row_ptr_[n_]);
    std::vector<std::size_t> cursor(row_ptr_.begin(), row_ptr_.end() - 1);
    for (const auto& t : upper) {
      if (t.value == 0.0) continue;
      col_[cursor[t.i]] = t.j;
      val_[cursor[t.i]++] = t.value;
      col_[cursor[t.j]] = t.i;
      val_[cursor[t.j]++] = t.value;
    }
    // The lexicographic scan over upper triplets fills each row with columns
    // below i first (ascending), then columns above i (ascending), so rows
    // come out sorted without a separate pass.
  }

  int n_ = 0;
  std::vector<double> fields_;
  std::vector<double> dense_;        // n*n when dense
  std::vector<std::size_t> row_ptr_;  // CSR otherwise
  std::vector<int> col_;
  std::vector<double> val_;
  std::size_t pair_count_ = 0;
};

inline void validate_spins(const IsingProblem& problem, const SpinConfig& s) {
  if (static_cast<int>(s.size()) != problem.n_sites())
    throw ContractViolation("spin configuration length != n_sites");
  for (auto v : s)
    if (v != 1 && v != -1) throw ContractViolation("spin entries must be +1 or -1");
}

/// E(s) = 1/2 sum_{i != j} J[i][j] s_i s_j + sum_i h_i s_i.
/// Both (i,j) and (j,i) contribute to the half-sum, so each stored pair
/// enters once at full weight.
inline double energy(const IsingProblem& problem, const SpinConfig& s) {
  validate_spins(problem, s);
  double coupling_sum = 0.0;
  problem.for_each_coupling([&](int i, int j, double v) {
    coupling_sum += v * static_cast<double>(s[i] * s[j]);
  });
  double field_sum = 0.0;
  const auto& h = problem.fields();
  for (int i = 0; i < problem.n_sites(); ++i) field_sum += h[i] * static_cast<double>(s[i]);
  return coupling_sum + field_sum;
}

struct CutReport {
  double cut_value;
  double offset;
  double ising_energy;
};

struct MaxCutProblem {
  IsingProblem problem;
  double offset;  // C0 = 1/4 sum_{i != j} J[i][j]
};

/// Maps MAX-CUT edge weights onto an Ising model with J = w, h = 0.
/// The cut of any configuration is C(s) = -E(s)/2 + C0.
inline MaxCutProblem maxcut_to_ising(const DenseMatrix& weights) {
  IsingProblem problem = IsingProblem::from_dense(weights);
  double offset = 0.0;
  problem.for_each_coupling([&](int, int, double v) { offset += v; });
  offset *= 0.5;
  return {std::move(problem), offset};
}

inline double maxcut_offset(const IsingProblem& problem) {
  double offset = 0.0;
  problem.for_each_coupling([&](int, int, double v) { offset += v; });
  return 0.5 * offset;
}

inline CutReport cut_value(const IsingProblem& problem, double offset, const SpinConfig& s) {
  double e = energy(problem, s);
  return {-0.5 * e + offset, offset, e};
}

/// Complete-graph K_n weights, each w[i][j] drawn +1/-1 equiprobably.
/// The stream visits pairs in (i < j) lexicographic order.
inline DenseMatrix gen_bimodal_complete(int n, std::uint64_t seed) {
  if (n < 2) throw ContractViolation("gen_bimodal_complete: n must be >= 2");
  SplitMix64 rng(seed);
  DenseMatrix w(n);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      double v = static_cast<double>(rng.next_sign());
      w(i, j) = v;
      w(j, i) = v;
    }
  return w;
}

struct Interval {
  double lo;
  double hi;
};

/// Fully connected spin glass: J uniform on j_range (one draw per unordered
/// pair, lexicographic), h uniform on h_range (ascending site order after all
/// J draws). Draws use the half-open [lo, hi) convention.
inline IsingProblem gen_uniform_spinglass(int n, std::uint64_t seed,
                                          Interval j_range = {-1.0, 1.0},
                                          Interval h_range = {-2.0, 2.0}) {
  if (n < 2) throw ContractViolation("gen_uniform_spinglass: n must be >= 2");
  auto check = [](Interval r, const char* name) {
    if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
      throw ContractViolation(std::string("gen_uniform_spinglass: empty ") + name);
  };
  check(j_range, "j_range");
  check(h_range, "h_range");
  SplitMix64 rng(seed);
  std::vector<Triplet> triplets;
  triplets.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) triplets.push_back({i, j, rng.next_in(j_range.lo, j_range.hi)});
  std::vector<double> fields(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) fields[i] = rng.next_in(h_range.lo, h_range.hi);
  return IsingProblem(n, std::move(triplets), std::move(fields));
}

/// Same instance with every coupling negated; fields are kept.
inline IsingProblem mirror(const IsingProblem& problem) {
  std::vector<Triplet> triplets = problem.upper_triplets();
  for (auto& t : triplets) t.value = -t.value;
  return IsingProblem(problem.n_sites(), std::move(triplets), problem.fields());
}

/// Finite-size-scaling estimate of the optimal cut on a bimodal K_n:
/// C* = -E*/2 with E* = n^{3/2} (e0 + A n^{-omega}), e0 the Parisi constant.
inline double parisi_reference_cut(int n) {
  if (n < 1) throw ContractViolation("parisi_reference_cut: n must be >= 1");
  constexpr double e0 = -0.7631667265;
  constexpr double omega = 2.0 / 3.0;
  constexpr double amplitude = 0.70;
  double nn = static_cast<double>(n);
  double e_star = std::pow(nn, 1.5) * (e0 + amplitude * std::pow(nn, -omega));
  return -0.5 * e_star;
}

}  // namespace fluxanneal
