#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <vector>

#include "fluxanneal/errors.hpp"
#include "fluxanneal/ising.hpp"

namespace fluxanneal {

/// Sign projection with the documented tie-break sgn(0) := +1.
inline std::int8_t spin_sign(double x) { return x < 0.0 ? std::int8_t{-1} : std::int8_t{1}; }

/// Sites sorted by ascending |phibar(tau=1)|: the first n_ambivalent entries
/// of `order` stay undecided, the rest are frozen to sgn(phibar).
struct Partition {
  std::vector<int> order;            // permutation of 0..N-1, ascending |phibar|
  int n_ambivalent = 0;
  std::vector<std::int8_t> frozen_sign;  // per site; 0 marks an ambivalent site

  int n_sites() const { return static_cast<int>(order.size()); }

  std::vector<int> ambivalent_sites() const {
    return {order.begin(), order.begin() + n_ambivalent};
  }
};

/// Reduced Ising model over the ambivalent sites. For any subproblem
/// configuration s' and its reconstruction s:
///   energy(full, s) == energy(base, s') + offset.
struct SubProblem {
  IsingProblem base;
  double offset = 0.0;
  std::vector<int> ambivalent_sites;  // subproblem index -> original site
};

/// Stable sort by |phibar| ascending, ties by ascending site index. A
/// positive tie_epsilon groups magnitudes into epsilon-wide buckets before
/// comparing, for studying near-degenerate averages; 0 compares exactly.
inline Partition make_partition(const std::vector<double>& phibar, int n_ambivalent,
                                double tie_epsilon = 0.0) {
  const int n = static_cast<int>(phibar.size());
  if (n_ambivalent < 0 || n_ambivalent > n)
    throw ContractViolation("make_partition: n_ambivalent outside [0, N]");
  if (tie_epsilon < 0.0) throw ContractViolation("make_partition: tie_epsilon must be >= 0");

  Partition part;
  part.n_ambivalent = n_ambivalent;
  part.order.resize(phibar.size());
  std::iota(part.order.begin(), part.order.end(), 0);
  auto key = [&](int site) {
    double mag = std::abs(phibar[site]);
    return tie_epsilon > 0.0 ? std::floor(mag / tie_epsilon) : mag;
  };
  std::sort(part.order.begin(), part.order.end(), [&](int a, int b) {
    double ka = key(a), kb = key(b);
    return ka != kb ? ka < kb : a < b;
  });

  part.frozen_sign.assign(phibar.size(), 0);
  for (int k = n_ambivalent; k < n; ++k) {
    int site = part.order[k];
    part.frozen_sign[site] = spin_sign(phibar[site]);
  }
  return part;
}

/// Effective subproblem over the ambivalent sites:
///   J_eff = J restricted, h_eff_i = h_i + sum_{k frozen} J[i][k] s_k,
/// plus the constant energy carried by the frozen block.
inline SubProblem build_subproblem(const IsingProblem& full, const Partition& part) {
  if (part.n_sites() != full.n_sites())
    throw ContractViolation("build_subproblem: partition size != problem size");
  const int n_sub = part.n_ambivalent;

  // Subproblem index k corresponds to the k-th site in the ambivalence
  // order, matching the sorted-index convention of the reduction.
  std::vector<int> sites = part.ambivalent_sites();
  std::vector<int> sub_index(part.order.size(), -1);
  for (int k = 0; k < n_sub; ++k) sub_index[sites[k]] = k;

  std::vector<Triplet> eff_couplings;
  std::vector<double> eff_fields(static_cast<std::size_t>(n_sub));
  for (int k = 0; k < n_sub; ++k) eff_fields[k] = full.field(sites[k]);

  double frozen_coupling = 0.0;
  full.for_each_coupling([&](int i, int j, double v) {
    std::int8_t si = part.frozen_sign[i];
    std::int8_t sj = part.frozen_sign[j];
    if (si == 0 && sj == 0) {
      eff_couplings.push_back({sub_index[i], sub_index[j], v});
    } else if (si != 0 && sj != 0) {
      frozen_coupling += v * static_cast<double>(si * sj);
    } else if (si == 0) {
      eff_fields[sub_index[i]] += v * static_cast<double>(sj);
    } else {
      eff_fields[sub_index[j]] += v * static_cast<double>(si);
    }
  });

  double frozen_field = 0.0;
  for (int site = 0; site < full.n_sites(); ++site)
    if (part.frozen_sign[site] != 0)
      frozen_field += full.field(site) * static_cast<double>(part.frozen_sign[site]);

  return {IsingProblem(n_sub, std::move(eff_couplings), std::move(eff_fields)),
          frozen_coupling + frozen_field, std::move(sites)};
}

/// Full-length configuration from frozen signs plus subproblem spins placed
/// at their original sites.
inline SpinConfig reconstruct(const Partition& part, const SubProblem& sub,
                              const SpinConfig& s_prime) {
  if (static_cast<int>(s_prime.size()) != part.n_ambivalent)
    throw ContractViolation("reconstruct: subproblem spins length != n_ambivalent");
  for (auto v : s_prime)
    if (v != 1 && v != -1) throw ContractViolation("reconstruct: spins must be +1 or -1");
  SpinConfig s(part.order.size());
  for (int site = 0; site < part.n_sites(); ++site) s[site] = part.frozen_sign[site];
  for (int k = 0; k < part.n_ambivalent; ++k) s[sub.ambivalent_sites[k]] = s_prime[k];
  return s;
}

/// sgn(phibar) componentwise — the "MD alone" solution; equals reconstruct
/// with an empty ambivalent set.
inline SpinConfig project_all(const std::vector<double>& phibar) {
  SpinConfig s(phibar.size());
  for (std::size_t i = 0; i < phibar.size(); ++i) s[i] = spin_sign(phibar[i]);
  return s;
}

}  // namespace fluxanneal
