#include "xmds/evenodd.hpp"

#include <algorithm>
#include <random>
#include <stdexcept>
#include <string>

#include "linear.hpp"

namespace xmds {

CodeParams CodeParams::make(unsigned k, unsigned r, unsigned d, unsigned p,
                            unsigned e, unsigned layers) {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (r < 1) throw std::invalid_argument("r must be >= 1");
  if (!is_prime(p) || p < 3)
    throw std::invalid_argument("p must be a prime >= 3, got " + std::to_string(p));
  if (p < std::max(k, r))
    throw std::invalid_argument("p must satisfy p >= max(k, r)");
  if (e < 1 || e > p - 1)
    throw std::invalid_argument("e must satisfy 1 <= e <= p-1");
  if (d < k || d > k + r - 1)
    throw std::invalid_argument("d must satisfy k <= d <= k+r-1");
  if (layers > 0 && d < k + 1)
    throw std::invalid_argument("transformed codes require d >= k+1");
  CodeParams params;
  params.k = k;
  params.r = r;
  params.d = d;
  params.p = p;
  params.e = e;
  params.layers = layers;
  return params;
}

unsigned CodeParams::rows() const {
  unsigned n = 1;
  for (unsigned i = 0; i < layers; ++i) n *= t();
  return n;
}

CodewordArray CodewordArray::zero(const CodeParams& params) {
  CodewordArray a;
  a.params = params;
  a.columns.assign(params.n(),
                   std::vector<RingElement>(params.rows(),
                                            RingElement::zero(params.ring())));
  return a;
}

ErasurePattern ErasurePattern::make(std::vector<unsigned> erased,
                                    const CodeParams& p) {
  std::sort(erased.begin(), erased.end());
  if (std::adjacent_find(erased.begin(), erased.end()) != erased.end())
    throw std::invalid_argument("erasure pattern has repeated columns");
  if (!erased.empty() && erased.back() >= p.n())
    throw std::invalid_argument("erased column index out of range");
  if (erased.size() > p.r)
    throw std::invalid_argument("more than r erasures cannot be decoded");
  return ErasurePattern{std::move(erased)};
}

bool ErasurePattern::contains(unsigned column) const {
  return std::find(erased.begin(), erased.end(), column) != erased.end();
}

CodewordArray evenodd_encode(const std::vector<RingElement>& info,
                             const CodeParams& params) {
  if (params.layers != 0)
    throw std::invalid_argument("evenodd_encode expects layers = 0");
  if (info.size() != params.k)
    throw std::invalid_argument("expected exactly k information polynomials");
  Modulus ring = params.ring();
  for (const auto& a : info) {
    if (a.modulus() != ring)
      throw std::invalid_argument("information polynomial in the wrong ring");
  }
  CodewordArray out = CodewordArray::zero(params);
  for (unsigned j = 0; j < params.k; ++j) out.columns[j][0] = info[j];
  for (unsigned h = 0; h < params.r; ++h) {
    RingElement acc = RingElement::zero(ring);
    for (unsigned j = 0; j < params.k; ++j)
      acc = ring_add(acc, shift_mul(info[j], (j * h) % params.p));
    out.columns[params.k + h][0] = acc;
  }
  return out;
}

std::optional<CodewordArray> syndrome_decode(const CodewordArray& array,
                                             const ErasurePattern& pattern) {
  const CodeParams& params = array.params;
  if (params.layers != 0)
    throw std::invalid_argument("syndrome_decode expects layers = 0");
  if (array.columns.size() != params.n())
    throw std::invalid_argument("column count does not match params");
  Modulus ring = params.ring();

  std::vector<unsigned> erased_info, erased_parity;
  for (unsigned c : pattern.erased)
    (c < params.k ? erased_info : erased_parity).push_back(c);

  CodewordArray out = array;
  if (!erased_info.empty()) {
    // One equation per surviving parity h: sum over erased info columns j of
    // x^(j*h) a_j equals the parity minus the known information contributions.
    std::vector<std::vector<RingElement>> rows;
    std::vector<RingElement> rhs;
    for (unsigned h = 0; h < params.r; ++h) {
      if (pattern.contains(params.k + h)) continue;
      std::vector<RingElement> coeff;
      coeff.reserve(erased_info.size());
      for (unsigned j : erased_info)
        coeff.push_back(RingElement::monomial(ring, (j * h) % params.p));
      RingElement s = array.columns[params.k + h][0];
      for (unsigned j = 0; j < params.k; ++j) {
        if (pattern.contains(j)) continue;
        s = ring_add(s, shift_mul(array.columns[j][0], (j * h) % params.p));
      }
      rows.push_back(std::move(coeff));
      rhs.push_back(std::move(s));
    }
    if (rows.size() < erased_info.size()) return std::nullopt;
    auto solved = detail::solve_linear_system(std::move(rows), std::move(rhs));
    if (!solved) return std::nullopt;
    for (std::size_t i = 0; i < erased_info.size(); ++i)
      out.columns[erased_info[i]][0] = (*solved)[i];
  }
  // With all information columns present, erased parities are re-encoded.
  if (!erased_parity.empty()) {
    std::vector<RingElement> info;
    info.reserve(params.k);
    for (unsigned j = 0; j < params.k; ++j) info.push_back(out.columns[j][0]);
    CodewordArray fresh = evenodd_encode(info, params);
    for (unsigned c : erased_parity) out.columns[c][0] = fresh.columns[c][0];
  }
  return out;
}

namespace {

RingElement random_element(const Modulus& ring, std::mt19937_64& rng) {
  std::vector<std::uint8_t> coeffs(ring.size() - (ring.is_evenodd() ? 1 : 0));
  for (auto& c : coeffs) c = static_cast<std::uint8_t>(rng() & 1);
  coeffs.resize(ring.size(), 0);
  return RingElement::from_coefficients(ring, coeffs);
}

// All size-k subsets of {0..n-1}, emitted via callback; returns false early
// if the callback does.
template <typename F>
bool for_each_subset(unsigned n, unsigned k, F&& f) {
  std::vector<unsigned> idx(k);
  for (unsigned i = 0; i < k; ++i) idx[i] = i;
  while (true) {
    if (!f(idx)) return false;
    int i = static_cast<int>(k) - 1;
    while (i >= 0 && idx[i] == n - k + i) --i;
    if (i < 0) return true;
    ++idx[i];
    for (unsigned j = i + 1; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

}  // namespace

CheckMdsResult check_mds(const CodeParams& params, unsigned random_trials,
                         std::uint64_t seed) {
  Modulus ring = params.ring();
  std::mt19937_64 rng(seed);

  // Trial information words: deterministic basis vectors (each single column
  // set to each monomial) plus seeded random words.
  std::vector<std::vector<RingElement>> trials;
  for (unsigned j = 0; j < params.k; ++j) {
    for (unsigned b = 0; b + 1 < params.p; ++b) {
      std::vector<RingElement> info(params.k, RingElement::zero(ring));
      info[j] = RingElement::monomial(ring, b);
      trials.push_back(std::move(info));
    }
  }
  for (unsigned rtrial = 0; rtrial < random_trials; ++rtrial) {
    std::vector<RingElement> info;
    info.reserve(params.k);
    for (unsigned j = 0; j < params.k; ++j) info.push_back(random_element(ring, rng));
    trials.push_back(std::move(info));
  }

  CheckMdsResult result;
  result.ok = for_each_subset(params.n(), params.k, [&](const std::vector<unsigned>& keep) {
    std::vector<unsigned> erased;
    for (unsigned c = 0; c < params.n(); ++c) {
      if (std::find(keep.begin(), keep.end(), c) == keep.end()) erased.push_back(c);
    }
    ErasurePattern pattern = ErasurePattern::make(erased, params);
    for (const auto& info : trials) {
      CodewordArray full = evenodd_encode(info, params);
      CodewordArray damaged = full;
      for (unsigned c : erased)
        damaged.columns[c][0] = RingElement::zero(ring);  // never read back
      auto restored = syndrome_decode(damaged, pattern);
      if (!restored) {
        result.failing_subset = keep;
        return false;
      }
      for (unsigned c = 0; c < params.n(); ++c) {
        if (restored->columns[c][0] != full.columns[c][0]) {
          result.failing_subset = keep;
          return false;
        }
      }
    }
    return true;
  });
  return result;
}

}  // namespace xmds
