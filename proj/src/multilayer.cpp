#include "xmds/multilayer.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace xmds {

namespace {

// ---------------------------------------------------------------------------
// Word-packed arithmetic in R_p for the structural solver (p <= 61).  The
// packed semantics mirror RingElement exactly: length-p bit vector under
// x^p + 1, canonical form with the x^(p-1) coefficient cleared by adding the
// modulus polynomial (p ones).
// ---------------------------------------------------------------------------
struct FastRing {
  unsigned p = 0;
  std::uint64_t full = 0;  // p ones
  Modulus mod;

  explicit FastRing(unsigned p_)
      : p(p_), full((1ull << p_) - 1), mod(Modulus::evenodd_ring(p_)) {}

  std::uint64_t canon(std::uint64_t v) const {
    if ((v >> (p - 1)) & 1ull) {
      v ^= full;
    }
    return v;
  }
  // v * x^e under x^p + 1 (cyclic rotation), not canonicalized.
  std::uint64_t rot(std::uint64_t v, unsigned e) const {
    e %= p;
    if (e == 0) {
      return v;
    }
    return ((v << e) | (v >> (p - e))) & full;
  }
  std::uint64_t mul(std::uint64_t a, std::uint64_t b) const {
    std::uint64_t acc = 0;
    for (unsigned i = 0; i < p; ++i) {
      if ((a >> i) & 1ull) {
        acc ^= rot(b, i);
      }
    }
    return canon(acc);
  }
  std::uint64_t monomial(unsigned e) const { return canon(rot(1ull, e)); }
  std::uint64_t from_element(const RingElement& x) const {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < p; ++i) {
      if (x.coefficient(i)) {
        v |= 1ull << i;
      }
    }
    return canon(v);
  }
  RingElement to_element(std::uint64_t v) const {
    std::vector<std::uint8_t> coeffs(p, 0);
    for (unsigned i = 0; i < p; ++i) {
      coeffs[i] = static_cast<std::uint8_t>((v >> i) & 1ull);
    }
    return RingElement::from_coefficients(mod, coeffs);
  }
  std::optional<std::uint64_t> inv(std::uint64_t v) const {
    std::optional<RingElement> g = ring_inv(to_element(v));
    if (!g) {
      return std::nullopt;
    }
    return from_element(*g);
  }
};

// A value expressed as a linear combination of source slots (the cells a
// repair or decode is allowed to read): sorted (slot, coefficient) pairs.
using LinTerm = std::pair<std::uint32_t, std::uint64_t>;
struct Lin {
  std::vector<LinTerm> terms;
};

// dst += c * src
void lin_acc(Lin& dst, const Lin& src, std::uint64_t c, const FastRing& R) {
  if (c == 0 || src.terms.empty()) {
    return;
  }
  std::vector<LinTerm> out;
  out.reserve(dst.terms.size() + src.terms.size());
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < dst.terms.size() || j < src.terms.size()) {
    if (j >= src.terms.size() ||
        (i < dst.terms.size() && dst.terms[i].first < src.terms[j].first)) {
      out.push_back(dst.terms[i++]);
    } else if (i >= dst.terms.size() ||
               src.terms[j].first < dst.terms[i].first) {
      const std::uint64_t v = (c == 1) ? src.terms[j].second
                                       : R.mul(c, src.terms[j].second);
      if (v != 0) {
        out.emplace_back(src.terms[j].first, v);
      }
      ++j;
    } else {
      const std::uint64_t v =
          dst.terms[i].second ^
          ((c == 1) ? src.terms[j].second : R.mul(c, src.terms[j].second));
      if (v != 0) {
        out.emplace_back(dst.terms[i].first, v);
      }
      ++i;
      ++j;
    }
  }
  dst.terms = std::move(out);
}

void lin_scale(Lin& x, std::uint64_t c, const FastRing& R) {
  if (c == 1) {
    return;
  }
  std::vector<LinTerm> out;
  out.reserve(x.terms.size());
  for (const LinTerm& t : x.terms) {
    const std::uint64_t v = R.mul(c, t.second);
    if (v != 0) {
      out.emplace_back(t.first, v);
    }
  }
  x.terms = std::move(out);
}

// ---------------------------------------------------------------------------
// Cell space of the layered code.  Between the stored array and the base
// code sit intermediate stages: information columns evolve through the
// substitution stages VS[layers_info] (stored) down to VS[0] (the values the
// base code encodes); parity columns evolve from PS[layers_info] (the base
// parities of VS[0], stage index reused) up to PS[layers] (stored).  Every
// (stage, column, row) cell gets an id; the relations between adjacent
// stages plus the base parity equations per row fully describe the code.
// ---------------------------------------------------------------------------
struct Structure {
  unsigned k = 0;
  unsigned r = 0;
  unsigned n = 0;
  unsigned t = 0;
  unsigned N = 0;   // rows per column, t^L
  unsigned L = 0;   // total layers
  unsigned Li = 0;  // information layers
  unsigned p = 0;
  std::vector<Partition> parts;
  FastRing R;
  std::uint64_t gamma = 0;   // mixing coefficient
  std::uint64_t cc = 0;      // (1 + gamma)^-1
  std::uint64_t one_cc = 0;  // 1 + cc
  std::vector<unsigned> tpow;

  explicit Structure(const MultilayerCode& code)
      : k(code.params().k),
        r(code.params().r),
        n(code.params().n()),
        t(code.params().t()),
        N(code.params().rows()),
        L(code.params().layers),
        Li(code.partitions().info_count),
        p(code.params().p),
        parts(code.partitions().parts),
        R(code.params().p) {
    gamma = R.from_element(code.coefficient());
    const std::optional<std::uint64_t> ci = R.inv(gamma ^ 1ull);
    if (!ci) {
      throw NotInvertible("multilayer: coefficient + 1 is not invertible");
    }
    cc = *ci;
    one_cc = cc ^ 1ull;
    tpow.resize(L + 1);
    tpow[0] = 1;
    for (unsigned i = 1; i <= L; ++i) {
      tpow[i] = tpow[i - 1] * t;
    }
  }

  std::uint32_t info_cell(unsigned q, unsigned j, unsigned rho) const {
    return (q * k + j) * N + rho;
  }
  std::uint32_t par_cell(unsigned q, unsigned h, unsigned rho) const {
    return (Li + 1) * k * N + ((q - Li) * r + (h - k)) * N + rho;
  }
  std::uint32_t total_cells() const {
    return (Li + 1) * k * N + (L - Li + 1) * r * N;
  }
  std::uint32_t stored_cell(unsigned column, unsigned rho) const {
    return column < k ? info_cell(Li, column, rho) : par_cell(L, column, rho);
  }
  unsigned digit(unsigned rho, unsigned label) const {
    return (rho / tpow[label - 1]) % t;
  }
};

// One relation group: a small set of simultaneous linear equations
// (sum of coeff * cell = 0 each) solved together during local propagation.
struct Group {
  std::vector<std::vector<LinTerm>> eqs;  // LinTerm reused as (cell, coeff)
};

std::vector<Group> build_groups(const Structure& S) {
  std::vector<Group> groups;

  for (unsigned q = 1; q <= S.L; ++q) {
    const Partition& part = S.parts[q - 1];
    const bool is_parity_stage = part.parity;
    const unsigned stride = S.tpow[q - 1];
    const unsigned side_begin = is_parity_stage ? S.k : 0;
    const unsigned side_end = is_parity_stage ? S.n : S.k;
    // Stage-adjacent cell ids on the side this layer transforms.  For an
    // information layer q the pair is (VS[q-1], VS[q]); for a parity layer
    // it is (PS[q-1], PS[q]).
    auto lo = [&](unsigned column, unsigned rho) {
      return is_parity_stage ? S.par_cell(q - 1, column, rho)
                             : S.info_cell(q - 1, column, rho);
    };
    auto hi = [&](unsigned column, unsigned rho) {
      return is_parity_stage ? S.par_cell(q, column, rho)
                             : S.info_cell(q, column, rho);
    };

    for (unsigned column = side_begin; column < side_end; ++column) {
      if (part.contains(column)) {
        continue;  // member columns handled below
      }
      for (unsigned rho = 0; rho < S.N; ++rho) {
        Group g;
        g.eqs.push_back({{lo(column, rho), 1}, {hi(column, rho), 1}});
        groups.push_back(std::move(g));
      }
    }
    // Diagonal rows of member columns pass through unchanged.
    for (unsigned u = 0; u < part.size; ++u) {
      const unsigned column = part.start + u;
      for (unsigned rho = 0; rho < S.N; ++rho) {
        if (S.digit(rho, q) != u) {
          continue;
        }
        Group g;
        g.eqs.push_back({{lo(column, rho), 1}, {hi(column, rho), 1}});
        groups.push_back(std::move(g));
      }
    }
    // Off-diagonal pairs.
    for (unsigned u1 = 0; u1 < part.size; ++u1) {
      for (unsigned u2 = u1 + 1; u2 < part.size; ++u2) {
        const unsigned col1 = part.start + u1;
        const unsigned col2 = part.start + u2;
        for (unsigned rho_b = 0; rho_b < S.N; ++rho_b) {
          if (S.digit(rho_b, q) != u2) {
            continue;
          }
          const unsigned rho_a = rho_b - (u2 - u1) * stride;
          Group g;
          if (is_parity_stage) {
            // W_a = P_a + P_b ; W_b = gamma*P_a + P_b
            g.eqs.push_back({{hi(col2, rho_a), 1},
                             {lo(col2, rho_a), 1},
                             {lo(col1, rho_b), 1}});
            g.eqs.push_back({{hi(col1, rho_b), 1},
                             {lo(col2, rho_a), S.gamma},
                             {lo(col1, rho_b), 1}});
          } else {
            // V_a = c*(M_a + M_b) ; V_b = (1+c)*M_a + c*M_b
            g.eqs.push_back({{lo(col2, rho_a), 1},
                             {hi(col2, rho_a), S.cc},
                             {hi(col1, rho_b), S.cc}});
            g.eqs.push_back({{lo(col1, rho_b), 1},
                             {hi(col2, rho_a), S.one_cc},
                             {hi(col1, rho_b), S.cc}});
          }
          groups.push_back(std::move(g));
        }
      }
    }
  }

  // Base-code parity relations per row: PS[Li][h] = sum_j x^(j*(h-k)) VS[0][j].
  for (unsigned rho = 0; rho < S.N; ++rho) {
    Group g;
    for (unsigned h = 0; h < S.r; ++h) {
      std::vector<LinTerm> eq;
      eq.emplace_back(S.par_cell(S.Li, S.k + h, rho), 1);
      for (unsigned j = 0; j < S.k; ++j) {
        eq.emplace_back(S.info_cell(0, j, rho), S.R.monomial((j * h) % S.p));
      }
      g.eqs.push_back(std::move(eq));
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

// ---------------------------------------------------------------------------
// Structural solver.  Cell values are linear combinations of source slots;
// local propagation solves each relation group whose unknowns fit inside it,
// and a global elimination over all outstanding equations breaks the
// cross-group dependencies local propagation cannot see.
// ---------------------------------------------------------------------------
struct SolveState {
  std::vector<std::optional<Lin>> value;

  bool known(std::uint32_t cell) const { return value[cell].has_value(); }
  void assign(std::uint32_t cell, Lin v) {
    if (!value[cell]) {
      value[cell] = std::move(v);
    }
  }
};

class InverseCache {
 public:
  explicit InverseCache(const FastRing& R) : R_(R) {}
  // nullopt when not invertible.
  std::optional<std::uint64_t> get(std::uint64_t v) {
    auto it = cache_.find(v);
    if (it == cache_.end()) {
      it = cache_.emplace(v, R_.inv(v)).first;
    }
    return it->second;
  }

 private:
  const FastRing& R_;
  std::map<std::uint64_t, std::optional<std::uint64_t>> cache_;
};

// Tries to determine every unknown cell of one group.  Returns true when it
// assigned anything.
bool solve_group(const Group& g, SolveState& st, const FastRing& R,
                 InverseCache& inv) {
  std::vector<std::uint32_t> unknowns;
  for (const auto& eq : g.eqs) {
    for (const LinTerm& term : eq) {
      if (!st.known(term.first)) {
        unknowns.push_back(term.first);
      }
    }
  }
  std::sort(unknowns.begin(), unknowns.end());
  unknowns.erase(std::unique(unknowns.begin(), unknowns.end()),
                 unknowns.end());
  if (unknowns.empty() || unknowns.size() > g.eqs.size()) {
    return false;
  }

  const std::size_t m = g.eqs.size();
  const std::size_t u = unknowns.size();
  std::vector<std::vector<std::uint64_t>> A(m,
                                            std::vector<std::uint64_t>(u, 0));
  std::vector<Lin> rhs(m);
  for (std::size_t i = 0; i < m; ++i) {
    for (const LinTerm& term : g.eqs[i]) {
      if (st.known(term.first)) {
        lin_acc(rhs[i], *st.value[term.first], term.second, R);
      } else {
        const std::size_t col =
            std::lower_bound(unknowns.begin(), unknowns.end(), term.first) -
            unknowns.begin();
        A[i][col] ^= term.second;
      }
    }
  }

  std::vector<bool> used(m, false);
  std::vector<std::size_t> pivot_row(u, 0);
  for (std::size_t col = 0; col < u; ++col) {
    std::size_t chosen = m;
    std::uint64_t coeff_inv = 0;
    for (std::size_t row = 0; row < m; ++row) {
      if (used[row] || A[row][col] == 0) {
        continue;
      }
      const std::optional<std::uint64_t> ci = inv.get(A[row][col]);
      if (ci) {
        chosen = row;
        coeff_inv = *ci;
        break;
      }
    }
    if (chosen == m) {
      return false;  // cannot pivot this unknown inside the group
    }
    used[chosen] = true;
    pivot_row[col] = chosen;
    for (std::size_t c2 = 0; c2 < u; ++c2) {
      A[chosen][c2] = R.mul(coeff_inv, A[chosen][c2]);
    }
    lin_scale(rhs[chosen], coeff_inv, R);
    for (std::size_t row = 0; row < m; ++row) {
      if (row == chosen || A[row][col] == 0) {
        continue;
      }
      const std::uint64_t factor = A[row][col];
      for (std::size_t c2 = 0; c2 < u; ++c2) {
        A[row][c2] ^= R.mul(factor, A[chosen][c2]);
      }
      lin_acc(rhs[row], rhs[chosen], factor, R);
    }
  }
  for (std::size_t col = 0; col < u; ++col) {
    st.assign(unknowns[col], std::move(rhs[pivot_row[col]]));
  }
  return true;
}

// Joint elimination over every equation that still mentions an unknown cell.
// Returns the number of cells it determined.
unsigned global_phase(const std::vector<Group>& groups, SolveState& st,
                      const FastRing& R, InverseCache& inv) {
  struct Row {
    std::map<std::uint32_t, std::uint64_t> lhs;
    Lin rhs;
  };
  std::vector<Row> rows;
  for (const Group& g : groups) {
    for (const auto& eq : g.eqs) {
      Row row;
      for (const LinTerm& term : eq) {
        if (st.known(term.first)) {
          lin_acc(row.rhs, *st.value[term.first], term.second, R);
        } else {
          row.lhs[term.first] ^= term.second;
          if (row.lhs[term.first] == 0) {
            row.lhs.erase(term.first);
          }
        }
      }
      if (!row.lhs.empty()) {
        rows.push_back(std::move(row));
      }
    }
  }

  std::vector<bool> used(rows.size(), false);
  std::vector<std::pair<std::uint32_t, std::size_t>> pivots;
  while (true) {
    std::size_t best = rows.size();
    std::uint32_t best_var = 0;
    std::uint64_t best_inv = 0;
    std::size_t best_size = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (used[i] || rows[i].lhs.empty()) {
        continue;
      }
      if (best != rows.size() && rows[i].lhs.size() >= best_size) {
        continue;
      }
      for (const auto& [var, coeff] : rows[i].lhs) {
        const std::optional<std::uint64_t> ci = inv.get(coeff);
        if (ci) {
          best = i;
          best_var = var;
          best_inv = *ci;
          best_size = rows[i].lhs.size();
          break;
        }
      }
    }
    if (best == rows.size()) {
      break;
    }
    used[best] = true;
    Row& prow = rows[best];
    for (auto& [var, coeff] : prow.lhs) {
      coeff = R.mul(best_inv, coeff);
    }
    lin_scale(prow.rhs, best_inv, R);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == best) {
        continue;
      }
      auto it = rows[i].lhs.find(best_var);
      if (it == rows[i].lhs.end()) {
        continue;
      }
      const std::uint64_t factor = it->second;
      for (const auto& [var, coeff] : prow.lhs) {
        rows[i].lhs[var] ^= R.mul(factor, coeff);
        if (rows[i].lhs[var] == 0) {
          rows[i].lhs.erase(var);
        }
      }
      lin_acc(rows[i].rhs, prow.rhs, factor, R);
    }
    pivots.emplace_back(best_var, best);
  }

  unsigned assigned = 0;
  for (const auto& [var, i] : pivots) {
    if (rows[i].lhs.size() == 1 && !st.known(var)) {
      st.assign(var, std::move(rows[i].rhs));
      ++assigned;
    }
  }
  return assigned;
}

// Structural solver over one code: given which cells are sources (bound to
// slot ids) and which are wanted, expresses every wanted cell as a linear
// combination of the sources, or reports failure.
class LayerEngine {
 public:
  explicit LayerEngine(const MultilayerCode& code)
      : S_(code), groups_(build_groups(S_)) {}

  const Structure& structure() const { return S_; }

  std::optional<std::vector<Lin>> solve(
      const std::vector<std::pair<std::uint32_t, std::uint32_t>>& known_slots,
      const std::vector<std::uint32_t>& targets) const {
    SolveState st;
    st.value.resize(S_.total_cells());
    for (const auto& [cell, slot] : known_slots) {
      st.assign(cell, Lin{{{slot, 1}}});
    }
    InverseCache inv(S_.R);
    auto targets_known = [&]() {
      return std::all_of(targets.begin(), targets.end(),
                         [&](std::uint32_t c) { return st.known(c); });
    };
    while (true) {
      bool changed = true;
      while (changed) {
        changed = false;
        for (const Group& g : groups_) {
          changed = solve_group(g, st, S_.R, inv) || changed;
        }
      }
      if (targets_known()) {
        break;
      }
      if (global_phase(groups_, st, S_.R, inv) == 0) {
        return std::nullopt;
      }
    }
    std::vector<Lin> out;
    out.reserve(targets.size());
    for (std::uint32_t cell : targets) {
      out.push_back(*st.value[cell]);
    }
    return out;
  }

 private:
  Structure S_;
  std::vector<Group> groups_;
};

}  // namespace

// ---------------------------------------------------------------------------
// Code construction.
// ---------------------------------------------------------------------------

PartitionMap PartitionMap::standard(const CodeParams& params) {
  PartitionMap map;
  const unsigned t = params.t();
  if (t == 1 || params.layers == 0) {
    return map;  // degenerate untransformed code
  }
  const unsigned info_parts = (params.k + t - 1) / t;
  const unsigned parity_parts = (params.r + t - 1) / t;
  for (unsigned i = 0; i < info_parts; ++i) {
    map.parts.push_back(
        Partition{std::min(i * t, params.k - t), t, false});
  }
  for (unsigned i = 0; i < parity_parts; ++i) {
    map.parts.push_back(
        Partition{params.k + std::min(i * t, params.r - t), t, true});
  }
  map.info_count = info_parts;
  return map;
}

MultilayerCode MultilayerCode::build(unsigned k, unsigned r, unsigned d,
                                     unsigned p, unsigned e) {
  const unsigned t = d - k + 1;
  unsigned layers = 0;
  if (d > k) {
    layers = (k + t - 1) / t + (r + t - 1) / t;
    if (k < t) {
      throw std::invalid_argument(
          "multilayer: k must be at least d-k+1 to partition the "
          "information columns");
    }
  }
  const CodeParams params = CodeParams::make(k, r, d, p, e, layers);
  const CodeParams base = CodeParams::make(k, r, d, p, e, 0);
  const CheckMdsResult mds = check_mds(base);
  if (!mds.ok) {
    throw std::invalid_argument(
        "multilayer: base code parameters fail the MDS check");
  }
  return custom(params, PartitionMap::standard(params));
}

MultilayerCode MultilayerCode::custom(const CodeParams& params,
                                      PartitionMap map) {
  if (params.p > 61) {
    throw std::invalid_argument(
        "multilayer: p > 61 exceeds the structural solver's word size");
  }
  if (map.parts.size() != params.layers) {
    throw std::invalid_argument(
        "multilayer: partition count must equal the layer count");
  }
  if (map.info_count > map.parts.size()) {
    throw std::invalid_argument("multilayer: info_count out of range");
  }
  const unsigned t = params.t();
  for (unsigned i = 0; i < map.parts.size(); ++i) {
    const Partition& part = map.parts[i];
    const bool should_be_parity = i >= map.info_count;
    if (part.parity != should_be_parity) {
      throw std::invalid_argument(
          "multilayer: information partitions must precede parity "
          "partitions");
    }
    if (part.size != t) {
      throw std::invalid_argument(
          "multilayer: every partition must have exactly d-k+1 columns");
    }
    const unsigned lo = part.parity ? params.k : 0;
    const unsigned hi = part.parity ? params.n() : params.k;
    if (part.start < lo || part.start + part.size > hi) {
      throw std::invalid_argument("multilayer: partition out of range");
    }
  }
  const Modulus m = params.ring();
  RingElement gamma = RingElement::one(m) + RingElement::monomial(m, params.e);
  if (!ring_inv(gamma) || !ring_inv(gamma + RingElement::one(m))) {
    throw NotInvertible(
        "multilayer: the mixing coefficient and its successor must both be "
        "invertible");
  }
  return MultilayerCode(params, std::move(map), std::move(gamma));
}

unsigned MultilayerCode::stride(unsigned label) const {
  unsigned s = 1;
  for (unsigned i = 1; i < label; ++i) {
    s *= params_.t();
  }
  return s;
}

unsigned MultilayerCode::digit(unsigned row, unsigned label) const {
  return (row / stride(label)) % params_.t();
}

MultilayerCode build_multilayer(unsigned k, unsigned r, unsigned d, unsigned p,
                                unsigned e) {
  return MultilayerCode::build(k, r, d, p, e);
}

// ---------------------------------------------------------------------------
// Systematic encode: substitution stages over the information columns
// (descending label), base parities per row, then first-transform stages
// over the parity columns (ascending label).
// ---------------------------------------------------------------------------

CodewordArray encode_multilayer(
    const std::vector<std::vector<RingElement>>& info,
    const MultilayerCode& code) {
  const CodeParams& P = code.params();
  const unsigned N = P.rows();
  const Modulus m = P.ring();
  if (info.size() != P.k) {
    throw std::invalid_argument("encode_multilayer: expected k info columns");
  }
  for (const auto& column : info) {
    if (column.size() != N) {
      throw std::invalid_argument("encode_multilayer: wrong row count");
    }
    for (const RingElement& cell : column) {
      if (cell.modulus() != m) {
        throw std::invalid_argument("encode_multilayer: ring mismatch");
      }
    }
  }

  const RingElement one = RingElement::one(m);
  const RingElement& gamma = code.coefficient();
  const RingElement c = solve_scaled(one, gamma + one);  // (1+gamma)^-1
  const RingElement one_c = one + c;
  const PartitionMap& map = code.partitions();

  // Substitution stages, label descending.
  std::vector<std::vector<RingElement>> v = info;
  for (unsigned q = map.info_count; q >= 1; --q) {
    const Partition& part = map.parts[q - 1];
    const unsigned stride = code.stride(q);
    std::vector<std::vector<RingElement>> next = v;
    for (unsigned u = 0; u < part.size; ++u) {
      const unsigned column = part.start + u;
      for (unsigned rho = 0; rho < N; ++rho) {
        const unsigned delta = code.digit(rho, q);
        if (delta == u) {
          continue;
        }
        const unsigned mate_col = part.start + delta;
        const unsigned mate_row =
            rho + (static_cast<int>(u) - static_cast<int>(delta)) * stride;
        if (u > delta) {
          next[column][rho] = poly_mul(c, v[column][rho] + v[mate_col][mate_row]);
        } else {
          next[column][rho] =
              poly_mul(c, v[column][rho]) + poly_mul(one_c, v[mate_col][mate_row]);
        }
      }
    }
    v = std::move(next);
  }

  // Base parities per row.
  std::vector<std::vector<RingElement>> parity;
  parity.reserve(P.r);
  for (unsigned h = 0; h < P.r; ++h) {
    std::vector<RingElement> column;
    column.reserve(N);
    for (unsigned rho = 0; rho < N; ++rho) {
      RingElement acc = RingElement::zero(m);
      for (unsigned j = 0; j < P.k; ++j) {
        acc = acc + shift_mul(v[j][rho], (j * h) % P.p);
      }
      column.push_back(std::move(acc));
    }
    parity.push_back(std::move(column));
  }

  // First-transform stages over the parity columns, label ascending.
  for (unsigned q = map.info_count + 1; q <= P.layers; ++q) {
    const Partition& part = map.parts[q - 1];
    const unsigned stride = code.stride(q);
    std::vector<std::vector<RingElement>> next = parity;
    for (unsigned u = 0; u < part.size; ++u) {
      const unsigned column = part.start + u;
      for (unsigned rho = 0; rho < N; ++rho) {
        const unsigned delta = code.digit(rho, q);
        if (delta == u) {
          continue;
        }
        const unsigned mate = part.start + delta - P.k;
        const unsigned local = column - P.k;
        if (delta < u) {
          const unsigned mate_row = rho + (u - delta) * stride;
          next[local][rho] = parity[local][rho] + parity[mate][mate_row];
        } else {
          const unsigned mate_row = rho - (delta - u) * stride;
          next[local][rho] =
              parity[local][rho] + poly_mul(gamma, parity[mate][mate_row]);
        }
      }
    }
    parity = std::move(next);
  }

  CodewordArray out = CodewordArray::zero(P);
  for (unsigned j = 0; j < P.k; ++j) {
    out.columns[j] = info[j];
  }
  for (unsigned h = 0; h < P.r; ++h) {
    out.columns[P.k + h] = std::move(parity[h]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Repair planning.
// ---------------------------------------------------------------------------

struct RepairRecipe {
  struct Term {
    unsigned helper_index = 0;
    unsigned row_index = 0;
    RingElement coeff;
  };
  std::vector<std::vector<Term>> cells;  // one list per row of the column
};

namespace {

// Candidate helper sets for repairing f, most preferred first: the greedy
// set (whole partitions in ascending label order, then low-index filler),
// the same with partition-closure applied above f's layer, then every
// d-subset containing f's partition mates in lexicographic order.
std::vector<std::vector<unsigned>> helper_candidates(
    unsigned f, const MultilayerCode& code, unsigned layer) {
  const CodeParams& P = code.params();
  const unsigned n = P.n();
  const unsigned d = P.d;
  const PartitionMap& map = code.partitions();

  std::vector<unsigned> mates;
  if (layer > 0) {
    const Partition& own = map.parts[layer - 1];
    for (unsigned c = own.start; c < own.start + own.size; ++c) {
      if (c != f) {
        mates.push_back(c);
      }
    }
  }

  // Columns of every partition with label above `layer` that intersects
  // `chosen` must be taken whole; nullopt when that overflows d.
  auto close_up = [&](std::set<unsigned> chosen) -> std::optional<std::set<unsigned>> {
    bool grew = true;
    while (grew) {
      grew = false;
      for (unsigned label = layer + 1; label <= map.parts.size(); ++label) {
        const Partition& part = map.parts[label - 1];
        bool touches = false;
        bool complete = true;
        for (unsigned c = part.start; c < part.start + part.size; ++c) {
          if (chosen.count(c)) {
            touches = true;
          } else if (c != f) {
            complete = false;
          }
        }
        if (touches && !complete) {
          for (unsigned c = part.start; c < part.start + part.size; ++c) {
            if (c != f) {
              chosen.insert(c);
            }
          }
          grew = true;
        }
      }
      if (chosen.size() > d) {
        return std::nullopt;
      }
    }
    return chosen;
  };

  auto greedy = [&](bool with_closure) -> std::optional<std::vector<unsigned>> {
    std::set<unsigned> chosen(mates.begin(), mates.end());
    if (with_closure) {
      const auto closed = close_up(chosen);
      if (!closed) {
        return std::nullopt;
      }
      chosen = *closed;
    }
    // Whole partitions, ascending label.
    for (unsigned label = 1; label <= map.parts.size(); ++label) {
      if (label == layer) {
        continue;
      }
      const Partition& part = map.parts[label - 1];
      if (part.contains(f)) {
        continue;
      }
      std::set<unsigned> trial = chosen;
      for (unsigned c = part.start; c < part.start + part.size; ++c) {
        trial.insert(c);
      }
      if (with_closure) {
        const auto closed = close_up(trial);
        if (!closed || closed->size() > d) {
          continue;
        }
        trial = *closed;
      }
      if (trial.size() <= d) {
        chosen = trial;
      }
    }
    // Filler: lowest-labeled partitions first, lowest index first, then any
    // remaining column.
    std::vector<unsigned> order;
    for (const Partition& part : map.parts) {
      for (unsigned c = part.start; c < part.start + part.size; ++c) {
        order.push_back(c);
      }
    }
    for (unsigned c = 0; c < n; ++c) {
      order.push_back(c);
    }
    for (unsigned c : order) {
      if (chosen.size() == d) {
        break;
      }
      if (c == f || chosen.count(c)) {
        continue;
      }
      std::set<unsigned> trial = chosen;
      trial.insert(c);
      if (with_closure) {
        const auto closed = close_up(trial);
        if (!closed || closed->size() > d) {
          continue;
        }
        trial = *closed;
      }
      chosen = trial;
    }
    if (chosen.size() != d) {
      return std::nullopt;
    }
    return std::vector<unsigned>(chosen.begin(), chosen.end());
  };

  std::vector<std::vector<unsigned>> candidates;
  auto add = [&](std::optional<std::vector<unsigned>> cand) {
    if (!cand) {
      return;
    }
    if (std::find(candidates.begin(), candidates.end(), *cand) ==
        candidates.end()) {
      candidates.push_back(std::move(*cand));
    }
  };
  add(greedy(false));
  add(greedy(true));

  // Exhaustive fallback, lexicographic.
  std::vector<unsigned> pool;
  for (unsigned c = 0; c < n; ++c) {
    if (c != f) {
      pool.push_back(c);
    }
  }
  std::vector<unsigned> subset;
  auto recurse = [&](auto&& self, std::size_t start) -> void {
    if (subset.size() == d) {
      for (unsigned mate : mates) {
        if (std::find(subset.begin(), subset.end(), mate) == subset.end()) {
          return;
        }
      }
      add(subset);
      return;
    }
    if (start >= pool.size() ||
        pool.size() - start < d - subset.size()) {
      return;
    }
    subset.push_back(pool[start]);
    self(self, start + 1);
    subset.pop_back();
    self(self, start + 1);
  };
  recurse(recurse, 0);
  return candidates;
}

}  // namespace

RepairPlan select_helpers(unsigned f, const MultilayerCode& code) {
  const CodeParams& P = code.params();
  const unsigned n = P.n();
  const unsigned N = P.rows();
  if (f >= n) {
    throw std::invalid_argument("select_helpers: column out of range");
  }

  // Layer driving the repair: the highest-labeled partition containing f.
  unsigned layer = 0;
  const PartitionMap& map = code.partitions();
  for (unsigned label = map.parts.size(); label >= 1; --label) {
    if (map.parts[label - 1].contains(f)) {
      layer = label;
      break;
    }
  }

  RepairPlan plan;
  plan.failed = f;
  plan.layer = layer;
  plan.params = P;
  if (layer > 0) {
    const Partition& part = map.parts[layer - 1];
    plan.r_f = f - part.start;
    plan.m_f = part.parity ? layer - map.info_count - 1 : layer - 1;
    for (unsigned rho = 0; rho < N; ++rho) {
      if (code.digit(rho, layer) == plan.r_f) {
        plan.rows.push_back(rho);
      }
    }
  } else {
    for (unsigned rho = 0; rho < N; ++rho) {
      plan.rows.push_back(rho);
    }
  }
  plan.predicted_bits =
      static_cast<std::uint64_t>(P.d) * plan.rows.size() * (P.p - 1);

  const LayerEngine engine(code);
  const Structure& S = engine.structure();
  std::vector<std::uint32_t> targets;
  targets.reserve(N);
  for (unsigned rho = 0; rho < N; ++rho) {
    targets.push_back(S.stored_cell(f, rho));
  }

  for (const std::vector<unsigned>& cand : helper_candidates(f, code, layer)) {
    std::vector<std::pair<std::uint32_t, std::uint32_t>> knowns;
    knowns.reserve(cand.size() * plan.rows.size());
    for (std::size_t h = 0; h < cand.size(); ++h) {
      for (std::size_t i = 0; i < plan.rows.size(); ++i) {
        knowns.emplace_back(
            S.stored_cell(cand[h], plan.rows[i]),
            static_cast<std::uint32_t>(h * plan.rows.size() + i));
      }
    }
    const auto solution = engine.solve(knowns, targets);
    if (!solution) {
      continue;
    }
    auto recipe = std::make_shared<RepairRecipe>();
    recipe->cells.resize(N);
    for (unsigned rho = 0; rho < N; ++rho) {
      for (const LinTerm& term : (*solution)[rho].terms) {
        recipe->cells[rho].push_back(RepairRecipe::Term{
            static_cast<unsigned>(term.first / plan.rows.size()),
            static_cast<unsigned>(term.first % plan.rows.size()),
            S.R.to_element(term.second)});
      }
    }
    plan.helpers = cand;
    plan.recipe = std::move(recipe);
    return plan;
  }
  throw std::runtime_error(
      "select_helpers: no feasible helper set found (parameters are not "
      "repair-capable)");
}

std::pair<std::vector<RingElement>, AccessReport> repair_column(
    const CodewordArray& survivors, const RepairPlan& plan) {
  const CodeParams& P = plan.params;
  const CodeParams& Q = survivors.params;
  if (Q.k != P.k || Q.r != P.r || Q.d != P.d || Q.p != P.p || Q.e != P.e ||
      Q.layers != P.layers) {
    throw std::invalid_argument("repair_column: parameter mismatch");
  }
  if (!plan.recipe) {
    throw std::invalid_argument("repair_column: plan carries no recipe");
  }
  const unsigned N = P.rows();
  const Modulus m = P.ring();

  AccessTrace trace;
  trace.optimal_bits = optimal_bound(P, P.subpacketization_bits());
  for (unsigned column : plan.helpers) {
    if (column >= survivors.columns.size() ||
        survivors.columns[column].size() != N) {
      throw std::invalid_argument("repair_column: missing helper rows");
    }
    trace.add_read(column, plan.rows.size(),
                   static_cast<std::uint64_t>(plan.rows.size()) * (P.p - 1));
  }

  const RingElement one = RingElement::one(m);
  std::vector<RingElement> rebuilt;
  rebuilt.reserve(N);
  for (unsigned rho = 0; rho < N; ++rho) {
    RingElement acc = RingElement::zero(m);
    for (const RepairRecipe::Term& term : plan.recipe->cells[rho]) {
      const RingElement& src =
          survivors.columns[plan.helpers[term.helper_index]]
                           [plan.rows[term.row_index]];
      acc = (term.coeff == one) ? acc + src : acc + poly_mul(term.coeff, src);
    }
    rebuilt.push_back(std::move(acc));
  }
  return {std::move(rebuilt), audit(trace)};
}

// ---------------------------------------------------------------------------
// Erasure decoding.
// ---------------------------------------------------------------------------

std::optional<MultilayerDecoder> MultilayerDecoder::compile(
    const MultilayerCode& code, const ErasurePattern& pattern) {
  const CodeParams& P = code.params();
  const unsigned n = P.n();
  const unsigned N = P.rows();

  std::vector<unsigned> survivors;
  for (unsigned c = 0; c < n; ++c) {
    if (!pattern.contains(c)) {
      survivors.push_back(c);
    }
  }

  const LayerEngine engine(code);
  const Structure& S = engine.structure();
  std::vector<std::pair<std::uint32_t, std::uint32_t>> knowns;
  knowns.reserve(survivors.size() * N);
  for (std::size_t s = 0; s < survivors.size(); ++s) {
    for (unsigned rho = 0; rho < N; ++rho) {
      knowns.emplace_back(S.stored_cell(survivors[s], rho),
                          static_cast<std::uint32_t>(s * N + rho));
    }
  }
  std::vector<std::uint32_t> targets;
  for (unsigned c : pattern.erased) {
    for (unsigned rho = 0; rho < N; ++rho) {
      targets.push_back(S.stored_cell(c, rho));
    }
  }

  const auto solution = engine.solve(knowns, targets);
  if (!solution) {
    return std::nullopt;
  }

  MultilayerDecoder decoder;
  decoder.params_ = P;
  decoder.erased_ = pattern.erased;
  decoder.recipes_.resize(pattern.erased.size());
  std::size_t idx = 0;
  for (std::size_t e = 0; e < pattern.erased.size(); ++e) {
    decoder.recipes_[e].resize(N);
    for (unsigned rho = 0; rho < N; ++rho, ++idx) {
      for (const LinTerm& term : (*solution)[idx].terms) {
        decoder.recipes_[e][rho].push_back(
            Term{survivors[term.first / N], term.first % N,
                 S.R.to_element(term.second)});
      }
    }
  }
  return decoder;
}

CodewordArray MultilayerDecoder::operator()(
    const CodewordArray& damaged) const {
  const CodeParams& P = params_;
  const CodeParams& Q = damaged.params;
  if (Q.k != P.k || Q.r != P.r || Q.d != P.d || Q.p != P.p || Q.e != P.e ||
      Q.layers != P.layers) {
    throw std::invalid_argument("decode: parameter mismatch");
  }
  const unsigned N = P.rows();
  const Modulus m = P.ring();
  const RingElement one = RingElement::one(m);

  CodewordArray out = damaged;
  for (std::size_t e = 0; e < erased_.size(); ++e) {
    for (unsigned rho = 0; rho < N; ++rho) {
      RingElement acc = RingElement::zero(m);
      for (const Term& term : recipes_[e][rho]) {
        const RingElement& src = damaged.columns[term.column][term.row];
        acc = (term.coeff == one) ? acc + src : acc + poly_mul(term.coeff, src);
      }
      out.columns[erased_[e]][rho] = std::move(acc);
    }
  }
  return out;
}

std::optional<CodewordArray> decode_multilayer(const CodewordArray& array,
                                               const ErasurePattern& pattern) {
  const CodeParams& P = array.params;
  const MultilayerCode code =
      MultilayerCode::build(P.k, P.r, P.d, P.p, P.e);
  if (code.params().layers != P.layers) {
    throw std::invalid_argument(
        "decode_multilayer: array does not carry a standard layered code");
  }
  const auto decoder = MultilayerDecoder::compile(code, pattern);
  if (!decoder) {
    return std::nullopt;
  }
  return (*decoder)(array);
}

}  // namespace xmds
