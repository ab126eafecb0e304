#include "xmds/te2.hpp"

#include <algorithm>
#include <functional>
#include <stdexcept>
#include <string>

#include "xmds/evenodd.hpp"

namespace xmds {

namespace {

// Reads one stored coefficient: column index, then coefficient index.
using BitReader = std::function<std::uint8_t(unsigned, unsigned)>;

void require_evenodd(const Modulus& m, const char* who) {
  if (!m.is_evenodd())
    throw std::invalid_argument(std::string(who) +
                                ": elements must live in R_p");
}

std::vector<std::uint8_t> payload(const RingElement& v) {
  std::vector<std::uint8_t> c = v.coefficients();
  c.resize(v.modulus().payload_bits());
  return c;
}

RingElement row_parity(const std::vector<const RingElement*>& cols) {
  RingElement s = RingElement::zero(cols.front()->modulus());
  for (const RingElement* c : cols) s = ring_add(s, *c);
  return s;
}

RingElement diagonal_parity(const std::vector<const RingElement*>& cols) {
  RingElement s = RingElement::zero(cols.front()->modulus());
  for (unsigned j = 0; j < cols.size(); ++j)
    s = ring_add(s, shift_mul(*cols[j], j));
  return s;
}

// Recovers b_k from z = bar(b_k) + star(b_k) (all p-1 coefficients known).
std::vector<std::uint8_t> unmix_bar_star(const std::vector<std::uint8_t>& z) {
  std::vector<std::uint8_t> b(z.size(), 0);
  for (unsigned i = 0; i + 1 < z.size(); i += 2) {
    b[i] = z[i + 1];
    b[i + 1] = static_cast<std::uint8_t>(z[i] ^ z[i + 1]);
  }
  return b;
}

// Recovers b_k from z = b_k + bar(b_k) + star(b_k).  Works on any prefix
// made of whole coefficient pairs, which is all the repair path downloads.
std::vector<std::uint8_t> unmix_self_bar_star(
    const std::vector<std::uint8_t>& z) {
  std::vector<std::uint8_t> b(z.size(), 0);
  for (unsigned i = 0; i + 1 < z.size(); i += 2) {
    b[i + 1] = z[i];
    b[i] = static_cast<std::uint8_t>(z[i] ^ z[i + 1]);
  }
  return b;
}

// Rebuilds information column f of a base r=2 EVENODD codeword from the
// partial downloads described by `sets` (see evenodd_info_repair_sets).
// `read(c, l)` returns coefficient l of column c and is only invoked with
// l in sets[c].  Rows 0..(p-1)/2-1 come from the row parity; the remaining
// rows come from the diagonal parity once the virtual all-ones adjuster
// diagonal D_{p-1} is known.
std::vector<std::uint8_t> base_repair_from_sets(unsigned f, unsigned k,
                                                unsigned p,
                                                const BitReader& read) {
  const unsigned h = (p - 1) / 2;
  std::vector<std::uint8_t> out(p - 1, 0);

  // Row sums over the first half.
  for (unsigned i = 0; i < h; ++i) {
    std::uint8_t v = read(k, i);
    for (unsigned j = 0; j < k; ++j)
      if (j != f) v ^= read(j, i);
    out[i] = v;
  }

  // Coefficient l of column j with the virtual zero row p-1; column f is
  // served from the rows recovered so far.
  auto virt = [&](unsigned j, unsigned l) -> std::uint8_t {
    if (l == p - 1) return 0;
    return j == f ? out[l] : read(j, l);
  };

  // Diagonal f passes through the recovered cell (0, f); comparing its sum
  // with the stored bit isolates the adjuster diagonal D_{p-1}.
  std::uint8_t d_f = 0;
  for (unsigned j = 0; j < k; ++j) d_f ^= virt(j, (f + p - j) % p);
  const std::uint8_t d_last = static_cast<std::uint8_t>(read(k + 1, f) ^ d_f);

  // Each remaining row lies on one readable diagonal, except row p-1-f
  // whose diagonal is the adjuster itself.
  for (unsigned i = h; i < p - 1; ++i) {
    if (i + f == p - 1) {
      std::uint8_t v = d_last;
      for (unsigned j = 0; j < k; ++j)
        if (j != f) v ^= virt(j, (p - 1 + p - j) % p);
      out[i] = v;
    } else {
      const unsigned delta = (i + f) % p;
      std::uint8_t v = static_cast<std::uint8_t>(read(k + 1, delta) ^ d_last);
      for (unsigned j = 0; j < k; ++j)
        if (j != f) v ^= virt(j, (delta + p - j) % p);
      out[i] = v;
    }
  }
  return out;
}

void validate_repair_sets(const std::vector<std::vector<unsigned>>& sets,
                          unsigned f, unsigned k, unsigned p) {
  if (sets.size() != k + 2)
    throw std::invalid_argument("te2_repair: expected k+2 repair sets, got " +
                                std::to_string(sets.size()));
  const unsigned h = (p - 1) / 2;
  for (unsigned c = 0; c < sets.size(); ++c) {
    const std::vector<unsigned>& s = sets[c];
    if (!std::is_sorted(s.begin(), s.end()) ||
        std::adjacent_find(s.begin(), s.end()) != s.end())
      throw std::invalid_argument(
          "te2_repair: repair sets must be sorted and duplicate-free");
    if (!s.empty() && s.back() >= p - 1)
      throw std::invalid_argument(
          "te2_repair: repair set index exceeds p-2");
  }
  if (!sets[f].empty())
    throw std::invalid_argument(
        "te2_repair: the failed column's repair set must be empty");
  if (sets[k].size() != h || (h > 0 && sets[k].back() != h - 1))
    throw std::invalid_argument(
        "te2_repair: row-parity set must be {0..(p-1)/2-1}");
}

// Decodes a single base EVENODD instance given its k+2 columns with the
// listed positions erased.
std::vector<RingElement> decode_base(const CodeParams& base,
                                     const std::vector<RingElement>& cols,
                                     std::vector<unsigned> erased) {
  CodewordArray w = CodewordArray::zero(base);
  ErasurePattern pat = ErasurePattern::make(std::move(erased), base);
  for (unsigned c = 0; c < cols.size(); ++c)
    if (!pat.contains(c)) w.columns[c][0] = cols[c];
  std::optional<CodewordArray> full = syndrome_decode(w, pat);
  if (!full)
    throw std::runtime_error("te2_decode: base instance failed to decode");
  std::vector<RingElement> out;
  out.reserve(cols.size());
  for (const std::vector<RingElement>& col : full->columns)
    out.push_back(col[0]);
  return out;
}

}  // namespace

RingElement te2_star(const RingElement& v) {
  require_evenodd(v.modulus(), "te2_star");
  const std::vector<std::uint8_t> c = payload(v);
  std::vector<std::uint8_t> out(c.size(), 0);
  for (unsigned i = 0; i + 1 < c.size(); i += 2) {
    out[i] = c[i + 1];
    out[i + 1] = c[i];
  }
  return RingElement::from_coefficients(v.modulus(), out);
}

RingElement te2_bar(const RingElement& v) {
  require_evenodd(v.modulus(), "te2_bar");
  std::vector<std::uint8_t> out = payload(v);
  for (unsigned i = 1; i < out.size(); i += 2) out[i] = 0;
  return RingElement::from_coefficients(v.modulus(), out);
}

std::vector<TePair> te2_encode(const std::vector<TePair>& info, unsigned p) {
  const Modulus m = Modulus::evenodd_ring(p);
  const unsigned k = static_cast<unsigned>(info.size());
  if (k == 0)
    throw std::invalid_argument(
        "te2_encode: need at least one information pair");
  if (k > p - 1)
    throw std::invalid_argument("te2_encode: k = " + std::to_string(k) +
                                " exceeds p-1 = " + std::to_string(p - 1));
  std::vector<const RingElement*> as, bs;
  for (const TePair& pr : info) {
    if (pr.a.modulus() != m || pr.b.modulus() != m)
      throw std::invalid_argument(
          "te2_encode: information pair modulus does not match p");
    as.push_back(&pr.a);
    bs.push_back(&pr.b);
  }
  const RingElement a_k = row_parity(as);
  const RingElement a_k1 = diagonal_parity(as);
  const RingElement b_k = row_parity(bs);
  const RingElement b_k1 = diagonal_parity(bs);
  const RingElement mix =
      ring_add(a_k, ring_add(te2_bar(b_k), te2_star(b_k)));

  std::vector<TePair> out(info.begin(), info.end());
  out.push_back(TePair{ring_add(a_k, b_k), b_k1});
  out.push_back(TePair{mix, a_k1});
  return out;
}

std::vector<TePair> te2_decode(const std::vector<TePair>& array,
                               const std::vector<unsigned>& available) {
  if (array.size() < 3)
    throw std::invalid_argument("te2_decode: array needs k+2 >= 3 columns");
  const unsigned n = static_cast<unsigned>(array.size());
  const unsigned k = n - 2;
  if (available.size() != k)
    throw std::invalid_argument("te2_decode: need exactly k = " +
                                std::to_string(k) + " surviving columns");
  std::vector<char> have(n, 0);
  for (unsigned c : available) {
    if (c >= n)
      throw std::invalid_argument("te2_decode: column index out of range");
    if (have[c])
      throw std::invalid_argument("te2_decode: duplicate surviving column");
    have[c] = 1;
  }
  std::vector<unsigned> erased;
  for (unsigned c = 0; c < n; ++c)
    if (!have[c]) erased.push_back(c);

  const Modulus m = array[available.front()].a.modulus();
  require_evenodd(m, "te2_decode");
  const unsigned p = m.size();
  for (unsigned c : available)
    if (array[c].a.modulus() != m || array[c].b.modulus() != m)
      throw std::invalid_argument("te2_decode: mixed column moduli");
  const CodeParams base = CodeParams::make(k, 2, k + 1, p);
  const RingElement z0 = RingElement::zero(m);

  auto info_of = [&](const std::vector<RingElement>& a_cols,
                     const std::vector<RingElement>& b_cols) {
    std::vector<TePair> out;
    out.reserve(k);
    for (unsigned j = 0; j < k; ++j)
      out.push_back(TePair{a_cols[j], b_cols[j]});
    return out;
  };

  if (erased[0] >= k) {
    // Both parity columns gone: the information pairs survive verbatim.
    std::vector<TePair> out(array.begin(), array.begin() + k);
    return out;
  }

  if (erased[1] == k + 1) {
    // Lost information column f and the mixed parity column.  The b
    // instance still has its diagonal parity; the pairwise sums
    // c_j = a_j + b_j form a third base codeword whose row parity is the
    // stored a_k + b_k.
    const unsigned f = erased[0];
    std::vector<RingElement> b_cols(n, z0), c_cols(n, z0);
    for (unsigned j = 0; j < k; ++j) {
      if (j == f) continue;
      b_cols[j] = array[j].b;
      c_cols[j] = ring_add(array[j].a, array[j].b);
    }
    b_cols[k + 1] = array[k].b;
    c_cols[k] = array[k].a;
    const std::vector<RingElement> b = decode_base(base, b_cols, {f, k});
    const std::vector<RingElement> c = decode_base(base, c_cols, {f, k + 1});
    std::vector<TePair> out(array.begin(), array.begin() + k);
    out[f] = TePair{ring_add(c[f], b[f]), b[f]};
    return out;
  }

  if (erased[1] == k) {
    // Lost information column f and the plain parity column.  Decode the a
    // instance from its diagonal parity, strip a_k out of the mixed column,
    // unmix b_k, then finish the b instance.
    const unsigned f = erased[0];
    std::vector<RingElement> a_cols(n, z0);
    for (unsigned j = 0; j < k; ++j)
      if (j != f) a_cols[j] = array[j].a;
    a_cols[k + 1] = array[k + 1].b;
    const std::vector<RingElement> a = decode_base(base, a_cols, {f, k});
    const RingElement z = ring_add(array[k + 1].a, a[k]);
    const RingElement b_k = RingElement::from_coefficients(
        m, unmix_bar_star(payload(z)));
    std::vector<RingElement> b_cols(n, z0);
    for (unsigned j = 0; j < k; ++j)
      if (j != f) b_cols[j] = array[j].b;
    b_cols[k] = b_k;
    const std::vector<RingElement> b = decode_base(base, b_cols, {f, k + 1});
    std::vector<TePair> out(array.begin(), array.begin() + k);
    out[f] = TePair{a[f], b[f]};
    return out;
  }

  // Two information columns lost.  The two parity columns' first halves sum
  // to b_k + bar(b_k) + star(b_k), which unmixes to b_k; a_k follows, and
  // each instance decodes with both of its parities.
  const unsigned f1 = erased[0], f2 = erased[1];
  const RingElement z = ring_add(array[k].a, array[k + 1].a);
  const RingElement b_k =
      RingElement::from_coefficients(m, unmix_self_bar_star(payload(z)));
  const RingElement a_k = ring_add(array[k].a, b_k);
  std::vector<RingElement> a_cols(n, z0), b_cols(n, z0);
  for (unsigned j = 0; j < k; ++j) {
    if (j == f1 || j == f2) continue;
    a_cols[j] = array[j].a;
    b_cols[j] = array[j].b;
  }
  a_cols[k] = a_k;
  a_cols[k + 1] = array[k + 1].b;
  b_cols[k] = b_k;
  b_cols[k + 1] = array[k].b;
  const std::vector<RingElement> a = decode_base(base, a_cols, {f1, f2});
  const std::vector<RingElement> b = decode_base(base, b_cols, {f1, f2});
  return info_of(a, b);
}

std::vector<std::vector<unsigned>> evenodd_info_repair_sets(unsigned f,
                                                            unsigned k,
                                                            unsigned p) {
  const Modulus m = Modulus::evenodd_ring(p);
  if (k == 0 || k > p - 1)
    throw std::invalid_argument(
        "evenodd_info_repair_sets: require 1 <= k <= p-1");
  if (f >= k)
    throw std::invalid_argument(
        "evenodd_info_repair_sets: f must name an information column");
  const unsigned h = (p - 1) / 2;

  // Diagonals read from the diagonal parity: diagonal f (to expose the
  // adjuster) plus the diagonal through each second-half row of column f.
  std::vector<unsigned> diags = {f};
  for (unsigned i = h; i < p - 1; ++i)
    if (i + f != p - 1) diags.push_back((i + f) % p);
  std::sort(diags.begin(), diags.end());
  diags.erase(std::unique(diags.begin(), diags.end()), diags.end());

  std::vector<std::vector<unsigned>> sets(k + 2);
  for (unsigned i = 0; i < h; ++i) sets[k].push_back(i);
  sets[k + 1] = diags;
  std::vector<unsigned> with_adjuster = diags;
  with_adjuster.push_back(p - 1);
  for (unsigned j = 0; j < k; ++j) {
    if (j == f) continue;
    std::vector<unsigned>& s = sets[j];
    for (unsigned i = 0; i < h; ++i) s.push_back(i);
    for (unsigned c : with_adjuster) {
      const unsigned l = (c + p - j) % p;
      if (l <= p - 2) s.push_back(l);
    }
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
  }

  // Certify against a full information-bit basis before handing the family
  // out: the repair map is linear, so basis equality is exact equality.
  const CodeParams base = CodeParams::make(k, 2, k + 1, p);
  for (unsigned jj = 0; jj < k; ++jj) {
    for (unsigned s = 0; s + 1 < p; ++s) {
      std::vector<RingElement> info(k, RingElement::zero(m));
      info[jj] = RingElement::monomial(m, s);
      const CodewordArray w = evenodd_encode(info, base);
      std::vector<std::vector<std::uint8_t>> bits;
      for (unsigned c = 0; c < k + 2; ++c)
        bits.push_back(payload(w.columns[c][0]));
      BitReader read = [&](unsigned c, unsigned l) -> std::uint8_t {
        if (!std::binary_search(sets[c].begin(), sets[c].end(), l))
          throw std::logic_error(
              "evenodd_info_repair_sets: read outside declared set");
        return bits[c][l];
      };
      if (base_repair_from_sets(f, k, p, read) != bits[f])
        throw std::logic_error(
            "evenodd_info_repair_sets: family failed basis certification");
    }
  }
  return sets;
}

std::pair<TePair, AccessReport> te2_repair(
    unsigned f, const std::vector<TePair>& array,
    const std::vector<std::vector<unsigned>>& base_repair_sets) {
  if (array.size() < 3)
    throw std::invalid_argument("te2_repair: array needs k+2 >= 3 columns");
  const unsigned n = static_cast<unsigned>(array.size());
  const unsigned k = n - 2;
  if (f >= n)
    throw std::invalid_argument("te2_repair: column index out of range");
  const Modulus m = array[f == 0 ? 1 : 0].a.modulus();
  require_evenodd(m, "te2_repair");
  const unsigned p = m.size();
  for (unsigned c = 0; c < n; ++c)
    if (c != f && (array[c].a.modulus() != m || array[c].b.modulus() != m))
      throw std::invalid_argument("te2_repair: mixed column moduli");
  const CodeParams base = CodeParams::make(k, 2, k + 1, p);

  AccessTrace trace;
  trace.optimal_bits = optimal_bound(base, 2ull * (p - 1));

  if (f == k) {
    for (unsigned j = 0; j < k; ++j) trace.add_read(j, 1, p - 1);
    trace.add_read(k + 1, 1, p - 1);
    std::vector<const RingElement*> bs;
    for (unsigned j = 0; j < k; ++j) bs.push_back(&array[j].b);
    const RingElement b_k = row_parity(bs);
    const RingElement b_k1 = diagonal_parity(bs);
    const RingElement a_plus_b = ring_add(
        array[k + 1].a,
        ring_add(b_k, ring_add(te2_bar(b_k), te2_star(b_k))));
    return {TePair{a_plus_b, b_k1}, audit(trace)};
  }
  if (f == k + 1) {
    for (unsigned j = 0; j < k; ++j) trace.add_read(j, 1, p - 1);
    trace.add_read(k, 1, p - 1);
    std::vector<const RingElement*> as;
    for (unsigned j = 0; j < k; ++j) as.push_back(&array[j].a);
    const RingElement a_k = row_parity(as);
    const RingElement a_k1 = diagonal_parity(as);
    const RingElement b_k = ring_add(array[k].a, a_k);
    const RingElement mix =
        ring_add(a_k, ring_add(te2_bar(b_k), te2_star(b_k)));
    return {TePair{mix, a_k1}, audit(trace)};
  }

  // Information column: run the base partial repair on both instances.
  if ((p - 1) % 4 != 0)
    throw std::invalid_argument(
        "te2_repair: information repair requires p-1 divisible by 4");
  if (base_repair_sets.empty())
    throw std::invalid_argument(
        "te2_repair: information repair requires base repair sets");
  validate_repair_sets(base_repair_sets, f, k, p);
  const std::vector<std::vector<unsigned>>& sets = base_repair_sets;
  const unsigned h = (p - 1) / 2;

  for (unsigned j = 0; j < k; ++j)
    if (j != f)
      trace.add_read(j, 2, 2ull * sets[j].size());
  trace.add_read(k, 2, h + sets[k + 1].size());
  trace.add_read(k + 1, 2, h + sets[k + 1].size());

  // First halves of both parity columns: their sum is
  // b_k + bar(b_k) + star(b_k) restricted to whole pairs, so both column-k
  // halves unmix locally.
  std::vector<std::uint8_t> u(h, 0), col_k_a(h, 0);
  for (unsigned i = 0; i < h; ++i) {
    col_k_a[i] = array[k].a.coefficient(i);
    u[i] = static_cast<std::uint8_t>(col_k_a[i] ^
                                     array[k + 1].a.coefficient(i));
  }
  const std::vector<std::uint8_t> b_k_half = unmix_self_bar_star(u);
  std::vector<std::uint8_t> a_k_half(h, 0);
  for (unsigned i = 0; i < h; ++i)
    a_k_half[i] = static_cast<std::uint8_t>(col_k_a[i] ^ b_k_half[i]);

  auto strict = [&](unsigned c, unsigned l, std::uint8_t v) -> std::uint8_t {
    if (!std::binary_search(sets[c].begin(), sets[c].end(), l))
      throw std::logic_error("te2_repair: read outside declared set");
    return v;
  };
  BitReader read_a = [&](unsigned c, unsigned l) -> std::uint8_t {
    if (c == k) return strict(c, l, a_k_half[l]);
    if (c == k + 1) return strict(c, l, array[k + 1].b.coefficient(l));
    return strict(c, l, array[c].a.coefficient(l));
  };
  BitReader read_b = [&](unsigned c, unsigned l) -> std::uint8_t {
    if (c == k) return strict(c, l, b_k_half[l]);
    if (c == k + 1) return strict(c, l, array[k].b.coefficient(l));
    return strict(c, l, array[c].b.coefficient(l));
  };
  const RingElement a_f = RingElement::from_coefficients(
      m, base_repair_from_sets(f, k, p, read_a));
  const RingElement b_f = RingElement::from_coefficients(
      m, base_repair_from_sets(f, k, p, read_b));
  return {TePair{a_f, b_f}, audit(trace)};
}

}  // namespace xmds
