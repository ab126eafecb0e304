#include "xmds/transform.hpp"

#include <stdexcept>

namespace xmds {

namespace {

// Local label of each column under `spec`, or -1 for columns outside the
// window.
std::vector<int> window_labels(const TransformSpec& spec, unsigned n) {
  std::vector<int> local(n, -1);
  for (unsigned u = 0; u < spec.width(); ++u) {
    local[spec.member(u, n)] = static_cast<int>(u);
  }
  return local;
}

}  // namespace

TransformSpec TransformSpec::make(unsigned partition_start, unsigned width,
                                  RingElement coefficient, bool systematic) {
  if (width < 1) {
    throw std::invalid_argument("TransformSpec: width must be >= 1");
  }
  const RingElement mix =
      coefficient + RingElement::one(coefficient.modulus());
  std::optional<RingElement> inv = ring_inv(mix);
  if (!inv) {
    throw NotInvertible(
        "TransformSpec: coefficient + 1 is not invertible; pair solving "
        "would be ill-defined");
  }
  return TransformSpec(partition_start, width, std::move(coefficient),
                       std::move(*inv), systematic);
}

TransformSpec TransformSpec::standard(const CodeParams& params,
                                      unsigned partition_start,
                                      bool systematic) {
  const Modulus m = params.ring();
  const RingElement coefficient =
      RingElement::one(m) + RingElement::monomial(m, params.e);
  return make(partition_start, params.t(), coefficient, systematic);
}

InstanceBundle InstanceBundle::make(std::vector<CodewordArray> instances) {
  if (instances.empty()) {
    throw std::invalid_argument("InstanceBundle: no instances");
  }
  const CodeParams& first = instances[0].params;
  const unsigned rows = first.rows();
  for (const CodewordArray& inst : instances) {
    const CodeParams& q = inst.params;
    if (q.k != first.k || q.r != first.r || q.d != first.d ||
        q.p != first.p || q.e != first.e || q.layers != first.layers) {
      throw std::invalid_argument("InstanceBundle: parameter mismatch");
    }
    if (inst.columns.size() != first.n()) {
      throw std::invalid_argument("InstanceBundle: column count mismatch");
    }
    for (const auto& column : inst.columns) {
      if (column.size() != rows) {
        throw std::invalid_argument("InstanceBundle: row count mismatch");
      }
    }
  }
  InstanceBundle bundle;
  bundle.instances = std::move(instances);
  return bundle;
}

CodewordArray first_transform(const InstanceBundle& bundle,
                              const TransformSpec& spec) {
  const std::vector<CodewordArray>& inst = bundle.instances;
  if (inst.empty()) {
    throw std::invalid_argument("first_transform: empty bundle");
  }
  const CodeParams& base = inst[0].params;
  const unsigned t = spec.width();
  if (inst.size() != t) {
    throw std::invalid_argument(
        "first_transform: bundle size differs from spec width");
  }
  if (base.t() != t) {
    throw std::invalid_argument(
        "first_transform: spec width differs from d-k+1");
  }
  if (spec.coefficient().modulus() != base.ring()) {
    throw std::invalid_argument("first_transform: coefficient ring mismatch");
  }
  const unsigned n = base.n();
  const unsigned rows_in = base.rows();
  const CodeParams out_params =
      (t == 1) ? base
               : CodeParams::make(base.k, base.r, base.d, base.p, base.e,
                                  base.layers + 1);
  CodewordArray out = CodewordArray::zero(out_params);
  const std::vector<int> local = window_labels(spec, n);

  for (unsigned c = 0; c < n; ++c) {
    for (unsigned l = 0; l < t; ++l) {
      for (unsigned rr = 0; rr < rows_in; ++rr) {
        RingElement cell = inst[l].columns[c][rr];
        if (local[c] >= 0) {
          const unsigned i = static_cast<unsigned>(local[c]);
          const unsigned mate = spec.member(l, n);
          if (l < i) {
            cell = cell + inst[i].columns[mate][rr];
          } else if (l > i) {
            cell = cell + poly_mul(spec.coefficient(),
                                   inst[i].columns[mate][rr]);
          }
        }
        out.columns[c][l * rows_in + rr] = cell;
      }
    }
  }
  return out;
}

std::pair<RingElement, RingElement> pair_solve(const RingElement& u,
                                               const RingElement& v,
                                               const TransformSpec& spec) {
  if (u.modulus() != v.modulus() ||
      u.modulus() != spec.coefficient().modulus()) {
    throw std::invalid_argument("pair_solve: ring mismatch");
  }
  // u + v = (coefficient + 1) * a_ji.
  const RingElement a_ji = poly_mul(spec.mix_inverse(), u + v);
  const RingElement a_ij = v + a_ji;
  return {a_ij, a_ji};
}

std::pair<std::vector<RingElement>, std::vector<RingElement>> pair_solve(
    const std::vector<RingElement>& u, const std::vector<RingElement>& v,
    const TransformSpec& spec) {
  if (u.size() != v.size()) {
    throw std::invalid_argument("pair_solve: vector length mismatch");
  }
  std::vector<RingElement> a_ij;
  std::vector<RingElement> a_ji;
  a_ij.reserve(u.size());
  a_ji.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    auto [x, y] = pair_solve(u[i], v[i], spec);
    a_ij.push_back(std::move(x));
    a_ji.push_back(std::move(y));
  }
  return {std::move(a_ij), std::move(a_ji)};
}

namespace {

// The substituted value of information column j at instance l under `spec`:
// window columns get the change of variables that makes the first transform
// come out systematic, other columns pass through.
RingElement substituted_cell(const std::vector<std::vector<RingElement>>& info,
                             const TransformSpec& spec,
                             const std::vector<int>& local, unsigned n,
                             unsigned j, unsigned l) {
  if (local[j] < 0) {
    return info[j][l];
  }
  const unsigned u = static_cast<unsigned>(local[j]);
  if (u == l) {
    return info[j][l];
  }
  const RingElement& c = spec.mix_inverse();
  const RingElement& mate = info[spec.member(l, n)][u];
  if (u > l) {
    return poly_mul(c, info[j][l] + mate);
  }
  const RingElement one = RingElement::one(c.modulus());
  return poly_mul(c, info[j][l]) + poly_mul(one + c, mate);
}

}  // namespace

CodewordArray systematic_transform(
    const std::vector<std::vector<RingElement>>& info,
    const TransformSpec& spec, const CodeParams& params) {
  const unsigned t = spec.width();
  const unsigned n = params.n();
  if (params.t() != t) {
    throw std::invalid_argument(
        "systematic_transform: spec width differs from d-k+1");
  }
  if (info.size() != params.k) {
    throw std::invalid_argument("systematic_transform: expected k columns");
  }
  for (const auto& column : info) {
    if (column.size() != t) {
      throw std::invalid_argument(
          "systematic_transform: expected t instances per column");
    }
  }
  for (unsigned u = 0; u < t; ++u) {
    if (spec.member(u, n) >= params.k) {
      throw std::invalid_argument(
          "systematic_transform: window must lie inside information columns");
    }
  }
  const CodeParams out_params =
      (t == 1) ? CodeParams::make(params.k, params.r, params.d, params.p,
                                  params.e, 0)
               : CodeParams::make(params.k, params.r, params.d, params.p,
                                  params.e, 1);
  CodewordArray out = CodewordArray::zero(out_params);
  const std::vector<int> local = window_labels(spec, n);

  for (unsigned l = 0; l < t; ++l) {
    std::vector<RingElement> substituted;
    substituted.reserve(params.k);
    for (unsigned j = 0; j < params.k; ++j) {
      out.columns[j][l] = info[j][l];
      substituted.push_back(substituted_cell(info, spec, local, n, j, l));
    }
    for (unsigned h = 0; h < params.r; ++h) {
      RingElement parity = RingElement::zero(params.ring());
      for (unsigned j = 0; j < params.k; ++j) {
        parity = parity + shift_mul(substituted[j], (j * h) % params.p);
      }
      out.columns[params.k + h][l] = parity;
    }
  }
  return out;
}

bool transform_equivalence_check(const InstanceBundle& bundle,
                                 const TransformSpec& spec) {
  const std::vector<CodewordArray>& inst = bundle.instances;
  if (inst.empty() || inst[0].params.layers != 0) {
    throw std::invalid_argument(
        "transform_equivalence_check: expected single-row base codewords");
  }
  const CodeParams& params = inst[0].params;
  const unsigned t = spec.width();
  const unsigned n = params.n();
  if (inst.size() != t) {
    throw std::invalid_argument(
        "transform_equivalence_check: bundle size differs from spec width");
  }

  // Raw information cells: info[j][l] = column j of instance l.
  std::vector<std::vector<RingElement>> info;
  info.reserve(params.k);
  for (unsigned j = 0; j < params.k; ++j) {
    std::vector<RingElement> row;
    row.reserve(t);
    for (unsigned l = 0; l < t; ++l) {
      row.push_back(inst[l].columns[j][0]);
    }
    info.push_back(std::move(row));
  }

  const CodewordArray systematic = systematic_transform(info, spec, params);

  // Substitute the window columns, re-encode every instance, and run the
  // first transform over the substituted bundle.
  const std::vector<int> local = window_labels(spec, n);
  std::vector<CodewordArray> substituted;
  substituted.reserve(t);
  for (unsigned l = 0; l < t; ++l) {
    std::vector<RingElement> cols;
    cols.reserve(params.k);
    for (unsigned j = 0; j < params.k; ++j) {
      cols.push_back(substituted_cell(info, spec, local, n, j, l));
    }
    substituted.push_back(evenodd_encode(cols, params));
  }
  const CodewordArray first =
      first_transform(InstanceBundle::make(std::move(substituted)), spec);

  return first.columns == systematic.columns;
}

}  // namespace xmds
