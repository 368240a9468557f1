#include "gapamp/amplify.hpp"

#include "gapamp/spectra.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace gapamp {

namespace {

constexpr Index kLocalDenseCap = Index{1} << 14;

SparseMatrix unit_entry(Index dim, Index r, Index c) {
  SparseMatrix e(dim, dim);
  e.insert(r, c) = 1.0;
  return e;
}

Index check_qubit_count(const FFHamiltonian& ham) {
  const Index qubits = ham.num_terms() + 1;
  if (qubits > 30) throw std::invalid_argument("local Hamiltonian: too many terms for a qubit register");
  return qubits;
}

void check_local_params(double gap_lower_bound, double d_exponent) {
  if (!(gap_lower_bound > 0.0)) throw std::invalid_argument("gap lower bound must be positive");
  if (!(d_exponent > 0.0 && d_exponent <= 2.0)) {
    throw std::invalid_argument("d_exponent must lie in (0, 2]");
  }
}

void require_unique_ground_state(const FFHamiltonian& ham) {
  const SpectrumReport spec = eig_full(assemble(ham));
  if (spec.null_dim != 1) {
    throw std::invalid_argument("local Hamiltonian needs a unique null vector of H, found null dimension " +
                                std::to_string(spec.null_dim));
  }
}

}  // namespace

std::string to_string(Flavor f) {
  switch (f) {
    case Flavor::G: return "G";
    case Flavor::Hprime: return "Hprime";
    case Flavor::Gtilde: return "Gtilde";
    case Flavor::Gbar: return "Gbar";
    case Flavor::LocalHprime: return "LocalHprime";
  }
  return "unknown";
}

Index reflection_ancilla_dim(const FFHamiltonian& ham, bool padded) {
  return padded ? 2 * ham.num_terms() : ham.num_terms();
}

DenseVector uniform_ancilla_state(Index ancilla_dim) {
  return DenseVector::Constant(ancilla_dim, 1.0 / std::sqrt(static_cast<double>(ancilla_dim)));
}

SparseSymOperator build_X(const FFHamiltonian& ham, bool padded) {
  const Index anc = reflection_ancilla_dim(ham, padded);
  const Index n = ham.dim();
  SparseMatrix x(n * anc, n * anc);
  for (Index k = 0; k < ham.num_terms(); ++k) x += kron(ham.term(k).matrix, unit_entry(anc, k, k));
  return SparseSymOperator(std::move(x));
}

SparseSymOperator build_U(const FFHamiltonian& ham, bool padded) {
  const SparseSymOperator x = build_X(ham, padded);
  return SparseSymOperator(SparseMatrix(sparse_identity(x.dim()) - 2.0 * x.matrix()));
}

SparseSymOperator build_P(Index system_dim, Index ancilla_dim) {
  const DenseVector o = uniform_ancilla_state(ancilla_dim);
  return SparseSymOperator(kron(sparse_identity(system_dim), outer(o, o)));
}

AmplifiedOperator build_G(const FFHamiltonian& ham, bool padded) {
  const Index anc = reflection_ancilla_dim(ham, padded);
  const SparseMatrix u = build_U(ham, padded).matrix();
  const SparseMatrix p = build_P(ham.dim(), anc).matrix();
  SparseMatrix upu = u * p;
  upu = upu * u;
  AmplifiedOperator g;
  g.op = SparseSymOperator(SparseMatrix(upu - p), 1e-12);
  g.system_dim = ham.dim();
  g.ancilla_dim = anc;
  g.flavor = Flavor::G;
  g.padded = padded;
  g.l_eff = static_cast<double>(anc);
  return g;
}

AmplifiedOperator build_Hprime(const FFHamiltonian& ham, double gap_lower_bound, bool padded) {
  if (!(gap_lower_bound > 0.0)) throw std::invalid_argument("build_Hprime: gap lower bound must be positive");
  AmplifiedOperator h = build_G(ham, padded);
  const double delta = std::sqrt(gap_lower_bound * h.l_eff);
  const SparseMatrix p = build_P(ham.dim(), h.ancilla_dim).matrix();
  const SparseMatrix penalty = sparse_identity(p.rows()) - p;
  h.op = SparseSymOperator(SparseMatrix(h.l_eff * h.op.matrix() + delta * penalty), 1e-12);
  h.flavor = Flavor::Hprime;
  h.delta = delta;
  return h;
}

AmplifiedOperator build_Gtilde(const FFHamiltonian& ham) {
  const Index anc = ham.num_terms() + 1;
  const Index n = ham.dim();
  SparseMatrix gt(n * anc, n * anc);
  for (Index k = 0; k < ham.num_terms(); ++k) {
    const ProjectorTerm& t = ham.term(k);
    const SparseMatrix hop = unit_entry(anc, k + 1, 0) + unit_entry(anc, 0, k + 1);
    gt += std::sqrt(t.coefficient) * kron(t.matrix, hop);
  }
  AmplifiedOperator r;
  r.op = SparseSymOperator(std::move(gt));
  r.system_dim = n;
  r.ancilla_dim = anc;
  r.flavor = Flavor::Gtilde;
  r.l_eff = static_cast<double>(ham.num_terms());
  return r;
}

AmplifiedOperator build_Gbar(const FFHamiltonian& ham, double gap_lower_bound) {
  if (!(gap_lower_bound > 0.0)) throw std::invalid_argument("build_Gbar: gap lower bound must be positive");
  AmplifiedOperator r = build_Gtilde(ham);
  const double penalty = std::sqrt(gap_lower_bound) / 2.0;
  SparseMatrix not_flag = sparse_identity(r.ancilla_dim) - unit_entry(r.ancilla_dim, 0, 0);
  r.op = SparseSymOperator(SparseMatrix(r.op.matrix() + penalty * kron(sparse_identity(r.system_dim), not_flag)));
  r.flavor = Flavor::Gbar;
  r.delta = penalty;
  return r;
}

std::vector<std::uint32_t> qubit_sector_basis(int num_qubits, const std::vector<int>& sectors) {
  if (num_qubits < 1 || num_qubits > 30) throw std::invalid_argument("qubit_sector_basis: bad qubit count");
  std::vector<int> sorted = sectors;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  std::vector<std::uint32_t> basis;
  const std::uint32_t end = std::uint32_t{1} << num_qubits;
  for (int a : sorted) {
    if (a < 0 || a > num_qubits) throw std::out_of_range("qubit_sector_basis: sector out of range");
    for (std::uint32_t b = 0; b < end; ++b) {
      if (std::popcount(b) == a) basis.push_back(b);
    }
  }
  return basis;
}

LocalTerms build_local_terms(const FFHamiltonian& ham, const std::vector<std::uint32_t>& qubit_basis) {
  const Index n = ham.dim();
  const Index q = static_cast<Index>(qubit_basis.size());
  const Index qubits = check_qubit_count(ham);
  std::unordered_map<std::uint32_t, Index> position;
  position.reserve(qubit_basis.size());
  for (Index i = 0; i < q; ++i) position.emplace(qubit_basis[static_cast<std::size_t>(i)], i);

  std::vector<Triplet> coupling;
  std::vector<Triplet> flag, particles, number;
  for (Index pos = 0; pos < q; ++pos) {
    const std::uint32_t b = qubit_basis[static_cast<std::size_t>(pos)];
    const int count = std::popcount(b);
    for (Index i = 0; i < n; ++i) {
      const Index row = i * q + pos;
      if ((b & 1u) == 0) flag.emplace_back(row, row, 1.0);
      if (count != 1) particles.emplace_back(row, row, 2.0 * (count - 1));
      if (count != 0) number.emplace_back(row, row, static_cast<double>(count));
    }
    // σ⁺_k σ⁻_0: the particle on the flag qubit hops to qubit k, and back (h.c.).
    if ((b & 1u) == 0) continue;
    for (Index k = 1; k < qubits; ++k) {
      const std::uint32_t bit = std::uint32_t{1} << k;
      if (b & bit) continue;
      const auto it = position.find((b ^ 1u) | bit);
      if (it == position.end()) continue;
      const Index target = it->second;
      const ProjectorTerm& t = ham.term(k - 1);
      const double w = std::sqrt(t.coefficient);
      for (Index col = 0; col < t.matrix.outerSize(); ++col) {
        for (SparseMatrix::InnerIterator e(t.matrix, col); e; ++e) {
          const double v = w * e.value();
          coupling.emplace_back(e.row() * q + target, col * q + pos, v);
          coupling.emplace_back(col * q + pos, e.row() * q + target, v);
        }
      }
    }
  }
  auto make = [&](std::vector<Triplet>& t) {
    SparseMatrix m(n * q, n * q);
    m.setFromTriplets(t.begin(), t.end());
    return SparseSymOperator(std::move(m), 1e-12);
  };
  return LocalTerms{make(coupling), make(flag), make(particles), make(number)};
}

AmplifiedOperator build_local_Hprime_sectors(const FFHamiltonian& ham, double gap_lower_bound,
                                             double d_exponent, const std::vector<int>& sectors) {
  check_local_params(gap_lower_bound, d_exponent);
  const Index qubits = check_qubit_count(ham);
  require_unique_ground_state(ham);
  std::vector<std::uint32_t> basis = qubit_sector_basis(static_cast<int>(qubits), sectors);
  if (static_cast<Index>(basis.size()) * ham.dim() > kLocalDenseCap * 64) {
    throw std::invalid_argument("build_local_Hprime: sector dimension too large");
  }
  const LocalTerms terms = build_local_terms(ham, basis);
  const double L = static_cast<double>(ham.num_terms());
  const double scale = 1.0 / std::pow(L, 1.0 / d_exponent);
  const double flag_weight = std::sqrt(gap_lower_bound) / 2.0;
  SparseMatrix h = scale * (terms.coupling.matrix() + flag_weight * terms.flag_penalty.matrix()) +
                   2.0 * terms.particle_penalty.matrix();

  AmplifiedOperator r;
  r.op = SparseSymOperator(std::move(h), 1e-12);
  r.system_dim = ham.dim();
  r.ancilla_dim = static_cast<Index>(basis.size());
  r.flavor = Flavor::LocalHprime;
  r.delta = flag_weight;
  r.l_eff = L;
  r.d_exponent = d_exponent;
  r.qubit_basis = std::move(basis);
  return r;
}

AmplifiedOperator build_local_Hprime(const FFHamiltonian& ham, double gap_lower_bound, double d_exponent) {
  check_local_params(gap_lower_bound, d_exponent);
  const Index qubits = check_qubit_count(ham);
  if (qubits > 14 || (ham.dim() << qubits) > kLocalDenseCap) {
    throw std::invalid_argument("build_local_Hprime: total dimension exceeds 2^14; use sector-restricted assembly");
  }
  std::vector<int> all(static_cast<std::size_t>(qubits) + 1);
  for (std::size_t a = 0; a < all.size(); ++a) all[a] = static_cast<int>(a);
  return build_local_Hprime_sectors(ham, gap_lower_bound, d_exponent, all);
}

SparseSymOperator restrict_to_sector(const SparseSymOperator& op, Index system_dim,
                                     const std::vector<std::uint32_t>& qubit_basis, int a) {
  const Index q = static_cast<Index>(qubit_basis.size());
  if (op.dim() != system_dim * q) throw std::invalid_argument("restrict_to_sector: layout mismatch");
  std::vector<Index> map(static_cast<std::size_t>(op.dim()), -1);
  Index next = 0;
  for (Index i = 0; i < system_dim; ++i) {
    for (Index pos = 0; pos < q; ++pos) {
      if (std::popcount(qubit_basis[static_cast<std::size_t>(pos)]) == a) {
        map[static_cast<std::size_t>(i * q + pos)] = next++;
      }
    }
  }
  if (next == 0) throw std::out_of_range("restrict_to_sector: sector " + std::to_string(a) + " not in basis");
  std::vector<Triplet> t;
  const SparseMatrix& m = op.matrix();
  for (Index col = 0; col < m.outerSize(); ++col) {
    const Index c = map[static_cast<std::size_t>(col)];
    if (c < 0) continue;
    for (SparseMatrix::InnerIterator e(m, col); e; ++e) {
      const Index r = map[static_cast<std::size_t>(e.row())];
      if (r >= 0) t.emplace_back(r, c, e.value());
    }
  }
  SparseMatrix block(next, next);
  block.setFromTriplets(t.begin(), t.end());
  return SparseSymOperator(std::move(block), 0.0);
}

SparseSymOperator restrict_to_sector(const AmplifiedOperator& op, int a) {
  if (op.flavor != Flavor::LocalHprime) throw std::invalid_argument("restrict_to_sector: needs a LocalHprime operator");
  const int qubits = static_cast<int>(op.l_eff) + 1;
  if (a < 0 || a > qubits) throw std::out_of_range("restrict_to_sector: particle count out of range");
  return restrict_to_sector(op.op, op.system_dim, op.qubit_basis, a);
}

double su2_ladder_coefficient(int S, int m) {
  if (S < 0 || m < -S || m > S + 2 || ((m - S) % 2) != 0) {
    throw std::domain_error("su2_ladder_coefficient: need -S <= m <= S + 2 with m ≡ S (mod 2)");
  }
  return 0.5 * std::sqrt(static_cast<double>(S + m) * static_cast<double>(S - m + 2));
}

}  // namespace gapamp
