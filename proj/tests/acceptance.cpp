// Acceptance run: one PASS/FAIL line per criterion, tolerances fixed below.

#include "oracles.hpp"

#include "gapamp/amplify.hpp"
#include "gapamp/edge_coloring.hpp"
#include "gapamp/experiments.hpp"
#include "gapamp/ffham.hpp"
#include "gapamp/graph.hpp"
#include "gapamp/io.hpp"
#include "gapamp/lattice.hpp"
#include "gapamp/searchlab.hpp"
#include "gapamp/spectra.hpp"
#include "gapamp/stoqmc.hpp"
#include "gapamp/trotter.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <future>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace gapamp;
namespace fs = std::filesystem;

namespace {

constexpr double kNullTol = 1e-8;

struct Verdict {
  bool pass = true;
  std::string detail;
  void require(bool ok, const std::string& what) {
    if (!ok && pass) detail = what;
    pass = pass && ok;
  }
};

struct Instance {
  std::string label;
  FFHamiltonian ham;
};

// Dense oracles written from the defining formulas.
DenseMatrix dense_projector(const FFHamiltonian& h, Index k) { return DenseMatrix(h.term(k).matrix); }

DenseMatrix unit_hamiltonian(const FFHamiltonian& h) {
  DenseMatrix s = DenseMatrix::Zero(h.dim(), h.dim());
  for (Index k = 0; k < h.num_terms(); ++k) s += dense_projector(h, k);
  return s;
}

DenseMatrix weighted_hamiltonian(const FFHamiltonian& h) {
  DenseMatrix s = DenseMatrix::Zero(h.dim(), h.dim());
  for (Index k = 0; k < h.num_terms(); ++k) s += h.term(k).coefficient * dense_projector(h, k);
  return s;
}

struct ReflectionOracle {
  Index D = 0;
  double l_eff = 0.0;
  DenseMatrix X, U, P, G, Hp;
};

ReflectionOracle reflection_oracle(const FFHamiltonian& h, double gap) {
  ReflectionOracle o;
  const Index L = h.num_terms();
  o.D = 2 * L;
  o.l_eff = static_cast<double>(o.D);
  const Index n = h.dim() * o.D;
  o.X = DenseMatrix::Zero(n, n);
  for (Index k = 0; k < L; ++k) o.X += oracle::kron(dense_projector(h, k), oracle::basis_projector(o.D, k));
  o.U = DenseMatrix::Identity(n, n) - 2.0 * o.X;
  const DenseMatrix anc = DenseMatrix::Constant(o.D, o.D, 1.0 / static_cast<double>(o.D));
  o.P = oracle::kron(DenseMatrix::Identity(h.dim(), h.dim()), anc);
  o.G = o.U * o.P * o.U - o.P;
  const double delta = std::sqrt(gap * o.l_eff);
  o.Hp = o.l_eff * o.G + delta * (DenseMatrix::Identity(n, n) - o.P);
  return o;
}

// Spectral gap about 0 and null dimension from an ascending spectrum.
std::pair<double, int> gap_and_null(const std::vector<double>& ev) {
  double gap = std::numeric_limits<double>::infinity();
  int null = 0;
  for (double e : ev) {
    if (std::abs(e) <= kNullTol) ++null;
    else gap = std::min(gap, std::abs(e));
  }
  return {gap, null};
}

// Null vectors of a dense symmetric matrix.
DenseMatrix null_vectors(const DenseMatrix& h) {
  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
  std::vector<Index> cols;
  for (Index i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(es.eigenvalues()(i)) <= kNullTol) cols.push_back(i);
  DenseMatrix out(h.rows(), static_cast<Index>(cols.size()));
  for (std::size_t c = 0; c < cols.size(); ++c) out.col(static_cast<Index>(c)) = es.eigenvectors().col(cols[c]);
  return out;
}

std::vector<Instance> theorem_instances() {
  std::vector<Instance> out;
  std::mt19937_64 rng(20240917);
  const Index dims[] = {4, 8, 16, 32, 64, 128};
  for (int i = 0; i < 54; ++i) {
    RandomFFSpec spec;
    spec.dim = dims[i % 6];
    const Index max_terms = spec.dim >= 128 ? 4 : 8;
    spec.num_terms = 2 + static_cast<Index>(rng() % static_cast<std::uint64_t>(max_terms - 1));
    spec.null_dim = 1 + static_cast<Index>(rng() % 2);
    spec.mixed_coefficients = true;
    out.push_back({"random N=" + std::to_string(spec.dim) + " L=" + std::to_string(spec.num_terms),
                   random_frustration_free(spec, rng)});
  }
  RandomFFSpec wide;
  wide.dim = 256;
  wide.num_terms = 2;
  wide.mixed_coefficients = true;
  out.push_back({"random N=256 L=2", random_frustration_free(wide, rng)});
  for (Index M : {8, 16, 32}) {
    const RegularGraph g = random_regular_expander(M, std::min<int>(8, static_cast<int>(M) - 1), 0.5, 500 + M);
    out.push_back({"search M=" + std::to_string(M), build_search_ff(g, edge_coloring(g), M / 2).ham});
  }
  return out;
}

template <class T, class F>
std::vector<T> parallel(std::size_t n, F f) {
  const std::size_t workers = static_cast<std::size_t>(std::max(1, worker_count()));
  std::vector<T> out(n);
  std::vector<std::future<void>> pool;
  std::atomic<std::size_t> next{0};
  for (std::size_t w = 0; w < std::min(workers, n); ++w) {
    pool.push_back(std::async(std::launch::async, [&] {
      for (std::size_t i = next++; i < n; i = next++) out[i] = f(i);
    }));
  }
  for (auto& p : pool) p.get();
  return out;
}

// Criteria 1 to 4 share the instance set.
struct InstanceResult {
  std::string label;
  int null_h = 0, null_hp = 0;
  double residual = 0.0;
  double gap_hp = 0.0, bound = 0.0;
  double lib_vs_oracle = 0.0;
  double property1 = 0.0, x_idem = 0.0, u_inv = 0.0;
  double gtilde_dev = 0.0;
  bool gtilde_count_ok = true;
  double block_dev = 0.0, block_eig_dev = 0.0, block_leak = 0.0;
  double sin_margin = std::numeric_limits<double>::infinity();
};

InstanceResult check_instance(const Instance& inst) {
  InstanceResult r;
  r.label = inst.label;
  const FFHamiltonian& h = inst.ham;
  const DenseMatrix hu = unit_hamiltonian(h);
  const std::vector<double> ev_h = oracle::eigenvalues(hu);
  const auto [gap_h, null_h] = gap_and_null(ev_h);
  r.null_h = null_h;

  // Criterion 1.
  const ReflectionOracle o = reflection_oracle(h, gap_h);
  const AmplifiedOperator hp = build_Hprime(h, gap_h);
  r.lib_vs_oracle = max_abs(DenseMatrix(hp.op.dense() - o.Hp));
  const auto [gap_hp, null_hp] = gap_and_null(oracle::eigenvalues(o.Hp));
  r.null_hp = null_hp;
  r.gap_hp = gap_hp;
  r.bound = std::sqrt(gap_h * o.l_eff) / 6.0;
  const DenseVector anc = DenseVector::Constant(o.D, 1.0 / std::sqrt(static_cast<double>(o.D)));
  const DenseMatrix psi = null_vectors(hu);
  for (Index j = 0; j < psi.cols(); ++j) {
    const DenseVector v = oracle::kron(DenseMatrix(psi.col(j)), DenseMatrix(anc));
    r.residual = std::max(r.residual, (hp.op.matrix() * v).norm());
  }

  // Criterion 2.
  const DenseMatrix x = build_X(h, true).dense();
  const DenseMatrix u = build_U(h, true).dense();
  const DenseMatrix p = build_P(h.dim(), o.D).dense();
  const DenseMatrix a = DenseMatrix::Identity(h.dim(), h.dim()) - (2.0 / o.l_eff) * hu;
  r.property1 = max_abs(DenseMatrix(p * u * p - oracle::kron(a, DenseMatrix(anc * anc.transpose()))));
  r.x_idem = max_abs(DenseMatrix(x * x - x));
  r.u_inv = max_abs(DenseMatrix(u * u - DenseMatrix::Identity(u.rows(), u.cols())));

  // Criterion 3: nonzero spectrum of G~ is {±√λ_j} of Σ a_k Π_k.
  const std::vector<double> ev_w = oracle::eigenvalues(weighted_hamiltonian(h));
  std::vector<double> expect;
  for (double l : ev_w)
    if (std::abs(l) > kNullTol) {
      expect.push_back(std::sqrt(l));
      expect.push_back(-std::sqrt(l));
    }
  std::sort(expect.begin(), expect.end());
  std::vector<double> got;
  for (double e : oracle::eigenvalues(build_Gtilde(h).op.dense()))
    if (std::abs(e) > 1e-6) got.push_back(e);
  r.gtilde_count_ok = got.size() == expect.size();
  if (r.gtilde_count_ok)
    for (std::size_t i = 0; i < got.size(); ++i) r.gtilde_dev = std::max(r.gtilde_dev, std::abs(got[i] - expect[i]));

  // Criterion 4.
  const AmplifiedOperator g = build_G(h, true);
  for (const BlockReport& b : verify_all_blocks(h, g)) {
    const double cos_a = 1.0 - 2.0 * b.lambda / o.l_eff;
    const double sin_a = std::sqrt(std::max(0.0, 1.0 - cos_a * cos_a));
    r.block_dev = std::max({r.block_dev, b.deviation, std::abs(b.cos_alpha - cos_a)});
    r.block_leak = std::max(r.block_leak, b.leakage);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(b.block, Eigen::EigenvaluesOnly);
    r.block_eig_dev = std::max({r.block_eig_dev, std::abs(es.eigenvalues()(0) + sin_a), std::abs(es.eigenvalues()(1) - sin_a)});
    r.sin_margin = std::min(r.sin_margin, sin_a - std::sqrt(2.0 * b.lambda / o.l_eff));
  }
  return r;
}

std::string fmt_e(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

void report(int n, const std::string& name, const Verdict& v, const std::string& measured, int& failed) {
  std::printf("%s %2d %s: %s%s%s\n", v.pass ? "PASS" : "FAIL", n, name.c_str(), measured.c_str(),
              v.pass ? "" : " | ", v.pass ? "" : v.detail.c_str());
  std::fflush(stdout);
  failed += !v.pass;
}

FFHamiltonian trotter_instance() {
  std::mt19937_64 rng(77);
  RandomFFSpec spec;
  spec.dim = 4;
  spec.num_terms = 2;
  spec.mixed_coefficients = false;
  return random_frustration_free(spec, rng);
}

std::string csv_body(const fs::path& f) {
  std::istringstream is(read_text(f));
  std::string line, out;
  while (std::getline(is, line))
    if (line.empty() || line[0] != '#') out += line + "\n";
  return out;
}

}  // namespace

int main() {
  int failed = 0;
  const auto t0 = std::chrono::steady_clock::now();

  const std::vector<Instance> instances = theorem_instances();
  const std::vector<InstanceResult> results =
      parallel<InstanceResult>(instances.size(), [&](std::size_t i) { return check_instance(instances[i]); });

  {
    Verdict v;
    double worst_res = 0.0, worst_ratio = std::numeric_limits<double>::infinity(), worst_lib = 0.0;
    for (const auto& r : results) {
      v.require(r.null_h == r.null_hp, r.label + ": null dim " + std::to_string(r.null_hp) + " vs " + std::to_string(r.null_h));
      v.require(r.residual <= 1e-9, r.label + ": residual " + fmt_e(r.residual));
      v.require(r.gap_hp >= r.bound, r.label + ": gap " + fmt_e(r.gap_hp) + " < " + fmt_e(r.bound));
      v.require(r.lib_vs_oracle <= 1e-12, r.label + ": H' differs from its definition by " + fmt_e(r.lib_vs_oracle));
      worst_res = std::max(worst_res, r.residual);
      worst_ratio = std::min(worst_ratio, r.gap_hp / r.bound);
      worst_lib = std::max(worst_lib, r.lib_vs_oracle);
    }
    report(1, "amplified gap and null space", v,
           std::to_string(results.size()) + " instances, max residual " + fmt_e(worst_res) + ", min gap/bound " +
               fmt_e(worst_ratio) + ", max |H'-oracle| " + fmt_e(worst_lib),
           failed);
  }
  {
    Verdict v;
    double worst = 0.0;
    for (const auto& r : results) {
      v.require(r.property1 <= 1e-12, r.label + ": PUP identity off by " + fmt_e(r.property1));
      v.require(r.x_idem <= 1e-12, r.label + ": X^2 - X = " + fmt_e(r.x_idem));
      v.require(r.u_inv <= 1e-12, r.label + ": U^2 - 1 = " + fmt_e(r.u_inv));
      worst = std::max({worst, r.property1, r.x_idem, r.u_inv});
    }
    report(2, "reflection identities", v, "max entry deviation " + fmt_e(worst), failed);
  }
  {
    Verdict v;
    double worst = 0.0;
    for (const auto& r : results) {
      v.require(r.gtilde_count_ok, r.label + ": nonzero eigenvalue count differs");
      v.require(r.gtilde_dev <= 1e-8, r.label + ": G~ spectrum off by " + fmt_e(r.gtilde_dev));
      worst = std::max(worst, r.gtilde_dev);
    }
    report(3, "flagged-ancilla spectrum", v, "max |eig - (+-sqrt lambda)| " + fmt_e(worst), failed);
  }
  {
    Verdict v;
    double dev = 0.0, eig = 0.0, margin = std::numeric_limits<double>::infinity();
    for (const auto& r : results) {
      v.require(r.block_dev <= 1e-9, r.label + ": block deviation " + fmt_e(r.block_dev));
      v.require(r.block_leak <= 1e-9, r.label + ": block leakage " + fmt_e(r.block_leak));
      v.require(r.block_eig_dev <= 1e-9, r.label + ": block eigenvalues off by " + fmt_e(r.block_eig_dev));
      v.require(r.sin_margin >= -1e-12, r.label + ": sin alpha below sqrt(2 lambda/L_eff)");
      dev = std::max({dev, r.block_dev, r.block_leak});
      eig = std::max(eig, r.block_eig_dev);
      margin = std::min(margin, r.sin_margin);
    }
    report(4, "two-dimensional blocks", v,
           "max block deviation " + fmt_e(dev) + ", max eig deviation " + fmt_e(eig) + ", min sin margin " + fmt_e(margin),
           failed);
  }

  // Criterion 5.
  {
    struct Cert {
      Index M;
      double lambda, gap, gap_hp, bound_hp;
      int chi, d;
      bool proper;
    };
    const std::vector<Index> sizes{8, 16, 32, 64, 128, 256};
    const std::vector<Cert> certs = parallel<Cert>(sizes.size(), [&](std::size_t i) {
      const Index M = sizes[i];
      const int d = std::min<int>(8, static_cast<int>(M) - 1);
      const RegularGraph g = random_regular_expander(M, d, 0.5, 900 + static_cast<std::uint64_t>(M));
      const EdgeColoring c = edge_coloring(g);
      bool proper = c.color.size() == g.edges.size();
      for (std::size_t a = 0; a < g.edges.size() && proper; ++a)
        for (std::size_t b = a + 1; b < g.edges.size() && proper; ++b) {
          const auto [u1, v1] = g.edges[a];
          const auto [u2, v2] = g.edges[b];
          if (c.color[a] == c.color[b] && (u1 == u2 || u1 == v2 || v1 == u2 || v1 == v2)) proper = false;
        }
      std::vector<double> adj = oracle::eigenvalues(DenseMatrix(g.adjacency) / d);
      const SearchInstance inst = build_search_ff(g, c, M - 1);
      const double gap = gap_and_null(oracle::eigenvalues(assemble(inst.ham).dense())).first;
      const AmplifiedOperator hp = build_Hprime(inst.ham, gap);
      EigOptions opts;
      opts.dense_cap = 8192;
      const double gap_hp = gap_and_null(eig_full(hp.op, opts).eigenvalues).first;
      return Cert{M, adj[adj.size() - 2], gap, gap_hp, std::sqrt(gap * hp.l_eff) / 6.0, c.chi, d, proper};
    });
    Verdict v;
    std::string measured;
    for (const auto& c : certs) {
      const std::string m = "M=" + std::to_string(c.M);
      v.require(c.lambda <= 0.5 + 1e-12, m + ": lambda " + fmt_e(c.lambda));
      v.require(c.proper, m + ": coloring not proper");
      v.require(c.chi <= c.d + 1, m + ": chi " + std::to_string(c.chi));
      v.require(c.gap >= 1.0 / (4.0 * (c.M - 1)), m + ": gap " + fmt_e(c.gap));
      v.require(c.gap_hp >= c.bound_hp, m + ": amplified gap " + fmt_e(c.gap_hp) + " < " + fmt_e(c.bound_hp));
      measured += (measured.empty() ? "" : ", ") + m + " gap*4(M-1)=" + fmt_e(c.gap * 4.0 * (c.M - 1)) +
                  " gap'/bound=" + fmt_e(c.gap_hp / c.bound_hp);
    }
    report(5, "search certificate and amplified gap", v, measured, failed);
  }

  // Criterion 6.
  {
    Verdict v;
    const FFHamiltonian h = trotter_instance();
    const double gap = gap_and_null(oracle::eigenvalues(unit_hamiltonian(h))).first;
    const double L = static_cast<double>(h.num_terms());
    const ComplexMatrix exact = oracle::expm_taylor(reflection_oracle(h, gap).Hp, 1.0);
    std::string measured;
    for (int order : {1, 2}) {
      std::vector<double> xs, ys;
      for (int s : {8, 16, 32, 64}) {
        const EvolutionResult w = evolve_blackbox(h, gap, 1.0, s, order);
        v.require(w.ledger.calls() == 2ULL * static_cast<std::uint64_t>(s), "ledger is not 2 per A1 factor");
        xs.push_back(s);
        ys.push_back(spectral_norm(ComplexMatrix(w.unitary - exact)));
      }
      const double slope = loglog_slope(xs, ys);
      v.require(std::abs(slope + order) <= 0.3, "order " + std::to_string(order) + " slope " + fmt_e(slope));
      measured += "order " + std::to_string(order) + " slope " + fmt_e(slope) + ", ";
    }
    const std::vector<double> times{1.0, 2.0, 4.0};
    std::vector<double> lt, calls;
    for (double t : times) {
      const int steps = min_steps_for(h, gap, t, 2, 1e-4);
      v.require(steps > 0, "eps not reached at t=" + fmt_e(t));
      const ComplexMatrix e = oracle::expm_taylor(reflection_oracle(h, gap).Hp, t);
      v.require(spectral_norm(ComplexMatrix(evolve_blackbox(h, gap, t, steps, 2).unitary - e)) <= 1e-4,
                "min_steps_for result misses eps at t=" + fmt_e(t));
      lt.push_back(L * t);
      calls.push_back(2.0 * steps);
    }
    const double growth = loglog_slope(lt, calls);
    v.require(growth <= 1.6, "calls grow as |Lt|^" + fmt_e(growth));
    report(6, "product-formula simulation", v, measured + "calls ~ |Lt|^" + fmt_e(growth), failed);
  }

  // Criterion 7.
  {
    Verdict v;
    std::string measured;
    for (Index M : {16, 64}) {
      const RegularGraph g = random_regular_expander(M, 8, 0.5, 300 + static_cast<std::uint64_t>(M));
      const SearchInstance inst = build_search_ff(g, edge_coloring(g), 3);
      const SearchStats st = measurement_search(inst, 4242 + static_cast<std::uint64_t>(M), 10000);
      const DenseVector psi = search_ground_state(M, 3);
      const double sigma_hi = wilson_interval(st.successes, 10000, 3.0).second;
      v.require(st.p_x * st.p_s <= sigma_hi, "M=" + std::to_string(M) + ": rate " + fmt_e(st.rate) + " below analytic");
      v.require(std::abs(st.p_x - 0.5) <= 1e-12, "M=" + std::to_string(M) + ": p_x " + fmt_e(st.p_x));
      v.require(std::abs(psi(3) * psi(3) - 0.5) <= 1e-15, "closed-form ground state");
      v.require(std::abs(st.p_s - std::pow(psi.sum() / std::sqrt(double(M)), 2)) <= 1e-10,
                "M=" + std::to_string(M) + ": p_s differs from the closed form");
      measured += "M=" + std::to_string(M) + " rate " + fmt_e(st.rate) + " analytic " + fmt_e(st.p_x * st.p_s) +
                  " p_x " + fmt_e(st.p_x) + "; ";
    }
    report(7, "measurement search", v, measured, failed);
  }

  // Criterion 8.
  {
    Verdict v;
    std::vector<double> ms, gaps;
    std::string measured;
    for (int side : {2, 3}) {
      const SparseSymOperator a = torus_adjacency(side, 5);
      const LatticeScan s = lattice_scan(a, 0, 40, 2.0, 1e-4);
      DenseMatrix h = -s.best.c * a.dense();
      h(0, 0) -= 1.0;
      const std::vector<double> ev = oracle::eigenvalues(h);
      v.require(std::abs(ev[1] - ev[0] - s.best.gap) <= 1e-9, "scan gap differs from the dense oracle");
      v.require(s.interior_minimum, "side " + std::to_string(side) + ": no interior minimum");
      v.require(s.best.p_x >= 0.2 && s.best.p_s >= 0.2,
                "side " + std::to_string(side) + ": p_x " + fmt_e(s.best.p_x) + " p_s " + fmt_e(s.best.p_s));
      ms.push_back(static_cast<double>(a.dim()));
      gaps.push_back(s.best.gap);
      measured += "M=" + std::to_string(a.dim()) + " c*=" + fmt_e(s.best.c) + " gap " + fmt_e(s.best.gap) + " p_x " +
                  fmt_e(s.best.p_x) + " p_s " + fmt_e(s.best.p_s) + "; ";
    }
    const double slope = loglog_slope(ms, gaps);
    v.require(slope >= -0.65 && slope <= -0.35, "gap exponent " + fmt_e(slope));
    report(8, "lattice transition", v, measured + "exponent " + fmt_e(slope), failed);
  }

  // Criterion 9.
  {
    Verdict v;
    int draws = 0;
    double worst_e0 = -1e9, worst_gap = 1e9;
    for (Index M : {16, 64, 256}) {
      std::mt19937_64 rng(7000 + static_cast<std::uint64_t>(M));
      for (int i = 0; i < 20; ++i, ++draws) {
        const SparseSymOperator f = random_stoquastic_F(M, 3.0, rng);
        const Index x = static_cast<Index>(rng() % static_cast<std::uint64_t>(M));
        const PerturbedSearchHam ham = build_perturbed(f, x);
        DenseMatrix h = f.dense() / 4.0;
        h(x, x) -= 1.0;
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
        const double e0 = es.eigenvalues()(0), gap = es.eigenvalues()(1) - e0;
        DenseVector g = es.eigenvectors().col(0);
        if (g.sum() < 0) g = -g;
        v.require(e0 <= -0.75, "E0 " + fmt_e(e0));
        v.require(gap >= 0.5, "gap " + fmt_e(gap));
        v.require(g.minCoeff() > 0.0, "ground state not positive");
        v.require(ground_state_check(ham).pass(), "library check disagrees");
        worst_e0 = std::max(worst_e0, e0);
        worst_gap = std::min(worst_gap, gap);
      }
    }
    report(9, "perturbed search ground state", v,
           std::to_string(draws) + " draws, max E0 " + fmt_e(worst_e0) + ", min gap " + fmt_e(worst_gap), failed);
  }

  // Criterion 10.
  {
    Verdict v;
    const std::vector<Index> sizes{16, 32, 64, 128, 256};
    const int chains = 11;
    std::vector<PerturbedSearchHam> hams;
    for (Index M : sizes)
      hams.push_back(build_perturbed(expander_F(random_regular_expander(M, 8, 0.5, 1100 + static_cast<std::uint64_t>(M))), 0));
    const std::vector<MixStats> stats = parallel<MixStats>(sizes.size() * chains, [&](std::size_t j) {
      const PerturbedSearchHam& h = hams[j / chains];
      return metropolis_mix(h, default_schedule(h, std::log(static_cast<double>(h.dim()))), 31 * j + 5, 100000000000ULL);
    });
    std::vector<double> ms, med;
    std::string measured;
    for (std::size_t k = 0; k < sizes.size(); ++k) {
      std::vector<double> h;
      for (int c = 0; c < chains; ++c) {
        v.require(stats[k * chains + c].hit, "censored chain");
        h.push_back(static_cast<double>(stats[k * chains + c].hitting_time));
      }
      std::sort(h.begin(), h.end());
      ms.push_back(static_cast<double>(sizes[k]));
      med.push_back(std::max(1.0, h[chains / 2]));
      measured += fmt_e(med.back()) + " ";
    }
    const double slope = loglog_slope(ms, med);
    v.require(slope >= 0.8, "hitting-time exponent " + fmt_e(slope));

    // Detailed balance and stationarity on enumerable chains.
    double db = 0.0, tv_worst = 0.0;
    const std::pair<Index, int> small[] = {{2, 2}, {3, 3}};
    for (const auto& [M, p] : small) {
      DenseMatrix f = DenseMatrix::Zero(M, M);
      for (Index i = 0; i < M; ++i) f(i, (i + 1) % M) = f((i + 1) % M, i) = -0.5;
      const PerturbedSearchHam h = build_perturbed(SparseSymOperator::from_dense(f), 0);
      const double eta = 0.3;
      const PathWeights w(h, eta, p);
      const ChainMatrix cm = chain_transition_matrix(w);
      const DenseMatrix t = DenseMatrix::Identity(M, M) - eta * h.H.dense();
      const Index n = static_cast<Index>(cm.states.size());
      DenseVector pi(n);
      for (Index i = 0; i < n; ++i) {
        double wt = 1.0;
        const auto& z = cm.states[static_cast<std::size_t>(i)];
        for (std::size_t r = 0; r < z.size(); ++r) wt *= t(z[r], z[(r + 1) % z.size()]);
        pi(i) = wt;
      }
      pi /= pi.sum();
      for (Index i = 0; i < n; ++i) {
        v.require(std::abs(cm.P.row(i).sum() - 1.0) <= 1e-12, "transition row does not sum to 1");
        for (Index j = 0; j < n; ++j) db = std::max(db, std::abs(pi(i) * cm.P(i, j) - pi(j) * cm.P(j, i)));
      }
      std::map<std::vector<Index>, double> counts;
      PathChain chain(w, std::vector<Index>(static_cast<std::size_t>(p), 1));
      std::mt19937_64 rng(99 + static_cast<std::uint64_t>(M));
      const int burn = 50000, samples = 4000000;
      for (int i = 0; i < burn; ++i) chain.step(rng);
      for (int i = 0; i < samples; ++i) {
        chain.step(rng);
        counts[chain.path()] += 1.0;
      }
      double tv = 0.0;
      for (Index i = 0; i < n; ++i) tv += std::abs(counts[cm.states[static_cast<std::size_t>(i)]] / samples - pi(i));
      tv_worst = std::max(tv_worst, tv / 2.0);
    }
    v.require(db <= 1e-14, "detailed balance violated by " + fmt_e(db));
    v.require(tv_worst <= 0.05, "stationary TV " + fmt_e(tv_worst));
    report(10, "path-integral Metropolis hardness", v,
           "median hitting times " + measured + "exponent " + fmt_e(slope) + ", detailed balance " + fmt_e(db) +
               ", TV " + fmt_e(tv_worst),
           failed);
  }

  // Criterion 11.
  {
    Verdict v;
    double comm = 0.0, one = 0.0, zero = 0.0;
    double margin = std::numeric_limits<double>::infinity();
    std::mt19937_64 rng(1111);
    for (int L : {2, 4, 6, 8, 10}) {
      RandomFFSpec spec;
      spec.dim = 6;
      spec.num_terms = L;
      spec.mixed_coefficients = true;
      const FFHamiltonian h = random_frustration_free(spec, rng);
      const double gap = gap_and_null(oracle::eigenvalues(weighted_hamiltonian(h))).first;
      for (double dexp : {1.0, 2.0}) {
        const double scale = std::pow(static_cast<double>(L), -1.0 / dexp);
        const std::vector<int> sectors{0, 1, 2, 3};
        const AmplifiedOperator op = build_local_Hprime_sectors(h, gap, dexp, sectors);
        const std::vector<std::uint32_t>& basis = op.qubit_basis;
        const Index Q = static_cast<Index>(basis.size());
        std::vector<Triplet> nt;
        for (Index s = 0; s < h.dim(); ++s)
          for (Index q = 0; q < Q; ++q)
            nt.emplace_back(s * Q + q, s * Q + q, std::popcount(basis[static_cast<std::size_t>(q)]));
        SparseMatrix number(op.dim(), op.dim());
        number.setFromTriplets(nt.begin(), nt.end());
        const SparseMatrix c = SparseMatrix(op.op.matrix() * number) - SparseMatrix(number * op.op.matrix());
        comm = std::max(comm, max_abs(c));

        const DenseMatrix g1 = restrict_to_sector(op, 1).dense();
        one = std::max(one, max_abs(DenseMatrix(g1 - scale * build_Gbar(h, gap).op.dense())));

        const double e0 = std::sqrt(gap) / 2.0 * scale - 4.0;
        for (double e : oracle::eigenvalues(restrict_to_sector(op, 0).dense())) {
          zero = std::max(zero, std::abs(e - e0));
          v.require(e <= -3.5, "zero-particle eigenvalue above -7/2");
        }
        for (int a : {2, 3}) {
          const double lo = -scale * std::sqrt(static_cast<double>((L + 1 - a) * (1 + a))) + 4.0 * (a - 1);
          const double emin = oracle::eigenvalues(restrict_to_sector(op, a).dense()).front();
          margin = std::min(margin, emin - lo);
        }
      }
    }
    v.require(comm <= 1e-12, "[H', N] = " + fmt_e(comm));
    v.require(one <= 1e-12, "single-particle block off by " + fmt_e(one));
    v.require(zero <= 1e-9, "zero-particle eigenvalue off by " + fmt_e(zero));
    v.require(margin >= -1e-9, "multi-particle bound violated by " + fmt_e(-margin));
    report(11, "local qubit Hamiltonian", v,
           "max [H',N] " + fmt_e(comm) + ", one-particle deviation " + fmt_e(one) + ", zero-particle deviation " +
               fmt_e(zero) + ", min multi-particle margin " + fmt_e(margin),
           failed);
  }

  // Criterion 12.
  {
    Verdict v;
    const fs::path root = fs::temp_directory_path() / ("gapamp_repro_" + std::to_string(std::random_device{}()));
    const std::vector<std::pair<std::string, std::string>> configs{
        {"amplify-verify", R"({"instances": 4, "dim": 8})"},
        {"gtilde-verify", R"({"instances": 4, "dim": 8})"},
        {"local-ham", R"({"instances": 2})"},
        {"trotter-sweep", R"({"call_times": "1,2"})"},
        {"search-bench", R"({"trials": 2000})"},
        {"lattice-scan", R"({"side_max": 2, "grid": 10})"},
        {"mc-mix", R"({"M_max": 32, "chains": 5, "gs_sizes": "16", "gs_draws": 3})"}};
    int files = 0;
    for (const auto& [name, params] : configs) {
      std::vector<std::map<std::string, std::string>> bodies;
      for (int run = 0; run < 2; ++run) {
        const fs::path dir = root / (name + "_" + std::to_string(run));
        const std::string text = R"({"experiment": ")" + name + R"(", "seed": 12, "output_dir": ")" + dir.string() +
                                 R"(", "params": )" + params + "}";
        run_experiment(parse_config(text));
        std::map<std::string, std::string> b;
        for (const auto& e : fs::directory_iterator(dir))
          if (e.path().extension() == ".csv") b[e.path().filename().string()] = csv_body(e.path());
        bodies.push_back(std::move(b));
      }
      v.require(!bodies[0].empty(), name + ": no CSV written");
      v.require(bodies[0] == bodies[1], name + ": CSV bodies differ between runs");
      files += static_cast<int>(bodies[0].size());
    }
    std::error_code ec;
    fs::remove_all(root, ec);
    report(12, "reproducibility", v, std::to_string(files) + " CSV files compared across two runs", failed);
  }

  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::printf("%d of 12 criteria failed (%.0f s)\n", failed, secs);
  return failed == 0 ? 0 : 1;
}
