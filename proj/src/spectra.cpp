#include "gapamp/spectra.hpp"

#include "gapamp/amplify.hpp"
#include "gapamp/ffham.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

namespace gapamp {

double default_null_tol(double operator_norm) { return 1e-9 * std::max(1.0, operator_norm); }

double SpectrumReport::norm() const {
  if (eigenvalues.empty()) return 0.0;
  return std::max(std::abs(eigenvalues.front()), std::abs(eigenvalues.back()));
}

double SpectrumReport::gap_about(double target) const { return spectral_gap(*this, target); }

SpectrumReport eig_full(const SparseSymOperator& op, const EigOptions& opts) {
  if (op.dim() > opts.dense_cap) {
    throw DenseCapExceeded("eig_full: dimension " + std::to_string(op.dim()) + " exceeds dense cap " +
                           std::to_string(opts.dense_cap));
  }
  return eig_full(op.dense(), opts);
}

SpectrumReport eig_full(const DenseMatrix& symmetric, const EigOptions& opts) {
  const Index n = symmetric.rows();
  if (n != symmetric.cols()) throw std::invalid_argument("eig_full: matrix not square");
  if (n > opts.dense_cap) {
    throw DenseCapExceeded("eig_full: dimension " + std::to_string(n) + " exceeds dense cap " +
                           std::to_string(opts.dense_cap));
  }
  SpectrumReport r;
  if (n == 0) return r;

  Eigen::SelfAdjointEigenSolver<DenseMatrix> es(
      symmetric, opts.vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_full: eigensolver did not converge");

  r.eigenvalues.assign(es.eigenvalues().data(), es.eigenvalues().data() + n);
  if (opts.vectors) {
    DenseMatrix a = es.eigenvectors();
    // Fix the sign of each eigenvector (largest-magnitude component positive)
    // so results are reproducible across runs.
    for (Index j = 0; j < n; ++j) {
      Index imax = 0;
      a.col(j).cwiseAbs().maxCoeff(&imax);
      if (a(imax, j) < 0.0) a.col(j) = -a.col(j);
    }
    r.eigenvectors = std::move(a);
  }
  r.null_tol = opts.null_tol.value_or(default_null_tol(r.norm()));
  r.null_dim = null_space_dim(r, r.null_tol);
  return r;
}

double spectral_gap(const SpectrumReport& report, double target) {
  const double radius = report.null_tol;
  const double member_tol = std::max(1e-9, radius);
  bool member = false;
  double gap = std::numeric_limits<double>::infinity();
  for (double ev : report.eigenvalues) {
    const double dist = std::abs(ev - target);
    if (dist <= member_tol) member = true;
    if (dist > radius) gap = std::min(gap, dist);
  }
  if (!member) {
    throw std::invalid_argument("spectral_gap: target " + std::to_string(target) + " is not an eigenvalue");
  }
  return gap;
}

int null_space_dim(const SpectrumReport& report, double tol) {
  if (!(tol > 0.0)) throw std::invalid_argument("null_space_dim: tol must be positive");
  return static_cast<int>(std::count_if(report.eigenvalues.begin(), report.eigenvalues.end(),
                                        [tol](double ev) { return std::abs(ev) <= tol; }));
}

int null_space_dim(const SparseSymOperator& op, double tol, Index dense_cap) {
  EigOptions opts;
  opts.dense_cap = dense_cap;
  opts.null_tol = tol;
  return null_space_dim(eig_full(op, opts), tol);
}

namespace {

struct BlockContext {
  FFHamiltonian unit;
  SpectrumReport spec;
  SparseMatrix u;
  DenseVector o;
};

BlockContext block_context(const FFHamiltonian& ham, const AmplifiedOperator& g) {
  if (g.flavor != Flavor::G) throw std::invalid_argument("verify_block: operator must be G-flavored");
  if (g.system_dim != ham.dim() || g.ancilla_dim != reflection_ancilla_dim(ham, g.padded)) {
    throw std::invalid_argument("verify_block: G was not built from this Hamiltonian");
  }
  FFHamiltonian unit = with_unit_coefficients(ham);
  EigOptions opts;
  opts.vectors = true;
  SpectrumReport spec = eig_full(assemble(unit), opts);
  SparseMatrix u = build_U(ham, g.padded).matrix();
  return BlockContext{std::move(unit), std::move(spec), std::move(u), uniform_ancilla_state(g.ancilla_dim)};
}

BlockReport block_at(const BlockContext& ctx, const AmplifiedOperator& g, Index j) {
  const Index n = g.system_dim;
  const Index anc = g.ancilla_dim;
  if (j < 0 || j >= ctx.spec.size()) throw std::out_of_range("verify_block: eigenindex out of range");
  const double lambda = ctx.spec.eigenvalues[static_cast<std::size_t>(j)];
  if (std::abs(lambda) <= ctx.spec.null_tol) {
    throw std::invalid_argument("verify_block: λ_j = 0, the subspace V_j is one-dimensional");
  }

  const DenseVector psi = ctx.spec.eigenvectors->col(j);
  DenseVector v0(n * anc);
  for (Index i = 0; i < n; ++i) v0.segment(i * anc, anc) = psi(i) * ctx.o;

  const DenseVector uv0 = ctx.u * v0;
  DenseVector perp = uv0 - v0.dot(uv0) * v0;
  perp.normalize();

  // Analytic angle: cos α_j = γ_j = 1 − 2 λ_j / L_eff.
  const double c = 1.0 - 2.0 * lambda / g.l_eff;
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));

  BlockReport rep;
  rep.j = j;
  rep.lambda = lambda;
  rep.cos_alpha = c;
  rep.sin_alpha = s;

  const SparseMatrix& gm = g.op.matrix();
  const DenseVector g0 = gm * v0;
  const DenseVector g1 = gm * perp;
  rep.block << v0.dot(g0), v0.dot(g1), perp.dot(g0), perp.dot(g1);
  rep.analytic << -s * s, s * c, s * c, s * s;
  rep.deviation = (rep.block - rep.analytic).cwiseAbs().maxCoeff();

  const DenseVector r0 = g0 - v0.dot(g0) * v0 - perp.dot(g0) * perp;
  const DenseVector r1 = g1 - v0.dot(g1) * v0 - perp.dot(g1) * perp;
  rep.leakage = std::max(r0.norm(), r1.norm());

  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(rep.block);
  rep.block_eigenvalues = es.eigenvalues();
  return rep;
}

}  // namespace

BlockReport verify_block(const FFHamiltonian& ham, const AmplifiedOperator& g, Index j) {
  return block_at(block_context(ham, g), g, j);
}

std::vector<BlockReport> verify_all_blocks(const FFHamiltonian& ham, const AmplifiedOperator& g) {
  const BlockContext ctx = block_context(ham, g);
  std::vector<BlockReport> out;
  for (Index j = 0; j < ctx.spec.size(); ++j) {
    if (std::abs(ctx.spec.eigenvalues[static_cast<std::size_t>(j)]) > ctx.spec.null_tol) {
      out.push_back(block_at(ctx, g, j));
    }
  }
  return out;
}

std::string spectrum_csv(const SpectrumReport& report) {
  std::ostringstream os;
  os << "index,eigenvalue\n" << std::setprecision(17);
  for (std::size_t i = 0; i < report.eigenvalues.size(); ++i) os << i << ',' << report.eigenvalues[i] << '\n';
  return os.str();
}

std::string spectrum_json(const SpectrumReport& report) {
  nlohmann::json j;
  j["dimension"] = report.eigenvalues.size();
  j["null_dim"] = report.null_dim;
  j["null_tol"] = report.null_tol;
  if (!report.eigenvalues.empty()) {
    j["min"] = report.min();
    j["max"] = report.max();
    bool has_zero = std::any_of(report.eigenvalues.begin(), report.eigenvalues.end(),
                                [&](double e) { return std::abs(e) <= std::max(1e-9, report.null_tol); });
    if (has_zero) {
      const double g = spectral_gap(report, 0.0);
      if (std::isfinite(g)) j["gap_about_zero"] = g;
      else j["gap_about_zero"] = nullptr;
    } else {
      j["gap_about_zero"] = nullptr;
    }
  }
  return j.dump(2);
}

}  // namespace gapamp
