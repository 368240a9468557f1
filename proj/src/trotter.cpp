#include "gapamp/trotter.hpp"

#include "gapamp/amplify.hpp"

#include <cmath>
#include <stdexcept>

namespace gapamp {

namespace {

ComplexMatrix phase_on_projector(const DenseMatrix& p, double theta) {
  const Complex f = std::exp(Complex(0.0, -theta)) - 1.0;
  return ComplexMatrix::Identity(p.rows(), p.cols()) + f * p.cast<Complex>();
}

}  // namespace

ComplexMatrix evolve_exact(const SparseSymOperator& op, double t, Index dense_cap) {
  EigOptions opts;
  opts.vectors = true;
  opts.dense_cap = dense_cap;
  const SpectrumReport spec = eig_full(op, opts);
  const DenseMatrix& q = *spec.eigenvectors;
  Eigen::VectorXcd phases(spec.size());
  for (Index i = 0; i < spec.size(); ++i) phases(i) = std::exp(Complex(0.0, -spec.eigenvalues[static_cast<std::size_t>(i)] * t));
  const ComplexMatrix qc = q.cast<Complex>();
  return qc * phases.asDiagonal() * qc.transpose();
}

EvolutionResult evolve_blackbox(const FFHamiltonian& ham, double gap_lower_bound, double t, int steps, int order,
                                bool padded) {
  if (steps < 1) throw std::invalid_argument("evolve_blackbox: steps must be >= 1");
  if (order != 1 && order != 2) throw std::invalid_argument("evolve_blackbox: order must be 1 or 2");
  if (!(gap_lower_bound > 0.0)) throw std::invalid_argument("evolve_blackbox: gap lower bound must be positive");

  const Index anc = reflection_ancilla_dim(ham, padded);
  const double l_eff = static_cast<double>(anc);
  const double delta = std::sqrt(gap_lower_bound * l_eff);
  const DenseMatrix u = build_U(ham, padded).dense();
  const DenseMatrix p = build_P(ham.dim(), anc).dense();
  const ComplexMatrix uc = u.cast<Complex>();

  EvolutionResult r;
  r.t = t;
  r.steps = steps;
  r.order = order;
  const double tau = t / steps;

  const ComplexMatrix a1 = uc * phase_on_projector(p, l_eff * tau) * uc;
  ComplexMatrix step;
  if (order == 1) {
    step = a1 * phase_on_projector(p, -(l_eff + delta) * tau);
  } else {
    const ComplexMatrix half = phase_on_projector(p, -(l_eff + delta) * tau / 2.0);
    step = half * a1 * half;
  }

  ComplexMatrix w = ComplexMatrix::Identity(u.rows(), u.cols());
  if (t != 0.0) {
    for (int s = 0; s < steps; ++s) {
      w = step * w;
      r.ledger.charge(2);
    }
  }
  r.unitary = std::exp(Complex(0.0, -delta * t)) * w;
  return r;
}

double evolution_error(const ComplexMatrix& w, const ComplexMatrix& v) { return spectral_norm(ComplexMatrix(w - v)); }

int min_steps_for(const FFHamiltonian& ham, double gap_lower_bound, double t, int order, double eps, bool padded,
                  int max_steps) {
  if (!(eps > 0.0)) throw std::invalid_argument("min_steps_for: eps must be positive");
  const ComplexMatrix v = evolve_exact(build_Hprime(ham, gap_lower_bound, padded).op, t);
  auto ok = [&](int steps) {
    return evolution_error(evolve_blackbox(ham, gap_lower_bound, t, steps, order, padded).unitary, v) <= eps;
  };
  int hi = 1;
  while (!ok(hi)) {
    if (hi >= max_steps) return -1;
    hi = std::min(2 * hi, max_steps);
  }
  int lo = hi / 2;  // fails (or 0)
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    (ok(mid) ? hi : lo) = mid;
  }
  return hi;
}

CallModel calibrate_call_model(const std::vector<CallSample>& samples, int kappa, double eps) {
  if (kappa < 1 || !(eps > 0.0) || samples.empty()) throw std::invalid_argument("calibrate_call_model: bad input");
  const double expo = 1.0 + 1.0 / (2.0 * kappa);
  double acc = 0.0;
  for (const auto& s : samples) {
    const double x = std::abs(s.l_eff * s.t);
    if (!(x > 0.0) || s.calls == 0) throw std::invalid_argument("calibrate_call_model: empty sample");
    acc += std::log(static_cast<double>(s.calls) / std::pow(x, expo));
  }
  return CallModel{kappa, eps, std::exp(acc / static_cast<double>(samples.size()))};
}

std::uint64_t calls_needed(double L, double t, int kappa, double eps, const CallModel& model) {
  if (kappa < 1) throw std::invalid_argument("calls_needed: kappa must be >= 1");
  if (!(eps > 0.0)) throw std::invalid_argument("calls_needed: eps must be positive");
  const double x = std::abs(L * t);
  if (x == 0.0) return 0;
  return static_cast<std::uint64_t>(std::ceil(model.c * std::pow(x, 1.0 + 1.0 / (2.0 * kappa))));
}

}  // namespace gapamp
