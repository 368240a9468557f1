#include "gapamp/experiments.hpp"

#include "gapamp/amplify.hpp"
#include "gapamp/edge_coloring.hpp"
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
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace gapamp {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::map<std::string, json>& defaults_table() {
  static const std::map<std::string, json> table = {
      {"amplify-verify",
       {{"instances", 10}, {"dim", 16}, {"terms", 3}, {"null_dim", 1}, {"mixed", true}, {"padded", true}}},
      {"gtilde-verify",
       {{"instances", 10}, {"dim", 16}, {"terms", 3}, {"null_dim", 1}, {"mixed", true}}},
      {"local-ham",
       {{"instances", 3}, {"dim", 4}, {"terms", 6}, {"d_exponent", 2.0}, {"max_sector", 3}, {"mixed", true}}},
      {"trotter-sweep",
       {{"dim", 4},
        {"terms", 2},
        {"mixed", false},
        {"t", 1.0},
        {"orders", "1,2"},
        {"steps", "8,16,32,64"},
        {"eps", 1e-4},
        {"call_times", "1,2,4"},
        {"call_orders", "2"}}},
      {"search-bench",
       {{"M", 16},
        {"d", 8},
        {"lambda_max", 0.5},
        {"instances", 1},
        {"trials", 10000},
        {"amplify", true},
        {"dense_cap", 8192}}},
      {"lattice-scan",
       {{"side_min", 2}, {"side_max", 3}, {"dims", 5}, {"grid", 40}, {"c_max", 2.0}, {"tol", 1e-3}}},
      {"mc-mix",
       {{"M_min", 16},
        {"M_max", 256},
        {"d", 8},
        {"chains", 11},
        {"beta", 0.0},
        {"max_steps", 1e11},
        {"gs_sizes", "16,64,256"},
        {"gs_draws", 20},
        {"extra_degree", 3.0}}},
  };
  return table;
}

bool same_kind(const json& a, const json& b) {
  if (a.is_number() && b.is_number()) {
    return !(a.is_number_integer() && b.is_number_float() && b.get<double>() != std::floor(b.get<double>()));
  }
  return a.type() == b.type();
}

void set_param(json& params, const std::string& key, const json& value) {
  if (!params.contains(key)) throw ConfigError("unknown param '" + key + "'");
  const json& def = params.at(key);
  if (!value.is_primitive() || value.is_null()) throw ConfigError("param '" + key + "' must be a scalar");
  if (!same_kind(def, value)) throw ConfigError("param '" + key + "' has the wrong type");
  if (def.is_number_integer() && value.is_number_float()) {
    params[key] = static_cast<std::int64_t>(value.get<double>());
  } else {
    params[key] = value;
  }
}

std::uint64_t read_seed(const json& v) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer() && v.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(v.get<std::int64_t>());
  throw ConfigError("seed must be a non-negative integer");
}

std::uint64_t task_seed(std::uint64_t seed, std::uint64_t index, std::uint64_t salt = 0) {
  std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1) + 0xbf58476d1ce4e5b9ULL * salt;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::vector<double> number_list(const std::string& s, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw ConfigError("param '" + key + "': bad list entry '" + item + "'");
    }
  }
  if (out.empty()) throw ConfigError("param '" + key + "' is empty");
  return out;
}

/// Runs fn(i) for i in [0, n) on the worker pool; results keep index order.
template <class R>
std::vector<R> parallel_map(std::size_t n, const std::function<R(std::size_t)>& fn) {
  std::vector<std::optional<R>> slots(n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(fn(i));
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(static_cast<std::size_t>(worker_count()), n);
  if (threads <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  std::vector<R> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);
    out.push_back(std::move(*slots[i]));
  }
  return out;
}

std::string b(bool v) { return v ? "true" : "false"; }

std::string timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class Run {
 public:
  explicit Run(const ExperimentConfig& cfg) : cfg_(cfg) {}

  CsvTable table(std::vector<std::string> columns) const {
    CsvTable t(std::move(columns));
    t.comment("experiment: " + cfg_.experiment);
    t.comment("seed: " + std::to_string(cfg_.seed));
    t.comment("params: " + cfg_.params.dump());
    t.comment("generated: " + timestamp());
    return t;
  }

  void write(const std::string& name, const CsvTable& t) { write(name, t.render()); }
  void write(const std::string& name, const std::string& text) {
    const fs::path p = cfg_.output_dir / name;
    write_text_atomic(p, text);
    out_.artifacts.push_back(p);
  }

  void fail(const std::string& msg) { out_.failures.push_back(msg); }

  void summary(json extra) {
    json s = {{"experiment", cfg_.experiment}, {"seed", cfg_.seed}, {"params", cfg_.params}};
    s["failures"] = out_.failures.size();
    s.update(extra);
    write(cfg_.experiment + "_summary.json", s.dump(2) + "\n");
  }

  RunOutcome finish() {
    if (!out_.failures.empty()) {
      std::string text;
      for (const auto& f : out_.failures) text += f + "\n";
      write("failures.txt", text);
    }
    return out_;
  }

  const json& p() const { return cfg_.params; }
  std::uint64_t seed() const { return cfg_.seed; }

 private:
  const ExperimentConfig& cfg_;
  RunOutcome out_;
};

FFHamiltonian random_instance(const json& p, std::uint64_t seed) {
  RandomFFSpec spec;
  spec.dim = p.at("dim").get<Index>();
  spec.num_terms = p.at("terms").get<Index>();
  spec.null_dim = p.at("null_dim").get<Index>();
  spec.mixed_coefficients = p.at("mixed").get<bool>();
  std::mt19937_64 rng(seed);
  return random_frustration_free(spec, rng);
}

struct AmplifyRow {
  std::vector<std::string> cells;
  std::vector<std::string> failures;
};

AmplifyRow amplify_instance(const json& p, std::uint64_t seed, std::size_t i) {
  const FFHamiltonian ham = random_instance(p, seed);
  const bool padded = p.at("padded").get<bool>();
  const FFHamiltonian unit = with_unit_coefficients(ham);
  EigOptions vec;
  vec.vectors = true;
  const SpectrumReport sh = eig_full(assemble(unit), vec);
  const double gap = spectral_gap(sh, 0.0);

  const AmplifiedOperator hp = build_Hprime(ham, gap, padded);
  const SpectrumReport shp = eig_full(hp.op);
  const double gap_hp = spectral_gap(shp, 0.0);
  const double bound = std::sqrt(gap * hp.l_eff) / 6.0;

  const Index n = ham.dim();
  const Index anc = hp.ancilla_dim;
  const DenseVector o = uniform_ancilla_state(anc);
  double residual = 0.0;
  for (Index j = 0; j < sh.null_dim; ++j) {
    DenseVector v(n * anc);
    for (Index s = 0; s < n; ++s) v.segment(s * anc, anc) = (*sh.eigenvectors)(s, j) * o;
    residual = std::max(residual, (hp.op.matrix() * v).norm());
  }

  const SparseMatrix x = build_X(ham, padded).matrix();
  const SparseMatrix u = build_U(ham, padded).matrix();
  const SparseMatrix embed = kron(sparse_identity(n), SparseMatrix(o.sparseView()));
  const SparseMatrix reduced = SparseMatrix(embed.transpose()) * u * embed;
  const SparseMatrix expected = sparse_identity(n) - (2.0 / hp.l_eff) * assemble(unit).matrix();
  const double property1 = max_abs(SparseMatrix(reduced - expected));
  const double x_idem = max_abs(SparseMatrix(x * x - x));
  const double u_invol = max_abs(SparseMatrix(u * u - sparse_identity(u.rows())));

  AmplifyRow r;
  const std::string tag = "instance " + std::to_string(i) + ": ";
  if (shp.null_dim != sh.null_dim) r.failures.push_back(tag + "null dimension of H' differs from H");
  if (residual > 1e-9) r.failures.push_back(tag + "null vector residual " + fmt(residual));
  if (gap_hp < bound) r.failures.push_back(tag + "gap of H' below (1/6)sqrt(Delta L_eff)");
  if (property1 > 1e-12) r.failures.push_back(tag + "reduced U differs from 1 - 2H/L_eff by " + fmt(property1));
  if (x_idem > 1e-12 || u_invol > 1e-12) r.failures.push_back(tag + "X or U not a projector / reflection");
  r.cells = {std::to_string(i),       std::to_string(n),        std::to_string(ham.num_terms()),
             fmt(hp.l_eff),           std::to_string(sh.null_dim), std::to_string(shp.null_dim),
             fmt(gap),                fmt(gap_hp),              fmt(bound),
             fmt(residual),           fmt(property1),           b(r.failures.empty())};
  return r;
}

RunOutcome amplify_verify(const ExperimentConfig& cfg) {
  Run run(cfg);
  const auto n = run.p().at("instances").get<std::size_t>();
  auto rows = parallel_map<AmplifyRow>(n, [&](std::size_t i) { return amplify_instance(run.p(), task_seed(run.seed(), i), i); });
  CsvTable t = run.table({"instance", "N", "L", "L_eff", "null_dim_H", "null_dim_Hp", "Delta", "gap_Hp", "bound",
                          "null_residual", "property1_residual", "pass"});
  int passed = 0;
  for (auto& r : rows) {
    t.add_row(r.cells);
    passed += r.failures.empty();
    for (auto& f : r.failures) run.fail(f);
  }
  run.write("amplify_verify.csv", t);
  run.summary({{"rows", rows.size()}, {"passed", passed}});
  return run.finish();
}

AmplifyRow gtilde_instance(const json& p, std::uint64_t seed, std::size_t i) {
  const FFHamiltonian ham = random_instance(p, seed);
  const SpectrumReport sh = eig_full(assemble(ham));
  std::vector<double> expect;
  for (double l : sh.eigenvalues) {
    if (std::abs(l) > sh.null_tol) {
      expect.push_back(std::sqrt(l));
      expect.push_back(-std::sqrt(l));
    }
  }
  std::sort(expect.begin(), expect.end());
  const SpectrumReport sg = eig_full(build_Gtilde(ham).op);
  std::vector<double> got;
  for (double l : sg.eigenvalues)
    if (std::abs(l) > sg.null_tol) got.push_back(l);

  double spec_dev = got.size() == expect.size() ? 0.0 : INFINITY;
  if (got.size() == expect.size())
    for (std::size_t k = 0; k < got.size(); ++k) spec_dev = std::max(spec_dev, std::abs(got[k] - expect[k]));

  const AmplifiedOperator g = build_G(ham, true);
  double block_dev = 0.0;
  double sin_margin = INFINITY;
  for (const BlockReport& br : verify_all_blocks(ham, g)) {
    block_dev = std::max({block_dev, br.deviation, br.leakage});
    block_dev = std::max(block_dev, std::abs(br.block_eigenvalues(0) + br.sin_alpha));
    block_dev = std::max(block_dev, std::abs(br.block_eigenvalues(1) - br.sin_alpha));
    sin_margin = std::min(sin_margin, br.sin_alpha - std::sqrt(2.0 * br.lambda / g.l_eff));
  }

  AmplifyRow r;
  const std::string tag = "instance " + std::to_string(i) + ": ";
  if (!(spec_dev <= 1e-8)) r.failures.push_back(tag + "nonzero spectrum of G~ is not {+-sqrt(lambda)}");
  if (block_dev > 1e-9) r.failures.push_back(tag + "2x2 block deviates by " + fmt(block_dev));
  if (sin_margin < -1e-12) r.failures.push_back(tag + "sin(alpha) below sqrt(2 lambda / L_eff)");
  r.cells = {std::to_string(i), std::to_string(ham.dim()), std::to_string(ham.num_terms()),
             std::to_string(expect.size()), fmt(spec_dev), fmt(block_dev), fmt(sin_margin), b(r.failures.empty())};
  return r;
}

RunOutcome gtilde_verify(const ExperimentConfig& cfg) {
  Run run(cfg);
  const auto n = run.p().at("instances").get<std::size_t>();
  auto rows = parallel_map<AmplifyRow>(n, [&](std::size_t i) { return gtilde_instance(run.p(), task_seed(run.seed(), i), i); });
  CsvTable t = run.table({"instance", "N", "L", "nonzero_count", "spectrum_deviation", "block_deviation",
                          "min_sin_margin", "pass"});
  int passed = 0;
  for (auto& r : rows) {
    t.add_row(r.cells);
    passed += r.failures.empty();
    for (auto& f : r.failures) run.fail(f);
  }
  run.write("gtilde_verify.csv", t);
  run.summary({{"rows", rows.size()}, {"passed", passed}});
  return run.finish();
}

struct LocalRows {
  std::vector<std::vector<std::string>> cells;
  std::vector<std::string> failures;
};

LocalRows local_instance(const json& p, std::uint64_t seed, std::size_t i) {
  json q = p;
  q["null_dim"] = 1;
  const FFHamiltonian ham = random_instance(q, seed);
  const double gap = spectral_gap(eig_full(assemble(ham)), 0.0);
  const double d = p.at("d_exponent").get<double>();
  const int max_sector = std::min<int>(p.at("max_sector").get<int>(), static_cast<int>(ham.num_terms()) + 1);
  std::vector<int> sectors;
  for (int a = 0; a <= max_sector; ++a) sectors.push_back(a);
  const AmplifiedOperator h = build_local_Hprime_sectors(ham, gap, d, sectors);
  const double L = static_cast<double>(ham.num_terms());
  const double scale = std::pow(L, -1.0 / d);

  LocalRows r;
  const std::string tag = "instance " + std::to_string(i) + ": ";
  const LocalTerms lt = build_local_terms(ham, h.qubit_basis);
  const SparseMatrix& hm = h.op.matrix();
  const SparseMatrix& nm = lt.number.matrix();
  const double comm = max_abs(SparseMatrix(hm * nm - nm * hm));
  if (comm > 1e-12) r.failures.push_back(tag + "[H', N] = " + fmt(comm));

  const AmplifiedOperator gbar = build_Gbar(ham, gap);
  const double single_dev =
      max_abs(SparseMatrix(restrict_to_sector(h, 1).matrix() - scale * gbar.op.matrix()));
  if (single_dev > 1e-12) r.failures.push_back(tag + "single-particle block differs from L^(-1/d) Gbar");

  for (int a : sectors) {
    const SpectrumReport s = eig_full(restrict_to_sector(h, a));
    double bound = 0.0;
    bool ok = true;
    if (a == 0) {
      bound = std::sqrt(gap) / 2.0 * scale - 4.0;
      ok = std::abs(s.max() - bound) <= 1e-9 && std::abs(s.min() - bound) <= 1e-9 && (d > 2.0 || s.max() <= -3.5);
    } else if (a == 1) {
      bound = std::sqrt(gap) / 2.0 * scale;
      for (double ev : s.eigenvalues)
        if (std::abs(ev) > 1e-9 && std::abs(ev) < bound - 1e-9) ok = false;
    } else {
      bound = -scale * std::sqrt((L + 1.0 - a) * (1.0 + a)) + 4.0 * (a - 1);
      ok = s.min() >= bound - 1e-9;
    }
    if (!ok) r.failures.push_back(tag + "sector " + std::to_string(a) + " violates its bound");
    r.cells.push_back({std::to_string(i), std::to_string(ham.dim()), std::to_string(ham.num_terms()), fmt(d),
                       std::to_string(a), std::to_string(s.size()), fmt(s.min()), fmt(bound), fmt(comm),
                       fmt(single_dev), b(ok)});
  }
  return r;
}

RunOutcome local_ham(const ExperimentConfig& cfg) {
  Run run(cfg);
  const auto n = run.p().at("instances").get<std::size_t>();
  auto rows = parallel_map<LocalRows>(n, [&](std::size_t i) { return local_instance(run.p(), task_seed(run.seed(), i), i); });
  CsvTable t = run.table({"instance", "N", "L", "d", "sector", "sector_dim", "min_eig", "bound", "commutator",
                          "single_particle_deviation", "pass"});
  std::size_t count = 0, passed = 0;
  for (auto& r : rows) {
    for (auto& c : r.cells) {
      passed += c.back() == "true";
      ++count;
      t.add_row(c);
    }
    for (auto& f : r.failures) run.fail(f);
  }
  run.write("local_ham.csv", t);
  run.summary({{"rows", count}, {"passed", passed}});
  return run.finish();
}

RunOutcome trotter_sweep(const ExperimentConfig& cfg) {
  Run run(cfg);
  json q = run.p();
  q["null_dim"] = 1;
  const FFHamiltonian ham = random_instance(q, task_seed(run.seed(), 0));
  const double gap = spectral_gap(eig_full(assemble(with_unit_coefficients(ham))), 0.0);
  const double t = run.p().at("t").get<double>();
  const double eps = run.p().at("eps").get<double>();
  const auto orders = number_list(run.p().at("orders").get<std::string>(), "orders");
  const auto steps = number_list(run.p().at("steps").get<std::string>(), "steps");
  const auto times = number_list(run.p().at("call_times").get<std::string>(), "call_times");
  const auto call_orders = number_list(run.p().at("call_orders").get<std::string>(), "call_orders");
  const double L = static_cast<double>(ham.num_terms());

  struct Point {
    int order;
    int steps;
    double error;
    std::uint64_t calls;
  };
  std::vector<std::pair<int, int>> grid;
  for (double o : orders)
    for (double s : steps) grid.emplace_back(static_cast<int>(o), static_cast<int>(s));
  const ComplexMatrix v = evolve_exact(build_Hprime(ham, gap).op, t);
  auto points = parallel_map<Point>(grid.size(), [&](std::size_t k) {
    const auto [o, s] = grid[k];
    const EvolutionResult w = evolve_blackbox(ham, gap, t, s, o);
    return Point{o, s, evolution_error(w.unitary, v), w.ledger.calls()};
  });

  CsvTable sweep = run.table({"L", "t", "order", "steps", "calls", "error_norm"});
  json slopes = json::array();
  for (double o : orders) {
    std::vector<double> xs, ys;
    for (const auto& pt : points) {
      if (pt.order != static_cast<int>(o)) continue;
      sweep.add_row({fmt(L), fmt(t), std::to_string(pt.order), std::to_string(pt.steps), std::to_string(pt.calls),
                     fmt(pt.error)});
      if (pt.calls != 2ULL * static_cast<std::uint64_t>(pt.steps)) {
        run.fail("order " + std::to_string(pt.order) + ", steps " + std::to_string(pt.steps) +
                 ": ledger is not 2 calls per A1 factor");
      }
      xs.push_back(pt.steps);
      ys.push_back(pt.error);
    }
    if (xs.size() >= 2) slopes.push_back({{"order", static_cast<int>(o)}, {"slope", loglog_slope(xs, ys)}});
  }
  run.write("trotter_sweep.csv", sweep);

  struct Need {
    double t;
    int order;
    int steps;
  };
  std::vector<std::pair<double, int>> cgrid;
  for (double o : call_orders)
    for (double tt : times) cgrid.emplace_back(tt, static_cast<int>(o));
  auto needs = parallel_map<Need>(cgrid.size(), [&](std::size_t k) {
    return Need{cgrid[k].first, cgrid[k].second, min_steps_for(ham, gap, cgrid[k].first, cgrid[k].second, eps)};
  });
  CsvTable calls = run.table({"L", "t", "order", "eps", "steps", "calls"});
  json call_slopes = json::array();
  for (double o : call_orders) {
    std::vector<double> xs, ys;
    for (const auto& nd : needs) {
      if (nd.order != static_cast<int>(o)) continue;
      calls.add_row({fmt(L), fmt(nd.t), std::to_string(nd.order), fmt(eps), std::to_string(nd.steps),
                     std::to_string(nd.steps > 0 ? 2 * nd.steps : -1)});
      if (nd.steps < 0) {
        run.fail("order " + std::to_string(nd.order) + ", t " + fmt(nd.t) + ": eps not reached");
        continue;
      }
      xs.push_back(L * nd.t);
      ys.push_back(2.0 * nd.steps);
    }
    if (xs.size() >= 2) call_slopes.push_back({{"order", static_cast<int>(o)}, {"slope", loglog_slope(xs, ys)}});
  }
  run.write("trotter_calls.csv", calls);
  run.summary({{"error_slopes", slopes}, {"call_slopes", call_slopes}});
  return run.finish();
}

struct SearchRows {
  std::vector<std::string> cert, amp, stats;
  std::vector<std::string> failures;
};

SearchRows search_instance(const json& p, std::uint64_t seed, std::size_t i) {
  const Index M = p.at("M").get<Index>();
  const int d = std::min<int>(p.at("d").get<int>(), static_cast<int>(M) - 1);
  const RegularGraph g = random_regular_expander(M, d, p.at("lambda_max").get<double>(), seed);
  const EdgeColoring col = edge_coloring(g);
  std::mt19937_64 rng(task_seed(seed, 1));
  const Index x = std::uniform_int_distribution<Index>(0, M - 1)(rng);
  const SearchInstance inst = build_search_ff(g, col, x);
  const GapCertificate c = gap_certificate(inst);
  const bool proper = is_proper(M, g.edges, col) && col.chi <= d + 1;

  SearchRows r;
  const std::string tag = "M " + std::to_string(M) + " instance " + std::to_string(i) + ": ";
  if (!c.pass) r.failures.push_back(tag + "gap " + fmt(c.gap) + " below 1/(4(M-1))");
  if (!proper) r.failures.push_back(tag + "edge coloring improper or uses more than d+1 colors");
  r.cert = {std::to_string(M), std::to_string(d), fmt(c.lambda), std::to_string(c.chi), fmt(c.gap), fmt(c.bound),
            b(c.pass && proper)};

  if (p.at("amplify").get<bool>()) {
    const AmplifiedOperator hp = build_Hprime(inst.ham, c.gap, true);
    EigOptions opts;
    opts.dense_cap = p.at("dense_cap").get<Index>();
    const SpectrumReport s = eig_full(hp.op, opts);
    const double gp = spectral_gap(s, 0.0);
    const double bound = std::sqrt(c.gap * hp.l_eff) / 6.0;
    const bool ok = gp >= bound && s.null_dim == 1;
    if (!ok) r.failures.push_back(tag + "amplified gap " + fmt(gp) + " below " + fmt(bound));
    r.amp = {std::to_string(M), fmt(hp.l_eff), fmt(c.gap), fmt(gp), fmt(bound), b(ok)};
  }

  const SearchStats st = measurement_search(inst, task_seed(seed, 2), p.at("trials").get<std::uint64_t>());
  if (!st.pass) r.failures.push_back(tag + "success rate inconsistent with p_x p_s");
  if (std::abs(st.p_x - 0.5) > 1e-9) r.failures.push_back(tag + "p_x differs from 1/2");
  r.stats = {std::to_string(M),      std::to_string(st.trials), std::to_string(st.successes), fmt(st.p_lower),
             fmt(st.p_upper),        fmt(st.p_x),               fmt(st.p_s),                  fmt(st.analytic),
             b(st.pass && std::abs(st.p_x - 0.5) <= 1e-9)};
  return r;
}

RunOutcome search_bench(const ExperimentConfig& cfg) {
  Run run(cfg);
  const auto n = run.p().at("instances").get<std::size_t>();
  auto rows = parallel_map<SearchRows>(n, [&](std::size_t i) { return search_instance(run.p(), task_seed(run.seed(), i), i); });
  CsvTable cert = run.table({"M", "d", "lambda", "chi", "gap", "bound", "pass"});
  CsvTable amp = run.table({"M", "L_eff", "Delta", "gap_Hp", "bound", "pass"});
  CsvTable stats = run.table({"M", "trials", "successes", "p_lower", "p_upper", "p_x", "p_s", "analytic", "pass"});
  for (auto& r : rows) {
    cert.add_row(r.cert);
    if (!r.amp.empty()) amp.add_row(r.amp);
    stats.add_row(r.stats);
    for (auto& f : r.failures) run.fail(f);
  }
  run.write("search_certificates.csv", cert);
  if (run.p().at("amplify").get<bool>()) run.write("search_amplified.csv", amp);
  run.write("search_stats.csv", stats);
  run.summary({{"instances", rows.size()}});
  return run.finish();
}

RunOutcome lattice_scan_exp(const ExperimentConfig& cfg) {
  Run run(cfg);
  const int lo = run.p().at("side_min").get<int>();
  const int hi = run.p().at("side_max").get<int>();
  const int dims = run.p().at("dims").get<int>();
  std::vector<int> sides;
  for (int s = lo; s <= hi; ++s) sides.push_back(s);
  auto scans = parallel_map<LatticeScan>(sides.size(), [&](std::size_t k) {
    return lattice_scan(torus_adjacency(sides[k], dims), 0, run.p().at("grid").get<int>(),
                        run.p().at("c_max").get<double>(), run.p().at("tol").get<double>());
  });
  CsvTable grid = run.table({"M", "c", "gap", "p_x", "p_s"});
  CsvTable best = run.table({"M", "c", "gap", "p_x", "p_s", "interior_minimum"});
  std::vector<double> ms, gaps;
  for (const auto& s : scans) {
    for (const auto& pt : s.grid) grid.add_row({std::to_string(pt.M), fmt(pt.c), fmt(pt.gap), fmt(pt.p_x), fmt(pt.p_s)});
    best.add_row({std::to_string(s.best.M), fmt(s.best.c), fmt(s.best.gap), fmt(s.best.p_x), fmt(s.best.p_s),
                  b(s.interior_minimum)});
    ms.push_back(static_cast<double>(s.best.M));
    gaps.push_back(s.best.gap);
  }
  run.write("lattice_grid.csv", grid);
  run.write("lattice_scan.csv", best);
  json extra = json::object();
  if (ms.size() >= 2) extra["gap_slope"] = loglog_slope(ms, gaps);
  run.summary(extra);
  return run.finish();
}

RunOutcome mc_mix(const ExperimentConfig& cfg) {
  Run run(cfg);
  const json& p = run.p();
  const int d = p.at("d").get<int>();
  const int chains = p.at("chains").get<int>();
  const double beta_param = p.at("beta").get<double>();
  const auto max_steps = static_cast<std::uint64_t>(p.at("max_steps").get<double>());
  std::vector<Index> sizes;
  for (Index m = p.at("M_min").get<Index>(); m <= p.at("M_max").get<Index>(); m *= 2) sizes.push_back(m);

  std::vector<PerturbedSearchHam> hams;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const Index M = sizes[k];
    const RegularGraph g = random_regular_expander(M, std::min<int>(d, static_cast<int>(M) - 1), 0.5,
                                                   task_seed(run.seed(), k, 1));
    hams.push_back(build_perturbed(expander_F(g), 0));
  }
  std::vector<std::pair<std::size_t, int>> jobs;
  for (std::size_t k = 0; k < sizes.size(); ++k)
    for (int c = 0; c < chains; ++c) jobs.emplace_back(k, c);
  auto stats = parallel_map<MixStats>(jobs.size(), [&](std::size_t j) {
    const auto [k, c] = jobs[j];
    const double beta = beta_param > 0.0 ? beta_param : std::log(static_cast<double>(sizes[k]));
    return metropolis_mix(hams[k], default_schedule(hams[k], beta), task_seed(run.seed(), j, 2), max_steps);
  });
  CsvTable t = run.table({"M", "beta", "p", "eta", "seed", "hitting_time", "oracle_calls", "hit"});
  std::vector<double> ms, med;
  int censored = 0;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    std::vector<double> h;
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (jobs[j].first != k) continue;
      const MixStats& s = stats[j];
      t.add_row({std::to_string(s.M), fmt(s.beta), std::to_string(s.p), fmt(s.eta), std::to_string(s.seed),
                 std::to_string(s.hitting_time), std::to_string(s.oracle_calls), b(s.hit)});
      h.push_back(static_cast<double>(s.hitting_time));
      censored += !s.hit;
    }
    std::nth_element(h.begin(), h.begin() + static_cast<long>(h.size() / 2), h.end());
    ms.push_back(static_cast<double>(sizes[k]));
    med.push_back(std::max(1.0, h[h.size() / 2]));
  }
  run.write("mc_mix.csv", t);

  const auto gs_size_list = number_list(p.at("gs_sizes").get<std::string>(), "gs_sizes");
  const int draws = p.at("gs_draws").get<int>();
  std::vector<std::pair<Index, int>> gs_jobs;
  for (double m : gs_size_list)
    for (int k = 0; k < draws; ++k) gs_jobs.emplace_back(static_cast<Index>(m), k);
  auto checks = parallel_map<GroundStateCheck>(gs_jobs.size(), [&](std::size_t j) {
    std::mt19937_64 rng(task_seed(run.seed(), j, 3));
    const Index M = gs_jobs[j].first;
    const SparseSymOperator F = random_stoquastic_F(M, p.at("extra_degree").get<double>(), rng);
    return ground_state_check(build_perturbed(F, std::uniform_int_distribution<Index>(0, M - 1)(rng)));
  });
  CsvTable gs_table = run.table({"M", "draw", "e0", "gap", "p_x", "min_component", "pass"});
  int gs_pass = 0;
  double min_px = 1.0;
  for (std::size_t j = 0; j < checks.size(); ++j) {
    const GroundStateCheck& c = checks[j];
    gs_table.add_row({std::to_string(gs_jobs[j].first), std::to_string(gs_jobs[j].second), fmt(c.e0), fmt(c.gap), fmt(c.p_x),
                fmt(c.min_component), b(c.pass())});
    gs_pass += c.pass();
    min_px = std::min(min_px, c.p_x);
    if (!c.pass()) run.fail("ground_state M " + std::to_string(gs_jobs[j].first) + " draw " + std::to_string(gs_jobs[j].second));
  }
  run.write("ground_state.csv", gs_table);
  json extra = {{"censored_chains", censored},
                {"ground_state", {{"draws", checks.size()}, {"passed", gs_pass}, {"min_p_x", min_px}}}};
  if (ms.size() >= 2) extra["hitting_time_slope"] = loglog_slope(ms, med);
  run.summary(extra);
  return run.finish();
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, _] : defaults_table()) v.push_back(k);
    return v;
  }();
  return names;
}

json default_params(const std::string& experiment) {
  const auto& t = defaults_table();
  const auto it = t.find(experiment);
  if (it == t.end()) throw ConfigError("unknown experiment '" + experiment + "'");
  return it->second;
}

ExperimentConfig parse_config(const std::string& json_text, const std::vector<std::string>& overrides) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& [k, _] : doc.items()) {
    if (k != "experiment" && k != "seed" && k != "output_dir" && k != "params") throw ConfigError("unknown key '" + k + "'");
  }
  if (!doc.contains("experiment") || !doc["experiment"].is_string()) throw ConfigError("'experiment' must be a string");

  ExperimentConfig cfg;
  cfg.experiment = doc["experiment"].get<std::string>();
  cfg.params = default_params(cfg.experiment);
  if (doc.contains("seed")) cfg.seed = read_seed(doc["seed"]);
  if (doc.contains("output_dir")) {
    if (!doc["output_dir"].is_string()) throw ConfigError("'output_dir' must be a string");
    cfg.output_dir = doc["output_dir"].get<std::string>();
  }
  if (doc.contains("params")) {
    if (!doc["params"].is_object()) throw ConfigError("'params' must be an object");
    for (const auto& [k, v] : doc["params"].items()) set_param(cfg.params, k, v);
  }
  for (const auto& o : overrides) {
    const auto eq = o.find('=');
    if (eq == std::string::npos || eq == 0) throw ConfigError("override '" + o + "' is not key=value");
    const std::string key = o.substr(0, eq);
    const std::string text = o.substr(eq + 1);
    json value = json::parse(text, nullptr, false);
    if (value.is_discarded()) value = text;
    if (key == "seed") {
      cfg.seed = read_seed(value);
    } else if (key == "output_dir") {
      cfg.output_dir = text;
    } else {
      set_param(cfg.params, key, value);
    }
  }
  for (const auto& [k, v] : cfg.params.items()) {
    if (v.is_number() && v.get<double>() < 0.0) throw ConfigError("param '" + k + "' must be non-negative");
    if (v.is_string()) number_list(v.get<std::string>(), k);
  }
  const json& p = cfg.params;
  if (cfg.experiment == "trotter-sweep") {
    for (const char* key : {"orders", "call_orders"})
      for (double o : number_list(p[key].get<std::string>(), key))
        if (o != 1.0 && o != 2.0) throw ConfigError(std::string("param '") + key + "': only 1 and 2 are supported");
    for (double s : number_list(p["steps"].get<std::string>(), "steps"))
      if (s < 1.0 || s != std::floor(s)) throw ConfigError("param 'steps': entries must be positive integers");
  }
  if (cfg.experiment == "lattice-scan" && (p["side_min"].get<int>() < 2 || p["side_max"] < p["side_min"]))
    throw ConfigError("params 'side_min'/'side_max': need 2 <= side_min <= side_max");
  if (cfg.experiment == "mc-mix" && (p["M_min"].get<int>() < 4 || p["M_max"] < p["M_min"] || p["chains"].get<int>() < 1))
    throw ConfigError("params 'M_min'/'M_max'/'chains': need 4 <= M_min <= M_max and chains >= 1");
  if (p.contains("dim") && p.contains("null_dim") && p["null_dim"].get<int>() >= p["dim"].get<int>())
    throw ConfigError("param 'null_dim' must be smaller than 'dim'");
  if (p.contains("terms") && p["terms"].get<int>() < 1) throw ConfigError("param 'terms' must be positive");
  return cfg;
}

int worker_count() {
  if (const char* env = std::getenv("GAPAMP_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<int>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

RunOutcome run_experiment(const ExperimentConfig& cfg) {
  if (cfg.experiment == "amplify-verify") return amplify_verify(cfg);
  if (cfg.experiment == "gtilde-verify") return gtilde_verify(cfg);
  if (cfg.experiment == "local-ham") return local_ham(cfg);
  if (cfg.experiment == "trotter-sweep") return trotter_sweep(cfg);
  if (cfg.experiment == "search-bench") return search_bench(cfg);
  if (cfg.experiment == "lattice-scan") return lattice_scan_exp(cfg);
  if (cfg.experiment == "mc-mix") return mc_mix(cfg);
  throw ConfigError("unknown experiment '" + cfg.experiment + "'");
}

}  // namespace gapamp
