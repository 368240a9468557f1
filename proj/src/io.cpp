#include "gapamp/io.hpp"

#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace gapamp {

namespace fs = std::filesystem;

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string to_triplet_text(const SparseMatrix& m) {
  std::ostringstream os;
  os << "%%dim " << m.rows() << '\n';
  char buf[96];
  for (Index c = 0; c < m.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(m, c); it; ++it) {
      std::snprintf(buf, sizeof buf, "%ld %ld %.17g\n", static_cast<long>(it.row()), static_cast<long>(c), it.value());
      os << buf;
    }
  }
  return os.str();
}

SparseMatrix from_triplet_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  if (!std::getline(is, line) || line.rfind("%%dim ", 0) != 0) {
    throw std::invalid_argument("triplet file: missing '%%dim N' header");
  }
  const long n = std::stol(line.substr(6));
  if (n < 0) throw std::invalid_argument("triplet file: negative dimension");
  std::vector<Triplet> t;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    long r = 0, c = 0;
    double v = 0;
    if (!(ls >> r >> c >> v)) throw std::invalid_argument("triplet file: bad line " + std::to_string(lineno));
    if (r < 0 || c < 0 || r >= n || c >= n) {
      throw std::invalid_argument("triplet file: index out of range on line " + std::to_string(lineno));
    }
    t.emplace_back(r, c, v);
  }
  SparseMatrix m(n, n);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_atomic(const fs::path& path, const std::string& content) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    if (!out) throw std::runtime_error("short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

void save_ffhamiltonian(const fs::path& manifest, const FFHamiltonian& ham) {
  nlohmann::json j;
  j["dim"] = ham.dim();
  j["terms"] = nlohmann::json::array();
  const std::string stem = manifest.stem().string();
  for (Index k = 0; k < ham.num_terms(); ++k) {
    const std::string file = stem + "_term" + std::to_string(k) + ".tri";
    write_text_atomic(manifest.parent_path() / file, to_triplet_text(ham.term(k).matrix));
    j["terms"].push_back({{"file", file}, {"coefficient", ham.term(k).coefficient}});
  }
  write_text_atomic(manifest, j.dump(2) + "\n");
}

FFHamiltonian load_ffhamiltonian(const fs::path& manifest) {
  const nlohmann::json j = nlohmann::json::parse(read_text(manifest));
  const Index n = j.at("dim").get<Index>();
  std::vector<ProjectorTerm> terms;
  for (const auto& t : j.at("terms")) {
    ProjectorTerm p;
    p.matrix = from_triplet_text(read_text(manifest.parent_path() / t.at("file").get<std::string>()));
    p.coefficient = t.at("coefficient").get<double>();
    if (p.matrix.rows() != n) throw std::invalid_argument("manifest: term dimension does not match 'dim'");
    terms.push_back(std::move(p));
  }
  return FFHamiltonian(std::move(terms));
}

void save_amplified(const fs::path& stem, const AmplifiedOperator& op) {
  nlohmann::json j;
  j["flavor"] = to_string(op.flavor);
  j["dimension"] = op.dim();
  j["system_dim"] = op.system_dim;
  j["ancilla_dim"] = op.ancilla_dim;
  j["delta"] = op.delta;
  j["padded"] = op.padded;
  j["l_eff"] = op.l_eff;
  j["d_exponent"] = op.d_exponent;
  j["layout"] = "index = system * ancilla_dim + ancilla";
  j["spin_convention"] = "sigma_z|0> = +|0>, sigma_plus = |1><0|, n = (1 - sigma_z)/2, qubit 0 is the flag";
  if (!op.qubit_basis.empty()) j["qubit_basis"] = op.qubit_basis;
  j["triplets"] = stem.filename().string() + ".tri";
  write_text_atomic(stem.string() + ".tri", to_triplet_text(op.op.matrix()));
  write_text_atomic(stem.string() + ".json", j.dump(2) + "\n");
}

void CsvTable::add_row(std::vector<std::string> row) {
  if (row.size() != columns_.size()) throw std::invalid_argument("CsvTable: row width does not match header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::render() const {
  std::string out;
  for (const auto& c : comments_) out += "# " + c + "\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += cells[i];
    }
    out += '\n';
  };
  line(columns_);
  for (const auto& r : rows_) line(r);
  return out;
}

int CsvData::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

CsvData parse_csv(const std::string& text) {
  CsvData d;
  std::istringstream is(text);
  std::string line;
  bool header = false;
  auto split = [](const std::string& s) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ls(s);
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (!s.empty() && s.back() == ',') cells.emplace_back();
    return cells;
  };
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      d.comments.push_back(line.size() > 1 && line[1] == ' ' ? line.substr(2) : line.substr(1));
      continue;
    }
    if (!header) {
      d.columns = split(line);
      header = true;
      continue;
    }
    auto cells = split(line);
    if (cells.size() != d.columns.size()) throw std::invalid_argument("csv: ragged row");
    d.rows.push_back(std::move(cells));
  }
  if (!header) throw std::invalid_argument("csv: missing header");
  return d;
}

}  // namespace gapamp
