#include "csf/grid.hpp"

#include <atomic>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "csf/parallel.hpp"

namespace csf::par {
namespace {
std::atomic<int> g_threads{0};
}
void set_threads(int n) {
  g_threads.store(n);
#if defined(CSF_HAVE_OPENMP)
  if (n > 1) omp_set_num_threads(n);
#endif
}
int threads() { return g_threads.load(); }
bool serial() {
#if defined(CSF_HAVE_OPENMP)
  return g_threads.load() == 1;
#else
  return true;
#endif
}
}  // namespace csf::par

namespace csf {

std::size_t Snapshot::points() const {
  std::size_t p = 1;
  for (int d : dims) p *= std::size_t(d);
  return p;
}

const std::vector<double>& Snapshot::col(const std::string& name) const {
  for (std::size_t i = 0; i < field_names.size(); ++i)
    if (field_names[i] == name) return columns[i];
  throw std::runtime_error("snapshot has no field '" + name + "'");
}

std::string format_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_snapshot(std::ostream& os, const Snapshot& s) {
  os << "csf-snapshot v1; grid=" << s.grid << "; n=";
  for (std::size_t i = 0; i < s.dims.size(); ++i)
    os << (i ? "x" : "") << s.dims[i];
  os << "; h=" << format_g17(s.h) << "; t=" << format_g17(s.t) << "\n";
  os << "fields:";
  for (const auto& f : s.field_names) os << ' ' << f;
  os << "\n";
  std::size_t np = s.points();
  for (std::size_t i = 0; i < np; ++i) {
    os << i;
    for (const auto& c : s.columns) os << ' ' << format_g17(c[i]);
    os << "\n";
  }
}

Snapshot read_snapshot(std::istream& is) {
  Snapshot s;
  std::string line;
  if (!std::getline(is, line) || line.rfind("csf-snapshot v1;", 0) != 0)
    throw std::runtime_error("not a csf-snapshot v1 stream");
  // parse "; key=value" segments
  std::stringstream hdr(line.substr(line.find(';') + 1));
  std::string seg;
  while (std::getline(hdr, seg, ';')) {
    auto eq = seg.find('=');
    if (eq == std::string::npos) continue;
    std::string key = seg.substr(0, eq);
    key.erase(0, key.find_first_not_of(' '));
    std::string val = seg.substr(eq + 1);
    if (key == "grid") {
      s.grid = val;
    } else if (key == "n") {
      std::stringstream ds(val);
      std::string tok;
      while (std::getline(ds, tok, 'x')) s.dims.push_back(std::stoi(tok));
    } else if (key == "h") {
      s.h = std::stod(val);
    } else if (key == "t") {
      s.t = std::stod(val);
    }
  }
  if (!std::getline(is, line) || line.rfind("fields:", 0) != 0)
    throw std::runtime_error("snapshot missing fields line");
  {
    std::stringstream fs(line.substr(7));
    std::string name;
    while (fs >> name) s.field_names.push_back(name);
  }
  std::size_t np = s.points();
  s.columns.assign(s.field_names.size(), std::vector<double>(np));
  for (std::size_t i = 0; i < np; ++i) {
    if (!std::getline(is, line))
      throw std::runtime_error("snapshot truncated");
    std::stringstream row(line);
    std::size_t idx;
    row >> idx;
    if (idx != i) throw std::runtime_error("snapshot index out of order");
    for (auto& c : s.columns) row >> c[i];
    if (!row) throw std::runtime_error("snapshot row parse failure");
  }
  return s;
}

void save_snapshot(const std::string& path, const Snapshot& s) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_snapshot(os, s);
}

Snapshot load_snapshot(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_snapshot(is);
}

}  // namespace csf
