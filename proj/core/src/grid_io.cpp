#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "densctl/error.hpp"
#include "densctl/grid.hpp"

namespace densctl {
namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& f) {
  const auto& mesh = f.mesh();
  os << "# dim=" << mesh.dim() << " n=" << mesh.points_per_axis() << " components=" << f.components() << '\n';
  for (std::size_t node = 0; node < f.num_nodes(); ++node) {
    Vec2 p = mesh.node_point(node);
    std::string line = fmt17(p[0]);
    if (mesh.dim() == 2) line += ',' + fmt17(p[1]);
    for (int c = 0; c < f.components(); ++c) line += ',' + fmt17(f.at(c, node));
    os << line << '\n';
  }
}

void write_csv(const std::string& path, const GridFunction& f, const std::vector<std::string>& comment_lines) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path + " for writing");
  for (const auto& line : comment_lines) os << "# " << line << '\n';
  write_csv(os, f);
  if (!os) throw Error("failed writing " + path);
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  int dim = 0, n = 0, comps = 0;
  while (std::getline(is, line)) {
    if (line.rfind("# dim=", 0) == 0) {
      if (std::sscanf(line.c_str(), "# dim=%d n=%d components=%d", &dim, &n, &comps) != 3)
        throw InvalidArgument("malformed grid header: " + line);
      break;
    }
    if (!line.empty() && line[0] != '#') throw InvalidArgument("grid CSV is missing its header line");
  }
  if (dim == 0) throw InvalidArgument("grid CSV is missing its header line");
  PeriodicMesh mesh(dim, n);
  GridFunction f(mesh, comps);
  std::size_t node = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (node >= mesh.num_nodes()) throw InvalidArgument("grid CSV has too many rows");
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> cells;
    while (std::getline(ss, cell, ',')) {
      try {
        cells.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw InvalidArgument("grid CSV has a non-numeric cell: " + cell);
      }
    }
    if (cells.size() != static_cast<std::size_t>(dim + comps))
      throw InvalidArgument("grid CSV row has wrong column count");
    for (int c = 0; c < comps; ++c) f.at(c, node) = cells[dim + c];
    ++node;
  }
  if (node != mesh.num_nodes()) throw InvalidArgument("grid CSV has too few rows");
  return f;
}

GridFunction read_csv(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw InvalidArgument("cannot open grid file " + path);
  return read_csv(is);
}

}  // namespace densctl
