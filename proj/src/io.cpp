#include "monofem/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace monofem::io {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return buf;
}

double round12(double v) { return std::strtod(format_double(v).c_str(), nullptr); }

json rounded(double v) { return json(round12(v)); }

json mesh_to_json(const Mesh& mesh) {
  json j;
  json nodes = json::array();
  for (const auto& p : mesh.nodes) nodes.push_back({p.x(), p.y()});
  json tris = json::array();
  for (const auto& t : mesh.triangles) tris.push_back({t[0], t[1], t[2]});
  json bed = json::array();
  for (const auto& e : mesh.boundary_edges) bed.push_back({e[0], e[1]});
  j["nodes"] = std::move(nodes);
  j["triangles"] = std::move(tris);
  j["boundary_edges"] = std::move(bed);
  j["region_label"] = mesh.region_label;
  return j;
}

Mesh mesh_from_json(const json& j) {
  Mesh mesh;
  for (const auto& p : j.at("nodes"))
    mesh.nodes.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
  for (const auto& t : j.at("triangles"))
    mesh.triangles.push_back({t.at(0).get<int>(), t.at(1).get<int>(), t.at(2).get<int>()});
  for (const auto& e : j.at("boundary_edges"))
    mesh.boundary_edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
  if (j.contains("region_label"))
    mesh.region_label = j.at("region_label").get<std::vector<int>>();
  mesh.finalize();
  return mesh;
}

void write_mesh_json(const std::filesystem::path& path, const Mesh& mesh) {
  write_text(path, mesh_to_json(mesh).dump(2) + "\n");
}

Mesh read_mesh_json(const std::filesystem::path& path) {
  return mesh_from_json(json::parse(read_text(path)));
}

void write_mask_csv(const std::filesystem::path& path, const RegionMask& mask) {
  std::string out;
  for (int t = 0; t < mask.size(); ++t)
    out += std::to_string(t) + "," + (mask[t] ? "1" : "0") + "\n";
  write_text(path, out);
}

RegionMask read_mask_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  RegionMask mask;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto comma = line.find_last_of(',');
    std::string v = comma == std::string::npos ? line : line.substr(comma + 1);
    mask.flags.push_back(std::stoi(v) != 0);
  }
  return mask;
}

void write_mask_pgm(const std::filesystem::path& path, const Mesh& mesh,
                    const RegionMask& mask, int width) {
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& p : mesh.nodes) {
    xmin = std::min(xmin, p.x());
    xmax = std::max(xmax, p.x());
    ymin = std::min(ymin, p.y());
    ymax = std::max(ymax, p.y());
  }
  const int height =
      std::max(1, static_cast<int>(std::lround(width * (ymax - ymin) /
                                               std::max(xmax - xmin, 1e-300))));
  // Uniform grid binning of triangles for point location.
  const int bins = 64;
  std::vector<std::vector<int>> bin(bins * bins);
  auto bx = [&](double x) {
    return std::clamp(static_cast<int>((x - xmin) / (xmax - xmin) * bins), 0,
                      bins - 1);
  };
  auto by = [&](double y) {
    return std::clamp(static_cast<int>((y - ymin) / (ymax - ymin) * bins), 0,
                      bins - 1);
  };
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    double txmin = 1e300, txmax = -1e300, tymin = 1e300, tymax = -1e300;
    for (int v : mesh.triangles[t]) {
      txmin = std::min(txmin, mesh.nodes[v].x());
      txmax = std::max(txmax, mesh.nodes[v].x());
      tymin = std::min(tymin, mesh.nodes[v].y());
      tymax = std::max(tymax, mesh.nodes[v].y());
    }
    for (int ix = bx(txmin); ix <= bx(txmax); ++ix)
      for (int iy = by(tymin); iy <= by(tymax); ++iy)
        bin[iy * bins + ix].push_back(t);
  }
  auto inside = [&](int t, const Eigen::Vector2d& p) {
    const auto& a = mesh.nodes[mesh.triangles[t][0]];
    const auto& b = mesh.nodes[mesh.triangles[t][1]];
    const auto& c = mesh.nodes[mesh.triangles[t][2]];
    auto cross = [](const Eigen::Vector2d& u, const Eigen::Vector2d& v) {
      return u.x() * v.y() - u.y() * v.x();
    };
    double d1 = cross(b - a, p - a);
    double d2 = cross(c - b, p - b);
    double d3 = cross(a - c, p - c);
    return d1 >= -1e-14 && d2 >= -1e-14 && d3 >= -1e-14;
  };
  std::string out = "P2\n" + std::to_string(width) + " " +
                    std::to_string(height) + "\n255\n";
  for (int row = 0; row < height; ++row) {
    const double y = ymax - (row + 0.5) / height * (ymax - ymin);
    for (int col = 0; col < width; ++col) {
      const double x = xmin + (col + 0.5) / width * (xmax - xmin);
      int value = 0;
      for (int t : bin[by(y) * bins + bx(x)]) {
        if (inside(t, {x, y})) {
          value = mask[t] ? 255 : 128;
          break;
        }
      }
      out += std::to_string(value);
      out += (col + 1 == width) ? '\n' : ' ';
    }
  }
  write_text(path, out);
}

void write_operator_csv(const std::filesystem::path& path,
                        const Eigen::MatrixXcd& matrix) {
  std::string out = "dim," + std::to_string(matrix.rows()) + "\n";
  for (int i = 0; i < matrix.rows(); ++i)
    for (int j = 0; j < matrix.cols(); ++j)
      out += std::to_string(i) + "," + std::to_string(j) + "," +
             format_double(matrix(i, j).real()) + "," +
             format_double(matrix(i, j).imag()) + "\n";
  write_text(path, out);
}

Eigen::MatrixXcd read_operator_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  if (!std::getline(in, line) || line.rfind("dim,", 0) != 0)
    throw std::runtime_error("operator csv: missing dim header in " + path.string());
  const int n = std::stoi(line.substr(4));
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(n, n);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int i, j;
    double re, im;
    if (std::sscanf(line.c_str(), "%d,%d,%lf,%lf", &i, &j, &re, &im) != 4)
      throw std::runtime_error("operator csv: bad row '" + line + "'");
    m(i, j) = cplx(re, im);
  }
  return m;
}

void write_nd_operator(const std::filesystem::path& matrix_path,
                       const std::filesystem::path& gram_path,
                       const NDOperator& op) {
  write_operator_csv(matrix_path, op.matrix);
  write_operator_csv(gram_path, op.gram.cast<cplx>());
}

NDOperator read_nd_operator(const std::filesystem::path& matrix_path,
                            const std::filesystem::path& gram_path) {
  NDOperator op;
  op.matrix = read_operator_csv(matrix_path);
  op.gram = read_operator_csv(gram_path).real();
  return op;
}

void write_solution_csv(const std::filesystem::path& path,
                        const FieldSolution& u) {
  std::string out;
  for (int v = 0; v < u.nodal.size(); ++v)
    out += std::to_string(v) + "," + format_double(u.nodal[v].real()) + "," +
           format_double(u.nodal[v].imag()) + "\n";
  write_text(path, out);
}

void write_current_csv(const std::filesystem::path& path,
                       const BoundaryCurrent& f) {
  std::string out;
  for (int e = 0; e < f.size(); ++e)
    out += std::to_string(e) + "," + format_double(f.values[e].real()) + "," +
           format_double(f.values[e].imag()) + "\n";
  write_text(path, out);
}

BoundaryCurrent read_current_csv(const std::filesystem::path& path) {
  std::istringstream in(read_text(path));
  std::string line;
  std::vector<cplx> vals;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    int e;
    double re, im;
    if (std::sscanf(line.c_str(), "%d,%lf,%lf", &e, &re, &im) != 3)
      throw std::runtime_error("current csv: bad row '" + line + "'");
    vals.push_back(cplx(re, im));
  }
  BoundaryCurrent f;
  f.values = Eigen::Map<Eigen::VectorXcd>(vals.data(), vals.size());
  return f;
}

void write_coeff_csv(const std::filesystem::path& path, const MatrixField& a) {
  std::string out;
  for (int t = 0; t < a.size(); ++t) {
    const Matrix2c& m = a.value(t);
    out += std::to_string(t);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        out += "," + format_double(m(i, j).real());
        out += "," + format_double(m(i, j).imag());
      }
    out += "\n";
  }
  write_text(path, out);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path())
    std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  out << text;
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::uint64_t fnv1a64(const std::string& data) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace monofem::io
