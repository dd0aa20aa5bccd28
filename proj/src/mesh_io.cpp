#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "opt3d1d/geom.hpp"

namespace opt3d1d {

namespace {

std::string read_file(const std::filesystem::path &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class LineReader {
public:
  explicit LineReader(std::string_view text) : in_(std::string(text)) {}

  // Next non-empty, non-comment line split into a stream.
  std::istringstream next(const char *what) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      auto pos = line.find_first_not_of(" \t\r");
      if (pos == std::string::npos || line[pos] == '#') continue;
      return std::istringstream(line);
    }
    throw ParseError(std::string("unexpected end of file, expected ") + what, line_no_ + 1);
  }
  int line() const { return line_no_; }

private:
  std::istringstream in_;
  int line_no_ = 0;
};

template <typename... T> void read_fields(std::istringstream &ss, const LineReader &r, const char *what, T &...out) {
  if (!(ss >> ... >> out)) throw ParseError(std::string("malformed ") + what, r.line());
  std::string extra;
  if (ss >> extra) throw ParseError(std::string("trailing data on ") + what + " line", r.line());
}

} // namespace

TetMesh parse_mesh(std::string_view text) {
  LineReader reader(text);
  long nv = 0, nt = 0, nf = 0;
  {
    auto ss = reader.next("header");
    read_fields(ss, reader, "header", nv, nt, nf);
    if (nv < 0 || nt < 0 || nf < 0) throw ParseError("negative counts in header", reader.line());
  }
  std::vector<Vec3> vertices(static_cast<std::size_t>(nv));
  for (auto &p : vertices) {
    auto ss = reader.next("vertex");
    read_fields(ss, reader, "vertex", p.x(), p.y(), p.z());
  }
  std::vector<std::array<int, 4>> tets(static_cast<std::size_t>(nt));
  for (auto &t : tets) {
    auto ss = reader.next("tet");
    read_fields(ss, reader, "tet", t[0], t[1], t[2], t[3]);
    for (int v : t)
      if (v < 0 || v >= nv) throw ParseError("tet vertex index " + std::to_string(v) + " out of range", reader.line());
  }
  std::vector<BoundaryFace> faces(static_cast<std::size_t>(nf));
  for (auto &f : faces) {
    auto ss = reader.next("boundary face");
    std::string tag;
    read_fields(ss, reader, "boundary face", f.vertices[0], f.vertices[1], f.vertices[2], tag);
    for (int v : f.vertices)
      if (v < 0 || v >= nv) throw ParseError("face vertex index " + std::to_string(v) + " out of range", reader.line());
    try {
      f.tag = face_tag_from_string(tag);
    } catch (const std::invalid_argument &e) {
      throw ParseError(e.what(), reader.line());
    }
  }
  return make_tet_mesh(std::move(vertices), std::move(tets), std::move(faces));
}

std::string format_mesh(const TetMesh &mesh) {
  std::string out = fmt::format("{} {} {}\n", mesh.vertices.size(), mesh.tets.size(), mesh.boundary_faces.size());
  // 17 significant digits round-trip doubles exactly.
  for (const auto &p : mesh.vertices) out += fmt::format("{:.17g} {:.17g} {:.17g}\n", p.x(), p.y(), p.z());
  for (const auto &t : mesh.tets) out += fmt::format("{} {} {} {}\n", t[0], t[1], t[2], t[3]);
  for (const auto &f : mesh.boundary_faces)
    out += fmt::format("{} {} {} {}\n", f.vertices[0], f.vertices[1], f.vertices[2], to_string(f.tag));
  return out;
}

TetMesh load_mesh(const std::filesystem::path &path) { return parse_mesh(read_file(path)); }

void save_mesh(const TetMesh &mesh, const std::filesystem::path &path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_mesh(mesh);
}

} // namespace opt3d1d
