#include "neusurf/mesh/mesh_io.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace neusurf {

static_assert(std::endian::native == std::endian::little,
              "binary PLY writer assumes a little-endian host");

namespace {

std::uint8_t quantize_channel(Real c) {
  const Real scaled = std::round(c * 255.0);
  return static_cast<std::uint8_t>(scaled < 0.0 ? 0.0 : (scaled > 255.0 ? 255.0 : scaled));
}

void write_raw(std::ostream& out, const void* data, std::size_t n) {
  out.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
}

void write_ply(const TriangleMesh& mesh, const std::string& path, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);

  out << "ply\n"
      << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n")
      << "element vertex " << mesh.vertex_count() << "\n"
      << "property double x\nproperty double y\nproperty double z\n";
  if (mesh.has_normals())
    out << "property double nx\nproperty double ny\nproperty double nz\n";
  if (mesh.has_colors())
    out << "property uchar red\nproperty uchar green\nproperty uchar blue\n";
  out << "element face " << mesh.triangle_count() << "\n"
      << "property list uchar int vertex_indices\n"
      << "end_header\n";

  if (binary) {
    for (int i = 0; i < mesh.vertex_count(); ++i) {
      double xyz[3] = {mesh.vertices(0, i), mesh.vertices(1, i), mesh.vertices(2, i)};
      write_raw(out, xyz, sizeof(xyz));
      if (mesh.has_normals()) {
        double n[3] = {mesh.normals(0, i), mesh.normals(1, i), mesh.normals(2, i)};
        write_raw(out, n, sizeof(n));
      }
      if (mesh.has_colors()) {
        std::uint8_t rgb[3] = {quantize_channel(mesh.colors(0, i)),
                               quantize_channel(mesh.colors(1, i)),
                               quantize_channel(mesh.colors(2, i))};
        write_raw(out, rgb, sizeof(rgb));
      }
    }
    for (int t = 0; t < mesh.triangle_count(); ++t) {
      const std::uint8_t count = 3;
      std::int32_t idx[3] = {mesh.triangles(0, t), mesh.triangles(1, t),
                             mesh.triangles(2, t)};
      write_raw(out, &count, 1);
      write_raw(out, idx, sizeof(idx));
    }
  } else {
    out << std::setprecision(17);
    for (int i = 0; i < mesh.vertex_count(); ++i) {
      out << mesh.vertices(0, i) << ' ' << mesh.vertices(1, i) << ' '
          << mesh.vertices(2, i);
      if (mesh.has_normals())
        out << ' ' << mesh.normals(0, i) << ' ' << mesh.normals(1, i) << ' '
            << mesh.normals(2, i);
      if (mesh.has_colors())
        out << ' ' << int(quantize_channel(mesh.colors(0, i))) << ' '
            << int(quantize_channel(mesh.colors(1, i))) << ' '
            << int(quantize_channel(mesh.colors(2, i)));
      out << '\n';
    }
    for (int t = 0; t < mesh.triangle_count(); ++t)
      out << "3 " << mesh.triangles(0, t) << ' ' << mesh.triangles(1, t) << ' '
          << mesh.triangles(2, t) << '\n';
  }
  if (!out) throw std::runtime_error("save_mesh: write failed for " + path);
}

void write_obj(const TriangleMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_mesh: cannot open " + path);
  out << std::setprecision(17);
  for (int i = 0; i < mesh.vertex_count(); ++i)
    out << "v " << mesh.vertices(0, i) << ' ' << mesh.vertices(1, i) << ' '
        << mesh.vertices(2, i) << '\n';
  for (int i = 0; mesh.has_normals() && i < mesh.vertex_count(); ++i)
    out << "vn " << mesh.normals(0, i) << ' ' << mesh.normals(1, i) << ' '
        << mesh.normals(2, i) << '\n';
  for (int t = 0; t < mesh.triangle_count(); ++t) {
    out << 'f';
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles(k, t) + 1;  // OBJ indices are 1-based
      if (mesh.has_normals())
        out << ' ' << v << "//" << v;
      else
        out << ' ' << v;
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("save_mesh: write failed for " + path);
}

// ---------------------------------------------------------------------------
// Readers.

struct PlyProperty {
  std::string name;
  std::string type;  // double | float | uchar
};

struct PlyHeader {
  bool binary = false;
  Eigen::Index n_vertices = 0;
  Eigen::Index n_faces = 0;
  std::vector<PlyProperty> vertex_props;
  bool has_face_list = false;
};

PlyHeader parse_ply_header(std::istream& in, const std::string& path) {
  PlyHeader h;
  std::string line;
  std::getline(in, line);
  if (line == "ply\r") line.pop_back();
  if (line != "ply") throw std::runtime_error("load_mesh: not a PLY file: " + path);

  std::string element;  // element whose properties are being declared
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (word == "comment" || word.empty()) continue;
    if (word == "format") {
      std::string fmt;
      ls >> fmt;
      if (fmt == "ascii")
        h.binary = false;
      else if (fmt == "binary_little_endian")
        h.binary = true;
      else
        throw std::runtime_error("load_mesh: unsupported PLY format in " + path);
    } else if (word == "element") {
      Eigen::Index count = 0;
      ls >> element >> count;
      if (element == "vertex")
        h.n_vertices = count;
      else if (element == "face")
        h.n_faces = count;
      else
        throw std::runtime_error("load_mesh: unsupported PLY element '" + element +
                                 "' in " + path);
    } else if (word == "property") {
      std::string type;
      ls >> type;
      if (element == "vertex") {
        PlyProperty p;
        if (type == "double" || type == "float64")
          p.type = "double";
        else if (type == "float" || type == "float32")
          p.type = "float";
        else if (type == "uchar" || type == "uint8")
          p.type = "uchar";
        else
          throw std::runtime_error("load_mesh: unsupported vertex property type '" +
                                   type + "' in " + path);
        ls >> p.name;
        h.vertex_props.push_back(p);
      } else if (element == "face") {
        std::string count_t, index_t, name;
        ls >> count_t >> index_t >> name;
        if (type != "list" || (count_t != "uchar" && count_t != "uint8") ||
            (index_t != "int" && index_t != "int32") ||
            (name != "vertex_indices" && name != "vertex_index"))
          throw std::runtime_error("load_mesh: unsupported face property in " + path);
        h.has_face_list = true;
      } else {
        throw std::runtime_error("load_mesh: property outside element in " + path);
      }
    } else if (word == "end_header") {
      return h;
    } else {
      throw std::runtime_error("load_mesh: unexpected header line '" + line + "' in " +
                               path);
    }
  }
  throw std::runtime_error("load_mesh: missing end_header in " + path);
}

TriangleMesh read_ply(std::istream& in, const std::string& path) {
  const PlyHeader h = parse_ply_header(in, path);
  if (h.n_faces > 0 && !h.has_face_list)
    throw std::runtime_error("load_mesh: face element without index list in " + path);

  bool any_normal = false, any_color = false;
  for (const auto& p : h.vertex_props) {
    if (p.name == "nx" || p.name == "ny" || p.name == "nz") any_normal = true;
    if (p.name == "red" || p.name == "green" || p.name == "blue") any_color = true;
  }

  TriangleMesh mesh;
  mesh.vertices.resize(3, h.n_vertices);
  if (any_normal) mesh.normals.resize(3, h.n_vertices);
  if (any_color) mesh.colors.resize(3, h.n_vertices);

  const auto store = [&](const std::string& name, Eigen::Index i, Real v) {
    if (name == "x")
      mesh.vertices(0, i) = v;
    else if (name == "y")
      mesh.vertices(1, i) = v;
    else if (name == "z")
      mesh.vertices(2, i) = v;
    else if (name == "nx")
      mesh.normals(0, i) = v;
    else if (name == "ny")
      mesh.normals(1, i) = v;
    else if (name == "nz")
      mesh.normals(2, i) = v;
    else if (name == "red")
      mesh.colors(0, i) = v / 255.0;
    else if (name == "green")
      mesh.colors(1, i) = v / 255.0;
    else if (name == "blue")
      mesh.colors(2, i) = v / 255.0;
    else
      throw std::runtime_error("load_mesh: unknown vertex property '" + name +
                               "' in " + path);
  };

  std::vector<std::int32_t> tri_flat;
  tri_flat.reserve(static_cast<std::size_t>(h.n_faces) * 3);

  if (h.binary) {
    for (Eigen::Index i = 0; i < h.n_vertices; ++i) {
      for (const auto& p : h.vertex_props) {
        Real v = 0;
        if (p.type == "double") {
          double d;
          in.read(reinterpret_cast<char*>(&d), sizeof(d));
          v = d;
        } else if (p.type == "float") {
          float f;
          in.read(reinterpret_cast<char*>(&f), sizeof(f));
          v = f;
        } else {
          std::uint8_t b;
          in.read(reinterpret_cast<char*>(&b), 1);
          v = b;
        }
        store(p.name, i, v);
      }
    }
    for (Eigen::Index t = 0; t < h.n_faces; ++t) {
      std::uint8_t count;
      in.read(reinterpret_cast<char*>(&count), 1);
      if (count != 3)
        throw std::runtime_error("load_mesh: non-triangular face in " + path);
      std::int32_t idx[3];
      in.read(reinterpret_cast<char*>(idx), sizeof(idx));
      tri_flat.insert(tri_flat.end(), idx, idx + 3);
    }
    if (!in) throw std::runtime_error("load_mesh: truncated PLY data in " + path);
  } else {
    for (Eigen::Index i = 0; i < h.n_vertices; ++i)
      for (const auto& p : h.vertex_props) {
        Real v;
        if (!(in >> v))
          throw std::runtime_error("load_mesh: truncated PLY data in " + path);
        store(p.name, i, v);
      }
    for (Eigen::Index t = 0; t < h.n_faces; ++t) {
      int count, a, b, c;
      if (!(in >> count >> a >> b >> c) || count != 3)
        throw std::runtime_error("load_mesh: bad face row in " + path);
      tri_flat.push_back(a);
      tri_flat.push_back(b);
      tri_flat.push_back(c);
    }
  }

  mesh.triangles.resize(3, static_cast<Eigen::Index>(tri_flat.size() / 3));
  for (Eigen::Index t = 0; t < mesh.triangles.cols(); ++t) {
    mesh.triangles(0, t) = tri_flat[static_cast<std::size_t>(t) * 3];
    mesh.triangles(1, t) = tri_flat[static_cast<std::size_t>(t) * 3 + 1];
    mesh.triangles(2, t) = tri_flat[static_cast<std::size_t>(t) * 3 + 2];
  }
  return mesh;
}

TriangleMesh read_obj(std::istream& in, const std::string& path) {
  std::vector<Vec3> vertices, normals;
  std::vector<int> tri_flat;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "v" || tag == "vn") {
      Vec3 p;
      if (!(ls >> p.x() >> p.y() >> p.z()))
        throw std::runtime_error("load_mesh: bad OBJ line '" + line + "' in " + path);
      (tag == "v" ? vertices : normals).push_back(p);
    } else if (tag == "f") {
      int n = 0;
      std::string token;
      while (ls >> token) {
        // accept "i", "i//k", and "i/j/k"; only the position index is used
        const std::size_t slash = token.find('/');
        int v = 0;
        try {
          v = std::stoi(token.substr(0, slash));
        } catch (const std::exception&) {
          throw std::runtime_error("load_mesh: bad OBJ face token '" + token +
                                   "' in " + path);
        }
        if (v <= 0)
          throw std::runtime_error("load_mesh: unsupported OBJ index '" + token +
                                   "' in " + path);
        tri_flat.push_back(v - 1);
        ++n;
      }
      if (n != 3)
        throw std::runtime_error("load_mesh: OBJ face is not a triangle in " + path);
    } else if (tag.empty() || tag[0] == '#' || tag == "g" || tag == "o" ||
               tag == "s" || tag == "usemtl" || tag == "mtllib") {
      continue;  // structural/no-op tags
    } else {
      throw std::runtime_error("load_mesh: unsupported OBJ tag '" + tag + "' in " +
                               path);
    }
  }

  TriangleMesh mesh;
  mesh.vertices.resize(3, static_cast<Eigen::Index>(vertices.size()));
  for (std::size_t i = 0; i < vertices.size(); ++i)
    mesh.vertices.col(static_cast<Eigen::Index>(i)) = vertices[i];
  // Our writer emits one normal per vertex in vertex order; anything else is
  // left unattached rather than guessed at.
  if (normals.size() == vertices.size() && !normals.empty()) {
    mesh.normals.resize(3, static_cast<Eigen::Index>(normals.size()));
    for (std::size_t i = 0; i < normals.size(); ++i)
      mesh.normals.col(static_cast<Eigen::Index>(i)) = normals[i];
  }
  mesh.triangles.resize(3, static_cast<Eigen::Index>(tri_flat.size() / 3));
  for (Eigen::Index t = 0; t < mesh.triangles.cols(); ++t) {
    mesh.triangles(0, t) = tri_flat[static_cast<std::size_t>(t) * 3];
    mesh.triangles(1, t) = tri_flat[static_cast<std::size_t>(t) * 3 + 1];
    mesh.triangles(2, t) = tri_flat[static_cast<std::size_t>(t) * 3 + 2];
  }
  return mesh;
}

}  // namespace

void save_mesh(const TriangleMesh& mesh, const std::string& path, MeshFormat format) {
  mesh.validate();
  switch (format) {
    case MeshFormat::kPlyAscii:
      write_ply(mesh, path, /*binary=*/false);
      return;
    case MeshFormat::kPlyBinary:
      write_ply(mesh, path, /*binary=*/true);
      return;
    case MeshFormat::kObj:
      write_obj(mesh, path);
      return;
  }
  throw std::invalid_argument("save_mesh: unknown format");
}

TriangleMesh load_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("load_mesh: cannot open " + path);
  TriangleMesh mesh;
  if (in.peek() == 'p') {
    mesh = read_ply(in, path);
  } else {
    mesh = read_obj(in, path);
  }
  mesh.validate();
  return mesh;
}

}  // namespace neusurf
