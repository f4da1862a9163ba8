#include "bimanual/ply.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>

#include "bimanual/error.h"

namespace bimanual {
namespace {

static_assert(std::endian::native == std::endian::little,
              "PLY I/O assumes a little-endian host");

enum class PlyType { kInt8, kUint8, kInt16, kUint16, kInt32, kUint32,
                     kFloat32, kFloat64 };

size_t SizeOf(PlyType type) {
  switch (type) {
    case PlyType::kInt8:
    case PlyType::kUint8:
      return 1;
    case PlyType::kInt16:
    case PlyType::kUint16:
      return 2;
    case PlyType::kInt32:
    case PlyType::kUint32:
    case PlyType::kFloat32:
      return 4;
    case PlyType::kFloat64:
      return 8;
  }
  return 0;
}

PlyType ParseType(const std::string& name, const std::filesystem::path& path) {
  static const std::map<std::string, PlyType> kTypes = {
      {"char", PlyType::kInt8},     {"int8", PlyType::kInt8},
      {"uchar", PlyType::kUint8},   {"uint8", PlyType::kUint8},
      {"short", PlyType::kInt16},   {"int16", PlyType::kInt16},
      {"ushort", PlyType::kUint16}, {"uint16", PlyType::kUint16},
      {"int", PlyType::kInt32},     {"int32", PlyType::kInt32},
      {"uint", PlyType::kUint32},   {"uint32", PlyType::kUint32},
      {"float", PlyType::kFloat32}, {"float32", PlyType::kFloat32},
      {"double", PlyType::kFloat64}, {"float64", PlyType::kFloat64}};
  const auto it = kTypes.find(name);
  if (it == kTypes.end()) {
    throw Error(ErrorKind::kSchema,
                path.string() + ": unsupported PLY property type '" + name +
                    "'");
  }
  return it->second;
}

template <typename T>
double Load(const char* bytes) {
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return static_cast<double>(value);
}

double Decode(PlyType type, const char* bytes) {
  switch (type) {
    case PlyType::kInt8: return Load<int8_t>(bytes);
    case PlyType::kUint8: return Load<uint8_t>(bytes);
    case PlyType::kInt16: return Load<int16_t>(bytes);
    case PlyType::kUint16: return Load<uint16_t>(bytes);
    case PlyType::kInt32: return Load<int32_t>(bytes);
    case PlyType::kUint32: return Load<uint32_t>(bytes);
    case PlyType::kFloat32: return Load<float>(bytes);
    case PlyType::kFloat64: return Load<double>(bytes);
  }
  return 0.0;
}

template <typename T>
void Put(std::string& out, T value) {
  char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  out.append(bytes, sizeof(T));
}

void WriteFile(const std::filesystem::path& path, const std::string& header,
               const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  out << header;
  out.write(body.data(), static_cast<std::streamsize>(body.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, "failed writing " + path.string());
  }
}

}  // namespace

const std::vector<double>* PlyVertices::Find(const std::string& name) const {
  for (size_t i = 0; i < names.size(); ++i) {
    if (names[i] == name) {
      return &columns[i];
    }
  }
  return nullptr;
}

PlyVertices ReadPly(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  const auto schema_error = [&](const std::string& what) {
    return Error(ErrorKind::kSchema, path.string() + ": " + what);
  };

  std::string line;
  if (!std::getline(in, line) || line != "ply") {
    throw schema_error("missing 'ply' magic");
  }

  PlyVertices result;
  std::vector<PlyType> types;
  bool in_vertex = false;
  bool seen_vertex = false;
  bool format_ok = false;
  while (true) {
    if (!std::getline(in, line)) {
      throw schema_error("unterminated header");
    }
    if (!line.empty() && line.back() == '\r') {
      line.pop_back();
    }
    std::istringstream tokens(line);
    std::string keyword;
    tokens >> keyword;
    if (keyword == "end_header") {
      break;
    } else if (keyword == "format") {
      std::string format;
      tokens >> format;
      if (format != "binary_little_endian") {
        throw schema_error("only binary_little_endian PLY is supported");
      }
      format_ok = true;
    } else if (keyword == "element") {
      std::string name;
      size_t count = 0;
      tokens >> name >> count;
      if (name == "vertex") {
        if (seen_vertex) {
          throw schema_error("duplicate vertex element");
        }
        // Data of any element declared before "vertex" would have to be
        // skipped, which is impossible for list properties.
        if (!types.empty() || in_vertex) {
          throw schema_error("vertex must be the first element");
        }
        in_vertex = true;
        seen_vertex = true;
        result.count = count;
      } else {
        if (!seen_vertex) {
          throw schema_error("vertex must be the first element");
        }
        in_vertex = false;
      }
    } else if (keyword == "property") {
      if (!in_vertex) {
        continue;
      }
      std::string type_name;
      std::string name;
      tokens >> type_name >> name;
      if (type_name == "list") {
        throw schema_error("list properties on vertices are not supported");
      }
      types.push_back(ParseType(type_name, path));
      result.names.push_back(name);
    } else if (keyword == "comment" || keyword == "obj_info" ||
               keyword.empty()) {
      continue;
    } else {
      throw schema_error("unexpected header line '" + line + "'");
    }
  }
  if (!format_ok) {
    throw schema_error("missing format line");
  }
  if (!seen_vertex) {
    throw schema_error("no vertex element");
  }

  size_t stride = 0;
  std::vector<size_t> offsets;
  for (const PlyType type : types) {
    offsets.push_back(stride);
    stride += SizeOf(type);
  }
  std::vector<char> data(stride * result.count);
  in.read(data.data(), static_cast<std::streamsize>(data.size()));
  if (static_cast<size_t>(in.gcount()) != data.size()) {
    throw schema_error("truncated vertex data");
  }

  result.columns.assign(types.size(), std::vector<double>(result.count));
  for (size_t v = 0; v < result.count; ++v) {
    const char* row = data.data() + v * stride;
    for (size_t p = 0; p < types.size(); ++p) {
      result.columns[p][v] = Decode(types[p], row + offsets[p]);
    }
  }
  return result;
}

void WritePointMapPly(const std::filesystem::path& path,
                      std::span<const Eigen::Vector3d> points,
                      std::span<const double> confidences) {
  if (points.size() != confidences.size()) {
    throw Error(ErrorKind::kInvalidInput, "length mismatch");
  }
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\n"
         << "element vertex " << points.size() << "\n"
         << "property float x\nproperty float y\nproperty float z\n"
         << "property float confidence\nend_header\n";
  std::string body;
  body.reserve(points.size() * 16);
  for (size_t i = 0; i < points.size(); ++i) {
    Put(body, static_cast<float>(points[i].x()));
    Put(body, static_cast<float>(points[i].y()));
    Put(body, static_cast<float>(points[i].z()));
    Put(body, static_cast<float>(confidences[i]));
  }
  WriteFile(path, header.str(), body);
}

void WriteTaggedCloudPly(const std::filesystem::path& path,
                         std::span<const Eigen::Vector3d> points,
                         std::span<const uint8_t> arm_ids,
                         std::span<const uint16_t> view_ids) {
  if (points.size() != arm_ids.size() || points.size() != view_ids.size()) {
    throw Error(ErrorKind::kInvalidInput, "length mismatch");
  }
  std::ostringstream header;
  header << "ply\nformat binary_little_endian 1.0\n"
         << "element vertex " << points.size() << "\n"
         << "property float x\nproperty float y\nproperty float z\n"
         << "property uchar arm_id\nproperty ushort view_id\nend_header\n";
  std::string body;
  body.reserve(points.size() * 15);
  for (size_t i = 0; i < points.size(); ++i) {
    Put(body, static_cast<float>(points[i].x()));
    Put(body, static_cast<float>(points[i].y()));
    Put(body, static_cast<float>(points[i].z()));
    Put(body, arm_ids[i]);
    Put(body, view_ids[i]);
  }
  WriteFile(path, header.str(), body);
}

}  // namespace bimanual
