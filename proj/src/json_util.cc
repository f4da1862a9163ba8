#include "json_util.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "bimanual/error.h"

namespace bimanual {
namespace {

void Dump(const nlohmann::json& value, int indent, int depth,
          std::string& out) {
  const auto newline = [&](int level) {
    if (indent >= 0) {
      out += '\n';
      out.append(static_cast<size_t>(indent * level), ' ');
    }
  };
  switch (value.type()) {
    case nlohmann::json::value_t::object: {
      if (value.empty()) {
        out += "{}";
        return;
      }
      out += '{';
      bool first = true;
      for (auto it = value.begin(); it != value.end(); ++it) {
        if (!first) out += ',';
        first = false;
        newline(depth + 1);
        out += nlohmann::json(it.key()).dump();
        out += indent >= 0 ? ": " : ":";
        Dump(it.value(), indent, depth + 1, out);
      }
      newline(depth);
      out += '}';
      return;
    }
    case nlohmann::json::value_t::array: {
      if (value.empty()) {
        out += "[]";
        return;
      }
      // Short numeric rows stay on one line (4x4 matrices read naturally).
      bool flat = value.size() <= 4;
      for (const auto& item : value) {
        flat = flat && item.is_number();
      }
      out += '[';
      for (size_t i = 0; i < value.size(); ++i) {
        if (i > 0) out += flat ? ", " : ",";
        if (!flat) newline(depth + 1);
        Dump(value[i], indent, depth + 1, out);
      }
      if (!flat) newline(depth);
      out += ']';
      return;
    }
    case nlohmann::json::value_t::number_float: {
      const double v = value.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      char buffer[32];
      std::snprintf(buffer, sizeof(buffer), "%.17g", v);
      out += buffer;
      return;
    }
    default:
      out += value.dump();
      return;
  }
}

}  // namespace

std::string DumpJson(const nlohmann::json& value, int indent) {
  std::string out;
  Dump(value, indent, 0, out);
  return out;
}

nlohmann::json MatrixToJson(const Eigen::Matrix4d& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (int r = 0; r < 4; ++r) {
    rows.push_back({m(r, 0), m(r, 1), m(r, 2), m(r, 3)});
  }
  return rows;
}

nlohmann::json VectorToJson(const Eigen::Vector3d& v) {
  return {v.x(), v.y(), v.z()};
}

Eigen::Matrix4d JsonToMatrix4(const nlohmann::json& value,
                              const std::string& pointer) {
  const auto fail = [&](const std::string& what) {
    return Error(ErrorKind::kSchema,
                 "schema violation at " + pointer + ": " + what);
  };
  if (!value.is_array() || value.size() != 4) {
    throw fail("expected a 4x4 array");
  }
  Eigen::Matrix4d m;
  for (int r = 0; r < 4; ++r) {
    const auto& row = value[static_cast<size_t>(r)];
    if (!row.is_array() || row.size() != 4) {
      throw fail("row " + std::to_string(r) + " is not a 4-element array");
    }
    for (int c = 0; c < 4; ++c) {
      const auto& entry = row[static_cast<size_t>(c)];
      if (!entry.is_number()) {
        throw fail("entry (" + std::to_string(r) + "," + std::to_string(c) +
                   ") is not a number");
      }
      m(r, c) = entry.get<double>();
    }
  }
  return m;
}

nlohmann::json ReadJsonFile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open " + path.string());
  }
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorKind::kSchema,
                "schema violation at /: " + path.string() +
                    " is not valid JSON (" + e.what() + ")");
  }
}

void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write " + path.string());
  }
  out << contents;
  if (!out) {
    throw Error(ErrorKind::kIo, "failed writing " + path.string());
  }
}

}  // namespace bimanual
