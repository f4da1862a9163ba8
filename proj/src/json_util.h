#ifndef BIMANUAL_SRC_JSON_UTIL_H_
#define BIMANUAL_SRC_JSON_UTIL_H_

#include <filesystem>
#include <string>

#include <Eigen/Core>

#include "json.hpp"

namespace bimanual {

// Serializes like nlohmann::json::dump, except that floating-point numbers
// are always printed with 17 significant digits ("%.17g").
std::string DumpJson(const nlohmann::json& value, int indent = 2);

nlohmann::json MatrixToJson(const Eigen::Matrix4d& m);
nlohmann::json VectorToJson(const Eigen::Vector3d& v);

// Parses a row-major 4x4 numeric array; throws kSchema naming `pointer`.
Eigen::Matrix4d JsonToMatrix4(const nlohmann::json& value,
                              const std::string& pointer);

nlohmann::json ReadJsonFile(const std::filesystem::path& path);
void WriteTextFile(const std::filesystem::path& path,
                   const std::string& contents);

}  // namespace bimanual

#endif  // BIMANUAL_SRC_JSON_UTIL_H_
