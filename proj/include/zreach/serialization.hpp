#ifndef ZREACH_SERIALIZATION_HPP
#define ZREACH_SERIALIZATION_HPP

#include "zreach/zonotope.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>

namespace zreach
{

using Json = nlohmann::json;

/// Thrown for malformed documents; the message names the offending field.
class FormatError : public std::runtime_error
{
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

Json to_json(const Vector& v);
/// Row-major nested arrays.
Json to_json(const Matrix& m);
/// {"center": [...], "generators": [[col], ...]}
Json to_json(const Zonotope& z);
/// {"shape": [n, m], "center": vec(C), "generators": [vec(G_i), ...]}
Json to_json(const MatrixZonotope& m);
Json to_json(const IntervalMatrix& im);

Vector vector_from_json(const Json& j, const std::string& field);
Matrix matrix_from_json(const Json& j, const std::string& field);
Zonotope zonotope_from_json(const Json& j, const std::string& field);
MatrixZonotope matrix_zonotope_from_json(const Json& j, const std::string& field);

Json read_json_file(const std::filesystem::path& path);
void write_json_file(const std::filesystem::path& path, const Json& j);

} // namespace zreach

#endif
