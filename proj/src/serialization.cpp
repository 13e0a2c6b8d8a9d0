#include "zreach/serialization.hpp"

#include <fstream>

namespace zreach
{

namespace
{

const Json& require(const Json& j, const char* key, const std::string& field)
{
    if (!j.is_object() || !j.contains(key))
        throw FormatError(field + ": missing \"" + key + "\"");
    return j.at(key);
}

double number(const Json& j, const std::string& field)
{
    if (!j.is_number())
        throw FormatError(field + ": expected a number");
    return j.get<double>();
}

} // namespace

Json to_json(const Vector& v)
{
    Json out = Json::array();
    for (Index i = 0; i < v.size(); ++i)
        out.push_back(v(i));
    return out;
}

Json to_json(const Matrix& m)
{
    Json out = Json::array();
    for (Index i = 0; i < m.rows(); ++i) {
        Json row = Json::array();
        for (Index j = 0; j < m.cols(); ++j)
            row.push_back(m(i, j));
        out.push_back(std::move(row));
    }
    return out;
}

Json to_json(const Zonotope& z)
{
    Json gens = Json::array();
    for (Index k = 0; k < z.num_generators(); ++k)
        gens.push_back(to_json(Vector(z.generators().col(k))));
    return Json{{"center", to_json(z.center())}, {"generators", std::move(gens)}};
}

Json to_json(const MatrixZonotope& m)
{
    Json gens = Json::array();
    for (const auto& g : m.generators())
        gens.push_back(to_json(vec(g)));
    return Json{{"shape", {m.rows(), m.cols()}}, {"center", to_json(vec(m.center()))}, {"generators", std::move(gens)}};
}

Json to_json(const IntervalMatrix& im)
{
    return Json{{"lower", to_json(im.lower())}, {"upper", to_json(im.upper())}};
}

Vector vector_from_json(const Json& j, const std::string& field)
{
    if (j.is_number())
        return Vector::Constant(1, j.get<double>());
    if (!j.is_array())
        throw FormatError(field + ": expected an array of numbers");
    Vector v(static_cast<Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i)
        v(static_cast<Index>(i)) = number(j[i], field + "[" + std::to_string(i) + "]");
    return v;
}

Matrix matrix_from_json(const Json& j, const std::string& field)
{
    if (!j.is_array())
        throw FormatError(field + ": expected an array of rows");
    const Index rows = static_cast<Index>(j.size());
    if (rows == 0)
        return Matrix(0, 0);
    // A flat array is read as a column vector.
    if (j[0].is_number())
        return vector_from_json(j, field);
    const Index cols = static_cast<Index>(j[0].size());
    Matrix m(rows, cols);
    for (Index i = 0; i < rows; ++i) {
        const Json& row = j[static_cast<std::size_t>(i)];
        const std::string rf = field + "[" + std::to_string(i) + "]";
        if (!row.is_array() || static_cast<Index>(row.size()) != cols)
            throw FormatError(rf + ": rows must all have " + std::to_string(cols) + " entries");
        for (Index k = 0; k < cols; ++k)
            m(i, k) = number(row[static_cast<std::size_t>(k)], rf);
    }
    return m;
}

Zonotope zonotope_from_json(const Json& j, const std::string& field)
{
    const Vector c = vector_from_json(require(j, "center", field), field + ".center");
    const Json& gj = j.contains("generators") ? j.at("generators") : Json::array();
    if (!gj.is_array())
        throw FormatError(field + ".generators: expected an array of columns");
    Matrix g(c.size(), static_cast<Index>(gj.size()));
    for (std::size_t k = 0; k < gj.size(); ++k) {
        const std::string gf = field + ".generators[" + std::to_string(k) + "]";
        const Vector col = vector_from_json(gj[k], gf);
        if (col.size() != c.size())
            throw FormatError(gf + ": length " + std::to_string(col.size()) + " differs from center dimension " +
                              std::to_string(c.size()));
        g.col(static_cast<Index>(k)) = col;
    }
    return Zonotope(c, g);
}

MatrixZonotope matrix_zonotope_from_json(const Json& j, const std::string& field)
{
    const Json& shape = require(j, "shape", field);
    if (!shape.is_array() || shape.size() != 2 || !shape[0].is_number_integer() || !shape[1].is_number_integer())
        throw FormatError(field + ".shape: expected [rows, cols]");
    const Index rows = shape[0].get<Index>();
    const Index cols = shape[1].get<Index>();
    const Zonotope z = zonotope_from_json(j, field);
    if (z.dim() != rows * cols)
        throw FormatError(field + ": center length does not match shape");
    return unvectorize(z, rows, cols);
}

Json read_json_file(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError(path.string() + ": cannot open");
    try {
        return Json::parse(in);
    }
    catch (const Json::parse_error& e) {
        throw FormatError(path.string() + ": " + e.what());
    }
}

void write_json_file(const std::filesystem::path& path, const Json& j)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError(path.string() + ": cannot write");
    out << j.dump(2) << '\n';
}

} // namespace zreach
