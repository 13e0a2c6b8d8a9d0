#include "zreach/trajectory_io.hpp"

#include "zreach/serialization.hpp"

#include <charconv>
#include <fstream>
#include <optional>
#include <sstream>

namespace zreach
{

namespace
{

std::vector<std::string> split(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::optional<double> parse_double(const std::string& s)
{
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+')
        ++first;
    auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last)
        return std::nullopt;
    return v;
}

std::string format_double(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

} // namespace

CsvTrajectory read_trajectory_csv(std::istream& in, const std::string& source)
{
    CsvTrajectory out;
    std::string line;
    std::size_t lineno = 0;
    auto fail = [&](const std::string& msg) -> FormatError {
        return FormatError(source + ":" + std::to_string(lineno) + ": " + msg);
    };

    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!trim(line).empty()) {
            header = split(line);
            break;
        }
    }
    if (header.empty())
        throw FormatError(source + ": empty file (expected header k,x1..xn,u1..um)");
    for (auto& h : header)
        h = trim(h);
    if (header[0] != "k")
        throw fail("header must start with \"k\", got \"" + header[0] + "\"");
    std::size_t col = 1;
    while (col < header.size() && header[col] == "x" + std::to_string(out.state_dim + 1)) {
        ++out.state_dim;
        ++col;
    }
    while (col < header.size() && header[col] == "u" + std::to_string(out.input_dim + 1)) {
        ++out.input_dim;
        ++col;
    }
    if (col != header.size())
        throw fail("unexpected header column \"" + header[col] + "\" (expected k,x1..xn,u1..um)");
    if (out.state_dim == 0)
        throw fail("header names no state columns");

    const std::size_t width = header.size();
    bool last_without_input = false;
    long long expected_k = 0;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty())
            continue;
        if (last_without_input)
            throw fail("only the final row may omit its inputs");
        auto cells = split(line);
        if (cells.size() != width)
            throw fail("expected " + std::to_string(width) + " fields, found " + std::to_string(cells.size()));
        const auto k = parse_double(trim(cells[0]));
        if (!k || *k != static_cast<double>(static_cast<long long>(*k)))
            throw fail("step index \"" + trim(cells[0]) + "\" is not an integer");
        if (rows == 0)
            expected_k = static_cast<long long>(*k);
        else if (static_cast<long long>(*k) != expected_k)
            throw fail("step index " + trim(cells[0]) + " is not consecutive (expected " + std::to_string(expected_k) +
                       ")");
        ++expected_k;

        Vector x(out.state_dim);
        for (Index i = 0; i < out.state_dim; ++i) {
            const std::string cell = trim(cells[static_cast<std::size_t>(1 + i)]);
            const auto v = parse_double(cell);
            if (!v)
                throw fail("field x" + std::to_string(i + 1) + " = \"" + cell + "\" is not a number");
            x(i) = *v;
        }
        bool any_input = false;
        bool all_input = true;
        Vector u(out.input_dim);
        for (Index i = 0; i < out.input_dim; ++i) {
            const std::string cell = trim(cells[static_cast<std::size_t>(1 + out.state_dim + i)]);
            if (cell.empty()) {
                all_input = false;
                continue;
            }
            any_input = true;
            const auto v = parse_double(cell);
            if (!v)
                throw fail("field u" + std::to_string(i + 1) + " = \"" + cell + "\" is not a number");
            u(i) = *v;
        }
        if (any_input && !all_input)
            throw fail("inputs are partially empty");
        out.trajectory.states.push_back(std::move(x));
        if (out.input_dim > 0 && !any_input)
            last_without_input = true;
        else
            out.trajectory.inputs.push_back(std::move(u));
        ++rows;
    }
    // With a full final row the last input has no successor state.
    if (out.trajectory.inputs.size() == out.trajectory.states.size() && !out.trajectory.inputs.empty())
        out.trajectory.inputs.pop_back();
    if (rows == 0)
        out.warnings.push_back(source + ": header only, trajectory is empty");
    return out;
}

CsvTrajectory read_trajectory_csv(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw FormatError(path.string() + ": cannot open");
    return read_trajectory_csv(in, path.string());
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj)
{
    const Index nx = traj.states.empty() ? 0 : traj.states.front().size();
    const Index nu = traj.inputs.empty() ? 0 : traj.inputs.front().size();
    out << "k";
    for (Index i = 0; i < nx; ++i)
        out << ",x" << i + 1;
    for (Index i = 0; i < nu; ++i)
        out << ",u" << i + 1;
    out << '\n';
    for (std::size_t k = 0; k < traj.states.size(); ++k) {
        out << k;
        for (Index i = 0; i < nx; ++i)
            out << ',' << format_double(traj.states[k](i));
        for (Index i = 0; i < nu; ++i) {
            out << ',';
            if (k < traj.inputs.size())
                out << format_double(traj.inputs[k](i));
        }
        out << '\n';
    }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj)
{
    std::ofstream out(path);
    if (!out)
        throw FormatError(path.string() + ": cannot write");
    write_trajectory_csv(out, traj);
}

} // namespace zreach
