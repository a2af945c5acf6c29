#include "powsec/csv.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <sstream>

namespace powsec::csv {
namespace {

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) {
        while (!cell.empty() && (cell.back() == ' ' || cell.back() == '\t')) cell.pop_back();
        std::size_t b = 0;
        while (b < cell.size() && (cell[b] == ' ' || cell[b] == '\t')) ++b;
        cells.push_back(cell.substr(b));
    }
    if (!line.empty() && line.back() == ',') cells.emplace_back();
    return cells;
}

}  // namespace

Table::Table(std::string source, std::vector<std::string> header, std::vector<std::vector<std::string>> rows,
             std::vector<std::size_t> line_numbers)
    : source_(std::move(source)), header_(std::move(header)), rows_(std::move(rows)), lines_(std::move(line_numbers)) {}

bool Table::has_column(const std::string& name) const {
    for (const auto& h : header_)
        if (h == name) return true;
    return false;
}

std::size_t Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header_.size(); ++i)
        if (header_[i] == name) return i;
    throw InputError(source_, 1, name, "missing required column '" + name + "'");
}

double Table::real(std::size_t row, std::size_t col) const {
    const std::string& s = rows_[row][col];
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw InputError(source_, lines_[row], header_[col], "not a number: '" + s + "'");
    return v;
}

std::int64_t Table::integer(std::size_t row, std::size_t col) const {
    const std::string& s = rows_[row][col];
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw InputError(source_, lines_[row], header_[col], "not an integer: '" + s + "'");
    return v;
}

std::vector<double> Table::reals(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<double> out(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) out[r] = real(r, c);
    return out;
}

std::vector<std::int64_t> Table::integers(const std::string& name) const {
    const std::size_t c = column(name);
    std::vector<std::int64_t> out(rows_.size());
    for (std::size_t r = 0; r < rows_.size(); ++r) out[r] = integer(r, c);
    return out;
}

Table parse(std::istream& in, const std::string& source) {
    std::string line;
    std::size_t lineno = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        header = split(line);
        break;
    }
    if (header.empty()) throw InputError(source, lineno, "", "missing header row");

    std::vector<std::vector<std::string>> rows;
    std::vector<std::size_t> lines;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line);
        if (cells.size() != header.size())
            throw InputError(source, lineno, "",
                             "expected " + std::to_string(header.size()) + " columns, found " +
                                 std::to_string(cells.size()));
        rows.push_back(std::move(cells));
        lines.push_back(lineno);
    }
    return Table(source, std::move(header), std::move(rows), std::move(lines));
}

Table read(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(path.string(), 0, "", "cannot open file");
    return parse(in, path.string());
}

TimeSeries read_series(const std::filesystem::path& path, const std::string& value_column) {
    Table t = read(path);
    auto taus = t.integers("tau");
    auto vals = t.reals(value_column);
    try {
        return TimeSeries::from_columns(taus, vals);
    } catch (const Error& e) {
        throw InputError(path.string(), 0, "tau", e.what());
    }
}

void write_series(const std::filesystem::path& path, const TimeSeries& series, const std::string& value_column) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "tau," << value_column << '\n';
    for (const auto& p : series) out << p.tau << ',' << format_real(p.value) << '\n';
}

AllocationSeries read_allocations(const std::filesystem::path& path) {
    Table t = read(path);
    auto taus = t.integers("tau");
    auto wa = t.reals("w_A");
    const std::size_t col = t.column("w_A");
    for (std::size_t i = 0; i < wa.size(); ++i)
        if (!(wa[i] >= 0.0 && wa[i] <= 1.0)) throw InputError(path.string(), i + 2, "w_A", "allocation outside [0,1]");
    (void)col;
    try {
        return allocation_series_from_share(TimeSeries::from_columns(taus, wa));
    } catch (const Error& e) {
        throw InputError(path.string(), 0, "tau", e.what());
    }
}

void write_allocations(const std::filesystem::path& path, const AllocationSeries& series) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path.string());
    out << "tau,w_A\n";
    for (const auto& s : series) out << s.tau << ',' << format_real(s.w.a()) << '\n';
}

std::string format_real(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace powsec::csv
