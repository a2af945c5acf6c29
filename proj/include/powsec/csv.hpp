#pragma once

// Minimal comma-separated reader/writer for the numeric file formats the
// tools exchange. No quoting: every cell is a number.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "powsec/core.hpp"

namespace powsec::csv {

class Table {
  public:
    Table(std::string source, std::vector<std::string> header, std::vector<std::vector<std::string>> rows,
          std::vector<std::size_t> line_numbers);

    const std::string& source() const noexcept { return source_; }
    std::size_t rows() const noexcept { return rows_.size(); }
    bool has_column(const std::string& name) const;
    /// Column index; throws InputError naming the missing column.
    std::size_t column(const std::string& name) const;

    double real(std::size_t row, std::size_t col) const;
    std::int64_t integer(std::size_t row, std::size_t col) const;

    std::vector<double> reals(const std::string& name) const;
    std::vector<std::int64_t> integers(const std::string& name) const;

  private:
    std::string source_;
    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
    std::vector<std::size_t> lines_;
};

Table parse(std::istream& in, const std::string& source);
Table read(const std::filesystem::path& path);

/// Reads a two-column `tau,<value_column>` file.
TimeSeries read_series(const std::filesystem::path& path, const std::string& value_column = "value");
void write_series(const std::filesystem::path& path, const TimeSeries& series,
                  const std::string& value_column = "value");

/// Reads `tau,w_A` allocation files.
AllocationSeries read_allocations(const std::filesystem::path& path);
void write_allocations(const std::filesystem::path& path, const AllocationSeries& series);

/// Shortest round-trip decimal representation.
std::string format_real(double v);

}  // namespace powsec::csv
