#pragma once

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

namespace kgex {

// Comma-delimited, double-quote quoting, UTF-8. Quoted fields may contain the
// delimiter, doubled quotes, and line breaks.
struct CsvDialect {
    char delimiter = ',';
    char quote = '"';
};

// Pull-style record reader. Tracks the line number each record starts on so
// parse errors can point at the offending input line.
class CsvReader {
public:
    CsvReader(std::istream& in, CsvDialect dialect = {});

    // Reads the next record into `fields`. Returns false on end of input.
    bool read_record(std::vector<std::string>& fields);

    std::uint64_t record_line() const { return record_line_; }

private:
    std::istream& in_;
    CsvDialect dialect_;
    std::uint64_t line_ = 0;         // lines consumed so far
    std::uint64_t record_line_ = 0;  // first line of the last record
};

class CsvWriter {
public:
    explicit CsvWriter(std::ostream& out, CsvDialect dialect = {});
    void write_record(const std::vector<std::string>& fields);

private:
    std::ostream& out_;
    CsvDialect dialect_;
    std::string escape(const std::string& field) const;
};

// Reads a whole two-column file (key, text). The delimiter is sniffed per
// file: tab when the first line contains one, the dialect delimiter otherwise.
// Label files in the wild come in both CSV and TSV forms.
std::vector<std::pair<std::string, std::string>> read_two_column_file(
    const std::filesystem::path& path);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

}  // namespace kgex
