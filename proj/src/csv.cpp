#include "kgex/csv.hpp"

#include <fstream>

#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {

CsvReader::CsvReader(std::istream& in, CsvDialect dialect) : in_(in), dialect_(dialect) {}

bool CsvReader::read_record(std::vector<std::string>& fields) {
    fields.clear();
    int c = in_.get();
    if (c == EOF) return false;

    record_line_ = line_ + 1;
    std::string field;
    bool in_quotes = false;
    bool record_done = false;

    while (!record_done) {
        if (c == EOF) {
            if (in_quotes) throw ParseError("unterminated quoted field", record_line_);
            break;
        }
        char ch = static_cast<char>(c);
        if (in_quotes) {
            if (ch == dialect_.quote) {
                int next = in_.peek();
                if (next == dialect_.quote) {
                    field.push_back(dialect_.quote);
                    in_.get();
                } else {
                    in_quotes = false;
                }
            } else {
                if (ch == '\n') ++line_;
                field.push_back(ch);
            }
        } else if (ch == dialect_.quote && field.empty()) {
            in_quotes = true;
        } else if (ch == dialect_.delimiter) {
            fields.push_back(std::move(field));
            field.clear();
        } else if (ch == '\r') {
            // swallow; the matching '\n' (if any) ends the record
        } else if (ch == '\n') {
            ++line_;
            record_done = true;
        } else {
            field.push_back(ch);
        }
        if (!record_done) c = in_.get();
    }
    fields.push_back(std::move(field));
    if (line_ < record_line_) line_ = record_line_;  // final record without trailing newline
    return true;
}

CsvWriter::CsvWriter(std::ostream& out, CsvDialect dialect) : out_(out), dialect_(dialect) {}

std::string CsvWriter::escape(const std::string& field) const {
    bool needs_quote = field.find(dialect_.delimiter) != std::string::npos ||
                       field.find(dialect_.quote) != std::string::npos ||
                       field.find('\n') != std::string::npos ||
                       field.find('\r') != std::string::npos;
    if (!needs_quote) return field;
    std::string out;
    out.push_back(dialect_.quote);
    for (char c : field) {
        if (c == dialect_.quote) out.push_back(dialect_.quote);
        out.push_back(c);
    }
    out.push_back(dialect_.quote);
    return out;
}

void CsvWriter::write_record(const std::vector<std::string>& fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i) out_ << dialect_.delimiter;
        out_ << escape(fields[i]);
    }
    out_ << '\n';
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string() + " for reading");
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot open " + path.string() + " for writing");
    return out;
}

std::vector<std::pair<std::string, std::string>> read_two_column_file(
    const std::filesystem::path& path) {
    auto in = open_input(path);

    // Sniff: tab-separated files are two fields split on the first tab.
    std::string first_line;
    std::getline(in, first_line);
    bool tabbed = first_line.find('\t') != std::string::npos;
    in.seekg(0);

    std::vector<std::pair<std::string, std::string>> rows;
    if (tabbed) {
        std::string line;
        std::uint64_t lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            if (!line.empty() && line.back() == '\r') line.pop_back();
            if (line.empty()) continue;
            size_t tab = line.find('\t');
            if (tab == std::string::npos)
                throw ParseError("expected two tab-separated fields", lineno);
            rows.emplace_back(line.substr(0, tab), line.substr(tab + 1));
        }
    } else {
        CsvReader reader(in);
        std::vector<std::string> fields;
        while (reader.read_record(fields)) {
            if (fields.size() == 1 && fields[0].empty()) continue;  // blank line
            if (fields.size() != 2)
                throw ParseError("expected two fields, got " + std::to_string(fields.size()),
                                 reader.record_line());
            rows.emplace_back(std::move(fields[0]), std::move(fields[1]));
        }
    }
    return rows;
}

}  // namespace kgex
