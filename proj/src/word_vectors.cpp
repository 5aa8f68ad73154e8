#include "kgex/word_vectors.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "kgex/csv.hpp"
#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {
namespace {

bool parse_number(const std::string& token, double& value) {
    char* end = nullptr;
    value = std::strtod(token.c_str(), &end);
    return end != nullptr && *end == '\0' && end != token.c_str();
}

bool is_count_header(const std::vector<std::string>& tokens) {
    if (tokens.size() != 2) return false;
    for (const std::string& t : tokens) {
        for (char c : t)
            if (c < '0' || c > '9') return false;
        if (t.empty()) return false;
    }
    return true;
}

std::vector<std::string> split_ws(const std::string& line) {
    std::vector<std::string> tokens;
    std::istringstream in(line);
    std::string token;
    while (in >> token) tokens.push_back(token);
    return tokens;
}

}  // namespace

WordVectors WordVectors::load(const std::filesystem::path& path) {
    auto in = open_input(path);
    return load(in);
}

WordVectors WordVectors::load(std::istream& in) {
    WordVectors wv;
    std::string line;
    std::uint64_t lineno = 0;
    bool first_content_line = true;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string> tokens = split_ws(line);
        if (first_content_line) {
            first_content_line = false;
            if (is_count_header(tokens)) continue;
        }
        if (tokens.size() < 2) throw ParseError("word vector line needs a word and values", lineno);
        std::size_t dim = tokens.size() - 1;
        if (wv.dim_ == 0)
            wv.dim_ = dim;
        else if (dim != wv.dim_)
            throw ParseError("word vector dimension mismatch: expected " +
                                 std::to_string(wv.dim_) + ", got " + std::to_string(dim),
                             lineno);
        if (wv.words_.count(tokens[0]) != 0) continue;
        std::size_t row = wv.words_.size();
        wv.words_.emplace(tokens[0], row);
        wv.table_.resize((row + 1) * wv.dim_);
        for (std::size_t i = 0; i < dim; ++i) {
            double value = 0.0;
            if (!parse_number(tokens[i + 1], value))
                throw ParseError("bad vector value: " + tokens[i + 1], lineno);
            wv.table_[row * wv.dim_ + i] = value;
        }
    }
    return wv;
}

std::optional<std::span<const double>> WordVectors::vector(std::string_view word) const {
    auto it = words_.find(std::string(word));
    if (it == words_.end()) return std::nullopt;
    return std::span<const double>{table_.data() + it->second * dim_, dim_};
}

std::optional<std::vector<double>> WordVectors::phrase_vector(std::string_view phrase) const {
    std::vector<double> sum(dim_, 0.0);
    std::size_t hits = 0;
    for (const std::string& token : tokenize(phrase)) {
        auto vec = vector(token);
        if (!vec) continue;
        for (std::size_t i = 0; i < dim_; ++i) sum[i] += (*vec)[i];
        ++hits;
    }
    if (hits == 0) return std::nullopt;
    for (double& x : sum) x /= static_cast<double>(hits);
    return sum;
}

double WordVectors::phrase_similarity(std::string_view a, std::string_view b) const {
    auto va = phrase_vector(a);
    auto vb = phrase_vector(b);
    if (!va || !vb) return 0.0;
    return cosine_similarity(*va, *vb);
}

double cosine_similarity(std::span<const double> a, std::span<const double> b) {
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
        dot += a[i] * b[i];
        na += a[i] * a[i];
        nb += b[i] * b[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

}  // namespace kgex
