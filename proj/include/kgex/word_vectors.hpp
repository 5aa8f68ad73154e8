#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace kgex {

// Text-format word embeddings: one "word v1 .. vd" line per word, with an
// optional "count dim" header line. Duplicate words keep their first vector.
class WordVectors {
public:
    static WordVectors load(const std::filesystem::path& path);
    static WordVectors load(std::istream& in);

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return words_.size(); }

    std::optional<std::span<const double>> vector(std::string_view word) const;

    // Mean vector over the phrase's in-vocabulary tokens (lowercased,
    // whitespace split). Empty when every token is out of vocabulary.
    std::optional<std::vector<double>> phrase_vector(std::string_view phrase) const;

    // Cosine similarity between phrase vectors; 0 when either side has no
    // in-vocabulary token.
    double phrase_similarity(std::string_view a, std::string_view b) const;

private:
    std::size_t dim_ = 0;
    std::unordered_map<std::string, std::size_t> words_;  // word -> row
    std::vector<double> table_;
};

double cosine_similarity(std::span<const double> a, std::span<const double> b);

}  // namespace kgex
