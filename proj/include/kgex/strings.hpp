#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace kgex {

std::string trim(std::string_view s);
std::string to_lower(std::string_view s);
bool contains(std::string_view haystack, std::string_view needle);

// Whitespace-split tokens, lower-cased. Used for phrase similarity lookups.
std::vector<std::string> tokenize(std::string_view phrase);

std::vector<std::string> split(std::string_view s, char delimiter);

// Image file stem rule: drop every non-alphanumeric character from the IRI.
// http://www.wikidata.org/entity/Q42 -> httpwwwwikidataorgentityQ42
std::string flatten_iri(std::string_view iri);

// Last path/fragment segment of an IRI, for compact display.
std::string iri_local_name(std::string_view iri);

// Replace every occurrence of `slot` in `text` with `value`.
std::string replace_all(std::string text, std::string_view slot, std::string_view value);

// Lower-case alphanumeric slug, runs of other characters collapsed to '-'.
std::string slugify(std::string_view s);

std::string format_double(double value, int decimals);

// Standard base64 with padding, for image payloads.
std::string base64_encode(std::string_view bytes);

}  // namespace kgex
