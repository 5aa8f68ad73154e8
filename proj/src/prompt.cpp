#include "kgex/prompt.hpp"

#include <fstream>

#include "kgex/csv.hpp"
#include "kgex/error.hpp"
#include "kgex/strings.hpp"

namespace kgex {
namespace {

std::string substitute(const std::string& block, const PromptContext& context) {
    std::string out;
    out.reserve(block.size());
    std::size_t pos = 0;
    while (pos < block.size()) {
        std::size_t open = block.find('{', pos);
        if (open == std::string::npos) {
            out.append(block, pos, std::string::npos);
            break;
        }
        std::size_t close = block.find('}', open);
        if (close == std::string::npos) {
            out.append(block, pos, std::string::npos);
            break;
        }
        out.append(block, pos, open - pos);
        std::string name = block.substr(open + 1, close - open - 1);
        const std::string* value = nullptr;
        if (name == "subject")
            value = &context.subject;
        else if (name == "relation")
            value = &context.relation;
        else if (name == "input")
            value = &context.input;
        else
            throw ConfigError("unknown prompt placeholder: {" + name + "}");
        if (value->empty())
            throw MissingContextError("prompt placeholder {" + name + "} has no value");
        out += *value;
        pos = close + 1;
    }
    return out;
}

}  // namespace

PromptTemplate PromptTemplate::triple_defaults() {
    PromptTemplate t;
    t.definition =
        "A knowledge graph stores facts as triples of the form (subject, relation, object). "
        "The object completes the statement the subject and relation begin.";
    t.role =
        "You are a careful knowledge engineer who completes triples about artworks. "
        "List the objects that complete the triple ({subject}, {relation}, ?).";
    t.input = "Context about {subject}: {input}";
    t.formatting =
        "Answer with a JSON array of strings and nothing else. "
        "Use [] when no object applies.";
    return t;
}

PromptTemplate PromptTemplate::verify_defaults() {
    PromptTemplate t;
    t.definition.clear();
    t.role.clear();
    t.input = "{input}";
    t.formatting = "Answer yes or no.";
    return t;
}

PromptTemplate PromptTemplate::load(const std::filesystem::path& path) {
    auto in = open_input(path);
    PromptTemplate tmpl;
    std::string line;
    std::string* current = nullptr;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        std::string stripped = trim(line);
        if (stripped.size() >= 2 && stripped.front() == '[' && stripped.back() == ']') {
            std::string name = trim(stripped.substr(1, stripped.size() - 2));
            if (name == "definition")
                current = &tmpl.definition;
            else if (name == "role")
                current = &tmpl.role;
            else if (name == "input")
                current = &tmpl.input;
            else if (name == "formatting")
                current = &tmpl.formatting;
            else
                throw ParseError("unknown prompt block: " + name, lineno);
            continue;
        }
        if (current == nullptr) {
            if (stripped.empty()) continue;
            throw ParseError("prompt text before any [block] header", lineno);
        }
        if (!current->empty()) current->push_back('\n');
        *current += line;
    }
    for (std::string* block : {&tmpl.definition, &tmpl.role, &tmpl.input, &tmpl.formatting})
        *block = trim(*block);
    return tmpl;
}

std::string render_prompt(const PromptTemplate& tmpl, const PromptContext& context) {
    std::string out;
    for (const std::string* block : {&tmpl.definition, &tmpl.role, &tmpl.input, &tmpl.formatting}) {
        if (block->empty()) continue;
        std::string rendered = substitute(*block, context);
        if (rendered.empty()) continue;
        if (!out.empty()) out += "\n\n";
        out += rendered;
    }
    if (out.empty()) throw MissingContextError("prompt template has no content");
    return out;
}

}  // namespace kgex
